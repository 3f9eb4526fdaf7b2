//! Labeled finite-dimensional vectors and operators.
//!
//! Every register carries a name and a dimension. Coefficients are stored
//! densely in row-major lexicographic order over the ordered label list, so
//! the last label varies fastest. Operators carry separate domain and image
//! label lists; applying an operator replaces its domain registers with its
//! image registers and leaves every other register untouched.
//!
//! All alignment between differently ordered label lists goes through an
//! explicit axis permutation, never through name-sorted storage.

use std::collections::{HashMap, HashSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A named local Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceLabel {
    name: String,
    dim: usize,
}

impl SpaceLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::ZeroDimension { name });
        }
        Ok(Self { name, dim })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same dimension, different name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), dim: self.dim }
    }
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.dim)
    }
}

fn check_distinct(labels: &[SpaceLabel]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.name.as_str()) {
            return Err(Error::DuplicateLabel(l.name.clone()));
        }
    }
    Ok(())
}

fn total_dim(labels: &[SpaceLabel]) -> usize {
    labels.iter().map(|l| l.dim).product()
}

fn names(labels: &[SpaceLabel]) -> Vec<String> {
    labels.iter().map(|l| l.name.clone()).collect()
}

fn sorted_names(labels: &[SpaceLabel]) -> Vec<String> {
    let mut n = names(labels);
    n.sort();
    n
}

/// Row-major strides for the given dimensions.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Reorders tensor axes: axis `k` of the output is axis `perm[k]` of the input.
fn permute_axes(data: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    debug_assert_eq!(dims.len(), perm.len());
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return data.to_vec();
    }
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let n = data.len();
    let mut out = Vec::with_capacity(n);
    let mut idx = vec![0usize; new_dims.len()];
    let mut src = 0usize;
    for _ in 0..n {
        out.push(data[src]);
        // odometer increment over the output index
        for k in (0..new_dims.len()).rev() {
            idx[k] += 1;
            src += src_strides[k];
            if idx[k] < new_dims[k] {
                break;
            }
            src -= src_strides[k] * new_dims[k];
            idx[k] = 0;
        }
    }
    out
}

/// Dense complex tensor over an ordered list of distinct registers.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    labels: Vec<SpaceLabel>,
    coeffs: Vec<C64>,
}

impl LabeledVector {
    pub fn new(labels: Vec<SpaceLabel>, coeffs: Vec<C64>) -> Result<Self> {
        check_distinct(&labels)?;
        let expected = total_dim(&labels);
        if coeffs.len() != expected {
            return Err(Error::CoefficientCount { expected, got: coeffs.len() });
        }
        Ok(Self { labels, coeffs })
    }

    /// A single vector on one register.
    pub fn on(label: SpaceLabel, coeffs: Vec<C64>) -> Result<Self> {
        Self::new(vec![label], coeffs)
    }

    /// A rank-zero vector holding one amplitude.
    pub fn scalar(value: C64) -> Self {
        Self { labels: Vec::new(), coeffs: vec![value] }
    }

    pub fn basis(label: SpaceLabel, index: usize) -> Result<Self> {
        if index >= label.dim {
            return Err(Error::DimensionMismatch(format!("basis index {index} outside register {label}")));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); label.dim];
        coeffs[index] = C64::new(1.0, 0.0);
        Self::on(label, coeffs)
    }

    pub fn labels(&self) -> &[SpaceLabel] {
        &self.labels
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.dim).collect()
    }

    pub fn label(&self, name: &str) -> Option<&SpaceLabel> {
        self.labels.iter().find(|l| l.name == name)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Coefficient at a multi-index given in stored label order.
    pub fn get(&self, index: &[usize]) -> C64 {
        assert_eq!(index.len(), self.labels.len(), "index rank mismatch");
        let s = strides(&self.dims());
        let flat: usize = index.iter().zip(&s).map(|(i, s)| i * s).sum();
        self.coeffs[flat]
    }

    /// Same vector with its labels stored in the given name order.
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelSetMismatch {
                left: names(&self.labels),
                right: order.iter().map(|s| s.as_ref().to_string()).collect(),
            });
        }
        let pos: HashMap<&str, usize> = self.labels.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect();
        let mut perm = Vec::with_capacity(order.len());
        for name in order {
            let p = *pos.get(name.as_ref()).ok_or_else(|| Error::LabelSetMismatch {
                left: names(&self.labels),
                right: order.iter().map(|s| s.as_ref().to_string()).collect(),
            })?;
            perm.push(p);
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect::<Vec<_>>();
        check_distinct(&labels)?;
        let coeffs = permute_axes(&self.coeffs, &self.dims(), &perm);
        Ok(Self { labels, coeffs })
    }

    /// Renames register `from` to `to`, keeping coefficients.
    pub fn relabeled(&self, from: &str, to: &str) -> Result<Self> {
        let mut labels = self.labels.clone();
        let slot = labels.iter_mut().find(|l| l.name == from).ok_or_else(|| Error::MissingLabel(from.to_string()))?;
        slot.name = to.to_string();
        Self::new(labels, self.coeffs.clone())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { labels: self.labels.clone(), coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Sum aligned by register name; the result keeps `self`'s label order.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_registers(&self.labels, &other.labels)?;
        let aligned = other.permuted(&names(&self.labels))?;
        let coeffs = self.coeffs.iter().zip(&aligned.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { labels: self.labels.clone(), coeffs })
    }
}

fn check_same_registers(left: &[SpaceLabel], right: &[SpaceLabel]) -> Result<()> {
    let mismatch = || Error::LabelSetMismatch { left: sorted_names(left), right: sorted_names(right) };
    if left.len() != right.len() {
        return Err(mismatch());
    }
    let dims: HashMap<&str, usize> = left.iter().map(|l| (l.name.as_str(), l.dim)).collect();
    for r in right {
        match dims.get(r.name.as_str()) {
            None => return Err(mismatch()),
            Some(&d) if d != r.dim => {
                return Err(Error::ConflictingDimension { name: r.name.clone(), first: d, second: r.dim })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Dense matrix from the product space of `domain` to that of `image`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    domain: Vec<SpaceLabel>,
    image: Vec<SpaceLabel>,
    matrix: DMatrix<C64>,
}

impl LabeledOperator {
    pub fn new(domain: Vec<SpaceLabel>, image: Vec<SpaceLabel>, matrix: DMatrix<C64>) -> Result<Self> {
        check_distinct(&domain)?;
        check_distinct(&image)?;
        let (rows, cols) = (total_dim(&image), total_dim(&domain));
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, registers need {rows}x{cols}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { domain, image, matrix })
    }

    /// Square operator acting within one register.
    pub fn on(label: SpaceLabel, matrix: DMatrix<C64>) -> Result<Self> {
        Self::new(vec![label.clone()], vec![label], matrix)
    }

    pub fn identity(labels: Vec<SpaceLabel>) -> Result<Self> {
        let n = total_dim(&labels);
        Self::new(labels.clone(), labels, DMatrix::identity(n, n))
    }

    /// The identity wire `id_from^to`, moving amplitudes from one register to another.
    pub fn wire(from: SpaceLabel, to: SpaceLabel) -> Result<Self> {
        if from.dim != to.dim {
            return Err(Error::DimensionMismatch(format!("wire {from} -> {to}")));
        }
        let n = from.dim;
        Self::new(vec![from], vec![to], DMatrix::identity(n, n))
    }

    /// `matrix` acting from register `from` into register `to`.
    pub fn placed(from: SpaceLabel, to: SpaceLabel, matrix: DMatrix<C64>) -> Result<Self> {
        Self::new(vec![from], vec![to], matrix)
    }

    pub fn domain(&self) -> &[SpaceLabel] {
        &self.domain
    }

    pub fn image(&self) -> &[SpaceLabel] {
        &self.image
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { domain: self.domain.clone(), image: self.image.clone(), matrix: &self.matrix * factor }
    }

    /// Sum of two operators with identical label lists.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain || self.image != other.image {
            return Err(Error::LabelSetMismatch { left: names(&self.domain), right: names(&other.domain) });
        }
        Ok(Self { domain: self.domain.clone(), image: self.image.clone(), matrix: &self.matrix + &other.matrix })
    }

    /// `self ∘ inner`; `inner`'s image must equal `self`'s domain, in order.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.image != self.domain {
            return Err(Error::LabelSetMismatch { left: names(&self.domain), right: names(&inner.image) });
        }
        Self::new(inner.domain.clone(), self.image.clone(), &self.matrix * &inner.matrix)
    }
}

/// `Σᵢ |i⟩_a |i⟩_b`, unnormalized.
pub fn maximally_entangled(a: SpaceLabel, b: SpaceLabel) -> Result<LabeledVector> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!("{a} vs {b}")));
    }
    if a.name == b.name {
        return Err(Error::DuplicateLabel(a.name));
    }
    let d = a.dim;
    let mut coeffs = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        coeffs[i * d + i] = C64::new(1.0, 0.0);
    }
    LabeledVector::new(vec![a, b], coeffs)
}

/// `(U ⊗ id_b)|+⟩^{ab}`: the coefficient at `(l, m)` is `U[l, m]`.
///
/// `u` must be square on the single register `a`.
pub fn choi_vector(u: &LabeledOperator, a: SpaceLabel, b: SpaceLabel) -> Result<LabeledVector> {
    if u.domain.len() != 1 || u.image.len() != 1 || u.domain[0] != a || u.image[0] != a {
        return Err(Error::DimensionMismatch(format!("choi_vector needs an operator square on register {a}")));
    }
    let plus = maximally_entangled(a, b)?;
    apply(u, &plus)
}

/// Outer product over disjoint register sets; labels are concatenated.
pub fn tensor_product(u: &LabeledVector, v: &LabeledVector) -> Result<LabeledVector> {
    let mut labels = u.labels.clone();
    labels.extend(v.labels.iter().cloned());
    check_distinct(&labels)?;
    let mut coeffs = Vec::with_capacity(u.coeffs.len() * v.coeffs.len());
    for a in &u.coeffs {
        coeffs.extend(v.coeffs.iter().map(|b| a * b));
    }
    Ok(LabeledVector { labels, coeffs })
}

/// `⟨u|v⟩`, conjugate-linear in `u`, with registers aligned by name.
pub fn inner_product(u: &LabeledVector, v: &LabeledVector) -> Result<C64> {
    check_same_registers(&u.labels, &v.labels)?;
    let aligned = v.permuted(&names(&u.labels))?;
    Ok(u.coeffs.iter().zip(&aligned.coeffs).map(|(a, b)| a.conj() * b).sum())
}

/// Conjugate transpose with domain and image swapped.
pub fn adjoint(op: &LabeledOperator) -> LabeledOperator {
    LabeledOperator { domain: op.image.clone(), image: op.domain.clone(), matrix: op.matrix.adjoint() }
}

/// Kronecker product in factor order, with concatenated domain and image lists.
pub fn operator_tensor(ops: &[LabeledOperator]) -> Result<LabeledOperator> {
    let mut domain = Vec::new();
    let mut image = Vec::new();
    let mut matrix = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for op in ops {
        domain.extend(op.domain.iter().cloned());
        image.extend(op.image.iter().cloned());
        matrix = matrix.kronecker(&op.matrix);
    }
    LabeledOperator::new(domain, image, matrix)
}

/// Acts with `matrix` along one axis, in place of that axis.
fn apply_on_axis(data: &[C64], dims: &[usize], axis: usize, matrix: &DMatrix<C64>) -> Vec<C64> {
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let din = dims[axis];
    let dout = matrix.nrows();
    let mut out = vec![C64::new(0.0, 0.0); outer * dout * inner];
    for o in 0..outer {
        let src = &data[o * din * inner..(o + 1) * din * inner];
        let dst = &mut out[o * dout * inner..(o + 1) * dout * inner];
        for j in 0..din {
            let row = &src[j * inner..(j + 1) * inner];
            for i in 0..dout {
                let m = matrix[(i, j)];
                if m == C64::new(0.0, 0.0) {
                    continue;
                }
                let target = &mut dst[i * inner..(i + 1) * inner];
                for (t, s) in target.iter_mut().zip(row) {
                    *t += m * s;
                }
            }
        }
    }
    out
}

/// Applies `op` to `v`.
///
/// The image registers take the place of the domain registers (position for
/// position when the counts agree, otherwise as a block at the first domain
/// position). Registers outside the domain pass through unchanged.
pub fn apply(op: &LabeledOperator, v: &LabeledVector) -> Result<LabeledVector> {
    let mut domain_pos = Vec::with_capacity(op.domain.len());
    for d in &op.domain {
        let p = v.labels.iter().position(|l| l.name == d.name).ok_or_else(|| Error::MissingLabel(d.name.clone()))?;
        if v.labels[p].dim != d.dim {
            return Err(Error::ConflictingDimension { name: d.name.clone(), first: v.labels[p].dim, second: d.dim });
        }
        domain_pos.push(p);
    }

    // output label order
    let mut out_labels: Vec<SpaceLabel> = Vec::with_capacity(v.labels.len());
    if op.domain.len() == op.image.len() {
        for (i, l) in v.labels.iter().enumerate() {
            match domain_pos.iter().position(|&p| p == i) {
                Some(k) => out_labels.push(op.image[k].clone()),
                None => out_labels.push(l.clone()),
            }
        }
    } else {
        let first = domain_pos.iter().copied().min();
        for (i, l) in v.labels.iter().enumerate() {
            if Some(i) == first {
                out_labels.extend(op.image.iter().cloned());
            }
            if !domain_pos.contains(&i) {
                out_labels.push(l.clone());
            }
        }
        if first.is_none() {
            out_labels.splice(0..0, op.image.iter().cloned());
        }
    }
    check_distinct(&out_labels)?;

    if op.domain.len() == 1 && op.image.len() == 1 {
        let coeffs = apply_on_axis(&v.coeffs, &v.dims(), domain_pos[0], &op.matrix);
        return Ok(LabeledVector { labels: out_labels, coeffs });
    }

    // general path: bring the domain axes to the front and multiply
    let rest: Vec<usize> = (0..v.labels.len()).filter(|i| !domain_pos.contains(i)).collect();
    let mut perm = domain_pos.clone();
    perm.extend(rest.iter().copied());
    let front = permute_axes(&v.coeffs, &v.dims(), &perm);
    let din = total_dim(&op.domain);
    let dout = total_dim(&op.image);
    let rd: usize = rest.iter().map(|&i| v.labels[i].dim).product();
    let mut prod = vec![C64::new(0.0, 0.0); dout * rd];
    for j in 0..din {
        let src = &front[j * rd..(j + 1) * rd];
        for i in 0..dout {
            let m = op.matrix[(i, j)];
            if m == C64::new(0.0, 0.0) {
                continue;
            }
            for (t, s) in prod[i * rd..(i + 1) * rd].iter_mut().zip(src) {
                *t += m * s;
            }
        }
    }
    let mut front_labels = op.image.clone();
    front_labels.extend(rest.iter().map(|&i| v.labels[i].clone()));
    let fronted = LabeledVector::new(front_labels, prod)?;
    fronted.permuted(&names(&out_labels))
}

/// Applies the tensor product of `factors` as a single operator, without
/// forming its Kronecker matrix.
///
/// All factors act simultaneously: a factor may target a register name that
/// another factor consumes.
pub fn apply_product(factors: &[LabeledOperator], v: &LabeledVector) -> Result<LabeledVector> {
    let all_domain: Vec<SpaceLabel> = factors.iter().flat_map(|f| f.domain.iter().cloned()).collect();
    let all_image: Vec<SpaceLabel> = factors.iter().flat_map(|f| f.image.iter().cloned()).collect();
    check_distinct(&all_domain)?;
    check_distinct(&all_image)?;

    // move domain registers to private names so intermediate images never collide
    let mut work = v.clone();
    for (f, factor) in factors.iter().enumerate() {
        for (j, d) in factor.domain.iter().enumerate() {
            work = work.relabeled(&d.name, &format!("\u{0}in{f}.{j}"))?;
        }
    }
    let mut pending = Vec::new();
    for (f, factor) in factors.iter().enumerate() {
        let domain = factor.domain.iter().enumerate().map(|(j, d)| d.renamed(format!("\u{0}in{f}.{j}"))).collect();
        let image: Vec<SpaceLabel> =
            factor.image.iter().enumerate().map(|(j, d)| d.renamed(format!("\u{0}out{f}.{j}"))).collect();
        for (tmp, real) in image.iter().zip(&factor.image) {
            pending.push((tmp.name.clone(), real.name.clone()));
        }
        let op = LabeledOperator { domain, image, matrix: factor.matrix.clone() };
        work = apply(&op, &work)?;
    }
    let mut labels = work.labels;
    for l in labels.iter_mut() {
        if let Some((_, real)) = pending.iter().find(|(tmp, _)| *tmp == l.name) {
            l.name = real.clone();
        }
    }
    LabeledVector::new(labels, work.coeffs)
}

fn check_expectation_labels(w: &LabeledVector, domain: &[SpaceLabel], image: &[SpaceLabel]) -> Result<()> {
    check_same_registers(&w.labels, domain)?;
    check_same_registers(&w.labels, image)
}

/// `⟨W|O|W⟩` with `O` materialized as one operator.
pub fn contract_expectation(w: &LabeledVector, op: &LabeledOperator) -> Result<C64> {
    check_expectation_labels(w, &op.domain, &op.image)?;
    inner_product(w, &apply(op, w)?)
}

/// `⟨W|O|W⟩` for `O` given as a tensor product of factors.
pub fn contract_expectation_product(w: &LabeledVector, factors: &[LabeledOperator]) -> Result<C64> {
    let domain: Vec<SpaceLabel> = factors.iter().flat_map(|f| f.domain.iter().cloned()).collect();
    let image: Vec<SpaceLabel> = factors.iter().flat_map(|f| f.image.iter().cloned()).collect();
    check_expectation_labels(w, &domain, &image)?;
    inner_product(w, &apply_product(factors, w)?)
}

/// `⟨bra|O|ket⟩` for a product operator mapping `ket`'s registers onto `bra`'s.
pub fn sandwich_product(bra: &LabeledVector, factors: &[LabeledOperator], ket: &LabeledVector) -> Result<C64> {
    inner_product(bra, &apply_product(factors, ket)?)
}
