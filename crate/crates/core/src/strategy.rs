//! Interchangeable contraction strategies for `⟨W₁|O|W₂⟩`.
//!
//! Strategies are registered by name in a process-wide registry and looked
//! up at runtime (the CLI's `--strategy` flag goes through [`get`]). Two are
//! built in:
//!
//! - `dense`: materializes the `D⁶` amplitudes and applies the six insertion
//!   factors to them in sequence. Reference path, `O(D⁷)`.
//! - `factored`: contracts each branch pair of the product metadata as a
//!   network of at most two-leg tensors, `O(D³)` per pair.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{Error, Result};
use crate::field::MAX_PROCESS_DIM;
use crate::network::{self, Node};
use crate::process::{Branch, InsertionQuadruple, ProcessVector};
use crate::tensor::{sandwich_product, LabeledOperator, C64};

pub trait ContractionStrategy: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// `⟨bra|O|ket⟩` for the insertion operator of `ins`.
    fn cross_term(&self, bra: &ProcessVector, ket: &ProcessVector, ins: &InsertionQuadruple) -> Result<C64>;

    fn evaluate(&self, w: &ProcessVector, ins: &InsertionQuadruple) -> Result<C64> {
        self.cross_term(w, w, ins)
    }
}

/// Dense reference contraction.
#[derive(Debug, Clone, Default)]
pub struct DenseStrategy {
    /// Refuse inputs with more amplitudes than this; `None` means unbounded.
    pub max_amplitudes: Option<usize>,
}

impl DenseStrategy {
    pub fn with_budget(max_amplitudes: usize) -> Self {
        Self { max_amplitudes: Some(max_amplitudes) }
    }
}

impl ContractionStrategy for DenseStrategy {
    fn name(&self) -> &str {
        "dense"
    }

    fn cross_term(&self, bra: &ProcessVector, ket: &ProcessVector, ins: &InsertionQuadruple) -> Result<C64> {
        if bra.registers() != ket.registers() {
            return Err(Error::RegisterMismatch);
        }
        let registers = bra.registers();
        if registers.dim() > MAX_PROCESS_DIM {
            return Err(Error::StrategyUnavailable {
                strategy: self.name().into(),
                reason: format!("dense storage is capped at D = {MAX_PROCESS_DIM}, got {}", registers.dim()),
            });
        }
        if let Some(limit) = self.max_amplitudes {
            if registers.amplitudes() > limit {
                return Err(Error::StrategyUnavailable {
                    strategy: self.name().into(),
                    reason: format!("{} amplitudes exceed the budget of {limit}", registers.amplitudes()),
                });
            }
        }
        let factors = ins.placed_factors(registers)?;
        sandwich_product(bra.vector(), &factors, ket.vector())
    }
}

/// Branch-pair contraction over the product metadata.
#[derive(Debug, Clone, Copy, Default)]
pub struct FactoredStrategy;

impl FactoredStrategy {
    fn branches<'a>(&self, w: &'a ProcessVector) -> Result<&'a [Branch]> {
        w.branches().ok_or_else(|| Error::StrategyUnavailable {
            strategy: self.name().into(),
            reason: "process vector carries no product metadata".into(),
        })
    }

    /// `⟨bra|O|ket⟩` for single product branches, weights excluded.
    fn pair(bra: &Branch, factors: &[LabeledOperator], ket: &Branch) -> Result<C64> {
        let mut edges: BTreeMap<String, usize> = BTreeMap::new();
        let mut edge = |key: String| -> usize {
            let next = edges.len();
            *edges.entry(key).or_insert(next)
        };
        let consumed: Vec<&str> = factors.iter().flat_map(|f| f.domain().iter().map(|l| l.name())).collect();
        let produced: Vec<&str> = factors.iter().flat_map(|f| f.image().iter().map(|l| l.name())).collect();
        // untouched registers join ket and bra directly
        let ket_key = |r: &str| if consumed.contains(&r) { format!("k:{r}") } else { format!("w:{r}") };
        let bra_key = |r: &str| if produced.contains(&r) { format!("b:{r}") } else { format!("w:{r}") };

        let mut nodes = Vec::with_capacity(bra.factors.len() + ket.factors.len() + factors.len());
        for f in &ket.factors {
            let legs = f.labels().iter().map(|l| edge(ket_key(l.name()))).collect();
            nodes.push(Node::new(legs, f.dims(), f.coeffs().to_vec()));
        }
        for f in &bra.factors {
            let legs = f.labels().iter().map(|l| edge(bra_key(l.name()))).collect();
            nodes.push(Node::new(legs, f.dims(), f.coeffs().iter().map(|c| c.conj()).collect()));
        }
        for op in factors {
            if op.domain().len() != 1 || op.image().len() != 1 {
                return Err(Error::StrategyUnavailable {
                    strategy: "factored".into(),
                    reason: "insertion factors must act on single registers".into(),
                });
            }
            let (d, i) = (&op.domain()[0], &op.image()[0]);
            let m = op.matrix();
            let data = (0..i.dim()).flat_map(|r| (0..d.dim()).map(move |c| m[(r, c)])).collect();
            nodes.push(Node::new(vec![edge(bra_key(i.name())), edge(ket_key(d.name()))], vec![i.dim(), d.dim()], data));
        }
        network::contract(&nodes)
    }
}

impl ContractionStrategy for FactoredStrategy {
    fn name(&self) -> &str {
        "factored"
    }

    fn cross_term(&self, bra: &ProcessVector, ket: &ProcessVector, ins: &InsertionQuadruple) -> Result<C64> {
        if bra.registers() != ket.registers() {
            return Err(Error::RegisterMismatch);
        }
        let factors = ins.placed_factors(bra.registers())?;
        let bras = self.branches(bra)?;
        let kets = self.branches(ket)?;
        let mut total = C64::new(0.0, 0.0);
        for b in bras {
            for k in kets {
                total += b.weight.conj() * k.weight * Self::pair(b, &factors, k)?;
            }
        }
        Ok(total)
    }
}

static REGISTRY: LazyLock<RwLock<BTreeMap<String, Arc<dyn ContractionStrategy>>>> = LazyLock::new(|| {
    let mut m: BTreeMap<String, Arc<dyn ContractionStrategy>> = BTreeMap::new();
    m.insert("dense".into(), Arc::new(DenseStrategy::default()));
    m.insert("factored".into(), Arc::new(FactoredStrategy));
    RwLock::new(m)
});

/// Registers (or replaces) a strategy under its own name.
pub fn register(strategy: impl Into<Arc<dyn ContractionStrategy>>) {
    let strategy = strategy.into();
    REGISTRY.write().unwrap().insert(strategy.name().to_string(), strategy);
}

pub fn get(name: impl AsRef<str>) -> Result<Arc<dyn ContractionStrategy>> {
    let name = name.as_ref();
    REGISTRY.read().unwrap().get(name).cloned().ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}

/// Registered names, sorted.
pub fn names() -> Vec<String> {
    REGISTRY.read().unwrap().keys().cloned().collect()
}
