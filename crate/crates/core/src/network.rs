//! Contraction of tensor networks whose nodes have at most two legs.
//!
//! Such a network is a disjoint union of open chains (ending in rank-1
//! nodes) and closed loops. Chains are swept as vector-matrix products and
//! loops as matrix products closed by a trace, so nothing larger than a
//! single `D × D` matrix is ever formed.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tensor::C64;

pub type EdgeId = usize;

/// A tensor with up to two legs; `data` is row-major over `legs`.
#[derive(Debug, Clone)]
pub struct Node {
    pub legs: Vec<EdgeId>,
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl Node {
    pub fn new(legs: Vec<EdgeId>, dims: Vec<usize>, data: Vec<C64>) -> Self {
        debug_assert_eq!(legs.len(), dims.len());
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        Self { legs, dims, data }
    }

    /// Entry with leg `leg` at index `i` and the other leg at index `k`.
    fn entry(&self, leg: usize, i: usize, k: usize) -> C64 {
        if leg == 0 {
            self.data[i * self.dims[1] + k]
        } else {
            self.data[k * self.dims[1] + i]
        }
    }
}

/// Contracts every edge of the network and returns the resulting scalar.
pub fn contract(nodes: &[Node]) -> Result<C64> {
    let mut ends: HashMap<EdgeId, Vec<(usize, usize)>> = HashMap::new();
    for (n, node) in nodes.iter().enumerate() {
        if node.legs.len() > 2 {
            return Err(Error::StrategyUnavailable {
                strategy: "factored".into(),
                reason: format!("network node with {} legs", node.legs.len()),
            });
        }
        for (l, &e) in node.legs.iter().enumerate() {
            ends.entry(e).or_default().push((n, l));
        }
    }
    for (e, v) in &ends {
        if v.len() != 2 {
            return Err(Error::StrategyUnavailable {
                strategy: "factored".into(),
                reason: format!("edge {e} has {} endpoints", v.len()),
            });
        }
        let (a, la) = v[0];
        let (b, lb) = v[1];
        if nodes[a].dims[la] != nodes[b].dims[lb] {
            return Err(Error::DimensionMismatch(format!("edge {e} joins legs of different dimension")));
        }
    }
    let other_end = |e: EdgeId, from: (usize, usize)| -> (usize, usize) {
        let v = &ends[&e];
        if v[0] == from {
            v[1]
        } else {
            v[0]
        }
    };

    let mut visited = vec![false; nodes.len()];
    let mut result = C64::new(1.0, 0.0);

    for (n, node) in nodes.iter().enumerate() {
        if node.legs.is_empty() {
            visited[n] = true;
            result *= node.data[0];
        }
    }

    // open chains
    for start in 0..nodes.len() {
        if visited[start] || nodes[start].legs.len() != 1 {
            continue;
        }
        visited[start] = true;
        let mut vec = nodes[start].data.clone();
        let mut at = (start, 0usize);
        loop {
            let e = nodes[at.0].legs[at.1];
            let (m, leg) = other_end(e, at);
            visited[m] = true;
            let node = &nodes[m];
            if node.legs.len() == 1 {
                result *= vec.iter().zip(&node.data).map(|(a, b)| a * b).sum::<C64>();
                break;
            }
            let out_leg = 1 - leg;
            let dout = node.dims[out_leg];
            let mut next = vec![C64::new(0.0, 0.0); dout];
            for (i, &x) in vec.iter().enumerate() {
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, slot) in next.iter_mut().enumerate() {
                    *slot += x * node.entry(leg, i, k);
                }
            }
            vec = next;
            at = (m, out_leg);
        }
    }

    // closed loops
    for start in 0..nodes.len() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let first = &nodes[start];
        let d0 = first.dims[0];
        // acc[a][k]: leg 0 of the start node at a, current open leg at k
        let mut acc: Vec<Vec<C64>> =
            (0..d0).map(|a| (0..first.dims[1]).map(|k| first.entry(0, a, k)).collect()).collect();
        let mut at = (start, 1usize);
        loop {
            let e = nodes[at.0].legs[at.1];
            let (m, leg) = other_end(e, at);
            if m == start {
                debug_assert_eq!(leg, 0);
                result *= (0..d0).map(|a| acc[a][a]).sum::<C64>();
                break;
            }
            visited[m] = true;
            let node = &nodes[m];
            let out_leg = 1 - leg;
            let dout = node.dims[out_leg];
            acc = acc
                .iter()
                .map(|row| {
                    let mut next = vec![C64::new(0.0, 0.0); dout];
                    for (i, &x) in row.iter().enumerate() {
                        if x == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for (k, slot) in next.iter_mut().enumerate() {
                            *slot += x * node.entry(leg, i, k);
                        }
                    }
                    next
                })
                .collect();
            at = (m, out_leg);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn open_chain_is_bilinear_form() {
        // a^T M b
        let a = Node::new(vec![0], vec![2], vec![c(1.0, 0.0), c(2.0, 1.0)]);
        let m = Node::new(vec![0, 1], vec![2, 3], (0..6).map(|k| c(k as f64, -1.0)).collect());
        let b = Node::new(vec![1], vec![3], vec![c(0.5, 0.0), c(-1.0, 0.0), c(0.0, 2.0)]);
        let mut want = c(0.0, 0.0);
        for i in 0..2 {
            for k in 0..3 {
                want += a.data[i] * m.data[i * 3 + k] * b.data[k];
            }
        }
        let got = contract(&[b, m, a]).unwrap();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn reversed_leg_order_is_transposed() {
        let a = Node::new(vec![0], vec![2], vec![c(1.0, 0.0), c(0.0, 0.0)]);
        // legs listed (out, in): entry (in=i, out=k) is data[k*2 + i]
        let m = Node::new(vec![1, 0], vec![2, 2], vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let b = Node::new(vec![1], vec![2], vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(contract(&[a, m, b]).unwrap(), c(3.0, 0.0));
    }

    #[test]
    fn loop_is_trace_of_product() {
        let m1 = Node::new(vec![0, 1], vec![2, 2], vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let m2 = Node::new(vec![1, 0], vec![2, 2], vec![c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        // tr(M1 · M2) with M2 indexed (leg1, leg0) = m2.data
        let mut want = c(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                want += m1.data[a * 2 + b] * m2.data[b * 2 + a];
            }
        }
        assert!((contract(&[m1, m2]).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn self_loop_and_scalars() {
        let m = Node::new(vec![7, 7], vec![3, 3], (0..9).map(|k| c(k as f64, 0.0)).collect());
        let s = Node::new(vec![], vec![], vec![c(2.0, 0.0)]);
        assert_eq!(contract(&[m, s]).unwrap(), c(24.0, 0.0));
    }

    #[test]
    fn rejects_dangling_edges_and_high_rank() {
        let a = Node::new(vec![0], vec![2], vec![c(1.0, 0.0); 2]);
        assert!(contract(&[a]).is_err());
        let t = Node::new(vec![0, 1, 2], vec![1, 1, 1], vec![c(1.0, 0.0)]);
        assert!(contract(&[t]).is_err());
    }
}
