//! Fixed-order blocked summation over quadrature nodes.
//!
//! Nodes are cut into blocks of [`BLOCK`] consecutive indices. Each block is
//! summed pairwise and the block sums are then summed pairwise, so the
//! result does not depend on how blocks are scheduled across threads.

use serde::{Deserialize, Serialize};

pub const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct NodeSum {
    pub sum: f64,
    pub used: u64,
    pub skipped: u64,
}

pub(crate) fn pairwise(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise(&v[..mid]) + pairwise(&v[mid..])
}

fn run_block<S, I, F>(block: usize, count: usize, init: &I, eval: &F) -> NodeSum
where
    I: Fn() -> S,
    F: Fn(&mut S, usize) -> Option<f64>,
{
    let start = block * BLOCK;
    let end = (start + BLOCK).min(count);
    let mut scratch = init();
    let mut vals = Vec::with_capacity(end - start);
    let mut skipped = 0u64;
    for i in start..end {
        match eval(&mut scratch, i) {
            Some(v) if v.is_finite() => vals.push(v),
            _ => skipped += 1,
        }
    }
    NodeSum {
        sum: pairwise(&vals),
        used: vals.len() as u64,
        skipped,
    }
}

/// Sums `eval(i)` over `0..count`, skipping nodes that return `None` or a
/// non-finite value. `init` builds per-block scratch space.
pub(crate) fn sum_nodes<S, I, F>(count: usize, exec: Execution, init: I, eval: F) -> NodeSum
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, usize) -> Option<f64> + Sync,
{
    let blocks = count.div_ceil(BLOCK);
    let parts: Vec<NodeSum> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..blocks)
                .into_par_iter()
                .map(|b| run_block(b, count, &init, &eval))
                .collect()
        }
        _ => (0..blocks).map(|b| run_block(b, count, &init, &eval)).collect(),
    };
    let sums: Vec<f64> = parts.iter().map(|p| p.sum).collect();
    NodeSum {
        sum: pairwise(&sums),
        used: parts.iter().map(|p| p.used).sum(),
        skipped: parts.iter().map(|p| p.skipped).sum(),
    }
}
