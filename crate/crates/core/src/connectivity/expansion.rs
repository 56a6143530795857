use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{condense, ConnectivityError, Digraph};
use crate::rng::rng_from_seed;

pub const MAX_EXHAUSTIVE_N: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpansionMode {
    /// Complete decision over every set up to the threshold size.
    Exhaustive,
    /// Falsifier only: the source and sink components of the condensation,
    /// then `samples_per_size` uniform sets of every size up to the threshold.
    Sampled { samples_per_size: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub alpha: f64,
    pub k: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub mode: ExpansionMode,
    /// Sets examined.
    pub samples: u64,
    pub violation: Option<Vec<usize>>,
    /// Whether `k` meets [`expansion_k_bound`] for `alpha`.
    pub hypothesis_holds: bool,
}

/// ⌊(1−α)²n⌋, the largest set size the check covers.
pub fn expansion_threshold(n: usize, alpha: f64) -> usize {
    ((1.0 - alpha).powi(2) * n as f64 + 1e-9).floor() as usize
}

/// Degree needed for small sets to expand w.h.p.: (2 − 2 ln(1−α)) / α.
pub fn expansion_k_bound(alpha: f64) -> f64 {
    (2.0 - 2.0 * (1.0 - alpha).ln()) / alpha
}

/// A nonempty proper `set` violates expansion when no edge leaves it or no
/// edge enters it.
pub fn is_violating(g: &Digraph, set: &[usize]) -> bool {
    if set.is_empty() || set.len() >= g.n() {
        return false;
    }
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    let leaves = set
        .iter()
        .any(|&v| g.successors(v).iter().any(|&w| !inside[w as usize]));
    let enters = set
        .iter()
        .any(|&v| g.predecessors(v).iter().any(|&w| !inside[w as usize]));
    !(leaves && enters)
}

pub fn expansion_check(
    g: &Digraph,
    alpha: f64,
    k: usize,
    mode: ExpansionMode,
) -> Result<ExpansionReport, ConnectivityError> {
    let n = g.n();
    let max_size = expansion_threshold(n, alpha).min(n.saturating_sub(1));
    let hypothesis_holds = k as f64 >= expansion_k_bound(alpha);
    if !hypothesis_holds {
        log::warn!(
            "expansion check with K = {k} below the bound {:.2} for alpha = {alpha}",
            expansion_k_bound(alpha)
        );
    }
    let (samples, violation) = match mode {
        ExpansionMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(ConnectivityError::SizeTooLargeForExhaustive {
                    n,
                    max: MAX_EXHAUSTIVE_N,
                });
            }
            exhaustive(g, max_size)
        }
        ExpansionMode::Sampled {
            samples_per_size,
            seed,
        } => sampled(g, max_size, samples_per_size, seed),
    };
    Ok(ExpansionReport {
        n,
        alpha,
        k,
        min_size: 1,
        max_size,
        mode,
        samples,
        violation,
        hypothesis_holds,
    })
}

fn exhaustive(g: &Digraph, max_size: usize) -> (u64, Option<Vec<usize>>) {
    let n = g.n();
    let mask_of = |l: &[u32]| l.iter().fold(0u32, |m, &w| m | 1 << w);
    let out: Vec<u32> = (0..n).map(|v| mask_of(g.successors(v))).collect();
    let inn: Vec<u32> = (0..n).map(|v| mask_of(g.predecessors(v))).collect();
    let full: u64 = 1 << n;
    let mut checked = 0u64;
    for size in 1..=max_size {
        // Gosper's hack: all n-bit masks with `size` bits, increasing.
        let mut m: u64 = (1 << size) - 1;
        while m < full {
            checked += 1;
            let s = m as u32;
            let (mut o, mut i) = (0u32, 0u32);
            let mut bits = s;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                o |= out[v];
                i |= inn[v];
                bits &= bits - 1;
            }
            if o & !s == 0 || i & !s == 0 {
                let set = (0..n).filter(|&v| s >> v & 1 == 1).collect();
                return (checked, Some(set));
            }
            let c = m & m.wrapping_neg();
            let r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
    }
    (checked, None)
}

fn sampled(g: &Digraph, max_size: usize, per_size: usize, seed: u64) -> (u64, Option<Vec<usize>>) {
    let n = g.n();
    let mut checked = 0u64;
    let cond = condense(g);
    if cond.count() > 1 {
        for &c in cond.sources.iter().chain(&cond.sinks) {
            if cond.size(c) <= max_size {
                checked += 1;
                let set = cond.members[c].clone();
                debug_assert!(is_violating(g, &set));
                return (checked, Some(set));
            }
        }
    }
    let mut rng = rng_from_seed(seed);
    for size in 1..=max_size {
        for _ in 0..per_size {
            checked += 1;
            let mut set = index::sample(&mut rng, n, size).into_vec();
            if is_violating(g, &set) {
                set.sort_unstable();
                return (checked, Some(set));
            }
        }
    }
    (checked, None)
}
