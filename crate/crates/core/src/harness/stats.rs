use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use super::{HarnessError, SweepPoint};

/// Two-sided exact (Clopper–Pearson) interval for `successes` out of `trials`.
pub fn clopper_pearson(successes: usize, trials: usize, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let (k, r) = (successes as f64, trials as f64);
    let tail = (1.0 - confidence) / 2.0;
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, r - k + 1.0)
            .expect("positive shape")
            .inverse_cdf(tail)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, r - k)
            .expect("positive shape")
            .inverse_cdf(1.0 - tail)
    };
    (lo, hi)
}

/// Weighted least-squares non-increasing fit (pool adjacent violators).
pub fn pav_non_increasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let w = w1 + w2;
            let m = if w > 0.0 {
                (m1 * w1 + m2 * w2) / w
            } else {
                (m1 + m2) / 2.0
            };
            blocks.push((m, w, l1 + l2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, l)| std::iter::repeat_n(m, l))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Censoring {
    None,
    /// Maker wins at least half the time at every swept bias.
    Above,
    /// Maker already loses at the smallest swept bias.
    Below,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub n: usize,
    /// Smallest swept bias whose regularized Maker-win rate is below 1/2.
    pub b_hat: Option<usize>,
    /// b̂₀ · ln n / n.
    pub ratio: Option<f64>,
    pub censoring: Censoring,
    pub biases: Vec<usize>,
    pub fitted: Vec<f64>,
}

/// Threshold for one `n` from its sweep points.
pub fn estimate_threshold(
    points: &[SweepPoint],
    n: usize,
) -> Result<ThresholdEstimate, HarnessError> {
    let mut pts: Vec<&SweepPoint> = points.iter().filter(|p| p.n == n).collect();
    if pts.len() < 3 {
        return Err(HarnessError::InsufficientPoints {
            n,
            points: pts.len(),
        });
    }
    pts.sort_by_key(|p| p.b);
    let rates: Vec<f64> = pts.iter().map(|p| p.win_rate).collect();
    let weights: Vec<f64> = pts.iter().map(|p| p.reps as f64).collect();
    let fitted = pav_non_increasing(&rates, &weights);
    let cross = fitted.iter().position(|&r| r < 0.5);
    let censoring = match cross {
        None => Censoring::Above,
        Some(0) => Censoring::Below,
        Some(_) => Censoring::None,
    };
    let b_hat = cross.map(|i| pts[i].b);
    Ok(ThresholdEstimate {
        n,
        b_hat,
        ratio: b_hat.map(|b| b as f64 * (n as f64).ln() / n as f64),
        censoring,
        biases: pts.iter().map(|p| p.b).collect(),
        fitted,
    })
}
