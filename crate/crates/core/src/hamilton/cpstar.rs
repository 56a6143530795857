use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub checked: usize,
    pub violations: usize,
}

impl RegimeReport {
    pub fn violation_fraction(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            self.violations as f64 / self.checked as f64
        }
    }
}

/// Lower bound on |Ū*| checked over snapshots with 1 ≤ |U| < 2αn:
/// |Ū*| ≥ relax·n/20 while |U| ≥ n/(θ ln n), and
/// |Ū*| ≥ relax·θ^{1/2}·|U|·ln n below that.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpstarReport {
    pub relax: f64,
    pub large_u: RegimeReport,
    pub small_u: RegimeReport,
}

impl CpstarReport {
    pub fn violations(&self) -> usize {
        self.large_u.violations + self.small_u.violations
    }

    pub fn checked(&self) -> usize {
        self.large_u.checked + self.small_u.checked
    }

    pub fn violation_fraction(&self) -> f64 {
        match self.checked() {
            0 => 0.0,
            c => self.violations() as f64 / c as f64,
        }
    }
}

pub fn cpstar_check(
    snapshots: &[(usize, usize)],
    n: usize,
    alpha: f64,
    theta: f64,
    relax: f64,
) -> CpstarReport {
    let nf = n as f64;
    let ln = nf.ln();
    let split = nf / (theta * ln);
    let mut report = CpstarReport {
        relax,
        large_u: RegimeReport::default(),
        small_u: RegimeReport::default(),
    };
    for &(u, ubar) in snapshots {
        if u == 0 || u as f64 >= 2.0 * alpha * nf {
            continue;
        }
        let (regime, bound) = if u as f64 >= split {
            (&mut report.large_u, nf / 20.0)
        } else {
            (&mut report.small_u, theta.sqrt() * u as f64 * ln)
        };
        regime.checked += 1;
        if (ubar as f64) < relax * bound {
            regime.violations += 1;
        }
    }
    report
}

/// Per-level success probability used as a yardstick for the measured trial
/// counts. `None` where the formula is not positive (α ≥ 1/40 in the middle
/// regime).
pub fn reference_p(u: usize, n: usize, alpha: f64, theta: f64) -> Option<f64> {
    let (uf, nf) = (u as f64, n as f64);
    let p = if uf >= 2.0 * alpha * nf {
        (uf - alpha * nf) / nf
    } else if uf >= nf / (theta * nf.ln()) {
        alpha * (1.0 - alpha) * (1.0 / 40.0 - alpha)
    } else {
        alpha * (1.0 - alpha) * theta.sqrt() * uf / (6.0 * nf)
    };
    (p > 0.0).then_some(p)
}
