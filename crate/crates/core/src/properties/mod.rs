//! Numerical checks of qualitative solution behaviour: sign of solutions on
//! sampled grids, the long-time power law, the onset of positivity, and
//! alternating signs of divided differences of the modal decay factor.

mod asymptotics;
mod monotonicity;
mod positivity;

pub use asymptotics::{
    correction_exponent, positivity_onset, verify_asymptotics, AsymptoticReport, OnsetReport,
};
pub use monotonicity::{check_complete_monotonicity, MonotonicityReport, OrderSign};
pub use positivity::{
    verify_strict_positivity, verify_weak_maximum, DataSign, PositivityReport,
    StrictPositivityReport,
};

/// `n` points from `lo` to `hi` with constant ratio.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let r = (hi / lo).ln() / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo * (r * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}
