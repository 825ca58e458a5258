//! Numerical checks of the structural results: projector minimizers, the
//! retraction's contraction, the second-order expansion of the retracted
//! energy, the small-ball exchange scaling and band continuity.

pub mod bands;
pub mod bounds;
pub mod contraction;
pub mod expansion;
pub mod scaling;
pub mod shell;

pub use bands::{band_continuity, BandPath, BandReport};
pub use bounds::{critical_coupling, projector_difference_bound, CriticalReport, ProjectorBound};
pub use contraction::{contraction_check, ContractionReport};
pub use expansion::{expansion_check, ExpansionReport, ExpansionRow};
pub use scaling::{exchange_scaling, ScalingConfig, ScalingReport, ScalingRow};
pub use shell::{shell_report, ShellClass, ShellReport};

/// Least-squares slope of log|y| against log x, skipping zero entries.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && b.abs() > 0.0)
        .map(|(a, b)| (a.ln(), b.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
