//! Brute-force checks for the closed-form inverse and the error analysis.
//!
//! Nothing here uses the closed-form inverse; it only evaluates the forward
//! transform, so it can serve as an independent reference.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transform::{ft_transform, mpe_pointwise, theta_domain};
use crate::types::Theta;

pub const MAX_BISECTION_ITERATIONS: usize = 60;
pub const BISECTION_RESIDUAL: f64 = 1e-13;

/// Solves `ft_transform(p, n) = θ` for `p` by bisection.
///
/// The search runs over the angle `φ = asin √p ∈ [0, π/2]` rather than over
/// `p` directly. The forward map has unbounded slope in `p` at both ends of
/// `[0, 1]` but bounded slope in `φ`, so a fixed number of halvings bounds
/// the residual on the whole domain.
pub fn bisect_inverse(theta: Theta, n: f64) -> Result<f64> {
    let domain = theta_domain(n)?;
    let target = theta.radians();
    if !domain.contains(target) {
        return Err(Error::domain(format!(
            "theta {target} outside [{}, {}] for n = {n}",
            domain.lower, domain.upper
        )));
    }

    let to_p = |phi: f64| {
        let s = phi.sin();
        (s * s).min(1.0)
    };
    let residual = |phi: f64| -> Result<f64> { Ok(ft_transform(to_p(phi), n)?.radians() - target) };

    let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
    let mut best = (lo, residual(lo)?.abs());
    let r_hi = residual(hi)?.abs();
    if r_hi < best.1 {
        best = (hi, r_hi);
    }
    for _ in 0..MAX_BISECTION_ITERATIONS {
        if best.1 == 0.0 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = residual(mid)?;
        if r.abs() < best.1 {
            best = (mid, r.abs());
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(to_p(best.0))
}

/// Pointwise percent error on a uniform proportion grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScanResult {
    /// `(p, mpe_pointwise(p, n))` pairs in increasing `p`.
    pub grid_points: Vec<(f64, f64)>,
    pub argmax_p: f64,
    pub max_value: f64,
}

/// Evaluates [`mpe_pointwise`] at `points` equally spaced proportions from
/// `p_min` to 1 inclusive. Ties for the maximum go to the smaller `p`.
pub fn mpe_grid_scan(n: f64, p_min: f64, points: usize) -> Result<GridScanResult> {
    if !(p_min.is_finite() && p_min > 0.0 && p_min < 1.0) {
        return Err(Error::domain(format!(
            "p_min must lie in (0, 1), got {p_min}"
        )));
    }
    if points < 2 {
        return Err(Error::domain(format!(
            "need at least 2 grid points, got {points}"
        )));
    }
    let step = (1.0 - p_min) / (points - 1) as f64;
    let grid_points = (0..points)
        .map(|i| {
            let p = if i == points - 1 {
                1.0
            } else {
                p_min + step * i as f64
            };
            Ok((p, mpe_pointwise(p, n)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let (argmax_p, max_value) =
        grid_points
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, (p, v)| {
                if v > best.1 {
                    (p, v)
                } else {
                    best
                }
            });
    Ok(GridScanResult {
        grid_points,
        argmax_p,
        max_value,
    })
}
