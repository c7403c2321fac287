//! The Freeman-Tukey double arcsine transform and its inverse.
//!
//! For a proportion `p = x/n` the forward map is
//!
//! ```text
//! θ(p) = ½ [ asin √(p / (1 + 1/n)) + asin √((p + 1/n) / (1 + 1/n)) ]
//! ```
//!
//! which is strictly increasing on `[0, 1]` with image
//! `[θ(0), θ(1)] = [½ asin √(1/(n+1)), π/4 + ½ asin √(n/(n+1))]`.
//! As `n → ∞` it tends to the simple arcsine transform `asin √p`.
//!
//! The closed-form inverse
//!
//! ```text
//! p(θ) = ½ [ 1 − sgn(cos 2θ) √(1 − (sin 2θ + (sin 2θ − 1/sin 2θ)/n)²) ]
//! ```
//!
//! stays real slightly outside `[θ(0), θ(1)]`, where it no longer inverts
//! anything. [`ft_inverse_raw`] evaluates it wherever it is real;
//! [`ft_inverse_clamped`] pins the result to 0 and 1 outside the image.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::types::{AccuracyLevel, DomainInterval, EffectiveSampleSize, StudyRecord, Theta};

/// Radicands in `[-RADICAND_TOLERANCE, 0)` are treated as zero.
pub const RADICAND_TOLERANCE: f64 = 1e-12;

fn check_proportion(p: f64) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "proportion must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

fn check_size(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::domain(format!(
            "sample size must be positive and finite, got {n}"
        )));
    }
    Ok(())
}

/// Forward double arcsine transform of proportion `p` at sample size `n`.
pub fn ft_transform(p: f64, n: f64) -> Result<Theta> {
    check_proportion(p)?;
    check_size(n)?;
    let inv_n = 1.0 / n;
    // asin √(a / (a + b)) = atan2(√a, √b), with a + b = 1 + 1/n in both
    // terms. The atan2 form keeps full accuracy where the asin argument
    // approaches 1.
    let q = 1.0 - p;
    let lo = p.sqrt().atan2((q + inv_n).sqrt());
    let hi = (p + inv_n).sqrt().atan2(q.sqrt());
    Theta::new(0.5 * (lo + hi))
}

/// Transform of the observed proportion of a study, at the study's own size.
pub fn ft_transform_counts(record: &StudyRecord) -> Result<Theta> {
    if record.size < 1 || record.events > record.size {
        return Err(Error::domain(format!(
            "invalid study {}: {} events out of {}",
            record.study_id, record.events, record.size
        )));
    }
    ft_transform(record.proportion(), record.size as f64)
}

/// Simple arcsine transform `asin √p`, the large-sample limit.
pub fn asin_sqrt_limit(p: f64) -> Result<Theta> {
    check_proportion(p)?;
    Theta::new(p.sqrt().asin())
}

/// The image `[θ(0), θ(1)]` of [`ft_transform`] at sample size `n`.
///
/// Both endpoints go through [`ft_transform`] itself so that they agree with
/// the forward map bit for bit.
pub fn theta_domain(n: f64) -> Result<DomainInterval> {
    check_size(n)?;
    Ok(DomainInterval {
        lower: ft_transform(0.0, n)?.radians(),
        upper: ft_transform(1.0, n)?.radians(),
    })
}

/// Harmonic mean `k / Σ 1/nᵢ` of the study sizes.
pub fn harmonic_n(sizes: &[f64]) -> Result<EffectiveSampleSize> {
    if sizes.is_empty() {
        return Err(Error::domain("harmonic mean of an empty list"));
    }
    let mut reciprocal_sum = 0.0;
    for &n in sizes {
        check_size(n)?;
        reciprocal_sum += 1.0 / n;
    }
    let value = sizes.len() as f64 / reciprocal_sum;
    // Equal sizes must give back exactly that size.
    if sizes.iter().all(|&n| n == sizes[0]) {
        return EffectiveSampleSize::new(sizes[0]);
    }
    EffectiveSampleSize::new(value)
}

fn sign_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Radicand `1 − g²` of the closed-form inverse, `g = s + (s − 1/s)/n`,
/// `s = sin 2θ`. Fails only when `s = 0`.
pub fn inverse_radicand(theta: Theta, n_eff: EffectiveSampleSize) -> Result<f64> {
    let t = theta.radians();
    let s = (2.0 * t).sin();
    if t == 0.0 || t == FRAC_PI_2 || s == 0.0 {
        return Err(Error::Singularity { theta: t });
    }
    let g = s + (s - 1.0 / s) / n_eff.value();
    Ok(1.0 - g * g)
}

/// Closed-form inverse, evaluated wherever it is real, including outside
/// [`theta_domain`]. No clamping is applied beyond the radicand tolerance.
pub fn ft_inverse_raw(theta: Theta, n_eff: EffectiveSampleSize) -> Result<f64> {
    let radicand = inverse_radicand(theta, n_eff)?;
    if radicand < -RADICAND_TOLERANCE {
        return Err(Error::UndefinedInverse {
            theta: theta.radians(),
            n: n_eff.value(),
            radicand,
        });
    }
    let sgn = sign_or_zero((2.0 * theta.radians()).cos());
    Ok(0.5 * (1.0 - sgn * radicand.max(0.0).sqrt()))
}

/// Inverse restricted to the image of the forward map: 0 at or below
/// `θ(0)`, 1 at or above `θ(1)`, the closed form in between.
pub fn ft_inverse_clamped(theta: Theta, n_eff: EffectiveSampleSize) -> Result<f64> {
    let domain = theta_domain(n_eff.value())?;
    let t = theta.radians();
    if t <= domain.lower {
        return Ok(0.0);
    }
    if t >= domain.upper {
        return Ok(1.0);
    }
    Ok(ft_inverse_raw(theta, n_eff)?.clamp(0.0, 1.0))
}

/// Inverse of the simple arcsine transform, `sin² θ`.
pub fn limit_inverse(theta: Theta) -> f64 {
    let s = theta.radians().sin();
    (s * s).min(1.0)
}

/// Maximum percent error of the large-sample approximation, taken at `p = 1`:
/// `½ − asin(√(n/(n+1))) / π`.
pub fn mpe(n: f64) -> Result<f64> {
    check_size(n)?;
    Ok(0.5 - (n / (n + 1.0)).sqrt().asin() / PI)
}

/// Relative gap `|asin √p − θ(p)| / asin √p` at one proportion.
pub fn mpe_pointwise(p: f64, n: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!(
            "proportion must lie in (0, 1], got {p}"
        )));
    }
    check_size(n)?;
    let limit = asin_sqrt_limit(p)?.radians();
    let theta = ft_transform(p, n)?.radians();
    Ok((limit - theta).abs() / limit)
}

/// Sample size meeting an accuracy target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSize {
    /// Smallest integer size with `mpe(n) ≤ ε`.
    pub n: u64,
    /// `tan²(π(½ − ε))` before rounding.
    pub n_real: f64,
}

/// Sample size `tan²(π(½ − ε))`, rounded up.
pub fn sample_size_for_mpe(eps: AccuracyLevel) -> SampleSize {
    let n_real = (PI * (0.5 - eps.epsilon())).tan().powi(2);
    // An exact integer may come back one ulp high; don't round that up.
    let nearest = n_real.round();
    let n = if (n_real - nearest).abs() <= 1e-12 * nearest.max(1.0) {
        nearest
    } else {
        n_real.ceil()
    };
    SampleSize {
        n: n.max(1.0) as u64,
        n_real,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn theta(t: f64) -> Theta {
        Theta::new(t).unwrap()
    }

    fn size(n: f64) -> EffectiveSampleSize {
        EffectiveSampleSize::new(n).unwrap()
    }

    #[test]
    fn forward_examples() {
        assert!((ft_transform(0.5, 7.0).unwrap().radians() - FRAC_PI_4).abs() < 1e-15);
        assert!((ft_transform(0.0, 1.0).unwrap().radians() - PI / 8.0).abs() < 1e-15);
        assert!((ft_transform(1.0, 1.0).unwrap().radians() - 3.0 * PI / 8.0).abs() < 1e-15);
        // mpmath, 40 digits
        let t = ft_transform(0.25, 100.0).unwrap().radians();
        assert!((t - 0.526_433_760_482_512_2).abs() < 1e-14);
    }

    #[test]
    fn forward_rejects_bad_input() {
        for (p, n) in [
            (-0.1, 5.0),
            (1.1, 5.0),
            (0.5, 0.0),
            (0.5, -1.0),
            (f64::NAN, 5.0),
            (0.5, f64::INFINITY),
        ] {
            assert!(
                matches!(ft_transform(p, n), Err(Error::Domain(_))),
                "{p} {n}"
            );
        }
    }

    #[test]
    fn counts_wrapper() {
        let r = StudyRecord::new("a", 1, 2).unwrap();
        assert!((ft_transform_counts(&r).unwrap().radians() - FRAC_PI_4).abs() < 1e-15);
        let r = StudyRecord::new("a", 0, 1).unwrap();
        assert!((ft_transform_counts(&r).unwrap().radians() - PI / 8.0).abs() < 1e-15);
        let r = StudyRecord::new("a", 3, 10).unwrap();
        assert_eq!(
            ft_transform_counts(&r).unwrap(),
            ft_transform(0.3, 10.0).unwrap()
        );
        let bad = StudyRecord {
            study_id: "b".into(),
            events: 5,
            size: 2,
        };
        assert!(ft_transform_counts(&bad).is_err());
    }

    #[test]
    fn simple_arcsine() {
        assert_eq!(asin_sqrt_limit(0.0).unwrap().radians(), 0.0);
        assert_eq!(asin_sqrt_limit(1.0).unwrap().radians(), FRAC_PI_2);
        assert!((asin_sqrt_limit(0.5).unwrap().radians() - FRAC_PI_4).abs() < 1e-15);
        assert!(asin_sqrt_limit(1.5).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn domain_examples() {
        let d = theta_domain(1.0).unwrap();
        assert!((d.lower - 0.3927).abs() < 5e-5);
        assert!((d.upper - 1.1781).abs() < 5e-5);

        let d = theta_domain(1e12).unwrap();
        assert!(d.lower.abs() < 1e-5);
        assert!((d.upper - FRAC_PI_2).abs() < 1e-5);

        // mpmath: 0.0498343262455810, 1.5209620005493156
        let d = theta_domain(100.0).unwrap();
        assert!((d.lower - 0.049_834).abs() < 5e-7);
        assert!((d.upper - 1.520_962).abs() < 5e-7);

        assert!(theta_domain(0.0).is_err());
    }

    #[test]
    fn domain_matches_closed_form_endpoints() {
        for n in [0.3, 1.0, 2.0, 7.5, 100.0, 1e6] {
            let d = theta_domain(n).unwrap();
            let lower = 0.5 * (1.0 / (n + 1.0)).sqrt().asin();
            let upper = FRAC_PI_4 + 0.5 * (n / (n + 1.0)).sqrt().asin();
            // asin near 1 loses digits in the reference, hence 1e-12.
            assert!((d.lower - lower).abs() < 1e-14);
            assert!((d.upper - upper).abs() < 1e-12);
            assert!(0.0 < d.lower && d.lower < FRAC_PI_4);
            assert!(FRAC_PI_4 < d.upper && d.upper < FRAC_PI_2);
        }
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic_n(&[10.0, 10.0, 10.0]).unwrap().value(), 10.0);
        assert!((harmonic_n(&[2.0, 6.0]).unwrap().value() - 3.0).abs() < 1e-15);
        assert_eq!(harmonic_n(&[5.0]).unwrap().value(), 5.0);
        assert!(harmonic_n(&[]).is_err());
        assert!(harmonic_n(&[3.0, 0.0]).is_err());
        assert!(harmonic_n(&[3.0, -2.0]).is_err());
    }

    #[test]
    fn raw_inverse_examples() {
        for n in [0.5, 1.0, 4.0, 1e6] {
            assert_eq!(ft_inverse_raw(theta(FRAC_PI_4), size(n)).unwrap(), 0.5);
        }
        let t = ft_transform(0.25, 4.0).unwrap();
        assert!((ft_inverse_raw(t, size(4.0)).unwrap() - 0.25).abs() < 1e-10);

        match ft_inverse_raw(theta(0.01), size(10.0)) {
            Err(Error::UndefinedInverse { radicand, .. }) => {
                // mpmath: -23.78381753548704
                assert!((radicand + 23.783_817_535_487).abs() < 1e-9);
            }
            other => panic!("expected UndefinedInverse, got {other:?}"),
        }

        // Outside the image for n = 1, yet real and below 1 (mpmath 0.7085546807107288).
        let p = ft_inverse_raw(theta(1.3), size(1.0)).unwrap();
        assert!((p - 0.708_554_680_710_728_8).abs() < 1e-12);
    }

    #[test]
    fn raw_inverse_singularities() {
        assert!(matches!(
            ft_inverse_raw(theta(0.0), size(3.0)),
            Err(Error::Singularity { .. })
        ));
        assert!(matches!(
            ft_inverse_raw(theta(FRAC_PI_2), size(3.0)),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn clamped_inverse_examples() {
        assert_eq!(ft_inverse_clamped(theta(0.2), size(1.0)).unwrap(), 0.0);
        assert_eq!(ft_inverse_clamped(theta(1.3), size(1.0)).unwrap(), 1.0);
        assert_eq!(
            ft_inverse_clamped(theta(FRAC_PI_4), size(50.0)).unwrap(),
            0.5
        );
        assert_eq!(ft_inverse_clamped(theta(0.0), size(50.0)).unwrap(), 0.0);
        assert_eq!(
            ft_inverse_clamped(theta(FRAC_PI_2), size(50.0)).unwrap(),
            1.0
        );
    }

    #[test]
    fn clamped_inverse_at_exact_endpoints() {
        for n in [1.0, 3.0, 17.0, 250.0] {
            let d = theta_domain(n).unwrap();
            assert_eq!(ft_inverse_clamped(theta(d.lower), size(n)).unwrap(), 0.0);
            assert_eq!(ft_inverse_clamped(theta(d.upper), size(n)).unwrap(), 1.0);
        }
    }

    #[test]
    fn limit_inverse_examples() {
        assert_eq!(limit_inverse(theta(0.0)), 0.0);
        assert_eq!(limit_inverse(theta(FRAC_PI_2)), 1.0);
        assert!((limit_inverse(theta(FRAC_PI_4)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mpe_examples() {
        // mpmath: 0.022470506863257047, 0.014225772073055081
        assert!((mpe(200.0).unwrap() - 0.022_470_506_863_257_05).abs() < 1e-15);
        assert!((mpe(500.0).unwrap() - 0.014_225_772_073_055_08).abs() < 1e-15);
        assert!((mpe(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(mpe(0.0).is_err());
    }

    #[test]
    fn pointwise_mpe() {
        assert!((mpe_pointwise(1.0, 200.0).unwrap() - mpe(200.0).unwrap()).abs() < 1e-15);
        for n in [1.0, 10.0, 1e4] {
            assert!(mpe_pointwise(0.5, n).unwrap() < 1e-15);
        }
        // mpmath: 0.04134633240172035
        assert!((mpe_pointwise(0.9, 10.0).unwrap() - 0.041_346_332_401_720_35).abs() < 1e-14);
        assert!(mpe_pointwise(0.0, 10.0).is_err());
        assert!(mpe_pointwise(1.01, 10.0).is_err());
        assert!(mpe_pointwise(0.5, 0.0).is_err());
    }

    #[test]
    fn sample_size_examples() {
        let at = |e| sample_size_for_mpe(AccuracyLevel::new(e).unwrap());
        let s = at(0.01);
        assert_eq!(s.n, 1013);
        assert!((s.n_real - 1_012.545_235_564_383).abs() < 1e-8);
        let s = at(0.05);
        assert_eq!(s.n, 40);
        assert!((s.n_real - 39.863_458_189_061_4).abs() < 1e-10);
        assert_eq!(at(0.25).n, 1);
    }

    #[test]
    fn sample_size_meets_target() {
        for e in [0.001, 0.003, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.45] {
            let s = sample_size_for_mpe(AccuracyLevel::new(e).unwrap());
            assert!(mpe(s.n as f64).unwrap() <= e + 1e-15, "eps {e}");
            if s.n > 1 {
                assert!(mpe((s.n - 1) as f64).unwrap() > e, "eps {e}");
            }
        }
    }
}
