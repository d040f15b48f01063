//! Closed-form results: the Helstrom endpoint, the feedback tilt, the optimal
//! instrument family and the normalized tradeoff identity.
//!
//! All functions take the half-angle `α ∈ [0, π/4]` of the symmetric pair
//! (fidelity `sin 2α`) and the control parameter `t ∈ [0, 1]`, where `t = 0`
//! is no measurement and `t = 1` is the Helstrom measurement.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::instruments::Instrument;
use crate::qubit::{check_alpha, ComplexMatrix};
use crate::{Error, Result};

/// Feedback rotation angle. `degenerate` marks the α = π/4 limit where the
/// defining ratio has a zero denominator and the angle is taken by continuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tilt {
    pub angle: f64,
    pub degenerate: bool,
}

pub(crate) fn check_t(t: f64) -> Result<f64> {
    const SLACK: f64 = 1e-14;
    if !t.is_finite() || !(-SLACK..=1.0 + SLACK).contains(&t) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            domain: "[0, 1]",
        });
    }
    Ok(t.clamp(0.0, 1.0))
}

/// `α = ½·asin(√f²)` for a squared fidelity in `[0, 1]`.
pub fn alpha_from_fidelity_squared(fsq: f64) -> Result<f64> {
    if !fsq.is_finite() || !(0.0..=1.0).contains(&fsq) {
        return Err(Error::Domain {
            name: "fidelity_squared",
            value: fsq,
            domain: "[0, 1]",
        });
    }
    Ok(0.5 * fsq.sqrt().asin())
}

/// `P_opt = cos²α`.
pub fn helstrom_probability(alpha: f64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    Ok(alpha.cos().powi(2))
}

/// Tilt minimizing the disturbance of the Helstrom measurement:
/// `tan 2β = tan 2α / cos 2α`, with `2β ∈ [0, π/2]`.
pub fn optimal_tilt(alpha: f64) -> Result<Tilt> {
    let alpha = check_alpha(alpha)?;
    let (s2, c2) = (2.0 * alpha).sin_cos();
    // tan 2α / cos 2α = sin 2α / cos² 2α; atan2 covers the α = π/4 pole.
    Ok(Tilt {
        angle: 0.5 * s2.atan2(c2 * c2),
        degenerate: alpha == FRAC_PI_4,
    })
}

/// `D(β) = 1 − cos²α·cos²(β−α) − sin²α·sin²(α+β)`.
pub fn tilt_disturbance(alpha: f64, beta: f64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    Ok(1.0
        - alpha.cos().powi(2) * (beta - alpha).cos().powi(2)
        - alpha.sin().powi(2) * (alpha + beta).sin().powi(2))
}

/// `D_opt = (4 − √(14 + 2 cos 8α))/8`.
pub fn helstrom_min_disturbance(alpha: f64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    Ok((4.0 - (14.0 + 2.0 * (8.0 * alpha).cos()).sqrt()) / 8.0)
}

/// Tilt of the optimal instrument at strength `t`:
/// `tan 2β_t = t sin 2α / (cos² 2α + γ sin² 2α)`, `γ = √(1−t²)`.
pub fn tilt_t(alpha: f64, t: f64) -> Result<Tilt> {
    let alpha = check_alpha(alpha)?;
    let t = check_t(t)?;
    let gamma = (1.0 - t * t).sqrt();
    let (s2, c2) = (2.0 * alpha).sin_cos();
    Ok(Tilt {
        angle: 0.5 * (t * s2).atan2(c2 * c2 + gamma * s2 * s2),
        degenerate: alpha == FRAC_PI_4 && t == 1.0,
    })
}

/// Feedback unitary `U(t)`: the rotation taking `|1⟩` to `(cos β_t, sin β_t)`.
pub fn feedback_unitary(alpha: f64, t: f64) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::rotation(tilt_t(alpha, t)?.angle))
}

/// The two "filter" factors `±√(1−γ)/2·σ_z + √(1+γ)/2·𝟙` shared by the
/// optimal and no-feedback instruments.
fn filters(t: f64) -> (ComplexMatrix, ComplexMatrix) {
    let gamma = (1.0 - t * t).sqrt();
    let a = (1.0 - gamma).sqrt() / 2.0;
    let b = (1.0 + gamma).sqrt() / 2.0;
    let z = ComplexMatrix::sigma_z();
    let id = ComplexMatrix::identity2().scale_real(b);
    (&id + &z.scale_real(a), &id - &z.scale_real(a))
}

/// Minimum-disturbance instrument at success probability `P_t`:
/// `E₁ = U(t)·F₊`, `E₂ = U†(t)·F₋`.
pub fn optimal_instrument(alpha: f64, t: f64) -> Result<Instrument> {
    let t = check_t(t)?;
    let u = feedback_unitary(alpha, t)?;
    let (f_plus, f_minus) = filters(t);
    Instrument::pure(&u * &f_plus, &u.adjoint() * &f_minus)
}

/// Same POVM as [`optimal_instrument`] but with the feedback rotation
/// replaced by the identity. Strictly suboptimal for `0 < t`, `0 < α < π/4`.
pub fn no_feedback_instrument(alpha: f64, t: f64) -> Result<Instrument> {
    check_alpha(alpha)?;
    let t = check_t(t)?;
    let (f_plus, f_minus) = filters(t);
    Instrument::pure(f_plus, f_minus)
}

/// Record on the optimal tradeoff curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub alpha: f64,
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub beta_t: f64,
    pub gamma: f64,
}

/// `P_t = t cos²α + (1−t)/2`.
pub fn probability_at(alpha: f64, t: f64) -> Result<f64> {
    let t = check_t(t)?;
    Ok(t * helstrom_probability(alpha)? + (1.0 - t) / 2.0)
}

/// Inverse of [`probability_at`]: `t = (2P − 1)/cos 2α`.
pub fn t_for_probability(alpha: f64, p: f64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    let c2 = (2.0 * alpha).cos();
    if alpha == FRAC_PI_4 || c2 <= 0.0 {
        return Err(Error::Degenerate(
            "identical states: every instrument has P = 1/2",
        ));
    }
    check_t((2.0 * p - 1.0) / c2)
}

/// Success probability, minimum disturbance and tilt of the optimal
/// instrument at `(α, t)`.
pub fn tradeoff_point(alpha: f64, t: f64) -> Result<TradeoffPoint> {
    let alpha = check_alpha(alpha)?;
    let t = check_t(t)?;
    let gamma = (1.0 - t * t).sqrt();
    let beta = tilt_t(alpha, t)?.angle;
    let (s2a, _) = (2.0 * alpha).sin_cos();
    let c4a = (4.0 * alpha).cos();
    let (s2b, c2b) = (2.0 * beta).sin_cos();
    let d = 0.5 * (1.0 - t * s2a * s2b) + c2b / 4.0 * (gamma * (c4a - 1.0) - c4a - 1.0);
    Ok(TradeoffPoint {
        alpha,
        t,
        p: probability_at(alpha, t)?,
        d: d.clamp(0.0, 1.0),
        beta_t: beta,
        gamma,
    })
}

/// Information and disturbance rescaled by their Helstrom-limit values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedPoint {
    pub info: f64,
    pub dist: f64,
}

fn check_interior(alpha: f64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    if alpha == 0.0 || alpha == FRAC_PI_4 {
        return Err(Error::Degenerate(
            "normalization undefined for orthogonal or identical states",
        ));
    }
    Ok(alpha)
}

/// `𝒾 = (P − ½)/(P_opt − ½)`, `𝒟 = D/D_opt`.
pub fn normalized(alpha: f64, p: f64, d: f64) -> Result<NormalizedPoint> {
    let alpha = check_interior(alpha)?;
    Ok(NormalizedPoint {
        info: (p - 0.5) / (helstrom_probability(alpha)? - 0.5),
        dist: d / helstrom_min_disturbance(alpha)?,
    })
}

/// `√(D_opt𝒟(1 − D_opt𝒟)) − (sin 4α/4)(1 − √(1 − 𝒾²))`.
///
/// Zero on the optimal curve and positive for any suboptimal instrument.
pub fn tradeoff_identity_residual(alpha: f64, info: f64, dist: f64) -> Result<f64> {
    let alpha = check_interior(alpha)?;
    const SLACK: f64 = 1e-9;
    for (name, v) in [("info", info), ("dist", dist)] {
        if !v.is_finite() || !(-SLACK..=1.0 + SLACK).contains(&v) {
            return Err(Error::Domain {
                name,
                value: v,
                domain: "[0, 1]",
            });
        }
    }
    let (info, dist) = (info.clamp(0.0, 1.0), dist.clamp(0.0, 1.0));
    let scaled = helstrom_min_disturbance(alpha)? * dist;
    let lhs = (scaled * (1.0 - scaled)).sqrt();
    let rhs = (4.0 * alpha).sin() / 4.0 * (1.0 - (1.0 - info * info).sqrt());
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::{disturbance, success_probability, Ensemble};
    use crate::qubit::{min_eigenvalue_hermitian, symmetric_pair, PureState};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_8, PI};

    // Golden-section minimum of `f` on `[lo, hi]`; independent of the closed forms.
    fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let x = 0.5 * (lo + hi);
        (x, f(x))
    }

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (1..=n).map(move |k| FRAC_PI_4 * k as f64 / (n + 1) as f64)
    }

    #[test]
    fn helstrom_probability_examples() {
        assert_eq!(helstrom_probability(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            helstrom_probability(FRAC_PI_4).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            helstrom_probability(FRAC_PI_8).unwrap(),
            0.853_553_390_593_273_7,
            epsilon = 1e-12
        );
        assert!(helstrom_probability(-1.0).is_err());
    }

    #[test]
    fn optimal_tilt_examples() {
        assert_eq!(optimal_tilt(0.0).unwrap().angle, 0.0);
        let b = optimal_tilt(FRAC_PI_8).unwrap();
        assert_abs_diff_eq!(b.angle, 0.5 * 2f64.sqrt().atan(), epsilon = 1e-12);
        assert_abs_diff_eq!(b.angle, 0.477_658_309_062_254_65, epsilon = 1e-12);
        assert!(!b.degenerate);

        let edge = optimal_tilt(FRAC_PI_4).unwrap();
        assert!(edge.degenerate);
        assert_abs_diff_eq!(edge.angle, FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn optimal_tilt_is_at_least_alpha_and_minimizes_tilt_disturbance() {
        for alpha in grid(60) {
            let beta = optimal_tilt(alpha).unwrap().angle;
            assert!(beta >= alpha - 1e-15, "β < α at α = {alpha}");
            let (b_star, d_star) =
                golden_min(|b| tilt_disturbance(alpha, b).unwrap(), 0.0, PI / 2.0);
            assert_abs_diff_eq!(beta, b_star, epsilon = 1e-6);
            assert_abs_diff_eq!(
                helstrom_min_disturbance(alpha).unwrap(),
                d_star,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn tilt_disturbance_examples() {
        assert_abs_diff_eq!(
            tilt_disturbance(FRAC_PI_8, FRAC_PI_8).unwrap(),
            0.073_223_304_703_363_16,
            epsilon = 1e-12
        );
        let b = optimal_tilt(FRAC_PI_8).unwrap().angle;
        assert_abs_diff_eq!(
            tilt_disturbance(FRAC_PI_8, b).unwrap(),
            (2.0 - 3f64.sqrt()) / 4.0,
            epsilon = 1e-12
        );
        assert_eq!(tilt_disturbance(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn helstrom_min_disturbance_examples() {
        assert_abs_diff_eq!(helstrom_min_disturbance(0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            helstrom_min_disturbance(FRAC_PI_8).unwrap(),
            (2.0 - 3f64.sqrt()) / 4.0,
            epsilon = 1e-15
        );
        let step = 1e-4;
        let n = (FRAC_PI_4 / step) as usize;
        let best = (0..=n)
            .map(|k| k as f64 * step)
            .max_by(|a, b| {
                helstrom_min_disturbance(*a)
                    .unwrap()
                    .total_cmp(&helstrom_min_disturbance(*b).unwrap())
            })
            .unwrap();
        assert!((best - FRAC_PI_8).abs() <= step);
    }

    #[test]
    fn tilt_t_examples() {
        assert_eq!(tilt_t(FRAC_PI_8, 0.0).unwrap().angle, 0.0);
        for alpha in grid(40) {
            assert_abs_diff_eq!(
                tilt_t(alpha, 1.0).unwrap().angle,
                optimal_tilt(alpha).unwrap().angle,
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(
            tilt_t(FRAC_PI_8, 0.5).unwrap().angle,
            0.181_109_072_605_829_04,
            epsilon = 1e-12
        );
        let edge = tilt_t(FRAC_PI_4, 1.0).unwrap();
        assert!(edge.degenerate);
        assert_abs_diff_eq!(edge.angle, FRAC_PI_4, epsilon = 1e-15);
        assert!(!tilt_t(FRAC_PI_4, 0.9).unwrap().degenerate);
        assert!(tilt_t(FRAC_PI_8, 1.5).is_err());
    }

    #[test]
    fn optimal_instrument_endpoints() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let inst = optimal_instrument(FRAC_PI_8, 0.0).unwrap();
        for ks in inst.outcomes() {
            assert!(ks[0].max_abs_diff(&ComplexMatrix::identity2().scale_real(h)) < 1e-15);
        }

        // t = 1: E_j = |ψ̃_j⟩⟨j| with ψ̃ tilted by the optimal β.
        for alpha in grid(20) {
            let beta = optimal_tilt(alpha).unwrap().angle;
            let inst = optimal_instrument(alpha, 1.0).unwrap();
            let tilde = [
                PureState::real(beta.cos(), beta.sin()).unwrap(),
                PureState::real(beta.sin(), beta.cos()).unwrap(),
            ];
            let expect = Instrument::measure_and_prepare(tilde);
            for (a, b) in inst.outcomes().iter().zip(expect.outcomes()) {
                assert!(a[0].max_abs_diff(&b[0]) < 1e-12);
                assert_abs_diff_eq!(
                    min_eigenvalue_hermitian(&a[0].adjoint().sandwich(&ComplexMatrix::identity2()))
                        .unwrap(),
                    0.0,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn optimal_instrument_povm_is_convex_mixture() {
        for ai in 0..20 {
            let alpha = FRAC_PI_4 * ai as f64 / 19.0;
            for ti in 0..20 {
                let t = ti as f64 / 19.0;
                let povm = optimal_instrument(alpha, t).unwrap().povm();
                for (i, pi) in povm.iter().enumerate() {
                    let want = &ComplexMatrix::unit2(i, i).scale_real(t)
                        + &ComplexMatrix::identity2().scale_real((1.0 - t) / 2.0);
                    assert!(pi.max_abs_diff(&want) <= 1e-12);
                }
            }
        }
        let povm = optimal_instrument(FRAC_PI_8, 0.5).unwrap().povm();
        assert!(
            povm[0].max_abs_diff(&ComplexMatrix::from_real(&[0.75, 0.0, 0.0, 0.25]).unwrap())
                < 1e-12
        );
    }

    #[test]
    fn tradeoff_point_examples() {
        let p0 = tradeoff_point(FRAC_PI_8, 0.0).unwrap();
        assert_eq!((p0.p, p0.d), (0.5, 0.0));

        let p1 = tradeoff_point(FRAC_PI_8, 1.0).unwrap();
        assert_abs_diff_eq!(p1.p, 0.853_553_390_593_273_7, epsilon = 1e-12);
        assert_abs_diff_eq!(p1.d, 0.066_987_298_107_780_68, epsilon = 1e-12);

        let ph = tradeoff_point(FRAC_PI_8, 0.5).unwrap();
        assert_abs_diff_eq!(ph.p, 0.676_776_695_296_636_8, epsilon = 1e-12);
        assert_abs_diff_eq!(ph.d, 0.001_123_085_848_768_856_6, epsilon = 1e-12);
        assert_abs_diff_eq!(ph.gamma, 0.75f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn kraus_level_functionals_reproduce_closed_form() {
        for ai in 1..=20 {
            let alpha = FRAC_PI_4 * ai as f64 / 21.0;
            let ens = Ensemble::equiprobable(&symmetric_pair(alpha).unwrap());
            for ti in 0..20 {
                let t = ti as f64 / 19.0;
                let pt = tradeoff_point(alpha, t).unwrap();
                let inst = optimal_instrument(alpha, t).unwrap();
                assert_abs_diff_eq!(
                    success_probability(&inst, &ens).unwrap(),
                    pt.p,
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(disturbance(&inst, &ens).unwrap(), pt.d, epsilon = 1e-10);
                assert!(pt.d <= helstrom_min_disturbance(alpha).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn disturbance_is_monotone_in_t() {
        for alpha in grid(12) {
            let mut prev = 0.0;
            for k in 0..=1000 {
                let d = tradeoff_point(alpha, k as f64 * 1e-3).unwrap().d;
                assert!(
                    d >= prev - 1e-15,
                    "not monotone at α = {alpha}, t = {}",
                    k as f64 * 1e-3
                );
                prev = d;
            }
        }
    }

    #[test]
    fn normalized_examples() {
        let pt = tradeoff_point(FRAC_PI_8, 0.37).unwrap();
        let n = normalized(FRAC_PI_8, pt.p, pt.d).unwrap();
        assert_abs_diff_eq!(n.info, 0.37, epsilon = 1e-12);

        let pt = tradeoff_point(0.2, 1.0).unwrap();
        let n = normalized(0.2, pt.p, pt.d).unwrap();
        assert_abs_diff_eq!(n.info, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(n.dist, 1.0, epsilon = 1e-12);

        let n = normalized(0.2, 0.5, 0.0).unwrap();
        assert_eq!((n.info, n.dist), (0.0, 0.0));

        assert!(matches!(
            normalized(0.0, 0.7, 0.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            normalized(FRAC_PI_4, 0.5, 0.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn identity_residual_on_and_off_the_curve() {
        for alpha in grid(30) {
            for k in 0..=30 {
                let t = k as f64 / 30.0;
                let pt = tradeoff_point(alpha, t).unwrap();
                let n = normalized(alpha, pt.p, pt.d).unwrap();
                let r = tradeoff_identity_residual(alpha, n.info, n.dist).unwrap();
                assert!(r.abs() <= 1e-9, "residual {r} at α = {alpha}, t = {t}");
            }
        }
        assert_eq!(tradeoff_identity_residual(0.3, 0.0, 0.0).unwrap(), 0.0);

        // No feedback rotation: same POVM, larger disturbance.
        let alpha = FRAC_PI_8;
        let ens = Ensemble::equiprobable(&symmetric_pair(alpha).unwrap());
        let witness = no_feedback_instrument(alpha, 0.5).unwrap();
        let p = success_probability(&witness, &ens).unwrap();
        let d = disturbance(&witness, &ens).unwrap();
        let n = normalized(alpha, p, d).unwrap();
        assert_abs_diff_eq!(n.info, 0.5, epsilon = 1e-12);
        assert!(tradeoff_identity_residual(alpha, n.info, n.dist).unwrap() > 1e-6);

        assert!(tradeoff_identity_residual(0.3, 1.5, 0.0).is_err());
        assert!(tradeoff_identity_residual(0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn probability_inversion() {
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let p = probability_at(0.3, t).unwrap();
            assert_abs_diff_eq!(t_for_probability(0.3, p).unwrap(), t, epsilon = 1e-12);
        }
        assert!(t_for_probability(FRAC_PI_4, 0.5).is_err());
    }

    #[test]
    fn fidelity_squared_conversion() {
        assert_eq!(alpha_from_fidelity_squared(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            alpha_from_fidelity_squared(0.5).unwrap(),
            FRAC_PI_8,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            alpha_from_fidelity_squared(1.0).unwrap(),
            FRAC_PI_4,
            epsilon = 1e-15
        );
        assert!(alpha_from_fidelity_squared(1.2).is_err());
    }
}
