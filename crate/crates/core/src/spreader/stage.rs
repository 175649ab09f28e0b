use std::f64::consts::{FRAC_PI_2, PI};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geom::{op_norm, primitive_completion, Mat2Z, Vec2Q, Vec2R};

/// One conjugated shear block `A J_{η,ξ} A⁻¹` stretching along `v`, with
/// `A(0, η) = v/2` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct StageData {
    pub index: usize,
    pub a: Mat2Z,
    /// Exact shear amount.
    pub eta_exact: BigRational,
    pub eta: f64,
    pub v: Vec2Q,
}

/// Writes `v/2 = η·w` with `w` primitive in the upper half-plane and completes
/// `w` to `A ∈ SL(2,Z)` with second column `w`.
pub fn derive_stage(index: usize, v: &Vec2Q) -> Result<StageData> {
    if v.is_zero() {
        return Err(Error::invalid("v", "zero generator"));
    }
    let half = v.scale(&BigRational::new(1.into(), 2.into()));
    let (w1, w2, eta_exact) = half.primitive_direction()?;
    let to_i64 = |x: &num_bigint::BigInt| x.to_i64().ok_or(Error::Overflow("stage direction"));
    let a = primitive_completion(to_i64(&w1)?, to_i64(&w2)?)?;
    let check = a.apply_exact(&Vec2Q::new(BigRational::zero(), eta_exact.clone()));
    if check != half {
        return Err(Error::Degenerate(format!("stage {index}: A(0, η) ≠ v/2")));
    }
    let eta = eta_exact
        .to_f64()
        .filter(|e| e.is_finite() && *e != 0.0)
        .ok_or(Error::Overflow("shear amount"))?;
    Ok(StageData {
        index,
        a,
        eta_exact,
        eta,
        v: v.clone(),
    })
}

/// `|dy/dx|` of a direction (infinite when vertical).
fn abs_slope(u: Vec2R) -> f64 {
    (u.y / u.x).abs()
}

fn check_angle(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must lie in (0, π/2), got {x}"),
        ))
    }
}

/// Slope bounds for transporting segment families through `A`, where `v = A(0,1)`.
///
/// * `M` bounds `|slope(A⁻¹u)|` over all directions `u` at least `δ` away
///   from `±v`. Since `A⁻¹` acts monotonically on directions and sends `v` to
///   the vertical, the maximum sits at one of the two arc endpoints `θ_v ± δ`.
/// * `m` is the least slope such that every direction with `|slope| ≥ m` is
///   sent by `A` within `δ′` of `±v`, located by bisection.
pub fn slope_bounds(a: &Mat2Z, delta: f64, delta_prime: f64) -> Result<(f64, f64)> {
    check_angle("delta", delta)?;
    check_angle("delta_prime", delta_prime)?;
    let (b, d) = a.second_column();
    let v = Vec2R::new(b as f64, d as f64);
    let theta_v = v.angle();
    let ainv = a.inverse();

    let big_m = [theta_v + delta, theta_v - delta]
        .iter()
        .map(|&t| abs_slope(ainv.apply(Vec2R::from_angle(t))))
        .fold(0.0, f64::max);

    // Directions with |slope| ≥ s form the arc [atan s, π - atan s]. A has
    // det +1, so it maps this arc monotonically onto an arc through v, with the
    // image of atan s clockwise of v and the image of π - atan s counterclockwise.
    // Signed offsets catch images that wrapped past ±π/2.
    let offset = |ang: f64| -> f64 {
        let w = a.apply(Vec2R::from_angle(ang));
        let mut g = v.cross(w).atan2(v.dot(w));
        if g > FRAC_PI_2 {
            g -= PI;
        } else if g <= -FRAC_PI_2 {
            g += PI;
        }
        g
    };
    let close_enough = |s: f64| -> bool {
        let t = s.atan();
        let (lo, hi) = (offset(t), offset(PI - t));
        (-delta_prime..=0.0).contains(&lo) && (0.0..=delta_prime).contains(&hi)
    };
    let mut hi = 1.0;
    while !close_enough(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Degenerate("slope bound m did not converge".into()));
        }
    }
    let mut lo = 0.0;
    if close_enough(lo) {
        hi = 0.0;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if close_enough(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((big_m, hi))
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be positive and finite, got {x}"),
        ))
    }
}

/// Shear period bound for spreading a segment family vertically:
/// `⌈1/δ + (M+m)/(2|η|)⌉` with `δ = min{ℓ, ε′}·cos(arctan M)`.
pub fn xi0_spread_shape(eta_abs: f64, eps_prime: f64, ell: f64, m: f64, big_m: f64) -> Result<u64> {
    check_positive("eta_abs", eta_abs)?;
    check_positive("eps_prime", eps_prime)?;
    check_positive("ell", ell)?;
    check_positive("m", m)?;
    check_positive("M", big_m)?;
    let delta = ell.min(eps_prime) * big_m.atan().cos();
    let value = (1.0 / delta + (big_m + m) / (2.0 * eta_abs)).ceil();
    if !(value <= 1e15) {
        return Err(Error::Overflow("shear period bound"));
    }
    Ok((value as u64).max(1))
}

/// The period bound for a conjugated shear `A J_{η,ξ} A⁻¹`: the segment
/// family is pulled back by `A⁻¹`, which shrinks lengths and density budgets
/// by at most `‖A‖`, and the slopes are bounded by [`slope_bounds`].
pub fn xi0_corollary(
    eta_abs: f64,
    a: &Mat2Z,
    ell: f64,
    eps_prime: f64,
    delta: f64,
    delta_prime: f64,
) -> Result<u64> {
    check_positive("ell", ell)?;
    check_positive("eps_prime", eps_prime)?;
    let norm = op_norm(&a.to_real());
    let (big_m, m) = slope_bounds(a, delta, delta_prime)?;
    // A direction set that already lies inside the δ′ cone needs no slope at
    // all; any positive m is then admissible.
    let m = m.max(f64::MIN_POSITIVE);
    let big_m = big_m.max(f64::MIN_POSITIVE);
    xi0_spread_shape(eta_abs, eps_prime / norm, ell / norm, m, big_m)
}
