use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{Mat2, Mat2Z, Vec2R};

/// Largest `|x|` accepted by [`phi`]; beyond it `2ξx` loses the fractional
/// precision that breakpoint placement relies on.
pub const PHI_MAX_ARGUMENT: f64 = (1u64 << 40) as f64;

/// Splits `2ξx` into its integer part `z` and fraction in `[0, 1)`.
#[inline]
fn half_period_split(xi: u32, x: f64) -> (f64, f64) {
    let two_xi = 2.0 * xi as f64;
    let mut z = (two_xi * x).floor();
    let mut f = two_xi.mul_add(x, -z);
    if f < 0.0 {
        z -= 1.0;
        f += 1.0;
    } else if f >= 1.0 {
        z += 1.0;
        f -= 1.0;
    }
    (z, f)
}

/// Triangle wave of period `1/ξ` with values in `[-1, 1]`:
/// `φ_ξ(x) = (-1)^(z+1)·(4ξx - 2z - 1)` on `[z/(2ξ), (z+1)/(2ξ))`.
///
/// Returns NaN when `|x|` exceeds [`PHI_MAX_ARGUMENT`] or `x` is not finite;
/// see [`phi_checked`] for an erroring variant.
#[inline]
pub fn phi(xi: u32, x: f64) -> f64 {
    if !(x.abs() <= PHI_MAX_ARGUMENT) || xi == 0 {
        return f64::NAN;
    }
    let (z, f) = half_period_split(xi, x);
    if z.rem_euclid(2.0) == 0.0 {
        1.0 - 2.0 * f
    } else {
        2.0 * f - 1.0
    }
}

pub fn phi_checked(xi: u32, x: f64) -> Result<f64> {
    if xi == 0 {
        return Err(Error::invalid("xi", "must be at least 1"));
    }
    if !(x.abs() <= PHI_MAX_ARGUMENT) {
        return Err(Error::invalid(
            "x",
            format!("|x| must not exceed 2^40, got {x}"),
        ));
    }
    Ok(phi(xi, x))
}

/// Derivative of `φ_ξ` on the piece containing `x` (right derivative at breakpoints).
#[inline]
pub fn phi_slope(xi: u32, x: f64) -> f64 {
    let (z, _) = half_period_split(xi, x);
    let s = 4.0 * xi as f64;
    if z.rem_euclid(2.0) == 0.0 {
        -s
    } else {
        s
    }
}

/// A plane homeomorphism commuting with integer translations (up to the
/// linear part for `Linear`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    Translation(Vec2R),
    Linear(Mat2Z),
    /// `(x, y) ↦ (x, y + η·φ_ξ(x))`.
    Shear {
        eta: f64,
        xi: u32,
    },
}

impl Generator {
    pub fn translation(theta: Vec2R) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "non-finite translation"));
        }
        Ok(Generator::Translation(theta))
    }

    pub fn shear(eta: f64, xi: u32) -> Result<Self> {
        if !(eta != 0.0 && eta.is_finite()) {
            return Err(Error::invalid(
                "eta",
                format!("must be finite and nonzero, got {eta}"),
            ));
        }
        if xi == 0 {
            return Err(Error::invalid("xi", "must be at least 1"));
        }
        Ok(Generator::Shear { eta, xi })
    }

    #[inline]
    pub fn apply(&self, p: Vec2R) -> Vec2R {
        match *self {
            Generator::Translation(t) => p + t,
            Generator::Linear(a) => a.apply(p),
            Generator::Shear { eta, xi } => Vec2R::new(p.x, p.y + eta * phi(xi, p.x)),
        }
    }

    pub fn inverse(&self) -> Generator {
        match *self {
            Generator::Translation(t) => Generator::Translation(-t),
            Generator::Linear(a) => Generator::Linear(a.inverse()),
            Generator::Shear { eta, xi } => Generator::Shear { eta: -eta, xi },
        }
    }

    /// Jacobian at `p` (one-sided at shear breakpoints).
    pub fn jacobian(&self, p: Vec2R) -> Mat2 {
        match *self {
            Generator::Translation(_) => Mat2::IDENTITY,
            Generator::Linear(a) => a.to_real(),
            Generator::Shear { eta, xi } => Mat2::new(1.0, 0.0, eta * phi_slope(xi, p.x), 1.0),
        }
    }

    /// Linear part of the induced torus map's action on `Z²`.
    pub fn linear_part(&self) -> Mat2Z {
        match *self {
            Generator::Linear(a) => a,
            _ => Mat2Z::IDENTITY,
        }
    }

    pub(crate) fn is_trivial(&self) -> bool {
        match *self {
            Generator::Translation(t) => t == Vec2R::ZERO,
            Generator::Linear(a) => a.is_identity(),
            Generator::Shear { eta, .. } => eta == 0.0,
        }
    }

    /// Merges `self ∘ next` into one generator when both have the same kind
    /// (and the same period for shears).
    pub(crate) fn merge(&self, next: &Generator) -> Option<Generator> {
        match (*self, *next) {
            (Generator::Translation(a), Generator::Translation(b)) => {
                Some(Generator::Translation(a + b))
            }
            (Generator::Linear(a), Generator::Linear(b)) => a.mul(&b).ok().map(Generator::Linear),
            (Generator::Shear { eta: e1, xi: x1 }, Generator::Shear { eta: e2, xi: x2 })
                if x1 == x2 =>
            {
                Some(Generator::Shear {
                    eta: e1 + e2,
                    xi: x1,
                })
            }
            _ => None,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Translation(t) => write!(f, "R{t}"),
            Generator::Linear(a) => write!(f, "L{a}"),
            Generator::Shear { eta, xi } => write!(f, "J(η={eta}, ξ={xi})"),
        }
    }
}
