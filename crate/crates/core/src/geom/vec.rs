use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point or displacement in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2R {
    pub x: f64,
    pub y: f64,
}

impl Vec2R {
    pub const ZERO: Vec2R = Vec2R { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn finite(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::invalid(
                "point",
                format!("non-finite coordinates ({x}, {y})"),
            ))
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn dist_sq(self, o: Self) -> f64 {
        (self - o).norm_sq()
    }

    /// Polar angle in `(-π, π]`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    /// Lexicographic order on `(x, y)`; used for deterministic tie-breaking.
    pub fn lex_cmp(self, o: Self) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Vec2R {
    type Output = Vec2R;
    #[inline]
    fn add(self, o: Vec2R) -> Vec2R {
        Vec2R::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2R {
    #[inline]
    fn add_assign(&mut self, o: Vec2R) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2R {
    type Output = Vec2R;
    #[inline]
    fn sub(self, o: Vec2R) -> Vec2R {
        Vec2R::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2R {
    #[inline]
    fn sub_assign(&mut self, o: Vec2R) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2R {
    type Output = Vec2R;
    #[inline]
    fn neg(self) -> Vec2R {
        Vec2R::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2R {
    type Output = Vec2R;
    #[inline]
    fn mul(self, s: f64) -> Vec2R {
        Vec2R::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2R> for f64 {
    type Output = Vec2R;
    #[inline]
    fn mul(self, v: Vec2R) -> Vec2R {
        v * self
    }
}

impl Div<f64> for Vec2R {
    type Output = Vec2R;
    #[inline]
    fn div(self, s: f64) -> Vec2R {
        Vec2R::new(self.x / s, self.y / s)
    }
}

impl fmt::Display for Vec2R {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Arc distance on the unit circle between the directions of `u` and `v`, in `[0, π]`.
pub fn angular_distance(u: Vec2R, v: Vec2R) -> Result<f64> {
    if u.norm_sq() == 0.0 || v.norm_sq() == 0.0 {
        return Err(Error::invalid("direction", "zero vector has no direction"));
    }
    Ok(u.cross(v).abs().atan2(u.dot(v)))
}

/// Distance between the unoriented lines spanned by `u` and `v`, in `[0, π/2]`.
///
/// Segment directions are unoriented, so `v` and `-v` count as the same direction.
pub fn line_angular_distance(u: Vec2R, v: Vec2R) -> Result<f64> {
    let d = angular_distance(u, v)?;
    Ok(d.min(PI - d))
}

/// Exact rational vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vec2Q {
    pub x: BigRational,
    pub y: BigRational,
}

impl Vec2Q {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(
            BigRational::from_integer(x.into()),
            BigRational::from_integer(y.into()),
        )
    }

    /// `(xn/xd, yn/yd)`; errors on a zero denominator.
    pub fn from_fractions(xn: i64, xd: i64, yn: i64, yd: i64) -> Result<Self> {
        if xd == 0 || yd == 0 {
            return Err(Error::invalid("rational", "zero denominator"));
        }
        Ok(Self::new(
            BigRational::new(xn.into(), xd.into()),
            BigRational::new(yn.into(), yd.into()),
        ))
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.x * s, &self.y * s)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    pub fn cross(&self, o: &Self) -> BigRational {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn dot(&self, o: &Self) -> BigRational {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn norm_sq(&self) -> BigRational {
        self.dot(self)
    }

    pub fn to_real(&self) -> Vec2R {
        Vec2R::new(
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// True when the vector lies in the half-open upper half-plane
    /// `{y > 0} ∪ {y = 0, x > 0}`.
    pub fn is_upper(&self) -> bool {
        self.y.is_positive() || (self.y.is_zero() && self.x.is_positive())
    }

    /// Decomposes a nonzero vector as `η · w` with `w` a primitive integer
    /// vector in the upper half-plane and `η` a signed rational.
    pub fn primitive_direction(&self) -> Result<(BigInt, BigInt, BigRational)> {
        if self.is_zero() {
            return Err(Error::invalid(
                "v",
                "zero vector has no primitive direction",
            ));
        }
        let den = self.x.denom().lcm(self.y.denom());
        let ix = (&self.x * BigRational::from_integer(den.clone())).to_integer();
        let iy = (&self.y * BigRational::from_integer(den.clone())).to_integer();
        let g = ix.gcd(&iy);
        let (mut wx, mut wy) = (&ix / &g, &iy / &g);
        let mut eta = BigRational::new(g, den);
        let upper = wy.is_positive() || (wy.is_zero() && wx.is_positive());
        if !upper {
            wx = -wx;
            wy = -wy;
            eta = -eta;
        }
        Ok((wx, wy, eta))
    }
}

impl Add for &Vec2Q {
    type Output = Vec2Q;
    fn add(self, o: &Vec2Q) -> Vec2Q {
        Vec2Q::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Vec2Q {
    type Output = Vec2Q;
    fn sub(self, o: &Vec2Q) -> Vec2Q {
        Vec2Q::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Vec2Q {
    type Output = Vec2Q;
    fn neg(self) -> Vec2Q {
        Vec2Q::new(-&self.x, -&self.y)
    }
}

impl fmt::Display for Vec2Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angular_distance_examples() {
        let e1 = Vec2R::new(1.0, 0.0);
        assert!((angular_distance(e1, Vec2R::new(0.0, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(angular_distance(e1, Vec2R::new(2.0, 0.0)).unwrap(), 0.0);
        assert!((angular_distance(e1, Vec2R::new(-1.0, 0.0)).unwrap() - PI).abs() < 1e-15);
        assert!(angular_distance(e1, Vec2R::ZERO).is_err());
    }

    #[test]
    fn line_distance_identifies_opposite_directions() {
        let d = line_angular_distance(Vec2R::new(1.0, 0.0), Vec2R::new(-1.0, 0.0)).unwrap();
        assert_eq!(d, 0.0);
        let d = line_angular_distance(Vec2R::new(1.0, 0.0), Vec2R::new(-1.0, 1.0)).unwrap();
        assert!((d - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn primitive_direction_canonical_sign() {
        let (wx, wy, eta) = Vec2Q::from_ints(4, 2).primitive_direction().unwrap();
        assert_eq!((wx, wy), (BigInt::from(2), BigInt::from(1)));
        assert_eq!(eta, BigRational::from_integer(2.into()));

        let (wx, wy, eta) = Vec2Q::from_ints(0, -3).primitive_direction().unwrap();
        assert_eq!((wx, wy), (BigInt::from(0), BigInt::from(1)));
        assert_eq!(eta, BigRational::from_integer((-3).into()));

        let v = Vec2Q::from_fractions(-3, 2, 0, 1).unwrap();
        let (wx, wy, eta) = v.primitive_direction().unwrap();
        assert_eq!((wx, wy), (BigInt::from(1), BigInt::from(0)));
        assert_eq!(eta, BigRational::new((-3).into(), 2.into()));
        assert!(Vec2Q::zero().primitive_direction().is_err());
    }
}
