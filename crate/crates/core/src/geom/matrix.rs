use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::vec::{Vec2Q, Vec2R};
use crate::error::{Error, Result};

/// Real 2×2 matrix `[[a, b], [c, d]]` acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn diag(p: f64, q: f64) -> Self {
        Self::new(p, 0.0, 0.0, q)
    }

    #[inline]
    pub fn apply(&self, v: Vec2R) -> Vec2R {
        Vec2R::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::invalid("A", "matrix is singular"));
        }
        Ok(Mat2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }
}

/// Operator norm (largest singular value) of a 2×2 matrix.
///
/// The largest eigenvalue of `MᵀM = [[p, q], [q, s]]` is
/// `(p+s)/2 + sqrt(((p-s)/2)² + q²)`.
pub fn op_norm(m: &Mat2) -> f64 {
    let p = m.a * m.a + m.c * m.c;
    let s = m.b * m.b + m.d * m.d;
    let q = m.a * m.b + m.c * m.d;
    let half_diff = 0.5 * (p - s);
    let lambda = 0.5 * (p + s) + half_diff.hypot(q);
    lambda.max(0.0).sqrt()
}

/// Integer 2×2 matrix with determinant ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2Z {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl Mat2Z {
    pub const IDENTITY: Mat2Z = Mat2Z {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 && det != -1 {
            return Err(Error::invalid("A", format!("determinant {det} is not ±1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Exact inverse; entries of a unimodular inverse are entries of the input up to sign.
    pub fn inverse(&self) -> Mat2Z {
        let det = self.det();
        Mat2Z {
            a: det * self.d,
            b: -det * self.b,
            c: -det * self.c,
            d: det * self.a,
        }
    }

    pub fn mul(&self, o: &Mat2Z) -> Result<Mat2Z> {
        let e = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(Error::Overflow("integer matrix product"))
        };
        Ok(Mat2Z {
            a: e(self.a, o.a, self.b, o.c)?,
            b: e(self.a, o.b, self.b, o.d)?,
            c: e(self.c, o.a, self.d, o.c)?,
            d: e(self.c, o.b, self.d, o.d)?,
        })
    }

    pub fn to_real(&self) -> Mat2 {
        Mat2::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }

    #[inline]
    pub fn apply(&self, v: Vec2R) -> Vec2R {
        Vec2R::new(
            self.a as f64 * v.x + self.b as f64 * v.y,
            self.c as f64 * v.x + self.d as f64 * v.y,
        )
    }

    pub fn apply_exact(&self, v: &Vec2Q) -> Vec2Q {
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        Vec2Q::new(
            q(self.a) * &v.x + q(self.b) * &v.y,
            q(self.c) * &v.x + q(self.d) * &v.y,
        )
    }

    /// Second column, i.e. the image of `(0, 1)`.
    pub fn second_column(&self) -> (i64, i64) {
        (self.b, self.d)
    }
}

impl fmt::Display for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Completes a primitive integer vector `w` to a matrix in SL(2,Z) whose second column is `w`.
///
/// Among all completions `[[a + k·w₁, w₁], [c + k·w₂, w₂]]` the one with the
/// lexicographically smallest `(|a|, |c|)` is returned (smaller `k` on ties).
pub fn primitive_completion(w1: i64, w2: i64) -> Result<Mat2Z> {
    if w1 == 0 && w2 == 0 {
        return Err(Error::invalid("w", "zero vector"));
    }
    let (x1, x2) = (BigInt::from(w1), BigInt::from(w2));
    let eg = x1.extended_gcd(&x2);
    let g = eg.gcd;
    if g != BigInt::from(1) && g != BigInt::from(-1) {
        return Err(Error::invalid(
            "w",
            format!("({w1}, {w2}) is not primitive"),
        ));
    }
    // x·w1 + y·w2 = g, so with a = y·g and c = -x·g we get a·w2 - c·w1 = 1.
    let a0 = (eg.y * &g)
        .to_i128()
        .ok_or(Error::Overflow("primitive completion"))?;
    let c0 = (-eg.x * &g)
        .to_i128()
        .ok_or(Error::Overflow("primitive completion"))?;
    let (w1i, w2i) = (w1 as i128, w2 as i128);

    let k_center = if w1 != 0 {
        -(a0 as f64 / w1 as f64).round() as i128
    } else {
        -(c0 as f64 / w2 as f64).round() as i128
    };
    let mut best: Option<(i128, i128, i128)> = None;
    for k in (k_center - 2)..=(k_center + 2) {
        let a = a0 + k * w1i;
        let c = c0 + k * w2i;
        let key = (a.abs(), c.abs());
        let better = match best {
            None => true,
            Some((ba, bc, _)) => key < (ba.abs(), bc.abs()),
        };
        if better {
            best = Some((a, c, k));
        }
    }
    let (a, c, _) = best.expect("non-empty search window");
    let a = i64::try_from(a).map_err(|_| Error::Overflow("primitive completion"))?;
    let c = i64::try_from(c).map_err(|_| Error::Overflow("primitive completion"))?;
    let m = Mat2Z::new(a, w1, c, w2)?;
    debug_assert_eq!(m.det(), 1);
    Ok(m)
}
