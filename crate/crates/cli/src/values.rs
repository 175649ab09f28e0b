//! JSON encodings shared by configs and records.
//!
//! Reals are written as decimal strings with 17 significant digits, which
//! round-trips every `f64`. Rationals are `[numerator, denominator]` pairs;
//! configs may also give a bare integer.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{self, Serializer};
use serde::{Deserialize, Serialize};

use torus_spread::geom::{Vec2Q, Vec2R};

/// An `f64` serialized as a 17-significant-digit decimal string.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Real {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s.trim() {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_real(self.0))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a decimal string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                parse_real(v)
                    .map(Real)
                    .ok_or_else(|| E::custom(format!("`{v}` is not a real number")))
            }
        }
        d.deserialize_any(V)
    }
}

/// A point as `[x, y]` of [`Real`]s.
pub type Point = [Real; 2];

pub fn point(v: Vec2R) -> Point {
    [Real(v.x), Real(v.y)]
}

pub fn vec2(p: &Point) -> Vec2R {
    Vec2R::new(p[0].0, p[1].0)
}

pub fn points(vs: &[Vec2R]) -> Vec<Point> {
    vs.iter().copied().map(point).collect()
}

/// An exact rational, `[num, den]` on output; input also accepts an integer.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let num = self.0.numer().to_i64();
        let den = self.0.denom().to_i64();
        match (num, den) {
            (Some(n), Some(d)) => [n, d].serialize(s),
            _ => Err(ser::Error::custom(format!(
                "rational {} does not fit in 64-bit integers",
                self.0
            ))),
        }
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Pair([i64; 2]),
        }
        match Raw::deserialize(d).map_err(|_| {
            de::Error::custom("expected an integer or a [numerator, denominator] pair")
        })? {
            Raw::Int(n) => Ok(Rational(BigRational::from_integer(n.into()))),
            Raw::Pair([_, 0]) => Err(de::Error::custom("zero denominator")),
            Raw::Pair([n, d]) => Ok(Rational(BigRational::new(n.into(), d.into()))),
        }
    }
}

impl Rational {
    pub fn ratio(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// A rational vector `[x, y]`.
pub type RationalPair = [Rational; 2];

pub fn to_vec2q(p: &RationalPair) -> Vec2Q {
    Vec2Q::new(p[0].0.clone(), p[1].0.clone())
}

pub fn from_vec2q(v: &Vec2Q) -> RationalPair {
    [Rational(v.x.clone()), Rational(v.y.clone())]
}
