use std::fmt;

use super::generator::Generator;
use crate::error::{Error, Result};
use crate::geom::{Mat2Z, Vec2R};

/// A map of the plane that can be evaluated pointwise.
pub trait PlaneMap: Sync {
    fn apply(&self, p: Vec2R) -> Vec2R;
}

impl<T: PlaneMap + ?Sized> PlaneMap for &T {
    fn apply(&self, p: Vec2R) -> Vec2R {
        (**self).apply(p)
    }
}

/// Composition of generators, applied right to left: `[g₁, g₂]` is `g₁ ∘ g₂`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LiftWord {
    gens: Vec<Generator>,
}

impl LiftWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Keeps the generators exactly as given, without simplification.
    pub fn from_generators(gens: Vec<Generator>) -> Self {
        Self { gens }
    }

    pub fn single(g: Generator) -> Self {
        Self { gens: vec![g] }
    }

    /// Builds the word and applies the peephole simplifications of [`LiftWord::compose`].
    pub fn simplified(gens: impl IntoIterator<Item = Generator>) -> Self {
        let mut w = Self::identity();
        for g in gens {
            w.push_simplified(g);
        }
        w
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    fn push_simplified(&mut self, g: Generator) {
        if g.is_trivial() {
            return;
        }
        if let Some(top) = self.gens.last() {
            if let Some(m) = top.merge(&g) {
                self.gens.pop();
                if !m.is_trivial() {
                    self.gens.push(m);
                }
                return;
            }
        }
        self.gens.push(g);
    }

    /// `self ∘ other` with adjacent same-kind generators merged: shears of
    /// equal period add their amplitudes, translations add, linear maps
    /// multiply; identities that result are dropped.
    pub fn compose(&self, other: &LiftWord) -> LiftWord {
        let mut w = self.clone();
        for &g in &other.gens {
            w.push_simplified(g);
        }
        w
    }

    pub fn inverse(&self) -> LiftWord {
        LiftWord {
            gens: self.gens.iter().rev().map(Generator::inverse).collect(),
        }
    }

    /// Conjugate `A ∘ self ∘ A⁻¹`.
    pub fn conjugate_by(&self, a: Mat2Z) -> LiftWord {
        LiftWord::single(Generator::Linear(a))
            .compose(self)
            .compose(&LiftWord::single(Generator::Linear(a.inverse())))
    }

    /// Product of the linear generators: the action on `Z²` of the induced torus map.
    pub fn linear_part(&self) -> Result<Mat2Z> {
        self.gens
            .iter()
            .try_fold(Mat2Z::IDENTITY, |acc, g| acc.mul(&g.linear_part()))
    }

    /// Number of shear generators.
    pub fn shear_count(&self) -> usize {
        self.gens
            .iter()
            .filter(|g| matches!(g, Generator::Shear { .. }))
            .count()
    }

    #[inline]
    pub fn apply(&self, p: Vec2R) -> Vec2R {
        self.gens.iter().rev().fold(p, |q, g| g.apply(q))
    }
}

impl PlaneMap for LiftWord {
    #[inline]
    fn apply(&self, p: Vec2R) -> Vec2R {
        LiftWord::apply(self, p)
    }
}

impl PlaneMap for Generator {
    #[inline]
    fn apply(&self, p: Vec2R) -> Vec2R {
        Generator::apply(self, p)
    }
}

impl fmt::Display for LiftWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "Id");
        }
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, " ∘ ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// `C_q ∘ base ∘ C_q⁻¹` with `C_q = diag(1/q, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledLift {
    base: LiftWord,
    q: u32,
}

impl RescaledLift {
    pub fn base(&self) -> &LiftWord {
        &self.base
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn inverse(&self) -> RescaledLift {
        RescaledLift {
            base: self.base.inverse(),
            q: self.q,
        }
    }

    /// `self ∘ R_θ ∘ self⁻¹`, which is again a rescaled lift: its base is
    /// `base ∘ R_α ∘ base⁻¹` with `α = C_q⁻¹ θ`.
    pub fn conjugate_translation(&self, theta: Vec2R) -> Result<RescaledLift> {
        let alpha = Vec2R::new(theta.x * self.q as f64, theta.y);
        let rot = LiftWord::single(Generator::translation(alpha)?);
        Ok(RescaledLift {
            base: self.base.compose(&rot).compose(&self.base.inverse()),
            q: self.q,
        })
    }
}

impl PlaneMap for RescaledLift {
    #[inline]
    fn apply(&self, p: Vec2R) -> Vec2R {
        let q = self.q as f64;
        let image = self.base.apply(Vec2R::new(p.x * q, p.y));
        Vec2R::new(image.x / q, image.y)
    }
}

/// Default number of probe points for equivariance checks during construction.
pub const EQUIVARIANCE_SAMPLES: usize = 256;
/// Defect tolerated by [`cq_conjugate`].
pub const EQUIVARIANCE_TOL: f64 = 1e-9;

/// Wraps `base` as `C_q ∘ base ∘ C_q⁻¹` after checking that `base` commutes
/// with integer translations.
pub fn cq_conjugate(base: &LiftWord, q: u32) -> Result<RescaledLift> {
    if q == 0 {
        return Err(Error::invalid("q", "must be at least 1"));
    }
    let lattice = [
        Vec2R::new(1.0, 0.0),
        Vec2R::new(0.0, 1.0),
        Vec2R::new(-3.0, 2.0),
    ];
    let defect = equivariance_check(base, &lattice, EQUIVARIANCE_SAMPLES);
    if !(defect <= EQUIVARIANCE_TOL) {
        return Err(Error::NotEquivariant {
            defect,
            tolerance: EQUIVARIANCE_TOL,
        });
    }
    Ok(RescaledLift {
        base: base.clone(),
        q,
    })
}

/// Deterministic, well-spread sample points in `[-half_width, half_width]²`
/// (additive recurrence with the plastic-number constants).
pub fn spread_points(count: usize, half_width: f64) -> impl Iterator<Item = Vec2R> {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    (0..count).map(move |i| {
        let u = (0.5 + A1 * i as f64).fract();
        let v = (0.5 + A2 * i as f64).fract();
        Vec2R::new((2.0 * u - 1.0) * half_width, (2.0 * v - 1.0) * half_width)
    })
}

/// `max |map(p + ζ) − map(p) − ζ|` over `samples` spread points `p` in
/// `[-4, 4]²` and every `ζ` in `lattice`.
pub fn equivariance_check<M: PlaneMap + ?Sized>(map: &M, lattice: &[Vec2R], samples: usize) -> f64 {
    let mut worst = 0.0f64;
    for p in spread_points(samples.max(1), 4.0) {
        let fp = map.apply(p);
        for &z in lattice {
            let d = (map.apply(p + z) - fp - z).norm();
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    worst
}
