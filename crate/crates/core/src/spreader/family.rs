use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::recipe::{build_spreader, SpreaderRecipe};
use crate::dynamics::{cq_conjugate, RescaledLift};
use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2Q, Vec2R};
use crate::homothety::{linear_map_bound, perturbation_bound};

/// A map `h` commuting with `R_{(1/q, 0)}` together with rotation vectors
/// `θ_i → (p/q, 0)` such that the `t_i`-th iterate of `h R_{θ_i} h⁻¹` spreads
/// the fundamental domain into an `ℓ`-large approximate of the target.
#[derive(Clone, Debug)]
pub struct CommutingFamily {
    pub p: i64,
    pub q: u32,
    pub ell: f64,
    /// Accuracy demanded of the rescaled construction before conjugating by `C_q`.
    pub level: f64,
    /// Intermediate bound from the linear-map step.
    pub linear_level: f64,
    pub recipe: SpreaderRecipe,
    pub h: RescaledLift,
}

impl CommutingFamily {
    fn check_index(i: u64) -> Result<()> {
        if i == 0 {
            return Err(Error::invalid("i", "family members are indexed from 1"));
        }
        Ok(())
    }

    /// Iterate count `t_i`.
    pub fn iterate_count(&self, i: u64) -> Result<u64> {
        Self::check_index(i)?;
        Ok(i)
    }

    /// `s_i = p·t_i·ξ`, so that `α_i → (p, 0)`.
    fn s(&self, i: u64) -> i64 {
        self.p * i as i64 * self.recipe.xi as i64
    }

    /// `α_i = ((2s_i + 1)/(2t_iξ), 0)`.
    pub fn alpha(&self, i: u64) -> Result<Vec2R> {
        Self::check_index(i)?;
        let denom = 2.0 * i as f64 * self.recipe.xi as f64;
        Ok(Vec2R::new((2 * self.s(i) + 1) as f64 / denom, 0.0))
    }

    /// First coordinate of `t_i α_i = (s_i/ξ + 1/(2ξ), 0)`, which is admissible
    /// for the recipe.
    pub fn accumulated_shift(&self, i: u64) -> Result<f64> {
        Self::check_index(i)?;
        Ok(self.recipe.admissible_a(self.s(i)))
    }

    /// `θ_i = C_q α_i`.
    pub fn theta(&self, i: u64) -> Result<Vec2R> {
        let a = self.alpha(i)?;
        Ok(Vec2R::new(a.x / self.q as f64, a.y))
    }

    pub fn thetas(&self, count: u64) -> Result<Vec<Vec2R>> {
        (1..=count).map(|i| self.theta(i)).collect()
    }

    /// `h ∘ R_{θ_i} ∘ h⁻¹`.
    pub fn member(&self, i: u64) -> Result<RescaledLift> {
        self.h.conjugate_translation(self.theta(i)?)
    }

    /// Target generators of the commuting family, rescaled by `C_q⁻¹`.
    pub fn rescaled_generators(&self) -> &[Vec2Q] {
        &self.recipe.params.base_generators
    }
}

/// Builds `h = C_q F C_q⁻¹` from the spreading map `F` for `C_q⁻¹(Zon(generators))`
/// at the accuracy needed for `ℓ`-large approximates after conjugation by `C_q`.
pub fn build_commuting_family(
    p: i64,
    q: u32,
    generators: &[Vec2Q],
    ell: f64,
) -> Result<CommutingFamily> {
    if q == 0 {
        return Err(Error::invalid("q", "must be positive"));
    }
    if p.gcd(&(q as i64)) != 1 {
        return Err(Error::invalid("p", format!("gcd({p}, {q}) must be 1")));
    }
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::invalid("ell", "must be positive and finite"));
    }
    let cq = Mat2::diag(1.0 / q as f64, 1.0);
    let linear_level = linear_map_bound(ell, &cq)?;
    let level = perturbation_bound(linear_level, q as f64)?;

    let qr = BigRational::from_integer(BigInt::from(q));
    let rescaled: Vec<Vec2Q> = generators
        .iter()
        .map(|g| Vec2Q::new(&g.x * &qr, g.y.clone()))
        .collect();
    let recipe = build_spreader(&rescaled, level)?;
    let h = cq_conjugate(&recipe.f, q)?;
    Ok(CommutingFamily {
        p,
        q,
        ell,
        level,
        linear_level,
        recipe,
        h,
    })
}
