use std::f64::consts::FRAC_PI_4;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::stage::{derive_stage, xi0_corollary, StageData};
use crate::dynamics::{Generator, LiftWord};
use crate::error::{Error, Result};
use crate::geom::{
    line_angular_distance, op_norm, zonogon_vertices_exact, ConvexPolygon, Vec2Q, Vec2R,
};

/// Derived parameters of the spreading construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SpreaderParams {
    /// Target generators as given (after merging parallel ones), before scaling.
    pub base_generators: Vec<Vec2Q>,
    /// Integer factor applied to the base generators.
    pub scale: u64,
    /// `v₀ … v_{l-1}` followed by `v_l = (0, 1)`.
    pub v: Vec<Vec2Q>,
    pub stages: Vec<StageData>,
    pub lambda: f64,
    pub eps_prime: f64,
    pub delta: f64,
    pub delta_prime: f64,
    /// Per-stage period bounds; `xi0` is their maximum.
    pub stage_xi0: Vec<u64>,
    pub xi0: u64,
    /// Bound obtained when the angular separation ignores `v₀`, when it differs from `xi0`.
    pub xi0_without_first: Option<u64>,
    /// True when `v_{l-1}` is vertical and the two middle shears merge.
    pub vertical_merge: bool,
}

impl SpreaderParams {
    /// `l`, the number of target generators.
    pub fn l(&self) -> usize {
        self.v.len() - 1
    }
}

/// The assembled spreading map and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SpreaderRecipe {
    pub params: SpreaderParams,
    pub xi: u64,
    /// `F = (A₀J_{η₀,ξ}A₀⁻¹) ∘ … ∘ (A_lJ_{η_l,ξ}A_l⁻¹)`.
    pub f: LiftWord,
    /// The conjugated shear blocks of `F`, in the same order.
    pub blocks: Vec<LiftWord>,
    pub r: f64,
}

impl SpreaderRecipe {
    pub fn l(&self) -> usize {
        self.params.l()
    }

    pub fn xi_u32(&self) -> u32 {
        self.xi as u32
    }

    /// Distance from `a` to the admissible set `1/(2ξ) + (1/ξ)Z`.
    pub fn admissibility_defect(&self, a: f64) -> f64 {
        let xi = self.xi as f64;
        let k = (a * xi - 0.5).round();
        (a - (k + 0.5) / xi).abs()
    }

    pub fn is_admissible(&self, a: f64) -> bool {
        a.is_finite() && self.admissibility_defect(a) <= 1e-12
    }

    /// The admissible value `(2s+1)/(2ξ)`.
    pub fn admissible_a(&self, s: i64) -> f64 {
        (2 * s + 1) as f64 / (2.0 * self.xi as f64)
    }

    /// The target zonogon `Zon(v₀, …, v_{l-1})` of the scaled generators, at the origin.
    pub fn target_zonogon(&self) -> Result<ConvexPolygon> {
        crate::geom::minkowski_zonogon(&self.params.v[..self.l()])
    }
}

/// Canonical upper-half-plane representative.
fn upper(v: &Vec2Q) -> Vec2Q {
    if v.is_upper() {
        v.clone()
    } else {
        -v
    }
}

fn is_vertical(v: &Vec2Q) -> bool {
    v.x.is_zero() && !v.y.is_zero()
}

/// Merges parallel generators (keeping first-appearance order) and moves a
/// vertical generator, if any, to the end.
fn merge_generators(generators: &[Vec2Q]) -> Vec<Vec2Q> {
    let mut merged: Vec<Vec2Q> = Vec::new();
    for g in generators.iter().map(upper) {
        match merged.iter_mut().find(|m| m.cross(&g).is_zero()) {
            Some(m) => *m = &*m + &g,
            None => merged.push(g),
        }
    }
    if let Some(pos) = merged.iter().position(is_vertical) {
        let v = merged.remove(pos);
        merged.push(v);
    }
    merged
}

fn real_diameter(vertices: &[Vec2Q]) -> f64 {
    let pts: Vec<Vec2R> = vertices.iter().map(Vec2Q::to_real).collect();
    let mut best = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.max(a.dist(*b));
        }
    }
    best
}

/// Half the smallest angular separation among the distinct directions of `dirs`;
/// `π/4` when there is only one direction.
fn half_min_separation(dirs: &[Vec2R]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            let d = line_angular_distance(*a, *b)?;
            if d > 0.0 {
                best = best.min(d);
            }
        }
    }
    Ok(if best.is_finite() {
        0.5 * best
    } else {
        FRAC_PI_4
    })
}

/// Builds the spreading map for the zonogon `Zon(generators)` at accuracy `r`,
/// with `ξ = ξ₀`.
pub fn build_spreader(generators: &[Vec2Q], r: f64) -> Result<SpreaderRecipe> {
    build_spreader_with_xi(generators, r, None)
}

/// As [`build_spreader`], optionally raising `ξ` above `ξ₀`.
pub fn build_spreader_with_xi(
    generators: &[Vec2Q],
    r: f64,
    xi_override: Option<u64>,
) -> Result<SpreaderRecipe> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(
            "r",
            format!("must be positive and finite, got {r}"),
        ));
    }
    if generators.is_empty() {
        return Err(Error::invalid(
            "generators",
            "at least one generator is required",
        ));
    }
    if generators.iter().any(Vec2Q::is_zero) {
        return Err(Error::invalid("generators", "zero generator"));
    }
    let base = merge_generators(generators);
    let l = base.len();

    let (vertices, _) = zonogon_vertices_exact(&base)?;
    let diam = real_diameter(&vertices);
    let threshold = 6.0 * r + 10.0;
    let mut scale = (threshold / diam).floor() as u64 + 1;
    while scale as f64 * diam <= threshold {
        scale += 1;
    }
    if scale > i32::MAX as u64 {
        return Err(Error::Overflow("generator scale"));
    }
    let k = BigRational::from_integer(BigInt::from(scale));

    let mut v: Vec<Vec2Q> = base.iter().map(|g| g.scale(&k)).collect();
    v.push(Vec2Q::from_ints(0, 1));
    let stages: Vec<StageData> = v
        .iter()
        .enumerate()
        .map(|(i, vi)| derive_stage(i, vi))
        .collect::<Result<_>>()?;
    debug_assert!(stages[l].a.is_identity() && stages[l].eta == 0.5);

    let lambda = stages
        .iter()
        .map(|s| s.eta.abs() / op_norm(&s.a.inverse().to_real()))
        .fold(f64::INFINITY, f64::min);
    let eps_prime = 1.0 / (2.0 * l as f64);

    let dirs: Vec<Vec2R> = v.iter().map(Vec2Q::to_real).collect();
    let delta = half_min_separation(&dirs)?;
    let stage_bounds = |delta: f64| -> Result<Vec<u64>> {
        stages
            .iter()
            .map(|s| xi0_corollary(s.eta.abs(), &s.a, lambda, eps_prime, delta, delta))
            .collect()
    };
    let stage_xi0 = stage_bounds(delta)?;
    let xi0 = *stage_xi0.iter().max().expect("at least two stages");
    let xi0_without_first = {
        let alt_delta = half_min_separation(&dirs[1..])?;
        let alt = *stage_bounds(alt_delta)?.iter().max().expect("stages");
        (alt != xi0).then_some(alt)
    };

    let xi = match xi_override {
        Some(x) if x < xi0 => {
            return Err(Error::invalid(
                "xi",
                format!("override {x} is below the required minimum {xi0}"),
            ))
        }
        Some(x) => x,
        None => xi0,
    };
    if xi > u32::MAX as u64 {
        return Err(Error::invalid("xi", "exceeds the supported range"));
    }

    let vertical_merge = l >= 1 && is_vertical(&v[l - 1]);
    let blocks: Vec<LiftWord> = stages
        .iter()
        .map(|s| shear_block(s, s.eta, xi as u32))
        .collect::<Result<_>>()?;
    let f = LiftWord::from_generators(
        blocks
            .iter()
            .flat_map(|b| b.generators().iter().copied())
            .collect(),
    );

    let params = SpreaderParams {
        base_generators: base,
        scale,
        v,
        stages,
        lambda,
        eps_prime,
        delta,
        delta_prime: delta,
        stage_xi0,
        xi0,
        xi0_without_first,
        vertical_merge,
    };
    Ok(SpreaderRecipe {
        params,
        xi,
        f,
        blocks,
        r,
    })
}

/// `A J_{η,ξ} A⁻¹` as a word, omitting identity conjugators.
pub(crate) fn shear_block(stage: &StageData, eta: f64, xi: u32) -> Result<LiftWord> {
    let j = Generator::shear(eta, xi)?;
    Ok(if stage.a.is_identity() {
        LiftWord::single(j)
    } else {
        LiftWord::from_generators(vec![
            Generator::Linear(stage.a),
            j,
            Generator::Linear(stage.a.inverse()),
        ])
    })
}
