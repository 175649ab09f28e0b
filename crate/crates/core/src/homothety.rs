//! Homothety-type normalization, large-approximate certification and the
//! stability bounds under perturbation and linear maps.

use thiserror::Error;

use crate::error::{Error, Result};
use crate::geom::{diameter, op_norm, ConvexPolygon, GridIndex, Mat2, PointCloud, Vec2R};

/// Diameter tolerance for a normalized shape.
pub const NORMALIZED_DIAMETER_TOL: f64 = 1e-9;

/// A compact set rescaled to diameter 1 and centered at its centroid.
#[derive(Clone, Debug, PartialEq)]
pub struct HomothetyRep {
    shape: PointCloud,
    anchor: Vec2R,
}

impl HomothetyRep {
    pub fn shape(&self) -> &PointCloud {
        &self.shape
    }

    /// Centroid of the set before normalization.
    pub fn anchor(&self) -> Vec2R {
        self.anchor
    }

    /// Normalized samples of a convex polygon, using about `samples_across`
    /// sample spacings per unit of diameter.
    pub fn from_polygon(poly: &ConvexPolygon, samples_across: u32) -> Result<Self> {
        let diam = poly.diameter();
        if diam <= 0.0 {
            return Err(Error::Degenerate("polygon is a single point".into()));
        }
        if samples_across == 0 {
            return Err(Error::invalid("samples_across", "must be positive"));
        }
        normalize(&poly.sample(diam / samples_across as f64)?)
    }
}

/// Rescales `k` by `1/diam(k)` and moves its centroid to the origin.
pub fn normalize(k: &PointCloud) -> Result<HomothetyRep> {
    let diam = diameter(k);
    if !(diam > 0.0) {
        return Err(Error::Degenerate(
            "cannot normalize a set of diameter zero".into(),
        ));
    }
    let anchor = k.centroid();
    let shape = k.translate(-anchor).scale(1.0 / diam);
    Ok(HomothetyRep { shape, anchor })
}

/// Certificate that a set is an `r`-large approximate of a homothety type.
#[derive(Clone, Debug, PartialEq)]
pub struct LargeApproxWitness {
    pub r: f64,
    /// Diameter of the certified set.
    pub scale: f64,
    /// Shift applied to the normalized target.
    pub translation: Vec2R,
    /// Hausdorff distance between the normalized set and the shifted target.
    pub achieved_gap: f64,
    /// Discretization allowance added to the gap before comparing with `1/r`.
    pub sampling_slack: f64,
    /// Finest step of the translation search.
    pub search_step: f64,
}

impl LargeApproxWitness {
    pub fn margin(&self) -> f64 {
        1.0 / self.r - self.achieved_gap - self.sampling_slack
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ApproxError {
    #[error("set is too small: diameter {diameter} does not exceed r = {r}")]
    TooSmall { diameter: f64, r: f64 },
    #[error(
        "shape mismatch: best gap {best_gap} + slack {sampling_slack} is not below 1/r = {}",
        1.0 / r
    )]
    ShapeMismatch {
        r: f64,
        best_gap: f64,
        sampling_slack: f64,
        translation: Vec2R,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// Translation search state: Hausdorff gap between a fixed normalized cloud
/// and the target shifted by `t`.
struct GapOracle<'a> {
    kn: &'a [Vec2R],
    target: &'a [Vec2R],
    kn_index: GridIndex<'a>,
    target_index: GridIndex<'a>,
}

impl<'a> GapOracle<'a> {
    fn new(kn: &'a [Vec2R], target: &'a [Vec2R]) -> Self {
        Self {
            kn,
            target,
            kn_index: GridIndex::new(kn),
            target_index: GridIndex::new(target),
        }
    }

    fn gap(&self, t: Vec2R) -> f64 {
        use rayon::prelude::*;
        let forward = self
            .kn
            .par_iter()
            .map(|&p| self.target_index.nearest_distance(p - t))
            .reduce(|| 0.0, f64::max);
        let backward = self
            .target
            .par_iter()
            .map(|&p| self.kn_index.nearest_distance(p + t))
            .reduce(|| 0.0, f64::max);
        forward.max(backward)
    }
}

/// Step sizes of the translation search, as fractions of `1/r`.
const SEARCH_LEVELS: [f64; 3] = [4.0, 10.0, 20.0];
const MAX_MOVES_PER_LEVEL: usize = 400;
const IMPROVEMENT_EPS: f64 = 1e-12;

/// Finds a translation making `K/diam(K)` close to the normalized target and
/// decides whether `K` is an `r`-large approximate of the target's type.
///
/// The search starts from the better of centroid and bounding-box-center
/// alignment and refines by coordinate descent on a 3×3 stencil with steps
/// `(1/r)/4`, `(1/r)/10` and `(1/r)/20`. Ties go to the lexicographically
/// smallest translation.
pub fn large_approx_check(
    k: &PointCloud,
    target: &HomothetyRep,
    r: f64,
) -> Result<LargeApproxWitness, ApproxError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("r", format!("must be positive and finite, got {r}")).into());
    }
    let diam = diameter(k);
    if diam <= r {
        return Err(ApproxError::TooSmall { diameter: diam, r });
    }
    let kn_cloud = k.scale(1.0 / diam);
    let kn = kn_cloud.points();
    let tg = target.shape().points();
    let oracle = GapOracle::new(kn, tg);

    let center = |c: &PointCloud| {
        let (lo, hi) = c.bbox();
        (lo + hi) * 0.5
    };
    let guesses = [
        kn_cloud.centroid() - target.shape().centroid(),
        center(&kn_cloud) - center(target.shape()),
    ];
    let mut best_t = guesses[0];
    let mut best_gap = oracle.gap(best_t);
    for &g in &guesses[1..] {
        let gap = oracle.gap(g);
        if gap < best_gap || (gap == best_gap && g.lex_cmp(best_t).is_lt()) {
            best_t = g;
            best_gap = gap;
        }
    }

    let mut step = 0.0;
    for level in SEARCH_LEVELS {
        step = 1.0 / r / level;
        for _ in 0..MAX_MOVES_PER_LEVEL {
            let mut cand_t = best_t;
            let mut cand_gap = f64::INFINITY;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let t = best_t + Vec2R::new(dx as f64 * step, dy as f64 * step);
                    let gap = oracle.gap(t);
                    if gap < cand_gap || (gap == cand_gap && t.lex_cmp(cand_t).is_lt()) {
                        cand_t = t;
                        cand_gap = gap;
                    }
                }
            }
            if cand_gap < best_gap - IMPROVEMENT_EPS {
                best_t = cand_t;
                best_gap = cand_gap;
            } else {
                break;
            }
        }
    }

    let sampling_slack = 2.0 * (k.resolution_hint() / diam + target.shape().resolution_hint());
    if best_gap + sampling_slack < 1.0 / r {
        Ok(LargeApproxWitness {
            r,
            scale: diam,
            translation: best_t,
            achieved_gap: best_gap,
            sampling_slack,
            search_step: step,
        })
    } else {
        Err(ApproxError::ShapeMismatch {
            r,
            best_gap,
            sampling_slack,
            translation: best_t,
        })
    }
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

/// Smallest `s` such that an `s`-large approximate stays an `r`-large
/// approximate after a Hausdorff perturbation of size below `d0`:
/// `s₀ = 2·d0 + r + 3·d0·r`.
pub fn perturbation_bound(r: f64, d0: f64) -> Result<f64> {
    check_positive("r", r)?;
    check_positive("d0", d0)?;
    Ok(2.0 * d0 + r + 3.0 * d0 * r)
}

/// Smallest `s` such that the image under `A` of an `s`-large approximate of
/// a type is an `r`-large approximate of its image type:
/// `s₀ = r·‖A⁻¹‖·max{3‖A‖, 1}`.
pub fn linear_map_bound(r: f64, a: &Mat2) -> Result<f64> {
    check_positive("r", r)?;
    if !a.is_finite() {
        return Err(Error::invalid("A", "non-finite entries"));
    }
    let inv = a.inverse()?;
    Ok(r * op_norm(&inv) * (3.0 * op_norm(a)).max(1.0))
}
