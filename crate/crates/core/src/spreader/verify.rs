use std::fmt;

use super::recipe::SpreaderRecipe;
use crate::dynamics::{FundamentalDomain, Generator, LiftWord, SampledSet};
use crate::error::{Error, Result};
use crate::geom::{diameter, directed_hausdorff, ConvexPolygon, PointCloud, Vec2R};
use crate::homothety::{large_approx_check, ApproxError, HomothetyRep, LargeApproxWitness};

/// Outcome of a numerical assertion, separating discretization error from
/// genuine failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Violated => "violated",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `value ≤ bound`.
    AtMost,
    /// `value > bound`.
    Exceeds,
}

/// A measured quantity compared against a bound with an explicit slack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub relation: Relation,
    pub verdict: Verdict,
}

impl Check {
    /// Pass when `value ≤ bound`, inconclusive up to `bound + slack`.
    pub fn at_most(value: f64, bound: f64, slack: f64) -> Self {
        let verdict = if value <= bound {
            Verdict::Pass
        } else if value <= bound + slack {
            Verdict::Inconclusive
        } else {
            Verdict::Violated
        };
        Check {
            value,
            bound,
            slack,
            relation: Relation::AtMost,
            verdict,
        }
    }

    /// Pass when `value > bound`, inconclusive down to `bound - slack`.
    pub fn exceeds(value: f64, bound: f64, slack: f64) -> Self {
        let verdict = if value > bound {
            Verdict::Pass
        } else if value > bound - slack {
            Verdict::Inconclusive
        } else {
            Verdict::Violated
        };
        Check {
            value,
            bound,
            slack,
            relation: Relation::Exceeds,
            verdict,
        }
    }
}

/// One factor `F_i` of `F ∘ R_{(a,b)} ∘ F⁻¹ = F_{2l} ∘ … ∘ F₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    /// Stage whose domain the factor acts on.
    pub from: usize,
    /// Stage of the image; `from + 3` for the merged vertical factor.
    pub to: usize,
    pub word: LiftWord,
}

/// Snapshot of one stage of the verification.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub index: usize,
    pub k: ConvexPolygon,
    /// Sampled `D_i`; absent for the stages skipped by the vertical merge.
    pub d: Option<PointCloud>,
    /// `sup_{x∈D_i} d(x, K_i)`.
    pub d_to_k: Option<Check>,
    /// `sup_{y∈K_i} d(y, D_i)`.
    pub k_to_d: Option<Check>,
}

/// Result of [`verify_stages`].
#[derive(Clone, Debug)]
pub struct StageTrace {
    pub a: f64,
    pub b: f64,
    pub factors: Vec<Factor>,
    pub stages: Vec<StageRecord>,
    /// `d_H(D_{2l+1}, K_{2l+1})` against 2.
    pub final_hausdorff: Check,
    /// `diam(D_{2l+1})` against `6r + 6`.
    pub final_diameter: Check,
    /// Large-approximate check of `D_{2l+1}` at `r + 1` against `K_{2l+1}`.
    pub approximation: std::result::Result<LargeApproxWitness, ApproxError>,
    pub approximation_verdict: Verdict,
}

impl StageTrace {
    /// Worst verdict over every stage and final check.
    pub fn verdict(&self) -> Verdict {
        self.stages
            .iter()
            .flat_map(|s| [s.d_to_k, s.k_to_d])
            .flatten()
            .map(|c| c.verdict)
            .chain([
                self.final_hausdorff.verdict,
                self.final_diameter.verdict,
                self.approximation_verdict,
            ])
            .max()
            .unwrap_or(Verdict::Pass)
    }

    /// First stage whose containment checks are violated.
    pub fn first_violation(&self) -> Option<usize> {
        self.stages
            .iter()
            .find(|s| {
                [s.d_to_k, s.k_to_d]
                    .iter()
                    .flatten()
                    .any(|c| c.verdict == Verdict::Violated)
            })
            .map(|s| s.index)
    }

    pub fn final_cloud(&self) -> &PointCloud {
        self.stages
            .last()
            .and_then(|s| s.d.as_ref())
            .expect("the last stage is always computed")
    }
}

fn check_parameters(recipe: &SpreaderRecipe, a: f64, b: f64) -> Result<()> {
    if !recipe.is_admissible(a) {
        return Err(Error::invalid(
            "a",
            format!(
                "{a} is not in 1/(2ξ) + (1/ξ)Z for ξ = {} (distance {:e})",
                recipe.xi,
                recipe.admissibility_defect(a)
            ),
        ));
    }
    if !b.is_finite() {
        return Err(Error::invalid("b", "must be finite"));
    }
    Ok(())
}

/// The factors `F_i`, with the two middle shears merged when `v_{l-1}` is vertical.
pub fn factor_words(recipe: &SpreaderRecipe, a: f64, b: f64) -> Result<Vec<Factor>> {
    check_parameters(recipe, a, b)?;
    let l = recipe.l();
    let xi = recipe.xi_u32();
    let stages = &recipe.params.stages;
    let rot = Generator::translation(Vec2R::new(a, b))?;
    let forward = |i: usize| -> Result<LiftWord> {
        super::recipe::shear_block(&stages[i], -stages[i].eta, xi)
    };

    let mut out = Vec::with_capacity(2 * l + 1);
    if recipe.params.vertical_merge {
        for i in 0..l - 1 {
            out.push(Factor {
                from: i,
                to: i + 1,
                word: forward(i)?,
            });
        }
        let merged = Generator::shear(-2.0 * stages[l - 1].eta - 1.0, xi)?;
        out.push(Factor {
            from: l - 1,
            to: l + 2,
            word: LiftWord::from_generators(vec![rot, merged]),
        });
    } else {
        for i in 0..l {
            out.push(Factor {
                from: i,
                to: i + 1,
                word: forward(i)?,
            });
        }
        let middle = LiftWord::from_generators(vec![rot, Generator::shear(-1.0, xi)?]);
        out.push(Factor {
            from: l,
            to: l + 1,
            word: middle,
        });
        out.push(Factor {
            from: l + 1,
            to: l + 2,
            word: forward(l - 1)?.inverse(),
        });
    }
    for i in l + 2..=2 * l {
        out.push(Factor {
            from: i,
            to: i + 1,
            word: forward(2 * l - i)?.inverse(),
        });
    }
    Ok(out)
}

/// `F ∘ R_{(a,b)} ∘ F⁻¹` as a single unsimplified word.
pub fn conjugated_translation(recipe: &SpreaderRecipe, a: f64, b: f64) -> Result<LiftWord> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("a", "translation must be finite"));
    }
    let mut gens = recipe.f.generators().to_vec();
    gens.push(Generator::translation(Vec2R::new(a, b))?);
    gens.extend(recipe.f.inverse().generators().iter().copied());
    Ok(LiftWord::from_generators(gens))
}

/// `K₀ … K_{2l+1}`: stretches by `v_i/2`, the translation by `(a, b)`, then
/// the stretches again in reverse order.
pub fn k_sequence(recipe: &SpreaderRecipe, a: f64, b: f64) -> Result<Vec<ConvexPolygon>> {
    let l = recipe.l();
    let v = &recipe.params.v;
    let half = |i: usize| v[i].to_real() * 0.5;
    let mut ks = Vec::with_capacity(2 * l + 2);
    ks.push(ConvexPolygon::point(Vec2R::new(0.5, 0.5)));
    for i in 0..l {
        let next = ks[i].stretch(half(i))?;
        ks.push(next);
    }
    let shifted = ks[l].translate(Vec2R::new(a, b));
    ks.push(shifted);
    for i in l + 1..=2 * l {
        let next = ks[i].stretch(half(2 * l - i))?;
        ks.push(next);
    }
    Ok(ks)
}

/// Sample spacing used for `K_i` in the `K → D` checks.
fn k_spacing(k: &ConvexPolygon) -> f64 {
    (k.area() / 40_000.0).sqrt().max(0.05)
}

/// Normalized-target resolution for the final large-approximate check.
const TARGET_SAMPLES_ACROSS: u32 = 400;

/// Runs the stage-by-stage verification of `F ∘ R_{(a,b)} ∘ F⁻¹` on `dom`.
///
/// Every containment is checked with slack `2·(resolution hints)`: the
/// sampled `D_i` may miss points of the true set by its hint, and `K_i` is
/// sampled at a known spacing.
pub fn verify_stages(
    recipe: &SpreaderRecipe,
    a: f64,
    b: f64,
    dom: &FundamentalDomain,
) -> Result<StageTrace> {
    let factors = factor_words(recipe, a, b)?;
    let ks = k_sequence(recipe, a, b)?;
    let l = recipe.l();

    let mut clouds: Vec<Option<SampledSet>> = vec![None; 2 * l + 2];
    clouds[0] = Some(dom.sampled_set());
    for f in &factors {
        let next = clouds[f.from]
            .as_ref()
            .expect("factors are chained")
            .map(&f.word);
        clouds[f.to] = Some(next);
    }

    let mut stages = Vec::with_capacity(2 * l + 2);
    for (i, (k, d)) in ks.iter().zip(clouds).enumerate() {
        let d = d.map(SampledSet::into_samples);
        let (d_to_k, k_to_d) = match &d {
            Some(cloud) => {
                let (dk, kd) = containment_checks(k, cloud, i, l)?;
                (Some(dk), Some(kd))
            }
            None => (None, None),
        };
        stages.push(StageRecord {
            index: i,
            k: k.clone(),
            d,
            d_to_k,
            k_to_d,
        });
    }

    let last = stages.last().expect("at least two stages");
    let d_final = last.d.as_ref().expect("final stage is computed");
    let k_final = &last.k;
    let (dk, kd) = (
        last.d_to_k.expect("computed"),
        last.k_to_d.expect("computed"),
    );
    let final_hausdorff = if dk.value >= kd.value {
        Check::at_most(dk.value, 2.0, dk.slack.max(kd.slack))
    } else {
        Check::at_most(kd.value, 2.0, dk.slack.max(kd.slack))
    };
    let r = recipe.r;
    let final_diameter = Check::exceeds(
        diameter(d_final),
        6.0 * r + 6.0,
        2.0 * d_final.resolution_hint(),
    );

    let target = HomothetyRep::from_polygon(k_final, TARGET_SAMPLES_ACROSS)?;
    let approximation = large_approx_check(d_final, &target, r + 1.0);
    let approximation_verdict = match &approximation {
        Ok(_) => Verdict::Pass,
        Err(ApproxError::ShapeMismatch { r, best_gap, .. }) if *best_gap < 1.0 / r => {
            Verdict::Inconclusive
        }
        Err(ApproxError::Invalid(e)) => return Err(e.clone()),
        Err(_) => Verdict::Violated,
    };

    Ok(StageTrace {
        a,
        b,
        factors,
        stages,
        final_hausdorff,
        final_diameter,
        approximation,
        approximation_verdict,
    })
}

fn containment_checks(
    k: &ConvexPolygon,
    d: &PointCloud,
    i: usize,
    l: usize,
) -> Result<(Check, Check)> {
    let d_hint = d.resolution_hint();
    let d_to_k_bound = if i <= l { 1.0 } else { 2.0 };
    let d_to_k = Check::at_most(k.directed_from_cloud(d), d_to_k_bound, 2.0 * d_hint);

    let k_samples = k.sample(k_spacing(k))?;
    let k_to_d_bound = (i + 1) as f64 / (2 * l) as f64;
    let k_to_d = Check::at_most(
        directed_hausdorff(&k_samples, d),
        k_to_d_bound,
        2.0 * (d_hint + k_samples.resolution_hint()),
    );
    Ok((d_to_k, k_to_d))
}

/// Convenience: the admissible `a` closest to `target`.
pub fn nearest_admissible(recipe: &SpreaderRecipe, target: f64) -> f64 {
    let xi = recipe.xi as f64;
    let s = (target * xi - 0.5).round();
    recipe.admissible_a(s as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::spread_points;
    use crate::geom::Vec2Q;
    use crate::spreader::build_spreader;

    fn square() -> SpreaderRecipe {
        build_spreader(&[Vec2Q::from_ints(1, 0), Vec2Q::from_ints(0, 1)], 2.0).unwrap()
    }

    #[test]
    fn factor_layout() {
        let rec = square();
        let a = rec.admissible_a(0);
        let fs = factor_words(&rec, a, 0.3).unwrap();
        // Vertical v₁: F₀, merged middle, F₄.
        assert_eq!(fs.len(), 3);
        assert_eq!((fs[1].from, fs[1].to), (1, 4));
        assert_eq!(fs[2].word, fs[0].word.inverse());

        let hex = build_spreader(
            &[
                Vec2Q::from_ints(2, 0),
                Vec2Q::from_ints(1, 1),
                Vec2Q::from_ints(0, 1),
            ],
            2.0,
        )
        .unwrap();
        assert_eq!(
            factor_words(&hex, hex.admissible_a(1), 0.0).unwrap().len(),
            5
        );
    }

    #[test]
    fn inadmissible_a_is_rejected() {
        let rec = square();
        let err = factor_words(&rec, 0.3 + rec.admissible_a(0), 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidInput { field: "a", .. }));
    }

    #[test]
    fn factors_multiply_to_the_conjugated_translation() {
        let rec = square();
        let (a, b) = (rec.admissible_a(2), 0.37);
        let product = factor_words(&rec, a, b)
            .unwrap()
            .iter()
            .rev()
            .fold(LiftWord::identity(), |acc, f| acc.compose(&f.word));
        let direct = conjugated_translation(&rec, a, b).unwrap();
        for p in spread_points(500, 3.0) {
            let (x, y) = (product.apply(p), direct.apply(p));
            assert!((x - y).norm() <= 1e-9 * (1.0 + y.norm()), "{p}: {x} vs {y}");
        }
    }

    #[test]
    fn k_sequence_endpoints() {
        let rec = square();
        let (a, b) = (rec.admissible_a(0), 0.25);
        let ks = k_sequence(&rec, a, b).unwrap();
        assert_eq!(ks.len(), 6);
        assert!(ks[0].is_degenerate());
        // K₂ is the 8×8 square around (1/2, 1/2); K₃ its translate.
        assert!((ks[2].area() - 64.0).abs() < 1e-9);
        assert!((ks[3].center() - Vec2R::new(0.5 + a, 0.75)).norm() < 1e-12);
        // K₅ = (a+1/2, b+1/2) + Zon(v₀, v₁): the 16×16 square.
        assert!((ks[5].area() - 256.0).abs() < 1e-9);
        assert!((ks[5].center() - ks[3].center()).norm() < 1e-12);
    }

    #[test]
    fn first_stage_containment() {
        let rec = square();
        let dom = FundamentalDomain::new(21).unwrap();
        let trace = verify_stages(&rec, rec.admissible_a(0), 0.0, &dom).unwrap();
        let c = trace.stages[0].d_to_k.unwrap();
        assert!((c.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(trace.stages[0].k_to_d.unwrap().value, 0.0);
        assert!(trace.stages[2].d.is_none() && trace.stages[3].d.is_none());
    }

    #[test]
    fn check_verdicts() {
        assert_eq!(Check::at_most(1.0, 1.0, 0.1).verdict, Verdict::Pass);
        assert_eq!(
            Check::at_most(1.05, 1.0, 0.1).verdict,
            Verdict::Inconclusive
        );
        assert_eq!(Check::at_most(1.2, 1.0, 0.1).verdict, Verdict::Violated);
        assert_eq!(Check::exceeds(5.0, 4.0, 0.5).verdict, Verdict::Pass);
        assert_eq!(Check::exceeds(3.8, 4.0, 0.5).verdict, Verdict::Inconclusive);
        assert_eq!(Check::exceeds(3.0, 4.0, 0.5).verdict, Verdict::Violated);
    }
}
