//! Result records written by every command.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use torus_spread::geom::{ConvexPolygon, PolygonKind};
use torus_spread::homothety::{ApproxError, LargeApproxWitness};
use torus_spread::spreader::{Check, Relation, SpreaderRecipe, Verdict};

use crate::config::{word_spec, ExperimentConfig, GeneratorSpec};
use crate::values::{from_vec2q, point, points, Point, Rational, RationalPair, Real};

pub const FORMAT: &str = "torus-spread-record/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictName {
    Pass,
    Inconclusive,
    Violated,
}

impl From<Verdict> for VerdictName {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => VerdictName::Pass,
            Verdict::Inconclusive => VerdictName::Inconclusive,
            Verdict::Violated => VerdictName::Violated,
        }
    }
}

impl VerdictName {
    /// Process exit status for a run whose overall verdict is `self`.
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictName::Pass => 0,
            VerdictName::Violated => 2,
            VerdictName::Inconclusive => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictName::Pass => "pass",
            VerdictName::Inconclusive => "inconclusive",
            VerdictName::Violated => "violated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub value: Real,
    pub bound: Real,
    pub slack: Real,
    /// `at_most` (value ≤ bound) or `exceeds` (value > bound).
    pub relation: String,
    pub verdict: VerdictName,
}

impl CheckRecord {
    pub fn at_most(value: f64, bound: f64, slack: f64) -> Self {
        Check::at_most(value, bound, slack).into()
    }
}

impl From<Check> for CheckRecord {
    fn from(c: Check) -> Self {
        CheckRecord {
            value: Real(c.value),
            bound: Real(c.bound),
            slack: Real(c.slack),
            relation: match c.relation {
                Relation::AtMost => "at_most".into(),
                Relation::Exceeds => "exceeds".into(),
            },
            verdict: c.verdict.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonRecord {
    /// `point`, `segment` or `polygon`.
    pub kind: String,
    pub vertices: Vec<Point>,
}

impl From<&ConvexPolygon> for PolygonRecord {
    fn from(p: &ConvexPolygon) -> Self {
        PolygonRecord {
            kind: match p.kind() {
                PolygonKind::Point => "point",
                PolygonKind::Segment => "segment",
                PolygonKind::Proper => "polygon",
            }
            .into(),
            vertices: points(p.vertices()),
        }
    }
}

/// A cloud file referenced from a record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudRef {
    pub sha256: String,
    pub points: u64,
    pub resolution_hint: Real,
    /// Relative to the record's directory; absent when cloud files were not written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageParams {
    pub index: usize,
    /// Row-major entries of `A_i`.
    pub matrix: [i64; 4],
    pub eta: Rational,
    pub eta_real: Real,
    pub v: RationalPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecipeSummary {
    pub generators: Vec<RationalPair>,
    pub scale: u64,
    pub r: Real,
    pub l: usize,
    pub xi0: u64,
    pub xi: u64,
    pub stage_xi0: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0_without_first: Option<u64>,
    pub lambda: Real,
    pub eps_prime: Real,
    pub delta: Real,
    pub delta_prime: Real,
    pub vertical_merge: bool,
    pub stages: Vec<StageParams>,
    pub target: PolygonRecord,
    pub target_diameter: Real,
    pub shear_count: usize,
    /// The spreading map as a word, applied right to left.
    pub word: Vec<GeneratorSpec>,
}

impl RecipeSummary {
    pub fn new(recipe: &SpreaderRecipe) -> torus_spread::Result<Self> {
        let p = &recipe.params;
        let target = recipe.target_zonogon()?;
        Ok(RecipeSummary {
            generators: p.base_generators.iter().map(from_vec2q).collect(),
            scale: p.scale,
            r: Real(recipe.r),
            l: recipe.l(),
            xi0: p.xi0,
            xi: recipe.xi,
            stage_xi0: p.stage_xi0.clone(),
            xi0_without_first: p.xi0_without_first,
            lambda: Real(p.lambda),
            eps_prime: Real(p.eps_prime),
            delta: Real(p.delta),
            delta_prime: Real(p.delta_prime),
            vertical_merge: p.vertical_merge,
            stages: p
                .stages
                .iter()
                .map(|s| StageParams {
                    index: s.index,
                    matrix: s.a.entries(),
                    eta: Rational(s.eta_exact.clone()),
                    eta_real: Real(s.eta),
                    v: from_vec2q(&s.v),
                })
                .collect(),
            target_diameter: Real(target.diameter()),
            target: (&target).into(),
            shear_count: recipe.f.shear_count(),
            word: word_spec(&recipe.f),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub from: usize,
    pub to: usize,
    pub length: usize,
    pub shear_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub index: usize,
    pub k: PolygonRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<CloudRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_to_k: Option<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_to_d: Option<CheckRecord>,
}

/// Outcome of a large-approximate check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRecord {
    pub r: Real,
    pub verdict: VerdictName,
    /// Best gap against `1/r`, with the sampling slack.
    pub check: Option<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_step: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ApproxRecord {
    pub fn new(r: f64, verdict: Verdict, result: &Result<LargeApproxWitness, ApproxError>) -> Self {
        let mut rec = ApproxRecord {
            r: Real(r),
            verdict: verdict.into(),
            check: None,
            scale: None,
            translation: None,
            search_step: None,
            error: None,
        };
        match result {
            Ok(w) => {
                rec.check = Some(CheckRecord::at_most(
                    w.achieved_gap,
                    1.0 / r,
                    w.sampling_slack,
                ));
                rec.scale = Some(Real(w.scale));
                rec.translation = Some(point(w.translation));
                rec.search_step = Some(Real(w.search_step));
            }
            Err(e) => {
                if let ApproxError::ShapeMismatch {
                    best_gap,
                    sampling_slack,
                    translation,
                    ..
                } = e
                {
                    rec.check = Some(CheckRecord::at_most(*best_gap, 1.0 / r, *sampling_slack));
                    rec.translation = Some(point(*translation));
                }
                rec.error = Some(e.to_string());
            }
        }
        rec
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityDefect {
    pub seed: u64,
    pub samples: usize,
    /// Largest `|F_{2l}∘…∘F_0(x) − F R_{(a,b)} F⁻¹(x)|` over the samples.
    pub max_defect: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub a: Real,
    pub b: Real,
    pub admissibility_defect: Real,
    pub resolution: u32,
    pub factors: Vec<FactorRecord>,
    pub stages: Vec<StageEntry>,
    pub final_hausdorff: CheckRecord,
    pub final_diameter: CheckRecord,
    pub approximation: ApproxRecord,
    pub factor_identity: IdentityDefect,
    pub verdict: VerdictName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub n: usize,
    pub hull: PolygonRecord,
    pub diameter: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedRecord {
    pub subsequence: Vec<usize>,
    pub diam_trace: Vec<Real>,
    pub cauchy_gap: Real,
    pub diameter_grows: bool,
    /// Hulls of the normalized clouds.
    pub hulls: Vec<PolygonRecord>,
    pub clouds: Vec<CloudRef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRecord {
    pub v: Point,
    pub rho: Point,
    pub deviations: Vec<Real>,
    pub max: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationRecord {
    pub map_length: usize,
    pub shear_count: usize,
    pub resolution: u32,
    pub displacement_bound: Real,
    pub estimates: Vec<EstimateRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generalized: Option<GeneralizedRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<Vec<Real>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub i: u64,
    pub iterates: u64,
    pub theta: Point,
    pub alpha: Point,
    /// `|θ_i − (p/q, 0)|`.
    pub theta_distance: Real,
    pub diameter: Real,
    /// Hull of the normalized cloud `(f^{t_i}(D) − f^{t_i}(x₀)) / diam`.
    pub hull: PolygonRecord,
    pub cloud: CloudRef,
    /// Large-approximate check of the iterate against the target at `ℓ`.
    pub approximation: ApproxRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub p: i64,
    pub q: u32,
    pub ell: Real,
    pub level: Real,
    pub linear_level: Real,
    pub recipe: RecipeSummary,
    /// Commutation of `h` with `R_{(1/q, 0)}`.
    pub equivariance: CheckRecord,
    /// The original target zonogon scaled to unit diameter.
    pub normalized_target: PolygonRecord,
    pub members: Vec<MemberRecord>,
    /// Pass when `|θ_i − (p/q, 0)|` strictly decreases.
    pub theta_monotone: VerdictName,
    pub verdict: VerdictName,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub eps: Real,
    pub radius: Real,
    pub steps: usize,
    pub u_points: usize,
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clouds: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub format: String,
    pub command: String,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<RecipeSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeRecord>,
    pub verdict: VerdictName,
    pub artifacts: Artifacts,
    /// Wall-clock seconds per phase; the only field that varies between identical runs.
    pub timings: BTreeMap<String, Real>,
}

impl ResultRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }

    /// The record with timings cleared, for comparing runs.
    pub fn without_timings(&self) -> ResultRecord {
        ResultRecord {
            timings: BTreeMap::new(),
            ..self.clone()
        }
    }
}
