//! Command pipelines: each turns an [`ExperimentConfig`] into a [`ResultRecord`]
//! plus the cloud files and SVG it references.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torus_spread::dynamics::{
    equivariance_check, FundamentalDomain, LiftWord, EQUIVARIANCE_SAMPLES,
};
use torus_spread::geom::{minkowski_zonogon, ConvexPolygon, PointCloud, Vec2R};
use torus_spread::homothety::{large_approx_check, ApproxError, HomothetyRep, LargeApproxWitness};
use torus_spread::rotation::{
    deviation_profile, displacement_bound, generalized_rot_estimate, rigidity_profile,
    rotation_set_estimate, weak_spreading_probe,
};
use torus_spread::spreader::{
    build_commuting_family, build_spreader_with_xi, conjugated_translation, verify_stages,
    SpreaderRecipe, StageTrace, Verdict,
};

use crate::cloudfile;
use crate::config::{Command, ConfigError, ExperimentConfig, MapSpec, ShiftSpec, DEFAULT_MEMBERS};
use crate::output::{write_atomic, WriteError};
use crate::record::*;
use crate::svg::{render_hull_series, render_trace, HullLayer, StageLayer, SvgError};
use crate::values::{point, vec2, Real};

/// Iterate counts used by `rotate` when the config gives none.
pub const DEFAULT_ITERATES: [usize; 2] = [10, 100];
/// Sample spacings per unit diameter for target shapes in large-approximate checks.
pub const TARGET_SAMPLES_ACROSS: u32 = 400;
/// Random points used to compare the factor chain with the conjugated translation.
pub const IDENTITY_SAMPLES: usize = 256;
/// Tolerance for `h` commuting with `R_{(1/q, 0)}`.
pub const FAMILY_EQUIVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] torus_spread::Error),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error("cannot read `{}`: {reason}", path.display())]
    Read { path: PathBuf, reason: String },
    #[error("rendering failed: {0}")]
    Svg(#[from] SvgError),
}

impl RunError {
    /// The config or input field the error is about, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            RunError::Config(e) => Some(&e.field),
            RunError::Core(torus_spread::Error::InvalidInput { field, .. }) => Some(field),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Where records, clouds and SVG go; nothing is written when absent.
    pub out_dir: Option<PathBuf>,
    /// Directory that relative `input` paths are resolved against.
    pub config_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: ResultRecord,
    pub exit_code: i32,
    /// One-line human-readable result.
    pub summary: String,
}

/// Artifact bookkeeping shared by the pipelines.
struct Sink<'a> {
    out: Option<&'a Path>,
    write_clouds: bool,
    artifacts: Artifacts,
    timings: BTreeMap<String, Real>,
}

impl Sink<'_> {
    fn cloud(&mut self, cloud: &PointCloud) -> Result<CloudRef, RunError> {
        let bytes = cloudfile::encode(cloud.points());
        let sha256 = cloudfile::content_hash(&bytes);
        let mut path = None;
        if let (Some(out), true) = (self.out, self.write_clouds) {
            let rel = format!("clouds/{sha256}.{}", cloudfile::EXTENSION);
            write_atomic(&out.join(&rel), &bytes)?;
            if !self.artifacts.clouds.contains(&rel) {
                self.artifacts.clouds.push(rel.clone());
            }
            path = Some(rel);
        }
        Ok(CloudRef {
            sha256,
            points: cloud.len() as u64,
            resolution_hint: Real(cloud.resolution_hint()),
            path,
        })
    }

    fn svg(&mut self, rel: &Path, doc: &str) -> Result<(), RunError> {
        if let Some(out) = self.out {
            write_atomic(&out.join(rel), doc.as_bytes())?;
            self.artifacts.svg = Some(rel.to_string_lossy().replace('\\', "/"));
        }
        Ok(())
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        self.timings
            .insert(phase.into(), Real(start.elapsed().as_secs_f64()));
        v
    }
}

/// Executes the config's command and writes its artifacts.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let command = config.command()?;
    let mut sink = Sink {
        out: opts.out_dir.as_deref(),
        write_clouds: config.outputs.clouds,
        artifacts: Artifacts::default(),
        timings: BTreeMap::new(),
    };
    let mut record = ResultRecord {
        format: FORMAT.into(),
        command: command.as_str().into(),
        config: config.clone(),
        recipe: None,
        verification: None,
        rotation: None,
        family: None,
        probe: None,
        verdict: VerdictName::Pass,
        artifacts: Artifacts::default(),
        timings: BTreeMap::new(),
    };
    let total = Instant::now();
    let (exit_code, summary) = match command {
        Command::Build => build(config, &mut record, &mut sink)?,
        Command::Verify => verify(config, &mut record, &mut sink)?,
        Command::Rotate => rotate(config, &mut record, &mut sink)?,
        Command::Probe => probe(config, &mut record, &mut sink)?,
        Command::Render => render(config, opts, &mut record, &mut sink)?,
    };
    sink.timings
        .insert("total".into(), Real(total.elapsed().as_secs_f64()));
    if let Some(out) = opts.out_dir.as_deref() {
        sink.artifacts.record = Some(config.outputs.record.to_string_lossy().replace('\\', "/"));
        record.artifacts = sink.artifacts;
        record.timings = sink.timings;
        write_atomic(
            &out.join(&config.outputs.record),
            record.to_json().as_bytes(),
        )?;
    } else {
        record.artifacts = sink.artifacts;
        record.timings = sink.timings;
    }
    Ok(RunOutcome {
        record,
        exit_code,
        summary,
    })
}

fn recipe(config: &ExperimentConfig) -> Result<SpreaderRecipe, RunError> {
    let gens = config.generators()?;
    build_spreader_with_xi(&gens, config.r(), config.xi_override).map_err(|e| match e {
        torus_spread::Error::InvalidInput {
            field: "xi",
            reason,
        } => ConfigError {
            field: "xi_override".into(),
            reason,
        }
        .into(),
        e => e.into(),
    })
}

fn domain(config: &ExperimentConfig) -> Result<FundamentalDomain, RunError> {
    Ok(match config.basepoint() {
        Some(b) => FundamentalDomain::with_basepoint(config.resolution, b)?,
        None => FundamentalDomain::new(config.resolution)?,
    })
}

fn shift(config: &ExperimentConfig, recipe: &SpreaderRecipe) -> f64 {
    match &config.a {
        None => recipe.admissible_a(0),
        Some(ShiftSpec::Index(s)) => recipe.admissible_a(*s),
        Some(ShiftSpec::Value(a)) => a.0,
    }
}

fn build(
    config: &ExperimentConfig,
    record: &mut ResultRecord,
    sink: &mut Sink,
) -> Result<(i32, String), RunError> {
    let recipe = sink.time("build", || recipe(config))?;
    let summary = RecipeSummary::new(&recipe)?;
    let line = format!(
        "build: l = {}, ξ₀ = {}, ξ = {}, scale = {}, {} shears",
        summary.l, summary.xi0, summary.xi, summary.scale, summary.shear_count
    );
    record.recipe = Some(summary);
    Ok((0, line))
}

fn approx_verdict(result: &Result<LargeApproxWitness, ApproxError>) -> Result<Verdict, RunError> {
    Ok(match result {
        Ok(_) => Verdict::Pass,
        Err(ApproxError::ShapeMismatch { r, best_gap, .. }) if *best_gap < 1.0 / r => {
            Verdict::Inconclusive
        }
        Err(ApproxError::Invalid(e)) => return Err(e.clone().into()),
        Err(_) => Verdict::Violated,
    })
}

/// Largest distance between chaining the factors and applying the
/// conjugated translation directly, over seeded random points of `[0, 1]²`.
fn factor_identity(
    recipe: &SpreaderRecipe,
    trace: &StageTrace,
    seed: u64,
) -> Result<IdentityDefect, RunError> {
    let direct = conjugated_translation(recipe, trace.a, trace.b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..IDENTITY_SAMPLES {
        let x = Vec2R::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let chained = trace.factors.iter().fold(x, |p, f| f.word.apply(p));
        worst = worst.max((chained - direct.apply(x)).norm());
    }
    Ok(IdentityDefect {
        seed,
        samples: IDENTITY_SAMPLES,
        max_defect: Real(worst),
    })
}

fn verify(
    config: &ExperimentConfig,
    record: &mut ResultRecord,
    sink: &mut Sink,
) -> Result<(i32, String), RunError> {
    let recipe = sink.time("build", || recipe(config))?;
    let dom = domain(config)?;
    let a = shift(config, &recipe);
    let b = config.b();
    let trace = sink.time("verify", || verify_stages(&recipe, a, b, &dom))?;
    record.recipe = Some(RecipeSummary::new(&recipe)?);

    let mut stages = Vec::with_capacity(trace.stages.len());
    for s in &trace.stages {
        stages.push(StageEntry {
            index: s.index,
            k: (&s.k).into(),
            d: s.d.as_ref().map(|d| sink.cloud(d)).transpose()?,
            d_to_k: s.d_to_k.map(Into::into),
            k_to_d: s.k_to_d.map(Into::into),
        });
    }
    let verdict = trace.verdict();
    let first_violation = trace.first_violation();
    let approximation = ApproxRecord::new(
        recipe.r + 1.0,
        trace.approximation_verdict,
        &trace.approximation,
    );
    let verification = VerificationRecord {
        a: Real(a),
        b: Real(b),
        admissibility_defect: Real(recipe.admissibility_defect(a)),
        resolution: config.resolution,
        factors: trace
            .factors
            .iter()
            .map(|f| FactorRecord {
                from: f.from,
                to: f.to,
                length: f.word.len(),
                shear_count: f.word.shear_count(),
            })
            .collect(),
        stages,
        final_hausdorff: trace.final_hausdorff.into(),
        final_diameter: trace.final_diameter.into(),
        approximation,
        factor_identity: factor_identity(&recipe, &trace, config.seed)?,
        verdict: verdict.into(),
        first_violation,
    };

    if let Some(rel) = &config.outputs.svg {
        let layers: Vec<StageLayer> = trace
            .stages
            .iter()
            .map(|s| StageLayer {
                index: s.index,
                polygon: s.k.vertices().to_vec(),
                cloud: s.d.as_ref().map(|d| d.points().to_vec()),
                d_to_k: s.d_to_k.map(|c| c.value),
                k_to_d: s.k_to_d.map(|c| c.value),
            })
            .collect();
        let doc = sink.time("render", || render_trace(&layers))?;
        sink.svg(rel, &doc)?;
    }

    let line = describe_verification(&verification);
    record.verdict = verification.verdict;
    record.verification = Some(verification);
    Ok((record.verdict.exit_code(), line))
}

fn describe_verification(v: &VerificationRecord) -> String {
    let mut line = format!(
        "verify: {} (final d_H {:.4} vs {}, diameter {:.4}, large approximate {})",
        v.verdict.as_str(),
        v.final_hausdorff.value.0,
        v.final_hausdorff.bound.0,
        v.final_diameter.value.0,
        v.approximation.verdict.as_str(),
    );
    if let Some(i) = v.first_violation {
        line.push_str(&format!("; first violated stage {i}"));
    } else if v.verdict != VerdictName::Pass {
        let worst = v
            .stages
            .iter()
            .flat_map(|s| [("D→K", s.index, &s.d_to_k), ("K→D", s.index, &s.k_to_d)])
            .filter_map(|(name, i, c)| c.as_ref().map(|c| (name, i, c)))
            .find(|(_, _, c)| c.verdict != VerdictName::Pass);
        if let Some((name, i, c)) = worst {
            line.push_str(&format!(
                "; stage {i} {name} {:.4} > {:.4} within slack {:.4}",
                c.value.0, c.bound.0, c.slack.0
            ));
        }
    }
    line
}

/// A single map named by the config.
fn single_map(config: &ExperimentConfig) -> Result<LiftWord, RunError> {
    Ok(match config.map_spec()? {
        MapSpec::Word { generators } => LiftWord::from_generators(
            generators
                .iter()
                .map(|g| g.to_generator())
                .collect::<Result<_, _>>()?,
        ),
        MapSpec::Spreader => recipe(config)?.f,
        MapSpec::ConjugatedTranslation => {
            let recipe = recipe(config)?;
            conjugated_translation(&recipe, shift(config, &recipe), config.b())?
        }
        MapSpec::Family => {
            return Err(ConfigError {
                field: "map".into(),
                reason: "family maps are handled by rotate only".into(),
            }
            .into())
        }
    })
}

fn rotate(
    config: &ExperimentConfig,
    record: &mut ResultRecord,
    sink: &mut Sink,
) -> Result<(i32, String), RunError> {
    if matches!(config.map_spec()?, MapSpec::Family) {
        return rotate_family(config, record, sink);
    }
    let map = sink.time("build", || single_map(config))?;
    let dom = domain(config)?;
    let iterates = config
        .iterates
        .clone()
        .unwrap_or_else(|| DEFAULT_ITERATES.to_vec());

    let estimates = sink.time("estimates", || {
        iterates
            .iter()
            .map(|&n| rotation_set_estimate(&map, n, &dom))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let generalized = match &config.subsequence {
        Some(sub) => {
            let est = sink.time("generalized", || generalized_rot_estimate(&map, sub, &dom))?;
            let mut hulls = Vec::new();
            let mut clouds = Vec::new();
            for c in &est.clouds {
                hulls.push((&ConvexPolygon::hull_of(c.points())?).into());
                clouds.push(sink.cloud(c)?);
            }
            Some(GeneralizedRecord {
                subsequence: est.subsequence.clone(),
                diam_trace: est.diam_trace.iter().copied().map(Real).collect(),
                cauchy_gap: Real(est.cauchy_gap),
                diameter_grows: est.diameter_grows,
                hulls,
                clouds,
            })
        }
        None => None,
    };
    let deviation = match &config.deviation {
        Some(d) => {
            let prof = sink.time("deviation", || {
                deviation_profile(&map, vec2(&d.v), vec2(&d.rho), d.steps, &dom)
            })?;
            Some(DeviationRecord {
                v: d.v,
                rho: d.rho,
                max: Real(prof.max()),
                deviations: prof.deviations.into_iter().map(Real).collect(),
            })
        }
        None => None,
    };
    let rigidity = match config.rigidity_steps {
        Some(n) => Some(
            sink.time("rigidity", || rigidity_profile(&map, n, &dom))?
                .into_iter()
                .map(Real)
                .collect(),
        ),
        None => None,
    };

    if let Some(rel) = &config.outputs.svg {
        let layers: Vec<HullLayer> = estimates
            .iter()
            .map(|e| HullLayer {
                label: format!("n = {}", e.n),
                hull: e.hull.vertices().to_vec(),
            })
            .collect();
        sink.svg(rel, &render_hull_series(&layers, None)?)?;
    }

    let last = estimates.last().expect("iterates are non-empty");
    let line = format!(
        "rotate: {} estimates, hull diameter {:.6} at n = {}",
        estimates.len(),
        last.diameter,
        last.n
    );
    record.rotation = Some(RotationRecord {
        map_length: map.len(),
        shear_count: map.shear_count(),
        resolution: config.resolution,
        displacement_bound: Real(displacement_bound(&map, &dom)),
        estimates: estimates
            .iter()
            .map(|e| EstimateRecord {
                n: e.n,
                hull: (&e.hull).into(),
                diameter: Real(e.diameter),
            })
            .collect(),
        generalized,
        deviation,
        rigidity,
    });
    Ok((0, line))
}

fn rotate_family(
    config: &ExperimentConfig,
    record: &mut ResultRecord,
    sink: &mut Sink,
) -> Result<(i32, String), RunError> {
    let gens = config.generators()?;
    let (p, q) = (config.p.expect("validated"), config.q.expect("validated"));
    let ell = config.ell.expect("validated").0;
    let fam = sink.time("build", || build_commuting_family(p, q, &gens, ell))?;
    let dom = domain(config)?;

    let shift = Vec2R::new(1.0 / q as f64, 0.0);
    let defect = equivariance_check(&fam.h, &[shift, -shift], EQUIVARIANCE_SAMPLES);
    let equivariance = CheckRecord::at_most(defect, FAMILY_EQUIVARIANCE_TOL, 0.0);

    let target = minkowski_zonogon(&gens)?;
    let target_rep = HomothetyRep::from_polygon(&target, TARGET_SAMPLES_ACROSS)?;
    let limit = Vec2R::new(p as f64 / q as f64, 0.0);

    let count = config.members.unwrap_or(DEFAULT_MEMBERS);
    let mut members = Vec::with_capacity(count as usize);
    let mut last_translation = Vec2R::ZERO;
    for i in 1..=count {
        let member = fam.member(i)?;
        let t = fam.iterate_count(i)?;
        let (est, approx) = sink.time(&format!("member_{i}"), || {
            let est = generalized_rot_estimate(&member, &[t as usize], &dom)?;
            // Undo the normalization; the check rescales by the diameter itself.
            let raw = est.clouds[0].scale(est.diam_trace[0]);
            let approx = large_approx_check(&raw, &target_rep, ell);
            Ok::<_, RunError>((est, approx))
        })?;
        let normalized = &est.clouds[0];
        let verdict = approx_verdict(&approx)?;
        if let Ok(w) = &approx {
            last_translation = w.translation;
        }
        let theta = fam.theta(i)?;
        members.push(MemberRecord {
            i,
            iterates: t,
            theta: point(theta),
            alpha: point(fam.alpha(i)?),
            theta_distance: Real((theta - limit).norm()),
            diameter: Real(est.diam_trace[0]),
            hull: (&ConvexPolygon::hull_of(normalized.points())?).into(),
            cloud: sink.cloud(normalized)?,
            approximation: ApproxRecord::new(ell, verdict, &approx),
        });
    }
    let monotone = members
        .windows(2)
        .all(|w| w[1].theta_distance.0 < w[0].theta_distance.0);
    let theta_monotone = if monotone {
        VerdictName::Pass
    } else {
        VerdictName::Violated
    };

    // The witnesses place the normalized cloud near `target shape + t`.
    let shape_hull =
        ConvexPolygon::hull_of(target_rep.shape().points())?.translate(last_translation);

    if let Some(rel) = &config.outputs.svg {
        let layers: Vec<HullLayer> = members
            .iter()
            .map(|m| HullLayer {
                label: format!("member {} (n = {})", m.i, m.iterates),
                hull: m.hull.vertices.iter().map(vec2).collect(),
            })
            .collect();
        let doc = render_hull_series(&layers, Some(shape_hull.vertices()))?;
        sink.svg(rel, &doc)?;
    }

    let verdict = members
        .iter()
        .map(|m| m.approximation.verdict)
        .chain([equivariance.verdict, theta_monotone])
        .max()
        .unwrap_or(VerdictName::Pass);
    let line = format!(
        "rotate family {p}/{q}: {} (equivariance defect {defect:.2e}, {} members)",
        verdict.as_str(),
        members.len()
    );
    record.family = Some(FamilyRecord {
        p,
        q,
        ell: Real(ell),
        level: Real(fam.level),
        linear_level: Real(fam.linear_level),
        recipe: RecipeSummary::new(&fam.recipe)?,
        equivariance,
        normalized_target: (&shape_hull).into(),
        members,
        theta_monotone,
        verdict,
    });
    record.verdict = verdict;
    Ok((verdict.exit_code(), line))
}

fn probe(
    config: &ExperimentConfig,
    record: &mut ResultRecord,
    sink: &mut Sink,
) -> Result<(i32, String), RunError> {
    let spec = config.probe.as_ref().expect("validated");
    let map = sink.time("build", || single_map(config))?;
    let center = vec2(&spec.u_center);
    let (radius, spacing) = (spec.u_radius.0, spec.u_spacing.0);
    let m = (radius / spacing).floor() as i64;
    let mut u = Vec::new();
    for j in -m..=m {
        for i in -m..=m {
            let o = Vec2R::new(i as f64 * spacing, j as f64 * spacing);
            if o.norm() <= radius {
                u.push(center + o);
            }
        }
    }
    let cloud = PointCloud::new(u, spacing * std::f64::consts::FRAC_1_SQRT_2)?;
    let witness = sink.time("probe", || {
        weak_spreading_probe(&map, &cloud, spec.eps.0, spec.radius.0, spec.steps)
    })?;
    let (verdict, line) = match witness {
        Some(w) => (
            VerdictName::Pass,
            format!(
                "probe: ε-dense ball of radius {} found at n = {}",
                spec.radius.0, w.n
            ),
        ),
        None => (
            VerdictName::Inconclusive,
            format!("probe: no ε-dense ball found within {} steps", spec.steps),
        ),
    };
    record.probe = Some(ProbeRecord {
        eps: spec.eps,
        radius: spec.radius,
        steps: spec.steps,
        u_points: cloud.len(),
        found: witness.is_some(),
        n: witness.map(|w| w.n),
        center: witness.map(|w| point(w.center)),
    });
    record.verdict = verdict;
    Ok((verdict.exit_code(), line))
}

fn read_cloud(base: &Path, c: &CloudRef) -> Result<Vec<Vec2R>, RunError> {
    let rel = c.path.as_ref().ok_or_else(|| RunError::Read {
        path: base.to_path_buf(),
        reason: format!("cloud {} was not written with the record", c.sha256),
    })?;
    let path = base.join(rel);
    let bytes = std::fs::read(&path).map_err(|e| RunError::Read {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    if cloudfile::content_hash(&bytes) != c.sha256 {
        return Err(RunError::Read {
            path,
            reason: "content hash does not match the record".into(),
        });
    }
    cloudfile::decode(&bytes).map_err(|e| RunError::Read {
        path,
        reason: e.to_string(),
    })
}

fn render(
    config: &ExperimentConfig,
    opts: &RunOptions,
    record: &mut ResultRecord,
    sink: &mut Sink,
) -> Result<(i32, String), RunError> {
    let input = opts
        .config_dir
        .join(config.input.as_ref().expect("validated"));
    let text = std::fs::read_to_string(&input).map_err(|e| RunError::Read {
        path: input.clone(),
        reason: e.to_string(),
    })?;
    let source: ResultRecord = serde_json::from_str(&text).map_err(|e| RunError::Read {
        path: input.clone(),
        reason: e.to_string(),
    })?;
    let base = input.parent().unwrap_or(Path::new(".")).to_path_buf();

    let doc = if let Some(v) = &source.verification {
        let mut layers = Vec::with_capacity(v.stages.len());
        for s in &v.stages {
            layers.push(StageLayer {
                index: s.index,
                polygon: s.k.vertices.iter().map(vec2).collect(),
                cloud: s.d.as_ref().map(|c| read_cloud(&base, c)).transpose()?,
                d_to_k: s.d_to_k.as_ref().map(|c| c.value.0),
                k_to_d: s.k_to_d.as_ref().map(|c| c.value.0),
            });
        }
        render_trace(&layers)?
    } else if let Some(f) = &source.family {
        let layers: Vec<HullLayer> = f
            .members
            .iter()
            .map(|m| HullLayer {
                label: format!("member {} (n = {})", m.i, m.iterates),
                hull: m.hull.vertices.iter().map(vec2).collect(),
            })
            .collect();
        let target: Vec<Vec2R> = f.normalized_target.vertices.iter().map(vec2).collect();
        render_hull_series(&layers, Some(&target))?
    } else if let Some(r) = &source.rotation {
        let layers: Vec<HullLayer> = r
            .estimates
            .iter()
            .map(|e| HullLayer {
                label: format!("n = {}", e.n),
                hull: e.hull.vertices.iter().map(vec2).collect(),
            })
            .collect();
        render_hull_series(&layers, None)?
    } else {
        return Err(RunError::Read {
            path: input,
            reason: "record has no stage trace or rotation estimates to draw".into(),
        });
    };
    let rel = config
        .outputs
        .svg
        .clone()
        .unwrap_or_else(|| PathBuf::from("render.svg"));
    sink.svg(&rel, &doc)?;
    record.verdict = VerdictName::Pass;
    Ok((
        0,
        format!(
            "render: {} bytes of SVG from {}",
            doc.len(),
            input.display()
        ),
    ))
}
