use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command as Process;

use proptest::prelude::*;

use torus_spread::geom::Vec2R;
use torus_spread_cli::cloudfile;
use torus_spread_cli::config::{Command, ExperimentConfig};
use torus_spread_cli::record::{ResultRecord, VerdictName};
use torus_spread_cli::{run, RunOptions};

const BIN: &str = env!("CARGO_BIN_EXE_torus-spread");

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).unwrap()
}

fn square_verify(resolution: u32) -> ExperimentConfig {
    config(&format!(
        r#"{{"command": "verify", "generators": [[1, 0], [0, 1]], "r": 2,
            "resolution": {resolution}, "a": {{"index": 0}}, "b": 0.25, "seed": 3,
            "outputs": {{"record": "rec.json", "svg": "trace.svg"}}}}"#
    ))
}

fn in_memory() -> RunOptions {
    RunOptions::default()
}

fn write_config(dir: &Path, name: &str, cfg: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, cfg).unwrap();
    p
}

/// Record text with the trailing timings object cut off.
fn without_timings(text: &str) -> &str {
    &text[..text.find("\"timings\"").expect("records end with timings")]
}

#[test]
fn build_of_the_square_has_two_generators() {
    let out = run(
        &config(r#"{"command": "build", "generators": [[1, 0], [0, 1]], "r": 2}"#),
        &in_memory(),
    )
    .unwrap();
    let recipe = out.record.recipe.unwrap();
    assert_eq!(recipe.l, 2);
    assert_eq!(recipe.eps_prime.0, 1.0 / (2.0 * recipe.l as f64));
    assert_eq!(out.exit_code, 0);
}

#[test]
fn inadmissible_a_is_reported_by_name() {
    let mut cfg = square_verify(20);
    cfg.a = Some(torus_spread_cli::config::ShiftSpec::Value(0.25.into()));
    let built = run(
        &config(r#"{"command": "build", "generators": [[1, 0], [0, 1]]}"#),
        &in_memory(),
    )
    .unwrap();
    let xi = built.record.recipe.unwrap().xi as f64;
    // a ∈ 1/(2ξ) + (1/ξ)Z exactly when 2ξa is an odd integer.
    let admissible = |a: f64| {
        let t = 2.0 * xi * a;
        t.fract() == 0.0 && (t as i64).rem_euclid(2) == 1
    };
    assert!(!admissible(0.25));
    assert!(admissible(3.0 / (2.0 * xi)));
    let err = run(&cfg, &in_memory()).unwrap_err();
    assert_eq!(err.field(), Some("a"), "{err}");

    cfg.a = Some(torus_spread_cli::config::ShiftSpec::Value(
        (3.0 / (2.0 * xi)).into(),
    ));
    assert!(run(&cfg, &in_memory()).is_ok());
}

#[test]
fn empty_generator_list_is_a_schema_error() {
    let err = run(
        &config(r#"{"command": "build", "generators": []}"#),
        &in_memory(),
    )
    .unwrap_err();
    assert_eq!(err.field(), Some("generators"));
    let err = run(&config(r#"{"command": "build"}"#), &in_memory()).unwrap_err();
    assert_eq!(err.field(), Some("generators"));
}

#[test]
fn zero_generator_and_bad_resolution_are_named() {
    let err = run(
        &config(r#"{"command": "build", "generators": [[0, 0]]}"#),
        &in_memory(),
    )
    .unwrap_err();
    assert_eq!(err.field(), Some("generators"));
    let err = run(
        &config(r#"{"command": "verify", "generators": [[1, 0]], "resolution": 1}"#),
        &in_memory(),
    )
    .unwrap_err();
    assert_eq!(err.field(), Some("resolution"));
}

#[test]
fn low_xi_override_names_the_flag() {
    let cfg = config(r#"{"command": "build", "generators": [[1, 0], [0, 1]], "xi_override": 2}"#);
    assert_eq!(
        run(&cfg, &in_memory()).unwrap_err().field(),
        Some("xi_override")
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cloud_files_round_trip_bit_exactly(bits in prop::collection::vec((any::<u64>(), any::<u64>()), 0..200)) {
        let pts: Vec<Vec2R> = bits
            .iter()
            .map(|&(x, y)| Vec2R::new(f64::from_bits(x), f64::from_bits(y)))
            .collect();
        let bytes = cloudfile::encode(&pts);
        prop_assert_eq!(&bytes[..8], b"TCLOUD01");
        prop_assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), pts.len() as u64);
        let back = cloudfile::decode(&bytes).unwrap();
        prop_assert_eq!(back.len(), pts.len());
        for (a, b) in pts.iter().zip(&back) {
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
        prop_assert_eq!(cloudfile::encode(&back), bytes);
    }
}

fn assert_self_contained_svg(text: &str) -> roxmltree::Document<'_> {
    let doc = roxmltree::Document::parse(text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    for n in doc.descendants() {
        for a in n.attributes() {
            assert!(
                !a.name().contains("href"),
                "external reference {}",
                a.name()
            );
            assert!(
                !a.value().contains("url("),
                "external reference {}",
                a.value()
            );
        }
    }
    doc
}

#[test]
fn verify_writes_hashed_clouds_and_a_trace_svg() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    let out = run(&square_verify(30), &opts).unwrap();

    let text = std::fs::read_to_string(dir.path().join("rec.json")).unwrap();
    let rec: ResultRecord = serde_json::from_str(&text).unwrap();
    let v = rec.verification.as_ref().unwrap();
    let l = rec.recipe.as_ref().unwrap().l;
    assert_eq!(v.stages.len(), 2 * l + 2);
    for s in &v.stages {
        if let Some(c) = &s.d {
            let bytes = std::fs::read(dir.path().join(c.path.as_ref().unwrap())).unwrap();
            assert_eq!(cloudfile::content_hash(&bytes), c.sha256);
            assert_eq!(cloudfile::decode(&bytes).unwrap().len() as u64, c.points);
        }
    }
    assert_eq!(out.exit_code, v.verdict.exit_code());

    let svg = std::fs::read_to_string(dir.path().join("trace.svg")).unwrap();
    let doc = assert_self_contained_svg(&svg);
    let stage_groups = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("stage"))
        .count();
    assert_eq!(stage_groups, 2 * l + 2);
    // K₀ is a single point and is drawn as a marker inside the first stage.
    let first = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("stage-0"))
        .unwrap();
    assert!(first
        .descendants()
        .any(|n| n.attribute("class") == Some("marker")));
    assert!(!first.descendants().any(|n| n.tag_name().name() == "path"));
    assert!(!svg.contains("NaN"));
}

#[test]
fn render_reproduces_the_trace_from_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    run(&square_verify(24), &opts).unwrap();
    let direct = std::fs::read_to_string(dir.path().join("trace.svg")).unwrap();

    let render = config(
        r#"{"command": "render", "input": "rec.json",
            "outputs": {"record": "render.json", "svg": "again.svg"}}"#,
    );
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        config_dir: dir.path().to_path_buf(),
    };
    run(&render, &opts).unwrap();
    let again = std::fs::read_to_string(dir.path().join("again.svg")).unwrap();
    assert_eq!(direct, again);
}

#[test]
fn render_rejects_a_tampered_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    let out = run(&square_verify(12), &opts).unwrap();
    let cloud = &out.record.artifacts.clouds[0];
    let path = dir.path().join(cloud);
    let mut bytes = std::fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    std::fs::write(&path, bytes).unwrap();
    let render = config(r#"{"command": "render", "input": "rec.json"}"#);
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        config_dir: dir.path().to_path_buf(),
    };
    let err = run(&render, &opts).unwrap_err();
    assert!(err.to_string().contains("hash"), "{err}");
}

#[test]
fn identical_configs_give_identical_records() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let opts = RunOptions {
            out_dir: Some(d.path().to_path_buf()),
            ..Default::default()
        };
        run(&square_verify(30), &opts).unwrap();
    }
    let ta = std::fs::read_to_string(a.path().join("rec.json")).unwrap();
    let tb = std::fs::read_to_string(b.path().join("rec.json")).unwrap();
    assert_eq!(without_timings(&ta), without_timings(&tb));
}

#[test]
fn rotation_hulls_shrink_for_a_translation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{"command": "rotate", "resolution": 10,
            "map": {"kind": "word", "generators": [{"translation": [0.3, 0.7]}]},
            "iterates": [10, 100], "outputs": {"record": "r.json", "svg": "hulls.svg"}}"#,
    );
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    let out = run(&cfg, &opts).unwrap();
    let est = &out.record.rotation.unwrap().estimates;
    assert!(est[1].diameter.0 < est[0].diameter.0);
    let svg = std::fs::read_to_string(dir.path().join("hulls.svg")).unwrap();
    let doc = assert_self_contained_svg(&svg);
    assert_eq!(
        doc.descendants()
            .filter(|n| n.attribute("class") == Some("hull"))
            .count(),
        2
    );
}

#[test]
fn record_and_config_schemas_list_every_field() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("config.schema.json")).unwrap())
            .unwrap();
    let documented: BTreeSet<String> = schema["properties"]
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    let full = config(
        r#"{"command": "rotate", "generators": [[1, 0]], "r": 2, "ell": 2, "p": 1, "q": 2,
            "resolution": 10, "basepoint": [0.5, 0.5], "a": {"index": 0}, "b": 0,
            "xi_override": 9, "seed": 1, "map": {"kind": "spreader"}, "iterates": [1],
            "subsequence": [1], "members": 1,
            "deviation": {"v": [1, 0], "rho": [0, 0], "steps": 1}, "rigidity_steps": 1,
            "probe": {"eps": 1, "radius": 1, "steps": 1, "u_center": [0, 0],
                      "u_radius": 1, "u_spacing": 1},
            "input": "x.json", "outputs": {}}"#,
    );
    let echoed: BTreeSet<String> = serde_json::to_value(&full)
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    assert_eq!(documented, echoed);

    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("record.schema.json")).unwrap())
            .unwrap();
    let documented: BTreeSet<String> = schema["properties"]
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    let expected: BTreeSet<String> = [
        "format",
        "command",
        "config",
        "recipe",
        "verification",
        "rotation",
        "family",
        "probe",
        "verdict",
        "artifacts",
        "timings",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(documented, expected);
}

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = ExperimentConfig::from_json(&std::fs::read_to_string(&path).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate()
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}

#[test]
fn exit_codes_follow_the_verdict() {
    assert_eq!(VerdictName::Pass.exit_code(), 0);
    assert_eq!(VerdictName::Violated.exit_code(), 2);
    assert_eq!(VerdictName::Inconclusive.exit_code(), 3);

    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(
        dir.path(),
        "build.json",
        r#"{"generators": [[1, 0], [0, 1]]}"#,
    );
    let status = Process::new(BIN)
        .args(["build", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("record.json").exists());

    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"generators": [[1, 0], [0, 1]], "resolution": 10, "a": {"value": 0.25}}"#,
    );
    let out = Process::new(BIN)
        .args(["verify", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`a`"));

    // A translated disk never fills a ball larger than itself.
    let miss = write_config(
        dir.path(),
        "probe.json",
        r#"{"map": {"kind": "word", "generators": [{"translation": [0.1, 0]}]},
            "probe": {"eps": 0.05, "radius": 1, "steps": 2, "u_center": [0.5, 0.5],
                      "u_radius": 0.2, "u_spacing": 0.02}}"#,
    );
    let status = Process::new(BIN)
        .args(["probe", "--config"])
        .arg(&miss)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    let mismatch = write_config(dir.path(), "m.json", r#"{"command": "probe"}"#);
    let out = Process::new(BIN)
        .args(["build", "--config"])
        .arg(&mismatch)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("command"));
}

#[test]
fn command_line_overrides_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"generators": [[1, 0], [0, 1]], "seed": 1}"#,
    );
    let status = Process::new(BIN)
        .args([
            "build",
            "--seed",
            "99",
            "--xi-override",
            "11",
            "--threads",
            "2",
            "--config",
        ])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rec: ResultRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("record.json")).unwrap())
            .unwrap();
    assert_eq!(rec.config.seed, 99);
    assert_eq!(rec.config.command, Some(Command::Build));
    assert_eq!(rec.recipe.unwrap().xi, 11);

    let out = Process::new(BIN)
        .args(["build", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .env("TORUS_SPREADER_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TORUS_SPREADER_THREADS"));
}
