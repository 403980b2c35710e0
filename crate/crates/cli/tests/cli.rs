use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ra_bergman::config::{schema_json, ExperimentConfig};
use ra_bergman_cli::run;

const SUBCOMMANDS: &[&str] = &[
    "gen",
    "moments",
    "extend",
    "lift",
    "gram",
    "kernel",
    "eval-bound",
    "project",
    "fock-compare",
    "disc",
    "separated-disc",
    "rays",
    "growth",
    "annulus-bound",
    "pde",
    "suite",
];

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn example_configs() -> Vec<(PathBuf, ExperimentConfig)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap() == "schema.json" {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let cfg = ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        out.push((path, cfg));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn bin(args: &[&str], dir: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ra-bergman"));
    cmd.args(args).current_dir(dir).env_remove("RA_BERGMAN_THREADS");
    if let Some(t) = threads {
        cmd.env("RA_BERGMAN_THREADS", t);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn every_subcommand_has_a_valid_example() {
    let covered: BTreeSet<&str> = example_configs().iter().map(|(_, c)| c.command()).collect();
    for cmd in SUBCOMMANDS {
        assert!(covered.contains(cmd), "no example config for {cmd}");
    }
}

#[test]
fn published_schema_is_current() {
    let text = fs::read_to_string(configs_dir().join("schema.json")).unwrap();
    assert_eq!(text.trim_end(), schema_json().trim_end(), "regenerate with `ra-bergman schema --out`");
}

#[test]
fn examples_round_trip() {
    for (path, cfg) in example_configs() {
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg, "{}", path.display());
    }
}

#[test]
fn cheap_examples_run() {
    for (path, cfg) in example_configs() {
        let name = path.file_stem().unwrap().to_str().unwrap();
        if matches!(name, "kernel" | "fock-compare" | "growth" | "pde" | "annulus-bound") || name.starts_with("suite") {
            continue;
        }
        let mut cfg = cfg;
        strip_out(&mut cfg);
        let outcome = run(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(outcome.pass, "{name}: {}", outcome.report);
    }
}

fn strip_out(cfg: &mut ExperimentConfig) {
    match cfg {
        ExperimentConfig::Gen(c) => c.out = None,
        ExperimentConfig::Moments(c) => c.out = None,
        ExperimentConfig::Gram(c) => c.out = None,
        ExperimentConfig::Disc(c) => c.out = None,
        _ => {}
    }
}

#[test]
fn gen_then_moments_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let gen = bin(&["gen", "--kind", "triple", "--spacing", "1.0", "--radius", "6.0", "--out", "X.json"], dir.path(), None);
    assert_eq!(code(&gen), 0);
    assert!(dir.path().join("X.json").exists());

    let member = bin(
        &["moments", "--fn", "zbar_g", "--zeroset", "X.json", "--radii", "0.5,1,2", "--tol", "1e-8", "--out", "m.csv"],
        dir.path(),
        None,
    );
    assert_eq!(code(&member), 0, "{}", String::from_utf8_lossy(&member.stderr));
    let csv = fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert!(csv.starts_with("center_re,center_im,radius,max_neg_coeff,sup_norm,verdict"));
    assert!(!csv.contains("FAIL"));

    let plain = bin(&["moments", "--fn", "zbar", "--zeroset", "X.json"], dir.path(), None);
    assert_eq!(code(&plain), 1);
}

#[test]
fn invalid_requests_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let negative = write(
        "neg.json",
        r#"{"command":"moments","function":"z","zeroset":{"kind":"triple","spacing":1,"radius":2},"radii":[-1]}"#,
    );
    let out = bin(&["run", "--config", &negative], dir.path(), None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("radii"));

    let unknown = write("unknown.json", r#"{"command":"disc","params":[1,2,-1,3],"chek":true}"#);
    let out = bin(&["run", "--config", &unknown], dir.path(), None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("chek"));

    assert_eq!(code(&bin(&["disc", "--params", "1,2,3"], dir.path(), None)), 2);
    assert_eq!(code(&bin(&["moments", "--fn", "z", "--zeroset", "missing.json"], dir.path(), None)), 2);
    assert_eq!(code(&bin(&["gen", "--kind", "triple"], dir.path(), Some("zero"))), 2);
    assert_eq!(code(&bin(&["no-such-command"], dir.path(), None)), 2);
}

#[test]
fn numerical_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["separated-disc", "--z", "1,1", "--w", "1,1", "--epsilon", "0.1", "--r1", "10"], dir.path(), None);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["found"], false);
}

#[test]
fn outputs_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &["kernel", "--cutoff", "6", "--out", "K.csv"],
        &["moments", "--fn", "zbar_g", "--zeroset", "X.json", "--out", "m.csv"],
        &["fock-compare", "--n", "1,2", "--max-m", "6", "--max-n", "1", "--out", "f.csv"],
    ];
    assert_eq!(code(&bin(&["gen", "--kind", "triple", "--radius", "8", "--out", "X.json"], dir.path(), None)), 0);
    for args in runs {
        let out_name = args.last().unwrap();
        let mut seen = Vec::new();
        for threads in ["1", "4"] {
            let out = bin(args, dir.path(), Some(threads));
            assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
            seen.push((out.stdout, fs::read(dir.path().join(out_name)).unwrap()));
        }
        assert!(seen[0] == seen[1], "{args:?} differs between 1 and 4 threads");
    }
}

#[test]
fn kernel_samples_are_hermitian() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["kernel", "--cutoff", "6", "--weight", "gaussian", "--out", "K.csv"], dir.path(), None);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("K.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    for r in &rows {
        let mirror = rows
            .iter()
            .find(|s| s[0] == r[2] && s[1] == r[3] && s[2] == r[0] && s[3] == r[1])
            .unwrap();
        assert!((r[4] - mirror[4]).abs() < 1e-12 && (r[5] + mirror[5]).abs() < 1e-12);
    }
}
