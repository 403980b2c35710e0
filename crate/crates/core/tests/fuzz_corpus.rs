use std::fs;
use std::path::{Path, PathBuf};

use ra_bergman::config::ExperimentConfig;
use ra_bergman::generator::{Generator, ZeroSet};
use ra_bergman::parse::{function_by_name, parse_complex, parse_complex_list, parse_list, parse_usize_list};
use ra_bergman::quadrature::{GridSpec, Weight};

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let text = String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned();
            (path, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn zeroset_corpus() {
    let mut parsed = 0;
    for (path, text) in corpus("zeroset_json") {
        if let Ok(set) = ZeroSet::from_json(&text) {
            let again = ZeroSet::from_json(&set.to_json()).unwrap();
            assert_eq!(again.points(), set.points(), "{}", path.display());
            parsed += 1;
        }
    }
    assert!(parsed >= 4);
}

#[test]
fn experiment_config_corpus() {
    let mut parsed = 0;
    for (path, text) in corpus("experiment_config") {
        if let Ok(cfg) = ExperimentConfig::from_json(&text) {
            assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg, "{}", path.display());
            parsed += 1;
        }
    }
    assert!(parsed >= 16);
}

#[test]
fn grid_spec_corpus() {
    let results: Vec<bool> = corpus("grid_spec").iter().map(|(_, t)| GridSpec::from_json(t).is_ok()).collect();
    assert_eq!(results.iter().filter(|ok| **ok).count(), 1);
}

#[test]
fn parse_params_corpus() {
    let gen = Generator::triple_sine(10.0).unwrap();
    for (_, text) in corpus("parse_params") {
        if let Ok(z) = parse_complex(&text) {
            assert!(z.re.is_finite() && z.im.is_finite());
        }
        if let Ok(v) = parse_list(&text) {
            assert!(v.iter().all(|x| x.is_finite()));
        }
        let _ = parse_complex_list(&text);
        let _ = parse_usize_list(&text);
        let _ = Weight::parse(&text);
        let _ = function_by_name(&text, &gen);
    }
}
