use gasgiant_cli::{ConfigError, ExperimentConfig};
use std::path::Path;

const MINIMAL: &str = "[model]\nname = \"perturbed\"\n";

#[test]
fn minimal_config_uses_defaults() {
    let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
    assert_eq!(cfg.seed, None);
    assert_eq!(cfg.params, Default::default());
    assert_eq!(cfg.thresholds, Default::default());
    let m = cfg.model.build().unwrap();
    assert_eq!(m.name(), "perturbed");
}

#[test]
fn missing_model_names_the_key() {
    let err = ExperimentConfig::parse("seed = 3\n").unwrap_err();
    assert!(matches!(err, ConfigError::Parse(_)));
    assert!(err.to_string().contains("model"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    for text in [
        "bogus = 1\n[model]\nname = \"euclidean\"\n",
        "[model]\nname = \"euclidean\"\ncolour = 2\n",
        "[model]\nname = \"euclidean\"\n[params]\nrays = 3\n",
        "[model]\nname = \"euclidean\"\n[integrator]\ntol = 1e-3\n",
        "[model]\nname = \"euclidean\"\n[thresholds]\nenergy = 1e-3\n",
    ] {
        let err = ExperimentConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{text}: {err}");
    }
}

#[test]
fn invalid_values_are_rejected() {
    for text in [
        "[model]\nname = \"jupiter\"\n",
        "[model]\nname = \"euclidean\"\na = 0.2\n",
        "[model]\nname = \"perturbed\"\nperiod = -1.0\n",
        // φ = 1 + a x cos κy vanishes inside the slab
        "[model]\nname = \"perturbed\"\na = 2.0\n",
        "[model]\nname = \"torus3d\"\nb = -1.0\n",
        "[model]\nname = \"euclidean\"\n[integrator]\nrel_tol = 0.0\n",
        "[model]\nname = \"euclidean\"\n[params]\nshort_s = [0.1, -0.1]\n",
        "[model]\nname = \"euclidean\"\n[thresholds]\ngauge = -1e-8\n",
        "[model]\nname = \"euclidean\"\n[thresholds]\nh_norm_lo = 2.0\n",
    ] {
        let err = ExperimentConfig::parse(text).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{text}: {err}");
    }
}

#[test]
fn serialization_round_trips() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml")).unwrap();
    let mut cfg = ExperimentConfig::parse(&text).unwrap();
    cfg.params.pestov_levels = vec![16, 32];
    cfg.thresholds.fiber = 3e-11;
    let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
    assert_eq!(cfg, again);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 2);
}

#[test]
fn cli_out_dir_wins() {
    let cfg = ExperimentConfig::parse("out_dir = \"a\"\n[model]\nname = \"euclidean\"\n").unwrap();
    assert_eq!(cfg.resolve_out_dir(Some(Path::new("b"))), Path::new("b"));
}
