use clap::Parser;
use gasgiant_cli::config::DEFAULT_SEED;
use gasgiant_cli::{ArtifactDir, Context, ExperimentConfig, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments for geodesic X-ray tomography on gas-giant metrics.
#[derive(Parser, Debug)]
#[command(name = "gasgiant-tomo", version)]
struct Cli {
    /// Which suite to run.
    #[arg(value_enum)]
    suite: Suite,
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides GASGIANT_OUT_DIR and the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Spread ray sweeps over all cores.
    #[arg(long)]
    parallel: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let model = cfg.model.build().expect("validated on load");
    let ctx = Context {
        model,
        seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        opts: cfg.integrator,
        params: cfg.params.clone(),
        thresholds: cfg.thresholds.clone(),
        parallel: cli.parallel,
    };
    if model.dim() != 2 && cli.suite != Suite::Trace {
        eprintln!("note: surface suites use the perturbed model in place of {}", model.name());
    }
    let out_dir = cfg.resolve_out_dir(cli.out.as_deref());
    let mut out = match ArtifactDir::create(&out_dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", out_dir.display());
            return ExitCode::from(1);
        }
    };
    let results = match ctx.run(cli.suite, &mut out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} checks pass; artifacts in {}",
        results.len() - failed,
        results.len(),
        out.root().display()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
