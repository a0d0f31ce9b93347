use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use slowman::diagnostics::{eta_points, loglog_slope, relative_slope, sweep, write_csv};
use slowman::mesh::export_mesh;
use slowman::prelude::*;
use slowman::tighten::TightenOutcome;

mod config;

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "slowman", version, about = "Rigorous enclosures of slow manifolds")]
struct Cli {
    /// Worker threads for the data-parallel stages (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accepted for compatibility; the pipeline is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build, verify and tighten one enclosure and write its artifacts.
    Enclose(EncloseArgs),
    /// Run every epsilon of the config and write one CSV row per point.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct EncloseArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    no_tighten: bool,
    /// Overrides run.update_factor.
    #[arg(long)]
    factor: Option<f64>,
}

/// What a command reports on success; errors map to exit code 1.
enum Outcome {
    Verified,
    Failed,
}

/// A temporary file readable by others once renamed into place.
fn temp_file_in(dir: &Path) -> std::io::Result<tempfile::NamedTempFile> {
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    builder.tempfile_in(dir)
}

fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = temp_file_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        write(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        Ok(())
    })
}

fn prepare_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", out.display())))?;
    tempfile::tempfile_in(out)
        .map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", out.display())))?;
    Ok(())
}

fn enclose(args: &EncloseArgs) -> Result<Outcome> {
    let config = RunConfig::load(&args.config)?;
    let eps = match config.require_epsilons()? {
        [eps] => *eps,
        many => {
            return Err(Error::Config(format!(
                "enclose runs a single epsilon, the config lists {}",
                many.len()
            )))
        }
    };
    prepare_out_dir(&args.out)?;

    let sys = config.system.parameters.at(eps, config.system.branch)?;
    sys.check_domain(&config.domain)?;

    let t0 = Instant::now();
    let points = generate_vertices(&config.domain, config.mesh.d, |y, z| sys.kappa(y, z))?;
    let mesh = Arc::new(triangulate(&points)?);
    let k0 = lift(&mesh, |y, z| sys.h0_at(y, z))?;
    let keps = build_approximation(&k0, &sys)?;
    let t_mesh = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let verified = verify_pair(&sys, &keps, config.run.n0);
    let t_verify = t0.elapsed().as_secs_f64();
    let mut verified = match verified {
        Ok(v) => v,
        Err(Error::VerificationFailure { last_n, left, right }) => {
            let report = json!({
                "status": "verification_failed",
                "config": config,
                "epsilon": eps,
                "iota": mesh.num_vertices(),
                "faces": mesh.num_faces(),
                "last_N": last_n,
                "failing_faces_left": left.signs.iter().filter(|&&s| s != 1).count(),
                "failing_faces_right": right.signs.iter().filter(|&&s| s != -1).count(),
                "timings": { "t_mesh": t_mesh, "t_verify": t_verify },
            });
            write_json(&args.out.join("report.json"), &report)?;
            eprintln!(
                "verification failed: no N down from {} verified (last N = {last_n:e})",
                config.run.n0
            );
            return Ok(Outcome::Failed);
        }
        Err(e) => return Err(e),
    };

    let eta_initial = eta(&verified.pair);
    let t0 = Instant::now();
    let history = if config.run.tighten {
        tighten(
            &sys,
            &mut verified.pair,
            config.run.update_factor,
            config.run.max_passes,
        )?
    } else {
        TightenOutcome {
            passes: 0,
            eta_history: vec![eta_initial],
        }
    };
    let t_tighten = t0.elapsed().as_secs_f64();
    let slope = relative_slope(&sys, &verified.pair);

    export_mesh(&verified.pair.left(), &args.out.join("L.mesh"))?;
    export_mesh(&verified.pair.right(), &args.out.join("R.mesh"))?;
    write_atomic(&args.out.join("eta_history.csv"), |w| history.write_csv(w))?;
    let report = json!({
        "status": "verified",
        "config": config,
        "epsilon": eps,
        "iota": mesh.num_vertices(),
        "faces": mesh.num_faces(),
        "verified_N": verified.n,
        "halvings": verified.halvings,
        "eta_initial": eta_initial,
        "eta_final": history.eta_history.last().copied().unwrap_or(eta_initial),
        "passes": history.passes,
        "s_eps_hi": if slope.s_hi.is_finite() { json!(slope.s_hi) } else { json!(null) },
        "criterion_ok": slope.criterion_ok,
        "timings": { "t_mesh": t_mesh, "t_verify": t_verify, "t_tighten": t_tighten },
    });
    write_json(&args.out.join("report.json"), &report)?;
    Ok(Outcome::Verified)
}

fn run_sweep(args: &SweepArgs) -> Result<Outcome> {
    let mut config = RunConfig::load(&args.config)?;
    if args.no_tighten {
        config.run.tighten = false;
    }
    if let Some(f) = args.factor {
        config.run.update_factor = f;
    }
    config.validate()?;
    config.require_epsilons()?;
    let records = sweep(&config.sweep_config())?;

    let points = eta_points(&records);
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.0), hi.max(p.0))
    });
    let summary = match loglog_slope(&points, (lo, hi)) {
        Ok(s) => format!(
            "# slope of log10(eta) vs -log10(eps) over [{lo}, {hi}]: {s:.6} ({} points)",
            points.len()
        ),
        Err(e) => format!("# slope unavailable: {e}"),
    };
    write_atomic(&args.csv, |w| {
        write_csv(&records, &mut *w)?;
        writeln!(w, "{summary}")?;
        Ok(())
    })?;
    for r in &records {
        if let Some(e) = &r.error {
            eprintln!("epsilon {:e}: {e}", r.epsilon);
        }
    }
    Ok(if records.iter().all(|r| r.error.is_none()) {
        Outcome::Verified
    } else {
        Outcome::Failed
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Enclose(args) => enclose(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
