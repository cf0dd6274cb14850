//! Command-line front-end for the certified-rate library.
//!
//! Subcommands: `certify` (closed-form certificate + dual-route check),
//! `sweep` (rate tables over parameter grids), `frontier` (feasibility
//! limit past the classical relaxation range), `demo` (run the iteration
//! and overlay the certified trajectory bound), and `compare` (certified
//! splitting rate vs optimally tuned gradient descent).
//!
//! Output is deterministic CSV/JSON: identical inputs (flags, config file,
//! seed) produce byte-identical files. Exit code 0 means every check the
//! command performed passed; 2 means the run completed but a check failed;
//! 1 means the command could not run (bad parameters, unreadable files).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use admm_cert::linalg::Mat;
use admm_cert::lower_bound::{comparisons_to_csv, CounterexampleSpec};
use admm_cert::problem::{ProblemConfig, ProblemInstance};
use admm_cert::sdp::{DEFAULT_BISECT_TOL, RATE_BRACKET_HI, RATE_BRACKET_LO};
use admm_cert::{
    admm_vs_gd, check_feasible, contraction_bound, derive_params, explicit_certificate,
    feasibility_frontier, minimal_tau, observed_rate, rho_for_normalized_step, AdmmParams,
    Engine, FeasStatus, FunctionOracle, SweepOptions,
};

const DEFAULT_FEAS_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "admm-cert",
    version,
    about = "Certified convergence rates for over-relaxed splitting",
    after_help = "Every flag can also be given as a key in a flat JSON config file \
                  (--config); explicit flags override config values. Exit codes: \
                  0 all checks passed, 2 a check failed, 1 the command could not run."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form certificate for one parameter point and
    /// validate it by both verification routes.
    Certify(CertifyArgs),
    /// Tabulate certified rates over a parameter grid as CSV, optionally
    /// cross-checking the closed form against the numerical bisection.
    Sweep(SweepArgs),
    /// Scan an ascending condition-number grid for the feasibility limit
    /// at a fixed relaxation (interesting past the classical range).
    Frontier(FrontierArgs),
    /// Run the iteration on a problem and overlay the certified
    /// trajectory-norm bound; fails if any iterate violates the bound.
    Demo(DemoArgs),
    /// Compare certified splitting rates against optimally tuned gradient
    /// descent over condition-number grids.
    Compare(CompareArgs),
}

// ---------------------------------------------------------------------------
// Config-file plumbing: a flat JSON object whose keys mirror the long flag
// names (dashes become underscores). Flags always win over config values.

struct Cfg(serde_json::Map<String, serde_json::Value>);

impl Cfg {
    fn load(path: &Option<PathBuf>) -> Result<Cfg> {
        let Some(path) = path else {
            return Ok(Cfg(serde_json::Map::new()));
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))?;
        match value {
            serde_json::Value::Object(map) => Ok(Cfg(map)),
            _ => bail!("config file must be a flat JSON object of flag values"),
        }
    }

    fn num(&self, key: &str) -> Result<Option<f64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => Ok(Some(
                v.as_f64().ok_or_else(|| anyhow!("config key `{key}` must be a number"))?,
            )),
        }
    }

    fn int(&self, key: &str) -> Result<Option<u64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => Ok(Some(
                v.as_u64()
                    .ok_or_else(|| anyhow!("config key `{key}` must be a nonnegative integer"))?,
            )),
        }
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => Ok(Some(
                v.as_bool().ok_or_else(|| anyhow!("config key `{key}` must be a boolean"))?,
            )),
        }
    }

    fn text(&self, key: &str) -> Result<Option<String>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => Ok(Some(
                v.as_str()
                    .ok_or_else(|| anyhow!("config key `{key}` must be a string"))?
                    .to_string(),
            )),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(serde_json::Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    out.push(item.as_f64().ok_or_else(|| {
                        anyhow!("config key `{key}` must be an array of numbers")
                    })?);
                }
                Ok(Some(out))
            }
            Some(_) => bail!("config key `{key}` must be an array of numbers"),
        }
    }
}

/// Grid file for the sweep/frontier commands: any subset of the three axes.
#[derive(serde::Deserialize)]
struct GridFile {
    alphas: Option<Vec<f64>>,
    rho0s: Option<Vec<f64>>,
    kappas: Option<Vec<f64>>,
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("`{tok}` is not a number in list `{text}`"))
        })
        .collect()
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing required parameter `{name}` (flag or config key)"))
}

/// Writes the payload to `--out` (summary to stdout) or, with no `--out`,
/// streams the payload to stdout and the summary to stderr so the payload
/// stays byte-clean for piping.
fn emit(out: &Option<PathBuf>, payload: &str, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, payload)
                .with_context(|| format!("writing output file {}", path.display()))?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print!("{payload}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

/// Runs `f` on a dedicated worker pool of the requested size (default:
/// rayon's own default, i.e. available parallelism).
fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => bail!("workers must be positive"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
    }
}

// ---------------------------------------------------------------------------
// certify

#[derive(Args)]
struct CertifyArgs {
    /// Relaxation parameter, in (0, 2].
    #[arg(long)]
    alpha: Option<f64>,
    /// Normalized penalty (positive).
    #[arg(long)]
    rho0: Option<f64>,
    /// Effective condition number (> 1 for the closed form).
    #[arg(long)]
    kappa: Option<f64>,
    /// Image-space conditioning of the second constraint block (>= 1).
    #[arg(long)]
    kappa_b: Option<f64>,
    /// Relative feasibility tolerance for the dual-route check.
    #[arg(long)]
    tol_feas: Option<f64>,
    /// Write the certificate as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON config file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_certify(a: CertifyArgs) -> Result<bool> {
    let cfg = Cfg::load(&a.config)?;
    let alpha = require(a.alpha.or(cfg.num("alpha")?), "alpha")?;
    let rho0 = require(a.rho0.or(cfg.num("rho0")?), "rho0")?;
    let kappa = require(a.kappa.or(cfg.num("kappa")?), "kappa")?;
    let kappa_b = a.kappa_b.or(cfg.num("kappa_b")?).unwrap_or(1.0);
    let tol_feas = a.tol_feas.or(cfg.num("tol_feas")?).unwrap_or(DEFAULT_FEAS_TOL);
    let out = a.out.or(cfg.text("out")?.map(PathBuf::from));

    let cert = explicit_certificate(alpha, rho0, kappa)?;
    let matrix = cert.assemble()?;
    let check = check_feasible(&matrix, tol_feas)?;
    let bound = contraction_bound(alpha, rho0, kappa, kappa_b);

    println!("alpha            = {alpha:.10e}");
    println!("rho0             = {rho0:.10e}");
    println!("kappa            = {kappa:.10e}");
    println!("tau              = {:.10e}", cert.tau);
    println!("xi               = {:.10e}", cert.xi);
    println!("lambda1          = {:.10e}", cert.lambda1);
    println!("lambda2          = {:.10e}", cert.lambda2);
    println!("lambda_max       = {:.10e}", check.lambda_max);
    println!("worst_minor_slack = {:.10e}", check.worst_minor_slack);
    match &bound {
        Ok(b) => {
            println!("eta              = {:.10e}", b.eta);
            println!("bound_constant   = {:.10e} (kappa_b = {kappa_b:.10e})", b.constant);
        }
        Err(_) => {
            println!("bound_constant   = unavailable at the relaxation limit (alpha = 2)");
        }
    }
    println!("feasible         = {}", check.feasible);

    if let Some(path) = &out {
        let record = serde_json::json!({
            "alpha": alpha,
            "rho0": rho0,
            "kappa": kappa,
            "kappa_b": kappa_b,
            "tau": cert.tau,
            "xi": cert.xi,
            "lambda1": cert.lambda1,
            "lambda2": cert.lambda2,
            "p": [[1.0, cert.xi], [cert.xi, 1.0]],
            "lambda_max": check.lambda_max,
            "worst_minor_slack": check.worst_minor_slack,
            "feasible": check.feasible,
            "eta": bound.as_ref().ok().map(|b| b.eta),
            "chi_eta": bound.as_ref().ok().map(|b| b.chi_eta),
            "bound_constant": bound.as_ref().ok().map(|b| b.constant),
        });
        fs::write(path, format!("{:#}\n", record))
            .with_context(|| format!("writing output file {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(check.feasible)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated relaxation values.
    #[arg(long)]
    alphas: Option<String>,
    /// Comma-separated normalized-penalty values.
    #[arg(long)]
    rho0s: Option<String>,
    /// Comma-separated condition numbers.
    #[arg(long)]
    kappas: Option<String>,
    /// JSON file providing any of `alphas`, `rho0s`, `kappas`.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// Also bisect the smallest numerically certifiable rate per cell.
    #[arg(long)]
    bisect: bool,
    /// Bisection tolerance.
    #[arg(long)]
    tol_bisect: Option<f64>,
    /// Relative feasibility tolerance for the certificate check.
    #[arg(long)]
    tol_feas: Option<f64>,
    /// Worker-pool size for per-cell work (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON config file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Statuses that mean "the cell itself failed a check", as opposed to
/// honest domain facts (no closed form at kappa = 1, infeasible past the
/// relaxation limit, budget exhausted near the boundary).
fn failed_status(status: &str) -> bool {
    matches!(
        status,
        "invalid_parameters" | "check_failed" | "route_disagreement" | "certificate_error"
            | "solver_error"
    )
}

fn load_grid_axes(
    a_list: Option<String>,
    r_list: Option<String>,
    k_list: Option<String>,
    cfg: &Cfg,
    grid_file: Option<PathBuf>,
) -> Result<(Option<Vec<f64>>, Option<Vec<f64>>, Option<Vec<f64>>)> {
    let mut alphas = match a_list {
        Some(text) => Some(parse_list(&text)?),
        None => cfg.list("alphas")?,
    };
    let mut rho0s = match r_list {
        Some(text) => Some(parse_list(&text)?),
        None => cfg.list("rho0s")?,
    };
    let mut kappas = match k_list {
        Some(text) => Some(parse_list(&text)?),
        None => cfg.list("kappas")?,
    };
    let grid_file = grid_file.or(cfg.text("grid_file")?.map(PathBuf::from));
    if let Some(path) = grid_file {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading grid file {}", path.display()))?;
        let grid: GridFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing grid file {}", path.display()))?;
        alphas = alphas.or(grid.alphas);
        rho0s = rho0s.or(grid.rho0s);
        kappas = kappas.or(grid.kappas);
    }
    Ok((alphas, rho0s, kappas))
}

fn cmd_sweep(a: SweepArgs) -> Result<bool> {
    let cfg = Cfg::load(&a.config)?;
    let (alphas, rho0s, kappas) =
        load_grid_axes(a.alphas, a.rho0s, a.kappas, &cfg, a.grid_file)?;
    let alphas = require(alphas, "alphas")?;
    let rho0s = require(rho0s, "rho0s")?;
    let kappas = require(kappas, "kappas")?;
    let bisect = a.bisect || cfg.flag("bisect")?.unwrap_or(false);
    let bisect_tol = a.tol_bisect.or(cfg.num("tol_bisect")?).unwrap_or(DEFAULT_BISECT_TOL);
    let feas_rel_tol = a.tol_feas.or(cfg.num("tol_feas")?).unwrap_or(DEFAULT_FEAS_TOL);
    let workers = match a.workers {
        Some(n) => Some(n),
        None => cfg.int("workers")?.map(|n| n as usize),
    };
    let out = a.out.or(cfg.text("out")?.map(PathBuf::from));

    let opts = SweepOptions { bisect, bisect_tol, feas_rel_tol };
    let rows = with_pool(workers, || admm_cert::sweep(&alphas, &rho0s, &kappas, &opts))??;
    let csv = admm_cert::sweep_to_csv(&rows);

    let failures = rows.iter().filter(|r| failed_status(&r.status)).count();
    let mut discrepancy: Option<f64> = None;
    for row in &rows {
        if let (Some(f), Some(b)) = (row.tau_formula, row.tau_bisect) {
            // The bisection can only report rates inside its bracket, so a
            // formula value outside it (the one-step-exact corner at full
            // relaxation with perfect conditioning has rate 0) is compared
            // against its projection into the searchable interval.
            let f = f.clamp(RATE_BRACKET_LO, RATE_BRACKET_HI);
            let d = (f - b).abs();
            discrepancy = Some(discrepancy.map_or(d, |cur: f64| cur.max(d)));
        }
    }
    let summary = match discrepancy {
        Some(d) => format!(
            "swept {} cells, {} failed checks, max |tau_formula - tau_bisect| = {:.10e}",
            rows.len(),
            failures,
            d
        ),
        None => format!("swept {} cells, {} failed checks", rows.len(), failures),
    };
    emit(&out, &csv, &summary)?;
    let discrepancy_ok = discrepancy.map_or(true, |d| d <= 2.0 * bisect_tol);
    Ok(failures == 0 && discrepancy_ok)
}

// ---------------------------------------------------------------------------
// frontier

#[derive(Args)]
struct FrontierArgs {
    /// Relaxation parameter (the frontier is interesting for alpha > 2).
    #[arg(long)]
    alpha: Option<f64>,
    /// Normalized penalty.
    #[arg(long)]
    rho0: Option<f64>,
    /// Comma-separated ascending condition numbers to scan.
    #[arg(long)]
    kappas: Option<String>,
    /// JSON file providing `kappas`.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// Bisection tolerance for the per-kappa minimal rate.
    #[arg(long)]
    tol_bisect: Option<f64>,
    /// Worker-pool size (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON config file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_frontier(a: FrontierArgs) -> Result<bool> {
    let cfg = Cfg::load(&a.config)?;
    let alpha = require(a.alpha.or(cfg.num("alpha")?), "alpha")?;
    let rho0 = require(a.rho0.or(cfg.num("rho0")?), "rho0")?;
    let (_, _, kappas) = load_grid_axes(None, None, a.kappas, &cfg, a.grid_file)?;
    let kappas = require(kappas, "kappas")?;
    let bisect_tol = a.tol_bisect.or(cfg.num("tol_bisect")?).unwrap_or(DEFAULT_BISECT_TOL);
    let workers = match a.workers {
        Some(n) => Some(n),
        None => cfg.int("workers")?.map(|n| n as usize),
    };
    let out = a.out.or(cfg.text("out")?.map(PathBuf::from));

    let res = feasibility_frontier(alpha, rho0, &kappas)?;
    // Fill in the smallest certifiable rate wherever a certificate exists.
    let taus: Vec<Option<f64>> = with_pool(workers, || {
        res.cells
            .par_iter()
            .map(|cell| match cell.status {
                FeasStatus::Feasible => {
                    minimal_tau(alpha, rho0, cell.kappa, bisect_tol).ok().map(|r| r.tau)
                }
                _ => None,
            })
            .collect()
    })?;

    let mut csv =
        String::from("alpha,rho0,kappa,status,tau_min,lambda_max,dual_lower_bound,iterations\n");
    let mut bisect_failures = 0usize;
    for (cell, tau) in res.cells.iter().zip(&taus) {
        let status = match cell.status {
            FeasStatus::Feasible => {
                if tau.is_none() {
                    bisect_failures += 1;
                }
                "feasible"
            }
            FeasStatus::Infeasible => "infeasible",
            FeasStatus::Inconclusive => "inconclusive",
        };
        let tau_s = tau.map(|t| format!("{t:.10e}")).unwrap_or_default();
        let dual_s = cell.dual_lower_bound.map(|d| format!("{d:.10e}")).unwrap_or_default();
        csv.push_str(&format!(
            "{alpha:.10e},{rho0:.10e},{:.10e},{status},{tau_s},{:.10e},{dual_s},{}\n",
            cell.kappa, cell.lambda_max, cell.iterations
        ));
    }
    let summary = match res.largest_feasible {
        Some(k) => format!(
            "largest feasible kappa = {k} (grid of {}, contiguous: {})",
            res.cells.len(),
            res.contiguous
        ),
        None => format!("no feasible kappa on the grid of {}", res.cells.len()),
    };
    emit(&out, &csv, &summary)?;
    Ok(res.contiguous && bisect_failures == 0)
}

// ---------------------------------------------------------------------------
// demo

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Builtin {
    /// Two-dimensional worst-case quadratic that contracts exactly at the
    /// certified rate.
    Witness,
    /// Seeded random five-dimensional quadratic objective with a weighted
    /// l1 regularizer.
    L1,
}

#[derive(Args)]
struct DemoArgs {
    /// JSON problem description (fields f/g/a/b/c); overrides --builtin.
    #[arg(long)]
    problem_file: Option<PathBuf>,
    /// Built-in demo problem to run when no problem file is given.
    #[arg(long, value_enum, default_value = "witness")]
    builtin: Builtin,
    /// Relaxation parameter (must stay below 2 so the trajectory bound is
    /// finite).
    #[arg(long)]
    alpha: Option<f64>,
    /// Normalized penalty; the actual penalty is derived from the problem.
    #[arg(long)]
    rho0: Option<f64>,
    /// Number of iterations to run.
    #[arg(long)]
    iters: Option<usize>,
    /// Seed for the random built-in problem.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON config file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Seeded random strongly-convex quadratic + weighted-l1 instance in
/// dimension 5 (diagonal `A`, `B = -I`).
fn random_l1_instance(seed: u64) -> Result<ProblemInstance> {
    let n = 5usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> =
        (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let gram = Mat::from_rows(&rows)?.gram();
    let eigs = gram.sym_eigenvalues()?;
    let shift = 0.05 * eigs[n - 1].max(1e-2);
    let q = gram.add(&Mat::identity(n).scale(shift))?;
    let lin: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = FunctionOracle::quadratic(q, lin)?;
    let g = FunctionOracle::l1(0.15)?;
    let a_diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.4)).collect();
    let a = Mat::diag(&a_diag);
    let b = Mat::identity(n).scale(-1.0);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    Ok(ProblemInstance::new(f, g, a, b, c)?)
}

fn cmd_demo(a: DemoArgs) -> Result<bool> {
    let cfg = Cfg::load(&a.config)?;
    let alpha = a.alpha.or(cfg.num("alpha")?).unwrap_or(1.0);
    let rho0 = a.rho0.or(cfg.num("rho0")?).unwrap_or(1.0);
    let iters = match a.iters {
        Some(n) => n,
        None => cfg.int("iters")?.map(|n| n as usize).unwrap_or(200),
    };
    let seed = a.seed.or(cfg.int("seed")?).unwrap_or(0);
    let problem_file = a.problem_file.or(cfg.text("problem_file")?.map(PathBuf::from));
    let out = a.out.or(cfg.text("out")?.map(PathBuf::from));

    // Build and validate the problem before anything runs.
    let (instance, label, z0, u0) = match &problem_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading problem file {}", path.display()))?;
            let config: ProblemConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing problem file {}", path.display()))?;
            let instance = config.build()?;
            let z = vec![0.0; instance.z_dim()];
            let u = vec![0.0; instance.z_dim()];
            (instance, format!("problem file {}", path.display()), z, u)
        }
        None => match a.builtin {
            Builtin::Witness => {
                let spec = CounterexampleSpec::new(1.0, 4.0, rho0)?;
                (
                    spec.rate_instance()?,
                    "built-in worst-case witness (m=1, L=4)".to_string(),
                    vec![1.0, 0.0],
                    vec![0.0, 0.0],
                )
            }
            Builtin::L1 => (
                random_l1_instance(seed)?,
                format!("built-in random quadratic+l1 (seed {seed})"),
                vec![0.0; 5],
                vec![0.0; 5],
            ),
        },
    };

    let rho = rho_for_normalized_step(&instance, rho0)?;
    let derived = derive_params(&instance, rho)?;
    let bound = contraction_bound(alpha, derived.rho0, derived.kappa, derived.kappa_b)
        .context("the demo overlays the trajectory bound, which needs alpha < 2")?;
    let params = AdmmParams::new(alpha, rho, iters, 0.0)?;
    let engine = Engine::new(instance, params)?;
    let traj = engine.run(&z0, &u0)?;

    let e0 = traj.error_norms[0];
    // Additive allowance for the resolution of the numerically located
    // fixed point the errors are measured against.
    let slack = 1e-9 * e0.max(1.0);
    let mut csv = String::from("iteration,err_norm,ratio,bound\n");
    let mut violations = 0usize;
    for (t, &et) in traj.error_norms.iter().enumerate() {
        let cap = bound.constant * bound.tau.powi(t as i32) * e0;
        if et > cap + slack {
            violations += 1;
        }
        let ratio = if t == 0 {
            String::new()
        } else {
            let prev = traj.error_norms[t - 1];
            if prev > 0.0 {
                format!("{:.10e}", et / prev)
            } else {
                String::new()
            }
        };
        csv.push_str(&format!("{t},{et:.10e},{ratio},{cap:.10e}\n"));
    }

    let observed = observed_rate(&traj, 20.min(iters / 4).max(1)).ok();
    let observed_s =
        observed.map(|r| format!("{r:.6}")).unwrap_or_else(|| "n/a".to_string());
    let summary = format!(
        "{label}: {} iterations, certified tau = {:.6}, observed tail rate = {observed_s}, \
         bound violations = {violations}",
        traj.error_norms.len() - 1,
        bound.tau
    );
    emit(&out, &csv, &summary)?;
    Ok(violations == 0)
}

// ---------------------------------------------------------------------------
// compare

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated effective condition numbers for the splitting
    /// method.
    #[arg(long)]
    kappas: Option<String>,
    /// Comma-separated objective condition numbers for gradient descent;
    /// pairs with kappa_f < kappa are skipped.
    #[arg(long)]
    kappa_fs: Option<String>,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON config file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_compare(a: CompareArgs) -> Result<bool> {
    let cfg = Cfg::load(&a.config)?;
    let kappas = match a.kappas {
        Some(text) => Some(parse_list(&text)?),
        None => cfg.list("kappas")?,
    };
    let kappa_fs = match a.kappa_fs {
        Some(text) => Some(parse_list(&text)?),
        None => cfg.list("kappa_fs")?,
    };
    let kappas = require(kappas, "kappas")?;
    let kappa_fs = require(kappa_fs, "kappa_fs")?;
    let out = a.out.or(cfg.text("out")?.map(PathBuf::from));

    let mut rows = Vec::new();
    for &kappa in &kappas {
        for &kappa_f in &kappa_fs {
            if kappa_f < kappa {
                continue;
            }
            rows.push(admm_vs_gd(kappa, kappa_f)?);
        }
    }
    if rows.is_empty() {
        bail!(
            "no valid pairs: the comparison needs kappa_f >= kappa, and every \
             pair in the given grids violates that"
        );
    }
    let csv = comparisons_to_csv(&rows);
    let ordering_ok = rows.iter().all(|r| r.ordering_holds);
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let diag_gap = rows
        .iter()
        .filter(|r| r.kappa == r.kappa_f)
        .map(|r| r.slack.abs())
        .fold(0.0f64, f64::max);
    let summary = format!(
        "{} pairs, splitting rate dominates: {ordering_ok}, min domination slack = {min_slack:.3e}, \
         max diagonal gap = {diag_gap:.3e}",
        rows.len()
    );
    emit(&out, &csv, &summary)?;
    Ok(ordering_ok && min_slack >= -1e-12 && diag_gap <= 1e-12)
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Certify(a) => cmd_certify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Frontier(a) => cmd_frontier(a),
        Command::Demo(a) => cmd_demo(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
