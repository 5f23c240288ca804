//! Command-line front end: construct symmetric Beltrami fields, verify their
//! residuals, trace field lines, collect Poincaré sections and run structure
//! scans. All outputs are deterministic for a fixed run configuration and
//! embed it for provenance.
//!
//! Exit codes: 0 success, 2 hypothesis failure (the symmetry admits no
//! invariant fields / no first integral, a meaningful negative result),
//! 1 operational error.

mod config;
mod output;
mod solution;

use beltrami_core::calculus;
use beltrami_core::catalog;
use beltrami_core::error::Error as CoreError;
use beltrami_core::field::{FdConfig, FdOrder};
use beltrami_core::fieldline::{
    self, CrossingDirection, IntegratorConfig, SectionSpec,
};
use beltrami_core::linalg;
use beltrami_core::manifold::ChartPoint;
use beltrami_core::operator::{assemble_pi_curlinv, top_eigenpair};
use beltrami_core::scalar_eigen::{beltrami_from_scalar, solve_constrained_laplacian, FieldRep};
use beltrami_core::structure::{self, ScanGrid, ThresholdScales};
use beltrami_core::symmetry::symmetric_mask;
use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "beltrami", version, about = "Symmetric Beltrami fields on model 3-manifolds")]
struct Cli {
    /// Output directory (env: BELTRAMI_OUT)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for grid scans (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Single-threaded golden-test reproducibility mode
    #[arg(long, global = true)]
    deterministic: bool,
    /// Random seed for seed sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Finite-difference step for chart-calculus residuals
    #[arg(long, global = true, default_value_t = 1e-3)]
    fd_step: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or show catalog Killing fields
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Construct a symmetry-obeying curl eigenfield
    Construct(ConstructArgs),
    /// Recompute and report the residuals of a stored solution
    Verify { solution: PathBuf },
    /// Integrate a field line of a stored solution and write a CSV
    Trace(TraceArgs),
    /// Collect Poincaré-section crossings for several seeds
    Poincare(PoincareArgs),
    /// Scan the first integral: critical values, level components, chambers
    Scan(ScanArgs),
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Args)]
struct ConstructArgs {
    /// Catalog name (t3_e3, s3_hopf, ...) or direction (e1, 1,1,0, irrational)
    #[arg(long)]
    symmetry: String,
    /// Spectral truncation
    #[arg(long = "N", alias = "n", default_value_t = 4)]
    n: usize,
    /// Construction route: scalar (constrained Laplacian) or operator
    #[arg(long, default_value = "scalar")]
    route: String,
    /// Output file (default: `solution_<symmetry>_<route>_N<n>.json` in out dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    solution: PathBuf,
    /// Start point "x,y,z"
    #[arg(long, default_value = "0.125,0,0")]
    seed_point: String,
    /// Flow-parameter length (overridden by --arc-length)
    #[arg(long, default_value_t = 50.0)]
    t_end: f64,
    /// Arc length to integrate (converted via the field speed at the seed)
    #[arg(long)]
    arc_length: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Also emit a gnuplot script next to the CSV
    #[arg(long)]
    gnuplot: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PoincareArgs {
    #[arg(long)]
    solution: PathBuf,
    /// Section plane, e.g. "z=0", "x=0.25"
    #[arg(long, default_value = "z=0")]
    section: String,
    /// Number of random seeds
    #[arg(long, default_value_t = 16)]
    seeds: usize,
    /// Crossings per seed
    #[arg(long, default_value_t = 200)]
    crossings: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Also emit a gnuplot script next to the CSV
    #[arg(long)]
    gnuplot: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    solution: PathBuf,
    /// Scan grid nodes per axis
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 1e-3)]
    eps_grad_scale: f64,
    #[arg(long, default_value_t = 1e-3)]
    delta_level_scale: f64,
    #[arg(long, default_value_t = 1e-2)]
    delta_cluster_scale: f64,
    /// Also write the Γ mask as a raw byte array with a JSON header line
    #[arg(long)]
    mask: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let threads = if cli.deterministic { 1 } else { cli.threads };
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_hypothesis_failure() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn out_dir(cli_dir: &Option<PathBuf>) -> PathBuf {
    cli_dir
        .clone()
        .or_else(|| std::env::var_os("BELTRAMI_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn base_config(cli: &Cli, command: &str) -> RunConfig {
    let mut rc = RunConfig::new(command);
    rc.fd_step = cli.fd_step;
    rc.seed = cli.seed;
    rc.threads = if cli.deterministic { 1 } else { cli.threads };
    rc.deterministic = cli.deterministic;
    rc
}

fn run(cli: Cli) -> Result<(), CoreError> {
    match &cli.command {
        Command::Catalog { action } => match action {
            CatalogAction::List => cmd_catalog_list(),
            CatalogAction::Show { name } => cmd_catalog_show(name),
        },
        Command::Construct(args) => cmd_construct(&cli, args),
        Command::Verify { solution } => cmd_verify(&cli, solution),
        Command::Trace(args) => cmd_trace(&cli, args),
        Command::Poincare(args) => cmd_poincare(&cli, args),
        Command::Scan(args) => cmd_scan(&cli, args),
    }
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

fn catalog_entry_json(entry: &catalog::KillingEntry) -> serde_json::Value {
    serde_json::json!({
        "name": entry.name,
        "model": match entry.model {
            beltrami_core::manifold::ManifoldModel::FlatTorus3 { .. } => "flat_torus_3",
            beltrami_core::manifold::ManifoldModel::RoundSphere3 => "round_sphere_3",
        },
        "kappa": entry.kappa,
        "c": entry.c,
        "first_integrals": entry.first_integrals.iter().map(|fi| fi.name.clone()).collect::<Vec<_>>(),
        "direction": entry.direction.as_ref().map(|d| d.to_string()),
    })
}

fn cmd_catalog_list() -> Result<(), CoreError> {
    let entries: Vec<serde_json::Value> = catalog::catalog_names()
        .iter()
        .map(|name| catalog_entry_json(&catalog::catalog_get(name).expect("catalog")))
        .collect();
    println!("{}", serde_json::to_string_pretty(&entries).expect("json"));
    Ok(())
}

fn cmd_catalog_show(name: &str) -> Result<(), CoreError> {
    let entry = catalog::catalog_get(name)?;
    println!("{}", serde_json::to_string_pretty(&catalog_entry_json(&entry)).expect("json"));
    Ok(())
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn cmd_construct(cli: &Cli, args: &ConstructArgs) -> Result<(), CoreError> {
    let mut rc = base_config(cli, "construct");
    rc.symmetry = Some(args.symmetry.clone());
    rc.truncation = Some(args.n);
    rc.route = Some(args.route.clone());
    rc.validate().map_err(CoreError::InvalidArgument)?;

    let entry = solution::entry_for_symmetry(&args.symmetry)?;
    let is_sphere = !entry.model.is_torus();

    let doc = match (args.route.as_str(), is_sphere) {
        ("scalar", false) => {
            let direction = entry
                .direction
                .clone()
                .ok_or_else(|| CoreError::InvalidArgument("entry has no translation direction".into()))?;
            // the eigenproblem normalizes ‖f‖² = 2 (cosine amplitude 2); the
            // stored solution rescales to unit cosine amplitude, the scale the
            // golden anchors (helicity 2π, critical values ±1) are stated at
            let mut pair = solve_constrained_laplacian(&direction, args.n)?;
            if let beltrami_core::scalar_eigen::ScalarRep::Spectral(ref mut f) = pair.f {
                *f = f.scaled(0.5);
            }
            let result = beltrami_from_scalar(&entry, &pair)?;
            let spectral = match &result.field {
                FieldRep::Spectral(s) => s.clone(),
                FieldRep::Analytic(_) => unreachable!("torus construction is spectral"),
            };
            let helicity = spectral.helicity()?;
            solution::SolutionDoc {
                schema: solution::SOLUTION_SCHEMA.to_string(),
                run_config: rc.clone(),
                model: "flat_torus_3".to_string(),
                symmetry: entry.name.clone(),
                direction: Some(direction.to_string()),
                route: "scalar".to_string(),
                mu: result.mu,
                lambda: result.lambda,
                kappa: result.kappa,
                operator_eigenvalue: None,
                helicity: Some(helicity),
                residuals: result.report,
                spectral_field: Some(spectral.to_doc()),
                analytic_field: None,
            }
        }
        ("operator", false) => {
            let direction = entry
                .direction
                .clone()
                .ok_or_else(|| CoreError::InvalidArgument("entry has no translation direction".into()))?;
            let sub = symmetric_mask(&direction, args.n)?;
            let op = assemble_pi_curlinv(&sub)?;
            let top = top_eigenpair(&op)?;
            let x = top.field;
            let mu = 1.0 / top.mu;
            let curl_residual = x.curl().coeff_sup_distance(&x.scaled(mu));
            let helicity = x.helicity()?;
            let report = beltrami_core::scalar_eigen::ConstructionReport {
                curl_residual,
                commutator_residual: 0.0, // support is masked exactly
                cross_identity_residual: curl_residual,
                quadratic_residual: (mu * mu - entry.kappa.unwrap_or(0.0) * mu - mu * mu).abs(),
            };
            solution::SolutionDoc {
                schema: solution::SOLUTION_SCHEMA.to_string(),
                run_config: rc.clone(),
                model: "flat_torus_3".to_string(),
                symmetry: entry.name.clone(),
                direction: Some(direction.to_string()),
                route: "operator".to_string(),
                mu,
                lambda: mu * mu,
                kappa: entry.kappa.unwrap_or(0.0),
                operator_eigenvalue: Some(top.mu),
                helicity: Some(helicity),
                residuals: report,
                spectral_field: Some(x.to_doc()),
                analytic_field: None,
            }
        }
        ("scalar", true) => {
            let pair = beltrami_core::scalar_eigen::golden_sphere_pair();
            let result = beltrami_from_scalar(&entry, &pair)?;
            solution::SolutionDoc {
                schema: solution::SOLUTION_SCHEMA.to_string(),
                run_config: rc.clone(),
                model: "round_sphere_3".to_string(),
                symmetry: entry.name.clone(),
                direction: None,
                route: "scalar".to_string(),
                mu: result.mu,
                lambda: result.lambda,
                kappa: result.kappa,
                operator_eigenvalue: None,
                helicity: None,
                residuals: result.report,
                spectral_field: None,
                analytic_field: Some(solution::ANALYTIC_S3_GOLDEN.to_string()),
            }
        }
        ("operator", true) => {
            return Err(CoreError::InvalidArgument(
                "the operator route needs the torus spectral basis; the sphere ships the scalar golden case only".into(),
            ))
        }
        (other, _) => {
            return Err(CoreError::InvalidArgument(format!(
                "unknown route '{other}' (expected scalar or operator)"
            )))
        }
    };

    let dir = out_dir(&cli.out_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CoreError::InvalidArgument(format!("create {}: {e}", dir.display())))?;
    let path = args.out.clone().unwrap_or_else(|| {
        dir.join(format!(
            "solution_{}_{}_N{}.json",
            doc.symmetry.replace(',', "_"),
            doc.route,
            args.n
        ))
    });
    solution::save(&doc, &path)?;

    // cross-route consistency note when both routes are available
    let cross_route = if doc.model == "flat_torus_3" {
        let direction = entry.direction.clone().expect("torus entry");
        match (solve_constrained_laplacian(&direction, args.n), doc.kappa == 0.0) {
            (Ok(pair), true) => Some((1.0 / doc.mu - 1.0 / pair.lambda.sqrt()).abs() * doc.mu * pair.lambda.sqrt()),
            _ => None,
        }
    } else {
        None
    };
    let summary = serde_json::json!({
        "written": path.display().to_string(),
        "symmetry": doc.symmetry,
        "route": doc.route,
        "mu": doc.mu,
        "lambda": doc.lambda,
        "kappa": doc.kappa,
        "operator_eigenvalue": doc.operator_eigenvalue,
        "helicity": doc.helicity,
        "residuals": doc.residuals,
        "cross_route_mu_difference": cross_route,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(cli: &Cli, path: &std::path::Path) -> Result<(), CoreError> {
    let rc = base_config(cli, "verify");
    rc.validate().map_err(CoreError::InvalidArgument)?;
    let fd = FdConfig::new(rc.fd_step, FdOrder::Two)?;
    let doc = solution::load_doc(path)?;
    let loaded = solution::load(path)?;
    let entry = &loaded.entry;
    let mut table = serde_json::Map::new();
    table.insert("solution".into(), serde_json::json!(path.display().to_string()));
    table.insert("mu".into(), serde_json::json!(doc.mu));
    table.insert(
        "quadratic_residual".into(),
        serde_json::json!((doc.mu * doc.mu - doc.kappa * doc.mu - doc.lambda).abs()),
    );
    match &loaded.spectral {
        Some(x) => {
            let curl_res = x.curl().coeff_sup_distance(&x.scaled(doc.mu));
            let norm_sq = x.l2_norm_sq();
            let helicity = x.helicity()?;
            table.insert("curl_residual".into(), serde_json::json!(curl_res));
            table.insert("divergence_residual".into(), serde_json::json!(x.divergence_residual()));
            table.insert("mean_mode".into(), serde_json::json!(x.mean_magnitude()));
            table.insert("hermitian".into(), serde_json::json!(x.is_hermitian(1e-14)));
            table.insert("helicity".into(), serde_json::json!(helicity));
            table.insert(
                "helicity_relation_residual".into(),
                serde_json::json!((helicity - norm_sq / doc.mu).abs()),
            );
            // symmetry support: modes outside {k·v = 0} must vanish
            if let Some(direction) = &entry.direction {
                let mut off_support = 0.0f64;
                for k in beltrami_core::spectral::modes(x.truncation()) {
                    if k != [0, 0, 0] && !direction.admits(k) {
                        let cc = x.get(k);
                        for z in cc {
                            off_support = off_support.max(z.norm());
                        }
                    }
                }
                table.insert("symmetry_support_residual".into(), serde_json::json!(off_support));
            }
        }
        None => {
            // sphere: FD residuals at catalog sample points
            let cfg = fd;
            let mut curl_res = 0.0f64;
            let mut commutator = 0.0f64;
            for p in entry.sample_points(3) {
                let c = calculus::curl(&entry.model, &loaded.field, &p, cfg)?;
                let want = linalg::scale(loaded.field.value(&p), doc.mu);
                curl_res = curl_res.max(linalg::norm_inf(linalg::sub(c, want)));
                let br = calculus::lie_bracket(&entry.model, &entry.field, &loaded.field, &p, cfg)?;
                commutator = commutator.max(linalg::norm_inf(br));
            }
            table.insert("curl_residual_fd".into(), serde_json::json!(curl_res));
            table.insert("commutator_residual_fd".into(), serde_json::json!(commutator));
        }
    }
    // first-integral gradient identity on a deterministic sample
    let samples: Vec<ChartPoint> = entry.sample_points(3);
    let grad_res = structure::pair_gradient_residual(
        &entry.model,
        &loaded.first_integral,
        &loaded.field,
        &entry.field,
        &samples,
        fd,
    )?;
    table.insert("gradient_identity_residual".into(), serde_json::json!(grad_res));
    println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(table)).expect("json"));
    Ok(())
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

fn parse_point(text: &str) -> Result<[f64; 3], CoreError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CoreError::InvalidArgument(format!("expected x,y,z, got '{text}'")));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .trim()
            .parse::<f64>()
            .map_err(|_| CoreError::InvalidArgument(format!("bad coordinate '{p}'")))?;
    }
    Ok(out)
}

fn cmd_trace(cli: &Cli, args: &TraceArgs) -> Result<(), CoreError> {
    let mut rc = base_config(cli, "trace");
    rc.tol = args.tol;
    rc.validate().map_err(CoreError::InvalidArgument)?;
    let loaded = solution::load(&args.solution)?;
    let seed_point = parse_point(&args.seed_point)?;
    let start = ChartPoint::main(seed_point);
    let t_end = match args.arc_length {
        Some(len) => {
            let speed = loaded.entry.model.g_norm(&start, loaded.field.value(&start));
            if speed <= 0.0 {
                return Err(CoreError::InvalidArgument("field vanishes at the seed".into()));
            }
            len / speed
        }
        None => args.t_end,
    };
    let integ = IntegratorConfig { tol: args.tol, ..Default::default() };
    let traj = fieldline::integrate(&loaded.entry.model, &loaded.field, start, t_end, integ)?;
    let drift = fieldline::first_integral_drift(&traj, &loaded.first_integral);

    let dir = out_dir(&cli.out_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CoreError::InvalidArgument(format!("create {}: {e}", dir.display())))?;
    let path = args.out.clone().unwrap_or_else(|| dir.join("trace.csv"));
    output::write_trace_csv(&path, &rc, &traj, &loaded.first_integral)?;
    if args.gnuplot {
        output::write_trace_gnuplot(&path.with_extension("gp"), &path, loaded.entry.model.is_torus())?;
    }

    let summary = serde_json::json!({
        "written": path.display().to_string(),
        "samples": traj.len(),
        "t_end": t_end,
        "mu": loaded.mu,
        "first_integral_drift": drift,
        "chart_switches": traj.chart_switches,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

// ---------------------------------------------------------------------------
// poincare
// ---------------------------------------------------------------------------

fn parse_section(text: &str) -> Result<SectionSpec, CoreError> {
    let (axis_txt, value_txt) = text
        .split_once('=')
        .ok_or_else(|| CoreError::InvalidArgument(format!("expected axis=value, got '{text}'")))?;
    let axis = match axis_txt.trim() {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        other => return Err(CoreError::InvalidArgument(format!("unknown section axis '{other}'"))),
    };
    let value: f64 = value_txt
        .trim()
        .parse()
        .map_err(|_| CoreError::InvalidArgument(format!("bad section value '{value_txt}'")))?;
    Ok(SectionSpec { axis, value, direction: CrossingDirection::Both })
}

fn cmd_poincare(cli: &Cli, args: &PoincareArgs) -> Result<(), CoreError> {
    let mut rc = base_config(cli, "poincare");
    rc.tol = args.tol;
    rc.validate().map_err(CoreError::InvalidArgument)?;
    let loaded = solution::load(&args.solution)?;
    if !loaded.entry.model.is_torus() {
        return Err(CoreError::InvalidArgument("Poincaré sections are defined on the torus".into()));
    }
    let section = parse_section(&args.section)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let seeds: Vec<[f64; 3]> = (0..args.seeds)
        .map(|_| {
            let mut p = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            p[section.axis] = section.value;
            p
        })
        .collect();
    let integ = IntegratorConfig { tol: args.tol, ..Default::default() };
    let records = fieldline::poincare(
        &loaded.entry.model,
        &loaded.field,
        section,
        &seeds,
        args.crossings,
        integ,
        Some(&loaded.first_integral),
        1e5,
    )?;

    let dir = out_dir(&cli.out_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CoreError::InvalidArgument(format!("create {}: {e}", dir.display())))?;
    let path = args.out.clone().unwrap_or_else(|| dir.join("poincare.csv"));
    output::write_poincare_csv(&path, &rc, &records)?;
    if args.gnuplot {
        let gp = path.with_extension("gp");
        output::write_poincare_gnuplot(&gp, &path, section)?;
    }

    let spreads: Vec<f64> = records
        .iter()
        .map(|r| {
            let vals: Vec<f64> = r.crossings.iter().filter_map(|c| c.f_value).collect();
            if vals.is_empty() {
                0.0
            } else {
                vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - vals.iter().cloned().fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let summary = serde_json::json!({
        "written": path.display().to_string(),
        "seeds": records.len(),
        "total_crossings": records.iter().map(|r| r.crossings.len()).sum::<usize>(),
        "skipped_nontransversal": records.iter().map(|r| r.skipped_nontransversal).sum::<usize>(),
        "max_f_spread": spreads.iter().cloned().fold(0.0f64, f64::max),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> Result<(), CoreError> {
    let mut rc = base_config(cli, "scan");
    rc.grid = Some(args.grid);
    rc.eps_grad_scale = args.eps_grad_scale;
    rc.delta_level_scale = args.delta_level_scale;
    rc.delta_cluster_scale = args.delta_cluster_scale;
    rc.validate().map_err(CoreError::InvalidArgument)?;
    let loaded = solution::load(&args.solution)?;
    let model = &loaded.entry.model;
    let grid = if model.is_torus() {
        ScanGrid::TorusNodes { n: args.grid }
    } else {
        // wide enough for the golden level tori (chart radius up to 1+√2)
        ScanGrid::BoxNodes { lo: [-2.6; 3], hi: [2.6; 3], n: args.grid }
    };
    let scales = ThresholdScales {
        eps_grad_scale: args.eps_grad_scale,
        delta_level_scale: args.delta_level_scale,
        delta_cluster_scale: args.delta_cluster_scale,
    };
    let cfg = FdConfig::new(rc.fd_step, FdOrder::Two)?;
    let scan = structure::scan_field(model, &loaded.first_integral, &grid, cfg)?;
    let crit = structure::critical_scan(&scan, scales);

    let dir = out_dir(&cli.out_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CoreError::InvalidArgument(format!("create {}: {e}", dir.display())))?;
    let report_path = args.out.clone().unwrap_or_else(|| dir.join("scan_report.json"));

    if crit.degenerate {
        // everywhere-collinear pair: f is constant, no components to report
        let report = serde_json::json!({
            "schema": "structure-report/1",
            "run_config": rc,
            "outcome": "degenerate_collinear",
            "f_value": crit.f_min,
            "note": "the first integral is numerically constant: the field and its symmetry are everywhere collinear; no level decomposition exists",
        });
        std::fs::write(&report_path, serde_json::to_string_pretty(&report).expect("json") + "\n")
            .map_err(|e| CoreError::InvalidArgument(format!("write report: {e}")))?;
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        return Ok(());
    }

    // level components at midpoints between consecutive critical values
    // (and at the midlevel of the range when only one critical value exists)
    let mut levels: Vec<f64> = Vec::new();
    for pair in crit.critical_values.windows(2) {
        levels.push(0.5 * (pair[0] + pair[1]));
    }
    if levels.is_empty() {
        levels.push(0.5 * (crit.f_min + crit.f_max));
    }
    let integ = IntegratorConfig { tol: rc.tol, ..Default::default() };
    let mut components = Vec::new();
    for &c in &levels {
        let comps = structure::level_components(
            model,
            &loaded.first_integral,
            &loaded.field,
            &loaded.entry.field,
            c,
            &scan,
            crit.thresholds,
            integ,
            100.0,
        )?;
        components.extend(comps);
    }

    // one chamber record per component seed
    let mut chambers = Vec::new();
    let span = 0.05 * (crit.f_max - crit.f_min);
    for comp in &components {
        let record = structure::chamber_fibration(
            model,
            &loaded.first_integral,
            ChartPoint::main(comp.seed),
            span,
            span,
            crit.thresholds.eps_grad,
            integ,
        )?;
        chambers.push(record);
    }

    let report = serde_json::json!({
        "schema": "structure-report/1",
        "run_config": rc,
        "outcome": "report",
        "f_min": crit.f_min,
        "f_max": crit.f_max,
        "max_grad": crit.max_grad,
        "thresholds": crit.thresholds,
        "critical_values": crit.critical_values,
        "critical_node_count": crit.critical_node_count,
        "gamma_node_count": crit.gamma_node_count,
        "grid": args.grid,
        "component_levels": levels,
        "components": components,
        "chambers": chambers,
    });
    std::fs::write(&report_path, serde_json::to_string_pretty(&report).expect("json") + "\n")
        .map_err(|e| CoreError::InvalidArgument(format!("write report: {e}")))?;

    let csv_path = report_path.with_extension("components.csv");
    output::write_components_csv(&csv_path, &rc, &components)?;
    if args.mask {
        let mask_path = report_path.with_extension("gmask");
        output::write_gamma_mask(&mask_path, &rc, args.grid, &crit)?;
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}
