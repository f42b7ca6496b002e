use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{anyhow, Context};
use kazhdan::certify::{certify, Certificate};
use kazhdan::chevalley::BallCache;
use kazhdan::pipeline::{build_problem, GroupSpec, Target};
use kazhdan::replicate::{
    assemble_levels, format_rational, incidence_table, render_tables, Constant, ConstantSet, ReportOptions,
};
use kazhdan::rootsys::{Family, PlaneCensus, RootSystem};
use kazhdan::sos::{solve, write_sdpa, Backend, SolverConfig, SolverStatus};
use kazhdan::Exec;
use num_traits::ToPrimitive;
use serde_json::json;
use tracing_subscriber::layer::SubscriberExt;
use tracing_subscriber::util::SubscriberInitExt;
use tracing_subscriber::{fmt, EnvFilter, Layer};

use crate::config::RunConfig;
use crate::{CacheArgs, Cli, Command, Failure, Format, ProblemArgs, EXIT_CERTIFICATION, EXIT_SOLVER, EXIT_USAGE};

type Outcome = Result<(), Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_USAGE, anyhow!("{msg}"))
}

fn init_logging(verbose: u8, json_path: Option<&Path>) -> anyhow::Result<()> {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let human = fmt::layer()
        .with_writer(std::io::stderr)
        .with_target(false)
        .with_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(level)));
    let json = match json_path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .with_context(|| format!("opening log {}", p.display()))?;
            Some(
                fmt::layer()
                    .json()
                    .with_writer(Mutex::new(file))
                    .with_filter(EnvFilter::new("info")),
            )
        }
        None => None,
    };
    tracing_subscriber::registry().with(human).with(json).try_init().ok();
    Ok(())
}

fn exec_for(jobs: Option<usize>) -> anyhow::Result<Exec> {
    match jobs {
        Some(0) => Err(anyhow!("--jobs must be positive")),
        Some(1) => Ok(Exec::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(_n).build_global().ok();
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::default()),
    }
}

fn cache_for(args: &CacheArgs, cfg: &RunConfig) -> Option<BallCache> {
    if args.no_cache {
        return None;
    }
    args.cache_dir
        .clone()
        .or_else(|| cfg.cache_dir.clone())
        .map(BallCache::new)
}

fn parse_family(s: &str) -> Result<Family, Failure> {
    s.parse::<Family>().map_err(Failure::from)
}

fn problem_spec(p: &ProblemArgs, cfg: &RunConfig) -> Result<(GroupSpec, Target, usize), Failure> {
    let family = parse_family(&p.family)?;
    if !matches!(family, Family::A | Family::C) {
        return Err(usage(format!("solving is implemented for types A and C, not {family}")));
    }
    family.check_rank(p.rank)?;
    let target: Target = p
        .target
        .as_deref()
        .or(cfg.target.as_deref())
        .unwrap_or("delta_sq")
        .parse()?;
    let radius = p.radius.or(cfg.radius).unwrap_or(2);
    Ok((GroupSpec::Chevalley { family, rank: p.rank }, target, radius))
}

pub fn run(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::new(EXIT_USAGE, e))?,
        None => RunConfig::default(),
    };
    let log_path = cli.log_json.clone().or_else(|| match &cli.command {
        Command::Solve { output, .. } => Some(
            output
                .clone()
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("certificates"))
                .join("kazhdan.log.jsonl"),
        ),
        _ => None,
    });
    init_logging(cli.verbose, log_path.as_deref())?;
    let exec = exec_for(cli.jobs.or(cfg.jobs)).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    match cli.command {
        Command::Roots { family, rank, format } => roots(&family, rank, format),
        Command::Solve {
            problem,
            solver,
            tol,
            max_iter,
            time_limit,
            fixed_lambda,
            certify_unconverged,
            checkpoint_every,
            output,
            cache,
            format,
        } => {
            let mut scfg = cfg.solver.clone();
            if let Some(s) = solver {
                scfg.backend = s.parse::<Backend>()?;
            }
            if let Some(t) = tol {
                scfg.tolerance = t;
            }
            if let Some(m) = max_iter {
                scfg.max_iter = m;
            }
            if time_limit.is_some() {
                scfg.time_limit_sec = time_limit;
            }
            if fixed_lambda.is_some() {
                scfg.fixed_lambda = fixed_lambda;
            }
            if let Some(c) = checkpoint_every {
                scfg.checkpoint_interval_sec = c;
            }
            let out = output
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("certificates"));
            solve_cmd(&problem, scfg, certify_unconverged, &out, &cache, &cfg, exec, format)
        }
        Command::Verify { certificates, cache } => verify_cmd(&certificates, cache_for(&cache, &cfg), exec),
        Command::Report {
            constants,
            certificates,
            force,
            only,
            max_rank,
            format,
            output,
            cache,
        } => {
            let set = load_constants(constants.as_ref().or(cfg.constants.as_ref()))?;
            let only = only.as_deref().map(parse_family).transpose()?;
            report_cmd(
                set,
                &certificates,
                force,
                ReportOptions { max_rank, only },
                format,
                output.as_deref(),
                cache_for(&cache, &cfg),
                exec,
            )
        }
        Command::Trace { n, constants } => {
            let set = load_constants(constants.as_ref().or(cfg.constants.as_ref()))?;
            let (bound, trace) = assemble_levels(n, &set)?;
            let out = json!({ "bound": bound, "trace": trace });
            println!("{}", serde_json::to_string_pretty(&out).map_err(anyhow::Error::from)?);
            Ok(())
        }
        Command::Export { problem, output, cache } => {
            let (group, target, radius) = problem_spec(&problem, &cfg)?;
            let p = build_problem(&group, target, radius, exec, cache_for(&cache, &cfg).as_ref())?;
            let s = write_sdpa(&p, &output)?;
            println!(
                "wrote {}: {} constraints, blocks {:?}",
                output.display(),
                s.rhs.len(),
                s.block_sizes
            );
            Ok(())
        }
    }
}

fn load_constants(path: Option<&PathBuf>) -> Result<ConstantSet, Failure> {
    match path {
        Some(p) => ConstantSet::load(p).map_err(Failure::from),
        None => Ok(ConstantSet::shipped()),
    }
}

fn roots(family: &str, rank: usize, format: Format) -> Outcome {
    let family = parse_family(family)?;
    let rs = RootSystem::build(family, rank)?;
    let census = PlaneCensus::new(&rs)?;
    let incidence = incidence_table(&rs)?;
    let gamma = census.gamma();
    // one incidence profile per root length
    let mut profiles: BTreeMap<&str, BTreeMap<String, usize>> = BTreeMap::new();
    for (a, inc) in incidence.iter().enumerate() {
        let len = if !rs.has_two_lengths() {
            "all"
        } else if rs.is_long(a) {
            "long"
        } else {
            "short"
        };
        profiles.entry(len).or_insert_with(|| {
            inc.iter()
                .filter(|(_, &k)| k > 0)
                .map(|(t, &k)| (t.to_string(), k))
                .collect()
        });
    }
    let census_counts: BTreeMap<String, usize> = census
        .type_census()
        .into_iter()
        .filter(|(_, k)| *k > 0)
        .map(|(t, k)| (t.to_string(), k))
        .collect();
    let note = census.planes().is_empty().then_some("no admissible planes");
    match format {
        Format::Json => {
            let out = json!({
                "system": rs.to_json(),
                "generators": rs.generator_count(),
                "planes": census_counts,
                "gamma": gamma,
                "incidence": profiles,
                "note": note,
            });
            println!("{}", serde_json::to_string_pretty(&out).map_err(anyhow::Error::from)?);
        }
        Format::Text => {
            println!("{family}{rank}: {} roots, |S| = {}", rs.len(), rs.generator_count());
            for r in rs.roots() {
                println!("  {:?}", r.coords());
            }
            println!("planes: {census_counts:?}");
            println!("gamma = {gamma}");
            for (len, inc) in &profiles {
                println!("incidence ({len} roots): {inc:?}");
            }
            if let Some(n) = note {
                println!("note: {n}");
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve_cmd(
    problem: &ProblemArgs,
    mut scfg: SolverConfig,
    certify_unconverged: bool,
    out: &Path,
    cache_args: &CacheArgs,
    cfg: &RunConfig,
    exec: Exec,
    format: Format,
) -> Outcome {
    let (group, target, radius) = problem_spec(problem, cfg)?;
    let cache = cache_for(cache_args, cfg);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    // fixed-λ iterates solve a different problem and must not be resumed as optimizing ones
    let suffix = scfg.fixed_lambda.map_or(String::new(), |l| format!("-at{l}"));
    let ckpt = out
        .join("checkpoints")
        .join(format!("{group}-{target}-R{radius}{suffix}").replace([' ', '.'], "_"));
    fs::create_dir_all(ckpt.parent().expect("has parent")).map_err(anyhow::Error::from)?;
    if cache_args.no_cache {
        for ext in ["json", "bin"] {
            let _ = fs::remove_file(ckpt.with_extension(ext));
        }
    }
    scfg.checkpoint_path = Some(ckpt);
    let effective = RunConfig {
        radius: Some(radius),
        target: Some(target.to_string()),
        solver: scfg.clone(),
        ..cfg.clone()
    };
    let config_json = serde_json::to_string(&effective).map_err(anyhow::Error::from)?;

    tracing::info!(%group, %target, radius, "building problem");
    let p = build_problem(&group, target, radius, exec, cache.as_ref())?;
    tracing::info!(n = p.n, constraints = p.num_constraints(), "solving");
    let mut sol = solve(&p, &scfg)?;
    if certify_unconverged && sol.status == SolverStatus::Failed && sol.lambda.is_finite() {
        tracing::warn!(r_p = sol.stats.primal_residual, "certifying an unconverged iterate");
        sol.status = SolverStatus::NearOptimal;
    }
    if !sol.status.is_usable() {
        return Err(Failure::new(
            EXIT_SOLVER,
            anyhow!(
                "solver finished with status {:?} after {} iterations: {}",
                sol.status,
                sol.stats.iterations,
                sol.stats.message
            ),
        ));
    }
    let bound = certify(&p, &sol, &cfg.certify).map_err(|e| Failure::new(EXIT_CERTIFICATION, e))?;
    let cert = Certificate::new(group, target, &p, &bound, sol.stats.clone(), sol.lambda, &config_json);
    let path = cert.write(&bound.gram, out)?;
    // the file must stand on its own
    Certificate::replay(&path, exec, cache.as_ref()).map_err(|e| Failure::new(EXIT_CERTIFICATION, e))?;
    let v = &bound.verified;
    let lambda_cert = v.lambda_certified.to_f64().unwrap_or(f64::NAN);
    tracing::info!(path = %path.display(), lambda_certified = lambda_cert, "certificate written");
    match format {
        Format::Json => println!(
            "{}",
            json!({
                "certificate": path,
                "lambda_solver": sol.lambda,
                "lambda_certified": format_rational(&v.lambda_certified),
                "lambda_certified_f64": lambda_cert,
                "residual_l1": v.residual_l1.to_f64(),
                "kappa_lb": bound.kappa_lower_bound,
            })
        ),
        Format::Text => {
            println!(
                "{} {} R={}: solver lambda {:.6}",
                cert.group, target, radius, sol.lambda
            );
            println!(
                "certified lambda {lambda_cert:.6} (residual l1 {:.3e}), kappa >= {:.6}",
                v.residual_l1.to_f64().unwrap_or(f64::NAN),
                bound.kappa_lower_bound
            );
            println!("certificate {}", path.display());
        }
    }
    Ok(())
}

fn verify_cmd(paths: &[PathBuf], cache: Option<BallCache>, exec: Exec) -> Outcome {
    let mut failed = 0;
    for path in paths {
        match Certificate::replay(path, exec, cache.as_ref()) {
            Ok(v) => println!(
                "ok   {}: lambda_certified = {:.9}",
                path.display(),
                v.lambda_certified.to_f64().unwrap_or(f64::NAN)
            ),
            Err(e) => {
                failed += 1;
                println!("FAIL {}: {e}", path.display());
            }
        }
    }
    if failed > 0 {
        return Err(Failure::new(
            EXIT_CERTIFICATION,
            anyhow!("{failed} of {} certificates failed", paths.len()),
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn report_cmd(
    mut set: ConstantSet,
    certs: &[PathBuf],
    force: bool,
    opts: ReportOptions,
    format: Format,
    output: Option<&Path>,
    cache: Option<BallCache>,
    exec: Exec,
) -> Outcome {
    for path in certs {
        Certificate::replay(path, exec, cache.as_ref())
            .with_context(|| format!("certificate {} does not verify", path.display()))
            .map_err(|e| Failure::new(EXIT_CERTIFICATION, e))?;
        let c = Constant::from_certificate(&Certificate::load(path)?)?;
        let statement = c.statement;
        let used = set.offer(c, force);
        tracing::info!(path = %path.display(), %statement, used, "certificate constant offered");
    }
    let report = render_tables(&set, opts)?;
    let text = report.to_text();
    let json = report.to_json()?;
    if let Some(dir) = output {
        fs::create_dir_all(dir).map_err(anyhow::Error::from)?;
        fs::write(dir.join("report.json"), &json).map_err(anyhow::Error::from)?;
        fs::write(dir.join("report.txt"), &text).map_err(anyhow::Error::from)?;
    }
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{json}"),
    }
    Ok(())
}
