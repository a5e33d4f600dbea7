mod config;
mod report;
mod run;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlab::riemann::{solve_riemann, Wave};
use hyperlab::schemes::{SchemeConfig, ThetaSequence};
use hyperlab::verify::{rate_fit, RateFit, RateModel};
use rayon::prelude::*;
use serde::Serialize;

use config::*;
use report::{verify, VerifyRequest};
use run::*;

#[derive(Parser)]
#[command(name = "hyperlab", version, about = "Riemann solvers, schemes and verification for 1-D conservation laws")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a Riemann problem and print the wave fan as JSON.
    Riemann(RiemannArgs),
    /// Run a scheme and write snapshots (CSV) or a run bundle (JSON).
    Solve(SolveArgs),
    /// Verify a run bundle and print a verification report.
    Verify(VerifyArgs),
    /// Fit a convergence rate to an error series or to a ladder of runs.
    Rate(RateArgs),
    /// Run several schemes on one Riemann problem and tabulate L¹ errors.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RiemannArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    normalize: Option<f64>,
    /// Comma-separated left state.
    #[arg(long, allow_hyphen_values = true)]
    left: String,
    #[arg(long, allow_hyphen_values = true)]
    right: String,
    /// Number of profile samples in the output.
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// SVG of the profile `u(ξ)`.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// SVG of the fan in the `(x, t)` plane.
    #[arg(long)]
    fan_plot: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON config file or run bundle; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    normalize: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeId>,
    /// JSON file with the initial data.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// `a,b`
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long, value_enum)]
    sequence: Option<SequenceArg>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    times: Option<String>,
    #[arg(long)]
    max_snapshots: Option<usize>,
    #[arg(long, value_enum)]
    out: Option<OutFormat>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the run bundle here.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SequenceArg {
    ReversedDigit,
    VanDerCorput,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    entropy: bool,
    #[arg(long)]
    eps_cert: bool,
    /// `tau,eps`
    #[arg(long)]
    decompose: Option<String>,
    /// h ladder for the decomposition.
    #[arg(long, default_value = "0.1,0.05,0.025")]
    hs: String,
    /// Time at which jumps are located; mid-run by default.
    #[arg(long)]
    tau: Option<f64>,
    /// Lipschitz modulus for the certificate.
    #[arg(long)]
    modulus: Option<f64>,
    /// Fail (exit 4) when the certified ε exceeds this.
    #[arg(long)]
    max_eps: Option<f64>,
    /// Fail when the scaled weak residual exceeds this.
    #[arg(long)]
    max_weak: Option<f64>,
    /// Fail when the scaled entropy surplus falls below this.
    #[arg(long, allow_hyphen_values = true)]
    min_surplus: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the bundle back with the report attached.
    #[arg(long)]
    bundle_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RateArg {
    Power,
    Sqrtlog,
}

#[derive(Args)]
struct RateArgs {
    /// CSV of `eps,error` rows.
    #[arg(long, conflicts_with = "ladder")]
    series: Option<PathBuf>,
    /// Comma-separated eps values; each is run against the exact fan.
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long, value_enum, default_value = "power")]
    model: RateArg,
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "viscous")]
    scheme: SchemeId,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Log-log SVG of the errors and the fit.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, default_value = "burgers")]
    flux: String,
    #[arg(long)]
    normalize: Option<f64>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    left: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    right: String,
    #[arg(long = "T", default_value_t = 1.0)]
    t_final: f64,
    #[arg(long, default_value = "-1,2", allow_hyphen_values = true)]
    domain: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "godunov,glimm,front-tracking")]
    schemes: String,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: TableFormat,
}

enum Failure {
    Config(anyhow::Error),
    Scheme(hyperlab::Error),
    Runtime(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn config_err<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Config(e.into())
}

fn emit(text: &str, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn thread_pool() -> Outcome<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HYPERLAB_THREADS") {
        let n: usize = v.parse().map_err(|_| config_err(anyhow!("HYPERLAB_THREADS: '{v}' is not a thread count")))?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Failure::Runtime(e.into()))
}

fn parse_pair(s: &str, field: &str) -> Outcome<(f64, f64)> {
    match parse_list(s).map_err(config_err)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(config_err(anyhow!("{field}: expected two comma-separated numbers"))),
    }
}

fn cmd_riemann(a: RiemannArgs) -> Outcome {
    let model = build_model(&a.model, a.normalize).map_err(config_err)?;
    let ul = state(&parse_list(&a.left).map_err(config_err)?, model.n, "left").map_err(config_err)?;
    let ur = state(&parse_list(&a.right).map_err(config_err)?, model.n, "right").map_err(config_err)?;
    let fan = solve_riemann(&model, &ul, &ur).map_err(Failure::Scheme)?;
    let (lo, hi) = match (fan.min_speed(), fan.max_speed()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => (-1.0, 1.0),
    };
    let margin = 0.25 * (hi - lo).max(0.5);
    let n = a.samples.max(2);
    let samples: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let xi = lo - margin + (hi - lo + 2.0 * margin) * k as f64 / (n - 1) as f64;
            (xi, fan.evaluate(xi).iter().copied().collect())
        })
        .collect();
    if let Some(p) = &a.plot {
        let series: Vec<svg::Series> = (0..model.n)
            .map(|i| svg::Series { label: format!("u{}", i + 1), points: samples.iter().map(|s| (s.0, s.1[i])).collect(), markers: false })
            .collect();
        let text = svg::plot(&format!("{} Riemann fan", model.name), "x/t", "u", &series, false);
        emit(&text, Some(p))?;
    }
    if let Some(p) = &a.fan_plot {
        let rays: Vec<(f64, f64)> = fan.waves.iter().map(|w| (w.speed_l(), w.speed_r())).collect();
        emit(&svg::fan_diagram(&format!("{} waves", model.name), &rays), Some(p))?;
    }
    let kinds: Vec<&str> = fan
        .waves
        .iter()
        .map(|w| match w {
            Wave::Shock { .. } => "shock",
            Wave::Rarefaction { .. } => "rarefaction",
            Wave::Contact { .. } => "contact",
            Wave::NonPhysical { .. } => "non_physical",
        })
        .collect();
    let out = serde_json::json!({
        "model": model.name,
        "u_minus": fan.u_minus,
        "u_plus": fan.u_plus,
        "omega": fan.omega,
        "wave_kinds": kinds,
        "waves": fan.waves,
        "samples": samples.iter().map(|(xi, u)| serde_json::json!({ "xi": xi, "u": u })).collect::<Vec<_>>(),
    });
    emit(&to_json(&out), None)
}

fn solve_config(a: &SolveArgs) -> anyhow::Result<ExperimentConfig> {
    let mut file = match &a.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    if let Some(m) = &a.model {
        file.model = Some(m.clone());
    }
    if a.normalize.is_some() {
        file.normalize = a.normalize;
    }
    if let Some(s) = a.scheme {
        file.scheme = Some(s);
    }
    if let Some(p) = &a.data {
        file.data = Some(read_json(p)?);
    }
    let mut sc = file.scheme_config.take().unwrap_or_default();
    if let Some(v) = a.eps {
        sc.eps = v;
    }
    if let Some(v) = a.t_final {
        sc.t_final = v;
    }
    if a.dx.is_some() {
        sc.dx = a.dx;
    }
    if a.dt.is_some() {
        sc.dt = a.dt;
    }
    if let Some(v) = a.delta {
        sc.delta = v;
    }
    if let Some(d) = &a.domain {
        match parse_list(d)?.as_slice() {
            &[lo, hi] => sc.domain = (lo, hi),
            _ => bail!("domain: expected 'a,b'"),
        }
    }
    if let Some(s) = a.sequence {
        sc.sequence = match s {
            SequenceArg::ReversedDigit => ThetaSequence::ReversedDigit,
            SequenceArg::VanDerCorput => ThetaSequence::VanDerCorput,
        };
    }
    if let Some(n) = a.max_snapshots {
        sc.max_snapshots = n;
    }
    file.scheme_config = Some(sc);
    let mut out = file.output.take().unwrap_or_default();
    if let Some(t) = &a.times {
        out.times = parse_list(t)?;
    }
    if let Some(f) = a.out {
        out.format = f;
    }
    if a.output.is_some() {
        out.path = a.output.clone();
    }
    if a.plot.is_some() {
        out.plot = a.plot.clone();
    }
    file.output = Some(out);
    file.finish()
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let cfg = solve_config(&a).map_err(config_err)?;
    let model = cfg.validate().map_err(config_err)?;
    let (sol, timing) = execute(&model, &cfg).map_err(Failure::Scheme)?;
    if let Solution::Grid(g) = &sol {
        for (j, th) in g.thetas.iter().enumerate() {
            eprintln!("glimm: theta_{} = {}", j + 1, th);
        }
    }
    let levels = output_levels(&cfg, &sol);
    let bundle = RunBundle { version: env!("CARGO_PKG_VERSION").to_string(), config: cfg.clone(), solution: sol, report: None, timing };
    if let Some(p) = &cfg.output.plot {
        let series: Vec<svg::Series> = levels
            .iter()
            .flat_map(|(t, x0, dx, cells)| {
                (0..model.n).map(move |i| svg::Series {
                    label: if model.n == 1 { format!("t = {t}") } else { format!("u{} t = {t}", i + 1) },
                    points: cells.iter().enumerate().map(|(k, c)| (x0 + dx * (k as f64 + 0.5), c[i])).collect(),
                    markers: false,
                })
            })
            .collect();
        emit(&svg::plot(&format!("{} / {}", cfg.model, cfg.scheme.as_str()), "x", "u", &series, false), Some(p))?;
    }
    if let Some(p) = &a.bundle {
        emit(&to_json(&bundle), Some(p))?;
    }
    let text = match cfg.output.format {
        OutFormat::Csv => snapshots_csv(model.n, &levels),
        OutFormat::Json => to_json(&bundle),
    };
    emit(&text, cfg.output.path.as_deref())
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let mut bundle: RunBundle = read_json(&a.solution).map_err(config_err)?;
    let cfg = &bundle.config;
    let model = cfg.validate().map_err(config_err)?;
    let domain = cfg.scheme_config.domain;
    let data = cfg.data.to_pc(domain).map_err(config_err)?;
    let decompose = a.decompose.as_deref().map(|d| parse_pair(d, "decompose")).transpose()?;
    let req = VerifyRequest {
        jump_time: a.tau,
        entropy: a.entropy || a.min_surplus.is_some(),
        eps_cert: a.eps_cert || a.max_eps.is_some(),
        modulus: a.modulus,
        decompose,
        hs: parse_list(&a.hs).map_err(config_err)?,
        max_eps: a.max_eps,
        max_weak: a.max_weak,
        min_surplus: a.min_surplus,
    };
    let rep = verify(&model, &cfg.model, &bundle.solution, &data, domain, &req).map_err(|e| match e.downcast::<hyperlab::Error>() {
        Ok(e) => Failure::Scheme(e),
        Err(e) => Failure::Runtime(e),
    })?;
    emit(&to_json(&rep), a.output.as_deref())?;
    let failed: Vec<String> = rep.checks.iter().filter(|c| !c.passed).map(|c| format!("{} = {:e} (threshold {:e})", c.name, c.value, c.threshold)).collect();
    if let Some(p) = &a.bundle_out {
        bundle.report = Some(rep);
        emit(&to_json(&bundle), Some(p))?;
    }
    if !failed.is_empty() {
        return Err(Failure::Verification(failed.join("; ")));
    }
    Ok(())
}

fn read_series(path: &Path) -> anyhow::Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_list(line).as_deref() {
            Ok(&[e, err]) => pts.push((e, err)),
            _ if i == 0 => continue,
            _ => bail!("{}:{}: expected 'eps,error'", path.display(), i + 1),
        }
    }
    Ok(pts)
}

/// Runs `scheme` on the Riemann problem of `p` and measures the L¹ distance to the exact fan at `T`.
fn riemann_error(p: &ProblemArgs, scheme: SchemeId, eps: f64) -> Outcome<f64> {
    let model = build_model(&p.flux, p.normalize).map_err(config_err)?;
    let left = parse_list(&p.left).map_err(config_err)?;
    let right = parse_list(&p.right).map_err(config_err)?;
    let domain = parse_pair(&p.domain, "domain")?;
    let cfg = ExperimentConfig {
        model: p.flux.clone(),
        normalize: p.normalize,
        scheme,
        data: DataSpec::Riemann { x0: 0.0, left, right },
        scheme_config: SchemeConfig { eps, t_final: p.t_final, domain, max_snapshots: 2, ..SchemeConfig::default() },
        output: OutputSpec::default(),
    };
    cfg.validate().map_err(config_err)?;
    let DataSpec::Riemann { left, right, .. } = &cfg.data else { unreachable!() };
    let (ul, ur) = (state(left, model.n, "left").map_err(config_err)?, state(right, model.n, "right").map_err(config_err)?);
    let fan = solve_riemann(&model, &ul, &ur).map_err(Failure::Scheme)?;
    let (sol, _) = execute(&model, &cfg).map_err(Failure::Scheme)?;
    let (profile, h) = final_profile(&sol);
    Ok(l1_to_fan(&profile, &fan, 0.0, sol.t_final(), domain, h))
}

fn cmd_rate(a: RateArgs) -> Outcome {
    let model = match a.model {
        RateArg::Power => RateModel::Power,
        RateArg::Sqrtlog => RateModel::SqrtLog,
    };
    let pts = match (&a.series, &a.ladder) {
        (Some(p), _) => read_series(p).map_err(config_err)?,
        (None, Some(l)) => {
            let eps = parse_list(l).map_err(config_err)?;
            let pool = thread_pool()?;
            let errs: Vec<Outcome<f64>> = pool.install(|| eps.par_iter().map(|&e| riemann_error(&a.problem, a.scheme, e)).collect());
            let mut pts = Vec::new();
            for (e, r) in eps.iter().zip(errs) {
                pts.push((*e, r?));
            }
            pts
        }
        (None, None) => return Err(config_err(anyhow!("rate: give --series or --ladder"))),
    };
    let fit: RateFit = rate_fit(&pts, model).map_err(|e| config_err(anyhow!("series: {e}")))?;
    if let Some(p) = &a.plot {
        let (lo, hi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), q| (l.min(q.0), h.max(q.0)));
        let line: Vec<(f64, f64)> = (0..=32).map(|k| lo * (hi / lo).powf(k as f64 / 32.0)).map(|e| (e, fit.predict(e))).collect();
        let series = [
            svg::Series { label: "measured".into(), points: pts.clone(), markers: true },
            svg::Series { label: "fit".into(), points: line, markers: false },
        ];
        emit(&svg::plot("convergence", "eps", "error", &series, true), Some(p))?;
    }
    emit(&to_json(&fit), a.output.as_deref())
}

#[derive(Serialize)]
struct CompareRow {
    scheme: SchemeId,
    l1_error: f64,
}

fn cmd_compare(a: CompareArgs) -> Outcome {
    let schemes: Vec<SchemeId> = a
        .schemes
        .split(',')
        .map(|s| SchemeId::from_str(s.trim(), true).map_err(|_| config_err(anyhow!("schemes: unknown scheme '{s}'"))))
        .collect::<Outcome<_>>()?;
    if schemes.len() < 2 {
        return Err(config_err(anyhow!("schemes: compare needs at least two schemes")));
    }
    let pool = thread_pool()?;
    let errs: Vec<Outcome<f64>> = pool.install(|| schemes.par_iter().map(|&s| riemann_error(&a.problem, s, a.eps)).collect());
    let mut rows = Vec::new();
    for (s, r) in schemes.iter().zip(errs) {
        rows.push(CompareRow { scheme: *s, l1_error: r? });
    }
    let text = match a.format {
        TableFormat::Json => to_json(&serde_json::json!({
            "model": a.problem.flux,
            "left": a.problem.left,
            "right": a.problem.right,
            "t_final": a.problem.t_final,
            "eps": a.eps,
            "rows": rows,
        })),
        TableFormat::Table => {
            let mut t = format!("{:<20} {:>14}\n", "scheme", "l1_error");
            for r in &rows {
                t.push_str(&format!("{:<20} {:>14.6e}\n", r.scheme.as_str(), r.l1_error));
            }
            t
        }
    };
    emit(&text, None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Riemann(a) => cmd_riemann(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Rate(a) => cmd_rate(a),
        Cmd::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Scheme(e)) => {
            eprintln!("error: {e}");
            eprintln!("{}", serde_json::json!({ "error": e }));
            ExitCode::from(3)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(4)
        }
    }
}
