//! `fofana-kit`: command-line front end for the norms, the maximal operator,
//! weight checks and the verification harness.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fofana_core::verify::{self, Profile, Suite, VerifyParams};
use fofana_core::weights::{self, NakaiOptions, WeightKind, CLASS_CAP};
use fofana_core::{
    maximal_function, norms, CheckReport, Exponent, ExponentPair, LatticeSpec, MaximalConfig, Method, RadiusSpec,
    Status, Variant, WeightFunction, VERSION,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "fofana-kit", version, about = "Amalgam-type norms, maximal operators and inequality checks")]
struct Cli {
    /// Worker threads; 1 gives bitwise-reproducible output.
    #[arg(long, global = true, env = "FOFANA_KIT_THREADS")]
    threads: Option<usize>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Evaluate one norm of a sampled function.
    Norm(NormArgs),
    /// Apply the centered maximal operator.
    Maximal(MaximalArgs),
    /// Check a weight: class constants, doubling, integral condition.
    CheckPhi(CheckPhiArgs),
    /// Run verification suites over a generated corpus.
    Verify(VerifyArgs),
    /// Write the generated corpus.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum NormKind {
    Lebesgue,
    AmalgamContinuous,
    AmalgamDiscrete,
    Fofana,
    GenFofana,
    Morrey,
}

/// Norm request, from flags or a JSON file; flags win.
#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormArgs {
    /// `{"lattice":…, "function":…}` or `{"lattice":…, "values":[…]}`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Norm request JSON; any flag given on the command line overrides it.
    #[arg(long)]
    #[serde(skip)]
    request: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(rename = "norm")]
    kind: Option<NormKind>,
    #[arg(long)]
    q: Option<Exponent>,
    #[arg(long)]
    p: Option<Exponent>,
    #[arg(long)]
    alpha: Option<Exponent>,
    #[arg(long, value_parser = io::parse_phi)]
    phi: Option<WeightKind>,
    /// Single radius for the amalgam norms.
    #[arg(long)]
    r: Option<f64>,
    /// `geometric:r_min:r_max:count`, `list:r1,r2,…` or `all-aligned`.
    #[arg(long)]
    radii: Option<RadiusSpec>,
    #[arg(long)]
    variant: Option<Variant>,
    /// Output JSON; the value is always printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MaximalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = Method::Naive)]
    method: Method,
    #[arg(long, default_value = "all-aligned")]
    radii: RadiusSpec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CheckPhiArgs {
    #[arg(long, value_parser = io::parse_phi)]
    phi: WeightKind,
    #[arg(long)]
    q: Exponent,
    #[arg(long)]
    p: Exponent,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Grid for the class and doubling constants; defaults to 1e-3..1e3 clipped to the weight's domain.
    #[arg(long)]
    grid: Option<RadiusSpec>,
    /// Probe radii for the integral condition.
    #[arg(long, default_value = "geometric:0.01:10:16")]
    probes: RadiusSpec,
    /// Upper integration limit; defaults to 1e4 times the largest probe.
    #[arg(long)]
    t_max: Option<f64>,
    /// Evaluate the integral condition at q = 1 (experimental).
    #[arg(long)]
    allow_q_one: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, value_parser = io::parse_phi)]
    phi: WeightKind,
    #[arg(long)]
    q: Exponent,
    #[arg(long)]
    p: Exponent,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Lattice JSON `{"d":1,"h":…,"L":…}`; overrides `--d`.
    #[arg(long, value_parser = parse_lattice)]
    lattice: Option<LatticeSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Profile::Standard)]
    profile: Profile,
    /// Radii of the sup in the norms; defaults to `geometric:4h:L:25`.
    #[arg(long)]
    radii: Option<RadiusSpec>,
    /// Skip the h/2 recomputation.
    #[arg(long)]
    no_refine: bool,
    /// Evaluate the maximal bound at q = 1 (experimental, no pass semantics).
    #[arg(long)]
    allow_q_one: bool,
    #[arg(long, default_value = "verify-report.json")]
    report: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Profile::Standard)]
    profile: Profile,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, value_parser = parse_lattice)]
    lattice: Option<LatticeSpec>,
    /// Extra power-tail exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long, default_value = "corpus.json")]
    out: PathBuf,
}

fn parse_lattice(s: &str) -> Result<LatticeSpec> {
    serde_json::from_str(s).map_err(|e| anyhow!("--lattice: {e}"))
}

/// Resolved configuration echoed into every report.
#[derive(Serialize)]
struct RunConfig<'a> {
    version: &'static str,
    threads: Option<usize>,
    out_dir: Option<&'a Path>,
    #[serde(flatten)]
    command: &'a Command,
}

/// Outcome of a subcommand, mapped onto the exit code.
enum Outcome {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("error: {}", chain.join(": "));
            ExitCode::from(1)
        }
    }
}

fn run(mut cli: Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads: must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("--threads")?;
    }
    if let Command::Norm(args) = &mut cli.command {
        args.merge_request()?;
    }
    let out_dir = cli.out_dir.as_deref();
    let config = RunConfig { version: VERSION, threads: cli.threads, out_dir, command: &cli.command };
    let config = serde_json::to_value(&config)?;
    match &cli.command {
        Command::Norm(a) => run_norm(a, out_dir, config),
        Command::Maximal(a) => run_maximal(a, out_dir, config),
        Command::CheckPhi(a) => run_check_phi(a, out_dir, config),
        Command::Verify(a) => run_verify(a, out_dir, config),
        Command::Corpus(a) => run_corpus(a, out_dir, config),
    }
}

impl NormArgs {
    fn merge_request(&mut self) -> Result<()> {
        let Some(path) = &self.request else { return Ok(()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("--request: cannot read {}", path.display()))?;
        let req: NormArgs = serde_json::from_str(&text).map_err(|e| anyhow!("--request: {e}"))?;
        self.input = self.input.take().or(req.input);
        self.kind = self.kind.or(req.kind);
        self.q = self.q.or(req.q);
        self.p = self.p.or(req.p);
        self.alpha = self.alpha.or(req.alpha);
        self.phi = self.phi.take().or(req.phi);
        self.r = self.r.or(req.r);
        self.radii = self.radii.take().or(req.radii);
        self.variant = self.variant.or(req.variant);
        self.out = self.out.take().or(req.out);
        Ok(())
    }
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| anyhow!("--{flag}: required for this norm"))
}

fn run_norm(a: &NormArgs, out_dir: Option<&Path>, config: serde_json::Value) -> Result<Outcome> {
    let kind = need(&a.kind, "kind")?;
    let f = io::read_function(&need(&a.input, "input")?)?;
    let lattice = f.lattice().clone();
    let pair = || -> Result<ExponentPair> {
        ExponentPair::new(need(&a.q, "q")?, need(&a.p, "p")?).map_err(|e| anyhow!("--q/--p: {e}"))
    };
    let radii = || -> Result<_> {
        a.radii
            .clone()
            .unwrap_or_else(|| RadiusSpec::default_for(&lattice))
            .resolve(Some(&lattice))
            .map_err(|e| anyhow!("--radii: {e}"))
    };
    let weight = || -> Result<WeightFunction> {
        WeightFunction::new(need(&a.phi, "phi")?, lattice.dim()).map_err(|e| anyhow!("--phi: {e}"))
    };
    let (value, argmax_r, trace) = match kind {
        NormKind::Lebesgue => (norms::lebesgue_norm(&f, need(&a.q, "q")?), None, vec![]),
        NormKind::AmalgamContinuous => {
            (norms::amalgam_continuous(&f, need(&a.r, "r")?, pair()?).map_err(|e| anyhow!("--r: {e}"))?, None, vec![])
        }
        NormKind::AmalgamDiscrete => {
            (norms::amalgam_discrete(&f, need(&a.r, "r")?, pair()?).map_err(|e| anyhow!("--r: {e}"))?, None, vec![])
        }
        kind => {
            let nv = match kind {
                NormKind::Fofana => norms::fofana_norm(&f, pair()?, need(&a.alpha, "alpha")?, &radii()?)
                    .map_err(|e| anyhow!("--alpha: {e}"))?,
                NormKind::GenFofana => {
                    let variant = a.variant.unwrap_or_default();
                    norms::generalized_fofana_norm(&f, pair()?, &weight()?, &radii()?, variant)
                        .map_err(|e| anyhow!("--radii/--variant: {e}"))?
                }
                _ => norms::morrey_norm(&f, need(&a.q, "q")?, &weight()?, &radii()?).map_err(|e| anyhow!("--q: {e}"))?,
            };
            (nv.value, Some(nv.argmax_r), nv.trace)
        }
    };
    println!("{value}");
    if let Some(out) = &a.out {
        let body = json!({ "config": config, "value": value, "argmax_r": argmax_r, "trace": trace });
        io::write_json(&io::resolve(out_dir, out), &body)?;
    }
    Ok(Outcome::Ok)
}

fn run_maximal(a: &MaximalArgs, out_dir: Option<&Path>, config: serde_json::Value) -> Result<Outcome> {
    let f = io::read_function(&a.input)?;
    let radii = a.radii.resolve(Some(f.lattice())).map_err(|e| anyhow!("--radii: {e}"))?;
    let cfg = MaximalConfig::new(radii, a.method);
    let mf = maximal_function(&f, &cfg)?;
    let mut body = json!({
        "config": config,
        "lattice": mf.lattice().spec(),
        "values": mf.values(),
    });
    if a.method == Method::PrefixCube {
        let factors: Vec<_> = cfg.sandwich_factors(f.lattice()).into_iter().map(|(r, k)| json!([r, k])).collect();
        body["sandwich_factors"] = json!(factors);
    }
    io::write_json(&io::resolve(out_dir, &a.out), &body)?;
    Ok(Outcome::Ok)
}

fn run_check_phi(a: &CheckPhiArgs, out_dir: Option<&Path>, config: serde_json::Value) -> Result<Outcome> {
    let w = WeightFunction::new(a.phi.clone(), a.d).map_err(|e| anyhow!("--phi: {e}"))?;
    let grid = match &a.grid {
        Some(g) => g.resolve::<f64>(None).map_err(|e| anyhow!("--grid: {e}"))?,
        None => verify::class_grid(&w)?,
    };
    let class = weights::check_class(&w, a.q, a.p, &grid, CLASS_CAP).map_err(|e| anyhow!("--q/--p: {e}"))?;
    let doubling = weights::check_doubling(&w, &grid)?;
    let probes = a.probes.resolve::<f64>(None).map_err(|e| anyhow!("--probes: {e}"))?;
    let t_max = a.t_max.unwrap_or(1e4 * probes.max());
    let opts = NakaiOptions { allow_q_one: a.allow_q_one, ..NakaiOptions::default() };
    let (nakai, nakai_note) = match weights::nakai_constant(&w, a.q, a.p, &probes, t_max, opts) {
        Ok(n) => (Some(n), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let divergent = nakai.as_ref().is_some_and(|n| n.divergent);
    let body = json!({
        "config": config,
        "phi": w.label(),
        "class": class,
        "doubling": doubling,
        "nakai": nakai,
        "nakai_note": nakai_note,
    });
    let text = serde_json::to_string_pretty(&body)? + "\n";
    match &a.out {
        Some(out) => io::write_atomic(&io::resolve(out_dir, out), text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(if class.pass && !divergent { Outcome::Ok } else { Outcome::CheckFailed })
}

#[derive(Serialize)]
struct SuiteEntry<'a> {
    suite: Suite,
    report: &'a CheckReport,
}

fn run_verify(a: &VerifyArgs, out_dir: Option<&Path>, config: serde_json::Value) -> Result<Outcome> {
    let lattice = a.lattice.unwrap_or_else(|| verify::default_lattice(a.d));
    let mut params = VerifyParams::new(a.q, a.p, a.phi.clone(), lattice.d);
    params.lattice = lattice;
    params.seed = a.seed;
    params.profile = a.profile;
    params.radii = a.radii.clone();
    params.check.refine = !a.no_refine;
    params.check.allow_q_one = a.allow_q_one;
    let reports = verify::run_suites(a.suite, &params)?;

    let failed = reports.iter().any(|(_, r)| r.status.is_failure());
    let overall = if failed { Status::Fail } else { Status::Pass };
    let suites: Vec<SuiteEntry> = reports.iter().map(|(s, r)| SuiteEntry { suite: *s, report: r }).collect();
    let body = json!({ "config": config, "params": params, "status": overall, "suites": suites });
    io::write_json(&io::resolve(out_dir, &a.report), &body)?;

    if let Some(csv_path) = &a.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "case_id", "input_desc", "r", "lhs", "rhs", "ratio", "pass"])?;
        for (suite, rep) in &reports {
            for row in &rep.rows {
                w.write_record([
                    suite.to_string(),
                    row.case_id.clone(),
                    row.input_desc.clone(),
                    row.r.map(|r| r.to_string()).unwrap_or_default(),
                    row.lhs.to_string(),
                    row.rhs.to_string(),
                    row.ratio.to_string(),
                    row.pass.to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| anyhow!("csv: {e}"))?;
        io::write_atomic(&io::resolve(out_dir, csv_path), &bytes)?;
    }
    for (suite, rep) in &reports {
        let stat = rep.statistic_value().map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
        println!("{suite}: {} ({stat})", status_name(rep.status));
    }
    Ok(if failed { Outcome::CheckFailed } else { Outcome::Ok })
}

fn status_name(s: Status) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn run_corpus(a: &CorpusArgs, out_dir: Option<&Path>, config: serde_json::Value) -> Result<Outcome> {
    let lattice = a.lattice.unwrap_or_else(|| verify::default_lattice(a.d));
    let corpus = verify::generate_corpus(a.seed, &lattice, a.profile, &a.alphas)?;
    let body = json!({ "config": config, "corpus": corpus });
    io::write_json(&io::resolve(out_dir, &a.out), &body)?;
    Ok(Outcome::Ok)
}
