use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use relsv::combi::{self, ProfileError, Regime, SpinProfile};
use relsv::elsv::{self, Backend, IntersectionTable, Solver, TableCache};
use relsv::hurwitz::{CalibrationSet, HurwitzError, Oracle, OracleConfig};
use relsv::localize::{self, HodgeForm, Mutation};
use relsv::ratcore::scalar::render;
use relsv::Scalar;

// Writes to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! outp {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "relsv", version, about = "Exact r-spin Hurwitz numbers by localization, r-ELSV and characters")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Worker threads for grid commands.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML file supplying defaults for these options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest symmetric-group degree for character tables.
    #[arg(long, global = true)]
    char_bound: Option<usize>,
    /// Directory for fitted intersection tables (also RELSV_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Closed-form family used to calibrate the character oracle.
    #[arg(long, value_enum, global = true)]
    calibration: Option<CalibrationArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a profile and print its derived data.
    Check(ProfileArgs),
    /// Run the Euler-class identity, t-homogeneity and degree checks on a grid.
    Verify(VerifyArgs),
    /// Compute H^r_{g,mu} by one or more methods.
    Hurwitz(HurwitzArgs),
    /// Fit an intersection table from oracle values.
    Fit(FitArgs),
    /// Print the localization contributions of a profile.
    Localize(LocalizeArgs),
    /// Evaluate the r-ELSV formula with a chosen backend.
    Elsv(ElsvArgs),
}

#[derive(clap::Args, Debug)]
struct ProfileArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    r: u32,
    /// Parts of mu, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    mu: Vec<u32>,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    g_max: Option<u32>,
    #[arg(long)]
    l_max: Option<u32>,
    #[arg(long)]
    r_max: Option<u32>,
    #[arg(long)]
    mu_max: Option<u32>,
    #[arg(long, value_enum, default_value = "both")]
    hodge: HodgeArg,
    /// Corrupt one exponent of every base contribution (checks the checker).
    #[arg(long)]
    inject_mutation: bool,
}

#[derive(clap::Args, Debug)]
struct HurwitzArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// oracle, elsv, localize, bruteforce or all; comma separated.
    #[arg(long, value_delimiter = ',', default_value = "oracle")]
    method: Vec<MethodArg>,
}

#[derive(clap::Args, Debug)]
struct FitArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    l: u32,
    #[arg(long)]
    r: u32,
    /// The residue data a_i = r - 1 - (mu_i mod r), comma separated.
    #[arg(long, value_delimiter = ',')]
    residues: Option<Vec<u32>>,
    /// Number of held-out samples to predict.
    #[arg(long)]
    held_out: Option<usize>,
    /// Largest |mu| a sample may have.
    #[arg(long)]
    max_size: Option<u32>,
    /// Also write the table to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct LocalizeArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long, value_enum, default_value = "literal")]
    hodge: HodgeArg,
}

#[derive(clap::Args, Debug)]
struct ElsvArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// special, solve, or table:<path>.
    #[arg(long, default_value = "special")]
    backend: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, Deserialize)]
enum CalibrationArg {
    #[value(name = "all")]
    #[serde(rename = "all")]
    All,
    #[value(name = "01")]
    #[serde(rename = "01")]
    One,
    #[value(name = "02")]
    #[serde(rename = "02")]
    Two,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum HodgeArg {
    Literal,
    Dual,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Oracle,
    Elsv,
    Localize,
    Bruteforce,
    All,
}

/// Keys accepted in the `--config` TOML file. Command-line flags win.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    format: Option<Format>,
    workers: Option<usize>,
    char_bound: Option<usize>,
    cache_dir: Option<PathBuf>,
    calibration: Option<CalibrationArg>,
    held_out: Option<usize>,
    g_max: Option<u32>,
    l_max: Option<u32>,
    r_max: Option<u32>,
    mu_max: Option<u32>,
}

struct RunConfig {
    format: Format,
    oracle: Oracle,
    cache: TableCache,
    held_out: usize,
    file: FileConfig,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<HurwitzError> for Failure {
    fn from(e: HurwitzError) -> Self {
        match e {
            HurwitzError::Profile(ProfileError::Malformed(m)) => Failure::Usage(m),
            e => Failure::Math(e.to_string()),
        }
    }
}

impl From<elsv::ElsvError> for Failure {
    fn from(e: elsv::ElsvError) -> Self {
        match e {
            elsv::ElsvError::Profile(ProfileError::Malformed(m)) => Failure::Usage(m),
            elsv::ElsvError::Io(m) => Failure::Usage(m),
            e => Failure::Math(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            2
        }
    };
    ExitCode::from(code)
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome {
    let file = load_file_config(cli.config.as_deref())?;
    let workers = cli.workers.or(file.workers);
    if let Some(n) = workers {
        if n == 0 {
            return Err(Failure::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let char_bound = cli.char_bound.or(file.char_bound).unwrap_or(relsv::charsym::DEFAULT_BOUND);
    if char_bound == 0 {
        return Err(Failure::Usage("--char-bound must be positive".into()));
    }
    let calibration_set = match cli.calibration.or(file.calibration).unwrap_or(CalibrationArg::Two) {
        CalibrationArg::All => CalibrationSet::All,
        CalibrationArg::One => CalibrationSet::OnePointed,
        CalibrationArg::Two => CalibrationSet::TwoPointed,
    };
    let oracle = Oracle::new(OracleConfig {
        char_bound,
        calibration_set,
        ..OracleConfig::default()
    });
    let cache_dir = cli
        .cache_dir
        .clone()
        .or(file.cache_dir.clone())
        .or_else(|| std::env::var_os(elsv::CACHE_ENV).map(PathBuf::from));
    let cfg = RunConfig {
        format: cli.format.or(file.format).unwrap_or(Format::Json),
        oracle,
        cache: TableCache::new(cache_dir),
        held_out: file.held_out.unwrap_or(3),
        file,
    };
    match cli.command {
        Command::Check(a) => cmd_check(&cfg, &a),
        Command::Verify(a) => cmd_verify(&cfg, &a),
        Command::Hurwitz(a) => cmd_hurwitz(&cfg, &a),
        Command::Fit(a) => cmd_fit(&cfg, &a),
        Command::Localize(a) => cmd_localize(&cfg, &a),
        Command::Elsv(a) => cmd_elsv(&cfg, &a),
    }
}

fn mu_string(mu: &[u32]) -> String {
    mu.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn print_csv(header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(header).map_err(|e| Failure::Math(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Failure::Math(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::Math(e.to_string()))
}

/// Validates `(g, r, mu)`; malformed input is a usage error, an empty space is `Ok(Err(..))`.
fn profile_of(a: &ProfileArgs) -> Result<Result<SpinProfile, ProfileError>, Failure> {
    match combi::validate(a.g, a.r, &a.mu) {
        Ok(p) => Ok(Ok(p)),
        Err(ProfileError::Malformed(m)) => Err(Failure::Usage(m)),
        Err(e) => Ok(Err(e)),
    }
}

fn require_profile(a: &ProfileArgs) -> Result<SpinProfile, Failure> {
    profile_of(a)?.map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_check(cfg: &RunConfig, a: &ProfileArgs) -> Outcome {
    let v = match profile_of(a)? {
        Ok(p) => {
            let mut v = p.to_json();
            v["valid"] = json!(true);
            v["spin_bundle_degree"] = json!(combi::spin_bundle_degree(&p).map_err(|e| Failure::Math(e.to_string()))?);
            v
        }
        Err(e) => json!({"g": a.g, "r": a.r, "mu": a.mu, "valid": false, "reason": e.to_string()}),
    };
    match cfg.format {
        Format::Json => print_json(&v),
        Format::Csv => {
            let get = |k: &str| match &v[k] {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                Value::Array(xs) => xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                x => x.to_string(),
            };
            let header = ["g", "r", "mu", "valid", "m", "a", "regime"];
            print_csv(&header, &[header.iter().map(|k| get(k)).collect()])?;
        }
        Format::Text => match profile_of(a)? {
            Ok(p) => out!(
                "{p}: valid, m={}, a=({}), regime {}",
                p.m,
                mu_string(&p.a),
                p.regime.as_str()
            ),
            Err(e) => out!("g={} r={} mu=({}): {e}", a.g, a.r, mu_string(&a.mu)),
        },
    }
    Ok(true)
}

struct VerifyRow {
    profile: SpinProfile,
    identity: bool,
    homogeneous: bool,
    limit: bool,
    degree: bool,
}

impl VerifyRow {
    fn ok(&self) -> bool {
        self.identity && self.homogeneous && self.limit && self.degree
    }
}

fn cmd_verify(cfg: &RunConfig, a: &VerifyArgs) -> Outcome {
    let f = &cfg.file;
    let grid = combi::grid(
        a.g_max.or(f.g_max).unwrap_or(2),
        a.l_max.or(f.l_max).unwrap_or(3),
        a.r_max.or(f.r_max).unwrap_or(4),
        a.mu_max.or(f.mu_max).unwrap_or(8),
    );
    let forms: &[HodgeForm] = match a.hodge {
        HodgeArg::Literal => &[HodgeForm::Literal],
        HodgeArg::Dual => &[HodgeForm::Dual],
        HodgeArg::Both => &[HodgeForm::Literal, HodgeForm::Dual],
    };
    let mutation = if a.inject_mutation {
        Mutation::BaseTShift(1)
    } else {
        Mutation::None
    };
    let rows: Vec<VerifyRow> = grid
        .par_iter()
        .map(|p| {
            let identity = forms
                .iter()
                .all(|&form| localize::verify_identity_with(p, form, mutation).identity_holds);
            let class = localize::hurwitz_class(p);
            let homogeneous = class.is_t_homogeneous(p.truncation() as i64);
            let limit = class.nonequivariant_limit().is_ok();
            let degree = combi::spin_bundle_degree(p).is_ok();
            VerifyRow {
                profile: p.clone(),
                identity,
                homogeneous,
                limit,
                degree,
            }
        })
        .collect();
    let failures: Vec<&VerifyRow> = rows.iter().filter(|r| !r.ok()).collect();
    let minimal = failures
        .iter()
        .min_by_key(|r| (r.profile.size() + r.profile.l() + r.profile.g, r.profile.r, r.profile.clone()))
        .map(|r| r.profile.clone());
    match cfg.format {
        Format::Json => {
            let out: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "g": r.profile.g, "r": r.profile.r, "mu": r.profile.mu,
                        "identity": r.identity, "t_homogeneous": r.homogeneous,
                        "limit": r.limit, "degree": r.degree,
                    })
                })
                .collect();
            print_json(&json!({
                "rows": out,
                "total": rows.len(),
                "failed": failures.len(),
                "minimal_failure": minimal.as_ref().map(SpinProfile::to_json),
            }));
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.profile.g.to_string(),
                        r.profile.r.to_string(),
                        mu_string(&r.profile.mu),
                        r.identity.to_string(),
                        r.homogeneous.to_string(),
                        r.limit.to_string(),
                        r.degree.to_string(),
                    ]
                })
                .collect();
            print_csv(&["g", "r", "mu", "identity", "t_homogeneous", "limit", "degree"], &body)?;
        }
        Format::Text => {
            for r in &failures {
                out!(
                    "FAIL {}: identity={} t_homogeneous={} limit={} degree={}",
                    r.profile, r.identity, r.homogeneous, r.limit, r.degree
                );
            }
            out!("{} profiles, {} failed", rows.len(), failures.len());
        }
    }
    if let Some(p) = &minimal {
        eprintln!("minimal failing profile: {p}");
    }
    Ok(failures.is_empty())
}

fn solver(cfg: &RunConfig) -> Solver<'_> {
    Solver {
        oracle: &cfg.oracle,
        cache: &cfg.cache,
        held_out: cfg.held_out,
    }
}

/// Localization value: the scalar class in the unstable regimes, otherwise the
/// limit class integrated against the fitted table.
fn localize_value(cfg: &RunConfig, p: &SpinProfile) -> Result<Scalar, Failure> {
    if p.regime != Regime::General {
        return localize::hurwitz_value(p).map_err(|e| Failure::Math(e.to_string()));
    }
    let table = solver(cfg).table(&elsv::TableKey::of(p))?;
    let limit = localize::hurwitz_class(p)
        .nonequivariant_limit()
        .map_err(|e| Failure::Math(e.to_string()))?;
    Ok(elsv::integrate_class(&limit, &table)?)
}

fn cmd_hurwitz(cfg: &RunConfig, a: &HurwitzArgs) -> Outcome {
    let mut methods = Vec::new();
    for &m in &a.method {
        let expanded = match m {
            MethodArg::All => vec![MethodArg::Oracle, MethodArg::Elsv, MethodArg::Localize],
            _ => vec![m],
        };
        for e in expanded {
            if !methods.contains(&e) {
                methods.push(e);
            }
        }
    }
    let profile = profile_of(&a.profile)?;
    let mut values: Vec<(&str, Scalar)> = Vec::new();
    for m in &methods {
        let (name, v) = match (m, &profile) {
            (MethodArg::Oracle, _) => ("oracle", cfg.oracle.evaluate_gmu(a.profile.g, a.profile.r, &a.profile.mu)?),
            (MethodArg::Bruteforce, Ok(p)) => {
                if p.r != 1 {
                    return Err(Failure::Usage("brute force needs r = 1".into()));
                }
                ("bruteforce", cfg.oracle.brute_force(&p.mu, p.m)?)
            }
            (MethodArg::Elsv, Ok(p)) => ("elsv", solver(cfg).evaluate(p, &Backend::SolveFromHurwitz)?),
            (MethodArg::Localize, Ok(p)) => ("localize", localize_value(cfg, p)?),
            (MethodArg::All, _) => unreachable!("expanded above"),
            (MethodArg::Bruteforce, Err(_)) => ("bruteforce", Scalar::default()),
            (MethodArg::Elsv, Err(_)) => ("elsv", Scalar::default()),
            (MethodArg::Localize, Err(_)) => ("localize", Scalar::default()),
        };
        values.push((name, v));
    }
    let agree = values.windows(2).all(|w| w[0].1 == w[1].1);
    match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = values
                .iter()
                .map(|(name, v)| {
                    json!({"g": a.profile.g, "r": a.profile.r, "mu": a.profile.mu, "H": render(v), "method": name})
                })
                .collect();
            print_json(&json!({"rows": rows, "agree": agree}));
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|(name, v)| {
                    vec![
                        a.profile.g.to_string(),
                        a.profile.r.to_string(),
                        mu_string(&a.profile.mu),
                        name.to_string(),
                        render(v),
                    ]
                })
                .collect();
            print_csv(&["g", "r", "mu", "method", "H"], &rows)?;
        }
        Format::Text => {
            for (name, v) in &values {
                out!("{name:<10} {}", render(v));
            }
            out!("{}", if agree { "agree" } else { "disagree" });
        }
    }
    Ok(agree)
}

fn table_json_rows(t: &IntersectionTable) -> Vec<Vec<String>> {
    t.entries
        .iter()
        .map(|((b, k), v)| vec![mu_string(b), k.to_string(), render(v)])
        .collect()
}

fn cmd_fit(cfg: &RunConfig, a: &FitArgs) -> Outcome {
    if a.r == 0 || a.l == 0 {
        return Err(Failure::Usage("r and l must be positive".into()));
    }
    let residues = match &a.residues {
        Some(x) => x.clone(),
        None if a.r == 1 => vec![0; a.l as usize],
        None => return Err(Failure::Usage("--residues is required when r > 1".into())),
    };
    if residues.len() != a.l as usize || residues.iter().any(|&x| x >= a.r) {
        return Err(Failure::Usage(format!(
            "--residues needs {} values below r = {}",
            a.l, a.r
        )));
    }
    let held_out = a.held_out.unwrap_or(cfg.held_out);
    let max_size = a.max_size.unwrap_or(cfg.oracle.config().char_bound as u32);
    let report = elsv::fit_bounded(a.g, a.r, &residues, &cfg.oracle, held_out, max_size)?;
    let enough = report.held_out.len() >= held_out;
    let ok = enough && report.held_out_ok();
    if let Some(path) = &a.out {
        report.table.save(path)?;
    }
    if ok && cfg.cache.dir().is_some() {
        cfg.cache.insert(report.table.clone())?;
    }
    match cfg.format {
        Format::Json => {
            let held: Vec<Value> = report
                .held_out
                .iter()
                .map(|h| {
                    json!({"mu": h.profile.mu, "predicted": render(&h.predicted), "oracle": render(&h.oracle), "agrees": h.agrees()})
                })
                .collect();
            let samples: Vec<&Vec<u32>> = report.samples.iter().map(|p| &p.mu).collect();
            print_json(&json!({
                "table": report.table.to_json(),
                "samples": samples,
                "held_out": held,
                "held_out_ok": report.held_out_ok(),
            }));
        }
        Format::Csv => print_csv(&["b", "k", "value"], &table_json_rows(&report.table))?,
        Format::Text => {
            for row in table_json_rows(&report.table) {
                out!("b=({}) k={}: {}", row[0], row[1], row[2]);
            }
            for h in &report.held_out {
                out!(
                    "held-out mu=({}): predicted {} oracle {}",
                    mu_string(&h.profile.mu),
                    render(&h.predicted),
                    render(&h.oracle)
                );
            }
        }
    }
    if !enough {
        eprintln!(
            "only {} of {held_out} held-out samples with |mu| <= {max_size}",
            report.held_out.len()
        );
    } else if !ok {
        eprintln!("held-out predictions disagree with the oracle");
    }
    Ok(ok)
}

fn cmd_localize(cfg: &RunConfig, a: &LocalizeArgs) -> Outcome {
    let p = require_profile(&a.profile)?;
    let form = match a.hodge {
        HodgeArg::Dual => HodgeForm::Dual,
        _ => HodgeForm::Literal,
    };
    let rep = localize::verify_identity_with(&p, form, Mutation::None);
    match cfg.format {
        Format::Json => print_json(&rep.to_json()),
        Format::Csv => {
            let mut rows = vec![vec!["base".to_string(), rep.base.to_string()]];
            if let Some(v) = &rep.vertex {
                rows.push(vec!["vertex".into(), v.to_string()]);
            }
            if let Some(f) = &rep.flag {
                rows.push(vec!["flag".into(), f.to_string()]);
            }
            for (i, e) in rep.edges.iter().enumerate() {
                rows.push(vec![format!("edge{}", i + 1), e.to_string()]);
            }
            rows.push(vec!["combined".into(), rep.combined_from_lemmas.to_string()]);
            rows.push(vec!["closed".into(), rep.closed_form.to_string()]);
            rows.push(vec!["identity".into(), rep.identity_holds.to_string()]);
            print_csv(&["part", "class"], &rows)?;
        }
        Format::Text => outp!("{}", localize::render_report(&rep)),
    }
    Ok(true)
}

fn cmd_elsv(cfg: &RunConfig, a: &ElsvArgs) -> Outcome {
    let profile = profile_of(&a.profile)?;
    let backend = match a.backend.as_str() {
        "special" => None,
        "solve" => Some(Backend::SolveFromHurwitz),
        s => match s.strip_prefix("table:") {
            Some(path) => Some(Backend::UserTable(IntersectionTable::load(Path::new(path))?)),
            None => return Err(Failure::Usage(format!("unknown backend {s}"))),
        },
    };
    let (name, value) = match &profile {
        Err(_) => (a.backend.clone(), Scalar::default()),
        Ok(p) => {
            let backend = match backend {
                Some(b) => b,
                None => Backend::special_for(p).ok_or_else(|| {
                    Failure::Usage("the special backend only covers g = 0 with one or two parts".into())
                })?,
            };
            (backend.name().to_string(), solver(cfg).evaluate(p, &backend)?)
        }
    };
    match cfg.format {
        Format::Json => print_json(&json!({
            "g": a.profile.g, "r": a.profile.r, "mu": a.profile.mu,
            "backend": name, "H": render(&value),
            "prefactor": profile.as_ref().ok().map(|p| render(&elsv::prefactor(p))),
        })),
        Format::Csv => print_csv(
            &["g", "r", "mu", "backend", "H"],
            &[vec![
                a.profile.g.to_string(),
                a.profile.r.to_string(),
                mu_string(&a.profile.mu),
                name,
                render(&value),
            ]],
        )?,
        Format::Text => out!("{}", render(&value)),
    }
    Ok(true)
}
