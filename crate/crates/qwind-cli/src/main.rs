//! Command-line front end for the winding-coset verification library.
//!
//! Every subcommand writes its result to stdout (deterministically: the
//! same invocation always produces the same bytes) and progress notes to
//! stderr. Exit codes: 0 on success, 1 when a verification ran and
//! failed, 2 on usage or configuration errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qwind_core::affine::{
    central_charge, coset_central_charge, minimal_model_m, winding_prefactor,
};
use qwind_core::coset::{
    catalog, default_verification_plan, identity_default_order, verify_case, verify_identity,
    verify_projection, RowReport,
};
use qwind_core::freudenthal::{string_function, weight_character};
use qwind_core::qseries::format_rational;
use qwind_core::virasoro::{central_charge as virasoro_charge, kac_table};
use qwind_core::{Algebra, Normalization, RootSystem, Weight};

#[derive(Parser)]
#[command(
    name = "qwind",
    version,
    about = "Exact q-series engine for winding-coset branching rules"
)]
struct Cli {
    /// Defaults file with one key=value per line; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Central charges of a winding pair and the matched minimal model.
    Charge(ChargeArgs),
    /// Canonical Kac labels of one minimal model with their weights.
    KacTable(KacTableArgs),
    /// Weight-graded character table of one integrable module, as JSON.
    Character(CharacterArgs),
    /// A single string function of an integrable module, as JSON.
    String(StringArgs),
    /// Check branching rows and named q-series identities.
    Verify(VerifyArgs),
    /// Root-system data (Cartan matrix, roots, comarks), as JSON.
    DumpRootsys(DumpArgs),
}

#[derive(Args)]
struct ChargeArgs {
    #[arg(long)]
    algebra: Option<String>,
    /// Base level.
    #[arg(long)]
    k: Option<i64>,
    /// Winding index.
    #[arg(long)]
    j: Option<i64>,
}

#[derive(Args)]
struct KacTableArgs {
    /// Minimal model index; c = 1 - 6/(m(m+1)).
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CharacterArgs {
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    level: Option<i64>,
    /// Dynkin labels of the highest weight, e.g. "[1,0]" or "1,0".
    #[arg(long)]
    weight: Option<String>,
    /// Depth of the grading, inclusive.
    #[arg(long)]
    grades: Option<i64>,
    /// Shift exponents to L_0 - c/24 eigenvalues.
    #[arg(long)]
    normalized: bool,
}

#[derive(Args)]
struct StringArgs {
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    level: Option<i64>,
    /// Dynkin labels of the highest weight.
    #[arg(long)]
    weight: Option<String>,
    /// Dynkin labels of the weight whose string is wanted.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    grades: Option<i64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every branching row, every named identity, and the
    /// projection extraction at their default depths.
    #[arg(long)]
    all: bool,
    /// Verify the branching rows of one algebra.
    #[arg(long, value_name = "ALGEBRA")]
    case: Option<String>,
    /// Verify one named identity: eqap, eqaq, eqar, or eqas.
    #[arg(long, value_name = "ID")]
    identity: Option<String>,
    /// q-power to check through (defaults depend on the target).
    #[arg(long)]
    order: Option<i64>,
    /// Compare graded dimensions instead of every weight string.
    #[arg(long, conflicts_with = "full_z")]
    specialized: bool,
    /// Compare every weight string (the default for small algebras).
    #[arg(long)]
    full_z: bool,
    /// Emit a JSON report instead of text lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    algebra: Option<String>,
}

fn main() -> ExitCode {
    // Die quietly when a pipe closes early (e.g. `qwind ... | head`)
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let config = match load_config(cli.config.as_deref()) {
        Ok(map) => map,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: Option<&std::path::Path>) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config {} line {}: expected key=value, got {raw:?}",
                path.display(),
                idx + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Command-line value if given, else the config value under `key`.
fn resolve<T: FromStr>(
    flag: Option<T>,
    config: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| format!("config key {key}: cannot parse {raw:?}")),
    }
}

fn require<T>(value: Option<T>, key: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("missing --{key} (or config key {key})"))
}

fn parse_algebra(name: &str) -> Result<Algebra, String> {
    Algebra::from_str(name).map_err(|e| e.to_string())
}

/// Returns Ok(true) on success, Ok(false) on a verification failure.
fn run(command: Command, config: &BTreeMap<String, String>) -> Result<bool, String> {
    match command {
        Command::Charge(args) => {
            let algebra = require(resolve(args.algebra, config, "algebra")?, "algebra")?;
            let algebra = parse_algebra(&algebra)?;
            let k = resolve(args.k, config, "k")?.unwrap_or(1);
            let j = resolve(args.j, config, "j")?.unwrap_or(2);
            if k < 1 || j < 2 {
                return Err(format!("need k >= 1 and j >= 2, got k={k} j={j}"));
            }
            let rs = RootSystem::new(algebra);
            let c_base = central_charge(&rs, k);
            let c_wound = central_charge(&rs, j * k);
            let coset = coset_central_charge(&rs, k, j);
            let pref = winding_prefactor(&rs, k, j);
            println!("algebra = {algebra}");
            println!("k = {k}");
            println!("j = {j}");
            println!("c(k) = {}", format_rational(&c_base));
            println!("c(jk) = {}", format_rational(&c_wound));
            println!("coset charge = {}", format_rational(&coset));
            match minimal_model_m(&coset) {
                Some(m) => println!("minimal model m = {m}"),
                None => println!("minimal model m = none"),
            }
            println!("prefactor = {}", format_rational(&pref));
            Ok(true)
        }
        Command::KacTable(args) => {
            let m = require(resolve(args.m, config, "m")?, "m")?;
            let json = args.json || config_flag(config, "json")?;
            let labels = kac_table(m).map_err(|e| e.to_string())?;
            let c = virasoro_charge(m);
            if json {
                let rows: Vec<serde_json::Value> = labels
                    .iter()
                    .map(|l| {
                        serde_json::json!({
                            "r": l.r,
                            "s": l.s,
                            "h": format_rational(&l.conformal_weight()),
                        })
                    })
                    .collect();
                let doc = serde_json::json!({
                    "m": m,
                    "c": format_rational(&c),
                    "labels": rows,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                println!(
                    "m = {m} (c = {}), {} canonical labels",
                    format_rational(&c),
                    labels.len()
                );
                for l in &labels {
                    println!(
                        "({},{}) h = {}",
                        l.r,
                        l.s,
                        format_rational(&l.conformal_weight())
                    );
                }
            }
            Ok(true)
        }
        Command::Character(args) => {
            let algebra = require(resolve(args.algebra, config, "algebra")?, "algebra")?;
            let algebra = parse_algebra(&algebra)?;
            let rs = RootSystem::new(algebra);
            let level = require(resolve(args.level, config, "level")?, "level")?;
            let weight = require(resolve(args.weight, config, "weight")?, "weight")?;
            let weight = Weight::parse(&weight, rs.rank).map_err(|e| e.to_string())?;
            let grades = resolve(args.grades, config, "grades")?.unwrap_or(8);
            let normalized = args.normalized || config_flag(config, "normalized")?;
            eprintln!("computing {algebra} level {level} top {weight} to grade {grades}");
            let mut character =
                weight_character(&rs, level, &weight, grades).map_err(|e| e.to_string())?;
            if normalized {
                character = character.with_normalization(&rs, Normalization::Normalized);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&character.to_json()).unwrap()
            );
            Ok(true)
        }
        Command::String(args) => {
            let algebra = require(resolve(args.algebra, config, "algebra")?, "algebra")?;
            let algebra = parse_algebra(&algebra)?;
            let rs = RootSystem::new(algebra);
            let level = require(resolve(args.level, config, "level")?, "level")?;
            let weight = require(resolve(args.weight, config, "weight")?, "weight")?;
            let weight = Weight::parse(&weight, rs.rank).map_err(|e| e.to_string())?;
            let mu = require(resolve(args.mu, config, "mu")?, "mu")?;
            let mu = Weight::parse(&mu, rs.rank).map_err(|e| e.to_string())?;
            let grades = resolve(args.grades, config, "grades")?.unwrap_or(8);
            eprintln!("computing {algebra} level {level} top {weight} to grade {grades}");
            let character =
                weight_character(&rs, level, &weight, grades).map_err(|e| e.to_string())?;
            let string = string_function(&rs, &character, &mu).map_err(|e| e.to_string())?;
            let doc = serde_json::json!({
                "algebra": algebra.name(),
                "level": level,
                "highest": weight,
                "mu": mu,
                "first_grade": string.first_grade,
                "series": string.series,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(true)
        }
        Command::Verify(args) => run_verify(args, config),
        Command::DumpRootsys(args) => {
            let algebra = require(resolve(args.algebra, config, "algebra")?, "algebra")?;
            let algebra = parse_algebra(&algebra)?;
            let rs = RootSystem::new(algebra);
            let roots: Vec<serde_json::Value> = rs
                .positive_roots
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "simple_coords": r.simple_coords,
                        "dynkin": r.dynkin,
                        "norm_s": r.norm_s,
                        "height": r.height,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "algebra": algebra.name(),
                "rank": rs.rank,
                "scale": rs.scale,
                "cartan": rs.cartan(),
                "marks": rs.marks,
                "comarks": rs.comarks,
                "dual_coxeter": rs.dual_coxeter,
                "dimension": rs.dimension,
                "weyl_order": rs.weyl_order().to_string(),
                "positive_roots": roots,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(true)
        }
    }
}

fn config_flag(config: &BTreeMap<String, String>, key: &str) -> Result<bool, String> {
    match config.get(key).map(|s| s.as_str()) {
        None => Ok(false),
        Some("true") | Some("1") => Ok(true),
        Some("false") | Some("0") => Ok(false),
        Some(other) => Err(format!(
            "config key {key}: expected a boolean, got {other:?}"
        )),
    }
}

fn row_line(report: &RowReport) -> String {
    let mut line = format!(
        "row {} parent {} order {} {}: {}",
        report.algebra.name(),
        report.parent,
        report.order,
        if report.full_z { "full" } else { "specialized" },
        if report.pass() { "PASS" } else { "FAIL" }
    );
    let _ = write!(line, " ({} strings)", report.weights_checked);
    for failure in &report.failures {
        let _ = write!(line, "\n  {failure}");
    }
    line
}

fn run_verify(args: VerifyArgs, config: &BTreeMap<String, String>) -> Result<bool, String> {
    let modes = args.all as u8 + args.case.is_some() as u8 + args.identity.is_some() as u8;
    if modes != 1 {
        return Err("pick exactly one of --all, --case, --identity".to_string());
    }
    let order = resolve(args.order, config, "order")?;
    let json = args.json || config_flag(config, "json")?;
    let cases = catalog();
    let plan = default_verification_plan();

    if let Some(id) = args.identity {
        let default = identity_default_order(&id)
            .ok_or_else(|| format!("unknown identity {id:?}; known: eqap, eqaq, eqar, eqas"))?;
        let order = order.unwrap_or(default);
        eprintln!("verifying identity {id} through q^{order}");
        let report = verify_identity(&id, order).map_err(|e| e.to_string())?;
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(&report.to_json()).unwrap()
            );
        } else {
            println!(
                "identity {} order {}: {}",
                report.id,
                report.order,
                if report.pass { "PASS" } else { "FAIL" }
            );
        }
        return Ok(report.pass);
    }

    if let Some(name) = args.case {
        let algebra = parse_algebra(&name)?;
        let case = cases
            .iter()
            .find(|c| c.algebra == algebra)
            .ok_or_else(|| format!("no branching case for {algebra}"))?;
        let (_, plan_order, plan_full) = plan
            .iter()
            .find(|(a, _, _)| *a == algebra)
            .copied()
            .expect("every case is planned");
        let order = order.unwrap_or(plan_order);
        let full_z = if args.specialized {
            false
        } else if args.full_z {
            true
        } else {
            plan_full
        };
        eprintln!(
            "verifying {algebra} through q^{order} ({})",
            if full_z { "full" } else { "specialized" }
        );
        let reports = verify_case(case, order, full_z).map_err(|e| e.to_string())?;
        let pass = reports.iter().all(|r| r.pass());
        if json {
            let doc: Vec<serde_json::Value> = reports.iter().map(|r| r.to_json()).collect();
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        } else {
            for report in &reports {
                println!("{}", row_line(report));
            }
        }
        return Ok(pass);
    }

    // --all: the full plan, the named identities, and the projection.
    let mut pass = true;
    let mut texts = Vec::new();
    let mut docs = Vec::new();
    for (algebra, plan_order, full_z) in &plan {
        let case = cases
            .iter()
            .find(|c| c.algebra == *algebra)
            .expect("planned case");
        let order = order.unwrap_or(*plan_order);
        eprintln!(
            "verifying {algebra} through q^{order} ({})",
            if *full_z { "full" } else { "specialized" }
        );
        let reports = verify_case(case, order, *full_z).map_err(|e| e.to_string())?;
        for report in &reports {
            pass &= report.pass();
            texts.push(row_line(report));
            docs.push(report.to_json());
        }
    }
    for id in ["eqap", "eqaq", "eqar", "eqas"] {
        let default = identity_default_order(id).expect("known identity");
        let order = order.unwrap_or(default);
        eprintln!("verifying identity {id} through q^{order}");
        let report = verify_identity(id, order).map_err(|e| e.to_string())?;
        pass &= report.pass;
        texts.push(format!(
            "identity {} order {}: {}",
            report.id,
            report.order,
            if report.pass { "PASS" } else { "FAIL" }
        ));
        docs.push(report.to_json());
    }
    {
        let order = order.unwrap_or(12);
        eprintln!("verifying projection extraction through q^{order}");
        let report = verify_projection(order).map_err(|e| e.to_string())?;
        pass &= report.pass;
        texts.push(format!(
            "projection order {}: {}",
            report.order,
            if report.pass { "PASS" } else { "FAIL" }
        ));
        docs.push(serde_json::json!({
            "projection": true,
            "order": report.order,
            "pass": report.pass,
            "leads": report.leads.iter().map(|(n, g)| {
                serde_json::json!({"branch": n, "grade": g})
            }).collect::<Vec<_>>(),
        }));
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&docs).unwrap());
    } else {
        for line in &texts {
            println!("{line}");
        }
        println!(
            "{} of {} checks passed",
            texts.iter().filter(|t| t.contains(": PASS")).count(),
            texts.len()
        );
    }
    Ok(pass)
}
