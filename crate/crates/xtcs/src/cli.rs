//! Command-line front end. `run` does the work and returns the exit code, so it can be driven from tests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{verify_catalog, BuildingBlock, Catalog, CatalogError};
use crate::config::{ConfigDocument, ConfigError, GluingAngle};
use crate::fixtures::{reproduce_examples, reproduce_table4, reproduce_table5, Reproduction};
use crate::invariants::{full_report, InvariantError, InvariantReport};
use crate::search::{cross_term_search, rank1_pair, MatchCandidate, SearchError};

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_LOOKUP: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "xtcs", version, about = "Invariants of extra-twisted connected sums")]
pub struct Cli {
    /// Block catalog to use instead of the shipped one.
    #[arg(long, global = true, env = "XTCS_CATALOG")]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table4,
    Table5,
    Examples,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect or check the block catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Find matchings of two blocks at an angle.
    Match {
        #[arg(long)]
        plus: String,
        #[arg(long)]
        minus: String,
        /// Rational multiple of pi, e.g. 1/4pi or -1/4pi.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Only keep configurations at pure angle.
        #[arg(long)]
        pure: bool,
        /// Enumerate cross terms with entries in [-bound, bound].
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compute the invariants of a configuration document.
    Invariants {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Recompute a shipped table and diff it against the expected values.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    Show {
        id: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    Validate {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        let code = if matches!(e, CatalogError::Io { .. }) { EXIT_IO } else { EXIT_INVALID };
        Failure::new(code, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = if matches!(e, ConfigError::UnknownBlock(_)) { EXIT_LOOKUP } else { EXIT_INVALID };
        Failure::new(code, e.to_string())
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Config(c) => c.into(),
            e => Failure::new(EXIT_INVALID, e.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Config(c) => c.into(),
            SearchError::Invariant(i) => i.into(),
            e => Failure::new(EXIT_INVALID, e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let catalog = match &cli.catalog {
        Some(p) => Catalog::load(p)?,
        None => Catalog::shipped(),
    };
    let text = match &cli.command {
        Command::Catalog { action } => return catalog_cmd(&catalog, action, out),
        Command::Match { plus, minus, theta, pure, bound, format } => {
            match_cmd(&catalog, plus, minus, theta, *pure, *bound, *format)?
        }
        Command::Invariants { config, format } => invariants_cmd(&catalog, config, *format)?,
        Command::Reproduce { target, format } => {
            let rep = match target {
                Target::Table4 => reproduce_table4(&catalog),
                Target::Table5 => reproduce_table5(&catalog),
                Target::Examples => reproduce_examples(&catalog),
            };
            emit(out, &reproduction_text(&rep, *format))?;
            return Ok(if rep.mismatches.is_empty() { 0 } else { EXIT_MISMATCH });
        }
    };
    emit(out, &text)?;
    Ok(0)
}

fn emit(out: &mut dyn Write, s: &str) -> Result<(), Failure> {
    out.write_all(s.as_bytes()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}

fn lookup<'a>(catalog: &'a Catalog, id: &str) -> Result<&'a BuildingBlock, Failure> {
    catalog.get(id).ok_or_else(|| Failure::new(EXIT_LOOKUP, format!("unknown block id {id}")))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise") + "\n"
}

fn fmt_vec(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn fmt_gram(rows: &[Vec<i64>]) -> String {
    rows.iter().map(|r| format!("({})", fmt_vec(r))).collect::<Vec<_>>().join(" ")
}

fn catalog_cmd(catalog: &Catalog, action: &CatalogAction, out: &mut dyn Write) -> Result<i32, Failure> {
    match action {
        CatalogAction::List { format } => {
            let s = match format {
                Format::Json => pretty(&Value::Array(
                    catalog
                        .blocks()
                        .iter()
                        .map(|b| json!({"id": b.id, "kind": b.kind.to_string(), "rank": b.rank(), "b3": b.b3}))
                        .collect(),
                )),
                Format::Table => render(
                    &["id", "kind", "rank", "b3"],
                    catalog.blocks().iter().map(|b| vec![b.id.clone(), b.kind.to_string(), b.rank().to_string(), b.b3.to_string()]),
                ),
            };
            emit(out, &s)?;
            Ok(0)
        }
        CatalogAction::Show { id, format } => {
            let b = lookup(catalog, id)?;
            let r = b.to_record();
            let s = match format {
                Format::Json => pretty(&serde_json::to_value(&r).expect("records serialise")),
                Format::Table => {
                    let mut s = String::new();
                    let mut line = |k: &str, v: String| writeln!(s, "{k:<12}{v}").expect("string write");
                    line("id", r.id.clone());
                    line("kind", r.kind.to_string());
                    line("rank", r.rank.to_string());
                    line("N", fmt_gram(&r.gram));
                    line("c2bar", fmt_vec(&r.c2bar));
                    line("b3", r.b3.to_string());
                    if let Some(p) = r.b3plus {
                        line("b3plus", p.to_string());
                    }
                    if let Some(c) = r.minus_chi_c {
                        line("-chi(C)", c.to_string());
                    }
                    line("pleasant", r.pleasant.to_string());
                    line("K = 0", r.k_trivial.to_string());
                    line("provenance", r.provenance.clone());
                    s
                }
            };
            emit(out, &s)?;
            Ok(0)
        }
        CatalogAction::Validate { format } => {
            let report = verify_catalog(catalog);
            let bad = report.mismatches();
            let s = match format {
                Format::Json => pretty(&json!({
                    "blocks_checked": report.blocks_checked(),
                    "fields_checked": report.checks.len(),
                    "mismatches": bad,
                })),
                Format::Table => {
                    let mut s = format!(
                        "{} blocks, {} fields checked, {} mismatches\n",
                        report.blocks_checked(),
                        report.checks.len(),
                        bad.len()
                    );
                    for c in &bad {
                        writeln!(s, "{}: {} stored {} derived {}", c.id, c.field, c.stored, c.derived).expect("string write");
                    }
                    s
                }
            };
            emit(out, &s)?;
            Ok(if bad.is_empty() { 0 } else { EXIT_INVALID })
        }
    }
}

fn match_cmd(
    catalog: &Catalog,
    plus: &str,
    minus: &str,
    theta: &str,
    pure: bool,
    bound: Option<u32>,
    format: Format,
) -> Result<String, Failure> {
    let (p, m) = (lookup(catalog, plus)?, lookup(catalog, minus)?);
    let angle = GluingAngle::parse(theta)?;
    let outcome = match bound {
        Some(b) => cross_term_search(p, m, &angle, b, pure)?,
        None if p.rank() == 1 && m.rank() == 1 => rank1_pair(p, m, &angle)?,
        None => return Err(Failure::new(EXIT_INVALID, "--bound is needed unless both blocks have rank 1")),
    };
    let found: Vec<&MatchCandidate> = outcome.matches.iter().filter(|c| !pure || c.report.pure).collect();
    Ok(match format {
        Format::Json => pretty(&json!({
            "examined": outcome.examined,
            "matches": found.iter().map(|c| {
                let mut v = c.report.to_json();
                v["cross"] = json!(c.cross.to_i64_rows());
                v["pushout"] = json!(c.pushout.to_i64_rows());
                v
            }).collect::<Vec<_>>(),
        })),
        Format::Table => {
            let mut s = report_table(found.iter().map(|c| (fmt_gram(&c.cross.to_i64_rows()), &c.report)), "cross");
            writeln!(s, "{} candidates, {} examined", found.len(), outcome.examined).expect("string write");
            s
        }
    })
}

fn read_config(path: &Path) -> Result<ConfigDocument, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|x| x == "json") {
        serde_json::from_str(&src).map_err(|e| Failure::new(EXIT_INVALID, format!("malformed configuration: {e}")))
    } else {
        Ok(ConfigDocument::parse(&src)?)
    }
}

fn invariants_cmd(catalog: &Catalog, path: &Path, format: Format) -> Result<String, Failure> {
    let cfg = read_config(path)?.resolve(catalog)?;
    let v = cfg.validate();
    if !v.is_valid() {
        return Err(Failure::new(EXIT_INVALID, format!("invalid configuration:\n  {}", v.violations.join("\n  "))));
    }
    let r = full_report(&cfg)?;
    Ok(match format {
        Format::Json => {
            let mut j = r.to_json();
            j["warnings"] = json!(v.warnings);
            pretty(&j)
        }
        Format::Table => {
            let mut s = report_table(std::iter::once((r.theta.clone(), &r)), "theta");
            writeln!(s, "b2 {}  pi1 {}  nu {} (mod 48: {})", r.b2, r.pi1, r.nu, r.nu_residue).expect("string write");
            for n in r.notes.iter().chain(&v.warnings) {
                writeln!(s, "note: {n}").expect("string write");
            }
            s
        }
    })
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "?".into(), T::to_string)
}

/// Rows in the order Z+, Z-, b3, d, TH4, b, nu_bar, preceded by one free column.
fn report_table<'a>(rows: impl Iterator<Item = (String, &'a InvariantReport)>, first: &str) -> String {
    render(
        &[first, "Z+", "Z-", "b3", "d", "TH4", "b", "nu_bar"],
        rows.map(|(lead, r)| {
            vec![
                lead,
                r.plus_id.clone(),
                r.minus_id.clone(),
                r.b3.to_string(),
                opt(&r.d_free),
                r.torsion_label(),
                r.linking_label(),
                r.nu_bar.to_string(),
            ]
        }),
    )
}

fn render(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let rows: Vec<Vec<String>> = rows.collect();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let line = |s: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(s, "{}", parts.join("  ").trim_end()).expect("string write");
    };
    line(&mut s, &mut header.iter().copied());
    for r in &rows {
        line(&mut s, &mut r.iter().map(String::as_str));
    }
    s
}

fn reproduction_text(rep: &Reproduction, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "rows": rep.rows,
            "matched": rep.matched_rows(),
            "reports": rep.reports.iter().map(|(id, r)| json!({"row": id, "report": r.as_ref().map(InvariantReport::to_json)})).collect::<Vec<_>>(),
            "mismatches": rep.mismatches.iter().map(|m| json!({"row": m.row, "field": m.field, "expected": m.expected, "actual": m.actual})).collect::<Vec<_>>(),
        })),
        Format::Table => {
            let mut s = report_table(rep.reports.iter().filter_map(|(id, r)| r.as_ref().map(|r| (id.clone(), r))), "row");
            for m in &rep.mismatches {
                writeln!(s, "MISMATCH {m}").expect("string write");
            }
            writeln!(s, "{}/{} rows match", rep.matched_rows(), rep.rows).expect("string write");
            s
        }
    }
}
