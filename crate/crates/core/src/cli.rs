//! Command-line front end.
//!
//! Exit codes: 0 when the requested check passes, 1 when it ran and failed,
//! 2 for usage, configuration and I/O errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cycle::{
    build_beta_sequence, build_windows, default_representatives, validate_spec, CycleSpec, G1Choice, SpecSource,
};
use crate::field::{Exponent, FieldContext};
use crate::io::{format_list, format_sequence_file, parse_exponents, parse_poly, parse_sequence_file};
use crate::io::{SequenceFile, SequenceHeader};
use crate::orbit::{check_noncollapsing, enumerate_pgl2, orbit_partition, NoncollapsingVerdict, OrbitPartition};
use crate::search::{search_dual, SearchMode, SearchResult, SearchTask, DEFAULT_CAP};
use crate::verify::{verify_cycle, verify_periodicity, verify_universal, VectorSequence, VerificationReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

/// Entries of missing/duplicated lists shown in text output.
const CONSOLE_LIMIT: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "gq-ucycle", version, about = "Universal cycles on Grassmannians over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report to this file (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field parameters, F^× inside E^×, and the non-collapsing check.
    FieldInfo {
        #[command(flatten)]
        field: FieldArgs,
        /// Also describe this element (`a^e` or a coefficient list).
        #[arg(long)]
        element: Option<String>,
    },
    /// Projective-ratio classes grouped into Galois orbits.
    Orbits {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Build a cycle and verify it.
    Build(BuildArgs),
    /// Verify a cycle file.
    Verify(VerifyArgs),
    /// Search orderings for simultaneous universality.
    SearchDual(SearchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    /// Primitive polynomial, ascending coefficients (e.g. 1,0,1,0,0,1).
    #[arg(long)]
    pub poly: String,
}

impl FieldArgs {
    fn context(&self) -> Result<FieldContext> {
        let poly = parse_poly(&self.poly)?;
        FieldContext::new(self.q, self.n, &poly).context("invalid field parameters")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Exponents,
    Vectors,
    Windows,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Explicit representatives c_1,…,c_r as exponents.
    #[arg(long)]
    pub reps: Option<String>,
    /// g₁ for the default construction: `smallest`, `inverse-alpha-minus-one`, or an exponent.
    #[arg(long, default_value = "smallest")]
    pub g1: String,
    /// Window sizes to verify.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub ks: Vec<usize>,
    /// Include the cycle in the report in this form.
    #[arg(long, value_enum)]
    pub export: Option<ExportKind>,
    /// Also write the cycle as a vector file readable by `verify`.
    #[arg(long)]
    pub cycle_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Vector file: one comma-separated vector per line, `#` comments.
    #[arg(long)]
    pub input: PathBuf,
    /// Window size (shorthand for a single entry of --ks).
    #[arg(long, conflicts_with = "ks")]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    /// Overrides the file header.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub poly: Option<String>,
    /// Period for the W_{i+r} = α·W_i check (needs the polynomial).
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Representative multiset (order is irrelevant).
    #[arg(long)]
    pub reps: String,
    /// Window sizes; defaults to 2 and n − 2.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    /// Treat --reps as untwisted and try every single α-twist.
    #[arg(long)]
    pub twist: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Write pass/fail flags for every ordering as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Result of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// A rendered report: JSON body plus a text rendering and a one-line verdict.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub verdict_line: String,
}

/// Writes `report` to `path` (or stdout). JSON keys are sorted.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
        Format::Text => report.text.clone(),
    };
    match path {
        Some(p) => write_atomic(p, body.as_bytes()),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Executes one command and emits its report.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let (report, outcome) = execute(&cli.command)?;
    emit_report(&report, cli.format, cli.output.as_deref())?;
    eprintln!("{}", report.verdict_line);
    Ok(outcome)
}

/// Executes one command without emitting anything.
pub fn execute(command: &Command) -> Result<(Report, Outcome)> {
    match command {
        Command::FieldInfo { field, element } => field_info(field, element.as_deref()),
        Command::Orbits { field } => orbits(field),
        Command::Build(args) => build(args),
        Command::Verify(args) => verify(args),
        Command::SearchDual(args) => search(args),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn field_header(ctx: &FieldContext) -> Value {
    json!({ "q": ctx.q(), "n": ctx.n(), "poly": ctx.modulus() })
}

fn field_line(ctx: &FieldContext) -> String {
    format!("q={} n={} poly={}", ctx.q(), ctx.n(), format_list(ctx.modulus()))
}

fn verdict_text(v: &NoncollapsingVerdict) -> String {
    let mut s = format!(
        "gcd(n, q(q^2-1)) = {} ({})",
        v.gcd,
        if v.gcd_condition { "coprime" } else { "not coprime" }
    );
    if let Some(ex) = &v.exhaustive {
        match &ex.counterexample {
            None => s.push_str(", exhaustive check: m_z = 1 for all z"),
            Some(c) => {
                let _ = write!(s, ", exhaustive check: m_z = {} at z = a^{}", c.degree, c.exponent);
            }
        }
    }
    s
}

fn field_info(field: &FieldArgs, element: Option<&str>) -> Result<(Report, Outcome)> {
    let ctx = field.context()?;
    let verdict = check_noncollapsing(ctx.q() as u64, ctx.n(), Some(&ctx));
    let mut json = json!({
        "schema": SCHEMA_VERSION,
        "command": "field-info",
        "field": field_header(&ctx),
        "group_order": ctx.group_order(),
        "gamma_order": ctx.gamma_order(),
        "fstar_exponents": ctx.fstar_exponents(),
        "pgl2_order": enumerate_pgl2(ctx.q()).len(),
        "noncollapsing": to_json(&verdict),
    });
    let mut text = format!(
        "{}\n|E^x| = {}  |Gamma| = {}  F^x = {{{}}}\n|PGL2(F)| = {}\n{}\n",
        field_line(&ctx),
        ctx.group_order(),
        ctx.gamma_order(),
        ctx.fstar_exponents().iter().map(|e| format!("a^{e}")).collect::<Vec<_>>().join(", "),
        enumerate_pgl2(ctx.q()).len(),
        verdict_text(&verdict),
    );
    if let Some(s) = element {
        let x = ctx.parse_element(s)?;
        let exponent = ctx.discrete_log(x).ok();
        json["element"] = json!({ "input": s, "exponent": exponent, "coeffs": ctx.coeffs(x) });
        let _ = writeln!(text, "{s} = {} = [{}]", ctx.format_exponent(x), format_list(&ctx.coeffs(x)));
    }
    let line = format!("field-info: {}", verdict_text(&verdict));
    Ok((Report { json, text, verdict_line: line }, Outcome::Pass))
}

fn partition_or_verdict(ctx: &FieldContext) -> Result<std::result::Result<OrbitPartition, NoncollapsingVerdict>> {
    let verdict = check_noncollapsing(ctx.q() as u64, ctx.n(), Some(ctx));
    if !verdict.passed() {
        return Ok(Err(verdict));
    }
    Ok(Ok(orbit_partition(ctx)?))
}

fn collapsing_report(command: &str, ctx: &FieldContext, verdict: &NoncollapsingVerdict) -> (Report, Outcome) {
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "field": field_header(ctx),
        "noncollapsing": to_json(verdict),
        "error": "collapsing action",
    });
    let text = format!("{}\n{}\nthe construction requires a non-collapsing action\n", field_line(ctx), verdict_text(verdict));
    let line = format!("{command}: FAIL (collapsing action: {})", verdict_text(verdict));
    (Report { json, text, verdict_line: line }, Outcome::Fail)
}

fn orbits(field: &FieldArgs) -> Result<(Report, Outcome)> {
    let ctx = field.context()?;
    let partition = match partition_or_verdict(&ctx)? {
        Ok(p) => p,
        Err(v) => return Ok(collapsing_report("orbits", &ctx, &v)),
    };
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": "orbits",
        "field": field_header(&ctx),
        "r": partition.r(),
        "m": partition.m(),
        "groups": partition.exponent_sets(),
    });
    let mut text = format!(
        "{}\n{} ratio classes in {} Galois group(s)\n",
        field_line(&ctx),
        partition.r(),
        partition.m()
    );
    for (gi, group) in partition.exponent_sets().iter().enumerate() {
        let _ = writeln!(text, "group {}:", gi + 1);
        for class in group {
            let items: Vec<String> = class.iter().map(|e| format!("a^{e}")).collect();
            let _ = writeln!(text, "  {{{}}}", items.join(", "));
        }
    }
    let line = format!("orbits: r={} m={}", partition.r(), partition.m());
    Ok((Report { json, text, verdict_line: line }, Outcome::Pass))
}

fn parse_g1(s: &str) -> Result<G1Choice> {
    Ok(match s {
        "smallest" => G1Choice::SmallestTwistable,
        "inverse-alpha-minus-one" => G1Choice::InverseAlphaMinusOne,
        other => G1Choice::Exponent(
            other
                .trim_start_matches("a^")
                .parse()
                .map_err(|_| anyhow!("--g1 expects `smallest`, `inverse-alpha-minus-one` or an exponent"))?,
        ),
    })
}

fn report_text(report: &VerificationReport, text: &mut String) {
    let _ = writeln!(text, "{}", report.summary());
    let hist: Vec<String> = report
        .multiplicity_histogram
        .iter()
        .map(|h| format!("{}x: {}", h.multiplicity, h.count))
        .collect();
    let _ = writeln!(text, "  multiplicities: {}", hist.join(", "));
    if let Some(p) = &report.periodicity {
        let _ = writeln!(
            text,
            "  periodicity W_(i+{}) = a*W_i: {}",
            p.period,
            match p.first_failure {
                None => "ok".to_string(),
                Some(i) => format!("fails at i={i}"),
            }
        );
    }
    let lu = &report.line_uniformity;
    let lines: Vec<String> = lu.histogram.iter().map(|h| format!("{}x: {}", h.multiplicity, h.count)).collect();
    let _ = writeln!(
        text,
        "  line uniformity over {} lines: {} ({})",
        lu.lines,
        if lu.uniform { "uniform" } else { "not uniform" },
        lines.join(", ")
    );
    for (label, items) in [
        ("missing", report.missing.iter().map(|s| serde_json::to_string(s).unwrap()).collect::<Vec<_>>()),
        (
            "duplicated",
            report
                .duplicated
                .iter()
                .map(|d| format!("{} at {:?}", serde_json::to_string(&d.subspace).unwrap(), d.positions))
                .collect(),
        ),
    ] {
        if items.is_empty() {
            continue;
        }
        let _ = writeln!(text, "  {label} ({}):", items.len());
        for item in items.iter().take(CONSOLE_LIMIT) {
            let _ = writeln!(text, "    {item}");
        }
        if items.len() > CONSOLE_LIMIT {
            let _ = writeln!(text, "    … {} more (complete list in JSON output)", items.len() - CONSOLE_LIMIT);
        }
    }
    if !report.rank_defects.is_empty() {
        let _ = writeln!(text, "  rank-defective windows at {:?}", report.rank_defects);
    }
}

fn build(args: &BuildArgs) -> Result<(Report, Outcome)> {
    let ctx = args.field.context()?;
    let partition = match partition_or_verdict(&ctx)? {
        Ok(p) => p,
        Err(v) => return Ok(collapsing_report("build", &ctx, &v)),
    };
    let spec = match &args.reps {
        Some(r) => CycleSpec::new(&ctx, parse_exponents(r)?, SpecSource::UserSupplied),
        None => default_representatives(&ctx, &partition, parse_g1(&args.g1)?)?,
    };
    let validation = validate_spec(&ctx, &partition, &spec);
    if !validation.valid {
        let json = json!({
            "schema": SCHEMA_VERSION,
            "command": "build",
            "spec": to_json(&spec),
            "validation": to_json(&validation),
        });
        let text = format!("{}\nreps {}\ninvalid: {}\n", field_line(&ctx), format_list(&spec.reps), validation.summary());
        let line = format!("build: FAIL ({})", validation.summary());
        return Ok((Report { json, text, verdict_line: line }, Outcome::Fail));
    }
    let cycle = build_beta_sequence(&ctx, &partition, &spec)?;
    let reports = args
        .ks
        .iter()
        .map(|&k| verify_cycle(&ctx, &cycle, k))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let ok = reports
        .iter()
        .all(|r| r.is_universal() && r.line_uniformity.uniform && r.periodicity.as_ref().is_some_and(|p| p.ok));

    if let Some(path) = &args.cycle_out {
        let file = SequenceFile {
            header: SequenceHeader {
                q: Some(ctx.q()),
                n: Some(ctx.n()),
                poly: Some(ctx.modulus().iter().map(|&c| c as u64).collect()),
                r: Some(cycle.r()),
            },
            vectors: cycle.vectors(&ctx),
        };
        write_atomic(path, format_sequence_file(&file).as_bytes())?;
    }

    let mut json = json!({
        "schema": SCHEMA_VERSION,
        "command": "build",
        "spec": to_json(&spec),
        "validation": to_json(&validation),
        "length": cycle.len(),
        "r": cycle.r(),
        "verification": to_json(&reports),
        "universal": ok,
    });
    match args.export {
        Some(ExportKind::Exponents) => json["cycle"] = to_json(&cycle.beta_exponents),
        Some(ExportKind::Vectors) => json["cycle"] = to_json(&cycle.vectors(&ctx)),
        Some(ExportKind::Windows) => {
            let k = args.ks.first().copied().unwrap_or(2);
            json["cycle"] = to_json(&build_windows(&ctx, &cycle, k)?.windows);
        }
        None => {}
    }

    let mut text = format!(
        "{}\nreps ({}) product a^{}  [{}]\ncycle length {} (r={} x |Gamma|={})\n",
        field_line(&ctx),
        format_list(&spec.reps),
        validation.product_exponent,
        match &spec.source {
            SpecSource::Default { g1 } => format!("default construction, g1 = a^{g1}"),
            SpecSource::UserSupplied => "user supplied".to_string(),
            SpecSource::SearchResult => "search result".to_string(),
        },
        cycle.len(),
        cycle.r(),
        ctx.gamma_order()
    );
    for r in &reports {
        report_text(r, &mut text);
    }
    if let Some(kind) = args.export {
        let _ = writeln!(text, "cycle ({kind:?}):");
        let _ = writeln!(text, "{}", serde_json::to_string(&json["cycle"])?);
    }
    let line = format!(
        "build: {} ({})",
        if ok { "PASS" } else { "FAIL" },
        reports.iter().map(VerificationReport::summary).collect::<Vec<_>>().join("; ")
    );
    Ok((Report { json, text, verdict_line: line }, Outcome::from_bool(ok)))
}

fn verify(args: &VerifyArgs) -> Result<(Report, Outcome)> {
    let raw = fs::read_to_string(&args.input).with_context(|| format!("cannot read {}", args.input.display()))?;
    let file = parse_sequence_file(&raw)?;
    let q = args.q.or(file.header.q).ok_or_else(|| anyhow!("q not given and missing from the file header"))?;
    let n = args
        .n
        .or(file.header.n)
        .or_else(|| file.vectors.first().map(Vec::len))
        .ok_or_else(|| anyhow!("n not given and the file is empty"))?;
    let poly = match &args.poly {
        Some(p) => Some(parse_poly(p)?),
        None => file.header.poly.clone(),
    };
    let r = args.r.or(file.header.r);
    let ks: Vec<usize> = match (args.k, args.ks.is_empty()) {
        (Some(k), _) => vec![k],
        (None, false) => args.ks.clone(),
        (None, true) => vec![2],
    };
    let seq = VectorSequence::new(q, n, file.vectors)?;
    let ctx = match &poly {
        Some(p) if r.is_some() => Some(FieldContext::new(q as u64, n, p)?),
        _ => None,
    };

    let mut reports = Vec::new();
    for &k in &ks {
        let mut report = verify_universal(&seq, k)?;
        if let (Some(ctx), Some(r)) = (&ctx, r) {
            report.periodicity = Some(verify_periodicity(ctx, &seq, r)?);
        }
        reports.push(report);
    }
    let ok = reports
        .iter()
        .all(|r| r.verdict == Verdict::Universal && r.periodicity.as_ref().is_none_or(|p| p.ok));
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": "verify",
        "input": args.input.display().to_string(),
        "q": q,
        "n": n,
        "length": seq.len(),
        "reports": to_json(&reports),
        "universal": ok,
    });
    let mut text = format!("{}: {} vectors in F_{q}^{n}\n", args.input.display(), seq.len());
    for r in &reports {
        report_text(r, &mut text);
    }
    let line = format!(
        "verify: {} ({})",
        if ok { "PASS" } else { "FAIL" },
        reports.iter().map(VerificationReport::summary).collect::<Vec<_>>().join("; ")
    );
    Ok((Report { json, text, verdict_line: line }, Outcome::from_bool(ok)))
}

fn search_csv(result: &SearchResult) -> String {
    let mut out = String::from("ordering");
    for k in &result.ks {
        let _ = write!(out, ",k{k}");
    }
    out.push('\n');
    for rec in result.records.iter().flatten() {
        let _ = write!(out, "\"{}\"", format_list(&rec.ordering));
        for p in &rec.passes {
            let _ = write!(out, ",{}", if *p { "pass" } else { "fail" });
        }
        out.push('\n');
    }
    out
}

fn search(args: &SearchArgs) -> Result<(Report, Outcome)> {
    let ctx = args.field.context()?;
    let partition = match partition_or_verdict(&ctx)? {
        Ok(p) => p,
        Err(v) => return Ok(collapsing_report("search-dual", &ctx, &v)),
    };
    let reps: Vec<Exponent> = parse_exponents(&args.reps)?;
    let mut task = SearchTask::new(CycleSpec::new(&ctx, reps, SpecSource::UserSupplied));
    if !args.ks.is_empty() {
        task.ks = args.ks.clone();
    }
    if args.twist {
        task.mode = SearchMode::OrderingsPlusTwist;
    }
    task.cap = args.cap;
    task.record_all = args.csv.is_some();
    let result = search_dual(&ctx, &partition, &task).map_err(|e| match e {
        crate::search::SearchError::SearchSpaceTooLarge { .. } => {
            anyhow!("{e}; raise --cap or reduce the representative set")
        }
        other => anyhow!(other),
    })?;
    if let Some(path) = &args.csv {
        write_atomic(path, search_csv(&result).as_bytes())?;
    }
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": "search-dual",
        "field": field_header(&ctx),
        "result": to_json(&result),
        "hit_count": result.hits.len(),
    });
    let mut text = format!(
        "{}\nsearched {} orderings (up to rotation) of {} for ks={:?}\n{} hit(s):\n",
        field_line(&ctx),
        result.search_space_size,
        result.candidates.iter().map(|c| format!("{{{}}}", format_list(c))).collect::<Vec<_>>().join(" "),
        result.ks,
        result.hits.len()
    );
    for h in &result.hits {
        let _ = writeln!(text, "  ({})", format_list(&h.ordering));
    }
    let line = format!(
        "search-dual: {} hit(s) in {} orderings ({:.2?})",
        result.hits.len(),
        result.search_space_size,
        result.elapsed
    );
    Ok((Report { json, text, verdict_line: line }, Outcome::from_bool(!result.hits.is_empty())))
}

/// Parses `--poly`-style arguments; public for the integration tests.
pub fn parse_cli<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}
