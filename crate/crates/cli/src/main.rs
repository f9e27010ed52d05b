//! `hyperaut`: automorphism groups of hyperelliptic curves `y^2 = D(x)` over
//! finite fields of odd characteristic.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use hyperaut::autgroup::{
    compute_aut_group, compute_over_base, detect_types, field_of_definition, AutError, AutOptions, Curve, Strategy,
};
use hyperaut::basis_change::{case_systems, CaseKind, Target};
use hyperaut::field::{make_field, make_field_with_modulus, FieldSpec};
use hyperaut::groebner::{groebner_basis, GbOptions};
use hyperaut::normal_forms::{Catalog, GroupType};
use hyperaut::parse::parse_upoly;

use report::{verdict, FodJson, InputJson, Report, ScreenEntry, ScreenReport, ScreenSummary, TraceJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Automorphism group over the algebraic closure.
    Closure,
    /// Largest catalog type defined over the base field.
    Base,
    /// Smallest extension over which the full group is defined.
    FieldOfDefinition,
    /// Candidate if the group over the closure is only the involution.
    Screen,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Closure => "closure",
            Mode::Base => "base",
            Mode::FieldOfDefinition => "field-of-definition",
            Mode::Screen => "screen",
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "hyperaut",
    version,
    about = "Automorphism groups of hyperelliptic curves y^2 = D(x) over GF(p^e), p odd"
)]
struct Args {
    /// Characteristic p.
    #[arg(long = "char", value_name = "P")]
    characteristic: Option<u64>,
    /// Extension degree e of the base field GF(p^e).
    #[arg(long, value_name = "E", default_value_t = 1)]
    ext_degree: usize,
    /// Defining polynomial of GF(p^e) in z, e.g. "z^2+1".
    #[arg(long, value_name = "POLY")]
    modulus: Option<String>,
    /// D(x), monic and separable of degree at least 5; `z` names the field generator.
    #[arg(long, value_name = "D")]
    poly: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Closure)]
    mode: Mode,
    /// Largest extension degree searched for witnesses and constants.
    #[arg(long, value_name = "D", default_value_t = 12)]
    max_d: usize,
    /// Comma separated families: cyclic, elementary-abelian, dihedral, pgl.
    #[arg(long, value_name = "LIST")]
    catalog: Option<String>,
    /// Human readable output instead of JSON.
    #[arg(long)]
    text: bool,
    /// Screen one curve per line, `p[,e[,modulus]];D(x)`.
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,
    /// Include Groebner basis traces of the detection systems.
    #[arg(long)]
    trace_gb: bool,
    /// Report wall-clock time (makes the output nondeterministic).
    #[arg(long)]
    timing: bool,
}

enum CliError {
    Input(String),
    Internal(String),
}

impl From<AutError> for CliError {
    fn from(e: AutError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

fn build_field(p: u64, e: usize, modulus: Option<&str>) -> Result<FieldSpec, CliError> {
    let input = |e: hyperaut::field::FieldError| CliError::Input(e.to_string());
    match modulus {
        None => make_field(p, e).map_err(input),
        Some(text) => {
            let prime = make_field(p, 1).map_err(input)?;
            let m = parse_upoly(&prime, text).map_err(|err| CliError::Input(format!("modulus: {err}")))?;
            let coeffs: Vec<u64> = m.coeffs().iter().map(|c| prime.as_prime(c).unwrap()).collect();
            let f = make_field_with_modulus(p, &coeffs).map_err(input)?;
            if e != 1 && f.degree() != e {
                return Err(CliError::Input(format!("modulus has degree {}, expected {e}", f.degree())));
            }
            Ok(f)
        }
    }
}

fn options(args: &Args) -> Result<AutOptions, CliError> {
    let catalog = match &args.catalog {
        Some(c) => Catalog::parse(c).map_err(CliError::Input)?,
        None => Catalog::default(),
    };
    if args.max_d == 0 {
        return Err(CliError::Input("--max-d must be at least 1".into()));
    }
    Ok(AutOptions { catalog, max_d: args.max_d, ..AutOptions::default() })
}

fn gb_traces(curve: &Curve, opts: &AutOptions) -> Result<Vec<TraceJson>, CliError> {
    let det = detect_types(curve, opts)?;
    let mut out = Vec::new();
    for o in &det.outcomes {
        if o.template.gtype == GroupType::Trivial {
            continue;
        }
        let target = Target::Template(o.template.clone(), opts.encoding);
        for kind in CaseKind::ALL {
            for sys in case_systems(&curve.d, &target, kind, false).map_err(AutError::from)? {
                let trace = GbOptions { trace: true, ..GbOptions::default() };
                let gb = groebner_basis(&sys.ideal(), &trace).map_err(|e| CliError::Internal(e.to_string()))?;
                out.push(TraceJson {
                    template: format!("{} {}", o.template.gtype, o.template.formula()),
                    system: sys.label(),
                    lines: gb.trace,
                });
            }
        }
    }
    Ok(out)
}

fn run_single(args: &Args) -> Result<String, CliError> {
    let p = args.characteristic.ok_or_else(|| CliError::Input("--char is required".into()))?;
    let text = args.poly.as_deref().ok_or_else(|| CliError::Input("--poly is required".into()))?;
    let field = build_field(p, args.ext_degree, args.modulus.as_deref())?;
    let curve = Curve::parse(&field, text)?;
    let mut opts = options(args)?;
    let start = Instant::now();
    let input = InputJson {
        characteristic: p,
        extension_degree: field.degree(),
        modulus: args.modulus.clone(),
        polynomial: text.to_string(),
        mode: args.mode.name().into(),
        max_d: opts.max_d,
        catalog: opts.catalog.families.iter().map(|f| f.name().to_string()).collect(),
    };
    if args.mode == Mode::Screen {
        opts.strategy = Strategy::LargestFirst;
    }
    let res = compute_aut_group(&curve, &opts)?;
    let mut report = Report::new(input, &res);
    match args.mode {
        Mode::Closure => {}
        Mode::Screen => report.verdict = Some(verdict(res.group_order)),
        Mode::Base => {
            let base = compute_over_base(&curve, &res.detection, &opts)?;
            report.base = Some(report::BaseJson::new(&base));
        }
        Mode::FieldOfDefinition => {
            let fod = match field_of_definition(&curve, &res.largest, &opts, opts.max_d) {
                Ok(f) => Some(f),
                Err(AutError::ExceedsMaxDegree { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            report.field_of_definition = Some(FodJson::new(res.largest.label(), fod.as_ref(), &field));
        }
    }
    if args.trace_gb {
        report.gb_trace = gb_traces(&curve, &opts)?;
    }
    if args.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if args.text {
        Ok(report.to_text())
    } else {
        serde_json::to_string_pretty(&report).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
    }
}

/// Parses `p[,e[,modulus]];D(x)`.
fn parse_batch_line(line: &str) -> Result<Curve, CliError> {
    let (field_part, poly) =
        line.split_once(';').ok_or_else(|| CliError::Input("expected `p[,e[,modulus]];D(x)`".into()))?;
    let mut parts = field_part.splitn(3, ',').map(str::trim);
    let p = parts.next().unwrap_or("").parse::<u64>().map_err(|e| CliError::Input(format!("characteristic: {e}")))?;
    let e = match parts.next() {
        Some(s) => s.parse::<usize>().map_err(|e| CliError::Input(format!("extension degree: {e}")))?,
        None => 1,
    };
    let field = build_field(p, e, parts.next())?;
    Ok(Curve::parse(&field, poly.trim())?)
}

fn run_batch(args: &Args, path: &PathBuf) -> Result<String, CliError> {
    if !matches!(args.mode, Mode::Screen | Mode::Closure) {
        return Err(CliError::Input("--batch only supports screening".into()));
    }
    if args.poly.is_some() {
        return Err(CliError::Input("--batch and --poly are exclusive".into()));
    }
    let content = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let opts = AutOptions { strategy: Strategy::LargestFirst, ..options(args)? };
    let start = Instant::now();
    let mut results = Vec::new();
    let mut summary = ScreenSummary::default();
    for (k, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        summary.curves += 1;
        let outcome = parse_batch_line(line).and_then(|c| Ok(detect_types(&c, &opts)?));
        let mut entry = ScreenEntry {
            line: k + 1,
            input: line.to_string(),
            verdict: None,
            group_order: None,
            largest: None,
            error: None,
        };
        match outcome {
            Ok(det) => {
                let largest = *det.detected.last().unwrap();
                let order = 2 * largest.order();
                if order == 2 {
                    summary.candidates += 1;
                } else {
                    summary.rejected += 1;
                }
                entry.verdict = Some(verdict(order));
                entry.group_order = Some(order);
                entry.largest = Some(largest.label());
            }
            Err(CliError::Input(m) | CliError::Internal(m)) => {
                summary.errors += 1;
                entry.error = Some(m);
            }
        }
        results.push(entry);
    }
    let report = ScreenReport {
        schema: report::SCREEN_SCHEMA.into(),
        results,
        summary,
        timing_ms: args.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    if args.text {
        Ok(report.to_text())
    } else {
        serde_json::to_string_pretty(&report).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match &args.batch {
        Some(path) => run_batch(&args, path),
        None => run_single(&args),
    };
    match out {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}
