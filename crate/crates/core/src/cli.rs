//! Command-line front end. `run` is pure apart from reading `--in` files and
//! the `DEFIFIX_CAP` variable, so tests drive it directly.
//!
//! Exit status: 0 for success, Yes or Certified; 1 for No, Unknown,
//! NotSingleton and similar negative answers (always with a witness or a
//! reason); 2 for usage and input errors.

use std::collections::HashMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::compile::{
    compile_singleton, formula_to_neighbourhood, neighbourhood_to_formula, prime_field_equation, CompileError,
};
use crate::curve::{build_t, elementary_symmetric, formula_8, verify_theorem5, CurveData, TMode, DEFAULT_T_CAP};
use crate::error::{Error, Result};
use crate::field::{split_list, ArithOp, FieldDescriptor, FieldElement};
use crate::formula::{definable_set, evaluate, parse, parse_term, Formula};
use crate::neighbourhood::{
    certify_by_propagation, enumerate_arithmetic_maps, fixed_subfield, is_neighbourhood, nbhd_rational, Certificate,
    Neighbourhood, Verdict, DEFAULT_MAP_CAP,
};
use crate::normalize::{normalize_for, NormalizeOptions};
use crate::random::{FormulaGenerator, RandomShape};
use crate::schemas::{emit, SchemaParams};

#[derive(Parser, Debug)]
#[command(name = "defifix", version, about = "Existential definability of field elements via arithmetic neighbourhoods")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct FormulaInput {
    /// Formula text.
    #[arg(long, conflicts_with = "input")]
    pub formula: Option<String>,
    /// File holding the formula text.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SetInput {
    #[arg(long, default_value = "Q")]
    pub field: String,
    /// Comma-separated elements, e.g. `1,2` or `[0,1],[1,1]`.
    #[arg(long, allow_hyphen_values = true)]
    pub elements: String,
    #[arg(long, allow_hyphen_values = true)]
    pub target: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and print a formula in canonical form.
    Parse(FormulaInput),
    /// Field arithmetic on one or two elements.
    Arith {
        #[arg(long)]
        field: String,
        #[arg(long)]
        op: String,
        #[arg(allow_hyphen_values = true)]
        operands: Vec<String>,
    },
    /// Truth value of a formula under an assignment.
    Eval {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        field: String,
        /// `name=value` pairs separated by commas.
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Elements of a finite field satisfying a one-variable formula.
    DefinableSet {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        field: String,
        #[arg(long)]
        var: Option<String>,
    },
    /// Three-address normal form of an existential formula.
    Normalize {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        var: Option<String>,
    },
    /// Compares definable sets before and after normalization.
    CheckNormalize {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        field: String,
        /// Check this many seeded random formulas instead of one given formula.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Neighbourhood checks and constructions.
    #[command(subcommand)]
    Nbhd(NbhdCommand),
    /// Between neighbourhoods, formulas and single equations.
    #[command(subcommand)]
    Compile(CompileCommand),
    /// Elements fixed by every endomorphism of a finite field.
    FixedField {
        #[arg(long)]
        field: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Symmetric functions of curve abscissas and their neighbourhoods.
    CurveLab {
        #[arg(long)]
        field: String,
        /// Curve polynomial in x and y.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, default_value = "prefix")]
        mode: String,
        #[arg(long)]
        cap: Option<usize>,
        /// Also evaluate the defining formula of every symmetric value.
        #[arg(long)]
        formulas: bool,
    },
    /// Named formula templates.
    #[command(subcommand)]
    Schema(SchemaCommand),
}

#[derive(Subcommand, Debug)]
pub enum NbhdCommand {
    /// Exhaustive decision over a finite field.
    Check(SetInput),
    /// All arithmetic maps of the set.
    Maps {
        #[command(flatten)]
        set: SetInput,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Propagation certificate, usable over Q.
    Certify(SetInput),
    /// Builds a neighbourhood of a rational number.
    Rational {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CompileCommand {
    /// Existential formula defining the target of a neighbourhood
    ToFormula(SetInput),
    /// Neighbourhood of the single element a formula defines
    FromFormula {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        field: String,
    },
    /// One polynomial equation defining the target
    SingleEq {
        #[command(flatten)]
        set: SetInput,
        /// Emit the linear equation of a prime-field target instead.
        #[arg(long)]
        prime_field: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum SchemaCommand {
    /// Prints a template instantiated with the given parameters
    Emit {
        name: String,
        #[arg(long = "U", allow_hyphen_values = true)]
        root_poly: Option<String>,
        #[arg(long = "V", allow_hyphen_values = true)]
        value_poly: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long = "F")]
        f_graph: Option<String>,
        #[arg(long = "G")]
        g_graph: Option<String>,
        #[arg(long = "N")]
        naturals: Option<String>,
        #[arg(long)]
        pred: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        i: Option<i64>,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { code: 0, text, json }
    }

    fn answer(yes: bool, text: String, json: Value) -> Self {
        Report { code: if yes { 0 } else { 1 }, text, json }
    }
}

fn cap_or(given: Option<usize>, default: usize) -> usize {
    given
        .or_else(|| std::env::var("DEFIFIX_CAP").ok().and_then(|s| s.trim().parse().ok()))
        .filter(|&c| c > 0)
        .unwrap_or(default)
}

fn field(spec: &str) -> Result<FieldDescriptor> {
    Ok(FieldDescriptor::parse(spec)?)
}

fn read_formula(input: &FormulaInput) -> Result<Formula> {
    let text = match (&input.formula, &input.input) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {path}: {e}")))?
        }
        (None, None) => return Err(Error::Input("give --formula or --in".into())),
    };
    Ok(parse(text.trim())?)
}

fn neighbourhood(set: &SetInput) -> Result<Neighbourhood> {
    let k = field(&set.field)?;
    let elements = k.parse_element_list(&set.elements)?;
    let target = k.parse_element(&set.target)?;
    Ok(Neighbourhood::new(k, elements, &target)?)
}

fn show_set(xs: &[FieldElement]) -> String {
    format!("{{{}}}", xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn show_map(pairs: &[(FieldElement, FieldElement)]) -> String {
    pairs.iter().map(|(a, b)| format!("{a} -> {b}")).collect::<Vec<_>>().join(", ")
}

fn verdict_report(a: &Neighbourhood, v: &Verdict) -> Report {
    let json = json!({ "neighbourhood": to_json(a), "verdict": to_json(v) });
    match v {
        Verdict::Yes => Report::answer(true, "yes".into(), json),
        Verdict::No(m) => Report::answer(false, format!("no\nwitness: {}", show_map(&m.pairs)), json),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run_command(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Parse(input) => {
            let f = read_formula(input)?;
            let text = f.to_string();
            Ok(Report::ok(text.clone(), json!({ "formula": text, "free": f.free_vars() })))
        }
        Command::Arith { field: spec, op, operands } => {
            let k = field(spec)?;
            let op: ArithOp = op.parse()?;
            let xs = operands.iter().map(|o| k.parse_element(o)).collect::<std::result::Result<Vec<_>, _>>()?;
            let r = match xs.as_slice() {
                [a] => k.arith(op, a, None)?,
                [a, b] => k.arith(op, a, Some(b))?,
                _ => return Err(Error::Input("expected one or two operands".into())),
            };
            Ok(Report::ok(r.to_string(), json!({ "result": r })))
        }
        Command::Eval { input, field: spec, assign } => {
            let k = field(spec)?;
            let f = read_formula(input)?;
            let mut at = HashMap::new();
            for pair in split_list(assign) {
                let (name, value) =
                    pair.split_once('=').ok_or_else(|| Error::Input(format!("expected name=value, got `{pair}`")))?;
                at.insert(name.trim().to_string(), k.parse_element(value)?);
            }
            let v = evaluate(&f, &k, &at, &Default::default())?;
            Ok(Report::ok(v.to_string(), json!({ "value": v })))
        }
        Command::DefinableSet { input, field: spec, var } => {
            let k = field(spec)?;
            let f = read_formula(input)?;
            let var = var.clone().or_else(|| f.free_vars().first().cloned()).unwrap_or_else(|| "x".into());
            let set = definable_set(&f, &k, &var)?;
            Ok(Report::ok(show_set(&set), json!({ "var": var, "set": set })))
        }
        Command::Normalize { input, var } => {
            let f = read_formula(input)?;
            let var = var.clone().or_else(|| f.free_vars().first().cloned()).unwrap_or_else(|| "x".into());
            let n = normalize_for(&f, &var, NormalizeOptions::default())?;
            let mut json = to_json(&n);
            json["negations"] = json!(n.negations());
            json["fresh_vars"] = json!(n.negation_vars());
            json["listing"] = json!(n.disjuncts.iter().map(|d| d.atoms.iter().map(|a| a.display(&d.vars).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
            Ok(Report::ok(n.to_text().trim_end().to_string(), json))
        }
        Command::CheckNormalize { input, field: spec, random, seed } => {
            let k = field(spec)?;
            let formulas = match random {
                Some(count) => {
                    let mut g = FormulaGenerator::new(*seed, RandomShape::default());
                    (0..*count).map(|_| g.next_formula()).collect()
                }
                None => vec![read_formula(input)?],
            };
            let mut mismatches = Vec::new();
            for f in &formulas {
                let var = f.free_vars().first().cloned().unwrap_or_else(|| "x".into());
                let before = definable_set(f, &k, &var)?;
                let after = normalize_for(f, &var, NormalizeOptions::default())?.definable_set(&k)?;
                if before != after {
                    mismatches.push(json!({ "formula": f.to_string(), "before": before, "after": after }));
                }
            }
            let mut text = format!("checked {} formula(s) over {}: {} mismatch(es)", formulas.len(), k, mismatches.len());
            for m in &mismatches {
                let _ = write!(text, "\n{}: before {} after {}", m["formula"], m["before"], m["after"]);
            }
            let json = json!({ "checked": formulas.len(), "field": k, "mismatches": mismatches });
            Ok(Report::answer(mismatches.is_empty(), text, json))
        }
        Command::Nbhd(sub) => run_nbhd(sub),
        Command::Compile(sub) => run_compile(sub),
        Command::FixedField { field: spec, cap } => {
            let k = field(spec)?;
            let fixed = fixed_subfield(&k, cap_or(*cap, DEFAULT_MAP_CAP))?;
            Ok(Report::ok(format!("fixed: {}", show_set(&fixed)), json!({ "fixed": fixed })))
        }
        Command::CurveLab { field: spec, g, mode, cap, formulas } => {
            let k = field(spec)?;
            let g = parse_term(g)?;
            let mode: TMode = mode.parse()?;
            let cap = cap_or(*cap, DEFAULT_T_CAP);
            let c = CurveData::new(&g, &k)?;
            let recipe = build_t(&c, mode, cap)?;
            let report = verify_theorem5(&c, &recipe, cap_or(None, DEFAULT_MAP_CAP))?;
            let mut text = String::new();
            let _ = writeln!(text, "g: {}", c.g);
            let _ = writeln!(text, "m: {}", c.table.m);
            let _ = writeln!(text, "P: {}", show_set(&c.abscissas));
            let _ = writeln!(text, "witnesses: {}", show_set(&c.witnesses));
            let _ = writeln!(text, "T ({} elements): {}", recipe.t.len(), show_set(&recipe.t));
            let _ = writeln!(text, "arithmetic maps on T: {}", report.maps);
            for t in &report.targets {
                let _ = writeln!(text, "t{} = {}: {}", t.k, t.target, yes_no(t.verdict.is_yes()));
            }
            let _ = writeln!(text, "identity on bounded fractions: {}", yes_no(report.identity_on_bounded));
            let _ = writeln!(text, "abscissas map into P: {}", yes_no(report.abscissas_into_p));
            let _ = writeln!(text, "injective on abscissas: {}", yes_no(report.injective_on_abscissas));
            let _ = write!(text, "permutes abscissas: {}", yes_no(report.permutes_abscissas));
            let mut checks = Vec::new();
            let mut formulas_ok = true;
            if *formulas {
                for kk in 1..=c.n() {
                    let f = formula_8(&g, c.n(), kk)?;
                    let set = definable_set(&f, &k, "v")?;
                    let want = elementary_symmetric(kk, &c.abscissas, &k)?;
                    let ok = set == [want.clone()];
                    formulas_ok &= ok;
                    let _ = write!(text, "\nformula for t{kk} defines {}: {}", show_set(&set), yes_no(ok));
                    checks.push(json!({ "k": kk, "formula": f.to_string(), "set": set, "expected": want, "ok": ok }));
                }
            }
            let json = json!({ "curve": to_json(&c), "t": to_json(&recipe), "report": to_json(&report), "formulas": checks });
            Ok(Report::answer(report.all_hold() && formulas_ok, text, json))
        }
        Command::Schema(SchemaCommand::Emit { name, root_poly, value_poly, phi, f_graph, g_graph, naturals, pred, i }) => {
            let term = |s: &Option<String>| s.as_deref().map(parse_term).transpose();
            let formula = |s: &Option<String>| s.as_deref().map(parse).transpose();
            let params = SchemaParams {
                root_poly: term(root_poly)?,
                value_poly: term(value_poly)?,
                matrix: formula(phi)?,
                f_graph: formula(f_graph)?,
                g_graph: formula(g_graph)?,
                naturals: formula(naturals)?,
                predicate: pred.clone(),
                offset: *i,
            };
            let f = emit(name, &params)?;
            let text = f.to_string();
            Ok(Report::ok(text.clone(), json!({ "schema": name, "formula": text, "free": f.free_vars() })))
        }
    }
}

fn run_nbhd(cmd: &NbhdCommand) -> Result<Report> {
    match cmd {
        NbhdCommand::Check(set) => {
            let a = neighbourhood(set)?;
            let v = is_neighbourhood(&a)?;
            Ok(verdict_report(&a, &v))
        }
        NbhdCommand::Maps { set, cap } => {
            let a = neighbourhood(set)?;
            let maps = enumerate_arithmetic_maps(&a, cap_or(*cap, DEFAULT_MAP_CAP))?;
            let mut text = format!("{} arithmetic map(s)", maps.len());
            for m in &maps {
                let _ = write!(text, "\n{}", show_map(&m.pairs));
            }
            Ok(Report::ok(text, json!({ "count": maps.len(), "maps": maps })))
        }
        NbhdCommand::Certify(set) => {
            let a = neighbourhood(set)?;
            let c = certify_by_propagation(&a);
            let certified = c == Certificate::Certified;
            let text = if certified { "certified".to_string() } else { "unknown\nreason: propagation from 0 and 1 does not reach the target".to_string() };
            Ok(Report::answer(certified, text, json!({ "neighbourhood": to_json(&a), "certificate": c })))
        }
        NbhdCommand::Rational { field: spec, value } => {
            let k = field(spec)?;
            let q: BigRational = value.trim().parse().map_err(|_| Error::Input(format!("not a rational number: `{value}`")))?;
            let a = nbhd_rational(&q, &k)?;
            let (ok, status, check) = if k.is_finite() {
                let v = is_neighbourhood(&a)?;
                (v.is_yes(), if v.is_yes() { "yes" } else { "no" }, to_json(&v))
            } else {
                let c = certify_by_propagation(&a);
                let ok = c == Certificate::Certified;
                (ok, if ok { "certified" } else { "unknown" }, to_json(&c))
            };
            let text = format!("target: {}\nelements ({}): {}\n{}", a.target(), a.len(), show_set(a.elements()), status);
            Ok(Report::answer(ok, text, json!({ "neighbourhood": to_json(&a), "check": check })))
        }
    }
}

fn negative_compile(e: CompileError) -> Result<Report> {
    match e {
        CompileError::NotDefining(_) | CompileError::NotSingleton(_) => {
            let reason = e.to_string();
            let json = match &e {
                CompileError::NotSingleton(set) => json!({ "answer": "not_singleton", "set": set, "reason": reason }),
                _ => json!({ "answer": "not_defining", "reason": reason }),
            };
            Ok(Report::answer(false, format!("no\nreason: {reason}"), json))
        }
        other => Err(other.into()),
    }
}

fn run_compile(cmd: &CompileCommand) -> Result<Report> {
    match cmd {
        CompileCommand::ToFormula(set) => {
            let a = neighbourhood(set)?;
            match neighbourhood_to_formula(&a) {
                Ok(f) => {
                    let text = f.to_string();
                    Ok(Report::ok(text.clone(), json!({ "formula": text })))
                }
                Err(e) => negative_compile(e),
            }
        }
        CompileCommand::FromFormula { input, field: spec } => {
            let k = field(spec)?;
            let f = read_formula(input)?;
            match formula_to_neighbourhood(&f, &k) {
                Ok(out) => {
                    let a = &out.neighbourhood;
                    let text = format!(
                        "target: {}\nelements: {}\ndisjunct: {} (defines alone: {})",
                        a.target(),
                        show_set(a.elements()),
                        out.disjunct + 1,
                        yes_no(out.disjunct_defines_alone)
                    );
                    Ok(Report::ok(text, to_json(&out)))
                }
                Err(e) => negative_compile(e),
            }
        }
        CompileCommand::SingleEq { set, prime_field } => {
            let a = neighbourhood(set)?;
            if *prime_field {
                let f = prime_field_equation(a.target(), a.field()).map_err(Error::from)?;
                let text = f.to_string();
                return Ok(Report::ok(text.clone(), json!({ "formula": text })));
            }
            match compile_singleton(&a) {
                Ok(s) => {
                    let f = s.formula();
                    let text = format!(
                        "{}\nrootless: {}\nequations: {}",
                        f,
                        s.rootless.poly("x"),
                        s.equations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
                    );
                    let mut json = to_json(&s);
                    json["formula"] = json!(f.to_string());
                    Ok(Report::ok(text, json))
                }
                Err(e) => negative_compile(e),
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match run_command(&cli.command) {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Text => format!("{}\n", r.text),
                Format::Json => format!("{}\n", r.json),
            };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stderr = format!("error[{}]: {}\n", e.code(), e);
            let stdout = match cli.format {
                Format::Json => format!("{}\n", json!({ "error": { "code": e.code(), "message": e.to_string() } })),
                Format::Text => String::new(),
            };
            Outcome { code: 2, stdout, stderr }
        }
    }
}
