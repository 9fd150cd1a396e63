//! The `lpa` command line: argument handling, input loading and JSON
//! reports. [`run`] is the whole program minus process exit, so tests can
//! drive it directly.

use std::ffi::OsString;
use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use lpa_core::algebra::{Element, Lpa, Monomial, RewriteOrder, ScalingVector, SpecialEdges};
use lpa_core::batch::Exec;
use lpa_core::branching::{classify_bs, validate_bs, Classification, ReducibleReason};
use lpa_core::path::{FinitePath, TailClass};
use lpa_core::quiver::{standard, Quiver};
use lpa_core::repr::{
    act_rep, f_window, generation_certificate_f, generation_certificate_n, line_point_iso, n_window,
    relation_check, twist_iso, FModule, FNModule, LeftIdeal, Module, NModule, RepVector, TraceStep, TwistIso,
};
use lpa_core::scalars::Field;
use lpa_core::structure::{
    faithfulness_witness, independence_witness, s_faithfulness_witness, wedderburn, IndependenceMode, StructureError,
    WitnessReport,
};
use lpa_core::text::{parse_bs, parse_element, parse_quiver, parse_vector, TextError, VectorKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{what}: {source}")]
    Text {
        what: String,
        #[source]
        source: TextError,
    },
    #[error("{0}")]
    Input(String),
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "lpa", version, about = "Exact computations in Leavitt path algebras of finite quivers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Coefficient field: `q` or `gf:<p>`.
    #[arg(long, default_value = "q", global = true)]
    field: String,
    /// Special-edge overrides, e.g. `v=b,1=f`.
    #[arg(long = "special-edges", global = true)]
    special_edges: Option<String>,
    /// Prefix or length bound for module windows.
    #[arg(long, default_value_t = 6, global = true)]
    window: usize,
    /// Include a trace of the formulas used.
    #[arg(long, global = true)]
    trace: bool,
    /// Let `faithful` fall back to the twisted search.
    #[arg(long, global = true)]
    escalate: bool,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Exit with status 1 unless the verdict equals this.
    #[arg(long, global = true)]
    expect: Option<String>,
    /// Human-readable text instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce an element to normal form.
    Normalize {
        quiver: String,
        #[arg(short = 'e', long = "element")]
        element: String,
    },
    /// Multiply elements left to right and reduce.
    Mul {
        quiver: String,
        #[arg(short = 'e', long = "element", num_args = 1, required = true)]
        elements: Vec<String>,
    },
    /// Act with an element on a module vector.
    Act {
        quiver: String,
        #[arg(short = 'e', long = "element")]
        element: String,
        #[arg(long)]
        vector: String,
        /// `f`, `n`, `sum` or `auto`.
        #[arg(long, default_value = "auto")]
        module: String,
        /// Scaling vector for the F part, e.g. `x=2,a=1/3`.
        #[arg(long)]
        twist: Option<String>,
        /// Treat the vector as an element of the left ideal `L e_v`.
        #[arg(long)]
        ideal: Option<String>,
    },
    /// Check relations (0)-(4) in the algebra and on F and N.
    Relcheck { quiver: String },
    /// Produce `(a, lambda)` with `a . u = lambda target` in F or N.
    Certify {
        quiver: String,
        #[arg(long)]
        vector: String,
        /// Defaults to a seeded random basis vector of the same summand.
        #[arg(long)]
        target: Option<String>,
    },
    /// Classify a finite branching system.
    #[command(name = "classify-bs")]
    ClassifyBs { quiver: String, system: String },
    /// Matrix decomposition of an acyclic quiver.
    Wedderburn { quiver: String },
    /// Nonzero-action witness in F (+) N.
    Faithful {
        quiver: String,
        #[arg(short = 'e', long = "element")]
        element: String,
    },
    /// Nonzero-action witness in the twisted sum.
    Sfaithful {
        quiver: String,
        #[arg(short = 'e', long = "element")]
        element: String,
    },
    /// Compare two twists of a rational summand of F.
    #[command(name = "twist-iso")]
    TwistIso {
        quiver: String,
        /// Cycle naming the class, e.g. `a` or `a.b`.
        #[arg(long)]
        class: String,
        #[arg(long = "a")]
        a: String,
        #[arg(long = "b")]
        b: String,
    },
    /// Finite line points and their minimal left ideals.
    Linepoints { quiver: String },
    /// Independence witness for a family of monomials.
    Independence {
        quiver: String,
        #[arg(short = 'e', long = "element", num_args = 1, required = true)]
        monomials: Vec<String>,
        /// `lengths:M,N` or `sink`.
        #[arg(long)]
        mode: String,
    },
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    subcommand: &'static str,
    inputs: Map<String, Value>,
    result: Value,
    verdict: String,
    /// Verdicts that fail regardless of `--expect`.
    negative: bool,
    trace: Option<Value>,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
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
    match dispatch(&cli) {
        Ok(report) => {
            let mismatch = cli.opts.expect.as_ref().is_some_and(|e| *e != report.verdict);
            let code = if report.negative || mismatch { 1 } else { 0 };
            let stdout = render(&report, cli.opts.pretty);
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render(r: &Report, pretty: bool) -> String {
    let mut doc = Map::new();
    doc.insert("subcommand".into(), json!(r.subcommand));
    doc.insert("inputs".into(), Value::Object(r.inputs.clone()));
    doc.insert("result".into(), r.result.clone());
    doc.insert("verdict".into(), json!(r.verdict));
    if let Some(t) = &r.trace {
        doc.insert("trace".into(), t.clone());
    }
    let doc = Value::Object(doc);
    if pretty {
        let mut out = String::new();
        write_pretty(&mut out, &doc, 0);
        out
    } else {
        format!("{doc}\n")
    }
}

fn write_pretty(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_pretty(out, x, depth + 1);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x))),
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    write_pretty(out, x, depth + 1);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar_text(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.is_empty(),
        Value::Object(m) => m.is_empty(),
        _ => true,
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(_) => "[]".into(),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

/// A quiver file, or one of the built-in names R1, R2, A2, A3, T.
fn load_quiver(arg: &str) -> Result<Quiver, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: arg.to_string(),
            source,
        })?;
        return parse_quiver(&text).map_err(|source| CliError::Text {
            what: arg.to_string(),
            source,
        });
    }
    standard::all()
        .into_iter()
        .find(|q| q.name() == arg)
        .ok_or_else(|| CliError::Input(format!("{arg}: no such file or built-in quiver")))
}

struct Ctx {
    lpa: Lpa,
    inputs: Map<String, Value>,
}

impl Ctx {
    fn new(quiver_arg: &str, opts: &Opts) -> Result<Ctx, CliError> {
        let q = Arc::new(load_quiver(quiver_arg)?);
        let field: Field = opts.field.parse().map_err(input)?;
        let special = match &opts.special_edges {
            None => SpecialEdges::least(&q),
            Some(s) => {
                let mut overrides = Vec::new();
                for (v, a) in assignments(s)? {
                    let v = q.vertex(&v).map_err(input)?;
                    let a = q.arrow(&a).map_err(input)?;
                    overrides.push((v, a));
                }
                SpecialEdges::with_overrides(&q, &overrides).map_err(input)?
            }
        };
        let mut inputs = Map::new();
        inputs.insert("quiver".into(), json!(q.name()));
        inputs.insert("field".into(), json!(field.to_string()));
        if let Some(s) = &opts.special_edges {
            inputs.insert("special_edges".into(), json!(s));
        }
        inputs.insert("window".into(), json!(opts.window));
        inputs.insert("seed".into(), json!(opts.seed));
        Ok(Ctx {
            lpa: Lpa::with_special(q, field, special),
            inputs,
        })
    }

    fn q(&self) -> &Quiver {
        self.lpa.quiver()
    }

    fn echo(&mut self, key: &str, v: Value) {
        self.inputs.insert(key.into(), v);
    }

    fn element(&self, what: &str, text: &str) -> Result<Element, CliError> {
        parse_element(text, self.q(), self.lpa.field()).map_err(|source| CliError::Text {
            what: what.to_string(),
            source,
        })
    }

    fn vector(&self, text: &str, kind: VectorKind) -> Result<RepVector, CliError> {
        parse_vector(text, self.q(), self.lpa.field(), kind).map_err(|source| CliError::Text {
            what: "vector".into(),
            source,
        })
    }

    fn show(&self, x: &Element) -> Value {
        json!(x.display(self.q()).to_string())
    }

    fn show_vec(&self, v: &RepVector) -> Value {
        json!(v.display(self.q()))
    }

    fn scaling(&self, text: &str) -> Result<ScalingVector, CliError> {
        let field = self.lpa.field();
        let mut values = vec![field.one(); self.q().arrow_count()];
        for (a, c) in assignments(text)? {
            let a = self.q().arrow(&a).map_err(input)?;
            values[a.index()] = field.parse_scalar(&c).map_err(input)?;
        }
        ScalingVector::new(self.q(), values).map_err(input)
    }

    fn report(self, subcommand: &'static str, result: Value, verdict: &str) -> Report {
        Report {
            subcommand,
            inputs: self.inputs,
            result,
            verdict: verdict.to_string(),
            negative: false,
            trace: None,
        }
    }
}

/// `k=v,k=v`, whitespace-insensitive.
fn assignments(s: &str) -> Result<Vec<(String, String)>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Input(format!("expected `name=value`, got `{p}`")))
        })
        .collect()
}

fn trace_json(steps: &[TraceStep]) -> Value {
    Value::Array(
        steps
            .iter()
            .map(|s| {
                json!({
                    "generator": s.generator,
                    "formula": s.formula,
                    "input": s.input,
                    "output": s.output,
                })
            })
            .collect(),
    )
}

fn zero_verdict(zero: bool) -> &'static str {
    if zero {
        "zero"
    } else {
        "nonzero"
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let opts = &cli.opts;
    let exec = Exec::default();
    match &cli.command {
        Command::Normalize { quiver, element } => {
            let mut cx = Ctx::new(quiver, opts)?;
            let x = cx.element("element", element)?;
            cx.echo("element", json!(element));
            let r = cx.lpa.reduce(&x);
            let (seeded, steps) = cx.lpa.reduce_with(&x, RewriteOrder::Seeded(opts.seed));
            let kappa = if r.is_empty() { Value::Null } else { json!(cx.lpa.kappa_hat(&r).map_err(input)?) };
            let degrees: Map<String, Value> = r
                .degree_split()
                .iter()
                .map(|(d, part)| (d.to_string(), cx.show(part)))
                .collect();
            let result = json!({
                "reduced": cx.show(&r),
                "kappa_hat": kappa,
                "degrees": degrees,
                "seeded_order_agrees": seeded == r,
                "seeded_rewrites": steps,
            });
            let verdict = zero_verdict(r.is_empty());
            Ok(cx.report("normalize", result, verdict))
        }
        Command::Mul { quiver, elements } => {
            let mut cx = Ctx::new(quiver, opts)?;
            let mut acc: Option<Element> = None;
            for (i, e) in elements.iter().enumerate() {
                let x = cx.element(&format!("element {}", i + 1), e)?;
                acc = Some(match acc {
                    None => x,
                    Some(a) => cx.lpa.mul(&a, &x).map_err(input)?,
                });
            }
            cx.echo("elements", json!(elements));
            let r = cx.lpa.reduce(&acc.expect("at least one element"));
            let result = json!({ "product": cx.show(&r) });
            let verdict = zero_verdict(r.is_empty());
            Ok(cx.report("mul", result, verdict))
        }
        Command::Act {
            quiver,
            element,
            vector,
            module,
            twist,
            ideal,
        } => {
            let mut cx = Ctx::new(quiver, opts)?;
            let u = cx.element("element", element)?;
            cx.echo("element", json!(element));
            cx.echo("vector", json!(vector));
            let a = twist.as_deref().map(|t| cx.scaling(t)).transpose()?;
            if let Some(t) = twist {
                cx.echo("twist", json!(t));
            }
            let v = match ideal {
                Some(i) => {
                    cx.echo("ideal", json!(i));
                    let i = cx.q().vertex(i).map_err(input)?;
                    let x = cx.element("vector", vector)?;
                    LeftIdeal::new(cx.lpa.clone(), i).vector(&x).map_err(input)?;
                    RepVector::InLeftIdeal(x, i)
                }
                None => {
                    let kind: VectorKind = module.parse().map_err(CliError::Input)?;
                    cx.echo("module", json!(module));
                    cx.vector(vector, kind)?
                }
            };
            let out = act_rep(&cx.lpa, a.as_ref(), &u, &v).map_err(input)?;
            let trace = if opts.trace { Some(trace_json(&act_trace(&cx.lpa, a, &u, &v)?)) } else { None };
            let result = json!({ "result": cx.show_vec(&out) });
            let verdict = zero_verdict(out.is_zero());
            let mut r = cx.report("act", result, verdict);
            r.trace = trace;
            Ok(r)
        }
        Command::Relcheck { quiver } => {
            let cx = Ctx::new(quiver, opts)?;
            let q = cx.lpa.quiver_arc();
            let field = cx.lpa.field();
            let algebra = cx.lpa.check_relations();
            let f = relation_check(&FModule::new(Arc::clone(&q), field), &f_window(&q, opts.window), exec);
            let n = relation_check(&NModule::new(Arc::clone(&q), field), &n_window(&q, opts.window), exec);
            let mut ok = true;
            let mut sections = Map::new();
            for (name, reports) in [("algebra", algebra), ("F", f), ("N", n)] {
                let rows: Vec<Value> = reports
                    .iter()
                    .map(|r| {
                        ok &= r.holds();
                        json!({ "family": r.family, "checks": r.checks, "failures": r.failures })
                    })
                    .collect();
                sections.insert(name.into(), Value::Array(rows));
            }
            let mut r = cx.report("relcheck", Value::Object(sections), if ok { "pass" } else { "fail" });
            r.negative = !ok;
            Ok(r)
        }
        Command::Certify { quiver, vector, target } => {
            let mut cx = Ctx::new(quiver, opts)?;
            cx.echo("vector", json!(vector));
            let u = cx.vector(vector, VectorKind::Infer)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let q = cx.lpa.quiver_arc();
            let (cert, target_text) = match u {
                RepVector::InF(v) => {
                    let class = v
                        .keys()
                        .next()
                        .ok_or_else(|| CliError::Input("the vector is zero".into()))?
                        .tail_class();
                    let t = match target {
                        Some(t) => match cx.vector(t, VectorKind::F)? {
                            RepVector::InF(tv) if tv.len() == 1 => tv.keys().next().cloned().expect("one key"),
                            _ => return Err(CliError::Input("the target must be a single infinite path".into())),
                        },
                        None => lpa_core::random::class_member(&mut rng, &q, &class, opts.window),
                    };
                    let c = generation_certificate_f(&cx.lpa, &v, &t).map_err(input)?;
                    (c, t.display(&q).to_string())
                }
                RepVector::InN(v) => {
                    let sink = v
                        .keys()
                        .next()
                        .ok_or_else(|| CliError::Input("the vector is zero".into()))?
                        .target();
                    let t: FinitePath = match target {
                        Some(t) => match cx.vector(t, VectorKind::N)? {
                            RepVector::InN(tv) if tv.len() == 1 => tv.keys().next().cloned().expect("one key"),
                            _ => return Err(CliError::Input("the target must be a single sink path".into())),
                        },
                        None => {
                            use rand::seq::SliceRandom;
                            let basis = lpa_core::path::enumerate_sink_paths(&q, sink, opts.window).map_err(input)?;
                            basis.choose(&mut rng).expect("nonempty").clone()
                        }
                    };
                    let c = generation_certificate_n(&cx.lpa, &v, &t).map_err(input)?;
                    (c, t.display(&q).to_string())
                }
                _ => return Err(CliError::Input("certify needs a vector of a single summand of F or N".into())),
            };
            cx.echo("target", json!(target_text));
            let result = json!({
                "element": cx.show(&cert.element),
                "lambda": cert.lambda.to_string(),
                "target": target_text,
            });
            Ok(cx.report("certify", result, "certified"))
        }
        Command::ClassifyBs { quiver, system } => {
            let mut cx = Ctx::new(quiver, opts)?;
            cx.echo("system", json!(system));
            let text = std::fs::read_to_string(system).map_err(|source| CliError::Io {
                path: system.clone(),
                source,
            })?;
            let x = parse_bs(&text, cx.lpa.quiver_arc()).map_err(|source| CliError::Text {
                what: system.clone(),
                source,
            })?;
            let report = validate_bs(&x);
            if !report.perfect {
                let result = json!({
                    "axioms_ok": report.axioms_ok,
                    "saturated": report.saturated,
                    "violations": report.violations.iter().map(|v| format!("{} {}", v.axiom, v.detail)).collect::<Vec<_>>(),
                });
                let mut r = cx.report("classify-bs", result, "not-perfect");
                r.negative = true;
                return Ok(r);
            }
            let verdict = classify_bs(&x, cx.lpa.field()).map_err(input)?;
            let q = cx.q();
            let table: Vec<Value> = verdict
                .traces
                .iter()
                .map(|(p, t)| json!({ "point": x.name(*p), "trace": t.display(q) }))
                .collect();
            let (word, result) = match &verdict.classification {
                Classification::Irreducible { target } => ("irreducible", json!({ "target": target.display(q) })),
                Classification::Reducible {
                    witness,
                    reason,
                    subspace_dim,
                } => {
                    let reason = match reason {
                        ReducibleReason::SeveralComponents(cs) => json!({
                            "components": cs.iter().map(|c| c.display(q)).collect::<Vec<_>>()
                        }),
                        ReducibleReason::Collision(a, b) => json!({ "collision": [x.name(*a), x.name(*b)] }),
                    };
                    (
                        "reducible",
                        json!({
                            "witness": witness.display_with(|p| x.name(*p).to_string()).to_string(),
                            "reason": reason,
                            "subspace_dim": subspace_dim,
                        }),
                    )
                }
            };
            let mut r = cx.report("classify-bs", result, word);
            r.trace = Some(Value::Array(table));
            Ok(r)
        }
        Command::Wedderburn { quiver } => {
            let cx = Ctx::new(quiver, opts)?;
            match wedderburn(&cx.lpa) {
                Ok(w) => {
                    let q = cx.q();
                    let blocks: Vec<Value> = w
                        .blocks
                        .iter()
                        .map(|b| {
                            json!({
                                "sink": q.vertex_name(b.sink),
                                "n": b.size(),
                                "paths": b.paths.iter().map(|p| p.display(q).to_string()).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    let ok = w.verified();
                    let result = json!({
                        "blocks": blocks,
                        "dim": w.dim,
                        "reduced_dim": w.reduced_dim,
                        "table_checks": w.table_checks,
                        "table_failures": w.table_failures,
                        "unit": w.unit_ok,
                        "rank": w.rank,
                    });
                    let mut r = cx.report("wedderburn", result, if ok { "verified" } else { "failed" });
                    r.negative = !ok;
                    Ok(r)
                }
                Err(StructureError::NotAcyclic) => {
                    let mut r = cx.report("wedderburn", json!({ "error": "the quiver has an oriented cycle" }), "not-acyclic");
                    r.negative = true;
                    Ok(r)
                }
                Err(e) => Err(input(e)),
            }
        }
        Command::Faithful { quiver, element } | Command::Sfaithful { quiver, element } => {
            let twisted = matches!(cli.command, Command::Sfaithful { .. });
            let mut cx = Ctx::new(quiver, opts)?;
            let u = cx.element("element", element)?;
            cx.echo("element", json!(element));
            let name = if twisted { "sfaithful" } else { "faithful" };
            let mut outcome = if twisted {
                s_faithfulness_witness(&cx.lpa, &u)
            } else {
                faithfulness_witness(&cx.lpa, &u)
            };
            let mut escalated = false;
            if !twisted && opts.escalate && matches!(outcome, Err(StructureError::HypothesisFailed { .. })) {
                escalated = true;
                outcome = s_faithfulness_witness(&cx.lpa, &u);
            }
            let (verdict, mut result) = match outcome {
                Ok(w) => ("witness", witness_json(&cx.lpa, &w)),
                Err(StructureError::ZeroElement) => ("zero", json!({ "error": "the element is zero" })),
                Err(StructureError::HypothesisFailed { vertex }) => (
                    "hypothesis-failed",
                    json!({ "error": format!("vertex {vertex} reaches no sink and starts no non-cyclic infinite path"), "vertex": vertex }),
                ),
                Err(StructureError::NoWitnessInFiniteField(f)) => (
                    "no-witness-in-finite-field",
                    json!({ "error": format!("no unit of {f} gives a nonzero action"), "element_is_zero": false }),
                ),
                Err(e) => return Err(input(e)),
            };
            if escalated {
                result["escalated"] = json!(true);
            }
            let negative = verdict != "witness";
            let mut r = cx.report(name, result, verdict);
            r.negative = negative;
            Ok(r)
        }
        Command::TwistIso { quiver, class, a, b } => {
            let mut cx = Ctx::new(quiver, opts)?;
            cx.echo("class", json!(class));
            cx.echo("a", json!(a));
            cx.echo("b", json!(b));
            let q = cx.lpa.quiver_arc();
            let cycle = match parse_element(class, &q, cx.lpa.field()) {
                Ok(x) if x.len() == 1 => {
                    let (m, _) = x.terms().next().expect("one term");
                    if !m.star().is_trivial() {
                        return Err(CliError::Input("the class must be given by a cycle".into()));
                    }
                    m.path().clone()
                }
                Ok(_) => return Err(CliError::Input("the class must be given by a cycle".into())),
                Err(source) => return Err(CliError::Text { what: "class".into(), source }),
            };
            let class = TailClass::of(&q, &cycle).map_err(input)?;
            let (av, bv) = (cx.scaling(a)?, cx.scaling(b)?);
            let out = twist_iso(&cx.lpa, &av, &bv, &class, opts.window, exec).map_err(input)?;
            let (verdict, result, negative) = match out {
                TwistIso::Iso { theta, check } => (
                    "iso",
                    json!({
                        "class": class.display(&q).to_string(),
                        "theta": theta.iter().map(|(p, c)| json!([p.display(&q).to_string(), c.to_string()])).collect::<Vec<_>>(),
                        "hom_checks": check.checks,
                        "hom_failures": check.failures,
                    }),
                    !check.holds(),
                ),
                TwistIso::Distinguisher { a_q, b_q } => (
                    "distinguished",
                    json!({ "class": class.display(&q).to_string(), "a_q": a_q.to_string(), "b_q": b_q.to_string() }),
                    false,
                ),
            };
            let mut r = cx.report("twist-iso", result, verdict);
            r.negative = negative;
            Ok(r)
        }
        Command::Linepoints { quiver } => {
            let cx = Ctx::new(quiver, opts)?;
            let q = cx.q();
            let mut ok = true;
            let mut rows = Vec::new();
            for (v, end) in q.line_points() {
                if end.is_none() {
                    rows.push(json!({ "vertex": q.vertex_name(v), "finite": false }));
                    continue;
                }
                let iso = line_point_iso(&cx.lpa, v, opts.window, exec).map_err(input)?;
                ok &= iso.check.holds() && iso.left_inverse && iso.right_inverse;
                rows.push(json!({
                    "vertex": q.vertex_name(v),
                    "finite": true,
                    "end": q.vertex_name(iso.end),
                    "path": iso.path.display(q).to_string(),
                    "images": iso.images.iter().map(|(p, x)| json!([p.display(q).to_string(), x.display(q).to_string()])).collect::<Vec<_>>(),
                    "hom_checks": iso.check.checks,
                    "hom_failures": iso.check.failures,
                    "q_qstar_is_unit": iso.right_inverse,
                    "qstar_q_is_unit": iso.left_inverse,
                    "full_basis": iso.full_basis,
                }));
            }
            let mut r = cx.report("linepoints", json!({ "line_points": rows }), if ok { "verified" } else { "failed" });
            r.negative = !ok;
            Ok(r)
        }
        Command::Independence { quiver, monomials, mode } => {
            let mut cx = Ctx::new(quiver, opts)?;
            cx.echo("monomials", json!(monomials));
            cx.echo("mode", json!(mode));
            let mode = parse_mode(mode)?;
            let monos = monomials
                .iter()
                .map(|t| {
                    let x = cx.element("monomial", t)?;
                    let single = x.terms().next().filter(|(_, c)| x.len() == 1 && c.is_one()).map(|(m, _)| m.clone());
                    single.ok_or_else(|| CliError::Input(format!("`{t}` is not a single monomial")))
                })
                .collect::<Result<Vec<Monomial>, CliError>>()?;
            let w = independence_witness(&cx.lpa, &monos, mode).map_err(input)?;
            let q = cx.q();
            let show_key = |k: &lpa_core::repr::FNKey| match k {
                lpa_core::repr::FNKey::F(p) => p.display(q).to_string(),
                lpa_core::repr::FNKey::N(p) => p.display(q).to_string(),
            };
            let ok = w.full_rank(monos.len());
            let result = json!({
                "probes": w.probes.iter().map(show_key).collect::<Vec<_>>(),
                "rows": w.rows.iter().map(|(i, k)| json!([i, show_key(k)])).collect::<Vec<_>>(),
                "matrix": w.matrix.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "rank": w.rank,
                "count": monos.len(),
            });
            let mut r = cx.report("independence", result, if ok { "independent" } else { "dependent" });
            r.negative = !ok;
            Ok(r)
        }
    }
}

fn parse_mode(s: &str) -> Result<IndependenceMode, CliError> {
    if s == "sink" {
        return Ok(IndependenceMode::SinkEnding);
    }
    let bad = || CliError::Input(format!("mode `{s}`: expected `lengths:M,N` or `sink`"));
    let (m, n) = s.strip_prefix("lengths:").and_then(|r| r.split_once(',')).ok_or_else(bad)?;
    Ok(IndependenceMode::FixedLengths(
        m.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

fn act_trace(lpa: &Lpa, twist: Option<ScalingVector>, u: &Element, v: &RepVector) -> Result<Vec<TraceStep>, CliError> {
    let q = lpa.quiver_arc();
    let field = lpa.field();
    let f = match twist {
        Some(a) => FModule::twisted(Arc::clone(&q), field, a),
        None => FModule::new(Arc::clone(&q), field),
    };
    let steps = match v {
        RepVector::InF(x) => f.act_traced(u, x).map_err(input)?.1,
        RepVector::InN(x) => NModule::new(q, field).act_traced(u, x).map_err(input)?.1,
        RepVector::DirectSum(x) => FNModule { f, n: NModule::new(q, field) }.act_traced(u, x).map_err(input)?.1,
        RepVector::InLeftIdeal(x, i) => {
            let ideal = LeftIdeal::new(lpa.clone(), *i);
            ideal.act_traced(u, &ideal.vector(x).map_err(input)?).map_err(input)?.1
        }
    };
    Ok(steps)
}

fn witness_json(lpa: &Lpa, w: &WitnessReport) -> Value {
    let q = lpa.quiver();
    let mut v = json!({
        "element": w.element.display(q).to_string(),
        "descent": w.descent.iter().map(|&a| q.arrow_name(a).to_string()).collect::<Vec<_>>(),
        "vertex": q.vertex_name(w.vertex),
        "descended": w.descended.display(q).to_string(),
        "probe": w.probe.display(q),
        "result": w.result.display(q),
    });
    if let Some((lambda, class)) = &w.twist {
        v["lambda"] = json!(lambda.to_string());
        v["class"] = json!(class.display(q).to_string());
    }
    v
}
