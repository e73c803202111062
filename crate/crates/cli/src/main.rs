//! `lcqmac`: cost regions, bounds and coding schemes from a spec file.
//!
//! Every report is one line of JSON on stdout. Exit code 0 is success, 1 an
//! infeasible request or bad input, 2 a failed internal check.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use lcqmac::allocator::{
    achievable_region, allocate_constructive, allocate_lp, restricted_region_pairwise, AllocError,
};
use lcqmac::document::SpecDocument;
use lcqmac::field::{Fp, FpMatrix};
use lcqmac::nsum::check_sso;
use lcqmac::polyhedra::{
    poly_equal, remove_redundant, vertices_3d, Comparison, HPolyhedron, Inequality,
};
use lcqmac::rational::{parse_tuple, to_f64, Rational};
use lcqmac::regions::{
    converse_bounds_general, cut_set_bounds, region_from_ranks, region_standard,
    symmetric_min_total,
};
use lcqmac::scheme::{
    compile_with, unit_counts, verify_scheme, within_budget, AllocationMethod, Scheme, SchemeError,
    VerifyMode, DEFAULT_CAP,
};
use lcqmac::standard_form::{
    decompose, rank_profile, verify_standard_form, FunctionSpec, SpecError,
};

#[derive(Parser)]
#[command(
    name = "lcqmac",
    version,
    about = "Exact cost regions and N-sum-box schemes for linear computation over a quantum MAC"
)]
struct Cli {
    /// Pretty-print, with decimal approximations next to fractions.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ranks of every union of the transmitters' spans.
    Ranks { spec: PathBuf },
    /// Irredundant inequalities of the optimal cost region.
    Region {
        spec: PathBuf,
        #[arg(long)]
        vertices: bool,
        /// Build the region from the standard-form dimension counts.
        #[arg(long, conflicts_with = "pairwise_only")]
        standard: bool,
        /// Region reachable with two-way entanglement only.
        #[arg(long)]
        pairwise_only: bool,
    },
    /// Whether a cost tuple lies in the region.
    Check {
        spec: PathBuf,
        #[arg(long)]
        cost: String,
    },
    /// Standard-form blocks and their verification.
    Decompose { spec: PathBuf },
    /// Protocol amounts meeting a cost tuple.
    Allocate {
        spec: PathBuf,
        #[arg(long)]
        cost: String,
        /// Use the explicit corner construction instead of the LP.
        #[arg(long)]
        constructive: bool,
    },
    /// Writes a scheme achieving a cost tuple.
    Compile {
        spec: PathBuf,
        #[arg(long)]
        cost: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        constructive: bool,
    },
    /// Checks a compiled scheme against direct evaluation.
    Simulate {
        scheme: PathBuf,
        #[arg(long, conflicts_with_all = ["samples", "seed"])]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest number of realizations an exhaustive run may visit.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Cut-set and partition bounds for any number of transmitters.
    Bounds { spec: PathBuf },
    /// Compares the projected protocol region with the closed-form region.
    FmVerify { spec: PathBuf },
    /// Strong self-orthogonality of a transfer matrix `[Mx, Mz]`.
    Sso {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        mx: String,
        #[arg(long)]
        mz: String,
        #[arg(long)]
        q: u32,
    },
    /// Least total cost for a symmetric rank profile.
    Symmetric { r1: usize, r2: usize, r3: usize },
}

/// A failed command. `Invalid` maps to exit code 1, `Internal` to 2.
enum Failure {
    Invalid(Value),
    Internal(Value),
}

fn invalid(msg: impl ToString) -> Failure {
    Failure::Invalid(json!({ "error": msg.to_string() }))
}

fn internal(msg: impl ToString) -> Failure {
    Failure::Internal(json!({ "error": msg.to_string() }))
}

type Outcome = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, payload) = match run(cli.command) {
        Ok(v) => (0, v),
        Err(Failure::Invalid(v)) => (1, v),
        Err(Failure::Internal(v)) => (2, v),
    };
    if cli.human {
        println!(
            "{}",
            serde_json::to_string_pretty(&humanize(payload)).expect("json")
        );
    } else {
        println!("{payload}");
    }
    ExitCode::from(code)
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Ranks { spec } => {
            let spec = load_spec(&spec)?;
            let rp = rank_profile(&spec).map_err(invalid)?;
            Ok(json!({ "ranks": rp }))
        }
        Command::Region {
            spec,
            vertices,
            standard,
            pairwise_only,
        } => region(&spec, vertices, standard, pairwise_only),
        Command::Check { spec, cost } => check(&spec, &cost),
        Command::Decompose { spec } => decompose_report(&spec),
        Command::Allocate {
            spec,
            cost,
            constructive,
        } => allocate(&spec, &cost, constructive),
        Command::Compile {
            spec,
            cost,
            out,
            constructive,
        } => compile(&spec, &cost, &out, constructive),
        Command::Simulate {
            scheme,
            exhaustive,
            samples,
            seed,
            cap,
        } => simulate(&scheme, exhaustive, samples, seed, cap),
        Command::Bounds { spec } => bounds(&spec),
        Command::FmVerify { spec } => fm_verify(&spec),
        Command::Sso { mx, mz, q } => sso(&mx, &mz, q),
        Command::Symmetric { r1, r2, r3 } => {
            let total = symmetric_min_total(r1, r2, r3).map_err(invalid)?;
            Ok(json!({ "profile": [r1, r2, r3], "min_total": total.to_string() }))
        }
    }
}

fn load_spec(path: &Path) -> Result<FunctionSpec, Failure> {
    let doc: SpecDocument =
        serde_json::from_str(&read_text(path)?).map_err(|e| parse_failure(path, e))?;
    doc.to_spec().map_err(invalid)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn parse_failure(path: &Path, e: serde_json::Error) -> Failure {
    invalid(format!("cannot parse {}: {e}", path.display()))
}

fn parse_cost(s: &str) -> Result<Vec<Rational>, Failure> {
    let cost = parse_tuple(s).map_err(|e| invalid(format!("bad cost tuple: {}", e.0)))?;
    if cost.len() != 3 {
        return Err(invalid(format!("cost needs 3 entries, got {}", cost.len())));
    }
    Ok(cost)
}

fn rationals(v: &[Rational]) -> Value {
    Value::from(v.iter().map(|r| r.to_string()).collect::<Vec<_>>())
}

/// A row as stored, plus its text with the smallest coefficient scaled to one.
fn row_json(row: &Inequality) -> Value {
    let smallest = row
        .coeffs
        .iter()
        .filter(|c| **c != Rational::from_integer(0.into()))
        .map(|c| {
            if *c < Rational::from_integer(0.into()) {
                -c
            } else {
                c.clone()
            }
        })
        .min();
    let text = match smallest {
        Some(s) => {
            Inequality::new(row.coeffs.iter().map(|c| c / &s).collect(), &row.rhs / &s).to_string()
        }
        None => row.to_string(),
    };
    json!({ "coeffs": rationals(&row.coeffs), "rhs": row.rhs.to_string(), "text": text })
}

fn rows_json(poly: &HPolyhedron) -> Value {
    Value::from(poly.rows.iter().map(row_json).collect::<Vec<_>>())
}

fn three_party(spec: &FunctionSpec) -> Result<(), Failure> {
    if spec.transmitters() != 3 {
        return Err(invalid(SpecError::NotThreeTransmitters(
            spec.transmitters(),
        )));
    }
    Ok(())
}

fn region(path: &Path, with_vertices: bool, standard: bool, pairwise: bool) -> Outcome {
    let spec = load_spec(path)?;
    three_party(&spec)?;
    let (source, poly) = if pairwise || standard {
        let n = decompose(&spec).map_err(internal)?.n_vector();
        if pairwise {
            let p = restricted_region_pairwise(&n).map_err(internal)?;
            ("pairwise", p)
        } else {
            ("standard", region_standard(&n))
        }
    } else {
        let rp = rank_profile(&spec).map_err(invalid)?;
        ("ranks", region_from_ranks(&rp).map_err(invalid)?)
    };
    let poly = remove_redundant(&poly);
    let mut out = json!({ "source": source, "inequalities": rows_json(&poly) });
    if with_vertices {
        let vs = vertices_3d(&poly).map_err(internal)?;
        out["vertices"] = Value::from(vs.iter().map(|v| rationals(v)).collect::<Vec<_>>());
    }
    Ok(out)
}

fn check(path: &Path, cost: &str) -> Outcome {
    let spec = load_spec(path)?;
    three_party(&spec)?;
    let cost = parse_cost(cost)?;
    let rp = rank_profile(&spec).map_err(invalid)?;
    let poly = remove_redundant(&region_from_ranks(&rp).map_err(invalid)?);
    match poly.first_violation(&cost).map_err(internal)? {
        None => Ok(json!({ "cost": rationals(&cost), "feasible": true })),
        Some(i) => Err(Failure::Invalid(json!({
            "cost": rationals(&cost),
            "feasible": false,
            "violated": row_json(&poly.rows[i]),
        }))),
    }
}

fn matrix_json(m: &FpMatrix) -> Value {
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": m.to_rows() })
}

fn decompose_report(path: &Path) -> Outcome {
    let spec = load_spec(path)?;
    three_party(&spec)?;
    let sf = match decompose(&spec) {
        Ok(sf) => sf,
        Err(SpecError::DecompositionFailed(v)) => {
            return Err(Failure::Internal(json!({
                "verified": false,
                "violation": v.to_string(),
                "condition": v.condition(),
            })))
        }
        Err(e) => return Err(invalid(e)),
    };
    let blocks: BTreeMap<&str, Value> = [
        ("U123", &sf.u123),
        ("U12", &sf.u12),
        ("U13", &sf.u13),
        ("U23", &sf.u23),
        ("U1(23)", &sf.u1_23),
        ("U2(13)", &sf.u2_13),
        ("U3(12)", &sf.u3_12),
        ("U1", &sf.u1),
        ("U2", &sf.u2),
        ("U3", &sf.u3),
    ]
    .into_iter()
    .map(|(k, m)| (k, matrix_json(m)))
    .collect();
    let precoders: Vec<Value> = sf.r.iter().map(matrix_json).collect();
    let report = json!({
        "n": sf.n_vector(),
        "ranks": sf.n_vector().rank_profile(),
        "blocks": blocks,
        "precoders": precoders,
    });
    match verify_standard_form(&spec, &sf) {
        Ok(()) => {
            let mut r = report;
            r["verified"] = Value::Bool(true);
            Ok(r)
        }
        Err(v) => {
            let mut r = report;
            r["verified"] = Value::Bool(false);
            r["violation"] = Value::from(v.to_string());
            r["condition"] = json!(v.condition());
            Err(Failure::Internal(r))
        }
    }
}

fn alloc_failure(e: AllocError) -> Failure {
    match e {
        AllocError::Poly(_) => internal(e),
        _ => invalid(e),
    }
}

fn allocate(path: &Path, cost: &str, constructive: bool) -> Outcome {
    let spec = load_spec(path)?;
    three_party(&spec)?;
    let budget = parse_cost(cost)?;
    let n = decompose(&spec).map_err(internal)?.n_vector();
    let (alloc, trace) = if constructive {
        let (a, t) = allocate_constructive(&n, &budget).map_err(alloc_failure)?;
        (a, Some(t))
    } else {
        (allocate_lp(&n, &budget).map_err(alloc_failure)?, None)
    };
    if !alloc.is_sound(&n, &budget) {
        return Err(internal(
            "allocation does not meet the demands within the budget",
        ));
    }
    let support: Vec<Value> = alloc
        .support()
        .into_iter()
        .map(|(p, a)| json!({ "protocol": format!("P{p}"), "amount": a.to_string() }))
        .collect();
    let mut out = json!({
        "n": n,
        "budget": rationals(&budget),
        "lambda": rationals(&alloc.lambda),
        "support": support,
        "cost": rationals(&alloc.cost()),
    });
    if let Some(t) = trace {
        if t.fell_back {
            eprintln!("warning: constructive recipes failed, LP fallback used");
        }
        out["trace"] = serde_json::to_value(&t).map_err(internal)?;
    }
    Ok(out)
}

fn scheme_failure(e: SchemeError) -> Failure {
    match e {
        SchemeError::Wiring(_) | SchemeError::Poly(_) | SchemeError::Gadget(_) => internal(e),
        SchemeError::NotInRegion { .. } => invalid(e),
        _ => invalid(e),
    }
}

fn compile(path: &Path, cost: &str, out: &Path, constructive: bool) -> Outcome {
    let spec = load_spec(path)?;
    three_party(&spec)?;
    let budget = parse_cost(cost)?;
    let method = if constructive {
        AllocationMethod::Constructive
    } else {
        AllocationMethod::Lp
    };
    let scheme = match compile_with(&spec, &budget, method) {
        Ok(s) => s,
        Err(SchemeError::NotInRegion { row }) => {
            let rp = rank_profile(&spec).map_err(invalid)?;
            let region = region_from_ranks(&rp).map_err(invalid)?;
            return Err(Failure::Invalid(json!({
                "error": "budget lies outside the cost region",
                "violated": row_json(&region.rows[row]),
            })));
        }
        Err(e) => return Err(scheme_failure(e)),
    };
    if !within_budget(&scheme, &budget) {
        return Err(internal("compiled scheme exceeds the budget"));
    }
    let text = serde_json::to_string_pretty(&scheme).map_err(internal)?;
    fs::write(out, text + "\n")
        .map_err(|e| invalid(format!("cannot write {}: {e}", out.display())))?;
    let units: BTreeMap<String, usize> = unit_counts(&scheme)
        .into_iter()
        .map(|(k, c)| (k.to_string(), c))
        .collect();
    Ok(json!({
        "out": out.display().to_string(),
        "L": scheme.batch,
        "units": units,
        "delta": scheme.delta,
        "cost": rationals(&scheme.cost()),
    }))
}

fn simulate(
    path: &Path,
    exhaustive: bool,
    samples: Option<usize>,
    seed: Option<u64>,
    cap: u64,
) -> Outcome {
    let scheme: Scheme =
        serde_json::from_str(&read_text(path)?).map_err(|e| parse_failure(path, e))?;
    let mode = match (exhaustive, samples) {
        (true, _) => VerifyMode::Exhaustive { cap },
        (false, Some(samples)) => VerifyMode::Random {
            samples,
            seed: seed.unwrap_or(0),
        },
        (false, None) if seed.is_some() => return Err(invalid("--seed needs --samples")),
        (false, None) => VerifyMode::Exhaustive { cap },
    };
    let label = match mode {
        VerifyMode::Exhaustive { .. } => "exhaustive",
        VerifyMode::Random { .. } => "random",
    };
    let result = verify_scheme(&scheme, mode).map_err(scheme_failure)?;
    let mut out = json!({
        "mode": label,
        "L": scheme.batch,
        "checked": result.checked,
        "passed": result.passed(),
    });
    match result.counterexample {
        None => Ok(out),
        Some(c) => {
            out["counterexample"] = json!({
                "data": c.data.iter().map(|m| m.to_rows()).collect::<Vec<_>>(),
                "expected": c.expected.to_rows(),
                "got": c.got.to_rows(),
            });
            Err(Failure::Internal(out))
        }
    }
}

fn bounds(path: &Path) -> Outcome {
    let spec = load_spec(path)?;
    let set = converse_bounds_general(&spec);
    let list: Vec<Value> = set
        .bounds
        .iter()
        .map(|b| {
            let mut row = row_json(&b.row);
            // keep the derived scaling, e.g. 2*x1 + 2*x2 >= 10
            row["text"] = Value::from(b.row.to_string());
            row["origins"] =
                Value::from(b.origins.iter().map(|o| o.to_string()).collect::<Vec<_>>());
            row
        })
        .collect();
    let cut = cut_set_bounds(&spec);
    let uniform =
        |s: &lcqmac::regions::BoundSet| s.best_uniform_total().map(|(t, _)| t.to_string());
    Ok(json!({
        "K": spec.transmitters(),
        "bounds": list,
        "min_total": set.min_total().map(|t| t.to_string()),
        "best_uniform_total": uniform(&set),
        "cut_set_min_total": cut.min_total().map(|t| t.to_string()),
    }))
}

fn fm_verify(path: &Path) -> Outcome {
    let spec = load_spec(path)?;
    three_party(&spec)?;
    let n = decompose(&spec).map_err(internal)?.n_vector();
    let projected = achievable_region(&n).map_err(internal)?;
    let closed = region_standard(&n);
    match poly_equal(&projected, &closed).map_err(internal)? {
        Comparison::Equal => Ok(json!({
            "n": n,
            "equal": true,
            "inequalities": rows_json(&remove_redundant(&projected)),
        })),
        other => Err(Failure::Internal(json!({
            "n": n,
            "equal": false,
            "difference": format!("{other:?}"),
        }))),
    }
}

fn parse_matrix(field: Fp, s: &str) -> Result<FpMatrix, Failure> {
    let rows: Vec<Vec<i64>> = s
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|e| e.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()
        .map_err(|e| invalid(format!("bad matrix {s:?}: {e}")))?;
    FpMatrix::from_rows(field, &rows).map_err(invalid)
}

fn sso(mx: &str, mz: &str, q: u32) -> Outcome {
    let field = Fp::new(q).map_err(invalid)?;
    let mx = parse_matrix(field, mx)?;
    let mz = parse_matrix(field, mz)?;
    match check_sso(&mx, &mz).map_err(invalid)? {
        Ok(()) => Ok(json!({ "q": q, "sso": true })),
        Err(f) => Err(Failure::Invalid(
            json!({ "q": q, "sso": false, "failure": format!("{f:?}") }),
        )),
    }
}

/// Adds decimal approximations next to non-integer fractions.
fn humanize(v: Value) -> Value {
    match v {
        Value::String(s) if s.contains('/') => match lcqmac::rational::parse_rational(&s) {
            Ok(r) => Value::String(format!("{s} (~{:.4})", to_f64(&r))),
            Err(_) => Value::String(s),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(humanize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, humanize(v))).collect()),
        other => other,
    }
}
