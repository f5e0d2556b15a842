//! `lazycost`: translate lazy programs into the cost-instrumented
//! nondeterministic form, enumerate or search their executions, check
//! cost specifications, and cross-validate against the call-by-need and
//! operational oracles.
//!
//! Exit codes: 0 when every verdict holds, 1 on a failed verdict, 2 when
//! a check abstained (budget), 64 on usage or input errors.

use clap::{Args, Parser, Subcommand};
use lazycost_core::anf::to_anf_program;
use lazycost_core::approx::parse_demand;
use lazycost_core::casestudy::{exit_code, run_case_study, CaseStudy, Grid, ALL_CASE_STUDIES};
use lazycost_core::ccv::ccv_outcome_set;
use lazycost_core::eval::{
    enumerate, max_cost_witness, min_cost_witness, outcomes_meeting, Budget, EvalError,
    DEFAULT_BUDGET,
};
use lazycost_core::ir::pretty_ir;
use lazycost_core::need::eval_need;
use lazycost_core::parse::parse;
use lazycost_core::pure;
use lazycost_core::speclab::{
    check_optimistic, check_pessimistic, parse_cost_interval, validate_rule,
    weakened_optimistic_conjunction, Bindings, CostExpr, CostPredicate, RuleMode, RuleName,
    SpecReport, ValueCond, Verdict, ALL_RULES,
};
use lazycost_core::syntax::{AnfProgram, Ty};
use lazycost_core::translate::{translate_program, TickMode};
use lazycost_core::typecheck::typecheck;
use lazycost_core::value::{Demand, Env, PureValue};
use lazycost_core::{IrProgram, TVal};
use std::collections::BTreeMap;
use std::process::ExitCode;

const EX_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "lazycost",
    about = "Cost analysis for lazy evaluation via clairvoyant execution",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate a program and print its intermediate form.
    Translate(TranslateArgs),
    /// Enumerate executions or search for extreme costs.
    Eval(EvalArgs),
    /// Run the call-by-need and operational oracles and compare.
    Oracle(OracleArgs),
    /// Check a pessimistic or optimistic cost specification.
    Check(CheckArgs),
    /// Run one of the built-in case studies.
    #[command(name = "case-study")]
    CaseStudy(CaseStudyArgs),
    /// Validate the reasoning rules by random semantic testing.
    #[command(name = "validate-rules")]
    ValidateRules(ValidateArgs),
}

#[derive(Args)]
struct TranslateArgs {
    file: String,
    /// Tick placement: full (one per construct) or simplified (floated).
    #[arg(long, default_value = "simplified")]
    ticks: String,
    /// Output form: ir-json or ir-pretty.
    #[arg(long, default_value = "ir-pretty")]
    emit: String,
}

#[derive(Args)]
struct EvalArgs {
    file: String,
    /// Demand on the result: whnf, conses(N), full, or a literal such as
    /// cons(_, cons(4, undef)).
    #[arg(long)]
    demand: Option<String>,
    /// enumerate, min, or max.
    #[arg(long, default_value = "enumerate")]
    mode: String,
    #[arg(long, default_value = "simplified")]
    ticks: String,
    #[arg(long)]
    json: bool,
    /// Node budget for enumeration and search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct OracleArgs {
    file: String,
    #[arg(long)]
    demand: String,
    /// need, ccv, or both.
    #[arg(long, default_value = "both")]
    which: String,
    /// Tick placement; the operational oracle requires full ticks.
    #[arg(long, default_value = "full")]
    ticks: String,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct CheckArgs {
    file: String,
    /// pessimistic or optimistic.
    #[arg(long)]
    mode: String,
    /// Value condition: any, is_approx(EXPR), exact(EXPR), or
    /// meets(DEMAND); EXPR is a pure expression over the program's
    /// definitions.
    #[arg(long, default_value = "any")]
    value: String,
    /// Cost interval, e.g. "[1, sizeX1(xs)]"; bounds may use the
    /// program's value definitions.
    #[arg(long)]
    cost: Option<String>,
    #[arg(long, default_value = "simplified")]
    ticks: String,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct CaseStudyArgs {
    /// append_take, take_vs_take_prime, rev_vs_rev_prime, foldl_vs_foldr,
    /// or all.
    name: String,
    #[arg(long)]
    json: bool,
    /// Grid bounds as max_xs,max_ys,max_n.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct ValidateArgs {
    /// Restrict to one rule (ret, bind, tick, thunk, forcing,
    /// monotonicity, conjunction).
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, default_value_t = 500)]
    trials: u32,
    #[arg(long, default_value_t = 2026)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit 0
            if e.use_stderr() {
                eprintln!("{}", e);
                return ExitCode::from(EX_USAGE);
            }
            print!("{}", e);
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("lazycost: {}", msg);
            ExitCode::from(EX_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Translate(a) => translate_cmd(a),
        Cmd::Eval(a) => eval_cmd(a),
        Cmd::Oracle(a) => oracle_cmd(a),
        Cmd::Check(a) => check_cmd(a),
        Cmd::CaseStudy(a) => case_study_cmd(a),
        Cmd::ValidateRules(a) => validate_cmd(a),
    }
}

fn load(file: &str) -> Result<AnfProgram, String> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {}", file, e))?;
    let prog = parse(&text).map_err(|e| format!("{}: {}", file, e))?;
    typecheck(&prog).map_err(|e| format!("{}: {}", file, e))?;
    Ok(to_anf_program(&prog))
}

fn tick_mode(s: &str) -> Result<TickMode, String> {
    s.parse()
}

fn translate_cmd(a: TranslateArgs) -> Result<ExitCode, String> {
    let anf = load(&a.file)?;
    let ir = translate_program(&anf, tick_mode(&a.ticks)?);
    match a.emit.as_str() {
        "ir-json" => {
            println!(
                "{}",
                serde_json::to_string_pretty(&ir).map_err(|e| e.to_string())?
            );
        }
        "ir-pretty" => {
            for d in &ir.defs {
                let params = if d.params.is_empty() {
                    String::new()
                } else {
                    format!(" {}", d.params.join(" "))
                };
                println!("def {}{} : {} =", d.name, params, d.ty);
                for line in pretty_ir(&d.body).lines() {
                    println!("  {}", line);
                }
                println!();
            }
            println!("main =");
            for line in pretty_ir(&ir.main).lines() {
                println!("  {}", line);
            }
        }
        other => return Err(format!("unknown emit format `{}`", other)),
    }
    Ok(ExitCode::SUCCESS)
}

fn demand_of(s: Option<&str>) -> Result<Demand, String> {
    match s {
        None => Ok(Demand::Skip),
        Some(s) => parse_demand(s),
    }
}

fn eval_cmd(a: EvalArgs) -> Result<ExitCode, String> {
    let anf = load(&a.file)?;
    let ir = translate_program(&anf, tick_mode(&a.ticks)?);
    let env = Env::new();
    let d = demand_of(a.demand.as_deref())?;
    let mut budget = Budget::new(a.budget);
    match a.mode.as_str() {
        "enumerate" => {
            let outs = match outcomes_meeting(&ir, &ir.main, &env, &d, &mut budget) {
                Ok(o) => o,
                Err(EvalError::BudgetExceeded { limit }) => {
                    eprintln!("lazycost: enumeration budget of {} nodes exceeded", limit);
                    return Ok(ExitCode::from(2));
                }
                Err(e) => return Err(e.to_string()),
            };
            if a.json {
                let rows: Vec<serde_json::Value> = outs
                    .iter()
                    .map(|o| {
                        serde_json::json!({ "value": o.value.to_string(), "cost": o.cost })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "outcomes": rows,
                        "count": outs.len(),
                        "nodes": budget.used(),
                    })
                );
            } else {
                println!("{} outcome(s) meeting demand {}:", outs.len(), d);
                for o in &outs {
                    println!("  cost {:>4}  {}", o.cost, o.value);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        "min" | "max" => {
            let found = if a.mode == "min" {
                min_cost_witness(&ir, &ir.main, &env, &d, &mut budget)
            } else {
                max_cost_witness(&ir, &ir.main, &env, &d, &mut budget)
            };
            let found = match found {
                Ok(f) => f,
                Err(EvalError::BudgetExceeded { limit }) => {
                    eprintln!("lazycost: search budget of {} nodes exceeded", limit);
                    return Ok(ExitCode::from(2));
                }
                Err(e) => return Err(e.to_string()),
            };
            match found {
                Some((cost, value)) => {
                    if a.json {
                        println!(
                            "{}",
                            serde_json::json!({
                                "mode": a.mode,
                                "demand": d.to_string(),
                                "cost": cost,
                                "witness": value.to_string(),
                            })
                        );
                    } else {
                        println!("{} cost {} with witness {}", a.mode, cost, value);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    if a.json {
                        println!(
                            "{}",
                            serde_json::json!({ "mode": a.mode, "demand": d.to_string(), "cost": null })
                        );
                    } else {
                        println!("no execution meets demand {}", d);
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        other => Err(format!("unknown eval mode `{}`", other)),
    }
}

fn oracle_cmd(a: OracleArgs) -> Result<ExitCode, String> {
    let anf = load(&a.file)?;
    let mode = tick_mode(&a.ticks)?;
    let d = parse_demand(&a.demand)?;
    let which = a.which.as_str();
    if !matches!(which, "need" | "ccv" | "both") {
        return Err(format!("unknown oracle `{}` (expected need, ccv, or both)", which));
    }
    if which != "need" && mode != TickMode::Full {
        return Err(
            "the operational oracle is defined for full ticks; use --ticks=full or --which=need"
                .into(),
        );
    }
    let ir = translate_program(&anf, mode);
    let env = Env::new();
    let inputs = BTreeMap::new();

    let mut report = serde_json::Map::new();
    let mut all_ok = true;
    let mut abstained = false;

    let need = if which != "ccv" {
        match eval_need(&anf, &inputs, &d, mode) {
            Ok(o) => {
                report.insert(
                    "need".into(),
                    serde_json::json!({ "value": o.value.to_string(), "cost": o.cost }),
                );
                Some(o)
            }
            Err(e) => return Err(e.to_string()),
        }
    } else {
        None
    };

    let (min, max) = {
        let mut b1 = Budget::new(a.budget);
        let mut b2 = Budget::new(a.budget);
        let min = min_cost_witness(&ir, &ir.main, &env, &d, &mut b1);
        let max = max_cost_witness(&ir, &ir.main, &env, &d, &mut b2);
        match (min, max) {
            (Ok(min), Ok(max)) => (min, max),
            (Err(EvalError::BudgetExceeded { .. }), _)
            | (_, Err(EvalError::BudgetExceeded { .. })) => {
                abstained = true;
                (None, None)
            }
            (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
        }
    };
    report.insert(
        "clairvoyant".into(),
        serde_json::json!({
            "min": min.as_ref().map(|(c, _)| c),
            "max": max.as_ref().map(|(c, _)| c),
        }),
    );

    if let (Some(need), Some((lo, _)), Some((hi, _))) = (&need, &min, &max) {
        let bracketed = *lo == need.cost && need.cost <= *hi;
        report.insert(
            "bracketing".into(),
            serde_json::json!({
                "min_equals_need": *lo == need.cost,
                "need_below_max": need.cost <= *hi,
                "verdict": if bracketed { "ok" } else { "violated" },
            }),
        );
        all_ok &= bracketed;
    }

    if which != "need" {
        let mut b = Budget::new(a.budget);
        match ccv_outcome_set(&anf, &ir, &inputs, &mut b) {
            Ok(ccv) => {
                let mut b2 = Budget::new(a.budget);
                match enumerate(&ir, &ir.main, &env, &mut b2) {
                    Ok(denot) => {
                        let equal = ccv == denot;
                        report.insert(
                            "ccv".into(),
                            serde_json::json!({
                                "derivations": ccv.len(),
                                "matches_denotational": equal,
                            }),
                        );
                        all_ok &= equal;
                    }
                    Err(EvalError::BudgetExceeded { .. }) => abstained = true,
                    Err(e) => return Err(e.to_string()),
                }
            }
            Err(EvalError::BudgetExceeded { .. }) => abstained = true,
            Err(e) => return Err(e.to_string()),
        }
    }

    let verdict = if abstained {
        "abstain"
    } else if all_ok {
        "ok"
    } else {
        "violated"
    };
    report.insert("verdict".into(), serde_json::json!(verdict));

    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::Value::Object(report))
                .map_err(|e| e.to_string())?
        );
    } else {
        if let Some(n) = &need {
            println!("call-by-need:   cost {:>4}  value {}", n.cost, n.value);
        }
        if let (Some((lo, _)), Some((hi, _))) = (&min, &max) {
            println!("clairvoyant:    min {:>5}  max {:>5}", lo, hi);
        }
        println!("verdict: {}", verdict);
    }
    Ok(ExitCode::from(match verdict {
        "ok" => 0,
        "violated" => 1,
        _ => 2,
    }))
}

/// Pulls the program's value definitions into cost-expression bindings.
fn bindings_from_defs(anf: &AnfProgram) -> Bindings {
    let mut b = Bindings::default();
    for d in &anf.program().defs {
        match d.ty {
            Ty::Nat => {
                if let Ok(PureValue::Nat(n)) = pure::eval_def(anf.program(), &d.name) {
                    b.nats.insert(d.name.clone(), n);
                }
            }
            Ty::List(_) | Ty::Unit => {
                if let Ok(p) = pure::eval_def(anf.program(), &d.name) {
                    b.pures.insert(d.name.clone(), p);
                }
            }
            _ => {}
        }
    }
    b
}

fn parse_value_cond(s: &str, anf: &AnfProgram) -> Result<ValueCond, String> {
    let s = s.trim();
    if s == "any" {
        return Ok(ValueCond::Any);
    }
    if let Some(inner) = s.strip_prefix("meets(").and_then(|s| s.strip_suffix(')')) {
        return Ok(ValueCond::Meets(parse_demand(inner)?));
    }
    let (kind, inner) = if let Some(i) = s.strip_prefix("is_approx(").and_then(|s| s.strip_suffix(')')) {
        ("approx", i)
    } else if let Some(i) = s.strip_prefix("exact(").and_then(|s| s.strip_suffix(')')) {
        ("exact", i)
    } else {
        return Err(format!(
            "unknown value condition `{}` (expected any, is_approx(..), exact(..), meets(..))",
            s
        ));
    };
    // evaluate the pure expression against the program's definitions by
    // splicing it in as a replacement main
    let mut base = anf.program().clone();
    base.main = lazycost_core::syntax::Term::Unit(Default::default());
    let mut text = lazycost_core::syntax::pretty_program(&base);
    let idx = text.rfind("main = ").expect("printed program has a main");
    text.truncate(idx);
    text.push_str("main = ");
    text.push_str(inner);
    text.push('\n');
    let combined = parse(&text).map_err(|e| format!("value expression: {}", e))?;
    let p = pure::eval_program(&combined, &BTreeMap::new())
        .map_err(|e| format!("value expression: {}", e))?;
    Ok(match kind {
        "approx" => ValueCond::IsApprox(p),
        _ => ValueCond::EqualsExact(p),
    })
}

fn check_cmd(a: CheckArgs) -> Result<ExitCode, String> {
    let anf = load(&a.file)?;
    let ir = translate_program(&anf, tick_mode(&a.ticks)?);
    let env = Env::new();
    let bindings = bindings_from_defs(&anf);
    let value = parse_value_cond(&a.value, &anf)?;
    let (lo, hi) = match &a.cost {
        Some(s) => parse_cost_interval(s)?,
        None => (CostExpr::Const(0), CostExpr::Const(u64::MAX)),
    };
    let pred = CostPredicate { value, lo, hi };
    let mut budget = Budget::new(a.budget);
    let report = match a.mode.as_str() {
        "pessimistic" => {
            check_pessimistic(&ir, &ir.main, &env, &pred, &bindings, &a.file, &mut budget)?
        }
        "optimistic" => {
            check_optimistic(&ir, &ir.main, &env, &pred, &bindings, &a.file, &mut budget)?
        }
        other => return Err(format!("unknown check mode `{}`", other)),
    };
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        );
    } else {
        println!("{}", report.line());
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn case_study_cmd(a: CaseStudyArgs) -> Result<ExitCode, String> {
    let grid = match &a.grid {
        Some(g) => g.parse()?,
        None => Grid::default(),
    };
    let studies: Vec<CaseStudy> = if a.name == "all" {
        ALL_CASE_STUDIES.to_vec()
    } else {
        vec![a.name.parse()?]
    };
    let mut all: Vec<SpecReport> = Vec::new();
    for cs in studies {
        let reports = run_case_study(cs, &grid, a.budget)?;
        if !a.json {
            println!("== {}", cs);
            for r in &reports {
                println!("{}", r.line());
            }
            let passed = reports.iter().filter(|r| r.verdict.passed()).count();
            println!("   {}/{} claims hold", passed, reports.len());
        }
        all.extend(reports);
    }
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&all).map_err(|e| e.to_string())?
        );
    }
    Ok(ExitCode::from(exit_code(&all) as u8))
}

fn validate_cmd(a: ValidateArgs) -> Result<ExitCode, String> {
    let rules: Vec<RuleName> = match &a.rule {
        Some(r) => vec![r.parse()?],
        None => ALL_RULES.to_vec(),
    };
    let mut reports = Vec::new();
    let mut ok = true;
    for rule in rules {
        for mode in [RuleMode::Pessimistic, RuleMode::Optimistic] {
            let rep = validate_rule(rule, mode, a.trials, a.seed);
            ok &= rep.failures == 0;
            reports.push(rep);
        }
    }
    // the weakened variant must be refuted
    let weak = weakened_optimistic_conjunction(a.trials, a.seed);
    ok &= weak.failures > 0;

    if a.json {
        let mut v: Vec<serde_json::Value> = reports
            .iter()
            .map(|r| serde_json::to_value(r).unwrap())
            .collect();
        v.push(serde_json::json!({
            "rule": weak.rule,
            "mode": weak.mode,
            "trials": weak.trials,
            "counterexamples": weak.failures,
            "example": weak.first_failure,
        }));
        println!(
            "{}",
            serde_json::to_string_pretty(&v).map_err(|e| e.to_string())?
        );
    } else {
        for r in &reports {
            println!(
                "{:<14} {:<12} trials {:>4}  premises held {:>4}  failures {}",
                r.rule, r.mode, r.trials, r.premise_held, r.failures
            );
        }
        println!(
            "{:<14} {:<12} trials {:>4}  counterexamples {}{}",
            "weakened-conj",
            weak.mode,
            weak.trials,
            weak.failures,
            if weak.failures > 0 { " (as required)" } else { " (MISSING)" }
        );
        if let Some(f) = &weak.first_failure {
            println!("  e.g. {}", f);
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
