//! Semantic checking of pessimistic and optimistic specifications, and
//! validation of the reasoning rules by random semantic testing.
//!
//! A pessimistic specification holds when *every* nondeterministic outcome
//! satisfies the predicate (vacuously when there are no outcomes — such
//! verdicts are flagged, since a program with no successful execution
//! satisfies any pessimistic specification). An optimistic specification
//! holds when *some* outcome satisfies it; the witness is reported and
//! replayable.
//!
//! Predicates are drawn from a decidable fragment: a value condition
//! (approximation of a pure value, exactness, or a demand) and a cost
//! interval whose bounds are arithmetic in the test bindings.

use crate::approx::{exact, is_approx, size_x};
use crate::eval::{enumerate, find_outcome, Budget, EvalError};
use crate::ir::{IrProgram, IrTerm};
use crate::value::{Demand, Env, EvalValue, Outcome, PureValue, TVal};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    True,
    /// True because there were no outcomes at all.
    VacuousTrue,
    False,
    /// The budget ran out before a verdict was reached.
    Abstain,
}

impl Verdict {
    pub fn passed(self) -> bool {
        matches!(self, Verdict::True | Verdict::VacuousTrue)
    }

    /// Process exit code contribution: 0 pass, 1 fail, 2 abstain.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::True | Verdict::VacuousTrue => 0,
            Verdict::False => 1,
            Verdict::Abstain => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRepr {
    pub value: String,
    pub cost: u64,
}

impl From<&Outcome> for OutcomeRepr {
    fn from(o: &Outcome) -> Self {
        OutcomeRepr { value: o.value.to_string(), cost: o.cost }
    }
}

/// One checked specification instance. The JSON schema is documented in
/// `docs/report-schema.md`.
#[derive(Debug, Clone, Serialize)]
pub struct SpecReport {
    pub program: String,
    pub inputs: BTreeMap<String, String>,
    pub mode: String,
    pub predicate: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<OutcomeRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<OutcomeRepr>,
    pub outcomes: u64,
    pub nodes: u64,
    pub budget_exhausted: bool,
}

impl SpecReport {
    pub fn line(&self) -> String {
        let verdict = match self.verdict {
            Verdict::True => "ok",
            Verdict::VacuousTrue => "ok (vacuous)",
            Verdict::False => "FAIL",
            Verdict::Abstain => "abstain (budget)",
        };
        let mut extra = String::new();
        if let Some(w) = &self.witness {
            extra = format!("  witness {} @ {}", w.value, w.cost);
        }
        if let Some(c) = &self.counterexample {
            extra = format!("  counterexample {} @ {}", c.value, c.cost);
        }
        format!(
            "{:<28} {:<12} {:<44} {}{}",
            self.program,
            self.mode,
            self.predicate,
            verdict,
            extra
        )
    }
}

// ---------------------------------------------------------------------------
// The predicate DSL
// ---------------------------------------------------------------------------

/// Value half of a specification.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueCond {
    Any,
    /// The outcome approximates this pure value.
    IsApprox(PureValue),
    /// The outcome is exactly the injection of this pure value.
    EqualsExact(PureValue),
    /// The outcome dominates this demand.
    Meets(Demand),
}

impl ValueCond {
    pub fn holds(&self, v: &EvalValue) -> bool {
        match self {
            ValueCond::Any => true,
            ValueCond::IsApprox(p) => match v {
                EvalValue::Val(a) => is_approx(a, p),
                EvalValue::Thunk(t) => crate::approx::is_approx_tval(t, p),
            },
            ValueCond::EqualsExact(p) => match v {
                EvalValue::Val(a) => *a == exact(p),
                EvalValue::Thunk(_) => false,
            },
            ValueCond::Meets(d) => d.met_by(v),
        }
    }
}

impl fmt::Display for ValueCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueCond::Any => write!(f, "any"),
            ValueCond::IsApprox(p) => write!(f, "is_approx {}", p),
            ValueCond::EqualsExact(p) => write!(f, "= exact {}", p),
            ValueCond::Meets(d) => write!(f, "meets {}", d),
        }
    }
}

/// Cost bound expressions over the test bindings: constants, named
/// naturals, list lengths `|xs|`, approximation sizes `sizeX0(x)` /
/// `sizeX1(x)`, `+`, `*`, and `max`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostExpr {
    Const(u64),
    Var(String),
    Len(String),
    SizeX(u64, String),
    Add(Box<CostExpr>, Box<CostExpr>),
    Mul(Box<CostExpr>, Box<CostExpr>),
    Max(Box<CostExpr>, Box<CostExpr>),
}

impl fmt::Display for CostExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostExpr::Const(n) => write!(f, "{}", n),
            CostExpr::Var(x) => write!(f, "{}", x),
            CostExpr::Len(x) => write!(f, "|{}|", x),
            CostExpr::SizeX(n0, x) => write!(f, "sizeX{}({})", n0, x),
            CostExpr::Add(a, b) => write!(f, "{} + {}", a, b),
            CostExpr::Mul(a, b) => write!(f, "{} * {}", a, b),
            CostExpr::Max(a, b) => write!(f, "max({}, {})", a, b),
        }
    }
}

/// Concrete values the cost expressions refer to.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub nats: BTreeMap<String, u64>,
    pub pures: BTreeMap<String, PureValue>,
    pub approxs: BTreeMap<String, TVal>,
}

impl Bindings {
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        for (k, v) in &self.nats {
            m.insert(k.clone(), v.to_string());
        }
        for (k, v) in &self.pures {
            m.insert(k.clone(), v.to_string());
        }
        for (k, v) in &self.approxs {
            m.insert(k.clone(), v.to_string());
        }
        m
    }
}

impl CostExpr {
    pub fn eval(&self, b: &Bindings) -> Result<u64, String> {
        match self {
            CostExpr::Const(n) => Ok(*n),
            CostExpr::Var(x) => b
                .nats
                .get(x)
                .copied()
                .ok_or_else(|| format!("unbound natural `{}` in cost expression", x)),
            CostExpr::Len(x) => b
                .pures
                .get(x)
                .map(|p| p.len())
                .ok_or_else(|| format!("unbound list `{}` in cost expression", x)),
            CostExpr::SizeX(n0, x) => {
                if let Some(t) = b.approxs.get(x) {
                    Ok(size_x(*n0, t))
                } else if let Some(p) = b.pures.get(x) {
                    Ok(size_x(*n0, &crate::approx::exact_tval(p)))
                } else {
                    Err(format!("unbound approximation `{}` in cost expression", x))
                }
            }
            CostExpr::Add(a, c) => Ok(a.eval(b)? + c.eval(b)?),
            CostExpr::Mul(a, c) => Ok(a.eval(b)? * c.eval(b)?),
            CostExpr::Max(a, c) => Ok(a.eval(b)?.max(c.eval(b)?)),
        }
    }
}

/// Parses `[lo, hi]`.
pub fn parse_cost_interval(s: &str) -> Result<(CostExpr, CostExpr), String> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("cost interval must look like [lo, hi], got `{}`", s))?;
    let mut depth = 0usize;
    let mut split = None;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
    }
    let i = split.ok_or("cost interval needs two comma-separated bounds")?;
    Ok((parse_cost_expr(&inner[..i])?, parse_cost_expr(&inner[i + 1..])?))
}

/// Parses a cost expression: `+` and `*` (with `*` binding tighter),
/// `max(a,b)`, `|name|`, `sizeX0(name)`, `sizeX1(name)`, names, numbers.
pub fn parse_cost_expr(s: &str) -> Result<CostExpr, String> {
    let mut p = ExprParser { src: s, pos: 0 };
    let e = p.sum()?;
    p.ws();
    if p.pos != s.len() {
        return Err(format!("trailing input in cost expression: `{}`", &s[p.pos..]));
    }
    Ok(e)
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &'a str {
        self.ws();
        let start = self.pos;
        while self.src[self.pos..]
            .starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn sum(&mut self) -> Result<CostExpr, String> {
        let mut e = self.product()?;
        while self.eat("+") {
            let rhs = self.product()?;
            e = CostExpr::Add(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<CostExpr, String> {
        let mut e = self.atom()?;
        while self.eat("*") {
            let rhs = self.atom()?;
            e = CostExpr::Mul(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<CostExpr, String> {
        self.ws();
        if self.eat("(") {
            let e = self.sum()?;
            if !self.eat(")") {
                return Err("expected `)`".into());
            }
            return Ok(e);
        }
        if self.eat("|") {
            let name = self.word().to_string();
            if !self.eat("|") {
                return Err("expected closing `|` in length expression".into());
            }
            return Ok(CostExpr::Len(name));
        }
        let w = self.word();
        match w {
            "" => Err(format!("expected a cost expression at `{}`", &self.src[self.pos..])),
            "max" => {
                if !self.eat("(") {
                    return Err("expected `(` after max".into());
                }
                let a = self.sum()?;
                if !self.eat(",") {
                    return Err("expected `,` in max".into());
                }
                let b = self.sum()?;
                if !self.eat(")") {
                    return Err("expected `)` after max".into());
                }
                Ok(CostExpr::Max(Box::new(a), Box::new(b)))
            }
            "sizeX0" | "sizeX1" => {
                let n0 = if w.ends_with('1') { 1 } else { 0 };
                if !self.eat("(") {
                    return Err(format!("expected `(` after {}", w));
                }
                let name = self.word().to_string();
                if !self.eat(")") {
                    return Err(format!("expected `)` after {} argument", w));
                }
                Ok(CostExpr::SizeX(n0, name))
            }
            w if w.chars().all(|c| c.is_ascii_digit()) => {
                w.parse().map(CostExpr::Const).map_err(|_| format!("bad number `{}`", w))
            }
            name => Ok(CostExpr::Var(name.to_string())),
        }
    }
}

/// A declarative specification: value condition plus cost interval.
#[derive(Debug, Clone)]
pub struct CostPredicate {
    pub value: ValueCond,
    pub lo: CostExpr,
    pub hi: CostExpr,
}

impl CostPredicate {
    pub fn any_cost(value: ValueCond) -> CostPredicate {
        CostPredicate {
            value,
            lo: CostExpr::Const(0),
            hi: CostExpr::Const(u64::MAX),
        }
    }

    pub fn resolve(&self, b: &Bindings) -> Result<ResolvedPredicate, String> {
        let lo = self.lo.eval(b)?;
        let hi = self.hi.eval(b)?;
        let text = if hi == u64::MAX {
            format!("value {}", self.value)
        } else {
            format!("value {} ; cost in [{}, {}]", self.value, self.lo, self.hi)
        };
        Ok(ResolvedPredicate { value: self.value.clone(), lo, hi, text })
    }
}

/// A predicate with its cost bounds evaluated against concrete bindings.
#[derive(Debug, Clone)]
pub struct ResolvedPredicate {
    pub value: ValueCond,
    pub lo: u64,
    pub hi: u64,
    pub text: String,
}

impl ResolvedPredicate {
    pub fn holds(&self, o: &Outcome) -> bool {
        self.value.holds(&o.value) && self.lo <= o.cost && o.cost <= self.hi
    }
}

// ---------------------------------------------------------------------------
// Semantic checking
// ---------------------------------------------------------------------------

/// Raw pessimistic check against an arbitrary decidable predicate.
pub struct PessOutcome {
    pub holds: bool,
    pub vacuous: bool,
    pub counterexample: Option<Outcome>,
    pub outcome_count: usize,
}

pub fn pessimistic(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    pred: &dyn Fn(&Outcome) -> bool,
    budget: &mut Budget,
) -> Result<PessOutcome, EvalError> {
    let outcomes = enumerate(prog, t, env, budget)?;
    let vacuous = outcomes.is_empty();
    let counterexample = outcomes.iter().find(|o| !pred(o)).cloned();
    Ok(PessOutcome {
        holds: counterexample.is_none(),
        vacuous,
        counterexample,
        outcome_count: outcomes.len(),
    })
}

/// Raw optimistic check; returns the witness if one exists. The search
/// stops at the first satisfying execution, without full enumeration.
pub fn optimistic(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    pred: &dyn Fn(&Outcome) -> bool,
    budget: &mut Budget,
) -> Result<Option<Outcome>, EvalError> {
    find_outcome(prog, t, env, pred, budget)
}

fn abstain_report(program: &str, mode: &str, predicate: String, b: &Bindings, nodes: u64) -> SpecReport {
    SpecReport {
        program: program.to_string(),
        inputs: b.describe(),
        mode: mode.to_string(),
        predicate,
        verdict: Verdict::Abstain,
        witness: None,
        counterexample: None,
        outcomes: 0,
        nodes,
        budget_exhausted: true,
    }
}

/// Checks that every outcome satisfies the predicate.
pub fn check_pessimistic(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    pred: &CostPredicate,
    bindings: &Bindings,
    program_name: &str,
    budget: &mut Budget,
) -> Result<SpecReport, String> {
    let r = pred.resolve(bindings)?;
    match pessimistic(prog, t, env, &|o| r.holds(o), budget) {
        Err(EvalError::BudgetExceeded { .. }) => Ok(abstain_report(
            program_name,
            "pessimistic",
            r.text.clone(),
            bindings,
            budget.used(),
        )),
        Err(e) => Err(e.to_string()),
        Ok(p) => Ok(SpecReport {
            program: program_name.to_string(),
            inputs: bindings.describe(),
            mode: "pessimistic".to_string(),
            predicate: r.text,
            verdict: if !p.holds {
                Verdict::False
            } else if p.vacuous {
                Verdict::VacuousTrue
            } else {
                Verdict::True
            },
            witness: None,
            counterexample: p.counterexample.as_ref().map(OutcomeRepr::from),
            outcomes: p.outcome_count as u64,
            nodes: budget.used(),
            budget_exhausted: false,
        }),
    }
}

/// Checks that some outcome satisfies the predicate.
pub fn check_optimistic(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    pred: &CostPredicate,
    bindings: &Bindings,
    program_name: &str,
    budget: &mut Budget,
) -> Result<SpecReport, String> {
    let r = pred.resolve(bindings)?;
    match optimistic(prog, t, env, &|o| r.holds(o), budget) {
        Err(EvalError::BudgetExceeded { .. }) => Ok(abstain_report(
            program_name,
            "optimistic",
            r.text.clone(),
            bindings,
            budget.used(),
        )),
        Err(e) => Err(e.to_string()),
        Ok(w) => Ok(SpecReport {
            program: program_name.to_string(),
            inputs: bindings.describe(),
            mode: "optimistic".to_string(),
            predicate: r.text,
            verdict: if w.is_some() { Verdict::True } else { Verdict::False },
            witness: w.as_ref().map(OutcomeRepr::from),
            counterexample: None,
            outcomes: 0,
            nodes: budget.used(),
            budget_exhausted: false,
        }),
    }
}

// ---------------------------------------------------------------------------
// Rule validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleMode {
    Pessimistic,
    Optimistic,
}

impl fmt::Display for RuleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleMode::Pessimistic => write!(f, "pessimistic"),
            RuleMode::Optimistic => write!(f, "optimistic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleName {
    Ret,
    Bind,
    Tick,
    Thunk,
    Forcing,
    Monotonicity,
    Conjunction,
}

pub const ALL_RULES: &[RuleName] = &[
    RuleName::Ret,
    RuleName::Bind,
    RuleName::Tick,
    RuleName::Thunk,
    RuleName::Forcing,
    RuleName::Monotonicity,
    RuleName::Conjunction,
];

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleName::Ret => "ret",
            RuleName::Bind => "bind",
            RuleName::Tick => "tick",
            RuleName::Thunk => "thunk",
            RuleName::Forcing => "forcing",
            RuleName::Monotonicity => "monotonicity",
            RuleName::Conjunction => "conjunction",
        };
        write!(f, "{}", s)
    }
}

impl std::str::FromStr for RuleName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ret" => Ok(RuleName::Ret),
            "bind" => Ok(RuleName::Bind),
            "tick" => Ok(RuleName::Tick),
            "thunk" => Ok(RuleName::Thunk),
            "forcing" => Ok(RuleName::Forcing),
            "monotonicity" => Ok(RuleName::Monotonicity),
            "conjunction" => Ok(RuleName::Conjunction),
            other => Err(format!("unknown rule `{}`", other)),
        }
    }
}

/// Result of validating one reasoning rule semantically over random
/// instances: in every trial whose premises held, the conclusion must
/// hold too.
#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    pub rule: String,
    pub mode: String,
    pub trials: u32,
    pub premise_held: u32,
    pub failures: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// A finite decidable specification relation.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FinitePred {
    set: BTreeSet<(EvalValue, u64)>,
}

impl FinitePred {
    fn holds(&self, o: &Outcome) -> bool {
        self.set.contains(&(o.value.clone(), o.cost))
    }

    fn union(&self, other: &FinitePred) -> FinitePred {
        FinitePred { set: self.set.union(&other.set).cloned().collect() }
    }

    fn intersect(&self, other: &FinitePred) -> FinitePred {
        FinitePred { set: self.set.intersection(&other.set).cloned().collect() }
    }

    fn subset_of(&self, other: &FinitePred) -> bool {
        self.set.is_subset(&other.set)
    }
}

struct RuleCtx {
    gen: crate::gen::Gen,
    prog: IrProgram,
}

impl RuleCtx {
    fn new(seed: u64) -> RuleCtx {
        RuleCtx {
            gen: crate::gen::Gen::new(seed),
            prog: IrProgram::with_defs(vec![]),
        }
    }

    fn outcomes(&mut self, t: &IrTerm, env: &Env) -> BTreeSet<Outcome> {
        enumerate(&self.prog, t, env, &mut Budget::default())
            .expect("generated rule-validation terms stay within budget")
    }

    fn noise(&mut self, k: usize, avoid: &BTreeSet<(EvalValue, u64)>) -> FinitePred {
        let mut set = BTreeSet::new();
        for _ in 0..k {
            let v = if self.gen.coin(0.7) {
                EvalValue::Val(self.gen.avalue(2))
            } else {
                EvalValue::Thunk(self.gen.tval(2))
            };
            let c = self.gen.nat(6);
            if !avoid.contains(&(v.clone(), c)) {
                set.insert((v, c));
            }
        }
        FinitePred { set }
    }

    fn of_outcomes(outs: &BTreeSet<Outcome>) -> FinitePred {
        FinitePred {
            set: outs.iter().map(|o| (o.value.clone(), o.cost)).collect(),
        }
    }

    fn pess(&mut self, t: &IrTerm, env: &Env, r: &FinitePred) -> bool {
        self.outcomes(t, env).iter().all(|o| r.holds(o))
    }

    fn opt(&mut self, t: &IrTerm, env: &Env, r: &FinitePred) -> bool {
        self.outcomes(t, env).iter().any(|o| r.holds(o))
    }

    fn check(&mut self, mode: RuleMode, t: &IrTerm, env: &Env, r: &FinitePred) -> bool {
        match mode {
            RuleMode::Pessimistic => self.pess(t, env, r),
            RuleMode::Optimistic => self.opt(t, env, r),
        }
    }
}

/// Validates one rule: generates random instances, evaluates the premises
/// semantically by enumeration, and requires the conclusion wherever the
/// premises held.
pub fn validate_rule(rule: RuleName, mode: RuleMode, trials: u32, seed: u64) -> RuleReport {
    let mut ctx = RuleCtx::new(seed ^ hash_rule(rule, mode));
    let mut premise_held = 0;
    let mut failures = 0;
    let mut first_failure = None;

    for trial in 0..trials {
        let instance = run_trial(&mut ctx, rule, mode);
        if let Some(premises_ok) = instance.premises_ok {
            if premises_ok {
                premise_held += 1;
                if !instance.conclusion_ok {
                    failures += 1;
                    if first_failure.is_none() {
                        first_failure = Some(format!("trial {}: {}", trial, instance.desc));
                    }
                }
            }
        }
    }

    RuleReport {
        rule: rule.to_string(),
        mode: mode.to_string(),
        trials,
        premise_held,
        failures,
        first_failure,
    }
}

fn hash_rule(rule: RuleName, mode: RuleMode) -> u64 {
    let r = match rule {
        RuleName::Ret => 1,
        RuleName::Bind => 2,
        RuleName::Tick => 3,
        RuleName::Thunk => 4,
        RuleName::Forcing => 5,
        RuleName::Monotonicity => 6,
        RuleName::Conjunction => 7,
    };
    let m = match mode {
        RuleMode::Pessimistic => 0x100,
        RuleMode::Optimistic => 0x200,
    };
    r | m
}

struct TrialResult {
    /// None: the instance could not establish its premises (skipped).
    premises_ok: Option<bool>,
    conclusion_ok: bool,
    desc: String,
}

fn run_trial(ctx: &mut RuleCtx, rule: RuleName, mode: RuleMode) -> TrialResult {
    match rule {
        RuleName::Ret => {
            // r x 0  ==>  (ret x) { r }
            let x = ctx.gen.avalue(2);
            let mut env = Env::new();
            env.insert("rv".to_string(), TVal::thunk(x.clone()));
            let t = IrTerm::ret_var("rv");
            let outs = ctx.outcomes(&t, &env);
            let base = RuleCtx::of_outcomes(&outs);
            let noise = ctx.noise(4, &BTreeSet::new());
            let r = base.union(&noise);
            let premises = r.set.contains(&(EvalValue::Val(x), 0));
            let conclusion = ctx.check(mode, &t, &env, &r);
            TrialResult {
                premises_ok: Some(premises),
                conclusion_ok: conclusion,
                desc: "ret".to_string(),
            }
        }
        RuleName::Tick => {
            let noise = ctx.noise(4, &BTreeSet::new());
            let mut set = noise.set.clone();
            set.insert((EvalValue::Val(crate::value::AValue::Unit), 1));
            let r = FinitePred { set };
            let premises = r.set.contains(&(EvalValue::Val(crate::value::AValue::Unit), 1));
            let conclusion = ctx.check(mode, &IrTerm::Tick, &Env::new(), &r);
            TrialResult {
                premises_ok: Some(premises),
                conclusion_ok: conclusion,
                desc: "tick".to_string(),
            }
        }
        RuleName::Bind => validate_bind(ctx, mode),
        RuleName::Thunk => validate_thunk(ctx, mode),
        RuleName::Forcing => validate_forcing(ctx, mode),
        RuleName::Monotonicity => {
            let (u, env) = ctx.gen.comp(3);
            let outs = ctx.outcomes(&u, &env);
            let base = RuleCtx::of_outcomes(&outs);
            let r = base.union(&ctx.noise(3, &BTreeSet::new()));
            let r_wide = r.union(&ctx.noise(3, &BTreeSet::new()));
            // premises: u {r} (or [r]) and r => r'
            let prem1 = ctx.check(mode, &u, &env, &r);
            let prem2 = r.subset_of(&r_wide);
            let conclusion = ctx.check(mode, &u, &env, &r_wide);
            TrialResult {
                premises_ok: Some(prem1 && prem2),
                conclusion_ok: conclusion,
                desc: format!("monotonicity on {:?}", u),
            }
        }
        RuleName::Conjunction => validate_conjunction(ctx, mode),
    }
}

fn validate_bind(ctx: &mut RuleCtx, mode: RuleMode) -> TrialResult {
    let (u, mut env) = ctx.gen.comp(2);
    let (k, kenv) = ctx.gen.comp(2);
    // merge the two environments; k additionally sees the binder
    for (key, v) in kenv {
        env.entry(format!("k{}", key)).or_insert(v);
    }
    let k = rename_free(&k, "v", "kv");
    let binder = "bx".to_string();
    let bound = IrTerm::bind(u.clone(), binder.clone(), k.clone());

    let u_outs = ctx.outcomes(&u, &env);
    // construct r as the exact set of composite outcomes, plus noise
    let mut set = BTreeSet::new();
    for o1 in &u_outs {
        let mut env2 = env.clone();
        let tv = match &o1.value {
            EvalValue::Val(v) => TVal::thunk(v.clone()),
            EvalValue::Thunk(t) => t.clone(),
        };
        env2.insert(binder.clone(), tv);
        for o2 in ctx.outcomes(&k, &env2) {
            set.insert((o2.value.clone(), o1.cost + o2.cost));
        }
    }
    let r = FinitePred { set }.union(&ctx.noise(3, &BTreeSet::new()));

    // premises, checked semantically
    let premises = match mode {
        RuleMode::Pessimistic => u_outs.iter().all(|o1| {
            let mut env2 = env.clone();
            let tv = match &o1.value {
                EvalValue::Val(v) => TVal::thunk(v.clone()),
                EvalValue::Thunk(t) => t.clone(),
            };
            env2.insert(binder.clone(), tv);
            ctx.outcomes(&k, &env2)
                .iter()
                .all(|o2| r.holds(&Outcome::new(o2.value.clone(), o1.cost + o2.cost)))
        }),
        RuleMode::Optimistic => u_outs.iter().any(|o1| {
            let mut env2 = env.clone();
            let tv = match &o1.value {
                EvalValue::Val(v) => TVal::thunk(v.clone()),
                EvalValue::Thunk(t) => t.clone(),
            };
            env2.insert(binder.clone(), tv);
            ctx.outcomes(&k, &env2)
                .iter()
                .any(|o2| r.holds(&Outcome::new(o2.value.clone(), o1.cost + o2.cost)))
        }),
    };
    let conclusion = ctx.check(mode, &bound, &env, &r);
    TrialResult {
        premises_ok: Some(premises),
        conclusion_ok: conclusion,
        desc: format!("bind of {:?}", u),
    }
}

fn validate_thunk(ctx: &mut RuleCtx, mode: RuleMode) -> TrialResult {
    let (u, env) = ctx.gen.comp(2);
    let t = IrTerm::thunk_of(u.clone());
    let u_outs = ctx.outcomes(&u, &env);
    match mode {
        RuleMode::Pessimistic => {
            // premises: r Undefined 0  and  u {fun x => r (Thunk x)}
            let mut set: BTreeSet<(EvalValue, u64)> = BTreeSet::new();
            set.insert((EvalValue::Thunk(TVal::Undefined), 0));
            for o in &u_outs {
                if let EvalValue::Val(v) = &o.value {
                    set.insert((EvalValue::Thunk(TVal::thunk(v.clone())), o.cost));
                }
            }
            let r = FinitePred { set }.union(&ctx.noise(3, &BTreeSet::new()));
            let prem1 = r.set.contains(&(EvalValue::Thunk(TVal::Undefined), 0));
            let prem2 = u_outs.iter().all(|o| match &o.value {
                EvalValue::Val(v) => r.holds(&Outcome::new(
                    EvalValue::Thunk(TVal::thunk(v.clone())),
                    o.cost,
                )),
                EvalValue::Thunk(_) => false,
            });
            let conclusion = ctx.pess(&t, &env, &r);
            TrialResult {
                premises_ok: Some(prem1 && prem2),
                conclusion_ok: conclusion,
                desc: format!("thunk (pessimistic) of {:?}", u),
            }
        }
        RuleMode::Optimistic => {
            // either disjunct suffices
            let use_left = ctx.gen.coin(0.5) || u_outs.is_empty();
            let (r, premises) = if use_left {
                let mut set = BTreeSet::new();
                set.insert((EvalValue::Thunk(TVal::Undefined), 0));
                let r = FinitePred { set }.union(&ctx.noise(3, &BTreeSet::new()));
                (r, true)
            } else {
                let pick = u_outs.iter().next().unwrap().clone();
                let mut set = BTreeSet::new();
                if let EvalValue::Val(v) = &pick.value {
                    set.insert((EvalValue::Thunk(TVal::thunk(v.clone())), pick.cost));
                }
                let r = FinitePred { set }.union(&ctx.noise(3, &BTreeSet::new()));
                let prem = u_outs.iter().any(|o| match &o.value {
                    EvalValue::Val(v) => r.holds(&Outcome::new(
                        EvalValue::Thunk(TVal::thunk(v.clone())),
                        o.cost,
                    )),
                    EvalValue::Thunk(_) => false,
                });
                (r, prem)
            };
            let conclusion = ctx.opt(&t, &env, &r);
            TrialResult {
                premises_ok: Some(premises),
                conclusion_ok: conclusion,
                desc: format!("thunk (optimistic) of {:?}", u),
            }
        }
    }
}

fn validate_forcing(ctx: &mut RuleCtx, mode: RuleMode) -> TrialResult {
    let (k, mut env) = ctx.gen.comp(2);
    let tv = match mode {
        // the optimistic premise requires a defined thunk
        RuleMode::Optimistic => TVal::thunk(ctx.gen.avalue(2)),
        RuleMode::Pessimistic => ctx.gen.tval(2),
    };
    env.insert("s".to_string(), tv.clone());
    let binder = "fy".to_string();
    let term = IrTerm::forcing("s", binder.clone(), k.clone());

    let (r, premises) = match &tv {
        TVal::Undefined => {
            // pessimistic premise is vacuously true
            (ctx.noise(4, &BTreeSet::new()), matches!(mode, RuleMode::Pessimistic))
        }
        TVal::Thunk(x) => {
            let mut env2 = env.clone();
            env2.insert(binder.clone(), TVal::Thunk(x.clone()));
            let outs = ctx.outcomes(&k, &env2);
            let base = RuleCtx::of_outcomes(&outs);
            let r = base.union(&ctx.noise(3, &BTreeSet::new()));
            let prem = match mode {
                RuleMode::Pessimistic => outs.iter().all(|o| r.holds(o)),
                RuleMode::Optimistic => outs.iter().any(|o| r.holds(o)),
            };
            (r, prem)
        }
    };
    let conclusion = ctx.check(mode, &term, &env, &r);
    TrialResult {
        premises_ok: Some(premises),
        conclusion_ok: conclusion,
        desc: format!("forcing {:?}", tv),
    }
}

fn validate_conjunction(ctx: &mut RuleCtx, mode: RuleMode) -> TrialResult {
    let (u, env) = ctx.gen.comp(3);
    let outs = ctx.outcomes(&u, &env);
    let base = RuleCtx::of_outcomes(&outs);
    match mode {
        RuleMode::Pessimistic => {
            let r = base.union(&ctx.noise(3, &BTreeSet::new()));
            let r2 = base.union(&ctx.noise(3, &BTreeSet::new()));
            let prem = ctx.pess(&u, &env, &r) && ctx.pess(&u, &env, &r2);
            let conclusion = ctx.pess(&u, &env, &r.intersect(&r2));
            TrialResult {
                premises_ok: Some(prem),
                conclusion_ok: conclusion,
                desc: format!("conjunction (pessimistic) on {:?}", u),
            }
        }
        RuleMode::Optimistic => {
            // one pessimistic premise, one optimistic premise
            if outs.is_empty() {
                return TrialResult {
                    premises_ok: None,
                    conclusion_ok: true,
                    desc: String::new(),
                };
            }
            let r = base.union(&ctx.noise(3, &BTreeSet::new()));
            let pick = outs.iter().next().unwrap().clone();
            let mut set = BTreeSet::new();
            set.insert((pick.value.clone(), pick.cost));
            let avoid = base.set.clone();
            let r2 = FinitePred { set }.union(&ctx.noise(3, &avoid));
            let prem = ctx.pess(&u, &env, &r) && ctx.opt(&u, &env, &r2);
            let conclusion = ctx.opt(&u, &env, &r.intersect(&r2));
            TrialResult {
                premises_ok: Some(prem),
                conclusion_ok: conclusion,
                desc: format!("conjunction (optimistic) on {:?}", u),
            }
        }
    }
}

/// The deliberately weakened optimistic conjunction: both premises merely
/// optimistic. The harness searches for (and must find) a counterexample:
/// an instance where both premises hold but the conclusion fails.
pub fn weakened_optimistic_conjunction(trials: u32, seed: u64) -> RuleReport {
    let mut ctx = RuleCtx::new(seed ^ 0xC0FFEE);
    let mut premise_held = 0;
    let mut failures = 0;
    let mut first_failure = None;
    for trial in 0..trials {
        let (u, env) = ctx.gen.comp(3);
        let outs = ctx.outcomes(&u, &env);
        if outs.len() < 2 {
            continue;
        }
        let mut it = outs.iter();
        let o1 = it.next().unwrap().clone();
        let o2 = it.next_back().unwrap().clone();
        let avoid: BTreeSet<(EvalValue, u64)> =
            outs.iter().map(|o| (o.value.clone(), o.cost)).collect();
        let mut s1 = BTreeSet::new();
        s1.insert((o1.value.clone(), o1.cost));
        let r1 = FinitePred { set: s1 }.union(&ctx.noise(3, &avoid));
        let mut s2 = BTreeSet::new();
        s2.insert((o2.value.clone(), o2.cost));
        let r2 = FinitePred { set: s2 }.union(&ctx.noise(3, &avoid));
        let prem = ctx.opt(&u, &env, &r1) && ctx.opt(&u, &env, &r2);
        if prem {
            premise_held += 1;
            if !ctx.opt(&u, &env, &r1.intersect(&r2)) {
                failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(format!(
                        "trial {}: witnesses {} and {} satisfy the separate specs, none their conjunction",
                        trial, o1, o2
                    ));
                }
            }
        }
    }
    RuleReport {
        rule: "conjunction (weakened: both premises optimistic)".to_string(),
        mode: "optimistic".to_string(),
        trials,
        premise_held,
        failures,
        first_failure,
    }
}

fn rename_free(t: &IrTerm, from_prefix: &str, to_prefix: &str) -> IrTerm {
    // generated environments use v0..v2; keep the bind instance's own
    // variables distinct from the outer computation's
    let mut out = t.clone();
    for i in 0..4 {
        let from = format!("{}{}", from_prefix, i);
        let to = format!("{}{}", to_prefix, i);
        out = subst_free(&out, &from, &to);
    }
    out
}

fn subst_free(t: &IrTerm, from: &str, to: &str) -> IrTerm {
    // piggyback on the translator's capture-avoiding renaming
    crate::translate::rename_free_var(t, from, to)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_expr_parsing_and_eval() {
        let (lo, hi) = parse_cost_interval("[1, sizeX1(xs)]").unwrap();
        assert_eq!(lo, CostExpr::Const(1));
        let mut b = Bindings::default();
        b.pures.insert("xs".to_string(), PureValue::list(&[1, 2, 3]));
        assert_eq!(hi.eval(&b).unwrap(), 4);
        let e = parse_cost_expr("2 * n + max(1, |xs|)").unwrap();
        b.nats.insert("n".to_string(), 5);
        assert_eq!(e.eval(&b).unwrap(), 13);
    }

    #[test]
    fn pessimistic_cost_zero_on_tick_fails_with_counterexample() {
        let prog = IrProgram::with_defs(vec![]);
        let pred = CostPredicate {
            value: ValueCond::Any,
            lo: CostExpr::Const(0),
            hi: CostExpr::Const(0),
        };
        let rep = check_pessimistic(
            &prog,
            &IrTerm::Tick,
            &Env::new(),
            &pred,
            &Bindings::default(),
            "tick",
            &mut Budget::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::False);
        let ce = rep.counterexample.unwrap();
        assert_eq!(ce.cost, 1);
    }

    #[test]
    fn unsatisfiable_optimistic_spec_is_false() {
        let prog = IrProgram::with_defs(vec![]);
        let pred = CostPredicate {
            value: ValueCond::EqualsExact(PureValue::list(&[1])),
            lo: CostExpr::Const(0),
            hi: CostExpr::Const(0),
        };
        let rep = check_optimistic(
            &prog,
            &IrTerm::Tick,
            &Env::new(),
            &pred,
            &Bindings::default(),
            "tick",
            &mut Budget::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::False);
    }

    #[test]
    fn vacuous_pessimistic_verdict_is_flagged() {
        // forcing an undefined thunk: no outcomes at all
        let prog = IrProgram::with_defs(vec![]);
        let mut env = Env::new();
        env.insert("s".to_string(), TVal::Undefined);
        let t = IrTerm::force_var("s");
        let rep = check_pessimistic(
            &prog,
            &t,
            &env,
            &CostPredicate::any_cost(ValueCond::Any),
            &Bindings::default(),
            "stuck",
            &mut Budget::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::VacuousTrue);
    }

    #[test]
    fn smoke_rule_validation() {
        for &rule in ALL_RULES {
            for mode in [RuleMode::Pessimistic, RuleMode::Optimistic] {
                let rep = validate_rule(rule, mode, 50, 42);
                assert_eq!(rep.failures, 0, "{} {}: {:?}", rule, mode, rep.first_failure);
                assert!(rep.premise_held > 0, "{} {} never held premises", rule, mode);
            }
        }
    }

    #[test]
    fn weakened_conjunction_has_counterexamples() {
        let rep = weakened_optimistic_conjunction(200, 7);
        assert!(rep.failures > 0, "expected counterexamples to the weakened rule");
    }
}
