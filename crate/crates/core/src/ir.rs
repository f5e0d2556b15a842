//! The cost-instrumented intermediate form.
//!
//! An `IrTerm` denotes a computation in the clairvoyance monad: a finite
//! set of (value, cost) pairs. `Ret`, `Bind`, `Tick`, `ThunkOf` and
//! `Forcing` are the monad's five combinators; `Foldr` is the built-in
//! structural recursion over lists (one tick per unfolding, recursive
//! result thunked); the remaining nodes construct and consume values.
//! `CaseList` appears only in the hand-written corpus programs, never in
//! translator output.
//!
//! The JSON form (one object per node, tagged `"node"`) is documented in
//! `docs/ir.md`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Immediate values under `Ret`. `Var` returns the value held by a bound
/// thunk and fails (empty outcome set) if the thunk is undefined; it is
/// the forcing continuation's way of returning what was forced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum IrValue {
    Unit,
    Nat(u64),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum IrTerm {
    /// Yields a value at cost 0.
    Ret { value: IrValue },
    /// Sequencing; costs add.
    Bind {
        first: Box<IrTerm>,
        binder: String,
        rest: Box<IrTerm>,
    },
    /// Unit cost.
    Tick,
    /// Either runs the body (yielding `Thunk v` at the body's cost) or
    /// skips it (yielding `Undefined` at no cost).
    ThunkOf { body: Box<IrTerm> },
    /// Forces a thunk variable; the computation fails if it is undefined.
    Forcing {
        thunk_var: String,
        binder: String,
        rest: Box<IrTerm>,
    },
    /// Applies a bound closure to a bound thunk.
    CallLam { fn_var: String, arg_var: String },
    MkLam { param: String, body: Box<IrTerm> },
    MkNil,
    MkCons { head_var: String, tail_var: String },
    /// Structural fold over a list thunk: forces the scrutinee, ticks once
    /// per unfolding (when `costed`), and thunks each recursive result.
    Foldr {
        nil_case: Box<IrTerm>,
        head_param: String,
        acc_param: String,
        cons_case: Box<IrTerm>,
        scrut_var: String,
        costed: bool,
    },
    /// List case analysis on a thunk variable (corpus programs only).
    CaseList {
        scrut_var: String,
        nil_branch: Box<IrTerm>,
        head_param: String,
        tail_param: String,
        cons_branch: Box<IrTerm>,
    },
    /// Case analysis on an (unlifted) natural; charges no tick.
    NatCase {
        scrut_var: String,
        zero_branch: Box<IrTerm>,
        pred_name: String,
        succ_branch: Box<IrTerm>,
    },
    /// Calls a top-level definition with thunk arguments; the callee's
    /// body carries its own ticks.
    DefCall { name: String, arg_vars: Vec<String> },
}

impl IrTerm {
    pub fn ret_unit() -> IrTerm {
        IrTerm::Ret { value: IrValue::Unit }
    }

    pub fn ret_nat(n: u64) -> IrTerm {
        IrTerm::Ret { value: IrValue::Nat(n) }
    }

    pub fn ret_var(x: impl Into<String>) -> IrTerm {
        IrTerm::Ret { value: IrValue::Var(x.into()) }
    }

    pub fn bind(first: IrTerm, binder: impl Into<String>, rest: IrTerm) -> IrTerm {
        IrTerm::Bind {
            first: Box::new(first),
            binder: binder.into(),
            rest: Box::new(rest),
        }
    }

    /// `tick >> rest`.
    pub fn tick_then(rest: IrTerm) -> IrTerm {
        IrTerm::bind(IrTerm::Tick, WILD, rest)
    }

    pub fn thunk_of(body: IrTerm) -> IrTerm {
        IrTerm::ThunkOf { body: Box::new(body) }
    }

    /// `let~ binder := body in rest`.
    pub fn let_thunk(binder: impl Into<String>, body: IrTerm, rest: IrTerm) -> IrTerm {
        IrTerm::bind(IrTerm::thunk_of(body), binder, rest)
    }

    pub fn forcing(thunk_var: impl Into<String>, binder: impl Into<String>, rest: IrTerm) -> IrTerm {
        IrTerm::Forcing {
            thunk_var: thunk_var.into(),
            binder: binder.into(),
            rest: Box::new(rest),
        }
    }

    /// `force x`: forcing with a returning continuation.
    pub fn force_var(x: &str) -> IrTerm {
        IrTerm::forcing(x, FORCE_BINDER, IrTerm::ret_var(FORCE_BINDER))
    }

    pub fn mk_cons(head: impl Into<String>, tail: impl Into<String>) -> IrTerm {
        IrTerm::MkCons { head_var: head.into(), tail_var: tail.into() }
    }

    pub fn mk_lam(param: impl Into<String>, body: IrTerm) -> IrTerm {
        IrTerm::MkLam { param: param.into(), body: Box::new(body) }
    }

    pub fn def_call(name: impl Into<String>, args: &[&str]) -> IrTerm {
        IrTerm::DefCall {
            name: name.into(),
            arg_vars: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn case_list(
        scrut: impl Into<String>,
        nil_branch: IrTerm,
        head: impl Into<String>,
        tail: impl Into<String>,
        cons_branch: IrTerm,
    ) -> IrTerm {
        IrTerm::CaseList {
            scrut_var: scrut.into(),
            nil_branch: Box::new(nil_branch),
            head_param: head.into(),
            tail_param: tail.into(),
            cons_branch: Box::new(cons_branch),
        }
    }

    pub fn nat_case(
        scrut: impl Into<String>,
        zero_branch: IrTerm,
        pred: impl Into<String>,
        succ_branch: IrTerm,
    ) -> IrTerm {
        IrTerm::NatCase {
            scrut_var: scrut.into(),
            zero_branch: Box::new(zero_branch),
            pred_name: pred.into(),
            succ_branch: Box::new(succ_branch),
        }
    }

    /// Free term variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let var = |x: &str, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.to_string());
            }
        };
        match self {
            IrTerm::Ret { value } => {
                if let IrValue::Var(x) = value {
                    var(x, bound, out);
                }
            }
            IrTerm::Tick | IrTerm::MkNil => {}
            IrTerm::Bind { first, binder, rest } => {
                first.collect_free(bound, out);
                bound.push(binder.clone());
                rest.collect_free(bound, out);
                bound.pop();
            }
            IrTerm::ThunkOf { body } => body.collect_free(bound, out),
            IrTerm::Forcing { thunk_var, binder, rest } => {
                var(thunk_var, bound, out);
                bound.push(binder.clone());
                rest.collect_free(bound, out);
                bound.pop();
            }
            IrTerm::CallLam { fn_var, arg_var } => {
                var(fn_var, bound, out);
                var(arg_var, bound, out);
            }
            IrTerm::MkLam { param, body } => {
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            IrTerm::MkCons { head_var, tail_var } => {
                var(head_var, bound, out);
                var(tail_var, bound, out);
            }
            IrTerm::Foldr {
                nil_case,
                head_param,
                acc_param,
                cons_case,
                scrut_var,
                ..
            } => {
                var(scrut_var, bound, out);
                nil_case.collect_free(bound, out);
                bound.push(head_param.clone());
                bound.push(acc_param.clone());
                cons_case.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            IrTerm::CaseList {
                scrut_var,
                nil_branch,
                head_param,
                tail_param,
                cons_branch,
            } => {
                var(scrut_var, bound, out);
                nil_branch.collect_free(bound, out);
                bound.push(head_param.clone());
                bound.push(tail_param.clone());
                cons_branch.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            IrTerm::NatCase {
                scrut_var,
                zero_branch,
                pred_name,
                succ_branch,
            } => {
                var(scrut_var, bound, out);
                zero_branch.collect_free(bound, out);
                bound.push(pred_name.clone());
                succ_branch.collect_free(bound, out);
                bound.pop();
            }
            IrTerm::DefCall { arg_vars, .. } => {
                for a in arg_vars {
                    var(a, bound, out);
                }
            }
        }
    }

    /// True if a `CaseList` node occurs anywhere.
    pub fn contains_case_list(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t| {
            if matches!(t, IrTerm::CaseList { .. }) {
                found = true;
            }
        });
        found
    }

    /// True if a `Tick` node occurs anywhere, or a costed fold.
    pub fn has_cost(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t| match t {
            IrTerm::Tick => found = true,
            IrTerm::Foldr { costed: true, .. } => found = true,
            _ => {}
        });
        found
    }

    /// Preorder traversal of all subterms.
    pub fn walk(&self, f: &mut impl FnMut(&IrTerm)) {
        f(self);
        match self {
            IrTerm::Ret { .. }
            | IrTerm::Tick
            | IrTerm::MkNil
            | IrTerm::MkCons { .. }
            | IrTerm::CallLam { .. }
            | IrTerm::DefCall { .. } => {}
            IrTerm::Bind { first, rest, .. } => {
                first.walk(f);
                rest.walk(f);
            }
            IrTerm::ThunkOf { body } => body.walk(f),
            IrTerm::Forcing { rest, .. } => rest.walk(f),
            IrTerm::MkLam { body, .. } => body.walk(f),
            IrTerm::Foldr { nil_case, cons_case, .. } => {
                nil_case.walk(f);
                cons_case.walk(f);
            }
            IrTerm::CaseList { nil_branch, cons_branch, .. } => {
                nil_branch.walk(f);
                cons_branch.walk(f);
            }
            IrTerm::NatCase { zero_branch, succ_branch, .. } => {
                zero_branch.walk(f);
                succ_branch.walk(f);
            }
        }
    }
}

/// Binder for discarded results (`t >> s`).
pub const WILD: &str = "%_";
const FORCE_BINDER: &str = "%v";

/// Parameter name used when a definition reference is eta-expanded; shared
/// between the translator and the operational oracle's read-back so both
/// sides build identical closures.
pub fn eta_param(def: &str, i: usize) -> String {
    format!("%{}.{}", def, i)
}

/// The curried value form of an arity-`n` definition:
/// `ret (fun a0 => ret (fun a1 => ... defcall f [a0..an-1]))`, minus the
/// outermost `ret` (the caller decides whether the value is wrapped).
pub fn eta_expand_def(name: &str, arity: usize) -> IrTerm {
    assert!(arity > 0, "eta expansion needs at least one parameter");
    let params: Vec<String> = (0..arity).map(|i| eta_param(name, i)).collect();
    let call = IrTerm::DefCall {
        name: name.to_string(),
        arg_vars: params.clone(),
    };
    let mut body = call;
    for p in params.iter().skip(1).rev() {
        body = IrTerm::mk_lam(p.clone(), body);
    }
    IrTerm::mk_lam(params[0].clone(), body)
}

/// Translated types: `T` marks thunked positions, `M` computations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thunked(pub ApproxTy);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comp(pub ApproxTy);

/// Approximation types. List fields are implicitly thunked (the list
/// approximation type wraps both constructor fields in `T`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxTy {
    UnitA,
    NatA,
    ListA(Box<ApproxTy>),
    ArrowA(Box<Thunked>, Box<Comp>),
}

impl fmt::Display for ApproxTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxTy::UnitA => write!(f, "unit"),
            ApproxTy::NatA => write!(f, "nat"),
            ApproxTy::ListA(e) => match **e {
                ApproxTy::UnitA | ApproxTy::NatA => write!(f, "listA {}", e),
                _ => write!(f, "listA ({})", e),
            },
            ApproxTy::ArrowA(dom, cod) => {
                let Thunked(d) = &**dom;
                let Comp(c) = &**cod;
                match d {
                    ApproxTy::UnitA | ApproxTy::NatA => write!(f, "T {} -> M ({})", d, c),
                    _ => write!(f, "T ({}) -> M ({})", d, c),
                }
            }
        }
    }
}

/// A lowered top-level definition: parameters bind thunks, the body is a
/// computation (top-level functions drop the outer `M`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: IrTerm,
    pub ty: ApproxTy,
    pub nocost: bool,
}

/// A lowered program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrProgram {
    pub defs: Vec<IrDef>,
    pub main: IrTerm,
    /// Longest tick chain collapsed by simplification (1 if untouched).
    pub collapse_factor: u32,
}

impl IrProgram {
    pub fn def(&self, name: &str) -> Option<&IrDef> {
        self.defs.iter().find(|d| d.name == name)
    }

    /// An empty program shell for hand-built terms.
    pub fn with_defs(defs: Vec<IrDef>) -> IrProgram {
        IrProgram { defs, main: IrTerm::ret_unit(), collapse_factor: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ill-scoped IR: {0}")]
pub struct ScopeError(pub String);

/// Checks that every variable reference is bound by an enclosing binder or
/// the given environment, and that definition calls resolve with the right
/// arity.
pub fn check_scope(p: &IrProgram, t: &IrTerm, env_vars: &BTreeSet<String>) -> Result<(), ScopeError> {
    fn go(
        p: &IrProgram,
        t: &IrTerm,
        scope: &mut Vec<String>,
        env: &BTreeSet<String>,
    ) -> Result<(), ScopeError> {
        let check_var = |x: &str, scope: &Vec<String>| -> Result<(), ScopeError> {
            if scope.iter().any(|s| s == x) || env.contains(x) {
                Ok(())
            } else {
                Err(ScopeError(format!("unbound variable `{}`", x)))
            }
        };
        match t {
            IrTerm::Ret { value } => {
                if let IrValue::Var(x) = value {
                    check_var(x, scope)?;
                }
                Ok(())
            }
            IrTerm::Tick | IrTerm::MkNil => Ok(()),
            IrTerm::Bind { first, binder, rest } => {
                go(p, first, scope, env)?;
                scope.push(binder.clone());
                let r = go(p, rest, scope, env);
                scope.pop();
                r
            }
            IrTerm::ThunkOf { body } => go(p, body, scope, env),
            IrTerm::Forcing { thunk_var, binder, rest } => {
                check_var(thunk_var, scope)?;
                scope.push(binder.clone());
                let r = go(p, rest, scope, env);
                scope.pop();
                r
            }
            IrTerm::CallLam { fn_var, arg_var } => {
                check_var(fn_var, scope)?;
                check_var(arg_var, scope)
            }
            IrTerm::MkLam { param, body } => {
                scope.push(param.clone());
                let r = go(p, body, scope, env);
                scope.pop();
                r
            }
            IrTerm::MkCons { head_var, tail_var } => {
                check_var(head_var, scope)?;
                check_var(tail_var, scope)
            }
            IrTerm::Foldr {
                nil_case,
                head_param,
                acc_param,
                cons_case,
                scrut_var,
                ..
            } => {
                check_var(scrut_var, scope)?;
                go(p, nil_case, scope, env)?;
                scope.push(head_param.clone());
                scope.push(acc_param.clone());
                let r = go(p, cons_case, scope, env);
                scope.pop();
                scope.pop();
                r
            }
            IrTerm::CaseList {
                scrut_var,
                nil_branch,
                head_param,
                tail_param,
                cons_branch,
            } => {
                check_var(scrut_var, scope)?;
                go(p, nil_branch, scope, env)?;
                scope.push(head_param.clone());
                scope.push(tail_param.clone());
                let r = go(p, cons_branch, scope, env);
                scope.pop();
                scope.pop();
                r
            }
            IrTerm::NatCase {
                scrut_var,
                zero_branch,
                pred_name,
                succ_branch,
            } => {
                check_var(scrut_var, scope)?;
                go(p, zero_branch, scope, env)?;
                scope.push(pred_name.clone());
                let r = go(p, succ_branch, scope, env);
                scope.pop();
                r
            }
            IrTerm::DefCall { name, arg_vars } => {
                let def = p
                    .def(name)
                    .ok_or_else(|| ScopeError(format!("unknown definition `{}`", name)))?;
                if def.params.len() != arg_vars.len() {
                    return Err(ScopeError(format!(
                        "definition `{}` called with {} arguments, expects {}",
                        name,
                        arg_vars.len(),
                        def.params.len()
                    )));
                }
                for a in arg_vars {
                    check_var(a, scope)?;
                }
                Ok(())
            }
        }
    }
    go(p, t, &mut Vec::new(), env_vars)
}

/// Checks scope for every definition body and the main term.
pub fn check_program_scope(p: &IrProgram, env_vars: &BTreeSet<String>) -> Result<(), ScopeError> {
    for d in &p.defs {
        let mut env = BTreeSet::new();
        for param in &d.params {
            env.insert(param.clone());
        }
        check_scope(p, &d.body, &env)
            .map_err(|e| ScopeError(format!("in definition `{}`: {}", d.name, e.0)))?;
    }
    check_scope(p, &p.main, env_vars)
}

/// Renders a term in the paper's notation (`tick >>`, `let! x := ...`,
/// `let~ x := ...`, `force x`).
pub fn pretty_ir(t: &IrTerm) -> String {
    let mut s = String::new();
    pp(t, 0, &mut s);
    s
}

fn indent(n: usize, out: &mut String) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn pp(t: &IrTerm, d: usize, out: &mut String) {
    match t {
        IrTerm::Ret { value } => match value {
            IrValue::Unit => out.push_str("ret unit"),
            IrValue::Nat(n) => out.push_str(&format!("ret {}", n)),
            IrValue::Var(x) => out.push_str(&format!("ret {}", x)),
        },
        IrTerm::Tick => out.push_str("tick"),
        IrTerm::Bind { first, binder, rest } => {
            match &**first {
                IrTerm::Tick => {
                    out.push_str("tick >>\n");
                    indent(d, out);
                }
                IrTerm::ThunkOf { body } => {
                    out.push_str(&format!("let~ {} :=\n", binder));
                    indent(d + 1, out);
                    pp(body, d + 1, out);
                    out.push('\n');
                    indent(d, out);
                    out.push_str("in\n");
                    indent(d, out);
                }
                _ => {
                    out.push_str(&format!("let! {} :=\n", binder));
                    indent(d + 1, out);
                    pp(first, d + 1, out);
                    out.push('\n');
                    indent(d, out);
                    out.push_str("in\n");
                    indent(d, out);
                }
            }
            pp(rest, d, out);
        }
        IrTerm::ThunkOf { body } => {
            out.push_str("thunk (");
            pp(body, d + 1, out);
            out.push(')');
        }
        IrTerm::Forcing { thunk_var, binder, rest } => {
            if let IrTerm::Ret { value: IrValue::Var(x) } = &**rest {
                if x == binder {
                    out.push_str(&format!("force {}", thunk_var));
                    return;
                }
            }
            out.push_str(&format!("(fun {} =>\n", binder));
            indent(d + 1, out);
            pp(rest, d + 1, out);
            out.push_str(&format!(") $! {}", thunk_var));
        }
        IrTerm::CallLam { fn_var, arg_var } => out.push_str(&format!("{} {}", fn_var, arg_var)),
        IrTerm::MkLam { param, body } => {
            out.push_str(&format!("ret (fun {} =>\n", param));
            indent(d + 1, out);
            pp(body, d + 1, out);
            out.push(')');
        }
        IrTerm::MkNil => out.push_str("ret NilA"),
        IrTerm::MkCons { head_var, tail_var } => {
            out.push_str(&format!("ret (ConsA {} {})", head_var, tail_var))
        }
        IrTerm::Foldr {
            nil_case,
            head_param,
            acc_param,
            cons_case,
            scrut_var,
            costed,
        } => {
            out.push_str(&format!(
                "foldrA{} {{ nil =>\n",
                if *costed { "" } else { " (nocost)" }
            ));
            indent(d + 1, out);
            pp(nil_case, d + 1, out);
            out.push('\n');
            indent(d, out);
            out.push_str(&format!("| cons {} {} =>\n", head_param, acc_param));
            indent(d + 1, out);
            pp(cons_case, d + 1, out);
            out.push('\n');
            indent(d, out);
            out.push_str(&format!("}} {}", scrut_var));
        }
        IrTerm::CaseList {
            scrut_var,
            nil_branch,
            head_param,
            tail_param,
            cons_branch,
        } => {
            out.push_str(&format!("match! {} {{ nil =>\n", scrut_var));
            indent(d + 1, out);
            pp(nil_branch, d + 1, out);
            out.push('\n');
            indent(d, out);
            out.push_str(&format!("| cons {} {} =>\n", head_param, tail_param));
            indent(d + 1, out);
            pp(cons_branch, d + 1, out);
            out.push('\n');
            indent(d, out);
            out.push('}');
        }
        IrTerm::NatCase {
            scrut_var,
            zero_branch,
            pred_name,
            succ_branch,
        } => {
            out.push_str(&format!("natcase! {} {{ zero =>\n", scrut_var));
            indent(d + 1, out);
            pp(zero_branch, d + 1, out);
            out.push('\n');
            indent(d, out);
            out.push_str(&format!("| succ {} =>\n", pred_name));
            indent(d + 1, out);
            pp(succ_branch, d + 1, out);
            out.push('\n');
            indent(d, out);
            out.push('}');
        }
        IrTerm::DefCall { name, arg_vars } => {
            out.push_str(name);
            for a in arg_vars {
                out.push(' ');
                out.push_str(a);
            }
        }
    }
}
