//! Execution of [`IrTerm`] under the clairvoyance-monad semantics.
//!
//! A term denotes a finite set of (value, cost) outcomes:
//!
//! * `ret v` yields `{(v, 0)}`; `tick` yields `{(unit, 1)}`;
//! * `bind` sums costs over sequencing;
//! * `thunk u` yields every `(Thunk v, n)` with `(v, n)` in `u`, plus
//!   `(Undefined, 0)` for the skipped branch;
//! * `forcing` on `Undefined` is the empty set — failure is emptiness,
//!   never an exception.
//!
//! Two engines compute this denotation: a direct recursive set builder
//! ([`enumerate`]), and a path-wise depth-first engine used for
//! [`min_cost`]/[`max_cost`] search. The searches prune on accumulated
//! cost (admissible: skipping costs nothing and all costs are
//! nonnegative) and must agree exactly with exhaustive enumeration.
//!
//! Work is bounded by a per-call node budget; exhausting it is a distinct
//! diagnostic, never silent truncation.

use crate::ir::{IrProgram, IrTerm, IrValue};
use crate::value::{AValue, Demand, Env, EvalValue, Outcome, TVal};
use std::collections::BTreeSet;
use thiserror::Error;

/// Default choice-tree node budget per evaluation call.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Counts evaluation nodes and cuts off runaway searches.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub(crate) fn step(&mut self) -> Result<(), EvalError> {
        self.used += 1;
        if self.used > self.limit {
            Err(EvalError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// The search budget ran out; distinct from a genuinely empty outcome
    /// set.
    #[error("evaluation budget exceeded ({limit} nodes)")]
    BudgetExceeded { limit: u64 },
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("unknown definition `{0}`")]
    UnknownDef(String),
    #[error("definition `{name}` called with {got} arguments, expects {want}")]
    DefArity { name: String, got: usize, want: usize },
    /// A value of the wrong shape reached an eliminator; unreachable for
    /// type-checked programs.
    #[error("runtime shape violation: {0}")]
    Shape(String),
}

pub type OutcomeSet = BTreeSet<Outcome>;

fn lookup<'e>(env: &'e Env, x: &str) -> Result<&'e TVal, EvalError> {
    env.get(x).ok_or_else(|| EvalError::UnboundVar(x.to_string()))
}

/// How a bound computation result enters the environment: plain values are
/// wrapped in a defined thunk, bare thunk results enter as themselves.
fn bind_env(env: &Env, binder: &str, v: EvalValue) -> Env {
    let tv = match v {
        EvalValue::Val(v) => TVal::thunk(v),
        EvalValue::Thunk(t) => t,
    };
    let mut e = env.clone();
    e.insert(binder.to_string(), tv);
    e
}

fn closure(env: &Env, param: &str, body: &IrTerm) -> AValue {
    let free = body.free_vars();
    let mut cenv = Env::new();
    for v in free {
        if v != param {
            if let Some(tv) = env.get(&v) {
                cenv.insert(v, tv.clone());
            }
        }
    }
    AValue::Clos {
        env: cenv,
        param: param.to_string(),
        body: Box::new(body.clone()),
    }
}

// ---------------------------------------------------------------------------
// Set engine: the denotation, computed directly.
// ---------------------------------------------------------------------------

struct SetEval<'a> {
    prog: &'a IrProgram,
    budget: &'a mut Budget,
}

impl<'a> SetEval<'a> {
    fn eval(&mut self, t: &IrTerm, env: &Env) -> Result<OutcomeSet, EvalError> {
        self.budget.step()?;
        let mut out = OutcomeSet::new();
        match t {
            IrTerm::Ret { value } => match value {
                IrValue::Unit => {
                    out.insert(Outcome::new(EvalValue::Val(AValue::Unit), 0));
                }
                IrValue::Nat(n) => {
                    out.insert(Outcome::new(EvalValue::Val(AValue::Nat(*n)), 0));
                }
                IrValue::Var(x) => match lookup(env, x)? {
                    TVal::Undefined => {}
                    TVal::Thunk(v) => {
                        out.insert(Outcome::new(EvalValue::Val((**v).clone()), 0));
                    }
                },
            },
            IrTerm::Tick => {
                out.insert(Outcome::new(EvalValue::Val(AValue::Unit), 1));
            }
            IrTerm::Bind { first, binder, rest } => {
                for o1 in self.eval(first, env)? {
                    let env2 = bind_env(env, binder, o1.value);
                    for o2 in self.eval(rest, &env2)? {
                        out.insert(Outcome::new(o2.value, o1.cost + o2.cost));
                    }
                }
            }
            IrTerm::ThunkOf { body } => {
                out.insert(Outcome::new(EvalValue::Thunk(TVal::Undefined), 0));
                for o in self.eval(body, env)? {
                    match o.value {
                        EvalValue::Val(v) => {
                            out.insert(Outcome::new(EvalValue::Thunk(TVal::thunk(v)), o.cost));
                        }
                        EvalValue::Thunk(_) => {
                            return Err(EvalError::Shape(
                                "thunk of a bare thunk computation".into(),
                            ))
                        }
                    }
                }
            }
            IrTerm::Forcing { thunk_var, binder, rest } => match lookup(env, thunk_var)? {
                TVal::Undefined => {}
                TVal::Thunk(v) => {
                    let mut env2 = env.clone();
                    env2.insert(binder.clone(), TVal::Thunk(v.clone()));
                    out = self.eval(rest, &env2)?;
                }
            },
            IrTerm::CallLam { fn_var, arg_var } => {
                let arg = lookup(env, arg_var)?.clone();
                match lookup(env, fn_var)? {
                    TVal::Undefined => {
                        return Err(EvalError::Shape(format!(
                            "call through undefined function variable `{}`",
                            fn_var
                        )))
                    }
                    TVal::Thunk(v) => match &**v {
                        AValue::Clos { env: cenv, param, body } => {
                            let mut env2 = cenv.clone();
                            env2.insert(param.clone(), arg);
                            let body = body.clone();
                            out = self.eval(&body, &env2)?;
                        }
                        other => {
                            return Err(EvalError::Shape(format!(
                                "call of non-function value {}",
                                other
                            )))
                        }
                    },
                }
            }
            IrTerm::MkLam { param, body } => {
                out.insert(Outcome::new(EvalValue::Val(closure(env, param, body)), 0));
            }
            IrTerm::MkNil => {
                out.insert(Outcome::new(EvalValue::Val(AValue::Nil), 0));
            }
            IrTerm::MkCons { head_var, tail_var } => {
                let h = lookup(env, head_var)?.clone();
                let t = lookup(env, tail_var)?.clone();
                out.insert(Outcome::new(EvalValue::Val(AValue::Cons(h, t)), 0));
            }
            IrTerm::Foldr {
                nil_case,
                head_param,
                acc_param,
                cons_case,
                scrut_var,
                costed,
            } => match lookup(env, scrut_var)? {
                TVal::Undefined => {}
                TVal::Thunk(v) => {
                    let v = (**v).clone();
                    out = self.eval_fold(
                        &v, nil_case, head_param, acc_param, cons_case, *costed, env,
                    )?;
                }
            },
            IrTerm::CaseList {
                scrut_var,
                nil_branch,
                head_param,
                tail_param,
                cons_branch,
            } => match lookup(env, scrut_var)? {
                TVal::Undefined => {}
                TVal::Thunk(v) => match &**v {
                    AValue::Nil => out = self.eval(nil_branch, env)?,
                    AValue::Cons(h, t) => {
                        let mut env2 = env.clone();
                        env2.insert(head_param.clone(), h.clone());
                        env2.insert(tail_param.clone(), t.clone());
                        let cons_branch = cons_branch.clone();
                        out = self.eval(&cons_branch, &env2)?;
                    }
                    other => {
                        return Err(EvalError::Shape(format!(
                            "list case on non-list value {}",
                            other
                        )))
                    }
                },
            },
            IrTerm::NatCase {
                scrut_var,
                zero_branch,
                pred_name,
                succ_branch,
            } => match lookup(env, scrut_var)? {
                TVal::Undefined => {}
                TVal::Thunk(v) => match &**v {
                    AValue::Nat(0) => out = self.eval(zero_branch, env)?,
                    AValue::Nat(n) => {
                        let mut env2 = env.clone();
                        env2.insert(pred_name.clone(), TVal::thunk(AValue::Nat(n - 1)));
                        let succ_branch = succ_branch.clone();
                        out = self.eval(&succ_branch, &env2)?;
                    }
                    other => {
                        return Err(EvalError::Shape(format!(
                            "nat case on non-nat value {}",
                            other
                        )))
                    }
                },
            },
            IrTerm::DefCall { name, arg_vars } => {
                let def = self
                    .prog
                    .def(name)
                    .ok_or_else(|| EvalError::UnknownDef(name.clone()))?;
                if def.params.len() != arg_vars.len() {
                    return Err(EvalError::DefArity {
                        name: name.clone(),
                        got: arg_vars.len(),
                        want: def.params.len(),
                    });
                }
                let mut env2 = Env::new();
                for (p, a) in def.params.iter().zip(arg_vars) {
                    env2.insert(p.clone(), lookup(env, a)?.clone());
                }
                let body = def.body.clone();
                out = self.eval(&body, &env2)?;
            }
        }
        Ok(out)
    }

    fn eval_fold(
        &mut self,
        v: &AValue,
        nil_case: &IrTerm,
        head_param: &str,
        acc_param: &str,
        cons_case: &IrTerm,
        costed: bool,
        env: &Env,
    ) -> Result<OutcomeSet, EvalError> {
        self.budget.step()?;
        let tick = u64::from(costed);
        let mut out = OutcomeSet::new();
        match v {
            AValue::Nil => {
                for o in self.eval(nil_case, env)? {
                    out.insert(Outcome::new(o.value, tick + o.cost));
                }
            }
            AValue::Cons(h, t) => {
                // skip the recursive result
                let mut env_skip = env.clone();
                env_skip.insert(head_param.to_string(), h.clone());
                env_skip.insert(acc_param.to_string(), TVal::Undefined);
                for o in self.eval(cons_case, &env_skip)? {
                    out.insert(Outcome::new(o.value, tick + o.cost));
                }
                // evaluate it, which forces the tail
                if let TVal::Thunk(tv) = t {
                    let tv = (**tv).clone();
                    for rec in self.eval_fold(
                        &tv, nil_case, head_param, acc_param, cons_case, costed, env,
                    )? {
                        let rv = match rec.value {
                            EvalValue::Val(v) => v,
                            EvalValue::Thunk(_) => {
                                return Err(EvalError::Shape("fold produced a bare thunk".into()))
                            }
                        };
                        let mut env_eval = env.clone();
                        env_eval.insert(head_param.to_string(), h.clone());
                        env_eval.insert(acc_param.to_string(), TVal::thunk(rv));
                        for o in self.eval(cons_case, &env_eval)? {
                            out.insert(Outcome::new(o.value, tick + rec.cost + o.cost));
                        }
                    }
                }
            }
            other => {
                return Err(EvalError::Shape(format!("fold over non-list value {}", other)))
            }
        }
        Ok(out)
    }
}

/// The full outcome set of a term: the denotation, computed by direct
/// recursion over the term.
pub fn enumerate(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    budget: &mut Budget,
) -> Result<OutcomeSet, EvalError> {
    SetEval { prog, budget }.eval(t, env)
}

/// Outcomes whose value dominates the demand.
pub fn outcomes_meeting(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    d: &Demand,
    budget: &mut Budget,
) -> Result<OutcomeSet, EvalError> {
    Ok(enumerate(prog, t, env, budget)?
        .into_iter()
        .filter(|o| d.met_by(&o.value))
        .collect())
}

// ---------------------------------------------------------------------------
// Path-wise engine: depth-first over choice points, with cost pruning.
// ---------------------------------------------------------------------------

struct Dfs<'a> {
    prog: &'a IrProgram,
    budget: &'a mut Budget,
    /// Paths whose accumulated cost reaches this bound are abandoned.
    bound: Option<u64>,
}

type Sink<'s> = &'s mut dyn FnMut(&mut Dfs<'_>, EvalValue, u64) -> Result<(), EvalError>;

impl<'a> Dfs<'a> {
    fn cut(&self, base: u64) -> bool {
        matches!(self.bound, Some(b) if base >= b)
    }

    fn visit(&mut self, t: &IrTerm, env: &Env, base: u64, sink: Sink<'_>) -> Result<(), EvalError> {
        if self.cut(base) {
            return Ok(());
        }
        self.budget.step()?;
        match t {
            IrTerm::Ret { value } => match value {
                IrValue::Unit => sink(self, EvalValue::Val(AValue::Unit), base),
                IrValue::Nat(n) => sink(self, EvalValue::Val(AValue::Nat(*n)), base),
                IrValue::Var(x) => match lookup(env, x)? {
                    TVal::Undefined => Ok(()),
                    TVal::Thunk(v) => {
                        let v = (**v).clone();
                        sink(self, EvalValue::Val(v), base)
                    }
                },
            },
            IrTerm::Tick => sink(self, EvalValue::Val(AValue::Unit), base + 1),
            IrTerm::Bind { first, binder, rest } => {
                self.visit(first, env, base, &mut |me, v1, c1| {
                    let env2 = bind_env(env, binder, v1);
                    me.visit(rest, &env2, c1, &mut |me, v2, c2| sink(me, v2, c2))
                })
            }
            IrTerm::ThunkOf { body } => {
                sink(self, EvalValue::Thunk(TVal::Undefined), base)?;
                self.visit(body, env, base, &mut |me, v, c| match v {
                    EvalValue::Val(v) => sink(me, EvalValue::Thunk(TVal::thunk(v)), c),
                    EvalValue::Thunk(_) => {
                        Err(EvalError::Shape("thunk of a bare thunk computation".into()))
                    }
                })
            }
            IrTerm::Forcing { thunk_var, binder, rest } => match lookup(env, thunk_var)? {
                TVal::Undefined => Ok(()),
                TVal::Thunk(v) => {
                    let mut env2 = env.clone();
                    env2.insert(binder.clone(), TVal::Thunk(v.clone()));
                    self.visit(rest, &env2, base, sink)
                }
            },
            IrTerm::CallLam { fn_var, arg_var } => {
                let arg = lookup(env, arg_var)?.clone();
                match lookup(env, fn_var)? {
                    TVal::Undefined => Err(EvalError::Shape(format!(
                        "call through undefined function variable `{}`",
                        fn_var
                    ))),
                    TVal::Thunk(v) => match &**v {
                        AValue::Clos { env: cenv, param, body } => {
                            let mut env2 = cenv.clone();
                            env2.insert(param.clone(), arg);
                            let body = body.clone();
                            self.visit(&body, &env2, base, sink)
                        }
                        other => Err(EvalError::Shape(format!(
                            "call of non-function value {}",
                            other
                        ))),
                    },
                }
            }
            IrTerm::MkLam { param, body } => {
                let c = closure(env, param, body);
                sink(self, EvalValue::Val(c), base)
            }
            IrTerm::MkNil => sink(self, EvalValue::Val(AValue::Nil), base),
            IrTerm::MkCons { head_var, tail_var } => {
                let h = lookup(env, head_var)?.clone();
                let t = lookup(env, tail_var)?.clone();
                sink(self, EvalValue::Val(AValue::Cons(h, t)), base)
            }
            IrTerm::Foldr {
                nil_case,
                head_param,
                acc_param,
                cons_case,
                scrut_var,
                costed,
            } => match lookup(env, scrut_var)? {
                TVal::Undefined => Ok(()),
                TVal::Thunk(v) => {
                    let v = (**v).clone();
                    self.visit_fold(
                        &v, nil_case, head_param, acc_param, cons_case, *costed, env, base, sink,
                    )
                }
            },
            IrTerm::CaseList {
                scrut_var,
                nil_branch,
                head_param,
                tail_param,
                cons_branch,
            } => match lookup(env, scrut_var)? {
                TVal::Undefined => Ok(()),
                TVal::Thunk(v) => match &**v {
                    AValue::Nil => self.visit(nil_branch, env, base, sink),
                    AValue::Cons(h, t) => {
                        let mut env2 = env.clone();
                        env2.insert(head_param.clone(), h.clone());
                        env2.insert(tail_param.clone(), t.clone());
                        let cons_branch = cons_branch.clone();
                        self.visit(&cons_branch, &env2, base, sink)
                    }
                    other => Err(EvalError::Shape(format!(
                        "list case on non-list value {}",
                        other
                    ))),
                },
            },
            IrTerm::NatCase {
                scrut_var,
                zero_branch,
                pred_name,
                succ_branch,
            } => match lookup(env, scrut_var)? {
                TVal::Undefined => Ok(()),
                TVal::Thunk(v) => match &**v {
                    AValue::Nat(0) => self.visit(zero_branch, env, base, sink),
                    AValue::Nat(n) => {
                        let mut env2 = env.clone();
                        env2.insert(pred_name.clone(), TVal::thunk(AValue::Nat(n - 1)));
                        let succ_branch = succ_branch.clone();
                        self.visit(&succ_branch, &env2, base, sink)
                    }
                    other => Err(EvalError::Shape(format!(
                        "nat case on non-nat value {}",
                        other
                    ))),
                },
            },
            IrTerm::DefCall { name, arg_vars } => {
                let def = self
                    .prog
                    .def(name)
                    .ok_or_else(|| EvalError::UnknownDef(name.clone()))?;
                if def.params.len() != arg_vars.len() {
                    return Err(EvalError::DefArity {
                        name: name.clone(),
                        got: arg_vars.len(),
                        want: def.params.len(),
                    });
                }
                let mut env2 = Env::new();
                for (p, a) in def.params.iter().zip(arg_vars) {
                    env2.insert(p.clone(), lookup(env, a)?.clone());
                }
                let body = def.body.clone();
                self.visit(&body, &env2, base, sink)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn visit_fold(
        &mut self,
        v: &AValue,
        nil_case: &IrTerm,
        head_param: &str,
        acc_param: &str,
        cons_case: &IrTerm,
        costed: bool,
        env: &Env,
        base: u64,
        sink: Sink<'_>,
    ) -> Result<(), EvalError> {
        let base = base + u64::from(costed);
        if self.cut(base) {
            return Ok(());
        }
        self.budget.step()?;
        match v {
            AValue::Nil => self.visit(nil_case, env, base, sink),
            AValue::Cons(h, t) => {
                // skip branch first: cheapest extensions explored early
                let mut env_skip = env.clone();
                env_skip.insert(head_param.to_string(), h.clone());
                env_skip.insert(acc_param.to_string(), TVal::Undefined);
                self.visit(cons_case, &env_skip, base, &mut |me, v, c| sink(me, v, c))?;
                if let TVal::Thunk(tv) = t {
                    let tv = (**tv).clone();
                    self.visit_fold(
                        &tv,
                        nil_case,
                        head_param,
                        acc_param,
                        cons_case,
                        costed,
                        env,
                        base,
                        &mut |me, rv, rc| {
                            let rv = match rv {
                                EvalValue::Val(v) => v,
                                EvalValue::Thunk(_) => {
                                    return Err(EvalError::Shape(
                                        "fold produced a bare thunk".into(),
                                    ))
                                }
                            };
                            let mut env_eval = env.clone();
                            env_eval.insert(head_param.to_string(), h.clone());
                            env_eval.insert(acc_param.to_string(), TVal::thunk(rv));
                            me.visit(cons_case, &env_eval, rc, &mut |me, v, c| sink(me, v, c))
                        },
                    )
                } else {
                    Ok(())
                }
            }
            other => Err(EvalError::Shape(format!("fold over non-list value {}", other))),
        }
    }
}

/// Minimum cost over outcomes meeting the demand, with the witnessing
/// value; `None` when no outcome meets it. Branch-and-bound: agrees
/// exactly with the exhaustive definition.
pub fn min_cost_witness(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    d: &Demand,
    budget: &mut Budget,
) -> Result<Option<(u64, EvalValue)>, EvalError> {
    let mut dfs = Dfs { prog, budget, bound: None };
    let mut best: Option<(u64, EvalValue)> = None;
    dfs.visit(t, env, 0, &mut |me, v, c| {
        if d.met_by(&v) && best.as_ref().map_or(true, |(bc, _)| c < *bc) {
            best = Some((c, v));
            me.bound = Some(c);
        }
        Ok(())
    })?;
    Ok(best)
}

/// Minimum cost over outcomes meeting the demand.
pub fn min_cost(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    d: &Demand,
    budget: &mut Budget,
) -> Result<Option<u64>, EvalError> {
    Ok(min_cost_witness(prog, t, env, d, budget)?.map(|(c, _)| c))
}

/// Maximum cost over outcomes meeting the demand, with a witness.
pub fn max_cost_witness(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    d: &Demand,
    budget: &mut Budget,
) -> Result<Option<(u64, EvalValue)>, EvalError> {
    let mut dfs = Dfs { prog, budget, bound: None };
    let mut best: Option<(u64, EvalValue)> = None;
    dfs.visit(t, env, 0, &mut |_, v, c| {
        if d.met_by(&v) && best.as_ref().map_or(true, |(bc, _)| c > *bc) {
            best = Some((c, v));
        }
        Ok(())
    })?;
    Ok(best)
}

/// Maximum cost over outcomes meeting the demand.
pub fn max_cost(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    d: &Demand,
    budget: &mut Budget,
) -> Result<Option<u64>, EvalError> {
    Ok(max_cost_witness(prog, t, env, d, budget)?.map(|(c, _)| c))
}

/// Collects the outcome set through the path-wise engine; used to
/// cross-check the two engines against each other.
pub fn enumerate_paths(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    budget: &mut Budget,
) -> Result<OutcomeSet, EvalError> {
    let mut dfs = Dfs { prog, budget, bound: None };
    let mut out = OutcomeSet::new();
    dfs.visit(t, env, 0, &mut |_, v, c| {
        out.insert(Outcome::new(v, c));
        Ok(())
    })?;
    Ok(out)
}

/// True when the first outcome found satisfies the predicate; stops early.
/// Used for optimistic checking without full enumeration.
pub fn find_outcome(
    prog: &IrProgram,
    t: &IrTerm,
    env: &Env,
    pred: &dyn Fn(&Outcome) -> bool,
    budget: &mut Budget,
) -> Result<Option<Outcome>, EvalError> {
    let mut dfs = Dfs { prog, budget, bound: None };
    let mut found: Option<Outcome> = None;
    let r = dfs.visit(t, env, 0, &mut |_, v, c| {
        let o = Outcome::new(v, c);
        if pred(&o) {
            found = Some(o.clone());
            // abort the traversal through a sentinel error
            return Err(EvalError::Shape("__found__".into()));
        }
        Ok(())
    });
    match r {
        Ok(()) => Ok(found),
        Err(EvalError::Shape(s)) if s == "__found__" => Ok(found),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::IrProgram;

    fn prog() -> IrProgram {
        IrProgram::with_defs(vec![])
    }

    fn run(t: &IrTerm) -> OutcomeSet {
        enumerate(&prog(), t, &Env::new(), &mut Budget::default()).unwrap()
    }

    #[test]
    fn tick_costs_one() {
        let s = run(&IrTerm::Tick);
        assert_eq!(s.len(), 1);
        let o = s.iter().next().unwrap();
        assert_eq!(o.value, EvalValue::Val(AValue::Unit));
        assert_eq!(o.cost, 1);
    }

    #[test]
    fn thunk_forks_into_skip_and_run() {
        let t = IrTerm::thunk_of(IrTerm::ret_unit());
        let s = run(&t);
        let expect: OutcomeSet = [
            Outcome::new(EvalValue::Thunk(TVal::Undefined), 0),
            Outcome::new(EvalValue::Thunk(TVal::thunk(AValue::Unit)), 0),
        ]
        .into_iter()
        .collect();
        assert_eq!(s, expect);
    }

    #[test]
    fn forcing_undefined_fails_to_the_empty_set() {
        // let~ x := tick >> ret nil in force x: skipping x kills the branch
        let t = IrTerm::let_thunk(
            "x",
            IrTerm::tick_then(IrTerm::MkNil),
            IrTerm::force_var("x"),
        );
        let s = run(&t);
        let expect: OutcomeSet = [Outcome::new(EvalValue::Val(AValue::Nil), 1)]
            .into_iter()
            .collect();
        assert_eq!(s, expect);
    }

    #[test]
    fn never_skipping_always_succeeds() {
        let t = IrTerm::let_thunk(
            "x",
            IrTerm::tick_then(IrTerm::MkNil),
            IrTerm::tick_then(IrTerm::force_var("x")),
        );
        assert!(!run(&t).is_empty());
    }

    #[test]
    fn engines_agree_on_a_small_term() {
        let t = IrTerm::let_thunk(
            "x",
            IrTerm::tick_then(IrTerm::MkNil),
            IrTerm::bind(
                IrTerm::thunk_of(IrTerm::tick_then(IrTerm::force_var("x"))),
                "y",
                IrTerm::Ret { value: IrValue::Var("y".into()) },
            ),
        );
        let a = run(&t);
        let b = enumerate_paths(&prog(), &t, &Env::new(), &mut Budget::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn min_cost_of_ret_under_its_own_demand_is_zero() {
        let t = IrTerm::MkNil;
        let m = min_cost(&prog(), &t, &Env::new(), &Demand::Nil, &mut Budget::default()).unwrap();
        assert_eq!(m, Some(0));
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let t = IrTerm::tick_then(IrTerm::tick_then(IrTerm::ret_unit()));
        let mut tiny = Budget::new(1);
        let e = enumerate(&prog(), &t, &Env::new(), &mut tiny).unwrap_err();
        assert!(matches!(e, EvalError::BudgetExceeded { .. }));
    }
}
