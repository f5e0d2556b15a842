//! A heap-based call-by-need evaluator with tick counting.
//!
//! This is the first reference oracle: thunks are heap cells, evaluated at
//! most once on first demand and updated in place, so each cell is written
//! at most twice (allocation, then one update) — asserted during
//! evaluation. It runs the same cost-instrumented IR as the clairvoyant
//! evaluator (so tick placement automatically mirrors the configured
//! translation mode), but with a deterministic memoizing strategy instead
//! of nondeterministic choice. By the clairvoyance correspondence, its
//! cost under a demand equals the minimum clairvoyant cost meeting that
//! demand.

use crate::ir::{IrProgram, IrTerm, IrValue};
use crate::syntax::AnfProgram;
use crate::translate::{translate_program, TickMode};
use crate::value::{AValue, Demand, PureValue, TVal};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NeedError {
    #[error("demand unsatisfiable: {0}")]
    DemandUnsatisfiable(String),
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("unknown definition `{0}`")]
    UnknownDef(String),
    #[error("call-by-need shape violation: {0}")]
    Shape(String),
    #[error("heap cell updated twice")]
    DoubleUpdate,
}

/// Heap locations.
pub type Loc = usize;

pub type NeedEnv = BTreeMap<String, Loc>;

/// A heap cell: an unevaluated suspension or its memoized value.
#[derive(Debug, Clone)]
pub enum HeapCell {
    Unevaluated { body: IrTerm, env: NeedEnv },
    Evaluated(NeedValue),
}

#[derive(Debug, Clone)]
pub enum NeedValue {
    Unit,
    Nat(u64),
    Nil,
    Cons(Loc, Loc),
    Clos { env: NeedEnv, param: String, body: IrTerm },
}

#[derive(Debug, Default)]
pub struct Heap {
    cells: Vec<HeapCell>,
}

impl Heap {
    fn alloc(&mut self, c: HeapCell) -> Loc {
        self.cells.push(c);
        self.cells.len() - 1
    }

    fn get(&self, l: Loc) -> &HeapCell {
        &self.cells[l]
    }

    fn update(&mut self, l: Loc, v: NeedValue) -> Result<(), NeedError> {
        match &self.cells[l] {
            HeapCell::Unevaluated { .. } => {
                self.cells[l] = HeapCell::Evaluated(v);
                Ok(())
            }
            HeapCell::Evaluated(_) => Err(NeedError::DoubleUpdate),
        }
    }

    /// Allocates the exact heap image of a pure value.
    fn alloc_pure(&mut self, p: &PureValue) -> Loc {
        let v = match p {
            PureValue::Unit => NeedValue::Unit,
            PureValue::Nat(n) => NeedValue::Nat(*n),
            PureValue::Nil => NeedValue::Nil,
            PureValue::Cons(h, t) => {
                let hl = self.alloc_pure(h);
                let tl = self.alloc_pure(t);
                NeedValue::Cons(hl, tl)
            }
        };
        self.alloc(HeapCell::Evaluated(v))
    }
}

/// Result of a call-by-need run: the demanded portion of the value (with
/// cells the run never forced read back as undefined) and the total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeedOutcome {
    pub value: AValue,
    pub cost: u64,
}

struct Machine<'a> {
    prog: &'a IrProgram,
    heap: Heap,
}

const FOLD_TAIL: &str = "%rec";

impl<'a> Machine<'a> {
    fn lookup(&self, env: &NeedEnv, x: &str) -> Result<Loc, NeedError> {
        env.get(x).copied().ok_or_else(|| NeedError::UnboundVar(x.to_string()))
    }

    /// Forces a cell, memoizing the result; re-forcing costs nothing.
    fn force(&mut self, l: Loc) -> Result<(NeedValue, u64), NeedError> {
        match self.heap.get(l) {
            HeapCell::Evaluated(v) => Ok((v.clone(), 0)),
            HeapCell::Unevaluated { body, env } => {
                let body = body.clone();
                let env = env.clone();
                let (v, c) = self.eval(&body, &env)?;
                self.heap.update(l, v.clone())?;
                Ok((v, c))
            }
        }
    }

    fn eval(&mut self, t: &IrTerm, env: &NeedEnv) -> Result<(NeedValue, u64), NeedError> {
        match t {
            IrTerm::Ret { value } => match value {
                IrValue::Unit => Ok((NeedValue::Unit, 0)),
                IrValue::Nat(n) => Ok((NeedValue::Nat(*n), 0)),
                IrValue::Var(x) => self.force(self.lookup(env, x)?),
            },
            IrTerm::Tick => Ok((NeedValue::Unit, 1)),
            IrTerm::Bind { first, binder, rest } => {
                let (loc, c1) = match &**first {
                    // lazy allocation: the whole point
                    IrTerm::ThunkOf { body } => (
                        self.heap.alloc(HeapCell::Unevaluated {
                            body: (**body).clone(),
                            env: env.clone(),
                        }),
                        0,
                    ),
                    other => {
                        let (v, c) = self.eval(other, env)?;
                        (self.heap.alloc(HeapCell::Evaluated(v)), c)
                    }
                };
                let mut env2 = env.clone();
                env2.insert(binder.clone(), loc);
                let (v, c2) = self.eval(rest, &env2)?;
                Ok((v, c1 + c2))
            }
            IrTerm::ThunkOf { .. } => Err(NeedError::Shape(
                "bare thunk outside a bind has no call-by-need value".into(),
            )),
            IrTerm::Forcing { thunk_var, binder, rest } => {
                let l = self.lookup(env, thunk_var)?;
                let (_, c1) = self.force(l)?;
                let mut env2 = env.clone();
                env2.insert(binder.clone(), l);
                let (v, c2) = self.eval(rest, &env2)?;
                Ok((v, c1 + c2))
            }
            IrTerm::CallLam { fn_var, arg_var } => {
                let fl = self.lookup(env, fn_var)?;
                let al = self.lookup(env, arg_var)?;
                let (fv, c1) = self.force(fl)?;
                match fv {
                    NeedValue::Clos { env: cenv, param, body } => {
                        let mut env2 = cenv.clone();
                        env2.insert(param, al);
                        let (v, c2) = self.eval(&body, &env2)?;
                        Ok((v, c1 + c2))
                    }
                    other => Err(NeedError::Shape(format!(
                        "call of non-function {:?}",
                        other
                    ))),
                }
            }
            IrTerm::MkLam { param, body } => {
                let free = body.free_vars();
                let mut cenv = NeedEnv::new();
                for v in free {
                    if v != *param {
                        if let Some(l) = env.get(&v) {
                            cenv.insert(v, *l);
                        }
                    }
                }
                Ok((
                    NeedValue::Clos {
                        env: cenv,
                        param: param.clone(),
                        body: (**body).clone(),
                    },
                    0,
                ))
            }
            IrTerm::MkNil => Ok((NeedValue::Nil, 0)),
            IrTerm::MkCons { head_var, tail_var } => {
                let h = self.lookup(env, head_var)?;
                let t = self.lookup(env, tail_var)?;
                Ok((NeedValue::Cons(h, t), 0))
            }
            IrTerm::Foldr {
                nil_case,
                head_param,
                acc_param,
                cons_case,
                scrut_var,
                costed,
            } => {
                let l = self.lookup(env, scrut_var)?;
                let (v, c) = self.force(l)?;
                let (r, c2) =
                    self.fold(&v, nil_case, head_param, acc_param, cons_case, *costed, env, t)?;
                Ok((r, c + c2))
            }
            IrTerm::CaseList {
                scrut_var,
                nil_branch,
                head_param,
                tail_param,
                cons_branch,
            } => {
                let l = self.lookup(env, scrut_var)?;
                let (v, c) = self.force(l)?;
                match v {
                    NeedValue::Nil => {
                        let (r, c2) = self.eval(nil_branch, env)?;
                        Ok((r, c + c2))
                    }
                    NeedValue::Cons(hl, tl) => {
                        let mut env2 = env.clone();
                        env2.insert(head_param.clone(), hl);
                        env2.insert(tail_param.clone(), tl);
                        let (r, c2) = self.eval(cons_branch, &env2)?;
                        Ok((r, c + c2))
                    }
                    other => Err(NeedError::Shape(format!(
                        "list case on non-list {:?}",
                        other
                    ))),
                }
            }
            IrTerm::NatCase {
                scrut_var,
                zero_branch,
                pred_name,
                succ_branch,
            } => {
                let l = self.lookup(env, scrut_var)?;
                let (v, c) = self.force(l)?;
                match v {
                    NeedValue::Nat(0) => {
                        let (r, c2) = self.eval(zero_branch, env)?;
                        Ok((r, c + c2))
                    }
                    NeedValue::Nat(n) => {
                        let pl = self.heap.alloc(HeapCell::Evaluated(NeedValue::Nat(n - 1)));
                        let mut env2 = env.clone();
                        env2.insert(pred_name.clone(), pl);
                        let (r, c2) = self.eval(succ_branch, &env2)?;
                        Ok((r, c + c2))
                    }
                    other => Err(NeedError::Shape(format!("nat case on non-nat {:?}", other))),
                }
            }
            IrTerm::DefCall { name, arg_vars } => {
                let def = self
                    .prog
                    .def(name)
                    .ok_or_else(|| NeedError::UnknownDef(name.clone()))?;
                if def.params.len() != arg_vars.len() {
                    return Err(NeedError::Shape(format!(
                        "definition `{}` called with {} arguments, expects {}",
                        name,
                        arg_vars.len(),
                        def.params.len()
                    )));
                }
                let mut env2 = NeedEnv::new();
                for (p, a) in def.params.iter().zip(arg_vars) {
                    env2.insert(p.clone(), self.lookup(env, a)?);
                }
                let body = def.body.clone();
                self.eval(&body, &env2)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fold(
        &mut self,
        v: &NeedValue,
        nil_case: &IrTerm,
        head_param: &str,
        acc_param: &str,
        cons_case: &IrTerm,
        costed: bool,
        env: &NeedEnv,
        fold_node: &IrTerm,
    ) -> Result<(NeedValue, u64), NeedError> {
        let tick = u64::from(costed);
        match v {
            NeedValue::Nil => {
                let (r, c) = self.eval(nil_case, env)?;
                Ok((r, tick + c))
            }
            NeedValue::Cons(hl, tl) => {
                // suspend the fold of the tail; it is forced only if the
                // continuation demands it
                let mut rec_env = env.clone();
                rec_env.insert(FOLD_TAIL.to_string(), *tl);
                let rec_body = match fold_node {
                    IrTerm::Foldr {
                        nil_case,
                        head_param,
                        acc_param,
                        cons_case,
                        costed,
                        ..
                    } => IrTerm::Foldr {
                        nil_case: nil_case.clone(),
                        head_param: head_param.clone(),
                        acc_param: acc_param.clone(),
                        cons_case: cons_case.clone(),
                        scrut_var: FOLD_TAIL.to_string(),
                        costed: *costed,
                    },
                    _ => unreachable!("fold called with a non-fold node"),
                };
                let rl = self
                    .heap
                    .alloc(HeapCell::Unevaluated { body: rec_body, env: rec_env });
                let mut env2 = env.clone();
                env2.insert(head_param.to_string(), *hl);
                env2.insert(acc_param.to_string(), rl);
                let (r, c) = self.eval(cons_case, &env2)?;
                Ok((r, tick + c))
            }
            other => Err(NeedError::Shape(format!("fold over non-list {:?}", other))),
        }
    }

    /// Forces the parts of the result the demand marks as defined,
    /// memoizing along the way; returns the extra cost.
    fn force_demand(&mut self, v: &NeedValue, d: &Demand) -> Result<u64, NeedError> {
        match d {
            Demand::Skip | Demand::Whnf => Ok(0),
            Demand::Full => match v {
                NeedValue::Unit | NeedValue::Nat(_) | NeedValue::Nil | NeedValue::Clos { .. } => {
                    Ok(0)
                }
                NeedValue::Cons(hl, tl) => {
                    let (hv, c1) = self.force(*hl)?;
                    let c2 = self.force_demand(&hv, &Demand::Full)?;
                    let (tv, c3) = self.force(*tl)?;
                    let c4 = self.force_demand(&tv, &Demand::Full)?;
                    Ok(c1 + c2 + c3 + c4)
                }
            },
            Demand::Unit => match v {
                NeedValue::Unit => Ok(0),
                other => Err(NeedError::DemandUnsatisfiable(format!(
                    "expected unit, result is {:?}",
                    other
                ))),
            },
            Demand::Nat(n) => match v {
                NeedValue::Nat(m) if m == n => Ok(0),
                other => Err(NeedError::DemandUnsatisfiable(format!(
                    "expected {}, result is {:?}",
                    n, other
                ))),
            },
            Demand::Nil => match v {
                NeedValue::Nil => Ok(0),
                other => Err(NeedError::DemandUnsatisfiable(format!(
                    "expected nil, result is {:?}",
                    other
                ))),
            },
            Demand::Cons(dh, dt) => match v {
                NeedValue::Cons(hl, tl) => {
                    let mut cost = 0;
                    if **dh != Demand::Skip {
                        let (hv, c) = self.force(*hl)?;
                        cost += c;
                        cost += self.force_demand(&hv, dh)?;
                    }
                    if **dt != Demand::Skip {
                        let (tv, c) = self.force(*tl)?;
                        cost += c;
                        cost += self.force_demand(&tv, dt)?;
                    }
                    Ok(cost)
                }
                other => Err(NeedError::DemandUnsatisfiable(format!(
                    "expected a cons cell, result is {:?}",
                    other
                ))),
            },
        }
    }

    /// Reads back a value; cells the run never forced become undefined.
    fn read_back(&self, v: &NeedValue) -> AValue {
        match v {
            NeedValue::Unit => AValue::Unit,
            NeedValue::Nat(n) => AValue::Nat(*n),
            NeedValue::Nil => AValue::Nil,
            NeedValue::Cons(hl, tl) => AValue::Cons(self.read_back_loc(*hl), self.read_back_loc(*tl)),
            NeedValue::Clos { env, param, body } => {
                let mut cenv = crate::value::Env::new();
                for (k, l) in env {
                    cenv.insert(k.clone(), self.read_back_loc(*l));
                }
                AValue::Clos {
                    env: cenv,
                    param: param.clone(),
                    body: Box::new(body.clone()),
                }
            }
        }
    }

    fn read_back_loc(&self, l: Loc) -> TVal {
        match self.heap.get(l) {
            HeapCell::Unevaluated { .. } => TVal::Undefined,
            HeapCell::Evaluated(v) => TVal::thunk(self.read_back(v)),
        }
    }
}

/// Runs a lowered program under call-by-need with the given demand on the
/// result. Inputs are bound in the initial heap as exact values.
pub fn eval_need_ir(
    prog: &IrProgram,
    main: &IrTerm,
    inputs: &BTreeMap<String, PureValue>,
    d: &Demand,
) -> Result<NeedOutcome, NeedError> {
    let mut m = Machine { prog, heap: Heap::default() };
    let mut env = NeedEnv::new();
    for (k, p) in inputs {
        let l = m.heap.alloc_pure(p);
        env.insert(k.clone(), l);
    }
    let (v, c_eval) = m.eval(main, &env)?;
    let c_demand = m.force_demand(&v, d)?;
    Ok(NeedOutcome {
        value: m.read_back(&v),
        cost: c_eval + c_demand,
    })
}

/// Translates a type-checked ANF program under the given tick mode and
/// runs it to the demanded depth. Deterministic: identical inputs yield
/// identical value and cost.
pub fn eval_need(
    p: &AnfProgram,
    inputs: &BTreeMap<String, PureValue>,
    d: &Demand,
    mode: TickMode,
) -> Result<NeedOutcome, NeedError> {
    let ir = translate_program(p, mode);
    eval_need_ir(&ir, &ir.main.clone(), inputs, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anf::to_anf_program;
    use crate::parse::parse;
    use crate::typecheck::typecheck;

    #[test]
    fn whnf_demand_on_a_value_costs_zero() {
        let p = parse("main = nil").map(|mut p| {
            // give nil a type through ascription
            use crate::syntax::{Term, Ty};
            p.main = Term::Ascribe {
                term: Box::new(p.main.clone()),
                ty: Ty::list(Ty::Nat),
                span: Default::default(),
            };
            p
        });
        let p = p.unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        let out = eval_need(&anf, &BTreeMap::new(), &Demand::Whnf, TickMode::Full).unwrap();
        assert_eq!(out.cost, 0);
        assert_eq!(out.value, AValue::Nil);
    }

    #[test]
    fn unused_binding_costs_nothing_under_need() {
        let src = "main = let u = cons 1 nil in (nil : list nat)";
        let p = parse(src).unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        let full = eval_need(&anf, &BTreeMap::new(), &Demand::Full, TickMode::Full).unwrap();
        // only the outer let ticks; the bound cons is never forced
        assert_eq!(full.cost, 1);
    }

    #[test]
    fn memoization_pays_once() {
        // let a = cons 1 nil in let b = a in force both a and b via copies
        let src = "main = let a = (let z = 1 in cons z nil) in cons 2 a";
        let p = parse(src).unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        let full = eval_need(&anf, &BTreeMap::new(), &Demand::Full, TickMode::Full).unwrap();
        let whnf = eval_need(&anf, &BTreeMap::new(), &Demand::Whnf, TickMode::Full).unwrap();
        assert!(full.cost > whnf.cost);
    }

    #[test]
    fn conses_demand_beyond_result_is_unsatisfiable() {
        let src = "main = cons 1 nil";
        let p = parse(src).unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        let e = eval_need(
            &anf,
            &BTreeMap::new(),
            &crate::approx::demand_conses(3),
            TickMode::Full,
        )
        .unwrap_err();
        assert!(matches!(e, NeedError::DemandUnsatisfiable(_)));
    }
}
