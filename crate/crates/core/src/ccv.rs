//! The clairvoyant call-by-value operational semantics, evaluated on the
//! source (ANF) program.
//!
//! This is the second reference oracle. It is a big-step relation
//! ⟨h, t⟩ ⇓ⁿ ⟨h', u⟩ over source terms and heaps of *values*: every `let`
//! either evaluates its binding on the spot (call-by-value) or skips it,
//! leaving a hole in the heap; referencing a hole kills the derivation.
//! The relation is explored exhaustively over those allocation choices,
//! collecting every derivation.
//!
//! Tick placement mirrors the per-construct cost model of the full-tick
//! translation (variables, applications and lets cost one; values cost
//! zero; folds tick once per unfolding; `natcase` is free; `@nocost`
//! definition bodies never tick), so read-back derivations must coincide
//! exactly, value and cost, with the denotational outcome sets of the
//! full-tick IR. The tick-placement table is documented in
//! `docs/oracles.md`.

use crate::eval::{Budget, EvalError};
use crate::ir::{eta_expand_def, IrProgram, IrTerm};
use crate::syntax::{AnfProgram, Program, Term};
use crate::translate::translate_term;
use crate::value::{AValue, Env, PureValue, TVal};
use std::collections::BTreeMap;

pub type CcvEnv = BTreeMap<String, usize>;

/// A clairvoyant heap cell: a value, or the hole left by a skipped
/// binding.
#[derive(Debug, Clone)]
pub enum CcvCell {
    Skipped,
    Val(CcvVal),
}

/// Syntactic values paired with what they need from the heap.
#[derive(Debug, Clone)]
pub enum CcvVal {
    Unit,
    Nat(u64),
    Nil,
    Cons(usize, usize),
    Clos {
        env: CcvEnv,
        param: String,
        body: Term,
        /// Whether the body ticks (false inside `@nocost` definitions).
        costed: bool,
    },
    /// A (possibly partially applied) top-level definition.
    Def { name: String, pending: Vec<usize> },
}

#[derive(Debug, Clone, Default)]
pub struct CcvHeap {
    cells: Vec<CcvCell>,
}

impl CcvHeap {
    fn alloc(&mut self, c: CcvCell) -> usize {
        self.cells.push(c);
        self.cells.len() - 1
    }

    fn get(&self, l: usize) -> &CcvCell {
        &self.cells[l]
    }

    fn alloc_pure(&mut self, p: &PureValue) -> usize {
        let v = match p {
            PureValue::Unit => CcvVal::Unit,
            PureValue::Nat(n) => CcvVal::Nat(*n),
            PureValue::Nil => CcvVal::Nil,
            PureValue::Cons(h, t) => {
                let hl = self.alloc_pure(h);
                let tl = self.alloc_pure(t);
                CcvVal::Cons(hl, tl)
            }
        };
        self.alloc(CcvCell::Val(v))
    }
}

/// One complete derivation: final value term, final heap, cost.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub value: CcvVal,
    pub heap: CcvHeap,
    pub cost: u64,
}

struct Search<'a> {
    prog: &'a Program,
    ir: &'a IrProgram,
    budget: &'a mut Budget,
}

type Derivs = Vec<(CcvVal, CcvHeap, u64)>;

impl<'a> Search<'a> {
    fn step(&mut self) -> Result<(), EvalError> {
        self.budget.step()
    }

    fn lookup(&self, env: &CcvEnv, x: &str) -> Result<usize, EvalError> {
        env.get(x).copied().ok_or_else(|| EvalError::UnboundVar(x.to_string()))
    }

    fn arity(&self, name: &str) -> Result<usize, EvalError> {
        Ok(self
            .ir
            .def(name)
            .ok_or_else(|| EvalError::UnknownDef(name.to_string()))?
            .params
            .len())
    }

    fn eval(
        &mut self,
        heap: CcvHeap,
        t: &Term,
        env: &CcvEnv,
        costed: bool,
    ) -> Result<Derivs, EvalError> {
        self.step()?;
        let tick = u64::from(costed);
        match t {
            Term::Var(x, _) => {
                let l = self.lookup(env, x)?;
                match heap.get(l) {
                    CcvCell::Skipped => Ok(vec![]),
                    CcvCell::Val(v) => {
                        let v = v.clone();
                        Ok(vec![(v, heap, tick)])
                    }
                }
            }
            Term::DefRef(f, _) => {
                let def = self
                    .prog
                    .def(f)
                    .ok_or_else(|| EvalError::UnknownDef(f.clone()))?;
                if self.arity(f)? == 0 {
                    // a value definition denotes its computation; evaluate
                    // it in place (no sharing across references)
                    self.eval(heap, &def.body, &CcvEnv::new(), !def.nocost)
                } else {
                    Ok(vec![(
                        CcvVal::Def { name: f.clone(), pending: vec![] },
                        heap,
                        0,
                    )])
                }
            }
            Term::Lam { param, body, .. } => {
                let free = body.free_vars();
                let mut cenv = CcvEnv::new();
                for v in free {
                    if v != *param {
                        if let Some(l) = env.get(&v) {
                            cenv.insert(v, *l);
                        }
                    }
                }
                Ok(vec![(
                    CcvVal::Clos {
                        env: cenv,
                        param: param.clone(),
                        body: (**body).clone(),
                        costed,
                    },
                    heap,
                    0,
                )])
            }
            Term::App { func, arg, .. } => {
                let al = self.lookup(env, expect_var(arg))?;
                let fs = self.eval(heap, func, env, costed)?;
                let mut out = Derivs::new();
                for (fv, h1, n) in fs {
                    match fv {
                        CcvVal::Clos { env: cenv, param, body, costed: clos_costed } => {
                            let mut env2 = cenv.clone();
                            env2.insert(param.clone(), al);
                            for (v, h2, m) in self.eval(h1.clone(), &body, &env2, clos_costed)? {
                                out.push((v, h2, tick + n + m));
                            }
                        }
                        CcvVal::Def { name, mut pending } => {
                            pending.push(al);
                            let arity = self.arity(&name)?;
                            if pending.len() < arity {
                                out.push((CcvVal::Def { name, pending }, h1, tick + n));
                            } else {
                                let def = self.prog.def(&name).unwrap();
                                let (params, inner) = peel_params(&def.body);
                                debug_assert_eq!(params.len(), arity);
                                let mut env2 = CcvEnv::new();
                                for (p, l) in params.iter().zip(&pending) {
                                    env2.insert(p.clone(), *l);
                                }
                                let inner = inner.clone();
                                for (v, h2, m) in
                                    self.eval(h1.clone(), &inner, &env2, !def.nocost)?
                                {
                                    out.push((v, h2, tick + n + m));
                                }
                            }
                        }
                        other => {
                            return Err(EvalError::Shape(format!(
                                "application of non-function {:?}",
                                other
                            )))
                        }
                    }
                }
                Ok(out)
            }
            Term::Let { name, bound, body, .. } => {
                let mut out = Derivs::new();
                // skip the binding
                {
                    let mut h1 = heap.clone();
                    let l = h1.alloc(CcvCell::Skipped);
                    let mut env2 = env.clone();
                    env2.insert(name.clone(), l);
                    for (v, h2, m) in self.eval(h1, body, &env2, costed)? {
                        out.push((v, h2, tick + m));
                    }
                }
                // or evaluate it now
                for (w, mut h1, n) in self.eval(heap, bound, env, costed)? {
                    let l = h1.alloc(CcvCell::Val(w));
                    let mut env2 = env.clone();
                    env2.insert(name.clone(), l);
                    for (v, h2, m) in self.eval(h1.clone(), body, &env2, costed)? {
                        out.push((v, h2, tick + n + m));
                    }
                }
                Ok(out)
            }
            Term::Nil(_) => Ok(vec![(CcvVal::Nil, heap, 0)]),
            Term::Cons { head, tail, .. } => {
                let hl = self.lookup(env, expect_var(head))?;
                let tl = self.lookup(env, expect_var(tail))?;
                Ok(vec![(CcvVal::Cons(hl, tl), heap, 0)])
            }
            Term::Unit(_) => Ok(vec![(CcvVal::Unit, heap, 0)]),
            Term::NatLit(n, _) => Ok(vec![(CcvVal::Nat(*n), heap, 0)]),
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                ..
            } => {
                let l = self.lookup(env, expect_var(scrutinee))?;
                match heap.get(l) {
                    CcvCell::Skipped => Ok(vec![]),
                    CcvCell::Val(w) => {
                        let w = w.clone();
                        self.fold(
                            heap, &w, nil_case, head_param, acc_param, cons_case, env, costed,
                        )
                    }
                }
            }
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                ..
            } => {
                let l = self.lookup(env, expect_var(scrutinee))?;
                match heap.get(l) {
                    CcvCell::Skipped => Ok(vec![]),
                    CcvCell::Val(CcvVal::Nat(0)) => self.eval(heap, zero_case, env, costed),
                    CcvCell::Val(CcvVal::Nat(n)) => {
                        let n = *n;
                        let mut h1 = heap.clone();
                        let pl = h1.alloc(CcvCell::Val(CcvVal::Nat(n - 1)));
                        let mut env2 = env.clone();
                        env2.insert(pred_name.clone(), pl);
                        self.eval(h1, succ_case, &env2, costed)
                    }
                    CcvCell::Val(other) => Err(EvalError::Shape(format!(
                        "nat case on non-nat {:?}",
                        other
                    ))),
                }
            }
            Term::Ascribe { term, .. } => self.eval(heap, term, env, costed),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fold(
        &mut self,
        heap: CcvHeap,
        w: &CcvVal,
        nil_case: &Term,
        head_param: &str,
        acc_param: &str,
        cons_case: &Term,
        env: &CcvEnv,
        costed: bool,
    ) -> Result<Derivs, EvalError> {
        self.step()?;
        let tick = u64::from(costed);
        match w {
            CcvVal::Nil => {
                let mut out = Derivs::new();
                for (v, h, m) in self.eval(heap, nil_case, env, costed)? {
                    out.push((v, h, tick + m));
                }
                Ok(out)
            }
            CcvVal::Cons(hl, tl) => {
                let (hl, tl) = (*hl, *tl);
                let mut out = Derivs::new();
                // skip the recursive result
                {
                    let mut h1 = heap.clone();
                    let al = h1.alloc(CcvCell::Skipped);
                    let mut env2 = env.clone();
                    env2.insert(head_param.to_string(), hl);
                    env2.insert(acc_param.to_string(), al);
                    for (v, h2, m) in self.eval(h1, cons_case, &env2, costed)? {
                        out.push((v, h2, tick + m));
                    }
                }
                // or compute it, which needs the tail cell to hold a value
                if let CcvCell::Val(w2) = heap.get(tl) {
                    let w2 = w2.clone();
                    for (rv, mut h1, n) in self.fold(
                        heap.clone(),
                        &w2,
                        nil_case,
                        head_param,
                        acc_param,
                        cons_case,
                        env,
                        costed,
                    )? {
                        let al = h1.alloc(CcvCell::Val(rv));
                        let mut env2 = env.clone();
                        env2.insert(head_param.to_string(), hl);
                        env2.insert(acc_param.to_string(), al);
                        for (v, h2, m) in self.eval(h1.clone(), cons_case, &env2, costed)? {
                            out.push((v, h2, tick + n + m));
                        }
                    }
                }
                Ok(out)
            }
            other => Err(EvalError::Shape(format!("fold over non-list {:?}", other))),
        }
    }

    /// Reads a derivation's value back as an approximation value: skipped
    /// cells are undefined, value cells recurse. Lambdas read back as
    /// their translated closures so results are comparable with the
    /// denotational evaluator.
    fn read_back(&self, heap: &CcvHeap, v: &CcvVal) -> AValue {
        match v {
            CcvVal::Unit => AValue::Unit,
            CcvVal::Nat(n) => AValue::Nat(*n),
            CcvVal::Nil => AValue::Nil,
            CcvVal::Cons(hl, tl) => {
                AValue::Cons(self.read_back_loc(heap, *hl), self.read_back_loc(heap, *tl))
            }
            CcvVal::Clos { env, param, body, costed } => {
                let ir_body = translate_term(body, &self.ir.defs, !costed);
                let free = ir_body.free_vars();
                let mut cenv = Env::new();
                for (k, l) in env {
                    if free.contains(k) && k != param {
                        cenv.insert(k.clone(), self.read_back_loc(heap, *l));
                    }
                }
                AValue::Clos {
                    env: cenv,
                    param: param.clone(),
                    body: Box::new(ir_body),
                }
            }
            CcvVal::Def { name, pending } => {
                let arity = self.ir.def(name).map(|d| d.params.len()).unwrap_or(0);
                let mut term = eta_expand_def(name, arity);
                let mut cenv = Env::new();
                for l in pending {
                    match term {
                        IrTerm::MkLam { param, body } => {
                            cenv.insert(param, self.read_back_loc(heap, *l));
                            term = *body;
                        }
                        _ => unreachable!("eta expansion is a lambda chain"),
                    }
                }
                match term {
                    IrTerm::MkLam { param, body } => AValue::Clos { env: cenv, param, body },
                    _ => unreachable!("partial application leaves at least one lambda"),
                }
            }
        }
    }

    fn read_back_loc(&self, heap: &CcvHeap, l: usize) -> TVal {
        match heap.get(l) {
            CcvCell::Skipped => TVal::Undefined,
            CcvCell::Val(v) => TVal::thunk(self.read_back(heap, v)),
        }
    }
}

fn expect_var(t: &Term) -> &str {
    match t {
        Term::Var(x, _) => x,
        other => panic!("expected a variable (ANF invariant), found {:?}", other),
    }
}

fn peel_params(t: &Term) -> (Vec<String>, &Term) {
    let mut params = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Lam { param, body, .. } => {
                params.push(param.clone());
                cur = body;
            }
            Term::Ascribe { term, .. } => cur = term,
            _ => return (params, cur),
        }
    }
}

/// Collects every clairvoyant call-by-value derivation of the program's
/// main expression, with inputs preallocated as exact heap values.
pub fn eval_ccv(
    p: &AnfProgram,
    ir: &IrProgram,
    inputs: &BTreeMap<String, PureValue>,
    budget: &mut Budget,
) -> Result<Vec<Derivation>, EvalError> {
    let mut heap = CcvHeap::default();
    let mut env = CcvEnv::new();
    for (k, v) in inputs {
        let l = heap.alloc_pure(v);
        env.insert(k.clone(), l);
    }
    let derivs =
        Search { prog: p.program(), ir, budget }.eval(heap, &p.program().main, &env, true)?;
    Ok(derivs
        .into_iter()
        .map(|(value, heap, cost)| Derivation { value, heap, cost })
        .collect())
}

/// The derivations of [`eval_ccv`] read back as a deduplicated outcome
/// set, directly comparable with [`crate::eval::enumerate`].
pub fn ccv_outcome_set(
    p: &AnfProgram,
    ir: &IrProgram,
    inputs: &BTreeMap<String, PureValue>,
    budget: &mut Budget,
) -> Result<crate::eval::OutcomeSet, EvalError> {
    let derivs = eval_ccv(p, ir, inputs, budget)?;
    let search = Search { prog: p.program(), ir, budget };
    let mut out = crate::eval::OutcomeSet::new();
    for d in &derivs {
        let v = search.read_back(&d.heap, &d.value);
        out.insert(crate::value::Outcome::new(
            crate::value::EvalValue::Val(v),
            d.cost,
        ));
    }
    Ok(out)
}
