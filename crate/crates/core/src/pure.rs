//! A plain strict interpreter for the source language, used as the
//! reference for functional correctness: every clairvoyant outcome must
//! approximate the pure result.

use crate::syntax::{Program, Term};
use crate::value::PureValue;
use std::collections::BTreeMap;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PureError {
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("unknown definition `{0}`")]
    UnknownDef(String),
    #[error("pure evaluation shape violation: {0}")]
    Shape(String),
    #[error("main evaluated to a function, not a first-order value")]
    HigherOrderResult,
}

#[derive(Debug, Clone)]
enum PV {
    Unit,
    Nat(u64),
    Nil,
    Cons(Rc<PV>, Rc<PV>),
    Clos {
        env: PureEnv,
        param: String,
        body: Rc<Term>,
    },
}

type PureEnv = BTreeMap<String, Rc<PV>>;

fn to_pure(v: &PV) -> Result<PureValue, PureError> {
    match v {
        PV::Unit => Ok(PureValue::Unit),
        PV::Nat(n) => Ok(PureValue::Nat(*n)),
        PV::Nil => Ok(PureValue::Nil),
        PV::Cons(h, t) => Ok(PureValue::Cons(
            Box::new(to_pure(h)?),
            Box::new(to_pure(t)?),
        )),
        PV::Clos { .. } => Err(PureError::HigherOrderResult),
    }
}

fn from_pure(p: &PureValue) -> PV {
    match p {
        PureValue::Unit => PV::Unit,
        PureValue::Nat(n) => PV::Nat(*n),
        PureValue::Nil => PV::Nil,
        PureValue::Cons(h, t) => PV::Cons(Rc::new(from_pure(h)), Rc::new(from_pure(t))),
    }
}

struct PureEval<'a> {
    prog: &'a Program,
}

impl<'a> PureEval<'a> {
    fn eval(&self, t: &Term, env: &PureEnv) -> Result<Rc<PV>, PureError> {
        match t {
            Term::Var(x, _) => env
                .get(x)
                .cloned()
                .ok_or_else(|| PureError::UnboundVar(x.clone())),
            Term::DefRef(f, _) => {
                let def = self
                    .prog
                    .def(f)
                    .ok_or_else(|| PureError::UnknownDef(f.clone()))?;
                self.eval(&def.body, &PureEnv::new())
            }
            Term::Lam { param, body, .. } => Ok(Rc::new(PV::Clos {
                env: env.clone(),
                param: param.clone(),
                body: Rc::new((**body).clone()),
            })),
            Term::App { func, arg, .. } => {
                let f = self.eval(func, env)?;
                let a = self.eval(arg, env)?;
                match &*f {
                    PV::Clos { env: cenv, param, body } => {
                        let mut env2 = cenv.clone();
                        env2.insert(param.clone(), a);
                        self.eval(body, &env2)
                    }
                    _ => Err(PureError::Shape("application of a non-function".into())),
                }
            }
            Term::Let { name, bound, body, .. } => {
                let b = self.eval(bound, env)?;
                let mut env2 = env.clone();
                env2.insert(name.clone(), b);
                self.eval(body, &env2)
            }
            Term::Nil(_) => Ok(Rc::new(PV::Nil)),
            Term::Cons { head, tail, .. } => {
                let h = self.eval(head, env)?;
                let t = self.eval(tail, env)?;
                Ok(Rc::new(PV::Cons(h, t)))
            }
            Term::Unit(_) => Ok(Rc::new(PV::Unit)),
            Term::NatLit(n, _) => Ok(Rc::new(PV::Nat(*n))),
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                ..
            } => {
                let xs = self.eval(scrutinee, env)?;
                self.fold(&xs, nil_case, head_param, acc_param, cons_case, env)
            }
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                ..
            } => {
                let n = self.eval(scrutinee, env)?;
                match &*n {
                    PV::Nat(0) => self.eval(zero_case, env),
                    PV::Nat(k) => {
                        let mut env2 = env.clone();
                        env2.insert(pred_name.clone(), Rc::new(PV::Nat(k - 1)));
                        self.eval(succ_case, &env2)
                    }
                    _ => Err(PureError::Shape("natcase on a non-natural".into())),
                }
            }
            Term::Ascribe { term, .. } => self.eval(term, env),
        }
    }

    fn fold(
        &self,
        xs: &Rc<PV>,
        nil_case: &Term,
        head_param: &str,
        acc_param: &str,
        cons_case: &Term,
        env: &PureEnv,
    ) -> Result<Rc<PV>, PureError> {
        match &**xs {
            PV::Nil => self.eval(nil_case, env),
            PV::Cons(h, t) => {
                let rec = self.fold(t, nil_case, head_param, acc_param, cons_case, env)?;
                let mut env2 = env.clone();
                env2.insert(head_param.to_string(), h.clone());
                env2.insert(acc_param.to_string(), rec);
                self.eval(cons_case, &env2)
            }
            _ => Err(PureError::Shape("foldr over a non-list".into())),
        }
    }
}

/// Evaluates a program's main expression; ambient inputs are supplied as
/// pure values.
pub fn eval_program(
    p: &Program,
    inputs: &BTreeMap<String, PureValue>,
) -> Result<PureValue, PureError> {
    let env: PureEnv = inputs
        .iter()
        .map(|(k, v)| (k.clone(), Rc::new(from_pure(v))))
        .collect();
    let v = PureEval { prog: p }.eval(&p.main, &env)?;
    to_pure(&v)
}

/// Evaluates a single paramless definition to a pure value.
pub fn eval_def(p: &Program, name: &str) -> Result<PureValue, PureError> {
    let def = p
        .def(name)
        .ok_or_else(|| PureError::UnknownDef(name.to_string()))?;
    let v = PureEval { prog: p }.eval(&def.body, &PureEnv::new())?;
    to_pure(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn append_via_fold() {
        let src = "append : list nat -> list nat -> list nat = fun xs ys. foldr xs { nil => ys | cons h t => cons h t }\nmain = append (cons 1 (cons 2 nil)) (cons 3 nil)";
        let p = parse(src).unwrap();
        let v = eval_program(&p, &BTreeMap::new()).unwrap();
        assert_eq!(v, PureValue::list(&[1, 2, 3]));
    }

    #[test]
    fn natcase_and_inputs() {
        let p = parse("main = natcase n { zero => nil | succ m => cons m xs }").unwrap();
        let mut inputs = BTreeMap::new();
        inputs.insert("n".to_string(), PureValue::Nat(3));
        inputs.insert("xs".to_string(), PureValue::list(&[9]));
        let v = eval_program(&p, &inputs).unwrap();
        assert_eq!(v, PureValue::list(&[2, 9]));
    }
}
