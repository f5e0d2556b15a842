//! Bidirectional type checking for the surface language.
//!
//! Top-level definitions carry full annotations and are checked against
//! them; there is no polymorphism. Un-annotated lambdas in inference
//! position are an error (ascribe them with `(e : ty)`).

use crate::syntax::{Program, Span, Term, Ty};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("type error at {span}: {msg}")]
pub struct TypeError {
    pub span: Span,
    pub msg: String,
}

fn err<T>(span: Span, msg: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError { span, msg: msg.into() })
}

struct Checker<'a> {
    defs: BTreeMap<String, Ty>,
    locals: Vec<(String, Ty)>,
    context: &'a BTreeMap<String, Ty>,
}

impl<'a> Checker<'a> {
    fn lookup(&self, x: &str) -> Option<&Ty> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t)
            .or_else(|| self.context.get(x))
    }

    fn synth(&mut self, t: &Term) -> Result<Ty, TypeError> {
        match t {
            Term::Var(x, s) => match self.lookup(x) {
                Some(ty) => Ok(ty.clone()),
                None => err(*s, format!("unbound variable `{}`", x)),
            },
            Term::DefRef(x, s) => match self.defs.get(x) {
                Some(ty) => Ok(ty.clone()),
                None => err(*s, format!("unknown definition `{}`", x)),
            },
            Term::Unit(_) => Ok(Ty::Unit),
            Term::NatLit(..) => Ok(Ty::Nat),
            Term::Nil(s) => err(
                *s,
                "cannot infer the element type of `nil`; ascribe it, e.g. (nil : list nat)",
            ),
            Term::Lam { span, .. } => err(
                *span,
                "cannot infer the type of an un-annotated lambda; ascribe it, e.g. (fun x. x : nat -> nat)",
            ),
            Term::App { func, arg, span } => {
                let fty = self.synth(func)?;
                match fty {
                    Ty::Arrow(dom, cod) => {
                        self.check(arg, &dom)?;
                        Ok(*cod)
                    }
                    other => err(*span, format!("applied a non-function of type {}", other)),
                }
            }
            Term::Let { name, bound, body, .. } => {
                let bty = self.synth(bound)?;
                self.locals.push((name.clone(), bty));
                let r = self.synth(body);
                self.locals.pop();
                r
            }
            Term::Cons { head, tail, .. } => {
                let hty = self.synth(head)?;
                let lty = Ty::list(hty);
                self.check(tail, &lty)?;
                Ok(lty)
            }
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                span,
            } => {
                let sty = self.synth(scrutinee)?;
                let elem = match sty {
                    Ty::List(e) => *e,
                    other => {
                        return err(*span, format!("foldr scrutinee has type {}, expected a list", other))
                    }
                };
                let result = self.synth(nil_case)?;
                self.locals.push((head_param.clone(), elem));
                self.locals.push((acc_param.clone(), result.clone()));
                let r = self.check(cons_case, &result);
                self.locals.pop();
                self.locals.pop();
                r?;
                Ok(result)
            }
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                ..
            } => {
                self.check(scrutinee, &Ty::Nat)?;
                let result = self.synth(zero_case)?;
                self.locals.push((pred_name.clone(), Ty::Nat));
                let r = self.check(succ_case, &result);
                self.locals.pop();
                r?;
                Ok(result)
            }
            Term::Ascribe { term, ty, .. } => {
                self.check(term, ty)?;
                Ok(ty.clone())
            }
        }
    }

    fn check(&mut self, t: &Term, want: &Ty) -> Result<(), TypeError> {
        match (t, want) {
            (Term::Lam { param, body, span }, ty) => match ty {
                Ty::Arrow(dom, cod) => {
                    self.locals.push((param.clone(), (**dom).clone()));
                    let r = self.check(body, cod);
                    self.locals.pop();
                    r
                }
                other => err(*span, format!("lambda checked against non-function type {}", other)),
            },
            (Term::Nil(s), ty) => match ty {
                Ty::List(_) => Ok(()),
                other => err(*s, format!("nil checked against non-list type {}", other)),
            },
            (Term::Cons { head, tail, span }, ty) => match ty {
                Ty::List(elem) => {
                    self.check(head, elem)?;
                    self.check(tail, ty)
                        .map_err(|e| TypeError { span: *span, msg: e.msg })
                }
                other => err(*span, format!("cons checked against non-list type {}", other)),
            },
            (Term::Let { name, bound, body, .. }, ty) => {
                let bty = self.synth(bound)?;
                self.locals.push((name.clone(), bty));
                let r = self.check(body, ty);
                self.locals.pop();
                r
            }
            (
                Term::Foldr {
                    scrutinee,
                    nil_case,
                    head_param,
                    acc_param,
                    cons_case,
                    span,
                },
                ty,
            ) => {
                let sty = self.synth(scrutinee)?;
                let elem = match sty {
                    Ty::List(e) => *e,
                    other => {
                        return err(*span, format!("foldr scrutinee has type {}, expected a list", other))
                    }
                };
                self.check(nil_case, ty)?;
                self.locals.push((head_param.clone(), elem));
                self.locals.push((acc_param.clone(), ty.clone()));
                let r = self.check(cons_case, ty);
                self.locals.pop();
                self.locals.pop();
                r
            }
            (
                Term::NatCase {
                    scrutinee,
                    zero_case,
                    pred_name,
                    succ_case,
                    ..
                },
                ty,
            ) => {
                self.check(scrutinee, &Ty::Nat)?;
                self.check(zero_case, ty)?;
                self.locals.push((pred_name.clone(), Ty::Nat));
                let r = self.check(succ_case, ty);
                self.locals.pop();
                r
            }
            (other, ty) => {
                let got = self.synth(other)?;
                if got == *ty {
                    Ok(())
                } else {
                    err(
                        other.span(),
                        format!("type mismatch: expected {}, found {}", ty, got),
                    )
                }
            }
        }
    }
}

/// Type-checks a closed program. Returns the type of every definition plus
/// an entry for `"main"` (which cannot collide: `main` is a keyword).
pub fn typecheck(p: &Program) -> Result<BTreeMap<String, Ty>, TypeError> {
    typecheck_with_context(p, &BTreeMap::new())
}

/// Type-checks a program whose main expression (and definition bodies) may
/// reference the given ambient variables; used for corpus programs whose
/// inputs are supplied through the evaluation environment.
pub fn typecheck_with_context(
    p: &Program,
    context: &BTreeMap<String, Ty>,
) -> Result<BTreeMap<String, Ty>, TypeError> {
    let mut out = BTreeMap::new();
    let mut ck = Checker { defs: BTreeMap::new(), locals: Vec::new(), context };
    for d in &p.defs {
        ck.check(&d.body, &d.ty)?;
        ck.defs.insert(d.name.clone(), d.ty.clone());
        out.insert(d.name.clone(), d.ty.clone());
    }
    let main_ty = ck.synth(&p.main)?;
    out.insert("main".to_string(), main_ty);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn append_gets_its_annotated_type() {
        let src = "append : list nat -> list nat -> list nat = fun xs ys. foldr xs { nil => ys | cons h t => cons h t }\nmain = append nil nil";
        let p = parse(src).unwrap();
        let tys = typecheck(&p).unwrap();
        assert_eq!(
            tys["append"],
            Ty::arrow(Ty::list(Ty::Nat), Ty::arrow(Ty::list(Ty::Nat), Ty::list(Ty::Nat)))
        );
        assert_eq!(tys["main"], Ty::list(Ty::Nat));
    }

    #[test]
    fn fold_case_type_mismatch_is_rejected() {
        // nil case : nat but cons case produces a list
        let src = "main = foldr (cons 1 nil) { nil => 0 | cons h t => cons h nil }";
        let p = parse(src).unwrap();
        let e = typecheck(&p).unwrap_err();
        assert!(e.msg.contains("mismatch") || e.msg.contains("non-list"), "{}", e);
    }

    #[test]
    fn ascribed_identity_lambda() {
        let p = parse("main = (fun x. x : nat -> nat)").unwrap();
        let tys = typecheck(&p).unwrap();
        assert_eq!(tys["main"], Ty::arrow(Ty::Nat, Ty::Nat));
    }

    #[test]
    fn unannotated_lambda_cannot_be_inferred() {
        let p = parse("main = let f = fun x. x in f 3").unwrap();
        let e = typecheck(&p).unwrap_err();
        assert!(e.msg.contains("un-annotated lambda"), "{}", e);
    }

    #[test]
    fn unbound_variable_reported() {
        let p = parse("main = zs").unwrap();
        let e = typecheck(&p).unwrap_err();
        assert!(e.msg.contains("unbound"), "{}", e);
    }

    #[test]
    fn context_variables_are_visible() {
        let p = parse("main = cons 1 xs").unwrap();
        assert!(typecheck(&p).is_err());
        let mut ctx = BTreeMap::new();
        ctx.insert("xs".to_string(), Ty::list(Ty::Nat));
        let tys = typecheck_with_context(&p, &ctx).unwrap();
        assert_eq!(tys["main"], Ty::list(Ty::Nat));
    }
}
