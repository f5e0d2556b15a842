//! A-normalization: names every application argument, constructor field
//! and case scrutinee with a `let`, so that the monadic translation only
//! has to handle thunks at `let` and `foldr`.
//!
//! Fresh names are counter-suffixed (`t0`, `t1`, ...), deterministic per
//! compilation, and chosen to avoid every identifier occurring in the
//! input, so golden files are stable.

use crate::syntax::{AnfProgram, Program, Term};
use std::collections::BTreeSet;

struct Fresh {
    used: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    fn name(&mut self) -> String {
        loop {
            let candidate = format!("t{}", self.next);
            self.next += 1;
            if !self.used.contains(&candidate) {
                self.used.insert(candidate.clone());
                return candidate;
            }
        }
    }
}

/// Normalizes one term. Total: every type-correct term has an ANF form.
pub fn to_anf(t: &Term) -> Term {
    let mut used = BTreeSet::new();
    t.all_names(&mut used);
    let mut fresh = Fresh { used, next: 0 };
    norm(t, &mut fresh)
}

/// Normalizes every definition body and the main expression.
pub fn to_anf_program(p: &Program) -> AnfProgram {
    let mut q = p.clone();
    for d in &mut q.defs {
        d.body = to_anf(&d.body);
    }
    q.main = to_anf(&q.main);
    AnfProgram::new(q).expect("normalization produces ANF")
}

fn norm(t: &Term, fresh: &mut Fresh) -> Term {
    match t {
        Term::Var(..) | Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => {
            t.clone()
        }
        Term::Lam { param, body, span } => Term::Lam {
            param: param.clone(),
            body: Box::new(norm(body, fresh)),
            span: *span,
        },
        Term::App { func, arg, span } => {
            let f = norm(func, fresh);
            let mut binds = Vec::new();
            let v = atomize(arg, fresh, &mut binds);
            wrap_lets(
                binds,
                Term::App { func: Box::new(f), arg: Box::new(v), span: *span },
            )
        }
        Term::Let { name, bound, body, span } => Term::Let {
            name: name.clone(),
            bound: Box::new(norm(bound, fresh)),
            body: Box::new(norm(body, fresh)),
            span: *span,
        },
        Term::Cons { head, tail, span } => {
            let mut binds = Vec::new();
            let h = atomize(head, fresh, &mut binds);
            let t = atomize(tail, fresh, &mut binds);
            wrap_lets(
                binds,
                Term::Cons { head: Box::new(h), tail: Box::new(t), span: *span },
            )
        }
        Term::Foldr {
            scrutinee,
            nil_case,
            head_param,
            acc_param,
            cons_case,
            span,
        } => {
            let nil_case = norm(nil_case, fresh);
            let cons_case = norm(cons_case, fresh);
            let mut binds = Vec::new();
            let s = atomize(scrutinee, fresh, &mut binds);
            wrap_lets(
                binds,
                Term::Foldr {
                    scrutinee: Box::new(s),
                    nil_case: Box::new(nil_case),
                    head_param: head_param.clone(),
                    acc_param: acc_param.clone(),
                    cons_case: Box::new(cons_case),
                    span: *span,
                },
            )
        }
        Term::NatCase {
            scrutinee,
            zero_case,
            pred_name,
            succ_case,
            span,
        } => {
            let zero_case = norm(zero_case, fresh);
            let succ_case = norm(succ_case, fresh);
            let mut binds = Vec::new();
            let s = atomize(scrutinee, fresh, &mut binds);
            wrap_lets(
                binds,
                Term::NatCase {
                    scrutinee: Box::new(s),
                    zero_case: Box::new(zero_case),
                    pred_name: pred_name.clone(),
                    succ_case: Box::new(succ_case),
                    span: *span,
                },
            )
        }
        Term::Ascribe { term, ty, span } => Term::Ascribe {
            term: Box::new(norm(term, fresh)),
            ty: ty.clone(),
            span: *span,
        },
    }
}

/// Ensures a subterm is a variable, collecting a binding when it is not.
fn atomize(t: &Term, fresh: &mut Fresh, binds: &mut Vec<(String, Term)>) -> Term {
    if let Term::Var(..) = t {
        return t.clone();
    }
    let name = fresh.name();
    let span = t.span();
    let bound = norm(t, fresh);
    binds.push((name.clone(), bound));
    Term::Var(name, span)
}

fn wrap_lets(binds: Vec<(String, Term)>, body: Term) -> Term {
    let mut out = body;
    for (name, bound) in binds.into_iter().rev() {
        let span = bound.span();
        out = Term::Let {
            name,
            bound: Box::new(bound),
            body: Box::new(out),
            span,
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::syntax::{alpha_eq, check_anf, inline_lets, pretty};

    fn main_of(src: &str) -> Term {
        parse(src).unwrap().main
    }

    #[test]
    fn nested_application_is_sequentialized() {
        // f (g x) becomes let t = g x in f t
        let t = main_of("main = f (g x)");
        let a = to_anf(&t);
        check_anf(&a).unwrap();
        match &a {
            Term::Let { name, bound, body, .. } => {
                assert!(matches!(&**bound, Term::App { .. }));
                match &**body {
                    Term::App { arg, .. } => {
                        assert!(matches!(&**arg, Term::Var(v, _) if v == name))
                    }
                    other => panic!("expected application, got {:?}", other),
                }
            }
            other => panic!("expected let, got {:?}", other),
        }
    }

    #[test]
    fn constructor_fields_become_variables() {
        let t = main_of("main = cons 1 nil");
        let a = to_anf(&t);
        check_anf(&a).unwrap();
        assert_eq!(pretty(&a), "let t0 = 1 in let t1 = nil in cons t0 t1");
    }

    #[test]
    fn idempotent_up_to_alpha() {
        for src in [
            "main = f (g x)",
            "main = cons 1 (cons 2 nil)",
            "main = foldr (cons 1 nil) { nil => nil | cons h t => cons h t }",
            "main = natcase 3 { zero => nil | succ m => cons m nil }",
        ] {
            let t = main_of(src);
            let once = to_anf(&t);
            let twice = to_anf(&once);
            assert!(alpha_eq(&once, &twice), "not idempotent on {}", src);
        }
    }

    #[test]
    fn let_inlining_recovers_the_original() {
        for src in [
            "main = f (g x)",
            "main = cons 1 (cons 2 nil)",
            "main = let y = f x in cons y nil",
        ] {
            let t = main_of(src);
            let a = to_anf(&t);
            assert!(
                alpha_eq(&inline_lets(&a), &inline_lets(&t)),
                "inlining mismatch on {}",
                src
            );
        }
    }

    #[test]
    fn fresh_names_avoid_user_names() {
        let t = main_of("main = let t0 = 1 in cons t0 (cons 2 nil)");
        let a = to_anf(&t);
        check_anf(&a).unwrap();
        // the generated binder for `2` must not collide with user t0
        let mut names = BTreeSet::new();
        a.all_names(&mut names);
        assert!(names.contains("t1") || names.contains("t2"));
    }
}
