//! Surface syntax: types, terms, programs, and the ANF-restricted form.
//!
//! The source language is a simply typed lambda calculus with unit,
//! primitive naturals, lists, `let`, a structural `foldr` on lists and a
//! case analysis on naturals. Recursion is expressible only through
//! `foldr`; there is no general fixpoint.

use std::collections::BTreeSet;
use std::fmt;

/// Source position, 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Source-language types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Unit,
    Nat,
    List(Box<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn list(elem: Ty) -> Ty {
        Ty::List(Box::new(elem))
    }

    /// Number of leading arrows, i.e. the arity a definition of this type
    /// can be applied at.
    pub fn arity(&self) -> usize {
        match self {
            Ty::Arrow(_, cod) => 1 + cod.arity(),
            _ => 0,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Unit => write!(f, "unit"),
            Ty::Nat => write!(f, "nat"),
            Ty::List(t) => match **t {
                Ty::Arrow(..) | Ty::List(..) => write!(f, "list ({})", t),
                _ => write!(f, "list {}", t),
            },
            Ty::Arrow(a, b) => match **a {
                Ty::Arrow(..) => write!(f, "({}) -> {}", a, b),
                _ => write!(f, "{} -> {}", a, b),
            },
        }
    }
}

/// Terms of the source language. The same representation is used before
/// and after A-normalization; [`is_anf`] checks the ANF restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String, Span),
    /// Reference to a top-level definition.
    DefRef(String, Span),
    Lam {
        param: String,
        body: Box<Term>,
        span: Span,
    },
    App {
        func: Box<Term>,
        arg: Box<Term>,
        span: Span,
    },
    Let {
        name: String,
        bound: Box<Term>,
        body: Box<Term>,
        span: Span,
    },
    Nil(Span),
    Cons {
        head: Box<Term>,
        tail: Box<Term>,
        span: Span,
    },
    Foldr {
        scrutinee: Box<Term>,
        nil_case: Box<Term>,
        head_param: String,
        acc_param: String,
        cons_case: Box<Term>,
        span: Span,
    },
    Unit(Span),
    NatLit(u64, Span),
    NatCase {
        scrutinee: Box<Term>,
        zero_case: Box<Term>,
        pred_name: String,
        succ_case: Box<Term>,
        span: Span,
    },
    /// Type ascription `(e : ty)`; used to give un-annotated lambdas a type.
    Ascribe {
        term: Box<Term>,
        ty: Ty,
        span: Span,
    },
}

impl Term {
    pub fn span(&self) -> Span {
        match self {
            Term::Var(_, s)
            | Term::DefRef(_, s)
            | Term::Nil(s)
            | Term::Unit(s)
            | Term::NatLit(_, s) => *s,
            Term::Lam { span, .. }
            | Term::App { span, .. }
            | Term::Let { span, .. }
            | Term::Cons { span, .. }
            | Term::Foldr { span, .. }
            | Term::NatCase { span, .. }
            | Term::Ascribe { span, .. } => *span,
        }
    }

    /// Free (term) variables, not counting definition references.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x, _) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => {}
            Term::Lam { param, body, .. } => {
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App { func, arg, .. } => {
                func.collect_free(bound, out);
                arg.collect_free(bound, out);
            }
            Term::Let {
                name, bound: b, body, ..
            } => {
                b.collect_free(bound, out);
                bound.push(name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::Cons { head, tail, .. } => {
                head.collect_free(bound, out);
                tail.collect_free(bound, out);
            }
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                ..
            } => {
                scrutinee.collect_free(bound, out);
                nil_case.collect_free(bound, out);
                bound.push(head_param.clone());
                bound.push(acc_param.clone());
                cons_case.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                ..
            } => {
                scrutinee.collect_free(bound, out);
                zero_case.collect_free(bound, out);
                bound.push(pred_name.clone());
                succ_case.collect_free(bound, out);
                bound.pop();
            }
            Term::Ascribe { term, .. } => term.collect_free(bound, out),
        }
    }

    /// All identifiers occurring anywhere in the term (bound or free).
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x, _) => {
                out.insert(x.clone());
            }
            Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => {}
            Term::Lam { param, body, .. } => {
                out.insert(param.clone());
                body.all_names(out);
            }
            Term::App { func, arg, .. } => {
                func.all_names(out);
                arg.all_names(out);
            }
            Term::Let { name, bound, body, .. } => {
                out.insert(name.clone());
                bound.all_names(out);
                body.all_names(out);
            }
            Term::Cons { head, tail, .. } => {
                head.all_names(out);
                tail.all_names(out);
            }
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                ..
            } => {
                out.insert(head_param.clone());
                out.insert(acc_param.clone());
                scrutinee.all_names(out);
                nil_case.all_names(out);
                cons_case.all_names(out);
            }
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                ..
            } => {
                out.insert(pred_name.clone());
                scrutinee.all_names(out);
                zero_case.all_names(out);
                succ_case.all_names(out);
            }
            Term::Ascribe { term, .. } => term.all_names(out),
        }
    }
}

/// A top-level definition. Definitions carry a full type annotation and may
/// reference only earlier definitions (no recursion, no forward references).
#[derive(Debug, Clone, PartialEq)]
pub struct Def {
    pub name: String,
    pub ty: Ty,
    pub body: Term,
    /// `@nocost` marker: the translation of this definition carries no ticks.
    pub nocost: bool,
    pub span: Span,
}

/// A parsed program: definitions in declaration order plus a main expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub defs: Vec<Def>,
    pub main: Term,
}

impl Program {
    pub fn def(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == name)
    }
}

/// A program whose every term satisfies the ANF restrictions. Constructed
/// via [`crate::anf::to_anf_program`] or checked with [`AnfProgram::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnfProgram(Program);

impl AnfProgram {
    /// Wraps a program after checking the ANF invariants.
    pub fn new(p: Program) -> Result<AnfProgram, String> {
        for d in &p.defs {
            if let Err(e) = check_anf(&d.body) {
                return Err(format!("definition {}: {}", d.name, e));
            }
        }
        check_anf(&p.main)?;
        Ok(AnfProgram(p))
    }

    pub fn program(&self) -> &Program {
        &self.0
    }

    pub fn into_program(self) -> Program {
        self.0
    }
}

fn is_var(t: &Term) -> bool {
    matches!(t, Term::Var(..))
}

/// Checks the ANF discipline: application arguments, constructor fields and
/// case scrutinees are variables.
pub fn check_anf(t: &Term) -> Result<(), String> {
    match t {
        Term::Var(..) | Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => {
            Ok(())
        }
        Term::Lam { body, .. } => check_anf(body),
        Term::App { func, arg, .. } => {
            if !is_var(arg) {
                return Err(format!("application argument at {} is not a variable", arg.span()));
            }
            check_anf(func)
        }
        Term::Let { bound, body, .. } => {
            check_anf(bound)?;
            check_anf(body)
        }
        Term::Cons { head, tail, span } => {
            if !is_var(head) || !is_var(tail) {
                return Err(format!("constructor field at {} is not a variable", span));
            }
            Ok(())
        }
        Term::Foldr {
            scrutinee,
            nil_case,
            cons_case,
            span,
            ..
        } => {
            if !is_var(scrutinee) {
                return Err(format!("foldr scrutinee at {} is not a variable", span));
            }
            check_anf(nil_case)?;
            check_anf(cons_case)
        }
        Term::NatCase {
            scrutinee,
            zero_case,
            succ_case,
            span,
            ..
        } => {
            if !is_var(scrutinee) {
                return Err(format!("natcase scrutinee at {} is not a variable", span));
            }
            check_anf(zero_case)?;
            check_anf(succ_case)
        }
        // ascriptions are transparent type annotations
        Term::Ascribe { term, .. } => check_anf(term),
    }
}

/// Structural equality up to bound-variable renaming (spans ignored).
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
        let lookup = |x: &str, env: &[(String, String)], left: bool| -> Option<usize> {
            env.iter()
                .rposition(|(l, r)| if left { l == x } else { r == x })
        };
        match (a, b) {
            (Term::Var(x, _), Term::Var(y, _)) => {
                match (lookup(x, env, true), lookup(y, env, false)) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::DefRef(x, _), Term::DefRef(y, _)) => x == y,
            (Term::Nil(_), Term::Nil(_)) | (Term::Unit(_), Term::Unit(_)) => true,
            (Term::NatLit(n, _), Term::NatLit(m, _)) => n == m,
            (
                Term::Lam { param: p1, body: b1, .. },
                Term::Lam { param: p2, body: b2, .. },
            ) => {
                env.push((p1.clone(), p2.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            (
                Term::App { func: f1, arg: a1, .. },
                Term::App { func: f2, arg: a2, .. },
            ) => go(f1, f2, env) && go(a1, a2, env),
            (
                Term::Let { name: n1, bound: v1, body: b1, .. },
                Term::Let { name: n2, bound: v2, body: b2, .. },
            ) => {
                if !go(v1, v2, env) {
                    return false;
                }
                env.push((n1.clone(), n2.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            (
                Term::Cons { head: h1, tail: t1, .. },
                Term::Cons { head: h2, tail: t2, .. },
            ) => go(h1, h2, env) && go(t1, t2, env),
            (
                Term::Foldr {
                    scrutinee: s1,
                    nil_case: n1,
                    head_param: h1,
                    acc_param: a1,
                    cons_case: c1,
                    ..
                },
                Term::Foldr {
                    scrutinee: s2,
                    nil_case: n2,
                    head_param: h2,
                    acc_param: a2,
                    cons_case: c2,
                    ..
                },
            ) => {
                if !go(s1, s2, env) || !go(n1, n2, env) {
                    return false;
                }
                env.push((h1.clone(), h2.clone()));
                env.push((a1.clone(), a2.clone()));
                let r = go(c1, c2, env);
                env.pop();
                env.pop();
                r
            }
            (
                Term::NatCase {
                    scrutinee: s1,
                    zero_case: z1,
                    pred_name: p1,
                    succ_case: c1,
                    ..
                },
                Term::NatCase {
                    scrutinee: s2,
                    zero_case: z2,
                    pred_name: p2,
                    succ_case: c2,
                    ..
                },
            ) => {
                if !go(s1, s2, env) || !go(z1, z2, env) {
                    return false;
                }
                env.push((p1.clone(), p2.clone()));
                let r = go(c1, c2, env);
                env.pop();
                r
            }
            (Term::Ascribe { term: t1, ty: ty1, .. }, Term::Ascribe { term: t2, ty: ty2, .. }) => {
                ty1 == ty2 && go(t1, t2, env)
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Substitutes every `let`-binding away; used to state the ANF correctness
/// property (the normalized term, with lets inlined, is alpha-equivalent to
/// the input with its lets inlined).
pub fn inline_lets(t: &Term) -> Term {
    fn subst(t: &Term, x: &str, v: &Term) -> Term {
        match t {
            Term::Var(y, s) => {
                if y == x {
                    v.clone()
                } else {
                    Term::Var(y.clone(), *s)
                }
            }
            Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => t.clone(),
            Term::Lam { param, body, span } => {
                if param == x {
                    t.clone()
                } else {
                    Term::Lam {
                        param: param.clone(),
                        body: Box::new(subst(body, x, v)),
                        span: *span,
                    }
                }
            }
            Term::App { func, arg, span } => Term::App {
                func: Box::new(subst(func, x, v)),
                arg: Box::new(subst(arg, x, v)),
                span: *span,
            },
            Term::Let { name, bound, body, span } => Term::Let {
                name: name.clone(),
                bound: Box::new(subst(bound, x, v)),
                body: if name == x {
                    body.clone()
                } else {
                    Box::new(subst(body, x, v))
                },
                span: *span,
            },
            Term::Cons { head, tail, span } => Term::Cons {
                head: Box::new(subst(head, x, v)),
                tail: Box::new(subst(tail, x, v)),
                span: *span,
            },
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                span,
            } => Term::Foldr {
                scrutinee: Box::new(subst(scrutinee, x, v)),
                nil_case: Box::new(subst(nil_case, x, v)),
                head_param: head_param.clone(),
                acc_param: acc_param.clone(),
                cons_case: if head_param == x || acc_param == x {
                    cons_case.clone()
                } else {
                    Box::new(subst(cons_case, x, v))
                },
                span: *span,
            },
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                span,
            } => Term::NatCase {
                scrutinee: Box::new(subst(scrutinee, x, v)),
                zero_case: Box::new(subst(zero_case, x, v)),
                pred_name: pred_name.clone(),
                succ_case: if pred_name == x {
                    succ_case.clone()
                } else {
                    Box::new(subst(succ_case, x, v))
                },
                span: *span,
            },
            Term::Ascribe { term, ty, span } => Term::Ascribe {
                term: Box::new(subst(term, x, v)),
                ty: ty.clone(),
                span: *span,
            },
        }
    }

    match t {
        Term::Let { name, bound, body, .. } => {
            let b = inline_lets(bound);
            let body = inline_lets(body);
            subst(&body, name, &b)
        }
        Term::Var(..) | Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => {
            t.clone()
        }
        Term::Lam { param, body, span } => Term::Lam {
            param: param.clone(),
            body: Box::new(inline_lets(body)),
            span: *span,
        },
        Term::App { func, arg, span } => Term::App {
            func: Box::new(inline_lets(func)),
            arg: Box::new(inline_lets(arg)),
            span: *span,
        },
        Term::Cons { head, tail, span } => Term::Cons {
            head: Box::new(inline_lets(head)),
            tail: Box::new(inline_lets(tail)),
            span: *span,
        },
        Term::Foldr {
            scrutinee,
            nil_case,
            head_param,
            acc_param,
            cons_case,
            span,
        } => Term::Foldr {
            scrutinee: Box::new(inline_lets(scrutinee)),
            nil_case: Box::new(inline_lets(nil_case)),
            head_param: head_param.clone(),
            acc_param: acc_param.clone(),
            cons_case: Box::new(inline_lets(cons_case)),
            span: *span,
        },
        Term::NatCase {
            scrutinee,
            zero_case,
            pred_name,
            succ_case,
            span,
        } => Term::NatCase {
            scrutinee: Box::new(inline_lets(scrutinee)),
            zero_case: Box::new(inline_lets(zero_case)),
            pred_name: pred_name.clone(),
            succ_case: Box::new(inline_lets(succ_case)),
            span: *span,
        },
        Term::Ascribe { term, ty, span } => Term::Ascribe {
            term: Box::new(inline_lets(term)),
            ty: ty.clone(),
            span: *span,
        },
    }
}

/// Pretty-prints a term in the surface syntax. `parse(pretty(t))` is
/// alpha-equivalent to `t`.
pub fn pretty(t: &Term) -> String {
    let mut s = String::new();
    pp(t, 0, &mut s);
    s
}

fn atomic(t: &Term) -> bool {
    matches!(
        t,
        Term::Var(..) | Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..)
    )
}

fn pp_atom(t: &Term, out: &mut String) {
    if atomic(t) {
        pp(t, 0, out);
    } else {
        out.push('(');
        pp(t, 0, out);
        out.push(')');
    }
}

fn pp(t: &Term, _depth: usize, out: &mut String) {
    match t {
        Term::Var(x, _) | Term::DefRef(x, _) => out.push_str(x),
        Term::Nil(_) => out.push_str("nil"),
        Term::Unit(_) => out.push_str("unit"),
        Term::NatLit(n, _) => out.push_str(&n.to_string()),
        Term::Lam { param, body, .. } => {
            out.push_str("fun ");
            out.push_str(param);
            out.push_str(". ");
            pp(body, 0, out);
        }
        Term::App { func, arg, .. } => {
            // Application chains print left-flat: f x y.
            match &**func {
                Term::App { .. } => pp(func, 0, out),
                _ => pp_atom(func, out),
            }
            out.push(' ');
            pp_atom(arg, out);
        }
        Term::Let { name, bound, body, .. } => {
            out.push_str("let ");
            out.push_str(name);
            out.push_str(" = ");
            pp(bound, 0, out);
            out.push_str(" in ");
            pp(body, 0, out);
        }
        Term::Cons { head, tail, .. } => {
            out.push_str("cons ");
            pp_atom(head, out);
            out.push(' ');
            pp_atom(tail, out);
        }
        Term::Foldr {
            scrutinee,
            nil_case,
            head_param,
            acc_param,
            cons_case,
            ..
        } => {
            out.push_str("foldr ");
            pp_atom(scrutinee, out);
            out.push_str(" { nil => ");
            pp(nil_case, 0, out);
            out.push_str(" | cons ");
            out.push_str(head_param);
            out.push(' ');
            out.push_str(acc_param);
            out.push_str(" => ");
            pp(cons_case, 0, out);
            out.push_str(" }");
        }
        Term::NatCase {
            scrutinee,
            zero_case,
            pred_name,
            succ_case,
            ..
        } => {
            out.push_str("natcase ");
            pp_atom(scrutinee, out);
            out.push_str(" { zero => ");
            pp(zero_case, 0, out);
            out.push_str(" | succ ");
            out.push_str(pred_name);
            out.push_str(" => ");
            pp(succ_case, 0, out);
            out.push_str(" }");
        }
        Term::Ascribe { term, ty, .. } => {
            out.push('(');
            pp(term, 0, out);
            out.push_str(" : ");
            out.push_str(&ty.to_string());
            out.push(')');
        }
    }
}

/// Pretty-prints a whole program.
pub fn pretty_program(p: &Program) -> String {
    let mut s = String::new();
    for d in &p.defs {
        s.push_str(&d.name);
        s.push_str(" : ");
        s.push_str(&d.ty.to_string());
        s.push_str(" = ");
        s.push_str(&pretty(&d.body));
        if d.nocost {
            s.push_str(" @nocost");
        }
        s.push('\n');
    }
    s.push_str("main = ");
    s.push_str(&pretty(&p.main));
    s.push('\n');
    s
}
