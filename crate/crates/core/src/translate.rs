//! The monadic translation into [`IrTerm`], and the tick-floating
//! simplification.
//!
//! Every non-value construct contributes exactly one tick:
//!
//! ```text
//! [[ let x = t in u ]] = tick >> let~ x := [[t]] in [[u]]
//! [[ x ]]              = tick >> force x
//! [[ fun x. t ]]       = ret (fun x => [[t]])
//! [[ t x ]]            = tick >> let! f := [[t]] in f x
//! [[ nil ]]            = ret NilA
//! [[ cons x y ]]       = ret (ConsA x y)
//! [[ foldr ... x ]]    = foldrA [[nil case]] (fun y1 y2 => [[cons case]]) x
//! ```
//!
//! `natcase` charges no tick of its own (naturals are unlifted), and the
//! fold ticks once per unfolding inside its own semantics. Definitions
//! marked `@nocost` translate with no ticks anywhere in their body.
//!
//! Simplified mode floats ticks upward — `bind t (fun x => tick >> k x)`
//! commutes to `tick >> bind t k`, and `thunk (tick >> u)` is bounded by
//! `tick >> thunk u` — and then collapses each run of consecutive ticks
//! into one, recording the longest run collapsed.

use crate::ir::{
    eta_expand_def, ApproxTy, Comp, IrDef, IrProgram, IrTerm, IrValue, Thunked,
};
use crate::syntax::{AnfProgram, Term, Ty};

/// Whether translated programs keep the verbatim per-construct ticks or
/// the floated, collapsed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TickMode {
    Full,
    #[default]
    Simplified,
}

impl std::str::FromStr for TickMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(TickMode::Full),
            "simplified" => Ok(TickMode::Simplified),
            other => Err(format!("unknown tick mode `{}` (expected full|simplified)", other)),
        }
    }
}

/// The type translation: function arguments go under `T`, results under
/// `M`, and list fields are thunked inside the list approximation type.
/// Naturals stay primitive.
pub fn translate_type(t: &Ty) -> ApproxTy {
    match t {
        Ty::Unit => ApproxTy::UnitA,
        Ty::Nat => ApproxTy::NatA,
        Ty::List(e) => ApproxTy::ListA(Box::new(translate_type(e))),
        Ty::Arrow(a, b) => ApproxTy::ArrowA(
            Box::new(Thunked(translate_type(a))),
            Box::new(Comp(translate_type(b))),
        ),
    }
}

struct Lower<'a> {
    done: &'a [IrDef],
    fresh: usize,
    nocost: bool,
}

impl<'a> Lower<'a> {
    fn fresh_fn(&mut self) -> String {
        let n = self.fresh;
        self.fresh += 1;
        format!("%f{}", n)
    }

    fn tick_then(&self, rest: IrTerm) -> IrTerm {
        if self.nocost {
            rest
        } else {
            IrTerm::tick_then(rest)
        }
    }

    fn lower(&mut self, t: &Term) -> IrTerm {
        match t {
            Term::Var(x, _) => self.tick_then(IrTerm::force_var(x)),
            Term::DefRef(f, _) => {
                let def = self
                    .done
                    .iter()
                    .find(|d| d.name == *f)
                    .expect("definitions are translated in declaration order");
                if def.params.is_empty() {
                    // A value definition denotes its computation; references
                    // re-run it (no sharing across references).
                    def.body.clone()
                } else {
                    eta_expand_def(f, def.params.len())
                }
            }
            Term::Lam { param, body, .. } => IrTerm::mk_lam(param.clone(), self.lower(body)),
            Term::App { func, arg, .. } => {
                let arg_var = match &**arg {
                    Term::Var(x, _) => x.clone(),
                    other => panic!("non-variable application argument {:?} (not ANF)", other),
                };
                let lowered = self.lower(func);
                let f = self.fresh_fn();
                let call = IrTerm::CallLam { fn_var: f.clone(), arg_var };
                self.tick_then(IrTerm::bind(lowered, f, call))
            }
            Term::Let { name, bound, body, .. } => {
                let b = self.lower(bound);
                let rest = self.lower(body);
                self.tick_then(IrTerm::let_thunk(name.clone(), b, rest))
            }
            Term::Nil(_) => IrTerm::MkNil,
            Term::Cons { head, tail, .. } => {
                let h = expect_var(head);
                let t = expect_var(tail);
                IrTerm::mk_cons(h, t)
            }
            Term::Unit(_) => IrTerm::ret_unit(),
            Term::NatLit(n, _) => IrTerm::ret_nat(*n),
            Term::Foldr {
                scrutinee,
                nil_case,
                head_param,
                acc_param,
                cons_case,
                ..
            } => IrTerm::Foldr {
                nil_case: Box::new(self.lower(nil_case)),
                head_param: head_param.clone(),
                acc_param: acc_param.clone(),
                cons_case: Box::new(self.lower(cons_case)),
                scrut_var: expect_var(scrutinee),
                costed: !self.nocost,
            },
            Term::NatCase {
                scrutinee,
                zero_case,
                pred_name,
                succ_case,
                ..
            } => IrTerm::NatCase {
                scrut_var: expect_var(scrutinee),
                zero_branch: Box::new(self.lower(zero_case)),
                pred_name: pred_name.clone(),
                succ_branch: Box::new(self.lower(succ_case)),
            },
            Term::Ascribe { term, .. } => self.lower(term),
        }
    }

}

fn expect_var(t: &Term) -> String {
    match t {
        Term::Var(x, _) => x.clone(),
        other => panic!("expected a variable (ANF invariant), found {:?}", other),
    }
}

/// Translates a single term with full ticks against already-lowered
/// definitions.
pub fn translate_term(t: &Term, done: &[IrDef], nocost: bool) -> IrTerm {
    let mut lw = Lower { done, fresh: 0, nocost };
    lw.lower(t)
}

/// Splits leading lambdas off a definition body: those become the
/// definition's thunk parameters (top-level functions are values, so the
/// outer `M` is dropped).
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

/// Translates a type-checked ANF program.
pub fn translate_program(p: &AnfProgram, mode: TickMode) -> IrProgram {
    let prog = p.program();
    let mut defs: Vec<IrDef> = Vec::new();
    for d in &prog.defs {
        let (params, inner) = peel_params(&d.body);
        let body = translate_term(inner, &defs, d.nocost);
        defs.push(IrDef {
            name: d.name.clone(),
            params,
            body,
            ty: translate_type(&d.ty),
            nocost: d.nocost,
        });
    }
    let main = translate_term(&prog.main, &defs, false);
    let mut out = IrProgram { defs, main, collapse_factor: 1 };
    if mode == TickMode::Simplified {
        let mut longest = 1;
        for d in &mut out.defs {
            let r = float_ticks(&d.body);
            d.body = r.term;
            longest = longest.max(r.longest_chain);
        }
        let r = float_ticks(&out.main);
        out.main = r.term;
        out.collapse_factor = longest.max(r.longest_chain);
    }
    out
}

/// Result of tick floating: the rewritten term plus the longest chain of
/// consecutive ticks that was replaced by a single one (1 if none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloatResult {
    pub term: IrTerm,
    pub longest_chain: u32,
}

/// Applies the two floating rewrites (plus bind reassociation, which
/// preserves outcome sets exactly) to a fixpoint, without collapsing.
/// Every outcome of the result has a same-value outcome of the input with
/// lower-or-equal cost.
pub fn float_stage(t: &IrTerm) -> IrTerm {
    let mut cur = t.clone();
    let mut rename = 0usize;
    for _ in 0..10_000 {
        let next = float_pass(&cur, &mut rename);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    debug_assert!(false, "tick floating did not reach a fixpoint");
    cur
}

/// Floats ticks to a fixpoint and collapses consecutive ticks.
pub fn float_ticks(t: &IrTerm) -> FloatResult {
    let floated = float_stage(t);
    let mut longest = 1;
    let term = collapse(&floated, &mut longest);
    FloatResult { term, longest_chain: longest }
}

fn fresh_rename(counter: &mut usize) -> String {
    let n = *counter;
    *counter += 1;
    format!("%r{}", n)
}

/// Renames the binder of a `Bind` when hoisting would capture.
fn rename_bind(binder: &str, body: &IrTerm, avoid_in: &IrTerm, counter: &mut usize) -> (String, IrTerm) {
    if avoid_in.free_vars().contains(binder) {
        let fresh = fresh_rename(counter);
        (fresh.clone(), subst_var(body, binder, &fresh))
    } else {
        (binder.to_string(), body.clone())
    }
}

/// Renames free occurrences of a variable; occurrences under a shadowing
/// binder are left alone.
pub fn rename_free_var(t: &IrTerm, from: &str, to: &str) -> IrTerm {
    subst_var(t, from, to)
}

fn subst_var(t: &IrTerm, from: &str, to: &str) -> IrTerm {
    let rn = |x: &String| if x == from { to.to_string() } else { x.clone() };
    match t {
        IrTerm::Ret { value } => IrTerm::Ret {
            value: match value {
                IrValue::Var(x) => IrValue::Var(rn(x)),
                other => other.clone(),
            },
        },
        IrTerm::Tick => IrTerm::Tick,
        IrTerm::Bind { first, binder, rest } => IrTerm::Bind {
            first: Box::new(subst_var(first, from, to)),
            binder: binder.clone(),
            rest: if binder == from {
                rest.clone()
            } else {
                Box::new(subst_var(rest, from, to))
            },
        },
        IrTerm::ThunkOf { body } => IrTerm::thunk_of(subst_var(body, from, to)),
        IrTerm::Forcing { thunk_var, binder, rest } => IrTerm::Forcing {
            thunk_var: rn(thunk_var),
            binder: binder.clone(),
            rest: if binder == from {
                rest.clone()
            } else {
                Box::new(subst_var(rest, from, to))
            },
        },
        IrTerm::CallLam { fn_var, arg_var } => IrTerm::CallLam {
            fn_var: rn(fn_var),
            arg_var: rn(arg_var),
        },
        IrTerm::MkLam { param, body } => IrTerm::MkLam {
            param: param.clone(),
            body: if param == from {
                body.clone()
            } else {
                Box::new(subst_var(body, from, to))
            },
        },
        IrTerm::MkNil => IrTerm::MkNil,
        IrTerm::MkCons { head_var, tail_var } => IrTerm::MkCons {
            head_var: rn(head_var),
            tail_var: rn(tail_var),
        },
        IrTerm::Foldr {
            nil_case,
            head_param,
            acc_param,
            cons_case,
            scrut_var,
            costed,
        } => IrTerm::Foldr {
            nil_case: Box::new(subst_var(nil_case, from, to)),
            head_param: head_param.clone(),
            acc_param: acc_param.clone(),
            cons_case: if head_param == from || acc_param == from {
                cons_case.clone()
            } else {
                Box::new(subst_var(cons_case, from, to))
            },
            scrut_var: rn(scrut_var),
            costed: *costed,
        },
        IrTerm::CaseList {
            scrut_var,
            nil_branch,
            head_param,
            tail_param,
            cons_branch,
        } => IrTerm::CaseList {
            scrut_var: rn(scrut_var),
            nil_branch: Box::new(subst_var(nil_branch, from, to)),
            head_param: head_param.clone(),
            tail_param: tail_param.clone(),
            cons_branch: if head_param == from || tail_param == from {
                cons_branch.clone()
            } else {
                Box::new(subst_var(cons_branch, from, to))
            },
        },
        IrTerm::NatCase {
            scrut_var,
            zero_branch,
            pred_name,
            succ_branch,
        } => IrTerm::NatCase {
            scrut_var: rn(scrut_var),
            zero_branch: Box::new(subst_var(zero_branch, from, to)),
            pred_name: pred_name.clone(),
            succ_branch: if pred_name == from {
                succ_branch.clone()
            } else {
                Box::new(subst_var(succ_branch, from, to))
            },
        },
        IrTerm::DefCall { name, arg_vars } => IrTerm::DefCall {
            name: name.clone(),
            arg_vars: arg_vars.iter().map(|a| rn(a)).collect(),
        },
    }
}

fn float_pass(t: &IrTerm, rename: &mut usize) -> IrTerm {
    // children first
    let t = match t {
        IrTerm::Bind { first, binder, rest } => IrTerm::Bind {
            first: Box::new(float_pass(first, rename)),
            binder: binder.clone(),
            rest: Box::new(float_pass(rest, rename)),
        },
        IrTerm::ThunkOf { body } => IrTerm::thunk_of(float_pass(body, rename)),
        IrTerm::Forcing { thunk_var, binder, rest } => IrTerm::Forcing {
            thunk_var: thunk_var.clone(),
            binder: binder.clone(),
            rest: Box::new(float_pass(rest, rename)),
        },
        IrTerm::MkLam { param, body } => IrTerm::MkLam {
            param: param.clone(),
            body: Box::new(float_pass(body, rename)),
        },
        IrTerm::Foldr {
            nil_case,
            head_param,
            acc_param,
            cons_case,
            scrut_var,
            costed,
        } => IrTerm::Foldr {
            nil_case: Box::new(float_pass(nil_case, rename)),
            head_param: head_param.clone(),
            acc_param: acc_param.clone(),
            cons_case: Box::new(float_pass(cons_case, rename)),
            scrut_var: scrut_var.clone(),
            costed: *costed,
        },
        IrTerm::CaseList {
            scrut_var,
            nil_branch,
            head_param,
            tail_param,
            cons_branch,
        } => IrTerm::CaseList {
            scrut_var: scrut_var.clone(),
            nil_branch: Box::new(float_pass(nil_branch, rename)),
            head_param: head_param.clone(),
            tail_param: tail_param.clone(),
            cons_branch: Box::new(float_pass(cons_branch, rename)),
        },
        IrTerm::NatCase {
            scrut_var,
            zero_branch,
            pred_name,
            succ_branch,
        } => IrTerm::NatCase {
            scrut_var: scrut_var.clone(),
            zero_branch: Box::new(float_pass(zero_branch, rename)),
            pred_name: pred_name.clone(),
            succ_branch: Box::new(float_pass(succ_branch, rename)),
        },
        other => other.clone(),
    };

    // bind (bind a x b) y c  =>  bind a x (bind b y c)
    if let IrTerm::Bind { first, binder, rest } = &t {
        if let IrTerm::Bind { first: a, binder: x, rest: b } = &**first {
            let (x2, b2) = rename_bind(x, b, rest, rename);
            return IrTerm::bind(
                (**a).clone(),
                x2,
                IrTerm::bind(b2, binder.clone(), (**rest).clone()),
            );
        }
    }

    // bind t (fun x => tick >> k)  =>  tick >> bind t k
    if let IrTerm::Bind { first, binder, rest } = &t {
        if !matches!(**first, IrTerm::Tick) {
            if let IrTerm::Bind { first: tk, binder: w, rest: k } = &**rest {
                if matches!(**tk, IrTerm::Tick) {
                    let (w2, _) = rename_bind(w, &IrTerm::Tick, first, rename);
                    return IrTerm::bind(
                        IrTerm::Tick,
                        w2,
                        IrTerm::bind((**first).clone(), binder.clone(), (**k).clone()),
                    );
                }
            }
        }
    }

    // thunk (tick >> u)  =>  tick >> thunk u
    if let IrTerm::ThunkOf { body } = &t {
        if let IrTerm::Bind { first: tk, binder: w, rest: u } = &**body {
            if matches!(**tk, IrTerm::Tick) {
                return IrTerm::bind(IrTerm::Tick, w.clone(), IrTerm::thunk_of((**u).clone()));
            }
        }
    }

    t
}

/// Strips a run of leading ticks `tick >> tick >> ... >> k`, returning the
/// run length and the continuation. Stops if a dropped binder is actually
/// referenced later.
fn strip_tick_run(t: &IrTerm) -> (u32, &IrTerm) {
    let mut n = 0;
    let mut cur = t;
    loop {
        match cur {
            IrTerm::Bind { first, binder, rest } if matches!(**first, IrTerm::Tick) => {
                if rest.free_vars().contains(binder) {
                    return (n, cur);
                }
                n += 1;
                cur = rest;
            }
            IrTerm::Tick => return (n + 1, &UNIT_RET),
            _ => return (n, cur),
        }
    }
}

static UNIT_RET: IrTerm = IrTerm::Ret { value: IrValue::Unit };

/// Collapses each maximal run of consecutive ticks into a single tick,
/// and absorbs a branch-leading tick into a costed fold's own per-unfolding
/// tick. Records the longest run replaced.
fn collapse(t: &IrTerm, longest: &mut u32) -> IrTerm {
    match t {
        IrTerm::Bind { first, binder, rest } if matches!(**first, IrTerm::Tick) => {
            let (n, k) = strip_tick_run(t);
            if n >= 2 {
                *longest = (*longest).max(n);
            }
            if std::ptr::eq(k, &UNIT_RET) {
                // the run ended in a bare tick
                return IrTerm::Tick;
            }
            if n >= 1 {
                IrTerm::bind(IrTerm::Tick, binder.clone(), collapse(k, longest))
            } else {
                IrTerm::bind(IrTerm::Tick, binder.clone(), collapse(rest, longest))
            }
        }
        IrTerm::Bind { first, binder, rest } => IrTerm::Bind {
            first: Box::new(collapse(first, longest)),
            binder: binder.clone(),
            rest: Box::new(collapse(rest, longest)),
        },
        IrTerm::ThunkOf { body } => IrTerm::thunk_of(collapse(body, longest)),
        IrTerm::Forcing { thunk_var, binder, rest } => IrTerm::Forcing {
            thunk_var: thunk_var.clone(),
            binder: binder.clone(),
            rest: Box::new(collapse(rest, longest)),
        },
        IrTerm::MkLam { param, body } => IrTerm::MkLam {
            param: param.clone(),
            body: Box::new(collapse(body, longest)),
        },
        IrTerm::Foldr {
            nil_case,
            head_param,
            acc_param,
            cons_case,
            scrut_var,
            costed,
        } => {
            let absorb = |branch: &IrTerm, longest: &mut u32| -> IrTerm {
                if *costed {
                    let (n, k) = strip_tick_run(branch);
                    if n >= 1 && !std::ptr::eq(k, &UNIT_RET) {
                        // the fold's own tick plus the branch's leading run
                        *longest = (*longest).max(n + 1);
                        return collapse(k, longest);
                    }
                }
                collapse(branch, longest)
            };
            IrTerm::Foldr {
                nil_case: Box::new(absorb(nil_case, longest)),
                head_param: head_param.clone(),
                acc_param: acc_param.clone(),
                cons_case: Box::new(absorb(cons_case, longest)),
                scrut_var: scrut_var.clone(),
                costed: *costed,
            }
        }
        IrTerm::CaseList {
            scrut_var,
            nil_branch,
            head_param,
            tail_param,
            cons_branch,
        } => IrTerm::CaseList {
            scrut_var: scrut_var.clone(),
            nil_branch: Box::new(collapse(nil_branch, longest)),
            head_param: head_param.clone(),
            tail_param: tail_param.clone(),
            cons_branch: Box::new(collapse(cons_branch, longest)),
        },
        IrTerm::NatCase {
            scrut_var,
            zero_branch,
            pred_name,
            succ_branch,
        } => IrTerm::NatCase {
            scrut_var: scrut_var.clone(),
            zero_branch: Box::new(collapse(zero_branch, longest)),
            pred_name: pred_name.clone(),
            succ_branch: Box::new(collapse(succ_branch, longest)),
        },
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anf::to_anf_program;
    use crate::parse::parse;
    use crate::typecheck::typecheck;

    #[test]
    fn type_translation_examples() {
        assert_eq!(
            translate_type(&Ty::list(Ty::Nat)),
            ApproxTy::ListA(Box::new(ApproxTy::NatA))
        );
        assert_eq!(translate_type(&Ty::Unit), ApproxTy::UnitA);
        let t = translate_type(&Ty::arrow(Ty::list(Ty::Nat), Ty::list(Ty::Nat)));
        assert_eq!(
            t,
            ApproxTy::ArrowA(
                Box::new(Thunked(ApproxTy::ListA(Box::new(ApproxTy::NatA)))),
                Box::new(Comp(ApproxTy::ListA(Box::new(ApproxTy::NatA)))),
            )
        );
        assert_eq!(t.to_string(), "T (listA nat) -> M (listA nat)");
    }

    #[test]
    fn variable_translates_to_tick_force() {
        let t = translate_term(&Term::Var("x".into(), Default::default()), &[], false);
        match t {
            IrTerm::Bind { first, rest, .. } => {
                assert!(matches!(*first, IrTerm::Tick));
                match *rest {
                    IrTerm::Forcing { thunk_var, binder, rest } => {
                        assert_eq!(thunk_var, "x");
                        assert_eq!(*rest, IrTerm::ret_var(binder));
                    }
                    other => panic!("expected forcing, got {:?}", other),
                }
            }
            other => panic!("expected tick >> force, got {:?}", other),
        }
    }

    #[test]
    fn let_translates_to_tick_let_thunk() {
        let p = parse("main = let x = (nil : list nat) in x").unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        let ir = translate_program(&anf, TickMode::Full);
        // tick >> let~ x := ret NilA in (tick >> force x)
        let expected = IrTerm::tick_then(IrTerm::let_thunk(
            "x",
            IrTerm::MkNil,
            IrTerm::tick_then(IrTerm::force_var("x")),
        ));
        assert_eq!(ir.main, expected);
    }

    #[test]
    fn float_moves_continuation_tick_up() {
        // bind (ret unit) (fun x => tick >> ret x) => tick >> bind (ret unit) (fun x => ret x)
        let t = IrTerm::bind(
            IrTerm::ret_unit(),
            "x",
            IrTerm::tick_then(IrTerm::ret_var("x")),
        );
        let r = float_ticks(&t);
        assert_eq!(
            r.term,
            IrTerm::tick_then(IrTerm::bind(IrTerm::ret_unit(), "x", IrTerm::ret_var("x")))
        );
        assert_eq!(r.longest_chain, 1);
    }

    #[test]
    fn consecutive_ticks_collapse_with_chain_two() {
        let t = IrTerm::tick_then(IrTerm::tick_then(IrTerm::ret_unit()));
        let r = float_ticks(&t);
        assert_eq!(r.term, IrTerm::tick_then(IrTerm::ret_unit()));
        assert_eq!(r.longest_chain, 2);
    }

    #[test]
    fn thunk_tick_floats_out() {
        let t = IrTerm::thunk_of(IrTerm::tick_then(IrTerm::MkNil));
        let r = float_stage(&t);
        assert_eq!(r, IrTerm::tick_then(IrTerm::thunk_of(IrTerm::MkNil)));
    }

    #[test]
    fn translator_output_is_well_scoped_and_case_free() {
        let src = "append : list nat -> list nat -> list nat = fun xs ys. foldr xs { nil => ys | cons h t => cons h t }\nmain = append (cons 1 nil) nil";
        let p = parse(src).unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        for mode in [TickMode::Full, TickMode::Simplified] {
            let ir = translate_program(&anf, mode);
            crate::ir::check_program_scope(&ir, &Default::default()).unwrap();
            assert!(!ir.main.contains_case_list());
            for d in &ir.defs {
                assert!(!d.body.contains_case_list());
            }
        }
    }

    #[test]
    fn thunks_are_immediately_bind_consumed_in_translator_output() {
        let src = "main = let x = (let y = nil in y) in cons 1 x";
        let p = parse(src).unwrap();
        let anf = to_anf_program(&p);
        let ir = translate_program(&anf, TickMode::Full);
        fn check(t: &IrTerm) {
            match t {
                IrTerm::Bind { first, rest, .. } => {
                    if let IrTerm::ThunkOf { body } = &**first {
                        check(body);
                    } else {
                        check(first);
                    }
                    check(rest);
                }
                IrTerm::ThunkOf { .. } => panic!("naked thunk outside a bind"),
                IrTerm::Forcing { rest, .. } => check(rest),
                IrTerm::MkLam { body, .. } => check(body),
                IrTerm::Foldr { nil_case, cons_case, .. } => {
                    check(nil_case);
                    check(cons_case);
                }
                IrTerm::NatCase { zero_branch, succ_branch, .. } => {
                    check(zero_branch);
                    check(succ_branch);
                }
                _ => {}
            }
        }
        check(&ir.main);
    }

    #[test]
    fn nocost_definitions_carry_no_ticks() {
        let src = "rev0 : list nat -> list nat = fun xs. foldr xs { nil => nil | cons h t => cons h t } @nocost\nmain = rev0 (cons 1 nil)";
        let p = parse(src).unwrap();
        typecheck(&p).unwrap();
        let anf = to_anf_program(&p);
        let ir = translate_program(&anf, TickMode::Full);
        let d = ir.def("rev0").unwrap();
        assert!(d.nocost);
        assert!(!d.body.has_cost());
        assert!(ir.main.has_cost());
    }
}
