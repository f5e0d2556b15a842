//! The built-in program corpus.
//!
//! Two flavors:
//!
//! * hand-written IR programs in the translated-example style (a single
//!   tick at the head of each worker body, recursion via `DefCall`, list
//!   matching via `CaseList`) — these drive the case studies and the
//!   cost assertions;
//! * surface-language programs, given as source templates whose inputs
//!   `xs`, `ys`, `n` are free variables bound through the evaluation
//!   environment — these drive the three-way semantics cross-checks.

use crate::anf::to_anf_program;
use crate::approx::exact_tval;
use crate::ir::{ApproxTy, Comp, IrDef, IrProgram, IrTerm, Thunked};
use crate::parse::parse;
use crate::syntax::{AnfProgram, Ty};
use crate::typecheck::typecheck_with_context;
use crate::value::{Env, PureValue};
use std::collections::BTreeMap;

fn list_nat() -> Ty {
    Ty::list(Ty::Nat)
}

fn approx_fn(args: usize) -> ApproxTy {
    // T (listA nat) -> ... -> M (listA nat)
    let mut t = ApproxTy::ListA(Box::new(ApproxTy::NatA));
    for _ in 0..args {
        t = ApproxTy::ArrowA(
            Box::new(Thunked(ApproxTy::ListA(Box::new(ApproxTy::NatA)))),
            Box::new(Comp(t)),
        );
    }
    t
}

fn def(name: &str, params: &[&str], ty: ApproxTy, nocost: bool, body: IrTerm) -> IrDef {
    IrDef {
        name: name.to_string(),
        params: params.iter().map(|s| s.to_string()).collect(),
        body,
        ty,
        nocost,
    }
}

/// `append`, one tick per unfolding, forcing the second list at the end.
fn append_def(name: &str, costed: bool) -> IrDef {
    let body0 = IrTerm::case_list(
        "xs",
        IrTerm::ret_var("ys"),
        "x",
        "xs1",
        IrTerm::let_thunk(
            "t",
            IrTerm::def_call(name, &["xs1", "ys"]),
            IrTerm::mk_cons("x", "t"),
        ),
    );
    let body = if costed { IrTerm::tick_then(body0) } else { body0 };
    def(name, &["xs", "ys"], approx_fn(2), !costed, body)
}

/// `take`, recursing on the primitive natural: `take 0` never touches the
/// list.
fn take_def(name: &str) -> IrDef {
    let body = IrTerm::tick_then(IrTerm::nat_case(
        "n",
        IrTerm::MkNil,
        "n1",
        IrTerm::case_list(
            "xs",
            IrTerm::MkNil,
            "x",
            "xs1",
            IrTerm::let_thunk(
                "t",
                IrTerm::def_call(name, &["n1", "xs1"]),
                IrTerm::mk_cons("x", "t"),
            ),
        ),
    ));
    def(name, &["n", "xs"], approx_fn(2), false, body)
}

/// Tail-recursive reverse; `costed` controls the per-unfolding tick.
fn rev_defs(worker: &str, wrapper: &str, costed: bool) -> Vec<IrDef> {
    let body0 = IrTerm::case_list(
        "xs",
        IrTerm::ret_var("acc"),
        "x",
        "xs1",
        IrTerm::bind(
            IrTerm::mk_cons("x", "acc"),
            "acc2",
            IrTerm::def_call(worker, &["acc2", "xs1"]),
        ),
    );
    let body = if costed { IrTerm::tick_then(body0) } else { body0 };
    vec![
        def(worker, &["acc", "xs"], approx_fn(2), !costed, body),
        def(
            wrapper,
            &["xs"],
            approx_fn(1),
            !costed,
            IrTerm::bind(IrTerm::MkNil, "e", IrTerm::def_call(worker, &["e", "xs"])),
        ),
    ]
}

pub fn append_prog() -> IrProgram {
    IrProgram::with_defs(vec![append_def("append", true)])
}

pub fn take_prog() -> IrProgram {
    IrProgram::with_defs(vec![take_def("take")])
}

pub fn append_take_prog() -> IrProgram {
    IrProgram::with_defs(vec![append_def("append", true), take_def("take")])
}

/// `let~ zs := append xs ys in take n zs` — the motivating composition.
pub fn append_take_main() -> IrTerm {
    IrTerm::let_thunk(
        "zs",
        IrTerm::def_call("append", &["xs", "ys"]),
        IrTerm::def_call("take", &["n", "zs"]),
    )
}

/// Tail-recursive take with a zero-cost reverse in the base case.
pub fn take_tr_prog() -> IrProgram {
    let mut defs = rev_defs("rev0_", "rev0", false);
    let worker = IrTerm::tick_then(IrTerm::nat_case(
        "n",
        IrTerm::def_call("rev0", &["acc"]),
        "n1",
        IrTerm::case_list(
            "xs",
            IrTerm::def_call("rev0", &["acc"]),
            "x",
            "xs1",
            IrTerm::bind(
                IrTerm::mk_cons("x", "acc"),
                "acc2",
                IrTerm::def_call("take_tr_", &["n1", "xs1", "acc2"]),
            ),
        ),
    ));
    defs.push(def("take_tr_", &["n", "xs", "acc"], approx_fn(3), false, worker));
    defs.push(def(
        "take_tr",
        &["n", "xs"],
        approx_fn(2),
        false,
        IrTerm::bind(
            IrTerm::MkNil,
            "e",
            IrTerm::def_call("take_tr_", &["n", "xs", "e"]),
        ),
    ));
    let mut p = IrProgram::with_defs(defs);
    p.defs.push(take_def("take"));
    p
}

pub fn rev_prog() -> IrProgram {
    IrProgram::with_defs(rev_defs("rev_", "rev", true))
}

/// Naive reverse, `rev' (x:xs) = append (rev' xs) [x]`, with a zero-cost
/// append so only the recursion is charged.
pub fn rev_naive_prog() -> IrProgram {
    let mut defs = vec![append_def("append0", false)];
    let body = IrTerm::tick_then(IrTerm::case_list(
        "xs",
        IrTerm::MkNil,
        "x",
        "xs1",
        IrTerm::let_thunk(
            "r",
            IrTerm::def_call("rev_naive", &["xs1"]),
            IrTerm::bind(
                IrTerm::MkNil,
                "nv",
                IrTerm::bind(
                    IrTerm::mk_cons("x", "nv"),
                    "s",
                    IrTerm::def_call("append0", &["r", "s"]),
                ),
            ),
        ),
    ));
    defs.push(def("rev_naive", &["xs"], approx_fn(1), false, body));
    IrProgram::with_defs(defs)
}

/// `foldr f nil` and `foldl f nil` over a cost-1 consing `f`.
pub fn folds_prog() -> IrProgram {
    let f_cons = def(
        "f_cons",
        &["y1", "y2"],
        approx_fn(2),
        false,
        IrTerm::tick_then(IrTerm::mk_cons("y1", "y2")),
    );
    let foldr_f = def(
        "foldr_f",
        &["xs"],
        approx_fn(1),
        false,
        IrTerm::tick_then(IrTerm::case_list(
            "xs",
            IrTerm::MkNil,
            "x",
            "xs1",
            IrTerm::let_thunk(
                "y2",
                IrTerm::def_call("foldr_f", &["xs1"]),
                IrTerm::def_call("f_cons", &["x", "y2"]),
            ),
        )),
    );
    let f_acc = def(
        "f_acc",
        &["acc", "x"],
        approx_fn(2),
        false,
        IrTerm::tick_then(IrTerm::mk_cons("x", "acc")),
    );
    let foldl_f_ = def(
        "foldl_f_",
        &["acc", "xs"],
        approx_fn(2),
        false,
        IrTerm::tick_then(IrTerm::case_list(
            "xs",
            IrTerm::ret_var("acc"),
            "x",
            "xs1",
            IrTerm::let_thunk(
                "acc2",
                IrTerm::def_call("f_acc", &["acc", "x"]),
                IrTerm::def_call("foldl_f_", &["acc2", "xs1"]),
            ),
        )),
    );
    let foldl_f = def(
        "foldl_f",
        &["xs"],
        approx_fn(1),
        false,
        IrTerm::bind(IrTerm::MkNil, "e", IrTerm::def_call("foldl_f_", &["e", "xs"])),
    );
    IrProgram::with_defs(vec![f_cons, foldr_f, f_acc, foldl_f_, foldl_f])
}

/// Environment binding inputs to their exact approximations.
pub fn exact_env(inputs: &BTreeMap<String, PureValue>) -> Env {
    inputs
        .iter()
        .map(|(k, v)| (k.clone(), exact_tval(v)))
        .collect()
}

pub fn inputs_xs(xs: &[u64]) -> BTreeMap<String, PureValue> {
    let mut m = BTreeMap::new();
    m.insert("xs".to_string(), PureValue::list(xs));
    m
}

pub fn inputs_xs_ys(xs: &[u64], ys: &[u64]) -> BTreeMap<String, PureValue> {
    let mut m = inputs_xs(xs);
    m.insert("ys".to_string(), PureValue::list(ys));
    m
}

pub fn inputs_n_xs(n: u64, xs: &[u64]) -> BTreeMap<String, PureValue> {
    let mut m = inputs_xs(xs);
    m.insert("n".to_string(), PureValue::Nat(n));
    m
}

pub fn inputs_n_xs_ys(n: u64, xs: &[u64], ys: &[u64]) -> BTreeMap<String, PureValue> {
    let mut m = inputs_xs_ys(xs, ys);
    m.insert("n".to_string(), PureValue::Nat(n));
    m
}

/// A surface-language corpus entry. Inputs are free variables (`xs`, and
/// optionally `ys` and `n`) bound in the evaluation environment.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceCase {
    pub name: &'static str,
    pub source: &'static str,
    pub uses_ys: bool,
    pub uses_n: bool,
}

pub const SURFACE_CASES: &[SurfaceCase] = &[
    SurfaceCase {
        name: "append",
        source: "append : list nat -> list nat -> list nat = fun as bs. foldr as { nil => bs | cons h t => cons h t }\nmain = append xs ys",
        uses_ys: true,
        uses_n: false,
    },
    SurfaceCase {
        name: "copy",
        source: "copy : list nat -> list nat = fun as. foldr as { nil => nil | cons h t => cons h t }\nmain = copy xs",
        uses_ys: false,
        uses_n: false,
    },
    SurfaceCase {
        name: "zeros",
        source: "zeros : list nat -> list nat = fun as. foldr as { nil => nil | cons h t => let z = 0 in cons z t }\nmain = zeros xs",
        uses_ys: false,
        uses_n: false,
    },
    SurfaceCase {
        name: "map_id",
        source: "id : nat -> nat = fun v. v\nmap_id : list nat -> list nat = fun as. foldr as { nil => nil | cons h t => let h2 = id h in cons h2 t }\nmain = map_id xs",
        uses_ys: false,
        uses_n: false,
    },
    SurfaceCase {
        name: "take_fold",
        source: "take : list nat -> nat -> list nat = fun as. foldr as { nil => fun m. nil | cons h rec => fun m. natcase m { zero => nil | succ m1 => let r = rec m1 in cons h r } }\nmain = take xs n",
        uses_ys: false,
        uses_n: true,
    },
    SurfaceCase {
        name: "take_append",
        source: "append : list nat -> list nat -> list nat = fun as bs. foldr as { nil => bs | cons h t => cons h t }\ntake : list nat -> nat -> list nat = fun as. foldr as { nil => fun m. nil | cons h rec => fun m. natcase m { zero => nil | succ m1 => let r = rec m1 in cons h r } }\nmain = let zs = append xs ys in take zs n",
        uses_ys: true,
        uses_n: true,
    },
    SurfaceCase {
        name: "first_ignores_second",
        source: "first : list nat -> list nat -> list nat = fun as bs. as\nmain = first xs ys",
        uses_ys: true,
        uses_n: false,
    },
    SurfaceCase {
        name: "unused_let",
        source: "copy : list nat -> list nat = fun as. foldr as { nil => nil | cons h t => cons h t }\nmain = let u = copy xs in (nil : list nat)",
        uses_ys: false,
        uses_n: false,
    },
    SurfaceCase {
        name: "nested_append",
        source: "append : list nat -> list nat -> list nat = fun as bs. foldr as { nil => bs | cons h t => cons h t }\nmain = append (append xs ys) xs",
        uses_ys: true,
        uses_n: false,
    },
    SurfaceCase {
        name: "snoc",
        source: "append : list nat -> list nat -> list nat = fun as bs. foldr as { nil => bs | cons h t => cons h t }\nmain = append xs (cons n nil)",
        uses_ys: false,
        uses_n: true,
    },
    SurfaceCase {
        name: "natcase_pick",
        source: "main = natcase n { zero => xs | succ m => ys }",
        uses_ys: true,
        uses_n: true,
    },
    SurfaceCase {
        name: "let_chain",
        source: "main = let a = xs in let b = a in b",
        uses_ys: false,
        uses_n: false,
    },
    SurfaceCase {
        name: "twice_copy",
        source: "copy : list nat -> list nat = fun as. foldr as { nil => nil | cons h t => cons h t }\ntwice : (list nat -> list nat) -> list nat -> list nat = fun f as. let y1 = f as in f y1\nmain = twice copy xs",
        uses_ys: false,
        uses_n: false,
    },
    SurfaceCase {
        name: "unit_value",
        source: "main = unit",
        uses_ys: false,
        uses_n: false,
    },
];

impl SurfaceCase {
    /// The ambient typing context for this case's free input variables.
    pub fn context(&self) -> BTreeMap<String, Ty> {
        let mut ctx = BTreeMap::new();
        ctx.insert("xs".to_string(), list_nat());
        if self.uses_ys {
            ctx.insert("ys".to_string(), list_nat());
        }
        if self.uses_n {
            ctx.insert("n".to_string(), Ty::Nat);
        }
        ctx
    }

    pub fn inputs(&self, xs: &[u64], ys: &[u64], n: u64) -> BTreeMap<String, PureValue> {
        let mut m = inputs_xs(xs);
        if self.uses_ys {
            m.insert("ys".to_string(), PureValue::list(ys));
        }
        if self.uses_n {
            m.insert("n".to_string(), PureValue::Nat(n));
        }
        m
    }

    /// Parses, type-checks (against the input context) and normalizes this
    /// case.
    pub fn compile(&self) -> AnfProgram {
        let p = parse(self.source)
            .unwrap_or_else(|e| panic!("corpus program {} does not parse: {}", self.name, e));
        typecheck_with_context(&p, &self.context())
            .unwrap_or_else(|e| panic!("corpus program {} does not check: {}", self.name, e));
        to_anf_program(&p)
    }
}

/// Shipped example sources (closed programs usable from the command line).
pub const APPEND_LZ: &str = include_str!("../corpus/append.lz");
pub const TAKE_APPEND_LZ: &str = include_str!("../corpus/take_append.lz");
pub const REV_LZ: &str = include_str!("../corpus/rev.lz");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;
    use crate::typecheck::typecheck;

    #[test]
    fn all_surface_cases_compile() {
        for c in SURFACE_CASES {
            let _ = c.compile();
        }
    }

    #[test]
    fn hand_programs_are_well_scoped() {
        for (prog, main, name) in [
            (append_prog(), IrTerm::def_call("append", &["xs", "ys"]), "append"),
            (take_prog(), IrTerm::def_call("take", &["n", "xs"]), "take"),
            (append_take_prog(), append_take_main(), "append_take"),
            (take_tr_prog(), IrTerm::def_call("take_tr", &["n", "xs"]), "take_tr"),
            (rev_prog(), IrTerm::def_call("rev", &["xs"]), "rev"),
            (rev_naive_prog(), IrTerm::def_call("rev_naive", &["xs"]), "rev_naive"),
            (folds_prog(), IrTerm::def_call("foldr_f", &["xs"]), "folds"),
        ] {
            let mut env = std::collections::BTreeSet::new();
            env.insert("xs".to_string());
            env.insert("ys".to_string());
            env.insert("n".to_string());
            crate::ir::check_program_scope(&prog, &env)
                .unwrap_or_else(|e| panic!("{}: {}", name, e));
            crate::ir::check_scope(&prog, &main, &env)
                .unwrap_or_else(|e| panic!("{} main: {}", name, e));
        }
    }

    #[test]
    fn shipped_append_parses_to_the_expected_fold() {
        let p = parse(APPEND_LZ).unwrap();
        typecheck(&p).unwrap();
        let d = p.def("append").unwrap();
        // fun as bs. foldr as { nil => bs | cons h t => cons h t }
        let body = match &d.body {
            Term::Lam { body, .. } => match &**body {
                Term::Lam { body, .. } => body,
                other => panic!("expected two lambdas, got {:?}", other),
            },
            other => panic!("expected a lambda, got {:?}", other),
        };
        match &**body {
            Term::Foldr { nil_case, cons_case, .. } => {
                assert!(matches!(&**nil_case, Term::Var(v, _) if v == "bs"));
                assert!(matches!(&**cons_case, Term::Cons { .. }));
            }
            other => panic!("expected a fold, got {:?}", other),
        }
    }

    #[test]
    fn shipped_sources_check() {
        for (name, src) in [
            ("append.lz", APPEND_LZ),
            ("take_append.lz", TAKE_APPEND_LZ),
            ("rev.lz", REV_LZ),
        ] {
            let p = parse(src).unwrap_or_else(|e| panic!("{}: {}", name, e));
            typecheck(&p).unwrap_or_else(|e| panic!("{}: {}", name, e));
        }
    }
}
