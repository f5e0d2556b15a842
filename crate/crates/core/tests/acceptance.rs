//! The acceptance suite: one test per top-level claim, each printing a
//! PASS line with the checked bound. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use lazycost_core::approx::{exact, is_approx, size_x};
use lazycost_core::ccv::ccv_outcome_set;
use lazycost_core::corpus::{self, SURFACE_CASES};
use lazycost_core::eval::{enumerate, min_cost, Budget};
use lazycost_core::gen::Gen;
use lazycost_core::need::eval_need;
use lazycost_core::pure::eval_program;
use lazycost_core::speclab::{
    validate_rule, weakened_optimistic_conjunction, RuleMode, ALL_RULES,
};
use lazycost_core::translate::{float_stage, translate_program, TickMode};
use lazycost_core::value::{Demand, EvalValue, PureValue, TVal};
use lazycost_core::IrTerm;
use std::time::{Duration, Instant};

fn big_budget() -> Budget {
    Budget::new(200_000_000)
}

fn assert_within(start: Instant, limit: Duration, what: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= limit,
        "{} took {:?}, over the {:?} budget",
        what,
        elapsed,
        limit
    );
}

/// Full-demand cost of `take n (append xs ys)` never exceeds `2n + 1`,
/// with equality whenever `0 < n <= |xs|`.
#[test]
fn criterion_1_take_append_bound() {
    let start = Instant::now();
    let prog = corpus::append_take_prog();
    let main = corpus::append_take_main();
    let mut points = 0;
    for lx in 0..=6u64 {
        for ly in 0..=3u64 {
            for n in 0..=6u64 {
                let xs: Vec<u64> = (1..=lx).collect();
                let ys: Vec<u64> = (101..101 + ly).collect();
                let inputs = corpus::inputs_n_xs_ys(n, &xs, &ys);
                let env = corpus::exact_env(&inputs);
                let min = min_cost(&prog, &main, &env, &Demand::Full, &mut big_budget())
                    .expect("within budget")
                    .expect("full demand is satisfiable");
                let bound = 2 * n + 1;
                assert!(
                    min <= bound,
                    "min cost {} exceeds 2n+1={} at n={} |xs|={} |ys|={}",
                    min, bound, n, lx, ly
                );
                if n > 0 && n <= lx {
                    assert_eq!(
                        min, bound,
                        "expected exact 2n+1 at n={} |xs|={} |ys|={}",
                        n, lx, ly
                    );
                }
                points += 1;
            }
        }
    }
    assert_within(start, Duration::from_secs(60), "criterion 1");
    println!(
        "PASS criterion 1: min full-demand cost of take n (append xs ys) <= 2n+1 (equality for 0<n<=|xs|) on {} grid points",
        points
    );
}

/// Every successful outcome of append on exact inputs costs within
/// [1, sizeX 1 xs], and approximates the pure append.
#[test]
fn criterion_2_append_pessimistic_interval() {
    let start = Instant::now();
    let prog = corpus::append_prog();
    let main = IrTerm::def_call("append", &["xs", "ys"]);
    let mut checked = 0;
    for lx in 0..=6u64 {
        for ly in 0..=3u64 {
            let xs: Vec<u64> = (1..=lx).collect();
            let ys: Vec<u64> = (101..101 + ly).collect();
            let inputs = corpus::inputs_xs_ys(&xs, &ys);
            let env = corpus::exact_env(&inputs);
            let hi = size_x(1, &lazycost_core::approx::exact_tval(&PureValue::list(&xs)));
            let pure_append: Vec<u64> =
                xs.iter().chain(ys.iter()).copied().collect();
            let pure = PureValue::list(&pure_append);
            let outs = enumerate(&prog, &main, &env, &mut big_budget()).unwrap();
            assert!(!outs.is_empty());
            for o in outs {
                assert!(
                    o.cost >= 1 && o.cost <= hi,
                    "cost {} outside [1, {}] at |xs|={} |ys|={}",
                    o.cost, hi, lx, ly
                );
                match &o.value {
                    EvalValue::Val(v) => assert!(is_approx(v, &pure)),
                    EvalValue::Thunk(_) => panic!("bare thunk outcome"),
                }
                checked += 1;
            }
        }
    }
    assert_within(start, Duration::from_secs(10), "criterion 2");
    println!(
        "PASS criterion 2: {} append outcomes all cost within [1, sizeX 1 xs]",
        checked
    );
}

/// For every 1 <= n <= sizeX 0 xs there is an append execution producing
/// at least n cons cells at cost at most n.
#[test]
fn criterion_3_append_optimistic_prefix() {
    let start = Instant::now();
    let prog = corpus::append_prog();
    let main = IrTerm::def_call("append", &["xs", "ys"]);
    let mut witnesses = 0;
    for lx in 1..=6u64 {
        for ly in 0..=3u64 {
            let xs: Vec<u64> = (1..=lx).collect();
            let ys: Vec<u64> = (101..101 + ly).collect();
            let inputs = corpus::inputs_xs_ys(&xs, &ys);
            let env = corpus::exact_env(&inputs);
            let outs = enumerate(&prog, &main, &env, &mut big_budget()).unwrap();
            for n in 1..=lx {
                let found = outs.iter().any(|o| {
                    o.cost <= n
                        && match &o.value {
                            EvalValue::Val(v) => {
                                size_x(0, &TVal::thunk(v.clone())) >= n
                            }
                            EvalValue::Thunk(_) => false,
                        }
                });
                assert!(
                    found,
                    "no witness with >= {} conses at cost <= {} for |xs|={} |ys|={}",
                    n, n, lx, ly
                );
                witnesses += 1;
            }
        }
    }
    assert_within(start, Duration::from_secs(10), "criterion 3");
    println!(
        "PASS criterion 3: {} prefix-cost witnesses (n conses within cost n)",
        witnesses
    );
}

/// The oracle triangle: on every corpus program and grid point, the
/// call-by-need cost equals the clairvoyant minimum (both tick modes), and
/// the operational derivations read back to exactly the denotational
/// outcome set.
#[test]
fn criterion_4_oracle_triangle() {
    let start = Instant::now();
    assert!(SURFACE_CASES.len() >= 12);
    let mut points = 0;
    for case in SURFACE_CASES {
        let anf = case.compile();
        for lx in 0..=3u64 {
            for ly in [0u64, 2] {
                for n in [0u64, 1, 3] {
                    if (!case.uses_ys && ly != 0) || (!case.uses_n && n != 0) {
                        continue;
                    }
                    let xs: Vec<u64> = (1..=lx).collect();
                    let ys: Vec<u64> = (101..101 + ly).collect();
                    let inputs = case.inputs(&xs, &ys, n);
                    let env = corpus::exact_env(&inputs);

                    let ir = translate_program(&anf, TickMode::Full);
                    let denot = enumerate(&ir, &ir.main, &env, &mut big_budget())
                        .unwrap_or_else(|e| panic!("{}: {}", case.name, e));
                    let ccv = ccv_outcome_set(&anf, &ir, &inputs, &mut big_budget())
                        .unwrap_or_else(|e| panic!("{}: {}", case.name, e));
                    assert_eq!(denot, ccv, "{} at {:?}", case.name, inputs);

                    for mode in [TickMode::Full, TickMode::Simplified] {
                        let ir = translate_program(&anf, mode);
                        let need = eval_need(&anf, &inputs, &Demand::Full, mode)
                            .unwrap_or_else(|e| panic!("{}: {}", case.name, e));
                        let min = min_cost(&ir, &ir.main, &env, &Demand::Full, &mut big_budget())
                            .unwrap()
                            .expect("full demand satisfiable");
                        assert_eq!(need.cost, min, "{} ({:?}) at {:?}", case.name, mode, inputs);
                    }
                    points += 1;
                }
            }
        }
    }
    assert_within(start, Duration::from_secs(300), "criterion 4");
    println!(
        "PASS criterion 4: need cost = clairvoyant minimum and operational = denotational outcome sets on {} programs x {} total points",
        SURFACE_CASES.len(),
        points
    );
}

/// The approximation algebra's laws at one thousand random cases each.
#[test]
fn criterion_5_approximation_algebra() {
    use lazycost_core::approx::{less_defined, less_defined_tval};
    let start = Instant::now();
    const CASES: usize = 1000;

    // order laws
    let mut g = Gen::new(101);
    for _ in 0..CASES {
        let a = g.avalue(4);
        assert!(less_defined(&a, &a), "reflexivity");
        let p = g.pure_value(3);
        let full = exact(&p);
        let mid = g.weaken(&full);
        let low = g.weaken(&mid);
        assert!(less_defined(&mid, &full) && less_defined(&low, &mid));
        assert!(less_defined(&low, &full), "transitivity");
        let b = g.avalue(4);
        if less_defined(&a, &b) && less_defined(&b, &a) {
            assert_eq!(a, b, "antisymmetry");
        }
        let w = g.weaken(&a);
        if less_defined(&a, &w) {
            assert_eq!(a, w, "antisymmetry on weakenings");
        }
    }

    // approx_down: less-defined values below an approximation approximate
    let mut g = Gen::new(102);
    for _ in 0..CASES {
        let p = g.pure_value(3);
        let ys = g.approx_of(&p);
        let xs = g.weaken(&ys);
        assert!(is_approx(&ys, &p));
        assert!(is_approx(&xs, &p), "downward closure");
    }

    // approx_exact: is_approx iff below the exact injection
    let mut g = Gen::new(103);
    for _ in 0..CASES {
        let p = g.pure_value(3);
        let a = if g.coin(0.5) { g.approx_of(&p) } else { g.avalue(3) };
        assert_eq!(
            is_approx(&a, &p),
            less_defined(&a, &exact(&p)),
            "approx_exact on {} vs {}",
            a,
            p
        );
    }

    // exact_max: the exact injection is maximal
    let mut g = Gen::new(104);
    for _ in 0..CASES {
        let p = g.pure_value(3);
        let e = exact(&p);
        let a = if g.coin(0.5) { g.approx_of(&p) } else { g.avalue(3) };
        if less_defined(&e, &a) {
            assert_eq!(e, a, "exact_max");
        }
        let t = lazycost_core::approx::exact_tval(&p);
        let s = g.tval(3);
        if less_defined_tval(&t, &s) {
            assert_eq!(t, s, "exact_max through thunks");
        }
    }

    assert_within(start, Duration::from_secs(30), "criterion 5");
    println!(
        "PASS criterion 5: order laws, downward closure, approx/exact agreement, maximality at {} cases each",
        CASES
    );
}

/// Every reasoning rule validates semantically at 500 trials; the
/// deliberately weakened optimistic conjunction is refuted.
#[test]
fn criterion_6_reasoning_rules() {
    let start = Instant::now();
    const TRIALS: u32 = 500;
    for &rule in ALL_RULES {
        for mode in [RuleMode::Pessimistic, RuleMode::Optimistic] {
            let rep = validate_rule(rule, mode, TRIALS, 2026);
            assert_eq!(
                rep.failures, 0,
                "{} ({}): {:?}",
                rule, mode, rep.first_failure
            );
            assert!(
                rep.premise_held >= TRIALS / 2,
                "{} ({}): premises held only {} of {} trials",
                rule,
                mode,
                rep.premise_held,
                rep.trials
            );
        }
    }
    let weak = weakened_optimistic_conjunction(TRIALS, 2026);
    assert!(
        weak.failures > 0,
        "the weakened conjunction rule should admit counterexamples"
    );
    assert_within(start, Duration::from_secs(120), "criterion 6");
    println!(
        "PASS criterion 6: 14 rules x {} trials, zero failures; weakened conjunction refuted {} times",
        TRIALS, weak.failures
    );
}

/// Tick floating: floating alone never lowers an outcome below a matching
/// original, and collapsing speeds up each value's minimum cost by at most
/// the recorded chain factor.
#[test]
fn criterion_7_tick_floating() {
    let start = Instant::now();
    let mut terms = 0;
    for case in SURFACE_CASES {
        let anf = case.compile();
        let inputs = case.inputs(&[1, 2, 3], &[101, 102], 2);
        let env = corpus::exact_env(&inputs);
        let full = translate_program(&anf, TickMode::Full);
        let simp = translate_program(&anf, TickMode::Simplified);
        let k = u64::from(simp.collapse_factor);

        let orig = enumerate(&full, &full.main, &env, &mut big_budget()).unwrap();

        // stage one: floating only
        let mut floated_ir = full.clone();
        for d in &mut floated_ir.defs {
            d.body = float_stage(&d.body);
        }
        floated_ir.main = float_stage(&full.main);
        let floated = enumerate(&floated_ir, &floated_ir.main, &env, &mut big_budget()).unwrap();
        let values = |s: &lazycost_core::eval::OutcomeSet| -> std::collections::BTreeSet<_> {
            s.iter().map(|o| o.value.clone()).collect()
        };
        assert_eq!(values(&orig), values(&floated), "{}: floating must preserve values", case.name);
        for o in &floated {
            assert!(
                orig.iter().any(|p| p.value == o.value && p.cost <= o.cost),
                "{}: floated outcome {} has no lower-or-equal original",
                case.name,
                o
            );
        }

        // stage two: collapsing, bounded by the longest collapsed chain
        let fast = enumerate(&simp, &simp.main, &env, &mut big_budget()).unwrap();
        assert_eq!(values(&orig), values(&fast), "{}: collapse must preserve values", case.name);
        for v in values(&fast) {
            let min_of = |s: &lazycost_core::eval::OutcomeSet| {
                s.iter().filter(|p| p.value == v).map(|p| p.cost).min().unwrap()
            };
            let m_fast = min_of(&fast);
            let m_orig = min_of(&orig);
            assert!(
                m_fast <= k * m_orig,
                "{}: simplified min {} vs original min {} exceeds chain factor {}",
                case.name,
                m_fast,
                m_orig,
                k
            );
        }
        terms += 1;
    }
    assert_within(start, Duration::from_secs(60), "criterion 7");
    println!(
        "PASS criterion 7: float/collapse cost bounds hold on {} corpus terms",
        terms
    );
}

/// The tail-recursion case-study orderings, over the default grids.
#[test]
fn criterion_8_case_study_orderings() {
    use lazycost_core::casestudy::{run_case_study, CaseStudy, Grid};
    let start = Instant::now();
    let grid = Grid::default();
    let mut total = 0;
    for cs in [
        CaseStudy::AppendTake,
        CaseStudy::TakeVsTakePrime,
        CaseStudy::RevVsRevPrime,
        CaseStudy::FoldlVsFoldr,
    ] {
        let reports = run_case_study(cs, &grid, 200_000_000).unwrap();
        for r in &reports {
            assert!(r.verdict.passed(), "{}: {}", cs, r.line());
        }
        total += reports.len();
    }
    assert_within(start, Duration::from_secs(120), "criterion 8");
    println!(
        "PASS criterion 8: all {} case-study claims hold (take beats take' under weak demand; reversals demand-independent; folds equal worst-case, foldr cheaper under head demand)",
        total
    );
}

/// Sanity net for the suite itself: the downward-closure of every corpus
/// outcome against the pure interpreter (partial correctness).
#[test]
fn partial_correctness_backstop() {
    for case in SURFACE_CASES {
        if case.name == "unit_value" {
            continue;
        }
        let anf = case.compile();
        let inputs = case.inputs(&[1, 2, 3], &[101], 2);
        let env = corpus::exact_env(&inputs);
        let pure = eval_program(anf.program(), &inputs).unwrap();
        let ir = translate_program(&anf, TickMode::Simplified);
        let outs = enumerate(&ir, &ir.main, &env, &mut big_budget()).unwrap();
        for o in outs {
            if let EvalValue::Val(v) = &o.value {
                assert!(is_approx(v, &pure), "{}: {} vs {}", case.name, v, pure);
            }
        }
    }
}
