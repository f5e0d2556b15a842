//! The tail-recursion case studies, run over input grids by exhaustive
//! enumeration and cost search.
//!
//! * `append_take`: the full-demand cost of `take n (append xs ys)` never
//!   exceeds `2n + 1`, with equality when `0 < n <= |xs|`.
//! * `take_vs_take_prime`: with a zero-cost reverse, the tail-recursive
//!   take has one cost per input, decided by `n` and `xs` alone, while the
//!   plain take's cost scales with the demand and beats it under weak
//!   demands.
//! * `rev_vs_rev_prime`: with a zero-cost append, both reversals have
//!   demand-independent cost.
//! * `foldl_vs_foldr`: with a cost-1 function, equal worst case, but
//!   `foldr` is strictly cheaper when only the head is demanded.
//!
//! Golden cost formulas (take-prime's `min(n,|xs|)+1`, the reversals'
//! `|xs|+1`, the folds' `2|xs|+1`) were read off the exhaustive outcome
//! sets once and are asserted as constants per grid point.

use crate::approx::demand_conses;
use crate::corpus;
use crate::eval::{max_cost, min_cost, min_cost_witness, Budget, EvalError};
use crate::ir::{IrProgram, IrTerm};
use crate::speclab::{
    check_pessimistic, Bindings, CostExpr, CostPredicate, OutcomeRepr, SpecReport, ValueCond,
    Verdict,
};
use crate::value::{Demand, Env, PureValue};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStudy {
    AppendTake,
    TakeVsTakePrime,
    RevVsRevPrime,
    FoldlVsFoldr,
}

pub const ALL_CASE_STUDIES: &[CaseStudy] = &[
    CaseStudy::AppendTake,
    CaseStudy::TakeVsTakePrime,
    CaseStudy::RevVsRevPrime,
    CaseStudy::FoldlVsFoldr,
];

impl FromStr for CaseStudy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "append_take" => Ok(CaseStudy::AppendTake),
            "take_vs_take_prime" => Ok(CaseStudy::TakeVsTakePrime),
            "rev_vs_rev_prime" => Ok(CaseStudy::RevVsRevPrime),
            "foldl_vs_foldr" => Ok(CaseStudy::FoldlVsFoldr),
            other => Err(format!(
                "unknown case study `{}` (expected append_take, take_vs_take_prime, rev_vs_rev_prime, foldl_vs_foldr)",
                other
            )),
        }
    }
}

impl std::fmt::Display for CaseStudy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseStudy::AppendTake => "append_take",
            CaseStudy::TakeVsTakePrime => "take_vs_take_prime",
            CaseStudy::RevVsRevPrime => "rev_vs_rev_prime",
            CaseStudy::FoldlVsFoldr => "foldl_vs_foldr",
        };
        write!(f, "{}", s)
    }
}

/// Input grid: list lengths and the take count, each ranging from zero.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub max_xs: u64,
    pub max_ys: u64,
    pub max_n: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { max_xs: 6, max_ys: 3, max_n: 6 }
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err("grid must be max_xs,max_ys,max_n".into());
        }
        let parse = |p: &str| p.trim().parse::<u64>().map_err(|e| e.to_string());
        Ok(Grid {
            max_xs: parse(parts[0])?,
            max_ys: parse(parts[1])?,
            max_n: parse(parts[2])?,
        })
    }
}

/// Distinct elements, stable across runs.
pub fn xs_of(len: u64) -> Vec<u64> {
    (1..=len).collect()
}

pub fn ys_of(len: u64) -> Vec<u64> {
    (101..101 + len).collect()
}

fn bindings_n_xs_ys(n: Option<u64>, xs: &[u64], ys: Option<&[u64]>) -> Bindings {
    let mut b = Bindings::default();
    if let Some(n) = n {
        b.nats.insert("n".to_string(), n);
    }
    b.pures.insert("xs".to_string(), PureValue::list(xs));
    if let Some(ys) = ys {
        b.pures.insert("ys".to_string(), PureValue::list(ys));
    }
    b
}

struct Ctx {
    budget_limit: u64,
}

impl Ctx {
    fn budget(&self) -> Budget {
        Budget::new(self.budget_limit)
    }

    fn min(
        &self,
        prog: &IrProgram,
        main: &IrTerm,
        env: &Env,
        d: &Demand,
    ) -> Result<Option<u64>, EvalError> {
        min_cost(prog, main, env, d, &mut self.budget())
    }

    fn comparison_report(
        &self,
        program: &str,
        predicate: String,
        bindings: &Bindings,
        verdict: Verdict,
        witness: Option<OutcomeRepr>,
    ) -> SpecReport {
        SpecReport {
            program: program.to_string(),
            inputs: bindings.describe(),
            mode: "comparison".to_string(),
            predicate,
            verdict,
            witness,
            counterexample: None,
            outcomes: 0,
            nodes: 0,
            budget_exhausted: verdict == Verdict::Abstain,
        }
    }
}

fn verdict_of(b: bool) -> Verdict {
    if b {
        Verdict::True
    } else {
        Verdict::False
    }
}

/// Runs one case study over a grid; one report per checked claim.
pub fn run_case_study(
    cs: CaseStudy,
    grid: &Grid,
    budget_limit: u64,
) -> Result<Vec<SpecReport>, String> {
    let ctx = Ctx { budget_limit };
    match cs {
        CaseStudy::AppendTake => append_take(&ctx, grid),
        CaseStudy::TakeVsTakePrime => take_vs_take_prime(&ctx, grid),
        CaseStudy::RevVsRevPrime => rev_vs_rev_prime(&ctx, grid),
        CaseStudy::FoldlVsFoldr => foldl_vs_foldr(&ctx, grid),
    }
}

fn append_take(ctx: &Ctx, grid: &Grid) -> Result<Vec<SpecReport>, String> {
    let prog = corpus::append_take_prog();
    let main = corpus::append_take_main();
    let mut reports = Vec::new();
    for lx in 0..=grid.max_xs {
        for ly in 0..=grid.max_ys {
            for n in 0..=grid.max_n {
                let xs = xs_of(lx);
                let ys = ys_of(ly);
                let inputs = corpus::inputs_n_xs_ys(n, &xs, &ys);
                let env = corpus::exact_env(&inputs);
                let b = bindings_n_xs_ys(Some(n), &xs, Some(&ys));
                let bound = 2 * n + 1;
                let (verdict, witness) =
                    match min_cost_witness(&prog, &main, &env, &Demand::Full, &mut ctx.budget()) {
                        Err(EvalError::BudgetExceeded { .. }) => (Verdict::Abstain, None),
                        Err(e) => return Err(e.to_string()),
                        Ok(None) => (Verdict::False, None),
                        Ok(Some((c, v))) => {
                            let ok = if n > 0 && n <= lx {
                                c == bound
                            } else {
                                c <= bound
                            };
                            (
                                verdict_of(ok),
                                Some(OutcomeRepr { value: v.to_string(), cost: c }),
                            )
                        }
                    };
                let predicate = if n > 0 && n <= lx {
                    format!("min full-demand cost = 2n+1 = {}", bound)
                } else {
                    format!("min full-demand cost <= 2n+1 = {}", bound)
                };
                reports.push(ctx.comparison_report("take n (append xs ys)", predicate, &b, verdict, witness));
            }
        }
    }
    Ok(reports)
}

fn take_vs_take_prime(ctx: &Ctx, grid: &Grid) -> Result<Vec<SpecReport>, String> {
    let prog = corpus::take_tr_prog();
    let take_main = IrTerm::def_call("take", &["n", "xs"]);
    let take_tr_main = IrTerm::def_call("take_tr", &["n", "xs"]);
    let mut reports = Vec::new();
    for lx in 0..=grid.max_xs {
        for n in 0..=grid.max_n {
            let xs = xs_of(lx);
            let inputs = corpus::inputs_n_xs(n, &xs);
            let env = corpus::exact_env(&inputs);
            let b = bindings_n_xs_ys(Some(n), &xs, None);

            // the tail-recursive variant has a single cost, decided by n
            // and xs alone
            let golden = n.min(lx) + 1;
            let pred = CostPredicate {
                value: ValueCond::Any,
                lo: CostExpr::Const(golden),
                hi: CostExpr::Const(golden),
            };
            let mut rep = check_pessimistic(
                &prog,
                &take_tr_main,
                &env,
                &pred,
                &b,
                "take_tr",
                &mut ctx.budget(),
            )?;
            rep.predicate = format!("all outcomes cost min(n,|xs|)+1 = {}", golden);
            reports.push(rep);

            // under a weak-head demand the lazy take wins outright
            if n >= 2 && lx >= n {
                let m_take = ctx.min(&prog, &take_main, &env, &Demand::Whnf);
                let m_tr = ctx.min(&prog, &take_tr_main, &env, &Demand::Whnf);
                let (verdict, witness) = match (m_take, m_tr) {
                    (Ok(Some(a)), Ok(Some(b))) => (
                        verdict_of(a < b),
                        Some(OutcomeRepr {
                            value: format!("take {} vs take_tr {}", a, b),
                            cost: a,
                        }),
                    ),
                    (Err(EvalError::BudgetExceeded { .. }), _)
                    | (_, Err(EvalError::BudgetExceeded { .. })) => (Verdict::Abstain, None),
                    (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
                    _ => (Verdict::False, None),
                };
                reports.push(ctx.comparison_report(
                    "take vs take_tr",
                    "min_cost(take, whnf) < min_cost(take_tr, whnf)".to_string(),
                    &b,
                    verdict,
                    witness,
                ));
            }

            // the lazy take's cost scales with its demand
            for j in 1..=n.min(lx) {
                let m = ctx.min(&prog, &take_main, &env, &demand_conses(j));
                let (verdict, witness) = match m {
                    Err(EvalError::BudgetExceeded { .. }) => (Verdict::Abstain, None),
                    Err(e) => return Err(e.to_string()),
                    Ok(None) => (Verdict::False, None),
                    Ok(Some(c)) => (
                        verdict_of(c <= j),
                        Some(OutcomeRepr { value: format!("{} conses", j), cost: c }),
                    ),
                };
                reports.push(ctx.comparison_report(
                    "take",
                    format!("min_cost(take, conses({})) <= {}", j, j),
                    &b,
                    verdict,
                    witness,
                ));
            }
        }
    }
    Ok(reports)
}

fn rev_vs_rev_prime(ctx: &Ctx, grid: &Grid) -> Result<Vec<SpecReport>, String> {
    let rev = corpus::rev_prog();
    let rev_naive = corpus::rev_naive_prog();
    let rev_main = IrTerm::def_call("rev", &["xs"]);
    let naive_main = IrTerm::def_call("rev_naive", &["xs"]);
    let mut reports = Vec::new();
    for lx in 0..=grid.max_xs {
        let xs = xs_of(lx);
        let inputs = corpus::inputs_xs(&xs);
        let env = corpus::exact_env(&inputs);
        let b = bindings_n_xs_ys(None, &xs, None);
        let golden = lx + 1;
        let reversed: Vec<u64> = xs.iter().rev().copied().collect();

        let pred = CostPredicate {
            value: ValueCond::EqualsExact(PureValue::list(&reversed)),
            lo: CostExpr::Const(golden),
            hi: CostExpr::Const(golden),
        };
        let mut rep =
            check_pessimistic(&rev, &rev_main, &env, &pred, &b, "rev", &mut ctx.budget())?;
        rep.predicate = format!("all outcomes exact reverse at cost |xs|+1 = {}", golden);
        reports.push(rep);

        let pred = CostPredicate {
            value: ValueCond::IsApprox(PureValue::list(&reversed)),
            lo: CostExpr::Const(golden),
            hi: CostExpr::Const(golden),
        };
        let mut rep = check_pessimistic(
            &rev_naive,
            &naive_main,
            &env,
            &pred,
            &b,
            "rev_naive",
            &mut ctx.budget(),
        )?;
        rep.predicate = format!(
            "all outcomes approximate reverse at cost |xs|+1 = {}",
            golden
        );
        reports.push(rep);

        // demand independence: the weakest and strongest demands cost the
        // same
        for (name, prog, main) in [
            ("rev", &rev, &rev_main),
            ("rev_naive", &rev_naive, &naive_main),
        ] {
            let whnf = ctx.min(prog, main, &env, &Demand::Whnf);
            let full = ctx.min(prog, main, &env, &Demand::Full);
            let (verdict, witness) = match (whnf, full) {
                (Ok(Some(a)), Ok(Some(c))) => (
                    verdict_of(a == c && c == golden),
                    Some(OutcomeRepr {
                        value: format!("whnf {} / full {}", a, c),
                        cost: c,
                    }),
                ),
                (Err(EvalError::BudgetExceeded { .. }), _)
                | (_, Err(EvalError::BudgetExceeded { .. })) => (Verdict::Abstain, None),
                (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
                _ => (Verdict::False, None),
            };
            reports.push(ctx.comparison_report(
                name,
                "min cost independent of demand (whnf = full)".to_string(),
                &b,
                verdict,
                witness,
            ));
        }
    }
    Ok(reports)
}

fn foldl_vs_foldr(ctx: &Ctx, grid: &Grid) -> Result<Vec<SpecReport>, String> {
    let prog = corpus::folds_prog();
    let foldr_main = IrTerm::def_call("foldr_f", &["xs"]);
    let foldl_main = IrTerm::def_call("foldl_f", &["xs"]);
    let mut reports = Vec::new();
    for lx in 0..=grid.max_xs {
        let xs = xs_of(lx);
        let inputs = corpus::inputs_xs(&xs);
        let env = corpus::exact_env(&inputs);
        let b = bindings_n_xs_ys(None, &xs, None);
        let golden = 2 * lx + 1;

        let fr = ctx.min(&prog, &foldr_main, &env, &Demand::Full);
        let fl = ctx.min(&prog, &foldl_main, &env, &Demand::Full);
        let (verdict, witness) = match (fr, fl) {
            (Ok(Some(a)), Ok(Some(c))) => (
                verdict_of(a == c && c == golden),
                Some(OutcomeRepr { value: format!("foldr {} / foldl {}", a, c), cost: c }),
            ),
            (Err(EvalError::BudgetExceeded { .. }), _)
            | (_, Err(EvalError::BudgetExceeded { .. })) => (Verdict::Abstain, None),
            (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
            _ => (Verdict::False, None),
        };
        reports.push(ctx.comparison_report(
            "foldr vs foldl",
            format!("equal min full-demand cost 2|xs|+1 = {}", golden),
            &b,
            verdict,
            witness,
        ));

        let mr = max_cost(&prog, &foldr_main, &env, &Demand::Skip, &mut ctx.budget());
        let ml = max_cost(&prog, &foldl_main, &env, &Demand::Skip, &mut ctx.budget());
        let (verdict, witness) = match (mr, ml) {
            (Ok(Some(a)), Ok(Some(c))) => (
                verdict_of(a == c),
                Some(OutcomeRepr { value: format!("foldr {} / foldl {}", a, c), cost: c }),
            ),
            (Err(EvalError::BudgetExceeded { .. }), _)
            | (_, Err(EvalError::BudgetExceeded { .. })) => (Verdict::Abstain, None),
            (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
            _ => (Verdict::False, None),
        };
        reports.push(ctx.comparison_report(
            "foldr vs foldl",
            "equal worst-case cost".to_string(),
            &b,
            verdict,
            witness,
        ));

        if lx >= 2 {
            let fr = ctx.min(&prog, &foldr_main, &env, &demand_conses(1));
            let fl = ctx.min(&prog, &foldl_main, &env, &demand_conses(1));
            let (verdict, witness) = match (fr, fl) {
                (Ok(Some(a)), Ok(Some(c))) => (
                    verdict_of(a < c),
                    Some(OutcomeRepr { value: format!("foldr {} / foldl {}", a, c), cost: a }),
                ),
                (Err(EvalError::BudgetExceeded { .. }), _)
                | (_, Err(EvalError::BudgetExceeded { .. })) => (Verdict::Abstain, None),
                (Err(e), _) | (_, Err(e)) => return Err(e.to_string()),
                _ => (Verdict::False, None),
            };
            reports.push(ctx.comparison_report(
                "foldr vs foldl",
                "min_cost(foldr, conses(1)) < min_cost(foldl, conses(1))".to_string(),
                &b,
                verdict,
                witness,
            ));
        }
    }
    Ok(reports)
}

/// Folds a report list into the process exit code: 0 when everything
/// passed, 1 on any failure, otherwise 2 when something abstained.
pub fn exit_code(reports: &[SpecReport]) -> i32 {
    let mut code = 0;
    for r in reports {
        match r.verdict {
            Verdict::False => return 1,
            Verdict::Abstain => code = 2,
            _ => {}
        }
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_append_take_grid_passes() {
        let grid = Grid { max_xs: 3, max_ys: 2, max_n: 3 };
        let reports = run_case_study(CaseStudy::AppendTake, &grid, 1_000_000).unwrap();
        for r in &reports {
            assert!(r.verdict.passed(), "{}", r.line());
        }
        assert_eq!(exit_code(&reports), 0);
    }

    #[test]
    fn small_folds_grid_passes() {
        let grid = Grid { max_xs: 3, max_ys: 0, max_n: 0 };
        let reports = run_case_study(CaseStudy::FoldlVsFoldr, &grid, 1_000_000).unwrap();
        for r in &reports {
            assert!(r.verdict.passed(), "{}", r.line());
        }
    }
}
