//! Cost analysis for lazy evaluation, built on the clairvoyance monad.
//!
//! A small total lazy functional language is parsed, type-checked,
//! A-normalized ([`syntax`], [`parse`], [`typecheck`], [`anf`]), and
//! translated into a cost-instrumented nondeterministic intermediate form
//! ([`ir`], [`translate`]). The IR is executed under the clairvoyance-monad
//! semantics ([`eval`]): each thunk allocation forks the execution into an
//! "evaluate now" branch and a "skip" branch, so a program denotes a finite
//! set of (value, cost) outcomes. Pessimistic (all branches) and optimistic
//! (some branch) specifications over those outcome sets are checked by
//! enumeration ([`speclab`]), and two independent reference semantics — a
//! memoizing call-by-need machine and the clairvoyant call-by-value
//! operational semantics ([`need`], [`ccv`]) — cross-validate both values
//! and costs.

pub mod anf;
pub mod approx;
pub mod ccv;
pub mod corpus;
pub mod eval;
pub mod gen;
pub mod ir;
pub mod need;
pub mod parse;
pub mod pure;
pub mod casestudy;
pub mod speclab;
pub mod syntax;
pub mod translate;
pub mod typecheck;
pub mod value;

pub use eval::{enumerate, max_cost, min_cost, outcomes_meeting, Budget, EvalError};
pub use ir::{IrDef, IrProgram, IrTerm, IrValue};
pub use syntax::{Program, Term, Ty};
pub use translate::TickMode;
pub use value::{AValue, Demand, Env, EvalValue, Outcome, PureValue, TVal};
