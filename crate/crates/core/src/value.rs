//! The semantic domains: thunk values, approximation values, outcomes of
//! nondeterministic execution, pure values, and demands.
//!
//! A thunk is a value-level placeholder: either a computed value
//! (`Thunk v`) or `Undefined`, which approximates every value of the type.
//! Approximation values are constructor trees whose fields are thunks; an
//! execution outcome pairs such a value with a cost in ticks.

use crate::ir::IrTerm;
use std::collections::BTreeMap;
use std::fmt;

/// A thunk: a known value or the undefined placeholder produced by
/// skipping a computation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TVal {
    Undefined,
    Thunk(Box<AValue>),
}

impl TVal {
    pub fn thunk(v: AValue) -> TVal {
        TVal::Thunk(Box::new(v))
    }
}

/// Environments bind variables to thunks.
pub type Env = BTreeMap<String, TVal>;

/// Approximation values: constructor trees with thunked fields.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AValue {
    Unit,
    Nat(u64),
    Nil,
    Cons(TVal, TVal),
    /// A closure. The environment is restricted to the free variables of
    /// the body; equality is structural over (env, param, body).
    Clos {
        env: Env,
        param: String,
        body: Box<IrTerm>,
    },
}

impl AValue {
    /// True when no `Undefined` occurs anywhere in the value.
    pub fn fully_defined(&self) -> bool {
        match self {
            AValue::Unit | AValue::Nat(_) | AValue::Nil => true,
            AValue::Cons(h, t) => tval_fully_defined(h) && tval_fully_defined(t),
            // A closure has no observable definedness structure.
            AValue::Clos { .. } => true,
        }
    }
}

fn tval_fully_defined(t: &TVal) -> bool {
    match t {
        TVal::Undefined => false,
        TVal::Thunk(v) => v.fully_defined(),
    }
}

/// Result value of a computation: a plain value for ordinary terms, or a
/// thunk for a bare `thunk`-computation (which has type `T a`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvalValue {
    Val(AValue),
    Thunk(TVal),
}

impl EvalValue {
    pub fn as_avalue(&self) -> Option<&AValue> {
        match self {
            EvalValue::Val(v) => Some(v),
            EvalValue::Thunk(_) => None,
        }
    }
}

/// One nondeterministic execution result: a value and its cost in ticks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome {
    pub value: EvalValue,
    pub cost: u64,
}

impl Outcome {
    pub fn new(value: EvalValue, cost: u64) -> Self {
        Outcome { value, cost }
    }
}

/// Pure (fully defined, first-order) values of the source language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PureValue {
    Unit,
    Nat(u64),
    Nil,
    Cons(Box<PureValue>, Box<PureValue>),
}

impl PureValue {
    pub fn list(elems: &[u64]) -> PureValue {
        let mut v = PureValue::Nil;
        for &e in elems.iter().rev() {
            v = PureValue::Cons(Box::new(PureValue::Nat(e)), Box::new(v));
        }
        v
    }

    /// Spine length, for list-shaped values.
    pub fn len(&self) -> u64 {
        match self {
            PureValue::Cons(_, t) => 1 + t.len(),
            _ => 0,
        }
    }

    pub fn as_nats(&self) -> Option<Vec<u64>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                PureValue::Nil => return Some(out),
                PureValue::Cons(h, t) => {
                    match &**h {
                        PureValue::Nat(n) => out.push(*n),
                        _ => return None,
                    }
                    cur = t;
                }
                _ => return None,
            }
        }
    }
}

/// A demand: how much of a result a consumer will force. Demands are
/// approximation-value patterns; a result meets a demand when the demand
/// is less defined than the result.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Demand {
    /// No demand at this position (written `_` or `undef`).
    Skip,
    /// Any outermost constructor; field contents unconstrained.
    Whnf,
    /// Everything from this position down must be defined.
    Full,
    Unit,
    Nat(u64),
    Nil,
    Cons(Box<Demand>, Box<Demand>),
}

impl Demand {
    pub fn cons(head: Demand, tail: Demand) -> Demand {
        Demand::Cons(Box::new(head), Box::new(tail))
    }

    /// Whether a thunk satisfies this demand.
    pub fn met_by_tval(&self, t: &TVal) -> bool {
        match self {
            Demand::Skip => true,
            d => match t {
                TVal::Undefined => false,
                TVal::Thunk(v) => d.met_by_value(v),
            },
        }
    }

    /// Whether a (weak-head) value satisfies this demand.
    pub fn met_by_value(&self, v: &AValue) -> bool {
        match self {
            Demand::Skip | Demand::Whnf => true,
            Demand::Full => v.fully_defined(),
            Demand::Unit => matches!(v, AValue::Unit),
            Demand::Nat(n) => matches!(v, AValue::Nat(m) if m == n),
            Demand::Nil => matches!(v, AValue::Nil),
            Demand::Cons(dh, dt) => match v {
                AValue::Cons(h, t) => dh.met_by_tval(h) && dt.met_by_tval(t),
                _ => false,
            },
        }
    }

    pub fn met_by(&self, v: &EvalValue) -> bool {
        match v {
            EvalValue::Val(v) => self.met_by_value(v),
            EvalValue::Thunk(t) => self.met_by_tval(t),
        }
    }

    /// The literal fragment of the demand language, viewed as an
    /// approximation value (`Skip` is `Undefined`). `Whnf` and `Full`
    /// stand for families of approximations and have no single value.
    pub fn to_tval(&self) -> Option<TVal> {
        match self {
            Demand::Skip => Some(TVal::Undefined),
            Demand::Whnf | Demand::Full => None,
            Demand::Unit => Some(TVal::thunk(AValue::Unit)),
            Demand::Nat(n) => Some(TVal::thunk(AValue::Nat(*n))),
            Demand::Nil => Some(TVal::thunk(AValue::Nil)),
            Demand::Cons(dh, dt) => {
                let h = dh.to_tval()?;
                let t = dt.to_tval()?;
                Some(TVal::thunk(AValue::Cons(h, t)))
            }
        }
    }
}

impl fmt::Display for TVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TVal::Undefined => write!(f, "_"),
            TVal::Thunk(v) => write!(f, "{}", v),
        }
    }
}

impl fmt::Display for AValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AValue::Unit => write!(f, "unit"),
            AValue::Nat(n) => write!(f, "{}", n),
            AValue::Nil => write!(f, "nil"),
            AValue::Cons(h, t) => write!(f, "cons({}, {})", h, t),
            AValue::Clos { param, .. } => write!(f, "<fun {}>", param),
        }
    }
}

impl fmt::Display for EvalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalValue::Val(v) => write!(f, "{}", v),
            EvalValue::Thunk(t) => match t {
                TVal::Undefined => write!(f, "undef"),
                TVal::Thunk(v) => write!(f, "thunk({})", v),
            },
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.value, self.cost)
    }
}

impl fmt::Display for PureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PureValue::Unit => write!(f, "unit"),
            PureValue::Nat(n) => write!(f, "{}", n),
            PureValue::Nil => write!(f, "[]"),
            PureValue::Cons(h, t) => {
                write!(f, "[{}", h)?;
                let mut cur = t;
                loop {
                    match &**cur {
                        PureValue::Nil => break,
                        PureValue::Cons(h, t) => {
                            write!(f, ", {}", h)?;
                            cur = t;
                        }
                        other => {
                            write!(f, " . {}", other)?;
                            break;
                        }
                    }
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Display for Demand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Demand::Skip => write!(f, "_"),
            Demand::Whnf => write!(f, "whnf"),
            Demand::Full => write!(f, "full"),
            Demand::Unit => write!(f, "unit"),
            Demand::Nat(n) => write!(f, "{}", n),
            Demand::Nil => write!(f, "nil"),
            Demand::Cons(h, t) => write!(f, "cons({}, {})", h, t),
        }
    }
}
