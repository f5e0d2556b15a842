//! The approximation algebra: `exact`, `is_approx`, `less_defined`,
//! `size_x`, `is_defined`, and demand construction.
//!
//! Approximations are partially ordered by definedness: `Undefined` is
//! below everything, and `exact p` (the injection of a pure value with
//! every field thunked) is maximal. `is_approx` is the relational
//! generalization of `exact`; it coincides with being less defined than
//! the exact approximation, but is implemented by direct structural
//! recursion so the two routes check each other.

use crate::value::{AValue, Demand, EvalValue, PureValue, TVal};

/// Injects a pure value: every field wrapped in a thunk, no `Undefined`
/// anywhere.
pub fn exact(p: &PureValue) -> AValue {
    match p {
        PureValue::Unit => AValue::Unit,
        PureValue::Nat(n) => AValue::Nat(*n),
        PureValue::Nil => AValue::Nil,
        PureValue::Cons(h, t) => AValue::Cons(exact_tval(h), exact_tval(t)),
    }
}

pub fn exact_tval(p: &PureValue) -> TVal {
    TVal::thunk(exact(p))
}

/// The definedness order on approximation values: `a` matches `b` except
/// that any subterm of `a` may be `Undefined`. A constructor clash at a
/// defined position is `false`, not an error.
pub fn less_defined(a: &AValue, b: &AValue) -> bool {
    match (a, b) {
        (AValue::Unit, AValue::Unit) => true,
        (AValue::Nat(n), AValue::Nat(m)) => n == m,
        (AValue::Nil, AValue::Nil) => true,
        (AValue::Cons(h1, t1), AValue::Cons(h2, t2)) => {
            less_defined_tval(h1, h2) && less_defined_tval(t1, t2)
        }
        // Closures are compared by identity only; they carry no
        // definedness structure of their own.
        (AValue::Clos { .. }, AValue::Clos { .. }) => a == b,
        _ => false,
    }
}

/// The order lifted through thunks: `Undefined` is below everything.
pub fn less_defined_tval(a: &TVal, b: &TVal) -> bool {
    match (a, b) {
        (TVal::Undefined, _) => true,
        (TVal::Thunk(_), TVal::Undefined) => false,
        (TVal::Thunk(x), TVal::Thunk(y)) => less_defined(x, y),
    }
}

pub fn less_defined_eval(a: &EvalValue, b: &EvalValue) -> bool {
    match (a, b) {
        (EvalValue::Val(x), EvalValue::Val(y)) => less_defined(x, y),
        (EvalValue::Thunk(x), EvalValue::Thunk(y)) => less_defined_tval(x, y),
        _ => false,
    }
}

/// Whether `a` approximates the pure value `p`. Defined by structural
/// recursion; equivalent to `less_defined(a, &exact(p))`.
pub fn is_approx(a: &AValue, p: &PureValue) -> bool {
    match (a, p) {
        (AValue::Unit, PureValue::Unit) => true,
        (AValue::Nat(n), PureValue::Nat(m)) => n == m,
        (AValue::Nil, PureValue::Nil) => true,
        (AValue::Cons(h, t), PureValue::Cons(ph, pt)) => {
            is_approx_tval(h, ph) && is_approx_tval(t, pt)
        }
        _ => false,
    }
}

pub fn is_approx_tval(a: &TVal, p: &PureValue) -> bool {
    match a {
        TVal::Undefined => true,
        TVal::Thunk(v) => is_approx(v, p),
    }
}

/// Spine length of a list approximation; `n0` is the weight of a present
/// nil, and an undefined tail weighs nothing.
pub fn size_x(n0: u64, xs: &TVal) -> u64 {
    match xs {
        TVal::Undefined => 0,
        TVal::Thunk(v) => match &**v {
            AValue::Nil => n0,
            AValue::Cons(_, t) => 1 + size_x(n0, t),
            _ => 0,
        },
    }
}

/// Whether a thunk holds a value.
pub fn is_defined(t: &TVal) -> bool {
    matches!(t, TVal::Thunk(_))
}

/// A demand for `n` cons cells with nothing demanded of the elements;
/// `n = 0` demands only an outermost constructor.
pub fn demand_conses(n: u64) -> Demand {
    if n == 0 {
        return Demand::Whnf;
    }
    let mut d = Demand::Skip;
    for _ in 0..n {
        d = Demand::cons(Demand::Skip, d);
    }
    d
}

/// The literal demand matching exactly the shape of a pure value.
pub fn demand_exact(p: &PureValue) -> Demand {
    match p {
        PureValue::Unit => Demand::Unit,
        PureValue::Nat(n) => Demand::Nat(*n),
        PureValue::Nil => Demand::Nil,
        PureValue::Cons(h, t) => Demand::cons(demand_exact(h), demand_exact(t)),
    }
}

/// Parses the demand grammar shared with the command line:
/// `whnf`, `conses(N)`, `full`, or a literal approximation such as
/// `cons(_, cons(4, undef))` where `_` and `undef` both mean undefined.
pub fn parse_demand(s: &str) -> Result<Demand, String> {
    let mut p = DemandParser { src: s.trim(), pos: 0 };
    let d = p.demand()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("trailing input in demand at byte {}", p.pos));
    }
    Ok(d)
}

struct DemandParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> DemandParser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..]
            .starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn demand(&mut self) -> Result<Demand, String> {
        self.skip_ws();
        let w = self.word();
        match w {
            "whnf" => Ok(Demand::Whnf),
            "full" => Ok(Demand::Full),
            "_" | "undef" => Ok(Demand::Skip),
            "nil" => Ok(Demand::Nil),
            "unit" => Ok(Demand::Unit),
            "conses" => {
                if !self.eat("(") {
                    return Err("expected `(` after `conses`".into());
                }
                let n = self.word();
                let n: u64 = n.parse().map_err(|_| format!("bad count `{}`", n))?;
                if !self.eat(")") {
                    return Err("expected `)` after conses count".into());
                }
                Ok(demand_conses(n))
            }
            "cons" => {
                if !self.eat("(") {
                    return Err("expected `(` after `cons`".into());
                }
                let h = self.demand()?;
                if !self.eat(",") {
                    return Err("expected `,` between cons fields".into());
                }
                let t = self.demand()?;
                if !self.eat(")") {
                    return Err("expected `)` closing cons".into());
                }
                Ok(Demand::cons(h, t))
            }
            w if !w.is_empty() && w.chars().all(|c| c.is_ascii_digit()) => {
                let n: u64 = w.parse().map_err(|_| format!("bad number `{}`", w))?;
                Ok(Demand::Nat(n))
            }
            w => Err(format!("unknown demand token `{}`", w)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_of_nil_and_cons() {
        assert_eq!(exact(&PureValue::Nil), AValue::Nil);
        let p = PureValue::list(&[1]);
        assert_eq!(
            exact(&p),
            AValue::Cons(TVal::thunk(AValue::Nat(1)), TVal::thunk(AValue::Nil))
        );
    }

    #[test]
    fn size_x_cases() {
        assert_eq!(size_x(0, &TVal::Undefined), 0);
        assert_eq!(size_x(1, &TVal::thunk(AValue::Nil)), 1);
        let xs = exact_tval(&PureValue::list(&[1, 2, 3]));
        assert_eq!(size_x(1, &xs), 4);
        assert_eq!(size_x(0, &xs), 3);
    }

    #[test]
    fn is_defined_cases() {
        assert!(is_defined(&TVal::thunk(AValue::Nil)));
        assert!(!is_defined(&TVal::Undefined));
    }

    #[test]
    fn less_defined_bottom_and_clash() {
        let full = exact(&PureValue::list(&[1, 2]));
        let partial = AValue::Cons(TVal::Undefined, exact_tval(&PureValue::list(&[2])));
        assert!(less_defined(&partial, &full));
        assert!(!less_defined(&full, &partial));
        let one_cons = AValue::Cons(TVal::thunk(AValue::Nat(1)), TVal::Undefined);
        assert!(!less_defined(&one_cons, &AValue::Nil));
    }

    #[test]
    fn demand_parsing() {
        assert_eq!(parse_demand("whnf").unwrap(), Demand::Whnf);
        assert_eq!(parse_demand("full").unwrap(), Demand::Full);
        assert_eq!(parse_demand("conses(2)").unwrap(), demand_conses(2));
        let d = parse_demand("cons(_, cons(4, undef))").unwrap();
        assert_eq!(
            d,
            Demand::cons(Demand::Skip, Demand::cons(Demand::Nat(4), Demand::Skip))
        );
        assert!(parse_demand("cons(_,)").is_err());
    }

    #[test]
    fn demand_conses_shape() {
        assert_eq!(demand_conses(0), Demand::Whnf);
        assert_eq!(
            demand_conses(2),
            Demand::cons(Demand::Skip, Demand::cons(Demand::Skip, Demand::Skip))
        );
    }

    #[test]
    fn conses_demand_met_by_partial_list() {
        let d = demand_conses(1);
        let v = AValue::Cons(TVal::thunk(AValue::Nat(1)), TVal::Undefined);
        assert!(d.met_by_value(&v));
        assert!(!demand_conses(2).met_by_value(&v));
    }
}
