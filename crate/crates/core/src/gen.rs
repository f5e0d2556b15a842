//! Seeded random generation of pure values, approximations, demands, and
//! small IR computations; used by the property suites and the logic-rule
//! validator. Everything is driven by an explicit seed for reproducibility.

use crate::ir::IrTerm;
use crate::value::{AValue, Demand, Env, PureValue, TVal};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn nat(&mut self, bound: u64) -> u64 {
        self.rng.gen_range(0..bound)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// A pure list of naturals with length below `max_len`.
    pub fn pure_list(&mut self, max_len: usize) -> PureValue {
        let len = self.rng.gen_range(0..=max_len);
        let elems: Vec<u64> = (0..len).map(|_| self.nat(10)).collect();
        PureValue::list(&elems)
    }

    /// First-order pure values: naturals, units, and (possibly nested)
    /// lists.
    pub fn pure_value(&mut self, depth: usize) -> PureValue {
        match self.rng.gen_range(0..if depth == 0 { 3 } else { 4 }) {
            0 => PureValue::Nat(self.nat(10)),
            1 => PureValue::Unit,
            2 => PureValue::Nil,
            _ => {
                let len = self.rng.gen_range(1..=3);
                let mut v = PureValue::Nil;
                for _ in 0..len {
                    v = PureValue::Cons(Box::new(self.pure_value(depth - 1)), Box::new(v));
                }
                v
            }
        }
    }

    /// A random approximation of a pure value: each field independently
    /// kept or replaced by `Undefined`. `is_approx` holds by construction.
    pub fn approx_of(&mut self, p: &PureValue) -> AValue {
        match p {
            PureValue::Unit => AValue::Unit,
            PureValue::Nat(n) => AValue::Nat(*n),
            PureValue::Nil => AValue::Nil,
            PureValue::Cons(h, t) => {
                AValue::Cons(self.tval_approx_of(h), self.tval_approx_of(t))
            }
        }
    }

    pub fn tval_approx_of(&mut self, p: &PureValue) -> TVal {
        if self.coin(0.25) {
            TVal::Undefined
        } else {
            TVal::thunk(self.approx_of(p))
        }
    }

    /// A weakening of an approximation: some defined positions forgotten.
    /// The result is less defined than the input.
    pub fn weaken(&mut self, a: &AValue) -> AValue {
        match a {
            AValue::Cons(h, t) => AValue::Cons(self.weaken_tval(h), self.weaken_tval(t)),
            other => other.clone(),
        }
    }

    pub fn weaken_tval(&mut self, t: &TVal) -> TVal {
        match t {
            TVal::Undefined => TVal::Undefined,
            TVal::Thunk(v) => {
                if self.coin(0.3) {
                    TVal::Undefined
                } else {
                    TVal::thunk(self.weaken(v))
                }
            }
        }
    }

    /// An arbitrary first-order approximation value (not tied to any pure
    /// value; constructor clashes with other values are possible).
    pub fn avalue(&mut self, depth: usize) -> AValue {
        match self.rng.gen_range(0..if depth == 0 { 3 } else { 4 }) {
            0 => AValue::Nat(self.nat(6)),
            1 => AValue::Unit,
            2 => AValue::Nil,
            _ => AValue::Cons(self.tval(depth - 1), self.tval(depth - 1)),
        }
    }

    pub fn tval(&mut self, depth: usize) -> TVal {
        if self.coin(0.3) {
            TVal::Undefined
        } else {
            TVal::thunk(self.avalue(depth))
        }
    }

    /// A random demand, weighted toward the literal fragment.
    pub fn demand(&mut self, depth: usize) -> Demand {
        match self.rng.gen_range(0..if depth == 0 { 6 } else { 7 }) {
            0 => Demand::Skip,
            1 => Demand::Whnf,
            2 => Demand::Full,
            3 => Demand::Nil,
            4 => Demand::Nat(self.nat(6)),
            5 => Demand::Unit,
            _ => Demand::cons(self.demand(depth - 1), self.demand(depth - 1)),
        }
    }

    /// A demand no stronger than the input: every value meeting `d` meets
    /// the result.
    pub fn weaken_demand(&mut self, d: &Demand) -> Demand {
        if self.coin(0.3) {
            return Demand::Skip;
        }
        match d {
            Demand::Skip => Demand::Skip,
            Demand::Whnf => Demand::Whnf,
            Demand::Full => {
                if self.coin(0.5) {
                    Demand::Whnf
                } else {
                    Demand::Full
                }
            }
            Demand::Unit => Demand::Unit,
            Demand::Nat(n) => Demand::Nat(*n),
            Demand::Nil => Demand::Nil,
            Demand::Cons(h, t) => {
                if self.coin(0.2) {
                    Demand::Whnf
                } else {
                    Demand::cons(self.weaken_demand(h), self.weaken_demand(t))
                }
            }
        }
    }

    /// A small closed computation together with an environment for its
    /// free variables. The grammar covers the five monadic combinators
    /// plus value construction, and never builds a term that can raise a
    /// runtime shape error: there are no eliminators besides `forcing`.
    pub fn comp(&mut self, depth: usize) -> (IrTerm, Env) {
        let mut env = Env::new();
        let n_vars = self.rng.gen_range(1..=3);
        for i in 0..n_vars {
            env.insert(format!("v{}", i), self.tval(2));
        }
        let vars: Vec<String> = env.keys().cloned().collect();
        let t = self.comp_in(depth, &vars);
        (t, env)
    }

    fn comp_in(&mut self, depth: usize, scope: &[String]) -> IrTerm {
        if depth == 0 {
            return self.leaf(scope);
        }
        match self.rng.gen_range(0..8) {
            0 | 1 => IrTerm::tick_then(self.comp_in(depth - 1, scope)),
            2 | 3 => {
                let first = self.comp_in(depth - 1, scope);
                let binder = format!("b{}", depth);
                let mut scope2: Vec<String> = scope.to_vec();
                scope2.push(binder.clone());
                let rest = self.comp_in(depth - 1, &scope2);
                IrTerm::bind(first, binder, rest)
            }
            4 => {
                let body = self.comp_in(depth - 1, scope);
                let binder = format!("x{}", depth);
                let mut scope2: Vec<String> = scope.to_vec();
                scope2.push(binder.clone());
                let rest = self.comp_in(depth - 1, &scope2);
                IrTerm::let_thunk(binder, body, rest)
            }
            5 => {
                let v = self.pick(scope);
                let binder = format!("y{}", depth);
                let mut scope2: Vec<String> = scope.to_vec();
                scope2.push(binder.clone());
                let rest = self.comp_in(depth - 1, &scope2);
                IrTerm::forcing(v, binder, rest)
            }
            _ => self.leaf(scope),
        }
    }

    fn leaf(&mut self, scope: &[String]) -> IrTerm {
        match self.rng.gen_range(0..5) {
            0 => IrTerm::ret_unit(),
            1 => IrTerm::ret_nat(self.nat(5)),
            2 => IrTerm::MkNil,
            3 => {
                let h = self.pick(scope);
                let t = self.pick(scope);
                IrTerm::mk_cons(h, t)
            }
            _ => IrTerm::ret_var(self.pick(scope)),
        }
    }

    fn pick(&mut self, scope: &[String]) -> String {
        scope[self.rng.gen_range(0..scope.len())].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::is_approx;
    use crate::eval::{enumerate, Budget};
    use crate::ir::IrProgram;

    #[test]
    fn generated_approximations_approximate() {
        let mut g = Gen::new(7);
        for _ in 0..200 {
            let p = g.pure_value(3);
            let a = g.approx_of(&p);
            assert!(is_approx(&a, &p), "{} should approximate {}", a, p);
        }
    }

    #[test]
    fn generated_computations_evaluate() {
        let prog = IrProgram::with_defs(vec![]);
        let mut g = Gen::new(11);
        for _ in 0..200 {
            let (t, env) = g.comp(3);
            enumerate(&prog, &t, &env, &mut Budget::default())
                .unwrap_or_else(|e| panic!("generated term failed: {} on {:?}", e, t));
        }
    }

    #[test]
    fn weaken_demand_is_sound() {
        let mut g = Gen::new(13);
        for _ in 0..300 {
            let p = g.pure_value(3);
            let v = g.approx_of(&p);
            let d = g.demand(2);
            let w = g.weaken_demand(&d);
            if d.met_by_value(&v) {
                assert!(w.met_by_value(&v), "weakening must stay met: {} {} {}", d, w, v);
            }
        }
    }
}
