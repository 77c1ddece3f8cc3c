//! Sparse multivariate polynomials and rational functions over exact scalars.
//!
//! Canonical form: the variable list is sorted and free of unused symbols,
//! terms are keyed by exponent vectors under graded-lexicographic order, and
//! zero coefficients are never stored. The formal unit `l` is carried as a
//! dedicated exponent slot so that sums of terms with distinct `l`-powers
//! remain representable.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::ring::Ring;
use crate::scalar::Scalar;
use crate::sym::Sym;

/// Exponent vector with graded-lex ordering (degree first, then lex).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    /// Sorted, deduplicated, no unused entries. The `l`-exponent rides in a
    /// virtual slot appended after the listed variables.
    vars: Vec<Sym>,
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { vars: vec![], terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let lam = c.lam_exp();
        assert!(lam >= 0, "negative l-powers are not representable in Poly");
        let mut terms = BTreeMap::new();
        terms.insert(Mono(vec![lam as u16]), c.rational_part());
        Poly { vars: vec![], terms }
    }

    pub fn var(s: Sym) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Mono(vec![1, 0]), Scalar::one());
        Poly { vars: vec![s], terms }
    }

    pub fn from_int(v: i64) -> Self {
        Poly::constant(Scalar::from_int(v))
    }

    pub fn vars(&self) -> &[Sym] {
        &self.vars
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.0.iter().all(|&e| e == 0) && c.is_one())
                .unwrap_or(false)
    }

    /// Constant polynomials (in the listed variables; `l` still allowed).
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let lam = *m.0.last().unwrap();
        if m.0[..m.0.len() - 1].iter().any(|&e| e != 0) {
            return None;
        }
        Some(c.clone().with_lam(lam as i32))
    }

    /// Drops variables that no longer occur.
    fn compress(&mut self) {
        if self.terms.is_empty() {
            self.vars.clear();
            return;
        }
        let n = self.vars.len();
        let mut used = vec![false; n];
        for m in self.terms.keys() {
            for (i, &e) in m.0[..n].iter().enumerate() {
                if e != 0 {
                    used[i] = true;
                }
            }
        }
        if used.iter().all(|&u| u) {
            return;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| used[i]).collect();
        self.vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let old = std::mem::take(&mut self.terms);
        for (m, c) in old {
            let mut e: Vec<u16> = keep.iter().map(|&i| m.0[i]).collect();
            e.push(*m.0.last().unwrap());
            self.terms.insert(Mono(e), c);
        }
    }

    /// Merged variable context of two polynomials plus index maps into it.
    fn merge_vars(a: &[Sym], b: &[Sym]) -> (Vec<Sym>, Vec<usize>, Vec<usize>) {
        let mut vars: Vec<Sym> = a.iter().chain(b.iter()).cloned().collect();
        vars.sort();
        vars.dedup();
        let pos = |s: &Sym| vars.binary_search(s).unwrap();
        let ma = a.iter().map(&pos).collect();
        let mb = b.iter().map(&pos).collect();
        (vars, ma, mb)
    }

    fn remap(&self, vars: &[Sym], map: &[usize]) -> BTreeMap<Mono, Scalar> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = vec![0u16; vars.len() + 1];
            for (i, &ex) in m.0[..self.vars.len()].iter().enumerate() {
                e[map[i]] = ex;
            }
            e[vars.len()] = *m.0.last().unwrap();
            out.insert(Mono(e), c.clone());
        }
        out
    }

    fn insert_term(terms: &mut BTreeMap<Mono, Scalar>, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.vars == o.vars {
            let mut terms = self.terms.clone();
            for (m, c) in &o.terms {
                Self::insert_term(&mut terms, m.clone(), c.clone());
            }
            let mut p = Poly { vars: self.vars.clone(), terms };
            p.compress();
            return p;
        }
        let (vars, ma, mb) = Self::merge_vars(&self.vars, &o.vars);
        let mut terms = self.remap(&vars, &ma);
        for (m, c) in o.remap(&vars, &mb) {
            Self::insert_term(&mut terms, m, c);
        }
        let mut p = Poly { vars, terms };
        p.compress();
        p
    }

    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        Poly { vars: self.vars.clone(), terms }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if self.vars == o.vars {
            let mut terms = BTreeMap::new();
            for (m1, c1) in &self.terms {
                for (m2, c2) in &o.terms {
                    let e: Vec<u16> = m1
                        .0
                        .iter()
                        .zip(&m2.0)
                        .map(|(&a, &b)| a.checked_add(b).unwrap())
                        .collect();
                    Self::insert_term(&mut terms, Mono(e), c1.mul(c2));
                }
            }
            let mut p = Poly { vars: self.vars.clone(), terms };
            p.compress();
            return p;
        }
        let (vars, ma, mb) = Self::merge_vars(&self.vars, &o.vars);
        let ta = self.remap(&vars, &ma);
        let tb = o.remap(&vars, &mb);
        let mut terms = BTreeMap::new();
        for (m1, c1) in &ta {
            for (m2, c2) in &tb {
                let e: Vec<u16> =
                    m1.0.iter().zip(&m2.0).map(|(&a, &b)| a.checked_add(b).unwrap()).collect();
                Self::insert_term(&mut terms, Mono(e), c1.mul(c2));
            }
        }
        let mut p = Poly { vars, terms };
        p.compress();
        p
    }

    /// Drops every term whose power of `s` exceeds `max`.
    pub fn truncate_power(&self, s: &Sym, max: u16) -> Poly {
        let Some(i) = self.var_index(s) else {
            return self.clone();
        };
        let terms: BTreeMap<Mono, Scalar> = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[i] <= max)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        let mut p = Poly { vars: self.vars.clone(), terms };
        p.compress();
        p
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        self.mul(&Poly::constant(c.clone()))
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn var_index(&self, s: &Sym) -> Option<usize> {
        self.vars.binary_search(s).ok()
    }

    /// Partial derivative.
    pub fn derivative(&self, s: &Sym) -> Poly {
        let Some(i) = self.var_index(s) else {
            return Poly::zero();
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut v = m.0.clone();
            v[i] = e - 1;
            Self::insert_term(&mut terms, Mono(v), c.mul(&Scalar::from_int(e as i64)));
        }
        let mut p = Poly { vars: self.vars.clone(), terms };
        p.compress();
        p
    }

    /// Exact integral over the unit interval in one variable.
    pub fn integrate_unit_interval(&self, s: &Sym) -> Poly {
        let Some(i) = self.var_index(s) else {
            return self.clone();
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut v = m.0.clone();
            v[i] = 0;
            Self::insert_term(&mut terms, Mono(v), c.mul(&Scalar::inv_int(e as u64 + 1)));
        }
        let mut p = Poly { vars: self.vars.clone(), terms };
        p.compress();
        p
    }

    /// Coefficient of `s^k`, with `s` struck out.
    pub fn coeff_of(&self, s: &Sym, k: u16) -> Poly {
        let Some(i) = self.var_index(s) else {
            return if k == 0 { self.clone() } else { Poly::zero() };
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.0[i] != k {
                continue;
            }
            let mut v = m.0.clone();
            v[i] = 0;
            terms.insert(Mono(v), c.clone());
        }
        let mut p = Poly { vars: self.vars.clone(), terms };
        p.compress();
        p
    }

    pub fn max_power(&self, s: &Sym) -> u16 {
        match self.var_index(s) {
            None => 0,
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
        }
    }

    /// Simultaneous substitution of variables by polynomials; unlisted
    /// variables are retained.
    pub fn substitute(&self, bind: &BTreeMap<Sym, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let lam = *m.0.last().unwrap();
            let mut term = Poly::constant(c.clone().with_lam(lam as i32));
            for (i, &e) in m.0[..self.vars.len()].iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = match bind.get(&self.vars[i]) {
                    Some(p) => p.clone(),
                    None => Poly::var(self.vars[i].clone()),
                };
                term = term.mul(&base.pow(e as u32));
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitution of scalars for a subset of the variables.
    pub fn eval_partial(&self, bind: &BTreeMap<Sym, Scalar>) -> Poly {
        let poly_bind: BTreeMap<Sym, Poly> =
            bind.iter().map(|(s, v)| (s.clone(), Poly::constant(v.clone()))).collect();
        self.substitute(&poly_bind)
    }

    /// Substitution of rational functions for variables.
    pub fn substitute_rational(&self, bind: &BTreeMap<Sym, RationalFn>) -> RationalFn {
        let mut out = RationalFn::zero();
        for (m, c) in &self.terms {
            let lam = *m.0.last().unwrap();
            let mut term = RationalFn::from_poly(Poly::constant(c.clone().with_lam(lam as i32)));
            for (i, &e) in m.0[..self.vars.len()].iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = match bind.get(&self.vars[i]) {
                    Some(r) => r.clone(),
                    None => RationalFn::from_poly(Poly::var(self.vars[i].clone())),
                };
                for _ in 0..e {
                    term = term.mul(&base);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Leading (maximal) term under graded-lex.
    pub fn leading(&self) -> Option<(&Mono, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    /// Reconstructs each term's scalar with its `l`-power folded back in.
    pub fn terms_with_lambda(&self) -> Vec<(Vec<u16>, Scalar)> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let lam = *m.0.last().unwrap() as i32;
                (m.0[..self.vars.len()].to_vec(), c.clone().with_lam(lam))
            })
            .collect()
    }

    pub fn from_terms(vars: Vec<Sym>, terms: Vec<(Vec<u16>, Scalar)>) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len());
            let mut t = Poly::constant(c);
            for (i, &ex) in e.iter().enumerate() {
                if ex > 0 {
                    t = t.mul(&Poly::var(vars[i].clone()).pow(ex as u32));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Positive gcd of the rational coefficients (content), ignoring `l`.
    pub fn content(&self) -> Scalar {
        let mut it = self.terms.values();
        let first = match it.next() {
            None => return Scalar::one(),
            Some(c) => c,
        };
        let mut num = first.rational_part().abs();
        for c in it {
            num = gcd_scalar(&num, &c.rational_part().abs());
        }
        num
    }
}

fn gcd_scalar(a: &Scalar, b: &Scalar) -> Scalar {
    // gcd(p/q, r/s) = gcd(p s, r q) / (q s); any common positive divisor
    // normalization works here, exactness is all that matters.
    use num_bigint::BigInt;
    use num_integer::Integer;
    let n: BigInt = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Scalar::new(n, a.denom() * b.denom(), 0)
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Poly {
    fn cmp(&self, o: &Self) -> Ordering {
        self.vars
            .cmp(&o.vars)
            .then_with(|| self.terms.iter().cmp(o.terms.iter()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms_with_lambda() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &ex) in e.iter().enumerate() {
                if ex == 1 {
                    write!(f, "*{}", self.vars[i].name())?;
                } else if ex > 1 {
                    write!(f, "*{}^{}", self.vars[i].name(), ex)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn from_int(v: i64) -> Self {
        Poly::from_int(v)
    }
    fn try_inv(&self) -> Option<Self> {
        self.as_scalar().and_then(|s| s.inv()).map(Poly::constant)
    }
}

/// Quotient of two polynomials. Not reduced to lowest terms; equality is by
/// cross-multiplication. Canonical up to the denominator's content and sign.
#[derive(Clone, Debug)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn zero() -> Self {
        RationalFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RationalFn { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalFn { num, den: Poly::one() }
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RationalFn { num, den };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        // Make the denominator's leading coefficient positive and its
        // content 1; keeps integer growth in check without full gcd.
        let mut c = self.den.content();
        if self.den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            c = c.neg();
        }
        if !c.is_one() {
            let inv = Poly::constant(c.inv().unwrap());
            self.num = self.num.mul(&inv);
            self.den = self.den.mul(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RationalFn::new(self.num.add(&o.num), self.den.clone());
        }
        RationalFn::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        if self.is_zero() || o.is_zero() {
            return RationalFn::zero();
        }
        RationalFn::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<RationalFn> {
        if self.is_zero() {
            return None;
        }
        Some(RationalFn::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &RationalFn) -> RationalFn {
        self.mul(&o.inv().expect("division by zero rational function"))
    }

    /// d/ds via the quotient rule; not reduced.
    pub fn derivative(&self, s: &Sym) -> RationalFn {
        let dn = self.num.derivative(s);
        let dd = self.den.derivative(s);
        if dd.is_zero() {
            return RationalFn::new(dn, self.den.clone());
        }
        RationalFn::new(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    pub fn substitute(&self, bind: &BTreeMap<Sym, RationalFn>) -> RationalFn {
        let n = self.num.substitute_rational(bind);
        let d = self.den.substitute_rational(bind);
        n.div(&d)
    }

    pub fn eval(&self, bind: &BTreeMap<Sym, Scalar>) -> Option<Scalar> {
        let n = self.num.eval_partial(bind).as_scalar()?;
        let d = self.den.eval_partial(bind).as_scalar()?;
        if d.is_zero() {
            return None;
        }
        Some(n.div(&d))
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Ring for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn one() -> Self {
        RationalFn::one()
    }
    fn add(&self, o: &Self) -> Self {
        RationalFn::add(self, o)
    }
    fn neg(&self) -> Self {
        RationalFn::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFn::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        RationalFn::is_zero(self)
    }
    fn from_int(v: i64) -> Self {
        RationalFn::from_poly(Poly::from_int(v))
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn x() -> Poly {
        Poly::var(Sym::X(1))
    }
    fn y() -> Poly {
        Poly::var(Sym::X(2))
    }

    fn random_poly(rng: &mut Rng, vars: &[Sym], max_deg: u16, n_terms: usize) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..n_terms {
            let mut t = Poly::constant(Scalar::from_int(rng.small()));
            for v in vars {
                let e = rng.int_range(0, max_deg as i64) as u32;
                t = t.mul(&Poly::var(v.clone()).pow(e));
            }
            p = p.add(&t);
        }
        p
    }

    #[test]
    fn difference_of_squares() {
        let lhs = x().add(&y()).mul(&x().sub(&y()));
        let rhs = x().mul(&x()).sub(&y().mul(&y()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lambda_scalar_action() {
        let lx = x().scale(&Scalar::lambda());
        let two_lx = lx.scale(&Scalar::from_int(2));
        assert_eq!(two_lx, x().scale(&Scalar::from_int(2).mul(&Scalar::lambda())));
    }

    #[test]
    fn cube_matches_repeated_multiplication() {
        // (1+x)^3 against the brute-force product oracle.
        let b = Poly::one().add(&x());
        let brute = b.mul(&b).mul(&b);
        assert_eq!(b.pow(3), brute);
        let c = brute.coeff_of(&Sym::X(1), 2);
        assert_eq!(c.as_scalar().unwrap(), Scalar::from_int(3));
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        let vars = [Sym::X(1), Sym::X(2), Sym::Y(1, 1)];
        let mut rng = Rng::seeded(42);
        for _ in 0..100 {
            let a = random_poly(&mut rng, &vars, 3, 3);
            let b = random_poly(&mut rng, &vars, 3, 3);
            let c = random_poly(&mut rng, &vars, 3, 3);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.add(&b), b.add(&a));
        }
    }

    #[test]
    fn substitute_simple_value() {
        let p = x().pow(2);
        let mut bind = BTreeMap::new();
        bind.insert(Sym::X(1), Poly::constant(Scalar::from_frac(3, 2)));
        assert_eq!(p.substitute(&bind).as_scalar().unwrap(), Scalar::from_frac(9, 4));
    }

    #[test]
    fn substitute_respects_products() {
        let vars = [Sym::X(1), Sym::X(2)];
        let mut rng = Rng::seeded(9);
        for _ in 0..100 {
            let p = random_poly(&mut rng, &vars, 2, 3);
            let q = random_poly(&mut rng, &vars, 2, 3);
            let mut bind = BTreeMap::new();
            bind.insert(Sym::X(1), random_poly(&mut rng, &[Sym::X(2)], 2, 2));
            assert_eq!(p.mul(&q).substitute(&bind), p.substitute(&bind).mul(&q.substitute(&bind)));
        }
    }

    #[test]
    fn substitution_composition_law() {
        // substitute(substitute(p, f), g) = substitute(p, f after g), on
        // random instances; the two evaluation paths are the oracle.
        let mut rng = Rng::seeded(5);
        for _ in 0..50 {
            let p = random_poly(&mut rng, &[Sym::X(1)], 3, 3);
            let f = random_poly(&mut rng, &[Sym::X(1)], 2, 2);
            let g = random_poly(&mut rng, &[Sym::X(1)], 2, 2);
            let mut bf = BTreeMap::new();
            bf.insert(Sym::X(1), f.clone());
            let mut bg = BTreeMap::new();
            bg.insert(Sym::X(1), g.clone());
            let path1 = p.substitute(&bf).substitute(&bg);
            let mut bfg = BTreeMap::new();
            bfg.insert(Sym::X(1), f.substitute(&bg));
            let path2 = p.substitute(&bfg);
            assert_eq!(path1, path2);
        }
    }

    #[test]
    fn derivative_and_unit_integral() {
        let t = Sym::T(1);
        let p = Poly::var(t.clone()).pow(3).scale(&Scalar::from_int(4));
        assert_eq!(p.derivative(&t), Poly::var(t.clone()).pow(2).scale(&Scalar::from_int(12)));
        assert_eq!(p.integrate_unit_interval(&t), Poly::constant(Scalar::from_int(1)));
    }

    #[test]
    fn rational_equality_cross_multiplies() {
        let a = RationalFn::new(x(), y());
        let b = RationalFn::new(x().mul(&y()), y().mul(&y()));
        assert_eq!(a, b);
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn rational_field_ops() {
        let mut rng = Rng::seeded(17);
        for _ in 0..30 {
            let p = random_poly(&mut rng, &[Sym::X(1)], 2, 2);
            if p.is_zero() {
                continue;
            }
            let r = RationalFn::new(p.clone(), Poly::one().add(&x().pow(2)));
            let i = r.inv().unwrap();
            assert!(r.mul(&i).sub(&RationalFn::one()).is_zero());
        }
    }
}
