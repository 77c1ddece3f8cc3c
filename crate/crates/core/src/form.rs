//! Exterior algebra over the invariant coframe of the frame bundle, with
//! simplex one-forms mixed in, and polynomial coefficients in slot-tagged
//! jet symbols.
//!
//! The differential implements the flat structure equations
//! `d theta^k = -omega^k_mu ^ theta^mu`, `d omega^i_j = -omega^i_k ^ omega^k_j`
//! together with a derivative table on the jet symbols: horizontal
//! derivatives append a direction to the symbol, vertical derivatives follow
//! the tensor transformation rule of one upper and many lower indices.

use std::collections::BTreeMap;
use std::fmt;

use crate::jet::GammaTable;
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::sym::{JetIdx, Sym};

/// Degree-one generator of the wedge algebra.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    /// Simplex one-form `dt_r`, `r >= 1`.
    Dt(u16),
    /// Canonical form component `theta^k`.
    Th(u8),
    /// Flat connection component `omega^i_j`.
    Om(u8, u8),
    /// Symmetrized connection dual `(omega^i_j + omega^j_i)/2` direction,
    /// used only after restriction to the quotient by the orthogonal part.
    Os(u8, u8),
}

impl Letter {
    pub fn name(&self) -> String {
        match self {
            Letter::Dt(r) => format!("dt{r}"),
            Letter::Th(k) => format!("t{k}"),
            Letter::Om(i, j) => format!("w{i}{j}"),
            Letter::Os(i, j) => format!("ws{i}{j}"),
        }
    }

    pub fn parse(s: &str) -> Option<Letter> {
        if let Some(r) = s.strip_prefix("dt") {
            return Some(Letter::Dt(r.parse().ok()?));
        }
        if let Some(r) = s.strip_prefix("ws") {
            let d: Vec<u8> = r.chars().map(|c| c.to_digit(10).unwrap() as u8).collect();
            if d.len() == 2 {
                return Some(Letter::Os(d[0], d[1]));
            }
            return None;
        }
        if let Some(r) = s.strip_prefix('w') {
            let d: Vec<u8> = r.chars().filter_map(|c| c.to_digit(10).map(|x| x as u8)).collect();
            if d.len() == 2 {
                return Some(Letter::Om(d[0], d[1]));
            }
            return None;
        }
        if let Some(r) = s.strip_prefix('t') {
            return Some(Letter::Th(r.parse().ok()?));
        }
        None
    }
}

/// Strictly increasing wedge word of degree-one letters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn single(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn dt_degree(&self) -> usize {
        self.0.iter().filter(|l| matches!(l, Letter::Dt(_))).count()
    }

    /// Merges two sorted words, tracking the Koszul sign; `None` on a
    /// repeated letter.
    pub fn wedge(&self, o: &Word) -> Option<(Word, i64)> {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        let mut sign = 1i64;
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].cmp(&o.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    // o.0[j] jumps over the remaining letters of self
                    if (self.0.len() - i) % 2 == 1 {
                        sign = -sign;
                    }
                    out.push(o.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Some((Word(out), sign))
    }

    /// Removes the letter at `pos`, returning the Koszul sign of moving it
    /// to the front.
    pub fn strike(&self, pos: usize) -> (Word, i64) {
        let mut v = self.0.clone();
        v.remove(pos);
        (Word(v), if pos % 2 == 0 { 1 } else { -1 })
    }
}

/// Sum of wedge words with polynomial coefficients.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Form {
    pub terms: BTreeMap<Word, Poly>,
}

impl Form {
    pub fn zero() -> Form {
        Form { terms: BTreeMap::new() }
    }

    pub fn one() -> Form {
        Form::from_coeff(Poly::one())
    }

    pub fn from_coeff(p: Poly) -> Form {
        let mut f = Form::zero();
        f.insert(Word::empty(), p);
        f
    }

    pub fn letter(l: Letter) -> Form {
        let mut f = Form::zero();
        f.insert(Word::single(l), Poly::one());
        f
    }

    pub fn insert(&mut self, w: Word, c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Form {
        Form { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Poly) -> Form {
        let mut out = Form::zero();
        for (w, p) in &self.terms {
            out.insert(w.clone(), p.mul(c));
        }
        out
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Form {
        self.scale(&Poly::constant(c.clone()))
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut out = Form::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                if let Some((w, sign)) = w1.wedge(w2) {
                    let mut c = c1.mul(c2);
                    if sign < 0 {
                        c = c.neg();
                    }
                    out.insert(w, c);
                }
            }
        }
        out
    }

    /// Wedge truncating products with `u`-exponent above one (the
    /// polarization marker squares to zero).
    pub fn wedge_utrunc(&self, o: &Form) -> Form {
        let mut out = Form::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                if let Some((w, sign)) = w1.wedge(w2) {
                    let filtered = c1.mul(c2).truncate_power(&Sym::U, 1);
                    let c = if sign < 0 { filtered.neg() } else { filtered };
                    out.insert(w, c);
                }
            }
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|w| w.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// Maps every polynomial coefficient.
    pub fn map_coeffs(&self, f: &dyn Fn(&Poly) -> Poly) -> Form {
        let mut out = Form::zero();
        for (w, c) in &self.terms {
            out.insert(w.clone(), f(c));
        }
        out
    }

    /// Maps every (word, coefficient) pair to a form and sums.
    pub fn flat_map(&self, f: &dyn Fn(&Word, &Poly) -> Form) -> Form {
        let mut out = Form::zero();
        for (w, c) in &self.terms {
            out = out.add(&f(w, c));
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, "  +  ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for l in &w.0 {
                write!(f, " {}", l.name())?;
            }
        }
        Ok(())
    }
}

/// The fixed top word: all canonical-form letters then all connection
/// letters, lexicographically. Documents the volume convention of the
/// canonical framing; nothing is ever integrated against it.
pub fn volume_word(n: u8) -> Word {
    let mut letters = Vec::new();
    for k in 1..=n {
        letters.push(Letter::Th(k));
    }
    for i in 1..=n {
        for j in 1..=n {
            letters.push(Letter::Om(i, j));
        }
    }
    Word(letters)
}

/// Vertical derivative of a gamma symbol: tensor rule with one upper and
/// `2 + |L|` lower indices. Returns the coefficient polynomial of
/// `omega^c_d` in `d(gamma^i_{j k L})` with the same slot tag.
pub fn gamma_vertical_derivative(slot: u8, idx: &JetIdx, c: u8, d: u8) -> Poly {
    let gvar = |g: JetIdx| Poly::var(Sym::Gamma(slot, g));
    let mut out = Poly::zero();
    if d == idx.j {
        out = out.add(&gvar(JetIdx::new(idx.i, c, idx.k, &idx.ell)));
    }
    if d == idx.k {
        out = out.add(&gvar(JetIdx::new(idx.i, idx.j, c, &idx.ell)));
    }
    for (pos, &l) in idx.ell.iter().enumerate() {
        if d == l {
            let mut ell = idx.ell.clone();
            ell[pos] = c;
            out = out.add(&gvar(JetIdx::new(idx.i, idx.j, idx.k, &ell)));
        }
    }
    if c == idx.i {
        out = out.sub(&gvar(JetIdx::new(d, idx.j, idx.k, &idx.ell)));
    }
    out
}

/// Exterior differential of a single symbol, as a one-form.
fn d_symbol(s: &Sym, n: u8) -> Form {
    match s {
        Sym::T(r) => Form::letter(Letter::Dt(*r)),
        Sym::Gamma(slot, idx) => {
            let mut out = Form::zero();
            for l in 1..=n {
                out.insert(
                    Word::single(Letter::Th(l)),
                    Poly::var(Sym::Gamma(*slot, idx.extend(l))),
                );
            }
            for c in 1..=n {
                for d in 1..=n {
                    let coeff = gamma_vertical_derivative(*slot, idx, c, d);
                    if !coeff.is_zero() {
                        out.insert(Word::single(Letter::Om(c, d)), coeff);
                    }
                }
            }
            out
        }
        Sym::S | Sym::U => panic!("differential applied before eliminating {s:?}"),
        other => panic!("no differential rule for symbol {other:?}"),
    }
}

/// Exterior differential of a single letter.
fn d_letter(l: &Letter, n: u8) -> Form {
    let mut out = Form::zero();
    match l {
        Letter::Dt(_) => {}
        Letter::Th(k) => {
            for mu in 1..=n {
                if let Some((w, s)) =
                    Word::single(Letter::Om(*k, mu)).wedge(&Word::single(Letter::Th(mu)))
                {
                    let c = if s < 0 { Poly::one() } else { Poly::one().neg() };
                    out.insert(w, c);
                }
            }
        }
        Letter::Om(i, j) => {
            for k in 1..=n {
                if let Some((w, s)) =
                    Word::single(Letter::Om(*i, k)).wedge(&Word::single(Letter::Om(k, *j)))
                {
                    let c = if s < 0 { Poly::one() } else { Poly::one().neg() };
                    out.insert(w, c);
                }
            }
        }
        Letter::Os(_, _) => panic!("no differential on quotient letters"),
    }
    out
}

/// Full exterior differential: coefficient part plus structure equations.
pub fn d(form: &Form, n: u8) -> Form {
    form.flat_map(&|w, c| {
        let mut out = Form::zero();
        // d(coefficient) ^ word
        for v in c.vars().to_vec() {
            let dv = d_symbol(&v, n);
            let part = dv.scale(&c.derivative(&v));
            if let Some(res) = wedge_onto(&part, w) {
                out = out.add(&res);
            }
        }
        // coefficient * d(word)
        for (pos, l) in w.0.iter().enumerate() {
            let (rest, _) = w.strike(pos);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            let dl = d_letter(l, n);
            if dl.is_zero() {
                continue;
            }
            let mut piece = dl.scale(c);
            if sign < 0 {
                piece = piece.neg();
            }
            if let Some(res) = wedge_onto(&piece, &rest) {
                out = out.add(&res);
            }
        }
        out
    })
}

fn wedge_onto(f: &Form, w: &Word) -> Option<Form> {
    let mut out = Form::zero();
    for (w1, c1) in &f.terms {
        if let Some((word, sign)) = w1.wedge(w) {
            let c = if sign < 0 { c1.neg() } else { c1.clone() };
            out.insert(word, c);
        }
    }
    Some(out)
}

/// Pullback along the prolonged action of the group element in `slot`:
/// `theta` is invariant, `omega^i_j` picks up `gamma^i_{jk}(slot) theta^k`.
/// Coefficients must not already carry jet symbols.
pub fn pullback_prolonged(slot: u8, form: &Form, n: u8) -> Form {
    form.flat_map(&|w, c| {
        assert!(
            !c.vars().iter().any(|v| matches!(v, Sym::Gamma(..))),
            "pullback of a form with jet-symbol coefficients is evaluation-only"
        );
        let mut acc = Form::from_coeff(c.clone());
        for l in &w.0 {
            let letter_form = match l {
                Letter::Om(i, j) => {
                    let mut f = Form::letter(Letter::Om(*i, *j));
                    for k in 1..=n {
                        f.insert(
                            Word::single(Letter::Th(k)),
                            Poly::var(Sym::Gamma(slot, JetIdx::new(*i, *j, k, &[]))),
                        );
                    }
                    f
                }
                other => Form::letter(*other),
            };
            acc = acc.wedge(&letter_form);
        }
        acc
    })
}

/// Splits a matrix of forms into symmetric and skew parts.
pub fn split_sym_skew(m: &Mat<Form>) -> (Mat<Form>, Mat<Form>) {
    let half = Poly::constant(Scalar::from_frac(1, 2));
    let sym = Mat::from_fn(m.n, |i, j| m.at(i, j).add(m.at(j, i)).scale(&half));
    let skew = Mat::from_fn(m.n, |i, j| m.at(i, j).sub(m.at(j, i)).scale(&half));
    (sym, skew)
}

/// Substitutes exact values for all gamma symbols using one table per slot.
/// T/S/U variables must already be gone; the result has coefficients that are
/// polynomials in the formal unit alone.
pub fn evaluate_form(form: &Form, tables: &BTreeMap<u8, &GammaTable>) -> Form {
    form.map_coeffs(&|c| {
        let mut bind = BTreeMap::new();
        for v in c.vars() {
            match v {
                Sym::Gamma(slot, idx) => {
                    let t = tables
                        .get(slot)
                        .unwrap_or_else(|| panic!("no binding for slot {slot}"));
                    bind.insert(v.clone(), t.value(idx).expect("jet order too low"));
                }
                Sym::T(_) | Sym::S | Sym::U => panic!("unintegrated simplex variable {v:?}"),
                _ => {}
            }
        }
        c.eval_partial(&bind)
    })
}

/// Numeric pullback of an already evaluated form: `omega` letters pick up
/// `gamma(psi)` values at the given point.
pub fn pullback_numeric(form: &Form, gamma: &dyn Fn(u8, u8, u8) -> Scalar, n: u8) -> Form {
    form.flat_map(&|w, c| {
        let mut acc = Form::from_coeff(c.clone());
        for l in &w.0 {
            let letter_form = match l {
                Letter::Om(i, j) => {
                    let mut f = Form::letter(Letter::Om(*i, *j));
                    for k in 1..=n {
                        f.insert(
                            Word::single(Letter::Th(k)),
                            Poly::constant(gamma(*i, *j, k)),
                        );
                    }
                    f
                }
                other => Form::letter(*other),
            };
            acc = acc.wedge(&letter_form);
        }
        acc
    })
}

/// Interior product with a coframe-dual direction.
pub fn contract(form: &Form, l: &Letter) -> Form {
    form.flat_map(&|w, c| {
        let mut out = Form::zero();
        for (pos, wl) in w.0.iter().enumerate() {
            if wl == l {
                let (rest, sign) = w.strike(pos);
                let coeff = if sign < 0 { c.neg() } else { c.clone() };
                out.insert(rest, coeff);
            }
        }
        out
    })
}

/// Interior product with the orthogonal-direction vertical field
/// `Y^c_d - Y^d_c`.
pub fn contract_skew(form: &Form, c: u8, dd: u8) -> Form {
    contract(form, &Letter::Om(c, dd)).sub(&contract(form, &Letter::Om(dd, c)))
}

/// A form is basic for the orthogonal subgroup when all skew contractions
/// vanish and the skew Lie derivatives (Cartan formula) annihilate it.
pub fn is_on_basic(form: &Form, n: u8) -> bool {
    let df = d(form, n);
    for c in 1..=n {
        for dd in (c + 1)..=n {
            if !contract_skew(form, c, dd).is_zero() {
                return false;
            }
            if !contract_skew(&df, c, dd).is_zero() {
                return false;
            }
        }
    }
    true
}
