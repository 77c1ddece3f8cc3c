//! The diffeomorphism Hopf algebra: generators realized as operators on a
//! crossed-product model, normal ordering from the derived commutation
//! rules, the Leibniz coproduct, the modular character and twisted antipode,
//! the cyclic-structure operators, and the quotient relative to the
//! orthogonal subalgebra.

use std::collections::BTreeMap;
use std::fmt;

use crate::ce::GStructure;
use crate::form::gamma_vertical_derivative;
use crate::jet::{gamma_fn, Map};
use crate::poly::{Poly, RationalFn};
use crate::scalar::Scalar;
use crate::sym::{JetIdx, Sym};

/// Generator of the algebra, in normal-order precedence: multiplication
/// operators first, then vertical fields, then horizontal fields.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Gen {
    /// Multiplication by a jet coordinate of the group argument.
    D(JetIdx),
    /// Fundamental vertical vector field `Y_i^j`.
    Y(u8, u8),
    /// Basic horizontal vector field `X_k`.
    X(u8),
}

impl Gen {
    pub fn d(i: u8, j: u8, k: u8, ell: &[u8]) -> Gen {
        Gen::D(JetIdx::new(i, j, k, ell))
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::D(idx) => {
                write!(f, "d^{}_{}{}", idx.i, idx.j, idx.k)?;
                for l in &idx.ell {
                    write!(f, "{l}")?;
                }
                Ok(())
            }
            Gen::Y(i, j) => write!(f, "Y_{i}^{j}"),
            Gen::X(k) => write!(f, "X_{k}"),
        }
    }
}

/// Element in normal form: a sum of sorted words with exact coefficients.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct HopfElem {
    pub terms: BTreeMap<Vec<Gen>, Scalar>,
}

impl HopfElem {
    pub fn zero() -> HopfElem {
        HopfElem { terms: BTreeMap::new() }
    }

    pub fn one() -> HopfElem {
        HopfElem::from_word(vec![], Scalar::one())
    }

    pub fn gen(g: Gen) -> HopfElem {
        HopfElem::from_word(vec![g], Scalar::one())
    }

    pub fn from_word(w: Vec<Gen>, c: Scalar) -> HopfElem {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(w, c);
        }
        HopfElem { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, w: Vec<Gen>, c: Scalar) {
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

    pub fn add(&self, o: &HopfElem) -> HopfElem {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> HopfElem {
        HopfElem { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &HopfElem) -> HopfElem {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> HopfElem {
        let mut out = HopfElem::zero();
        for (w, v) in &self.terms {
            out.insert(w.clone(), v.mul(c));
        }
        out
    }
}

/// Commutator `[a, b]` of two generators, derived from the operator
/// realization: vector-field brackets from the Lie structure, derivative
/// rules on the multiplication operators.
fn commutator(a: &Gen, b: &Gen, g: &GStructure) -> HopfElem {
    match (a, b) {
        (Gen::X(_), Gen::X(_)) | (Gen::D(_), Gen::D(_)) => HopfElem::zero(),
        (Gen::X(l), Gen::D(idx)) => HopfElem::gen(Gen::D(idx.extend(*l))),
        (Gen::D(idx), Gen::X(l)) => HopfElem::gen(Gen::D(idx.extend(*l))).neg(),
        (Gen::Y(c, d), Gen::D(idx)) => d_poly_to_elem(&gamma_vertical_derivative(0, idx, *c, *d)),
        (Gen::D(idx), Gen::Y(c, d)) => {
            d_poly_to_elem(&gamma_vertical_derivative(0, idx, *c, *d)).neg()
        }
        // vector-field brackets from the structure constants
        (Gen::X(_), Gen::Y(_, _)) | (Gen::Y(_, _), Gen::X(_)) | (Gen::Y(_, _), Gen::Y(_, _)) => {
            let sym_of = |x: &Gen| match x {
                Gen::X(k) => Sym::X(*k),
                Gen::Y(i, j) => Sym::Y(*i, *j),
                _ => unreachable!(),
            };
            let za = g.basis.iter().position(|z| *z == sym_of(a)).unwrap();
            let zb = g.basis.iter().position(|z| *z == sym_of(b)).unwrap();
            let mut out = HopfElem::zero();
            for (m, c) in &g.bracket[&(za, zb)] {
                let gen = match &g.basis[*m] {
                    Sym::X(k) => Gen::X(*k),
                    Sym::Y(i, j) => Gen::Y(*i, *j),
                    _ => unreachable!(),
                };
                out.insert(vec![gen], c.clone());
            }
            out
        }
    }
}

/// A polynomial in slot-0 jet symbols interpreted as a sum of products of
/// multiplication operators.
fn d_poly_to_elem(p: &Poly) -> HopfElem {
    let vars = p.vars().to_vec();
    let mut out = HopfElem::zero();
    for (exps, c) in p.terms_with_lambda() {
        let mut word = Vec::new();
        for (i, &e) in exps.iter().enumerate() {
            let Sym::Gamma(_, idx) = &vars[i] else {
                panic!("expected jet symbols only")
            };
            for _ in 0..e {
                word.push(Gen::D(idx.clone()));
            }
        }
        word.sort();
        out.insert(word, c);
    }
    out
}

/// Rewrites an arbitrary word into normal order, generating commutator
/// correction terms.
pub fn normal_order(word: &[Gen], coeff: &Scalar, g: &GStructure) -> HopfElem {
    let mut out = HopfElem::zero();
    let mut stack: Vec<(Vec<Gen>, Scalar)> = vec![(word.to_vec(), coeff.clone())];
    while let Some((w, c)) = stack.pop() {
        // find the first out-of-order adjacent pair
        let mut pos = None;
        for i in 0..w.len().saturating_sub(1) {
            if w[i] > w[i + 1] {
                pos = Some(i);
                break;
            }
        }
        match pos {
            None => out.insert(w, c),
            Some(i) => {
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                stack.push((swapped, c.clone()));
                // [w_i, w_{i+1}] inserted in place
                let bracket = commutator(&w[i], &w[i + 1], g);
                for (bw, bc) in &bracket.terms {
                    let mut nw: Vec<Gen> = w[..i].to_vec();
                    nw.extend(bw.iter().cloned());
                    nw.extend_from_slice(&w[i + 2..]);
                    stack.push((nw, c.mul(bc)));
                }
            }
        }
    }
    out
}

pub fn mul(a: &HopfElem, b: &HopfElem, g: &GStructure) -> HopfElem {
    let mut out = HopfElem::zero();
    for (wa, ca) in &a.terms {
        for (wb, cb) in &b.terms {
            let mut w = wa.clone();
            w.extend(wb.iter().cloned());
            out = out.add(&normal_order(&w, &ca.mul(cb), g));
        }
    }
    out
}

/// A monomial `f U*_phi` of the crossed-product model: an exact rational
/// function on the frame bundle times a translation operator.
#[derive(Clone, Debug)]
pub struct ModelMonomial {
    pub f: RationalFn,
    pub phi: Map,
}

impl ModelMonomial {
    pub fn product(&self, o: &ModelMonomial) -> ModelMonomial {
        // (f U*_phi)(g U*_psi) = f (g o prolonged phi) U*_{psi o phi}
        let n = self.phi.n;
        let mut bind: BTreeMap<Sym, RationalFn> = BTreeMap::new();
        let comp_poly = |c: &crate::jet::JPoly<Scalar>| -> Poly {
            let mut p = Poly::zero();
            for (e, s) in &c.terms {
                let mut t = Poly::constant(s.clone());
                for (mu, &ex) in e.iter().enumerate() {
                    if ex > 0 {
                        t = t.mul(&Poly::var(Sym::X(mu as u8 + 1)).pow(ex as u32));
                    }
                }
                p = p.add(&t);
            }
            p
        };
        for mu in 1..=n {
            bind.insert(
                Sym::X(mu),
                RationalFn::from_poly(comp_poly(&self.phi.comps[mu as usize - 1])),
            );
        }
        let jac = self.phi.jacobian();
        for i in 1..=n {
            for j in 1..=n {
                // (phi'(x) y)^i_j
                let mut acc = Poly::zero();
                for m in 1..=n {
                    let dji = comp_poly(&jac.at(i as usize - 1, m as usize - 1).clone());
                    acc = acc.add(&dji.mul(&Poly::var(Sym::Y(m, j))));
                }
                bind.insert(Sym::Y(i, j), RationalFn::from_poly(acc));
            }
        }
        let g_pulled = o.f.substitute(&bind);
        ModelMonomial {
            f: self.f.mul(&g_pulled),
            phi: o.phi.compose(&self.phi),
        }
    }
}

/// Action of a single generator on a model monomial.
fn act_gen(gen: &Gen, m: &ModelMonomial) -> ModelMonomial {
    let n = m.phi.n;
    let f = match gen {
        Gen::X(k) => {
            let mut acc = RationalFn::zero();
            for nu in 1..=n {
                let ynk = RationalFn::from_poly(Poly::var(Sym::Y(nu, *k)));
                acc = acc.add(&ynk.mul(&m.f.derivative(&Sym::X(nu))));
            }
            acc
        }
        Gen::Y(i, j) => {
            let mut acc = RationalFn::zero();
            for nu in 1..=n {
                let yni = RationalFn::from_poly(Poly::var(Sym::Y(nu, *i)));
                acc = acc.add(&yni.mul(&m.f.derivative(&Sym::Y(nu, *j))));
            }
            acc
        }
        Gen::D(idx) => {
            let gm = gamma_fn(&m.phi, idx).expect("jet order");
            gm.mul(&m.f)
        }
    };
    ModelMonomial { f, phi: m.phi.clone() }
}

/// Action of an element on a model monomial (words act right to left).
pub fn act(h: &HopfElem, m: &ModelMonomial) -> ModelMonomial {
    let mut total = RationalFn::zero();
    for (w, c) in &h.terms {
        let mut cur = m.clone();
        for gen in w.iter().rev() {
            cur = act_gen(gen, &cur);
        }
        total = total.add(&cur.f.mul(&RationalFn::from_poly(Poly::constant(c.clone()))));
    }
    ModelMonomial { f: total, phi: m.phi.clone() }
}

/// Two-leg tensor with exact coefficients.
pub type Tensor2 = BTreeMap<(Vec<Gen>, Vec<Gen>), Scalar>;

fn tensor2_insert(t: &mut Tensor2, k: (Vec<Gen>, Vec<Gen>), c: Scalar) {
    if c.is_zero() {
        return;
    }
    match t.entry(k) {
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

fn tensor2_mul(a: &Tensor2, b: &Tensor2, g: &GStructure) -> Tensor2 {
    let mut out = Tensor2::new();
    for ((a1, a2), ca) in a {
        for ((b1, b2), cb) in b {
            let mut l = a1.clone();
            l.extend(b1.iter().cloned());
            let mut r = a2.clone();
            r.extend(b2.iter().cloned());
            let left = normal_order(&l, &Scalar::one(), g);
            let right = normal_order(&r, &Scalar::one(), g);
            for (lw, lc) in &left.terms {
                for (rw, rc) in &right.terms {
                    tensor2_insert(
                        &mut out,
                        (lw.clone(), rw.clone()),
                        ca.mul(cb).mul(lc).mul(rc),
                    );
                }
            }
        }
    }
    out
}

/// Coproduct of a generator: the printed Leibniz rules for the basic
/// generators, iterated commutators for the higher multiplication operators.
pub fn coproduct_gen(gen: &Gen, g: &GStructure) -> Tensor2 {
    let n = g.n;
    let mut out = Tensor2::new();
    match gen {
        Gen::Y(i, j) => {
            tensor2_insert(&mut out, (vec![Gen::Y(*i, *j)], vec![]), Scalar::one());
            tensor2_insert(&mut out, (vec![], vec![Gen::Y(*i, *j)]), Scalar::one());
        }
        Gen::X(k) => {
            tensor2_insert(&mut out, (vec![Gen::X(*k)], vec![]), Scalar::one());
            tensor2_insert(&mut out, (vec![], vec![Gen::X(*k)]), Scalar::one());
            for i in 1..=n {
                for j in 1..=n {
                    tensor2_insert(
                        &mut out,
                        (vec![Gen::d(i, j, *k, &[])], vec![Gen::Y(i, j)]),
                        Scalar::one(),
                    );
                }
            }
        }
        Gen::D(idx) => {
            if idx.ell.is_empty() {
                tensor2_insert(&mut out, (vec![Gen::D(idx.clone())], vec![]), Scalar::one());
                tensor2_insert(&mut out, (vec![], vec![Gen::D(idx.clone())]), Scalar::one());
            } else {
                // Delta([X_l, D']) = [Delta(X_l), Delta(D')]
                let mut ell = idx.ell.clone();
                let l = ell.pop().unwrap();
                let lower = JetIdx { i: idx.i, j: idx.j, k: idx.k, ell };
                let dx = coproduct_gen(&Gen::X(l), g);
                let dd = coproduct_gen(&Gen::D(lower), g);
                let ab = tensor2_mul(&dx, &dd, g);
                let ba = tensor2_mul(&dd, &dx, g);
                for (k2, c) in ab {
                    tensor2_insert(&mut out, k2, c);
                }
                for (k2, c) in ba {
                    tensor2_insert(&mut out, k2, c.neg());
                }
            }
        }
    }
    out
}

/// Coproduct of an element, multiplicatively over words.
pub fn coproduct(h: &HopfElem, g: &GStructure) -> Tensor2 {
    let mut out = Tensor2::new();
    for (w, c) in &h.terms {
        let mut acc: Tensor2 = Tensor2::new();
        tensor2_insert(&mut acc, (vec![], vec![]), Scalar::one());
        for gen in w {
            acc = tensor2_mul(&acc, &coproduct_gen(gen, g), g);
        }
        for (k2, v) in acc {
            tensor2_insert(&mut out, k2, v.mul(c));
        }
    }
    out
}

/// Counit: value of the operator on the constant function one.
pub fn counit(h: &HopfElem) -> Scalar {
    h.terms.get(&vec![]).cloned().unwrap_or_else(Scalar::zero)
}

/// The distinguished character: the modular character of the linear part on
/// the vector fields, zero on the multiplication operators.
pub fn character_delta(h: &HopfElem, g: &GStructure) -> Scalar {
    let gen_delta = |gen: &Gen| -> Scalar {
        match gen {
            Gen::X(_) | Gen::D(_) => Scalar::zero(),
            Gen::Y(i, j) => {
                let idx = g.basis.iter().position(|z| *z == Sym::Y(*i, *j)).unwrap();
                g.delta[idx].clone()
            }
        }
    };
    let mut out = Scalar::zero();
    for (w, c) in &h.terms {
        let mut v = c.clone();
        for gen in w {
            v = v.mul(&gen_delta(gen));
            if v.is_zero() {
                break;
            }
        }
        out = out.add(&v);
    }
    out
}

/// Twisted antipode on a generator, solved from the convolution identity
/// `m(S (x) Id) Delta(h) = delta(h) 1`: `S(h) = delta(h) - h - sum S(h') h''`
/// over the proper part of the coproduct.
pub fn twisted_antipode_gen(gen: &Gen, g: &GStructure) -> HopfElem {
    let delta_val = character_delta(&HopfElem::gen(gen.clone()), g);
    let mut out = HopfElem::from_word(vec![], delta_val);
    out = out.sub(&HopfElem::gen(gen.clone()));
    for ((l, r), c) in coproduct_gen(gen, g) {
        if r.is_empty() || l.is_empty() {
            continue; // the group-like ends are already accounted for
        }
        let s_left = twisted_antipode_word(&l, g);
        let prod = mul(&s_left, &HopfElem::from_word(r, c), g);
        out = out.sub(&prod);
    }
    out
}

fn twisted_antipode_word(w: &[Gen], g: &GStructure) -> HopfElem {
    // anti-homomorphism over the word
    let mut out = HopfElem::one();
    for gen in w {
        out = mul(&twisted_antipode_gen(gen, g), &out, g);
    }
    out
}

pub fn twisted_antipode(h: &HopfElem, g: &GStructure) -> HopfElem {
    let mut out = HopfElem::zero();
    for (w, c) in &h.terms {
        out = out.add(&twisted_antipode_word(w, g).scale(c));
    }
    out
}

/// Multi-leg tensor.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct HopfTensor {
    pub q: usize,
    pub terms: BTreeMap<Vec<Vec<Gen>>, Scalar>,
}

impl HopfTensor {
    pub fn zero(q: usize) -> HopfTensor {
        HopfTensor { q, terms: BTreeMap::new() }
    }

    pub fn from_legs(legs: Vec<Vec<Gen>>) -> HopfTensor {
        let q = legs.len();
        let mut t = HopfTensor::zero(q);
        t.terms.insert(legs, Scalar::one());
        t
    }

    pub fn insert(&mut self, legs: Vec<Vec<Gen>>, c: Scalar) {
        assert_eq!(legs.len(), self.q);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(legs) {
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

    pub fn add(&self, o: &HopfTensor) -> HopfTensor {
        assert_eq!(self.q, o.q);
        let mut out = self.clone();
        for (l, c) in &o.terms {
            out.insert(l.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> HopfTensor {
        HopfTensor {
            q: self.q,
            terms: self.terms.iter().map(|(l, c)| (l.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &HopfTensor) -> HopfTensor {
        self.add(&o.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Cyclic structure operators.
pub enum CyclicOp {
    Face(usize),
    Degeneracy(usize),
    Tau,
}

/// Face maps `C^q -> C^{q+1}`: insert a unit leg at the ends, apply the
/// coproduct in the middle.
pub fn face(t: &HopfTensor, i: usize, g: &GStructure) -> HopfTensor {
    assert!(i <= t.q + 1, "face index out of range");
    let mut out = HopfTensor::zero(t.q + 1);
    for (legs, c) in &t.terms {
        if i == 0 {
            let mut l = vec![vec![]];
            l.extend(legs.iter().cloned());
            out.insert(l, c.clone());
        } else if i == t.q + 1 {
            let mut l = legs.clone();
            l.push(vec![]);
            out.insert(l, c.clone());
        } else {
            let leg = &legs[i - 1];
            let dp = coproduct(
                &HopfElem::from_word(leg.clone(), Scalar::one()),
                g,
            );
            for ((a, b), cc) in dp {
                let mut l = legs[..i - 1].to_vec();
                l.push(a);
                l.push(b);
                l.extend(legs[i..].iter().cloned());
                out.insert(l, c.mul(&cc));
            }
        }
    }
    out
}

/// Degeneracies `C^{q+1} -> C^q`: apply the counit to one leg.
pub fn degeneracy(t: &HopfTensor, i: usize, _g: &GStructure) -> HopfTensor {
    assert!(i < t.q, "degeneracy index out of range");
    let mut out = HopfTensor::zero(t.q - 1);
    for (legs, c) in &t.terms {
        let eps = counit(&HopfElem::from_word(legs[i].clone(), Scalar::one()));
        if eps.is_zero() {
            continue;
        }
        let mut l = legs[..i].to_vec();
        l.extend(legs[i + 1..].iter().cloned());
        out.insert(l, c.mul(&eps));
    }
    out
}

/// Iterated coproduct into `m` legs.
fn iterated_coproduct(h: &HopfElem, m: usize, g: &GStructure) -> HopfTensor {
    assert!(m >= 1);
    if m == 1 {
        let mut out = HopfTensor::zero(1);
        for (w, c) in &h.terms {
            out.insert(vec![w.clone()], c.clone());
        }
        return out;
    }
    let prev = iterated_coproduct(h, m - 1, g);
    // expand the first leg
    let mut out = HopfTensor::zero(m);
    for (legs, c) in &prev.terms {
        let dp = coproduct(&HopfElem::from_word(legs[0].clone(), Scalar::one()), g);
        for ((a, b), cc) in dp {
            let mut l = vec![a, b];
            l.extend(legs[1..].iter().cloned());
            out.insert(l, c.mul(&cc));
        }
    }
    out
}

/// Cyclic operator: the twisted antipode of the first leg acts diagonally on
/// the rotated tensor with a unit appended.
pub fn tau(t: &HopfTensor, g: &GStructure) -> HopfTensor {
    assert!(t.q >= 1);
    let mut out = HopfTensor::zero(t.q);
    for (legs, c) in &t.terms {
        let s = twisted_antipode(&HopfElem::from_word(legs[0].clone(), Scalar::one()), g);
        // rotated remainder with a unit in the last slot
        let mut rest: Vec<Vec<Gen>> = legs[1..].to_vec();
        rest.push(vec![]);
        let diag = iterated_coproduct(&s, t.q, g);
        for (dlegs, dc) in &diag.terms {
            // multiply leg-wise
            let mut prod_terms: Vec<(Vec<Vec<Gen>>, Scalar)> =
                vec![(Vec::new(), c.mul(dc))];
            for r in 0..t.q {
                let factor = mul(
                    &HopfElem::from_word(dlegs[r].clone(), Scalar::one()),
                    &HopfElem::from_word(rest[r].clone(), Scalar::one()),
                    g,
                );
                let mut next = Vec::new();
                for (acc_legs, acc_c) in &prod_terms {
                    for (w, wc) in &factor.terms {
                        let mut l = acc_legs.clone();
                        l.push(w.clone());
                        next.push((l, acc_c.mul(wc)));
                    }
                }
                prod_terms = next;
            }
            for (l, cc) in prod_terms {
                out.insert(l, cc);
            }
        }
    }
    out
}

/// Hochschild-type boundary `b = sum (-1)^i face_i : C^q -> C^{q+1}`.
pub fn b_boundary(t: &HopfTensor, g: &GStructure) -> HopfTensor {
    let mut out = HopfTensor::zero(t.q + 1);
    for i in 0..=(t.q + 1) {
        let f = face(t, i, g);
        out = if i % 2 == 0 { out.add(&f) } else { out.sub(&f) };
    }
    out
}

/// The `B`-boundary `C^q -> C^{q-1}`: cyclic antisymmetrization after the
/// extra degeneracy.
pub fn b_big(t: &HopfTensor, g: &GStructure) -> HopfTensor {
    assert!(t.q >= 1);
    let q = t.q;
    let after_tau = tau(t, g);
    let collapsed = degeneracy(&after_tau, q - 1, g);
    let mut out = HopfTensor::zero(q - 1);
    let mut power = collapsed.clone();
    for k in 0..q.max(1) {
        if k > 0 && q >= 2 {
            power = tau(&power, g);
        }
        let sign_neg = ((q - 1) * k) % 2 == 1;
        out = if sign_neg { out.sub(&power) } else { out.add(&power) };
        if q - 1 == 0 {
            break;
        }
    }
    out
}

/// Sampled exact-equality oracle: two elements agree when their actions on a
/// spanning family of model monomials agree, compared by exact evaluation at
/// random frame points.
pub fn equal_by_action(a: &HopfElem, b: &HopfElem, n: u8, seed: u64) -> bool {
    let mut rng = crate::rng::Rng::seeded(seed);
    let mut done = 0;
    while done < 6 {
        let phi = Map::random(n, 5, 3, &mut rng);
        // monomials of low degree in the frame coordinates
        let mut f = Poly::one();
        for mu in 1..=n {
            f = f.mul(&Poly::var(Sym::X(mu)).pow(rng.int_range(0, 2) as u32));
        }
        for i in 1..=n {
            for j in 1..=n {
                if rng.next_u64() % 3 == 0 {
                    f = f.mul(&Poly::var(Sym::Y(i, j)));
                }
            }
        }
        let m = ModelMonomial { f: RationalFn::from_poly(f), phi };
        let va = act(a, &m);
        let vb = act(b, &m);
        let (x0, y0) = crate::bott::random_point(n as usize, &mut rng);
        let mut bind = BTreeMap::new();
        for (mu, v) in x0.iter().enumerate() {
            bind.insert(Sym::X(mu as u8 + 1), v.clone());
        }
        for i in 0..y0.n {
            for j in 0..y0.n {
                bind.insert(Sym::Y(i as u8 + 1, j as u8 + 1), y0.at(i, j).clone());
            }
        }
        let (Some(ea), Some(eb)) = (va.f.eval(&bind), vb.f.eval(&bind)) else {
            continue;
        };
        if ea != eb {
            return false;
        }
        done += 1;
    }
    true
}

/// Split-basis generators for the relative quotient: multiplication
/// operators, symmetric and skew vertical parts, horizontal fields. The
/// ordering places the skew part last so the right ideal is spanned by the
/// words containing a skew letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SGen {
    D(JetIdx),
    /// symmetric part (i <= j): (Y_i^j + Y_j^i)/2 off-diagonal, Y_i^i on it
    S(u8, u8),
    X(u8),
    /// skew part (i < j): (Y_i^j - Y_j^i)/2
    A(u8, u8),
}

pub type SElem = BTreeMap<Vec<SGen>, Scalar>;

fn selem_insert(t: &mut SElem, w: Vec<SGen>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match t.entry(w) {
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

/// Expands a split generator back into the plain basis.
fn sgen_expand(s: &SGen) -> Vec<(Gen, Scalar)> {
    match s {
        SGen::D(idx) => vec![(Gen::D(idx.clone()), Scalar::one())],
        SGen::X(k) => vec![(Gen::X(*k), Scalar::one())],
        SGen::S(i, j) => {
            if i == j {
                vec![(Gen::Y(*i, *j), Scalar::one())]
            } else {
                vec![
                    (Gen::Y(*i, *j), Scalar::from_frac(1, 2)),
                    (Gen::Y(*j, *i), Scalar::from_frac(1, 2)),
                ]
            }
        }
        SGen::A(i, j) => vec![
            (Gen::Y(*i, *j), Scalar::from_frac(1, 2)),
            (Gen::Y(*j, *i), Scalar::from_frac(-1, 2)),
        ],
    }
}

/// Commutator in the split basis, computed by expanding to the plain basis,
/// bracketing there, and re-splitting the vertical parts.
fn commutator_split(a: &SGen, b: &SGen, g: &GStructure) -> SElem {
    let mut acc = HopfElem::zero();
    for (ga, ca) in sgen_expand(a) {
        for (gb, cb) in sgen_expand(b) {
            acc = acc.add(&commutator(&ga, &gb, g).scale(&ca.mul(&cb)));
        }
    }
    // re-express single-generator words in the split basis
    let mut out = SElem::new();
    for (w, c) in &acc.terms {
        let mut pieces: Vec<(Vec<SGen>, Scalar)> = vec![(vec![], c.clone())];
        for gen in w {
            let expansions: Vec<(SGen, Scalar)> = match gen {
                Gen::D(idx) => vec![(SGen::D(idx.clone()), Scalar::one())],
                Gen::X(k) => vec![(SGen::X(*k), Scalar::one())],
                Gen::Y(i, j) => {
                    if i == j {
                        vec![(SGen::S(*i, *i), Scalar::one())]
                    } else {
                        let (a1, b1) = if i < j { (*i, *j) } else { (*j, *i) };
                        let sgn = if i < j { Scalar::one() } else { Scalar::one().neg() };
                        vec![(SGen::S(a1, b1), Scalar::one()), (SGen::A(a1, b1), sgn)]
                    }
                }
            };
            let mut next = Vec::new();
            for (wp, cp) in &pieces {
                for (sg, sc) in &expansions {
                    let mut nw = wp.clone();
                    nw.push(sg.clone());
                    next.push((nw, cp.mul(sc)));
                }
            }
            pieces = next;
        }
        for (wp, cp) in pieces {
            selem_insert(&mut out, wp, cp);
        }
    }
    out
}

fn normal_order_split(word: &[SGen], coeff: &Scalar, g: &GStructure) -> SElem {
    let mut out = SElem::new();
    let mut stack: Vec<(Vec<SGen>, Scalar)> = vec![(word.to_vec(), coeff.clone())];
    while let Some((w, c)) = stack.pop() {
        let mut pos = None;
        for i in 0..w.len().saturating_sub(1) {
            if w[i] > w[i + 1] {
                pos = Some(i);
                break;
            }
        }
        match pos {
            None => selem_insert(&mut out, w, c),
            Some(i) => {
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                stack.push((swapped, c.clone()));
                let bracket = commutator_split(&w[i], &w[i + 1], g);
                for (bw, bc) in &bracket {
                    let mut nw: Vec<SGen> = w[..i].to_vec();
                    nw.extend(bw.iter().cloned());
                    nw.extend_from_slice(&w[i + 2..]);
                    stack.push((nw, c.mul(bc)));
                }
            }
        }
    }
    out
}

/// Normal form in the quotient by the right ideal of the skew part: expand
/// into the split ordered basis and delete every word containing a skew
/// letter.
pub fn relative_project(h: &HopfElem, g: &GStructure) -> SElem {
    let mut out = SElem::new();
    for (w, c) in &h.terms {
        // convert the plain word to split letters
        let mut pieces: Vec<(Vec<SGen>, Scalar)> = vec![(vec![], c.clone())];
        for gen in w {
            let expansions: Vec<(SGen, Scalar)> = match gen {
                Gen::D(idx) => vec![(SGen::D(idx.clone()), Scalar::one())],
                Gen::X(k) => vec![(SGen::X(*k), Scalar::one())],
                Gen::Y(i, j) => {
                    if i == j {
                        vec![(SGen::S(*i, *i), Scalar::one())]
                    } else {
                        let (a1, b1) = if i < j { (*i, *j) } else { (*j, *i) };
                        let sgn = if i < j { Scalar::one() } else { Scalar::one().neg() };
                        vec![(SGen::S(a1, b1), Scalar::one()), (SGen::A(a1, b1), sgn)]
                    }
                }
            };
            let mut next = Vec::new();
            for (wp, cp) in &pieces {
                for (sg, sc) in &expansions {
                    let mut nw = wp.clone();
                    nw.push(sg.clone());
                    next.push((nw, cp.mul(sc)));
                }
            }
            pieces = next;
        }
        for (wp, cp) in pieces {
            for (nw, nc) in normal_order_split(&wp, &cp, g) {
                if nw.iter().any(|x| matches!(x, SGen::A(..))) {
                    continue;
                }
                selem_insert(&mut out, nw, nc);
            }
        }
    }
    out
}

/// Infinitesimal orthogonal invariance of a tensor: the diagonal left
/// multiplication by every skew generator lands in the ideal, leg by leg.
pub fn tensor_is_on_invariant(t: &HopfTensor, g: &GStructure) -> bool {
    let n = g.n;
    for a in 1..=n {
        for b in (a + 1)..=n {
            let skew = HopfElem::gen(Gen::Y(a, b)).sub(&HopfElem::gen(Gen::Y(b, a)));
            // sum over legs of (skew . leg) projected
            let mut acc: BTreeMap<(usize, Vec<Vec<Gen>>, Vec<SGen>), Scalar> = BTreeMap::new();
            for (legs, c) in &t.terms {
                for pos in 0..t.q {
                    let acted =
                        mul(&skew, &HopfElem::from_word(legs[pos].clone(), Scalar::one()), g);
                    let projected = relative_project(&acted, g);
                    for (pw, pc) in projected {
                        let mut rest = legs.clone();
                        rest.remove(pos);
                        let key = (pos, rest, pw);
                        let e = acc.entry(key).or_insert_with(Scalar::zero);
                        *e = e.add(&c.mul(&pc));
                    }
                }
            }
            // group by (rest, projected word) summing over positions? The
            // diagonal action sums over legs with the others fixed, so the
            // cancellation happens across equal (position, rest, word) keys
            // already; any leftover means non-invariance.
            // Re-aggregate ignoring the position only when the other legs
            // coincide as projected classes would require full tensor
            // normalization; the per-key cancellation is the conservative
            // check used here.
            let mut grouped: BTreeMap<(Vec<Vec<Gen>>, usize, Vec<SGen>), Scalar> = BTreeMap::new();
            for ((pos, rest, pw), c) in acc {
                let e = grouped.entry((rest, pos, pw)).or_insert_with(Scalar::zero);
                *e = e.add(&c);
            }
            if grouped.values().any(|c| !c.is_zero()) {
                return false;
            }
        }
    }
    true
}
