//! Truncated polynomial diffeomorphisms of R^n, the affine/nilpotent
//! factorization, the matched-pair actions, and the jet symbols in their
//! gamma (frame-bundle), eta (identity-frame) and alpha (free symmetric)
//! coordinates.

use std::collections::BTreeMap;
use std::fmt;

use crate::matrix::Mat;
use crate::poly::{Poly, RationalFn};
use crate::ring::Ring;
use crate::rng::Rng;
use crate::scalar::{Dual, Scalar};
use crate::sym::{AlphaIdx, JetIdx, Sym};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JetError {
    SingularLinearPart,
    InsufficientJetOrder,
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::SingularLinearPart => write!(f, "singular linear part"),
            JetError::InsufficientJetOrder => write!(f, "insufficient jet order"),
        }
    }
}

impl std::error::Error for JetError {}

/// Polynomial in `arity` fixed variables over a generic coefficient ring;
/// the series workhorse behind jets.
#[derive(Clone, PartialEq, Debug)]
pub struct JPoly<R> {
    pub arity: usize,
    pub terms: BTreeMap<Vec<u8>, R>,
}

impl<R: Ring> JPoly<R> {
    pub fn zero(arity: usize) -> Self {
        JPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: R) -> Self {
        let mut p = JPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        let mut p = JPoly::zero(arity);
        p.terms.insert(e, R::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, e: Vec<u8>, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
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

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        JPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = JPoly::zero(self.arity);
        for (e, v) in &self.terms {
            out.insert(e.clone(), v.mul(c));
        }
        out
    }

    /// Product truncated above total degree `max_deg`.
    pub fn mul_trunc(&self, o: &Self, max_deg: usize) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut out = JPoly::zero(self.arity);
        for (e1, c1) in &self.terms {
            let d1: usize = e1.iter().map(|&x| x as usize).sum();
            if d1 > max_deg {
                continue;
            }
            for (e2, c2) in &o.terms {
                let d2: usize = e2.iter().map(|&x| x as usize).sum();
                if d1 + d2 > max_deg {
                    continue;
                }
                let e: Vec<u8> = e1.iter().zip(e2).map(|(&a, &b)| a + b).collect();
                out.insert(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn truncate(&self, max_deg: usize) -> Self {
        let mut out = JPoly::zero(self.arity);
        for (e, c) in &self.terms {
            if e.iter().map(|&x| x as usize).sum::<usize>() <= max_deg {
                out.insert(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = JPoly::zero(self.arity);
        for (e, c) in &self.terms {
            if e.iter().map(|&x| x as usize).sum::<usize>() == d {
                out.insert(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = JPoly::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut v = e.clone();
            v[i] -= 1;
            out.insert(v, c.mul(&R::from_int(e[i] as i64)));
        }
        out
    }

    pub fn coeff(&self, e: &[u8]) -> R {
        self.terms.get(e).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coeff(&vec![0; self.arity])
    }

    /// Composition: substitute `args[i]` for variable `i`, truncating above
    /// `max_deg`.
    pub fn compose(&self, args: &[JPoly<R>], max_deg: usize) -> Self {
        assert_eq!(args.len(), self.arity);
        let arity = args.first().map(|a| a.arity).unwrap_or(0);
        let mut out = JPoly::zero(arity);
        // Cache powers of each argument.
        let mut pows: Vec<Vec<JPoly<R>>> =
            args.iter().map(|a| vec![JPoly::constant(arity, R::one()), a.clone()]).collect();
        for (e, c) in &self.terms {
            let mut term = JPoly::constant(arity, c.clone());
            for (i, &ex) in e.iter().enumerate() {
                if ex == 0 {
                    continue;
                }
                while pows[i].len() <= ex as usize {
                    let last = pows[i].last().unwrap().clone();
                    pows[i].push(last.mul_trunc(&args[i], max_deg));
                }
                term = term.mul_trunc(&pows[i][ex as usize], max_deg);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval(&self, args: &[R]) -> R {
        let mut acc = R::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &ex) in e.iter().enumerate() {
                for _ in 0..ex {
                    t = t.mul(&args[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn map_coeffs<S: Ring>(&self, f: &dyn Fn(&R) -> S) -> JPoly<S> {
        let mut out = JPoly::zero(self.arity);
        for (e, c) in &self.terms {
            out.insert(e.clone(), f(c));
        }
        out
    }
}

/// Inverse of a matrix of series whose constant term is invertible, exact to
/// total degree `max_deg` (Neumann expansion around the constant part).
pub fn series_matrix_inverse<R: Ring>(
    m: &Mat<JPoly<R>>,
    arity: usize,
    max_deg: usize,
) -> Option<Mat<JPoly<R>>> {
    let n = m.n;
    let a0 = Mat::from_fn(n, |i, j| m.at(i, j).constant_term());
    let a0inv = a0.inverse()?;
    let a0inv_lift = Mat::from_fn(n, |i, j| JPoly::constant(arity, a0inv.at(i, j).clone()));
    // m = a0 (Id + nil), nil strictly positive degree.
    let prod = mat_mul_trunc(&a0inv_lift, m, max_deg);
    let nil = Mat::from_fn(n, |i, j| {
        let mut p = prod.at(i, j).clone();
        if i == j {
            p = p.sub(&JPoly::constant(arity, R::one()));
        }
        p
    });
    // Neumann sum: (Id + nil)^-1 = sum_k (-nil)^k, finite after truncation.
    let mut acc = mat_identity_series(n, arity);
    let mut term = mat_identity_series(n, arity);
    for _ in 0..max_deg {
        term = mat_mul_trunc(&term, &nil, max_deg);
        term = Mat::from_fn(n, |i, j| term.at(i, j).neg());
        acc = Mat::from_fn(n, |i, j| acc.at(i, j).add(term.at(i, j)));
        if (0..n).all(|i| (0..n).all(|j| term.at(i, j).is_zero())) {
            break;
        }
    }
    Some(mat_mul_trunc(&acc, &a0inv_lift, max_deg))
}

pub fn mat_mul_trunc<R: Ring>(
    a: &Mat<JPoly<R>>,
    b: &Mat<JPoly<R>>,
    max_deg: usize,
) -> Mat<JPoly<R>> {
    let n = a.n;
    Mat::from_fn(n, |i, j| {
        let mut s = JPoly::zero(a.at(0, 0).arity);
        for k in 0..n {
            s = s.add(&a.at(i, k).mul_trunc(b.at(k, j), max_deg));
        }
        s
    })
}

fn mat_identity_series<R: Ring>(n: usize, arity: usize) -> Mat<JPoly<R>> {
    Mat::from_fn(n, |i, j| {
        if i == j {
            JPoly::constant(arity, R::one())
        } else {
            JPoly::zero(arity)
        }
    })
}

/// Affine map `x -> a x + b` with invertible linear part.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineMap<R> {
    pub a: Mat<R>,
    pub b: Vec<R>,
}

impl<R: Ring> AffineMap<R> {
    pub fn identity(n: usize) -> Self {
        AffineMap { a: Mat::identity(n), b: vec![R::zero(); n] }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_identity() && self.b.iter().all(|v| v.is_zero())
    }

    pub fn compose(&self, o: &AffineMap<R>) -> AffineMap<R> {
        // (self o other)(x) = a (a' x + b') + b
        AffineMap {
            a: self.a.mul(&o.a),
            b: self
                .a
                .mul_vec(&o.b)
                .iter()
                .zip(&self.b)
                .map(|(u, v)| u.add(v))
                .collect(),
        }
    }

    pub fn to_map(&self, k: u8) -> TruncatedMap<R> {
        let n = self.a.n;
        let comps = (0..n)
            .map(|i| {
                let mut p = JPoly::constant(n, self.b[i].clone());
                for j in 0..n {
                    p = p.add(&JPoly::var(n, j).scale(self.a.at(i, j)));
                }
                p
            })
            .collect();
        TruncatedMap { n: n as u8, k, comps }
    }
}

/// Polynomial diffeomorphism germ of R^n truncated at jet order `k`.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedMap<R> {
    pub n: u8,
    pub k: u8,
    pub comps: Vec<JPoly<R>>,
}

pub type Map = TruncatedMap<Scalar>;

impl<R: Ring> TruncatedMap<R> {
    pub fn identity(n: u8, k: u8) -> Self {
        let comps = (0..n as usize).map(|i| JPoly::var(n as usize, i)).collect();
        TruncatedMap { n, k, comps }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n as usize).all(|i| self.comps[i] == JPoly::var(self.n as usize, i))
    }

    pub fn value_at_zero(&self) -> Vec<R> {
        self.comps.iter().map(|c| c.constant_term()).collect()
    }

    /// Jacobian at the origin.
    pub fn linear_part(&self) -> Mat<R> {
        let n = self.n as usize;
        Mat::from_fn(n, |i, j| {
            let mut e = vec![0u8; n];
            e[j] = 1;
            self.comps[i].coeff(&e)
        })
    }

    /// Jacobian matrix as a series.
    pub fn jacobian(&self) -> Mat<JPoly<R>> {
        let n = self.n as usize;
        Mat::from_fn(n, |i, j| self.comps[i].derivative(j))
    }

    /// Jet of `self` after `other`, truncated at order `k`.
    pub fn compose(&self, other: &TruncatedMap<R>) -> TruncatedMap<R> {
        assert_eq!(self.n, other.n);
        assert_eq!(self.k, other.k);
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose(&other.comps, self.k as usize))
            .collect();
        TruncatedMap { n: self.n, k: self.k, comps }
    }

    /// Widens the truncation order (coefficients unchanged).
    pub fn with_order(&self, k: u8) -> TruncatedMap<R> {
        TruncatedMap { n: self.n, k, comps: self.comps.clone() }
    }

    /// Inverse jet: `compose(self, invert(self))` is the identity up to
    /// order `k`. Basepoints away from 0 are handled by conjugating with the
    /// translation by `self(0)`.
    pub fn invert(&self) -> Result<TruncatedMap<R>, JetError> {
        let n = self.n as usize;
        let kk = self.k as usize;
        let c = self.value_at_zero();
        let a = self.linear_part();
        let ainv = a.inverse().ok_or(JetError::SingularLinearPart)?;
        // f0 = f - f(0) fixes the origin.
        let f0: Vec<JPoly<R>> = (0..n)
            .map(|i| self.comps[i].sub(&JPoly::constant(n, c[i].clone())))
            .collect();
        // Linear seed g = a^-1 x.
        let mut g: Vec<JPoly<R>> = (0..n)
            .map(|i| {
                let mut p = JPoly::zero(n);
                for j in 0..n {
                    p = p.add(&JPoly::var(n, j).scale(ainv.at(i, j)));
                }
                p
            })
            .collect();
        // Raise the order one degree at a time: kill the degree-d error.
        for d in 2..=kk {
            let err: Vec<JPoly<R>> = (0..n)
                .map(|i| {
                    g[i].compose(&f0, d)
                        .sub(&JPoly::var(n, i))
                        .homogeneous_part(d)
                })
                .collect();
            // Correction G_d with G_d(a x) = -err_d, i.e. G_d = -err_d(a^-1 x).
            let ainv_args: Vec<JPoly<R>> = (0..n)
                .map(|i| {
                    let mut p = JPoly::zero(n);
                    for j in 0..n {
                        p = p.add(&JPoly::var(n, j).scale(ainv.at(i, j)));
                    }
                    p
                })
                .collect();
            for i in 0..n {
                let corr = err[i].compose(&ainv_args, d).neg();
                g[i] = g[i].add(&corr);
            }
        }
        // Full inverse: g composed with translation by -c.
        let shifted: Vec<JPoly<R>> = (0..n)
            .map(|j| JPoly::var(n, j).sub(&JPoly::constant(n, c[j].clone())))
            .collect();
        let comps = (0..n).map(|i| g[i].compose(&shifted, kk)).collect();
        Ok(TruncatedMap { n: self.n, k: self.k, comps })
    }

    /// Canonical affine-times-nilpotent factorization.
    pub fn kac_decompose(&self) -> Result<(AffineMap<R>, TruncatedMap<R>), JetError> {
        let n = self.n as usize;
        let b = self.value_at_zero();
        let a = self.linear_part();
        let ainv = a.inverse().ok_or(JetError::SingularLinearPart)?;
        // psi = a^-1 (phi - b): fixes 0 with identity linear part.
        let comps: Vec<JPoly<R>> = (0..n)
            .map(|i| {
                let mut p = JPoly::zero(n);
                for j in 0..n {
                    let shifted = self.comps[j].sub(&JPoly::constant(n, b[j].clone()));
                    p = p.add(&shifted.scale(ainv.at(i, j)));
                }
                p
            })
            .collect();
        Ok((AffineMap { a, b }, TruncatedMap { n: self.n, k: self.k, comps }))
    }

    pub fn is_njet(&self) -> bool {
        self.value_at_zero().iter().all(|v| v.is_zero()) && self.linear_part().is_identity()
    }

    /// Matched-pair actions: factor `psi o phi` with `phi` affine.
    /// Returns `(psi |> phi, psi <| phi)`.
    pub fn act_right(
        &self,
        phi: &AffineMap<R>,
    ) -> Result<(AffineMap<R>, TruncatedMap<R>), JetError> {
        let chi = self.compose(&phi.to_map(self.k));
        chi.kac_decompose()
    }
}

impl Map {
    /// Random polynomial map of degree at most `deg` with invertible linear
    /// part and coefficients in {-5..5}.
    pub fn random(n: u8, k: u8, deg: u8, rng: &mut Rng) -> Map {
        assert!(deg <= k);
        loop {
            let mut comps = Vec::new();
            for _ in 0..n {
                let mut p = JPoly::zero(n as usize);
                for e in multi_indices(n as usize, deg as usize) {
                    let c = Scalar::from_int(rng.small());
                    if !c.is_zero() {
                        p = p.add(&JPoly {
                            arity: n as usize,
                            terms: BTreeMap::from([(e.clone(), c)]),
                        });
                    }
                }
                comps.push(p);
            }
            let m = TruncatedMap { n, k, comps };
            if !m.linear_part().det().is_zero() {
                return m;
            }
        }
    }

    /// Random jet fixing the origin with identity linear part.
    pub fn random_njet(n: u8, k: u8, deg: u8, rng: &mut Rng) -> Map {
        let mut m = Map::random(n, k, deg, rng);
        for i in 0..n as usize {
            // clear constant and linear coefficients, then restore identity
            let mut p = JPoly::zero(n as usize);
            for (e, c) in &m.comps[i].terms {
                let d: usize = e.iter().map(|&x| x as usize).sum();
                if d >= 2 {
                    p.insert(e.clone(), c.clone());
                }
            }
            m.comps[i] = p.add(&JPoly::var(n as usize, i));
        }
        m
    }

    /// Random affine map with invertible linear part.
    pub fn random_affine(n: u8, rng: &mut Rng) -> AffineMap<Scalar> {
        loop {
            let a = Mat::from_fn(n as usize, |_, _| Scalar::from_int(rng.small()));
            if a.det().is_zero() {
                continue;
            }
            let b = (0..n).map(|_| Scalar::from_int(rng.small())).collect();
            return AffineMap { a, b };
        }
    }

    /// Prolonged action on the frame bundle: `(x, y) -> (phi(x), phi'(x) y)`.
    pub fn prolong(&self, x: &[Scalar], y: &Mat<Scalar>) -> (Vec<Scalar>, Mat<Scalar>) {
        let xs: Vec<Scalar> = self.comps.iter().map(|c| c.eval(x)).collect();
        let jac = self.jacobian();
        let jac_at = Mat::from_fn(self.n as usize, |i, j| jac.at(i, j).eval(x));
        (xs, jac_at.mul(y))
    }
}

/// All exponent multi-indices in `n` variables of total degree <= `deg`.
pub fn multi_indices(n: usize, deg: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; n]];
    for _ in 0..deg {
        let mut next: Vec<Vec<u8>> = Vec::new();
        for e in &out {
            for i in 0..n {
                let mut v = e.clone();
                v[i] += 1;
                next.push(v);
            }
        }
        out.extend(next);
    }
    out.sort();
    out.dedup();
    out
}

/// Sorted multisets over 1..=n of the given size.
pub fn sorted_multisets(n: u8, size: usize) -> Vec<Vec<u8>> {
    fn rec(n: u8, size: usize, min: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if size == 0 {
            out.push(cur.clone());
            return;
        }
        for v in min..=n {
            cur.push(v);
            rec(n, size - 1, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, size, 1, &mut Vec::new(), &mut out);
    out
}

fn multiset_factorial(e: &[u8]) -> u64 {
    // product of multiplicities factorials of an exponent vector
    e.iter().map(|&x| (1..=x as u64).product::<u64>().max(1)).product()
}

/// Exact values of all gamma jet symbols of a fixed map at a fixed frame
/// point, served from one shifted-series computation.
pub struct GammaTable {
    n: usize,
    max_ord: usize,
    y: Mat<Scalar>,
    /// `m[mu][beta]` = y^-1 (beta! [h^beta] W_mu) y, with
    /// `W_mu = phi'(x0+h)^-1 d_mu phi'(x0+h)`.
    m: Vec<BTreeMap<Vec<u8>, Mat<Scalar>>>,
}

impl GammaTable {
    /// `max_ord` is the largest number of derivative directions `|L|` served.
    pub fn new(
        phi: &Map,
        x0: &[Scalar],
        y0: &Mat<Scalar>,
        max_ord: usize,
    ) -> Result<GammaTable, JetError> {
        let n = phi.n as usize;
        // Shift the map to a series in h around x0.
        let shift_args: Vec<JPoly<Scalar>> = (0..n)
            .map(|j| JPoly::var(n, j).add(&JPoly::constant(n, x0[j].clone())))
            .collect();
        let hdeg = max_ord + 1;
        let shifted: Vec<JPoly<Scalar>> =
            phi.comps.iter().map(|c| c.compose(&shift_args, usize::MAX)).collect();
        let jac = Mat::from_fn(n, |i, j| shifted[i].derivative(j).truncate(hdeg));
        let jac_inv =
            series_matrix_inverse(&jac, n, hdeg).ok_or(JetError::SingularLinearPart)?;
        let yinv = y0.inverse().ok_or(JetError::SingularLinearPart)?;
        let mut m = Vec::new();
        for mu in 0..n {
            let dmu = Mat::from_fn(n, |i, j| jac.at(i, j).derivative(mu).truncate(max_ord));
            let w = mat_mul_trunc(&jac_inv, &dmu, max_ord);
            let mut per_beta = BTreeMap::new();
            for beta in multi_indices(n, max_ord) {
                let fact = Scalar::from_int(multiset_factorial(&beta) as i64);
                let coeff = Mat::from_fn(n, |i, j| w.at(i, j).coeff(&beta).mul(&fact));
                per_beta.insert(beta, yinv.mul(&coeff.mul(y0)));
            }
            m.push(per_beta);
        }
        Ok(GammaTable { n, max_ord, y: y0.clone(), m })
    }

    /// gamma^i_{j k L}(phi)(x0, y0).
    pub fn value(&self, idx: &JetIdx) -> Result<Scalar, JetError> {
        if idx.ell.len() > self.max_ord {
            return Err(JetError::InsufficientJetOrder);
        }
        let r = idx.ell.len();
        let mut acc = Scalar::zero();
        // sum over mu and over assignments nu: positions of L -> 1..n
        let mut nus = vec![vec![]];
        for _ in 0..r {
            let mut next = Vec::new();
            for nu in &nus {
                for v in 0..self.n {
                    let mut w: Vec<usize> = nu.clone();
                    w.push(v);
                    next.push(w);
                }
            }
            nus = next;
        }
        for mu in 0..self.n {
            for nu in &nus {
                let mut beta = vec![0u8; self.n];
                for &v in nu {
                    beta[v] += 1;
                }
                let mat = &self.m[mu][&beta];
                let mut c = mat
                    .at(idx.i as usize - 1, idx.j as usize - 1)
                    .mul(self.y.at(mu, idx.k as usize - 1));
                for (s, &v) in nu.iter().enumerate() {
                    c = c.mul(self.y.at(v, idx.ell[s] as usize - 1));
                }
                acc = acc.add(&c);
            }
        }
        Ok(acc)
    }
}

/// gamma^i_{j k L}(phi) as an exact rational function in the frame-bundle
/// coordinates `(x, y)`.
pub fn gamma_fn(phi: &Map, idx: &JetIdx) -> Result<RationalFn, JetError> {
    let n = phi.n as usize;
    let xv = |mu: usize| Sym::X(mu as u8 + 1);
    let comp_poly = |c: &JPoly<Scalar>| -> Poly {
        let mut p = Poly::zero();
        for (e, s) in &c.terms {
            let mut t = Poly::constant(s.clone());
            for (mu, &ex) in e.iter().enumerate() {
                if ex > 0 {
                    t = t.mul(&Poly::var(xv(mu)).pow(ex as u32));
                }
            }
            p = p.add(&t);
        }
        p
    };
    let jac = Mat::from_fn(n, |i, j| {
        RationalFn::from_poly(comp_poly(&phi.comps[i]).derivative(&xv(j)))
    });
    let jac_inv = jac.inverse().ok_or(JetError::SingularLinearPart)?;
    let ymat = Mat::from_fn(n, |i, j| {
        RationalFn::from_poly(Poly::var(Sym::Y(i as u8 + 1, j as u8 + 1)))
    });
    let yinv = ymat.inverse().ok_or(JetError::SingularLinearPart)?;
    // gamma^i_j k = (y^-1 J^-1 d_mu J y)^i_j y^mu_k
    let mut g = RationalFn::zero();
    for mu in 0..n {
        let dmu = Mat::from_fn(n, |i, j| jac.at(i, j).as_poly().unwrap().derivative(&xv(mu)));
        let dmu_r = Mat::from_fn(n, |i, j| RationalFn::from_poly(dmu.at(i, j).clone()));
        let w = yinv.mul(&jac_inv.mul(&dmu_r)).mul(&ymat);
        let term = w
            .at(idx.i as usize - 1, idx.j as usize - 1)
            .mul(ymat.at(mu, idx.k as usize - 1));
        g = g.add(&term);
    }
    // horizontal derivatives X_l = y^nu_l d/d x^nu
    for &l in &idx.ell {
        let mut next = RationalFn::zero();
        for nu in 0..n {
            let ynl = RationalFn::from_poly(Poly::var(Sym::Y(nu as u8 + 1, l)));
            next = next.add(&ynl.mul(&g.derivative(&xv(nu))));
        }
        g = next;
    }
    Ok(g)
}

/// Reads the free symmetric coordinate `a^i_M` off a jet fixing the origin
/// with identity linear part.
pub fn alpha_of_map(psi: &Map, a: &AlphaIdx) -> Scalar {
    let n = psi.n as usize;
    let mut e = vec![0u8; n];
    for &v in &a.lower {
        e[v as usize - 1] += 1;
    }
    let fact = Scalar::from_int(multiset_factorial(&e) as i64);
    psi.comps[a.i as usize - 1].coeff(&e).mul(&fact)
}

/// Per-dimension jet context: eta polynomials in alpha coordinates, the
/// inverse conversion, and the Lie-algebra action tables. All tables are
/// immutable once built.
pub struct JetContext {
    pub n: u8,
    /// maximal jet-symbol order (number of lower indices) served
    pub ord: usize,
    eta: BTreeMap<JetIdx, Poly>,
    alpha_in_eta: BTreeMap<AlphaIdx, Poly>,
    /// action of the basis (X_k then Y^i_j) on each alpha symbol
    action: BTreeMap<(Sym, AlphaIdx), Poly>,
}

/// Generic jet with symbolic alpha coefficients, over any ring containing
/// the alpha polynomials.
fn generic_njet<R: Ring>(n: u8, ord: usize, lift: &dyn Fn(&Poly) -> R) -> TruncatedMap<R> {
    let nn = n as usize;
    let mut comps = Vec::new();
    for i in 1..=n {
        let mut p = JPoly::var(nn, i as usize - 1).map_coeffs(&|s: &Scalar| {
            lift(&Poly::constant(s.clone()))
        });
        for size in 2..=ord {
            for m in sorted_multisets(n, size) {
                let mut e = vec![0u8; nn];
                for &v in &m {
                    e[v as usize - 1] += 1;
                }
                let denom = Scalar::inv_int(multiset_factorial(&e));
                let coeff =
                    Poly::var(Sym::Alpha(AlphaIdx::new(i, &m))).scale(&denom);
                let mut mono = JPoly::zero(nn);
                mono.insert(e, lift(&coeff));
                p = p.add(&mono);
            }
        }
        comps.push(p);
    }
    TruncatedMap { n, k: ord as u8, comps }
}

impl JetContext {
    pub fn new(n: u8, ord: usize) -> JetContext {
        let eta = Self::build_eta(n, ord);
        let alpha_in_eta = Self::build_alpha_in_eta(n, ord, &eta);
        let action = Self::build_action(n, ord);
        JetContext { n, ord, eta, alpha_in_eta, action }
    }

    /// eta^i_{j k L} as a polynomial in the alpha coordinates: the value of
    /// the gamma symbol at the identity frame on a generic jet.
    fn build_eta(n: u8, ord: usize) -> BTreeMap<JetIdx, Poly> {
        let nn = n as usize;
        let psi: TruncatedMap<Poly> = generic_njet(n, ord, &|p| p.clone());
        let max_l = ord.saturating_sub(2);
        let jac = psi.jacobian();
        let jac = Mat::from_fn(nn, |i, j| jac.at(i, j).truncate(max_l + 1));
        let jac_inv = series_matrix_inverse(&jac, nn, max_l + 1).expect("unit jacobian");
        let mut out = BTreeMap::new();
        for k in 1..=n {
            let dk = Mat::from_fn(nn, |i, j| jac.at(i, j).derivative(k as usize - 1));
            let w = mat_mul_trunc(&jac_inv, &dk, max_l);
            for i in 1..=n {
                for j in 1..=n {
                    for r in 0..=max_l {
                        for ell in sorted_multisets(n, r) {
                            let idx = JetIdx::new(i, j, k, &ell);
                            if out.contains_key(&idx) {
                                continue;
                            }
                            let mut beta = vec![0u8; nn];
                            for &v in &ell {
                                beta[v as usize - 1] += 1;
                            }
                            let fact =
                                Scalar::from_int(multiset_factorial(&beta) as i64);
                            let val = w
                                .at(i as usize - 1, j as usize - 1)
                                .coeff(&beta)
                                .scale(&fact);
                            out.insert(idx, val);
                        }
                    }
                }
            }
        }
        out
    }

    /// Triangular inversion: each alpha symbol as a polynomial in eta symbols.
    fn build_alpha_in_eta(
        n: u8,
        ord: usize,
        eta: &BTreeMap<JetIdx, Poly>,
    ) -> BTreeMap<AlphaIdx, Poly> {
        let mut out: BTreeMap<AlphaIdx, Poly> = BTreeMap::new();
        for size in 2..=ord {
            for m in sorted_multisets(n, size) {
                for i in 1..=n {
                    let a = AlphaIdx::new(i, &m);
                    // canonical eta with the same leading alpha
                    let idx = JetIdx::new(i, m[0], m[1], &m[2..]);
                    let expansion = &eta[&idx];
                    // expansion = alpha_a + lower-order alpha terms
                    let lower = expansion.sub(&Poly::var(Sym::Alpha(a.clone())));
                    // substitute already-inverted lower alphas by eta polys
                    let mut bind = BTreeMap::new();
                    for v in lower.vars() {
                        if let Sym::Alpha(b) = v {
                            bind.insert(
                                v.clone(),
                                out.get(b)
                                    .unwrap_or_else(|| {
                                        panic!("triangularity broken at {:?}", b)
                                    })
                                    .clone(),
                            );
                        }
                    }
                    let lower_in_eta = lower.substitute(&bind);
                    let val = Poly::var(Sym::Eta(idx)).sub(&lower_in_eta);
                    out.insert(a, val);
                }
            }
        }
        out
    }

    /// Infinitesimal matched-pair action of the affine Lie algebra on the
    /// alpha coordinates, computed with dual numbers through the
    /// factorization of `psi o exp(t Z)`.
    fn build_action(n: u8, ord: usize) -> BTreeMap<(Sym, AlphaIdx), Poly> {
        type PD = Dual<Poly>;
        let nn = n as usize;
        let psi: TruncatedMap<PD> = generic_njet(n, ord, &|p| Dual::constant(p.clone()));
        let mut basis: Vec<(Sym, AffineMap<PD>)> = Vec::new();
        for k in 1..=n {
            let mut aff = AffineMap::identity(nn);
            aff.b[k as usize - 1] = Dual { re: Poly::zero(), im: Poly::one() };
            basis.push((Sym::X(k), aff));
        }
        for i in 1..=n {
            for j in 1..=n {
                let mut aff = AffineMap::identity(nn);
                // flow of the fundamental vertical field: right multiplication
                // by Id + t e_{ij}
                *aff.a.at_mut(i as usize - 1, j as usize - 1) = Dual {
                    re: if i == j { Poly::one() } else { Poly::zero() },
                    im: Poly::one(),
                };
                basis.push((Sym::Y(i, j), aff));
            }
        }
        let mut out = BTreeMap::new();
        for (z, aff) in basis {
            let (_, nil) = psi
                .act_right(&aff)
                .expect("generic jet factorization");
            for size in 2..=ord.saturating_sub(1) {
                for m in sorted_multisets(n, size) {
                    for i in 1..=n {
                        let a = AlphaIdx::new(i, &m);
                        let mut e = vec![0u8; nn];
                        for &v in &m {
                            e[v as usize - 1] += 1;
                        }
                        let fact = Scalar::from_int(multiset_factorial(&e) as i64);
                        let c = nil.comps[i as usize - 1].coeff(&e);
                        out.insert((z.clone(), a), c.im.scale(&fact));
                    }
                }
            }
        }
        out
    }

    pub fn eta_in_alpha(&self, idx: &JetIdx) -> &Poly {
        self.eta.get(idx).unwrap_or_else(|| panic!("eta order too high: {:?}", idx))
    }

    pub fn has_eta(&self, idx: &JetIdx) -> bool {
        self.eta.contains_key(idx)
    }

    /// Rewrites a polynomial in alpha symbols as a polynomial in eta symbols
    /// (one valid representative; eta symbols satisfy residual identities).
    pub fn alpha_poly_to_eta(&self, p: &Poly) -> Poly {
        let mut bind = BTreeMap::new();
        for v in p.vars() {
            if let Sym::Alpha(a) = v {
                bind.insert(v.clone(), self.alpha_in_eta[a].clone());
            }
        }
        p.substitute(&bind)
    }

    /// Rewrites a polynomial in eta symbols as a canonical polynomial in
    /// alpha symbols.
    pub fn eta_poly_to_alpha(&self, p: &Poly) -> Poly {
        let mut bind = BTreeMap::new();
        for v in p.vars() {
            if let Sym::Eta(idx) = v {
                bind.insert(v.clone(), self.eta[idx].clone());
            }
        }
        p.substitute(&bind)
    }

    /// Derivation action of a Lie algebra basis element on a polynomial in
    /// alpha coordinates.
    pub fn g_action(&self, z: &Sym, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for v in f.vars().to_vec() {
            if let Sym::Alpha(a) = &v {
                let zv = self
                    .action
                    .get(&(z.clone(), a.clone()))
                    .unwrap_or_else(|| panic!("action table order too low for {:?}", a));
                out = out.add(&f.derivative(&v).mul(zv));
            }
        }
        out
    }

    /// Evaluates a polynomial in alpha symbols on a concrete jet.
    pub fn eval_alpha_poly(&self, f: &Poly, psi: &Map) -> Scalar {
        let mut bind = BTreeMap::new();
        for v in f.vars() {
            if let Sym::Alpha(a) = v {
                bind.insert(v.clone(), alpha_of_map(psi, a));
            }
        }
        let r = f.eval_partial(&bind);
        r.as_scalar().expect("alpha evaluation left free symbols")
    }
}
