//! Enumeration of the index pairs parameterizing the characteristic classes
//! and assembly of the corresponding cocycles, in the form-valued group
//! cochain model and in the Chevalley-Eilenberg model.

use std::fmt;

use crate::bott::BottCochain;
use crate::ce::{CECochain, CEFactor, CETerm};
use crate::form::{Form, Letter};
use crate::jet::JetContext;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::simplicial::{
    assembly_sign, chern_form, fiber_integrate, simplicial_connection, simplicial_curvature,
    transgress, transgress_relative_odd,
};
use crate::sym::Sym;

/// Index pair `(I, J)`: transgressed degrees `I` strictly increasing, Chern
/// degrees `J` a nondecreasing multiset, weight of `J` bounded by the
/// dimension.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct VeyPair {
    pub i_set: Vec<u8>,
    pub j_set: Vec<u8>,
    pub relative: bool,
}

impl VeyPair {
    pub fn weight_j(&self) -> u32 {
        self.j_set.iter().map(|&j| j as u32).sum()
    }

    /// Total degree of the associated cocycle.
    pub fn total_degree(&self) -> usize {
        let from_i: usize = self.i_set.iter().map(|&i| 2 * i as usize - 1).sum();
        from_i + 2 * self.weight_j() as usize
    }

    pub fn id(&self) -> String {
        format!("{}", self)
    }
}

impl fmt::Display for VeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[u8]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(
            f,
            "{}I{{{}}}J{{{}}}",
            if self.relative { "rel-" } else { "" },
            list(&self.i_set),
            list(&self.j_set)
        )
    }
}

/// All strictly increasing subsets of `1..=n` (including the empty one).
fn subsets_of_range(n: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for v in 1..=n {
        let mut next = out.clone();
        for s in &out {
            let mut t = s.clone();
            t.push(v);
            next.push(t);
        }
        out = next;
    }
    out.sort();
    out
}

/// All nondecreasing lists with entries in `1..=n` and entry-sum at most `n`
/// (including the empty one).
fn multisets_bounded(n: u8) -> Vec<Vec<u8>> {
    fn rec(n: u8, min: u8, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        out.push(cur.clone());
        for v in min..=n {
            if v as u32 > left {
                break;
            }
            cur.push(v);
            rec(n, v, left - v as u32, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 1, n as u32, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

fn admissible(n: u8, i_set: &[u8], j_set: &[u8], relative: bool) -> bool {
    let weight: u32 = j_set.iter().map(|&j| j as u32).sum();
    if weight > n as u32 {
        return false;
    }
    if relative {
        if i_set.iter().any(|&i| i % 2 == 0) {
            return false;
        }
        const INF: u32 = u32::MAX / 2;
        let i0 = i_set.first().map(|&i| i as u32).unwrap_or(INF);
        let j0 = j_set
            .iter()
            .copied()
            .filter(|j| j % 2 == 1)
            .min()
            .map(|j| j as u32)
            .unwrap_or(INF);
        i0 <= j0 && i0.saturating_add(weight) > n as u32
    } else {
        let (Some(&i1), Some(&j1)) = (i_set.first(), j_set.first()) else {
            return false;
        };
        i1 <= j1 && i1 as u32 + weight > n as u32
    }
}

/// The admissible pairs in deterministic lexicographic order.
pub fn enumerate_vey(n: u8, relative: bool) -> Vec<VeyPair> {
    let mut out = Vec::new();
    for i_set in subsets_of_range(n) {
        for j_set in multisets_bounded(n) {
            if admissible(n, &i_set, &j_set, relative) {
                out.push(VeyPair { i_set: i_set.clone(), j_set, relative });
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug)]
pub enum BuildError {
    PairNotAdmissible(String),
    EvenRelativeTransgression(u8),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::PairNotAdmissible(p) => write!(f, "pair not in the enumerated set: {p}"),
            BuildError::EvenRelativeTransgression(i) => {
                write!(f, "even transgression degree {i} in the relative model")
            }
        }
    }
}

impl std::error::Error for BuildError {}

/// Assembles the characteristic cocycle of a pair level by level: the wedge
/// of transgressed factors (in order) and Chern factors over the simplex,
/// integrated along the fiber with the frozen alternating factor.
pub fn build_bott_cocycle(n: u8, pair: &VeyPair) -> Result<BottCochain, BuildError> {
    if !admissible(n, &pair.i_set, &pair.j_set, pair.relative) {
        return Err(BuildError::PairNotAdmissible(pair.id()));
    }
    let deg = pair.total_degree();
    let mut out = BottCochain::zero(n);
    for p in 0..=deg {
        // levels whose residual coframe degree exceeds the bundle dimension
        // cannot survive integration
        if deg - p > (n as usize) + (n as usize) * (n as usize) {
            continue;
        }
        let omega_hat = simplicial_connection(n, p);
        let curv = simplicial_curvature(&omega_hat, n);
        let mut factors: Vec<Form> = Vec::new();
        for &i in &pair.i_set {
            let tc = if pair.relative {
                transgress_relative_odd(i as usize, &omega_hat, &curv)
                    .map_err(|_| BuildError::EvenRelativeTransgression(i))?
            } else {
                transgress(i as usize, &omega_hat, &curv)
            };
            factors.push(tc);
        }
        for &j in &pair.j_set {
            factors.push(chern_form(j as usize, &curv));
        }
        let integrated = fiber_integrate(p, &wedge_all_for_level(&factors, p));
        if integrated.is_zero() {
            continue;
        }
        let signed = integrated.scale_scalar(&assembly_sign(p));
        out.insert(p, signed);
    }
    Ok(out)
}

/// Wedges the factors, discarding along the way every term that can no
/// longer reach the full simplex degree by the end of the product (only
/// those survive the fiber integration).
fn wedge_all_for_level(factors: &[Form], p: usize) -> Form {
    let max_dt: Vec<usize> = factors
        .iter()
        .map(|f| f.terms.keys().map(|w| w.dt_degree()).max().unwrap_or(0))
        .collect();
    let mut suffix = vec![0usize; factors.len() + 1];
    for i in (0..factors.len()).rev() {
        suffix[i] = suffix[i + 1] + max_dt[i];
    }
    let mut prod = Form::one();
    for (i, f) in factors.iter().enumerate() {
        prod = prod.wedge(f);
        let needed = p.saturating_sub(suffix[i + 1]);
        prod.terms.retain(|w, _| w.dt_degree() >= needed);
        if prod.is_zero() {
            break;
        }
    }
    prod
}

fn factorial_scalar(m: u64) -> Scalar {
    let mut acc = Scalar::one();
    for i in 2..=m {
        acc = acc.mul(&Scalar::from_int(i as i64));
    }
    acc
}

/// The Chevalley-Eilenberg preimage of a characteristic cocycle: slots are
/// restricted to origin-fixing jets, slot-tagged first-order symbols become
/// identity-frame jet coordinates (one wedge factor per slot), and the
/// coframe words are read at the identity. The `1/(p+1)!` normalization
/// makes the transfer map a strict left inverse of this construction.
pub fn build_ce_cocycle(
    n: u8,
    pair: &VeyPair,
    ctx: &JetContext,
) -> Result<CECochain, BuildError> {
    let bott = build_bott_cocycle(n, pair)?;
    let mut out = CECochain::zero(n);
    for (&p, form) in &bott.comps {
        let norm = factorial_scalar(p as u64 + 1).inv().unwrap();
        for (word, coeff) in &form.terms {
            assert!(
                word.0.iter().all(|l| !matches!(l, Letter::Dt(_))),
                "integrated component still carries simplex letters"
            );
            let vars = coeff.vars().to_vec();
            for (exps, scalar) in coeff.terms_with_lambda() {
                // split the monomial into per-slot jet factors
                let mut etas: Vec<Poly> = vec![Poly::one(); p + 1];
                for (vi, &e) in exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match &vars[vi] {
                        Sym::Gamma(slot, idx) => {
                            let f = Poly::var(Sym::Eta(idx.clone())).pow(e as u32);
                            etas[*slot as usize] = etas[*slot as usize].mul(&f);
                        }
                        other => panic!("unexpected symbol {other:?} in cocycle"),
                    }
                }
                let factors: Vec<CEFactor> = etas
                    .into_iter()
                    .map(|e| CEFactor {
                        alpha: ctx.eta_poly_to_alpha(&e),
                        eta: Some(e),
                    })
                    .collect();
                out.push(CETerm {
                    coeff: Poly::constant(scalar.mul(&norm)),
                    alpha: word.clone(),
                    factors,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bott::verify_cocycle;
    use crate::ce::theta_map;
    use crate::form::Word;
    use crate::sym::JetIdx;

    /// Independent brute-force oracle: iterative candidate generation and a
    /// literal transcription of the admissibility conditions.
    fn brute_force(n: u8, relative: bool) -> Vec<VeyPair> {
        // subsets by bitmask
        let mut all_i: Vec<Vec<u8>> = Vec::new();
        for mask in 0u32..(1 << n) {
            let mut s = Vec::new();
            for v in 1..=n {
                if mask & (1 << (v - 1)) != 0 {
                    s.push(v);
                }
            }
            all_i.push(s);
        }
        // multisets as weak compositions via counts
        let mut all_j: Vec<Vec<u8>> = vec![vec![]];
        {
            let mut stack = vec![vec![]];
            while let Some(cur) = stack.pop() {
                let sum: u32 = cur.iter().map(|&x: &u8| x as u32).sum();
                let start = cur.last().copied().unwrap_or(1);
                for v in start..=n {
                    if sum + v as u32 <= n as u32 {
                        let mut t = cur.clone();
                        t.push(v);
                        all_j.push(t.clone());
                        stack.push(t);
                    }
                }
            }
        }
        all_j.sort();
        all_j.dedup();
        let mut out = Vec::new();
        for i_set in &all_i {
            for j_set in &all_j {
                let wj: u32 = j_set.iter().map(|&x| x as u32).sum();
                let keep = if relative {
                    let odd_only = i_set.iter().all(|&x| x % 2 == 1);
                    let i0: Option<u8> = i_set.first().copied();
                    let j0: Option<u8> = j_set.iter().copied().filter(|x| x % 2 == 1).min();
                    let cmp_ok = match (i0, j0) {
                        (Some(a), Some(b)) => a <= b,
                        (Some(_), None) => true,
                        (None, Some(_)) => false,
                        (None, None) => true,
                    };
                    let deg_ok = match i0 {
                        Some(a) => a as u32 + wj > n as u32,
                        None => true,
                    };
                    odd_only && cmp_ok && deg_ok
                } else {
                    match (i_set.first(), j_set.first()) {
                        (Some(&a), Some(&b)) => a <= b && a as u32 + wj > n as u32,
                        _ => false,
                    }
                };
                if keep {
                    out.push(VeyPair { i_set: i_set.clone(), j_set: j_set.clone(), relative });
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=3u8 {
            for relative in [false, true] {
                assert_eq!(
                    enumerate_vey(n, relative),
                    brute_force(n, relative),
                    "mismatch at n={n} relative={relative}"
                );
            }
        }
    }

    #[test]
    fn known_small_enumerations() {
        let abs1 = enumerate_vey(1, false);
        assert_eq!(abs1.len(), 1);
        assert_eq!((abs1[0].i_set.clone(), abs1[0].j_set.clone()), (vec![1], vec![1]));

        let abs2 = enumerate_vey(2, false);
        let pairs: Vec<(Vec<u8>, Vec<u8>)> =
            abs2.iter().map(|p| (p.i_set.clone(), p.j_set.clone())).collect();
        let mut expect = vec![
            (vec![1], vec![2]),
            (vec![1], vec![1, 1]),
            (vec![2], vec![2]),
            (vec![1, 2], vec![2]),
            (vec![1, 2], vec![1, 1]),
        ];
        expect.sort();
        assert_eq!(pairs, expect);

        let rel1 = enumerate_vey(1, true);
        let pairs: Vec<(Vec<u8>, Vec<u8>)> =
            rel1.iter().map(|p| (p.i_set.clone(), p.j_set.clone())).collect();
        assert_eq!(pairs, vec![(vec![], vec![]), (vec![1], vec![1])]);
    }

    #[test]
    fn degree_bookkeeping() {
        for n in 1..=2u8 {
            for p in enumerate_vey(n, false) {
                let d: usize = p.i_set.iter().map(|&i| 2 * i as usize - 1).sum::<usize>()
                    + 2 * p.weight_j() as usize;
                assert_eq!(p.total_degree(), d);
            }
        }
    }

    #[test]
    fn gv_cocycle_shape_one_dim() {
        let pair = &enumerate_vey(1, false)[0];
        let c = build_bott_cocycle(1, pair).unwrap();
        // single component at group degree one, valued in top forms
        assert_eq!(c.comps.keys().copied().collect::<Vec<_>>(), vec![1]);
        let f = &c.comps[&1];
        let g = |slot: u8| Poly::var(Sym::Gamma(slot, JetIdx::new(1, 1, 1, &[])));
        let mut expect = Form::zero();
        expect.insert(
            Word(vec![Letter::Th(1), Letter::Om(1, 1)]),
            g(0).sub(&g(1)).scale(&Scalar::lambda().pow(2)),
        );
        assert_eq!(*f, expect);
    }

    #[test]
    fn gv_cocycle_closed_one_dim() {
        let pair = &enumerate_vey(1, false)[0];
        let c = build_bott_cocycle(1, pair).unwrap();
        let cert = verify_cocycle(&c, &pair.id(), 20, 7, 4);
        assert!(cert.pass, "failures: {:?}", cert.failures.len());
    }

    #[test]
    fn relative_empty_pair_is_constant_cocycle() {
        let pair = VeyPair { i_set: vec![], j_set: vec![], relative: true };
        let c = build_bott_cocycle(1, &pair).unwrap();
        assert_eq!(c.comps.keys().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(c.comps[&0], Form::one());
        let cert = verify_cocycle(&c, &pair.id(), 5, 3, 4);
        assert!(cert.pass);
    }

    #[test]
    fn relative_pure_chern_reduces_to_chern_cocycle() {
        // the pair (empty, {2}) at n=2 is the plain Chern cocycle
        let pair = VeyPair { i_set: vec![], j_set: vec![2], relative: true };
        let c = build_bott_cocycle(2, &pair).unwrap();
        assert!(!c.is_zero());
        for (&p, f) in &c.comps {
            let direct = {
                let w = simplicial_connection(2, p);
                let curv = simplicial_curvature(&w, 2);
                fiber_integrate(p, &chern_form(2, &curv)).scale_scalar(&assembly_sign(p))
            };
            assert_eq!(*f, direct);
        }
    }

    #[test]
    fn ce_transfer_round_trip_one_dim() {
        // theta(kappa) equals the group-model cocycle symbolically for the
        // lowest pair
        let ctx = JetContext::new(1, 5);
        let pair = &enumerate_vey(1, false)[0];
        let bott = build_bott_cocycle(1, pair).unwrap();
        let kappa = build_ce_cocycle(1, pair, &ctx).unwrap();
        let back = theta_map(&kappa, &ctx);
        assert_eq!(back, bott);
    }

    #[test]
    fn ce_factors_are_second_order_only_one_dim() {
        let ctx = JetContext::new(1, 5);
        let pair = &enumerate_vey(1, false)[0];
        let kappa = build_ce_cocycle(1, pair, &ctx).unwrap();
        let report = crate::ce::two_jet_audit(&kappa, &ctx);
        assert!(report.pass, "offenders: {:?}", report.offenders);
        // and the only jet coordinate involved is the lowest one
        for t in &kappa.terms {
            for f in &t.factors {
                for v in f.alpha.vars() {
                    assert!(matches!(v, Sym::Alpha(a) if a.lower == vec![1, 1]));
                }
            }
        }
    }
}
