//! Form-valued homogeneous group cochains, the group and total coboundaries,
//! and cocycle verification by exact evaluation at random jets and frame
//! points.

use std::collections::BTreeMap;

use crate::form::{evaluate_form, Form};
use crate::jet::{GammaTable, Map};
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::sym::Sym;

/// Total-coboundary sign in front of the de Rham part at group degree `p`,
/// calibrated together with the fiber-integration signs and frozen.
pub fn total_d_sign(p: usize) -> i64 {
    if p % 2 == 0 {
        -1
    } else {
        1
    }
}

/// Cochain of the homogeneous bicomplex: at group degree `p` a form whose
/// coefficients carry jet symbols in slots `0..=p`.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct BottCochain {
    pub n: u8,
    pub comps: BTreeMap<usize, Form>,
}

impl BottCochain {
    pub fn zero(n: u8) -> Self {
        BottCochain { n, comps: BTreeMap::new() }
    }

    pub fn insert(&mut self, p: usize, f: Form) {
        if !f.is_zero() {
            self.comps.insert(p, f);
        }
    }

    pub fn max_group_degree(&self) -> usize {
        self.comps.keys().max().copied().unwrap_or(0)
    }

    /// Largest number of derivative directions on any jet symbol.
    pub fn max_jet_depth(&self) -> usize {
        self.comps
            .values()
            .flat_map(|f| f.terms.values())
            .flat_map(|c| c.vars().to_vec())
            .filter_map(|v| match v {
                Sym::Gamma(_, idx) => Some(idx.ell.len()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
}

/// Renames the slot tags of all jet symbols in a form.
pub fn retag_slots(form: &Form, map: &dyn Fn(u8) -> u8) -> Form {
    form.map_coeffs(&|c| {
        let mut bind: BTreeMap<Sym, Poly> = BTreeMap::new();
        for v in c.vars() {
            if let Sym::Gamma(slot, idx) = v {
                bind.insert(v.clone(), Poly::var(Sym::Gamma(map(*slot), idx.clone())));
            }
        }
        c.substitute(&bind)
    })
}

/// Homogeneous group coboundary: alternating sum over omitted slots,
/// implemented by re-tagging the symbolic slots.
pub fn group_coboundary(c: &BottCochain) -> BottCochain {
    let mut out = BottCochain::zero(c.n);
    for (&p, form) in &c.comps {
        let target = p + 1;
        let mut acc = Form::zero();
        for omit in 0..=target {
            // the surviving slots 0..=p map to 0..=target except `omit`
            let retagged = retag_slots(form, &|s| {
                let s = s as usize;
                (if s < omit { s } else { s + 1 }) as u8
            });
            let signed = if omit % 2 == 0 { retagged } else { retagged.neg() };
            acc = acc.add(&signed);
        }
        if !acc.is_zero() {
            let prev = out.comps.remove(&target).unwrap_or_else(Form::zero);
            out.insert(target, prev.add(&acc));
        }
    }
    out
}

/// Total coboundary `group part + sign(p) * de Rham part`.
pub fn total_coboundary(c: &BottCochain) -> BottCochain {
    let mut out = group_coboundary(c);
    for (&p, form) in &c.comps {
        let mut df = crate::form::d(form, c.n);
        if total_d_sign(p) < 0 {
            df = df.neg();
        }
        if !df.is_zero() {
            let prev = out.comps.remove(&p).unwrap_or_else(Form::zero);
            let sum = prev.add(&df);
            if !sum.is_zero() {
                out.comps.insert(p, sum);
            }
        }
    }
    out
}

/// A sampled trial point: a tuple of group elements and a frame point.
pub struct Sample {
    pub maps: Vec<Map>,
    pub x: Vec<Scalar>,
    pub y: Mat<Scalar>,
}

pub fn random_point(n: usize, rng: &mut Rng) -> (Vec<Scalar>, Mat<Scalar>) {
    let x = (0..n).map(|_| Scalar::from_frac(rng.small(), 2)).collect();
    let y = loop {
        let m = Mat::from_fn(n, |_, _| Scalar::from_int(rng.small()));
        if !m.det().is_zero() {
            break m;
        }
    };
    (x, y)
}

/// Evaluates a slot-symbolic form at a tuple of maps and a frame point.
/// Returns `None` when a jet table is singular at the point (caller
/// resamples).
pub fn eval_component(
    form: &Form,
    maps: &[Map],
    x: &[Scalar],
    y: &Mat<Scalar>,
    max_ord: usize,
) -> Option<Form> {
    let mut tables = Vec::new();
    for m in maps {
        tables.push(GammaTable::new(m, x, y, max_ord).ok()?);
    }
    let table_refs: BTreeMap<u8, &GammaTable> =
        tables.iter().enumerate().map(|(i, t)| (i as u8, t)).collect();
    Some(evaluate_form(form, &table_refs))
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub trial: u32,
    pub group_degree: usize,
    pub slots: Vec<Map>,
    pub x: Vec<Scalar>,
    pub y: Mat<Scalar>,
    pub nonzero_term: String,
}

#[derive(Debug)]
pub struct Certificate {
    pub cocycle_id: String,
    pub trials: u32,
    pub seed: u64,
    pub jet_order: u8,
    pub pass: bool,
    pub failures: Vec<Failure>,
    pub resamples: u32,
}

/// Verifies that the total coboundary vanishes at `trials` random samples:
/// polynomial diffeomorphisms of degree <= 3 with small rational
/// coefficients, frame points with invertible frame. PASS means every
/// evaluated coefficient is exactly zero.
pub fn verify_cocycle(
    c: &BottCochain,
    id: &str,
    trials: u32,
    seed: u64,
    jet_order: u8,
) -> Certificate {
    let total = total_coboundary(c);
    let max_ord = total.max_jet_depth().max(c.max_jet_depth());
    assert!(
        (max_ord + 2) <= jet_order as usize,
        "jet order {jet_order} too low for symbols of depth {max_ord}"
    );
    let n = c.n;
    let slots_needed = total.max_group_degree() + 1;
    let mut rng = Rng::seeded(seed);
    let mut failures = Vec::new();
    let mut resamples = 0u32;
    for trial in 0..trials {
        // sample until every table inverts
        let sample = loop {
            let maps: Vec<Map> =
                (0..slots_needed).map(|_| Map::random(n, jet_order, 3, &mut rng)).collect();
            let (x, y) = random_point(n as usize, &mut rng);
            let ok = maps
                .iter()
                .all(|m| GammaTable::new(m, &x, &y, max_ord).is_ok());
            if ok {
                break Sample { maps, x, y };
            }
            resamples += 1;
        };
        for (&p, form) in &total.comps {
            let value = eval_component(
                form,
                &sample.maps[..=p.min(slots_needed - 1)],
                &sample.x,
                &sample.y,
                max_ord,
            )
            .expect("tables were checked invertible");
            if !value.is_zero() {
                let term = value.terms.iter().next().map(|(w, c)| format!("{:?}: {}", w, c));
                failures.push(Failure {
                    trial,
                    group_degree: p,
                    slots: sample.maps[..=p].to_vec(),
                    x: sample.x.clone(),
                    y: sample.y.clone(),
                    nonzero_term: term.unwrap_or_default(),
                });
            }
        }
    }
    Certificate {
        cocycle_id: id.to_string(),
        trials,
        seed,
        jet_order,
        pass: failures.is_empty(),
        failures,
        resamples,
    }
}
