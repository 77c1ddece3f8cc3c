//! Deterministic self-test: runs the identity suites section by section with
//! a fixed seed and produces a byte-stable report. The command-line tool and
//! the browser demo both expose it.


use crate::bott::{eval_component, verify_cocycle};
use crate::ce::{ce_coboundary, is_zero_by_evaluation, theta_map, two_jet_audit, GStructure};
use crate::form::{d, Form};
use crate::jet::{GammaTable, JetContext, Map};
use crate::matrix::Mat;
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::simplicial::{
    chern_form, curvature_expanded, dupont_d_sign, dupont_face_sign, face_restrict,
    fiber_integrate, simplicial_connection, simplicial_curvature, transgress,
    transgress_relative_odd,
};
use crate::sym::JetIdx;
use crate::vey::{build_bott_cocycle, build_ce_cocycle, enumerate_vey};

pub struct Section {
    pub name: &'static str,
    pub pass: bool,
    pub lines: Vec<String>,
}

fn check(lines: &mut Vec<String>, pass: &mut bool, label: &str, ok: bool) {
    lines.push(format!("  {}: {}", label, if ok { "PASS" } else { "FAIL" }));
    *pass &= ok;
}

fn random_point(n: usize, rng: &mut Rng) -> (Vec<Scalar>, Mat<Scalar>) {
    crate::bott::random_point(n, rng)
}

fn section_jet(seed: u64) -> Section {
    let mut rng = Rng::seeded(seed);
    let mut lines = Vec::new();
    let mut pass = true;
    let mut matched = true;
    let mut kac = true;
    let mut invert = true;
    for t in 0..60 {
        let n = 1 + (t % 2) as u8;
        let psi = Map::random_njet(n, 4, 4, &mut rng);
        let phi = Map::random_affine(n, &mut rng);
        if let Ok((p, q)) = psi.act_right(&phi) {
            matched &= psi.compose(&phi.to_map(4)) == p.to_map(4).compose(&q);
        }
        let full = Map::random(n, 4, 3, &mut rng);
        if let Ok((a, nil)) = full.kac_decompose() {
            kac &= a.to_map(4).compose(&nil) == full && nil.is_njet();
        }
        let fix0 = Map::random_njet(n, 4, 3, &mut rng);
        if let Ok(inv) = fix0.invert() {
            invert &= fix0.compose(&inv).is_identity() && inv.compose(&fix0).is_identity();
        }
    }
    check(&mut lines, &mut pass, "matched-pair factorization (60 trials)", matched);
    check(&mut lines, &mut pass, "affine-nilpotent decomposition (60 trials)", kac);
    check(&mut lines, &mut pass, "inversion round trip (60 trials)", invert);
    Section { name: "jet", pass, lines }
}

fn section_bianchi(seed: u64) -> Section {
    let mut rng = Rng::seeded(seed);
    let mut lines = Vec::new();
    let mut pass = true;
    let mut ok = true;
    let mut done = 0;
    while done < 30 {
        let n = 2u8;
        let phi = Map::random(n, 4, 3, &mut rng);
        let (x, y) = random_point(n as usize, &mut rng);
        let Ok(t) = GammaTable::new(&phi, &x, &y, 1) else { continue };
        let g = |i: u8, j: u8, k: u8, ell: &[u8]| t.value(&JetIdx::new(i, j, k, ell)).unwrap();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    for l in 1..=n {
                        let lhs = g(i, j, l, &[k]).sub(&g(i, j, k, &[l]));
                        let mut rhs = Scalar::zero();
                        for s in 1..=n {
                            rhs = rhs
                                .add(&g(s, j, k, &[]).mul(&g(i, s, l, &[])))
                                .sub(&g(s, j, l, &[]).mul(&g(i, s, k, &[])));
                        }
                        ok &= lhs == rhs;
                    }
                }
            }
        }
        done += 1;
    }
    check(&mut lines, &mut pass, "structure identity at random jets (30 trials)", ok);
    Section { name: "bianchi", pass, lines }
}

fn section_gamma(seed: u64) -> Section {
    let mut rng = Rng::seeded(seed);
    let mut lines = Vec::new();
    let mut pass = true;
    let mut cocycle = true;
    let mut left_inv = true;
    let mut step_one = true;
    let mut done = 0;
    while done < 30 {
        let n = 1 + (done % 2) as u8;
        let phi = Map::random(n, 12, 3, &mut rng);
        let psi = Map::random(n, 12, 3, &mut rng);
        let (x, y) = random_point(n as usize, &mut rng);
        let comp = phi.compose(&psi);
        let (Ok(tc), Ok(tp)) =
            (GammaTable::new(&comp, &x, &y, 0), GammaTable::new(&psi, &x, &y, 0))
        else {
            continue;
        };
        let (px, py) = psi.prolong(&x, &y);
        if py.det().is_zero() {
            continue;
        }
        let Ok(tphi) = GammaTable::new(&phi, &px, &py, 0) else { continue };
        for i in 1..=n {
            let idx = JetIdx::new(i, 1, n, &[]);
            cocycle &= tc.value(&idx).unwrap()
                == tp.value(&idx).unwrap().add(&tphi.value(&idx).unwrap());
        }
        // affine left invariance
        let rho = Map::random_affine(n, &mut rng).to_map(12);
        let la = rho.compose(&phi);
        if let (Ok(t1), Ok(t2)) =
            (GammaTable::new(&la, &x, &y, 1), GammaTable::new(&phi, &x, &y, 1))
        {
            let idx = JetIdx::new(1, 1, 1, &[n]);
            left_inv &= t1.value(&idx).unwrap() == t2.value(&idx).unwrap();
        }
        // identity-frame transport along an affine factor
        let nj = Map::random_njet(n, 6, 3, &mut rng);
        let aff = Map::random_affine(n, &mut rng);
        if let Ok((_, q)) = nj.act_right(&aff) {
            if let Ok(tl) = GammaTable::new(&nj, &aff.b, &aff.a, 2) {
                let e_x = vec![Scalar::zero(); n as usize];
                let e_y = Mat::identity(n as usize);
                let tr = GammaTable::new(&q, &e_x, &e_y, 2).unwrap();
                let idx = JetIdx::new(1, 1, n, &[1]);
                step_one &= tl.value(&idx).unwrap() == tr.value(&idx).unwrap();
            }
        }
        done += 1;
    }
    check(&mut lines, &mut pass, "first-order cocycle identity (30 trials)", cocycle);
    check(&mut lines, &mut pass, "affine left invariance (30 trials)", left_inv);
    check(&mut lines, &mut pass, "identity-frame transport (30 trials)", step_one);
    Section { name: "gamma", pass, lines }
}

fn section_simplicial(_seed: u64) -> Section {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut curv_ok = true;
    let mut chern_closed = true;
    for n in 1..=2u8 {
        for p in 0..=2usize {
            let w = simplicial_connection(n, p);
            let curv = simplicial_curvature(&w, n);
            if n == 1 {
                let exp = curvature_expanded(n, p);
                for i in 0..n as usize {
                    for j in 0..n as usize {
                        curv_ok &= curv.at(i, j) == exp.at(i, j);
                    }
                }
            }
            for k in 1..=n as usize {
                chern_closed &= d(&chern_form(k, &curv), n).is_zero();
            }
        }
    }
    check(&mut lines, &mut pass, "curvature expansion (symbolic, n=1)", curv_ok);
    check(&mut lines, &mut pass, "closed invariant polynomials", chern_closed);
    Section { name: "simplicial", pass, lines }
}

fn section_transgression(_seed: u64) -> Section {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut abs = true;
    let mut rel = true;
    for n in 1..=2u8 {
        for p in 0..=2usize {
            let w = simplicial_connection(n, p);
            let curv = simplicial_curvature(&w, n);
            for k in 1..=n as usize {
                abs &= d(&transgress(k, &w, &curv), n) == chern_form(k, &curv);
            }
            let t = transgress_relative_odd(1, &w, &curv).unwrap();
            rel &= d(&t, n) == chern_form(1, &curv);
            if n == 2 {
                rel &= crate::form::contract_skew(&t, 1, 2).is_zero();
            }
        }
    }
    check(&mut lines, &mut pass, "transgression differential identity", abs);
    check(&mut lines, &mut pass, "relative odd transgression identity", rel);
    Section { name: "transgression", pass, lines }
}

fn section_dupont(seed: u64) -> Section {
    let mut rng = Rng::seeded(seed);
    let mut lines = Vec::new();
    let mut pass = true;
    let mut ok = true;
    for _ in 0..20 {
        let n = 1 + (rng.next_u64() % 2) as u8;
        let p = 1 + (rng.next_u64() % 3) as usize;
        let a = random_simplicial_form(n, p, &mut rng);
        let lhs = fiber_integrate(p, &d(&a, n));
        let mut rhs = Form::zero();
        for i in 0..=p {
            let fi = fiber_integrate(p - 1, &face_restrict(p, &a, i));
            rhs = if dupont_face_sign(i) < 0 { rhs.sub(&fi) } else { rhs.add(&fi) };
        }
        let di = d(&fiber_integrate(p, &a), n);
        rhs = if dupont_d_sign(p) < 0 { rhs.sub(&di) } else { rhs.add(&di) };
        ok &= lhs == rhs;
    }
    check(&mut lines, &mut pass, "fiber-integration chain identity (20 forms)", ok);
    Section { name: "dupont", pass, lines }
}

fn random_simplicial_form(n: u8, p: usize, rng: &mut Rng) -> Form {
    use crate::form::{Letter, Word};
    use crate::poly::Poly;
    use crate::sym::Sym;
    let mut letters: Vec<Letter> = Vec::new();
    for r in 1..=p {
        letters.push(Letter::Dt(r as u16));
    }
    for k in 1..=n {
        letters.push(Letter::Th(k));
    }
    for i in 1..=n {
        for j in 1..=n {
            letters.push(Letter::Om(i, j));
        }
    }
    let mut f = Form::zero();
    for _ in 0..4 {
        let mut w = Word::empty();
        for l in &letters {
            if rng.next_u64() % 3 == 0 {
                if let Some((nw, _)) = w.wedge(&Word::single(*l)) {
                    w = nw;
                }
            }
        }
        let mut c = Poly::constant(Scalar::from_int(rng.small()));
        for r in 1..=p {
            c = c.mul(&Poly::var(Sym::T(r as u16)).pow(rng.int_range(0, 2) as u32));
        }
        if rng.next_u64() % 2 == 0 {
            let i = 1 + (rng.next_u64() % n as u64) as u8;
            let k = 1 + (rng.next_u64() % n as u64) as u8;
            let slot = (rng.next_u64() % (p as u64 + 1)) as u8;
            c = c.mul(&Poly::var(Sym::Gamma(slot, JetIdx::new(i, i, k, &[]))));
        }
        f.insert(w, c);
    }
    f
}

fn section_vey(_seed: u64) -> Section {
    let mut lines = Vec::new();
    let mut pass = true;
    let abs1 = enumerate_vey(1, false);
    let ok1 = abs1.len() == 1 && abs1[0].i_set == vec![1] && abs1[0].j_set == vec![1];
    check(&mut lines, &mut pass, "lowest absolute family", ok1);
    let ok2 = enumerate_vey(2, false).len() == 5;
    check(&mut lines, &mut pass, "five absolute pairs in dimension two", ok2);
    let rel = enumerate_vey(1, true);
    let ok3 = rel.len() == 2 && rel[0].i_set.is_empty();
    check(&mut lines, &mut pass, "relative family includes the empty pair", ok3);
    Section { name: "vey", pass, lines }
}

fn section_bott(seed: u64) -> Section {
    let mut lines = Vec::new();
    let mut pass = true;
    // closedness of the lowest cocycles
    let mut closed = true;
    for pair in enumerate_vey(1, false).iter().chain(enumerate_vey(1, true).iter()) {
        let c = build_bott_cocycle(1, pair).unwrap();
        closed &= verify_cocycle(&c, &pair.id(), 8, seed, 4).pass;
    }
    check(&mut lines, &mut pass, "dimension-one cocycles closed (8 trials)", closed);
    let light = crate::vey::VeyPair { i_set: vec![1], j_set: vec![2], relative: false };
    let c2 = build_bott_cocycle(2, &light).unwrap();
    let ok = verify_cocycle(&c2, &light.id(), 4, seed, 4).pass;
    check(&mut lines, &mut pass, "dimension-two sample cocycle closed (4 trials)", ok);
    // mutation detection
    let pair = &enumerate_vey(1, false)[0];
    let mut bad = build_bott_cocycle(1, pair).unwrap();
    let f = bad.comps.get_mut(&1).unwrap();
    *f = f.add(&Form::from_coeff(crate::poly::Poly::one()));
    let detected = !verify_cocycle(&bad, "mutated", 8, seed, 4).pass;
    check(&mut lines, &mut pass, "mutated cocycle rejected", detected);
    Section { name: "bott", pass, lines }
}

fn section_theta(seed: u64) -> Section {
    let mut rng = Rng::seeded(seed);
    let mut lines = Vec::new();
    let mut pass = true;
    let ctx1 = JetContext::new(1, 5);
    let pair = &enumerate_vey(1, false)[0];
    let bott = build_bott_cocycle(1, pair).unwrap();
    let kappa = build_ce_cocycle(1, pair, &ctx1).unwrap();
    let back = theta_map(&kappa, &ctx1);
    let mut ok = true;
    for _ in 0..8 {
        let maps: Vec<Map> = (0..2).map(|_| Map::random_njet(1, 5, 3, &mut rng)).collect();
        let (x, y) = random_point(1, &mut rng);
        let a = eval_component(&bott.comps[&1], &maps, &x, &y, 0);
        let b = eval_component(&back.comps[&1], &maps, &x, &y, 0);
        ok &= a == b;
    }
    check(&mut lines, &mut pass, "transfer reproduces the group cocycle (8 samples)", ok);
    let audit = two_jet_audit(&kappa, &ctx1);
    check(&mut lines, &mut pass, "second-order jet economy", audit.pass);
    Section { name: "theta", pass, lines }
}

fn section_ce(seed: u64) -> Section {
    let mut lines = Vec::new();
    let mut pass = true;
    let n = 1u8;
    let g = GStructure::new(n);
    let ctx = JetContext::new(n, 5);
    let pair = &enumerate_vey(1, false)[0];
    let kappa = build_ce_cocycle(n, pair, &ctx).unwrap();
    let dk = ce_coboundary(&kappa, &g, &ctx);
    let ok = is_zero_by_evaluation(&dk, n, &ctx);
    check(&mut lines, &mut pass, "mixed coboundary annihilates the cocycle", ok);
    let _ = seed;
    Section { name: "ce", pass, lines }
}

fn section_hopf(seed: u64) -> Section {
    use crate::hopf::*;
    let mut lines = Vec::new();
    let mut pass = true;
    let g = GStructure::new(1);
    // involution and convolution on a small family
    let elems = vec![
        HopfElem::gen(Gen::X(1)),
        HopfElem::gen(Gen::Y(1, 1)),
        HopfElem::gen(Gen::d(1, 1, 1, &[])),
        mul(&HopfElem::gen(Gen::X(1)), &HopfElem::gen(Gen::Y(1, 1)), &g),
    ];
    let mut invol = true;
    let mut conv = true;
    for h in &elems {
        invol &= twisted_antipode(&twisted_antipode(h, &g), &g) == *h;
        let mut acc = HopfElem::zero();
        for (w, c) in &h.terms {
            for ((a, b), cc) in coproduct(&HopfElem::from_word(w.clone(), Scalar::one()), &g) {
                let s = twisted_antipode(&HopfElem::from_word(a, Scalar::one()), &g);
                acc = acc.add(&mul(&s, &HopfElem::from_word(b, Scalar::one()), &g).scale(&c.mul(&cc)));
            }
        }
        conv &= acc == HopfElem::from_word(vec![], character_delta(h, &g));
    }
    check(&mut lines, &mut pass, "twisted antipode involution", invol);
    check(&mut lines, &mut pass, "convolution identity", conv);
    let t = HopfTensor::from_legs(vec![vec![Gen::d(1, 1, 1, &[])]]);
    check(
        &mut lines,
        &mut pass,
        "lowest multiplication operator is a cyclic cocycle",
        b_boundary(&t, &g).is_zero() && b_big(&t, &g).is_zero(),
    );
    let t2 = HopfTensor::from_legs(vec![vec![Gen::X(1)], vec![Gen::Y(1, 1)]]);
    let mut cyc = tau(&t2, &g);
    cyc = tau(&cyc, &g);
    cyc = tau(&cyc, &g);
    check(&mut lines, &mut pass, "cyclicity in degree two", cyc == t2);
    let _ = seed;
    Section { name: "hopf", pass, lines }
}

/// Runs all (or one) section and renders the deterministic report.
pub fn run(seed: u64, section: Option<&str>) -> (bool, String) {
    let all: Vec<(&str, fn(u64) -> Section)> = vec![
        ("jet", section_jet),
        ("gamma", section_gamma),
        ("bianchi", section_bianchi),
        ("simplicial", section_simplicial),
        ("transgression", section_transgression),
        ("dupont", section_dupont),
        ("vey", section_vey),
        ("bott", section_bott),
        ("theta", section_theta),
        ("ce", section_ce),
        ("hopf", section_hopf),
    ];
    let mut out = String::new();
    let mut pass = true;
    out.push_str(&format!("selftest seed={seed}\n"));
    let mut matched = false;
    for (name, f) in all {
        if let Some(s) = section {
            if s != name {
                continue;
            }
        }
        matched = true;
        let sec = f(seed);
        out.push_str(&format!(
            "[{}] {}\n",
            if sec.pass { "PASS" } else { "FAIL" },
            sec.name
        ));
        for l in &sec.lines {
            out.push_str(l);
            out.push('\n');
        }
        pass &= sec.pass;
    }
    if !matched {
        out.push_str("no such section\n");
        pass = false;
    }
    out.push_str(&format!("overall: {}\n", if pass { "PASS" } else { "FAIL" }));
    (pass, out)
}

pub fn section_names() -> Vec<&'static str> {
    vec![
        "jet",
        "gamma",
        "bianchi",
        "simplicial",
        "transgression",
        "dupont",
        "vey",
        "bott",
        "theta",
        "ce",
        "hopf",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let (pass1, report1) = run(7, None);
        assert!(pass1, "selftest failed:\n{report1}");
        let (_, report2) = run(7, None);
        assert_eq!(report1, report2, "report not byte-identical");
    }

    #[test]
    fn section_filter_works() {
        let (pass, report) = run(7, Some("bianchi"));
        assert!(pass);
        assert!(report.contains("[PASS] bianchi"));
        assert!(!report.contains("[PASS] hopf"));
        let (bad, _) = run(7, Some("nonexistent"));
        assert!(!bad);
    }
}
