//! Transfer-map chain property: compares theta(D_CE c) against
//! D_Bott(theta c) under exact evaluation; pins the frozen sign conventions.

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use crate::bott::{eval_component, total_coboundary, BottCochain};
    use crate::ce::{ce_b, ce_del, theta_map, CECochain, CEFactor, CETerm, GStructure};
    use crate::form::{Form, Letter, Word};
    use crate::jet::{JetContext, Map};
    use crate::poly::Poly;
    use crate::rng::Rng;
    use crate::scalar::Scalar;
    use crate::sym::{JetIdx, Sym};

    fn eval_cochain(
        c: &BottCochain,
        maps: &[Map],
        x: &[Scalar],
        y: &crate::matrix::Mat<Scalar>,
    ) -> Option<BTreeMap<usize, Form>> {
        let max_ord = c.max_jet_depth();
        let mut out = BTreeMap::new();
        for (&p, f) in &c.comps {
            out.insert(p, eval_component(f, &maps[..=p], x, y, max_ord)?);
        }
        Some(out)
    }

    #[test]
    fn transfer_is_chain_map_for_frozen_signs() {
        let n = 2u8;
        let g = GStructure::new(n);
        let ctx = JetContext::new(n, 6);
        let mut rng = Rng::seeded(67);

        // corpus: single-term cochains covering wedge degrees 0..=2 and
        // several word shapes
        let mut corpus = Vec::new();
        let eta_a = Poly::var(Sym::Eta(JetIdx::new(1, 1, 2, &[])));
        let eta_b = Poly::var(Sym::Eta(JetIdx::new(2, 1, 1, &[])));
        let factor = |e: &Poly| CEFactor { alpha: ctx.eta_poly_to_alpha(e), eta: Some(e.clone()) };
        for alpha in [
            Word::empty(),
            Word::single(Letter::Th(1)),
            Word::single(Letter::Om(1, 2)),
            Word(vec![Letter::Th(1), Letter::Om(2, 1)]),
        ] {
            for factors in [
                vec![factor(&eta_a)],
                vec![CEFactor::one(), factor(&eta_a)],
                vec![CEFactor::one(), factor(&eta_a), factor(&eta_b)],
            ] {
                let mut c = CECochain::zero(n);
                c.push(CETerm { coeff: Poly::one(), alpha: alpha.clone(), factors });
                corpus.push(c);
            }
        }

        for c in &corpus {
            // D_CE with the frozen convention: b + sign(q) del
            let dce = {
                let mut out = ce_b(c);
                let del = ce_del(c, &g, &ctx);
                for t in del.terms {
                    let q = t.factors.len() - 1;
                    let mut t = t;
                    if crate::ce::ce_total_sign(q) < 0 {
                        t.coeff = t.coeff.neg();
                    }
                    out.push(t);
                }
                out
            };
            let lhs = theta_map(&dce, &ctx);
            let rhs = total_coboundary(&theta_map(c, &ctx));

            let mut checked = 0;
            while checked < 6 {
                let maps: Vec<Map> = (0..4).map(|_| Map::random_njet(n, 6, 3, &mut rng)).collect();
                let (x, y) = crate::bott::random_point(n as usize, &mut rng);
                let (Some(le), Some(re)) =
                    (eval_cochain(&lhs, &maps, &x, &y), eval_cochain(&rhs, &maps, &x, &y))
                else {
                    continue;
                };
                let degrees: std::collections::BTreeSet<usize> =
                    le.keys().chain(re.keys()).copied().collect();
                for p in degrees {
                    let a = le.get(&p).cloned().unwrap_or_else(Form::zero);
                    let b = re.get(&p).cloned().unwrap_or_else(Form::zero);
                    assert_eq!(a, b, "chain map fails at group degree {p}");
                }
                checked += 1;
            }
        }
    }
}
