//! LaTeX rendering of cocycles and tensors in the classical notation, for
//! human cross-checking.

use crate::bott::BottCochain;
use crate::ce::CECochain;
use crate::form::{Form, Letter};
use crate::hopf::{Gen, HopfTensor};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::sym::Sym;

fn scalar_tex(c: &Scalar) -> String {
    let q = c.rational_part();
    let base = if q.denom() == &num_bigint::BigInt::from(1) {
        format!("{}", q.numer())
    } else {
        let (num, sign) = if q.is_negative() {
            (q.neg(), "-")
        } else {
            (q.clone(), "")
        };
        format!("{sign}\\tfrac{{{}}}{{{}}}", num.numer(), num.denom())
    };
    match c.lam_exp() {
        0 => base,
        1 => format!("{base}\\,(2\\pi i)^{{-1}}"),
        k => format!("{base}\\,(2\\pi i)^{{-{k}}}"),
    }
}

fn sym_tex(s: &Sym) -> String {
    match s {
        Sym::X(k) => format!("x^{{{k}}}"),
        Sym::Y(i, j) => format!("y^{{{i}}}_{{{j}}}"),
        Sym::T(r) => format!("t_{{{r}}}"),
        Sym::S => "s".into(),
        Sym::U => "u".into(),
        Sym::Gamma(slot, g) => {
            let ell: String = g.ell.iter().map(|l| l.to_string()).collect();
            format!(
                "\\gamma^{{{}}}_{{{}{}{}}}(\\phi_{{{}}})",
                g.i, g.j, g.k, ell, slot
            )
        }
        Sym::Eta(g) => {
            let ell: String = g.ell.iter().map(|l| l.to_string()).collect();
            format!("\\eta^{{{}}}_{{{}{}{}}}", g.i, g.j, g.k, ell)
        }
        Sym::Alpha(a) => {
            let lower: String = a.lower.iter().map(|l| l.to_string()).collect();
            format!("\\alpha^{{{}}}_{{{}}}", a.i, lower)
        }
    }
}

pub fn poly_tex(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let vars = p.vars().to_vec();
    let mut parts = Vec::new();
    for (e, c) in p.terms_with_lambda() {
        let mut s = scalar_tex(&c);
        for (i, &exp) in e.iter().enumerate() {
            if exp == 1 {
                s.push_str(&format!("\\,{}", sym_tex(&vars[i])));
            } else if exp > 1 {
                s.push_str(&format!("\\,{}^{{{exp}}}", sym_tex(&vars[i])));
            }
        }
        parts.push(s);
    }
    parts.join(" + ")
}

fn letter_tex(l: &Letter) -> String {
    match l {
        Letter::Dt(r) => format!("dt_{{{r}}}"),
        Letter::Th(k) => format!("\\theta^{{{k}}}"),
        Letter::Om(i, j) => format!("\\omega^{{{i}}}_{{{j}}}"),
        Letter::Os(i, j) => format!("\\omega_{{\\rm s}}{{}}^{{{i}}}_{{{j}}}"),
    }
}

pub fn form_tex(f: &Form) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (w, c) in &f.terms {
        let mut s = format!("\\left({}\\right)", poly_tex(c));
        for l in &w.0 {
            s.push_str(&format!("\\,{}", letter_tex(l)));
        }
        parts.push(s);
    }
    parts.join(" \\;+\\; ")
}

pub fn bott_tex(c: &BottCochain) -> String {
    let mut lines = Vec::new();
    for (p, f) in &c.comps {
        lines.push(format!(
            "C^{{({p})}}(\\phi_0,\\ldots,\\phi_{{{p}}}) = {}",
            form_tex(f)
        ));
    }
    lines.join(" \\\\ ")
}

pub fn ce_tex(c: &CECochain) -> String {
    if c.terms.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for t in &c.terms {
        let coeff = poly_tex(&t.coeff);
        let mut word = String::new();
        for l in &t.alpha.0 {
            if !word.is_empty() {
                word.push_str(" \\wedge ");
            }
            word.push_str(&letter_tex(l));
        }
        if word.is_empty() {
            word = "1".into();
        }
        let wedge: Vec<String> = t
            .factors
            .iter()
            .map(|f| {
                f.eta
                    .as_ref()
                    .map(poly_tex)
                    .unwrap_or_else(|| poly_tex(&f.alpha))
            })
            .collect();
        parts.push(format!(
            "\\left({}\\right) {} \\otimes {}",
            coeff,
            word,
            wedge.join(" \\wedge ")
        ));
    }
    parts.join(" \\;+\\; ")
}

fn gen_tex(g: &Gen) -> String {
    match g {
        Gen::D(idx) => {
            let ell: String = idx.ell.iter().map(|l| l.to_string()).collect();
            format!("\\delta^{{{}}}_{{{}{}{}}}", idx.i, idx.j, idx.k, ell)
        }
        Gen::Y(i, j) => format!("Y_{{{i}}}^{{{j}}}"),
        Gen::X(k) => format!("X_{{{k}}}"),
    }
}

pub fn tensor_tex(t: &HopfTensor) -> String {
    if t.terms.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (legs, c) in &t.terms {
        let legs_tex: Vec<String> = legs
            .iter()
            .map(|leg| {
                if leg.is_empty() {
                    "1".into()
                } else {
                    leg.iter().map(gen_tex).collect::<Vec<_>>().join("\\,")
                }
            })
            .collect();
        parts.push(format!("{}\\; {}", scalar_tex(c), legs_tex.join(" \\otimes ")));
    }
    parts.join(" \\;+\\; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vey::{build_bott_cocycle, enumerate_vey};

    #[test]
    fn renders_the_lowest_cocycle() {
        let pair = &enumerate_vey(1, false)[0];
        let c = build_bott_cocycle(1, pair).unwrap();
        let tex = bott_tex(&c);
        assert!(tex.contains("\\gamma^{1}_{11}"));
        assert!(tex.contains("\\theta^{1}"));
        assert!(tex.contains("(2\\pi i)^{-2}"));
    }

    #[test]
    fn renders_generators() {
        let t = crate::hopf::HopfTensor::from_legs(vec![vec![Gen::d(1, 1, 1, &[])]]);
        assert!(tensor_tex(&t).contains("\\delta^{1}_{11}"));
    }
}
