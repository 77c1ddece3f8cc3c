//! JSON serialization of every external surface: scalars, polynomials,
//! forms, jets, cochains in both models, tensors, and verification
//! certificates. All maps are ordered, so output bytes are deterministic.

use std::collections::BTreeMap;

use serde_json::{json, Map as JMap, Value};

use crate::bott::{BottCochain, Certificate};
use crate::ce::{CECochain, CEFactor, CETerm};
use crate::form::{Form, Letter, Word};
use crate::hopf::{Gen, HopfTensor};
use crate::jet::{JPoly, Map, TruncatedMap};
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::sym::Sym;

#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "schema error: {}", self.0)
    }
}

impl std::error::Error for SchemaError {}

type R<T> = Result<T, SchemaError>;

fn err<T>(msg: impl Into<String>) -> R<T> {
    Err(SchemaError(msg.into()))
}

pub fn poly_to_json(p: &Poly) -> Value {
    let vars: Vec<Value> = p.vars().iter().map(|v| json!(v.name())).collect();
    let terms: Vec<Value> = p
        .terms_with_lambda()
        .into_iter()
        .map(|(e, c)| json!({"e": e, "c": c.to_string()}))
        .collect();
    json!({"vars": vars, "terms": terms})
}

pub fn poly_from_json(v: &Value) -> R<Poly> {
    let vars: Vec<Sym> = v["vars"]
        .as_array()
        .ok_or(SchemaError("vars".into()))?
        .iter()
        .map(|s| {
            Sym::parse(s.as_str().unwrap_or_default())
                .ok_or_else(|| SchemaError(format!("bad symbol {s}")))
        })
        .collect::<R<_>>()?;
    let mut terms = Vec::new();
    for t in v["terms"].as_array().ok_or(SchemaError("terms".into()))? {
        let e: Vec<u16> = t["e"]
            .as_array()
            .ok_or(SchemaError("e".into()))?
            .iter()
            .map(|x| x.as_u64().unwrap_or(0) as u16)
            .collect();
        let c: Scalar = t["c"]
            .as_str()
            .ok_or(SchemaError("c".into()))?
            .parse()
            .map_err(|e| SchemaError(format!("{e}")))?;
        terms.push((e, c));
    }
    Ok(Poly::from_terms(vars, terms))
}

pub fn form_to_json(f: &Form) -> Value {
    let terms: Vec<Value> = f
        .terms
        .iter()
        .map(|(w, c)| {
            let word: Vec<Value> = w.0.iter().map(|l| json!(l.name())).collect();
            json!({"word": word, "coeff": poly_to_json(c)})
        })
        .collect();
    json!({"terms": terms})
}

pub fn form_from_json(v: &Value) -> R<Form> {
    let mut out = Form::zero();
    for t in v["terms"].as_array().ok_or(SchemaError("terms".into()))? {
        let letters: Vec<Letter> = t["word"]
            .as_array()
            .ok_or(SchemaError("word".into()))?
            .iter()
            .map(|s| {
                Letter::parse(s.as_str().unwrap_or_default())
                    .ok_or_else(|| SchemaError(format!("bad letter {s}")))
            })
            .collect::<R<_>>()?;
        out.insert(Word(letters), poly_from_json(&t["coeff"])?);
    }
    Ok(out)
}

/// Level-`p` simplicial form serialized with the simplex data split out:
/// `dt_word` and a `t_poly` list of (t-exponent, jet-coefficient) pairs.
pub fn simplicial_form_to_json(p: usize, f: &Form) -> Value {
    let mut terms = Vec::new();
    for (w, c) in &f.terms {
        let dt_word: Vec<Value> = w
            .0
            .iter()
            .filter(|l| matches!(l, Letter::Dt(_)))
            .map(|l| json!(l.name()))
            .collect();
        let word: Vec<Value> = w
            .0
            .iter()
            .filter(|l| !matches!(l, Letter::Dt(_)))
            .map(|l| json!(l.name()))
            .collect();
        // group the coefficient by t-monomials
        let vars = c.vars().to_vec();
        let t_pos: Vec<Option<u16>> = vars
            .iter()
            .map(|v| match v {
                Sym::T(r) => Some(*r),
                _ => None,
            })
            .collect();
        let mut groups: BTreeMap<Vec<u16>, Vec<(Vec<u16>, Scalar)>> = BTreeMap::new();
        for (e, s) in c.terms_with_lambda() {
            let mut t_exp = vec![0u16; p];
            let mut rest = vec![0u16; vars.len()];
            for (i, &x) in e.iter().enumerate() {
                match t_pos[i] {
                    Some(r) => t_exp[r as usize - 1] = x,
                    None => rest[i] = x,
                }
            }
            groups.entry(t_exp).or_default().push((rest, s));
        }
        let t_poly: Vec<Value> = groups
            .into_iter()
            .map(|(te, ts)| {
                let sub = Poly::from_terms(vars.clone(), ts);
                json!({"e": te, "coeff": poly_to_json(&sub)})
            })
            .collect();
        terms.push(json!({"word": word, "dt_word": dt_word, "t_poly": t_poly}));
    }
    json!({"level": p, "terms": terms})
}

pub fn map_to_json(m: &Map) -> Value {
    let mut coeffs = Vec::new();
    for (i, comp) in m.comps.iter().enumerate() {
        for (beta, c) in &comp.terms {
            coeffs.push(json!({
                "i": i + 1,
                "beta": beta,
                "scalar": c.to_string(),
            }));
        }
    }
    json!({"n": m.n, "K": m.k, "coeffs": coeffs})
}

pub fn map_from_json(v: &Value) -> R<Map> {
    let n = v["n"].as_u64().ok_or(SchemaError("n".into()))? as u8;
    let k = v["K"].as_u64().ok_or(SchemaError("K".into()))? as u8;
    let mut comps = vec![JPoly::zero(n as usize); n as usize];
    for c in v["coeffs"].as_array().ok_or(SchemaError("coeffs".into()))? {
        let i = c["i"].as_u64().ok_or(SchemaError("i".into()))? as usize;
        let beta: Vec<u8> = c["beta"]
            .as_array()
            .ok_or(SchemaError("beta".into()))?
            .iter()
            .map(|x| x.as_u64().unwrap_or(0) as u8)
            .collect();
        let s: Scalar = c["scalar"]
            .as_str()
            .ok_or(SchemaError("scalar".into()))?
            .parse()
            .map_err(|e| SchemaError(format!("{e}")))?;
        if i == 0 || i > n as usize || beta.len() != n as usize {
            return err("coefficient indices out of range");
        }
        let mono = JPoly { arity: n as usize, terms: BTreeMap::from([(beta, s)]) };
        comps[i - 1] = comps[i - 1].add(&mono);
    }
    Ok(TruncatedMap { n, k, comps })
}

pub fn bott_to_json(c: &BottCochain) -> Value {
    let comps: Vec<Value> = c
        .comps
        .iter()
        .map(|(p, f)| json!({"p": p, "form": form_to_json(f)}))
        .collect();
    json!({"n": c.n, "components": comps})
}

pub fn bott_from_json(v: &Value) -> R<BottCochain> {
    let n = v["n"].as_u64().ok_or(SchemaError("n".into()))? as u8;
    let mut out = BottCochain::zero(n);
    for comp in v["components"].as_array().ok_or(SchemaError("components".into()))? {
        let p = comp["p"].as_u64().ok_or(SchemaError("p".into()))? as usize;
        out.insert(p, form_from_json(&comp["form"])?);
    }
    Ok(out)
}

fn dual_label(l: &Letter) -> String {
    match l {
        Letter::Th(k) => format!("X{k}"),
        Letter::Om(i, j) => format!("Y{i}{j}"),
        Letter::Os(i, j) => format!("YS{i}{j}"),
        Letter::Dt(_) => panic!("simplex letter in a dual-basis word"),
    }
}

fn dual_parse(s: &str) -> Option<Letter> {
    if let Some(r) = s.strip_prefix("YS") {
        let d: Vec<u8> = r.chars().map(|c| c.to_digit(10).unwrap() as u8).collect();
        return Some(Letter::Os(d[0], d[1]));
    }
    if let Some(r) = s.strip_prefix('Y') {
        let d: Vec<u8> = r.chars().filter_map(|c| c.to_digit(10).map(|x| x as u8)).collect();
        if d.len() == 2 {
            return Some(Letter::Om(d[0], d[1]));
        }
        return None;
    }
    if let Some(r) = s.strip_prefix('X') {
        return Some(Letter::Th(r.parse().ok()?));
    }
    None
}

pub fn ce_to_json(c: &CECochain) -> Value {
    let terms: Vec<Value> = c
        .terms
        .iter()
        .map(|t| {
            let alpha: Vec<Value> = t.alpha.0.iter().map(|l| json!(dual_label(l))).collect();
            // fold the scalar coefficient into the first wedge factor
            let mut factors = t.factors.clone();
            if let Some(first) = factors.first_mut() {
                first.alpha = first.alpha.mul(&t.coeff);
                if let Some(e) = &mut first.eta {
                    *e = e.mul(&t.coeff);
                }
            }
            let f_wedge: Vec<Value> = factors.iter().map(|f| poly_to_json(&f.alpha)).collect();
            let eta_wedge: Vec<Value> = factors
                .iter()
                .map(|f| f.eta.as_ref().map(poly_to_json).unwrap_or(Value::Null))
                .collect();
            json!({"alpha_word": alpha, "f_wedge": f_wedge, "eta_wedge": eta_wedge})
        })
        .collect();
    json!({"n": c.n, "terms": terms})
}

pub fn ce_from_json(v: &Value) -> R<CECochain> {
    let n = v["n"].as_u64().ok_or(SchemaError("n".into()))? as u8;
    let mut out = CECochain::zero(n);
    for t in v["terms"].as_array().ok_or(SchemaError("terms".into()))? {
        let letters: Vec<Letter> = t["alpha_word"]
            .as_array()
            .ok_or(SchemaError("alpha_word".into()))?
            .iter()
            .map(|s| {
                dual_parse(s.as_str().unwrap_or_default())
                    .ok_or_else(|| SchemaError(format!("bad dual label {s}")))
            })
            .collect::<R<_>>()?;
        let f_wedge = t["f_wedge"].as_array().ok_or(SchemaError("f_wedge".into()))?;
        let eta_wedge = t["eta_wedge"].as_array();
        let mut factors = Vec::new();
        for (i, f) in f_wedge.iter().enumerate() {
            let alpha = poly_from_json(f)?;
            let eta = match eta_wedge.and_then(|e| e.get(i)) {
                Some(Value::Null) | None => None,
                Some(e) => Some(poly_from_json(e)?),
            };
            factors.push(CEFactor { alpha, eta });
        }
        out.push(CETerm { coeff: Poly::one(), alpha: Word(letters), factors });
    }
    Ok(out)
}

fn gen_to_json(g: &Gen) -> Value {
    match g {
        Gen::D(idx) => json!(["D", idx.i, idx.j, idx.k, idx.ell]),
        Gen::Y(i, j) => json!(["Y", i, j]),
        Gen::X(k) => json!(["X", k]),
    }
}

fn gen_from_json(v: &Value) -> R<Gen> {
    let arr = v.as_array().ok_or(SchemaError("generator".into()))?;
    let tag = arr[0].as_str().ok_or(SchemaError("generator tag".into()))?;
    let num = |i: usize| -> R<u8> {
        arr.get(i)
            .and_then(|x| x.as_u64())
            .map(|x| x as u8)
            .ok_or(SchemaError("generator index".into()))
    };
    match tag {
        "X" => Ok(Gen::X(num(1)?)),
        "Y" => Ok(Gen::Y(num(1)?, num(2)?)),
        "D" => {
            let ell: Vec<u8> = arr
                .get(4)
                .and_then(|x| x.as_array())
                .map(|a| a.iter().map(|x| x.as_u64().unwrap_or(0) as u8).collect())
                .unwrap_or_default();
            Ok(Gen::d(num(1)?, num(2)?, num(3)?, &ell))
        }
        _ => err(format!("unknown generator {tag}")),
    }
}

pub fn tensor_to_json(t: &HopfTensor) -> Value {
    let terms: Vec<Value> = t
        .terms
        .iter()
        .map(|(legs, c)| {
            let word: Vec<Value> = legs
                .iter()
                .map(|leg| Value::Array(leg.iter().map(gen_to_json).collect()))
                .collect();
            json!({"coeff": c.to_string(), "word": word})
        })
        .collect();
    json!({"q": t.q, "terms": terms})
}

pub fn tensor_from_json(v: &Value) -> R<HopfTensor> {
    let q = v["q"].as_u64().ok_or(SchemaError("q".into()))? as usize;
    let mut out = HopfTensor::zero(q);
    for t in v["terms"].as_array().ok_or(SchemaError("terms".into()))? {
        let coeff: Scalar = t["coeff"]
            .as_str()
            .ok_or(SchemaError("coeff".into()))?
            .parse()
            .map_err(|e| SchemaError(format!("{e}")))?;
        let legs: Vec<Vec<Gen>> = t["word"]
            .as_array()
            .ok_or(SchemaError("word".into()))?
            .iter()
            .map(|leg| {
                leg.as_array()
                    .ok_or(SchemaError("leg".into()))?
                    .iter()
                    .map(gen_from_json)
                    .collect::<R<Vec<Gen>>>()
            })
            .collect::<R<_>>()?;
        out.insert(legs, coeff);
    }
    Ok(out)
}

pub fn scalar_matrix_to_json(m: &Mat<Scalar>) -> Value {
    let rows: Vec<Value> = (0..m.n)
        .map(|i| {
            Value::Array((0..m.n).map(|j| json!(m.at(i, j).to_string())).collect())
        })
        .collect();
    Value::Array(rows)
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    let failures: Vec<Value> = c
        .failures
        .iter()
        .map(|f| {
            json!({
                "trial": f.trial,
                "group_degree": f.group_degree,
                "slots": f.slots.iter().map(map_to_json).collect::<Vec<_>>(),
                "point": {
                    "x": f.x.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "y": scalar_matrix_to_json(&f.y),
                },
                "nonzero_term": f.nonzero_term,
            })
        })
        .collect();
    json!({
        "version": 1,
        "cocycle_id": c.cocycle_id,
        "trials": c.trials,
        "seed": c.seed,
        "jet_order": c.jet_order,
        "status": if c.pass { "PASS" } else { "FAIL" },
        "failures": failures,
    })
}

/// Top-level cocycle file for one pair in one model.
#[allow(clippy::too_many_arguments)]
pub fn cocycle_file(
    n: u8,
    relative: bool,
    i_set: &[u8],
    j_set: &[u8],
    model: &str,
    degree: usize,
    payload: Value,
    latex: Option<String>,
) -> Value {
    let mut m = JMap::new();
    m.insert("version".into(), json!(1));
    m.insert("n".into(), json!(n));
    m.insert("relative".into(), json!(relative));
    m.insert("I".into(), json!(i_set));
    m.insert("J".into(), json!(j_set));
    m.insert("model".into(), json!(model));
    m.insert("degree".into(), json!(degree));
    if degree == 0 {
        m.insert(
            "notes".into(),
            json!("degree-zero class from the empty relative pair"),
        );
    }
    m.insert("components".into(), payload);
    if let Some(l) = latex {
        m.insert("latex".into(), json!(l));
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::vey::{build_bott_cocycle, build_ce_cocycle, enumerate_vey};

    #[test]
    fn poly_round_trip() {
        let mut rng = Rng::seeded(70);
        for _ in 0..20 {
            let mut p = Poly::zero();
            for _ in 0..4 {
                let c = Scalar::from_frac(rng.small(), rng.small_nonzero())
                    .mul(&Scalar::lambda().pow(rng.int_range(0, 2) as u32));
                let t = Poly::constant(c)
                    .mul(&Poly::var(Sym::X(1)).pow(rng.int_range(0, 3) as u32))
                    .mul(&Poly::var(Sym::T(2)).pow(rng.int_range(0, 2) as u32));
                p = p.add(&t);
            }
            let v = poly_to_json(&p);
            assert_eq!(poly_from_json(&v).unwrap(), p);
            // byte-determinism
            assert_eq!(
                serde_json::to_string(&v).unwrap(),
                serde_json::to_string(&poly_to_json(&poly_from_json(&v).unwrap())).unwrap()
            );
        }
    }

    #[test]
    fn map_round_trip() {
        let mut rng = Rng::seeded(71);
        for _ in 0..10 {
            let m = Map::random(2, 4, 3, &mut rng);
            let v = map_to_json(&m);
            assert_eq!(map_from_json(&v).unwrap(), m);
        }
    }

    #[test]
    fn bott_cochain_round_trip() {
        let pair = &enumerate_vey(1, false)[0];
        let c = build_bott_cocycle(1, pair).unwrap();
        let v = bott_to_json(&c);
        assert_eq!(bott_from_json(&v).unwrap(), c);
    }

    #[test]
    fn ce_cochain_round_trip_evaluates_identically() {
        let ctx = crate::jet::JetContext::new(1, 5);
        let pair = &enumerate_vey(1, false)[0];
        let kappa = build_ce_cocycle(1, pair, &ctx).unwrap();
        let v = ce_to_json(&kappa);
        let back = ce_from_json(&v).unwrap();
        // identical evaluation on sample tuples
        let mut rng = Rng::seeded(72);
        for _ in 0..5 {
            let psis: Vec<Map> = (0..2).map(|_| Map::random_njet(1, 5, 3, &mut rng)).collect();
            assert_eq!(kappa.eval_at(&psis), back.eval_at(&psis));
        }
    }

    #[test]
    fn simplicial_form_schema_splits_t_data() {
        let w = crate::simplicial::simplicial_connection(1, 1);
        let v = simplicial_form_to_json(1, w.at(0, 0));
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("t_poly"));
        assert!(s.contains("dt_word"));
    }

    #[test]
    fn tensor_round_trip() {
        let t = HopfTensor::from_legs(vec![
            vec![Gen::d(1, 1, 1, &[1])],
            vec![Gen::Y(1, 1), Gen::X(1)],
        ]);
        let v = tensor_to_json(&t);
        assert_eq!(tensor_from_json(&v).unwrap(), t);
    }
}
