//! Browser demo bindings: enumerate the characteristic families, assemble a
//! cocycle in either model with a rendered formula, and run the exact
//! verification — all in the page, no server.

use wasm_bindgen::prelude::*;

use hopfcw::bott::verify_cocycle;
use hopfcw::ce::{ce_coboundary, is_zero_by_evaluation_seeded, two_jet_audit, GStructure};
use hopfcw::io;
use hopfcw::jet::JetContext;
use hopfcw::latex;
use hopfcw::vey::{build_bott_cocycle, build_ce_cocycle, enumerate_vey, VeyPair};
use serde_json::json;

fn parse_indices(s: &str) -> Result<Vec<u8>, String> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|p| p.trim().parse::<u8>().map_err(|e| format!("bad index {p}: {e}")))
        .collect()
}

fn err_json(msg: &str) -> String {
    json!({"error": msg}).to_string()
}

/// Admissible index pairs for the given dimension, as JSON.
#[wasm_bindgen]
pub fn enumerate(n: u8, relative: bool) -> String {
    if n == 0 || n > 3 {
        return err_json("dimension must be 1, 2 or 3");
    }
    let pairs: Vec<_> = enumerate_vey(n, relative)
        .into_iter()
        .map(|p| {
            json!({
                "I": p.i_set,
                "J": p.j_set,
                "degree": p.total_degree(),
            })
        })
        .collect();
    json!({"version": 1, "n": n, "relative": relative, "pairs": pairs}).to_string()
}

/// Builds the cocycle of one pair and returns its JSON together with a
/// rendering in classical notation.
#[wasm_bindgen]
pub fn build_cocycle(n: u8, relative: bool, i_csv: &str, j_csv: &str, model: &str) -> String {
    if n == 0 || n > 2 {
        return err_json("dimension must be 1 or 2 for interactive construction");
    }
    let i_set = match parse_indices(i_csv) {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    let j_set = match parse_indices(j_csv) {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    let pair = VeyPair { i_set, j_set, relative };
    let bott = match build_bott_cocycle(n, &pair) {
        Ok(c) => c,
        Err(e) => return err_json(&format!("{e}")),
    };
    let (payload, tex) = match model {
        "ce" => {
            let ctx = JetContext::new(n, 5);
            match build_ce_cocycle(n, &pair, &ctx) {
                Ok(k) => (io::ce_to_json(&k), latex::ce_tex(&k)),
                Err(e) => return err_json(&format!("{e}")),
            }
        }
        _ => (io::bott_to_json(&bott), latex::bott_tex(&bott)),
    };
    io::cocycle_file(
        n,
        relative,
        &pair.i_set,
        &pair.j_set,
        if model == "ce" { "ce" } else { "bott" },
        pair.total_degree(),
        payload,
        Some(tex),
    )
    .to_string()
}

/// Rebuilds the pair's cocycle and verifies it with the requested trial
/// budget; returns the certificate JSON.
#[wasm_bindgen]
pub fn verify(
    n: u8,
    relative: bool,
    i_csv: &str,
    j_csv: &str,
    model: &str,
    trials: u32,
    seed: u32,
) -> String {
    if n == 0 || n > 2 {
        return err_json("dimension must be 1 or 2 for interactive verification");
    }
    let i_set = match parse_indices(i_csv) {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    let j_set = match parse_indices(j_csv) {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    let pair = VeyPair { i_set, j_set, relative };
    if model == "ce" {
        let ctx = JetContext::new(n, 5);
        let g = GStructure::new(n);
        let kappa = match build_ce_cocycle(n, &pair, &ctx) {
            Ok(k) => k,
            Err(e) => return err_json(&format!("{e}")),
        };
        let dk = ce_coboundary(&kappa, &g, &ctx);
        let closed = is_zero_by_evaluation_seeded(&dk, n, &ctx, trials, seed as u64);
        let audit = two_jet_audit(&kappa, &ctx);
        return json!({
            "version": 1,
            "cocycle_id": pair.id(),
            "trials": trials,
            "seed": seed,
            "status": if closed && audit.pass { "PASS" } else { "FAIL" },
            "two_jet_audit": {"pass": audit.pass, "offenders": audit.offenders},
        })
        .to_string();
    }
    let c = match build_bott_cocycle(n, &pair) {
        Ok(c) => c,
        Err(e) => return err_json(&format!("{e}")),
    };
    let cert = verify_cocycle(&c, &pair.id(), trials, seed as u64, 4);
    serde_json::to_string(&io::certificate_to_json(&cert)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_work_natively() {
        let e = enumerate(2, false);
        assert!(e.contains("\"pairs\""));
        let b = build_cocycle(1, false, "1", "1", "bott");
        assert!(b.contains("latex"));
        let v = verify(1, false, "1", "1", "bott", 5, 7);
        assert!(v.contains("PASS"));
        let bad = build_cocycle(1, false, "2", "9", "bott");
        assert!(bad.contains("error"));
    }
}
