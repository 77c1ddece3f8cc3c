//! Command-line front end: enumerate index pairs, build and verify
//! characteristic cocycles in both models, inspect the Hopf-algebra
//! structure maps, and run the deterministic self-test.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hopfcw::bott::verify_cocycle;
use hopfcw::ce::{ce_coboundary, is_zero_by_evaluation_seeded, two_jet_audit, GStructure};
use hopfcw::hopf::{coproduct, twisted_antipode, Gen, HopfElem, HopfTensor};
use hopfcw::io;
use hopfcw::jet::JetContext;
use hopfcw::latex;
use hopfcw::vey::{build_bott_cocycle, build_ce_cocycle, enumerate_vey, VeyPair};

#[derive(Parser)]
#[command(
    name = "hopfcw",
    version,
    about = "exact simplicial Chern-Weil cocycles for the diffeomorphism Hopf algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index-pair families of characteristic classes
    Vey {
        #[command(subcommand)]
        sub: VeyCmd,
    },
    /// Characteristic cocycles: construction and verification
    Cocycle {
        #[command(subcommand)]
        sub: CocycleCmd,
    },
    /// Structure maps of the Hopf algebra
    Hopf {
        #[command(subcommand)]
        sub: HopfCmd,
    },
    /// Deterministic identity suite
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// run a single section (see --list)
        #[arg(long)]
        section: Option<String>,
        #[arg(long, default_value_t = false)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum VeyCmd {
    /// List the admissible pairs in deterministic order
    Enumerate {
        #[arg(long)]
        n: u8,
        #[arg(long, default_value_t = false)]
        relative: bool,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    n: u8,
    /// transgressed degrees, comma separated (e.g. --i 1,2)
    #[arg(long, default_value = "")]
    i: String,
    /// invariant-polynomial degrees, comma separated
    #[arg(long, default_value = "")]
    j: String,
    #[arg(long, default_value_t = false)]
    relative: bool,
    /// build every admissible pair instead of one
    #[arg(long, default_value_t = false)]
    all: bool,
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Assemble a cocycle and write it as JSON
    Build {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_parser = ["bott", "ce"], default_value = "bott")]
        model: String,
        /// output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// include a rendering in classical notation
        #[arg(long, default_value_t = false)]
        latex: bool,
        /// jet working order for the transferred model
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
    /// Verify a cocycle file and emit a certificate
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        jet_order: u8,
        /// certificate output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HopfCmd {
    /// Coproduct of a generator
    Coproduct {
        #[arg(long)]
        n: u8,
        /// generator, e.g. X1, Y12, D112 or D112:1 for a derived one
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = false)]
        latex: bool,
    },
    /// Twisted antipode of a generator
    Antipode {
        #[arg(long)]
        n: u8,
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = false)]
        latex: bool,
    },
}

fn parse_indices(s: &str) -> Result<Vec<u8>, String> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|p| p.trim().parse::<u8>().map_err(|e| format!("bad index {p}: {e}")))
        .collect()
}

fn parse_gen(s: &str) -> Result<Gen, String> {
    let s = s.trim();
    let digits = |t: &str| -> Result<Vec<u8>, String> {
        t.chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(format!("bad digit in {s}")))
            .collect()
    };
    if let Some(rest) = s.strip_prefix('X') {
        return Ok(Gen::X(rest.parse().map_err(|e| format!("{e}"))?));
    }
    if let Some(rest) = s.strip_prefix('Y') {
        let d = digits(rest)?;
        if d.len() != 2 {
            return Err(format!("Y takes two indices, got {s}"));
        }
        return Ok(Gen::Y(d[0], d[1]));
    }
    if let Some(rest) = s.strip_prefix('D') {
        let (head, tail) = match rest.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (rest, None),
        };
        let d = digits(head)?;
        if d.len() != 3 {
            return Err(format!("D takes three base indices, got {s}"));
        }
        let ell = match tail {
            Some(t) => digits(t)?,
            None => vec![],
        };
        return Ok(Gen::d(d[0], d[1], d[2], &ell));
    }
    Err(format!("unknown generator {s}"))
}

/// Write-temp-then-rename so partially written files are never observed.
fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

fn emit(out: &Option<PathBuf>, value: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(p) => atomic_write(p, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn usage_err(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run_build(
    pair_args: &PairArgs,
    model: &str,
    out: &Option<PathBuf>,
    latex_flag: bool,
    order: usize,
) -> ExitCode {
    let n = pair_args.n;
    if n == 0 {
        return usage_err("dimension must be at least 1");
    }
    if n > 2 {
        eprintln!("note: dimension {n} is supported but construction time grows quickly");
    }
    let pairs: Vec<VeyPair> = if pair_args.all {
        enumerate_vey(n, pair_args.relative)
    } else {
        let i_set = match parse_indices(&pair_args.i) {
            Ok(v) => v,
            Err(e) => return usage_err(&e),
        };
        let j_set = match parse_indices(&pair_args.j) {
            Ok(v) => v,
            Err(e) => return usage_err(&e),
        };
        vec![VeyPair { i_set, j_set, relative: pair_args.relative }]
    };
    let ctx = if model == "ce" { Some(JetContext::new(n, order)) } else { None };
    let mut files = Vec::new();
    for pair in &pairs {
        let bott = match build_bott_cocycle(n, pair) {
            Ok(c) => c,
            Err(e) => return usage_err(&format!("{e}")),
        };
        let (payload, tex) = match model {
            "bott" => {
                let tex = latex_flag.then(|| latex::bott_tex(&bott));
                (io::bott_to_json(&bott), tex)
            }
            "ce" => {
                let kappa = match build_ce_cocycle(n, pair, ctx.as_ref().unwrap()) {
                    Ok(k) => k,
                    Err(e) => return usage_err(&format!("{e}")),
                };
                let tex = latex_flag.then(|| latex::ce_tex(&kappa));
                (io::ce_to_json(&kappa), tex)
            }
            _ => return usage_err("model must be bott or ce"),
        };
        files.push(io::cocycle_file(
            n,
            pair.relative,
            &pair.i_set,
            &pair.j_set,
            model,
            pair.total_degree(),
            payload,
            tex,
        ));
    }
    let value = if pair_args.all {
        Value::Array(files)
    } else {
        files.pop().unwrap()
    };
    match emit(out, &value) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => usage_err(&format!("write failed: {e}")),
    }
}

fn run_verify(
    file: &Path,
    trials: u32,
    seed: u64,
    jet_order: u8,
    out: &Option<PathBuf>,
) -> ExitCode {
    if trials == 0 {
        return usage_err("trials must be at least 1");
    }
    if jet_order < 4 {
        return usage_err("jet order must be at least 4");
    }
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return usage_err(&format!("cannot read {}: {e}", file.display())),
    };
    let v: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return usage_err(&format!("malformed JSON: {e}")),
    };
    if v["version"].as_u64() != Some(1) {
        return usage_err("unsupported file version");
    }
    let n = match v["n"].as_u64() {
        Some(n) if n >= 1 => n as u8,
        _ => return usage_err("missing dimension"),
    };
    let id = format!(
        "{}I{}J{}",
        if v["relative"].as_bool().unwrap_or(false) { "rel-" } else { "" },
        v["I"],
        v["J"]
    );
    match v["model"].as_str() {
        Some("bott") => {
            let c = match io::bott_from_json(&v["components"]) {
                Ok(c) => c,
                Err(e) => return usage_err(&format!("{e}")),
            };
            let cert = verify_cocycle(&c, &id, trials, seed, jet_order);
            let pass = cert.pass;
            if emit(out, &io::certificate_to_json(&cert)).is_err() {
                return usage_err("write failed");
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Some("ce") => {
            let kappa = match io::ce_from_json(&v["components"]) {
                Ok(c) => c,
                Err(e) => return usage_err(&format!("{e}")),
            };
            let ctx = JetContext::new(n, 5);
            let g = GStructure::new(n);
            let dk = ce_coboundary(&kappa, &g, &ctx);
            let closed = is_zero_by_evaluation_seeded(&dk, n, &ctx, trials, seed);
            let audit = two_jet_audit(&kappa, &ctx);
            let cert = json!({
                "version": 1,
                "cocycle_id": id,
                "trials": trials,
                "seed": seed,
                "jet_order": jet_order,
                "status": if closed && audit.pass { "PASS" } else { "FAIL" },
                "failures": if closed { json!([]) } else {
                    json!([{"nonzero_term": "mixed coboundary residual"}])
                },
                "two_jet_audit": {"pass": audit.pass, "offenders": audit.offenders},
            });
            if emit(out, &cert).is_err() {
                return usage_err("write failed");
            }
            if closed && audit.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        _ => usage_err("model must be bott or ce"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Vey { sub } => match sub {
            VeyCmd::Enumerate { n, relative } => {
                if n == 0 {
                    return usage_err("dimension must be at least 1");
                }
                let pairs = enumerate_vey(n, relative);
                let list: Vec<Value> = pairs
                    .iter()
                    .map(|p| {
                        json!({
                            "I": p.i_set,
                            "J": p.j_set,
                            "relative": p.relative,
                            "degree": p.total_degree(),
                        })
                    })
                    .collect();
                let v = json!({"version": 1, "n": n, "relative": relative, "pairs": list});
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
                ExitCode::SUCCESS
            }
        },
        Command::Cocycle { sub } => match sub {
            CocycleCmd::Build { pair, model, out, latex, order } => {
                run_build(&pair, &model, &out, latex, order)
            }
            CocycleCmd::Verify { file, trials, seed, jet_order, out } => {
                run_verify(&file, trials, seed, jet_order, &out)
            }
        },
        Command::Hopf { sub } => match sub {
            HopfCmd::Coproduct { n, gen, latex: latex_flag } => {
                if n == 0 {
                    return usage_err("dimension must be at least 1");
                }
                let g = match parse_gen(&gen) {
                    Ok(g) => g,
                    Err(e) => return usage_err(&e),
                };
                let gs = GStructure::new(n);
                let dp = coproduct(&HopfElem::gen(g), &gs);
                let mut t = HopfTensor::zero(2);
                for ((a, b), c) in dp {
                    t.insert(vec![a, b], c);
                }
                let mut v = json!({
                    "version": 1, "n": n, "generator": gen,
                    "coproduct": io::tensor_to_json(&t),
                });
                if latex_flag {
                    v["latex"] = json!(latex::tensor_tex(&t));
                }
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
                ExitCode::SUCCESS
            }
            HopfCmd::Antipode { n, gen, latex: latex_flag } => {
                if n == 0 {
                    return usage_err("dimension must be at least 1");
                }
                let g = match parse_gen(&gen) {
                    Ok(g) => g,
                    Err(e) => return usage_err(&e),
                };
                let gs = GStructure::new(n);
                let s = twisted_antipode(&HopfElem::gen(g), &gs);
                let mut t = HopfTensor::zero(1);
                for (w, c) in &s.terms {
                    t.insert(vec![w.clone()], c.clone());
                }
                let mut v = json!({
                    "version": 1, "n": n, "generator": gen,
                    "twisted_antipode": io::tensor_to_json(&t),
                });
                if latex_flag {
                    v["latex"] = json!(latex::tensor_tex(&t));
                }
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
                ExitCode::SUCCESS
            }
        },
        Command::Selftest { seed, section, list } => {
            if list {
                for s in hopfcw::selftest::section_names() {
                    println!("{s}");
                }
                return ExitCode::SUCCESS;
            }
            let (pass, out) = hopfcw::selftest::run(seed, section.as_deref());
            print!("{out}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
