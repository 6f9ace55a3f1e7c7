//! Command-line front end. Every command produces one [`Report`]: a short
//! text summary plus a machine-readable JSON document.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::clifford::{generation_check, standard_generators, synthesize_hi, synthesize_s1, verify_ppm_cnot, SymplecticOp};
use crate::codes::{load, seed, validate_cc_seed, CcCode, SeedDoc};
use crate::distance::{exhaustive_distance, randomized_distance};
use crate::error::{Error, Result};
use crate::gadget;
use crate::gf2::BitMatrix;
use crate::logical::{clustered_basis, verify_clustered};
use crate::surgery::{
    boost_census, ft_scan, merge_targets, merged_counts, overhead_report, pair_connection, surgery_trace, ConnectionCode,
    FtScanOptions, MergeKind, ScanMode,
};

pub const SCHEMA: &str = "ccsurgery-report/1";
const DEFAULT_SEED: u64 = 20240917;

#[derive(Parser, Debug)]
#[command(name = "ccsurgery", version, about = "Clustered-cyclic codes, product surgery and Clifford gadgets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for parallel scans.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct CodeArg {
    /// Bundled seed label (e.g. `24_8_3`) or path to a seed document.
    pub code: String,
}

#[derive(Args, Debug, Clone)]
pub struct ConnArgs {
    /// 0/1 pattern of H_a', rows separated by `;`.
    #[arg(long, default_value = "10;01")]
    pub a: String,
    /// 0/1 pattern of H_b', rows separated by `;`.
    #[arg(long, default_value = "10;01")]
    pub b: String,
    #[arg(long, value_enum, default_value_t = Kind::Z)]
    pub kind: Kind,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Kind {
    Z,
    X,
}

impl From<Kind> for MergeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Z => MergeKind::Z,
            Kind::X => MergeKind::X,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a seed document and build the code.
    Build(CodeArg),
    /// N, k and maximum check weight.
    Params(CodeArg),
    /// Clustered logical basis and its verification.
    Basis(CodeArg),
    /// Minimum distance, exhaustive or randomized.
    Distance {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Largest weight enumerated by the exhaustive search.
        #[arg(long)]
        weight_cap: Option<usize>,
    },
    /// Stage-by-stage check matrices of a product surgery.
    Surgery {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        conn: ConnArgs,
        /// Syndrome rounds recorded in the trace.
        #[arg(long, default_value_t = 3)]
        rounds: usize,
    },
    /// Merge count, merged logical/gauge counts and measured targets.
    Merges {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        conn: ConnArgs,
    },
    /// A 0/1 connection measuring the pair `alpha`, `beta`.
    PairConnection {
        #[command(flatten)]
        code: CodeArg,
        alpha: usize,
        beta: usize,
    },
    /// Merged-code distance over all 0/1 connections.
    FtScan {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Distance threshold; defaults to the label's `d`.
        #[arg(long)]
        weight_cap: Option<usize>,
    },
    /// Census of Z-measurement configurations on eight logicals.
    BoostCount {
        #[arg(default_value = "24_8_3")]
        code: String,
    },
    /// Space and time overhead of parallel surgery.
    Overhead {
        #[command(flatten)]
        code: CodeArg,
        /// Merges per round; defaults to k/2.
        #[arg(long)]
        merges: Option<usize>,
        /// Code distance; defaults to the label's `d`.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Symplectic closure, phase/Hadamard synthesis and the PPM-based CNOT.
    CliffordCheck {
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Logical gadgets of the [[24,8,3]] code.
    Gadget {
        #[command(subcommand)]
        which: GadgetCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum GadgetCmd {
    /// Replay a CNOT schedule over all measurement branches.
    Cnot {
        #[arg(long, default_value = "62x84")]
        schedule: String,
    },
    /// Every CNOT schedule.
    Schedules,
    /// Fold-transversal CZ-S gate.
    CzS,
    /// Fold-transversal H-SWAP gate.
    HSwap,
    /// The three automorphism gates.
    Aut,
    /// Global Hadamard from folds and automorphisms.
    GlobalH,
    /// `S_i S_j^dagger` on data qubits.
    Sisj { i: usize, j: usize },
    /// Generators of the Clifford group on the data qubits.
    Toolbox,
}

#[derive(Serialize, Debug)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub passed: bool,
    pub result: Value,
    #[serde(skip)]
    pub text: String,
}

fn digest(code: &str) -> Option<String> {
    let text = match seed(code) {
        Ok(doc) => doc.canonical().ok()?,
        Err(_) => std::fs::read_to_string(code).ok()?,
    };
    let h = Sha256::digest(text.as_bytes());
    Some(h.iter().map(|b| format!("{b:02x}")).collect())
}

/// `d` from a label of the form `N_k_d`.
fn label_distance(code: &CcCode) -> Option<usize> {
    code.label.as_ref()?.rsplit('_').next()?.parse().ok()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn pattern(text: &str) -> Result<BitMatrix> {
    if let Some(bad) = text.chars().find(|c| !matches!(c, '0' | '1' | ';' | ' ')) {
        return Err(Error::Input(format!("unexpected '{bad}' in pattern '{text}'")));
    }
    let rows: Vec<&str> = text.split(';').map(str::trim).filter(|r| !r.is_empty()).collect();
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::Input(format!("pattern '{text}' must have equal nonempty rows")));
    }
    Ok(BitMatrix::parse(text))
}

fn connection(code: &CcCode, c: &ConnArgs) -> Result<ConnectionCode> {
    ConnectionCode::from_patterns(code.p, &pattern(&c.a)?, &pattern(&c.b)?)
}

struct Out {
    passed: bool,
    result: Value,
    text: String,
    rng_seed: Option<u64>,
    code: Option<String>,
}

fn out(passed: bool, result: Value, text: String) -> Out {
    Out { passed, result, text, rng_seed: None, code: None }
}

pub fn execute(cli: &Cli, argv: Vec<String>) -> Result<Report> {
    let o = dispatch(&cli.command)?;
    Ok(Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: argv,
        inputs_digest: o.code.as_deref().and_then(digest),
        rng_seed: o.rng_seed,
        passed: o.passed,
        result: o.result,
        text: o.text,
    })
}

fn dispatch(cmd: &Command) -> Result<Out> {
    let with_code = |o: Out, c: &str| Out { code: Some(c.to_string()), ..o };
    match cmd {
        Command::Build(c) => {
            let doc = match seed(&c.code) {
                Ok(d) => d,
                Err(_) => SeedDoc::parse(&std::fs::read_to_string(&c.code).map_err(|_| Error::Input(format!("no seed '{}'", c.code)))?)?,
            };
            let (a, b) = doc.matrices()?;
            let (va, vb) = (validate_cc_seed(&a), validate_cc_seed(&b));
            let validation = json!({ "H_a": va, "H_b": vb });
            if !va.passed() || !vb.passed() {
                eprintln!("{}", serde_json::to_string_pretty(&validation).unwrap_or_default());
            }
            let code = doc.build()?;
            let p = code.css.params();
            let text = format!("built {}: N={} k={} W={} p={} n_a={} n_b={}", doc.label, p.n, p.k, p.w_max, code.p, code.n_a, code.n_b);
            Ok(with_code(out(true, json!({ "validation": validation, "params": p, "seed": doc }), text), &c.code))
        }
        Command::Params(c) => {
            let code = load(&c.code)?;
            let p = code.css.params();
            Ok(with_code(out(true, to_value(&p), format!("N={} k={} W={}", p.n, p.k, p.w_max)), &c.code))
        }
        Command::Basis(c) => {
            let code = load(&c.code)?;
            let basis = clustered_basis(&code);
            let rep = verify_clustered(&basis, &code);
            let text = format!(
                "{} clustered logicals of weight {}; verification {}{}",
                basis.k(),
                code.p,
                if rep.ok { "passed" } else { "FAILED" },
                rep.violations.iter().map(|v| format!("\n  {v}")).collect::<String>()
            );
            Ok(with_code(out(rep.ok, json!({ "basis": basis, "report": rep }), text), &c.code))
        }
        Command::Distance { code: c, exhaustive, trials, seed, weight_cap } => {
            let code = load(&c.code)?;
            let est = if *exhaustive {
                let cap = weight_cap.or(label_distance(&code)).ok_or_else(|| Error::Input("--weight-cap is required".into()))?;
                exhaustive_distance(&code.css, cap)?
            } else {
                randomized_distance(&code.css, *trials, *seed)
            };
            let expected = label_distance(&code);
            let passed = match (est.d(), expected) {
                (Some(d), Some(e)) => d == e,
                (Some(_), None) => true,
                (None, _) => false,
            };
            let text = format!(
                "d_X={:?} d_Z={:?} ({}{}) expected {:?}",
                est.d_x_est,
                est.d_z_est,
                if est.exhaustive { "exhaustive" } else { "randomized" },
                if est.exhaustive { String::new() } else { format!(", {} trials, n_bar=({}, {})", est.trials, est.n_bar_x, est.n_bar_z) },
                expected
            );
            let mut o = with_code(out(passed, to_value(&est), text), &c.code);
            o.rng_seed = est.rng_seed;
            Ok(o)
        }
        Command::Surgery { code: c, conn, rounds } => {
            let code = load(&c.code)?;
            let cn = connection(&code, conn)?;
            let trace = surgery_trace(&code.css, &cn, *rounds)?;
            let text = trace
                .stages
                .iter()
                .map(|s| format!("{}: H_X {}x{}, H_Z {}x{}", s.label, s.hx.rows(), s.hx.cols(), s.hz.rows(), s.hz.cols()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(with_code(out(true, to_value(&trace), text), &c.code))
        }
        Command::Merges { code: c, conn } => {
            let code = load(&c.code)?;
            let cn = connection(&code, conn)?;
            let rep = merged_counts(&code, &cn, conn.kind.into())?;
            let targets: Vec<String> = rep.targets.iter().map(|t| format!("{:?}", t.logicals)).collect();
            let text = format!(
                "{:?}-merge: n~={} M={} k~={} r~={} maximally parallel: {}\ntargets: {}",
                rep.kind,
                rep.n_tilde,
                rep.m,
                rep.k_tilde,
                rep.r_tilde,
                rep.maximally_parallel,
                targets.join(" ")
            );
            Ok(with_code(out(true, to_value(&rep), text), &c.code))
        }
        Command::PairConnection { code: c, alpha, beta } => {
            let code = load(&c.code)?;
            let cn = pair_connection(&code, *alpha, *beta)?;
            let targets = merge_targets(&code, &cn, MergeKind::Z)?;
            let a = cn.a_pattern().to_rows_string();
            let b = cn.b_pattern().to_rows_string();
            let text = format!("H_a'={} H_b'={} targets {:?}", a.join(";"), b.join(";"), targets.iter().map(|t| &t.logicals).collect::<Vec<_>>());
            Ok(with_code(out(true, json!({ "h_a_prime": a, "h_b_prime": b, "targets": targets }), text), &c.code))
        }
        Command::FtScan { code: c, exhaustive, trials, seed, weight_cap } => {
            let code = load(&c.code)?;
            let d = weight_cap.or(label_distance(&code)).ok_or_else(|| Error::Input("--weight-cap is required".into()))?;
            let opts = FtScanOptions {
                d,
                mode: if *exhaustive { ScanMode::Exhaustive } else { ScanMode::Randomized },
                trials: *trials,
                seed: *seed,
                connections: None,
            };
            let rep = ft_scan(&code, &opts)?;
            let text = format!("{}/{} merged codes keep d >= {d}; min d~ = {:?}", rep.passed, rep.total, rep.min_d_tilde);
            let mut o = with_code(out(rep.passed == rep.total, to_value(&rep), text), &c.code);
            o.rng_seed = (!exhaustive).then_some(*seed);
            Ok(o)
        }
        Command::BoostCount { code: c } => {
            let code = load(c)?;
            let rep = boost_census(&code)?;
            let text = format!(
                "configurations: {}; boostable: {} (reference {}, {})\npredicate: {}\nvariants: {:?}",
                rep.total,
                rep.boostable,
                rep.reference,
                if rep.agrees { "agrees" } else { "differs" },
                rep.predicate,
                rep.variants
            );
            Ok(with_code(out(rep.total == 7192, to_value(&rep), text), c))
        }
        Command::Overhead { code: c, merges, d } => {
            let code = load(&c.code)?;
            let d = d.or(label_distance(&code)).ok_or_else(|| Error::Input("--d is required".into()))?;
            let m = merges.unwrap_or(code.k() / 2);
            let rep = overhead_report(&code, d, m)?;
            let text = format!(
                "space {} ({} data + {} check), time per merge {} rounds, spacetime {}{}",
                rep.space,
                rep.data_aux,
                rep.check_aux,
                rep.time_per_merge,
                rep.spacetime,
                if rep.extrapolated { " (extrapolated)" } else { "" }
            );
            Ok(with_code(out(true, to_value(&rep), text), &c.code))
        }
        Command::CliffordCheck { m } => clifford_check(*m),
        Command::Gadget { which } => gadget_cmd(which),
    }
}

fn clifford_check(m: usize) -> Result<Out> {
    if !(1..=4).contains(&m) {
        return Err(Error::Input("closure search supports 1 <= m <= 4".into()));
    }
    let full = generation_check(m, &standard_generators(m, true), 4_000_000)?;
    let no_phase = generation_check(m, &standard_generators(m, false), 4_000_000)?;
    let mut lines = vec![
        format!("closure m={m}: {} of {} (full: {})", full.order, full.target, full.full),
        format!("without S_i S_j^dagger: {}", no_phase.order),
    ];
    let mut passed = full.full == (m != 2) && !no_phase.full;
    let mut synth = Value::Null;
    if m >= 3 {
        let (_, rep) = synthesize_s1(m)?;
        let h = synthesize_hi(0, m)?;
        let h_ok = SymplecticOp::of_word(&h, m)? == SymplecticOp::of_gate(crate::clifford::Gate::H(0), m)?;
        lines.push(format!("S_1 synthesis: C_1+C_2+C_3 = E_11 {}, action {}; H_1 synthesis {}", rep.c_sum_is_e11, rep.action_matches, h_ok));
        passed &= rep.c_sum_is_e11 && rep.action_matches && h_ok;
        synth = json!({ "s1": rep, "h1_matches": h_ok });
    }
    let ppm = verify_ppm_cnot();
    lines.push(format!(
        "PPM CNOT: {} inputs x {} branches, failures {}, Choi {}",
        ppm.inputs_checked,
        ppm.branches_per_input,
        ppm.failures.len(),
        ppm.choi_ok
    ));
    passed &= ppm.failures.is_empty() && ppm.choi_ok;
    Ok(out(passed, json!({ "closure": full, "closure_without_phase_pairs": no_phase, "synthesis": synth, "ppm_cnot": ppm }), lines.join("\n")))
}

fn action_line(a: &gadget::LogicalAction) -> String {
    format!(
        "{}: stabilizers preserved {}, action = {} {}, signs {:?}{}",
        a.name,
        a.stabilizers_preserved,
        a.label,
        if a.symplectic_matches { "yes" } else { "NO" },
        a.sign_level,
        a.observed.as_ref().map(|o| format!(" [{o}]")).unwrap_or_default()
    )
}

fn schedule_text(r: &gadget::ScheduleReport) -> String {
    let mut s = format!(
        "{}: {:?} words {:?} ({}), {} branches, {} failed, final {:?}, restore '{}', aux cost {}: {}",
        r.id,
        r.cnots,
        r.words,
        r.words_source,
        r.branches,
        r.failed_branches,
        r.final_arrangement,
        r.restore_word,
        r.aux_cost,
        if r.passed { "pass" } else { "FAIL" }
    );
    for f in &r.frame_rules {
        s += &format!("\n    {} if parity of {:?}{}", f.correction, f.parity_of, if f.constant { " flipped" } else { "" });
    }
    if !r.realized_instead.is_empty() {
        s += &format!("\n    realizes instead: {}", r.realized_instead.join("; "));
    }
    s
}

fn gadget_cmd(which: &GadgetCmd) -> Result<Out> {
    Ok(match which {
        GadgetCmd::Cnot { schedule } => {
            let r = gadget::run_cnot_schedule(schedule)?;
            out(r.passed, to_value(&r), schedule_text(&r))
        }
        GadgetCmd::Schedules => {
            let rs = gadget::run_all_schedules()?;
            let text = rs.iter().map(schedule_text).collect::<Vec<_>>().join("\n");
            out(rs.iter().all(|r| r.passed), to_value(&rs), text)
        }
        GadgetCmd::CzS => {
            let r = gadget::verify_cz_s()?;
            let text = format!("H_X A H_X^* = 0: {}\n{}\nsquared identity: {}", r.identity_zero, action_line(&r.action), r.squared_is_identity);
            out(r.passed(), to_value(&r), text)
        }
        GadgetCmd::HSwap => {
            let r = gadget::verify_h_swap()?;
            out(r.passed(), to_value(&r), action_line(&r))
        }
        GadgetCmd::Aut => {
            let rs = gadget::verify_automorphisms()?;
            out(rs.iter().all(|a| a.passed()), to_value(&rs), rs.iter().map(action_line).collect::<Vec<_>>().join("\n"))
        }
        GadgetCmd::GlobalH => {
            let r = gadget::simplified_global_hadamard()?;
            let text = format!(
                "composition is H^8: logical {}, physical {} (signs {:?}); squared identity {}\nprinted word: {}",
                r.logical_composition_is_hall,
                r.physical_composition_is_hall,
                r.composition_sign_level,
                r.squared_is_identity,
                action_line(&r.printed_word)
            );
            out(r.passed(), to_value(&r), text)
        }
        GadgetCmd::Sisj { i, j } => {
            let r = gadget::verify_sisj_gadget(*i, *j)?;
            let text = format!("{}: {} branches, {} failed\n  {}", r.realized, r.branches, r.failed_branches, r.plan.join(", "));
            out(r.passed, to_value(&r), text)
        }
        GadgetCmd::Toolbox => {
            let c = gadget::clifford_toolbox_certificate()?;
            let mut lines: Vec<String> =
                c.generators.iter().map(|g| format!("{:14} {} {}", g.generator, if g.verified { "ok  " } else { "FAIL" }, g.realization)).collect();
            lines.push(format!("S_1 synthesis {}, H_i synthesis {}", c.phase_synthesis_ok, c.hadamard_synthesis_ok));
            lines.push(format!(
                "m=3 closure {} of {}; without S_i S_j^dagger {}",
                c.restricted_m3.order, c.restricted_m3.target, c.restricted_m3_without_phase_pairs.order
            ));
            out(c.passed, to_value(&c), lines.join("\n"))
        }
    })
}

/// Parse arguments, run, print, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(j) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, echo) {
        Ok(rep) => {
            let js = serde_json::to_string_pretty(&rep).expect("report serializes");
            let mut stdout = std::io::stdout().lock();
            let _ = if cli.json {
                writeln!(stdout, "{js}")
            } else {
                writeln!(stdout, "{}\n{}", rep.text, if rep.passed { "PASS" } else { "FAIL" })
            };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, js + "\n") {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            if rep.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
