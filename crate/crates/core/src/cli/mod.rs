//! Command-line front end over Choi documents.
//!
//! Exit codes: 0 success, 2 validation failure (bad document or a check
//! that does not hold), 3 solver did not reach optimality, 4 bound or
//! assertion violated, 64 usage error.

mod document;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::measures::{
    conversion_distance_ppt, cost_bounds_check_with, exact_cost_single_shot, f_p, g_p, ln_max, ln_max_minimax, log_negativity, negativity, ExactCost,
    MeasureError, MeasureResult, M_MAX, SQUARE_BUDGET,
};
use crate::quantum::{
    is_ppt_channel, is_ppt_superchannel, is_superchannel_valid, random_channel, random_ppt_channel, random_ppt_superchannel, rng, swap_channel,
    ChannelDims, QuantumError, SuperchannelShape,
};
use crate::witness_scenarios::{bound_povm_channel, cone_minimum, no_go_trial, tiles_state, witness_assemble, ScenarioError, CONE_TOL};

pub use document::{parse_choi, superchannel_dims, ChoiDocument, DocumentError, Role, HERMITIAN_TOL, SCHEMA_VERSION};
pub use report::{render_json, render_text, round_numbers, round_sig, SIGNIFICANT_DIGITS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_OPTIMAL: i32 = 3;
pub const EXIT_BOUND: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "pptkit", version, about = "PPT entanglement measures and checks for bipartite channels")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,
    /// Include wall-clock timings (reports are then no longer reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural predicates on a document.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Entanglement measures of a channel.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// PPT conversion distance from SRC to DST.
    ConvertDistance { src: PathBuf, dst: PathBuf },
    /// Smallest Schmidt rank of φ⁺ that simulates SRC exactly under PPT superchannels.
    ExactCost {
        src: PathBuf,
        #[arg(long, default_value_t = M_MAX)]
        m_max: usize,
        /// Also compute the cost of the tensor square when small enough.
        #[arg(long)]
        bounds: bool,
        /// Write the certificate channel R.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// NPT witnesses for the PPT-superchannel cone.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Canned scenarios.
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Seeded random documents.
    #[command(subcommand)]
    Random(RandomCommand),
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// Partial transpose of a channel Choi matrix on Bob's side is PSD
    PptChannel { file: PathBuf },
    /// Valid superchannel whose Bob-side partial transpose is PSD
    PptSuperchannel { file: PathBuf },
    /// Role-specific validity.
    Valid { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum MeasureCommand {
    /// (‖Γ[N]‖⋄ − 1) / 2
    Negativity { file: PathBuf },
    /// Logarithmic negativity.
    Ln { file: PathBuf },
    /// Max-logarithmic negativity.
    Lnmax {
        file: PathBuf,
        /// Single program bounding both norms with one epigraph variable.
        #[arg(long)]
        minimax: bool,
    },
    /// Monotone family member for the probe channel P.
    Fp {
        file: PathBuf,
        #[arg(long)]
        probe: PathBuf,
        /// Subtract the best PPT overlap (the relative member).
        #[arg(long)]
        relative: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum WitnessCommand {
    /// W = P + X^Γ + Y ⊗ I + I ⊗ Z from component documents.
    Assemble {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Minimum of Tr[W J] over PPT superchannels.
    Validate { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum DemoCommand {
    /// Binary measurement {β, I − β} with a PPT entangled β.
    BoundPovm {
        /// State document for β; defaults to the tiles state.
        #[arg(long)]
        beta: Option<PathBuf>,
    },
    /// Random PPT combs applied to PPT channels stay PPT.
    NoGo {
        #[arg(long, default_value_t = 2)]
        slots: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Entanglement of the swap channel.
    Swap {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
    },
}

#[derive(Args, Debug)]
pub struct SaveArg {
    #[arg(long)]
    pub save: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum RandomCommand {
    /// Random channel from a full-rank Kraus isometry
    Channel {
        #[arg(long)]
        seed: u64,
        /// a0,b0,a1,b1
        #[arg(long, value_parser = parse_dims, default_value = "2,1,1,2")]
        dims: ChannelDims,
        /// Sample a PPT channel.
        #[arg(long)]
        ppt: bool,
        #[command(flatten)]
        save: SaveArg,
    },
    /// Random PPT superchannel built from PPT pre- and post-processing
    PptSuperchannel {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = parse_dims, default_value = "1,1,2,2")]
        slot: ChannelDims,
        #[arg(long, value_parser = parse_dims, default_value = "1,1,2,2")]
        out: ChannelDims,
        /// m_a,m_b
        #[arg(long, value_parser = parse_pair, default_value = "1,1")]
        memory: (usize, usize),
        #[command(flatten)]
        save: SaveArg,
    },
}

fn parse_list(s: &str, n: usize) -> Result<Vec<usize>, String> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"))).collect::<Result<_, _>>()?;
    if v.len() != n || v.contains(&0) {
        return Err(format!("expected {n} positive integers separated by commas"));
    }
    Ok(v)
}

fn parse_dims(s: &str) -> Result<ChannelDims, String> {
    let v = parse_list(s, 4)?;
    Ok(ChannelDims::new(v[0], v[1], v[2], v[3]))
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let v = parse_list(s, 2)?;
    Ok((v[0], v[1]))
}

/// Exit code with what goes to stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Validation(DocumentError),
    NotOptimal(String),
    Bound(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::NotOptimal(_) => EXIT_NOT_OPTIMAL,
            Failure::Bound(_) => EXIT_BOUND,
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Failure::Validation(e) => json!({"path": e.path, "reason": e.reason}),
            Failure::NotOptimal(m) | Failure::Bound(m) => json!({"path": "", "reason": m}),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Validation(e)
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::NotOptimal { .. } | MeasureError::Solver(_) => Failure::NotOptimal(e.to_string()),
            MeasureError::BoundViolation(m) => Failure::Bound(m),
            other => Failure::Validation(DocumentError::new("", other.to_string())),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Measure(m) => m.into(),
            other => Failure::Validation(DocumentError::new("", other.to_string())),
        }
    }
}

impl From<QuantumError> for Failure {
    fn from(e: QuantumError) -> Self {
        Failure::Validation(DocumentError::new("", e.to_string()))
    }
}

type Step<T> = Result<T, Failure>;

/// Results and an exit code for checks that ran but did not hold.
struct Done {
    results: Value,
    code: i32,
}

impl Done {
    fn ok(results: Value) -> Self {
        Done { results, code: EXIT_OK }
    }

    fn holds(results: Value, holds: bool) -> Self {
        Done { results, code: if holds { EXIT_OK } else { EXIT_VALIDATION } }
    }
}

struct Session {
    inputs: Vec<Value>,
    seed: Option<u64>,
    timings: Map<String, Value>,
    document: Option<Value>,
}

impl Session {
    fn load(&mut self, path: &Path) -> Step<ChoiDocument> {
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| DocumentError::new("", format!("cannot read {shown}: {e}")))?;
        self.inputs.push(json!({"path": shown, "sha256": sha256_hex(&bytes)}));
        parse_choi(&bytes).map_err(|e| Failure::Validation(DocumentError::new(e.path, format!("{shown}: {}", e.reason))))
    }

    fn channel(&mut self, path: &Path) -> Step<crate::quantum::BipartiteChannel> {
        Ok(self.load(path)?.to_channel()?)
    }

    fn time(&mut self, key: &str, seconds: f64) {
        self.timings.insert(format!("{key}_seconds"), json!(seconds));
    }

    fn emit(&mut self, doc: &ChoiDocument, save: Option<&Path>) -> Step<String> {
        let text = doc.to_json();
        if let Some(p) = save {
            std::fs::write(p, &text).map_err(|e| DocumentError::new("--save", format!("cannot write {}: {e}", p.display())))?;
        }
        self.document = Some(doc.to_value());
        Ok(sha256_hex(text.as_bytes()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn measure_value(s: &mut Session, key: &str, r: &MeasureResult) -> Value {
    s.time(key, r.seconds);
    json!({
        "value": r.value,
        "primal_value": r.primal_value,
        "dual_value": r.dual_value,
        "gap": r.gap,
        "residual": r.residual,
        "flag": r.flag,
        "program_sizes": r.sizes,
    })
}

fn dims_value(d: ChannelDims) -> Value {
    json!({"A0": d.a0, "B0": d.b0, "A1": d.a1, "B1": d.b1})
}

fn check(s: &mut Session, c: &CheckCommand) -> Step<Done> {
    match c {
        CheckCommand::PptChannel { file } => {
            let n = s.channel(file)?;
            let ppt = is_ppt_channel(&n);
            let min = n.gamma().choi().min_eigenvalue().map_err(QuantumError::from)?;
            Ok(Done::holds(json!({"dims": dims_value(n.dims()), "ppt": ppt, "gamma_min_eigenvalue": min}), ppt))
        }
        CheckCommand::PptSuperchannel { file } => {
            let t = s.load(file)?.to_superchannel()?;
            let valid = is_superchannel_valid(&t);
            let ppt = is_ppt_superchannel(&t);
            let defect = crate::quantum::superchannel_defect(t.choi());
            Ok(Done::holds(json!({"valid": valid, "ppt": ppt, "defect": defect}), ppt))
        }
        CheckCommand::Valid { file } => {
            let doc = s.load(file)?;
            let defect = doc.defect()?;
            Ok(Done::holds(json!({"role": doc.role.as_str(), "valid": defect.is_none(), "defect": defect}), defect.is_none()))
        }
    }
}

fn measure(s: &mut Session, c: &MeasureCommand) -> Step<Done> {
    match c {
        MeasureCommand::Negativity { file } => {
            let n = s.channel(file)?;
            let r = negativity(&n)?;
            Ok(Done::ok(measure_value(s, "negativity", &r)))
        }
        MeasureCommand::Ln { file } => {
            let n = s.channel(file)?;
            let r = log_negativity(&n)?;
            Ok(Done::ok(measure_value(s, "ln", &r)))
        }
        MeasureCommand::Lnmax { file, minimax } => {
            let n = s.channel(file)?;
            if *minimax {
                let r = ln_max_minimax(&n)?;
                return Ok(Done::ok(measure_value(s, "lnmax_minimax", &r)));
            }
            let l = ln_max(&n)?;
            let zero = measure_value(s, "lnmax_zero", &l.zero);
            let one = measure_value(s, "lnmax_one", &l.one);
            Ok(Done::ok(json!({"value": l.value, "flagged": l.is_flagged(), "zero": zero, "one": one})))
        }
        MeasureCommand::Fp { file, probe, relative } => {
            let n = s.channel(file)?;
            let p = s.channel(probe)?;
            let (key, r) = if *relative { ("gp", g_p(&n, &p)?) } else { ("fp", f_p(&n, &p)?) };
            Ok(Done::ok(measure_value(s, key, &r)))
        }
    }
}

fn cost_value(c: &ExactCost) -> Value {
    json!({
        "m": c.m,
        "log2_m": c.log2_m(),
        "ln_max": c.ln_max,
        "lower_seed": c.lower_seed,
        "m_max": c.m_max,
        "exceeds_budget": c.exceeds_budget(),
        "below": c.below,
        "certificate_slack": c.certificate_slack,
        "relaxed_margin": c.relaxed_margin,
        "probes": c.probes,
    })
}

/// `log₂(2^{LN}−1) ≤ log₂ m ≤ log₂(2^{LN}+2)`; a missing `m` only
/// counts against the bound when `m_max` covers the upper end.
fn sandwich(c: &ExactCost) -> (f64, f64, bool) {
    const SLACK: f64 = 1e-5;
    let base = c.ln_max.exp2();
    let lower = if base - 1.0 > 1.0 { (base - 1.0).log2() } else { 0.0 };
    let upper = (base + 2.0).log2();
    let holds = match c.log2_m() {
        Some(e) => lower - SLACK <= e && e <= upper + SLACK,
        None => (c.m_max as f64) < (base + 2.0 - 1e-6).floor(),
    };
    (lower, upper, holds)
}

fn exact_cost(s: &mut Session, src: &Path, m_max: usize, bounds: bool, save: Option<&Path>) -> Step<Done> {
    let n = s.channel(src)?;
    let (cost, extra) = if bounds {
        if m_max != M_MAX {
            return Err(DocumentError::new("--m-max", format!("--bounds uses m_max = {M_MAX}")).into());
        }
        let b = cost_bounds_check_with(&n, SQUARE_BUDGET)?;
        (b.cost, Some(json!({"sequence": b.sequence, "ln_max_square": b.ln_max_square})))
    } else {
        (exact_cost_single_shot(&n, m_max)?, None)
    };
    s.time("exact_cost", cost.seconds);
    let (lower, upper, holds) = sandwich(&cost);
    let mut v = cost_value(&cost);
    let obj = v.as_object_mut().expect("object");
    obj.insert("bounds".into(), json!({"lower": lower, "upper": upper, "holds": holds}));
    if let Some(e) = extra {
        obj.insert("tensor_powers".into(), e);
    }
    if let Some(r) = &cost.certificate {
        let digest = s.emit(&ChoiDocument::channel(r), save)?;
        obj.insert("certificate_sha256".into(), json!(digest));
    }
    Ok(Done { results: v, code: if holds { EXIT_OK } else { EXIT_BOUND } })
}

fn component(s: &mut Session, path: &Path, name: &str) -> Step<ChoiDocument> {
    let doc = s.load(path)?;
    if doc.role != Role::Superchannel {
        return Err(DocumentError::new("role", format!("witness component {name} must have role superchannel, got {}", doc.role)).into());
    }
    Ok(doc)
}

fn witness(s: &mut Session, c: &WitnessCommand) -> Step<Done> {
    match c {
        WitnessCommand::Assemble { p, x, y, z, save } => {
            let p = component(s, p, "P")?;
            let x = component(s, x, "X")?;
            let y = component(s, y, "Y")?;
            let z = component(s, z, "Z")?;
            let (slot, out) = superchannel_dims(p.matrix.spec())
                .ok_or_else(|| DocumentError::new("dims", "P must carry the eight superchannel factors"))?;
            let w = witness_assemble(&p.matrix, &x.matrix, &y.matrix, &z.matrix, slot, out)?;
            let digest = s.emit(&ChoiDocument::new(Role::Superchannel, w.w.clone()), save.as_deref())?;
            Ok(Done::ok(json!({"slot": dims_value(slot), "out": dims_value(out), "proper": w.proper, "witness_sha256": digest})))
        }
        WitnessCommand::Validate { file } => {
            let doc = s.load(file)?;
            let t = doc.to_superchannel()?;
            let (slot, out) = (t.slot_dims(), t.output_dims());
            let proper = !t.choi().is_psd().map_err(QuantumError::from)?;
            let r = cone_minimum(t.choi(), slot, out)?;
            let is_witness = proper && r.value >= -CONE_TOL;
            let m = measure_value(s, "witness", &r);
            Ok(Done::holds(json!({"proper": proper, "min_value": r.value, "is_witness": is_witness, "program": m}), is_witness))
        }
    }
}

fn demo(s: &mut Session, c: &DemoCommand) -> Step<Done> {
    match c {
        DemoCommand::BoundPovm { beta } => {
            let (name, b) = match beta {
                Some(p) => {
                    let doc = s.load(p)?;
                    if doc.role != Role::State {
                        return Err(DocumentError::new("role", format!("beta must have role state, got {}", doc.role)).into());
                    }
                    (p.display().to_string(), doc.matrix)
                }
                None => ("tiles".to_string(), tiles_state()),
            };
            let (ch, rep) = bound_povm_channel(&b)?;
            let mut v = serde_json::to_value(&rep).expect("json");
            let obj = v.as_object_mut().expect("object");
            obj.insert("beta".into(), json!(name));
            obj.insert("dims".into(), dims_value(ch.dims()));
            Ok(Done::ok(v))
        }
        DemoCommand::NoGo { slots, seed, trials } => {
            s.seed = Some(*seed);
            let mut r = rng(*seed);
            let (mut violations, mut min_ev, mut qubit_outputs) = (0usize, f64::INFINITY, 0usize);
            for t in 0..*trials {
                let rep = no_go_trial(*slots, r.next_u64(), t % 2 == 1)?;
                violations += rep.violation as usize;
                qubit_outputs += rep.two_qubit_state as usize;
                min_ev = min_ev.min(rep.pt_min_eigenvalue);
            }
            let verdict = if violations == 0 { "no violation" } else { "violation" };
            let results = json!({
                "slots": slots,
                "trials": trials,
                "violations": violations,
                "two_qubit_outputs": qubit_outputs,
                "min_pt_eigenvalue": if *trials > 0 { Some(min_ev) } else { None },
                "verdict": verdict,
            });
            Ok(Done { results, code: if violations == 0 { EXIT_OK } else { EXIT_BOUND } })
        }
        DemoCommand::Swap { dim, m_max } => {
            if *dim < 2 {
                return Err(DocumentError::new("--dim", "swap needs dimension at least 2").into());
            }
            let n = swap_channel(*dim);
            let ln = log_negativity(&n)?;
            let lm = ln_max(&n)?;
            let cost = exact_cost_single_shot(&n, *m_max)?;
            let (lower, upper, holds) = sandwich(&cost);
            let ln_v = measure_value(s, "ln", &ln);
            s.time("lnmax", lm.zero.seconds + lm.one.seconds);
            s.time("exact_cost", cost.seconds);
            let results = json!({
                "dim": dim,
                "ln": ln_v,
                "ln_max": lm.value,
                "ln_max_flagged": lm.is_flagged(),
                "exact_cost": cost_value(&cost),
                "bounds": {"lower": lower, "upper": upper, "holds": holds},
            });
            Ok(Done { results, code: if holds { EXIT_OK } else { EXIT_BOUND } })
        }
    }
}

fn random(s: &mut Session, c: &RandomCommand) -> Step<Done> {
    match c {
        RandomCommand::Channel { seed, dims, ppt, save } => {
            s.seed = Some(*seed);
            let n = if *ppt { random_ppt_channel(*dims, *seed)? } else { random_channel(*dims, *seed)? };
            let digest = s.emit(&ChoiDocument::channel(&n), save.save.as_deref())?;
            Ok(Done::ok(json!({"role": "channel", "dims": dims_value(*dims), "ppt": is_ppt_channel(&n), "document_sha256": digest})))
        }
        RandomCommand::PptSuperchannel { seed, slot, out, memory, save } => {
            s.seed = Some(*seed);
            let t = random_ppt_superchannel(SuperchannelShape::new(*slot, *out, *memory), *seed)?;
            let digest = s.emit(&ChoiDocument::superchannel(&t), save.save.as_deref())?;
            Ok(Done::ok(json!({
                "role": "superchannel",
                "slot": dims_value(*slot),
                "out": dims_value(*out),
                "memory": [memory.0, memory.1],
                "valid": is_superchannel_valid(&t),
                "ppt": is_ppt_superchannel(&t),
                "document_sha256": digest,
            })))
        }
    }
}

fn dispatch(s: &mut Session, c: &Command) -> Step<Done> {
    match c {
        Command::Check(c) => check(s, c),
        Command::Measure(c) => measure(s, c),
        Command::ConvertDistance { src, dst } => {
            let n = s.channel(src)?;
            let m = s.channel(dst)?;
            let r = conversion_distance_ppt(&n, &m)?;
            Ok(Done::ok(measure_value(s, "convert_distance", &r)))
        }
        Command::ExactCost { src, m_max, bounds, save } => exact_cost(s, src, *m_max, *bounds, save.as_deref()),
        Command::Witness(c) => witness(s, c),
        Command::Demo(c) => demo(s, c),
        Command::Random(c) => random(s, c),
    }
}

fn status_name(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_VALIDATION => "validation_failure",
        EXIT_NOT_OPTIMAL => "solver_not_optimal",
        EXIT_BOUND => "bound_violation",
        _ => "usage",
    }
}

/// Runs one command line (the first item is the program name).
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Output { code: EXIT_OK, stdout: text, stderr: String::new() },
                _ => Output { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let start = Instant::now();
    let mut s = Session { inputs: Vec::new(), seed: None, timings: Map::new(), document: None };
    let outcome = dispatch(&mut s, &cli.command);
    let (code, mut results, error) = match outcome {
        Ok(d) => (d.code, d.results, Value::Null),
        Err(f) => (f.code(), Value::Null, f.to_value()),
    };
    round_numbers(&mut results);

    let mut echo = vec!["pptkit".to_string()];
    echo.extend(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));
    let mut r = Map::new();
    r.insert("command".into(), json!(echo));
    r.insert("version".into(), json!(VERSION));
    r.insert("seed".into(), json!(s.seed));
    r.insert("inputs".into(), Value::Array(s.inputs));
    r.insert("status".into(), json!(status_name(code)));
    r.insert("exit_code".into(), json!(code));
    r.insert("results".into(), results);
    r.insert("error".into(), error);
    if let Some(d) = s.document.take() {
        r.insert("document".into(), d);
    }
    let timings = if cli.timings {
        s.timings.insert("total_seconds".into(), json!(start.elapsed().as_secs_f64()));
        Value::Object(s.timings)
    } else {
        Value::Null
    };
    r.insert("timings".into(), timings);
    let stdout = match cli.output {
        OutputFormat::Json => render_json(&r),
        OutputFormat::Text => render_text(&r),
    };
    let stderr = match (code, r.get("error")) {
        (EXIT_OK, _) | (_, Some(Value::Null)) => String::new(),
        (_, Some(e)) => format!("error: {}\n", e["reason"].as_str().unwrap_or("")),
        _ => String::new(),
    };
    Output { code, stdout, stderr }
}

#[cfg(test)]
mod tests;
