mod statefile;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use luinv_core::families::DEFAULT_DEPTH;
use luinv_core::invariants::DEFAULT_TOL;
use luinv_core::statekit::{bell_phi_plus, ghz, orbit_pair, triple_counterexample, random_density, RngSeed};
use luinv_core::{
    decide2_states, decide3_states, fingerprint2, fingerprint3, fingerprints_equal, su2_to_so3, Fingerprint, LuError,
    Verdict, VerdictKind,
};
use serde::Serialize;
use statefile::{ComplexMatrix, State, StateFile};
use thiserror::Error;

// Output goes through these so a closed pipe (`luinv ... | head`) is not a panic.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

macro_rules! say {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::InvalidState(_) => 3,
        }
    }
}

impl From<LuError> for CliError {
    fn from(e: LuError) -> Self {
        match e {
            LuError::InvalidTolerance(_) | LuError::Incomparable(_) => CliError::Usage(e.to_string()),
            _ => CliError::InvalidState(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "luinv", version, about = "Local-unitary invariants and equivalence of two- and three-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Knobs {
    /// Absolute tolerance for invariant comparison (witnesses are checked at 10x)
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Generation depth of the three-qubit vector families (1 to 3)
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
}

impl Knobs {
    fn validate(self) -> Result<Self, CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if !(1..=3).contains(&self.depth) {
            return Err(CliError::Usage(format!("--depth must be 1, 2 or 3, got {}", self.depth)));
        }
        Ok(self)
    }

    fn header(&self) -> String {
        format!("# tol={:e} witness_tol={:e} depth={}", self.tol, 10.0 * self.tol, self.depth)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariant fingerprint of a state file
    Fingerprint {
        file: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
    },
    /// Decide whether two states are related by local unitaries
    Equiv {
        file_a: PathBuf,
        file_b: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
        /// Print rotations, SU(2) matrices and residuals on success
        #[arg(long)]
        witness: bool,
    },
    /// Write generated state files into a directory
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of qubits (defaults to 3 for ghz, 2 otherwise)
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition the state files of a directory into LU classes
    Classify {
        dir: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Random,
    Orbit,
    Counterexample,
    Ghz,
    Bell,
}

fn fingerprint_of(state: &State, depth: usize) -> Fingerprint {
    match state {
        State::Two { bloch, .. } => Fingerprint::Two(fingerprint2(bloch)),
        State::Three { bloch, .. } => Fingerprint::Three(fingerprint3(bloch, depth)),
    }
}

fn decide(a: &State, b: &State, knobs: &Knobs) -> Result<Verdict, CliError> {
    match (a, b) {
        (State::Two { rho: ra, .. }, State::Two { rho: rb, .. }) => Ok(decide2_states(ra, rb, knobs.tol)?),
        (State::Three { rho: ra, .. }, State::Three { rho: rb, .. }) => Ok(decide3_states(ra, rb, knobs.depth, knobs.tol)?),
        _ => Err(CliError::Usage(format!("cannot compare a {}-qubit state with a {}-qubit state", a.qubits(), b.qubits()))),
    }
}

#[derive(Serialize)]
struct FingerprintReport {
    tol: f64,
    depth: usize,
    fingerprint: Fingerprint,
}

fn cmd_fingerprint(file: &Path, knobs: Knobs, json: bool) -> Result<u8, CliError> {
    let knobs = knobs.validate()?;
    let state = statefile::load(file)?;
    let fp = fingerprint_of(&state, knobs.depth);
    if json {
        let report = FingerprintReport { tol: knobs.tol, depth: knobs.depth, fingerprint: fp };
        say!("{}", serde_json::to_string_pretty(&report).expect("fingerprints serialize"));
    } else {
        say!("{}", knobs.header());
        emit(&fp.canonical_text(knobs.tol));
        if let Fingerprint::Two(f) = &fp {
            say!("decision_relevant={}", f.decision_relevant_count());
        }
    }
    Ok(0)
}

fn format_matrix3(m: &luinv_core::RMat3) -> String {
    (0..3)
        .map(|i| format!("[{:>16.12}, {:>16.12}, {:>16.12}]", m[(i, 0)], m[(i, 1)], m[(i, 2)]))
        .collect::<Vec<_>>()
        .join("\n      ")
}

fn format_unitary(u: &luinv_core::CMat2) -> String {
    let c = |z: luinv_core::C64| format!("{:+.12}{:+.12}i", z.re, z.im);
    format!("[{}, {}]\n      [{}, {}]", c(u[(0, 0)]), c(u[(0, 1)]), c(u[(1, 0)]), c(u[(1, 1)]))
}

fn cmd_equiv(a: &Path, b: &Path, knobs: Knobs, witness: bool) -> Result<u8, CliError> {
    let knobs = knobs.validate()?;
    let sa = statefile::load(a)?;
    let sb = statefile::load(b)?;
    let verdict = decide(&sa, &sb, &knobs)?;
    say!("{}", knobs.header());
    say!("verdict: {}", verdict.kind());
    match &verdict {
        Verdict::Equivalent(w) => {
            say!("residual: {:.3e}", w.residual);
            if witness {
                say!("route: {:?}", w.route);
                for (i, (o, u)) in w.rotations.iter().zip(&w.unitaries).enumerate() {
                    say!("O{} = {}", i + 1, format_matrix3(o));
                    say!("U{} = {}", i + 1, format_unitary(u));
                    say!("U{} residual: {:.3e}", i + 1, luinv_core::pauli::conjugation_residual(u, o));
                }
            }
        }
        Verdict::NotEquivalent(cert) => say!("certificate: {cert}"),
        Verdict::Inconclusive(reason) => say!("reason: {reason}"),
    }
    Ok(match verdict.kind() {
        VerdictKind::Equivalent => 0,
        VerdictKind::NotEquivalent => 1,
        VerdictKind::Inconclusive => 4,
    })
}

fn cmd_gen(kind: GenKind, qubits: Option<usize>, seed: u64, out: &Path) -> Result<u8, CliError> {
    let qubits = qubits.unwrap_or(if kind == GenKind::Ghz { 3 } else { 2 });
    if qubits != 2 && qubits != 3 {
        return Err(CliError::Usage(format!("--qubits must be 2 or 3, got {qubits}")));
    }
    let need = |q: usize| {
        if qubits == q {
            Ok(())
        } else {
            Err(CliError::Usage(format!("this kind needs --qubits {q}")))
        }
    };
    let seed = RngSeed(seed);
    let dim = 1usize << qubits;
    let mut files: Vec<(&str, StateFile)> = Vec::new();
    match kind {
        GenKind::Random => files.push(("random.json", StateFile::from_density(&random_density(dim, None, seed)?))),
        GenKind::Orbit => {
            let rho = random_density(dim, None, seed)?;
            let (img, us) = orbit_pair(&rho, seed.derive(1));
            let rotations = us
                .iter()
                .map(|u| su2_to_so3(u).map(|o| std::array::from_fn(|k| o[(k / 3, k % 3)])))
                .collect::<Result<Vec<[f64; 9]>, _>>()?;
            files.push(("orbit_a.json", StateFile::from_density(&rho)));
            files.push(("orbit_b.json", StateFile::from_density(&img)));
            files.push((
                "orbit_witness.json",
                StateFile::Witness { unitaries: us.iter().map(ComplexMatrix::from_cmat2).collect(), rotations },
            ));
        }
        GenKind::Counterexample => {
            need(2)?;
            let (a, b) = triple_counterexample(seed);
            files.push(("counterexample_a.json", StateFile::from_bloch2(&a)));
            files.push(("counterexample_b.json", StateFile::from_bloch2(&b)));
        }
        GenKind::Ghz => {
            need(3)?;
            let g = ghz();
            let (h, _) = orbit_pair(&g, seed);
            files.push(("ghz.json", StateFile::from_density(&g)));
            files.push(("ghz_rotated.json", StateFile::from_density(&h)));
        }
        GenKind::Bell => {
            need(2)?;
            files.push(("bell.json", StateFile::from_density(&bell_phi_plus())));
        }
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Usage(format!("{}: {e}", out.display())))?;
    for (name, file) in &files {
        let path = out.join(name);
        statefile::write(&path, file)?;
        say!("{}", path.display());
    }
    Ok(0)
}

fn cmd_classify(dir: &Path, knobs: Knobs) -> Result<u8, CliError> {
    let knobs = knobs.validate()?;
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut names = Vec::new();
    let mut states = Vec::new();
    for p in &paths {
        let file = statefile::read(p)?;
        if !file.is_state() {
            continue;
        }
        states.push(file.into_state()?);
        names.push(p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()));
    }
    if let Some(first) = states.first() {
        if let Some(i) = states.iter().position(|s| s.qubits() != first.qubits()) {
            return Err(CliError::Usage(format!("mixed kinds: {} is {}-qubit, {} is {}-qubit", names[0], first.qubits(), names[i], states[i].qubits())));
        }
    }
    let prints: Vec<Fingerprint> = states.iter().map(|s| fingerprint_of(s, knobs.depth)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut inconclusive: Vec<(usize, usize, String)> = Vec::new();
    for i in 0..states.len() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let mut joins = true;
            for &j in class.iter() {
                if fingerprints_equal(&prints[j], &prints[i], knobs.tol)?.is_some() {
                    joins = false;
                    break;
                }
                match decide(&states[j], &states[i], &knobs)? {
                    Verdict::Equivalent(_) => {}
                    Verdict::Inconclusive(reason) => {
                        inconclusive.push((j, i, reason));
                        joins = false;
                        break;
                    }
                    Verdict::NotEquivalent(_) => {
                        joins = false;
                        break;
                    }
                }
            }
            if joins {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    let mut out = String::new();
    writeln!(out, "{}", knobs.header()).unwrap();
    writeln!(out, "files: {}", states.len()).unwrap();
    writeln!(out, "classes: {}", classes.len()).unwrap();
    for (k, class) in classes.iter().enumerate() {
        let members: Vec<&str> = class.iter().map(|&i| names[i].as_str()).collect();
        writeln!(out, "class {} ({}): {}", k + 1, class.len(), members.join(" ")).unwrap();
    }
    if !inconclusive.is_empty() {
        writeln!(out, "inconclusive edges: {}", inconclusive.len()).unwrap();
        for (a, b, reason) in &inconclusive {
            writeln!(out, "  {} -- {}: {}", names[*a], names[*b], reason).unwrap();
        }
    }
    emit(&out);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Fingerprint { file, knobs, json, .. } => cmd_fingerprint(&file, knobs, json),
        Command::Equiv { file_a, file_b, knobs, witness } => cmd_equiv(&file_a, &file_b, knobs, witness),
        Command::Gen { kind, qubits, seed, out } => cmd_gen(kind, qubits, seed, &out),
        Command::Classify { dir, knobs } => cmd_classify(&dir, knobs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("luinv: {e}");
            ExitCode::from(e.code())
        }
    }
}
