//! Batch front end: proof search with certificate replay, replay of stored
//! certificates, the semantic oracle, dependency export, the property
//! self-checks and formula normalization.

pub mod selfcheck;
pub mod suites;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mucalc_formula::{check_well_formed, parse_formula, to_pnf, Formula};
use mucalc_lattice::FiniteRelation;
use mucalc_models::{load_model, load_valuation, Model, Valuation};
use mucalc_search::{default_budget, prove, Refutation, SearchConfig, SearchError, SearchResult, Strategy};
use mucalc_semantics::{eval, unbound_free_vars};
use mucalc_tableau::{analyze, emit_certificate, parse_certificate, replay, CertError, LeafVerdict, Replay};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mucalc", version, about = "Tableau proofs for timed and untimed mu-calculus sequents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search for a proof of `S |- F`, then replay the emitted certificate.
    Check(CheckArgs),
    /// Replay a stored certificate.
    Verify(VerifyArgs),
    /// Print the denotation of a formula.
    Oracle(OracleArgs),
    /// Export the dependency relations of a certificate as an edge list.
    Deps(DepsArgs),
    /// Run the lattice and semantics property suites.
    Selfcheck(SelfcheckArgs),
    /// Parse a formula and print its positive normal form.
    Fmt(FmtArgs),
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Model file, or one of the built-in models `l1`, `chain`, `t1`.
    #[arg(long)]
    pub model: String,
    /// Valuation file with lines `<Var>: s0 s1 ...`.
    #[arg(long)]
    pub valuation: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Formula text, e.g. `nu Z. <a>Z && [*]P`.
    #[arg(long)]
    pub formula: String,
    /// Comma separated state names, or `all`.
    #[arg(long, default_value = "all")]
    pub states: String,
    /// `oracle-tnf`, `nu-complete` or `naive-subset`.
    #[arg(long, default_value = "oracle-tnf")]
    pub strategy: Strategy,
    /// Rule applications allowed to the backtracking strategies.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Nonzero seeds shuffle the choices of the backtracking strategies.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the certificate of a proof here.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub cert: PathBuf,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub formula: String,
}

#[derive(Args, Debug)]
pub struct DepsArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Small,
    Full,
}

#[derive(Args, Debug)]
pub struct SelfcheckArgs {
    #[arg(long, value_enum, default_value = "small")]
    pub scope: ScopeArg,
}

#[derive(Args, Debug)]
pub struct FmtArgs {
    #[arg(long)]
    pub formula: String,
}

/// A diagnostic and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

fn failed(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_FAILED,
        msg: msg.into(),
    }
}

/// Parses `args` (program name first) and runs the subcommand; returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let mut text = String::new();
    let mut warnings = String::new();
    let result = dispatch(cli.command, &mut text, &mut warnings);
    let _ = out.write_all(text.as_bytes());
    let _ = err.write_all(warnings.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut String, warn: &mut String) -> Result<i32, Failure> {
    match command {
        Command::Check(a) => check(&a, out, warn),
        Command::Verify(a) => verify(&a, out),
        Command::Oracle(a) => oracle(&a, out, warn),
        Command::Deps(a) => deps(&a, out),
        Command::Selfcheck(a) => {
            let scope = match a.scope {
                ScopeArg::Small => selfcheck::Scope::Small,
                ScopeArg::Full => selfcheck::Scope::Full,
            };
            let report = selfcheck::run(scope);
            out.push_str(&report.render());
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Fmt(a) => {
            let phi = formula_arg(&a.formula)?;
            let _ = writeln!(out, "{}", to_pnf(&phi));
            Ok(EXIT_OK)
        }
    }
}

/// `l1`: s0 -a-> s1 -a-> s1. `chain`: c0 -a-> c1 -a-> c2. `t1`: a timed
/// loop t0 -1-> t1 -1-> t2 -1-> t2 with t2 -a-> t0.
pub fn builtin_model(name: &str) -> Option<Model> {
    match name {
        "l1" => Some(Model::lts(&["s0", "s1"], &[("s0", "a", "s1"), ("s1", "a", "s1")])),
        "chain" => Some(Model::lts(&["c0", "c1", "c2"], &[("c0", "a", "c1"), ("c1", "a", "c2")])),
        "t1" => Some(Model::tts(
            &["t0", "t1", "t2"],
            &[("t2", "a", "t0")],
            &[("t0", "t1"), ("t1", "t2"), ("t2", "t2")],
        )),
        _ => None,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn model_arg(name: &str) -> Result<Model, Failure> {
    let path = Path::new(name);
    if path.exists() {
        return load_model(&read(path)?).map_err(|e| usage(format!("{name}: {e}")));
    }
    builtin_model(name).ok_or_else(|| usage(format!("no model file or built-in model `{name}` (built-ins: l1, chain, t1)")))
}

fn model_and_valuation(a: &ModelArgs) -> Result<(Model, Valuation), Failure> {
    let model = model_arg(&a.model)?;
    let v = match &a.valuation {
        Some(path) => load_valuation(&read(path)?, &model).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => Valuation::empty(&model),
    };
    Ok((model, v))
}

fn formula_arg(text: &str) -> Result<Formula, Failure> {
    let phi = parse_formula(text).map_err(|e| usage(e.to_string()))?;
    check_well_formed(&phi).map_err(|e| usage(format!("ill-formed formula: {e}")))?;
    Ok(phi)
}

fn warn_unbound(phi: &Formula, v: &Valuation, warn: &mut String) {
    for z in unbound_free_vars(phi, v) {
        let _ = writeln!(warn, "warning: free variable {z} has no value and denotes the empty set");
    }
}

fn check(a: &CheckArgs, out: &mut String, warn: &mut String) -> Result<i32, Failure> {
    let (model, v) = model_and_valuation(&a.model)?;
    let phi = to_pnf(&formula_arg(&a.formula)?);
    let states = model.parse_states(&a.states).map_err(|e| usage(e.to_string()))?;
    warn_unbound(&phi, &v, warn);
    let cfg = SearchConfig {
        strategy: a.strategy,
        budget: a.budget,
        seed: a.seed,
    };
    let outcome = prove(&model, &v, &states, &phi, &cfg).map_err(|e| match e {
        SearchError::Internal(msg) => failed(format!("internal: {msg}")),
        e => usage(e.to_string()),
    })?;
    let sequent = format!("{} |- {phi}", model.format_states(&states));
    match &outcome.result {
        SearchResult::Proved(t) => {
            let text = emit_certificate(t, &model, &v, outcome.mode);
            let replayed = replay(&text, &model, &v).map_err(|e| failed(format!("emitted certificate unreadable: {e}")))?;
            if !replayed.accepted() {
                return Err(failed(format!("emitted certificate rejected on replay: {}", rejection(&replayed, &model))));
            }
            if let Some(path) = &a.cert {
                std::fs::write(path, &text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let _ = writeln!(out, "VALID");
            let _ = writeln!(out, "  sequent: {sequent}");
            let _ = writeln!(
                out,
                "  proof: {} nodes, {} rule applications, strategy {}, certificate replayed",
                t.len(),
                outcome.stats.expanded,
                a.strategy
            );
            Ok(EXIT_OK)
        }
        SearchResult::Refuted(r) => {
            let _ = writeln!(out, "INVALID");
            let _ = writeln!(out, "  sequent: {sequent}");
            match r {
                Refutation::OracleInvalid { state } => {
                    let _ = writeln!(out, "  refuting state: {}", model.state_name(*state));
                }
                Refutation::Leaf { state, leaf } => {
                    let _ = writeln!(
                        out,
                        "  every {} tableau fails, first at state {} of leaf {} |-{} {}",
                        a.strategy,
                        model.state_name(*state),
                        model.format_states(&leaf.states),
                        dl_suffix(leaf),
                        leaf.formula
                    );
                }
            }
            Ok(EXIT_FAILED)
        }
        SearchResult::BudgetExceeded => {
            let budget = a.budget.unwrap_or_else(|| default_budget(&model, &phi));
            let _ = writeln!(out, "UNKNOWN");
            let _ = writeln!(out, "  sequent: {sequent}");
            let _ = writeln!(out, "  {} exhausted its budget of {budget} rule applications", a.strategy);
            Ok(EXIT_BUDGET)
        }
    }
}

fn dl_suffix(seq: &mucalc_tableau::Sequent) -> String {
    if seq.dl.is_empty() {
        String::new()
    } else {
        format!("[{}]", seq.dl)
    }
}

/// Why a replayed certificate is not accepted.
pub fn rejection(r: &Replay, model: &Model) -> String {
    let mut reasons = Vec::new();
    if r.digest_ok == Some(false) {
        reasons.push("digest does not match the certificate body".to_string());
    }
    reasons.extend(r.verdict.errors.iter().map(|e| e.to_string()));
    for (n, leaf) in r.verdict.failures() {
        reasons.push(match leaf {
            LeafVerdict::Success => continue,
            LeafVerdict::FreeFails { state } => format!("leaf {n}: free variable fails at {}", model.state_name(*state)),
            LeafVerdict::Diamond { state } => format!("leaf {n}: {} has no matching successor", model.state_name(*state)),
            LeafVerdict::MuCycle { companion, cycle } => {
                let names: Vec<&str> = cycle.iter().map(|&s| model.state_name(s)).collect();
                format!("leaf {n}: least-fixpoint cycle {} at companion {companion}", names.join(" <: "))
            }
        });
    }
    if reasons.is_empty() {
        reasons.push("unsuccessful tableau".to_string());
    }
    reasons.join("; ")
}

/// Replays `text`; `Ok` only for an accepted certificate.
pub fn verify_certificate(text: &str, model: &Model, v: &Valuation) -> Result<Replay, String> {
    let r = replay(text, model, v).map_err(|e: CertError| e.to_string())?;
    if r.accepted() {
        Ok(r)
    } else {
        Err(rejection(&r, model))
    }
}

fn verify(a: &VerifyArgs, out: &mut String) -> Result<i32, Failure> {
    let (model, v) = model_and_valuation(&a.model)?;
    let text = read(&a.cert)?;
    match verify_certificate(&text, &model, &v) {
        Ok(r) => {
            let _ = writeln!(out, "VERIFIED");
            let _ = writeln!(
                out,
                "  sequent: {} |- {} ({} mode)",
                model.format_states(&r.root.states),
                r.root.formula,
                match r.mode {
                    mucalc_tableau::Mode::Standard => "standard",
                    mucalc_tableau::Mode::NuComplete => "nu-complete",
                }
            );
            Ok(EXIT_OK)
        }
        Err(reason) => {
            let _ = writeln!(out, "REJECTED");
            let _ = writeln!(out, "  {reason}");
            Ok(EXIT_FAILED)
        }
    }
}

fn oracle(a: &OracleArgs, out: &mut String, warn: &mut String) -> Result<i32, Failure> {
    let (model, v) = model_and_valuation(&a.model)?;
    let phi = formula_arg(&a.formula)?;
    warn_unbound(&phi, &v, warn);
    let den = eval(&phi, &model, &v).map_err(|e| usage(e.to_string()))?;
    let _ = writeln!(out, "{}", model.format_states(&den));
    Ok(EXIT_OK)
}

fn deps(a: &DepsArgs, out: &mut String) -> Result<i32, Failure> {
    let model = model_arg(&a.model)?;
    let text = read(&a.cert)?;
    let cert = parse_certificate(&text, &model).map_err(|e| failed(format!("certificate rejected: {e}")))?;
    if cert.digest_ok == Some(false) {
        return Err(failed("certificate rejected: digest does not match the certificate body"));
    }
    let (shape, bundle) = analyze(&cert.tableau, &model, cert.mode).map_err(|errs| {
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        failed(format!("certificate rejected: {}", msgs.join("; ")))
    })?;
    let mut g = String::new();
    g.push_str("# relation node' node state' state\n");
    let mut edges = 0;
    let mut emit = |name: &str, key: (usize, usize), r: &FiniteRelation, g: &mut String| {
        for (x, y) in r.pairs() {
            let _ = writeln!(g, "{name} {} {} {} {}", key.0, key.1, model.state_name(x), model.state_name(y));
            edges += 1;
        }
    };
    for (name, map) in [
        ("local", &bundle.local),
        ("dep", &bundle.dep),
        ("extended", &bundle.extended),
        ("support", &bundle.support),
    ] {
        for (&key, r) in map {
            emit(name, key, r, &mut g);
        }
    }
    for &m in &shape.companions {
        emit("companion", (m, m), &bundle.companion(m), &mut g);
    }
    std::fs::write(&a.out, g).map_err(|e| usage(format!("cannot write {}: {e}", a.out.display())))?;
    let _ = writeln!(out, "wrote {edges} edges over {} nodes to {}", cert.tableau.len(), a.out.display());
    Ok(EXIT_OK)
}
