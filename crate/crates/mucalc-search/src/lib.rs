//! Proof search. Three strategies build candidate tableaux; every tableau
//! returned as proved has passed `check_success` in the strategy's mode.

mod explore;
mod evalgame;
pub mod game;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use mucalc_formula::{check_well_formed, is_pnf, DefinitionList, Formula};
use mucalc_models::{Model, StateSet, Valuation};
use mucalc_semantics::{extend_valuation, EvalError};
use mucalc_tableau::{Mode, RuleApp, Sequent, Shape, Tableau};

pub use evalgame::{positions, EvalGame, Kind, Position};
pub use mucalc_tableau::{replay, Replay};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    OracleTnf,
    NuComplete,
    NaiveSubset,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::OracleTnf => "oracle-tnf",
            Strategy::NuComplete => "nu-complete",
            Strategy::NaiveSubset => "naive-subset",
        }
    }

    /// Checking mode of the tableaux the strategy builds.
    pub fn mode(self) -> Mode {
        match self {
            Strategy::NuComplete => Mode::NuComplete,
            _ => Mode::Standard,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        match s {
            "oracle-tnf" => Ok(Strategy::OracleTnf),
            "nu-complete" => Ok(Strategy::NuComplete),
            "naive-subset" => Ok(Strategy::NaiveSubset),
            _ => Err(format!("unknown strategy `{s}` (oracle-tnf, nu-complete, naive-subset)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Rule applications allowed; `None` means 10·|states|·|subformulas|.
    pub budget: Option<usize>,
    /// 0 keeps the fixed orderings; anything else shuffles the choices of
    /// the backtracking strategies.
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(strategy: Strategy) -> SearchConfig {
        SearchConfig {
            strategy,
            ..SearchConfig::default()
        }
    }

    pub fn with_budget(mut self, budget: usize) -> SearchConfig {
        self.budget = Some(budget);
        self
    }
}

pub fn default_budget(model: &Model, phi: &Formula) -> usize {
    10 * model.len().max(1) * phi.subformulas().len()
}

#[derive(Clone, Debug)]
pub enum Refutation {
    /// The oracle puts `state` outside the formula's denotation.
    OracleInvalid { state: usize },
    /// Search ran out of choices; `leaf` is the first failing leaf met.
    Leaf { state: usize, leaf: Sequent },
}

impl Refutation {
    pub fn state(&self) -> usize {
        match self {
            Refutation::OracleInvalid { state } | Refutation::Leaf { state, .. } => *state,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchResult {
    Proved(Tableau),
    Refuted(Refutation),
    BudgetExceeded,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Rule applications, abandoned branches included.
    pub expanded: usize,
    /// Un applications per constant, abandoned branches included.
    pub unfoldings: BTreeMap<String, usize>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub result: SearchResult,
    pub stats: SearchStats,
    pub mode: Mode,
}

impl SearchOutcome {
    pub fn tableau(&self) -> Option<&Tableau> {
        match &self.result {
            SearchResult::Proved(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// A constructed tableau failed re-verification.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Searches for a successful tableau for `S ⊢ phi`.
pub fn prove(model: &Model, v: &Valuation, s: &StateSet, phi: &Formula, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    check_well_formed(phi).map_err(|e| SearchError::Precondition(e.to_string()))?;
    if !is_pnf(phi) {
        return Err(SearchError::Precondition("formula is not in positive normal form".into()));
    }
    if s.len() != model.len() || v.carrier_size() != model.len() {
        return Err(SearchError::Precondition("state set or valuation over the wrong carrier".into()));
    }
    if phi.is_timed() && !model.is_timed() {
        return Err(SearchError::Precondition("timed formula on an untimed model".into()));
    }
    if cfg.budget == Some(0) {
        return Err(SearchError::Precondition("budget must be positive".into()));
    }
    let root = Sequent::new(s.clone(), DefinitionList::new(), phi.clone());
    match cfg.strategy {
        Strategy::OracleTnf => oracle::prove(model, v, root),
        strategy => {
            let budget = cfg.budget.unwrap_or_else(|| default_budget(model, phi));
            // The agenda search recurses once per applied rule.
            std::thread::scope(|scope| {
                std::thread::Builder::new()
                    .stack_size(SEARCH_STACK)
                    .spawn_scoped(scope, || explore::prove(model, v, root, strategy.mode(), budget, cfg.seed))
                    .map_err(|e| SearchError::Internal(format!("cannot start search thread: {e}")))?
                    .join()
                    .unwrap_or_else(|p| std::panic::resume_unwind(p))
            })
        }
    }
}

const SEARCH_STACK: usize = 1 << 30;

/// `U#k` for the least `k ≥ |Δ| + 1` unused by `Δ` and `phi`; a function of
/// `(phi, Δ)` only.
pub fn fresh_constant(dl: &DefinitionList, phi: &Formula) -> String {
    let used = phi.all_vars();
    (dl.len() + 1..)
        .map(|k| format!("U#{k}"))
        .find(|u| !dl.contains(u) && !used.contains(u))
        .expect("unbounded counter")
}

/// A valuation consistent with `t`: each companion variable `Z_m` denotes
/// the constant unfolded at `m` under `m`'s definition list.
pub fn consistent_valuation(
    t: &Tableau,
    shape: &Shape,
    model: &Model,
    v: &Valuation,
) -> Result<Valuation, EvalError> {
    let vars = mucalc_tableau::companion_vars(t, shape);
    let mut out = v.clone();
    for (&m, z) in &vars {
        let seq = t.seq(m);
        let u = seq.constant().expect("companion nodes carry constants");
        let ext = extend_valuation(v, &seq.dl, model)?;
        out.set(z.clone(), ext.get(u));
    }
    Ok(out)
}

/// Un nodes per constant in `t`.
pub fn unfoldings(t: &Tableau) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for n in 0..t.len() {
        if t.rule(n) == Some(&RuleApp::Un) {
            let u = t.seq(n).constant().expect("Un applies to constants");
            *out.entry(u.to_string()).or_insert(0) += 1;
        }
    }
    out
}
