use std::collections::HashMap;
use std::fmt;

use mucalc_formula::Labels;
use mucalc_lattice::set::{self, Set};

use crate::delay::DelayProfile;

/// Subset of a model's states, by dense state id.
pub type StateSet = Set;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Lts,
    Tts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    Dia,
    Box,
}

/// Finite transition system. States and actions are interned to dense ids in
/// declaration order; names are kept for output.
#[derive(Clone, Debug)]
pub struct Model {
    kind: ModelKind,
    states: Vec<String>,
    alphabet: Vec<String>,
    state_ids: HashMap<String, usize>,
    action_ids: HashMap<String, usize>,
    trans: Vec<(usize, usize, usize)>,
    // succ[s] lists (action, target), sorted.
    succ: Vec<Vec<(usize, usize)>>,
    tick: Vec<Option<usize>>,
    profiles: Vec<DelayProfile>,
    raw_delays: Option<Vec<(usize, usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("action `{0}` is not in the alphabet")]
    UndeclaredAction(String),
    #[error("duplicate tick row for `{0}`")]
    DuplicateTick(String),
    #[error("tick rows are only allowed in tts models")]
    TickInLts,
}

impl Model {
    /// Builds a model from names. `alphabet` defaults to the actions seen in
    /// `trans`, in order of first appearance.
    pub fn build(
        kind: ModelKind,
        states: &[&str],
        alphabet: Option<&[&str]>,
        trans: &[(&str, &str, &str)],
        tick: &[(&str, &str)],
    ) -> Result<Model, BuildError> {
        let mut b = Builder::new(kind);
        for s in states {
            b.state(s)?;
        }
        if let Some(acts) = alphabet {
            for a in acts {
                b.action(a)?;
            }
            b.closed_alphabet = true;
        }
        for (s, a, t) in trans {
            b.transition(s, a, t)?;
        }
        for (s, t) in tick {
            b.tick(s, t)?;
        }
        Ok(b.finish())
    }

    pub fn lts(states: &[&str], trans: &[(&str, &str, &str)]) -> Model {
        Model::build(ModelKind::Lts, states, None, trans, &[]).expect("well-formed lts")
    }

    pub fn tts(states: &[&str], trans: &[(&str, &str, &str)], tick: &[(&str, &str)]) -> Model {
        Model::build(ModelKind::Tts, states, None, trans, tick).expect("well-formed tts")
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn is_timed(&self) -> bool {
        self.kind == ModelKind::Tts
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.state_ids.get(name).copied()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn action_id(&self, name: &str) -> Option<usize> {
        self.action_ids.get(name).copied()
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.trans
    }

    pub fn tick(&self, s: usize) -> Option<usize> {
        self.tick[s]
    }

    pub fn raw_delays(&self) -> Option<&[(usize, usize, usize)]> {
        self.raw_delays.as_deref()
    }

    pub(crate) fn set_raw_delays(&mut self, rows: Vec<(usize, usize, usize)>) {
        self.raw_delays = Some(rows);
    }

    pub fn all_states(&self) -> StateSet {
        set::full(self.len())
    }

    pub fn no_states(&self) -> StateSet {
        set::empty(self.len())
    }

    /// Bit mask over the alphabet of the actions a label set denotes.
    /// Names outside the alphabet are ignored.
    pub fn actions(&self, k: &Labels) -> Vec<bool> {
        (0..self.alphabet.len()).map(|a| k.contains(&self.alphabet[a])).collect()
    }

    /// `{t | s -K-> t}`, ascending.
    pub fn successors(&self, s: usize, k: &Labels) -> Vec<usize> {
        let acts = self.actions(k);
        self.successors_by(s, &acts)
    }

    fn successors_by(&self, s: usize, acts: &[bool]) -> Vec<usize> {
        let mut out: Vec<usize> = self.succ[s].iter().filter(|(a, _)| acts[*a]).map(|&(_, t)| t).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn has_transition(&self, s: usize, k: &Labels, t: usize) -> bool {
        self.succ[s].iter().any(|&(a, u)| u == t && k.contains(&self.alphabet[a]))
    }

    /// Predecessor sets: `dia` gives the states with some K-successor in
    /// `target`, `box` those whose K-successors all lie in `target`.
    pub fn pred(&self, mode: Modality, k: &Labels, target: &StateSet) -> StateSet {
        let acts = self.actions(k);
        set::from_elems(
            self.len(),
            (0..self.len()).filter(|&s| {
                let mut succ = self.succ[s].iter().filter(|(a, _)| acts[*a]).map(|&(_, t)| t);
                match mode {
                    Modality::Dia => succ.any(|t| target.contains(t)),
                    Modality::Box => succ.all(|t| target.contains(t)),
                }
            }),
        )
    }

    pub fn pred_dia(&self, k: &Labels, target: &StateSet) -> StateSet {
        self.pred(Modality::Dia, k, target)
    }

    pub fn pred_box(&self, k: &Labels, target: &StateSet) -> StateSet {
        self.pred(Modality::Box, k, target)
    }

    pub fn delay_profile(&self, s: usize) -> &DelayProfile {
        &self.profiles[s]
    }

    /// `tsucc(s, δ)`: the state reached after delay δ, if the delay is possible.
    pub fn tsucc(&self, s: usize, delta: usize) -> Option<usize> {
        self.profiles[s].tsucc(delta)
    }

    /// `tsucc_<(s, δ) = {tsucc(s, δ') | δ' < δ}`.
    pub fn tsucc_lt(&self, s: usize, delta: usize) -> StateSet {
        set::from_elems(self.len(), self.profiles[s].reach_prefix(delta))
    }

    /// Delay bound for timed quantifiers. Prefix sets stop growing after
    /// |S| steps and every trajectory period is at most |S|, so delays up to
    /// 2|S| already realize every (prefix set, target) pair.
    pub fn time_bound(&self) -> usize {
        2 * self.len()
    }

    pub fn format_states(&self, s: &StateSet) -> String {
        let names: Vec<&str> = s.ones().map(|x| self.state_name(x)).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Parses `all`, or a comma/space separated list of state names.
    pub fn parse_states(&self, text: &str) -> Result<StateSet, BuildError> {
        if text.trim() == "all" {
            return Ok(self.all_states());
        }
        let mut s = self.no_states();
        for name in text.split([',', ' ']).filter(|w| !w.is_empty()) {
            s.insert(self.state_id(name).ok_or_else(|| BuildError::UndeclaredState(name.to_string()))?);
        }
        Ok(s)
    }
}

impl fmt::Display for Model {
    /// Model file text; loading it gives back an equal model.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ModelKind::Lts => "lts",
            ModelKind::Tts => "tts",
        };
        writeln!(f, "model: {kind}")?;
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        writeln!(f, "trans:")?;
        for &(s, a, t) in &self.trans {
            writeln!(f, "  {} {} {}", self.states[s], self.alphabet[a], self.states[t])?;
        }
        if self.kind == ModelKind::Tts {
            writeln!(f, "tick:")?;
            for (s, t) in self.tick.iter().enumerate() {
                if let Some(t) = t {
                    writeln!(f, "  {} {}", self.states[s], self.states[*t])?;
                }
            }
        }
        if let Some(rows) = &self.raw_delays {
            writeln!(f, "delays:")?;
            for &(s, d, t) in rows {
                writeln!(f, "  {} {} {}", self.states[s], d, self.states[t])?;
            }
        }
        Ok(())
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Model) -> bool {
        self.kind == other.kind
            && self.states == other.states
            && self.alphabet == other.alphabet
            && self.trans == other.trans
            && self.tick == other.tick
            && self.raw_delays == other.raw_delays
    }
}

impl Eq for Model {}

pub(crate) struct Builder {
    kind: ModelKind,
    states: Vec<String>,
    alphabet: Vec<String>,
    state_ids: HashMap<String, usize>,
    action_ids: HashMap<String, usize>,
    pub(crate) closed_alphabet: bool,
    trans: Vec<(usize, usize, usize)>,
    tick: Vec<Option<usize>>,
}

impl Builder {
    pub(crate) fn new(kind: ModelKind) -> Builder {
        Builder {
            kind,
            states: Vec::new(),
            alphabet: Vec::new(),
            state_ids: HashMap::new(),
            action_ids: HashMap::new(),
            closed_alphabet: false,
            trans: Vec::new(),
            tick: Vec::new(),
        }
    }

    pub(crate) fn state(&mut self, name: &str) -> Result<(), BuildError> {
        if self.state_ids.insert(name.to_string(), self.states.len()).is_some() {
            return Err(BuildError::DuplicateState(name.to_string()));
        }
        self.states.push(name.to_string());
        self.tick.push(None);
        Ok(())
    }

    pub(crate) fn action(&mut self, name: &str) -> Result<usize, BuildError> {
        if self.action_ids.contains_key(name) {
            return Err(BuildError::DuplicateAction(name.to_string()));
        }
        self.action_ids.insert(name.to_string(), self.alphabet.len());
        self.alphabet.push(name.to_string());
        Ok(self.alphabet.len() - 1)
    }

    pub(crate) fn state_id(&self, name: &str) -> Result<usize, BuildError> {
        self.state_ids.get(name).copied().ok_or_else(|| BuildError::UndeclaredState(name.to_string()))
    }

    pub(crate) fn transition(&mut self, s: &str, a: &str, t: &str) -> Result<(), BuildError> {
        let (s, t) = (self.state_id(s)?, self.state_id(t)?);
        let a = match self.action_ids.get(a) {
            Some(&a) => a,
            None if self.closed_alphabet => return Err(BuildError::UndeclaredAction(a.to_string())),
            None => self.action(a)?,
        };
        self.trans.push((s, a, t));
        Ok(())
    }

    pub(crate) fn tick(&mut self, s: &str, t: &str) -> Result<(), BuildError> {
        if self.kind != ModelKind::Tts {
            return Err(BuildError::TickInLts);
        }
        let (si, ti) = (self.state_id(s)?, self.state_id(t)?);
        if self.tick[si].replace(ti).is_some() {
            return Err(BuildError::DuplicateTick(s.to_string()));
        }
        Ok(())
    }

    pub(crate) fn finish(mut self) -> Model {
        self.trans.sort_unstable();
        self.trans.dedup();
        let n = self.states.len();
        let mut succ = vec![Vec::new(); n];
        for &(s, a, t) in &self.trans {
            succ[s].push((a, t));
        }
        let profiles = (0..n).map(|s| DelayProfile::from_tick(&self.tick, s)).collect();
        Model {
            kind: self.kind,
            states: self.states,
            alphabet: self.alphabet,
            state_ids: self.state_ids,
            action_ids: self.action_ids,
            trans: self.trans,
            succ,
            tick: self.tick,
            profiles,
            raw_delays: None,
        }
    }
}
