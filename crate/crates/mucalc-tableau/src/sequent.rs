use std::collections::BTreeMap;

use mucalc_formula::{is_pnf, is_positive, subst1, DefinitionList, Formula};
use mucalc_lattice::set;
use mucalc_models::{Horizon, Model, StateSet};

/// `S ⊢_Δ Φ`.
#[derive(Clone, Debug)]
pub struct Sequent {
    pub states: StateSet,
    pub dl: DefinitionList,
    pub formula: Formula,
}

impl Sequent {
    pub fn new(states: StateSet, dl: DefinitionList, formula: Formula) -> Sequent {
        Sequent { states, dl, formula }
    }

    /// Exact equality: state sets, constant names and formulas compared
    /// syntactically (bound names included).
    pub fn same_as(&self, other: &Sequent) -> bool {
        self.states == other.states
            && self.formula.syntactically_equal(&other.formula)
            && self.dl.len() == other.dl.len()
            && self
                .dl
                .entries()
                .iter()
                .zip(other.dl.entries())
                .all(|((u, a), (w, b))| u == w && a.syntactically_equal(b))
    }

    /// Formula in positive normal form; every constant of the definition
    /// list positive and unbound in it.
    pub fn check(&self, model: &Model) -> Result<(), String> {
        if self.states.len() != model.len() {
            return Err(format!("state set over {} states, model has {}", self.states.len(), model.len()));
        }
        if !is_pnf(&self.formula) {
            return Err(format!("`{}` is not in positive normal form", self.formula));
        }
        let bound = self.formula.bound_vars();
        for u in self.dl.domain() {
            if bound.contains(u) {
                return Err(format!("constant {u} is bound in `{}`", self.formula));
            }
            if !is_positive(u, &self.formula) {
                return Err(format!("constant {u} occurs negatively in `{}`", self.formula));
            }
        }
        Ok(())
    }

    /// The constant `U` when the formula is a variable defined by the list.
    pub fn constant(&self) -> Option<&str> {
        match &self.formula {
            Formula::Var(u) if self.dl.contains(u) => Some(u),
            _ => None,
        }
    }
}

/// Witness `g` of a ∀ application: one row per `(s, δ)` with `δ ≤ 2|S|`
/// allowed from `s`, plus the trajectory period of every periodic state.
///
/// Larger delays follow the table periodically: `δ` is folded down by the
/// period into `(2|S| - p, 2|S|]`; a folded row released early keeps its
/// release delay, any other row maps `δ` to itself. Folded delays are past
/// every trajectory prefix, so `tsucc(s, g(s, δ))` never leaves the states
/// the table already reaches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForallWitness {
    pub table: BTreeMap<(usize, usize), usize>,
    pub periods: BTreeMap<usize, usize>,
}

impl ForallWitness {
    /// Tabulates `g` over the delays the rule requires for `states`.
    pub fn tabulate(model: &Model, states: &StateSet, mut g: impl FnMut(usize, usize) -> usize) -> ForallWitness {
        let mut w = ForallWitness::default();
        for s in states.ones() {
            let p = model.delay_profile(s);
            for d in p.delays_upto(model.time_bound()) {
                w.table.insert((s, d), g(s, d));
            }
            if let Some(period) = p.period() {
                w.periods.insert(s, period);
            }
        }
        w
    }

    /// `g(s, δ)` including the periodic extension.
    pub fn value(&self, model: &Model, s: usize, delta: usize) -> Option<usize> {
        let bound = model.time_bound();
        if delta <= bound {
            return self.table.get(&(s, delta)).copied();
        }
        let p = *self.periods.get(&s)?;
        let folded = delta - p * (delta - bound).div_ceil(p);
        let g = *self.table.get(&(s, folded))?;
        Some(if g < folded { g } else { delta })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleApp {
    And,
    /// Split `S = S1 ∪ S2`.
    Or(StateSet, StateSet),
    Box,
    /// Successor chosen for every state.
    Dia(BTreeMap<usize, usize>),
    /// Name of the fresh constant.
    Sigma(String),
    Un,
    /// Target superset.
    Thin(StateSet),
    /// Delay chosen for every state.
    Exists(BTreeMap<usize, usize>),
    Forall(ForallWitness),
}

impl RuleApp {
    pub fn name(&self) -> &'static str {
        match self {
            RuleApp::And => "and",
            RuleApp::Or(..) => "or",
            RuleApp::Box => "box",
            RuleApp::Dia(_) => "dia",
            RuleApp::Sigma(_) => "sigma",
            RuleApp::Un => "un",
            RuleApp::Thin(_) => "thin",
            RuleApp::Exists(_) => "exists",
            RuleApp::Forall(_) => "forall",
        }
    }

    /// Rules whose local dependency is not the identity.
    pub fn is_modal(&self) -> bool {
        matches!(self, RuleApp::Box | RuleApp::Dia(_) | RuleApp::Exists(_) | RuleApp::Forall(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule `{rule}` does not apply to `{formula}`")]
    Shape { rule: &'static str, formula: String },
    #[error("side condition of `{rule}` fails: {detail}")]
    SideCondition { rule: &'static str, detail: String },
    #[error("timed rule `{0}` on an untimed model")]
    Untimed(&'static str),
}

fn side(rule: &'static str, detail: String) -> RuleError {
    RuleError::SideCondition { rule, detail }
}

fn check_domain(rule: &'static str, model: &Model, states: &StateSet, keys: impl Iterator<Item = usize>) -> Result<(), RuleError> {
    let dom = set::from_elems(model.len(), keys.filter(|&s| s < model.len()));
    if &dom != states {
        return Err(side(
            rule,
            format!("witness covers {}, node has {}", model.format_states(&dom), model.format_states(states)),
        ));
    }
    Ok(())
}

/// Premises of `seq` under `app`, in child order.
pub fn apply_rule(seq: &Sequent, app: &RuleApp, model: &Model) -> Result<Vec<Sequent>, RuleError> {
    let rule = app.name();
    let n = model.len();
    let s = &seq.states;
    let dl = &seq.dl;
    let premise = |states: StateSet, formula: &Formula| Sequent::new(states, dl.clone(), formula.clone());
    let shape = || RuleError::Shape {
        rule,
        formula: seq.formula.to_string(),
    };
    match (app, &seq.formula) {
        (RuleApp::And, Formula::And(a, b)) => Ok(vec![premise(s.clone(), a), premise(s.clone(), b)]),
        (RuleApp::Or(s1, s2), Formula::Or(a, b)) => {
            if s1.len() != n || s2.len() != n || &set::union(s1, s2) != s {
                return Err(side(
                    rule,
                    format!("{} ∪ {} ≠ {}", model.format_states(s1), model.format_states(s2), model.format_states(s)),
                ));
            }
            Ok(vec![premise(s1.clone(), a), premise(s2.clone(), b)])
        }
        (RuleApp::Box, Formula::Box(k, a)) => {
            let succ = set::from_elems(n, s.ones().flat_map(|x| model.successors(x, k)));
            Ok(vec![premise(succ, a)])
        }
        (RuleApp::Dia(f), Formula::Diamond(k, a)) => {
            check_domain(rule, model, s, f.keys().copied())?;
            for (&x, &y) in f {
                if y >= n || !model.has_transition(x, k, y) {
                    let target = if y < n { model.state_name(y).to_string() } else { format!("#{y}") };
                    return Err(side(rule, format!("no {k}-transition {} -> {target}", model.state_name(x))));
                }
            }
            Ok(vec![premise(set::from_elems(n, f.values().copied()), a)])
        }
        (RuleApp::Sigma(u), phi @ Formula::Fix(..)) => {
            if phi.all_vars().contains(u) {
                return Err(side(rule, format!("constant {u} is not fresh for `{phi}`")));
            }
            let dl2 = dl.append(u, phi.clone()).map_err(|e| side(rule, e.to_string()))?;
            Ok(vec![Sequent::new(s.clone(), dl2, Formula::var(u))])
        }
        (RuleApp::Un, Formula::Var(u)) => match dl.get(u) {
            Some(Formula::Fix(_, z, body)) => Ok(vec![premise(s.clone(), &subst1(body, z, &Formula::var(u)))]),
            _ => Err(shape()),
        },
        (RuleApp::Thin(t), phi) => {
            if t.len() != n || !s.is_subset(t) {
                return Err(side(rule, format!("{} ⊄ {}", model.format_states(s), model.format_states(t))));
            }
            Ok(vec![premise(t.clone(), phi)])
        }
        (RuleApp::Exists(f), Formula::Exists(a, b)) => {
            if !model.is_timed() {
                return Err(RuleError::Untimed(rule));
            }
            check_domain(rule, model, s, f.keys().copied())?;
            let (mut lt, mut eq) = (set::empty(n), set::empty(n));
            for (&x, &d) in f {
                let Some(y) = model.tsucc(x, d) else {
                    return Err(side(rule, format!("delay {d} not allowed from {}", model.state_name(x))));
                };
                lt.union_with(&model.tsucc_lt(x, d));
                eq.insert(y);
            }
            Ok(vec![premise(lt, a), premise(eq, b)])
        }
        (RuleApp::Forall(g), Formula::Forall(a, b)) => {
            if !model.is_timed() {
                return Err(RuleError::Untimed(rule));
            }
            let bound = model.time_bound();
            let expected: Vec<(usize, usize)> = s
                .ones()
                .flat_map(|x| model.delay_profile(x).delays_upto(bound).map(move |d| (x, d)))
                .collect();
            if !g.table.keys().copied().eq(expected.iter().copied()) {
                let missing = expected.iter().find(|k| !g.table.contains_key(k));
                let extra = g.table.keys().find(|k| !expected.contains(k));
                let detail = match (missing, extra) {
                    (Some(&(x, d)), _) => format!("no row for {} at delay {d}", model.state_name(x)),
                    (_, Some(&(x, d))) => format!("unexpected row ({x}, {d})"),
                    _ => "rows out of order".to_string(),
                };
                return Err(side(rule, detail));
            }
            let periods: BTreeMap<usize, usize> = s
                .ones()
                .filter_map(|x| match model.delay_profile(x).horizon {
                    Horizon::Periodic { period, .. } => Some((x, period)),
                    Horizon::Finite { .. } => None,
                })
                .collect();
            if periods != g.periods {
                return Err(side(rule, "period annotation disagrees with the model".to_string()));
            }
            let (mut lt, mut eq) = (set::empty(n), set::empty(n));
            for (&(x, d), &r) in &g.table {
                if r > d {
                    return Err(side(rule, format!("g({}, {d}) = {r} exceeds the delay", model.state_name(x))));
                }
                let y = model.tsucc(x, r).expect("r ≤ d and d is allowed");
                if r < d {
                    lt.insert(y);
                } else {
                    eq.insert(y);
                }
            }
            Ok(vec![premise(lt, a), premise(eq, b)])
        }
        _ => Err(shape()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mucalc_formula::parse_formula;

    fn t1() -> Model {
        Model::tts(&["t0", "t1", "t2"], &[("t2", "a", "t0")], &[("t0", "t1"), ("t1", "t2"), ("t2", "t2")])
    }

    #[test]
    fn forall_extension_folds_by_period() {
        let m = t1();
        let s = set::singleton(3, 2);
        let w = ForallWitness::tabulate(&m, &s, |_, d| if d >= 4 { 4 } else { d });
        assert_eq!(w.periods.get(&2), Some(&1));
        assert_eq!(w.value(&m, 2, 6), Some(4));
        assert_eq!(w.value(&m, 2, 100), Some(4));
        let id = ForallWitness::tabulate(&m, &s, |_, d| d);
        assert_eq!(id.value(&m, 2, 100), Some(100));
    }

    #[test]
    fn sigma_requires_fresh_constant() {
        let m = Model::lts(&["s0"], &[]);
        let seq = Sequent::new(set::full(1), DefinitionList::new(), parse_formula("nu Z. U && Z").unwrap());
        assert!(matches!(apply_rule(&seq, &RuleApp::Sigma("U".into()), &m), Err(RuleError::SideCondition { .. })));
    }
}
