//! Backtracking search without an oracle. Choices are tried in a fixed order
//! (or-left first, successors and delays ascending) and every rule
//! application is charged to the budget, abandoned branches included.

use std::collections::{BTreeMap, HashMap, HashSet};

use mucalc_formula::{Fix, Formula};
use mucalc_lattice::set;
use mucalc_models::{Model, Valuation};
use mucalc_tableau::{
    check_success, dependency_relations, ForallWitness, LeafVerdict, Mode, Node, RuleApp, Sequent, Tableau,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{fresh_constant, Refutation, SearchError, SearchOutcome, SearchResult, SearchStats};

struct OutOfBudget;

struct Explorer<'a> {
    model: &'a Model,
    v: &'a Valuation,
    mode: Mode,
    budget: usize,
    stats: SearchStats,
    /// Failed goals, keyed by sequent and the Un ancestors that decide
    /// which constant leaves are terminal.
    failed: HashSet<String>,
    first_failure: Option<(usize, Sequent)>,
    rng: Option<ChaCha8Rng>,
}

/// Every combination of one option per row, first row varying slowest.
fn product<T: Clone>(rows: &[Vec<T>]) -> impl Iterator<Item = Vec<T>> + '_ {
    let mut idx = vec![0; rows.len()];
    let mut done = rows.iter().any(|r| r.is_empty());
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = idx.iter().zip(rows).map(|(&i, r)| r[i].clone()).collect();
        done = true;
        for k in (0..rows.len()).rev() {
            idx[k] += 1;
            if idx[k] < rows[k].len() {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        Some(out)
    })
}

impl Explorer<'_> {
    fn key(&self, t: &Tableau, n: usize) -> String {
        let seq = t.seq(n);
        let mut key = format!("{:?}|{}|", set::elems(&seq.states), seq.formula);
        for (u, body) in seq.dl.entries() {
            key.push_str(&format!("{u}={body};"));
        }
        for a in t.ancestors(n).filter(|&a| t.rule(a) == Some(&RuleApp::Un)) {
            key.push_str(&format!("|{}{:?}", t.seq(a).formula, set::elems(&t.seq(a).states)));
        }
        key
    }

    fn fail(&mut self, state: usize, seq: &Sequent) -> Result<bool, OutOfBudget> {
        if self.first_failure.is_none() {
            self.first_failure = Some((state, seq.clone()));
        }
        Ok(false)
    }

    fn apply(&mut self, t: &mut Tableau, n: usize, app: RuleApp) -> Result<Vec<usize>, OutOfBudget> {
        if self.stats.expanded >= self.budget {
            return Err(OutOfBudget);
        }
        self.stats.expanded += 1;
        if app == RuleApp::Un {
            let u = t.seq(n).constant().expect("Un on a constant").to_string();
            *self.stats.unfoldings.entry(u).or_insert(0) += 1;
        }
        Ok(t.expand(n, app, self.model).expect("explorer only builds valid applications"))
    }

    fn shuffle<T>(&mut self, xs: &mut [T]) {
        if let Some(rng) = &mut self.rng {
            xs.shuffle(rng);
        }
    }

    /// Tries each application in turn until one closes every child.
    fn alternatives(&mut self, t: &mut Tableau, n: usize, apps: impl Iterator<Item = RuleApp>) -> Result<bool, OutOfBudget> {
        for app in apps {
            let mark = t.len();
            let kids = self.apply(t, n, app)?;
            let mut ok = true;
            for c in kids {
                if !self.grow(t, c)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(true);
            }
            t.rollback(mark);
        }
        Ok(false)
    }

    fn grow(&mut self, t: &mut Tableau, n: usize) -> Result<bool, OutOfBudget> {
        let key = self.key(t, n);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let ok = match self.options(t, n) {
            Options::Close => true,
            Options::Fail(s) => self.fail(s, &t.seq(n).clone())?,
            Options::Apply(apps) => self.alternatives(t, n, apps.into_iter())?,
        };
        if !ok {
            self.failed.insert(key);
        }
        Ok(ok)
    }

    /// Depth-first over an agenda of open nodes, so that a μ-cycle found
    /// once a companion's subtree is finished backtracks into the choices
    /// made inside that subtree. Used with standard terminals.
    fn solve(&mut self, t: &mut Tableau, agenda: &mut Vec<Task>) -> Result<bool, OutOfBudget> {
        let Some(task) = agenda.pop() else {
            return Ok(true);
        };
        let ok = match task {
            Task::CheckMu(m) => match mu_cycle(t, self.model, m) {
                Some(cycle) => self.fail(cycle[0], &t.seq(m).clone())?,
                None => self.solve(t, agenda)?,
            },
            Task::Grow(n) => match self.options(t, n) {
                Options::Close => self.solve(t, agenda)?,
                Options::Fail(s) => self.fail(s, &t.seq(n).clone())?,
                Options::Apply(apps) => {
                    let mut ok = false;
                    for app in apps {
                        let mark = t.len();
                        let depth = agenda.len();
                        let check = app == RuleApp::Un && self.unfolds_mu(t, n);
                        let kids = self.apply(t, n, app)?;
                        if check {
                            agenda.push(Task::CheckMu(n));
                        }
                        agenda.extend(kids.into_iter().rev().map(Task::Grow));
                        if self.solve(t, agenda)? {
                            ok = true;
                            break;
                        }
                        agenda.truncate(depth);
                        t.rollback(mark);
                    }
                    ok
                }
            },
        };
        if !ok {
            agenda.push(task);
        }
        Ok(ok)
    }

    fn unfolds_mu(&self, t: &Tableau, n: usize) -> bool {
        let seq = t.seq(n);
        matches!(seq.constant().and_then(|u| seq.dl.get(u)), Some(Formula::Fix(Fix::Mu, ..)))
    }

    /// What can be done at leaf `n`: close it, give up on it, or apply one
    /// of several rule applications in order of preference.
    fn options(&mut self, t: &Tableau, n: usize) -> Options {
        let seq = t.seq(n).clone();
        let states: Vec<usize> = seq.states.ones().collect();
        let model = self.model;
        let one = |app| Options::Apply(vec![app]);
        match &seq.formula {
            Formula::Var(z) if !seq.dl.contains(z) => {
                let vz = self.v.get(z);
                match states.iter().find(|&&s| !vz.contains(s)) {
                    Some(&s) => Options::Fail(s),
                    None => Options::Close,
                }
            }
            Formula::Not(a) => {
                let Formula::Var(z) = &**a else { unreachable!("positive normal form") };
                let vz = self.v.get(z);
                match states.iter().find(|&&s| vz.contains(s)) {
                    Some(&s) => Options::Fail(s),
                    None => Options::Close,
                }
            }
            Formula::Var(u) => {
                let fix = match seq.dl.get(u) {
                    Some(Formula::Fix(fix, ..)) => *fix,
                    _ => unreachable!("constants are bound to fixpoints"),
                };
                let terminal = t.companion_of(n).is_some()
                    && (self.mode == Mode::Standard || fix == Fix::Nu || seq.states.is_clear());
                if terminal {
                    Options::Close
                } else {
                    one(RuleApp::Un)
                }
            }
            Formula::And(..) => one(RuleApp::And),
            Formula::Box(..) => one(RuleApp::Box),
            Formula::Fix(..) => one(RuleApp::Sigma(fresh_constant(&seq.dl, &seq.formula))),
            Formula::Or(..) => {
                let mut rows: Vec<Vec<bool>> = states.iter().map(|_| vec![true, false]).collect();
                for r in &mut rows {
                    self.shuffle(r);
                }
                let size = model.len();
                Options::Apply(
                    product(&rows)
                        .map(|left| {
                            let l = set::from_elems(size, states.iter().zip(&left).filter(|(_, &b)| b).map(|(&s, _)| s));
                            let r = set::difference(&seq.states, &l);
                            RuleApp::Or(l, r)
                        })
                        .collect(),
                )
            }
            Formula::Diamond(k, _) => {
                let mut rows = Vec::new();
                for &s in &states {
                    let mut succ = model.successors(s, k);
                    if succ.is_empty() {
                        return Options::Fail(s);
                    }
                    self.shuffle(&mut succ);
                    rows.push(succ);
                }
                Options::Apply(
                    product(&rows)
                        .map(|w| RuleApp::Dia(states.iter().copied().zip(w).collect()))
                        .collect(),
                )
            }
            Formula::Exists(..) => {
                let bound = model.time_bound();
                let mut rows = Vec::new();
                for &s in &states {
                    let p = model.delay_profile(s);
                    // Delays with the same premises are interchangeable.
                    let mut seen = Vec::new();
                    let mut opts = Vec::new();
                    for d in p.delays_upto(bound) {
                        let outcome = (set::elems(&model.tsucc_lt(s, d)), model.tsucc(s, d));
                        if !seen.contains(&outcome) {
                            seen.push(outcome);
                            opts.push(d);
                        }
                    }
                    self.shuffle(&mut opts);
                    rows.push(opts);
                }
                Options::Apply(
                    product(&rows)
                        .map(|w| RuleApp::Exists(states.iter().copied().zip(w).collect()))
                        .collect(),
                )
            }
            Formula::Forall(..) => {
                // Per state, a set of release targets: each row releases at
                // the first target reached before its delay, else holds.
                let mut rows = Vec::new();
                for &s in &states {
                    let traj = model.delay_profile(s).trajectory.clone();
                    let mut opts: Vec<Vec<usize>> = set::all_subsets(traj.len())
                        .map(|sub| sub.ones().map(|i| traj[i]).collect())
                        .collect();
                    opts.sort_by_key(|r: &Vec<usize>| r.len());
                    self.shuffle(&mut opts);
                    rows.push(opts);
                }
                Options::Apply(
                    product(&rows)
                        .map(|targets| {
                            let policy: BTreeMap<usize, Vec<usize>> = states.iter().copied().zip(targets).collect();
                            let g = ForallWitness::tabulate(model, &seq.states, |s, d| {
                                let p = model.delay_profile(s);
                                (0..d)
                                    .find(|&r| p.tsucc(r).is_some_and(|x| policy[&s].contains(&x)))
                                    .unwrap_or(d)
                            });
                            RuleApp::Forall(g)
                        })
                        .collect(),
                )
            }
        }
    }
}

enum Options {
    Close,
    /// A leaf that cannot succeed, with a state to blame.
    Fail(usize),
    Apply(Vec<RuleApp>),
}

enum Task {
    Grow(usize),
    /// Companion check for a μ Un node once its subtree is closed.
    CheckMu(usize),
}

/// The subtableau rooted at `m`, renumbered.
fn subtree(t: &Tableau, m: usize) -> Tableau {
    let order: Vec<usize> = {
        let mut out = Vec::new();
        let mut stack = vec![m];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(t.children(n).iter().rev());
        }
        out
    };
    let id: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let nodes = order
        .iter()
        .map(|&n| {
            let node = t.node(n);
            Node {
                parent: if n == m { None } else { node.parent.map(|p| id[&p]) },
                children: node.children.iter().map(|c| id[c]).collect(),
                rule: node.rule.clone(),
                seq: node.seq.clone(),
            }
        })
        .collect();
    Tableau::from_nodes(nodes, 0)
}

/// A cycle in the companion relation of the finished Un node `m`. The
/// relation only looks below `m`, so the rest of the tableau may be open.
fn mu_cycle(t: &Tableau, model: &Model, m: usize) -> Option<Vec<usize>> {
    let sub = subtree(t, m);
    let shape = sub.shape(model, Mode::Standard);
    dependency_relations(&sub, model, &shape).companion(0).shortest_cycle()
}

pub(crate) fn prove(
    model: &Model,
    v: &Valuation,
    root: Sequent,
    mode: Mode,
    budget: usize,
    seed: u64,
) -> Result<SearchOutcome, SearchError> {
    let mut ex = Explorer {
        model,
        v,
        mode,
        budget,
        stats: SearchStats::default(),
        failed: HashSet::new(),
        first_failure: None,
        rng: (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut t = Tableau::new(root);
    let run = match mode {
        Mode::NuComplete => ex.grow(&mut t, 0),
        Mode::Standard => ex.solve(&mut t, &mut vec![Task::Grow(0)]),
    };
    let result = match run {
        Err(OutOfBudget) => SearchResult::BudgetExceeded,
        Ok(false) => {
            let (state, leaf) = ex.first_failure.clone().expect("a failed search meets a failing leaf");
            SearchResult::Refuted(Refutation::Leaf { state, leaf })
        }
        Ok(true) => {
            let verdict = check_success(&t, model, v, mode);
            if verdict.success {
                SearchResult::Proved(t)
            } else if !verdict.errors.is_empty() {
                return Err(SearchError::Internal(format!("search built an invalid tableau: {:?}", verdict.errors)));
            } else {
                // Standard terminals close μ-leaves without looking at
                // cycles; report the first cyclic leaf.
                let (leaf, state) = verdict
                    .leaves
                    .iter()
                    .find_map(|(n, lv)| match lv {
                        LeafVerdict::MuCycle { cycle, .. } => Some((*n, cycle[0])),
                        _ => None,
                    })
                    .expect("only μ-leaves can fail here");
                SearchResult::Refuted(Refutation::Leaf {
                    state,
                    leaf: t.seq(leaf).clone(),
                })
            }
        }
    };
    Ok(SearchOutcome {
        result,
        stats: ex.stats,
        mode,
    })
}

