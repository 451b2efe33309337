//! Random instances for the differential suites. Every generator draws from a
//! caller-supplied RNG, so a seed fixes the whole instance.

use mucalc_formula::{DefinitionList, Fix, Formula, Labels};
use mucalc_lattice::set;
use mucalc_models::{Model, ModelKind, StateSet, Valuation};
use rand::seq::SliceRandom;
use rand::Rng;

pub const ACTIONS: [&str; 3] = ["a", "b", "c"];

#[derive(Clone, Copy, Debug)]
pub struct ModelParams {
    pub max_states: usize,
    pub actions: usize,
    /// Expected number of outgoing transitions per state.
    pub out_degree: f64,
    pub timed: bool,
    /// Probability that a state has a tick successor.
    pub tick_density: f64,
}

impl Default for ModelParams {
    fn default() -> ModelParams {
        ModelParams {
            max_states: 6,
            actions: 3,
            out_degree: 1.6,
            timed: false,
            tick_density: 0.8,
        }
    }
}

pub fn random_model(rng: &mut impl Rng, p: &ModelParams) -> Model {
    let n = rng.gen_range(1..=p.max_states);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let states: Vec<&str> = names.iter().map(String::as_str).collect();
    let acts = &ACTIONS[..p.actions];
    let prob = (p.out_degree / (n * acts.len()) as f64).min(1.0);
    let mut trans = Vec::new();
    for &s in &states {
        for &a in acts {
            for &t in &states {
                if rng.gen_bool(prob) {
                    trans.push((s, a, t));
                }
            }
        }
    }
    let mut tick = Vec::new();
    if p.timed {
        for &s in &states {
            if rng.gen_bool(p.tick_density) {
                tick.push((s, *states.choose(rng).unwrap()));
            }
        }
    }
    let kind = if p.timed { ModelKind::Tts } else { ModelKind::Lts };
    Model::build(kind, &states, Some(acts), &trans, &tick).expect("generated names are distinct")
}

pub fn random_states(rng: &mut impl Rng, model: &Model) -> StateSet {
    let density = rng.gen_range(0.2..1.0);
    set::from_elems(model.len(), (0..model.len()).filter(|_| rng.gen_bool(density)))
}

pub fn random_valuation(rng: &mut impl Rng, model: &Model, vars: &[&str]) -> Valuation {
    let mut v = Valuation::empty(model);
    for z in vars {
        let s = set::from_elems(model.len(), (0..model.len()).filter(|_| rng.gen_bool(0.5)));
        v.set(*z, s);
    }
    v
}

pub fn random_labels(rng: &mut impl Rng, actions: usize) -> Labels {
    let acts = &ACTIONS[..actions];
    match rng.gen_range(0..10) {
        0..=5 => Labels::of([*acts.choose(rng).unwrap()]),
        6 => Labels::All,
        7 => Labels::Except([acts.choose(rng).unwrap().to_string()].into()),
        _ => Labels::of(acts.choose_multiple(rng, 2.min(actions)).copied()),
    }
}

#[derive(Clone, Debug)]
pub struct FormulaParams {
    pub max_depth: usize,
    pub max_alternation: usize,
    pub actions: usize,
    /// Free variables available at leaves, possibly negated.
    pub free_vars: Vec<String>,
    pub timed: bool,
    /// Binder names drawn from; reuse across siblings and shadowing both
    /// occur.
    pub binders: Vec<String>,
}

impl Default for FormulaParams {
    fn default() -> FormulaParams {
        FormulaParams {
            max_depth: 5,
            max_alternation: 2,
            actions: 3,
            free_vars: Vec::new(),
            timed: false,
            binders: ["X", "Y", "Z"].map(String::from).to_vec(),
        }
    }
}

/// Well-formed formula in positive normal form with `depth() ≤ max_depth`
/// and alternation depth at most `max_alternation`.
pub fn random_formula(rng: &mut impl Rng, p: &FormulaParams) -> Formula {
    let depth = rng.gen_range(2..=p.max_depth.max(2));
    gen(rng, p, depth, &mut Vec::new(), None)
}

// `env` lists binders in scope; `kind` is (innermost fixpoint kind,
// alternation count so far).
fn gen(rng: &mut impl Rng, p: &FormulaParams, depth: usize, env: &mut Vec<String>, kind: Option<(Fix, usize)>) -> Formula {
    // tt and ff are fixpoints of depth 2, so leaves need two levels.
    if depth <= 2 {
        return leaf(rng, p, env);
    }
    let choice = rng.gen_range(0..if p.timed { 12 } else { 10 });
    match choice {
        0 => leaf(rng, p, env),
        1 => Formula::and(gen(rng, p, depth - 1, env, kind), gen(rng, p, depth - 1, env, kind)),
        2 => Formula::or(gen(rng, p, depth - 1, env, kind), gen(rng, p, depth - 1, env, kind)),
        3 | 4 => Formula::boxed(random_labels(rng, p.actions), gen(rng, p, depth - 1, env, kind)),
        5 | 6 => Formula::dia(random_labels(rng, p.actions), gen(rng, p, depth - 1, env, kind)),
        7..=9 => {
            let sigma = if rng.gen_bool(0.5) { Fix::Mu } else { Fix::Nu };
            let count = match kind {
                None => 1,
                Some((k, c)) if k == sigma => c,
                Some((_, c)) => c + 1,
            };
            let sigma = if count > p.max_alternation { kind.unwrap().0 } else { sigma };
            let count = count.min(p.max_alternation);
            let z = p.binders.choose(rng).unwrap().clone();
            env.push(z.clone());
            let body = gen(rng, p, depth - 1, env, Some((sigma, count)));
            env.pop();
            Formula::fix(sigma, z, body)
        }
        10 => Formula::forall(gen(rng, p, depth - 1, env, kind), gen(rng, p, depth - 1, env, kind)),
        _ => Formula::exists(gen(rng, p, depth - 1, env, kind), gen(rng, p, depth - 1, env, kind)),
    }
}

fn leaf(rng: &mut impl Rng, p: &FormulaParams, env: &[String]) -> Formula {
    let r = rng.gen_range(0..10);
    if !env.is_empty() && r < 6 {
        return Formula::var(env.choose(rng).unwrap().clone());
    }
    // Free variables must not be captured by a binder of the same name.
    let free: Vec<&String> = p.free_vars.iter().filter(|z| !env.contains(z)).collect();
    if !free.is_empty() && r < 9 {
        let z = Formula::var((*free.choose(rng).unwrap()).clone());
        return if rng.gen_bool(0.3) { Formula::not(z) } else { z };
    }
    if rng.gen_bool(0.5) {
        Formula::tt()
    } else {
        Formula::ff()
    }
}

/// Definition list `U1 = σZ.Φ1, ..` whose bodies may mention earlier
/// constants and the given free variables.
pub fn random_definition_list(rng: &mut impl Rng, p: &FormulaParams, len: usize) -> DefinitionList {
    let mut dl = DefinitionList::new();
    for i in 1..=len {
        let mut q = p.clone();
        q.free_vars.extend(dl.domain().cloned());
        let sigma = if rng.gen_bool(0.5) { Fix::Mu } else { Fix::Nu };
        let z = p.binders.choose(rng).unwrap().clone();
        let mut env = vec![z.clone()];
        let body = gen(rng, &q, q.max_depth.saturating_sub(1).max(2), &mut env, Some((sigma, 1)));
        dl = dl.append(&format!("U{i}"), Formula::fix(sigma, z, body)).expect("fresh constant");
    }
    dl
}

/// `σ1 Z. Φ` whose body contains a fixpoint subformula, for the nested
/// decomposition suite.
pub fn random_two_level(rng: &mut impl Rng, p: &FormulaParams) -> Formula {
    loop {
        let outer = if rng.gen_bool(0.5) { Fix::Mu } else { Fix::Nu };
        let mut env = vec!["Z".to_string()];
        let q = FormulaParams {
            binders: vec!["Y".into(), "Z".into()],
            ..p.clone()
        };
        let body = gen(rng, &q, p.max_depth.max(3) - 1, &mut env, Some((outer, 1)));
        let mut has_fix = false;
        body.visit(&mut |f| has_fix |= f.is_fixpoint());
        if has_fix {
            return Formula::fix(outer, "Z", body);
        }
    }
}
