//! Randomized and exhaustive property suites. Every verdict is compared with
//! the brute-force semantics or with an independent construction.

use std::collections::BTreeMap;

use mucalc_formula::{subst1, DefinitionList, Fix, Formula, Slice};
use mucalc_gen::{
    random_definition_list, random_formula, random_model, random_states, random_two_level, random_valuation,
    FormulaParams, ModelParams,
};
use mucalc_lattice::{
    all_monotone, extremal_fixpoint, is_support_ordering, random_monotone, set, support_theory_check,
    tarski_fixpoint, MonotoneSetFn, Scope, Sigma,
};
use mucalc_models::{validate_tts, Model, StateSet, Valuation};
use mucalc_search::{consistent_valuation, fresh_constant, prove, unfoldings, SearchConfig, SearchResult, Strategy};
use mucalc_semantics::{
    eval, eval_with, extend_valuation, formula_function, nested_function, sequent_valid, EvalConfig, FixpointMethod,
};
use mucalc_tableau::{
    analyze, bradfield_relations, check_success, companion_vars, emit_certificate, influence_valuation, is_tnf,
    node_formula_with, parse_certificate, seal, validate_tableau, ForallWitness, Mode, RuleApp, Sequent, Tableau,
    TnfViolation,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::verify_certificate;

/// Outcome of one suite: named check counters and the first failures.
#[derive(Clone, Debug, Default)]
pub struct Suite {
    pub name: String,
    /// Random or enumerated instances visited.
    pub instances: usize,
    pub checks: BTreeMap<String, usize>,
    pub failed: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

const KEPT_FAILURES: usize = 5;

impl Suite {
    pub fn new(name: impl Into<String>) -> Suite {
        Suite {
            name: name.into(),
            ..Suite::default()
        }
    }

    pub fn check(&mut self, what: &str, ok: bool, detail: impl FnOnce() -> String) {
        *self.checks.entry(what.to_string()).or_insert(0) += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(format!("{what}: {}", detail()));
            }
        }
    }

    /// Adds `cases` checks of `what` at once, with at most one failure.
    pub fn tally(&mut self, what: &str, cases: usize, counterexample: Option<String>) {
        *self.checks.entry(what.to_string()).or_insert(0) += cases;
        if let Some(cx) = counterexample {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(format!("{what}: {cx}"));
            }
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn count(&self, what: &str) -> usize {
        self.checks.get(what).copied().unwrap_or(0)
    }

    pub fn summary(&self) -> String {
        let checks: Vec<String> = self.checks.iter().map(|(k, v)| format!("{k} x{v}")).collect();
        let mut s = format!("{} instances; {}", self.instances, checks.join(", "));
        if !self.notes.is_empty() {
            s.push_str("; ");
            s.push_str(&self.notes.join("; "));
        }
        if !self.passed() {
            s.push_str(&format!("; {} failures, first: {}", self.failed, self.failures.join(" | ")));
        }
        s
    }
}

/// A successful tableau together with what it was judged against.
#[derive(Clone, Debug)]
pub struct Proof {
    pub model: Model,
    pub v: Valuation,
    pub tableau: Tableau,
    pub mode: Mode,
    pub origin: &'static str,
}

pub struct Instance {
    pub model: Model,
    pub v: Valuation,
    pub states: StateSet,
    pub phi: Formula,
}

impl Instance {
    pub fn root(&self) -> Sequent {
        Sequent::new(self.states.clone(), DefinitionList::new(), self.phi.clone())
    }

    pub fn valid(&self) -> bool {
        sequent_valid(&self.states, &DefinitionList::new(), &self.phi, &self.model, &self.v).expect("generated formulas evaluate")
    }
}

/// LTS with at most 6 states and 3 actions; closed PNF formula of depth at
/// most 5 with at most 2 alternations.
pub fn untimed_instance(rng: &mut impl Rng) -> Instance {
    let model = random_model(rng, &ModelParams::default());
    let phi = random_formula(rng, &FormulaParams::default());
    let states = random_states(rng, &model);
    Instance {
        v: Valuation::empty(&model),
        model,
        states,
        phi,
    }
}

/// Tick TTS with at most 5 states; closed timed formula.
pub fn timed_instance(rng: &mut impl Rng) -> Instance {
    let model = random_model(
        rng,
        &ModelParams {
            max_states: 5,
            timed: true,
            ..ModelParams::default()
        },
    );
    let phi = random_formula(rng, &timed_params());
    let states = random_states(rng, &model);
    Instance {
        v: Valuation::empty(&model),
        model,
        states,
        phi,
    }
}

fn timed_params() -> FormulaParams {
    FormulaParams {
        timed: true,
        ..FormulaParams::default()
    }
}

/// Grows a tableau by random rule applications, depth first, until every
/// leaf is terminal or `max_nodes` is reached. Constants are closed at a
/// companion most of the time and unfolded again otherwise.
pub fn random_tableau(model: &Model, root: Sequent, rng: &mut impl Rng, max_nodes: usize) -> Tableau {
    let mut t = Tableau::new(root);
    let mut open = vec![0];
    while let Some(n) = open.pop() {
        if t.len() >= max_nodes {
            break;
        }
        let Some(app) = random_rule(&t, n, model, rng) else {
            continue;
        };
        let kids = t.expand(n, app, model).expect("random rules respect their side conditions");
        open.extend(kids.into_iter().rev());
    }
    t
}

fn random_rule(t: &Tableau, n: usize, model: &Model, rng: &mut impl Rng) -> Option<RuleApp> {
    let seq = t.seq(n);
    let size = model.len();
    let states: Vec<usize> = seq.states.ones().collect();
    match &seq.formula {
        Formula::Var(u) if seq.dl.contains(u) => {
            if t.companion_of(n).is_some() && rng.gen_bool(0.85) {
                None
            } else {
                Some(RuleApp::Un)
            }
        }
        Formula::Var(_) | Formula::Not(_) => None,
        Formula::And(..) => Some(RuleApp::And),
        Formula::Box(..) => Some(RuleApp::Box),
        Formula::Or(..) => {
            let (mut l, mut r) = (set::empty(size), set::empty(size));
            for &s in &states {
                match rng.gen_range(0..5) {
                    0 | 1 => l.insert(s),
                    2 | 3 => r.insert(s),
                    _ => {
                        l.insert(s);
                        r.insert(s);
                    }
                }
            }
            Some(RuleApp::Or(l, r))
        }
        Formula::Diamond(k, _) => {
            let mut w = BTreeMap::new();
            for &s in &states {
                w.insert(s, *model.successors(s, k).choose(rng)?);
            }
            Some(RuleApp::Dia(w))
        }
        Formula::Fix(..) => {
            let thinned = matches!(t.parent(n).and_then(|p| t.rule(p)), Some(RuleApp::Thin(_)));
            if !thinned && rng.gen_bool(0.25) {
                let extra = set::from_elems(size, (0..size).filter(|_| rng.gen_bool(0.3)));
                Some(RuleApp::Thin(set::union(&seq.states, &extra)))
            } else {
                Some(RuleApp::Sigma(fresh_constant(&seq.dl, &seq.formula)))
            }
        }
        Formula::Exists(..) => {
            let bound = model.time_bound();
            let w = states
                .iter()
                .map(|&s| {
                    let delays: Vec<usize> = model.delay_profile(s).delays_upto(bound).collect();
                    (s, *delays.choose(rng).expect("delay 0 is always allowed"))
                })
                .collect();
            Some(RuleApp::Exists(w))
        }
        Formula::Forall(..) => Some(RuleApp::Forall(ForallWitness::tabulate(model, &seq.states, |_, d| {
            rng.gen_range(0..=d)
        }))),
    }
}

fn show(model: &Model, i: &Instance) -> String {
    format!("{} |- {} on {model}", model.format_states(&i.states), i.phi)
}

const SEARCHES: [Strategy; 3] = [Strategy::OracleTnf, Strategy::NuComplete, Strategy::NaiveSubset];

/// Every tableau accepted by the standard success check has a valid root.
/// Candidates are the standard-mode search results and random tableaux.
pub fn soundness(count: usize, seed: u64) -> (Suite, Vec<Proof>) {
    let mut suite = Suite::new("soundness differential");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::new();
    let (mut searched, mut random) = (0, 0);
    for i in 0..count {
        let inst = untimed_instance(&mut rng);
        suite.instances += 1;
        let valid = inst.valid();
        let mut candidates = Vec::new();
        for (strategy, s) in [(Strategy::OracleTnf, 0), (Strategy::NaiveSubset, 0), (Strategy::NaiveSubset, i as u64 + 1)] {
            let cfg = SearchConfig {
                seed: s,
                ..SearchConfig::new(strategy)
            };
            match prove(&inst.model, &inst.v, &inst.states, &inst.phi, &cfg) {
                Ok(out) => {
                    if let SearchResult::Proved(t) = out.result {
                        candidates.push((t, strategy.name()));
                    }
                }
                Err(e) => suite.check("search runs", false, || format!("{e} on {}", show(&inst.model, &inst))),
            }
        }
        for _ in 0..2 {
            candidates.push((random_tableau(&inst.model, inst.root(), &mut rng, 60), "random"));
        }
        for (t, origin) in candidates {
            let verdict = check_success(&t, &inst.model, &inst.v, Mode::Standard);
            if origin != "random" {
                suite.check("search proofs succeed", verdict.success, || show(&inst.model, &inst));
            }
            if !verdict.success {
                continue;
            }
            if origin == "random" {
                random += 1;
            } else {
                searched += 1;
            }
            suite.check("accepted root valid", valid, || format!("{origin} tableau for {}", show(&inst.model, &inst)));
            corpus.push(Proof {
                model: inst.model.clone(),
                v: inst.v.clone(),
                tableau: t,
                mode: Mode::Standard,
                origin,
            });
        }
    }
    suite.note(format!("accepted tableaux: {searched} from search, {random} random"));
    (suite, corpus)
}

/// The TNF construction proves exactly the valid sequents; its proofs are in
/// TNF except for a Thin at the root, and replay from their certificates.
pub fn completeness(count: usize, seed: u64) -> (Suite, Vec<Proof>) {
    let mut suite = Suite::new("completeness");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::new();
    let mut root_thin = 0;
    for _ in 0..count {
        let inst = untimed_instance(&mut rng);
        suite.instances += 1;
        let valid = inst.valid();
        let out = match prove(&inst.model, &inst.v, &inst.states, &inst.phi, &SearchConfig::new(Strategy::OracleTnf)) {
            Ok(out) => out,
            Err(e) => {
                suite.check("search runs", false, || e.to_string());
                continue;
            }
        };
        let t = out.tableau();
        suite.check("proved iff valid", t.is_some() == valid, || show(&inst.model, &inst));
        let Some(t) = t else { continue };
        match is_tnf(t) {
            Ok(()) => suite.check("tnf", true, String::new),
            Err(v) if v == [TnfViolation::ThinningRestricted { node: 0 }] => {
                root_thin += 1;
                suite.check("tnf", true, String::new);
            }
            Err(v) => suite.check("tnf", false, || format!("{v:?} for {}", show(&inst.model, &inst))),
        }
        let text = emit_certificate(t, &inst.model, &inst.v, out.mode);
        suite.check("replay", verify_certificate(&text, &inst.model, &inst.v).is_ok(), || show(&inst.model, &inst));
        corpus.push(Proof {
            model: inst.model.clone(),
            v: inst.v.clone(),
            tableau: t.clone(),
            mode: out.mode,
            origin: "oracle-tnf",
        });
    }
    suite.note(format!("{root_thin} proofs start with a root Thin"));
    (suite, corpus)
}

/// Sequents proved by the ν-complete search are valid, and the chain
/// example unfolds exactly three times.
pub fn nu_complete(count: usize, seed: u64) -> (Suite, Vec<Proof>) {
    let mut suite = Suite::new("nu-complete soundness");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::new();
    let (mut proved, mut refuted, mut unknown) = (0, 0, 0);
    for _ in 0..count {
        let inst = untimed_instance(&mut rng);
        suite.instances += 1;
        let valid = inst.valid();
        let out = match prove(&inst.model, &inst.v, &inst.states, &inst.phi, &SearchConfig::new(Strategy::NuComplete)) {
            Ok(out) => out,
            Err(e) => {
                suite.check("search runs", false, || e.to_string());
                continue;
            }
        };
        match &out.result {
            SearchResult::Proved(t) => {
                proved += 1;
                suite.check("proved root valid", valid, || show(&inst.model, &inst));
                let ok = check_success(t, &inst.model, &inst.v, Mode::NuComplete).success;
                suite.check("nu-complete success", ok, || show(&inst.model, &inst));
                corpus.push(Proof {
                    model: inst.model.clone(),
                    v: inst.v.clone(),
                    tableau: t.clone(),
                    mode: Mode::NuComplete,
                    origin: "nu-complete",
                });
            }
            SearchResult::Refuted(_) => {
                refuted += 1;
                suite.check("refuted root invalid", !valid, || show(&inst.model, &inst));
            }
            SearchResult::BudgetExceeded => unknown += 1,
        }
    }
    let chain = crate::builtin_model("chain").expect("built-in");
    let v = Valuation::empty(&chain);
    let phi = mucalc_formula::parse_formula("mu Z. [a] Z").expect("literal");
    let cfg = SearchConfig::new(Strategy::NuComplete).with_budget(100);
    let three = match prove(&chain, &v, &chain.all_states(), &phi, &cfg).map(|o| o.result) {
        Ok(SearchResult::Proved(t)) => unfoldings(&t).values().sum::<usize>(),
        _ => 0,
    };
    suite.check("chain example unfoldings", three == 3, || format!("{three} unfoldings"));
    suite.note(format!("{proved} proved, {refuted} refuted, {unknown} over budget"));
    (suite, corpus)
}

/// Timed models satisfy the TTS axioms, ∃ and ∀ are dual, and every search
/// answer and accepted random tableau agrees with the semantics.
pub fn timed(count: usize, seed: u64) -> (Suite, Vec<Proof>) {
    let mut suite = Suite::new("timed");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::new();
    for i in 0..count {
        let inst = timed_instance(&mut rng);
        suite.instances += 1;
        let m = &inst.model;
        suite.check("validate_tts", validate_tts(m).is_ok(), || format!("{m}"));
        let other = random_formula(&mut rng, &timed_params());
        let ex = eval(&Formula::exists(inst.phi.clone(), other.clone()), m, &inst.v).expect("evaluates");
        let fa = eval(
            &Formula::forall(Formula::not(inst.phi.clone()), Formula::not(other.clone())),
            m,
            &inst.v,
        )
        .expect("evaluates");
        suite.check("duality", ex == set::complement(&fa), || format!("{} and {other} on {m}", inst.phi));
        let valid = inst.valid();
        for strategy in SEARCHES {
            let cfg = SearchConfig {
                seed: i as u64,
                ..SearchConfig::new(strategy)
            };
            let out = match prove(m, &inst.v, &inst.states, &inst.phi, &cfg) {
                Ok(out) => out,
                Err(e) => {
                    suite.check("search runs", false, || e.to_string());
                    continue;
                }
            };
            match &out.result {
                SearchResult::Proved(t) => {
                    suite.check("proved root valid", valid, || format!("{strategy}: {}", show(m, &inst)));
                    let ok = check_success(t, m, &inst.v, out.mode).success;
                    suite.check("search proofs succeed", ok, || show(m, &inst));
                    corpus.push(Proof {
                        model: m.clone(),
                        v: inst.v.clone(),
                        tableau: t.clone(),
                        mode: out.mode,
                        origin: strategy.name(),
                    });
                }
                SearchResult::Refuted(_) => {
                    suite.check("refuted root invalid", !valid, || format!("{strategy}: {}", show(m, &inst)))
                }
                SearchResult::BudgetExceeded => {}
            }
            if strategy == Strategy::OracleTnf {
                suite.check("oracle-tnf proves iff valid", out.tableau().is_some() == valid, || show(m, &inst));
            }
        }
        let t = random_tableau(m, inst.root(), &mut rng, 60);
        if check_success(&t, m, &inst.v, Mode::Standard).success {
            suite.check("accepted root valid", valid, || format!("random tableau for {}", show(m, &inst)));
        }
    }
    (suite, corpus)
}

struct LemmaInstance {
    model: Model,
    v: Valuation,
    phi: Formula,
    dl: DefinitionList,
}

fn lemma_instance(rng: &mut impl Rng, timed: bool) -> LemmaInstance {
    let mp = ModelParams {
        max_states: 5,
        timed,
        ..ModelParams::default()
    };
    let model = random_model(rng, &mp);
    let v = random_valuation(rng, &model, &["P", "Q"]);
    let fp = FormulaParams {
        free_vars: vec!["P".into(), "Q".into()],
        timed,
        ..FormulaParams::default()
    };
    let dl = random_definition_list(rng, &fp, 2);
    let mut gp = fp.clone();
    gp.free_vars.extend(dl.domain().cloned());
    let phi = random_formula(rng, &gp);
    LemmaInstance { model, v, phi, dl }
}

/// Substitution, non-free variables, unfolding, definition-list
/// correspondence, constant correspondence and constant unfolding.
pub fn semantics_lemmas(count: usize, seed: u64) -> Suite {
    let mut suite = Suite::new("semantics lemmas");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let LemmaInstance { model, v, phi, dl } = lemma_instance(&mut rng, k % 2 == 1);
        suite.instances += 1;
        let ev = |f: &Formula, v: &Valuation| eval(f, &model, v).expect("evaluates");
        let here = || format!("{phi} with [{dl}] on {model}");

        let psi = dl.entries()[0].1.clone();
        let lhs = ev(&subst1(&phi, "P", &psi), &v);
        let rhs = ev(&phi, &v.with("P", ev(&psi, &v)));
        suite.check("substitution", lhs == rhs, here);

        let s = set::from_elems(model.len(), (0..model.len()).filter(|_| rng.gen_bool(0.5)));
        let absent: Vec<&str> = ["P", "Q", "R", "X", "Y", "Z"].into_iter().filter(|z| !phi.is_free(z)).collect();
        let z = *absent.choose(&mut rng).expect("R never occurs");
        suite.check("non-free variables", ev(&phi, &v) == ev(&phi, &v.with(z, s)), here);

        // Fixpoint subformulas of Φ and the bodies of Δ, which are all
        // fixpoints.
        let mut fixes: Vec<Formula> = dl.entries().iter().map(|(_, b)| b.clone()).collect();
        phi.visit(&mut |f| {
            if f.is_fixpoint() {
                fixes.push(f.clone())
            }
        });
        let bad = fixes.iter().find(|f| {
            let Formula::Fix(_, z, body) = f else { unreachable!("filtered to fixpoints") };
            ev(f, &v) != ev(&subst1(body, z, f), &v)
        });
        suite.check("unfolding", bad.is_none(), || format!("{} on {model}", bad.unwrap()));

        let ext = extend_valuation(&v, &dl, &model).expect("valid list");
        suite.check("definition-list correspondence", ev(&dl.expand(&phi), &v) == ev(&phi, &ext), here);
        let (mut corresponds, mut unfolds) = (true, true);
        for (u, body) in dl.entries() {
            let before = dl.slice(u, Slice::StrictPrefix).expect("defined");
            let vb = extend_valuation(&v, &before, &model).expect("valid list");
            corresponds &= ev(&Formula::var(u), &ext) == ev(body, &vb);
            if let Formula::Fix(_, z, inner) = body {
                unfolds &= ext.get(u) == ev(&subst1(inner, z, &Formula::var(u)), &ext);
            }
        }
        suite.check("constant correspondence", corresponds, here);
        suite.check("constant unfolding", unfolds, here);
    }
    suite
}

/// Support-ordering theory: exhaustive for every monotone function on
/// carriers of size at most 3, sampled on size 5.
pub fn support_theory(functions5: usize, samples: usize, seed: u64) -> Suite {
    let mut suite = Suite::new("support theory");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let record = |suite: &mut Suite, rep: mucalc_lattice::SupportReport| {
        suite.instances += 1;
        for c in rep.checks {
            suite.tally(c.name, c.cases, c.counterexample);
        }
    };
    for n in 0..=3 {
        for f in all_monotone(n) {
            record(&mut suite, support_theory_check(&f, Scope::Exhaustive));
        }
    }
    let exhaustive = suite.instances;
    for k in 0..functions5 {
        let f = random_monotone(5, &mut rng);
        let scope = Scope::Sampled {
            samples,
            seed: seed.wrapping_add(k as u64),
        };
        record(&mut suite, support_theory_check(&f, scope));
    }
    suite.note(format!(
        "{exhaustive} functions enumerated on carriers of size <= 3, {functions5} x {samples} samples on size 5"
    ));
    suite
}

/// Kleene iteration against the meet and join characterizations: every
/// monotone function on carriers of size at most 3, random ones on size 4,
/// and the evaluator's two fixpoint methods on random formulas.
pub fn tarski(random4: usize, formulas: usize, seed: u64) -> Suite {
    let mut suite = Suite::new("tarski");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let compare = |suite: &mut Suite, f: &MonotoneSetFn| {
        suite.instances += 1;
        for sigma in [Sigma::Mu, Sigma::Nu] {
            let (k, t) = (extremal_fixpoint(f, sigma), tarski_fixpoint(f, sigma));
            suite.check("kleene equals tarski", k == t, || format!("{f:?} {sigma:?}"));
        }
    };
    for n in 0..=3 {
        for f in all_monotone(n) {
            compare(&mut suite, &f);
        }
    }
    for _ in 0..random4 {
        let f = random_monotone(4, &mut rng);
        compare(&mut suite, &f);
    }
    let cfg = EvalConfig {
        fixpoints: FixpointMethod::Tarski,
        ..EvalConfig::default()
    };
    for k in 0..formulas {
        let LemmaInstance { model, v, phi, .. } = loop {
            let i = lemma_instance(&mut rng, k % 2 == 1);
            if i.model.len() <= 4 {
                break i;
            }
        };
        let ok = eval(&phi, &model, &v).ok() == eval_with(&phi, &model, &v, &cfg).ok();
        suite.check("evaluator methods agree", ok, || format!("{phi} on {model}"));
    }
    suite
}

/// The formula function of a two-level fixpoint body equals its `f[σ]g`
/// decomposition.
pub fn nested(count: usize, seed: u64) -> Suite {
    let mut suite = Suite::new("nested fixpoint combinator");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let model = random_model(
            &mut rng,
            &ModelParams {
                max_states: 4,
                ..ModelParams::default()
            },
        );
        let v = random_valuation(&mut rng, &model, &["P"]);
        let fp = FormulaParams {
            free_vars: vec!["P".into()],
            ..FormulaParams::default()
        };
        let phi = random_two_level(&mut rng, &fp);
        suite.instances += 1;
        let Formula::Fix(_, z, body) = &phi else {
            unreachable!("two-level formulas are fixpoints")
        };
        let direct = formula_function(z, body, &model, &v);
        let composed = nested_function(z, body, &model, &v);
        let ok = match (direct, composed) {
            (Ok(f), Ok(Some(g))) => set::all_subsets(model.len()).all(|x| f.apply(&x) == g.apply(&x)),
            _ => false,
        };
        suite.check("formula function equals composition", ok, || format!("{phi} on {model}"));
    }
    suite
}

/// Every node formula evaluated under a consistent valuation equals the
/// node's own semantics.
pub fn node_formulas(corpus: &[Proof]) -> Suite {
    let mut suite = Suite::new("node formulas");
    for p in corpus {
        suite.instances += 1;
        let (t, m) = (&p.tableau, &p.model);
        let shape = match validate_tableau(t, m, p.mode) {
            Ok(shape) => shape,
            Err(e) => {
                suite.check("valid tableau", false, || format!("{e:?}"));
                continue;
            }
        };
        let vars = companion_vars(t, &shape);
        let cv = consistent_valuation(t, &shape, m, &p.v).expect("evaluates");
        for n in 0..t.len() {
            let seq = t.seq(n);
            let pn = node_formula_with(t, &shape, &vars, n);
            let lhs = eval(&pn, m, &cv).expect("evaluates");
            let ext = extend_valuation(&p.v, &seq.dl, m).expect("valid list");
            let rhs = eval(&seq.formula, m, &ext).expect("evaluates");
            let what = if m.is_timed() { "timed nodes" } else { "untimed nodes" };
            suite.check(what, lhs == rhs, || format!("node {n} of a {} proof: P = {pn} on {m}", p.origin));
        }
    }
    suite
}

/// At every companion `m`, the states of `m` ordered by the transitive
/// closure of `<:_m` form a support ordering for the body of `P(m)` under
/// the influence valuation.
pub fn support_lemma(corpus: &[Proof]) -> Suite {
    let mut suite = Suite::new("central support lemma");
    for p in corpus {
        suite.instances += 1;
        let (t, m) = (&p.tableau, &p.model);
        let Ok((shape, bundle)) = analyze(t, m, p.mode) else {
            suite.check("valid tableau", false, String::new);
            continue;
        };
        let vars = companion_vars(t, &shape);
        let cv = consistent_valuation(t, &shape, m, &p.v).expect("evaluates");
        for &c in &shape.companions {
            let body = node_formula_with(t, &shape, &vars, t.children(c)[0]);
            let vi = influence_valuation(t, &shape, &bundle, c, &cv);
            let z = &vars[&c];
            let table = set::all_subsets(m.len())
                .map(|x| eval(&body, m, &vi.with(z.clone(), x)).expect("evaluates"))
                .collect();
            let f = MonotoneSetFn::from_table(m.len(), table);
            let prec = bundle.companion(c).transitive_closure();
            let ok = match &f {
                Ok(f) => is_support_ordering(f, &t.seq(c).states, &prec).is_ok(),
                Err(_) => false,
            };
            suite.check("companions", ok, || format!("companion {c} of a {} proof on {m}", p.origin));
        }
    }
    suite
}

/// The inductive dependency relations coincide with the path-based ones.
pub fn bradfield(corpus: &[Proof]) -> Suite {
    let mut suite = Suite::new("path characterization");
    for p in corpus {
        suite.instances += 1;
        let (t, m) = (&p.tableau, &p.model);
        let Ok((shape, bundle)) = analyze(t, m, p.mode) else {
            suite.check("valid tableau", false, String::new);
            continue;
        };
        let b = bradfield_relations(t, m);
        let empty = mucalc_lattice::FiniteRelation::empty(m.len());
        let iv = t.intervals();
        for n in 0..t.len() {
            for d in (0..t.len()).filter(|&d| iv.contains(n, d)) {
                let path = b.path.get(&(n, d)).unwrap_or(&empty);
                suite.check("dependency", bundle.dep(d, n) == path.converse(), || format!("dep({d}, {n})"));
                let ext = b.extended_path.get(&(n, d)).unwrap_or(&empty);
                suite.check("extended dependency", bundle.extended(d, n) == ext.converse(), || {
                    format!("extended({d}, {n})")
                });
            }
        }
        for &c in &shape.companions {
            let ok = b.order.get(&c) == Some(&bundle.companion(c).converse());
            suite.check("companion ordering", ok, || format!("companion {c}"));
        }
    }
    suite
}

/// Replaces one field value of `text`, keeping the rest byte for byte.
pub fn mutate(text: &str, model: &Model, rng: &mut impl Rng) -> String {
    let lines: Vec<&str> = text.lines().collect();
    loop {
        let i = rng.gen_range(0..lines.len());
        let line = lines[i];
        let Some(colon) = line.find(':').or_else(|| line.find(' ')) else {
            continue;
        };
        let (head, value) = line.split_at(colon + 1);
        let mut tokens: Vec<String> = value.split_whitespace().map(String::from).collect();
        let fresh = match rng.gen_range(0..4) {
            0 if !tokens.is_empty() => {
                tokens.remove(rng.gen_range(0..tokens.len()));
                None
            }
            1 => {
                let name = model.state_names().choose(rng).expect("nonempty model").clone();
                tokens.insert(rng.gen_range(0..=tokens.len()), name);
                None
            }
            _ if !tokens.is_empty() => {
                let k = rng.gen_range(0..tokens.len());
                Some((k, replacement(&tokens[k], model, rng)))
            }
            _ => continue,
        };
        if let Some((k, tok)) = fresh {
            tokens[k] = tok;
        }
        let sep = if head.ends_with(':') && !tokens.is_empty() { " " } else { "" };
        let edited = format!("{head}{sep}{}", tokens.join(" "));
        if edited == line {
            continue;
        }
        let mut out: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        out[i] = edited;
        let mut joined = out.join("\n");
        joined.push('\n');
        return joined;
    }
}

fn replacement(tok: &str, model: &Model, rng: &mut impl Rng) -> String {
    const RULES: [&str; 9] = ["and", "or", "box", "dia", "un", "thin", "exists", "forall", "-"];
    if let Ok(k) = tok.parse::<usize>() {
        return if k > 0 && rng.gen_bool(0.5) { k - 1 } else { k + 1 }.to_string();
    }
    if model.state_id(tok).is_some() {
        if let Some(other) = model.state_names().iter().filter(|s| s.as_str() != tok).collect::<Vec<_>>().choose(rng) {
            return other.to_string();
        }
    }
    if RULES.contains(&tok) {
        return RULES.iter().filter(|&&r| r != tok).collect::<Vec<_>>().choose(rng).unwrap().to_string();
    }
    if tok.len() >= 32 && tok.chars().all(|c| c.is_ascii_hexdigit()) {
        let k = rng.gen_range(0..tok.len());
        let mut chars: Vec<char> = tok.chars().collect();
        chars[k] = if chars[k] == '0' { '1' } else { '0' };
        return chars.into_iter().collect();
    }
    match tok {
        "mu" => "nu".into(),
        "nu" => "mu".into(),
        "&&" => "||".into(),
        "||" => "&&".into(),
        _ => format!("{tok}x"),
    }
}

/// Certificates round-trip byte for byte, and no single-field mutation of a
/// sealed certificate is accepted. Mutations resealed with a fresh digest
/// must be rejected or still prove a valid sequent.
pub fn certificates(corpus: &[Proof], mutations: usize, seed: u64) -> Suite {
    let mut suite = Suite::new("certificate integrity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let texts: Vec<String> = corpus
        .iter()
        .map(|p| emit_certificate(&p.tableau, &p.model, &p.v, p.mode))
        .collect();
    for (p, text) in corpus.iter().zip(&texts) {
        suite.instances += 1;
        let again = parse_certificate(text, &p.model).map(|c| emit_certificate(&c.tableau, &p.model, &p.v, c.mode));
        suite.check("round trip", again.as_deref() == Ok(text.as_str()), || format!("{} proof on {}", p.origin, p.model));
    }
    if corpus.is_empty() {
        return suite;
    }
    let mut structural = 0;
    for k in 0..mutations {
        let i = k % corpus.len();
        let (p, text) = (&corpus[i], &texts[i]);
        let bad = mutate(text, &p.model, &mut rng);
        suite.check("mutation rejected", verify_certificate(&bad, &p.model, &p.v).is_err(), || bad.clone());
        let body: String = bad.lines().filter(|l| !l.starts_with("digest:")).map(|l| format!("{l}\n")).collect();
        let resealed = seal(&body);
        match verify_certificate(&resealed, &p.model, &p.v) {
            Err(_) => structural += 1,
            Ok(r) => {
                let ok = sequent_valid(&r.root.states, &r.root.dl, &r.root.formula, &p.model, &p.v) 
                    .unwrap_or(false);
                suite.check("resealed mutation sound", ok, || resealed.clone());
            }
        }
    }
    suite.note(format!("{structural} of {mutations} resealed mutations rejected without the digest"));
    suite
}

/// Companion fixpoint kinds in a corpus, for reporting.
pub fn companion_kinds(corpus: &[Proof]) -> (usize, usize) {
    let (mut mu, mut nu) = (0, 0);
    for p in corpus {
        for c in p.tableau.shape(&p.model, p.mode).companions {
            match mucalc_tableau::companion_fix(&p.tableau, c) {
                Some(Fix::Mu) => mu += 1,
                Some(Fix::Nu) => nu += 1,
                None => {}
            }
        }
    }
    (mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mucalc_lattice::FiniteRelation;

    fn nu_proof() -> Proof {
        let model = crate::builtin_model("l1").unwrap();
        let v = Valuation::empty(&model);
        let phi = mucalc_formula::parse_formula("nu Z. <a> Z").unwrap();
        let out = prove(&model, &v, &model.all_states(), &phi, &SearchConfig::new(Strategy::OracleTnf)).unwrap();
        Proof {
            tableau: out.tableau().unwrap().clone(),
            model,
            v,
            mode: Mode::Standard,
            origin: "oracle-tnf",
        }
    }

    #[test]
    fn corpus_suites_pass_on_a_known_proof() {
        let corpus = [nu_proof()];
        for suite in [node_formulas(&corpus), support_lemma(&corpus), bradfield(&corpus), certificates(&corpus, 20, 1)] {
            assert!(suite.passed(), "{}", suite.summary());
        }
        assert_eq!(support_lemma(&corpus).count("companions"), 1);
    }

    #[test]
    fn support_check_rejects_an_empty_ordering() {
        let p = nu_proof();
        let (shape, _) = analyze(&p.tableau, &p.model, p.mode).unwrap();
        let c = shape.companions[0];
        let vars = companion_vars(&p.tableau, &shape);
        let body = node_formula_with(&p.tableau, &shape, &vars, p.tableau.children(c)[0]);
        let table = set::all_subsets(2)
            .map(|x| eval(&body, &p.model, &p.v.with(vars[&c].clone(), x)).unwrap())
            .collect();
        let f = MonotoneSetFn::from_table(2, table).unwrap();
        assert!(is_support_ordering(&f, &p.tableau.seq(c).states, &FiniteRelation::empty(2)).is_err());
    }

    #[test]
    fn node_formulas_need_the_consistent_valuation() {
        let p = nu_proof();
        let shape = validate_tableau(&p.tableau, &p.model, p.mode).unwrap();
        let vars = companion_vars(&p.tableau, &shape);
        let leaf = (0..p.tableau.len()).find(|&n| p.tableau.is_leaf(n)).unwrap();
        let pn = node_formula_with(&p.tableau, &shape, &vars, leaf);
        // Z#1 unset denotes the empty set, the constant denotes everything.
        assert!(eval(&pn, &p.model, &p.v).unwrap().is_clear());
        let cv = consistent_valuation(&p.tableau, &shape, &p.model, &p.v).unwrap();
        assert_eq!(eval(&pn, &p.model, &cv).unwrap(), p.model.all_states());
    }

    #[test]
    fn mutations_edit_one_line() {
        let p = nu_proof();
        let text = emit_certificate(&p.tableau, &p.model, &p.v, p.mode);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let bad = mutate(&text, &p.model, &mut rng);
            assert_ne!(bad, text);
            let diff = text.lines().zip(bad.lines()).filter(|(a, b)| a != b).count();
            assert_eq!((diff, text.lines().count()), (1, bad.lines().count()));
        }
    }

    #[test]
    fn random_tableaux_keep_the_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let inst = timed_instance(&mut rng);
            let t = random_tableau(&inst.model, inst.root(), &mut rng, 40);
            assert!(t.seq(0).same_as(&inst.root()));
            assert!(t.len() <= 40 + 2);
        }
    }

    #[test]
    fn failures_are_counted_and_kept() {
        let mut s = Suite::new("x");
        for k in 0..10 {
            s.check("c", k % 2 == 0, || format!("case {k}"));
        }
        assert_eq!((s.count("c"), s.failed, s.failures.len()), (10, 5, KEPT_FAILURES));
        assert!(!s.passed());
        assert!(s.summary().contains("5 failures, first: c: case 1"));
    }
}
