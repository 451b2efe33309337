use mucalc_formula::{parse_formula, subst1, to_pnf, DefinitionList, Formula};
use mucalc_gen::{random_definition_list, random_formula, random_model, random_two_level, random_valuation, FormulaParams, ModelParams};
use mucalc_lattice::set::{self, Set};
use mucalc_models::{Model, Valuation};
use mucalc_semantics::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn l1() -> Model {
    Model::lts(&["s0", "s1"], &[("s0", "a", "s1"), ("s1", "a", "s1")])
}

fn chain() -> Model {
    Model::lts(&["c0", "c1", "c2"], &[("c0", "a", "c1"), ("c1", "a", "c2")])
}

fn t1() -> Model {
    Model::tts(&["t0", "t1", "t2"], &[("t2", "a", "t0")], &[("t0", "t1"), ("t1", "t2"), ("t2", "t2")])
}

fn ev(f: &str, m: &Model) -> Set {
    eval(&p(f), m, &Valuation::empty(m)).unwrap()
}

#[test]
fn eval_examples() {
    let m = l1();
    assert_eq!(ev("nu Z. Z", &m), m.all_states());
    assert_eq!(ev("mu Z. <a> Z", &m), m.no_states());
    let c = chain();
    assert_eq!(ev("mu Z. [a] Z", &c), c.all_states());
    let t = t1();
    assert_eq!(ev("exists{tt}(<a> tt)", &t), t.all_states());
    assert_eq!(ev("forall{ff}(tt)", &t), t.all_states());
    // Only t2 has an a-step, and every trajectory ends in t2.
    assert_eq!(ev("forall{ff}(<a> tt)", &t), set::singleton(3, 2));
    assert_eq!(ev("exists{!(<a> tt)}(<a> tt)", &t), t.all_states());
    assert_eq!(ev("exists{tt}(!(<a> tt))", &t), set::from_elems(3, [0, 1]));
}

#[test]
fn eval_errors() {
    let m = l1();
    assert!(matches!(eval(&p("nu Z. !Z"), &m, &Valuation::empty(&m)), Err(EvalError::IllFormed(_))));
    assert_eq!(eval(&p("exists{tt}(tt)"), &m, &Valuation::empty(&m)), Err(EvalError::TimedOnLts));
    assert_eq!(unbound_free_vars(&p("X && mu Y. Y"), &Valuation::empty(&m)), vec!["X".to_string()]);
}

#[test]
fn extend_valuation_examples() {
    let m = l1();
    let v0 = Valuation::empty(&m).with("P", set::singleton(2, 0));
    assert_eq!(extend_valuation(&v0, &DefinitionList::new(), &m).unwrap(), v0);
    let d1 = DefinitionList::new().append("U", p("nu Z. <a> Z")).unwrap();
    assert_eq!(extend_valuation(&v0, &d1, &m).unwrap().get("U"), m.all_states());
    let d2 = DefinitionList::new()
        .append("U1", p("nu Z. <a> Z"))
        .unwrap()
        .append("U2", p("mu W. (U1 && W) || [a] W"))
        .unwrap();
    let e2 = extend_valuation(&v0, &d2, &m).unwrap();
    assert_eq!(e2.get("U1"), extend_valuation(&v0, &d1.slice("U", mucalc_formula::Slice::Prefix).unwrap(), &m).unwrap().get("U"));
}

#[test]
fn formula_function_examples() {
    let m = l1();
    let v = Valuation::empty(&m);
    let f = formula_function("Z", &p("<a> Z"), &m, &v).unwrap();
    let expect = [vec![], vec![], vec![0, 1], vec![0, 1]];
    for (bits, e) in expect.iter().enumerate() {
        assert_eq!(f.apply(&set::from_bits(2, bits as u64)), set::from_elems(2, e.iter().copied()));
    }
    let id = formula_function("Z", &p("Z"), &m, &v).unwrap();
    assert!(set::all_subsets(2).all(|x| id.apply(&x) == x));
    assert_eq!(mucalc_lattice::extremal_fixpoint(&f, mucalc_lattice::Sigma::Mu), ev("mu Z. <a> Z", &m));
    assert!(matches!(formula_function("Z", &p("!Z"), &m, &v), Err(FunctionError::NotPositive(_))));
}

#[test]
fn sequent_validity_examples() {
    let m = l1();
    let v = Valuation::empty(&m);
    let e = DefinitionList::new();
    assert!(sequent_valid(&m.all_states(), &e, &p("nu Z. <a> Z"), &m, &v).unwrap());
    assert!(!sequent_valid(&set::singleton(2, 0), &e, &p("mu Z. <a> Z"), &m, &v).unwrap());
    assert!(sequent_valid(&m.no_states(), &e, &p("mu Z. <a> Z"), &m, &v).unwrap());
}

#[test]
fn nested_decomposition_shape() {
    let d = decompose_nested(&p("<a> (mu Y. Z || <b> Y) && nu X. X")).unwrap();
    assert_eq!(d.outer, p("<a> W'1 && nu X. X"));
    assert_eq!(d.inner_var, "Y");
    assert!(decompose_nested(&p("<a> Z")).is_none());
}

struct Instance {
    model: Model,
    v: Valuation,
    phi: Formula,
    dl: DefinitionList,
}

fn instance(seed: u64, timed: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mp = ModelParams {
        max_states: 5,
        timed,
        ..ModelParams::default()
    };
    let model = random_model(&mut rng, &mp);
    let v = random_valuation(&mut rng, &model, &["P", "Q"]);
    let fp = FormulaParams {
        free_vars: vec!["P".into(), "Q".into()],
        timed,
        ..FormulaParams::default()
    };
    let dl = random_definition_list(&mut rng, &fp, 2);
    let mut gp = fp.clone();
    gp.free_vars.extend(dl.domain().cloned());
    let phi = random_formula(&mut rng, &gp);
    Instance { model, v, phi, dl }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn negation_is_complement(seed in any::<u64>(), timed in any::<bool>()) {
        let i = instance(seed, timed);
        let pos = eval(&i.phi, &i.model, &i.v).unwrap();
        prop_assert_eq!(eval(&Formula::not(i.phi.clone()), &i.model, &i.v).unwrap(), set::complement(&pos));
        prop_assert_eq!(eval(&to_pnf(&Formula::not(i.phi.clone())), &i.model, &i.v).unwrap(), set::complement(&pos));
    }

    #[test]
    fn fixpoints_unfold(seed in any::<u64>()) {
        let i = instance(seed, seed % 2 == 0);
        let mut fixes = Vec::new();
        i.phi.visit(&mut |f| if f.is_fixpoint() { fixes.push(f.clone()) });
        for f in fixes {
            if let Formula::Fix(_, z, body) = &f {
                let unfolded = subst1(body, z, &f);
                prop_assert_eq!(eval(&f, &i.model, &i.v).unwrap(), eval(&unfolded, &i.model, &i.v).unwrap());
            }
        }
    }

    #[test]
    fn non_free_variables_are_irrelevant(seed in any::<u64>(), bits in any::<u64>()) {
        let i = instance(seed, false);
        let s = set::from_bits(i.model.len(), bits);
        for z in ["R", "X", "Y", "Z"] {
            if !i.phi.is_free(z) {
                prop_assert_eq!(eval(&i.phi, &i.model, &i.v).unwrap(), eval(&i.phi, &i.model, &i.v.with(z, s.clone())).unwrap());
            }
        }
    }

    #[test]
    fn substitution_matches_valuation_update(seed in any::<u64>()) {
        let i = instance(seed, false);
        let psi = i.dl.entries()[0].1.clone();
        let lhs = eval(&subst1(&i.phi, "P", &psi), &i.model, &i.v).unwrap();
        let rhs = eval(&i.phi, &i.model, &i.v.with("P", eval(&psi, &i.model, &i.v).unwrap())).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn definition_list_correspondence(seed in any::<u64>(), timed in any::<bool>()) {
        let i = instance(seed, timed);
        let ext = extend_valuation(&i.v, &i.dl, &i.model).unwrap();
        prop_assert_eq!(eval(&i.dl.expand(&i.phi), &i.model, &i.v).unwrap(), eval(&i.phi, &i.model, &ext).unwrap());
        for (k, (u, body)) in i.dl.entries().iter().enumerate() {
            let before = DefinitionList::from_entries(i.dl.entries()[..k].iter().cloned()).unwrap();
            let vb = extend_valuation(&i.v, &before, &i.model).unwrap();
            prop_assert_eq!(ext.get(u), eval(body, &i.model, &vb).unwrap());
            if let Formula::Fix(_, z, inner) = body {
                prop_assert_eq!(ext.get(u), eval(&subst1(inner, z, &Formula::var(u)), &i.model, &ext).unwrap());
            }
        }
    }

    #[test]
    fn timed_duality(seed in any::<u64>()) {
        let i = instance(seed, true);
        let (a, b) = (i.phi.clone(), i.dl.entries()[0].1.clone());
        let ex = eval(&Formula::exists(a.clone(), b.clone()), &i.model, &i.v).unwrap();
        let fa = eval(&Formula::forall(Formula::not(a), Formula::not(b)), &i.model, &i.v).unwrap();
        prop_assert_eq!(ex, set::complement(&fa));
    }

    #[test]
    fn kleene_agrees_with_tarski(seed in any::<u64>()) {
        let i = instance(seed, seed % 3 == 0);
        prop_assume!(i.model.len() <= 4);
        let cfg = EvalConfig { fixpoints: FixpointMethod::Tarski, ..EvalConfig::default() };
        prop_assert_eq!(eval(&i.phi, &i.model, &i.v).unwrap(), eval_with(&i.phi, &i.model, &i.v, &cfg).unwrap());
    }

    #[test]
    fn nested_fixpoint_semantics(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(&mut rng, &ModelParams { max_states: 4, ..ModelParams::default() });
        let v = random_valuation(&mut rng, &model, &["P"]);
        let phi = random_two_level(&mut rng, &FormulaParams { free_vars: vec!["P".into()], ..FormulaParams::default() });
        if let Formula::Fix(_, z, body) = &phi {
            let direct = formula_function(z, body, &model, &v).unwrap();
            let composed = nested_function(z, body, &model, &v).unwrap().unwrap();
            for x in set::all_subsets(model.len()) {
                prop_assert_eq!(direct.apply(&x), composed.apply(&x));
            }
        }
    }
}
