use mucalc_formula::{check_well_formed, is_pnf, Formula};
use mucalc_gen::*;
use mucalc_models::validate_tts;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn generation_is_seeded() {
    let fp = FormulaParams::default();
    let a = random_formula(&mut rng(4), &fp);
    let b = random_formula(&mut rng(4), &fp);
    assert!(a.syntactically_equal(&b));
    assert_eq!(random_model(&mut rng(4), &ModelParams::default()), random_model(&mut rng(4), &ModelParams::default()));
}

proptest! {
    #[test]
    fn models_respect_their_parameters(seed in any::<u64>(), timed in any::<bool>(), max in 1usize..7) {
        let p = ModelParams { max_states: max, actions: 2, timed, ..ModelParams::default() };
        let m = random_model(&mut rng(seed), &p);
        prop_assert!(!m.is_empty() && m.len() <= max);
        prop_assert!(m.alphabet().len() <= 2);
        prop_assert_eq!(m.is_timed(), timed);
        if timed {
            prop_assert!(validate_tts(&m).is_ok());
        }
    }

    #[test]
    fn formulas_respect_their_parameters(seed in any::<u64>(), timed in any::<bool>()) {
        let fp = FormulaParams { timed, free_vars: vec!["P".into()], ..FormulaParams::default() };
        let phi = random_formula(&mut rng(seed), &fp);
        prop_assert!(check_well_formed(&phi).is_ok());
        prop_assert!(is_pnf(&phi));
        prop_assert!(phi.depth() <= fp.max_depth);
        prop_assert!(phi.alternation_depth() <= fp.max_alternation);
        prop_assert!(phi.free_vars().iter().all(|z| z == "P"));
        prop_assert!(timed || !phi.is_timed());
    }

    #[test]
    fn definition_lists_bind_fixpoints(seed in any::<u64>()) {
        let dl = random_definition_list(&mut rng(seed), &FormulaParams::default(), 3);
        prop_assert_eq!(dl.len(), 3);
        for (k, (u, body)) in dl.entries().iter().enumerate() {
            prop_assert_eq!(u, &format!("U{}", k + 1));
            prop_assert!(body.is_fixpoint());
            let later: Vec<String> = (k + 1..=3).map(|i| format!("U{i}")).collect();
            prop_assert!(body.free_vars().iter().all(|z| !later.contains(z)));
        }
    }

    #[test]
    fn two_level_formulas_nest_a_fixpoint(seed in any::<u64>()) {
        let phi = random_two_level(&mut rng(seed), &FormulaParams::default());
        let Formula::Fix(_, z, body) = &phi else { panic!("not a fixpoint: {phi}") };
        prop_assert_eq!(z.as_str(), "Z");
        let mut inner = false;
        body.visit(&mut |f| inner |= f.is_fixpoint());
        prop_assert!(inner);
    }
}
