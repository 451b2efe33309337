use mucalc_formula::Labels;
use mucalc_lattice::set;
use mucalc_models::*;
use proptest::prelude::*;

const L1: &str = "model: lts\nstates: s0 s1\ntrans:\n  s0 a s1\n  s1 a s1\n";
const T1: &str = "# three-state timed system\nmodel: tts\nstates: t0 t1 t2\ntrans:\n  t2 a t0\ntick:\n  t0 t1\n  t1 t2\n  t2 t2\n";

fn a() -> Labels {
    Labels::of(["a"])
}

fn chain() -> Model {
    Model::lts(&["c0", "c1", "c2"], &[("c0", "a", "c1"), ("c1", "a", "c2")])
}

#[test]
fn loads_l1_and_t1() {
    let l1 = load_model(L1).unwrap();
    assert_eq!(l1.kind(), ModelKind::Lts);
    assert_eq!(l1.len(), 2);
    assert_eq!(l1.transitions().len(), 2);
    let t1 = load_model(T1).unwrap();
    assert_eq!(t1.kind(), ModelKind::Tts);
    assert_eq!(t1.len(), 3);
    assert_eq!(t1.tick(2), Some(2));
    assert_eq!(load_model(&t1.to_string()).unwrap(), t1);
}

#[test]
fn loader_errors() {
    let e = load_model("model: lts\nstates: s0\ntrans:\n  s0 a s9\n").unwrap_err();
    assert_eq!(e, LoadError::Model { line: 4, source: BuildError::UndeclaredState("s9".into()) });
    let e = load_model("model: tts\nstates: s0 s1\ntick:\n  s0 s1\n  s0 s0\n").unwrap_err();
    assert!(matches!(e, LoadError::Model { source: BuildError::DuplicateTick(_), .. }));
    assert!(matches!(load_model("model: lts\nstates: s0\ntick:\n s0 s0\n"), Err(LoadError::Model { source: BuildError::TickInLts, .. })));
    assert!(matches!(load_model("states: s0\n"), Err(LoadError::Syntax { line: 1, .. })));
    assert!(matches!(
        load_model("model: lts\nstates: s0\nalphabet: b\ntrans:\n s0 a s0\n"),
        Err(LoadError::Model { source: BuildError::UndeclaredAction(_), .. })
    ));
}

#[test]
fn predecessor_examples() {
    let l1 = load_model(L1).unwrap();
    assert_eq!(l1.pred_dia(&a(), &set::singleton(2, 1)), l1.all_states());
    let c = chain();
    assert_eq!(c.pred_box(&a(), &c.no_states()), set::singleton(3, 2));
    assert_eq!(c.pred_box(&a(), &c.all_states()), c.all_states());
    assert_eq!(c.pred_dia(&Labels::All, &c.all_states()), set::from_elems(3, [0, 1]));
    assert_eq!(c.pred_dia(&Labels::Except(["a".into()].into()), &c.all_states()), c.no_states());
}

#[test]
fn delay_profile_examples() {
    let t1 = load_model(T1).unwrap();
    assert_eq!(t1.tsucc(0, 2), Some(2));
    assert_eq!(t1.tsucc_lt(0, 2), set::from_elems(3, [0, 1]));
    assert_eq!(t1.tsucc(0, 0), Some(0));
    assert_eq!(t1.delay_profile(0).horizon, Horizon::Periodic { prefix: 2, period: 1 });
    assert_eq!(t1.tsucc(0, 1000), Some(2));
}

#[test]
fn validate_tts_examples() {
    assert_eq!(validate_tts(&load_model(T1).unwrap()), Ok(()));
    let broken = load_model("model: tts\nstates: s x y z\ndelays:\n  s 1 x\n  s 2 y\n  x 1 z\n").unwrap();
    assert_eq!(validate_tts(&broken), Err(TtsViolation::Additivity { state: "s".into(), d1: 1, d2: 1 }));
    let stuck = Model::tts(&["s"], &[], &[]);
    assert_eq!(stuck.delay_profile(0).max_delay(), Some(0));
    assert_eq!(validate_tts(&stuck), Ok(()));
    let nondet = load_model("model: tts\nstates: s x y\ndelays:\n  s 1 x\n  s 1 y\n").unwrap();
    assert!(matches!(validate_tts(&nondet), Err(TtsViolation::Determinism { delay: 1, .. })));
    let gap = load_model("model: tts\nstates: s x\ndelays:\n  s 0 x\n").unwrap();
    assert!(matches!(validate_tts(&gap), Err(TtsViolation::Reflexivity { .. })));
}

#[test]
fn valuations_and_state_lists() {
    let l1 = load_model(L1).unwrap();
    let v = load_valuation("P: s1\n# comment\nQ:\n", &l1).unwrap();
    assert_eq!(v.get("P"), set::singleton(2, 1));
    assert_eq!(v.get("Q"), l1.no_states());
    assert!(!v.is_bound("R") && v.get("R").is_clear());
    assert!(load_valuation("P: s7\n", &l1).is_err());
    assert!(load_valuation("U#1: s0\n", &l1).is_err());
    assert_eq!(l1.parse_states("all").unwrap(), l1.all_states());
    assert_eq!(l1.parse_states("s1").unwrap(), set::singleton(2, 1));
    assert_eq!(l1.format_states(&l1.all_states()), "{s0, s1}");
}

fn arb_model() -> impl Strategy<Value = Model> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec((0..n, 0..3usize, 0..n), 0..3 * n),
            prop::collection::vec(prop::option::of(0..n), n),
        )
            .prop_map(move |(trans, tick)| {
                let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
                let acts = ["a", "b", "c"];
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let tr: Vec<(&str, &str, &str)> = trans.iter().map(|&(s, a, t)| (refs[s], acts[a], refs[t])).collect();
                let tk: Vec<(&str, &str)> = tick.iter().enumerate().filter_map(|(s, t)| t.map(|t| (refs[s], refs[t]))).collect();
                Model::build(ModelKind::Tts, &refs, Some(&acts), &tr, &tk).unwrap()
            })
    })
}

fn arb_labels() -> impl Strategy<Value = Labels> {
    prop_oneof![
        Just(Labels::All),
        Just(Labels::of(["a"])),
        Just(Labels::of(["a", "c"])),
        Just(Labels::Except(["b".into()].into())),
    ]
}

proptest! {
    #[test]
    fn pred_is_monotone_and_dual(m in arb_model(), k in arb_labels(), b1 in any::<u64>(), b2 in any::<u64>()) {
        let n = m.len();
        let s1 = set::from_bits(n, b1);
        let s2 = set::union(&s1, &set::from_bits(n, b2));
        for mode in [Modality::Dia, Modality::Box] {
            prop_assert!(m.pred(mode, &k, &s1).is_subset(&m.pred(mode, &k, &s2)));
        }
        let dual = set::complement(&m.pred_dia(&k, &set::complement(&s1)));
        prop_assert_eq!(m.pred_box(&k, &s1), dual);
    }

    #[test]
    fn delay_profiles_stabilize(m in arb_model()) {
        let n = m.len();
        prop_assert_eq!(validate_tts(&m), Ok(()));
        for s in 0..n {
            let p = m.delay_profile(s);
            if let Horizon::Periodic { prefix, period } = p.horizon {
                prop_assert!(prefix + period <= n);
            }
            for d in n..3 * n {
                prop_assert_eq!(m.tsucc_lt(s, d), m.tsucc_lt(s, n));
            }
            for d in 0..3 * n {
                // Stepping one tick from tsucc(s, d) agrees with tsucc(s, d + 1).
                let next = m.tsucc(s, d).and_then(|t| m.tick(t));
                prop_assert_eq!(next, m.tsucc(s, d + 1));
            }
        }
    }

    #[test]
    fn model_text_roundtrip(m in arb_model()) {
        prop_assert_eq!(load_model(&m.to_string()).unwrap(), m);
    }
}
