use mucalc_lattice::set::{self, Set};
use mucalc_lattice::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn s(n: usize, xs: &[usize]) -> Set {
    set::from_elems(n, xs.iter().copied())
}

fn add_zero() -> MonotoneSetFn {
    MonotoneSetFn::unary(2, |x| {
        let mut y = x.clone();
        y.insert(0);
        y
    })
    .unwrap()
}

#[test]
fn well_foundedness_and_cycles() {
    assert!(FiniteRelation::from_pairs(2, [(0, 1)]).is_well_founded().is_ok());
    assert_eq!(FiniteRelation::from_pairs(2, [(0, 0)]).is_well_founded(), Err(vec![0]));
    let r = FiniteRelation::from_pairs(4, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 2)]);
    assert_eq!(r.shortest_cycle().unwrap().len(), 2);
}

#[test]
fn quotient_examples() {
    let u = quotient_analysis(&FiniteRelation::universal_on(2, &set::full(2)));
    assert_eq!(u.classes, vec![vec![0, 1]]);
    assert!(u.qwf);
    let q = quotient_analysis(&FiniteRelation::from_pairs(2, [(0, 1)]));
    assert_eq!(q.classes, vec![vec![0], vec![1]]);
    assert!(q.strict.contains(0, 1) && !q.strict.contains(1, 0));
    assert!(q.qwf && q.qwo);
    assert_eq!(FiniteRelation::from_pairs(2, [(0, 1)]).pseudo_minima(&set::full(2)), s(2, &[0]));
    let cyc = quotient_analysis(&FiniteRelation::from_pairs(3, [(0, 1), (1, 0), (1, 2)]));
    assert_eq!(cyc.classes, vec![vec![0, 1], vec![2]]);
    assert!(cyc.qwo);
}

#[test]
fn support_ordering_examples() {
    let f = add_zero();
    assert_eq!(is_support_ordering(&f, &s(2, &[0]), &FiniteRelation::empty(2)), Ok(()));
    assert_eq!(is_support_ordering(&f, &s(2, &[1]), &FiniteRelation::empty(2)), Err(1));
    let nu = extremal_fixpoint(&f, Sigma::Nu);
    assert!(is_support_ordering(&f, &nu, &FiniteRelation::universal_on(2, &nu)).is_ok());
}

#[test]
fn fixpoint_examples() {
    let id = MonotoneSetFn::unary(3, |x| x.clone()).unwrap();
    assert_eq!(extremal_fixpoint(&id, Sigma::Mu), set::empty(3));
    assert_eq!(extremal_fixpoint(&add_zero(), Sigma::Mu), s(2, &[0]));
    assert_eq!(extremal_fixpoint(&add_zero(), Sigma::Nu), s(2, &[0, 1]));
}

#[test]
fn maximal_support_examples() {
    let m = sigma_maximal_support(&add_zero(), Sigma::Mu);
    assert_eq!(m.x, s(2, &[0]));
    assert!(m.prec.is_empty());
    assert!(m.well_founded && m.total && m.flags_consistent());
    let n = sigma_maximal_support(&add_zero(), Sigma::Nu);
    assert_eq!(n.prec, FiniteRelation::universal_on(2, &s(2, &[0, 1])));
    assert!(!n.well_founded && n.qwf);
}

#[test]
fn compose_examples() {
    let fy = MonotoneSetFn::binary(3, |_, y| y.clone()).unwrap();
    let gx = MonotoneSetFn::binary(3, |x, _| x.clone()).unwrap();
    let gy = fy.clone();
    for sigma in [Sigma::Mu, Sigma::Nu] {
        let h = compose_sigma(&fy, &gx, sigma);
        assert!(set::all_subsets(3).all(|x| h.apply(&x) == x));
    }
    let top = compose_sigma(&fy, &gy, Sigma::Nu);
    let bot = compose_sigma(&fy, &gy, Sigma::Mu);
    for x in set::all_subsets(3) {
        assert_eq!(top.apply(&x), set::full(3));
        assert_eq!(bot.apply(&x), set::empty(3));
    }
}

#[test]
fn non_monotone_is_rejected() {
    let e = MonotoneSetFn::unary(2, set::complement).unwrap_err();
    assert_eq!(e.arg, 0);
}

#[test]
fn support_theory_examples() {
    let r = support_theory_check(&add_zero(), Scope::Exhaustive);
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.checks.len(), 6);
    let id = MonotoneSetFn::unary(2, |x| x.clone()).unwrap();
    assert!(support_theory_check(&id, Scope::Exhaustive).passed());
    let full = MonotoneSetFn::unary(3, |_| set::full(3)).unwrap();
    assert!(support_theory_check(&full, Scope::Exhaustive).passed());
    assert_eq!(extremal_fixpoint(&full, Sigma::Nu), set::full(3));
}

#[test]
fn monotone_enumeration_counts() {
    // Dedekind numbers 2, 3, 6, 20 give the coordinate counts.
    let counts: Vec<usize> = (0..=3).map(|n| all_monotone(n).len()).collect();
    assert_eq!(counts, vec![1, 3, 36, 8000]);
}

#[test]
fn support_theory_on_every_small_function() {
    for n in 0..=2 {
        for f in all_monotone(n) {
            let r = support_theory_check(&f, Scope::Exhaustive);
            assert!(r.passed(), "{r:?}");
        }
    }
}

#[test]
fn support_theory_sampled_on_larger_carrier() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..4 {
        let f = random_monotone(5, &mut rng);
        let r = support_theory_check(&f, Scope::Sampled { samples: 2000, seed });
        assert!(r.passed(), "{r:?}");
    }
}

fn arb_relation(n: usize) -> impl Strategy<Value = FiniteRelation> {
    prop::collection::vec((0..n, 0..n), 0..n * n).prop_map(move |p| FiniteRelation::from_pairs(n, p))
}

proptest! {
    #[test]
    fn fixpoints_agree_with_tarski(seed in any::<u64>(), n in 1usize..=4) {
        let f = random_monotone(n, &mut ChaCha8Rng::seed_from_u64(seed));
        for sigma in [Sigma::Mu, Sigma::Nu] {
            prop_assert_eq!(extremal_fixpoint(&f, sigma), tarski_fixpoint(&f, sigma));
        }
    }

    #[test]
    fn maximal_supports_are_supports(seed in any::<u64>(), n in 1usize..=6) {
        let f = random_monotone(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = sigma_maximal_support(&f, Sigma::Mu);
        prop_assert!(is_support_ordering(&f, &m.x, &m.prec).is_ok());
        prop_assert!(m.is_well_ordering());
        let v = sigma_maximal_support(&f, Sigma::Nu);
        prop_assert!(is_support_ordering(&f, &v.x, &v.prec).is_ok());
        prop_assert_eq!(&v.prec, &FiniteRelation::universal_on(n, &v.x));
    }

    #[test]
    fn closure_of_dag_is_well_founded(pairs in prop::collection::vec((0usize..6, 0usize..6), 0..20)) {
        // Orient every pair downward so the relation is acyclic.
        let r = FiniteRelation::from_pairs(6, pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.max(b), a.min(b))));
        prop_assert!(r.is_well_founded().is_ok());
        prop_assert!(r.transitive_closure().is_well_founded().is_ok());
    }

    #[test]
    fn total_qwf_is_qwo(r in arb_relation(5)) {
        let all = set::full(5);
        let mut t = r.clone();
        for a in 0..5 {
            for b in a + 1..5 {
                if !t.contains(a, b) && !t.contains(b, a) {
                    t.insert(a, b);
                }
            }
        }
        prop_assert!(t.is_total_on(&all));
        let q = quotient_analysis(&t);
        prop_assert_eq!(q.qwf, q.qwo);
        prop_assert_eq!(q.classes.iter().map(Vec::len).sum::<usize>(), 5);
    }

    #[test]
    fn cycle_witness_is_a_cycle(r in arb_relation(5)) {
        if let Err(c) = r.is_well_founded() {
            for i in 0..c.len() {
                prop_assert!(r.contains(c[i], c[(i + 1) % c.len()]));
            }
        }
    }

    #[test]
    fn composed_functions_are_monotone(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_monotone(2 * n, &mut rng), random_monotone(2 * n, &mut rng));
        // Split a 2n-element monotone function into a binary one over n.
        let split = |g: MonotoneSetFn| MonotoneSetFn::binary(n, move |x, y| {
            let mut z = set::empty(2 * n);
            z.extend(x.ones());
            z.extend(y.ones().map(|e| e + n));
            set::from_elems(n, g.apply(&z).ones().filter(|&e| e < n))
        }).unwrap();
        let h = compose_sigma(&split(a), &split(b), Sigma::Mu);
        for x in set::all_subsets(n) {
            for e in 0..n {
                let mut y = x.clone();
                y.insert(e);
                prop_assert!(h.apply(&x).is_subset(&h.apply(&y)));
            }
        }
    }
}
