use mucalc_formula::*;
use proptest::prelude::*;

fn p(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn v(s: &str) -> Formula {
    Formula::var(s)
}

#[test]
fn parses_simple_fixpoint() {
    assert!(p("nu Z. <a> Z").syntactically_equal(&Formula::nu("Z", Formula::dia(Labels::of(["a"]), v("Z")))));
}

#[test]
fn tt_and_ff_are_sugar() {
    assert!(p("tt").syntactically_equal(&Formula::nu("Z#", v("Z#"))));
    assert!(p("ff").syntactically_equal(&Formula::mu("Z#", v("Z#"))));
    assert_eq!(Formula::tt().to_string(), "tt");
}

#[test]
fn unclosed_label_set_is_reported() {
    let e = parse_formula("mu Z. <a Z").unwrap_err();
    assert_eq!((e.line, e.col), (1, 10));
    assert!(e.msg.contains("label set"), "{}", e.msg);
}

#[test]
fn unknown_token_is_reported() {
    let e = parse_formula("X\n  && $").unwrap_err();
    assert_eq!((e.line, e.col), (2, 6));
}

#[test]
fn precedence_and_binder_extent() {
    assert_eq!(p("!X && Y || Z"), Formula::or(Formula::and(Formula::not(v("X")), v("Y")), v("Z")));
    assert_eq!(p("mu Z. X && Z"), Formula::mu("Z", Formula::and(v("X"), v("Z"))));
    assert_eq!(p("(mu Z. Z) && X"), Formula::and(Formula::mu("Z", v("Z")), v("X")));
    assert_eq!(Formula::and(Formula::mu("Z", v("Z")), v("X")).to_string(), "(mu Z. Z) && X");
}

#[test]
fn label_forms() {
    assert_eq!(p("[*]X"), Formula::boxed(Labels::All, v("X")));
    assert_eq!(p("<-a,b>X"), Formula::dia(Labels::Except(["a".into(), "b".into()].into()), v("X")));
    assert_eq!(p("<>X"), Formula::dia(Labels::of(Vec::<String>::new()), v("X")));
    assert_eq!(p("forall{X}(exists{Y}(Z))"), Formula::forall(v("X"), Formula::exists(v("Y"), v("Z"))));
}

#[test]
fn well_formedness() {
    assert!(check_well_formed(&p("nu Z. <a> Z")).is_ok());
    let bad = check_well_formed(&p("nu Z. !Z")).unwrap_err();
    assert_eq!(bad.subformula, p("nu Z. !Z"));
    assert!(check_well_formed(&p("nu Z. !!Z")).is_ok());
}

#[test]
fn pnf_examples() {
    assert_eq!(to_pnf(&p("!(X && !Y)")), p("!X || Y"));
    assert_eq!(to_pnf(&p("!nu Z. <a> Z")), p("mu Z. [a] Z"));
    assert_eq!(to_pnf(&p("!forall{X}(Y)")), p("exists{!X}(!Y)"));
    assert!(is_pnf(&to_pnf(&p("!(mu X. [a] !(nu Y. !X && Y))"))));
    assert!(!is_pnf(&p("nu Z. !!Z")));
}

#[test]
fn substitution_examples() {
    let s = |f: &str, z: &str, r: Formula| substitute(&p(f), &[z.to_string()], &[r]).unwrap();
    assert_eq!(s("Z", "Z", p("[a]W")), p("[a]W"));
    assert_eq!(s("nu Z. Z", "Z", v("W")), p("nu Z. Z"));
    let r = s("nu Z. Z && W", "W", v("Z"));
    assert_eq!(r, p("nu Y. Y && Z"));
    assert!(r.syntactically_equal(&p("nu Z'1. Z'1 && Z")));
    assert!(matches!(
        substitute(&v("X"), &["X".into(), "X".into()], &[v("A"), v("B")]),
        Err(SubstError::Duplicate(_))
    ));
    assert!(matches!(
        substitute(&v("X"), &["X".into()], &[]),
        Err(SubstError::LengthMismatch { .. })
    ));
}

#[test]
fn simultaneous_substitution_does_not_chain() {
    let r = substitute(&p("X && Y"), &["X".into(), "Y".into()], &[v("Y"), v("X")]).unwrap();
    assert_eq!(r, p("Y && X"));
}

fn dl(entries: &[(&str, &str)]) -> DefinitionList {
    DefinitionList::from_entries(entries.iter().map(|(u, b)| (u.to_string(), p(b)))).unwrap()
}

#[test]
fn expansion_examples() {
    assert_eq!(DefinitionList::new().expand(&v("Z")), v("Z"));
    assert_eq!(dl(&[("U", "nu Z. <a> Z")]).expand(&v("U")), p("nu Z. <a> Z"));
    let d = dl(&[("U1", "nu Z. <a> Z"), ("U2", "mu W. U1 || <a> W")]);
    let e = d.expand(&p("<a> U2"));
    assert_eq!(e, p("<a> mu W. (nu Z. <a> Z) || <a> W"));
    // front-first form of the same expansion
    let rest = d.slice("U1", Slice::StrictSuffix).unwrap();
    assert_eq!(subst1(&rest.expand(&p("<a> U2")), "U1", &p("nu Z. <a> Z")), e);
    assert!(!e.all_vars().contains("U1") && !e.all_vars().contains("U2"));
}

#[test]
fn definition_list_operations() {
    let d = dl(&[("U1", "nu Z. Z"), ("U2", "mu Y. U1 && Y")]);
    assert_eq!(d.slice("U1", Slice::StrictSuffix).unwrap(), dl(&[("U2", "mu Y. U1 && Y")]));
    assert_eq!(d.slice("U2", Slice::StrictPrefix).unwrap(), dl(&[("U1", "nu Z. Z")]));
    assert_eq!(d.slice("U2", Slice::Prefix).unwrap(), d);
    assert_eq!(d.slice("U1", Slice::Suffix).unwrap(), d);
    assert!(matches!(d.slice("U9", Slice::Prefix), Err(DlError::Undefined(_))));
    assert!(!dl(&[("U1", "nu Z. Z")]).compatible(&dl(&[("U1", "mu Y. Y")])));
    assert!(dl(&[("U1", "nu Z. Z")]).compatible(&dl(&[("U2", "mu Y. U1 && Y")])));
    assert!(!dl(&[("U1", "nu Z. U2")]).compatible(&dl(&[("U2", "mu Y. Y")])));
    assert!(matches!(
        dl(&[("U1", "nu Z. Z")]).append("U1", p("mu Y. Y")),
        Err(DlError::Duplicate(_))
    ));
    assert!(matches!(
        dl(&[("U1", "nu Z. U2")]).append("U2", p("mu Y. Y")),
        Err(DlError::ForwardReference { .. })
    ));
    assert!(matches!(DefinitionList::new().append("U", p("<a>X")), Err(DlError::NotFixpoint(_))));
    assert!(matches!(
        dl(&[("U1", "nu Z. Z")]).append("U2", p("mu U1. U1")),
        Err(DlError::Bound(_))
    ));
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z", "W'1", "U#2"]).prop_map(Formula::var),
        Just(Formula::tt()),
        Just(Formula::ff()),
    ];
    let labels = prop_oneof![
        Just(Labels::All),
        Just(Labels::of(["a"])),
        Just(Labels::of(["a", "b"])),
        Just(Labels::Except(["b".to_string()].into())),
        Just(Labels::of(Vec::<String>::new())),
    ];
    leaf.prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (labels.clone(), inner.clone()).prop_map(|(k, a)| Formula::boxed(k, a)),
            (labels.clone(), inner.clone()).prop_map(|(k, a)| Formula::dia(k, a)),
            (prop::sample::select(vec!["X", "Z"]), inner.clone()).prop_map(|(z, a)| Formula::mu(z, a)),
            (prop::sample::select(vec!["Y", "Z"]), inner.clone()).prop_map(|(z, a)| Formula::nu(z, a)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::forall(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::exists(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_roundtrip(f in arb_formula()) {
        let text = f.to_string();
        let back = parse_formula(&text).unwrap();
        prop_assert!(back.syntactically_equal(&f), "{} reparsed as {}", text, back);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn pnf_output_is_pnf_and_idempotent(f in arb_formula()) {
        prop_assume!(check_well_formed(&f).is_ok());
        let g = to_pnf(&f);
        prop_assert!(is_pnf(&g), "{}", g);
        prop_assert!(to_pnf(&g).syntactically_equal(&g));
    }

    #[test]
    fn alpha_equality_is_consistent_with_hash(f in arb_formula()) {
        use std::hash::{Hash, Hasher};
        let renamed = rename_binders(&f, &mut 0);
        let h = |x: &Formula| { let mut s = std::collections::hash_map::DefaultHasher::new(); x.hash(&mut s); s.finish() };
        prop_assert_eq!(h(&f), h(&renamed));
        prop_assert_eq!(f.clone(), renamed);
    }
}

// Renames every binder to a brand-new name, independently of the library's
// substitution code.
fn rename_binders(f: &Formula, counter: &mut usize) -> Formula {
    fn go(f: &Formula, env: &mut Vec<(String, String)>, counter: &mut usize) -> Formula {
        match f {
            Formula::Var(z) => match env.iter().rev().find(|(a, _)| a == z) {
                Some((_, b)) => Formula::var(b.clone()),
                None => f.clone(),
            },
            Formula::Fix(s, z, body) => {
                *counter += 1;
                let fresh = format!("B{counter}");
                env.push((z.clone(), fresh.clone()));
                let b = go(body, env, counter);
                env.pop();
                Formula::fix(*s, fresh, b)
            }
            Formula::Not(a) => Formula::not(go(a, env, counter)),
            Formula::And(a, b) => Formula::and(go(a, env, counter), go(b, env, counter)),
            Formula::Or(a, b) => Formula::or(go(a, env, counter), go(b, env, counter)),
            Formula::Box(k, a) => Formula::boxed(k.clone(), go(a, env, counter)),
            Formula::Diamond(k, a) => Formula::dia(k.clone(), go(a, env, counter)),
            Formula::Forall(a, b) => Formula::forall(go(a, env, counter), go(b, env, counter)),
            Formula::Exists(a, b) => Formula::exists(go(a, env, counter), go(b, env, counter)),
        }
    }
    go(f, &mut Vec::new(), counter)
}

#[test]
fn alternation_depth_examples() {
    let ad = |s: &str| parse_formula(s).unwrap().alternation_depth();
    assert_eq!(ad("<a>P"), 0);
    assert_eq!(ad("tt && ff"), 0);
    assert_eq!(ad("nu X. <a>X"), 1);
    assert_eq!(ad("nu X. mu Y. nu Z. X && Y && Z"), 3);
    assert_eq!(ad("nu X. mu Y. (tt || ff || <a>Y) && X"), 2);
    assert_eq!(ad("mu X. mu Y. X || Y"), 1);
    assert_eq!(ad("(nu X. X) && (mu Y. nu Z. Y || Z)"), 2);
}
