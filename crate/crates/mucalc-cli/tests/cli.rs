use std::path::Path;

use mucalc_cli::suites::{completeness, mutate};
use mucalc_cli::{run, EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use mucalc_formula::{parse_formula, to_pnf};
use mucalc_gen::{random_formula, random_model, random_states, random_valuation, FormulaParams, ModelParams};
use mucalc_semantics::sequent_valid;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn mucalc(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("mucalc").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn nu_on_l1_is_valid() {
    let r = mucalc(&["check", "--model", "l1", "--formula", "nu Z. <a> Z", "--states", "all"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.starts_with("VALID\n"));
    assert!(r.out.contains("certificate replayed"));
}

#[test]
fn mu_on_l1_is_refuted_at_s0() {
    let r = mucalc(&["check", "--model", "l1", "--formula", "mu Z. <a> Z", "--states", "s0"]);
    assert_eq!(r.code, EXIT_FAILED);
    assert!(r.out.starts_with("INVALID\n"));
    assert!(r.out.contains("refuting state: s0"));
}

#[test]
fn syntax_errors_exit_2() {
    let r = mucalc(&["fmt", "--formula", "mu Z. <a Z"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("expected `>`"), "{}", r.err);
    assert!(r.out.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mucalc(&["check", "--model", "nope", "--formula", "tt"]).code, EXIT_USAGE);
    assert_eq!(mucalc(&["check", "--model", "l1", "--formula", "tt", "--states", "s9"]).code, EXIT_USAGE);
    assert_eq!(mucalc(&["check", "--model", "l1", "--formula", "tt", "--strategy", "best"]).code, EXIT_USAGE);
    assert_eq!(mucalc(&["check", "--model", "l1", "--formula", "exists{tt}(tt)"]).code, EXIT_USAGE);
    assert_eq!(mucalc(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(mucalc(&[]).code, EXIT_USAGE);
    assert_eq!(mucalc(&["--help"]).code, EXIT_OK);
}

#[test]
fn budget_exhaustion_is_unknown() {
    let r = mucalc(&[
        "check", "--model", "l1", "--formula", "mu Z. <a> Z", "--states", "s0", "--strategy", "nu-complete", "--budget", "20",
    ]);
    assert_eq!(r.code, EXIT_BUDGET);
    assert!(r.out.starts_with("UNKNOWN\n"));
}

#[test]
fn fmt_prints_positive_normal_form() {
    let r = mucalc(&["fmt", "--formula", "!(mu X. <a>X && P)"]);
    assert_eq!(r.code, EXIT_OK);
    let printed = parse_formula(r.out.trim()).unwrap();
    assert!(printed.syntactically_equal(&parse_formula("nu X. [a]X || !P").unwrap()));
}

#[test]
fn oracle_prints_denotations() {
    assert_eq!(mucalc(&["oracle", "--model", "chain", "--formula", "mu Z. [a] Z"]).out, "{c0, c1, c2}\n");
    assert_eq!(mucalc(&["oracle", "--model", "t1", "--formula", "exists{tt}(<a>tt)"]).out, "{t0, t1, t2}\n");
    let r = mucalc(&["oracle", "--model", "l1", "--formula", "P"]);
    assert_eq!(r.out, "{}\n");
    assert!(r.err.contains("warning: free variable P"));
}

#[test]
fn model_and_valuation_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.txt");
    let val = dir.path().join("v.txt");
    std::fs::write(&model, "model: lts\nstates: p q\ntrans:\n  p a q\n").unwrap();
    std::fs::write(&val, "P: q\n").unwrap();
    let args = ["--model", path_str(&model), "--valuation", path_str(&val)];
    let r = mucalc(&[&["check", "--formula", "<a> P"][..], &args].concat());
    assert_eq!(r.code, EXIT_FAILED, "{}{}", r.out, r.err);
    assert!(r.out.contains("refuting state: q"));
    let r = mucalc(&[&["check", "--formula", "<a> P", "--states", "p"][..], &args].concat());
    assert_eq!(r.code, EXIT_OK);
    std::fs::write(&val, "P: r\n").unwrap();
    assert_eq!(mucalc(&[&["oracle", "--formula", "P"][..], &args].concat()).code, EXIT_USAGE);
}

#[test]
fn verify_and_deps_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.txt");
    let graph = dir.path().join("g.txt");
    let r = mucalc(&["check", "--model", "l1", "--formula", "nu Z. <a> Z", "--cert", path_str(&cert)]);
    assert_eq!(r.code, EXIT_OK);
    let r = mucalc(&["verify", "--model", "l1", "--cert", path_str(&cert)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.out);
    assert!(r.out.starts_with("VERIFIED\n"));
    let r = mucalc(&["deps", "--model", "l1", "--cert", path_str(&cert), "--out", path_str(&graph)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let g = std::fs::read_to_string(&graph).unwrap();
    assert!(g.lines().any(|l| l == "companion 1 1 s1 s0"), "{g}");
    // Certificates are tied to their model.
    assert_eq!(mucalc(&["verify", "--model", "chain", "--cert", path_str(&cert)]).code, EXIT_FAILED);
}

#[test]
fn tampered_certificates_never_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (_, corpus) = completeness(40, 77);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tried = 0;
    for (i, p) in corpus.iter().enumerate().take(20) {
        let model = dir.path().join(format!("m{i}.txt"));
        std::fs::write(&model, p.model.to_string()).unwrap();
        let text = mucalc_tableau::emit_certificate(&p.tableau, &p.model, &p.v, p.mode);
        for k in 0..3 {
            let cert = dir.path().join(format!("c{i}_{k}.txt"));
            std::fs::write(&cert, mutate(&text, &p.model, &mut rng)).unwrap();
            let r = mucalc(&["verify", "--model", path_str(&model), "--cert", path_str(&cert)]);
            assert_ne!(r.code, EXIT_OK, "{}", std::fs::read_to_string(&cert).unwrap());
            tried += 1;
        }
        let cert = dir.path().join(format!("c{i}.txt"));
        std::fs::write(&cert, &text).unwrap();
        assert_eq!(mucalc(&["verify", "--model", path_str(&model), "--cert", path_str(&cert)]).code, EXIT_OK);
    }
    assert!(tried >= 30);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["check", "--model", "t1", "--formula", "forall{ff}(tt)", "--strategy", "naive-subset", "--seed", "3"][..],
        &["check", "--model", "l1", "--formula", "mu X. [a]X || <a>tt", "--strategy", "nu-complete"][..],
        &["selfcheck", "--scope", "small"][..],
    ] {
        let (a, b) = (mucalc(args), mucalc(args));
        assert_eq!((a.code, &a.out, &a.err), (b.code, &b.out, &b.err));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn check_agrees_with_oracle(seed in any::<u64>(), timed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(&mut rng, &ModelParams { max_states: 4, timed, ..ModelParams::default() });
        let fp = FormulaParams { max_depth: 4, timed, free_vars: vec!["P".into()], ..FormulaParams::default() };
        let phi = random_formula(&mut rng, &fp);
        let v = random_valuation(&mut rng, &model, &["P"]);
        let states = random_states(&mut rng, &model);
        let valid = sequent_valid(&states, &Default::default(), &to_pnf(&phi), &model, &v).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (mf, vf) = (dir.path().join("m.txt"), dir.path().join("v.txt"));
        std::fs::write(&mf, model.to_string()).unwrap();
        std::fs::write(&vf, v.to_text(&model)).unwrap();
        let names: Vec<&str> = states.ones().map(|s| model.state_name(s)).collect();
        let list = if names.is_empty() { String::new() } else { names.join(",") };
        let text = phi.to_string();
        for strategy in ["oracle-tnf", "nu-complete", "naive-subset"] {
            let r = mucalc(&[
                "check", "--model", path_str(&mf), "--valuation", path_str(&vf), "--formula", &text,
                "--states", &list, "--strategy", strategy,
            ]);
            match r.code {
                EXIT_OK => prop_assert!(valid, "{strategy} proved {text}"),
                EXIT_FAILED => prop_assert!(!valid, "{strategy} refuted {text}"),
                EXIT_BUDGET => prop_assert!(strategy != "oracle-tnf"),
                code => prop_assert!(false, "exit {code}: {}", r.err),
            }
        }
    }
}
