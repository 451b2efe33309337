//! Runs the property suites in parallel and reports one line per suite.

use std::fmt::Write as _;

use crate::suites::{self, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Small,
    Full,
}

/// Instance counts for every suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counts {
    pub soundness: usize,
    pub completeness: usize,
    pub nu_complete: usize,
    pub support_functions5: usize,
    pub support_samples: usize,
    pub tarski_random4: usize,
    pub tarski_formulas: usize,
    pub lemmas: usize,
    pub timed: usize,
    pub nested: usize,
    pub mutations: usize,
}

impl Counts {
    pub fn for_scope(scope: Scope) -> Counts {
        match scope {
            Scope::Small => Counts {
                soundness: 100,
                completeness: 100,
                nu_complete: 50,
                support_functions5: 2,
                support_samples: 500,
                tarski_random4: 200,
                tarski_formulas: 50,
                lemmas: 100,
                timed: 50,
                nested: 40,
                mutations: 40,
            },
            Scope::Full => Counts {
                soundness: 1000,
                completeness: 1000,
                nu_complete: 500,
                support_functions5: 10,
                support_samples: 1000,
                tarski_random4: 2000,
                tarski_formulas: 300,
                lemmas: 500,
                timed: 500,
                nested: 200,
                mutations: 200,
            },
        }
    }
}

/// Suites keyed by criterion number, in order.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub suites: Vec<(u8, Suite)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|(_, s)| s.passed())
    }

    pub fn get(&self, criterion: u8) -> Option<&Suite> {
        self.suites.iter().find(|(c, _)| *c == criterion).map(|(_, s)| s)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.suites {
            let verdict = if s.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{verdict} {c:>2} {}: {}", s.name, s.summary());
        }
        let _ = writeln!(out, "{}", if self.passed() { "all suites passed" } else { "some suites failed" });
        out
    }
}

pub fn run(scope: Scope) -> Report {
    run_counts(Counts::for_scope(scope))
}

/// Independent suites run on their own threads; the suites over proved
/// tableaux wait for the searches that produce them.
pub fn run_counts(c: Counts) -> Report {
    let (proofs, lattice, tarski, lemmas, nested) = std::thread::scope(|s| {
        let proofs = s.spawn(|| {
            let ((s1, p1), (s2, p2)) = std::thread::scope(|s| {
                let a = s.spawn(|| suites::soundness(c.soundness, 1));
                let b = s.spawn(|| suites::completeness(c.completeness, 2));
                (a.join().expect("suite thread"), b.join().expect("suite thread"))
            });
            let ((s3, p3), (s9, p9)) = std::thread::scope(|s| {
                let a = s.spawn(|| suites::nu_complete(c.nu_complete, 3));
                let b = s.spawn(|| suites::timed(c.timed, 9));
                (a.join().expect("suite thread"), b.join().expect("suite thread"))
            });
            let corpus: Vec<_> = [p1, p2, p3, p9].into_iter().flatten().collect();
            let (s7, s8, s10, s12) = std::thread::scope(|s| {
                let a = s.spawn(|| suites::node_formulas(&corpus));
                let b = s.spawn(|| suites::support_lemma(&corpus));
                let d = s.spawn(|| suites::bradfield(&corpus));
                let e = s.spawn(|| suites::certificates(&corpus, c.mutations, 12));
                (
                    a.join().expect("suite thread"),
                    b.join().expect("suite thread"),
                    d.join().expect("suite thread"),
                    e.join().expect("suite thread"),
                )
            });
            vec![(1, s1), (2, s2), (3, s3), (7, s7), (8, s8), (9, s9), (10, s10), (12, s12)]
        });
        let lattice = s.spawn(|| suites::support_theory(c.support_functions5, c.support_samples, 4));
        let tarski = s.spawn(|| suites::tarski(c.tarski_random4, c.tarski_formulas, 5));
        let lemmas = s.spawn(|| suites::semantics_lemmas(c.lemmas, 6));
        let nested = s.spawn(|| suites::nested(c.nested, 11));
        (
            proofs.join().expect("suite thread"),
            lattice.join().expect("suite thread"),
            tarski.join().expect("suite thread"),
            lemmas.join().expect("suite thread"),
            nested.join().expect("suite thread"),
        )
    });
    let mut suites = proofs;
    suites.extend([(4, lattice), (5, tarski), (6, lemmas), (11, nested)]);
    suites.sort_by_key(|(c, _)| *c);
    Report { suites }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scope_covers_every_criterion() {
        let report = run(Scope::Small);
        let ids: Vec<u8> = report.suites.iter().map(|(c, _)| *c).collect();
        assert_eq!(ids, (1..=12).collect::<Vec<u8>>());
        assert!(report.passed(), "{}", report.render());
        assert_eq!(report.render().lines().count(), 13);
    }

    #[test]
    fn full_scope_meets_the_minimum_counts() {
        let c = Counts::for_scope(Scope::Full);
        assert!(c.soundness >= 1000 && c.completeness >= 1000);
        assert!(c.nu_complete >= 500 && c.timed >= 500 && c.lemmas >= 500);
        assert!(c.support_functions5 * c.support_samples >= 10_000);
        assert!(c.nested >= 200 && c.mutations >= 100);
    }
}
