use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::monotone::{extremal_fixpoint, kleene_stages, random_subset, MonotoneSetFn, Sigma};
use crate::relation::{quotient_analysis, FiniteRelation};
use crate::set::{self, Set};

/// A set with a relation on it, plus the order-theoretic flags derived from
/// the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportOrdering {
    pub x: Set,
    pub prec: FiniteRelation,
    pub well_founded: bool,
    pub total: bool,
    pub qwf: bool,
}

impl SupportOrdering {
    pub fn new(x: Set, prec: FiniteRelation) -> SupportOrdering {
        let well_founded = prec.is_well_founded().is_ok();
        let total = prec.is_total_on(&x);
        let qwf = quotient_analysis(&prec).qwf;
        SupportOrdering {
            x,
            prec,
            well_founded,
            total,
            qwf,
        }
    }

    /// Recomputes the flags and compares them with the stored ones.
    pub fn flags_consistent(&self) -> bool {
        *self == SupportOrdering::new(self.x.clone(), self.prec.clone())
    }

    /// Well-ordering: total and well-founded.
    pub fn is_well_ordering(&self) -> bool {
        self.total && self.well_founded
    }

    /// σ-compatibility, assuming the pair is a support ordering for the
    /// function at hand: always for ν, well-foundedness for μ.
    pub fn compatible(&self, sigma: Sigma) -> bool {
        match sigma {
            Sigma::Nu => true,
            Sigma::Mu => self.well_founded,
        }
    }
}

/// Checks `x ∈ f(≺⁻¹⟨x⟩)` for every `x ∈ X`; on failure returns the first
/// offending element.
pub fn is_support_ordering(f: &MonotoneSetFn, x: &Set, prec: &FiniteRelation) -> Result<(), usize> {
    for e in x.ones() {
        if !f.apply(&prec.predecessors(e)).contains(e) {
            return Err(e);
        }
    }
    Ok(())
}

/// For ν the universal relation on `νf`; for μ the stage order on `μf`,
/// ties inside a stage broken by ascending element id.
pub fn sigma_maximal_support(f: &MonotoneSetFn, sigma: Sigma) -> SupportOrdering {
    let n = f.carrier_size();
    match sigma {
        Sigma::Nu => {
            let x = extremal_fixpoint(f, Sigma::Nu);
            let prec = FiniteRelation::universal_on(n, &x);
            SupportOrdering::new(x, prec)
        }
        Sigma::Mu => {
            let stages = kleene_stages(f);
            let mut order: Vec<usize> = Vec::new();
            for w in stages.windows(2) {
                order.extend(set::difference(&w[1], &w[0]).ones());
            }
            let x = stages.last().cloned().unwrap();
            let prec = FiniteRelation::from_pairs(
                n,
                order
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &a)| order[i + 1..].iter().map(move |&b| (a, b))),
            );
            SupportOrdering::new(x, prec)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Every subset and every relation over the carrier (carrier ≤ 3).
    Exhaustive,
    /// Random sets and relations.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportReport {
    pub checks: Vec<CheckOutcome>,
}

impl SupportReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.counterexample.is_none())
    }

    pub fn cases(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }

    fn record(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let entry = match self.checks.iter_mut().position(|c| c.name == name) {
            Some(i) => &mut self.checks[i],
            None => {
                self.checks.push(CheckOutcome {
                    name,
                    cases: 0,
                    counterexample: None,
                });
                self.checks.last_mut().unwrap()
            }
        };
        entry.cases += 1;
        if !ok && entry.counterexample.is_none() {
            entry.counterexample = Some(detail());
        }
    }

    pub fn merge(&mut self, other: SupportReport) {
        for c in other.checks {
            match self.checks.iter_mut().find(|d| d.name == c.name) {
                Some(d) => {
                    d.cases += c.cases;
                    if d.counterexample.is_none() {
                        d.counterexample = c.counterexample;
                    }
                }
                None => self.checks.push(c),
            }
        }
    }
}

pub const SUPPORTED_IFF_POST_FIXPOINT: &str = "supported iff post-fixpoint";
pub const MU_IS_UNION_OF_WELL_SUPPORTED: &str = "mu is the union of well-supported sets";
pub const NU_IS_UNION_OF_SUPPORTED: &str = "nu is the union of supported sets";
pub const EXTENSIONS: &str = "extensions of support orderings";
pub const UNIONS: &str = "unions of support orderings";
pub const FIXPOINT_ORDERINGS: &str = "fixpoint support orderings";

fn show(s: &Set) -> String {
    format!("{:?}", set::elems(s))
}

/// Checks the support-ordering characterizations for `f`: supported sets are
/// exactly post-fixpoints, μf and νf are the unions of well-supported and of
/// supported sets, extensions and unions of support orderings stay support
/// orderings, and the σ-maximal orderings are support orderings of the
/// expected shape.
pub fn support_theory_check(f: &MonotoneSetFn, scope: Scope) -> SupportReport {
    match scope {
        Scope::Exhaustive => exhaustive(f),
        Scope::Sampled { samples, seed } => sampled(f, samples, seed),
    }
}

fn fixpoint_orderings(f: &MonotoneSetFn, rep: &mut SupportReport) {
    let n = f.carrier_size();
    let nu = sigma_maximal_support(f, Sigma::Nu);
    let ok = nu.x == extremal_fixpoint(f, Sigma::Nu)
        && nu.prec == FiniteRelation::universal_on(n, &nu.x)
        && is_support_ordering(f, &nu.x, &nu.prec).is_ok()
        && nu.flags_consistent();
    rep.record(FIXPOINT_ORDERINGS, ok, || format!("nu ordering on {}", show(&nu.x)));
    let mu = sigma_maximal_support(f, Sigma::Mu);
    let ok = mu.x == extremal_fixpoint(f, Sigma::Mu)
        && mu.is_well_ordering()
        && mu.compatible(Sigma::Mu)
        && is_support_ordering(f, &mu.x, &mu.prec).is_ok()
        && mu.flags_consistent();
    rep.record(FIXPOINT_ORDERINGS, ok, || format!("mu ordering on {}", show(&mu.x)));
}

// Relations over a carrier of at most 3 elements packed into 9 bits, pair
// (x, y) at bit x*n + y.
fn packed_preds(rel: u16, n: usize, e: usize) -> u64 {
    (0..n).filter(|&y| rel >> (y * n + e) & 1 == 1).fold(0, |acc, y| acc | 1 << y)
}

fn packed_supported(table: &[u64], n: usize, x: u64, rel: u16) -> bool {
    (0..n).all(|e| x >> e & 1 == 0 || table[packed_preds(rel, n, e) as usize] >> e & 1 == 1)
}

fn packed_acyclic(rel: u16, n: usize) -> bool {
    let mut rows: Vec<u64> = (0..n)
        .map(|x| (0..n).filter(|&y| rel >> (x * n + y) & 1 == 1).fold(0, |acc, y| acc | 1 << y))
        .collect();
    for k in 0..n {
        for x in 0..n {
            if rows[x] >> k & 1 == 1 {
                rows[x] |= rows[k];
            }
        }
    }
    (0..n).all(|x| rows[x] >> x & 1 == 0)
}

fn unpack(n: usize, rel: u16) -> FiniteRelation {
    FiniteRelation::from_bits(n, rel as u64)
}

#[derive(Default)]
struct Tally {
    cases: usize,
    counterexample: Option<String>,
}

impl Tally {
    fn note(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(detail());
        }
    }

    fn into_outcome(self, name: &'static str) -> CheckOutcome {
        CheckOutcome {
            name,
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

fn exhaustive(f: &MonotoneSetFn) -> SupportReport {
    let n = f.carrier_size();
    assert!(n <= 3, "exhaustive support checks need a carrier of at most 3 elements");
    let table: Vec<u64> = set::all_subsets(n).map(|x| set::to_bits(&f.apply(&x))).collect();
    let (mut post_fix, mut mu_t, mut nu_t, mut ext_t, mut union_t) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default());
    let mut union_supported = 0u64;
    let mut union_well_supported = 0u64;
    let mut family: Vec<(u64, u16)> = Vec::new();
    for x in 0..1u64 << n {
        let square = (0..n * n)
            .filter(|i| x >> (i / n) & 1 == 1 && x >> (i % n) & 1 == 1)
            .fold(0u16, |acc, i| acc | 1 << i);
        let mut supported = false;
        // Every submask of X × X, the empty relation included.
        let mut rel = square;
        loop {
            if packed_supported(&table, n, x, rel) {
                supported = true;
                if packed_acyclic(rel, n) {
                    union_well_supported |= x;
                }
                for pair in 0..n * n {
                    let ext = rel | 1 << pair;
                    ext_t.note(packed_supported(&table, n, x, ext), || {
                        format!("X = {:?}, extension of {:?} by pair {pair}", set::elems(&set::from_bits(n, x)), unpack(n, rel).pairs())
                    });
                }
                family.push((x, rel));
            }
            if rel == 0 {
                break;
            }
            rel = (rel - 1) & square;
        }
        if supported {
            union_supported |= x;
        }
        let post = x & !table[x as usize] == 0;
        post_fix.note(supported == post, || {
            format!("X = {:?}: supported = {supported}, post-fixpoint = {post}", set::elems(&set::from_bits(n, x)))
        });
    }
    let mu = set::to_bits(&extremal_fixpoint(f, Sigma::Mu));
    mu_t.note(mu == union_well_supported, || format!("mu = {mu:#b}, union = {union_well_supported:#b}"));
    let nu = set::to_bits(&extremal_fixpoint(f, Sigma::Nu));
    nu_t.note(nu == union_supported, || format!("nu = {nu:#b}, union = {union_supported:#b}"));
    let mut check_union = |members: &mut dyn Iterator<Item = &(u64, u16)>| {
        let (x, rel) = members.fold((0, 0), |(x, r), (mx, mr)| (x | mx, r | mr));
        union_t.note(packed_supported(&table, n, x, rel), || {
            format!("union over {:?} with {:?}", set::elems(&set::from_bits(n, x)), unpack(n, rel).pairs())
        });
    };
    let k = family.len();
    if k > 0 {
        check_union(&mut family.iter());
        // All pairs on small families, a deterministic stride otherwise.
        if k <= 64 {
            for i in 0..k {
                for j in i + 1..k {
                    check_union(&mut [family[i], family[j]].iter());
                }
            }
        } else {
            for i in 0..k {
                let j = (i * 7 + 3) % k;
                check_union(&mut [family[i], family[j]].iter());
            }
        }
    }
    let mut rep = SupportReport {
        checks: vec![
            post_fix.into_outcome(SUPPORTED_IFF_POST_FIXPOINT),
            mu_t.into_outcome(MU_IS_UNION_OF_WELL_SUPPORTED),
            nu_t.into_outcome(NU_IS_UNION_OF_SUPPORTED),
            ext_t.into_outcome(EXTENSIONS),
            union_t.into_outcome(UNIONS),
        ],
    };
    fixpoint_orderings(f, &mut rep);
    rep
}

fn random_relation_on(n: usize, x: &Set, rng: &mut impl Rng) -> FiniteRelation {
    let density = rng.gen_range(0.0..1.0);
    let elems = set::elems(x);
    let mut r = FiniteRelation::empty(n);
    for &a in &elems {
        for &b in &elems {
            if rng.gen_bool(density) {
                r.insert(a, b);
            }
        }
    }
    r
}

fn sampled(f: &MonotoneSetFn, samples: usize, seed: u64) -> SupportReport {
    let n = f.carrier_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SupportReport::default();
    let mu = extremal_fixpoint(f, Sigma::Mu);
    let nu = extremal_fixpoint(f, Sigma::Nu);
    let mut found: Vec<(Set, FiniteRelation)> = Vec::new();
    for _ in 0..samples {
        let x = random_subset(n, &mut rng);
        let prec = random_relation_on(n, &x, &mut rng);
        let post = x.is_subset(&f.apply(&x));
        // The universal relation witnesses supportedness of post-fixpoints.
        let universal = is_support_ordering(f, &x, &FiniteRelation::universal_on(n, &x)).is_ok();
        rep.record(SUPPORTED_IFF_POST_FIXPOINT, universal == post, || {
            format!("X = {}: universal support = {universal}, post-fixpoint = {post}", show(&x))
        });
        if is_support_ordering(f, &x, &prec).is_ok() {
            rep.record(SUPPORTED_IFF_POST_FIXPOINT, post, || {
                format!("X = {} supported but not a post-fixpoint", show(&x))
            });
            rep.record(NU_IS_UNION_OF_SUPPORTED, x.is_subset(&nu), || {
                format!("supported X = {} not inside nu = {}", show(&x), show(&nu))
            });
            if prec.is_well_founded().is_ok() {
                rep.record(MU_IS_UNION_OF_WELL_SUPPORTED, x.is_subset(&mu), || {
                    format!("well-supported X = {} not inside mu = {}", show(&x), show(&mu))
                });
            }
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let mut ext = prec.clone();
            ext.insert(a, b);
            rep.record(EXTENSIONS, is_support_ordering(f, &x, &ext).is_ok(), || {
                format!("X = {}, extension by ({a}, {b})", show(&x))
            });
            if let Some((ox, op)) = found.last() {
                let ux = set::union(ox, &x);
                let up = op.union(&prec);
                rep.record(UNIONS, is_support_ordering(f, &ux, &up).is_ok(), || {
                    format!("union over {}", show(&ux))
                });
            }
            found.push((x, prec));
        }
    }
    fixpoint_orderings(f, &mut rep);
    // Constructive halves: μf and νf themselves carry support orderings.
    let mo = sigma_maximal_support(f, Sigma::Mu);
    rep.record(MU_IS_UNION_OF_WELL_SUPPORTED, mo.x == mu && mo.well_founded, || {
        "mu lacks a well-founded support ordering".into()
    });
    let no = sigma_maximal_support(f, Sigma::Nu);
    rep.record(NU_IS_UNION_OF_SUPPORTED, no.x == nu, || "nu lacks a support ordering".into());
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::all_monotone;

    #[test]
    fn packed_checks_match_relation_checks() {
        for f in all_monotone(2).into_iter().chain(all_monotone(3).into_iter().step_by(97)) {
            let n = f.carrier_size();
            let table: Vec<u64> = set::all_subsets(n).map(|x| set::to_bits(&f.apply(&x))).collect();
            for x in 0..1u64 << n {
                for rel in 0..1u16 << (n * n) {
                    let r = unpack(n, rel);
                    let xs = set::from_bits(n, x);
                    assert_eq!(packed_supported(&table, n, x, rel), is_support_ordering(&f, &xs, &r).is_ok());
                    assert_eq!(packed_acyclic(rel, n), r.is_well_founded().is_ok());
                }
            }
        }
    }

    #[test]
    fn every_three_element_function() {
        let start = std::time::Instant::now();
        for f in all_monotone(3) {
            let r = support_theory_check(&f, Scope::Exhaustive);
            assert!(r.passed(), "{r:?}");
        }
        eprintln!("8000 functions in {:?}", start.elapsed());
    }
}
