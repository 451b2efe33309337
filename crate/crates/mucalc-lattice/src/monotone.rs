use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::set::{self, Set};

/// Largest carrier (times arity) for which functions are stored as tables.
pub const TABLE_LIMIT: usize = 16;
/// Largest carrier for which monotonicity is checked on every covering pair.
pub const EXHAUSTIVE_LIMIT: usize = 5;
const MONOTONE_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sigma {
    Mu,
    Nu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    Exhaustive,
    Sampled(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not monotone in argument {arg}: {smaller:?} ⊆ {larger:?} but images are not ordered")]
pub struct NotMonotone {
    pub arg: usize,
    pub smaller: Vec<usize>,
    pub larger: Vec<usize>,
}

type Callable = Arc<dyn Fn(&Set, &Set) -> Set + Send + Sync>;

#[derive(Clone)]
enum Body {
    Table(Vec<Set>),
    Callable(Callable),
}

/// Monotone function on the powerset of `{0, .., n-1}`, unary or binary.
#[derive(Clone)]
pub struct MonotoneSetFn {
    n: usize,
    arity: usize,
    body: Body,
    evidence: Evidence,
}

impl fmt::Debug for MonotoneSetFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneSetFn")
            .field("n", &self.n)
            .field("arity", &self.arity)
            .field("tabulated", &matches!(self.body, Body::Table(_)))
            .field("evidence", &self.evidence)
            .finish()
    }
}

impl MonotoneSetFn {
    pub fn unary<F>(n: usize, f: F) -> Result<MonotoneSetFn, NotMonotone>
    where
        F: Fn(&Set) -> Set + Send + Sync + 'static,
    {
        MonotoneSetFn::build(n, 1, Arc::new(move |x: &Set, _: &Set| f(x)))
    }

    pub fn binary<F>(n: usize, f: F) -> Result<MonotoneSetFn, NotMonotone>
    where
        F: Fn(&Set, &Set) -> Set + Send + Sync + 'static,
    {
        MonotoneSetFn::build(n, 2, Arc::new(f))
    }

    /// Unary function given by its table, indexed by bit pattern of the argument.
    pub fn from_table(n: usize, table: Vec<Set>) -> Result<MonotoneSetFn, NotMonotone> {
        assert_eq!(table.len(), 1 << n);
        let f = MonotoneSetFn {
            n,
            arity: 1,
            body: Body::Table(table),
            evidence: Evidence::Exhaustive,
        };
        f.check_monotone()?;
        Ok(f)
    }

    fn build(n: usize, arity: usize, call: Callable) -> Result<MonotoneSetFn, NotMonotone> {
        let body = if n * arity <= TABLE_LIMIT {
            let empty = set::empty(n);
            let table = (0..1u64 << (n * arity))
                .map(|bits| {
                    let x = set::from_bits(n, bits & ((1 << n) - 1));
                    if arity == 1 {
                        call(&x, &empty)
                    } else {
                        call(&x, &set::from_bits(n, bits >> n))
                    }
                })
                .collect();
            Body::Table(table)
        } else {
            Body::Callable(call)
        };
        let evidence = if n <= EXHAUSTIVE_LIMIT {
            Evidence::Exhaustive
        } else {
            Evidence::Sampled(MONOTONE_SAMPLES)
        };
        let f = MonotoneSetFn { n, arity, body, evidence };
        f.check_monotone()?;
        Ok(f)
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn evidence(&self) -> Evidence {
        self.evidence
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.body, Body::Table(_))
    }

    fn eval(&self, x: &Set, y: &Set) -> Set {
        match &self.body {
            Body::Table(t) => {
                let idx = set::to_bits(x) | if self.arity == 2 { set::to_bits(y) << self.n } else { 0 };
                t[idx as usize].clone()
            }
            Body::Callable(c) => c(x, y),
        }
    }

    pub fn apply(&self, x: &Set) -> Set {
        debug_assert_eq!(self.arity, 1);
        self.eval(x, &set::empty(self.n))
    }

    pub fn apply2(&self, x: &Set, y: &Set) -> Set {
        debug_assert_eq!(self.arity, 2);
        self.eval(x, y)
    }

    fn check_monotone(&self) -> Result<(), NotMonotone> {
        let n = self.n;
        let check = |x: &Set, y: &Set, arg: usize, e: usize| -> Result<(), NotMonotone> {
            let (mut x2, mut y2) = (x.clone(), y.clone());
            if arg == 0 {
                x2.insert(e)
            } else {
                y2.insert(e)
            }
            if self.eval(x, y).is_subset(&self.eval(&x2, &y2)) {
                Ok(())
            } else {
                let (s, l) = if arg == 0 { (x, &x2) } else { (y, &y2) };
                Err(NotMonotone {
                    arg,
                    smaller: set::elems(s),
                    larger: set::elems(l),
                })
            }
        };
        match self.evidence {
            Evidence::Exhaustive => {
                for bits in 0..1u64 << (n * self.arity) {
                    let x = set::from_bits(n, bits & ((1 << n) - 1));
                    let y = set::from_bits(n, bits >> n);
                    for arg in 0..self.arity {
                        let cur = if arg == 0 { &x } else { &y };
                        for e in (0..n).filter(|&e| !cur.contains(e)) {
                            check(&x, &y, arg, e)?;
                        }
                    }
                }
            }
            Evidence::Sampled(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                for _ in 0..k {
                    let x = random_subset(n, &mut rng);
                    let y = random_subset(n, &mut rng);
                    let arg = rng.gen_range(0..self.arity);
                    let e = rng.gen_range(0..n);
                    check(&x, &y, arg, e)?;
                }
            }
        }
        Ok(())
    }

    /// `Y ↦ f(X, Y)`.
    pub fn fix_first(&self, x: &Set) -> MonotoneSetFn {
        let (f, x) = (self.clone(), x.clone());
        self.derived(move |y, _| f.apply2(&x, y))
    }

    /// `X ↦ f(X, Y)`.
    pub fn fix_second(&self, y: &Set) -> MonotoneSetFn {
        let (f, y) = (self.clone(), y.clone());
        self.derived(move |x, _| f.apply2(x, &y))
    }

    // Unary function known to be monotone because it is built from one.
    fn derived(&self, call: impl Fn(&Set, &Set) -> Set + Send + Sync + 'static) -> MonotoneSetFn {
        let call: Callable = Arc::new(call);
        let body = if self.n <= TABLE_LIMIT {
            let empty = set::empty(self.n);
            Body::Table(set::all_subsets(self.n).map(|x| call(&x, &empty)).collect())
        } else {
            Body::Callable(call)
        };
        MonotoneSetFn {
            n: self.n,
            arity: 1,
            body,
            evidence: self.evidence,
        }
    }
}

pub fn random_subset(n: usize, rng: &mut impl Rng) -> Set {
    set::from_elems(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

/// Random monotone unary function: a random table closed upward, i.e.
/// `f(X) = ⋃ {t(Y) | Y ⊆ X}`.
pub fn random_monotone(n: usize, rng: &mut impl Rng) -> MonotoneSetFn {
    assert!(n <= TABLE_LIMIT);
    let size = 1usize << n;
    let density = rng.gen_range(0.02..0.35);
    let mut table: Vec<Set> = (0..size)
        .map(|_| set::from_elems(n, (0..n).filter(|_| rng.gen_bool(density))))
        .collect();
    // Closing under the subset order one element at a time visits every chain.
    for e in 0..n {
        for bits in 0..size {
            if bits >> e & 1 == 1 {
                let lower = table[bits & !(1 << e)].clone();
                table[bits].union_with(&lower);
            }
        }
    }
    MonotoneSetFn::from_table(n, table).expect("upward closure is monotone")
}

/// Kleene iteration from the bottom (mu) or top (nu) element.
pub fn extremal_fixpoint(f: &MonotoneSetFn, sigma: Sigma) -> Set {
    iterate(f.n, sigma, |x| f.apply(x))
}

/// Kleene iteration of an arbitrary monotone closure over `n` elements.
pub fn iterate(n: usize, sigma: Sigma, f: impl Fn(&Set) -> Set) -> Set {
    let mut x = match sigma {
        Sigma::Mu => set::empty(n),
        Sigma::Nu => set::full(n),
    };
    loop {
        let next = f(&x);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Kleene iterates `∅ = X0 ⊆ X1 ⊆ .. ⊆ Xk = μf`, without repetition.
pub fn kleene_stages(f: &MonotoneSetFn) -> Vec<Set> {
    let mut stages = vec![set::empty(f.n)];
    loop {
        let next = f.apply(stages.last().unwrap());
        if &next == stages.last().unwrap() {
            return stages;
        }
        stages.push(next);
    }
}

/// Meet of all pre-fixpoints (mu) or join of all post-fixpoints (nu), by
/// enumerating every subset.
pub fn tarski_fixpoint(f: &MonotoneSetFn, sigma: Sigma) -> Set {
    match sigma {
        Sigma::Mu => set::all_subsets(f.n)
            .filter(|x| f.apply(x).is_subset(x))
            .fold(set::full(f.n), |acc, x| set::intersection(&acc, &x)),
        Sigma::Nu => set::all_subsets(f.n)
            .filter(|x| x.is_subset(&f.apply(x)))
            .fold(set::empty(f.n), |acc, x| set::union(&acc, &x)),
    }
}

/// `f[σ]g`: `X ↦ f(X, σY. g(X, Y))`.
pub fn compose_sigma(f: &MonotoneSetFn, g: &MonotoneSetFn, sigma: Sigma) -> MonotoneSetFn {
    assert_eq!((f.arity, g.arity), (2, 2));
    assert_eq!(f.n, g.n);
    let (f2, g2) = (f.clone(), g.clone());
    f.derived(move |x, _| {
        let inner = iterate(g2.n, sigma, |y| g2.apply2(x, y));
        f2.apply2(x, &inner)
    })
}

/// Every monotone unary function over a carrier of at most 3 elements, built
/// coordinatewise from the monotone boolean functions of `n` variables.
pub fn all_monotone(n: usize) -> Vec<MonotoneSetFn> {
    assert!(n <= 3, "enumerating monotone functions over {n} elements");
    let size = 1usize << n;
    // Truth tables over the `size` inputs that never drop from 1 to 0 upward.
    let coords: Vec<u64> = (0..1u64 << size)
        .filter(|tt| {
            (0..size).all(|a| (0..n).all(|e| tt >> a & 1 == 0 || tt >> (a | 1 << e) & 1 == 1))
        })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; n];
    loop {
        let table = (0..size)
            .map(|a| set::from_elems(n, (0..n).filter(|&c| coords[pick[c]] >> a & 1 == 1)))
            .collect();
        out.push(MonotoneSetFn::from_table(n, table).expect("coordinatewise monotone"));
        let mut c = 0;
        while c < n && pick[c] + 1 == coords.len() {
            pick[c] = 0;
            c += 1;
        }
        if c == n {
            return out;
        }
        pick[c] += 1;
    }
}
