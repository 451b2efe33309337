use std::collections::VecDeque;

use crate::set::{self, Set};

/// Binary relation over `{0, .., n-1}`; `rows[x]` holds every `y` with `x R y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    n: usize,
    rows: Vec<Set>,
}

impl FiniteRelation {
    pub fn empty(n: usize) -> FiniteRelation {
        FiniteRelation {
            n,
            rows: vec![set::empty(n); n],
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> FiniteRelation {
        let mut r = FiniteRelation::empty(n);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    pub fn identity_on(n: usize, xs: &Set) -> FiniteRelation {
        FiniteRelation::from_pairs(n, xs.ones().map(|x| (x, x)))
    }

    /// `X × X`.
    pub fn universal_on(n: usize, xs: &Set) -> FiniteRelation {
        let mut r = FiniteRelation::empty(n);
        for x in xs.ones() {
            r.rows[x] = xs.clone();
        }
        r
    }

    /// Relation whose pairs are the set bits of `bits`, pair `(x, y)` at bit `x*n + y`.
    pub fn from_bits(n: usize, bits: u64) -> FiniteRelation {
        FiniteRelation::from_pairs(
            n,
            (0..n * n).filter(|i| bits >> i & 1 == 1).map(|i| (i / n, i % n)),
        )
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.rows[x].insert(y);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    /// `{y | x R y}`.
    pub fn successors(&self, x: usize) -> &Set {
        &self.rows[x]
    }

    /// `{y | y R x}`, written `R⁻¹⟨x⟩`.
    pub fn predecessors(&self, x: usize) -> Set {
        set::from_elems(self.n, (0..self.n).filter(|&y| self.rows[y].contains(x)))
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|x| self.rows[x].ones().map(move |y| (x, y)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn converse(&self) -> FiniteRelation {
        FiniteRelation::from_pairs(self.n, self.pairs().into_iter().map(|(x, y)| (y, x)))
    }

    /// Irreflexive core `R⁻`.
    pub fn irreflexive_core(&self) -> FiniteRelation {
        let mut r = self.clone();
        for x in 0..self.n {
            r.rows[x].set(x, false);
        }
        r
    }

    pub fn union(&self, other: &FiniteRelation) -> FiniteRelation {
        let mut r = self.clone();
        for (a, b) in r.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        r
    }

    /// `R ; R' = {(x, z) | ∃y. x R y ∧ y R' z}`.
    pub fn compose(&self, other: &FiniteRelation) -> FiniteRelation {
        let mut r = FiniteRelation::empty(self.n);
        for x in 0..self.n {
            for y in self.rows[x].ones() {
                r.rows[x].union_with(&other.rows[y]);
            }
        }
        r
    }

    /// `R⁺`.
    pub fn transitive_closure(&self) -> FiniteRelation {
        let mut r = self.clone();
        for k in 0..self.n {
            let row_k = r.rows[k].clone();
            for x in 0..self.n {
                if r.rows[x].contains(k) {
                    r.rows[x].union_with(&row_k);
                }
            }
        }
        r
    }

    /// `R*`.
    pub fn reflexive_transitive_closure(&self) -> FiniteRelation {
        let mut r = self.transitive_closure();
        for x in 0..self.n {
            r.rows[x].insert(x);
        }
        r
    }

    /// Restriction to `X × X`.
    pub fn restrict(&self, xs: &Set) -> FiniteRelation {
        let mut r = FiniteRelation::empty(self.n);
        for x in xs.ones() {
            r.rows[x] = set::intersection(&self.rows[x], xs);
        }
        r
    }

    /// `{y | ∃x ∈ X. x R y}`.
    pub fn image(&self, xs: &Set) -> Set {
        let mut s = set::empty(self.n);
        for x in xs.ones() {
            s.union_with(&self.rows[x]);
        }
        s
    }

    /// `{x | ∃y ∈ Y. x R y}`.
    pub fn preimage(&self, ys: &Set) -> Set {
        set::from_elems(self.n, (0..self.n).filter(|&x| !self.rows[x].is_disjoint(ys)))
    }

    pub fn is_subset(&self, other: &FiniteRelation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    /// Field of the relation: every element occurring in some pair.
    pub fn field(&self) -> Set {
        let mut s = set::empty(self.n);
        for (x, y) in self.pairs() {
            s.insert(x);
            s.insert(y);
        }
        s
    }

    /// Distinct elements of `X` are comparable.
    pub fn is_total_on(&self, xs: &Set) -> bool {
        xs.ones()
            .all(|x| xs.ones().all(|y| x == y || self.contains(x, y) || self.contains(y, x)))
    }

    /// Acyclicity, the finite form of well-foundedness. On failure returns a
    /// shortest cycle `[x0, .., xk]` with `x0 R x1 R .. R xk R x0`.
    pub fn is_well_founded(&self) -> Result<(), Vec<usize>> {
        match self.shortest_cycle() {
            Some(c) => Err(c),
            None => Ok(()),
        }
    }

    pub fn shortest_cycle(&self) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for start in 0..self.n {
            let mut parent = vec![usize::MAX; self.n];
            let mut seen = set::empty(self.n);
            let mut queue = VecDeque::from([start]);
            let mut found = None;
            while let Some(x) = queue.pop_front() {
                if self.rows[x].contains(start) {
                    found = Some(x);
                    break;
                }
                for y in self.rows[x].ones() {
                    if !seen.contains(y) && y != start {
                        seen.insert(y);
                        parent[y] = x;
                        queue.push_back(y);
                    }
                }
            }
            if let Some(mut x) = found {
                let mut cycle = vec![x];
                while x != start {
                    x = parent[x];
                    cycle.push(x);
                }
                cycle.reverse();
                if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                    best = Some(cycle);
                }
            }
        }
        best
    }

    /// Elements of `X` that are `R`-lower bounds of `X`: `x R x'` for every
    /// other `x'` in `X`.
    pub fn pseudo_minima(&self, xs: &Set) -> Set {
        set::from_elems(
            self.n,
            xs.ones().filter(|&x| xs.ones().all(|y| y == x || self.contains(x, y))),
        )
    }
}

/// Classes of mutual `R*`-reachability and the order they inherit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientAnalysis {
    /// Classes sorted by least element.
    pub classes: Vec<Vec<usize>>,
    /// Index of the class of each carrier element.
    pub class_of: Vec<usize>,
    /// `[x] ⊑ [y]` iff `x R* y`, over class indices.
    pub order: FiniteRelation,
    /// Irreflexive core of `order`.
    pub strict: FiniteRelation,
    pub qwf: bool,
    pub qwo: bool,
}

pub fn quotient_analysis(r: &FiniteRelation) -> QuotientAnalysis {
    let n = r.carrier_size();
    let star = r.reflexive_transitive_closure();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (x..n).filter(|&y| star.contains(x, y) && star.contains(y, x)).collect();
        for &y in &members {
            class_of[y] = classes.len();
        }
        classes.push(members);
    }
    let k = classes.len();
    let order = FiniteRelation::from_pairs(
        k,
        (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).filter(|&(a, b)| star.contains(classes[a][0], classes[b][0])),
    );
    let strict = order.irreflexive_core();
    let qwf = strict.is_well_founded().is_ok();
    let qwo = qwf && strict.is_total_on(&set::full(k));
    QuotientAnalysis {
        classes,
        class_of,
        order,
        strict,
        qwf,
        qwo,
    }
}
