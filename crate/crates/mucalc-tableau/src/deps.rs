//! Dependency orderings between states of a node and states of its
//! descendants. Every relation is stored as pairs `(s', s)` with `s'` at the
//! descendant and `s` at the ancestor, so `s' R s` reads "s depends on s'".

use std::collections::BTreeMap;
use std::fmt::Write;

use mucalc_formula::Formula;
use mucalc_lattice::FiniteRelation;
use mucalc_models::Model;

use crate::sequent::RuleApp;
use crate::tableau::{Intervals, Shape, Tableau};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyBundle {
    /// `<_{n',n}` keyed by `(n', n)` for every child `n'` of `n`.
    pub local: BTreeMap<(usize, usize), FiniteRelation>,
    /// `⋖_{n',n}` keyed by `(n', n)` for every `n' ∈ D(n)`.
    pub dep: BTreeMap<(usize, usize), FiniteRelation>,
    /// `<:_{n',n}`, same keys as `dep`.
    pub extended: BTreeMap<(usize, usize), FiniteRelation>,
    /// `<:_m` for every companion node `m`.
    pub companion: BTreeMap<usize, FiniteRelation>,
    /// `≤:_{n',n}`, same keys as `dep`.
    pub support: BTreeMap<(usize, usize), FiniteRelation>,
    carrier: usize,
}

fn get(map: &BTreeMap<(usize, usize), FiniteRelation>, key: (usize, usize), n: usize) -> FiniteRelation {
    map.get(&key).cloned().unwrap_or_else(|| FiniteRelation::empty(n))
}

impl DependencyBundle {
    pub fn local(&self, child: usize, n: usize) -> FiniteRelation {
        get(&self.local, (child, n), self.carrier)
    }

    pub fn dep(&self, desc: usize, n: usize) -> FiniteRelation {
        get(&self.dep, (desc, n), self.carrier)
    }

    pub fn extended(&self, desc: usize, n: usize) -> FiniteRelation {
        get(&self.extended, (desc, n), self.carrier)
    }

    pub fn support(&self, desc: usize, n: usize) -> FiniteRelation {
        get(&self.support, (desc, n), self.carrier)
    }

    pub fn companion(&self, m: usize) -> FiniteRelation {
        self.companion
            .get(&m)
            .cloned()
            .unwrap_or_else(|| FiniteRelation::empty(self.carrier))
    }

    /// Edge list, one line per related pair:
    /// `<kind> <node'> <state'> <node> <state>`, with kind one of `local`,
    /// `dep`, `ext`, `support`; companion relations as
    /// `companion <m> <state'> <state>`.
    pub fn to_edge_list(&self, model: &Model) -> String {
        let mut out = String::from("# kind node' state' node state\n");
        let name = |s: usize| model.state_name(s);
        for (kind, map) in [
            ("local", &self.local),
            ("dep", &self.dep),
            ("ext", &self.extended),
            ("support", &self.support),
        ] {
            for (&(d, n), r) in map {
                for (x, y) in r.pairs() {
                    writeln!(out, "{kind} {d} {} {n} {}", name(x), name(y)).unwrap();
                }
            }
        }
        for (&m, r) in &self.companion {
            for (x, y) in r.pairs() {
                writeln!(out, "companion {m} {} {}", name(x), name(y)).unwrap();
            }
        }
        out
    }
}

/// `<_{c,n}` for child `c` of `n`.
pub fn local_relation(t: &Tableau, model: &Model, n: usize, index: usize) -> FiniteRelation {
    let size = model.len();
    let c = t.children(n)[index];
    let (st, stc) = (&t.seq(n).states, &t.seq(c).states);
    let mut r = FiniteRelation::empty(size);
    let mut add = |x: usize, y: usize| {
        if stc.contains(x) && st.contains(y) {
            r.insert(x, y);
        }
    };
    match t.rule(n).expect("internal node") {
        RuleApp::Box => {
            let Formula::Box(k, _) = &t.seq(n).formula else {
                unreachable!("validated box node")
            };
            for s in st.ones() {
                for s2 in model.successors(s, k) {
                    add(s2, s);
                }
            }
        }
        RuleApp::Dia(f) => {
            for (&s, &s2) in f {
                add(s2, s);
            }
        }
        RuleApp::Exists(f) => {
            for (&s, &d) in f {
                if index == 0 {
                    for s2 in model.tsucc_lt(s, d).ones() {
                        add(s2, s);
                    }
                } else if let Some(s2) = model.tsucc(s, d) {
                    add(s2, s);
                }
            }
        }
        RuleApp::Forall(g) => {
            for (&(s, d), &r) in &g.table {
                if (r < d) == (index == 0) {
                    add(model.tsucc(s, r).expect("allowed delay"), s);
                }
            }
        }
        _ => {
            for s in st.ones() {
                add(s, s);
            }
        }
    }
    r
}

/// Computes every ordering of the bundle for a structurally valid tableau.
///
/// `<:` and `<:_m` are mutually recursive; they are obtained by iterating
/// both defining clauses from the empty relations until nothing changes.
/// Start nodes are visited deepest first, which makes the second round a
/// pure confirmation.
pub fn dependency_relations(t: &Tableau, model: &Model, shape: &Shape) -> DependencyBundle {
    let size = model.len();
    let iv = t.intervals();
    let post = t.postorder();

    let mut local = BTreeMap::new();
    for &n in &post {
        for (i, &c) in t.children(n).iter().enumerate() {
            local.insert((c, n), local_relation(t, model, n, i));
        }
    }

    // ⋖: identity at n' = n, otherwise through the child on the way to n'.
    let mut dep: BTreeMap<(usize, usize), FiniteRelation> = BTreeMap::new();
    for &n in &post {
        dep.insert((n, n), FiniteRelation::identity_on(size, &t.seq(n).states));
        for &c in t.children(n) {
            let step = &local[&(c, n)];
            for &d in subtree(&iv, c) {
                let r = dep[&(d, c)].compose(step);
                dep.insert((d, n), r);
            }
        }
    }

    let mut extended: BTreeMap<(usize, usize), FiniteRelation> = BTreeMap::new();
    let mut companion: BTreeMap<usize, FiniteRelation> =
        shape.companions.iter().map(|&m| (m, FiniteRelation::empty(size))).collect();
    loop {
        let mut changed = false;
        for &n in &post {
            // <:_m⁺ ; ⋖_{m,n} for companions m strictly below n.
            let below: Vec<(usize, FiniteRelation)> = shape
                .companions
                .iter()
                .copied()
                .filter(|&m| m != n && iv.contains(n, m))
                .map(|m| (m, companion[&m].transitive_closure().compose(&dep[&(m, n)])))
                .collect();
            for &d in subtree(&iv, n) {
                let mut r = dep[&(d, n)].clone();
                for (m, via) in &below {
                    if *m != d && iv.contains(*m, d) {
                        if let Some(inner) = extended.get(&(d, *m)) {
                            r = r.union(&inner.compose(via));
                        }
                    }
                }
                if extended.get(&(d, n)) != Some(&r) {
                    extended.insert((d, n), r);
                    changed = true;
                }
            }
            if let Some(leaves) = shape.cleaves.get(&n) {
                let mut r = FiniteRelation::empty(size);
                for &l in leaves {
                    r = r.union(&extended[&(l, n)]);
                }
                if companion[&n] != r {
                    companion.insert(n, r);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut support = BTreeMap::new();
    for (&(d, n), r) in &extended {
        let s = match companion.get(&n) {
            Some(c) => r.compose(&c.reflexive_transitive_closure()),
            None => r.clone(),
        };
        support.insert((d, n), s);
    }

    DependencyBundle {
        local,
        dep,
        extended,
        companion,
        support,
        carrier: size,
    }
}

fn subtree(iv: &Intervals, n: usize) -> &[usize] {
    &iv.order[iv.pre[n]..=iv.last[n]]
}
