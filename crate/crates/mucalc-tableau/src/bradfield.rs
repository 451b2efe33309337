//! Paths and extended paths through a tableau, the older presentation of
//! the dependency orderings. Written against the tree directly, without the
//! relation algebra of `deps`, so the two can be compared.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use mucalc_formula::Formula;
use mucalc_lattice::FiniteRelation;
use mucalc_models::Model;

use crate::sequent::RuleApp;
use crate::tableau::Tableau;

/// Relations keyed by `(n, n')` and holding `(s, s')` whenever the walk
/// starts at `s@n` and ends at `s'@n'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BradfieldRelations {
    pub path: BTreeMap<(usize, usize), FiniteRelation>,
    pub extended_path: BTreeMap<(usize, usize), FiniteRelation>,
    /// `s ⊐_m s'` for every node `m` with `ρ(m) = Un`.
    pub order: BTreeMap<usize, FiniteRelation>,
}

struct Grid {
    states: usize,
}

impl Grid {
    fn at(&self, node: usize, s: usize) -> usize {
        node * self.states + s
    }
}

/// `(child, state)` pairs one rule step below `s@n`.
fn steps(t: &Tableau, model: &Model, n: usize, s: usize) -> Vec<(usize, usize)> {
    let kids = t.children(n);
    let mut out = Vec::new();
    let rule = match t.rule(n) {
        Some(r) => r,
        None => return out,
    };
    for (i, &c) in kids.iter().enumerate() {
        let targets: Vec<usize> = match (rule, &t.seq(n).formula) {
            (RuleApp::Box, Formula::Box(k, _)) => model.successors(s, k),
            (RuleApp::Dia(f), _) => f.get(&s).copied().into_iter().collect(),
            (RuleApp::Exists(f), _) => match f.get(&s) {
                Some(&d) if i == 0 => model.tsucc_lt(s, d).ones().collect(),
                Some(&d) => model.tsucc(s, d).into_iter().collect(),
                None => Vec::new(),
            },
            (RuleApp::Forall(g), _) => g
                .table
                .range((s, 0)..(s + 1, 0))
                .filter(|(&(_, d), &r)| if i == 0 { r < d } else { r == d })
                .filter_map(|(_, &r)| model.tsucc(s, r))
                .collect(),
            _ => vec![s],
        };
        out.extend(targets.into_iter().filter(|&x| t.seq(c).states.contains(x)).map(|x| (c, x)));
    }
    out
}

/// The `Un` node a constant leaf loops back to.
fn loop_target(t: &Tableau, leaf: usize) -> Option<usize> {
    let seq = t.seq(leaf);
    let Formula::Var(u) = &seq.formula else { return None };
    if !seq.dl.contains(u) {
        return None;
    }
    let mut cur = t.parent(leaf);
    while let Some(m) = cur {
        let ms = t.seq(m);
        if matches!(t.rule(m), Some(RuleApp::Un))
            && matches!(&ms.formula, Formula::Var(w) if w == u)
            && seq.states.is_subset(&ms.states)
        {
            return Some(m);
        }
        cur = t.parent(m);
    }
    None
}

pub fn bradfield_relations(t: &Tableau, model: &Model) -> BradfieldRelations {
    let k = model.len();
    let n = t.len();
    let g = Grid { states: k };
    let cells = n * k;

    // Plain paths: reachability over single rule steps.
    let mut path = vec![FixedBitSet::with_capacity(cells); cells];
    for node in 0..n {
        for s in t.seq(node).states.ones() {
            let start = g.at(node, s);
            let mut stack = vec![(node, s)];
            path[start].insert(start);
            while let Some((m, x)) = stack.pop() {
                for (c, y) in steps(t, model, m, x) {
                    let cell = g.at(c, y);
                    if !path[start].contains(cell) {
                        path[start].insert(cell);
                        stack.push((c, y));
                    }
                }
            }
        }
    }

    let unfold: Vec<usize> = (0..n).filter(|&m| matches!(t.rule(m), Some(RuleApp::Un))).collect();
    let mut looping: BTreeMap<usize, Vec<usize>> = unfold.iter().map(|&m| (m, Vec::new())).collect();
    for leaf in (0..n).filter(|&l| t.children(l).is_empty()) {
        if let Some(m) = loop_target(t, leaf) {
            looping.get_mut(&m).expect("Un node").push(leaf);
        }
    }
    let mut node_cells = vec![FixedBitSet::with_capacity(cells); n];
    for (m, bits) in node_cells.iter_mut().enumerate() {
        bits.insert_range(g.at(m, 0)..g.at(m, 0) + k);
    }

    // Extended paths: least solution of the looping clause, iterated over
    // every start cell until stable.
    let mut ext = path.clone();
    loop {
        let mut changed = false;
        for node in 0..n {
            for s in t.seq(node).states.ones() {
                let start = g.at(node, s);
                let mut grown = ext[start].clone();
                for &c in unfold.iter().filter(|&&c| c != node) {
                    for s0 in (0..k).filter(|&s0| path[start].contains(g.at(c, s0))) {
                        // States of c reachable by looping through its leaves.
                        let mut seen = vec![false; k];
                        seen[s0] = true;
                        let mut work = vec![s0];
                        while let Some(x) = work.pop() {
                            for &leaf in &looping[&c] {
                                for y in t.seq(leaf).states.ones() {
                                    if !seen[y] && ext[g.at(c, x)].contains(g.at(leaf, y)) {
                                        seen[y] = true;
                                        work.push(y);
                                    }
                                }
                            }
                        }
                        for x in (0..k).filter(|&x| seen[x]) {
                            let mut tail = ext[g.at(c, x)].clone();
                            tail.difference_with(&node_cells[c]);
                            grown.union_with(&tail);
                        }
                    }
                }
                if grown != ext[start] {
                    ext[start] = grown;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let collect = |table: &[FixedBitSet]| {
        let mut out: BTreeMap<(usize, usize), FiniteRelation> = BTreeMap::new();
        for node in 0..n {
            for s in 0..k {
                for cell in table[g.at(node, s)].ones() {
                    let (m, x) = (cell / k, cell % k);
                    out.entry((node, m)).or_insert_with(|| FiniteRelation::empty(k)).insert(s, x);
                }
            }
        }
        out
    };
    let path_rel = collect(&path);
    let ext_rel = collect(&ext);
    let mut order = BTreeMap::new();
    for (&m, leaves) in &looping {
        let mut r = FiniteRelation::empty(k);
        for &leaf in leaves {
            if let Some(rel) = ext_rel.get(&(m, leaf)) {
                r = r.union(rel);
            }
        }
        order.insert(m, r);
    }
    BradfieldRelations {
        path: path_rel,
        extended_path: ext_rel,
        order,
    }
}
