use std::collections::{BTreeMap, BTreeSet};

use mucalc_formula::{Fix, Formula};
use mucalc_lattice::set;
use mucalc_models::Valuation;

use crate::deps::DependencyBundle;
use crate::sequent::RuleApp;
use crate::tableau::{LeafKind, Shape, Tableau};

/// `Z_m` for every companion node: `Z#k` for the k-th companion in
/// preorder, primed further if a sequent already uses the name.
pub fn companion_vars(t: &Tableau, shape: &Shape) -> BTreeMap<usize, String> {
    let mut used = BTreeSet::new();
    for node in t.nodes() {
        used.extend(node.seq.formula.all_vars());
        for (u, body) in node.seq.dl.entries() {
            used.insert(u.clone());
            used.extend(body.all_vars());
        }
    }
    let mut out = BTreeMap::new();
    for (k, &m) in shape.companions.iter().enumerate() {
        let mut name = format!("Z#{}", k + 1);
        while used.contains(&name) {
            name.push('\'');
        }
        out.insert(m, name);
    }
    out
}

/// `P(n)`, the formula read off the subtableau at `n`. Contains no
/// definitional constant.
pub fn node_formula(t: &Tableau, shape: &Shape, n: usize) -> Formula {
    node_formula_with(t, shape, &companion_vars(t, shape), n)
}

pub fn node_formula_with(t: &Tableau, shape: &Shape, vars: &BTreeMap<usize, String>, n: usize) -> Formula {
    let seq = t.seq(n);
    let kids = t.children(n);
    let child = |i: usize| node_formula_with(t, shape, vars, kids[i]);
    match t.rule(n) {
        None => match shape.leaves.get(&n) {
            Some(LeafKind::Free) => seq.formula.clone(),
            Some(LeafKind::Sigma { companion, .. }) => Formula::var(&vars[companion]),
            // Diamond leaves, and leaves of partial tableaux.
            _ => seq.dl.expand(&seq.formula),
        },
        Some(RuleApp::And) => Formula::and(child(0), child(1)),
        Some(RuleApp::Or(..)) => Formula::or(child(0), child(1)),
        Some(RuleApp::Box) | Some(RuleApp::Dia(_)) => match &seq.formula {
            Formula::Box(k, _) => Formula::boxed(k.clone(), child(0)),
            Formula::Diamond(k, _) => Formula::dia(k.clone(), child(0)),
            _ => unreachable!("modal rule on a non-modal formula"),
        },
        Some(RuleApp::Sigma(_)) | Some(RuleApp::Thin(_)) => child(0),
        Some(RuleApp::Un) => {
            let fix = match seq.constant().and_then(|u| seq.dl.get(u)) {
                Some(Formula::Fix(fix, ..)) => *fix,
                _ => unreachable!("Un on a non-constant"),
            };
            Formula::fix(fix, &vars[&n], child(0))
        }
        Some(RuleApp::Exists(_)) => Formula::exists(child(0), child(1)),
        Some(RuleApp::Forall(_)) => Formula::forall(child(0), child(1)),
    }
}

/// `V_n`: every `Z_m` maps to the states of `m`'s companion leaves below
/// `n` that `st(n)` depends on through `≤:`.
pub fn influence_valuation(
    t: &Tableau,
    shape: &Shape,
    bundle: &DependencyBundle,
    n: usize,
    base: &Valuation,
) -> Valuation {
    let vars = companion_vars(t, shape);
    let iv = t.intervals();
    let size = base.carrier_size();
    let mut v = base.clone();
    for (m, leaves) in &shape.cleaves {
        let mut s = set::empty(size);
        for &l in leaves.iter().filter(|&&l| iv.contains(n, l)) {
            let rel = bundle.support(l, n);
            s.union_with(&rel.preimage(&t.seq(n).states));
        }
        v.set(vars[m].clone(), s);
    }
    v
}

/// Fixpoint kind of the constant unfolded at companion node `m`.
pub fn companion_fix(t: &Tableau, m: usize) -> Option<Fix> {
    let seq = t.seq(m);
    match seq.constant().and_then(|u| seq.dl.get(u)) {
        Some(Formula::Fix(fix, ..)) => Some(*fix),
        _ => None,
    }
}
