use mucalc_formula::{Fix, Formula};
use mucalc_lattice::set;
use mucalc_models::{Model, Valuation};

use crate::deps::{dependency_relations, DependencyBundle};
use crate::tableau::{validate_tableau, LeafKind, Mode, Shape, Tableau, TableauError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafVerdict {
    Success,
    /// A state outside `V(Z)` (or inside it, for `¬Z`).
    FreeFails { state: usize },
    /// A state with no K-successor.
    Diamond { state: usize },
    /// A cycle `x0 <: x1 <: .. <: xk <: x0` in the companion relation.
    MuCycle { companion: usize, cycle: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    /// Structural violations; when non-empty no leaf was judged.
    pub errors: Vec<TableauError>,
    pub leaves: Vec<(usize, LeafVerdict)>,
    pub success: bool,
}

impl Verdict {
    pub fn failures(&self) -> impl Iterator<Item = &(usize, LeafVerdict)> {
        self.leaves.iter().filter(|(_, v)| *v != LeafVerdict::Success)
    }
}

/// Structural validation followed by the dependency bundle.
pub fn analyze(t: &Tableau, model: &Model, mode: Mode) -> Result<(Shape, DependencyBundle), Vec<TableauError>> {
    let shape = validate_tableau(t, model, mode)?;
    let bundle = dependency_relations(t, model, &shape);
    Ok((shape, bundle))
}

pub fn check_success(t: &Tableau, model: &Model, v: &Valuation, mode: Mode) -> Verdict {
    match validate_tableau(t, model, mode) {
        Err(errors) => Verdict {
            errors,
            leaves: Vec::new(),
            success: false,
        },
        Ok(shape) => {
            let has_mu = shape
                .leaves
                .values()
                .any(|k| matches!(k, LeafKind::Sigma { fix: Fix::Mu, .. }));
            let bundle = has_mu.then(|| dependency_relations(t, model, &shape));
            judge(t, model, v, &shape, bundle.as_ref())
        }
    }
}

/// Leaf verdicts for an already validated tableau. `bundle` may be `None`
/// only when no leaf is a μ-leaf.
pub fn judge(t: &Tableau, model: &Model, v: &Valuation, shape: &Shape, bundle: Option<&DependencyBundle>) -> Verdict {
    let mut leaves = Vec::new();
    for (&n, kind) in &shape.leaves {
        let seq = t.seq(n);
        let verdict = match kind {
            LeafKind::Free => {
                let (z, negated) = match &seq.formula {
                    Formula::Var(z) => (z, false),
                    Formula::Not(a) => match &**a {
                        Formula::Var(z) => (z, true),
                        _ => unreachable!("free leaf"),
                    },
                    _ => unreachable!("free leaf"),
                };
                let vz = v.get(z);
                let bad = if negated {
                    set::intersection(&seq.states, &vz)
                } else {
                    set::difference(&seq.states, &vz)
                };
                match bad.ones().next() {
                    Some(state) => LeafVerdict::FreeFails { state },
                    None => LeafVerdict::Success,
                }
            }
            LeafKind::Diamond => {
                let Formula::Diamond(k, _) = &seq.formula else { unreachable!("diamond leaf") };
                let state = seq
                    .states
                    .ones()
                    .find(|&s| model.successors(s, k).is_empty())
                    .expect("diamond leaf");
                LeafVerdict::Diamond { state }
            }
            LeafKind::Sigma { fix: Fix::Nu, .. } => LeafVerdict::Success,
            LeafKind::Sigma { companion, fix: Fix::Mu } => {
                let rel = bundle.expect("bundle needed for μ-leaves").companion(*companion);
                match rel.shortest_cycle() {
                    None => LeafVerdict::Success,
                    Some(cycle) => LeafVerdict::MuCycle {
                        companion: *companion,
                        cycle,
                    },
                }
            }
        };
        leaves.push((n, verdict));
    }
    let success = leaves.iter().all(|(_, v)| *v == LeafVerdict::Success);
    Verdict {
        errors: Vec::new(),
        leaves,
        success,
    }
}
