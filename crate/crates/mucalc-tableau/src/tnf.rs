use std::fmt;

use mucalc_formula::Formula;

use crate::sequent::RuleApp;
use crate::tableau::Tableau;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TnfViolation {
    /// Thin at the root, a σZ node not preceded by Thin, or a Thin not
    /// followed by σZ.
    ThinningRestricted { node: usize },
    /// A constant node whose root path has no Un node for it, or several.
    UnfoldingLimited { node: usize, constant: String, unfoldings: usize },
    /// An or node whose children share a state.
    Irredundant { node: usize },
}

impl fmt::Display for TnfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TnfViolation::ThinningRestricted { node } => write!(f, "thinning-restricted fails at node {node}"),
            TnfViolation::UnfoldingLimited {
                node,
                constant,
                unfoldings,
            } => write!(
                f,
                "unfolding-limited fails at node {node}: {constant} is unfolded {unfoldings} times on its path"
            ),
            TnfViolation::Irredundant { node } => write!(f, "irredundant fails at or node {node}"),
        }
    }
}

/// Checks thinning-restricted, unfolding-limited and irredundant. Constant
/// names are generated per branch, so unfolding-limited is judged along
/// each root path: every node labelled by a constant `U` must have exactly
/// one Un node for `U` among itself and its ancestors.
pub fn is_tnf(t: &Tableau) -> Result<(), Vec<TnfViolation>> {
    let mut out = Vec::new();
    let is_thin = |n: usize| matches!(t.rule(n), Some(RuleApp::Thin(_)));
    let is_sigma = |n: usize| matches!(t.rule(n), Some(RuleApp::Sigma(_)));
    for n in t.preorder() {
        match t.parent(n) {
            None if is_thin(n) => out.push(TnfViolation::ThinningRestricted { node: n }),
            None => {}
            Some(p) if is_sigma(n) != is_thin(p) => out.push(TnfViolation::ThinningRestricted { node: n }),
            Some(_) => {}
        }
        if let Some(u) = t.seq(n).constant() {
            let unfoldings = std::iter::once(n)
                .chain(t.ancestors(n))
                .filter(|&m| {
                    matches!(t.rule(m), Some(RuleApp::Un)) && matches!(&t.seq(m).formula, Formula::Var(w) if w == u)
                })
                .count();
            if unfoldings != 1 {
                out.push(TnfViolation::UnfoldingLimited {
                    node: n,
                    constant: u.to_string(),
                    unfoldings,
                });
            }
        }
        if let (Some(RuleApp::Or(..)), [a, b]) = (t.rule(n), t.children(n)) {
            if !t.seq(*a).states.is_disjoint(&t.seq(*b).states) {
                out.push(TnfViolation::Irredundant { node: n });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
