use std::collections::HashSet;

use crate::ast::Formula;

/// Offending fixpoint subformula whose bound variable occurs negatively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subformula: Formula,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "bound variable not positive in `{}`", self.subformula)
    }
}

/// True iff every free occurrence of `z` in `phi` sits under an even number
/// of negations.
pub fn is_positive(z: &str, phi: &Formula) -> bool {
    fn go(f: &Formula, z: &str, neg: bool) -> bool {
        match f {
            Formula::Var(v) => v != z || !neg,
            Formula::Not(a) => go(a, z, !neg),
            Formula::Fix(_, y, body) => y == z || go(body, z, neg),
            _ => f.children().into_iter().all(|c| go(c, z, neg)),
        }
    }
    go(phi, z, false)
}

/// Checks that every fixpoint binds a variable positive in its body.
pub fn check_well_formed(phi: &Formula) -> Result<(), Violation> {
    let mut bad = None;
    phi.visit(&mut |f| {
        if bad.is_none() {
            if let Formula::Fix(_, z, body) = f {
                if !is_positive(z, body) {
                    bad = Some(f.clone());
                }
            }
        }
    });
    match bad {
        Some(subformula) => Err(Violation { subformula }),
        None => Ok(()),
    }
}

/// Positive normal form: negation only in front of variables that are not
/// bound by an enclosing fixpoint.
pub fn is_pnf(phi: &Formula) -> bool {
    fn go<'a>(f: &'a Formula, bound: &mut Vec<&'a str>) -> bool {
        match f {
            Formula::Var(_) => true,
            Formula::Not(a) => matches!(&**a, Formula::Var(v) if !bound.contains(&v.as_str())),
            Formula::Fix(_, z, body) => {
                bound.push(z);
                let r = go(body, bound);
                bound.pop();
                r
            }
            _ => f.children().into_iter().all(|c| go(c, bound)),
        }
    }
    go(phi, &mut Vec::new())
}

/// Pushes negations inward using the dual operators. The input must be
/// well-formed; the result denotes the same set in every model.
pub fn to_pnf(phi: &Formula) -> Formula {
    // `flipped` holds bound variables whose binder was dualised, so that an
    // occurrence stands for its own negation.
    fn go(f: &Formula, neg: bool, flipped: &mut Vec<(String, bool)>) -> Formula {
        match f {
            Formula::Var(z) => {
                let flip = flipped
                    .iter()
                    .rev()
                    .find(|(v, _)| v == z)
                    .map(|(_, fl)| *fl)
                    .unwrap_or(false);
                if neg ^ flip {
                    Formula::not(Formula::Var(z.clone()))
                } else {
                    Formula::Var(z.clone())
                }
            }
            Formula::Not(a) => go(a, !neg, flipped),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (x, y) = (go(a, neg, flipped), go(b, neg, flipped));
                if matches!(f, Formula::And(..)) ^ neg {
                    Formula::and(x, y)
                } else {
                    Formula::or(x, y)
                }
            }
            Formula::Box(k, a) | Formula::Diamond(k, a) => {
                let x = go(a, neg, flipped);
                if matches!(f, Formula::Box(..)) ^ neg {
                    Formula::boxed(k.clone(), x)
                } else {
                    Formula::dia(k.clone(), x)
                }
            }
            Formula::Fix(s, z, body) => {
                flipped.push((z.clone(), neg));
                let b = go(body, neg, flipped);
                flipped.pop();
                Formula::fix(if neg { s.dual() } else { *s }, z.clone(), b)
            }
            Formula::Forall(a, b) | Formula::Exists(a, b) => {
                let (x, y) = (go(a, neg, flipped), go(b, neg, flipped));
                if matches!(f, Formula::Forall(..)) ^ neg {
                    Formula::forall(x, y)
                } else {
                    Formula::exists(x, y)
                }
            }
        }
    }
    go(phi, false, &mut Vec::new())
}

/// True iff no two fixpoint operators bind the same variable name.
pub fn has_distinct_binders(phi: &Formula) -> bool {
    let mut seen = HashSet::new();
    let mut ok = true;
    phi.visit(&mut |f| {
        if let Formula::Fix(_, z, _) = f {
            ok &= seen.insert(z.clone());
        }
    });
    ok
}
