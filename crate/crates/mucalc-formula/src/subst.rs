use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substitution has {vars} variables but {repls} replacements")]
    LengthMismatch { vars: usize, repls: usize },
    #[error("variable `{0}` appears twice in a substitution")]
    Duplicate(String),
}

/// Strips a trailing `'k` freshening suffix.
fn base_name(z: &str) -> &str {
    match z.rfind('\'') {
        Some(i) if i > 0 && z[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < z.len() => &z[..i],
        _ => z,
    }
}

/// First name of the form `base'k` (k = 1, 2, ...) not in `avoid`.
pub fn fresh_name(z: &str, avoid: &BTreeSet<String>) -> String {
    let base = base_name(z);
    (1..)
        .map(|k| format!("{base}'{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded counter")
}

fn go(f: &Formula, map: &[(String, Formula)]) -> Formula {
    match f {
        Formula::Var(z) => match map.iter().find(|(v, _)| v == z) {
            Some((_, r)) => r.clone(),
            None => f.clone(),
        },
        Formula::Fix(s, y, body) => {
            let active: Vec<(String, Formula)> = map
                .iter()
                .filter(|(v, _)| v != y && body.is_free(v))
                .cloned()
                .collect();
            if active.is_empty() {
                return f.clone();
            }
            let captured: BTreeSet<String> = active.iter().flat_map(|(_, r)| r.free_vars()).collect();
            if captured.contains(y) {
                let mut avoid = captured;
                avoid.extend(body.all_vars());
                avoid.extend(active.iter().map(|(v, _)| v.clone()));
                let y2 = fresh_name(y, &avoid);
                let mut renamed = active;
                renamed.push((y.clone(), Formula::Var(y2.clone())));
                Formula::fix(*s, y2, go(body, &renamed))
            } else {
                Formula::fix(*s, y.clone(), go(body, &active))
            }
        }
        Formula::Not(a) => Formula::not(go(a, map)),
        Formula::And(a, b) => Formula::and(go(a, map), go(b, map)),
        Formula::Or(a, b) => Formula::or(go(a, map), go(b, map)),
        Formula::Box(k, a) => Formula::boxed(k.clone(), go(a, map)),
        Formula::Diamond(k, a) => Formula::dia(k.clone(), go(a, map)),
        Formula::Forall(a, b) => Formula::forall(go(a, map), go(b, map)),
        Formula::Exists(a, b) => Formula::exists(go(a, map), go(b, map)),
    }
}

/// Simultaneous capture-free substitution of `repls` for the free
/// occurrences of `vars`. Bound variables are renamed to `Z'1`, `Z'2`, ...
/// when they would capture a free variable of a replacement.
pub fn substitute(phi: &Formula, vars: &[String], repls: &[Formula]) -> Result<Formula, SubstError> {
    if vars.len() != repls.len() {
        return Err(SubstError::LengthMismatch {
            vars: vars.len(),
            repls: repls.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(SubstError::Duplicate(v.clone()));
        }
    }
    let map: Vec<(String, Formula)> = vars.iter().cloned().zip(repls.iter().cloned()).collect();
    Ok(go(phi, &map))
}

/// Single-variable substitution `phi[z := repl]`.
pub fn subst1(phi: &Formula, z: &str, repl: &Formula) -> Formula {
    go(phi, &[(z.to_string(), repl.clone())])
}
