use std::fmt;

use crate::ast::{Fix, Formula, Labels, SUGAR_VAR};

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &std::collections::BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
        match self {
            Labels::Set(s) => write!(f, "{}", join(s)),
            Labels::All => write!(f, "*"),
            Labels::Except(s) => write!(f, "-{}", join(s)),
        }
    }
}

// Precedence levels: 0 = disjunction, 1 = conjunction, 2 = unary.
// A formula "ends open" when its rightmost construct is a fixpoint binder,
// whose body would swallow anything printed after it.
fn ends_open(phi: &Formula) -> bool {
    match phi {
        Formula::Fix(..) => !is_sugar(phi),
        Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) => ends_open(a),
        Formula::And(_, b) | Formula::Or(_, b) => ends_open(b),
        Formula::Var(_) | Formula::Forall(..) | Formula::Exists(..) => false,
    }
}

fn is_sugar(phi: &Formula) -> bool {
    matches!(phi, Formula::Fix(_, z, body) if z == SUGAR_VAR && matches!(&**body, Formula::Var(v) if v == SUGAR_VAR))
}

fn level(phi: &Formula) -> u8 {
    match phi {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        _ => 2,
    }
}

fn write_at(out: &mut String, phi: &Formula, min_level: u8, followed: bool) {
    let wrap = level(phi) < min_level || (followed && ends_open(phi));
    if wrap {
        out.push('(');
        write_at(out, phi, 0, false);
        out.push(')');
        return;
    }
    match phi {
        Formula::Var(z) => out.push_str(z),
        Formula::Not(a) => {
            out.push('!');
            write_at(out, a, 2, followed);
        }
        Formula::And(a, b) => {
            write_at(out, a, 1, true);
            out.push_str(" && ");
            write_at(out, b, 2, followed);
        }
        Formula::Or(a, b) => {
            write_at(out, a, 0, true);
            out.push_str(" || ");
            write_at(out, b, 1, followed);
        }
        Formula::Box(k, a) => {
            out.push_str(&format!("[{k}]"));
            write_at(out, a, 2, followed);
        }
        Formula::Diamond(k, a) => {
            out.push_str(&format!("<{k}>"));
            write_at(out, a, 2, followed);
        }
        Formula::Fix(s, z, body) => {
            if is_sugar(phi) {
                out.push_str(if *s == Fix::Nu { "tt" } else { "ff" });
            } else {
                out.push_str(&format!("{} {}. ", s.keyword(), z));
                write_at(out, body, 0, false);
            }
        }
        Formula::Forall(a, b) | Formula::Exists(a, b) => {
            out.push_str(if matches!(phi, Formula::Forall(..)) { "forall{" } else { "exists{" });
            write_at(out, a, 0, false);
            out.push_str("}(");
            write_at(out, b, 0, false);
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_at(&mut out, self, 0, false);
        f.write_str(&out)
    }
}
