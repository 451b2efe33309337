use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

/// A set of action labels as written in a modality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Labels {
    /// An explicit finite set of actions.
    Set(BTreeSet<String>),
    /// Every action of the alphabet (`*`).
    All,
    /// Every action except the listed ones (`-a,b`).
    Except(BTreeSet<String>),
}

impl Labels {
    pub fn of<I, S>(names: I) -> Labels
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Labels::Set(names.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, action: &str) -> bool {
        match self {
            Labels::Set(s) => s.contains(action),
            Labels::All => true,
            Labels::Except(s) => !s.contains(action),
        }
    }

    /// Resolves the label set to an explicit set against `alphabet`.
    pub fn normalize(&self, alphabet: &BTreeSet<String>) -> Labels {
        Labels::Set(
            alphabet
                .iter()
                .filter(|a| self.contains(a))
                .cloned()
                .collect(),
        )
    }

    /// Action names mentioned syntactically.
    pub fn mentioned(&self) -> impl Iterator<Item = &String> {
        let set = match self {
            Labels::Set(s) | Labels::Except(s) => Some(s),
            Labels::All => None,
        };
        set.into_iter().flatten()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fix {
    Mu,
    Nu,
}

impl Fix {
    pub fn dual(self) -> Fix {
        match self {
            Fix::Mu => Fix::Nu,
            Fix::Nu => Fix::Mu,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Fix::Mu => "mu",
            Fix::Nu => "nu",
        }
    }
}

/// Reserved bound variable used by the `tt` / `ff` sugar.
pub const SUGAR_VAR: &str = "Z#";

/// Mu-calculus formula, including the two timed modalities.
///
/// Equality and hashing are taken up to renaming of bound variables.
#[derive(Clone, Debug)]
pub enum Formula {
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Box(Labels, Box<Formula>),
    Diamond(Labels, Box<Formula>),
    Fix(Fix, String, Box<Formula>),
    /// `forall{release}(hold)`
    Forall(Box<Formula>, Box<Formula>),
    /// `exists{hold}(target)`
    Exists(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn boxed(k: Labels, f: Formula) -> Formula {
        Formula::Box(k, Box::new(f))
    }

    pub fn dia(k: Labels, f: Formula) -> Formula {
        Formula::Diamond(k, Box::new(f))
    }

    pub fn fix(sigma: Fix, z: impl Into<String>, body: Formula) -> Formula {
        Formula::Fix(sigma, z.into(), Box::new(body))
    }

    pub fn mu(z: impl Into<String>, body: Formula) -> Formula {
        Formula::fix(Fix::Mu, z, body)
    }

    pub fn nu(z: impl Into<String>, body: Formula) -> Formula {
        Formula::fix(Fix::Nu, z, body)
    }

    pub fn forall(release: Formula, hold: Formula) -> Formula {
        Formula::Forall(Box::new(release), Box::new(hold))
    }

    pub fn exists(hold: Formula, target: Formula) -> Formula {
        Formula::Exists(Box::new(hold), Box::new(target))
    }

    /// `tt`, i.e. `nu Z#. Z#`.
    pub fn tt() -> Formula {
        Formula::nu(SUGAR_VAR, Formula::var(SUGAR_VAR))
    }

    /// `ff`, i.e. `mu Z#. Z#`.
    pub fn ff() -> Formula {
        Formula::mu(SUGAR_VAR, Formula::var(SUGAR_VAR))
    }

    pub fn is_fixpoint(&self) -> bool {
        matches!(self, Formula::Fix(..))
    }

    pub fn is_timed(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::Forall(..) | Formula::Exists(..) => true,
            Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) | Formula::Fix(_, _, a) => {
                a.is_timed()
            }
            Formula::And(a, b) | Formula::Or(a, b) => a.is_timed() || b.is_timed(),
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) => vec![],
            Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) | Formula::Fix(_, _, a) => {
                vec![a]
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Forall(a, b)
            | Formula::Exists(a, b) => vec![a, b],
        }
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_free(&self, z: &str) -> bool {
        fn go(f: &Formula, z: &str) -> bool {
            match f {
                Formula::Var(v) => v == z,
                Formula::Fix(_, y, body) => y != z && go(body, z),
                _ => f.children().into_iter().any(|c| go(c, z)),
            }
        }
        go(self, z)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Variables bound by some fixpoint operator.
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Fix(_, z, _) = f {
                out.insert(z.clone());
            }
        });
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Var(z) | Formula::Fix(_, z, _) => {
                out.insert(z.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// All subformula occurrences in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.visit(&mut |f| out.push(f));
        out
    }

    /// Number of fixpoint-kind changes along the worst nesting path, counting
    /// the outermost fixpoint as the first. The constants tt and ff count as
    /// atoms.
    pub fn alternation_depth(&self) -> usize {
        fn go(f: &Formula, last: Option<Fix>, count: usize) -> usize {
            match f {
                Formula::Fix(_, z, body) if z == SUGAR_VAR && matches!(&**body, Formula::Var(v) if v == SUGAR_VAR) => count,
                Formula::Fix(s, _, body) => {
                    let c = if last == Some(*s) { count } else { count + 1 };
                    go(body, Some(*s), c)
                }
                _ => f
                    .children()
                    .into_iter()
                    .map(|c| go(c, last, count))
                    .max()
                    .unwrap_or(count),
            }
        }
        go(self, None, 0)
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match f {
        Formula::Var(v) => {
            if !bound.iter().any(|b| b == v) {
                out.insert(v.clone());
            }
        }
        Formula::Fix(_, z, body) => {
            bound.push(z.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        _ => {
            for c in f.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

fn lookup(env: &[&str], v: &str) -> Option<usize> {
    env.iter().rev().position(|b| *b == v)
}

fn alpha_eq<'a>(a: &'a Formula, b: &'a Formula, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
    match (a, b) {
        (Formula::Var(x), Formula::Var(y)) => match (lookup(ea, x), lookup(eb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Formula::Not(x), Formula::Not(y)) => alpha_eq(x, y, ea, eb),
        (Formula::And(x1, x2), Formula::And(y1, y2))
        | (Formula::Or(x1, x2), Formula::Or(y1, y2))
        | (Formula::Forall(x1, x2), Formula::Forall(y1, y2))
        | (Formula::Exists(x1, x2), Formula::Exists(y1, y2)) => {
            alpha_eq(x1, y1, ea, eb) && alpha_eq(x2, y2, ea, eb)
        }
        (Formula::Box(k, x), Formula::Box(l, y)) | (Formula::Diamond(k, x), Formula::Diamond(l, y)) => {
            k == l && alpha_eq(x, y, ea, eb)
        }
        (Formula::Fix(s, z, x), Formula::Fix(t, w, y)) => {
            if s != t {
                return false;
            }
            ea.push(z);
            eb.push(w);
            let r = alpha_eq(x, y, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        _ => false,
    }
}

fn alpha_hash<'a, H: Hasher>(f: &'a Formula, env: &mut Vec<&'a str>, h: &mut H) {
    std::mem::discriminant(f).hash(h);
    match f {
        Formula::Var(v) => match lookup(env, v) {
            Some(i) => (0u8, i).hash(h),
            None => (1u8, v).hash(h),
        },
        Formula::Box(k, _) | Formula::Diamond(k, _) => {
            k.hash(h);
            alpha_hash(f.children()[0], env, h);
        }
        Formula::Fix(s, z, body) => {
            s.hash(h);
            env.push(z);
            alpha_hash(body, env, h);
            env.pop();
        }
        _ => {
            for c in f.children() {
                alpha_hash(c, env, h);
            }
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        alpha_eq(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        alpha_hash(self, &mut Vec::new(), state)
    }
}

impl Formula {
    /// Exact syntactic equality, bound-variable names included.
    pub fn syntactically_equal(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Var(x), Formula::Var(y)) => x == y,
            (Formula::Fix(s, z, x), Formula::Fix(t, w, y)) => s == t && z == w && x.syntactically_equal(y),
            (Formula::Box(k, x), Formula::Box(l, y)) | (Formula::Diamond(k, x), Formula::Diamond(l, y)) => {
                k == l && x.syntactically_equal(y)
            }
            _ => {
                std::mem::discriminant(self) == std::mem::discriminant(other)
                    && self
                        .children()
                        .iter()
                        .zip(other.children())
                        .all(|(a, b)| a.syntactically_equal(b))
            }
        }
    }
}
