use std::collections::BTreeMap;
use std::fmt;

use mucalc_formula::{Fix, Formula};
use mucalc_models::Model;

use crate::sequent::{apply_rule, RuleApp, RuleError, Sequent};

#[derive(Clone, Debug)]
pub struct Node {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// `ρ(n)`, defined exactly on internal nodes.
    pub rule: Option<RuleApp>,
    pub seq: Sequent,
}

/// Finite ordered tree of sequents. Node ids are indices into `nodes`.
#[derive(Clone, Debug)]
pub struct Tableau {
    nodes: Vec<Node>,
    root: usize,
}

/// Terminal criterion for leaves labelled by a μ-constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Any state set contained in the companion's.
    #[default]
    Standard,
    /// Only the empty state set.
    NuComplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    /// `Z` or `¬Z` with `Z` outside the definition list.
    Free,
    /// `⟨K⟩Φ` with a state lacking a K-successor.
    Diamond,
    /// Constant leaf closed by its companion node.
    Sigma { companion: usize, fix: Fix },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableauError {
    Tree(String),
    Sequent { node: usize, msg: String },
    Rule { node: usize, source: RuleError },
    ChildCount { node: usize, expected: usize, found: usize },
    ChildMismatch { node: usize, child: usize },
    RootDlNonEmpty,
    LeafNotTerminal { node: usize },
}

impl fmt::Display for TableauError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauError::Tree(msg) => write!(f, "malformed tree: {msg}"),
            TableauError::Sequent { node, msg } => write!(f, "node {node}: {msg}"),
            TableauError::Rule { node, source } => write!(f, "node {node}: {source}"),
            TableauError::ChildCount { node, expected, found } => {
                write!(f, "node {node}: rule yields {expected} premises, node has {found} children")
            }
            TableauError::ChildMismatch { node, child } => {
                write!(f, "edge {node} -> {child}: child sequent differs from the rule's premise")
            }
            TableauError::RootDlNonEmpty => write!(f, "root definition list nonempty"),
            TableauError::LeafNotTerminal { node } => write!(f, "node {node}: leaf not terminal"),
        }
    }
}

impl std::error::Error for TableauError {}

/// Leaf classification and the companion structure of a valid tableau.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub leaves: BTreeMap<usize, LeafKind>,
    /// Nodes with `ρ = Un`, in preorder.
    pub companions: Vec<usize>,
    /// `cleaves(m)` for every companion node `m`, ascending.
    pub cleaves: BTreeMap<usize, Vec<usize>>,
}

impl Shape {
    pub fn is_companion(&self, n: usize) -> bool {
        self.cleaves.contains_key(&n)
    }
}

impl Tableau {
    /// Single-node tableau.
    pub fn new(root: Sequent) -> Tableau {
        Tableau {
            nodes: vec![Node {
                parent: None,
                children: Vec::new(),
                rule: None,
                seq: root,
            }],
            root: 0,
        }
    }

    /// Assembles a tableau without any checks; see [`validate_tableau`].
    pub fn from_nodes(nodes: Vec<Node>, root: usize) -> Tableau {
        Tableau { nodes, root }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, n: usize) -> &Node {
        &self.nodes[n]
    }

    pub fn seq(&self, n: usize) -> &Sequent {
        &self.nodes[n].seq
    }

    pub fn parent(&self, n: usize) -> Option<usize> {
        self.nodes[n].parent
    }

    pub fn children(&self, n: usize) -> &[usize] {
        &self.nodes[n].children
    }

    pub fn rule(&self, n: usize) -> Option<&RuleApp> {
        self.nodes[n].rule.as_ref()
    }

    pub fn is_leaf(&self, n: usize) -> bool {
        self.nodes[n].children.is_empty()
    }

    /// Applies `app` at leaf `n` and appends the premises as its children.
    pub fn expand(&mut self, n: usize, app: RuleApp, model: &Model) -> Result<Vec<usize>, RuleError> {
        assert!(self.is_leaf(n) && self.nodes[n].rule.is_none(), "node {n} is already expanded");
        let premises = apply_rule(&self.nodes[n].seq, &app, model)?;
        let first = self.nodes.len();
        for seq in premises {
            self.nodes.push(Node {
                parent: Some(n),
                children: Vec::new(),
                rule: None,
                seq,
            });
        }
        let ids: Vec<usize> = (first..self.nodes.len()).collect();
        self.nodes[n].children = ids.clone();
        self.nodes[n].rule = Some(app);
        Ok(ids)
    }

    /// Drops every node with id `≥ mark`; nodes left without children
    /// become leaves again. Undoes expansions made after `len() == mark`.
    pub fn rollback(&mut self, mark: usize) {
        self.nodes.truncate(mark);
        for node in &mut self.nodes {
            if node.children.iter().any(|&c| c >= mark) {
                node.children.clear();
                node.rule = None;
            }
        }
    }

    /// Strict ancestors of `n`, nearest first.
    pub fn ancestors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.nodes[n].parent, |&m| self.nodes[m].parent)
    }

    /// Node ids in preorder from the root (children left to right).
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    /// Node ids with every node after all of its descendants.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = self.preorder();
        out.reverse();
        out
    }

    /// Preorder intervals: `m ∈ D(n)` iff `pre[n] ≤ pre[m] ≤ last[n]`.
    pub fn intervals(&self) -> Intervals {
        let order = self.preorder();
        let mut pre = vec![usize::MAX; self.nodes.len()];
        for (i, &n) in order.iter().enumerate() {
            pre[n] = i;
        }
        let mut last = pre.clone();
        for &n in order.iter().rev() {
            if let Some(p) = self.nodes[n].parent {
                last[p] = last[p].max(last[n]);
            }
        }
        Intervals { pre, last, order }
    }

    /// Terminal classification of leaf `n`, or `None` if it is not terminal.
    pub fn classify_leaf(&self, n: usize, model: &Model, mode: Mode) -> Option<LeafKind> {
        let seq = &self.nodes[n].seq;
        match &seq.formula {
            Formula::Var(z) if !seq.dl.contains(z) => Some(LeafKind::Free),
            Formula::Not(a) if matches!(&**a, Formula::Var(z) if !seq.dl.contains(z)) => Some(LeafKind::Free),
            Formula::Diamond(k, _) => seq
                .states
                .ones()
                .any(|s| model.successors(s, k).is_empty())
                .then_some(LeafKind::Diamond),
            Formula::Var(u) => {
                let fix = match seq.dl.get(u) {
                    Some(Formula::Fix(fix, ..)) => *fix,
                    _ => return None,
                };
                if mode == Mode::NuComplete && fix == Fix::Mu && !seq.states.is_clear() {
                    return None;
                }
                self.companion_of(n).map(|companion| LeafKind::Sigma { companion, fix })
            }
            _ => None,
        }
    }

    /// Deepest strict ancestor with `ρ = Un`, the same constant and a
    /// superset of the leaf's states.
    pub fn companion_of(&self, n: usize) -> Option<usize> {
        let seq = &self.nodes[n].seq;
        let Formula::Var(u) = &seq.formula else {
            return None;
        };
        self.ancestors(n).find(|&m| {
            let node = &self.nodes[m];
            node.rule == Some(RuleApp::Un)
                && matches!(&node.seq.formula, Formula::Var(w) if w == u)
                && seq.states.is_subset(&node.seq.states)
        })
    }

    /// Companion nodes, their companion leaves and the leaf kinds. Leaves
    /// that are not terminal are left out of `leaves`.
    pub fn shape(&self, model: &Model, mode: Mode) -> Shape {
        let iv = self.intervals();
        let mut leaves = BTreeMap::new();
        for n in 0..self.nodes.len() {
            if self.is_leaf(n) && self.nodes[n].rule.is_none() {
                if let Some(k) = self.classify_leaf(n, model, mode) {
                    leaves.insert(n, k);
                }
            }
        }
        let companions: Vec<usize> = iv
            .order
            .iter()
            .copied()
            .filter(|&n| self.nodes[n].rule == Some(RuleApp::Un))
            .collect();
        // cleaves(m): leaves strictly below m with m's constant and a subset
        // of its states, minus the companion leaves of companion nodes
        // strictly below m. Deeper companions come first in reverse preorder.
        let mut cleaves: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &m in companions.iter().rev() {
            let mseq = &self.nodes[m].seq;
            let claimed: Vec<usize> = cleaves
                .iter()
                .filter(|(&m2, _)| m2 != m && iv.contains(m, m2))
                .flat_map(|(_, ls)| ls.iter().copied())
                .collect();
            let mine: Vec<usize> = (0..self.nodes.len())
                .filter(|&l| {
                    l != m
                        && iv.contains(m, l)
                        && self.is_leaf(l)
                        && self.nodes[l].seq.formula.syntactically_equal(&mseq.formula)
                        && self.nodes[l].seq.states.is_subset(&mseq.states)
                        && !claimed.contains(&l)
                })
                .collect();
            cleaves.insert(m, mine);
        }
        Shape {
            leaves,
            companions,
            cleaves,
        }
    }
}

/// Preorder numbering with subtree extents.
#[derive(Clone, Debug)]
pub struct Intervals {
    pub pre: Vec<usize>,
    pub last: Vec<usize>,
    pub order: Vec<usize>,
}

impl Intervals {
    /// `m ∈ D(n)` (reflexive).
    pub fn contains(&self, n: usize, m: usize) -> bool {
        self.pre[n] <= self.pre[m] && self.pre[m] <= self.last[n]
    }
}

/// Structural check of a complete tableau: tree axioms, every internal
/// node reproducing its rule's premises, empty root definition list and
/// terminal leaves. Reports every violation found.
pub fn validate_tableau(t: &Tableau, model: &Model, mode: Mode) -> Result<Shape, Vec<TableauError>> {
    let mut errs = Vec::new();
    let n = t.nodes.len();
    if t.root >= n {
        return Err(vec![TableauError::Tree(format!("root {} out of range", t.root))]);
    }
    if t.nodes[t.root].parent.is_some() {
        errs.push(TableauError::Tree("root has a parent".into()));
    }
    let mut seen = vec![false; n];
    seen[t.root] = true;
    let mut stack = vec![t.root];
    while let Some(m) = stack.pop() {
        for &c in &t.nodes[m].children {
            if c >= n {
                errs.push(TableauError::Tree(format!("node {m} has unknown child {c}")));
            } else if seen[c] {
                errs.push(TableauError::Tree(format!("node {c} is reached twice")));
            } else if t.nodes[c].parent != Some(m) {
                errs.push(TableauError::Tree(format!("child {c} of node {m} names another parent")));
            } else {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    if let Some(u) = seen.iter().position(|&b| !b) {
        errs.push(TableauError::Tree(format!("node {u} is not reachable from the root")));
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    if !t.nodes[t.root].seq.dl.is_empty() {
        errs.push(TableauError::RootDlNonEmpty);
    }
    for (id, node) in t.nodes.iter().enumerate() {
        if let Err(msg) = node.seq.check(model) {
            errs.push(TableauError::Sequent { node: id, msg });
            continue;
        }
        match &node.rule {
            None if !node.children.is_empty() => {
                errs.push(TableauError::Tree(format!("internal node {id} has no rule")));
            }
            None => {
                if t.classify_leaf(id, model, mode).is_none() {
                    errs.push(TableauError::LeafNotTerminal { node: id });
                }
            }
            Some(app) => match apply_rule(&node.seq, app, model) {
                Err(source) => errs.push(TableauError::Rule { node: id, source }),
                Ok(premises) if premises.len() != node.children.len() => errs.push(TableauError::ChildCount {
                    node: id,
                    expected: premises.len(),
                    found: node.children.len(),
                }),
                Ok(premises) => {
                    for (p, &c) in premises.iter().zip(&node.children) {
                        if !p.same_as(&t.nodes[c].seq) {
                            errs.push(TableauError::ChildMismatch { node: id, child: c });
                        }
                    }
                }
            },
        }
    }
    if errs.is_empty() {
        Ok(t.shape(model, mode))
    } else {
        Err(errs)
    }
}
