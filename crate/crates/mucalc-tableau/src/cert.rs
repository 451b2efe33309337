//! Text certificates. Layout:
//!
//! ```text
//! mucalc-certificate 1
//! model: lts
//! states: s0 s1
//! alphabet: a
//! mode: standard
//! valuation:
//!   P: s1
//! nodes: 2
//! node 0
//!   parent: -
//!   children: 1
//!   rule: dia
//!   witness: s0 -> s1
//!   states: s0
//!   formula: <a> P
//!   dl:
//! node 1
//!   ...
//! digest: <sha256 of everything above>
//! ```
//!
//! Node ids are preorder positions. Witness rows are `s -> t` (dia),
//! `s -> d` (exists) or `s @ d -> r` (forall, followed by `period: s p`
//! rows); definition list entries are indented `U = formula` lines. The
//! valuation block records the base valuation on the root's free
//! variables. The digest line is optional on input but checked if present.

use std::collections::BTreeMap;
use std::fmt::Write;

use mucalc_formula::{parse_formula, DefinitionList, Formula};
use mucalc_lattice::set;
use mucalc_models::{Model, ModelKind, StateSet, Valuation};
use sha2::{Digest, Sha256};

use crate::sequent::{ForallWitness, RuleApp, Sequent};
use crate::success::{check_success, Verdict};
use crate::tableau::{Mode, Node, Tableau};

const MAGIC: &str = "mucalc-certificate 1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertError {
    #[error("certificate line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("certificate is for another model: {0}")]
    ModelMismatch(String),
    #[error("valuation disagrees with the certificate on {0}")]
    ValuationMismatch(String),
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub tableau: Tableau,
    pub mode: Mode,
    /// Base valuation on the root's free variables, as recorded.
    pub assumptions: BTreeMap<String, StateSet>,
    /// `None` when the digest line is absent.
    pub digest_ok: Option<bool>,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Standard => "standard",
        Mode::NuComplete => "nu-complete",
    }
}

fn names(model: &Model, s: &StateSet) -> String {
    s.ones().map(|x| format!(" {}", model.state_name(x))).collect()
}

pub fn digest_hex(body: &str) -> String {
    Sha256::digest(body.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Appends a digest line to a certificate body written without one.
pub fn seal(body: &str) -> String {
    format!("{body}digest: {}\n", digest_hex(body))
}

/// Serializes `t` with nodes renumbered in preorder.
pub fn emit_certificate(t: &Tableau, model: &Model, v: &Valuation, mode: Mode) -> String {
    let order = t.preorder();
    let mut id = vec![usize::MAX; t.len()];
    for (i, &n) in order.iter().enumerate() {
        id[n] = i;
    }
    let mut out = String::new();
    let kind = match model.kind() {
        ModelKind::Lts => "lts",
        ModelKind::Tts => "tts",
    };
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "model: {kind}").unwrap();
    writeln!(out, "states:{}", model.state_names().iter().map(|s| format!(" {s}")).collect::<String>()).unwrap();
    writeln!(out, "alphabet:{}", model.alphabet().iter().map(|s| format!(" {s}")).collect::<String>()).unwrap();
    writeln!(out, "mode: {}", mode_name(mode)).unwrap();
    writeln!(out, "valuation:").unwrap();
    for z in t.seq(t.root()).formula.free_vars() {
        writeln!(out, "  {z}:{}", names(model, &v.get(&z))).unwrap();
    }
    writeln!(out, "nodes: {}", t.len()).unwrap();
    for &n in &order {
        let node = t.node(n);
        writeln!(out, "node {}", id[n]).unwrap();
        match node.parent {
            Some(p) => writeln!(out, "  parent: {}", id[p]).unwrap(),
            None => writeln!(out, "  parent: -").unwrap(),
        }
        let kids: String = node.children.iter().map(|&c| format!(" {}", id[c])).collect();
        writeln!(out, "  children:{kids}").unwrap();
        match &node.rule {
            None => writeln!(out, "  rule: -").unwrap(),
            Some(RuleApp::Sigma(u)) => writeln!(out, "  rule: sigma {u}").unwrap(),
            Some(app) => writeln!(out, "  rule: {}", app.name()).unwrap(),
        }
        match &node.rule {
            Some(RuleApp::Dia(f)) => {
                for (&s, &t2) in f {
                    writeln!(out, "  witness: {} -> {}", model.state_name(s), model.state_name(t2)).unwrap();
                }
            }
            Some(RuleApp::Exists(f)) => {
                for (&s, &d) in f {
                    writeln!(out, "  witness: {} -> {d}", model.state_name(s)).unwrap();
                }
            }
            Some(RuleApp::Forall(g)) => {
                for (&(s, d), &r) in &g.table {
                    writeln!(out, "  witness: {} @ {d} -> {r}", model.state_name(s)).unwrap();
                }
                for (&s, &p) in &g.periods {
                    writeln!(out, "  period: {} {p}", model.state_name(s)).unwrap();
                }
            }
            _ => {}
        }
        writeln!(out, "  states:{}", names(model, &node.seq.states)).unwrap();
        writeln!(out, "  formula: {}", node.seq.formula).unwrap();
        writeln!(out, "  dl:").unwrap();
        for (u, body) in node.seq.dl.entries() {
            writeln!(out, "    {u} = {body}").unwrap();
        }
    }
    seal(&out)
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CertError> {
        let line = self.peek().map_or_else(|| self.lines.last().map_or(1, |l| l.0 + 1), |l| l.0);
        Err(CertError::Syntax { line, msg: msg.into() })
    }

    /// Next line, which must read `<indent><key>:` followed by a value.
    fn field(&mut self, indent: &str, key: &str) -> Result<&'a str, CertError> {
        let Some((_, text)) = self.peek() else {
            return self.err(format!("expected `{key}:`, found end of input"));
        };
        let prefix = format!("{indent}{key}:");
        match text.strip_prefix(&prefix) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => {
                self.pos += 1;
                Ok(rest.strip_prefix(' ').unwrap_or(rest))
            }
            _ => self.err(format!("expected `{prefix}`")),
        }
    }

    fn at(&self, indent: &str, key: &str) -> bool {
        self.peek().is_some_and(|(_, t)| t.starts_with(&format!("{indent}{key}:")))
    }
}

fn state(model: &Model, name: &str, lines: &Lines) -> Result<usize, CertError> {
    match model.state_id(name) {
        Some(s) => Ok(s),
        None => lines.err(format!("unknown state `{name}`")),
    }
}

fn state_list(model: &Model, text: &str, lines: &Lines) -> Result<StateSet, CertError> {
    let mut s = set::empty(model.len());
    for w in text.split(' ').filter(|w| !w.is_empty()) {
        let x = state(model, w, lines)?;
        if s.contains(x) {
            return lines.err(format!("state `{w}` listed twice"));
        }
        s.insert(x);
    }
    Ok(s)
}

fn number(text: &str, lines: &Lines) -> Result<usize, CertError> {
    match text.trim().parse::<usize>() {
        Ok(k) if text.trim() == k.to_string() => Ok(k),
        _ => lines.err(format!("expected a number, found `{text}`")),
    }
}

fn formula(text: &str, lines: &Lines) -> Result<Formula, CertError> {
    parse_formula(text).or_else(|e| lines.err(e.to_string()))
}

enum RuleTag {
    Leaf,
    Plain(&'static str),
    Sigma(String),
}

/// Parses a certificate against `model`; the tableau itself is not
/// validated here.
pub fn parse_certificate(text: &str, model: &Model) -> Result<Certificate, CertError> {
    let mut digest_ok = None;
    let mut body_end = text.len();
    if let Some(i) = text.rfind("digest: ") {
        if i == 0 || text.as_bytes()[i - 1] == b'\n' {
            let rest = text[i + "digest: ".len()..].trim_end_matches('\n');
            digest_ok = Some(rest == digest_hex(&text[..i]));
            body_end = i;
        }
    }
    let mut lines = Lines {
        lines: text[..body_end].lines().enumerate().map(|(i, l)| (i + 1, l)).collect(),
        pos: 0,
    };
    if lines.peek().map(|l| l.1) != Some(MAGIC) {
        return lines.err(format!("expected `{MAGIC}`"));
    }
    lines.pos += 1;
    let kind = lines.field("", "model")?;
    let expect_kind = match model.kind() {
        ModelKind::Lts => "lts",
        ModelKind::Tts => "tts",
    };
    if kind != expect_kind {
        return Err(CertError::ModelMismatch(format!("model kind `{kind}`")));
    }
    let st: Vec<&str> = lines.field("", "states")?.split(' ').filter(|w| !w.is_empty()).collect();
    if !st.iter().copied().eq(model.state_names().iter().map(String::as_str)) {
        return Err(CertError::ModelMismatch("state names".into()));
    }
    let al: Vec<&str> = lines.field("", "alphabet")?.split(' ').filter(|w| !w.is_empty()).collect();
    if !al.iter().copied().eq(model.alphabet().iter().map(String::as_str)) {
        return Err(CertError::ModelMismatch("alphabet".into()));
    }
    let mode = match lines.field("", "mode")? {
        "standard" => Mode::Standard,
        "nu-complete" => Mode::NuComplete,
        other => return lines.err(format!("unknown mode `{other}`")),
    };
    lines.field("", "valuation")?;
    let mut assumptions = BTreeMap::new();
    while let Some((_, l)) = lines.peek() {
        let Some(entry) = l.strip_prefix("  ") else { break };
        let Some((z, rest)) = entry.split_once(':') else {
            return lines.err("expected `name: states`");
        };
        if z.contains('#') || z.is_empty() || !z.chars().all(mucalc_formula::is_ident_char) {
            return lines.err(format!("`{z}` is not a valuation variable"));
        }
        if !rest.is_empty() && !rest.starts_with(' ') {
            return lines.err("expected a space after `:`");
        }
        let s = state_list(model, rest, &lines)?;
        if assumptions.insert(z.to_string(), s).is_some() {
            return lines.err(format!("`{z}` assigned twice"));
        }
        lines.pos += 1;
    }
    let count = number(lines.field("", "nodes")?, &lines)?;
    if count == 0 {
        return lines.err("a tableau has at least one node");
    }
    let mut nodes: Vec<Node> = Vec::with_capacity(count);
    let mut tags = Vec::with_capacity(count);
    let mut dia = Vec::with_capacity(count);
    for k in 0..count {
        match lines.peek() {
            Some((_, l)) if l == format!("node {k}") => lines.pos += 1,
            _ => return lines.err(format!("expected `node {k}`")),
        }
        let parent = match lines.field("  ", "parent")? {
            "-" => None,
            p => Some(number(p, &lines)?),
        };
        let mut children = Vec::new();
        for c in lines.field("  ", "children")?.split(' ').filter(|w| !w.is_empty()) {
            let c = number(c, &lines)?;
            if c >= count {
                return lines.err(format!("child {c} out of range"));
            }
            children.push(c);
        }
        let tag = match lines.field("  ", "rule")? {
            "-" => RuleTag::Leaf,
            r => match r.split_once(' ') {
                Some(("sigma", u)) if !u.is_empty() && u.chars().all(mucalc_formula::is_ident_char) => {
                    RuleTag::Sigma(u.to_string())
                }
                _ => match ["and", "or", "box", "dia", "un", "thin", "exists", "forall"].iter().find(|&&x| x == r) {
                    Some(&x) => RuleTag::Plain(x),
                    None => return lines.err(format!("unknown rule `{r}`")),
                },
            },
        };
        let mut pairs = BTreeMap::new();
        let mut table = BTreeMap::new();
        let mut periods = BTreeMap::new();
        while lines.at("  ", "witness") {
            let w = lines.field("  ", "witness")?;
            let Some((lhs, rhs)) = w.split_once(" -> ") else {
                return lines.err("expected `witness: lhs -> rhs`");
            };
            let dup = match &tag {
                RuleTag::Plain("dia") => pairs
                    .insert(state(model, lhs, &lines)?, state(model, rhs, &lines)?)
                    .is_some(),
                RuleTag::Plain("exists") => pairs
                    .insert(state(model, lhs, &lines)?, number(rhs, &lines)?)
                    .is_some(),
                RuleTag::Plain("forall") => {
                    let Some((s, d)) = lhs.split_once(" @ ") else {
                        return lines.err("expected `state @ delay`");
                    };
                    let key = (state(model, s, &lines)?, number(d, &lines)?);
                    table.insert(key, number(rhs, &lines)?).is_some()
                }
                _ => return lines.err("witness on a rule without one"),
            };
            if dup {
                lines.pos -= 1;
                return lines.err("witness row repeated");
            }
        }
        while lines.at("  ", "period") {
            if !matches!(tag, RuleTag::Plain("forall")) {
                return lines.err("period on a rule other than forall");
            }
            let p = lines.field("  ", "period")?;
            let Some((s, k)) = p.split_once(' ') else {
                return lines.err("expected `period: state length`");
            };
            if periods.insert(state(model, s, &lines)?, number(k, &lines)?).is_some() {
                lines.pos -= 1;
                return lines.err("period repeated");
            }
        }
        let states = state_list(model, lines.field("  ", "states")?, &lines)?;
        let phi = formula(lines.field("  ", "formula")?, &lines)?;
        lines.field("  ", "dl")?;
        let mut dl = DefinitionList::new();
        while let Some((_, l)) = lines.peek() {
            let Some(entry) = l.strip_prefix("    ") else { break };
            let Some((u, body)) = entry.split_once(" = ") else {
                return lines.err("expected `U = formula`");
            };
            let body = formula(body, &lines)?;
            dl = match dl.append(u, body) {
                Ok(d) => d,
                Err(e) => return lines.err(e.to_string()),
            };
            lines.pos += 1;
        }
        tags.push(tag);
        dia.push((pairs, ForallWitness { table, periods }));
        nodes.push(Node {
            parent,
            children,
            rule: None,
            seq: Sequent::new(states, dl, phi),
        });
    }
    if lines.peek().is_some() {
        return lines.err("trailing text after the last node");
    }
    // Rule parameters implied by the children.
    for k in 0..count {
        let kid_states = |i: usize| nodes[k].children.get(i).map(|&c| nodes[c].seq.states.clone());
        let empty = || set::empty(model.len());
        let (pairs, forall) = std::mem::take(&mut dia[k]);
        nodes[k].rule = match &tags[k] {
            RuleTag::Leaf => None,
            RuleTag::Sigma(u) => Some(RuleApp::Sigma(u.clone())),
            RuleTag::Plain(r) => Some(match *r {
                "and" => RuleApp::And,
                "or" => RuleApp::Or(kid_states(0).unwrap_or_else(empty), kid_states(1).unwrap_or_else(empty)),
                "box" => RuleApp::Box,
                "dia" => RuleApp::Dia(pairs),
                "un" => RuleApp::Un,
                "thin" => RuleApp::Thin(kid_states(0).unwrap_or_else(empty)),
                "exists" => RuleApp::Exists(pairs),
                "forall" => RuleApp::Forall(forall),
                _ => unreachable!("rule names checked above"),
            }),
        };
    }
    Ok(Certificate {
        tableau: Tableau::from_nodes(nodes, 0),
        mode,
        assumptions,
        digest_ok,
    })
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub mode: Mode,
    pub root: Sequent,
    pub verdict: Verdict,
    /// `None` when the certificate carries no digest line.
    pub digest_ok: Option<bool>,
}

impl Replay {
    pub fn accepted(&self) -> bool {
        self.verdict.success && self.digest_ok != Some(false)
    }
}

/// The trust kernel: parses, checks the recorded valuation, then validates
/// the tableau and judges every leaf. A stale digest is reported alongside
/// the verdict so structural errors stay visible.
pub fn replay(text: &str, model: &Model, v: &Valuation) -> Result<Replay, CertError> {
    let cert = parse_certificate(text, model)?;
    for (z, s) in &cert.assumptions {
        if &v.get(z) != s {
            return Err(CertError::ValuationMismatch(z.clone()));
        }
    }
    let t = &cert.tableau;
    let root = t.seq(t.root()).clone();
    if let Some(z) = root.formula.free_vars().into_iter().find(|z| !cert.assumptions.contains_key(z)) {
        return Err(CertError::ValuationMismatch(format!("{z} (not recorded)")));
    }
    let verdict = check_success(t, model, v, cert.mode);
    Ok(Replay {
        mode: cert.mode,
        root,
        verdict,
        digest_ok: cert.digest_ok,
    })
}
