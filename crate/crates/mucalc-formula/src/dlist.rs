use thiserror::Error;

use crate::ast::Formula;
use crate::subst::subst1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlError {
    #[error("constant `{0}` is already defined")]
    Duplicate(String),
    #[error("body of `{0}` is not a fixpoint formula")]
    NotFixpoint(String),
    #[error("constant `{0}` appears bound in a definition body")]
    Bound(String),
    #[error("constant `{later}` appears free in the body of earlier or equal entry `{at}`")]
    ForwardReference { later: String, at: String },
    #[error("constant `{0}` is not defined")]
    Undefined(String),
}

/// Which part of a definition list to keep relative to a constant U.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slice {
    /// Entries strictly before U.
    StrictPrefix,
    /// Entries up to and including U.
    Prefix,
    /// Entries strictly after U.
    StrictSuffix,
    /// Entries from U onwards.
    Suffix,
}

/// Ordered bindings `U = sigma Z. Phi` of definitional constants.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DefinitionList {
    entries: Vec<(String, Formula)>,
}

impl DefinitionList {
    pub fn new() -> DefinitionList {
        DefinitionList::default()
    }

    /// Builds a list entry by entry, validating every step.
    pub fn from_entries<I>(entries: I) -> Result<DefinitionList, DlError>
    where
        I: IntoIterator<Item = (String, Formula)>,
    {
        let mut dl = DefinitionList::new();
        for (u, body) in entries {
            dl = dl.append(&u, body)?;
        }
        Ok(dl)
    }

    pub fn entries(&self) -> &[(String, Formula)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, u: &str) -> bool {
        self.position(u).is_some()
    }

    pub fn position(&self, u: &str) -> Option<usize> {
        self.entries.iter().position(|(v, _)| v == u)
    }

    pub fn get(&self, u: &str) -> Option<&Formula> {
        self.entries.iter().find(|(v, _)| v == u).map(|(_, b)| b)
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.entries.iter().map(|(u, _)| u)
    }

    /// `self · (u = body)`, re-checking the list invariants.
    pub fn append(&self, u: &str, body: Formula) -> Result<DefinitionList, DlError> {
        if self.contains(u) {
            return Err(DlError::Duplicate(u.to_string()));
        }
        if !body.is_fixpoint() {
            return Err(DlError::NotFixpoint(u.to_string()));
        }
        let bound = body.bound_vars();
        if let Some(c) = self.domain().chain(std::iter::once(&u.to_string())).find(|c| bound.contains(*c)) {
            return Err(DlError::Bound(c.clone()));
        }
        for (v, b) in &self.entries {
            if b.bound_vars().contains(u) {
                return Err(DlError::Bound(u.to_string()));
            }
            if b.is_free(u) {
                return Err(DlError::ForwardReference {
                    later: u.to_string(),
                    at: v.clone(),
                });
            }
        }
        if body.is_free(u) {
            return Err(DlError::ForwardReference {
                later: u.to_string(),
                at: u.to_string(),
            });
        }
        let mut entries = self.entries.clone();
        entries.push((u.to_string(), body));
        Ok(DefinitionList { entries })
    }

    pub fn slice(&self, u: &str, which: Slice) -> Result<DefinitionList, DlError> {
        let i = self.position(u).ok_or_else(|| DlError::Undefined(u.to_string()))?;
        let range = match which {
            Slice::StrictPrefix => 0..i,
            Slice::Prefix => 0..i + 1,
            Slice::StrictSuffix => i + 1..self.len(),
            Slice::Suffix => i..self.len(),
        };
        Ok(DefinitionList {
            entries: self.entries[range].to_vec(),
        })
    }

    /// Disjoint domains, and no constant of `other` occurs in a body of `self`.
    pub fn compatible(&self, other: &DefinitionList) -> bool {
        if self.domain().any(|u| other.contains(u)) {
            return false;
        }
        self.entries.iter().all(|(_, b)| {
            let vars = b.all_vars();
            other.domain().all(|u| !vars.contains(u))
        })
    }

    /// Concatenation, validated entry by entry.
    pub fn concat(&self, other: &DefinitionList) -> Result<DefinitionList, DlError> {
        let mut dl = self.clone();
        for (u, b) in &other.entries {
            dl = dl.append(u, b.clone())?;
        }
        Ok(dl)
    }

    /// `phi[Delta]`: substitutes bodies for constants, last entry first.
    pub fn expand(&self, phi: &Formula) -> Formula {
        self.entries
            .iter()
            .rev()
            .fold(phi.clone(), |acc, (u, body)| subst1(&acc, u, body))
    }
}

impl std::fmt::Display for DefinitionList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(u, b)| format!("({u} = {b})")).collect();
        write!(f, "{}", parts.join(" "))
    }
}
