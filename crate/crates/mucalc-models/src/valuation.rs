use std::collections::BTreeMap;
use std::fmt;

use mucalc_lattice::set;

use crate::model::{Model, StateSet};

/// Assignment of state sets to variables. Unlisted variables denote the
/// empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    n: usize,
    map: BTreeMap<String, StateSet>,
}

impl Valuation {
    pub fn empty(model: &Model) -> Valuation {
        Valuation::over(model.len())
    }

    pub fn over(n: usize) -> Valuation {
        Valuation { n, map: BTreeMap::new() }
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn get(&self, z: &str) -> StateSet {
        self.map.get(z).cloned().unwrap_or_else(|| set::empty(self.n))
    }

    pub fn lookup(&self, z: &str) -> Option<&StateSet> {
        self.map.get(z)
    }

    pub fn is_bound(&self, z: &str) -> bool {
        self.map.contains_key(z)
    }

    pub fn set(&mut self, z: impl Into<String>, s: StateSet) {
        debug_assert_eq!(s.len(), self.n);
        self.map.insert(z.into(), s);
    }

    /// `V[Z := S]`.
    pub fn with(&self, z: impl Into<String>, s: StateSet) -> Valuation {
        let mut v = self.clone();
        v.set(z, s);
        v
    }

    pub fn remove(&mut self, z: &str) {
        self.map.remove(z);
    }

    pub fn vars(&self) -> impl Iterator<Item = (&String, &StateSet)> {
        self.map.iter()
    }

    pub fn to_text(&self, model: &Model) -> String {
        Listing(self, model).to_string()
    }
}

struct Listing<'a>(&'a Valuation, &'a Model);

impl fmt::Display for Listing<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (z, s) in &self.0.map {
            let names: Vec<&str> = s.ones().map(|x| self.1.state_name(x)).collect();
            writeln!(f, "{z}: {}", names.join(" "))?;
        }
        Ok(())
    }
}
