use mucalc_formula::{check_well_formed, DefinitionList, Fix, Formula, Violation};
use mucalc_lattice::set;
use mucalc_models::{Model, StateSet, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("ill-formed formula: {0}")]
    IllFormed(Violation),
    #[error("timed operator evaluated on an untimed model")]
    TimedOnLts,
    #[error("valuation is over {valuation} states, model has {model}")]
    CarrierMismatch { valuation: usize, model: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FixpointMethod {
    /// Iteration from the empty set (μ) or the full set (ν).
    #[default]
    Kleene,
    /// Meet of pre-fixpoints or join of post-fixpoints over every subset.
    /// Exponential, for cross-checks on tiny models.
    Tarski,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct EvalConfig {
    /// Largest delay examined by timed quantifiers; `None` means 2|S|.
    pub time_bound: Option<usize>,
    pub fixpoints: FixpointMethod,
}

/// Denotation of `phi` in `model` under `v`.
pub fn eval(phi: &Formula, model: &Model, v: &Valuation) -> Result<StateSet, EvalError> {
    eval_with(phi, model, v, &EvalConfig::default())
}

pub fn eval_with(phi: &Formula, model: &Model, v: &Valuation, cfg: &EvalConfig) -> Result<StateSet, EvalError> {
    check_well_formed(phi).map_err(EvalError::IllFormed)?;
    if phi.is_timed() && !model.is_timed() {
        return Err(EvalError::TimedOnLts);
    }
    if v.carrier_size() != model.len() {
        return Err(EvalError::CarrierMismatch {
            valuation: v.carrier_size(),
            model: model.len(),
        });
    }
    let mut ev = Evaluator {
        model,
        bound: cfg.time_bound.unwrap_or_else(|| model.time_bound()),
        method: cfg.fixpoints,
        env: v.clone(),
    };
    Ok(ev.go(phi))
}

/// Free variables of `phi` the valuation does not mention; they evaluate to
/// the empty set.
pub fn unbound_free_vars(phi: &Formula, v: &Valuation) -> Vec<String> {
    phi.free_vars().into_iter().filter(|z| !v.is_bound(z)).collect()
}

struct Evaluator<'a> {
    model: &'a Model,
    bound: usize,
    method: FixpointMethod,
    env: Valuation,
}

impl Evaluator<'_> {
    fn go(&mut self, phi: &Formula) -> StateSet {
        let n = self.model.len();
        match phi {
            Formula::Var(z) => self.env.get(z),
            Formula::Not(a) => set::complement(&self.go(a)),
            Formula::And(a, b) => set::intersection(&self.go(a), &self.go(b)),
            Formula::Or(a, b) => set::union(&self.go(a), &self.go(b)),
            Formula::Box(k, a) => {
                let s = self.go(a);
                self.model.pred_box(k, &s)
            }
            Formula::Diamond(k, a) => {
                let s = self.go(a);
                self.model.pred_dia(k, &s)
            }
            Formula::Fix(sigma, z, body) => {
                let saved = self.env.lookup(z).cloned();
                let result = match self.method {
                    FixpointMethod::Kleene => {
                        let mut x = match sigma {
                            Fix::Mu => set::empty(n),
                            Fix::Nu => set::full(n),
                        };
                        loop {
                            self.env.set(z.clone(), x.clone());
                            let next = self.go(body);
                            if next == x {
                                break x;
                            }
                            x = next;
                        }
                    }
                    FixpointMethod::Tarski => {
                        let mut acc = match sigma {
                            Fix::Mu => set::full(n),
                            Fix::Nu => set::empty(n),
                        };
                        for x in set::all_subsets(n) {
                            self.env.set(z.clone(), x.clone());
                            let fx = self.go(body);
                            match sigma {
                                Fix::Mu if fx.is_subset(&x) => acc.intersect_with(&x),
                                Fix::Nu if x.is_subset(&fx) => acc.union_with(&x),
                                _ => {}
                            }
                        }
                        acc
                    }
                };
                match saved {
                    Some(s) => self.env.set(z.clone(), s),
                    None => self.env.remove(z),
                }
                result
            }
            Formula::Forall(release, hold) => {
                let r = self.go(release);
                let h = self.go(hold);
                set::from_elems(
                    n,
                    (0..n).filter(|&s| {
                        let p = self.model.delay_profile(s);
                        p.delays_upto(self.bound).all(|d| {
                            p.reach_prefix(d).any(|x| r.contains(x)) || h.contains(p.tsucc(d).unwrap())
                        })
                    }),
                )
            }
            Formula::Exists(hold, target) => {
                let h = self.go(hold);
                let t = self.go(target);
                set::from_elems(
                    n,
                    (0..n).filter(|&s| {
                        let p = self.model.delay_profile(s);
                        p.delays_upto(self.bound).any(|d| {
                            p.reach_prefix(d).all(|x| h.contains(x)) && t.contains(p.tsucc(d).unwrap())
                        })
                    }),
                )
            }
        }
    }
}

/// `V[Δ]`: entries are evaluated front to back, each under the valuation
/// extended by the entries before it.
pub fn extend_valuation(v: &Valuation, dl: &DefinitionList, model: &Model) -> Result<Valuation, EvalError> {
    let mut out = v.clone();
    for (u, body) in dl.entries() {
        let s = eval(body, model, &out)?;
        out.set(u.clone(), s);
    }
    Ok(out)
}

/// `S ⊆ ⟦Φ⟧ V[Δ]`.
pub fn sequent_valid(
    states: &StateSet,
    dl: &DefinitionList,
    phi: &Formula,
    model: &Model,
    v: &Valuation,
) -> Result<bool, EvalError> {
    let ext = extend_valuation(v, dl, model)?;
    Ok(states.is_subset(&eval(phi, model, &ext)?))
}
