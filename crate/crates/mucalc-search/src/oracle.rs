use std::collections::BTreeMap;

use mucalc_lattice::set;
use mucalc_models::{Model, Valuation};
use mucalc_semantics::{eval, extend_valuation};
use mucalc_tableau::{check_success, validate_tableau, ForallWitness, Mode, RuleApp, Sequent, Tableau};

use crate::evalgame::{EvalGame, Kind};
use crate::{fresh_constant, unfoldings, Refutation, SearchError, SearchOutcome, SearchResult, SearchStats};

struct Builder<'a> {
    model: &'a Model,
    v: &'a Valuation,
    game: &'a EvalGame,
    /// Thin before a σZ root as well.
    thin_root: bool,
}

impl Builder<'_> {
    fn expand(&self, t: &mut Tableau, n: usize, app: RuleApp) -> Result<Vec<usize>, SearchError> {
        t.expand(n, app, self.model)
            .map_err(|e| SearchError::Internal(format!("oracle-guided rule failed: {e}")))
    }

    fn grow(&self, t: &mut Tableau, n: usize, p: usize) -> Result<(), SearchError> {
        let seq = t.seq(n).clone();
        let pos = &self.game.positions[p];
        let kids = match &pos.kind {
            Kind::Free { .. } | Kind::Bound(_) => return Ok(()),
            Kind::And => self.expand(t, n, RuleApp::And)?,
            Kind::Box(_) => self.expand(t, n, RuleApp::Box)?,
            Kind::Or => {
                let left = set::from_elems(self.model.len(), seq.states.ones().filter(|&s| self.game.goes_left(p, s)));
                let right = set::difference(&seq.states, &left);
                self.expand(t, n, RuleApp::Or(left, right))?
            }
            Kind::Dia(_) => {
                let w: BTreeMap<usize, usize> = seq.states.ones().map(|s| (s, self.game.successor(p, s))).collect();
                self.expand(t, n, RuleApp::Dia(w))?
            }
            Kind::Exists => {
                let w: BTreeMap<usize, usize> = seq.states.ones().map(|s| (s, self.game.delay(p, s))).collect();
                self.expand(t, n, RuleApp::Exists(w))?
            }
            Kind::Forall => {
                let g = ForallWitness::tabulate(self.model, &seq.states, |s, d| self.game.answer(p, s, d));
                self.expand(t, n, RuleApp::Forall(g))?
            }
            Kind::Fix(_) => {
                let mut at = n;
                if t.parent(n).is_some() || self.thin_root {
                    let ext = extend_valuation(self.v, &seq.dl, self.model)?;
                    let target = eval(&seq.formula, self.model, &ext)?;
                    at = self.expand(t, at, RuleApp::Thin(target))?[0];
                }
                let u = fresh_constant(&seq.dl, &seq.formula);
                at = self.expand(t, at, RuleApp::Sigma(u))?[0];
                at = self.expand(t, at, RuleApp::Un)?[0];
                return self.grow(t, at, pos.kids[0]);
            }
        };
        for (&c, &k) in kids.iter().zip(&pos.kids) {
            self.grow(t, c, k)?;
        }
        Ok(())
    }
}

pub(crate) fn prove(model: &Model, v: &Valuation, root: Sequent) -> Result<SearchOutcome, SearchError> {
    let den = eval(&root.formula, model, v)?;
    let mode = Mode::Standard;
    if let Some(state) = root.states.ones().find(|&s| !den.contains(s)) {
        return Ok(SearchOutcome {
            result: SearchResult::Refuted(Refutation::OracleInvalid { state }),
            stats: SearchStats::default(),
            mode,
        });
    }
    let game = EvalGame::build(&root.formula, model, v);
    if let Some(s) = (0..model.len()).find(|&s| game.wins(0, s) != den.contains(s)) {
        return Err(SearchError::Internal(format!("evaluation game and oracle disagree at state {s}")));
    }
    let mut attempts = 0;
    for thin_root in [false, true] {
        let b = Builder {
            model,
            v,
            game: &game,
            thin_root,
        };
        let mut t = Tableau::new(root.clone());
        b.grow(&mut t, 0, 0)?;
        attempts += t.nodes().iter().filter(|n| n.rule.is_some()).count();
        // Without a root Thin, constant leaves may leave the root's states.
        if validate_tableau(&t, model, mode).is_err() && !thin_root && root.formula.is_fixpoint() {
            continue;
        }
        let verdict = check_success(&t, model, v, mode);
        if !verdict.success {
            return Err(SearchError::Internal(format!(
                "oracle-guided tableau rejected: {:?} {:?}",
                verdict.errors,
                verdict.failures().collect::<Vec<_>>()
            )));
        }
        let stats = SearchStats {
            expanded: attempts,
            unfoldings: unfoldings(&t),
        };
        return Ok(SearchOutcome {
            result: SearchResult::Proved(t),
            stats,
            mode,
        });
    }
    unreachable!("the second attempt always returns")
}
