use std::collections::BTreeMap;

use crate::model::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizon {
    /// `tick^D(s)` is the last defined iterate.
    Finite { max_delay: usize },
    /// The trajectory is `prefix` distinct states followed by a cycle of
    /// `period` distinct states.
    Periodic { prefix: usize, period: usize },
}

/// The unit-tick trajectory of one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayProfile {
    /// `tick^0(s), tick^1(s), ..` up to the first repetition or undefined tick.
    pub trajectory: Vec<usize>,
    pub horizon: Horizon,
}

impl DelayProfile {
    pub(crate) fn from_tick(tick: &[Option<usize>], s: usize) -> DelayProfile {
        let mut trajectory = vec![s];
        let mut pos = vec![usize::MAX; tick.len()];
        pos[s] = 0;
        let mut cur = s;
        loop {
            match tick[cur] {
                None => {
                    let max_delay = trajectory.len() - 1;
                    return DelayProfile {
                        trajectory,
                        horizon: Horizon::Finite { max_delay },
                    };
                }
                Some(next) if pos[next] != usize::MAX => {
                    let prefix = pos[next];
                    let period = trajectory.len() - prefix;
                    return DelayProfile {
                        trajectory,
                        horizon: Horizon::Periodic { prefix, period },
                    };
                }
                Some(next) => {
                    pos[next] = trajectory.len();
                    trajectory.push(next);
                    cur = next;
                }
            }
        }
    }

    pub fn max_delay(&self) -> Option<usize> {
        match self.horizon {
            Horizon::Finite { max_delay } => Some(max_delay),
            Horizon::Periodic { .. } => None,
        }
    }

    /// Trajectory period, `None` when the trajectory ends.
    pub fn period(&self) -> Option<usize> {
        match self.horizon {
            Horizon::Finite { .. } => None,
            Horizon::Periodic { period, .. } => Some(period),
        }
    }

    pub fn tsucc(&self, delta: usize) -> Option<usize> {
        match self.horizon {
            Horizon::Finite { max_delay } => (delta <= max_delay).then(|| self.trajectory[delta]),
            Horizon::Periodic { prefix, period } => Some(if delta < prefix {
                self.trajectory[delta]
            } else {
                self.trajectory[prefix + (delta - prefix) % period]
            }),
        }
    }

    pub fn allows(&self, delta: usize) -> bool {
        self.tsucc(delta).is_some()
    }

    /// `{tick^i(s) | i < δ}`; constant once δ reaches the trajectory length.
    pub fn reach_prefix(&self, delta: usize) -> impl Iterator<Item = usize> + '_ {
        self.trajectory.iter().copied().take(delta)
    }

    /// Possible delays not above `bound`, ascending.
    pub fn delays_upto(&self, bound: usize) -> impl Iterator<Item = usize> {
        let top = self.max_delay().map_or(bound, |d| d.min(bound));
        0..=top
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TtsViolation {
    #[error("time-reflexivity fails at {state}")]
    Reflexivity { state: String },
    #[error("time-determinism fails at {state} with delay {delay}: {targets:?}")]
    Determinism { state: String, delay: usize, targets: Vec<String> },
    #[error("time-additivity fails at ({state}, {d1}, {d2})")]
    Additivity { state: String, d1: usize, d2: usize },
    #[error("time-continuity fails at {state}: delay {delay} possible but {missing} is not")]
    Continuity { state: String, delay: usize, missing: usize },
    #[error("not a tts")]
    NotTimed,
}

/// Delay relation `s -δ-> t` for `δ ≤ bound`: the raw debug table when the
/// model carries one, the tick-induced relation otherwise. Raw tables imply
/// `s -0-> s` for states without explicit zero-delay rows.
pub fn delay_table(model: &Model, bound: usize) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut table: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    match model.raw_delays() {
        Some(rows) => {
            for &(s, d, t) in rows.iter().filter(|r| r.1 <= bound) {
                table.entry((s, d)).or_default().push(t);
            }
            for s in 0..model.len() {
                table.entry((s, 0)).or_insert_with(|| vec![s]);
            }
        }
        None => {
            for s in 0..model.len() {
                for d in model.delay_profile(s).delays_upto(bound) {
                    table.insert((s, d), vec![model.tsucc(s, d).unwrap()]);
                }
            }
        }
    }
    for v in table.values_mut() {
        v.sort_unstable();
        v.dedup();
    }
    table
}

/// Re-checks the four delay axioms for all delays up to 2|S|, reporting the
/// first violation found.
pub fn validate_tts(model: &Model) -> Result<(), TtsViolation> {
    if !model.is_timed() {
        return Err(TtsViolation::NotTimed);
    }
    let bound = model.time_bound();
    let table = delay_table(model, bound);
    let name = |s: usize| model.state_name(s).to_string();
    let targets = |s: usize, d: usize| table.get(&(s, d)).map(Vec::as_slice).unwrap_or(&[]);
    for s in 0..model.len() {
        if !targets(s, 0).contains(&s) {
            return Err(TtsViolation::Reflexivity { state: name(s) });
        }
    }
    for (&(s, d), ts) in &table {
        if ts.len() > 1 {
            return Err(TtsViolation::Determinism {
                state: name(s),
                delay: d,
                targets: ts.iter().map(|&t| name(t)).collect(),
            });
        }
    }
    for s in 0..model.len() {
        for d1 in 0..=bound {
            for d2 in 0..=bound - d1 {
                let mut via: Vec<usize> = targets(s, d1).iter().flat_map(|&x| targets(x, d2).iter().copied()).collect();
                via.sort_unstable();
                via.dedup();
                if via != targets(s, d1 + d2) {
                    return Err(TtsViolation::Additivity { state: name(s), d1, d2 });
                }
            }
        }
    }
    for s in 0..model.len() {
        for d in (1..=bound).rev() {
            if targets(s, d).is_empty() {
                continue;
            }
            if let Some(missing) = (0..d).find(|&e| targets(s, e).is_empty()) {
                return Err(TtsViolation::Continuity { state: name(s), delay: d, missing });
            }
            break;
        }
    }
    Ok(())
}
