//! The evaluation game of a formula on a model. Vertices pair a state with a
//! syntax position of the formula; player 0 proves, player 1 refutes. A
//! winning positional strategy for player 0 supplies every choice of a
//! proof whose μ-loops cannot cycle.

use std::collections::HashMap;

use mucalc_formula::{Fix, Formula, Labels};
use mucalc_models::{Model, Valuation};

use crate::game::{solve, Game, Solution};

#[derive(Clone, Debug)]
pub enum Kind {
    Free { var: String, negated: bool },
    Bound(usize),
    And,
    Or,
    Box(Labels),
    Dia(Labels),
    Fix(Fix),
    Forall,
    Exists,
}

/// Syntax positions in preorder; `kids` follow the formula's child order.
#[derive(Clone, Debug)]
pub struct Position {
    pub kind: Kind,
    pub kids: Vec<usize>,
}

pub fn positions(phi: &Formula) -> Vec<Position> {
    fn go(f: &Formula, env: &mut Vec<(String, usize)>, out: &mut Vec<Position>) -> usize {
        let me = out.len();
        out.push(Position { kind: Kind::And, kids: Vec::new() });
        let kind = match f {
            Formula::Var(z) => match env.iter().rev().find(|(w, _)| w == z) {
                Some(&(_, b)) => Kind::Bound(b),
                None => Kind::Free { var: z.clone(), negated: false },
            },
            Formula::Not(a) => match &**a {
                Formula::Var(z) => Kind::Free { var: z.clone(), negated: true },
                _ => panic!("formula not in positive normal form"),
            },
            Formula::And(..) => Kind::And,
            Formula::Or(..) => Kind::Or,
            Formula::Box(k, _) => Kind::Box(k.clone()),
            Formula::Diamond(k, _) => Kind::Dia(k.clone()),
            Formula::Fix(fix, ..) => Kind::Fix(*fix),
            Formula::Forall(..) => Kind::Forall,
            Formula::Exists(..) => Kind::Exists,
        };
        let mut kids = Vec::new();
        if let Formula::Fix(_, z, body) = f {
            env.push((z.clone(), me));
            kids.push(go(body, env, out));
            env.pop();
        } else if !matches!(f, Formula::Not(_)) {
            for c in f.children() {
                kids.push(go(c, env, out));
            }
        }
        out[me] = Position { kind, kids };
        me
    }
    let mut out = Vec::new();
    go(phi, &mut Vec::new(), &mut out);
    out
}

pub struct EvalGame {
    pub positions: Vec<Position>,
    states: usize,
    solution: Solution,
    /// Vertex of the choice "delay d" below `(p, s)`.
    delay_vertex: HashMap<(usize, usize, usize), usize>,
    /// Delay behind an edge out of a timed choice vertex.
    edge_delay: HashMap<(usize, usize), usize>,
}

impl EvalGame {
    pub fn build(phi: &Formula, model: &Model, v: &Valuation) -> EvalGame {
        let positions = positions(phi);
        let n = model.len();
        let mut g = Game::default();
        let binders = positions.iter().filter(|p| matches!(p.kind, Kind::Fix(_))).count();
        let mut rank = 0;
        for p in &positions {
            let (owner, priority) = match p.kind {
                Kind::And | Kind::Box(_) | Kind::Forall => (1, 0),
                Kind::Fix(fix) => {
                    // Outer binders dominate inner ones.
                    rank += 1;
                    (0, 2 * (binders + 1 - rank) + usize::from(fix == Fix::Mu))
                }
                _ => (0, 0),
            };
            for _ in 0..n {
                g.add_vertex(owner, priority);
            }
        }
        let win = g.add_vertex(0, 0);
        let lose = g.add_vertex(0, 1);
        g.edges[win].push(win);
        g.edges[lose].push(lose);
        let at = |p: usize, s: usize| p * n + s;
        let bound = model.time_bound();
        let mut delay_vertex = HashMap::new();
        let mut edge_delay = HashMap::new();
        for (p, pos) in positions.iter().enumerate() {
            for s in 0..n {
                let here = at(p, s);
                let edges: Vec<usize> = match &pos.kind {
                    Kind::Free { var, negated } => vec![if v.get(var).contains(s) != *negated { win } else { lose }],
                    Kind::Bound(b) => vec![at(*b, s)],
                    Kind::Fix(_) => vec![at(pos.kids[0], s)],
                    Kind::And | Kind::Or => pos.kids.iter().map(|&k| at(k, s)).collect(),
                    Kind::Box(k) | Kind::Dia(k) => {
                        let succ = model.successors(s, k);
                        if succ.is_empty() {
                            vec![if matches!(pos.kind, Kind::Box(_)) { win } else { lose }]
                        } else {
                            succ.into_iter().map(|x| at(pos.kids[0], x)).collect()
                        }
                    }
                    Kind::Exists | Kind::Forall => {
                        let exists = matches!(pos.kind, Kind::Exists);
                        let (first, second) = (pos.kids[0], pos.kids[1]);
                        let prof = model.delay_profile(s);
                        let mut out = Vec::new();
                        for d in prof.delays_upto(bound) {
                            let c = g.add_vertex(if exists { 1 } else { 0 }, 0);
                            delay_vertex.insert((p, s, d), c);
                            edge_delay.insert((here, c), d);
                            out.push(c);
                            let mut targets: Vec<(usize, usize)> = Vec::new();
                            if exists {
                                targets.extend(prof.reach_prefix(d).map(|x| (at(first, x), d)));
                                targets.push((at(second, prof.tsucc(d).expect("allowed delay")), d));
                            } else {
                                for r in 0..d {
                                    targets.push((at(first, prof.tsucc(r).expect("allowed delay")), r));
                                }
                                targets.push((at(second, prof.tsucc(d).expect("allowed delay")), d));
                            }
                            for (w, r) in targets {
                                if !g.edges[c].contains(&w) {
                                    g.edges[c].push(w);
                                    edge_delay.insert((c, w), r);
                                }
                            }
                        }
                        out
                    }
                };
                g.edges[here] = edges;
            }
        }
        let solution = solve(&g);
        EvalGame {
            positions,
            states: n,
            solution,
            delay_vertex,
            edge_delay,
        }
    }

    fn at(&self, p: usize, s: usize) -> usize {
        p * self.states + s
    }

    pub fn wins(&self, p: usize, s: usize) -> bool {
        self.solution.winner[self.at(p, s)] == 0
    }

    fn choice(&self, vertex: usize) -> usize {
        self.solution.strategy[vertex].expect("strategy defined on the winning region")
    }

    /// At an or position: whether `s` takes the left disjunct.
    pub fn goes_left(&self, p: usize, s: usize) -> bool {
        self.choice(self.at(p, s)) == self.at(self.positions[p].kids[0], s)
    }

    /// At a diamond position: the chosen successor of `s`.
    pub fn successor(&self, p: usize, s: usize) -> usize {
        self.choice(self.at(p, s)) - self.positions[p].kids[0] * self.states
    }

    /// At an exists position: the chosen delay.
    pub fn delay(&self, p: usize, s: usize) -> usize {
        let here = self.at(p, s);
        self.edge_delay[&(here, self.choice(here))]
    }

    /// At a forall position: the answer to delay `d`.
    pub fn answer(&self, p: usize, s: usize, d: usize) -> usize {
        let c = self.delay_vertex[&(p, s, d)];
        self.edge_delay[&(c, self.choice(c))]
    }
}
