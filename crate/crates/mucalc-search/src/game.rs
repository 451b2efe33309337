//! Max-parity games solved by Zielonka's recursive algorithm, with
//! positional strategies for both players.

use fixedbitset::FixedBitSet;

#[derive(Clone, Debug, Default)]
pub struct Game {
    /// 0 or 1 per vertex.
    pub owner: Vec<u8>,
    pub priority: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
}

impl Game {
    pub fn add_vertex(&mut self, owner: u8, priority: usize) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.edges.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<u8>,
    /// Successor chosen at every vertex whose owner wins it.
    pub strategy: Vec<Option<usize>>,
}

/// Solves a game in which every vertex has at least one successor.
pub fn solve(g: &Game) -> Solution {
    assert!(g.edges.iter().all(|e| !e.is_empty()), "dead end in parity game");
    let mut all = FixedBitSet::with_capacity(g.len());
    all.insert_range(..);
    let mut strategy = vec![None; g.len()];
    let won = zielonka(g, &all, &mut strategy);
    let winner = (0..g.len()).map(|v| if won[0].contains(v) { 0 } else { 1 }).collect();
    Solution { winner, strategy }
}

/// Vertices of `sub` from which `player` can force a visit to `target`,
/// recording the forcing moves.
fn attractor(g: &Game, sub: &FixedBitSet, target: &FixedBitSet, player: u8, strategy: &mut [Option<usize>]) -> FixedBitSet {
    let mut attr = target.clone();
    loop {
        let mut grew = false;
        for v in sub.ones() {
            if attr.contains(v) {
                continue;
            }
            let mut inside = g.edges[v].iter().copied().filter(|&w| sub.contains(w));
            if g.owner[v] == player {
                if let Some(w) = inside.find(|&w| attr.contains(w)) {
                    strategy[v] = Some(w);
                    attr.insert(v);
                    grew = true;
                }
            } else if inside.all(|w| attr.contains(w)) {
                attr.insert(v);
                grew = true;
            }
        }
        if !grew {
            return attr;
        }
    }
}

fn zielonka(g: &Game, sub: &FixedBitSet, strategy: &mut [Option<usize>]) -> [FixedBitSet; 2] {
    let n = g.len();
    let mut won = [FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n)];
    let Some(p) = sub.ones().map(|v| g.priority[v]).max() else {
        return won;
    };
    let i = (p % 2) as u8;
    let mut top = FixedBitSet::with_capacity(n);
    for v in sub.ones().filter(|&v| g.priority[v] == p) {
        top.insert(v);
        if g.owner[v] == i {
            strategy[v] = g.edges[v].iter().copied().find(|&w| sub.contains(w));
        }
    }
    let a = attractor(g, sub, &top, i, strategy);
    let mut rest = sub.clone();
    rest.difference_with(&a);
    let inner = zielonka(g, &rest, strategy);
    let o = 1 - i as usize;
    if inner[o].is_clear() {
        won[i as usize] = sub.clone();
        return won;
    }
    let b = attractor(g, sub, &inner[o], 1 - i, strategy);
    let mut rest = sub.clone();
    rest.difference_with(&b);
    let outer = zielonka(g, &rest, strategy);
    won[i as usize] = outer[i as usize].clone();
    won[o] = outer[o].clone();
    won[o].union_with(&b);
    won
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_self_loop_loses_for_player_zero() {
        let mut g = Game::default();
        let a = g.add_vertex(0, 1);
        let b = g.add_vertex(0, 2);
        g.edges[a] = vec![a, b];
        g.edges[b] = vec![b];
        let s = solve(&g);
        assert_eq!(s.winner, vec![0, 0]);
        assert_eq!(s.strategy[a], Some(b));
    }

    #[test]
    fn opponent_forces_odd_cycle() {
        let mut g = Game::default();
        let a = g.add_vertex(1, 0);
        let good = g.add_vertex(0, 2);
        let bad = g.add_vertex(0, 3);
        g.edges[a] = vec![good, bad];
        g.edges[good] = vec![good];
        g.edges[bad] = vec![bad];
        let s = solve(&g);
        assert_eq!(s.winner, vec![1, 0, 1]);
        assert_eq!(s.strategy[a], Some(bad));
    }
}
