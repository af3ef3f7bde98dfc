//! Nucleolus by sequential linear programming.
//!
//! Stage `k` minimizes the largest excess `Z` over the coalitions that are
//! still free. The constraints keep the allocation an imputation and hold the
//! excess levels fixed by earlier stages. Every free coalition that is tight at the
//! optimum is then probed: if its payoff cannot be raised while `Z` stays at
//! the optimum, its excess is fixed at that level. Coalitions whose payoff is
//! already determined by the fixed ones drop out. The process ends once the
//! fixed coalitions together with `N` pin down a unique allocation.

use std::collections::HashSet;

use super::lp::{Bounds, LinearProgram, Objective, Relation};
use super::{GameTable, Imputation};
use crate::error::{Error, Result};
use crate::game::{ensure_enumerable, ClusteringGame, Coalition};

pub const MAX_NUCLEOLUS_PLAYERS: usize = 12;
/// A coalition counts as tight when its excess is within this of the optimum.
const TIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NucleolusStage {
    /// Optimal largest excess at this stage.
    pub level: f64,
    /// Coalitions whose excess was fixed at `level`.
    pub fixed: Vec<Coalition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NucleolusResult {
    pub allocation: Imputation,
    pub stages: Vec<NucleolusStage>,
    pub lp_solves: usize,
}

pub fn nucleolus(game: &ClusteringGame) -> Result<NucleolusResult> {
    ensure_enumerable("nucleolus", game.n(), 2, MAX_NUCLEOLUS_PLAYERS)?;
    nucleolus_of(&GameTable::from_clustering(game)?)
}

pub fn nucleolus_of(game: &GameTable) -> Result<NucleolusResult> {
    let n = game.n();
    ensure_enumerable("nucleolus", n, 2, MAX_NUCLEOLUS_PLAYERS)?;
    let full = game.full_mask();

    let mut active: Vec<u64> = (1..full).collect();
    let mut fixed: Vec<(u64, f64)> = Vec::new();
    let mut span = Span::new(n);
    span.insert(full);
    let mut stages = Vec::new();
    let mut lp_solves = 0usize;

    loop {
        let stage = StageProgram {
            game,
            active: &active,
            fixed: &fixed,
        };
        let sol = stage.build(None, None).solve()?;
        lp_solves += 1;
        let level = sol.x[n];
        let x = &sol.x[..n];

        if let Some(prev) = stages.last().map(|s: &NucleolusStage| s.level) {
            if level >= prev - TIGHT_TOL {
                return Err(Error::Nucleolus(format!(
                    "excess level did not decrease ({level} after {prev})"
                )));
            }
        }

        let tight: Vec<u64> = active
            .iter()
            .copied()
            .filter(|&s| excess(game, x, s) >= level - TIGHT_TOL)
            .collect();

        let mut newly = Vec::new();
        let mut loose: HashSet<u64> = HashSet::new();
        for &s in &tight {
            if loose.contains(&s) {
                continue;
            }
            let probe = stage.build(Some(level), Some(s)).solve()?;
            lp_solves += 1;
            let px = &probe.x[..n];
            if excess(game, px, s) >= level - TIGHT_TOL {
                newly.push(s);
            } else {
                loose.extend(
                    tight
                        .iter()
                        .copied()
                        .filter(|&t| excess(game, px, t) < level - TIGHT_TOL),
                );
            }
        }
        if newly.is_empty() {
            return Err(Error::Nucleolus(format!("no coalition is fixed at level {level}")));
        }

        for &s in &newly {
            fixed.push((s, level));
            span.insert(s);
        }
        active.retain(|&s| !newly.contains(&s) && !span.contains(s));
        stages.push(NucleolusStage {
            level,
            fixed: newly.iter().map(|&s| Coalition::from_mask(n, s)).collect(),
        });

        if span.rank() == n {
            return Ok(NucleolusResult {
                allocation: Imputation::new(x.to_vec()),
                stages,
                lp_solves,
            });
        }
        if active.is_empty() {
            return Err(Error::Nucleolus(
                "ran out of coalitions before the allocation was determined".into(),
            ));
        }
    }
}

fn excess(game: &GameTable, x: &[f64], mask: u64) -> f64 {
    let paid: f64 = (0..x.len()).filter(|i| mask & (1 << i) != 0).map(|i| x[i]).sum();
    game.value(mask) - paid
}

struct StageProgram<'a> {
    game: &'a GameTable,
    active: &'a [u64],
    fixed: &'a [(u64, f64)],
}

impl StageProgram<'_> {
    /// Variables are `x_0..x_{n-1}` followed by `Z`. With `level` set, `Z` is
    /// pinned there and the program maximizes the payoff of `target`.
    fn build(&self, level: Option<f64>, target: Option<u64>) -> LinearProgram {
        let n = self.game.n();
        let indicator = |mask: u64| -> Vec<f64> {
            (0..=n)
                .map(|i| if i < n && mask & (1 << i) != 0 { 1.0 } else { 0.0 })
                .collect()
        };
        let mut lp = match target {
            None => {
                let mut costs = vec![0.0; n + 1];
                costs[n] = 1.0;
                LinearProgram::new(Objective::Minimize, costs)
            }
            Some(mask) => LinearProgram::new(Objective::Maximize, indicator(mask)),
        };
        for i in 0..n {
            lp.set_bounds(i, Bounds::at_least(self.game.singleton(i)));
        }
        lp.set_bounds(n, level.map_or(Bounds::FREE, Bounds::fixed));

        lp.add_constraint(indicator(self.game.full_mask()), Relation::Eq, self.game.grand());
        for &(mask, lvl) in self.fixed {
            lp.add_constraint(indicator(mask), Relation::Eq, self.game.value(mask) - lvl);
        }
        for &mask in self.active {
            let mut row = indicator(mask);
            row[n] = 1.0;
            lp.add_constraint(row, Relation::Ge, self.game.value(mask));
        }
        lp
    }
}

/// Row space of coalition indicator vectors, kept in reduced echelon form.
struct Span {
    n: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

impl Span {
    fn new(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mask: u64) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n)
            .map(|i| if mask & (1 << i) != 0 { 1.0 } else { 0.0 })
            .collect();
        for (pivot, row) in &self.rows {
            let f = v[*pivot];
            if f != 0.0 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= f * b;
                }
            }
        }
        v
    }

    fn contains(&self, mask: u64) -> bool {
        self.reduce(mask).iter().all(|a| a.abs() <= 1e-9)
    }

    fn insert(&mut self, mask: u64) {
        let v = self.reduce(mask);
        let Some(pivot) = (0..self.n)
            .filter(|&i| v[i].abs() > 1e-9)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
        else {
            return;
        };
        let scale = v[pivot];
        let v: Vec<f64> = v.iter().map(|a| a / scale).collect();
        for (_, row) in &mut self.rows {
            let f = row[pivot];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a -= f * b;
                }
            }
        }
        self.rows.push((pivot, v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, Dataset, Shape};

    fn d3() -> ClusteringGame {
        ClusteringGame::from_dataset(&Dataset::from_xy(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()).unwrap()
    }

    /// Largest excess over proper coalitions, minimized over a grid on the
    /// imputation triangle of D3.
    fn d3_grid_min_max_excess() -> f64 {
        let table = GameTable::from_clustering(&d3()).unwrap();
        let steps = 400;
        let mut best = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=(steps - a) {
                let x = [
                    a as f64 / steps as f64,
                    b as f64 / steps as f64,
                    (steps - a - b) as f64 / steps as f64,
                ];
                let worst = (1..7u64)
                    .map(|m| excess(&table, &x, m))
                    .fold(f64::NEG_INFINITY, f64::max);
                best = best.min(worst);
            }
        }
        best
    }

    #[test]
    fn d3_first_stage_level() {
        assert!((d3_grid_min_max_excess() + 0.25).abs() < 1e-12);
        let table = GameTable::from_clustering(&d3()).unwrap();
        let active: Vec<u64> = (1..7).collect();
        let stage = StageProgram {
            game: &table,
            active: &active,
            fixed: &[],
        };
        let sol = stage.build(None, None).solve().unwrap();
        assert!((sol.objective + 0.25).abs() < 1e-12);
    }

    #[test]
    fn d3_nucleolus() {
        let res = nucleolus(&d3()).unwrap();
        let expected = Imputation::new(vec![0.25, 0.5, 0.25]);
        assert!(res.allocation.max_deviation(&expected) < 1e-12);
        assert!((res.stages[0].level + 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_game_nucleolus() {
        let g = ClusteringGame::from_dataset(&Dataset::from_xy(&[(0.0, 0.0), (1.0, 0.0)]).unwrap()).unwrap();
        let res = nucleolus(&g).unwrap();
        assert!(res.allocation.max_deviation(&Imputation::new(vec![0.0, 0.0])) < 1e-12);
    }

    #[test]
    fn player_count_bounds() {
        let one = ClusteringGame::new(crate::dataset::SimilarityMatrix::from_values(1, vec![1.0]).unwrap());
        assert!(matches!(nucleolus(&one), Err(Error::PlayerCount { .. })));
        let big = ClusteringGame::from_dataset(&generate(Shape::Uniform, 13, 0).unwrap()).unwrap();
        assert!(matches!(nucleolus(&big), Err(Error::PlayerCount { .. })));
    }

    /// Lexicographic minimum of the sorted excess vector over a grid on the
    /// imputation simplex of a three-player game with `v({i}) = 0`.
    fn grid_nucleolus(table: &GameTable, steps: usize) -> Vec<f64> {
        let total = table.grand();
        let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
        for a in 0..=steps {
            for b in 0..=(steps - a) {
                let x: Vec<f64> = [a, b, steps - a - b]
                    .iter()
                    .map(|&k| k as f64 / steps as f64 * total)
                    .collect();
                let mut e: Vec<f64> = (1..7u64).map(|m| excess(table, &x, m)).collect();
                e.sort_by(|p, q| q.total_cmp(p));
                let better = match &best {
                    None => true,
                    Some((be, _)) => e
                        .iter()
                        .zip(be)
                        .find(|(p, q)| (*p - *q).abs() > 1e-12)
                        .is_some_and(|(p, q)| p < q),
                };
                if better {
                    best = Some((e, x));
                }
            }
        }
        best.unwrap().1
    }

    #[test]
    fn three_player_games_match_grid_oracle() {
        // (v12, v13, v23, vN), all singletons zero
        let games = [
            (4.0, 3.0, 2.0, 6.0),
            (1.0, 2.0, 3.0, 6.0),
            (5.0, 5.0, 1.0, 6.0),
            (0.0, 0.0, 6.0, 6.0),
        ];
        for (v12, v13, v23, vn) in games {
            let table = GameTable::from_fn(3, |m| match m {
                0b011 => v12,
                0b101 => v13,
                0b110 => v23,
                0b111 => vn,
                _ => 0.0,
            })
            .unwrap();
            let res = nucleolus_of(&table).unwrap();
            let oracle = Imputation::new(grid_nucleolus(&table, 360));
            assert!(
                res.allocation.max_deviation(&oracle) < 1e-9,
                "{:?} vs {:?}",
                res.allocation,
                oracle
            );
            assert!(res.stages.windows(2).all(|w| w[1].level < w[0].level));
        }
    }

    #[test]
    fn single_stage_when_tight_set_is_rich() {
        // worked by hand: level -1 forces x = (3, 2, 1)
        let table = GameTable::from_fn(3, |m| match m {
            0b011 => 4.0,
            0b101 => 3.0,
            0b110 => 2.0,
            0b111 => 6.0,
            _ => 0.0,
        })
        .unwrap();
        let res = nucleolus_of(&table).unwrap();
        assert!(res.allocation.max_deviation(&Imputation::new(vec![3.0, 2.0, 1.0])) < 1e-12);
        assert_eq!(res.stages.len(), 1);
        assert!((res.stages[0].level + 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_game_matches_shapley_and_levels_decrease() {
        let g = ClusteringGame::from_dataset(&generate(Shape::Uniform, 7, 21).unwrap()).unwrap();
        let res = nucleolus(&g).unwrap();
        assert!(res.allocation.max_deviation(&g.shapley().to_imputation()) <= 1e-9);
        assert!(res.stages.windows(2).all(|w| w[1].level < w[0].level));
        assert!((res.allocation.total() - g.grand_value()).abs() <= 1e-9);
    }

    #[test]
    fn span_rank() {
        let mut s = Span::new(3);
        s.insert(0b111);
        s.insert(0b011);
        assert_eq!(s.rank(), 2);
        assert!(s.contains(0b100));
        assert!(!s.contains(0b001));
        s.insert(0b100);
        assert_eq!(s.rank(), 2);
        s.insert(0b001);
        assert_eq!(s.rank(), 3);
    }
}
