//! Independent checks of the nucleolus and the LP solver behind it.

use drac::dataset::Dataset;
use drac::game::ClusteringGame;
use drac::solution::lp::{LinearProgram, LpError, Objective, Relation};
use drac::solution::{gately_of, nucleolus, nucleolus_of, propensity_to_disrupt, GameTable};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Excesses of every proper nonempty coalition, largest first.
fn sorted_excesses(table: &GameTable, x: &[f64]) -> Vec<f64> {
    let full = table.full_mask();
    let mut e: Vec<f64> = (1..full)
        .map(|m| {
            let paid: f64 = (0..table.n()).filter(|i| m >> i & 1 == 1).map(|i| x[i]).sum();
            table.value(m) - paid
        })
        .collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

/// `a` is lexicographically no larger than `b`, up to `tol` per entry.
fn lex_not_greater(a: &[f64], b: &[f64], tol: f64) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < &(y - tol) {
            return true;
        }
        if x > &(y + tol) {
            return false;
        }
    }
    true
}

fn random_efficient_perturbation(rng: &mut ChaCha8Rng, x: &[f64], scale: f64) -> Vec<f64> {
    let mut d: Vec<f64> = x.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    d.iter_mut().for_each(|v| *v -= mean);
    x.iter().zip(&d).map(|(a, b)| a + scale * b).collect()
}

fn check_against_perturbations(table: &GameTable, x: &[f64], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ours = sorted_excesses(table, x);
    let mut tried = 0;
    while tried < 1000 {
        let scale = [1e-1, 1e-2, 1e-3][tried % 3] * table.grand().abs().max(1.0);
        let y = random_efficient_perturbation(&mut rng, x, scale);
        if (0..table.n()).any(|i| y[i] < table.singleton(i)) {
            continue;
        }
        tried += 1;
        let theirs = sorted_excesses(table, &y);
        assert!(lex_not_greater(&ours, &theirs, 1e-9), "perturbation {y:?} beats {x:?}");
    }
}

#[test]
fn nucleolus_beats_random_imputations_on_clustering_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..6 {
        let n = 3 + seed as usize % 4;
        let xy: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        let g = ClusteringGame::from_dataset(&Dataset::from_xy(&xy).unwrap()).unwrap();
        let nuc = nucleolus(&g).unwrap();
        let table = GameTable::from_clustering(&g).unwrap();
        check_against_perturbations(&table, nuc.allocation.payoffs(), seed);
    }
}

#[test]
fn nucleolus_beats_random_imputations_on_general_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..6 {
        let n = 3 + seed as usize % 3;
        let raw: Vec<f64> = (0..1u64 << n).map(|_| rng.random_range(0.0..4.0)).collect();
        let table = GameTable::from_fn(n, |m| match m.count_ones() {
            0 | 1 => 0.0,
            _ if m == (1 << n) - 1 => 10.0,
            _ => raw[m as usize],
        })
        .unwrap();
        let nuc = nucleolus_of(&table).unwrap();
        assert!((nuc.allocation.total() - 10.0).abs() <= 1e-9);
        check_against_perturbations(&table, nuc.allocation.payoffs(), 100 + seed);
    }
}

#[test]
fn gately_point_equalizes_propensity_on_clustering_games() {
    let ds = Dataset::from_xy(&[(0.0, 0.0), (0.3, 0.1), (1.0, 0.4), (0.2, 0.9), (0.6, 0.6)]).unwrap();
    let g = ClusteringGame::from_dataset(&ds).unwrap();
    let table = GameTable::from_clustering(&g).unwrap();
    let x = gately_of(&table).unwrap();
    let d = propensity_to_disrupt(&g, &x).unwrap().d;
    let first = d[0].unwrap();
    for v in d {
        assert!((v.unwrap() - first).abs() <= 1e-9);
    }
    assert!(x.max_deviation(&g.shapley().to_imputation()) <= 1e-12);
}

/// Best objective over all vertices of `{x >= 0, y >= 0, A[x y] <= b}`.
fn vertex_oracle(c: [f64; 2], rows: &[([f64; 2], f64)]) -> f64 {
    let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
    lines.push(([1.0, 0.0], 0.0));
    lines.push(([0.0, 1.0], 0.0));
    let feasible =
        |p: [f64; 2]| p[0] >= -1e-9 && p[1] >= -1e-9 && rows.iter().all(|(a, b)| a[0] * p[0] + a[1] * p[1] <= b + 1e-9);
    let mut best = f64::NEG_INFINITY;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ((a, e), (b, f)) = (lines[i], lines[j]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let p = [(e * b[1] - a[1] * f) / det, (a[0] * f - e * b[0]) / det];
            if feasible(p) {
                best = best.max(c[0] * p[0] + c[1] * p[1]);
            }
        }
    }
    best
}

fn packing_lp(c: &[f64], rows: &[(Vec<f64>, f64)]) -> LinearProgram {
    let mut lp = LinearProgram::new(Objective::Maximize, c.to_vec());
    for (a, b) in rows {
        lp.add_constraint(a.clone(), Relation::Le, *b);
    }
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_variable_lp_matches_vertex_enumeration(
        c in (0.1..5.0f64, 0.1..5.0f64),
        rows in prop::collection::vec(((0.1..5.0f64, 0.1..5.0f64), 1.0..10.0f64), 1..6),
    ) {
        let rows2: Vec<([f64; 2], f64)> = rows.iter().map(|&((a, b), r)| ([a, b], r)).collect();
        let expected = vertex_oracle([c.0, c.1], &rows2);
        let rows_v: Vec<(Vec<f64>, f64)> = rows2.iter().map(|(a, b)| (a.to_vec(), *b)).collect();
        let sol = packing_lp(&[c.0, c.1], &rows_v).solve().unwrap();
        prop_assert!((sol.objective - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn lp_optimum_ignores_row_order(
        nvars in 2usize..6,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = (0..nvars).map(|_| rng.random_range(0.1..3.0)).collect();
        let rows: Vec<(Vec<f64>, f64)> = (0..nvars + 3)
            .map(|_| ((0..nvars).map(|_| rng.random_range(0.1..2.0)).collect(), rng.random_range(1.0..5.0)))
            .collect();
        let a = packing_lp(&c, &rows).solve().unwrap();
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng);
        let b = packing_lp(&c, &shuffled).solve().unwrap();
        prop_assert!((a.objective - b.objective).abs() <= 1e-9 * a.objective.max(1.0));
        for (a_row, rhs) in &rows {
            let lhs: f64 = a_row.iter().zip(&b.x).map(|(p, q)| p * q).sum();
            prop_assert!(lhs <= rhs + 1e-9);
        }
    }
}

#[test]
fn infeasible_system_is_reported() {
    let mut lp = LinearProgram::new(Objective::Minimize, vec![1.0, 1.0]);
    lp.add_constraint(vec![1.0, 1.0], Relation::Ge, 3.0);
    lp.add_constraint(vec![1.0, 1.0], Relation::Le, 2.0);
    assert!(matches!(lp.solve(), Err(LpError::Infeasible)));
}
