//! Randomized verification that the four solution concepts coincide on the
//! clustering game, together with the identities behind that result.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Dataset, Point};
use crate::error::{Error, Result};
use crate::game::{payoff_table, ClusteringGame, Coalition};
use crate::solution::{
    gately, nucleolus, pair_sum_shapley, propensity_to_disrupt, shapley_exact, tau_value, GameTable, Imputation,
    DEGENERATE_VALUE_TOL,
};

/// `|λ - 1/2|` allowed in a passing trial.
pub const LAMBDA_TOL: f64 = 1e-12;
/// `|d_i - 1|` allowed for defined propensities at the Shapley imputation.
pub const PROPENSITY_TOL: f64 = 1e-9;
/// Slack for the identities checked over every coalition.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Largest game on which the exhaustive identities are checked.
pub const MAX_IDENTITY_PLAYERS: usize = 8;

pub const CONCEPTS: [&str; 5] = [
    "shapley_closed_form",
    "shapley_permutation",
    "nucleolus",
    "gately",
    "tau",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceConfig {
    pub trials: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl CoincidenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                reason: "must be at least 1".into(),
            });
        }
        if self.n_min < 3 || self.n_max > 8 || self.n_min > self.n_max {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("need 3 <= n-min <= n-max <= 8, got {}..={}", self.n_min, self.n_max),
            });
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: format!("must be non-negative, got {}", self.tolerance),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub grand_value: f64,
    /// Largest pairwise max-norm distance among the five payoff vectors.
    pub max_deviation: f64,
    pub lambda: f64,
    /// Largest `|d_i - 1|` over defined propensities.
    pub propensity_error: f64,
    pub undefined_propensities: usize,
    /// Largest `|e_S(φ) - e_{N\S}(φ)|`; `None` above [`MAX_IDENTITY_PLAYERS`].
    pub complement_asymmetry: Option<f64>,
    /// Largest `e_S(φ)` over all coalitions.
    pub max_shapley_excess: Option<f64>,
    /// Largest `|ν(S) - Σ_{T⊆S,|T|=2} ν(T)|`.
    pub pair_decomposition_error: Option<f64>,
    /// Largest `|φ_i - ½ Σ_{S∋i,|S|=2} ν(S)|`.
    pub pair_sum_error: f64,
    pub nucleolus_stages: usize,
    pub nucleolus_levels_decrease: bool,
    pub vectors: Vec<(String, Vec<f64>)>,
}

impl TrialMetrics {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance
            && (self.lambda - 0.5).abs() <= LAMBDA_TOL
            && self.propensity_error <= PROPENSITY_TOL
            && self.complement_asymmetry.is_none_or(|v| v <= IDENTITY_TOL)
            && self.max_shapley_excess.is_none_or(|v| v <= IDENTITY_TOL)
            && self.pair_decomposition_error.is_none_or(|v| v <= IDENTITY_TOL)
            && self.pair_sum_error <= IDENTITY_TOL
            && self.nucleolus_levels_decrease
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialOutcome {
    Checked(TrialMetrics),
    Degenerate { note: String },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub n: usize,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub tolerance: f64,
    pub trials: Vec<TrialReport>,
}

impl CoincidenceReport {
    pub fn checked(&self) -> impl Iterator<Item = &TrialMetrics> {
        self.trials.iter().filter_map(|t| match &t.outcome {
            TrialOutcome::Checked(m) => Some(m),
            _ => None,
        })
    }

    pub fn max_deviation(&self) -> f64 {
        self.checked().map(|m| m.max_deviation).fold(0.0, f64::max)
    }

    pub fn max_lambda_error(&self) -> f64 {
        self.checked().map(|m| (m.lambda - 0.5).abs()).fold(0.0, f64::max)
    }

    pub fn degenerate(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| matches!(t.outcome, TrialOutcome::Degenerate { .. }))
            .count()
    }

    pub fn failures(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| match &t.outcome {
                TrialOutcome::Checked(m) => !m.passes(self.tolerance),
                TrialOutcome::Failed { .. } => true,
                TrialOutcome::Degenerate { .. } => false,
            })
            .count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Random dataset of trial `trial`: its own ChaCha stream under `seed`,
/// `n` uniform in `n_min..=n_max`, points uniform in the unit square.
pub fn trial_dataset(seed: u64, trial: usize, n_min: usize, n_max: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let n = rng.random_range(n_min..=n_max);
    let points = (0..n)
        .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    Dataset::new(points).expect("non-empty finite points")
}

pub fn verify_coincidence(cfg: &CoincidenceConfig) -> Result<CoincidenceReport> {
    cfg.validate()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let ds = trial_dataset(cfg.seed, trial, cfg.n_min, cfg.n_max);
            TrialReport {
                trial,
                n: ds.len(),
                outcome: run_trial(&ds),
            }
        })
        .collect();
    Ok(CoincidenceReport {
        tolerance: cfg.tolerance,
        trials,
    })
}

pub fn run_trial(dataset: &Dataset) -> TrialOutcome {
    match check(dataset) {
        Ok(outcome) => outcome,
        Err(e) => TrialOutcome::Failed { error: e.to_string() },
    }
}

fn check(dataset: &Dataset) -> Result<TrialOutcome> {
    let game = match ClusteringGame::from_dataset(dataset) {
        Ok(g) => g,
        Err(Error::DegenerateDataset) => {
            return Ok(TrialOutcome::Degenerate {
                note: "all points coincide".into(),
            })
        }
        Err(e) => return Err(e),
    };
    let grand = game.grand_value();
    if grand <= DEGENERATE_VALUE_TOL {
        return Ok(TrialOutcome::Degenerate {
            note: format!("DegenerateGame: v(N) = {grand:e}, every pair is at maximal distance"),
        });
    }
    let n = game.n();

    let closed = game.shapley().to_imputation();
    let (permutation, _) = shapley_exact(&game)?;
    let nuc = nucleolus(&game)?;
    let gate = gately(&game)?;
    let (tau, parts) = tau_value(&game)?;

    let vectors: Vec<(&str, &Imputation)> = CONCEPTS
        .iter()
        .copied()
        .zip([&closed, &permutation, &nuc.allocation, &gate, &tau])
        .collect();
    let mut max_deviation = 0.0f64;
    for (i, (_, a)) in vectors.iter().enumerate() {
        for (_, b) in &vectors[i + 1..] {
            max_deviation = max_deviation.max(a.max_deviation(b));
        }
    }

    let props = propensity_to_disrupt(&game, &closed)?;
    let propensity_error = props.d.iter().flatten().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    let undefined_propensities = props.d.iter().filter(|d| d.is_none()).count();

    let pair_sum_error = pair_sum_shapley(&game)?
        .iter()
        .zip(closed.payoffs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let (complement_asymmetry, max_shapley_excess, pair_decomposition_error) = if n <= MAX_IDENTITY_PLAYERS {
        let ids = exhaustive_identities(&game, &closed)?;
        (Some(ids.0), Some(ids.1), Some(ids.2))
    } else {
        (None, None, None)
    };

    Ok(TrialOutcome::Checked(TrialMetrics {
        grand_value: grand,
        max_deviation,
        lambda: parts.lambda,
        propensity_error,
        undefined_propensities,
        complement_asymmetry,
        max_shapley_excess,
        pair_decomposition_error,
        pair_sum_error,
        nucleolus_stages: nuc.stages.len(),
        nucleolus_levels_decrease: nuc.stages.windows(2).all(|w| w[1].level < w[0].level),
        vectors: vectors
            .iter()
            .map(|(name, v)| (name.to_string(), v.payoffs().to_vec()))
            .collect(),
    }))
}

/// Worst-case identity errors over every coalition, in the order of the
/// matching [`TrialMetrics`] fields.
fn exhaustive_identities(game: &ClusteringGame, phi: &Imputation) -> Result<(f64, f64, f64)> {
    let n = game.n();
    let table = GameTable::from_clustering(game)?;
    let paid = payoff_table(phi.payoffs());
    let full = table.full_mask();
    let excess = |m: u64| table.value(m) - paid[m as usize];
    let mut asym = 0.0f64;
    let mut worst = f64::NEG_INFINITY;
    let mut decomposition = 0.0f64;
    for mask in 0..=full {
        asym = asym.max((excess(mask) - excess(full & !mask)).abs());
        if mask != 0 {
            worst = worst.max(excess(mask));
        }
        decomposition = decomposition.max(game.pair_decomposition_deviation(&Coalition::from_mask(n, mask))?);
    }
    Ok((asym, worst, decomposition))
}

pub fn format_report(report: &CoincidenceReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for t in &report.trials {
        match &t.outcome {
            TrialOutcome::Checked(m) => {
                let _ = writeln!(
                    out,
                    "trial {:>4} n={} {} max_dev={:.3e} lambda={:.15} propensity_err={:.3e} stages={}",
                    t.trial,
                    t.n,
                    if m.passes(report.tolerance) { "ok  " } else { "FAIL" },
                    m.max_deviation,
                    m.lambda,
                    m.propensity_error,
                    m.nucleolus_stages
                );
            }
            TrialOutcome::Degenerate { note } => {
                let _ = writeln!(out, "trial {:>4} n={} skipped: {note}", t.trial, t.n);
            }
            TrialOutcome::Failed { error } => {
                let _ = writeln!(out, "trial {:>4} n={} FAIL solver error: {error}", t.trial, t.n);
            }
        }
    }
    let _ = writeln!(
        out,
        "{}: {} trials, {} degenerate, {} failed, max deviation {:.3e} (tolerance {:.1e}), max |lambda - 0.5| {:.3e}",
        if report.passed() { "PASS" } else { "FAIL" },
        report.trials.len(),
        report.degenerate(),
        report.failures(),
        report.max_deviation(),
        report.tolerance,
        report.max_lambda_error()
    );
    out
}
