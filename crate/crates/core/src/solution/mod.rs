//! Classical TU-game solution concepts, computed from first principles.
//!
//! Each one is an independent route to the closed-form Shapley vector of the
//! clustering game. They work on an explicit table of coalition values, so they apply to any small
//! game and not just the clustering one.

pub mod lp;
mod nucleolus;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{ensure_enumerable, payoff_table, ClusteringGame, Coalition, ExcessReport, MAX_ENUMERATION_PLAYERS};

pub use nucleolus::{nucleolus, nucleolus_of, NucleolusResult, NucleolusStage, MAX_NUCLEOLUS_PLAYERS};

/// Permutation enumeration is `n!`; beyond this it is refused.
pub const MAX_PERMUTATION_PLAYERS: usize = 10;
/// Per-permutation marginal vectors are kept only up to this many players.
pub const MAX_RECORDED_MARGINALS_PLAYERS: usize = 8;
/// `ν(N)` at or below this counts as zero when deciding degeneracy.
pub const DEGENERATE_VALUE_TOL: f64 = 1e-12;
/// Denominators of propensity to disrupt at or below this are undefined.
pub const PROPENSITY_ZERO_TOL: f64 = 1e-12;
/// Slack for the rationality verdicts of [`core_membership`].
pub const CORE_TOL: f64 = 1e-9;

/// A payoff vector. Whether it is a genuine imputation of some game is a
/// separate question answered by [`Imputation::is_imputation_of`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Imputation {
    payoffs: Vec<f64>,
}

impl Imputation {
    pub fn new(payoffs: Vec<f64>) -> Self {
        Self { payoffs }
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn len(&self) -> usize {
        self.payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.payoffs.iter().sum()
    }

    /// `Σ x_i = ν(N)` within `1e-9` and `x_i >= ν({i}) - 1e-12`.
    pub fn is_imputation_of(&self, game: &GameTable) -> bool {
        self.len() == game.n()
            && (self.total() - game.grand()).abs() <= 1e-9
            && (0..game.n()).all(|i| self.payoffs[i] >= game.singleton(i) - 1e-12)
    }

    /// Largest absolute coordinate difference.
    pub fn max_deviation(&self, other: &Imputation) -> f64 {
        self.payoffs
            .iter()
            .zip(&other.payoffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for Imputation {
    fn from(payoffs: Vec<f64>) -> Self {
        Self::new(payoffs)
    }
}

/// A TU game given by the value of every coalition, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTable {
    n: usize,
    values: Vec<f64>,
}

impl GameTable {
    pub fn from_clustering(game: &ClusteringGame) -> Result<Self> {
        Ok(Self {
            n: game.n(),
            values: game.value_table()?,
        })
    }

    /// Tabulates `value(mask)` for every mask. `ν(∅)` is forced to 0.
    pub fn from_fn(n: usize, value: impl Fn(u64) -> f64) -> Result<Self> {
        ensure_enumerable("coalition enumeration", n, 1, MAX_ENUMERATION_PLAYERS)?;
        let mut values: Vec<f64> = (0..1u64 << n).map(value).collect();
        values[0] = 0.0;
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn value(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    pub fn grand(&self) -> f64 {
        self.value(self.full_mask())
    }

    pub fn singleton(&self, i: usize) -> f64 {
        self.value(1 << i)
    }

    /// `ν(N \ {i})`.
    pub fn without(&self, i: usize) -> f64 {
        self.value(self.full_mask() & !(1 << i))
    }
}

/// Marginal contributions seen while enumerating permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactShapleyTrace {
    pub permutations: u64,
    pub marginal_sums: Vec<f64>,
    /// One marginal vector per permutation, in lexicographic permutation
    /// order; recorded only for games of at most
    /// [`MAX_RECORDED_MARGINALS_PLAYERS`] players.
    pub marginals: Option<Vec<Vec<f64>>>,
}

impl ExactShapleyTrace {
    pub fn average(&self) -> Vec<f64> {
        self.marginal_sums
            .iter()
            .map(|s| s / self.permutations as f64)
            .collect()
    }
}

pub fn shapley_exact(game: &ClusteringGame) -> Result<(Imputation, ExactShapleyTrace)> {
    ensure_enumerable("permutation Shapley", game.n(), 1, MAX_PERMUTATION_PLAYERS)?;
    shapley_exact_of(&GameTable::from_clustering(game)?)
}

/// Shapley value as the average marginal contribution over all `n!` orders.
pub fn shapley_exact_of(game: &GameTable) -> Result<(Imputation, ExactShapleyTrace)> {
    let n = game.n();
    ensure_enumerable("permutation Shapley", n, 1, MAX_PERMUTATION_PLAYERS)?;
    let record = n <= MAX_RECORDED_MARGINALS_PLAYERS;
    let mut marginals = record.then(Vec::new);
    let mut sums = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    loop {
        let mut mask = 0u64;
        let mut vector = vec![0.0; n];
        for &player in &order {
            let next = mask | (1 << player);
            vector[player] = game.value(next) - game.value(mask);
            mask = next;
        }
        for (s, v) in sums.iter_mut().zip(&vector) {
            *s += v;
        }
        if let Some(m) = marginals.as_mut() {
            m.push(vector);
        }
        count += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    let trace = ExactShapleyTrace {
        permutations: count,
        marginal_sums: sums,
        marginals,
    };
    Ok((Imputation::new(trace.average()), trace))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&v| v > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// `½ Σ_{S ∋ i, |S| = 2} ν(S)` for every player, built from two-player
/// coalition values only.
pub fn pair_sum_shapley(game: &ClusteringGame) -> Result<Vec<f64>> {
    let n = game.n();
    let mut out = vec![0.0; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut total = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            total += game.value_of(&[i, j])?;
        }
        *slot = 0.5 * total;
    }
    Ok(out)
}

pub fn gately(game: &ClusteringGame) -> Result<Imputation> {
    gately_of(&GameTable::from_clustering(game)?)
}

/// Gately point: the imputation that makes every player's propensity to
/// disrupt equal. Payoffs above `ν({i})` are shared in proportion to
/// `ν(N) - ν(N \ {i}) - ν({i})`; for zero-normalized games this is
/// `Gv_i = (ν(N) - ν(N-i)) / Σ_j (ν(N) - ν(N-j)) · ν(N)`.
pub fn gately_of(game: &GameTable) -> Result<Imputation> {
    let n = game.n();
    let grand = game.grand();
    let singles: Vec<f64> = (0..n).map(|i| game.singleton(i)).collect();
    let surplus = grand - singles.iter().sum::<f64>();
    if grand.abs() <= DEGENERATE_VALUE_TOL {
        return Err(Error::DegenerateGame("v(N) = 0, the Gately point is undefined".into()));
    }
    let increments: Vec<f64> = (0..n).map(|i| grand - game.without(i) - singles[i]).collect();
    let total: f64 = increments.iter().sum();
    if total.abs() <= DEGENERATE_VALUE_TOL {
        return Err(Error::DegenerateGame(
            "marginal contributions to N sum to zero, the Gately point is undefined".into(),
        ));
    }
    Ok(Imputation::new(
        (0..n).map(|i| singles[i] + increments[i] / total * surplus).collect(),
    ))
}

/// Propensity to disrupt of each player at `x`; `None` where the
/// denominator `x_i - ν({i})` vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct PropensityVector {
    pub d: Vec<Option<f64>>,
}

pub fn propensity_to_disrupt(game: &ClusteringGame, x: &Imputation) -> Result<PropensityVector> {
    if x.len() != game.n() {
        return Err(Error::DimensionMismatch {
            expected: game.n(),
            found: x.len(),
        });
    }
    let n = game.n();
    let grand = Coalition::grand(n);
    let total = x.total();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let xi = x.payoffs()[i];
        let denom = xi - game.value_of(&[i])?;
        if denom.abs() <= PROPENSITY_ZERO_TOL {
            d.push(None);
            continue;
        }
        let mut rest = grand.clone();
        rest.remove(i);
        let numer = (total - xi) - game.coalition_value(&rest)?;
        d.push(Some(numer / denom));
    }
    Ok(PropensityVector { d })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauComponents {
    /// Utopia payoffs `M_i = ν(N) - ν(N \ {i})`.
    pub utopia: Vec<f64>,
    /// Minimal rights `m_i = ν({i})`.
    pub minimal: Vec<f64>,
    pub lambda: f64,
}

pub fn tau_value(game: &ClusteringGame) -> Result<(Imputation, TauComponents)> {
    tau_value_of(&GameTable::from_clustering(game)?)
}

/// τ-value `λ M + (1 - λ) m`, with `λ` the unique efficient weight.
pub fn tau_value_of(game: &GameTable) -> Result<(Imputation, TauComponents)> {
    let n = game.n();
    let grand = game.grand();
    let utopia: Vec<f64> = (0..n).map(|i| grand - game.without(i)).collect();
    let minimal: Vec<f64> = (0..n).map(|i| game.singleton(i)).collect();
    let sum_utopia: f64 = utopia.iter().sum();
    let sum_minimal: f64 = minimal.iter().sum();
    let spread = sum_utopia - sum_minimal;
    if sum_utopia.abs() <= DEGENERATE_VALUE_TOL || spread.abs() <= DEGENERATE_VALUE_TOL {
        return Err(Error::DegenerateGame(
            "utopia and minimal-rights vectors coincide, the tau-value is undefined".into(),
        ));
    }
    let lambda = (grand - sum_minimal) / spread;
    let payoffs = utopia
        .iter()
        .zip(&minimal)
        .map(|(big, small)| lambda * big + (1.0 - lambda) * small)
        .collect();
    Ok((
        Imputation::new(payoffs),
        TauComponents {
            utopia,
            minimal,
            lambda,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreVerdict {
    pub in_core: bool,
    pub individually_rational: bool,
    pub efficient: bool,
    /// Largest excess over all non-empty coalitions.
    pub max_excess: f64,
    /// Coalition with the largest positive excess, if any exceeds [`CORE_TOL`].
    pub worst: Option<ExcessReport>,
}

pub fn core_membership(game: &ClusteringGame, x: &Imputation) -> Result<CoreVerdict> {
    ensure_enumerable("core membership", game.n(), 1, MAX_ENUMERATION_PLAYERS)?;
    core_membership_of(&GameTable::from_clustering(game)?, x)
}

pub fn core_membership_of(game: &GameTable, x: &Imputation) -> Result<CoreVerdict> {
    let n = game.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let paid = payoff_table(x.payoffs());
    let mut max_excess = f64::NEG_INFINITY;
    let mut arg = 0u64;
    for mask in 1..=game.full_mask() {
        let e = game.value(mask) - paid[mask as usize];
        if e > max_excess {
            max_excess = e;
            arg = mask;
        }
    }
    let individually_rational = (0..n).all(|i| x.payoffs()[i] >= game.singleton(i) - CORE_TOL);
    let efficient = (x.total() - game.grand()).abs() <= CORE_TOL;
    let worst = (max_excess > CORE_TOL).then(|| ExcessReport {
        coalition: Coalition::from_mask(n, arg),
        excess: max_excess,
    });
    Ok(CoreVerdict {
        in_core: individually_rational && efficient && worst.is_none(),
        individually_rational,
        efficient,
        max_excess,
        worst,
    })
}
