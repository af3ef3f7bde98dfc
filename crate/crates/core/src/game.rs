//! The transferable-utility clustering game.
//!
//! Players are the points of a dataset and the worth of a coalition is the sum
//! of similarities over its unordered pairs. For this game the Shapley value
//! has a closed form, half of each point's total similarity to the others, so
//! it can be computed in `O(n^2)`.

use std::fmt;

use crate::dataset::{Dataset, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::solution::Imputation;

/// Largest player count for which coalitions are enumerated exhaustively.
pub const MAX_ENUMERATION_PLAYERS: usize = 20;

/// A subset of the players `0..n`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    n: usize,
    words: Vec<u64>,
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn grand(n: usize) -> Self {
        let mut c = Self::empty(n);
        for i in 0..n {
            c.insert_unchecked(i);
        }
        c
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut c = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            c.insert_unchecked(i);
        }
        Ok(c)
    }

    /// Coalition whose members are the set bits of `mask`. Bits at or above
    /// `n` are ignored.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut c = Self::empty(n);
        if n > 0 {
            let keep = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            c.words[0] = mask & keep;
        }
        c
    }

    /// The bitmask of a coalition over at most 64 players.
    pub fn mask(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    fn insert_unchecked(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn insert(&mut self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        self.insert_unchecked(i);
        Ok(())
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.n {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> Self {
        let mut c = Self::grand(self.n);
        for (w, own) in c.words.iter_mut().zip(&self.words) {
            *w &= !own;
        }
        c
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Shapley value of every player plus the global maximum `g_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyVector {
    pub phi: Vec<f64>,
    pub g_max: f64,
}

impl ShapleyVector {
    pub fn to_imputation(&self) -> Imputation {
        Imputation::new(self.phi.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcessReport {
    pub coalition: Coalition,
    pub excess: f64,
}

#[derive(Debug, Clone)]
pub struct ClusteringGame {
    similarity: SimilarityMatrix,
}

impl ClusteringGame {
    pub fn new(similarity: SimilarityMatrix) -> Self {
        Self { similarity }
    }

    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        Ok(Self::new(dataset.similarity()?))
    }

    pub fn n(&self) -> usize {
        self.similarity.n()
    }

    pub fn similarity(&self) -> &SimilarityMatrix {
        &self.similarity
    }

    fn check(&self, s: &Coalition) -> Result<()> {
        if s.universe() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: s.universe(),
            });
        }
        Ok(())
    }

    /// `ν(S)`: sum of similarities over unordered pairs of `S`.
    pub fn coalition_value(&self, s: &Coalition) -> Result<f64> {
        self.check(s)?;
        let members: Vec<usize> = s.iter().collect();
        let mut total = 0.0;
        for (k, &i) in members.iter().enumerate() {
            let row = self.similarity.row(i);
            for &j in &members[k + 1..] {
                total += row[j];
            }
        }
        Ok(total)
    }

    pub fn value_of(&self, members: &[usize]) -> Result<f64> {
        self.coalition_value(&Coalition::from_indices(self.n(), members.iter().copied())?)
    }

    pub fn grand_value(&self) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for i in 0..n {
            total += self.similarity.row(i)[i + 1..].iter().sum::<f64>();
        }
        total
    }

    /// `ν(N \ {i})`.
    pub fn value_without(&self, i: usize) -> Result<f64> {
        let mut s = Coalition::grand(self.n());
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        s.remove(i);
        self.coalition_value(&s)
    }

    /// Closed-form Shapley vector, `φ_i = ½ Σ_{j≠i} s(i, j)`.
    pub fn shapley(&self) -> ShapleyVector {
        let phi: Vec<f64> = (0..self.n())
            .map(|i| 0.5 * self.similarity.off_diagonal_row_sum(i))
            .collect();
        let g_max = phi.iter().copied().fold(0.0, f64::max);
        ShapleyVector { phi, g_max }
    }

    /// `|ν(S) - Σ_{T ⊆ S, |T| = 2} ν(T)|`, with the right-hand side built by
    /// evaluating every two-member sub-coalition separately.
    pub fn pair_decomposition_deviation(&self, s: &Coalition) -> Result<f64> {
        let whole = self.coalition_value(s)?;
        let members: Vec<usize> = s.iter().collect();
        let mut pairs = 0.0;
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                pairs += self.value_of(&[i, j])?;
            }
        }
        Ok((whole - pairs).abs())
    }

    /// `e_S(x) = ν(S) - Σ_{i∈S} x_i`.
    pub fn excess(&self, x: &Imputation, s: &Coalition) -> Result<ExcessReport> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        let value = self.coalition_value(s)?;
        let paid: f64 = s.iter().map(|i| x.payoffs()[i]).sum();
        Ok(ExcessReport {
            coalition: s.clone(),
            excess: value - paid,
        })
    }

    /// `ν` for every coalition, indexed by bitmask. Limited to
    /// [`MAX_ENUMERATION_PLAYERS`] players.
    pub fn value_table(&self) -> Result<Vec<f64>> {
        let n = self.n();
        ensure_enumerable("coalition enumeration", n, 0, MAX_ENUMERATION_PLAYERS)?;
        let mut table = vec![0.0; 1usize << n];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let row = self.similarity.row(low);
            let mut add = 0.0;
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                add += row[j];
                r &= r - 1;
            }
            table[mask] = table[rest] + add;
        }
        Ok(table)
    }
}

pub(crate) fn ensure_enumerable(what: &'static str, n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        return Err(Error::PlayerCount { what, n, min, max });
    }
    Ok(())
}

/// Payoff sums `Σ_{i∈S} x_i` for every mask over `x.len()` players.
pub(crate) fn payoff_table(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut table = vec![0.0; 1usize << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        table[mask] = table[mask & (mask - 1)] + x[low];
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> ClusteringGame {
        ClusteringGame::from_dataset(&Dataset::from_xy(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()).unwrap()
    }

    #[test]
    fn coalition_bitset_basics() {
        let c = Coalition::from_indices(70, [0, 3, 65]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.contains(65) && !c.contains(64));
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![0, 3, 65]);
        assert_eq!(c.complement().len(), 67);
        assert!(c.is_subset_of(&Coalition::grand(70)));
        assert_eq!(c.to_string(), "{0,3,65}");
        assert!(matches!(
            Coalition::from_indices(3, [3]),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
        assert_eq!(Coalition::from_mask(3, 0b1101).iter().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn d3_coalition_values() {
        let g = d3();
        assert_eq!(g.value_of(&[0, 1]).unwrap(), 0.5);
        assert_eq!(g.value_of(&[0, 2]).unwrap(), 0.0);
        assert_eq!(g.value_of(&[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(g.grand_value(), 1.0);
        assert_eq!(g.value_of(&[1]).unwrap(), 0.0);
        assert_eq!(g.coalition_value(&Coalition::empty(3)).unwrap(), 0.0);
        assert!(matches!(g.value_of(&[5]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            g.coalition_value(&Coalition::grand(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn d3_shapley() {
        let phi = d3().shapley();
        assert_eq!(phi.phi, vec![0.25, 0.5, 0.25]);
        assert_eq!(phi.g_max, 0.5);
    }

    #[test]
    fn two_points_have_zero_shapley() {
        let g = ClusteringGame::from_dataset(&Dataset::from_xy(&[(0.0, 0.0), (1.0, 0.0)]).unwrap()).unwrap();
        let phi = g.shapley();
        assert_eq!(phi.phi, vec![0.0, 0.0]);
        assert_eq!(phi.g_max, 0.0);
    }

    #[test]
    fn d3_pair_decomposition() {
        let g = d3();
        assert_eq!(g.pair_decomposition_deviation(&Coalition::grand(3)).unwrap(), 0.0);
        assert_eq!(
            g.pair_decomposition_deviation(&Coalition::from_indices(3, [2]).unwrap())
                .unwrap(),
            0.0
        );
        assert_eq!(g.pair_decomposition_deviation(&Coalition::empty(3)).unwrap(), 0.0);
    }

    #[test]
    fn d3_excesses_at_shapley() {
        let g = d3();
        let x = g.shapley().to_imputation();
        let middle = g.excess(&x, &Coalition::from_indices(3, [1]).unwrap()).unwrap();
        assert_eq!(middle.excess, -0.5);
        let ends = g.excess(&x, &Coalition::from_indices(3, [0, 2]).unwrap()).unwrap();
        assert_eq!(ends.excess, -0.5);
        assert_eq!(g.excess(&x, &Coalition::grand(3)).unwrap().excess, 0.0);
        assert!(matches!(
            g.excess(&Imputation::new(vec![0.0; 2]), &Coalition::grand(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn value_table_matches_direct_evaluation() {
        let ds = crate::dataset::generate(crate::dataset::Shape::Uniform, 7, 11).unwrap();
        let g = ClusteringGame::from_dataset(&ds).unwrap();
        let table = g.value_table().unwrap();
        for mask in 0u64..(1 << 7) {
            let direct = g.coalition_value(&Coalition::from_mask(7, mask)).unwrap();
            assert!((table[mask as usize] - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn enumeration_cap() {
        let sim = SimilarityMatrix::from_values(21, vec![0.5; 21 * 21]).unwrap();
        assert!(matches!(
            ClusteringGame::new(sim).value_table(),
            Err(Error::PlayerCount { n: 21, .. })
        ));
    }
}
