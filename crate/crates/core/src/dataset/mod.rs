//! Point sets and the distance-normalized similarity between their points.
//!
//! Similarity between two points is `1 - d(i, j) / d_max`, where `d_max` is the
//! largest pairwise Euclidean distance in the dataset. The pair(s) realizing
//! `d_max` therefore have similarity exactly zero, and coincident points have
//! similarity one.

pub mod synthetic;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use synthetic::{generate, generate_labeled, Group, Shape, Synthetic};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// An ordered, non-empty list of finite points. A point's position in the
/// list is its identity (player index) for the lifetime of the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Point>,
}

impl Dataset {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinitePoint { index });
        }
        Ok(Self { points })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for the usual `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    /// Reads one `x,y` point per line. Blank lines are skipped; line numbers in
    /// errors are 1-based and count every physical line, header included.
    pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_csv(&text, has_header)
    }

    pub fn parse_csv(text: &str, has_header: bool) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if has_header && idx == 0 {
                continue;
            }
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            points.push(parse_row(row, line)?);
        }
        Self::new(points)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 24);
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.x, p.y));
        }
        out
    }

    pub fn distances(&self) -> DistanceSummary {
        DistanceSummary::compute(self)
    }

    /// Same values as `SimilarityMatrix::from_distances(&self.distances())`,
    /// filled row by row without the intermediate distance matrix.
    pub fn similarity(&self) -> Result<SimilarityMatrix> {
        let pts = &self.points;
        let n = pts.len();
        let mut d_max = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                d_max = d_max.max(pts[i].distance(&pts[j]));
            }
        }
        if d_max <= 0.0 {
            return Err(Error::DegenerateDataset);
        }
        let mut values = vec![0.0; n * n];
        for (i, row) in values.chunks_exact_mut(n).enumerate() {
            let p = pts[i];
            for (j, v) in row.iter_mut().enumerate() {
                *v = similarity_of(p.distance(&pts[j]), d_max);
            }
            row[i] = 1.0;
        }
        Ok(SimilarityMatrix { n, values })
    }
}

fn parse_row(row: &str, line: usize) -> Result<Point> {
    let mut fields = row.split(',');
    let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(Error::MalformedRow {
            line,
            reason: format!("expected exactly two comma-separated fields, got `{row}`"),
        });
    };
    let parse = |field: &str| -> Result<f64> {
        let value: f64 = field.trim().parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("`{}` is not a number", field.trim()),
        })?;
        if !value.is_finite() {
            return Err(Error::MalformedRow {
                line,
                reason: format!("`{}` is not finite", field.trim()),
            });
        }
        Ok(value)
    };
    Ok(Point::new(parse(xs)?, parse(ys)?))
}

/// Dense symmetric matrix of Euclidean distances together with its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSummary {
    n: usize,
    values: Vec<f64>,
    d_max: f64,
}

impl DistanceSummary {
    pub fn compute(dataset: &Dataset) -> Self {
        let n = dataset.len();
        let pts = dataset.points();
        let mut values = vec![0.0; n * n];
        let mut d_max = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = pts[i].distance(&pts[j]);
                values[i * n + j] = d;
                values[j * n + i] = d;
                d_max = d_max.max(d);
            }
        }
        Self { n, values, d_max }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }
}

/// Symmetric matrix of pairwise similarities in `[0, 1]`.
///
/// The diagonal is stored as 1 but nothing downstream reads it: coalition
/// values and Shapley sums only range over distinct pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_distances(ds: &DistanceSummary) -> Result<Self> {
        let d_max = ds.d_max();
        if d_max <= 0.0 {
            return Err(Error::DegenerateDataset);
        }
        let n = ds.n();
        let mut values = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = similarity_of(ds.get(i, j), d_max);
                values[i * n + j] = s;
                values[j * n + i] = s;
            }
        }
        Ok(Self { n, values })
    }

    /// Builds a matrix from explicit row-major values. Off-diagonal entries
    /// must lie in `[0, 1]` and the matrix must be exactly symmetric.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if i != j && !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidSimilarity(format!(
                        "entry ({i}, {j}) = {v} outside [0, 1]"
                    )));
                }
                if v != values[j * n + i] {
                    return Err(Error::InvalidSimilarity(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        let mut values = values;
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Sum of the row excluding the diagonal.
    pub fn off_diagonal_row_sum(&self, i: usize) -> f64 {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v)
            .sum()
    }
}

#[inline]
pub(crate) fn similarity_of(distance: f64, d_max: f64) -> f64 {
    1.0 - distance / d_max
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> Dataset {
        Dataset::from_xy(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()
    }

    #[test]
    fn parses_plain_rows_in_order() {
        let d = Dataset::parse_csv("0,0\n1,0\n2,0", false).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.point(2), Point::new(2.0, 0.0));
    }

    #[test]
    fn header_is_skipped_when_flagged() {
        let d = Dataset::parse_csv("x,y\n0.5,1.5\n", true).unwrap();
        assert_eq!(d.points(), &[Point::new(0.5, 1.5)]);
        assert!(matches!(
            Dataset::parse_csv("x,y\n0.5,1.5\n", false),
            Err(Error::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn malformed_row_names_its_line() {
        match Dataset::parse_csv("0,abc", false) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match Dataset::parse_csv("0,0\n1,2,3\n", false) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Dataset::parse_csv("0,inf", false),
            Err(Error::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(Dataset::parse_csv("", false), Err(Error::EmptyDataset)));
        assert!(matches!(Dataset::parse_csv("x,y\n", true), Err(Error::EmptyDataset)));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            Dataset::load_csv("/definitely/not/here.csv", false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn collinear_distances() {
        let ds = d3().distances();
        assert_eq!(ds.d_max(), 2.0);
        assert_eq!(ds.get(0, 1), 1.0);
        assert_eq!(ds.get(2, 0), 2.0);
        assert_eq!(ds.get(1, 1), 0.0);
    }

    #[test]
    fn single_point_distances() {
        let ds = Dataset::from_xy(&[(4.0, -1.0)]).unwrap().distances();
        assert_eq!(ds.n(), 1);
        assert_eq!(ds.get(0, 0), 0.0);
        assert_eq!(ds.d_max(), 0.0);
    }

    #[test]
    fn three_four_five() {
        let ds = Dataset::from_xy(&[(0.0, 0.0), (3.0, 4.0)]).unwrap().distances();
        assert_eq!(ds.get(0, 1), 5.0);
    }

    #[test]
    fn collinear_similarity() {
        let s = d3().similarity().unwrap();
        assert_eq!(s.get(0, 1), 0.5);
        assert_eq!(s.get(1, 2), 0.5);
        assert_eq!(s.get(0, 2), 0.0);
        assert_eq!(s.get(1, 1), 1.0);
    }

    #[test]
    fn coincident_pair_has_unit_similarity() {
        let s = Dataset::from_xy(&[(0.0, 0.0), (0.0, 0.0), (3.0, 1.0)])
            .unwrap()
            .similarity()
            .unwrap();
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(0, 2), 0.0);
    }

    #[test]
    fn zero_spread_is_degenerate() {
        let single = Dataset::from_xy(&[(1.0, 1.0)]).unwrap();
        assert!(matches!(single.similarity(), Err(Error::DegenerateDataset)));
        let stacked = Dataset::from_xy(&[(1.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(matches!(stacked.similarity(), Err(Error::DegenerateDataset)));
    }

    #[test]
    fn non_finite_points_rejected() {
        assert!(matches!(
            Dataset::from_xy(&[(0.0, 0.0), (f64::NAN, 1.0)]),
            Err(Error::NonFinitePoint { index: 1 })
        ));
    }

    #[test]
    fn explicit_similarity_validation() {
        assert!(SimilarityMatrix::from_values(1, vec![0.0]).is_ok());
        assert!(matches!(
            SimilarityMatrix::from_values(2, vec![1.0, 0.3, 0.4, 1.0]),
            Err(Error::InvalidSimilarity(_))
        ));
        assert!(matches!(
            SimilarityMatrix::from_values(2, vec![1.0, 1.3, 1.3, 1.0]),
            Err(Error::InvalidSimilarity(_))
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = Dataset::from_xy(&[(0.1, 1.0 / 3.0), (-2.5e-7, 12345.678)]).unwrap();
        assert_eq!(Dataset::parse_csv(&d.to_csv(), false).unwrap(), d);
    }

    #[test]
    fn direct_similarity_matches_distance_route() {
        let ds = super::synthetic::generate(Shape::Uniform, 60, 5).unwrap();
        let direct = ds.similarity().unwrap();
        let via = SimilarityMatrix::from_distances(&ds.distances()).unwrap();
        assert_eq!(direct, via);
    }
}
