//! Wall-clock scaling of the full clustering pipeline on uniform data. The
//! timed region includes building the similarity matrix.

use std::time::Instant;

use serde::Serialize;

use crate::dataset::{generate, Shape};
use crate::drac::{drac_cluster, DracParams};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    /// Fastest of the repeated runs.
    pub seconds: f64,
    /// `seconds / seconds_of_first_size`; absent for the first size.
    pub ratio: Option<f64>,
    /// `(n / n_first)^2`, the ratio predicted by quadratic scaling.
    pub quadratic_ratio: Option<f64>,
}

pub fn bench(sizes: &[usize], seed: u64, params: &DracParams, repeats: usize) -> Result<Vec<BenchRow>> {
    let mut rows: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let ds = generate(Shape::Uniform, n, seed)?;
        let mut best = f64::INFINITY;
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            let state = drac_cluster(&ds, params)?;
            best = best.min(start.elapsed().as_secs_f64());
            std::hint::black_box(state);
        }
        let (ratio, quadratic_ratio) = match rows.first() {
            Some(first) if sizes.len() > 1 => (Some(best / first.seconds), Some((n as f64 / first.n as f64).powi(2))),
            _ => (None, None),
        };
        rows.push(BenchRow {
            n,
            seconds: best,
            ratio,
            quadratic_ratio,
        });
    }
    Ok(rows)
}

pub fn format_bench(rows: &[BenchRow]) -> String {
    let mut out = String::from("n\tseconds\tratio\tquadratic\n");
    for r in rows {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        out.push_str(&format!(
            "{}\t{:.6}\t{}\t{}\n",
            r.n,
            r.seconds,
            fmt(r.ratio),
            fmt(r.quadratic_ratio)
        ));
    }
    out
}
