//! Dense two-phase simplex for small linear programs.
//!
//! Programs are rewritten as `max c·y` subject to `A y <= b`, `y >= 0` and
//! solved on a condensed dictionary that stores only the non-basic columns.
//! Phase one uses a single auxiliary variable. Pricing starts with the
//! largest-coefficient rule and switches to Bland's rule for the rest of the
//! solve after a run of degenerate pivots.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const NON_NEGATIVE: Bounds = Bounds {
        lower: Some(0.0),
        upper: None,
    };
    pub const FREE: Bounds = Bounds {
        lower: None,
        upper: None,
    };

    pub fn at_least(lower: f64) -> Self {
        Bounds {
            lower: Some(lower),
            upper: None,
        }
    }

    pub fn fixed(value: f64) -> Self {
        Bounds {
            lower: Some(value),
            upper: Some(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex numerical failure: {0}")]
    Numerical(String),
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Objective,
    costs: Vec<f64>,
    bounds: Vec<Bounds>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Coefficients smaller than this are treated as zero when pricing or pivoting.
const PIVOT_TOL: f64 = 1e-10;
/// Phase-one objective below `-FEAS_TOL` means infeasible.
const FEAS_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

impl LinearProgram {
    /// A program over `costs.len()` variables, all non-negative by default.
    pub fn new(objective: Objective, costs: Vec<f64>) -> Self {
        let n = costs.len();
        Self {
            objective,
            costs,
            bounds: vec![Bounds::NON_NEGATIVE; n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.costs.len();
        if n == 0 {
            return Err(LpError::Malformed("no variables".into()));
        }
        if self.constraints.is_empty() {
            return Err(LpError::Malformed("no constraints".into()));
        }
        if self.costs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("non-finite objective coefficient".into()));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(LpError::Malformed(format!(
                    "constraint {r} has {} coefficients, expected {n}",
                    c.coefficients.len()
                )));
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(LpError::Malformed(format!("constraint {r} is not finite")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            let finite = |v: Option<f64>| v.is_none_or(f64::is_finite);
            if !finite(b.lower) || !finite(b.upper) {
                return Err(LpError::Malformed(format!("bounds of variable {j} are not finite")));
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        solve_lp(self)
    }
}

/// Each original variable is `offset + Σ sign * y_col` over non-negative `y`.
struct VarMap {
    offset: f64,
    terms: Vec<(usize, f64)>,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;

    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0usize;
    // extra rows from finite upper bounds: (column, limit)
    let mut caps: Vec<(usize, f64)> = Vec::new();
    for b in &lp.bounds {
        let map = match (b.lower, b.upper) {
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    if u < l {
                        return Err(LpError::Infeasible);
                    }
                    caps.push((col, u - l));
                }
                VarMap {
                    offset: l,
                    terms: vec![(col, 1.0)],
                }
            }
            (None, Some(u)) => {
                ncols += 1;
                VarMap {
                    offset: u,
                    terms: vec![(ncols - 1, -1.0)],
                }
            }
            (None, None) => {
                ncols += 2;
                VarMap {
                    offset: 0.0,
                    terms: vec![(ncols - 2, 1.0), (ncols - 1, -1.0)],
                }
            }
        };
        maps.push(map);
    }

    // Rows of A y <= b.
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![0.0; ncols];
        let mut shift = 0.0;
        for (j, &coef) in c.coefficients.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            shift += coef * maps[j].offset;
            for &(col, sign) in &maps[j].terms {
                a[col] += coef * sign;
            }
        }
        let rhs = c.rhs - shift;
        match c.relation {
            Relation::Le => rows.push((a, rhs)),
            Relation::Ge => rows.push((a.iter().map(|v| -v).collect(), -rhs)),
            Relation::Eq => {
                rows.push((a.iter().map(|v| -v).collect(), -rhs));
                rows.push((a, rhs));
            }
        }
    }
    for (col, limit) in caps {
        let mut a = vec![0.0; ncols];
        a[col] = 1.0;
        rows.push((a, limit));
    }

    let sign = match lp.objective {
        Objective::Maximize => 1.0,
        Objective::Minimize => -1.0,
    };
    let mut y_costs = vec![0.0; ncols];
    for (j, &c) in lp.costs.iter().enumerate() {
        for &(col, s) in &maps[j].terms {
            y_costs[col] += sign * c * s;
        }
    }

    let mut dict = Dictionary::new(&rows, ncols);
    dict.phase_one()?;
    dict.set_objective(&y_costs);
    dict.optimize()?;

    let y = dict.values();
    let x: Vec<f64> = maps
        .iter()
        .map(|m| m.offset + m.terms.iter().map(|&(col, s)| s * y[col]).sum::<f64>())
        .collect();
    let objective = lp.costs.iter().zip(&x).map(|(c, v)| c * v).sum();
    check_residuals(lp, &x)?;
    Ok(LpSolution {
        x,
        objective,
        pivots: dict.pivots,
    })
}

fn check_residuals(lp: &LinearProgram, x: &[f64]) -> Result<(), LpError> {
    for (r, c) in lp.constraints.iter().enumerate() {
        let lhs: f64 = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
        let scale = 1.0 + c.rhs.abs() + c.coefficients.iter().map(|a| a.abs()).sum::<f64>();
        let tol = 1e-7 * scale;
        let violated = match c.relation {
            Relation::Le => lhs > c.rhs + tol,
            Relation::Ge => lhs < c.rhs - tol,
            Relation::Eq => (lhs - c.rhs).abs() > tol,
        };
        if violated {
            return Err(LpError::Numerical(format!(
                "constraint {r} violated at solution: {lhs} {} {}",
                c.relation, c.rhs
            )));
        }
    }
    Ok(())
}

/// `x_basic[i] = d[i][0] + Σ_j d[i][1 + j] * x_nonbasic[j]`, objective row alike.
struct Dictionary {
    width: usize,
    d: Vec<f64>,
    z: Vec<f64>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    nvars: usize,
    pivots: usize,
    bland: bool,
}

impl Dictionary {
    fn new(rows: &[(Vec<f64>, f64)], ncols: usize) -> Self {
        let m = rows.len();
        let width = ncols + 1;
        let mut d = vec![0.0; m * width];
        for (i, (a, b)) in rows.iter().enumerate() {
            let row = &mut d[i * width..(i + 1) * width];
            row[0] = *b;
            for (j, v) in a.iter().enumerate() {
                row[1 + j] = -v;
            }
        }
        Self {
            width,
            d,
            z: vec![0.0; width],
            basic: (ncols..ncols + m).collect(),
            nonbasic: (0..ncols).collect(),
            nvars: ncols + m,
            pivots: 0,
            bland: false,
        }
    }

    fn rows(&self) -> usize {
        self.basic.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.width..(i + 1) * self.width]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width;
        let col = s + 1;
        let a = self.d[r * w + col];
        let mut pivot_row = self.row(r).to_vec();
        for (j, v) in pivot_row.iter_mut().enumerate() {
            *v = if j == col { 1.0 / a } else { -*v / a };
        }
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let row = &mut self.d[i * w..(i + 1) * w];
            let c = row[col];
            if c == 0.0 {
                continue;
            }
            for (j, v) in row.iter_mut().enumerate() {
                if j == col {
                    *v = c * pivot_row[col];
                } else {
                    *v += c * pivot_row[j];
                }
            }
        }
        let c = self.z[col];
        if c != 0.0 {
            for (j, v) in self.z.iter_mut().enumerate() {
                if j == col {
                    *v = c * pivot_row[col];
                } else {
                    *v += c * pivot_row[j];
                }
            }
        }
        self.d[r * w..(r + 1) * w].copy_from_slice(&pivot_row);
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
        self.pivots += 1;
    }

    fn entering(&self) -> Option<usize> {
        let candidates = (0..self.nonbasic.len()).filter(|&j| self.z[j + 1] > PIVOT_TOL);
        if self.bland {
            candidates.min_by_key(|&j| self.nonbasic[j])
        } else {
            candidates.max_by(|&a, &b| {
                self.z[a + 1]
                    .total_cmp(&self.z[b + 1])
                    .then(self.nonbasic[b].cmp(&self.nonbasic[a]))
            })
        }
    }

    fn leaving(&self, s: usize) -> Option<usize> {
        let col = s + 1;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows() {
            let row = self.row(i);
            let a = row[col];
            if a >= -PIVOT_TOL {
                continue;
            }
            let ratio = row[0].max(0.0) / -a;
            best = match best {
                None => Some((i, ratio)),
                Some((k, r)) => {
                    let tie = (ratio - r).abs() <= 1e-12 * (1.0 + r.abs());
                    if ratio < r && !tie || tie && self.basic[i] < self.basic[k] {
                        Some((i, ratio))
                    } else {
                        Some((k, r))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn iteration_limit(&self) -> usize {
        100_000 + 50 * (self.rows() + self.width)
    }

    fn optimize(&mut self) -> Result<(), LpError> {
        let mut degenerate = 0usize;
        let limit = self.iteration_limit();
        loop {
            if self.pivots > limit {
                return Err(LpError::Numerical(format!(
                    "no convergence after {} pivots",
                    self.pivots
                )));
            }
            let Some(s) = self.entering() else {
                return Ok(());
            };
            let Some(r) = self.leaving(s) else {
                return Err(LpError::Unbounded);
            };
            if self.row(r)[0] <= FEAS_TOL * 1e-3 {
                degenerate += 1;
                if degenerate >= DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, s);
        }
    }

    /// Drives the dictionary to a feasible basis, or reports infeasibility.
    fn phase_one(&mut self) -> Result<(), LpError> {
        let (worst, b) = (0..self.rows())
            .map(|i| (i, self.row(i)[0]))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("at least one row");
        if b >= 0.0 {
            return Ok(());
        }
        // Append the auxiliary column x0 with coefficient +1 in every row.
        let aux = self.nvars;
        let (m, w) = (self.rows(), self.width);
        let mut d = vec![0.0; m * (w + 1)];
        for i in 0..m {
            d[i * (w + 1)..i * (w + 1) + w].copy_from_slice(self.row(i));
            d[i * (w + 1) + w] = 1.0;
        }
        self.d = d;
        self.width = w + 1;
        self.nonbasic.push(aux);
        let aux_col = self.nonbasic.len() - 1;
        self.z = vec![0.0; self.width];
        self.z[aux_col + 1] = -1.0;

        self.pivot(worst, aux_col);
        self.optimize()?;
        if self.z[0] < -FEAS_TOL {
            return Err(LpError::Infeasible);
        }

        if let Some(r) = self.basic.iter().position(|&v| v == aux) {
            // x0 is basic at level zero: swap it with the largest usable column.
            let row = self.row(r).to_vec();
            let s = (0..self.nonbasic.len())
                .filter(|&j| row[j + 1].abs() > PIVOT_TOL)
                .max_by(|&a, &b| row[a + 1].abs().total_cmp(&row[b + 1].abs()))
                .ok_or_else(|| LpError::Numerical("auxiliary variable stuck in basis".into()))?;
            self.pivot(r, s);
        }
        let s = self
            .nonbasic
            .iter()
            .position(|&v| v == aux)
            .expect("auxiliary variable is non-basic");
        self.drop_column(s);
        self.bland = false;
        Ok(())
    }

    fn drop_column(&mut self, s: usize) {
        let (m, w) = (self.rows(), self.width);
        let mut d = Vec::with_capacity(m * (w - 1));
        for i in 0..m {
            let row = self.row(i);
            d.extend_from_slice(&row[..s + 1]);
            d.extend_from_slice(&row[s + 2..]);
        }
        self.d = d;
        self.width = w - 1;
        self.nonbasic.remove(s);
        self.z = vec![0.0; self.width];
    }

    /// Expresses `Σ costs[v] * y_v` in terms of the current non-basic columns.
    fn set_objective(&mut self, costs: &[f64]) {
        let mut z = vec![0.0; self.width];
        for (j, &v) in self.nonbasic.iter().enumerate() {
            if let Some(&c) = costs.get(v) {
                z[j + 1] += c;
            }
        }
        for i in 0..self.rows() {
            if let Some(&c) = costs.get(self.basic[i]) {
                if c != 0.0 {
                    for (zj, rj) in z.iter_mut().zip(self.row(i)) {
                        *zj += c * rj;
                    }
                }
            }
        }
        self.z = z;
    }

    fn values(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.nvars + 1];
        for i in 0..self.rows() {
            y[self.basic[i]] = self.row(i)[0].max(0.0);
        }
        y
    }
}
