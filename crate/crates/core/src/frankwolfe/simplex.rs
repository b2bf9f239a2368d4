//! Dense two-phase tableau simplex for `min cᵀx s.t. Ax ≤ b, x ≥ 0`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const PIVOT_TOL: f64 = 1e-10;
/// Iterations without objective progress before switching to Bland's rule.
const STALL_LIMIT: usize = 50;
/// Pivots between rebuilds of the tableau from the original system.
const REINVERT_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

struct Tableau {
    /// `m + 1` rows of `cols + 1` entries; the last row is the objective,
    /// the last column the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    iterations: usize,
    /// Original standard-form system and the current phase's costs, used to
    /// rebuild the tableau from the basis when roundoff accumulates.
    a: Matrix,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    since_reinvert: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.iterations += 1;
        self.since_reinvert += 1;
    }

    /// Sets the objective row from `cost` and the current tableau.
    fn set_cost(&mut self, cost: Vec<f64>) {
        let m = self.m();
        let mut obj = cost.clone();
        obj.push(0.0);
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.t[i]) {
                    *o -= cb * v;
                }
            }
        }
        for &b in &self.basis {
            obj[b] = 0.0;
        }
        self.t[m] = obj;
        self.cost = cost;
    }

    /// Recomputes `B⁻¹[A | b]` by Gauss-Jordan on the basis columns. Leaves
    /// the tableau alone if the basis matrix looks singular.
    fn reinvert(&mut self) {
        self.since_reinvert = 0;
        let m = self.m();
        let w = self.cols + 1;
        let mut aug: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row: Vec<f64> = self.basis.iter().map(|&b| self.a[(i, b)]).collect();
                row.extend((0..self.cols).map(|j| self.a[(i, j)]));
                row.push(self.rhs[i]);
                row
            })
            .collect();
        for k in 0..m {
            let p = (k..m).max_by(|&x, &y| aug[x][k].abs().total_cmp(&aug[y][k].abs())).unwrap();
            if aug[p][k].abs() < 1e-12 {
                return;
            }
            aug.swap(k, p);
            let inv = 1.0 / aug[k][k];
            aug[k].iter_mut().for_each(|v| *v *= inv);
            let pivot_row = aug[k].clone();
            for (i, row) in aug.iter_mut().enumerate() {
                if i != k && row[k] != 0.0 {
                    let f = row[k];
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        // Row k of the reduced system now belongs to basis[k].
        for (i, row) in aug.into_iter().enumerate() {
            self.t[i] = row[m..m + w].to_vec();
            self.t[i][self.basis[i]] = 1.0;
        }
        for i in 0..m {
            for (k, &b) in self.basis.iter().enumerate() {
                if k != i {
                    self.t[i][b] = 0.0;
                }
            }
        }
        let cost = std::mem::take(&mut self.cost);
        self.set_cost(cost);
    }

    /// Minimizes the objective row over the columns allowed by `allowed`.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool, max_iter: usize) -> Result<()> {
        let m = self.m();
        let rhs = self.cols;
        let mut bland = false;
        let mut stall = 0;
        let mut last = f64::INFINITY;
        loop {
            if self.iterations > max_iter {
                return Err(Error::numeric("simplex iteration limit", self.t[m][rhs].abs()));
            }
            if self.since_reinvert >= REINVERT_EVERY {
                self.reinvert();
            }
            let obj = &self.t[m];
            let entering = if bland {
                (0..self.cols).find(|&j| allowed(j) && obj[j] < -PIVOT_TOL)
            } else {
                (0..self.cols)
                    .filter(|&j| allowed(j) && obj[j] < -PIVOT_TOL)
                    .min_by(|&a, &b| obj[a].total_cmp(&obj[b]))
            };
            let Some(c) = entering else {
                if self.since_reinvert > 0 {
                    self.reinvert();
                    continue;
                }
                return Ok(());
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((k, best)) => {
                            if ratio < best - 1e-12 {
                                true
                            } else if ratio <= best + 1e-12 {
                                if bland {
                                    self.basis[i] < self.basis[k]
                                } else {
                                    a > self.t[k][c]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                if self.since_reinvert > 0 {
                    self.reinvert();
                    continue;
                }
                return Err(Error::Infeasible("linear program is unbounded".into()));
            };
            self.pivot(r, c);

            // The objective row stores −z, so progress means it increases.
            let value = -self.t[m][rhs];
            if value < last - 1e-12 {
                stall = 0;
                last = value;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
    }
}

/// Solves `min cᵀx` subject to `a x ≤ b`, `x ≥ 0`.
pub fn solve_lp(c: &[f64], a: &Matrix, b: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.rows(), a.cols());
    if c.len() != n || b.len() != m {
        return Err(Error::data("LP dimensions do not match"));
    }
    if c.iter().chain(b).chain(a.as_slice()).any(|v| !v.is_finite()) {
        return Err(Error::data("LP data must be finite"));
    }
    let negative: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let n_art = negative.len();
    let cols = n + m + n_art;

    // Standard form, kept for the final basis refinement.
    let mut std_form = Matrix::zeros(m, cols);
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut art = 0;
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            std_form[(i, j)] = sign * a[(i, j)];
        }
        std_form[(i, n + i)] = sign;
        rhs[i] = sign * b[i];
        if sign < 0.0 {
            std_form[(i, n + m + art)] = 1.0;
            basis[i] = n + m + art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }

    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..cols).map(|j| std_form[(i, j)]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    t.push(vec![0.0; cols + 1]);
    let mut tab = Tableau {
        t,
        basis,
        cols,
        iterations: 0,
        a: std_form.clone(),
        rhs: rhs.clone(),
        cost: Vec::new(),
        since_reinvert: 0,
    };
    let max_iter = 50 * (m + cols) + 1000;
    let rhs_scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();

    if n_art > 0 {
        // Phase 1 minimizes the sum of artificials.
        let mut cost = vec![0.0; cols];
        cost[n + m..].fill(1.0);
        tab.set_cost(cost);
        tab.run(&|_| true, max_iter)?;
        let infeas = -tab.t[m][cols];
        if infeas > 1e-9 * rhs_scale {
            return Err(Error::Infeasible(format!(
                "linear program is infeasible (phase-one residual {infeas:e})"
            )));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| tab.t[i][j].abs() > 1e-9) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(c);
    tab.set_cost(cost);
    tab.run(&|j| j < n + m, max_iter)?;

    // Refine the basic solution against the original system.
    let mut x_basic: Vec<f64> = (0..m).map(|i| tab.t[i][cols]).collect();
    let bmat = Matrix::from_fn(m, m, |i, k| std_form[(i, tab.basis[k])]);
    if let Ok(refined) = bmat.solve(&rhs) {
        if refined.iter().all(|v| v.is_finite() && *v > -1e-7 * rhs_scale) {
            x_basic = refined;
        }
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = x_basic[i].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective, iterations: tab.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]]).unwrap();
        let sol = solve_lp(&[-3.0, -5.0], &a, &[4.0, 12.0, 18.0]).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
        assert!((sol.objective + 36.0).abs() < 1e-12);
    }

    #[test]
    fn needs_phase_one() {
        // min x + y s.t. x + y ≥ 2, x ≤ 3 → value 2.
        let a = Matrix::from_rows(&[vec![-1.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let sol = solve_lp(&[1.0, 1.0], &a, &[-2.0, 3.0]).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert!(sol.x[0] + sol.x[1] >= 2.0 - 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        // x ≤ 1 and x ≥ 2.
        let a = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        assert!(matches!(solve_lp(&[1.0], &a, &[1.0, -2.0]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn detects_unboundedness() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert!(matches!(solve_lp(&[-1.0, 0.0], &a, &[1.0]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling instance under the largest-coefficient rule.
        let a = Matrix::from_rows(&[
            vec![0.5, -5.5, -2.5, 9.0],
            vec![0.5, -1.5, -0.5, 1.0],
            vec![1.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let sol = solve_lp(&[-10.0, 57.0, 9.0, 24.0], &a, &[0.0, 0.0, 1.0]).unwrap();
        assert!((sol.objective + 1.0).abs() < 1e-9, "{}", sol.objective);
    }
}
