//! Dense two-phase tableau simplex.
//!
//! Entering columns are chosen by most negative reduced cost; after a run of
//! degenerate pivots the solver switches permanently to Bland's rule, which
//! rules out cycling. Meant for desk-scale models (a few thousand columns).

const EPS: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// `min c·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn objective(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(*objective),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; vars],
            constraints: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    /// The same program with variable `j` renamed to `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> LinearProgram {
        let mut objective = vec![0.0; self.objective.len()];
        for (j, &c) in self.objective.iter().enumerate() {
            objective[perm[j]] = c;
        }
        LinearProgram {
            objective,
            constraints: self
                .constraints
                .iter()
                .map(|r| Constraint {
                    coeffs: r.coeffs.iter().map(|&(j, a)| (perm[j], a)).collect(),
                    cmp: r.cmp,
                    rhs: r.rhs,
                })
                .collect(),
        }
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::new(self).run(&self.objective)
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major, `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
    n_structural: usize,
    first_artificial: usize,
    bland: bool,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.var_count();
        let rows = lp.constraints.len();
        // Normalize to nonnegative right-hand sides.
        let normalized: Vec<(Vec<(usize, f64)>, Cmp, f64)> = lp
            .constraints
            .iter()
            .map(|r| {
                if r.rhs < 0.0 {
                    let cmp = match r.cmp {
                        Cmp::Le => Cmp::Ge,
                        Cmp::Ge => Cmp::Le,
                        Cmp::Eq => Cmp::Eq,
                    };
                    (r.coeffs.iter().map(|&(j, a)| (j, -a)).collect(), cmp, -r.rhs)
                } else {
                    (r.coeffs.clone(), r.cmp, r.rhs)
                }
            })
            .collect();
        let slacks = normalized.iter().filter(|r| r.1 != Cmp::Eq).count();
        let artificials = normalized.iter().filter(|r| r.1 != Cmp::Le).count();
        let cols = n + slacks + artificials;
        let width = cols + 1;
        let mut a = vec![0.0; rows * width];
        let mut basis = vec![0; rows];
        let mut next_slack = n;
        let mut next_art = n + slacks;
        for (i, (coeffs, cmp, rhs)) in normalized.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            for &(j, v) in coeffs {
                row[j] += v;
            }
            row[cols] = *rhs;
            match cmp {
                Cmp::Le => {
                    row[next_slack] = 1.0;
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Cmp::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    next_art += 1;
                }
                Cmp::Eq => {
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Tableau {
            rows,
            cols,
            a,
            basis,
            n_structural: n,
            first_artificial: n + slacks,
            bland: false,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let width = self.cols + 1;
        let p = self.at(r, col);
        {
            let row = &mut self.a[r * width..(r + 1) * width];
            for v in row.iter_mut() {
                *v /= p;
            }
        }
        let pivot_row: Vec<f64> = self.a[r * width..(r + 1) * width].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let factor = self.a[i * width + col];
            if factor.abs() <= 1e-14 {
                continue;
            }
            let row = &mut self.a[i * width..(i + 1) * width];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            row[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Reduced costs `c_j - c_B B^-1 A_j` for the current basis.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d: Vec<f64> = (0..self.cols).map(|j| cost.get(j).copied().unwrap_or(0.0)).collect();
        for i in 0..self.rows {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb == 0.0 {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                *dj -= cb * self.at(i, j);
            }
        }
        d
    }

    /// Optimizes `cost` over columns `< allowed`. Returns `false` when
    /// unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        let mut d = self.reduced_costs(cost);
        let mut degenerate = 0;
        loop {
            let entering = if self.bland {
                (0..allowed).find(|&j| d[j] < -EPS)
            } else {
                let mut best = None;
                let mut best_val = -EPS;
                for (j, &dj) in d.iter().enumerate().take(allowed) {
                    if dj < best_val {
                        best_val = dj;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else { return true };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aij = self.at(i, col);
                if aij > EPS {
                    let ratio = self.rhs(i) / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else { return false };
            if ratio <= EPS {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, col);
            // Update reduced costs with the new pivot row.
            let dc = d[col];
            for (j, dj) in d.iter_mut().enumerate() {
                *dj -= dc * self.at(r, j);
            }
            d[col] = 0.0;
        }
    }

    fn run(mut self, objective: &[f64]) -> LpOutcome {
        if self.first_artificial < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            self.optimize(&phase1, self.cols);
            let infeasibility: f64 = (0..self.rows)
                .filter(|&i| self.basis[i] >= self.first_artificial)
                .map(|i| self.rhs(i))
                .sum();
            let scale = 1.0
                + (0..self.rows)
                    .map(|i| self.rhs(i).abs())
                    .fold(0.0, f64::max);
            if infeasibility > 1e-7 * scale {
                return LpOutcome::Infeasible;
            }
            // Drive remaining zero-level artificials out of the basis.
            for i in 0..self.rows {
                if self.basis[i] < self.first_artificial {
                    continue;
                }
                if let Some(j) = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > 1e-7) {
                    self.pivot(i, j);
                }
            }
        }
        self.bland = false;
        if !self.optimize(objective, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.n_structural];
        for i in 0..self.rows {
            let b = self.basis[i];
            if b < self.n_structural {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        let objective_value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal {
            objective: objective_value,
            x,
        }
    }
}
