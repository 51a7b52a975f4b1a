//! Revised simplex on the computational standard form
//! `min c.x  s.t.  A x = b, x >= 0`, with a dense basis inverse.
//!
//! Columns are sparse. Pricing is Dantzig (most negative reduced cost,
//! ties to the lowest column index) until the pivot counter crosses the
//! configured threshold, after which Bland's rule takes over and rules out
//! cycling. The basis inverse is maintained by product-form row operations
//! and rebuilt from scratch at a fixed interval to cap error growth.

use crate::linprog::LpConfig;
use crate::{Error, Result};

const REFACTOR_INTERVAL: usize = 200;

#[derive(Debug, Clone)]
pub(super) struct StdForm {
    pub nrows: usize,
    /// Sparse columns: `(row, coefficient)` pairs, rows strictly increasing.
    pub cols: Vec<Vec<(usize, f64)>>,
    /// Minimization costs, one per column.
    pub costs: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum CoreOutcome {
    Optimal,
    Unbounded,
    /// Phase 1 ended with positive artificial mass.
    Infeasible,
}

#[derive(Debug, Clone)]
pub(super) struct CoreSolution {
    pub outcome: CoreOutcome,
    /// Values for every column of the standard form.
    pub x: Vec<f64>,
    /// Simplex multipliers `pi = c_B B^{-1}` at termination.
    pub multipliers: Vec<f64>,
}

pub(super) struct Simplex<'a> {
    std: &'a StdForm,
    cfg: &'a LpConfig,
    ncols: usize,
    /// Artificial columns appended after the structural ones (identity).
    num_artificial: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Dense row-major basis inverse, nrows x nrows.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    pivots_since_refactor: usize,
    bland: bool,
}

impl<'a> Simplex<'a> {
    /// Solve from an explicit starting basis whose basic solution must be
    /// feasible (the caller guarantees `B^{-1} b >= 0`).
    pub fn solve_with_basis(
        std: &'a StdForm,
        basis: Vec<usize>,
        cfg: &'a LpConfig,
    ) -> Result<CoreSolution> {
        let mut s = Self::new(std, 0, cfg);
        s.basis = basis;
        s.refactor()?;
        for &v in &s.xb {
            if v < -cfg.feasibility_tol {
                return Err(Error::LpNumerical(format!(
                    "starting basis is infeasible (basic value {v:e})"
                )));
            }
        }
        for &j in &s.basis {
            s.in_basis[j] = true;
        }
        let outcome = s.iterate(&std.costs)?;
        Ok(s.finish(outcome))
    }

    /// Two-phase solve with an artificial starting basis. Requires
    /// `rhs >= 0`; the caller normalizes row signs beforehand.
    pub fn solve_two_phase(std: &'a StdForm, cfg: &'a LpConfig) -> Result<CoreSolution> {
        let m = std.nrows;
        let mut s = Self::new(std, m, cfg);
        s.basis = (0..m).map(|i| s.ncols - m + i).collect();
        for &j in &s.basis {
            s.in_basis[j] = true;
        }
        s.binv = identity(m);
        s.xb = std.rhs.clone();

        // Phase 1: minimize total artificial mass.
        let mut phase1_costs = vec![0.0; s.ncols];
        for c in phase1_costs.iter_mut().skip(s.ncols - m) {
            *c = 1.0;
        }
        let outcome = s.iterate(&phase1_costs)?;
        if outcome == CoreOutcome::Unbounded {
            return Err(Error::LpNumerical(
                "phase 1 reported an unbounded problem".into(),
            ));
        }
        let artificial_mass: f64 = s
            .basis
            .iter()
            .zip(&s.xb)
            .filter(|(j, _)| s.is_artificial(**j))
            .map(|(_, v)| v.max(0.0))
            .sum();
        if artificial_mass > cfg.feasibility_tol {
            return Ok(s.finish(CoreOutcome::Infeasible));
        }
        s.drive_out_artificials()?;

        // Phase 2 on the real costs; artificials are banned from entering.
        let mut phase2_costs = std.costs.clone();
        phase2_costs.resize(s.ncols, 0.0);
        let outcome = s.iterate(&phase2_costs)?;
        Ok(s.finish(outcome))
    }

    fn new(std: &'a StdForm, num_artificial: usize, cfg: &'a LpConfig) -> Self {
        let ncols = std.cols.len() + num_artificial;
        Simplex {
            std,
            cfg,
            ncols,
            num_artificial,
            basis: Vec::new(),
            in_basis: vec![false; ncols],
            binv: identity(std.nrows),
            xb: vec![0.0; std.nrows],
            iterations: 0,
            pivots_since_refactor: 0,
            bland: false,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.ncols - self.num_artificial
    }

    fn column(&self, j: usize) -> ColRef<'_> {
        if self.is_artificial(j) {
            ColRef::Unit(j - (self.ncols - self.num_artificial))
        } else {
            ColRef::Sparse(&self.std.cols[j])
        }
    }

    fn finish(mut self, outcome: CoreOutcome) -> CoreSolution {
        // A clean refactorization before reading off the answer.
        if outcome == CoreOutcome::Optimal && self.refactor().is_err() {
            // Singular at the very end would have failed earlier pivots too;
            // fall through with the incrementally updated state.
        }
        let mut x = vec![0.0; self.std.cols.len()];
        for (i, &j) in self.basis.iter().enumerate() {
            if !self.is_artificial(j) {
                x[j] = self.xb[i];
            }
        }
        let costs = &self.std.costs;
        let mut cb = vec![0.0; self.std.nrows];
        for (i, &j) in self.basis.iter().enumerate() {
            cb[i] = if self.is_artificial(j) { 0.0 } else { costs[j] };
        }
        let multipliers = self.costs_times_binv(&cb);
        CoreSolution {
            outcome,
            x,
            multipliers,
        }
    }

    /// One simplex run against the given cost vector (covers both phases).
    fn iterate(&mut self, costs: &[f64]) -> Result<CoreOutcome> {
        let m = self.std.nrows;
        if m == 0 {
            // No rows: any column with negative cost rides to infinity.
            for (j, &c) in costs.iter().enumerate().take(self.std.cols.len()) {
                if c < -self.cfg.optimality_tol {
                    let _ = j;
                    return Ok(CoreOutcome::Unbounded);
                }
            }
            return Ok(CoreOutcome::Optimal);
        }
        loop {
            if self.iterations >= self.cfg.max_iters {
                return Err(Error::LpNumerical(format!(
                    "iteration limit {} reached",
                    self.cfg.max_iters
                )));
            }
            if self.pivots_since_refactor >= REFACTOR_INTERVAL {
                self.refactor()?;
            }
            if !self.bland && self.iterations >= self.cfg.bland_after {
                self.bland = true;
            }

            let mut cb = vec![0.0; m];
            for (i, &j) in self.basis.iter().enumerate() {
                cb[i] = costs[j];
            }
            let pi = self.costs_times_binv(&cb);

            // Pricing. Artificials never re-enter: they either sit in the
            // basis (skipped here) or are dropped for good once they leave.
            let mut entering = None;
            let mut best = -self.cfg.optimality_tol;
            for j in 0..self.ncols {
                if self.in_basis[j] || self.is_artificial(j) {
                    continue;
                }
                let r = costs[j] - self.column(j).dot(&pi);
                if r < best {
                    entering = Some(j);
                    if self.bland {
                        break;
                    }
                    best = r;
                }
            }
            let Some(e) = entering else {
                return Ok(CoreOutcome::Optimal);
            };

            // Direction d = B^{-1} A_e.
            let d = self.ftran(e);

            // Ratio test. Rows holding a zero-valued artificial that the
            // direction would push upward are evicted at ratio zero.
            let mut leaving: Option<usize> = None;
            let mut theta = f64::INFINITY;
            for i in 0..m {
                let cand = if d[i] > self.cfg.pivot_tol {
                    Some(self.xb[i].max(0.0) / d[i])
                } else if d[i] < -self.cfg.pivot_tol
                    && self.is_artificial(self.basis[i])
                    && self.xb[i] <= self.cfg.feasibility_tol
                {
                    Some(0.0)
                } else {
                    None
                };
                let Some(t) = cand else { continue };
                let tie = (t - theta).abs() <= 1e-12 * (1.0 + theta.abs());
                let better = t < theta && !tie;
                let wins_tie = tie
                    && match leaving {
                        None => true,
                        Some(r) => {
                            if self.bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                d[i].abs() > d[r].abs()
                            }
                        }
                    };
                if better || leaving.is_none() || wins_tie {
                    leaving = Some(i);
                    theta = t.min(theta);
                }
            }
            let Some(r) = leaving else {
                return Ok(CoreOutcome::Unbounded);
            };

            self.pivot(r, e, &d, theta);
        }
    }

    fn pivot(&mut self, r: usize, e: usize, d: &[f64], theta: f64) {
        let m = self.std.nrows;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * d[i];
                if self.xb[i].abs() < 1e-15 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;

        let dr = d[r];
        let (head, row_r, tail) = split_row_mut(&mut self.binv, r, m);
        for v in row_r.iter_mut() {
            *v /= dr;
        }
        for (i, row) in head.chunks_mut(m).enumerate() {
            axpy(row, row_r, -d[i]);
        }
        for (k, row) in tail.chunks_mut(m).enumerate() {
            axpy(row, row_r, -d[r + 1 + k]);
        }

        self.in_basis[self.basis[r]] = false;
        self.in_basis[e] = true;
        self.basis[r] = e;
        self.iterations += 1;
        self.pivots_since_refactor += 1;
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.std.nrows;
        let mut d = vec![0.0; m];
        match self.column(j) {
            ColRef::Unit(row) => {
                for i in 0..m {
                    d[i] = self.binv[i * m + row];
                }
            }
            ColRef::Sparse(col) => {
                for &(row, a) in col {
                    for i in 0..m {
                        d[i] += a * self.binv[i * m + row];
                    }
                }
            }
        }
        d
    }

    fn costs_times_binv(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.std.nrows;
        let mut pi = vec![0.0; m];
        for (i, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                axpy(&mut pi, row, c);
            }
        }
        pi
    }

    /// Rebuild the basis inverse by Gauss-Jordan with partial pivoting and
    /// recompute the basic solution from it.
    fn refactor(&mut self) -> Result<()> {
        let m = self.std.nrows;
        let mut mat = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            match self.column(j) {
                ColRef::Unit(row) => mat[row * m + k] = 1.0,
                ColRef::Sparse(col) => {
                    for &(row, a) in col {
                        mat[row * m + k] = a;
                    }
                }
            }
        }
        let mut inv = identity(m);
        for col in 0..m {
            let mut p = col;
            for i in col + 1..m {
                if mat[i * m + col].abs() > mat[p * m + col].abs() {
                    p = i;
                }
            }
            let pv = mat[p * m + col];
            if pv.abs() < self.cfg.pivot_tol {
                return Err(Error::LpNumerical("singular basis".into()));
            }
            if p != col {
                for k in 0..m {
                    mat.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let inv_pv = 1.0 / pv;
            for k in 0..m {
                mat[col * m + k] *= inv_pv;
                inv[col * m + k] *= inv_pv;
            }
            for i in 0..m {
                if i != col {
                    let f = mat[i * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            mat[i * m + k] -= f * mat[col * m + k];
                            inv[i * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        let mut xb = vec![0.0; m];
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            xb[i] = row
                .iter()
                .zip(&self.std.rhs)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
        self.xb = xb;
        self.pivots_since_refactor = 0;
        Ok(())
    }

    /// Pivot basic artificials out on any usable structural column; rows
    /// that admit none are redundant and keep their artificial at zero.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.std.nrows;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut found = None;
            for (j, col) in self.std.cols.iter().enumerate() {
                if self.in_basis[j] {
                    continue;
                }
                let t: f64 = col.iter().map(|&(i, a)| a * row[i]).sum();
                if t.abs() > 1e-7 {
                    found = Some((j, t));
                    break;
                }
            }
            if let Some((j, _)) = found {
                let d = self.ftran(j);
                let theta = if d[r].abs() > self.cfg.pivot_tol {
                    self.xb[r] / d[r]
                } else {
                    0.0
                };
                self.pivot(r, j, &d, theta.max(0.0));
            }
        }
        Ok(())
    }
}

enum ColRef<'a> {
    Sparse(&'a [(usize, f64)]),
    Unit(usize),
}

impl ColRef<'_> {
    fn dot(&self, dense: &[f64]) -> f64 {
        match self {
            ColRef::Sparse(col) => col.iter().map(|&(i, a)| a * dense[i]).sum(),
            ColRef::Unit(i) => dense[*i],
        }
    }
}

fn identity(m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    v
}

fn axpy(dst: &mut [f64], src: &[f64], a: f64) {
    if a == 0.0 {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += a * s;
    }
}

/// Split a row-major matrix into (rows before r, row r, rows after r).
fn split_row_mut(m: &mut [f64], r: usize, width: usize) -> (&mut [f64], &mut [f64], &mut [f64]) {
    let (head, rest) = m.split_at_mut(r * width);
    let (row, tail) = rest.split_at_mut(width);
    (head, row, tail)
}
