//! Self-contained dense linear-program solver.
//!
//! The solver is deterministic: fixed pivot rules, fixed tie-breaks, no
//! randomization. Two internal routes share one simplex kernel:
//!
//! - the **direct** route converts the program to standard form
//!   (shifts, splits, slacks) and runs a two-phase solve;
//! - the **row-heavy** route, picked automatically when a program has many
//!   more inequality rows than variables and box bounds on every variable,
//!   solves the explicit dual instead (whose row count equals the primal
//!   variable count) and reads the primal solution off the simplex
//!   multipliers. The lattice programs built by the transport module have
//!   thousands of sparse rows over a few hundred variables, which is
//!   exactly the shape this route exists for.
//!
//! All tolerances live in [`LpConfig`].

mod simplex;

use simplex::{CoreOutcome, Simplex, StdForm};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// A sparse constraint row: `sum coeffs . x  <relation>  rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }
}

/// Per-variable bounds; use `f64::NEG_INFINITY` / `f64::INFINITY` for free.
#[derive(Debug, Clone, Copy)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub const UNIT: VarBounds = VarBounds::new(0.0, 1.0);
    pub const NONNEGATIVE: VarBounds = VarBounds::new(0.0, f64::INFINITY);
    pub const FREE: VarBounds = VarBounds::new(f64::NEG_INFINITY, f64::INFINITY);

    pub fn fixed(v: f64) -> Self {
        Self::new(v, v)
    }
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver result. `values` and the certificate are populated only when the
/// status is optimal.
///
/// `dual_certificate[i]` is the multiplier of constraint `i` in its written
/// orientation, signed so that for minimization `Ge` rows carry
/// nonnegative and `Le` rows nonpositive multipliers (flipped under
/// maximization); rows consumed by presolve report zero.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub dual_certificate: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    Auto,
    Direct,
    RowHeavy,
}

/// Centralized solver tolerances and controls.
#[derive(Debug, Clone)]
pub struct LpConfig {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Minimum magnitude accepted for a pivot element.
    pub pivot_tol: f64,
    /// Pivot count after which pricing switches to Bland's rule.
    pub bland_after: usize,
    pub max_iters: usize,
    pub route: RouteChoice,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            pivot_tol: 1e-11,
            bland_after: 5_000,
            max_iters: 1_000_000,
            route: RouteChoice::Auto,
        }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp_solve_with(lp, &LpConfig::default())
}

pub fn lp_solve_with(lp: &LinearProgram, cfg: &LpConfig) -> Result<LpSolution> {
    validate(lp)?;
    let n = lp.objective.len();

    // Work internally as minimization.
    let minimize = lp.sense == Sense::Minimize;
    let objective: Vec<f64> = if minimize {
        lp.objective.clone()
    } else {
        lp.objective.iter().map(|c| -c).collect()
    };

    let pre = match presolve(lp, cfg)? {
        PresolveOutcome::Infeasible => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective_value: 0.0,
                dual_certificate: None,
            })
        }
        PresolveOutcome::Reduced(p) => p,
    };

    let free: Vec<usize> = (0..n).filter(|&j| pre.fixed[j].is_none()).collect();
    if free.is_empty() {
        let values: Vec<f64> = pre.fixed.iter().map(|f| f.unwrap()).collect();
        let objective_value = dot_dense(&lp.objective, &values);
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            values,
            objective_value,
            dual_certificate: Some(vec![0.0; lp.constraints.len()]),
        });
    }

    let route = match cfg.route {
        RouteChoice::Direct => RouteChoice::Direct,
        RouteChoice::RowHeavy => RouteChoice::RowHeavy,
        RouteChoice::Auto => {
            let boxed = free
                .iter()
                .all(|&j| pre.lower[j].is_finite() && pre.upper[j].is_finite());
            let no_eq = pre.rows.iter().all(|r| r.relation != Relation::Eq);
            if boxed && no_eq && pre.rows.len() >= 64.max(3 * free.len()) {
                RouteChoice::RowHeavy
            } else {
                RouteChoice::Direct
            }
        }
    };

    let solved = match route {
        RouteChoice::RowHeavy => solve_row_heavy(&objective, &pre, &free, cfg)?,
        _ => solve_direct(&objective, &pre, &free, cfg)?,
    };

    Ok(assemble(lp, &pre, solved, minimize, cfg))
}

fn validate(lp: &LinearProgram) -> Result<()> {
    let n = lp.objective.len();
    if lp.bounds.len() != n {
        return Err(Error::LpMalformed(format!(
            "{} objective coefficients but {} bound pairs",
            n,
            lp.bounds.len()
        )));
    }
    for (j, c) in lp.objective.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::LpMalformed(format!("objective[{j}] not finite")));
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper {
            return Err(Error::LpMalformed(format!(
                "bad bounds [{}, {}] on variable {j}",
                b.lower, b.upper
            )));
        }
    }
    for (i, row) in lp.constraints.iter().enumerate() {
        if !row.rhs.is_finite() {
            return Err(Error::LpMalformed(format!("rhs of row {i} not finite")));
        }
        for &(j, a) in &row.coeffs {
            if j >= n {
                return Err(Error::LpMalformed(format!(
                    "row {i} references variable {j} out of {n}"
                )));
            }
            if !a.is_finite() {
                return Err(Error::LpMalformed(format!(
                    "row {i} has non-finite coefficient on variable {j}"
                )));
            }
        }
    }
    Ok(())
}

struct Presolved {
    fixed: Vec<Option<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Surviving rows with fixed variables substituted into the rhs.
    rows: Vec<PresolvedRow>,
}

#[derive(Debug, Clone)]
struct PresolvedRow {
    orig: usize,
    coeffs: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

enum PresolveOutcome {
    Infeasible,
    Reduced(Presolved),
}

/// Fix variables pinned by their bounds or by single-variable equality
/// rows, substituting them away. Inequality rows are left intact so their
/// multipliers stay meaningful.
fn presolve(lp: &LinearProgram, cfg: &LpConfig) -> Result<PresolveOutcome> {
    let n = lp.objective.len();
    let mut lower: Vec<f64> = lp.bounds.iter().map(|b| b.lower).collect();
    let mut upper: Vec<f64> = lp.bounds.iter().map(|b| b.upper).collect();
    let mut fixed: Vec<Option<f64>> = (0..n)
        .map(|j| (lower[j] == upper[j]).then_some(lower[j]))
        .collect();
    let mut consumed = vec![false; lp.constraints.len()];
    let mut rows: Vec<PresolvedRow> = Vec::new();

    loop {
        let mut changed = false;
        rows.clear();
        for (i, row) in lp.constraints.iter().enumerate() {
            if consumed[i] {
                continue;
            }
            let mut rhs = row.rhs;
            let mut live: Vec<(usize, f64)> = Vec::with_capacity(row.coeffs.len());
            for &(j, a) in &row.coeffs {
                match fixed[j] {
                    Some(v) => rhs -= a * v,
                    None => live.push((j, a)),
                }
            }
            match live.len() {
                0 => {
                    let ok = match row.relation {
                        Relation::Eq => rhs.abs() <= cfg.feasibility_tol,
                        Relation::Le => rhs >= -cfg.feasibility_tol,
                        Relation::Ge => rhs <= cfg.feasibility_tol,
                    };
                    if !ok {
                        return Ok(PresolveOutcome::Infeasible);
                    }
                    consumed[i] = true;
                    changed = true;
                }
                1 if row.relation == Relation::Eq && live[0].1.abs() > cfg.pivot_tol => {
                    let (j, a) = live[0];
                    let v = rhs / a;
                    if v < lower[j] - cfg.feasibility_tol || v > upper[j] + cfg.feasibility_tol {
                        return Ok(PresolveOutcome::Infeasible);
                    }
                    let v = v.clamp(lower[j], upper[j]);
                    fixed[j] = Some(v);
                    lower[j] = v;
                    upper[j] = v;
                    consumed[i] = true;
                    changed = true;
                }
                _ => rows.push(PresolvedRow {
                    orig: i,
                    coeffs: live,
                    relation: row.relation,
                    rhs,
                }),
            }
        }
        if !changed {
            break;
        }
    }

    Ok(PresolveOutcome::Reduced(Presolved {
        fixed,
        lower,
        upper,
        rows,
    }))
}

/// Solution of the reduced problem over the free variables.
struct RouteSolution {
    status: LpStatus,
    /// Values per free variable (same order as the `free` list).
    values: Vec<f64>,
    /// Multiplier per surviving row.
    row_duals: Vec<f64>,
}

/// Standard-form construction: shift finite lower bounds to zero, mirror
/// upper-bounded-only variables, split doubly-free ones, add slack or
/// surplus per row plus explicit rows for finite upper bounds.
fn solve_direct(
    objective: &[f64],
    pre: &Presolved,
    free: &[usize],
    cfg: &LpConfig,
) -> Result<RouteSolution> {
    #[derive(Clone, Copy)]
    enum VarMap {
        // x = lower + s
        Shift(usize),
        // x = upper - s
        Mirror(usize),
        // x = s_plus - s_minus
        Split(usize, usize),
    }

    let mut cols: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut maps: Vec<VarMap> = Vec::with_capacity(free.len());
    let mut upper_rows: Vec<(usize, f64)> = Vec::new(); // (std var, cap)

    for &j in free {
        let (lo, up) = (pre.lower[j], pre.upper[j]);
        let c = objective[j];
        if lo.is_finite() {
            let s = cols.len();
            cols.push(Vec::new());
            costs.push(c);
            maps.push(VarMap::Shift(s));
            if up.is_finite() {
                upper_rows.push((s, up - lo));
            }
        } else if up.is_finite() {
            let s = cols.len();
            cols.push(Vec::new());
            costs.push(-c);
            maps.push(VarMap::Mirror(s));
        } else {
            let p = cols.len();
            cols.push(Vec::new());
            cols.push(Vec::new());
            costs.push(c);
            costs.push(-c);
            maps.push(VarMap::Split(p, p + 1));
        }
    }

    let col_of = |j_free: usize, maps: &[VarMap]| -> Vec<(usize, f64)> {
        match maps[j_free] {
            VarMap::Shift(s) => vec![(s, 1.0)],
            VarMap::Mirror(s) => vec![(s, -1.0)],
            VarMap::Split(p, q) => vec![(p, 1.0), (q, -1.0)],
        }
    };

    let free_pos: std::collections::HashMap<usize, usize> =
        free.iter().enumerate().map(|(k, &j)| (j, k)).collect();

    // Assemble rows in standard orientation.
    struct StdRow {
        terms: Vec<(usize, f64)>, // std var -> coefficient
        relation: Relation,
        rhs: f64,
        orig: Option<usize>, // index into pre.rows
        negated: bool,
    }
    let mut std_rows: Vec<StdRow> = Vec::new();
    for (ri, row) in pre.rows.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        let mut rhs = row.rhs;
        for &(j, a) in &row.coeffs {
            let k = free_pos[&j];
            for (s, f) in col_of(k, &maps) {
                terms.push((s, a * f));
            }
            match maps[k] {
                VarMap::Shift(_) => rhs -= a * pre.lower[j],
                VarMap::Mirror(_) => rhs -= a * pre.upper[j],
                VarMap::Split(..) => {}
            }
        }
        std_rows.push(StdRow {
            terms,
            relation: row.relation,
            rhs,
            orig: Some(ri),
            negated: false,
        });
    }
    for &(s, cap) in &upper_rows {
        std_rows.push(StdRow {
            terms: vec![(s, 1.0)],
            relation: Relation::Le,
            rhs: cap,
            orig: None,
            negated: false,
        });
    }

    // Normalize to nonnegative rhs and add slack/surplus columns.
    let nrows = std_rows.len();
    for row in &mut std_rows {
        if row.rhs < 0.0 {
            row.rhs = -row.rhs;
            for t in &mut row.terms {
                t.1 = -t.1;
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            row.negated = true;
        }
    }
    for (i, row) in std_rows.iter().enumerate() {
        match row.relation {
            Relation::Le => {
                cols.push(vec![(i, 1.0)]);
                costs.push(0.0);
            }
            Relation::Ge => {
                cols.push(vec![(i, -1.0)]);
                costs.push(0.0);
            }
            Relation::Eq => {}
        }
    }

    let mut dense_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols.len()];
    for (i, row) in std_rows.iter().enumerate() {
        for &(s, a) in &row.terms {
            if a != 0.0 {
                dense_cols[s].push((i, a));
            }
        }
    }
    // Merge in slack columns (already positioned after structural ones).
    let n_struct = cols.len() - std_rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let mut slack_iter = n_struct;
    for (i, row) in std_rows.iter().enumerate() {
        match row.relation {
            Relation::Le => {
                dense_cols[slack_iter] = vec![(i, 1.0)];
                slack_iter += 1;
            }
            Relation::Ge => {
                dense_cols[slack_iter] = vec![(i, -1.0)];
                slack_iter += 1;
            }
            Relation::Eq => {}
        }
    }
    for col in &mut dense_cols {
        col.sort_by_key(|&(i, _)| i);
    }

    let std = StdForm {
        nrows,
        cols: dense_cols,
        costs,
        rhs: std_rows.iter().map(|r| r.rhs).collect(),
    };
    let core = Simplex::solve_two_phase(&std, cfg)?;

    match core.outcome {
        CoreOutcome::Infeasible => Ok(RouteSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            row_duals: Vec::new(),
        }),
        CoreOutcome::Unbounded => Ok(RouteSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            row_duals: Vec::new(),
        }),
        CoreOutcome::Optimal => {
            let mut values = vec![0.0; free.len()];
            for (k, &j) in free.iter().enumerate() {
                values[k] = match maps[k] {
                    VarMap::Shift(s) => pre.lower[j] + core.x[s],
                    VarMap::Mirror(s) => pre.upper[j] - core.x[s],
                    VarMap::Split(p, q) => core.x[p] - core.x[q],
                };
            }
            let mut row_duals = vec![0.0; pre.rows.len()];
            for (i, row) in std_rows.iter().enumerate() {
                if let Some(ri) = row.orig {
                    let sign = if row.negated { -1.0 } else { 1.0 };
                    row_duals[ri] = sign * core.multipliers[i];
                }
            }
            Ok(RouteSolution {
                status: LpStatus::Optimal,
                values,
                row_duals,
            })
        }
    }
}

/// Row-heavy route: solve the dual of
/// `min c.x  s.t.  A x >= b,  0 <= xhat <= u` (after Ge-normalization and a
/// shift to zero lower bounds), namely
/// `max b.y - u.z  s.t.  A^T y - z + w = c,  y, z, w >= 0`.
///
/// The dual has one equality row per primal variable, which keeps the basis
/// small, and admits the explicit starting basis `{w_j or z_j}`. At
/// optimality the primal solution is read off the simplex multipliers:
/// `xhat = -pi`.
fn solve_row_heavy(
    objective: &[f64],
    pre: &Presolved,
    free: &[usize],
    cfg: &LpConfig,
) -> Result<RouteSolution> {
    let nfree = free.len();
    let free_pos: std::collections::HashMap<usize, usize> =
        free.iter().enumerate().map(|(k, &j)| (j, k)).collect();

    // Ge-normalized rows over shifted variables.
    struct GeRow {
        coeffs: Vec<(usize, f64)>, // free index -> coefficient
        rhs: f64,
        negated: bool,
    }
    let mut ge_rows: Vec<GeRow> = Vec::with_capacity(pre.rows.len());
    for row in &pre.rows {
        debug_assert!(row.relation != Relation::Eq);
        let sign = if row.relation == Relation::Le { -1.0 } else { 1.0 };
        let mut rhs = sign * row.rhs;
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        for &(j, a) in &row.coeffs {
            let k = free_pos[&j];
            let c = sign * a;
            coeffs.push((k, c));
            rhs -= c * pre.lower[j];
        }
        ge_rows.push(GeRow {
            coeffs,
            rhs,
            negated: sign < 0.0,
        });
    }

    let caps: Vec<f64> = free.iter().map(|&j| pre.upper[j] - pre.lower[j]).collect();
    let red_costs: Vec<f64> = free.iter().map(|&j| objective[j]).collect();

    // Dual standard form, minimized: costs are (-b | u | 0) on (y | z | w).
    let m = ge_rows.len();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m + 2 * nfree);
    let mut costs: Vec<f64> = Vec::with_capacity(m + 2 * nfree);
    for row in &ge_rows {
        let mut col: Vec<(usize, f64)> = row.coeffs.iter().map(|&(k, a)| (k, a)).collect();
        col.sort_by_key(|&(k, _)| k);
        cols.push(col);
        costs.push(-row.rhs);
    }
    for (k, &cap) in caps.iter().enumerate() {
        cols.push(vec![(k, -1.0)]);
        costs.push(cap);
    }
    for k in 0..nfree {
        cols.push(vec![(k, 1.0)]);
        costs.push(0.0);
    }

    let std = StdForm {
        nrows: nfree,
        cols,
        costs,
        rhs: red_costs.clone(),
    };
    let basis: Vec<usize> = (0..nfree)
        .map(|k| {
            if red_costs[k] >= 0.0 {
                m + nfree + k // w_k
            } else {
                m + k // z_k
            }
        })
        .collect();

    let core = Simplex::solve_with_basis(&std, basis, cfg)?;
    match core.outcome {
        CoreOutcome::Unbounded => Ok(RouteSolution {
            // Dual unbounded while the primal has a compact feasible box:
            // the primal is infeasible.
            status: LpStatus::Infeasible,
            values: Vec::new(),
            row_duals: Vec::new(),
        }),
        CoreOutcome::Infeasible => Err(Error::LpNumerical(
            "dual with explicit basis reported infeasible".into(),
        )),
        CoreOutcome::Optimal => {
            let values: Vec<f64> = free
                .iter()
                .enumerate()
                .map(|(k, &j)| {
                    let xhat = (-core.multipliers[k]).clamp(0.0, caps[k]);
                    pre.lower[j] + xhat
                })
                .collect();
            // Feasibility of the recovered point against every row.
            for (row, ge) in pre.rows.iter().zip(&ge_rows) {
                let mut lhs = 0.0;
                for &(k, a) in &ge.coeffs {
                    lhs += a * (values[k] - pre.lower[free[k]]);
                }
                let scale = 1.0 + ge.rhs.abs();
                if lhs < ge.rhs - cfg.feasibility_tol * scale * 10.0 {
                    return Err(Error::LpNumerical(format!(
                        "recovered primal violates row {} by {:e}",
                        row.orig,
                        ge.rhs - lhs
                    )));
                }
            }
            let row_duals: Vec<f64> = ge_rows
                .iter()
                .zip(&core.x)
                .map(|(ge, &y)| if ge.negated { -y } else { y })
                .collect();
            Ok(RouteSolution {
                status: LpStatus::Optimal,
                values,
                row_duals,
            })
        }
    }
}

fn assemble(
    lp: &LinearProgram,
    pre: &Presolved,
    solved: RouteSolution,
    minimize: bool,
    _cfg: &LpConfig,
) -> LpSolution {
    match solved.status {
        LpStatus::Optimal => {
            let n = lp.objective.len();
            let mut values = vec![0.0; n];
            let mut k = 0;
            for j in 0..n {
                values[j] = match pre.fixed[j] {
                    Some(v) => v,
                    None => {
                        let v = solved.values[k];
                        k += 1;
                        v
                    }
                };
            }
            let objective_value = dot_dense(&lp.objective, &values);
            let mut duals = vec![0.0; lp.constraints.len()];
            for (row, &d) in pre.rows.iter().zip(&solved.row_duals) {
                duals[row.orig] = if minimize { d } else { -d };
            }
            LpSolution {
                status: LpStatus::Optimal,
                values,
                objective_value,
                dual_certificate: Some(duals),
            }
        }
        status => LpSolution {
            status,
            values: Vec::new(),
            objective_value: 0.0,
            dual_certificate: None,
        },
    }
}

fn dot_dense(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residuals of an optimal solution against its program, for verification.
#[derive(Debug, Clone, Copy)]
pub struct LpResiduals {
    /// Largest constraint or bound violation.
    pub primal_infeasibility: f64,
    /// Largest `|dual_i * slack_i|` over the constraints.
    pub complementary_slackness: f64,
}

pub fn lp_residuals(lp: &LinearProgram, sol: &LpSolution) -> LpResiduals {
    let mut infeas: f64 = 0.0;
    let mut cs: f64 = 0.0;
    if sol.status != LpStatus::Optimal {
        return LpResiduals {
            primal_infeasibility: f64::INFINITY,
            complementary_slackness: f64::INFINITY,
        };
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        let v = sol.values[j];
        if b.lower.is_finite() {
            infeas = infeas.max(b.lower - v);
        }
        if b.upper.is_finite() {
            infeas = infeas.max(v - b.upper);
        }
    }
    let duals = sol.dual_certificate.as_ref();
    for (i, row) in lp.constraints.iter().enumerate() {
        let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * sol.values[j]).sum();
        let slack = lhs - row.rhs;
        let viol = match row.relation {
            Relation::Eq => slack.abs(),
            Relation::Le => slack.max(0.0),
            Relation::Ge => (-slack).max(0.0),
        };
        infeas = infeas.max(viol);
        if let Some(d) = duals {
            cs = cs.max((d[i] * slack).abs());
        }
    }
    LpResiduals {
        primal_infeasibility: infeas,
        complementary_slackness: cs,
    }
}
