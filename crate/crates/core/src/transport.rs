//! The Kantorovich problem between two marginal capacities.
//!
//! A transport plan for `(mu, nu)` is a capacity `pi` on `X x Y` whose
//! cylinder values reproduce the marginals: `pi(A x Y) = mu(A)` and
//! `pi(X x B) = nu(B)` for every `A`, `B`. Its cost is the Choquet integral
//! of the cost matrix against `pi`, which is *linear* in the plan values on
//! the chain of cost superlevel sets. That linearity is what turns exact
//! minimization over the plan classes
//!
//! - `Ch`  — all transport plans, and
//! - `Ch*` — the supermodular transport plans
//!
//! into a finite linear program over the subset lattice of the product
//! ground set: box bounds plus cover-monotonicity rows, marginal fixings,
//! and (for `Ch*`) local supermodularity rows.
//!
//! Product cells are indexed row-major throughout: `(i, j) -> i*m + j`.

use crate::choquet::{choquet_integral, RandomVariable};
use crate::linprog::{
    lp_solve_with, Constraint, LinearProgram, LpConfig, LpStatus, Relation, Sense, VarBounds,
};
use crate::setfunc::{product_ground, Capacity, DistortionSpec, GroundSet, SubsetMask};
use crate::{Error, Result};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Storage guard: `2^(n*m)` plan values are materialized.
pub const MAX_CELLS: usize = 16;
/// Tighter default guard for `Ch*` solves (the supermodularity rows grow as
/// `C(nm,2) * 2^(nm-2)`).
pub const MAX_CELLS_SUPERMODULAR: usize = 12;
/// Tolerance used when validating solver output plans (classification and
/// marginal checks); wider than the construction tolerance to absorb LP
/// round-off.
pub const PLAN_TOL: f64 = 1e-9;

/// Nonnegative finite cost matrix on `X x Y`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    m: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * m {
            return Err(Error::ValueCount {
                expected: n * m,
                got: entries.len(),
            });
        }
        for i in 0..n {
            for j in 0..m {
                let v = entries[i * m + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::BadCost { i, j, value: v });
                }
            }
        }
        Ok(Self { n, m, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::LpMalformed("ragged cost matrix".into()));
        }
        Self::new(n, m, rows.concat())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Two marginal capacities plus a cost matrix on the product ground set.
#[derive(Debug, Clone)]
pub struct TransportInstance {
    x: GroundSet,
    y: GroundSet,
    cost: CostMatrix,
    mu: Capacity,
    nu: Capacity,
}

impl TransportInstance {
    pub fn new(cost: CostMatrix, mu: Capacity, nu: Capacity) -> Result<Self> {
        let (n, m) = cost.shape();
        if mu.ground().size() != n || nu.ground().size() != m {
            return Err(Error::GroundMismatch);
        }
        if n * m > MAX_CELLS {
            return Err(Error::SizeGuard {
                cells: n * m,
                limit: MAX_CELLS,
            });
        }
        Ok(Self {
            x: mu.ground().clone(),
            y: nu.ground().clone(),
            cost,
            mu,
            nu,
        })
    }

    pub fn x(&self) -> &GroundSet {
        &self.x
    }

    pub fn y(&self) -> &GroundSet {
        &self.y
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    pub fn mu(&self) -> &Capacity {
        &self.mu
    }

    pub fn nu(&self) -> &Capacity {
        &self.nu
    }

    pub fn cells(&self) -> usize {
        self.x.size() * self.y.size()
    }

    pub fn product_ground(&self) -> Result<GroundSet> {
        product_ground(&self.x, &self.y)
    }

    /// The flattened cost as a random variable on the product ground set.
    pub fn cost_variable(&self) -> Result<RandomVariable> {
        RandomVariable::new(self.product_ground()?, self.cost.entries.clone())
    }
}

/// Rectangle `A x B` as a product-set mask.
pub fn rect_mask(a: SubsetMask, b: SubsetMask, n: usize, m: usize) -> SubsetMask {
    let mut w = 0u32;
    for i in 0..n {
        if a.contains(i) {
            for j in 0..m {
                if b.contains(j) {
                    w |= 1 << (i * m + j);
                }
            }
        }
    }
    SubsetMask(w)
}

/// Cylinder `A x Y`.
pub fn cylinder_x(a: SubsetMask, n: usize, m: usize) -> SubsetMask {
    rect_mask(a, SubsetMask::full(m), n, m)
}

/// Cylinder `X x B`.
pub fn cylinder_y(b: SubsetMask, n: usize, m: usize) -> SubsetMask {
    rect_mask(SubsetMask::full(n), b, n, m)
}

/// Which plan class a plan claims to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanClass {
    /// Any transport plan.
    Ch,
    /// Supermodular transport plans.
    ChStar,
}

/// A capacity on the product ground set tagged with its plan class.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    x: GroundSet,
    y: GroundSet,
    plan: Capacity,
    class: PlanClass,
}

impl TransportPlan {
    /// Wrap a product-lattice capacity as a plan. A `ChStar` tag requires
    /// the capacity to classify supermodular within [`PLAN_TOL`].
    pub fn new(x: GroundSet, y: GroundSet, plan: Capacity, class: PlanClass) -> Result<Self> {
        let expected = product_ground(&x, &y)?;
        if plan.ground() != &expected {
            return Err(Error::GroundMismatch);
        }
        if class == PlanClass::ChStar {
            let k = plan.classify_with_tol(PLAN_TOL);
            if !k.supermodular {
                let (s, i, j) = k.supermodular_witness.expect("witness on failure");
                return Err(Error::PlanValidation(Box::new(Error::NotMonotone {
                    lo: s.with(i),
                    hi: s.with(i).with(j),
                    lo_value: plan.value(s.with(i)) - plan.value(s),
                    hi_value: plan.value(s.with(i).with(j)) - plan.value(s.with(j)),
                })));
            }
        }
        Ok(Self { x, y, plan, class })
    }

    pub fn x(&self) -> &GroundSet {
        &self.x
    }

    pub fn y(&self) -> &GroundSet {
        &self.y
    }

    pub fn capacity(&self) -> &Capacity {
        &self.plan
    }

    pub fn class(&self) -> PlanClass {
        self.class
    }

    pub fn value(&self, w: SubsetMask) -> f64 {
        self.plan.value(w)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x.size(), self.y.size())
    }
}

/// Marginals as push-forwards under the canonical projections:
/// the X-marginal takes `A -> pi(A x Y)`, the Y-marginal `B -> pi(X x B)`.
pub fn marginals(plan: &TransportPlan) -> Result<(Capacity, Capacity)> {
    let (n, m) = plan.shape();
    let mx = (0..1u32 << n)
        .map(|a| plan.value(cylinder_x(SubsetMask(a), n, m)))
        .collect();
    let my = (0..1u32 << m)
        .map(|b| plan.value(cylinder_y(SubsetMask(b), n, m)))
        .collect();
    Ok((
        Capacity::from_values(plan.x.clone(), mx)?,
        Capacity::from_values(plan.y.clone(), my)?,
    ))
}

/// Outcome of a marginal check.
#[derive(Debug, Clone)]
pub struct MarginalReport {
    pub is_plan: bool,
    /// Worst absolute deviation over all cylinder subsets.
    pub worst_deviation: f64,
    /// The subset (side, mask) realizing it.
    pub worst_subset: (char, SubsetMask),
    /// Worst deviation of the cylinder-lift functional cross-check
    /// `(C)int ubar dpi = (C)int u dmu` over the sampled test functions.
    pub worst_functional_deviation: f64,
}

/// Check the marginal identities subset by subset, then cross-check them at
/// the functional level with 50 sampled test functions per side, lifted to
/// the product set as `ubar(x,y) = u(x)` and `wbar(x,y) = w(y)`.
pub fn is_transport_plan(
    plan: &TransportPlan,
    mu: &Capacity,
    nu: &Capacity,
    tol: f64,
) -> Result<MarginalReport> {
    let (n, m) = plan.shape();
    if mu.ground() != &plan.x || nu.ground() != &plan.y {
        return Err(Error::GroundMismatch);
    }
    let mut worst = 0.0;
    let mut worst_subset = ('x', SubsetMask::EMPTY);
    for a in mu.ground().subsets() {
        let dev = (plan.value(cylinder_x(a, n, m)) - mu.value(a)).abs();
        if dev > worst {
            worst = dev;
            worst_subset = ('x', a);
        }
    }
    for b in nu.ground().subsets() {
        let dev = (plan.value(cylinder_y(b, n, m)) - nu.value(b)).abs();
        if dev > worst {
            worst = dev;
            worst_subset = ('y', b);
        }
    }

    let product = plan.plan.ground().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c0c_0c0c);
    let mut worst_fn = 0.0_f64;
    for _ in 0..50 {
        let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        let mut ubar = vec![0.0; n * m];
        let mut wbar = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..m {
                ubar[i * m + j] = u[i];
                wbar[i * m + j] = w[j];
            }
        }
        let lift_u = RandomVariable::new(product.clone(), ubar)?;
        let lift_w = RandomVariable::new(product.clone(), wbar)?;
        let u_rv = RandomVariable::new(plan.x.clone(), u)?;
        let w_rv = RandomVariable::new(plan.y.clone(), w)?;
        let du = choquet_integral(&lift_u, &plan.plan)? - choquet_integral(&u_rv, mu)?;
        let dw = choquet_integral(&lift_w, &plan.plan)? - choquet_integral(&w_rv, nu)?;
        worst_fn = worst_fn.max(du.abs()).max(dw.abs());
    }

    Ok(MarginalReport {
        is_plan: worst <= tol && worst_fn <= tol.max(1e-9),
        worst_deviation: worst,
        worst_subset,
        worst_functional_deviation: worst_fn,
    })
}

/// Plan cost: the Choquet integral of the flattened cost against the plan.
pub fn plan_cost(inst: &TransportInstance, plan: &TransportPlan) -> Result<f64> {
    choquet_integral(&inst.cost_variable()?, plan.capacity())
}

/// The chain of cost superlevel sets: distinct positive thresholds
/// `t_1 < ... < t_K` with masks `L_k = {(i,j) : c(i,j) >= t_k}`.
pub fn cost_levels(cost: &CostMatrix) -> Vec<(f64, SubsetMask)> {
    let (n, m) = cost.shape();
    let mut ts: Vec<f64> = cost
        .entries()
        .iter()
        .copied()
        .filter(|&t| t > 0.0)
        .collect();
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite costs"));
    ts.dedup();
    ts.into_iter()
        .map(|t| {
            let mut w = 0u32;
            for idx in 0..n * m {
                if cost.entries()[idx] >= t {
                    w |= 1 << idx;
                }
            }
            (t, SubsetMask(w))
        })
        .collect()
}

/// Plan cost by the level decomposition
/// `sum_k (t_k - t_{k-1}) * pi(L_k)`, linear in the plan values.
pub fn plan_cost_linear(inst: &TransportInstance, plan: &TransportPlan) -> f64 {
    let mut prev = 0.0;
    let mut total = 0.0;
    for (t, level) in cost_levels(&inst.cost) {
        total += (t - prev) * plan.value(level);
        prev = t;
    }
    total
}

/// The distorted product plan `W -> u(sum_{(i,j) in W} P_i Q_j)` with
/// `u(t) = t^alpha`, `alpha >= 1`. Its marginals are the distorted
/// probabilities `P^alpha` and `Q^alpha`, and it is supermodular.
pub fn distorted_product_plan(
    x: GroundSet,
    y: GroundSet,
    p: &[f64],
    q: &[f64],
    alpha: f64,
) -> Result<TransportPlan> {
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(Error::BadDistortion(format!(
            "plan distortion exponent must be >= 1, got {alpha}"
        )));
    }
    let n = x.size();
    let m = y.size();
    if p.len() != n || q.len() != m {
        return Err(Error::GroundMismatch);
    }
    if n * m > MAX_CELLS {
        return Err(Error::SizeGuard {
            cells: n * m,
            limit: MAX_CELLS,
        });
    }
    let mut cell_weights = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            cell_weights[i * m + j] = p[i] * q[j];
        }
    }
    let spec = DistortionSpec::power(cell_weights, alpha)?;
    let plan = Capacity::distorted(product_ground(&x, &y)?, &spec)?;
    TransportPlan::new(x, y, plan, PlanClass::ChStar)
}

/// The plan induced by an element map `T : X -> Y`:
/// `pi_T(W) = mu({x : (x, T(x)) in W})`. Its marginals are `mu` and the
/// push-forward of `mu` through `T`.
pub fn plan_from_map(mu: &Capacity, map: &[usize], y: GroundSet) -> Result<TransportPlan> {
    let n = mu.ground().size();
    let m = y.size();
    if n * m > MAX_CELLS {
        return Err(Error::SizeGuard {
            cells: n * m,
            limit: MAX_CELLS,
        });
    }
    for (i, &t) in map.iter().enumerate() {
        if t >= m {
            return Err(Error::MapOutOfRange {
                index: i,
                target: t,
                size: m,
            });
        }
    }
    let graph_map: Vec<usize> = map.iter().enumerate().map(|(i, &t)| i * m + t).collect();
    let plan = mu.push_forward(&graph_map, product_ground(mu.ground(), &y)?)?;
    TransportPlan::new(mu.ground().clone(), y, plan, PlanClass::Ch)
}

/// The coordinatewise-minimal transport plan for `(mu, nu)`:
/// `v(W) = max(mu(A_W), nu(B_W))` where `A_W` collects the rows fully
/// contained in `W` and `B_W` the full columns. Any plan dominates it
/// pointwise, so against nonnegative costs it is `Ch`-optimal; it also
/// witnesses that the class `Ch` is never empty.
pub fn lower_envelope_plan(mu: &Capacity, nu: &Capacity) -> Result<TransportPlan> {
    let n = mu.ground().size();
    let m = nu.ground().size();
    if n * m > MAX_CELLS {
        return Err(Error::SizeGuard {
            cells: n * m,
            limit: MAX_CELLS,
        });
    }
    let values = (0..1u64 << (n * m))
        .map(|w| {
            let w = w as u32;
            let mut a = SubsetMask::EMPTY;
            for i in 0..n {
                let row = (w >> (i * m)) & ((1u32 << m) - 1);
                if row == (1u32 << m) - 1 {
                    a = a.with(i);
                }
            }
            let mut b = SubsetMask::EMPTY;
            for j in 0..m {
                if (0..n).all(|i| w >> (i * m + j) & 1 == 1) {
                    b = b.with(j);
                }
            }
            mu.value(a).max(nu.value(b))
        })
        .collect();
    let plan = Capacity::from_values(product_ground(mu.ground(), nu.ground())?, values)?;
    TransportPlan::new(
        mu.ground().clone(),
        nu.ground().clone(),
        plan,
        PlanClass::Ch,
    )
}

/// Build the lattice linear program for one plan class.
///
/// Variables are the plan values at every product-set mask with bounds
/// `[0,1]`; the empty and full masks are pinned by their bounds. Rows:
/// marginal equalities on the nontrivial cylinders, cover monotonicity
/// `v(S) <= v(S+e)` for every `(S, e)`, and for `ChStar` the local
/// supermodularity rows `v(S+e+f) - v(S+e) - v(S+f) + v(S) >= 0`. The
/// objective is the cost level decomposition.
pub fn build_lp(inst: &TransportInstance, class: PlanClass) -> Result<LinearProgram> {
    build_lp_with(inst, class, None)
}

pub fn build_lp_with(
    inst: &TransportInstance,
    class: PlanClass,
    max_cells: Option<usize>,
) -> Result<LinearProgram> {
    let n = inst.x.size();
    let m = inst.y.size();
    let cells = n * m;
    let guard = max_cells.unwrap_or(match class {
        PlanClass::Ch => MAX_CELLS,
        PlanClass::ChStar => MAX_CELLS_SUPERMODULAR,
    });
    if cells > guard.min(MAX_CELLS) {
        return Err(Error::SizeGuard {
            cells,
            limit: guard.min(MAX_CELLS),
        });
    }
    let nvars = 1usize << cells;
    let full = nvars - 1;

    let mut objective = vec![0.0; nvars];
    let mut prev = 0.0;
    for (t, level) in cost_levels(&inst.cost) {
        objective[level.index()] = t - prev;
        prev = t;
    }

    let mut bounds = vec![VarBounds::UNIT; nvars];
    bounds[0] = VarBounds::fixed(0.0);
    bounds[full] = VarBounds::fixed(1.0);

    let mut constraints = Vec::new();
    for a in 1..(1u32 << n) - 1 {
        let w = cylinder_x(SubsetMask(a), n, m);
        constraints.push(Constraint::new(
            vec![(w.index(), 1.0)],
            Relation::Eq,
            inst.mu.value(SubsetMask(a)),
        ));
    }
    for b in 1..(1u32 << m) - 1 {
        let w = cylinder_y(SubsetMask(b), n, m);
        constraints.push(Constraint::new(
            vec![(w.index(), 1.0)],
            Relation::Eq,
            inst.nu.value(SubsetMask(b)),
        ));
    }
    for s in 0..nvars as u32 {
        for e in 0..cells {
            if s >> e & 1 == 0 {
                let t = s | 1 << e;
                constraints.push(Constraint::new(
                    vec![(t as usize, 1.0), (s as usize, -1.0)],
                    Relation::Ge,
                    0.0,
                ));
            }
        }
    }
    if class == PlanClass::ChStar {
        for s in 0..nvars as u32 {
            for e in 0..cells {
                if s >> e & 1 == 1 {
                    continue;
                }
                for f in e + 1..cells {
                    if s >> f & 1 == 1 {
                        continue;
                    }
                    let se = s | 1 << e;
                    let sf = s | 1 << f;
                    let sef = se | 1 << f;
                    constraints.push(Constraint::new(
                        vec![
                            (sef as usize, 1.0),
                            (se as usize, -1.0),
                            (sf as usize, -1.0),
                            (s as usize, 1.0),
                        ],
                        Relation::Ge,
                        0.0,
                    ));
                }
            }
        }
    }

    Ok(LinearProgram {
        sense: Sense::Minimize,
        objective,
        constraints,
        bounds,
    })
}

/// Result of an exact solve over a plan class.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Optimal { plan: TransportPlan, cost: f64 },
    /// The plan class is empty for these marginals (meaningful for `Ch*`;
    /// the LP infeasibility is reported as-is).
    EmptyClass,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Override the per-class cell guard (the `2^(n m)` storage cap still
    /// applies).
    pub max_cells: Option<usize>,
    pub lp: Option<LpConfig>,
}

pub fn solve_optimal(inst: &TransportInstance, class: PlanClass) -> Result<SolveOutcome> {
    solve_optimal_with(inst, class, &SolveOptions::default())
}

pub fn solve_optimal_with(
    inst: &TransportInstance,
    class: PlanClass,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    let lp = build_lp_with(inst, class, opts.max_cells)?;
    let cfg = opts.lp.clone().unwrap_or_default();
    let sol = lp_solve_with(&lp, &cfg)?;
    match sol.status {
        LpStatus::Infeasible => Ok(SolveOutcome::EmptyClass),
        LpStatus::Unbounded => Err(Error::LpNumerical(
            "transport program reported unbounded".into(),
        )),
        LpStatus::Optimal => {
            let n = inst.x.size();
            let m = inst.y.size();
            let values = repair_lattice_values(sol.values, inst, n, m);
            let plan_cap = Capacity::from_values(inst.product_ground()?, values)
                .map_err(|e| Error::PlanValidation(Box::new(e)))?;
            let plan = TransportPlan::new(inst.x.clone(), inst.y.clone(), plan_cap, class)?;
            let report = is_transport_plan(&plan, &inst.mu, &inst.nu, PLAN_TOL)?;
            if !report.is_plan {
                return Err(Error::PlanValidation(Box::new(Error::LpNumerical(
                    format!(
                        "solved plan misses marginals by {:e}",
                        report.worst_deviation
                    ),
                ))));
            }
            Ok(SolveOutcome::Optimal {
                plan,
                cost: sol.objective_value,
            })
        }
    }
}

/// Clean LP round-off out of a lattice solution: clamp every value between
/// the exact pinned values below and above it (endpoints and marginal
/// cylinders, which presolve fixed exactly), then run one descending
/// min-sweep, which restores cover monotonicity without touching the pins.
fn repair_lattice_values(
    mut v: Vec<f64>,
    inst: &TransportInstance,
    n: usize,
    m: usize,
) -> Vec<f64> {
    let cells = n * m;
    let nvars = 1usize << cells;
    let mut pin = vec![None; nvars];
    pin[0] = Some(0.0);
    pin[nvars - 1] = Some(1.0);
    for a in 0..1u32 << n {
        pin[cylinder_x(SubsetMask(a), n, m).index()] = Some(inst.mu.value(SubsetMask(a)));
    }
    for b in 0..1u32 << m {
        pin[cylinder_y(SubsetMask(b), n, m).index()] = Some(inst.nu.value(SubsetMask(b)));
    }

    let mut low = vec![0.0_f64; nvars];
    let mut high = vec![1.0_f64; nvars];
    for s in 0..nvars {
        if let Some(p) = pin[s] {
            low[s] = p;
        }
        for e in 0..cells {
            if s >> e & 1 == 1 {
                low[s] = low[s].max(low[s & !(1 << e)]);
            }
        }
    }
    for s in (0..nvars).rev() {
        if let Some(p) = pin[s] {
            high[s] = p;
        }
        for e in 0..cells {
            if s >> e & 1 == 0 {
                high[s] = high[s].min(high[s | 1 << e]);
            }
        }
    }
    for s in 0..nvars {
        v[s] = match pin[s] {
            Some(p) => p,
            None => v[s].clamp(low[s], high[s]),
        };
    }
    // Descending min-sweep: afterwards v(S) <= v(S+e) holds for every cover.
    for s in (0..nvars).rev() {
        for e in 0..cells {
            if s >> e & 1 == 0 {
                let t = s | 1 << e;
                if v[s] > v[t] {
                    v[s] = v[t];
                }
            }
        }
    }
    v
}

/// The classical transportation LP over additive plans; requires additive
/// marginals (checked subset by subset against the singleton weights).
pub fn classical_ot_oracle(inst: &TransportInstance) -> Result<f64> {
    let n = inst.x.size();
    let m = inst.y.size();
    for (cap, size) in [(&inst.mu, n), (&inst.nu, m)] {
        for s in cap.ground().subsets() {
            let additive: f64 = (0..size)
                .filter(|&i| s.contains(i))
                .map(|i| cap.value(SubsetMask::singleton(i)))
                .sum();
            if (cap.value(s) - additive).abs() > 1e-9 {
                return Err(Error::NotAdditive);
            }
        }
    }

    let nvars = n * m;
    let mut constraints = Vec::with_capacity(n + m);
    for i in 0..n {
        let coeffs = (0..m).map(|j| (i * m + j, 1.0)).collect();
        constraints.push(Constraint::new(
            coeffs,
            Relation::Eq,
            inst.mu.value(SubsetMask::singleton(i)),
        ));
    }
    for j in 0..m {
        let coeffs = (0..n).map(|i| (i * m + j, 1.0)).collect();
        constraints.push(Constraint::new(
            coeffs,
            Relation::Eq,
            inst.nu.value(SubsetMask::singleton(j)),
        ));
    }
    let lp = LinearProgram {
        sense: Sense::Minimize,
        objective: inst.cost.entries().to_vec(),
        constraints,
        bounds: vec![VarBounds::NONNEGATIVE; nvars],
    };
    let sol = lp_solve_with(&lp, &LpConfig::default())?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value),
        other => Err(Error::LpNumerical(format!(
            "classical transportation LP returned {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground(n: usize) -> GroundSet {
        GroundSet::of_size(n).unwrap()
    }

    fn uniform2() -> Capacity {
        Capacity::additive(ground(2), &[0.5, 0.5]).unwrap()
    }

    fn squared2() -> Capacity {
        Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap()
    }

    fn swap_cost() -> CostMatrix {
        CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn product_measure_marginals_are_uniform() {
        let p = uniform2().product(&uniform2()).unwrap();
        let plan = TransportPlan::new(ground(2), ground(2), p, PlanClass::Ch).unwrap();
        let (mx, my) = marginals(&plan).unwrap();
        assert_eq!(mx.values(), uniform2().values());
        assert_eq!(my.values(), uniform2().values());
    }

    #[test]
    fn distorted_product_plan_matches_distorted_marginals() {
        let plan =
            distorted_product_plan(ground(2), ground(2), &[0.5, 0.5], &[0.5, 0.5], 2.0).unwrap();
        let (mx, my) = marginals(&plan).unwrap();
        assert_eq!(mx.values(), squared2().values());
        assert_eq!(my.values(), squared2().values());
        // Singletons 1/16, pairs 1/4, triples 9/16.
        assert!((plan.value(SubsetMask(1)) - 0.0625).abs() < 1e-15);
        assert!((plan.value(SubsetMask(7)) - 0.5625).abs() < 1e-15);
        assert!(plan.capacity().classify().supermodular);

        let report = is_transport_plan(&plan, &squared2(), &squared2(), 1e-12).unwrap();
        assert!(report.is_plan, "worst {report:?}");
    }

    #[test]
    fn alpha_one_is_the_product_measure() {
        let plan =
            distorted_product_plan(ground(2), ground(2), &[0.3, 0.7], &[0.6, 0.4], 1.0).unwrap();
        let product = Capacity::additive(ground(2), &[0.3, 0.7])
            .unwrap()
            .product(&Capacity::additive(ground(2), &[0.6, 0.4]).unwrap())
            .unwrap();
        for (a, b) in plan.capacity().values().iter().zip(product.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_below_one_is_rejected() {
        assert!(matches!(
            distorted_product_plan(ground(2), ground(2), &[0.5, 0.5], &[0.5, 0.5], 0.9),
            Err(Error::BadDistortion(_))
        ));
    }

    #[test]
    fn mismatched_marginals_fail_the_check() {
        let product = uniform2().product(&uniform2()).unwrap();
        let plan = TransportPlan::new(ground(2), ground(2), product, PlanClass::Ch).unwrap();
        let report = is_transport_plan(&plan, &squared2(), &squared2(), 1e-9).unwrap();
        assert!(!report.is_plan);
        assert!((report.worst_deviation - 0.25).abs() < 1e-12);
    }

    #[test]
    fn plan_from_map_identity() {
        let plan = plan_from_map(&uniform2(), &[0, 1], ground(2)).unwrap();
        assert_eq!(plan.value(SubsetMask(1)), 0.5); // cell (0,0)
        assert_eq!(plan.value(SubsetMask(8)), 0.5); // cell (1,1)
        assert_eq!(plan.value(SubsetMask(2)), 0.0); // cell (0,1)

        let sq = squared2();
        let plan = plan_from_map(&sq, &[0, 1], ground(2)).unwrap();
        assert_eq!(plan.value(SubsetMask(1)), 0.25);
        let (mx, my) = marginals(&plan).unwrap();
        assert_eq!(mx.values(), sq.values());
        assert_eq!(
            my.values(),
            sq.push_forward(&[0, 1], ground(2)).unwrap().values()
        );
    }

    #[test]
    fn plan_cost_level_decomposition_matches_choquet() {
        let inst = TransportInstance::new(swap_cost(), squared2(), squared2()).unwrap();
        let plan =
            distorted_product_plan(ground(2), ground(2), &[0.5, 0.5], &[0.5, 0.5], 2.0).unwrap();
        let a = plan_cost(&inst, &plan).unwrap();
        let b = plan_cost_linear(&inst, &plan);
        assert!((a - b).abs() < 1e-15);
        assert!((a - 0.25).abs() < 1e-15);
    }

    #[test]
    fn diagonal_measure_has_zero_swap_cost() {
        let inst = TransportInstance::new(swap_cost(), uniform2(), uniform2()).unwrap();
        let plan = plan_from_map(&uniform2(), &[0, 1], ground(2)).unwrap();
        assert_eq!(plan_cost(&inst, &plan).unwrap(), 0.0);
    }

    #[test]
    fn zero_cost_means_zero_for_every_plan() {
        let zero = CostMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let inst = TransportInstance::new(zero, uniform2(), uniform2()).unwrap();
        let plan = lower_envelope_plan(&uniform2(), &uniform2()).unwrap();
        assert_eq!(plan_cost(&inst, &plan).unwrap(), 0.0);
    }

    #[test]
    fn envelope_plan_is_a_valid_plan_with_exact_marginals() {
        let plan = lower_envelope_plan(&squared2(), &uniform2()).unwrap();
        let report = is_transport_plan(&plan, &squared2(), &uniform2(), 1e-12).unwrap();
        assert!(report.is_plan);
    }

    #[test]
    fn build_lp_counts() {
        let inst = TransportInstance::new(swap_cost(), uniform2(), uniform2()).unwrap();
        let lp = build_lp(&inst, PlanClass::Ch).unwrap();
        assert_eq!(lp.objective.len(), 16);
        let eq = lp
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Eq)
            .count();
        let ge = lp
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Ge)
            .count();
        assert_eq!(eq, 4); // 2^2 + 2^2 - 4 nontrivial cylinders
        assert_eq!(ge, 32); // 4 * 2^3 cover rows

        let lp = build_lp(&inst, PlanClass::ChStar).unwrap();
        let ge = lp
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Ge)
            .count();
        assert_eq!(ge, 32 + 24); // plus C(4,2) * 2^2 supermodularity rows
    }

    #[test]
    fn one_by_one_instance() {
        let cost = CostMatrix::from_rows(&[vec![3.25]]).unwrap();
        let one = GroundSet::of_size(1).unwrap();
        let triv = Capacity::additive(one.clone(), &[1.0]).unwrap();
        let inst = TransportInstance::new(cost, triv.clone(), triv).unwrap();
        let lp = build_lp(&inst, PlanClass::Ch).unwrap();
        assert_eq!(lp.objective.len(), 2);
        match solve_optimal(&inst, PlanClass::Ch).unwrap() {
            SolveOutcome::Optimal { cost, .. } => assert!((cost - 3.25).abs() < 1e-12),
            SolveOutcome::EmptyClass => panic!("1x1 must be feasible"),
        }
    }

    #[test]
    fn uniform_swap_cost_solves_to_zero() {
        let inst = TransportInstance::new(swap_cost(), uniform2(), uniform2()).unwrap();
        for class in [PlanClass::Ch, PlanClass::ChStar] {
            match solve_optimal(&inst, class).unwrap() {
                SolveOutcome::Optimal { plan, cost } => {
                    assert!(cost.abs() < 1e-9, "{class:?} cost {cost}");
                    let r = is_transport_plan(&plan, &uniform2(), &uniform2(), 1e-9).unwrap();
                    assert!(r.is_plan);
                }
                SolveOutcome::EmptyClass => panic!("{class:?} must be feasible"),
            }
        }
    }

    #[test]
    fn squared_marginals_swap_cost_solves_to_zero() {
        let inst = TransportInstance::new(swap_cost(), squared2(), squared2()).unwrap();
        match solve_optimal(&inst, PlanClass::ChStar).unwrap() {
            SolveOutcome::Optimal { plan, cost } => {
                assert!(cost.abs() < 1e-9, "cost {cost}");
                assert!(plan.capacity().classify_with_tol(PLAN_TOL).supermodular);
            }
            SolveOutcome::EmptyClass => panic!("squared diagonal witness exists"),
        }
    }

    #[test]
    fn ch_optimum_matches_envelope_cost() {
        let cost = CostMatrix::from_rows(&[vec![0.3, 1.7], vec![2.1, 0.4]]).unwrap();
        let inst = TransportInstance::new(cost, squared2(), uniform2()).unwrap();
        let envelope = lower_envelope_plan(&squared2(), &uniform2()).unwrap();
        let env_cost = plan_cost(&inst, &envelope).unwrap();
        match solve_optimal(&inst, PlanClass::Ch).unwrap() {
            SolveOutcome::Optimal { cost, .. } => {
                assert!(
                    (cost - env_cost).abs() < 1e-9,
                    "lp {cost} vs envelope {env_cost}"
                );
            }
            SolveOutcome::EmptyClass => panic!("Ch is never empty"),
        }
    }

    #[test]
    fn classical_oracle_examples() {
        let inst = TransportInstance::new(swap_cost(), uniform2(), uniform2()).unwrap();
        assert!(classical_ot_oracle(&inst).unwrap().abs() < 1e-9);

        let cost = CostMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let inst = TransportInstance::new(cost, uniform2(), uniform2()).unwrap();
        assert!((classical_ot_oracle(&inst).unwrap() - 1.5).abs() < 1e-9);

        let cost = CostMatrix::from_rows(&[vec![4.5]]).unwrap();
        let one = GroundSet::of_size(1).unwrap();
        let triv = Capacity::additive(one.clone(), &[1.0]).unwrap();
        let inst = TransportInstance::new(cost, triv.clone(), triv).unwrap();
        assert!((classical_ot_oracle(&inst).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn classical_oracle_rejects_distorted_marginals() {
        let inst = TransportInstance::new(swap_cost(), squared2(), squared2()).unwrap();
        assert!(matches!(
            classical_ot_oracle(&inst).unwrap_err(),
            Error::NotAdditive
        ));
    }

    #[test]
    fn size_guard_is_enforced() {
        let g5 = GroundSet::of_size(5).unwrap();
        let g4 = GroundSet::of_size(4).unwrap();
        let mu = Capacity::additive(g5.clone(), &[0.2; 5]).unwrap();
        let nu = Capacity::additive(g4.clone(), &[0.25; 4]).unwrap();
        let cost = CostMatrix::new(5, 4, vec![1.0; 20]).unwrap();
        assert!(matches!(
            TransportInstance::new(cost, mu, nu).unwrap_err(),
            Error::SizeGuard { cells: 20, .. }
        ));
    }
}
