//! Capacities on finite ground sets, stored densely on the subset lattice.
//!
//! A capacity is a set function `mu` with `mu(empty) = 0`, `mu(full) = 1`,
//! monotone under inclusion. Subsets are bitmasks into a value array of
//! length `2^n`, so every operation here is a direct lattice sweep.

use crate::choquet::{choquet_integral, RandomVariable};
use crate::{Error, Result};

/// Hard cap on ground-set size; the lattice needs `2^n` stored values.
pub const MAX_GROUND_SIZE: usize = 20;

/// Validation tolerance for grounding, normalization, and cover monotonicity.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Default tolerance for the modularity classifier.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// An ordered finite ground set; element index = position in the label list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_GROUND_SIZE {
            return Err(Error::GroundSize {
                got: labels.len(),
                max: MAX_GROUND_SIZE,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::DuplicateLabel(a.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Ground set with generated labels `e0, e1, ...`.
    pub fn of_size(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("e{i}")).collect())
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_subsets(&self) -> usize {
        1usize << self.labels.len()
    }

    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask::full(self.size())
    }

    /// All subset masks in increasing numeric order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> {
        (0..self.num_subsets() as u32).map(SubsetMask)
    }
}

/// A subset of a ground set: bit `i` set means element `i` belongs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_GROUND_SIZE);
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        SubsetMask(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        SubsetMask(self.0 | 1 << i)
    }

    pub fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Member element indices, ascending.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..u32::BITS as usize).filter(move |&i| self.contains(i))
    }
}

/// How a capacity sits relative to the modular (additive) ones.
///
/// Supermodularity is checked through the local lattice condition
/// `v(S+i) - v(S) <= v(S+i+j) - v(S+j)` for all `S` and `i != j` outside
/// `S`, which is equivalent to the pairwise definition
/// `v(A) + v(B) <= v(A | B) + v(A & B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub supermodular: bool,
    pub submodular: bool,
    pub additive: bool,
    /// First `(S, i, j)` violating the supermodular inequality, if any.
    pub supermodular_witness: Option<(SubsetMask, usize, usize)>,
    /// First `(S, i, j)` violating the submodular inequality, if any.
    pub submodular_witness: Option<(SubsetMask, usize, usize)>,
}

/// A distortion `u` applied to cumulative probability weights.
#[derive(Debug, Clone, PartialEq)]
pub enum Distortion {
    /// `u(t) = t^alpha`, `alpha >= 1`.
    Power(f64),
    /// Piecewise-linear convex nondecreasing `u` given by `(t, u(t))` knots;
    /// the first knot must be exactly `(0,0)` and the last exactly `(1,1)`.
    PiecewiseLinear(Vec<(f64, f64)>),
}

/// A probability weight vector together with a convex distortion of it.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    weights: Vec<f64>,
    distortion: Distortion,
}

impl DistortionSpec {
    pub fn power(weights: Vec<f64>, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::BadDistortion(format!(
                "power exponent must be >= 1, got {alpha}"
            )));
        }
        Self::new(weights, Distortion::Power(alpha))
    }

    pub fn piecewise_linear(weights: Vec<f64>, knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(weights, Distortion::PiecewiseLinear(knots))
    }

    pub fn new(weights: Vec<f64>, distortion: Distortion) -> Result<Self> {
        validate_weights(&weights)?;
        if let Distortion::PiecewiseLinear(knots) = &distortion {
            validate_knots(knots)?;
        }
        Ok(Self {
            weights,
            distortion,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn distortion(&self) -> &Distortion {
        &self.distortion
    }

    /// Evaluate the distortion map at `t` in `[0, 1]`.
    pub fn apply(&self, t: f64) -> f64 {
        match &self.distortion {
            Distortion::Power(alpha) => t.powf(*alpha),
            Distortion::PiecewiseLinear(knots) => {
                if t <= 0.0 {
                    return 0.0;
                }
                if t >= 1.0 {
                    return 1.0;
                }
                let hi = knots.partition_point(|&(x, _)| x <= t);
                let (x0, y0) = knots[hi - 1];
                let (x1, y1) = knots[hi];
                y0 + (t - x0) / (x1 - x0) * (y1 - y0)
            }
        }
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() || weights.len() > MAX_GROUND_SIZE {
        return Err(Error::GroundSize {
            got: weights.len(),
            max: MAX_GROUND_SIZE,
        });
    }
    let mut sum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite(i));
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight { index: i, value: w });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::WeightSum(sum));
    }
    Ok(())
}

fn validate_knots(knots: &[(f64, f64)]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::BadDistortion("need at least two knots".into()));
    }
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if first != (0.0, 0.0) || last != (1.0, 1.0) {
        return Err(Error::BadDistortion(
            "knots must start at (0,0) and end at (1,1)".into(),
        ));
    }
    let mut prev_slope = f64::NEG_INFINITY;
    for w in knots.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if !(x1.is_finite() && y1.is_finite()) {
            return Err(Error::BadDistortion("non-finite knot".into()));
        }
        if x1 <= x0 {
            return Err(Error::BadDistortion(
                "knot abscissae must be strictly increasing".into(),
            ));
        }
        let slope = (y1 - y0) / (x1 - x0);
        if slope < prev_slope - VALIDATION_TOL {
            return Err(Error::BadDistortion(
                "slopes must be nondecreasing (convexity)".into(),
            ));
        }
        if slope < -VALIDATION_TOL {
            return Err(Error::BadDistortion("map must be nondecreasing".into()));
        }
        prev_slope = slope;
    }
    Ok(())
}

/// A normalized monotone set function on the full subset lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    ground: GroundSet,
    values: Vec<f64>,
}

impl Capacity {
    /// Validate and store lattice values indexed by subset mask.
    ///
    /// Grounding, normalization, and cover monotonicity are enforced within
    /// `VALIDATION_TOL`; accepted values are then clamped into `[0,1]` and
    /// the two endpoints snapped exactly, so later arithmetic cannot drift.
    pub fn from_values(ground: GroundSet, mut values: Vec<f64>) -> Result<Self> {
        let n = ground.size();
        let count = 1usize << n;
        if values.len() != count {
            return Err(Error::ValueCount {
                expected: count,
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        if values[0].abs() > VALIDATION_TOL {
            return Err(Error::NotGrounded(values[0]));
        }
        if (values[count - 1] - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotNormalized(values[count - 1]));
        }
        for s in 0..count as u32 {
            for i in 0..n {
                if s >> i & 1 == 0 {
                    let t = s | 1 << i;
                    if values[s as usize] > values[t as usize] + VALIDATION_TOL {
                        return Err(Error::NotMonotone {
                            lo: SubsetMask(s),
                            hi: SubsetMask(t),
                            lo_value: values[s as usize],
                            hi_value: values[t as usize],
                        });
                    }
                }
            }
        }
        values[0] = 0.0;
        values[count - 1] = 1.0;
        for v in &mut values {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { ground, values })
    }

    /// The additive capacity `v(S) = sum of weights over S`.
    pub fn additive(ground: GroundSet, weights: &[f64]) -> Result<Self> {
        validate_weights(weights)?;
        if weights.len() != ground.size() {
            return Err(Error::GroundMismatch);
        }
        let values = lattice_sums(weights);
        Self::from_values(ground, values)
    }

    /// The distorted probability `v(S) = u(sum of weights over S)`.
    ///
    /// For a convex distortion the result is supermodular.
    pub fn distorted(ground: GroundSet, spec: &DistortionSpec) -> Result<Self> {
        if spec.weights.len() != ground.size() {
            return Err(Error::GroundMismatch);
        }
        let values = lattice_sums(&spec.weights)
            .into_iter()
            .map(|t| spec.apply(t))
            .collect();
        Self::from_values(ground, values)
    }

    /// Unit mass at a single element.
    pub fn dirac(ground: GroundSet, element: usize) -> Result<Self> {
        let n = ground.size();
        if element >= n {
            return Err(Error::MapOutOfRange {
                index: element,
                target: element,
                size: n,
            });
        }
        let values = (0..1u32 << n)
            .map(|s| if s >> element & 1 == 1 { 1.0 } else { 0.0 })
            .collect();
        Self::from_values(ground, values)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, s: SubsetMask) -> f64 {
        self.values[s.index()]
    }

    /// Classify against the modular cone with the default tolerance.
    pub fn classify(&self) -> Classification {
        self.classify_with_tol(CLASSIFY_TOL)
    }

    /// Classify with an explicit tolerance on the local lattice inequalities.
    pub fn classify_with_tol(&self, tol: f64) -> Classification {
        let n = self.ground.size();
        let v = &self.values;
        let mut super_w = None;
        let mut sub_w = None;
        for s in 0..v.len() as u32 {
            for i in 0..n {
                if s >> i & 1 == 1 {
                    continue;
                }
                for j in i + 1..n {
                    if s >> j & 1 == 1 {
                        continue;
                    }
                    let d1 = v[(s | 1 << i) as usize] - v[s as usize];
                    let d2 = v[(s | 1 << i | 1 << j) as usize] - v[(s | 1 << j) as usize];
                    if super_w.is_none() && d1 > d2 + tol {
                        super_w = Some((SubsetMask(s), i, j));
                    }
                    if sub_w.is_none() && d1 < d2 - tol {
                        sub_w = Some((SubsetMask(s), i, j));
                    }
                }
            }
        }
        Classification {
            supermodular: super_w.is_none(),
            submodular: sub_w.is_none(),
            additive: super_w.is_none() && sub_w.is_none(),
            supermodular_witness: super_w,
            submodular_witness: sub_w,
        }
    }

    /// Push-forward through an element map: `(T#v)(B) = v(T^{-1}(B))`.
    ///
    /// `map[i]` is the target index of element `i`.
    pub fn push_forward(&self, map: &[usize], target: GroundSet) -> Result<Capacity> {
        let n = self.ground.size();
        if map.len() != n {
            return Err(Error::GroundMismatch);
        }
        let m = target.size();
        for (i, &t) in map.iter().enumerate() {
            if t >= m {
                return Err(Error::MapOutOfRange {
                    index: i,
                    target: t,
                    size: m,
                });
            }
        }
        let values = (0..1u32 << m)
            .map(|b| {
                let mut pre = 0u32;
                for (i, &t) in map.iter().enumerate() {
                    if b >> t & 1 == 1 {
                        pre |= 1 << i;
                    }
                }
                self.values[pre as usize]
            })
            .collect();
        Capacity::from_values(target, values)
    }

    /// Iterated-Choquet product on `X x Y`, with the `X` integral outermost:
    /// `(mu (x) nu)(W) = (C)int_X nu({y : (x,y) in W}) dmu(x)`.
    ///
    /// On rectangles this reduces to `mu(A) * nu(B)`, and for additive
    /// inputs it is the classical product measure. The construction is
    /// order-sensitive for non-additive inputs; the `X`-outermost order is
    /// fixed here. Product cells are indexed row-major: `(i,j) -> i*m + j`.
    pub fn product(&self, other: &Capacity) -> Result<Capacity> {
        let n = self.ground.size();
        let m = other.ground.size();
        if n * m > MAX_GROUND_SIZE {
            return Err(Error::GroundSize {
                got: n * m,
                max: MAX_GROUND_SIZE,
            });
        }
        let ground = product_ground(&self.ground, &other.ground)?;
        let mut values = Vec::with_capacity(1 << (n * m));
        let mut section = vec![0.0; n];
        for w in 0..1u64 << (n * m) {
            for (i, slot) in section.iter_mut().enumerate() {
                let ymask = (w >> (i * m)) as u32 & ((1u32 << m) - 1);
                *slot = other.values[ymask as usize];
            }
            let rv = RandomVariable::new(self.ground.clone(), section.clone())?;
            values.push(choquet_integral(&rv, self)?);
        }
        Capacity::from_values(ground, values)
    }

    /// Conditional capacity `v_A(B) = v(B & A) / v(A)`; requires `v(A) > 0`.
    pub fn conditional(&self, a: SubsetMask) -> Result<Capacity> {
        let va = self.value(a);
        if a.is_empty() || va <= 0.0 {
            return Err(Error::ConditionOnNull(a));
        }
        let values = self
            .ground
            .subsets()
            .map(|b| self.value(b.intersect(a)) / va)
            .collect();
        Capacity::from_values(self.ground.clone(), values)
    }

    /// Indicator-family metric: `d = sum_j 2^{-j} |mu(S_j) - nu(S_j)|` over
    /// the nonempty masks in increasing order. Indicators have unit sup norm
    /// and their Choquet integrals are exactly the capacity values, so this
    /// separates capacities on a finite ground set.
    pub fn distance(&self, other: &Capacity) -> Result<f64> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch);
        }
        let mut weight = 1.0;
        let mut d = 0.0;
        for j in 1..self.values.len() {
            weight *= 0.5;
            d += weight * (self.values[j] - other.values[j]).abs();
        }
        Ok(d)
    }
}

/// Product ground set with row-major cell order `(i,j) -> i*m + j`.
pub fn product_ground(x: &GroundSet, y: &GroundSet) -> Result<GroundSet> {
    let mut labels = Vec::with_capacity(x.size() * y.size());
    for lx in x.labels() {
        for ly in y.labels() {
            labels.push(format!("({lx},{ly})"));
        }
    }
    GroundSet::new(labels)
}

/// Subset sums of a weight vector over the full lattice.
fn lattice_sums(weights: &[f64]) -> Vec<f64> {
    let n = weights.len();
    let mut out = vec![0.0; 1 << n];
    for s in 1..1u32 << n {
        let i = s.trailing_zeros() as usize;
        out[s as usize] = out[(s & (s - 1)) as usize] + weights[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground(n: usize) -> GroundSet {
        GroundSet::of_size(n).unwrap()
    }

    #[test]
    fn smallest_capacity() {
        let c = Capacity::from_values(ground(1), vec![0.0, 1.0]).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0]);
    }

    #[test]
    fn squared_uniform_is_valid() {
        let c = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        assert_eq!(c.value(SubsetMask(1)), 0.25);
    }

    #[test]
    fn monotone_within_unit_interval_is_accepted() {
        Capacity::from_values(ground(2), vec![0.0, 0.6, 0.2, 1.0]).unwrap();
    }

    #[test]
    fn monotonicity_violation_reports_cover_pair() {
        let err = Capacity::from_values(ground(2), vec![0.0, 0.6, 0.2, 0.5]).unwrap_err();
        match err {
            Error::NotNormalized(v) => assert_eq!(v, 0.5),
            other => panic!("unexpected error {other:?}"),
        }
        // Same shape with a proper top value: the cover violation surfaces.
        let err = Capacity::from_values(ground(2), vec![0.0, 0.6, 0.2, 0.5999]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
        let err = Capacity::from_values(ground(3), {
            let mut v = vec![0.0; 8];
            v[7] = 1.0;
            v[1] = 0.6;
            v[3] = 0.2; // {0} ⊂ {0,1} but 0.6 > 0.2
            v
        })
        .unwrap_err();
        match err {
            Error::NotMonotone { lo, hi, .. } => {
                assert_eq!(lo, SubsetMask(1));
                assert_eq!(hi, SubsetMask(3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn wrong_value_count_is_rejected() {
        let err = Capacity::from_values(ground(2), vec![0.0, 0.5, 1.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::ValueCount {
                expected: 4,
                got: 3
            }
        ));
    }

    #[test]
    fn additive_from_weights() {
        let c = Capacity::additive(ground(2), &[0.5, 0.5]).unwrap();
        assert_eq!(c.values(), &[0.0, 0.5, 0.5, 1.0]);
        let c = Capacity::additive(ground(1), &[1.0]).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0]);
        let c = Capacity::additive(ground(2), &[0.2, 0.8]).unwrap();
        assert_eq!(c.values(), &[0.0, 0.2, 0.8, 1.0]);
    }

    #[test]
    fn additive_rejects_bad_weights() {
        assert!(matches!(
            Capacity::additive(ground(2), &[-0.1, 1.1]).unwrap_err(),
            Error::NegativeWeight { index: 0, .. }
        ));
        assert!(matches!(
            Capacity::additive(ground(2), &[0.3, 0.3]).unwrap_err(),
            Error::WeightSum(_)
        ));
    }

    #[test]
    fn distorted_power() {
        let spec = DistortionSpec::power(vec![0.5, 0.5], 2.0).unwrap();
        let c = Capacity::distorted(ground(2), &spec).unwrap();
        assert_eq!(c.values(), &[0.0, 0.25, 0.25, 1.0]);

        let spec = DistortionSpec::power(vec![0.2, 0.8], 2.0).unwrap();
        let c = Capacity::distorted(ground(2), &spec).unwrap();
        let expected = [0.0, 0.04000000000000001, 0.6400000000000001, 1.0];
        for (a, b) in c.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }

        let spec = DistortionSpec::power(vec![1.0], 7.0).unwrap();
        let c = Capacity::distorted(ground(1), &spec).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0]);
    }

    #[test]
    fn distortion_validation() {
        assert!(DistortionSpec::power(vec![0.5, 0.5], 0.5).is_err());
        // Non-convex knots.
        assert!(DistortionSpec::piecewise_linear(
            vec![0.5, 0.5],
            vec![(0.0, 0.0), (0.5, 0.9), (1.0, 1.0)],
        )
        .is_err());
        // Valid convex piecewise-linear distortion.
        let spec = DistortionSpec::piecewise_linear(
            vec![0.5, 0.5],
            vec![(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)],
        )
        .unwrap();
        assert!((spec.apply(0.25) - 0.1).abs() < 1e-15);
        assert!((spec.apply(0.75) - 0.6).abs() < 1e-15);
        let c = Capacity::distorted(ground(2), &spec).unwrap();
        assert_eq!(c.values(), &[0.0, 0.2, 0.2, 1.0]);
        assert!(c.classify().supermodular);
    }

    #[test]
    fn classify_examples() {
        let c = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        let k = c.classify();
        assert!(k.supermodular && !k.submodular && !k.additive);
        assert_eq!(k.submodular_witness, Some((SubsetMask(0), 0, 1)));

        let c = Capacity::from_values(ground(2), vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        let k = c.classify();
        assert!(k.supermodular && k.submodular && k.additive);

        let c = Capacity::from_values(ground(2), vec![0.0, 0.7, 0.7, 1.0]).unwrap();
        let k = c.classify();
        assert!(!k.supermodular && k.submodular);
        assert_eq!(k.supermodular_witness, Some((SubsetMask(0), 0, 1)));
    }

    #[test]
    fn push_forward_identity_and_swap() {
        let spec = DistortionSpec::power(vec![0.2, 0.8], 2.0).unwrap();
        let c = Capacity::distorted(ground(2), &spec).unwrap();
        let id = c.push_forward(&[0, 1], ground(2)).unwrap();
        assert_eq!(id.values(), c.values());

        let sw = c.push_forward(&[1, 0], ground(2)).unwrap();
        assert_eq!(sw.value(SubsetMask(1)), c.value(SubsetMask(2)));
        assert_eq!(sw.value(SubsetMask(2)), c.value(SubsetMask(1)));
    }

    #[test]
    fn push_forward_constant_map() {
        let c = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        let t = c.push_forward(&[0, 0], ground(1)).unwrap();
        assert_eq!(t.values(), &[0.0, 1.0]);
    }

    #[test]
    fn push_forward_out_of_range() {
        let c = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        assert!(matches!(
            c.push_forward(&[0, 3], ground(2)).unwrap_err(),
            Error::MapOutOfRange {
                index: 1,
                target: 3,
                size: 2
            }
        ));
    }

    #[test]
    fn product_singleton_value() {
        let c = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        let p = c.product(&c).unwrap();
        // Cell (0,0) has bit 0; section is (0.25, 0), Choquet gives 0.25 * mu({0}).
        assert!((p.value(SubsetMask(1)) - 0.0625).abs() < 1e-15);
        assert_eq!(p.value(SubsetMask::full(4)), 1.0);
    }

    #[test]
    fn product_rectangle_identity() {
        let c1 = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.6, 1.0]).unwrap();
        let c2 = Capacity::from_values(ground(2), vec![0.0, 0.1, 0.8, 1.0]).unwrap();
        let p = c1.product(&c2).unwrap();
        for a in 0..4u32 {
            for b in 0..4u32 {
                let mut w = 0u32;
                for i in 0..2 {
                    for j in 0..2 {
                        if a >> i & 1 == 1 && b >> j & 1 == 1 {
                            w |= 1 << (i * 2 + j);
                        }
                    }
                }
                let lhs = p.value(SubsetMask(w));
                let rhs = c1.value(SubsetMask(a)) * c2.value(SubsetMask(b));
                assert!((lhs - rhs).abs() < 1e-15, "rectangle {a:#b}x{b:#b}");
            }
        }
    }

    #[test]
    fn conditional_examples() {
        let c = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        let a = SubsetMask(1);
        let cond = c.conditional(a).unwrap();
        assert_eq!(cond.value(SubsetMask(1)), 1.0);
        assert_eq!(cond.value(SubsetMask(2)), 0.0);
        assert_eq!(cond.value(SubsetMask(3)), 1.0);

        let full = c.conditional(SubsetMask(3)).unwrap();
        assert_eq!(full.values(), c.values());

        let u = Capacity::additive(ground(2), &[0.5, 0.5]).unwrap();
        let d = u.conditional(SubsetMask(2)).unwrap();
        assert_eq!(d.values(), &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn conditional_on_null_is_an_error() {
        let c = Capacity::dirac(ground(2), 0).unwrap();
        assert!(matches!(
            c.conditional(SubsetMask(2)).unwrap_err(),
            Error::ConditionOnNull(SubsetMask(2))
        ));
        assert!(matches!(
            c.conditional(SubsetMask::EMPTY).unwrap_err(),
            Error::ConditionOnNull(_)
        ));
    }

    #[test]
    fn distance_examples() {
        let a = Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap();
        let b = Capacity::from_values(ground(2), vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert_eq!(a.distance(&a).unwrap(), 0.0);
        assert!((a.distance(&b).unwrap() - 0.1875).abs() < 1e-15);
        assert_eq!(a.distance(&b).unwrap(), b.distance(&a).unwrap());
    }

    #[test]
    fn distance_requires_same_ground() {
        let a = Capacity::additive(ground(2), &[0.5, 0.5]).unwrap();
        let b = Capacity::additive(ground(1), &[1.0]).unwrap();
        assert!(matches!(a.distance(&b).unwrap_err(), Error::GroundMismatch));
    }
}
