//! The Choquet integral and its calculus on finite ground sets.
//!
//! Two independent evaluation routes are provided. [`choquet_integral`] uses
//! the sorted closed form: with elements ordered so that
//! `f(x_(1)) >= ... >= f(x_(n))` and `S_k` the set of the top `k` elements,
//!
//! ```text
//! (C)int f dmu = sum_k f(x_(k)) * (mu(S_k) - mu(S_{k-1})).
//! ```
//!
//! [`choquet_quadrature`] instead integrates the survival function
//! `t -> mu({f >= t})` (or `mu({f > t})` in the strict variant) exactly over
//! the breakpoints of `f`, splitting the line at 0 so that the negative side
//! integrates `mu({f >= t}) - 1`. On a finite ground set both routes are
//! exact and must agree to machine precision; the quadrature exists to keep
//! the closed form honest.

use crate::setfunc::{Capacity, GroundSet, SubsetMask};
use crate::{Error, Result};

/// A real-valued function on a ground set (finite, hence bounded and
/// integrable against any capacity).
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    ground: GroundSet,
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(ground: GroundSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != ground.size() {
            return Err(Error::ValueCount {
                expected: ground.size(),
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Self { ground, values })
    }

    pub fn indicator(ground: GroundSet, s: SubsetMask) -> Result<Self> {
        let n = ground.size();
        Self::new(
            ground,
            (0..n)
                .map(|i| if s.contains(i) { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    pub fn constant(ground: GroundSet, c: f64) -> Result<Self> {
        let n = ground.size();
        Self::new(ground, vec![c; n])
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }
}

fn check_same_ground(f: &RandomVariable, mu: &Capacity) -> Result<()> {
    if f.ground() != mu.ground() {
        return Err(Error::GroundMismatch);
    }
    Ok(())
}

/// Choquet integral by the sorted closed form. Ties in the descending sort
/// are broken by element index; any tie order telescopes to the same value.
pub fn choquet_integral(f: &RandomVariable, mu: &Capacity) -> Result<f64> {
    check_same_ground(f, mu)?;
    let n = f.ground().size();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        f.value(b)
            .partial_cmp(&f.value(a))
            .expect("values validated finite")
            .then(a.cmp(&b))
    });
    let mut total = 0.0;
    let mut prev = 0.0;
    let mut mask = SubsetMask::EMPTY;
    for &i in &order {
        mask = mask.with(i);
        let cur = mu.value(mask);
        total += f.value(i) * (cur - prev);
        prev = cur;
    }
    Ok(total)
}

/// Choquet integral by exact breakpoint quadrature of the survival function.
///
/// The integrand is piecewise constant between consecutive distinct values
/// of `f`; with `strict = false` the level set on an interval `(a, b)` is
/// `{f >= b}`, with `strict = true` it is `{f > a}`. The two sets coincide
/// off the (measure-zero) breakpoints, so both variants give the same value.
pub fn choquet_quadrature(f: &RandomVariable, mu: &Capacity, strict: bool) -> Result<f64> {
    check_same_ground(f, mu)?;
    let mut brk: Vec<f64> = f.values().to_vec();
    brk.push(0.0);
    brk.sort_by(|a, b| a.partial_cmp(b).expect("values validated finite"));
    brk.dedup();

    let level = |keep: &dyn Fn(f64) -> bool| -> SubsetMask {
        let mut s = SubsetMask::EMPTY;
        for (i, &v) in f.values().iter().enumerate() {
            if keep(v) {
                s = s.with(i);
            }
        }
        s
    };

    let mut total = 0.0;
    for w in brk.windows(2) {
        let (a, b) = (w[0], w[1]);
        let set = if strict {
            level(&|v| v > a)
        } else {
            level(&|v| v >= b)
        };
        let g = mu.value(set);
        // Each window lies entirely in one half-line because 0 is a breakpoint.
        if b <= 0.0 {
            total += (b - a) * (g - 1.0);
        } else {
            total += (b - a) * g;
        }
    }
    Ok(total)
}

/// Choquet integral of `f` over a set `A`, with the null-set flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetIntegral {
    pub value: f64,
    /// True when `mu(A) = 0`; the value is then 0 by convention, since the
    /// defining identity `(C)int_A f dmu = mu(A) * (C)int f dmu_A` divides
    /// by `mu(A)`.
    pub on_null_set: bool,
}

/// Integral over a set: `mu(A)` times the integral against `conditional(mu, A)`.
pub fn choquet_integral_over(f: &RandomVariable, mu: &Capacity, a: SubsetMask) -> Result<SetIntegral> {
    check_same_ground(f, mu)?;
    let ma = mu.value(a);
    if a.is_empty() || ma <= 0.0 {
        return Ok(SetIntegral {
            value: 0.0,
            on_null_set: true,
        });
    }
    let cond = mu.conditional(a)?;
    Ok(SetIntegral {
        value: ma * choquet_integral(f, &cond)?,
        on_null_set: false,
    })
}

/// Comonotonicity: `(f(w) - f(w')) * (g(w) - g(w')) >= 0` for all pairs.
pub fn are_comonotone(f: &RandomVariable, g: &RandomVariable) -> Result<bool> {
    if f.ground() != g.ground() {
        return Err(Error::GroundMismatch);
    }
    let n = f.ground().size();
    for i in 0..n {
        for j in i + 1..n {
            if (f.value(i) - f.value(j)) * (g.value(i) - g.value(j)) < 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A functional on random variables, assumed comonotonically additive,
/// monotone, and calibrated (`I(1) = 1`). Deterministic by contract.
pub trait FunctionalOracle {
    fn evaluate(&self, f: &RandomVariable) -> f64;
}

impl<F: Fn(&RandomVariable) -> f64> FunctionalOracle for F {
    fn evaluate(&self, f: &RandomVariable) -> f64 {
        self(f)
    }
}

/// Recover the unique capacity representing a comonotonically additive,
/// monotone, calibrated functional: `mu(S) = I(chi_S)` for every subset.
///
/// When `I` is the Choquet integral of some capacity this is an exact round
/// trip. If the recovered values violate the capacity axioms, the functional
/// is reported as non-representable.
pub fn capacity_from_functional<O: FunctionalOracle + ?Sized>(
    oracle: &O,
    ground: &GroundSet,
) -> Result<Capacity> {
    let values = ground
        .subsets()
        .map(|s| {
            RandomVariable::indicator(ground.clone(), s).map(|ind| oracle.evaluate(&ind))
        })
        .collect::<Result<Vec<_>>>()?;
    Capacity::from_values(ground.clone(), values).map_err(|e| Error::NonRepresentable(Box::new(e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground(n: usize) -> GroundSet {
        GroundSet::of_size(n).unwrap()
    }

    fn squared_uniform() -> Capacity {
        Capacity::from_values(ground(2), vec![0.0, 0.25, 0.25, 1.0]).unwrap()
    }

    #[test]
    fn sorted_form_positive_integrand() {
        let f = RandomVariable::new(ground(2), vec![2.0, 1.0]).unwrap();
        let v = choquet_integral(&f, &squared_uniform()).unwrap();
        assert!((v - 1.25).abs() < 1e-15);
    }

    #[test]
    fn sorted_form_signed_integrand() {
        let f = RandomVariable::new(ground(2), vec![1.0, -1.0]).unwrap();
        let v = choquet_integral(&f, &squared_uniform()).unwrap();
        assert!((v - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn indicator_and_constant_identities() {
        let mu = squared_uniform();
        for s in ground(2).subsets() {
            let ind = RandomVariable::indicator(ground(2), s).unwrap();
            assert_eq!(choquet_integral(&ind, &mu).unwrap(), mu.value(s));
        }
        let c = RandomVariable::constant(ground(2), 3.5).unwrap();
        assert!((choquet_integral(&c, &mu).unwrap() - 3.5).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_hand_values() {
        let mu = squared_uniform();
        let f = RandomVariable::new(ground(2), vec![2.0, 1.0]).unwrap();
        assert!((choquet_quadrature(&f, &mu, false).unwrap() - 1.25).abs() < 1e-15);
        assert!((choquet_quadrature(&f, &mu, true).unwrap() - 1.25).abs() < 1e-15);

        let f = RandomVariable::new(ground(2), vec![1.0, -1.0]).unwrap();
        assert!((choquet_quadrature(&f, &mu, false).unwrap() + 0.5).abs() < 1e-15);
        assert!((choquet_quadrature(&f, &mu, true).unwrap() + 0.5).abs() < 1e-15);

        let z = RandomVariable::constant(ground(2), 0.0).unwrap();
        assert_eq!(choquet_quadrature(&z, &mu, false).unwrap(), 0.0);
        assert_eq!(choquet_quadrature(&z, &mu, true).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_all_negative() {
        let mu = squared_uniform();
        let f = RandomVariable::new(ground(2), vec![-1.0, -3.0]).unwrap();
        // Sorted form: -1*(mu{0} - 0) + -3*(1 - mu{0}) = -0.25 - 2.25 = -2.5.
        let expect = -2.5;
        assert!((choquet_integral(&f, &mu).unwrap() - expect).abs() < 1e-15);
        assert!((choquet_quadrature(&f, &mu, false).unwrap() - expect).abs() < 1e-15);
        assert!((choquet_quadrature(&f, &mu, true).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn integral_over_set() {
        let mu = squared_uniform();
        let f = RandomVariable::new(ground(2), vec![2.0, 1.0]).unwrap();

        let full = choquet_integral_over(&f, &mu, SubsetMask(3)).unwrap();
        assert!(!full.on_null_set);
        assert!((full.value - 1.25).abs() < 1e-15);

        let a = choquet_integral_over(&f, &mu, SubsetMask(1)).unwrap();
        assert!(!a.on_null_set);
        assert!((a.value - 0.5).abs() < 1e-15);

        let dirac = Capacity::dirac(ground(2), 0).unwrap();
        let null = choquet_integral_over(&f, &dirac, SubsetMask(2)).unwrap();
        assert!(null.on_null_set);
        assert_eq!(null.value, 0.0);
    }

    #[test]
    fn comonotone_pairs() {
        let f = RandomVariable::new(ground(2), vec![2.0, 1.0]).unwrap();
        let g = RandomVariable::new(ground(2), vec![5.0, 3.0]).unwrap();
        assert!(are_comonotone(&f, &g).unwrap());

        let f = RandomVariable::new(ground(2), vec![1.0, 2.0]).unwrap();
        let g = RandomVariable::new(ground(2), vec![2.0, 1.0]).unwrap();
        assert!(!are_comonotone(&f, &g).unwrap());

        let c = RandomVariable::constant(ground(2), 4.0).unwrap();
        let g = RandomVariable::new(ground(2), vec![-7.0, 9.0]).unwrap();
        assert!(are_comonotone(&c, &g).unwrap());
    }

    #[test]
    fn additivity_fails_off_the_comonotone_cone() {
        // Counterexample kept alongside the comonotone-additivity law: under
        // a strictly supermodular capacity the integral is not additive.
        let mu = squared_uniform();
        let f = RandomVariable::new(ground(2), vec![1.0, 0.0]).unwrap();
        let g = RandomVariable::new(ground(2), vec![0.0, 1.0]).unwrap();
        let sum = RandomVariable::new(ground(2), vec![1.0, 1.0]).unwrap();
        let lhs = choquet_integral(&sum, &mu).unwrap();
        let rhs = choquet_integral(&f, &mu).unwrap() + choquet_integral(&g, &mu).unwrap();
        assert_eq!(lhs, 1.0);
        assert_eq!(rhs, 0.5);
    }

    #[test]
    fn functional_round_trip() {
        let mu = squared_uniform();
        let target = mu.clone();
        let oracle = move |f: &RandomVariable| choquet_integral(f, &target).unwrap();
        let back = capacity_from_functional(&oracle, &ground(2)).unwrap();
        assert_eq!(back.values(), mu.values());
    }

    #[test]
    fn functional_expectation_recovers_additive() {
        let w = [0.2, 0.8];
        let oracle = move |f: &RandomVariable| {
            f.values().iter().zip(w).map(|(v, p)| v * p).sum::<f64>()
        };
        let back = capacity_from_functional(&oracle, &ground(2)).unwrap();
        let add = Capacity::additive(ground(2), &w).unwrap();
        for (a, b) in back.values().iter().zip(add.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn functional_with_negative_mass_is_rejected() {
        let oracle = |f: &RandomVariable| {
            if f.value(0) > 0.0 && f.value(1) == 0.0 {
                -0.1
            } else {
                f.values().iter().sum::<f64>() / 2.0
            }
        };
        let err = capacity_from_functional(&oracle, &ground(2)).unwrap_err();
        assert!(matches!(err, Error::NonRepresentable(_)));
    }
}
