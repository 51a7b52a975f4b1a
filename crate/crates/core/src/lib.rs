//! Kantorovich optimal transport between capacities on finite ground sets.
//!
//! A capacity is a normalized monotone set function; it need not be additive.
//! This crate stores capacities densely on the subset lattice of a small
//! ground set and builds the full transport toolchain on top of that
//! representation:
//!
//! - [`setfunc`] — capacities, distorted probabilities, push-forwards,
//!   products, conditionals, and a capacity metric;
//! - [`choquet`] — the Choquet integral (sorted closed form plus a literal
//!   survival-function quadrature used as an independent oracle),
//!   comonotonicity, and recovery of a capacity from a comonotonically
//!   additive functional;
//! - [`linprog`] — a self-contained dense-inverse revised simplex with a
//!   row-heavy dual route for lattice-sized programs;
//! - [`transport`] — transport plans between two marginal capacities, the
//!   Choquet cost functional, and exact LP minimization over the plan
//!   classes `Ch` (all plans) and `Ch*` (supermodular plans);
//! - [`cyclic`] — plan supports, c-cyclic monotonicity via negative-cycle
//!   detection, and the cycle-based plan improvement step;
//! - [`duality`] — dual potentials, the Kantorovich dual value by ordering
//!   cone enumeration, and potential construction from cyclically monotone
//!   sets.
//!
//! Everything is deterministic: fixed iteration orders, fixed pivot rules,
//! fixed tie-breaks. All values are immutable after construction, so types
//! can be shared freely across threads.

#![forbid(unsafe_code)]

mod error;

pub mod choquet;
pub mod cyclic;
pub mod duality;
pub mod linprog;
pub mod setfunc;
pub mod transport;

pub use error::{Error, Result};
