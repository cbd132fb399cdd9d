//! Arithmetic dynamics of the Hessian transformation of plane cubics over
//! finite fields.
//!
//! The Hessian of a smooth plane cubic with j-invariant `j != 0` is again a
//! cubic, with j-invariant `(6912 - j)^3 / (27 j^2)`. Iterating this rule on
//! P^1(F_q) produces a functional graph whose structure is governed by the
//! degree-3 endomorphism `psi` of the model curve `y^2 = x^3 + k/4` (for
//! k = -6912, the curve `y^2 = x^3 - 1728`): `psi` squares to multiplication
//! by -3, its projection to x-coordinates realizes the Hessian map after
//! cubing, and the trees hanging off periodic points are complete ternary.
//!
//! The crate provides:
//! - [`field`]: exact F_p and F_{p^2} arithmetic (square roots, cube roots,
//!   residuosity);
//! - [`projmaps`]: the rational self-maps of P^1 driving the dynamics;
//! - [`curves`]: short Weierstrass curves, the model curve and `psi`;
//! - [`hessian`]: the Hessian of cubic forms and of Weierstrass curves,
//!   twist behaviour and trace congruences;
//! - [`graphs`]: functional-graph decomposition and exhaustive verifiers for
//!   the structure theorems;
//! - [`report`]: DOT / JSON / CSV renderings of graphs and reports.

pub mod curves;
pub mod field;
pub mod graphs;
pub mod hessian;
pub mod projmaps;
pub mod report;

pub use curves::{CurveError, CurvePoint, ModelCurve, TwistClass, WeierstrassCurve};
pub use field::{FieldError, FiniteField, Fp2, PrimeField, QuadExtField};
pub use graphs::{CheckResult, FunctionalGraph, StructureReport};
pub use projmaps::ProjPoint;
