//! Numerical engine for Finsler (α, β)-metrics `F = α φ(β/α)`.
//!
//! The crate computes the fundamental tensor, Cartan torsion, spray and
//! Ricci curvatures of single-chart (α, β)-metrics, checks the algebraic
//! identities satisfied by these objects along the scalar Ricci flow, and
//! integrates the un-normalized and normalized scalar flows on parametric
//! metric families.

pub mod chart_metric;
pub mod error;
pub mod jet_calculus;
pub mod linalg;
pub mod report;
pub mod tensor_lab;
pub mod curvature_engine;
pub mod flow_lab;
pub mod identity_auditor;

pub use chart_metric::{fixtures, FinslerMetricSpec, TangentSample};
pub use error::{FinslerError, Result};
