//! Exact computation kernel for monotone valued differential fields of Hahn
//! type k((t^Gamma)) with a twisted derivation determined by an additive map
//! c from the value group into the coefficient field.

pub mod cli;
pub mod cmap;
pub mod dhensel;
pub mod coeff;
pub mod factor;
pub mod group;
pub mod hahn;
pub mod linalg;
pub mod linop;
pub mod logderiv;
pub mod parse;
pub mod poly;
pub mod quadext;
pub mod suite;
pub mod ratfunc;

pub use cmap::{classify_constants, AdditiveMap, ConstantsClassification, ConstantsVerdict};
pub use coeff::{Coeff, CoeffField, DiffField};
pub use group::{FgSubgroup, GroupElement, ValueGroup};
pub use dhensel::{dhensel_lift, hensel_nth_root, purity_witness, DiffPoly, LiftError, LiftResult};
pub use hahn::{FieldSpec, HahnField, HahnSeries, Series, Valuation};
pub use linop::{solve_linear, LinearDiffOperator, LinearSolution};
pub use logderiv::{dagger_saturation, log_derivative_membership, DaggerCertificate};
pub use quadext::{ext_constant_scan, QuadTower};
pub use suite::{run_example_suite, ExampleReport};
