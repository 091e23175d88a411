//! Robust capacity-expansion planning for single-node renewable energy
//! systems.
//!
//! A design is optimised on one reference weather year, tested against
//! every other year, and the optimisation problem is modified from the
//! detected supply gaps until the design serves all years.

pub mod catalog;
pub mod config;
pub mod critical_periods;
pub mod design;
pub mod error;
pub mod feasibility;
pub mod fixtures;
pub mod io;
pub mod lp;
pub mod model;
pub mod modifications;
pub mod report;
pub mod robustify;
pub mod scenario;
pub mod solver;
pub mod stats;

pub use catalog::{Annualization, CostModel, TechKind, Technology, TechnologyCatalog};
pub use design::SystemDesign;
pub use error::{Error, Result};
pub use scenario::Scenario;
