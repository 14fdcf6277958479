//! Demand, preference structure, and competitive equilibrium in exchange
//! economies with indivisible goods, money, and income effects.
//!
//! Everything is computed in exact rational arithmetic. The central device is
//! the family of Hicksian valuations of an agent: at a fixed utility level,
//! compensated demand is the demand of a quasilinear (transferable-utility)
//! valuation, which turns questions about income effects into questions about
//! TU economies that can be decided exactly.

pub mod counterexample;
pub mod demand;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod hicksian;
pub mod linalg;
pub mod linsys;
pub mod model;
pub mod rational;
pub mod structure;
pub mod unimodular;

pub use counterexample::Counterexample;
pub use demand::DemandSet;
pub use equilibrium::{
    Allocation, CEOutcome, DualityReport, ExpenditureBoxes, IncomeParams, MarshallianDecision,
    Refutation, SupportOutcome, TuOutcome,
};
pub use error::{Error, Result};
pub use hicksian::HicksianEconomy;
pub use model::{
    Agent, Bundle, ConsumptionBundle, Economy, EndowmentAllocation, Level, PriceVector,
    TabulatedFamily, TuAgent, TuEconomy, UtilityModel, Valuation,
};
pub use rational::Rat;
pub use structure::{GrossViolation, SubstitutesViolation};
pub use unimodular::DemandTypeVectorSet;
