//! Equilibrium engine and verification harness for a three-stage
//! certification game in a differentiated duopoly.
//!
//! Firms first commit to price or quantity contracts, an NGO certifier
//! then sets a minimum standard for certified environmental spending, and
//! the firms finally compete in the product market. The crate computes
//! market outcomes for every contract regime with and without
//! certification ([`closed_form`]), re-derives them by iterated best
//! response as an independent check ([`oracle`]), produces adoption
//! thresholds and the certifier's optimal and equilibrium standards in
//! both literal and derived modes ([`standards`]), solves the endogenous
//! contract-choice game ([`game`]), and scans parameter grids to confirm
//! or refute each of the model's numbered claims ([`verifier`]).

pub mod closed_form;
pub mod game;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod standards;
pub mod verifier;

pub use closed_form::{solve_scenario, ScenarioKey, SolveError};
pub use model::{CertProfile, Equilibrium, Firm, ModelParams, Regime, StrategyVar};
pub use oracle::OracleConfig;
pub use standards::{Mode, StandardsBundle};
pub use verifier::{ClaimId, ClaimReport, ParamGrid, VerifyConfig};
