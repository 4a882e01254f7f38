//! An evolutionary engine that learns dynamical laws from state/value time
//! series.
//!
//! Two genomes are co-evolved against a recorded trajectory:
//!
//! - a symbolic **value tree** ([`expr`]) whose discrete difference models
//!   the distance between consecutive observations, scored by negated
//!   squared error ([`objectives::value_fitness`]);
//! - a matrix-valued **decision tree** ([`gates`]) over eight 2x2 gates
//!   whose resolved matrix yields, through eigendecomposition, the
//!   probability of betting on each state, scored by the expected value of
//!   the induced betting game ([`objectives::decision_fitness`]).
//!
//! The [`evolve`] engine runs the genetic search, [`theory`] bundles the two
//! winners and uses them to reconstruct the training series and forecast
//! beyond it, and [`datagen`] provides the bundled experiments.

pub mod cfgtext;
pub mod datagen;
pub mod evolve;
pub mod expr;
pub mod gates;
pub mod objectives;
pub mod series;
pub mod sexpr;
pub mod theory;

pub use evolve::{GenomeOps, GpConfig, Individual, RunHistory};
pub use series::{Sample, SeriesStats, State, TimeSeries};
pub use theory::{Forecast, ReconstructionMode, Theory};
