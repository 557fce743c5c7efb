//! Mining toolkit for no-limit hold'em hand histories.
//!
//! The pipeline runs in stages: parse raw hand-history text ([`handlog`]),
//! replay each hand into per-decision game states ([`replay`]), attach equity
//! estimates and normalized features to every revealed decision ([`features`],
//! [`equity`]), cluster the resulting action vectors with a mixed
//! numeric/nominal mixture model ([`em`]), and aggregate per-player cluster
//! frequencies into strategy profiles ([`profile`]).

pub mod arff;
pub mod cards;
pub mod data;
pub mod em;
pub mod equity;
pub mod eval;
pub mod features;
pub mod fixtures;
pub mod handlog;
pub mod money;
pub mod pipeline;
pub mod profile;
pub mod replay;
pub mod report;
pub mod synth;
mod util;

pub use cards::Card;
pub use money::Cents;
