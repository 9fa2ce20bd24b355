//! Distance and signed-area formation control for planar
//! leader-first-follower formations of single-integrator agents.
//!
//! The crate covers the whole pipeline: building and checking the directed
//! formation graph ([`graph`], [`rigidity`]), planar geometry and the
//! desired-formation record ([`geometry`], [`formation`]), gain-ratio
//! synthesis from quartic root analysis ([`gains`], [`poly`]), closed-loop
//! dynamics and simulation ([`dynamics`], [`sim`]), and the file-driven
//! experiment harness behind the `formctl` binary ([`config`], [`harness`],
//! [`csvio`]).

pub mod config;
pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod formation;
pub mod gains;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod poly;
pub mod rigidity;
pub mod sim;

pub use error::{Error, Result};
pub use formation::{FormationSpec, TriangleSides};
pub use gains::{GainSchedule, QuarticCoefficients};
pub use geometry::{Orientation, Point};
pub use graph::{build_lff, DirectedFormationGraph, Triangle, TriangleList};
pub use rigidity::Framework;
