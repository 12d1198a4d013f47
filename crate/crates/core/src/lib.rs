pub mod decomposition;
pub mod dp;
pub mod error;
pub mod formats;
pub mod graph;
pub mod kernel;
pub mod model;
pub mod oracle;
pub mod perfect_xp;
pub mod rational;
pub mod reductions;

pub use error::{Error, Result};
pub use graph::Graph;
pub use model::{Assignment, Notion, SchellingInstance, UtilityProfile};
pub use rational::Rational;
