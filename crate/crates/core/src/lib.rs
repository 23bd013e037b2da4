//! Minimum-cost seeding of threshold-based influence diffusion.
//!
//! Two problems are covered on undirected graphs with integer thresholds:
//! buying a *target set* of minimum total cost ([`wtss`]) and assigning
//! integer *partial incentives* of minimum total amount ([`tpi`]). Both must
//! make the deterministic activation process of [`diffusion`] reach every
//! vertex. [`baselines`] holds the degree-based competitors, [`oracle`] the
//! exact solvers and the hardness gadget used to check everything on small
//! instances, and [`bench`] the experiment harness.

pub mod baselines;
pub mod bench;
pub mod diffusion;
pub mod graph;
mod heap;
pub mod oracle;
pub mod thresholds;
pub mod tpi;
pub mod wtss;

pub use diffusion::{
    diffuse_incentives, diffuse_set, is_target_set, is_target_vector, DiffusionTrace, IncentiveVector, TargetSet,
};
pub use graph::{load_edge_list, Graph, GraphError, Vertex};
pub use thresholds::{CostMap, ThresholdMap, ValueError};
pub use tpi::tpi;
pub use wtss::wtss;
