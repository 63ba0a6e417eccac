//! Exact permanents of 0/1 matrices, random bipartite-graph models, and the
//! finite-n machinery of iterated-logarithm experiments on log-permanent
//! paths: closed-form expectations and bounds, moment verification, and
//! nested-minor trajectories.

pub mod asymptotics;
pub mod error;
pub mod lil;
pub mod models;
pub mod moments;
pub mod numeric;
pub mod perm;

pub use error::{Error, Result};
pub use models::{edge_stats, sample_gnnm, EdgeCountStats, NestedMatrixStream, SplitMix64};
pub use perm::{
    bregman_minc_log_bound, log_permanent, permanent_bruteforce, permanent_glynn, permanent_ryser,
    BigCount, SquareBitMatrix,
};
