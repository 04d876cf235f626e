//! Distributed backup placement in graphs of bounded neighborhood
//! independence.
//!
//! Every node picks the next-larger neighbor ID (wrapping around) as its
//! backup in a single round. In a graph whose neighborhoods contain no
//! independent set larger than `c`, no node is picked by more than `c`
//! neighbors, and the picked edges form a subgraph `G'` of maximum degree
//! at most `c + 1`. The crate builds on that:
//!
//! - [`graph`], [`generators`]: graphs, the edge-list format, unit-disk,
//!   line-graph and `G(n, p)` generators.
//! - [`sim`]: a synchronous message-passing simulator with round counting.
//! - [`placement`]: the one-round placement program and load reports.
//! - [`matching`]: maximal matching in `O(Δ + log* n)` rounds and the
//!   iterated `(2 + ε)`-approximation of maximum matching.
//! - [`selfstab`]: fault injection into corruptible RAM and stabilization
//!   measurement, plus composition of placement with another program.
//! - [`oracle`]: exact reference solvers used for verification.
//! - [`cli`]: the experiment harness behind `bpsim`.

pub mod cli;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod placement;
pub mod selfstab;
pub mod sim;

pub use graph::{load_graph, max_degree, Graph, GraphError, NodeId};
pub use matching::{Matching, MatchingError};
pub use placement::{next_modulo, run_backup_placement, IsolatedMode, Placement};
