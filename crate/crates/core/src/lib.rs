//! Site and bond percolation on random recursive trees.
//!
//! Trees, percolation partitions and cluster censuses live in [`tree`] and
//! [`percolation`]; the continuous-time branching process in [`branching`];
//! closed-form limits and limit samplers in [`limits`]; exact laws for small
//! trees in [`oracle`].
//!
//! ```
//! use rrt_percolation::{census, grow_uniform, mark_sites, site_partition, stream_rng};
//!
//! let mut rng = stream_rng(42, "example", 0);
//! let tree = grow_uniform(10_000, &mut rng)?;
//! let marks = mark_sites(&tree, 0.6, &mut rng)?;
//! let clusters = site_partition(&tree, &marks)?;
//! let x = census(&clusters);
//! assert_eq!(x.n(), 10_000);
//! # Ok::<(), rrt_percolation::Error>(())
//! ```

pub mod branching;
pub mod error;
pub mod limits;
pub mod oracle;
pub mod percolation;
pub mod rng;
pub mod special;
pub mod stats;
pub mod tracked;
pub mod tree;

pub use error::{Error, Result};
pub use percolation::{
    bond_partition, census, census_step, census_transitions, root_isolation, site_partition, ClusterCensus,
    ClusterPartition, IsolatedPartition, PercolationKind,
};
pub use rng::{stream_rng, stream_seed, SimRng};
pub use tracked::{sample_tracked_clusters, TrackedClusters};
pub use tree::{grow_uniform, grow_yule, mark_sites, RecursiveTree, SiteMarks};
