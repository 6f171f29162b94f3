//! Analysis on the belief simplex: best-response cells, the prior utility as
//! a piecewise-linear function, its concave closure, trust margins and
//! alignment between utilities.

mod alignment;
mod margin;
mod partition;
mod pwl;

pub use alignment::{classify_alignment, classify_defender_alignment, Alignment, AlignmentReport};
pub use margin::{manageability, max_trust_margin, trust_margin, Manageability, MARGIN_TOL};
pub use partition::{
    belief_partition, chi_bound, identifiable_region, sample_partition, BeliefPartition, Cell,
    SamplePartition, GEOM_TOL,
};
pub use pwl::{
    concavify, optimal_manipulation, prior_utility_pwl, Manipulation, PwlFunction, Segment,
};
pub(crate) use pwl::manipulation_of;
