//! Multi-property bounded model checking.
//!
//! Safety properties of an And-Inverter Graph are grouped by the functional
//! similarity of their cones of influence and verified cluster by cluster in
//! shared incremental SAT sessions. Offline runs over known designs record
//! which cluster helps each property most; the online phase transfers that
//! knowledge to an unseen design with a similar structure.
//!
//! Module overview:
//!
//! * [`netlist`]: AIGER parsing/serialization, cone of influence, unfolding.
//! * [`sat`]: CDCL solver with assumptions and conflict accounting.
//! * [`bmc`]: single-property and cluster BMC runs.
//! * [`embed`]: simulation signatures, tensor interchange, PCA.
//! * [`cluster`]: k-means / k-medoids and overlapping cluster families.
//! * [`gain`]: status transitions, gain values, influencing clusters.
//! * [`store`]: the three offline databases.
//! * [`online`]: design matching, property association, cluster conversion.
//! * [`campaign`]: offline build, online verification and report commands.

pub mod bmc;
pub mod campaign;
pub mod cluster;
pub mod embed;
pub mod gain;
pub mod generate;
pub mod netlist;
pub mod online;
pub mod par;
pub mod sat;
pub mod store;

pub use bmc::{BmcConfig, Budget, ClusterVerdict, Status, TimeMetric, Verdict, VerdictSummary};
pub use netlist::{Lit, Netlist, UnfoldMode};
