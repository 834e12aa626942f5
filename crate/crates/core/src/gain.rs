//! Status transitions between standalone and cluster runs, per-property
//! gain values, and influencing-cluster selection.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bmc::{Status, VerdictSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainError {
    #[error("no standalone verdict for property {0}")]
    MissingStandaloneVerdict(usize),
    #[error("no gain records for property {0}")]
    NoRecords(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Transition {
    UndetToSat,
    UndetToUnsat,
    SatToSat,
    UnsatToUnsat,
    UndetToUndet,
    SatToUndet,
    UnsatToUndet,
    Other,
}

impl Transition {
    pub fn rank(self) -> u8 {
        match self {
            Transition::UndetToSat | Transition::UndetToUnsat => 5,
            Transition::SatToSat | Transition::UnsatToUnsat => 4,
            Transition::UndetToUndet => 3,
            Transition::SatToUndet => 2,
            Transition::UnsatToUndet => 1,
            Transition::Other => 0,
        }
    }

    /// Position of the non-zero entry in the six-element gain vector.
    pub fn slot(self) -> Option<usize> {
        match self {
            Transition::UndetToSat => Some(0),
            Transition::UndetToUnsat => Some(1),
            Transition::SatToSat | Transition::UnsatToUnsat => Some(2),
            Transition::UndetToUndet => Some(3),
            Transition::SatToUndet => Some(4),
            Transition::UnsatToUndet => Some(5),
            Transition::Other => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Transition::UndetToSat => "UNDET_TO_SAT",
            Transition::UndetToUnsat => "UNDET_TO_UNSAT",
            Transition::SatToSat => "SAT_TO_SAT",
            Transition::UnsatToUnsat => "UNSAT_TO_UNSAT",
            Transition::UndetToUndet => "UNDET_TO_UNDET",
            Transition::SatToUndet => "SAT_TO_UNDET",
            Transition::UnsatToUndet => "UNSAT_TO_UNDET",
            Transition::Other => "OTHER",
        }
    }
}

impl std::fmt::Display for Transition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(standalone: Status, clustered: Status) -> Transition {
    use Status::*;
    match (standalone, clustered) {
        (Undet, Sat) => Transition::UndetToSat,
        (Undet, Unsat) => Transition::UndetToUnsat,
        (Sat, Sat) => Transition::SatToSat,
        (Unsat, Unsat) => Transition::UnsatToUnsat,
        (Undet, Undet) => Transition::UndetToUndet,
        (Sat, Undet) => Transition::SatToUndet,
        (Unsat, Undet) => Transition::UnsatToUndet,
        (Sat, Unsat) | (Unsat, Sat) => Transition::Other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMode {
    /// `t_c / n` for newly resolved properties.
    #[default]
    Literal,
    /// `-t_c / n`: faster resolution in the cluster counts as more gain.
    SatInverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    pub property: usize,
    pub cluster: Vec<usize>,
    pub transition: Transition,
    pub value: f64,
    pub vector6: [f64; 6],
    /// The formula's divisor was zero and the value was defined as 0.
    pub degenerate: bool,
}

/// Gain value and degeneracy flag for one transition.
pub fn gain_value(
    transition: Transition,
    standalone: &VerdictSummary,
    clustered: &VerdictSummary,
    cluster_size: usize,
    mode: GainMode,
) -> (f64, bool) {
    let ratio = |num: f64, den: f64| if den == 0.0 { (0.0, true) } else { (num / den, false) };
    match transition {
        Transition::UndetToSat | Transition::UndetToUnsat => {
            let others = cluster_size.saturating_sub(1) as f64;
            let (v, degenerate) = ratio(clustered.time, others);
            match mode {
                GainMode::Literal => (v, degenerate),
                GainMode::SatInverse => (-v, degenerate),
            }
        }
        Transition::SatToSat | Transition::UnsatToUnsat => {
            ratio(standalone.time - clustered.time, standalone.time)
        }
        Transition::UndetToUndet | Transition::SatToUndet | Transition::UnsatToUndet => {
            let ds = standalone.depth as f64;
            ratio(clustered.depth as f64 - ds, ds)
        }
        Transition::Other => (0.0, false),
    }
}

pub fn compute_gain(
    property: usize,
    cluster: &[usize],
    standalone: &VerdictSummary,
    clustered: &VerdictSummary,
    mode: GainMode,
) -> GainRecord {
    let transition = classify(standalone.status, clustered.status);
    let (value, degenerate) = gain_value(transition, standalone, clustered, cluster.len(), mode);
    let mut vector6 = [0.0; 6];
    if let Some(slot) = transition.slot() {
        vector6[slot] = value;
    }
    let mut members = cluster.to_vec();
    members.sort_unstable();
    GainRecord {
        property,
        cluster: members,
        transition,
        value,
        vector6,
        degenerate,
    }
}

/// Total order on candidate records: higher transition rank, then higher
/// value, then smaller cluster, then lexicographically smaller members.
pub fn compare_records(a: &GainRecord, b: &GainRecord) -> Ordering {
    a.transition
        .rank()
        .cmp(&b.transition.rank())
        .then(a.value.total_cmp(&b.value))
        .then(Reverse(a.cluster.len()).cmp(&Reverse(b.cluster.len())))
        .then(Reverse(&a.cluster).cmp(&Reverse(&b.cluster)))
}

/// The best record of `property` among `records`.
pub fn influencing_record(property: usize, records: &[GainRecord]) -> Result<&GainRecord, GainError> {
    records
        .iter()
        .filter(|r| r.property == property)
        .max_by(|a, b| compare_records(a, b))
        .ok_or(GainError::NoRecords(property))
}

pub fn influencing_cluster(property: usize, records: &[GainRecord]) -> Result<Vec<usize>, GainError> {
    influencing_record(property, records).map(|r| r.cluster.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Influence {
    pub cluster: Vec<usize>,
    /// Every record of the property, one per cluster containing it.
    pub records: Vec<GainRecord>,
}

/// Property → influencing cluster for one design. Properties that belong to
/// no cluster are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluencingClusterMap {
    pub design: String,
    pub entries: BTreeMap<usize, Influence>,
}

impl InfluencingClusterMap {
    pub fn cluster_of(&self, property: usize) -> Option<&[usize]> {
        self.entries.get(&property).map(|e| e.cluster.as_slice())
    }
}

/// One executed cluster: its members and the per-member verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutcome {
    pub members: Vec<usize>,
    pub verdicts: BTreeMap<usize, VerdictSummary>,
}

pub fn build_influencing_map(
    design: &str,
    standalone: &BTreeMap<usize, VerdictSummary>,
    clusters: &[ClusterOutcome],
    mode: GainMode,
) -> Result<InfluencingClusterMap, GainError> {
    let mut per_property: BTreeMap<usize, Vec<GainRecord>> = BTreeMap::new();
    for outcome in clusters {
        for &p in &outcome.members {
            let s = standalone.get(&p).ok_or(GainError::MissingStandaloneVerdict(p))?;
            let Some(c) = outcome.verdicts.get(&p) else {
                continue;
            };
            per_property
                .entry(p)
                .or_default()
                .push(compute_gain(p, &outcome.members, s, c, mode));
        }
    }
    let mut entries = BTreeMap::new();
    for (p, records) in per_property {
        let cluster = influencing_cluster(p, &records)?;
        entries.insert(p, Influence { cluster, records });
    }
    Ok(InfluencingClusterMap {
        design: design.to_string(),
        entries,
    })
}
