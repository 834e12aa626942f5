//! Transfer of influencing clusters to an unseen design.
//!
//! Candidate designs are pruned by property count, the structurally closest
//! one is selected, its properties are associated with the unknown design's
//! properties by cone-size difference, and its influencing clusters are
//! rewritten through that association and verified.

mod assign;
mod verify;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bmc::BmcError;
use crate::gain::InfluencingClusterMap;
use crate::netlist::{CoiSizes, Netlist};
use crate::store::{query_db1_by_property_count, Db1, DesignRecord};

pub use assign::{associate_greedy, associate_properties, brute_force_cost};
pub use verify::{verify_unknown, Assoc, BaselineRow, CampaignReport, ClusterRun, FrameRow, OnlineConfig, PropertyRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OnlineError {
    #[error("the design database is empty")]
    EmptyDatabase,
    #[error("no design shares a property-count window with {0} properties")]
    EmptyAfterPruning(usize),
    #[error("the unknown design has no properties")]
    NoProperties,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Bmc(#[from] BmcError),
}

/// Design-level structure compared when matching designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFeatures {
    pub ands: usize,
    pub latches: usize,
    pub inputs: usize,
    /// Sum of every property's cone size.
    pub coi_total: usize,
}

impl DesignFeatures {
    pub fn of_record(r: &DesignRecord) -> DesignFeatures {
        DesignFeatures {
            ands: r.num_ands,
            latches: r.num_latches,
            inputs: r.num_inputs,
            coi_total: r.coi_total(),
        }
    }

    pub fn of_netlist(n: &Netlist) -> DesignFeatures {
        DesignFeatures {
            ands: n.num_ands(),
            latches: n.num_latches(),
            inputs: n.num_inputs(),
            coi_total: n.all_properties().iter().map(|p| p.coi.total()).sum(),
        }
    }

    pub fn l1(&self, other: &DesignFeatures) -> u64 {
        let d = |a: usize, b: usize| a.abs_diff(b) as u64;
        d(self.ands, other.ands) + d(self.latches, other.latches) + d(self.inputs, other.inputs) + d(self.coi_total, other.coi_total)
    }
}

pub fn default_delta(num_properties: usize) -> u64 {
    5.max((num_properties as u64 * 2).div_ceil(10))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub design: String,
    pub distance: u64,
    /// Window half-width that produced a non-empty candidate set.
    pub delta: u64,
    pub candidates: Vec<String>,
}

/// Prunes by `P_U - δ < P < P_U + δ`, doubling δ while nothing survives,
/// then returns the candidate closest in [`DesignFeatures`] L1 distance.
pub fn select_similar_design(
    db1: &Db1,
    unknown: &DesignFeatures,
    num_properties: usize,
    delta: u64,
) -> Result<Selection, OnlineError> {
    if db1.designs.is_empty() {
        return Err(OnlineError::EmptyDatabase);
    }
    let widest = db1
        .designs
        .iter()
        .map(|d| d.num_properties.abs_diff(num_properties) as u64 + 1)
        .max()
        .unwrap_or(1);
    let pu = num_properties as i64;
    let mut delta = delta;
    let candidates = loop {
        let found = query_db1_by_property_count(db1, pu - delta as i64, pu + delta as i64);
        if !found.is_empty() {
            break found;
        }
        if delta >= widest {
            return Err(OnlineError::EmptyAfterPruning(num_properties));
        }
        let wider = 1.max(delta * 2);
        log::warn!("no design with {num_properties} +/- {delta} properties; widening to {wider}");
        delta = wider;
    };
    let (distance, design) = candidates
        .iter()
        .map(|id| {
            let rec = db1.design(id).expect("candidate from db1");
            (DesignFeatures::of_record(rec).l1(unknown), id.clone())
        })
        .min()
        .expect("non-empty candidates");
    Ok(Selection {
        design,
        distance,
        delta,
        candidates,
    })
}

/// `entries[i][j]`: cone-size L1 difference between property `i` of the
/// matched design and property `j` of the unknown design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffMatrix {
    pub entries: Vec<Vec<f64>>,
}

impl DiffMatrix {
    pub fn from_sizes(rows: &[CoiSizes], cols: &[CoiSizes]) -> DiffMatrix {
        DiffMatrix {
            entries: rows
                .iter()
                .map(|r| cols.iter().map(|c| r.l1(c) as f64).collect())
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }
}

pub fn build_diff_matrix(b: &DesignRecord, unknown: &Netlist) -> DiffMatrix {
    let rows: Vec<CoiSizes> = b.properties.iter().map(|p| p.coi).collect();
    let cols: Vec<CoiSizes> = unknown.all_properties().iter().map(|p| p.coi).collect();
    DiffMatrix::from_sizes(&rows, &cols)
}

/// Injective map from matched-design properties to unknown-design
/// properties.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PropertyMap {
    pub pairs: BTreeMap<usize, usize>,
    pub unmapped: Vec<usize>,
}

impl PropertyMap {
    pub fn identity(n: usize) -> PropertyMap {
        PropertyMap {
            pairs: (0..n).map(|i| (i, i)).collect(),
            unmapped: Vec::new(),
        }
    }

    pub fn total_cost(&self, m: &DiffMatrix) -> f64 {
        self.pairs.iter().map(|(&r, &c)| m.entries[r][c]).sum()
    }
}

/// Rewrites each distinct influencing cluster through `map`. Unmapped
/// members are dropped; clusters left with fewer than 2 members vanish.
pub fn convert_clusters(inf: &InfluencingClusterMap, map: &PropertyMap) -> Vec<Vec<usize>> {
    let sources: BTreeSet<&Vec<usize>> = inf.entries.values().map(|e| &e.cluster).collect();
    let mut out = BTreeSet::new();
    for cluster in sources {
        let members: BTreeSet<usize> = cluster.iter().filter_map(|p| map.pairs.get(p).copied()).collect();
        if members.len() < cluster.len() {
            log::warn!("cluster {cluster:?} loses {} unmapped members", cluster.len() - members.len());
        }
        if members.len() >= 2 {
            out.insert(members.into_iter().collect::<Vec<_>>());
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmc::{Status, TimeMetric, VerdictSummary};
    use crate::gain::Influence;
    use crate::store::PropertyRecord;

    fn record(name: &str, ands: usize, props: usize) -> DesignRecord {
        DesignRecord {
            design: name.into(),
            num_inputs: 2,
            num_latches: 3,
            num_ands: ands,
            num_properties: props,
            properties: (0..props)
                .map(|_| PropertyRecord {
                    coi: CoiSizes {
                        inputs: 1,
                        latches: 1,
                        ands: 1,
                    },
                    verdict: VerdictSummary {
                        status: Status::Undet,
                        depth: 0,
                        time: 0.0,
                    },
                })
                .collect(),
        }
    }

    fn db(designs: Vec<DesignRecord>) -> Db1 {
        Db1 {
            time_unit: TimeMetric::Work,
            designs,
        }
    }

    #[test]
    fn default_delta_values() {
        assert_eq!(default_delta(3), 5);
        assert_eq!(default_delta(26), 6);
        assert_eq!(default_delta(100), 20);
    }

    #[test]
    fn nearest_candidate_wins() {
        let d = db(vec![record("far", 19, 4), record("near", 15, 4), record("twin", 10, 4)]);
        let unknown = DesignFeatures::of_record(&record("u", 10, 4));
        let s = select_similar_design(&d, &unknown, 4, 5).unwrap();
        assert_eq!((s.design.as_str(), s.distance), ("twin", 0));
        let d = db(vec![record("far", 19, 4), record("near", 15, 4)]);
        assert_eq!(select_similar_design(&d, &unknown, 4, 5).unwrap().design, "near");
    }

    #[test]
    fn tie_goes_to_smaller_id() {
        let d = db(vec![record("b", 12, 4), record("a", 8, 4)]);
        let unknown = DesignFeatures::of_record(&record("u", 10, 4));
        assert_eq!(select_similar_design(&d, &unknown, 4, 5).unwrap().design, "a");
    }

    #[test]
    fn zero_delta_widens() {
        let d = db(vec![record("x", 10, 7)]);
        let unknown = DesignFeatures::of_record(&record("u", 10, 4));
        let s = select_similar_design(&d, &unknown, 4, 0).unwrap();
        assert_eq!(s.design, "x");
        assert_eq!(s.delta, 4);
        assert_eq!(select_similar_design(&db(vec![]), &unknown, 4, 0), Err(OnlineError::EmptyDatabase));
    }

    #[test]
    fn diff_entries() {
        let empty = CoiSizes::default();
        let full = CoiSizes {
            inputs: 2,
            latches: 3,
            ands: 4,
        };
        let m = DiffMatrix::from_sizes(&[empty, full], &[full, empty]);
        assert_eq!(m.entries, vec![vec![9.0, 0.0], vec![0.0, 9.0]]);
    }

    fn inf(clusters: &[(usize, &[usize])]) -> InfluencingClusterMap {
        InfluencingClusterMap {
            design: "b".into(),
            entries: clusters
                .iter()
                .map(|&(p, c)| {
                    (
                        p,
                        Influence {
                            cluster: c.to_vec(),
                            records: vec![],
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn conversion() {
        let m = inf(&[(1, &[1, 3, 4]), (3, &[1, 3, 4]), (4, &[1, 4])]);
        let map = PropertyMap {
            pairs: [(1, 3), (3, 1), (4, 2)].into(),
            unmapped: vec![],
        };
        assert_eq!(convert_clusters(&m, &map), vec![vec![1, 2, 3], vec![2, 3]]);
        let id = PropertyMap::identity(5);
        assert_eq!(convert_clusters(&m, &id), vec![vec![1, 3, 4], vec![1, 4]]);
        let partial = PropertyMap {
            pairs: [(1, 0), (3, 1)].into(),
            unmapped: vec![4],
        };
        assert_eq!(convert_clusters(&m, &partial), vec![vec![0, 1]]);
    }

    #[test]
    fn same_image_clusters_merge() {
        let m = inf(&[(0, &[0, 1]), (2, &[2, 3])]);
        let map = PropertyMap {
            pairs: [(0, 5), (1, 6), (2, 6), (3, 5)].into(),
            unmapped: vec![],
        };
        assert_eq!(convert_clusters(&m, &map), vec![vec![5, 6]]);
    }
}
