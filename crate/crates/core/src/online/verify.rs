use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bmc::{
    check_cluster_with_budget, check_single, merge_frames, replay_cex, BmcConfig, Budget, FrameStat, Status,
    TimeMetric, Verdict,
};
use crate::gain::{compute_gain, GainMode, Transition};
use crate::netlist::Netlist;
use crate::par::{self, Workers};
use crate::store::Databases;

use super::{
    associate_greedy, associate_properties, build_diff_matrix, convert_clusters, default_delta,
    select_similar_design, DesignFeatures, OnlineError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assoc {
    #[default]
    Optimal,
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineConfig {
    /// Per-property settings; `bmc.budget` is the per-property allowance T.
    pub bmc: BmcConfig,
    pub delta: Option<u64>,
    pub assoc: Assoc,
    pub baseline: bool,
    pub workers: Workers,
    pub gain_mode: GainMode,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        OnlineConfig {
            bmc: BmcConfig::default(),
            delta: None,
            assoc: Assoc::Optimal,
            baseline: false,
            workers: Workers::SEQUENTIAL,
            gain_mode: GainMode::Literal,
        }
    }
}

/// Per-frame statistics in the campaign's time unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub frame: u32,
    pub conflicts: u64,
    pub time: f64,
    pub cumulative: f64,
}

impl FrameRow {
    pub fn from_stats(stats: &[FrameStat], metric: TimeMetric) -> Vec<FrameRow> {
        stats
            .iter()
            .map(|s| FrameRow {
                frame: s.frame,
                conflicts: s.conflicts,
                time: s.solve_cost(metric),
                cumulative: s.cumulative_cost(metric),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRun {
    pub members: Vec<usize>,
    pub budget: Budget,
    pub exhausted: bool,
    pub conflicts: u64,
    pub frames: Vec<FrameRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub status: Status,
    pub depth: u32,
    pub time: f64,
    pub conflicts: u64,
    pub transition: Transition,
    pub gain: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyRow {
    pub property: usize,
    /// Members of the run that produced the verdict.
    pub cluster: Vec<usize>,
    pub status: Status,
    pub depth: u32,
    pub time: f64,
    pub conflicts: u64,
    pub baseline: Option<BaselineRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub design: String,
    pub num_properties: usize,
    pub matched_design: String,
    pub distance: u64,
    pub delta: u64,
    pub time_unit: TimeMetric,
    /// (matched-design property, unknown-design property)
    pub property_map: Vec<(usize, usize)>,
    pub unmapped: Vec<usize>,
    pub runs: Vec<ClusterRun>,
    pub properties: Vec<PropertyRow>,
    /// Clustered runs summed per frame.
    pub frames: Vec<FrameRow>,
    /// Baseline standalone runs summed per frame.
    pub baseline_frames: Option<Vec<FrameRow>>,
}

/// Whether `a` is a better verdict than `b` for the same property.
fn better(a: &Verdict, b: &Verdict, metric: TimeMetric) -> bool {
    let key = |v: &Verdict| (v.status.is_resolved(), v.depth);
    match key(a).cmp(&key(b)) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a.time(metric) < b.time(metric),
    }
}

fn check_replay(n: &Netlist, p: usize, v: &Verdict) -> Result<(), OnlineError> {
    if v.status == Status::Sat {
        let cex = v.cex.as_ref().ok_or_else(|| OnlineError::Invariant(format!("SAT verdict of property {p} lacks a trace")))?;
        if !replay_cex(n, p, cex)? {
            return Err(OnlineError::Invariant(format!("trace of property {p} does not replay")));
        }
    }
    Ok(())
}

/// Runs the online pipeline for `unknown` against the offline databases.
pub fn verify_unknown(unknown: &Netlist, dbs: &Databases, cfg: &OnlineConfig) -> Result<CampaignReport, OnlineError> {
    cfg.bmc.validate()?;
    let pu = unknown.num_properties();
    if pu == 0 {
        return Err(OnlineError::NoProperties);
    }
    let metric = cfg.bmc.budget.time_metric();
    let features = DesignFeatures::of_netlist(unknown);
    let delta = cfg.delta.unwrap_or_else(|| default_delta(pu));
    let selection = select_similar_design(&dbs.db1, &features, pu, delta)?;
    log::info!(
        "matched {} to {} (distance {}, delta {})",
        unknown.name,
        selection.design,
        selection.distance,
        selection.delta
    );
    let b = dbs.db1.design(&selection.design).expect("selected from db1");
    let diff = build_diff_matrix(b, unknown);
    let map = match cfg.assoc {
        Assoc::Optimal => associate_properties(&diff),
        Assoc::Greedy => associate_greedy(&diff),
    };
    let influence = dbs.db3.influence_map(&selection.design);
    let clusters = convert_clusters(&influence, &map);

    // overlapping clusters share the covered properties' allowance
    let covered: BTreeSet<usize> = clusters.iter().flatten().copied().collect();
    let size_sum: usize = clusters.iter().map(Vec::len).sum();
    let mut jobs: Vec<(Vec<usize>, Budget)> = clusters
        .iter()
        .map(|c| {
            let share = c.len() as f64 * covered.len() as f64 / size_sum as f64;
            let mut budget = cfg.bmc.budget.scaled_by(share);
            if !budget.is_positive() {
                budget = Budget::Conflicts(1);
            }
            (c.clone(), budget)
        })
        .collect();
    for p in (0..pu).filter(|p| !covered.contains(p)) {
        jobs.push((vec![p], cfg.bmc.budget));
    }

    let results = par::map(&jobs, cfg.workers, |(members, budget)| {
        check_cluster_with_budget(unknown, members, *budget, &cfg.bmc)
    });
    let mut runs = Vec::with_capacity(jobs.len());
    let mut best: Vec<Option<(usize, Verdict)>> = vec![None; pu];
    for (idx, (result, (members, budget))) in results.into_iter().zip(&jobs).enumerate() {
        let cv = result?;
        for (&p, v) in &cv.per_property {
            check_replay(unknown, p, v)?;
            let replace = match &best[p] {
                None => true,
                Some((_, cur)) => better(v, cur, metric),
            };
            if replace {
                best[p] = Some((idx, v.clone()));
            }
        }
        runs.push((
            ClusterRun {
                members: members.clone(),
                budget: *budget,
                exhausted: cv.exhausted,
                conflicts: cv.total_conflicts,
                frames: FrameRow::from_stats(&cv.per_frame, metric),
            },
            cv.per_frame,
        ));
    }

    let baseline = if cfg.baseline {
        let props: Vec<usize> = (0..pu).collect();
        let verdicts = par::map(&props, cfg.workers, |&p| check_single(unknown, p, &cfg.bmc));
        Some(verdicts.into_iter().collect::<Result<Vec<Verdict>, _>>()?)
    } else {
        None
    };

    let mut properties = Vec::with_capacity(pu);
    for (p, entry) in best.into_iter().enumerate() {
        let (idx, v) = entry.ok_or_else(|| OnlineError::Invariant(format!("property {p} received no verdict")))?;
        let cluster = jobs[idx].0.clone();
        let baseline_row = baseline.as_ref().map(|all| {
            let s = &all[p];
            let g = compute_gain(p, &cluster, &s.summary(metric), &v.summary(metric), cfg.gain_mode);
            BaselineRow {
                status: s.status,
                depth: s.depth,
                time: s.time(metric),
                conflicts: s.conflicts(),
                transition: g.transition,
                gain: g.value,
                degenerate: g.degenerate,
            }
        });
        properties.push(PropertyRow {
            property: p,
            cluster,
            status: v.status,
            depth: v.depth,
            time: v.time(metric),
            conflicts: v.conflicts(),
            baseline: baseline_row,
        });
    }

    let frames = FrameRow::from_stats(&merge_frames(runs.iter().map(|(_, f)| f.as_slice())), metric);
    let baseline_frames = baseline
        .as_ref()
        .map(|all| FrameRow::from_stats(&merge_frames(all.iter().map(|v| v.per_frame.as_slice())), metric));
    Ok(CampaignReport {
        design: unknown.name.clone(),
        num_properties: pu,
        matched_design: selection.design,
        distance: selection.distance,
        delta: selection.delta,
        time_unit: metric,
        property_map: map.pairs.into_iter().collect(),
        unmapped: map.unmapped,
        runs: runs.into_iter().map(|(r, _)| r).collect(),
        properties,
        frames,
        baseline_frames,
    })
}
