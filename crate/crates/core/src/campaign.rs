//! The offline database build, online verification output, and figure data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bmc::{check_cluster, check_single, BmcConfig, BmcError, TimeMetric, Verdict, VerdictSummary};
use crate::cluster::{build_family, ClusterError, FamilyOptions};
use crate::embed::{
    design_signatures, fit_pca, import_tensor, EmbedError, EmbeddingTensor, SignatureOptions,
};
use crate::gain::{build_influencing_map, ClusterOutcome, GainError, GainMode};
use crate::netlist::{Netlist, NetlistError};
use crate::online::{verify_unknown, CampaignReport, FrameRow, OnlineConfig, OnlineError};
use crate::par::{self, Workers};
use crate::store::{
    Databases, Db1, Db2, Db3, DesignRecord, EmbeddingRecord, PcaSidecar, PropertyRecord, StoreError, PCA_FILE,
};

pub const CAMPAIGN_JSON: &str = "campaign.json";
pub const CAMPAIGN_TSV: &str = "report.tsv";
pub const OFFLINE_LOG: &str = "runs.jsonl";

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("no designs given")]
    NoDesigns,
    #[error("no design could be loaded")]
    NoLoadableDesign,
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: NetlistError },
    #[error("design name {0} appears twice")]
    DuplicateDesign(String),
    #[error("no tensor for property {property} of design {design}")]
    MissingTensor { design: String, property: usize },
    #[error("missing artifact {0}")]
    MissingArtifact(PathBuf),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Bmc(#[from] BmcError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Gain(#[from] GainError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Online(#[from] OnlineError),
}

impl CampaignError {
    /// Errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            CampaignError::Online(OnlineError::Invariant(_)) | CampaignError::Gain(GainError::MissingStandaloneVerdict(_))
        )
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CampaignError {
    CampaignError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmbedSource {
    Simulation(SignatureOptions),
    /// Directory of tensor files, one per (design, property).
    Import(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineConfig {
    pub bmc: BmcConfig,
    pub embed: EmbedSource,
    pub pca_threshold: f64,
    pub family: FamilyOptions,
    pub gain_mode: GainMode,
    pub workers: Workers,
}

impl Default for OfflineConfig {
    fn default() -> Self {
        OfflineConfig {
            bmc: BmcConfig::default(),
            embed: EmbedSource::Simulation(SignatureOptions::default()),
            pca_threshold: 0.95,
            family: FamilyOptions::default(),
            gain_mode: GainMode::Literal,
            workers: Workers::SEQUENTIAL,
        }
    }
}

/// One line of the offline run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub design: String,
    pub members: Vec<usize>,
    pub standalone: bool,
    pub conflicts: u64,
    pub verdicts: BTreeMap<usize, VerdictSummary>,
}

/// Parses every path, naming each design after its file stem. Unparseable
/// files are logged and skipped.
pub fn load_designs(paths: &[PathBuf]) -> Result<Vec<Netlist>, CampaignError> {
    if paths.is_empty() {
        return Err(CampaignError::NoDesigns);
    }
    let mut designs = Vec::new();
    for path in paths {
        match load_design(path) {
            Ok(n) => designs.push(n),
            Err(e) => log::error!("skipping {}: {e}", path.display()),
        }
    }
    if designs.is_empty() {
        return Err(CampaignError::NoLoadableDesign);
    }
    Ok(designs)
}

pub fn load_design(path: &Path) -> Result<Netlist, CampaignError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let n = Netlist::parse_aiger(&text).map_err(|source| CampaignError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path.file_stem().map_or("design".into(), |s| s.to_string_lossy().into_owned());
    Ok(n.with_name(stem))
}

fn imported_tensors(dir: &Path, designs: &[Netlist]) -> Result<Vec<EmbeddingTensor>, CampaignError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut by_key = BTreeMap::new();
    for f in files {
        let t = import_tensor(&f)?;
        by_key.insert((t.design.clone(), t.property), t);
    }
    let mut out = Vec::new();
    for n in designs {
        for p in 0..n.num_properties() {
            let t = by_key
                .remove(&(n.name.clone(), p))
                .ok_or_else(|| CampaignError::MissingTensor {
                    design: n.name.clone(),
                    property: p,
                })?;
            out.push(t);
        }
    }
    Ok(out)
}

fn design_record(n: &Netlist, verdicts: &[Verdict], metric: TimeMetric) -> DesignRecord {
    DesignRecord {
        design: n.name.clone(),
        num_inputs: n.num_inputs(),
        num_latches: n.num_latches(),
        num_ands: n.num_ands(),
        num_properties: n.num_properties(),
        properties: n
            .all_properties()
            .iter()
            .zip(verdicts)
            .map(|(p, v)| PropertyRecord {
                coi: p.coi,
                verdict: v.summary(metric),
            })
            .collect(),
    }
}

/// Builds all databases from already parsed designs.
pub fn build_databases(designs: &[Netlist], cfg: &OfflineConfig) -> Result<(Databases, Vec<RunLog>), CampaignError> {
    cfg.bmc.validate()?;
    let mut names = BTreeSet::new();
    for n in designs {
        if !names.insert(n.name.clone()) {
            return Err(CampaignError::DuplicateDesign(n.name.clone()));
        }
    }
    let metric = cfg.bmc.budget.time_metric();
    let mut logs = Vec::new();

    let jobs: Vec<(usize, usize)> = designs
        .iter()
        .enumerate()
        .flat_map(|(d, n)| (0..n.num_properties()).map(move |p| (d, p)))
        .collect();
    let results = par::map(&jobs, cfg.workers, |&(d, p)| check_single(&designs[d], p, &cfg.bmc));
    let mut standalone: Vec<Vec<Verdict>> = designs.iter().map(|_| Vec::new()).collect();
    for (&(d, p), r) in jobs.iter().zip(results) {
        let v = r?;
        logs.push(RunLog {
            design: designs[d].name.clone(),
            members: vec![p],
            standalone: true,
            conflicts: v.conflicts(),
            verdicts: [(p, v.summary(metric))].into(),
        });
        standalone[d].push(v);
    }
    let db1 = Db1 {
        time_unit: metric,
        designs: designs
            .iter()
            .zip(&standalone)
            .map(|(n, v)| design_record(n, v, metric))
            .collect(),
    };

    let tensors = match &cfg.embed {
        EmbedSource::Simulation(opts) => {
            let mut all = Vec::new();
            for n in designs {
                all.extend(design_signatures(n, opts, cfg.workers)?);
            }
            all
        }
        EmbedSource::Import(dir) => imported_tensors(dir, designs)?,
    };
    let model = fit_pca(&tensors, cfg.pca_threshold)?;
    log::info!(
        "PCA keeps {} of {} dimensions ({:.4} of the variance)",
        model.num_components(),
        model.width(),
        model.explained_ratio
    );
    let mut records = Vec::with_capacity(tensors.len());
    for t in &tensors {
        records.push(EmbeddingRecord {
            design: t.design.clone(),
            property: t.property,
            vector: model.project(t)?,
            pca: PCA_FILE.to_string(),
        });
    }
    let db2 = Db2 {
        width: model.num_components(),
        records,
    };

    let mut cluster_jobs: Vec<(usize, Vec<usize>)> = Vec::new();
    for (d, n) in designs.iter().enumerate() {
        if n.num_properties() < 2 {
            continue;
        }
        let embeddings: BTreeMap<usize, Vec<f64>> = db2
            .records
            .iter()
            .filter(|r| r.design == n.name)
            .map(|r| (r.property, r.vector.clone()))
            .collect();
        let family = build_family(&n.name, &embeddings, cfg.bmc.seed, &cfg.family)?;
        cluster_jobs.extend(family.clusters.into_iter().map(|c| (d, c.members)));
    }
    let cluster_results = par::map(&cluster_jobs, cfg.workers, |(d, members)| {
        check_cluster(&designs[*d], members, &cfg.bmc)
    });
    let mut outcomes: Vec<Vec<ClusterOutcome>> = designs.iter().map(|_| Vec::new()).collect();
    for ((d, members), r) in cluster_jobs.iter().zip(cluster_results) {
        let cv = r?;
        let verdicts: BTreeMap<usize, VerdictSummary> =
            cv.per_property.iter().map(|(&p, v)| (p, v.summary(metric))).collect();
        logs.push(RunLog {
            design: designs[*d].name.clone(),
            members: members.clone(),
            standalone: false,
            conflicts: cv.total_conflicts,
            verdicts: verdicts.clone(),
        });
        outcomes[*d].push(ClusterOutcome {
            members: members.clone(),
            verdicts,
        });
    }
    let mut db3 = Db3::default();
    for (d, n) in designs.iter().enumerate() {
        let standalone_map: BTreeMap<usize, VerdictSummary> =
            standalone[d].iter().enumerate().map(|(p, v)| (p, v.summary(metric))).collect();
        let map = build_influencing_map(&n.name, &standalone_map, &outcomes[d], cfg.gain_mode)?;
        db3.push_map(&map);
    }

    let dbs = Databases {
        db1,
        db2,
        db3,
        pca: PcaSidecar {
            fit: "global".into(),
            model,
        },
    };
    Ok((dbs, logs))
}

/// Loads designs, builds the databases and writes them with the run log.
pub fn cmd_offline(paths: &[PathBuf], out_dir: &Path, cfg: &OfflineConfig) -> Result<Databases, CampaignError> {
    let designs = load_designs(paths)?;
    let (dbs, logs) = build_databases(&designs, cfg)?;
    dbs.write(out_dir)?;
    let mut log_text = String::new();
    for l in &logs {
        log_text.push_str(&serde_json::to_string(l).map_err(|e| io_err(out_dir, e))?);
        log_text.push('\n');
    }
    let log_path = out_dir.join(OFFLINE_LOG);
    fs::write(&log_path, log_text).map_err(|e| io_err(&log_path, e))?;
    Ok(dbs)
}

pub fn cmd_verify(
    unknown: &Path,
    db_dir: &Path,
    out_dir: &Path,
    cfg: &OnlineConfig,
) -> Result<CampaignReport, CampaignError> {
    if !db_dir.is_dir() {
        return Err(CampaignError::MissingArtifact(db_dir.to_path_buf()));
    }
    let dbs = Databases::read(db_dir)?;
    let n = load_design(unknown)?;
    let report = verify_unknown(&n, &dbs, cfg)?;
    write_campaign(out_dir, &report)?;
    Ok(report)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn members(m: &[usize]) -> String {
    m.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// Tab-separated per-property table.
pub fn render_tsv(r: &CampaignReport) -> String {
    let mut out = String::new();
    let base = r.properties.iter().any(|p| p.baseline.is_some());
    out.push_str("property\tcluster\tstatus\tdepth\ttime\tconflicts");
    if base {
        out.push_str("\tstandalone_status\tstandalone_depth\tstandalone_time\tstandalone_conflicts\ttransition\tgain");
    }
    out.push('\n');
    for p in &r.properties {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            p.property,
            members(&p.cluster),
            p.status,
            p.depth,
            fmt_f64(p.time),
            p.conflicts
        );
        if let Some(b) = &p.baseline {
            let _ = write!(
                out,
                "\t{}\t{}\t{}\t{}\t{}\t{}",
                b.status,
                b.depth,
                fmt_f64(b.time),
                b.conflicts,
                b.transition,
                fmt_f64(b.gain)
            );
        }
        out.push('\n');
    }
    out
}

fn xy_csv(rows: impl IntoIterator<Item = (String, String)>) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in rows {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<(), CampaignError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_campaign(dir: &Path, r: &CampaignReport) -> Result<(), CampaignError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let json = serde_json::to_string_pretty(r).map_err(|e| io_err(dir, e))?;
    write_file(&dir.join(CAMPAIGN_JSON), &(json + "\n"))?;
    write_file(&dir.join(CAMPAIGN_TSV), &render_tsv(r))?;
    for (name, pick) in frame_metrics() {
        write_file(&dir.join(format!("frames_{name}.csv")), &frame_rows_csv(&r.frames, pick))?;
    }
    Ok(())
}

type FramePick = fn(&FrameRow) -> String;

fn frame_metrics() -> [(&'static str, FramePick); 3] {
    [
        ("conflicts", |f| f.conflicts.to_string()),
        ("solve_time", |f| fmt_f64(f.time)),
        ("cumulative_time", |f| fmt_f64(f.cumulative)),
    ]
}

fn frame_rows_csv(rows: &[FrameRow], pick: FramePick) -> String {
    xy_csv(rows.iter().map(|f| (f.frame.to_string(), pick(f))))
}

pub fn read_campaign(dir: &Path) -> Result<CampaignReport, CampaignError> {
    let path = dir.join(CAMPAIGN_JSON);
    if !path.is_file() {
        return Err(CampaignError::MissingArtifact(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(&path, e))
}

/// Writes the figure data of a campaign directory and returns the files.
///
/// * `conflicts.csv`: frame, conflicts summed over the clustered runs.
/// * `vtime.csv`: frame, cumulative verification time of the clustered runs.
/// * `depth_scatter.csv`: standalone depth, clustered depth per property
///   (header only without a baseline).
///
/// With a baseline, `conflicts_standalone.csv` and `vtime_standalone.csv`
/// hold the same series for the standalone runs.
pub fn cmd_report(dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    let r = read_campaign(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, text: String| -> Result<(), CampaignError> {
        let path = dir.join(name);
        write_file(&path, &text)?;
        written.push(path);
        Ok(())
    };
    let [conflicts, _, cumulative] = frame_metrics();
    emit("conflicts.csv", frame_rows_csv(&r.frames, conflicts.1))?;
    emit("vtime.csv", frame_rows_csv(&r.frames, cumulative.1))?;
    let scatter = r
        .properties
        .iter()
        .filter_map(|p| p.baseline.as_ref().map(|b| (b.depth.to_string(), p.depth.to_string())));
    emit("depth_scatter.csv", xy_csv(scatter))?;
    if let Some(base) = &r.baseline_frames {
        emit("conflicts_standalone.csv", frame_rows_csv(base, conflicts.1))?;
        emit("vtime_standalone.csv", frame_rows_csv(base, cumulative.1))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmc::Budget;
    use crate::generate;
    use crate::netlist::UnfoldMode;

    fn cfg() -> OfflineConfig {
        OfflineConfig {
            bmc: BmcConfig {
                budget: Budget::Conflicts(200),
                mode: UnfoldMode::InitialState,
                max_depth: Some(12),
                ..BmcConfig::default()
            },
            embed: EmbedSource::Simulation(SignatureOptions {
                patterns: 256,
                ..SignatureOptions::default()
            }),
            ..OfflineConfig::default()
        }
    }

    #[test]
    fn offline_build_covers_every_clustered_property() {
        let designs = vec![
            generate::two_counters(3, 3, 5).with_name("a"),
            generate::duplicated_properties(&generate::counter(3, 6, true), 3).with_name("b"),
        ];
        let (dbs, logs) = build_databases(&designs, &cfg()).unwrap();
        assert_eq!(dbs.db1.designs.len(), 2);
        assert_eq!(dbs.db2.records.len(), 5);
        assert_eq!(dbs.db3.records.len(), 5);
        assert_eq!(logs.iter().filter(|l| l.standalone).count(), 5);
        for r in &dbs.db3.records {
            assert!(r.cluster.contains(&r.property));
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let d = generate::counter(2, 1, true).with_name("x");
        assert!(matches!(
            build_databases(&[d.clone(), d], &cfg()),
            Err(CampaignError::DuplicateDesign(_))
        ));
    }

    #[test]
    fn empty_design_list() {
        assert!(matches!(load_designs(&[]), Err(CampaignError::NoDesigns)));
    }
}
