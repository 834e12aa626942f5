//! The offline databases.
//!
//! Each file is JSON lines: line 1 is a header object naming the schema and
//! its version, every further line is one record. Files:
//!
//! * `db1.mpb`: one [`DesignRecord`] per design.
//! * `db2.mpb`: one [`EmbeddingRecord`] per (design, property).
//! * `db3.mpb`: one [`InfluenceRecord`] per clustered (design, property).
//! * `pca.mpb`: header plus the single [`PcaModel`] used for DB2.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bmc::{TimeMetric, VerdictSummary};
use crate::embed::PcaModel;
use crate::gain::{GainRecord, Influence, InfluencingClusterMap};
use crate::netlist::CoiSizes;

pub const SCHEMA_VERSION: u32 = 1;
pub const DB1_FILE: &str = "db1.mpb";
pub const DB2_FILE: &str = "db2.mpb";
pub const DB3_FILE: &str = "db3.mpb";
pub const PCA_FILE: &str = "pca.mpb";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoreError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}:{line}: {reason}")]
    CorruptRow { path: PathBuf, line: usize, reason: String },
    #[error("{path}: schema mismatch: {reason}")]
    SchemaVersionMismatch { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_unit: Option<TimeMetric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<String>,
}

impl Header {
    fn new(schema: &str) -> Header {
        Header {
            schema: schema.to_string(),
            version: SCHEMA_VERSION,
            time_unit: None,
            width: None,
            pca: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub coi: CoiSizes,
    pub verdict: VerdictSummary,
}

/// DB1 row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub design: String,
    pub num_inputs: usize,
    pub num_latches: usize,
    pub num_ands: usize,
    pub num_properties: usize,
    pub properties: Vec<PropertyRecord>,
}

impl DesignRecord {
    fn check(&self) -> Result<(), String> {
        if self.properties.len() != self.num_properties {
            return Err(format!(
                "{} property entries for {} properties",
                self.properties.len(),
                self.num_properties
            ));
        }
        for (i, p) in self.properties.iter().enumerate() {
            if p.coi.inputs > self.num_inputs || p.coi.latches > self.num_latches || p.coi.ands > self.num_ands {
                return Err(format!("property {i} cone exceeds the design"));
            }
            if !p.verdict.time.is_finite() || p.verdict.time < 0.0 {
                return Err(format!("property {i} has an invalid time"));
            }
        }
        Ok(())
    }

    /// Sum of all per-property cone sizes.
    pub fn coi_total(&self) -> usize {
        self.properties.iter().map(|p| p.coi.total()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Db1 {
    pub time_unit: TimeMetric,
    pub designs: Vec<DesignRecord>,
}

impl Db1 {
    pub fn design(&self, id: &str) -> Option<&DesignRecord> {
        self.designs.iter().find(|d| d.design == id)
    }
}

/// DB2 row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub design: String,
    pub property: usize,
    pub vector: Vec<f64>,
    pub pca: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Db2 {
    pub width: usize,
    pub records: Vec<EmbeddingRecord>,
}

/// DB3 row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceRecord {
    pub design: String,
    pub property: usize,
    pub cluster: Vec<usize>,
    pub gains: Vec<GainRecord>,
}

impl InfluenceRecord {
    fn check(&self) -> Result<(), String> {
        if self.gains.is_empty() {
            return Err("empty gain list".into());
        }
        if !self.gains.iter().any(|g| g.cluster == self.cluster) {
            return Err("influencing cluster is not among the gain records".into());
        }
        if !self.cluster.contains(&self.property) {
            return Err("influencing cluster does not contain the property".into());
        }
        for g in &self.gains {
            if g.property != self.property {
                return Err(format!("gain record for property {}", g.property));
            }
            if !g.value.is_finite() {
                return Err("non-finite gain".into());
            }
            if g.vector6.iter().filter(|x| **x != 0.0).count() > 1 {
                return Err("gain vector has several non-zero entries".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Db3 {
    pub records: Vec<InfluenceRecord>,
}

impl Db3 {
    pub fn push_map(&mut self, map: &InfluencingClusterMap) {
        for (&property, entry) in &map.entries {
            self.records.push(InfluenceRecord {
                design: map.design.clone(),
                property,
                cluster: entry.cluster.clone(),
                gains: entry.records.clone(),
            });
        }
    }

    pub fn influence_map(&self, design: &str) -> InfluencingClusterMap {
        let entries = self
            .records
            .iter()
            .filter(|r| r.design == design)
            .map(|r| {
                (
                    r.property,
                    Influence {
                        cluster: r.cluster.clone(),
                        records: r.gains.clone(),
                    },
                )
            })
            .collect();
        InfluencingClusterMap {
            design: design.to_string(),
            entries,
        }
    }
}

/// Design ids with `low < property count < high`.
pub fn query_db1_by_property_count(db1: &Db1, low: i64, high: i64) -> Vec<String> {
    db1.designs
        .iter()
        .filter(|d| {
            let c = d.num_properties as i64;
            low < c && c < high
        })
        .map(|d| d.design.clone())
        .collect()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> StoreError {
    StoreError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_lines<T: Serialize>(path: &Path, header: &Header, rows: &[T]) -> Result<(), StoreError> {
    let mut out = serde_json::to_string(header).map_err(|e| io_err(path, e))?;
    out.push('\n');
    for row in rows {
        out.push_str(&serde_json::to_string(row).map_err(|e| io_err(path, e))?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn read_lines<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<(Header, Vec<(usize, T)>), StoreError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let corrupt = |line: usize, reason: String| StoreError::CorruptRow {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let (_, first) = lines.next().ok_or_else(|| corrupt(1, "missing header".into()))?;
    let header: Header = serde_json::from_str(first).map_err(|e| corrupt(1, format!("bad header: {e}")))?;
    if header.schema != schema || header.version != SCHEMA_VERSION {
        return Err(StoreError::SchemaVersionMismatch {
            path: path.to_path_buf(),
            reason: format!(
                "expected {schema} v{SCHEMA_VERSION}, found {} v{}",
                header.schema, header.version
            ),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(line).map_err(|e| corrupt(i + 1, e.to_string()))?;
        rows.push((i + 1, row));
    }
    Ok((header, rows))
}

pub fn write_db1(path: &Path, db: &Db1) -> Result<(), StoreError> {
    let header = Header {
        time_unit: Some(db.time_unit),
        ..Header::new("mpbmc-db1")
    };
    write_lines(path, &header, &db.designs)
}

pub fn read_db1(path: &Path) -> Result<Db1, StoreError> {
    let (header, rows) = read_lines::<DesignRecord>(path, "mpbmc-db1")?;
    let time_unit = header.time_unit.ok_or_else(|| StoreError::SchemaVersionMismatch {
        path: path.to_path_buf(),
        reason: "header lacks time_unit".into(),
    })?;
    let mut seen = BTreeSet::new();
    let mut designs = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let corrupt = |reason: String| StoreError::CorruptRow {
            path: path.to_path_buf(),
            line,
            reason,
        };
        row.check().map_err(corrupt)?;
        if !seen.insert(row.design.clone()) {
            return Err(corrupt(format!("duplicate design {}", row.design)));
        }
        designs.push(row);
    }
    Ok(Db1 { time_unit, designs })
}

pub fn write_db2(path: &Path, db: &Db2) -> Result<(), StoreError> {
    let header = Header {
        width: Some(db.width),
        pca: Some(PCA_FILE.to_string()),
        ..Header::new("mpbmc-db2")
    };
    write_lines(path, &header, &db.records)
}

pub fn read_db2(path: &Path) -> Result<Db2, StoreError> {
    let (header, rows) = read_lines::<EmbeddingRecord>(path, "mpbmc-db2")?;
    let width = header.width.ok_or_else(|| StoreError::SchemaVersionMismatch {
        path: path.to_path_buf(),
        reason: "header lacks width".into(),
    })?;
    let mut records = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        if row.vector.len() != width {
            return Err(StoreError::SchemaVersionMismatch {
                path: path.to_path_buf(),
                reason: format!("line {line}: width {} where {width} is declared", row.vector.len()),
            });
        }
        if row.vector.iter().any(|x| !x.is_finite()) {
            return Err(StoreError::CorruptRow {
                path: path.to_path_buf(),
                line,
                reason: "non-finite embedding value".into(),
            });
        }
        records.push(row);
    }
    Ok(Db2 { width, records })
}

pub fn write_db3(path: &Path, db: &Db3) -> Result<(), StoreError> {
    write_lines(path, &Header::new("mpbmc-db3"), &db.records)
}

pub fn read_db3(path: &Path) -> Result<Db3, StoreError> {
    let (_, rows) = read_lines::<InfluenceRecord>(path, "mpbmc-db3")?;
    let mut records = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        row.check().map_err(|reason| StoreError::CorruptRow {
            path: path.to_path_buf(),
            line,
            reason,
        })?;
        records.push(row);
    }
    Ok(Db3 { records })
}

/// PCA sidecar contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaSidecar {
    /// `"global"`: one model fitted over every property of every design.
    pub fit: String,
    pub model: PcaModel,
}

pub fn write_pca(path: &Path, sidecar: &PcaSidecar) -> Result<(), StoreError> {
    write_lines(path, &Header::new("mpbmc-pca"), std::slice::from_ref(sidecar))
}

pub fn read_pca(path: &Path) -> Result<PcaSidecar, StoreError> {
    let (_, mut rows) = read_lines::<PcaSidecar>(path, "mpbmc-pca")?;
    if rows.len() != 1 {
        return Err(StoreError::CorruptRow {
            path: path.to_path_buf(),
            line: 2,
            reason: format!("expected one model, found {}", rows.len()),
        });
    }
    Ok(rows.remove(0).1)
}

/// All databases of one offline build.
#[derive(Debug, Clone, PartialEq)]
pub struct Databases {
    pub db1: Db1,
    pub db2: Db2,
    pub db3: Db3,
    pub pca: PcaSidecar,
}

impl Databases {
    pub fn write(&self, dir: &Path) -> Result<(), StoreError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        write_db1(&dir.join(DB1_FILE), &self.db1)?;
        write_db2(&dir.join(DB2_FILE), &self.db2)?;
        write_db3(&dir.join(DB3_FILE), &self.db3)?;
        write_pca(&dir.join(PCA_FILE), &self.pca)
    }

    pub fn read(dir: &Path) -> Result<Databases, StoreError> {
        Ok(Databases {
            db1: read_db1(&dir.join(DB1_FILE))?,
            db2: read_db2(&dir.join(DB2_FILE))?,
            db3: read_db3(&dir.join(DB3_FILE))?,
            pca: read_pca(&dir.join(PCA_FILE))?,
        })
    }

    /// Reduced embeddings of one design, keyed by property.
    pub fn embeddings(&self, design: &str) -> BTreeMap<usize, Vec<f64>> {
        self.db2
            .records
            .iter()
            .filter(|r| r.design == design)
            .map(|r| (r.property, r.vector.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmc::Status;
    use crate::gain::{compute_gain, GainMode};

    fn summary(status: Status, depth: u32, time: f64) -> VerdictSummary {
        VerdictSummary { status, depth, time }
    }

    fn design(name: &str, props: usize) -> DesignRecord {
        DesignRecord {
            design: name.into(),
            num_inputs: 3,
            num_latches: 4,
            num_ands: 10,
            num_properties: props,
            properties: (0..props)
                .map(|i| PropertyRecord {
                    coi: CoiSizes {
                        inputs: 1,
                        latches: 2,
                        ands: i,
                    },
                    verdict: summary(Status::Undet, i as u32, 0.1 * i as f64),
                })
                .collect(),
        }
    }

    #[test]
    fn db1_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(DB1_FILE);
        let db = Db1 {
            time_unit: TimeMetric::Wall,
            designs: vec![design("a", 2), design("b", 3)],
        };
        write_db1(&path, &db).unwrap();
        assert_eq!(read_db1(&path).unwrap(), db);

        let text = fs::read_to_string(&path).unwrap();
        let broken = text.replace("\"num_properties\":3", "\"num_properties\":4");
        fs::write(&path, broken).unwrap();
        assert!(matches!(read_db1(&path), Err(StoreError::CorruptRow { line: 3, .. })));

        fs::write(&path, text.replace("\"version\":1", "\"version\":9")).unwrap();
        assert!(matches!(read_db1(&path), Err(StoreError::SchemaVersionMismatch { .. })));

        fs::write(&path, format!("{text}{{nonsense\n")).unwrap();
        assert!(matches!(read_db1(&path), Err(StoreError::CorruptRow { line: 4, .. })));
    }

    #[test]
    fn db2_mixed_widths_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(DB2_FILE);
        let rec = |w: usize| EmbeddingRecord {
            design: "a".into(),
            property: 0,
            vector: vec![0.5; w],
            pca: PCA_FILE.into(),
        };
        let db = Db2 {
            width: 2,
            records: vec![rec(2), rec(3)],
        };
        write_db2(&path, &db).unwrap();
        assert!(matches!(read_db2(&path), Err(StoreError::SchemaVersionMismatch { .. })));
    }

    #[test]
    fn db3_requires_cluster_in_gains() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(DB3_FILE);
        let g = compute_gain(
            0,
            &[0, 1],
            &summary(Status::Undet, 3, 1.0),
            &summary(Status::Sat, 2, 4.0),
            GainMode::Literal,
        );
        let good = InfluenceRecord {
            design: "a".into(),
            property: 0,
            cluster: vec![0, 1],
            gains: vec![g.clone()],
        };
        let db = Db3 {
            records: vec![good.clone()],
        };
        write_db3(&path, &db).unwrap();
        assert_eq!(read_db3(&path).unwrap(), db);

        let bad = InfluenceRecord {
            cluster: vec![0, 2],
            ..good
        };
        write_db3(&path, &Db3 { records: vec![bad] }).unwrap();
        assert!(matches!(read_db3(&path), Err(StoreError::CorruptRow { line: 2, .. })));
    }

    #[test]
    fn strict_property_count_query() {
        let db = Db1 {
            time_unit: TimeMetric::Work,
            designs: (6..=14).map(|c| design(&format!("d{c}"), c)).collect(),
        };
        let hits = query_db1_by_property_count(&db, 10 - 3, 10 + 3);
        assert_eq!(hits, vec!["d8", "d9", "d10", "d11", "d12"]);
        assert!(query_db1_by_property_count(&db, 10, 10).is_empty());
        let empty = Db1 {
            time_unit: TimeMetric::Work,
            designs: vec![],
        };
        assert!(query_db1_by_property_count(&empty, -5, 100).is_empty());
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_db1(&dir.path().join("nope")), Err(StoreError::Io { .. })));
    }
}
