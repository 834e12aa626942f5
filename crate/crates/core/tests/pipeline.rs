use std::fs;
use std::path::{Path, PathBuf};

use mpbmc::bmc::check_single;
use mpbmc::campaign::{self, CampaignError, EmbedSource, OfflineConfig, CAMPAIGN_TSV, OFFLINE_LOG};
use mpbmc::embed::{design_signatures, export_tensor, SignatureOptions};
use mpbmc::online::{verify_unknown, OnlineConfig, OnlineError};
use mpbmc::par::Workers;
use mpbmc::store::{Databases, StoreError, DB1_FILE};
use mpbmc::{generate, BmcConfig, Budget, Netlist, Status, UnfoldMode};

fn bmc() -> BmcConfig {
    BmcConfig {
        budget: Budget::Conflicts(400),
        mode: UnfoldMode::InitialState,
        max_depth: Some(10),
        ..BmcConfig::default()
    }
}

fn offline_cfg() -> OfflineConfig {
    OfflineConfig {
        bmc: bmc(),
        embed: EmbedSource::Simulation(SignatureOptions {
            patterns: 128,
            ..SignatureOptions::default()
        }),
        ..OfflineConfig::default()
    }
}

fn corpus() -> Vec<Netlist> {
    vec![
        generate::two_counters(3, 3, 5).with_name("twin"),
        generate::steering_puzzle(1, 8, 2, 5, 3).with_name("steer"),
        generate::equivalence_miter(2, 6, 2, 4).with_name("miter"),
        generate::random_netlist(3, 5, 3, 30, 5).with_name("rand"),
    ]
}

fn write_corpus(dir: &Path) -> Vec<PathBuf> {
    corpus()
        .iter()
        .map(|n| {
            let p = dir.join(format!("{}.aag", n.name));
            fs::write(&p, n.to_aiger()).unwrap();
            p
        })
        .collect()
}

#[test]
fn known_design_matches_itself() {
    let designs = corpus();
    let (dbs, _) = campaign::build_databases(&designs, &offline_cfg()).unwrap();
    let cfg = OnlineConfig {
        bmc: bmc(),
        baseline: true,
        ..OnlineConfig::default()
    };
    let unknown = &designs[2];
    let r = verify_unknown(unknown, &dbs, &cfg).unwrap();
    assert_eq!(r.matched_design, "miter");
    assert_eq!(r.distance, 0);
    assert_eq!(r.property_map.len(), unknown.num_properties());
    assert_eq!(r.properties.len(), unknown.num_properties());
    for (p, row) in r.properties.iter().enumerate() {
        assert_eq!(row.property, p);
        assert!(row.cluster.contains(&p));
        let b = row.baseline.as_ref().expect("baseline requested");
        let standalone = check_single(unknown, p, &bmc()).unwrap();
        assert_eq!((b.status, b.depth), (standalone.status, standalone.depth));
    }
    assert!(r.baseline_frames.is_some());
}

#[test]
fn every_property_gets_a_verdict_and_sat_agrees() {
    let designs = corpus();
    let (dbs, _) = campaign::build_databases(&designs[..3], &offline_cfg()).unwrap();
    let unknown = generate::steering_puzzle(9, 8, 2, 4, 4).with_name("u");
    let cfg = OnlineConfig {
        bmc: BmcConfig {
            budget: Budget::Conflicts(5_000),
            ..bmc()
        },
        ..OnlineConfig::default()
    };
    let r = verify_unknown(&unknown, &dbs, &cfg).unwrap();
    assert_eq!(r.properties.len(), 4);
    let single = check_single(&unknown, 0, &cfg.bmc).unwrap();
    assert_eq!(single.status, Status::Sat);
    for row in &r.properties {
        assert_eq!((row.status, row.depth), (Status::Sat, single.depth));
    }
    let covered: usize = r.runs.iter().map(|run| run.members.len()).sum();
    assert!(covered >= 4);
}

#[test]
fn parallel_offline_build_matches_sequential() {
    let designs = corpus();
    let seq = campaign::build_databases(&designs, &offline_cfg()).unwrap().0;
    let cfg = OfflineConfig {
        workers: Workers::new(4),
        family: mpbmc::cluster::FamilyOptions {
            workers: Workers::new(4),
            ..Default::default()
        },
        ..offline_cfg()
    };
    let par = campaign::build_databases(&designs, &cfg).unwrap().0;
    assert_eq!(seq, par);
}

#[test]
fn commands_write_their_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_corpus(tmp.path());
    let db = tmp.path().join("db");
    campaign::cmd_offline(&paths, &db, &offline_cfg()).unwrap();
    assert!(db.join(OFFLINE_LOG).is_file());
    let reread = Databases::read(&db).unwrap();
    assert_eq!(reread.db1.designs.len(), 4);

    let out = tmp.path().join("out");
    let cfg = OnlineConfig {
        bmc: bmc(),
        baseline: true,
        ..OnlineConfig::default()
    };
    campaign::cmd_verify(&paths[1], &db, &out, &cfg).unwrap();
    let tsv = fs::read_to_string(out.join(CAMPAIGN_TSV)).unwrap();
    assert!(tsv.starts_with("property\tcluster\tstatus\tdepth\ttime\tconflicts\tstandalone_status"));
    assert_eq!(tsv.lines().count(), 4);

    let files = campaign::cmd_report(&out).unwrap();
    let names: Vec<String> = files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
    for want in ["conflicts.csv", "vtime.csv", "depth_scatter.csv", "conflicts_standalone.csv", "vtime_standalone.csv"] {
        assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
    }
    for f in &files {
        assert!(fs::read_to_string(f).unwrap().starts_with("x,y\n"));
    }
    let scatter = fs::read_to_string(out.join("depth_scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 4);
}

#[test]
fn imported_tensors_drive_the_same_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let designs = corpus();
    let tensors = tmp.path().join("tensors");
    fs::create_dir(&tensors).unwrap();
    let opts = SignatureOptions {
        patterns: 128,
        ..SignatureOptions::default()
    };
    for n in &designs {
        for t in design_signatures(n, &opts, Workers::SEQUENTIAL).unwrap() {
            export_tensor(&t, &tensors.join(format!("{}_{}.tensor", t.design, t.property))).unwrap();
        }
    }
    let imported = OfflineConfig {
        embed: EmbedSource::Import(tensors.clone()),
        ..offline_cfg()
    };
    let (a, _) = campaign::build_databases(&designs, &imported).unwrap();
    let (b, _) = campaign::build_databases(&designs, &offline_cfg()).unwrap();
    assert_eq!(a.db3, b.db3);
    assert_eq!(a.db1, b.db1);

    fs::remove_file(tensors.join("rand_0.tensor")).unwrap();
    assert!(matches!(
        campaign::build_databases(&designs, &imported),
        Err(CampaignError::MissingTensor { property: 0, .. })
    ));
}

#[test]
fn data_errors_are_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_corpus(tmp.path());
    let cfg = OnlineConfig {
        bmc: bmc(),
        ..OnlineConfig::default()
    };
    let missing = tmp.path().join("nowhere");
    let err = campaign::cmd_verify(&paths[0], &missing, &tmp.path().join("o"), &cfg).unwrap_err();
    assert!(matches!(err, CampaignError::MissingArtifact(_)));
    assert!(!err.is_internal());

    let db = tmp.path().join("db");
    campaign::cmd_offline(&paths, &db, &offline_cfg()).unwrap();
    let text = fs::read_to_string(db.join(DB1_FILE)).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[2] = "{\"design\": 3}";
    fs::write(db.join(DB1_FILE), lines.join("\n")).unwrap();
    match Databases::read(&db) {
        Err(StoreError::CorruptRow { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a corrupt row, got {other:?}"),
    }

    let (dbs, _) = campaign::build_databases(&corpus(), &offline_cfg()).unwrap();
    let empty = mpbmc::netlist::AigBuilder::new().build("empty").unwrap();
    assert_eq!(verify_unknown(&empty, &dbs, &cfg), Err(OnlineError::NoProperties));

    let garbage = tmp.path().join("bad.aag");
    fs::write(&garbage, "aag 1 0 0 0 0\nnonsense\n").unwrap();
    assert!(matches!(campaign::load_design(&garbage), Err(CampaignError::Parse { .. })));
}
