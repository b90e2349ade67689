mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use panelkit::demo::{fixtures_dir, record_demo, DEMOS};
use panelkit::pipeline::{ImageFormat, RenderQuery};
use panelkit::raster::decode_png;
use panelkit::vlm::Transcript;
use panelkit::{Config, ErrorClass, Pipeline, Status, Strategy};
use panelkit_core::plan::{PlacementTarget, Verdict};
use panelkit_core::render::{project, rasterize, standard_views, RenderOptions};
use panelkit_core::select::Provenance;

#[test]
fn transcripts_have_not_drifted() {
    for demo in &DEMOS {
        let fresh = record_demo(demo, &Config::default()).unwrap();
        let stored = Transcript::read(&fixtures_dir().join(format!("transcripts/{}.json", demo.name))).unwrap();
        assert_eq!(
            fresh, stored,
            "{}: regenerate with `cargo run -p panelkit --example record_fixtures`",
            demo.name
        );
    }
}

#[test]
fn chair_session_lifecycle() {
    let tmp = tempfile::tempdir().unwrap();
    let p = common::pipeline(tmp.path());
    let s = p.create_session("Make me a chair", &common::mesh("chair"), None, Some("chair.obj")).unwrap();
    assert_eq!(s.status, Status::Created);
    assert!(matches!(p.feedback(&s.id, "x"), Err(e) if e.class == ErrorClass::State));

    let s = p.discretize(&s.id, None).unwrap();
    assert_eq!(s.status, Status::Discretized);
    assert_eq!(s.decomp.as_ref().unwrap().label_count(), 7);
    assert_eq!(s.renders.len(), 4);

    let s = p.select(&s.id, Strategy::Vlm, None).unwrap();
    let a = s.current_assignment().unwrap();
    assert_eq!(a.labels.labels, BTreeSet::from([1, 7]));
    assert_eq!(a.parts.as_ref().unwrap().names(), ["seat", "backrest"]);
    assert_eq!(a.attempts, 1);

    let s = p.plan(&s.id).unwrap();
    assert_eq!(s.status, Status::Planned);
    assert_eq!(s.current_plan().unwrap().report.verdict, Verdict::Pass);

    let s = p.feedback(&s.id, "I want panels on the seat").unwrap();
    assert_eq!(s.status, Status::Assigned);
    assert_eq!(s.history.len(), 2);
    let last = s.current_assignment().unwrap();
    assert_eq!(last.labels.provenance, Provenance::Feedback);
    assert_eq!(last.labels.labels, BTreeSet::from([1]));

    let s = p.plan(&s.id).unwrap();
    assert_eq!(s.plans.len(), 2);
    assert_eq!(s.current_plan().unwrap().assignment, 1);
    let seat: BTreeSet<_> = s.decomp.as_ref().unwrap().patch(1).unwrap().cells.iter().copied().collect();
    let panels: BTreeSet<_> = s
        .current_plan()
        .unwrap()
        .model
        .placements
        .iter()
        .filter_map(|pl| match pl.target {
            PlacementTarget::Face { cell, dir } => Some(panelkit_core::CellFace::new(cell, dir)),
            _ => None,
        })
        .collect();
    assert_eq!(panels, seat);
}

#[test]
fn operations_are_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let p = common::pipeline(tmp.path());
    let id = p.create_session("Make me a table", &common::mesh("table"), None, None).unwrap().id;
    let a = p.discretize(&id, None).unwrap();
    assert_eq!(p.discretize(&id, None).unwrap(), a);
    let other = panelkit_core::ComponentSpec::new(0.2, 0.02).unwrap();
    assert!(matches!(p.discretize(&id, Some(other)), Err(e) if e.class == ErrorClass::State));

    let b = p.select(&id, Strategy::Rule, None).unwrap();
    assert_eq!(p.select(&id, Strategy::Rule, None).unwrap(), b);
    let c = p.select(&id, Strategy::Random, Some(9)).unwrap();
    assert_eq!(c.history.len(), 2);
    assert_eq!(p.select(&id, Strategy::Random, Some(9)).unwrap(), c);
    assert_eq!(p.select(&id, Strategy::Random, Some(10)).unwrap().history.len(), 3);

    let d = p.plan(&id).unwrap();
    assert_eq!(p.plan(&id).unwrap(), d);
    assert_eq!(d.plans.len(), 1);
}

#[test]
fn random_seed_is_recorded_and_replayed() {
    let tmp = tempfile::tempdir().unwrap();
    let p = common::pipeline(tmp.path());
    let id = p.create_session("Make me a chair", &common::mesh("chair"), None, None).unwrap().id;
    p.discretize(&id, None).unwrap();
    let s = p.select(&id, Strategy::Random, None).unwrap();
    let rec = s.current_assignment().unwrap();
    assert!(rec.seed_drawn);
    assert!(rec.seed.is_some());
    p.select(&id, Strategy::Vlm, None).unwrap();
    p.feedback(&id, "I want panels on the seat").unwrap();
    p.select(&id, Strategy::Random, Some(42)).unwrap();
    let s = p.load(&id).unwrap();
    let replayed = p.replay(&id).unwrap();
    let recorded: Vec<_> = s.history.iter().map(|r| r.labels.clone()).collect();
    assert_eq!(replayed, recorded);
    assert_eq!(recorded[3].labels, BTreeSet::from([2, 5]));
}

#[test]
fn sessions_survive_restart() {
    let tmp = tempfile::tempdir().unwrap();
    let id;
    let before;
    {
        let p = common::pipeline(tmp.path());
        id = p.create_session("Make me a chair", &common::mesh("chair"), None, None).unwrap().id;
        p.discretize(&id, None).unwrap();
        p.select(&id, Strategy::Vlm, None).unwrap();
        before = p.plan(&id).unwrap();
    }
    let p = common::pipeline(tmp.path());
    assert_eq!(p.load(&id).unwrap(), before);
    assert_eq!(p.list().unwrap().len(), 1);
    assert_eq!(p.simulate(&id).unwrap(), before.current_plan().unwrap().report);
}

#[test]
fn stored_png_matches_fresh_raster() {
    let tmp = tempfile::tempdir().unwrap();
    let p = common::pipeline(tmp.path());
    let s = p.create_session("Make me a lamp", &common::mesh("lamp"), None, None).unwrap();
    let s = p.discretize(&s.id, None).unwrap();
    let png = p.render(&s.id, &RenderQuery::new("B", true), ImageFormat::Png).unwrap();
    let (_, b) = standard_views();
    let scene = project(s.decomp.as_ref().unwrap(), &b, &RenderOptions::default());
    assert_eq!(decode_png(&png).unwrap(), rasterize(&scene).unwrap());

    let mut q = RenderQuery::new("A", true);
    q.canvas = Some((64, 48));
    let small = decode_png(&p.render(&s.id, &q, ImageFormat::Png).unwrap()).unwrap();
    assert_eq!((small.width, small.height), (64, 48));
    q.view = "C".into();
    assert!(p.render(&s.id, &q, ImageFormat::Svg).is_err());
}

#[test]
fn bad_inputs_are_classified() {
    let tmp = tempfile::tempdir().unwrap();
    let p = common::pipeline(tmp.path());
    let e = p.create_session("", &common::mesh("chair"), None, None).unwrap_err();
    assert_eq!(e.class, ErrorClass::Validation);
    let e = p.create_session("x", b"v 0 0 0\nf 1 2 3\n", None, None).unwrap_err();
    assert_eq!(e.class, ErrorClass::Validation);
    let flat = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
    let id = p.create_session("flat", flat.as_bytes(), None, None).unwrap().id;
    let e = p.discretize(&id, None).unwrap_err();
    assert_eq!((e.class, e.code.as_str()), (ErrorClass::Unprocessable, "degenerate_mesh"));
    assert_eq!(p.load("nope").unwrap_err().class, ErrorClass::NotFound);

    // No transcript for a shelf prompt: the model call fails upstream.
    let id = p.create_session("Make me a shelf", &common::mesh("shelf"), None, None).unwrap().id;
    p.discretize(&id, None).unwrap();
    let e = p.select(&id, Strategy::Vlm, None).unwrap_err();
    assert_eq!(e.class, ErrorClass::Upstream);
    assert_eq!(e.class.exit_code(), 3);
    assert_eq!(p.load(&id).unwrap().status, Status::Discretized);
}

#[test]
fn concurrent_sessions_and_serialized_mutations() {
    let tmp = tempfile::tempdir().unwrap();
    let p = Arc::new(common::pipeline(tmp.path()));
    let ids: Vec<String> = (0..4)
        .map(|_| {
            let id = p.create_session("Make me a chair", &common::mesh("chair"), None, None).unwrap().id;
            p.discretize(&id, None).unwrap();
            id
        })
        .collect();
    let mut handles = Vec::new();
    for id in &ids {
        for seed in 0..6u64 {
            let p = Arc::clone(&p);
            let id = id.clone();
            handles.push(std::thread::spawn(move || {
                p.select(&id, Strategy::Random, Some(seed)).unwrap();
            }));
        }
    }
    for h in handles {
        h.join().unwrap();
    }
    for id in &ids {
        let s = p.load(id).unwrap();
        // Every write landed; none was lost to a concurrent save.
        let seeds: BTreeSet<u64> = s.history.iter().filter_map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 6);
        assert!(s.history.len() >= 6);
    }
}

#[test]
fn pipeline_rejects_bad_config() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = common::config(tmp.path());
    cfg.vlm.max_attempts = 0;
    assert!(Pipeline::new(cfg, common::replay_client()).is_err());
}
