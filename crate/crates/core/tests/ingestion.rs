use std::fs;
use std::path::{Path, PathBuf};

use casimir_ema::dielectric::ImaginaryFrequency;
use casimir_ema::ingestion::{
    load_material, load_scenario, LoadError, MaterialFile, MaterialKind, ScenarioFile,
};
use proptest::prelude::*;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn shipped_materials_load() {
    for name in [
        "sio2_oscillator.ini",
        "au_tabulated.ini",
        "au_drude.ini",
        "drude_lossless.ini",
    ] {
        let m = load_material(data_dir().join("materials").join(name)).unwrap();
        assert!(m.warnings.is_empty(), "{name}: {:?}", m.warnings);
        let v = m.model.eval(ImaginaryFrequency::new(1.0).unwrap()).unwrap();
        assert!(v > 1.0, "{name}: {v}");
    }
}

#[test]
fn tabulated_gold_tracks_its_drude_part_at_low_frequency() {
    let tab = load_material(data_dir().join("materials/au_tabulated.ini")).unwrap();
    let drude = load_material(data_dir().join("materials/au_drude.ini")).unwrap();
    let z = ImaginaryFrequency::new(0.05).unwrap();
    let (a, b) = (tab.model.eval(z).unwrap(), drude.model.eval(z).unwrap());
    // Interband terms add a few units on top of a Drude response of ~1e4.
    assert!(a > b && (a - b) / b < 0.01, "{a} vs {b}");
}

#[test]
fn shipped_scenarios_load() {
    for entry in fs::read_dir(data_dir().join("scenarios")).unwrap() {
        let p = entry.unwrap().path();
        let s = load_scenario(&p).unwrap();
        assert!(!s.systems.is_empty(), "{}", p.display());
        assert!(s.provenance.contains_key("au") && s.provenance.contains_key("sio2"));
    }
}

#[test]
fn scenario_file_round_trips_through_ini() {
    for entry in fs::read_dir(data_dir().join("scenarios")).unwrap() {
        let p = entry.unwrap().path();
        let a = ScenarioFile::parse(&p, &fs::read_to_string(&p).unwrap()).unwrap();
        let b = ScenarioFile::parse(&p, &a.to_ini()).unwrap();
        assert_eq!(a, b, "{}", p.display());
    }
}

#[test]
fn corrupt_table_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.csv"), "omega_eV,eps2\n0.1,1\n0.2,-4\n").unwrap();
    let p = dir.path().join("t.ini");
    fs::write(
        &p,
        "[material]\nname = t\nkind = tabulated\n[tabulated]\npath = t.csv\n",
    )
    .unwrap();
    match load_material(&p).unwrap_err() {
        LoadError::Parse { line, msg, path } => {
            assert_eq!(line, 3);
            assert!(msg.contains("passivity"));
            assert!(path.ends_with("t.csv"));
        }
        other => panic!("{other}"),
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        0.001f64..100.0,
        (-8i32..8).prop_map(|e| 1.5 * 10f64.powi(e))
    ]
}

fn material_file() -> impl Strategy<Value = MaterialFile> {
    let kind = prop_oneof![
        Just(MaterialKind::Vacuum),
        (finite(), finite()).prop_map(|(plasma_ev, damping_ev)| MaterialKind::Drude {
            plasma_ev,
            damping_ev
        }),
        prop::collection::vec((finite(), finite()), 1..5).prop_map(MaterialKind::Oscillators),
        (
            "[a-z]{1,8}\\.csv",
            finite(),
            prop::option::of((finite(), finite()))
        )
            .prop_map(
                |(path, tail_exponent, extrapolation)| MaterialKind::Tabulated {
                    path,
                    tail_exponent,
                    extrapolation
                }
            ),
    ];
    ("[a-z][a-z0-9_-]{0,10}", "[A-Za-z0-9 ,.()-]{0,30}", kind).prop_map(
        |(name, provenance, kind)| MaterialFile {
            name,
            provenance: provenance.trim().to_string(),
            kind,
        },
    )
}

proptest! {
    #[test]
    fn material_file_round_trips(m in material_file()) {
        let text = m.to_ini();
        let back = MaterialFile::parse(Path::new("m.ini"), &text).unwrap();
        prop_assert_eq!(back, m);
    }
}
