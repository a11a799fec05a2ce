use std::path::{Path, PathBuf};

use lpme::schema::{parse_model_file, SpectralDensityFile};
use lpme::{load_model, read_model_file, save_model, CliError};
use lpme_core::model::validate_model;
use lpme_core::reference::{q2_driven_qubit, q3_qutrit};
use lpme_core::Tolerances;

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

#[test]
fn dephasing_fixture_loads() {
    let m = load_model(&example("qubit_dephasing.json")).unwrap();
    assert_eq!(m.dim(), 2);
    assert_eq!(m.omega().r(), 2);
    assert!(validate_model(&m, &Tolerances::default()).passed());
}

#[test]
fn fixtures_match_reference_models() {
    let tols = Tolerances::default();
    for (file, reference) in [
        ("driven_qubit.json", q2_driven_qubit().unwrap()),
        ("driven_qutrit.json", q3_qutrit().unwrap()),
    ] {
        let m = load_model(&example(file)).unwrap();
        assert_eq!(m.omega().as_slice(), reference.omega().as_slice());
        assert!((m.h_bar() - reference.h_bar()).max_abs() == 0.0);
        for t in [0.0, 0.9, 7.3] {
            assert!((&m.p_at(t) - &reference.p_at(t)).max_abs() < 1e-15, "{file}");
        }
        assert!(validate_model(&m, &tols).passed(), "{file}");
    }
}

#[test]
fn save_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["qubit_dephasing.json", "driven_qubit.json", "driven_qutrit.json"] {
        let original = read_model_file(&example(name)).unwrap();
        let path = dir.path().join(name);
        save_model(&original, &path).unwrap();
        let again = read_model_file(&path).unwrap();
        assert_eq!(again, original);
        save_model(&again, &dir.path().join("second.json")).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(dir.path().join("second.json")).unwrap()
        );
    }
}

#[test]
fn non_hermitian_h_bar_loads_then_fails_validation() {
    let mut file = read_model_file(&example("qubit_dephasing.json")).unwrap();
    file.h_bar[0][1] = [0.2, 0.0];
    let m = file.to_model(file.truncation()).unwrap();
    let report = validate_model(&m, &Tolerances::default());
    assert!(!report.hermiticity_ok());
    assert!(report.hermiticity_residual > 0.1);
}

#[test]
fn corrupt_json_is_a_parse_error() {
    let text = std::fs::read_to_string(example("qubit_dephasing.json")).unwrap();
    let cut = &text[..text.len() / 2];
    match parse_model_file(cut, Path::new("cut.json")) {
        Err(CliError::Parse { line, .. }) => assert!(line > 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_error_names_the_field() {
    let text = std::fs::read_to_string(example("qubit_dephasing.json"))
        .unwrap()
        .replace("\"gamma\": 0.1", "\"gamma\": \"fast\"");
    match parse_model_file(&text, Path::new("bad.json")) {
        Err(CliError::Parse { field, line, .. }) => {
            assert!(field.starts_with("bath.spectral_density"), "{field}");
            assert_eq!(line, 11);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_schema_version_is_rejected() {
    let text = std::fs::read_to_string(example("qubit_dephasing.json"))
        .unwrap()
        .replace("\"schema_version\": 1", "\"schema_version\": 7");
    assert!(matches!(
        parse_model_file(&text, Path::new("v7.json")),
        Err(CliError::SchemaVersionMismatch { found: 7, expected: 1, .. })
    ));
}

#[test]
fn both_or_neither_drive_description_is_a_usage_error() {
    let mut file = read_model_file(&example("driven_qubit.json")).unwrap();
    file.p_series = read_model_file(&example("qubit_dephasing.json")).unwrap().p_series;
    assert!(matches!(file.to_model(8), Err(CliError::Usage(_))));
    file.p_series = None;
    file.p_generator = None;
    assert!(matches!(file.to_model(8), Err(CliError::Usage(_))));
}

#[test]
fn bath_families_parse() {
    let file = read_model_file(&example("driven_qutrit.json")).unwrap();
    assert_eq!(
        file.bath.spectral_density,
        SpectralDensityFile::OhmicKms { kappa: 0.05, omega_c: 3.0, beta: 1.5 }
    );
    assert_eq!(file.tolerances.integrator, Some(1e-9));
}
