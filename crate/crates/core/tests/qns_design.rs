use qns::noise::NoiseModel;
use qns::qns::{design_protocol, estimate_ca_spectra, synthetic_measurements, DesignOptions, UnknownSet};
use qns::spectra::ca_spectra_exact;
use qns::QnsError;

const T: f64 = 3.2;

#[test]
fn gaussian_design_has_fourteen_settings_and_round_trips() {
    let u = UnknownSet::for_truncation(4, 2).unwrap();
    let d = design_protocol(&u, T, &DesignOptions::default(), 11).unwrap();
    assert_eq!(d.settings.len(), 14);
    println!("K=2 condition {:.3e}", d.condition);
    let truth = ca_spectra_exact(&NoiseModel::modulated(0.02, 0.6, 1.0).unwrap(), 4, T, 2).unwrap();
    let est = estimate_ca_spectra(&d, &synthetic_measurements(&d, &truth).unwrap(), 0.0).unwrap();
    let err = est.errors_against(&truth).unwrap();
    assert!(err[&2] < 1e-8, "{err:?}");
    assert!(err[&1] < 1e-10, "{err:?}");
}

#[test]
fn non_gaussian_design_has_fortynine_settings_and_round_trips() {
    let u = UnknownSet::for_truncation(4, 4).unwrap();
    let d = design_protocol(&u, T, &DesignOptions::default(), 12).unwrap();
    assert_eq!(d.settings.len(), 49);
    println!("K=4 condition {:.3e}", d.condition);
    let truth = ca_spectra_exact(&NoiseModel::telegraph(0.02, 0.6).unwrap(), 4, T, 4).unwrap();
    let est = estimate_ca_spectra(&d, &synthetic_measurements(&d, &truth).unwrap(), 0.0).unwrap();
    let err = est.errors_against(&truth).unwrap();
    assert!(err[&2] < 1e-8 && err[&4] < 1e-8, "{err:?}");
}

#[test]
fn raw_fourth_order_unknowns_are_not_identifiable() {
    let u = UnknownSet::new(4, &[1, 2, 4], false).unwrap();
    assert_eq!(u.keys().len(), 49);
    match design_protocol(&u, T, &DesignOptions::default(), 13) {
        Err(QnsError::DesignFailure { condition, .. }) => assert!(condition > 1e8),
        other => panic!("expected design failure, got {:?}", other.map(|d| d.condition)),
    }
}
