use beamsync::config::{ArrayKind, Bits, Method, Mode, Regime, Scenario};
use beamsync::core::quantization::Resolution;

#[test]
fn mode_alone_resolves_to_defaults() {
    let s = Scenario::from_toml_str("mode = \"single_ue\"").unwrap();
    assert_eq!(s, Scenario::new(Mode::SingleUe));
    assert_eq!(s.ofdm.n_subcarriers, 512);
    assert_eq!(s.ofdm.cp_length, 64);
    assert_eq!(s.ofdm.subcarrier_spacing_khz, 270.0);
    assert_eq!((s.ofdm.zc_root, s.ofdm.zc_length), (34, 63));
    assert_eq!((s.bs.n_tot, s.bs.n_rf, s.ue.m_tot), (32, 4, 16));
    assert_eq!(s.bs.array, ArrayKind::Ula);
    assert_eq!(s.channel.regime, Regime::Clustered);
    assert_eq!(s.methods, vec![Method::Proposed, Method::SingleStream]);
    assert!((s.ofdm.sample_rate_hz() - 138.24e6).abs() < 1.0);
}

#[test]
fn mode_is_required() {
    assert!(Scenario::from_toml_str("trials = 3").is_err());
}

#[test]
fn unknown_keys_are_rejected() {
    let err = Scenario::from_toml_str("mode = \"single_ue\"\n[ofdm]\nn_subcariers = 512\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("n_subcariers"), "{err}");
    assert!(Scenario::from_toml_str("mode = \"single_ue\"\nspeed = 3\n").is_err());
}

#[test]
fn bits_accept_integers_and_inf() {
    let s = Scenario::from_toml_str("mode = \"single_ue\"\n[adc]\nbits = [1, 3, \"inf\"]\n").unwrap();
    assert_eq!(
        s.adc.bits,
        vec![Bits(Resolution::Bits(1)), Bits(Resolution::Bits(3)), Bits(Resolution::Infinite)]
    );
    for bad in ["0", "17", "\"infinite\""] {
        let text = format!("mode = \"single_ue\"\n[adc]\nbits = [{bad}]\n");
        assert!(Scenario::from_toml_str(&text).is_err(), "{bad}");
    }
}

#[test]
fn validation_errors_name_the_key() {
    let cases = [
        ("trials = 0", "trials"),
        ("[snr]\nsnr_db = []", "snr.snr_db"),
        ("[bs]\nn_rf = 5", "bs.n_rf"),
        ("[ofdm]\nn_subcarriers = 500", "ofdm.n_subcarriers"),
        ("[channel]\nrolloff = 2.0", "channel.rolloff"),
    ];
    for (body, key) in cases {
        let err = Scenario::from_toml_str(&format!("mode = \"single_ue\"\n{body}\n"))
            .unwrap_err()
            .to_string();
        assert!(err.contains(key), "{body}: {err}");
    }
}

#[test]
fn round_trip_and_hash() {
    let mut s = Scenario::new(Mode::MultiCell);
    s.trials = 17;
    s.adc.bits = vec![Bits(Resolution::Bits(2)), Bits(Resolution::Infinite)];
    let back = Scenario::from_toml_str(&s.to_toml()).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.hash(), s.hash());
    assert_eq!(s.hash().len(), 64);

    // the hash describes the setup, not the seed
    let mut reseeded = s.clone();
    reseeded.seed = 99;
    assert_eq!(reseeded.hash(), s.hash());
    let mut other = s.clone();
    other.trials = 18;
    assert_ne!(other.hash(), s.hash());
}

#[test]
fn from_path_prefixes_the_file_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "mode = \"single_ue\"\ntrials = 0\n").unwrap();
    let err = Scenario::from_path(&path).unwrap_err().to_string();
    assert!(err.contains("bad.toml") && err.contains("trials"), "{err}");
    assert!(Scenario::from_path(&dir.path().join("missing.toml")).is_err());
}

#[test]
fn bundled_scenarios_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            Scenario::from_path(&path).unwrap();
            n += 1;
        }
    }
    assert!(n >= 4);
}
