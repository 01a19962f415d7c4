use proxyhss::kernel_file::KernelFile;
use proxyhss::CliError;
use proxyhss_core::kernels::toeplitz_entry;

#[test]
fn builtin_orientation() {
    let c = KernelFile::builtin("cauchy_scaled", 64).unwrap();
    assert!(!c.symmetric);
    let s = c.to_spec().unwrap();
    // n/(j - i) above the diagonal, its negative mirror below.
    assert_eq!(toeplitz_entry(&s, 1, 3).unwrap(), 32.0);
    assert_eq!(toeplitz_entry(&s, 3, 1).unwrap(), -32.0);
    for name in ["cos_over_n", "cos_quarter", "shifted_square", "bmb_entropy"] {
        let k = KernelFile::builtin(name, 64).unwrap();
        assert!(k.symmetric, "{name}");
        let s = k.to_spec().unwrap();
        assert_eq!(toeplitz_entry(&s, 2, 9).unwrap(), toeplitz_entry(&s, 9, 2).unwrap());
    }
    assert!(KernelFile::builtin("nope", 64).is_err());
}

#[test]
fn shifted_square_entries() {
    let s = KernelFile::builtin("shifted_square", 16).unwrap().to_spec().unwrap();
    // (|j - i| - n/2)²
    assert_eq!(toeplitz_entry(&s, 1, 4).unwrap(), 25.0);
    assert_eq!(toeplitz_entry(&s, 1, 9).unwrap(), 0.0);
}

#[test]
fn parse_defaults_and_fields() {
    let k = KernelFile::parse(r#"{"name": "cos_over_n", "n": 128}"#).unwrap();
    assert_eq!(k.n, 128);
    assert_eq!(k.t0, 0.0);
    assert!(k.symmetric);
    assert!(k.params.is_empty());

    let k = KernelFile::parse(r#"{"name": "cauchy_scaled", "n": 32, "t0": 1.5, "symmetric": false}"#).unwrap();
    let s = k.to_spec().unwrap();
    assert_eq!(toeplitz_entry(&s, 4, 4).unwrap(), 1.5);
    assert!(!s.is_symmetric());
}

#[test]
fn parse_rejects_bad_input() {
    assert!(matches!(KernelFile::parse(r#"{"name": "cos_over_n", "n": 8, "colour": 1}"#), Err(CliError::Kernel(_))));
    assert!(matches!(KernelFile::parse(r#"{"n": 8}"#), Err(CliError::Kernel(_))));
    assert!(matches!(KernelFile::parse("not json"), Err(CliError::Kernel(_))));
}

#[test]
fn json_round_trip() {
    let mut k = KernelFile::builtin("bmb_entropy", 256).unwrap();
    k.t0 = -2.0;
    assert_eq!(KernelFile::parse(&k.to_json()).unwrap(), k);
}

#[test]
fn resolve_forms() {
    let k = KernelFile::resolve("cos_over_n", Some(64)).unwrap();
    assert_eq!((k.name.as_str(), k.n), ("cos_over_n", 64));
    assert!(matches!(KernelFile::resolve("cos_over_n", None), Err(CliError::Usage(_))));

    let k = KernelFile::resolve(r#" {"name": "cauchy_scaled", "n": 16}"#, Some(512)).unwrap();
    assert_eq!(k.n, 512);

    let dir = std::env::temp_dir().join(format!("proxyhss-kernel-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k.json");
    std::fs::write(&path, r#"{"name": "shifted_square", "n": 32}"#).unwrap();
    let k = KernelFile::resolve(path.to_str().unwrap(), None).unwrap();
    assert_eq!((k.name.as_str(), k.n), ("shifted_square", 32));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn any_size_specs() {
    // t1 sizes are not powers of two.
    let s = KernelFile::builtin("cos_quarter", 24).unwrap().to_spec().unwrap();
    assert_eq!(s.n(), 24);
    // cos(π/2)
    assert!(toeplitz_entry(&s, 1, 3).unwrap().abs() < 1e-15);
    assert_eq!(toeplitz_entry(&s, 1, 5).unwrap(), -1.0);
}
