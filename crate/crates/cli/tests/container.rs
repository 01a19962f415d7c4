use proptest::prelude::*;
use proxyhss::container::{decode, digest, encode, load, save, MAGIC};
use proxyhss::kernel_file::KernelFile;
use proxyhss_core::hss::{build_hss, hss_matvec, HssBuildConfig, HssForm};

fn form(name: &str, n: usize, levels: usize, p: usize, r: usize) -> HssForm {
    let spec = KernelFile::builtin(name, n).unwrap().to_spec().unwrap();
    build_hss(&spec, &HssBuildConfig::new(levels, p, r)).unwrap()
}

fn assert_same(a: &HssForm, b: &HssForm) {
    assert_eq!(a.n(), b.n());
    assert_eq!(a.config(), b.config());
    assert_eq!(a.spec(), b.spec());
    assert_eq!(a.leaf_block(), b.leaf_block());
    assert_eq!(a.generators(), b.generators());
    assert_eq!(a.couplings(), b.couplings());
    assert_eq!(a.stats(), b.stats());
}

#[test]
fn round_trip_is_bit_identical() {
    for (name, n, levels) in [("cauchy_scaled", 256, 3), ("shifted_square", 512, 4), ("bmb_entropy", 64, 2)] {
        let f = form(name, n, levels, 24, 12);
        let bytes = encode(&f);
        assert_eq!(&bytes[..8], &MAGIC);
        let g = decode(&bytes).unwrap();
        assert_same(&f, &g);
        assert_eq!(encode(&g), bytes);
        assert_eq!(digest(&f), digest(&g));
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let (a, b) = (hss_matvec(&f, &x).unwrap(), hss_matvec(&g, &x).unwrap());
        assert!(a.iter().zip(&b).all(|(u, v)| u.to_bits() == v.to_bits()));
    }
}

#[test]
fn save_and_load() {
    let f = form("cauchy_scaled", 128, 2, 32, 28);
    let path = std::env::temp_dir().join(format!("proxyhss-container-{}.pxh", std::process::id()));
    save(&f, &path).unwrap();
    let g = load(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_same(&f, &g);
    assert!(load(&path).is_err());
}

#[test]
fn digest_tracks_content() {
    let a = form("cauchy_scaled", 256, 3, 24, 12);
    let b = form("cauchy_scaled", 256, 3, 28, 12);
    assert_eq!(digest(&a).len(), 64);
    assert_ne!(digest(&a), digest(&b));
}

#[test]
fn corrupt_inputs_are_rejected() {
    let bytes = encode(&form("cos_over_n", 128, 2, 24, 12));
    let mut bad_magic = bytes.clone();
    bad_magic[0] ^= 1;
    assert!(decode(&bad_magic).is_err());
    let mut bad_version = bytes.clone();
    bad_version[8] = 99;
    assert!(decode(&bad_version).is_err());
    for cut in [0, 7, 12, 40, bytes.len() / 2, bytes.len() - 1] {
        assert!(decode(&bytes[..cut]).is_err(), "truncated at {cut}");
    }
    let mut trailing = bytes.clone();
    trailing.push(0);
    assert!(decode(&trailing).is_err());
    assert!(decode(&bytes).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn any_build_round_trips(e in 4u32..9, p in 4usize..40, r in 1usize..30, kernel in 0usize..3) {
        let n = 1usize << e;
        let levels = 1 + (p + r) % (e as usize - 2);
        let name = ["cauchy_scaled", "shifted_square", "cos_over_n"][kernel];
        let f = form(name, n, levels, p, r);
        let bytes = encode(&f);
        let g = decode(&bytes).unwrap();
        prop_assert_eq!(encode(&g), bytes);
        prop_assert_eq!(digest(&f), digest(&g));
    }
}
