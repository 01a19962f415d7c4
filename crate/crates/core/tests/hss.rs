mod common;

use common::{fro, fro_diff, rng};
use proptest::prelude::*;
use proxyhss_core::bounds::level_termwise_bound;
use proxyhss_core::hss::*;
use proxyhss_core::kernels::*;
use proxyhss_core::numerics::{numerical_rank, RealMatrix};
use proxyhss_core::Error;
use rand::Rng;

fn spec(name: &str, n: usize) -> ToeplitzSpec {
    let f = GeneratingFunction::builtin(name, n, &[]).unwrap();
    if name == "cauchy_scaled" {
        ToeplitzSpec::skew(f, 0.0).unwrap()
    } else {
        ToeplitzSpec::symmetric(f, 0.0).unwrap()
    }
}

fn dense(spec: &ToeplitzSpec) -> RealMatrix {
    let n = spec.n();
    dense_block(spec, &KernelBlockRequest::ranges(1, n, 1, n)).unwrap()
}

fn range(a: usize, b: usize) -> IndexRange {
    IndexRange::new(a, b).unwrap()
}

#[test]
fn tree_examples() {
    let t = build_tree(32, 2).unwrap();
    assert_eq!(t.nodes().len(), 7);
    let leaves: Vec<IndexRange> = t.leaves().iter().map(|&j| t.node(j).range).collect();
    assert_eq!(leaves, [range(1, 8), range(9, 16), range(17, 24), range(25, 32)]);
    assert_eq!(t.node(t.root()).range, range(1, 32));

    let t = build_tree(16, 1).unwrap();
    assert_eq!(t.nodes().len(), 3);
    let ranges: Vec<IndexRange> = t.nodes().iter().map(|v| v.range).collect();
    assert_eq!(ranges, [range(1, 8), range(9, 16), range(1, 16)]);
    assert!(t.node(0).is_leaf() && t.node(1).is_leaf() && !t.node(2).is_leaf());
    assert_eq!(t.node(0).sibling, Some(1));
    assert_eq!(t.node(2).children, Some([0, 1]));
}

#[test]
fn tree_structure_invariants() {
    for (n, levels) in [(16, 1), (32, 3), (256, 6), (1024, 4)] {
        let t = build_tree(n, levels).unwrap();
        assert_eq!(t.nodes().len(), (2 << levels) - 1);
        for (id, node) in t.nodes().iter().enumerate() {
            if let Some([a, b]) = node.children {
                assert!(a < id && b < id, "postorder");
                assert_eq!(t.node(a).range.start, node.range.start);
                assert_eq!(t.node(b).range.end, node.range.end);
                assert_eq!(t.node(a).range.end + 1, t.node(b).range.start);
                assert!(t.is_left_child(a) && !t.is_left_child(b));
            }
            assert_eq!(node.depth + node.height, levels);
        }
        for depth in 0..=levels {
            let ids = t.nodes_at_depth(depth);
            assert_eq!(ids.len(), 1 << depth);
            let mut next = 1;
            for j in ids {
                assert_eq!(t.node(j).range.start, next);
                assert_eq!(t.node(j).range.len(), t.node_size(depth));
                next = t.node(j).range.end + 1;
            }
            assert_eq!(next, n + 1);
        }
    }
}

#[test]
fn tree_rejects_bad_sizes() {
    for (n, levels) in [(8, 1), (24, 1), (32, 0), (32, 4), (1024, 9)] {
        assert!(build_tree(n, levels).is_err(), "n={n} L={levels}");
    }
    assert!(build_tree(1024, 8).is_ok());
}

#[test]
fn split_examples() {
    let s = split_near_far(range(1, 8)).unwrap();
    assert_eq!((s.near, s.far), (vec![1, 2, 7, 8], vec![3, 4, 5, 6]));
    let s = split_near_far(range(1, 4)).unwrap();
    assert_eq!((s.near, s.far), (vec![1, 4], vec![2, 3]));
    let s = split_near_far(range(9, 16)).unwrap();
    assert_eq!((s.near, s.far), (vec![9, 10, 15, 16], vec![11, 12, 13, 14]));
    assert!(split_near_far(range(1, 6)).is_err());
}

#[test]
fn leaf_generator_trace() {
    let t = build_tree(32, 2).unwrap();
    for r in 1..=6 {
        let g = build_level_generator(&t, 2, None, &HssBuildConfig::new(2, 16, r)).unwrap();
        let k = r.min(4);
        assert_eq!(g.candidates, (0..8).collect::<Vec<_>>());
        assert_eq!((g.near_count, g.far_count), (4, 4));
        assert_eq!(g.candidate_count(), 8);
        assert_eq!(g.skeleton_size(), 4 + k);
        assert_eq!(g.rank, k);
        assert_eq!(g.rank_reduced, r > 4);
        for o in [0, 1, 6, 7] {
            assert!(g.skeleton.contains(&o), "near offset {o} kept");
        }
        assert_eq!(g.to_dense().shape(), (8, 4 + k));
        // Far-field radii: offsets ±0.5, ±1.5 from the centre 4.5.
        assert_eq!(g.scheme.inner_radius(), 2.0);
        assert_eq!(g.scheme.outer_radius(), 4.5);
        assert_eq!(g.scheme.quad_radius(), 3.0);
    }
}

#[test]
fn generator_argument_errors() {
    let t = build_tree(64, 2).unwrap();
    let cfg = HssBuildConfig::new(2, 16, 4);
    assert!(build_level_generator(&t, 0, None, &cfg).is_err());
    assert!(build_level_generator(&t, 1, None, &cfg).is_err());
    assert!(build_level_generator(&t, 2, Some(&[0, 1]), &cfg).is_err());
    assert!(build_level_generator(&t, 1, Some(&[3, 1]), &cfg).is_err());
    assert!(build_level_generator(&t, 1, Some(&[0, 16]), &cfg).is_err());
    assert!(build_level_generator(&t, 3, None, &cfg).is_err());
}

#[test]
fn full_rank_generator_is_identity() {
    let t = build_tree(64, 2).unwrap();
    let g = build_level_generator(&t, 2, None, &HssBuildConfig::new(2, 32, 100)).unwrap();
    assert_eq!(g.skeleton, g.candidates);
    assert_eq!(g.expansion.rows(), 0);
    assert_eq!(g.to_dense(), RealMatrix::identity(16));
}

#[test]
fn generators_reused_bitwise_at_every_node() {
    for name in ["shifted_square", "cauchy_scaled"] {
        let s = spec(name, 256);
        let cfg = HssBuildConfig::new(3, 24, 10);
        let form = build_hss(&s, &cfg).unwrap();
        let t = form.tree();
        for depth in 1..=3 {
            let carried = (depth < 3).then(|| form.generator(depth + 1).skeleton.clone());
            for id in t.nodes_at_depth(depth) {
                let g = build_level_generator_at(t, id, carried.as_deref(), &cfg).unwrap();
                assert!(g == *form.generator(depth), "{name} depth {depth} node {id}");
                assert_eq!(g.expansion.as_slice(), form.generator(depth).expansion.as_slice());
            }
        }
    }
}

#[test]
fn generators_interpolative_and_nested() {
    for (n, levels, p, r) in [(256, 3, 24, 10), (1024, 4, 32, 28), (2048, 2, 48, 28), (512, 7, 16, 6)] {
        let form = build_hss(&spec("cauchy_scaled", n), &HssBuildConfig::new(levels, p, r)).unwrap();
        for depth in 1..=levels {
            let g = form.generator(depth);
            g.validate().unwrap();
            assert!(g.max_expansion() <= 2.0, "max|E| = {}", g.max_expansion());
            let d = g.to_dense();
            for (i, row) in g.rows.iter().enumerate() {
                if let GeneratorRow::Skeleton(c) = *row {
                    let unit: Vec<f64> = (0..g.skeleton_size()).map(|j| (j == c) as u8 as f64).collect();
                    assert_eq!(d.row(i), unit.as_slice());
                }
            }
            assert!(g.skeleton.iter().all(|o| g.candidates.contains(o)));
            assert_eq!(g.skeleton_size(), g.near_count + g.rank);
            if depth < levels {
                let child = &form.generator(depth + 1).skeleton;
                let half = g.node_size / 2;
                let expected: Vec<usize> = child.iter().copied().chain(child.iter().map(|o| o + half)).collect();
                assert_eq!(g.candidates, expected);
            }
        }
        assert!(form.stats().max_expansion <= 2.0);
    }
}

#[test]
fn full_rank_builds_reproduce_dense() {
    for n in [32, 64] {
        for name in ["cos_over_n", "shifted_square", "cauchy_scaled", "bmb_entropy"] {
            let s = spec(name, n);
            let levels = n.trailing_zeros() as usize - 2;
            for l in 1..=levels {
                let form = build_hss(&s, &HssBuildConfig::new(l, 64, 1000)).unwrap();
                let t = dense(&s);
                let rel = fro_diff(&hss_to_dense(&form).unwrap(), &t) / fro(&t);
                assert!(rel <= 1e-12, "{name} n={n} L={l}: {rel:e}");
            }
        }
    }
}

#[test]
fn compressed_toy_build_meets_tolerance() {
    let s = spec("cauchy_scaled", 64);
    let form = build_hss(&s, &HssBuildConfig::new(2, 32, 28)).unwrap();
    let t = dense(&s);
    assert!(fro_diff(&hss_to_dense(&form).unwrap(), &t) / fro(&t) <= 1e-10);

    for name in ["cauchy_scaled", "cos_over_n"] {
        let s = spec(name, 1024);
        let form = build_hss(&s, &HssBuildConfig::new(5, 32, 28)).unwrap();
        assert!(form.stats().skeleton_sizes.iter().all(|&k| k < form.tree().node_size(1)));
        let t = dense(&s);
        let rel = fro_diff(&hss_to_dense(&form).unwrap(), &t) / fro(&t);
        assert!(rel <= 1e-10, "{name}: {rel:e}");
    }
}

#[test]
fn leaf_blocks_are_exact() {
    let s = spec("bmb_entropy", 128);
    let form = build_hss(&s, &HssBuildConfig::new(3, 24, 8)).unwrap();
    let a = hss_to_dense(&form).unwrap();
    let t = form.tree();
    for id in t.leaves() {
        let r = t.node(id).range;
        let exact = dense_block(&s, &KernelBlockRequest::ranges(r.start, r.end, r.start, r.end)).unwrap();
        let got = a.submatrix(r.start - 1, r.start - 1, r.len(), r.len());
        assert_eq!(got.as_slice(), exact.as_slice());
    }
}

#[test]
fn sibling_blocks_match_kernel_and_transpose() {
    let s = spec("cos_over_n", 256);
    let form = build_hss(&s, &HssBuildConfig::new(3, 32, 28)).unwrap();
    let t = form.tree();
    for id in 0..t.nodes().len() {
        let Some(sib) = t.node(id).sibling else { continue };
        let (a, b) = (t.node(id).range, t.node(sib).range);
        let block = hss_block_dense(&form, id).unwrap();
        let exact = dense_block(&s, &KernelBlockRequest::ranges(a.start, a.end, b.start, b.end)).unwrap();
        assert!(fro_diff(&block, &exact) <= 1e-10 * fro(&exact));
        let other = hss_block_dense(&form, sib).unwrap();
        assert!(fro_diff(&block, &other.transpose()) <= 1e-12 * fro(&block));
    }
    assert!(matches!(hss_block_dense(&form, t.root()), Err(Error::InvalidArgument(_))));
}

#[test]
fn non_symmetric_orientations() {
    let s = spec("cauchy_scaled", 128);
    let form = build_hss(&s, &HssBuildConfig::new(2, 32, 28)).unwrap();
    for depth in 1..=2 {
        let c = form.coupling(depth);
        assert_eq!(c.left.transpose().scale(-1.0), c.right);
        for left in [true, false] {
            assert!(block_error(&form, depth, left).unwrap().rel <= 1e-11);
        }
    }
}

#[test]
fn matvec_matches_dense() {
    let s = spec("shifted_square", 32);
    let form = build_hss(&s, &HssBuildConfig::new(2, 16, 3)).unwrap();
    assert_eq!(hss_matvec(&form, &[0.0; 32]).unwrap(), vec![0.0; 32]);
    let a = hss_to_dense(&form).unwrap();
    let mut e1 = vec![0.0; 32];
    e1[0] = 1.0;
    let col = hss_matvec(&form, &e1).unwrap();
    for (i, v) in col.iter().enumerate() {
        assert!((v - a[(i, 0)]).abs() <= 1e-13 * (1.0 + a[(i, 0)].abs()));
    }

    let mut g = rng(7);
    for (n, levels) in [(64, 2), (256, 4), (512, 7)] {
        let s = spec("bmb_entropy", n);
        let form = build_hss(&s, &HssBuildConfig::new(levels, 20, 6)).unwrap();
        let a = hss_to_dense(&form).unwrap();
        let x: Vec<f64> = (0..n).map(|_| g.gen_range(-1.0..1.0)).collect();
        let want = a.mul_vec(&x).unwrap();
        let got = hss_matvec(&form, &x).unwrap();
        let err: f64 = want.iter().zip(&got).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = want.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(err <= 1e-11 * norm, "n={n}: {err:e}");
    }
    assert!(matches!(
        hss_matvec(&form, &[1.0; 3]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn matvec_against_entry_oracle_at_2048() {
    let n = 2048;
    let s = spec("cauchy_scaled", n);
    let form = build_hss(&s, &HssBuildConfig::new(4, 32, 28)).unwrap();
    let mut g = rng(11);
    let x: Vec<f64> = (0..n).map(|_| g.gen_range(-1.0..1.0)).collect();
    let got = hss_matvec(&form, &x).unwrap();
    let (mut err, mut norm) = (0.0, 0.0);
    for i in 1..=n {
        let row: f64 = (1..=n).map(|j| toeplitz_entry(&s, i, j).unwrap() * x[j - 1]).sum();
        err += (row - got[i - 1]).powi(2);
        norm += row * row;
    }
    assert!((err / norm).sqrt() <= 1e-10);
}

#[test]
fn topmost_block_errors_at_2048() {
    // Reference values scaled by 100.
    let cells = [
        ("shifted_square", 2, 32, 5.4863e-11),
        ("shifted_square", 4, 32, 3.0e-11),
        ("cauchy_scaled", 2, 32, 7.1041e-12),
    ];
    for (name, levels, p, limit) in cells {
        let form = build_hss(&spec(name, 2048), &HssBuildConfig::new(levels, p, 28)).unwrap();
        let e = block_error(&form, 1, true).unwrap();
        assert!(e.rel <= limit, "{name} L={levels} p={p}: {:e}", e.rel);
        assert!(form.stats().max_expansion <= 2.0);
    }
}

#[test]
fn topmost_block_numerical_rank() {
    let s = spec("cauchy_scaled", 2048);
    let top = dense_block(&s, &KernelBlockRequest::ranges(1, 1024, 1025, 2048)).unwrap();
    let r = numerical_rank(&top, 1e-14).unwrap();
    assert!((24..=28).contains(&r), "rank {r}");
}

#[test]
fn block_error_within_loose_bound() {
    let (n, levels, p, rank) = (1024, 3, 24, 28);
    let f = GeneratingFunction::new(Builtin::CauchyScaled, n);
    let form = build_hss(&spec("cauchy_scaled", n), &HssBuildConfig::new(levels, p, rank)).unwrap();
    let e = block_error(&form, 1, true).unwrap();
    let side = (n / 2) as f64;
    let mut combined = 0.0;
    let mut amplification = 1.0;
    for depth in (1..=levels).rev() {
        let g = form.generator(depth);
        let height = g.node_size.trailing_zeros() as usize - 2;
        let level = level_termwise_bound(&f, n, height, p, 128).unwrap().value;
        let m = g.far_count as f64;
        let k = g.rank as f64;
        amplification *= (1.0 + 4.0 * k * (m - k)).sqrt();
        combined += level * side * amplification;
    }
    assert!(e.abs <= 10.0 * combined, "{} vs {}", e.abs, combined);
}

#[test]
fn build_stats_and_validation() {
    let s = spec("cos_over_n", 1024);
    let cfg = HssBuildConfig::new(3, 32, 28);
    let form = build_hss(&s, &cfg).unwrap();
    let st = form.stats();
    assert_eq!(st.d_entries, 128 * 128);
    assert_eq!(st.generator_entry_evals, 0);
    let b: usize = st.skeleton_sizes.iter().map(|k| 2 * k * k).sum();
    assert_eq!(st.b_entries, b);
    assert_eq!(st.skeleton_sizes.len(), 3);
    assert_eq!(form.max_rank(), st.skeleton_sizes[0]);

    let again = HssForm::from_parts(
        s,
        cfg,
        form.leaf_block().clone(),
        form.generators().to_vec(),
        form.couplings().to_vec(),
        st.clone(),
    )
    .unwrap();
    assert_eq!(again, form);
    let mut bad = form.couplings().to_vec();
    bad[0].left = RealMatrix::zeros(2, 2);
    assert!(HssForm::from_parts(s, cfg, form.leaf_block().clone(), form.generators().to_vec(), bad, st.clone()).is_err());

    for bad in [
        HssBuildConfig::new(3, 3, 28),
        HssBuildConfig::new(3, 32, 0),
        HssBuildConfig { f_bound: 1.0, ..cfg },
        HssBuildConfig::new(9, 32, 28),
    ] {
        assert!(build_hss(&s, &bad).is_err());
    }
    let odd = ToeplitzSpec::any_size(48, GeneratingFunction::new(Builtin::CosOverN, 48), GeneratingFunction::new(Builtin::CosOverN, 48), 0.0).unwrap();
    assert!(build_hss(&odd, &HssBuildConfig::new(1, 16, 4)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matvec_equals_dense_product(
        log_n in 4usize..8,
        level_frac in 0.0f64..1.0,
        p in 8usize..40,
        rank in 1usize..30,
        kernel in 0usize..5,
        seed in any::<u64>(),
    ) {
        let n = 1 << log_n;
        let levels = 1 + ((log_n - 2) as f64 * level_frac) as usize;
        let levels = levels.min(log_n - 2);
        let s = spec(Builtin::ALL[kernel].name(), n);
        let form = build_hss(&s, &HssBuildConfig::new(levels, p, rank)).unwrap();
        for g in form.generators() {
            prop_assert!(g.max_expansion() <= 2.0);
        }
        let a = hss_to_dense(&form).unwrap();
        let mut g = rng(seed);
        let x: Vec<f64> = (0..n).map(|_| g.gen_range(-1.0..1.0)).collect();
        let want = a.mul_vec(&x).unwrap();
        let got = hss_matvec(&form, &x).unwrap();
        let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (w, v) in want.iter().zip(&got) {
            prop_assert!((w - v).abs() <= 1e-11 * scale * n as f64);
        }
    }
}
