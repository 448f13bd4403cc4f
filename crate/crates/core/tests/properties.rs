mod common;

use common::*;
use fastcur::flops;
use fastcur::inputs::{average_matrix, parse_matrix_market};
use fastcur::kernels::{qr_cp, truncated_svd, volume};
use fastcur::selection::{default_max_iters, maxvol_from};
use fastcur::twostage::cross_approx_traced;
use fastcur::*;
use proptest::prelude::*;
use std::path::Path;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn qr_reconstructs(m in 1usize..40, n in 1usize..40, seed: u64, scale in -20i32..20) {
        let a = gaussian(m, n, seed).scale(10f64.powi(scale)).unwrap();
        let f = qr_cp(&a).unwrap();
        let ap = to_na(&a.select_cols(&f.perm).unwrap());
        let resid = (&ap - to_na(&f.q) * to_na(&f.r)).norm();
        prop_assert!(resid <= 1e-12 * ap.norm());
        let mut perm = f.perm.clone();
        perm.sort();
        prop_assert_eq!(perm, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn truncated_svd_is_optimal(seed: u64, r in 1usize..50) {
        let a = gaussian(50, 50, seed);
        let t = truncated_svd(&a, r).unwrap();
        let tail: f64 = sigma(&a)[r..].iter().map(|s| s * s).sum();
        let resid = a.sub(&t.reconstruct().unwrap()).unwrap().frobenius_norm();
        let total = a.frobenius_norm().powi(2);
        prop_assert!((resid * resid - tail).abs() <= 1e-9 * total);
    }

    #[test]
    fn flops_are_additive(m in 1usize..20, k in 1usize..20, n in 1usize..20) {
        let (a, b) = (gaussian(m, k, 1), gaussian(k, n, 2));
        let (_, fa) = flops::measure(|| a.matmul(&b).unwrap());
        let (_, fb) = flops::measure(|| b.transpose().matmul(&a.transpose()).unwrap());
        let (_, both) = flops::measure(|| {
            a.matmul(&b).unwrap();
            b.transpose().matmul(&a.transpose()).unwrap();
        });
        prop_assert_eq!(fa + fb, both);
        prop_assert_eq!(fa, (m * k * n) as u64);
    }

    #[test]
    fn volume_is_multiplicative(seed: u64) {
        let eye = Matrix::identity(10).unwrap().scale(4.0).unwrap();
        let a = gaussian(10, 10, seed).add(&eye).unwrap();
        let b = gaussian(10, 10, seed ^ 1).add(&eye).unwrap();
        let lhs = volume(&a.matmul(&b).unwrap()).unwrap();
        let rhs = volume(&a).unwrap() * volume(&b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn maxvol_is_dominant_and_monotone(n in 4usize..80, r in 1usize..8, seed: u64) {
        prop_assume!(r <= n);
        let a = gaussian(n, r, seed);
        let delta = 0.01;
        let mv = maxvol(&a, delta, default_max_iters(r)).unwrap();
        let mut rows = mv.initial.clone();
        let mut vol = volume(&a.select_rows(&rows).unwrap()).unwrap();
        for s in &mv.swaps {
            rows[s.slot] = s.row;
            let next = volume(&a.select_rows(&rows).unwrap()).unwrap();
            prop_assert!(next > vol);
            vol = next;
        }
        let mut fin = rows.clone();
        fin.sort();
        let mut got = mv.rows.as_slice().to_vec();
        got.sort();
        prop_assert_eq!(fin, got);
        if mv.converged {
            prop_assert!(mv.max_coefficient <= 1.0 + delta);
            let sq = to_na(&a.select_rows(mv.rows.as_slice()).unwrap());
            let b = to_na(&a) * sq.try_inverse().unwrap();
            prop_assert!(b.amax() <= 1.0 + delta + 1e-9);
        }
    }

    #[test]
    fn maxvol_from_identity_block_is_fixed(n in 3usize..30, r in 1usize..4, seed: u64) {
        prop_assume!(r < n);
        let tail = gaussian(n - r, r, seed);
        let bound = tail.max_abs();
        let a = Matrix::from_fn(n, r, |i, j| {
            if i < r { (i == j) as u8 as f64 } else { tail.get(i - r, j) / bound }
        }).unwrap();
        let mv = maxvol_from(&a, (0..r).collect(), 0.01, 10).unwrap();
        prop_assert!(mv.swaps.is_empty());
        prop_assert_eq!(mv.rows.as_slice(), &(0..r).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn select_rc_columns_ignore_row_order(seed: u64, r in 1usize..6) {
        let b = gaussian(12, 9, seed);
        let base = select_rc(&b, r).unwrap();
        let mut perm: Vec<usize> = (0..12).collect();
        perm.rotate_left((seed % 12) as usize);
        perm.reverse();
        let pb = b.select_rows(&perm).unwrap();
        let sel = select_rc(&pb, r).unwrap();
        prop_assert_eq!(sel.cols.as_slice(), base.cols.as_slice());
        let mapped: Vec<usize> = sel.rows.as_slice().iter().map(|&i| perm[i]).collect();
        prop_assert_eq!(mapped, base.rows.as_slice().to_vec());
    }

    #[test]
    fn select_rc_on_exact_rank_is_nonsingular(seed: u64, r in 1usize..6) {
        let b = rank_r(15, 12, r, seed);
        let sel = select_rc(&b, r).unwrap();
        prop_assert!(!sel.rank_deficient);
        let x = b.select(sel.rows.as_slice(), sel.cols.as_slice()).unwrap();
        let s = sigma(&x);
        prop_assert!(s[r - 1] > 1e-8 * sigma(&b)[0]);
    }

    #[test]
    fn cur_is_exact_on_exact_rank(seed: u64, r in 1usize..5, extra in 0usize..4) {
        let w = rank_r(30, 25, r, seed);
        let rows: Vec<usize> = (0..r + extra).map(|i| (i * 7 + (seed % 30) as usize) % 30).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let cols: Vec<usize> = (0..r + extra).map(|j| (j * 7 + 1) % 25).collect();
        prop_assume!(rows.len() >= r);
        let (ri, ci) = (IndexSet::rows(rows, 30).unwrap(), IndexSet::cols(cols, 25).unwrap());
        let x = w.select(ri.as_slice(), ci.as_slice()).unwrap();
        prop_assume!(sigma(&x)[r - 1] > 1e-6 * sigma(&x)[0]);
        let f = CurFactors::build(&w, &ri, &ci, r, 1e-10).unwrap();
        prop_assert!(error_exact(&w, &f, Norm::Frobenius).unwrap() <= 1e-10 * w.frobenius_norm());
        let full = error_sampled(&w, &f, 25, seed).unwrap();
        let exact = error_exact(&w, &f, Norm::Frobenius).unwrap();
        prop_assert!((full - exact).abs() <= 1e-12 * w.frobenius_norm());
    }

    #[test]
    fn bidiag_determinant_is_one(n in 2usize..25, b in 0usize..5, seed: u64, interleaved: bool) {
        let permute = if interleaved { Permute::Interleaved } else { Permute::None };
        let f = Multiplier::bidiagonal_product(n, b, seed, permute).unwrap();
        let det = to_na(&f.to_dense().unwrap()).determinant().abs();
        prop_assert!((det - 1.0).abs() <= 1e-8, "{}", det);
    }

    #[test]
    fn multiplier_roundtrip(n in 1usize..60, b in 0usize..9, seed: u64, interleaved: bool, right: bool) {
        let permute = if interleaved { Permute::Interleaved } else { Permute::None };
        let f = Multiplier::bidiagonal_product(n, b, seed, permute).unwrap();
        let (x, side) = if right { (gaussian(3, n, seed ^ 7), Side::Right) } else { (gaussian(n, 3, seed ^ 7), Side::Left) };
        let back = solve_mult(&f, &apply_mult(&f, &x, side).unwrap(), side).unwrap();
        prop_assert!(back.sub(&x).unwrap().frobenius_norm() <= 1e-10 * x.frobenius_norm());
    }

    #[test]
    fn sparse_support_bound_without_permutations(n in 1usize..80, b in 0usize..10, seed: u64) {
        let f = Multiplier::bidiagonal_product(n, b, seed, Permute::None).unwrap();
        for j in 0..n {
            prop_assert!(f.sparse_col(j).unwrap().nnz() <= b + 1);
            prop_assert!(f.sparse_row(j).unwrap().nnz() <= b + 1);
        }
    }

    #[test]
    fn sparse_support_bound_with_permutations(n in 1usize..80, b in 0usize..8, seed: u64) {
        let f = Multiplier::bidiagonal_product(n, b, seed, Permute::Interleaved).unwrap();
        for j in 0..n {
            prop_assert!(f.sparse_col(j).unwrap().nnz() <= n.min(1 << b));
        }
    }

    #[test]
    fn genp_equals_block_of_one(n in 1usize..30, seed: u64) {
        let a = gaussian(n, n, seed).add(&Matrix::identity(n).unwrap().scale(n as f64).unwrap()).unwrap();
        let (g, fg) = flops::measure(|| genp(&a, 1e-12).unwrap());
        let (b, fb) = flops::measure(|| block_ge(&a, 1, 1e-12).unwrap());
        prop_assert_eq!(g.l.data(), b.l.data());
        prop_assert_eq!(g.u.data(), b.u.data());
        prop_assert_eq!(g.growth.to_bits(), b.growth.to_bits());
        prop_assert_eq!(fg, fb);
        for i in 0..n {
            prop_assert_eq!(g.l.get(i, i), 1.0);
            for j in 0..i {
                prop_assert_eq!(g.u.get(i, j), 0.0);
                prop_assert_eq!(g.l.get(j, i), 0.0);
            }
        }
    }

    #[test]
    fn block_ge_reproduces_input(n in 2usize..40, block in 1usize..12, seed: u64) {
        let a = gaussian(n, n, seed).add(&Matrix::identity(n).unwrap().scale(n as f64).unwrap()).unwrap();
        let lu = block_ge(&a, block.min(n), 1e-12).unwrap();
        prop_assert!(lu.residual(&a).unwrap() <= 1e-10 * lu.growth);
    }

    #[test]
    fn market_roundtrip(m in 1usize..12, n in 1usize..12, seed: u64, exp in -300i32..300) {
        let a = gaussian(m, n, seed).scale(10f64.powi(exp)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&path, &a).unwrap();
        let back = read_matrix_market(&path).unwrap();
        prop_assert_eq!(back.data(), a.data());
    }

    #[test]
    fn market_parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_matrix_market(&text, Path::new("fuzz.mtx"));
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn two_stage_is_deterministic(seed: u64) {
        let w = average_matrix(60, 50, 3, 1e-6, seed).unwrap();
        let cfg = TwoStageConfig::new(12, 12, 3, seed);
        let (f1, mut r1) = two_stage_cur(&w, &cfg).unwrap();
        let (f2, mut r2) = two_stage_cur(&w, &cfg).unwrap();
        r1.wall_ms = 0.0;
        r2.wall_ms = 0.0;
        prop_assert_eq!(f1, f2);
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn stage_one_flops_ignore_matrix_size(seed: u64, grow in 1usize..4) {
        let cfg = TwoStageConfig::new(16, 16, 4, seed);
        let small = average_matrix(40, 40, 4, 1e-8, seed).unwrap();
        let big = average_matrix(40 * grow, 40 * (grow + 1), 4, 1e-8, seed).unwrap();
        let (_, a) = two_stage_cur(&small, &cfg).unwrap();
        let (_, b) = two_stage_cur(&big, &cfg).unwrap();
        prop_assert_eq!(a.stage1_flops, b.stage1_flops);
    }

    #[test]
    fn two_stage_exact_rank(seed: u64, r in 1usize..6) {
        let w = average_matrix(80, 70, r, 0.0, seed).unwrap();
        let (f, rep) = two_stage_cur(&w, &TwoStageConfig::new(4 * r, 4 * r, r, seed)).unwrap();
        prop_assert!(rep.rel_err_sampled <= 1e-9);
        prop_assert!(rel_frobenius(&w, &to_na(&f.to_dense(&w).unwrap())) <= 1e-9);
    }

    #[test]
    fn cross_volumes_never_decrease(seed: u64, l in 1usize..8) {
        let w = average_matrix(50, 40, 8, 1e-3, seed).unwrap();
        let (_, _, trace) = cross_approx_traced(&w, &CrossConfig::new(l, seed)).unwrap();
        for v in trace.volumes.windows(2) {
            prop_assert!(v[1] >= v[0] * (1.0 - 1e-12), "{:?}", trace.volumes);
        }
    }

    #[test]
    fn identity_preprocessing_is_two_stage(seed: u64) {
        let w = average_matrix(50, 45, 3, 1e-4, seed).unwrap();
        let cfg = TwoStageConfig::new(12, 10, 3, seed);
        let id = MultiplierConfig::identity();
        let (lr, _) = preprocessed_cur(&w, &cfg, &id, &id).unwrap();
        let (f, _) = two_stage_cur(&w, &cfg).unwrap();
        let (got, want) = (lr.product().unwrap(), f.to_dense(&w).unwrap());
        prop_assert_eq!(got.data(), want.data());
    }

    #[test]
    fn average_draw_count(m in 1usize..20, n in 1usize..20, r in 1usize..5, seed: u64) {
        prop_assume!(r <= m.min(n));
        use fastcur::rng;
        let w = average_matrix(m, n, r, 0.5, seed).unwrap();
        let mut g = rng::rng(seed);
        let g1 = rng::normals(&mut g, m * r);
        let g2 = rng::normals(&mut g, r * n);
        let e = rng::normals(&mut g, m * n);
        // column-major draws within each factor
        let a = Matrix::from_fn(m, r, |i, j| g1[j * m + i]).unwrap();
        let b = Matrix::from_fn(r, n, |i, j| g2[j * r + i]).unwrap();
        let noise = Matrix::from_fn(m, n, |i, j| e[j * m + i]).unwrap();
        let want = a.matmul(&b).unwrap().add(&noise.scale(0.5).unwrap()).unwrap();
        prop_assert!(w.sub(&want).unwrap().max_abs() <= 1e-12 * want.max_abs());
    }
}
