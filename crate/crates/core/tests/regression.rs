//! Values fixed after a first independent evaluation.

use std::time::Instant;

use rand::Rng;

use awgn_id::bounds::{id_second_order, plan_achievability, sandwich_report};
use awgn_id::channel::ChannelSpec;
use awgn_id::id_codec::{build_id_code, code_error_profile, estimate_type2, Construction, IdCodeDesign};
use awgn_id::numerics::RngStream;
use awgn_id::resolvability::{frey_bound, resolvability_experiment, FreyParams, ResolvabilityTarget};
use awgn_id::shell_quant::{quantization_tv_report, sample_sphere, QuantizerSpec};

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        for (k, &i) in idx.iter().enumerate() {
            r[i] = k as f64;
        }
        r
    };
    let (rx, ry) = (rank(xs), rank(ys));
    let n = xs.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn frey_triple() {
    let fp = FreyParams { mutual_info: 0.5, central_second: 0.7805, third_abs: 2.0, xi: 0.2, c: 2.0, d: 0.5, n: 100 };
    let b = frey_bound(&fp).unwrap();
    assert!((b.rate - 0.707_230_918_438_069_4).abs() < 1e-12, "{}", b.rate);
    assert!((b.mu - 0.401_729_856_382_717_7).abs() < 1e-12, "{}", b.mu);
    assert!((b.prob_bound - 0.243_911_895_854_621_9).abs() < 1e-12, "{}", b.prob_bound);
}

#[test]
fn sandwich_gaps_stay_bounded() {
    let ns: Vec<usize> = (50..=2000).step_by(50).collect();
    let rows = sandwich_report(&ns, 1.0, 0.1, 1.0);
    let mut feasible = 0;
    for r in &rows {
        for gap in [r.approximation_gap, r.converse_gap].into_iter().flatten() {
            assert!(gap.abs() < 9.37, "n={}: gap {gap}", r.n);
        }
        if r.feasible {
            feasible += 1;
            assert!(r.achievability.unwrap() <= r.converse.unwrap(), "n={}", r.n);
        }
    }
    assert!(feasible >= 35);
}

#[test]
fn resolvability_rank_correlation_is_negative() {
    let spec = ChannelSpec::new(8, 1.0).unwrap();
    let rates = [0.25, 0.5, 0.75, 1.0];
    let rows = resolvability_experiment(&spec, &rates, 10_000, &RngStream::new(808, 8), ResolvabilityTarget::Shell).unwrap();
    let tv: Vec<f64> = rows.iter().map(|r| r.tv).collect();
    assert_eq!(spearman(&rates, &tv), -1.0);
}

#[test]
fn smoke_build_is_fast_and_on_shell() {
    let spec = ChannelSpec::new(50, 1.0).unwrap();
    let design = IdCodeDesign {
        messages: 64,
        codewords: 256,
        subset_size: 0,
        log2_k: id_second_order(&spec, 0.1).unwrap().value,
        construction: Construction::IndependentPools,
    };
    let start = Instant::now();
    let code = build_id_code(&spec, &design, &RngStream::new(1, 0)).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(code.pool_size(), 64 * 256);
    for c in 0..code.pool_size() as u32 {
        assert!(spec.check_on_shell(code.codeword(c), 1e-9).is_ok());
    }
}

#[test]
fn disjoint_supports_respect_lemma_bound() {
    let spec = ChannelSpec::new(100, 1.0).unwrap();
    let plan = plan_achievability(&spec, 0.1, 0.0).unwrap();
    let design = IdCodeDesign {
        messages: 2,
        codewords: 256,
        subset_size: 0,
        log2_k: plan.log2_k.unwrap(),
        construction: Construction::IndependentPools,
    };
    let code = build_id_code(&spec, &design, &RngStream::new(9, 0)).unwrap();
    let e = estimate_type2(&code, 0, 1, 10_000, &RngStream::new(9, 1)).unwrap();
    let nf = 100.0_f64;
    let f = 1.0 - 1.0 / (1.0 + 2.0 / nf) - 1.0 / (nf + 2.0);
    let bound = (nf + 2.0).powi(2) * (-plan.log2_k.unwrap()).exp2() * (256.0 / f).ceil();
    let sigma = (bound.max(1.0 / 10_000.0) / 10_000.0).sqrt();
    assert!(e.value <= bound + 3.0 * sigma, "{} vs {bound}", e.value);
}

#[test]
fn certified_design_point() {
    let spec = ChannelSpec::new(50, 1.0).unwrap();
    let design = IdCodeDesign {
        messages: 16,
        codewords: 128,
        subset_size: 0,
        log2_k: id_second_order(&spec, 0.1).unwrap().value,
        construction: Construction::IndependentPools,
    };
    let code = build_id_code(&spec, &design, &RngStream::new(1, 0)).unwrap();
    let p = code_error_profile(&code, 10_000, &RngStream::new(2, 0), 0.2, 0.05, 1 << 32).unwrap();
    assert!(p.certified, "type-I {:?}, type-II {:?}", p.max_type1, p.max_type2);
    assert!(p.max_type1.ci_high <= 0.2 && p.max_type2.ci_high <= 0.05);
}

#[test]
fn fine_sectors_make_small_error() {
    let spec = ChannelSpec::new(3, 1.0).unwrap();
    let r0 = spec.shell_radius();
    let stream = RngStream::new(31, 0);
    let mut rng = stream.fork(0).rng();
    // pairs of nearby atoms, so that most sectors hold two distinct points
    let mut points = Vec::new();
    for _ in 0..100 {
        let x = sample_sphere(3, r0, &mut rng);
        let mut y: Vec<f64> = x.iter().map(|v| v + 1e-5 * rng.random_range(-1.0..1.0)).collect();
        let s = r0 / y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v *= s);
        points.push((x, 1.0));
        points.push((y, 1.0));
    }
    let qs = QuantizerSpec::for_channel(&spec, 1e-3).unwrap();
    let r = quantization_tv_report(&points, &qs, &spec, 10_000, &stream.fork(1)).unwrap();
    assert!(r.occupied_sectors < 200);
    assert!(r.pinsker_bound > 0.0 && r.pinsker_bound <= 0.01, "{}", r.pinsker_bound);
    assert!(r.empirical.tv <= r.pinsker_bound + 3.0 * r.empirical.std_error, "{:?}", r.empirical);
}
