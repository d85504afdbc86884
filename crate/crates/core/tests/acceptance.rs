//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers. Exact-arithmetic items are bit-exact;
//! asymptotic items assert the stated bands and record their constants.
//!
//! Shared fixtures (the weight-12 table to 2^18 + slack and its prefix
//! caches) are built once; criteria with their own runtime budgets do the
//! full work they are timed on.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;

use cuspsum::coeffs::{
    build_cusp_form, deligne_holds, divisor_tables, hecke_violation, CoeffTable, FormId,
};
use cuspsum::exppairs::{apply_process_word, rational, large_values_bound, moment_bound_terms, ExponentPair};
use cuspsum::moments::{
    constant_c, constant_cf, exact_power_moment, large_value_count, max_short_mean_square,
    omega_scan, short_mean_square, MomentMode,
};
use cuspsum::quadruples::{
    enumerate_equal_sum_quadruples, min_gap_ratio, sqrt_sum_is_zero, QuadPattern,
};
use cuspsum::sums::{build_prefix_cache, PrefixCache, Twist};
use cuspsum::voronoi::{bessel_j, full_voronoi_check, truncation_error_scan, VoronoiParams};

/// Table length covering every criterion: 2 * 2^17 for the cubic moment,
/// plus window slack for the max-short integrals.
const TABLE_LEN: usize = (1 << 18) + 400;

fn delta_table() -> &'static CoeffTable {
    static TABLE: OnceLock<CoeffTable> = OnceLock::new();
    TABLE.get_or_init(|| build_cusp_form(FormId::Delta, TABLE_LEN).expect("table build"))
}

fn delta_cache(h: i64, k: u64) -> Arc<PrefixCache<f64>> {
    static CACHES: OnceLock<Mutex<HashMap<(i64, u64), Arc<PrefixCache<f64>>>>> = OnceLock::new();
    let registry = CACHES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = registry.lock().unwrap();
    map.entry((h, k))
        .or_insert_with(|| Arc::new(build_prefix_cache(delta_table(), h, k).expect("cache")))
        .clone()
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

#[test]
fn criterion_01_deligne_bound_exact() {
    // fresh build to 1e5 so the stated 60 s budget covers the whole job
    let start = Instant::now();
    let table = build_cusp_form(FormId::Delta, 100_000).unwrap();
    let dtables = divisor_tables(100_000);
    let ok = deligne_holds(&table, &dtables);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(ok, "Deligne bound violated");
    assert!(elapsed <= 60.0, "runtime {elapsed:.1}s exceeds 60s");
    println!("criterion 01 (Deligne exact, n <= 1e5): PASS in {elapsed:.1}s");
}

#[test]
fn criterion_02_coefficient_exactness() {
    // independent oracle: q * prod_{n<=2000}(1 - q^n)^24 by in-place updates
    let n_max = 2000usize;
    let deg = n_max - 1;
    let mut c = vec![BigInt::zero(); deg + 1];
    c[0] = BigInt::from(1);
    for n in 1..=deg {
        for _ in 0..24 {
            for i in (n..=deg).rev() {
                let sub = c[i - n].clone();
                c[i] -= sub;
            }
        }
    }
    let table = delta_table();
    for n in 1..=n_max {
        assert_eq!(*table.c(n), c[n - 1], "c({n}) mismatch vs oracle");
    }
    // Hecke relations, exact, on the full shared table (covers n <= 1e5)
    assert_eq!(hecke_violation(table), None, "Hecke relation violated");
    println!(
        "criterion 02 (coefficients bit-exact to 2000; Hecke exact to {}): PASS",
        table.n_max()
    );
}

#[test]
fn criterion_03_truncated_voronoi_slope() {
    let start = Instant::now();
    let table = delta_table();
    let samples: Vec<f64> = (0..32)
        .map(|i| 10_000.0 + 10_000.0 * (i as f64 + 0.5) / 32.0)
        .collect();
    let n_grid = [100usize, 1000, 10_000];
    let mut failures = Vec::new();
    for &(h, k) in &[(0i64, 1u64), (1, 2), (1, 3), (2, 5)] {
        let scan = truncation_error_scan(table, Twist::new(h, k).unwrap(), &samples, &n_grid)
            .unwrap();
        let slope = scan.slope.unwrap();
        println!(
            "criterion 03: twist {h}/{k}: max-err slope = {slope:.3}, mean-square-err slope = {:.3}, max errors = {:?}",
            scan.ms_slope.unwrap(),
            scan.errors
        );
        if !(-0.65..=-0.35).contains(&slope) {
            failures.push(format!("k = {k}: slope {slope:.3}"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 300.0, "runtime {elapsed:.1}s exceeds 5 min");
    assert!(
        failures.is_empty(),
        "criterion 03 (slope -0.5 +- 0.15): FAIL: {}. The measured truncation error \
         carries an N-independent component of size ~ k x^eps (the identity's error \
         floor as N approaches x), so on this grid (N up to 1e4 ~ x) the max-over-samples \
         statistic decays at about N^{{-1/4}} for k = 1 and is flat for k >= 2. \
         The N^{{-1/2}} exponent of the O-bound is not observable with \
         N up to x at x ~ 1e4-2e4.",
        failures.join("; ")
    );
    println!("criterion 03 (Voronoi error slope -0.5 +- 0.15, k in {{1,2,3,5}}): PASS in {elapsed:.1}s");
}

#[test]
fn criterion_04_second_moment_constant() {
    let table = delta_table();
    let c_ref = constant_c(table, 100_000).unwrap().value;
    let m = 100_000.0f64;
    let theory_shape = (2.0f64.powf(1.5) - 1.0) * m.powf(1.5);
    let mut failures = Vec::new();
    for &(h, k) in &[(0i64, 1u64), (1, 2), (1, 3)] {
        let cache = delta_cache(h, k);
        let r = exact_power_moment(cache.as_ref(), m, MomentMode::AbsPower, Some(2.0)).unwrap();
        let fitted_c = r.raw / (k as f64 * theory_shape);
        let rel = (fitted_c - c_ref).abs() / c_ref;
        println!(
            "criterion 04: k = {k}: int/(k ((2M)^1.5 - M^1.5)) = {fitted_c:.6} vs C = {c_ref:.6} (rel {rel:.3})"
        );
        if rel > 0.10 {
            failures.push(format!("k = {k}: rel {rel:.3}"));
        }
    }
    assert!(
        failures.is_empty(),
        "criterion 04 (second moment within 10% of C): FAIL: {}. At M = 1e5 the k = 2 \
         (alternating-twist) mean square genuinely carries ~29% excess over C k M^{{3/2}}; \
         the excess shrinks like ~M^{{-1/2}} (29.2% at M = 1e5, 25.1% at 1.31e5) and is the \
         theorem's own lower-order term, too large at this M for the stated band. \
         k = 1 and k = 3 sit at 3.6% and 7.0%.",
        failures.join("; ")
    );
    println!("criterion 04 (second moment constant within 10%): PASS");
}

#[test]
fn criterion_05_fourth_moment_vs_cf() {
    let table = delta_table();
    let quadset = enumerate_equal_sum_quadruples(4000).unwrap();
    let cache = delta_cache(0, 1);
    let cf = constant_cf(table, cache.twist(), &quadset).unwrap();
    let ratio_at = |m: f64| -> f64 {
        let r = exact_power_moment(cache.as_ref(), m, MomentMode::AbsPower, Some(4.0)).unwrap();
        r.raw / (m * m)
    };
    let r1e5 = ratio_at(100_000.0);
    let r5e4 = ratio_at(50_000.0);
    let rel_cf = (r1e5 - cf.value).abs() / cf.value;
    let rel_trend = (r5e4 - r1e5).abs() / r1e5;
    assert!(
        rel_cf <= 0.25,
        "fourth moment ratio {r1e5:.6e} vs C_F {:.6e}: rel {rel_cf:.3} > 25%",
        cf.value
    );
    assert!(
        rel_trend <= 0.15,
        "ratio at 5e4 {r5e4:.6e} vs 1e5 {r1e5:.6e}: trend gap {rel_trend:.3} > 15%"
    );
    println!(
        "criterion 05 (fourth moment): int/(k^2 M^2) = {r1e5:.6e} vs C_F = {:.6e} (rel {rel_cf:.3}), trend gap {rel_trend:.3}: PASS",
        cf.value
    );
}

#[test]
fn criterion_06_cubic_moment_slope() {
    let cache = delta_cache(0, 1);
    let mut pts = Vec::new();
    for e in 14..=17u32 {
        let m = (1u64 << e) as f64;
        let r = exact_power_moment(cache.as_ref(), m, MomentMode::AbsPower, Some(3.0)).unwrap();
        let scaled = r.raw / m.powf(1.75);
        pts.push((m.ln(), scaled.ln()));
        println!("criterion 06: M = 2^{e}: int|A|^3 / M^{{7/4}} = {scaled:.5}");
    }
    let slope = least_squares_slope(&pts);
    assert!(
        slope.abs() <= 0.05,
        "cubic ratio slope {slope:.4} outside +-0.05"
    );
    println!("criterion 06 (cubic moment slope {slope:.4} within +-0.05): PASS");
}

#[test]
fn criterion_07_short_mean_square_two_sided() {
    let cache = delta_cache(0, 1);
    let m = 100_000.0f64;
    for &delta in &[16.0f64, 64.0, 256.0] {
        let r = short_mean_square(cache.as_ref(), m, m, delta, 0.01).unwrap();
        assert!(
            (0.1..=10.0).contains(&r.ratio),
            "Delta = {delta}: ratio {} outside [0.1, 10]",
            r.ratio
        );
        assert!(r.flags.is_empty(), "Delta = {delta} flagged: {:?}", r.flags);
        println!("criterion 07: Delta = {delta}: int/(Xi Delta) = {:.4}", r.ratio);
    }
    println!("criterion 07 (short-sum mean square in [0.1, 10]): PASS");
}

#[test]
fn criterion_08_max_short_mean_square() {
    let start = Instant::now();
    let cache = delta_cache(0, 1);
    let m = 65_536.0f64;
    let r64 = max_short_mean_square(cache.as_ref(), m, 64.0, 0.01).unwrap();
    let r256 = max_short_mean_square(cache.as_ref(), m, 256.0, 0.01).unwrap();
    let variation = (r256.ratio - r64.ratio).abs() / r64.ratio;
    // recorded ceiling from this implementation's reference run
    // (measured ratios 0.00507 and 0.00344 at M = 2^16)
    const RECORDED_RATIO_CEILING: f64 = 0.01;
    assert!(
        r64.ratio <= RECORDED_RATIO_CEILING && r256.ratio <= RECORDED_RATIO_CEILING,
        "ratios {} / {} above the recorded ceiling {RECORDED_RATIO_CEILING}",
        r64.ratio,
        r256.ratio
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 600.0, "runtime {elapsed:.1}s exceeds 10 min");
    println!(
        "criterion 08: ratios int/(M Delta log^2 M) = {:.5} (Delta 64) and {:.5} (Delta 256), variation {variation:.3}",
        r64.ratio, r256.ratio
    );
    assert!(
        variation <= 0.30,
        "criterion 08 (<= 30% variation between Delta = 64 and 256): FAIL: variation \
         {variation:.3}. At the stated M = 2^16 the ratio genuinely drops 32% from \
         Delta = 64 to 256 (0.00507 -> 0.00344); the variation shrinks with M \
         (49% at 2^15, 32% at 2^16, 14% at 2^17), so the 30% band is attained only \
         one octave above the stated M."
    );
    println!(
        "criterion 08 (max-short mean square, variation {variation:.3} <= 30%): PASS in {elapsed:.1}s"
    );
}

#[test]
fn criterion_09_quadruple_enumeration_vs_brute_force() {
    for &n in &[50u64, 200] {
        let set = enumerate_equal_sum_quadruples(n).unwrap();
        let mut ours = set.all_members();
        ours.sort_unstable();
        let roots: Vec<f64> = (0..=n).map(|i| (i as f64).sqrt()).collect();
        let mut brute: Vec<[u32; 4]> = Vec::new();
        for a in 1..=n {
            for b in 1..=n {
                let rab = roots[a as usize] + roots[b as usize];
                for c in 1..=n {
                    let rabc = rab - roots[c as usize];
                    for d in 1..=n {
                        if (rabc - roots[d as usize]).abs() < 1e-9
                            && sqrt_sum_is_zero(&[(1, a), (1, b), (-1, c), (-1, d)])
                        {
                            brute.push([a as u32, b as u32, c as u32, d as u32]);
                        }
                    }
                }
            }
        }
        brute.sort_unstable();
        assert_eq!(ours.len(), brute.len(), "ordered count mismatch at N = {n}");
        assert_eq!(ours, brute, "member sets differ at N = {n}");
        if n >= 50 {
            assert!(ours.binary_search(&[1, 9, 4, 4]).is_ok());
            assert!(ours.binary_search(&[2, 32, 8, 18]).is_ok());
        }
        println!("criterion 09: N = {n}: {} ordered members, identical to brute force", ours.len());
    }
    println!("criterion 09 (kernel enumeration equals brute force at N = 50, 200): PASS");
}

#[test]
fn criterion_10_spacing_lemma_floor() {
    let mut failures = Vec::new();
    for (pattern, label) in [(QuadPattern::TwoTwo, "two_two"), (QuadPattern::ThreeOne, "three_one")] {
        let r100 = min_gap_ratio(100, pattern).unwrap();
        let r50 = min_gap_ratio(50, pattern).unwrap();
        let change = (r100.min_ratio - r50.min_ratio).abs() / r50.min_ratio;
        assert!(
            r100.min_ratio > 0.0,
            "{label}: weighted gap minimum must be positive"
        );
        assert!(
            change <= 0.5,
            "{label}: floor moved {change:.3} > 50% from N = 50 to 100"
        );
        println!(
            "criterion 10: {label}: min gap*c^2*sqrt(abc) = {:.5} at {:?} (N 50 -> 100 change {change:.3})",
            r100.min_ratio, r100.min_ratio_at
        );
        if r100.min_ratio < 0.1 {
            failures.push(format!(
                "{label}: recorded floor {:.5} at {:?} is below the stated 0.1",
                r100.min_ratio, r100.min_ratio_at
            ));
        }
    }
    assert!(
        failures.is_empty(),
        "criterion 10 (spacing lemma floor >= 0.1): FAIL: {}. The 0.1 floor is not \
         attainable for the three_one pattern: sqrt8+sqrt9+sqrt13-sqrt89 = -2.73e-6 \
         (verified in 60-digit arithmetic) gives weighted gap 0.01412, stable from \
         N = 50 to N = 100. Positivity and stability, the lemma's actual content, both hold.",
        failures.join("; ")
    );
    println!("criterion 10 (spacing lemma floor >= 0.1, stable 50 -> 100): PASS");
}

#[test]
fn criterion_11_exponent_pair_identities() {
    let start = Instant::now();
    let pair = apply_process_word("BABAAB", &ExponentPair::trivial()).unwrap();
    assert_eq!(pair, ExponentPair::from_i64(2, 9, 11, 18).unwrap());
    // 1 + (1+2q)/p = 11 at this pair
    let threshold = rational(1, 1) + (rational(1, 1) + rational(2, 1) * pair.q()) / pair.p();
    assert_eq!(threshold, rational(11, 1));
    let (phi, psi) =
        moment_bound_terms(&pair, &rational(2, 3), &rational(1, 3), &rational(3, 1)).unwrap();
    assert_eq!((phi.k_exp.clone(), phi.m_exp.clone()), (rational(8, 3), rational(4, 3)));
    assert_eq!((psi.k_exp.clone(), psi.m_exp.clone()), (rational(3, 2), rational(7, 4)));
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 1.0, "runtime {elapsed:.3}s exceeds 1s");
    println!("criterion 11 (BABAAB<0,1> = <2/9,11/18>; threshold 11; Phi (8/3,4/3), Psi (3/2,7/4)): PASS");
}

#[test]
fn criterion_12_large_value_counting() {
    let cache = delta_cache(0, 1);
    let m = 100_000.0f64;
    let pair = ExponentPair::from_i64(2, 9, 11, 18).unwrap();
    for mult in [1.0f64, 2.0] {
        let v = mult * m.powf(0.25);
        let r = large_value_count(cache.as_ref(), m, v, &pair, 0.01).unwrap();
        assert!(
            (r.r as f64) <= r.bound_value,
            "V = {v:.2}: R = {} exceeds bound {:.2}",
            r.r,
            r.bound_value
        );
        assert!(r.verify(cache.as_ref()), "report invariants violated");
        println!(
            "criterion 12: V = {v:.2}: R = {} <= bound {:.2} (margin {:.2})",
            r.r, r.bound_value, r.margin
        );
    }
    println!("criterion 12 (greedy R within the large-values bound): PASS");
}

#[test]
fn criterion_13_oscillation_positive_proportion() {
    let start = Instant::now();
    let cache = delta_cache(0, 1);
    let m = 100_000.0f64;
    let min_len = (m.sqrt() / m.ln().powi(2)).ceil() as u64; // 3 at M = 1e5
    let window = (-std::f64::consts::FRAC_PI_2 - 0.1, std::f64::consts::PI + 0.1);
    let scan = omega_scan(cache.as_ref(), m, 0.01, 100.0, window, min_len).unwrap();
    assert!(
        scan.proportion >= 0.01,
        "proportion {} below 0.01",
        scan.proportion
    );
    assert!(
        !scan.intervals.is_empty() && scan.longest_interval >= min_len,
        "no interval of length >= {min_len} (longest {})",
        scan.longest_interval
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 600.0, "runtime {elapsed:.1}s exceeds 10 min");
    println!(
        "criterion 13 (oscillation): proportion = {:.4}, {} intervals of length >= {min_len}, longest {}: PASS in {elapsed:.1}s",
        scan.proportion,
        scan.intervals.len(),
        scan.longest_interval
    );
}

/// Quadrature oracle: J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt by
/// composite 10-point Gauss-Legendre with compensated summation,
/// subdivided against the phase change. The integrand is O(1), so the
/// oracle's absolute noise floor is a few ulps of 1; its relative accuracy
/// collapses where |J| is far below that floor (small x, larger nu).
fn bessel_quadrature_oracle(nu: u32, x: f64) -> f64 {
    const GL_X: [f64; 5] = [
        0.14887433898163121,
        0.43339539412924719,
        0.67940956829902441,
        0.86506336668898451,
        0.97390652851717172,
    ];
    const GL_W: [f64; 5] = [
        0.29552422471475287,
        0.26926671930999636,
        0.21908636251598204,
        0.14945134915058059,
        0.06667134430868814,
    ];
    let pieces = (((nu as f64) * std::f64::consts::PI + 2.0 * x) / 3.0).ceil().max(8.0) as usize;
    let h = std::f64::consts::PI / pieces as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut add = |v: f64| {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    };
    for j in 0..pieces {
        let mid = (j as f64 + 0.5) * h;
        let half = 0.5 * h;
        for i in 0..5 {
            for sgn in [-1.0, 1.0] {
                let t = mid + sgn * half * GL_X[i];
                add(GL_W[i] * (nu as f64 * t - x * t.sin()).cos() * half);
            }
        }
    }
    (sum + comp) / std::f64::consts::PI
}

#[test]
fn criterion_14_bessel_accuracy() {
    // The 1e-8 relative comparison is asserted wherever the f64 oracle can
    // resolve it (|J| >= 1e-6, leaving the oracle's own noise below 1e-9
    // relative); everywhere else the same 1e-8 applies to the absolute
    // error against the O(1)-scaled integral, which is all an f64 oracle
    // can certify there (|J| drops to ~1e-27 on this grid).
    let mut worst_rel: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut worst_rec: f64 = 0.0;
    for nu in 0..=13u32 {
        for i in 0..200 {
            let x = 0.1 * 10f64.powf(5.0 * i as f64 / 199.0);
            let got = bessel_j::<f64>(nu, x).unwrap();
            let oracle = bessel_quadrature_oracle(nu, x);
            let abs_err = (got - oracle).abs();
            worst_abs = worst_abs.max(abs_err);
            assert!(
                abs_err <= 1e-8,
                "J_{nu}({x:.4}): got {got:.12e}, oracle {oracle:.12e}, abs {abs_err:.2e}"
            );
            if oracle.abs() >= 1e-6 {
                let rel = abs_err / oracle.abs();
                worst_rel = worst_rel.max(rel);
                assert!(
                    rel <= 1e-8,
                    "J_{nu}({x:.4}): got {got:.12e}, oracle {oracle:.12e}, rel {rel:.2e}"
                );
            }
            if nu >= 1 {
                let jm = bessel_j::<f64>(nu - 1, x).unwrap();
                let jp = bessel_j::<f64>(nu + 1, x).unwrap();
                let mid = 2.0 * nu as f64 / x * got;
                let scale = jm.abs().max(jp.abs()).max(mid.abs()).max(f64::MIN_POSITIVE);
                let res = (jm + jp - mid).abs() / scale;
                worst_rec = worst_rec.max(res);
                assert!(res <= 1e-7, "recurrence residual {res:.2e} at nu = {nu}, x = {x:.4}");
            }
        }
    }
    println!(
        "criterion 14 (Bessel: worst rel {worst_rel:.2e} <= 1e-8 where |J| >= 1e-6, worst abs {worst_abs:.2e} <= 1e-8, worst recurrence residual {worst_rec:.2e} <= 1e-7): PASS"
    );
}

#[test]
fn criterion_15_full_voronoi_smoke() {
    let table = delta_table();
    let r = full_voronoi_check(table, Twist::new(0, 1).unwrap(), 10.5, 50.5, 100_000).unwrap();
    assert!(
        r.rel_gap <= 0.05,
        "relative gap {} exceeds 5% (lhs {:.6}, rhs {:.6})",
        r.rel_gap,
        r.lhs.re,
        r.rhs.re
    );
    println!(
        "criterion 15 (full Voronoi, [10.5, 50.5], 1e5 terms): lhs = {:.6}, rhs = {:.6}, rel gap = {:.4}: PASS",
        r.lhs.re, r.rhs.re, r.rel_gap
    );
}

#[test]
fn criterion_16_holder_chain_and_plusplus_floor() {
    // recorded floor from this implementation's reference run
    const RECORDED_PLUSPLUS_FLOOR: f64 = 0.004;
    let m = 100_000.0f64;
    for &(h, k) in &[(0i64, 1u64), (1, 2)] {
        let cache = delta_cache(h, k);
        let m2 = exact_power_moment(cache.as_ref(), m, MomentMode::AbsPower, Some(2.0)).unwrap();
        let m3 = exact_power_moment(cache.as_ref(), m, MomentMode::AbsPower, Some(3.0)).unwrap();
        let m4 = exact_power_moment(cache.as_ref(), m, MomentMode::AbsPower, Some(4.0)).unwrap();
        assert!(
            m3.raw * m3.raw <= m2.raw * m4.raw * (1.0 + 1e-9),
            "k = {k}: Hoelder chain violated"
        );
        let pp = exact_power_moment(cache.as_ref(), m, MomentMode::PlusPlusSquare, None).unwrap();
        assert!(
            pp.ratio >= RECORDED_PLUSPLUS_FLOOR,
            "k = {k}: int|A++|^2/(k M^{{3/2}}) = {} below the recorded floor {RECORDED_PLUSPLUS_FLOOR}",
            pp.ratio
        );
        println!(
            "criterion 16: k = {k}: (int|A|^3)^2 / (int|A|^2 int|A|^4) = {:.6}, plusplus ratio = {:.5}",
            (m3.raw * m3.raw) / (m2.raw * m4.raw),
            pp.ratio
        );
    }
    println!("criterion 16 (Hoelder chain; |A++|^2 floor): PASS");
}

/// Truncation error is monotone in trend: doubling N never increases the
/// max error by more than 10% jitter per step.
#[test]
fn invariant_truncation_error_monotone_trend() {
    let table = delta_table();
    let samples: Vec<f64> = (0..32)
        .map(|i| 10_000.0 + 10_000.0 * (i as f64 + 0.5) / 32.0)
        .collect();
    let n_grid = [125usize, 250, 500, 1000, 2000, 4000, 8000];
    for &(h, k) in &[(0i64, 1u64), (1, 2), (1, 3), (2, 5)] {
        let scan =
            truncation_error_scan(table, Twist::new(h, k).unwrap(), &samples, &n_grid).unwrap();
        for w in scan.errors.windows(2) {
            assert!(
                w[1].1 <= w[0].1 * 1.10,
                "twist {h}/{k}: error rose {:.4} -> {:.4} from N = {} to {}",
                w[0].1,
                w[1].1,
                w[0].0,
                w[1].0
            );
        }
    }
    println!("invariant (truncation error trend): non-increasing within 10% jitter per doubling");
}

/// Partial sums of the mean-square constant agree within the reported tail.
#[test]
fn invariant_constant_c_self_consistency() {
    let table = delta_table();
    let full = constant_c(table, 100_000).unwrap();
    let tenth = constant_c(table, 10_000).unwrap();
    assert!(
        (full.value - tenth.value).abs() <= tenth.tail_estimate,
        "C at 1e5 vs 1e4: {} vs {} (tail {})",
        full.value,
        tenth.value,
        tenth.tail_estimate
    );
    println!(
        "invariant (C tail): |C(1e5) - C(1e4)| = {:.3e} <= tail estimate {:.3e}",
        (full.value - tenth.value).abs(),
        tenth.tail_estimate
    );
}

/// Fourth-moment constant is stable under doubling the quadruple cutoff,
/// within the recorded 3 cutoff^{-1/4} tail allowance.
#[test]
fn invariant_constant_cf_self_consistency() {
    let table = delta_table();
    let twist = Twist::new(0, 1).unwrap();
    let q2000 = enumerate_equal_sum_quadruples(2000).unwrap();
    let q4000 = enumerate_equal_sum_quadruples(4000).unwrap();
    let c2000 = constant_cf(table, twist, &q2000).unwrap();
    let c4000 = constant_cf(table, twist, &q4000).unwrap();
    let rel = (c2000.value - c4000.value).abs() / c4000.value;
    assert!(
        rel <= c2000.tail_estimate_rel,
        "C_F cutoff 2000 vs 4000: rel change {rel:.4} exceeds {:.4}",
        c2000.tail_estimate_rel
    );
    println!(
        "invariant (C_F tail): cutoff 2000 vs 4000 rel change {rel:.4} <= {:.4}",
        c2000.tail_estimate_rel
    );
}

/// Module invariant from the sums contract: the running sup of
/// |A(x)|/sqrt(x) stabilizes; its value at M = 2^17 is within a factor 1.2
/// of M = 2^16.
#[test]
fn invariant_jutila_sup_trend() {
    for &(h, k) in &[(0i64, 1u64), (1, 2), (1, 3), (2, 5), (3, 7), (5, 8)] {
        let cache = delta_cache(h, k);
        let sup_to = |m: usize| -> f64 {
            let mut best: f64 = 0.0;
            for x in 2..=m {
                best = best.max(cache.prefix(x).norm() / (x as f64).sqrt());
            }
            best
        };
        let s16 = sup_to(1 << 16);
        let s17 = sup_to(1 << 17);
        let factor = s17 / s16;
        assert!(
            (1.0 / 1.2..=1.2).contains(&factor),
            "twist {h}/{k}: sup ratio {factor:.3} outside [1/1.2, 1.2]"
        );
        println!("invariant (Jutila trend): twist {h}/{k}: sup@2^16 = {s16:.3}, sup@2^17 = {s17:.3}");
    }
}
