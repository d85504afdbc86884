//! Exact piecewise moment integrals over [M, 2M], asymptotic constants,
//! large-value counting, short-sum mean squares and the oscillation scan.
//!
//! A(x, h/k) is a step function of x, so every integral here is a finite
//! sum of unit pieces plus fractional ends: no quadrature in the main path.
//! Quadrature appears only as a test oracle.

use num_complex::Complex;

use crate::coeffs::CoeffTable;
use crate::error::{Error, Result};
use crate::exppairs::{large_values_bound, ExponentPair};
use crate::quadruples::{QuadPattern, QuadrupleSet};
use crate::real::Real;
use crate::sums::{positive_part, PrefixCache, Twist};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// int |A|^A dx, divisor k^{A/2} M^{A/4+1}
    AbsPower,
    /// int A dx (complex), divisor k^{3/2} M^{3/4}
    SignedFirst,
    /// int |A| dx, divisor k^{1/2} M^{5/4}
    AbsFirst,
    /// int |A_{++}|^2 dx, divisor k M^{3/2}
    PlusPlusSquare,
}

impl MomentMode {
    pub fn label(self) -> &'static str {
        match self {
            MomentMode::AbsPower => "abs_power",
            MomentMode::SignedFirst => "signed_first",
            MomentMode::AbsFirst => "abs_first",
            MomentMode::PlusPlusSquare => "plusplus_square",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentReport<T: Real> {
    pub mode: MomentMode,
    pub m: T,
    pub k: u64,
    pub a_exp: Option<T>,
    /// integral value; the real part when mode is SignedFirst
    pub raw: T,
    /// imaginary part of the integral for SignedFirst, zero otherwise
    pub raw_imag: T,
    pub divisor: T,
    pub ratio: T,
    pub flags: Vec<String>,
}

/// Exact integral of a step function driven by the prefix cache:
/// sum over unit pieces of `f(m) * piece length` for x in [lo, hi],
/// where the integrand on [m, m+1) is f(m).
fn integrate_unit_steps<T: Real, F: FnMut(usize) -> T>(lo: T, hi: T, mut f: F) -> T {
    let lof = lo.to_f64().unwrap();
    let hif = hi.to_f64().unwrap();
    debug_assert!(lof >= 0.0 && hif >= lof);
    let first = lof.floor() as usize;
    let last = hif.floor() as usize;
    let mut total = T::zero();
    for m in first..=last {
        let left = lof.max(m as f64);
        let right = hif.min((m + 1) as f64);
        if right > left {
            total += f(m) * T::from_f64(right - left).unwrap();
        }
    }
    total
}

fn require_range<T: Real>(cache: &PrefixCache<T>, hi: f64) -> Result<()> {
    if hi > cache.n_max() as f64 {
        return Err(Error::RangeOverflow {
            lo: 0.0,
            hi,
            len: cache.n_max() as u64,
        });
    }
    Ok(())
}

/// Exact moment integral over [M, 2M] in the requested mode.
pub fn exact_power_moment<T: Real>(
    cache: &PrefixCache<T>,
    m: T,
    mode: MomentMode,
    a_exp: Option<T>,
) -> Result<MomentReport<T>> {
    let mf = m.to_f64().unwrap();
    require_range(cache, 2.0 * mf)?;
    if mf < 1.0 {
        return Err(Error::InvalidParameter("need M >= 1".into()));
    }
    let k = cache.twist().k();
    let kf = T::from_index(k);
    let two_m = m + m;

    let (raw, raw_imag, divisor) = match mode {
        MomentMode::AbsPower => {
            let a = a_exp.ok_or_else(|| {
                Error::InvalidParameter("abs_power mode needs the exponent A".into())
            })?;
            let af = a.to_f64().unwrap();
            if !(1.0..=8.0).contains(&af) {
                return Err(Error::InvalidParameter(format!(
                    "A = {af} outside [1, 8]"
                )));
            }
            let raw = integrate_unit_steps(m, two_m, |j| abs_power(cache.prefix(j), af));
            let divisor = kf.powf(a / T::from_f64(2.0).unwrap())
                * m.powf(a / T::from_f64(4.0).unwrap() + T::one());
            (raw, T::zero(), divisor)
        }
        MomentMode::SignedFirst => {
            let re = integrate_unit_steps(m, two_m, |j| cache.prefix(j).re);
            let im = integrate_unit_steps(m, two_m, |j| cache.prefix(j).im);
            let divisor =
                kf.powf(T::from_f64(1.5).unwrap()) * m.powf(T::from_f64(0.75).unwrap());
            (re, im, divisor)
        }
        MomentMode::AbsFirst => {
            let raw = integrate_unit_steps(m, two_m, |j| cache.prefix(j).norm());
            let divisor = kf.sqrt() * m.powf(T::from_f64(1.25).unwrap());
            (raw, T::zero(), divisor)
        }
        MomentMode::PlusPlusSquare => {
            let raw = integrate_unit_steps(m, two_m, |j| positive_part(cache.prefix(j)).norm_sqr());
            let divisor = kf * m.powf(T::from_f64(1.5).unwrap());
            (raw, T::zero(), divisor)
        }
    };
    Ok(MomentReport {
        mode,
        m,
        k,
        a_exp,
        raw,
        raw_imag,
        divisor,
        ratio: raw / divisor,
        flags: Vec::new(),
    })
}

fn abs_power<T: Real>(z: Complex<T>, a: f64) -> T {
    let ns = z.norm_sqr();
    if a == 2.0 {
        ns
    } else if a == 4.0 {
        ns * ns
    } else if a == 3.0 {
        ns * ns.sqrt()
    } else if a == 1.0 {
        ns.sqrt()
    } else {
        ns.powf(T::from_f64(a / 2.0).unwrap())
    }
}

/// Partial sum of the mean-square constant C = (1/6 pi^2) sum |a(n)|^2 n^{-3/2},
/// with a tail estimate proportional to cutoff^{-1/2}.
#[derive(Debug, Clone, Copy)]
pub struct MeanSquareConstant {
    pub value: f64,
    pub tail_estimate: f64,
    pub cutoff: usize,
}

pub fn constant_c(table: &CoeffTable, cutoff: usize) -> Result<MeanSquareConstant> {
    if cutoff < 1 || cutoff > table.n_max() {
        return Err(Error::RangeOverflow {
            lo: 1.0,
            hi: cutoff as f64,
            len: table.n_max() as u64,
        });
    }
    let scale = 1.0 / (6.0 * std::f64::consts::PI * std::f64::consts::PI);
    let mut sum = 0.0;
    let mut square_mass = 0.0;
    for n in 1..=cutoff {
        let a2 = table.a(n) * table.a(n);
        square_mass += a2;
        sum += a2 / (n as f64).powf(1.5);
    }
    // |a|^2 has average density square_mass/cutoff; the tail of n^{-3/2}
    // integrates to 2 cutoff^{-1/2}
    let tail = scale * (square_mass / cutoff as f64) * 2.0 / (cutoff as f64).sqrt();
    Ok(MeanSquareConstant {
        value: scale * sum,
        tail_estimate: tail,
        cutoff,
    })
}

/// The fourth-moment constant: three constrained sums over square-root
/// additive quadruples, weighted by (abcd)^{-3/4} and the twist factor,
/// scaled by 3/(64 pi^4).
///
/// The second and third constraint patterns are images of the first under
/// b<->c and b<->d relabelling and contribute identical terms for real
/// coefficients, so the stored sum is taken once and the swapped one
/// twice. Solutions split into same-kernel members (iterated explicitly)
/// and cross-kernel permutations (x,y,x,y), (x,y,y,x), whose contribution
/// factorizes: with u(x) = a(x)^2 x^{-3/2} and
/// U(t) = sum_x u(x) e(-t x h_bar/k),
/// the permutation mass is 2(T^2 - sum_m T_m^2) for the stored pattern and
/// (|U(2)|^2 - sum_m |U_m(2)|^2) + (T^2 - sum_m T_m^2) for each swapped
/// one, where T = U(0) and the m-sums run over kernel classes.
#[derive(Debug, Clone, Copy)]
pub struct FourthMomentConstant {
    pub value: f64,
    pub imag_residue: f64,
    /// relative tail estimate, 3 cutoff^{-1/4}
    pub tail_estimate_rel: f64,
    pub cutoff: u64,
    pub terms: usize,
}

pub fn constant_cf(
    table: &CoeffTable,
    twist: Twist,
    quadset: &QuadrupleSet,
) -> Result<FourthMomentConstant> {
    if quadset.members.is_empty() {
        return Err(Error::InvalidParameter(
            "quadruple set is empty; enumerate before summing".into(),
        ));
    }
    if quadset.pattern != QuadPattern::TwoTwo {
        return Err(Error::InvalidParameter(
            "fourth-moment constant needs the two_two equality set".into(),
        ));
    }
    let cutoff = quadset.cutoff;
    if cutoff as usize > table.n_max() {
        return Err(Error::RangeOverflow {
            lo: 1.0,
            hi: cutoff as f64,
            len: table.n_max() as u64,
        });
    }
    let k = twist.k();
    let roots: Vec<Complex<f64>> = crate::sums::unit_roots::<f64>(k)
        .into_iter()
        .map(|z| z.conj())
        .collect();
    // e(-(a+b-c-d) h_bar / k) with the argument reduced mod k
    let phase = |a: u64, b: u64, c: u64, d: u64| -> Complex<f64> {
        let s = ((a + b) % k + 2 * k - (c + d) % k) % k;
        roots[((s * twist.h_bar()) % k) as usize]
    };
    let weight = |a: u64, b: u64, c: u64, d: u64| -> f64 {
        let prod = (a as f64) * (b as f64) * (c as f64) * (d as f64);
        table.a(a as usize) * table.a(b as usize) * table.a(c as usize) * table.a(d as usize)
            * prod.powf(-0.75)
    };
    let mut acc = NeumaierSum::default();
    let mut acc_im = NeumaierSum::default();
    let mut terms = 0usize;
    for &[a, b, c, d] in &quadset.members {
        let (a, b, c, d) = (a as u64, b as u64, c as u64, d as u64);
        let w = weight(a, b, c, d);
        // pattern 1: sqrt a + sqrt b = sqrt c + sqrt d, as stored
        let z1 = phase(a, b, c, d) * w;
        // patterns 2 and 3: relabelled (a, c, b, d); equal for real a(n)
        let z2 = phase(a, c, b, d) * w;
        acc.add(z1.re);
        acc.add(z2.re + z2.re);
        acc_im.add(z1.im);
        acc_im.add(z2.im + z2.im);
        terms += 3;
    }

    // cross-kernel permutation solutions, in closed form per kernel class
    let u_of = |x: u64| -> f64 { table.a(x as usize).powi(2) * (x as f64).powf(-1.5) };
    let mut t_total = NeumaierSum::default();
    let mut u_total_re = NeumaierSum::default();
    let mut u_total_im = NeumaierSum::default();
    let mut t_class_sq = 0.0f64;
    let mut u_class_sq = 0.0f64;
    for &(m, u_max) in &quadset.classes {
        let mut t_m = 0.0f64;
        let mut u_m = Complex::<f64>::new(0.0, 0.0);
        for r in 1..=u_max as u64 {
            let x = m * r * r;
            let ux = u_of(x);
            let tw = roots[((2 * (x % k) % k) * twist.h_bar() % k) as usize];
            t_m += ux;
            u_m += tw * ux;
            t_total.add(ux);
            u_total_re.add(tw.re * ux);
            u_total_im.add(tw.im * ux);
        }
        t_class_sq += t_m * t_m;
        u_class_sq += u_m.norm_sqr();
    }
    let t = t_total.total();
    let u_sq = Complex::new(u_total_re.total(), u_total_im.total()).norm_sqr();
    let cross_pairs = t * t - t_class_sq; // sum of u(x)u(y) over kernel(x) != kernel(y)
    let cross_twisted = u_sq - u_class_sq; // same with the e(-2(x-y) h_bar/k) factor
    acc.add(2.0 * cross_pairs); // stored pattern, both permutations at phase 1
    acc.add(2.0 * (cross_twisted + cross_pairs)); // the two swapped patterns
    let class_pair_count: u128 = quadset
        .classes
        .iter()
        .map(|&(_, u)| (u as u128) * (u as u128))
        .sum();
    let cross_count = (cutoff as u128) * (cutoff as u128) - class_pair_count;
    terms += (6 * cross_count) as usize;

    let scale = 3.0 / (64.0 * std::f64::consts::PI.powi(4));
    let value = acc.total() * scale;
    let imag = acc_im.total() * scale;
    Ok(FourthMomentConstant {
        value,
        imag_residue: imag.abs(),
        tail_estimate_rel: 3.0 * (cutoff as f64).powf(-0.25),
        cutoff,
        terms,
    })
}

/// Compensated (Neumaier) accumulator; the fourth-moment imaginary residue
/// must cancel to ~1e-10 relative across hundreds of thousands of terms.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Greedy maximal V-separated selection of large values of |A| on integer
/// abscissae in [M, 2M].
#[derive(Debug, Clone)]
pub struct LargeValueReport {
    pub v: f64,
    pub points: Vec<u64>,
    pub r: usize,
    pub bound_value: f64,
    /// bound / max(R, 1)
    pub margin: f64,
}

impl LargeValueReport {
    /// Re-check the report's own invariants: V-spacing and the threshold.
    pub fn verify<T: Real>(&self, cache: &PrefixCache<T>) -> bool {
        let mut prev: Option<u64> = None;
        for &t in &self.points {
            if cache.prefix(t as usize).norm().to_f64().unwrap() < self.v {
                return false;
            }
            if let Some(p) = prev {
                if ((t - p) as f64) < self.v {
                    return false;
                }
            }
            prev = Some(t);
        }
        true
    }
}

pub fn large_value_count<T: Real>(
    cache: &PrefixCache<T>,
    m: f64,
    v: f64,
    pair: &ExponentPair,
    eps: f64,
) -> Result<LargeValueReport> {
    require_range(cache, 2.0 * m)?;
    let k = cache.twist().k() as f64;
    let v_lo = k * m.powf(eps);
    let v_hi = m.sqrt();
    if !(v_lo..=v_hi).contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "V = {v} outside the admissible window [k M^eps, sqrt M] = [{v_lo:.3}, {v_hi:.3}]"
        )));
    }
    let mut points = Vec::new();
    let mut next_allowed = m.ceil();
    let hi = (2.0 * m).floor() as u64;
    let mut t = m.ceil() as u64;
    while t <= hi {
        if (t as f64) >= next_allowed {
            let val = cache.prefix(t as usize).norm().to_f64().unwrap();
            if val >= v {
                points.push(t);
                next_allowed = t as f64 + v;
            }
        }
        t += 1;
    }
    let bound = large_values_bound(pair, cache.twist().k(), m, v, eps)?;
    let r = points.len();
    let report = LargeValueReport {
        v,
        points,
        r,
        bound_value: bound.value,
        margin: bound.value / r.max(1) as f64,
    };
    debug_assert!(report.verify(cache));
    Ok(report)
}

/// Breakpoints of x -> S(floor(x + delta)) - S(ceil(x) - 1) inside [lo, hi]:
/// the integers and the points where floor(x + delta) jumps.
fn window_breakpoints(lo: f64, hi: f64, delta: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut m = lo.floor();
    while m <= hi {
        if m > lo && m < hi {
            pts.push(m);
        }
        let shift = (m + delta).ceil() - delta; // where floor(x+delta) jumps within (m, m+1)
        if shift > lo && shift < hi && shift > m && shift < m + 1.0 {
            pts.push(shift);
        }
        m += 1.0;
    }
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// Exact integral of |short_sum(x, delta)|^2 over [M, M + Xi], with the
/// admissibility window checked and flagged (violations do not stop
/// the computation).
pub fn short_mean_square<T: Real>(
    cache: &PrefixCache<T>,
    m: f64,
    xi: f64,
    delta_len: f64,
    eps: f64,
) -> Result<MomentReport<T>> {
    require_range(cache, m + xi + delta_len)?;
    if !(xi > 0.0 && delta_len >= 0.0 && m >= 1.0) {
        return Err(Error::InvalidParameter(
            "need M >= 1, Xi > 0, delta >= 0".into(),
        ));
    }
    let k = cache.twist().k();
    let kf = k as f64;
    let mut flags = Vec::new();
    if !(1.0 <= delta_len && delta_len <= m.sqrt()) {
        flags.push("inadmissible: delta outside [1, sqrt M]".to_string());
    }
    if kf > delta_len.sqrt() * m.powf(-eps) {
        flags.push("inadmissible: k > Delta^{1/2} M^{-eps}".to_string());
    }
    if xi < kf * kf * m.powf(1.0 + eps) / delta_len.max(f64::MIN_POSITIVE) || xi > m {
        flags.push("inadmissible: Xi outside [k^2 M^{1+eps}/Delta, M]".to_string());
    }

    let pts = window_breakpoints(m, m + xi, delta_len);
    let mut raw = T::zero();
    for w in pts.windows(2) {
        let (left, right) = (w[0], w[1]);
        let mid = 0.5 * (left + right);
        let lo_idx = (mid.ceil() as i64 - 1).max(0) as usize;
        let hi_idx = (mid + delta_len).floor() as usize;
        let val = if hi_idx < lo_idx {
            T::zero()
        } else {
            (cache.prefix(hi_idx) - cache.prefix(lo_idx)).norm_sqr()
        };
        raw += val * T::from_f64(right - left).unwrap();
    }
    let divisor = T::from_f64(xi * delta_len.max(f64::MIN_POSITIVE)).unwrap();
    Ok(MomentReport {
        mode: MomentMode::AbsPower,
        m: T::from_f64(m).unwrap(),
        k,
        a_exp: Some(T::from_f64(2.0).unwrap()),
        raw,
        raw_imag: T::zero(),
        divisor,
        ratio: raw / divisor,
        flags,
    })
}

/// Exact integral of max_short_deviation(x, delta)^2 over [M, 2M];
/// cost O(M * delta).
pub fn max_short_mean_square<T: Real>(
    cache: &PrefixCache<T>,
    m: f64,
    delta_len: f64,
    eps: f64,
) -> Result<MomentReport<T>> {
    require_range(cache, 2.0 * m + delta_len)?;
    let k = cache.twist().k();
    let kf = k as f64;
    let mut flags = Vec::new();
    if !(m.powf(eps) <= delta_len && delta_len <= m.sqrt()) {
        flags.push("inadmissible: delta outside [M^eps, sqrt M]".to_string());
    }
    if kf > delta_len.powf(0.25) * m.powf(-eps) {
        flags.push("inadmissible: k > Delta^{1/4} M^{-eps}".to_string());
    }

    let pts = window_breakpoints(m, 2.0 * m, delta_len);
    let mut raw = T::zero();
    for w in pts.windows(2) {
        let (left, right) = (w[0], w[1]);
        let mid = 0.5 * (left + right);
        let lo_idx = (mid.ceil() as i64 - 1).max(0) as usize;
        let hi_idx = (mid + delta_len).floor() as usize;
        let base = cache.prefix(lo_idx);
        let mut best = T::zero();
        for j in lo_idx..=hi_idx.max(lo_idx) {
            let dev = (cache.prefix(j) - base).norm_sqr();
            if dev > best {
                best = dev;
            }
        }
        raw += best * T::from_f64(right - left).unwrap();
    }
    let log_m = m.ln();
    let divisor = T::from_f64(m * delta_len * log_m * log_m).unwrap();
    Ok(MomentReport {
        mode: MomentMode::AbsPower,
        m: T::from_f64(m).unwrap(),
        k,
        a_exp: Some(T::from_f64(2.0).unwrap()),
        raw,
        raw_imag: T::zero(),
        divisor,
        ratio: raw / divisor,
        flags,
    })
}

/// Oscillation scan driven by
/// omega(x) = |A_{++}|^2 - C max_dev(x, Delta)^2 - c k sqrt x.
#[derive(Debug, Clone)]
pub struct OscillationReport {
    pub c_small: f64,
    pub c_big: f64,
    pub delta_len: f64,
    /// measure of { x in [M, 2M] : omega(x) > 0 }
    pub measure: f64,
    pub proportion: f64,
    /// |A| threshold sqrt(c k) M^{1/4} used for interval detection
    pub amplitude_threshold: f64,
    /// maximal integer runs [start, end] with |A| above threshold and
    /// arg A inside the window; lengths are end - start + 1
    pub intervals: Vec<(u64, u64)>,
    pub longest_interval: u64,
}

pub fn omega_scan<T: Real>(
    cache: &PrefixCache<T>,
    m: f64,
    c_small: f64,
    c_big: f64,
    arg_window: (f64, f64),
    min_interval_len: u64,
) -> Result<OscillationReport> {
    require_range(cache, 2.0 * m + 1.0)?;
    if c_small <= 0.0 || c_big <= 0.0 {
        return Err(Error::InvalidParameter("need c > 0 and C > 0".into()));
    }
    let k = cache.twist().k() as f64;
    let log_m = m.ln();
    let delta_len = c_small * m.sqrt() / (log_m * log_m);
    let lo = m.ceil() as u64;
    let hi = (2.0 * m).floor() as u64;

    let mut measure = 0.0f64;
    let threshold = (c_small * k).sqrt() * m.powf(0.25);
    let (w_lo, w_hi) = arg_window;
    let width = w_hi - w_lo;
    let mut intervals: Vec<(u64, u64)> = Vec::new();
    let mut run_start: Option<u64> = None;

    for x in lo..=hi {
        let a = cache.prefix(x as usize);
        let af = Complex::new(a.re.to_f64().unwrap(), a.im.to_f64().unwrap());
        let dev = cache
            .max_short_deviation(T::from_index(x), T::from_f64(delta_len).unwrap())?
            .to_f64()
            .unwrap();
        let frozen = positive_part(af).norm_sqr() - c_big * dev * dev;
        let omega = frozen - c_small * k * (x as f64).sqrt();
        // unit pieces [x, x+1) tile [M, 2M); the last abscissa only marks
        // interval membership
        if omega > 0.0 && x < hi {
            // the only x-dependence inside [x, x+1) is -c k sqrt t; linear
            // interpolation on that term locates the sign change
            let omega_end = frozen - c_small * k * ((x + 1) as f64).sqrt();
            if omega_end >= 0.0 {
                measure += 1.0;
            } else {
                measure += (omega / (omega - omega_end)).clamp(0.0, 1.0);
            }
        }

        // interval detection on |A| and arg A
        let in_window = af.norm() >= threshold && {
            let rel = (af.arg() - w_lo).rem_euclid(2.0 * std::f64::consts::PI);
            rel <= width
        };
        match (in_window, run_start) {
            (true, None) => run_start = Some(x),
            (false, Some(s)) => {
                if x - s >= min_interval_len.max(1) {
                    intervals.push((s, x - 1));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        if hi + 1 - s >= min_interval_len.max(1) {
            intervals.push((s, hi));
        }
    }
    let longest = intervals.iter().map(|&(s, e)| e - s + 1).max().unwrap_or(0);
    Ok(OscillationReport {
        c_small,
        c_big,
        delta_len,
        measure,
        proportion: measure / m,
        amplitude_threshold: threshold,
        intervals,
        longest_interval: longest,
    })
}
