//! Truncated Voronoi main term, its measured truncation error, and a
//! small-scale check of the full Voronoi summation formula with f = 1.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::coeffs::CoeffTable;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::sums::{unit_roots, PrefixCache, Twist};

mod bessel;
pub use bessel::{bessel_j, MAX_ARGUMENT, MAX_ORDER};

/// h_bar in [0, k) with h * h_bar = 1 (mod k), by extended Euclid.
/// k = 1 returns 0.
pub fn mod_inverse(h: u64, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::ZeroModulus);
    }
    if k == 1 {
        return Ok(0);
    }
    let (mut old_r, mut r) = (h as i128 % k as i128, k as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotCoprime {
            h: h as i64,
            k,
        });
    }
    Ok(old_s.rem_euclid(k as i128) as u64)
}

/// Evaluation point of the truncated identity: 1 <= N <= x, k <= x.
#[derive(Debug, Clone, Copy)]
pub struct VoronoiParams<T: Real> {
    x: T,
    n_trunc: usize,
    twist: Twist,
}

impl<T: Real> VoronoiParams<T> {
    pub fn new(x: T, n_trunc: usize, twist: Twist) -> Result<Self> {
        let xf = x.to_f64().unwrap();
        if n_trunc < 1 || (n_trunc as f64) > xf {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= N <= x; got N = {n_trunc}, x = {xf}"
            )));
        }
        if (twist.k() as f64) > xf {
            return Err(Error::InvalidParameter(format!(
                "need k <= x; got k = {}, x = {xf}",
                twist.k()
            )));
        }
        Ok(VoronoiParams { x, n_trunc, twist })
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }
}

/// Main term of the truncated Voronoi identity:
/// (k^{1/2} x^{1/4} / (pi sqrt 2)) sum_{n<=N} a(n) n^{-3/4} e(-n h_bar/k)
///   cos(4 pi sqrt(nx)/k - pi/4).
pub fn voronoi_main_term<T: Real>(
    table: &CoeffTable,
    params: &VoronoiParams<T>,
) -> Result<Complex<T>> {
    if params.n_trunc > table.n_max() {
        return Err(Error::RangeOverflow {
            lo: 1.0,
            hi: params.n_trunc as f64,
            len: table.n_max() as u64,
        });
    }
    let twist = params.twist;
    let k = twist.k();
    // e(-j/k) table indexed by (n * h_bar) mod k
    let roots: Vec<Complex<T>> = unit_roots::<T>(k).into_iter().map(|z| z.conj()).collect();
    let x = params.x;
    let kf = T::from_index(k);
    let four_pi = T::from_f64(4.0 * std::f64::consts::PI).unwrap();
    let quarter_pi = T::from_f64(std::f64::consts::FRAC_PI_4).unwrap();
    let mut sum = Complex::<T>::zero();
    let mut idx: u64 = 0;
    for n in 1..=params.n_trunc {
        idx += twist.h_bar();
        if idx >= k {
            idx -= k;
        }
        let a = T::from_f64(table.a(n)).unwrap();
        if a == T::zero() {
            continue;
        }
        let nf = T::from_index(n as u64);
        let phase = (four_pi * (nf * x).sqrt() / kf - quarter_pi).cos();
        let weight = a * nf.powf(T::from_f64(-0.75).unwrap()) * phase;
        sum += roots[idx as usize] * weight;
    }
    let scale = kf.sqrt() * x.powf(T::from_f64(0.25).unwrap())
        / (T::from_f64(std::f64::consts::PI).unwrap() * T::from_f64(2.0).unwrap().sqrt());
    Ok(sum * scale)
}

/// Measured truncation error over a grid of lengths N.
///
/// Two statistics per N: the max over x samples of |A - main term| and the
/// mean square of the same differences. The O(k x^{1/2+eps} N^{-1/2}) error
/// governs the mean square (slope -1/2 in N); the max of finitely many
/// samples sits at the rms scale N^{-1/4} and saturates at the coefficient
/// jump floor, so both are reported with their fitted slopes.
#[derive(Debug, Clone)]
pub struct TruncationScan {
    /// (N, max over x samples of |A(x) - main term(x, N)|)
    pub errors: Vec<(usize, f64)>,
    /// (N, mean over x samples of |A(x) - main term(x, N)|^2)
    pub mean_square_errors: Vec<(usize, f64)>,
    /// least-squares slope of log max-err against log N; None for a 1-point grid
    pub slope: Option<f64>,
    /// intercept of the same fit: err ~ exp(intercept) * N^slope
    pub intercept: Option<f64>,
    /// least-squares slope of log mean-square-err against log N
    pub ms_slope: Option<f64>,
}

pub fn truncation_error_scan(
    table: &CoeffTable,
    twist: Twist,
    x_samples: &[f64],
    n_grid: &[usize],
) -> Result<TruncationScan> {
    if x_samples.is_empty() || n_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "truncation scan needs nonempty x samples and N grid".into(),
        ));
    }
    let cache: PrefixCache<f64> =
        crate::sums::build_prefix_cache(table, twist.h() as i64, twist.k())?;
    let mut errors = Vec::with_capacity(n_grid.len());
    let mut ms_errors = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let mut worst = 0.0f64;
        let mut sq_sum = 0.0f64;
        for &x in x_samples {
            let params = VoronoiParams::new(x, n, twist)?;
            let main = voronoi_main_term(table, &params)?;
            let truth = cache.long_sum(x)?;
            let err = (truth - main).norm();
            worst = worst.max(err);
            sq_sum += err * err;
        }
        errors.push((n, worst));
        ms_errors.push((n, sq_sum / x_samples.len() as f64));
    }
    let fit = |pts: &[(usize, f64)]| -> (Option<f64>, Option<f64>) {
        if pts.len() < 2 {
            return (None, None);
        }
        let logs: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(n, e)| ((n as f64).ln(), e.max(1e-300).ln()))
            .collect();
        let (s, i) = least_squares(&logs);
        (Some(s), Some(i))
    };
    let (slope, intercept) = fit(&errors);
    let (ms_slope, _) = fit(&ms_errors);
    Ok(TruncationScan {
        errors,
        mean_square_errors: ms_errors,
        slope,
        intercept,
        ms_slope,
    })
}

pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Both sides of the full Voronoi formula over [a, b] with f = 1.
#[derive(Debug, Clone)]
pub struct FullVoronoiReport {
    pub lhs: Complex<f64>,
    pub rhs: Complex<f64>,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

/// lhs: sum' over a <= n <= b of a(n) e(nh/k), integer endpoints halved.
/// rhs: (-1)^{kappa/2} (2 pi / k) sum_{n <= n_terms} a(n) e(-n h_bar/k)
///      int_a^b J_{kappa-1}(4 pi sqrt(nx)/k) dx,
/// the integrals by Gauss-Legendre on subintervals holding at most one
/// oscillation each.
pub fn full_voronoi_check(
    table: &CoeffTable,
    twist: Twist,
    a: f64,
    b: f64,
    n_terms: usize,
) -> Result<FullVoronoiReport> {
    if !(0.0 < a && a < b) || b > table.n_max() as f64 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < a < b <= table length; got a = {a}, b = {b}"
        )));
    }
    if n_terms > table.n_max() {
        return Err(Error::RangeOverflow {
            lo: 1.0,
            hi: n_terms as f64,
            len: table.n_max() as u64,
        });
    }
    let k = twist.k();
    let kf = k as f64;
    let nu = table.weight() - 1;
    let max_arg = 4.0 * std::f64::consts::PI * (n_terms as f64 * b).sqrt() / kf;
    if max_arg > MAX_ARGUMENT {
        return Err(Error::InvalidParameter(format!(
            "Bessel argument {max_arg:.1} exceeds the evaluation envelope {MAX_ARGUMENT}"
        )));
    }

    let roots_fwd = unit_roots::<f64>(k);
    let mut lhs = Complex::<f64>::zero();
    let lo = a.ceil() as usize;
    let hi = b.floor() as usize;
    for n in lo..=hi {
        let mut term = roots_fwd[((n as u64 * twist.h()) % k) as usize] * table.a(n);
        if n as f64 == a || n as f64 == b {
            term = term * 0.5;
        }
        lhs += term;
    }

    // per-n integral, parallel over n, summed in index order
    let roots_bwd: Vec<Complex<f64>> = roots_fwd.iter().map(|z| z.conj()).collect();
    let terms: Vec<Complex<f64>> = (1..=n_terms)
        .into_par_iter()
        .map(|n| {
            let an = table.a(n);
            if an == 0.0 {
                return Complex::zero();
            }
            let integral = integrate_bessel_over_x(nu, n as f64, kf, a, b);
            roots_bwd[((n as u64 * twist.h_bar()) % k) as usize] * (an * integral)
        })
        .collect();
    let mut series = Complex::<f64>::zero();
    for t in terms {
        series += t;
    }
    let sign = if (table.weight() / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let rhs = series * (sign * 2.0 * std::f64::consts::PI / kf);

    let abs_gap = (lhs - rhs).norm();
    let rel_gap = abs_gap / lhs.norm().max(f64::MIN_POSITIVE);
    Ok(FullVoronoiReport {
        lhs,
        rhs,
        abs_gap,
        rel_gap,
    })
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL8_X: [f64; 4] = [
    0.18343464249564980,
    0.52553240991632899,
    0.79666647741362674,
    0.96028985649753623,
];
const GL8_W: [f64; 4] = [
    0.36268378337836198,
    0.31370664587788729,
    0.22238103445337447,
    0.10122853629037626,
];

/// int_a^b J_nu(4 pi sqrt(n x)/k) dx, split so each piece spans at most one
/// period of the phase 4 pi sqrt(nx)/k.
fn integrate_bessel_over_x(nu: u32, n: f64, k: f64, a: f64, b: f64) -> f64 {
    let phase = |x: f64| 4.0 * std::f64::consts::PI * (n * x).sqrt() / k;
    let x_of_phase = |p: f64| {
        let s = p * k / (4.0 * std::f64::consts::PI);
        s * s / n
    };
    let pa = phase(a);
    let pb = phase(b);
    let pieces = ((pb - pa) / (2.0 * std::f64::consts::PI)).ceil().max(1.0) as usize;
    let dp = (pb - pa) / pieces as f64;
    let mut total = 0.0;
    for j in 0..pieces {
        let x0 = x_of_phase(pa + dp * j as f64);
        let x1 = if j + 1 == pieces {
            b
        } else {
            x_of_phase(pa + dp * (j + 1) as f64)
        };
        let mid = 0.5 * (x0 + x1);
        let half = 0.5 * (x1 - x0);
        let mut acc = 0.0;
        for i in 0..4 {
            let xp = mid + half * GL8_X[i];
            let xm = mid - half * GL8_X[i];
            let jp = bessel_j::<f64>(nu, phase(xp)).expect("argument within envelope");
            let jm = bessel_j::<f64>(nu, phase(xm)).expect("argument within envelope");
            acc += GL8_W[i] * (jp + jm);
        }
        total += acc * half;
    }
    total
}
