//! Square-root additive quadruples: exact enumeration of solutions of
//! sqrt a + sqrt b = sqrt c + sqrt d, counting of near-solutions in dyadic
//! boxes, and the empirical spacing-lemma minima.
//!
//! Equality is never decided by floats. sqrt m for distinct squarefree m
//! are linearly independent over the rationals, so an exact equality test
//! reduces to matching coefficient sums per squarefree kernel; the
//! enumeration inverts that observation, solving u + v = s + t inside each
//! kernel class. Floats only prune; every borderline near-count decision is
//! settled in scaled integer arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub const ENUMERATION_CAP: u64 = 100_000;
pub const DECOMPOSE_CAP: u64 = 10_000_000;
const ITERATION_BUDGET: u128 = 10_000_000_000;

/// n = kernel * root^2 with squarefree kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqrtDecomp {
    pub n: u64,
    pub kernel: u64,
    pub root: u64,
}

/// Exact squarefree decomposition by trial division.
pub fn squarefree_decompose(n: u64) -> SqrtDecomp {
    assert!(n >= 1 && n <= DECOMPOSE_CAP, "decomposition range is [1, 1e7]");
    let mut rest = n;
    let mut kernel = 1u64;
    let mut root = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            root *= p.pow(e / 2);
            if e % 2 == 1 {
                kernel *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    kernel *= rest; // leftover prime, exponent 1
    SqrtDecomp { n, kernel, root }
}

/// Smallest-prime-factor sieve for bulk decompositions.
pub struct KernelSieve {
    spf: Vec<u32>,
}

impl KernelSieve {
    pub fn new(n_max: u64) -> Self {
        let n = n_max as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut m = i;
                while m <= n {
                    if spf[m] == 0 {
                        spf[m] = i as u32;
                    }
                    m += i;
                }
            }
        }
        KernelSieve { spf }
    }

    pub fn decompose(&self, n: u64) -> SqrtDecomp {
        let mut rest = n as usize;
        let mut kernel = 1u64;
        let mut root = 1u64;
        while rest > 1 {
            let p = self.spf[rest] as usize;
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            root *= (p as u64).pow(e / 2);
            if e % 2 == 1 {
                kernel *= p as u64;
            }
        }
        SqrtDecomp { n, kernel, root }
    }
}

/// Exact zero test for sum of signed square roots: group sqrt n = root *
/// sqrt(kernel) by kernel and require every coefficient sum to vanish.
pub fn sqrt_sum_is_zero(terms: &[(i64, u64)]) -> bool {
    let mut profile: BTreeMap<u64, i64> = BTreeMap::new();
    for &(coef, n) in terms {
        let d = squarefree_decompose(n);
        *profile.entry(d.kernel).or_insert(0) += coef * d.root as i64;
    }
    profile.values().all(|&v| v == 0)
}

/// Double-squaring integer identity for sqrt a + sqrt b = sqrt c + sqrt d;
/// used as the independent confirmation on enumerated members.
pub fn two_two_identity_holds(a: u64, b: u64, c: u64, d: u64) -> bool {
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    let diff = a + b - c - d;
    if diff == 0 {
        return a * b == c * d;
    }
    // from 2 sqrt(ab) = 2 sqrt(cd) - diff, squared:
    // 4 diff sqrt(cd) = 4cd + diff^2 - 4ab
    let rhs = 4 * c * d + diff * diff - 4 * a * b;
    16 * diff * diff * c * d == rhs * rhs && (diff > 0) == (rhs > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadPattern {
    /// sqrt a + sqrt b - sqrt c - sqrt d
    TwoTwo,
    /// sqrt a + sqrt b + sqrt c - sqrt d, zero gaps excluded
    ThreeOne,
}

/// A near-solution with its measured gap.
#[derive(Debug, Clone, Copy)]
pub struct NearQuadruple {
    pub tuple: [u32; 4],
    pub gap: f64,
}

/// Solutions of the two_two equality up to a cutoff.
///
/// `members` holds the ordered quadruples whose four components share one
/// squarefree kernel (these carry all the arithmetic content). The
/// remaining solutions are the cross-kernel permutations (x,y,x,y) and
/// (x,y,y,x) with kernel(x) != kernel(y); they are determined by `classes`
/// and counted in closed form rather than materialized.
#[derive(Debug, Clone)]
pub struct QuadrupleSet {
    pub cutoff: u64,
    pub pattern: QuadPattern,
    pub members: Vec<[u32; 4]>,
    /// (squarefree kernel m, largest root U): the class {m u^2 : u <= U}
    pub classes: Vec<(u64, u32)>,
    /// near members with gap values, for inequality counting runs
    pub near: Vec<NearQuadruple>,
}

impl QuadrupleSet {
    /// Total number of ordered solutions including cross-kernel permutations.
    pub fn ordered_count(&self) -> u128 {
        let n = self.cutoff as u128;
        let same_kernel_pairs: u128 = self
            .classes
            .iter()
            .map(|&(_, u)| (u as u128) * (u as u128))
            .sum();
        self.members.len() as u128 + 2 * (n * n - same_kernel_pairs)
    }

    /// Materialize every ordered solution; quadratic in the cutoff, meant
    /// for small-N verification only.
    pub fn all_members(&self) -> Vec<[u32; 4]> {
        let mut kernel_of = vec![0u64; self.cutoff as usize + 1];
        for &(m, u_max) in &self.classes {
            for u in 1..=u_max as u64 {
                kernel_of[(m * u * u) as usize] = m;
            }
        }
        let mut all = self.members.clone();
        for x in 1..=self.cutoff as u32 {
            for y in 1..=self.cutoff as u32 {
                if kernel_of[x as usize] != kernel_of[y as usize] {
                    all.push([x, y, x, y]);
                    all.push([x, y, y, x]);
                }
            }
        }
        all
    }
}

/// All ordered quadruples (a,b,c,d) in [1,N]^4 with sqrt a + sqrt b =
/// sqrt c + sqrt d. Equality forces kernel-matched pairing, so the search
/// solves u + v = s + t within each kernel class; every member is
/// re-confirmed by the double-squaring integer identity.
pub fn enumerate_equal_sum_quadruples(n: u64) -> Result<QuadrupleSet> {
    if n < 1 || n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            requested: n,
            cap: ENUMERATION_CAP,
        });
    }
    let sieve = KernelSieve::new(n);
    let mut squarefree: Vec<u64> = Vec::new();
    for m in 1..=n {
        let d = sieve.decompose(m);
        if d.root == 1 {
            squarefree.push(m);
        }
    }
    let mut members: Vec<[u32; 4]> = Vec::new();
    let mut classes: Vec<(u64, u32)> = Vec::new();
    for &m in &squarefree {
        let u_max = (n / m).sqrt() as u32;
        debug_assert!(m * (u_max as u64) * (u_max as u64) <= n);
        classes.push((m, u_max));
        // ordered pairs (u, v), u + v = sigma
        for sigma in 2..=(2 * u_max) {
            let lo = 1.max(sigma as i64 - u_max as i64) as u32;
            let hi = u_max.min(sigma - 1);
            for u1 in lo..=hi {
                let v1 = sigma - u1;
                for u2 in lo..=hi {
                    let v2 = sigma - u2;
                    let quad = [
                        (m * (u1 as u64) * (u1 as u64)) as u32,
                        (m * (v1 as u64) * (v1 as u64)) as u32,
                        (m * (u2 as u64) * (u2 as u64)) as u32,
                        (m * (v2 as u64) * (v2 as u64)) as u32,
                    ];
                    debug_assert!(two_two_identity_holds(
                        quad[0] as u64,
                        quad[1] as u64,
                        quad[2] as u64,
                        quad[3] as u64
                    ));
                    members.push(quad);
                }
            }
        }
    }
    Ok(QuadrupleSet {
        cutoff: n,
        pattern: QuadPattern::TwoTwo,
        members,
        classes,
        near: Vec::new(),
    })
}

/// |sum of signed roots| <= theta decided exactly: interval arithmetic on
/// floor square roots at escalating precision; an exact tie counts as
/// inside. theta_sq is the exact rational theta^2.
fn abs_radical_sum_leq(terms: &[(i64, u64)], theta_sq: &BigRational) -> bool {
    for bits in [96u32, 192, 384, 768] {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for &(coef, n) in terms {
            let s = (BigInt::from(n) << (2 * bits)).sqrt();
            let s1 = &s + 1u32;
            if coef >= 0 {
                lo += &s * coef;
                hi += &s1 * coef;
            } else {
                lo += &s1 * coef;
                hi += &s * coef;
            }
        }
        // |sum| interval
        let (abs_lo, abs_hi) = if lo.is_negative() && !hi.is_negative() {
            (BigInt::zero(), (-&lo).max(hi.clone()))
        } else {
            let (l, h) = (lo.abs(), hi.abs());
            (l.clone().min(h.clone()), l.max(h))
        };
        let scale_sq = BigInt::one() << (2 * bits);
        if &abs_hi * &abs_hi * theta_sq.denom() <= theta_sq.numer() * &scale_sq {
            return true;
        }
        if &abs_lo * &abs_lo * theta_sq.denom() > theta_sq.numer() * &scale_sq {
            return false;
        }
    }
    true
}

fn pattern_terms(pattern: QuadPattern, a: u64, b: u64, c: u64, d: u64) -> [(i64, u64); 4] {
    match pattern {
        QuadPattern::TwoTwo => [(1, a), (1, b), (-1, c), (-1, d)],
        QuadPattern::ThreeOne => [(1, a), (1, b), (1, c), (-1, d)],
    }
}

/// Count quadruples in the dyadic boxes (A,2A] x (B,2B] x (C,2C] x (D,2D]
/// with |sqrt a + sqrt b +- sqrt c - sqrt d| <= delta sqrt(C); the
/// three_one pattern excludes exact-zero gaps. Floats prune; any gap within
/// 1e-12 sqrt(C) of the threshold is settled exactly.
pub fn near_quadruple_count(
    boxes: [u64; 4],
    delta: f64,
    pattern: QuadPattern,
) -> Result<u64> {
    Ok(near_quadruple_members(boxes, delta, pattern, false)?.0)
}

/// As [`near_quadruple_count`], optionally collecting the members and gaps.
pub fn near_quadruple_members(
    boxes: [u64; 4],
    delta: f64,
    pattern: QuadPattern,
    collect: bool,
) -> Result<(u64, Vec<NearQuadruple>)> {
    let [box_a, box_b, box_c, box_d] = boxes;
    if boxes.iter().any(|&x| x == 0) || delta < 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(
            "boxes must be positive and delta nonnegative".into(),
        ));
    }
    let volume = boxes.iter().map(|&x| x as u128).product::<u128>();
    if volume > ITERATION_BUDGET {
        return Err(Error::IterationBudget(volume, ITERATION_BUDGET));
    }
    let theta = delta * (box_c as f64).sqrt();
    let theta_sq = BigRational::from_float(delta).expect("finite delta")
        * BigRational::from_float(delta).unwrap()
        * BigRational::from_integer(BigInt::from(box_c));
    let borderline = 1e-12 * (box_c as f64).sqrt();
    let sign_c = match pattern {
        QuadPattern::TwoTwo => -1.0,
        QuadPattern::ThreeOne => 1.0,
    };
    let mut count = 0u64;
    let mut near = Vec::new();
    for a in box_a + 1..=2 * box_a {
        let ra = (a as f64).sqrt();
        for b in box_b + 1..=2 * box_b {
            let rb = (b as f64).sqrt();
            for c in box_c + 1..=2 * box_c {
                let s = ra + rb + sign_c * (c as f64).sqrt();
                // sqrt d must lie in [s - theta, s + theta]
                let d_hi_f = s + theta;
                if d_hi_f < 1.0 {
                    continue;
                }
                let d_lo_f = (s - theta).max(1.0);
                let d_lo = ((d_lo_f * d_lo_f).floor() as u64).max(box_d + 1);
                let d_hi = ((d_hi_f * d_hi_f).ceil() as u64).min(2 * box_d);
                for d in d_lo..=d_hi.max(d_lo).min(2 * box_d) {
                    if d < box_d + 1 || d > 2 * box_d {
                        continue;
                    }
                    let gap = s - (d as f64).sqrt();
                    let inside = if (gap.abs() - theta).abs() <= borderline {
                        abs_radical_sum_leq(&pattern_terms(pattern, a, b, c, d), &theta_sq)
                    } else {
                        gap.abs() <= theta
                    };
                    if !inside {
                        continue;
                    }
                    if pattern == QuadPattern::ThreeOne
                        && gap.abs() <= 1e-9
                        && sqrt_sum_is_zero(&pattern_terms(pattern, a, b, c, d))
                    {
                        continue; // the lemma's strict 0 < |gap|
                    }
                    count += 1;
                    if collect {
                        near.push(NearQuadruple {
                            tuple: [a as u32, b as u32, c as u32, d as u32],
                            gap,
                        });
                    }
                }
            }
        }
    }
    Ok((count, near))
}

/// Minima of the spacing-lemma quantities over a <= c <= N, b <= c, with
/// d ranging over its admissible interval: the smallest nonzero
/// |sqrt a + sqrt b +- sqrt c - sqrt d| and the smallest
/// gap * c^2 * sqrt(abc). The minimizing d for fixed (a,b,c) is a nearest
/// integer to (sqrt a + sqrt b +- sqrt c)^2, so the scan is cubic.
#[derive(Debug, Clone, Copy)]
pub struct MinGapReport {
    pub min_gap: f64,
    pub min_gap_at: [u64; 4],
    pub min_ratio: f64,
    pub min_ratio_at: [u64; 4],
}

pub fn min_gap_ratio(n: u64, pattern: QuadPattern) -> Result<MinGapReport> {
    if n < 2 || n > 300 {
        return Err(Error::InvalidParameter(
            "spacing scan expects 2 <= N <= 300".into(),
        ));
    }
    let sign_c = match pattern {
        QuadPattern::TwoTwo => -1.0,
        QuadPattern::ThreeOne => 1.0,
    };
    let mut report = MinGapReport {
        min_gap: f64::INFINITY,
        min_gap_at: [0; 4],
        min_ratio: f64::INFINITY,
        min_ratio_at: [0; 4],
    };
    for c in 1..=n {
        let rc = (c as f64).sqrt();
        for a in 1..=c {
            let ra = (a as f64).sqrt();
            for b in 1..=c {
                let s = ra + (b as f64).sqrt() + sign_c * rc;
                let d_cap = {
                    let t = ra + (b as f64).sqrt() + rc;
                    (t * t).floor() as u64 + 1
                };
                let mut candidates = [0u64; 2];
                let mut n_cand = 0;
                if s > 0.0 {
                    let base = (s * s).floor() as u64;
                    for d in [base.max(1), base + 1] {
                        if d <= d_cap && (n_cand == 0 || candidates[0] != d) {
                            candidates[n_cand] = d;
                            n_cand += 1;
                        }
                    }
                } else {
                    candidates[0] = 1;
                    n_cand = 1;
                }
                for &d in &candidates[..n_cand] {
                    let gap = (s - (d as f64).sqrt()).abs();
                    if gap <= 1e-9 && sqrt_sum_is_zero(&pattern_terms(pattern, a, b, c, d)) {
                        continue; // exact solutions are excluded
                    }
                    let weight = (c as f64).powi(2) * ((a * b * c) as f64).sqrt();
                    let ratio = gap * weight;
                    if gap < report.min_gap {
                        report.min_gap = gap;
                        report.min_gap_at = [a, b, c, d];
                    }
                    if ratio < report.min_ratio {
                        report.min_ratio = ratio;
                        report.min_ratio_at = [a, b, c, d];
                    }
                }
            }
        }
    }
    Ok(report)
}
