//! Exact truncated integer power series.
//!
//! Coefficients are arbitrary-width `BigInt`; every multiplication route
//! (sparse, i128 schoolbook, multi-prime NTT) is exact and bit-identical
//! to the plain `Schoolbook` reference. Fast paths are only taken when an
//! a-priori coefficient bound, computed exactly, proves them safe.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Result;

mod ntt;

/// Dense exact series: `coeffs[e]` is the coefficient of `q^e`.
/// The truncation degree is `coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSeries {
    coeffs: Vec<BigInt>,
}

/// Sparse signed series as a sorted list of `(exponent, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSeries {
    pub terms: Vec<(usize, i64)>,
}

/// Multiplication route. `Auto` picks sparse/i128/NTT from the operand
/// shapes and an exact coefficient bound; the others force one route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MulStrategy {
    #[default]
    Auto,
    /// Plain O(n^2) BigInt loop; the reference all other routes must match.
    Schoolbook,
    /// Multi-prime NTT with exact CRT reconstruction.
    Ntt,
}

impl ExactSeries {
    pub fn zero(n_max: usize) -> Self {
        Self {
            coeffs: vec![BigInt::zero(); n_max + 1],
        }
    }

    pub fn one(n_max: usize) -> Self {
        let mut s = Self::zero(n_max);
        s.coeffs[0] = BigInt::from(1);
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        Self { coeffs }
    }

    pub fn coeff(&self, e: usize) -> &BigInt {
        &self.coeffs[e]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn set_coeff(&mut self, e: usize, v: BigInt) {
        self.coeffs[e] = v;
    }

    /// Multiply by `q^shift`, dropping terms past the truncation degree.
    pub fn shift_up(&self, shift: usize) -> Self {
        let mut out = Self::zero(self.degree_cap());
        for e in 0..self.coeffs.len().saturating_sub(shift) {
            out.coeffs[e + shift] = self.coeffs[e].clone();
        }
        out
    }

    fn nonzero_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Extract `(exponent, coefficient)` pairs when every coefficient fits i64.
    fn as_sparse(&self) -> Option<SparseSeries> {
        let mut terms = Vec::new();
        for (e, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push((e, c.to_i64()?));
            }
        }
        Some(SparseSeries { terms })
    }

    fn to_i128(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| c.to_i128()).collect()
    }

    fn max_abs(&self) -> BigInt {
        let mut m = BigInt::zero();
        for c in &self.coeffs {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    fn sum_abs(&self) -> BigInt {
        let mut s = BigInt::zero();
        for c in &self.coeffs {
            s += c.abs();
        }
        s
    }
}

impl SparseSeries {
    pub fn to_exact(&self, n_max: usize) -> ExactSeries {
        let mut s = ExactSeries::zero(n_max);
        for &(e, c) in &self.terms {
            if e <= n_max {
                s.coeffs[e] = BigInt::from(c);
            }
        }
        s
    }

    fn sum_abs(&self) -> BigInt {
        self.terms
            .iter()
            .map(|&(_, c)| BigInt::from((c as i128).abs()))
            .sum()
    }
}

/// Jacobi's expansion of the cube of the Dedekind eta q-series (without the
/// q^{1/8} prefactor): sum over j >= 0 of (-1)^j (2j+1) q^{j(j+1)/2},
/// truncated at degree `n_max`. O(sqrt(n_max)) terms.
pub fn eta3_series(n_max: usize) -> SparseSeries {
    let mut terms = Vec::new();
    let mut j: usize = 0;
    loop {
        let e = j * (j + 1) / 2;
        if e > n_max {
            break;
        }
        let c = (2 * j + 1) as i64;
        terms.push((e, if j % 2 == 0 { c } else { -c }));
        j += 1;
    }
    SparseSeries { terms }
}

/// Exact truncated product with automatic route selection.
pub fn mul_truncated(f: &ExactSeries, g: &ExactSeries, n_max: usize) -> Result<ExactSeries> {
    mul_truncated_with(f, g, n_max, MulStrategy::Auto)
}

/// Exact truncated product over a chosen route. All routes produce
/// bit-identical coefficients; only the cost differs.
pub fn mul_truncated_with(
    f: &ExactSeries,
    g: &ExactSeries,
    n_max: usize,
    strategy: MulStrategy,
) -> Result<ExactSeries> {
    match strategy {
        MulStrategy::Schoolbook => Ok(mul_schoolbook_bigint(f, g, n_max)),
        MulStrategy::Ntt => ntt::mul_ntt(f, g, n_max),
        MulStrategy::Auto => mul_auto(f, g, n_max),
    }
}

/// Exact product of a dense series by a sparse one (the eta-product path).
pub fn mul_by_sparse(f: &ExactSeries, g: &SparseSeries, n_max: usize) -> ExactSeries {
    // Accumulator bound: every partial sum of one output coefficient is at
    // most max|f| * sum|g|. Checked exactly before taking the i128 route.
    let bound = f.max_abs() * g.sum_abs();
    if bound < i128_safe_bound() {
        if let Some(fv) = f.to_i128() {
            return mul_sparse_i128(&fv, g, n_max);
        }
    }
    mul_sparse_bigint(f, g, n_max)
}

fn i128_safe_bound() -> BigInt {
    BigInt::from(1u8) << 126
}

fn mul_auto(f: &ExactSeries, g: &ExactSeries, n_max: usize) -> Result<ExactSeries> {
    // Prefer the sparse route whenever one side has O(sqrt N) support.
    let sparse_cut = 2 * (n_max + 1).isqrt() + 8;
    let (dense, sparse) = if g.nonzero_terms() <= sparse_cut {
        (f, g)
    } else if f.nonzero_terms() <= sparse_cut {
        (g, f)
    } else {
        return mul_dense_auto(f, g, n_max);
    };
    match sparse.as_sparse() {
        Some(sp) => Ok(mul_by_sparse(dense, &sp, n_max)),
        None => mul_dense_auto(f, g, n_max),
    }
}

fn mul_dense_auto(f: &ExactSeries, g: &ExactSeries, n_max: usize) -> Result<ExactSeries> {
    if n_max <= 2048 {
        let bound = pairing_bound(f, g);
        if bound < i128_safe_bound() {
            if let (Some(fv), Some(gv)) = (f.to_i128(), g.to_i128()) {
                return Ok(mul_schoolbook_i128(&fv, &gv, n_max));
            }
        }
        return Ok(mul_schoolbook_bigint(f, g, n_max));
    }
    ntt::mul_ntt(f, g, n_max)
}

/// min(max|f|*sum|g|, max|g|*sum|f|): bounds every accumulator value in the
/// convolution regardless of summation order.
fn pairing_bound(f: &ExactSeries, g: &ExactSeries) -> BigInt {
    let a = f.max_abs() * g.sum_abs();
    let b = g.max_abs() * f.sum_abs();
    a.min(b)
}

fn mul_schoolbook_bigint(f: &ExactSeries, g: &ExactSeries, n_max: usize) -> ExactSeries {
    let mut out = ExactSeries::zero(n_max);
    for (i, fc) in f.coeffs.iter().enumerate() {
        if fc.is_zero() || i > n_max {
            continue;
        }
        for (j, gc) in g.coeffs.iter().enumerate() {
            if i + j > n_max {
                break;
            }
            if !gc.is_zero() {
                out.coeffs[i + j] += fc * gc;
            }
        }
    }
    out
}

fn mul_schoolbook_i128(f: &[i128], g: &[i128], n_max: usize) -> ExactSeries {
    let mut acc = vec![0i128; n_max + 1];
    for (i, &fc) in f.iter().enumerate() {
        if fc == 0 || i > n_max {
            continue;
        }
        for (j, &gc) in g.iter().enumerate() {
            if i + j > n_max {
                break;
            }
            acc[i + j] += fc * gc;
        }
    }
    ExactSeries {
        coeffs: acc.into_iter().map(BigInt::from).collect(),
    }
}

fn mul_sparse_i128(f: &[i128], g: &SparseSeries, n_max: usize) -> ExactSeries {
    let mut acc = vec![0i128; n_max + 1];
    for &(e, c) in &g.terms {
        if e > n_max {
            continue;
        }
        let c = c as i128;
        let top = (n_max - e).min(f.len() - 1);
        for i in 0..=top {
            acc[i + e] += f[i] * c;
        }
    }
    ExactSeries {
        coeffs: acc.into_iter().map(BigInt::from).collect(),
    }
}

fn mul_sparse_bigint(f: &ExactSeries, g: &SparseSeries, n_max: usize) -> ExactSeries {
    let mut out = ExactSeries::zero(n_max);
    for &(e, c) in &g.terms {
        if e > n_max {
            continue;
        }
        let top = (n_max - e).min(f.coeffs.len() - 1);
        for i in 0..=top {
            let fc = &f.coeffs[i];
            if !fc.is_zero() {
                out.coeffs[i + e] += fc * c;
            }
        }
    }
    out
}

/// Raise the eta-cube series to `power` by successive sparse multiplications,
/// truncated at `n_max`. Cost O(power * n_max^{3/2}).
pub fn eta3_power(power: u32, n_max: usize) -> ExactSeries {
    let eta = eta3_series(n_max);
    let mut acc = ExactSeries::one(n_max);
    for _ in 0..power {
        acc = mul_by_sparse(&acc, &eta, n_max);
    }
    acc
}

pub use ntt::available_prime_bits;

#[allow(unused_imports)]
pub(crate) use ntt::mul_ntt;
