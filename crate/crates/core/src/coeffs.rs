//! Exact Fourier coefficient tables for holomorphic cusp forms.
//!
//! The weight-12 form is built as q * (eta^3)^8 from Jacobi's sparse
//! expansion of eta^3; the weight-16 and weight-18 companions are its
//! products with the Eisenstein series E4 and E6. Coefficients c(n) are
//! exact signed integers of arbitrary width; a(n) = c(n) n^{-(k-1)/2}
//! is stored in double precision alongside.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::series::{self, ExactSeries, MulStrategy};

/// Hard ceiling on table length; builds beyond this are refused.
pub const N_MAX_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormId {
    Delta,
    DeltaE4,
    DeltaE6,
}

impl FormId {
    pub fn weight(self) -> u32 {
        match self {
            FormId::Delta => 12,
            FormId::DeltaE4 => 16,
            FormId::DeltaE6 => 18,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FormId::Delta => "delta",
            FormId::DeltaE4 => "delta_e4",
            FormId::DeltaE6 => "delta_e6",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(FormId::Delta),
            "delta_e4" => Ok(FormId::DeltaE4),
            "delta_e6" => Ok(FormId::DeltaE6),
            other => Err(Error::UnknownForm(other.to_string())),
        }
    }

    fn from_weight(w: u32) -> Result<Self> {
        match w {
            12 => Ok(FormId::Delta),
            16 => Ok(FormId::DeltaE4),
            18 => Ok(FormId::DeltaE6),
            other => Err(Error::UnknownForm(format!("weight {other}"))),
        }
    }
}

/// Exact and normalized coefficients of one cusp form, 1-indexed by n.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    form_id: FormId,
    weight: u32,
    exact: Vec<BigInt>,
    normalized: Vec<f64>,
}

impl CoeffTable {
    pub fn form_id(&self) -> FormId {
        self.form_id
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn n_max(&self) -> usize {
        self.exact.len() - 1
    }

    /// Exact c(n); n in 1..=n_max.
    pub fn c(&self, n: usize) -> &BigInt {
        &self.exact[n]
    }

    /// Normalized a(n) = c(n) n^{-(weight-1)/2}.
    pub fn a(&self, n: usize) -> f64 {
        self.normalized[n]
    }

    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    /// Synthetic table for tests and null experiments: c(1) = 1, rest zero.
    pub fn unit_impulse(weight: u32, n_max: usize) -> Self {
        let mut exact = vec![BigInt::zero(); n_max + 1];
        exact[1] = BigInt::from(1);
        let mut normalized = vec![0.0; n_max + 1];
        normalized[1] = 1.0;
        CoeffTable {
            form_id: FormId::Delta,
            weight,
            exact,
            normalized,
        }
    }

    /// Synthetic table with prescribed normalized values (exact part zeroed,
    /// c(1) forced to 1 so the Hecke normalization invariant stays honest).
    pub fn from_normalized(weight: u32, normalized: Vec<f64>) -> Self {
        let mut exact = vec![BigInt::zero(); normalized.len()];
        exact[1] = BigInt::from(1);
        CoeffTable {
            form_id: FormId::Delta,
            weight,
            exact,
            normalized,
        }
    }
}

fn normalized_from_exact(exact: &[BigInt], weight: u32) -> Vec<f64> {
    let half_exp = (weight as f64 - 1.0) / 2.0;
    let mut out = vec![0.0; exact.len()];
    for (n, c) in exact.iter().enumerate().skip(1) {
        if !c.is_zero() {
            out[n] = c.to_f64().expect("coefficient in f64 range") / (n as f64).powf(half_exp);
        }
    }
    out
}

/// Build the exact coefficient table of the requested form up to `n_max`.
pub fn build_cusp_form(form_id: FormId, n_max: usize) -> Result<CoeffTable> {
    build_cusp_form_with(form_id, n_max, MulStrategy::Auto)
}

/// As [`build_cusp_form`] but forcing a multiplication route (the dense
/// transform path is behind this switch; `Auto` keeps the sparse default).
pub fn build_cusp_form_with(
    form_id: FormId,
    n_max: usize,
    strategy: MulStrategy,
) -> Result<CoeffTable> {
    if n_max > N_MAX_CAP {
        return Err(Error::CapExceeded {
            requested: n_max as u64,
            cap: N_MAX_CAP as u64,
        });
    }
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let delta = delta_series(n_max, strategy)?;
    let exact = match form_id {
        FormId::Delta => delta,
        FormId::DeltaE4 => {
            let tables = divisor_tables(n_max);
            let e4 = eisenstein_series(n_max, 240, &tables.sigma3_bigint());
            mul_for_build(&ExactSeries::from_coeffs(delta), &e4, n_max, strategy)?
        }
        FormId::DeltaE6 => {
            let tables = divisor_tables(n_max);
            let e6 = eisenstein_series(n_max, -504, &tables.sigma5_bigint());
            mul_for_build(&ExactSeries::from_coeffs(delta), &e6, n_max, strategy)?
        }
    };
    debug_assert_eq!(exact[1], BigInt::from(1));
    let normalized = normalized_from_exact(&exact, form_id.weight());
    Ok(CoeffTable {
        form_id,
        weight: form_id.weight(),
        exact,
        normalized,
    })
}

fn mul_for_build(
    f: &ExactSeries,
    g: &ExactSeries,
    n_max: usize,
    strategy: MulStrategy,
) -> Result<Vec<BigInt>> {
    let prod = series::mul_truncated_with(f, g, n_max, strategy)?;
    Ok(prod.coeffs().to_vec())
}

/// c(n) of the weight-12 form: coefficient of q^{n-1} in (eta^3)^8.
fn delta_series(n_max: usize, strategy: MulStrategy) -> Result<Vec<BigInt>> {
    let inner_cap = n_max - 1;
    let eta = series::eta3_series(inner_cap);
    let mut acc = ExactSeries::one(inner_cap);
    for _ in 0..8 {
        acc = match strategy {
            MulStrategy::Auto => series::mul_by_sparse(&acc, &eta, inner_cap),
            other => {
                series::mul_truncated_with(&acc, &eta.to_exact(inner_cap), inner_cap, other)?
            }
        };
    }
    let mut exact = vec![BigInt::zero(); n_max + 1];
    for n in 1..=n_max {
        exact[n] = acc.coeff(n - 1).clone();
    }
    Ok(exact)
}

fn eisenstein_series(n_max: usize, scale: i64, sigma: &[BigInt]) -> ExactSeries {
    let mut s = ExactSeries::one(n_max);
    for n in 1..=n_max {
        s.set_coeff(n, &sigma[n] * scale);
    }
    s
}

/// Divisor-count and divisor-power-sum tables, exact, 1-indexed.
#[derive(Debug, Clone)]
pub struct DivisorTables {
    pub d: Vec<u32>,
    pub sigma3: Vec<u64>,
    pub sigma5: Vec<u128>,
}

impl DivisorTables {
    pub fn n_max(&self) -> usize {
        self.d.len() - 1
    }

    fn sigma3_bigint(&self) -> Vec<BigInt> {
        self.sigma3.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sigma5_bigint(&self) -> Vec<BigInt> {
        self.sigma5.iter().map(|&x| BigInt::from(x)).collect()
    }
}

/// Sieve d(n), sigma_3(n), sigma_5(n) for n <= n_max.
pub fn divisor_tables(n_max: usize) -> DivisorTables {
    let mut d = vec![0u32; n_max + 1];
    let mut sigma3 = vec![0u64; n_max + 1];
    let mut sigma5 = vec![0u128; n_max + 1];
    for div in 1..=n_max {
        let d3 = (div as u64).pow(3);
        let d5 = (div as u128).pow(5);
        for m in (div..=n_max).step_by(div) {
            d[m] += 1;
            sigma3[m] += d3;
            sigma5[m] += d5;
        }
    }
    DivisorTables { d, sigma3, sigma5 }
}

/// Report of exact and statistical sanity checks over one table.
#[derive(Debug, Clone)]
pub struct CoeffStats {
    pub deligne_ok: bool,
    /// Estimates of the Rankin-Selberg constant at x = n_max and x = n_max/2.
    pub rankin_selberg_full: f64,
    pub rankin_selberg_half: f64,
    pub rankin_selberg_gap: f64,
    /// max over sampled windows [x, x + x^{2/3}] of sum d(n) / (y log x).
    pub shiu_ratio: f64,
}

/// Exact Deligne check: |c(n)|^2 <= d(n)^2 n^{weight-1}, integer arithmetic.
pub fn deligne_holds(table: &CoeffTable, tables: &DivisorTables) -> bool {
    let w = table.weight() as u32;
    for n in 1..=table.n_max() {
        let lhs = table.c(n) * table.c(n);
        let rhs = BigInt::from(tables.d[n]).pow(2) * BigInt::from(n).pow(w - 1);
        if lhs > rhs {
            return false;
        }
    }
    true
}

pub fn coefficient_statistics(table: &CoeffTable, tables: &DivisorTables) -> CoeffStats {
    assert!(
        tables.n_max() >= table.n_max(),
        "divisor tables must cover the coefficient table"
    );
    let n_max = table.n_max();
    let deligne_ok = deligne_holds(table, tables);

    let rankin = |x: usize| -> f64 {
        let mut s = 0.0;
        for n in 1..=x {
            let a = table.a(n);
            s += a * a;
        }
        s / x as f64
    };
    let full = rankin(n_max);
    let half = rankin(n_max / 2);
    let gap = if full != 0.0 {
        ((full - half) / full).abs()
    } else {
        0.0
    };

    let mut shiu_ratio: f64 = 0.0;
    for i in 1..=8usize {
        let x = n_max * i / 10;
        if x < 2 {
            continue;
        }
        let y = (x as f64).powf(2.0 / 3.0).floor() as usize;
        let hi = (x + y).min(n_max);
        if hi <= x {
            continue;
        }
        let sum: u64 = (x..=hi).map(|n| tables.d[n] as u64).sum();
        let ratio = sum as f64 / ((hi - x) as f64 * (x as f64).ln());
        shiu_ratio = shiu_ratio.max(ratio);
    }

    CoeffStats {
        deligne_ok,
        rankin_selberg_full: full,
        rankin_selberg_half: half,
        rankin_selberg_gap: gap,
        shiu_ratio,
    }
}

/// Hecke relation check for the weight-12 form: multiplicativity on coprime
/// pairs and the prime-power recurrence with p^11. Exact; returns the first
/// offending n-pair if any.
pub fn hecke_violation(table: &CoeffTable) -> Option<(usize, usize)> {
    let n_max = table.n_max();
    for m in 2..=n_max {
        for n in m..=n_max / m {
            if m.gcd(&n) == 1 {
                let lhs = table.c(m * n);
                let rhs = table.c(m) * table.c(n);
                if *lhs != rhs {
                    return Some((m, n));
                }
            }
        }
    }
    // prime powers: c(p^{r+1}) = c(p) c(p^r) - p^11 c(p^{r-1})
    let primes = small_primes(n_max);
    for &p in &primes {
        let p11 = BigInt::from(p).pow(11);
        let mut pr = p; // p^r, r = 1
        let mut prev = BigInt::from(1); // c(p^0)
        while pr <= n_max / p {
            let next = pr * p;
            let expect = table.c(p) * table.c(pr) - &p11 * &prev;
            if *table.c(next) != expect {
                return Some((p, next));
            }
            prev = table.c(pr).clone();
            pr = next;
        }
    }
    None
}

fn small_primes(n_max: usize) -> Vec<usize> {
    let mut is_comp = vec![false; n_max + 1];
    let mut primes = Vec::new();
    for i in 2..=n_max {
        if !is_comp[i] {
            primes.push(i);
            let mut m = i * i;
            while m <= n_max {
                is_comp[m] = true;
                m += i;
            }
        }
    }
    primes
}

/// CSV export: header line "weight,N", then rows "n,c(n),a(n)" with c(n) as
/// a decimal string and a(n) at 17 significant digits.
pub fn write_csv<W: Write>(table: &CoeffTable, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{},{}", table.weight(), table.n_max())?;
    for n in 1..=table.n_max() {
        writeln!(w, "{},{},{:.16e}", n, table.c(n), table.a(n))?;
    }
    Ok(())
}

/// Inverse of [`write_csv`]; c(n) round-trips exactly.
pub fn read_csv<R: BufRead>(r: R) -> Result<CoeffTable> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty CSV".into()))?
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut parts = header.split(',');
    let weight: u32 = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::InvalidParameter("bad CSV header".into()))?;
    let n_max: usize = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::InvalidParameter("bad CSV header".into()))?;
    let form_id = FormId::from_weight(weight)?;
    let mut exact = vec![BigInt::zero(); n_max + 1];
    let mut normalized = vec![0.0; n_max + 1];
    for line in lines {
        let line = line.map_err(|e| Error::InvalidParameter(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut f = line.split(',');
        let parse_err = || Error::InvalidParameter(format!("bad CSV row: {line}"));
        let n: usize = f
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(parse_err)?;
        let c: BigInt = f
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(parse_err)?;
        let a: f64 = f
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(parse_err)?;
        if n == 0 || n > n_max {
            return Err(Error::InvalidParameter(format!("row index {n} out of range")));
        }
        exact[n] = c;
        normalized[n] = a;
    }
    Ok(CoeffTable {
        form_id,
        weight,
        exact,
        normalized,
    })
}
