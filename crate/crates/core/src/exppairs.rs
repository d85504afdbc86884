//! Exact-rational exponent-pair calculus and the derived bound expressions.
//!
//! Pairs are kept as arbitrary-precision rationals; the van der Corput A/B
//! processes are applied innermost-first (rightmost letter first), which is
//! the convention under which BABAAB<0,1> = <2/9, 11/18>. Numeric values
//! are produced only at the very end, from exact exponents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent pair <p, q> with 0 <= p <= 1/2 <= q <= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentPair {
    p: BigRational,
    q: BigRational,
}

impl ExponentPair {
    pub fn new(p: BigRational, q: BigRational) -> Result<Self> {
        let half = rational(1, 2);
        if p.is_negative() || p > half || q < half || q > BigRational::one() {
            return Err(Error::InvalidPair {
                p: p.to_string(),
                q: q.to_string(),
            });
        }
        Ok(ExponentPair { p, q })
    }

    /// The trivial pair <0, 1>.
    pub fn trivial() -> Self {
        ExponentPair {
            p: BigRational::zero(),
            q: BigRational::one(),
        }
    }

    pub fn from_i64(p_num: i64, p_den: i64, q_num: i64, q_den: i64) -> Result<Self> {
        Self::new(rational(p_num, p_den), rational(q_num, q_den))
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// q >= (p+1)/2, required by the large-values and moments theorems.
    pub fn satisfies_theorem_constraint(&self) -> bool {
        &self.q * rational(2, 1) >= &self.p + BigRational::one()
    }

    /// A-process: <p, q> -> <p/(2p+2), (p+q+1)/(2p+2)>.
    pub fn process_a(&self) -> Result<Self> {
        let den = &self.p * rational(2, 1) + rational(2, 1);
        Self::new(
            &self.p / &den,
            (&self.p + &self.q + BigRational::one()) / &den,
        )
    }

    /// B-process: <p, q> -> <q - 1/2, p + 1/2>.
    pub fn process_b(&self) -> Result<Self> {
        Self::new(&self.q - rational(1, 2), &self.p + rational(1, 2))
    }
}

impl std::fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "\u{27e8}{}, {}\u{27e9}", self.p, self.q)
    }
}

/// Apply a word over {A, B} to a starting pair, rightmost letter first.
pub fn apply_process_word(word: &str, start: &ExponentPair) -> Result<ExponentPair> {
    let mut pair = start.clone();
    for ch in word.chars().rev() {
        pair = match ch {
            'A' => pair.process_a()?,
            'B' => pair.process_b()?,
            other => return Err(Error::BadProcessWord(other)),
        };
    }
    Ok(pair)
}

/// One term of a bound: value = k^{k_exp} * M^{m_exp + eps} * V^{v_exp}.
/// The epsilon slot is symbolic; it lands on the M exponent at evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundExpression {
    pub k_exp: BigRational,
    pub m_exp: BigRational,
    pub v_exp: Option<BigRational>,
    pub m_has_eps: bool,
}

impl BoundExpression {
    pub fn evaluate<T: Real>(&self, k: T, m: T, v: Option<T>, eps: T) -> T {
        let mut m_exp = to_scalar::<T>(&self.m_exp);
        if self.m_has_eps {
            m_exp = m_exp + eps;
        }
        let mut val = k.powf(to_scalar::<T>(&self.k_exp)) * m.powf(m_exp);
        if let (Some(ve), Some(v)) = (&self.v_exp, v) {
            val = val * v.powf(to_scalar::<T>(ve));
        }
        val
    }
}

fn to_scalar<T: Real>(r: &BigRational) -> T {
    T::from_f64(r.to_f64().expect("rational in f64 range")).unwrap()
}

/// Both terms of the large-values bound
/// R << k^2 M^{1+eps} V^{-3} + k^{2q/p} M^{1+q/p+eps} V^{-2-(1+2q)/p},
/// with exact exponents and the numeric value at the given parameters.
#[derive(Debug, Clone)]
pub struct LargeValuesBound {
    pub first: BoundExpression,
    pub second: BoundExpression,
    pub value: f64,
}

pub fn large_values_bound(
    pair: &ExponentPair,
    k: u64,
    m: f64,
    v: f64,
    eps: f64,
) -> Result<LargeValuesBound> {
    if pair.p.is_zero() {
        return Err(Error::ZeroP);
    }
    if !pair.satisfies_theorem_constraint() {
        return Err(Error::InvalidParameter(format!(
            "pair {pair} violates q >= (p+1)/2"
        )));
    }
    let one = BigRational::one();
    let q_over_p = &pair.q / &pair.p;
    let first = BoundExpression {
        k_exp: rational(2, 1),
        m_exp: one.clone(),
        v_exp: Some(rational(-3, 1)),
        m_has_eps: true,
    };
    let second = BoundExpression {
        k_exp: rational(2, 1) * &q_over_p,
        m_exp: &one + &q_over_p,
        v_exp: Some(
            rational(-2, 1) - (&one + rational(2, 1) * &pair.q) / &pair.p,
        ),
        m_has_eps: true,
    };
    let kf = k as f64;
    let value = first.evaluate(kf, m, Some(v), eps) + second.evaluate(kf, m, Some(v), eps);
    Ok(LargeValuesBound {
        first,
        second,
        value,
    })
}

/// The Phi and Psi terms of the general moments theorem for exponent A,
/// assuming the pointwise input bound k^alpha x^{beta+eps}. Both case
/// branches agree identically on their boundaries (A = 2 for Phi,
/// A = 1 + (1+2q)/p for Psi); this is asserted, not assumed.
pub fn moment_bound_terms(
    pair: &ExponentPair,
    alpha: &BigRational,
    beta: &BigRational,
    a_exp: &BigRational,
) -> Result<(BoundExpression, BoundExpression)> {
    if pair.p.is_zero() {
        return Err(Error::ZeroP);
    }
    if a_exp.is_negative() {
        return Err(Error::InvalidParameter("A must be >= 0".into()));
    }
    let one = BigRational::one();
    let two = rational(2, 1);

    let phi_high = BoundExpression {
        k_exp: alpha * a_exp + &two * (&one - alpha),
        m_exp: beta * a_exp + &one - &two * beta,
        v_exp: None,
        m_has_eps: true,
    };
    let phi_low = BoundExpression {
        k_exp: a_exp / &two + &one,
        m_exp: a_exp / rational(4, 1) + rational(1, 2),
        v_exp: None,
        m_has_eps: true,
    };
    let phi = if *a_exp >= two {
        if *a_exp == two {
            assert_eq!(phi_high, phi_low, "Phi branches must agree at A = 2");
        }
        phi_high
    } else {
        phi_low
    };

    let p = &pair.p;
    let q = &pair.q;
    let psi_threshold = &one + (&one + &two * q) / p;
    let psi_high = BoundExpression {
        k_exp: alpha * a_exp - alpha - alpha / p + (&one - alpha) * &two * q / p,
        m_exp: beta * a_exp + &one - beta - beta / p + (&one - &two * beta) * q / p,
        v_exp: None,
        m_has_eps: true,
    };
    let psi_low = BoundExpression {
        k_exp: a_exp / &two - rational(1, 2) - &one / (&two * p) + q / p,
        m_exp: a_exp / rational(4, 1) + rational(3, 4) - &one / (rational(4, 1) * p)
            + q / (&two * p),
        v_exp: None,
        m_has_eps: true,
    };
    let psi = if *a_exp >= psi_threshold {
        if *a_exp == psi_threshold {
            assert_eq!(
                psi_high, psi_low,
                "Psi branches must agree at A = 1 + (1+2q)/p"
            );
        }
        psi_high
    } else {
        psi_low
    };
    Ok((phi, psi))
}

/// One row of the pointwise upper-bound table: the bound k^{ke} M^{me+eps}
/// log^{le} M, valid for M^{lo} <= k <= M^{hi}.
struct PointwiseRow {
    label: &'static str,
    k_exp: BigRational,
    m_exp: BigRational,
    log_exp: f64,
    has_eps: bool,
    k_lo: BigRational,
    k_hi: BigRational,
}

fn pointwise_rows() -> Vec<PointwiseRow> {
    let r = rational;
    vec![
        PointwiseRow {
            label: "k^{2/3} M^{1/3} log^{1/3} M",
            k_exp: r(2, 3),
            m_exp: r(1, 3),
            log_exp: 1.0 / 3.0,
            has_eps: false,
            k_lo: r(0, 1),
            k_hi: r(1, 2),
        },
        PointwiseRow {
            label: "k^{1/4} M^{3/8+eps}",
            k_exp: r(1, 4),
            m_exp: r(3, 8),
            log_exp: 0.0,
            has_eps: true,
            k_lo: r(1, 10),
            k_hi: r(1, 4),
        },
        PointwiseRow {
            label: "k^{2/3} M^{13/48+eps}",
            k_exp: r(2, 3),
            m_exp: r(13, 48),
            log_exp: 0.0,
            has_eps: true,
            k_lo: r(1, 4),
            k_hi: r(19, 64),
        },
        PointwiseRow {
            label: "M^{15/32+eps}",
            k_exp: r(0, 1),
            m_exp: r(15, 32),
            log_exp: 0.0,
            has_eps: true,
            k_lo: r(19, 64),
            k_hi: r(21, 64),
        },
        PointwiseRow {
            label: "k^{2/3} M^{1/4+eps}",
            k_exp: r(2, 3),
            m_exp: r(1, 4),
            log_exp: 0.0,
            has_eps: true,
            k_lo: r(21, 64),
            k_hi: r(3, 8),
        },
        PointwiseRow {
            label: "M^{1/2}",
            k_exp: r(0, 1),
            m_exp: r(1, 2),
            log_exp: 0.0,
            has_eps: false,
            k_lo: r(0, 1),
            k_hi: r(1, 2),
        },
    ]
}

/// Exact test of k <=> M^{num/den} via integer powers.
fn k_cmp_m_pow(k: u64, m: u64, exp: &BigRational) -> std::cmp::Ordering {
    let num = exp.numer().to_u32().expect("small exponent numerator");
    let den = exp.denom().to_u32().expect("small exponent denominator");
    let lhs = BigInt::from(k).pow(den);
    let rhs = BigInt::from(m).pow(num);
    lhs.cmp(&rhs)
}

/// Minimum over all applicable rows of the pointwise table, with the label
/// of the row achieving it. Boundaries are inclusive on both sides; eps is
/// instantiated at 0.01 for display.
pub fn pointwise_bound_table(k: u64, m: u64, eps: f64) -> Result<(f64, &'static str)> {
    if k < 1 || k_cmp_m_pow(k, m, &rational(1, 2)) == std::cmp::Ordering::Greater {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside [1, sqrt(M)] for M = {m}"
        )));
    }
    let mf = m as f64;
    let kf = k as f64;
    let log_m = mf.ln();
    let mut best: Option<(f64, &'static str)> = None;
    for row in pointwise_rows() {
        let lo_ok = k_cmp_m_pow(k, m, &row.k_lo) != std::cmp::Ordering::Less;
        let hi_ok = k_cmp_m_pow(k, m, &row.k_hi) != std::cmp::Ordering::Greater;
        if !(lo_ok && hi_ok) {
            continue;
        }
        let mut m_exp = row.m_exp.to_f64().unwrap();
        if row.has_eps {
            m_exp += eps;
        }
        let val =
            kf.powf(row.k_exp.to_f64().unwrap()) * mf.powf(m_exp) * log_m.powf(row.log_exp);
        if best.map_or(true, |(b, _)| val < b) {
            best = Some((val, row.label));
        }
    }
    Ok(best.expect("row 6 is always applicable"))
}

/// Two-term exponent-pair bound for sums of e(A sqrt n) over a window of
/// length <= M starting at M: A^p M^{q-p/2} + A^{-1} M^{1/2}.
pub fn es_pair_sum_bound<T: Real>(pair: &ExponentPair, a_coef: T, m_len: T) -> T {
    let p = to_scalar::<T>(&pair.p);
    let q_minus = to_scalar::<T>(&(&pair.q - &pair.p / rational(2, 1)));
    a_coef.powf(p) * m_len.powf(q_minus) + m_len.sqrt() / a_coef
}
