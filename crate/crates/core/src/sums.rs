//! Twisted linear sums A(x, h/k) over prefix caches.
//!
//! A cache stores the cumulative complex sums S(m) = sum_{n<=m} a(n) e(nh/k);
//! every long sum, short sum and windowed deviation is a difference of two
//! cached values, so downstream moment integrals see A as the step function
//! it is. Caches are immutable after build and safe to share across threads.

use num_complex::Complex;
use num_integer::Integer;
use num_traits::Zero;

use crate::coeffs::{CoeffTable, FormId};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::voronoi::mod_inverse;

/// Reduced rational twist h/k with the modular inverse of h.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Twist {
    h: u64,
    k: u64,
    h_bar: u64,
}

impl Twist {
    /// Reduce h into [0, k) and compute h_bar; rejects k = 0 and
    /// non-coprime (h, k).
    pub fn new(h: i64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroModulus);
        }
        let h_red = h.rem_euclid(k as i64) as u64;
        if h_red.gcd(&k) != 1 && k > 1 {
            return Err(Error::NotCoprime { h, k });
        }
        let h_bar = if k == 1 { 0 } else { mod_inverse(h_red, k)? };
        Ok(Twist {
            h: h_red,
            k,
            h_bar,
        })
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// h_bar with h * h_bar = 1 (mod k); 0 when k = 1.
    pub fn h_bar(&self) -> u64 {
        self.h_bar
    }

    /// The k-periodic factors e(j/k) for j in 0..k.
    pub fn roots_of_unity<T: Real>(&self) -> Vec<Complex<T>> {
        unit_roots(self.k)
    }
}

impl std::fmt::Display for Twist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.h, self.k)
    }
}

pub(crate) fn unit_roots<T: Real>(k: u64) -> Vec<Complex<T>> {
    (0..k)
        .map(|j| {
            let ang = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            Complex::new(
                T::from_f64(ang.cos()).unwrap(),
                T::from_f64(ang.sin()).unwrap(),
            )
        })
        .collect()
}

/// Cumulative sums S(m) = sum_{n<=m} a(n) e(nh/k) for m = 0..=n_max.
#[derive(Debug, Clone)]
pub struct PrefixCache<T: Real> {
    twist: Twist,
    form_id: FormId,
    s: Vec<Complex<T>>,
}

/// Build the prefix cache of `table` at twist h/k.
pub fn build_prefix_cache<T: Real>(table: &CoeffTable, h: i64, k: u64) -> Result<PrefixCache<T>> {
    let twist = Twist::new(h, k)?;
    let roots = unit_roots::<T>(twist.k);
    let n_max = table.n_max();
    let mut s = Vec::with_capacity(n_max + 1);
    let mut acc = Complex::<T>::zero();
    s.push(acc);
    let mut idx: u64 = 0;
    for n in 1..=n_max {
        idx += twist.h;
        if idx >= twist.k {
            idx -= twist.k;
        }
        let a = T::from_f64(table.a(n)).unwrap();
        acc += roots[idx as usize] * a;
        s.push(acc);
    }
    Ok(PrefixCache {
        twist,
        form_id: table.form_id(),
        s,
    })
}

impl<T: Real> PrefixCache<T> {
    pub fn twist(&self) -> Twist {
        self.twist
    }

    pub fn form_id(&self) -> FormId {
        self.form_id
    }

    pub fn n_max(&self) -> usize {
        self.s.len() - 1
    }

    /// S(m) by index.
    pub fn prefix(&self, m: usize) -> Complex<T> {
        self.s[m]
    }

    /// Synthetic cache with prescribed prefix values (tests, null models).
    pub fn from_prefix_values(twist: Twist, form_id: FormId, s: Vec<Complex<T>>) -> Self {
        assert!(!s.is_empty() && s[0].is_zero(), "S(0) must be 0");
        PrefixCache { twist, form_id, s }
    }

    fn check_range(&self, hi: f64) -> Result<()> {
        if !(0.0..=self.n_max() as f64).contains(&hi) {
            return Err(Error::RangeOverflow {
                lo: 0.0,
                hi,
                len: self.n_max() as u64,
            });
        }
        Ok(())
    }

    /// A(x, h/k) = S(floor x); the sum over n <= x is inclusive at integers.
    pub fn long_sum(&self, x: T) -> Result<Complex<T>> {
        let xf = x.to_f64().unwrap();
        self.check_range(xf)?;
        Ok(self.s[xf.floor() as usize])
    }

    /// Sum over the inclusive window x <= n <= x + delta_len:
    /// S(floor(x + delta_len)) - S(ceil(x) - 1).
    pub fn short_sum(&self, x: T, delta_len: T) -> Result<Complex<T>> {
        let xf = x.to_f64().unwrap();
        let hif = xf + delta_len.to_f64().unwrap();
        self.check_range(hif)?;
        let lo = (xf.ceil() as i64 - 1).max(0) as usize;
        let hi = hif.floor() as usize;
        if hi < lo {
            return Ok(Complex::zero());
        }
        Ok(self.s[hi] - self.s[lo])
    }

    /// max over 0 <= U <= delta_len of |sum_{x<=n<=x+U} a(n) e(nh/k)|.
    /// The sum is a step function of U, so the max is over the breakpoints
    /// j in [ceil(x)-1, floor(x+delta_len)] of |S(j) - S(ceil(x)-1)|.
    pub fn max_short_deviation(&self, x: T, delta_len: T) -> Result<T> {
        let xf = x.to_f64().unwrap();
        let hif = xf + delta_len.to_f64().unwrap();
        self.check_range(hif)?;
        let lo = (xf.ceil() as i64 - 1).max(0) as usize;
        let hi = hif.floor() as usize;
        let base = self.s[lo];
        let mut best = T::zero();
        for j in lo..=hi.max(lo) {
            let dev = (self.s[j] - base).norm_sqr();
            if dev > best {
                best = dev;
            }
        }
        Ok(best.sqrt())
    }
}

/// Componentwise positive part: (Re z)_+ + i (Im z)_+.
pub fn positive_part<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.re.max(T::zero()), z.im.max(T::zero()))
}
