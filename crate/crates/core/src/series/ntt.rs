//! Multi-prime number-theoretic transform with exact CRT reconstruction.
//!
//! The product is computed modulo enough 62-bit primes p = c*2^24 + 1 that
//! the primes' product exceeds twice the exact coefficient bound, then
//! reconstructed into signed `BigInt`s. Reconstruction-width insufficiency
//! is an error, never a wrap.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

use super::ExactSeries;

const TWO_ADICITY: u32 = 24;
const MAX_PRIMES: usize = 16;

/// Total modulus width the prime pool can certify, in bits.
pub fn available_prime_bits() -> u64 {
    let primes = prime_pool();
    primes.iter().map(|q| 64 - q.p.leading_zeros() as u64).sum()
}

#[derive(Clone, Copy)]
struct Mont {
    p: u64,
    neg_inv: u64, // -p^{-1} mod 2^64
    r2: u64,      // 2^128 mod p
}

impl Mont {
    fn new(p: u64) -> Self {
        // Newton iteration doubles correct low bits each step.
        let mut inv: u64 = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        // r = 2^64 mod p, r2 = 2^128 mod p
        let r = ((u64::MAX % p) as u128 + 1) % p as u128;
        let r2 = (r * r % p as u128) as u64;
        Mont {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn redc(self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let s = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn to_mont(self, x: u64) -> u64 {
        self.mul(x, self.r2)
    }

    fn from_mont(self, x: u64) -> u64 {
        self.redc(x as u128)
    }

    fn pow(self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

struct NttPrime {
    p: u64,
    mont: Mont,
    /// Primitive 2^24-th root of unity, Montgomery form.
    root: u64,
}

fn prime_pool() -> &'static Vec<NttPrime> {
    static POOL: OnceLock<Vec<NttPrime>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut primes = Vec::with_capacity(MAX_PRIMES);
        // Descend through candidates c*2^24 + 1 just below 2^63.
        let mut c = (1u64 << 38) - 1;
        while primes.len() < MAX_PRIMES {
            let p = (c << TWO_ADICITY) | 1;
            if is_prime_u64(p) {
                let mont = Mont::new(p);
                let g = primitive_root(p, c);
                let root = mont.pow(mont.to_mont(g), (p - 1) >> TWO_ADICITY);
                primes.push(NttPrime { p, mont, root });
            }
            c -= 1;
        }
        primes
    })
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let m = Mont::new(n);
    let one = m.to_mont(1);
    let minus_one = m.sub(0, one);
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = m.pow(m.to_mont(a % n), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = m.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest generator of the multiplicative group mod p, for p = c*2^24 + 1.
fn primitive_root(p: u64, c: u64) -> u64 {
    let mut factors = vec![2u64];
    let mut rest = c;
    let mut f = 3u64;
    while f * f <= rest {
        if rest % f == 0 {
            factors.push(f);
            while rest % f == 0 {
                rest /= f;
            }
        }
        f += 2;
    }
    if rest > 1 {
        factors.push(rest);
    }
    let m = Mont::new(p);
    let one = m.to_mont(1);
    'candidate: for g in 2u64.. {
        for &q in &factors {
            if m.pow(m.to_mont(g), (p - 1) / q) == one {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

/// In-place transform. `root` must be a primitive `a.len()`-th root of unity
/// in Montgomery form; `a.len()` a power of two not exceeding 2^24.
fn ntt_in_place(a: &mut [u64], m: Mont, root: u64) {
    let n = a.len();
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        // root of order `len`
        let mut w_len = root;
        let mut order = n;
        while order > len {
            w_len = m.mul(w_len, w_len);
            order >>= 1;
        }
        for start in (0..n).step_by(len) {
            let mut w = m.to_mont(1);
            for i in 0..len / 2 {
                let u = a[start + i];
                let v = m.mul(a[start + i + len / 2], w);
                a[start + i] = m.add(u, v);
                a[start + i + len / 2] = m.sub(u, v);
                w = m.mul(w, w_len);
            }
        }
        len <<= 1;
    }
}

fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
    let base = ((u64::MAX as u128 % p as u128) + 1) % p as u128;
    let mut r: u128 = 0;
    let digits: Vec<u64> = x.iter_u64_digits().collect();
    for &d in digits.iter().rev() {
        r = (r * base + (d % p) as u128) % p as u128;
    }
    let r = r as u64;
    if x.is_negative() && r != 0 {
        p - r
    } else {
        r
    }
}

fn mod_inverse_u64(a: u64, m: Mont) -> u64 {
    // p prime: a^{p-2}
    m.from_mont(m.pow(m.to_mont(a), m.p - 2))
}

pub(crate) fn mul_ntt(f: &ExactSeries, g: &ExactSeries, n_max: usize) -> Result<ExactSeries> {
    let lf = f.coeffs.len().min(n_max + 1);
    let lg = g.coeffs.len().min(n_max + 1);
    let conv_len = lf + lg - 1;
    let size = conv_len.next_power_of_two();
    if size > 1 << TWO_ADICITY {
        return Err(Error::InvalidParameter(format!(
            "transform size {size} exceeds 2^{TWO_ADICITY}"
        )));
    }

    // Exact width certificate: product of primes must exceed 2*bound + 1.
    let bound = {
        let a = f.max_abs() * g.sum_abs();
        let b = g.max_abs() * f.sum_abs();
        a.min(b)
    };
    if bound.is_zero() {
        return Ok(ExactSeries::zero(n_max));
    }
    let needed = BigInt::from(2) * &bound + 1;
    let pool = prime_pool();
    let mut modulus = BigInt::from(1);
    let mut n_primes = 0;
    while modulus < needed {
        if n_primes == pool.len() {
            return Err(Error::ReconstructionWidth {
                needed_bits: needed.bits(),
                available_bits: available_prime_bits(),
            });
        }
        modulus *= BigInt::from(pool[n_primes].p);
        n_primes += 1;
    }
    let primes = &pool[..n_primes];

    let mut residues: Vec<Vec<u64>> = Vec::with_capacity(n_primes);
    for q in primes {
        let m = q.mont;
        let mut fa = vec![0u64; size];
        for (i, c) in f.coeffs.iter().take(lf).enumerate() {
            fa[i] = m.to_mont(bigint_mod_u64(c, q.p));
        }
        let mut ga = vec![0u64; size];
        for (i, c) in g.coeffs.iter().take(lg).enumerate() {
            ga[i] = m.to_mont(bigint_mod_u64(c, q.p));
        }
        let root = {
            // primitive size-th root
            let mut r = q.root;
            let mut order = 1u64 << TWO_ADICITY;
            while order > size as u64 {
                r = m.mul(r, r);
                order >>= 1;
            }
            r
        };
        ntt_in_place(&mut fa, m, root);
        ntt_in_place(&mut ga, m, root);
        for (x, y) in fa.iter_mut().zip(&ga) {
            *x = m.mul(*x, *y);
        }
        let root_inv = m.pow(root, (q.p - 2) as u64);
        ntt_in_place(&mut fa, m, root_inv);
        let size_inv = m.to_mont(mod_inverse_u64(size as u64, m));
        for x in fa.iter_mut() {
            *x = m.mul(*x, size_inv);
        }
        // leave Montgomery form
        for x in fa.iter_mut() {
            *x = m.from_mont(*x);
        }
        fa.truncate(n_max + 1);
        residues.push(fa);
    }

    // Garner mixed-radix reconstruction, balanced into signed values.
    // inv[j] = (p_0 * ... * p_{j-1})^{-1} mod p_j; the empty product is 1
    let mut garner_inv = vec![0u64; n_primes];
    garner_inv[0] = 1;
    for j in 1..n_primes {
        let m = primes[j].mont;
        let mut acc = 1u64 % primes[j].p;
        for q in primes.iter().take(j) {
            acc = m.from_mont(m.mul(m.to_mont(acc), m.to_mont(q.p % primes[j].p)));
        }
        garner_inv[j] = mod_inverse_u64(acc, m);
    }
    let half = &modulus >> 1;
    let out_len = (n_max + 1).min(conv_len);
    let mut coeffs = vec![BigInt::zero(); n_max + 1];
    let mut digits = vec![0u64; n_primes];
    for (e, slot) in coeffs.iter_mut().enumerate().take(out_len) {
        for j in 0..n_primes {
            let m = primes[j].mont;
            // value of the mixed-radix prefix modulo p_j
            let mut prefix = 0u64;
            for i in (0..j).rev() {
                let t = m.from_mont(m.mul(m.to_mont(prefix), m.to_mont(primes[i].p % primes[j].p)));
                prefix = m.add(t, digits[i] % primes[j].p);
            }
            let r = residues[j][e];
            let diff = m.sub(r, prefix);
            digits[j] = m.from_mont(m.mul(m.to_mont(diff), m.to_mont(garner_inv[j])));
        }
        let mut x = BigInt::zero();
        for j in (0..n_primes).rev() {
            x = x * BigInt::from(primes[j].p) + BigInt::from(digits[j]);
        }
        if x > half {
            x -= &modulus;
        }
        *slot = x;
    }
    Ok(ExactSeries { coeffs })
}
