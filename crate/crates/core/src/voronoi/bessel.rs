//! Bessel J of nonnegative integer order over the envelope nu <= 20,
//! 0 <= x <= 10^6.
//!
//! Three regimes: ascending series for small x, Hankel asymptotics for
//! large x, and Miller's normalized downward recurrence in between. The
//! series is only taken where every term ratio is at most 1/2, so the sum
//! is within a factor two of its leading term and no cancellation occurs;
//! anywhere past that (including the turning-point band x ~ 2 nu, where a
//! nominal small-x cut of 2 nu would shed most of the mantissa) Miller's
//! recurrence is the accurate route.

use crate::error::{Error, Result};
use crate::real::Real;

pub const MAX_ORDER: u32 = 20;
pub const MAX_ARGUMENT: f64 = 1e6;

pub fn bessel_j<T: Real>(nu: u32, x: T) -> Result<T> {
    let xf = x.to_f64().unwrap();
    if nu > MAX_ORDER || !(0.0..=MAX_ARGUMENT).contains(&xf) {
        return Err(Error::InvalidParameter(format!(
            "bessel_j envelope is nu <= {MAX_ORDER}, 0 <= x <= {MAX_ARGUMENT}; got nu = {nu}, x = {xf}"
        )));
    }
    if xf == 0.0 {
        return Ok(if nu == 0 { T::one() } else { T::zero() });
    }
    let asymptotic_cut = 30.0 + (nu as f64) * (nu as f64) / 2.0;
    // first term ratio q/(nu+1) <= 1/2 keeps the whole series monotone
    // contracting: exact to rounding, no cancellation
    let series_ok = xf * xf / 4.0 <= 0.5 * (nu as f64 + 1.0);
    if series_ok {
        Ok(series(nu, x))
    } else if xf > asymptotic_cut {
        Ok(asymptotic(nu, x))
    } else {
        Ok(miller(nu, x))
    }
}

fn series<T: Real>(nu: u32, x: T) -> T {
    let half_x = x / T::from_f64(2.0).unwrap();
    // leading term (x/2)^nu / nu!
    let mut term = T::one();
    for i in 1..=nu {
        term = term * half_x / T::from_u32(i).unwrap();
    }
    let q = half_x * half_x;
    let mut sum = term;
    let mut m = 1u32;
    loop {
        term = -term * q / (T::from_u32(m).unwrap() * T::from_u32(nu + m).unwrap());
        let new = sum + term;
        if new == sum || m > 300 {
            return new;
        }
        sum = new;
        m += 1;
    }
}

/// Hankel expansion: J_nu(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi),
/// chi = x - nu pi/2 - pi/4, summed until the terms stop improving.
fn asymptotic<T: Real>(nu: u32, x: T) -> T {
    let mu = T::from_u32(4 * nu * nu).unwrap();
    let eight_x = T::from_f64(8.0).unwrap() * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut v = T::one(); // running a_j / x^j with sign of the factors
    let mut last = T::infinity();
    for j in 1u32..=60 {
        let odd = T::from_u32(2 * j - 1).unwrap();
        v = v * (mu - odd * odd) / (T::from_u32(j).unwrap() * eight_x);
        if v.abs() >= last {
            break;
        }
        last = v.abs();
        // j odd -> Q slot, j even -> P slot; signs alternate per pair
        let quarter = match j % 4 {
            1 => (T::zero(), v),
            2 => (-v, T::zero()),
            3 => (T::zero(), -v),
            _ => (v, T::zero()),
        };
        p = p + quarter.0;
        q = q + quarter.1;
        if last < T::from_f64(1e-18).unwrap() {
            break;
        }
    }
    let chi = x
        - T::from_f64(std::f64::consts::FRAC_PI_2).unwrap() * T::from_u32(nu).unwrap()
        - T::from_f64(std::f64::consts::FRAC_PI_4).unwrap();
    let amp = (T::from_f64(2.0 / std::f64::consts::PI).unwrap() / x).sqrt();
    amp * (p * chi.cos() - q * chi.sin())
}

/// Miller's algorithm: unnormalized downward recurrence from well above
/// max(nu, x), normalized with J_0 + 2 J_2 + 2 J_4 + ... = 1.
fn miller<T: Real>(nu: u32, x: T) -> T {
    let xf = x.to_f64().unwrap();
    let start = (nu as usize).max(xf.ceil() as usize) + 40 + (xf / 4.0) as usize;
    let start = if start % 2 == 0 { start } else { start + 1 };
    let two_over_x = T::from_f64(2.0).unwrap() / x;
    let mut jp = T::zero(); // J_{m+1} (unnormalized)
    let mut jc = T::min_positive_value().sqrt(); // J_m seed
    let mut target = T::zero();
    let mut norm = T::zero(); // J_0 + 2 sum J_{2k}
    let rescale_cut = T::from_f64(1e250).unwrap();
    let mut m = start;
    loop {
        let jm = T::from_usize(m).unwrap() * two_over_x * jc - jp; // J_{m-1}
        jp = jc;
        jc = jm;
        m -= 1;
        if m == nu as usize {
            target = jc;
        }
        if m % 2 == 0 {
            norm = norm + if m == 0 { jc } else { jc + jc };
        }
        if m == 0 {
            break;
        }
        if jc.abs() > rescale_cut {
            jc = jc / rescale_cut;
            jp = jp / rescale_cut;
            norm = norm / rescale_cut;
            target = target / rescale_cut;
        }
    }
    target / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j::<f64>(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j::<f64>(5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j11_leading_series_term() {
        // J_11(x) ~ (x/2)^11 / 11! as x -> 0; the next term is a relative
        // (x/2)^2/12 ~ 2.1e-8, which the comparison must absorb
        let x = 1e-3f64;
        let factorial_11: f64 = (1..=11).map(|i| i as f64).product();
        let leading = (x / 2.0).powi(11) / factorial_11;
        let got = bessel_j::<f64>(11, x).unwrap();
        assert!((got - leading).abs() <= 1e-7 * leading.abs());
    }

    #[test]
    fn classical_values() {
        let cases: &[(u32, f64, f64)] = &[
            (0, 1.0, 0.7651976865579666),
            (0, 5.0, -0.17759677131433830),
            (1, 1.0, 0.4400505857449335),
            (2, 10.0, 0.25463031368512062),
        ];
        for &(nu, x, expect) in cases {
            let got = bessel_j::<f64>(nu, x).unwrap();
            assert!(
                (got - expect).abs() <= 1e-10 * expect.abs(),
                "J_{nu}({x}): got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn envelope_rejected() {
        assert!(bessel_j::<f64>(21, 1.0).is_err());
        assert!(bessel_j::<f64>(3, -0.5).is_err());
        assert!(bessel_j::<f64>(3, 2e6).is_err());
    }

    #[test]
    fn three_term_recurrence_across_regimes() {
        for nu in 1..=13u32 {
            for &x in &[0.5, 3.0, 9.0, 15.0, 25.0, 40.0, 80.0, 200.0, 1000.0, 9876.5] {
                let jm = bessel_j::<f64>(nu - 1, x).unwrap();
                let jc = bessel_j::<f64>(nu, x).unwrap();
                let jp = bessel_j::<f64>(nu + 1, x).unwrap();
                let lhs = jm + jp;
                let rhs = 2.0 * nu as f64 / x * jc;
                let scale = jm.abs().max(jp.abs()).max(rhs.abs()).max(1e-300);
                assert!(
                    (lhs - rhs).abs() / scale <= 1e-7,
                    "nu = {nu}, x = {x}: residual {}",
                    (lhs - rhs).abs() / scale
                );
            }
        }
    }
}
