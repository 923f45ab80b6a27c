//! The rank-one Dunkl kernel `E_kappa(s)`, `s = u v`, for the group Z_2.
//!
//! `E_kappa(s) = exp(s) 1F1(kappa; 2 kappa + 1; -2 s)`, with Taylor
//! coefficients `1 / b_kappa(m)`, `b_kappa(m) = prod_{i<=m} (i + 2 kappa [i odd])`.
//! Routes by argument:
//!
//! | argument                          | route                                   |
//! |-----------------------------------|-----------------------------------------|
//! | `kappa = 0`                       | `exp(s)`                                |
//! | real                              | confluent hypergeometric, scaled        |
//! | complex, `abs(s) <= 1`            | Taylor series                           |
//! | imaginary, `abs(s) >= 25`         | normalized Bessel (Hankel expansion)    |
//! | other complex, `abs(s) <= 200`    | Gauss-Jacobi on the intertwining measure|

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quadrature::LineRule;
use crate::special::{kummer_neg, normalized_bessel_large};

/// Largest `abs(s)` accepted for non-real, non-imaginary arguments.
pub const MAX_COMPLEX_ARGUMENT: f64 = 200.0;

/// `b_kappa(m)` for `m = 0..=max`.
pub fn pairing_norms(kappa: f64, max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut b = 1.0;
    out.push(b);
    for i in 1..=max {
        b *= i as f64 + if i % 2 == 1 { 2.0 * kappa } else { 0.0 };
        out.push(b);
    }
    out
}

/// Taylor series of `E_kappa(s)` summed to relative precision.
pub fn series(kappa: f64, s: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut m = 1usize;
    loop {
        let d = m as f64 + if m % 2 == 1 { 2.0 * kappa } else { 0.0 };
        term *= s / d;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) && m as f64 > s.norm() {
            break;
        }
        m += 1;
        if m > 2000 {
            break;
        }
    }
    sum
}

/// `E_kappa(a) exp(-|a|)` for real `a`; bounded by one.
pub fn scaled_real(kappa: f64, a: f64) -> f64 {
    if kappa == 0.0 {
        return if a >= 0.0 { 1.0 } else { (2.0 * a).exp() };
    }
    if a >= 0.0 {
        kummer_neg(kappa, 2.0 * kappa + 1.0, 2.0 * a)
    } else {
        kummer_neg(kappa + 1.0, 2.0 * kappa + 1.0, -2.0 * a)
    }
}

fn jacobi_rule(kappa: f64, points: usize) -> Result<Arc<LineRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<LineRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (kappa.to_bits(), points);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(LineRule::jacobi(kappa - 1.0, kappa, points)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, rule.clone());
    Ok(rule)
}

/// `int exp(s t) d mu(t)`, `mu` proportional to `(1-t)^(kappa-1) (1+t)^kappa` on `[-1, 1]`.
pub fn intertwining_integral(kappa: f64, s: Complex64) -> Result<Complex64> {
    let r = s.norm();
    let points = if r <= 20.0 {
        64
    } else if r <= 80.0 {
        128
    } else {
        256
    };
    let rule = jacobi_rule(kappa, points)?;
    Ok(rule.integrate(|t| (s * t).exp()))
}

/// `E_kappa(i theta)` for large `|theta|` from normalized Bessel functions.
pub fn imaginary_large(kappa: f64, theta: f64) -> Complex64 {
    let th = theta.abs();
    let re = normalized_bessel_large(kappa - 0.5, th);
    let im = th / (2.0 * kappa + 1.0) * normalized_bessel_large(kappa + 0.5, th);
    let v = Complex64::new(re, im);
    if theta < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// `E_kappa(s)`.
pub fn kernel(kappa: f64, s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::KernelDomain(format!("{s}")));
    }
    if kappa == 0.0 {
        return Ok(s.exp());
    }
    if s.im == 0.0 {
        let a = s.re;
        return Ok(Complex64::new(scaled_real(kappa, a) * a.abs().exp(), 0.0));
    }
    let r = s.norm();
    if r <= 1.0 {
        return Ok(series(kappa, s));
    }
    if s.re == 0.0 && r >= 25.0 && kappa <= 4.0 {
        return Ok(imaginary_large(kappa, s.im));
    }
    if r > MAX_COMPLEX_ARGUMENT {
        return Err(Error::KernelDomain(format!("{s}")));
    }
    intertwining_integral(kappa, s)
}

/// Rank-one kernel `E_kappa(u, v)`.
pub fn dunkl_kernel_rank1_closed(kappa: f64, u: Complex64, v: Complex64) -> Result<Complex64> {
    if !(kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("kappa {kappa} must be >= 0")));
    }
    kernel(kappa, u * v)
}
