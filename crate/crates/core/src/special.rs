//! Scalar special functions used by the kernel routes.
//!
//! Gamma functions come from `statrs`; the confluent hypergeometric function
//! on the negative real axis and the large-argument Bessel expansion are
//! written out here because they are needed with exponential scaling.

use std::f64::consts::PI;

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Reciprocal gamma, zero at the poles.
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `1F1(a; b; -x)` for `x >= 0`, `b > 0`.
///
/// Small and moderate `x` use Kummer's transformation so the series has
/// terms of one sign; large `x` uses the algebraic asymptotic branch
/// (the exponentially small branch is below double precision there).
pub fn kummer_neg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0 && b > 0.0);
    let terminating = (b - a) <= 0.0 && (b - a).fract() == 0.0;
    if x <= 60.0 || terminating {
        // 1F1(a;b;-x) = e^{-x} 1F1(b-a;b;x)
        let c = b - a;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m = 0.0;
        loop {
            term *= (c + m) / (b + m) * x / (m + 1.0);
            sum += term;
            m += 1.0;
            if term.abs() <= 1e-17 * sum.abs() && m > x {
                break;
            }
            if term == 0.0 || m > 5000.0 {
                break;
            }
        }
        return (-x).exp() * sum;
    }
    let lead = if a <= 0.0 && a.fract() == 0.0 {
        // polynomial case never reaches here for the kernels, keep it exact
        return kummer_neg_poly(a, b, x);
    } else {
        let ln_ratio = ln_gamma(b) - ln_gamma(b - a);
        let sign = gamma_sign(b) * gamma_sign(b - a);
        sign * (ln_ratio - a * x.ln()).exp()
    };
    if recip_gamma(b - a) == 0.0 {
        return 0.0;
    }
    let c = a - b + 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for s in 0..200 {
        let s = s as f64;
        let next = term * (a + s) * (c + s) / ((s + 1.0) * x);
        if next.abs() > term.abs() {
            break;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn kummer_neg_poly(a: f64, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    while a + m < 0.0 {
        term *= (a + m) / (b + m) * (-x) / (m + 1.0);
        sum += term;
        m += 1.0;
    }
    sum
}

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if ((-x).floor() as i64) % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Bessel `J_alpha(theta)` from the Hankel asymptotic expansion.
///
/// Intended for `theta >= 25` and `|alpha| <= 2`, where the optimally
/// truncated expansion is accurate to rounding.
pub fn bessel_j_hankel(alpha: f64, theta: f64) -> f64 {
    let mu = 4.0 * alpha * alpha;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (8.0 * kf * theta);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        // a_k / theta^k enters P (even k) or Q (odd k) with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let omega = theta - alpha * PI / 2.0 - PI / 4.0;
    (2.0 / (PI * theta)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// Normalized Bessel function `j_alpha(theta) = Gamma(alpha+1) (2/theta)^alpha J_alpha(theta)`
/// for large positive `theta`.
pub fn normalized_bessel_large(alpha: f64, theta: f64) -> f64 {
    let ln_pref = ln_gamma(alpha + 1.0) + alpha * (2.0 / theta).ln();
    ln_pref.exp() * bessel_j_hankel(alpha, theta)
}
