//! Dunkl operators, the Dunkl Laplacian and the pairing `[p, q]_k`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::structure::DunklStructure;

/// `T_j p = d_j p + sum_alpha kappa_alpha alpha_j (p - p o r_alpha) / <alpha, x>`.
///
/// For the coordinate roots only `alpha = sqrt(2) e_j` contributes, and the
/// factor `alpha_j / <alpha, x>` is `1 / x_j`. The difference quotient is an
/// exact division; a remainder means the reflection is wrong.
pub fn dunkl_apply(s: &DunklStructure, j: usize, p: &Polynomial) -> Result<Polynomial> {
    if j >= s.n() {
        return Err(Error::InvalidParameter(format!(
            "coordinate index {j} out of range for dimension {}",
            s.n()
        )));
    }
    let mut out = p.partial(j);
    let k = s.kappa()[j];
    if k != 0.0 {
        let diff = p.sub(&p.flip_sign(j));
        let (q, r) = diff.div_coordinate(j);
        if !r.is_zero() {
            return Err(Error::NonDivisible {
                root: s.positive_roots()[j].clone(),
            });
        }
        out = out.add(&q.scale(Complex64::new(k, 0.0)));
    }
    Ok(out)
}

/// `Delta_k p = sum_j T_j T_j p`.
pub fn dunkl_laplacian(s: &DunklStructure, p: &Polynomial) -> Result<Polynomial> {
    let mut out = Polynomial::zero(s.n());
    for j in 0..s.n() {
        let tj = dunkl_apply(s, j, p)?;
        out = out.add(&dunkl_apply(s, j, &tj)?);
    }
    Ok(out)
}

/// Explicit form of the Dunkl Laplacian on the product group:
/// `Delta p + sum_j kappa_j (2 d_j p / x_j - (p - p o r_j) / x_j^2)`.
pub fn dunkl_laplacian_explicit(s: &DunklStructure, p: &Polynomial) -> Result<Polynomial> {
    let mut out = Polynomial::zero(s.n());
    for j in 0..s.n() {
        out = out.add(&p.partial(j).partial(j));
        let k = s.kappa()[j];
        if k == 0.0 {
            continue;
        }
        let diff = p.sub(&p.flip_sign(j));
        // (2 x_j d_j p - (p - p o r_j)) / x_j^2, divided exactly
        let combined = p
            .partial(j)
            .scale(Complex64::new(2.0, 0.0))
            .times_coordinate(j)
            .sub(&diff);
        let (c1, rc1) = combined.div_coordinate(j);
        let (c2, rc2) = c1.div_coordinate(j);
        if !rc1.is_zero() || !rc2.is_zero() {
            return Err(Error::NonDivisible {
                root: s.positive_roots()[j].clone(),
            });
        }
        out = out.add(&c2.scale(Complex64::new(k, 0.0)));
    }
    Ok(out)
}

/// `T^nu p = T_1^{nu_1} ... T_n^{nu_n} p`.
pub fn apply_multi(s: &DunklStructure, nu: &[u32], p: &Polynomial) -> Result<Polynomial> {
    let mut cur = p.clone();
    for (j, &e) in nu.iter().enumerate() {
        for _ in 0..e {
            if cur.is_zero() {
                return Ok(cur);
            }
            cur = dunkl_apply(s, j, &cur)?;
        }
    }
    Ok(cur)
}

/// `[p, q]_k = (p(T) q)(0)`.
pub fn dunkl_pairing(s: &DunklStructure, p: &Polynomial, q: &Polynomial) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let origin = vec![Complex64::new(0.0, 0.0); s.n()];
    for (nu, c) in p.terms() {
        let t = apply_multi(s, nu, q)?;
        acc += c * t.eval(&origin);
    }
    Ok(acc)
}
