//! Dunkl kernel evaluation and the Gaussian pairing identities.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::basis::HermiteBasis;
use crate::error::{Error, Result};
use crate::quadrature::LineRule;
use crate::rank1;
use crate::special::ln_gamma;
use crate::structure::DunklStructure;

/// Hermitian norm `sqrt(sum |z_j|^2)`.
pub fn hermitian_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Bilinear square `l(z) = sum z_j^2`.
pub fn ell(z: &[Complex64]) -> Complex64 {
    z.iter().map(|v| v * v).sum()
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&t| Complex64::new(t, 0.0)).collect()
}

/// `E_k(z, w)` as the product of rank-one kernels over the coordinates.
pub fn kernel_product(s: &DunklStructure, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for ((&k, &a), &b) in s.kappa().iter().zip(z).zip(w) {
        acc *= rank1::kernel(k, a * b)?;
    }
    Ok(acc)
}

/// A series value with its truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub bound: f64,
}

/// Truncated series `E_k(z, w) = sum_{|nu| <= N} phi_nu(z) phi_nu(w)`.
#[derive(Debug, Clone, Copy)]
pub struct KernelEvaluator<'a> {
    basis: &'a HermiteBasis,
    tolerance: f64,
}

impl<'a> KernelEvaluator<'a> {
    pub fn new(basis: &'a HermiteBasis) -> Self {
        KernelEvaluator {
            basis,
            tolerance: 1e-12,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn basis(&self) -> &'a HermiteBasis {
        self.basis
    }

    pub fn structure(&self) -> &'a DunklStructure {
        self.basis.structure()
    }

    pub fn truncation_degree(&self) -> usize {
        self.basis.max_degree()
    }

    /// `(|z| |w|)^(N+1) / (N+1)!`.
    pub fn truncation_bound(&self, z: &[Complex64], w: &[Complex64]) -> f64 {
        let prod = hermitian_norm(z) * hermitian_norm(w);
        if prod == 0.0 {
            return 0.0;
        }
        let m = (self.truncation_degree() + 1) as f64;
        (m * prod.ln() - ln_gamma(m + 1.0)).exp()
    }

    /// Series value; fails when the truncation bound exceeds the tolerance.
    pub fn dunkl_kernel(&self, z: &[Complex64], w: &[Complex64]) -> Result<KernelValue> {
        let bound = self.truncation_bound(z, w);
        if bound > self.tolerance {
            return Err(Error::TruncationBound {
                bound,
                tolerance: self.tolerance,
            });
        }
        let a = self.basis.eval_phi_all(z);
        let b = self.basis.eval_phi_all(w);
        let value = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        Ok(KernelValue { value, bound })
    }

    /// Series inside its domain, rank-one product outside it.
    pub fn kernel(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        match self.dunkl_kernel(z, w) {
            Ok(v) => Ok(v.value),
            Err(Error::TruncationBound { .. }) => kernel_product(self.structure(), z, w),
            Err(e) => Err(e),
        }
    }
}

/// Log-variable trapezoid rule for `int g(t) exp(-delta t^2) 2^k |t|^(2k) dt`
/// where `g` is entire with `|g(t)| <= C exp(growth |t|)`.
pub(crate) fn chirp_rule(kappa: f64, delta: Complex64, growth: f64) -> Result<LineRule> {
    let theta = delta.arg().abs();
    if !(delta.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Re(delta) must be positive, got {delta}")));
    }
    // strip half-width in s = ln t keeping Re(delta t^2) > 0
    let v = (0.4 * (0.5 * PI - theta)).min(0.5);
    let h = 2.0 * PI * v / 40.0;
    let beta = delta.re;
    let t_max = (growth + (growth * growth + 4.0 * beta * 50.0).sqrt()) / (2.0 * beta);
    let s_min = -40.0 / (2.0 * kappa + 1.0) - 2.0;
    LineRule::log_trapezoid(kappa, h, s_min, t_max.ln())
}

/// Both sides of the complex Gaussian pairing
/// `int exp(-delta |x|^2) E(x, z) E(x, w) dw_k
///  = c_k^-1 (2 delta)^-(gamma + n/2) exp((l(z) + l(w)) / (4 delta)) E(z / (2 delta), w)`.
///
/// The left side is computed coordinate by coordinate (the integrand
/// factorizes over Z_2^n) with a rule adapted to the chirp in `delta`.
pub fn gaussian_pairing(
    ev: &KernelEvaluator<'_>,
    delta: Complex64,
    z: &[Complex64],
    w: &[Complex64],
) -> Result<(Complex64, Complex64)> {
    if !(delta.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Re(delta) must be positive, got {delta}")));
    }
    let s = ev.structure();
    let mut lhs = Complex64::new(1.0, 0.0);
    for (j, &k) in s.kappa().iter().enumerate() {
        let (zj, wj) = (z[j], w[j]);
        let rule = chirp_rule(k, delta, zj.norm() + wj.norm())?;
        let mut err = None;
        let v = rule.integrate(|t| {
            let e = rank1::kernel(k, zj * t).and_then(|a| Ok(a * rank1::kernel(k, wj * t)?));
            match e {
                Ok(e) => e * (-delta * t * t).exp(),
                Err(e) => {
                    err.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        lhs *= v;
    }
    let a = s.half_dimension();
    let two_delta = 2.0 * delta;
    let scaled: Vec<Complex64> = z.iter().map(|v| v / two_delta).collect();
    let rhs = (1.0 / s.ck())
        * (-a * two_delta.ln()).exp()
        * ((ell(z) + ell(w)) / (4.0 * delta)).exp()
        * ev.kernel(&scaled, w)?;
    Ok((lhs, rhs))
}

/// Fitted near-diagonal kernel bound.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    /// Smallest `C >= 1` enclosing every sandwiched value in `[1/C, C]`.
    pub constant: f64,
    /// The same constant fitted on the first half of the samples.
    pub half_sample_constant: f64,
    pub rows: Vec<(Vec<f64>, Vec<f64>, f64)>,
}

impl BoundsReport {
    /// `C` did not grow by more than 10% when the sample set was doubled.
    pub fn saturated(&self) -> bool {
        self.constant <= 1.1 * self.half_sample_constant
    }

    pub fn to_csv(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|t| format!("{t:.12e}")).collect::<Vec<_>>().join(";");
        let mut out = String::from("sample_id,x,y,sandwiched_value\n");
        for (i, (x, y, q)) in self.rows.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{},{q:.12e}", fmt(x), fmt(y));
        }
        out
    }
}

/// Sandwiched quantity `E_k(x, y) w_k(B(x, 1)) exp(-(|x|^2 + |y|^2)/2)`.
pub fn sandwiched_value(s: &DunklStructure, x: &[f64], y: &[f64]) -> Result<f64> {
    let mut log_e = 0.0;
    let mut scaled = 1.0;
    for ((&k, &a), &b) in s.kappa().iter().zip(x).zip(y) {
        let p = a * b;
        scaled *= rank1::scaled_real(k, p);
        log_e += p.abs();
    }
    let gauss = 0.5 * (x.iter().map(|v| v * v).sum::<f64>() + y.iter().map(|v| v * v).sum::<f64>());
    Ok(scaled * (log_e - gauss).exp() * s.ball_volume(x, 1.0)?)
}

pub fn kernel_bounds_check(ev: &KernelEvaluator<'_>, samples: &[(Vec<f64>, Vec<f64>)]) -> Result<BoundsReport> {
    let s = ev.structure();
    let mut rows = Vec::with_capacity(samples.len());
    let mut c: f64 = 1.0;
    let mut c_half: f64 = 1.0;
    let half = samples.len().div_ceil(2);
    for (i, (x, y)) in samples.iter().enumerate() {
        let q = sandwiched_value(s, x, y)?;
        c = c.max(q).max(1.0 / q);
        if i < half {
            c_half = c;
        }
        rows.push((x.clone(), y.clone(), q));
    }
    Ok(BoundsReport {
        constant: c,
        half_sample_constant: c_half,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::orthonormal_basis;
    use crate::structure::build_structure;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn series_examples() {
        let s = build_structure(1, &[0.0]).unwrap();
        let b = orthonormal_basis(&s, 30).unwrap();
        let ev = KernelEvaluator::new(&b);
        let e = ev.dunkl_kernel(&[cx(1.0, 0.0)], &[cx(1.0, 0.0)]).unwrap();
        assert!((e.value.re - std::f64::consts::E).abs() < 1e-14);
        let s = build_structure(2, &[0.5, 1.0]).unwrap();
        let b = orthonormal_basis(&s, 12).unwrap();
        let ev = KernelEvaluator::new(&b);
        let zero = [cx(0.0, 0.0); 2];
        let v = ev.dunkl_kernel(&[cx(0.3, 1.0), cx(-2.0, 0.1)], &zero).unwrap();
        assert_eq!(v.value, cx(1.0, 0.0));
    }

    #[test]
    fn truncation_is_reported() {
        let s = build_structure(1, &[1.0]).unwrap();
        let b = orthonormal_basis(&s, 10).unwrap();
        let ev = KernelEvaluator::new(&b);
        let r = ev.dunkl_kernel(&[cx(3.0, 0.0)], &[cx(2.0, 0.0)]);
        assert!(matches!(r, Err(Error::TruncationBound { .. })));
        // the hybrid entry point falls back to the closed route
        let v = ev.kernel(&[cx(3.0, 0.0)], &[cx(2.0, 0.0)]).unwrap();
        assert!((v - rank1::kernel(1.0, cx(6.0, 0.0)).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn gaussian_pairing_classical_origin() {
        let s = build_structure(1, &[0.0]).unwrap();
        let b = orthonormal_basis(&s, 20).unwrap();
        let ev = KernelEvaluator::new(&b);
        let zero = [cx(0.0, 0.0)];
        let (l, r) = gaussian_pairing(&ev, cx(1.0, 0.0), &zero, &zero).unwrap();
        let sp = PI.sqrt();
        assert!((l.re - sp).abs() < 1e-12 && (r.re - sp).abs() < 1e-12, "{l} {r}");
    }

    #[test]
    fn gaussian_pairing_reproduces_ck_at_half() {
        for kappa in [0.25, 1.0] {
            let s = build_structure(1, &[kappa]).unwrap();
            let b = orthonormal_basis(&s, 20).unwrap();
            let ev = KernelEvaluator::new(&b);
            let zero = [cx(0.0, 0.0)];
            let (l, r) = gaussian_pairing(&ev, cx(0.5, 0.0), &zero, &zero).unwrap();
            let expect = 1.0 / s.ck();
            assert!((l.re - expect).abs() < 1e-11 * expect);
            assert!((r.re - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn gaussian_pairing_complex_delta() {
        let s = build_structure(1, &[0.5]).unwrap();
        let b = orthonormal_basis(&s, 30).unwrap();
        let ev = KernelEvaluator::new(&b);
        let (l, r) = gaussian_pairing(&ev, cx(1.0, 0.5), &[cx(0.3, 0.0)], &[cx(0.2, 0.0)]).unwrap();
        assert!((l - r).norm() < 1e-8 * r.norm(), "{l} {r}");
    }

    #[test]
    fn bounds_classical_band() {
        let s = build_structure(1, &[0.0]).unwrap();
        let b = orthonormal_basis(&s, 4).unwrap();
        let ev = KernelEvaluator::new(&b);
        let eps0: f64 = 0.5;
        let samples: Vec<_> = (0..20)
            .map(|i| {
                let x = -3.0 + 0.3 * i as f64;
                (vec![x], vec![x + eps0 * ((i % 5) as f64 / 5.0 - 0.4)])
            })
            .collect();
        let rep = kernel_bounds_check(&ev, &samples).unwrap();
        for (_, _, q) in &rep.rows {
            assert!(*q <= 2.0 + 1e-12 && *q >= 2.0 * (-eps0 * eps0 / 2.0).exp() - 1e-12);
        }
        assert!(rep.to_csv().lines().count() == 21);
    }
}
