//! Generalized Fock space in coefficient form, the chaotic transform and
//! coherent states.
//!
//! A Fock vector is stored by its coefficients on `phi_nu`, in basis order.
//! The inner product is `(f, g)_k = sum a_nu conj(b_nu)`.

use num_complex::Complex64;

use crate::basis::HermiteBasis;
use crate::error::{Error, Result};
use crate::hermite::HermiteFunctionEvaluator;
use crate::kernels::{ell, kernel_product, KernelEvaluator};
use crate::poly::total_degree;
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub coefficients: Vec<Complex64>,
}

impl FockVector {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        FockVector { coefficients }
    }

    /// The image of `sum a_nu h_nu` is `sum a_nu phi_nu`.
    pub fn from_h_coefficients(a: &[Complex64]) -> Self {
        FockVector::new(a.to_vec())
    }

    /// Conjugate-linear in the second slot.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum a_nu phi_nu(z)`.
    pub fn eval(&self, basis: &HermiteBasis, z: &[Complex64]) -> Complex64 {
        basis
            .eval_phi_all(z)
            .iter()
            .zip(&self.coefficients)
            .map(|(p, a)| p * a)
            .sum()
    }
}

/// `C_k f` with coefficients `m_k int h_nu f dw_k`, `m_k` the L^2 constant.
///
/// `rule` carries `w_k exp(-beta |x|^2)`; the integrand is divided by the
/// Gaussian before weighting.
pub fn chaotic_transform<F>(basis: &HermiteBasis, f: F, rule: &QuadratureRule) -> Result<FockVector>
where
    F: Fn(&[f64]) -> Complex64,
{
    let s = basis.structure();
    if rule.dim() != s.n() {
        return Err(Error::InvalidParameter("rule dimension mismatch".into()));
    }
    let beta = rule.gaussian_scale();
    let hev = HermiteFunctionEvaluator::new(basis);
    let mut acc = vec![Complex64::new(0.0, 0.0); basis.len()];
    let mut bad = None;
    rule.for_each(|x, w| {
        if bad.is_some() {
            return;
        }
        let r2: f64 = x.iter().map(|t| t * t).sum();
        let fx = f(x) * (beta * r2).exp();
        if !(fx.re.is_finite() && fx.im.is_finite()) {
            bad = Some(x.to_vec());
            return;
        }
        for (a, h) in acc.iter_mut().zip(hev.all_functions(x)) {
            *a += fx * (h * w);
        }
    });
    if let Some(node) = bad {
        return Err(Error::NonFinite { node });
    }
    let m = s.l2_const();
    Ok(FockVector::new(acc.into_iter().map(|a| a * m).collect()))
}

/// Coherent state `F_{w z}` with coefficients `phi_nu(z) w^|nu|`.
#[derive(Debug, Clone)]
pub struct CoherentState {
    pub label: Vec<Complex64>,
    pub coefficients: FockVector,
}

pub fn coherent_state(basis: &HermiteBasis, z: &[Complex64], w: Complex64) -> Result<CoherentState> {
    if z.len() != basis.structure().n() {
        return Err(Error::InvalidParameter("label has the wrong dimension".into()));
    }
    let phi = basis.eval_phi_all(z);
    let coefficients = basis
        .indices()
        .iter()
        .zip(phi)
        .map(|(nu, p)| p * w.powu(total_degree(nu) as u32))
        .collect();
    Ok(CoherentState {
        label: z.iter().map(|v| v * w).collect(),
        coefficients: FockVector::new(coefficients),
    })
}

impl CoherentState {
    /// `exp(-(l(z) + l(x))/2) E_k(sqrt(2) z, x)` from the kernel.
    pub fn pointwise(&self, basis: &HermiteBasis, x: &[f64]) -> Result<Complex64> {
        let ev = KernelEvaluator::new(basis);
        let xs: Vec<Complex64> = x.iter().map(|&t| t.into()).collect();
        let zs: Vec<Complex64> = self.label.iter().map(|v| v * std::f64::consts::SQRT_2).collect();
        Ok((-(ell(&self.label) + ell(&xs)) / 2.0).exp() * ev.kernel(&zs, &xs)?)
    }

    /// `sum phi_nu(z) h_nu(x)` from the coefficients.
    pub fn pointwise_from_coefficients(&self, basis: &HermiteBasis, x: &[f64]) -> Complex64 {
        let hev = HermiteFunctionEvaluator::new(basis);
        hev.all_functions(x)
            .iter()
            .zip(&self.coefficients.coefficients)
            .map(|(h, a)| a * h)
            .sum()
    }

    /// Squared norm of the truncated coefficients.
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.norm().powi(2)
    }

    /// `E_k(z, conj z) - sum_{stored} |phi_nu(z)|^2`: the mass beyond the cutoff.
    pub fn tail(&self, basis: &HermiteBasis) -> Result<f64> {
        let conj: Vec<Complex64> = self.label.iter().map(|v| v.conj()).collect();
        let full = kernel_product(basis.structure(), &self.label, &conj)?.re;
        Ok(full - self.norm_sqr())
    }
}

/// `(C_k f, C_k g)_k` through the transform and `m_k int f conj(g) dw_k`
/// directly, for `f`, `g` given by h-coefficients.
pub fn resolution_check(
    basis: &HermiteBasis,
    f: &[Complex64],
    g: &[Complex64],
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    let hev = HermiteFunctionEvaluator::new(basis);
    let synth = |a: &[Complex64], x: &[f64]| -> Complex64 {
        hev.all_functions(x).iter().zip(a).map(|(h, c)| c * h).sum()
    };
    let cf = chaotic_transform(basis, |x| synth(f, x), rule)?;
    let cg = chaotic_transform(basis, |x| synth(g, x), rule)?;
    let lhs = cf.inner(&cg);
    let beta = rule.gaussian_scale();
    let s = basis.structure();
    let rhs = rule.integrate(|x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        synth(f, x) * synth(g, x).conj() * (beta * r2).exp()
    })? * s.l2_const();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::orthonormal_basis;
    use crate::structure::build_structure;

    #[test]
    fn ground_state_transforms_to_constant() {
        let s = build_structure(1, &[0.5]).unwrap();
        let b = orthonormal_basis(&s, 8).unwrap();
        let rule = s.gaussian_rule(1.0, 40).unwrap();
        let c = chaotic_transform(&b, |x| (-0.5 * x[0] * x[0]).exp().into(), &rule).unwrap();
        assert!((c.coefficients[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(c.coefficients[1..].iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn coherent_state_at_zero_is_ground_state() {
        let s = build_structure(2, &[0.5, 1.0]).unwrap();
        let b = orthonormal_basis(&s, 6).unwrap();
        let zero = [Complex64::new(0.0, 0.0); 2];
        let f = coherent_state(&b, &zero, 1.0.into()).unwrap();
        assert_eq!(f.coefficients.coefficients[0], 1.0.into());
        assert!(f.coefficients.coefficients[1..].iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn classical_coherent_coefficients() {
        let s = build_structure(1, &[0.0]).unwrap();
        let b = orthonormal_basis(&s, 10).unwrap();
        let z = 0.8;
        let f = coherent_state(&b, &[z.into()], 1.0.into()).unwrap();
        let mut fact = 1.0;
        for m in 0..=10 {
            if m > 0 {
                fact *= m as f64;
            }
            let expect = z.powi(m) / fact.sqrt();
            assert!((f.coefficients.coefficients[m as usize].re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_second_slot() {
        let a = FockVector::new(vec![Complex64::new(1.0, 0.0)]);
        let b = FockVector::new(vec![Complex64::new(0.0, 1.0)]);
        assert_eq!(a.inner(&b), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn tail_is_small_for_moderate_labels() {
        let s = build_structure(1, &[1.0]).unwrap();
        let b = orthonormal_basis(&s, 40).unwrap();
        let f = coherent_state(&b, &[Complex64::new(0.5, 0.3)], 0.8.into()).unwrap();
        assert!(f.tail(&b).unwrap().abs() < 1e-14);
    }
}
