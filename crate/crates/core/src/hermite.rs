//! Generalized Hermite functions, the Dunkl-Hermite eigenrelation, the
//! generating function and the Mehler formula.

use num_complex::Complex64;

use crate::basis::HermiteBasis;
use crate::error::{Error, Result};
use crate::kernels::{ell, KernelEvaluator};
use crate::operators::dunkl_apply;
use crate::poly::{total_degree, Polynomial};

/// Evaluates `h_nu(x) = 2^(-|nu|/2) exp(-|x|^2/2) H_nu(x)`.
#[derive(Debug, Clone, Copy)]
pub struct HermiteFunctionEvaluator<'a> {
    basis: &'a HermiteBasis,
}

impl<'a> HermiteFunctionEvaluator<'a> {
    pub fn new(basis: &'a HermiteBasis) -> Self {
        HermiteFunctionEvaluator { basis }
    }

    pub fn basis(&self) -> &'a HermiteBasis {
        self.basis
    }

    pub fn hermite_function(&self, nu: &[u32], x: &[f64]) -> Result<f64> {
        let h = self.basis.hermite(nu)?;
        let d = total_degree(nu) as i32;
        let r2: f64 = x.iter().map(|t| t * t).sum();
        Ok(2f64.powf(-0.5 * d as f64) * (-0.5 * r2).exp() * h.eval_real(x).re)
    }

    /// `h_nu(x)` for every stored index, in basis order.
    pub fn all_functions(&self, x: &[f64]) -> Vec<f64> {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        let g = (-0.5 * r2).exp();
        let hs = self.basis.eval_hermite_all_real(x);
        self.basis
            .indices()
            .iter()
            .zip(hs)
            .map(|(nu, h)| 2f64.powf(-0.5 * total_degree(nu) as f64) * g * h)
            .collect()
    }

    /// Applies `-(Delta_k - |x|^2)/2` to `H_nu exp(-|x|^2/2)` exactly and
    /// returns the eigenvalue; the residual must vanish to 1e-10 relative
    /// to the largest coefficient of `H_nu`.
    pub fn eigen_check(&self, nu: &[u32]) -> Result<f64> {
        let s = self.basis.structure();
        let p = self.basis.hermite(nu)?;
        let q = oscillator_on_gaussian_multiple(s, p)?;
        // leading coefficient at the monomial x^nu
        let lead = p.coeff(nu);
        let lambda = (q.coeff(nu) / lead).re;
        let residual = q.sub(&p.scale(lambda.into())).max_abs_coeff() / p.max_abs_coeff();
        if residual > 1e-10 {
            return Err(Error::EigenResidual {
                index: nu.to_vec(),
                residual,
                tolerance: 1e-10,
            });
        }
        Ok(lambda)
    }

    /// `lhs = exp(-l(w)) E_k(2z, w)`, `rhs = sum H_nu(z) phi_nu(w)`.
    pub fn generating_function_check(&self, z: &[Complex64], w: &[Complex64]) -> Result<(Complex64, Complex64)> {
        let ev = KernelEvaluator::new(self.basis);
        let z2: Vec<Complex64> = z.iter().map(|v| v * 2.0).collect();
        let lhs = (-ell(w)).exp() * ev.kernel(&z2, w)?;
        let hz = self.basis.eval_hermite_all(z);
        let pw = self.basis.eval_phi_all(w);
        let rhs = hz.iter().zip(&pw).map(|(a, b)| a * b).sum();
        Ok((lhs, rhs))
    }

    /// Series and closed sides of the Mehler formula.
    pub fn mehler_eval(&self, r: Complex64, x: &[f64], y: &[f64]) -> Result<(Complex64, Complex64)> {
        if !(r.norm() < 1.0) {
            return Err(Error::InvalidParameter(format!("|r| must be < 1, got {r}")));
        }
        let s = self.basis.structure();
        let hx = self.basis.eval_hermite_all_real(x);
        let hy = self.basis.eval_hermite_all_real(y);
        let max = self.basis.max_degree();
        let mut powers = Vec::with_capacity(max + 1);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..=max {
            powers.push(p);
            p *= r / 2.0;
        }
        let series = self
            .basis
            .indices()
            .iter()
            .zip(hx.iter().zip(&hy))
            .map(|(nu, (a, b))| powers[total_degree(nu)] * (a * b))
            .sum();

        let one_m = Complex64::new(1.0, 0.0) - r * r;
        let nx: f64 = x.iter().map(|t| t * t).sum();
        let ny: f64 = y.iter().map(|t| t * t).sum();
        let z: Vec<Complex64> = x.iter().map(|&t| 2.0 * r * t / one_m).collect();
        let yc: Vec<Complex64> = y.iter().map(|&t| t.into()).collect();
        let ev = KernelEvaluator::new(self.basis);
        let closed = (-s.half_dimension() * one_m.ln()).exp()
            * (-(r * r) * (nx + ny) / one_m).exp()
            * ev.kernel(&z, &yc)?;
        Ok((series, closed))
    }
}

/// `Q` with `H_k(P exp(-|x|^2/2)) = Q exp(-|x|^2/2)`:
/// `Q = -(sum_j D_j D_j P - |x|^2 P)/2`, `D_j P = T_j P - x_j P`.
pub fn oscillator_on_gaussian_multiple(
    s: &crate::structure::DunklStructure,
    p: &Polynomial,
) -> Result<Polynomial> {
    let n = s.n();
    let d = |j: usize, q: &Polynomial| -> Result<Polynomial> { Ok(dunkl_apply(s, j, q)?.sub(&q.times_coordinate(j))) };
    let mut lap = Polynomial::zero(n);
    let mut r2p = Polynomial::zero(n);
    for j in 0..n {
        lap = lap.add(&d(j, &d(j, p)?)?);
        r2p = r2p.add(&p.times_coordinate(j).times_coordinate(j));
    }
    Ok(lap.sub(&r2p).scale(Complex64::new(-0.5, 0.0)))
}
