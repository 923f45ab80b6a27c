//! Dunkl-Hermite Schrodinger flow in spectral and kernel form, the free
//! Dunkl flow kernel, and the coherent-state image law.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::basis::HermiteBasis;
use crate::error::{Error, Result};
use crate::kernels::kernel_product;
use crate::poly::total_degree;
use crate::quadrature::{LineRule, QuadratureRule};
use crate::structure::DunklStructure;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(-i t H_k)` on h-coefficients; eigenvalues `|nu| + gamma + n/2`.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPropagator<'a> {
    basis: &'a HermiteBasis,
}

impl<'a> SpectralPropagator<'a> {
    pub fn new(basis: &'a HermiteBasis) -> Self {
        SpectralPropagator { basis }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let a = self.basis.structure().half_dimension();
        self.basis
            .indices()
            .iter()
            .map(|nu| total_degree(nu) as f64 + a)
            .collect()
    }

    pub fn propagate_spectral(&self, f: &[Complex64], t: f64) -> Vec<Complex64> {
        f.iter()
            .zip(self.eigenvalues())
            .map(|(a, mu)| a * Complex64::from_polar(1.0, -t * mu))
            .collect()
    }
}

/// Comparison of `exp(-i t H_k) F_z` with a multiple of another coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentImageReport {
    /// `exp(-i t)`.
    pub label: Complex64,
    /// `exp(-i t (gamma + n/2))`.
    pub constant: Complex64,
    /// Largest coefficient deviation from `constant * F_{label z}`.
    pub residual: f64,
    /// Label `exp(i t)` in the alternative convention.
    pub alt_label: Complex64,
    /// Prefactor `c_k^2 (i exp(i t))^-(gamma + n/2)` in the alternative convention.
    pub alt_constant: Complex64,
    /// Largest coefficient deviation from `alt_constant * F_{alt_label z}`.
    pub alt_residual: f64,
}

pub fn coherent_image(p: &SpectralPropagator<'_>, z: &[Complex64], t: f64) -> Result<CoherentImageReport> {
    let basis = p.basis;
    let s = basis.structure();
    let a = s.half_dimension();
    let coeffs = basis.eval_phi_all(z);
    let moved = p.propagate_spectral(&coeffs, t);
    let deviation = |label: Complex64, constant: Complex64| -> f64 {
        let zl: Vec<Complex64> = z.iter().map(|v| v * label).collect();
        basis
            .eval_phi_all(&zl)
            .iter()
            .zip(&moved)
            .map(|(target, got)| (constant * target - got).norm())
            .fold(0.0, f64::max)
    };
    let label = Complex64::from_polar(1.0, -t);
    let constant = Complex64::from_polar(1.0, -t * a);
    let alt_label = Complex64::from_polar(1.0, t);
    let alt_constant = s.ck() * s.ck() * (-a * (I * alt_label).ln()).exp();
    let residual = deviation(label, constant);
    if residual > 1e-10 {
        return Err(Error::EigenResidual {
            index: vec![],
            residual,
            tolerance: 1e-10,
        });
    }
    Ok(CoherentImageReport {
        label,
        constant,
        residual,
        alt_label,
        alt_constant,
        alt_residual: deviation(alt_label, alt_constant),
    })
}

/// `Lambda_k(x, y; t) = (i sin t)^-(gamma+n/2) exp(-(i/2) cot t (|x|^2+|y|^2)) E_k(i x / sin t, y)`.
pub fn lambda_kernel(s: &DunklStructure, x: &[f64], y: &[f64], t: f64) -> Result<Complex64> {
    let st = t.sin();
    if st.abs() < 1e-12 {
        return Err(Error::SingularTime(t));
    }
    let a = s.half_dimension();
    let r2: f64 = x.iter().chain(y).map(|v| v * v).sum();
    let z: Vec<Complex64> = x.iter().map(|&v| I * (v / st)).collect();
    let yc: Vec<Complex64> = y.iter().map(|&v| v.into()).collect();
    let pre = (-a * (I * st).ln()).exp();
    Ok(pre * (-0.5 * I * (t.cos() / st) * r2).exp() * kernel_product(s, &z, &yc)?)
}

/// `Gamma_k(x, y; t) = (i t)^-(gamma+n/2) exp(-i (|x|^2+|y|^2) / (2t)) E_k(i x / t, y)`.
pub fn free_kernel(s: &DunklStructure, x: &[f64], y: &[f64], t: f64) -> Result<Complex64> {
    if t.abs() < 1e-12 {
        return Err(Error::SingularTime(t));
    }
    let a = s.half_dimension();
    let r2: f64 = x.iter().chain(y).map(|v| v * v).sum();
    let z: Vec<Complex64> = x.iter().map(|&v| I * (v / t)).collect();
    let yc: Vec<Complex64> = y.iter().map(|&v| v.into()).collect();
    let pre = (-a * (I * t).ln()).exp();
    Ok(pre * (-I * r2 / (2.0 * t)).exp() * kernel_product(s, &z, &yc)?)
}

/// Both sides of the tangent substitution between the two kernels:
/// `lhs = Lambda_k(x, y; arctan s)`,
/// `rhs = c_k^-1 (1+s^2)^((2 gamma+n)/4) exp(i s |x|^2/2) Gamma_k(sqrt(1+s^2) x, y; s)`.
/// They agree up to the constant [`relation_constant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRelation {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `rhs` with the opposite sign in the `|x|^2` phase.
    pub flipped_phase_rhs: Complex64,
}

/// `lhs / rhs` in [`kernel_relation_check`]: equal to `c_k`.
pub fn relation_constant(s: &DunklStructure) -> f64 {
    s.ck()
}

pub fn kernel_relation_check(s: &DunklStructure, x: &[f64], y: &[f64], sp: f64) -> Result<KernelRelation> {
    if !(sp.abs() >= 1e-3 * (1.0 - 1e-12)) {
        return Err(Error::SingularTime(sp.atan()));
    }
    let lhs = lambda_kernel(s, x, y, sp.atan())?;
    let q = 1.0 + sp * sp;
    let xs: Vec<f64> = x.iter().map(|v| v * q.sqrt()).collect();
    let g = free_kernel(s, &xs, y, sp)?;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let base = (1.0 / s.ck()) * q.powf(0.25 * (2.0 * s.gamma() + s.n() as f64)) * g;
    Ok(KernelRelation {
        lhs,
        rhs: base * (0.5 * I * sp * r2).exp(),
        flipped_phase_rhs: base * (-0.5 * I * sp * r2).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `Lambda_k`, Dunkl-Hermite flow.
    Hermite,
    /// `Gamma_k`, free Dunkl flow.
    Free,
}

/// Quadrature realization of the kernel propagators.
///
/// `decay` is the Gaussian rate `beta` with `|f(y)| <~ exp(-beta |y|^2)`;
/// it sets the width of the analyticity strip used to size the rule.
#[derive(Debug, Clone)]
pub struct KernelPropagator<'a> {
    structure: &'a DunklStructure,
    kind: KernelKind,
    decay: f64,
}

impl<'a> KernelPropagator<'a> {
    pub fn new(structure: &'a DunklStructure, kind: KernelKind, decay: f64) -> Result<Self> {
        if !(decay > 0.0) {
            return Err(Error::InvalidParameter(format!("decay rate {decay} must be positive")));
        }
        Ok(KernelPropagator { structure, kind, decay })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    fn rule(&self, chirp: f64) -> Result<QuadratureRule> {
        let delta = Complex64::new(self.decay, chirp);
        let lines = self
            .structure
            .kappa()
            .iter()
            .map(|&k| {
                let theta = delta.arg().abs();
                let v = (0.4 * (0.5 * PI - theta)).min(0.5);
                let h = 2.0 * PI * v / 40.0;
                let t_max = (2.0 + (4.0 + 200.0 * self.decay).sqrt()) / (2.0 * self.decay);
                LineRule::log_trapezoid(k, h, -40.0 / (2.0 * k + 1.0) - 2.0, t_max.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        let total: usize = lines.iter().map(LineRule::len).product();
        if total > 20_000_000 {
            return Err(Error::QuadratureAccuracy {
                estimate: total as f64,
                tolerance: 2e7,
            });
        }
        Ok(QuadratureRule::new(lines, 0.0, None))
    }

    /// `c_k int K(x, y) f(y) dw_k(y)`.
    ///
    /// For [`KernelKind::Hermite`] the kernel is `Lambda_k(x, y; -t)`, which
    /// realizes `exp(-i t H_k)` up to a unimodular constant (see
    /// [`hermite_kernel_constant`]); for [`KernelKind::Free`] it is `Gamma_k(x, y; t)`.
    pub fn propagate_kernel<F>(&self, f: F, t: f64, x: &[f64]) -> Result<Complex64>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let s = self.structure;
        let chirp = match self.kind {
            KernelKind::Hermite => {
                let dist = (t - PI * (t / PI).round()).abs();
                if dist < 1e-3 {
                    return Err(Error::SingularTime(t));
                }
                0.5 * (t.cos() / t.sin())
            }
            KernelKind::Free => {
                if t.abs() < 1e-12 {
                    return Err(Error::SingularTime(t));
                }
                0.5 / t
            }
        };
        let rule = self.rule(chirp)?;
        let mut err = None;
        let v = rule.integrate(|y| {
            let k = match self.kind {
                KernelKind::Hermite => lambda_kernel(s, x, y, -t),
                KernelKind::Free => free_kernel(s, x, y, t),
            };
            match k {
                Ok(k) => k * f(y),
                Err(e) => {
                    err.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(v * s.ck())
    }
}

/// The constant `c` with `exp(-i t H_k) f = c * propagate_kernel(f, t)` for
/// `t` in `(0, pi)`; it is `exp(-i pi (gamma + n/2))` there and the complex
/// conjugate on `(-pi, 0)`.
pub fn hermite_kernel_constant(s: &DunklStructure, t: f64) -> Complex64 {
    let c = Complex64::from_polar(1.0, -PI * s.half_dimension());
    if t.sin() > 0.0 {
        c
    } else {
        c.conj()
    }
}
