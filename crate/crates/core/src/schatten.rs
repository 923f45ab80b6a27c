//! Trial operators `gamma_eps = sum_nu eps^(2|nu|) |h_nu><h_nu|`, their
//! densities, Schatten norms and mixed norms, and the ratio scan.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::basis::HermiteBasis;
use crate::error::{Error, Result};
use crate::hermite::HermiteFunctionEvaluator;
use crate::poly::total_degree;
use crate::propagators::SpectralPropagator;
use crate::quadrature::LineRule;
use crate::rank1;
use crate::special::binomial;
use crate::structure::DunklStructure;

/// Tail tolerance used to pick the truncation degree.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct GammaEpsOperator {
    structure: DunklStructure,
    eps: f64,
    truncation: usize,
}

/// Smallest `L` with `sum_{l > L} binom(l+n-1, n-1) q^l < tol`.
fn truncation_degree(n: usize, q: f64, tol: f64) -> usize {
    // successive term ratios (l+n)/(l+1) q decrease, so the tail after L is
    // at most t_{L+1} / (1 - ratio_{L+1})
    let mut l = 0usize;
    let mut term = 1.0; // t_0
    loop {
        let ratio = (l + n) as f64 / (l + 1) as f64 * q;
        let next = term * ratio;
        if ratio < 1.0 {
            let next_ratio = (l + 1 + n) as f64 / (l + 2) as f64 * q;
            if next / (1.0 - next_ratio) < tol {
                return l;
            }
        }
        term = next;
        l += 1;
    }
}

pub fn gamma_eps(s: &DunklStructure, eps: f64) -> Result<GammaEpsOperator> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} must lie in (0, 1)")));
    }
    Ok(GammaEpsOperator {
        structure: s.clone(),
        eps,
        truncation: truncation_degree(s.n(), eps * eps, TAIL_TOLERANCE),
    })
}

impl GammaEpsOperator {
    pub fn structure(&self) -> &DunklStructure {
        &self.structure
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `eps^(2l)` on the degree-`l` eigenspace.
    pub fn eigenvalue(&self, l: usize) -> f64 {
        (self.eps * self.eps).powi(l as i32)
    }

    pub fn multiplicity(&self, l: usize) -> f64 {
        let n = self.structure.n();
        binomial(l + n - 1, n - 1)
    }

    pub fn operator_norm(&self) -> f64 {
        1.0
    }

    /// Truncated trace.
    pub fn trace(&self) -> f64 {
        self.power_sum(1.0)
    }

    fn power_sum(&self, r: f64) -> f64 {
        let q = (self.eps * self.eps).powf(r);
        let mut acc = 0.0;
        let mut ql = 1.0;
        for l in 0..=self.truncation {
            acc += self.multiplicity(l) * ql;
            ql *= q;
        }
        acc
    }

    /// `(sum_l binom(l+n-1, n-1) eps^(2 r l))^(1/r)`, truncated.
    pub fn schatten_norm(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::InvalidParameter(format!("Schatten exponent {r} must be >= 1")));
        }
        Ok(self.power_sum(r).powf(1.0 / r))
    }

    /// `(1 - eps^(2r))^(-n/r)`.
    pub fn schatten_closed(&self, r: f64) -> f64 {
        (1.0 - (self.eps * self.eps).powf(r)).powf(-(self.structure.n() as f64) / r)
    }

    /// One-coordinate factor of the density for multiplicity `kappa`.
    fn density_factor(&self, kappa: f64, x: f64) -> f64 {
        let e2 = self.eps * self.eps;
        let e4 = e2 * e2;
        let sigma = 1.0 - e2;
        let a = 2.0 * e2 * x * x / (1.0 - e4);
        (1.0 - e4).powf(-(kappa + 0.5)) * (-x * x * sigma / (1.0 + e2)).exp() * rank1::scaled_real(kappa, a)
    }

    /// Closed form
    /// `(1-eps^4)^-(gamma+n/2) exp(-(1+eps^4)/(1-eps^4) |x|^2) E_k(2 eps^2 x / (1-eps^4), x)`,
    /// evaluated with the Gaussian and kernel growth combined per coordinate.
    /// The density does not depend on `t`.
    pub fn density_eval(&self, x: &[f64], _t: f64) -> f64 {
        self.structure
            .kappa()
            .iter()
            .zip(x)
            .map(|(&k, &xi)| self.density_factor(k, xi))
            .product()
    }

    /// `sum_{|nu| <= N} eps^(2|nu|) h_nu(x)^2` over the basis.
    pub fn density_spectral(&self, basis: &HermiteBasis, x: &[f64]) -> f64 {
        let e2 = self.eps * self.eps;
        let h = HermiteFunctionEvaluator::new(basis).all_functions(x);
        basis
            .indices()
            .iter()
            .zip(h)
            .map(|(nu, v)| e2.powi(total_degree(nu) as i32) * v * v)
            .sum()
    }

    /// `sum eps^(2|nu|) |exp(-i t mu_nu) h_nu(x)|^2`.
    pub fn density_propagated(&self, basis: &HermiteBasis, x: &[f64], t: f64) -> f64 {
        let e2 = self.eps * self.eps;
        let h: Vec<Complex64> = HermiteFunctionEvaluator::new(basis)
            .all_functions(x)
            .into_iter()
            .map(Complex64::from)
            .collect();
        let moved = SpectralPropagator::new(basis).propagate_spectral(&h, t);
        basis
            .indices()
            .iter()
            .zip(moved)
            .map(|(nu, v)| e2.powi(total_degree(nu) as i32) * v.norm_sqr())
            .sum()
    }

    /// `int rho_j^p 2^k |t|^(2k) dt` with the rule step `h`.
    fn factor_integral(&self, kappa: f64, p: f64, h: f64) -> Result<f64> {
        let e2 = self.eps * self.eps;
        let sigma = 1.0 - e2;
        let t_max = (50.0 * (1.0 + e2) / (p * sigma)).sqrt();
        let t_small = (2.0 * sigma).sqrt().min(1.0);
        let s_min = t_small.ln() - 40.0 / (2.0 * kappa + 1.0);
        let rule = LineRule::log_trapezoid(kappa, h, s_min, t_max.ln())?;
        let v = rule.integrate_real(|t| self.density_factor(kappa, t).powf(p));
        if !v.is_finite() {
            return Err(Error::NonFinite { node: vec![] });
        }
        Ok(v)
    }

    /// `pi^(1/q) (m_k int rho^p dw_k)^(1/p)`, the time-independent density
    /// integrated over an interval of length `pi`.
    ///
    /// Each coordinate integral uses a trapezoid rule in `ln|x|`; halving the
    /// step gives the error estimate, which must stay below 1e-6 relative.
    pub fn mixed_norm(&self, p: f64, q: f64) -> Result<MixedNorm> {
        if !(p >= 1.0 && q >= 1.0) {
            return Err(Error::InvalidParameter(format!("exponents p={p}, q={q} must be >= 1")));
        }
        let h = 2.0 * PI * 0.3 / 40.0;
        let mut fine = self.structure.l2_const();
        let mut coarse = fine;
        for &k in self.structure.kappa() {
            fine *= self.factor_integral(k, p, h)?;
            coarse *= self.factor_integral(k, p, 2.0 * h)?;
        }
        let rel = ((fine - coarse) / fine).abs();
        if rel > 1e-6 {
            return Err(Error::QuadratureAccuracy {
                estimate: rel,
                tolerance: 1e-6,
            });
        }
        Ok(MixedNorm {
            value: PI.powf(1.0 / q) * fine.powf(1.0 / p),
            lp_integral: fine,
            error_estimate: rel,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNorm {
    pub value: f64,
    /// `m_k int rho^p dw_k`.
    pub lp_integral: f64,
    /// Relative difference between step `h` and `2h`.
    pub error_estimate: f64,
}

/// One row of a ratio scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub epsilon: f64,
    pub sigma: f64,
    pub lp_norm: f64,
    pub schatten_r_norm: f64,
    pub ratio: f64,
    pub log_ratio: f64,
}

/// Result of a scan over the epsilon grid for one Schatten exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurve {
    pub r: f64,
    pub rows: Vec<RatioRow>,
    /// Grid points that failed, with the error text.
    pub failures: Vec<(f64, String)>,
}

/// `R(eps) = mixed_norm / schatten_norm` for each `eps^2` of the grid.
///
/// Grid points are independent and run in parallel; rows keep grid order.
pub fn ratio_curve(s: &DunklStructure, p: f64, q: f64, r: f64, eps2_grid: &[f64]) -> RatioCurve {
    let outcomes: Vec<std::result::Result<RatioRow, String>> = eps2_grid
        .par_iter()
        .map(|&e2| ratio_point(s, p, q, r, e2).map_err(|e| e.to_string()))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (&e2, o) in eps2_grid.iter().zip(outcomes) {
        match o {
            Ok(row) => rows.push(row),
            Err(msg) => failures.push((e2, msg)),
        }
    }
    RatioCurve { r, rows, failures }
}

fn ratio_point(s: &DunklStructure, p: f64, q: f64, r: f64, e2: f64) -> Result<RatioRow> {
    let g = gamma_eps(s, e2.sqrt())?;
    let m = g.mixed_norm(p, q)?;
    let sn = g.schatten_norm(r)?;
    let ratio = m.value / sn;
    Ok(RatioRow {
        epsilon: g.epsilon(),
        sigma: 1.0 - e2,
        lp_norm: m.value,
        schatten_r_norm: sn,
        ratio,
        log_ratio: ratio.ln(),
    })
}

impl RatioCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,sigma,Lp_norm,schatten_r_norm,ratio,log_ratio\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:.12},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                row.epsilon, row.sigma, row.lp_norm, row.schatten_r_norm, row.ratio, row.log_ratio
            );
        }
        out
    }
}

/// Least-squares slope of `log R` against `log(1/(1-eps^2))` over rows with
/// `eps^2 >= 0.9`, with its standard error.
pub fn fit_slope(rows: &[RatioRow]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon * r.epsilon >= 0.9 - 1e-12)
        .map(|r| ((1.0 / r.sigma).ln(), r.log_ratio))
        .collect();
    if pts.len() < 5 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 5 rows with eps^2 >= 0.9, got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-12 {
        return Err(Error::DegenerateGrid("all abscissae coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if pts.len() > 2 {
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// Admissibility of an exponent triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleFlags {
    /// `2 gamma < n (p+1)/(p-1)`: the threshold exponent is finite and positive.
    pub threshold_defined: bool,
    /// `2/q + (2 gamma + n)/p = 2 gamma + n`, when `q` was given.
    pub on_scaling_line: Option<bool>,
    /// `2 gamma (p-1) < n`: the trial family's growth rate is sharp.
    pub sharp_regime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub r_star: Option<f64>,
    /// `q` on the scaling line for this `p`.
    pub scaling_q: Option<f64>,
    pub predicted_slope: Option<f64>,
    pub flags: AdmissibleFlags,
}

/// `((p+1) n - (p-1) 2 gamma) / (2p) - n / r`.
pub fn predicted_slope(p: f64, n: usize, gamma: f64, r: f64) -> f64 {
    let n = n as f64;
    ((p + 1.0) * n - (p - 1.0) * 2.0 * gamma) / (2.0 * p) - n / r
}

/// Threshold arithmetic: `r* = 2pn / ((p+1) n - (p-1) 2 gamma)`, scaling-line `q`
/// and, for given `r`, the predicted growth exponent of the ratio.
pub fn threshold(p: f64, n: usize, gamma: f64, q: Option<f64>, r: Option<f64>) -> Result<Threshold> {
    if !(p >= 1.0) || n == 0 || !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1, n >= 1, gamma >= 0 (got {p}, {n}, {gamma})")));
    }
    let nf = n as f64;
    let denom = (p + 1.0) * nf - (p - 1.0) * 2.0 * gamma;
    let threshold_defined = denom > 0.0;
    let r_star = threshold_defined.then(|| 2.0 * p * nf / denom);
    let scaling_q = (p > 1.0).then(|| 2.0 * p / ((2.0 * gamma + nf) * (p - 1.0)));
    let on_scaling_line = q.map(|q| {
        let lhs = 2.0 / q + (2.0 * gamma + nf) / p;
        (lhs - (2.0 * gamma + nf)).abs() <= 1e-12 * (2.0 * gamma + nf)
    });
    Ok(Threshold {
        r_star,
        scaling_q,
        predicted_slope: r.map(|r| predicted_slope(p, n, gamma, r)),
        flags: AdmissibleFlags {
            threshold_defined,
            on_scaling_line,
            sharp_regime: 2.0 * gamma * (p - 1.0) < nf,
        },
    })
}

/// For `2/q + (2 gamma+n)/p >= 2 gamma+n`, the `beta` in `(0, 1]` with
/// `2 beta / q + (2 gamma+n)/p = 2 gamma+n`, so that `(p, q/beta)` lies on the line.
pub fn scaling_beta(p: f64, q: f64, n: usize, gamma: f64) -> Option<f64> {
    let d = 2.0 * gamma + n as f64;
    let beta = q * d * (1.0 - 1.0 / p) / 2.0;
    (beta > 0.0 && beta <= 1.0 + 1e-15).then_some(beta)
}
