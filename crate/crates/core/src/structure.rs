//! Reflection-group data for the product group Z_2^n.

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::{tanh_sinh, LineRule, QuadratureRule};

/// Roots `sqrt(2) e_j` with multiplicities `kappa_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DunklStructure {
    n: usize,
    roots: Vec<Vec<f64>>,
    kappa: Vec<f64>,
    gamma: f64,
    ck: f64,
    l2_const: f64,
}

/// Builds the Z_2^n structure. `c_k` and the L^2 constant are computed by
/// quadrature of the weighted Gaussians.
pub fn build_structure(n: usize, kappa: &[f64]) -> Result<DunklStructure> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if kappa.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} multiplicities, got {}",
            kappa.len()
        )));
    }
    if let Some(k) = kappa.iter().find(|k| !(**k >= 0.0) || !k.is_finite()) {
        return Err(Error::InvalidParameter(format!("multiplicity {k} must be finite and >= 0")));
    }
    let roots = (0..n)
        .map(|j| {
            let mut r = vec![0.0; n];
            r[j] = SQRT_2;
            r
        })
        .collect();
    let gamma = kappa.iter().sum();
    // one-point rules already integrate constants exactly; use a few more
    let mut ck_inv = 1.0;
    let mut l2_inv = 1.0;
    for &k in kappa {
        ck_inv *= LineRule::generalized_hermite(k, 0.5, 8)?.integrate_real(|_| 1.0);
        l2_inv *= LineRule::generalized_hermite(k, 1.0, 8)?.integrate_real(|_| 1.0);
    }
    Ok(DunklStructure {
        n,
        roots,
        kappa: kappa.to_vec(),
        gamma,
        ck: 1.0 / ck_inv,
        l2_const: 1.0 / l2_inv,
    })
}

impl DunklStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positive_roots(&self) -> &[Vec<f64>] {
        &self.roots
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `c_k`, with `1/c_k = int exp(-|x|^2/2) dw_k`.
    pub fn ck(&self) -> f64 {
        self.ck
    }

    /// Constant `m_k` with `1/m_k = int exp(-|x|^2) dw_k`; the Hermite
    /// functions are orthonormal for `m_k int f conj(g) dw_k`.
    pub fn l2_const(&self) -> f64 {
        self.l2_const
    }

    /// `gamma + n/2`, the homogeneity exponent of the measure over two.
    pub fn half_dimension(&self) -> f64 {
        self.gamma + 0.5 * self.n as f64
    }

    pub fn is_classical(&self) -> bool {
        self.kappa.iter().all(|&k| k == 0.0)
    }

    /// `prod_alpha |<alpha, x>|^(2 kappa_alpha)`.
    pub fn weight_at(&self, x: &[f64]) -> f64 {
        self.kappa
            .iter()
            .zip(x)
            .map(|(&k, &t)| if k == 0.0 { 1.0 } else { (SQRT_2 * t).abs().powf(2.0 * k) })
            .product()
    }

    /// Reflection `x - <alpha_j, x> alpha_j`; for the coordinate roots this is
    /// a sign flip of `x_j`, done exactly.
    pub fn reflect(&self, j: usize, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        y[j] = -y[j];
        y
    }

    /// Tensor generalized Gauss-Hermite rule for `w_k(x) exp(-beta |x|^2)`.
    pub fn gaussian_rule(&self, beta: f64, points: usize) -> Result<QuadratureRule> {
        let lines = self
            .kappa
            .iter()
            .map(|&k| LineRule::generalized_hermite(k, beta, points))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadratureRule::new(lines, beta, Some(2 * points - 1)))
    }

    /// `sum_i w_i f(x_i)`; the rule's weights carry `w_k` and its Gaussian.
    pub fn integrate_weighted<F>(&self, f: F, rule: &QuadratureRule) -> Result<num_complex::Complex64>
    where
        F: FnMut(&[f64]) -> num_complex::Complex64,
    {
        if rule.dim() != self.n {
            return Err(Error::InvalidParameter(format!(
                "rule dimension {} does not match structure dimension {}",
                rule.dim(),
                self.n
            )));
        }
        rule.integrate(f)
    }

    /// `w_k(B(center, radius))`.
    pub fn ball_volume(&self, center: &[f64], radius: f64) -> Result<f64> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("radius {radius} must be positive")));
        }
        if center.len() != self.n {
            return Err(Error::InvalidParameter("center has the wrong dimension".into()));
        }
        Ok(ball_rec(&self.kappa, center, radius))
    }

    /// Smallest `C >= 1` with `C^-1 w <= r^n prod (|<alpha,x>| + r)^(2 kappa) <= C w`
    /// over the given `(x, r)` samples, `w = w_k(B(x, r))`.
    pub fn comparison_constant(&self, samples: &[(Vec<f64>, f64)]) -> Result<f64> {
        let mut c: f64 = 1.0;
        for (x, r) in samples {
            let vol = self.ball_volume(x, *r)?;
            let model: f64 = r.powi(self.n as i32)
                * self
                    .kappa
                    .iter()
                    .zip(x)
                    .map(|(&k, &t)| ((SQRT_2 * t).abs() + r).powf(2.0 * k))
                    .product::<f64>();
            let q = model / vol;
            c = c.max(q).max(1.0 / q);
        }
        Ok(c)
    }
}

/// `int_a^b 2^k |t|^(2k) dt`.
fn line_mass(k: f64, a: f64, b: f64) -> f64 {
    let anti = |t: f64| t.signum() * t.abs().powf(2.0 * k + 1.0) / (2.0 * k + 1.0);
    2f64.powf(k) * (anti(b) - anti(a))
}

/// Radii at which the inner volume stops being smooth as a function of its radius.
fn kink_radii(center: &[f64]) -> Vec<f64> {
    let m = center.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let s: f64 = (0..m)
            .filter(|j| mask & (1 << j) != 0)
            .map(|j| center[j] * center[j])
            .sum();
        out.push(s.sqrt());
    }
    out
}

fn ball_rec(kappa: &[f64], center: &[f64], radius: f64) -> f64 {
    let (k, c) = (kappa[0], center[0]);
    if kappa.len() == 1 {
        return line_mass(k, c - radius, c + radius);
    }
    let rest_k = &kappa[1..];
    let rest_c = &center[1..];
    let (a, b) = (c - radius, c + radius);
    let mut cuts = vec![a, b];
    if a < 0.0 && 0.0 < b {
        cuts.push(0.0);
    }
    for rho in kink_radii(rest_c) {
        if rho > 0.0 && rho < radius {
            let d = (radius * radius - rho * rho).sqrt();
            cuts.push(c - d);
            cuts.push(c + d);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15 * radius);
    let scale = 2f64.powf(k);
    let mut total = 0.0;
    for win in cuts.windows(2) {
        total += tanh_sinh(
            |t| {
                let rho2 = radius * radius - (t - c) * (t - c);
                if rho2 <= 0.0 {
                    return 0.0;
                }
                let w = if k == 0.0 { 1.0 } else { t.abs().powf(2.0 * k) };
                scale * w * ball_rec(rest_k, rest_c, rho2.sqrt())
            },
            win[0],
            win[1],
            1e-12,
        );
    }
    total
}

/// Structure section of a JSON configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureConfig {
    pub n: usize,
    pub kappa: Vec<f64>,
}

impl StructureConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: StructureConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        build_structure(self.n, &self.kappa).map(|_| ())
    }

    pub fn build(&self) -> Result<DunklStructure> {
        build_structure(self.n, &self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::reference;
    use crate::special::gamma;
    use std::f64::consts::PI;

    #[test]
    fn gamma_is_sum_of_multiplicities() {
        let s = build_structure(2, &[0.5, 1.5]).unwrap();
        assert_eq!(s.gamma(), 2.0);
        for r in s.positive_roots() {
            let norm2: f64 = r.iter().map(|v| v * v).sum();
            assert!((norm2 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_ck() {
        let s = build_structure(1, &[0.0]).unwrap();
        assert!((1.0 / s.ck() - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn ck_for_kappa_one_matches_adaptive_reference() {
        let s = build_structure(1, &[1.0]).unwrap();
        let oracle = reference::integrate_line(|t| 2.0 * t * t * (-t * t / 2.0).exp(), 1e-13);
        assert!((1.0 / s.ck() - oracle).abs() < 1e-10 * oracle);
        // closed form 2^(2k+1/2) Gamma(k+1/2)
        assert!((oracle - 2f64.powf(2.5) * gamma(1.5)).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_structure(0, &[]).is_err());
        assert!(build_structure(1, &[-1.0]).is_err());
        assert!(build_structure(2, &[1.0]).is_err());
    }

    #[test]
    fn weight_examples() {
        let s = build_structure(1, &[1.0]).unwrap();
        assert!((s.weight_at(&[2.0]) - 8.0).abs() < 1e-12);
        let s = build_structure(2, &[1.0, 0.0]).unwrap();
        assert!((s.weight_at(&[1.0, 3.0]) - 2.0).abs() < 1e-12);
        let s = build_structure(3, &[0.0; 3]).unwrap();
        assert_eq!(s.weight_at(&[0.3, -2.0, 0.0]), 1.0);
    }

    #[test]
    fn weight_is_reflection_invariant() {
        let s = build_structure(3, &[0.3, 1.0, 2.5]).unwrap();
        let x = [0.7, -1.2, 0.4];
        for j in 0..3 {
            assert_eq!(s.weight_at(&s.reflect(j, &x)), s.weight_at(&x));
        }
    }

    #[test]
    fn integrate_weighted_examples() {
        let s = build_structure(1, &[0.0]).unwrap();
        let rule = s.gaussian_rule(0.5, 20).unwrap();
        let one = s.integrate_weighted(|_| 1.0.into(), &rule).unwrap();
        let x2 = s.integrate_weighted(|x| (x[0] * x[0]).into(), &rule).unwrap();
        assert!((one.re - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((x2.re - (2.0 * PI).sqrt()).abs() < 1e-12);

        let s = build_structure(1, &[0.5]).unwrap();
        let rule = s.gaussian_rule(0.5, 20).unwrap();
        let v = s.integrate_weighted(|_| 1.0.into(), &rule).unwrap().re;
        let oracle = reference::integrate_line(|t| SQRT_2 * t.abs() * (-t * t / 2.0).exp(), 1e-13);
        assert!((v - oracle).abs() < 1e-9 * oracle);
    }

    #[test]
    fn ball_volume_examples() {
        let s = build_structure(1, &[0.0]).unwrap();
        assert!((s.ball_volume(&[0.0], 1.0).unwrap() - 2.0).abs() < 1e-14);
        let s = build_structure(1, &[1.0]).unwrap();
        assert!((s.ball_volume(&[0.0], 1.0).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        let ratio = s.ball_volume(&[2.0], 1.0).unwrap() / s.ball_volume(&[1.0], 0.5).unwrap();
        assert!((ratio - 8.0).abs() < 1e-10);
        assert!(s.ball_volume(&[0.0], 0.0).is_err());
    }

    #[test]
    fn disc_volume_classical() {
        let s = build_structure(2, &[0.0, 0.0]).unwrap();
        let v = s.ball_volume(&[0.3, -0.2], 1.0).unwrap();
        assert!((v - PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn disc_volume_scaling_with_weight() {
        let s = build_structure(2, &[0.5, 1.0]).unwrap();
        let x = [0.4, -0.3];
        let v1 = s.ball_volume(&x, 0.6).unwrap();
        let v2 = s.ball_volume(&[0.8, -0.6], 1.2).unwrap();
        let expect = 2f64.powf(2.0 * s.gamma() + 2.0);
        assert!((v2 / v1 - expect).abs() < 1e-7 * expect, "{} {}", v2 / v1, expect);
    }

    #[test]
    fn config_round_trip() {
        let cfg = StructureConfig::from_json(r#"{"n": 2, "kappa": [0.5, 1.0]}"#).unwrap();
        assert_eq!(cfg.build().unwrap().gamma(), 1.5);
        assert!(StructureConfig::from_json(r#"{"n": 1, "kappa": [-1.0]}"#).is_err());
    }
}
