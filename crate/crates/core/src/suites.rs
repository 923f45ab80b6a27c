//! Identity suites: each checks one family of identities on seeded random
//! samples and records the worst residual.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::basis::{degree_cutoff, orthonormal_basis, HermiteBasis};
use crate::error::{Error, Result};
use crate::fock::{chaotic_transform, coherent_state, resolution_check};
use crate::hermite::HermiteFunctionEvaluator;
use crate::kernels::{gaussian_pairing, kernel_product, KernelEvaluator};
use crate::operators::{dunkl_apply, dunkl_pairing};
use crate::poly::{indices_of_degree, total_degree, Polynomial};
use crate::propagators::{
    coherent_image, hermite_kernel_constant, kernel_relation_check, relation_constant, KernelKind,
    KernelPropagator, SpectralPropagator,
};
use crate::schatten::gamma_eps;
use crate::special::gamma;
use crate::structure::DunklStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Structure,
    Pairing,
    Kernel,
    Gaussian,
    Eigen,
    Generating,
    Mehler,
    Orthonormal,
    Chaotic,
    Resolution,
    Coherent,
    Propagator,
    Relation,
    Spectral,
    Trace,
    Density,
}

impl Suite {
    pub const ALL: [Suite; 16] = [
        Suite::Structure,
        Suite::Pairing,
        Suite::Kernel,
        Suite::Gaussian,
        Suite::Eigen,
        Suite::Generating,
        Suite::Mehler,
        Suite::Orthonormal,
        Suite::Chaotic,
        Suite::Resolution,
        Suite::Coherent,
        Suite::Propagator,
        Suite::Relation,
        Suite::Spectral,
        Suite::Trace,
        Suite::Density,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Pairing => "pairing",
            Suite::Kernel => "kernel",
            Suite::Gaussian => "gaussian",
            Suite::Eigen => "eigen",
            Suite::Generating => "generating",
            Suite::Mehler => "mehler",
            Suite::Orthonormal => "orthonormal",
            Suite::Chaotic => "chaotic",
            Suite::Resolution => "resolution",
            Suite::Coherent => "coherent",
            Suite::Propagator => "propagator",
            Suite::Relation => "relation",
            Suite::Spectral => "spectral",
            Suite::Trace => "trace",
            Suite::Density => "density",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub first_failure: Option<String>,
    /// Set when the suite does not apply to this structure.
    pub skipped: Option<String>,
}

struct Tally {
    suite: Suite,
    tolerance: f64,
    cases: usize,
    max: f64,
    first_failure: Option<String>,
    skipped: Option<String>,
}

impl Tally {
    fn new(suite: Suite, tolerance: f64) -> Self {
        Tally {
            suite,
            tolerance,
            cases: 0,
            max: 0.0,
            first_failure: None,
            skipped: None,
        }
    }

    fn record(&mut self, residual: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        if residual.is_nan() || residual > self.tolerance {
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{}: residual {residual:.3e}", case()));
            }
        }
        self.max = if residual.is_nan() { f64::INFINITY } else { self.max.max(residual) };
    }

    fn error(&mut self, e: Error, case: impl FnOnce() -> String) {
        self.cases += 1;
        self.max = f64::INFINITY;
        if self.first_failure.is_none() {
            self.first_failure = Some(format!("{}: {e}", case()));
        }
    }

    fn check(&mut self, r: Result<f64>, case: impl FnOnce() -> String) {
        match r {
            Ok(v) => self.record(v, case),
            Err(e) => self.error(e, case),
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            suite: self.suite,
            cases: self.cases,
            max_residual: self.max,
            tolerance: self.tolerance,
            passed: self.first_failure.is_none(),
            first_failure: self.first_failure,
            skipped: self.skipped,
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Bases shared by the suites: `full` at the dimension cutoff, `small` of
/// degree 8 for quadrature-based checks.
pub struct SuiteContext {
    pub structure: DunklStructure,
    pub full: HermiteBasis,
    pub small: HermiteBasis,
    pub seed: u64,
}

impl SuiteContext {
    pub fn new(structure: &DunklStructure, seed: u64) -> Result<Self> {
        let full = orthonormal_basis(structure, degree_cutoff(structure.n()))?;
        let small = orthonormal_basis(structure, 8.min(degree_cutoff(structure.n())))?;
        Ok(SuiteContext {
            structure: structure.clone(),
            full,
            small,
            seed,
        })
    }

    fn rng(&self, suite: Suite) -> StdRng {
        StdRng::seed_from_u64(self.seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub fn run(&self, suite: Suite) -> SuiteOutcome {
        let mut rng = self.rng(suite);
        match suite {
            Suite::Structure => self.structure_suite(&mut rng),
            Suite::Pairing => self.pairing_suite(&mut rng),
            Suite::Kernel => self.kernel_suite(&mut rng),
            Suite::Gaussian => self.gaussian_suite(&mut rng),
            Suite::Eigen => self.eigen_suite(),
            Suite::Generating => self.generating_suite(&mut rng),
            Suite::Mehler => self.mehler_suite(&mut rng),
            Suite::Orthonormal => self.orthonormal_suite(),
            Suite::Chaotic => self.chaotic_suite(),
            Suite::Resolution => self.resolution_suite(&mut rng),
            Suite::Coherent => self.coherent_suite(&mut rng),
            Suite::Propagator => self.propagator_suite(&mut rng),
            Suite::Relation => self.relation_suite(&mut rng),
            Suite::Spectral => self.spectral_suite(),
            Suite::Trace => self.trace_suite(),
            Suite::Density => self.density_suite(&mut rng),
        }
    }

    fn n(&self) -> usize {
        self.structure.n()
    }

    /// Sample radii shrink when the dimension cutoff is low, so the
    /// truncated series stay converged.
    fn scale(&self) -> f64 {
        if self.full.max_degree() >= 60 {
            1.0
        } else {
            0.35
        }
    }

    fn real_point(&self, rng: &mut StdRng, radius: f64) -> Vec<f64> {
        let radius = radius * self.scale();
        (0..self.n()).map(|_| rng.gen_range(-radius..radius)).collect()
    }

    fn complex_point(&self, rng: &mut StdRng, radius: f64) -> Vec<Complex64> {
        let radius = radius * self.scale();
        (0..self.n())
            .map(|_| Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)))
            .collect()
    }

    /// Normalizing constant against its closed form, and the ball-volume
    /// scaling law on random balls.
    fn structure_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let s = &self.structure;
        let mut t = Tally::new(Suite::Structure, 1e-6);
        let closed: f64 = s
            .kappa()
            .iter()
            .map(|&k| 2f64.powf(k) * 2f64.powf(k + 0.5) * gamma(k + 0.5))
            .product();
        t.record((s.ck() * closed - 1.0).abs(), || "c_k closed form".into());
        for _ in 0..20 {
            let x = self.real_point(rng, 1.5);
            let r = rng.gen_range(0.1..1.0);
            let d = rng.gen_range(0.5..2.5);
            let dx: Vec<f64> = x.iter().map(|v| v * d).collect();
            let res = s.ball_volume(&x, r).and_then(|v0| {
                let v1 = s.ball_volume(&dx, d * r)?;
                Ok((v1 - d.powf(2.0 * s.gamma() + self.n() as f64) * v0).abs() / v1)
            });
            t.check(res, || format!("scaling x={x:?} r={r} delta={d}"));
        }
        t.finish()
    }

    /// Commutativity of the Dunkl operators and the adjointness
    /// `[x_j p, q] = [p, T_j q]` of the pairing, on random polynomials.
    fn pairing_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let s = &self.structure;
        let n = self.n();
        let mut t = Tally::new(Suite::Pairing, 1e-10);
        let random_poly = |rng: &mut StdRng, deg: usize| {
            let mut p = Polynomial::zero(n);
            for l in 0..=deg {
                for nu in indices_of_degree(n, l) {
                    p.add_term(nu, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
                }
            }
            p
        };
        for case in 0..10 {
            let p = random_poly(rng, 5);
            let q = random_poly(rng, 6);
            for i in 0..n {
                for j in 0..n {
                    let res = (|| {
                        let a = dunkl_apply(s, i, &dunkl_apply(s, j, &p)?)?;
                        let b = dunkl_apply(s, j, &dunkl_apply(s, i, &p)?)?;
                        Ok(a.distance(&b) / a.max_abs_coeff().max(1.0))
                    })();
                    t.check(res, || format!("commutator case {case} ({i},{j})"));
                }
                let res = (|| {
                    let xp = p.times_coordinate(i);
                    let l = dunkl_pairing(s, &xp, &q)?;
                    let r = dunkl_pairing(s, &p, &dunkl_apply(s, i, &q)?)?;
                    Ok((l - r).norm() / l.norm().max(r.norm()).max(1.0))
                })();
                t.check(res, || format!("adjointness case {case} coordinate {i}"));
            }
        }
        t.finish()
    }

    /// Truncated series against the rank-one product on small arguments.
    fn kernel_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let ev = KernelEvaluator::new(&self.full);
        let mut t = Tally::new(Suite::Kernel, 1e-9);
        for _ in 0..50 {
            let z = self.complex_point(rng, 1.0);
            let w = self.complex_point(rng, 1.0);
            let res = (|| {
                let a = ev.dunkl_kernel(&z, &w)?.value;
                let b = kernel_product(&self.structure, &z, &w)?;
                Ok(rel(a, b))
            })();
            t.check(res, || format!("z={z:?} w={w:?}"));
        }
        t.finish()
    }

    /// Gaussian pairing at `delta = 1/2` and on a complex `delta` grid.
    fn gaussian_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let ev = KernelEvaluator::new(&self.full);
        let mut t = Tally::new(Suite::Gaussian, 1e-8);
        let mut deltas = vec![Complex64::new(0.5, 0.0)];
        for re in [0.3, 0.7, 1.2, 2.0] {
            for im in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                deltas.push(Complex64::new(re, im));
            }
        }
        for delta in deltas {
            for _ in 0..2 {
                let z = self.complex_point(rng, 0.8);
                let w = self.complex_point(rng, 0.8);
                let res = gaussian_pairing(&ev, delta, &z, &w).map(|(a, b)| rel(a, b));
                t.check(res, || format!("delta={delta} z={z:?} w={w:?}"));
            }
        }
        t.finish()
    }

    /// Exact eigenrelation for `|nu| <= 8`.
    fn eigen_suite(&self) -> SuiteOutcome {
        let hev = HermiteFunctionEvaluator::new(&self.small);
        let mut t = Tally::new(Suite::Eigen, 1e-10);
        for nu in self.small.indices() {
            let expect = total_degree(nu) as f64 + self.structure.half_dimension();
            let res = hev.eigen_check(nu).map(|lambda| (lambda - expect).abs() / expect);
            t.check(res, || format!("nu={nu:?}"));
        }
        if self.structure.is_classical() && self.n() == 1 {
            let res = hev.eigen_check(&[0]).map(|l| if l == 0.5 { 0.0 } else { f64::INFINITY });
            t.check(res, || "ground eigenvalue exactly 1/2".into());
        }
        t.finish()
    }

    fn generating_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let hev = HermiteFunctionEvaluator::new(&self.full);
        let mut t = Tally::new(Suite::Generating, 1e-8);
        for _ in 0..20 {
            let z = self.complex_point(rng, 0.8);
            let w = self.complex_point(rng, 0.8);
            let res = hev.generating_function_check(&z, &w).map(|(a, b)| rel(a, b));
            t.check(res, || format!("z={z:?} w={w:?}"));
        }
        t.finish()
    }

    fn mehler_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let hev = HermiteFunctionEvaluator::new(&self.full);
        let mut t = Tally::new(Suite::Mehler, 1e-8);
        for _ in 0..20 {
            let r = Complex64::from_polar(rng.gen_range(0.0..0.7 * self.scale()), rng.gen_range(-PI..PI));
            let x = self.real_point(rng, 1.5 / (self.n() as f64).sqrt());
            let y = self.real_point(rng, 1.5 / (self.n() as f64).sqrt());
            let res = hev.mehler_eval(r, &x, &y).map(|(a, b)| rel(a, b));
            t.check(res, || format!("r={r} x={x:?} y={y:?}"));
        }
        t.finish()
    }

    fn small_rule(&self) -> Result<crate::quadrature::QuadratureRule> {
        self.structure.gaussian_rule(1.0, 12)
    }

    /// `m_k int h_mu h_nu dw_k = delta_{mu nu}` by quadrature.
    fn orthonormal_suite(&self) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Orthonormal, 1e-8);
        let rule = match self.small_rule() {
            Ok(r) => r,
            Err(e) => {
                t.error(e, || "rule".into());
                return t.finish();
            }
        };
        let hev = HermiteFunctionEvaluator::new(&self.small);
        let len = self.small.len();
        let mut gram = vec![0.0; len * len];
        rule.for_each(|x, w| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let h = hev.all_functions(x);
            let w = w * r2.exp();
            for i in 0..len {
                for j in 0..len {
                    gram[i * len + j] += h[i] * h[j] * w;
                }
            }
        });
        let m = self.structure.l2_const();
        for i in 0..len {
            for j in 0..len {
                let target = if i == j { 1.0 } else { 0.0 };
                t.record((gram[i * len + j] * m - target).abs(), || format!("entry ({i},{j})"));
            }
        }
        t.finish()
    }

    /// `C_k h_nu = phi_nu`: the transform of each `h_nu` is a unit vector.
    fn chaotic_suite(&self) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Chaotic, 1e-8);
        let rule = match self.small_rule() {
            Ok(r) => r,
            Err(e) => {
                t.error(e, || "rule".into());
                return t.finish();
            }
        };
        let hev = HermiteFunctionEvaluator::new(&self.small);
        for (i, nu) in self.small.indices().iter().enumerate() {
            let res = chaotic_transform(&self.small, |x| hev.all_functions(x)[i].into(), &rule).map(|c| {
                c.coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, a)| (a - if i == j { 1.0 } else { 0.0 }).norm())
                    .fold(0.0, f64::max)
            });
            t.check(res, || format!("nu={nu:?}"));
        }
        t.finish()
    }

    fn resolution_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Resolution, 1e-8);
        let rule = match self.small_rule() {
            Ok(r) => r,
            Err(e) => {
                t.error(e, || "rule".into());
                return t.finish();
            }
        };
        let len = self.small.len();
        for case in 0..5 {
            let mut coeffs = || -> Vec<Complex64> {
                let mut v = vec![Complex64::new(0.0, 0.0); len];
                for _ in 0..6 {
                    let i = rng.gen_range(0..len);
                    v[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
                v
            };
            let f = coeffs();
            let g = coeffs();
            let res = resolution_check(&self.small, &f, &g, &rule).map(|(a, b)| (a - b).norm() / a.norm().max(1.0));
            t.check(res, || format!("case {case}"));
        }
        t.finish()
    }

    /// Pointwise coherent states against their coefficient sums, and the
    /// image of a coherent state under the flow.
    fn coherent_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Coherent, 1e-9);
        let prop = SpectralPropagator::new(&self.full);
        for case in 0..5 {
            let z = self.complex_point(rng, 0.6);
            let w = Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
            match coherent_state(&self.full, &z, w) {
                Ok(f) => {
                    for _ in 0..3 {
                        let x = self.real_point(rng, 1.2);
                        let res = f.pointwise(&self.full, &x).map(|a| rel(a, f.pointwise_from_coefficients(&self.full, &x)));
                        t.check(res, || format!("case {case} z={z:?} x={x:?}"));
                    }
                }
                Err(e) => t.error(e, || format!("case {case} z={z:?}")),
            }
            let time = rng.gen_range(-3.0..3.0);
            let res = coherent_image(&prop, &z, time).map(|r| r.residual);
            t.check(res, || format!("image z={z:?} t={time}"));
        }
        t.finish()
    }

    /// Kernel-form flow against the spectral flow on a random combination
    /// of low-degree Hermite functions.
    fn propagator_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Propagator, 1e-7);
        if self.n() > 2 {
            t.skipped = Some("kernel quadrature is limited to n <= 2".into());
            return t.finish();
        }
        let basis = &self.small;
        let hev = HermiteFunctionEvaluator::new(basis);
        let prop = SpectralPropagator::new(basis);
        let kp = match KernelPropagator::new(&self.structure, KernelKind::Hermite, 0.5) {
            Ok(k) => k,
            Err(e) => {
                t.error(e, || "propagator".into());
                return t.finish();
            }
        };
        let low = basis.degree_range(0).start..basis.degree_range(2.min(basis.max_degree())).end;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        for c in &mut coeffs[low] {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let synth = |a: &[Complex64], x: &[f64]| -> Complex64 {
            hev.all_functions(x).iter().zip(a).map(|(h, c)| c * h).sum()
        };
        let (times, points) = if self.n() == 1 { (4, 3) } else { (2, 1) };
        for _ in 0..times {
            let time = loop {
                let v: f64 = rng.gen_range(-3.0..3.0);
                if (v - PI * (v / PI).round()).abs() > 0.2 {
                    break v;
                }
            };
            let moved = prop.propagate_spectral(&coeffs, time);
            for _ in 0..points {
                let x = self.real_point(rng, 1.2);
                let res = kp.propagate_kernel(|y| synth(&coeffs, y), time, &x).map(|v| {
                    let got = hermite_kernel_constant(&self.structure, time) * v;
                    let expect = synth(&moved, &x);
                    (got - expect).norm() / expect.norm().max(1.0)
                });
                t.check(res, || format!("t={time} x={x:?}"));
            }
        }
        t.finish()
    }

    /// Substitution relation between the two kernels.
    fn relation_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Relation, 1e-8);
        let c = relation_constant(&self.structure);
        for _ in 0..30 {
            let x = self.real_point(rng, 1.5);
            let y = self.real_point(rng, 1.5);
            let mag = 10f64.powf(rng.gen_range(-3.0..5f64.log10()));
            let sp = if rng.gen_bool(0.5) { mag } else { -mag };
            let res = kernel_relation_check(&self.structure, &x, &y, sp).map(|r| rel(r.lhs, r.rhs * c));
            t.check(res, || format!("x={x:?} y={y:?} s={sp}"));
        }
        t.finish()
    }

    /// Truncated Schatten sums against the closed form, and the trace
    /// against the integrated density.
    fn spectral_suite(&self) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Spectral, 1e-10);
        for e2 in [0.1, 0.5, 0.9, 0.99, 0.998001] {
            let eps = f64::sqrt(e2);
            let g = match gamma_eps(&self.structure, eps) {
                Ok(g) => g,
                Err(e) => {
                    t.error(e, || format!("eps^2={e2}"));
                    continue;
                }
            };
            for r in [1.0, 1.5, 2.0, 4.0] {
                let res = g.schatten_norm(r).map(|v| (v / g.schatten_closed(r) - 1.0).abs());
                t.check(res, || format!("eps^2={e2} r={r}"));
            }
        }
        t.finish()
    }

    /// Trace against `m_k int rho dw_k` by quadrature.
    fn trace_suite(&self) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Trace, 1e-7);
        for e2 in [0.1, 0.5, 0.9, 0.99, 0.998001] {
            let res = gamma_eps(&self.structure, f64::sqrt(e2))
                .and_then(|g| Ok((g.mixed_norm(1.0, 1.0)?.lp_integral / g.trace() - 1.0).abs()));
            t.check(res, || format!("eps^2={e2}"));
        }
        t.finish()
    }

    /// Closed density against the spectral and propagated sums.
    fn density_suite(&self, rng: &mut StdRng) -> SuiteOutcome {
        let mut t = Tally::new(Suite::Density, 1e-8);
        let e2 = if self.scale() < 1.0 { 0.1 } else { 0.5 };
        let g = match gamma_eps(&self.structure, f64::sqrt(e2)) {
            Ok(g) => g,
            Err(e) => {
                t.error(e, || "operator".into());
                return t.finish();
            }
        };
        let times = [0.0, 0.4, 1.3, 2.9, -2.2];
        for _ in 0..20 {
            let x = self.real_point(rng, 1.5);
            let closed = g.density_eval(&x, 0.0);
            let spectral = g.density_spectral(&self.full, &x);
            t.record((closed - spectral).abs() / closed, || format!("spectral x={x:?}"));
            for &time in &times {
                let moved = g.density_propagated(&self.full, &x, time);
                t.record((moved - closed).abs() / closed, || format!("propagated x={x:?} t={time}"));
            }
        }
        t.finish()
    }
}

/// Run `suites` (all when empty) in order.
pub fn run_suites(structure: &DunklStructure, suites: &[Suite], seed: u64) -> Result<Vec<SuiteOutcome>> {
    let ctx = SuiteContext::new(structure, seed)?;
    let list: &[Suite] = if suites.is_empty() { &Suite::ALL } else { suites };
    Ok(list.iter().map(|&s| ctx.run(s)).collect())
}
