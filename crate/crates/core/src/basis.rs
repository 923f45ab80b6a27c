//! Orthonormal basis `phi_nu` of the polynomial space under `[., .]_k` and
//! the generalized Hermite polynomials `H_nu`.

use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::operators::{apply_multi, dunkl_laplacian};
use crate::poly::{indices_of_degree, power_tables, total_degree, MultiIndex, Polynomial};
use crate::structure::DunklStructure;

/// Largest total degree accepted by [`orthonormal_basis`] in dimension `n`.
pub fn degree_cutoff(n: usize) -> usize {
    match n {
        1 => 100,
        2 => 80,
        3 => 16,
        _ => 8,
    }
}

/// Tables of `phi_nu` and `H_nu` for `|nu| <= max_degree`, in graded-lex order.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    structure: DunklStructure,
    max_degree: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
    degree_start: Vec<usize>,
    phi: Vec<Polynomial>,
    hermite: Vec<Polynomial>,
}

/// Gram-Schmidt (modified, with one reorthogonalization pass) on the
/// monomials of each degree, then `H_nu` from the finite Laplacian sum.
pub fn orthonormal_basis(s: &DunklStructure, max_degree: usize) -> Result<HermiteBasis> {
    let n = s.n();
    if max_degree > degree_cutoff(n) {
        return Err(Error::BeyondCutoff {
            index: vec![max_degree as u32],
            cutoff: degree_cutoff(n),
        });
    }
    let mut indices = Vec::new();
    let mut degree_start = Vec::with_capacity(max_degree + 2);
    let mut phi = Vec::new();
    for l in 0..=max_degree {
        degree_start.push(indices.len());
        let mons = indices_of_degree(n, l);
        let coeffs = gram_schmidt_degree(s, l, &mons)?;
        for row in coeffs {
            let p = Polynomial::from_terms(
                n,
                mons.iter()
                    .zip(&row)
                    .map(|(nu, &c)| (nu.clone(), Complex64::new(c, 0.0))),
            );
            phi.push(p);
        }
        indices.extend(mons);
    }
    degree_start.push(indices.len());

    let hermite = phi
        .iter()
        .zip(&indices)
        .map(|(p, nu)| hermite_from_phi(s, p, total_degree(nu)))
        .collect::<Result<Vec<_>>>()?;
    let position = indices.iter().enumerate().map(|(i, nu)| (nu.clone(), i)).collect();
    Ok(HermiteBasis {
        structure: s.clone(),
        max_degree,
        indices,
        position,
        degree_start,
        phi,
        hermite,
    })
}

/// Monomial Gram matrix of degree `l`; entries `(T^mu x^nu)(0)`.
fn monomial_gram(s: &DunklStructure, mons: &[MultiIndex]) -> Result<Vec<Vec<f64>>> {
    let m = mons.len();
    let origin = vec![Complex64::new(0.0, 0.0); s.n()];
    let mut g = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in a..m {
            let p = Polynomial::monomial(&mons[b], Complex64::new(1.0, 0.0));
            let v = apply_multi(s, &mons[a], &p)?.eval(&origin).re;
            g[a][b] = v;
            g[b][a] = v;
        }
    }
    Ok(g)
}

fn gram_schmidt_degree(s: &DunklStructure, l: usize, mons: &[MultiIndex]) -> Result<Vec<Vec<f64>>> {
    let g = monomial_gram(s, mons)?;
    let m = mons.len();
    let ip = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for a in 0..m {
            if u[a] == 0.0 {
                continue;
            }
            let row: f64 = (0..m).map(|b| g[a][b] * v[b]).sum();
            acc += u[a] * row;
        }
        acc
    };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        for _pass in 0..2 {
            for u in &basis {
                let proj = ip(u, &v);
                if proj != 0.0 {
                    for (vb, ub) in v.iter_mut().zip(u) {
                        *vb -= proj * ub;
                    }
                }
            }
        }
        let norm2 = ip(&v, &v);
        if !(norm2 > 0.0) {
            return Err(Error::OrthogonalityLoss {
                degree: l,
                deviation: f64::INFINITY,
            });
        }
        let inv = 1.0 / norm2.sqrt();
        v.iter_mut().for_each(|c| *c *= inv);
        basis.push(v);
    }
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip(&basis[i], &basis[j]) - target).abs());
        }
    }
    if worst > 1e-8 {
        return Err(Error::OrthogonalityLoss {
            degree: l,
            deviation: worst,
        });
    }
    Ok(basis)
}

/// `H = 2^d sum_l (-1)^l / (4^l l!) Delta_k^l phi`.
fn hermite_from_phi(s: &DunklStructure, phi: &Polynomial, d: usize) -> Result<Polynomial> {
    let mut acc = phi.clone();
    let mut cur = phi.clone();
    let mut coef = 1.0;
    for l in 1..=d / 2 {
        cur = dunkl_laplacian(s, &cur)?;
        if cur.is_zero() {
            break;
        }
        coef *= -1.0 / (4.0 * l as f64);
        acc = acc.add(&cur.scale(Complex64::new(coef, 0.0)));
    }
    Ok(acc.scale(Complex64::new(2f64.powi(d as i32), 0.0)))
}

impl HermiteBasis {
    pub fn structure(&self) -> &DunklStructure {
        &self.structure
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// All multi-indices, graded-lex within each degree.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Range of positions holding the indices of degree `l`.
    pub fn degree_range(&self, l: usize) -> std::ops::Range<usize> {
        self.degree_start[l]..self.degree_start[l + 1]
    }

    pub fn position(&self, nu: &[u32]) -> Result<usize> {
        self.position.get(nu).copied().ok_or_else(|| Error::BeyondCutoff {
            index: nu.to_vec(),
            cutoff: self.max_degree,
        })
    }

    pub fn phi(&self, nu: &[u32]) -> Result<&Polynomial> {
        Ok(&self.phi[self.position(nu)?])
    }

    pub fn hermite(&self, nu: &[u32]) -> Result<&Polynomial> {
        Ok(&self.hermite[self.position(nu)?])
    }

    pub fn phi_at(&self, i: usize) -> &Polynomial {
        &self.phi[i]
    }

    pub fn hermite_at(&self, i: usize) -> &Polynomial {
        &self.hermite[i]
    }

    /// `phi_nu(z)` for every stored index.
    pub fn eval_phi_all(&self, z: &[Complex64]) -> Vec<Complex64> {
        let tables = power_tables(z, vec![self.max_degree as u32; z.len()]);
        self.phi.iter().map(|p| p.eval_with(&tables)).collect()
    }

    /// `H_nu(z)` for every stored index.
    pub fn eval_hermite_all(&self, z: &[Complex64]) -> Vec<Complex64> {
        let tables = power_tables(z, vec![self.max_degree as u32; z.len()]);
        self.hermite.iter().map(|p| p.eval_with(&tables)).collect()
    }

    pub fn eval_hermite_all_real(&self, x: &[f64]) -> Vec<f64> {
        let z: Vec<Complex64> = x.iter().map(|&t| t.into()).collect();
        self.eval_hermite_all(&z).into_iter().map(|v| v.re).collect()
    }

    /// Coefficient table, one row per stored coefficient:
    /// `kind,nu,monomial,coefficient` with `kind` in {phi, hermite}.
    pub fn to_csv(&self) -> String {
        let join = |m: &[u32]| m.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
        let mut out = String::from("kind,nu,monomial,coefficient\n");
        for (kind, table) in [("phi", &self.phi), ("hermite", &self.hermite)] {
            for (nu, p) in self.indices.iter().zip(table.iter()) {
                let mut terms: Vec<_> = p.terms().collect();
                // highest power of x_1 first, matching the basis order
                terms.sort_by(|a, b| b.0.cmp(a.0));
                for (mono, c) in terms {
                    let _ = writeln!(out, "{kind},{},{},{:.16e}", join(nu), join(mono), c.re);
                }
            }
        }
        out
    }
}
