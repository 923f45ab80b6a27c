//! Multivariate polynomials with complex coefficients.

use num_complex::Complex64;
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector `nu` in N_0^n.
pub type MultiIndex = SmallVec<[u32; 4]>;

/// `|nu|`.
pub fn total_degree(nu: &[u32]) -> usize {
    nu.iter().map(|&e| e as usize).sum()
}

/// Multi-indices of total degree `l` in graded-lex order: `x_1^l` first.
pub fn indices_of_degree(n: usize, l: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, l as u32, &mut MultiIndex::new(), &mut out);
    out
}

/// Polynomial in canonical form: no zero coefficients are stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(nu, c)| format!("({c})x^{:?}", nu.as_slice()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::monomial(&vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(nu: &[u32], c: Complex64) -> Self {
        let mut p = Self::zero(nu.len());
        p.add_term(MultiIndex::from_slice(nu), c);
        p
    }

    /// The coordinate function `x_j`.
    pub fn coordinate(n: usize, j: usize) -> Self {
        let mut nu = vec![0; n];
        nu[j] = 1;
        Self::monomial(&nu, Complex64::new(1.0, 0.0))
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Complex64)>>(n: usize, terms: I) -> Self {
        let mut p = Self::zero(n);
        for (nu, c) in terms {
            assert_eq!(nu.len(), n);
            p.add_term(nu, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total degree present; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|nu| total_degree(nu)).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|nu| total_degree(nu));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn coeff(&self, nu: &[u32]) -> Complex64 {
        self.terms.get(nu).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    /// Adds `c x^nu`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, nu: MultiIndex, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(nu) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (nu, c) in &other.terms {
            out.add_term(nu.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (nu, c) in &other.terms {
            out.add_term(nu.clone(), -*c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        if s == Complex64::new(0.0, 0.0) {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(nu, c)| (nu.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n, other.n);
        let mut out = Polynomial::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let nu: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(nu, ca * cb);
            }
        }
        out
    }

    /// `d p / d x_j`.
    pub fn partial(&self, j: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (nu, c) in &self.terms {
            if nu[j] > 0 {
                let mut mu = nu.clone();
                mu[j] -= 1;
                out.add_term(mu, c * nu[j] as f64);
            }
        }
        out
    }

    /// `p(x_1, .., -x_j, .., x_n)`.
    pub fn flip_sign(&self, j: usize) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(nu, c)| (nu.clone(), if nu[j] % 2 == 1 { -c } else { *c }))
                .collect(),
        }
    }

    /// Multiplication by `x_j`.
    pub fn times_coordinate(&self, j: usize) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(nu, c)| {
                    let mut mu = nu.clone();
                    mu[j] += 1;
                    (mu, *c)
                })
                .collect(),
        }
    }

    /// Exact division by `x_j`: the quotient and the remainder (terms free of `x_j`).
    pub fn div_coordinate(&self, j: usize) -> (Polynomial, Polynomial) {
        let mut q = Polynomial::zero(self.n);
        let mut r = Polynomial::zero(self.n);
        for (nu, c) in &self.terms {
            if nu[j] > 0 {
                let mut mu = nu.clone();
                mu[j] -= 1;
                q.terms.insert(mu, *c);
            } else {
                r.terms.insert(nu.clone(), *c);
            }
        }
        (q, r)
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn distance(&self, other: &Polynomial) -> f64 {
        self.sub(other).max_abs_coeff()
    }

    /// Drops coefficients below `tol` in modulus.
    pub fn prune(&self, tol: f64) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(nu, c)| (nu.clone(), *c))
                .collect(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let tables = power_tables(z, self.max_exponents());
        self.eval_with(&tables)
    }

    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = x.iter().map(|&t| Complex64::new(t, 0.0)).collect();
        self.eval(&z)
    }

    /// Evaluation with precomputed powers `tables[j][e] = z_j^e`.
    pub fn eval_with(&self, tables: &[Vec<Complex64>]) -> Complex64 {
        self.terms
            .iter()
            .map(|(nu, c)| {
                nu.iter()
                    .enumerate()
                    .fold(*c, |acc, (j, &e)| acc * tables[j][e as usize])
            })
            .sum()
    }

    /// Largest exponent of each variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0; self.n];
        for nu in self.terms.keys() {
            for (a, &e) in m.iter_mut().zip(nu.iter()) {
                *a = (*a).max(e);
            }
        }
        m
    }
}

/// `tables[j][e] = z_j^e` for `e <= max_exp[j]`.
pub fn power_tables(z: &[Complex64], max_exp: Vec<u32>) -> Vec<Vec<Complex64>> {
    z.iter()
        .zip(max_exp)
        .map(|(&zj, m)| {
            let mut row = Vec::with_capacity(m as usize + 1);
            let mut p = Complex64::new(1.0, 0.0);
            for _ in 0..=m {
                row.push(p);
                p *= zj;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn graded_lex_order() {
        let idx = indices_of_degree(2, 2);
        let v: Vec<Vec<u32>> = idx.iter().map(|m| m.to_vec()).collect();
        assert_eq!(v, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(indices_of_degree(3, 3).len(), 10);
        assert_eq!(indices_of_degree(1, 5)[0].as_slice(), &[5]);
    }

    #[test]
    fn cancellation_keeps_canonical_form() {
        let x = Polynomial::coordinate(2, 0);
        let d = x.sub(&x);
        assert!(d.is_zero());
        assert_eq!(d.degree(), None);
    }

    #[test]
    fn product_and_evaluation() {
        let x = Polynomial::coordinate(2, 0);
        let y = Polynomial::coordinate(2, 1);
        let p = x.add(&y).mul(&x.sub(&y));
        let v = p.eval_real(&[3.0, 2.0]);
        assert_eq!(v, c(5.0));
        assert!(p.is_homogeneous());
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn division_by_coordinate() {
        let p = Polynomial::from_terms(
            1,
            [(MultiIndex::from_slice(&[3]), c(2.0)), (MultiIndex::from_slice(&[0]), c(1.0))],
        );
        let (q, r) = p.div_coordinate(0);
        assert_eq!(q.coeff(&[2]), c(2.0));
        assert_eq!(r.coeff(&[0]), c(1.0));
    }
}
