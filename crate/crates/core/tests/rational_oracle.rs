//! Gram-Schmidt and the Hermite sum redone in exact rational arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use dunkl_core::poly::indices_of_degree;
use dunkl_core::{build_structure, orthonormal_basis};

type Poly = BTreeMap<Vec<u32>, BigRational>;

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn add_to(p: &mut Poly, nu: Vec<u32>, c: BigRational) {
    let e = p.entry(nu).or_insert_with(BigRational::zero);
    *e += c;
}

/// `T_j x^nu = (nu_j + 2 kappa_j [nu_j odd]) x^(nu - e_j)`.
fn dunkl(kappa: &[BigRational], j: usize, p: &Poly) -> Poly {
    let mut out = Poly::new();
    for (nu, c) in p {
        if nu[j] == 0 {
            continue;
        }
        let mut f = BigRational::from_integer(BigInt::from(nu[j]));
        if nu[j] % 2 == 1 {
            f += &kappa[j] * BigRational::from_integer(BigInt::from(2));
        }
        let mut m = nu.clone();
        m[j] -= 1;
        add_to(&mut out, m, c * f);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn laplacian(kappa: &[BigRational], p: &Poly) -> Poly {
    let mut out = Poly::new();
    for j in 0..kappa.len() {
        for (nu, c) in dunkl(kappa, j, &dunkl(kappa, j, p)) {
            add_to(&mut out, nu, c);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `[p, q] = (p(T) q)(0)`.
fn pairing(kappa: &[BigRational], p: &Poly, qp: &Poly) -> BigRational {
    let mut acc = BigRational::zero();
    for (nu, c) in p {
        let mut v = qp.clone();
        for (j, &e) in nu.iter().enumerate() {
            for _ in 0..e {
                v = dunkl(kappa, j, &v);
            }
        }
        let zero = vec![0u32; kappa.len()];
        if let Some(c0) = v.get(&zero) {
            acc += c * c0;
        }
    }
    acc
}

fn check(kappa_q: &[(i64, i64)], max_degree: usize) {
    let kappa: Vec<BigRational> = kappa_q.iter().map(|&(a, b)| q(a, b)).collect();
    let kf: Vec<f64> = kappa.iter().map(|k| k.to_f64().unwrap()).collect();
    let n = kf.len();
    let s = build_structure(n, &kf).unwrap();
    let basis = orthonormal_basis(&s, max_degree).unwrap();
    for l in 0..=max_degree {
        let mons = indices_of_degree(n, l);
        let mut ortho: Vec<(Poly, BigRational)> = Vec::new();
        for m in &mons {
            let mut v = Poly::new();
            v.insert(m.to_vec(), BigRational::one());
            let mut w = v.clone();
            for (u, nu2) in &ortho {
                let c = pairing(&kappa, &v, u) / nu2;
                for (idx, cu) in u {
                    add_to(&mut w, idx.clone(), -(&c * cu));
                }
            }
            w.retain(|_, c| !c.is_zero());
            let norm2 = pairing(&kappa, &w, &w);
            assert!(norm2.is_positive());
            ortho.push((w, norm2));
        }
        for (m, (v, norm2)) in mons.iter().zip(&ortho) {
            let scale = norm2.to_f64().unwrap().sqrt();
            let phi = basis.phi(m).unwrap();
            assert_eq!(phi.len(), v.len(), "support of phi_{m:?}");
            for (idx, c) in v {
                let expect = c.to_f64().unwrap() / scale;
                let got = phi.coeff(idx).re;
                assert!((got - expect).abs() <= 1e-14 * expect.abs(), "phi_{m:?}[{idx:?}]: {got} vs {expect}");
            }
            // sqrt(N) H_nu = 2^|nu| sum_l (-1)^l / (4^l l!) Delta^l v
            let mut herm = Poly::new();
            let mut term = v.clone();
            let mut coef = BigRational::from_integer(BigInt::from(2).pow(l as u32));
            let mut step = 0i64;
            while !term.is_empty() {
                for (idx, c) in &term {
                    add_to(&mut herm, idx.clone(), &coef * c);
                }
                step += 1;
                coef = -coef / q(4 * step, 1);
                term = laplacian(&kappa, &term);
            }
            herm.retain(|_, c| !c.is_zero());
            let h = basis.hermite(m).unwrap();
            assert_eq!(h.len(), herm.len(), "support of H_{m:?}");
            for (idx, c) in &herm {
                let expect = c.to_f64().unwrap() / scale;
                let got = h.coeff(idx).re;
                assert!((got - expect).abs() <= 1e-13 * expect.abs(), "H_{m:?}[{idx:?}]: {got} vs {expect}");
            }
        }
    }
}

#[test]
fn half_multiplicity_rank_one() {
    check(&[(1, 2)], 12);
}

#[test]
fn quarter_multiplicity_rank_one() {
    check(&[(1, 4)], 12);
}

#[test]
fn mixed_multiplicities_rank_two() {
    check(&[(1, 2), (1, 1)], 8);
}

#[test]
fn phi_two_at_half_multiplicity() {
    // [x^2, x^2] = (1 + 2 kappa) * 2 = 4 for kappa = 1/2, so phi_2 = x^2 / 2
    let s = build_structure(1, &[0.5]).unwrap();
    let b = orthonormal_basis(&s, 2).unwrap();
    assert_eq!(b.phi(&[2]).unwrap().coeff(&[2]).re, 0.5);
    let h = b.hermite(&[2]).unwrap();
    assert_eq!(h.coeff(&[2]).re, 2.0);
    assert_eq!(h.coeff(&[0]).re, -2.0);
}
