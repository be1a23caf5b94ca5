#![allow(dead_code)]

use fullerlab_core::polyalg::{rat, Poly, PolyVec, Rational};
use proptest::prelude::*;
use rand::Rng;

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Sparse polynomial in `nvars` variables of total degree at most `deg`.
pub fn arb_poly(nvars: usize, deg: u32) -> impl Strategy<Value = Poly> {
    let term = (proptest::collection::vec(0..=deg, nvars), arb_rational());
    proptest::collection::vec(term, 0..5).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .map(|(mut e, c)| {
                // Clamp total degree.
                while e.iter().sum::<u32>() > deg {
                    let k = e.iter().position(|x| *x > 0).unwrap();
                    e[k] -= 1;
                }
                (e, c)
            })
            .collect::<Vec<_>>();
        Poly::from_terms(nvars, terms).unwrap()
    })
}

pub fn arb_field(dim: usize, deg: u32) -> impl Strategy<Value = PolyVec> {
    proptest::collection::vec(arb_poly(dim, deg), dim).prop_map(move |e| PolyVec::with_nvars(dim, e).unwrap())
}

pub fn random_rational<R: Rng>(rng: &mut R, range: i64, den: i64) -> Rational {
    rat(rng.gen_range(-range..=range), rng.gen_range(1..=den))
}

/// Random polynomial with seeded coefficients, used outside proptest.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, deg: u32, terms: usize) -> Poly {
    let t = (0..terms)
        .map(|_| {
            let mut e = vec![0u32; nvars];
            let total = rng.gen_range(0..=deg);
            for _ in 0..total {
                e[rng.gen_range(0..nvars)] += 1;
            }
            (e, random_rational(rng, 5, 3))
        })
        .collect::<Vec<_>>();
    Poly::from_terms(nvars, t).unwrap()
}

pub fn random_field<R: Rng>(rng: &mut R, dim: usize, deg: u32) -> PolyVec {
    PolyVec::with_nvars(dim, (0..dim).map(|_| random_poly(rng, dim, deg, 3)).collect()).unwrap()
}
