use alloc::vec::Vec;

use super::rational::rational_to_f64;
use super::{Poly, PolyVec};

/// A polynomial flattened for fast repeated `f64` evaluation.
#[derive(Clone, Debug, Default)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(exps, c)| {
                let factors = exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                (rational_to_f64(c), factors)
            })
            .collect();
        CompiledPoly { nvars: p.nvars(), terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Panics if `x` is shorter than `nvars`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                let xi = x[i];
                for _ in 0..e {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }
}

#[derive(Clone, Debug, Default)]
pub struct CompiledVec {
    entries: Vec<CompiledPoly>,
}

impl CompiledVec {
    pub fn new(v: &PolyVec) -> Self {
        CompiledVec { entries: v.entries().iter().map(CompiledPoly::new).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.entries) {
            *o = e.eval(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|e| e.eval(x)).collect()
    }

    /// `<w, self(x)>`.
    pub fn dot(&self, w: &[f64], x: &[f64]) -> f64 {
        self.entries.iter().zip(w).filter(|(e, _)| !e.is_zero()).map(|(e, wi)| wi * e.eval(x)).sum()
    }
}
