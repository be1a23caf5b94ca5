use alloc::vec::Vec;
use core::fmt;

use super::LieError;
use crate::polyalg::{CompiledVec, Poly, PolyError, PolyVec};
use crate::system::AugmentedSystem;

/// `[a, b] = (Db) a - (Da) b`.
pub fn lie_bracket(a: &PolyVec, b: &PolyVec) -> Result<PolyVec, PolyError> {
    b.derivative_along(a)?.checked_sub(&a.derivative_along(b)?)
}

/// Formal name of a bracket field. Inputs are numbered from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BracketWord {
    Drift,
    /// `ad_f^depth g_input`
    Ad { depth: usize, input: usize },
    /// `[g_outer, ad_f^depth g_input]`
    Mixed { outer: usize, depth: usize, input: usize },
}

impl fmt::Display for BracketWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ad = |f: &mut fmt::Formatter<'_>, depth: usize, input: usize| match depth {
            0 => write!(f, "g{input}"),
            1 => write!(f, "ad_f g{input}"),
            d => write!(f, "ad_f^{d} g{input}"),
        };
        match *self {
            BracketWord::Drift => f.write_str("f"),
            BracketWord::Ad { depth, input } => ad(f, depth, input),
            BracketWord::Mixed { outer, depth, input } => {
                write!(f, "[g{outer}, ")?;
                ad(f, depth, input)?;
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketField {
    pub word: BracketWord,
    pub field: PolyVec,
}

/// `ladder[i][l] = ad_f^l g_i` for `l = 0..=max_depth`.
pub fn ad_ladder(aug: &AugmentedSystem, max_depth: usize) -> Result<Vec<Vec<BracketField>>, LieError> {
    if max_depth == 0 {
        return Err(LieError::ZeroDepth);
    }
    let f = aug.fbar();
    aug.gbar()
        .iter()
        .enumerate()
        .map(|(input, g)| {
            let mut rungs = Vec::with_capacity(max_depth + 1);
            let mut cur = g.clone();
            for depth in 0..=max_depth {
                if depth > 0 {
                    cur = lie_bracket(f, &cur)?;
                }
                rungs.push(BracketField { word: BracketWord::Ad { depth, input }, field: cur.clone() });
            }
            Ok(rungs)
        })
        .collect()
}

/// `<p, W(z)>` as a polynomial in `2N` variables `(z, p)`.
pub fn pairing_poly(w: &PolyVec) -> Result<Poly, PolyError> {
    let big = w.nvars();
    let mut acc = Poly::zero(2 * big);
    for (k, wk) in w.entries().iter().enumerate() {
        if wk.is_zero() {
            continue;
        }
        acc = &acc + &(&Poly::var(2 * big, big + k)? * &wk.embed(2 * big, 0)?);
    }
    Ok(acc)
}

/// Right-hand side of `d/dt <p, h> = <p, [f, h] + Σ u_i [g_i, h]>`.
#[derive(Clone, Debug)]
pub struct LieDerivative {
    drift: CompiledVec,
    inputs: Vec<CompiledVec>,
}

impl LieDerivative {
    pub fn eval(&self, z: &[f64], p: &[f64], u: &[f64]) -> f64 {
        let mut acc = self.drift.dot(p, z);
        for (b, ui) in self.inputs.iter().zip(u) {
            acc += ui * b.dot(p, z);
        }
        acc
    }
}

pub fn lie_derivative_identity(aug: &AugmentedSystem, h: &PolyVec) -> Result<LieDerivative, LieError> {
    let drift = lie_bracket(aug.fbar(), h)?;
    let inputs = aug.gbar().iter().map(|g| lie_bracket(g, h).map(|b| CompiledVec::new(&b))).collect::<Result<_, _>>()?;
    Ok(LieDerivative { drift: CompiledVec::new(&drift), inputs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;
    use alloc::string::ToString;

    fn pv(items: &[&str], n: usize) -> PolyVec {
        PolyVec::with_nvars(n, items.iter().map(|s| parse_poly(s, n).unwrap()).collect()).unwrap()
    }

    #[test]
    fn self_bracket_vanishes() {
        let a = pv(&["x0 * x1", "x1^2 - x0", "3"], 3);
        assert!(lie_bracket(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn constant_fields_commute() {
        assert!(lie_bracket(&pv(&["1", "2"], 2), &pv(&["-3", "1/2"], 2)).unwrap().is_zero());
    }

    #[test]
    fn bracket_convention() {
        // a = x1 ∂0 (shear), b = ∂1: [a, b] = (Db)a - (Da)b = -(Da) e1 = -e0.
        let a = pv(&["x1", "0"], 2);
        let b = pv(&["0", "1"], 2);
        assert_eq!(lie_bracket(&a, &b).unwrap(), pv(&["-1", "0"], 2));
    }

    #[test]
    fn words_render() {
        assert_eq!(BracketWord::Drift.to_string(), "f");
        assert_eq!(BracketWord::Ad { depth: 0, input: 1 }.to_string(), "g1");
        assert_eq!(BracketWord::Ad { depth: 3, input: 0 }.to_string(), "ad_f^3 g0");
        assert_eq!(BracketWord::Mixed { outer: 1, depth: 1, input: 0 }.to_string(), "[g1, ad_f g0]");
    }

    #[test]
    fn pairing_poly_matches_evaluation() {
        let w = pv(&["x1", "x0 * x1"], 2);
        let e = pairing_poly(&w).unwrap();
        let v = e.eval_f64(&[2.0, 3.0, 5.0, 7.0]).unwrap();
        assert_eq!(v, 5.0 * 3.0 + 7.0 * 6.0);
    }
}
