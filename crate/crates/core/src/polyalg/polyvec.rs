use alloc::vec::Vec;

use super::{Poly, PolyError, Rational};

/// A polynomial vector field: `dim` components sharing one variable space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyVec {
    nvars: usize,
    entries: Vec<Poly>,
}

impl PolyVec {
    pub fn new(entries: Vec<Poly>) -> Result<Self, PolyError> {
        let nvars = entries.first().map_or(0, Poly::nvars);
        Self::with_nvars(nvars, entries)
    }

    /// Like [`PolyVec::new`] but fixes the variable count even when there
    /// are no entries.
    pub fn with_nvars(nvars: usize, entries: Vec<Poly>) -> Result<Self, PolyError> {
        if let Some(bad) = entries.iter().find(|e| e.nvars() != nvars) {
            return Err(PolyError::VarCountMismatch { left: nvars, right: bad.nvars() });
        }
        Ok(PolyVec { nvars, entries })
    }

    pub fn zero(dim: usize, nvars: usize) -> Self {
        PolyVec { nvars, entries: (0..dim).map(|_| Poly::zero(nvars)).collect() }
    }

    /// Constant field with the given components.
    pub fn constant(nvars: usize, values: &[Rational]) -> Self {
        PolyVec { nvars, entries: values.iter().map(|c| Poly::constant(nvars, c.clone())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Poly {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    fn check_same(&self, other: &PolyVec) -> Result<(), PolyError> {
        if self.dim() != other.dim() {
            return Err(PolyError::DimMismatch { left: self.dim(), right: other.dim() });
        }
        if self.nvars != other.nvars {
            return Err(PolyError::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PolyVec) -> Result<PolyVec, PolyError> {
        self.check_same(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(PolyVec { nvars: self.nvars, entries })
    }

    pub fn checked_sub(&self, other: &PolyVec) -> Result<PolyVec, PolyError> {
        self.check_same(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(PolyVec { nvars: self.nvars, entries })
    }

    pub fn scale(&self, c: &Rational) -> PolyVec {
        PolyVec { nvars: self.nvars, entries: self.entries.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn neg(&self) -> PolyVec {
        PolyVec { nvars: self.nvars, entries: self.entries.iter().map(|e| -e).collect() }
    }

    /// Jacobian rows: `jac[j][k] = d self_j / d z_k`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.entries
            .iter()
            .map(|e| (0..self.nvars).map(|k| e.partial(k).expect("index in range")).collect())
            .collect()
    }

    /// Directional derivative `(D self) v`, i.e. component `j` is
    /// `sum_k v_k d self_j / d z_k`. Requires `v.dim() == nvars`.
    pub fn derivative_along(&self, v: &PolyVec) -> Result<PolyVec, PolyError> {
        if v.dim() != self.nvars {
            return Err(PolyError::DimMismatch { left: self.nvars, right: v.dim() });
        }
        if v.nvars != self.nvars {
            return Err(PolyError::VarCountMismatch { left: self.nvars, right: v.nvars });
        }
        let mut entries = Vec::with_capacity(self.dim());
        for e in &self.entries {
            let mut acc = Poly::zero(self.nvars);
            for (k, vk) in v.entries.iter().enumerate() {
                if vk.is_zero() || !e.depends_on(k) {
                    continue;
                }
                acc = &acc + &(&e.partial(k)? * vk);
            }
            entries.push(acc);
        }
        Ok(PolyVec { nvars: self.nvars, entries })
    }

    /// `sum_k w_k self_k` for constant weights `w`.
    pub fn dot_constant(&self, w: &[Rational]) -> Result<Poly, PolyError> {
        if w.len() != self.dim() {
            return Err(PolyError::DimMismatch { left: self.dim(), right: w.len() });
        }
        let mut acc = Poly::zero(self.nvars);
        for (e, c) in self.entries.iter().zip(w) {
            acc = &acc + &e.scale(c);
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.entries.iter().map(|e| e.eval_f64(point)).collect()
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Result<Vec<Rational>, PolyError> {
        self.entries.iter().map(|e| e.eval_rational(point)).collect()
    }

    pub fn embed(&self, nvars: usize, offset: usize) -> Result<PolyVec, PolyError> {
        let entries = self.entries.iter().map(|e| e.embed(nvars, offset)).collect::<Result<_, _>>()?;
        Ok(PolyVec { nvars, entries })
    }

    /// Prepends a component, producing a field of dimension `dim + 1`.
    pub fn prepend(&self, head: Poly) -> Result<PolyVec, PolyError> {
        if head.nvars() != self.nvars {
            return Err(PolyError::VarCountMismatch { left: self.nvars, right: head.nvars() });
        }
        let mut entries = Vec::with_capacity(self.dim() + 1);
        entries.push(head);
        entries.extend(self.entries.iter().cloned());
        Ok(PolyVec { nvars: self.nvars, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_poly, rat};
    use alloc::vec;

    #[test]
    fn derivative_along_field() {
        let f = PolyVec::new(vec![parse_poly("x0^2 * x1", 2).unwrap(), parse_poly("x1", 2).unwrap()]).unwrap();
        let v = PolyVec::constant(2, &[rat(1, 1), rat(2, 1)]);
        let d = f.derivative_along(&v).unwrap();
        assert_eq!(d.get(0), &parse_poly("2 * x0 * x1 + 2 * x0^2", 2).unwrap());
        assert_eq!(d.get(1), &parse_poly("2", 2).unwrap());
    }

    #[test]
    fn mixed_spaces_rejected() {
        assert!(PolyVec::new(vec![Poly::zero(1), Poly::zero(2)]).is_err());
    }
}
