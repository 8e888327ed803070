//! Polynomials compiled for fast evaluation on the torus.

use num_complex::Complex64;

use crate::poly::LaurentPoly;
use crate::roots::jensen_from_coeffs;

struct Term {
    coeff: Complex64,
    /// Flat indices into the power table, one per integration dimension.
    slots: Vec<u32>,
}

/// A polynomial in the integration variables, optionally grouped by the
/// power of a reduction variable.
pub(crate) struct Compiled {
    dims: usize,
    min: Vec<i64>,
    offsets: Vec<usize>,
    table_len: usize,
    /// `groups[p]` holds the terms of `r^(low + p)`; a single group when
    /// nothing is reduced.
    groups: Vec<Vec<Term>>,
    eps: f64,
}

pub(crate) struct Scratch {
    powers: Vec<Complex64>,
    coeffs: Vec<Complex64>,
}

impl Compiled {
    /// `dims` lists the integration variables in node order; `reduce` names
    /// the variable handled by Jensen's formula, if any. Variables of `p`
    /// outside both are not allowed.
    pub fn new(p: &LaurentPoly, dims: &[String], reduce: Option<&str>, pole_epsilon_rel: f64) -> Self {
        let idx: Vec<Option<usize>> = dims.iter().map(|v| p.var_index(v)).collect();
        let ridx = reduce.and_then(|r| p.var_index(r));
        let mut min = vec![i64::MAX; dims.len()];
        let mut max = vec![i64::MIN; dims.len()];
        let (mut rlow, mut rhigh) = (i64::MAX, i64::MIN);
        for (e, _) in p.terms() {
            for (j, ix) in idx.iter().enumerate() {
                let x = ix.map_or(0, |i| e[i]);
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
            let r = ridx.map_or(0, |i| e[i]);
            rlow = rlow.min(r);
            rhigh = rhigh.max(r);
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut table_len = 0;
        for j in 0..dims.len() {
            offsets.push(table_len);
            table_len += (max[j] - min[j] + 1) as usize;
        }
        let mut groups: Vec<Vec<Term>> = (rlow..=rhigh).map(|_| Vec::new()).collect();
        for (e, c) in p.terms() {
            let slots = idx
                .iter()
                .enumerate()
                .map(|(j, ix)| (offsets[j] as i64 + ix.map_or(0, |i| e[i]) - min[j]) as u32)
                .collect();
            let r = ridx.map_or(0, |i| e[i]);
            groups[(r - rlow) as usize].push(Term {
                coeff: c.to_complex64(),
                slots,
            });
        }
        Self {
            dims: dims.len(),
            min,
            offsets,
            table_len,
            groups,
            eps: pole_epsilon_rel * p.max_coeff_abs(),
        }
    }

    pub fn scratch(&self) -> Scratch {
        Scratch {
            powers: vec![Complex64::new(0.0, 0.0); self.table_len],
            coeffs: Vec::with_capacity(self.groups.len()),
        }
    }

    fn fill_powers(&self, s: &mut Scratch, angles: &[f64]) {
        debug_assert_eq!(angles.len(), self.dims);
        for j in 0..self.dims {
            let end = if j + 1 < self.dims { self.offsets[j + 1] } else { self.table_len };
            let base = Complex64::cis(angles[j]);
            let mut p = Complex64::cis(self.min[j] as f64 * angles[j]);
            for slot in &mut s.powers[self.offsets[j]..end] {
                *slot = p;
                p *= base;
            }
        }
    }

    fn eval_group(&self, s: &Scratch, g: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.groups[g] {
            let mut m = t.coeff;
            for &k in &t.slots {
                m *= s.powers[k as usize];
            }
            acc += m;
        }
        acc
    }

    /// `log|p|` at the node, or `None` if `|p|` is below the pole threshold.
    pub fn log_abs(&self, s: &mut Scratch, angles: &[f64]) -> Option<f64> {
        self.fill_powers(s, angles);
        let v = self.eval_group(s, 0);
        (v.norm() >= self.eps && v.norm() > 0.0).then(|| v.norm().ln())
    }

    /// One-variable Mahler measure in the reduction variable at the node.
    /// Near-zero extreme coefficients are dropped; `None` if nothing is left
    /// or the root solver fails.
    pub fn jensen(&self, s: &mut Scratch, angles: &[f64]) -> Option<f64> {
        self.fill_powers(s, angles);
        let mut coeffs = std::mem::take(&mut s.coeffs);
        coeffs.clear();
        for g in 0..self.groups.len() {
            coeffs.push(self.eval_group(s, g));
        }
        while coeffs.last().is_some_and(|c| c.norm() < self.eps) {
            coeffs.pop();
        }
        let low = coeffs.iter().position(|c| c.norm() >= self.eps);
        let out = low.and_then(|low| jensen_from_coeffs(&coeffs[low..]).ok());
        s.coeffs = coeffs;
        out
    }
}
