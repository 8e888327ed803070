use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::gaussian::{render_coefficient, GaussianRational};
use super::PolyError;

/// Sparse multivariate Laurent polynomial with exact Gaussian-rational coefficients.
///
/// Exponent vectors are indexed by the position of each name in `variables`.
/// Zero coefficients are never stored. Equality is semantic: two polynomials
/// are equal when they have the same terms once variables are matched by name,
/// regardless of variable order or of unused variables in the list.
#[derive(Clone, Debug, Default)]
pub struct LaurentPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i64>, GaussianRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Self { vars: Vec::new(), terms }
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(&[name], &[1], GaussianRational::one())
    }

    pub fn monomial(vars: &[&str], exps: &[i64], c: GaussianRational) -> Self {
        assert_eq!(vars.len(), exps.len(), "monomial: one exponent per variable");
        let mut p = Self::with_vars(vars.iter().map(|s| s.to_string()).collect());
        if !c.is_zero() {
            p.terms.insert(exps.to_vec(), c);
        }
        p
    }

    /// An empty (zero) polynomial over the given variable list.
    pub fn with_vars(vars: Vec<String>) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from raw terms, summing duplicates and dropping zeros.
    pub fn from_terms<I>(vars: Vec<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, GaussianRational)>,
    {
        let mut p = Self::with_vars(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    /// Univariate polynomial `sum_j coeffs[j] * var^j`.
    pub fn univariate(var: &str, coeffs: &[GaussianRational]) -> Self {
        Self::from_terms(
            vec![var.to_string()],
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (vec![j as i64], c.clone())),
        )
    }

    fn add_term(&mut self, e: Vec<i64>, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no variable carries a nonzero exponent.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if !self.is_constant() {
            return None;
        }
        Some(
            self.terms
                .values()
                .next()
                .cloned()
                .unwrap_or_else(GaussianRational::zero),
        )
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// True when the polynomial is a single term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Variables that actually occur with a nonzero exponent, in list order.
    pub fn used_variables(&self) -> Vec<String> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|e| e[*i] != 0))
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn occurs(&self, name: &str) -> bool {
        self.var_index(name)
            .is_some_and(|i| self.terms.keys().any(|e| e[i] != 0))
    }

    /// Largest exponent of `name` (0 when absent or for the zero polynomial).
    pub fn degree_in(&self, name: &str) -> i64 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Smallest exponent of `name` (0 when absent).
    pub fn min_degree_in(&self, name: &str) -> i64 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e[i]).min().unwrap_or(0),
            None => 0,
        }
    }

    pub fn max_abs_exponent(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Largest coefficient modulus, in binary64.
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Re-expresses the polynomial over `vars`, which must contain every
    /// variable of `self` that is actually used.
    pub fn embed(&self, vars: &[String]) -> Self {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v))
            .collect();
        let mut out = Self::with_vars(vars.to_vec());
        for (e, c) in &self.terms {
            let mut ne = vec![0i64; vars.len()];
            for (i, &x) in e.iter().enumerate() {
                match map[i] {
                    Some(j) => ne[j] = x,
                    None => assert!(x == 0, "embed: variable `{}` missing from target", self.vars[i]),
                }
            }
            out.terms.insert(ne, c.clone());
        }
        out
    }

    /// Drops variables that never occur with a nonzero exponent.
    pub fn trim_variables(&self) -> Self {
        self.embed(&self.used_variables())
    }

    fn union_vars(&self, other: &Self) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    pub fn add(&self, other: &Self) -> Self {
        let vars = self.union_vars(other);
        let mut out = self.embed(&vars);
        for (e, c) in other.embed(&vars).terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    /// Product; fails only if an exponent leaves the `i64` range.
    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        let vars = self.union_vars(other);
        let a = self.embed(&vars);
        let b = other.embed(&vars);
        let mut out = Self::with_vars(vars);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let mut e = Vec::with_capacity(ea.len());
                for (x, y) in ea.iter().zip(eb) {
                    e.push(x.checked_add(*y).ok_or(PolyError::ExponentOverflow)?);
                }
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("exponent overflow in polynomial product")
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::with_vars(self.vars.clone());
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by the monomial `prod vars[i]^shift[i]` (same variable order).
    pub fn shift(&self, shift: &[i64]) -> Self {
        assert_eq!(shift.len(), self.vars.len());
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Conjugates every coefficient; exponents are unchanged.
    pub fn conjugate_coeffs(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    /// `P(..., zeta * v, ...)`: coefficient of `v^e` is multiplied by `zeta^e`.
    pub fn rotate(&self, name: &str, zeta: &GaussianRational) -> Self {
        let Some(i) = self.var_index(name) else {
            return self.clone();
        };
        Self::from_terms(
            self.vars.clone(),
            self.terms.iter().map(|(e, c)| {
                let z = zeta.pow(e[i]).expect("rotation by zero");
                (e.clone(), c * &z)
            }),
        )
    }

    /// Renames variables according to `map` (names absent from `map` are kept).
    /// Renaming two variables onto one name merges their exponents.
    pub fn rename(&self, map: &[(&str, &str)]) -> Self {
        let renamed: Vec<String> = self
            .vars
            .iter()
            .map(|v| {
                map.iter()
                    .find(|(from, _)| from == v)
                    .map(|(_, to)| to.to_string())
                    .unwrap_or_else(|| v.clone())
            })
            .collect();
        let mut vars: Vec<String> = Vec::new();
        for v in &renamed {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        let idx: Vec<usize> = renamed
            .iter()
            .map(|v| vars.iter().position(|w| w == v).unwrap())
            .collect();
        Self::from_terms(
            vars.clone(),
            self.terms.iter().map(|(e, c)| {
                let mut ne = vec![0; vars.len()];
                for (i, &x) in e.iter().enumerate() {
                    ne[idx[i]] += x;
                }
                (ne, c.clone())
            }),
        )
    }

    /// Coefficients `(c_0, ..., c_k)` of the polynomial viewed as a polynomial
    /// in `name`; each `c_j` lives in the remaining variables and `c_k != 0`.
    /// A polynomial that does not involve `name` yields `[self]`.
    pub fn coeffs_in_var(&self, name: &str) -> Result<Vec<LaurentPoly>, PolyError> {
        let Some(i) = self.var_index(name) else {
            return Ok(vec![self.clone()]);
        };
        if self.min_degree_in(name) < 0 {
            return Err(PolyError::NegativeExponent(name.to_string()));
        }
        let rest: Vec<String> = self
            .vars
            .iter()
            .filter(|v| v.as_str() != name)
            .cloned()
            .collect();
        let deg = self.degree_in(name).max(0) as usize;
        let mut out = vec![LaurentPoly::with_vars(rest.clone()); deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let j = ne.remove(i) as usize;
            out[j].terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    /// Coefficient list of a polynomial that only involves `name`.
    pub fn univariate_coeffs(&self, name: &str) -> Result<Vec<GaussianRational>, PolyError> {
        let used = self.used_variables();
        if used.iter().any(|v| v != name) {
            return Err(PolyError::NotUnivariate(name.to_string()));
        }
        self.coeffs_in_var(name)?
            .into_iter()
            .map(|c| Ok(c.constant_value().expect("univariate coefficient")))
            .collect()
    }

    /// Multiplies by the monomial clearing every negative exponent. Returns the
    /// polynomial and that monomial's exponent vector.
    pub fn laurent_normalize(&self) -> Result<(LaurentPoly, Vec<i64>), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let shift: Vec<i64> = (0..self.vars.len())
            .map(|i| {
                let m = self.terms.keys().map(|e| e[i]).min().unwrap_or(0);
                (-m).max(0)
            })
            .collect();
        Ok((self.shift(&shift), shift))
    }

    /// Binary64 evaluation at `point` (one entry per variable, in list order).
    ///
    /// Terms are combined by nested Horner schemes over the variables sorted by
    /// name, so the result depends only on the named terms and not on the
    /// recorded variable order.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars.len(), "eval_complex: point dimension");
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by(|&a, &b| self.vars[a].cmp(&self.vars[b]));
        let mut terms: Vec<(Vec<i64>, Complex64)> = self
            .terms
            .iter()
            .map(|(e, c)| (order.iter().map(|&i| e[i]).collect(), c.to_complex64()))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let pts: Vec<Complex64> = order.iter().map(|&i| point[i]).collect();
        horner(&terms, 0, &pts)
    }

    fn graded_lex_order(&self) -> Vec<(&Vec<i64>, &GaussianRational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: i64 = a.0.iter().sum();
            let db: i64 = b.0.iter().sum();
            match db.cmp(&da) {
                Ordering::Equal => b.0.cmp(a.0),
                o => o,
            }
        });
        ts
    }
}

fn powi(x: Complex64, e: i64) -> Complex64 {
    let base = if e < 0 { x.inv() } else { x };
    let mut n = e.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc *= sq;
        }
        n >>= 1;
        if n > 0 {
            sq *= sq;
        }
    }
    acc
}

fn horner(terms: &[(Vec<i64>, Complex64)], level: usize, pts: &[Complex64]) -> Complex64 {
    if terms.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    if level == pts.len() {
        return terms[0].1;
    }
    // Groups share the exponent at `level`; the slice is sorted ascending.
    let mut groups: Vec<(i64, Complex64)> = Vec::new();
    let mut start = 0;
    while start < terms.len() {
        let e = terms[start].0[level];
        let mut end = start;
        while end < terms.len() && terms[end].0[level] == e {
            end += 1;
        }
        groups.push((e, horner(&terms[start..end], level + 1, pts)));
        start = end;
    }
    let x = pts[level];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev: Option<i64> = None;
    for &(e, inner) in groups.iter().rev() {
        if let Some(p) = prev {
            acc *= powi(x, p - e);
        }
        acc += inner;
        prev = Some(e);
    }
    acc * powi(x, prev.unwrap_or(0))
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let key = |p: &LaurentPoly| -> BTreeMap<Vec<(String, i64)>, GaussianRational> {
            p.terms
                .iter()
                .map(|(e, c)| {
                    let mut k: Vec<(String, i64)> = p
                        .vars
                        .iter()
                        .zip(e)
                        .filter(|(_, &x)| x != 0)
                        .map(|(v, &x)| (v.clone(), x))
                        .collect();
                    k.sort();
                    (k, c.clone())
                })
                .collect()
        };
        key(self) == key(other)
    }
}

impl Eq for LaurentPoly {}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.graded_lex_order().into_iter().enumerate() {
            let factors: Vec<(String, i64)> = self
                .vars
                .iter()
                .zip(e)
                .filter(|(_, &x)| x != 0)
                .map(|(v, &x)| (v.clone(), x))
                .collect();
            let mono = factors
                .iter()
                .map(|(v, x)| if *x == 1 { v.clone() } else { format!("{v}^{x}") })
                .collect::<Vec<_>>()
                .join("*");
            let (neg, body, paren) = render_coefficient(c);
            let unit = body == "1" && !paren;
            let text = if mono.is_empty() {
                body
            } else if unit {
                // A leading `-x^2` would parse as `(-x)^2`.
                if n == 0 && neg && factors[0].1 != 1 {
                    format!("1*{mono}")
                } else {
                    mono
                }
            } else {
                format!("{body}*{mono}")
            };
            match (n, neg) {
                (0, false) => write!(f, "{text}")?,
                (0, true) => write!(f, "-{text}")?,
                (_, false) => write!(f, " + {text}")?,
                (_, true) => write!(f, " - {text}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> LaurentPoly {
        LaurentPoly::var("x")
    }
    fn y() -> LaurentPoly {
        LaurentPoly::var("y")
    }
    fn z() -> LaurentPoly {
        LaurentPoly::var("z")
    }
    fn c(n: i64) -> LaurentPoly {
        LaurentPoly::constant(n.into())
    }

    #[test]
    fn arith_examples() {
        let two_x = x().add(&c(1)).add(&x().sub(&c(1)));
        assert_eq!(two_x, x().scale(&2.into()));
        assert_eq!(two_x.num_terms(), 1);

        let prod = x().sub(&c(1)).mul(&y().add(&z()));
        let expected = x().mul(&y()).add(&x().mul(&z())).sub(&y()).sub(&z());
        assert_eq!(prod, expected);

        assert!(x().add(&y()).mul(&LaurentPoly::zero()).is_zero());
    }

    #[test]
    fn equality_ignores_variable_order() {
        let a = x().add(&y());
        let b = y().add(&x());
        assert_eq!(a.variables(), ["x", "y"]);
        assert_eq!(b.variables(), ["y", "x"]);
        assert_eq!(a, b);
        // x - x leaves `x` in the variable list but not in the terms.
        assert_eq!(x().sub(&x()).add(&y()), y());
    }

    #[test]
    fn conjugation() {
        let i = GaussianRational::i();
        let p = x().scale(&i).add(&LaurentPoly::constant(GaussianRational::from_parts((1, 1), (-1, 1))));
        let q = x().scale(&-i.clone()).add(&LaurentPoly::constant(GaussianRational::from_parts((1, 1), (1, 1))));
        assert_eq!(p.conjugate_coeffs(), q);
        let r = x().add(&c(2));
        assert_eq!(r.conjugate_coeffs(), r);
    }

    #[test]
    fn coefficients_in_variable() {
        // x + 1 + (x-1)(y+z)
        let p = x().add(&c(1)).add(&x().sub(&c(1)).mul(&y().add(&z())));
        let cs = p.coeffs_in_var("x").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0], c(1).sub(&y()).sub(&z()));
        assert_eq!(cs[1], c(1).add(&y()).add(&z()));

        let sq = x().mul(&x()).coeffs_in_var("x").unwrap();
        assert_eq!(sq.len(), 3);
        assert!(sq[0].is_zero() && sq[1].is_zero());
        assert_eq!(sq[2], c(1));

        assert_eq!(c(5).coeffs_in_var("x").unwrap(), vec![c(5)]);
    }

    #[test]
    fn normalize_clears_negative_exponents() {
        let p = LaurentPoly::monomial(&["x"], &[-1], 1.into()).add(&c(1));
        let (q, s) = p.laurent_normalize().unwrap();
        assert_eq!(q, x().add(&c(1)));
        assert_eq!(s, vec![1]);

        let p = x().add(&y());
        let (q, s) = p.laurent_normalize().unwrap();
        assert_eq!(q, p);
        assert_eq!(s, vec![0, 0]);

        // x^-2 y + y^-1 -> y^2 + x^2 with shift [2, 1]
        let p = LaurentPoly::monomial(&["x", "y"], &[-2, 1], 1.into())
            .add(&LaurentPoly::monomial(&["y"], &[-1], 1.into()));
        let (q, s) = p.laurent_normalize().unwrap();
        assert_eq!(q, y().mul(&y()).add(&x().mul(&x())));
        assert_eq!(s, vec![2, 1]);

        assert!(matches!(LaurentPoly::zero().laurent_normalize(), Err(PolyError::ZeroPolynomial)));
    }

    #[test]
    fn printing() {
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        let p = c(1).add(&x()).add(&x());
        assert_eq!(p.to_string(), "2*x + 1");
        let q = x().mul(&x()).neg().add(&c(1));
        assert_eq!(q.to_string(), "-1*x^2 + 1");
        let r = LaurentPoly::monomial(&["x"], &[-2], GaussianRational::from_ratio(-1, 2));
        assert_eq!(r.to_string(), "-1/2*x^-2");
    }

    #[test]
    fn horner_evaluation() {
        let p = x().add(&c(1));
        assert_eq!(p.eval_complex(&[Complex64::new(1.0, 0.0)]), Complex64::new(2.0, 0.0));
        let q = LaurentPoly::monomial(&["x", "y"], &[-2, 3], 2.into()).add(&y());
        let v = q.eval_complex(&[Complex64::new(0.5, 0.5), Complex64::new(-1.0, 2.0)]);
        let xx = Complex64::new(0.5, 0.5);
        let yy = Complex64::new(-1.0, 2.0);
        let direct = 2.0 * yy.powi(3) / (xx * xx) + yy;
        assert!((v - direct).norm() < 1e-12);
    }

    #[test]
    fn rename_and_rotate() {
        let p = x().add(&y().mul(&y()));
        let q = p.rename(&[("x", "a"), ("y", "b")]);
        assert_eq!(q, LaurentPoly::var("a").add(&LaurentPoly::var("b").mul(&LaurentPoly::var("b"))));
        let r = p.rotate("y", &GaussianRational::i());
        assert_eq!(r, x().sub(&y().mul(&y())));
    }
}
