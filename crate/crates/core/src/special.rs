//! Zeta and Dirichlet L-values, Bernoulli numbers, elementary symmetric
//! functions, and the closed-form measures of the `R_m`, `S_m`, `T_m`
//! rational-function families.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::rat_to_f64;

pub const MAX_BERNOULLI: usize = 200;
pub const MAX_FAMILY_INDEX: u32 = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("argument s = {0} is below 2")]
    ArgumentTooSmall(i64),
    #[error("Bernoulli index {0} exceeds {MAX_BERNOULLI}")]
    BernoulliOutOfRange(usize),
    #[error("coefficient {kind:?} is undefined for h = {h}")]
    IndexOutOfRange { kind: Coefficient, h: i64 },
    #[error("family index m = {0} is outside 1..={MAX_FAMILY_INDEX}")]
    FamilyIndexOutOfRange(u32),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("constant `{0}` has no internal formula and needs a user-supplied value")]
    UserValueRequired(String),
}

/// Cohen–Villegas–Zagier acceleration of `sum_{k>=0} (-1)^k a_k`.
fn alternating_sum(a: impl Fn(usize) -> f64) -> f64 {
    const N: usize = 30;
    let mut d = (3.0 + 8f64.sqrt()).powi(N as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for k in 0..N {
        c = b - c;
        s += c * a(k);
        let kf = k as f64;
        let nf = N as f64;
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

/// `prod_{j=1}^{n} x/j = x^n / n!` without intermediate overflow.
fn power_over_factorial(x: f64, n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * x / j as f64)
}

/// Riemann zeta at an integer `s >= 2`.
pub fn zeta(s: i64) -> Result<f64, SpecialError> {
    if s < 2 {
        return Err(SpecialError::ArgumentTooSmall(s));
    }
    if s % 2 == 0 && (s as usize) <= MAX_BERNOULLI {
        // zeta(2n) = |B_2n| (2 pi)^(2n) / (2 (2n)!)
        let b = rat_to_f64(&bernoulli(s as usize)?.abs());
        return Ok(0.5 * b * power_over_factorial(2.0 * PI, s as u32));
    }
    if s > 60 {
        return Ok(1.0 + 2f64.powi(-(s as i32)) + 3f64.powi(-(s as i32)));
    }
    let eta = alternating_sum(|k| ((k + 1) as f64).powi(-(s as i32)));
    Ok(eta / (1.0 - 2f64.powi(1 - s as i32)))
}

/// Hurwitz zeta `sum_{k>=0} (k + a)^(-s)` by Euler–Maclaurin.
pub fn hurwitz_zeta(s: i64, a: f64) -> Result<f64, SpecialError> {
    const SHIFT: usize = 15;
    const TERMS: usize = 20;
    if s < 2 {
        return Err(SpecialError::ArgumentTooSmall(s));
    }
    let sf = s as f64;
    let mut head = 0.0;
    for k in (0..SHIFT).rev() {
        head += (k as f64 + a).powf(-sf);
    }
    let x = SHIFT as f64 + a;
    let mut tail = x.powf(1.0 - sf) / (sf - 1.0) + 0.5 * x.powf(-sf);
    // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * x^(-s-2j+1)
    let mut rising = sf;
    let mut xpow = x.powf(-sf - 1.0);
    let mut fact = 2.0;
    for j in 1..=TERMS {
        let b = rat_to_f64(&bernoulli(2 * j)?);
        tail += b / fact * rising * xpow;
        rising *= (sf + 2.0 * j as f64 - 1.0) * (sf + 2.0 * j as f64);
        xpow /= x * x;
        fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
    }
    Ok(head + tail)
}

/// The odd quadratic characters of conductor 3 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Character {
    Minus3,
    Minus4,
}

pub fn dirichlet_l(chi: Character, s: i64) -> Result<f64, SpecialError> {
    if s < 2 {
        return Err(SpecialError::ArgumentTooSmall(s));
    }
    match chi {
        Character::Minus4 => Ok(alternating_sum(|k| ((2 * k + 1) as f64).powi(-(s as i32)))),
        Character::Minus3 => {
            let d = hurwitz_zeta(s, 1.0 / 3.0)? - hurwitz_zeta(s, 2.0 / 3.0)?;
            Ok(3f64.powi(-(s as i32)) * d)
        }
    }
}

fn bernoulli_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b: Vec<BigRational> = Vec::with_capacity(MAX_BERNOULLI + 1);
        b.push(BigRational::one());
        for n in 1..=MAX_BERNOULLI {
            // sum_{k<=n} C(n+1, k) B_k = 0
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += bk * BigRational::from_integer(binom.clone());
                binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
        }
        b
    })
}

/// Exact Bernoulli number with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Result<BigRational, SpecialError> {
    bernoulli_table()
        .get(n)
        .cloned()
        .ok_or(SpecialError::BernoulliOutOfRange(n))
}

/// Argument lists `(2^2, 4^2, ..., (2n-2)^2)` and `(1^2, 3^2, ..., (2n-1)^2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricArgs(pub Vec<BigInt>);

impl SymmetricArgs {
    pub fn even(n: u32) -> Self {
        Self((1..n).map(|j| BigInt::from(2 * j).pow(2)).collect())
    }

    pub fn odd(n: u32) -> Self {
        Self((0..n).map(|j| BigInt::from(2 * j + 1).pow(2)).collect())
    }
}

/// Elementary symmetric polynomial `s_l` of the arguments.
pub fn elem_sym(l: usize, args: &SymmetricArgs) -> BigInt {
    if l > args.0.len() {
        return BigInt::zero();
    }
    // e[j] after processing a prefix of the arguments.
    let mut e = vec![BigInt::zero(); l + 1];
    e[0] = BigInt::one();
    for a in &args.0 {
        for j in (1..=l).rev() {
            let t = &e[j - 1] * a;
            e[j] += t;
        }
    }
    e.swap_remove(l)
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// `1 - 2^(-e)` exactly.
fn one_minus_pow2(e: u32) -> BigRational {
    let d = BigInt::one() << e;
    BigRational::new(&d - BigInt::one(), d)
}

/// `2^(e) - 1` for a possibly negative exponent `e >= -1`.
fn pow2_minus_one(e: i64) -> BigRational {
    if e >= 0 {
        rat((BigInt::one() << e as u32) - BigInt::one())
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u32) - BigRational::one()
    }
}

fn sign(e: i64) -> BigRational {
    if e.rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coefficient {
    A,
    B,
    C,
    D,
    E,
    F,
}

/// The coefficient sums appearing in the closed forms. `n` is used only by
/// [`Coefficient::F`].
pub fn coefficient(kind: Coefficient, h: i64, n: i64) -> Result<f64, SpecialError> {
    use Coefficient::*;
    let min_h = if matches!(kind, B | D) { 0 } else { 1 };
    if h < min_h {
        return Err(SpecialError::IndexOutOfRange { kind, h });
    }
    let hu = h as u64;
    let z = |s: u64| zeta(s as i64);
    let l4 = |s: u64| dirichlet_l(Character::Minus4, s as i64);
    let b2 = |j: u64| bernoulli(2 * j as usize);
    let value = match kind {
        A => rat_to_f64(&(rat(factorial(2 * hu)) * one_minus_pow2(2 * h as u32 + 1))) * z(2 * hu + 1)?,
        B => rat_to_f64(&rat(factorial(2 * hu + 1))) * l4(2 * hu + 2)?,
        C => {
            let mut acc = 0.0;
            for l in 1..=hu {
                let q = rat(binomial(2 * hu, 2 * l)) * sign((hu - l) as i64) / rat(BigInt::from(4 * hu))
                    * b2(hu - l)?
                    * rat(factorial(2 * l + 2))
                    * one_minus_pow2(2 * l as u32 + 3);
                acc += rat_to_f64(&q) * PI.powi(2 * (hu - l) as i32) * z(2 * l + 3)?;
            }
            acc
        }
        D => {
            let mut acc = 0.0;
            for l in 0..=hu {
                let q = rat(binomial(2 * hu + 1, 2 * l + 1)) * sign((hu - l) as i64)
                    / rat(BigInt::from(2 * (2 * hu + 1)))
                    * b2(hu - l)?
                    * rat(factorial(2 * l + 3));
                acc += rat_to_f64(&q) * PI.powi(2 * (hu - l) as i32) * l4(2 * l + 4)?;
            }
            acc
        }
        E => {
            let lead = rat(factorial(2 * hu)) / rat(BigInt::from(2)) * one_minus_pow2(2 * h as u32 + 1);
            let mut acc = rat_to_f64(&lead) * z(2 * hu + 1)?;
            for l in 1..=hu {
                let q = pow2_minus_one(2 * (h - l as i64) - 1)
                    * rat(binomial(2 * hu, 2 * l))
                    * sign(h - l as i64 + 1)
                    / rat(BigInt::from(2 * hu))
                    * b2(hu - l)?
                    * rat(factorial(2 * l))
                    * one_minus_pow2(2 * l as u32 + 1);
                acc += rat_to_f64(&q) * PI.powi(2 * (hu - l) as i32) * z(2 * l + 1)?;
            }
            acc
        }
        F => {
            let nf = n as f64;
            let first = rat(factorial(2 * hu + 2)) / rat(BigInt::from(2)) * one_minus_pow2(2 * h as u32 + 3);
            let second = rat(factorial(2 * hu)) * one_minus_pow2(2 * h as u32 + 1);
            let mut acc = rat_to_f64(&first) * z(2 * hu + 3)?
                + PI * PI * nf * nf / 2.0 * rat_to_f64(&second) * z(2 * hu + 1)?;
            let mut inner = 0.0;
            for l in 1..=hu {
                let q = pow2_minus_one(2 * (h - l as i64) - 1)
                    * rat(binomial(2 * hu, 2 * l))
                    * sign(h - l as i64 + 1)
                    / rat(BigInt::from(4 * hu))
                    * b2(hu - l)?
                    * rat(factorial(2 * l))
                    * one_minus_pow2(2 * l as u32 + 1);
                inner += rat_to_f64(&q) * PI.powi(2 * (hu + 1 - l) as i32) * z(2 * l + 1)?;
            }
            acc += nf * (2.0 * nf + 1.0) * inner;
            acc
        }
    };
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    R,
    S,
    T,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(Family::R),
            "S" | "s" => Ok(Family::S),
            "T" | "t" => Ok(Family::T),
            _ => Err(format!("unknown family `{s}` (expected R, S or T)")),
        }
    }
}

/// `s_{n-h}(args) / fact` as a float.
fn weight(n: u32, h: u32, args: &SymmetricArgs, fact: u64) -> f64 {
    rat_to_f64(&BigRational::new(elem_sym((n - h) as usize, args), factorial(fact)))
}

/// Closed-form Mahler measure of `R_m`, `S_m` or `T_m`, in nats.
///
/// The odd-index `T` formula is evaluated exactly as stated in the source;
/// for `m = 1` its sum is empty and it returns `log(2)/2`.
pub fn closed_form(family: Family, m: u32) -> Result<f64, SpecialError> {
    if !(1..=MAX_FAMILY_INDEX).contains(&m) {
        return Err(SpecialError::FamilyIndexOutOfRange(m));
    }
    let n = m / 2;
    let two_over_pi = 2.0 / PI;
    let half_log2 = 0.5 * 2f64.ln();
    let mut acc = 0.0;
    if m.is_multiple_of(2) {
        let args = SymmetricArgs::even(n);
        let fact = 2 * n as u64 - 1;
        for h in 1..=n {
            let w = weight(n, h, &args, fact);
            let hi = h as i64;
            acc += w * match family {
                Family::R => two_over_pi.powi(2 * h as i32) * coefficient(Coefficient::A, hi, 0)?,
                Family::S => two_over_pi.powi(2 * h as i32 + 2) * coefficient(Coefficient::C, hi, 0)?,
                Family::T => two_over_pi.powi(2 * h as i32) * coefficient(Coefficient::E, hi, 0)?,
            };
        }
    } else {
        match family {
            Family::R | Family::S => {
                let args = SymmetricArgs::odd(n);
                for h in 0..=n {
                    let w = weight(n, h, &args, 2 * n as u64);
                    acc += w * match family {
                        Family::R => two_over_pi.powi(2 * h as i32 + 1) * coefficient(Coefficient::B, h as i64, 0)?,
                        _ => two_over_pi.powi(2 * h as i32 + 3) * coefficient(Coefficient::D, h as i64, 0)?,
                    };
                }
            }
            Family::T => {
                let args = SymmetricArgs::even(n);
                for h in 1..=n {
                    let w = weight(n, h, &args, 2 * n as u64 + 1);
                    acc += w * two_over_pi.powi(2 * h as i32 + 2) * coefficient(Coefficient::F, h as i64, n as i64)?;
                }
            }
        }
    }
    Ok(match family {
        Family::T => half_log2 + acc,
        _ => acc,
    })
}

/// A named right-hand side, recomputed from its formula on every call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedConstant {
    pub key: String,
    pub value: f64,
    pub formula: String,
}

pub const CONSTANT_KEYS: [&str; 5] = ["smyth2", "smyth3", "condon", "zeta5_93", "l21_conjecture_rhs"];

/// Looks up a constant. `l21_conjecture_rhs` has no formula here: it is
/// `5/4 L'(E, -1)` for the elliptic curve of conductor 21 and must be
/// supplied by the caller.
pub fn named_constant(key: &str, user_value: Option<f64>) -> Result<NamedConstant, SpecialError> {
    let (value, formula) = match key {
        "smyth2" => (
            3.0 * 3f64.sqrt() / (4.0 * PI) * dirichlet_l(Character::Minus3, 2)?,
            "3*sqrt(3)/(4*pi) * L(chi_-3, 2)",
        ),
        "smyth3" => (7.0 * zeta(3)? / (2.0 * PI * PI), "7*zeta(3)/(2*pi^2)"),
        "condon" => (28.0 * zeta(3)? / (5.0 * PI * PI), "28*zeta(3)/(5*pi^2)"),
        "zeta5_93" => (93.0 * zeta(5)? / PI.powi(4), "93*zeta(5)/pi^4"),
        "l21_conjecture_rhs" => (
            user_value.ok_or_else(|| SpecialError::UserValueRequired(key.to_string()))?,
            "5/4 * L'(E_21a1, -1) (user supplied)",
        ),
        _ => return Err(SpecialError::UnknownConstant(key.to_string())),
    };
    Ok(NamedConstant {
        key: key.to_string(),
        value,
        formula: formula.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn zeta_values() {
        assert!(close(zeta(2).unwrap(), PI * PI / 6.0, 1e-15));
        assert!(close(zeta(4).unwrap(), PI.powi(4) / 90.0, 1e-15));
        assert!(close(zeta(3).unwrap(), 1.2020569031595942, 1e-15));
        assert!(close(zeta(5).unwrap(), 1.0369277551433699, 1e-15));
        assert!(zeta(1).is_err());
        assert!(close(zeta(201).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn l_values() {
        assert!(close(dirichlet_l(Character::Minus4, 2).unwrap(), 0.915965594177219, 1e-14));
        assert!(close(dirichlet_l(Character::Minus4, 4).unwrap(), 0.988944551741105, 1e-14));
        assert!(close(dirichlet_l(Character::Minus3, 2).unwrap(), 0.781302412896486, 1e-14));
    }

    #[test]
    fn hurwitz_reduces_to_zeta() {
        for s in 2..8 {
            assert!(close(hurwitz_zeta(s, 1.0).unwrap(), zeta(s).unwrap(), 1e-15), "s = {s}");
        }
    }

    #[test]
    fn bernoulli_numbers() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(bernoulli(0).unwrap(), r(1, 1));
        assert_eq!(bernoulli(1).unwrap(), r(-1, 2));
        assert_eq!(bernoulli(2).unwrap(), r(1, 6));
        assert_eq!(bernoulli(12).unwrap(), r(-691, 2730));
        for n in (3..=51).step_by(2) {
            assert!(bernoulli(n).unwrap().is_zero());
        }
        assert!(bernoulli(201).is_err());
    }

    #[test]
    fn even_zeta_matches_bernoulli_closed_form() {
        for n in 1..=10u32 {
            let b = rat_to_f64(&bernoulli(2 * n as usize).unwrap().abs());
            let fact: f64 = (1..=2 * n).map(f64::from).product();
            let expected = PI.powi(2 * n as i32) * b * 2f64.powi(2 * n as i32 - 1) / fact;
            assert!(close(zeta(2 * n as i64).unwrap(), expected, 1e-14));
        }
    }

    #[test]
    fn symmetric_functions() {
        let a = SymmetricArgs::even(3);
        assert_eq!(a.0, vec![BigInt::from(4), BigInt::from(16)]);
        assert_eq!(elem_sym(0, &a), BigInt::from(1));
        assert_eq!(elem_sym(1, &a), BigInt::from(20));
        assert_eq!(elem_sym(2, &a), BigInt::from(64));
        assert_eq!(elem_sym(3, &a), BigInt::from(0));
        assert_eq!(SymmetricArgs::odd(2).0, vec![BigInt::from(1), BigInt::from(9)]);
        assert!(SymmetricArgs::even(1).0.is_empty());
    }

    #[test]
    fn coefficient_examples() {
        let z3 = zeta(3).unwrap();
        let z5 = zeta(5).unwrap();
        let cat = dirichlet_l(Character::Minus4, 2).unwrap();
        assert!(close(coefficient(Coefficient::A, 1, 0).unwrap(), 1.75 * z3, 1e-15));
        assert!(close(coefficient(Coefficient::B, 0, 0).unwrap(), cat, 1e-15));
        assert!(close(coefficient(Coefficient::C, 1, 0).unwrap(), 93.0 / 16.0 * z5, 1e-15));
        assert!(coefficient(Coefficient::A, 0, 0).is_err());
        assert!(coefficient(Coefficient::D, -1, 0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let z3 = zeta(3).unwrap();
        let z5 = zeta(5).unwrap();
        let cat = dirichlet_l(Character::Minus4, 2).unwrap();
        assert!(close(closed_form(Family::R, 1).unwrap(), 2.0 * cat / PI, 1e-15));
        assert!(close(closed_form(Family::R, 2).unwrap(), 7.0 * z3 / (PI * PI), 1e-15));
        assert!(close(closed_form(Family::S, 2).unwrap(), 93.0 * z5 / PI.powi(4), 1e-12));
        let l44 = dirichlet_l(Character::Minus4, 4).unwrap();
        assert!(close(closed_form(Family::S, 1).unwrap(), 24.0 * l44 / PI.powi(3), 1e-15));
        assert!(closed_form(Family::R, 0).is_err());
        assert!(closed_form(Family::T, 21).is_err());
        for m in 1..=MAX_FAMILY_INDEX {
            for f in [Family::R, Family::S, Family::T] {
                assert!(closed_form(f, m).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn named_constants() {
        assert!(close(named_constant("smyth3", None).unwrap().value, 0.4262783988175058, 1e-14));
        assert!(close(named_constant("smyth2", None).unwrap().value, 0.3230659472194505, 1e-14));
        assert!(named_constant("l21_conjecture_rhs", None).is_err());
        assert_eq!(named_constant("l21_conjecture_rhs", Some(0.5)).unwrap().value, 0.5);
        assert!(named_constant("nope", None).is_err());
    }
}
