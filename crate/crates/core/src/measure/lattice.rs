//! Rank-1 lattice rules with generating vectors from the fast
//! component-by-component construction (unit weights, Korobov-space kernel
//! of smoothness one).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn kernel(x: f64) -> f64 {
    2.0 * std::f64::consts::PI.powi(2) * (x * x - x + 1.0 / 6.0)
}

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest prime `<= n` (`n >= 2`).
pub(crate) fn prime_at_most(n: usize) -> usize {
    (2..=n.max(2)).rev().find(|&p| is_prime(p)).unwrap()
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn primitive_root(n: usize) -> usize {
    let phi = n - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..n)
        .find(|&g| factors.iter().all(|&q| pow_mod(g as u64, (phi / q) as u64, n as u64) != 1))
        .unwrap_or(1)
}

/// Squared worst-case error minus one, up to the constant `k = 0` term, for
/// a full generating vector. Used to test the fast construction.
#[cfg(test)]
pub(crate) fn criterion(n: usize, z: &[usize]) -> f64 {
    (0..n)
        .map(|k| z.iter().map(|&zj| 1.0 + kernel(((k * zj) % n) as f64 / n as f64)).product::<f64>())
        .sum::<f64>()
        / n as f64
        - 1.0
}

/// Straightforward O(d n^2) construction, the reference for the FFT version.
#[cfg(test)]
pub(crate) fn cbc_brute_force(n: usize, d: usize) -> Vec<usize> {
    let mut z = vec![1usize];
    while z.len() < d {
        let mut best = (f64::INFINITY, 0usize);
        for cand in 1..n {
            let mut trial = z.clone();
            trial.push(cand);
            let e = criterion(n, &trial);
            if e < best.0 {
                best = (e, cand);
            }
        }
        z.push(best.1);
    }
    z
}

/// Fast CBC for prime `n`: the candidate sums form a circular
/// cross-correlation once indices are ordered by powers of a primitive root.
pub(crate) fn cbc_fast(n: usize, d: usize) -> Vec<usize> {
    assert!(is_prime(n) && n >= 3, "cbc_fast needs an odd prime");
    let mut z = vec![1usize];
    if d <= 1 {
        return z;
    }
    let m = n - 1;
    let g = primitive_root(n);
    // perm[b] = g^b mod n
    let mut perm = Vec::with_capacity(m);
    let mut v = 1usize;
    for _ in 0..m {
        perm.push(v);
        v = v * g % n;
    }
    let omega: Vec<f64> = perm.iter().map(|&k| kernel(k as f64 / n as f64)).collect();
    // p[k] = prod over chosen components of (1 + kernel(k z_j / n)), k = 1..n-1
    let mut p: Vec<f64> = (0..n).map(|k| 1.0 + kernel((k % n) as f64 / n as f64)).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut omega_hat: Vec<Complex<f64>> = omega.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut omega_hat);
    while z.len() < d {
        let mut ph: Vec<Complex<f64>> = perm.iter().map(|&k| Complex::new(p[k], 0.0)).collect();
        fwd.process(&mut ph);
        let mut c: Vec<Complex<f64>> = ph.iter().zip(&omega_hat).map(|(a, b)| a.conj() * b).collect();
        inv.process(&mut c);
        // c[a] / m = sum_b p[g^b] kernel(g^(a+b) / n): the candidate z = g^a.
        let mut best = (f64::INFINITY, usize::MAX);
        for (a, val) in c.iter().enumerate() {
            let e = val.re / m as f64;
            let cand = perm[a];
            if e < best.0 || (e == best.0 && cand < best.1) {
                best = (e, cand);
            }
        }
        let zs = best.1;
        for (k, pk) in p.iter_mut().enumerate().skip(1) {
            *pk *= 1.0 + kernel(((k * zs) % n) as f64 / n as f64);
        }
        z.push(zs);
    }
    z
}

/// Memoized generating vector for `n` points in `d` dimensions.
pub(crate) fn generating_vector(n: usize, d: usize) -> Arc<Vec<usize>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<usize>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(z) = cache.lock().unwrap().get(&(n, d)) {
        return z.clone();
    }
    // Computed outside the lock; a concurrent duplicate gives the same vector.
    let z = Arc::new(cbc_fast(n, d));
    cache.lock().unwrap().entry((n, d)).or_insert(z).clone()
}
