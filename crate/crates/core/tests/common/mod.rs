//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use hypercone::{HyperbolicForm, PolynomialForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// (x1+x2+x3)(x1−x2+x3)(2x1−x2−x3)(x1+2x2−x3) with e = (0, 0, 1).
pub fn fixture_poly() -> PolynomialForm {
    PolynomialForm::linear_factors(vec![
        vec![1.0, 1.0, 1.0],
        vec![1.0, -1.0, 1.0],
        vec![2.0, -1.0, -1.0],
        vec![1.0, 2.0, -1.0],
    ])
    .unwrap()
}

pub fn fixture_form() -> HyperbolicForm {
    HyperbolicForm::new(fixture_poly(), vec![0.0, 0.0, 1.0]).unwrap()
}

/// The fixture's eigenvalues written as linear forms: each factor divided by
/// its value at e.
pub fn fixture_eigenvalues(x: &[f64]) -> Vec<f64> {
    let mut v = vec![
        x[0] + x[1] + x[2],
        x[0] - x[1] + x[2],
        -2.0 * x[0] + x[1] + x[2],
        -x[0] - 2.0 * x[1] + x[2],
    ];
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// σ_k by enumerating all k-subsets.
pub fn brute_elesym(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            s += (0..n).filter(|i| mask >> i & 1 == 1).map(|i| x[i]).product::<f64>();
        }
    }
    s
}

/// C(n, k) in exact integer arithmetic.
pub fn choose(n: usize, k: usize) -> u128 {
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Central differences of a scalar function.
pub fn fd_grad(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f(lo) < 0 < f(hi), f increasing
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn pnorm(v: &[f64], p: f64) -> f64 {
    v.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Euclidean projection onto {x0 >= ||x̄||_p} from the KKT system.
///
/// On the boundary the KKT conditions with multiplier m > 0 give
/// x_0 = c_0 + m and |x_i| = u_i with u_i + m (u_i / x_0)^{p-1} = |c_i|.
/// The inner equations and the outer condition ||u(m)||_p = x_0 are solved
/// by bisection.
pub fn pcone_projection(c: &[f64], p: f64) -> Vec<f64> {
    let c0 = c[0];
    let tail = &c[1..];
    let tn = pnorm(tail, p);
    if c0 >= tn {
        return c.to_vec();
    }
    let q = p / (p - 1.0);
    let dual = pnorm(tail, q);
    if -c0 >= dual {
        return vec![0.0; c.len()];
    }
    let solve_tail = |m: f64, r: f64| -> Vec<f64> {
        tail.iter()
            .map(|&ci| {
                let a = ci.abs();
                if a == 0.0 {
                    return 0.0;
                }
                bisect(0.0, a, |u| u + m * (u / r).powf(p - 1.0) - a)
            })
            .collect()
    };
    // g(m) = ||u(m)||_p − (c0 + m) decreases in m; find its root with c0 + m > 0.
    let g = |m: f64| -> f64 {
        let r = c0 + m;
        let u = solve_tail(m, r);
        pnorm(&u, p) - r
    };
    let lo = (-c0).max(0.0) * (1.0 + 1e-15) + 1e-300;
    let mut hi = lo.max(1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    let m = bisect(lo, hi, |m| -g(m));
    let r = c0 + m;
    let u = solve_tail(m, r);
    let mut out = Vec::with_capacity(c.len());
    out.push(r);
    out.extend(tail.iter().zip(&u).map(|(ci, ui)| ci.signum() * ui));
    out
}
