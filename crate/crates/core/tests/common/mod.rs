#![allow(dead_code)]

use convpr_core::rng::{complex_gaussian_vec, stream};
use convpr_core::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Direct cyclic convolution `(a ⊛ x)_k = Σ_l a[(k − l) mod m] x_l`.
pub fn naive_conv(a: &[C64], x: &[C64]) -> Vec<C64> {
    let m = a.len();
    (0..m)
        .map(|k| x.iter().enumerate().map(|(l, xl)| a[(k + m - l % m) % m] * xl).sum())
        .collect()
}

/// Direct adjoint `(A* w)_l = Σ_k conj(a[(k − l) mod m]) w_k`.
pub fn naive_adjoint(a: &[C64], w: &[C64], n: usize) -> Vec<C64> {
    let m = a.len();
    (0..n)
        .map(|l| (0..m).map(|k| a[(k + m - l % m) % m].conj() * w[k]).sum())
        .collect()
}

pub fn gaussian(seed: u64, len: usize) -> Vec<C64> {
    complex_gaussian_vec(&mut stream(seed), len)
}

pub fn unit(v: Vec<C64>) -> Vec<C64> {
    let s = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / s).collect()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
