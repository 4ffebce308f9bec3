//! Independent oracles shared by the integration tests. Nothing here calls
//! into the erf or FFT paths of the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// 15-point Gauss–Kronrod nodes/weights on [-1, 1] (positive half, center first).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            value
        } else {
            let m = 0.5 * (a + b);
            rec(f, a, m, tol / 2.0, depth - 1) + rec(f, m, b, tol / 2.0, depth - 1)
        }
    }
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| rec(&f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / PANELS as f64, 40))
        .sum()
}

/// Closed-form position density (πσ²)^(-1/2) e^(-x²/σ²).
pub fn density(sigma: f64, x: f64) -> f64 {
    (-x * x / (sigma * sigma)).exp() / (PI.sqrt() * sigma)
}

/// P(detect) by quadrature of the closed-form density over [d-k, d+k].
pub fn window_quadrature(sigma: f64, d: f64, k: f64) -> f64 {
    integrate(|x| density(sigma, x), d - k, d + k, 1e-15)
}

/// Count of n-particle outcome strings with at least one success, each
/// particle succeeding in exactly one of its two equally likely branches,
/// divided by 2ⁿ.
pub fn ensemble_by_enumeration(n: u32) -> f64 {
    let total = 1u64 << n;
    let hits = (0..total).filter(|outcome| *outcome != 0).count() as u64;
    hits as f64 / total as f64
}
