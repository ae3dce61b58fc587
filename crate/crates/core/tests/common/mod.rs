//! Independent quadrature oracle: adaptive Gauss–Kronrod (7/15) on plain
//! closures, sharing no code with the library's grid or closed-form paths.

#![allow(dead_code)]

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
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// (Kronrod estimate, |Kronrod − Gauss|, ∫|f| estimate)
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (l, r) = (f(c - x), f(c + x));
        kronrod += WGK[j] * (l + r);
        abs += WGK[j] * (l.abs() + r.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (l + r);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs())
}

/// ∫ₐᵇ f with absolute tolerance `tol`, spread over subintervals by length.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, density: f64, depth: u32) -> f64 {
        let (v, err, abs) = gk15(f, a, b);
        // below ~50 ulp of ∫|f| the estimate is rounding noise
        if err <= (density * (b - a)).max(50.0 * f64::EPSILON * abs) || depth > 30 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, density, depth + 1) + rec(f, m, b, density, depth + 1)
    }
    // start from 64 panels so a narrow peak cannot slip between the nodes
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| rec(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / (b - a), 0)).sum()
}

/// Normalized Gaussian pointer exp(−(p−c)²/4)·(2π)^(−1/4), natural units.
pub fn pointer(p: f64, center: f64) -> f64 {
    (2.0 * std::f64::consts::PI).powf(-0.25) * (-(p - center).powi(2) / 4.0).exp()
}

/// (norm, mean, std) of the real density |f|² on [−40, 40].
pub fn moments_of(f: &dyn Fn(f64) -> f64) -> (f64, f64, f64) {
    let (a, b, tol) = (-40.0, 40.0, 1e-14);
    let n = integrate(&|p| f(p).powi(2), a, b, tol);
    let m = integrate(&|p| p * f(p).powi(2), a, b, tol) / n;
    let v = integrate(&|p| (p - m).powi(2) * f(p).powi(2), a, b, tol) / n;
    (n, m, v.sqrt())
}
