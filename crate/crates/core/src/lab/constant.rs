use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};

/// Required agreement between the quadrature and the closed form.
pub const GAMMA_AGREEMENT_TOL: f64 = 1e-8;

const PERIODS: usize = 64;
const GK_TOL: f64 = 1e-14;
const GK_MAX_DEPTH: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableConstant {
    pub p: f64,
    /// `(∫₀^∞ u^{-p} sin u du)^{-1}` by quadrature.
    pub c: f64,
    /// `1/(Γ(1−p)·cos(πp/2))`.
    pub c_gamma: f64,
    pub agreement: f64,
    /// `(∫₀^1 u^{-p} sin u du)^{-1}`.
    pub c_unit: f64,
}

/// Tail constant of the symmetric `p`-stable law, with the truncated-integral variant.
pub fn compute_c(p: f64) -> Result<StableConstant> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain(format!("p = {p} outside (1,2)")));
    }
    let unit = unit_integral(p);
    let t = 2.0 * std::f64::consts::PI * PERIODS as f64;
    let f = |u: f64| u.powf(-p) * u.sin();
    let mut middle = gauss_kronrod(&f, 1.0, std::f64::consts::PI);
    for k in 1..2 * PERIODS {
        let a = k as f64 * std::f64::consts::PI;
        middle += gauss_kronrod(&f, a, a + std::f64::consts::PI);
    }
    let total = unit + middle + oscillatory_tail(p, t);
    let c = 1.0 / total;
    let c_gamma = 1.0 / (gamma(1.0 - p) * (std::f64::consts::FRAC_PI_2 * p).cos());
    let agreement = (c - c_gamma).abs();
    if !(agreement <= GAMMA_AGREEMENT_TOL) {
        return Err(Error::Numeric(format!(
            "quadrature {c} and gamma identity {c_gamma} disagree by {agreement}"
        )));
    }
    Ok(StableConstant {
        p,
        c,
        c_gamma,
        agreement,
        c_unit: 1.0 / unit,
    })
}

/// `∫₀^1 u^{-p} sin u du = Σ_k (−1)^k / ((2k+1)! (2k+2−p))`.
fn unit_integral(p: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..20 {
        if k > 0 {
            fact *= ((2 * k) * (2 * k + 1)) as f64;
        }
        let term = 1.0 / (fact * (2 * k + 2) as f64 - fact * p);
        sum += if k % 2 == 0 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    sum
}

/// `∫_T^∞ u^{-p} sin u du` for `T ∈ 2πℕ` by its asymptotic expansion
/// `Σ_k (−1)^k (p)_{2k} T^{-p-2k}`, stopped at the smallest term.
fn oscillatory_tail(p: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut rising = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..30 {
        if k > 0 {
            let j = (2 * k - 2) as f64;
            rising *= (p + j) * (p + j + 1.0);
        }
        let term = rising * t.powf(-p - 2.0 * k as f64);
        if term >= prev {
            break;
        }
        sum += if k % 2 == 0 { term } else { -term };
        prev = term;
        if term < 1e-20 {
            break;
        }
    }
    sum
}

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

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    fn go(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, 0.5 * tol, depth - 1) + go(f, m, b, 0.5 * tol, depth - 1)
    }
    go(f, a, b, GK_TOL, GK_MAX_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_integrates_smooth_functions() {
        let v = gauss_kronrod(&|x: f64| x.exp(), 0.0, 1.0);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn constant_at_three_halves() {
        let k = compute_c(1.5).unwrap();
        // Γ(−1/2) = −2√π, cos(3π/4) = −1/√2, so C = 1/√(2π)
        let closed = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((k.c - closed).abs() < 1e-9, "{} vs {closed}", k.c);
        assert!(k.agreement < GAMMA_AGREEMENT_TOL);
        assert!((k.c_unit - 0.516754).abs() < 1e-6, "{}", k.c_unit);
    }

    #[test]
    fn constant_is_continuous_in_p() {
        let grid: Vec<f64> = (1..40).map(|k| 1.0 + k as f64 / 40.0).collect();
        let values: Vec<f64> = grid.iter().map(|&p| compute_c(p).unwrap().c).collect();
        for w in values.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.05);
        }
        assert!(compute_c(2.0).is_err());
        assert!(compute_c(1.0).is_err());
    }
}
