//! Adaptive Gauss–Kronrod quadrature with algebraic endpoint-singularity
//! absorption.
//!
//! The integrands here are Beta-like kernels x^p (1-x)^q f(x) whose exponents
//! may lie in (-1, 0). A power substitution x = u^{1/(1+p)} removes the
//! endpoint singularity before the adaptive rule sees it, which keeps the
//! subdivision depth bounded for rates at large block counts.

use crate::error::{Result, SimError};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard QUADPACK dqk15 constants.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One GK15 panel: returns (kronrod estimate, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive integration of `f` over [a, b] to relative tolerance
/// `rel_tol`. Bisects the segment with the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(SimError::Argument(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (v0, e0) = gk15(&f, a, b);
    let mut segments = vec![(e0, a, b, v0)];
    let mut total = v0;
    let mut total_err = e0;
    const MAX_SEGMENTS: usize = 4096;
    while total_err > rel_tol * total.abs().max(f64::MIN_POSITIVE) && total_err > 1e-300 {
        if segments.len() >= MAX_SEGMENTS {
            let achieved = total_err / total.abs().max(f64::MIN_POSITIVE);
            return Err(SimError::Numeric {
                message: "quadrature did not converge".into(),
                achieved,
            });
        }
        // split worst segment
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.partial_cmp(&y.1 .0).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let (err, lo, hi, val) = segments.swap_remove(worst);
        total -= val;
        total_err -= err;
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk15(&f, l, h);
            total += v;
            total_err += e;
            segments.push((e, l, h, v));
        }
    }
    Ok(total)
}

/// Integrate x^p * g(x) over [0, hi] where p may lie in (-1, 0).
///
/// For p < 0 the substitution x = u^{1/(1+p)} gives
///   dx x^p = du / (1+p),
/// turning the integrand into g(u^{1/(1+p)}) / (1+p) on [0, hi^{1+p}].
pub fn integrate_with_zero_singularity<G: Fn(f64) -> f64>(
    g: G,
    p: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    if p <= -1.0 {
        return Err(SimError::Argument(format!(
            "endpoint exponent {p} is not integrable"
        )));
    }
    if p >= 0.0 {
        return integrate(|x| x.powf(p) * g(x), 0.0, hi, rel_tol);
    }
    let q = 1.0 + p;
    let s = 1.0 / q;
    integrate(|u| g(u.powf(s)) / q, 0.0, hi.powf(q), rel_tol)
}

/// Integrate x^p (1-x)^q f(x) over [lo, hi] inside [0, 1], absorbing an
/// algebraic singularity at either endpoint. `f` must be smooth on [lo, hi].
pub fn integrate_beta_kernel<F: Fn(f64) -> f64 + Copy>(
    f: F,
    p: f64,
    q: f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(SimError::Argument(format!("bad kernel range [{lo}, {hi}]")));
    }
    if p <= -1.0 || q <= -1.0 {
        return Err(SimError::Argument(format!(
            "kernel exponents ({p}, {q}) are not integrable"
        )));
    }
    let mid = if lo == 0.0 && hi == 1.0 {
        0.5
    } else if lo == 0.0 {
        hi
    } else {
        lo
    };
    let mut total = 0.0;
    if lo < mid && lo == 0.0 {
        // left piece, singularity (if any) at 0
        total += integrate_with_zero_singularity(|x| (1.0 - x).powf(q) * f(x), p, mid, rel_tol)?;
    } else if lo < mid {
        total += integrate(|x| x.powf(p) * (1.0 - x).powf(q) * f(x), lo, mid, rel_tol)?;
    }
    if mid < hi && hi == 1.0 {
        // right piece, mirrored so the potential singularity sits at 0
        total += integrate_with_zero_singularity(
            |y| (1.0 - y).powf(p) * f(1.0 - y),
            q,
            1.0 - mid,
            rel_tol,
        )?;
    } else if mid < hi {
        total += integrate(|x| x.powf(p) * (1.0 - x).powf(q) * f(x), mid, hi, rel_tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::beta::beta;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(v, 8.0, max_relative = 1e-13);
    }

    #[test]
    fn beta_kernel_matches_beta_function() {
        // B(a, b) = int x^{a-1} (1-x)^{b-1}
        for (a, b) in [(0.5, 1.5), (0.3, 0.7), (2.5, 0.4), (1.0, 1.0)] {
            let v = integrate_beta_kernel(|_| 1.0, a - 1.0, b - 1.0, 0.0, 1.0, 1e-12).unwrap();
            assert_relative_eq!(v, beta(a, b), max_relative = 1e-10);
        }
    }

    #[test]
    fn truncated_power_integral() {
        // int_0^{0.5} x^{-0.5} dx = 2 sqrt(0.5)
        let v = integrate_with_zero_singularity(|_| 1.0, -0.5, 0.5, 1e-12).unwrap();
        assert_relative_eq!(v, 2.0 * 0.5f64.sqrt(), max_relative = 1e-11);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let v = integrate(|x| (20.0 * x).sin(), 0.0, 1.0, 1e-11).unwrap();
        let exact = (1.0 - (20.0f64).cos()) / 20.0;
        assert_relative_eq!(v, exact, max_relative = 1e-9);
    }
}
