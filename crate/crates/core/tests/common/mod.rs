//! Test-only numerical oracles, independent of the library's closed forms.

#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// `∫_a^∞ f` by mapping `t ∈ [0, 1)` to `a + t/(1 − t)`.
pub fn integrate_to_infinity(f: &dyn Fn(f64) -> f64, a: f64, tol: f64) -> f64 {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        f(a + t / s) / (s * s)
    };
    adaptive_simpson(&g, 0.0, 1.0, tol)
}

/// `E₁(x)` from its defining integral.
pub fn e1_quadrature(x: f64) -> f64 {
    // tolerance relative to the e^{-x}/x scale of the result
    let tol = 1e-15 * (-x).exp() / x.max(1.0);
    adaptive_simpson(&|t: f64| (-t).exp() / t, x, x + 1.0, tol)
        + integrate_to_infinity(&|t: f64| (-t).exp() / t, x + 1.0, tol)
}

/// `E[min(P, Γ/g)]` for `g ~ Exp(1)` from the defining integral.
pub fn capped_power_quadrature(p: f64, limit: f64) -> f64 {
    let knee = limit / p;
    p * adaptive_simpson(&|g: f64| (-g).exp(), 0.0, knee, 1e-14)
        + integrate_to_infinity(&|g: f64| limit / g * (-g).exp(), knee, 1e-14)
}

/// `E[1/(1 + Q e)]` for `e ~ Exp(1)`.
pub fn attenuation_quadrature(q: f64) -> f64 {
    integrate_to_infinity(&|e: f64| (-e).exp() / (1.0 + q * e), 0.0, 1e-14)
}

/// `Σ_{i=1..K} 1/i` summed from the largest term.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = compensated_sum(xs.iter().copied()) / n;
    let v = compensated_sum(xs.iter().map(|x| (x - m) * (x - m))) / (n - 1.0);
    (m, (v / n).sqrt())
}
