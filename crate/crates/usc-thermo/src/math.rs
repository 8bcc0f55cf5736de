//! Small numerical helpers: stable Boltzmann sums, special-function pieces
//! and derivative-free scalar minimization.

/// Log-sum-exp with the usual shift-by-max trick.
///
/// Returns `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln(2 cosh(x))` without overflow for large `|x|`.
pub fn ln_two_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Bose occupation `1/(e^{beta omega} - 1)`; zero at `T = 0`.
pub fn bose_occupation(omega: f64, beta: f64) -> f64 {
    if beta.is_infinite() {
        return 0.0;
    }
    1.0 / (beta * omega).exp_m1()
}

/// Cumulative table of `ln(n!)` for `n = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for n in 1..=n_max {
        acc += (n as f64).ln();
        table.push(acc);
    }
    table
}

/// The thermal double integral of an exponential kernel,
///
/// ```text
/// I(delta) = (omega_c / beta) Int_0^beta dt1 Int_0^t1 dt2 e^{delta (t1 - t2)}
///          = omega_c (e^{beta delta} - 1 - beta delta) / (beta delta^2),
/// ```
///
/// with the limit `I(0) = omega_c beta / 2`. Second-order imaginary-time
/// perturbation theory reduces each transition pair to one such factor.
pub fn exp_double_integral(beta: f64, delta: f64, omega_c: f64) -> f64 {
    let x = beta * delta;
    omega_c * beta * em1m_x_over_x2(x)
}

/// `I(delta)` multiplied by a log-space weight `e^{ln_w}`.
///
/// The spectral sums pair `I` with Boltzmann weights whose product is bounded
/// even when `e^{beta delta}` alone overflows; the overflow-prone factor is
/// folded into the exponent.
pub fn weighted_exp_double_integral(ln_w: f64, beta: f64, delta: f64, omega_c: f64) -> f64 {
    if ln_w == f64::NEG_INFINITY {
        return 0.0;
    }
    let x = beta * delta;
    if x.abs() < 1e-4 {
        return ln_w.exp() * omega_c * beta * em1m_x_over_x2(x);
    }
    omega_c * beta / (x * x) * ((ln_w + x).exp() - ln_w.exp() * (1.0 + x))
}

/// `(e^x - 1 - x)/x^2`, series near zero.
fn em1m_x_over_x2(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0
    } else {
        (x.exp_m1() - x) / (x * x)
    }
}

/// Golden-section minimization of a unimodal scalar function on `[a, b]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Coarse scan followed by golden-section refinement around the best sample.
///
/// Used for the mean-field order-parameter minimizations, which may develop
/// two symmetric minima; the scan picks the basin, golden section polishes.
pub fn scan_then_golden<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n_scan: usize,
    tol: f64,
) -> (f64, f64) {
    assert!(n_scan >= 2);
    let step = (b - a) / (n_scan - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..n_scan {
        let x = a + step * i as f64;
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    golden_section_min(f, lo, hi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let vals = [-1.0f64, -2.0, -3.0];
        let direct: f64 = vals.iter().map(|v| v.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&vals), direct, max_relative = 1e-14);
    }

    #[test]
    fn log_sum_exp_survives_large_shifts() {
        let vals = [-1000.0, -1001.0];
        let expected = -1000.0 + (1.0 + (-1.0f64).exp()).ln();
        assert_relative_eq!(log_sum_exp(&vals), expected, max_relative = 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_two_cosh_large_argument() {
        assert_relative_eq!(ln_two_cosh(0.3), (2.0 * 0.3f64.cosh()).ln(), max_relative = 1e-15);
        assert_relative_eq!(ln_two_cosh(400.0), 400.0, max_relative = 1e-15);
        assert_relative_eq!(ln_two_cosh(-400.0), 400.0, max_relative = 1e-15);
    }

    #[test]
    fn exp_double_integral_limits() {
        // I(0) = omega_c * beta / 2
        assert_relative_eq!(exp_double_integral(2.0, 0.0, 1.0), 1.0, max_relative = 1e-12);
        // against direct evaluation at a benign point
        let beta = 1.7f64;
        let delta = -0.9f64;
        let direct = ((beta * delta).exp() - 1.0 - beta * delta) / (beta * delta * delta);
        assert_relative_eq!(exp_double_integral(beta, delta, 1.0), direct, max_relative = 1e-13);
        // series/direct branch continuity right at the switch point
        let a = exp_double_integral(1.0, 1.00001e-4, 1.0);
        let b = exp_double_integral(1.0, 0.99999e-4, 1.0);
        assert_relative_eq!(a, b, max_relative = 1e-8);
    }

    #[test]
    fn weighted_integral_handles_huge_exponents() {
        // ln_w + x stays bounded while e^x alone overflows
        let beta = 100.0;
        let delta = 20.0;
        let ln_w = -2100.0;
        let got = weighted_exp_double_integral(ln_w, beta, delta, 1.0);
        let expected = 100.0 / (2000.0f64 * 2000.0) * ((ln_w + 2000.0f64).exp());
        assert_relative_eq!(got, expected, max_relative = 1e-10);
        assert_eq!(weighted_exp_double_integral(f64::NEG_INFINITY, 1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 1.3) * (x - 1.3) + 0.25, 0.0, 4.0, 1e-12);
        // minimizer resolution is sqrt(eps)-limited for derivative-free search
        assert_relative_eq!(x, 1.3, epsilon = 1e-7);
        assert_relative_eq!(fx, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn scan_then_golden_picks_global_basin() {
        // double well with asymmetric depths
        let f = |x: f64| (x * x - 1.0).powi(2) - 0.1 * x;
        let (x, _) = scan_then_golden(f, -2.0, 2.0, 256, 1e-12);
        assert!(x > 0.9, "should land in the deeper right-hand well, got {x}");
    }
}
