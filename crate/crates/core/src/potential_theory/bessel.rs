//! Exponentially scaled modified Bessel function `e^{-x} I_0(x)`.

/// `e^{-x} I_0(x)` for `x >= 0`: power series up to 30, Hankel asymptotic
/// series above.
pub fn ie0(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 30.0 {
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > sum * 1e-17 {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
            if next < 1e-17 * sum || next > term {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}
