//! Gamma function for complex arguments and small combinatorial helpers.

use std::f64::consts::PI;

use num_complex::Complex64;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)`, continuous from the positive real axis for `Re z > 0`; the
/// imaginary part is only defined modulo `2π` in the reflected half-plane.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1 - z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// `binom(n, k)` as `f64`; exact while the value fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    if acc < 9.0e15 {
        acc.round()
    } else {
        acc
    }
}

/// Pascal rows `binom(n, 0..=n)` for `n = 0..=order`, built by addition so
/// every entry below 2^53 is exact.
pub fn pascal_rows(order: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    rows.push(vec![1.0]);
    for n in 1..=order {
        let prev = &rows[n - 1];
        let mut row = vec![1.0; n + 1];
        for k in 1..n {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_known_points() {
        assert!((gamma_real(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma_real(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(0.25) - 3.625_609_908_221_908).abs() < 1e-13);
        assert!((gamma_real(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_recurrence_off_axis() {
        for z in [Complex64::new(0.3, 1.7), Complex64::new(2.5, -3.0), Complex64::new(-0.7, 0.4)] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm());
        }
    }

    #[test]
    fn gamma_of_i() {
        // Γ(i) = -0.1549498283018106… - 0.4980156681183560… i
        let g = gamma(Complex64::new(0.0, 1.0));
        assert!((g - Complex64::new(-0.154_949_828_301_810_6, -0.498_015_668_118_356)).norm() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(52, 26), 495_918_532_948_104.0);
        assert_eq!(binomial(3, 4), 0.0);
        let rows = pascal_rows(60);
        for n in 0..=60 {
            for k in 0..=n {
                let b = binomial(n, k);
                assert!((rows[n][k] - b).abs() <= 1e-15 * b);
            }
        }
    }
}
