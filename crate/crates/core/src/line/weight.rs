//! Weights on the line, weighted integrals, Domar diagnostics and the
//! exponential-family (Müntz) comparison table.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::evaluable::Evaluable;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, AdaptiveOptions};

/// Positive weight functions, evaluated through their logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WeightFn {
    /// `e^{-2(e^y - 1)}`.
    Canonical,
    /// `e^{c y}`.
    ExpLinear { c: f64 },
    /// `e^{c y²}`.
    ExpQuadratic { c: f64 },
    /// A positive constant.
    Constant { value: f64 },
}

impl WeightFn {
    pub fn log_eval(&self, y: f64) -> f64 {
        match *self {
            WeightFn::Canonical => -2.0 * y.exp_m1(),
            WeightFn::ExpLinear { c } => c * y,
            WeightFn::ExpQuadratic { c } => c * y * y,
            WeightFn::Constant { value } => value.ln(),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.log_eval(y).exp()
    }
}

/// The canonical weight `w(y) = e^{-2(e^y - 1)}`.
pub fn weight_eval(y: f64) -> f64 {
    WeightFn::Canonical.eval(y)
}

/// `∫_a^b f(y) conj(g(y)) w(y) dy`, split at the breakpoints of both.
pub fn weighted_inner(
    f: &Evaluable,
    g: &Evaluable,
    w: WeightFn,
    interval: (f64, f64),
    opts: AdaptiveOptions,
) -> Result<Complex64> {
    let mut cuts = f.breakpoints();
    cuts.extend(g.breakpoints());
    let integrand = |y: f64| {
        let (Some(a), Some(b)) = (f.eval_log(y), g.eval_log(y)) else {
            return Complex64::new(0.0, 0.0);
        };
        if a.is_zero() || b.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let exponent = a.exponent + b.exponent.conj() + w.log_eval(y);
        if exponent.re < -745.0 {
            return Complex64::new(0.0, 0.0);
        }
        a.mantissa * b.mantissa.conj() * exponent.exp()
    };
    let est = integrate_piecewise(interval.0, interval.1, &cuts, integrand, opts)?;
    Ok(est.value)
}

/// `∫_a^b |f|² w dy`.
pub fn weighted_norm_sq(f: &Evaluable, w: WeightFn, interval: (f64, f64), opts: AdaptiveOptions) -> Result<f64> {
    Ok(weighted_inner(f, f, w, interval, opts)?.re)
}

/// Rows `(y, w(y))` for `y = y_min, y_min + step, …, ≤ y_max`.
pub fn figure1_data(y_min: f64, y_max: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0) || !(y_min <= y_max) || !y_min.is_finite() || !y_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite y_min ≤ y_max and step > 0 (got {y_min}, {y_max}, {step})"
        )));
    }
    let count = ((y_max - y_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| {
            let y = y_min + k as f64 * step;
            (y, weight_eval(y))
        })
        .collect())
}

/// CSV with header `y,w`.
pub fn write_figure1_csv<W: Write>(rows: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y", "w"])?;
    for (y, v) in rows {
        w.write_record([format!("{y:?}"), format!("{v:?}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomarRow {
    pub y: f64,
    pub ratio: f64,
    pub running_min: f64,
}

/// Samples of `log w(y) / y` along a decreasing negative grid with their
/// running minimum. Bounded ratios as `y → -∞` are the sufficient
/// condition for non-standard shift-invariant subspaces.
pub fn domar_nonstandard_indicator(w: WeightFn, y_grid: &[f64]) -> Result<Vec<DomarRow>> {
    if y_grid.iter().any(|&y| !(y < 0.0)) || y_grid.windows(2).any(|p| !(p[1] < p[0])) {
        return Err(Error::InvalidParameter("grid must be negative and strictly decreasing".into()));
    }
    let mut running_min = f64::INFINITY;
    Ok(y_grid
        .iter()
        .map(|&y| {
            let ratio = w.log_eval(y) / y;
            running_min = running_min.min(ratio);
            DomarRow { y, ratio, running_min }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomarCondition {
    pub samples: Vec<(f64, f64)>,
    pub consistent: bool,
}

/// Sampled evidence for the three rigidity conditions on `(0, ∞)`:
/// concavity of `log w`, growth of `-log w(x)/x`, and growth of
/// `(log|log w(x)| - log x)/√(log x)`. A trend is "consistent" when it is
/// strictly increasing on the upper half of the grid. This is evidence on
/// samples, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomarReport {
    pub weight: WeightFn,
    pub concavity_violations: usize,
    pub concavity_consistent: bool,
    pub condition2: DomarCondition,
    pub condition3: DomarCondition,
}

impl DomarReport {
    pub fn all_consistent(&self) -> bool {
        self.concavity_consistent && self.condition2.consistent && self.condition3.consistent
    }
}

pub fn domar_rigidity_check(w: WeightFn, x_grid: &[f64]) -> Result<DomarReport> {
    if x_grid.len() < 3 || x_grid.iter().any(|&x| !(x > 0.0)) || x_grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidParameter(
            "grid must be positive, strictly increasing, with at least 3 points".into(),
        ));
    }
    let logs: Vec<f64> = x_grid.iter().map(|&x| w.log_eval(x)).collect();
    let slopes: Vec<f64> = (1..x_grid.len())
        .map(|i| (logs[i] - logs[i - 1]) / (x_grid[i] - x_grid[i - 1]))
        .collect();
    let concavity_violations = slopes
        .windows(2)
        .filter(|s| s[1] > s[0] + 1e-9 * (s[0].abs() + s[1].abs() + 1.0))
        .count();

    let c2: Vec<(f64, f64)> = x_grid.iter().zip(&logs).map(|(&x, &l)| (x, -l / x)).collect();
    let c3: Vec<(f64, f64)> = x_grid
        .iter()
        .zip(&logs)
        .filter(|(&x, _)| x > 1.0)
        .map(|(&x, &l)| (x, (l.abs().ln() - x.ln()) / x.ln().sqrt()))
        .collect();
    Ok(DomarReport {
        weight: w,
        concavity_violations,
        concavity_consistent: concavity_violations == 0,
        condition2: trend(c2),
        condition3: trend(c3),
    })
}

fn trend(samples: Vec<(f64, f64)>) -> DomarCondition {
    let upper = &samples[samples.len() / 2..];
    let consistent = upper.len() >= 2
        && upper.iter().all(|(_, v)| v.is_finite())
        && upper
            .windows(2)
            .all(|p| p[1].1 > p[0].1 + 1e-12 * p[0].1.abs());
    DomarCondition { samples, consistent }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuntzRow {
    pub n: u32,
    pub lambda: f64,
    /// `‖e_λ‖²` on `(-∞, 0)`.
    pub left: f64,
    /// `‖e_λ‖²` on `ℝ`.
    pub full: f64,
    /// `√(left / full)`.
    pub ratio: f64,
    /// `[1/(2λ), e²/(2λ)]`, which must contain `left`.
    pub left_bounds: (f64, f64),
    /// `e^{2λ} e^{-2(e² - 1)}`, a lower bound for `full`.
    pub full_lower_bound: f64,
}

impl MuntzRow {
    /// `√(e²/(2λ) / (e^{2λ} e^{-2(e²-1)}))`.
    pub fn ratio_upper_bound(&self) -> f64 {
        (self.left_bounds.1 / self.full_lower_bound).sqrt()
    }
}

/// Norms of `e_{n²}(y) = e^{n² y}` under the canonical weight on the left
/// half-line and on the whole line, `n = 1..=n_max`.
pub fn muntz_ratio_table(n_max: u32, opts: AdaptiveOptions) -> Result<Vec<MuntzRow>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let e2 = 2f64.exp();
    (1..=n_max)
        .map(|n| {
            let lambda = (n * n) as f64;
            let f = Evaluable::exp_monomial(Complex64::new(lambda, 0.0), 0);
            let left = weighted_norm_sq(&f, WeightFn::Canonical, (f64::NEG_INFINITY, 0.0), opts)?;
            // The mass sits near y = ln λ; splitting there keeps the rule honest.
            let right = weighted_norm_sq(&f, WeightFn::Canonical, (0.0, f64::INFINITY), opts)?;
            let full = left + right;
            Ok(MuntzRow {
                n,
                lambda,
                left,
                full,
                ratio: (left / full).sqrt(),
                left_bounds: (1.0 / (2.0 * lambda), e2 / (2.0 * lambda)),
                full_lower_bound: (2.0 * lambda - 2.0 * (e2 - 1.0)).exp(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;

    #[test]
    fn weight_values() {
        assert_eq!(weight_eval(0.0), 1.0);
        assert!((weight_eval(-40.0) - 2f64.exp()).abs() < 1e-12);
        let e = std::f64::consts::E;
        assert!((weight_eval(1.0) - (-2.0 * (e - 1.0)).exp()).abs() < 1e-16);
        assert!((weight_eval(1.0) - 0.0322).abs() < 5e-5);
    }

    #[test]
    fn figure_rows() {
        assert_eq!(figure1_data(0.0, 0.0, 1.0).unwrap(), vec![(0.0, 1.0)]);
        let rows = figure1_data(-10.0, 3.0, 0.01).unwrap();
        assert_eq!(rows.len(), 1301);
        assert!((rows[0].1 - (2.0 * (1.0 - (-10f64).exp())).exp()).abs() < 1e-13);
        assert!(rows.windows(2).all(|p| p[1].1 < p[0].1));
        let mut buf = Vec::new();
        write_figure1_csv(&rows[..2], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("y,w\n-10.0,"));
        assert!(figure1_data(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn weighted_integrals_match_gamma_closed_form() {
        // ∫ e^{c y} e^{-2(e^y - 1)} dy = e² Γ(c) / 2^c
        let opts = AdaptiveOptions::default();
        for c in [1.0, 2.0, 3.5, 8.0] {
            let f = Evaluable::exp_monomial(Complex64::new(c / 2.0, 0.0), 0);
            let v = weighted_norm_sq(&f, WeightFn::Canonical, (f64::NEG_INFINITY, f64::INFINITY), opts).unwrap();
            let want = 2f64.exp() * gamma_real(c) / 2f64.powf(c);
            assert!((v - want).abs() < 1e-11 * want, "c {c}: {v} vs {want}");
        }
        let zero = weighted_norm_sq(&Evaluable::zero(), WeightFn::Canonical, (f64::NEG_INFINITY, f64::INFINITY), opts);
        assert_eq!(zero.unwrap(), 0.0);
    }

    #[test]
    fn sandwich_bounds() {
        let opts = AdaptiveOptions::default();
        for lambda in [1.0, 2.0, 4.0, 9.0, 16.0] {
            let f = Evaluable::exp_monomial(Complex64::new(lambda, 0.0), 0);
            let left = weighted_norm_sq(&f, WeightFn::Canonical, (f64::NEG_INFINITY, 0.0), opts).unwrap();
            assert!(left >= 1.0 / (2.0 * lambda) && left <= 2f64.exp() / (2.0 * lambda));
            let full = left + weighted_norm_sq(&f, WeightFn::Canonical, (0.0, f64::INFINITY), opts).unwrap();
            assert!(full >= (2.0 * lambda - 2.0 * (2f64.exp() - 1.0)).exp());
        }
    }

    #[test]
    fn muntz_table() {
        let rows = muntz_ratio_table(6, AdaptiveOptions::default()).unwrap();
        assert!(rows.windows(2).all(|p| p[1].ratio < p[0].ratio));
        assert!(rows[0].ratio < 1.0);
        assert!(rows[2].ratio <= 0.05);
        assert!(rows[2].ratio <= rows[2].ratio_upper_bound());
    }

    #[test]
    fn domar_indicator() {
        let grid: Vec<f64> = (1..=200).map(|k| -5.0 * k as f64).collect();
        let rows = domar_nonstandard_indicator(WeightFn::Canonical, &grid).unwrap();
        let at50 = rows.iter().find(|r| r.y == -50.0).unwrap();
        assert!((at50.ratio + 0.04).abs() < 1e-12);
        assert!(rows.windows(2).all(|p| p[1].ratio > p[0].ratio && p[1].ratio < 0.0));
        assert!(rows.iter().all(|r| r.running_min > -1.0));
        let r = domar_nonstandard_indicator(WeightFn::Canonical, &[-1000.0]).unwrap();
        assert!((r[0].ratio + 0.002).abs() < 1e-12);
        let bad = domar_nonstandard_indicator(WeightFn::ExpQuadratic { c: 1.0 }, &grid).unwrap();
        assert!(bad.windows(2).all(|p| p[1].running_min < p[0].running_min));
        assert!(domar_nonstandard_indicator(WeightFn::Canonical, &[-1.0, -0.5]).is_err());
    }

    #[test]
    fn domar_rigidity() {
        let grid: Vec<f64> = (0..=490).map(|k| 1.0 + 0.1 * k as f64).collect();
        let canonical = domar_rigidity_check(WeightFn::Canonical, &grid).unwrap();
        assert!(canonical.all_consistent(), "{canonical:?}");
        let exp = domar_rigidity_check(WeightFn::ExpLinear { c: -1.0 }, &grid).unwrap();
        assert!(exp.concavity_consistent);
        assert!(!exp.condition2.consistent);
        assert!(exp.condition2.samples.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-15));
        let flat = domar_rigidity_check(WeightFn::Constant { value: 1.0 }, &grid).unwrap();
        assert!(!flat.condition2.consistent);
        assert!(flat.condition2.samples.iter().all(|&(_, v)| v == 0.0));
        let json = serde_json::to_string(&canonical).unwrap();
        assert!(json.contains("\"concavity_violations\":0"));
    }
}
