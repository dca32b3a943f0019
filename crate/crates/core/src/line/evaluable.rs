//! Exact evaluation trees for functions on `ℝ` or `(0, ∞)`.
//!
//! Values are carried as `m · e^{E}` with a complex mantissa `m` and complex
//! exponent `E`, so factors like `e^{e^y}` and `e^{-e^y}` combine in the
//! exponent before anything is exponentiated.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Real,
    /// `(0, ∞)`.
    HalfLine,
}

impl Domain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::Real => x.is_finite(),
            Domain::HalfLine => x > 0.0 && x.is_finite(),
        }
    }
}

/// `mantissa · exp(exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub mantissa: Complex64,
    pub exponent: Complex64,
}

impl LogValue {
    pub const ZERO: Self = Self {
        mantissa: ZERO,
        exponent: ZERO,
    };

    pub fn new(mantissa: Complex64, exponent: Complex64) -> Self {
        Self { mantissa, exponent }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == ZERO
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return ZERO;
        }
        self.mantissa * self.exponent.exp()
    }

    /// `log |value|`, `-∞` for zero.
    pub fn log_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.exponent.re
    }

    fn scale(self, c: Complex64) -> Self {
        Self {
            mantissa: self.mantissa * c,
            ..self
        }
    }

    fn times_exp(self, e: Complex64) -> Self {
        Self {
            exponent: self.exponent + e,
            ..self
        }
    }

    /// Sum relative to the largest real exponent.
    pub fn sum(terms: &[LogValue]) -> LogValue {
        let reference = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.exponent.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if reference == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        let mantissa = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.mantissa * (t.exponent - reference).exp())
            .sum();
        LogValue::new(mantissa, Complex64::new(reference, 0.0))
    }
}

/// Multiplicative factors with closed-form logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// `e^{e^y - 1}`, i.e. `1/√w` for the canonical weight.
    InvSqrtWeight,
    /// `e^{-(e^y - 1)}`, i.e. `√w`.
    SqrtWeight,
    /// `e^{-(1 - e^{-t}) e^y}`.
    SigmaDamping { t: f64 },
    /// `e^{-t} e^{-(1 - e^{-t}) x}`.
    HalflineDamping { t: f64 },
    /// `x^p` for `x > 0`.
    Power { p: Complex64 },
    /// `e^{c y}`.
    ExpLinear { c: Complex64 },
}

impl Factor {
    /// The logarithm of the factor at `x`; `None` where undefined.
    pub fn log_at(&self, x: f64) -> Option<Complex64> {
        let v = match *self {
            Factor::InvSqrtWeight => x.exp_m1(),
            Factor::SqrtWeight => -x.exp_m1(),
            Factor::SigmaDamping { t } => (-t).exp_m1() * x.exp(),
            Factor::HalflineDamping { t } => -t + (-t).exp_m1() * x,
            Factor::Power { p } => {
                if x <= 0.0 {
                    return None;
                }
                return Some(p * x.ln());
            }
            Factor::ExpLinear { c } => return Some(c * x),
        };
        Some(Complex64::new(v, 0.0))
    }
}

/// Argument substitutions `f ↦ f ∘ map`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArgMap {
    /// `x ↦ e^x`.
    Exp,
    /// `x ↦ ln x`, defined for `x > 0`.
    Log,
    /// `x ↦ c x`.
    Dilate(f64),
}

impl ArgMap {
    fn apply(self, x: f64) -> Option<f64> {
        match self {
            ArgMap::Exp => Some(x.exp()),
            ArgMap::Log => (x > 0.0).then(|| x.ln()),
            ArgMap::Dilate(c) => Some(c * x),
        }
    }

    /// Preimage of a point of the inner function's domain.
    fn preimage(self, p: f64) -> Option<f64> {
        match self {
            ArgMap::Exp => (p > 0.0).then(|| p.ln()),
            ArgMap::Log => Some(p.exp()),
            ArgMap::Dilate(c) => (c != 0.0).then(|| p / c),
        }
    }
}

/// Named closed-form functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formula {
    /// `e^{-((x - center)/width)²}`.
    Gaussian { center: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Zero,
    Constant(Complex64),
    /// `y^k e^{λ y}`.
    ExpMonomial { lambda: Complex64, k: u32 },
    /// `χ_{[a, b)} · inner`.
    Window { a: f64, b: f64, inner: Evaluable },
    /// `inner(x - tau)`.
    Shifted { inner: Evaluable, tau: f64 },
    Scaled { inner: Evaluable, c: Complex64 },
    Multiplied { inner: Evaluable, factor: Factor },
    Sum(Vec<Evaluable>),
    Composed { inner: Evaluable, map: ArgMap },
    Formula(Formula),
}

/// A function given by an exact expression tree.
#[derive(Clone, PartialEq)]
pub struct Evaluable {
    node: Arc<Node>,
    domain: Domain,
}

impl fmt::Debug for Evaluable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {:?}", self.node, self.domain)
    }
}

impl Evaluable {
    fn make(node: Node, domain: Domain) -> Self {
        Self {
            node: Arc::new(node),
            domain,
        }
    }

    pub fn zero() -> Self {
        Self::make(Node::Zero, Domain::Real)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::make(Node::Constant(c), Domain::Real)
    }

    /// `f_{λ,k}(y) = y^k e^{λ y}`.
    pub fn exp_monomial(lambda: Complex64, k: u32) -> Self {
        Self::make(Node::ExpMonomial { lambda, k }, Domain::Real)
    }

    /// `χ_{[a, b)}`; either end may be infinite.
    pub fn indicator(a: f64, b: f64) -> Self {
        Self::constant(ONE).windowed(a, b)
    }

    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::make(Node::Formula(Formula::Gaussian { center, width }), Domain::Real)
    }

    /// `χ_{[a, b)} · self`.
    pub fn windowed(&self, a: f64, b: f64) -> Self {
        Self::make(
            Node::Window {
                a,
                b,
                inner: self.clone(),
            },
            self.domain,
        )
    }

    /// `x ↦ self(x - tau)`.
    pub fn shifted(&self, tau: f64) -> Self {
        Self::make(
            Node::Shifted {
                inner: self.clone(),
                tau,
            },
            self.domain,
        )
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::make(
            Node::Scaled {
                inner: self.clone(),
                c,
            },
            self.domain,
        )
    }

    pub fn multiplied(&self, factor: Factor) -> Self {
        Self::make(
            Node::Multiplied {
                inner: self.clone(),
                factor,
            },
            self.domain,
        )
    }

    pub fn sum(terms: Vec<Evaluable>) -> Self {
        let domain = if terms.iter().any(|t| t.domain == Domain::HalfLine) {
            Domain::HalfLine
        } else {
            Domain::Real
        };
        Self::make(Node::Sum(terms), domain)
    }

    /// `self ∘ map` on the given domain.
    pub fn composed(&self, map: ArgMap, domain: Domain) -> Self {
        Self::make(
            Node::Composed {
                inner: self.clone(),
                map,
            },
            domain,
        )
    }

    pub fn with_domain(&self, domain: Domain) -> Self {
        Self {
            node: self.node.clone(),
            domain,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Depth of the expression tree.
    pub fn depth(&self) -> usize {
        1 + match &*self.node {
            Node::Zero | Node::Constant(_) | Node::ExpMonomial { .. } | Node::Formula(_) => 0,
            Node::Window { inner, .. }
            | Node::Shifted { inner, .. }
            | Node::Scaled { inner, .. }
            | Node::Multiplied { inner, .. }
            | Node::Composed { inner, .. } => inner.depth(),
            Node::Sum(terms) => terms.iter().map(Evaluable::depth).max().unwrap_or(0),
        }
    }

    /// Value in log form; `None` outside the domain.
    pub fn eval_log(&self, x: f64) -> Option<LogValue> {
        if !self.domain.contains(x) {
            return None;
        }
        self.node_log(x)
    }

    fn node_log(&self, x: f64) -> Option<LogValue> {
        Some(match &*self.node {
            Node::Zero => LogValue::ZERO,
            Node::Constant(c) => LogValue::new(*c, ZERO),
            Node::ExpMonomial { lambda, k } => {
                LogValue::new(Complex64::new(x.powi(*k as i32), 0.0), lambda * x)
            }
            Node::Window { a, b, inner } => {
                if *a <= x && x < *b {
                    inner.node_log(x)?
                } else {
                    LogValue::ZERO
                }
            }
            Node::Shifted { inner, tau } => inner.node_log(x - tau)?,
            Node::Scaled { inner, c } => inner.node_log(x)?.scale(*c),
            Node::Multiplied { inner, factor } => {
                let v = inner.node_log(x)?;
                if v.is_zero() {
                    v
                } else {
                    v.times_exp(factor.log_at(x)?)
                }
            }
            Node::Sum(terms) => {
                let parts: Option<Vec<LogValue>> = terms.iter().map(|t| t.node_log(x)).collect();
                LogValue::sum(&parts?)
            }
            Node::Composed { inner, map } => inner.node_log(map.apply(x)?)?,
            Node::Formula(Formula::Gaussian { center, width }) => {
                let u = (x - center) / width;
                LogValue::new(ONE, Complex64::new(-u * u, 0.0))
            }
        })
    }

    /// Value at `x`; NaN outside the domain.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_log(x)
            .map(|v| v.value())
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    pub fn try_eval(&self, x: f64) -> Result<Complex64> {
        self.eval_log(x)
            .map(|v| v.value())
            .ok_or_else(|| Error::InvalidParameter(format!("{x} is outside the domain {:?}", self.domain)))
    }

    /// Finite points where the function may jump, in this function's
    /// variable.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.retain(|p| p.is_finite());
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match &*self.node {
            Node::Zero | Node::Constant(_) | Node::ExpMonomial { .. } | Node::Formula(_) => {}
            Node::Window { a, b, inner } => {
                out.push(*a);
                out.push(*b);
                inner.collect_breakpoints(out);
            }
            Node::Shifted { inner, tau } => {
                out.extend(inner.breakpoints().into_iter().map(|p| p + tau));
            }
            Node::Scaled { inner, .. } | Node::Multiplied { inner, .. } => inner.collect_breakpoints(out),
            Node::Sum(terms) => terms.iter().for_each(|t| t.collect_breakpoints(out)),
            Node::Composed { inner, map } => {
                out.extend(inner.breakpoints().into_iter().filter_map(|p| map.preimage(p)));
            }
        }
    }
}
