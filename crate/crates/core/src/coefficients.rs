//! Conductivity `k`, source shape `f` and the load factor `λ`, together with
//! the constants of their hypotheses:
//!
//! * `1/c_k ≤ k(s) ≤ c_k`
//! * `ν ≤ f(ξ) ≤ c₁|ξ| + c₂`
//! * `|f(ξ) − f(ξ′)| + |k(ξ) − k(ξ′)| ≤ L|ξ − ξ′|`

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::HypothesisError;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar coefficient function.
#[derive(Clone)]
pub enum Coefficient {
    /// `v`
    Const(f64),
    /// `lo + (hi − lo)/(1 + e^{−ξ})`
    Sigmoid { lo: f64, hi: f64 },
    /// `a + b·min(ξ², R²)`
    BoundedQuadratic { a: f64, b: f64, r: f64 },
    /// Caller-supplied function with declared `[lo, hi]` range, linear
    /// growth bound `c1|ξ| + c2` and Lipschitz constant.
    Custom {
        name: String,
        func: ScalarFn,
        lo: f64,
        hi: f64,
        growth: (f64, f64),
        lipschitz: f64,
    },
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(v) => write!(f, "const:{v}"),
            Coefficient::Sigmoid { lo, hi } => write!(f, "sigmoid:{lo},{hi}"),
            Coefficient::BoundedQuadratic { a, b, r } => write!(f, "bounded-quadratic:{a},{b},{r}"),
            Coefficient::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Coefficient {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Coefficient::Const(v) => *v,
            Coefficient::Sigmoid { lo, hi } => lo + (hi - lo) * sigmoid(s),
            Coefficient::BoundedQuadratic { a, b, r } => a + b * (s * s).min(r * r),
            Coefficient::Custom { func, .. } => func(s),
        }
    }

    /// Derivative, for presets only (used when deriving manufactured forcing).
    pub fn derivative(&self, s: f64) -> Option<f64> {
        match self {
            Coefficient::Const(_) => Some(0.0),
            Coefficient::Sigmoid { lo, hi } => {
                let g = sigmoid(s);
                Some((hi - lo) * g * (1.0 - g))
            }
            Coefficient::BoundedQuadratic { b, r, .. } => Some(if s.abs() < *r { 2.0 * b * s } else { 0.0 }),
            Coefficient::Custom { .. } => None,
        }
    }

    /// Declared `[inf, sup]` of the function over the reals.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            Coefficient::Const(v) => (v, v),
            Coefficient::Sigmoid { lo, hi } => (lo, hi),
            Coefficient::BoundedQuadratic { a, b, r } => (a, a + b * r * r),
            Coefficient::Custom { lo, hi, .. } => (lo, hi),
        }
    }

    /// Declared `(c1, c2)` with `|g(ξ)| ≤ c1|ξ| + c2`.
    pub fn growth(&self) -> (f64, f64) {
        match self {
            Coefficient::Custom { growth, .. } => *growth,
            _ => (0.0, self.range().1),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            Coefficient::Const(_) => 0.0,
            Coefficient::Sigmoid { lo, hi } => 0.25 * (hi - lo),
            Coefficient::BoundedQuadratic { b, r, .. } => 2.0 * b * r,
            Coefficient::Custom { lipschitz, .. } => lipschitz,
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Coefficient::Const(_) => true,
            Coefficient::Sigmoid { lo, hi } => lo == hi,
            Coefficient::BoundedQuadratic { b, r, .. } => b == 0.0 || r == 0.0,
            Coefficient::Custom { .. } => false,
        }
    }

    fn check_parameters(&self) -> Result<(), String> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Coefficient::Const(v) if !finite(&[v]) || v <= 0.0 => Err(format!("const:{v} must be positive")),
            Coefficient::Sigmoid { lo, hi } if !finite(&[lo, hi]) || lo <= 0.0 || hi < lo => {
                Err(format!("sigmoid:{lo},{hi} needs 0 < lo <= hi"))
            }
            Coefficient::BoundedQuadratic { a, b, r } if !finite(&[a, b, r]) || a <= 0.0 || b < 0.0 || r < 0.0 => {
                Err(format!("bounded-quadratic:{a},{b},{r} needs a > 0, b >= 0, R >= 0"))
            }
            Coefficient::Custom { lo, hi, .. } if !(lo > 0.0 && hi >= lo) => {
                Err(format!("custom bounds [{lo}, {hi}] need 0 < lo <= hi"))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for Coefficient {
    type Err = String;

    /// Parses `const:v`, `sigmoid:lo,hi` or `bounded-quadratic:a,b,R`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, args) = s.trim().split_once(':').ok_or_else(|| format!("preset `{s}` lacks `kind:` prefix"))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("preset `{s}`: {e}"))?;
        let c = match (kind.trim(), nums.as_slice()) {
            ("const", &[v]) => Coefficient::Const(v),
            ("sigmoid", &[lo, hi]) => Coefficient::Sigmoid { lo, hi },
            ("bounded-quadratic", &[a, b, r]) => Coefficient::BoundedQuadratic { a, b, r },
            (k @ ("const" | "sigmoid" | "bounded-quadratic"), _) => {
                return Err(format!("preset `{k}` got {} arguments", nums.len()))
            }
            (k, _) => return Err(format!("unknown preset `{k}`")),
        };
        Ok(c)
    }
}

/// Constants of the coefficient hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisConstants {
    /// `1/c_k ≤ k ≤ c_k`.
    pub c_k: f64,
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
    /// Joint Lipschitz constant of `k` and `f`.
    pub lipschitz: f64,
}

#[derive(Clone, Debug)]
pub struct CoefficientModel {
    pub k: Coefficient,
    pub f: Coefficient,
    pub lambda: f64,
    constants: HypothesisConstants,
}

/// Sampling window for [`CoefficientModel::validate`].
#[derive(Debug, Clone, Copy)]
pub struct SampleRange {
    pub radius: f64,
    pub samples: usize,
}

impl Default for SampleRange {
    fn default() -> Self {
        SampleRange {
            radius: 1e3,
            samples: 10_000,
        }
    }
}

impl CoefficientModel {
    /// Derives the hypothesis constants from the coefficients and runs the
    /// default sample validation.
    pub fn new(k: Coefficient, f: Coefficient, lambda: f64) -> Result<Self, HypothesisError> {
        k.check_parameters().map_err(HypothesisError::Constants)?;
        f.check_parameters().map_err(HypothesisError::Constants)?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(HypothesisError::Constants(format!("lambda = {lambda} must be positive")));
        }
        let (k_lo, k_hi) = k.range();
        let (nu, _) = f.range();
        let (c1, c2) = f.growth();
        let constants = HypothesisConstants {
            c_k: k_hi.max(1.0 / k_lo),
            nu,
            c1,
            c2,
            lipschitz: k.lipschitz() + f.lipschitz(),
        };
        let model = CoefficientModel { k, f, lambda, constants };
        model.validate(SampleRange::default())?;
        Ok(model)
    }

    pub fn constants(&self) -> HypothesisConstants {
        self.constants
    }

    pub fn nu(&self) -> f64 {
        self.constants.nu
    }

    /// True when neither `k` nor `f` depends on the solution.
    pub fn is_linear(&self) -> bool {
        self.k.is_constant() && self.f.is_constant()
    }

    /// Checks the hypotheses on an equispaced sample of `[−R, R]`, plus
    /// Lipschitz quotients on neighbouring and mirrored pairs.
    pub fn validate(&self, range: SampleRange) -> Result<(), HypothesisError> {
        let n = range.samples.max(2);
        let xs: Vec<f64> = (0..n)
            .map(|i| -range.radius + 2.0 * range.radius * i as f64 / (n - 1) as f64)
            .collect();
        let HypothesisConstants { c_k, nu, c1, c2, lipschitz } = self.constants;
        let (k_lo, k_hi) = self.k.range();
        let slack = |v: f64| 1e-12 * v.abs().max(1.0);
        let mut kv = Vec::with_capacity(n);
        let mut fv = Vec::with_capacity(n);
        for &x in &xs {
            let k = self.k.eval(x);
            let lo = k_lo.max(1.0 / c_k);
            let hi = k_hi.min(c_k);
            if !(k >= lo - slack(lo) && k <= hi + slack(hi)) {
                return Err(HypothesisError::ConductivityBounds { at: x, value: k, lo, hi });
            }
            let f = self.f.eval(x);
            let cap = c1 * x.abs() + c2;
            if !(f >= nu - slack(nu) && f <= cap + slack(cap)) || nu <= 0.0 {
                return Err(HypothesisError::SourceBounds { at: x, value: f, nu, c1, c2 });
            }
            kv.push(k);
            fv.push(f);
        }
        let pairs = (0..n - 1).map(|i| (i, i + 1)).chain((0..n / 2).map(|i| (i, n - 1 - i)));
        for (i, j) in pairs {
            let dx = (xs[j] - xs[i]).abs();
            let df = (fv[j] - fv[i]).abs() + (kv[j] - kv[i]).abs();
            if df > lipschitz * dx * (1.0 + 1e-9) + 1e-14 {
                return Err(HypothesisError::Lipschitz {
                    a: xs[i],
                    b: xs[j],
                    ratio: df / dx,
                    lipschitz,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parsing() {
        let k: Coefficient = "sigmoid:0.5,2.0".parse().unwrap();
        assert_eq!(k.range(), (0.5, 2.0));
        let m = CoefficientModel::new(k, "const:1.0".parse().unwrap(), 1.0).unwrap();
        assert_eq!(m.constants().c_k, 2.0);
        assert_eq!(m.constants().nu, 1.0);
        assert_eq!(m.constants().c1, 0.0);
        assert_eq!(m.constants().c2, 1.0);
        assert!(m.k.eval(0.0) == 1.25);

        assert!("cubic:1".parse::<Coefficient>().is_err());
        assert!("sigmoid:1".parse::<Coefficient>().is_err());
        assert!("const".parse::<Coefficient>().is_err());
    }

    #[test]
    fn negative_conductivity_rejected() {
        let err = CoefficientModel::new(
            "const:-1".parse().unwrap(),
            Coefficient::Const(1.0),
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, HypothesisError::Constants(_)));
    }

    #[test]
    fn source_without_positive_floor_rejected() {
        let err = CoefficientModel::new(Coefficient::Const(1.0), "sigmoid:-1,1".parse().unwrap(), 1.0).unwrap_err();
        assert!(err.to_string().contains("lo"));
    }

    #[test]
    fn custom_coefficient_sampled() {
        // declares a Lipschitz constant that is too small
        let f = Coefficient::Custom {
            name: "steep".into(),
            func: Arc::new(|x: f64| 1.0 + x.abs().min(1.0)),
            lo: 1.0,
            hi: 2.0,
            growth: (0.0, 2.0),
            lipschitz: 0.5,
        };
        let err = CoefficientModel::new(Coefficient::Const(1.0), f, 1.0).unwrap_err();
        assert!(matches!(err, HypothesisError::Lipschitz { .. }), "{err}");

        // declares an upper bound that is exceeded
        let f = Coefficient::Custom {
            name: "grows".into(),
            func: Arc::new(|x: f64| 1.0 + x * x),
            lo: 1.0,
            hi: 2.0,
            growth: (1.0, 2.0),
            lipschitz: 1e9,
        };
        let err = CoefficientModel::new(Coefficient::Const(1.0), f, 1.0).unwrap_err();
        assert!(matches!(err, HypothesisError::SourceBounds { .. }), "{err}");
    }

    #[test]
    fn bounded_quadratic_constants() {
        let f: Coefficient = "bounded-quadratic:1,1,2".parse().unwrap();
        assert_eq!(f.eval(0.5), 1.25);
        assert_eq!(f.eval(-3.0), 5.0);
        assert_eq!(f.lipschitz(), 4.0);
        let m = CoefficientModel::new(Coefficient::Const(1.0), f, 1.0).unwrap();
        assert_eq!(m.constants().c2, 5.0);
        assert!(!m.is_linear());
    }
}
