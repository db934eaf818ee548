//! Kato functions: Borel maps `f: [0, inf) -> [0, 1]` with `f(0) = 1` and
//! `f'(+0) = -1`, used in place of `e^{-s}` in product formulas.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the one-sided derivative at zero.
pub const DERIVATIVE_TOL: f64 = 1e-4;

/// Ids of the built-in registry.
pub const REGISTRY: [&str; 5] = ["exp", "resolvent-1", "resolvent-2", "resolvent-4", "clipped-linear"];

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A validated Kato function together with `gamma = sup (1 - f(x)) / x`.
#[derive(Clone)]
pub struct KatoFunction {
    id: String,
    f: ScalarFn,
    gamma: f64,
    derivative_at_zero: f64,
}

impl fmt::Debug for KatoFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KatoFunction")
            .field("id", &self.id)
            .field("gamma", &self.gamma)
            .field("derivative_at_zero", &self.derivative_at_zero)
            .finish()
    }
}

impl KatoFunction {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn derivative_at_zero(&self) -> f64 {
        self.derivative_at_zero
    }

    /// Looks up and validates a registry function.
    pub fn builtin(id: &str) -> Result<KatoFunction> {
        let f: ScalarFn = match id {
            "exp" => Arc::new(|s: f64| (-s).exp()),
            "resolvent-1" => Arc::new(|s: f64| 1.0 / (1.0 + s)),
            "resolvent-2" => Arc::new(|s: f64| (1.0 + s / 2.0).powi(-2)),
            "resolvent-4" => Arc::new(|s: f64| (1.0 + s / 4.0).powi(-4)),
            "clipped-linear" => Arc::new(|s: f64| (1.0 - s).max(0.0)),
            other => return Err(Error::UnknownKato(other.to_string())),
        };
        validate_kato_with(id, f, &default_grid())
    }
}

/// 400 log-spaced points from 1e-6 to 1e3.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-6, 1e3, 400)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Checks the Kato clauses on `grid` and computes `gamma` as the grid maximum
/// of `(1 - f(x)) / x` (together with its limit 1 at `0+`) and `f'(+0)` as the
/// one-sided difference at the smallest grid point.
pub fn validate_kato(id: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, grid: &[f64]) -> Result<KatoFunction> {
    validate_kato_with(id, Arc::new(f), grid)
}

fn validate_kato_with(id: &str, f: ScalarFn, grid: &[f64]) -> Result<KatoFunction> {
    let invalid = |clause: String| Error::InvalidKato {
        id: id.to_string(),
        clause,
    };
    if grid.is_empty() || grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(invalid("validation grid must be non-empty and strictly positive".into()));
    }
    let f0 = f(0.0);
    if (f0 - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("f(0) = 1 violated: f(0) = {f0}")));
    }
    let mut gamma = f64::NEG_INFINITY;
    for &x in grid {
        let v = f(x);
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(format!("0 <= f <= 1 violated: f({x}) = {v}")));
        }
        gamma = gamma.max((1.0 - v) / x);
    }
    let x0 = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let derivative_at_zero = (f(x0) - f0) / x0;
    if (derivative_at_zero + 1.0).abs() > DERIVATIVE_TOL {
        return Err(invalid(format!("f'(+0) = -1 violated: difference quotient {derivative_at_zero}")));
    }
    if !gamma.is_finite() {
        return Err(invalid("gamma is not finite".into()));
    }
    // the supremum also covers x -> 0+, where (1 - f(x)) / x -> -f'(+0) = 1
    gamma = gamma.max(1.0);
    Ok(KatoFunction {
        id: id.to_string(),
        f,
        gamma,
        derivative_at_zero,
    })
}

/// Summary emitted by the `kato` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct KatoReport {
    pub id: String,
    pub valid: bool,
    pub gamma: Option<f64>,
    pub derivative_at_zero: Option<f64>,
    pub error: Option<String>,
}

impl KatoReport {
    pub fn from_result(id: &str, r: &Result<KatoFunction>) -> Self {
        match r {
            Ok(k) => KatoReport {
                id: id.to_string(),
                valid: true,
                gamma: Some(k.gamma),
                derivative_at_zero: Some(k.derivative_at_zero),
                error: None,
            },
            Err(e) => KatoReport {
                id: id.to_string(),
                valid: false,
                gamma: None,
                derivative_at_zero: None,
                error: Some(e.to_string()),
            },
        }
    }
}
