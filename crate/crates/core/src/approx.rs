//! Chernoff approximants `F(t/n)^n`, their operator-norm distance to the
//! semigroup `e^{-tH}`, and empirical convergence rates.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::ChernoffFamily;
use crate::linalg::{matrix_exp, matrix_power, operator_norm, Operator};
use crate::par::par_map;

/// Samples at or below this error are excluded from rate fits.
pub const ERROR_FLOOR: f64 = 1e-14;

/// Minimum number of usable samples for a rate fit.
pub const MIN_FIT_SAMPLES: usize = 4;

pub const DEFAULT_T_GRID: usize = 101;

/// `[2^lo, 2^(lo+1), .., 2^hi]`.
pub fn dyadic(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|k| 1u64 << k).collect()
}

/// Default `n` sweep, `8 ..= 1024`.
pub fn default_n_list() -> Vec<u64> {
    dyadic(3, 10)
}

/// `F(t/n)^n`.
pub fn chernoff_power(fam: &ChernoffFamily, t: f64, n: u64) -> Result<Operator> {
    check_tn(t, n)?;
    Ok(matrix_power(&fam.eval_f(t / n as f64)?, n))
}

fn check_tn(t: f64, n: u64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTau(t));
    }
    if n == 0 {
        return Err(Error::BadGrid("n must be at least 1".into()));
    }
    Ok(())
}

fn error_against(fam: &ChernoffFamily, t: f64, n: u64, exact: &Operator) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    operator_norm(&(&chernoff_power(fam, t, n)? - exact))
}

/// `||F(t/n)^n - e^{-tH}||`.
pub fn approximation_error(fam: &ChernoffFamily, t: f64, n: u64) -> Result<f64> {
    check_tn(t, n)?;
    let exact = matrix_exp(fam.generator(), t)?;
    error_against(fam, t, n, &exact)
}

/// The error together with the two pieces of the triangle inequality through
/// `e^{-t S(t/n)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorParts {
    pub total: f64,
    /// `||F(t/n)^n - e^{-t S(t/n)}||`
    pub power_vs_generator: f64,
    /// `||e^{-t S(t/n)} - e^{-tH}||`
    pub generator_gap: f64,
}

pub fn approximation_error_parts(fam: &ChernoffFamily, t: f64, n: u64) -> Result<ErrorParts> {
    check_tn(t, n)?;
    if t == 0.0 {
        return Ok(ErrorParts {
            total: 0.0,
            power_vs_generator: 0.0,
            generator_gap: 0.0,
        });
    }
    let tau = t / n as f64;
    let power = chernoff_power(fam, t, n)?;
    let exact = matrix_exp(fam.generator(), t)?;
    let via_s = matrix_exp(&fam.eval_s(tau)?, t)?;
    Ok(ErrorParts {
        total: operator_norm(&(&power - &exact))?,
        power_vs_generator: operator_norm(&(&power - &via_s))?,
        generator_gap: operator_norm(&(&via_s - &exact))?,
    })
}

/// Uniform grid on `[lo, hi]` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub lo: f64,
    pub hi: f64,
    pub grid: usize,
}

impl TimeInterval {
    pub fn new(lo: f64, hi: f64, grid: usize) -> Result<Self> {
        let iv = TimeInterval { lo, hi, grid };
        iv.validate()?;
        Ok(iv)
    }

    pub fn validate(&self) -> Result<()> {
        let singleton = self.lo == self.hi && self.grid >= 1;
        if !(self.lo >= 0.0) || !(self.hi >= self.lo) || !self.hi.is_finite() || !(singleton || self.grid >= 2) {
            return Err(Error::BadInterval {
                lo: self.lo,
                hi: self.hi,
                grid: self.grid,
            });
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.lo == self.hi {
            return vec![self.lo];
        }
        let last = self.grid - 1;
        (0..self.grid)
            .map(|i| {
                if i == last {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupError {
    pub sup: f64,
    pub argmax_t: f64,
}

/// Grid maximum of the approximation error over `interval`.
pub fn sup_error(fam: &ChernoffFamily, interval: TimeInterval, n: u64) -> Result<SupError> {
    interval.validate()?;
    let ts = interval.points();
    let errs = par_map(&ts, |&t| approximation_error(fam, t, n));
    let mut best = SupError {
        sup: f64::NEG_INFINITY,
        argmax_t: interval.lo,
    };
    for (t, e) in ts.iter().zip(errs) {
        let e = e?;
        if e > best.sup {
            best = SupError { sup: e, argmax_t: *t };
        }
    }
    Ok(best)
}

/// Sup errors for several `n` sharing one set of reference exponentials.
pub fn sup_errors(fam: &ChernoffFamily, interval: TimeInterval, n_list: &[u64]) -> Result<Vec<SupError>> {
    interval.validate()?;
    let ts = interval.points();
    let exacts: Vec<Operator> = par_map(&ts, |&t| matrix_exp(fam.generator(), t))
        .into_iter()
        .collect::<Result<_>>()?;
    let per_n = par_map(n_list, |&n| -> Result<SupError> {
        let mut best = SupError {
            sup: f64::NEG_INFINITY,
            argmax_t: interval.lo,
        };
        for (t, exact) in ts.iter().zip(&exacts) {
            let e = error_against(fam, *t, n, exact)?;
            if e > best.sup {
                best = SupError { sup: e, argmax_t: *t };
            }
        }
        Ok(best)
    });
    per_n.into_iter().collect()
}

/// A fixed time or a grid of times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    At(f64),
    Over(TimeInterval),
}

impl TimeSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            TimeSpec::At(t) if !(*t >= 0.0) || !t.is_finite() => Err(Error::NegativeTau(*t)),
            TimeSpec::At(_) => Ok(()),
            TimeSpec::Over(iv) => iv.validate(),
        }
    }

    /// Representative positive times: the point itself, or up to five grid
    /// points of the interval.
    pub fn probe_times(&self) -> Vec<f64> {
        match self {
            TimeSpec::At(t) => vec![*t],
            TimeSpec::Over(iv) => {
                let k = iv.grid.clamp(1, 5);
                TimeInterval { grid: k, ..*iv }
                    .points()
                    .into_iter()
                    .filter(|&t| t > 0.0)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub n: u64,
    /// Time at which the error was taken (the maximizer for interval sweeps).
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub c: f64,
    pub rho: f64,
    /// Largest absolute deviation of the fit in log space.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub family_id: String,
    pub samples: Vec<Sample>,
    pub fitted: Option<RateFit>,
}

impl ErrorCurve {
    pub fn new(family_id: impl Into<String>, samples: Vec<Sample>) -> Result<Self> {
        if samples.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(Error::BadGrid("n must be strictly increasing".into()));
        }
        if samples.iter().any(|s| !(s.error >= 0.0) || !s.error.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut curve = ErrorCurve {
            family_id: family_id.into(),
            samples,
            fitted: None,
        };
        curve.fitted = fit_rate(&curve).ok();
        Ok(curve)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.error).collect()
    }

    /// `max / min` of `n * error` over samples above the floor.
    pub fn scaled_spread(&self, rho: f64) -> f64 {
        let v: Vec<f64> = self
            .samples
            .iter()
            .filter(|s| s.error > ERROR_FLOOR)
            .map(|s| s.error * (s.n as f64).powf(rho))
            .collect();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Consecutive sample pairs where the error grows by more than `slack`.
    pub fn monotone_violations(&self, slack: f64) -> Vec<(u64, u64)> {
        self.samples
            .windows(2)
            .filter(|w| w[1].error > w[0].error + slack)
            .map(|w| (w[0].n, w[1].n))
            .collect()
    }
}

/// One sample per `n`: the error at `t`, or the grid supremum over an interval.
pub fn error_curve(fam: &ChernoffFamily, time: TimeSpec, n_list: &[u64]) -> Result<ErrorCurve> {
    time.validate()?;
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadGrid(format!("n list must be ascending and >= 1: {n_list:?}")));
    }
    let samples = match time {
        TimeSpec::At(t) => {
            let exact = matrix_exp(fam.generator(), t)?;
            par_map(n_list, |&n| error_against(fam, t, n, &exact).map(|error| Sample { n, t, error }))
                .into_iter()
                .collect::<Result<Vec<_>>>()?
        }
        TimeSpec::Over(iv) => sup_errors(fam, iv, n_list)?
            .into_iter()
            .zip(n_list)
            .map(|(s, &n)| Sample {
                n,
                t: s.argmax_t,
                error: s.sup,
            })
            .collect(),
    };
    ErrorCurve::new(fam.label(), samples)
}

/// Least-squares fit of `log error = log C - rho log n` over samples above
/// [`ERROR_FLOOR`].
pub fn fit_rate(curve: &ErrorCurve) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = curve.samples.iter().map(|s| (s.n as f64, s.error)).collect();
    fit_power_law(&pts)
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > ERROR_FLOOR)
        .map(|&(n, e)| (n.ln(), e.ln()))
        .collect();
    if usable.is_empty() && !points.is_empty() {
        return Err(Error::AllBelowFloor);
    }
    if usable.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: usable.len(),
        });
    }
    let k = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::BadGrid("rate fit needs distinct n".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = usable
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        c: intercept.exp(),
        rho: -slope,
        residual,
    })
}

pub const CSV_HEADER: &str = "family_id,t,n,error,bound,margin";

/// 17 significant digits; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV row; `bound` and `margin` are optional columns.
pub fn csv_row(family_id: &str, s: &Sample, bound: Option<f64>) -> String {
    let (b, m) = match bound {
        Some(b) => (fmt_f64(b), fmt_f64(b - s.error)),
        None => (String::new(), String::new()),
    };
    format!("{},{},{},{},{},{}", family_id, fmt_f64(s.t), s.n, fmt_f64(s.error), b, m)
}

pub fn write_csv<W: Write>(mut w: W, curves: &[ErrorCurve]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in curves {
        for s in &c.samples {
            writeln!(w, "{}", csv_row(&c.family_id, s, None))?;
        }
    }
    Ok(())
}

/// Reads curves back, grouping consecutive rows by `family_id`.
pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<ErrorCurve>> {
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::InvalidConfig("missing CSV header".into())),
    }
    let mut groups: Vec<(String, Vec<Sample>)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || Error::InvalidConfig(format!("line {}: malformed row `{line}`", i + 2));
        if cols.len() != 6 {
            return Err(bad());
        }
        let sample = Sample {
            t: cols[1].parse().map_err(|_| bad())?,
            n: cols[2].parse().map_err(|_| bad())?,
            error: cols[3].parse().map_err(|_| bad())?,
        };
        match groups.last_mut() {
            Some((id, v)) if id == cols[0] => v.push(sample),
            _ => groups.push((cols[0].to_string(), vec![sample])),
        }
    }
    groups
        .into_iter()
        .map(|(id, samples)| ErrorCurve::new(id, samples))
        .collect()
}
