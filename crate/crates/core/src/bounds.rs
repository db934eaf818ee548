//! Numerical checkers for the quantitative convergence inequalities.
//!
//! Each checker evaluates the left and right sides of one inequality and
//! returns [`BoundReport`]s. Inequalities whose constant is only known to
//! exist are turned into grid maximizations: the returned constant is the
//! smallest one consistent with the sampled parameters, and the per-sample
//! reports are measured against it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::{fit_power_law, RateFit};
use crate::error::{Error, Result};
use crate::family::{make_symmetrized_family, ChernoffFamily, Regularity};
use crate::kato::KatoFunction;
use crate::linalg::{
    hermitian_eig, matrix_exp, matrix_function, matrix_power, operator_norm, resolvent_shift, unit_resolvent,
    Operator,
};
use crate::range::{dist_to_neg_sector, min_qs_angle, range_boundary, SectorSpec, DEFAULT_POINTS};

/// Relative pass tolerance on margins.
pub const REPORT_TOL: f64 = 1e-10;

/// Slack on spectra and norms of contractions.
pub const CONTRACTION_TOL: f64 = 1e-10;

/// Smallest gap `1 - ||F(tau)||` accepted as a strict contraction.
pub const STRICT_GAP_FLOOR: f64 = 1e-8;

/// Resolvent differences below this are skipped when estimating the
/// exponential/resolvent comparison constant.
pub const RESOLVENT_DIFF_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "eq-0.5")]
    SqrtNLemma,
    #[serde(rename = "eq-2.1.14")]
    PowerDefect,
    #[serde(rename = "eq-3.1.151")]
    SpectralPower,
    #[serde(rename = "eq-3.3.1")]
    ResolventRate,
    #[serde(rename = "eq-3.3.17")]
    TauLinearResolvent,
    #[serde(rename = "eq-3.3.20")]
    StrictContraction,
    #[serde(rename = "eq-6.2.5")]
    CubeRoot,
    #[serde(rename = "est-res")]
    SectorialResolvent,
    #[serde(rename = "lemma-3.2.1-c")]
    ExpResolventConstant,
    #[serde(rename = "trotter-kato-nonsym")]
    NonsymTrotterKato,
}

impl BoundId {
    pub const ALL: [BoundId; 10] = [
        BoundId::SqrtNLemma,
        BoundId::PowerDefect,
        BoundId::SpectralPower,
        BoundId::ResolventRate,
        BoundId::TauLinearResolvent,
        BoundId::StrictContraction,
        BoundId::CubeRoot,
        BoundId::SectorialResolvent,
        BoundId::ExpResolventConstant,
        BoundId::NonsymTrotterKato,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::SqrtNLemma => "eq-0.5",
            BoundId::PowerDefect => "eq-2.1.14",
            BoundId::SpectralPower => "eq-3.1.151",
            BoundId::ResolventRate => "eq-3.3.1",
            BoundId::TauLinearResolvent => "eq-3.3.17",
            BoundId::StrictContraction => "eq-3.3.20",
            BoundId::CubeRoot => "eq-6.2.5",
            BoundId::SectorialResolvent => "est-res",
            BoundId::ExpResolventConstant => "lemma-3.2.1-c",
            BoundId::NonsymTrotterKato => "trotter-kato-nonsym",
        }
    }

    /// Name of the checker that produces reports with this id.
    pub fn checker(&self) -> &'static str {
        match self {
            BoundId::SqrtNLemma => "check_sqrt_n_lemma",
            BoundId::PowerDefect => "estimate_k",
            BoundId::SpectralPower => "check_spectral_bound",
            BoundId::ResolventRate => "check_resolvent_rate",
            BoundId::TauLinearResolvent => "check_tau_linear_resolvent",
            BoundId::StrictContraction => "check_strict_contraction",
            BoundId::CubeRoot => "check_cube_root_bound",
            BoundId::SectorialResolvent => "check_sectorial_resolvent",
            BoundId::ExpResolventConstant => "estimate_exp_resolvent_constant",
            BoundId::NonsymTrotterKato => "check_nonsym_trotter_kato",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown bound id `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub constants: BTreeMap<String, f64>,
    /// Set when the margin is negative but within tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn within_tolerance(margin: f64, rhs: f64) -> bool {
    margin >= -REPORT_TOL * (1.0 + rhs.abs())
}

impl BoundReport {
    pub fn new(bound_id: BoundId, params: &[(&str, f64)], lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        let pass = within_tolerance(margin, rhs);
        BoundReport {
            bound_id,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs,
            rhs,
            margin,
            pass,
            constants: BTreeMap::new(),
            warning: (pass && margin < 0.0).then(|| "margin negative within tolerance".to_string()),
        }
    }

    pub fn with_constants(mut self, constants: &[(&str, f64)]) -> Self {
        self.constants
            .extend(constants.iter().map(|(k, v)| (k.to_string(), *v)));
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// An empirical constant with the reports measured against it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Parameters of the maximizing sample.
    pub argmax: BTreeMap<String, f64>,
    pub reports: Vec<BoundReport>,
}

/// `(params, lhs, scale)` with `rhs = constant * scale`.
type Sample<'a> = (Vec<(&'a str, f64)>, f64, f64);

fn estimate_from(id: BoundId, name: &str, samples: Vec<Sample>) -> ConstantEstimate {
    let mut value = 0.0;
    let mut argmax = BTreeMap::new();
    for (params, lhs, scale) in &samples {
        let ratio = lhs / scale;
        if ratio > value || argmax.is_empty() {
            value = value.max(ratio);
            argmax = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        }
    }
    let reports = samples
        .iter()
        .map(|(params, lhs, scale)| BoundReport::new(id, params, *lhs, value * scale).with_constants(&[(name, value)]))
        .collect();
    ConstantEstimate { value, argmax, reports }
}

fn is_hermitian(a: &Operator) -> Result<bool> {
    Ok(a.hermitian_deviation() <= CONTRACTION_TOL * (1.0 + operator_norm(a)?))
}

fn check_hermitian_unit_spectrum(f: &Operator) -> Result<crate::linalg::HermitianSpectrum> {
    let s = hermitian_eig(f)?;
    for &l in &s.eigenvalues {
        if !(-CONTRACTION_TOL..=1.0 + CONTRACTION_TOL).contains(&l) {
            return Err(Error::SpectrumOutOfRange { eigenvalue: l });
        }
    }
    Ok(s)
}

fn pow_n(l: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => l.powi(k),
        Err(_) => l.powf(n as f64),
    }
}

/// `||F^n - e^{-n(I - F)}|| <= 1/n` for a Hermitian `F` with spectrum in
/// `[0, 1]`; both operators via the spectral calculus of `F`.
pub fn check_spectral_bound(f: &Operator, n: u64) -> Result<BoundReport> {
    Ok(check_spectral_bounds(f, &[n])?.remove(0))
}

/// [`check_spectral_bound`] for several `n`, sharing one decomposition.
pub fn check_spectral_bounds(f: &Operator, ns: &[u64]) -> Result<Vec<BoundReport>> {
    let s = check_hermitian_unit_spectrum(f)?;
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::BadGrid("n must be at least 1".into()));
            }
            let nf = n as f64;
            let defect = matrix_function(&s, |l| pow_n(l, n) - (-nf * (1.0 - l)).exp())?;
            let lhs = operator_norm(&defect)?;
            Ok(BoundReport::new(BoundId::SpectralPower, &[("n", nf)], lhs, 1.0 / nf))
        })
        .collect()
}

/// `||e^{n(F - I)} w - F^n w|| <= sqrt(n) ||(F - I) w||` for a contraction `F`.
pub fn check_sqrt_n_lemma(f: &Operator, n: u64, w: &DVector<Complex64>) -> Result<BoundReport> {
    let norm = operator_norm(f)?;
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm });
    }
    if w.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: w.len(),
        });
    }
    if w.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let id = Operator::identity(f.dim());
    let defect = &id - f;
    let semigroup = matrix_exp(&defect, n as f64)?;
    let lhs = (semigroup.apply(w) - matrix_power(f, n).apply(w)).norm();
    let rhs = (n as f64).sqrt() * defect.apply(w).norm();
    Ok(BoundReport::new(BoundId::SqrtNLemma, &[("n", n as f64)], lhs, rhs))
}

/// How a contraction was certified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certified {
    /// Hermitian with spectrum in `[0, 1]`.
    SelfAdjoint,
    /// `W(F)` inside `D_alpha` for the reported (smallest) `alpha`.
    QuasiSectorial(f64),
}

impl Certified {
    pub fn alpha(&self) -> f64 {
        match self {
            Certified::SelfAdjoint => 0.0,
            Certified::QuasiSectorial(a) => *a,
        }
    }
}

/// Certifies that `F` is a self-adjoint or quasi-sectorial contraction.
pub fn certify_contraction(f: &Operator) -> Result<Certified> {
    if is_hermitian(f)? && check_hermitian_unit_spectrum(f).is_ok() {
        return Ok(Certified::SelfAdjoint);
    }
    let norm = operator_norm(f)?;
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::RegularityMismatch(format!("not a contraction: norm {norm}")));
    }
    match min_qs_angle(&range_boundary(f, DEFAULT_POINTS)?) {
        Some(alpha) => Ok(Certified::QuasiSectorial(alpha)),
        None => Err(Error::RegularityMismatch(
            "numerical range is not inside any quasi-sectorial domain".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KEstimate {
    pub k_hat: f64,
    pub argmax_n: u64,
    pub certified: Certified,
    /// One report per `n = 1..=n_max` with `rhs = k_hat / (n + 1)`.
    pub reports: Vec<BoundReport>,
}

/// `K_hat = max_{1 <= n <= n_max} (n + 1) ||F^n (I - F)||`.
pub fn estimate_k(f: &Operator, n_max: u64) -> Result<KEstimate> {
    let certified = certify_contraction(f)?;
    estimate_k_certified(f, n_max, certified)
}

fn estimate_k_certified(f: &Operator, n_max: u64, certified: Certified) -> Result<KEstimate> {
    if n_max == 0 {
        return Err(Error::BadGrid("n_max must be at least 1".into()));
    }
    let defect = &Operator::identity(f.dim()) - f;
    let mut lhs = Vec::with_capacity(n_max as usize);
    let mut power = f.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = &power * f;
        }
        lhs.push(operator_norm(&(&power * &defect))?);
    }
    let (mut k_hat, mut argmax_n) = (0.0, 1);
    for (i, v) in lhs.iter().enumerate() {
        let scaled = v * (i as f64 + 2.0);
        if scaled > k_hat {
            k_hat = scaled;
            argmax_n = i as u64 + 1;
        }
    }
    let reports = lhs
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let n = i as f64 + 1.0;
            BoundReport::new(BoundId::PowerDefect, &[("n", n)], v, k_hat / (n + 1.0))
                .with_constants(&[("K", k_hat)])
        })
        .collect();
    Ok(KEstimate {
        k_hat,
        argmax_n,
        certified,
        reports,
    })
}

/// `||F^n - e^{n(F - I)}|| <= (2K + 2) / n^{1/3}` for a certified
/// quasi-sectorial (or self-adjoint) contraction.
pub fn check_cube_root_bound(f: &Operator, n: u64, k_hat: f64) -> Result<BoundReport> {
    Ok(check_cube_root_bounds(f, &[n], k_hat)?.remove(0))
}

pub fn check_cube_root_bounds(f: &Operator, ns: &[u64], k_hat: f64) -> Result<Vec<BoundReport>> {
    let certified = certify_contraction(f)?;
    cube_root_certified(f, ns, k_hat, certified)
}

fn cube_root_certified(f: &Operator, ns: &[u64], k_hat: f64, certified: Certified) -> Result<Vec<BoundReport>> {
    let defect = &Operator::identity(f.dim()) - f;
    let m = 2.0 * k_hat + 2.0;
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::BadGrid("n must be at least 1".into()));
            }
            let lhs = operator_norm(&(&matrix_power(f, n) - &matrix_exp(&defect, n as f64)?))?;
            let rhs = m / (n as f64).cbrt();
            Ok(BoundReport::new(BoundId::CubeRoot, &[("n", n as f64)], lhs, rhs)
                .with_constants(&[("K", k_hat), ("M", m)])
                .with_param("alpha", certified.alpha()))
        })
        .collect()
}

/// `K_hat` followed by the cube-root bound for every `n <= n_max`, with a
/// single certification.
pub fn power_defect_suite(f: &Operator, n_max: u64) -> Result<(KEstimate, Vec<BoundReport>)> {
    let certified = certify_contraction(f)?;
    let k = estimate_k_certified(f, n_max, certified)?;
    let ns: Vec<u64> = (1..=n_max).collect();
    let cube = cube_root_certified(f, &ns, k.k_hat, certified)?;
    Ok((k, cube))
}

fn check_unit_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
        return Err(Error::BadGrid(format!("{name} grid must be non-empty and inside (0, 1]")));
    }
    Ok(())
}

/// `||(I + t S(tau))^{-1} - (I + t H)^{-1}|| <= M_rho (tau / t)^rho` over
/// pairs `0 < tau <= t <= 1`; returns `M_rho_hat`.
pub fn check_resolvent_rate(
    fam: &ChernoffFamily,
    h: &Operator,
    rho: f64,
    tau_grid: &[f64],
    t_grid: &[f64],
) -> Result<ConstantEstimate> {
    check_unit_grid("tau", tau_grid)?;
    check_unit_grid("t", t_grid)?;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::BadGrid(format!("rho must lie in (0, 1], got {rho}")));
    }
    let mut samples = Vec::new();
    for &tau in tau_grid {
        let s = fam.eval_s(tau)?;
        for &t in t_grid.iter().filter(|&&t| tau <= t) {
            let lhs = operator_norm(&(&unit_resolvent(&s, t)? - &unit_resolvent(h, t)?))?;
            samples.push((vec![("tau", tau), ("t", t), ("rho", rho)], lhs, (tau / t).powf(rho)));
        }
    }
    if samples.is_empty() {
        return Err(Error::BadGrid("no pairs with tau <= t".into()));
    }
    Ok(estimate_from(BoundId::ResolventRate, "M_rho", samples))
}

/// `||(I + S(tau))^{-1} - (I + H)^{-1}|| <= M_1 tau` for `tau in (0, 1]`.
pub fn check_tau_linear_resolvent(fam: &ChernoffFamily, h: &Operator, tau_grid: &[f64]) -> Result<ConstantEstimate> {
    check_unit_grid("tau", tau_grid)?;
    let base = unit_resolvent(h, 1.0)?;
    let samples = tau_grid
        .iter()
        .map(|&tau| {
            let lhs = operator_norm(&(&unit_resolvent(&fam.eval_s(tau)?, 1.0)? - &base))?;
            Ok((vec![("tau", tau)], lhs, tau))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(estimate_from(BoundId::TauLinearResolvent, "M_1", samples))
}

/// `||(zeta + S(tau))^{-1} - (zeta + H)^{-1}|| <= L tau / dist(zeta, -S_alpha)`
/// for `zeta` in the open sector `|arg zeta| < pi - alpha`.
pub fn check_sectorial_resolvent(
    fam: &ChernoffFamily,
    h: &Operator,
    sector: SectorSpec,
    zetas: &[Complex64],
    tau_grid: &[f64],
) -> Result<ConstantEstimate> {
    if tau_grid.is_empty() || tau_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::BadGrid("tau grid must be non-empty and positive".into()));
    }
    let mut dists = Vec::with_capacity(zetas.len());
    for &z in zetas {
        let out = Error::ZetaOutOfSector { re: z.re, im: z.im };
        if z.norm() == 0.0 || z.arg().abs() >= std::f64::consts::PI - sector.alpha() {
            return Err(out);
        }
        let d = dist_to_neg_sector(z, sector)?;
        if d <= 0.0 {
            return Err(out);
        }
        dists.push(d);
    }
    let mut samples = Vec::new();
    for &tau in tau_grid {
        let s = fam.eval_s(tau)?;
        for (z, d) in zetas.iter().zip(&dists) {
            let lhs = operator_norm(&(&resolvent_shift(&s, *z)? - &resolvent_shift(h, *z)?))?;
            samples.push((
                vec![("tau", tau), ("zeta_re", z.re), ("zeta_im", z.im), ("dist", *d)],
                lhs,
                tau / d,
            ));
        }
    }
    Ok(estimate_from(BoundId::SectorialResolvent, "L", samples))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrictContraction {
    pub delta_hat: f64,
    pub pass: bool,
    pub reports: Vec<BoundReport>,
}

/// `0 <= F(tau) <= (1 - delta) I` for `tau >= eps`; `delta_hat` is the
/// smallest gap `1 - ||F(tau)||` over the probe grid.
pub fn check_strict_contraction(fam: &ChernoffFamily, eps: f64, tau_grid: &[f64]) -> Result<StrictContraction> {
    if fam.regularity() != Regularity::SelfAdjoint {
        return Err(Error::RegularityMismatch(format!(
            "strict contraction check needs a self-adjoint family, got {}",
            fam.regularity()
        )));
    }
    if !(eps > 0.0) || tau_grid.is_empty() || tau_grid.iter().any(|&t| !(t >= eps)) {
        return Err(Error::BadGrid(format!("probe grid must be non-empty and >= eps = {eps}")));
    }
    let mut delta_hat = f64::INFINITY;
    let mut norms = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let nrm = operator_norm(&fam.eval_f(tau)?)?;
        delta_hat = delta_hat.min(1.0 - nrm);
        norms.push(nrm);
    }
    let reports: Vec<BoundReport> = tau_grid
        .iter()
        .zip(&norms)
        .map(|(&tau, &nrm)| {
            BoundReport::new(BoundId::StrictContraction, &[("tau", tau), ("eps", eps)], nrm, 1.0 - STRICT_GAP_FLOOR)
                .with_constants(&[("delta", delta_hat)])
        })
        .collect();
    Ok(StrictContraction {
        delta_hat,
        pass: delta_hat > 0.0 && reports.iter().all(|r| r.pass),
        reports,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpResolventEstimate {
    pub c_hat: f64,
    pub argmax_index: Option<usize>,
    /// Indices of pairs skipped as degenerate or not positive.
    pub skipped: Vec<usize>,
    pub reports: Vec<BoundReport>,
}

/// Empirical `c` in `||e^{-K} - e^{-L}|| <= c ||(I + K)^{-1} - (I + L)^{-1}||`
/// over Hermitian positive pairs.
pub fn estimate_exp_resolvent_constant(pairs: &[(Operator, Operator)]) -> ExpResolventEstimate {
    let mut usable = Vec::new();
    let mut skipped = Vec::new();
    for (i, (k, l)) in pairs.iter().enumerate() {
        match exp_resolvent_ratio(k, l) {
            Some((num, den)) => usable.push((i, num, den)),
            None => skipped.push(i),
        }
    }
    let mut c_hat = 0.0;
    let mut argmax_index = None;
    for &(i, num, den) in &usable {
        if num / den > c_hat || argmax_index.is_none() {
            c_hat = f64::max(c_hat, num / den);
            argmax_index = Some(i);
        }
    }
    let reports = usable
        .iter()
        .map(|&(i, num, den)| {
            BoundReport::new(BoundId::ExpResolventConstant, &[("pair", i as f64)], num, c_hat * den)
                .with_constants(&[("c", c_hat)])
        })
        .collect();
    ExpResolventEstimate {
        c_hat,
        argmax_index,
        skipped,
        reports,
    }
}

fn exp_resolvent_ratio(k: &Operator, l: &Operator) -> Option<(f64, f64)> {
    let positive = |a: &Operator| {
        hermitian_eig(a)
            .map(|s| s.min() >= -CONTRACTION_TOL * (1.0 + s.max().abs()))
            .unwrap_or(false)
    };
    if k.dim() != l.dim() || !positive(k) || !positive(l) {
        return None;
    }
    let den = operator_norm(&(&unit_resolvent(k, 1.0).ok()? - &unit_resolvent(l, 1.0).ok()?)).ok()?;
    if den <= RESOLVENT_DIFF_FLOOR {
        return None;
    }
    let num = operator_norm(&(&matrix_exp(k, 1.0).ok()? - &matrix_exp(l, 1.0).ok()?)).ok()?;
    Some((num, den))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonsymTrotterKato {
    /// `rhs` is the sum of the three decomposition pieces.
    pub reports: Vec<BoundReport>,
    pub fit: Option<RateFit>,
}

/// `(f(tA/n) g(tB/n))^n` against `e^{-tH}`, bounded by
/// `||F(t/n)^{n-1} - e^{-tH}|| + 2 ||(I - g(tB/n)) e^{-tH}|| + ||(I - f(tA/n)) e^{-tH}||`
/// where `F` is the symmetrized family.
pub fn check_nonsym_trotter_kato(
    f: &KatoFunction,
    g: &KatoFunction,
    a: &Operator,
    b: &Operator,
    n_list: &[u64],
    t: f64,
) -> Result<NonsymTrotterKato> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTau(t));
    }
    let fam = make_symmetrized_family(f.clone(), g.clone(), a.clone(), b.clone())?;
    let exact = matrix_exp(fam.generator(), t)?;
    let id = Operator::identity(a.dim());
    let reports = crate::par::par_map(n_list, |&n| -> Result<BoundReport> {
        if n == 0 {
            return Err(Error::BadGrid("n must be at least 1".into()));
        }
        let tau = t / n as f64;
        let (fa, gb) = fam.kato_factors(tau).expect("symmetrized family");
        let lhs = operator_norm(&(&matrix_power(&(&fa * &gb), n) - &exact))?;
        let p_power = operator_norm(&(&matrix_power(&fam.eval_f(tau)?, n - 1) - &exact))?;
        let p_g = 2.0 * operator_norm(&(&(&id - &gb) * &exact))?;
        let p_f = operator_norm(&(&(&id - &fa) * &exact))?;
        Ok(
            BoundReport::new(BoundId::NonsymTrotterKato, &[("n", n as f64), ("t", t)], lhs, p_power + p_g + p_f)
                .with_constants(&[("piece_power", p_power), ("piece_g", p_g), ("piece_f", p_f)]),
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = reports.iter().map(|r| (r.params["n"], r.lhs)).collect();
    Ok(NonsymTrotterKato {
        fit: fit_power_law(&pts).ok(),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_exp_family, make_kato_family, make_resolvent_family};
    use crate::random::MatrixRng;
    use approx::assert_abs_diff_eq;
    use std::collections::HashSet;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_fam(kind: &str, h: f64) -> ChernoffFamily {
        let op = Operator::from_diagonal(&[h]);
        match kind {
            "resolvent" => make_resolvent_family(op, Regularity::SelfAdjoint).unwrap(),
            _ => make_exp_family(op, Regularity::SelfAdjoint).unwrap(),
        }
    }

    #[test]
    fn registry_is_complete_and_injective() {
        let names: HashSet<_> = BoundId::ALL.iter().map(|b| b.checker()).collect();
        assert_eq!(names.len(), 10);
        for id in BoundId::ALL {
            assert_eq!(id.as_str().parse::<BoundId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.as_str()));
        }
        assert!("eq-9.9".parse::<BoundId>().is_err());
    }

    #[test]
    fn report_tolerance_policy() {
        let r = BoundReport::new(BoundId::SpectralPower, &[], 1.0 + 1e-11, 1.0);
        assert!(r.pass && r.warning.is_some());
        let r = BoundReport::new(BoundId::SpectralPower, &[], 1.0 + 1e-9, 1.0);
        assert!(!r.pass);
        let r = BoundReport::new(BoundId::SpectralPower, &[], 0.5, 1.0);
        assert!(r.pass && r.warning.is_none() && r.margin == 0.5);
    }

    #[test]
    fn spectral_bound_examples() {
        let r = check_spectral_bound(&Operator::identity(3), 7).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
        let r = check_spectral_bound(&Operator::from_diagonal(&[0.0]), 1).unwrap();
        assert_abs_diff_eq!(r.lhs, (-1f64).exp(), epsilon = 1e-15);
        assert!(r.pass);
        assert!(matches!(
            check_spectral_bound(&Operator::from_diagonal(&[1.5]), 1),
            Err(Error::SpectrumOutOfRange { .. })
        ));
        let skew = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(check_spectral_bound(&skew, 1), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn scalar_spectral_sup_is_below_one_over_n() {
        // dense lambda scan of |lambda^n - e^{-n(1-lambda)}|
        for n in 1..=256u64 {
            let sup = (0..=4000)
                .map(|i| {
                    let l = i as f64 / 4000.0;
                    (l.powi(n as i32) - (-(n as f64) * (1.0 - l)).exp()).abs()
                })
                .fold(0.0, f64::max);
            assert!(sup <= 1.0 / n as f64, "n = {n}: {sup}");
        }
    }

    #[test]
    fn sqrt_n_examples() {
        let w = DVector::from_element(2, c(1.0, 0.0));
        let r = check_sqrt_n_lemma(&Operator::identity(2), 5, &w).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.pass);
        let w1 = DVector::from_element(1, c(1.0, 0.0));
        let r = check_sqrt_n_lemma(&Operator::from_diagonal(&[0.0]), 1, &w1).unwrap();
        assert_abs_diff_eq!(r.lhs, (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-15);
        assert!(r.pass);
        assert!(matches!(
            check_sqrt_n_lemma(&Operator::from_diagonal(&[2.0]), 1, &w1),
            Err(Error::NotContraction { .. })
        ));
        assert_eq!(
            check_sqrt_n_lemma(&Operator::identity(1), 1, &DVector::from_element(1, c(0.0, 0.0))).unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn k_examples() {
        let k = estimate_k(&Operator::identity(2), 16).unwrap();
        assert_eq!(k.k_hat, 0.0);

        // dense spectrum: sup_n sup_lambda (n+1) lambda^n (1 - lambda) = 1/2 at n = 1
        let spectrum: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        let k = estimate_k(&Operator::from_diagonal(&spectrum), 64).unwrap();
        assert_abs_diff_eq!(k.k_hat, 0.5, epsilon = 1e-12);
        assert_eq!(k.argmax_n, 1);
        assert_eq!(k.certified, Certified::SelfAdjoint);
        assert!(k.reports.iter().all(|r| r.pass));

        let h = MatrixRng::new(6).sectorial(8, FRAC_PI_4, 5.0);
        let f = unit_resolvent(&h, 0.5).unwrap();
        let k = estimate_k(&f, 128).unwrap();
        assert!(k.k_hat.is_finite() && k.k_hat > 0.0);
        assert!(matches!(k.certified, Certified::QuasiSectorial(a) if a < std::f64::consts::FRAC_PI_2));

        assert!(matches!(
            estimate_k(&Operator::from_diagonal(&[2.0]), 4),
            Err(Error::RegularityMismatch(_))
        ));
    }

    #[test]
    fn scalar_k_oracle() {
        // (n+1) max_lambda lambda^n (1-lambda) = (n/(n+1))^n, maximal at n = 1
        for n in 1..=50u64 {
            let nf = n as f64;
            let brute = (0..=20000)
                .map(|i| {
                    let l = i as f64 / 20000.0;
                    (nf + 1.0) * l.powi(n as i32) * (1.0 - l)
                })
                .fold(0.0, f64::max);
            assert!((brute - (nf / (nf + 1.0)).powf(nf)).abs() < 1e-6);
            assert!(brute <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn cube_root_examples() {
        let r = check_cube_root_bound(&Operator::identity(2), 3, 0.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);

        let f = MatrixRng::new(2).hermitian_contraction(6);
        let k = estimate_k(&f, 32).unwrap().k_hat;
        for n in [1, 2, 7, 32, 100] {
            let r = check_cube_root_bound(&f, n, k).unwrap();
            assert!(r.lhs <= 1.0 / n as f64 + 1e-12);
            assert!(r.pass);
        }

        let h = MatrixRng::new(3).sectorial(6, FRAC_PI_4, 4.0);
        let f = unit_resolvent(&h, 0.5).unwrap();
        let (k, cube) = power_defect_suite(&f, 256).unwrap();
        assert!(k.k_hat > 0.0);
        assert!(cube.iter().all(|r| r.pass));
    }

    #[test]
    fn resolvent_rate_examples() {
        let grid = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let fam = make_exp_family(MatrixRng::new(1).psd(4, 3.0), Regularity::SelfAdjoint).unwrap();
        let est = check_resolvent_rate(&fam, fam.generator(), 1.0, &grid, &grid).unwrap();
        assert!(est.value.is_finite() && est.value > 0.0);
        assert!(est.reports.iter().all(|r| r.pass && r.params["tau"] <= r.params["t"]));
        assert_eq!(est.reports.len(), 15);

        let zero = make_exp_family(Operator::zeros(2), Regularity::SelfAdjoint).unwrap();
        assert_eq!(check_resolvent_rate(&zero, zero.generator(), 0.5, &grid, &grid).unwrap().value, 0.0);

        // scalar chain: S(tau) = 1/(1 + tau) for the resolvent family with H = 1
        let fam = scalar_fam("resolvent", 1.0);
        let est = check_resolvent_rate(&fam, fam.generator(), 1.0, &[0.5], &[0.5]).unwrap();
        let s: f64 = 1.0 / 1.5;
        assert_abs_diff_eq!(est.reports[0].lhs, (1.0 / (1.0 + 0.5 * s) - 1.0 / 1.5).abs(), epsilon = 1e-15);

        assert!(check_resolvent_rate(&fam, fam.generator(), 1.0, &[2.0], &[1.0]).is_err());
        assert!(check_resolvent_rate(&fam, fam.generator(), 1.0, &[1.0], &[0.5]).is_err());
        assert!(check_resolvent_rate(&fam, fam.generator(), 1.5, &[0.5], &[1.0]).is_err());
    }

    #[test]
    fn tau_linear_examples() {
        let grid: Vec<f64> = (0..12).map(|k| 0.5f64.powi(k)).collect();
        // exp family, H = 1: S(tau) = (1 - e^{-tau})/tau, slope of 1/(1+S) at 0 is 1/8
        let fam = scalar_fam("exp", 1.0);
        let est = check_tau_linear_resolvent(&fam, fam.generator(), &grid).unwrap();
        let last = est.reports.last().unwrap();
        assert_abs_diff_eq!(last.lhs / last.params["tau"], 0.125, epsilon = 1e-3);
        assert!(est.value.is_finite());

        let zero = make_exp_family(Operator::zeros(3), Regularity::SelfAdjoint).unwrap();
        assert_eq!(check_tau_linear_resolvent(&zero, zero.generator(), &grid).unwrap().value, 0.0);

        // resolvent family, diagonal H: S = H/(1 + tau H)
        let fam = make_resolvent_family(Operator::from_diagonal(&[0.5, 3.0]), Regularity::SelfAdjoint).unwrap();
        let est = check_tau_linear_resolvent(&fam, fam.generator(), &[0.25]).unwrap();
        let closed = [0.5f64, 3.0]
            .iter()
            .map(|&h| (1.0 / (1.0 + h / (1.0 + 0.25 * h)) - 1.0 / (1.0 + h)).abs())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(est.reports[0].lhs, closed, epsilon = 1e-14);
    }

    #[test]
    fn sectorial_resolvent_examples() {
        let grid = [0.5, 0.1, 0.02];
        let sec = SectorSpec::new(FRAC_PI_4).unwrap();
        let zero = make_exp_family(Operator::zeros(2), Regularity::SelfAdjoint).unwrap();
        let est = check_sectorial_resolvent(&zero, zero.generator(), sec, &[c(1.0, 0.0)], &grid).unwrap();
        assert_eq!(est.value, 0.0);

        // at zeta = 1 the sectorial constant equals the tau-linear one
        let fam = make_resolvent_family(MatrixRng::new(8).psd(4, 3.0), Regularity::SelfAdjoint).unwrap();
        let l = check_sectorial_resolvent(&fam, fam.generator(), sec, &[c(1.0, 0.0)], &grid).unwrap();
        let m1 = check_tau_linear_resolvent(&fam, fam.generator(), &grid).unwrap();
        assert_abs_diff_eq!(l.value, m1.value, epsilon = 1e-13);

        let h = MatrixRng::new(4).sectorial(5, FRAC_PI_4, 3.0);
        let qs = make_resolvent_family(h, Regularity::QuasiSectorial(sec)).unwrap();
        let zetas: Vec<Complex64> = (0..6).map(|k| c(0.0, 0.9f64.powi(k))).chain([c(1.0, 0.0)]).collect();
        let est = check_sectorial_resolvent(&qs, qs.generator(), sec, &zetas, &grid).unwrap();
        assert!(est.value.is_finite() && est.value > 0.0);
        assert!(est.reports.iter().all(|r| r.pass));

        assert!(matches!(
            check_sectorial_resolvent(&qs, qs.generator(), sec, &[c(-1.0, 0.0)], &grid),
            Err(Error::ZetaOutOfSector { .. })
        ));
    }

    #[test]
    fn strict_contraction_examples() {
        let grid = [0.5, 1.0, 2.0, 5.0];
        let fam = make_exp_family(MatrixRng::new(3).with_spectrum(&[1.0, 2.0, 4.0]), Regularity::SelfAdjoint).unwrap();
        let r = check_strict_contraction(&fam, 0.5, &grid).unwrap();
        assert!(r.pass);
        assert!(r.delta_hat >= 1.0 - (-0.5f64).exp() - 1e-12);

        let zero = make_exp_family(Operator::zeros(2), Regularity::SelfAdjoint).unwrap();
        let r = check_strict_contraction(&zero, 0.5, &grid).unwrap();
        assert_eq!(r.delta_hat, 0.0);
        assert!(!r.pass && r.reports.iter().all(|r| !r.pass));

        let clip = make_kato_family(
            KatoFunction::builtin("clipped-linear").unwrap(),
            MatrixRng::new(5).with_spectrum(&[1.0, 1.5, 3.0]),
        )
        .unwrap();
        let r = check_strict_contraction(&clip, 1.0, &[1.0, 2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(r.delta_hat, 1.0, epsilon = 1e-12);

        let trot = crate::family::make_trotter_family(Operator::identity(2), Operator::identity(2)).unwrap();
        assert!(matches!(check_strict_contraction(&trot, 0.5, &grid), Err(Error::RegularityMismatch(_))));
        assert!(check_strict_contraction(&fam, 0.5, &[0.1]).is_err());
    }

    #[test]
    fn exp_resolvent_constant_examples() {
        let one = Operator::from_diagonal(&[1.0]);
        let two = Operator::from_diagonal(&[2.0]);
        let est = estimate_exp_resolvent_constant(&[(one.clone(), one.clone()), (one, two)]);
        assert_eq!(est.skipped, vec![0]);
        let expected = ((-1f64).exp() - (-2f64).exp()) / (0.5 - 1.0 / 3.0);
        assert_abs_diff_eq!(est.c_hat, expected, epsilon = 1e-13);
        assert_abs_diff_eq!(est.c_hat, 1.3952, epsilon = 1e-4);
        assert_eq!(est.argmax_index, Some(1));

        let mut rng = MatrixRng::new(10);
        let pairs: Vec<_> = (0..50).map(|_| (rng.psd(4, 10.0), rng.psd(4, 10.0))).collect();
        let est = estimate_exp_resolvent_constant(&pairs);
        assert!(est.c_hat.is_finite() && est.skipped.is_empty());
        assert!(est.reports.iter().all(|r| r.pass));
    }

    #[test]
    fn nonsym_examples() {
        let exp = KatoFunction::builtin("exp").unwrap();
        let a = MatrixRng::new(1).psd(3, 2.0);
        let r = check_nonsym_trotter_kato(&exp, &exp, &a, &Operator::zeros(3), &[1, 2, 4, 8], 1.0).unwrap();
        assert!(r.reports.iter().all(|r| r.lhs <= 1e-10));

        let a = Operator::from_diagonal(&[1.0, 2.0, 0.3]);
        let b = Operator::from_diagonal(&[0.5, 0.1, 2.0]);
        let r = check_nonsym_trotter_kato(&exp, &exp, &a, &b, &[1, 3, 16], 2.0).unwrap();
        assert!(r.reports.iter().all(|r| r.lhs <= 1e-10));

        let res = KatoFunction::builtin("resolvent-1").unwrap();
        let mut rng = MatrixRng::new(13);
        let (a, b) = (rng.psd(4, 2.0), rng.psd(4, 2.0));
        let r = check_nonsym_trotter_kato(&res, &res, &a, &b, &crate::approx::dyadic(0, 10), 1.0).unwrap();
        assert!(r.reports.iter().all(|r| r.lhs <= r.rhs + 1e-12));
        assert!(r.fit.unwrap().rho >= 0.9);
    }
}
