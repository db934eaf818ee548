//! JSON scenario files and the experiment runner behind the CLI.
//!
//! A scenario names one family, an `n` list, a time (point or interval) and
//! the bounds to verify. Running it writes `errors.csv`, `reports.json` and
//! `summary.txt` into the output directory.
//!
//! Matrices are given inline (`{"dim", "re", "im"}`) or as
//! `random:{d=8,spectral_radius=10,psd}` / `random:{d=8,seed=2,sectorial:0.785}`.
//! A random matrix is drawn from the scenario seed plus its own `seed`
//! (default: 0 for `H`, 1 for `A`, 2 for `B`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::{error_curve, write_csv, ErrorCurve, TimeSpec};
use crate::bounds::{
    check_cube_root_bounds, check_nonsym_trotter_kato, check_resolvent_rate, check_sectorial_resolvent,
    check_spectral_bounds, check_sqrt_n_lemma, check_strict_contraction, check_tau_linear_resolvent, estimate_k,
    estimate_exp_resolvent_constant, BoundId, BoundReport,
};
use crate::error::{Error, Result};
use crate::family::{ChernoffFamily, FamilyKind, Regularity};
use crate::kato::KatoFunction;
use crate::linalg::{MatrixJson, Operator};
use crate::par::par_map;
use crate::random::MatrixRng;
use crate::range::SectorSpec;

/// Unit vectors drawn per `(tau, n)` cell for the `sqrt(n)` lemma.
pub const DEFAULT_PROBE_VECTORS: usize = 4;

fn default_tau_grid() -> Vec<f64> {
    vec![0.1, 0.5, 1.0]
}

fn default_rho() -> f64 {
    1.0
}

fn default_probe_vectors() -> usize {
    DEFAULT_PROBE_VECTORS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Inline(MatrixJson),
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: String,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<MatrixSource>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixSource>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kato_f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kato_g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub family: FamilySpec,
    pub n_list: Vec<u64>,
    pub t: TimeSpec,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub bounds: Vec<BoundId>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Step sizes at which single-operator bounds are evaluated on `F(tau)`.
    #[serde(default = "default_tau_grid")]
    pub tau_grid: Vec<f64>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Lower end of the strict-contraction probe grid (default: smallest tau).
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Resolvent points as `[re, im]` pairs.
    #[serde(default)]
    pub zetas: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_probe_vectors")]
    pub probe_vectors: usize,
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn locate(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1)
}

impl Scenario {
    /// Parses and validates; every error message starts with `line N:`.
    pub fn parse(text: &str) -> Result<Scenario> {
        let s: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("line {}: {}", e.line(), e)))?;
        s.validate()
            .map_err(|(key, msg)| Error::InvalidConfig(format!("line {}: `{key}`: {msg}", locate(text, key))))?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.n_list.is_empty() {
            return Err(("n_list", "must be non-empty".into()));
        }
        if self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(("n_list", format!("must be strictly ascending and >= 1, got {:?}", self.n_list)));
        }
        self.t.validate().map_err(|e| ("t", e.to_string()))?;
        if let Some(a) = self.alpha {
            SectorSpec::new(a).map_err(|e| ("alpha", e.to_string()))?;
        }
        if self.tau_grid.is_empty() || self.tau_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(("tau_grid", "must be non-empty and positive".into()));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(("rho", format!("must lie in (0, 1], got {}", self.rho)));
        }
        if matches!(self.epsilon, Some(e) if !(e > 0.0)) {
            return Err(("epsilon", "must be positive".into()));
        }
        let f = &self.family;
        let kind: FamilyKind = f.kind.parse().map_err(|e: Error| ("kind", e.to_string()))?;
        let needs = match kind {
            FamilyKind::Resolvent | FamilyKind::Exponential => vec![("H", f.h.as_ref())],
            FamilyKind::Kato => vec![("A", f.a.as_ref())],
            FamilyKind::Trotter | FamilyKind::SymmetrizedKato => vec![("A", f.a.as_ref()), ("B", f.b.as_ref())],
        };
        for (key, src) in needs {
            match src {
                None => return Err(("family", format!("kind `{}` needs `{key}`", f.kind))),
                Some(MatrixSource::Spec(s)) => {
                    RandomSpec::parse(s).map_err(|e| (key, e.to_string()))?;
                    if self.seed.is_none() {
                        return Err(("family", "random matrices need a scenario `seed`".into()));
                    }
                }
                Some(MatrixSource::Inline(_)) => {}
            }
        }
        let kato_ids: &[(&'static str, &Option<String>)] = match kind {
            FamilyKind::Kato => &[("kato_f", &f.kato_f)],
            FamilyKind::SymmetrizedKato => &[("kato_f", &f.kato_f), ("kato_g", &f.kato_g)],
            _ => &[],
        };
        for (key, id) in kato_ids {
            match id {
                None => return Err((*key, format!("kind `{}` needs `{key}`", f.kind))),
                Some(id) => {
                    KatoFunction::builtin(id).map_err(|e| (*key, e.to_string()))?;
                }
            }
        }
        if let Some(r) = &f.regularity {
            r.parse::<Regularity>().map_err(|e| ("regularity", e.to_string()))?;
        } else if matches!(kind, FamilyKind::Resolvent | FamilyKind::Exponential) {
            return Err(("family", format!("kind `{}` needs a declared `regularity`", f.kind)));
        }
        Ok(())
    }

    fn sector(&self, fam: &ChernoffFamily) -> Option<SectorSpec> {
        match (self.alpha, fam.regularity()) {
            (Some(a), _) => SectorSpec::new(a).ok(),
            (None, Regularity::QuasiSectorial(s)) => Some(s),
            _ => None,
        }
    }
}

/// Parsed `random:{...}` matrix spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub d: usize,
    pub seed: Option<u64>,
    pub spectral_radius: f64,
    /// `None` for PSD, `Some(alpha)` for sectorial.
    pub sectorial: Option<f64>,
}

impl RandomSpec {
    pub fn parse(s: &str) -> Result<RandomSpec> {
        let bad = |why: &str| Error::InvalidConfig(format!("bad random matrix spec `{s}`: {why}"));
        let body = s
            .trim()
            .strip_prefix("random:{")
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| bad("expected random:{...}"))?;
        let mut d = None;
        let mut seed = None;
        let mut spectral_radius: f64 = 1.0;
        let mut shape = None;
        for item in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item.split_once('=') {
                Some(("d", v)) => d = Some(v.trim().parse().map_err(|_| bad("d must be an integer"))?),
                Some(("seed", v)) => seed = Some(v.trim().parse().map_err(|_| bad("seed must be an integer"))?),
                Some(("spectral_radius", v)) => {
                    spectral_radius = v.trim().parse().map_err(|_| bad("spectral_radius must be a number"))?
                }
                Some((k, _)) => return Err(bad(&format!("unknown key `{k}`"))),
                None if item == "psd" => shape = Some(None),
                None => match item.strip_prefix("sectorial:") {
                    Some(a) => {
                        let a: f64 = a.trim().parse().map_err(|_| bad("sectorial angle must be a number"))?;
                        SectorSpec::new(a)?;
                        shape = Some(Some(a));
                    }
                    None => return Err(bad(&format!("unknown item `{item}`"))),
                },
            }
        }
        let d = d.filter(|&d| d > 0).ok_or_else(|| bad("positive `d` required"))?;
        let sectorial = shape.ok_or_else(|| bad("one of `psd` or `sectorial:<alpha>` required"))?;
        if !(spectral_radius >= 0.0 && spectral_radius.is_finite()) {
            return Err(bad("spectral_radius must be non-negative"));
        }
        Ok(RandomSpec {
            d,
            seed,
            spectral_radius,
            sectorial,
        })
    }

    pub fn draw(&self, scenario_seed: u64, slot: u64) -> Operator {
        let mut rng = MatrixRng::new(scenario_seed.wrapping_add(self.seed.unwrap_or(slot)));
        match self.sectorial {
            None => rng.psd(self.d, self.spectral_radius),
            Some(a) => rng.sectorial(self.d, a, self.spectral_radius),
        }
    }
}

fn materialize(src: &MatrixSource, seed: u64, slot: u64) -> Result<Operator> {
    match src {
        MatrixSource::Inline(m) => Operator::try_from(m.clone()),
        MatrixSource::Spec(s) => Ok(RandomSpec::parse(s)?.draw(seed, slot)),
    }
}

/// Builds the family described by `spec` for the given scenario seed.
pub fn build_family(spec: &FamilySpec, seed: u64) -> Result<ChernoffFamily> {
    let kind: FamilyKind = spec.kind.parse()?;
    let matrix = |src: &Option<MatrixSource>, name: &str, slot| {
        src.as_ref()
            .ok_or_else(|| Error::InvalidConfig(format!("family needs `{name}`")))
            .and_then(|m| materialize(m, seed, slot))
    };
    let kato = |id: &Option<String>, name: &str| {
        id.as_deref()
            .ok_or_else(|| Error::InvalidConfig(format!("family needs `{name}`")))
            .and_then(KatoFunction::builtin)
    };
    let declared = spec.regularity.as_deref().map(str::parse::<Regularity>).transpose()?;
    let fam = match kind {
        FamilyKind::Resolvent | FamilyKind::Exponential => {
            let h = matrix(&spec.h, "H", 0)?;
            let r = declared.ok_or_else(|| Error::InvalidConfig("family needs `regularity`".into()))?;
            if kind == FamilyKind::Resolvent {
                ChernoffFamily::resolvent(h, r)?
            } else {
                ChernoffFamily::exponential(h, r)?
            }
        }
        FamilyKind::Kato => ChernoffFamily::kato(kato(&spec.kato_f, "kato_f")?, matrix(&spec.a, "A", 1)?)?,
        FamilyKind::Trotter => ChernoffFamily::trotter(matrix(&spec.a, "A", 1)?, matrix(&spec.b, "B", 2)?)?,
        FamilyKind::SymmetrizedKato => ChernoffFamily::symmetrized(
            kato(&spec.kato_f, "kato_f")?,
            kato(&spec.kato_g, "kato_g")?,
            matrix(&spec.a, "A", 1)?,
            matrix(&spec.b, "B", 2)?,
        )?,
    };
    if let Some(r) = declared {
        if r != fam.regularity() {
            return Err(Error::RegularityMismatch(format!(
                "declared {r}, but a {} family is {}",
                kind.as_str(),
                fam.regularity()
            )));
        }
    }
    Ok(fam)
}

/// Everything a scenario run produces, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub curves: Vec<ErrorCurve>,
    pub reports: Vec<BoundReport>,
    pub summary: String,
}

impl RunOutput {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.reports.len()
    }

    pub fn pass_line(&self) -> String {
        format!("PASS {}/{}", self.passed(), self.reports.len())
    }
}

fn bound_error(id: BoundId, e: Error) -> Error {
    match e {
        Error::Io(_) => e,
        other => Error::InvalidConfig(format!("bound `{id}` does not apply: {other}")),
    }
}

fn flatten<T>(v: Vec<Result<Vec<T>>>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for part in v {
        out.extend(part?);
    }
    Ok(out)
}

fn t_max(t: &TimeSpec) -> f64 {
    match t {
        TimeSpec::At(t) => *t,
        TimeSpec::Over(iv) => iv.hi,
    }
}

fn run_bound(s: &Scenario, fam: &ChernoffFamily, id: BoundId, seed: u64) -> Result<(Vec<BoundReport>, Vec<String>)> {
    let taus = &s.tau_grid;
    let unit_taus: Vec<f64> = taus.iter().copied().filter(|&t| t <= 1.0).collect();
    let n_max = *s.n_list.last().expect("validated");
    let tag = |reports: Vec<BoundReport>, tau: f64| -> Vec<BoundReport> {
        reports.into_iter().map(|r| r.with_param("tau", tau)).collect()
    };
    let mut notes = Vec::new();
    let reports = match id {
        BoundId::SpectralPower => flatten(par_map(taus, |&tau| {
            Ok(tag(check_spectral_bounds(&fam.eval_f(tau)?, &s.n_list)?, tau))
        }))?,
        BoundId::SqrtNLemma => {
            let mut rng = MatrixRng::new(seed ^ 0x9e37_79b9_7f4a_7c15);
            let mut cells: Vec<(f64, u64, DVector<Complex64>)> = Vec::new();
            for &tau in taus {
                for &n in &s.n_list {
                    for _ in 0..s.probe_vectors {
                        cells.push((tau, n, rng.unit_vector(fam.dim())));
                    }
                }
            }
            let fs: Vec<Operator> = taus.iter().map(|&t| fam.eval_f(t)).collect::<Result<_>>()?;
            let reports = par_map(&cells, |(tau, n, w)| {
                let i = taus.iter().position(|t| t == tau).expect("tau from grid");
                check_sqrt_n_lemma(&fs[i], *n, w).map(|r| r.with_param("tau", *tau))
            });
            reports.into_iter().collect::<Result<Vec<_>>>()?
        }
        BoundId::PowerDefect => flatten(par_map(taus, |&tau| {
            let k = estimate_k(&fam.eval_f(tau)?, n_max)?;
            Ok(tag(k.reports, tau))
        }))?,
        BoundId::CubeRoot => {
            let per_tau = par_map(taus, |&tau| -> Result<(f64, Vec<BoundReport>)> {
                let f = fam.eval_f(tau)?;
                let k = estimate_k(&f, n_max)?;
                Ok((k.k_hat, tag(check_cube_root_bounds(&f, &s.n_list, k.k_hat)?, tau)))
            });
            let mut out = Vec::new();
            for (tau, r) in taus.iter().zip(per_tau) {
                let (k, reports) = r?;
                notes.push(format!("tau={tau}: K_hat={k:.6e}"));
                out.extend(reports);
            }
            out
        }
        BoundId::ResolventRate => {
            let est = check_resolvent_rate(fam, fam.generator(), s.rho, &unit_taus, &unit_taus)?;
            notes.push(format!("M_rho_hat={:.6e} (rho={})", est.value, s.rho));
            est.reports
        }
        BoundId::TauLinearResolvent => {
            let est = check_tau_linear_resolvent(fam, fam.generator(), &unit_taus)?;
            notes.push(format!("M_1_hat={:.6e}", est.value));
            est.reports
        }
        BoundId::SectorialResolvent => {
            let sector = s
                .sector(fam)
                .ok_or_else(|| Error::InvalidConfig("needs `alpha` or a quasi-sectorial regularity".into()))?;
            let zetas: Vec<Complex64> = match &s.zetas {
                Some(z) => z.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                None => (0..6)
                    .map(|k| Complex64::new(0.0, 0.9f64.powi(k)))
                    .chain([Complex64::new(1.0, 0.0)])
                    .collect(),
            };
            let est = check_sectorial_resolvent(fam, fam.generator(), sector, &zetas, taus)?;
            notes.push(format!("L_hat={:.6e}", est.value));
            est.reports
        }
        BoundId::StrictContraction => {
            let eps = s.epsilon.unwrap_or_else(|| taus.iter().copied().fold(f64::INFINITY, f64::min));
            let probe: Vec<f64> = taus.iter().copied().filter(|&t| t >= eps).collect();
            let r = check_strict_contraction(fam, eps, &probe)?;
            notes.push(format!("delta_hat={:.6e} (eps={eps})", r.delta_hat));
            r.reports
        }
        BoundId::ExpResolventConstant => {
            let pairs: Vec<(Operator, Operator)> = taus
                .iter()
                .map(|&tau| Ok((fam.eval_s(tau)?, fam.generator().clone())))
                .collect::<Result<_>>()?;
            let est = estimate_exp_resolvent_constant(&pairs);
            notes.push(format!("c_hat={:.6e} (skipped pairs: {:?})", est.c_hat, est.skipped));
            est.reports
                .into_iter()
                .map(|r| {
                    let tau = taus[r.params["pair"] as usize];
                    r.with_param("tau", tau)
                })
                .collect()
        }
        BoundId::NonsymTrotterKato => {
            let f = &s.family;
            if fam.kind() != FamilyKind::SymmetrizedKato {
                return Err(Error::InvalidConfig("needs a symmetrized-kato family".into()));
            }
            let kf = KatoFunction::builtin(f.kato_f.as_deref().unwrap_or_default())?;
            let kg = KatoFunction::builtin(f.kato_g.as_deref().unwrap_or_default())?;
            let a = materialize(f.a.as_ref().expect("validated"), seed, 1)?;
            let b = materialize(f.b.as_ref().expect("validated"), seed, 2)?;
            let r = check_nonsym_trotter_kato(&kf, &kg, &a, &b, &s.n_list, t_max(&s.t))?;
            if let Some(fit) = r.fit {
                notes.push(format!("fitted rho={:.6} C={:.6e}", fit.rho, fit.c));
            }
            r.reports
        }
    };
    Ok((reports, notes))
}

/// Runs `s` with the given seed without writing anything.
pub fn execute(s: &Scenario, seed: u64) -> Result<RunOutput> {
    execute_with(s, seed, true)
}

fn execute_with(s: &Scenario, seed: u64, with_bounds: bool) -> Result<RunOutput> {
    let fam = build_family(&s.family, seed)?.with_label(format!("{}-{}", s.name, s.family.kind));
    let curve = error_curve(&fam, s.t, &s.n_list)?;

    let mut bounds = if with_bounds { s.bounds.clone() } else { Vec::new() };
    bounds.sort();
    bounds.dedup();

    let mut reports = Vec::new();
    let mut summary = String::new();
    writeln!(summary, "scenario: {}", s.name).ok();
    writeln!(summary, "family: {} ({}), dim {}", fam.kind().as_str(), fam.regularity(), fam.dim()).ok();
    writeln!(summary, "seed: {seed}").ok();
    match &curve.fitted {
        Some(fit) => writeln!(
            summary,
            "rate: error ~ {:.6e} * n^-{:.6} (log residual {:.3e})",
            fit.c, fit.rho, fit.residual
        ),
        None => writeln!(summary, "rate: not fitted (too few errors above floor)"),
    }
    .ok();
    for id in bounds {
        let (r, notes) = run_bound(s, &fam, id, seed).map_err(|e| bound_error(id, e))?;
        let pass = r.iter().filter(|r| r.pass).count();
        let warn = r.iter().filter(|r| r.warning.is_some()).count();
        write!(summary, "{id}: {pass}/{} pass", r.len()).ok();
        if warn > 0 {
            write!(summary, ", {warn} within tolerance").ok();
        }
        for n in notes {
            write!(summary, "; {n}").ok();
        }
        summary.push('\n');
        reports.extend(r);
    }
    let out = RunOutput {
        curves: vec![curve],
        reports,
        summary,
    };
    let line = out.pass_line();
    let mut out = out;
    writeln!(out.summary, "{line}").ok();
    Ok(out)
}

/// Error curve and fit only.
pub fn execute_rate(s: &Scenario, seed: u64) -> Result<RunOutput> {
    execute_with(s, seed, false)
}

/// Runs seeds `seed, seed + 1, ..., seed + k - 1` and merges the outputs;
/// family ids and report params carry the seed.
pub fn execute_sweep(s: &Scenario, k: u64) -> Result<RunOutput> {
    if k == 0 {
        return Err(Error::InvalidConfig("--seeds must be at least 1".into()));
    }
    let base = s.seed.unwrap_or(0);
    let seeds: Vec<u64> = (0..k).map(|i| base.wrapping_add(i)).collect();
    let runs = par_map(&seeds, |&seed| execute(s, seed));
    let mut curves = Vec::new();
    let mut reports = Vec::new();
    let mut per_bound: BTreeMap<BoundId, (usize, usize)> = BTreeMap::new();
    for (seed, run) in seeds.iter().zip(runs) {
        let run = run?;
        for mut c in run.curves {
            c.family_id = format!("{}#{seed}", c.family_id);
            curves.push(c);
        }
        for r in run.reports {
            let e = per_bound.entry(r.bound_id).or_default();
            e.0 += r.pass as usize;
            e.1 += 1;
            reports.push(r.with_param("seed", *seed as f64));
        }
    }
    let mut summary = String::new();
    writeln!(summary, "scenario: {} sweep over {k} seeds from {base}", s.name).ok();
    let rhos: Vec<f64> = curves.iter().filter_map(|c| c.fitted.map(|f| f.rho)).collect();
    if !rhos.is_empty() {
        let lo = rhos.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rhos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(summary, "fitted rho over seeds: [{lo:.6}, {hi:.6}]").ok();
    }
    for (id, (p, n)) in per_bound {
        writeln!(summary, "{id}: {p}/{n} pass").ok();
    }
    let out = RunOutput {
        curves,
        reports,
        summary,
    };
    let line = out.pass_line();
    let mut out = out;
    writeln!(out.summary, "{line}").ok();
    Ok(out)
}

/// Writes `errors.csv`, `reports.json` and `summary.txt` into `dir`.
pub fn write_artifacts(dir: &Path, out: &RunOutput) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let csv = fs::File::create(dir.join("errors.csv")).map_err(io)?;
    write_csv(BufWriter::new(csv), &out.curves)?;
    let mut json = serde_json::to_string_pretty(&out.reports).map_err(|e| Error::Io(e.to_string()))?;
    json.push('\n');
    fs::write(dir.join("reports.json"), json).map_err(io)?;
    fs::write(dir.join("summary.txt"), &out.summary).map_err(io)?;
    Ok(())
}

/// Output directory: the override, else the scenario's, else `out/<name>`.
pub fn output_dir(s: &Scenario, override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .or_else(|| s.out_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(&s.name))
}

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    AllPass = 0,
    Violated = 1,
    Invalid = 2,
}

impl Status {
    pub fn of(out: &RunOutput) -> Status {
        if out.all_pass() {
            Status::AllPass
        } else {
            Status::Violated
        }
    }

    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Runs with the scenario seed and writes artifacts.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<(Status, RunOutput)> {
    let out = execute(s, s.seed.unwrap_or(0))?;
    write_artifacts(out_dir, &out)?;
    Ok((Status::of(&out), out))
}
