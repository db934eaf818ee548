//! Chernoff families `tau -> F(tau)` with `F(0) = I` and `F'(+0) = -H`.
//!
//! Five constructions are provided:
//!
//! | kind                | `F(tau)`                                      | generator |
//! |---------------------|-----------------------------------------------|-----------|
//! | `resolvent`         | `(I + tau H)^{-1}`                            | `H`       |
//! | `exponential`       | `e^{-tau H}`                                  | `H`       |
//! | `kato`              | `f(tau A)`                                    | `A`       |
//! | `trotter`           | `e^{-tau A} e^{-tau B}`                       | `A + B`   |
//! | `symmetrized-kato`  | `g(tau B)^{1/2} f(tau A) g(tau B)^{1/2}`      | `A + B`   |
//!
//! The declared [`Regularity`] is checked at construction and never inferred.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kato::KatoFunction;
use crate::linalg::{
    hermitian_eig, matrix_exp, matrix_function, operator_norm, unit_resolvent, HermitianSpectrum, Operator,
};
use crate::range::{contained_in_sector, range_boundary, SectorSpec, DEFAULT_POINTS};

/// Relative slack on `min spectrum >= 0` for positivity checks.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    SelfAdjoint,
    QuasiSectorial(SectorSpec),
    General,
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularity::SelfAdjoint => f.write_str("self-adjoint"),
            Regularity::QuasiSectorial(s) => write!(f, "quasi-sectorial:{}", s.alpha()),
            Regularity::General => f.write_str("general"),
        }
    }
}

impl FromStr for Regularity {
    type Err = Error;

    /// `self-adjoint`, `general`, or `quasi-sectorial:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self-adjoint" => Ok(Regularity::SelfAdjoint),
            "general" => Ok(Regularity::General),
            _ => {
                let alpha = s
                    .strip_prefix("quasi-sectorial:")
                    .and_then(|a| a.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown regularity `{s}`")))?;
                Ok(Regularity::QuasiSectorial(SectorSpec::new(alpha)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Resolvent,
    Exponential,
    Kato,
    Trotter,
    SymmetrizedKato,
}

impl FamilyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Resolvent => "resolvent",
            FamilyKind::Exponential => "exponential",
            FamilyKind::Kato => "kato",
            FamilyKind::Trotter => "trotter",
            FamilyKind::SymmetrizedKato => "symmetrized-kato",
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "resolvent" => FamilyKind::Resolvent,
            "exponential" | "exp" => FamilyKind::Exponential,
            "kato" => FamilyKind::Kato,
            "trotter" => FamilyKind::Trotter,
            "symmetrized-kato" | "symmetrized" => FamilyKind::SymmetrizedKato,
            other => return Err(Error::InvalidConfig(format!("unknown family kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone)]
enum Construction {
    Resolvent(Operator),
    Exponential(Operator),
    Kato {
        f: KatoFunction,
        a: HermitianSpectrum,
    },
    Trotter {
        a: HermitianSpectrum,
        b: HermitianSpectrum,
    },
    Symmetrized {
        f: KatoFunction,
        g: KatoFunction,
        a: HermitianSpectrum,
        b: HermitianSpectrum,
    },
}

#[derive(Debug, Clone)]
pub struct ChernoffFamily {
    construction: Construction,
    generator: Operator,
    regularity: Regularity,
    label: String,
}

/// Spectrum of a Hermitian operator whose eigenvalues are all `>= -PSD_TOL * (1 + ||A||)`.
fn psd_spectrum(a: &Operator, what: &str) -> Result<HermitianSpectrum> {
    let s = hermitian_eig(a)?;
    let tol = PSD_TOL * (1.0 + s.max().abs().max(s.min().abs()));
    if s.min() < -tol {
        return Err(Error::RegularityMismatch(format!(
            "{what} is not positive semi-definite: min eigenvalue {}",
            s.min()
        )));
    }
    Ok(s)
}

fn check_declared(h: &Operator, regularity: Regularity) -> Result<()> {
    match regularity {
        Regularity::SelfAdjoint => {
            if h.hermitian_deviation() > PSD_TOL * (1.0 + operator_norm(h)?) {
                return Err(Error::RegularityMismatch(format!(
                    "generator is not Hermitian: ||H - H*|| = {:e}",
                    h.hermitian_deviation()
                )));
            }
            psd_spectrum(h, "generator").map(|_| ())
        }
        Regularity::QuasiSectorial(s) => {
            let (ok, margin) = contained_in_sector(&range_boundary(h, DEFAULT_POINTS)?, s);
            if ok {
                Ok(())
            } else {
                Err(Error::RegularityMismatch(format!(
                    "numerical range leaves the sector of semi-angle {} (margin {margin:e})",
                    s.alpha()
                )))
            }
        }
        Regularity::General => Ok(()),
    }
}

/// `phi(tau A)` for a Hermitian `A` given by its spectrum.
pub fn spectral_eval(a: &HermitianSpectrum, tau: f64, phi: impl Fn(f64) -> f64) -> Operator {
    let vals: Vec<Complex64> = a
        .eigenvalues
        .iter()
        .map(|&l| Complex64::new(phi(tau * l), 0.0))
        .collect();
    a.compose(&vals)
}

/// `X^{1/2}` for a Hermitian `X >= 0`, clamping round-off negatives to zero.
pub fn psd_sqrt(x: &Operator) -> Result<Operator> {
    matrix_function(&hermitian_eig(x)?, |l| l.max(0.0).sqrt())
}

impl ChernoffFamily {
    pub fn resolvent(h: Operator, regularity: Regularity) -> Result<Self> {
        check_declared(&h, regularity)?;
        Ok(ChernoffFamily {
            construction: Construction::Resolvent(h.clone()),
            generator: h,
            regularity,
            label: FamilyKind::Resolvent.as_str().into(),
        })
    }

    pub fn exponential(h: Operator, regularity: Regularity) -> Result<Self> {
        check_declared(&h, regularity)?;
        Ok(ChernoffFamily {
            construction: Construction::Exponential(h.clone()),
            generator: h,
            regularity,
            label: FamilyKind::Exponential.as_str().into(),
        })
    }

    pub fn kato(f: KatoFunction, a: Operator) -> Result<Self> {
        let spec = psd_spectrum(&a, "A")?;
        Ok(ChernoffFamily {
            construction: Construction::Kato { f, a: spec },
            generator: a,
            regularity: Regularity::SelfAdjoint,
            label: FamilyKind::Kato.as_str().into(),
        })
    }

    /// `e^{-tau A} e^{-tau B}`; not self-adjoint, so the regularity is
    /// `General`.
    pub fn trotter(a: Operator, b: Operator) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let sa = psd_spectrum(&a, "A")?;
        let sb = psd_spectrum(&b, "B")?;
        Ok(ChernoffFamily {
            construction: Construction::Trotter { a: sa, b: sb },
            generator: &a + &b,
            regularity: Regularity::General,
            label: FamilyKind::Trotter.as_str().into(),
        })
    }

    pub fn symmetrized(f: KatoFunction, g: KatoFunction, a: Operator, b: Operator) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let sa = psd_spectrum(&a, "A")?;
        let sb = psd_spectrum(&b, "B")?;
        Ok(ChernoffFamily {
            construction: Construction::Symmetrized { f, g, a: sa, b: sb },
            generator: &a + &b,
            regularity: Regularity::SelfAdjoint,
            label: FamilyKind::SymmetrizedKato.as_str().into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> FamilyKind {
        match self.construction {
            Construction::Resolvent(_) => FamilyKind::Resolvent,
            Construction::Exponential(_) => FamilyKind::Exponential,
            Construction::Kato { .. } => FamilyKind::Kato,
            Construction::Trotter { .. } => FamilyKind::Trotter,
            Construction::Symmetrized { .. } => FamilyKind::SymmetrizedKato,
        }
    }

    pub fn generator(&self) -> &Operator {
        &self.generator
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// `F(tau)`; exactly the identity at `tau = 0`.
    pub fn eval_f(&self, tau: f64) -> Result<Operator> {
        if !(tau >= 0.0) {
            return Err(Error::NegativeTau(tau));
        }
        if tau == 0.0 {
            return Ok(Operator::identity(self.dim()));
        }
        match &self.construction {
            Construction::Resolvent(h) => unit_resolvent(h, tau),
            Construction::Exponential(h) => matrix_exp(h, tau),
            Construction::Kato { f, a } => Ok(spectral_eval(a, tau, |s| f.eval(s))),
            Construction::Trotter { a, b } => {
                let ea = spectral_eval(a, tau, |s| (-s).exp());
                let eb = spectral_eval(b, tau, |s| (-s).exp());
                Ok(&ea * &eb)
            }
            Construction::Symmetrized { f, g, a, b } => {
                let root = psd_sqrt(&spectral_eval(b, tau, |s| g.eval(s)))?;
                let fa = spectral_eval(a, tau, |s| f.eval(s));
                Ok(&(&root * &fa) * &root)
            }
        }
    }

    /// `S(tau) = (I - F(tau)) / tau`.
    pub fn eval_s(&self, tau: f64) -> Result<Operator> {
        if !(tau > 0.0) {
            return Err(Error::NonPositiveTau(tau));
        }
        let f = self.eval_f(tau)?;
        Ok((&Operator::identity(self.dim()) - &f).scale(1.0 / tau))
    }

    /// The factors `(f(tau A), g(tau B))` of a symmetrized family.
    pub fn kato_factors(&self, tau: f64) -> Option<(Operator, Operator)> {
        match &self.construction {
            Construction::Symmetrized { f, g, a, b } => Some((
                spectral_eval(a, tau, |s| f.eval(s)),
                spectral_eval(b, tau, |s| g.eval(s)),
            )),
            _ => None,
        }
    }
}

pub fn make_resolvent_family(h: Operator, regularity: Regularity) -> Result<ChernoffFamily> {
    ChernoffFamily::resolvent(h, regularity)
}

pub fn make_exp_family(h: Operator, regularity: Regularity) -> Result<ChernoffFamily> {
    ChernoffFamily::exponential(h, regularity)
}

pub fn make_kato_family(f: KatoFunction, a: Operator) -> Result<ChernoffFamily> {
    ChernoffFamily::kato(f, a)
}

pub fn make_trotter_family(a: Operator, b: Operator) -> Result<ChernoffFamily> {
    ChernoffFamily::trotter(a, b)
}

pub fn make_symmetrized_family(
    f: KatoFunction,
    g: KatoFunction,
    a: Operator,
    b: Operator,
) -> Result<ChernoffFamily> {
    ChernoffFamily::symmetrized(f, g, a, b)
}

pub fn eval_f(fam: &ChernoffFamily, tau: f64) -> Result<Operator> {
    fam.eval_f(tau)
}

pub fn eval_s(fam: &ChernoffFamily, tau: f64) -> Result<Operator> {
    fam.eval_s(tau)
}
