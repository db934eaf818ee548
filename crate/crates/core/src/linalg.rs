//! Dense complex linear algebra on `C^d`.
//!
//! Everything else in the crate trusts this layer: the spectral norm, the
//! Hermitian functional calculus, a Padé scaling-and-squaring exponential for
//! non-normal generators, binary powers and shifted resolvents.
//!
//! Matrices are stored densely as `DMatrix<Complex64>`; the intended sizes are
//! small (d <= 64).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for `||H - H*||` in [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Smallest singular value below which a shifted operator counts as singular.
pub const SINGULARITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A bounded operator on `C^d`, i.e. a square complex matrix with finite
/// entries.
#[derive(Clone, PartialEq)]
pub struct Operator {
    m: DMatrix<Complex64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator{}", self.m)
    }
}

impl Operator {
    /// Validates squareness, positive dimension and finiteness.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyOperator);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Operator { m })
    }

    // Arithmetic results of finite operators; finiteness is re-checked
    // wherever a norm or decomposition is taken.
    pub(crate) fn from_raw(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Operator { m }
    }

    pub fn identity(dim: usize) -> Self {
        Operator::from_raw(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator::from_raw(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Operator::from_raw(DMatrix::from_diagonal(&d))
    }

    pub fn from_complex_diagonal(diag: &[Complex64]) -> Self {
        Operator::from_raw(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Builds a real operator from row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: rows.first().map_or(0, |r| r.len()),
            });
        }
        Operator::new(DMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_raw(self.m.adjoint())
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Operator {
        Operator::from_raw((&self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `||A - A*||` in the spectral norm.
    pub fn hermitian_deviation(&self) -> f64 {
        spectral_norm_raw(&(&self.m - self.m.adjoint()))
    }

    pub fn scale(&self, c: f64) -> Operator {
        Operator::from_raw(&self.m * Complex64::new(c, 0.0))
    }

    pub fn scale_complex(&self, c: Complex64) -> Operator {
        Operator::from_raw(&self.m * c)
    }

    /// `A + z*I`.
    pub fn shift(&self, z: Complex64) -> Operator {
        let mut m = self.m.clone();
        for i in 0..self.dim() {
            m[(i, i)] += z;
        }
        Operator::from_raw(m)
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.m * v
    }

    /// Entrywise comparison, `max |a_ij - b_ij| <= tol`.
    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .m
                .iter()
                .zip(other.m.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `x* A x`.
    pub fn quadratic_form(&self, x: &DVector<Complex64>) -> Complex64 {
        x.dotc(&(&self.m * x))
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_raw(&self.m + &rhs.m)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_raw(&self.m - &rhs.m)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_raw(&self.m * &rhs.m)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_raw(-&self.m)
    }
}

/// JSON interchange form: `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for Operator {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Operator> {
        let d = j.dim;
        let check = |rows: &Vec<Vec<f64>>| -> Result<()> {
            if rows.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: rows.len(),
                });
            }
            for r in rows {
                if r.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: r.len(),
                    });
                }
            }
            Ok(())
        };
        check(&j.re)?;
        if !j.im.is_empty() {
            check(&j.im)?;
        }
        Operator::new(DMatrix::from_fn(d, d, |r, c| {
            let im = if j.im.is_empty() { 0.0 } else { j.im[r][c] };
            Complex64::new(j.re[r][c], im)
        }))
    }
}

impl From<&Operator> for MatrixJson {
    fn from(a: &Operator) -> MatrixJson {
        let d = a.dim();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|r| (0..d).map(|c| f(&a.m[(r, c)])).collect()).collect()
        };
        MatrixJson {
            dim: d,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Operator::try_from(j).map_err(serde::de::Error::custom)
    }
}

fn spectral_norm_raw(m: &DMatrix<Complex64>) -> f64 {
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    m.singular_values().max()
}

/// Largest singular value.
pub fn operator_norm(a: &Operator) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(spectral_norm_raw(&a.m))
}

/// Smallest singular value.
pub fn min_singular_value(a: &Operator) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(a.m.singular_values().min())
}

/// Eigen-decomposition `H = U diag(lambda) U*` of a Hermitian operator, with
/// eigenvalues ascending and `U` unitary.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `U diag(values) U*` for arbitrary complex `values`.
    pub fn compose(&self, values: &[Complex64]) -> Operator {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, v) in values.iter().enumerate() {
            let mut col = scaled.column_mut(j);
            col *= *v;
        }
        Operator::from_raw(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> Operator {
        let vals: Vec<Complex64> = self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        self.compose(&vals)
    }
}

/// Hermitian eigen-decomposition with the default tolerance.
pub fn hermitian_eig(h: &Operator) -> Result<HermitianSpectrum> {
    hermitian_eig_with_tol(h, HERMITIAN_TOL)
}

/// Rejects (never symmetrizes) inputs with `||H - H*|| > tol * (1 + ||H||)`.
pub fn hermitian_eig_with_tol(h: &Operator, tol: f64) -> Result<HermitianSpectrum> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = h.hermitian_deviation();
    let scale = 1.0 + spectral_norm_raw(&h.m);
    if deviation > tol * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::try_new(h.m.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(h.dim(), h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral functional calculus: `phi(H) = U diag(phi(lambda)) U*`.
pub fn matrix_function(s: &HermitianSpectrum, phi: impl Fn(f64) -> f64) -> Result<Operator> {
    let mut vals = Vec::with_capacity(s.dim());
    for &l in &s.eigenvalues {
        let v = phi(l);
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        vals.push(Complex64::new(v, 0.0));
    }
    Ok(s.compose(&vals))
}

// Padé [m/m] coefficients and the 1-norm thresholds of Higham's
// scaling-and-squaring method.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn real_scaled(m: &DMatrix<Complex64>, c: f64) -> DMatrix<Complex64> {
    m * Complex64::new(c, 0.0)
}

// Returns (U, V) with exp(X) ~ (V - U)^{-1} (V + U).
fn pade_low(x: &DMatrix<Complex64>, b: &[f64]) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let d = x.nrows();
    let x2 = x * x;
    let mut even = DMatrix::<Complex64>::identity(d, d);
    let mut u_acc = real_scaled(&even, b[1]);
    let mut v_acc = real_scaled(&even, b[0]);
    let mut k = 2;
    while k < b.len() {
        even = &even * &x2;
        v_acc += real_scaled(&even, b[k]);
        if k + 1 < b.len() {
            u_acc += real_scaled(&even, b[k + 1]);
        }
        k += 2;
    }
    (x * u_acc, v_acc)
}

fn pade13(x: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let b = &PADE13;
    let d = x.nrows();
    let id = DMatrix::<Complex64>::identity(d, d);
    let x2 = x * x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let inner_u = real_scaled(&x6, b[13]) + real_scaled(&x4, b[11]) + real_scaled(&x2, b[9]);
    let u = x * (&x6 * inner_u
        + real_scaled(&x6, b[7])
        + real_scaled(&x4, b[5])
        + real_scaled(&x2, b[3])
        + real_scaled(&id, b[1]));
    let inner_v = real_scaled(&x6, b[12]) + real_scaled(&x4, b[10]) + real_scaled(&x2, b[8]);
    let v = &x6 * inner_v
        + real_scaled(&x6, b[6])
        + real_scaled(&x4, b[4])
        + real_scaled(&x2, b[2])
        + real_scaled(&id, b[0]);
    (u, v)
}

/// `exp(X)` for a general square matrix by Padé scaling and squaring.
fn expm_raw(x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let d = x.nrows();
    let norm = one_norm(x);
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm == 0.0 {
        return Ok(DMatrix::identity(d, d));
    }
    let (u, v, squarings) = match THETA.iter().find(|(_, th)| norm <= *th) {
        Some(&(m, _)) => {
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(x, b);
            (u, v, 0)
        }
        None => {
            let s = (norm / THETA13).log2().ceil().max(0.0) as i32;
            let scaled = real_scaled(x, 2f64.powi(-s));
            let (u, v) = pade13(&scaled);
            (u, v, s)
        }
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::NonFinite)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(r)
}

/// `exp(-t A)`.
pub fn matrix_exp(a: &Operator, t: f64) -> Result<Operator> {
    assert!(t >= 0.0, "matrix_exp requires t >= 0, got {t}");
    if !a.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    expm_raw(&real_scaled(&a.m, -t)).map(Operator::from_raw)
}

/// `A^n` by binary exponentiation; `A^0 = I`.
pub fn matrix_power(a: &Operator, n: u64) -> Operator {
    let mut result: Option<DMatrix<Complex64>> = None;
    let mut base = a.m.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r * &base,
            });
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    Operator::from_raw(result.unwrap_or_else(|| DMatrix::identity(a.dim(), a.dim())))
}

/// `(z I + A)^{-1}`.
pub fn resolvent_shift(a: &Operator, z: Complex64) -> Result<Operator> {
    let shifted = a.shift(z);
    let sigma_min = min_singular_value(&shifted)?;
    if sigma_min <= SINGULARITY_TOL {
        return Err(Error::SingularShift { sigma_min });
    }
    shifted
        .m
        .lu()
        .try_inverse()
        .map(Operator::from_raw)
        .ok_or(Error::SingularShift { sigma_min })
}

/// `(I + tau A)^{-1}`; identity at `tau = 0`.
pub fn unit_resolvent(a: &Operator, tau: f64) -> Result<Operator> {
    if tau == 0.0 {
        return Ok(Operator::identity(a.dim()));
    }
    resolvent_shift(&a.scale(tau), ONE)
}
