//! Seeded random operators.
//!
//! All ensembles start from a ChaCha8 stream seeded with `seed_from_u64` and
//! draw complex Gaussian matrices `G` with independent `N(0, 1/2)` real and
//! imaginary parts. The post-processing per ensemble:
//!
//! * `hermitian`: `(G + G*) / 2`.
//! * `unitary`: the `Q` factor of `G = QR`, with column phases fixed so that
//!   `diag(R)` is positive (Haar distributed).
//! * `psd(d, r)`: `U diag(lambda) U*` with `U` unitary and `lambda_i` uniform
//!   on `[0, r]`.
//! * `sectorial(d, alpha, r)`: `P^{1/2} (I + iQ) P^{1/2}` with `P = psd(d, r)`
//!   and `Q` Hermitian rescaled to `||Q|| = 0.95 tan(alpha)`; its numerical
//!   range lies in the closed sector of semi-angle `alpha`.
//! * `normal(d)`: `U diag(z) U*` with complex Gaussian `z`.
//! * `contraction(d)`: `G / ||G||` times a uniform factor in `[0.2, 1]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{hermitian_eig, matrix_function, operator_norm, Operator};

/// Fraction of `tan(alpha)` used for the skew part of sectorial draws.
const SECTOR_FILL: f64 = 0.95;

pub struct MatrixRng {
    rng: ChaCha8Rng,
}

impl MatrixRng {
    pub fn new(seed: u64) -> Self {
        MatrixRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn normal_c(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    fn gaussian_raw(&mut self, d: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(d, d, |_, _| self.normal_c())
    }

    pub fn general(&mut self, d: usize) -> Operator {
        Operator::from_raw(self.gaussian_raw(d))
    }

    pub fn unit_vector(&mut self, d: usize) -> DVector<Complex64> {
        let v = DVector::from_fn(d, |_, _| self.normal_c());
        let n = v.norm();
        v / Complex64::new(n, 0.0)
    }

    pub fn hermitian(&mut self, d: usize) -> Operator {
        let g = self.gaussian_raw(d);
        Operator::from_raw((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn unitary(&mut self, d: usize) -> DMatrix<Complex64> {
        let qr = self.gaussian_raw(d).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..d {
            let rjj = r[(j, j)];
            let phase = if rjj.norm() > 0.0 {
                rjj / rjj.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let mut col = q.column_mut(j);
            col *= phase;
        }
        q
    }

    /// `U diag(spectrum) U*` for a Haar unitary `U`.
    pub fn with_spectrum(&mut self, spectrum: &[f64]) -> Operator {
        let u = self.unitary(spectrum.len());
        let diag = DVector::from_iterator(spectrum.len(), spectrum.iter().map(|&l| Complex64::new(l, 0.0)));
        let m = &u * DMatrix::from_diagonal(&diag) * u.adjoint();
        // exact Hermitian symmetry
        Operator::from_raw((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn psd(&mut self, d: usize, spectral_radius: f64) -> Operator {
        let spectrum: Vec<f64> = (0..d).map(|_| self.uniform(0.0, spectral_radius)).collect();
        self.with_spectrum(&spectrum)
    }

    /// Hermitian with spectrum in `[0, 1]`.
    pub fn hermitian_contraction(&mut self, d: usize) -> Operator {
        self.psd(d, 1.0)
    }

    pub fn contraction(&mut self, d: usize) -> Operator {
        let g = self.general(d);
        let n = operator_norm(&g).expect("finite gaussian draw");
        let s = self.uniform(0.2, 1.0);
        g.scale(s / n)
    }

    pub fn normal(&mut self, d: usize) -> Operator {
        self.normal_with_eigenvalues(d).0
    }

    /// A normal draw together with its eigenvalues.
    pub fn normal_with_eigenvalues(&mut self, d: usize) -> (Operator, Vec<Complex64>) {
        let u = self.unitary(d);
        let z: Vec<Complex64> = (0..d).map(|_| self.normal_c()).collect();
        let m = &u * DMatrix::from_diagonal(&DVector::from_column_slice(&z)) * u.adjoint();
        (Operator::from_raw(m), z)
    }

    pub fn sectorial(&mut self, d: usize, alpha: f64, spectral_radius: f64) -> Operator {
        let p = self.psd(d, spectral_radius);
        let q = self.hermitian(d);
        let qn = operator_norm(&q).expect("finite gaussian draw");
        let q = if qn > 0.0 {
            q.scale(SECTOR_FILL * alpha.tan() / qn)
        } else {
            q
        };
        let root = matrix_function(&hermitian_eig(&p).expect("psd draw is Hermitian"), |x| x.max(0.0).sqrt())
            .expect("finite square root");
        let core = &Operator::identity(d) + &q.scale_complex(Complex64::new(0.0, 1.0));
        &(&root * &core) * &root
    }
}
