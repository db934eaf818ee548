//! Numerical ranges `W(A) = { x*Ax : |x| = 1 }` and the sector / lens-domain
//! geometry used to certify sectorial generators and quasi-sectorial
//! contractions.
//!
//! Boundaries are computed by the support-function method: for a direction
//! `theta` the top eigenvector `x` of the Hermitian part of `e^{i theta} A`
//! maximizes `Re(e^{i theta} z)` over `W(A)`, and `x*Ax` is a boundary point.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Operator};

/// Membership slack for closed-region tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Default number of support directions.
pub const DEFAULT_POINTS: usize = 360;

/// Points closer than this to the vertex are treated as the vertex itself.
const VERTEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RangeBoundary {
    pub points: Vec<Complex64>,
    pub angles: Vec<f64>,
    pub dim: usize,
}

/// Semi-angle `alpha` in `[0, pi/2)` of the sector `S_alpha = {|arg z| <= alpha}`
/// and of the lens domain `D_alpha` with vertex at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    alpha: f64,
}

impl SectorSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&alpha) {
            return Err(Error::InvalidSector { alpha });
        }
        Ok(SectorSpec { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub fn range_boundary(a: &Operator, m: usize) -> Result<RangeBoundary> {
    if m < 8 {
        return Err(Error::BadGrid(format!("numerical range needs at least 8 directions, got {m}")));
    }
    let mut points = Vec::with_capacity(m);
    let mut angles = Vec::with_capacity(m);
    for k in 0..m {
        let theta = 2.0 * PI * k as f64 / m as f64;
        let rotated = a.scale_complex(Complex64::from_polar(1.0, theta));
        let spec = hermitian_eig(&rotated.hermitian_part())?;
        let top = spec.eigenvectors.column(spec.dim() - 1).into_owned();
        points.push(a.quadratic_form(&top));
        angles.push(theta);
    }
    Ok(RangeBoundary {
        points,
        angles,
        dim: a.dim(),
    })
}

/// `(contained, margin)` where margin is the smallest angular slack
/// `alpha - |arg z|` over boundary points; the vertex is always admissible.
pub fn contained_in_sector(b: &RangeBoundary, s: SectorSpec) -> (bool, f64) {
    let margin = b
        .points
        .iter()
        .filter(|z| z.norm() > VERTEX_TOL)
        .map(|z| s.alpha - z.arg().abs())
        .fold(s.alpha, f64::min);
    (margin >= -MEMBERSHIP_TOL, margin)
}

/// Pointwise membership in `D_alpha`, the union of the disk `|z| <= sin alpha`
/// and the truncated cone `|arg(1 - z)| <= alpha, |z - 1| <= cos alpha`.
pub fn in_qs_domain(z: Complex64, s: SectorSpec, tol: f64) -> bool {
    let (sin, cos) = s.alpha.sin_cos();
    let in_disk = z.norm() <= sin + tol;
    let w = Complex64::new(1.0, 0.0) - z;
    let in_cone = (w.norm() <= VERTEX_TOL || w.arg().abs() <= s.alpha + tol) && w.norm() <= cos + tol;
    in_disk || in_cone
}

fn dist_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    (z - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Signed distance to the boundary of `D_alpha`: positive inside, negative
/// outside.
///
/// `D_alpha` is the convex hull of the disk of radius `sin alpha` and the
/// point 1; its boundary is two tangent segments from 1 to
/// `T = sin(alpha) (sin alpha +/- i cos alpha)` and the circular arc
/// `|arg z| >= pi/2 - alpha`.
pub fn qs_domain_signed_distance(z: Complex64, s: SectorSpec) -> f64 {
    let (sin, cos) = s.alpha.sin_cos();
    let one = Complex64::new(1.0, 0.0);
    let t_up = Complex64::new(sin * sin, sin * cos);
    let t_down = t_up.conj();
    let arc = if z.arg().abs() >= FRAC_PI_2 - s.alpha {
        (z.norm() - sin).abs()
    } else {
        (z - t_up).norm().min((z - t_down).norm())
    };
    let d = dist_to_segment(z, one, t_up)
        .min(dist_to_segment(z, one, t_down))
        .min(arc);
    if in_qs_domain(z, s, 0.0) {
        d
    } else {
        -d
    }
}

/// `(contained, margin)` for `W subset D_alpha`; margin is the smallest
/// signed distance to the domain boundary.
pub fn contained_in_qs_domain(b: &RangeBoundary, s: SectorSpec) -> (bool, f64) {
    let margin = b
        .points
        .iter()
        .map(|&z| qs_domain_signed_distance(z, s))
        .fold(f64::INFINITY, f64::min);
    (margin >= -MEMBERSHIP_TOL, margin)
}

/// Euclidean distance from `zeta` to `-S_alpha = { |arg(-z)| <= alpha }`.
pub fn dist_to_neg_sector(zeta: Complex64, s: SectorSpec) -> Result<f64> {
    let r = zeta.norm();
    if r == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let phi = zeta.arg().abs();
    let gap = PI - s.alpha - phi;
    Ok(if gap <= 0.0 {
        0.0
    } else if gap >= FRAC_PI_2 {
        r
    } else {
        r * gap.sin()
    })
}

/// Smallest `alpha` with every boundary point in the closed sector, or `None`
/// when the range reaches the left half-plane.
pub fn min_semi_angle(b: &RangeBoundary) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for z in &b.points {
        if z.norm() <= VERTEX_TOL {
            continue;
        }
        if z.re < 0.0 {
            return None;
        }
        worst = worst.max(z.arg().abs());
    }
    (worst < FRAC_PI_2).then_some(worst)
}

/// Smallest `alpha` (to ~1e-12) with the boundary inside `D_alpha`, by
/// bisection; `None` if no `alpha < pi/2` works.
pub fn min_qs_angle(b: &RangeBoundary) -> Option<f64> {
    let fits = |alpha: f64| contained_in_qs_domain(b, SectorSpec { alpha }).0;
    let mut hi = FRAC_PI_2 - 1e-9;
    if !fits(hi) {
        return None;
    }
    if fits(0.0) {
        return Some(0.0);
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Closed polygon tracing the boundary of `D_alpha`, for plotting.
pub fn qs_domain_outline(s: SectorSpec, arc_points: usize) -> Vec<Complex64> {
    let sin = s.alpha.sin();
    let start = FRAC_PI_2 - s.alpha;
    let sweep = 2.0 * PI - 2.0 * start;
    let mut out = vec![Complex64::new(1.0, 0.0)];
    let n = arc_points.max(2);
    for k in 0..=n {
        let theta = start + sweep * k as f64 / n as f64;
        out.push(Complex64::from_polar(sin, theta));
    }
    out.push(Complex64::new(1.0, 0.0));
    out
}

/// Verdict emitted by the `range` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeVerdict {
    pub alpha: f64,
    pub points: usize,
    pub contained_in_sector: bool,
    pub contained_in_qs_domain: bool,
    pub margins: RangeMargins,
    pub min_semi_angle: Option<f64>,
    pub min_qs_angle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeMargins {
    pub sector: f64,
    pub qs_domain: f64,
}

pub fn range_verdict(b: &RangeBoundary, s: SectorSpec) -> RangeVerdict {
    let (in_sector, sector) = contained_in_sector(b, s);
    let (in_qs, qs_domain) = contained_in_qs_domain(b, s);
    RangeVerdict {
        alpha: s.alpha,
        points: b.points.len(),
        contained_in_sector: in_sector,
        contained_in_qs_domain: in_qs,
        margins: RangeMargins { sector, qs_domain },
        min_semi_angle: min_semi_angle(b),
        min_qs_angle: min_qs_angle(b),
    }
}
