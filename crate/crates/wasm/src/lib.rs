//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers or a matrix JSON string and returns a
//! JSON string; errors come back as JS exceptions carrying the message.
//! Seeds are `u32` on the JS side to stay clear of `BigInt`.

use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use chernoff_core::approx::{dyadic, error_curve, TimeSpec};
use chernoff_core::bounds::check_spectral_bounds;
use chernoff_core::family::{make_exp_family, make_resolvent_family, make_symmetrized_family, make_trotter_family};
use chernoff_core::random::MatrixRng;
use chernoff_core::range::{qs_domain_outline, range_boundary, range_verdict, RangeVerdict};
use chernoff_core::{ChernoffFamily, KatoFunction, Operator, Regularity, SectorSpec};

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct RangeView {
    boundary: Vec<[f64; 2]>,
    outline: Vec<[f64; 2]>,
    verdict: RangeVerdict,
}

/// Numerical range of the matrix in `matrix_json` with its sector/lens verdict
/// and the lens outline for `alpha`.
pub fn range_view(matrix_json: &str, alpha: f64, points: usize) -> Result<String, String> {
    let a: Operator = serde_json::from_str(matrix_json).map_err(|e| e.to_string())?;
    let sector = SectorSpec::new(alpha).map_err(|e| e.to_string())?;
    let b = range_boundary(&a, points).map_err(|e| e.to_string())?;
    let view = RangeView {
        boundary: b.points.iter().map(pair).collect(),
        outline: qs_domain_outline(sector, 128).iter().map(pair).collect(),
        verdict: range_verdict(&b, sector),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// A random matrix as interchange JSON: `psd`, `sectorial` (semi-angle
/// `alpha`), `normal` or `general`.
pub fn random_matrix(kind: &str, d: usize, seed: u64, alpha: f64) -> Result<String, String> {
    let mut rng = MatrixRng::new(seed);
    let a = match kind {
        "psd" => rng.psd(d, 1.0),
        "sectorial" => {
            SectorSpec::new(alpha).map_err(|e| e.to_string())?;
            rng.sectorial(d, alpha, 1.0)
        }
        "normal" => rng.normal(d),
        "general" => rng.general(d),
        other => return Err(format!("unknown matrix kind `{other}`")),
    };
    serde_json::to_string(&a).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurveView {
    n: Vec<u64>,
    error: Vec<f64>,
    rho: Option<f64>,
    c: Option<f64>,
}

fn demo_family(kind: &str, d: usize, seed: u64, radius: f64) -> Result<ChernoffFamily, String> {
    let mut rng = MatrixRng::new(seed);
    let err = |e: chernoff_core::Error| e.to_string();
    match kind {
        "resolvent" => make_resolvent_family(rng.psd(d, radius), Regularity::SelfAdjoint).map_err(err),
        "exponential" => make_exp_family(rng.psd(d, radius), Regularity::SelfAdjoint).map_err(err),
        "trotter" => make_trotter_family(rng.psd(d, radius), rng.psd(d, radius)).map_err(err),
        "symmetrized-kato" => {
            let f = KatoFunction::builtin("resolvent-1").map_err(err)?;
            make_symmetrized_family(f.clone(), f, rng.psd(d, radius), rng.psd(d, radius)).map_err(err)
        }
        other => Err(format!("unknown family `{other}`")),
    }
}

/// `||F(t/n)^n - e^{-tH}||` over `n = 1, 2, 4, ..., 2^max_log2` for a
/// random family, with the fitted `C n^{-rho}`.
pub fn curve_view(kind: &str, d: usize, seed: u64, radius: f64, t: f64, max_log2: u32) -> Result<String, String> {
    let fam = demo_family(kind, d, seed, radius)?;
    let curve = error_curve(&fam, TimeSpec::At(t), &dyadic(0, max_log2.min(12))).map_err(|e| e.to_string())?;
    let view = CurveView {
        n: curve.samples.iter().map(|s| s.n).collect(),
        error: curve.errors(),
        rho: curve.fitted.map(|f| f.rho),
        c: curve.fitted.map(|f| f.c),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct DefectView {
    n: Vec<u64>,
    defect: Vec<f64>,
    bound: Vec<f64>,
}

/// `||F^n - e^{-n(I - F)}||` against `1/n` for a random Hermitian contraction.
pub fn defect_view(d: usize, seed: u64, n_max: u64) -> Result<String, String> {
    let f = MatrixRng::new(seed).hermitian_contraction(d);
    let ns: Vec<u64> = (1..=n_max.clamp(1, 512)).collect();
    let reports = check_spectral_bounds(&f, &ns).map_err(|e| e.to_string())?;
    let view = DefectView {
        n: ns,
        defect: reports.iter().map(|r| r.lhs).collect(),
        bound: reports.iter().map(|r| r.rhs).collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = rangeView)]
pub fn range_view_js(matrix_json: &str, alpha: f64, points: usize) -> Result<String, JsValue> {
    js(range_view(matrix_json, alpha, points))
}

#[wasm_bindgen(js_name = randomMatrix)]
pub fn random_matrix_js(kind: &str, d: usize, seed: u32, alpha: f64) -> Result<String, JsValue> {
    js(random_matrix(kind, d, seed.into(), alpha))
}

#[wasm_bindgen(js_name = curveView)]
pub fn curve_view_js(kind: &str, d: usize, seed: u32, radius: f64, t: f64, max_log2: u32) -> Result<String, JsValue> {
    js(curve_view(kind, d, seed.into(), radius, t, max_log2))
}

#[wasm_bindgen(js_name = defectView)]
pub fn defect_view_js(d: usize, seed: u32, n_max: u32) -> Result<String, JsValue> {
    js(defect_view(d, seed.into(), n_max.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn jordan_range_view() {
        let v: Value = serde_json::from_str(&range_view(r#"{"dim":2,"re":[[0,1],[0,0]]}"#, 1.0471975511965976, 90).unwrap()).unwrap();
        assert_eq!(v["verdict"]["contained_in_qs_domain"], true);
        assert_eq!(v["boundary"].as_array().unwrap().len(), 90);
        assert!(range_view("{}", 0.5, 90).is_err());
        assert!(range_view(r#"{"dim":1,"re":[[1]]}"#, 2.0, 90).is_err());
    }

    #[test]
    fn random_matrix_roundtrips_into_range() {
        let m = random_matrix("sectorial", 5, 3, 0.6).unwrap();
        let v: Value = serde_json::from_str(&range_view(&m, 0.6, 120).unwrap()).unwrap();
        assert_eq!(v["verdict"]["contained_in_sector"], true);
        assert!(random_matrix("weird", 2, 0, 0.1).is_err());
    }

    #[test]
    fn curves_and_defects() {
        let v: Value = serde_json::from_str(&curve_view("resolvent", 4, 1, 5.0, 1.0, 8).unwrap()).unwrap();
        assert_eq!(v["n"].as_array().unwrap().len(), 9);
        assert!((v["rho"].as_f64().unwrap() - 1.0).abs() < 0.2);
        let v: Value = serde_json::from_str(&defect_view(6, 2, 64).unwrap()).unwrap();
        let d = v["defect"].as_array().unwrap();
        let b = v["bound"].as_array().unwrap();
        assert!(d.iter().zip(b).all(|(d, b)| d.as_f64().unwrap() <= b.as_f64().unwrap() + 1e-10));
        assert!(curve_view("nope", 2, 0, 1.0, 1.0, 3).is_err());
    }
}
