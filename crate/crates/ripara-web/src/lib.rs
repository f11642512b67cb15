//! Browser demo: zeros of R_n and Y'_{n+1} on the unit circle and the weight function
//! of the hypergeometric family. Complex results are flattened as `[re0, im0, re1, im1, ..]`.

use ripara::hyper::{closed_forms, HyperFamily};
use ripara::poly::roots;
use ripara::selfinv::build_rn;
use ripara::ComplexPoly;
use wasm_bindgen::prelude::*;

const MAX_DEGREE: usize = 30;

fn family(lambda: f64, eta: f64, n: usize) -> Result<HyperFamily, String> {
    if !(1..=MAX_DEGREE).contains(&n) {
        return Err(format!("degree must be in 1..={MAX_DEGREE}"));
    }
    HyperFamily::new(lambda, eta).map_err(|e| e.to_string())
}

fn flat_roots(p: &ComplexPoly) -> Result<Vec<f64>, String> {
    let r = roots(p).map_err(|e| e.to_string())?;
    Ok(r.roots.iter().flat_map(|z| [z.re, z.im]).collect())
}

pub fn rn_zeros(lambda: f64, eta: f64, n: usize) -> Result<Vec<f64>, String> {
    let fam = family(lambda, eta, n)?;
    let disk = fam.disk_seq(n + 1).map_err(|e| e.to_string())?;
    let rn = build_rn(&disk, n).map_err(|e| e.to_string())?;
    flat_roots(&rn.r[n])
}

/// Zeros of `Y'_{n+1}`, which leave the circle once `eta != 0`.
pub fn y_prime_zeros(lambda: f64, eta: f64, n: usize) -> Result<Vec<f64>, String> {
    let fam = family(lambda, eta, n)?;
    let cf = closed_forms(&fam, n).map_err(|e| e.to_string())?;
    flat_roots(&cf.y_prime)
}

/// Weight on `samples` equally spaced angles in `[0, 2 pi)`; the singular value at
/// `theta = 0` is reported as NaN.
pub fn weight_samples(lambda: f64, eta: f64, samples: usize) -> Result<Vec<f64>, String> {
    let fam = HyperFamily::new(lambda, eta).map_err(|e| e.to_string())?;
    let h = std::f64::consts::TAU / samples.max(1) as f64;
    Ok((0..samples)
        .map(|k| {
            let w = fam.weight(k as f64 * h);
            if w.is_finite() {
                w
            } else {
                f64::NAN
            }
        })
        .collect())
}

#[wasm_bindgen]
pub fn rn_roots(lambda: f64, eta: f64, n: usize) -> Result<Vec<f64>, JsError> {
    rn_zeros(lambda, eta, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn y_prime_roots(lambda: f64, eta: f64, n: usize) -> Result<Vec<f64>, JsError> {
    y_prime_zeros(lambda, eta, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn weight(lambda: f64, eta: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    weight_samples(lambda, eta, samples).map_err(|e| JsError::new(&e))
}
