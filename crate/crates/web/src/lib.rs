//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function of the same name in
//! [`native`], which is what the tests call.

use wasm_bindgen::prelude::*;

pub mod native {
    use ellr::{
        run_cell, BaxterBelavin, Cell, Elliptic, IdentityName, ModularTau, RMatrixFamily, RMatrixParams, SeriesConfig,
    };
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn elliptic(tau_re: f64, tau_im: f64) -> Result<(ModularTau, Elliptic), String> {
        let tau = ModularTau::new(c(tau_re, tau_im)).map_err(|e| e.to_string())?;
        let ell = Elliptic::new(tau, SeriesConfig::default()).map_err(|e| e.to_string())?;
        Ok((tau, ell))
    }

    /// `[ϑ(z), φ(z, u), ℘(z)]` as interleaved real and imaginary parts.
    pub fn kronecker(z_re: f64, z_im: f64, u_re: f64, u_im: f64, tau_re: f64, tau_im: f64) -> Result<Vec<f64>, String> {
        let (_, ell) = elliptic(tau_re, tau_im)?;
        let (z, u) = (c(z_re, z_im), c(u_re, u_im));
        let theta = ell.theta(z).map_err(|e| e.to_string())?;
        let phi = ell.kronecker_phi(z, u).map_err(|e| e.to_string())?;
        let wp = ell.weierstrass_p(z).map_err(|e| e.to_string())?;
        Ok(vec![theta.re, theta.im, phi.re, phi.im, wp.re, wp.im])
    }

    /// The `M² × M²` matrix `R^ħ(z)`, row major, interleaved real and
    /// imaginary parts.
    #[allow(clippy::too_many_arguments)]
    pub fn r_matrix(
        m: usize,
        z_re: f64,
        z_im: f64,
        hbar_re: f64,
        hbar_im: f64,
        tau_re: f64,
        tau_im: f64,
    ) -> Result<Vec<f64>, String> {
        if m == 0 || m > 6 {
            return Err(format!("M = {m} must be in 1..=6"));
        }
        let (tau, _) = elliptic(tau_re, tau_im)?;
        let params =
            RMatrixParams::new(m, c(hbar_re, hbar_im), tau, SeriesConfig::default()).map_err(|e| e.to_string())?;
        let bb = BaxterBelavin::new(params).map_err(|e| e.to_string())?;
        let r = bb.r(c(z_re, z_im)).map_err(|e| e.to_string())?;
        let mat = r.matrix();
        let mut out = Vec::with_capacity(2 * mat.len());
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                out.push(mat[(i, j)].re);
                out.push(mat[(i, j)].im);
            }
        }
        Ok(out)
    }

    /// One seeded check, returned as the JSON of its report.
    pub fn check(identity: &str, m: usize, n: usize, k: usize, seed: u64) -> Result<String, String> {
        let id: IdentityName = identity.parse().map_err(|e: ellr::Error| e.to_string())?;
        if m == 0 || n == 0 {
            return Err("M and N must be positive".into());
        }
        let mut cell = Cell::new(id, m, n, k).with_seed(seed, 0);
        cell.dimension_cap = 1024;
        let report = run_cell(&cell).map_err(|e| e.to_string())?;
        serde_json::to_string(&report).map_err(|e| e.to_string())
    }

    pub fn identity_names() -> Vec<String> {
        IdentityName::ALL.iter().map(|i| i.as_str().to_string()).collect()
    }
}

fn js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub fn kronecker(z_re: f64, z_im: f64, u_re: f64, u_im: f64, tau_re: f64, tau_im: f64) -> Result<Vec<f64>, JsValue> {
    native::kronecker(z_re, z_im, u_re, u_im, tau_re, tau_im).map_err(js)
}

#[wasm_bindgen]
pub fn r_matrix(
    m: usize,
    z_re: f64,
    z_im: f64,
    hbar_re: f64,
    hbar_im: f64,
    tau_re: f64,
    tau_im: f64,
) -> Result<Vec<f64>, JsValue> {
    native::r_matrix(m, z_re, z_im, hbar_re, hbar_im, tau_re, tau_im).map_err(js)
}

#[wasm_bindgen]
pub fn check(identity: &str, m: usize, n: usize, k: usize, seed: u64) -> Result<String, JsValue> {
    native::check(identity, m, n, k, seed).map_err(js)
}

#[wasm_bindgen]
pub fn identity_names() -> Vec<String> {
    native::identity_names()
}
