//! The family with `b = lambda + i eta`: terminating Gauss sums, the sequences it induces,
//! closed forms of its polynomials and the identities linking them.

use crate::poly::{rel_diff, ComplexPoly};
use crate::selfinv::DiskSeq;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Rising factorial `(x)_n`.
pub fn pochhammer(x: C64, n: usize) -> C64 {
    (0..n).fold(re(1.0), |acc, k| acc * (x + k as f64))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients `(-n)_k (bb)_k / ((cc)_k k!)` of `F(-n, bb; cc; x)`.
fn hyp_terms(n: usize, bb: C64, cc: C64) -> Result<Vec<C64>> {
    let mut out = vec![re(1.0)];
    let mut t = re(1.0);
    for k in 0..n {
        let den = (cc + k as f64) * (k as f64 + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::InvalidParameters(format!("pole at c + {k} = 0")));
        }
        t = t * (k as f64 - n as f64) * (bb + k as f64) / den;
        out.push(t);
    }
    Ok(out)
}

/// `F(-n, bb; cc; x)` as a finite sum.
pub fn hyp2f1_terminating(n: usize, bb: C64, cc: C64, x: C64) -> Result<C64> {
    Ok(ComplexPoly::new(hyp_terms(n, bb, cc)?).eval(x))
}

/// `F(-n, bb; cc; x)` as a polynomial in `x`.
pub fn hyp2f1_poly(n: usize, bb: C64, cc: C64) -> Result<ComplexPoly> {
    Ok(ComplexPoly::new(hyp_terms(n, bb, cc)?))
}

/// `F(-n, bb; cc; 1 - z)` as a polynomial in `z`.
pub fn hyp2f1_poly_1mz(n: usize, bb: C64, cc: C64) -> Result<ComplexPoly> {
    let t = hyp_terms(n, bb, cc)?;
    let mut out = vec![re(0.0); n + 1];
    for (k, tk) in t.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate().take(k + 1) {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *o += tk * binomial(k, j) * sign;
        }
    }
    Ok(ComplexPoly::new(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperFamily {
    pub lam: f64,
    pub eta: f64,
}

impl HyperFamily {
    pub fn new(lam: f64, eta: f64) -> Result<Self> {
        if !(lam > -0.5) || !eta.is_finite() {
            return Err(Error::InvalidParameters(format!("need lambda > -1/2, got {lam}")));
        }
        Ok(HyperFamily { lam, eta })
    }

    pub fn b(&self) -> C64 {
        C64::new(self.lam, self.eta)
    }

    /// `beta_n = (eta^2 - lambda(lambda+n+1) - i(2 lambda+n+1) eta) / ((lambda+n+1)^2 + eta^2)`.
    pub fn beta(&self, n: usize) -> C64 {
        let (l, e, m) = (self.lam, self.eta, n as f64);
        let den = (l + m + 1.0).powi(2) + e * e;
        C64::new(e * e - l * (l + m + 1.0), -(2.0 * l + m + 1.0) * e) / den
    }

    /// `c_n = eta/(lambda + n)`.
    pub fn c(&self, n: usize) -> f64 {
        self.eta / (self.lam + n as f64)
    }

    /// `d_{n+1} = n(2 lambda + n + 1) / (4 (lambda + n)(lambda + n + 1))`; argument is `n + 1`.
    pub fn d(&self, n_plus_1: usize) -> f64 {
        let n = n_plus_1 as f64 - 1.0;
        0.25 * n * (2.0 * self.lam + n + 1.0) / ((self.lam + n) * (self.lam + n + 1.0))
    }

    /// `rho_hat_n = -(b+1)_n/(conj b + 1)_n`.
    pub fn rho_hat(&self, n: usize) -> C64 {
        let b = self.b();
        -pochhammer(b + 1.0, n) / pochhammer(b.conj() + 1.0, n)
    }

    /// From `rho_hat_n rho_tilde_n = conj b (b+1) / ((conj b + n)(b + n + 1))`.
    pub fn rho_tilde(&self, n: usize) -> C64 {
        let b = self.b();
        let prod = b.conj() * (b + 1.0) / ((b.conj() + n as f64) * (b + n as f64 + 1.0));
        prod / self.rho_hat(n)
    }

    /// Unnormalized weight `e^{(pi - theta) eta} |sin(theta/2)|^{2 lambda}`.
    pub fn weight(&self, theta: f64) -> f64 {
        ((PI - theta) * self.eta).exp() * (theta / 2.0).sin().abs().powf(2.0 * self.lam)
    }

    pub fn disk_seq(&self, n_max: usize) -> Result<DiskSeq> {
        DiskSeq::new((0..=n_max).map(|n| self.beta(n)).collect())
    }
}

/// Indexed sequences for `n = 0..=n_max`. `c[0]`, `d[0]` and `d[1]` are unused (zero).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySequences {
    pub beta: Vec<C64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub rho_hat: Vec<C64>,
    pub rho_tilde: Vec<C64>,
}

pub fn family_sequences(fam: &HyperFamily, n_max: usize) -> Result<FamilySequences> {
    let beta: Vec<C64> = (0..=n_max).map(|n| fam.beta(n)).collect();
    if let Some(k) = beta.iter().position(|b| b.norm() >= 1.0) {
        return Err(Error::InvalidBeta(k));
    }
    let c = (0..=n_max).map(|n| if n == 0 { 0.0 } else { fam.c(n) }).collect();
    let d = (0..=n_max).map(|n| if n < 2 { 0.0 } else { fam.d(n) }).collect();
    let rho_hat = (0..=n_max).map(|n| fam.rho_hat(n)).collect();
    let rho_tilde = (0..=n_max).map(|n| fam.rho_tilde(n)).collect();
    Ok(FamilySequences { beta, c, d, rho_hat, rho_tilde })
}

/// Closed forms at degree `n` (polynomials in `z`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub n: usize,
    /// `(2 lambda+2)_n/(lambda+1)_n F(-n, b+1; b+conj b+2; 1-z)`.
    pub r: ComplexPoly,
    /// `(2 lambda+2)_n/(conj b+1)_n F(-n, b+1; b+conj b+2; 1-z)`, normalized at 0.
    pub u_hat: ComplexPoly,
    /// `(conj b+1)_n/(b)_n phi*_n`, monic.
    pub u_roman: ComplexPoly,
    /// `U'_{n+1}/(n+1) = (2 lambda+2)_n/(b+1)_n F(-n, b+1; b+conj b+2; 1-z)`, monic.
    pub u_prime: ComplexPoly,
    /// `(2 lambda+1)_n/(b+1)_n F(-n, b+1; b+conj b+1; 1-z)`.
    pub phi: ComplexPoly,
    /// `(2 lambda+1)_n/(conj b+1)_n F(-n, b; b+conj b+1; 1-z)`.
    pub phi_star: ComplexPoly,
    /// `Y'_{n+1}/(n+1) = (2 lambda+2)_n/(b+2)_n F(-n, b+2; b+conj b+2; 1-z)`.
    pub y_prime: ComplexPoly,
}

pub fn closed_forms(fam: &HyperFamily, n: usize) -> Result<ClosedForms> {
    let b = fam.b();
    let bc = b.conj();
    let l = fam.lam;
    let f1 = hyp2f1_poly_1mz(n, b + 1.0, b + bc + 2.0)?;
    let p22 = pochhammer(re(2.0 * l + 2.0), n);
    let p21 = pochhammer(re(2.0 * l + 1.0), n);
    let phi = hyp2f1_poly_1mz(n, b + 1.0, b + bc + 1.0)?.scale(p21 / pochhammer(b + 1.0, n));
    let phi_star = hyp2f1_poly_1mz(n, b, b + bc + 1.0)?.scale(p21 / pochhammer(bc + 1.0, n));
    let pb = pochhammer(b, n);
    if pb.norm() == 0.0 {
        return Err(Error::InvalidParameters("(b)_n vanishes".into()));
    }
    Ok(ClosedForms {
        n,
        r: f1.scale(p22 / pochhammer(re(l + 1.0), n)),
        u_hat: f1.scale(p22 / pochhammer(bc + 1.0, n)),
        u_roman: phi_star.scale(pochhammer(bc + 1.0, n) / pb),
        u_prime: f1.scale(p22 / pochhammer(b + 1.0, n)),
        phi,
        phi_star,
        y_prime: hyp2f1_poly_1mz(n, b + 2.0, b + bc + 2.0)?.scale(p22 / pochhammer(b + 2.0, n)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `F(-n,B;C;x) = (C-B)_n/(C)_n F(-n,B;B-C-n+1;1-x)`.
    pub transformation: f64,
    /// `F(a,B;C;x) = F(a+1,B;C+1;x) - B(C-a)/(C(C+1)) x F(a+1,B+1;C+2;x)` at `a = -n`.
    pub contiguous: f64,
    /// `(phi*_{n+1})'/(n+1) = b/(conj b+n+1) U_hat_n`.
    pub derivative: f64,
    /// `phi*_n` equals the reversed conjugate of `phi_n`.
    pub star: f64,
    /// `Y'_{n+1}/(n+1) = phi'_{n+1}/(n+1)`.
    pub y_prime_phi: f64,
    /// `z Y'_{n+1}/(n+1) = U'_{n+2}/(n+2) - (rho_hat_n/rho_hat_{n+1}) U'_{n+1}/(n+1)` with `U'` from `u_roman`.
    pub z_y_assembly: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        [self.transformation, self.contiguous, self.derivative, self.star, self.y_prime_phi, self.z_y_assembly]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Relative residuals over `n = 0..=n_max` and the given sample points; the Gauss sums are
/// checked with the family parameter pairs `(b+1, b+conj b+2)`, `(b, b+conj b+1)` and `(b+2, b+conj b+2)`.
pub fn identity_checks(fam: &HyperFamily, n_max: usize, points: &[C64]) -> Result<IdentityReport> {
    let b = fam.b();
    let bc = b.conj();
    let pairs = [(b + 1.0, b + bc + 2.0), (b, b + bc + 1.0), (b + 2.0, b + bc + 2.0)];
    let rel = |x: C64, y: C64| (x - y).norm() / x.norm().max(y.norm()).max(1.0);
    let mut rep = IdentityReport {
        transformation: 0.0,
        contiguous: 0.0,
        derivative: 0.0,
        star: 0.0,
        y_prime_phi: 0.0,
        z_y_assembly: 0.0,
    };
    for n in 0..=n_max {
        let nf = n as f64;
        for &(bb, cc) in &pairs {
            for &x in points {
                let lhs = hyp2f1_terminating(n, bb, cc, x)?;
                let t = pochhammer(cc - bb, n) / pochhammer(cc, n)
                    * hyp2f1_terminating(n, bb, bb - cc - nf + 1.0, 1.0 - x)?;
                rep.transformation = rep.transformation.max(rel(lhs, t));
                if n > 0 {
                    let c2 = hyp2f1_terminating(n - 1, bb, cc + 1.0, x)?
                        - bb * (cc + nf) / (cc * (cc + 1.0)) * x * hyp2f1_terminating(n - 1, bb + 1.0, cc + 2.0, x)?;
                    rep.contiguous = rep.contiguous.max(rel(lhs, c2));
                }
            }
        }
        let cf = closed_forms(fam, n)?;
        let cf1 = closed_forms(fam, n + 1)?;
        let cf2 = closed_forms(fam, n + 2)?;
        let np1 = re(nf + 1.0);
        let dphi = cf1.phi_star.derivative().scale(re(1.0) / np1);
        rep.derivative = rep.derivative.max(rel_diff(&dphi, &cf.u_hat.scale(b / (bc + nf + 1.0))));
        rep.star = rep.star.max(rel_diff(&cf.phi_star, &cf.phi.star(n)?));
        let yp = cf1.phi.derivative().scale(re(1.0) / np1);
        rep.y_prime_phi = rep.y_prime_phi.max(rel_diff(&cf.y_prime, &yp));
        let v2 = cf2.u_roman.derivative().scale(re(1.0) / (nf + 2.0));
        let v1 = cf1.u_roman.derivative().scale(re(1.0) / np1);
        let lhs = cf.y_prime.shift(1);
        let rhs = v2.sub(&v1.scale(fam.rho_hat(n) / fam.rho_hat(n + 1)));
        rep.z_y_assembly = rep.z_y_assembly.max(rel_diff(&lhs, &rhs));
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub grid: usize,
    /// Gram matrix of `phi_0..phi_{n_max}` (row-major).
    pub gram: Vec<Vec<C64>>,
    /// `max |G_ij| / sqrt(|G_ii G_jj|)` over `i != j`.
    pub max_offdiag_rel: f64,
    /// Largest relative change of the Gram matrix against half the grid.
    pub refinement_change: f64,
}

fn gram(fam: &HyperFamily, polys: &[ComplexPoly], m: usize) -> Vec<Vec<C64>> {
    let k = polys.len();
    let mut g = vec![vec![re(0.0); k]; k];
    let h = 2.0 * PI / m as f64;
    for s in 0..m {
        let th = s as f64 * h;
        let w = fam.weight(th);
        // the node at theta = 0 is singular for lambda < 0
        if w == 0.0 || !w.is_finite() {
            continue;
        }
        let z = C64::from_polar(1.0, th);
        let vals: Vec<C64> = polys.iter().map(|p| p.eval(z)).collect();
        for i in 0..k {
            for j in 0..k {
                g[i][j] += vals[i] * vals[j].conj() * w * h;
            }
        }
    }
    g
}

/// Trapezoid rule on `theta_k = 2 pi k / grid` for `int phi_i conj(phi_j) w dtheta`; the grid
/// is compared against half its size and `QuadratureWarning` is raised when they differ by
/// more than 1e-5 relative.
pub fn weight_orthogonality(fam: &HyperFamily, n_max: usize, grid: usize) -> Result<WeightReport> {
    if grid < 4 {
        return Err(Error::InvalidInput("grid too small".into()));
    }
    let polys: Vec<ComplexPoly> = (0..=n_max).map(|n| Ok(closed_forms(fam, n)?.phi)).collect::<Result<_>>()?;
    let g = gram(fam, &polys, grid);
    let coarse = gram(fam, &polys, grid / 2);
    let mut offdiag: f64 = 0.0;
    let mut change: f64 = 0.0;
    for i in 0..=n_max {
        for j in 0..=n_max {
            let s = (g[i][i].norm() * g[j][j].norm()).sqrt();
            if i != j {
                offdiag = offdiag.max(g[i][j].norm() / s);
            }
            change = change.max((g[i][j] - coarse[i][j]).norm() / s);
        }
    }
    if !(change <= 1e-5) {
        return Err(Error::QuadratureWarning(change));
    }
    Ok(WeightReport { grid, gram: g, max_offdiag_rel: offdiag, refinement_change: change })
}
