//! Sequences in the unit disk, the reflection parameters they induce, the recurrence for
//! `R_n` with zeros on the unit circle, its real-line transform `G_n`, and self-inversive
//! tests for R_I recurrences.

use crate::poly::{is_self_inversive, ComplexPoly};
use crate::recurrence::{ri_again_decision, OmegaSeq, RISequence, RiDecision};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `beta_0, beta_1, ..` strictly inside the unit disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSeq {
    pub beta: Vec<C64>,
}

impl DiskSeq {
    pub fn new(beta: Vec<C64>) -> Result<Self> {
        for (k, b) in beta.iter().enumerate() {
            if !(b.norm() < 1.0 - 1e-12) {
                return Err(Error::InvalidBeta(k));
            }
        }
        Ok(DiskSeq { beta })
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    fn b(&self, k: usize) -> Result<C64> {
        self.beta
            .get(k)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("beta_{k} not provided")))
    }

    /// `c_n = -Im beta_{n-1} / (1 - Re beta_{n-1})` for `n >= 1`.
    pub fn c(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidInput("c_n starts at n = 1".into()));
        }
        let b = self.b(n - 1)?;
        Ok(-b.im / (1.0 - b.re))
    }

    /// `d_{n+1} = (1 - |beta_{n-1}|^2)/(2(1 - Re beta_{n-1})) * |1 - beta_n|^2/(2(1 - Re beta_n))`, `n >= 1`.
    pub fn d(&self, n_plus_1: usize) -> Result<f64> {
        let n = n_plus_1.checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidInput("d_{n+1} starts at n = 1".into())
        })?;
        let (bp, bn) = (self.b(n - 1)?, self.b(n)?);
        Ok((1.0 - bp.norm_sqr()) / (2.0 * (1.0 - bp.re)) * (1.0 - bn).norm_sqr() / (2.0 * (1.0 - bn.re)))
    }

    /// Variant with `1 - Re beta_{n-1}` in the second denominator (kept for comparison).
    pub fn d_recap(&self, n_plus_1: usize) -> Result<f64> {
        let n = n_plus_1.checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidInput("d_{n+1} starts at n = 1".into())
        })?;
        let (bp, bn) = (self.b(n - 1)?, self.b(n)?);
        Ok((1.0 - bp.norm_sqr()) / (2.0 * (1.0 - bp.re)) * (1.0 - bn).norm_sqr() / (2.0 * (1.0 - bp.re)))
    }
}

/// `rho_hat_{n+1} = rho_hat_0 prod_{k<=n} (1 - beta_k)/(1 - conj beta_k)` and
/// `rho_tilde_{n+1} = (1/rho_hat_0) prod_{k<n} (1 - conj beta_k)/(1 - beta_k)
///   * ((1 - |beta_n|^2)/(1 - beta_n) conj beta_{n+1} - conj beta_n)`,
/// returned for indices `0..=n_max` with `rho_tilde_0 = rho_hat_0`. Needs `beta_0..=beta_{n_max}`.
pub fn rho_from_beta(beta: &DiskSeq, n_max: usize, rho_hat_0: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    if beta.len() < n_max + 1 {
        return Err(Error::InvalidInput(format!("need beta_0..beta_{n_max}")));
    }
    for (k, b) in beta.beta.iter().enumerate() {
        if (one() - b).norm() < 1e-14 || b.norm() >= 1.0 {
            return Err(Error::InvalidBeta(k));
        }
    }
    Ok(rho_products(&beta.beta, n_max, rho_hat_0))
}

/// The product formulas without the disk check; any `beta_k != 1` is accepted.
pub fn rho_products(beta: &[C64], n_max: usize, rho_hat_0: C64) -> (Vec<C64>, Vec<C64>) {
    let mut rh = vec![rho_hat_0];
    let mut rt = vec![rho_hat_0];
    let mut q = one();
    for n in 0..n_max {
        let b = beta[n];
        let bn1 = beta[n + 1];
        rh.push(rh[n] * (one() - b) / (one() - b.conj()));
        rt.push(q / rho_hat_0 * ((1.0 - b.norm_sqr()) / (one() - b) * bn1.conj() - b.conj()));
        q *= (one() - b.conj()) / (one() - b);
    }
    (rh, rt)
}

/// `R_n` and the recurrence data behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RnSequence {
    pub r: Vec<ComplexPoly>,
    /// `c[n]` is `c_n` for `n >= 1`; `c[0]` is unused (zero).
    pub c: Vec<f64>,
    /// `d[n]` is `d_n` for `n >= 2`; entries 0 and 1 are unused (zero).
    pub d: Vec<f64>,
}

/// `R_0 = 1`, `R_1 = (1 + i c_1) z + (1 - i c_1)`,
/// `R_{n+1} = [(1 + i c_{n+1}) z + (1 - i c_{n+1})] R_n - 4 d_{n+1} z R_{n-1}`.
pub fn build_rn(beta: &DiskSeq, n_max: usize) -> Result<RnSequence> {
    let mut c = vec![0.0];
    for n in 1..=n_max {
        c.push(beta.c(n)?);
    }
    let mut d = vec![0.0, 0.0];
    for n in 2..=n_max {
        d.push(beta.d(n)?);
    }
    let lin = |cn: f64| ComplexPoly::new(vec![C64::new(1.0, -cn), C64::new(1.0, cn)]);
    let mut r = vec![ComplexPoly::one()];
    if n_max >= 1 {
        r.push(lin(c[1]));
    }
    for n in 1..n_max {
        let next = lin(c[n + 1]).mul(&r[n]).sub(&r[n - 1].shift(1).scale(C64::new(4.0 * d[n + 1], 0.0)));
        r.push(next);
    }
    Ok(RnSequence { r, c, d })
}

/// `z` and `z^{1/2}` for `x` in `(-1, 1)`: `z^{1/2} = x + i sqrt(1 - x^2)`.
pub fn circle_point(x: f64) -> Result<(C64, C64)> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::OutOfDomain(x));
    }
    let s = C64::new(x, (1.0 - x * x).sqrt());
    Ok((s * s, s))
}

/// `G_n(x) = z^{-n/2} R_n(z) / 2^n`.
pub fn transform_g(rn: &RnSequence, n: usize, x: f64) -> Result<C64> {
    let (z, s) = circle_point(x)?;
    let r = rn.r.get(n).ok_or(Error::InvalidDegree { requested: n, actual: rn.r.len().saturating_sub(1) })?;
    Ok(r.eval(z) * s.powi(-(n as i32)) / 2f64.powi(n as i32))
}

/// Largest `|G_{n+1} - (x - sign c_{n+1} sqrt(1-x^2)) G_n + d_{n+1} G_{n-1}|` over `n`, with
/// `G_1 = x - sign c_1 sqrt(1-x^2)` included. `sign = 1` is the form the recurrence produces.
pub fn g_recurrence_residual(rn: &RnSequence, x: f64, sign: f64) -> Result<f64> {
    let s = (1.0 - x * x).sqrt();
    let top = rn.r.len() - 1;
    let g: Vec<C64> = (0..=top).map(|n| transform_g(rn, n, x)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    if top >= 1 {
        worst = (g[1] - (x - sign * rn.c[1] * s)).norm();
    }
    for n in 1..top {
        let res = g[n + 1] - (x - sign * rn.c[n + 1] * s) * g[n] + rn.d[n + 1] * g[n - 1];
        worst = worst.max(res.norm());
    }
    Ok(worst)
}

/// Constant `k_n` with `U'_{n+1}/(n+1) = k_n R_n`: `1/prod_{k<=n} (1 + i c_k)`.
pub fn u_prime_constant(c: &[f64], n: usize) -> C64 {
    (1..=n).fold(one(), |acc, k| acc / C64::new(1.0, c[k]))
}

/// `prod_{k<=n} (1 - i c_k)`, the constant as printed alongside the recurrence.
pub fn printed_u_prime_constant(c: &[f64], n: usize) -> C64 {
    (1..=n).fold(one(), |acc, k| acc * C64::new(1.0, -c[k]))
}

/// `beta_{n+1}` making `rho_tilde_{n+1} = rho_hat_{n+1}` given `beta_0..=beta_n` and
/// `rho_tilde_0 = rho_hat_0`:
/// `prod_{k=0}^{n} ((1 - conj beta_k)/(1 - beta_k))^2 (1 - beta_n)/(1 - |beta_n|^2) + beta_n (1 - conj beta_n)/(1 - |beta_n|^2)`.
pub fn selfinv_beta_step(beta: &[C64]) -> Result<C64> {
    let n = beta.len().checked_sub(1).ok_or_else(|| Error::InvalidInput("empty beta list".into()))?;
    let bn = beta[n];
    let den = 1.0 - bn.norm_sqr();
    if den <= 0.0 {
        return Err(Error::InvalidBeta(n));
    }
    let p = beta.iter().fold(one(), |acc, b| {
        let r = (one() - b.conj()) / (one() - b);
        acc * r * r
    });
    Ok(p * (one() - bn) / den + bn * (one() - bn.conj()) / den)
}

/// Generates `beta_0..=beta_{n_max}` with [`selfinv_beta_step`] after checking
/// `(1 - conj beta_0) rho_tilde_0 = (1 - beta_0) rho_tilde_1`.
pub fn beta_selfinv_recursion(beta0: C64, rho_tilde_0: C64, rho_tilde_1: C64, n_max: usize) -> Result<DiskSeq> {
    if beta0.norm() >= 1.0 {
        return Err(Error::InvalidBeta(0));
    }
    let lhs = (one() - beta0.conj()) * rho_tilde_0;
    let rhs = (one() - beta0) * rho_tilde_1;
    if (lhs - rhs).norm() > 1e-10 * lhs.norm().max(rhs.norm()).max(1.0) {
        return Err(Error::InvalidSeed("(1 - conj beta_0) rho_tilde_0 != (1 - beta_0) rho_tilde_1".into()));
    }
    let mut beta = vec![beta0];
    for n in 0..n_max {
        let next = selfinv_beta_step(&beta)?;
        if next.norm() >= 1.0 - 1e-12 {
            beta.push(next);
            return Err(Error::EscapedDisk { index: n + 1, partial: beta });
        }
        beta.push(next);
    }
    Ok(DiskSeq { beta })
}

/// Recurrence for the `Y'` family viewed as `X_n = B_n + omega_n B_{n-1}` with `B_n = V_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YPrimeRi {
    pub is_ri: bool,
    /// `f_n` from the reflection-parameter formula, `n = 2..=n_max` at index `n - 2`.
    pub f_formula: Vec<C64>,
    pub decision: RiDecision,
    /// `(shift, c)` with `W_{n+2} = (z + shift) W_{n+1} - c z W_n`, `n = 1..=n_max`.
    pub coefficients: Vec<(C64, C64)>,
}

/// `B_n = V_{n+1}` data: `beta_n = -rho_hat_n/rho_hat_{n+1}`,
/// `tau_n = (rho_hat_{n-1}/rho_hat_n)(1 - rho_hat_n rho_tilde_n)` (`tau_0 = 1`), `omega_n = -tau_n`.
pub fn u_prime_ri_data(rho_hat: &[C64], rho_tilde: &[C64], n_max: usize) -> Result<(RISequence, OmegaSeq)> {
    if rho_hat.len() < n_max + 2 || rho_tilde.len() < n_max + 2 {
        return Err(Error::InvalidInput(format!("need rho_0..rho_{}", n_max + 1)));
    }
    let mut beta = Vec::new();
    let mut tau = vec![one()];
    for n in 0..=n_max {
        if rho_hat[n + 1].norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("rho_hat_{} = 0", n + 1)));
        }
        beta.push(-rho_hat[n] / rho_hat[n + 1]);
        if n >= 1 {
            if rho_hat[n].norm() == 0.0 {
                return Err(Error::InvalidParameter(format!("rho_hat_{n} = 0")));
            }
            tau.push(rho_hat[n - 1] / rho_hat[n] * (one() - rho_hat[n] * rho_tilde[n]));
        }
    }
    let omega: Vec<C64> = tau.iter().map(|t| -t).collect();
    Ok((RISequence::new(beta, tau)?, OmegaSeq::explicit(one(), omega)))
}

/// `f_n = (rho_hat_{n-1} rho_tilde_{n+1})/(rho_hat_{n-2} rho_tilde_n)
///  (1 - rho_hat_n rho_tilde_n)/(1 - rho_hat_{n-1} rho_tilde_{n-1})`, `n >= 2`.
pub fn f_from_rho(rho_hat: &[C64], rho_tilde: &[C64], n: usize) -> Result<C64> {
    if n < 2 || n + 1 >= rho_tilde.len() {
        return Err(Error::InvalidInput(format!("f_{n} out of range")));
    }
    let num = rho_hat[n - 1] * rho_tilde[n + 1] * (one() - rho_hat[n] * rho_tilde[n]);
    let den = rho_hat[n - 2] * rho_tilde[n] * (one() - rho_hat[n - 1] * rho_tilde[n - 1]);
    if den.norm() == 0.0 {
        return Err(Error::InvalidParameter(format!("zero denominator in f_{n}")));
    }
    Ok(num / den)
}

/// Decides the R_I property of the `Y'` sequence from reflection parameters
/// (`rho[0] = -1` convention, indices up to `n_max + 2`).
pub fn y_prime_ri_check(rho_hat: &[C64], rho_tilde: &[C64], n_max: usize) -> Result<YPrimeRi> {
    let (seq, omega) = u_prime_ri_data(rho_hat, rho_tilde, n_max + 1)?;
    let decision = ri_again_decision(&seq, &omega, n_max)?;
    let f_formula = (2..=n_max).map(|n| f_from_rho(rho_hat, rho_tilde, n)).collect::<Result<Vec<_>>>()?;
    let mut coefficients = Vec::new();
    if decision.is_ri {
        for n in 1..=n_max {
            if rho_tilde[n].norm() == 0.0 {
                return Err(Error::InvalidParameter(format!("rho_tilde_{n} = 0")));
            }
            let r = rho_tilde[n + 1] / rho_tilde[n];
            coefficients.push((r, r * (one() - rho_hat[n] * rho_tilde[n])));
        }
    }
    Ok(YPrimeRi { is_ri: decision.is_ri, f_formula, decision, coefficients })
}

/// Regenerates `W_1..` from `W_1 = 1`, `W_2` and the coefficient list.
pub fn regenerate_y_prime(w1: &ComplexPoly, w2: &ComplexPoly, coefficients: &[(C64, C64)]) -> Vec<ComplexPoly> {
    let mut w = vec![ComplexPoly::zero(), w1.clone(), w2.clone()];
    for (i, (shift, c)) in coefficients.iter().enumerate() {
        let n = i + 1;
        let next = ComplexPoly::new(vec![*shift, one()])
            .mul(&w[n + 1])
            .sub(&w[n].shift(1).scale(*c));
        w.push(next);
    }
    w
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfInvCriterion {
    pub passed: bool,
    pub first_failure: Option<usize>,
    /// `epsilon_n` with `B_n* = epsilon_n B_n`, when the criterion holds up to `n`.
    pub epsilon: Vec<C64>,
}

/// For `B_{n+1} = (z - beta_n) B_n - tau_n z B_{n-1}`: every `B_n`, `n <= n_max`, is
/// self-inversive iff `|beta_n| = 1` for `n < n_max` and `tau_n / conj tau_n = beta_n beta_{n-1}`
/// for `1 <= n < n_max`; then `epsilon_{n+1} = -conj(beta_n) epsilon_n`.
pub fn self_inversive_criterion_ri(seq: &RISequence, n_max: usize) -> Result<SelfInvCriterion> {
    let tol = 1e-10;
    let mut epsilon = vec![one()];
    for n in 0..n_max {
        let b = seq.beta(n)?;
        let mut ok = (b.norm() - 1.0).abs() < tol;
        if n >= 1 && ok {
            let t = seq.tau(n)?;
            ok = (t / t.conj() - b * seq.beta(n - 1)?).norm() < tol;
        }
        if !ok {
            return Ok(SelfInvCriterion { passed: false, first_failure: Some(n), epsilon });
        }
        epsilon.push(-b.conj() * epsilon[n]);
    }
    Ok(SelfInvCriterion { passed: true, first_failure: None, epsilon })
}

/// Coefficient-level test of every polynomial in the list (index = degree).
pub fn all_self_inversive(ps: &[ComplexPoly]) -> Result<bool> {
    for p in ps {
        if !is_self_inversive(p)?.flag {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn real_beta_gives_unit_ratios() {
        let d = DiskSeq::new(vec![c(0.3, 0.0), c(-0.2, 0.0), c(0.5, 0.0), c(0.1, 0.0)]).unwrap();
        let (rh, _) = rho_from_beta(&d, 3, c(-1.0, 0.0)).unwrap();
        assert!(rh.iter().all(|r| (r + 1.0).norm() < 1e-15));
        assert_eq!(DiskSeq::new(vec![c(1.0, 0.0)]), Err(Error::InvalidBeta(0)));
    }

    #[test]
    fn one_minus_rho_product() {
        let d = DiskSeq::new(vec![c(0.3, 0.2), c(-0.2, 0.5), c(0.1, -0.6), c(0.4, 0.4), c(-0.3, 0.0)]).unwrap();
        let (rh, rt) = rho_from_beta(&d, 4, c(-1.0, 0.0)).unwrap();
        for n in 1..4 {
            let (bp, bn) = (d.beta[n - 1], d.beta[n]);
            let want = (1.0 - bn.conj()) * (1.0 - bp.norm_sqr()) / (1.0 - bp.conj());
            assert!((1.0 - rh[n] * rt[n] - want).norm() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn r1_and_g() {
        let d = DiskSeq::new(vec![c(0.2, 0.0), c(0.1, 0.3), c(-0.4, 0.2), c(0.3, -0.1)]).unwrap();
        let rn = build_rn(&d, 3).unwrap();
        assert_eq!(rn.r[1], ComplexPoly::from_real(&[1.0, 1.0]));
        for x in [-0.9, -0.3, 0.4, 0.8] {
            assert!(g_recurrence_residual(&rn, x, 1.0).unwrap() < 1e-12);
            assert!(g_recurrence_residual(&rn, x, -1.0).unwrap() > 1e-3);
        }
        assert_eq!(transform_g(&rn, 1, 1.0), Err(Error::OutOfDomain(1.0)));
        let near = transform_g(&rn, 2, 1.0 - 1e-6).unwrap();
        let at_one = rn.r[2].eval(c(1.0, 0.0)) / 4.0;
        assert!((near - at_one).norm() < 1e-2);
    }

    #[test]
    fn escape_from_real_seed() {
        let r = beta_selfinv_recursion(c(0.4, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), 5);
        match r {
            Err(Error::EscapedDisk { index, partial }) => {
                assert_eq!(index, 1);
                assert!((partial[1] - 1.0).norm() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            beta_selfinv_recursion(c(0.4, 0.3), c(-1.0, 0.0), c(-1.0, 0.0), 3),
            Err(Error::InvalidSeed(_))
        ));
    }

    #[test]
    fn step_equalizes_rho() {
        let mut b = vec![c(0.35, 0.0), c(0.2, 0.4), c(-0.3, 0.1)];
        let next = selfinv_beta_step(&b).unwrap();
        b.push(next);
        b.push(c(0.0, 0.0));
        let (rh, rt) = rho_products(&b, 3, c(-1.0, 0.0));
        assert!((rh[3] - rt[3]).norm() < 1e-12);
    }

    #[test]
    fn criterion_toy() {
        // B_1 = z + 1, B_2 = (z + 1) B_1 - tau z with |beta| = 1 and real tau: palindromic
        let s = RISequence::new(vec![c(-1.0, 0.0); 5], vec![c(0.5, 0.0); 5]).unwrap();
        let r = self_inversive_criterion_ri(&s, 4).unwrap();
        assert!(r.passed);
        let bs = s.generate_b(4).unwrap();
        assert!(all_self_inversive(&bs[1..]).unwrap());
        let mut t = s.clone();
        t.tau[2] *= C64::from_polar(1.0, 0.01);
        assert!(!self_inversive_criterion_ri(&t, 4).unwrap().passed);
        let bs = t.generate_b(4).unwrap();
        assert!(!all_self_inversive(&bs[3..]).unwrap());
    }
}
