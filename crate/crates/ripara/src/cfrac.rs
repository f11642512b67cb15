//! Continued fraction whose approximant denominators are the `X_n`, its two-point series
//! correspondence, and the `o` moment table extracted from it.

use crate::functionals::MomentFunctional;
use crate::poly::ComplexPoly;
use crate::recurrence::{mixed_coeffs, OmegaMode, OmegaSeq, RISequence};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

const STABLE_TOL: f64 = 1e-9;

/// Approximants `Y_n/X_n` of
/// `e_1 z / (e_1(z - d_1) - f_2 z (z - zeta) / (e_2(z - d_2) - f_3 z / (e_3(z - d_3) - ...)))`.
///
/// Vectors `e`, `f`, `d` are indexed by level: entry `i - 1` holds level `i`.
/// `y` holds the raw numerators; `alpha_scale = d_1` turns them into the normalization with
/// `alpha_1 = -1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CFracState {
    pub zeta: C64,
    pub e: Vec<C64>,
    pub f: Vec<C64>,
    pub d: Vec<C64>,
    pub y: Vec<ComplexPoly>,
    pub x: Vec<ComplexPoly>,
    pub x_n0: Vec<C64>,
    pub x_nn: Vec<C64>,
    /// `tau_0...tau_{n-1} u_{n+1} / v_1`, before normalization.
    pub upsilon_hat_raw: Vec<C64>,
    pub upsilon_hat: Vec<C64>,
    pub upsilon_tilde: Vec<C64>,
    pub alpha_scale: C64,
    /// `X_n` here divided by `X_n` from the recurrence module (leading coefficients).
    pub scale_vs_recurrence: Vec<C64>,
}

impl CFracState {
    /// Highest approximant index available.
    pub fn top(&self) -> usize {
        self.x.len() - 1
    }

    /// `(-1)^n e_1...e_n d_1...d_n`.
    pub fn predicted_x_n0(&self, n: usize) -> C64 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        (0..n).fold(C64::new(sign, 0.0), |acc, i| acc * self.e[i] * self.d[i])
    }

    fn ed_product(&self, n: usize) -> C64 {
        (0..n).fold(C64::new(1.0, 0.0), |acc, i| acc * self.e[i] * self.d[i])
    }
}

/// Builds levels `1..=n_max` from a recursive-mode `omega`.
///
/// Needs `omega_0..omega_{n_max}` and recurrence data up to index `n_max`.
pub fn build_cfrac(seq: &RISequence, omega: &OmegaSeq, n_max: usize) -> Result<CFracState> {
    if omega.mode != OmegaMode::Recursive {
        return Err(Error::InvalidInput("continued fraction needs recursive omega".into()));
    }
    if n_max < 2 {
        return Err(Error::InvalidInput("at least two levels required".into()));
    }
    let zeta = omega.zeta;
    let one = C64::new(1.0, 0.0);
    let m1 = mixed_coeffs(seq, omega, 1)?;
    if m1.v_n.norm() == 0.0 {
        return Err(Error::InvalidSeed("v_1 = 0 (omega_1 = beta_0)".into()));
    }
    let u = |n: usize| -> Result<C64> { Ok(omega.omega(n - 1)? + seq.tau(n - 1)?) };

    let mut e = vec![one, m1.s_n / m1.v_n];
    let mut f = vec![one, m1.u_next * seq.tau(0)? / m1.v_n];
    if m1.s_n.norm() == 0.0 {
        return Err(Error::InvalidSeed("s_1 = 0".into()));
    }
    let mut d = vec![seq.beta(0)? - omega.omega(1)?, m1.t_n / m1.s_n];
    for i in 3..=n_max {
        let ui = u(i)?;
        let up = u(i - 1)?;
        if up.norm() == 0.0 {
            return Err(Error::BranchRequired(i - 1));
        }
        let w = omega.omega(i - 1)?;
        if w.norm() == 0.0 {
            return Err(Error::OmegaBreakdown(i - 1));
        }
        e.push(one);
        f.push(ui * seq.tau(i - 2)? / up);
        d.push(ui * omega.omega(i - 2)? * seq.beta(i - 2)? / (up * w));
    }
    if u(2)?.norm() == 0.0 {
        return Err(Error::BranchRequired(2));
    }

    let z = ComplexPoly::monomial(1, one);
    let mut x = vec![ComplexPoly::one(), ComplexPoly::linear(d[0])];
    let mut y = vec![ComplexPoly::zero(), z.clone()];
    for i in 2..=n_max {
        let partial = if i == 2 {
            ComplexPoly::new(vec![C64::new(0.0, 0.0), -zeta, one]).scale(-f[1])
        } else {
            z.scale(-f[i - 1])
        };
        let b = ComplexPoly::linear(d[i - 1]).scale(e[i - 1]);
        x.push(b.mul(&x[i - 1]).add(&partial.mul(&x[i - 2])));
        y.push(b.mul(&y[i - 1]).add(&partial.mul(&y[i - 2])));
    }

    let bs = seq.generate_b(n_max)?;
    let mut scale_vs_recurrence = vec![one];
    for n in 1..=n_max {
        let xr = bs[n].add(&bs[n - 1].scale(omega.omega(n)?));
        scale_vs_recurrence.push(x[n].coeff(n) / xr.coeff(n));
    }

    let x_n0: Vec<C64> = x.iter().map(|p| p.coeff(0)).collect();
    let x_nn: Vec<C64> = x.iter().enumerate().map(|(n, p)| p.coeff(n)).collect();
    let alpha_scale = d[0];
    let mut upsilon_hat_raw = Vec::new();
    let mut upsilon_hat = Vec::new();
    let mut upsilon_tilde = Vec::new();
    let mut tau_prod = one;
    // upsilon_n needs u_{n+1} and e_{n+1} d_{n+1}
    for n in 0..n_max {
        let raw = tau_prod * u(n + 1)? / m1.v_n;
        let ed: C64 = (0..=n).fold(one, |acc, i| acc * e[i] * d[i]);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        upsilon_hat_raw.push(raw);
        upsilon_hat.push(alpha_scale * raw);
        upsilon_tilde.push(alpha_scale * raw * zeta * sign / ed);
        tau_prod *= seq.tau(n)?;
    }
    Ok(CFracState {
        zeta,
        e,
        f,
        d,
        y,
        x,
        x_n0,
        x_nn,
        upsilon_hat_raw,
        upsilon_hat,
        upsilon_tilde,
        alpha_scale,
        scale_vs_recurrence,
    })
}

/// Power-series coefficients `c_0..=c_k` of `num/den` at the origin.
pub fn series_at_zero(num: &[C64], den: &[C64], k: usize) -> Result<Vec<C64>> {
    let d0 = den.first().copied().unwrap_or_default();
    if d0.norm() == 0.0 {
        return Err(Error::InvalidInput("denominator vanishes at the expansion point".into()));
    }
    let mut out: Vec<C64> = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut acc = num.get(i).copied().unwrap_or_default();
        for j in 1..=i.min(den.len().saturating_sub(1)) {
            acc -= den[j] * out[i - j];
        }
        out.push(acc / d0);
    }
    Ok(out)
}

/// Coefficients of `num/den` in powers of `1/z`: entry `k` multiplies `z^{deg num - deg den - k}`.
pub fn series_at_infinity(num: &[C64], den: &[C64], k: usize) -> Result<Vec<C64>> {
    let rn: Vec<C64> = num.iter().rev().copied().collect();
    let rd: Vec<C64> = den.iter().rev().copied().collect();
    series_at_zero(&rn, &rd, k)
}

/// Two-point expansion data. `alpha[k]` is `alpha_k` (with `alpha_0 = 0`), `alpha_star[k]`
/// is `alpha*_{-k}`; both carry the normalization `alpha_1 = -1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceSeries {
    pub alpha: Vec<C64>,
    pub alpha_star: Vec<C64>,
}

impl CorrespondenceSeries {
    /// `o_k = alpha*_{k+1} - alpha_{k+1}`, reduced by the vanishing conventions to
    /// `-alpha_{k+1}` for `k >= 0` and `alpha*_{k+1}` for `k < 0`.
    pub fn o(&self, k: i64) -> Result<C64> {
        let v = if k >= 0 {
            self.alpha.get(k as usize + 1).map(|a| -a)
        } else {
            self.alpha_star.get((-k - 1) as usize).copied()
        };
        v.ok_or(Error::MomentDepthExceeded { index: k, depth: self.depth() })
    }

    /// Largest `|k|` for which `o_k` is available on both sides.
    pub fn depth(&self) -> usize {
        (self.alpha.len().saturating_sub(2)).min(self.alpha_star.len())
    }

    /// The functional with `O(z^m) = o_{-m}`, so that `<p, z^k> = sum_j p_j o_{k-j}`.
    pub fn functional(&self) -> Result<MomentFunctional> {
        let depth = self.depth();
        let mut neg = Vec::with_capacity(depth);
        let mut pos = Vec::with_capacity(depth);
        for k in 1..=depth as i64 {
            neg.push(self.o(-k)?);
            pos.push(self.o(k)?);
        }
        Ok(MomentFunctional::new(neg, self.o(0)?, pos))
    }
}

fn stable(a: C64, b: C64, floor: f64) -> bool {
    (a - b).norm() <= STABLE_TOL * a.norm().max(b.norm()).max(floor)
}

/// Extracts `o_k` for `|k| <= depth` from the top approximant, checking each coefficient
/// against the previous approximant.
pub fn correspondence(state: &CFracState, depth: usize) -> Result<CorrespondenceSeries> {
    let m = state.top();
    if m < depth + 2 {
        return Err(Error::InvalidInput(format!(
            "depth {depth} needs {} levels, have {m}",
            depth + 2
        )));
    }
    let s = state.alpha_scale;
    let at0 = |n: usize, k: usize| -> Result<Vec<C64>> {
        Ok(series_at_zero(state.y[n].coeffs(), state.x[n].coeffs(), k)?
            .into_iter()
            .map(|c| c * s)
            .collect())
    };
    let atinf = |n: usize, k: usize| -> Result<Vec<C64>> {
        Ok(series_at_infinity(state.y[n].coeffs(), state.x[n].coeffs(), k)?
            .into_iter()
            .map(|c| c * s)
            .collect())
    };
    // alpha_k correct for k <= n; alpha*_{-k} correct for k <= n - 2
    let alpha = at0(m, depth + 1)?;
    let alpha_prev = at0(m - 1, depth + 1)?;
    let floor = alpha.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for k in 0..=depth + 1 {
        if !stable(alpha[k], alpha_prev[k], floor) {
            return Err(Error::CorrespondenceFailure(k as i64));
        }
    }
    let star = atinf(m, depth - 1)?;
    let star_prev = atinf(m - 1, depth - 1)?;
    for k in 0..depth {
        if !stable(star[k], star_prev[k], floor) {
            return Err(Error::CorrespondenceFailure(-(k as i64)));
        }
    }
    Ok(CorrespondenceSeries { alpha, alpha_star: star })
}

/// Leading correction terms of `Y_{n+1}/X_{n+1} - Y_n/X_n` (raw normalization).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceCheck {
    pub n: usize,
    /// Largest coefficient below `z^{n+1}` in the expansion at 0.
    pub low_order_max: f64,
    pub at_zero: C64,
    pub at_zero_predicted: C64,
    /// Coefficient of `z^{-(n-1)}` at infinity.
    pub at_infinity: C64,
    pub at_infinity_predicted: C64,
}

impl DifferenceCheck {
    pub fn max_rel_error(&self) -> f64 {
        let a = (self.at_zero - self.at_zero_predicted).norm() / self.at_zero_predicted.norm();
        let b = (self.at_infinity - self.at_infinity_predicted).norm()
            / self.at_infinity_predicted.norm();
        a.max(b)
    }
}

/// Requires `n + 1 <= top`.
pub fn difference_check(state: &CFracState, n: usize) -> Result<DifferenceCheck> {
    if n + 1 > state.top() || n == 0 {
        return Err(Error::InvalidInput(format!("difference check needs 1 <= n < {}", state.top())));
    }
    // (Y_{n+1} X_n - Y_n X_{n+1}) / (X_n X_{n+1})
    let num = state.y[n + 1].mul(&state.x[n]).sub(&state.y[n].mul(&state.x[n + 1]));
    let den = state.x[n].mul(&state.x[n + 1]);
    let s0 = series_at_zero(num.coeffs(), den.coeffs(), n + 1)?;
    let low_order_max = s0[..=n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let ed = state.ed_product(n);
    let ups = state.upsilon_hat_raw[n];
    let at_zero_predicted = ups * state.zeta / (ed * ed * state.e[n] * state.d[n]);
    // numerator degree n+2 (exactly), denominator degree 2n+1
    let num_t = ComplexPoly::new(num.coeffs()[..(n + 3).min(num.len())].to_vec());
    let den_t = ComplexPoly::new(den.coeffs()[..(2 * n + 2).min(den.len())].to_vec());
    let si = series_at_infinity(num_t.coeffs(), den_t.coeffs(), 0)?;
    let at_infinity_predicted = ups / (state.x_nn[n] * state.x_nn[n + 1]);
    Ok(DifferenceCheck {
        n,
        low_order_max,
        at_zero: s0[n + 1],
        at_zero_predicted,
        at_infinity: si[0],
        at_infinity_predicted,
    })
}

/// Result of the truncated tail fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailOmega {
    pub omega: C64,
    pub fraction: C64,
    /// Same quantity with one level fewer (absent for one level).
    pub previous: Option<C64>,
}

fn tail_fraction(seq: &RISequence, zeta: C64, start: usize, levels: usize) -> Result<C64> {
    // F_k = 1/(zeta - beta_k - tau_{k+1} zeta F_{k+1}), truncated with F = 0 beyond the last level
    let mut fval = C64::new(0.0, 0.0);
    for k in (start..start + levels).rev() {
        let next = if k + 1 < start + levels { seq.tau(k + 1)? * zeta * fval } else { C64::new(0.0, 0.0) };
        let den = zeta - seq.beta(k)? - next;
        if den.norm() == 0.0 {
            return Err(Error::TailBreakdown(k - start + 1));
        }
        fval = C64::new(1.0, 0.0) / den;
    }
    Ok(fval)
}

/// `omega_start = -tau_start zeta F_start(zeta)` from `levels` levels of the tail fraction.
pub fn tail_omega(seq: &RISequence, zeta: C64, start: usize, levels: usize) -> Result<TailOmega> {
    if levels == 0 {
        return Err(Error::InvalidInput("levels must be at least 1".into()));
    }
    let fraction = tail_fraction(seq, zeta, start, levels)?;
    let t = seq.tau(start)?;
    let previous = if levels > 1 {
        Some(-t * zeta * tail_fraction(seq, zeta, start, levels - 1)?)
    } else {
        None
    };
    Ok(TailOmega { omega: -t * zeta * fraction, fraction, previous })
}

/// `omega_1(zeta) = -tau_1 zeta F(zeta)`.
pub fn tail_fraction_omega1(seq: &RISequence, zeta: C64, levels: usize) -> Result<TailOmega> {
    tail_omega(seq, zeta, 1, levels)
}
