//! R_I recurrences `B_{n+1} = (z - beta_n) B_n - tau_n z B_{n-1}` and the combinations
//! `X_{n+1} = B_{n+1} + omega_{n+1} B_n`.

use crate::functionals::{MomentFunctional, TransformParams};
use crate::poly::ComplexPoly;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

const REL_TOL: f64 = 1e-10;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Recurrence data `(beta_n, tau_n)`, stored as finite lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RISequence {
    pub beta: Vec<C64>,
    pub tau: Vec<C64>,
}

impl RISequence {
    pub fn new(beta: Vec<C64>, tau: Vec<C64>) -> Result<Self> {
        if tau.first().map_or(true, |t| t.norm() == 0.0) {
            return Err(Error::InvalidTau);
        }
        Ok(RISequence { beta, tau })
    }

    pub fn constant(beta: C64, tau: C64, len: usize) -> Result<Self> {
        RISequence::new(vec![beta; len], vec![tau; len])
    }

    pub fn len(&self) -> usize {
        self.beta.len().min(self.tau.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(v: &[C64], n: usize, what: &str) -> Result<C64> {
        v.get(n)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("{what}_{n} not provided")))
    }

    pub fn beta(&self, n: usize) -> Result<C64> {
        Self::get(&self.beta, n, "beta")
    }

    pub fn tau(&self, n: usize) -> Result<C64> {
        Self::get(&self.tau, n, "tau")
    }

    /// Monic `B_0..=B_{n_max}`.
    pub fn generate_b(&self, n_max: usize) -> Result<Vec<ComplexPoly>> {
        if self.tau.first().map_or(true, |t| t.norm() == 0.0) {
            return Err(Error::InvalidTau);
        }
        let mut out = vec![ComplexPoly::one()];
        let mut prev = ComplexPoly::zero();
        for n in 0..n_max {
            let cur = out[n].clone();
            let next = ComplexPoly::linear(self.beta(n)?)
                .mul(&cur)
                .sub(&prev.shift(1).scale(self.tau(n)?));
            prev = cur;
            out.push(next);
        }
        Ok(out)
    }

    /// First-kind associated polynomials: entry `n-1` is `L_z((B_n(z) - B_n(y)) / (z - y))`
    /// as a polynomial in `y`, for `n = 1..=n_max`.
    pub fn first_kind(&self, l: &MomentFunctional, n_max: usize) -> Result<Vec<ComplexPoly>> {
        let bs = self.generate_b(n_max)?;
        let mut out = Vec::with_capacity(n_max);
        for b in bs.iter().skip(1) {
            let n = b.len() - 1;
            // (z^k - y^k)/(z - y) = sum_{i<k} z^i y^{k-1-i}
            let mut q = vec![zero(); n];
            for k in 1..=n {
                let bk = b.coeff(k);
                for i in 0..k {
                    q[k - 1 - i] += bk * l.moment(i as i64)?;
                }
            }
            out.push(ComplexPoly::new(q));
        }
        Ok(out)
    }

    /// Recurrence data for which `B_n` is orthogonal to `z^{-1}, .., z^{-n}` under `l`.
    pub fn from_functional(l: &MomentFunctional, n_max: usize, tau0: C64) -> Result<Self> {
        if tau0.norm() == 0.0 {
            return Err(Error::InvalidTau);
        }
        let u1 = l.moment(-1)?;
        if u1.norm() == 0.0 {
            return Err(Error::InvalidParameters("L(z^-1) vanishes".into()));
        }
        let mut beta = vec![l.moment(0)? / u1];
        let mut tau = vec![tau0];
        let mut prev = ComplexPoly::one();
        let mut cur = ComplexPoly::linear(beta[0]);
        for n in 1..n_max {
            let lb_n = l.apply_shifted(&cur, 0)?;
            let lb_p = l.apply_shifted(&prev, 0)?;
            if lb_p.norm() == 0.0 {
                return Err(Error::InvalidParameters(format!("L(B_{}) vanishes", n - 1)));
            }
            let t = lb_n / lb_p;
            let den = l.apply_shifted(&cur, -(n as i64) - 1)?;
            if den.norm() == 0.0 {
                return Err(Error::InvalidParameters(format!("functional not regular at {n}")));
            }
            let b = -t * l.apply_shifted(&prev, -(n as i64))? / den;
            let next = ComplexPoly::linear(b).mul(&cur).sub(&prev.shift(1).scale(t));
            beta.push(b);
            tau.push(t);
            prev = cur;
            cur = next;
        }
        RISequence::new(beta, tau)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaMode {
    Recursive,
    RRatio,
    Explicit,
}

/// `omega_n(zeta)` for `n = 0..values.len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSeq {
    pub zeta: C64,
    pub values: Vec<C64>,
    pub mode: OmegaMode,
    /// `r_n(zeta)` in r-ratio mode.
    pub r: Option<Vec<C64>>,
}

impl OmegaSeq {
    pub fn omega(&self, n: usize) -> Result<C64> {
        self.values
            .get(n)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("omega_{n} not provided")))
    }

    pub fn explicit(zeta: C64, values: Vec<C64>) -> Self {
        OmegaSeq { zeta, values, mode: OmegaMode::Explicit, r: None }
    }

    /// Recursive mode from `omega_0, omega_1`; `omega_1 = beta_0` is rejected.
    pub fn recursive(seq: &RISequence, zeta: C64, omega0: C64, omega1: C64, n_max: usize) -> Result<Self> {
        if (omega1 - seq.beta(0)?).norm() <= 1e-14 * (1.0 + omega1.norm()) {
            return Err(Error::InvalidSeed("omega_1 equals beta_0".into()));
        }
        let mut values = vec![omega0, omega1];
        for n in 1..n_max {
            let w = omega_next(n, values[n], seq.beta(n)?, seq.tau(n)?, zeta)?;
            values.push(w);
        }
        values.truncate(n_max + 1);
        Ok(OmegaSeq { zeta, values, mode: OmegaMode::Recursive, r: None })
    }

    /// Recursive mode with the choices `omega_0 = -tau_0` and `omega_1 = beta_0 - zeta`,
    /// which make every `X_n` vanish at `zeta`.
    pub fn recursive_common_zero(seq: &RISequence, zeta: C64, n_max: usize) -> Result<Self> {
        OmegaSeq::recursive(seq, zeta, -seq.tau(0)?, seq.beta(0)? - zeta, n_max)
    }
}

/// `omega_{n+1} = ((beta_n - zeta) omega_n - tau_n zeta) / omega_n`.
pub fn omega_next(n: usize, omega_n: C64, beta_n: C64, tau_n: C64, zeta: C64) -> Result<C64> {
    if omega_n.norm() == 0.0 {
        return Err(Error::OmegaBreakdown(n));
    }
    Ok(((beta_n - zeta) * omega_n - tau_n * zeta) / omega_n)
}

/// `omega_{n+1} = -r_{n+1}(zeta)/r_n(zeta)` with
/// `r_n = (1 - lambda) B_n(zeta) - (zeta - alpha) B^(1)_{n-1}(zeta)`.
///
/// `omega_0` is set to `-tau_0`.
pub fn omega_rratio(seq: &RISequence, l: &MomentFunctional, p: &TransformParams, n_max: usize) -> Result<OmegaSeq> {
    let zeta = p.zeta;
    let bs = seq.generate_b(n_max)?;
    let b1 = seq.first_kind(l, n_max)?;
    let r: Vec<C64> = (0..=n_max)
        .map(|n| {
            let assoc = if n == 0 { zero() } else { b1[n - 1].eval(zeta) };
            (one() - p.scale_lambda) * bs[n].eval(zeta) - (zeta - p.alpha) * assoc
        })
        .collect();
    let mut values = vec![-seq.tau(0)?];
    for n in 0..n_max {
        if r[n].norm() == 0.0 {
            return Err(Error::RBreakdown(n));
        }
        values.push(-r[n + 1] / r[n]);
    }
    Ok(OmegaSeq { zeta, values, mode: OmegaMode::RRatio, r: Some(r) })
}

/// `X_0 = 1`, `X_{n+1} = B_{n+1} + omega_{n+1} B_n` for `n + 1 <= n_max`.
pub fn build_x(seq: &RISequence, omega: &OmegaSeq, n_max: usize) -> Result<Vec<ComplexPoly>> {
    let bs = seq.generate_b(n_max)?;
    let mut out = vec![ComplexPoly::one()];
    for n in 1..=n_max {
        out.push(bs[n].add(&bs[n - 1].scale(omega.omega(n)?)));
    }
    Ok(out)
}

/// Coefficients of the quadratic recurrence linking `X_{n+1}, X_n, X_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedCoeffs {
    pub n: usize,
    pub u_n: C64,
    pub v_n: C64,
    pub s_n: C64,
    pub t_n: C64,
    pub u_next: C64,
    pub v_next: C64,
}

fn uv(seq: &RISequence, omega: &OmegaSeq, n: usize) -> Result<(C64, C64)> {
    let wp = omega.omega(n - 1)?;
    let u = wp + seq.tau(n - 1)?;
    let v = wp * (omega.omega(n)? - seq.beta(n - 1)?);
    Ok((u, v))
}

/// `u_n = omega_{n-1} + tau_{n-1}`, `v_n = omega_{n-1}(omega_n - beta_{n-1})`,
/// `s_n = u_n v_{n+1}/omega_n + v_n - omega_{n-1} u_{n+1}`,
/// `t_n = omega_{n-1} beta_{n-1} v_{n+1}/omega_n`. Requires `n >= 1`.
pub fn mixed_coeffs(seq: &RISequence, omega: &OmegaSeq, n: usize) -> Result<MixedCoeffs> {
    if n == 0 {
        return Err(Error::InvalidInput("mixed coefficients start at n = 1".into()));
    }
    let w = omega.omega(n)?;
    if w.norm() == 0.0 {
        return Err(Error::OmegaBreakdown(n));
    }
    let (u_n, v_n) = uv(seq, omega, n)?;
    let (u_next, v_next) = uv(seq, omega, n + 1)?;
    let wp = omega.omega(n - 1)?;
    let s_n = u_n * v_next / w + v_n - wp * u_next;
    let t_n = wp * seq.beta(n - 1)? * v_next / w;
    Ok(MixedCoeffs { n, u_n, v_n, s_n, t_n, u_next, v_next })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TtrrReport {
    pub passed: bool,
    pub first_failure: Option<usize>,
    pub max_rel_residual: f64,
}

/// Checks `(u_n z + v_n) X_{n+1} = (u_n z^2 + s_n z - t_n) X_n - tau_{n-1}(u_{n+1} z + v_{n+1}) z X_{n-1}`
/// for `n = 1..=n_max`.
pub fn verify_mixed_ttrr(seq: &RISequence, omega: &OmegaSeq, n_max: usize) -> Result<TtrrReport> {
    let xs = build_x(seq, omega, n_max + 1)?;
    let mut worst: f64 = 0.0;
    let mut first_failure = None;
    for n in 1..=n_max {
        let m = mixed_coeffs(seq, omega, n)?;
        let lhs = ComplexPoly::new(vec![m.v_n, m.u_n]).mul(&xs[n + 1]);
        let quad = ComplexPoly::new(vec![-m.t_n, m.s_n, m.u_n]);
        let tail = ComplexPoly::new(vec![zero(), m.v_next, m.u_next]).scale(seq.tau(n - 1)?);
        let rhs = quad.mul(&xs[n]).sub(&tail.mul(&xs[n - 1]));
        let scale = lhs.max_abs().max(quad.mul(&xs[n]).max_abs()).max(1e-300);
        let r = lhs.sub(&rhs).max_abs() / scale;
        if r > REL_TOL && first_failure.is_none() {
            first_failure = Some(n);
        }
        worst = worst.max(r);
    }
    Ok(TtrrReport { passed: first_failure.is_none(), first_failure, max_rel_residual: worst })
}

/// One step `X_{n+1} = a X_n - c X_{n-1}` with polynomial `a`, `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceStep {
    pub n: usize,
    pub a: ComplexPoly,
    pub c: ComplexPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiBranch {
    /// `(u_{n+1}, v_{n+1}) = f_n (u_n, v_n)` for every step.
    Proportional,
    /// Special case of the above with `u_n = 0` throughout.
    UZero,
    /// `u_n zeta + v_n = 0` for `n >= 2`: the common factor `z - zeta` cancels.
    Punctured,
    NotRi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiDecision {
    pub is_ri: bool,
    pub branch: RiBranch,
    /// `f_n` for the steps covered, indexed from `first_step`.
    pub f: Vec<C64>,
    pub first_step: usize,
    /// First `n` where proportionality fails, if any.
    pub witness: Option<usize>,
    /// Initial polynomials `X_0..X_{first_step}`.
    pub initial: Vec<ComplexPoly>,
    pub steps: Vec<RecurrenceStep>,
}

impl RiDecision {
    /// Runs the emitted recurrence.
    pub fn regenerate(&self) -> Vec<ComplexPoly> {
        let mut xs = self.initial.clone();
        for st in &self.steps {
            let n = st.n;
            let next = st.a.mul(&xs[n]).sub(&st.c.mul(&xs[n - 1]));
            xs.push(next);
        }
        xs
    }
}

fn proportional(a: (C64, C64), b: (C64, C64)) -> Option<C64> {
    let (u0, v0) = a;
    let (u1, v1) = b;
    let scale = u0.norm().max(v0.norm()).max(u1.norm()).max(v1.norm());
    if scale == 0.0 {
        return None;
    }
    let f = if v0.norm() >= u0.norm() { v1 / v0 } else { u1 / u0 };
    let ok = (u1 - f * u0).norm() <= REL_TOL * scale && (v1 - f * v0).norm() <= REL_TOL * scale;
    ok.then_some(f)
}

/// Decides whether `X_n` is again an R_I sequence for `n <= n_max + 1`.
///
/// Tests `(u_{n+1}, v_{n+1})` proportional to `(u_n, v_n)` for `n = 1..=n_max`. When that
/// holds the emitted step is
/// `X_{n+1} = (z + v_{n+1}/omega_n - omega_{n-1} f_n) X_n - tau_{n-1} f_n z X_{n-1}`.
/// Otherwise, if `u_n zeta + v_n = 0` for all `n >= 2`, the cancelled steps
/// `X_{n+1} = (z - f_n omega_{n-1} beta_{n-1}/omega_n) X_n - f_n tau_{n-1} z X_{n-1}` with
/// `f_n = u_{n+1}/u_n` are emitted from `n = 2` (from `n = 1` when `u_1 = 0`, using the
/// quadratic first step).
pub fn ri_again_decision(seq: &RISequence, omega: &OmegaSeq, n_max: usize) -> Result<RiDecision> {
    let mut uvs = Vec::with_capacity(n_max + 2);
    uvs.push((zero(), zero()));
    for n in 1..=n_max + 1 {
        uvs.push(uv(seq, omega, n)?);
    }
    for n in 1..=n_max {
        if uvs[n].0.norm() == 0.0 && uvs[n].1.norm() == 0.0 {
            return Err(Error::DegenerateStep(n));
        }
    }
    let xs = build_x(seq, omega, 2.min(n_max + 1))?;
    let z = ComplexPoly::monomial(1, one());

    let mut f = Vec::new();
    let mut witness = None;
    for n in 1..=n_max {
        match proportional(uvs[n], uvs[n + 1]) {
            Some(fv) => f.push(fv),
            None => {
                witness = Some(n);
                break;
            }
        }
    }
    if witness.is_none() {
        let u_scale = uvs.iter().map(|(u, v)| u.norm().max(v.norm())).fold(0.0, f64::max);
        let u_zero = uvs[1..].iter().all(|(u, _)| u.norm() <= REL_TOL * u_scale);
        let mut steps = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let fv = f[n - 1];
            let w = omega.omega(n)?;
            if w.norm() == 0.0 {
                return Err(Error::OmegaBreakdown(n));
            }
            let shift = uvs[n + 1].1 / w - omega.omega(n - 1)? * fv;
            steps.push(RecurrenceStep {
                n,
                a: ComplexPoly::new(vec![shift, one()]),
                c: z.scale(seq.tau(n - 1)? * fv),
            });
        }
        return Ok(RiDecision {
            is_ri: true,
            branch: if u_zero { RiBranch::UZero } else { RiBranch::Proportional },
            f,
            first_step: 1,
            witness: None,
            initial: xs[..2].to_vec(),
            steps,
        });
    }

    let zeta = omega.zeta;
    let punctured = (2..=n_max + 1).all(|n| {
        let (u, v) = uvs[n];
        let s = u.norm() * zeta.norm().max(1.0) + v.norm();
        (u * zeta + v).norm() <= REL_TOL * s.max(1e-300)
    });
    if !punctured {
        return Ok(RiDecision {
            is_ri: false,
            branch: RiBranch::NotRi,
            f,
            first_step: 1,
            witness,
            initial: Vec::new(),
            steps: Vec::new(),
        });
    }

    let mut steps = Vec::new();
    let mut fs = Vec::new();
    let (u1, v1) = uvs[1];
    let first_step = if u1.norm() <= REL_TOL * v1.norm() && n_max >= 1 {
        let m = mixed_coeffs(seq, omega, 1)?;
        // X_2 = (s_1 z - t_1)/v_1 X_1 - (u_2 tau_0/v_1) z (z - zeta)
        steps.push(RecurrenceStep {
            n: 1,
            a: ComplexPoly::new(vec![-m.t_n / v1, m.s_n / v1]),
            c: ComplexPoly::new(vec![zero(), -zeta, one()]).scale(m.u_next * seq.tau(0)? / v1),
        });
        fs.push(m.u_next * seq.tau(0)? / v1);
        1
    } else {
        2
    };
    for n in 2..=n_max {
        let (un, _) = uvs[n];
        if un.norm() == 0.0 {
            return Err(Error::BranchRequired(n));
        }
        let fv = uvs[n + 1].0 / un;
        let w = omega.omega(n)?;
        if w.norm() == 0.0 {
            return Err(Error::OmegaBreakdown(n));
        }
        let shift = -fv * omega.omega(n - 1)? * seq.beta(n - 1)? / w;
        steps.push(RecurrenceStep {
            n,
            a: ComplexPoly::new(vec![shift, one()]),
            c: z.scale(fv * seq.tau(n - 1)?),
        });
        fs.push(fv);
    }
    let initial = if first_step == 1 { xs[..2].to_vec() } else { xs[..3.min(xs.len())].to_vec() };
    Ok(RiDecision {
        is_ri: true,
        branch: RiBranch::Punctured,
        f: fs,
        first_step,
        witness,
        initial,
        steps,
    })
}

/// True when every `X_n`, `n >= 1`, vanishes at `zeta` (relative to its coefficient size).
pub fn has_common_zero(xs: &[ComplexPoly], zeta: C64, tol: f64) -> bool {
    xs.iter().skip(1).all(|x| {
        let s: f64 = x
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * zeta.norm().powi(k as i32))
            .sum();
        x.eval(zeta).norm() <= tol * s.max(1e-300)
    })
}

/// Evaluates `X_n(z)`; in recursive mode a point within 1e-12 of `zeta` returns the exact
/// zero of the cancelled form when `X_1(zeta) = 0`.
pub fn eval_x(xs: &[ComplexPoly], omega: &OmegaSeq, n: usize, z: C64) -> C64 {
    if n > 0
        && omega.mode == OmegaMode::Recursive
        && (z - omega.zeta).norm() < 1e-12
        && xs.get(1).map_or(false, |x1| x1.eval(omega.zeta).norm() < 1e-12 * x1.max_abs())
    {
        return zero();
    }
    xs[n].eval(z)
}
