//! The pair `U_hat_n`, `U_tilde_n` built from the para-orthogonal `X_hat`, `X_tilde`, its
//! reflection parameters, the lambda recurrence and the `Y'` combination.

use crate::cfrac::{build_cfrac, correspondence, CFracState, CorrespondenceSeries};
use crate::functionals::{bilinear, MomentFunctional};
use crate::poly::ComplexPoly;
use crate::recurrence::{build_x, OmegaSeq, RISequence};
use crate::toeplitz::{guard, solve_hat, solve_tilde, zohar_invert, OTable, ToeplitzSystem, ZoharState};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Levels `0..=n` of the pair. `rho_hat[0] = rho_tilde[0] = -1` encodes `U_hat_0 = U_tilde_0 = 1`.
/// A sigma pair that is undefined at some level (for instance `n = 0`) is stored as zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParaPair {
    pub u_hat: Vec<ComplexPoly>,
    pub u_tilde: Vec<ComplexPoly>,
    pub rho_hat: Vec<C64>,
    pub rho_tilde: Vec<C64>,
    pub sigma_hat: Vec<C64>,
    pub sigma_tilde: Vec<C64>,
    pub lambda: Vec<C64>,
}

impl ParaPair {
    pub fn initial(lambda0: C64) -> Self {
        ParaPair {
            u_hat: vec![ComplexPoly::one()],
            u_tilde: vec![ComplexPoly::one()],
            rho_hat: vec![-one()],
            rho_tilde: vec![-one()],
            sigma_hat: vec![C64::new(0.0, 0.0)],
            sigma_tilde: vec![C64::new(0.0, 0.0)],
            lambda: vec![lambda0],
        }
    }

    pub fn top(&self) -> usize {
        self.u_hat.len() - 1
    }

    /// `U_hat_{n+1} = U_hat_n - rho_hat z U_tilde_n`, `U_tilde_{n+1} = z U_tilde_n - rho_tilde U_hat_n`,
    /// `lambda_{n+1} = (1 - rho_hat rho_tilde) lambda_n`.
    pub fn advance(&mut self, rho_hat: C64, rho_tilde: C64) -> Result<()> {
        let n = self.top();
        if rho_hat.norm() == 0.0 || rho_tilde.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("zero reflection parameter at {}", n + 1)));
        }
        let q = one() - rho_hat * rho_tilde;
        if q.norm() <= 1e-14 {
            return Err(Error::LambdaCollapse(n + 1));
        }
        let (uh, ut) = (&self.u_hat[n], &self.u_tilde[n]);
        let next_hat = uh.sub(&ut.shift(1).scale(rho_hat));
        let next_tilde = ut.shift(1).sub(&uh.scale(rho_tilde));
        self.u_hat.push(next_hat);
        self.u_tilde.push(next_tilde);
        self.rho_hat.push(rho_hat);
        self.rho_tilde.push(rho_tilde);
        let (sh, st) = sigma_from_rho(rho_hat, rho_tilde).unwrap_or((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        self.sigma_hat.push(sh);
        self.sigma_tilde.push(st);
        self.lambda.push(q * self.lambda[n]);
        Ok(())
    }

    /// Builds levels `1..` from reflection parameters (`rho_hat[k-1]` is `rho_hat_k`).
    pub fn from_rho(rho_hat: &[C64], rho_tilde: &[C64], lambda0: C64) -> Result<Self> {
        let mut p = ParaPair::initial(lambda0);
        for (rh, rt) in rho_hat.iter().zip(rho_tilde) {
            p.advance(*rh, *rt)?;
        }
        Ok(p)
    }

    /// `U_hat_n = s_hat X_hat_n - s_tilde X_tilde_n`, `U_tilde_n = s_tilde X_hat_n - s_hat X_tilde_n`
    /// for `n >= 1`; entries at index 0 are ignored.
    pub fn build_from_x(
        x_hat: &[ComplexPoly],
        x_tilde: &[ComplexPoly],
        sigma_hat: &[C64],
        sigma_tilde: &[C64],
    ) -> Result<Self> {
        let mut p = ParaPair::initial(one());
        for n in 1..x_hat.len() {
            let (sh, st) = (sigma_hat[n], sigma_tilde[n]);
            guard(sh, st)?;
            if st.norm() == 0.0 {
                return Err(Error::GuardViolation(format!("sigma_tilde_{n} = 0")));
            }
            let uh = x_hat[n].scale(sh).sub(&x_tilde[n].scale(st));
            let ut = x_hat[n].scale(st).sub(&x_tilde[n].scale(sh));
            let rh = -uh.coeff(n);
            let rt = -ut.coeff(0);
            p.lambda.push((one() - rh * rt) * p.lambda[n - 1]);
            p.u_hat.push(uh);
            p.u_tilde.push(ut);
            p.rho_hat.push(rh);
            p.rho_tilde.push(rt);
            p.sigma_hat.push(sh);
            p.sigma_tilde.push(st);
        }
        Ok(p)
    }

    /// `X_hat_n = (s_hat U_hat - s_tilde U_tilde)/(s_hat^2 - s_tilde^2)` and
    /// `X_tilde_n = (s_tilde U_hat - s_hat U_tilde)/(s_hat^2 - s_tilde^2)`.
    pub fn reconstruct_x(&self, n: usize) -> Result<(ComplexPoly, ComplexPoly)> {
        let (sh, st) = (self.sigma_hat[n], self.sigma_tilde[n]);
        let g = guard(sh, st)?;
        if st.norm() == 0.0 {
            return Err(Error::GuardViolation(format!("sigma_tilde_{n} = 0")));
        }
        let (uh, ut) = (&self.u_hat[n], &self.u_tilde[n]);
        let xh = uh.scale(sh).sub(&ut.scale(st)).scale(one() / g);
        let xt = uh.scale(st).sub(&ut.scale(sh)).scale(one() / g);
        Ok((xh, xt))
    }

    /// `V_{n+1} = U'_{n+1}/(n+1) = U_hat_n / (-rho_hat_n)`, for `n = 0..=top`; entry 0 is `V_0 = 0`.
    pub fn u_prime_sequence(&self) -> Result<Vec<ComplexPoly>> {
        let mut out = vec![ComplexPoly::zero()];
        for n in 0..=self.top() {
            let r = self.rho_hat[n];
            if r.norm() == 0.0 {
                return Err(Error::InvalidParameter(format!("rho_hat_{n} = 0")));
            }
            out.push(self.u_hat[n].scale(-one() / r));
        }
        Ok(out)
    }

    /// `tau_m = (rho_hat_{m-1}/rho_hat_m)(1 - rho_hat_m rho_tilde_m)` for `m >= 1`.
    pub fn y_tau(&self, m: usize) -> Result<C64> {
        if m == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let r = self.rho_hat[m];
        if r.norm() == 0.0 || self.rho_hat[m - 1].norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("rho_hat vanishes near {m}")));
        }
        Ok(self.rho_hat[m - 1] / r * (one() - r * self.rho_tilde[m]))
    }

    /// `Y'_{m+1}/(m+1) = V_{m+1} - tau_m V_m`, monic of degree `m`.
    pub fn y_prime_combination(&self, m: usize) -> Result<ComplexPoly> {
        if m > self.top() {
            return Err(Error::InvalidDegree { requested: m, actual: self.top() });
        }
        let v = self.u_prime_sequence()?;
        Ok(v[m + 1].sub(&v[m].scale(self.y_tau(m)?)))
    }
}

/// Same `V_n` as [`ParaPair::u_prime_sequence`], from
/// `V_{n+2} = (z + rho_hat_n/rho_hat_{n+1}) V_{n+1} - (rho_hat_{n-1}/rho_hat_n)(1 - rho_hat_n rho_tilde_n) z V_n`,
/// `V_0 = 0`, `V_1 = 1`. Lists are indexed from 0 with `rho[0] = -1`.
pub fn u_prime_recurrence(rho_hat: &[C64], rho_tilde: &[C64], n_max: usize) -> Result<Vec<ComplexPoly>> {
    let mut v = vec![ComplexPoly::zero(), ComplexPoly::one()];
    for n in 0..n_max {
        let (r0, r1) = (rho_hat[n], rho_hat[n + 1]);
        if r1.norm() == 0.0 || r0.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("rho_hat vanishes near {n}")));
        }
        let a = ComplexPoly::new(vec![r0 / r1, one()]);
        let next = if n == 0 {
            a.mul(&v[1])
        } else {
            let t = rho_hat[n - 1] / r0 * (one() - r0 * rho_tilde[n]);
            a.mul(&v[n + 1]).sub(&v[n].shift(1).scale(t))
        };
        v.push(next);
    }
    Ok(v)
}

/// `s_tilde = 2(rho_hat - rho_tilde)/(4 - (rho_hat + rho_tilde)^2)`, `s_hat = -(rho_hat + rho_tilde) s_tilde / 2`.
pub fn sigma_from_rho(rho_hat: C64, rho_tilde: C64) -> Result<(C64, C64)> {
    let s = rho_hat + rho_tilde;
    let den = 4.0 - s * s;
    if den.norm() <= 1e-14 {
        return Err(Error::GuardViolation("rho_hat + rho_tilde = +-2".into()));
    }
    let st = 2.0 * (rho_hat - rho_tilde) / den;
    Ok((-s * st / 2.0, st))
}

/// `-rho_hat = (s_hat^2 - s_tilde^2 + s_hat)/s_tilde`, `-rho_tilde = (s_tilde^2 - s_hat^2 + s_hat)/s_tilde`.
pub fn rho_from_sigma(sigma_hat: C64, sigma_tilde: C64) -> Result<(C64, C64)> {
    if sigma_tilde.norm() == 0.0 {
        return Err(Error::GuardViolation("sigma_tilde = 0".into()));
    }
    let d = sigma_hat * sigma_hat - sigma_tilde * sigma_tilde;
    Ok((-(d + sigma_hat) / sigma_tilde, -(sigma_hat - d) / sigma_tilde))
}

/// `s_hat = x_n0 lambda_n u_hat/(u_hat^2 - u_tilde^2)` and likewise for `s_tilde`.
pub fn sigma_from_upsilon(uh: C64, ut: C64, x_n0: C64, lambda: C64) -> Result<(C64, C64)> {
    let g = guard(uh, ut)?;
    let k = x_n0 * lambda / g;
    Ok((k * uh, k * ut))
}

/// The 2x2 polynomial matrix taking `(U_hat_n, U_tilde_n)` to level `n+1`.
pub fn szego_matrix(rho_hat: C64, rho_tilde: C64) -> [[ComplexPoly; 2]; 2] {
    [
        [ComplexPoly::one(), ComplexPoly::monomial(1, -rho_hat)],
        [ComplexPoly::constant(-rho_tilde), ComplexPoly::monomial(1, one())],
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiorthReport {
    pub passed: bool,
    /// `(m, n)` pairs outside tolerance.
    pub failures: Vec<(usize, usize)>,
    pub max_rel_error: f64,
    /// `<U_tilde_n, U_hat_n*>` per level.
    pub diagonal: Vec<C64>,
}

/// Checks `<U_tilde_m, U_hat_n*> = lambda_n delta_{mn}` and the one-sided conditions
/// `<z^k, U_hat_n*> = <U_tilde_n, z^k> = lambda_n delta_{kn}` for `k <= n`, relative to `max |lambda|`.
pub fn verify_biorthogonality(pair: &ParaPair, o: &MomentFunctional, n_max: usize, tol: f64) -> Result<BiorthReport> {
    let n_max = n_max.min(pair.top());
    let stars: Vec<ComplexPoly> = (0..=n_max).map(|n| pair.u_hat[n].star(n)).collect::<Result<_>>()?;
    let scale = pair.lambda[..=n_max].iter().map(|l| l.norm()).fold(0.0, f64::max);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut diagonal = Vec::new();
    let zero = C64::new(0.0, 0.0);
    for n in 0..=n_max {
        let lam = pair.lambda[n];
        for m in 0..=n_max {
            let v = bilinear(o, &pair.u_tilde[m], &stars[n])?;
            let want = if m == n { lam } else { zero };
            if m == n {
                diagonal.push(v);
            }
            let e = (v - want).norm() / scale;
            worst = worst.max(e);
            if e > tol {
                failures.push((m, n));
            }
        }
        for k in 0..=n {
            let zk = ComplexPoly::monomial(k, one());
            let want = if k == n { lam } else { zero };
            let a = bilinear(o, &zk, &stars[n])?;
            let b = bilinear(o, &pair.u_tilde[n], &zk)?;
            let e = (a - want).norm().max((b - want).norm()) / scale;
            worst = worst.max(e);
            if e > tol && !failures.contains(&(n, n)) {
                failures.push((n, n));
            }
        }
    }
    Ok(BiorthReport { passed: failures.is_empty(), failures, max_rel_error: worst, diagonal })
}

/// Inverts the recursion: `o_0` and reflection parameters determine the table up to `|k| <= n`.
/// `rho_hat[k-1]`, `rho_tilde[k-1]` hold the level `k` values.
pub fn moments_from_reflection(o0: C64, rho_hat: &[C64], rho_tilde: &[C64]) -> Result<OTable> {
    let n = rho_hat.len().min(rho_tilde.len());
    let mut pos = vec![o0];
    let mut neg: Vec<C64> = Vec::with_capacity(n);
    let mut pair = ParaPair::initial(o0);
    for k in 0..n {
        let (rh, rt) = (rho_hat[k], rho_tilde[k]);
        let lam = pair.lambda[k];
        let a = pair.u_hat[k].coeffs().to_vec();
        let b = pair.u_tilde[k].coeffs().to_vec();
        // rho_hat lambda = sum_j o_{k+1-j} a_j, rho_tilde lambda = sum_j o_{-(j+1)} b_j
        let mut ea = rh * lam;
        for (j, aj) in a.iter().enumerate().skip(1) {
            ea -= pos[k + 1 - j] * aj;
        }
        pos.push(ea / a[0]);
        let mut eb = rt * lam;
        for (j, bj) in b.iter().enumerate().take(k) {
            eb -= neg[j] * bj;
        }
        neg.push(eb / b[k]);
        pair.advance(rh, rt)?;
    }
    Ok(OTable::new(neg, pos))
}

/// Everything produced from one R_I seed: the continued fraction, the extracted table,
/// the Toeplitz solutions and the resulting pair.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub cfrac: CFracState,
    pub series: CorrespondenceSeries,
    pub o: OTable,
    pub functional: MomentFunctional,
    pub zohar: ZoharState,
    /// `X_n / x_n0` from the recurrence module.
    pub x_normalized: Vec<ComplexPoly>,
    pub x_hat: Vec<ComplexPoly>,
    pub x_tilde: Vec<ComplexPoly>,
    pub pair: ParaPair,
}

impl Pipeline {
    pub fn system(&self, n: usize) -> ToeplitzSystem {
        ToeplitzSystem {
            o: self.o.clone(),
            n,
            rhs: None,
            upsilon_hat: self.cfrac.upsilon_hat[n],
            upsilon_tilde: self.cfrac.upsilon_tilde[n],
            x_n0: self.cfrac.x_n0[n],
        }
    }
}

/// Runs seed, continued fraction, correspondence and Toeplitz solves for `n = 1..=n_max`.
///
/// Needs `omega` in recursive mode with at least `n_max + 2` steps and recurrence data to match.
pub fn pipeline(seq: &RISequence, omega: &OmegaSeq, n_max: usize) -> Result<Pipeline> {
    let cfrac = build_cfrac(seq, omega, n_max + 2)?;
    let series = correspondence(&cfrac, n_max)?;
    let o = OTable::from_fn(n_max, |k| series.o(k).unwrap_or_default());
    let functional = series.functional()?;
    let zohar = zohar_invert(&o, n_max)?;
    let xs = build_x(seq, omega, n_max)?;
    let x_normalized: Vec<ComplexPoly> = xs.iter().map(|x| x.scale(one() / x.coeff(0))).collect();
    let mut x_hat = vec![ComplexPoly::one()];
    let mut x_tilde = vec![ComplexPoly::one()];
    let mut sigma_hat = vec![C64::new(0.0, 0.0)];
    let mut sigma_tilde = vec![C64::new(0.0, 0.0)];
    let mut pl = Pipeline {
        cfrac,
        series,
        o,
        functional,
        zohar,
        x_normalized,
        x_hat: Vec::new(),
        x_tilde: Vec::new(),
        pair: ParaPair::initial(one()),
    };
    for n in 1..=n_max {
        let sys = pl.system(n);
        sys.check_guard()?;
        x_hat.push(ComplexPoly::new(solve_hat(&sys, &pl.zohar)?));
        x_tilde.push(ComplexPoly::new(solve_tilde(&sys, &pl.zohar)?));
        let (sh, st) = sigma_from_upsilon(sys.upsilon_hat, sys.upsilon_tilde, sys.x_n0, pl.zohar.lambdas[n])?;
        sigma_hat.push(sh);
        sigma_tilde.push(st);
    }
    pl.pair = ParaPair::build_from_x(&x_hat, &x_tilde, &sigma_hat, &sigma_tilde)?;
    pl.x_hat = x_hat;
    pl.x_tilde = x_tilde;
    Ok(pl)
}
