//! Non-Hermitian Toeplitz systems with entry `(r, c) = o_{r-c}`, solved through the
//! order-recursive Trench-Zohar scheme. A dense elimination oracle lives in [`dense`].

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Two-sided table `o_k`: `pos[k] = o_k` for `k >= 0`, `neg[k-1] = o_{-k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OTable {
    #[serde(rename = "o_neg")]
    pub neg: Vec<C64>,
    #[serde(rename = "o_pos")]
    pub pos: Vec<C64>,
}

impl OTable {
    pub fn new(neg: Vec<C64>, pos: Vec<C64>) -> Self {
        OTable { neg, pos }
    }

    pub fn from_fn(depth: usize, f: impl Fn(i64) -> C64) -> Self {
        OTable {
            neg: (1..=depth as i64).map(|k| f(-k)).collect(),
            pos: (0..=depth as i64).map(&f).collect(),
        }
    }

    pub fn get(&self, k: i64) -> Result<C64> {
        let v = if k >= 0 { self.pos.get(k as usize) } else { self.neg.get((-k - 1) as usize) };
        v.copied().ok_or(Error::MomentDepthExceeded { index: k, depth: self.depth() })
    }

    pub fn depth(&self) -> usize {
        self.neg.len().min(self.pos.len().saturating_sub(1))
    }

    /// Dense `(n+1) x (n+1)` matrix.
    pub fn matrix(&self, n: usize) -> Result<Vec<Vec<C64>>> {
        (0..=n)
            .map(|r| (0..=n).map(|c| self.get(r as i64 - c as i64)).collect())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsKind {
    Hat,
    Tilde,
}

/// System of size `n + 1` whose solution gives the coefficients of a degree `n` polynomial.
///
/// Right-hand sides: hat = `(upsilon_hat, 0, .., 0, -upsilon_tilde)/x_n0`,
/// tilde = `(upsilon_tilde, 0, .., 0, -upsilon_hat)/x_n0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzSystem {
    #[serde(flatten)]
    pub o: OTable,
    pub n: usize,
    #[serde(default)]
    pub rhs: Option<RhsKind>,
    pub upsilon_hat: C64,
    pub upsilon_tilde: C64,
    pub x_n0: C64,
}

impl ToeplitzSystem {
    pub fn rhs_vector(&self, kind: RhsKind) -> Vec<C64> {
        let (first, last) = match kind {
            RhsKind::Hat => (self.upsilon_hat, self.upsilon_tilde),
            RhsKind::Tilde => (self.upsilon_tilde, self.upsilon_hat),
        };
        let mut b = vec![C64::new(0.0, 0.0); self.n + 1];
        b[0] += first / self.x_n0;
        b[self.n] -= last / self.x_n0;
        b
    }

    /// Rejects `upsilon_hat^2 - upsilon_tilde^2 = 0` (relative 1e-12).
    pub fn check_guard(&self) -> Result<C64> {
        guard(self.upsilon_hat, self.upsilon_tilde)
    }
}

/// `uh^2 - ut^2`, or `GuardViolation` when it vanishes relative to `|uh|^2 + |ut|^2`.
pub fn guard(uh: C64, ut: C64) -> Result<C64> {
    let g = uh * uh - ut * ut;
    if g.norm() <= 1e-12 * (uh.norm_sqr() + ut.norm_sqr()) {
        return Err(Error::GuardViolation(format!("{uh}^2 - {ut}^2 vanishes")));
    }
    Ok(g)
}

/// Trench-Zohar recursion state up to order `n`.
///
/// At level `k` the vectors satisfy `T_k a = lambda_k e_0` and `T_k b = lambda_k e_k` with
/// `a_0 = b_k = 1`. In the block notation, the column border is `chi_hat_i = a_i` and the
/// row border is `chi_tilde_j = b_{k-j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoharState {
    pub a: Vec<Vec<C64>>,
    pub b: Vec<Vec<C64>>,
    /// `lambda_0 = o_0`, then `lambda_k = det T_k / det T_{k-1}`.
    pub lambdas: Vec<C64>,
    /// `rho_hat[k]`, `rho_tilde[k]` for `k = 1..=n` at index `k - 1`.
    pub rho_hat: Vec<C64>,
    pub rho_tilde: Vec<C64>,
}

impl ZoharState {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn lambda(&self) -> C64 {
        self.lambdas[self.order()]
    }

    /// Column border `chi_hat` (entries 1..=n of the first column of the inverse times lambda).
    pub fn chi_hat(&self) -> Vec<C64> {
        self.a[self.order()][1..].to_vec()
    }

    /// Row border `chi_tilde` (entries 1..=n of the first row of the inverse times lambda).
    pub fn chi_tilde(&self) -> Vec<C64> {
        let b = &self.b[self.order()];
        let n = b.len() - 1;
        (1..=n).map(|j| b[n - j]).collect()
    }

    /// Inverse of `T_n` assembled level by level from
    /// `T_{k+1}^{-1} = (1/lambda) [[1, chi_tilde], [chi_hat, lambda T_k^{-1} + chi_hat chi_tilde]]`.
    pub fn inverse(&self) -> Vec<Vec<C64>> {
        let mut inv = vec![vec![C64::new(1.0, 0.0) / self.lambdas[0]]];
        for k in 1..=self.order() {
            let lam = self.lambdas[k];
            let a = &self.a[k];
            let b = &self.b[k];
            let mut next = vec![vec![C64::new(0.0, 0.0); k + 1]; k + 1];
            next[0][0] = C64::new(1.0, 0.0) / lam;
            for j in 1..=k {
                next[0][j] = b[k - j] / lam;
                next[j][0] = a[j] / lam;
            }
            for i in 1..=k {
                for j in 1..=k {
                    next[i][j] = inv[i - 1][j - 1] + a[i] * b[k - j] / lam;
                }
            }
            inv = next;
        }
        inv
    }
}

/// Runs the recursion to order `n`.
pub fn zohar_invert(o: &OTable, n: usize) -> Result<ZoharState> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let o0 = o.get(0)?;
    let scale = (0..=n as i64)
        .map(|k| Ok(o.get(k)?.norm().max(o.get(-k)?.norm())))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if o0.norm() <= 1e-14 * scale {
        return Err(Error::MinorBreakdown(0));
    }
    let mut st = ZoharState {
        a: vec![vec![one]],
        b: vec![vec![one]],
        lambdas: vec![o0],
        rho_hat: Vec::new(),
        rho_tilde: Vec::new(),
    };
    for k in 0..n {
        let a = &st.a[k];
        let b = &st.b[k];
        let lam = st.lambdas[k];
        let mut ea = zero;
        let mut eb = zero;
        for j in 0..=k {
            ea += o.get((k + 1 - j) as i64)? * a[j];
            eb += o.get(-(j as i64) - 1)? * b[j];
        }
        let rh = ea / lam;
        let rt = eb / lam;
        let mut a2 = a.clone();
        a2.push(zero);
        let mut b2 = vec![zero];
        b2.extend_from_slice(b);
        let na: Vec<C64> = a2.iter().zip(&b2).map(|(x, y)| x - rh * y).collect();
        let nb: Vec<C64> = b2.iter().zip(&a2).map(|(y, x)| y - rt * x).collect();
        let nl = lam * (one - rh * rt);
        if nl.norm() <= 1e-14 * scale {
            return Err(Error::MinorBreakdown(k + 1));
        }
        st.a.push(na);
        st.b.push(nb);
        st.lambdas.push(nl);
        st.rho_hat.push(rh);
        st.rho_tilde.push(rt);
    }
    Ok(st)
}

fn combine(st: &ZoharState, n: usize, first: C64, last: C64, x_n0: C64) -> Vec<C64> {
    let lam = st.lambdas[n];
    let a = &st.a[n];
    let b = &st.b[n];
    (0..=n).map(|i| (a[i] * first - b[i] * last) / (x_n0 * lam)).collect()
}

/// Uses level `sys.n` of the state, so one recursion serves every smaller system.
///
/// `x_hat_i = (chi_hat_i upsilon_hat - chi_tilde_{n-i} upsilon_tilde)/(x_n0 lambda_n)`.
pub fn solve_hat(sys: &ToeplitzSystem, st: &ZoharState) -> Result<Vec<C64>> {
    check_order(sys, st)?;
    Ok(combine(st, sys.n, sys.upsilon_hat, sys.upsilon_tilde, sys.x_n0))
}

/// `x_tilde_i = (chi_hat_i upsilon_tilde - chi_tilde_{n-i} upsilon_hat)/(x_n0 lambda_n)`.
pub fn solve_tilde(sys: &ToeplitzSystem, st: &ZoharState) -> Result<Vec<C64>> {
    check_order(sys, st)?;
    Ok(combine(st, sys.n, sys.upsilon_tilde, sys.upsilon_hat, sys.x_n0))
}

fn check_order(sys: &ToeplitzSystem, st: &ZoharState) -> Result<()> {
    if sys.n > st.order() {
        return Err(Error::InvalidInput(format!("state order {} below system {}", st.order(), sys.n)));
    }
    if sys.x_n0.norm() == 0.0 {
        return Err(Error::InvalidInput("x_n0 vanishes".into()));
    }
    Ok(())
}

/// Solves `T_n x = rhs` through the assembled inverse.
pub fn solve_general(st: &ZoharState, rhs: &[C64]) -> Result<Vec<C64>> {
    if rhs.len() != st.order() + 1 {
        return Err(Error::InvalidInput("right-hand side length mismatch".into()));
    }
    Ok(dense::mat_vec(&st.inverse(), rhs))
}

/// Partial-pivot Gaussian elimination reference.
pub mod dense {
    use crate::{Error, Result, C64};

    pub type Matrix = Vec<Vec<C64>>;

    pub fn mat_vec(a: &Matrix, x: &[C64]) -> Vec<C64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
        let m = b.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| {
                (0..m)
                    .map(|j| row.iter().enumerate().map(|(k, v)| v * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    /// LU factors with row permutation; returns `(lu, perm, sign)`.
    fn lu(a: &Matrix) -> Result<(Matrix, Vec<usize>, f64)> {
        let n = a.len();
        let mut m = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
                .unwrap_or(k);
            if m[p][k].norm() <= 1e-18 * scale {
                return Err(Error::MinorBreakdown(k));
            }
            if p != k {
                m.swap(p, k);
                perm.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                m[i][k] = f;
                for j in k + 1..n {
                    let t = m[k][j];
                    m[i][j] -= f * t;
                }
            }
        }
        Ok((m, perm, sign))
    }

    fn lu_solve(lu: &Matrix, perm: &[usize], b: &[C64]) -> Vec<C64> {
        let n = lu.len();
        let mut y: Vec<C64> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = y[j];
                y[i] -= lu[i][j] * t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = y[j];
                y[i] -= lu[i][j] * t;
            }
            y[i] /= lu[i][i];
        }
        y
    }

    pub fn solve(a: &Matrix, b: &[C64]) -> Result<Vec<C64>> {
        let (m, perm, _) = lu(a)?;
        Ok(lu_solve(&m, &perm, b))
    }

    pub fn det(a: &Matrix) -> C64 {
        match lu(a) {
            Ok((m, _, sign)) => (0..a.len()).fold(C64::new(sign, 0.0), |acc, i| acc * m[i][i]),
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn inverse(a: &Matrix) -> Result<Matrix> {
        let n = a.len();
        let (m, perm, _) = lu(a)?;
        let cols: Vec<Vec<C64>> = (0..n)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                lu_solve(&m, &perm, &e)
            })
            .collect();
        Ok((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
    }

    /// Largest entry difference over largest entry of `b`.
    pub fn max_rel_diff(a: &Matrix, b: &Matrix) -> f64 {
        let s = b.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        let d = a
            .iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        d / s.max(1e-300)
    }
}
