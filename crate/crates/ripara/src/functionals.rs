//! Moment functionals on Laurent polynomials and the orthogonality checks built on them.

use crate::poly::ComplexPoly;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Linear functional given by a two-sided moment table.
///
/// `pos[k-1]` is the value at `z^{-k}`, `neg[k-1]` the value at `z^{k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFunctional {
    pub neg: Vec<C64>,
    pub at_one: C64,
    pub pos: Vec<C64>,
    #[serde(rename = "hermitian")]
    pub hermitian_flag: bool,
}

impl MomentFunctional {
    pub fn new(neg: Vec<C64>, at_one: C64, pos: Vec<C64>) -> Self {
        MomentFunctional { neg, at_one, pos, hermitian_flag: false }
    }

    /// Hermitian table from `u_0` and `u_k = L(z^{-k})`; the positive powers are conjugates.
    pub fn hermitian(at_one: C64, pos: Vec<C64>) -> Self {
        let neg = pos.iter().map(|u| u.conj()).collect();
        MomentFunctional { neg, at_one, pos, hermitian_flag: true }
    }

    /// Builds from a closure `k -> value at z^k` over `-depth..=depth`.
    pub fn from_fn(depth: usize, f: impl Fn(i64) -> C64) -> Self {
        MomentFunctional::new(
            (1..=depth as i64).map(&f).collect(),
            f(0),
            (1..=depth as i64).map(|k| f(-k)).collect(),
        )
    }

    /// Value at `z^k`.
    pub fn moment(&self, k: i64) -> Result<C64> {
        let depth = self.depth();
        let v = if k == 0 {
            Some(self.at_one)
        } else if k < 0 {
            self.pos.get((-k - 1) as usize).copied()
        } else {
            self.neg.get((k - 1) as usize).copied()
        };
        v.ok_or(Error::MomentDepthExceeded { index: k, depth })
    }

    /// `u_n = L(z^{-n})`.
    pub fn u(&self, n: i64) -> Result<C64> {
        self.moment(-n)
    }

    pub fn depth(&self) -> usize {
        self.pos.len().min(self.neg.len())
    }

    /// Largest modulus in the table.
    pub fn scale(&self) -> f64 {
        self.pos
            .iter()
            .chain(self.neg.iter())
            .map(|c| c.norm())
            .fold(self.at_one.norm(), f64::max)
    }

    /// Functional applied to `z^shift * p(z)`.
    pub fn apply_shifted(&self, p: &ComplexPoly, shift: i64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &c) in p.coeffs().iter().enumerate() {
            if c != C64::new(0.0, 0.0) {
                acc += c * self.moment(j as i64 + shift)?;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, q: &Laurent) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (i, &c) in q.coeffs.iter().enumerate() {
            if c != C64::new(0.0, 0.0) {
                acc += c * self.moment(q.low + i as i64)?;
            }
        }
        Ok(acc)
    }
}

/// Laurent polynomial `sum_i coeffs[i] z^{low+i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub low: i64,
    pub coeffs: Vec<C64>,
}

impl Laurent {
    pub fn new(low: i64, coeffs: Vec<C64>) -> Self {
        Laurent { low, coeffs }
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Laurent { low: k, coeffs: vec![c] }
    }

    pub fn from_poly(p: &ComplexPoly, shift: i64) -> Self {
        Laurent { low: shift, coeffs: p.coeffs().to_vec() }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = (self.low + self.coeffs.len() as i64).max(other.low + other.coeffs.len() as i64);
        let mut coeffs = vec![C64::new(0.0, 0.0); (high - low) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.low - low) as usize + i] += c;
        }
        Laurent { low, coeffs }
    }

    /// Coefficient conjugation combined with `z -> 1/z`.
    pub fn conj_reciprocal(&self) -> Laurent {
        let n = self.coeffs.len() as i64;
        Laurent {
            low: -(self.low + n - 1),
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }
}

/// Parameters of `scale_lambda (z - zeta) N = (z - alpha) L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub scale_lambda: C64,
    pub zeta: C64,
    pub alpha: C64,
    pub e: C64,
}

impl TransformParams {
    pub fn new(scale_lambda: C64, zeta: C64, alpha: C64) -> Result<Self> {
        if scale_lambda.norm() == 0.0 {
            return Err(Error::InvalidParameters("lambda must be nonzero".into()));
        }
        if (scale_lambda - 1.0).norm() < 1e-14 {
            return Err(Error::InvalidParameters("lambda = 1 leaves e undefined".into()));
        }
        if (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameters("|alpha| must be 1".into()));
        }
        let e = (zeta - alpha) / (C64::new(1.0, 0.0) - scale_lambda);
        Ok(TransformParams { scale_lambda, zeta, alpha, e })
    }
}

/// Moments of `N` from the functional equation, `nu_0 = 1`, to `depth` on both sides.
///
/// The two recursions read `lambda (N(z^{k+1}) - zeta N(z^k)) = L(z^{k+1}) - alpha L(z^k)`
/// stepping up and down from `z^0`.
pub fn moments_of_n(l: &MomentFunctional, p: &TransformParams, depth: usize) -> Result<MomentFunctional> {
    if depth > 0 && p.zeta.norm() == 0.0 {
        return Err(Error::DivisionByZeta);
    }
    let lam = p.scale_lambda;
    let one = C64::new(1.0, 0.0);
    let mut up = Vec::with_capacity(depth);
    let mut prev = one;
    for k in 0..depth as i64 {
        let next = p.zeta * prev + (l.moment(k + 1)? - p.alpha * l.moment(k)?) / lam;
        up.push(next);
        prev = next;
    }
    let mut down = Vec::with_capacity(depth);
    let mut prev = one;
    for k in 0..depth as i64 {
        // N(z^{-k}) - zeta N(z^{-k-1}) = (L(z^{-k}) - alpha L(z^{-k-1})) / lambda
        let next = (prev - (l.moment(-k)? - p.alpha * l.moment(-k - 1)?) / lam) / p.zeta;
        down.push(next);
        prev = next;
    }
    Ok(MomentFunctional::new(up, one, down))
}

/// Moments of `M = delta_zeta - e (z - zeta)^{-1} L` to `depth` on both sides.
pub fn moments_of_m(l: &MomentFunctional, p: &TransformParams, depth: usize) -> Result<MomentFunctional> {
    if depth > 0 && p.zeta.norm() == 0.0 {
        return Err(Error::DivisionByZeta);
    }
    let z = p.zeta;
    let mut up = Vec::with_capacity(depth);
    // running sum_{j=0}^{k} zeta^{k-j} L(z^j)
    let mut s = C64::new(0.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    for k in 0..depth as i64 {
        s = s * z + l.moment(k)?;
        zp *= z;
        up.push(zp - p.e * s);
    }
    let mut down = Vec::with_capacity(depth);
    let zi = z.inv();
    // running sum_{m=0}^{j-1} zeta^m L(z^{-m-1})
    let mut t = C64::new(0.0, 0.0);
    let mut zm = C64::new(1.0, 0.0);
    let mut zneg = C64::new(1.0, 0.0);
    for j in 1..=depth as i64 {
        t += zm * l.moment(-j)?;
        zm *= z;
        zneg *= zi;
        down.push(zneg * (1.0 + p.e * t));
    }
    Ok(MomentFunctional::new(up, C64::new(1.0, 0.0), down))
}

/// `<P, Q>_O = O(P(z) conj(Q)(1/z))`.
pub fn bilinear(o: &MomentFunctional, p: &ComplexPoly, q: &ComplexPoly) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (a, pa) in p.coeffs().iter().enumerate() {
        for (b, qb) in q.coeffs().iter().enumerate() {
            if *pa != C64::new(0.0, 0.0) && *qb != C64::new(0.0, 0.0) {
                acc += pa * qb.conj() * o.moment(a as i64 - b as i64)?;
            }
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParaReport {
    pub n: usize,
    /// `<X_n, z^k>_O` for `k = 0..=n`.
    pub values: Vec<C64>,
    /// Per-row scale `sum_j |x_j| |o_{k-j}|` used for the relative thresholds.
    pub scales: Vec<f64>,
    pub passed: bool,
}

/// Checks the para-orthogonality profile of each `X_n`: nonzero at `k = 0` and `k = n`,
/// zero for `1 <= k < n`.
///
/// "Zero" is `|value| < zero_tol * scale`, "nonzero" is `|value| > nonzero_tol * scale` where
/// scale is the row sum `sum_j |x_j| |o_{k-j}|`. A value between the two thresholds is
/// reported as `IndeterminateOrthogonality`.
pub fn verify_para_orthogonal(
    o: &MomentFunctional,
    xs: &[ComplexPoly],
    zero_tol: f64,
    nonzero_tol: f64,
) -> Result<Vec<ParaReport>> {
    let mut out = Vec::with_capacity(xs.len());
    for (n, x) in xs.iter().enumerate() {
        let mut values = Vec::with_capacity(n + 1);
        let mut scales = Vec::with_capacity(n + 1);
        let mut passed = true;
        for k in 0..=n {
            // <X, z^k> = sum_j x_j o_{j-k}
            let mut v = C64::new(0.0, 0.0);
            let mut s = 0.0;
            for (j, xj) in x.coeffs().iter().enumerate() {
                let m = o.moment(j as i64 - k as i64)?;
                v += xj * m;
                s += xj.norm() * m.norm();
            }
            let s = if s == 0.0 { 1.0 } else { s };
            let want_zero = k > 0 && k < n;
            let zero = v.norm() < zero_tol * s;
            let nonzero = v.norm() > nonzero_tol * s;
            if !zero && !nonzero {
                return Err(Error::IndeterminateOrthogonality { n, k });
            }
            if want_zero != zero {
                passed = false;
            }
            values.push(v);
            scales.push(s);
        }
        out.push(ParaReport { n, values, scales, passed });
    }
    Ok(out)
}

/// True iff `M(z^{-j} X_{n+1}) = 0` for `j = 0..=n` and all `n < n_max`, relative to 1e-9.
///
/// `xs[k]` is `X_k`; `xs[0]` is not tested.
pub fn verify_m_orthogonality(m: &MomentFunctional, xs: &[ComplexPoly], n_max: usize) -> Result<bool> {
    for n in 0..n_max.min(xs.len().saturating_sub(1)) {
        let x = &xs[n + 1];
        for j in 0..=n as i64 {
            let mut v = C64::new(0.0, 0.0);
            let mut s = 0.0;
            for (i, c) in x.coeffs().iter().enumerate() {
                let mm = m.moment(i as i64 - j)?;
                v += c * mm;
                s += c.norm() * mm.norm();
            }
            if v.norm() > 1e-9 * s.max(1e-300) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub passed: bool,
    pub max_rel_residual: f64,
    pub first_failure: Option<i64>,
}

/// Checks `e(L(z^{k+1}) - alpha L(z^k)) = e lambda (N(z^{k+1}) - zeta N(z^k))
/// = -M(z^{k+2}) + (zeta + alpha) M(z^{k+1}) - zeta alpha M(z^k)` for `k` in `-depth..=depth`.
pub fn verify_functional_relation(
    l: &MomentFunctional,
    n: &MomentFunctional,
    m: &MomentFunctional,
    p: &TransformParams,
    depth: usize,
) -> Result<RelationReport> {
    let mut worst: f64 = 0.0;
    let mut first_failure = None;
    for k in -(depth as i64)..=depth as i64 {
        let a = p.e * (l.moment(k + 1)? - p.alpha * l.moment(k)?);
        let b = p.e * p.scale_lambda * (n.moment(k + 1)? - p.zeta * n.moment(k)?);
        let mk2 = m.moment(k + 2)?;
        let mk1 = m.moment(k + 1)?;
        let mk = m.moment(k)?;
        let c = -mk2 + (p.zeta + p.alpha) * mk1 - p.zeta * p.alpha * mk;
        let scale = [a.norm(), b.norm(), mk2.norm(), mk1.norm() * 2.0, mk.norm(), 1.0]
            .into_iter()
            .fold(0.0, f64::max);
        let r = ((a - b).norm().max((a - c).norm())) / scale;
        if r > 1e-10 && first_failure.is_none() {
            first_failure = Some(k);
        }
        worst = worst.max(r);
    }
    Ok(RelationReport { passed: first_failure.is_none(), max_rel_residual: worst, first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn sample_l() -> MomentFunctional {
        MomentFunctional::hermitian(c(1.0, 0.0), vec![c(0.3, 0.0), c(0.1, 0.2), c(-0.2, 0.05), c(0.07, -0.1)])
    }

    #[test]
    fn apply_examples() {
        let l = sample_l();
        assert_eq!(l.apply(&Laurent::monomial(0, c(1.0, 0.0))).unwrap(), c(1.0, 0.0));
        assert_eq!(l.apply(&Laurent::monomial(-2, c(3.0, 0.0))).unwrap(), 3.0 * l.u(2).unwrap());
        let q = Laurent::new(-1, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let u1 = l.u(1).unwrap();
        assert_eq!(l.apply(&q).unwrap(), u1 + u1.conj());
        assert!(matches!(l.moment(9), Err(Error::MomentDepthExceeded { .. })));
    }

    #[test]
    fn n_moments_example() {
        let l = sample_l();
        let p = TransformParams::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let n = moments_of_n(&l, &p, 3).unwrap();
        assert!((n.moment(1).unwrap() - c(0.65, 0.0)).norm() < 1e-15);
        assert_eq!(n.moment(0).unwrap(), c(1.0, 0.0));
        assert!(!n.hermitian_flag);
        assert!(TransformParams::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn m_moments_examples() {
        let l = sample_l();
        let zeta = c(0.7, 0.4);
        let p = TransformParams::new(c(2.0, 1.0), zeta, c(0.0, 1.0)).unwrap();
        let m = moments_of_m(&l, &p, 3).unwrap();
        assert_eq!(m.moment(0).unwrap(), c(1.0, 0.0));
        assert!((m.moment(1).unwrap() - (zeta - p.e)).norm() < 1e-15);
        let want = zeta.inv() + p.e * zeta.inv() * l.u(1).unwrap();
        assert!((m.moment(-1).unwrap() - want).norm() < 1e-14);
        let zero = TransformParams::new(c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(moments_of_m(&l, &zero, 2), Err(Error::DivisionByZeta));
    }

    #[test]
    fn relation_trivial_case() {
        let l = MomentFunctional::hermitian(c(1.0, 0.0), vec![c(0.0, 0.0); 6]);
        let p = TransformParams::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let n = moments_of_n(&l, &p, 5).unwrap();
        let m = moments_of_m(&l, &p, 5).unwrap();
        assert!(verify_functional_relation(&l, &n, &m, &p, 3).unwrap().passed);
    }

    #[test]
    fn bilinear_examples() {
        let o = MomentFunctional::from_fn(3, |k| c(0.1 * k as f64, 0.05 * k as f64) + if k == 0 { 1.0 } else { 0.0 });
        let one = ComplexPoly::one();
        assert_eq!(bilinear(&o, &one, &one).unwrap(), c(1.0, 0.0));
        let z = ComplexPoly::monomial(1, c(1.0, 0.0));
        let z2 = ComplexPoly::monomial(2, c(1.0, 0.0));
        assert_eq!(bilinear(&o, &z2, &z).unwrap(), o.moment(1).unwrap());
        assert_eq!(bilinear(&o, &z.scale(c(2.0, 0.0)), &z).unwrap(), 2.0 * o.moment(0).unwrap());
    }

    #[test]
    fn para_profile_trivial_and_failing() {
        let o = MomentFunctional::from_fn(4, |k| if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let r = verify_para_orthogonal(&o, &[ComplexPoly::one()], 1e-8, 1e-6).unwrap();
        assert!(r[0].passed);
        // identity moments: <z^2, 1> = o_2 = 0, so the k = 0 condition fails
        let xs = vec![ComplexPoly::one(), ComplexPoly::monomial(1, c(1.0, 0.0)), ComplexPoly::monomial(2, c(1.0, 0.0))];
        let r = verify_para_orthogonal(&o, &xs, 1e-8, 1e-6).unwrap();
        assert!(!r[2].passed);
    }
}
