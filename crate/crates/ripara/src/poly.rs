//! Dense complex polynomials in ascending-power storage.

use crate::{Error, Result, C64};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Mul, Neg, Sub};

/// Relative cutoff below which a coefficient counts as zero when computing the degree.
pub const TRUNCATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        ComplexPoly::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ComplexPoly::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        ComplexPoly { coeffs: vec![c] }
    }

    /// `c * z^k`
    pub fn monomial(k: usize, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        ComplexPoly { coeffs }
    }

    /// `z - a`
    pub fn linear(a: C64) -> Self {
        ComplexPoly::new(vec![-a, C64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Index of the last coefficient above the relative cutoff; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > TRUNCATION_TOL * m)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Coefficient at `degree()`.
    pub fn leading(&self) -> C64 {
        self.degree().map(|d| self.coeffs[d]).unwrap_or_default()
    }

    /// Drops coefficients past the degree.
    pub fn trimmed(&self) -> Self {
        match self.degree() {
            Some(d) => ComplexPoly::new(self.coeffs[..=d].to_vec()),
            None => ComplexPoly::zero(),
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        ComplexPoly::new(coeffs)
    }

    pub fn conj(&self) -> Self {
        ComplexPoly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn add(&self, other: &ComplexPoly) -> Self {
        let n = self.len().max(other.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &ComplexPoly) -> Self {
        let n = self.len().max(other.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &ComplexPoly) -> Self {
        if self.is_empty() || other.is_empty() {
            return ComplexPoly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.len() <= 1 {
            return ComplexPoly::zero();
        }
        ComplexPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Synthetic division by `z - root`; returns `(quotient, remainder)`.
    pub fn divide_linear(&self, root: C64) -> (ComplexPoly, C64) {
        if self.is_empty() {
            return (ComplexPoly::zero(), C64::new(0.0, 0.0));
        }
        let n = self.len();
        let mut q = vec![C64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..n).rev() {
            acc = acc * root + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (ComplexPoly::new(q), acc)
    }

    /// `z^n * conj(p(1/conj(z)))` for an explicit degree `n`.
    pub fn star(&self, n: usize) -> Result<ComplexPoly> {
        if let Some(d) = self.degree() {
            if d > n {
                return Err(Error::InvalidDegree { requested: n, actual: d });
            }
        }
        Ok(ComplexPoly::new((0..=n).map(|k| self.coeff(n - k).conj()).collect()))
    }

    /// Coefficients reversed over `0..=n`, without conjugation.
    pub fn reversed(&self, n: usize) -> ComplexPoly {
        ComplexPoly::new((0..=n).map(|k| self.coeff(n - k)).collect())
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly::add(self, rhs)
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly::sub(self, rhs)
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly::mul(self, rhs)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for ComplexPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        Ok(ComplexPoly::new(
            j.coeffs.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        ))
    }
}

/// Largest coefficient difference divided by the largest coefficient modulus of either input.
pub fn rel_diff(a: &ComplexPoly, b: &ComplexPoly) -> f64 {
    let n = a.len().max(b.len());
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        return 0.0;
    }
    (0..n)
        .map(|k| (a.coeff(k) - b.coeff(k)).norm())
        .fold(0.0, f64::max)
        / scale
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfInversive {
    pub flag: bool,
    pub epsilon: Option<C64>,
}

/// Tests `p = eps * p^*` with `eps = a_n / conj(a_0)` and `|eps| = 1`.
pub fn is_self_inversive(p: &ComplexPoly) -> Result<SelfInversive> {
    let n = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let a0 = p.coeff(0);
    let no = SelfInversive { flag: false, epsilon: None };
    if a0.norm() <= TRUNCATION_TOL * p.max_abs() {
        return Ok(no);
    }
    let eps = p.coeff(n) / a0.conj();
    if (eps.norm() - 1.0).abs() >= 1e-10 {
        return Ok(no);
    }
    let tol = 1e-10 * p.max_abs();
    let ok = (0..=n).all(|k| (p.coeff(k) - eps * p.coeff(n - k).conj()).norm() < tol);
    Ok(if ok {
        SelfInversive { flag: true, epsilon: Some(eps) }
    } else {
        no
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootReport {
    pub roots: Vec<C64>,
    pub residuals: Vec<f64>,
    pub multiplicity_flags: Vec<bool>,
}

impl RootReport {
    /// Smallest pairwise distance between roots.
    pub fn min_separation(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                m = m.min((self.roots[i] - self.roots[j]).norm());
            }
        }
        m
    }

    /// Largest `||z| - 1|` over the roots.
    pub fn max_unit_deviation(&self) -> f64 {
        self.roots
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

const MAX_ITER: usize = 500;

/// All roots by Aberth-Ehrlich simultaneous iteration.
pub fn roots(p: &ComplexPoly) -> Result<RootReport> {
    let p = p.trimmed();
    let n = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::InvalidInput("degree must be at least 1".into())),
    };
    let lead = p.coeff(n);
    let monic = p.scale(lead.inv());
    let dp = monic.derivative();

    // Cauchy bound
    let radius = 1.0 + (0..n).map(|k| monic.coeff(k).norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4 + 0.1 * 2f64.sqrt();
            C64::from_polar(radius, theta)
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let pv = monic.eval(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval(z[i]);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }

    let scale = p.max_abs();
    let residuals: Vec<f64> = z.iter().map(|&r| p.eval(r).norm()).collect();
    let res_ok = residuals.iter().all(|&r| r < 1e-8 * scale);
    if !converged && !res_ok {
        return Err(Error::RootFindFailure { iterations: MAX_ITER, best: z });
    }
    let multiplicity_flags = (0..n)
        .map(|i| (0..n).any(|j| j != i && (z[i] - z[j]).norm() < 1e-6))
        .collect();
    Ok(RootReport { roots: z, residuals, multiplicity_flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn star_examples() {
        let p = ComplexPoly::new(vec![c(0.0, 1.0), c(2.0, 0.0)]);
        assert_eq!(p.star(1).unwrap(), ComplexPoly::new(vec![c(2.0, 0.0), c(0.0, -1.0)]));
        let q = ComplexPoly::from_real(&[1.0, 1.0]);
        assert_eq!(q.star(1).unwrap(), q);
        let z2 = ComplexPoly::monomial(2, c(1.0, 0.0));
        assert_eq!(z2.star(2).unwrap().trimmed(), ComplexPoly::one());
        assert!(matches!(z2.star(1), Err(Error::InvalidDegree { .. })));
    }

    #[test]
    fn self_inversive_examples() {
        let r = is_self_inversive(&ComplexPoly::from_real(&[1.0, 1.0])).unwrap();
        assert!(r.flag);
        assert!((r.epsilon.unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(!is_self_inversive(&ComplexPoly::monomial(1, c(1.0, 0.0))).unwrap().flag);
        let a = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let r = is_self_inversive(&ComplexPoly::new(vec![a, c(1.0, 0.0)])).unwrap();
        assert!(r.flag);
        assert!((r.epsilon.unwrap() - a).norm() < 1e-14);
        assert!(is_self_inversive(&ComplexPoly::zero()).is_err());
    }

    #[test]
    fn roots_small() {
        let r = roots(&ComplexPoly::from_real(&[-1.0, 0.0, 1.0])).unwrap();
        let mut re: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
        let r = roots(&ComplexPoly::from_real(&[1.0, 1.0])).unwrap();
        assert!((r.roots[0] + 1.0).norm() < 1e-12);
        assert!(roots(&ComplexPoly::one()).is_err());
    }

    #[test]
    fn arithmetic() {
        let (q, r) = ComplexPoly::from_real(&[-1.0, 0.0, 1.0]).divide_linear(c(1.0, 0.0));
        assert_eq!(q, ComplexPoly::from_real(&[1.0, 1.0]));
        assert_eq!(r, c(0.0, 0.0));
        let d = ComplexPoly::monomial(3, c(1.0, 0.0)).derivative();
        assert_eq!(d, ComplexPoly::from_real(&[0.0, 0.0, 3.0]));
        let m = ComplexPoly::from_real(&[1.0, 1.0]).mul(&ComplexPoly::from_real(&[1.0, -1.0]));
        assert_eq!(m, ComplexPoly::from_real(&[1.0, 0.0, -1.0]));
    }

    #[test]
    fn json_shape() {
        let p = ComplexPoly::new(vec![c(1.0, 2.0), c(3.0, -4.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"coeffs":[[1.0,2.0],[3.0,-4.0]]}"#);
        let back: ComplexPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
