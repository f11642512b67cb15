use proptest::prelude::*;
use ripara::poly::{is_self_inversive, rel_diff, roots};
use ripara::{c, ComplexPoly, Error, C64};

fn cplx() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn poly(max_len: usize) -> impl Strategy<Value = ComplexPoly> {
    prop::collection::vec(cplx(), 1..max_len).prop_map(ComplexPoly::new)
}

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
    let s = is_self_inversive(&ComplexPoly::from_real(&[1.0, 1.0])).unwrap();
    assert!(s.flag);
    assert!((s.epsilon.unwrap() - 1.0).norm() < 1e-15);
    assert!(!is_self_inversive(&ComplexPoly::monomial(1, c(1.0, 0.0))).unwrap().flag);
    let a = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let s = is_self_inversive(&ComplexPoly::new(vec![a, c(1.0, 0.0)])).unwrap();
    assert!(s.flag);
    // a_1 = eps conj(a_0) gives eps = 1/conj(a) = a
    assert!((s.epsilon.unwrap() - a).norm() < 1e-14);
    assert!(is_self_inversive(&ComplexPoly::zero()).is_err());
}

#[test]
fn arithmetic_examples() {
    let p = ComplexPoly::from_real(&[-1.0, 0.0, 1.0]);
    let (q, r) = p.divide_linear(c(1.0, 0.0));
    assert_eq!(q, ComplexPoly::from_real(&[1.0, 1.0]));
    assert_eq!(r, c(0.0, 0.0));
    assert_eq!(ComplexPoly::monomial(3, c(1.0, 0.0)).derivative(), ComplexPoly::monomial(2, c(3.0, 0.0)));
    let m = ComplexPoly::from_real(&[1.0, 1.0]).mul(&ComplexPoly::from_real(&[1.0, -1.0]));
    assert_eq!(m, ComplexPoly::from_real(&[1.0, 0.0, -1.0]));
}

#[test]
fn root_examples() {
    let r = roots(&ComplexPoly::from_real(&[-1.0, 0.0, 1.0])).unwrap();
    let mut re: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
    let r = roots(&ComplexPoly::from_real(&[1.0, 1.0])).unwrap();
    assert!((r.roots[0] + 1.0).norm() < 1e-14);
    assert!(roots(&ComplexPoly::one()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horner_matches_power_sum(p in poly(8), z in cplx()) {
        let naive: C64 = p.coeffs().iter().enumerate().map(|(k, a)| a * z.powi(k as i32)).sum();
        let h = p.eval(z);
        let scale = p.coeffs().iter().enumerate().map(|(k, a)| a.norm() * z.norm().powi(k as i32)).sum::<f64>();
        prop_assert!((h - naive).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn star_is_involution(mut v in prop::collection::vec(cplx(), 1..8)) {
        v[0] += c(3.0, 0.0);
        let p = ComplexPoly::new(v);
        let n = p.len() - 1;
        prop_assert!(rel_diff(&p.star(n).unwrap().star(n).unwrap(), &p) < 1e-15);
    }

    #[test]
    fn star_is_multiplicative(p in poly(6), q in poly(6)) {
        let (np, nq) = (p.len() - 1, q.len() - 1);
        let lhs = p.mul(&q).star(np + nq).unwrap();
        let rhs = p.star(np).unwrap().mul(&q.star(nq).unwrap());
        prop_assert!(rel_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn divide_linear_round_trip(p in poly(9), a in cplx()) {
        let (q, r) = p.divide_linear(a);
        let back = q.mul(&ComplexPoly::linear(a)).add(&ComplexPoly::constant(r));
        prop_assert!(rel_diff(&back, &p) < 1e-12);
    }

    #[test]
    fn self_inversive_products_have_inverted_roots(
        pts in prop::collection::vec((0.3..0.9f64, 0.0..6.28f64), 1..4),
        on_circle in prop::collection::vec(0.0..6.28f64, 0..3),
    ) {
        // (z - a)(conj(a) z - 1) is self-inversive; so are (z - e^{it}) factors
        let mut p = ComplexPoly::one();
        for (r, t) in &pts {
            let a = C64::from_polar(*r, *t);
            p = p.mul(&ComplexPoly::linear(a)).mul(&ComplexPoly::new(vec![c(-1.0, 0.0), a.conj()]));
        }
        for t in &on_circle {
            p = p.mul(&ComplexPoly::linear(C64::from_polar(1.0, *t)));
        }
        prop_assert!(is_self_inversive(&p).unwrap().flag);
        let rep = roots(&p).unwrap();
        for z in &rep.roots {
            let image = z.conj().inv();
            let nearest = rep.roots.iter().map(|w| (w - image).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-6, "{z} has no partner");
        }
    }
}
