mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ripara::hyper::*;
use ripara::paraorth::ParaPair;
use ripara::poly::{is_self_inversive, rel_diff, roots};
use ripara::recurrence::RISequence;
use ripara::selfinv::*;
use ripara::{c, ComplexPoly, Error, C64};

const LAMS: [f64; 3] = [0.5, 1.0, 2.0];
const ETAS: [f64; 3] = [0.0, 0.5, 1.0];

fn one() -> C64 {
    c(1.0, 0.0)
}

#[test]
fn rho_examples() {
    let real = DiskSeq::new(vec![c(0.3, 0.0), c(-0.5, 0.0), c(0.1, 0.0)]).unwrap();
    let (rh, _) = rho_from_beta(&real, 2, -one()).unwrap();
    assert!(rh.iter().all(|r| (r + 1.0).norm() < 1e-15));
    let f = HyperFamily::new(1.0, 0.0).unwrap();
    assert!((f.beta(0) + 0.5).norm() < 1e-15);
    assert!(matches!(DiskSeq::new(vec![c(1.0, 0.0)]), Err(Error::InvalidBeta(0))));
    let b = DiskSeq::new(vec![c(0.2, 0.3), c(-0.1, 0.5), c(0.4, -0.2), c(0.0, 0.1)]).unwrap();
    let (rh, rt) = rho_from_beta(&b, 3, -one()).unwrap();
    for n in 1..=3 {
        let (bn, bp) = (b.beta[n], b.beta[n - 1]);
        let want = (1.0 - bn.conj()) * (1.0 - bp.norm_sqr()) / (1.0 - bp.conj());
        assert!((1.0 - rh[n] * rt[n] - want).norm() < 1e-13, "n = {n}");
        // ratio is unimodular, so (1 - r)/(1 + r) is purely imaginary
        let r = rh[n - 1] / rh[n];
        assert!(((1.0 - r) / (1.0 + r)).re.abs() < 1e-12);
    }
}

#[test]
fn rn_examples() {
    let b = DiskSeq::new(vec![c(0.4, 0.0), c(0.2, 0.1)]).unwrap();
    let rn = build_rn(&b, 1).unwrap();
    assert_eq!(rn.r[1], ComplexPoly::from_real(&[1.0, 1.0]));
    let f = HyperFamily::new(1.0, 0.5).unwrap();
    let rn = build_rn(&f.disk_seq(4).unwrap(), 3).unwrap();
    assert!(roots(&rn.r[3]).unwrap().max_unit_deviation() < 1e-8);
}

#[test]
fn g_transform() {
    let f = HyperFamily::new(1.0, 0.5).unwrap();
    let rn = build_rn(&f.disk_seq(10).unwrap(), 8).unwrap();
    assert!(g_recurrence_residual(&rn, 0.4, 1.0).unwrap() < 1e-9);
    for x in [-0.9, -0.3, 0.4, 0.8] {
        assert!(g_recurrence_residual(&rn, x, 1.0).unwrap() < 1e-9);
        assert!(g_recurrence_residual(&rn, x, -1.0).unwrap() > 1e-3);
    }
    assert_eq!(transform_g(&rn, 2, 1.0), Err(Error::OutOfDomain(1.0)));
    // continuity near x = 1 where z -> 1
    let near = transform_g(&rn, 3, 1.0 - 1e-6).unwrap();
    let at_one = rn.r[3].eval(one()) / 8.0;
    assert!((near - at_one).norm() < 1e-2 * at_one.norm());
    let real = HyperFamily::new(1.0, 0.0).unwrap();
    let rr = build_rn(&real.disk_seq(6).unwrap(), 5).unwrap();
    for n in 0..=5 {
        assert!(transform_g(&rr, n, 0.3).unwrap().im.abs() < 1e-12);
    }
}

#[test]
fn d_forms_against_closed_form() {
    for l in LAMS {
        for e in ETAS {
            let f = HyperFamily::new(l, e).unwrap();
            let s = f.disk_seq(12).unwrap();
            for n in 2..=12 {
                assert!((s.d(n).unwrap() - f.d(n)).abs() < 1e-12);
            }
            if e != 0.0 {
                assert!((s.d_recap(3).unwrap() - f.d(3)).abs() > 1e-6);
            }
        }
    }
}

#[test]
fn u_prime_constant_matches() {
    let f = HyperFamily::new(1.0, 0.5).unwrap();
    let s = family_sequences(&f, 10).unwrap();
    let rn = build_rn(&f.disk_seq(10).unwrap(), 9).unwrap();
    let pair = ParaPair::from_rho(&s.rho_hat[1..=9], &s.rho_tilde[1..=9], one()).unwrap();
    let v = pair.u_prime_sequence().unwrap();
    for n in 1..=9 {
        let k = u_prime_constant(&rn.c, n);
        assert!(rel_diff(&v[n + 1], &rn.r[n].scale(k)) < 1e-10);
        assert!(rel_diff(&v[n + 1], &rn.r[n].scale(printed_u_prime_constant(&rn.c, n))) > 1e-3);
    }
}

#[test]
fn selfinv_beta_recursion() {
    // real beta_0 makes the next value 1
    let r = beta_selfinv_recursion(c(0.3, 0.0), -one(), -one(), 4);
    assert!(matches!(r, Err(Error::EscapedDisk { index: 1, .. })));
    assert!(beta_selfinv_recursion(c(0.3, 0.2), -one(), -one(), 3).is_err());
    // the step forces rho_tilde = rho_hat at the new level
    let beta = vec![c(0.3, 0.0), c(0.1, 0.4), c(-0.2, 0.3)];
    let next = selfinv_beta_step(&beta).unwrap();
    let mut all = beta.clone();
    all.push(next);
    let (rh, rt) = rho_products(&all, 3, -one());
    assert!((rh[3] - rt[3]).norm() < 1e-12);
    assert!((rh[2] - rt[2]).norm() > 1e-3);
}

#[test]
fn rho_data_on_family() {
    for l in LAMS {
        for e in ETAS {
            let f = HyperFamily::new(l, e).unwrap();
            let s = family_sequences(&f, 14).unwrap();
            let chk = y_prime_ri_check(&s.rho_hat, &s.rho_tilde, 10).unwrap();
            assert!(chk.is_ri);
            let b = f.b();
            for (i, fv) in chk.f_formula.iter().enumerate() {
                let n = (i + 2) as f64;
                let want = n * (2.0 * l + n + 1.0) * (b + n - 1.0) * (b + n)
                    / ((n - 1.0) * (2.0 * l + n) * (b + n + 1.0) * (b + n + 2.0));
                assert!((fv - want).norm() < 1e-12);
                let printed = (2.0 * l + n + 1.0) / (2.0 * l + n + 2.0);
                assert!((fv - printed).norm() > 1e-3);
            }
            for (i, fv) in chk.f_formula.iter().enumerate() {
                let fd = chk.decision.f[i + 2 - chk.decision.first_step];
                assert!((fv - fd).norm() < 1e-10 * fv.norm());
            }
            let w1 = closed_forms(&f, 0).unwrap().y_prime;
            let w2 = closed_forms(&f, 1).unwrap().y_prime;
            let w = regenerate_y_prime(&w1, &w2, &chk.coefficients);
            for n in 1..w.len() {
                assert!(rel_diff(&w[n], &closed_forms(&f, n - 1).unwrap().y_prime) < 1e-10);
            }
        }
    }
}

#[test]
fn random_rho_data_is_ri() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rh: Vec<C64> = std::iter::once(-one()).chain((0..12).map(|_| common::polar(&mut rng, 0.3, 0.9))).collect();
    let rt: Vec<C64> = std::iter::once(-one()).chain((0..12).map(|_| common::polar(&mut rng, 0.3, 0.9))).collect();
    let chk = y_prime_ri_check(&rh, &rt, 8).unwrap();
    assert!(chk.is_ri);
    let pair = ParaPair::from_rho(&rh[1..], &rt[1..], one()).unwrap();
    let w1 = pair.y_prime_combination(0).unwrap();
    let w2 = pair.y_prime_combination(1).unwrap();
    let w = regenerate_y_prime(&w1, &w2, &chk.coefficients);
    for n in 1..w.len() {
        assert!(rel_diff(&w[n], &pair.y_prime_combination(n - 1).unwrap()) < 1e-10);
    }
}

/// R_I data of a monic sequence from two consecutive terms and the next one.
fn ri_data_from(ps: &[ComplexPoly]) -> RISequence {
    let mut beta = vec![-ps[1].coeff(0)];
    let mut tau = vec![one()];
    for n in 1..ps.len() - 1 {
        // P_{n+1} = (z - beta_n) P_n - tau_n z P_{n-1}: constant term and z^n term
        let b = -ps[n + 1].coeff(0) / ps[n].coeff(0);
        let lead = ps[n].coeff(n - 1) - b - ps[n + 1].coeff(n);
        tau.push(lead / ps[n - 1].coeff(n - 1));
        beta.push(b);
    }
    RISequence::new(beta, tau).unwrap()
}

#[test]
fn self_inversive_criterion() {
    for e in [0.0, 0.5] {
        let f = HyperFamily::new(1.0, e).unwrap();
        let s = family_sequences(&f, 12).unwrap();
        let pair = ParaPair::from_rho(&s.rho_hat[1..=10], &s.rho_tilde[1..=10], one()).unwrap();
        let v = pair.u_prime_sequence().unwrap();
        let u_seq = ri_data_from(&v[1..]);
        let crit = self_inversive_criterion_ri(&u_seq, 8).unwrap();
        assert!(crit.passed);
        assert!(all_self_inversive(&v[1..=9]).unwrap());
        for n in 1..=8 {
            let eps = is_self_inversive(&v[n + 1]).unwrap().epsilon.unwrap();
            assert!((eps - 1.0 / crit.epsilon[n]).norm() < 1e-8 || (eps - crit.epsilon[n]).norm() < 1e-8);
        }
        let y: Vec<ComplexPoly> = (0..=9).map(|n| closed_forms(&f, n).unwrap().y_prime).collect();
        let y_seq = ri_data_from(&y);
        let crit_y = self_inversive_criterion_ri(&y_seq, 8).unwrap();
        assert_eq!(crit_y.passed, all_self_inversive(&y[..=8]).unwrap());
        if e != 0.0 {
            assert!(!crit_y.passed);
        }
        // a real factor on tau keeps the phase condition; a phase factor breaks it
        let scaled = RISequence::new(u_seq.beta.clone(), u_seq.tau.iter().map(|t| t * 1.01).collect()).unwrap();
        assert!(self_inversive_criterion_ri(&scaled, 8).unwrap().passed);
        let rot = C64::from_polar(1.0, 0.01);
        let turned = RISequence::new(u_seq.beta.clone(), u_seq.tau.iter().map(|t| t * rot).collect()).unwrap();
        let bad = self_inversive_criterion_ri(&turned, 8).unwrap();
        assert!(!bad.passed);
        let gen = turned.generate_b(8).unwrap();
        assert!(!all_self_inversive(&gen[..=8]).unwrap());
    }
    // palindromic real toy: beta = -1, tau = 1
    let toy = RISequence::constant(-one(), one(), 6).unwrap();
    assert!(self_inversive_criterion_ri(&toy, 6).unwrap().passed);
    assert!(all_self_inversive(&toy.generate_b(6).unwrap()).unwrap());
}

#[test]
fn closed_form_agreement() {
    for l in LAMS {
        for e in ETAS {
            let f = HyperFamily::new(l, e).unwrap();
            let rn = build_rn(&f.disk_seq(13).unwrap(), 12).unwrap();
            let s = family_sequences(&f, 13).unwrap();
            let (rh, _) = rho_from_beta(&f.disk_seq(13).unwrap(), 12, -one()).unwrap();
            let pair = ParaPair::from_rho(&s.rho_hat[1..=12], &s.rho_tilde[1..=12], one()).unwrap();
            for n in 0..=12 {
                let cf = closed_forms(&f, n).unwrap();
                assert!(rel_diff(&rn.r[n], &cf.r) < 1e-10);
                assert!((rh[n] - s.rho_hat[n]).norm() < 1e-10);
                assert!(rel_diff(&pair.u_hat[n], &cf.u_hat) < 1e-10);
                if n <= 10 {
                    assert!(rel_diff(&pair.y_prime_combination(n).unwrap(), &cf.y_prime) < 1e-10);
                }
                if n >= 1 {
                    let ratio = pair.lambda[n] / pair.lambda[n - 1];
                    let want = 4.0 * f.d(n + 1) / (C64::new(1.0, -f.c(n)) * C64::new(1.0, f.c(n + 1)));
                    assert!((ratio - want).norm() < 1e-10);
                }
            }
            if e == 0.0 {
                assert!(rn.r.iter().all(|p| p.coeffs().iter().all(|z| z.im.abs() < 1e-12)));
            }
        }
    }
    let f = HyperFamily::new(1.0, 0.0).unwrap();
    assert!(rel_diff(&closed_forms(&f, 1).unwrap().r, &ComplexPoly::from_real(&[1.0, 1.0])) < 1e-15);
}

#[test]
fn hyper_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pts: Vec<C64> = (0..5).map(|_| common::rand_c(&mut rng, 1.5)).collect();
    for l in LAMS {
        for e in ETAS {
            let rep = identity_checks(&HyperFamily::new(l, e).unwrap(), 10, &pts).unwrap();
            assert!(rep.max() < 1e-10, "{rep:?}");
        }
    }
    // fixed small cases
    let x = c(0.3, 0.1);
    let lhs = hyp2f1_terminating(1, c(2.0, 0.0), c(4.0, 0.0), x).unwrap();
    let rhs = hyp2f1_terminating(0, c(2.0, 0.0), c(5.0, 0.0), x).unwrap()
        - c(2.0, 0.0) * 5.0 / 20.0 * x * hyp2f1_terminating(0, c(3.0, 0.0), c(6.0, 0.0), x).unwrap();
    assert!((lhs - rhs).norm() < 1e-15);
    let y = c(0.4, -0.3);
    let (bb, cc) = (c(1.5, 0.0), c(4.0, 0.0));
    let t = pochhammer(cc - bb, 2) / pochhammer(cc, 2) * hyp2f1_terminating(2, bb, bb - cc - 1.0, 1.0 - y).unwrap();
    assert!((hyp2f1_terminating(2, bb, cc, y).unwrap() - t).norm() < 1e-14);
}

#[test]
fn weight_quadrature() {
    for e in [0.0, 0.5] {
        let rep = weight_orthogonality(&HyperFamily::new(1.0, e).unwrap(), 4, 8192).unwrap();
        assert!(rep.max_offdiag_rel < 1e-5);
    }
    let f = HyperFamily::new(1.0, 0.0).unwrap();
    assert!((f.weight(1.0) - f.weight(2.0 * std::f64::consts::PI - 1.0)).abs() < 1e-14);
    // a strongly singular weight on a tiny grid does not settle
    let g = HyperFamily::new(-0.45, 0.0).unwrap();
    assert!(matches!(weight_orthogonality(&g, 2, 16), Err(Error::QuadratureWarning(_))));
    assert!(HyperFamily::new(-0.6, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn random_disk_seeds_give_unit_circle_zeros(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta: Vec<C64> = (0..11).map(|_| common::polar(&mut rng, 0.0, 0.8)).collect();
        let b = DiskSeq::new(beta).unwrap();
        let rn = build_rn(&b, 10).unwrap();
        for p in &rn.r[1..] {
            let s = is_self_inversive(p).unwrap();
            prop_assert!(s.flag);
            prop_assert!((s.epsilon.unwrap().norm() - 1.0).abs() < 1e-10);
            let r = roots(p).unwrap();
            prop_assert!(r.max_unit_deviation() < 1e-8);
            prop_assert!(r.min_separation() > 1e-6);
        }
    }
}
