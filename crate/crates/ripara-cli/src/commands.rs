use ripara::cfrac::{build_cfrac, correspondence, tail_fraction_omega1};
use ripara::functionals::{
    moments_of_m, moments_of_n, verify_functional_relation, verify_m_orthogonality, verify_para_orthogonal, MomentFunctional,
    ParaReport, TransformParams,
};
use ripara::hyper::{closed_forms, family_sequences, identity_checks, weight_orthogonality, HyperFamily};
use ripara::paraorth::{pipeline, verify_biorthogonality, ParaPair, Pipeline};
use ripara::poly::{rel_diff, roots};
use ripara::recurrence::{build_x, omega_rratio, ri_again_decision, OmegaSeq, RISequence};
use ripara::selfinv::{all_self_inversive, build_rn, rho_from_beta, self_inversive_criterion_ri};
use ripara::toeplitz::{dense, solve_hat, solve_tilde, zohar_invert, RhsKind, ToeplitzSystem};
use ripara::{c, ComplexPoly, C64};
use serde_json::json;

use crate::input::{read_json, OmegaModeArg, OmegaSpec, Resolved, SeqConfig};
use crate::output::{cplx, cplx_header, num, Sink, Table};
use crate::{tolerance, CliError, FunctionalArgs, IllustrateArgs, IllustrateTable, RhsArg, SeqArgs, SystemArgs};

type Outcome = Result<bool, CliError>;

impl SeqArgs {
    /// Config file (if any) with command-line overrides applied.
    fn config(&self) -> Result<SeqConfig, CliError> {
        let mut cfg: SeqConfig = match &self.config {
            Some(p) => read_json(p)?,
            None => SeqConfig::default(),
        };
        if let Some(b) = &self.beta {
            cfg.beta = Some(b.clone());
        }
        if let Some(t) = &self.tau {
            cfg.tau = Some(t.clone());
        }
        let base = cfg.omega.take();
        cfg.omega = if self.omega.is_some() || self.omega0.is_some() || self.omega1.is_some() {
            let seeds = match (self.omega0, self.omega1) {
                (Some(a), Some(b)) => vec![a, b],
                (None, Some(b)) => vec![b],
                (Some(a), None) => vec![a],
                (None, None) => base.as_ref().map(|o| o.seeds.clone()).unwrap_or_default(),
            };
            Some(OmegaSpec {
                mode: self.omega.or(base.as_ref().map(|o| o.mode)).unwrap_or(OmegaModeArg::Recursive),
                seeds,
                zeta: self.zeta.or(base.as_ref().and_then(|o| o.zeta)),
                lambda: base.as_ref().and_then(|o| o.lambda),
                alpha: base.as_ref().and_then(|o| o.alpha),
            })
        } else {
            base.map(|mut o| {
                o.zeta = self.zeta.or(o.zeta);
                o
            })
        };
        Ok(cfg)
    }

    fn n(&self) -> usize {
        self.n as usize
    }
}

fn need_omega(r: &Resolved) -> Result<&OmegaSeq, CliError> {
    r.omega.as_ref().ok_or_else(|| CliError::Usage("this command needs an omega configuration".into()))
}

fn poly_rows(t: &mut Table, name: &str, ps: &[ComplexPoly]) {
    for (n, p) in ps.iter().enumerate() {
        for (k, z) in p.coeffs().iter().enumerate() {
            let [re, im] = cplx(*z);
            t.push(vec![name.into(), n.to_string(), k.to_string(), re, im]);
        }
    }
}

pub fn gen(a: &SeqArgs, sink: &Sink) -> Outcome {
    let n = a.n();
    let r = a.config()?.resolve(n + 1)?;
    let b = r.seq.generate_b(n)?;
    let x = match &r.omega {
        Some(om) => Some(build_x(&r.seq, om, n)?),
        None => None,
    };
    let j = json!({
        "n": n,
        "beta": r.seq.beta,
        "tau": r.seq.tau,
        "b": b,
        "omega": r.omega.as_ref().map(|o| &o.values),
        "zeta": r.omega.as_ref().map(|o| o.zeta),
        "x": x,
    });
    sink.emit(&j, || {
        let mut t = Table::new(["table", "n", "k", "re", "im"]);
        poly_rows(&mut t, "b", &b);
        if let (Some(om), Some(x)) = (&r.omega, &x) {
            for (k, w) in om.values.iter().enumerate() {
                let [re, im] = cplx(*w);
                t.push(vec!["omega".into(), k.to_string(), "0".into(), re, im]);
            }
            poly_rows(&mut t, "x", x);
        }
        t
    })?;
    Ok(true)
}

pub fn check_ri_again(a: &SeqArgs, sink: &Sink) -> Outcome {
    let n = a.n();
    let r = a.config()?.resolve(n + 3)?;
    let om = need_omega(&r)?;
    let d = ri_again_decision(&r.seq, om, n)?;
    let tol = tolerance(1e-10)?;
    let regen_err = if d.is_ri {
        let xs = build_x(&r.seq, om, n + 1)?;
        d.regenerate().iter().zip(&xs).map(|(p, q)| rel_diff(p, q)).fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    let pass = d.is_ri && regen_err < tol;
    eprintln!("ri-again: is_ri = {}, branch = {:?}, regeneration error {regen_err:e} (tol {tol:e})", d.is_ri, d.branch);
    let j = json!({
        "passed": pass,
        "is_ri": d.is_ri,
        "branch": d.branch,
        "first_step": d.first_step,
        "witness": d.witness,
        "f": d.f,
        "regeneration_error": if regen_err.is_finite() { Some(regen_err) } else { None },
        "tolerance": tol,
    });
    sink.emit(&j, || {
        let mut t = Table::new(["n", "f_re", "f_im"]);
        for (i, f) in d.f.iter().enumerate() {
            let [re, im] = cplx(*f);
            t.push(vec![(i + d.first_step).to_string(), re, im]);
        }
        t
    })?;
    Ok(pass)
}

fn run_pipeline(a: &SeqArgs) -> Result<Pipeline, CliError> {
    let n = a.n();
    let r = a.config()?.resolve(n + 3)?;
    let om = need_omega(&r)?;
    Ok(pipeline(&r.seq, om, n)?)
}

/// (n, rho_hat, rho_tilde, sigma_hat, sigma_tilde, lambda)
fn para_table(p: &ParaPair) -> Table {
    let mut header = vec!["n".to_string()];
    for name in ["rho_hat", "rho_tilde", "sigma_hat", "sigma_tilde", "lambda"] {
        header.extend(cplx_header(name));
    }
    let mut t = Table::new(header);
    for n in 0..=p.top() {
        let mut row = vec![n.to_string()];
        for v in [&p.rho_hat, &p.rho_tilde, &p.sigma_hat, &p.sigma_tilde, &p.lambda] {
            match v.get(n) {
                Some(z) => row.extend(cplx(*z)),
                None => row.extend([String::new(), String::new()]),
            }
        }
        t.push(row);
    }
    t
}

fn profile_json(rep: &[ParaReport]) -> serde_json::Value {
    json!(rep
        .iter()
        .map(|r| json!({"n": r.n, "passed": r.passed, "values": r.values, "scales": r.scales}))
        .collect::<Vec<_>>())
}

pub fn check_para(a: &SeqArgs, sink: &Sink) -> Outcome {
    let pl = run_pipeline(a)?;
    let tol = tolerance(1e-8)?;
    let hat = verify_para_orthogonal(&pl.functional, &pl.x_hat, tol, 100.0 * tol)?;
    let tilde = verify_para_orthogonal(&pl.functional, &pl.x_tilde, tol, 100.0 * tol)?;
    let ok = |r: &[ParaReport]| r.iter().all(|r| r.passed);
    let pass = ok(&hat) && ok(&tilde);
    eprintln!("para: X_hat {}, X_tilde {} (zero < {tol:e}, nonzero > {:e})", ok(&hat), ok(&tilde), 100.0 * tol);
    let j = json!({
        "passed": pass,
        "x_hat": profile_json(&hat),
        "x_tilde": profile_json(&tilde),
        "tolerance": tol,
    });
    sink.emit(&j, || para_table(&pl.pair))?;
    Ok(pass)
}

pub fn check_biorth(a: &SeqArgs, sink: &Sink) -> Outcome {
    let pl = run_pipeline(a)?;
    let n = a.n();
    let tol = tolerance(1e-8)?;
    let rep = verify_biorthogonality(&pl.pair, &pl.functional, n, tol)?;
    let lambda_err = (0..=n)
        .map(|k| (pl.pair.lambda[k] - pl.zohar.lambdas[k]).norm() / pl.zohar.lambdas[k].norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let pass = rep.passed && lambda_err < tol;
    eprintln!("biorth: max rel error {:e}, lambda vs Toeplitz {lambda_err:e} (tol {tol:e})", rep.max_rel_error);
    let j = json!({
        "passed": pass,
        "max_rel_error": rep.max_rel_error,
        "failures": rep.failures,
        "diagonal": rep.diagonal,
        "lambda_recurrence": pl.pair.lambda,
        "lambda_toeplitz": pl.zohar.lambdas,
        "lambda_rel_error": lambda_err,
        "tolerance": tol,
    });
    sink.emit(&j, || para_table(&pl.pair))?;
    Ok(pass)
}

pub fn check_self_inversive(a: &SeqArgs, sink: &Sink) -> Outcome {
    let n = a.n();
    let r = a.config()?.resolve(n + 1)?;
    let crit = self_inversive_criterion_ri(&r.seq, n)?;
    let bs = r.seq.generate_b(n)?;
    let direct = all_self_inversive(&bs)?;
    let pass = crit.passed && direct;
    eprintln!(
        "self-inversive: criterion {} (first failure {:?}), coefficient test {direct}",
        crit.passed, crit.first_failure
    );
    let j = json!({
        "passed": pass,
        "criterion": crit.passed,
        "first_failure": crit.first_failure,
        "epsilon": crit.epsilon,
        "coefficient_test": direct,
    });
    sink.emit(&j, || {
        let mut t = Table::new(["n", "epsilon_re", "epsilon_im"]);
        for (k, e) in crit.epsilon.iter().enumerate() {
            let [re, im] = cplx(*e);
            t.push(vec![k.to_string(), re, im]);
        }
        t
    })?;
    Ok(pass)
}

pub fn check_functional(a: &FunctionalArgs, sink: &Sink) -> Outcome {
    let l: MomentFunctional = read_json(&a.functional)?;
    let p = TransformParams::new(a.lambda, a.zeta, a.alpha)?;
    let tol = tolerance(1e-10)?;
    let nf = moments_of_n(&l, &p, a.depth + 2)?;
    let m = moments_of_m(&l, &p, a.depth + 2)?;
    let rel = verify_functional_relation(&l, &nf, &m, &p, a.depth)?;
    let m_orth = if a.m_order > 0 {
        let seq = RISequence::from_functional(&l, a.m_order + 2, c(1.0, 0.0))?;
        let om = omega_rratio(&seq, &l, &p, a.m_order + 1)?;
        Some(verify_m_orthogonality(&m, &build_x(&seq, &om, a.m_order + 1)?, a.m_order)?)
    } else {
        None
    };
    let pass = rel.max_rel_residual < tol && m_orth.unwrap_or(true);
    eprintln!("functional: relation residual {:e} (tol {tol:e}), M-orthogonality {m_orth:?}", rel.max_rel_residual);
    let j = json!({
        "passed": pass,
        "relation_max_rel_residual": rel.max_rel_residual,
        "relation_first_failure": rel.first_failure,
        "m_orthogonality": m_orth,
        "n_moments": {"neg": nf.neg, "at_one": nf.at_one, "pos": nf.pos},
        "m_moments": {"neg": m.neg, "at_one": m.at_one, "pos": m.pos},
        "tolerance": tol,
    });
    sink.emit(&j, || {
        let mut t = Table::new(["check", "value"]);
        t.push(vec!["relation_max_rel_residual".into(), num(rel.max_rel_residual)]);
        t.push(vec!["m_orthogonality".into(), m_orth.map_or("skipped".into(), |b| b.to_string())]);
        t
    })?;
    Ok(pass)
}

struct RnRow {
    n: usize,
    r: ComplexPoly,
    closed_form: f64,
    root_dev: f64,
    lambda_ratio: f64,
}

fn root_deviation(p: &ComplexPoly) -> Result<f64, CliError> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(0.0);
    }
    Ok(roots(p)?.max_unit_deviation())
}

pub fn illustrate(a: &IllustrateArgs, sink: &Sink) -> Outcome {
    let n = a.n as usize;
    let fam = HyperFamily::new(a.lambda, a.eta)?;
    let tol = tolerance(1e-9)?;
    let disk = fam.disk_seq(n + 1)?;
    let rn = build_rn(&disk, n)?;
    let s = family_sequences(&fam, n + 2)?;
    let pair = ParaPair::from_rho(&s.rho_hat[1..=n], &s.rho_tilde[1..=n], c(1.0, 0.0))?;
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let lambda_ratio = if k == 0 {
            0.0
        } else {
            let want = 4.0 * fam.d(k + 1) / (C64::new(1.0, -fam.c(k)) * C64::new(1.0, fam.c(k + 1)));
            (pair.lambda[k] / pair.lambda[k - 1] - want).norm() / want.norm()
        };
        rows.push(RnRow {
            n: k,
            r: rn.r[k].clone(),
            closed_form: rel_diff(&rn.r[k], &closed_forms(&fam, k)?.r),
            root_dev: root_deviation(&rn.r[k])?,
            lambda_ratio,
        });
    }
    let max_residual = rows.iter().map(|r| r.closed_form.max(r.root_dev).max(r.lambda_ratio)).fold(0.0, f64::max);
    let pass = max_residual < tol;
    let (rho_hat, rho_tilde) = rho_from_beta(&disk, n, c(-1.0, 0.0))?;
    let points = [c(0.3, 0.2), c(-0.5, 0.4), c(0.9, -0.1), c(1.2, 0.7), c(-0.2, -1.1)];
    let identities = identity_checks(&fam, n.min(10), &points)?;
    let weight = match weight_orthogonality(&fam, n.min(4), 8192) {
        Ok(w) => json!({"grid": w.grid, "max_offdiag_rel": w.max_offdiag_rel, "refinement_change": w.refinement_change}),
        Err(e) => json!({"error": e.to_string()}),
    };
    eprintln!("illustrate: lambda = {}, eta = {}, n <= {n}, max residual {max_residual:e} (tol {tol:e})", a.lambda, a.eta);
    let j = json!({
        "passed": pass,
        "lambda": a.lambda,
        "eta": a.eta,
        "max_residual": max_residual,
        "rows": rows.iter().map(|r| json!({
            "n": r.n,
            "r": r.r,
            "closed_form_residual": r.closed_form,
            "max_root_deviation": r.root_dev,
            "lambda_ratio_residual": r.lambda_ratio,
            "c": rn.c[r.n],
            "d": rn.d.get(r.n).copied().unwrap_or(0.0),
            "rho_hat": rho_hat[r.n],
            "rho_tilde": rho_tilde[r.n],
        })).collect::<Vec<_>>(),
        "identities": identities,
        "weight": weight,
        "tolerance": tol,
    });
    sink.emit(&j, || match a.table {
        IllustrateTable::Rn => {
            let mut header = vec!["n".to_string()];
            for k in 0..=n {
                header.extend(cplx_header(&format!("r{k}")));
            }
            header.extend(["closed_form_residual", "max_root_deviation", "lambda_ratio_residual"].map(String::from));
            let mut t = Table::new(header);
            for r in &rows {
                let mut row = vec![r.n.to_string()];
                for k in 0..=n {
                    if k < r.r.len() {
                        row.extend(cplx(r.r.coeff(k)));
                    } else {
                        row.extend([String::new(), String::new()]);
                    }
                }
                row.extend([num(r.closed_form), num(r.root_dev), num(r.lambda_ratio)]);
                t.push(row);
            }
            t
        }
        IllustrateTable::Selfinv => {
            let mut header = vec!["n".to_string(), "c".into(), "d".into()];
            header.extend(cplx_header("rho_hat"));
            header.extend(cplx_header("rho_tilde"));
            header.push("max_root_deviation".into());
            let mut t = Table::new(header);
            for r in &rows {
                let mut row = vec![r.n.to_string(), num(rn.c[r.n]), num(rn.d.get(r.n).copied().unwrap_or(0.0))];
                row.extend(cplx(rho_hat[r.n]));
                row.extend(cplx(rho_tilde[r.n]));
                row.push(num(r.root_dev));
                t.push(row);
            }
            t
        }
    })?;
    Ok(pass)
}

fn vec_rel(a: &[C64], b: &[C64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

pub fn toeplitz_invert(a: &SystemArgs, sink: &Sink) -> Outcome {
    let sys: ToeplitzSystem = read_json(&a.system)?;
    let st = zohar_invert(&sys.o, sys.n)?;
    let inv = st.inverse();
    let tol = tolerance(1e-9)?;
    let err = dense::max_rel_diff(&inv, &dense::inverse(&sys.o.matrix(sys.n)?)?);
    let pass = err < tol;
    eprintln!("toeplitz invert: n = {}, dense agreement {err:e} (tol {tol:e})", sys.n);
    let j = json!({
        "passed": pass,
        "n": sys.n,
        "inverse": inv,
        "lambdas": st.lambdas,
        "rho_hat": st.rho_hat,
        "rho_tilde": st.rho_tilde,
        "dense_rel_diff": err,
    });
    sink.emit(&j, || {
        let mut t = Table::new(["i", "j", "re", "im"]);
        for (i, row) in inv.iter().enumerate() {
            for (k, z) in row.iter().enumerate() {
                let [re, im] = cplx(*z);
                t.push(vec![i.to_string(), k.to_string(), re, im]);
            }
        }
        t
    })?;
    Ok(pass)
}

pub fn toeplitz_solve(a: &SystemArgs, sink: &Sink) -> Outcome {
    let sys: ToeplitzSystem = read_json(&a.system)?;
    sys.check_guard()?;
    let kind = match a.rhs {
        Some(RhsArg::Hat) => RhsKind::Hat,
        Some(RhsArg::Tilde) => RhsKind::Tilde,
        None => sys.rhs.unwrap_or(RhsKind::Hat),
    };
    let st = zohar_invert(&sys.o, sys.n)?;
    let x = match kind {
        RhsKind::Hat => solve_hat(&sys, &st)?,
        RhsKind::Tilde => solve_tilde(&sys, &st)?,
    };
    let tol = tolerance(1e-9)?;
    let err = vec_rel(&x, &dense::solve(&sys.o.matrix(sys.n)?, &sys.rhs_vector(kind))?);
    let pass = err < tol;
    eprintln!("toeplitz solve ({kind:?}): dense agreement {err:e} (tol {tol:e})");
    let j = json!({"passed": pass, "rhs": kind, "x": x, "lambda": st.lambda(), "dense_rel_diff": err});
    sink.emit(&j, || {
        let mut t = Table::new(["k", "re", "im"]);
        for (k, z) in x.iter().enumerate() {
            let [re, im] = cplx(*z);
            t.push(vec![k.to_string(), re, im]);
        }
        t
    })?;
    Ok(pass)
}

pub fn cfrac_moments(a: &SeqArgs, depth: Option<usize>, sink: &Sink) -> Outcome {
    let n = a.n();
    let r = a.config()?.resolve(n + 3)?;
    let om = need_omega(&r)?;
    let st = build_cfrac(&r.seq, om, n)?;
    // n levels give moments up to depth n - 2
    let ser = correspondence(&st, depth.unwrap_or(n.saturating_sub(2).max(1)))?;
    let d = ser.depth() as i64;
    let o: Vec<(i64, C64)> = (-d..=d).map(|k| Ok((k, ser.o(k)?))).collect::<Result<_, ripara::Error>>()?;
    let j = json!({
        "alpha": ser.alpha,
        "alpha_star": ser.alpha_star,
        "o": o.iter().map(|(k, v)| json!({"k": k, "value": v})).collect::<Vec<_>>(),
        "x_nn": st.x_nn,
        "x_n0": st.x_n0,
        "upsilon_hat": st.upsilon_hat,
        "upsilon_tilde": st.upsilon_tilde,
    });
    sink.emit(&j, || {
        let mut t = Table::new(["table", "index", "re", "im"]);
        let mut put = |name: &str, k: i64, z: C64| {
            let [re, im] = cplx(z);
            t.push(vec![name.into(), k.to_string(), re, im]);
        };
        for (k, v) in ser.alpha.iter().enumerate() {
            put("alpha", k as i64, *v);
        }
        for (k, v) in ser.alpha_star.iter().enumerate() {
            put("alpha_star", k as i64, *v);
        }
        for (k, v) in &o {
            put("o", *k, *v);
        }
        t
    })?;
    Ok(true)
}

pub fn cfrac_tail(a: &SeqArgs, levels: usize, sink: &Sink) -> Outcome {
    let mut cfg = a.config()?;
    let zeta = a
        .zeta
        .or(cfg.omega.as_ref().and_then(|o| o.zeta))
        .ok_or_else(|| CliError::Usage("tail-omega1 needs --zeta".into()))?;
    cfg.omega = None;
    let r = cfg.resolve(levels + 2)?;
    let t = tail_fraction_omega1(&r.seq, zeta, levels)?;
    let change = t.previous.map(|p| (p - t.omega).norm());
    eprintln!("tail-omega1: omega_1 = {} after {levels} levels, last change {change:?}", t.omega);
    let j = json!({
        "zeta": zeta,
        "levels": levels,
        "omega1": t.omega,
        "fraction": t.fraction,
        "previous": t.previous,
        "change": change,
    });
    sink.emit(&j, || {
        let mut tab = Table::new(["quantity", "re", "im"]);
        for (name, v) in [("omega1", Some(t.omega)), ("fraction", Some(t.fraction)), ("previous", t.previous)] {
            if let Some(v) = v {
                let [re, im] = cplx(v);
                tab.push(vec![name.into(), re, im]);
            }
        }
        tab
    })?;
    Ok(true)
}
