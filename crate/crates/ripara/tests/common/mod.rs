#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ripara::functionals::{verify_para_orthogonal, MomentFunctional};
use ripara::paraorth::{pipeline, verify_biorthogonality, Pipeline};
use ripara::recurrence::{OmegaSeq, RISequence};
use ripara::{c, C64};

pub fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..=hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// R_I seed with recursive omega: |beta| in [0.85, 1], |tau| in [0.1, 1], |zeta| and |omega_1|
/// in [0.5, 1.5]. Enough data for a pipeline run up to degree 8.
pub fn ri_seed(seed: u64) -> (RISequence, OmegaSeq) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let beta: Vec<C64> = (0..14).map(|_| polar(&mut rng, 0.85, 1.0)).collect();
        let tau: Vec<C64> = (0..14).map(|_| polar(&mut rng, 0.1, 1.0)).collect();
        let zeta = polar(&mut rng, 0.5, 1.5);
        let w1 = polar(&mut rng, 0.5, 1.5);
        let seq = RISequence::new(beta, tau).unwrap();
        if let Ok(om) = OmegaSeq::recursive(&seq, zeta, -seq.tau(0).unwrap(), w1, 12) {
            return (seq, om);
        }
    }
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, depth: usize) -> MomentFunctional {
    let pos = (1..=depth).map(|k| rand_c(rng, 1.0) * 0.6f64.powi(k as i32)).collect();
    MomentFunctional::hermitian(c(1.0, 0.0), pos)
}

pub struct PipelineOutcome {
    pub para_hat: bool,
    pub para_tilde: bool,
    pub biorth_err: f64,
    pub lambda_err: f64,
}

/// Para-orthogonality of both families, biorthogonality error and lambda agreement.
pub fn run_pipeline(seq: &RISequence, om: &OmegaSeq, n_max: usize) -> Option<(Pipeline, PipelineOutcome)> {
    let pl = pipeline(seq, om, n_max).ok()?;
    let f = &pl.functional;
    let check = |xs: &[ripara::ComplexPoly]| {
        verify_para_orthogonal(f, xs, 1e-8, 1e-6).map(|r| r.iter().all(|r| r.passed)).unwrap_or(false)
    };
    let para_hat = check(&pl.x_hat);
    let para_tilde = check(&pl.x_tilde);
    let biorth_err = verify_biorthogonality(&pl.pair, f, n_max, 1e-8).map(|r| r.max_rel_error).unwrap_or(f64::INFINITY);
    let lambda_err = (0..=n_max)
        .map(|n| (pl.pair.lambda[n] - pl.zohar.lambdas[n]).norm() / pl.zohar.lambdas[n].norm().max(1e-300))
        .fold(0.0, f64::max);
    Some((pl, PipelineOutcome { para_hat, para_tilde, biorth_err, lambda_err }))
}
