//! Command-line values and JSON configuration files.

use std::fs;
use std::path::Path;

use ripara::functionals::{MomentFunctional, TransformParams};
use ripara::hyper::{family_sequences, HyperFamily};
use ripara::recurrence::{omega_rratio, OmegaSeq, RISequence};
use ripara::selfinv::u_prime_ri_data;
use ripara::{c, C64};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("'{s}' is not a complex number (expected re,im)"));
    match parts.as_slice() {
        [re] => Ok(c(num(re)?, 0.0)),
        [re, im] => Ok(c(num(re)?, num(im)?)),
        _ => Err(format!("'{s}' is not a complex number (expected re,im)")),
    }
}

/// Reads a JSON file, reporting the path and the line of any syntax error.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeqSpec {
    Const { value: C64 },
    List { values: Vec<C64> },
    Hyper { lambda: f64, eta: f64 },
}

impl std::str::FromStr for SeqSpec {
    type Err = String;

    /// `const:re,im`, `list:re,im;re,im;..` or `hyper:lambda,eta`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("'{s}': expected kind:value"))?;
        match kind {
            "const" => Ok(SeqSpec::Const { value: parse_complex(rest)? }),
            "list" => Ok(SeqSpec::List { values: rest.split(';').map(parse_complex).collect::<Result<_, _>>()? }),
            "hyper" => {
                let p = parse_complex(rest)?;
                Ok(SeqSpec::Hyper { lambda: p.re, eta: p.im })
            }
            _ => Err(format!("unknown sequence kind '{kind}' (const, list, hyper)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OmegaModeArg {
    Recursive,
    Rratio,
    List,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub mode: OmegaModeArg,
    #[serde(default)]
    pub seeds: Vec<C64>,
    pub zeta: Option<C64>,
    /// Functional scale and second zero, r-ratio mode only.
    pub lambda: Option<C64>,
    pub alpha: Option<C64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeqConfig {
    pub beta: Option<SeqSpec>,
    pub tau: Option<SeqSpec>,
    pub omega: Option<OmegaSpec>,
    /// Moment table; supplies beta/tau when they are omitted and is required for r-ratio omega.
    pub functional: Option<MomentFunctional>,
}

fn expand(spec: &SeqSpec, len: usize, hyper: impl Fn(f64, f64) -> Result<Vec<C64>, CliError>) -> Result<Vec<C64>, CliError> {
    match spec {
        SeqSpec::Const { value } => Ok(vec![*value; len]),
        SeqSpec::List { values } if values.len() >= len => Ok(values[..len].to_vec()),
        SeqSpec::List { values } => {
            Err(CliError::Usage(format!("sequence list has {} entries, {len} needed", values.len())))
        }
        SeqSpec::Hyper { lambda, eta } => hyper(*lambda, *eta),
    }
}

/// R_I data of `U'_{n+1}/(n+1)` for the hypergeometric family.
fn hyper_data(lambda: f64, eta: f64, len: usize) -> Result<RISequence, CliError> {
    let fam = HyperFamily::new(lambda, eta)?;
    let s = family_sequences(&fam, len + 1)?;
    Ok(u_prime_ri_data(&s.rho_hat, &s.rho_tilde, len - 1)?.0)
}

pub struct Resolved {
    pub seq: RISequence,
    pub omega: Option<OmegaSeq>,
}

impl SeqConfig {
    /// Recurrence data with `len` entries and, if configured, `omega_0..omega_{len-1}`.
    pub fn resolve(&self, len: usize) -> Result<Resolved, CliError> {
        let seq = match (&self.beta, &self.tau, &self.functional) {
            (None, None, Some(l)) => RISequence::from_functional(l, len - 1, c(1.0, 0.0))?,
            _ => {
                let beta_spec = self.beta.clone().unwrap_or(SeqSpec::Const { value: c(0.0, 0.0) });
                let tau_spec = self.tau.clone().unwrap_or(SeqSpec::Const { value: c(1.0, 0.0) });
                let beta = expand(&beta_spec, len, |l, e| Ok(hyper_data(l, e, len)?.beta))?;
                let tau = expand(&tau_spec, len, |l, e| Ok(hyper_data(l, e, len)?.tau))?;
                RISequence::new(beta, tau)?
            }
        };
        let omega = match &self.omega {
            None => None,
            Some(o) => Some(resolve_omega(o, &seq, self.functional.as_ref(), len - 1)?),
        };
        Ok(Resolved { seq, omega })
    }
}

fn resolve_omega(o: &OmegaSpec, seq: &RISequence, l: Option<&MomentFunctional>, n_max: usize) -> Result<OmegaSeq, CliError> {
    let need_zeta = || o.zeta.ok_or_else(|| CliError::Usage("omega needs zeta".into()));
    match o.mode {
        OmegaModeArg::Recursive => {
            let zeta = need_zeta()?;
            let (w0, w1) = match o.seeds.as_slice() {
                [w1] => (-seq.tau(0)?, *w1),
                [w0, w1] => (*w0, *w1),
                _ => return Err(CliError::Usage("recursive omega takes seeds [omega_1] or [omega_0, omega_1]".into())),
            };
            Ok(OmegaSeq::recursive(seq, zeta, w0, w1, n_max)?)
        }
        OmegaModeArg::Rratio => {
            let l = l.ok_or_else(|| CliError::Usage("r-ratio omega needs a functional".into()))?;
            let (lam, alpha) = match (o.lambda, o.alpha) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(CliError::Usage("r-ratio omega needs lambda and alpha".into())),
            };
            let p = TransformParams::new(lam, need_zeta()?, alpha)?;
            Ok(omega_rratio(seq, l, &p, n_max)?)
        }
        OmegaModeArg::List => Ok(OmegaSeq::explicit(o.zeta.unwrap_or(c(1.0, 0.0)), o.seeds.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_args() {
        assert_eq!(parse_complex("1,-2.5"), Ok(c(1.0, -2.5)));
        assert_eq!(parse_complex(" 3 "), Ok(c(3.0, 0.0)));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn seq_specs() {
        assert_eq!("const:0".parse::<SeqSpec>(), Ok(SeqSpec::Const { value: c(0.0, 0.0) }));
        let l: SeqSpec = "list:1,0;0,1".parse().unwrap();
        assert_eq!(l, SeqSpec::List { values: vec![c(1.0, 0.0), c(0.0, 1.0)] });
        assert!("ramp:1".parse::<SeqSpec>().is_err());
        let cfg: SeqConfig = serde_json::from_str(
            r#"{"beta":{"kind":"const","value":[0.2,0.1]},"omega":{"mode":"recursive","seeds":[[0.9,0.0]],"zeta":[1,0]}}"#,
        )
        .unwrap();
        let r = cfg.resolve(6).unwrap();
        assert_eq!(r.seq.len(), 6);
        assert_eq!(r.omega.unwrap().values.len(), 6);
    }

    #[test]
    fn hyper_spec_matches_family() {
        let cfg = SeqConfig {
            beta: Some(SeqSpec::Hyper { lambda: 1.0, eta: 0.5 }),
            tau: Some(SeqSpec::Hyper { lambda: 1.0, eta: 0.5 }),
            ..Default::default()
        };
        let r = cfg.resolve(5).unwrap();
        assert_eq!(r.seq.tau(0).unwrap(), c(1.0, 0.0));
        assert!(cfg.resolve(5).is_ok());
    }
}
