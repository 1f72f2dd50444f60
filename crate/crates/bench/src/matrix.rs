//! Configuration matrices such as `hv=lb,ub;core=maximal;merge=on`.
//!
//! Keys are `hv`, `core`, `merge` and `disjoint`. A missing key means every
//! value, except `disjoint`, which defaults to `off`.

use thiserror::Error;
use wcsp_ihs::{CoreStrategy, HvStrategy, SolverConfig};

use crate::parse_on_off;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("bad matrix spec: {0}")]
pub struct MatrixError(String);

fn values<T>(list: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, MatrixError> {
    let out: Vec<T> = list
        .split(',')
        .map(|v| parse(v.trim()).map_err(MatrixError))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(MatrixError("empty value list".into()));
    }
    Ok(out)
}

/// Expands a matrix spec into configurations built on `base`. Order is
/// merge, then hv, then core, then disjoint (same as [`SolverConfig::matrix`]).
pub fn parse_matrix(spec: &str, base: &SolverConfig) -> Result<Vec<SolverConfig>, MatrixError> {
    let mut hvs = HvStrategy::ALL.to_vec();
    let mut cores = CoreStrategy::ALL.to_vec();
    let mut merges = vec![true, false];
    let mut disjoints = vec![false];
    let mut seen = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, list) = part
            .split_once('=')
            .ok_or_else(|| MatrixError(format!("`{part}` is not key=values")))?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(MatrixError(format!("key `{key}` given twice")));
        }
        seen.push(key);
        match key {
            "hv" => hvs = values(list, str::parse)?,
            "core" => cores = values(list, str::parse)?,
            "merge" => merges = values(list, parse_on_off)?,
            "disjoint" => disjoints = values(list, parse_on_off)?,
            _ => return Err(MatrixError(format!("unknown key `{key}`"))),
        }
    }
    let mut out = Vec::new();
    for &merge in &merges {
        for &hv in &hvs {
            for &core in &cores {
                for &disjoint_cores in &disjoints {
                    out.push(SolverConfig {
                        hv,
                        core,
                        merge,
                        disjoint_cores,
                        ..base.clone()
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_is_full_matrix() {
        let m = parse_matrix("", &SolverConfig::default()).unwrap();
        assert_eq!(m, SolverConfig::matrix());
    }

    #[test]
    fn two_hv_one_core_one_merge() {
        let m = parse_matrix("hv=lb,ub;core=maximal;merge=on", &SolverConfig::default()).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m
            .iter()
            .all(|c| c.merge && c.core == CoreStrategy::Maximal && !c.disjoint_cores));
        assert_eq!(m[0].hv, HvStrategy::Lb);
    }

    #[test]
    fn disjoint_both() {
        let m = parse_matrix("hv=lb;core=lazy;merge=off;disjoint=on,off", &SolverConfig::default()).unwrap();
        assert_eq!(
            m.iter().map(|c| c.disjoint_cores).collect::<Vec<_>>(),
            vec![true, false]
        );
    }

    #[test]
    fn errors() {
        let base = SolverConfig::default();
        assert!(parse_matrix("hv=best", &base).is_err());
        assert!(parse_matrix("speed=1", &base).is_err());
        assert!(parse_matrix("hv", &base).is_err());
        assert!(parse_matrix("hv=lb;hv=ub", &base).is_err());
        assert!(parse_matrix("merge=yes", &base).is_err());
    }
}
