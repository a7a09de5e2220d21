//! Generator spec strings such as `er:n=10000,k=20`,
//! `rsf:n=10000,gamma=2.3` or `wei:n=10000,a=0.25,c=0.6`.
//!
//! Families and keys:
//! - `er`: `n`, `k` (mean degree)
//! - `rsf`: `n`, `gamma`, optional `kmin` (default 1), `kmax` (default n-1)
//! - `wei`: `n`, `a`, `c`, optional `kmin` (default 1), `kmax` (default n/10)

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    generate_configuration_model, generate_er, sample_degree_sequence, DegreeDistribution,
    DEFAULT_REWIRE_FACTOR,
};
use crate::graph::Graph;
use crate::io::MAX_VERTICES;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GraphSpec {
    Er { n: usize, k: f64 },
    Rsf { n: usize, gamma: f64, k_min: usize, k_max: usize },
    Wei { n: usize, a: f64, c: f64, k_min: usize, k_max: usize },
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::GraphSpec(msg.into())
}

struct Fields<'a> {
    family: &'a str,
    values: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.values.remove(key)
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let raw =
            self.take(key).ok_or_else(|| spec_err(format!("{} spec is missing '{key}'", self.family)))?;
        parse_value(key, raw)
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        self.take(key).map(|raw| parse_value(key, raw)).transpose()
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => Err(spec_err(format!("unknown key '{k}' for {}", self.family))),
            None => Ok(()),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| spec_err(format!("bad value '{raw}' for '{key}'")))
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| spec_err(format!("expected '<family>:<key>=<value>,...', got '{s}'")))?;
        let mut values = BTreeMap::new();
        for tok in rest.split(',').map(str::trim) {
            if tok.is_empty() {
                return Err(spec_err("empty field"));
            }
            let (k, v) =
                tok.split_once('=').ok_or_else(|| spec_err(format!("expected key=value, got '{tok}'")))?;
            if values.insert(k.trim(), v.trim()).is_some() {
                return Err(spec_err(format!("repeated key '{}'", k.trim())));
            }
        }
        let family = family.trim();
        let allowed: &[&str] = match family {
            "er" => &["n", "k"],
            "rsf" => &["n", "gamma", "kmin", "kmax"],
            "wei" => &["n", "a", "c", "kmin", "kmax"],
            other => {
                return Err(spec_err(format!("unknown graph family '{other}' (expected er, rsf or wei)")))
            }
        };
        if let Some(k) = values.keys().find(|k| !allowed.contains(k)) {
            return Err(spec_err(format!("unknown key '{k}' for {family}")));
        }
        let mut f = Fields { family, values };
        let spec = match family {
            "er" => {
                let n = f.required("n")?;
                let k = f.required("k")?;
                Self::Er { n, k }
            }
            "rsf" => {
                let n: usize = f.required("n")?;
                let gamma = f.required("gamma")?;
                let k_min = f.optional("kmin")?.unwrap_or(1);
                let k_max = f.optional("kmax")?.unwrap_or(n.saturating_sub(1));
                Self::Rsf { n, gamma, k_min, k_max }
            }
            "wei" => {
                let n: usize = f.required("n")?;
                let a = f.required("a")?;
                let c = f.required("c")?;
                let k_min: usize = f.optional("kmin")?.unwrap_or(1);
                let k_max = f.optional("kmax")?.unwrap_or((n / 10).max(k_min));
                Self::Wei { n, a, c, k_min, k_max }
            }
            _ => unreachable!("family checked above"),
        };
        f.finish()?;
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Er { n, k } => write!(f, "er:n={n},k={k}"),
            Self::Rsf { n, gamma, k_min, k_max } => {
                write!(f, "rsf:n={n},gamma={gamma},kmin={k_min},kmax={k_max}")
            }
            Self::Wei { n, a, c, k_min, k_max } => {
                write!(f, "wei:n={n},a={a},c={c},kmin={k_min},kmax={k_max}")
            }
        }
    }
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match *self {
            Self::Er { n, .. } | Self::Rsf { n, .. } | Self::Wei { n, .. } => n,
        }
    }

    pub fn degree_distribution(&self) -> Option<DegreeDistribution> {
        match *self {
            Self::Er { .. } => None,
            Self::Rsf { gamma, k_min, k_max, .. } => Some(DegreeDistribution::Pareto { gamma, k_min, k_max }),
            Self::Wei { a, c, k_min, k_max, .. } => Some(DegreeDistribution::Weibull { a, c, k_min, k_max }),
        }
    }

    /// Checks parameter ranges without generating anything.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::InvalidParameter(m) => Error::GraphSpec(m),
            other => other,
        };
        if self.n() > MAX_VERTICES {
            return Err(spec_err(format!("n={} exceeds the limit of {MAX_VERTICES} vertices", self.n())));
        }
        match *self {
            Self::Er { n, k } => {
                if n < 2 || !(k > 0.0 && k < (n - 1) as f64) {
                    return Err(spec_err(format!("er needs n >= 2 and 0 < k < n-1, got n={n} k={k}")));
                }
                Ok(())
            }
            _ => {
                let d = self.degree_distribution().expect("configuration-model family");
                d.validate(self.n()).map_err(wrap)?;
                d.check_support().map_err(wrap)
            }
        }
    }

    /// Generates the graph and returns its largest connected component.
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        let g = match *self {
            Self::Er { n, k } => generate_er(n, k, seed::derive(seed, "er", 0))?,
            _ => {
                let d = self.degree_distribution().expect("configuration-model family");
                let degrees = sample_degree_sequence(&d, self.n(), seed::derive(seed, "degrees", 0))?;
                let m = degrees.iter().sum::<usize>() / 2;
                generate_configuration_model(
                    &degrees,
                    seed::derive(seed, "wiring", 0),
                    DEFAULT_REWIRE_FACTOR * m.max(1),
                )?
            }
        };
        Ok(g.largest_connected_component().0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_forms() {
        assert_eq!("er:n=10000,k=20".parse::<GraphSpec>().unwrap(), GraphSpec::Er { n: 10000, k: 20.0 });
        assert_eq!(
            "rsf:n=10000,gamma=2.3".parse::<GraphSpec>().unwrap(),
            GraphSpec::Rsf { n: 10000, gamma: 2.3, k_min: 1, k_max: 9999 }
        );
        assert_eq!(
            " wei: n=10000, a=0.25, c=0.6 ".parse::<GraphSpec>().unwrap(),
            GraphSpec::Wei { n: 10000, a: 0.25, c: 0.6, k_min: 1, k_max: 1000 }
        );
        assert_eq!(
            "rsf:n=100,gamma=3,kmin=2,kmax=20".parse::<GraphSpec>().unwrap(),
            GraphSpec::Rsf { n: 100, gamma: 3.0, k_min: 2, k_max: 20 }
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["er:n=50,k=4.5", "rsf:n=100,gamma=2.3", "wei:n=300,a=0.25,c=0.6,kmax=40"] {
            let spec: GraphSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<GraphSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn errors_name_offending_token() {
        let cases = [
            ("xx:n=5", "xx"),
            ("er:n=5,k=abc", "abc"),
            ("er:n=10,q=3,k=2", "q"),
            ("er:n=10,kk=2", "kk"),
            ("er n=10", "er n=10"),
            ("er:n=10,n=11,k=2", "n"),
            ("er:n=10,k", "k"),
            ("rsf:n=100", "gamma"),
        ];
        for (spec, token) in cases {
            match spec.parse::<GraphSpec>() {
                Err(Error::GraphSpec(msg)) => assert!(msg.contains(token), "{spec}: {msg}"),
                other => panic!("{spec}: {other:?}"),
            }
        }
        assert!("er:n=10,k=0".parse::<GraphSpec>().is_err());
        assert!("rsf:n=10,gamma=0.5".parse::<GraphSpec>().is_err());
        assert!("wei:n=10,a=1,c=1,kmin=5,kmax=3".parse::<GraphSpec>().is_err());
        assert!("rsf:n=10,gamma=2,kmin=1,kmax=1".parse::<GraphSpec>().is_err());
        assert!("rsf:n=1111111111110000,gamma=2.3".parse::<GraphSpec>().is_err());
        assert!("er:n=1111111111110000,k=3".parse::<GraphSpec>().is_err());
    }

    #[test]
    fn generation_is_connected_and_seeded() {
        for s in ["er:n=300,k=6", "rsf:n=300,gamma=2.3", "wei:n=300,a=0.5,c=3"] {
            let spec: GraphSpec = s.parse().unwrap();
            let a = spec.generate(11).unwrap();
            assert!(a.is_connected(), "{s}");
            assert!(a.n() > 100, "{s}: {}", a.n());
            assert_eq!(a, spec.generate(11).unwrap());
        }
    }
}
