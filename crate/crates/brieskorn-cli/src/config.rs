//! Run configuration: a JSON document naming the model sizes, the
//! deformation family, an opposite frame, and the suites to execute.
//! Rationals are written as integers or `"p/q"` strings so nothing
//! passes through floating point.

use std::fmt;

use brieskorn::matrix::RatMat;
use brieskorn::opposite::Frame;
use brieskorn::{Rational, Ring};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad rational literal {text:?}: expected an integer or \"p/q\"")]
    BadRational { text: String },
    #[error("r = {r} is too small: the model needs r >= 2")]
    RankTooSmall { r: usize },
    #[error("N = {n} is too small: series degree bound must be at least 5")]
    DegreeTooSmall { n: u32 },
    #[error("K = {k} violates K >= r + 2 (r = {r})")]
    WeightCapTooSmall { k: u32, r: usize },
    #[error("unknown suite {name:?}; expected one of stability, canonical, theorem2, theorem1, gamma, period")]
    UnknownSuite { name: String },
    #[error("family {family} does not take the field {field:?}")]
    UnexpectedFamilyField { family: Family, field: &'static str },
    #[error("special-family function must vanish to order two: coefficients of degree 0 and 1 must be zero")]
    FunctionOrderTooLow,
    #[error("relative family needs exactly {expected} coefficient functions, got {got}")]
    WrongSpecCount { expected: usize, got: usize },
    #[error("coefficient function {index} must have exact order {index}: first nonzero coefficient at the wrong degree")]
    WrongSpecOrder { index: usize },
    #[error("frame matrix must be {rank} x {rank} for r = {r}")]
    FrameShape { rank: usize, r: usize },
    #[error("frame matrix must be unit lower-triangular")]
    FrameNotUnitLowerTriangular,
    #[error("environment override {var} = {value:?} is not a positive integer")]
    BadEnvOverride { var: &'static str, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Special,
    Nilpotent,
    Relative,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Special => write!(f, "special"),
            Family::Nilpotent => write!(f, "nilpotent"),
            Family::Relative => write!(f, "relative"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteName {
    Stability,
    Canonical,
    Theorem2,
    Theorem1,
    Gamma,
    Period,
}

impl SuiteName {
    pub fn parse(name: &str) -> Result<SuiteName, ConfigError> {
        match name {
            "stability" => Ok(SuiteName::Stability),
            "canonical" => Ok(SuiteName::Canonical),
            "theorem2" => Ok(SuiteName::Theorem2),
            "theorem1" => Ok(SuiteName::Theorem1),
            "gamma" => Ok(SuiteName::Gamma),
            "period" => Ok(SuiteName::Period),
            other => Err(ConfigError::UnknownSuite {
                name: other.to_owned(),
            }),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Stability => "stability",
            SuiteName::Canonical => "canonical",
            SuiteName::Theorem2 => "theorem2",
            SuiteName::Theorem1 => "theorem1",
            SuiteName::Gamma => "gamma",
            SuiteName::Period => "period",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rational in the document: a bare integer or a `"p/q"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

impl RationalSpec {
    pub fn parse(&self) -> Result<Rational, ConfigError> {
        match self {
            RationalSpec::Int(n) => Ok(Rational::from_int(*n)),
            RationalSpec::Text(text) => {
                let bad = || ConfigError::BadRational { text: text.clone() };
                let trimmed = text.trim();
                match trimmed.split_once('/') {
                    None => trimmed
                        .parse::<i64>()
                        .map(Rational::from_int)
                        .map_err(|_| bad()),
                    Some((p, q)) => {
                        let p: i64 = p.trim().parse().map_err(|_| bad())?;
                        let q: i64 = q.trim().parse().map_err(|_| bad())?;
                        if q == 0 {
                            return Err(bad());
                        }
                        Ok(Rational::new(p, q))
                    }
                }
            }
        }
    }
}

/// A frame in the document: either the three parameters `[a, b, c]`
/// or a full row-major unit lower-triangular matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FrameSpec {
    Params([RationalSpec; 3]),
    Matrix(Vec<Vec<RationalSpec>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub r: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub family: Family,
    #[serde(default)]
    pub h: Option<Vec<RationalSpec>>,
    #[serde(default)]
    pub h_specs: Option<Vec<Vec<RationalSpec>>>,
    #[serde(default)]
    pub frame: Option<FrameSpec>,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: u32,
}

fn default_samples() -> u32 {
    5
}

/// Overrides applied between parsing and validation: `VERIFY_N` and
/// `VERIFY_K` from the environment, suite list and seed from the
/// command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub suites: Vec<String>,
    pub seed: Option<u64>,
}

impl Overrides {
    /// Read `VERIFY_N` / `VERIFY_K` from the process environment.
    pub fn from_env() -> Result<Overrides, ConfigError> {
        let mut over = Overrides::default();
        over.n = read_env_u32("VERIFY_N")?;
        over.k = read_env_u32("VERIFY_K")?;
        Ok(over)
    }
}

fn read_env_u32(var: &'static str) -> Result<Option<u32>, ConfigError> {
    match std::env::var(var) {
        Ok(value) => value
            .trim()
            .parse::<u32>()
            .map(Some)
            .map_err(|_| ConfigError::BadEnvOverride { var, value }),
        Err(_) => Ok(None),
    }
}

/// Fully parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub r: usize,
    pub n: u32,
    pub k: u32,
    pub family: Family,
    pub h: Option<Vec<Rational>>,
    pub h_specs: Option<Vec<Vec<Rational>>>,
    pub frame: Option<Vec<Vec<Rational>>>,
    pub suites: Vec<SuiteName>,
    pub seed: u64,
    pub samples: u32,
}

impl RunConfig {
    pub fn rank(&self) -> usize {
        self.r + 1
    }

    /// The configured frame, or the identity when none was given.
    pub fn build_frame(&self) -> Frame {
        match &self.frame {
            None => Frame::identity(self.rank()),
            Some(rows) => {
                let mut m = RatMat::zeros(rows.len(), rows.len());
                for (i, row) in rows.iter().enumerate() {
                    for (j, value) in row.iter().enumerate() {
                        m[(i, j)] = value.clone();
                    }
                }
                Frame::from_matrix(m).expect("validated at config time")
            }
        }
    }
}

pub fn parse_document(text: &str) -> Result<RawConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn resolve(raw: RawConfig, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let n = overrides.n.unwrap_or(raw.n);
    let k = overrides.k.unwrap_or(raw.k);
    let r = raw.r;

    if r < 2 {
        return Err(ConfigError::RankTooSmall { r });
    }
    if n < 5 {
        return Err(ConfigError::DegreeTooSmall { n });
    }
    if k < r as u32 + 2 {
        return Err(ConfigError::WeightCapTooSmall { k, r });
    }

    let family = raw.family;
    match family {
        Family::Special | Family::Nilpotent => {
            if raw.h_specs.is_some() {
                return Err(ConfigError::UnexpectedFamilyField {
                    family,
                    field: "h_specs",
                });
            }
        }
        Family::Relative => {
            if raw.h.is_some() {
                return Err(ConfigError::UnexpectedFamilyField { family, field: "h" });
            }
        }
    }
    if family == Family::Nilpotent && raw.h.is_some() {
        return Err(ConfigError::UnexpectedFamilyField { family, field: "h" });
    }

    let h = match raw.h {
        None => None,
        Some(specs) => {
            let coeffs: Vec<Rational> =
                specs.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
            if coeffs.iter().take(2).any(|c| !c.is_zero()) {
                return Err(ConfigError::FunctionOrderTooLow);
            }
            Some(coeffs)
        }
    };

    let h_specs = match raw.h_specs {
        None => None,
        Some(lists) => {
            if lists.len() != r - 1 {
                return Err(ConfigError::WrongSpecCount {
                    expected: r - 1,
                    got: lists.len(),
                });
            }
            let mut parsed = Vec::with_capacity(lists.len());
            for (offset, list) in lists.iter().enumerate() {
                let order = offset + 2;
                let coeffs: Vec<Rational> =
                    list.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
                let first_nonzero = coeffs.iter().position(|c| !c.is_zero());
                if first_nonzero != Some(order) {
                    return Err(ConfigError::WrongSpecOrder { index: order });
                }
                parsed.push(coeffs);
            }
            Some(parsed)
        }
    };

    let rank = r + 1;
    let frame = match raw.frame {
        None => None,
        Some(FrameSpec::Params([a, b, c])) => {
            let (a, b, c) = (a.parse()?, b.parse()?, c.parse()?);
            let m = Frame::from_params(rank, &a, &b, &c)
                .expect("parameter frame is unit lower-triangular by construction");
            Some(matrix_rows(m.matrix()))
        }
        Some(FrameSpec::Matrix(rows)) => {
            if rows.len() != rank || rows.iter().any(|row| row.len() != rank) {
                return Err(ConfigError::FrameShape { rank, r });
            }
            let mut parsed = vec![vec![Rational::zero(); rank]; rank];
            for (i, row) in rows.iter().enumerate() {
                for (j, value) in row.iter().enumerate() {
                    parsed[i][j] = value.parse()?;
                }
            }
            for i in 0..rank {
                if parsed[i][i] != Rational::one() {
                    return Err(ConfigError::FrameNotUnitLowerTriangular);
                }
                for j in (i + 1)..rank {
                    if !parsed[i][j].is_zero() {
                        return Err(ConfigError::FrameNotUnitLowerTriangular);
                    }
                }
            }
            Some(parsed)
        }
    };

    let suite_names = if overrides.suites.is_empty() {
        raw.suites.clone()
    } else {
        overrides.suites.clone()
    };
    let suites: Vec<SuiteName> = suite_names
        .iter()
        .map(|s| SuiteName::parse(s))
        .collect::<Result<_, _>>()?;

    Ok(RunConfig {
        r,
        n,
        k,
        family,
        h,
        h_specs,
        frame,
        suites,
        seed: overrides.seed.unwrap_or(raw.seed),
        samples: raw.samples,
    })
}

fn matrix_rows(m: &RatMat) -> Vec<Vec<Rational>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].clone()).collect())
        .collect()
}
