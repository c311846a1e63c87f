//! Benchmark instances: generation from `(kind, sizes, seed)`, JSON
//! serialisation and content hashing.
//!
//! Matrices are stored as base64 strings of their entries in row-major
//! order, each a little-endian `f64`.

use std::fmt;
use std::str::FromStr;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::manifold::Point;
use crate::problems::{gen_rayleigh, gen_scaling, gen_spd_set, rayleigh_start, Capacity, Karcher, Problem, Rayleigh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Rayleigh,
    Karcher,
    Scaling,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rayleigh => "rayleigh",
            Self::Karcher => "karcher",
            Self::Scaling => "scaling",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" => Ok(Self::Rayleigh),
            "karcher" => Ok(Self::Karcher),
            "scaling" => Ok(Self::Scaling),
            other => Err(Error::Invalid(format!(
                "unknown problem '{other}' (expected rayleigh, karcher or scaling)"
            ))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generator parameters. `n` is used by Rayleigh, `m` by the SPD problems,
/// `cond` by Karcher.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub kind: ProblemKind,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond: Option<f64>,
    pub seed: u64,
}

impl InstanceSpec {
    /// Desk-scale defaults for each kind.
    pub fn defaults(kind: ProblemKind, seed: u64) -> Self {
        let (d, n, m, cond) = match kind {
            ProblemKind::Rayleigh => (200, Some(210), None, None),
            ProblemKind::Karcher => (20, None, Some(20), Some(1e4)),
            ProblemKind::Scaling => (10, None, Some(3), None),
        };
        Self { kind, d, n, m, cond, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let need = |v: Option<usize>, name: &str| {
            v.filter(|&x| x >= 1)
                .map(|_| ())
                .ok_or_else(|| Error::Invalid(format!("{} needs {name} >= 1", self.kind)))
        };
        if self.d < 1 {
            return Err(Error::Invalid("d must be >= 1".into()));
        }
        match self.kind {
            ProblemKind::Rayleigh => {
                if self.d < 2 {
                    return Err(Error::Invalid("rayleigh needs d >= 2".into()));
                }
                need(self.n, "n")
            }
            ProblemKind::Karcher => {
                need(self.m, "m")?;
                match self.cond {
                    Some(c) if c >= 1.0 && c.is_finite() => Ok(()),
                    Some(c) => Err(Error::Invalid(format!("karcher needs cond >= 1, got {c}"))),
                    None => Err(Error::Invalid("karcher needs cond".into())),
                }
            }
            ProblemKind::Scaling => need(self.m, "m"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Instance {
    Rayleigh(Rayleigh),
    Karcher(Karcher),
    Scaling(Capacity),
}

/// On-disk form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub spec: InstanceSpec,
    pub matrices: Vec<String>,
}

pub fn encode_matrix(m: &DMatrix<f64>) -> String {
    let mut bytes = Vec::with_capacity(m.len() * 8);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            bytes.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    B64.encode(bytes)
}

pub fn decode_matrix(s: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let bytes = B64
        .decode(s)
        .map_err(|e| Error::Invalid(format!("bad base64 matrix payload: {e}")))?;
    if bytes.len() != rows * cols * 8 {
        return Err(Error::Dimension(format!(
            "matrix payload has {} bytes, expected {} for {rows}x{cols}",
            bytes.len(),
            rows * cols * 8
        )));
    }
    let vals: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(DMatrix::from_row_slice(rows, cols, &vals))
}

impl Instance {
    pub fn generate(spec: &InstanceSpec) -> Result<Self> {
        spec.validate()?;
        let unwrap = |v: Option<usize>| v.expect("validated");
        Ok(match spec.kind {
            ProblemKind::Rayleigh => Self::Rayleigh(gen_rayleigh(spec.d, unwrap(spec.n), spec.seed)?),
            ProblemKind::Karcher => Self::Karcher(gen_spd_set(
                unwrap(spec.m),
                spec.d,
                spec.cond.expect("validated"),
                spec.seed,
            )?),
            ProblemKind::Scaling => Self::Scaling(gen_scaling(unwrap(spec.m), spec.d, spec.seed)?),
        })
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Self::Rayleigh(_) => ProblemKind::Rayleigh,
            Self::Karcher(_) => ProblemKind::Karcher,
            Self::Scaling(_) => ProblemKind::Scaling,
        }
    }

    pub fn problem(&self) -> &dyn Problem {
        match self {
            Self::Rayleigh(p) => p,
            Self::Karcher(p) => p,
            Self::Scaling(p) => p,
        }
    }

    pub fn matrices(&self) -> Vec<DMatrix<f64>> {
        match self {
            Self::Rayleigh(p) => vec![p.matrix().as_matrix().clone()],
            Self::Karcher(p) => p.matrices().iter().map(|a| a.coords().clone()).collect(),
            Self::Scaling(p) => p.ops().to_vec(),
        }
    }

    /// Rayleigh: random unit vector in the dominant hemisphere (init stream
    /// of `seed`). SPD problems: the identity.
    pub fn start(&self, seed: u64) -> Point {
        match self {
            Self::Rayleigh(p) => rayleigh_start(p, seed),
            other => other.problem().manifold().origin(),
        }
    }

    pub fn to_file(&self, spec: &InstanceSpec) -> InstanceFile {
        InstanceFile {
            spec: spec.clone(),
            matrices: self.matrices().iter().map(encode_matrix).collect(),
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let spec = &file.spec;
        spec.validate()?;
        let d = spec.d;
        let mats = file
            .matrices
            .iter()
            .map(|s| decode_matrix(s, d, d))
            .collect::<Result<Vec<_>>>()?;
        let expect = |n: usize| {
            if mats.len() == n {
                Ok(())
            } else {
                Err(Error::Dimension(format!("{} instance needs {n} matrices, file has {}", spec.kind, mats.len())))
            }
        };
        Ok(match spec.kind {
            ProblemKind::Rayleigh => {
                expect(1)?;
                Self::Rayleigh(Rayleigh::new(SymMatrix::new(mats[0].clone())?)?)
            }
            ProblemKind::Karcher => {
                expect(spec.m.expect("validated"))?;
                let sym = mats.into_iter().map(SymMatrix::new).collect::<Result<Vec<_>>>()?;
                Self::Karcher(Karcher::new(&sym)?)
            }
            ProblemKind::Scaling => {
                expect(spec.m.expect("validated"))?;
                Self::Scaling(Capacity::new(mats)?)
            }
        })
    }

    /// SHA-256 over the kind, the dimension and every matrix entry in
    /// little-endian byte order.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kind().as_str().as_bytes());
        for m in self.matrices() {
            h.update((m.nrows() as u64).to_le_bytes());
            h.update((m.ncols() as u64).to_le_bytes());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    h.update(m[(i, j)].to_le_bytes());
                }
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
