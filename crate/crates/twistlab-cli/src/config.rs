//! Run configuration: TOML first, JSON accepted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use twistlab::standard_subspace::{make_standard, AntilinearMap};
use twistlab::twist::{gallery, GalleryParams};
use twistlab::{ComplexMatrix, PositiveSpectral, StandardSubspace, Twist};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Classify,
    Fock,
    Npoint,
    Modular,
    Nuclearity,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 5] = [
        Suite::Classify,
        Suite::Fock,
        Suite::Npoint,
        Suite::Modular,
        Suite::Nuclearity,
    ];

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "classify" => Ok(Suite::Classify),
            "fock" => Ok(Suite::Fock),
            "npoint" => Ok(Suite::Npoint),
            "modular" => Ok(Suite::Modular),
            "nuclearity" => Ok(Suite::Nuclearity),
            "all" => Ok(Suite::All),
            other => Err(CliError::Config(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(rename = "N", default = "default_fock_n")]
    pub fock_n: usize,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
}

fn default_n_max() -> usize {
    5
}
fn default_fock_n() -> usize {
    4
}
fn default_max_degree() -> usize {
    3
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            n_max: default_n_max(),
            fock_n: default_fock_n(),
            max_degree: default_max_degree(),
        }
    }
}

/// Pass thresholds. `exact` covers algebraic identities, `analytic` the
/// n-point, KMS and Tomita checks, `floor` the default for expected failures.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_exact")]
    pub exact: f64,
    #[serde(default = "default_analytic")]
    pub analytic: f64,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_exact() -> f64 {
    1e-10
}
fn default_analytic() -> f64 {
    1e-8
}
fn default_floor() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: default_exact(),
            analytic: default_analytic(),
            floor: default_floor(),
        }
    }
}

/// `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let data = self
            .data
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.rows, self.cols, data)
            .map_err(|e| CliError::Config(format!("matrix: {e}")))
    }
}

/// A diagonal given as a list of reals, or a full matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixValue {
    Diag(Vec<f64>),
    Full(MatrixJson),
}

impl MatrixValue {
    fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        match self {
            MatrixValue::Diag(v) => Ok(ComplexMatrix::from_real_diag(v)),
            MatrixValue::Full(m) => m.to_matrix(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub gallery: Option<String>,
    pub d: Option<usize>,
    pub q: Option<f64>,
    pub a: Option<MatrixValue>,
    pub b: Option<MatrixValue>,
    pub e: Option<MatrixValue>,
    pub e_tilde: Option<MatrixValue>,
    /// Explicit d²×d² matrix, inline.
    pub matrix: Option<MatrixJson>,
    /// Explicit matrix in a JSON file, relative to the config file.
    pub matrix_file: Option<PathBuf>,
}

impl TwistSpec {
    pub fn build(&self, base: &Path) -> Result<Twist, CliError> {
        let explicit = match (&self.matrix, &self.matrix_file) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give matrix or matrix_file, not both".into(),
                ))
            }
            (Some(m), None) => Some(m.to_matrix()?),
            (None, Some(p)) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let m: MatrixJson = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                Some(m.to_matrix()?)
            }
            (None, None) => None,
        };
        if let Some(m) = explicit {
            if self.gallery.is_some() {
                return Err(CliError::Config(
                    "give a gallery name or an explicit matrix, not both".into(),
                ));
            }
            let d = (m.rows() as f64).sqrt().round() as usize;
            if d * d != m.rows() {
                return Err(CliError::Config(format!(
                    "twist matrix has {} rows, not a square d²",
                    m.rows()
                )));
            }
            if let Some(dd) = self.d {
                if dd != d {
                    return Err(CliError::Config(format!(
                        "d = {dd} but the matrix acts on ({d})^2"
                    )));
                }
            }
            return Twist::new(m, d).map_err(|e| CliError::Config(format!("twist: {e}")));
        }
        let name = self
            .gallery
            .as_deref()
            .ok_or_else(|| CliError::Config("twist needs gallery or matrix".into()))?;
        let mut p = GalleryParams::d(self.d.unwrap_or(2));
        p.q = self.q;
        p.a = self.a.as_ref().map(MatrixValue::to_matrix).transpose()?;
        p.b = self.b.as_ref().map(MatrixValue::to_matrix).transpose()?;
        p.e = self.e.as_ref().map(MatrixValue::to_matrix).transpose()?;
        p.e_tilde = self
            .e_tilde
            .as_ref()
            .map(MatrixValue::to_matrix)
            .transpose()?;
        gallery(name, &p).map_err(|e| CliError::Config(format!("twist '{name}': {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JKind {
    /// Basis reversal composed with conjugation.
    Reversal,
    /// Plain conjugation; needs Δ with a spectrum symmetric under inversion in place.
    Conj,
}

/// Δ diagonal in the standard basis together with a choice of J.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub delta: Vec<f64>,
    #[serde(default = "default_j")]
    pub j: JKind,
}

fn default_j() -> JKind {
    JKind::Reversal
}

impl SubspaceSpec {
    pub fn build(&self) -> Result<StandardSubspace, CliError> {
        let d = self.delta.len();
        let delta = PositiveSpectral::from_diag(&self.delta)
            .map_err(|e| CliError::Config(format!("delta: {e}")))?;
        let j = match self.j {
            JKind::Reversal => AntilinearMap::swap_conjugation(d),
            JKind::Conj => AntilinearMap::conjugation(d),
        };
        make_standard(delta, j).map_err(|e| CliError::Config(format!("subspace: {e}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub name: String,
    pub twist: TwistSpec,
    pub subspace: SubspaceSpec,
    pub subspace_k: Option<SubspaceSpec>,
    /// Checks that must fail, with the residual floor they must reach.
    #[serde(default)]
    pub expect_fail: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub cutoffs: Cutoffs,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub cases: Vec<CaseSpec>,
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::All]
}

impl RunConfig {
    pub fn parse(text: &str, json: bool) -> Result<Self, CliError> {
        let cfg: RunConfig = if json {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json");
        Self::parse(&text, json)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.cases.is_empty() {
            return Err(CliError::Config("no cases".into()));
        }
        let c = &self.cutoffs;
        if c.n_max < 2 || c.fock_n < 1 || c.max_degree < 1 {
            return Err(CliError::Config(
                "cutoffs need n_max >= 2, N >= 1, max_degree >= 1".into(),
            ));
        }
        if c.max_degree > c.fock_n {
            return Err(CliError::Config(format!(
                "max_degree {} exceeds N {}",
                c.max_degree, c.fock_n
            )));
        }
        let t = &self.tolerances;
        if [t.exact, t.analytic, t.floor]
            .iter()
            .any(|x| !(x.is_finite() && *x > 0.0))
        {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Concrete suites in canonical order.
    pub fn selected_suites(&self) -> Vec<Suite> {
        if self.suites.contains(&Suite::All) {
            return Suite::CONCRETE.to_vec();
        }
        let mut s: Vec<Suite> = self.suites.clone();
        s.sort();
        s.dedup();
        s
    }
}
