//! JSON file formats: model specs, Hamiltonian recipes, derivation
//! coefficients, states, and check reports. Everything round-trips through
//! serde with stable field order, so identical runs produce byte-identical
//! reports.

use anyhow::{anyhow, bail, Context, Result};
use ncqm_core::axioms::{CheckReport, Verdict};
use ncqm_core::derivations::{DerivationCoeffs, Decomposition, OppPoly, Tensor4};
use ncqm_core::distance::StateSpec;
use ncqm_core::dynamics::{DiracSpec, HamiltonianSpec, WordPoly};
use ncqm_core::linalg::{CMatrix, C64};
use ncqm_core::models::{ModelSpec, ThetaSpec, TorusMode};
use serde::{Deserialize, Serialize};

fn c64(pair: [f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

/// `p/q` strings or plain numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaFile {
    Ratio(String),
    Value(f64),
}

impl ThetaFile {
    pub fn to_spec(&self) -> Result<ThetaSpec> {
        match self {
            ThetaFile::Value(v) => Ok(ThetaSpec::Real(*v)),
            ThetaFile::Ratio(s) => {
                let (p, q) = s
                    .split_once('/')
                    .ok_or_else(|| anyhow!("rational theta must look like \"p/q\", got {s:?}"))?;
                let p: i64 = p.trim().parse().context("numerator of theta")?;
                let q: i64 = q.trim().parse().context("denominator of theta")?;
                if q <= 0 {
                    bail!("theta denominator must be positive");
                }
                Ok(ThetaSpec::Rational { p, q })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub family: String,
    pub params: serde_json::Value,
    #[serde(default)]
    pub window_margin: usize,
}

fn param<T: for<'de> Deserialize<'de>>(params: &serde_json::Value, key: &str) -> Result<T> {
    let v = params.get(key).ok_or_else(|| anyhow!("missing model parameter '{key}'"))?;
    serde_json::from_value(v.clone()).with_context(|| format!("model parameter '{key}'"))
}

fn mode_of(params: &serde_json::Value) -> Result<TorusMode> {
    let s: String = param(params, "mode")?;
    match s.as_str() {
        "cyclic" => Ok(TorusMode::Cyclic),
        "truncated" => Ok(TorusMode::Truncated),
        other => bail!("unknown lattice mode '{other}' (expected cyclic|truncated)"),
    }
}

impl ModelFile {
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let p = &self.params;
        match self.family.as_str() {
            "finite_sum" => Ok(ModelSpec::FiniteSum { blocks: param(p, "blocks")? }),
            "almost_commutative" => Ok(ModelSpec::AlmostCommutative {
                modes: param(p, "modes")?,
                fiber: param(p, "fiber")?,
                window_margin: self.window_margin,
            }),
            "moyal" => Ok(ModelSpec::Moyal {
                levels: param(p, "levels")?,
                theta: param(p, "theta")?,
                window_margin: self.window_margin,
            }),
            "double_torus" => Ok(ModelSpec::DoubleTorus {
                size: param(p, "size")?,
                mode: mode_of(p)?,
                window_margin: self.window_margin,
            }),
            "nc_torus" => {
                let theta: ThetaFile = param(p, "theta")?;
                Ok(ModelSpec::NcTorus {
                    theta: theta.to_spec()?,
                    size: param(p, "size")?,
                    mode: mode_of(p)?,
                    window_margin: self.window_margin,
                })
            }
            other => bail!("unknown model family '{other}'"),
        }
    }
}

/// One word-polynomial term: `{"word": ["U1", "U2*"], "coeff": [re, im]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermFile {
    pub word: Vec<String>,
    pub coeff: [f64; 2],
}

pub fn word_poly(terms: &[TermFile]) -> WordPoly {
    WordPoly {
        terms: terms.iter().map(|t| (t.word.clone(), c64(t.coeff))).collect(),
    }
}

fn poly_or_default(v: Option<&Vec<TermFile>>) -> WordPoly {
    v.map(|t| word_poly(t)).unwrap_or_else(WordPoly::zero)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub family: String,
    #[serde(default)]
    pub g: Option<Vec<TermFile>>,
    #[serde(default)]
    pub a: Option<Vec<Vec<TermFile>>>,
    #[serde(default)]
    pub a0: Option<Vec<TermFile>>,
    #[serde(default)]
    pub z: Option<Vec<Vec<TermFile>>>,
    #[serde(default)]
    pub zeta: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub c: Option<[[f64; 2]; 2]>,
    /// Dense Hermitian matrix as rows of [re, im] pairs (toy mixing term).
    #[serde(default)]
    pub mixing: Option<Vec<Vec<[f64; 2]>>>,
}

pub fn dense_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    let mut m = CMatrix::zeros(n, rows.first().map(|r| r.len()).unwrap_or(0));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m.cols() {
            bail!("ragged matrix rows");
        }
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = c64(*entry);
        }
    }
    Ok(m)
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|cx| [m[(r, cx)].re, m[(r, cx)].im]).collect())
        .collect()
}

impl HamiltonianFile {
    fn pair(&self, what: &str) -> Result<[WordPoly; 2]> {
        match &self.a {
            None => Ok([WordPoly::zero(), WordPoly::zero()]),
            Some(list) if list.len() == 2 => Ok([word_poly(&list[0]), word_poly(&list[1])]),
            Some(list) => bail!("{what} expects exactly 2 gauge polynomials, got {}", list.len()),
        }
    }

    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        match self.family.as_str() {
            "finite_sum" => Ok(HamiltonianSpec::FiniteSum {
                a0: poly_or_default(self.a0.as_ref()),
                mixing: self.mixing.as_ref().map(|rows| dense_matrix(rows)).transpose()?,
            }),
            "almost_commutative" => Ok(HamiltonianSpec::AlmostCommutative {
                g: self
                    .g
                    .as_ref()
                    .map(|t| word_poly(t))
                    .unwrap_or_else(|| WordPoly::constant(C64::new(1.0, 0.0))),
                a: self.a.as_ref().map(|l| word_poly(&l[0])).unwrap_or_else(WordPoly::zero),
                a0: poly_or_default(self.a0.as_ref()),
            }),
            "moyal" => Ok(HamiltonianSpec::Moyal {
                zeta: self.zeta.ok_or_else(|| anyhow!("moyal hamiltonian requires 'zeta'"))?,
                a: self.pair("moyal")?,
                a0: poly_or_default(self.a0.as_ref()),
            }),
            "double_torus" => {
                let z = self.z.as_ref().ok_or_else(|| anyhow!("double_torus hamiltonian requires 'z'"))?;
                if z.len() != 4 {
                    bail!("double_torus expects z1..z4, got {} entries", z.len());
                }
                Ok(HamiltonianSpec::DoubleTorus {
                    z: [word_poly(&z[0]), word_poly(&z[1]), word_poly(&z[2]), word_poly(&z[3])],
                })
            }
            "nc_torus" => Ok(HamiltonianSpec::NcTorus {
                c: self.c.ok_or_else(|| anyhow!("nc_torus hamiltonian requires 'c'"))?,
                a: self.pair("nc_torus")?,
                a0: poly_or_default(self.a0.as_ref()),
            }),
            other => bail!("unknown hamiltonian family '{other}'"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowFile {
    pub margin: usize,
    pub kept_dim: usize,
    pub total_dim: usize,
}

/// Serialized check report, schema-stable for downstream tooling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub check: String,
    pub model: String,
    pub residuals: Vec<(String, f64)>,
    pub tolerance: f64,
    pub window: WindowFile,
    pub verdict: String,
    pub notes: Vec<String>,
}

impl ReportFile {
    pub fn from_report(r: &CheckReport) -> ReportFile {
        ReportFile {
            check: r.check.clone(),
            model: r.model.clone(),
            residuals: r.residuals.clone(),
            tolerance: r.tolerance,
            window: WindowFile {
                margin: r.window.margin,
                kept_dim: r.window.kept_dim,
                total_dim: r.window.total_dim,
            },
            verdict: match r.verdict {
                Verdict::Pass => "pass".into(),
                Verdict::Fail => "fail".into(),
            },
            notes: r.notes.clone(),
        }
    }
}

/// Sparse tensor entry for derivation coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub q: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffFile {
    pub radius: usize,
    pub theta: ThetaFile,
    pub c1: Vec<CoeffEntry>,
    pub c2: Vec<CoeffEntry>,
}

impl CoeffFile {
    pub fn to_coeffs(&self) -> Result<DerivationCoeffs> {
        let lambda = self.theta.to_spec()?.lambda();
        let mut c1 = Tensor4::zeros(self.radius);
        let mut c2 = Tensor4::zeros(self.radius);
        let r = self.radius as i64;
        for (tensor, entries) in [(&mut c1, &self.c1), (&mut c2, &self.c2)] {
            for e in entries.iter() {
                if e.m.abs() > r || e.n.abs() > r || e.p.abs() > r || e.q.abs() > r {
                    bail!("coefficient index ({},{},{},{}) outside radius {}", e.m, e.n, e.p, e.q, self.radius);
                }
                tensor.set(e.m, e.n, e.p, e.q, C64::new(e.re, e.im));
            }
        }
        Ok(DerivationCoeffs { radius: self.radius, lambda, c1, c2 })
    }
}

fn tensor_entries(t: &Tensor4) -> Vec<CoeffEntry> {
    t.indices()
        .filter_map(|(m, n, p, q)| {
            let v = t.get(m, n, p, q);
            (v.norm() > 0.0).then_some(CoeffEntry { m, n, p, q, re: v.re, im: v.im })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyEntry {
    pub p: i64,
    pub q: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub radius: usize,
    pub standard: [Vec<PolyEntry>; 2],
    pub inner: Vec<CoeffEntry>,
    pub branch_agreement: f64,
}

impl DecompositionFile {
    pub fn from_decomposition(d: &Decomposition) -> DecompositionFile {
        let poly_entries = |poly: &OppPoly| -> Vec<PolyEntry> {
            let r = poly.radius() as i64;
            let mut out = Vec::new();
            for p in -r..=r {
                for q in -r..=r {
                    let v = poly.get(p, q);
                    if v.norm() > 0.0 {
                        out.push(PolyEntry { p, q, re: v.re, im: v.im });
                    }
                }
            }
            out
        };
        DecompositionFile {
            radius: d.inner.radius(),
            standard: [poly_entries(&d.standard[0]), poly_entries(&d.standard[1])],
            inner: tensor_entries(&d.inner),
            branch_agreement: d.branch_agreement,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    Pure { vector: Vec<[f64; 2]> },
    Density { matrix: Vec<Vec<[f64; 2]>> },
}

impl StateFile {
    pub fn to_state(&self) -> Result<StateSpec> {
        Ok(match self {
            StateFile::Pure { vector } => StateSpec::Pure(vector.iter().map(|p| c64(*p)).collect()),
            StateFile::Density { matrix } => StateSpec::Density(dense_matrix(matrix)?),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiracFile {
    pub c: [[f64; 2]; 2],
    #[serde(default)]
    pub a: Option<Vec<Vec<TermFile>>>,
    /// Defaults to the Pauli x/y pair when omitted.
    #[serde(default)]
    pub sigma: Option<[Vec<Vec<[f64; 2]>>; 2]>,
}

impl DiracFile {
    pub fn to_spec(&self) -> Result<DiracSpec> {
        let mut spec = DiracSpec::flat();
        spec.c = self.c;
        if let Some(a) = &self.a {
            if a.len() != 2 {
                bail!("dirac gauge term expects 2 polynomials");
            }
            spec.a = [word_poly(&a[0]), word_poly(&a[1])];
        }
        if let Some(sig) = &self.sigma {
            spec.sigma = [dense_matrix(&sig[0])?, dense_matrix(&sig[1])?];
        }
        Ok(spec)
    }
}

/// Distance problem: an explicit Dirac matrix or a torus Dirac recipe,
/// plus the two states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceFile {
    #[serde(default)]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub dirac: Option<DiracFile>,
    pub chi: StateFile,
    pub phi: StateFile,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceOutFile {
    pub distance: f64,
    pub lower: f64,
    pub upper: f64,
    pub iters: usize,
    pub converged: bool,
    pub degenerate: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Everything one `check` invocation ran with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub model: ModelFile,
    pub hamiltonian: HamiltonianFile,
    pub checks: Vec<String>,
    pub seed: u64,
    pub tolerance: f64,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error(de).with_context(|| format!("parsing {}", path.display()))
}

fn serde_path_to_error<'de, T: Deserialize<'de>>(
    de: &mut serde_json::Deserializer<serde_json::de::StrRead<'de>>,
) -> Result<T> {
    T::deserialize(de).map_err(|e| anyhow!("{e} (line {}, column {})", e.line(), e.column()))
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// RFC 4180 quoting: wrap fields containing separators or quotes.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
