//! Model files: JSON with complex numbers as `[re, im]`, matrices as lists
//! of rows and multi-indices as integer arrays.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use lpme_core::fourier::{FourierOperatorSeries, FrequencyVector, MultiIndex, DEFAULT_TRUNCATION};
use lpme_core::linalg::{CMatrix, C64};
use lpme_core::model::{
    p_series_from_generators, BathSpectrum, GeneratorTerm, LambShiftSpectrum, ProfileShape,
    ReducedModel,
};
use lpme_core::Tolerances;

use crate::error::{CliError, CliResult};
use crate::format::to_json;

pub const SCHEMA_VERSION: u32 = 1;

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub frequencies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_series: Option<Vec<SeriesTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_generator: Option<Vec<DriveTerm>>,
    pub h_bar: ComplexRows,
    pub couplings: Vec<ComplexRows>,
    pub bath: BathFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i32>,
    #[serde(default, skip_serializing_if = "ToleranceOverrides::is_empty")]
    pub tolerances: ToleranceOverrides,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesTerm {
    pub n: Vec<i32>,
    pub matrix: ComplexRows,
}

/// `amplitude · shape(harmonic · θ_axis) · generator` in the exponent of
/// `p̂(θ) = exp(−i Σ …)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveTerm {
    pub generator: ComplexRows,
    pub axis: usize,
    pub amplitude: f64,
    #[serde(default = "one")]
    pub harmonic: i32,
    pub shape: DriveShape,
}

fn one() -> i32 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveShape {
    Sin,
    CosMinusOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathFile {
    pub spectral_density: SpectralDensityFile,
    #[serde(default)]
    pub lamb_shift: LambShiftFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralDensityFile {
    Flat { gamma: f64 },
    OhmicKms { kappa: f64, omega_c: f64, beta: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambShiftFile {
    #[default]
    Zero,
    Constant { value: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermiticity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub congruence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_box: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump_drop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<f64>,
}

impl ToleranceOverrides {
    pub fn is_empty(&self) -> bool {
        *self == ToleranceOverrides::default()
    }

    /// Fields set in `other` win.
    pub fn merged(&self, other: &ToleranceOverrides) -> ToleranceOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                ToleranceOverrides { $($f: other.$f.or(self.$f)),* }
            };
        }
        pick!(
            hermiticity, cluster, unitarity, rational, congruence, search_box, truncation_loss,
            jump_drop, psd, spectral, zero_eigenvalue, conjugation, condition_limit, integrator
        )
    }

    pub fn apply(&self, base: Tolerances) -> Tolerances {
        macro_rules! set {
            ($($f:ident),*) => {
                Tolerances { $($f: self.$f.unwrap_or(base.$f)),* }
            };
        }
        set!(
            hermiticity, cluster, unitarity, rational, congruence, search_box, truncation_loss,
            jump_drop, psd, spectral, zero_eigenvalue, conjugation, condition_limit, integrator
        )
    }
}

pub fn matrix_from_rows(rows: &ComplexRows) -> CliResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Core(lpme_core::Error::InvalidInput(format!(
            "matrices must be square and non-empty, got {} rows of lengths {:?}",
            n,
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        ))));
    }
    let data = rows.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect();
    Ok(CMatrix::from_row_major(n, n, data)?)
}

pub fn matrix_to_rows(m: &CMatrix) -> ComplexRows {
    m.as_slice()
        .chunks(m.cols())
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

impl ModelFile {
    pub fn truncation(&self) -> i32 {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    /// Builds the (unvalidated) model with the Fourier box `trunc`.
    pub fn to_model(&self, trunc: i32) -> CliResult<ReducedModel> {
        let omega = FrequencyVector::new(self.frequencies.clone())?;
        let r = omega.r();
        let h_bar = matrix_from_rows(&self.h_bar)?;
        let d = h_bar.rows();
        let p = match (&self.p_series, &self.p_generator) {
            (Some(terms), None) => FourierOperatorSeries::from_coeffs(
                r,
                d,
                trunc,
                terms
                    .iter()
                    .map(|t| Ok((MultiIndex::new(t.n.clone()), matrix_from_rows(&t.matrix)?)))
                    .collect::<CliResult<Vec<_>>>()?,
            )?,
            (None, Some(terms)) => {
                let terms = terms
                    .iter()
                    .map(|t| {
                        Ok(GeneratorTerm {
                            generator: matrix_from_rows(&t.generator)?,
                            axis: t.axis,
                            amplitude: t.amplitude,
                            harmonic: t.harmonic,
                            shape: match t.shape {
                                DriveShape::Sin => ProfileShape::Sin,
                                DriveShape::CosMinusOne => ProfileShape::CosMinusOne,
                            },
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                p_series_from_generators(r, d, trunc, &terms)?.series
            }
            _ => {
                return Err(CliError::Usage(
                    "model file needs exactly one of p_series and p_generator".into(),
                ))
            }
        };
        let couplings = self
            .couplings
            .iter()
            .map(matrix_from_rows)
            .collect::<CliResult<Vec<_>>>()?;
        let h = match self.bath.spectral_density {
            SpectralDensityFile::Flat { gamma } => BathSpectrum::flat(gamma),
            SpectralDensityFile::OhmicKms { kappa, omega_c, beta } => {
                BathSpectrum::ohmic_kms(kappa, omega_c, beta)
            }
        };
        let bath = h.with_zeta(match self.bath.lamb_shift {
            LambShiftFile::Zero => LambShiftSpectrum::Zero,
            LambShiftFile::Constant { value } => LambShiftSpectrum::Constant(value),
        });
        Ok(ReducedModel::new(omega, p, h_bar, couplings, bath)?)
    }
}

pub fn parse_model_file(text: &str, path: &Path) -> CliResult<ModelFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ModelFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            path: path.to_path_buf(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::SchemaVersionMismatch {
            path: path.to_path_buf(),
            found: file.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(file)
}

pub fn read_model_file(path: &Path) -> CliResult<ModelFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_model_file(&text, path)
}

/// Reads a model file and builds the model with its own truncation.
pub fn load_model(path: &Path) -> CliResult<ReducedModel> {
    let file = read_model_file(path)?;
    file.to_model(file.truncation())
}

pub fn save_model(file: &ModelFile, path: &Path) -> CliResult<()> {
    fs::write(path, to_json(file)).map_err(|e| CliError::io(path, e))
}
