use thiserror::Error;

/// Errors produced by the design toolkit.
#[derive(Debug, Error)]
pub enum SpdcError {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A wavelength fell outside the tabulated range of a crystal's Sellmeier set.
    #[error("wavelength {wavelength:.6e} m outside the valid range [{min:.6e}, {max:.6e}] m of {crystal} axis {axis}")]
    OutsideTransparency {
        crystal: String,
        axis: String,
        wavelength: f64,
        min: f64,
        max: f64,
    },

    /// A transverse wavevector at or beyond the field's total wavevector.
    #[error("evanescent {field}: |q| = {q:.6e} rad/m >= k = {k:.6e} rad/m")]
    Evanescent { field: &'static str, q: f64, k: f64 },

    /// Bisection found no sign change or hit its iteration cap.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The collinear mismatch is already zero: no grating is required.
    #[error("no grating needed: collinear mismatch {mismatch:.3e} rad/m is within tolerance")]
    NoGratingNeeded { mismatch: f64 },

    /// A collection mode does not overlap the amplitude.
    #[error("degenerate coupling on the {arm} arm: singles probability {value:.3e} below floor")]
    DegenerateCoupling { arm: &'static str, value: f64 },

    /// A pipeline stage failed.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SpdcError>,
    },

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SpdcError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SpdcError::Domain(msg.into())
    }

    /// Wrap an error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        SpdcError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for failures of a numeric procedure rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        match self {
            SpdcError::Convergence(_) | SpdcError::DegenerateCoupling { .. } => true,
            SpdcError::Stage { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SpdcError>;

/// Check that every value is strictly positive and finite.
pub(crate) fn require_positive(what: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SpdcError::domain(format!("{what} must be positive and finite, got {value}")))
    }
}
