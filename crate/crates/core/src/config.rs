//! Tolerances and budgets, kept in one record and serialized into reports.

use crate::error::{Error, Result};

/// Working precision of the numeric layer (double-double).
pub const SUPPORTED_PRECISION_BITS: u32 = 106;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Config {
    pub precision_bits: u32,
    /// Relative gap needed between eigenvalue moduli and for `||λ₂λ₃| − 1|`.
    pub gap_tol: f64,
    /// Band around 1 inside which two moduli are treated as equal.
    pub unit_band: f64,
    /// Singular values below `rank_zero · σ_max` count as zero.
    pub rank_zero: f64,
    /// Singular values in `(rank_zero, rank_ambiguous) · σ_max` are ambiguous.
    pub rank_ambiguous: f64,
    /// Residual allowed for numeric invariance checks.
    pub residual_tol: f64,
    /// Eigenvector condition number above which a matrix is non-diagonalizable.
    pub cond_threshold: f64,
    /// Imaginary parts below this are real.
    pub real_tol: f64,
    pub burnside_max_len: usize,
    pub witness_max_len: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision_bits: SUPPORTED_PRECISION_BITS,
            gap_tol: 1e-6,
            unit_band: 1e-9,
            rank_zero: 1e-9,
            rank_ambiguous: 1e-7,
            residual_tol: 1e-10,
            cond_threshold: 1e8,
            real_tol: 1e-9,
            burnside_max_len: 6,
            witness_max_len: 8,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gap_tol", self.gap_tol),
            ("unit_band", self.unit_band),
            ("rank_zero", self.rank_zero),
            ("rank_ambiguous", self.rank_ambiguous),
            ("residual_tol", self.residual_tol),
            ("cond_threshold", self.cond_threshold),
            ("real_tol", self.real_tol),
        ];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {x}")));
            }
        }
        if self.rank_zero >= self.rank_ambiguous {
            return Err(Error::InvalidInput("rank_zero must be below rank_ambiguous".into()));
        }
        if self.unit_band > self.gap_tol {
            return Err(Error::InvalidInput("unit_band must not exceed gap_tol".into()));
        }
        if self.precision_bits == 0 || self.precision_bits > SUPPORTED_PRECISION_BITS {
            return Err(Error::InvalidInput(format!(
                "precision must be between 1 and {SUPPORTED_PRECISION_BITS} bits, got {}",
                self.precision_bits
            )));
        }
        if self.burnside_max_len == 0 || self.witness_max_len == 0 {
            return Err(Error::InvalidInput("word-length budgets must be at least 1".into()));
        }
        Ok(())
    }
}
