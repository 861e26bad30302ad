//! JSON matrix literals shared by every front end.
//!
//! An exchange matrix is written `{"n": 2, "B": [[0,1],[-1,0]]}`; an
//! extended matrix `{"n": 2, "m": 2, "Bt": [[0,1],[-1,0],[1,0],[0,1]]}`
//! with `m + n` rows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{ExtendedExchangeMatrix, IntMatrix, MatrixError};

#[derive(Debug, Error)]
pub enum LiteralError {
    #[error("invalid matrix literal: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("declared size does not match the matrix: {0}")]
    Size(String),
    #[error("extended matrix does not have principal coefficients (bottom block must be the {0}x{0} identity)")]
    NotPrincipal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixLiteral {
    Extended {
        n: usize,
        m: usize,
        #[serde(rename = "Bt")]
        bt: IntMatrix,
    },
    Exchange {
        n: usize,
        #[serde(rename = "B")]
        b: IntMatrix,
    },
}

impl MatrixLiteral {
    pub fn parse(text: &str) -> Result<Self, LiteralError> {
        let lit: Self = serde_json::from_str(text)?;
        lit.check_size()?;
        Ok(lit)
    }

    pub fn exchange(b: IntMatrix) -> Self {
        Self::Exchange { n: b.rows(), b }
    }

    fn check_size(&self) -> Result<(), LiteralError> {
        match self {
            Self::Exchange { n, b } => {
                if b.rows() != *n || b.cols() != *n {
                    return Err(LiteralError::Size(format!(
                        "n = {n} but B is {}x{}",
                        b.rows(),
                        b.cols()
                    )));
                }
            }
            Self::Extended { n, m, bt } => {
                if bt.rows() != n + m || bt.cols() != *n {
                    return Err(LiteralError::Size(format!(
                        "n = {n}, m = {m} but Bt is {}x{}",
                        bt.rows(),
                        bt.cols()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The extended matrix, with `B` over the identity when only `B` is given.
    pub fn extended(&self) -> Result<ExtendedExchangeMatrix, LiteralError> {
        self.check_size()?;
        Ok(match self {
            Self::Exchange { b, .. } => ExtendedExchangeMatrix::principal(b)?,
            Self::Extended { n, bt, .. } => ExtendedExchangeMatrix::new(bt.clone(), *n)?,
        })
    }

    /// The initial exchange matrix of a principal-coefficient pattern.
    pub fn principal_exchange(&self) -> Result<IntMatrix, LiteralError> {
        let ext = self.extended()?;
        if !ext.is_principal() {
            return Err(LiteralError::NotPrincipal(ext.rank()));
        }
        Ok(ext.exchange())
    }
}
