use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} = {value:e} is outside the valid range [{min:e}, {max:e}]")]
    OutOfDomain {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("no guided mode at {wavelength_um} um")]
    NotGuided { wavelength_um: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no contour collapse in range: {0}")]
    NoCollapse(String),
    #[error("joint spectrum is identically zero")]
    ZeroSpectrum,
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Input,
            Error::OutOfDomain { .. } | Error::NotGuided { .. } | Error::NoCollapse(_) => {
                ErrorKind::Domain
            }
            Error::Numerical(_) | Error::ZeroSpectrum => ErrorKind::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
