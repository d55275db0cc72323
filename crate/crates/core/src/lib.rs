//! Exact symbolic Fedosov quantization of symplectic Lie algebroids on a
//! single polynomial chart.

pub mod algebroid;
pub mod error;
pub mod fedosov;
pub mod form;
pub mod jets;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod quantization;
pub mod sample;
pub mod scalar;
pub mod series;
pub mod text;
pub mod torus;
pub mod weyl;

pub use algebroid::{AlgebroidChart, Catalogue};
pub use error::{Error, Result};
pub use fedosov::{
    characteristic_class, curvature, fedosov_construct, gauge_apply, gauge_solve, Connection, CurvatureClass,
    GaugeOutcome, WeylFormSection,
};
pub use form::{Coeff, Form};
pub use jets::{EDiffOp, EJet};
pub use poly::{vars, Monomial, MultiPoly, Vars};
pub use quantization::{bidiff_tensor, verify_star, Quantizer, StarTensor};
pub use scalar::GaussianRational;
pub use series::HbarSeries;
pub use torus::{fourier_moyal, trace_torus, FourierPoly};
pub use weyl::{WKey, WeylContext, WeylElement};
