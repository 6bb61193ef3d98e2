//! Generalized numbers as sampled ε-nets, Bohr mean values of almost periodic
//! functions, spectra of Hermitian matrix nets and generalized transition
//! probabilities.

pub mod apf;
pub mod expr;
pub mod gnum;
pub mod mc;
pub mod serde_ext;
pub mod spectral;
pub mod tp;

pub use expr::{parse, Expr, ParseError, ParseErrorKind};
pub use gnum::{
    classify, combine, make_net, restrict, sharp_valuation, support, CombineOp, GClass,
    GClassKind, GNet, GnumError, Idempotent, NetSource, Operand, SamplingPlan, SupportSet,
    ValuationEstimate,
};
pub use apf::{
    mean_direct, mean_subst, mean_tail, APSample, ApfError, DirectParams, MeanEstimate, MeanMethod,
    SubstParams, TailParams, TrigPoly,
};
pub use spectral::{eigen_nets, hw_match, spectrum_support, EigenSystem, HermitianNet, Mat, SpectralError};
pub use tp::{
    amplitude_net, closed_form_2x2, diagonal_schrodinger, dominated_support, monte_carlo_tp, nu_scalar,
    phasor_amplitude, AmplitudeDecomposition, OrthoPair, TPReport, TpError,
};
