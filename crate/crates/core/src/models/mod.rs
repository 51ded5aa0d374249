//! Attribution models.

mod nb;
mod svm;

pub use nb::{predict_nb, train_nb, train_nb_tokens, NbModel};
pub use svm::{argmax, train_svm, LinearModel, SolverTrace, SvmConfig};
