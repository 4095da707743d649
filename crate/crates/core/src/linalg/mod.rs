//! Dense kernels: truncated SVD, pseudoinverse application, Kronecker products.

mod jacobi;
mod kron;
mod svd;
mod truncation;

pub use kron::{khatri_rao_self, kron, kron_vec, mul_kron_self};
pub use svd::{pinv_apply, singular_values, truncated_svd, SvdFactors};
pub(crate) use svd::normalize;
pub use truncation::TruncationPolicy;
