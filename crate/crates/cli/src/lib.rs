//! Command-line and HTTP front ends for ideacheck.

pub mod bundle;
pub mod files;
pub mod service;
pub mod store;

pub use bundle::{Bundle, BundleError};
pub use service::{router, AppState, ServiceConfig};
pub use store::{RevisionRecord, RevisionStore, StoreError};
