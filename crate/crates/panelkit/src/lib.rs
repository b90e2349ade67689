//! Service, CLI and I/O around `panelkit-core`: PNG output, configuration,
//! vision-model clients, file-backed sessions and the REST API.

pub mod api;
pub mod cli;
pub mod config;
pub mod demo;
pub mod error;
pub mod pipeline;
pub mod raster;
pub mod responses;
pub mod session;
pub mod store;
pub mod vlm;

pub use config::Config;
pub use error::{ErrorClass, ServiceError};
pub use pipeline::Pipeline;
pub use session::{Session, Status, Strategy};
