pub mod batch;
pub mod configuration;
pub mod engine;
pub mod geometry;
pub mod monitor;
pub mod protocols;
pub mod render;
pub mod scenario;
