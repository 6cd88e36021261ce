pub mod lab;
pub mod pipeline;
pub mod reports;
