//! HTTP front end and batch commands for the conversation engine.

pub mod commands;
pub mod server;
