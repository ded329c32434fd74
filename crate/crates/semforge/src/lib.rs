//! IO, configuration, LLM access and the pipeline stages behind the
//! `semforge` command line tool. The algorithmic core lives in
//! `semforge-core`; this crate owns everything that touches files, the
//! network or the process environment.

pub mod cli;
pub mod config;
pub mod llm;
pub mod pipeline;
