//! Batch verification, reports, the fixture manifest and the self-test
//! battery behind the `ctlhorn` binary.

pub mod args;
pub mod manifest;
pub mod report;
pub mod selftest;
pub mod task;
