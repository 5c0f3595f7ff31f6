//! Library surface of the command-line front end, exposed for the
//! integration and acceptance test suites.

pub mod commands;
pub mod formats;
