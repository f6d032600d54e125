//! Library surface of the `schouten` command-line tool: the expression
//! grammar (parser and canonical formatter), the JSON report schema, and the
//! command dispatch, kept callable so the binary stays a thin wrapper.

pub mod expr;
pub mod report;
pub mod run;
