//! Support code for the `mrcode` command-line tool: text formats, input
//! generators and the benchmark harness.

pub mod bench;
pub mod gen;
pub mod io;
