//! Library side of the `cgplan` binary: seeded instance generators and
//! the run-report type. Kept as a library so test suites can build the
//! same corpora the command line hands out.

pub mod gen;
pub mod report;

pub use gen::{gen_gridworld, gen_random_game, GenError};
pub use report::{sha256_hex, RunReport};
