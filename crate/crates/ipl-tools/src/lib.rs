//! File formats, parallel drivers, and the `ipl` command-line interface for
//! the IPL toolkit. The algorithms live in `ipl-core`; this crate only adds
//! IO and orchestration.

pub mod csvout;
pub mod jsonl;
pub mod parallel;
