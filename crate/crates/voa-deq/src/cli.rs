//! Command-line interface (see the `voa-deq` binary).

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    eprintln!("not yet implemented");
    2
}
