//! Acceptance suite: every release criterion as one test with a printed
//! pass/fail line (run with `cargo test --test acceptance -- --nocapture`
//! to see the measured values).

mod corridor;
mod oracles;
mod rays;
mod world;
