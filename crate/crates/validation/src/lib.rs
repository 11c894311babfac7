//! Holds the `acceptance` test target, which checks the whole toolchain end to
//! end and prints one PASS/FAIL line per check. Run it with
//! `cargo test -p viewhedge-validation --test acceptance`.
