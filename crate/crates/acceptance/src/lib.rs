//! Host crate for the `acceptance` test target.
