//! Holds the `acceptance` test target (`cargo test -p mk-verify --test acceptance`).
