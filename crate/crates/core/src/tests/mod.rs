//! Cross-module suites: the bundled corpus and randomized properties.

mod corpus;
mod properties;
