//! C ABI for the cvop toolkit. Filled in alongside the core crate.
