//! Number formatting and output files.

use std::path::Path;

use crate::error::Result;

/// Trace and report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, round-trip exact; non-finite values print as
/// `nan`, `inf` or `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}
