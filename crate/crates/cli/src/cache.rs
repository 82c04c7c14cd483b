//! On-disk cache for solved Macdonald tables, keyed by
//! (ell, charge vector, quotient size). Writes go through a temp file
//! and an atomic rename so concurrent writers cannot interleave.

use std::fs;
use std::path::{Path, PathBuf};
use wmac_core::macdonald::{enumerate_cell, solve_cell, MacdonaldTable, SolveOptions};

pub fn cache_root() -> PathBuf {
    match std::env::var_os("WMAC_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from("cache"),
    }
}

pub fn table_path(root: &Path, ell: u64, charges: &[i64], n: u64) -> PathBuf {
    let charge_str = charges
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",");
    root.join(format!("ell-{}", ell))
        .join(format!("core-{}", charge_str))
        .join(format!("n-{}.json", n))
}

/// Load a table from the cache or solve and store it. `no_cache` skips
/// both the read and the write.
pub fn load_or_solve(
    ell: u64,
    charges: &[i64],
    n: u64,
    no_cache: bool,
    seed: Option<u64>,
) -> Result<MacdonaldTable, String> {
    let path = table_path(&cache_root(), ell, charges, n);
    if !no_cache {
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
                if let Some(table) = MacdonaldTable::from_json(&v) {
                    if table.cell.ell == ell && table.cell.charges == charges && table.cell.n == n
                    {
                        return Ok(table);
                    }
                }
            }
            // unreadable or stale schema: fall through and recompute
        }
    }
    let cell = enumerate_cell(charges, n, ell).map_err(|e| e.to_string())?;
    let table = solve_cell(
        &cell,
        SolveOptions {
            precheck_seed: seed.or(Some(1)),
        },
    )
    .map_err(|e| e.to_string())?;
    if !no_cache {
        if let Some(dir) = path.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        if fs::write(&tmp, serde_json::to_string_pretty(&table.to_json()).unwrap()).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
    Ok(table)
}
