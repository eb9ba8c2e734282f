use std::fmt::Write as _;

use anyhow::Result;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::models::load_table;
use crate::output::Output;

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Canonical zero table (and `ζ′` companion) plus a summary. Checksums cover
/// the data lines only, so they do not depend on the provenance comments.
pub fn run(config: &RunConfig, out: &mut Output) -> Result<()> {
    let table = load_table(&config.zeta, false)?;
    let zeros = table.to_text();
    out.write("zeros.txt", &zeros)?;
    let mut summary = String::new();
    let _ = writeln!(summary, "source,{}", table.source());
    let _ = writeln!(summary, "count,{}", table.len());
    let _ = writeln!(summary, "min_gamma,{:e}", table.gammas()[0]);
    let _ = writeln!(summary, "max_gamma,{:e}", table.max_gamma());
    let _ = writeln!(summary, "zeros_sha256,{}", sha256_hex(&zeros));
    if let Some(csv) = table.zeta_prime_csv() {
        out.write("zeta_prime.csv", &csv)?;
        let _ = writeln!(summary, "zeta_prime_sha256,{}", sha256_hex(&csv));
    }
    out.write("ingest_summary.csv", &format!("key,value\n{summary}"))?;
    eprintln!("ingest: {} zeros up to {}", table.len(), table.max_gamma());
    Ok(())
}
