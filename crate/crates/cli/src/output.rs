use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};

use crate::config::{CommandName, RunConfig};

/// Output directory whose files all start with the same provenance comment:
/// tool version, command and the effective configuration.
pub struct Output {
    dir: PathBuf,
    header: String,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn create(config: &RunConfig, command: CommandName) -> Result<Self> {
        let dir = config.out_dir();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            header: provenance_header(config, command),
            written: Vec::new(),
        })
    }

    /// Writes the header followed by `body`, via a temporary file renamed
    /// into place.
    pub fn write(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let mut text = String::with_capacity(self.header.len() + body.len());
        text.push_str(&self.header);
        text.push_str(body);
        fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn provenance_header(config: &RunConfig, command: CommandName) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# apstat {} {command}", env!("CARGO_PKG_VERSION"));
    out.push_str("# config:\n");
    for line in config.to_toml().lines() {
        match line {
            "" => out.push_str("#\n"),
            l => {
                let _ = writeln!(out, "#   {l}");
            }
        }
    }
    out
}

/// Gnuplot script plotting `series` of `(file, using, title)` against each
/// other in one panel.
pub fn gnuplot_script(title: &str, xlabel: &str, ylabel: &str, series: &[(String, String, String)]) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set datafile commentschars '#'\n");
    out.push_str("set key autotitle columnhead\n");
    let _ = writeln!(out, "set title '{title}'");
    let _ = writeln!(out, "set xlabel '{xlabel}'");
    let _ = writeln!(out, "set ylabel '{ylabel}'");
    let plots: Vec<String> = series
        .iter()
        .map(|(file, using, t)| format!("'{file}' using {using} with lines title '{t}'"))
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}
