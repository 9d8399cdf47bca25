//! Trace export. Every float is written with 17 significant digits, which
//! reads back to the same `f64`.

use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{step_bound, IterationTrace};

pub const COLUMNS: [&str; 5] = ["n", "x_n", "gap_vector", "gap_norm", "cumulative_bound"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

/// Rate `h` and normal constant `K` of the `K·hⁿ·‖d₀‖` column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub h: f64,
    pub k: f64,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn joined(xs: &[f64], sep: &str) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(sep)
}

pub fn render_trace(
    trace: &IterationTrace,
    format: TraceFormat,
    bound: Option<BoundParams>,
) -> Result<String> {
    if trace.gap_norms.is_empty() {
        return Err(Error::config("refusing to emit an empty trace"));
    }
    let d0 = trace.gap_norms[0];
    let cumulative = |n: usize| bound.map(|b| step_bound(b.h, b.k, d0, n));
    let mut out = String::new();
    match format {
        TraceFormat::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for n in 0..trace.gap_norms.len() {
                let _ = writeln!(
                    out,
                    "{n},{},{},{},{}",
                    joined(trace.x_sequence[n].coords(), ";"),
                    joined(trace.t_image_gaps[n].coords(), ";"),
                    num(trace.gap_norms[n]),
                    cumulative(n).map(num).unwrap_or_default()
                );
            }
        }
        TraceFormat::Json => {
            let stop = serde_json::to_string(&trace.stop_reason).expect("stop reason serializes");
            let cols: Vec<String> = COLUMNS.iter().map(|c| format!("\"{c}\"")).collect();
            let _ = writeln!(out, "{{");
            let _ = writeln!(out, "  \"columns\": [{}],", cols.join(", "));
            let _ = writeln!(out, "  \"iterations\": {},", trace.iterations);
            let _ = writeln!(out, "  \"stop_reason\": {stop},");
            let _ = writeln!(out, "  \"rows\": [");
            let last = trace.gap_norms.len() - 1;
            for n in 0..=last {
                let _ = writeln!(
                    out,
                    "    {{\"n\": {n}, \"x_n\": [{}], \"gap_vector\": [{}], \"gap_norm\": {}, \"cumulative_bound\": {}}}{}",
                    joined(trace.x_sequence[n].coords(), ", "),
                    joined(trace.t_image_gaps[n].coords(), ", "),
                    num(trace.gap_norms[n]),
                    cumulative(n).map(num).unwrap_or_else(|| "null".into()),
                    if n == last { "" } else { "," }
                );
            }
            let _ = writeln!(out, "  ]");
            let _ = writeln!(out, "}}");
        }
    }
    Ok(out)
}

pub fn emit_trace(
    trace: &IterationTrace,
    format: TraceFormat,
    bound: Option<BoundParams>,
    path: &Path,
) -> Result<()> {
    let text = render_trace(trace, format, bound)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
