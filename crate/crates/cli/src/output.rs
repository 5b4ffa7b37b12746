use std::fs;
use std::io::{self, Write};
use std::path::Path;

use quotient_mi::curve::fmt_real;
use quotient_mi::ChannelConfig;

/// Comment header shared by every CSV artifact.
pub fn csv_header(quantity: &str, method: &str, cfg: &ChannelConfig) -> String {
    format!(
        "# quantity,method,n,nA,nB,a,b\n# {quantity},{method},{},{},{},{},{}\n",
        cfg.n,
        cfg.n_a,
        cfg.n_b,
        fmt_real(cfg.a),
        fmt_real(cfg.b)
    )
}

/// CSV table with a header row and real-valued cells.
pub fn csv_table(columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_artifact(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
