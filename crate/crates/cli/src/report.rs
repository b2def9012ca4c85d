//! Output formatting shared by every command.
//!
//! All numeric output is locale independent and fixed precision:
//! availability percentages carry four decimals, nines two decimals, and
//! downtime two decimals when at least 0.01 h, otherwise scientific
//! notation with three significant digits.

use std::io::IsTerminal;

/// Output formats selectable with --format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Availability as a percentage with four decimals.
pub fn fmt_pct(value: f64) -> String {
    format!("{value:.4}")
}

/// Number of nines with two decimals.
pub fn fmt_nines(value: f64) -> String {
    format!("{value:.2}")
}

/// Downtime hours: two decimals at or above 0.01 h, otherwise scientific
/// notation with three significant digits.
pub fn fmt_downtime(value: f64) -> String {
    if value >= 0.01 {
        format!("{value:.2}")
    } else {
        format!("{value:.2e}")
    }
}

/// Simulation statistics with seven significant digits.
pub fn fmt_stat(value: f64) -> String {
    format!("{value:.6e}")
}

/// A JSON number carrying exactly the digits of the fixed-precision
/// rendering.
pub fn json_num(rendered: &str) -> serde_json::Value {
    rendered
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// Whether table headers may use ANSI bold.
pub fn styling_enabled() -> bool {
    std::env::var_os("BLOCKAV_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn bold(text: &str, styled: bool) -> String {
    if styled {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_owned()
    }
}

/// Renders rows as a plain aligned table. The first row is the header.
pub fn render_table(rows: &[Vec<String>], styled: bool) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (index, row) in rows.iter().enumerate() {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            if i + 1 == row.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<width$}", width = widths[i]));
            }
        }
        if index == 0 {
            out.push_str(&bold(line.trim_end(), styled));
        } else {
            out.push_str(line.trim_end());
        }
        out.push('\n');
    }
    out
}

/// Quotes a CSV field only when it contains a delimiter, quote, or newline.
pub fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_owned()
    }
}

/// Renders rows as CSV. The first row is the header.
pub fn render_csv(rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|cell| csv_field(cell)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
