//! Benchmark harness and command-line front end for `wcsp-ihs`.

pub mod cli;
pub mod matrix;
pub mod row;
pub mod runner;
pub mod table;

/// `on` / `off` rendering used in flags and CSV columns.
pub fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

pub fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(format!("expected `on` or `off`, got `{s}`")),
    }
}
