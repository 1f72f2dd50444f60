//! Reader and writer for the `.wcsp` text format.
//!
//! ```text
//! name nvars max_dom_size nfunctions top
//! d_1 d_2 ... d_nvars
//! arity v_1 ... v_arity default_cost ntuples     (per function)
//! a_1 ... a_arity cost                           (ntuples lines)
//! ```
//!
//! Costs at or above `top` forbid a tuple. Tokens are whitespace separated,
//! so line breaks are only significant for error reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{tuple_count, Cost, CostFunction, HardConstraint, ModelError, TupleIter, WcspInstance};

/// Functions whose hard part has to be listed tuple by tuple are refused
/// above this many tuples.
const MAX_ENUMERATED_TUPLES: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

struct Tokens<'a> {
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let tokens = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        Tokens { tokens, pos: 0 }
    }

    fn line(&self) -> usize {
        self.tokens.get(self.pos).or(self.tokens.last()).map_or(1, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn word(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.tokens.get(self.pos) {
            Some(&(_, t)) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.err(format!("unexpected end of input, expected {what}")),
        }
    }

    fn int<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let t = self.word(what)?;
        t.parse().or_else(|_| {
            self.pos -= 1;
            self.err(format!("expected {what}, found `{t}`"))
        })
    }
}

fn model_err(line: usize, e: ModelError) -> ParseError {
    ParseError {
        line,
        message: e.to_string(),
    }
}

/// Parses an instance. Hard tuples are split out into hard constraints and
/// functions reduced to a single cost are folded into the instance offset.
pub fn parse_wcsp(text: &str) -> Result<WcspInstance, ParseError> {
    let mut tok = Tokens::new(text);
    let name = tok.word("instance name")?.to_string();
    let nvars: usize = tok.int("variable count")?;
    let _max_dom: u64 = tok.int("maximum domain size")?;
    let nfunctions: usize = tok.int("function count")?;
    let top: Cost = tok.int("top")?;
    if top == 0 {
        return tok.err("top must be at least 1");
    }
    let mut domains = Vec::with_capacity(nvars);
    for _ in 0..nvars {
        let d: u32 = tok.int("domain size")?;
        if d == 0 {
            return tok.err("empty domain");
        }
        domains.push(d);
    }

    let mut hard = Vec::new();
    let mut functions = Vec::new();
    let mut offset: Cost = 0;
    for _ in 0..nfunctions {
        let header_line = tok.line();
        let arity: usize = tok.int("arity")?;
        let mut scope = Vec::with_capacity(arity);
        for _ in 0..arity {
            let v: usize = tok.int("scope variable")?;
            if v >= nvars {
                return tok.err(format!("variable {v} out of range"));
            }
            if scope.contains(&v) {
                return tok.err(format!("variable {v} repeated in scope"));
            }
            scope.push(v);
        }
        let default: Cost = tok.int("default cost")?;
        let ntuples: usize = tok.int("tuple count")?;
        let dims: Vec<u32> = scope.iter().map(|&x| domains[x]).collect();
        let mut rows: BTreeMap<Vec<u32>, Cost> = BTreeMap::new();
        for _ in 0..ntuples {
            let mut tuple = Vec::with_capacity(arity);
            for &d in &dims {
                let a: u32 = tok.int("tuple value")?;
                if a >= d {
                    return tok.err(format!("value {a} outside domain of size {d}"));
                }
                tuple.push(a);
            }
            let c: Cost = tok.int("tuple cost")?;
            rows.insert(tuple, c);
        }

        if arity == 0 {
            let c = rows.values().next_back().copied().unwrap_or(default);
            if c >= top {
                hard.push(HardConstraint::new(vec![], [vec![]]));
            } else {
                offset += c;
            }
            continue;
        }

        let total = tuple_count(&dims);
        let unlisted = total.saturating_sub(rows.len() as u64);
        let mut forbidden: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut finite: BTreeMap<Vec<u32>, Cost> = BTreeMap::new();
        for (t, c) in rows {
            if c >= top {
                forbidden.insert(t);
            } else {
                finite.insert(t, c);
            }
        }
        let mut finite_costs: BTreeSet<Cost> = finite.values().copied().collect();
        if default < top && unlisted > 0 {
            finite_costs.insert(default);
        }
        if default >= top && unlisted > 0 {
            if total > MAX_ENUMERATED_TUPLES {
                return Err(ParseError {
                    line: header_line,
                    message: format!("hard default over {total} tuples is too large to enumerate"),
                });
            }
            let extra: Vec<Vec<u32>> = TupleIter::new(&dims).filter(|t| !finite.contains_key(t)).collect();
            forbidden.extend(extra);
        }
        if !forbidden.is_empty() {
            hard.push(HardConstraint {
                scope: scope.clone(),
                forbidden: forbidden.clone(),
            });
        }
        let Some(&fill) = finite_costs.first() else {
            continue;
        };
        if finite_costs.len() == 1 {
            offset += fill;
            continue;
        }
        let default = if default < top { default } else { fill };
        let explicit = finite.into_iter().chain(forbidden.into_iter().map(|t| (t, fill)));
        let f = CostFunction::new(scope, dims, default, explicit, top).map_err(|e| model_err(header_line, e))?;
        functions.push(f);
    }
    if tok.pos < tok.tokens.len() {
        return tok.err("trailing tokens after the last function");
    }
    let w = WcspInstance::new(name, domains, hard, functions, top).map_err(|e| model_err(1, e))?;
    Ok(w.with_offset(offset))
}

/// Writes an instance in the format accepted by [`parse_wcsp`]. Hard
/// constraints become functions whose forbidden tuples cost `top`; a
/// nonzero offset becomes a zero-arity function.
pub fn write_wcsp(w: &WcspInstance) -> String {
    let top = w.top.max(w.offset + 1);
    let nfunctions = w.hard_constraints.len() + w.cost_functions.len() + usize::from(w.offset > 0);
    let max_dom = w.domains.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {} {}", w.name, w.num_vars(), max_dom, nfunctions, top);
    let doms: Vec<String> = w.domains.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "{}", doms.join(" "));
    let scope_str = |scope: &[usize]| scope.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let tuple_str = |t: &[u32]| t.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    for hc in &w.hard_constraints {
        if hc.scope.is_empty() {
            let _ = writeln!(out, "0 {} 0", top);
            continue;
        }
        let _ = writeln!(
            out,
            "{} {} 0 {}",
            hc.scope.len(),
            scope_str(&hc.scope),
            hc.forbidden.len()
        );
        for t in &hc.forbidden {
            let _ = writeln!(out, "{} {}", tuple_str(t), top);
        }
    }
    for f in &w.cost_functions {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            f.arity(),
            scope_str(f.scope()),
            f.default_cost(),
            f.explicit_tuples().len()
        );
        for (t, c) in f.explicit_tuples() {
            let _ = writeln!(out, "{} {}", tuple_str(t), c);
        }
    }
    if w.offset > 0 {
        let _ = writeln!(out, "0 {} 0", w.offset);
    }
    out
}
