//! Text file formats: tensors (`hdt 1`), posets, and colored families.
//!
//! Tensor format (UTF-8):
//!
//! ```text
//! hdt 1
//! d=<d> n=<n> ring=<Q|Z|Zmod:m|Fp:p>
//! layout=dense|sparse
//! ```
//!
//! followed by `n^d` whitespace-separated values in lexicographic index
//! order for `dense`, or by lines `<i_1> ... <i_d> <value>` for `sparse`
//! (unlisted entries are zero; duplicate index tuples are an error).
//!
//! Poset format: a header `poset d=<d>` followed by cover lines
//! `<a> < <b>`. Family format: a header `csf p=<p> n=<n> d=<d> N=<N>`
//! followed by d blocks, each `color <l>` and N lines of n residues.

use std::collections::HashSet;
use std::fmt;

use crate::capset::{CapsetError, ColoredFamily};
use crate::order::{OrderError, Poset};
use crate::ring::{RingError, RingSpec};
use crate::tensor::{pow_len, Tensor, TensorError};

#[derive(Debug)]
pub enum IoError {
    Format(String),
    Ring(RingError),
    Tensor(TensorError),
    Order(OrderError),
    Family(CapsetError),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Format(msg) => write!(f, "format error: {}", msg),
            IoError::Ring(e) => write!(f, "{}", e),
            IoError::Tensor(e) => write!(f, "{}", e),
            IoError::Order(e) => write!(f, "{}", e),
            IoError::Family(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for IoError {}

impl From<RingError> for IoError {
    fn from(e: RingError) -> Self {
        IoError::Ring(e)
    }
}

impl From<TensorError> for IoError {
    fn from(e: TensorError) -> Self {
        IoError::Tensor(e)
    }
}

impl From<OrderError> for IoError {
    fn from(e: OrderError) -> Self {
        IoError::Order(e)
    }
}

impl From<CapsetError> for IoError {
    fn from(e: CapsetError) -> Self {
        IoError::Family(e)
    }
}

fn header_field<'a>(token: &'a str, key: &str) -> Result<&'a str, IoError> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| IoError::Format(format!("expected {}=<value>, got '{}'", key, token)))
}

/// Parses the `hdt 1` tensor format.
pub fn parse_tensor(input: &str) -> Result<Tensor, IoError> {
    let mut lines = input.lines().filter(|l| !l.trim().is_empty());
    let magic = lines.next().ok_or_else(|| IoError::Format("empty tensor file".into()))?;
    if magic.trim() != "hdt 1" {
        return Err(IoError::Format(format!("expected 'hdt 1' header, got '{}'", magic.trim())));
    }
    let header = lines.next().ok_or_else(|| IoError::Format("missing shape header".into()))?;
    let mut tokens = header.split_whitespace();
    let d: usize = header_field(tokens.next().unwrap_or(""), "d")?
        .parse()
        .map_err(|_| IoError::Format("invalid d".into()))?;
    let n: usize = header_field(tokens.next().unwrap_or(""), "n")?
        .parse()
        .map_err(|_| IoError::Format("invalid n".into()))?;
    let spec_token = tokens.next().unwrap_or("");
    let spec = RingSpec::parse_descriptor(header_field(spec_token, "ring")?)?;
    let layout_line = lines.next().ok_or_else(|| IoError::Format("missing layout line".into()))?;
    let layout = header_field(layout_line.trim(), "layout")?;
    match layout {
        "dense" => {
            let expected = pow_len(n, d);
            let mut entries = Vec::with_capacity(expected);
            for line in lines {
                for token in line.split_whitespace() {
                    entries.push(spec.parse_value(token)?);
                }
            }
            if entries.len() != expected {
                return Err(IoError::Format(format!(
                    "dense layout needs {} values, found {}",
                    expected,
                    entries.len()
                )));
            }
            Ok(Tensor::new(d, n, spec, entries)?)
        }
        "sparse" => {
            let mut t = Tensor::zeros(d, n, spec);
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            for line in lines {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() != d + 1 {
                    return Err(IoError::Format(format!(
                        "sparse line needs {} indices and a value: '{}'",
                        d, line
                    )));
                }
                let mut idx = Vec::with_capacity(d);
                for tok in &tokens[..d] {
                    idx.push(
                        tok.parse::<usize>()
                            .map_err(|_| IoError::Format(format!("bad index '{}'", tok)))?,
                    );
                }
                if !seen.insert(idx.clone()) {
                    return Err(IoError::Format(format!("duplicate index tuple {:?}", idx)));
                }
                let value = spec.parse_value(tokens[d])?;
                t = t.set(&idx, value)?;
            }
            Ok(t)
        }
        other => Err(IoError::Format(format!("unknown layout '{}'", other))),
    }
}

/// Serializes a tensor in canonical dense form, entries in lexicographic
/// order, n values per line.
pub fn write_tensor(t: &Tensor) -> String {
    let mut out = String::new();
    out.push_str("hdt 1\n");
    out.push_str(&format!("d={} n={} ring={}\n", t.order(), t.side(), t.spec()));
    out.push_str("layout=dense\n");
    let per_line = t.side().max(1);
    for chunk in t.entries().chunks(per_line) {
        let row: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the poset format: header `poset d=<d>`, then `<a> < <b>` lines.
pub fn parse_poset(input: &str) -> Result<Poset, IoError> {
    let mut lines = input.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Format("empty poset file".into()))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("poset") {
        return Err(IoError::Format("expected 'poset d=<d>' header".into()));
    }
    let d: usize = header_field(tokens.next().unwrap_or(""), "d")?
        .parse()
        .map_err(|_| IoError::Format("invalid d".into()))?;
    let mut covers = Vec::new();
    for line in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 || tokens[1] != "<" {
            return Err(IoError::Format(format!("expected '<a> < <b>', got '{}'", line)));
        }
        let a: usize = tokens[0]
            .parse()
            .map_err(|_| IoError::Format(format!("bad element '{}'", tokens[0])))?;
        let b: usize = tokens[2]
            .parse()
            .map_err(|_| IoError::Format(format!("bad element '{}'", tokens[2])))?;
        covers.push((a, b));
    }
    Ok(Poset::new(d, covers)?)
}

pub fn write_poset(p: &Poset) -> String {
    let mut out = format!("poset d={}\n", p.ground_size());
    for &(a, b) in p.covers() {
        out.push_str(&format!("{} < {}\n", a, b));
    }
    out
}

/// Parses the colored-family format.
pub fn parse_family(input: &str) -> Result<ColoredFamily, IoError> {
    let mut lines = input.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| IoError::Format("empty family file".into()))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("csf") {
        return Err(IoError::Format("expected 'csf p=<p> n=<n> d=<d> N=<N>' header".into()));
    }
    let p: u64 = header_field(tokens.next().unwrap_or(""), "p")?
        .parse()
        .map_err(|_| IoError::Format("invalid p".into()))?;
    let n: usize = header_field(tokens.next().unwrap_or(""), "n")?
        .parse()
        .map_err(|_| IoError::Format("invalid n".into()))?;
    let d: usize = header_field(tokens.next().unwrap_or(""), "d")?
        .parse()
        .map_err(|_| IoError::Format("invalid d".into()))?;
    let big_n: usize = header_field(tokens.next().unwrap_or(""), "N")?
        .parse()
        .map_err(|_| IoError::Format("invalid N".into()))?;
    let mut vectors: Vec<Vec<Vec<u64>>> = Vec::with_capacity(d);
    for l in 1..=d {
        let color_line = lines
            .next()
            .ok_or_else(|| IoError::Format(format!("missing 'color {}' block", l)))?;
        let expected = format!("color {}", l);
        if color_line.trim() != expected {
            return Err(IoError::Format(format!(
                "expected '{}', got '{}'",
                expected,
                color_line.trim()
            )));
        }
        let mut block = Vec::with_capacity(big_n);
        for _ in 0..big_n {
            let line = lines
                .next()
                .ok_or_else(|| IoError::Format(format!("color {} has too few vectors", l)))?;
            let mut v = Vec::with_capacity(n);
            for tok in line.split_whitespace() {
                v.push(
                    tok.parse::<u64>()
                        .map_err(|_| IoError::Format(format!("bad residue '{}'", tok)))?,
                );
            }
            if v.len() != n {
                return Err(IoError::Format(format!(
                    "vector line '{}' has {} residues, expected {}",
                    line,
                    v.len(),
                    n
                )));
            }
            block.push(v);
        }
        vectors.push(block);
    }
    if lines.next().is_some() {
        return Err(IoError::Format("trailing content after the last color block".into()));
    }
    Ok(ColoredFamily::new(p, n, d, vectors)?)
}

pub fn write_family(f: &ColoredFamily) -> String {
    let mut out = format!(
        "csf p={} n={} d={} N={}\n",
        f.p(),
        f.dimension(),
        f.colors(),
        f.size()
    );
    for (l, block) in f.vectors().iter().enumerate() {
        out.push_str(&format!("color {}\n", l + 1));
        for v in block {
            let row: Vec<String> = v.iter().map(|r| r.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}
