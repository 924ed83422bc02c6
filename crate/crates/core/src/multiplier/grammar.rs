//! Compact string grammar for multipliers, used by the CLI and experiment
//! configs.
//!
//! ```text
//! identity
//! hilbert:k=2
//! riesz:k=1,j=2
//! cone:k=1,dir=[1,0],r=0.6,tau=0.2,m=2,base=ball
//! scone:k=1,dir=[1,0],r=0.6,tau=0.2
//! journe:ks=1+3,n=41,a=0.75,b=0.25
//! tensor(riesz:k=1,j=1 ; riesz:k=3,j=2)
//! ```
//!
//! Parameter indices `k` are 1-based here, matching the usual subscript
//! notation; the Rust API is 0-based.

use std::collections::HashMap;

use crate::lattice::GridSpec;
use crate::multiplier::{
    make_cone_projection, make_hilbert, make_riesz, make_smooth_cone, tensor, ConeBase, ConeSpec,
    Multiplier,
};
use crate::zonal::{journe_multiplier, JourneConeSpec, PhiProfile};
use crate::{Error, Result};

/// Split on `delim` at zero bracket depth (`()` and `[]` nest).
fn split_top_level(s: &str, delim: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                cur.push(c);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(c);
            }
            c if c == delim && depth == 0 => {
                parts.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    parts.push(cur.trim().to_string());
    parts
}

fn parse_kvs(s: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    if s.trim().is_empty() {
        return Ok(map);
    }
    for item in split_top_level(s, ',') {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_f64(map: &HashMap<String, String>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Parse(format!("bad number for `{key}`: {v}"))),
    }
}

fn parse_usize(map: &HashMap<String, String>, key: &str) -> Result<Option<usize>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Parse(format!("bad integer for `{key}`: {v}"))),
    }
}

fn require<T>(v: Option<T>, key: &str, atom: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parse(format!("`{atom}` needs `{key}=`")))
}

fn parse_vec(map: &HashMap<String, String>, key: &str) -> Result<Option<Vec<f64>>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => {
            let inner = v
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("`{key}` must look like [1,0]")))?;
            inner
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad vector entry `{x}`")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some)
        }
    }
}

/// 1-based parameter index from the grammar to the 0-based API.
fn param_index(map: &HashMap<String, String>, spec: &GridSpec, atom: &str) -> Result<usize> {
    let k = require(parse_usize(map, "k")?, "k", atom)?;
    if k == 0 || k > spec.num_params() {
        return Err(Error::Parse(format!(
            "parameter k={k} out of range 1..={}",
            spec.num_params()
        )));
    }
    Ok(k - 1)
}

fn cone_from_kvs(spec: &GridSpec, map: &HashMap<String, String>, atom: &str) -> Result<ConeSpec> {
    let k = param_index(map, spec, atom)?;
    let dim = spec.params()[k].dim;
    let dir = match parse_vec(map, "dir")? {
        Some(d) => d,
        None => {
            let mut e = vec![0.0; dim];
            e[0] = 1.0;
            e
        }
    };
    let r = require(parse_f64(map, "r")?, "r", atom)?;
    let tau = parse_f64(map, "tau")?.unwrap_or(0.2);
    let order = parse_usize(map, "m")?.unwrap_or_else(|| dim.max(1));
    let base = match map.get("base").map(String::as_str) {
        None | Some("ball") => ConeBase::Ball,
        Some("cube") => ConeBase::Cube,
        Some(other) => return Err(Error::Parse(format!("unknown cone base `{other}`"))),
    };
    let norm: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Parse("zero cone direction".into()));
    }
    let dir: Vec<f64> = dir.iter().map(|x| x / norm).collect();
    ConeSpec::new(k, dir, r, base, tau, order)
}

/// Parse one multiplier expression against a grid.
pub fn parse_multiplier(spec: &GridSpec, input: &str) -> Result<Multiplier> {
    let s = input.trim();
    if let Some(rest) = s.strip_prefix("tensor") {
        let rest = rest.trim();
        let inner = rest
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("malformed tensor expression `{s}`")))?;
        let children = split_top_level(inner, ';')
            .iter()
            .map(|part| parse_multiplier(spec, part))
            .collect::<Result<Vec<_>>>()?;
        return tensor(&children);
    }
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), a),
        None => (s, ""),
    };
    let map = parse_kvs(args)?;
    match name {
        "identity" | "id" => Ok(Multiplier::identity(spec)),
        "hilbert" => {
            let k = param_index(&map, spec, "hilbert")?;
            make_hilbert(spec, k)
        }
        "riesz" => {
            let k = param_index(&map, spec, "riesz")?;
            let j = require(parse_usize(&map, "j")?, "j", "riesz")?;
            make_riesz(spec, k, j)
        }
        "cone" => {
            let cone = cone_from_kvs(spec, &map, "cone")?;
            make_cone_projection(spec, &cone)
        }
        "scone" => {
            let cone = cone_from_kvs(spec, &map, "scone")?;
            make_smooth_cone(spec, &cone)
        }
        "journe" => {
            let ks_raw = map
                .get("ks")
                .ok_or_else(|| Error::Parse("`journe` needs `ks=` (e.g. ks=1+3)".into()))?;
            let mut params = Vec::new();
            for part in ks_raw.split('+') {
                let k: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad parameter index `{part}`")))?;
                if k == 0 || k > spec.num_params() {
                    return Err(Error::Parse(format!("parameter k={k} out of range")));
                }
                params.push(k - 1);
            }
            let degree = require(parse_usize(&map, "n")?, "n", "journe")?;
            let a = parse_f64(&map, "a")?.unwrap_or(0.75);
            let b = parse_f64(&map, "b")?.unwrap_or(0.25);
            let order = parse_usize(&map, "m")?.unwrap_or(4);
            let profile = PhiProfile::new(a, b, order)?;
            // default direction: first coordinate axis of each parameter
            let directions: Vec<Vec<f64>> = params
                .iter()
                .map(|&k| {
                    let mut e = vec![0.0; spec.params()[k].dim];
                    e[0] = 1.0;
                    e
                })
                .collect();
            let jspec = JourneConeSpec::new(params, directions, profile, degree)?;
            let (m, _cert) = journe_multiplier(spec, &jspec)?;
            Ok(m)
        }
        other => Err(Error::Parse(format!("unknown multiplier kind `{other}`"))),
    }
}

/// Parse a `|`-separated chain of multipliers, outermost bracket first.
pub fn parse_operator_chain(spec: &GridSpec, input: &str) -> Result<Vec<Multiplier>> {
    split_top_level(input, '|')
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| parse_multiplier(spec, s))
        .collect()
}
