//! Text format for a ring together with a module over it, and the
//! `<generator, ...>` notation for submodules.
//!
//! ```text
//! # comments start with '#'
//! [ring]
//! name = Z4
//! orders = 4
//! unit = 1
//! mul 0 0 = 1
//! [module]
//! name = regular
//! inv_factors = 4
//! action 0 = [[1]]
//! ```
//!
//! Vectors are whitespace separated. `mul i j` lines that are absent stand for
//! the zero vector; every `action` must be present. `labels` is optional in
//! both sections. Serialization writes the nonzero `mul` lines in order and
//! always writes labels, so `parse(serialize(x)) == x`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{validate_module, validate_ring, AlgebraError, FiniteModule, FiniteRing, ModuleSpec, RingSpec};
use crate::lattice::Submodule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Validation(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub ring_name: String,
    pub module_name: String,
    pub ring: Arc<FiniteRing>,
    pub module: Arc<FiniteModule>,
}

impl Instance {
    pub fn new(ring_name: &str, module_name: &str, module: Arc<FiniteModule>) -> Self {
        Instance {
            ring_name: ring_name.to_string(),
            module_name: module_name.to_string(),
            ring: module.ring().clone(),
            module,
        }
    }

    /// Short human-readable description, e.g. `Z4/regular`.
    pub fn describe(&self) -> String {
        format!("{}/{}", self.ring_name, self.module_name)
    }
}

fn err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, msg: msg.into() }
}

fn parse_vec<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>, InstanceError> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| err(line, format!("bad number `{t}`")))).collect()
}

fn parse_matrix(line: usize, s: &str) -> Result<Vec<Vec<i64>>, InstanceError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| err(line, "matrix must look like [[..],[..]]"))?
        .trim();
    if inner.is_empty() {
        return Ok(vec![]);
    }
    let mut rows = Vec::new();
    let mut rest = inner;
    loop {
        rest = rest.trim_start();
        let body = rest.strip_prefix('[').ok_or_else(|| err(line, "expected `[` opening a row"))?;
        let close = body.find(']').ok_or_else(|| err(line, "unclosed row"))?;
        let row = body[..close]
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| err(line, format!("bad number `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
        rest = body[close + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        rest = rest.strip_prefix(',').ok_or_else(|| err(line, "expected `,` between rows"))?;
    }
    Ok(rows)
}

#[derive(PartialEq)]
enum Section {
    None,
    Ring,
    Module,
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut section = Section::None;
    let mut ring_name = None;
    let mut orders: Option<(usize, Vec<u64>)> = None;
    let mut unit: Option<Vec<i64>> = None;
    let mut mul: HashMap<(usize, usize), (usize, Vec<i64>)> = HashMap::new();
    let mut ring_labels = None;
    let mut module_name = None;
    let mut inv: Option<(usize, Vec<u64>)> = None;
    let mut actions: HashMap<usize, (usize, Vec<Vec<i64>>)> = HashMap::new();
    let mut module_labels = None;
    let mut ring_line = 0;
    let mut module_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match content {
            "[ring]" => {
                if section != Section::None {
                    return Err(err(line, "[ring] must be the first section"));
                }
                section = Section::Ring;
                ring_line = line;
                continue;
            }
            "[module]" => {
                if section != Section::Ring {
                    return Err(err(line, "[module] must follow [ring]"));
                }
                section = Section::Module;
                module_line = line;
                continue;
            }
            _ => {}
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(line, "expected `key = value`"))?;
        let key: Vec<&str> = key.split_whitespace().collect();
        let value = value.trim();
        let dup = |line| err(line, format!("duplicate key `{}`", key.join(" ")));
        match (&section, key.as_slice()) {
            (Section::Ring, ["name"]) => {
                if ring_name.replace(value.to_string()).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Ring, ["orders"]) => {
                if orders.replace((line, parse_vec(line, value)?)).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Ring, ["unit"]) => {
                if unit.replace(parse_vec(line, value)?).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Ring, ["labels"]) => {
                if ring_labels.replace(value.split_whitespace().map(String::from).collect::<Vec<_>>()).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Ring, ["mul", a, b]) => {
                let a: usize = a.parse().map_err(|_| err(line, "bad basis index"))?;
                let b: usize = b.parse().map_err(|_| err(line, "bad basis index"))?;
                if mul.insert((a, b), (line, parse_vec(line, value)?)).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Module, ["name"]) => {
                if module_name.replace(value.to_string()).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Module, ["inv_factors"]) => {
                if inv.replace((line, parse_vec(line, value)?)).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Module, ["labels"]) => {
                if module_labels.replace(value.split_whitespace().map(String::from).collect::<Vec<_>>()).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::Module, ["action", k]) => {
                let k: usize = k.parse().map_err(|_| err(line, "bad basis index"))?;
                if actions.insert(k, (line, parse_matrix(line, value)?)).is_some() {
                    return Err(dup(line));
                }
            }
            (Section::None, _) => return Err(err(line, "key outside of a section")),
            _ => return Err(err(line, format!("unknown key `{}`", key.join(" ")))),
        }
    }

    let end = text.lines().count().max(1);
    if section != Section::Module {
        return Err(err(end, "missing [module] section"));
    }
    let ring_name = ring_name.ok_or_else(|| err(ring_line, "missing `name` in [ring]"))?;
    let (_, orders) = orders.ok_or_else(|| err(ring_line, "missing `orders`"))?;
    let unit = unit.ok_or_else(|| err(ring_line, "missing `unit`"))?;
    let r = orders.len();
    let mut struct_consts = vec![vec![vec![0i64; r]; r]; r];
    for ((a, b), (line, v)) in mul {
        if a >= r || b >= r {
            return Err(err(line, format!("basis index out of range 0..{r}")));
        }
        if v.len() != r {
            return Err(err(line, format!("expected {r} coefficients")));
        }
        struct_consts[a][b] = v;
    }
    let ring = validate_ring(&RingSpec { add_orders: orders, struct_consts, unit, labels: ring_labels })?;
    let ring = Arc::new(ring);

    let module_name = module_name.ok_or_else(|| err(module_line, "missing `name` in [module]"))?;
    let (_, inv_factors) = inv.ok_or_else(|| err(module_line, "missing `inv_factors`"))?;
    let mut acts = Vec::with_capacity(r);
    for k in 0..r {
        let (_, a) = actions.remove(&k).ok_or_else(|| err(module_line, format!("missing `action {k}`")))?;
        acts.push(a);
    }
    if let Some((&k, (line, _))) = actions.iter().next() {
        return Err(err(*line, format!("action index {k} out of range 0..{r}")));
    }
    let module = validate_module(&ring, &ModuleSpec { inv_factors, actions: acts, labels: module_labels })?;
    Ok(Instance { ring_name, module_name, ring, module: Arc::new(module) })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn serialize_instance(inst: &Instance) -> String {
    let ring = &inst.ring;
    let m = &inst.module;
    let mut out = String::new();
    out.push_str("[ring]\n");
    out.push_str(&format!("name = {}\n", inst.ring_name));
    out.push_str(&format!("orders = {}\n", join(ring.add_orders())));
    out.push_str(&format!("unit = {}\n", join(ring.unit())));
    out.push_str(&format!("labels = {}\n", ring.labels().join(" ")));
    for i in 0..ring.rank() {
        for j in 0..ring.rank() {
            let c = ring.struct_const(i, j);
            if c.iter().any(|&x| x != 0) {
                out.push_str(&format!("mul {i} {j} = {}\n", join(c)));
            }
        }
    }
    out.push_str("[module]\n");
    out.push_str(&format!("name = {}\n", inst.module_name));
    out.push_str(&format!("inv_factors = {}\n", join(m.inv_factors())));
    out.push_str(&format!("labels = {}\n", m.labels().join(" ")));
    for (k, a) in m.actions().iter().enumerate() {
        let rows: Vec<String> =
            a.to_rows().iter().map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect();
        out.push_str(&format!("action {k} = [{}]\n", rows.join(",")));
    }
    out
}

/// Parses one generator: a sum of terms `c*label`, `label`, or `c`. A bare
/// integer `c` stands for `c` times the first basis vector, which is the
/// natural reading for cyclic modules such as `Z/n`.
pub fn parse_element(module: &FiniteModule, text: &str) -> Result<Vec<i64>, String> {
    let s = module.dim();
    let mut v = vec![0i64; s];
    let normalized = text.replace('-', "+-");
    for term in normalized.split('+').map(str::trim).filter(|t| !t.is_empty()) {
        let (coeff, label) = match term.split_once('*') {
            Some((c, l)) => (c.trim().parse::<i64>().map_err(|_| format!("bad coefficient in `{term}`"))?, Some(l.trim())),
            None => match term.parse::<i64>() {
                Ok(c) => (c, None),
                Err(_) => match term.strip_prefix('-') {
                    Some(l) => (-1, Some(l.trim())),
                    None => (1, Some(term)),
                },
            },
        };
        let idx = match label {
            None if s == 0 => return Err("the zero module has no basis".into()),
            None => 0,
            Some(l) => module
                .labels()
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| format!("unknown label `{l}`; known: {}", module.labels().join(", ")))?,
        };
        v[idx] += coeff;
    }
    Ok(v.iter().zip(module.inv_factors()).map(|(x, &d)| x.rem_euclid(d as i64)).collect())
}

/// `<g1, g2, ...>` to the submodule it generates; `<0>` and `<>` are zero.
pub fn parse_submodule(module: &Arc<FiniteModule>, text: &str) -> Result<Submodule, String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('<')
        .and_then(|x| x.strip_suffix('>'))
        .ok_or_else(|| format!("submodules are written `<g1, g2, ...>`, got `{t}`"))?;
    let gens = inner
        .split(',')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(|g| parse_element(module, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Submodule::from_generators(module, &gens))
}
