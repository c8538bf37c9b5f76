//! TOML input files for hypersurfaces, maps, singular systems and prolonged
//! systems, with positions reported against the file text.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};

use toml::de::{DeTable, DeValue};

use crate::bb::BBSystem;
use crate::coeff::GaussRational;
use crate::crmap::HoloMap;
use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::literal::{parse_coeff, parse_series, VarNames};
use crate::prolong::{contact_prolong_with, ProlongedSystem, SlotPolicy};
use crate::series::Series;

#[derive(Clone, Debug)]
enum Item {
    Str(String),
    Int(i64),
    Array(Vec<(Item, Range<usize>)>),
    Table(Vec<Entry>),
    Other(&'static str),
}

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    key_span: Range<usize>,
    value: Item,
    span: Range<usize>,
}

impl Item {
    fn kind(&self) -> &'static str {
        match self {
            Item::Str(_) => "string",
            Item::Int(_) => "integer",
            Item::Array(_) => "array",
            Item::Table(_) => "table",
            Item::Other(k) => k,
        }
    }
}

fn convert(v: &DeValue<'_>) -> Item {
    match v {
        DeValue::String(s) => Item::Str(s.to_string()),
        DeValue::Integer(i) => match i64::from_str_radix(i.as_str(), i.radix()) {
            Ok(x) => Item::Int(x),
            Err(_) => Item::Other("out-of-range integer"),
        },
        DeValue::Float(_) => Item::Other("float"),
        DeValue::Boolean(_) => Item::Other("boolean"),
        DeValue::Datetime(_) => Item::Other("datetime"),
        DeValue::Array(a) => Item::Array(a.into_iter().map(|x| (convert(x.get_ref()), x.span())).collect()),
        DeValue::Table(t) => Item::Table(entries(t)),
    }
}

fn entries(t: &DeTable<'_>) -> Vec<Entry> {
    t.iter()
        .map(|(k, v)| Entry { key: k.get_ref().to_string(), key_span: k.span(), value: convert(v.get_ref()), span: v.span() })
        .collect()
}

fn line_col(text: &str, byte: usize) -> (usize, usize) {
    let byte = byte.min(text.len());
    let before = &text[..byte];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

/// A parsed table with positions; keys are consumed as they are read so that
/// leftovers can be rejected.
struct Doc<'t> {
    text: &'t str,
    entries: Vec<Entry>,
}

impl<'t> Doc<'t> {
    fn parse(text: &'t str) -> Result<Doc<'t>> {
        match DeTable::parse(text) {
            Ok(t) => Ok(Doc { text, entries: entries(t.get_ref()) }),
            Err(e) => {
                let (line, col) = line_col(text, e.span().map(|s| s.start).unwrap_or(0));
                Err(Error::Parse { line, col, msg: e.message().trim().to_string() })
            }
        }
    }

    fn err(&self, at: usize, msg: impl Into<String>) -> Error {
        let (line, col) = line_col(self.text, at);
        Error::Parse { line, col, msg: msg.into() }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }

    fn int(&mut self, key: &str) -> Result<Option<i64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Entry { value: Item::Int(x), .. }) => Ok(Some(x)),
            Some(e) => Err(self.err(e.span.start, format!("`{key}` must be an integer, found {}", e.value.kind()))),
        }
    }

    fn req_int(&mut self, key: &str, min: i64, max: i64) -> Result<i64> {
        let x = self.int(key)?.ok_or_else(|| self.err(self.text.len(), format!("missing key `{key}`")))?;
        self.check_range(key, x, min, max)
    }

    fn check_range(&self, key: &str, x: i64, min: i64, max: i64) -> Result<i64> {
        if x < min || x > max {
            return Err(self.err(0, format!("`{key}` = {x} is outside {min}..={max}")));
        }
        Ok(x)
    }

    fn string(&mut self, key: &str) -> Result<Option<(String, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => self.as_str(&e).map(Some),
        }
    }

    fn req_string(&mut self, key: &str) -> Result<(String, usize)> {
        self.string(key)?.ok_or_else(|| self.err(self.text.len(), format!("missing key `{key}`")))
    }

    /// Contents and the byte offset where they start in the file.
    fn as_str(&self, e: &Entry) -> Result<(String, usize)> {
        match &e.value {
            Item::Str(s) => Ok((s.clone(), content_start(self.text, e.span.start))),
            _ => Err(self.err(e.span.start, format!("`{}` must be a string, found {}", e.key, e.value.kind()))),
        }
    }

    fn series(&self, src: &str, at: usize, names: &VarNames, trunc: i32) -> Result<Series> {
        let (line, col) = line_col(self.text, at);
        parse_series(src, names, trunc).map_err(|e| e.offset_position(line, col))
    }

    fn finish(self) -> Result<()> {
        match self.entries.first() {
            None => Ok(()),
            Some(e) => Err(self.err(e.key_span.start, format!("unknown key `{}`", e.key))),
        }
    }
}

fn content_start(text: &str, start: usize) -> usize {
    let rest = &text[start.min(text.len())..];
    if rest.starts_with("\"\"\"") || rest.starts_with("'''") {
        start + 3
    } else {
        start + 1
    }
}

const MAX_N: i64 = 8;
const MAX_TRUNC: i64 = 64;

/// `n`, `trunc`, `phi`, optional `m`.
pub fn parse_hypersurface(text: &str, trunc_override: Option<i32>) -> Result<Hypersurface> {
    let mut doc = Doc::parse(text)?;
    let n = doc.req_int("n", 1, MAX_N)? as usize;
    let trunc = doc.req_int("trunc", 0, MAX_TRUNC)? as i32;
    let trunc = trunc_override.unwrap_or(trunc);
    let (phi, at) = doc.req_string("phi")?;
    let m = doc.int("m")?.map(|m| doc.check_range("m", m, 1, MAX_TRUNC)).transpose()?;
    let phi = doc.series(&phi, at, &VarNames::cr(n), trunc)?;
    doc.finish()?;
    let mut hs = Hypersurface::new(n, trunc, phi)?;
    hs.m_override = m.map(|m| m as u32);
    Ok(hs)
}

pub fn hypersurface_to_toml(hs: &Hypersurface) -> String {
    let mut out = format!("n = {}\ntrunc = {}\nphi = \"{}\"\n", hs.n, hs.trunc, hs.phi.display_with(&hs.names()));
    if let Some(m) = hs.m_override {
        let _ = writeln!(out, "m = {m}");
    }
    out
}

#[derive(Clone, Debug)]
pub struct MapFile {
    pub source_path: String,
    pub target_path: String,
    pub map: HoloMap,
}

/// `source`, `target` (paths resolved by `load`), `F1..F{n+1}`.
pub fn parse_map<L>(text: &str, trunc_override: Option<i32>, load: L) -> Result<MapFile>
where
    L: Fn(&str) -> Result<String>,
{
    let mut doc = Doc::parse(text)?;
    let (source_path, _) = doc.req_string("source")?;
    let (target_path, _) = doc.req_string("target")?;
    let source = parse_hypersurface(&load(&source_path)?, trunc_override)?;
    let target = parse_hypersurface(&load(&target_path)?, trunc_override)?;
    let n = source.n;
    let names = VarNames::ambient(n);
    let mut comps = Vec::with_capacity(n + 1);
    for j in 1..=n + 1 {
        let key = format!("F{j}");
        let (src, at) = doc.req_string(&key)?;
        comps.push(doc.series(&src, at, &names, source.trunc)?);
    }
    doc.finish()?;
    Ok(MapFile { source_path, target_path, map: HoloMap::new(source, target, comps)? })
}

pub fn map_to_toml(m: &MapFile) -> String {
    let mut out = format!("source = {:?}\ntarget = {:?}\n", m.source_path, m.target_path);
    let names = m.map.names();
    for (j, c) in m.map.components.iter().enumerate() {
        let _ = writeln!(out, "F{} = \"{}\"", j + 1, c.display_with(&names));
    }
    out
}

/// Read `rel` relative to the directory of `base`.
pub fn read_relative(base: &Path, rel: &str) -> Result<String> {
    let dir = base.parent().map(Path::to_path_buf).unwrap_or_default();
    let p: PathBuf = dir.join(rel);
    read_file(&p)
}

pub fn read_file(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.display().to_string(), msg: e.to_string() })
}

/// `N`, `order`, `f1..fN`.
pub fn parse_bb(text: &str, order_override: Option<u32>) -> Result<BBSystem> {
    let mut doc = Doc::parse(text)?;
    let n = doc.req_int("N", 1, 16)? as usize;
    let order = doc.req_int("order", 1, 200)? as u32;
    let order = order_override.unwrap_or(order);
    let names = VarNames::briot_bouquet(n);
    let mut f = Vec::with_capacity(n);
    for j in 1..=n {
        let (src, at) = doc.req_string(&format!("f{j}"))?;
        f.push(doc.series(&src, at, &names, order as i32)?);
    }
    doc.finish()?;
    BBSystem::new(f, order)
}

pub fn bb_to_toml(sys: &BBSystem) -> String {
    let mut out = format!("N = {}\norder = {}\n", sys.n, sys.order);
    let names = sys.names();
    for (j, f) in sys.f.iter().enumerate() {
        let _ = writeln!(out, "f{} = \"{}\"", j + 1, f.display_with(&names));
    }
    out
}

/// `base_dim`, `jet_order`, `order`, optional `policy`, `samples`,
/// `[closure]` keyed by jet variable, optional `[center]`.
pub fn parse_prolong(text: &str, order_override: Option<u32>) -> Result<ProlongedSystem> {
    let mut doc = Doc::parse(text)?;
    let base = doc.req_int("base_dim", 2, 2 * MAX_N)?;
    if base % 2 != 0 {
        return Err(doc.err(0, format!("`base_dim` = {base} is odd")));
    }
    let k = doc.req_int("jet_order", 0, 6)? as u32;
    let order = doc.req_int("order", 1, 100)? as u32;
    let order = order_override.unwrap_or(order);
    let policy = match doc.string("policy")? {
        None => SlotPolicy::TransverseOnly,
        Some((p, at)) => match p.as_str() {
            "transverse-only" => SlotPolicy::TransverseOnly,
            "all-top-order" => SlotPolicy::AllTopOrder,
            _ => return Err(doc.err(at, format!("unknown policy `{p}`"))),
        },
    };
    let jets = contact_prolong_with(base as usize / 2, k, policy);
    let samples_entry = doc.take("samples").ok_or_else(|| doc.err(text.len(), "missing key `samples`"))?;
    let Item::Array(rows) = &samples_entry.value else {
        return Err(doc.err(samples_entry.span.start, "`samples` must be an array of arrays"));
    };
    let mut samples = Vec::new();
    for (row, span) in rows {
        let Item::Array(cells) = row else {
            return Err(doc.err(span.start, "each sample must be an array of rational strings"));
        };
        if cells.len() != base as usize {
            return Err(doc.err(span.start, format!("sample has {} coordinates, expected {base}", cells.len())));
        }
        let mut x = Vec::new();
        for (cell, cspan) in cells {
            let v = match cell {
                Item::Str(s) => {
                    let (line, col) = line_col(text, content_start(text, cspan.start));
                    parse_coeff(s).map_err(|e| e.offset_position(line, col))?
                }
                Item::Int(i) => GaussRational::from_int(*i),
                _ => return Err(doc.err(cspan.start, "sample coordinates must be rational strings or integers")),
            };
            x.push(v);
        }
        samples.push(x);
    }
    let cnames = jets.closure_names();
    let closure_entry = doc.take("closure").ok_or_else(|| doc.err(text.len(), "missing table `closure`"))?;
    let Item::Table(cl) = closure_entry.value else {
        return Err(doc.err(closure_entry.span.start, "`closure` must be a table"));
    };
    let mut by_var: BTreeMap<usize, Series> = BTreeMap::new();
    for e in &cl {
        let var = cnames
            .slot(&e.key)
            .filter(|&s| s >= 1 && s <= jets.num_vars())
            .map(|s| s - 1)
            .filter(|v| jets.closure_slots.contains(v))
            .ok_or_else(|| doc.err(e.key_span.start, format!("`{}` is not a closure slot", e.key)))?;
        let (src, at) = doc.as_str(e)?;
        by_var.insert(var, doc.series(&src, at, &cnames, order as i32)?);
    }
    let mut closure = Vec::new();
    for v in &jets.closure_slots {
        match by_var.remove(v) {
            Some(s) => closure.push(s),
            None => return Err(doc.err(closure_entry.key_span.start, format!("missing closure for `{}`", jets.var_name(*v)))),
        }
    }
    let mut center = BTreeMap::new();
    if let Some(ce) = doc.take("center") {
        let Item::Table(cs) = ce.value else {
            return Err(doc.err(ce.span.start, "`center` must be a table"));
        };
        let bnames = jets.base_names();
        for e in &cs {
            let var = cnames
                .slot(&e.key)
                .filter(|&s| s >= 1 && s <= jets.num_vars())
                .map(|s| s - 1)
                .ok_or_else(|| doc.err(e.key_span.start, format!("`{}` is not a jet variable", e.key)))?;
            let (src, at) = doc.as_str(e)?;
            center.insert(var, doc.series(&src, at, &bnames, order as i32)?);
        }
    }
    doc.finish()?;
    Ok(ProlongedSystem { jets, closure, center, samples, order })
}

pub fn prolong_to_toml(ps: &ProlongedSystem) -> String {
    let js = &ps.jets;
    let policy = match js.policy {
        SlotPolicy::TransverseOnly => "transverse-only",
        SlotPolicy::AllTopOrder => "all-top-order",
    };
    let mut out = format!(
        "base_dim = {}\njet_order = {}\norder = {}\npolicy = \"{policy}\"\nsamples = [",
        js.base_dim(),
        js.order,
        ps.order
    );
    for (i, x) in ps.samples.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let cells: Vec<String> = x.iter().map(|c| format!("\"{c}\"")).collect();
        let _ = write!(out, "[{}]", cells.join(", "));
    }
    out.push_str("]\n\n[closure]\n");
    let cnames = js.closure_names();
    for (v, r) in js.closure_slots.iter().zip(&ps.closure) {
        let _ = writeln!(out, "{} = \"{}\"", js.var_name(*v), r.display_with(&cnames));
    }
    if !ps.center.is_empty() {
        out.push_str("\n[center]\n");
        let bnames = js.base_names();
        for (v, c) in &ps.center {
            let _ = writeln!(out, "{} = \"{}\"", js.var_name(*v), c.display_with(&bnames));
        }
    }
    out
}
