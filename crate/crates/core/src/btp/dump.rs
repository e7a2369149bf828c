//! Line-oriented text dump of a run. Floats use shortest round-trip decimals,
//! so `parse_dump(write_dump(r)) == r` bit for bit.

use std::fmt::Write as _;

use super::{BtpRun, Particle};
use crate::error::{Error, Result};

const MAGIC: &str = "# btp-run v1";
const COLUMNS: &str = "id parent vertex birth direction alive";

pub fn write_dump(run: &BtpRun) -> String {
    let mut s = String::with_capacity(40 * run.particles.len() + 128);
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(
        s,
        "# n={} horizon={} origin={} seed={} truncated={} collisions={}",
        run.n, run.horizon, run.origin, run.seed, run.truncated, run.collisions
    );
    let _ = writeln!(s, "{COLUMNS}");
    for p in &run.particles {
        let parent = p.parent.map_or("-".to_string(), |q| q.to_string());
        let dir = p.direction.map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(s, "{} {} {} {} {} {}", p.id, parent, p.vertex, p.birth, dir, u8::from(p.alive));
    }
    s
}

fn field<T: std::str::FromStr>(key: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::Parse(format!("missing {key}")))?;
    raw.parse().map_err(|_| Error::Parse(format!("bad {key}: {raw:?}")))
}

fn optional<T: std::str::FromStr>(key: &str, raw: Option<&str>) -> Result<Option<T>> {
    match raw {
        Some("-") => Ok(None),
        other => field(key, other).map(Some),
    }
}

pub fn parse_dump(text: &str) -> Result<BtpRun> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(Error::Parse("missing btp-run header".into()));
    }
    let header =
        lines.next().and_then(|l| l.strip_prefix("# ")).ok_or_else(|| Error::Parse("missing run parameters".into()))?;
    let mut kv = std::collections::HashMap::new();
    for item in header.split_whitespace() {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("bad parameter {item:?}")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| kv.get(k).copied();
    let n: u32 = field("n", get("n"))?;
    if !(1..=crate::hypercube::MAX_DIMENSION).contains(&n) {
        return Err(Error::Dimension(n));
    }
    let mut run = BtpRun {
        n,
        horizon: field("horizon", get("horizon"))?,
        origin: field("origin", get("origin"))?,
        seed: field("seed", get("seed"))?,
        truncated: field("truncated", get("truncated"))?,
        collisions: field("collisions", get("collisions"))?,
        particles: Vec::new(),
        vertex_index: Vec::new(),
    };
    if lines.next() != Some(COLUMNS) {
        return Err(Error::Parse("missing column header".into()));
    }
    for (i, line) in lines.enumerate() {
        let mut it = line.split_whitespace();
        let p = Particle {
            id: field("id", it.next())?,
            parent: optional("parent", it.next())?,
            vertex: field("vertex", it.next())?,
            birth: field("birth", it.next())?,
            direction: optional("direction", it.next())?,
            alive: field::<u8>("alive", it.next())? == 1,
        };
        if it.next().is_some() || p.id as usize != i {
            return Err(Error::Parse(format!("malformed particle line {}", i + 1)));
        }
        if p.vertex >> n != 0 || p.parent.is_some_and(|q| q as usize >= i) {
            return Err(Error::Parse(format!("particle {i} out of range")));
        }
        run.particles.push(p);
    }
    run.rebuild_index();
    Ok(run)
}
