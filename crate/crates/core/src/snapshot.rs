//! Plain-text grid snapshots.
//!
//! ```text
//! # optional comment lines
//! region <lo1> <lo2> <lo3> <hi1> <hi2> <hi3> exterior <E|O|C>
//! <x> <y> <z> <O|C>
//! ```
//!
//! Vertex lines list every non-empty region vertex in lexicographic order.
//! Only box regions can be written.

use std::fmt::Write as _;

use crate::dynamics::{Configuration, Region, SiteState};
use crate::error::{Error, Result};
use crate::lattice::{Cuboid, Membership, Vertex};

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub comments: Vec<String>,
    pub config: Configuration,
}

pub fn write_snapshot(config: &Configuration, comments: &[String]) -> Result<String> {
    let Region::Box(b) = config.region() else {
        return Err(Error::Contract("snapshots require a box region".into()));
    };
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}").unwrap();
        }
    }
    let (lo, hi) = (b.lo(), b.hi());
    writeln!(
        out,
        "region {} {} {} {} {} {} exterior {}",
        lo[0],
        lo[1],
        lo[2],
        hi[0],
        hi[1],
        hi[2],
        config.exterior().symbol()
    )
    .unwrap();
    for (v, s) in config.non_empty() {
        writeln!(out, "{} {} {} {}", v[0], v[1], v[2], s.symbol()).unwrap();
    }
    Ok(out)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut comments = Vec::new();
    let mut config: Option<Configuration> = None;
    let mut last: Option<Vertex> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        if let Some(c) = raw.strip_prefix('#') {
            if config.is_some() {
                return Err(parse_err(ln, "comment after header"));
            }
            comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        let f: Vec<&str> = raw.split_whitespace().collect();
        match &mut config {
            None => {
                if f.len() != 9 || f[0] != "region" || f[7] != "exterior" {
                    return Err(parse_err(ln, "expected `region lo1 lo2 lo3 hi1 hi2 hi3 exterior S`"));
                }
                let n: Vec<i64> = f[1..7]
                    .iter()
                    .map(|s| s.parse().map_err(|_| parse_err(ln, format!("bad integer `{s}`"))))
                    .collect::<Result<_>>()?;
                if (0..3).any(|k| n[k] > n[k + 3]) {
                    return Err(parse_err(ln, "region lower corner exceeds upper corner"));
                }
                let ext = SiteState::from_symbol(f[8]).ok_or_else(|| parse_err(ln, "exterior must be E, O or C"))?;
                let b = Cuboid::new(Vertex::new(n[0], n[1], n[2]), Vertex::new(n[3], n[4], n[5]));
                config = Some(Configuration::new_box(b, ext));
            }
            Some(c) => {
                if f.len() != 4 {
                    return Err(parse_err(ln, "expected `x y z S`"));
                }
                let mut xs = [0i64; 3];
                for k in 0..3 {
                    xs[k] = f[k].parse().map_err(|_| parse_err(ln, format!("bad integer `{}`", f[k])))?;
                }
                let v = Vertex(xs);
                let s = match SiteState::from_symbol(f[3]) {
                    Some(s @ (SiteState::Occupied | SiteState::Closed)) => s,
                    _ => return Err(parse_err(ln, "state must be O or C")),
                };
                if !c.region().contains(v) {
                    return Err(parse_err(ln, format!("{v} outside region")));
                }
                if last.is_some_and(|l| l >= v) {
                    return Err(parse_err(ln, "vertices must be strictly increasing"));
                }
                last = Some(v);
                c.set(v, s);
            }
        }
    }
    let config = config.ok_or_else(|| parse_err(text.lines().count() + 1, "missing region header"))?;
    Ok(Snapshot { comments, config })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let text = "# seed 7\n# p 0.1\nregion -1 -1 -1 1 2 1 exterior O\n-1 0 1 C\n0 0 0 O\n1 2 -1 O\n";
        let snap = parse_snapshot(text).unwrap();
        assert_eq!(snap.comments, vec!["seed 7", "p 0.1"]);
        assert_eq!(snap.config.get(Vertex::ORIGIN), SiteState::Occupied);
        assert_eq!(snap.config.get(Vertex::new(9, 9, 9)), SiteState::Occupied);
        assert_eq!(write_snapshot(&snap.config, &snap.comments).unwrap(), text);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "region 0 0 0 1 1 1\n",
            "region 0 0 0 1 1 1 exterior X\n",
            "region 1 0 0 0 1 1 exterior E\n",
            "region 0 0 0 1 1 1 exterior E\n0 0 0 E\n",
            "region 0 0 0 1 1 1 exterior E\n5 0 0 O\n",
            "region 0 0 0 1 1 1 exterior E\n1 0 0 O\n0 0 0 O\n",
            "region 0 0 0 1 1 1 exterior E\n# late\n",
        ] {
            assert!(parse_snapshot(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn set_regions_are_refused() {
        let c = Configuration::new(Region::from_vertices([Vertex::ORIGIN]), SiteState::Empty);
        assert!(write_snapshot(&c, &[]).is_err());
    }
}
