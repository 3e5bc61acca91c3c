//! Resumable enumeration state.
//!
//! ```text
//! fleas-checkpoint v1 label=K2 bound=24000 next=101 visited=4410 peak=2210 states=2
//! reach <hex words, 16 digits each, least significant word first>
//! 5 8 8 112
//! 5 20 8 113
//! ```
//!
//! The header line is followed by the reach bitmap line and then one frontier
//! state `a b c s` per line in decimal.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::Quadruple;

use super::{ComponentLabel, ReachSet};

pub const MAGIC: &str = "fleas-checkpoint";
pub const VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub label: ComponentLabel,
    pub bound: u64,
    /// Smallest unprocessed bucket; `bound + 1` once the frontier is empty.
    pub next_bucket: u64,
    pub visited: u64,
    pub peak_frontier: u64,
    pub frontier: Vec<Quadruple>,
    pub reach: ReachSet,
}

impl Checkpoint {
    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "{MAGIC} {VERSION} label={} bound={} next={} visited={} peak={} states={}",
            self.label,
            self.bound,
            self.next_bucket,
            self.visited,
            self.peak_frontier,
            self.frontier.len()
        )?;
        writeln!(out, "reach {}", self.reach.to_hex())?;
        for q in &self.frontier {
            writeln!(out, "{} {} {} {}", q.a, q.b, q.c, q.s)?;
        }
        Ok(())
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            self.write_to(&mut f)?;
            f.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        Checkpoint::read_from(BufReader::new(fs::File::open(path)?))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Checkpoint> {
        let bad = |m: String| Error::CheckpointFormat(m);
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(bad("missing header".into()));
        }
        match parts.next() {
            Some(VERSION) => {}
            other => return Err(bad(format!("unsupported version {other:?}"))),
        }
        let mut field = |name: &str| -> Result<String> {
            let tok = parts.next().ok_or_else(|| bad(format!("missing field {name}")))?;
            tok.strip_prefix(name)
                .and_then(|t| t.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| bad(format!("expected {name}=..., got `{tok}`")))
        };
        let num = |name: &str, v: String| -> Result<u64> {
            v.parse().map_err(|e| bad(format!("{name}: {e}")))
        };
        let label: ComponentLabel = field("label")?.parse().map_err(|_| bad("label".into()))?;
        let bound = num("bound", field("bound")?)?;
        let next_bucket = num("next", field("next")?)?;
        let visited = num("visited", field("visited")?)?;
        let peak_frontier = num("peak", field("peak")?)?;
        let states = num("states", field("states")?)? as usize;

        let reach_line = lines.next().ok_or_else(|| bad("missing reach line".into()))??;
        let hex = reach_line
            .strip_prefix("reach ")
            .ok_or_else(|| bad("malformed reach line".into()))?;
        let reach = ReachSet::from_hex(bound, hex.trim())?;

        let mut frontier = Vec::with_capacity(states);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| bad(format!("state `{line}`: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(bad(format!("state `{line}` does not have four fields")));
            }
            let q = Quadruple::new(v[0], v[1], v[2], v[3]);
            if q.s < next_bucket as i64 || q.s > bound as i64 {
                return Err(bad(format!("state {q} outside [{next_bucket}, {bound}]")));
            }
            frontier.push(q);
        }
        if frontier.len() != states {
            return Err(bad(format!("expected {states} states, found {}", frontier.len())));
        }
        Ok(Checkpoint { label, bound, next_bucket, visited, peak_frontier, frontier, reach })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(frontier: Vec<Quadruple>) -> Checkpoint {
        let mut reach = ReachSet::new(300);
        reach.insert(1);
        reach.insert(3);
        Checkpoint {
            label: ComponentLabel::K2,
            bound: 300,
            next_bucket: 101,
            visited: 40,
            peak_frontier: 12,
            frontier,
            reach,
        }
    }

    #[test]
    fn roundtrip() {
        for frontier in [vec![], vec![Quadruple::new(5, 8, 8, 112), Quadruple::new(-3, 8, 9, 200)]] {
            let cp = sample(frontier);
            let mut buf = Vec::new();
            cp.write_to(&mut buf).unwrap();
            assert_eq!(Checkpoint::read_from(&buf[..]).unwrap(), cp);
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let cp = sample(vec![Quadruple::new(5, 8, 8, 112), Quadruple::new(-3, 8, 9, 200)]);
        let mut buf = Vec::new();
        cp.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() - 12];
        assert!(matches!(Checkpoint::read_from(cut.as_bytes()), Err(Error::CheckpointFormat(_))));
        assert!(Checkpoint::read_from(&b""[..]).is_err());
        let header_only = text.lines().next().unwrap();
        assert!(Checkpoint::read_from(header_only.as_bytes()).is_err());
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let mut buf = Vec::new();
        sample(vec![]).write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace(" v1 ", " v9 ");
        assert!(matches!(
            Checkpoint::read_from(text.as_bytes()),
            Err(Error::CheckpointFormat(m)) if m.contains("version")
        ));
    }
}
