//! Survey of small lattice triangles, one search per jump orbit.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::lattice::{primitivity_index, quadruple_of, Point, PointTriple, Quadruple};

use super::{canonical, components, reduce, search, SearchOptions};

pub const MAX_SCAN_COORD: i64 = 8;

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub max_coord: i64,
    pub bound: u64,
    pub workers: usize,
    /// Stop after this many rows; the table is then marked truncated.
    pub max_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    /// Lexicographically first triple of the orbit in the box.
    pub points: PointTriple,
    pub reduced: Quadruple,
    /// Triples in the box belonging to this orbit.
    pub members: usize,
    /// `G` or `H` when the orbit is one of the built-in fixtures.
    pub fixture: Option<String>,
    pub missed_non_square: Vec<u64>,
    pub max_missed_non_square: Option<u64>,
    pub missed_half_count: usize,
    pub max_missed_half: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanTable {
    pub schema_version: u32,
    pub max_coord: i64,
    pub bound: u64,
    pub triples: usize,
    pub collinear_skipped: usize,
    pub non_primitive_skipped: usize,
    pub orbits: usize,
    pub truncated: bool,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn row_for(&self, fixture: &str) -> Option<&ScanRow> {
        self.rows.iter().find(|r| r.fixture.as_deref() == Some(fixture))
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Canonical reduced state followed by its canonical component starts. A
/// full orbit can hold several reduced states; they share component starts.
fn orbit_keys(q: Quadruple) -> Result<Vec<Quadruple>> {
    let reduced = reduce(q)?.reduced;
    let mut keys = vec![canonical(reduced)];
    keys.extend(components(reduced)?.into_iter().map(|c| c.start));
    Ok(keys)
}

pub fn scan(opts: &ScanOptions) -> Result<ScanTable> {
    if opts.max_coord < 1 || opts.max_coord > MAX_SCAN_COORD {
        return Err(Error::BudgetExceeded(format!(
            "scan max coordinate {} outside [1, {MAX_SCAN_COORD}]",
            opts.max_coord
        )));
    }
    let n = opts.max_coord + 1;
    let pts: Vec<Point> = (0..n).flat_map(|x| (0..n).map(move |y| Point::new(x, y))).collect();

    let mut node_of: BTreeMap<Quadruple, usize> = BTreeMap::new();
    let mut dsu = Dsu(Vec::new());
    let mut node = |q: Quadruple, dsu: &mut Dsu| -> usize {
        *node_of.entry(q).or_insert_with(|| {
            dsu.0.push(dsu.0.len());
            dsu.0.len() - 1
        })
    };

    let (mut triples, mut collinear, mut non_primitive) = (0, 0, 0);
    let mut kept: Vec<(PointTriple, Quadruple, usize)> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                triples += 1;
                let t = PointTriple::new(pts[i], pts[j], pts[k]);
                if t.is_collinear()? {
                    collinear += 1;
                    continue;
                }
                if !primitivity_index(&t)?.is_primitive() {
                    non_primitive += 1;
                    continue;
                }
                let keys = orbit_keys(quadruple_of(&t)?)?;
                let first = node(keys[0], &mut dsu);
                for &k in &keys[1..] {
                    let other = node(k, &mut dsu);
                    dsu.union(first, other);
                }
                kept.push((t, keys[0], first));
            }
        }
    }

    let fixture_roots: Vec<(&str, usize)> = [("G", fixtures::g()), ("H", fixtures::h())]
        .into_iter()
        .filter_map(|(name, t)| {
            let keys = orbit_keys(quadruple_of(&t).ok()?).ok()?;
            keys.iter().find_map(|k| node_of.get(k).copied()).map(|i| (name, i))
        })
        .collect();
    let fixture_roots: Vec<(&str, usize)> =
        fixture_roots.into_iter().map(|(name, i)| (name, dsu.find(i))).collect();

    let mut groups: BTreeMap<usize, (PointTriple, Quadruple, usize)> = BTreeMap::new();
    for (t, key, i) in kept {
        let root = dsu.find(i);
        groups.entry(root).and_modify(|g| g.2 += 1).or_insert((t, key, 1));
    }
    let mut ordered: Vec<(usize, (PointTriple, Quadruple, usize))> = groups.into_iter().collect();
    ordered.sort_by_key(|(_, g)| g.0.points().map(|p| (p.x, p.y)));

    let orbits = ordered.len();
    let limit = opts.max_rows.unwrap_or(usize::MAX);
    let search_opts = SearchOptions { workers: opts.workers, ..Default::default() };
    let mut rows = Vec::new();
    for (root, (t, reduced, members)) in ordered.into_iter().take(limit) {
        let report = search(&t, opts.bound, &search_opts)?;
        let missed_non_square = report.missed_non_square_areas();
        let fixture = fixture_roots.iter().find(|(_, r)| *r == root).map(|(name, _)| name.to_string());
        log::debug!("scan: {t} -> {} non-square misses", missed_non_square.len());
        rows.push(ScanRow {
            points: t,
            reduced,
            members,
            fixture,
            max_missed_non_square: missed_non_square.last().copied(),
            missed_non_square,
            missed_half_count: report.missed_half_integers.len(),
            max_missed_half: report.missed_half_integers.last().copied(),
        });
    }
    Ok(ScanTable {
        schema_version: super::SCHEMA_VERSION,
        max_coord: opts.max_coord,
        bound: opts.bound,
        triples,
        collinear_skipped: collinear,
        non_primitive_skipped: non_primitive,
        orbits,
        truncated: rows.len() < orbits,
        rows,
    })
}
