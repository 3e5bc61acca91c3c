//! Achievable areas: reduction, the four-component decomposition of the full
//! jump group orbit, and complete enumeration up to a bound.
//!
//! The full orbit of a reduced state `K` under all jumps has the same `|s|`
//! values as the union of the positive-semigroup orbits of `K` and of
//! `T1 U' K`, `T2 V' K`, `T3 W' K`. All four starts have `s >= 0`, and a
//! positive jump on such a state strictly increases `s`, so each orbit can be
//! enumerated completely up to any bound.

mod brute;
mod checkpoint;
mod enumerate;
mod reach;
mod scan;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use brute::{brute_orbit, MAX_BRUTE_DEPTH};
pub use checkpoint::Checkpoint;
pub use enumerate::{enumerate, ComponentReach, Enumeration, RunControl};
pub use reach::ReachSet;
pub use scan::{scan, ScanOptions, ScanRow, ScanTable, MAX_SCAN_COORD};

use crate::algebra::{Axis, Generator, Omega, Word};
use crate::error::{Error, Result};
use crate::lattice::{quadruple_of, rescale_primitive, PointTriple, Quadruple};

pub const SCHEMA_VERSION: u32 = 1;

/// Representative of the states with the same positive-semigroup future:
/// `a, b, c` sorted ascending, `s` untouched.
///
/// Relabeling `a, b, c` while keeping `s` (a reflection of the triangle)
/// conjugates each positive generator into another positive generator, so
/// every permutation gives the same reach set.
pub fn canonical(q: Quadruple) -> Quadruple {
    let mut v = q.abc();
    v.sort_unstable();
    Quadruple::new(v[0], v[1], v[2], q.s)
}

/// `s >= 0` and every negative jump along a nonzero side makes `s` negative.
pub fn is_reduced(q: Quadruple) -> bool {
    if q.s < 0 {
        return false;
    }
    match q.raw_sides() {
        Ok(sides) => sides.iter().all(|&x| x <= 0 || q.s < x),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub reduced: Quadruple,
    /// Relabeling applied first (only when the input had `s < 0`).
    pub flip: Option<Omega>,
    /// Negative jumps applied after the flip; `reduced = word * flip * q`.
    pub word: Word,
}

/// Negative jumps along the largest side square not exceeding `s` (ties by
/// axis order) until none is left; a negatively oriented input is flipped by
/// `T3` first.
pub fn reduce(q: Quadruple) -> Result<Reduction> {
    let (mut cur, flip) = if q.s < 0 { (Omega::T3.apply(q), Some(Omega::T3)) } else { (q, None) };
    let mut applied = Vec::new();
    loop {
        let sides = cur.raw_sides()?;
        let pick = Axis::ALL
            .into_iter()
            .filter(|a| {
                let x = sides[a.index()];
                x > 0 && x <= cur.s
            })
            .max_by_key(|a| (sides[a.index()], std::cmp::Reverse(a.index())));
        let Some(axis) = pick else { break };
        let g = Generator::neg(axis);
        cur = g.apply(cur)?;
        applied.push(g);
    }
    applied.reverse();
    Ok(Reduction { reduced: cur, flip, word: Word(applied) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentLabel {
    K,
    K1,
    K2,
    K3,
}

impl ComponentLabel {
    pub const ALL: [ComponentLabel; 4] =
        [ComponentLabel::K, ComponentLabel::K1, ComponentLabel::K2, ComponentLabel::K3];
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentLabel::K => "K",
            ComponentLabel::K1 => "K1",
            ComponentLabel::K2 => "K2",
            ComponentLabel::K3 => "K3",
        })
    }
}

impl FromStr for ComponentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "K" => Ok(ComponentLabel::K),
            "K1" => Ok(ComponentLabel::K1),
            "K2" => Ok(ComponentLabel::K2),
            "K3" => Ok(ComponentLabel::K3),
            other => Err(Error::DegenerateInput(format!("unknown component `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub label: ComponentLabel,
    /// Canonical start state, `s >= 0`.
    pub start: Quadruple,
    /// Set when an earlier component has the same canonical start.
    pub merged_into: Option<ComponentLabel>,
}

/// `K` together with `T1 U' K`, `T2 V' K` and `T3 W' K`.
pub fn components(q: Quadruple) -> Result<Vec<Component>> {
    if !is_reduced(q) {
        return Err(Error::NotReduced(q.to_string()));
    }
    let mut starts = vec![(ComponentLabel::K, canonical(q))];
    for (label, axis) in [
        (ComponentLabel::K1, Axis::U),
        (ComponentLabel::K2, Axis::V),
        (ComponentLabel::K3, Axis::W),
    ] {
        let down = Generator::neg(axis).apply(q)?;
        let start = Omega::transposition(axis).apply(down);
        debug_assert!(start.s >= 0);
        starts.push((label, canonical(start)));
    }
    let mut out: Vec<Component> = Vec::with_capacity(4);
    for (label, start) in starts {
        let merged_into = out.iter().find(|c| c.merged_into.is_none() && c.start == start).map(|c| c.label);
        out.push(Component { label, start, merged_into });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Worker threads for bucket expansion; 1 runs everything inline.
    pub workers: usize,
    pub memory_budget: Option<u64>,
    /// Directory holding one `<label>.ckpt` file per component.
    pub checkpoint_dir: Option<PathBuf>,
    /// Continue from checkpoints found in `checkpoint_dir`.
    pub resume: bool,
    /// Restrict the search to these components.
    pub components: Option<Vec<ComponentLabel>>,
    /// Interrupt each component after this bucket (requires a checkpoint dir).
    pub pause_after: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            workers: 1,
            memory_budget: None,
            checkpoint_dir: None,
            resume: false,
            components: None,
            pause_after: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputEcho {
    pub points: Option<PointTriple>,
    pub primitivity_index: u64,
    /// The primitive triple actually searched (equal to `points` when the
    /// index is 1).
    pub search_points: Option<PointTriple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub label: ComponentLabel,
    pub start: Quadruple,
    pub merged_into: Option<ComponentLabel>,
    pub searched: bool,
    pub reached: u64,
    pub states_visited: u64,
    pub peak_frontier: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MissedInteger {
    pub area: u64,
    pub is_square: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub states_visited: u64,
    pub peak_frontier: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub wall_ms: u128,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub input: InputEcho,
    pub quadruple: Quadruple,
    pub reduced: Reduction,
    pub bound: u64,
    pub components: Vec<ComponentSummary>,
    pub combined_reached: u64,
    /// Areas `s / 2` for even `s <= bound` that no jump sequence attains.
    pub missed_integers: Vec<MissedInteger>,
    /// Odd `s <= bound` that no jump sequence attains (the area is `s / 2`).
    pub missed_half_integers: Vec<u64>,
    pub stats: SearchStats,
    /// Run-dependent data, kept apart from the deterministic payload.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(skip)]
    pub reach: BTreeMap<ComponentLabel, ReachSet>,
    #[serde(skip)]
    pub combined: ReachSet,
}

pub fn is_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

impl SearchReport {
    /// Reach set of a component, following merges.
    pub fn component_reach(&self, label: ComponentLabel) -> Option<&ReachSet> {
        let target = self
            .components
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.merged_into.unwrap_or(c.label))?;
        self.reach.get(&target)
    }

    pub fn missed_non_square_areas(&self) -> Vec<u64> {
        self.missed_integers.iter().filter(|m| !m.is_square).map(|m| m.area).collect()
    }

    /// JSON without the timing block; identical across reruns and worker counts.
    pub fn payload_json(&self) -> String {
        let mut r = self.clone();
        r.timing = None;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `kind,value,is_square`, one row per missed value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,value,is_square\n");
        for m in &self.missed_integers {
            out.push_str(&format!("integer,{},{}\n", m.area, m.is_square));
        }
        for s in &self.missed_half_integers {
            out.push_str(&format!("half_integer,{s},false\n"));
        }
        out
    }
}

fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::BudgetExceeded(format!("thread pool: {e}")))
}

/// Enumerates one component, honoring checkpoint and resume settings.
fn run_component(
    c: &Component,
    bound: u64,
    opts: &SearchOptions,
    pool: Option<&rayon::ThreadPool>,
    visit: &mut dyn FnMut(&Quadruple),
) -> Result<ComponentReach> {
    let path = opts.checkpoint_dir.as_ref().map(|d| d.join(format!("{}.ckpt", c.label)));
    let mut e = match &path {
        Some(p) if opts.resume && p.exists() => {
            let cp = Checkpoint::load(p)?;
            if cp.label != c.label || cp.bound != bound {
                return Err(Error::CheckpointFormat(format!(
                    "{} holds {} at bound {}, expected {} at bound {bound}",
                    p.display(),
                    cp.label,
                    cp.bound,
                    c.label
                )));
            }
            log::info!("component {}: resuming at bucket {}", c.label, cp.next_bucket);
            Enumeration::from_checkpoint(cp)
        }
        _ => Enumeration::new(c.label, c.start, bound)?,
    };
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    let ctl = RunControl {
        memory_budget: opts.memory_budget,
        checkpoint: path.clone(),
        pause_after: opts.pause_after,
    };
    e.run(pool, &ctl, visit)?;
    if let Some(p) = &path {
        e.checkpoint().save(p)?;
    }
    let done = e.finish();
    log::debug!(
        "component {}: {} states, {} values reached",
        c.label,
        done.visited,
        done.reach.count()
    );
    Ok(done)
}

/// Search pipeline on a quadruple: reduce, decompose, enumerate, combine.
pub fn search_quadruple(q: Quadruple, bound: u64, opts: &SearchOptions) -> Result<SearchReport> {
    search_inner(q, bound, opts, InputEcho { points: None, primitivity_index: 1, search_points: None })
}

/// Full pipeline on a point triple. Non-primitive triples are mapped onto
/// the primitive lattice they span first; the report then speaks about that
/// lattice and echoes the index.
pub fn search(t: &PointTriple, bound: u64, opts: &SearchOptions) -> Result<SearchReport> {
    quadruple_of(t)?;
    let (prim, index) = rescale_primitive(t)?;
    let q = quadruple_of(&prim)?;
    search_inner(
        q,
        bound,
        opts,
        InputEcho { points: Some(*t), primitivity_index: index.0, search_points: Some(prim) },
    )
}

fn search_inner(q: Quadruple, bound: u64, opts: &SearchOptions, input: InputEcho) -> Result<SearchReport> {
    let started = Instant::now();
    let reduction = reduce(q)?;
    let comps = components(reduction.reduced)?;
    let pool = build_pool(opts.workers)?;
    let selected = |l: ComponentLabel| opts.components.as_ref().is_none_or(|v| v.contains(&l));

    let mut reach = BTreeMap::new();
    let mut results: BTreeMap<ComponentLabel, ComponentReach> = BTreeMap::new();
    for c in &comps {
        if c.merged_into.is_some() {
            continue;
        }
        // A merged component that is selected pulls in its target.
        let wanted = selected(c.label)
            || comps.iter().any(|o| o.merged_into == Some(c.label) && selected(o.label));
        if !wanted {
            continue;
        }
        let r = run_component(c, bound, opts, pool.as_ref(), &mut |_| {})?;
        reach.insert(c.label, r.reach.clone());
        results.insert(c.label, r);
    }

    let mut combined = ReachSet::new(bound);
    let mut summaries = Vec::with_capacity(comps.len());
    for c in &comps {
        let target = c.merged_into.unwrap_or(c.label);
        let searched = selected(c.label) && results.contains_key(&target);
        let res = results.get(&target).filter(|_| searched);
        if let Some(r) = res {
            combined.union_with(&r.reach);
        }
        summaries.push(ComponentSummary {
            label: c.label,
            start: c.start,
            merged_into: c.merged_into,
            searched,
            reached: res.map_or(0, |r| r.reach.count()),
            states_visited: if c.merged_into.is_none() { res.map_or(0, |r| r.visited) } else { 0 },
            peak_frontier: if c.merged_into.is_none() { res.map_or(0, |r| r.peak_frontier) } else { 0 },
        });
    }

    let mut missed_integers = Vec::new();
    let mut missed_half_integers = Vec::new();
    for s in combined.missing() {
        if s % 2 == 0 {
            missed_integers.push(MissedInteger { area: s / 2, is_square: is_square(s / 2) });
        } else {
            missed_half_integers.push(s);
        }
    }
    let stats = SearchStats {
        states_visited: results.values().map(|r| r.visited).sum(),
        peak_frontier: results.values().map(|r| r.peak_frontier).max().unwrap_or(0),
    };
    Ok(SearchReport {
        schema_version: SCHEMA_VERSION,
        input,
        quadruple: q,
        reduced: reduction,
        bound,
        components: summaries,
        combined_reached: combined.count(),
        missed_integers,
        missed_half_integers,
        stats,
        timing: Some(Timing { wall_ms: started.elapsed().as_millis(), workers: opts.workers }),
        reach,
        combined,
    })
}

/// Visits every state of every unmerged component up to `bound`.
pub fn for_each_orbit_state(
    q: Quadruple,
    bound: u64,
    opts: &SearchOptions,
    visit: &mut dyn FnMut(ComponentLabel, &Quadruple),
) -> Result<Vec<Component>> {
    let reduction = reduce(q)?;
    let comps = components(reduction.reduced)?;
    let pool = build_pool(opts.workers)?;
    for c in comps.iter().filter(|c| c.merged_into.is_none()) {
        let label = c.label;
        run_component(c, bound, &SearchOptions { checkpoint_dir: None, resume: false, ..opts.clone() }, pool.as_ref(), &mut |q| {
            visit(label, q)
        })?;
    }
    Ok(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{apply_word, Axis};
    use crate::fixtures;

    const G: Quadruple = Quadruple::new(8, -3, 5, 1);
    const H: Quadruple = Quadruple::new(8, -4, 9, 2);

    #[test]
    fn reduced_examples() {
        assert!(is_reduced(G));
        assert!(!is_reduced(Quadruple::new(12, -3, 5, 3)));
        assert!(!is_reduced(Quadruple::new(8, -3, 5, -1)));
        assert!(is_reduced(H));
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(Quadruple::new(12, -3, 5, 3)).unwrap();
        assert_eq!(r.reduced, G);
        assert_eq!(r.word.to_string(), "U'");
        assert_eq!(r.flip, None);
        let r = reduce(G).unwrap();
        assert_eq!(r.reduced, G);
        assert!(r.word.is_empty());
        let r = reduce(H).unwrap();
        assert_eq!(r.reduced, H);
        assert!(r.word.is_empty());
    }

    #[test]
    fn reduce_word_maps_input_to_output() {
        let q = apply_word(&"W V U W U V V".parse().unwrap(), G).unwrap();
        for start in [q, Omega::T2.apply(q)] {
            let r = reduce(start).unwrap();
            assert!(is_reduced(r.reduced));
            let flipped = r.flip.map_or(start, |o| o.apply(start));
            assert_eq!(apply_word(&r.word, flipped).unwrap(), r.reduced);
            assert!(r.word.iter().all(|g| g.sign == crate::algebra::Sign::Minus));
        }
    }

    #[test]
    fn reduce_unit_right_triangle_reaches_coincident_state() {
        let q = quadruple_of(&fixtures::unit_right()).unwrap();
        let r = reduce(q).unwrap();
        assert_eq!(r.reduced.s, 0);
        assert!(is_reduced(r.reduced));
    }

    #[test]
    fn components_of_g() {
        let cs = components(G).unwrap();
        assert_eq!(cs[1].merged_into, Some(ComponentLabel::K));
        assert_eq!(cs.iter().filter(|c| c.merged_into.is_none()).count(), 3);
        let k2 = &cs[2];
        let sides = {
            let mut v = k2.start.raw_sides().unwrap();
            v.sort_unstable();
            v
        };
        assert_eq!(sides, [13, 13, 16]);
        assert_eq!(k2.start.s, 12);
    }

    #[test]
    fn components_of_degenerate_state() {
        let q = Quadruple::new(2, -1, 2, 0);
        assert!(is_reduced(q));
        let cs = components(q).unwrap();
        let sides = q.raw_sides().unwrap();
        for (c, axis) in cs[1..].iter().zip(Axis::ALL) {
            assert_eq!(c.start.s, sides[axis.index()]);
        }
    }

    #[test]
    fn components_require_reduced() {
        assert!(components(Quadruple::new(12, -3, 5, 3)).is_err());
    }

    #[test]
    fn canonical_is_idempotent_and_reach_invariant() {
        let q = Quadruple::new(12, -3, 5, 3);
        assert_eq!(canonical(canonical(q)), canonical(q));
        let base = enumerate(q, 800).unwrap();
        for o in [Omega::Cyc, Omega::Cyc2] {
            assert_eq!(enumerate(o.apply(q), 800).unwrap(), base);
        }
        // Reflection: swap two coordinates, keep s.
        assert_eq!(enumerate(Quadruple::new(-3, 12, 5, 3), 800).unwrap(), base);
    }

    #[test]
    fn search_g_small() {
        let r = search(&fixtures::g(), 1, &SearchOptions::default()).unwrap();
        assert_eq!(r.combined.iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(r.missed_integers, vec![MissedInteger { area: 0, is_square: true }]);
    }

    #[test]
    fn search_rescales_non_primitive_input() {
        let t = crate::lattice::PointTriple::from_points(
            fixtures::g().points().map(|p| crate::lattice::Point::new(2 * p.x, 2 * p.y)),
        );
        let scaled = search(&t, 200, &SearchOptions::default()).unwrap();
        let plain = search(&fixtures::g(), 200, &SearchOptions::default()).unwrap();
        assert_eq!(scaled.input.primitivity_index, 4);
        assert_eq!(scaled.missed_integers, plain.missed_integers);
    }

    #[test]
    fn component_selection() {
        let opts = SearchOptions { components: Some(vec![ComponentLabel::K1]), ..Default::default() };
        let r = search(&fixtures::g(), 400, &opts).unwrap();
        let k = r.components.iter().find(|c| c.label == ComponentLabel::K).unwrap();
        let k1 = r.components.iter().find(|c| c.label == ComponentLabel::K1).unwrap();
        assert!(!k.searched && k1.searched);
        assert!(r.reach.contains_key(&ComponentLabel::K));
        assert_eq!(r.combined, *r.component_reach(ComponentLabel::K1).unwrap());
    }

    #[test]
    fn csv_rows() {
        let r = search(&fixtures::h(), 10, &SearchOptions::default()).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("kind,value,is_square\ninteger,0,true\n"));
        assert!(csv.contains("half_integer,1,false"));
    }

    mod props {
        use super::*;
        use crate::lattice::{primitivity_index, Point};
        use proptest::prelude::*;

        fn reduced_primitive() -> impl Strategy<Value = Quadruple> {
            prop::array::uniform3((0i64..=6, 0i64..=6)).prop_filter_map("primitive triangle", |p| {
                let t = PointTriple::from_points(p.map(|(x, y)| Point::new(x, y)));
                if t.is_collinear().ok()? || !primitivity_index(&t).ok()?.is_primitive() {
                    return None;
                }
                Some(reduce(quadruple_of(&t).ok()?).ok()?.reduced)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn brute_orbit_within_decomposition(q in reduced_primitive()) {
                let brute = brute_orbit(q, 4).unwrap();
                let bound = *brute.iter().max().unwrap();
                let r = search_quadruple(q, bound, &SearchOptions::default()).unwrap();
                for s in brute {
                    prop_assert!(r.combined.contains(s), "{} not reached from {}", s, q);
                }
            }

            #[test]
            fn reach_invariant_under_relabeling(q in reduced_primitive(), o in 0usize..3) {
                let o = [Omega::I, Omega::Cyc, Omega::Cyc2][o];
                let base = enumerate(q, 600).unwrap();
                prop_assert_eq!(enumerate(o.apply(q), 600).unwrap(), base);
            }

            #[test]
            fn parity_constant_within_component(q in reduced_primitive()) {
                let mut parities = std::collections::BTreeMap::new();
                for_each_orbit_state(q, 800, &SearchOptions::default(), &mut |l, s| {
                    parities.entry(l).or_insert_with(std::collections::BTreeSet::new).insert(s.parity());
                }).unwrap();
                for set in parities.values() {
                    prop_assert_eq!(set.len(), 1);
                }
            }

            #[test]
            fn reach_is_monotone_in_bound(q in reduced_primitive(), b in 50u64..800) {
                let small = search_quadruple(q, b, &SearchOptions::default()).unwrap();
                let large = search_quadruple(q, 2 * b, &SearchOptions::default()).unwrap();
                for s in 0..=b {
                    prop_assert_eq!(small.combined.contains(s), large.combined.contains(s));
                }
            }

            #[test]
            fn reduction_is_reduced_and_invertible(q in reduced_primitive(), w in prop::collection::vec(0usize..6, 0..8)) {
                let gens: Vec<Generator> = Generator::all().collect();
                let word = Word(w.into_iter().map(|i| gens[i]).collect());
                let start = apply_word(&word, q).unwrap();
                let r = reduce(start).unwrap();
                prop_assert!(is_reduced(r.reduced));
                let flipped = r.flip.map_or(start, |o| o.apply(start));
                prop_assert_eq!(apply_word(&r.word, flipped).unwrap(), r.reduced);
            }
        }
    }
}
