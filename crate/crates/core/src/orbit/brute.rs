use std::collections::{BTreeSet, HashSet};

use crate::algebra::Generator;
use crate::error::{Error, Result};
use crate::lattice::Quadruple;

pub const MAX_BRUTE_DEPTH: usize = 7;

/// `|s|` over all words in `U, V, W` and their inverses of length `<= depth`
/// applied to `q`.
pub fn brute_orbit(q: Quadruple, depth: usize) -> Result<BTreeSet<u64>> {
    if depth > MAX_BRUTE_DEPTH {
        return Err(Error::BudgetExceeded(format!("brute orbit depth {depth} > {MAX_BRUTE_DEPTH}")));
    }
    let mut seen: HashSet<Quadruple> = HashSet::from([q]);
    let mut layer = vec![q];
    let mut out = BTreeSet::from([q.s.unsigned_abs()]);
    for _ in 0..depth {
        let mut next = Vec::new();
        for cur in &layer {
            for g in Generator::all() {
                let n = g.apply(*cur)?;
                if seen.insert(n) {
                    out.insert(n.s.unsigned_abs());
                    next.push(n);
                }
            }
        }
        layer = next;
    }
    Ok(out)
}
