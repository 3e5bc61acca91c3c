//! Jump generators, the coordinate-relabeling group and word normalization.
//!
//! A state `(a, b, c; s)` is a column vector and matrices act from the left.
//! Generator `U` moves the pair opposite vertex 1 and changes `a`; `V`
//! changes `b`; `W` changes `c`. A [`Word`] is a matrix product written left
//! to right, so its rightmost letter acts first.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Quadruple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    U,
    V,
    W,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::U, Axis::V, Axis::W];

    /// Coordinate of the quadruple this axis modifies.
    pub const fn index(self) -> usize {
        match self {
            Axis::U => 0,
            Axis::V => 1,
            Axis::W => 2,
        }
    }

    pub const fn from_index(i: usize) -> Axis {
        match i {
            0 => Axis::U,
            1 => Axis::V,
            2 => Axis::W,
            _ => panic!("axis index out of range"),
        }
    }

    /// The axis different from both `self` and `other`.
    pub fn third(self, other: Axis) -> Axis {
        debug_assert_ne!(self, other);
        Axis::from_index(3 - self.index() - other.index())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::U => "U",
            Axis::V => "V",
            Axis::W => "W",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub const fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    const fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Plus, s) => s,
            (Sign::Minus, s) => s.flip(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub axis: Axis,
    pub sign: Sign,
}

impl Generator {
    pub const fn new(axis: Axis, sign: Sign) -> Self {
        Generator { axis, sign }
    }

    pub const fn pos(axis: Axis) -> Self {
        Generator::new(axis, Sign::Plus)
    }

    pub const fn neg(axis: Axis) -> Self {
        Generator::new(axis, Sign::Minus)
    }

    pub const fn inverse(self) -> Self {
        Generator::new(self.axis, self.sign.flip())
    }

    pub fn all() -> impl Iterator<Item = Generator> {
        Axis::ALL
            .into_iter()
            .flat_map(|a| [Generator::pos(a), Generator::neg(a)])
    }

    pub fn apply(self, q: Quadruple) -> Result<Quadruple> {
        jump(q, JumpStep { axis: self.axis, t: self.sign.value() })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Plus => write!(f, "{}", self.axis),
            Sign::Minus => write!(f, "{}'", self.axis),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(tok: &str) -> Result<Self> {
        let (body, sign) = match tok.strip_suffix('\'') {
            Some(b) => (b, Sign::Minus),
            None => (tok, Sign::Plus),
        };
        let axis = match body {
            "U" => Axis::U,
            "V" => Axis::V,
            "W" => Axis::W,
            _ => return Err(Error::WordSyntax(format!("unknown token `{tok}`"))),
        };
        Ok(Generator::new(axis, sign))
    }
}

/// A product of generators, leftmost factor outermost.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Generator> {
        self.0.iter()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inverse()).collect())
    }
}

impl From<Vec<Generator>> for Word {
    fn from(v: Vec<Generator>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Whitespace separated `U V W U' V' W'`.
    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Word> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat4(pub [[i64; 4]; 4]);

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);

    pub fn checked_mul(&self, rhs: &Mat4) -> Result<Mat4> {
        let mut out = [[0i64; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let v: i128 = (0..4).map(|k| self.0[i][k] as i128 * rhs.0[k][j] as i128).sum();
                *cell = i64::try_from(v).map_err(|_| Error::Overflow("matrix product"))?;
            }
        }
        Ok(Mat4(out))
    }

    pub fn apply(&self, q: Quadruple) -> Result<Quadruple> {
        let v = q.to_array();
        let mut out = [0i64; 4];
        for (i, cell) in out.iter_mut().enumerate() {
            let x: i128 = (0..4).map(|k| self.0[i][k] as i128 * v[k] as i128).sum();
            *cell = i64::try_from(x).map_err(|_| Error::Overflow("matrix action"))?;
        }
        Ok(Quadruple::from_array(out))
    }

    pub fn transpose(&self) -> Mat4 {
        let mut out = [[0i64; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[j][i];
            }
        }
        Mat4(out)
    }

    /// Cofactor expansion along the first row.
    pub fn det(&self) -> i128 {
        let m = |i: usize, j: usize| self.0[i][j] as i128;
        let det3 = |rows: [usize; 3], cols: [usize; 3]| {
            let e = |r: usize, c: usize| m(rows[r], cols[c]);
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        };
        (0..4)
            .map(|j| {
                let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
                let minor = det3([1, 2, 3], [cols[0], cols[1], cols[2]]);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m(0, j) * minor
            })
            .sum()
    }

    /// Number of nonzero entries in the top-left 3x3 block.
    pub fn upper_block_support(&self) -> usize {
        (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&(i, j)| self.0[i][j] != 0).count()
    }
}

impl fmt::Display for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{:>4} {:>4} {:>4} {:>4}", row[0], row[1], row[2], row[3])?;
        }
        Ok(())
    }
}

pub fn gen_matrix(g: Generator) -> Mat4 {
    let e = g.sign.value();
    let i = g.axis.index();
    let mut m = Mat4::IDENTITY.0;
    // Row i: the sum of a, b, c plus 2s (2e s for the inverse).
    m[i] = [1, 1, 1, 2 * e];
    // Row s: s plus e times the sum of the two other coordinates.
    for j in 0..3 {
        if j != i {
            m[3][j] = e;
        }
    }
    Mat4(m)
}

/// Twice the quadratic form `ab + ac + bc - s^2` as a symmetric matrix.
pub const FORM: Mat4 = Mat4([[0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 0, 0], [0, 0, 0, -2]]);

/// Matrix of `q -> (-a, -b, -c; s)`, which conjugates each generator into its
/// inverse.
pub const BAR: Mat4 = Mat4([[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]);

pub fn bar(q: Quadruple) -> Quadruple {
    Quadruple::new(-q.a, -q.b, -q.c, q.s)
}

/// The six coordinate relabelings. Transpositions negate `s`, the identity
/// and the two cycles keep it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Omega {
    I,
    T1,
    T2,
    T3,
    Cyc,
    Cyc2,
}

impl Omega {
    pub const ALL: [Omega; 6] = [Omega::I, Omega::T1, Omega::T2, Omega::T3, Omega::Cyc, Omega::Cyc2];

    /// `(perm, sign)` with `(w q)[i] = q[perm[i]]` and `s' = sign * s`.
    const fn action(self) -> ([usize; 3], Sign) {
        match self {
            Omega::I => ([0, 1, 2], Sign::Plus),
            Omega::T1 => ([0, 2, 1], Sign::Minus),
            Omega::T2 => ([2, 1, 0], Sign::Minus),
            Omega::T3 => ([1, 0, 2], Sign::Minus),
            Omega::Cyc => ([1, 2, 0], Sign::Plus),
            Omega::Cyc2 => ([2, 0, 1], Sign::Plus),
        }
    }

    fn from_action(perm: [usize; 3], sign: Sign) -> Omega {
        Omega::ALL
            .into_iter()
            .find(|o| o.action() == (perm, sign))
            .expect("relabeling group is closed")
    }

    /// The transposition fixing coordinate `axis`.
    pub const fn transposition(axis: Axis) -> Omega {
        match axis {
            Axis::U => Omega::T1,
            Axis::V => Omega::T2,
            Axis::W => Omega::T3,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(self, rhs: Omega) -> Omega {
        let (p, sp) = self.action();
        let (r, sr) = rhs.action();
        Omega::from_action([r[p[0]], r[p[1]], r[p[2]]], sp.times(sr))
    }

    pub fn inverse(self) -> Omega {
        Omega::ALL
            .into_iter()
            .find(|&o| self.compose(o) == Omega::I)
            .expect("group element has an inverse")
    }

    pub fn order(self) -> usize {
        let mut acc = self;
        let mut n = 1;
        while acc != Omega::I {
            acc = acc.compose(self);
            n += 1;
        }
        n
    }

    /// `self * g * self^-1`, again a single generator.
    pub fn conjugate(self, g: Generator) -> Generator {
        let (perm, sign) = self.action();
        let target = g.axis.index();
        let i = (0..3).find(|&i| perm[i] == target).expect("permutation");
        Generator::new(Axis::from_index(i), sign.times(g.sign))
    }

    pub fn apply(self, q: Quadruple) -> Quadruple {
        let (perm, sign) = self.action();
        let v = q.abc();
        Quadruple::new(v[perm[0]], v[perm[1]], v[perm[2]], sign.value() * q.s)
    }

    pub fn negates_s(self) -> bool {
        self.action().1 == Sign::Minus
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Omega::I => "I",
            Omega::T1 => "T1",
            Omega::T2 => "T2",
            Omega::T3 => "T3",
            Omega::Cyc => "C",
            Omega::Cyc2 => "C2",
        })
    }
}

pub fn omega_matrix(o: Omega) -> Mat4 {
    let (perm, sign) = o.action();
    let mut m = [[0i64; 4]; 4];
    for (i, &p) in perm.iter().enumerate() {
        m[i][p] = 1;
    }
    m[3][3] = sign.value();
    Mat4(m)
}

/// `t` consecutive applications of the axis generator (inverse for `t < 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpStep {
    pub axis: Axis,
    pub t: i64,
}

/// Closed form of `t` jumps along one axis: the moving coordinate gains
/// `X t^2 + 2 s t` and `s` gains `X t`, where `X` is that axis' side square.
pub fn jump(q: Quadruple, step: JumpStep) -> Result<Quadruple> {
    let i = step.axis.index();
    let x = q.side(i)? as i128;
    let t = step.t as i128;
    let s = q.s as i128;
    let mut v = q.to_array();
    let moved = v[i] as i128 + x * t * t + 2 * s * t;
    let new_s = s + x * t;
    v[i] = i64::try_from(moved).map_err(|_| Error::Overflow("jump"))?;
    v[3] = i64::try_from(new_s).map_err(|_| Error::Overflow("jump"))?;
    Ok(Quadruple::from_array(v))
}

pub fn word_matrix(w: &Word) -> Result<Mat4> {
    w.iter()
        .try_fold(Mat4::IDENTITY, |acc, &g| acc.checked_mul(&gen_matrix(g)))
}

/// `word_matrix(w) * q`, evaluated letter by letter from the right.
pub fn apply_word(w: &Word, q: Quadruple) -> Result<Quadruple> {
    w.iter().rev().try_fold(q, |acc, g| g.apply(acc))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalForm {
    pub body: Word,
    pub tail: Omega,
}

impl NormalForm {
    pub fn matrix(&self) -> Result<Mat4> {
        word_matrix(&self.body)?.checked_mul(&omega_matrix(self.tail))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.body, self.tail)
    }
}

fn free_reduce(word: &mut Vec<Generator>) {
    let mut out: Vec<Generator> = Vec::with_capacity(word.len());
    for &g in word.iter() {
        if out.last() == Some(&g.inverse()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    *word = out;
}

/// Rewrites `w` as a single-sign word followed by a relabeling.
///
/// Repeatedly takes the leftmost letter whose sign differs from the leading
/// one, `X^e Y^-e`, and replaces the pair by `Y^e T_k` (`k` the third axis);
/// `T_k` is then pushed through the suffix, inverting and relabeling each
/// letter, and absorbed into the tail. Each step shortens the word.
pub fn normalize(w: &Word) -> NormalForm {
    let mut body = w.0.clone();
    let mut tail = Omega::I;
    loop {
        free_reduce(&mut body);
        let Some(lead) = body.first().map(|g| g.sign) else {
            break;
        };
        let Some(i) = body.iter().position(|g| g.sign != lead) else {
            break;
        };
        let (x, y) = (body[i - 1], body[i]);
        let t = Omega::transposition(x.axis.third(y.axis));
        body[i - 1] = Generator::new(y.axis, lead);
        body.remove(i);
        for g in &mut body[i..] {
            *g = t.conjugate(*g);
        }
        tail = t.compose(tail);
    }
    NormalForm { body: Word(body), tail }
}

/// Matrices of every single-sign word of length `<= max_len`, in
/// breadth-first order.
fn single_sign_matrices(sign: Sign, max_len: usize) -> Result<Vec<Mat4>> {
    let gens: Vec<Mat4> = Axis::ALL.iter().map(|&a| gen_matrix(Generator::new(a, sign))).collect();
    let mut all = vec![Mat4::IDENTITY];
    let mut level = vec![Mat4::IDENTITY];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * 3);
        for m in &level {
            for g in &gens {
                next.push(m.checked_mul(g)?);
            }
        }
        all.extend_from_slice(&next);
        level = next;
    }
    Ok(all)
}

pub const MAX_WORD_ENUMERATION: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCheck {
    pub max_len: usize,
    pub words_per_sign: usize,
    pub distinct_positive: usize,
    pub distinct_negative: usize,
}

impl FreenessCheck {
    pub fn is_free(&self) -> bool {
        self.distinct_positive == self.words_per_sign && self.distinct_negative == self.words_per_sign
    }
}

/// Compares the matrices of all positive (and all negative) words of length
/// `<= max_len` for collisions.
pub fn free_check(max_len: usize) -> Result<FreenessCheck> {
    if max_len > MAX_WORD_ENUMERATION {
        return Err(Error::BudgetExceeded(format!(
            "word length {max_len} > {MAX_WORD_ENUMERATION}"
        )));
    }
    let pos = single_sign_matrices(Sign::Plus, max_len)?;
    let neg = single_sign_matrices(Sign::Minus, max_len)?;
    Ok(FreenessCheck {
        max_len,
        words_per_sign: pos.len(),
        distinct_positive: pos.iter().collect::<HashSet<_>>().len(),
        distinct_negative: neg.iter().collect::<HashSet<_>>().len(),
    })
}

/// Distinct matrices among positive and negative words of length `<= n`.
pub fn count_normal_forms(n: usize) -> Result<usize> {
    if n > MAX_WORD_ENUMERATION {
        return Err(Error::BudgetExceeded(format!("word length {n} > {MAX_WORD_ENUMERATION}")));
    }
    let mut set: HashSet<Mat4> = single_sign_matrices(Sign::Plus, n)?.into_iter().collect();
    set.extend(single_sign_matrices(Sign::Minus, n)?);
    Ok(set.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationsReport {
    pub checks: Vec<Check>,
}

impl RelationsReport {
    fn push(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check { name: name.into(), passed });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn mat_of(w: &str) -> Mat4 {
    word_matrix(&w.parse().expect("static word")).expect("small words do not overflow")
}

fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    a.checked_mul(b).expect("small matrices do not overflow")
}

/// Machine check of the generator relations, the relabeling group and the
/// invariants the search relies on.
pub fn verify_relations() -> RelationsReport {
    let mut r = RelationsReport::default();
    let t = |o| omega_matrix(o);

    // The three-letter relations, for each transposition.
    for (x, y, o) in [("U", "V", Omega::T3), ("V", "W", Omega::T1), ("W", "U", Omega::T2)] {
        for w in [
            format!("{x} {y}' {x}"),
            format!("{x}' {y} {x}'"),
            format!("{y} {x}' {y}"),
            format!("{y}' {x} {y}'"),
        ] {
            r.push(format!("{w} = {o}"), mat_of(&w) == t(o));
        }
    }

    for o in [Omega::T1, Omega::T2, Omega::T3] {
        for a in Axis::ALL {
            let g = Generator::pos(a);
            let conj = mul(&mul(&t(o), &gen_matrix(g)), &t(o));
            let expected = o.conjugate(g);
            r.push(
                format!("{o} {g} {o} = {expected}"),
                conj == gen_matrix(expected) && expected.sign == Sign::Minus,
            );
        }
    }
    r.push("T1 U T1 = U'", mul(&mul(&t(Omega::T1), &mat_of("U")), &t(Omega::T1)) == mat_of("U'"));
    r.push("T1 V T1 = W'", mul(&mul(&t(Omega::T1), &mat_of("V")), &t(Omega::T1)) == mat_of("W'"));
    r.push("T1 W T1 = V'", mul(&mul(&t(Omega::T1), &mat_of("W")), &t(Omega::T1)) == mat_of("V'"));

    let cyc = t(Omega::Cyc);
    r.push("C^3 = I", mul(&mul(&cyc, &cyc), &cyc) == Mat4::IDENTITY);
    r.push("C = T3 T2", mul(&t(Omega::T3), &t(Omega::T2)) == cyc);
    r.push("U' V W' U = C", mat_of("U' V W' U") == cyc);

    let mut closed = true;
    for a in Omega::ALL {
        for b in Omega::ALL {
            closed &= mul(&t(a), &t(b)) == t(a.compose(b));
        }
    }
    r.push("relabelings closed under product", closed);
    let mut orders: Vec<usize> = Omega::ALL.iter().map(|o| o.order()).collect();
    orders.sort_unstable();
    r.push("relabeling element orders 1,2,2,2,3,3", orders == [1, 2, 2, 2, 3, 3]);
    r.push(
        "relabelings non-abelian",
        Omega::T1.compose(Omega::T2) != Omega::T2.compose(Omega::T1),
    );
    r.push(
        "every relabeling has an inverse",
        Omega::ALL.iter().all(|o| o.compose(o.inverse()) == Omega::I),
    );

    for a in Axis::ALL {
        let g = Generator::pos(a);
        let m = gen_matrix(g);
        r.push(format!("det {g} = 1"), m.det() == 1);
        r.push(
            format!("{g} {g}' = I"),
            mul(&m, &gen_matrix(g.inverse())) == Mat4::IDENTITY,
        );
        r.push(format!("Y {g} Y = {g}'"), mul(&mul(&BAR, &m), &BAR) == gen_matrix(g.inverse()));
    }
    for g in Generator::all() {
        let m = gen_matrix(g);
        r.push(format!("{g} preserves ab+ac+bc-s^2"), mul(&mul(&m.transpose(), &FORM), &m) == FORM);
    }
    for o in Omega::ALL {
        let m = t(o);
        r.push(format!("det {o} = +-1"), m.det().abs() == 1);
        r.push(format!("{o} preserves ab+ac+bc-s^2"), mul(&mul(&m.transpose(), &FORM), &m) == FORM);
    }
    r.push(
        "C conjugation cycles U -> V -> W",
        Axis::ALL.iter().all(|&a| {
            let g = Generator::pos(a);
            let c = mul(&mul(&cyc, &gen_matrix(g)), &t(Omega::Cyc2));
            c == gen_matrix(Omega::Cyc.conjugate(g)) && Omega::Cyc.conjugate(g).sign == Sign::Plus
        }),
    );
    r
}
