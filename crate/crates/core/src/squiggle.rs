//! Strictly undulating squiggles: simplices of the weight carrier Δ_[t]
//! (sequences running from the `+` end to the `−` end) and of Δ₊ (both ends `+`).
//!
//! An n-dimensional squiggle crosses n+1 horizontal lines. Entries are the
//! gaps between lines, numbered `0..=n+1` from the bottom; line `i` separates
//! gap `i` from gap `i+1`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{OrdMap, Ordinal};

pub type Level = u8;

/// Removes repeated neighbours, then every interior entry that is not a
/// strict local extremum.
pub fn normalize(seq: &[Level]) -> Vec<Level> {
    let mut d: Vec<Level> = Vec::with_capacity(seq.len());
    for &v in seq {
        if d.last() != Some(&v) {
            d.push(v);
        }
    }
    if d.len() <= 2 {
        return d;
    }
    let mut out = Vec::with_capacity(d.len());
    out.push(d[0]);
    for w in d.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if (b > a && b > c) || (b < a && b < c) {
            out.push(b);
        }
    }
    out.push(d[d.len() - 1]);
    out
}

fn undulation_error(seq: &[Level]) -> Option<usize> {
    for i in 0..seq.len().saturating_sub(1) {
        if seq[i] == seq[i + 1] {
            return Some(i + 1);
        }
    }
    for i in 1..seq.len().saturating_sub(1) {
        let (a, b, c) = (seq[i - 1], seq[i], seq[i + 1]);
        if !((b > a && b > c) || (b < a && b < c)) {
            return Some(i);
        }
    }
    None
}

/// Relabels along a monotone `θ: [p] → [n]`: gap `v` goes to `#{j : θ(j) < v}`.
fn relabel(seq: &[Level], theta: &[u32]) -> Vec<Level> {
    let out: Vec<Level> = seq
        .iter()
        .map(|&v| theta.iter().filter(|&&t| t < v as u32).count() as Level)
        .collect();
    normalize(&out)
}

fn check_theta(theta: &[u32], n: usize) -> Result<()> {
    if theta.windows(2).any(|w| w[0] > w[1]) || theta.iter().any(|&t| t as usize > n) {
        return Err(Error::Invalid(format!(
            "{theta:?} is not a monotone map into [{n}]"
        )));
    }
    Ok(())
}

/// A simplex of Δ_[t]: starts at `n+1`, ends at `0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Squiggle {
    dim: usize,
    levels: Vec<Level>,
}

impl PartialOrd for Squiggle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Width, then dimension, then the level sequence.
impl Ord for Squiggle {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.width(), self.dim, &self.levels).cmp(&(other.width(), other.dim, &other.levels))
    }
}

impl fmt::Display for Squiggle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_levels(f, &self.levels)
    }
}

fn write_levels(f: &mut fmt::Formatter<'_>, levels: &[Level]) -> fmt::Result {
    write!(f, "(")?;
    for (i, v) in levels.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, ")")
}

impl Squiggle {
    pub fn new(dim: usize, levels: Vec<Level>) -> Result<Self> {
        let top = dim as Level + 1;
        if levels.len() < 2 {
            return Err(Error::Invalid("a squiggle has at least two entries".into()));
        }
        if levels[0] != top {
            return Err(Error::Invalid(format!(
                "position 0: expected the + end {top}, found {}",
                levels[0]
            )));
        }
        let last = levels.len() - 1;
        if levels[last] != 0 {
            return Err(Error::Invalid(format!(
                "position {last}: expected the - end 0, found {}",
                levels[last]
            )));
        }
        if let Some(p) = levels.iter().position(|&v| v > top) {
            return Err(Error::Invalid(format!(
                "position {p}: level {} above {top}",
                levels[p]
            )));
        }
        if let Some(p) = undulation_error(&levels) {
            return Err(Error::Invalid(format!(
                "position {p}: not strictly undulating"
            )));
        }
        Ok(Squiggle { dim, levels })
    }

    /// The atomic 0-simplex `u = (1,0)`.
    pub fn u() -> Self {
        Squiggle {
            dim: 0,
            levels: vec![1, 0],
        }
    }

    /// The 0-simplex of width `2m+1`, i.e. the object `[m]` of Δ_[t].
    pub fn vertex_of(m: usize) -> Self {
        let mut levels = vec![1];
        for _ in 0..m {
            levels.extend([0, 1]);
        }
        levels.push(0);
        Squiggle { dim: 0, levels }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn width(&self) -> usize {
        self.levels.len() - 1
    }

    fn top(&self) -> Level {
        self.dim as Level + 1
    }

    /// Acts by a monotone map `θ: [p] → [n]`.
    pub fn apply(&self, theta: &[u32]) -> Result<Squiggle> {
        check_theta(theta, self.dim)?;
        if theta.is_empty() {
            return Err(Error::Invalid("squiggles have no (-1)-simplices".into()));
        }
        Ok(Squiggle {
            dim: theta.len() - 1,
            levels: relabel(&self.levels, theta),
        })
    }

    pub fn face(&self, i: usize) -> Result<Squiggle> {
        if i > self.dim || self.dim == 0 {
            return Err(Error::Index(format!(
                "face d_{i} of a {}-simplex",
                self.dim
            )));
        }
        let theta: Vec<u32> = (0..=self.dim as u32).filter(|&j| j != i as u32).collect();
        self.apply(&theta)
    }

    pub fn degeneracy(&self, i: usize) -> Result<Squiggle> {
        if i > self.dim {
            return Err(Error::Index(format!(
                "degeneracy s_{i} of a {}-simplex",
                self.dim
            )));
        }
        let theta: Vec<u32> = (0..=self.dim as u32 + 1)
            .map(|j| if j <= i as u32 { j } else { j - 1 })
            .collect();
        self.apply(&theta)
    }

    pub fn vertex(&self, j: usize) -> Result<Squiggle> {
        self.apply(&[j as u32])
    }

    /// The ordinal `[m]` named by a 0-simplex.
    pub fn as_ordinal(&self) -> Option<Ordinal> {
        (self.dim == 0).then(|| Ordinal((self.width() / 2) as i32))
    }

    pub fn is_nondegenerate(&self) -> bool {
        let interior = &self.levels[1..self.levels.len() - 1];
        (1..=self.dim as Level).all(|v| interior.contains(&v))
    }

    pub fn is_atomic(&self) -> bool {
        !self.levels[1..self.levels.len() - 1].contains(&self.top())
    }

    pub fn in_delta_plus_image(&self) -> bool {
        self.levels[self.levels.len() - 2] == self.top()
    }

    pub fn final_vertex(&self) -> Squiggle {
        self.vertex(self.dim).expect("top vertex exists")
    }

    pub fn classify(&self) -> Classification {
        Classification {
            sequence: self.levels.clone(),
            dim: self.dim,
            undulating: true,
            nondegenerate: self.is_nondegenerate(),
            atomic: self.is_atomic(),
            in_delta_plus_image: self.in_delta_plus_image(),
            width: self.width(),
            final_vertex: self.final_vertex().levels,
        }
    }

    /// Splits at the last interior `+`: `act(x, a) == self` with `a` atomic.
    pub fn decompose(&self) -> (PlusSquiggle, Squiggle) {
        let top = self.top();
        let cut = (1..self.levels.len() - 1)
            .rev()
            .find(|&i| self.levels[i] == top);
        match cut {
            None => (PlusSquiggle::unit(self.dim), self.clone()),
            Some(c) => (
                PlusSquiggle {
                    dim: self.dim,
                    levels: self.levels[..=c].to_vec(),
                },
                Squiggle {
                    dim: self.dim,
                    levels: self.levels[c..].to_vec(),
                },
            ),
        }
    }

    /// Eilenberg–Zilber form: `self = θ^*(core)` with `core` nondegenerate and
    /// `θ: [n] → [m]` surjective.
    pub fn degeneracy_normal_form(&self) -> (Squiggle, Vec<u32>) {
        let top = self.top();
        let mut present: Vec<Level> = self.levels[1..self.levels.len() - 1]
            .iter()
            .copied()
            .filter(|&v| v != 0 && v != top)
            .collect();
        present.sort_unstable();
        present.dedup();
        let m = present.len();
        let rank = |v: Level| -> Level {
            if v == 0 {
                0
            } else if v == top {
                m as Level + 1
            } else {
                present.binary_search(&v).expect("present level") as Level + 1
            }
        };
        let core = Squiggle {
            dim: m,
            levels: self.levels.iter().map(|&v| rank(v)).collect(),
        };
        let theta = (0..=self.dim as Level)
            .map(|j| present.iter().filter(|&&v| v <= j).count() as u32)
            .collect();
        (core, theta)
    }

    /// Degeneracy word of the normal form, indices strictly decreasing.
    pub fn degeneracy_word(&self) -> Vec<usize> {
        let (_, theta) = self.degeneracy_normal_form();
        let mut w: Vec<usize> = (0..self.dim)
            .filter(|&j| theta[j] == theta[j + 1])
            .collect();
        w.reverse();
        w
    }

    pub fn render(&self) -> String {
        render_levels(self.dim, &self.levels)
    }
}

/// A simplex of Δ₊ = Hom(+,+): both ends at `n+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlusSquiggle {
    dim: usize,
    levels: Vec<Level>,
}

impl fmt::Display for PlusSquiggle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_levels(f, &self.levels)
    }
}

impl PlusSquiggle {
    pub fn new(dim: usize, levels: Vec<Level>) -> Result<Self> {
        let top = dim as Level + 1;
        if levels.is_empty() || levels[0] != top || levels[levels.len() - 1] != top {
            return Err(Error::Invalid(format!(
                "a plus squiggle starts and ends at {top}"
            )));
        }
        if let Some(p) = levels.iter().position(|&v| v > top) {
            return Err(Error::Invalid(format!("position {p}: level above {top}")));
        }
        if let Some(p) = undulation_error(&levels) {
            return Err(Error::Invalid(format!(
                "position {p}: not strictly undulating"
            )));
        }
        Ok(PlusSquiggle { dim, levels })
    }

    /// The identity of the monoid in dimension `n`: the single entry `n+1`.
    pub fn unit(dim: usize) -> Self {
        PlusSquiggle {
            dim,
            levels: vec![dim as Level + 1],
        }
    }

    /// The 0-simplex naming `[m]`, of width `2(m+1)`.
    pub fn vertex_of(m: i32) -> Self {
        let mut levels = vec![1];
        for _ in 0..=m {
            levels.extend([0, 1]);
        }
        PlusSquiggle { dim: 0, levels }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn width(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn apply(&self, theta: &[u32]) -> Result<PlusSquiggle> {
        check_theta(theta, self.dim)?;
        if theta.is_empty() {
            return Err(Error::Invalid("empty operator".into()));
        }
        Ok(PlusSquiggle {
            dim: theta.len() - 1,
            levels: relabel(&self.levels, theta),
        })
    }

    pub fn face(&self, i: usize) -> Result<PlusSquiggle> {
        if i > self.dim || self.dim == 0 {
            return Err(Error::Index(format!(
                "face d_{i} of a {}-simplex",
                self.dim
            )));
        }
        let theta: Vec<u32> = (0..=self.dim as u32).filter(|&j| j != i as u32).collect();
        self.apply(&theta)
    }

    pub fn degeneracy(&self, i: usize) -> Result<PlusSquiggle> {
        if i > self.dim {
            return Err(Error::Index(format!(
                "degeneracy s_{i} of a {}-simplex",
                self.dim
            )));
        }
        let theta: Vec<u32> = (0..=self.dim as u32 + 1)
            .map(|j| if j <= i as u32 { j } else { j - 1 })
            .collect();
        self.apply(&theta)
    }

    /// Monoid product: the translate of `other` by `self`.
    pub fn then(&self, other: &PlusSquiggle) -> Result<PlusSquiggle> {
        if self.dim != other.dim {
            return Err(Error::Invalid("dimension mismatch".into()));
        }
        let mut levels = self.levels.clone();
        levels.extend_from_slice(&other.levels[1..]);
        Ok(PlusSquiggle {
            dim: self.dim,
            levels,
        })
    }

    /// The ordinal at vertex `j`: one element per dip below line `j`.
    pub fn vertex_ordinal(&self, j: usize) -> Ordinal {
        let r = relabel(&self.levels, &[j as u32]);
        Ordinal(r.iter().filter(|&&v| v == 0).count() as i32 - 1)
    }

    /// The monotone map carried by the edge from vertex `j` to vertex `k ≥ j`:
    /// each dip below line `j` lies inside a dip below line `k`.
    pub fn edge_map(&self, j: usize, k: usize) -> OrdMap {
        assert!(
            j <= k && k <= self.dim,
            "edge {j}->{k} of a {}-simplex",
            self.dim
        );
        if j == k {
            return OrdMap::identity(self.vertex_ordinal(j).0);
        }
        let r = relabel(&self.levels, &[j as u32, k as u32]);
        let mut values = Vec::new();
        let mut dip: i64 = -1;
        for i in 0..r.len() {
            if r[i] == 2 {
                continue;
            }
            if i == 0 || r[i - 1] == 2 {
                dip += 1;
            }
            if r[i] == 0 {
                values.push(dip as u32);
            }
        }
        let ndips = r.iter().filter(|&&v| v == 2).count() as i32 - 1;
        OrdMap {
            dom: Ordinal(values.len() as i32 - 1),
            cod: Ordinal(ndips - 1),
            values,
        }
    }

    pub fn render(&self) -> String {
        render_levels(self.dim, &self.levels)
    }
}

/// The left action of Δ₊ on Δ_[t]: concatenate at the shared `+` entry.
pub fn act(x: &PlusSquiggle, s: &Squiggle) -> Result<Squiggle> {
    if x.dim != s.dim {
        return Err(Error::Invalid(format!(
            "cannot act by a {}-simplex on a {}-simplex",
            x.dim, s.dim
        )));
    }
    let mut levels = x.levels.clone();
    levels.extend_from_slice(&s.levels[1..]);
    Ok(Squiggle { dim: s.dim, levels })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub sequence: Vec<Level>,
    pub dim: usize,
    pub undulating: bool,
    pub nondegenerate: bool,
    pub atomic: bool,
    pub in_delta_plus_image: bool,
    pub width: usize,
    pub final_vertex: Vec<Level>,
}

/// Classifies a sequence; malformed input is rejected with the offending position.
pub fn classify(dim: usize, levels: &[Level]) -> Result<Classification> {
    Squiggle::new(dim, levels.to_vec()).map(|s| s.classify())
}

fn generate(
    dim: usize,
    width_max: usize,
    plus: bool,
    interior_top: bool,
    out: &mut Vec<Vec<Level>>,
) {
    let top = dim as Level + 1;
    let end = if plus { top } else { 0 };
    if plus {
        out.push(vec![top]);
    }
    let mut seq = vec![top];
    fn rec(
        seq: &mut Vec<Level>,
        going_down: bool,
        top: Level,
        end: Level,
        width_max: usize,
        interior_top: bool,
        out: &mut Vec<Vec<Level>>,
    ) {
        let w = seq.len() - 1;
        let last = *seq.last().expect("non-empty");
        if w < width_max && ((going_down && end < last) || (!going_down && end > last)) {
            let mut done = seq.clone();
            done.push(end);
            out.push(done);
        }
        if w + 2 > width_max {
            return;
        }
        let hi = if interior_top { top } else { top - 1 };
        let range: Vec<Level> = if going_down {
            (0..last).collect()
        } else {
            (last + 1..=hi).collect()
        };
        for v in range {
            seq.push(v);
            rec(seq, !going_down, top, end, width_max, interior_top, out);
            seq.pop();
        }
    }
    rec(&mut seq, true, top, end, width_max, interior_top, out);
}

/// Every squiggle of the given dimension and width at most `width_max`.
pub fn enumerate_squiggles(dim: usize, width_max: usize) -> Vec<Squiggle> {
    let mut raw = Vec::new();
    generate(dim, width_max, false, true, &mut raw);
    let mut v: Vec<Squiggle> = raw
        .into_iter()
        .map(|levels| Squiggle { dim, levels })
        .collect();
    v.sort();
    v
}

pub fn enumerate_plus_squiggles(dim: usize, width_max: usize) -> Vec<PlusSquiggle> {
    let mut raw = Vec::new();
    generate(dim, width_max, true, true, &mut raw);
    let mut v: Vec<PlusSquiggle> = raw
        .into_iter()
        .map(|levels| PlusSquiggle { dim, levels })
        .collect();
    v.sort_by(|a, b| (a.width(), &a.levels).cmp(&(b.width(), &b.levels)));
    v
}

/// Atomic, nondegenerate squiggles outside the Δ₊-image, ordered by width,
/// then dimension, then sequence.
pub fn enumerate_cells(width_max: usize, dim_max: usize) -> Vec<Squiggle> {
    let mut cells = Vec::new();
    for dim in 0..=dim_max.min(width_max.saturating_sub(1)) {
        let mut raw = Vec::new();
        generate(dim, width_max, false, false, &mut raw);
        for levels in raw {
            let s = Squiggle { dim, levels };
            if s.is_nondegenerate() && !s.in_delta_plus_image() {
                cells.push(s);
            }
        }
    }
    cells.sort();
    cells
}

/// Where a face of a cell attaches: the unit vertex `u` or an earlier cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Unit,
    Cell(usize),
}

/// `d_i(cell) = x · θ^*(target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceAttachment {
    pub translate: PlusSquiggle,
    pub theta: Vec<u32>,
    pub target: Target,
}

/// Decomposes every face of every cell; `index` must contain all cells that
/// can occur as targets.
pub fn attach(cell: &Squiggle, index: &HashMap<Squiggle, usize>) -> Result<Vec<FaceAttachment>> {
    let mut out = Vec::with_capacity(cell.dim + 1);
    for i in 0..=cell.dim {
        let f = cell.face(i)?;
        let (x, a) = f.decompose();
        let (core, theta) = a.degeneracy_normal_form();
        let target = if core == Squiggle::u() {
            Target::Unit
        } else {
            Target::Cell(*index.get(&core).ok_or_else(|| {
                Error::Invalid(format!(
                    "face {i} of {cell} reduces to {core}, which is not a known cell"
                ))
            })?)
        };
        out.push(FaceAttachment {
            translate: x,
            theta,
            target,
        });
    }
    Ok(out)
}

fn render_levels(dim: usize, levels: &[Level]) -> String {
    let gaps = dim + 2;
    let rows = 2 * gaps - 1;
    let cols = 2 * levels.len() - 1;
    let mut grid = vec![vec![' '; cols + 2]; rows];
    let row_of = |v: Level| 2 * (gaps - 1 - v as usize);
    for r in (1..rows).step_by(2) {
        for c in grid[r].iter_mut().skip(2) {
            *c = '-';
        }
        let line = (rows - 1 - r) / 2;
        let label: Vec<char> = line.to_string().chars().collect();
        grid[r][0] = label[0];
    }
    for (i, &v) in levels.iter().enumerate() {
        grid[row_of(v)][2 + 2 * i] = 'o';
        if i + 1 < levels.len() {
            let (a, b) = (row_of(v), row_of(levels[i + 1]));
            let (lo, hi) = (a.min(b), a.max(b));
            for (r, row) in grid.iter_mut().enumerate().take(hi).skip(lo + 1) {
                row[3 + 2 * i] = if r % 2 == 1 { '+' } else { '|' };
            }
        }
    }
    let mut s: Vec<String> = grid
        .into_iter()
        .map(|r| r.into_iter().collect::<String>().trim_end().to_string())
        .collect();
    let seq: Vec<String> = levels.iter().map(|v| v.to_string()).collect();
    s.push(format!("({})", seq.join(",")));
    s.join("\n")
}
