//! Arc diagrams 𝒵 = (Z, 𝐚, M) and pointed matched circles.
//!
//! Points carry user-facing integer identifiers. Internally every point also
//! has a global position: intervals are laid out one after another, each in
//! its own orientation order. A pointed matched circle is stored as the single
//! interval obtained by cutting the circle at the basepoint z.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::ExponentVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArcDiagramError {
    #[error("point {0} appears more than once")]
    DuplicatePoint(u32),
    #[error("point {0} in the matching is not a point of any interval")]
    UnknownPoint(u32),
    #[error("point {0} is matched {1} times (must be exactly once)")]
    BadMatching(u32, usize),
    #[error("pair ({0}, {0}) matches a point with itself")]
    SelfMatched(u32),
    #[error(
        "degenerate matching: surgery closes off a boundary component missing ∂Z (gaps {0:?})"
    )]
    Degenerate(Vec<String>),
    #[error("pointed matched circle must have exactly one circle, found {0} intervals")]
    CircleCount(usize),
    #[error("pointed matched circle has {0} points, which is not a positive multiple of 4")]
    CirclePointCount(usize),
    #[error(
        "pointed matched circle surgery gives {0} boundary components, expected 1 (genus mismatch)"
    )]
    GenusMismatch(usize),
    #[error("basepoint position {0} is outside the circle")]
    BadBasepoint(usize),
    #[error("interval {0} is empty")]
    EmptyInterval(usize),
    #[error("invalid chord: {0}")]
    InvalidChord(String),
    #[error("json error: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Pmc,
    Arc,
}

/// Serialized form of an arc diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ArcDiagramFile {
    pub flavor: Flavor,
    pub intervals: Vec<Vec<u32>>,
    pub matching: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint_after: Option<usize>,
}

/// A validated arc diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcDiagram {
    flavor: Flavor,
    intervals: Vec<Vec<u32>>,
    matching: Vec<[u32; 2]>,
    basepoint_after: Option<usize>,
    // derived
    order: Vec<u32>,
    interval_of: Vec<usize>,
    interval_start: Vec<usize>,
    pair_of: Vec<usize>,
    pairs: Vec<[usize; 2]>,
}

/// A chord: an interval [start, end] of global positions inside one interval
/// of Z, start strictly below end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    pub interval: usize,
    pub start: usize,
    pub end: usize,
}

/// Result of comparing a candidate embedding against the subdiagram relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubdiagramKind {
    NotASubdiagram,
    Subdiagram,
    FullSubdiagram,
}

/// An embedding of arc diagrams recorded as a map on global positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub positions: Vec<usize>,
}

impl ArcDiagram {
    pub fn new(file: ArcDiagramFile) -> Result<Self, ArcDiagramError> {
        let ArcDiagramFile {
            flavor,
            intervals,
            matching,
            basepoint_after,
        } = file;
        let order: Vec<u32> = match flavor {
            Flavor::Pmc => {
                if intervals.len() != 1 {
                    return Err(ArcDiagramError::CircleCount(intervals.len()));
                }
                let circle = &intervals[0];
                let b = basepoint_after.unwrap_or(circle.len().saturating_sub(1));
                if b >= circle.len() {
                    return Err(ArcDiagramError::BadBasepoint(b));
                }
                circle[b + 1..]
                    .iter()
                    .chain(&circle[..=b])
                    .copied()
                    .collect()
            }
            Flavor::Arc => intervals.iter().flatten().copied().collect(),
        };
        let interval_lens: Vec<usize> = match flavor {
            Flavor::Pmc => vec![order.len()],
            Flavor::Arc => intervals.iter().map(|i| i.len()).collect(),
        };
        for (i, &len) in interval_lens.iter().enumerate() {
            if len == 0 && flavor == Flavor::Pmc {
                return Err(ArcDiagramError::EmptyInterval(i));
            }
        }
        let mut pos_of = HashMap::new();
        for (p, &id) in order.iter().enumerate() {
            if pos_of.insert(id, p).is_some() {
                return Err(ArcDiagramError::DuplicatePoint(id));
            }
        }
        let mut interval_of = Vec::with_capacity(order.len());
        let mut interval_start = Vec::with_capacity(interval_lens.len() + 1);
        let mut acc = 0;
        for (i, &len) in interval_lens.iter().enumerate() {
            interval_start.push(acc);
            interval_of.extend(std::iter::repeat_n(i, len));
            acc += len;
        }
        interval_start.push(acc);
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        let mut pairs = Vec::new();
        for &[p, q] in &matching {
            if p == q {
                return Err(ArcDiagramError::SelfMatched(p));
            }
            for id in [p, q] {
                if !pos_of.contains_key(&id) {
                    return Err(ArcDiagramError::UnknownPoint(id));
                }
                *counts.entry(id).or_default() += 1;
            }
            let (a, b) = (pos_of[&p], pos_of[&q]);
            pairs.push([a.min(b), a.max(b)]);
        }
        for &id in &order {
            let c = counts.get(&id).copied().unwrap_or(0);
            if c != 1 {
                return Err(ArcDiagramError::BadMatching(id, c));
            }
        }
        let mut pair_of = vec![0; order.len()];
        for (k, pr) in pairs.iter().enumerate() {
            pair_of[pr[0]] = k;
            pair_of[pr[1]] = k;
        }
        let z = ArcDiagram {
            flavor,
            intervals,
            matching,
            basepoint_after,
            order,
            interval_of,
            interval_start,
            pair_of,
            pairs,
        };
        z.check_nondegenerate()?;
        if flavor == Flavor::Pmc {
            let n = z.num_points();
            if n == 0 || !n.is_multiple_of(4) {
                return Err(ArcDiagramError::CirclePointCount(n));
            }
            let comps = z.boundary_cycles().len();
            if comps != 1 {
                return Err(ArcDiagramError::GenusMismatch(comps));
            }
        }
        Ok(z)
    }

    pub fn from_json(s: &str) -> Result<Self, ArcDiagramError> {
        let f: ArcDiagramFile =
            serde_json::from_str(s).map_err(|e| ArcDiagramError::Json(e.to_string()))?;
        Self::new(f)
    }

    pub fn to_file(&self) -> ArcDiagramFile {
        ArcDiagramFile {
            flavor: self.flavor,
            intervals: self.intervals.clone(),
            matching: self.matching.clone(),
            basepoint_after: self.basepoint_after,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    /// The genus-1 pointed matched circle: points 1,2,3,4 with {1,3},{2,4}.
    pub fn genus1() -> Self {
        Self::new(ArcDiagramFile {
            flavor: Flavor::Pmc,
            intervals: vec![vec![1, 2, 3, 4]],
            matching: vec![[1, 3], [2, 4]],
            basepoint_after: Some(3),
        })
        .expect("valid")
    }

    /// Two intervals with one point each, matched together.
    pub fn zb() -> Self {
        Self::new(ArcDiagramFile {
            flavor: Flavor::Arc,
            intervals: vec![vec![1], vec![2]],
            matching: vec![[1, 2]],
            basepoint_after: None,
        })
        .expect("valid")
    }

    /// The antipodal pointed matched circle of genus k.
    pub fn antipodal(k: usize) -> Self {
        let n = 4 * k as u32;
        Self::new(ArcDiagramFile {
            flavor: Flavor::Pmc,
            intervals: vec![(1..=n).collect()],
            matching: (1..=2 * k as u32).map(|i| [i, i + 2 * k as u32]).collect(),
            basepoint_after: None,
        })
        .expect("valid")
    }

    /// The empty arc diagram.
    pub fn empty() -> Self {
        Self::new(ArcDiagramFile {
            flavor: Flavor::Arc,
            intervals: vec![],
            matching: vec![],
            basepoint_after: None,
        })
        .expect("valid")
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn is_pmc(&self) -> bool {
        self.flavor == Flavor::Pmc
    }

    pub fn num_points(&self) -> usize {
        self.order.len()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn num_intervals(&self) -> usize {
        self.interval_start.len() - 1
    }

    /// Genus k of a pointed matched circle (|𝐚| = 4k).
    pub fn genus(&self) -> Option<usize> {
        self.is_pmc().then(|| self.num_points() / 4)
    }

    /// Point identifier at a global position.
    pub fn point_id(&self, pos: usize) -> u32 {
        self.order[pos]
    }

    pub fn position_of(&self, id: u32) -> Option<usize> {
        self.order.iter().position(|&x| x == id)
    }

    pub fn interval_of(&self, pos: usize) -> usize {
        self.interval_of[pos]
    }

    /// Global positions [start, end) of interval i.
    pub fn interval_range(&self, i: usize) -> std::ops::Range<usize> {
        self.interval_start[i]..self.interval_start[i + 1]
    }

    pub fn pair_of(&self, pos: usize) -> usize {
        self.pair_of[pos]
    }

    pub fn pair(&self, k: usize) -> [usize; 2] {
        self.pairs[k]
    }

    pub fn pairs(&self) -> &[[usize; 2]] {
        &self.pairs
    }

    pub fn partner(&self, pos: usize) -> usize {
        let [a, b] = self.pairs[self.pair_of[pos]];
        if a == pos {
            b
        } else {
            a
        }
    }

    /// Number of elementary segments: Σ over intervals of (points − 1).
    pub fn num_segments(&self) -> usize {
        (0..self.num_intervals())
            .map(|i| self.interval_range(i).len().saturating_sub(1))
            .sum()
    }

    fn segment_index(&self, pos: usize) -> usize {
        let i = self.interval_of[pos];
        let before: usize = (0..i)
            .map(|j| self.interval_range(j).len().saturating_sub(1))
            .sum();
        before + (pos - self.interval_start[i])
    }

    /// Gaps on the top edge of [0,1]×Z: gap g of interval i sits between its
    /// (g−1)-th and g-th point, so interval i has len+1 gaps.
    fn gap_count(&self) -> usize {
        self.num_points() + self.num_intervals()
    }

    fn gap_left_of(&self, pos: usize) -> usize {
        // gap index: interval i's gaps are numbered start_i + i .. start_{i+1} + i
        pos + self.interval_of[pos]
    }

    fn gap_label(&self, g: usize) -> String {
        for i in 0..self.num_intervals() {
            let r = self.interval_range(i);
            let lo = r.start + i;
            let hi = r.end + i;
            if (lo..=hi).contains(&g) {
                let k = g - lo;
                let left = if k == 0 {
                    "start".to_string()
                } else {
                    self.order[r.start + k - 1].to_string()
                };
                let right = if r.start + k < r.end {
                    self.order[r.start + k].to_string()
                } else {
                    "end".to_string()
                };
                return format!("interval {i} between {left} and {right}");
            }
        }
        format!("gap {g}")
    }

    /// Boundary components of the surface obtained by attaching a band at
    /// every matched pair to [0,1]×Z. Each cycle lists gap indices; the flag
    /// records whether the cycle runs along the bottom edge [0]×Z.
    pub fn boundary_cycles(&self) -> Vec<(Vec<usize>, bool)> {
        let ngaps = self.gap_count();
        let mut next = vec![0; ngaps];
        let mut touches_bottom = vec![false; ngaps];
        for i in 0..self.num_intervals() {
            let r = self.interval_range(i);
            let lo = r.start + i;
            let hi = r.end + i;
            // the leftmost gap continues along the bottom to the rightmost gap
            next[lo] = hi;
            touches_bottom[lo] = true;
            for g in (lo + 1)..=hi {
                let pos = r.start + (g - lo) - 1;
                next[g] = self.gap_left_of(self.partner(pos));
            }
        }
        let mut seen = vec![false; ngaps];
        let mut cycles = Vec::new();
        for start in 0..ngaps {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut bottom = false;
            let mut g = start;
            while !seen[g] {
                seen[g] = true;
                cyc.push(g);
                bottom |= touches_bottom[g];
                g = next[g];
            }
            cycles.push((cyc, bottom));
        }
        cycles
    }

    fn check_nondegenerate(&self) -> Result<(), ArcDiagramError> {
        let bad: Vec<String> = self
            .boundary_cycles()
            .into_iter()
            .filter(|(_, b)| !b)
            .flat_map(|(c, _)| c.into_iter().map(|g| self.gap_label(g)))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ArcDiagramError::Degenerate(bad))
        }
    }

    /// −𝒵: every interval reversed and the interval order reversed.
    pub fn reverse(&self) -> Self {
        let file = match self.flavor {
            Flavor::Pmc => {
                let mut circle = self.intervals[0].clone();
                let n = circle.len();
                let b = self.basepoint_after.unwrap_or(n - 1);
                circle.reverse();
                // z sat between circle[b] and circle[b+1]; after reversal it sits
                // after the image of circle[b+1].
                let nb = (n - 1 - ((b + 1) % n)) % n;
                ArcDiagramFile {
                    flavor: Flavor::Pmc,
                    intervals: vec![circle],
                    matching: self.matching.clone(),
                    basepoint_after: self.basepoint_after.map(|_| nb),
                }
            }
            Flavor::Arc => ArcDiagramFile {
                flavor: Flavor::Arc,
                intervals: self
                    .intervals
                    .iter()
                    .rev()
                    .map(|i| i.iter().rev().copied().collect())
                    .collect(),
                matching: self.matching.clone(),
                basepoint_after: None,
            },
        };
        ArcDiagram::new(file).expect("reverse of a valid diagram is valid")
    }

    /// The position in −𝒵 corresponding to position `pos` of 𝒵.
    pub fn reverse_position(&self, pos: usize) -> usize {
        self.num_points() - 1 - pos
    }

    /// The arc-flavored view of this diagram (same points, same linear order).
    pub fn as_arc(&self) -> Self {
        if self.flavor == Flavor::Arc {
            return self.clone();
        }
        ArcDiagram::new(ArcDiagramFile {
            flavor: Flavor::Arc,
            intervals: vec![self.order.clone()],
            matching: self.matching.clone(),
            basepoint_after: None,
        })
        .expect("valid")
    }

    /// Disjoint union; the second diagram's identifiers are shifted when they
    /// collide with the first's.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let mine: BTreeSet<u32> = self.order.iter().copied().collect();
        let collide = other.order.iter().any(|id| mine.contains(id));
        let shift = if collide {
            mine.iter().max().map_or(0, |m| m + 1)
        } else {
            0
        };
        let mut intervals = self.as_arc().intervals;
        intervals.extend(
            other
                .as_arc()
                .intervals
                .iter()
                .map(|i| i.iter().map(|x| x + shift).collect::<Vec<_>>()),
        );
        let mut matching = self.matching.clone();
        matching.extend(other.matching.iter().map(|[a, b]| [a + shift, b + shift]));
        ArcDiagram::new(ArcDiagramFile {
            flavor: Flavor::Arc,
            intervals,
            matching,
            basepoint_after: None,
        })
        .expect("disjoint union of valid diagrams is valid")
    }

    /// Classify a candidate embedding given as a map of point identifiers.
    pub fn subdiagram_embed(
        small: &Self,
        big: &Self,
        map: &BTreeMap<u32, u32>,
    ) -> (SubdiagramKind, Option<Embedding>) {
        let mut positions = Vec::with_capacity(small.num_points());
        for p in 0..small.num_points() {
            let Some(&img) = map.get(&small.point_id(p)) else {
                return (SubdiagramKind::NotASubdiagram, None);
            };
            let Some(q) = big.position_of(img) else {
                return (SubdiagramKind::NotASubdiagram, None);
            };
            positions.push(q);
        }
        let distinct: BTreeSet<usize> = positions.iter().copied().collect();
        if distinct.len() != positions.len() {
            return (SubdiagramKind::NotASubdiagram, None);
        }
        // each interval maps monotonically into a single interval of the target,
        // and images of distinct intervals do not interleave
        let mut ranges = Vec::new();
        for i in 0..small.num_intervals() {
            let r = small.interval_range(i);
            if r.is_empty() {
                continue;
            }
            let imgs: Vec<usize> = r.clone().map(|p| positions[p]).collect();
            let iv = big.interval_of(imgs[0]);
            if imgs.iter().any(|&q| big.interval_of(q) != iv) {
                return (SubdiagramKind::NotASubdiagram, None);
            }
            if imgs.windows(2).any(|w| w[0] >= w[1]) {
                return (SubdiagramKind::NotASubdiagram, None);
            }
            ranges.push((imgs[0], *imgs.last().unwrap()));
        }
        ranges.sort();
        if ranges.windows(2).any(|w| w[0].1 >= w[1].0) {
            return (SubdiagramKind::NotASubdiagram, None);
        }
        for &[a, b] in small.pairs() {
            if big.partner(positions[a]) != positions[b] {
                return (SubdiagramKind::NotASubdiagram, None);
            }
        }
        let kind = if positions.len() == big.num_points() {
            SubdiagramKind::FullSubdiagram
        } else {
            SubdiagramKind::Subdiagram
        };
        (kind, Some(Embedding { positions }))
    }

    /// For each interval, the interval whose top endpoint lies on the same
    /// component as its bottom endpoint after surgery on Z.
    fn endpoint_pairing(&self) -> Vec<usize> {
        (0..self.num_intervals())
            .map(|i| {
                let mut iv = i;
                let mut pos = self.interval_range(i).start;
                loop {
                    let r = self.interval_range(iv);
                    if pos >= r.end {
                        return iv;
                    }
                    // arriving at a point from below: jump to just above its partner
                    let q = self.partner(pos);
                    iv = self.interval_of(q);
                    pos = q + 1;
                }
            })
            .collect()
    }

    /// Close this diagram up into a pointed matched circle containing it (or
    /// its union with 𝒵_b) as a full subdiagram, by repeatedly gluing the top
    /// of one interval to the bottom of another whose endpoints are not
    /// joined by surgery.
    pub fn embed_into_pmc(&self) -> (ArcDiagram, BTreeMap<u32, u32>, bool) {
        if self.is_pmc() {
            let map = self.order.iter().map(|&x| (x, x)).collect();
            return (self.clone(), map, false);
        }
        let mut intervals: Vec<Vec<u32>> = self
            .as_arc()
            .intervals
            .into_iter()
            .filter(|i| !i.is_empty())
            .collect();
        let mut matching = self.matching.clone();
        let mut used_zb = false;
        loop {
            let current = ArcDiagram::new(ArcDiagramFile {
                flavor: Flavor::Arc,
                intervals: intervals.clone(),
                matching: matching.clone(),
                basepoint_after: None,
            })
            .expect("gluing preserves validity");
            if intervals.len() <= 1 {
                break;
            }
            // top of interval i is joined to the bottom of interval j iff
            // pairing[j] == i
            let pairing = current.endpoint_pairing();
            let mut choice = None;
            'outer: for i in 0..intervals.len() {
                for j in 0..intervals.len() {
                    if i != j && pairing[j] != i {
                        choice = Some((i, j));
                        break 'outer;
                    }
                }
            }
            match choice {
                Some((i, j)) => {
                    let tail = intervals[j].clone();
                    intervals[i].extend(tail);
                    intervals.remove(j);
                }
                None => {
                    let next = intervals.iter().flatten().max().map_or(1, |m| m + 1);
                    intervals.push(vec![next]);
                    intervals.push(vec![next + 1]);
                    matching.push([next, next + 1]);
                    used_zb = true;
                }
            }
        }
        let circle = intervals.into_iter().next().unwrap_or_default();
        let n = circle.len();
        let pmc = ArcDiagram::new(ArcDiagramFile {
            flavor: Flavor::Pmc,
            intervals: vec![circle.clone()],
            matching,
            basepoint_after: Some(n.saturating_sub(1)),
        })
        .expect("the closing procedure yields a pointed matched circle");
        let map = circle.iter().map(|&x| (x, x)).collect();
        (pmc, map, used_zb)
    }

    /// All chords: pairs of positions start < end in a common interval.
    pub fn chords(&self) -> Vec<Chord> {
        let mut out = Vec::new();
        for i in 0..self.num_intervals() {
            let r = self.interval_range(i);
            for s in r.clone() {
                for e in (s + 1)..r.end {
                    out.push(Chord {
                        interval: i,
                        start: s,
                        end: e,
                    });
                }
            }
        }
        out
    }

    pub fn check_chord(&self, c: &Chord) -> Result<(), ArcDiagramError> {
        if c.start >= c.end
            || c.end >= self.num_points()
            || self.interval_of(c.start) != self.interval_of(c.end)
            || self.interval_of(c.start) != c.interval
        {
            return Err(ArcDiagramError::InvalidChord(format!("{c:?}")));
        }
        Ok(())
    }

    /// Coverage vector of the elementary segments met by a strand from
    /// `start` to `end` (positions in one interval).
    pub fn strand_support(&self, start: usize, end: usize) -> ExponentVector {
        let mut v = vec![0; self.num_segments()];
        if start < end {
            for p in start..end {
                v[self.segment_index(p)] += 1;
            }
        }
        ExponentVector(v)
    }

    pub fn support(&self, c: &Chord) -> ExponentVector {
        self.strand_support(c.start, c.end)
    }

    /// The chord of −𝒵 corresponding to a chord of 𝒵.
    pub fn reverse_chord(&self, c: &Chord) -> Chord {
        let s = self.reverse_position(c.end);
        let e = self.reverse_position(c.start);
        Chord {
            interval: self.num_intervals() - 1 - c.interval,
            start: s,
            end: e,
        }
    }

    /// A stable textual key identifying the diagram's content.
    pub fn content_key(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus1_is_valid() {
        let z = ArcDiagram::genus1();
        assert_eq!(z.genus(), Some(1));
        assert_eq!(z.chords().len(), 6);
    }

    #[test]
    fn adjacent_self_pair_is_degenerate() {
        let r = ArcDiagram::new(ArcDiagramFile {
            flavor: Flavor::Arc,
            intervals: vec![vec![1, 2]],
            matching: vec![[1, 2]],
            basepoint_after: None,
        });
        assert!(matches!(r, Err(ArcDiagramError::Degenerate(_))));
    }
}
