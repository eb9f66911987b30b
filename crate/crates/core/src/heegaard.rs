//! Bordered-sutured Heegaard diagrams given as polygonal region complexes,
//! their validation (including niceness), generator enumeration, and the
//! combinatorial curve count that turns a nice diagram into a type D or DD
//! structure.
//!
//! Every region is a disk whose boundary word lists signed edge labels with
//! the region on the left. Interior edges (α and β) are used twice with
//! opposite signs; boundary edges (bordered and sutured) are used once, and
//! the sign of that use fixes the boundary orientation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arcdiagram::{ArcDiagram, ArcDiagramFile, Chord, Flavor};
use crate::coeff::F2;
use crate::strandalg::{complement_mask, AlgRef, Algebra, StrandAlgebra, TensorAlgebra};
use crate::structures::TypeD;

pub const SCHEMA_HEEGAARD: &str = "bsfloer.heegaard/1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeegaardError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("unknown identifier {0}")]
    UnknownId(String),
    #[error("duplicate identifier {0}")]
    DuplicateId(String),
    #[error("edge {edge}: {detail}")]
    EdgeUsage { edge: String, detail: String },
    #[error("region {0}: boundary word is not a closed loop")]
    OpenRegion(String),
    #[error("vertex {vertex}: {detail}")]
    VertexDegree { vertex: String, detail: String },
    #[error("curve {curve}: {detail}")]
    Curve { curve: String, detail: String },
    #[error("Euler measure {found} of the regions differs from χ(Σ) = {expected}")]
    Euler { expected: String, found: String },
    #[error("sutures miss {0}")]
    SutureMissing(String),
    #[error("region {region} is not nice: {corners} α∩β corners")]
    NotNice { region: String, corners: usize },
    #[error("{side} side: {detail}")]
    Side { side: String, detail: String },
    #[error("domain {domain} meets the {side} boundary in {runs} chords")]
    MultiChord {
        domain: String,
        side: String,
        runs: usize,
    },
    #[error("domain {domain}: {detail}")]
    Inconsistent { domain: String, detail: String },
    #[error("diagram has no bordered boundary")]
    NoBorder,
    #[error("resulting structure fails its structure equation: {0}")]
    Structure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VertexKind {
    Intersection,
    AlphaEnd,
    Corner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Alpha,
    Beta,
    Bordered,
    Sutured,
}

impl EdgeKind {
    fn is_boundary(self) -> bool {
        matches!(self, EdgeKind::Bordered | EdgeKind::Sutured)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SideFile {
    pub flavor: Flavor,
    pub intervals: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matching: Option<Vec<[u32; 2]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<SideFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<SideFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VertexFile {
    pub id: String,
    pub kind: VertexKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EdgeFile {
    pub id: String,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RegionFile {
    pub id: String,
    pub boundary: Vec<String>,
}

/// Serialized bordered-sutured Heegaard diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HeegaardFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub sides: SidesFile,
    pub vertices: Vec<VertexFile>,
    pub edges: Vec<EdgeFile>,
    pub regions: Vec<RegionFile>,
}

impl HeegaardFile {
    pub fn from_json(s: &str) -> Result<Self, HeegaardError> {
        let f: HeegaardFile =
            serde_json::from_str(s).map_err(|e| HeegaardError::Schema(e.to_string()))?;
        if f.schema != SCHEMA_HEEGAARD {
            return Err(HeegaardError::Schema(format!(
                "unknown schema {}",
                f.schema
            )));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The orientation-reversed diagram: every region word is reversed with
    /// its signs flipped and every declared interval is reversed, so each
    /// bordered side 𝒵 becomes −𝒵.
    pub fn mirror(&self) -> Self {
        let flip = |s: &String| match s.strip_prefix('-') {
            Some(rest) => rest.to_string(),
            None => format!("-{s}"),
        };
        let side = |s: &Option<SideFile>| {
            s.as_ref().map(|s| SideFile {
                flavor: s.flavor,
                intervals: s
                    .intervals
                    .iter()
                    .rev()
                    .map(|i| i.iter().rev().copied().collect())
                    .collect(),
                matching: s.matching.clone(),
            })
        };
        HeegaardFile {
            schema: self.schema.clone(),
            name: self.name.as_ref().map(|n| format!("mirror({n})")),
            sides: SidesFile {
                left: side(&self.sides.left),
                right: side(&self.sides.right),
            },
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| RegionFile {
                    id: r.id.clone(),
                    boundary: r.boundary.iter().rev().map(flip).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
struct Edge {
    kind: EdgeKind,
    curve: Option<usize>,
    side: Option<Side>,
    from: usize,
    to: usize,
}

#[derive(Clone, Debug)]
struct Curve {
    name: String,
    beta: bool,
    /// Side and matched pair for α-arcs.
    arc: Option<(Side, usize)>,
}

/// A bordered side of a validated diagram.
#[derive(Clone, Debug)]
pub struct BorderSide {
    pub side: Side,
    pub diagram: ArcDiagram,
    pub algebra: Arc<StrandAlgebra>,
}

/// A generator: one intersection point per β-circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegaardGenerator {
    pub name: String,
    pub points: Vec<usize>,
    /// Idempotent masks, one per bordered side (left first).
    pub masks: Vec<u64>,
}

/// A validated nice diagram.
#[derive(Clone, Debug)]
pub struct NiceDiagram {
    pub file: HeegaardFile,
    vertex_names: Vec<String>,
    kinds: Vec<VertexKind>,
    edges: Vec<Edge>,
    curves: Vec<Curve>,
    regions: Vec<Vec<(usize, bool)>>,
    z_region: Vec<bool>,
    /// For intersection vertices: (α curve, β curve).
    cross: BTreeMap<usize, (usize, usize)>,
    /// For α-end vertices: position in its side's diagram.
    end_pos: BTreeMap<usize, usize>,
    pub sides: Vec<BorderSide>,
}

fn unknown(s: &str) -> HeegaardError {
    HeegaardError::UnknownId(s.to_string())
}

fn vertex_err(v: &str, detail: impl Into<String>) -> HeegaardError {
    HeegaardError::VertexDegree {
        vertex: v.to_string(),
        detail: detail.into(),
    }
}

fn curve_err(c: &str, detail: impl Into<String>) -> HeegaardError {
    HeegaardError::Curve {
        curve: c.to_string(),
        detail: detail.into(),
    }
}

fn side_err(s: Side, detail: impl Into<String>) -> HeegaardError {
    HeegaardError::Side {
        side: s.name().to_string(),
        detail: detail.into(),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Parse and validate a diagram file.
pub fn validate(file: &HeegaardFile) -> Result<NiceDiagram, HeegaardError> {
    NiceDiagram::new(file.clone())
}

impl NiceDiagram {
    pub fn from_json(s: &str) -> Result<Self, HeegaardError> {
        Self::new(HeegaardFile::from_json(s)?)
    }

    pub fn new(file: HeegaardFile) -> Result<Self, HeegaardError> {
        if file.schema != SCHEMA_HEEGAARD {
            return Err(HeegaardError::Schema(format!(
                "unknown schema {}",
                file.schema
            )));
        }
        let mut vidx = HashMap::new();
        for (i, v) in file.vertices.iter().enumerate() {
            if vidx.insert(v.id.clone(), i).is_some() {
                return Err(HeegaardError::DuplicateId(v.id.clone()));
            }
        }
        let vertex_names: Vec<String> = file.vertices.iter().map(|v| v.id.clone()).collect();
        let kinds: Vec<VertexKind> = file.vertices.iter().map(|v| v.kind).collect();

        // curves and edges
        let mut curves: Vec<Curve> = Vec::new();
        let mut cidx: HashMap<(String, bool), usize> = HashMap::new();
        let mut eidx = HashMap::new();
        let mut edges = Vec::new();
        for e in &file.edges {
            if eidx.insert(e.id.clone(), edges.len()).is_some() || vidx.contains_key(&e.id) {
                return Err(HeegaardError::DuplicateId(e.id.clone()));
            }
            let from = *vidx.get(&e.from).ok_or_else(|| unknown(&e.from))?;
            let to = *vidx.get(&e.to).ok_or_else(|| unknown(&e.to))?;
            let curve = match e.kind {
                EdgeKind::Alpha | EdgeKind::Beta => {
                    let name = e.curve.clone().ok_or_else(|| HeegaardError::EdgeUsage {
                        edge: e.id.clone(),
                        detail: "α and β edges must name their curve".into(),
                    })?;
                    let beta = e.kind == EdgeKind::Beta;
                    let n = curves.len();
                    let id = *cidx.entry((name.clone(), beta)).or_insert(n);
                    if id == n {
                        curves.push(Curve {
                            name,
                            beta,
                            arc: None,
                        });
                    }
                    Some(id)
                }
                _ => None,
            };
            let side = match e.kind {
                EdgeKind::Bordered => Some(e.side.ok_or_else(|| HeegaardError::EdgeUsage {
                    edge: e.id.clone(),
                    detail: "bordered edges must name their side".into(),
                })?),
                _ => e.side,
            };
            edges.push(Edge {
                kind: e.kind,
                curve,
                side,
                from,
                to,
            });
        }

        // regions: resolve, check closure, count edge uses
        let mut regions = Vec::new();
        let mut uses: Vec<(usize, usize)> = vec![(0, 0); edges.len()];
        let mut ridx = HashSet::new();
        for r in &file.regions {
            if !ridx.insert(r.id.clone()) {
                return Err(HeegaardError::DuplicateId(r.id.clone()));
            }
            if r.boundary.is_empty() {
                return Err(HeegaardError::OpenRegion(r.id.clone()));
            }
            let mut word = Vec::new();
            for s in &r.boundary {
                let (name, fwd) = match s.strip_prefix('-') {
                    Some(rest) => (rest, false),
                    None => (s.as_str(), true),
                };
                let e = *eidx.get(name).ok_or_else(|| unknown(name))?;
                if fwd {
                    uses[e].0 += 1;
                } else {
                    uses[e].1 += 1;
                }
                word.push((e, fwd));
            }
            let tail = |&(e, f): &(usize, bool)| if f { edges[e].to } else { edges[e].from };
            let head = |&(e, f): &(usize, bool)| if f { edges[e].from } else { edges[e].to };
            for i in 0..word.len() {
                if tail(&word[i]) != head(&word[(i + 1) % word.len()]) {
                    return Err(HeegaardError::OpenRegion(r.id.clone()));
                }
            }
            regions.push(word);
        }
        for (i, e) in edges.iter().enumerate() {
            let (p, n) = uses[i];
            let ok = if e.kind.is_boundary() {
                p + n == 1
            } else {
                p == 1 && n == 1
            };
            if !ok {
                return Err(HeegaardError::EdgeUsage {
                    edge: file.edges[i].id.clone(),
                    detail: format!("used {p} times forward and {n} times backward"),
                });
            }
        }
        // boundary direction: forward use means ∂Σ runs from → to
        let bdir: Vec<bool> = uses.iter().map(|&(p, _)| p == 1).collect();

        // vertex degrees
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); kinds.len()];
        for (i, e) in edges.iter().enumerate() {
            ends[e.from].push(i);
            ends[e.to].push(i);
        }
        let mut cross = BTreeMap::new();
        for (v, kind) in kinds.iter().enumerate() {
            let count = |k: EdgeKind| ends[v].iter().filter(|&&e| edges[e].kind == k).count();
            let curves_of = |k: EdgeKind| -> BTreeSet<usize> {
                ends[v]
                    .iter()
                    .filter(|&&e| edges[e].kind == k)
                    .filter_map(|&e| edges[e].curve)
                    .collect()
            };
            let (na, nb) = (count(EdgeKind::Alpha), count(EdgeKind::Beta));
            let nbd = count(EdgeKind::Bordered) + count(EdgeKind::Sutured);
            let name = &vertex_names[v];
            match kind {
                VertexKind::Intersection => {
                    let (ca, cb) = (curves_of(EdgeKind::Alpha), curves_of(EdgeKind::Beta));
                    if na != 2 || nb != 2 || nbd != 0 || ca.len() != 1 || cb.len() != 1 {
                        return Err(vertex_err(
                            name,
                            "an intersection point needs two α ends and two β ends, one curve each",
                        ));
                    }
                    cross.insert(v, (*ca.first().unwrap(), *cb.first().unwrap()));
                }
                VertexKind::AlphaEnd => {
                    if na != 1 || nb != 0 || nbd != 2 {
                        return Err(vertex_err(
                            name,
                            "an α endpoint needs one α end and two boundary ends",
                        ));
                    }
                }
                VertexKind::Corner => {
                    if na + nb != 0 || nbd != 2 {
                        return Err(vertex_err(
                            name,
                            "a boundary corner needs two boundary ends",
                        ));
                    }
                }
            }
        }

        // curve shapes
        for (c, curve) in curves.iter_mut().enumerate() {
            let mine: Vec<usize> = (0..edges.len())
                .filter(|&e| edges[e].curve == Some(c))
                .collect();
            let verts: BTreeSet<usize> = mine
                .iter()
                .flat_map(|&e| [edges[e].from, edges[e].to])
                .collect();
            let endpoints: Vec<usize> = verts
                .iter()
                .copied()
                .filter(|&v| kinds[v] == VertexKind::AlphaEnd)
                .collect();
            let mut uf = UnionFind::new(kinds.len());
            for &e in &mine {
                uf.union(edges[e].from, edges[e].to);
            }
            let roots: BTreeSet<usize> = verts.iter().map(|&v| uf.find(v)).collect();
            if roots.len() != 1 {
                return Err(curve_err(&curve.name, "not connected"));
            }
            match (curve.beta, endpoints.len()) {
                (_, 0) => {}
                (false, 2) => {
                    let sides: Vec<Option<Side>> =
                        endpoints.iter().map(|&v| file.vertices[v].side).collect();
                    let (Some(s0), Some(s1)) = (sides[0], sides[1]) else {
                        return Err(curve_err(
                            &curve.name,
                            "α-arc endpoints must name their side",
                        ));
                    };
                    if s0 != s1 {
                        return Err(curve_err(&curve.name, "α-arc ends on two different sides"));
                    }
                    curve.arc = Some((s0, usize::MAX));
                }
                (true, _) => return Err(curve_err(&curve.name, "β curves must be closed")),
                (false, n) => return Err(curve_err(&curve.name, format!("{n} endpoints"))),
            }
        }

        // bordered sides
        let mut sides = Vec::new();
        let mut end_pos = BTreeMap::new();
        for (side, decl) in [
            (Side::Left, &file.sides.left),
            (Side::Right, &file.sides.right),
        ] {
            let has_edges = edges
                .iter()
                .any(|e| e.kind == EdgeKind::Bordered && e.side == Some(side));
            let Some(decl) = decl else {
                if has_edges {
                    return Err(side_err(
                        side,
                        "bordered edges present but no side declared",
                    ));
                }
                continue;
            };
            // maximal chains of bordered edges following ∂Σ
            let bordered: Vec<usize> = (0..edges.len())
                .filter(|&e| edges[e].kind == EdgeKind::Bordered && edges[e].side == Some(side))
                .collect();
            let start_of = |e: usize| if bdir[e] { edges[e].from } else { edges[e].to };
            let end_of = |e: usize| if bdir[e] { edges[e].to } else { edges[e].from };
            let mut next: HashMap<usize, usize> = HashMap::new();
            let mut has_pred = HashSet::new();
            for &e in &bordered {
                for &f in &bordered {
                    if e != f && end_of(e) == start_of(f) {
                        next.insert(e, f);
                        has_pred.insert(f);
                    }
                }
            }
            let mut chains: Vec<Vec<u32>> = Vec::new();
            let mut seen = HashSet::new();
            for &e0 in &bordered {
                if has_pred.contains(&e0) {
                    continue;
                }
                let mut verts = vec![start_of(e0)];
                let mut e = e0;
                loop {
                    seen.insert(e);
                    verts.push(end_of(e));
                    match next.get(&e) {
                        Some(&f) => e = f,
                        None => break,
                    }
                }
                let mut pts = Vec::new();
                for &v in &verts {
                    if kinds[v] == VertexKind::AlphaEnd {
                        if file.vertices[v].side != Some(side) {
                            return Err(vertex_err(
                                &vertex_names[v],
                                "α endpoint on the wrong side",
                            ));
                        }
                        let id = file.vertices[v].point.ok_or_else(|| {
                            vertex_err(&vertex_names[v], "α endpoint needs a point id")
                        })?;
                        pts.push(id);
                    }
                }
                pts.reverse();
                chains.push(pts);
            }
            if seen.len() != bordered.len() {
                return Err(side_err(
                    side,
                    "bordered edges form a closed loop without sutures",
                ));
            }
            let mut declared = decl.intervals.clone();
            if decl.flavor == Flavor::Pmc {
                // the circle is cut at the sutured basepoint
                if declared.len() != 1 {
                    return Err(side_err(side, "a pointed matched circle has one interval"));
                }
            }
            let mut a = chains.clone();
            a.sort();
            declared.sort();
            if a != declared {
                return Err(side_err(
                    side,
                    format!(
                        "declared intervals {:?} but the boundary gives {:?}",
                        decl.intervals, chains
                    ),
                ));
            }
            // matching from α-arc endpoints
            let mut matching = Vec::new();
            for (c, curve) in curves.iter().enumerate() {
                if !matches!(curve.arc, Some((s, _)) if s == side) {
                    continue;
                }
                let mut ids: Vec<u32> = (0..edges.len())
                    .filter(|&e| edges[e].curve == Some(c))
                    .flat_map(|e| [edges[e].from, edges[e].to])
                    .filter(|&v| kinds[v] == VertexKind::AlphaEnd)
                    .map(|v| file.vertices[v].point.unwrap_or(0))
                    .collect();
                ids.sort();
                matching.push([ids[0], ids[1]]);
            }
            matching.sort();
            if let Some(m) = &decl.matching {
                let mut norm: Vec<[u32; 2]> =
                    m.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
                norm.sort();
                if norm != matching {
                    return Err(side_err(
                        side,
                        format!("declared matching {m:?} but α-arcs give {matching:?}"),
                    ));
                }
                matching = m.clone();
            }
            let n: usize = decl.intervals.iter().map(|i| i.len()).sum();
            let diagram = ArcDiagram::new(ArcDiagramFile {
                flavor: decl.flavor,
                intervals: decl.intervals.clone(),
                matching,
                basepoint_after: (decl.flavor == Flavor::Pmc).then(|| n.saturating_sub(1)),
            })
            .map_err(|e| side_err(side, e.to_string()))?;
            for (v, vf) in file.vertices.iter().enumerate() {
                if kinds[v] == VertexKind::AlphaEnd && vf.side == Some(side) {
                    let p = vf
                        .point
                        .and_then(|id| diagram.position_of(id))
                        .ok_or_else(|| {
                            vertex_err(&vf.id, "α endpoint is not on the declared boundary")
                        })?;
                    end_pos.insert(v, p);
                }
            }
            for (c, curve) in curves.iter_mut().enumerate() {
                if let Some((s, pair)) = curve.arc.as_mut() {
                    if *s == side {
                        let v = (0..edges.len())
                            .filter(|&e| edges[e].curve == Some(c))
                            .flat_map(|e| [edges[e].from, edges[e].to])
                            .find(|v| end_pos.contains_key(v))
                            .expect("arc has endpoints");
                        *pair = diagram.pair_of(end_pos[&v]);
                    }
                }
            }
            let algebra = StrandAlgebra::shared(&diagram);
            sides.push(BorderSide {
                side,
                diagram,
                algebra,
            });
        }
        if let Some(v) = (0..kinds.len())
            .find(|&v| kinds[v] == VertexKind::AlphaEnd && !end_pos.contains_key(&v))
        {
            return Err(vertex_err(
                &vertex_names[v],
                "α endpoint on an undeclared side",
            ));
        }

        let z_region: Vec<bool> = regions
            .iter()
            .map(|w| w.iter().any(|&(e, _)| edges[e].kind == EdgeKind::Sutured))
            .collect();

        let diagram = NiceDiagram {
            file,
            vertex_names,
            kinds,
            edges,
            curves,
            regions,
            z_region,
            cross,
            end_pos,
            sides,
        };
        diagram.check_euler()?;
        diagram.check_sutures()?;
        diagram.check_niceness()?;
        Ok(diagram)
    }

    fn region_name(&self, r: usize) -> &str {
        &self.file.regions[r].id
    }

    /// Vertex at the corner between word[i] and word[i+1].
    fn corner_vertex(&self, word: &[(usize, bool)], i: usize) -> usize {
        let (e, f) = word[i];
        if f {
            self.edges[e].to
        } else {
            self.edges[e].from
        }
    }

    /// Corners of a region: (vertex, incoming edge kind, outgoing edge kind).
    fn corners(&self, r: usize) -> Vec<(usize, EdgeKind, EdgeKind)> {
        let w = &self.regions[r];
        (0..w.len())
            .filter_map(|i| {
                let (a, b) = (
                    self.edges[w[i].0].kind,
                    self.edges[w[(i + 1) % w.len()].0].kind,
                );
                if a.is_boundary() && b.is_boundary() {
                    None
                } else if a == b {
                    // an α or β curve passing straight through an intersection
                    None
                } else {
                    Some((self.corner_vertex(w, i), a, b))
                }
            })
            .collect()
    }

    /// Euler measure of a region, scaled by 4.
    fn euler4(&self, r: usize) -> i64 {
        4 - self.corners(r).len() as i64
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.kinds.len() as i64 - self.edges.len() as i64 + self.regions.len() as i64
    }

    fn check_euler(&self) -> Result<(), HeegaardError> {
        let total: i64 = (0..self.regions.len()).map(|r| self.euler4(r)).sum();
        let chi = self.euler_characteristic();
        if total != 4 * chi {
            return Err(HeegaardError::Euler {
                expected: chi.to_string(),
                found: format!("{}/4", total),
            });
        }
        Ok(())
    }

    fn check_sutures(&self) -> Result<(), HeegaardError> {
        // every boundary component carries a sutured edge
        let n = self.kinds.len();
        let mut uf = UnionFind::new(n);
        let bd: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].kind.is_boundary())
            .collect();
        for &e in &bd {
            uf.union(self.edges[e].from, self.edges[e].to);
        }
        let mut comps: BTreeMap<usize, bool> = BTreeMap::new();
        for &e in &bd {
            let r = uf.find(self.edges[e].from);
            *comps.entry(r).or_default() |= self.edges[e].kind == EdgeKind::Sutured;
        }
        if let Some((&root, _)) = comps.iter().find(|(_, &s)| !s) {
            return Err(HeegaardError::SutureMissing(format!(
                "the boundary component through {}",
                self.vertex_names[root]
            )));
        }
        // every component of Σ∖α and of Σ∖β meets the sutures
        for (cut, across) in [("α", EdgeKind::Beta), ("β", EdgeKind::Alpha)] {
            let mut uf = UnionFind::new(self.regions.len());
            let mut owner: HashMap<usize, usize> = HashMap::new();
            for (r, w) in self.regions.iter().enumerate() {
                for &(e, _) in w {
                    if self.edges[e].kind == across {
                        if let Some(&o) = owner.get(&e) {
                            uf.union(o, r);
                        } else {
                            owner.insert(e, r);
                        }
                    }
                }
            }
            let mut hit: BTreeMap<usize, bool> = BTreeMap::new();
            for r in 0..self.regions.len() {
                *hit.entry(uf.find(r)).or_default() |= self.z_region[r];
            }
            if let Some((&r, _)) = hit.iter().find(|(_, &h)| !h) {
                return Err(HeegaardError::SutureMissing(format!(
                    "the component of Σ∖{cut} containing region {}",
                    self.region_name(r)
                )));
            }
        }
        Ok(())
    }

    fn check_niceness(&self) -> Result<(), HeegaardError> {
        for r in 0..self.regions.len() {
            if self.z_region[r] {
                continue;
            }
            let corners = self
                .corners(r)
                .iter()
                .filter(|(v, _, _)| self.kinds[*v] == VertexKind::Intersection)
                .count();
            if corners != 2 && corners != 4 {
                return Err(HeegaardError::NotNice {
                    region: self.region_name(r).to_string(),
                    corners,
                });
            }
        }
        Ok(())
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    /// All generators, ordered by their point lists.
    pub fn generators(&self) -> Vec<HeegaardGenerator> {
        let betas: Vec<usize> = (0..self.curves.len())
            .filter(|&c| self.curves[c].beta)
            .collect();
        let alpha_circles: BTreeSet<usize> = (0..self.curves.len())
            .filter(|&c| !self.curves[c].beta && self.curves[c].arc.is_none())
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        let mut used = BTreeSet::new();
        self.gen_rec(&betas, 0, &mut chosen, &mut used, &alpha_circles, &mut out);
        out.sort_by(|a, b| a.points.cmp(&b.points));
        out
    }

    fn gen_rec(
        &self,
        betas: &[usize],
        i: usize,
        chosen: &mut Vec<usize>,
        used: &mut BTreeSet<usize>,
        circles: &BTreeSet<usize>,
        out: &mut Vec<HeegaardGenerator>,
    ) {
        if i == betas.len() {
            if circles.iter().all(|c| used.contains(c)) {
                out.push(self.make_generator(chosen));
            }
            return;
        }
        for (&v, &(a, b)) in &self.cross {
            if b != betas[i] || used.contains(&a) {
                continue;
            }
            used.insert(a);
            chosen.push(v);
            self.gen_rec(betas, i + 1, chosen, used, circles, out);
            chosen.pop();
            used.remove(&a);
        }
    }

    fn make_generator(&self, points: &[usize]) -> HeegaardGenerator {
        let mut points = points.to_vec();
        points.sort();
        let masks = self
            .sides
            .iter()
            .map(|s| {
                let occupied = points
                    .iter()
                    .filter_map(|p| self.curves[self.cross[p].0].arc)
                    .filter(|&(side, _)| side == s.side)
                    .fold(0u64, |m, (_, k)| m | 1 << k);
                complement_mask(&s.diagram, occupied)
            })
            .collect();
        let mut names: Vec<&str> = points
            .iter()
            .map(|&p| self.vertex_names[p].as_str())
            .collect();
        names.sort();
        HeegaardGenerator {
            name: names.join(","),
            points,
            masks,
        }
    }

    /// The algebra the curve count lives over: A(𝒵) for one bordered side,
    /// A(𝒵_L) ⊗ A(𝒵_R) for two.
    pub fn algebra(&self) -> Result<AlgRef, HeegaardError> {
        match self.sides.as_slice() {
            [] => Err(HeegaardError::NoBorder),
            [s] => Ok(s.algebra.clone()),
            [l, r] => Ok(Arc::new(TensorAlgebra::new(
                l.algebra.clone(),
                r.algebra.clone(),
            ))),
            _ => unreachable!("at most two sides"),
        }
    }

    /// Connected sets of non-z regions, as bitmasks.
    fn domains(&self) -> Vec<Vec<usize>> {
        let cand: Vec<usize> = (0..self.regions.len())
            .filter(|&r| !self.z_region[r])
            .collect();
        let mut nbr = vec![0u128; cand.len()];
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (i, &r) in cand.iter().enumerate() {
            for &(e, _) in &self.regions[r] {
                if self.edges[e].kind.is_boundary() {
                    continue;
                }
                if let Some(&j) = owner.get(&e) {
                    if j != i {
                        nbr[i] |= 1 << j;
                        nbr[j] |= 1 << i;
                    }
                } else {
                    owner.insert(e, i);
                }
            }
        }
        let mut seen: HashSet<u128> = HashSet::new();
        let mut frontier: Vec<u128> = (0..cand.len()).map(|i| 1u128 << i).collect();
        seen.extend(frontier.iter().copied());
        while let Some(s) = frontier.pop() {
            let mut adj = 0u128;
            for i in 0..cand.len() {
                if s >> i & 1 == 1 {
                    adj |= nbr[i];
                }
            }
            adj &= !s;
            for j in 0..cand.len() {
                if adj >> j & 1 == 1 {
                    let t = s | 1 << j;
                    if seen.insert(t) {
                        frontier.push(t);
                    }
                }
            }
        }
        let mut out: Vec<Vec<usize>> = seen
            .into_iter()
            .map(|s| {
                (0..cand.len())
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| cand[i])
                    .collect()
            })
            .collect();
        out.sort();
        out
    }

    /// Corner data of a domain whose boundary is a single embedded loop.
    fn analyse(&self, dom: &[usize]) -> Result<Option<DomainShape>, HeegaardError> {
        let label = dom
            .iter()
            .map(|&r| self.region_name(r))
            .collect::<Vec<_>>()
            .join("+");
        let mut net: BTreeMap<usize, i32> = BTreeMap::new();
        let mut sectors: BTreeMap<usize, i64> = BTreeMap::new();
        let mut e4 = 0;
        for &r in dom {
            for &(e, f) in &self.regions[r] {
                *net.entry(e).or_default() += if f { 1 } else { -1 };
            }
            for (v, _, _) in self.corners(r) {
                *sectors.entry(v).or_default() += 1;
            }
            e4 += self.euler4(r);
        }
        let bd: Vec<(usize, bool)> = net
            .iter()
            .filter(|(_, &c)| c != 0)
            .map(|(&e, &c)| (e, c > 0))
            .collect();
        if bd.iter().any(|&(e, _)| net[&e].abs() != 1) || bd.is_empty() {
            return Ok(None);
        }
        let start = |&(e, f): &(usize, bool)| {
            if f {
                self.edges[e].from
            } else {
                self.edges[e].to
            }
        };
        let end = |&(e, f): &(usize, bool)| {
            if f {
                self.edges[e].to
            } else {
                self.edges[e].from
            }
        };
        let mut out_of: HashMap<usize, usize> = HashMap::new();
        for (i, s) in bd.iter().enumerate() {
            if out_of.insert(start(s), i).is_some() {
                return Ok(None);
            }
        }
        // split the boundary into loops
        let mut loops: Vec<Vec<usize>> = Vec::new();
        let mut used = vec![false; bd.len()];
        for s0 in 0..bd.len() {
            if used[s0] {
                continue;
            }
            let mut lp = vec![s0];
            used[s0] = true;
            loop {
                let last = lp[lp.len() - 1];
                let Some(&nx) = out_of.get(&end(&bd[last])) else {
                    return Ok(None);
                };
                if nx == s0 {
                    break;
                }
                if used[nx] {
                    return Ok(None);
                }
                used[nx] = true;
                lp.push(nx);
            }
            loops.push(lp);
        }
        // Besides one main loop, a domain may have loops made of a whole
        // α-arc closed up by a single border run.
        let is_border_loop = |lp: &Vec<usize>| {
            let kinds: Vec<EdgeKind> = lp.iter().map(|&i| self.edges[bd[i].0].kind).collect();
            kinds
                .iter()
                .all(|k| matches!(k, EdgeKind::Alpha | EdgeKind::Bordered))
                && (0..kinds.len())
                    .filter(|&i| {
                        kinds[i] == EdgeKind::Alpha
                            && kinds[(i + 1) % kinds.len()] == EdgeKind::Bordered
                    })
                    .count()
                    == 1
        };
        let main: Vec<Vec<usize>> = loops
            .iter()
            .filter(|lp| !is_border_loop(lp))
            .cloned()
            .collect();
        if main.len() != 1 {
            return Ok(None);
        }
        let extra: Vec<Vec<usize>> = loops
            .iter()
            .filter(|lp| is_border_loop(lp))
            .cloned()
            .collect();
        if extra.len() > 1 {
            return Ok(None);
        }
        let cycle = main.into_iter().next().expect("one main loop");
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut runs: BTreeMap<Side, Vec<(usize, usize)>> = BTreeMap::new();
        let mut run_start: Option<usize> = None;
        // rotate so that the walk begins right after a non-bordered edge
        let k = cycle.len();
        let first = (0..k)
            .find(|&i| self.edges[bd[cycle[i]].0].kind != EdgeKind::Bordered)
            .ok_or_else(|| HeegaardError::Inconsistent {
                domain: label.clone(),
                detail: "boundary lies entirely on the border".into(),
            })?;
        for step in 0..k {
            let cur = bd[cycle[(first + step) % k]];
            let nxt = bd[cycle[(first + step + 1) % k]];
            let v = end(&cur);
            let (a, b) = (self.edges[cur.0].kind, self.edges[nxt.0].kind);
            match (a, b) {
                (EdgeKind::Alpha, EdgeKind::Beta) => ys.push(v),
                (EdgeKind::Beta, EdgeKind::Alpha) => xs.push(v),
                (EdgeKind::Alpha, EdgeKind::Bordered) => run_start = Some(v),
                (EdgeKind::Bordered, EdgeKind::Alpha) => {
                    let side = self.edges[cur.0].side.expect("bordered edges have sides");
                    let p_start = run_start
                        .take()
                        .ok_or_else(|| HeegaardError::Inconsistent {
                            domain: label.clone(),
                            detail: "border run without an α start".into(),
                        })?;
                    runs.entry(side)
                        .or_default()
                        .push((self.end_pos[&v], self.end_pos[&p_start]));
                }
                (x, y) if x == y => {}
                _ => return Ok(None),
            }
        }
        // a border loop is only counted around a bigon
        if !extra.is_empty() && xs.len() + ys.len() != 2 {
            return Ok(None);
        }
        for lp in &extra {
            let k = lp.len();
            let first = (0..k)
                .find(|&i| self.edges[bd[lp[i]].0].kind == EdgeKind::Alpha)
                .expect("border loops contain an α edge");
            for step in 0..k {
                let cur = bd[lp[(first + step) % k]];
                let nxt = bd[lp[(first + step + 1) % k]];
                let v = end(&cur);
                match (self.edges[cur.0].kind, self.edges[nxt.0].kind) {
                    (EdgeKind::Alpha, EdgeKind::Bordered) => run_start = Some(v),
                    (EdgeKind::Bordered, EdgeKind::Alpha) => {
                        let side = self.edges[cur.0].side.expect("bordered edges have sides");
                        let p_start = run_start.take().expect("run opened on this loop");
                        runs.entry(side)
                            .or_default()
                            .push((self.end_pos[&v], self.end_pos[&p_start]));
                    }
                    _ => {}
                }
            }
        }
        Ok(Some(DomainShape {
            label,
            xs,
            ys,
            runs,
            e4,
            sectors,
        }))
    }

    /// Evaluate the curve count: δ¹ sums empty embedded bigons, rectangles
    /// and single-chord half-strips. The structure equation is checked.
    pub fn bsd(&self) -> Result<TypeD<F2>, HeegaardError> {
        let alg = self.algebra()?;
        let gens = self.generators();
        let mut m = TypeD::new(alg.clone());
        let mut by_points: HashMap<Vec<usize>, usize> = HashMap::new();
        for g in &gens {
            let idem = self.element_for(&g.masks, &BTreeMap::new(), &g.masks, "")?;
            by_points.insert(g.points.clone(), m.add_generator(g.name.clone(), idem));
        }
        for dom in self.domains() {
            let Some(shape) = self.analyse(&dom)? else {
                continue;
            };
            let xc: BTreeSet<usize> = shape.xs.iter().copied().collect();
            let yc: BTreeSet<usize> = shape.ys.iter().copied().collect();
            if xc.len() != shape.xs.len() || yc.len() != shape.ys.len() || !xc.is_disjoint(&yc) {
                continue;
            }
            let chord_count: usize = shape.runs.values().map(|r| r.len()).sum();
            for g in &gens {
                let pts: BTreeSet<usize> = g.points.iter().copied().collect();
                if !xc.is_subset(&pts) || !pts.is_disjoint(&yc) {
                    continue;
                }
                let mut ypts: Vec<usize> = pts.difference(&xc).chain(yc.iter()).copied().collect();
                ypts.sort();
                let Some(&yi) = by_points.get(&ypts) else {
                    continue;
                };
                let sec = |p: &usize| shape.sectors.get(p).copied().unwrap_or(0);
                let index = shape.e4
                    + g.points.iter().map(sec).sum::<i64>()
                    + ypts.iter().map(sec).sum::<i64>()
                    + 2 * chord_count as i64;
                if index != 4 {
                    continue;
                }
                if let Some((side, r)) = shape.runs.iter().find(|(_, r)| r.len() > 1) {
                    return Err(HeegaardError::MultiChord {
                        domain: shape.label.clone(),
                        side: side.name().to_string(),
                        runs: r.len(),
                    });
                }
                let xi = by_points[&g.points];
                let y = &gens
                    .iter()
                    .find(|h| h.points == ypts)
                    .expect("indexed")
                    .masks;
                // chords that do not fit the idempotents contribute nothing
                if let Ok(a) = self.element_for(&g.masks, &shape.runs, y, &shape.label) {
                    m.toggle_arrow(xi, a, yi);
                }
            }
        }
        let diag = m.check();
        if !diag.ok() {
            return Err(HeegaardError::Structure(diag.to_string()));
        }
        Ok(m)
    }

    /// Algebra element with left masks `xm`, the given chords, and right
    /// masks `ym`.
    fn element_for(
        &self,
        xm: &[u64],
        runs: &BTreeMap<Side, Vec<(usize, usize)>>,
        ym: &[u64],
        label: &str,
    ) -> Result<usize, HeegaardError> {
        let bad = |detail: String| HeegaardError::Inconsistent {
            domain: label.to_string(),
            detail,
        };
        let mut parts = Vec::new();
        for (i, s) in self.sides.iter().enumerate() {
            let alg = &s.algebra;
            let el = match runs.get(&s.side).and_then(|r| r.first()) {
                Some(&(start, end)) => {
                    let z = &s.diagram;
                    if start >= end || z.interval_of(start) != z.interval_of(end) {
                        return Err(bad(format!("border run {start}→{end} is not a chord")));
                    }
                    let c = Chord {
                        interval: z.interval_of(start),
                        start,
                        end,
                    };
                    alg.chord_with_left(&c, xm[i]).ok_or_else(|| {
                        bad(format!(
                            "chord {start}→{end} does not start in the generator's idempotent"
                        ))
                    })?
                }
                None => alg.idempotent(xm[i]),
            };
            if alg.right_mask(el) != ym[i] {
                return Err(bad(format!(
                    "{} side ends in the wrong idempotent",
                    s.side.name()
                )));
            }
            parts.push(el);
        }
        Ok(match parts.as_slice() {
            [a] => *a,
            [a, b] => a * self.sides[1].algebra.dim() + b,
            _ => unreachable!("at least one side"),
        })
    }
}

struct DomainShape {
    label: String,
    xs: Vec<usize>,
    ys: Vec<usize>,
    runs: BTreeMap<Side, Vec<(usize, usize)>>,
    e4: i64,
    sectors: BTreeMap<usize, i64>,
}

/// Load a diagram and evaluate it in one step.
pub fn bsd_from_nice_diagram(file: &HeegaardFile) -> Result<TypeD<F2>, HeegaardError> {
    validate(file)?.bsd()
}

/// The mirror diagram, validated.
pub fn mirror(d: &NiceDiagram) -> Result<NiceDiagram, HeegaardError> {
    NiceDiagram::new(d.file.mirror())
}

/// Shipped template diagrams.
pub mod templates {
    pub const ZB_IDENTITY: &str = include_str!("../data/zb_identity.json");
    pub const GENUS1_IDENTITY: &str = include_str!("../data/genus1_identity.json");
    pub const SOLID_TORUS_INF: &str = include_str!("../data/solid_torus_inf.json");
    pub const SOLID_TORUS_ZERO: &str = include_str!("../data/solid_torus_zero.json");
    pub const GENUS1_ARCSLIDE: &str = include_str!("../data/genus1_arcslide.json");
    pub const CUT1_IDENTITY: &str = include_str!("../data/cut1_identity.json");
    pub const GENUS1_ARCSLIDE43: &str = include_str!("../data/genus1_arcslide43.json");
    pub const GENUS1_ARCSLIDE32: &str = include_str!("../data/genus1_arcslide32.json");
}
