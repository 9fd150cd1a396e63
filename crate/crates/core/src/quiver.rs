//! Finite quivers and their reachability structure.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::path::{EvInfPath, FinitePath};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArrowId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arrow `{0}`")]
    DuplicateArrow(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("paths `{left}` and `{right}` are not composable")]
    NotComposable { left: String, right: String },
    #[error("vertex `{0}` is not a sink")]
    NotASink(String),
    #[error("`{0}` is not an oriented cycle")]
    NotACycle(String),
    #[error("vertex `{0}` is not a line point")]
    NotALinePoint(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: VertexId,
    pub target: VertexId,
}

/// A finite quiver. Vertex and arrow ids follow the lexicographic order of
/// their names, so comparing ids compares identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    name: String,
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    outgoing: Vec<Vec<ArrowId>>,
    incoming: Vec<Vec<ArrowId>>,
}

impl Quiver {
    pub fn new<V, A, S>(name: &str, vertices: V, arrows: A) -> Result<Self, QuiverError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        A: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(QuiverError::DuplicateVertex(w[0].clone()));
        }
        let lookup = |v: &str| {
            names
                .binary_search_by(|n| n.as_str().cmp(v))
                .map(|i| VertexId(i as u32))
                .map_err(|_| QuiverError::UnknownVertex(v.to_string()))
        };
        let mut list = Vec::new();
        for (a, s, t) in arrows_iter(arrows) {
            list.push(Arrow {
                source: lookup(&s)?,
                target: lookup(&t)?,
                name: a,
            });
        }
        let mut arrows = list;
        arrows.sort_by(|x, y| x.name.cmp(&y.name));
        if let Some(w) = arrows.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(QuiverError::DuplicateArrow(w[0].name.clone()));
        }
        let mut outgoing = vec![Vec::new(); names.len()];
        let mut incoming = vec![Vec::new(); names.len()];
        for (i, a) in arrows.iter().enumerate() {
            outgoing[a.source.index()].push(ArrowId(i as u32));
            incoming[a.target.index()].push(ArrowId(i as u32));
        }
        Ok(Quiver {
            name: name.to_string(),
            vertices: names,
            arrows,
            outgoing,
            incoming,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len() as u32).map(ArrowId)
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, QuiverError> {
        self.vertices
            .binary_search_by(|n| n.as_str().cmp(name))
            .map(|i| VertexId(i as u32))
            .map_err(|_| QuiverError::UnknownVertex(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<ArrowId, QuiverError> {
        self.arrows
            .binary_search_by(|a| a.name.as_str().cmp(name))
            .map(|i| ArrowId(i as u32))
            .map_err(|_| QuiverError::UnknownArrow(name.to_string()))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.index()]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.index()].name
    }

    pub fn arrow_data(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.index()]
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.index()].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.index()].target
    }

    /// Arrows starting at `v`, in identifier order.
    pub fn outgoing(&self, v: VertexId) -> &[ArrowId] {
        &self.outgoing[v.index()]
    }

    /// Arrows terminating at `v`, in identifier order.
    pub fn incoming(&self, v: VertexId) -> &[ArrowId] {
        &self.incoming[v.index()]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.outgoing[v.index()].is_empty()
    }

    /// On a finite quiver every non-sink is regular.
    pub fn is_regular(&self, v: VertexId) -> bool {
        !self.is_sink(v)
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_sink(v)).collect()
    }

    pub fn regular_vertices(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_regular(v)).collect()
    }

    /// Vertices reachable from `v` by a (possibly trivial) path.
    pub fn reachable_from(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &a in self.outgoing(u) {
                let w = self.target(a);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Shortest path from `from` to `to`; ties broken by arrow identifier.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Option<FinitePath> {
        let mut parent: Vec<Option<ArrowId>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[from.index()] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &a in self.outgoing(u) {
                let w = self.target(a);
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    parent[w.index()] = Some(a);
                    queue.push_back(w);
                }
            }
        }
        if !seen[to.index()] {
            return None;
        }
        let mut arrows = Vec::new();
        let mut cur = to;
        while cur != from {
            let a = parent[cur.index()].expect("bfs parent");
            arrows.push(a);
            cur = self.source(a);
        }
        arrows.reverse();
        Some(FinitePath::from_arrows_unchecked(self, from, arrows))
    }

    /// Shortest oriented cycle through `v`, if any. It is simple, hence primitive.
    pub fn cycle_through(&self, v: VertexId) -> Option<FinitePath> {
        self.outgoing(v)
            .iter()
            .filter_map(|&a| {
                let back = self.shortest_path(self.target(a), v)?;
                Some(
                    FinitePath::arrow(self, a)
                        .then(self, &back)
                        .expect("composable"),
                )
            })
            .min()
    }

    pub fn on_cycle(&self, v: VertexId) -> bool {
        self.outgoing(v)
            .iter()
            .any(|&a| self.reachable_from(self.target(a)).contains(&v))
    }

    pub fn has_cycle(&self) -> bool {
        self.vertex_ids().any(|v| self.on_cycle(v))
    }

    pub fn reaches_sink(&self, v: VertexId) -> bool {
        self.reachable_from(v).iter().any(|&w| self.is_sink(w))
    }

    /// Shortest path from `v` to some sink.
    pub fn path_to_sink(&self, v: VertexId) -> Option<FinitePath> {
        self.reachable_from(v)
            .into_iter()
            .filter(|&w| self.is_sink(w))
            .filter_map(|w| self.shortest_path(v, w))
            .min()
    }

    /// A non-cyclic eventually periodic left-infinite path starting at `v`.
    ///
    /// Such a path exists iff there are distinct arrows `beta`, `gamma` into a
    /// common vertex `w` with `s(beta)` reachable from `v` and `s(gamma)`
    /// reachable from `w`; the witness is the canonical path with prefix ending
    /// in `beta` and cycle ending in `gamma`.
    pub fn noncyclic_tail(&self, v: VertexId) -> Option<EvInfPath> {
        let from_v = self.reachable_from(v);
        for w in self.vertex_ids() {
            let from_w = self.reachable_from(w);
            for &beta in self.incoming(w) {
                if !from_v.contains(&self.source(beta)) {
                    continue;
                }
                for &gamma in self.incoming(w) {
                    if gamma == beta || !from_w.contains(&self.source(gamma)) {
                        continue;
                    }
                    let prefix = self
                        .shortest_path(v, self.source(beta))
                        .expect("reachable")
                        .then(self, &FinitePath::arrow(self, beta))
                        .expect("composable");
                    let cycle = self
                        .shortest_path(w, self.source(gamma))
                        .expect("reachable")
                        .then(self, &FinitePath::arrow(self, gamma))
                        .expect("composable");
                    let p = EvInfPath::new(self, prefix, cycle).expect("valid witness");
                    debug_assert!(!p.is_cyclic());
                    return Some(p);
                }
            }
        }
        None
    }

    pub fn has_noncyclic_tail(&self, v: VertexId) -> bool {
        self.noncyclic_tail(v).is_some()
    }

    /// A vertex is linear when it emits at most one arrow and lies on no cycle.
    pub fn is_linear(&self, v: VertexId) -> bool {
        self.outgoing(v).len() <= 1 && !self.on_cycle(v)
    }

    /// For every vertex: `Some(end)` when it is a (necessarily finite) line
    /// point with end sink `end`, `None` otherwise.
    pub fn line_points(&self) -> Vec<(VertexId, Option<VertexId>)> {
        self.vertex_ids()
            .map(|v| {
                let reach = self.reachable_from(v);
                if !reach.iter().all(|&w| self.is_linear(w)) {
                    return (v, None);
                }
                // Linear vertices off cycles form a chain, which on a finite
                // quiver terminates at a sink.
                let mut cur = v;
                while let Some(&a) = self.outgoing(cur).first() {
                    cur = self.target(a);
                }
                assert!(self.is_sink(cur), "line point chain must end at a sink");
                (v, Some(cur))
            })
            .collect()
    }

    pub fn line_point_end(&self, v: VertexId) -> Option<VertexId> {
        self.line_points()[v.index()].1
    }
}

fn arrows_iter<A, S>(arrows: A) -> impl Iterator<Item = (String, String, String)>
where
    A: IntoIterator<Item = (S, S, S)>,
    S: Into<String>,
{
    arrows
        .into_iter()
        .map(|(a, s, t)| (a.into(), s.into(), t.into()))
}

impl fmt::Display for Quiver {
    /// Quiver DSL form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quiver {} {{ vertex", self.name)?;
        for v in &self.vertices {
            write!(f, " {v}")?;
        }
        write!(f, ";")?;
        for a in &self.arrows {
            write!(
                f,
                " arrow {}: {} -> {};",
                a.name,
                self.vertex_name(a.source),
                self.vertex_name(a.target)
            )?;
        }
        write!(f, " }}")
    }
}

/// The small quivers used throughout the test suites.
pub mod standard {
    use super::Quiver;

    /// One vertex `v` with `n` loops named `a`, `b`, ... (`x` when `n == 1`).
    pub fn rose(n: usize) -> Quiver {
        let loops: Vec<String> = if n == 1 {
            vec!["x".to_string()]
        } else {
            (0..n)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect()
        };
        Quiver::new(
            &format!("R{n}"),
            ["v"],
            loops
                .into_iter()
                .map(|l| (l, "v".to_string(), "v".to_string())),
        )
        .expect("valid rose")
    }

    /// Linear quiver 1 -> 2 -> ... -> n with arrows a, b, ...
    pub fn line(n: usize) -> Quiver {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (1..n).map(|i| {
            (
                ((b'a' + (i - 1) as u8) as char).to_string(),
                i.to_string(),
                (i + 1).to_string(),
            )
        });
        Quiver::new(&format!("A{n}"), vertices, arrows).expect("valid line")
    }

    /// Toeplitz quiver: loop `x` at 1 and exit `f: 1 -> 2` into the sink 2.
    pub fn toeplitz() -> Quiver {
        Quiver::new("T", ["1", "2"], [("x", "1", "1"), ("f", "1", "2")]).expect("valid")
    }

    pub fn all() -> Vec<Quiver> {
        vec![rose(1), rose(2), line(2), line(3), toeplitz()]
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;

    #[test]
    fn duplicate_identifiers() {
        let e = Quiver::new("Q", ["1", "1"], Vec::<(&str, &str, &str)>::new());
        assert_eq!(e, Err(QuiverError::DuplicateVertex("1".into())));
        let e = Quiver::new("Q", ["1"], [("a", "1", "1"), ("a", "1", "1")]);
        assert_eq!(e, Err(QuiverError::DuplicateArrow("a".into())));
        let e = Quiver::new("Q", ["1"], [("a", "1", "2")]);
        assert_eq!(e, Err(QuiverError::UnknownVertex("2".into())));
    }

    #[test]
    fn classification() {
        let t = toeplitz();
        let one = t.vertex("1").unwrap();
        let two = t.vertex("2").unwrap();
        assert_eq!(t.sinks(), vec![two]);
        assert_eq!(t.regular_vertices(), vec![one]);
        assert!(t.has_cycle());
        assert!(t.reaches_sink(one));
        assert!(!t.has_noncyclic_tail(one));
        assert!(!line(3).has_cycle());

        let r1 = rose(1);
        assert!(!r1.has_noncyclic_tail(VertexId(0)));
        let r2 = rose(2);
        let w = r2.noncyclic_tail(VertexId(0)).unwrap();
        assert!(!w.is_cyclic());
        assert_eq!(w.display(&r2).to_string(), "(b)^inf.a");
    }

    #[test]
    fn line_points() {
        let a3 = line(3);
        let three = a3.vertex("3").unwrap();
        for (_, end) in a3.line_points() {
            assert_eq!(end, Some(three));
        }
        assert!(rose(1).line_points().iter().all(|(_, e)| e.is_none()));
        let t = toeplitz();
        let lp = t.line_points();
        assert_eq!(lp[t.vertex("1").unwrap().index()].1, None);
        assert_eq!(
            lp[t.vertex("2").unwrap().index()].1,
            Some(t.vertex("2").unwrap())
        );
    }

    #[test]
    fn shortest_cycle_is_lexicographic() {
        let r2 = rose(2);
        let c = r2.cycle_through(VertexId(0)).unwrap();
        assert_eq!(c.display(&r2).to_string(), "a");
    }
}
