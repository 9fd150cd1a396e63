//! Finite paths, eventually periodic left-infinite paths and tail classes.
//!
//! Paths are stored in traversal order (first arrow first) and displayed
//! right to left, `b.a` meaning "a, then b".

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::quiver::{ArrowId, Quiver, QuiverError, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePath {
    source: VertexId,
    target: VertexId,
    arrows: Vec<ArrowId>,
}

/// Ordered by length, then arrows, then base vertex.
impl Ord for FinitePath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| self.arrows.cmp(&other.arrows))
            .then_with(|| self.source.cmp(&other.source))
    }
}

impl PartialOrd for FinitePath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[allow(clippy::len_without_is_empty)]
impl FinitePath {
    pub fn trivial(v: VertexId) -> Self {
        FinitePath {
            source: v,
            target: v,
            arrows: Vec::new(),
        }
    }

    pub fn arrow(q: &Quiver, a: ArrowId) -> Self {
        FinitePath {
            source: q.source(a),
            target: q.target(a),
            arrows: vec![a],
        }
    }

    /// Path through `arrows` (traversal order) starting at `source`.
    pub fn from_arrows(
        q: &Quiver,
        source: VertexId,
        arrows: Vec<ArrowId>,
    ) -> Result<Self, QuiverError> {
        let mut at = source;
        for &a in &arrows {
            if q.source(a) != at {
                return Err(QuiverError::NotComposable {
                    left: q.arrow_name(a).to_string(),
                    right: format!("e_{}", q.vertex_name(at)),
                });
            }
            at = q.target(a);
        }
        Ok(FinitePath {
            source,
            target: at,
            arrows,
        })
    }

    pub(crate) fn from_arrows_unchecked(
        q: &Quiver,
        source: VertexId,
        arrows: Vec<ArrowId>,
    ) -> Self {
        let target = arrows.last().map_or(source, |&a| q.target(a));
        FinitePath {
            source,
            target,
            arrows,
        }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    /// Arrows in traversal order.
    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }

    pub fn first_arrow(&self) -> Option<ArrowId> {
        self.arrows.first().copied()
    }

    pub fn last_arrow(&self) -> Option<ArrowId> {
        self.arrows.last().copied()
    }

    /// Traverse `self`, then `next`.
    pub fn then(&self, q: &Quiver, next: &FinitePath) -> Result<FinitePath, QuiverError> {
        if self.target != next.source {
            return Err(QuiverError::NotComposable {
                left: next.display(q).to_string(),
                right: self.display(q).to_string(),
            });
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&next.arrows);
        Ok(FinitePath {
            source: self.source,
            target: next.target,
            arrows,
        })
    }

    /// `then` for callers that have already checked endpoints.
    pub(crate) fn join(&self, next: &FinitePath) -> FinitePath {
        debug_assert_eq!(self.target, next.source);
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&next.arrows);
        FinitePath {
            source: self.source,
            target: next.target,
            arrows,
        }
    }

    /// The product `pq`: traverse `q`, then `p`. Requires `s(p) = t(q)`.
    pub fn compose(q_: &Quiver, p: &FinitePath, q: &FinitePath) -> Result<FinitePath, QuiverError> {
        q.then(q_, p)
    }

    /// If `self = rest . prefix`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &FinitePath) -> Option<FinitePath> {
        if prefix.source != self.source || !self.arrows.starts_with(&prefix.arrows) {
            return None;
        }
        Some(FinitePath {
            source: prefix.target,
            target: self.target,
            arrows: self.arrows[prefix.len()..].to_vec(),
        })
    }

    /// The first `n` traversed arrows.
    pub fn head(&self, q: &Quiver, n: usize) -> FinitePath {
        FinitePath::from_arrows_unchecked(q, self.source, self.arrows[..n].to_vec())
    }

    /// Drops the final traversed arrow.
    pub fn drop_last(&self, q: &Quiver) -> Option<FinitePath> {
        let last = self.last_arrow()?;
        Some(FinitePath {
            source: self.source,
            target: q.source(last),
            arrows: self.arrows[..self.len() - 1].to_vec(),
        })
    }

    pub fn is_cycle(&self) -> bool {
        !self.is_trivial() && self.source == self.target
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> PathDisplay<'a> {
        PathDisplay {
            path: self,
            quiver: q,
        }
    }
}

pub struct PathDisplay<'a> {
    path: &'a FinitePath,
    quiver: &'a Quiver,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_trivial() {
            return write!(f, "e_{}", self.quiver.vertex_name(self.path.source));
        }
        for (i, &a) in self.path.arrows.iter().rev().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", self.quiver.arrow_name(a))?;
        }
        Ok(())
    }
}

/// Smallest period `d` of `arrows` with `d | len`.
fn primitive_period(arrows: &[ArrowId]) -> usize {
    let n = arrows.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| arrows[i] == arrows[i - d]))
        .unwrap_or(n)
}

/// Left-infinite path `c^inf . w`: traverse the prefix `w`, then the cycle
/// `c` forever. Always held in canonical form: `c` primitive, and the prefix
/// is trivial or ends with an arrow different from the cycle's last arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvInfPath {
    prefix: FinitePath,
    cycle: FinitePath,
}

impl EvInfPath {
    /// Canonicalizes a raw `(prefix, cycle)` pair.
    pub fn new(q: &Quiver, prefix: FinitePath, cycle: FinitePath) -> Result<Self, QuiverError> {
        if !cycle.is_cycle() {
            return Err(QuiverError::NotACycle(cycle.display(q).to_string()));
        }
        if prefix.target != cycle.source {
            return Err(QuiverError::NotComposable {
                left: cycle.display(q).to_string(),
                right: prefix.display(q).to_string(),
            });
        }
        let period = primitive_period(&cycle.arrows);
        let mut cyc: Vec<ArrowId> = cycle.arrows[..period].to_vec();
        let mut pre = prefix.arrows;
        while let (Some(&p), Some(&c)) = (pre.last(), cyc.last()) {
            if p != c {
                break;
            }
            pre.pop();
            cyc.rotate_right(1);
        }
        let prefix = FinitePath::from_arrows_unchecked(q, prefix.source, pre);
        let cycle = FinitePath::from_arrows_unchecked(q, prefix.target, cyc);
        Ok(EvInfPath { prefix, cycle })
    }

    /// The cyclic path `c^inf`.
    pub fn cyclic(q: &Quiver, cycle: FinitePath) -> Result<Self, QuiverError> {
        let start = FinitePath::trivial(cycle.source);
        EvInfPath::new(q, start, cycle)
    }

    pub fn prefix(&self) -> &FinitePath {
        &self.prefix
    }

    pub fn cycle(&self) -> &FinitePath {
        &self.cycle
    }

    pub fn source(&self) -> VertexId {
        self.prefix.source
    }

    pub fn is_cyclic(&self) -> bool {
        self.prefix.is_trivial()
    }

    /// The `i`-th traversed arrow, 0-based.
    pub fn arrow_at(&self, i: usize) -> ArrowId {
        let w = self.prefix.len();
        if i < w {
            self.prefix.arrows[i]
        } else {
            self.cycle.arrows[(i - w) % self.cycle.len()]
        }
    }

    /// The first `n` traversed arrows.
    pub fn unroll(&self, n: usize) -> Vec<ArrowId> {
        (0..n).map(|i| self.arrow_at(i)).collect()
    }

    /// `tau_{<= n}`.
    pub fn truncate_le(&self, q: &Quiver, n: usize) -> FinitePath {
        FinitePath::from_arrows_unchecked(q, self.source(), self.unroll(n))
    }

    /// `tau_{> n}`, canonical.
    pub fn truncate_gt(&self, q: &Quiver, n: usize) -> EvInfPath {
        let w = self.prefix.len();
        if n <= w {
            // A suffix of a canonical prefix keeps its final arrow.
            let rest = self.prefix.arrows[n..].to_vec();
            let source = if n == 0 {
                self.prefix.source
            } else {
                q.target(self.prefix.arrows[n - 1])
            };
            return EvInfPath {
                prefix: FinitePath::from_arrows_unchecked(q, source, rest),
                cycle: self.cycle.clone(),
            };
        }
        let k = self.cycle.len();
        let m = (n - w) % k;
        let mut cyc = self.cycle.arrows.clone();
        cyc.rotate_left(m);
        let start = q.source(cyc[0]);
        EvInfPath {
            prefix: FinitePath::trivial(start),
            cycle: FinitePath::from_arrows_unchecked(q, start, cyc),
        }
    }

    /// If the path begins with `path`, the remaining tail.
    pub fn strip(&self, q: &Quiver, path: &FinitePath) -> Option<EvInfPath> {
        if path.source != self.source() {
            return None;
        }
        let n = path.len();
        if (0..n).all(|i| self.arrow_at(i) == path.arrows[i]) {
            Some(self.truncate_gt(q, n))
        } else {
            None
        }
    }

    /// `p . w`: traverse `w`, then `self`. Requires `t(w) = s(p)`.
    pub fn extend(&self, q: &Quiver, w: &FinitePath) -> Result<EvInfPath, QuiverError> {
        let prefix = w.then(q, &self.prefix)?;
        EvInfPath::new(q, prefix, self.cycle.clone())
    }

    pub fn tail_class(&self) -> TailClass {
        TailClass::of_cycle(&self.cycle.arrows)
    }

    pub fn tail_equivalent(&self, other: &EvInfPath) -> bool {
        self.tail_class() == other.tail_class()
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> InfDisplay<'a> {
        InfDisplay {
            path: self,
            quiver: q,
        }
    }
}

pub struct InfDisplay<'a> {
    path: &'a EvInfPath,
    quiver: &'a Quiver,
}

impl fmt::Display for InfDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^inf", self.path.cycle.display(self.quiver))?;
        if !self.path.prefix.is_trivial() {
            write!(f, ".{}", self.path.prefix.display(self.quiver))?;
        }
        Ok(())
    }
}

/// A rational tail-equivalence class, named by the lexicographically least
/// rotation of its primitive cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TailClass {
    cycle: Vec<ArrowId>,
}

impl TailClass {
    fn of_cycle(arrows: &[ArrowId]) -> TailClass {
        let period = primitive_period(arrows);
        let base = &arrows[..period];
        let best = (0..period)
            .map(|r| {
                let mut v = base.to_vec();
                v.rotate_left(r);
                v
            })
            .min()
            .expect("nonempty cycle");
        TailClass { cycle: best }
    }

    /// Class of `c^inf` for an oriented cycle `c`.
    pub fn of(q: &Quiver, cycle: &FinitePath) -> Result<TailClass, QuiverError> {
        if !cycle.is_cycle() {
            return Err(QuiverError::NotACycle(cycle.display(q).to_string()));
        }
        Ok(TailClass::of_cycle(&cycle.arrows))
    }

    /// Canonical cycle arrows in traversal order; `arrows()[0]` is the
    /// designated first arrow used by lambda-twists.
    pub fn arrows(&self) -> &[ArrowId] {
        &self.cycle
    }

    pub fn first_arrow(&self) -> ArrowId {
        self.cycle[0]
    }

    pub fn cycle_path(&self, q: &Quiver) -> FinitePath {
        FinitePath::from_arrows_unchecked(q, q.source(self.cycle[0]), self.cycle.clone())
    }

    /// The cyclic path `q^inf` of the canonical rotation.
    pub fn representative(&self, q: &Quiver) -> EvInfPath {
        EvInfPath::cyclic(q, self.cycle_path(q)).expect("class cycle is closed")
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> ClassDisplay<'a> {
        ClassDisplay {
            class: self,
            quiver: q,
        }
    }
}

pub struct ClassDisplay<'a> {
    class: &'a TailClass,
    quiver: &'a Quiver,
}

impl fmt::Display for ClassDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.class.representative(self.quiver).display(self.quiver)
        )
    }
}

/// Paths of exactly `len` arrows ending at `v`, in path order.
pub fn paths_ending_at(q: &Quiver, v: VertexId, len: usize) -> Vec<FinitePath> {
    let mut layer = vec![FinitePath::trivial(v)];
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|p| {
                q.incoming(p.source())
                    .iter()
                    .map(move |&b| FinitePath::arrow(q, b).then(q, p).expect("composable"))
            })
            .collect();
    }
    layer.sort();
    layer
}

/// Basis window of the sink module at `sink`: all paths into it of length
/// at most `bound`, including the trivial path.
pub fn enumerate_sink_paths(
    q: &Quiver,
    sink: VertexId,
    bound: usize,
) -> Result<Vec<FinitePath>, QuiverError> {
    if !q.is_sink(sink) {
        return Err(QuiverError::NotASink(q.vertex_name(sink).to_string()));
    }
    let mut out: Vec<FinitePath> = (0..=bound)
        .flat_map(|l| paths_ending_at(q, sink, l))
        .collect();
    out.sort();
    Ok(out)
}

/// Whether the paths into `sink` are finitely many (no cycle reaches it).
pub fn sink_module_is_finite(q: &Quiver, sink: VertexId) -> bool {
    !q.vertex_ids()
        .any(|v| q.on_cycle(v) && q.reachable_from(v).contains(&sink))
}

/// Whether `class` has finitely many members. A prefix longer than the
/// vertex count repeats a vertex, so it can be pumped indefinitely.
pub fn class_is_finite(q: &Quiver, class: &TailClass) -> bool {
    let n = q.vertex_count();
    enumerate_class(q, class, n + 1)
        .iter()
        .all(|p| p.prefix().len() <= n)
}

/// All canonical paths of `class` with prefix length at most `bound`.
pub fn enumerate_class(q: &Quiver, class: &TailClass, bound: usize) -> Vec<EvInfPath> {
    let k = class.cycle.len();
    let mut out = BTreeSet::new();
    for r in 0..k {
        let mut rot = class.cycle.clone();
        rot.rotate_left(r);
        let start = q.source(rot[0]);
        let last = *rot.last().expect("nonempty");
        let cycle = FinitePath::from_arrows_unchecked(q, start, rot);
        out.insert(EvInfPath {
            prefix: FinitePath::trivial(start),
            cycle: cycle.clone(),
        });
        for &beta in q.incoming(start) {
            if beta == last {
                continue;
            }
            let tail = FinitePath::arrow(q, beta);
            for len in 0..bound {
                for head in paths_ending_at(q, q.source(beta), len) {
                    let prefix = head.then(q, &tail).expect("composable");
                    out.insert(EvInfPath {
                        prefix,
                        cycle: cycle.clone(),
                    });
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Rational tail classes whose primitive cycle has length at most `max_len`.
pub fn tail_classes(q: &Quiver, max_len: usize) -> Vec<TailClass> {
    let mut out = BTreeSet::new();
    for v in q.vertex_ids() {
        let mut stack: Vec<FinitePath> = vec![FinitePath::trivial(v)];
        while let Some(p) = stack.pop() {
            if p.is_cycle() {
                out.insert(TailClass::of_cycle(&p.arrows));
            }
            if p.len() < max_len {
                for &a in q.outgoing(p.target()) {
                    stack.push(p.then(q, &FinitePath::arrow(q, a)).expect("composable"));
                }
            }
        }
    }
    out.into_iter().collect()
}
