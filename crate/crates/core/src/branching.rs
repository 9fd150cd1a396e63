//! Finite algebraic branching systems: validation, the module `M(X)`, the
//! trace `p(x)`, the induced morphism into `F (+) N`, and the
//! irreducibility classifier.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::Generator;
use crate::batch::Exec;
use crate::linalg::Span;
use crate::path::{
    class_is_finite, enumerate_class, enumerate_sink_paths, sink_module_is_finite, EvInfPath,
    FinitePath, TailClass,
};
use crate::quiver::{ArrowId, Quiver, QuiverError, VertexId};
use crate::repr::{hom_check, FNKey, FNModule, HomCheck, Module, ReprError, SparseVector};
use crate::scalars::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchingError {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("point `{0}` is not in the system")]
    PointOutOfSystem(String),
    #[error("the system is not perfect: {0}")]
    NotPerfect(String),
    #[error("the system has no points")]
    EmptySystem,
    #[error("point `{0}` lies in no vertex set")]
    UntracedPoint(String),
    #[error("inconsistent classification: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Repr(#[from] ReprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointId(pub u32);

impl PointId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type MVector = SparseVector<PointId>;

/// A branching system on a finite point set. `sigma[a]` lists the pairs
/// `(y, x)` with `sigma_a(y) = x`, exactly as given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBranchingSystem {
    quiver: Arc<Quiver>,
    points: Vec<String>,
    vertex_sets: Vec<BTreeSet<PointId>>,
    arrow_sets: Vec<BTreeSet<PointId>>,
    sigma: Vec<Vec<(PointId, PointId)>>,
}

/// Textual description of a system, keyed by names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BsSpec {
    pub points: Vec<String>,
    pub vertex_sets: Vec<(String, Vec<String>)>,
    pub arrow_sets: Vec<(String, Vec<String>)>,
    pub sigma: Vec<(String, Vec<(String, String)>)>,
}

impl FiniteBranchingSystem {
    pub fn new(quiver: Arc<Quiver>, spec: &BsSpec) -> Result<Self, BranchingError> {
        let mut seen = BTreeSet::new();
        for p in &spec.points {
            if !seen.insert(p.as_str()) {
                return Err(BranchingError::DuplicatePoint(p.clone()));
            }
        }
        let index: BTreeMap<&str, PointId> = spec
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), PointId(i as u32)))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| BranchingError::PointOutOfSystem(name.to_string()))
        };
        let mut vertex_sets = vec![BTreeSet::new(); quiver.vertex_count()];
        for (v, pts) in &spec.vertex_sets {
            let v = quiver.vertex(v)?;
            for p in pts {
                vertex_sets[v.index()].insert(lookup(p)?);
            }
        }
        let mut arrow_sets = vec![BTreeSet::new(); quiver.arrow_count()];
        for (a, pts) in &spec.arrow_sets {
            let a = quiver.arrow(a)?;
            for p in pts {
                arrow_sets[a.index()].insert(lookup(p)?);
            }
        }
        let mut sigma = vec![Vec::new(); quiver.arrow_count()];
        for (a, pairs) in &spec.sigma {
            let a = quiver.arrow(a)?;
            for (x, y) in pairs {
                sigma[a.index()].push((lookup(x)?, lookup(y)?));
            }
        }
        Ok(FiniteBranchingSystem {
            quiver,
            points: spec.points.clone(),
            vertex_sets,
            arrow_sets,
            sigma,
        })
    }

    pub fn spec(&self) -> BsSpec {
        let q = &*self.quiver;
        let names = |s: &BTreeSet<PointId>| {
            s.iter()
                .map(|&p| self.name(p).to_string())
                .collect::<Vec<_>>()
        };
        BsSpec {
            points: self.points.clone(),
            vertex_sets: q
                .vertex_ids()
                .filter(|v| !self.vertex_sets[v.index()].is_empty())
                .map(|v| {
                    (
                        q.vertex_name(v).to_string(),
                        names(&self.vertex_sets[v.index()]),
                    )
                })
                .collect(),
            arrow_sets: q
                .arrow_ids()
                .filter(|a| !self.arrow_sets[a.index()].is_empty())
                .map(|a| {
                    (
                        q.arrow_name(a).to_string(),
                        names(&self.arrow_sets[a.index()]),
                    )
                })
                .collect(),
            sigma: q
                .arrow_ids()
                .filter(|a| !self.sigma[a.index()].is_empty())
                .map(|a| {
                    let pairs = self.sigma[a.index()]
                        .iter()
                        .map(|&(x, y)| (self.name(x).to_string(), self.name(y).to_string()))
                        .collect();
                    (q.arrow_name(a).to_string(), pairs)
                })
                .collect(),
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn quiver_arc(&self) -> Arc<Quiver> {
        Arc::clone(&self.quiver)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_ids(&self) -> impl Iterator<Item = PointId> {
        (0..self.points.len() as u32).map(PointId)
    }

    pub fn name(&self, p: PointId) -> &str {
        &self.points[p.index()]
    }

    pub fn point(&self, name: &str) -> Result<PointId, BranchingError> {
        self.points
            .iter()
            .position(|p| p == name)
            .map(|i| PointId(i as u32))
            .ok_or_else(|| BranchingError::PointOutOfSystem(name.to_string()))
    }

    pub fn vertex_set(&self, v: VertexId) -> &BTreeSet<PointId> {
        &self.vertex_sets[v.index()]
    }

    pub fn arrow_set(&self, a: ArrowId) -> &BTreeSet<PointId> {
        &self.arrow_sets[a.index()]
    }

    /// `sigma_a(y)`, first listed image.
    pub fn sigma(&self, a: ArrowId, y: PointId) -> Option<PointId> {
        self.sigma[a.index()]
            .iter()
            .find(|(s, _)| *s == y)
            .map(|&(_, x)| x)
    }

    /// `sigma_a^{-1}(x)`, first listed preimage.
    pub fn sigma_inv(&self, a: ArrowId, x: PointId) -> Option<PointId> {
        self.sigma[a.index()]
            .iter()
            .find(|(_, t)| *t == x)
            .map(|&(y, _)| y)
    }

    /// The disjoint union, with points renamed `name_1` and `name_2`.
    pub fn disjoint_union(&self, other: &FiniteBranchingSystem) -> FiniteBranchingSystem {
        let (a, b) = (self.spec(), other.spec());
        let tag = |s: &BsSpec, t: &str| {
            let r = |x: &String| format!("{x}_{t}");
            BsSpec {
                points: s.points.iter().map(r).collect(),
                vertex_sets: s
                    .vertex_sets
                    .iter()
                    .map(|(v, p)| (v.clone(), p.iter().map(r).collect()))
                    .collect(),
                arrow_sets: s
                    .arrow_sets
                    .iter()
                    .map(|(v, p)| (v.clone(), p.iter().map(r).collect()))
                    .collect(),
                sigma: s
                    .sigma
                    .iter()
                    .map(|(v, p)| (v.clone(), p.iter().map(|(x, y)| (r(x), r(y))).collect()))
                    .collect(),
            }
        };
        let (a, b) = (tag(&a, "1"), tag(&b, "2"));
        let spec = BsSpec {
            points: a.points.into_iter().chain(b.points).collect(),
            vertex_sets: a.vertex_sets.into_iter().chain(b.vertex_sets).collect(),
            arrow_sets: a.arrow_sets.into_iter().chain(b.arrow_sets).collect(),
            sigma: a.sigma.into_iter().chain(b.sigma).collect(),
        };
        FiniteBranchingSystem::new(self.quiver_arc(), &spec).expect("names stay distinct")
    }

    pub fn vertex_of(&self, x: PointId) -> Option<VertexId> {
        self.quiver
            .vertex_ids()
            .find(|v| self.vertex_sets[v.index()].contains(&x))
    }
}

/// A violated axiom, with a short description of the witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsReport {
    /// Axioms (1), (2) and bijectivity of every `sigma_a`.
    pub axioms_ok: bool,
    pub saturated: bool,
    /// Saturated and axiom (3) at every regular vertex.
    pub perfect: bool,
    pub violations: Vec<Violation>,
}

pub fn validate_bs(x: &FiniteBranchingSystem) -> BsReport {
    let q = x.quiver();
    let mut v = Vec::new();
    let show = |s: &BTreeSet<PointId>| s.iter().map(|&p| x.name(p)).collect::<Vec<_>>().join(" ");
    for i in q.vertex_ids() {
        for j in q.vertex_ids().filter(|j| *j > i) {
            let both: BTreeSet<PointId> = x
                .vertex_set(i)
                .intersection(x.vertex_set(j))
                .copied()
                .collect();
            if !both.is_empty() {
                v.push(Violation {
                    axiom: "(1)",
                    detail: format!(
                        "X_{} and X_{} share {}",
                        q.vertex_name(i),
                        q.vertex_name(j),
                        show(&both)
                    ),
                });
            }
        }
    }
    for a in q.arrow_ids() {
        for b in q.arrow_ids().filter(|b| *b > a) {
            let both: BTreeSet<PointId> = x
                .arrow_set(a)
                .intersection(x.arrow_set(b))
                .copied()
                .collect();
            if !both.is_empty() {
                v.push(Violation {
                    axiom: "(1)",
                    detail: format!(
                        "X_{} and X_{} share {}",
                        q.arrow_name(a),
                        q.arrow_name(b),
                        show(&both)
                    ),
                });
            }
        }
        let outside: BTreeSet<PointId> = x
            .arrow_set(a)
            .difference(x.vertex_set(q.source(a)))
            .copied()
            .collect();
        if !outside.is_empty() {
            v.push(Violation {
                axiom: "(2)",
                detail: format!(
                    "X_{} not inside X_{}: {}",
                    q.arrow_name(a),
                    q.vertex_name(q.source(a)),
                    show(&outside)
                ),
            });
        }
        let pairs = &x.sigma[a.index()];
        let dom: Vec<PointId> = pairs.iter().map(|p| p.0).collect();
        let img: Vec<PointId> = pairs.iter().map(|p| p.1).collect();
        let dom_set: BTreeSet<PointId> = dom.iter().copied().collect();
        let img_set: BTreeSet<PointId> = img.iter().copied().collect();
        let name = q.arrow_name(a);
        if dom_set.len() != dom.len() {
            v.push(Violation {
                axiom: "sigma",
                detail: format!("sigma_{name} assigns a point twice"),
            });
        }
        if img_set.len() != img.len() {
            v.push(Violation {
                axiom: "sigma",
                detail: format!("sigma_{name} is not injective"),
            });
        }
        if &dom_set != x.vertex_set(q.target(a)) {
            v.push(Violation {
                axiom: "sigma",
                detail: format!(
                    "sigma_{name} is defined on {{{}}}, expected X_{} = {{{}}}",
                    show(&dom_set),
                    q.vertex_name(q.target(a)),
                    show(x.vertex_set(q.target(a)))
                ),
            });
        }
        if &img_set != x.arrow_set(a) {
            v.push(Violation {
                axiom: "sigma",
                detail: format!(
                    "sigma_{name} has image {{{}}}, expected X_{name} = {{{}}}",
                    show(&img_set),
                    show(x.arrow_set(a))
                ),
            });
        }
    }
    let axioms_ok = v.is_empty();
    let covered: BTreeSet<PointId> = q
        .vertex_ids()
        .flat_map(|i| x.vertex_set(i).iter().copied())
        .collect();
    let saturated = covered.len() == x.len();
    if !saturated {
        let missing: BTreeSet<PointId> = x.point_ids().filter(|p| !covered.contains(p)).collect();
        v.push(Violation {
            axiom: "saturation",
            detail: format!("points in no X_i: {}", show(&missing)),
        });
    }
    let mut partition = true;
    for i in q.regular_vertices() {
        let union: BTreeSet<PointId> = q
            .outgoing(i)
            .iter()
            .flat_map(|&a| x.arrow_set(a).iter().copied())
            .collect();
        if &union != x.vertex_set(i) {
            partition = false;
            v.push(Violation {
                axiom: "(3)",
                detail: format!(
                    "X_{} = {{{}}} but the arrow sets cover {{{}}}",
                    q.vertex_name(i),
                    show(x.vertex_set(i)),
                    show(&union)
                ),
            });
        }
    }
    BsReport {
        axioms_ok,
        saturated,
        perfect: axioms_ok && saturated && partition,
        violations: v,
    }
}

/// The associated representation `M(X)` on characteristic functions.
#[derive(Clone, Debug)]
pub struct MModule<'a> {
    system: &'a FiniteBranchingSystem,
    field: Field,
}

impl<'a> MModule<'a> {
    pub fn new(system: &'a FiniteBranchingSystem, field: Field) -> Self {
        MModule { system, field }
    }
}

impl Module for MModule<'_> {
    type Key = PointId;

    fn quiver(&self) -> &Quiver {
        self.system.quiver()
    }

    fn field(&self) -> Field {
        self.field
    }

    fn act_generator_key(&self, g: Generator, x: &PointId) -> MVector {
        let s = self.system;
        let q = s.quiver();
        let image = match g {
            Generator::Vertex(i) => s.vertex_set(i).contains(x).then_some(*x),
            Generator::Arrow(a) => {
                if s.arrow_set(a).contains(x) {
                    s.sigma_inv(a, *x)
                } else {
                    None
                }
            }
            Generator::Ghost(a) => {
                if s.vertex_set(q.target(a)).contains(x) {
                    s.sigma(a, *x)
                } else {
                    None
                }
            }
        };
        match image {
            Some(y) => SparseVector::basis(self.field, y),
            None => SparseVector::zero(self.field),
        }
    }

    fn formula(&self, g: Generator) -> &'static str {
        match g {
            Generator::Vertex(_) => "e_i.chi_x = [x in X_i] chi_x",
            Generator::Arrow(_) => "a.chi_x = [x in X_a] chi_{sigma_a^-1(x)}",
            Generator::Ghost(_) => "a^*.chi_x = [x in X_t(a)] chi_{sigma_a(x)}",
        }
    }

    fn show_key(&self, k: &PointId) -> String {
        self.system.name(*k).to_string()
    }
}

/// The path `p(x)` traced by a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trace {
    Sink(FinitePath),
    Infinite(EvInfPath),
}

impl Trace {
    pub fn key(&self) -> FNKey {
        match self {
            Trace::Sink(p) => FNKey::N(p.clone()),
            Trace::Infinite(p) => FNKey::F(p.clone()),
        }
    }

    pub fn target(&self) -> CanonicalBS {
        match self {
            Trace::Sink(p) => CanonicalBS::Sink(p.target()),
            Trace::Infinite(p) => CanonicalBS::Class(p.tail_class()),
        }
    }

    pub fn display(&self, q: &Quiver) -> String {
        match self {
            Trace::Sink(p) => p.display(q).to_string(),
            Trace::Infinite(p) => p.display(q).to_string(),
        }
    }
}

/// Follows `x = x_0`, `sigma_{a_m}(x_m) = x_{m-1}` until a sink point or a
/// repeated point.
pub fn trace_path(x: &FiniteBranchingSystem, start: PointId) -> Result<Trace, BranchingError> {
    let q = x.quiver();
    let mut visited: BTreeMap<PointId, usize> = BTreeMap::new();
    let mut arrows: Vec<ArrowId> = Vec::new();
    let mut cur = start;
    let source = x
        .vertex_of(start)
        .ok_or_else(|| BranchingError::UntracedPoint(x.name(start).to_string()))?;
    loop {
        let i = x
            .vertex_of(cur)
            .ok_or_else(|| BranchingError::UntracedPoint(x.name(cur).to_string()))?;
        if q.is_sink(i) {
            let p = FinitePath::from_arrows(q, source, arrows)?;
            return Ok(Trace::Sink(p));
        }
        if let Some(&j) = visited.get(&cur) {
            let prefix = FinitePath::from_arrows(q, source, arrows[..j].to_vec())?;
            let cycle = FinitePath::from_arrows(q, prefix.target(), arrows[j..].to_vec())?;
            return Ok(Trace::Infinite(EvInfPath::new(q, prefix, cycle)?));
        }
        visited.insert(cur, arrows.len());
        let not_perfect = || {
            BranchingError::NotPerfect(format!("point `{}` has no outgoing branch", x.name(cur)))
        };
        let a = *q
            .outgoing(i)
            .iter()
            .find(|&&a| x.arrow_set(a).contains(&cur))
            .ok_or_else(not_perfect)?;
        cur = x.sigma_inv(a, cur).ok_or_else(not_perfect)?;
        arrows.push(a);
    }
}

/// The canonical systems `[p]` and `N_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalBS {
    Class(TailClass),
    Sink(VertexId),
}

impl CanonicalBS {
    pub fn display(&self, q: &Quiver) -> String {
        match self {
            CanonicalBS::Class(c) => c.display(q).to_string(),
            CanonicalBS::Sink(v) => format!("N_{}", q.vertex_name(*v)),
        }
    }

    pub fn is_finite(&self, q: &Quiver) -> bool {
        match self {
            CanonicalBS::Class(c) => class_is_finite(q, c),
            CanonicalBS::Sink(v) => sink_module_is_finite(q, *v),
        }
    }

    /// Points with prefix (or path) length at most `bound`.
    pub fn window(&self, q: &Quiver, bound: usize) -> Result<Vec<FNKey>, BranchingError> {
        Ok(match self {
            CanonicalBS::Class(c) => enumerate_class(q, c, bound)
                .into_iter()
                .map(FNKey::F)
                .collect(),
            CanonicalBS::Sink(v) => enumerate_sink_paths(q, *v, bound)?
                .into_iter()
                .map(FNKey::N)
                .collect(),
        })
    }

    /// Checks the axioms on a window; structure maps leaving the window are
    /// skipped, and surjectivity of `sigma_a` is checked on window points.
    pub fn validate_window(&self, q: &Quiver, bound: usize) -> Result<BsReport, BranchingError> {
        let pts = self.window(q, bound)?;
        let set: BTreeSet<&FNKey> = pts.iter().collect();
        let mut v = Vec::new();
        for p in &pts {
            let (s, first) = key_source_and_first(p);
            if let Some(a) = first {
                if q.source(a) != s {
                    v.push(Violation {
                        axiom: "(2)",
                        detail: format!(
                            "{} starts with {} away from its source",
                            key_name(q, p),
                            q.arrow_name(a)
                        ),
                    });
                }
                let tail = canonical_strip(q, p).expect("nontrivial");
                if canonical_extend(q, &tail, a) != *p {
                    v.push(Violation {
                        axiom: "sigma",
                        detail: format!(
                            "{} is not sigma_{} of its tail",
                            key_name(q, p),
                            q.arrow_name(a)
                        ),
                    });
                }
                if key_source_and_first(&tail).0 != q.target(a) {
                    v.push(Violation {
                        axiom: "sigma",
                        detail: format!(
                            "tail of {} does not start at t({})",
                            key_name(q, p),
                            q.arrow_name(a)
                        ),
                    });
                }
            } else if q.is_regular(s) {
                v.push(Violation {
                    axiom: "(3)",
                    detail: format!(
                        "{} lies over a regular vertex but starts with no arrow",
                        key_name(q, p)
                    ),
                });
            }
            for &a in q.incoming(s) {
                let img = canonical_extend(q, p, a);
                if set.contains(&img) && canonical_strip(q, &img).as_ref() != Some(p) {
                    v.push(Violation {
                        axiom: "sigma",
                        detail: format!(
                            "sigma_{} is not injective at {}",
                            q.arrow_name(a),
                            key_name(q, p)
                        ),
                    });
                }
            }
        }
        let ok = v.is_empty();
        Ok(BsReport {
            axioms_ok: ok,
            saturated: true,
            perfect: ok,
            violations: v,
        })
    }

    /// The whole system, when it is finite.
    pub fn materialize(
        &self,
        quiver: Arc<Quiver>,
    ) -> Result<Option<FiniteBranchingSystem>, BranchingError> {
        let q = &*quiver;
        if !self.is_finite(q) {
            return Ok(None);
        }
        let pts = self.window(q, q.vertex_count())?;
        let name = |p: &FNKey| key_name(q, p);
        let mut spec = BsSpec {
            points: pts.iter().map(name).collect(),
            ..BsSpec::default()
        };
        for i in q.vertex_ids() {
            let members: Vec<String> = pts
                .iter()
                .filter(|p| key_source_and_first(p).0 == i)
                .map(name)
                .collect();
            spec.vertex_sets
                .push((q.vertex_name(i).to_string(), members));
        }
        for a in q.arrow_ids() {
            let members: Vec<String> = pts
                .iter()
                .filter(|p| key_source_and_first(p).1 == Some(a))
                .map(name)
                .collect();
            spec.arrow_sets.push((q.arrow_name(a).to_string(), members));
            let pairs = pts
                .iter()
                .filter(|p| key_source_and_first(p).0 == q.target(a))
                .map(|p| (name(p), name(&canonical_extend(q, p, a))))
                .collect();
            spec.sigma.push((q.arrow_name(a).to_string(), pairs));
        }
        Ok(Some(FiniteBranchingSystem::new(quiver.clone(), &spec)?))
    }
}

fn key_name(q: &Quiver, p: &FNKey) -> String {
    match p {
        FNKey::F(x) => x.display(q).to_string(),
        FNKey::N(x) => x.display(q).to_string(),
    }
}

fn key_source_and_first(p: &FNKey) -> (VertexId, Option<ArrowId>) {
    match p {
        FNKey::F(x) => (x.source(), Some(x.arrow_at(0))),
        FNKey::N(x) => (x.source(), x.first_arrow()),
    }
}

/// `sigma_a^{-1}`: drops the first arrow.
fn canonical_strip(q: &Quiver, p: &FNKey) -> Option<FNKey> {
    match p {
        FNKey::F(x) => Some(FNKey::F(x.truncate_gt(q, 1))),
        FNKey::N(x) => {
            let a = x.first_arrow()?;
            x.strip_prefix(&FinitePath::arrow(q, a)).map(FNKey::N)
        }
    }
}

/// `sigma_a(p) = p a`.
fn canonical_extend(q: &Quiver, p: &FNKey, a: ArrowId) -> FNKey {
    let w = FinitePath::arrow(q, a);
    match p {
        FNKey::F(x) => FNKey::F(x.extend(q, &w).expect("composable")),
        FNKey::N(x) => FNKey::N(w.then(q, x).expect("composable")),
    }
}

/// The module `M` of a canonical system, acting through its structure maps.
#[derive(Clone, Debug)]
pub struct CanonicalModule {
    quiver: Arc<Quiver>,
    field: Field,
    system: CanonicalBS,
}

impl CanonicalModule {
    pub fn new(quiver: Arc<Quiver>, field: Field, system: CanonicalBS) -> Self {
        CanonicalModule {
            quiver,
            field,
            system,
        }
    }
}

impl Module for CanonicalModule {
    type Key = FNKey;

    fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    fn field(&self) -> Field {
        self.field
    }

    fn act_generator_key(&self, g: Generator, p: &FNKey) -> SparseVector<FNKey> {
        let q = &*self.quiver;
        let (s, first) = key_source_and_first(p);
        let image = match g {
            Generator::Vertex(i) => (s == i).then(|| p.clone()),
            Generator::Arrow(a) => (first == Some(a)).then(|| canonical_strip(q, p)).flatten(),
            Generator::Ghost(a) => (q.target(a) == s).then(|| canonical_extend(q, p, a)),
        };
        debug_assert!(image.as_ref().is_none_or(|k| match (k, &self.system) {
            (FNKey::F(x), CanonicalBS::Class(c)) => x.tail_class() == *c,
            (FNKey::N(x), CanonicalBS::Sink(v)) => x.target() == *v,
            _ => false,
        }));
        match image {
            Some(k) => SparseVector::basis(self.field, k),
            None => SparseVector::zero(self.field),
        }
    }

    fn formula(&self, g: Generator) -> &'static str {
        match g {
            Generator::Vertex(_) => "e_i.chi_q = [s(q) = i] chi_q",
            Generator::Arrow(_) => "a.chi_q = [q starts with a] chi_{tau_>1(q)}",
            Generator::Ghost(_) => "a^*.chi_q = [s(q) = t(a)] chi_{q a}",
        }
    }

    fn show_key(&self, k: &FNKey) -> String {
        key_name(&self.quiver, k)
    }
}

/// The morphism `chi_x -> p(x)` from `M(X)` to `F (+) N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedHom {
    pub traces: Vec<(PointId, Trace)>,
    pub check: HomCheck,
    /// Differences `chi_x - chi_y` over points with equal traces.
    pub kernel: Vec<MVector>,
}

pub fn induced_hom(
    x: &FiniteBranchingSystem,
    field: Field,
    exec: Exec,
) -> Result<InducedHom, BranchingError> {
    let report = validate_bs(x);
    if !report.perfect {
        return Err(BranchingError::NotPerfect(summary(&report)));
    }
    let ids: Vec<PointId> = x.point_ids().collect();
    let traces: Vec<(PointId, Trace)> = ids
        .iter()
        .map(|&p| trace_path(x, p).map(|t| (p, t)))
        .collect::<Result<_, _>>()?;
    let table: BTreeMap<PointId, FNKey> = traces.iter().map(|(p, t)| (*p, t.key())).collect();
    let m = MModule::new(x, field);
    let fn_mod = FNModule::new(x.quiver_arc(), field);
    let check = hom_check(
        &m,
        &fn_mod,
        |p| table.get(p).map(|k| SparseVector::basis(field, k.clone())),
        &ids,
        exec,
    )?;
    let mut groups: BTreeMap<&Trace, Vec<PointId>> = BTreeMap::new();
    for (p, t) in &traces {
        groups.entry(t).or_default().push(*p);
    }
    let kernel = groups
        .values()
        .flat_map(|g| g.windows(2).map(|w| difference(field, w[0], w[1])))
        .collect();
    Ok(InducedHom {
        traces,
        check,
        kernel,
    })
}

fn difference(field: Field, x: PointId, y: PointId) -> MVector {
    SparseVector::from_terms(field, [(field.one(), x), (-field.one(), y)])
}

fn summary(r: &BsReport) -> String {
    r.violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Subspace of `M(X)` generated by `v`, closed under every generator.
pub fn generated_subspace(m: &MModule<'_>, v: &MVector) -> Span<PointId> {
    let gens = Generator::all(m.quiver());
    let mut span = Span::new(m.field());
    let mut queue = Vec::new();
    if let Some(r) = span.insert(v) {
        queue.push(r);
    }
    while let Some(w) = queue.pop() {
        for &g in &gens {
            if let Some(r) = span.insert(&m.act_generator(g, &w)) {
                queue.push(r);
            }
        }
    }
    span
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReducibleReason {
    /// Traces fall into more than one component.
    SeveralComponents(Vec<CanonicalBS>),
    /// Two points share a trace.
    Collision(PointId, PointId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// `x -> p(x)` is an isomorphism onto `target`.
    Irreducible { target: CanonicalBS },
    /// `witness` generates an invariant subspace of dimension
    /// `subspace_dim`, strictly between 0 and `|X|`.
    Reducible {
        witness: MVector,
        reason: ReducibleReason,
        subspace_dim: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsVerdict {
    pub classification: Classification,
    pub traces: Vec<(PointId, Trace)>,
}

pub fn classify_bs(x: &FiniteBranchingSystem, field: Field) -> Result<BsVerdict, BranchingError> {
    if x.is_empty() {
        return Err(BranchingError::EmptySystem);
    }
    let report = validate_bs(x);
    if !report.perfect {
        return Err(BranchingError::NotPerfect(summary(&report)));
    }
    let q = x.quiver();
    let traces: Vec<(PointId, Trace)> = x
        .point_ids()
        .map(|p| trace_path(x, p).map(|t| (p, t)))
        .collect::<Result<_, _>>()?;
    let m = MModule::new(x, field);
    let components: BTreeSet<CanonicalBS> = traces.iter().map(|(_, t)| t.target()).collect();
    let reducible = |witness: MVector, reason| -> Result<BsVerdict, BranchingError> {
        let span = generated_subspace(&m, &witness);
        let gens = Generator::all(q);
        let invariant = span
            .rows()
            .all(|r| gens.iter().all(|&g| span.contains(&m.act_generator(g, r))));
        if !invariant || span.dim() == 0 || span.dim() >= x.len() {
            return Err(BranchingError::Inconsistent(format!(
                "witness generates a subspace of dimension {} in {}",
                span.dim(),
                x.len()
            )));
        }
        Ok(BsVerdict {
            classification: Classification::Reducible {
                witness,
                reason,
                subspace_dim: span.dim(),
            },
            traces: traces.clone(),
        })
    };
    if components.len() > 1 {
        let first = traces[0].1.target();
        let p = traces
            .iter()
            .find(|(_, t)| t.target() == first)
            .expect("nonempty")
            .0;
        return reducible(
            SparseVector::basis(field, p),
            ReducibleReason::SeveralComponents(components.into_iter().collect()),
        );
    }
    let mut seen: BTreeMap<&Trace, PointId> = BTreeMap::new();
    for (p, t) in &traces {
        if let Some(&other) = seen.get(t) {
            return reducible(
                difference(field, other, *p),
                ReducibleReason::Collision(other, *p),
            );
        }
        seen.insert(t, *p);
    }
    let target = components.into_iter().next().expect("nonempty");
    let full = target.materialize(x.quiver_arc())?.ok_or_else(|| {
        BranchingError::Inconsistent(format!(
            "a finite system maps injectively into the infinite system {}",
            target.display(q)
        ))
    })?;
    // f_X must be a bijection onto the target that respects every structure map.
    let names: BTreeMap<PointId, String> = traces.iter().map(|(p, t)| (*p, t.display(q))).collect();
    let image = |p: PointId| full.point(&names[&p]).expect("trace lies in target");
    if full.len() != x.len() {
        return Err(BranchingError::Inconsistent(format!(
            "trace map hits {} of the {} points of {}",
            x.len(),
            full.len(),
            target.display(q)
        )));
    }
    for p in x.point_ids() {
        let fp = image(p);
        for i in q.vertex_ids() {
            if x.vertex_set(i).contains(&p) != full.vertex_set(i).contains(&fp) {
                return Err(BranchingError::Inconsistent(format!(
                    "vertex set {} not preserved",
                    q.vertex_name(i)
                )));
            }
        }
        for a in q.arrow_ids() {
            if x.arrow_set(a).contains(&p) != full.arrow_set(a).contains(&fp) {
                return Err(BranchingError::Inconsistent(format!(
                    "arrow set {} not preserved",
                    q.arrow_name(a)
                )));
            }
            if let Some(y) = x.sigma(a, p) {
                if full.sigma(a, fp) != Some(image(y)) {
                    return Err(BranchingError::Inconsistent(format!(
                        "sigma_{} not preserved",
                        q.arrow_name(a)
                    )));
                }
            }
        }
    }
    Ok(BsVerdict {
        classification: Classification::Irreducible { target },
        traces,
    })
}
