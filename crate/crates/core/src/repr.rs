//! The representations `F` (rational part) and `N`, their direct sum, left
//! ideals `L e_i`, twisted actions, irreducibility certificates and a
//! window-level homomorphism checker.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{
    relations, write_combination, AlgebraError, Element, Generator, Lpa, Monomial, RelationReport,
    ScalingVector,
};
use crate::batch::Exec;
use crate::path::{enumerate_class, enumerate_sink_paths, EvInfPath, FinitePath, TailClass};
use crate::quiver::{Quiver, QuiverError, VertexId};
use crate::scalars::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReprError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("the vector has empty support")]
    EmptySupport,
    #[error("`{0}` is not in the class of the target")]
    ClassMismatch(String),
    #[error("`{0}` does not end at the target's sink")]
    SinkMismatch(String),
    #[error("`{0}` is not a path ending at a sink")]
    NotASinkPath(String),
    #[error("window not closed: no image for `{0}`")]
    WindowNotClosed(String),
    #[error("`{0}` is not a finite line point")]
    NotALinePoint(String),
    #[error("`{0}` does not lie in the left ideal of e_{1}")]
    NotInLeftIdeal(String, String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// A finitely supported combination of basis keys with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVector<K: Ord> {
    field: Field,
    terms: BTreeMap<K, Scalar>,
}

pub type FVector = SparseVector<EvInfPath>;
pub type NVector = SparseVector<FinitePath>;
pub type FNVector = SparseVector<FNKey>;

impl<K: Ord + Clone> SparseVector<K> {
    pub fn zero(field: Field) -> Self {
        SparseVector {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(field: Field, k: K) -> Self {
        let mut v = SparseVector::zero(field);
        v.terms.insert(k, field.one());
        v
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (Scalar, K)>) -> Self {
        let mut v = SparseVector::zero(field);
        for (c, k) in terms {
            v.add_term(k, c);
        }
        v
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn add_term(&mut self, k: K, c: Scalar) {
        if c.is_zero() {
            return;
        }
        assert_eq!(c.field(), self.field, "coefficient from a different field");
        match self.terms.get_mut(&k) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SparseVector<K>, c: &Scalar) {
        for (k, d) in &other.terms {
            self.add_term(k.clone(), c * d);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coefficient(&self, k: &K) -> Option<&Scalar> {
        self.terms.get(k)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = SparseVector::zero(self.field);
        out.add_scaled(self, c);
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ReprError> {
        if self.field != other.field {
            return Err(ReprError::FieldMismatch(self.field, other.field));
        }
        let mut out = self.clone();
        out.add_scaled(other, &self.field.one());
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ReprError> {
        if self.field != other.field {
            return Err(ReprError::FieldMismatch(self.field, other.field));
        }
        let mut out = self.clone();
        out.add_scaled(other, &-self.field.one());
        Ok(out)
    }

    /// Applies `f` to every key and sums the images.
    pub fn map_linear<L: Ord + Clone>(
        &self,
        mut f: impl FnMut(&K) -> SparseVector<L>,
    ) -> SparseVector<L> {
        let mut out = SparseVector::zero(self.field);
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    pub fn display_with<'a, F>(&'a self, show: F) -> impl fmt::Display + 'a
    where
        F: Fn(&K) -> String + 'a,
    {
        VectorDisplay { vector: self, show }
    }
}

struct VectorDisplay<'a, K: Ord, F> {
    vector: &'a SparseVector<K>,
    show: F,
}

impl<K: Ord, F: Fn(&K) -> String> fmt::Display for VectorDisplay<'_, K, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_combination(
            f,
            self.vector.terms.iter().map(|(k, c)| (c, (self.show)(k))),
        )
    }
}

/// One nonzero step recorded by a traced action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub generator: String,
    pub formula: &'static str,
    pub input: String,
    pub output: String,
}

/// A left `L_k(Q)`-module with a distinguished basis.
pub trait Module: Sync {
    type Key: Clone + Ord + Hash + Debug + Send + Sync;

    fn quiver(&self) -> &Quiver;

    fn field(&self) -> Field;

    /// A generator applied to one basis element.
    fn act_generator_key(&self, g: Generator, k: &Self::Key) -> SparseVector<Self::Key>;

    /// Name of the action formula behind generator `g`.
    fn formula(&self, g: Generator) -> &'static str;

    fn show_key(&self, k: &Self::Key) -> String;

    /// A monomial applied to one basis element; the default runs its
    /// generator word.
    fn act_monomial_key(&self, m: &Monomial, k: &Self::Key) -> SparseVector<Self::Key> {
        self.act_word(
            &m.generator_word(),
            &SparseVector::basis(self.field(), k.clone()),
        )
    }

    fn act_generator(&self, g: Generator, v: &SparseVector<Self::Key>) -> SparseVector<Self::Key> {
        v.map_linear(|k| self.act_generator_key(g, k))
    }

    /// Applies `word[0]`, then `word[1]`, and so on.
    fn act_word(&self, word: &[Generator], v: &SparseVector<Self::Key>) -> SparseVector<Self::Key> {
        let mut cur = v.clone();
        for &g in word {
            if cur.is_empty() {
                break;
            }
            cur = self.act_generator(g, &cur);
        }
        cur
    }

    fn act_monomial(&self, m: &Monomial, v: &SparseVector<Self::Key>) -> SparseVector<Self::Key> {
        v.map_linear(|k| self.act_monomial_key(m, k))
    }

    fn act(
        &self,
        u: &Element,
        v: &SparseVector<Self::Key>,
    ) -> Result<SparseVector<Self::Key>, ReprError> {
        for f in [u.field(), v.field()] {
            if f != self.field() {
                return Err(ReprError::FieldMismatch(self.field(), f));
            }
        }
        let mut out = SparseVector::zero(self.field());
        for (m, c) in u.terms() {
            out.add_scaled(&self.act_monomial(m, v), c);
        }
        Ok(out)
    }

    /// `act` through generator words, logging every nonzero step.
    fn act_traced(
        &self,
        u: &Element,
        v: &SparseVector<Self::Key>,
    ) -> Result<(SparseVector<Self::Key>, Vec<TraceStep>), ReprError> {
        let result = self.act(u, v)?;
        let mut trace = Vec::new();
        let q = self.quiver();
        for m in u.terms().map(|(m, _)| m) {
            for k in v.keys() {
                let mut cur = SparseVector::basis(self.field(), k.clone());
                for g in m.generator_word() {
                    let input = cur.display_with(|x| self.show_key(x)).to_string();
                    cur = self.act_generator(g, &cur);
                    trace.push(TraceStep {
                        generator: g.name(q),
                        formula: self.formula(g),
                        input,
                        output: cur.display_with(|x| self.show_key(x)).to_string(),
                    });
                    if cur.is_empty() {
                        break;
                    }
                }
            }
        }
        Ok((result, trace))
    }
}

/// The module `F` on eventually periodic left-infinite paths, optionally
/// twisted by the scaling automorphism of `a`.
#[derive(Clone, Debug)]
pub struct FModule {
    quiver: Arc<Quiver>,
    field: Field,
    twist: Option<ScalingVector>,
}

impl FModule {
    pub fn new(quiver: Arc<Quiver>, field: Field) -> Self {
        FModule {
            quiver,
            field,
            twist: None,
        }
    }

    pub fn twisted(quiver: Arc<Quiver>, field: Field, a: ScalingVector) -> Self {
        FModule {
            quiver,
            field,
            twist: Some(a),
        }
    }

    pub fn twist(&self) -> Option<&ScalingVector> {
        self.twist.as_ref()
    }

    fn weight(&self, path: &FinitePath, star: &FinitePath) -> Scalar {
        match &self.twist {
            None => self.field.one(),
            Some(a) => &a.weight(path) * &a.weight(star).inv().expect("units"),
        }
    }
}

impl Module for FModule {
    type Key = EvInfPath;

    fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    fn field(&self) -> Field {
        self.field
    }

    fn act_generator_key(&self, g: Generator, p: &EvInfPath) -> FVector {
        let q = &*self.quiver;
        let (image, w) = match g {
            Generator::Vertex(i) => (
                if p.source() == i {
                    Some(p.clone())
                } else {
                    None
                },
                self.field.one(),
            ),
            Generator::Arrow(a) => {
                let ap = FinitePath::arrow(q, a);
                (
                    p.strip(q, &ap),
                    self.weight(&ap, &FinitePath::trivial(q.target(a))),
                )
            }
            Generator::Ghost(a) => {
                let ap = FinitePath::arrow(q, a);
                let image = if q.target(a) == p.source() {
                    Some(p.extend(q, &ap).expect("composable"))
                } else {
                    None
                };
                (image, self.weight(&FinitePath::trivial(q.target(a)), &ap))
            }
        };
        match image {
            Some(x) => SparseVector::from_terms(self.field, [(w, x)]),
            None => SparseVector::zero(self.field),
        }
    }

    fn act_monomial_key(&self, m: &Monomial, p: &EvInfPath) -> FVector {
        let q = &*self.quiver;
        let image = p
            .strip(q, m.path())
            .map(|rest| rest.extend(q, m.star()).expect("t(p) = t(q)"));
        match image {
            Some(x) => SparseVector::from_terms(self.field, [(self.weight(m.path(), m.star()), x)]),
            None => SparseVector::zero(self.field),
        }
    }

    fn formula(&self, g: Generator) -> &'static str {
        match g {
            Generator::Vertex(_) => "P_i(p) = [i = s(p)] p",
            Generator::Arrow(_) => "S_a(p) = [a = a_1] tau_>1(p)",
            Generator::Ghost(_) => "S*_a(p) = [t(a) = s(p)] p a",
        }
    }

    fn show_key(&self, k: &EvInfPath) -> String {
        k.display(&self.quiver).to_string()
    }
}

/// The module `N` on finite paths ending at sinks.
#[derive(Clone, Debug)]
pub struct NModule {
    quiver: Arc<Quiver>,
    field: Field,
}

impl NModule {
    pub fn new(quiver: Arc<Quiver>, field: Field) -> Self {
        NModule { quiver, field }
    }

    pub fn check_key(&self, p: &FinitePath) -> Result<(), ReprError> {
        if self.quiver.is_sink(p.target()) {
            Ok(())
        } else {
            Err(ReprError::NotASinkPath(p.display(&self.quiver).to_string()))
        }
    }
}

impl Module for NModule {
    type Key = FinitePath;

    fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    fn field(&self) -> Field {
        self.field
    }

    fn act_generator_key(&self, g: Generator, p: &FinitePath) -> NVector {
        let q = &*self.quiver;
        let image = match g {
            Generator::Vertex(i) => (p.source() == i).then(|| p.clone()),
            Generator::Arrow(a) => p.strip_prefix(&FinitePath::arrow(q, a)),
            Generator::Ghost(a) => {
                (q.target(a) == p.source()).then(|| FinitePath::arrow(q, a).join(p))
            }
        };
        match image {
            Some(x) => SparseVector::basis(self.field, x),
            None => SparseVector::zero(self.field),
        }
    }

    fn act_monomial_key(&self, m: &Monomial, p: &FinitePath) -> NVector {
        match p.strip_prefix(m.path()) {
            Some(rest) => SparseVector::basis(self.field, m.star().join(&rest)),
            None => SparseVector::zero(self.field),
        }
    }

    fn formula(&self, g: Generator) -> &'static str {
        match g {
            Generator::Vertex(_) => "P_i(p) = [i = s(p)] p",
            Generator::Arrow(_) => "S_a(p) = [a = a_1] tau_>1(p), 0 on trivial p",
            Generator::Ghost(_) => "S*_a(p) = [t(a) = s(p)] p a",
        }
    }

    fn show_key(&self, k: &FinitePath) -> String {
        k.display(&self.quiver).to_string()
    }
}

/// Basis of `F (+) N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FNKey {
    F(EvInfPath),
    N(FinitePath),
}

/// The direct sum `F (+) N`.
#[derive(Clone, Debug)]
pub struct FNModule {
    pub f: FModule,
    pub n: NModule,
}

impl FNModule {
    pub fn new(quiver: Arc<Quiver>, field: Field) -> Self {
        FNModule {
            f: FModule::new(Arc::clone(&quiver), field),
            n: NModule::new(quiver, field),
        }
    }

    pub fn inject_f(v: &FVector) -> FNVector {
        v.map_linear(|k| SparseVector::basis(v.field(), FNKey::F(k.clone())))
    }

    pub fn inject_n(v: &NVector) -> FNVector {
        v.map_linear(|k| SparseVector::basis(v.field(), FNKey::N(k.clone())))
    }
}

impl Module for FNModule {
    type Key = FNKey;

    fn quiver(&self) -> &Quiver {
        self.f.quiver()
    }

    fn field(&self) -> Field {
        self.f.field
    }

    fn act_generator_key(&self, g: Generator, k: &FNKey) -> FNVector {
        match k {
            FNKey::F(p) => FNModule::inject_f(&self.f.act_generator_key(g, p)),
            FNKey::N(p) => FNModule::inject_n(&self.n.act_generator_key(g, p)),
        }
    }

    fn act_monomial_key(&self, m: &Monomial, k: &FNKey) -> FNVector {
        match k {
            FNKey::F(p) => FNModule::inject_f(&self.f.act_monomial_key(m, p)),
            FNKey::N(p) => FNModule::inject_n(&self.n.act_monomial_key(m, p)),
        }
    }

    fn formula(&self, g: Generator) -> &'static str {
        self.f.formula(g)
    }

    fn show_key(&self, k: &FNKey) -> String {
        match k {
            FNKey::F(p) => self.f.show_key(p),
            FNKey::N(p) => self.n.show_key(p),
        }
    }
}

/// The left ideal `L e_i` as a module, with reduced monomials as basis.
#[derive(Clone, Debug)]
pub struct LeftIdeal {
    lpa: Lpa,
    base: VertexId,
}

impl LeftIdeal {
    pub fn new(lpa: Lpa, base: VertexId) -> Self {
        LeftIdeal { lpa, base }
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn lpa(&self) -> &Lpa {
        &self.lpa
    }

    /// The reduced form of `x`, checked to satisfy `x e_i = x`.
    pub fn vector(&self, x: &Element) -> Result<SparseVector<Monomial>, ReprError> {
        let r = self.lpa.reduce(x);
        if let Some((m, _)) = r.terms().find(|(m, _)| m.path().source() != self.base) {
            return Err(ReprError::NotInLeftIdeal(
                m.display(self.lpa.quiver()).to_string(),
                self.lpa.quiver().vertex_name(self.base).to_string(),
            ));
        }
        Ok(element_to_vector(&r))
    }
}

pub fn element_to_vector(x: &Element) -> SparseVector<Monomial> {
    SparseVector::from_terms(x.field(), x.terms().map(|(m, c)| (c.clone(), m.clone())))
}

pub fn vector_to_element(v: &SparseVector<Monomial>) -> Element {
    Element::from_terms(v.field(), v.terms().map(|(m, c)| (c.clone(), m.clone())))
}

impl Module for LeftIdeal {
    type Key = Monomial;

    fn quiver(&self) -> &Quiver {
        self.lpa.quiver()
    }

    fn field(&self) -> Field {
        self.lpa.field()
    }

    fn act_generator_key(&self, g: Generator, m: &Monomial) -> SparseVector<Monomial> {
        let x = &self.lpa.generator(g) * &self.lpa.monomial(m.clone());
        element_to_vector(&self.lpa.reduce(&x))
    }

    fn act_monomial_key(&self, m: &Monomial, k: &Monomial) -> SparseVector<Monomial> {
        let x = &self.lpa.monomial(m.clone()) * &self.lpa.monomial(k.clone());
        element_to_vector(&self.lpa.reduce(&x))
    }

    fn formula(&self, _g: Generator) -> &'static str {
        "left multiplication, then reduce"
    }

    fn show_key(&self, k: &Monomial) -> String {
        k.display(self.lpa.quiver()).to_string()
    }
}

/// A vector in one of the modules above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepVector {
    InF(FVector),
    InN(NVector),
    DirectSum(FNVector),
    InLeftIdeal(Element, VertexId),
}

impl RepVector {
    pub fn is_zero(&self) -> bool {
        match self {
            RepVector::InF(v) => v.is_empty(),
            RepVector::InN(v) => v.is_empty(),
            RepVector::DirectSum(v) => v.is_empty(),
            RepVector::InLeftIdeal(x, _) => x.is_empty(),
        }
    }

    pub fn display(&self, q: &Quiver) -> String {
        match self {
            RepVector::InF(v) => v.display_with(|k| k.display(q).to_string()).to_string(),
            RepVector::InN(v) => v.display_with(|k| k.display(q).to_string()).to_string(),
            RepVector::DirectSum(v) => v
                .display_with(|k| match k {
                    FNKey::F(p) => p.display(q).to_string(),
                    FNKey::N(p) => p.display(q).to_string(),
                })
                .to_string(),
            RepVector::InLeftIdeal(x, _) => x.display(q).to_string(),
        }
    }
}

/// Acts on any [`RepVector`]; twists apply to the `F` summand.
pub fn act_rep(
    lpa: &Lpa,
    twist: Option<&ScalingVector>,
    u: &Element,
    v: &RepVector,
) -> Result<RepVector, ReprError> {
    let q = lpa.quiver_arc();
    let f = match twist {
        Some(a) => FModule::twisted(Arc::clone(&q), lpa.field(), a.clone()),
        None => FModule::new(Arc::clone(&q), lpa.field()),
    };
    Ok(match v {
        RepVector::InF(x) => RepVector::InF(f.act(u, x)?),
        RepVector::InN(x) => RepVector::InN(NModule::new(q, lpa.field()).act(u, x)?),
        RepVector::DirectSum(x) => {
            let m = FNModule {
                f,
                n: NModule::new(q, lpa.field()),
            };
            RepVector::DirectSum(m.act(u, x)?)
        }
        RepVector::InLeftIdeal(x, i) => {
            let ideal = LeftIdeal::new(lpa.clone(), *i);
            let y = lpa.reduce(&lpa.mul(u, x)?);
            ideal.vector(&y)?;
            RepVector::InLeftIdeal(y, *i)
        }
    })
}

/// Index of an irreducible summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Class(TailClass),
    Sink(VertexId),
}

pub fn split_f(v: &FVector) -> BTreeMap<TailClass, FVector> {
    let mut out: BTreeMap<TailClass, FVector> = BTreeMap::new();
    for (k, c) in v.terms() {
        out.entry(k.tail_class())
            .or_insert_with(|| SparseVector::zero(v.field()))
            .add_term(k.clone(), c.clone());
    }
    out
}

pub fn split_n(v: &NVector) -> BTreeMap<VertexId, NVector> {
    let mut out: BTreeMap<VertexId, NVector> = BTreeMap::new();
    for (k, c) in v.terms() {
        out.entry(k.target())
            .or_insert_with(|| SparseVector::zero(v.field()))
            .add_term(k.clone(), c.clone());
    }
    out
}

pub fn split_components(v: &FNVector) -> BTreeMap<Component, FNVector> {
    let mut out: BTreeMap<Component, FNVector> = BTreeMap::new();
    for (k, c) in v.terms() {
        let comp = match k {
            FNKey::F(p) => Component::Class(p.tail_class()),
            FNKey::N(p) => Component::Sink(p.target()),
        };
        out.entry(comp)
            .or_insert_with(|| SparseVector::zero(v.field()))
            .add_term(k.clone(), c.clone());
    }
    out
}

/// An element `a` and scalar `lambda` with `a . u = lambda target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub element: Element,
    pub lambda: Scalar,
}

/// Moves a nonzero vector of `F_[p]` onto a chosen basis path.
///
/// With `n` least such that the heads `tau_<=n` of the support are distinct
/// and `p1` the first support path, `tau_<=n(p1)` isolates `lambda p0` where
/// `p0 = tau_>n(p1)`; then `(tau_<=r(target))^* tau_<=s(p0)` carries `p0` to
/// the target once `tau_>r(target) = tau_>s(p0)`.
pub fn generation_certificate_f(
    lpa: &Lpa,
    u: &FVector,
    target: &EvInfPath,
) -> Result<Certificate, ReprError> {
    let q = lpa.quiver();
    let (p1, lambda) = u.terms().next().ok_or(ReprError::EmptySupport)?;
    let class = target.tail_class();
    if let Some(bad) = u.keys().find(|k| k.tail_class() != class) {
        return Err(ReprError::ClassMismatch(bad.display(q).to_string()));
    }
    let keys: Vec<&EvInfPath> = u.keys().collect();
    let reach = keys.iter().map(|k| k.prefix().len()).max().unwrap_or(0) + 2 * class.arrows().len();
    let n = (0..=reach)
        .find(|&n| {
            let mut heads: Vec<Vec<_>> = keys.iter().map(|k| k.unroll(n)).collect();
            heads.sort();
            heads.windows(2).all(|w| w[0] != w[1])
        })
        .expect("distinct eventually periodic paths differ early");
    let p0 = p1.truncate_gt(q, n);
    let (r, s) = align(q, target, &p0).expect("same tail class");
    let star = target.truncate_le(q, r);
    let path = p1.truncate_le(q, n + s);
    let element = lpa.monomial(Monomial::new(star, path)?);
    let cert = Certificate {
        element,
        lambda: lambda.clone(),
    };
    let f = FModule::new(lpa.quiver_arc(), lpa.field());
    let check = f.act(&cert.element, u)?;
    assert_eq!(
        check,
        SparseVector::from_terms(lpa.field(), [(cert.lambda.clone(), target.clone())]),
        "certificate failed to verify"
    );
    Ok(cert)
}

/// Least `r`, then least `s`, with `tau_>r(x) = tau_>s(y)`.
fn align(q: &Quiver, x: &EvInfPath, y: &EvInfPath) -> Option<(usize, usize)> {
    let k = x.cycle().len();
    for r in 0..=x.prefix().len() + k {
        let tx = x.truncate_gt(q, r);
        for s in 0..=y.prefix().len() + k {
            if y.truncate_gt(q, s) == tx {
                return Some((r, s));
            }
        }
    }
    None
}

/// Moves a nonzero vector of `N_i` onto a chosen sink path: the longest
/// support path `p1` (least among ties) kills all other terms.
pub fn generation_certificate_n(
    lpa: &Lpa,
    u: &NVector,
    target: &FinitePath,
) -> Result<Certificate, ReprError> {
    let q = lpa.quiver();
    let nmod = NModule::new(lpa.quiver_arc(), lpa.field());
    nmod.check_key(target)?;
    if u.is_empty() {
        return Err(ReprError::EmptySupport);
    }
    if let Some(bad) = u.keys().find(|k| k.target() != target.target()) {
        return Err(ReprError::SinkMismatch(bad.display(q).to_string()));
    }
    let longest = u.keys().map(FinitePath::len).max().expect("nonempty");
    let p1 = u
        .keys()
        .find(|k| k.len() == longest)
        .expect("nonempty")
        .clone();
    let lambda = u.coefficient(&p1).expect("support").clone();
    let element = lpa.monomial(Monomial::new(target.clone(), p1)?);
    let check = nmod.act(&element, u)?;
    assert_eq!(
        check,
        SparseVector::from_terms(lpa.field(), [(lambda.clone(), target.clone())]),
        "certificate failed to verify"
    );
    Ok(Certificate { element, lambda })
}

/// Outcome of [`hom_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCheck {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl HomCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `map(g . w) = g . map(w)` for every generator `g` and window
/// element `w`. `map` must be defined on the window and on its images under
/// the generators; a missing image is reported as `WindowNotClosed`.
pub fn hom_check<M1, M2, F>(
    src: &M1,
    dst: &M2,
    map: F,
    window: &[M1::Key],
    exec: Exec,
) -> Result<HomCheck, ReprError>
where
    M1: Module,
    M2: Module,
    F: Fn(&M1::Key) -> Option<SparseVector<M2::Key>> + Sync + Send,
{
    let gens = Generator::all(src.quiver());
    let apply = |v: &SparseVector<M1::Key>| -> Result<SparseVector<M2::Key>, ReprError> {
        let mut out = SparseVector::zero(dst.field());
        for (k, c) in v.terms() {
            let image = map(k).ok_or_else(|| ReprError::WindowNotClosed(src.show_key(k)))?;
            out.add_scaled(&image, c);
        }
        Ok(out)
    };
    let per_key = exec.map(window, |w| -> Result<Vec<String>, ReprError> {
        let base = apply(&SparseVector::basis(src.field(), w.clone()))?;
        let mut bad = Vec::new();
        for &g in &gens {
            let lhs = apply(&src.act_generator_key(g, w))?;
            let rhs = dst.act_generator(g, &base);
            if lhs != rhs {
                bad.push(format!("{} on {}", g.name(src.quiver()), src.show_key(w)));
            }
        }
        Ok(bad)
    });
    let mut failures = Vec::new();
    for r in per_key {
        failures.extend(r?);
    }
    Ok(HomCheck {
        checks: window.len() * gens.len(),
        failures,
    })
}

/// Relations (0) to (4) as operators on the span of `window`.
pub fn relation_check<M: Module>(m: &M, window: &[M::Key], exec: Exec) -> Vec<RelationReport> {
    let rels = relations(m.quiver());
    let outcomes = exec.flat_map(window, |w| {
        let v = SparseVector::basis(m.field(), w.clone());
        rels.iter()
            .map(|r| {
                let side = |words: &[Vec<Generator>]| {
                    let mut out = SparseVector::zero(m.field());
                    for word in words {
                        out.add_scaled(&m.act_word(word, &v), &m.field().one());
                    }
                    out
                };
                let ok = side(&r.lhs) == side(&r.rhs);
                (r.family, ok, format!("{} on {}", r.label, m.show_key(w)))
            })
            .collect()
    });
    RelationReport::collect(outcomes)
}

/// Basis window of `F` over every class whose primitive cycle has length at
/// most `bound`, with prefixes of length at most `bound`.
pub fn f_window(q: &Quiver, bound: usize) -> Vec<EvInfPath> {
    crate::path::tail_classes(q, bound)
        .iter()
        .flat_map(|c| enumerate_class(q, c, bound))
        .collect()
}

/// Basis window of `N`: paths of length at most `bound` into every sink.
pub fn n_window(q: &Quiver, bound: usize) -> Vec<FinitePath> {
    q.sinks()
        .into_iter()
        .flat_map(|s| enumerate_sink_paths(q, s, bound).expect("sink"))
        .collect()
}

/// `a_q` for the canonical cycle of `class`, cross-checked against the
/// twisted action of `iota(q)` on `q^inf`.
pub fn twist_eigenvalue(lpa: &Lpa, a: &ScalingVector, class: &TailClass) -> Scalar {
    let q = lpa.quiver();
    let cycle = class.cycle_path(q);
    let mu = a.weight(&cycle);
    let f = FModule::twisted(lpa.quiver_arc(), lpa.field(), a.clone());
    let rep = class.representative(q);
    let image = f
        .act(
            &lpa.iota(&cycle),
            &SparseVector::basis(lpa.field(), rep.clone()),
        )
        .expect("same field");
    assert_eq!(
        image,
        SparseVector::from_terms(lpa.field(), [(mu.clone(), rep)])
    );
    mu
}

/// Result of comparing two twists of `F_[q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistIso {
    /// `p -> theta(p) p` from `F^b` to `F^a`, tabulated on the window.
    Iso {
        theta: BTreeMap<EvInfPath, Scalar>,
        check: HomCheck,
    },
    Distinguisher {
        a_q: Scalar,
        b_q: Scalar,
    },
}

/// `theta(p) = ((a b^-1)_{tau_<=n0(p)})^-1` with `n0` least such that
/// `tau_>n0(p)` is the class representative.
pub fn twist_theta(q: &Quiver, c: &ScalingVector, class: &TailClass, p: &EvInfPath) -> Scalar {
    let rep = class.representative(q);
    let n0 = (0..=p.prefix().len() + class.arrows().len())
        .find(|&n| p.truncate_gt(q, n) == rep)
        .expect("path lies in the class");
    c.weight(&p.truncate_le(q, n0)).inv().expect("units")
}

pub fn twist_iso(
    lpa: &Lpa,
    a: &ScalingVector,
    b: &ScalingVector,
    class: &TailClass,
    window: usize,
    exec: Exec,
) -> Result<TwistIso, ReprError> {
    let q = lpa.quiver();
    let c = a.product(&b.inverse());
    if !c.weight(&class.cycle_path(q)).is_one() {
        return Ok(TwistIso::Distinguisher {
            a_q: twist_eigenvalue(lpa, a, class),
            b_q: twist_eigenvalue(lpa, b, class),
        });
    }
    let basis = enumerate_class(q, class, window);
    let theta: BTreeMap<EvInfPath, Scalar> = basis
        .iter()
        .map(|p| (p.clone(), twist_theta(q, &c, class, p)))
        .collect();
    let fb = FModule::twisted(lpa.quiver_arc(), lpa.field(), b.clone());
    let fa = FModule::twisted(lpa.quiver_arc(), lpa.field(), a.clone());
    let check = hom_check(
        &fb,
        &fa,
        |p| {
            (p.tail_class() == *class).then(|| {
                SparseVector::from_terms(lpa.field(), [(twist_theta(q, &c, class, p), p.clone())])
            })
        },
        &basis,
        exec,
    )?;
    Ok(TwistIso::Iso { theta, check })
}

/// The isomorphism `N_{i0} -> L e_i`, `p -> p^* q`, for a finite line point
/// `i` with end `i0` and `q` the path from `i` to `i0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinePointIso {
    pub vertex: VertexId,
    pub end: VertexId,
    pub path: FinitePath,
    pub images: Vec<(FinitePath, Element)>,
    pub check: HomCheck,
    /// `q q^* = e_{i0}` after reduction.
    pub right_inverse: bool,
    /// `q^* q = e_i` after reduction.
    pub left_inverse: bool,
    /// Whether the window is the whole basis of `N_{i0}`.
    pub full_basis: bool,
}

pub fn line_point_iso(
    lpa: &Lpa,
    i: VertexId,
    bound: usize,
    exec: Exec,
) -> Result<LinePointIso, ReprError> {
    let q = lpa.quiver();
    let end = q
        .line_point_end(i)
        .ok_or_else(|| ReprError::NotALinePoint(q.vertex_name(i).to_string()))?;
    let path = q.shortest_path(i, end).expect("line point reaches its end");
    let full_basis = crate::path::sink_module_is_finite(q, end);
    let bound = if full_basis { q.vertex_count() } else { bound };
    let basis = enumerate_sink_paths(q, end, bound)?;
    let qe = lpa.iota(&path);
    let image = |p: &FinitePath| lpa.reduce(&(&lpa.ghost_path(p) * &qe));
    let images: Vec<(FinitePath, Element)> = basis.iter().map(|p| (p.clone(), image(p))).collect();
    let nmod = NModule::new(lpa.quiver_arc(), lpa.field());
    let ideal = LeftIdeal::new(lpa.clone(), i);
    let check = hom_check(
        &nmod,
        &ideal,
        |p| Some(element_to_vector(&image(p))),
        &basis,
        exec,
    )?;
    let qs = lpa.ghost_path(&path);
    let right_inverse = lpa.equals(&(&qe * &qs), &lpa.vertex(end));
    let left_inverse = lpa.equals(&(&qs * &qe), &lpa.vertex(i));
    Ok(LinePointIso {
        vertex: i,
        end,
        path,
        images,
        check,
        right_inverse,
        left_inverse,
        full_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator::*;
    use crate::quiver::standard::*;

    fn setup(q: Quiver) -> (Lpa, Arc<Quiver>) {
        let q = Arc::new(q);
        (Lpa::new(Arc::clone(&q), Field::Rationals), q)
    }

    fn path(q: &Quiver, names: &[&str], start: &str) -> FinitePath {
        let arrows = names.iter().map(|n| q.arrow(n).unwrap()).collect();
        FinitePath::from_arrows(q, q.vertex(start).unwrap(), arrows).unwrap()
    }

    fn inf(q: &Quiver, prefix: &[&str], cycle: &[&str], start: &str) -> EvInfPath {
        let w = path(q, prefix, start);
        let c = path(q, cycle, q.vertex_name(w.target()));
        EvInfPath::new(q, w, c).unwrap()
    }

    #[test]
    fn f_actions() {
        let (l, q) = setup(rose(1));
        let f = FModule::new(Arc::clone(&q), l.field());
        let xinf = inf(&q, &[], &["x"], "v");
        let x = q.arrow("x").unwrap();
        let v = SparseVector::basis(l.field(), xinf.clone());
        assert_eq!(f.act_generator(Arrow(x), &v), v);
        let twisted = FModule::twisted(
            Arc::clone(&q),
            l.field(),
            ScalingVector::new(&q, vec![l.scalar(2)]).unwrap(),
        );
        assert_eq!(twisted.act_generator(Arrow(x), &v), v.scale(&l.scalar(2)));

        let (l2, q2) = setup(rose(2));
        let f2 = FModule::new(Arc::clone(&q2), l2.field());
        let ba = SparseVector::basis(l2.field(), inf(&q2, &[], &["b", "a"], "v"));
        assert!(f2
            .act_generator(Arrow(q2.arrow("a").unwrap()), &ba)
            .is_empty());
        assert_eq!(
            f2.act_generator(Arrow(q2.arrow("b").unwrap()), &ba),
            SparseVector::basis(l2.field(), inf(&q2, &[], &["a", "b"], "v"))
        );
    }

    #[test]
    fn n_actions() {
        let (l, q) = setup(line(2));
        let n = NModule::new(Arc::clone(&q), l.field());
        let a = q.arrow("a").unwrap();
        let e2 = SparseVector::basis(l.field(), FinitePath::trivial(q.vertex("2").unwrap()));
        let pa = SparseVector::basis(l.field(), path(&q, &["a"], "1"));
        assert_eq!(n.act_generator(Ghost(a), &e2), pa);
        assert_eq!(n.act_generator(Arrow(a), &pa), e2);
        assert!(n
            .act_generator(Vertex(q.vertex("1").unwrap()), &e2)
            .is_empty());
    }

    #[test]
    fn direct_monomial_action_matches_generator_words() {
        for q in all() {
            let (l, q) = setup(q);
            let f = FModule::new(Arc::clone(&q), l.field());
            let n = NModule::new(Arc::clone(&q), l.field());
            let fw = f_window(&q, 3);
            let nw = n_window(&q, 3);
            for m in l.reduced_monomials(2) {
                for k in &fw {
                    let v = SparseVector::basis(l.field(), k.clone());
                    assert_eq!(
                        f.act_monomial_key(&m, k),
                        f.act_word(&m.generator_word(), &v)
                    );
                }
                for k in &nw {
                    let v = SparseVector::basis(l.field(), k.clone());
                    assert_eq!(
                        n.act_monomial_key(&m, k),
                        n.act_word(&m.generator_word(), &v)
                    );
                }
            }
        }
    }

    #[test]
    fn relations_hold_on_windows() {
        for q in all() {
            let (l, q) = setup(q);
            let f = FModule::new(Arc::clone(&q), l.field());
            let n = NModule::new(Arc::clone(&q), l.field());
            for r in relation_check(&f, &f_window(&q, 3), Exec::Sequential) {
                assert!(r.holds(), "{} F: {:?}", q.name(), r.failures);
            }
            for r in relation_check(&n, &n_window(&q, 3), Exec::Parallel) {
                assert!(r.holds(), "{} N: {:?}", q.name(), r.failures);
            }
        }
    }

    #[test]
    fn left_ideal_actions() {
        let (l, q) = setup(toeplitz());
        let one = q.vertex("1").unwrap();
        let ideal = LeftIdeal::new(l.clone(), one);
        let x = q.arrow("x").unwrap();
        let xv = ideal.vector(&l.generator(Arrow(x))).unwrap();
        let got = vector_to_element(&ideal.act_generator(Ghost(x), &xv));
        let f = q.arrow("f").unwrap();
        let expect = &l.vertex(one) - &(&l.generator(Ghost(f)) * &l.generator(Arrow(f)));
        assert_eq!(got, l.reduce(&expect));
        assert!(ideal.vector(&l.vertex(q.vertex("2").unwrap())).is_err());

        let (l3, q3) = setup(line(3));
        let e1 = q3.vertex("1").unwrap();
        let ba = l3.iota(&path(&q3, &["a", "b"], "1"));
        let r = act_rep(&l3, None, &ba, &RepVector::InLeftIdeal(l3.vertex(e1), e1)).unwrap();
        assert_eq!(r.display(&q3), "b.a");
    }

    #[test]
    fn components() {
        let (l, q) = setup(rose(2));
        let mut v = SparseVector::zero(l.field());
        v.add_term(FNKey::F(inf(&q, &[], &["a"], "v")), l.scalar(1));
        v.add_term(FNKey::F(inf(&q, &["a"], &["b"], "v")), l.scalar(3));
        let parts = split_components(&v);
        assert_eq!(parts.len(), 2);
        let mut total = SparseVector::zero(l.field());
        for p in parts.values() {
            total = total.checked_add(p).unwrap();
        }
        assert_eq!(total, v);
        assert!(split_components(&SparseVector::zero(l.field())).is_empty());
    }

    #[test]
    fn f_certificates() {
        let (l, q) = setup(rose(2));
        let ainf = inf(&q, &[], &["a"], "v");
        let ainf_b = inf(&q, &["b"], &["a"], "v");
        let single = SparseVector::from_terms(l.field(), [(l.scalar(3), ainf.clone())]);
        let c = generation_certificate_f(&l, &single, &ainf).unwrap();
        assert_eq!(c.element, l.vertex(VertexId(0)));
        assert_eq!(c.lambda, l.scalar(3));

        let u = SparseVector::from_terms(
            l.field(),
            [(l.scalar(1), ainf.clone()), (l.scalar(1), ainf_b.clone())],
        );
        let c = generation_certificate_f(&l, &u, &ainf).unwrap();
        assert_eq!(c.element.display(&q).to_string(), "a");
        assert_eq!(c.lambda, l.scalar(1));

        let c =
            generation_certificate_f(&l, &SparseVector::basis(l.field(), ainf.clone()), &ainf_b)
                .unwrap();
        assert_eq!(c.element.display(&q).to_string(), "b^*");

        let binf = SparseVector::basis(l.field(), inf(&q, &[], &["b"], "v"));
        assert!(matches!(
            generation_certificate_f(&l, &binf, &ainf),
            Err(ReprError::ClassMismatch(_))
        ));
        assert_eq!(
            generation_certificate_f(&l, &SparseVector::zero(l.field()), &ainf),
            Err(ReprError::EmptySupport)
        );
    }

    #[test]
    fn n_certificates() {
        let (l, q) = setup(toeplitz());
        let e2 = FinitePath::trivial(q.vertex("2").unwrap());
        let f = path(&q, &["f"], "1");
        let fx = path(&q, &["x", "f"], "1");
        let u = SparseVector::from_terms(l.field(), [(l.scalar(1), f), (l.scalar(1), fx.clone())]);
        let c = generation_certificate_n(&l, &u, &e2).unwrap();
        assert_eq!(c.element.display(&q).to_string(), "f.x");
        let c = generation_certificate_n(&l, &SparseVector::basis(l.field(), e2), &fx).unwrap();
        assert_eq!(c.element.display(&q).to_string(), "(f.x)^*");
    }

    #[test]
    fn homomorphism_checks() {
        let (l, q) = setup(line(2));
        let n = NModule::new(Arc::clone(&q), l.field());
        let window = n_window(&q, 3);
        let id = hom_check(
            &n,
            &n,
            |p| Some(SparseVector::basis(l.field(), p.clone())),
            &window,
            Exec::Sequential,
        )
        .unwrap();
        assert!(id.holds());
        let e2 = FinitePath::trivial(q.vertex("2").unwrap());
        let wrong = hom_check(
            &n,
            &n,
            |p| {
                let c = if *p == e2 { l.scalar(2) } else { l.scalar(1) };
                Some(SparseVector::from_terms(l.field(), [(c, p.clone())]))
            },
            &window,
            Exec::Sequential,
        )
        .unwrap();
        assert!(!wrong.holds());
        let partial = hom_check(
            &n,
            &n,
            |p| (p.is_trivial()).then(|| SparseVector::basis(l.field(), p.clone())),
            &[e2],
            Exec::Sequential,
        );
        assert!(matches!(partial, Err(ReprError::WindowNotClosed(_))));
    }

    #[test]
    fn twist_eigenvalues_and_isos() {
        let (l, q) = setup(rose(2));
        let s = |n| l.scalar(n);
        let ab = TailClass::of(&q, &path(&q, &["a", "b"], "v")).unwrap();
        let a = ScalingVector::new(&q, vec![s(2), s(3)]).unwrap();
        assert_eq!(twist_eigenvalue(&l, &a, &ab), s(6));
        assert_eq!(
            twist_eigenvalue(&l, &ScalingVector::ones(&q, l.field()), &ab),
            s(1)
        );

        let ca = TailClass::of(&q, &path(&q, &["a"], "v")).unwrap();
        let a = ScalingVector::new(&q, vec![s(1), s(5)]).unwrap();
        let ones = ScalingVector::ones(&q, l.field());
        match twist_iso(&l, &a, &ones, &ca, 3, Exec::Sequential).unwrap() {
            TwistIso::Iso { theta, check } => {
                assert!(check.holds(), "{:?}", check.failures);
                let ainf_b = inf(&q, &["b"], &["a"], "v");
                assert_eq!(theta[&ainf_b], Field::Rationals.from_ratio(1, 5).unwrap());
            }
            other => panic!("{other:?}"),
        }

        let (l1, q1) = setup(rose(1));
        let x = TailClass::of(&q1, &path(&q1, &["x"], "v")).unwrap();
        let a = ScalingVector::new(&q1, vec![l1.scalar(2)]).unwrap();
        let b = ScalingVector::new(&q1, vec![l1.scalar(3)]).unwrap();
        assert_eq!(
            twist_iso(&l1, &a, &b, &x, 3, Exec::Sequential).unwrap(),
            TwistIso::Distinguisher {
                a_q: l1.scalar(2),
                b_q: l1.scalar(3)
            }
        );
    }

    #[test]
    fn line_point_isomorphisms() {
        let (l, q) = setup(line(3));
        let iso = line_point_iso(&l, q.vertex("1").unwrap(), 6, Exec::Sequential).unwrap();
        assert!(iso.check.holds() && iso.full_basis);
        assert!(iso.left_inverse && iso.right_inverse);
        let e3 = FinitePath::trivial(q.vertex("3").unwrap());
        let img = &iso.images.iter().find(|(p, _)| *p == e3).unwrap().1;
        assert_eq!(img.display(&q).to_string(), "b.a");

        let sink = line_point_iso(&l, q.vertex("3").unwrap(), 6, Exec::Sequential).unwrap();
        let b = path(&q, &["b"], "2");
        let img = &sink.images.iter().find(|(p, _)| *p == b).unwrap().1;
        assert_eq!(img.display(&q).to_string(), "b^*");

        let (l1, _) = setup(rose(1));
        assert!(matches!(
            line_point_iso(&l1, VertexId(0), 3, Exec::Sequential),
            Err(ReprError::NotALinePoint(_))
        ));
    }
}
