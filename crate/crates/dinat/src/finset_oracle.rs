//! Finite-set semantics used to test dinaturality by brute force.
//!
//! A set of size `k` has elements `0..k`. A product is encoded
//! lexicographically with the first factor most significant. A function
//! `h: A → B` is encoded by its table `[h(0), .., h(|A|-1)]` read as a number
//! in base `|B|`, again most significant first.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dinat::{decompose, Tag, Transformation};
use crate::petri::{Label, LabelledMarking};
use crate::signature::{pushout_types, CospanType, Pushout, Signature, SignatureError, Variance, VarianceList};

pub const DEFAULT_MAX_SIZE: usize = 3;
pub const DEFAULT_HEXAGON_BUDGET: u64 = 2_000_000;
const MAX_SET_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("expression uses {got} argument slots, {want} supplied")]
    ArityMismatch { got: usize, want: usize },
    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),
    #[error("index {index} is outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("brute force needs {needed} hexagons, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("a set would have more than {MAX_SET_SIZE} elements")]
    SetTooLarge,
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no component table for objects {0:?}")]
    MissingTable(Vec<usize>),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinSetMap {
    pub dom: usize,
    pub cod: usize,
    pub table: Vec<usize>,
}

impl FinSetMap {
    pub fn new(dom: usize, cod: usize, table: Vec<usize>) -> Result<Self, OracleError> {
        let m = FinSetMap { dom, cod, table };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.table.len() != self.dom {
            return Err(OracleError::InvalidMap(format!(
                "table has {} entries for a domain of {}",
                self.table.len(),
                self.dom
            )));
        }
        if let Some(&x) = self.table.iter().find(|&&x| x >= self.cod) {
            return Err(OracleError::InvalidMap(format!("entry {x} outside codomain of size {}", self.cod)));
        }
        Ok(())
    }

    pub fn identity(k: usize) -> Self {
        FinSetMap {
            dom: k,
            cod: k,
            table: (0..k).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FinSetMap) -> Result<FinSetMap, OracleError> {
        if self.cod != next.dom {
            return Err(OracleError::ShapeMismatch(format!(
                "cannot follow a map into {} elements by one from {}",
                self.cod, next.dom
            )));
        }
        Ok(FinSetMap {
            dom: self.dom,
            cod: next.cod,
            table: self.table.iter().map(|&x| next.table[x]).collect(),
        })
    }

    /// Position of this map in the table-order encoding of `Hom(dom, cod)`.
    pub fn encode(&self) -> usize {
        self.table.iter().fold(0, |acc, &x| acc * self.cod + x)
    }

    pub fn decode(index: usize, dom: usize, cod: usize) -> FinSetMap {
        let mut table = vec![0; dom];
        let mut rest = index;
        for slot in table.iter_mut().rev() {
            *slot = rest % cod;
            rest /= cod;
        }
        FinSetMap { dom, cod, table }
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize, OracleError> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).filter(|&v| v <= MAX_SET_SIZE).ok_or(OracleError::SetTooLarge)?;
    }
    Ok(acc)
}

/// `|cod|^|dom|`, the size of the function set.
pub fn hom_size(dom: usize, cod: usize) -> Result<usize, OracleError> {
    checked_pow(cod, dom)
}

/// All maps `a → b` in table order.
pub fn all_maps(a: usize, b: usize) -> Result<impl Iterator<Item = FinSetMap>, OracleError> {
    let n = hom_size(a, b)?;
    Ok((0..n).map(move |k| FinSetMap::decode(k, a, b)))
}

fn encode_digits(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

fn decode_digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = index % r;
        index /= r;
    }
    digits
}

fn product_map(parts: &[FinSetMap]) -> Result<FinSetMap, OracleError> {
    let doms: Vec<usize> = parts.iter().map(|m| m.dom).collect();
    let cods: Vec<usize> = parts.iter().map(|m| m.cod).collect();
    let dom = doms
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d).filter(|&v| v <= MAX_SET_SIZE))
        .ok_or(OracleError::SetTooLarge)?;
    let cod = cods
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d).filter(|&v| v <= MAX_SET_SIZE))
        .ok_or(OracleError::SetTooLarge)?;
    let table = (0..dom)
        .map(|x| {
            let ds: Vec<usize> = decode_digits(x, &doms).iter().zip(parts).map(|(&d, m)| m.table[d]).collect();
            encode_digits(&ds, &cods)
        })
        .collect();
    Ok(FinSetMap { dom, cod, table })
}

/// `h ↦ post ∘ h ∘ pre`.
fn hom_map(pre: &FinSetMap, post: &FinSetMap) -> Result<FinSetMap, OracleError> {
    let dom = hom_size(pre.cod, post.dom)?;
    let cod = hom_size(pre.dom, post.cod)?;
    let table = (0..dom)
        .map(|k| {
            let h = FinSetMap::decode(k, pre.cod, post.dom);
            let g = FinSetMap {
                dom: pre.dom,
                cod: post.cod,
                table: pre.table.iter().map(|&x| post.table[h.table[x]]).collect(),
            };
            g.encode()
        })
        .collect();
    Ok(FinSetMap { dom, cod, table })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctorExpr {
    /// Argument slot (1-based) with its declared variance.
    Arg {
        slot: usize,
        variance: Variance,
    },
    Const(usize),
    Prod(Vec<FunctorExpr>),
    /// Function set; contravariant in the first child.
    Hom(Box<FunctorExpr>, Box<FunctorExpr>),
}

impl FunctorExpr {
    pub fn arg(slot: usize, variance: Variance) -> Self {
        FunctorExpr::Arg { slot, variance }
    }

    pub fn hom(a: FunctorExpr, b: FunctorExpr) -> Self {
        FunctorExpr::Hom(Box::new(a), Box::new(b))
    }

    fn collect_slots(&self, polarity: Variance, out: &mut Vec<(usize, Variance, Variance)>) {
        match self {
            FunctorExpr::Arg { slot, variance } => out.push((*slot, *variance, polarity)),
            FunctorExpr::Const(_) => {}
            FunctorExpr::Prod(es) => es.iter().for_each(|e| e.collect_slots(polarity, out)),
            FunctorExpr::Hom(a, b) => {
                a.collect_slots(polarity.flip(), out);
                b.collect_slots(polarity, out);
            }
        }
    }

    /// The variance list, checking that slots `1..=k` each occur once with
    /// the variance their position gives them.
    pub fn variances(&self) -> Result<VarianceList, OracleError> {
        let mut slots = Vec::new();
        self.collect_slots(Variance::Co, &mut slots);
        let k = slots.len();
        let mut out: Vec<Option<Variance>> = vec![None; k];
        for (slot, declared, actual) in slots {
            if slot == 0 || slot > k {
                return Err(OracleError::IndexOutOfRange { index: slot, len: k });
            }
            if declared != actual {
                return Err(OracleError::VarianceMismatch(format!(
                    "slot {slot} is declared {declared} but occurs as {actual}"
                )));
            }
            if out[slot - 1].replace(actual).is_some() {
                return Err(OracleError::VarianceMismatch(format!("slot {slot} occurs twice")));
            }
        }
        Ok(out.into_iter().map(|v| v.unwrap()).collect())
    }

    pub fn arity(&self) -> usize {
        let mut slots = Vec::new();
        self.collect_slots(Variance::Co, &mut slots);
        slots.len()
    }

    /// Renumbers slots by adding `by`.
    pub fn shifted(&self, by: usize) -> FunctorExpr {
        match self {
            FunctorExpr::Arg { slot, variance } => FunctorExpr::Arg {
                slot: slot + by,
                variance: *variance,
            },
            FunctorExpr::Const(k) => FunctorExpr::Const(*k),
            FunctorExpr::Prod(es) => FunctorExpr::Prod(es.iter().map(|e| e.shifted(by)).collect()),
            FunctorExpr::Hom(a, b) => FunctorExpr::hom(a.shifted(by), b.shifted(by)),
        }
    }

    /// Inlines nested products and drops unary ones; the set encoding does
    /// not see the difference.
    pub fn flattened(&self) -> FunctorExpr {
        match self {
            FunctorExpr::Prod(es) => {
                let mut flat = Vec::new();
                for e in es {
                    match e.flattened() {
                        FunctorExpr::Prod(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    FunctorExpr::Prod(flat)
                }
            }
            FunctorExpr::Hom(a, b) => FunctorExpr::hom(a.flattened(), b.flattened()),
            other => other.clone(),
        }
    }
}

/// Size of `F(args)`.
pub fn eval_functor(e: &FunctorExpr, args: &[usize]) -> Result<usize, OracleError> {
    if e.arity() != args.len() {
        return Err(OracleError::ArityMismatch {
            got: e.arity(),
            want: args.len(),
        });
    }
    eval_sizes(e, args)
}

fn eval_sizes(e: &FunctorExpr, args: &[usize]) -> Result<usize, OracleError> {
    match e {
        FunctorExpr::Arg { slot, .. } => Ok(args[slot - 1]),
        FunctorExpr::Const(k) => Ok(*k),
        FunctorExpr::Prod(es) => es.iter().try_fold(1usize, |acc, e| {
            let k = eval_sizes(e, args)?;
            acc.checked_mul(k).filter(|&v| v <= MAX_SET_SIZE).ok_or(OracleError::SetTooLarge)
        }),
        FunctorExpr::Hom(a, b) => hom_size(eval_sizes(a, args)?, eval_sizes(b, args)?),
    }
}

/// `F(x)` for arrows `x_j: X_j → Y_j`, one per slot. The result goes from
/// `F(S)` to `F(T)` where `S_j = X_j` on covariant slots and `Y_j` on
/// contravariant ones, and `T` the other way round.
pub fn functor_map(e: &FunctorExpr, arrows: &[FinSetMap]) -> Result<FinSetMap, OracleError> {
    if e.arity() != arrows.len() {
        return Err(OracleError::ArityMismatch {
            got: e.arity(),
            want: arrows.len(),
        });
    }
    e.variances()?;
    act(e, Variance::Co, arrows)
}

// At covariant polarity a subexpression maps e(S) → e(T), at contravariant
// polarity e(T) → e(S); either way an argument slot contributes its arrow.
fn act(e: &FunctorExpr, polarity: Variance, arrows: &[FinSetMap]) -> Result<FinSetMap, OracleError> {
    match e {
        FunctorExpr::Arg { slot, .. } => Ok(arrows[slot - 1].clone()),
        FunctorExpr::Const(k) => Ok(FinSetMap::identity(*k)),
        FunctorExpr::Prod(es) => {
            let parts = es.iter().map(|e| act(e, polarity, arrows)).collect::<Result<Vec<_>, _>>()?;
            product_map(&parts)
        }
        FunctorExpr::Hom(a, b) => hom_map(&act(a, polarity.flip(), arrows)?, &act(b, polarity, arrows)?),
    }
}

/// `A[X/i]`
pub fn substitute_tuple<T: Clone>(a: &[T], x: T, i: usize) -> Result<Vec<T>, OracleError> {
    if i == 0 || i > a.len() {
        return Err(OracleError::IndexOutOfRange { index: i, len: a.len() });
    }
    let mut out = a.to_vec();
    out[i - 1] = x;
    Ok(out)
}

/// `A[X,Y/i]σ`: the tuple `(A_σ(1), .., A_σ(k))` with `X` on the
/// contravariant slots sent to `i` and `Y` on the covariant ones.
pub fn substitute_mixed<T: Clone>(a: &[T], x: T, y: T, i: usize, sigma: &[usize], variance: &[Variance]) -> Result<Vec<T>, OracleError> {
    if i == 0 || i > a.len() {
        return Err(OracleError::IndexOutOfRange { index: i, len: a.len() });
    }
    if sigma.len() != variance.len() {
        return Err(OracleError::ArityMismatch {
            got: sigma.len(),
            want: variance.len(),
        });
    }
    sigma
        .iter()
        .zip(variance)
        .map(|(&s, &v)| {
            if s == 0 || s > a.len() {
                Err(OracleError::IndexOutOfRange { index: s, len: a.len() })
            } else if s != i {
                Ok(a[s - 1].clone())
            } else if v == Variance::Contra {
                Ok(x.clone())
            } else {
                Ok(y.clone())
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semantics {
    /// `a ↦ (a, a)`
    Diagonal,
    /// `(a, h) ↦ h(a)` into a variable.
    Eval,
    /// `(a, h) ↦ h(a)` into a constant set.
    EvalConst,
    /// `g ↦ gⁿ`
    Church(usize),
    Identity,
    ProductPair(Box<ConcreteTransformation>, Box<ConcreteTransformation>),
    /// The constant map onto one element.
    ConstPoint(usize),
    /// Components keyed by the object sizes of each variable.
    Tables(BTreeMap<Vec<usize>, FinSetMap>),
    Composite(Box<ConcreteTransformation>, Box<ConcreteTransformation>, Pushout),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteTransformation {
    signature: Signature,
    dom: FunctorExpr,
    cod: FunctorExpr,
    semantics: Semantics,
}

fn ty(sigma: Vec<usize>, tau: Vec<usize>, n: usize) -> CospanType {
    CospanType::new(sigma, tau, n).expect("built-in types are valid")
}

impl ConcreteTransformation {
    /// Checks that the expressions carry the signature's variances.
    pub fn new(signature: Signature, dom: FunctorExpr, cod: FunctorExpr, semantics: Semantics) -> Result<Self, OracleError> {
        signature.validate()?;
        for (what, e, want) in [("domain", &dom, &signature.dom), ("codomain", &cod, &signature.cod)] {
            let got = e.variances()?;
            if &got != want {
                return Err(OracleError::VarianceMismatch(format!(
                    "{what} expression has variances {} but the signature says {}",
                    crate::signature::format_variances(&got),
                    crate::signature::format_variances(want)
                )));
            }
        }
        if let Semantics::Tables(tables) = &semantics {
            for key in tables.keys() {
                if key.len() != signature.ty.vars {
                    return Err(OracleError::ShapeMismatch(format!("table key {key:?} has the wrong number of objects")));
                }
            }
        }
        Ok(ConcreteTransformation {
            signature,
            dom,
            cod,
            semantics,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dom_expr(&self) -> &FunctorExpr {
        &self.dom
    }

    pub fn cod_expr(&self) -> &FunctorExpr {
        &self.cod
    }

    pub fn semantics(&self) -> &Semantics {
        &self.semantics
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.signature.name = name.into();
        self
    }

    pub fn diagonal() -> Self {
        use Variance::Co as P;
        let s = Signature::new("delta", vec![P], vec![P, P], ty(vec![1], vec![1, 1], 1)).unwrap();
        let dom = FunctorExpr::arg(1, P);
        let cod = FunctorExpr::Prod(vec![FunctorExpr::arg(1, P), FunctorExpr::arg(2, P)]);
        ConcreteTransformation::new(s, dom, cod, Semantics::Diagonal).unwrap()
    }

    /// `A × (B ⇒ C) → C` with `A`, `B` in variable 1 and `C` in variable 2.
    pub fn eval() -> Self {
        use Variance::{Co as P, Contra as M};
        let s = Signature::new("eval", vec![P, M, P], vec![P], ty(vec![1, 1, 2], vec![2], 2)).unwrap();
        let dom = FunctorExpr::Prod(vec![FunctorExpr::arg(1, P), FunctorExpr::hom(FunctorExpr::arg(2, M), FunctorExpr::arg(3, P))]);
        ConcreteTransformation::new(s, dom, FunctorExpr::arg(1, P), Semantics::Eval).unwrap()
    }

    /// `A × (A ⇒ R) → R` for a fixed set `R`.
    pub fn eval_const(r: usize) -> Self {
        use Variance::{Co as P, Contra as M};
        let s = Signature::new(format!("eval_{r}"), vec![P, M], vec![], ty(vec![1, 1], vec![], 1)).unwrap();
        let dom = FunctorExpr::Prod(vec![FunctorExpr::arg(1, P), FunctorExpr::hom(FunctorExpr::arg(2, M), FunctorExpr::Const(r))]);
        ConcreteTransformation::new(s, dom, FunctorExpr::Const(r), Semantics::EvalConst).unwrap()
    }

    pub fn church(n: usize) -> Self {
        use Variance::{Co as P, Contra as M};
        let s = Signature::new(format!("church{n}"), vec![M, P], vec![M, P], ty(vec![1, 1], vec![1, 1], 1)).unwrap();
        let e = FunctorExpr::hom(FunctorExpr::arg(1, M), FunctorExpr::arg(2, P));
        ConcreteTransformation::new(s, e.clone(), e, Semantics::Church(n)).unwrap()
    }

    pub fn identity_on(expr: FunctorExpr) -> Result<Self, OracleError> {
        let vs = expr.variances()?;
        let k = vs.len();
        // A closed expression still needs one (unused) variable.
        let t = if k == 0 { ty(vec![], vec![], 1) } else { CospanType::identity(k) };
        let s = Signature::new("id", vs.clone(), vs, t)?;
        ConcreteTransformation::new(s, expr.clone(), expr, Semantics::Identity)
    }

    /// Side by side: `φ × ψ` with disjoint variables.
    pub fn product_pair(a: ConcreteTransformation, b: ConcreteTransformation) -> Self {
        let (ka, ca, na) = (a.dom.arity(), a.cod.arity(), a.signature.ty.vars);
        let mut dom_v = a.signature.dom.clone();
        dom_v.extend_from_slice(&b.signature.dom);
        let mut cod_v = a.signature.cod.clone();
        cod_v.extend_from_slice(&b.signature.cod);
        let mut sigma = a.signature.ty.sigma.clone();
        sigma.extend(b.signature.ty.sigma.iter().map(|&x| x + na));
        let mut tau = a.signature.ty.tau.clone();
        tau.extend(b.signature.ty.tau.iter().map(|&x| x + na));
        let vars = na + b.signature.ty.vars;
        let s = Signature::new(format!("{}x{}", a.signature.name, b.signature.name), dom_v, cod_v, ty(sigma, tau, vars)).unwrap();
        let dom = FunctorExpr::Prod(vec![a.dom.clone(), b.dom.shifted(ka)]);
        let cod = FunctorExpr::Prod(vec![a.cod.clone(), b.cod.shifted(ca)]);
        ConcreteTransformation::new(s, dom, cod, Semantics::ProductPair(Box::new(a), Box::new(b))).unwrap()
    }

    /// `1 → K` picking `point`, with one unused variable.
    pub fn const_point(k: usize, point: usize) -> Result<Self, OracleError> {
        if point >= k {
            return Err(OracleError::IndexOutOfRange { index: point + 1, len: k });
        }
        let s = Signature::new(format!("point{point}"), vec![], vec![], ty(vec![], vec![], 1))?;
        ConcreteTransformation::new(s, FunctorExpr::Const(1), FunctorExpr::Const(k), Semantics::ConstPoint(point))
    }

    pub fn from_tables(signature: Signature, dom: FunctorExpr, cod: FunctorExpr, tables: BTreeMap<Vec<usize>, FinSetMap>) -> Result<Self, OracleError> {
        ConcreteTransformation::new(signature, dom, cod, Semantics::Tables(tables))
    }

    /// Explicit tables for every size tuple up to `max_size`, copied from `self`.
    pub fn tabulate(&self, max_size: usize) -> Result<Self, OracleError> {
        let mut tables = BTreeMap::new();
        for objs in tuples(self.signature.ty.vars, max_size) {
            tables.insert(objs.clone(), self.component(&objs)?);
        }
        ConcreteTransformation::from_tables(self.signature.clone(), self.dom.clone(), self.cod.clone(), tables)
    }

    /// The component at the given object sizes, one per variable.
    pub fn component(&self, objs: &[usize]) -> Result<FinSetMap, OracleError> {
        let vars = self.signature.ty.vars;
        if objs.len() != vars {
            return Err(OracleError::ArityMismatch { got: objs.len(), want: vars });
        }
        let at = |map: &[usize]| map.iter().map(|&v| objs[v - 1]).collect::<Vec<_>>();
        let dom = eval_sizes(&self.dom, &at(&self.signature.ty.sigma))?;
        let cod = eval_sizes(&self.cod, &at(&self.signature.ty.tau))?;
        let m = match &self.semantics {
            Semantics::Diagonal => {
                let a = objs[0];
                FinSetMap {
                    dom,
                    cod,
                    table: (0..a).map(|x| x * a + x).collect(),
                }
            }
            Semantics::Eval | Semantics::EvalConst => {
                let a = objs[0];
                let c = if matches!(self.semantics, Semantics::Eval) { objs[1] } else { cod };
                let hs = hom_size(a, c)?;
                let table = (0..dom)
                    .map(|k| {
                        let (x, h) = (k / hs, k % hs);
                        FinSetMap::decode(h, a, c).apply(x)
                    })
                    .collect();
                FinSetMap { dom, cod, table }
            }
            Semantics::Church(n) => {
                let a = objs[0];
                let table = (0..dom)
                    .map(|k| {
                        let g = FinSetMap::decode(k, a, a);
                        let mut acc = FinSetMap::identity(a);
                        for _ in 0..*n {
                            acc = acc.then(&g).unwrap();
                        }
                        acc.encode()
                    })
                    .collect();
                FinSetMap { dom, cod, table }
            }
            Semantics::Identity => FinSetMap::identity(dom),
            Semantics::ProductPair(a, b) => {
                let na = a.signature.ty.vars;
                product_map(&[a.component(&objs[..na])?, b.component(&objs[na..])?])?
            }
            Semantics::ConstPoint(p) => FinSetMap { dom, cod, table: vec![*p] },
            Semantics::Tables(tables) => tables.get(objs).cloned().ok_or_else(|| OracleError::MissingTable(objs.to_vec()))?,
            Semantics::Composite(a, b, p) => {
                let first = a.component(&p.zeta.iter().map(|&x| objs[x - 1]).collect::<Vec<_>>())?;
                let second = b.component(&p.xi.iter().map(|&x| objs[x - 1]).collect::<Vec<_>>())?;
                first.then(&second)?
            }
        };
        if m.dom != dom || m.cod != cod {
            return Err(OracleError::ShapeMismatch(format!(
                "component of {} at {objs:?} is {}→{}, expected {dom}→{cod}",
                self.signature.name, m.dom, m.cod
            )));
        }
        m.validate()?;
        Ok(m)
    }
}

/// All tuples of `len` sizes in `0..=max`.
pub fn tuples(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=max).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// The two legs of the hexagon in variable `i` for `f: A → B`; entry `i` of
/// `objs` is ignored. Returns `(upper, lower)`.
pub fn hexagon_legs(ct: &ConcreteTransformation, i: usize, objs: &[usize], f: &FinSetMap) -> Result<(FinSetMap, FinSetMap), OracleError> {
    let s = &ct.signature;
    if i == 0 || i > s.ty.vars {
        return Err(OracleError::IndexOutOfRange { index: i, len: s.ty.vars });
    }
    let (a, b) = (f.dom, f.cod);
    let id = FinSetMap::identity;
    // Arrows per slot; `on_i(contra, co)` picks what variable i gets.
    let arrows = |map: &[usize], vs: &[Variance], contra: &FinSetMap, co: &FinSetMap| -> Vec<FinSetMap> {
        map.iter()
            .zip(vs)
            .map(|(&v, &var)| {
                if v != i {
                    id(objs[v - 1])
                } else if var == Variance::Contra {
                    contra.clone()
                } else {
                    co.clone()
                }
            })
            .collect()
    };
    let with = |k: usize| substitute_tuple(objs, k, i);
    let upper = act(&ct.dom, Variance::Co, &arrows(&s.ty.sigma, &s.dom, f, &id(a)))?
        .then(&ct.component(&with(a)?)?)?
        .then(&act(&ct.cod, Variance::Co, &arrows(&s.ty.tau, &s.cod, &id(a), f))?)?;
    let lower = act(&ct.dom, Variance::Co, &arrows(&s.ty.sigma, &s.dom, &id(b), f))?
        .then(&ct.component(&with(b)?)?)?
        .then(&act(&ct.cod, Variance::Co, &arrows(&s.ty.tau, &s.cod, f, &id(b)))?)?;
    if upper.dom != lower.dom || upper.cod != lower.cod {
        return Err(OracleError::ShapeMismatch("hexagon legs have different shapes".into()));
    }
    Ok((upper, lower))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HexagonReport {
    Pass {
        checked: u64,
    },
    Fail {
        variable: usize,
        objects: Vec<usize>,
        f: FinSetMap,
        upper: FinSetMap,
        lower: FinSetMap,
    },
}

impl HexagonReport {
    pub fn passed(&self) -> bool {
        matches!(self, HexagonReport::Pass { .. })
    }
}

pub fn hexagon_count(vars: usize, max_size: usize) -> u64 {
    let arrows: u64 = (0..=max_size as u64)
        .flat_map(|a| (0..=max_size as u64).map(move |b| b.saturating_pow(a as u32)))
        .fold(0u64, |acc, x| acc.saturating_add(x));
    (max_size as u64 + 1).saturating_pow(vars.saturating_sub(1) as u32).saturating_mul(arrows)
}

pub fn check_dinaturality(ct: &ConcreteTransformation, i: usize, max_size: usize) -> Result<HexagonReport, OracleError> {
    check_dinaturality_with_budget(ct, i, max_size, DEFAULT_HEXAGON_BUDGET)
}

/// Compares both legs for every object tuple with sizes up to `max_size`
/// (empty sets included) and every arrow between them.
pub fn check_dinaturality_with_budget(ct: &ConcreteTransformation, i: usize, max_size: usize, budget: u64) -> Result<HexagonReport, OracleError> {
    let vars = ct.signature.ty.vars;
    if i == 0 || i > vars {
        return Err(OracleError::IndexOutOfRange { index: i, len: vars });
    }
    let needed = hexagon_count(vars, max_size);
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let mut checked = 0;
    for objs in tuples(vars, max_size) {
        if objs[i - 1] != 0 {
            continue;
        }
        for a in 0..=max_size {
            for b in 0..=max_size {
                for f in all_maps(a, b)? {
                    let (upper, lower) = hexagon_legs(ct, i, &objs, &f)?;
                    checked += 1;
                    if upper != lower {
                        return Ok(HexagonReport::Fail {
                            variable: i,
                            objects: objs,
                            f,
                            upper,
                            lower,
                        });
                    }
                }
            }
        }
    }
    Ok(HexagonReport::Pass { checked })
}

/// Pointwise `ψ_{Aξ} ∘ φ_{Aζ}`.
pub fn vcompose_concrete(c1: &ConcreteTransformation, c2: &ConcreteTransformation) -> Result<ConcreteTransformation, OracleError> {
    let (s1, s2) = (&c1.signature, &c2.signature);
    if s1.cod != s2.dom || c1.cod.flattened() != c2.dom.flattened() {
        return Err(OracleError::InterfaceMismatch(format!("{} does not end where {} starts", s1.name, s2.name)));
    }
    let p = pushout_types(&s1.ty, &s2.ty)?;
    let signature = Signature {
        name: format!("{}\u{2218}{}", s2.name, s1.name),
        dom: s1.dom.clone(),
        cod: s2.cod.clone(),
        ty: p.composite(&s1.ty, &s2.ty),
        dom_functor: s1.dom_functor.clone(),
        cod_functor: s2.cod_functor.clone(),
    };
    ConcreteTransformation::new(
        signature,
        c1.dom.clone(),
        c2.cod.clone(),
        Semantics::Composite(Box::new(c1.clone()), Box::new(c2.clone()), p),
    )
}

/// Folds [`vcompose_concrete`] over a chain.
pub fn compose_chain(chain: &[ConcreteTransformation]) -> Result<ConcreteTransformation, OracleError> {
    let (first, rest) = chain.split_first().ok_or_else(|| OracleError::InterfaceMismatch("empty chain".into()))?;
    rest.iter().try_fold(first.clone(), |acc, c| vcompose_concrete(&acc, c))
}

fn check_chain(t: &Transformation, chain: &[ConcreteTransformation]) -> Result<(), OracleError> {
    let constituents = decompose(t);
    if constituents.len() != chain.len() {
        return Err(OracleError::ShapeMismatch(format!(
            "{} constituents but {} concrete ones",
            constituents.len(),
            chain.len()
        )));
    }
    for (c, ct) in constituents.iter().zip(chain) {
        let s = ct.signature();
        if c.signature.dom != s.dom || c.signature.cod != s.cod || c.signature.ty != s.ty {
            return Err(OracleError::ShapeMismatch(format!("{} does not match {}", c.signature.name, s.name)));
        }
    }
    Ok(())
}

/// The morphism a labelled marking stands for: the chain
/// `F1(x¹); φ1_{X¹}; F2(x²); ..; F_{k+1}(x^{k+1})` where a token means `f`,
/// an empty place the identity on its transition's label, and a transition
/// labelled `A`/`B` is taken at `|A|`/`|B|`. Outside `component` every
/// variable sits at its entry of `objs`.
pub fn realize_marking(
    t: &Transformation,
    chain: &[ConcreteTransformation],
    component: usize,
    objs: &[usize],
    lm: &LabelledMarking,
    f: &FinSetMap,
) -> Result<FinSetMap, OracleError> {
    check_chain(t, chain)?;
    let g = t.graph().cospan();
    let net = g.net();
    if component == 0 || component > g.num_components() {
        return Err(OracleError::IndexOutOfRange {
            index: component,
            len: g.num_components(),
        });
    }
    if objs.len() != g.num_components() {
        return Err(OracleError::ArityMismatch {
            got: objs.len(),
            want: g.num_components(),
        });
    }
    if !lm.is_valid(net) {
        return Err(OracleError::ShapeMismatch("not a labelled marking of this net".into()));
    }
    let comp = g.component_index();
    let np = net.num_places();
    let here = component - 1;
    let size_of = |l: Label| if l == Label::A { f.dom } else { f.cod };
    let transition_obj = |tr: usize| if comp[np + tr] == here { size_of(lm.labels[tr]) } else { objs[comp[np + tr]] };
    let place_arrow = |p: usize| -> Result<FinSetMap, OracleError> {
        if comp[p] != here {
            return Ok(FinSetMap::identity(objs[comp[p]]));
        }
        match lm.marking.tokens(p) {
            1 => Ok(f.clone()),
            _ => {
                let tr = net
                    .producer(p)
                    .or(net.consumer(p))
                    .ok_or_else(|| OracleError::ShapeMismatch(format!("place p{} touches no transition", p + 1)))?;
                Ok(FinSetMap::identity(size_of(lm.labels[tr])))
            }
        }
    };
    let interfaces = t.interfaces();
    let k = chain.len();
    let mut acc: Option<FinSetMap> = None;
    for j in 0..=k {
        let expr = if j < k { chain[j].dom_expr() } else { chain[k - 1].cod_expr() };
        let arrows = interfaces[j].iter().map(|&p| place_arrow(p)).collect::<Result<Vec<_>, _>>()?;
        let fm = functor_map(expr, &arrows)?;
        acc = Some(match acc {
            None => fm,
            Some(m) => m.then(&fm)?,
        });
        if j < k {
            let xs = (1..=chain[j].signature().ty.vars)
                .map(|v| {
                    t.transition_of(Tag {
                        constituent: j + 1,
                        variable: v,
                    })
                    .map(transition_obj)
                    .ok_or_else(|| OracleError::ShapeMismatch(format!("no transition for constituent {} variable {v}", j + 1)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            acc = Some(acc.unwrap().then(&chain[j].component(&xs)?)?);
        }
    }
    Ok(acc.expect("at least one interface"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionReport {
    /// Variables with `Δ = 1` and what brute force found there.
    pub checked: Vec<(usize, HexagonReport)>,
    /// Variables with `Δ = 0`: nothing is claimed about them.
    pub no_guarantee: Vec<usize>,
}

impl PredictionReport {
    pub fn all_pass(&self) -> bool {
        self.checked.iter().all(|(_, r)| r.passed())
    }
}

/// Brute-forces every variable the discriminant vouches for.
pub fn check_prediction(t: &Transformation, ct: &ConcreteTransformation, max_size: usize) -> Result<PredictionReport, OracleError> {
    let (s, c) = (t.signature(), ct.signature());
    if s.dom != c.dom || s.cod != c.cod || s.ty != c.ty {
        return Err(OracleError::ShapeMismatch(format!("{} and {} have different signatures", s.name, c.name)));
    }
    let mut report = PredictionReport {
        checked: Vec::new(),
        no_guarantee: Vec::new(),
    };
    for (i, &d) in t.delta().iter().enumerate() {
        if d {
            report.checked.push((i + 1, check_dinaturality(ct, i + 1, max_size)?));
        } else {
            report.no_guarantee.push(i + 1);
        }
    }
    Ok(report)
}
