//! Variance lists, cospan types and the two ways of composing them.
//!
//! Variable indices inside [`CospanType`] are 1-based: `sigma[k] = 3` means
//! the `(k+1)`-th domain slot lives in variable 3.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("a type needs at least one variable")]
    ZeroVars,
    #[error("{map}[{position}] = {value} is outside 1..={vars}")]
    OutOfRangeIndex {
        map: &'static str,
        position: usize,
        value: usize,
        vars: usize,
    },
    #[error("codomain arity {left} does not match domain arity {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("variable {index} is outside 1..={vars}")]
    VarIndexOutOfRange { index: usize, vars: usize },
    #[error("signature {name}: {what} arity {variance} does not match type arity {ty}")]
    VarianceArity {
        name: String,
        what: &'static str,
        variance: usize,
        ty: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    Co,
    Contra,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Co => Variance::Contra,
            Variance::Contra => Variance::Co,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Variance::Co => "+",
            Variance::Contra => "-",
        }
    }

    /// Accepts `+`, ASCII `-` and the typographic minus.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "+" => Some(Variance::Co),
            "-" | "\u{2212}" => Some(Variance::Contra),
            _ => None,
        }
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Variance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Variance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Variance::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad variance {s:?}, want \"+\" or \"-\"")))
    }
}

pub type VarianceList = Vec<Variance>;

pub fn negate(list: &[Variance]) -> VarianceList {
    list.iter().map(|v| v.flip()).collect()
}

pub fn format_variances(list: &[Variance]) -> String {
    let inner: Vec<&str> = list.iter().map(|v| v.symbol()).collect();
    format!("[{}]", inner.join(","))
}

/// `|α| →σ n ←τ |β|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CospanType {
    pub vars: usize,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl CospanType {
    pub fn new(sigma: Vec<usize>, tau: Vec<usize>, vars: usize) -> Result<Self, SignatureError> {
        let t = CospanType { vars, sigma, tau };
        validate_type(&t)?;
        Ok(t)
    }

    /// The identity type on `k` slots: `σ = τ = id`, `n = k`.
    pub fn identity(k: usize) -> Self {
        let ids: Vec<usize> = (1..=k).collect();
        CospanType {
            vars: k,
            sigma: ids.clone(),
            tau: ids,
        }
    }

    pub fn dom_arity(&self) -> usize {
        self.sigma.len()
    }

    pub fn cod_arity(&self) -> usize {
        self.tau.len()
    }
}

impl fmt::Display for CospanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}->{}<-{} (sigma={:?}, tau={:?})",
            self.dom_arity(),
            self.vars,
            self.cod_arity(),
            self.sigma,
            self.tau
        )
    }
}

pub fn validate_type(t: &CospanType) -> Result<(), SignatureError> {
    if t.vars == 0 {
        return Err(SignatureError::ZeroVars);
    }
    for (map, values) in [("sigma", &t.sigma), ("tau", &t.tau)] {
        for (k, &v) in values.iter().enumerate() {
            if v == 0 || v > t.vars {
                return Err(SignatureError::OutOfRangeIndex {
                    map,
                    position: k + 1,
                    value: v,
                    vars: t.vars,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub name: String,
    pub dom: VarianceList,
    pub cod: VarianceList,
    #[serde(rename = "type")]
    pub ty: CospanType,
    /// Functor symbols, checked on vertical composition when both sides set them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dom_functor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cod_functor: Option<String>,
}

impl Signature {
    pub fn new(name: impl Into<String>, dom: VarianceList, cod: VarianceList, ty: CospanType) -> Result<Self, SignatureError> {
        let s = Signature {
            name: name.into(),
            dom,
            cod,
            ty,
            dom_functor: None,
            cod_functor: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_functors(mut self, dom: impl Into<String>, cod: impl Into<String>) -> Self {
        self.dom_functor = Some(dom.into());
        self.cod_functor = Some(cod.into());
        self
    }

    pub fn validate(&self) -> Result<(), SignatureError> {
        validate_type(&self.ty)?;
        if self.dom.len() != self.ty.dom_arity() {
            return Err(SignatureError::VarianceArity {
                name: self.name.clone(),
                what: "domain",
                variance: self.dom.len(),
                ty: self.ty.dom_arity(),
            });
        }
        if self.cod.len() != self.ty.cod_arity() {
            return Err(SignatureError::VarianceArity {
                name: self.name.clone(),
                what: "codomain",
                variance: self.cod.len(),
                ty: self.ty.cod_arity(),
            });
        }
        Ok(())
    }

    pub fn vars(&self) -> usize {
        self.ty.vars
    }
}

/// Result of [`pushout_types`]: `ζ: n1 → l`, `ξ: n2 → l`, all 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pushout {
    pub vars: usize,
    pub zeta: Vec<usize>,
    pub xi: Vec<usize>,
}

impl Pushout {
    /// The composite type `(ζσ1, ξθ, l)`.
    pub fn composite(&self, t1: &CospanType, t2: &CospanType) -> CospanType {
        CospanType {
            vars: self.vars,
            sigma: t1.sigma.iter().map(|&s| self.zeta[s - 1]).collect(),
            tau: t2.tau.iter().map(|&s| self.xi[s - 1]).collect(),
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Pushout of `τ1` against `η = t2.sigma`. Classes are numbered by first
/// occurrence scanning `1..n1` and then `1..n2`.
pub fn pushout_types(t1: &CospanType, t2: &CospanType) -> Result<Pushout, SignatureError> {
    if t1.cod_arity() != t2.dom_arity() {
        return Err(SignatureError::ArityMismatch {
            left: t1.cod_arity(),
            right: t2.dom_arity(),
        });
    }
    let (n1, n2) = (t1.vars, t2.vars);
    let mut parent: Vec<usize> = (0..n1 + n2).collect();
    for (&a, &b) in t1.tau.iter().zip(&t2.sigma) {
        let ra = find(&mut parent, a - 1);
        let rb = find(&mut parent, n1 + b - 1);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut class_of_root = vec![0usize; n1 + n2];
    let mut next = 0;
    let mut numbering = Vec::with_capacity(n1 + n2);
    for x in 0..n1 + n2 {
        let r = find(&mut parent, x);
        if class_of_root[r] == 0 {
            next += 1;
            class_of_root[r] = next;
        }
        numbering.push(class_of_root[r]);
    }
    let xi = numbering.split_off(n1);
    Ok(Pushout {
        vars: next,
        zeta: numbering,
        xi,
    })
}

/// A permutation of `1..=n` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Finds `π` with `σ2 = πσ1` and `τ2 = πτ1`. Variables that no slot uses
/// are paired up in increasing order.
pub fn permutation_equivalent(s1: &Signature, s2: &Signature) -> Option<Permutation> {
    if s1.dom != s2.dom || s1.cod != s2.cod || s1.ty.vars != s2.ty.vars {
        return None;
    }
    let n = s1.ty.vars;
    let mut pi = vec![0usize; n];
    let mut used = vec![false; n];
    let pairs = s1.ty.sigma.iter().zip(&s2.ty.sigma).chain(s1.ty.tau.iter().zip(&s2.ty.tau));
    for (&a, &b) in pairs {
        if pi[a - 1] == 0 {
            if used[b - 1] {
                return None;
            }
            pi[a - 1] = b;
            used[b - 1] = true;
        } else if pi[a - 1] != b {
            return None;
        }
    }
    let mut free = (1..=n).filter(|&b| !used[b - 1]);
    for slot in pi.iter_mut().filter(|p| **p == 0) {
        *slot = free.next()?;
    }
    Some(Permutation(pi))
}

/// Renumbers variables by first occurrence in `σ` then `τ`; unused variables
/// keep their relative order at the end.
pub fn canonical_type(t: &CospanType) -> CospanType {
    let mut renumber = vec![0usize; t.vars];
    let mut next = 0;
    for &v in t.sigma.iter().chain(&t.tau) {
        if renumber[v - 1] == 0 {
            next += 1;
            renumber[v - 1] = next;
        }
    }
    for r in renumber.iter_mut().filter(|r| **r == 0) {
        next += 1;
        *r = next;
    }
    CospanType {
        vars: t.vars,
        sigma: t.sigma.iter().map(|&v| renumber[v - 1]).collect(),
        tau: t.tau.iter().map(|&v| renumber[v - 1]).collect(),
    }
}

pub fn canonical_form(s: &Signature) -> Signature {
    Signature {
        ty: canonical_type(&s.ty),
        ..s.clone()
    }
}

/// Substitutes `phi` into variable `i` of `psi`.
pub fn hcomp_signature(phi: &Signature, psi: &Signature, i: usize) -> Result<Signature, SignatureError> {
    let m = psi.ty.vars;
    if i == 0 || i > m {
        return Err(SignatureError::VarIndexOutOfRange { index: i, vars: m });
    }
    let n = phi.ty.vars;
    let iota_n = |x: usize| i - 1 + x;
    let iota_m = |x: usize| if x < i { x } else { x + n - 1 };
    let neg_alpha = negate(&phi.dom);
    let neg_beta = negate(&phi.cod);
    let sigma_n: Vec<usize> = phi.ty.sigma.iter().map(|&x| iota_n(x)).collect();
    let tau_n: Vec<usize> = phi.ty.tau.iter().map(|&x| iota_n(x)).collect();

    let mut dom = Vec::new();
    let mut sigma = Vec::new();
    for (u, &g) in psi.dom.iter().enumerate() {
        let eta = psi.ty.sigma[u];
        if eta != i {
            dom.push(g);
            sigma.push(iota_m(eta));
        } else if g == Variance::Co {
            dom.extend_from_slice(&phi.dom);
            sigma.extend_from_slice(&sigma_n);
        } else {
            dom.extend_from_slice(&neg_beta);
            sigma.extend_from_slice(&tau_n);
        }
    }
    let mut cod = Vec::new();
    let mut tau = Vec::new();
    for (v, &d) in psi.cod.iter().enumerate() {
        let theta = psi.ty.tau[v];
        if theta != i {
            cod.push(d);
            tau.push(iota_m(theta));
        } else if d == Variance::Co {
            cod.extend_from_slice(&phi.cod);
            tau.extend_from_slice(&tau_n);
        } else {
            cod.extend_from_slice(&neg_alpha);
            tau.extend_from_slice(&sigma_n);
        }
    }
    let dom_functor = match (&psi.dom_functor, &phi.cod_functor, &phi.dom_functor) {
        (Some(j), Some(g), Some(f)) => Some(format!("{j}[{g},{f}/{i}]")),
        _ => None,
    };
    let cod_functor = match (&psi.cod_functor, &phi.dom_functor, &phi.cod_functor) {
        (Some(k), Some(f), Some(g)) => Some(format!("{k}[{f},{g}/{i}]")),
        _ => None,
    };
    Ok(Signature {
        name: format!("{}*{}@{}", phi.name, psi.name, i),
        dom,
        cod,
        ty: CospanType {
            vars: (i - 1) + n + (m - i),
            sigma,
            tau,
        },
        dom_functor,
        cod_functor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Variance::{Co as P, Contra as M};

    fn sig(name: &str, dom: Vec<Variance>, cod: Vec<Variance>, sigma: Vec<usize>, tau: Vec<usize>, n: usize) -> Signature {
        Signature::new(name, dom, cod, CospanType::new(sigma, tau, n).unwrap()).unwrap()
    }

    fn eval() -> Signature {
        sig("eval", vec![P, M, P], vec![P], vec![1, 1, 2], vec![2], 2)
    }

    fn delta() -> Signature {
        sig("delta", vec![P], vec![P, P], vec![1], vec![1, 1], 1)
    }

    #[test]
    fn validate_examples() {
        assert!(validate_type(&CospanType {
            vars: 2,
            sigma: vec![1, 1, 2],
            tau: vec![2]
        })
        .is_ok());
        assert!(validate_type(&CospanType {
            vars: 1,
            sigma: vec![],
            tau: vec![]
        })
        .is_ok());
        assert!(matches!(
            validate_type(&CospanType {
                vars: 2,
                sigma: vec![3],
                tau: vec![]
            }),
            Err(SignatureError::OutOfRangeIndex { value: 3, .. })
        ));
        assert_eq!(
            validate_type(&CospanType {
                vars: 0,
                sigma: vec![],
                tau: vec![]
            }),
            Err(SignatureError::ZeroVars)
        );
    }

    #[test]
    fn pushout_of_two_layer_example() {
        let t1 = CospanType::new(vec![1, 2], vec![1, 1, 2], 2).unwrap();
        let t2 = CospanType::new(vec![1, 2, 2], vec![1], 2).unwrap();
        let p = pushout_types(&t1, &t2).unwrap();
        assert_eq!(
            p,
            Pushout {
                vars: 1,
                zeta: vec![1, 1],
                xi: vec![1, 1]
            }
        );
        let c = p.composite(&t1, &t2);
        assert_eq!(
            c,
            CospanType {
                vars: 1,
                sigma: vec![1, 1],
                tau: vec![1]
            }
        );
    }

    #[test]
    fn pushout_against_identity_renumbers() {
        let t1 = CospanType::new(vec![2, 1], vec![2, 3, 2], 3).unwrap();
        let id = CospanType::identity(3);
        let p = pushout_types(&t1, &id).unwrap();
        assert_eq!(p.vars, 3);
        assert_eq!(p.zeta, vec![1, 2, 3]);
        assert_eq!(p.xi, vec![2, 3, 2]);
    }

    #[test]
    fn pushout_arity_mismatch() {
        let t1 = CospanType::new(vec![1], vec![1], 1).unwrap();
        let t2 = CospanType::new(vec![1, 1], vec![], 1).unwrap();
        assert!(matches!(pushout_types(&t1, &t2), Err(SignatureError::ArityMismatch { .. })));
    }

    #[test]
    fn permutation_examples() {
        let e = eval();
        let mut renamed = e.clone();
        renamed.ty.sigma = vec![2, 2, 1];
        renamed.ty.tau = vec![1];
        assert_eq!(permutation_equivalent(&e, &renamed), Some(Permutation(vec![2, 1])));
        assert_eq!(permutation_equivalent(&e, &delta()), None);
        assert_eq!(permutation_equivalent(&e, &e), Some(Permutation::identity(2)));
    }

    #[test]
    fn canonical_examples() {
        let s = sig("s", vec![P, M, P], vec![P], vec![2, 2, 1], vec![1], 2);
        let c = canonical_form(&s);
        assert_eq!(c.ty.sigma, vec![1, 1, 2]);
        assert_eq!(c.ty.tau, vec![2]);
        assert_eq!(canonical_form(&eval()), eval());
    }

    #[test]
    fn hcomp_delta_into_eval() {
        let r1 = hcomp_signature(&delta(), &eval(), 1).unwrap();
        assert_eq!(r1.dom, vec![P, M, M, P]);
        assert_eq!(r1.ty.sigma, vec![1, 1, 1, 2]);
        assert_eq!(r1.cod, vec![P]);
        assert_eq!(r1.ty.tau, vec![2]);
        assert_eq!(r1.ty.vars, 2);

        let r2 = hcomp_signature(&delta(), &eval(), 2).unwrap();
        assert_eq!(r2.dom, vec![P, M, P]);
        assert_eq!(r2.ty.sigma, vec![1, 1, 2]);
        assert_eq!(r2.cod, vec![P, P]);
        assert_eq!(r2.ty.tau, vec![2, 2]);
        assert_eq!(r2.ty.vars, 2);

        assert!(matches!(
            hcomp_signature(&delta(), &eval(), 3),
            Err(SignatureError::VarIndexOutOfRange { index: 3, vars: 2 })
        ));
    }

    #[test]
    fn hcomp_units() {
        let id = sig("id", vec![P], vec![P], vec![1], vec![1], 1);
        let e = eval();
        let left = hcomp_signature(&e, &id, 1).unwrap();
        assert_eq!(
            (left.dom.clone(), left.cod.clone(), left.ty.clone()),
            (e.dom.clone(), e.cod.clone(), e.ty.clone())
        );
        for i in 1..=2 {
            let right = hcomp_signature(&id, &e, i).unwrap();
            assert_eq!((right.dom, right.cod, right.ty), (e.dom.clone(), e.cod.clone(), e.ty.clone()));
        }
    }
}
