//! JSON documents describing transformations. Indices are 1-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dinat::{decompose, identity_of, make_atomic, vcompose, DinatError, Provenance, Transformation};
use crate::finset_oracle::{compose_chain, ConcreteTransformation, FinSetMap, FunctorExpr, OracleError};
use crate::graphcat::{iso_equal, GcMorphism, GraphCospan, GraphError};
use crate::petri::{PetriError, PetriNet};
use crate::signature::{CospanType, Signature, SignatureError, VarianceList};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Dinat(#[from] DinatError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("semantics: {0}")]
    Oracle(#[from] OracleError),
}

fn invalid(msg: impl Into<String>) -> DocumentError {
    DocumentError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Atomic,
    Identity,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    #[serde(rename = "in")]
    pub inputs: Vec<usize>,
    #[serde(rename = "out")]
    pub outputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub places: usize,
    pub transitions: Vec<TransitionDoc>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    /// One set size per variable.
    pub objects: Vec<usize>,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "camelCase", deny_unknown_fields)]
pub enum SemanticsDoc {
    Diagonal,
    Eval,
    EvalConst {
        r: usize,
    },
    Church {
        n: usize,
    },
    Identity {
        expr: FunctorExpr,
    },
    ProductPair {
        left: Box<SemanticsDoc>,
        right: Box<SemanticsDoc>,
    },
    ConstPoint {
        size: usize,
        point: usize,
    },
    Tables {
        dom: FunctorExpr,
        cod: FunctorExpr,
        tables: Vec<TableEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Document {
    pub name: String,
    #[serde(default)]
    pub kind: Kind,
    /// Functor symbol of an identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functor: Option<String>,
    pub dom_variance: VarianceList,
    pub cod_variance: VarianceList,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dom_functor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cod_functor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<Document>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<SemanticsDoc>,
}

/// A checked document.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub document: Document,
    pub transformation: Transformation,
    /// The atomic documents the transformation is made of, in order.
    pub constituents: Vec<Document>,
}

impl Loaded {
    /// Finite-set semantics, if the document or every constituent has some.
    pub fn semantics(&self) -> Result<Option<ConcreteTransformation>, DocumentError> {
        let sig = self.transformation.signature();
        if let Some(sem) = &self.document.semantics {
            return Ok(Some(concrete(sem, sig)?));
        }
        if self.document.kind != Kind::Composite {
            return Ok(None);
        }
        match self.chain()? {
            Some(chain) => Ok(Some(compose_chain(&chain)?.renamed(sig.name.clone()))),
            None => Ok(None),
        }
    }

    /// Semantics of each constituent, if all of them have some.
    pub fn chain(&self) -> Result<Option<Vec<ConcreteTransformation>>, DocumentError> {
        if self.document.kind == Kind::Atomic {
            return Ok(self.semantics()?.map(|c| vec![c]));
        }
        let cs = decompose(&self.transformation);
        let mut out = Vec::new();
        for (doc, c) in self.constituents.iter().zip(&cs) {
            match &doc.semantics {
                Some(sem) => out.push(concrete(sem, &c.signature)?),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

fn builtin(sem: &SemanticsDoc) -> Result<ConcreteTransformation, DocumentError> {
    Ok(match sem {
        SemanticsDoc::Diagonal => ConcreteTransformation::diagonal(),
        SemanticsDoc::Eval => ConcreteTransformation::eval(),
        SemanticsDoc::EvalConst { r } => ConcreteTransformation::eval_const(*r),
        SemanticsDoc::Church { n } => ConcreteTransformation::church(*n),
        SemanticsDoc::Identity { expr } => ConcreteTransformation::identity_on(expr.clone())?,
        SemanticsDoc::ProductPair { left, right } => ConcreteTransformation::product_pair(builtin(left)?, builtin(right)?),
        SemanticsDoc::ConstPoint { size, point } => ConcreteTransformation::const_point(*size, *point)?,
        SemanticsDoc::Tables { .. } => return Err(invalid("component tables cannot be nested inside a product")),
    })
}

/// Builds the semantics and checks it fits the signature.
pub fn concrete(sem: &SemanticsDoc, sig: &Signature) -> Result<ConcreteTransformation, DocumentError> {
    let ct = match sem {
        SemanticsDoc::Tables { dom, cod, tables } => {
            let plain = Signature {
                dom_functor: None,
                cod_functor: None,
                ..sig.clone()
            };
            let proto = ConcreteTransformation::from_tables(plain.clone(), dom.clone(), cod.clone(), Default::default())?;
            let map = tables
                .iter()
                .map(|e| {
                    // Sizes come from the expressions; the entry only lists images.
                    let (d, c) = expected_shape(&proto, &e.objects)?;
                    Ok((e.objects.clone(), FinSetMap::new(d, c, e.table.clone())?))
                })
                .collect::<Result<_, DocumentError>>()?;
            ConcreteTransformation::from_tables(plain, dom.clone(), cod.clone(), map)?
        }
        other => builtin(other)?,
    };
    let s = ct.signature();
    if s.dom != sig.dom || s.cod != sig.cod || s.ty != sig.ty {
        return Err(invalid(format!(
            "semantics has type {} with variances {} / {}, but {} is declared {} with {} / {}",
            s.ty,
            crate::signature::format_variances(&s.dom),
            crate::signature::format_variances(&s.cod),
            sig.name,
            sig.ty,
            crate::signature::format_variances(&sig.dom),
            crate::signature::format_variances(&sig.cod),
        )));
    }
    Ok(ct.renamed(sig.name.clone()))
}

fn expected_shape(ct: &ConcreteTransformation, objs: &[usize]) -> Result<(usize, usize), DocumentError> {
    let s = ct.signature();
    if objs.len() != s.ty.vars {
        return Err(invalid(format!("table key {objs:?} should list {} sizes", s.ty.vars)));
    }
    let at = |map: &[usize]| map.iter().map(|&v| objs[v - 1]).collect::<Vec<_>>();
    Ok((
        crate::finset_oracle::eval_functor(ct.dom_expr(), &at(&s.ty.sigma))?,
        crate::finset_oracle::eval_functor(ct.cod_expr(), &at(&s.ty.tau))?,
    ))
}

fn delta_bits(doc: &Document) -> Result<Option<Vec<bool>>, DocumentError> {
    doc.delta
        .as_ref()
        .map(|d| {
            d.iter()
                .map(|&b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(invalid(format!("delta entries must be 0 or 1, found {other}"))),
                })
                .collect()
        })
        .transpose()
}

fn declared_signature(doc: &Document) -> Result<Signature, DocumentError> {
    let (Some(vars), Some(sigma), Some(tau)) = (doc.vars, doc.sigma.clone(), doc.tau.clone()) else {
        return Err(invalid(format!("{}: vars, sigma and tau are required", doc.name)));
    };
    let mut s = Signature::new(
        doc.name.clone(),
        doc.dom_variance.clone(),
        doc.cod_variance.clone(),
        CospanType::new(sigma, tau, vars)?,
    )?;
    s.dom_functor = doc.dom_functor.clone();
    s.cod_functor = doc.cod_functor.clone();
    Ok(s)
}

fn graph_from_doc(g: &GraphDoc, dom: &VarianceList, cod: &VarianceList) -> Result<GraphCospan, DocumentError> {
    let zero = |xs: &[usize], what: &str| -> Result<Vec<usize>, DocumentError> {
        xs.iter()
            .map(|&p| {
                p.checked_sub(1)
                    .ok_or_else(|| invalid(format!("graph {what} uses place 0; places are 1-based")))
            })
            .collect()
    };
    let inputs = g.transitions.iter().map(|t| zero(&t.inputs, "arc")).collect::<Result<Vec<_>, _>>()?;
    let outputs = g.transitions.iter().map(|t| zero(&t.outputs, "arc")).collect::<Result<Vec<_>, _>>()?;
    let net = PetriNet::new(g.places, inputs, outputs)?;
    Ok(GraphCospan::new(
        dom.clone(),
        cod.clone(),
        net,
        zero(&g.left, "boundary")?,
        zero(&g.right, "boundary")?,
        None,
    )?)
}

pub fn graph_to_doc(g: &GraphCospan) -> GraphDoc {
    let net = g.net();
    let one = |xs: &[usize]| xs.iter().map(|p| p + 1).collect::<Vec<_>>();
    GraphDoc {
        places: net.num_places(),
        transitions: (0..net.num_transitions())
            .map(|t| TransitionDoc {
                inputs: one(net.inputs(t)),
                outputs: one(net.outputs(t)),
            })
            .collect(),
        left: one(g.left()),
        right: one(g.right()),
    }
}

fn check_matches(doc: &Document, t: &Transformation) -> Result<(), DocumentError> {
    let s = t.signature();
    if doc.dom_variance != s.dom || doc.cod_variance != s.cod {
        return Err(invalid(format!("{}: declared variances do not match the computed ones", doc.name)));
    }
    let mismatch = |what: &str| invalid(format!("{}: declared {what} does not match the computed one", doc.name));
    if doc.vars.is_some_and(|v| v != s.ty.vars) {
        return Err(mismatch("vars"));
    }
    if doc.sigma.as_ref().is_some_and(|v| *v != s.ty.sigma) {
        return Err(mismatch("sigma"));
    }
    if doc.tau.as_ref().is_some_and(|v| *v != s.ty.tau) {
        return Err(mismatch("tau"));
    }
    if let Some(d) = delta_bits(doc)? {
        if d != t.delta() {
            return Err(mismatch("delta"));
        }
    }
    if let Some(g) = &doc.graph {
        // Structure only; the discriminant was compared above.
        let given = graph_from_doc(g, &doc.dom_variance, &doc.cod_variance)?;
        let k = given.num_components();
        let recomputed = t.graph().cospan().clone();
        let k2 = recomputed.num_components();
        if !iso_equal(&GcMorphism::new(given, vec![false; k])?, &GcMorphism::new(recomputed, vec![false; k2])?)? {
            return Err(invalid(format!(
                "{}: embedded graph is not isomorphic to the one its description generates",
                doc.name
            )));
        }
    }
    Ok(())
}

fn load_atomic(doc: &Document) -> Result<Transformation, DocumentError> {
    if doc.provenance.is_some() {
        return Err(invalid(format!("{}: atomic documents have no provenance", doc.name)));
    }
    let delta = delta_bits(doc)?.ok_or_else(|| invalid(format!("{}: atomic documents need delta", doc.name)))?;
    let t = make_atomic(declared_signature(doc)?, delta)?;
    check_matches(doc, &t)?;
    Ok(t)
}

/// Rebuilds the transformation and re-checks everything the document claims.
pub fn load(doc: Document) -> Result<Loaded, DocumentError> {
    let (t, constituents) = match doc.kind {
        Kind::Atomic => {
            let t = load_atomic(&doc)?;
            let mut c = doc.clone();
            c.graph = None;
            (t, vec![c])
        }
        Kind::Identity => {
            if doc.dom_variance != doc.cod_variance {
                return Err(invalid(format!("{}: an identity needs equal domain and codomain variances", doc.name)));
            }
            let functor = doc.functor.clone().or_else(|| doc.dom_functor.clone()).unwrap_or_else(|| "F".into());
            let t = identity_of(&functor, &doc.dom_variance)?.renamed(doc.name.clone());
            check_matches(&doc, &t)?;
            (t, Vec::new())
        }
        Kind::Composite => {
            let parts = doc
                .provenance
                .as_ref()
                .filter(|p| !p.is_empty())
                .ok_or_else(|| invalid(format!("{}: composites need a provenance list", doc.name)))?;
            let mut acc: Option<Transformation> = None;
            for p in parts {
                if p.kind != Kind::Atomic {
                    return Err(invalid(format!("{}: provenance entries must be atomic", doc.name)));
                }
                let a = load_atomic(p)?;
                acc = Some(match acc {
                    None => a,
                    Some(prev) => vcompose(&prev, &a)?,
                });
            }
            let t = acc.unwrap().renamed(doc.name.clone());
            check_matches(&doc, &t)?;
            let cs = parts.iter().map(|p| Document { graph: None, ..p.clone() }).collect();
            (t, cs)
        }
    };
    if !matches!(t.provenance(), Provenance::Composite(_)) && doc.kind == Kind::Composite {
        return Err(invalid(format!("{}: a composite of one constituent should be written as atomic", doc.name)));
    }
    let loaded = Loaded {
        document: doc,
        transformation: t,
        constituents,
    };
    // Surface semantic errors at load time.
    loaded.semantics()?;
    Ok(loaded)
}

pub fn parse(text: &str) -> Result<Loaded, DocumentError> {
    load(serde_json::from_str(text)?)
}

pub fn read(path: &std::path::Path) -> Result<Loaded, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// The full document for a transformation built from `constituents`.
pub fn to_document(t: &Transformation, constituents: Vec<Document>, semantics: Option<SemanticsDoc>) -> Document {
    let s = t.signature();
    let kind = match t.provenance() {
        Provenance::Identity { .. } => Kind::Identity,
        Provenance::Atomic => Kind::Atomic,
        Provenance::Composite(_) => Kind::Composite,
    };
    Document {
        name: s.name.clone(),
        kind,
        functor: match t.provenance() {
            Provenance::Identity { functor } => Some(functor.clone()),
            _ => None,
        },
        dom_variance: s.dom.clone(),
        cod_variance: s.cod.clone(),
        vars: Some(s.ty.vars),
        sigma: Some(s.ty.sigma.clone()),
        tau: Some(s.ty.tau.clone()),
        delta: Some(t.delta().iter().map(|&b| b as u8).collect()),
        dom_functor: s.dom_functor.clone(),
        cod_functor: s.cod_functor.clone(),
        graph: Some(graph_to_doc(t.graph().cospan())),
        provenance: (kind == Kind::Composite).then_some(constituents),
        semantics,
    }
}

pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// `b ∘ a` as a document, keeping constituent semantics.
pub fn compose_loaded(a: &Loaded, b: &Loaded) -> Result<Loaded, DocumentError> {
    let t = vcompose(&a.transformation, &b.transformation)?;
    let mut cs = a.constituents.clone();
    cs.extend(b.constituents.iter().cloned());
    let doc = match t.provenance() {
        // An identity was absorbed; keep the other side as it was.
        Provenance::Atomic | Provenance::Identity { .. } => {
            let survivor = if a.transformation.is_identity() { b } else { a };
            to_document(&t, Vec::new(), survivor.document.semantics.clone())
        }
        Provenance::Composite(_) => to_document(&t, cs, None),
    };
    load(doc)
}
