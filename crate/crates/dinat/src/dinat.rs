//! Transformations with their graphs and discriminants, the two compositions,
//! and witness traces.

use thiserror::Error;

use crate::graphcat::{self, compose_gc_glued, gc_identity, standard_graph, GcMorphism, GraphError};
use crate::petri::{self, LabelledMarking, PetriError};
use crate::signature::{format_variances, hcomp_signature, permutation_equivalent, CospanType, Signature, SignatureError, Variance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DinatError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid signature: {0}")]
    InvalidSignature(SignatureError),
    #[error("discriminant of {name} has {got} entries for {want} variables")]
    DeltaLength { name: String, got: usize, want: usize },
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("{name} is not known to be dinatural in variable {index}")]
    PsiNotDinaturalAtI { name: String, index: usize },
    #[error("variable {index} is outside 1..={vars}")]
    VarIndexOutOfRange { index: usize, vars: usize },
    #[error("component {component} is cyclic ({}), no guarantee", cycle_text(.cycle))]
    ComponentCyclic { component: usize, cycle: Vec<usize> },
    #[error("component {component} relies on constituents not known to be dinatural: {}", missing_text(.missing))]
    MissingDinaturality { component: usize, missing: Vec<(usize, String, usize)> },
    #[error(transparent)]
    Replay(#[from] PetriError),
}

fn cycle_text(cycle: &[usize]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|t| format!("t{}", t + 1)).collect();
    if let Some(first) = parts.first().cloned() {
        parts.push(first);
    }
    parts.join(" -> ")
}

fn missing_text(missing: &[(usize, String, usize)]) -> String {
    missing
        .iter()
        .map(|(c, name, v)| format!("{name} (constituent {c}) in variable {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// An atomic piece of a composite, with the discriminant it was declared with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub signature: Signature,
    pub delta: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Identity { functor: String },
    Atomic,
    Composite(Vec<Constituent>),
}

/// Which constituent a transition came from, and which of its variables.
/// Both indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tag {
    pub constituent: usize,
    pub variable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformation {
    signature: Signature,
    graph: GcMorphism,
    provenance: Provenance,
    tags: Vec<Tag>,
    /// Places of the `k + 1` functor interfaces of a chain of `k` constituents.
    interfaces: Vec<Vec<usize>>,
}

impl Transformation {
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn name(&self) -> &str {
        &self.signature.name
    }

    pub fn graph(&self) -> &GcMorphism {
        &self.graph
    }

    pub fn delta(&self) -> &[bool] {
        self.graph.delta()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn interfaces(&self) -> &[Vec<usize>] {
        &self.interfaces
    }

    pub fn vars(&self) -> usize {
        self.signature.ty.vars
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.provenance, Provenance::Identity { .. })
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.signature.name = name.into();
        self
    }

    /// Forgets the internal structure: an atomic transformation with the same
    /// signature and discriminant.
    pub fn collapsed(&self) -> Transformation {
        make_atomic(self.signature.clone(), self.delta().to_vec()).expect("a valid transformation collapses to a valid atomic one")
    }

    /// The transition carrying a given tag.
    pub fn transition_of(&self, tag: Tag) -> Option<usize> {
        self.tags.iter().position(|&t| t == tag)
    }
}

pub fn make_atomic(s: Signature, delta: Vec<bool>) -> Result<Transformation, DinatError> {
    s.validate().map_err(DinatError::InvalidSignature)?;
    if delta.len() != s.ty.vars {
        return Err(DinatError::DeltaLength {
            name: s.name.clone(),
            got: delta.len(),
            want: s.ty.vars,
        });
    }
    let cospan = standard_graph(&s);
    let (a, b) = (s.dom.len(), s.cod.len());
    let graph = GcMorphism::new(cospan, delta)?;
    Ok(Transformation {
        tags: (1..=s.ty.vars).map(|v| Tag { constituent: 1, variable: v }).collect(),
        interfaces: vec![(0..a).collect(), (a..a + b).collect()],
        signature: s,
        graph,
        provenance: Provenance::Atomic,
    })
}

pub fn identity_of(functor: &str, alpha: &[Variance]) -> Result<Transformation, DinatError> {
    let ty = CospanType::new((1..=alpha.len()).collect(), (1..=alpha.len()).collect(), alpha.len())?;
    let signature = Signature::new(format!("id_{functor}"), alpha.to_vec(), alpha.to_vec(), ty)?.with_functors(functor, functor);
    Ok(Transformation {
        signature,
        graph: gc_identity(alpha),
        provenance: Provenance::Identity { functor: functor.to_string() },
        tags: Vec::new(),
        interfaces: vec![(0..alpha.len()).collect()],
    })
}

pub fn decompose(t: &Transformation) -> Vec<Constituent> {
    match &t.provenance {
        Provenance::Identity { .. } => Vec::new(),
        Provenance::Atomic => vec![Constituent {
            signature: t.signature.clone(),
            delta: t.delta().to_vec(),
        }],
        Provenance::Composite(cs) => cs.clone(),
    }
}

fn check_interface(phi: &Transformation, psi: &Transformation) -> Result<(), DinatError> {
    if phi.signature.cod != psi.signature.dom {
        return Err(DinatError::InterfaceMismatch(format!(
            "{} has codomain {} but {} has domain {}",
            phi.name(),
            format_variances(&phi.signature.cod),
            psi.name(),
            format_variances(&psi.signature.dom)
        )));
    }
    if let (Some(g), Some(g2)) = (&phi.signature.cod_functor, &psi.signature.dom_functor) {
        if g != g2 {
            return Err(DinatError::InterfaceMismatch(format!(
                "{} ends in functor {g} but {} starts at {g2}",
                phi.name(),
                psi.name()
            )));
        }
    }
    Ok(())
}

/// `psi ∘ phi`: glue the graphs and re-derive the discriminant.
pub fn vcompose(phi: &Transformation, psi: &Transformation) -> Result<Transformation, DinatError> {
    check_interface(phi, psi)?;
    if phi.is_identity() {
        return Ok(psi.clone());
    }
    if psi.is_identity() {
        return Ok(phi.clone());
    }
    let (graph, glued) = compose_gc_glued(&phi.graph, &psi.graph)?;
    let ty = glued.pushout.composite(&phi.signature.ty, &psi.signature.ty);
    debug_assert_eq!(graphcat::skeleton(graph.cospan()), ty);
    let signature = Signature {
        name: format!("{}\u{2218}{}", psi.name(), phi.name()),
        dom: phi.signature.dom.clone(),
        cod: psi.signature.cod.clone(),
        ty,
        dom_functor: phi.signature.dom_functor.clone(),
        cod_functor: psi.signature.cod_functor.clone(),
    };
    let first = decompose(phi);
    let offset = first.len();
    let mut constituents = first;
    constituents.extend(decompose(psi));

    let mut tags = phi.tags.clone();
    tags.extend(psi.tags.iter().map(|t| Tag {
        constituent: t.constituent + offset,
        variable: t.variable,
    }));

    let mut interfaces: Vec<Vec<usize>> = phi.interfaces.iter().map(|ps| ps.iter().map(|&p| glued.first_places[p]).collect()).collect();
    interfaces.extend(psi.interfaces[1..].iter().map(|ps| ps.iter().map(|&p| glued.second_places[p]).collect()));
    Ok(Transformation {
        signature,
        graph,
        provenance: Provenance::Composite(constituents),
        tags,
        interfaces,
    })
}

/// Substitutes `phi` into variable `i` of `psi`. The result is atomic.
pub fn hcompose(phi: &Transformation, psi: &Transformation, i: usize) -> Result<Transformation, DinatError> {
    let m = psi.vars();
    if i == 0 || i > m {
        return Err(DinatError::VarIndexOutOfRange { index: i, vars: m });
    }
    if !psi.delta()[i - 1] {
        return Err(DinatError::PsiNotDinaturalAtI {
            name: psi.name().to_string(),
            index: i,
        });
    }
    let signature = hcomp_signature(&phi.signature, &psi.signature, i)?;
    let mut delta = psi.delta()[..i - 1].to_vec();
    delta.extend_from_slice(phi.delta());
    delta.extend_from_slice(&psi.delta()[i..]);
    make_atomic(signature, delta)
}

/// Same signature up to renaming variables, and isomorphic graphs with
/// matching discriminants.
pub fn equivalent(t1: &Transformation, t2: &Transformation) -> Result<bool, DinatError> {
    if permutation_equivalent(&t1.signature, &t2.signature).is_none() {
        return Ok(false);
    }
    Ok(graphcat::iso_equal(&t1.graph, &t2.graph)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub constituent_index: usize,
    pub constituent_name: String,
    pub variable_index: usize,
    /// 0-based transition of the full net.
    pub transition_id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTrace {
    /// 1-based.
    pub component: usize,
    /// Marked places (0-based, full net) before and after.
    pub initial: Vec<usize>,
    pub steps: Vec<WitnessStep>,
    pub terminal: Vec<usize>,
}

impl WitnessTrace {
    pub fn lines(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| format!("apply dinaturality of {} in variable {}", s.constituent_name, s.variable_index))
            .collect()
    }
}

struct ComponentView {
    places: Vec<usize>,
    transitions: Vec<usize>,
    net: petri::PetriNet,
}

fn component_view(t: &Transformation, component: usize) -> Result<ComponentView, DinatError> {
    let vars = t.graph.cospan().num_components();
    if component == 0 || component > vars {
        return Err(DinatError::VarIndexOutOfRange { index: component, vars });
    }
    let c = t.graph.cospan().components().swap_remove(component - 1);
    let net = t.graph.cospan().net().restrict(&c.places, &c.transitions);
    Ok(ComponentView {
        places: c.places,
        transitions: c.transitions,
        net,
    })
}

/// Constituent variables in a component that were not declared dinatural.
pub fn missing_dinaturality(t: &Transformation, component: usize) -> Result<Vec<(usize, String, usize)>, DinatError> {
    let view = component_view(t, component)?;
    let constituents = decompose(t);
    let mut missing: Vec<(usize, String, usize)> = Vec::new();
    for &tr in &view.transitions {
        let tag = t.tags[tr];
        let c = &constituents[tag.constituent - 1];
        if !c.delta[tag.variable - 1] {
            let entry = (tag.constituent, c.signature.name.clone(), tag.variable);
            if !missing.contains(&entry) {
                missing.push(entry);
            }
        }
    }
    Ok(missing)
}

/// A firing sequence for one component, read as a chain of hexagons.
pub fn witness(t: &Transformation, component: usize) -> Result<WitnessTrace, DinatError> {
    let view = component_view(t, component)?;
    if let Some(cycle) = petri::find_cycle(&view.net) {
        return Err(DinatError::ComponentCyclic {
            component,
            cycle: cycle.iter().map(|&k| view.transitions[k]).collect(),
        });
    }
    let missing = missing_dinaturality(t, component)?;
    if !missing.is_empty() {
        return Err(DinatError::MissingDinaturality { component, missing });
    }
    let constituents = decompose(t);
    let order = petri::topo_fire(&view.net)?;
    let steps = order
        .iter()
        .map(|&k| {
            let tr = view.transitions[k];
            let tag = t.tags[tr];
            WitnessStep {
                constituent_index: tag.constituent,
                constituent_name: constituents[tag.constituent - 1].signature.name.clone(),
                variable_index: tag.variable,
                transition_id: tr,
            }
        })
        .collect();
    let lift = |ps: Vec<usize>| ps.into_iter().map(|k| view.places[k]).collect();
    Ok(WitnessTrace {
        component,
        initial: lift(petri::m0(&view.net).marked_places()),
        steps,
        terminal: lift(petri::md(&view.net).marked_places()),
    })
}

/// Replays an order of full-net transitions inside one component from
/// `(M0, L ≡ B)` and checks it ends at `(Md, L ≡ A)`.
pub fn replay_order(t: &Transformation, component: usize, order: &[usize]) -> Result<Vec<LabelledMarking>, DinatError> {
    let view = component_view(t, component)?;
    let local: Vec<usize> = order
        .iter()
        .map(|tr| view.transitions.iter().position(|x| x == tr).ok_or(PetriError::UnknownTransition(*tr)))
        .collect::<Result<_, _>>()?;
    Ok(petri::replay(&view.net, &local)?)
}
