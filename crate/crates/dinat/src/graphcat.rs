//! Nets with a boundary: standard graphs, gluing, skeletons and the
//! discriminant composition law.

use std::collections::HashMap;

use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::petri::{self, Component, PetriError, PetriNet, Vertex};
use crate::signature::{pushout_types, CospanType, Pushout, Signature, SignatureError, Variance, VarianceList};

pub const DEFAULT_MAX_ISO_NODES: usize = 64;
pub const MAX_ISO_NODES_ENV: &str = "DINAT_MAX_ISO_NODES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("{side} boundary has {got} entries for {want} slots")]
    BoundaryLength { side: &'static str, got: usize, want: usize },
    #[error("{side} boundary slot {slot} points at missing place p{place}")]
    BoundaryOutOfRange { side: &'static str, slot: usize, place: usize },
    #[error("{side} boundary is not injective")]
    NotInjective { side: &'static str },
    #[error("place p{place} breaks the source/sink condition of the boundary")]
    SourceSinkMismatch { place: usize },
    #[error("component ordering is invalid: {0}")]
    BadAnchors(String),
    #[error("cannot glue: codomain {left} against domain {right}")]
    ArityMismatch { left: String, right: String },
    #[error("discriminant has {got} entries for {want} components")]
    DeltaLength { got: usize, want: usize },
    #[error("discriminant claims component {0} but it is cyclic")]
    DeltaOnCyclic(usize),
    #[error("iso search limited to {limit} nodes, net has {nodes}")]
    SizeLimitExceeded { nodes: usize, limit: usize },
}

/// A net with injective boundary maps from the domain and codomain slots.
///
/// `anchors` fixes the order of the connected components: the `x`-th
/// component is the one containing `anchors[x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCospan {
    dom: VarianceList,
    cod: VarianceList,
    net: PetriNet,
    left: Vec<usize>,
    right: Vec<usize>,
    anchors: Vec<Vertex>,
}

fn check_boundary(side: &'static str, map: &[usize], want: usize, places: usize) -> Result<(), GraphError> {
    if map.len() != want {
        return Err(GraphError::BoundaryLength { side, got: map.len(), want });
    }
    let mut seen = vec![false; places];
    for (slot, &p) in map.iter().enumerate() {
        if p >= places {
            return Err(GraphError::BoundaryOutOfRange {
                side,
                slot: slot + 1,
                place: p + 1,
            });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(GraphError::NotInjective { side });
        }
    }
    Ok(())
}

impl GraphCospan {
    /// Validates the boundary. Without explicit anchors the components are
    /// ordered as in [`petri::components`].
    pub fn new(
        dom: VarianceList,
        cod: VarianceList,
        net: PetriNet,
        left: Vec<usize>,
        right: Vec<usize>,
        anchors: Option<Vec<Vertex>>,
    ) -> Result<Self, GraphError> {
        let places = net.num_places();
        check_boundary("left", &left, dom.len(), places)?;
        check_boundary("right", &right, cod.len(), places)?;

        let mut want_source = vec![false; places];
        let mut want_sink = vec![false; places];
        for (&p, &v) in left.iter().zip(&dom) {
            match v {
                Variance::Co => want_source[p] = true,
                Variance::Contra => want_sink[p] = true,
            }
        }
        for (&p, &v) in right.iter().zip(&cod) {
            match v {
                Variance::Co => want_sink[p] = true,
                Variance::Contra => want_source[p] = true,
            }
        }
        for p in 0..places {
            let is_source = net.producer(p).is_none();
            let is_sink = net.consumer(p).is_none();
            if is_source != want_source[p] || is_sink != want_sink[p] {
                return Err(GraphError::SourceSinkMismatch { place: p + 1 });
            }
        }

        let anchors = match anchors {
            Some(a) => a,
            None => petri::components(&net)
                .iter()
                .map(|c| match c.places.first() {
                    Some(&p) => Vertex::Place(p),
                    None => Vertex::Transition(c.transitions[0]),
                })
                .collect(),
        };
        let g = GraphCospan {
            dom,
            cod,
            net,
            left,
            right,
            anchors,
        };
        g.check_anchors()?;
        Ok(g)
    }

    fn check_anchors(&self) -> Result<(), GraphError> {
        let roots = petri::component_roots(&self.net);
        let distinct = {
            let mut r: Vec<usize> = roots.clone();
            r.sort_unstable();
            r.dedup();
            r.len()
        };
        if self.anchors.len() != distinct {
            return Err(GraphError::BadAnchors(format!("{} anchors for {} components", self.anchors.len(), distinct)));
        }
        let mut seen = HashMap::new();
        for (x, &a) in self.anchors.iter().enumerate() {
            let idx = self.vertex_index(a).ok_or_else(|| GraphError::BadAnchors(format!("{a} is not in the net")))?;
            if let Some(prev) = seen.insert(roots[idx], x) {
                return Err(GraphError::BadAnchors(format!("anchors {} and {} share a component", prev + 1, x + 1)));
            }
        }
        Ok(())
    }

    fn vertex_index(&self, v: Vertex) -> Option<usize> {
        match v {
            Vertex::Place(p) if p < self.net.num_places() => Some(p),
            Vertex::Transition(t) if t < self.net.num_transitions() => Some(self.net.num_places() + t),
            _ => None,
        }
    }

    pub fn dom(&self) -> &[Variance] {
        &self.dom
    }

    pub fn cod(&self) -> &[Variance] {
        &self.cod
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn anchors(&self) -> &[Vertex] {
        &self.anchors
    }

    pub fn num_components(&self) -> usize {
        self.anchors.len()
    }

    /// 0-based component index of every place, then of every transition.
    pub fn component_index(&self) -> Vec<usize> {
        let roots = petri::component_roots(&self.net);
        let mut of_root = HashMap::new();
        for (x, &a) in self.anchors.iter().enumerate() {
            of_root.insert(roots[self.vertex_index(a).unwrap()], x);
        }
        roots.iter().map(|r| of_root[r]).collect()
    }

    pub fn component_of(&self, v: Vertex) -> usize {
        self.component_index()[self.vertex_index(v).expect("vertex in net")]
    }

    /// Components in anchor order.
    pub fn components(&self) -> Vec<Component> {
        let idx = self.component_index();
        let p = self.net.num_places();
        let mut out = vec![Component::default(); self.anchors.len()];
        for (x, &c) in idx.iter().enumerate() {
            if x < p {
                out[c].places.push(x);
            } else {
                out[c].transitions.push(x - p);
            }
        }
        out
    }

    /// Whether a place lies on the boundary, and with which variance.
    pub fn boundary_variance(&self, p: usize) -> Option<Variance> {
        self.left
            .iter()
            .position(|&q| q == p)
            .map(|i| self.dom[i])
            .or_else(|| self.right.iter().position(|&q| q == p).map(|j| self.cod[j]))
    }
}

pub fn standard_graph_of(dom: &[Variance], cod: &[Variance], ty: &CospanType) -> GraphCospan {
    let a = dom.len();
    let mut inputs = vec![Vec::new(); ty.vars];
    let mut outputs = vec![Vec::new(); ty.vars];
    for (p, (&v, &t)) in dom.iter().zip(&ty.sigma).enumerate() {
        match v {
            Variance::Co => inputs[t - 1].push(p),
            Variance::Contra => outputs[t - 1].push(p),
        }
    }
    for (q, (&v, &t)) in cod.iter().zip(&ty.tau).enumerate() {
        match v {
            Variance::Co => outputs[t - 1].push(a + q),
            Variance::Contra => inputs[t - 1].push(a + q),
        }
    }
    let net = PetriNet::new(a + cod.len(), inputs, outputs).expect("standard graphs are FBCF");
    GraphCospan::new(
        dom.to_vec(),
        cod.to_vec(),
        net,
        (0..a).collect(),
        (a..a + cod.len()).collect(),
        Some((0..ty.vars).map(Vertex::Transition).collect()),
    )
    .expect("standard graphs satisfy the boundary conditions")
}

/// One place per slot, one transition per variable.
pub fn standard_graph(s: &Signature) -> GraphCospan {
    standard_graph_of(&s.dom, &s.cod, &s.ty)
}

/// A glued cospan together with where the pieces went.
#[derive(Debug, Clone)]
pub struct Glued {
    pub cospan: GraphCospan,
    pub pushout: Pushout,
    /// Place of the glued net for every place of the first net.
    pub first_places: Vec<usize>,
    /// Place of the glued net for every place of the second net.
    pub second_places: Vec<usize>,
    /// Transitions of the second net are shifted by this much.
    pub second_transition_offset: usize,
}

/// Pushout of `u` and `v` along the shared boundary `u.right ~ v.left`.
pub fn glue(u: &GraphCospan, v: &GraphCospan) -> Result<Glued, GraphError> {
    if u.cod != v.dom {
        return Err(GraphError::ArityMismatch {
            left: crate::signature::format_variances(&u.cod),
            right: crate::signature::format_variances(&v.dom),
        });
    }
    let pu = u.net.num_places();
    let tu = u.net.num_transitions();
    let first_places: Vec<usize> = (0..pu).collect();
    let mut second_places = vec![usize::MAX; v.net.num_places()];
    for (j, &q) in v.left.iter().enumerate() {
        second_places[q] = u.right[j];
    }
    let mut fresh = pu;
    for slot in second_places.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = fresh;
        fresh += 1;
    }

    let mut inputs: Vec<Vec<usize>> = (0..tu).map(|t| u.net.inputs(t).to_vec()).collect();
    let mut outputs: Vec<Vec<usize>> = (0..tu).map(|t| u.net.outputs(t).to_vec()).collect();
    for t in 0..v.net.num_transitions() {
        inputs.push(v.net.inputs(t).iter().map(|&q| second_places[q]).collect());
        outputs.push(v.net.outputs(t).iter().map(|&q| second_places[q]).collect());
    }
    let net = PetriNet::new(fresh, inputs, outputs)?;

    let pushout = pushout_types(&skeleton(u), &skeleton(v))?;
    let mut anchors: Vec<Option<Vertex>> = vec![None; pushout.vars];
    for (y, &x) in pushout.zeta.iter().enumerate() {
        anchors[x - 1].get_or_insert(u.anchors[y]);
    }
    for (z, &x) in pushout.xi.iter().enumerate() {
        anchors[x - 1].get_or_insert(match v.anchors[z] {
            Vertex::Place(q) => Vertex::Place(second_places[q]),
            Vertex::Transition(t) => Vertex::Transition(tu + t),
        });
    }
    let anchors = anchors.into_iter().map(|a| a.expect("every class has a representative")).collect();
    let right = v.right.iter().map(|&q| second_places[q]).collect();
    let cospan = GraphCospan::new(u.dom.clone(), v.cod.clone(), net, u.left.clone(), right, Some(anchors))?;
    Ok(Glued {
        cospan,
        pushout,
        first_places,
        second_places,
        second_transition_offset: tu,
    })
}

/// `σ(i)` is the component of `left(i)`, `τ(j)` that of `right(j)`.
pub fn skeleton(g: &GraphCospan) -> CospanType {
    let idx = g.component_index();
    CospanType {
        vars: g.num_components(),
        sigma: g.left.iter().map(|&p| idx[p] + 1).collect(),
        tau: g.right.iter().map(|&p| idx[p] + 1).collect(),
    }
}

pub fn coherent(g: &GraphCospan, t: &CospanType) -> bool {
    g.left.len() == t.dom_arity() && g.right.len() == t.cod_arity() && skeleton(g) == *t
}

/// Every component becomes a single transition touching only boundary places.
pub fn collapse(g: &GraphCospan) -> GraphCospan {
    standard_graph_of(&g.dom, &g.cod, &skeleton(g))
}

/// A cospan with a discriminant: `delta[x]` says component `x` is known to be
/// dinatural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcMorphism {
    cospan: GraphCospan,
    delta: Vec<bool>,
}

impl GcMorphism {
    pub fn new(cospan: GraphCospan, delta: Vec<bool>) -> Result<Self, GraphError> {
        if delta.len() != cospan.num_components() {
            return Err(GraphError::DeltaLength {
                got: delta.len(),
                want: cospan.num_components(),
            });
        }
        for (x, c) in cospan.components().iter().enumerate() {
            if delta[x] && !petri::is_component_acyclic(&cospan.net, c) {
                return Err(GraphError::DeltaOnCyclic(x + 1));
            }
        }
        Ok(GcMorphism { cospan, delta })
    }

    pub fn cospan(&self) -> &GraphCospan {
        &self.cospan
    }

    pub fn delta(&self) -> &[bool] {
        &self.delta
    }
}

pub fn gc_identity(alpha: &[Variance]) -> GcMorphism {
    let k = alpha.len();
    let net = PetriNet::new(k, vec![], vec![]).unwrap();
    let cospan = GraphCospan::new(
        alpha.to_vec(),
        alpha.to_vec(),
        net,
        (0..k).collect(),
        (0..k).collect(),
        Some((0..k).map(Vertex::Place).collect()),
    )
    .expect("identity cospans are valid");
    GcMorphism { cospan, delta: vec![true; k] }
}

/// Glues the nets; a component is discriminated iff it is acyclic and every
/// component mapped onto it was.
pub fn compose_gc_glued(m1: &GcMorphism, m2: &GcMorphism) -> Result<(GcMorphism, Glued), GraphError> {
    let glued = glue(&m1.cospan, &m2.cospan)?;
    let g = &glued.cospan;
    let mut delta: Vec<bool> = g.components().iter().map(|c| petri::is_component_acyclic(g.net(), c)).collect();
    for (y, &x) in glued.pushout.zeta.iter().enumerate() {
        delta[x - 1] &= m1.delta[y];
    }
    for (z, &x) in glued.pushout.xi.iter().enumerate() {
        delta[x - 1] &= m2.delta[z];
    }
    let m = GcMorphism {
        cospan: glued.cospan.clone(),
        delta,
    };
    Ok((m, glued))
}

pub fn compose_gc(m1: &GcMorphism, m2: &GcMorphism) -> Result<GcMorphism, GraphError> {
    compose_gc_glued(m1, m2).map(|(m, _)| m)
}

/// Collapses the graph and keeps the discriminant component by component.
pub fn collapse_gc(m: &GcMorphism) -> GcMorphism {
    GcMorphism {
        cospan: collapse(&m.cospan),
        delta: m.delta.clone(),
    }
}

pub fn iso_node_limit() -> usize {
    std::env::var(MAX_ISO_NODES_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ISO_NODES)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeLabel {
    Place { left: Vec<usize>, right: Vec<usize>, delta: bool },
    Transition { delta: bool },
}

fn labelled_graph(m: &GcMorphism) -> DiGraph<NodeLabel, ()> {
    let c = &m.cospan;
    let idx = c.component_index();
    let p = c.net.num_places();
    let mut g = DiGraph::new();
    for (q, &x) in idx[..p].iter().enumerate() {
        let slots = |map: &[usize]| (0..map.len()).filter(|&i| map[i] == q).collect();
        g.add_node(NodeLabel::Place {
            left: slots(&c.left),
            right: slots(&c.right),
            delta: m.delta[x],
        });
    }
    for t in 0..c.net.num_transitions() {
        let n = g.add_node(NodeLabel::Transition { delta: m.delta[idx[p + t]] });
        for &q in c.net.inputs(t) {
            g.add_edge((q as u32).into(), n, ());
        }
        for &q in c.net.outputs(t) {
            g.add_edge(n, (q as u32).into(), ());
        }
    }
    g
}

/// Is there a net isomorphism commuting with both boundaries and carrying
/// each component onto one with the same discriminant?
pub fn iso_equal(m1: &GcMorphism, m2: &GcMorphism) -> Result<bool, GraphError> {
    iso_equal_with_limit(m1, m2, iso_node_limit())
}

pub fn iso_equal_with_limit(m1: &GcMorphism, m2: &GcMorphism, limit: usize) -> Result<bool, GraphError> {
    let size = |m: &GcMorphism| m.cospan.net.num_places() + m.cospan.net.num_transitions();
    let nodes = size(m1).max(size(m2));
    if nodes > limit {
        return Err(GraphError::SizeLimitExceeded { nodes, limit });
    }
    let (a, b) = (&m1.cospan, &m2.cospan);
    if a.dom != b.dom
        || a.cod != b.cod
        || a.net.num_places() != b.net.num_places()
        || a.net.num_transitions() != b.net.num_transitions()
        || a.num_components() != b.num_components()
    {
        return Ok(false);
    }
    let (g1, g2) = (labelled_graph(m1), labelled_graph(m2));
    Ok(is_isomorphic_matching(&g1, &g2, |x, y| x == y, |_, _| true))
}
