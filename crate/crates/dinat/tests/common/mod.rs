#![allow(dead_code)]

use std::collections::VecDeque;

use dinat::graphcat::{standard_graph, GcMorphism};
use dinat::petri::PetriNet;
use dinat::signature::{CospanType, Signature, Variance};
use proptest::prelude::*;

pub fn variance() -> impl Strategy<Value = Variance> {
    prop_oneof![Just(Variance::Co), Just(Variance::Contra)]
}

pub fn variances(max: usize) -> impl Strategy<Value = Vec<Variance>> {
    prop::collection::vec(variance(), 0..=max)
}

pub fn cospan_type(a: usize, b: usize, max_vars: usize) -> impl Strategy<Value = CospanType> {
    (1..=max_vars).prop_flat_map(move |n| {
        (prop::collection::vec(1..=n, a), prop::collection::vec(1..=n, b)).prop_map(move |(sigma, tau)| CospanType { vars: n, sigma, tau })
    })
}

pub fn signature_between(name: &'static str, dom: Vec<Variance>, cod: Vec<Variance>, max_vars: usize) -> impl Strategy<Value = Signature> {
    cospan_type(dom.len(), cod.len(), max_vars).prop_map(move |ty| Signature::new(name, dom.clone(), cod.clone(), ty).unwrap())
}

pub fn signature(max_arity: usize, max_vars: usize) -> impl Strategy<Value = Signature> {
    (variances(max_arity), variances(max_arity)).prop_flat_map(move |(d, c)| signature_between("s", d, c, max_vars))
}

/// `k` signatures, each ending where the next starts.
pub fn chain(k: usize, max_arity: usize, max_vars: usize) -> impl Strategy<Value = Vec<Signature>> {
    prop::collection::vec(variances(max_arity), k + 1).prop_flat_map(move |vs| {
        let names = ["f", "g", "h", "k", "l"];
        (0..k)
            .map(|j| signature_between(names[j % names.len()], vs[j].clone(), vs[j + 1].clone(), max_vars))
            .collect::<Vec<_>>()
    })
}

/// A standard graph with an arbitrary discriminant.
pub fn morphism(s: &Signature, bits: &[bool]) -> GcMorphism {
    let delta = (0..s.ty.vars).map(|x| bits.get(x).copied().unwrap_or(true)).collect();
    GcMorphism::new(standard_graph(s), delta).unwrap()
}

#[derive(Debug, Clone)]
pub struct NetSpec {
    pub places: usize,
    pub inputs: Vec<Vec<usize>>,
    pub outputs: Vec<Vec<usize>>,
}

impl NetSpec {
    pub fn build(&self) -> PetriNet {
        PetriNet::new(self.places, self.inputs.clone(), self.outputs.clone()).unwrap()
    }

    fn from_places(transitions: usize, places: &[(Option<usize>, Option<usize>)]) -> Self {
        let mut inputs = vec![Vec::new(); transitions];
        let mut outputs = vec![Vec::new(); transitions];
        for (p, &(prod, cons)) in places.iter().enumerate() {
            if let Some(t) = prod {
                outputs[t].push(p);
            }
            if let Some(t) = cons {
                inputs[t].push(p);
            }
        }
        NetSpec {
            places: places.len(),
            inputs,
            outputs,
        }
    }
}

/// Acyclic conflict-free nets: every internal place runs forward in a hidden
/// order of the transitions, which is then shuffled.
pub fn acyclic_net(max_transitions: usize) -> impl Strategy<Value = NetSpec> {
    (1..=max_transitions).prop_flat_map(|k| {
        (
            prop::collection::vec((0..=k, 0..=k), 0..=3 * k),
            Just((0..k).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(raw, perm)| {
                let places: Vec<(Option<usize>, Option<usize>)> = raw
                    .into_iter()
                    .map(|(x, y)| {
                        let x = (x < k).then_some(x);
                        let y = (y < k).then_some(y);
                        match (x, y) {
                            (Some(a), Some(b)) if a == b => (Some(a), None),
                            (Some(a), Some(b)) => (Some(a.min(b)), Some(a.max(b))),
                            other => other,
                        }
                    })
                    .map(|(x, y)| (x.map(|t| perm[t]), y.map(|t| perm[t])))
                    .collect();
                NetSpec::from_places(k, &places)
            })
    })
}

/// Weakly connected nets containing a directed cycle and at least one place
/// that is a proper source or a proper sink.
pub fn cyclic_net() -> impl Strategy<Value = NetSpec> {
    (2usize..=4, 0usize..=2).prop_flat_map(|(c, e)| {
        let k = c + e;
        (
            prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), e),
            prop::collection::vec((0..k, any::<bool>()), 1..=2),
        )
            .prop_map(move |(attach, ends)| {
                let mut places: Vec<(Option<usize>, Option<usize>)> = (0..c).map(|i| (Some(i), Some((i + 1) % c))).collect();
                for (j, (r, forward)) in attach.into_iter().enumerate() {
                    let t = c + j;
                    let r = r.index(t);
                    places.push(if forward { (Some(r), Some(t)) } else { (Some(t), Some(r)) });
                }
                for (t, source) in ends {
                    places.push(if source { (None, Some(t)) } else { (Some(t), None) });
                }
                NetSpec::from_places(k, &places)
            })
    })
}

/// Components by breadth-first search over the undirected bipartite graph:
/// returns a component id per place, then per transition.
pub fn bfs_components(net: &PetriNet) -> Vec<usize> {
    let (p, t) = (net.num_places(), net.num_transitions());
    let mut adj = vec![Vec::new(); p + t];
    for tr in 0..t {
        for &q in net.inputs(tr).iter().chain(net.outputs(tr)) {
            adj[q].push(p + tr);
            adj[p + tr].push(q);
        }
    }
    let mut comp = vec![usize::MAX; p + t];
    let mut next = 0;
    for start in 0..p + t {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Number of distinct values, i.e. of components.
pub fn count_distinct(xs: &[usize]) -> usize {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// The pushout of two types as equivalence classes on the disjoint union of
/// their variables, by repeated relabelling until nothing changes. Returns
/// the class of every first and second variable, numbered from 0.
pub fn pushout_classes(t1: &CospanType, t2: &CospanType) -> (Vec<usize>, Vec<usize>) {
    let n = t1.vars + t2.vars;
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for (&a, &b) in t1.tau.iter().zip(&t2.sigma) {
            let (x, y) = (a - 1, t1.vars + b - 1);
            let (lx, ly) = (label[x], label[y]);
            if lx != ly {
                let (lo, hi) = (lx.min(ly), lx.max(ly));
                for l in label.iter_mut().filter(|l| **l == hi) {
                    *l = lo;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut ids: Vec<usize> = label.clone();
    ids.sort_unstable();
    ids.dedup();
    let idx = |l: usize| ids.iter().position(|&x| x == l).unwrap();
    let first = (0..t1.vars).map(|x| idx(label[x])).collect();
    let second = (0..t2.vars).map(|x| idx(label[t1.vars + x])).collect();
    (first, second)
}

/// Fires transitions one by one on a plain token vector. `None` if some
/// transition is not enabled when its turn comes.
pub fn run_tokens(net: &PetriNet, order: &[usize]) -> Option<Vec<u32>> {
    let mut m: Vec<u32> = (0..net.num_places()).map(|p| (net.producer(p).is_none()) as u32).collect();
    for &t in order {
        for &p in net.inputs(t) {
            if m[p] == 0 {
                return None;
            }
            m[p] -= 1;
        }
        for &p in net.outputs(t) {
            m[p] += 1;
        }
    }
    Some(m)
}

pub fn sink_marking(net: &PetriNet) -> Vec<u32> {
    (0..net.num_places()).map(|p| (net.consumer(p).is_none()) as u32).collect()
}
