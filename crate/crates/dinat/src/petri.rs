//! Forward-backward conflict free Petri nets and their token game.
//!
//! Places and transitions are numbered from 0 here; documents and messages
//! print them 1-based.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error("transition t{transition} refers to place p{place} but the net has {places} places")]
    BadPlace { transition: usize, place: usize, places: usize },
    #[error("transition t{transition} lists place p{place} twice")]
    DuplicateArc { transition: usize, place: usize },
    #[error("transition t{transition} has place p{place} as both input and output")]
    SelfLoop { transition: usize, place: usize },
    #[error("place p{place} has more than one {side} transition")]
    NotConflictFree { place: usize, side: &'static str },
    #[error("transition t{0} is not enabled")]
    NotEnabled(usize),
    #[error("transition t{0} is labelled A")]
    WrongLabel(usize),
    #[error("no transition t{0}")]
    UnknownTransition(usize),
    #[error("marking has {got} entries, net has {want} places")]
    MarkingSize { got: usize, want: usize },
    #[error("net is cyclic: {}", format_cycle(.0))]
    Cyclic(Vec<usize>),
    #[error("state space exceeded the token cap of {cap} per place or {states} states")]
    StateSpaceExceeded { cap: u32, states: usize },
    #[error("transition t{0} fired more than once")]
    FiredTwice(usize),
    #[error("firing sequence does not end at the sink marking")]
    DoesNotReachSinks,
}

fn format_cycle(c: &[usize]) -> String {
    let mut parts: Vec<String> = c.iter().map(|t| format!("t{}", t + 1)).collect();
    if let Some(first) = parts.first().cloned() {
        parts.push(first);
    }
    parts.join(" -> ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Place(usize),
    Transition(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Place(p) => write!(f, "p{}", p + 1),
            Vertex::Transition(t) => write!(f, "t{}", t + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: usize,
    inputs: Vec<Vec<usize>>,
    outputs: Vec<Vec<usize>>,
    pre: Vec<Option<usize>>,
    post: Vec<Option<usize>>,
}

impl PetriNet {
    /// Builds a net from `•t` and `t•` lists, rejecting anything that is not
    /// FBCF or has a self-loop.
    pub fn new(places: usize, inputs: Vec<Vec<usize>>, outputs: Vec<Vec<usize>>) -> Result<Self, PetriError> {
        assert_eq!(inputs.len(), outputs.len(), "inputs and outputs must cover the same transitions");
        let mut pre = vec![None; places];
        let mut post = vec![None; places];
        for t in 0..inputs.len() {
            for &p in inputs[t].iter().chain(&outputs[t]) {
                if p >= places {
                    return Err(PetriError::BadPlace {
                        transition: t,
                        place: p,
                        places,
                    });
                }
            }
            for &p in &inputs[t] {
                if outputs[t].contains(&p) {
                    return Err(PetriError::SelfLoop { transition: t, place: p });
                }
                match post[p] {
                    Some(u) if u == t => return Err(PetriError::DuplicateArc { transition: t, place: p }),
                    Some(_) => return Err(PetriError::NotConflictFree { place: p, side: "output" }),
                    None => post[p] = Some(t),
                }
            }
            for &p in &outputs[t] {
                match pre[p] {
                    Some(u) if u == t => return Err(PetriError::DuplicateArc { transition: t, place: p }),
                    Some(_) => return Err(PetriError::NotConflictFree { place: p, side: "input" }),
                    None => pre[p] = Some(t),
                }
            }
        }
        Ok(PetriNet {
            places,
            inputs,
            outputs,
            pre,
            post,
        })
    }

    pub fn num_places(&self) -> usize {
        self.places
    }

    pub fn num_transitions(&self) -> usize {
        self.inputs.len()
    }

    /// `•t`
    pub fn inputs(&self, t: usize) -> &[usize] {
        &self.inputs[t]
    }

    /// `t•`
    pub fn outputs(&self, t: usize) -> &[usize] {
        &self.outputs[t]
    }

    /// `•p`, the unique transition feeding `p`.
    pub fn producer(&self, p: usize) -> Option<usize> {
        self.pre[p]
    }

    /// `p•`, the unique transition consuming `p`.
    pub fn consumer(&self, p: usize) -> Option<usize> {
        self.post[p]
    }

    pub fn is_isolated(&self, p: usize) -> bool {
        self.pre[p].is_none() && self.post[p].is_none()
    }

    /// Keeps the given places and transitions (in the given order) and the
    /// arcs between them.
    pub fn restrict(&self, places: &[usize], transitions: &[usize]) -> PetriNet {
        let mut index = HashMap::new();
        for (k, &p) in places.iter().enumerate() {
            index.insert(p, k);
        }
        let keep = |ps: &[usize]| ps.iter().filter_map(|p| index.get(p).copied()).collect::<Vec<_>>();
        let inputs = transitions.iter().map(|&t| keep(&self.inputs[t])).collect();
        let outputs = transitions.iter().map(|&t| keep(&self.outputs[t])).collect();
        PetriNet::new(places.len(), inputs, outputs).expect("a restriction of a valid net is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Component {
    pub places: Vec<usize>,
    pub transitions: Vec<usize>,
}

impl Component {
    pub fn contains(&self, v: Vertex) -> bool {
        match v {
            Vertex::Place(p) => self.places.binary_search(&p).is_ok(),
            Vertex::Transition(t) => self.transitions.binary_search(&t).is_ok(),
        }
    }
}

/// Union-find over places `0..P` followed by transitions `P..P+T`; returns
/// the root of every vertex.
pub(crate) fn component_roots(net: &PetriNet) -> Vec<usize> {
    let p = net.num_places();
    let mut parent: Vec<usize> = (0..p + net.num_transitions()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for t in 0..net.num_transitions() {
        for &q in net.inputs(t).iter().chain(net.outputs(t)) {
            let (a, b) = (find(&mut parent, q), find(&mut parent, p + t));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..parent.len()).map(|x| find(&mut parent, x)).collect()
}

/// Weakly connected components. Components with places come first, ordered by
/// their least place; place-free components follow by least transition.
pub fn components(net: &PetriNet) -> Vec<Component> {
    let p = net.num_places();
    let roots = component_roots(net);
    let mut order: Vec<usize> = Vec::new();
    let mut by_root: HashMap<usize, Component> = HashMap::new();
    // Roots are least members and places precede transitions in the id space,
    // so scanning ids in order yields the required ordering.
    for (x, &r) in roots.iter().enumerate() {
        let c = by_root.entry(r).or_insert_with(|| {
            order.push(r);
            Component::default()
        });
        if x < p {
            c.places.push(x);
        } else {
            c.transitions.push(x - p);
        }
    }
    order.into_iter().map(|r| by_root.remove(&r).unwrap()).collect()
}

/// Some directed cycle, as the transitions along it, if one exists.
pub fn find_cycle(net: &PetriNet) -> Option<Vec<usize>> {
    let n = net.num_transitions();
    let succ = |t: usize| net.outputs(t).iter().filter_map(move |&p| net.consumer(p));
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, succ(start).collect())];
        state[start] = 1;
        while let Some((t, pending)) = stack.last_mut() {
            let t = *t;
            match pending.pop() {
                Some(u) if state[u] == 1 => {
                    let pos = stack.iter().position(|(v, _)| *v == u).unwrap();
                    return Some(stack[pos..].iter().map(|(v, _)| *v).collect());
                }
                Some(u) if state[u] == 0 => {
                    state[u] = 1;
                    stack.push((u, succ(u).collect()));
                }
                Some(_) => {}
                None => {
                    state[t] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

pub fn is_acyclic(net: &PetriNet) -> bool {
    find_cycle(net).is_none()
}

/// Acyclicity of one component of `components(net)`.
pub fn is_component_acyclic(net: &PetriNet, component: &Component) -> bool {
    is_acyclic(&net.restrict(&component.places, &component.transitions))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcesSinks {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub proper_sources: Vec<usize>,
    pub proper_sinks: Vec<usize>,
}

pub fn sources_sinks(net: &PetriNet) -> SourcesSinks {
    let all = 0..net.num_places();
    let sources: Vec<usize> = all.clone().filter(|&p| net.producer(p).is_none()).collect();
    let sinks: Vec<usize> = all.filter(|&p| net.consumer(p).is_none()).collect();
    let proper = |ps: &[usize]| ps.iter().copied().filter(|&p| !net.is_isolated(p)).collect();
    SourcesSinks {
        proper_sources: proper(&sources),
        proper_sinks: proper(&sinks),
        sources,
        sinks,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn empty(places: usize) -> Self {
        Marking(vec![0; places])
    }

    pub fn from_places(places: usize, marked: &[usize]) -> Self {
        let mut m = Marking::empty(places);
        for &p in marked {
            m.0[p] = 1;
        }
        m
    }

    pub fn marked_places(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&p| self.0[p] > 0).collect()
    }

    pub fn tokens(&self, p: usize) -> u32 {
        self.0[p]
    }
}

/// One token on every source.
pub fn m0(net: &PetriNet) -> Marking {
    Marking::from_places(net.num_places(), &sources_sinks(net).sources)
}

/// One token on every sink.
pub fn md(net: &PetriNet) -> Marking {
    Marking::from_places(net.num_places(), &sources_sinks(net).sinks)
}

fn check_marking(net: &PetriNet, m: &Marking) -> Result<(), PetriError> {
    if m.0.len() != net.num_places() {
        return Err(PetriError::MarkingSize {
            got: m.0.len(),
            want: net.num_places(),
        });
    }
    Ok(())
}

pub fn is_enabled(net: &PetriNet, m: &Marking, t: usize) -> bool {
    net.inputs(t).iter().all(|&p| m.0[p] >= 1)
}

pub fn fire(net: &PetriNet, m: &Marking, t: usize) -> Result<Marking, PetriError> {
    check_marking(net, m)?;
    if t >= net.num_transitions() {
        return Err(PetriError::UnknownTransition(t));
    }
    if !is_enabled(net, m, t) {
        return Err(PetriError::NotEnabled(t));
    }
    let mut next = m.clone();
    for &p in net.inputs(t) {
        next.0[p] -= 1;
    }
    for &p in net.outputs(t) {
        next.0[p] += 1;
    }
    Ok(next)
}

/// Fires every transition once, always picking the least enabled one.
pub fn topo_fire(net: &PetriNet) -> Result<Vec<usize>, PetriError> {
    if let Some(cycle) = find_cycle(net) {
        return Err(PetriError::Cyclic(cycle));
    }
    let n = net.num_transitions();
    let mut m = m0(net);
    let mut fired = vec![false; n];
    let mut seq = Vec::with_capacity(n);
    while seq.len() < n {
        let t = (0..n)
            .find(|&t| !fired[t] && is_enabled(net, &m, t))
            .expect("an acyclic net always has an enabled unfired transition");
        m = fire(net, &m, t)?;
        fired[t] = true;
        seq.push(t);
    }
    Ok(seq)
}

pub const DEFAULT_TOKEN_CAP: u32 = 2;
const MAX_STATES: usize = 1 << 20;

/// Breadth-first search for a firing sequence from `from` to `to`, never
/// letting a place exceed `cap` tokens. `Ok(None)` means `to` is unreachable
/// within the cap. A target above the cap, or more than `MAX_STATES` states,
/// is `StateSpaceExceeded`.
pub fn reachable_bfs(net: &PetriNet, from: &Marking, to: &Marking, cap: u32) -> Result<Option<Vec<usize>>, PetriError> {
    check_marking(net, from)?;
    check_marking(net, to)?;
    if to.0.iter().any(|&k| k > cap) {
        return Err(PetriError::StateSpaceExceeded { cap, states: 0 });
    }
    let mut parent: HashMap<Marking, Option<(Marking, usize)>> = HashMap::new();
    parent.insert(from.clone(), None);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(m) = queue.pop_front() {
        if &m == to {
            let mut seq = Vec::new();
            let mut cur = m;
            while let Some(Some((prev, t))) = parent.get(&cur) {
                seq.push(*t);
                cur = prev.clone();
            }
            seq.reverse();
            return Ok(Some(seq));
        }
        for t in 0..net.num_transitions() {
            if !is_enabled(net, &m, t) {
                continue;
            }
            let next = fire(net, &m, t)?;
            if next.0.iter().any(|&k| k > cap) {
                continue;
            }
            if !parent.contains_key(&next) {
                if parent.len() >= MAX_STATES {
                    return Err(PetriError::StateSpaceExceeded { cap, states: MAX_STATES });
                }
                parent.insert(next.clone(), Some((m.clone(), t)));
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledMarking {
    pub marking: Marking,
    pub labels: Vec<Label>,
}

impl LabelledMarking {
    /// `(M0, L ≡ B)`
    pub fn initial(net: &PetriNet) -> Self {
        LabelledMarking {
            marking: m0(net),
            labels: vec![Label::B; net.num_transitions()],
        }
    }

    /// `(Md, L ≡ A)`
    pub fn terminal(net: &PetriNet) -> Self {
        LabelledMarking {
            marking: md(net),
            labels: vec![Label::A; net.num_transitions()],
        }
    }

    pub fn is_valid(&self, net: &PetriNet) -> bool {
        if self.marking.0.len() != net.num_places() || self.labels.len() != net.num_transitions() {
            return false;
        }
        (0..net.num_places()).all(|p| {
            let before = net.producer(p).map(|t| self.labels[t]);
            let after = net.consumer(p).map(|t| self.labels[t]);
            match self.marking.0[p] {
                0 => before.is_none() || after.is_none() || before == after,
                1 => before.unwrap_or(Label::A) == Label::A && after.unwrap_or(Label::B) == Label::B,
                _ => false,
            }
        })
    }
}

pub fn fire_labelled(net: &PetriNet, lm: &LabelledMarking, t: usize) -> Result<LabelledMarking, PetriError> {
    if t >= net.num_transitions() {
        return Err(PetriError::UnknownTransition(t));
    }
    if lm.labels[t] == Label::A {
        return Err(PetriError::WrongLabel(t));
    }
    let marking = fire(net, &lm.marking, t)?;
    let mut labels = lm.labels.clone();
    labels[t] = Label::A;
    Ok(LabelledMarking { marking, labels })
}

/// Replays `seq` from `(M0, L ≡ B)`, checking each step and that the run
/// ends at `(Md, L ≡ A)` with every transition fired exactly once.
pub fn replay(net: &PetriNet, seq: &[usize]) -> Result<Vec<LabelledMarking>, PetriError> {
    let mut states = vec![LabelledMarking::initial(net)];
    for &t in seq {
        let cur = states.last().unwrap();
        if t < net.num_transitions() && cur.labels[t] == Label::A {
            return Err(PetriError::FiredTwice(t));
        }
        let next = fire_labelled(net, cur, t)?;
        states.push(next);
    }
    if states.last() != Some(&LabelledMarking::terminal(net)) {
        return Err(PetriError::DoesNotReachSinks);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    // p0 -> t0 -> {p1, p2}
    fn delta_net() -> PetriNet {
        PetriNet::new(3, vec![vec![0]], vec![vec![1, 2]]).unwrap()
    }

    // eval: t0: p0 -> p1, t1: p2 -> p3
    fn eval_net() -> PetriNet {
        PetriNet::new(4, vec![vec![0], vec![2]], vec![vec![1], vec![3]]).unwrap()
    }

    // church numeral: t0 with inputs p1, p2 and outputs p0, p3
    fn church_net() -> PetriNet {
        PetriNet::new(4, vec![vec![1, 2]], vec![vec![0, 3]]).unwrap()
    }

    // p0 -> t0 -> p1 -> t1 -> p0
    fn loop_net() -> PetriNet {
        PetriNet::new(2, vec![vec![0], vec![1]], vec![vec![1], vec![0]]).unwrap()
    }

    #[test]
    fn rejects_conflicts_and_self_loops() {
        assert!(matches!(PetriNet::new(1, vec![vec![0]], vec![vec![0]]), Err(PetriError::SelfLoop { .. })));
        assert!(matches!(
            PetriNet::new(2, vec![vec![0], vec![0]], vec![vec![1], vec![]]),
            Err(PetriError::NotConflictFree { place: 0, side: "output" })
        ));
        assert!(matches!(
            PetriNet::new(2, vec![vec![], vec![]], vec![vec![1], vec![1]]),
            Err(PetriError::NotConflictFree { place: 1, side: "input" })
        ));
        assert!(matches!(PetriNet::new(1, vec![vec![3]], vec![vec![]]), Err(PetriError::BadPlace { .. })));
    }

    #[test]
    fn eval_components() {
        let cs = components(&eval_net());
        assert_eq!(cs.len(), 2);
        assert_eq!(
            cs[0],
            Component {
                places: vec![0, 1],
                transitions: vec![0]
            }
        );
        assert_eq!(
            cs[1],
            Component {
                places: vec![2, 3],
                transitions: vec![1]
            }
        );
        assert!(components(&PetriNet::new(0, vec![], vec![]).unwrap()).is_empty());
    }

    #[test]
    fn placeless_components_come_last() {
        let net = PetriNet::new(1, vec![vec![], vec![0]], vec![vec![], vec![]]).unwrap();
        let cs = components(&net);
        assert_eq!(
            cs[0],
            Component {
                places: vec![0],
                transitions: vec![1]
            }
        );
        assert_eq!(
            cs[1],
            Component {
                places: vec![],
                transitions: vec![0]
            }
        );
    }

    #[test]
    fn acyclicity() {
        assert!(is_acyclic(&church_net()));
        assert!(!is_acyclic(&loop_net()));
        assert_eq!(find_cycle(&loop_net()).map(|c| c.len()), Some(2));
        assert!(is_acyclic(&PetriNet::new(3, vec![], vec![]).unwrap()));
    }

    #[test]
    fn sources_and_sinks() {
        let s = sources_sinks(&church_net());
        assert_eq!(s.sources, vec![1, 2]);
        assert_eq!(s.sinks, vec![0, 3]);
        assert_eq!(s.proper_sources, s.sources);
        assert_eq!(s.proper_sinks, s.sinks);

        let s = sources_sinks(&eval_net());
        assert_eq!(s.sources, vec![0, 2]);
        assert_eq!(s.sinks, vec![1, 3]);

        let iso = PetriNet::new(1, vec![], vec![]).unwrap();
        let s = sources_sinks(&iso);
        assert_eq!((s.sources, s.sinks), (vec![0], vec![0]));
        assert!(s.proper_sources.is_empty() && s.proper_sinks.is_empty());
    }

    #[test]
    fn initial_and_final_markings() {
        let c = church_net();
        assert_eq!(m0(&c), Marking(vec![0, 1, 1, 0]));
        assert_eq!(md(&c), Marking(vec![1, 0, 0, 1]));
        let bare = PetriNet::new(2, vec![], vec![]).unwrap();
        assert_eq!(m0(&bare), md(&bare));
    }

    #[test]
    fn firing_the_example_net() {
        // t: p1,p2,p3 -> q1..q5 ; t': q5,p4 -> p5
        // places: p1..p5 = 0..4, q1..q5 = 5..9
        let net = PetriNet::new(10, vec![vec![0, 1, 2], vec![9, 3]], vec![vec![5, 6, 7, 8, 9], vec![4]]).unwrap();
        let m = Marking(vec![1, 1, 2, 1, 0, 0, 0, 0, 1, 0]);
        assert!(is_enabled(&net, &m, 0));
        assert!(!is_enabled(&net, &m, 1));
        let m2 = fire(&net, &m, 0).unwrap();
        assert_eq!(m2, Marking(vec![0, 0, 1, 1, 0, 1, 1, 1, 2, 1]));
        assert!(is_enabled(&net, &m2, 1));
        assert_eq!(fire(&net, &m2, 0), Err(PetriError::NotEnabled(0)));
    }

    #[test]
    fn church_firing() {
        let c = church_net();
        assert_eq!(fire(&c, &m0(&c), 0).unwrap(), md(&c));
        assert_eq!(topo_fire(&c).unwrap(), vec![0]);
        assert_eq!(reachable_bfs(&c, &m0(&c), &md(&c), DEFAULT_TOKEN_CAP).unwrap(), Some(vec![0]));
        let lm = fire_labelled(&c, &LabelledMarking::initial(&c), 0).unwrap();
        assert_eq!(lm, LabelledMarking::terminal(&c));
        assert_eq!(fire_labelled(&c, &lm, 0), Err(PetriError::WrongLabel(0)));
    }

    #[test]
    fn topo_fire_edge_cases() {
        assert_eq!(topo_fire(&PetriNet::new(2, vec![], vec![]).unwrap()).unwrap(), Vec::<usize>::new());
        assert!(matches!(topo_fire(&loop_net()), Err(PetriError::Cyclic(_))));
        assert_eq!(topo_fire(&delta_net()).unwrap(), vec![0]);
    }

    #[test]
    fn loop_with_a_source_cannot_drain() {
        // the loop plus a proper source p2 feeding t0
        let net = PetriNet::new(3, vec![vec![0, 2], vec![1]], vec![vec![1], vec![0]]).unwrap();
        assert_eq!(reachable_bfs(&net, &m0(&net), &md(&net), DEFAULT_TOKEN_CAP).unwrap(), None);
        // a seeded token inside the loop lets it turn once, md stays out of reach
        let seeded = Marking(vec![1, 0, 1]);
        assert_eq!(reachable_bfs(&net, &seeded, &md(&net), 4).unwrap(), None);
    }

    #[test]
    fn bfs_reports_the_cap() {
        // t0: p0 -> {p1, p2}, t1: p1 -> p0; every round adds a token to p2
        let net = PetriNet::new(3, vec![vec![0], vec![1]], vec![vec![1, 2], vec![0]]).unwrap();
        let start = Marking(vec![1, 0, 0]);
        let target = Marking(vec![0, 0, 9]);
        assert!(matches!(reachable_bfs(&net, &start, &target, 2), Err(PetriError::StateSpaceExceeded { .. })));
        assert_eq!(reachable_bfs(&net, &start, &Marking(vec![1, 0, 2]), 2).unwrap(), Some(vec![0, 1, 0, 1]));
        // the pruned branch cannot help: p2 only ever grows
        assert_eq!(reachable_bfs(&net, &start, &Marking(vec![0, 0, 1]), 2).unwrap(), None);
    }

    #[test]
    fn labelled_invariants() {
        let c = church_net();
        assert!(LabelledMarking::initial(&c).is_valid(&c));
        assert!(LabelledMarking::terminal(&c).is_valid(&c));
        let bad = LabelledMarking {
            marking: m0(&c),
            labels: vec![Label::A],
        };
        assert!(!bad.is_valid(&c));
    }

    #[test]
    fn restriction_keeps_internal_arcs() {
        let e = eval_net();
        let r = e.restrict(&[2, 3], &[1]);
        assert_eq!(r.num_places(), 2);
        assert_eq!(r.inputs(0), &[0]);
        assert_eq!(r.outputs(0), &[1]);
    }
}
