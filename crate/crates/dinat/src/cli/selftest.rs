//! The corpus of worked examples run by `dinat selftest`.

use std::io::Write;
use std::path::Path;

use super::document::{self, Loaded};
use super::{EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};
use crate::dinat::{equivalent, hcompose, replay_order, vcompose, witness, DinatError, Transformation};
use crate::finset_oracle::{all_maps, check_dinaturality, check_prediction, hexagon_legs, realize_marking, ConcreteTransformation};
use crate::graphcat::{collapse, iso_equal, skeleton};
use crate::petri::{fire_labelled, is_acyclic, LabelledMarking};
use crate::signature::{CospanType, Variance};

pub const FIXTURES: &[(&str, &str)] = &[
    ("delta.json", include_str!("../../fixtures/delta.json")),
    ("eval.json", include_str!("../../fixtures/eval.json")),
    ("church2.json", include_str!("../../fixtures/church2.json")),
    ("church2_corrupted.json", include_str!("../../fixtures/church2_corrupted.json")),
    ("copy_phi.json", include_str!("../../fixtures/copy_phi.json")),
    ("copy_psi.json", include_str!("../../fixtures/copy_psi.json")),
    ("copy_eval.json", include_str!("../../fixtures/copy_eval.json")),
    ("loop_phi.json", include_str!("../../fixtures/loop_phi.json")),
    ("loop_psi.json", include_str!("../../fixtures/loop_psi.json")),
    ("loop_chi.json", include_str!("../../fixtures/loop_chi.json")),
    ("loop_cyclic.json", include_str!("../../fixtures/loop_cyclic.json")),
];

pub struct Fixtures<'a> {
    dir: Option<&'a Path>,
}

impl Fixtures<'_> {
    pub fn load(&self, name: &str) -> Result<Loaded, String> {
        let text = match self.dir {
            Some(dir) => std::fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"))?,
            None => FIXTURES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| format!("no fixture {name}"))?,
        };
        document::parse(&text).map_err(|e| format!("{name}: {e}"))
    }

    fn t(&self, name: &str) -> Result<Transformation, String> {
        Ok(self.load(name)?.transformation)
    }

    fn semantics(&self, name: &str) -> Result<ConcreteTransformation, String> {
        self.load(name)?
            .semantics()
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{name} has no semantics"))
    }
}

type Check = fn(&Fixtures) -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub const CHECKS: &[(&str, Check)] = &[
    ("copy-pushout-type", copy_pushout_type),
    ("copy-glued-net", copy_glued_net),
    ("copy-composite-document", copy_composite_document),
    ("copy-witness", copy_witness),
    ("loop-collapsed-right", loop_collapsed_right),
    ("loop-collapsed-left", loop_collapsed_left),
    ("loop-glued", loop_glued),
    ("loop-cyclic-document", loop_cyclic_document),
    ("hcomp-var1", hcomp_var1),
    ("hcomp-var2", hcomp_var2),
    ("eval-graph", eval_graph),
    ("oracle-builtins", oracle_builtins),
    ("oracle-church-numerals", oracle_church_numerals),
    ("oracle-corrupted-table", oracle_corrupted),
    ("oracle-copy-composite", oracle_copy),
    ("copy-marking-invariance", copy_marking_invariance),
];

fn copy_composite(fx: &Fixtures) -> Result<Transformation, String> {
    vcompose(&fx.t("copy_phi.json")?, &fx.t("copy_psi.json")?).map_err(err)
}

fn copy_pushout_type(fx: &Fixtures) -> Result<String, String> {
    let c = copy_composite(fx)?;
    let want = CospanType {
        vars: 1,
        sigma: vec![1, 1],
        tau: vec![1],
    };
    ensure(c.signature().ty == want, || format!("type {} instead of {want}", c.signature().ty))?;
    Ok(format!("{}", c.signature().ty))
}

fn copy_glued_net(fx: &Fixtures) -> Result<String, String> {
    let c = copy_composite(fx)?;
    let g = c.graph().cospan();
    let net = g.net();
    let internal = (0..net.num_places()).filter(|&p| g.boundary_variance(p).is_none()).count();
    ensure(net.num_places() == 6 && internal == 3, || {
        format!("{} places, {internal} internal", net.num_places())
    })?;
    ensure(net.num_transitions() == 4, || format!("{} transitions", net.num_transitions()))?;
    ensure(g.num_components() == 1 && is_acyclic(net), || "not a single acyclic component".into())?;
    let k = collapse(g);
    ensure(k.net().num_places() == 3 && k.net().num_transitions() == 1, || {
        "collapse is not 3 places, 1 transition".into()
    })?;
    Ok("6 places (3 internal), 4 transitions, acyclic".into())
}

fn copy_composite_document(fx: &Fixtures) -> Result<String, String> {
    let doc = fx.t("copy_eval.json")?;
    let c = copy_composite(fx)?;
    ensure(equivalent(&doc, &c).map_err(err)?, || "document differs from the recomputed composite".into())?;
    ensure(doc.delta() == [true], || format!("delta {:?}", doc.delta()))?;
    Ok("delta [1]".into())
}

fn copy_witness(fx: &Fixtures) -> Result<String, String> {
    let c = copy_composite(fx)?;
    let w = witness(&c, 1).map_err(err)?;
    let order: Vec<(usize, usize)> = w.steps.iter().map(|s| (s.constituent_index, s.variable_index)).collect();
    let hand = [(1, 1), (2, 1), (2, 2), (1, 2)];
    ensure(order == hand, || format!("topological order {order:?}"))?;
    let ids: Vec<usize> = hand
        .iter()
        .map(|&(constituent, variable)| c.transition_of(crate::dinat::Tag { constituent, variable }).unwrap())
        .collect();
    replay_order(&c, 1, &ids).map_err(err)?;
    Ok("4 steps, replay ends at the sinks".into())
}

fn loop_parts(fx: &Fixtures) -> Result<(Transformation, Transformation, Transformation), String> {
    Ok((fx.t("loop_phi.json")?, fx.t("loop_psi.json")?, fx.t("loop_chi.json")?))
}

fn loop_collapsed_right(fx: &Fixtures) -> Result<String, String> {
    let (phi, psi, chi) = loop_parts(fx)?;
    let inner = vcompose(&phi, &psi).map_err(err)?.collapsed();
    let c = vcompose(&inner, &chi).map_err(err)?;
    ensure(c.delta() == [false], || format!("delta {:?}", c.delta()))?;
    ensure(matches!(witness(&c, 1), Err(DinatError::ComponentCyclic { .. })), || {
        "witness did not report a cycle".into()
    })?;
    Ok("delta [0], cyclic".into())
}

fn loop_collapsed_left(fx: &Fixtures) -> Result<String, String> {
    let (phi, psi, chi) = loop_parts(fx)?;
    let inner = vcompose(&psi, &chi).map_err(err)?.collapsed();
    let c = vcompose(&phi, &inner).map_err(err)?;
    ensure(c.delta() == [true], || format!("delta {:?}", c.delta()))?;
    Ok("delta [1]".into())
}

fn loop_glued(fx: &Fixtures) -> Result<String, String> {
    let (phi, psi, chi) = loop_parts(fx)?;
    let left = vcompose(&vcompose(&phi, &psi).map_err(err)?, &chi).map_err(err)?;
    let right = vcompose(&phi, &vcompose(&psi, &chi).map_err(err)?).map_err(err)?;
    ensure(iso_equal(left.graph(), right.graph()).map_err(err)?, || {
        "associations are not isomorphic".into()
    })?;
    ensure(left.delta() == [true] && right.delta() == [true], || "delta is not [1]".into())?;
    Ok("isomorphic, delta [1]".into())
}

fn loop_cyclic_document(fx: &Fixtures) -> Result<String, String> {
    let t = fx.t("loop_cyclic.json")?;
    ensure(t.delta() == [false], || format!("delta {:?}", t.delta()))?;
    Ok("delta [0]".into())
}

fn hcomp_check(fx: &Fixtures, i: usize, dom: &[Variance], sigma: &[usize], cod: &[Variance], tau: &[usize]) -> Result<String, String> {
    let h = hcompose(&fx.t("delta.json")?, &fx.t("eval.json")?, i).map_err(err)?;
    let s = h.signature();
    ensure(s.dom == dom && s.ty.sigma == sigma && s.cod == cod && s.ty.tau == tau, || {
        format!("got {} {}", crate::signature::format_variances(&s.dom), s.ty)
    })?;
    ensure(skeleton(h.graph().cospan()) == s.ty, || "graph does not match the type".into())?;
    Ok(format!("{}", s.ty))
}

fn hcomp_var1(fx: &Fixtures) -> Result<String, String> {
    use Variance::{Co as P, Contra as M};
    hcomp_check(fx, 1, &[P, M, M, P], &[1, 1, 1, 2], &[P], &[2])
}

fn hcomp_var2(fx: &Fixtures) -> Result<String, String> {
    use Variance::{Co as P, Contra as M};
    hcomp_check(fx, 2, &[P, M, P], &[1, 1, 2], &[P, P], &[2, 2])
}

fn eval_graph(fx: &Fixtures) -> Result<String, String> {
    let t = fx.t("eval.json")?;
    let net = t.graph().cospan().net();
    ensure(net.num_places() == 4 && net.num_transitions() == 2, || "eval graph has the wrong size".into())?;
    for tr in 0..2 {
        ensure(net.inputs(tr).len() + net.outputs(tr).len() == 2, || format!("t{} has the wrong arcs", tr + 1))?;
    }
    Ok("4 places, 2 transitions".into())
}

fn oracle_builtins(fx: &Fixtures) -> Result<String, String> {
    let mut n = 0;
    for name in ["delta.json", "eval.json", "church2.json"] {
        let l = fx.load(name)?;
        let ct = fx.semantics(name)?;
        let r = check_prediction(&l.transformation, &ct, 3).map_err(err)?;
        ensure(r.all_pass(), || format!("{name} fails a hexagon"))?;
        n += r.checked.len();
    }
    Ok(format!("{n} variables pass at size 3"))
}

fn oracle_church_numerals(_: &Fixtures) -> Result<String, String> {
    for n in 0..=3 {
        let r = check_dinaturality(&ConcreteTransformation::church(n), 1, 3).map_err(err)?;
        ensure(r.passed(), || format!("church({n}) fails"))?;
    }
    Ok("n = 0..3 pass at size 3".into())
}

fn oracle_corrupted(fx: &Fixtures) -> Result<String, String> {
    let l = fx.load("church2_corrupted.json")?;
    let ct = fx.semantics("church2_corrupted.json")?;
    let r = check_prediction(&l.transformation, &ct, 3).map_err(err)?;
    ensure(!r.all_pass(), || "corrupted table passed".into())?;
    Ok("counterexample found".into())
}

fn oracle_copy(fx: &Fixtures) -> Result<String, String> {
    let l = fx.load("copy_eval.json")?;
    let ct = fx.semantics("copy_eval.json")?;
    let r = check_prediction(&l.transformation, &ct, 2).map_err(err)?;
    ensure(r.all_pass() && r.checked.len() == 1, || "composite fails".into())?;
    Ok("pass at size 2".into())
}

/// `mor(M, L, f)` is the same table at every step of the witness and runs
/// from the lower hexagon leg to the upper one.
pub fn marking_invariance(l: &Loaded, max_size: usize) -> Result<usize, String> {
    let t = &l.transformation;
    let chain = l.chain().map_err(err)?.ok_or("no semantics")?;
    let ct = l.semantics().map_err(err)?.ok_or("no semantics")?;
    let net = t.graph().cospan().net();
    if t.graph().cospan().num_components() != 1 {
        return Err("expected a single component".into());
    }
    let w = witness(t, 1).map_err(err)?;
    let mut states = vec![LabelledMarking::initial(net)];
    for s in &w.steps {
        let next = fire_labelled(net, states.last().unwrap(), s.transition_id).map_err(err)?;
        states.push(next);
    }
    ensure(*states.last().unwrap() == LabelledMarking::terminal(net), || {
        "witness does not end at the sinks".into()
    })?;
    let mut checked = 0;
    for a in 0..=max_size {
        for b in 0..=max_size {
            for f in all_maps(a, b).map_err(err)? {
                let (upper, lower) = hexagon_legs(&ct, 1, &[0], &f).map_err(err)?;
                let mors = states
                    .iter()
                    .map(|lm| realize_marking(t, &chain, 1, &[0], lm, &f))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                ensure(mors[0] == lower, || format!("initial marking is not the lower leg for f = {:?}", f.table))?;
                ensure(*mors.last().unwrap() == upper, || {
                    format!("terminal marking is not the upper leg for f = {:?}", f.table)
                })?;
                ensure(mors.windows(2).all(|w| w[0] == w[1]), || {
                    format!("a firing changes the morphism for f = {:?}", f.table)
                })?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn copy_marking_invariance(fx: &Fixtures) -> Result<String, String> {
    let n = marking_invariance(&fx.load("copy_eval.json")?, 2)?;
    Ok(format!("{n} arrows, every step equal"))
}

/// Runs every check and prints a table.
pub fn run(out: &mut dyn Write, err_out: &mut dyn Write, list: bool, dir: Option<&Path>) -> i32 {
    if list {
        for (name, _) in CHECKS {
            let _ = writeln!(out, "{name}");
        }
        return EXIT_OK;
    }
    if let Some(d) = dir {
        if !d.is_dir() {
            let _ = writeln!(err_out, "error: {} is not a directory", d.display());
            return EXIT_INPUT;
        }
    }
    let fx = Fixtures { dir };
    let mut failed = 0;
    for (name, check) in CHECKS {
        let (status, detail) = match check(&fx) {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failed += 1;
                ("FAIL", e)
            }
        };
        let _ = writeln!(out, "{status}  {name:<26} {detail}");
    }
    let _ = writeln!(out, "{} of {} checks passed", CHECKS.len() - failed, CHECKS.len());
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}
