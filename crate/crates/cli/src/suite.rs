//! The acceptance battery: nine law suites over the full corpus plus a
//! determinism criterion, rendered one line per criterion. Everything is
//! built fresh per run from the fixed corpus lists, so two runs with the
//! same seed produce identical bytes.

use crate::corpus::generate_corpus;
use crate::document::serialize_document;
use ngpd_core::corpus::{
    bisimplicial_corpus, groupoid_corpus, nfunctor_corpus, pullback_corpus, small_equiv_corpus,
    sset_corpus, two_groupoid_corpus, MapFixture, PullbackFixture, SsetFixture,
};
use ngpd_core::edge_path::fundamental_group;
use ngpd_core::fp::{group_invariants, table_presentation};
use ngpd_core::groupoid::{
    all_functors, cyclic_group, is_equivalence, klein_four_group, nerve, product_group,
    symmetric_3, FinGroup, FinGroupoid, GroupoidFunctor,
};
use ngpd_core::multi::{diagonal_components, external_product, from_sset, total_diag, MultiSSet};
use ngpd_core::ngroupoid::{homotopy_group, n_equivalence, pi0_set, unit_check_n1, NGroupoid};
use ngpd_core::sset::{is_nerve_of_groupoid, pi0, segal_map, SSetMap, SimplicialSet};
use ngpd_core::verify::{check_pr_weak_equiv, diag_fiber_product_check, segal_pi0_law};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub number: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Witness on failure, or a short count note on success.
    pub detail: String,
    pub not_checked: Vec<&'static str>,
}

impl CriterionResult {
    fn line(&self) -> String {
        let mut out = format!(
            "criterion {}: {} ... {}",
            self.number,
            self.name,
            if self.passed { "PASS" } else { "FAIL" }
        );
        if !self.detail.is_empty() {
            out.push_str(&format!(" ({})", self.detail));
        }
        for n in &self.not_checked {
            out.push_str(&format!(" [not checked: {n}]"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
    #[serde(skip)]
    pub text: String,
}

struct Ctx {
    groupoids: Vec<(String, FinGroupoid)>,
    small: Vec<(String, FinGroupoid)>,
    ssets: Vec<SsetFixture>,
    bis: Vec<(String, MultiSSet)>,
    twos: Vec<(String, NGroupoid)>,
    maps: Vec<MapFixture>,
    pulls: Vec<PullbackFixture>,
}

impl Ctx {
    fn build() -> Self {
        Ctx {
            groupoids: groupoid_corpus(),
            small: small_equiv_corpus(),
            ssets: sset_corpus(),
            bis: bisimplicial_corpus(),
            twos: two_groupoid_corpus(),
            maps: nfunctor_corpus(),
            pulls: pullback_corpus(),
        }
    }

    fn two(&self, name: &str) -> &NGroupoid {
        &self
            .twos
            .iter()
            .find(|(n, _)| n == name)
            .expect("known corpus entry")
            .1
    }
}

/// Criteria one through nine, rendered deterministically. Criterion ten
/// compares two full renders and lives in `run_suite`.
pub fn criteria_battery(seed: u64) -> (Vec<CriterionResult>, String) {
    let ctx = Ctx::build();
    let runners: [(usize, &'static str, Runner, Vec<&'static str>); 9] = [
        (1, "nerves satisfy the spine bijections", c1, vec![]),
        (
            2,
            "groupoids match the loops of their nerves",
            c2,
            vec!["homotopy above degree 1"],
        ),
        (3, "diagonal components match the inner collapse", c3, vec![]),
        (
            4,
            "the equivalence checker agrees with quasi-inverse search",
            c4,
            vec![],
        ),
        (
            5,
            "homotopy groups of the standard models come out right",
            c5,
            vec![],
        ),
        (
            6,
            "the diagonal of a product of nerves is the nerve of the product",
            c6,
            vec!["homotopy above degree 1"],
        ),
        (7, "the diagonal commutes with fiber products", c7, vec![]),
        (
            8,
            "equivalences preserve invariants and failures carry witnesses",
            c8,
            vec!["homotopy above degree 2"],
        ),
        (
            9,
            "component decompositions reassemble and flag discreteness",
            c9,
            vec![],
        ),
    ];
    let mut results = Vec::new();
    for (number, name, run, not_checked) in runners {
        let (passed, detail) = match run(&ctx, seed) {
            Ok(note) => (true, note),
            Err(witness) => (false, witness),
        };
        results.push(CriterionResult {
            number,
            name,
            passed,
            detail,
            not_checked,
        });
    }
    let text = results
        .iter()
        .map(|r| r.line())
        .collect::<Vec<_>>()
        .join("\n");
    (results, text)
}

/// The full suite: the battery plus a determinism criterion comparing two
/// corpus serializations and two renders of the same results. Whole-run
/// byte identity is what two invocations of the binary give you; this
/// criterion confirms the pieces that could drift inside one process.
pub fn run_suite(seed: u64) -> SuiteOutcome {
    let (results, first_text) = criteria_battery(seed);
    let rerendered = results
        .iter()
        .map(|r| r.line())
        .collect::<Vec<_>>()
        .join("\n");
    let docs = generate_corpus(seed, "small").expect("small corpus");
    let corpus_once: String = docs.iter().map(serialize_document).collect();
    let corpus_again: String = docs.iter().map(serialize_document).collect();
    let deterministic = first_text == rerendered && corpus_once == corpus_again;
    let mut criteria = results;
    criteria.push(CriterionResult {
        number: 10,
        name: "reports and corpus serializations are stable",
        passed: deterministic,
        detail: if deterministic {
            format!("{} corpus documents", docs.len())
        } else {
            "two renders differ".to_string()
        },
        not_checked: vec![],
    });
    let passed = criteria.iter().all(|c| c.passed);
    let mut text = String::new();
    for c in &criteria {
        text.push_str(&c.line());
        text.push('\n');
    }
    let failed = criteria.iter().filter(|c| !c.passed).count();
    text.push_str(&format!(
        "suite: {} passed, {} failed (seed {seed})\n",
        criteria.len() - failed,
        failed
    ));
    SuiteOutcome {
        seed,
        criteria,
        passed,
        text,
    }
}

type Runner = fn(&Ctx, u64) -> Result<String, String>;

// ---------------------------------------------------------------------------
// Criteria

fn c1(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    if ctx.groupoids.len() < 20 {
        return Err(format!("corpus has only {} groupoids", ctx.groupoids.len()));
    }
    let mut checked = 0;
    for (name, g) in &ctx.groupoids {
        let nd = nerve(g, 3);
        for m in [2, 3] {
            let sm = segal_map(&nd.sset, m).map_err(|e| format!("{name}: {e}"))?;
            if !sm.is_bijection() {
                return Err(format!("{name}: the level {m} spine map is not a bijection"));
            }
            checked += 1;
        }
        let check = is_nerve_of_groupoid(&nd.sset).map_err(|e| format!("{name}: {e}"))?;
        if !check.holds() {
            let why = check
                .report
                .first_failure()
                .map(|c| c.name.clone())
                .unwrap_or_default();
            return Err(format!("{name}: {why}"));
        }
    }
    Ok(format!(
        "{} groupoids, {checked} spine maps",
        ctx.groupoids.len()
    ))
}

fn c2(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    for (name, g) in &ctx.groupoids {
        let rep = unit_check_n1(g).map_err(|e| format!("{name}: {e}"))?;
        if !rep.passed() {
            let why = rep
                .first_failure()
                .map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()))
                .unwrap_or_default();
            return Err(format!("{name}: {why}"));
        }
    }
    Ok(format!("{} groupoids", ctx.groupoids.len()))
}

fn c3(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    if ctx.bis.len() < 10 {
        return Err(format!("corpus has only {} two-axis sets", ctx.bis.len()));
    }
    let mut disconnected = 0;
    for (name, x) in &ctx.bis {
        if diagonal_components(x).map_err(|e| format!("{name}: {e}"))?.len() > 1 {
            disconnected += 1;
        }
        let rep = segal_pi0_law(x).map_err(|e| format!("{name}: {e}"))?;
        if !rep.passed() {
            let why = rep
                .first_failure()
                .map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()))
                .unwrap_or_default();
            return Err(format!("{name}: {why}"));
        }
    }
    if disconnected == 0 {
        return Err("no disconnected member in the two-axis corpus".to_string());
    }
    Ok(format!(
        "{} sets, {disconnected} disconnected",
        ctx.bis.len()
    ))
}

fn identity_functor(g: &FinGroupoid) -> GroupoidFunctor {
    GroupoidFunctor::new(
        g,
        g,
        (0..g.object_count()).collect(),
        (0..g.morphism_count()).collect(),
    )
    .expect("the identity is a functor")
}

fn compose_functors(f: &GroupoidFunctor, g: &GroupoidFunctor) -> GroupoidFunctor {
    GroupoidFunctor::new(
        f.source(),
        g.target(),
        (0..f.source().object_count())
            .map(|x| g.apply_object(f.apply_object(x)))
            .collect(),
        (0..f.source().morphism_count())
            .map(|m| g.apply_morphism(f.apply_morphism(m)))
            .collect(),
    )
    .expect("the composite is a functor")
}

/// Exhaustive search for a natural transformation between two parallel
/// functors. Into a groupoid every component is invertible, so finding
/// one is finding a natural isomorphism.
fn naturally_isomorphic(f: &GroupoidFunctor, g: &GroupoidFunctor) -> bool {
    let s = f.source();
    let t = f.target();
    fn place(
        k: usize,
        eta: &mut Vec<usize>,
        s: &FinGroupoid,
        t: &FinGroupoid,
        f: &GroupoidFunctor,
        g: &GroupoidFunctor,
    ) -> bool {
        if k == s.object_count() {
            return true;
        }
        for cand in t.hom(f.apply_object(k), g.apply_object(k)) {
            eta[k] = cand;
            let natural = (0..s.morphism_count()).all(|m| {
                let (x, y) = (s.src(m), s.tgt(m));
                if x > k || y > k {
                    return true;
                }
                t.compose(f.apply_morphism(m), eta[y]) == t.compose(eta[x], g.apply_morphism(m))
            });
            if natural && place(k + 1, eta, s, t, f, g) {
                return true;
            }
        }
        false
    }
    let mut eta = vec![0; s.object_count()];
    place(0, &mut eta, s, t, f, g)
}

fn has_quasi_inverse(f: &GroupoidFunctor) -> bool {
    let s = f.source();
    let t = f.target();
    all_functors(t, s).into_iter().any(|g| {
        naturally_isomorphic(&compose_functors(f, &g), &identity_functor(s))
            && naturally_isomorphic(&compose_functors(&g, f), &identity_functor(t))
    })
}

fn c4(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    let mut compared = 0;
    for (sname, s) in &ctx.small {
        for (tname, t) in &ctx.small {
            for f in all_functors(s, t) {
                let checker = is_equivalence(&f).holds();
                let oracle = has_quasi_inverse(&f);
                if checker != oracle {
                    return Err(format!(
                        "a functor {sname} -> {tname} splits the verdicts \
                         (checker {checker}, oracle {oracle})"
                    ));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} functors compared"))
}

fn expect_iso(got: &FinGroup, want: &FinGroup, what: &str) -> Result<(), String> {
    if got.is_isomorphic(want) {
        Ok(())
    } else {
        Err(format!(
            "{what}: got a group of order {}, wanted order {}",
            got.order(),
            want.order()
        ))
    }
}

fn c5(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    let lifted: [(&str, FinGroup); 3] = [
        ("lift-loop-2", cyclic_group(2)),
        ("lift-loop-3", cyclic_group(3)),
        ("lift-perm-3", symmetric_3()),
    ];
    for (name, want) in &lifted {
        let phi = ctx.two(name);
        let got = homotopy_group(phi, "x", 1).map_err(|e| format!("{name}: {e}"))?;
        expect_iso(&got, want, &format!("{name}: first homotopy"))?;
    }
    let kspaces: [(&str, FinGroup); 3] = [
        ("kspace-2", cyclic_group(2)),
        ("kspace-3", cyclic_group(3)),
        ("kspace-klein", klein_four_group()),
    ];
    for (name, want) in &kspaces {
        let phi = ctx.two(name);
        let base = phi.objects().map_err(|e| format!("{name}: {e}"))?[0].clone();
        let first = homotopy_group(phi, &base, 1).map_err(|e| format!("{name}: {e}"))?;
        if first.order() != 1 {
            return Err(format!("{name}: first homotopy has order {}", first.order()));
        }
        let second = homotopy_group(phi, &base, 2).map_err(|e| format!("{name}: {e}"))?;
        expect_iso(&second, want, &format!("{name}: second homotopy"))?;
    }
    for (name, phi) in &ctx.twos {
        if !phi.is_valid() {
            let why = phi.validation().violations[0].law.clone();
            return Err(format!("{name}: carrier fails validation ({why})"));
        }
        for rep in pi0_set(phi).map_err(|e| format!("{name}: {e}"))?.representatives() {
            let second = homotopy_group(phi, &rep, 2).map_err(|e| format!("{name}: {e}"))?;
            if !second.is_abelian() {
                return Err(format!("{name}: second homotopy at `{rep}` is not commutative"));
            }
        }
    }
    Ok(format!("{} two-groupoids", ctx.twos.len()))
}

fn split_last_bar(p: &str) -> (&str, &str) {
    let inner = &p[1..p.len() - 1];
    let mut depth = 0usize;
    let mut cut = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => cut = i,
            _ => {}
        }
    }
    (&inner[..cut], &inner[cut + 1..])
}

/// Sends the chain `[(a1|b1),...,(ak|bk)]` to `([a1,...,ak]|[b1,...,bk])`,
/// the matching cell of the diagonal of the product of nerves.
fn split_product_chain(id: &str, level: usize, diag: &SimplicialSet) -> String {
    if level == 0 {
        return diag.cell_id(0, 0).to_string();
    }
    let inner = &id[1..id.len() - 1];
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    let (mut lefts, mut rights) = (Vec::new(), Vec::new());
    for p in parts {
        let (l, r) = split_last_bar(p);
        lefts.push(l);
        rights.push(r);
    }
    format!("([{}]|[{}])", lefts.join(","), rights.join(","))
}

fn c6(_ctx: &Ctx, _seed: u64) -> Result<String, String> {
    let pairs: [(&str, FinGroup, FinGroup); 4] = [
        ("2 and 2", cyclic_group(2), cyclic_group(2)),
        ("2 and 3", cyclic_group(2), cyclic_group(3)),
        ("3 and 3", cyclic_group(3), cyclic_group(3)),
        ("2 and klein", cyclic_group(2), klein_four_group()),
    ];
    for (label, a, b) in &pairs {
        let prod = product_group(a, b);
        let n_prod = nerve(prod.underlying(), 3).sset;
        let square = external_product(
            &from_sset(&nerve(a.underlying(), 3).sset),
            &from_sset(&nerve(b.underlying(), 3).sset),
        );
        let diag = total_diag(&square).map_err(|e| format!("{label}: {e}"))?;
        let splitter = SSetMap::from_fn(&n_prod, &diag, |k, id| {
            split_product_chain(id, k, &diag)
        })
        .map_err(|e| format!("{label}: the chain splitting is not simplicial ({e})"))?;
        if !splitter.is_levelwise_bijection() {
            return Err(format!("{label}: the chain splitting misses cells"));
        }
        let base = diag.cell_id(0, 0);
        let loops = fundamental_group(&diag, base).map_err(|e| format!("{label}: {e}"))?;
        if group_invariants(&loops) != group_invariants(&table_presentation(&prod)) {
            return Err(format!("{label}: loop invariants of the diagonal differ"));
        }
    }
    Ok(format!("{} abelian pairs", pairs.len()))
}

fn c7(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    for f in &ctx.pulls {
        let ok = diag_fiber_product_check(&f.left, &f.right)
            .map_err(|e| format!("{}: {e}", f.name))?;
        if !ok {
            return Err(format!("{}: the two diagonals differ", f.name));
        }
    }
    Ok(format!("{} pullback squares", ctx.pulls.len()))
}

fn c8(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    let mut equivalences = 0;
    for fixture in &ctx.maps {
        let name = &fixture.name;
        let rep = n_equivalence(&fixture.functor).map_err(|e| format!("{name}: {e}"))?;
        if fixture.equivalence {
            if !rep.passed() {
                let why = rep
                    .first_failure()
                    .map(|c| c.name.clone())
                    .unwrap_or_default();
                return Err(format!("{name}: expected an equivalence ({why})"));
            }
            equivalences += 1;
            let map = fixture.functor.map();
            let source = fixture.functor.source().map_err(|e| format!("{name}: {e}"))?;
            let target = fixture.functor.target().map_err(|e| format!("{name}: {e}"))?;
            let ps = pi0_set(&source).map_err(|e| format!("{name}: {e}"))?;
            let pt = pi0_set(&target).map_err(|e| format!("{name}: {e}"))?;
            if ps.len() != pt.len() {
                return Err(format!(
                    "{name}: component counts differ ({} against {})",
                    ps.len(),
                    pt.len()
                ));
            }
            let zero = vec![0usize; fixture.functor.n()];
            for rep_obj in ps.representatives() {
                let idx = map
                    .source()
                    .cell_index(&zero, &rep_obj)
                    .expect("representative object");
                let image = map
                    .target()
                    .cell_id(&zero, map.apply(&zero, idx))
                    .to_string();
                for degree in 1..=fixture.functor.n() {
                    let hs = homotopy_group(&source, &rep_obj, degree)
                        .map_err(|e| format!("{name}: {e}"))?;
                    let ht = homotopy_group(&target, &image, degree)
                        .map_err(|e| format!("{name}: {e}"))?;
                    if group_invariants(&table_presentation(&hs))
                        != group_invariants(&table_presentation(&ht))
                    {
                        return Err(format!(
                            "{name}: degree {degree} invariants differ at `{rep_obj}`"
                        ));
                    }
                }
            }
        } else if rep.passed() {
            return Err(format!("{name}: a non-equivalence slipped through"));
        }
    }
    Ok(format!(
        "{equivalences} equivalences, {} maps",
        ctx.maps.len()
    ))
}

fn c9(ctx: &Ctx, _seed: u64) -> Result<String, String> {
    for f in &ctx.ssets {
        let name = &f.name;
        let pr = check_pr_weak_equiv(&f.sset).map_err(|e| format!("{name}: {e}"))?;
        if !pr.report.passed() {
            let why = pr
                .report
                .first_failure()
                .map(|c| c.name.clone())
                .unwrap_or_default();
            return Err(format!("{name}: {why}"));
        }
        let components = pi0(&f.sset).map_err(|e| format!("{name}: {e}"))?.len();
        if pr.decomposition.components.len() != components {
            return Err(format!(
                "{name}: {} pieces against {components} components",
                pr.decomposition.components.len()
            ));
        }
        if pr.zero_truncated != f.discrete {
            return Err(format!(
                "{name}: the truncation flag reads {}",
                pr.zero_truncated
            ));
        }
    }
    Ok(format!("{} simplicial sets", ctx.ssets.len()))
}
