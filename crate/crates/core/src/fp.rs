//! Finitely presented groups and the invariants used to compare them.
//!
//! Presentations are never solved for isomorphism; instead two computable
//! invariants are extracted: the abelianization in normal form, and the
//! profile of homomorphism counts into a fixed catalog of small groups.
//! Two groups with different invariants are certainly not isomorphic;
//! matching invariants are reported as exactly that, a match of invariants.

use crate::groupoid::{
    cyclic_group, dihedral_8, klein_four_group, product_group, quaternion_8, symmetric_3,
    trivial_group, FinGroup,
};
use crate::{Error, Result};

/// A letter is a generator index with an inversion flag.
pub type Letter = (usize, bool);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpGroup {
    gen_names: Vec<String>,
    relators: Vec<Vec<Letter>>,
}

pub fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &(g, inv) in word {
        if let Some(&(h, hinv)) = out.last() {
            if h == g && hinv != inv {
                out.pop();
                continue;
            }
        }
        out.push((g, inv));
    }
    out
}

fn cyclic_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut w = free_reduce(word);
    while w.len() >= 2 {
        let (first, last) = (w[0], *w.last().unwrap());
        if first.0 == last.0 && first.1 != last.1 {
            w.pop();
            w.remove(0);
        } else {
            break;
        }
    }
    w
}

pub fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&(g, inv)| (g, !inv)).collect()
}

impl FpGroup {
    pub fn new(gen_names: Vec<String>, relators: Vec<Vec<Letter>>) -> Result<Self> {
        let n = gen_names.len();
        for r in &relators {
            if r.iter().any(|&(g, _)| g >= n) {
                return Err(Error::BadStructure {
                    detail: "relator uses an unknown generator".into(),
                });
            }
        }
        Ok(FpGroup {
            gen_names,
            relators,
        })
    }

    pub fn num_gens(&self) -> usize {
        self.gen_names.len()
    }

    pub fn gen_name(&self, g: usize) -> &str {
        &self.gen_names[g]
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    pub fn relators(&self) -> &[Vec<Letter>] {
        &self.relators
    }

    pub fn word_string(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.iter()
            .map(|&(g, inv)| {
                if inv {
                    format!("{}^-1", self.gen_names[g])
                } else {
                    self.gen_names[g].clone()
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Tietze-style presimplification: free and cyclic reduction, dropping
    /// duplicates, and eliminating a generator that occurs exactly once in
    /// exactly one relator (that relation defines it away). Iterates to a
    /// fixed point; every step preserves the group up to isomorphism.
    pub fn presimplified(&self) -> FpGroup {
        let mut gens = self.gen_names.clone();
        let mut relators: Vec<Vec<Letter>> = self
            .relators
            .iter()
            .map(|r| cyclic_reduce(r))
            .filter(|r| !r.is_empty())
            .collect();
        loop {
            relators.sort();
            relators.dedup();
            // Occurrences of each generator across all relators.
            let mut occurrences = vec![0usize; gens.len()];
            let mut home = vec![usize::MAX; gens.len()];
            for (ri, r) in relators.iter().enumerate() {
                for &(g, _) in r {
                    occurrences[g] += 1;
                    home[g] = ri;
                }
            }
            let candidate = (0..gens.len()).find(|&g| occurrences[g] == 1);
            let Some(g) = candidate else { break };
            let ri = home[g];
            relators.remove(ri);
            gens.remove(g);
            for r in relators.iter_mut() {
                for letter in r.iter_mut() {
                    if letter.0 > g {
                        letter.0 -= 1;
                    }
                }
            }
            relators = relators
                .into_iter()
                .map(|r| cyclic_reduce(&r))
                .filter(|r| !r.is_empty())
                .collect();
        }
        FpGroup {
            gen_names: gens,
            relators,
        }
    }
}

// ---------------------------------------------------------------------------
// Abelianization

/// Abelianization in normal form: a free rank and torsion divisors in
/// ascending divisibility order, each greater than 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Diagonal of the Smith normal form, as nonnegative values including any
/// zeros, in divisibility order.
pub(crate) fn smith_diagonal(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut top = 0usize;
    let mut left = 0usize;
    while top < rows && left < cols {
        // Find the entry with the smallest nonzero magnitude in the
        // remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for r in top..rows {
            for c in left..cols {
                if m[r][c] != 0
                    && pivot.map_or(true, |(pr, pc)| m[r][c].abs() < m[pr][pc].abs())
                {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap(top, pr);
        for row in m.iter_mut() {
            row.swap(left, pc);
        }
        if m[top][left] < 0 {
            for c in left..cols {
                m[top][c] = -m[top][c];
            }
        }
        // Clear the column and row; restart the block if a remainder shows
        // up, which keeps entries shrinking.
        let mut dirty = false;
        for r in top + 1..rows {
            let q = m[r][left].div_euclid(m[top][left]);
            if q != 0 {
                for c in left..cols {
                    m[r][c] -= q * m[top][c];
                }
            }
            if m[r][left] != 0 {
                dirty = true;
            }
        }
        for c in left + 1..cols {
            let q = m[top][c].div_euclid(m[top][left]);
            if q != 0 {
                for r in top..rows {
                    m[r][c] -= q * m[r][left];
                }
            }
            if m[top][c] != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // The pivot must divide everything below-right; if not, fold the
        // offending row in and start over.
        let mut fixed = true;
        'scan: for r in top + 1..rows {
            for c in left + 1..cols {
                if m[r][c] % m[top][left] != 0 {
                    for cc in left..cols {
                        let add = m[r][cc];
                        m[top][cc] += add;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(m[top][left]);
        top += 1;
        left += 1;
    }
    diag
}

pub fn abelianization(g: &FpGroup) -> AbelianInvariants {
    let n = g.num_gens();
    let mut matrix: Vec<Vec<i128>> = Vec::with_capacity(g.relators.len());
    for r in &g.relators {
        let mut row = vec![0i128; n];
        for &(gen, inv) in r {
            row[gen] += if inv { -1 } else { 1 };
        }
        matrix.push(row);
    }
    let diag = smith_diagonal(matrix);
    let rank = diag.iter().filter(|&&d| d != 0).count();
    let torsion: Vec<u64> = diag
        .iter()
        .filter(|&&d| d > 1)
        .map(|&d| d as u64)
        .collect();
    AbelianInvariants {
        free_rank: n - rank,
        torsion,
    }
}

// ---------------------------------------------------------------------------
// Homomorphism counting

/// The fixed catalog: every group of order at most 8 up to isomorphism,
/// in a stable order.
pub fn group_catalog() -> Vec<(String, FinGroup)> {
    vec![
        ("1".to_string(), trivial_group()),
        ("C2".to_string(), cyclic_group(2)),
        ("C3".to_string(), cyclic_group(3)),
        ("C4".to_string(), cyclic_group(4)),
        ("C2xC2".to_string(), klein_four_group()),
        ("C5".to_string(), cyclic_group(5)),
        ("C6".to_string(), cyclic_group(6)),
        ("S3".to_string(), symmetric_3()),
        ("C7".to_string(), cyclic_group(7)),
        ("C8".to_string(), cyclic_group(8)),
        ("C4xC2".to_string(), product_group(&cyclic_group(4), &cyclic_group(2))),
        (
            "C2xC2xC2".to_string(),
            product_group(&klein_four_group(), &cyclic_group(2)),
        ),
        ("D4".to_string(), dihedral_8()),
        ("Q8".to_string(), quaternion_8()),
    ]
}

/// Counts group homomorphisms from the presented group into a finite
/// target by depth-first search over generator images. The presentation is
/// presimplified first and generators are ordered so relators can prune as
/// early as possible.
pub fn hom_count(g: &FpGroup, target: &FinGroup) -> usize {
    let g = g.presimplified();
    let n = g.num_gens();
    if n == 0 {
        return 1;
    }
    // Order generators so each one closes some relator over its
    // predecessors where possible; closed relators then pin the newly
    // assigned image down immediately.
    let order = {
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while order.len() < n {
            let mut best: Option<usize> = None;
            for r in g.relators() {
                let unplaced: Vec<usize> = {
                    let mut u: Vec<usize> = r
                        .iter()
                        .map(|&(gen, _)| gen)
                        .filter(|&gen| !placed[gen])
                        .collect();
                    u.sort();
                    u.dedup();
                    u
                };
                if unplaced.len() == 1 && best.map_or(true, |b| unplaced[0] < b) {
                    best = Some(unplaced[0]);
                }
            }
            let next = best.unwrap_or_else(|| (0..n).find(|&gen| !placed[gen]).unwrap());
            placed[next] = true;
            order.push(next);
        }
        order
    };
    let position: Vec<usize> = {
        let mut p = vec![0usize; n];
        for (i, &gen) in order.iter().enumerate() {
            p[gen] = i;
        }
        p
    };
    // Relators grouped by the position at which they become fully
    // assigned.
    let mut ready: Vec<Vec<&Vec<Letter>>> = vec![Vec::new(); n];
    for r in g.relators() {
        if let Some(p) = r.iter().map(|&(gen, _)| position[gen]).max() {
            ready[p].push(r);
        }
    }

    let identity = target.identity();
    let mut image = vec![0usize; n];
    fn dfs(
        target: &FinGroup,
        order: &[usize],
        ready: &[Vec<&Vec<Letter>>],
        image: &mut Vec<usize>,
        depth: usize,
        identity: usize,
    ) -> usize {
        if depth == order.len() {
            return 1;
        }
        let gen = order[depth];
        let mut total = 0;
        for t in 0..target.order() {
            image[gen] = t;
            let ok = ready[depth].iter().all(|r| {
                let mut acc = identity;
                for &(x, inv) in r.iter() {
                    let im = if inv {
                        target.inverse(image[x])
                    } else {
                        image[x]
                    };
                    acc = target.mult(acc, im);
                }
                acc == identity
            });
            if ok {
                total += dfs(target, order, ready, image, depth + 1, identity);
            }
        }
        total
    }
    dfs(target, &order, &ready, &mut image, 0, identity)
}

/// Homomorphism counts into every catalog group, in catalog order.
pub fn hom_profile(g: &FpGroup) -> Vec<usize> {
    group_catalog()
        .iter()
        .map(|(_, target)| hom_count(g, target))
        .collect()
}

/// The table presentation of a finite group: one generator per element,
/// one relator per product. Crude but exact, and presimplification keeps
/// the downstream searches honest.
pub fn table_presentation(g: &FinGroup) -> FpGroup {
    let n = g.order();
    let gen_names = g.element_ids();
    let mut relators = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let c = g.mult(a, b);
            relators.push(vec![(a, false), (b, false), (c, true)]);
        }
    }
    FpGroup::new(gen_names, relators).expect("table relators are in range")
}

/// The invariant pair used whenever two presented groups are compared.
pub fn group_invariants(g: &FpGroup) -> (AbelianInvariants, Vec<usize>) {
    (abelianization(g), hom_profile(g))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: i128, b: i128) -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    /// Determinantal-divisor oracle for the Smith diagonal of a small
    /// matrix: the k-th diagonal entry is the gcd of all k x k minors
    /// divided by the gcd of all (k-1) x (k-1) minors.
    fn smith_by_minors(m: &[Vec<i128>]) -> Vec<i128> {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        fn minor_det(m: &[Vec<i128>], rs: &[usize], cs: &[usize]) -> i128 {
            if rs.len() == 1 {
                return m[rs[0]][cs[0]];
            }
            let mut det = 0i128;
            for (i, &r) in rs.iter().enumerate() {
                let rest: Vec<usize> = rs.iter().copied().filter(|&x| x != r).collect();
                let sub = minor_det(m, &rest, &cs[1..]);
                let term = m[r][cs[0]] * sub;
                det += if i % 2 == 0 { term } else { -term };
            }
            det
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in subsets(n, k - 1) {
                    if rest.iter().all(|&x| x > first) {
                        let mut s = vec![first];
                        s.append(&mut rest);
                        out.push(s);
                    }
                }
            }
            out
        }
        let mut divisors = vec![1i128];
        for k in 1..=rows.min(cols) {
            let mut g = 0i128;
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    g = gcd(g, minor_det(m, &rs, &cs));
                }
            }
            divisors.push(g);
            if g == 0 {
                break;
            }
        }
        let mut diag = Vec::new();
        for k in 1..divisors.len() {
            if divisors[k] == 0 {
                break;
            }
            diag.push(divisors[k] / divisors[k - 1]);
        }
        diag
    }

    #[test]
    fn smith_diagonal_matches_minor_gcds() {
        let samples: Vec<Vec<Vec<i128>>> = vec![
            vec![vec![2, 4], vec![6, 8]],
            vec![vec![1, 1, -1], vec![3, 3, 0]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![6]],
            vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]],
            vec![vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1]],
        ];
        for m in samples {
            let fast: Vec<i128> = smith_diagonal(m.clone())
                .into_iter()
                .filter(|&d| d != 0)
                .collect();
            let slow = smith_by_minors(&m);
            assert_eq!(fast, slow, "matrix {m:?}");
        }
    }

    #[test]
    fn abelianization_of_mixed_presentation() {
        // a and b commute, and a^3 b^3 = 1.
        let g = FpGroup::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![(0, false), (1, false), (0, true), (1, true)],
                vec![(0, false), (0, false), (0, false), (1, false), (1, false), (1, false)],
            ],
        )
        .unwrap();
        let ab = abelianization(&g);
        assert_eq!(ab.free_rank, 1);
        assert_eq!(ab.torsion, vec![3]);
        assert_eq!(ab.to_string(), "Z + Z/3");
    }

    #[test]
    fn abelianization_of_free_and_trivial() {
        let free = FpGroup::new(vec!["a".into()], vec![]).unwrap();
        assert_eq!(abelianization(&free).free_rank, 1);
        let trivial = FpGroup::new(vec!["a".into()], vec![vec![(0, false)]]).unwrap();
        assert!(abelianization(&trivial).is_trivial());
    }

    #[test]
    fn hom_counts_from_one_relator_group() {
        // The group with a^2 = 1 has one nontrivial hom to any group with
        // an involution, none to odd-order groups.
        let g = FpGroup::new(vec!["a".into()], vec![vec![(0, false), (0, false)]]).unwrap();
        assert_eq!(hom_count(&g, &cyclic_group(2)), 2);
        assert_eq!(hom_count(&g, &cyclic_group(3)), 1);
        assert_eq!(hom_count(&g, &cyclic_group(4)), 2);
        assert_eq!(hom_count(&g, &klein_four_group()), 4);
        assert_eq!(hom_count(&g, &symmetric_3()), 4);
    }

    #[test]
    fn hom_count_matches_brute_force() {
        // Z/3 presented with redundancy; brute-force all assignments.
        let g = FpGroup::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![(0, false), (1, true)],
                vec![(0, false), (0, false), (0, false)],
            ],
        )
        .unwrap();
        for (_, target) in group_catalog() {
            let n = target.order();
            let mut brute = 0;
            for a in 0..n {
                for b in 0..n {
                    let pow3 = target.mult(target.mult(a, a), a);
                    if a == b && pow3 == target.identity() {
                        brute += 1;
                    }
                }
            }
            assert_eq!(hom_count(&g, &target), brute);
        }
    }

    #[test]
    fn presimplification_eliminates_defined_generators() {
        // c occurs once, in the relator that defines it.
        let g = FpGroup::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![(0, false), (1, false), (2, true)],
                vec![(0, false), (0, false)],
            ],
        )
        .unwrap();
        let s = g.presimplified();
        assert_eq!(s.num_gens(), 2);
        assert_eq!(s.relators().len(), 1);
        for (_, target) in group_catalog() {
            assert_eq!(hom_count(&g, &target), hom_count(&s, &target));
        }
    }

    #[test]
    fn table_presentation_keeps_invariants() {
        let g = table_presentation(&cyclic_group(3));
        let ab = abelianization(&g);
        assert_eq!(ab.free_rank, 0);
        assert_eq!(ab.torsion, vec![3]);
        assert_eq!(hom_count(&g, &cyclic_group(3)), 3);
        assert_eq!(hom_count(&g, &cyclic_group(2)), 1);
    }

    #[test]
    fn catalog_covers_small_orders() {
        let catalog = group_catalog();
        assert_eq!(catalog.len(), 14);
        let orders: Vec<usize> = catalog.iter().map(|(_, g)| g.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8]);
        // Pairwise nonisomorphic.
        for i in 0..catalog.len() {
            for j in i + 1..catalog.len() {
                assert!(
                    !catalog[i].1.is_isomorphic(&catalog[j].1),
                    "{} vs {}",
                    catalog[i].0,
                    catalog[j].0
                );
            }
        }
    }
}
