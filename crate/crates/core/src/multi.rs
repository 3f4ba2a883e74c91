//! Multisimplicial sets: several simplicial directions with commuting
//! structure maps, truncated by a dimension bound per axis.
//!
//! A set of arity n stores one cell table per multi-index (m1, ..., mn)
//! with every mi within its bound. Arity 0 is allowed and is a plain set;
//! it shows up as the result of collapsing the last axis of an arity-1
//! set. Face and degeneracy tables are kept per axis, and everything is
//! index-based with sorted identifier tables, as in the one-axis case.

use crate::monotone::{generator_steps, GeneratorStep, MonotoneMap};
use crate::report::ValidationReport;
use crate::sset::{pair_id, Partition, SimplicialSet, UnionFind};
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
struct MultiLevel {
    cells: Vec<String>,
    index: BTreeMap<String, usize>,
    /// faces[axis][i][cell]; empty on an axis where this level is 0.
    faces: Vec<Vec<Vec<usize>>>,
    /// degens[axis][i][cell]; empty on an axis where this level is at the bound.
    degens: Vec<Vec<Vec<usize>>>,
}

impl MultiLevel {
    fn new(cells: Vec<String>, arity: usize) -> Self {
        let index = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        MultiLevel {
            cells,
            index,
            faces: vec![Vec::new(); arity],
            degens: vec![Vec::new(); arity],
        }
    }
}

/// A finite multisimplicial set with per-axis dimension bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSSet {
    dim_bounds: Vec<usize>,
    levels: BTreeMap<Vec<usize>, MultiLevel>,
}

/// All multi-indices within the bounds, in lexicographic order.
pub fn all_indices(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::new();
        for idx in &out {
            for v in 0..=b {
                let mut w = idx.clone();
                w.push(v);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn index_string(idx: &[usize]) -> String {
    format!(
        "({})",
        idx.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

impl MultiSSet {
    pub fn arity(&self) -> usize {
        self.dim_bounds.len()
    }

    pub fn dim_bounds(&self) -> &[usize] {
        &self.dim_bounds
    }

    pub fn indices(&self) -> Vec<Vec<usize>> {
        all_indices(&self.dim_bounds)
    }

    fn level(&self, idx: &[usize]) -> &MultiLevel {
        self.levels.get(idx).expect("index within bounds")
    }

    pub fn cells(&self, idx: &[usize]) -> &[String] {
        &self.level(idx).cells
    }

    pub fn cell_count(&self, idx: &[usize]) -> usize {
        self.level(idx).cells.len()
    }

    pub fn cell_id(&self, idx: &[usize], cell: usize) -> &str {
        &self.level(idx).cells[cell]
    }

    pub fn cell_index(&self, idx: &[usize], id: &str) -> Option<usize> {
        self.level(idx).index.get(id).copied()
    }

    /// d_i on the given axis; the result lives at the index lowered there.
    pub fn face(&self, idx: &[usize], axis: usize, i: usize, cell: usize) -> usize {
        self.level(idx).faces[axis][i][cell]
    }

    pub fn degeneracy(&self, idx: &[usize], axis: usize, i: usize, cell: usize) -> usize {
        self.level(idx).degens[axis][i][cell]
    }

    /// Applies a monotone map contravariantly along one axis.
    pub fn apply_axis_monotone(
        &self,
        axis: usize,
        f: &MonotoneMap,
        mut idx: Vec<usize>,
        cell: usize,
    ) -> Result<(Vec<usize>, usize)> {
        if axis >= self.arity() {
            return Err(Error::AxisOutOfBound {
                axis,
                arity: self.arity(),
            });
        }
        let bound = self.dim_bounds[axis];
        if f.target_rank() > bound || f.source_rank() > bound {
            return Err(Error::LevelOutOfBound {
                level: f.target_rank().max(f.source_rank()),
                bound,
            });
        }
        if idx[axis] != f.target_rank() {
            return Err(Error::RankMismatch {
                left: idx[axis],
                right: f.target_rank(),
            });
        }
        let mut c = cell;
        for step in generator_steps(f) {
            match step {
                GeneratorStep::Face { level, i } => {
                    idx[axis] = level;
                    c = self.face(&idx, axis, i, c);
                    idx[axis] = level - 1;
                }
                GeneratorStep::Degeneracy { level, i } => {
                    idx[axis] = level;
                    c = self.degeneracy(&idx, axis, i, c);
                    idx[axis] = level + 1;
                }
            }
        }
        Ok((idx, c))
    }

    pub(crate) fn from_parts(
        dim_bounds: Vec<usize>,
        mut data: BTreeMap<Vec<usize>, (Vec<String>, Vec<Vec<Vec<usize>>>, Vec<Vec<Vec<usize>>>)>,
    ) -> Result<Self> {
        let arity = dim_bounds.len();
        let indices = all_indices(&dim_bounds);
        let mut levels = BTreeMap::new();
        for idx in &indices {
            let (cells, faces, degens) = data.remove(idx).ok_or_else(|| Error::BadStructure {
                detail: format!("missing level {}", index_string(idx)),
            })?;
            let count = cells.len();
            let mut level = MultiLevel::new(cells, arity);
            if faces.len() != arity || degens.len() != arity {
                return Err(Error::BadStructure {
                    detail: format!("level {} needs one table set per axis", index_string(idx)),
                });
            }
            for axis in 0..arity {
                let mut lowered = idx.clone();
                let expected_faces = if idx[axis] == 0 { 0 } else { idx[axis] + 1 };
                if faces[axis].len() != expected_faces && count > 0 {
                    return Err(Error::BadStructure {
                        detail: format!(
                            "level {} axis {axis} needs {expected_faces} face tables",
                            index_string(idx)
                        ),
                    });
                }
                if idx[axis] > 0 {
                    lowered[axis] = idx[axis] - 1;
                    let below = levels
                        .get(&lowered)
                        .map(|l: &MultiLevel| l.cells.len())
                        .or_else(|| data.get(&lowered).map(|(c, _, _)| c.len()))
                        .unwrap_or(0);
                    for table in &faces[axis] {
                        if table.len() != count || table.iter().any(|&t| t >= below) {
                            return Err(Error::BadStructure {
                                detail: format!(
                                    "face table at level {} axis {axis} has the wrong shape",
                                    index_string(idx)
                                ),
                            });
                        }
                    }
                }
                let expected_degens = if idx[axis] == dim_bounds[axis] {
                    0
                } else {
                    idx[axis] + 1
                };
                if degens[axis].len() != expected_degens && count > 0 {
                    return Err(Error::BadStructure {
                        detail: format!(
                            "level {} axis {axis} needs {expected_degens} degeneracy tables",
                            index_string(idx)
                        ),
                    });
                }
                if idx[axis] < dim_bounds[axis] {
                    let mut raised = idx.clone();
                    raised[axis] = idx[axis] + 1;
                    let above = levels
                        .get(&raised)
                        .map(|l: &MultiLevel| l.cells.len())
                        .or_else(|| data.get(&raised).map(|(c, _, _)| c.len()))
                        .unwrap_or(0);
                    for table in &degens[axis] {
                        if table.len() != count || table.iter().any(|&t| t >= above) {
                            return Err(Error::BadStructure {
                                detail: format!(
                                    "degeneracy table at level {} axis {axis} has the wrong shape",
                                    index_string(idx)
                                ),
                            });
                        }
                    }
                }
                level.faces[axis] = if count > 0 {
                    faces[axis].clone()
                } else {
                    vec![Vec::new(); expected_faces]
                };
                level.degens[axis] = if count > 0 {
                    degens[axis].clone()
                } else {
                    vec![Vec::new(); expected_degens]
                };
            }
            levels.insert(idx.clone(), level);
        }
        Ok(MultiSSet { dim_bounds, levels })
    }

    /// Keeps only flagged cells; errors if the selection is not closed
    /// under the structure maps.
    pub(crate) fn restrict(&self, keep: &BTreeMap<Vec<usize>, Vec<bool>>) -> Result<MultiSSet> {
        let mut renumber: BTreeMap<Vec<usize>, Vec<Option<usize>>> = BTreeMap::new();
        let mut data = BTreeMap::new();
        for idx in self.indices() {
            let flags = keep.get(&idx).ok_or_else(|| Error::BadStructure {
                detail: format!("missing keep flags at {}", index_string(&idx)),
            })?;
            let mut ids = Vec::new();
            let mut map = vec![None; self.cell_count(&idx)];
            for (c, flag) in flags.iter().enumerate() {
                if *flag {
                    map[c] = Some(ids.len());
                    ids.push(self.cell_id(&idx, c).to_string());
                }
            }
            renumber.insert(idx.clone(), map);
            data.insert(idx, (ids, Vec::new(), Vec::new()));
        }
        for idx in self.indices() {
            let flags = &keep[&idx];
            let mut faces = Vec::new();
            let mut degens = Vec::new();
            for axis in 0..self.arity() {
                let mut face_tables = Vec::new();
                if idx[axis] > 0 {
                    let mut lowered = idx.clone();
                    lowered[axis] -= 1;
                    for i in 0..=idx[axis] {
                        let mut table = Vec::new();
                        for (c, flag) in flags.iter().enumerate() {
                            if !*flag {
                                continue;
                            }
                            let t = self.face(&idx, axis, i, c);
                            let t2 = renumber[&lowered][t].ok_or_else(|| Error::BadStructure {
                                detail: format!(
                                    "cell `{}` at {} leaves the restricted set",
                                    self.cell_id(&idx, c),
                                    index_string(&idx)
                                ),
                            })?;
                            table.push(t2);
                        }
                        face_tables.push(table);
                    }
                }
                faces.push(face_tables);
                let mut degen_tables = Vec::new();
                if idx[axis] < self.dim_bounds[axis] {
                    let mut raised = idx.clone();
                    raised[axis] += 1;
                    for i in 0..=idx[axis] {
                        let mut table = Vec::new();
                        for (c, flag) in flags.iter().enumerate() {
                            if !*flag {
                                continue;
                            }
                            let t = self.degeneracy(&idx, axis, i, c);
                            let t2 = renumber[&raised][t].ok_or_else(|| Error::BadStructure {
                                detail: format!(
                                    "cell `{}` at {} leaves the restricted set",
                                    self.cell_id(&idx, c),
                                    index_string(&idx)
                                ),
                            })?;
                            table.push(t2);
                        }
                        degen_tables.push(table);
                    }
                }
                degens.push(degen_tables);
            }
            let entry = data.get_mut(&idx).unwrap();
            entry.1 = faces;
            entry.2 = degens;
        }
        MultiSSet::from_parts(self.dim_bounds.clone(), data)
    }

    /// True when every structure map is a bijection, so the set carries no
    /// information beyond its level-zero cells. Constant sets qualify, and
    /// so do sets that are constant only up to renaming.
    pub fn is_discrete(&self) -> bool {
        for idx in self.indices() {
            let level = self.level(&idx);
            let count = level.cells.len();
            for (axis, tables) in level.faces.iter().enumerate() {
                let mut lowered = idx.clone();
                if idx[axis] > 0 {
                    lowered[axis] -= 1;
                }
                for table in tables {
                    if self.cell_count(&lowered) != count {
                        return false;
                    }
                    let mut seen = vec![false; count];
                    if !table
                        .iter()
                        .all(|&t| !std::mem::replace(&mut seen[t], true))
                    {
                        return false;
                    }
                }
            }
            for (axis, tables) in level.degens.iter().enumerate() {
                let mut raised = idx.clone();
                if idx[axis] < self.dim_bounds[axis] {
                    raised[axis] += 1;
                }
                for table in tables {
                    if self.cell_count(&raised) != count {
                        return false;
                    }
                    let mut seen = vec![false; count];
                    if !table
                        .iter()
                        .all(|&t| !std::mem::replace(&mut seen[t], true))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True when every level carries the same cells and all structure maps
    /// are the identity on them.
    pub fn is_constant(&self) -> bool {
        let indices = self.indices();
        let first = &self.level(&indices[0]).cells;
        for idx in &indices {
            let level = self.level(idx);
            if &level.cells != first {
                return false;
            }
            let identity: Vec<usize> = (0..level.cells.len()).collect();
            for axis_tables in level.faces.iter().chain(level.degens.iter()) {
                if axis_tables.iter().any(|t| t != &identity) {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Builder

#[derive(Debug, Default)]
pub struct MultiSSetBuilder {
    dim_bounds: Vec<usize>,
    cells: BTreeMap<Vec<usize>, Vec<String>>,
    faces: BTreeMap<(Vec<usize>, usize, usize, String), String>,
    degens: BTreeMap<(Vec<usize>, usize, usize, String), String>,
}

impl MultiSSetBuilder {
    pub fn new(dim_bounds: Vec<usize>) -> Self {
        MultiSSetBuilder {
            dim_bounds,
            ..Default::default()
        }
    }

    pub fn cell(&mut self, idx: &[usize], id: impl Into<String>) -> &mut Self {
        self.cells.entry(idx.to_vec()).or_default().push(id.into());
        self
    }

    pub fn face(
        &mut self,
        idx: &[usize],
        axis: usize,
        i: usize,
        cell: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.faces
            .insert((idx.to_vec(), axis, i, cell.into()), to.into());
        self
    }

    pub fn degeneracy(
        &mut self,
        idx: &[usize],
        axis: usize,
        i: usize,
        cell: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.degens
            .insert((idx.to_vec(), axis, i, cell.into()), to.into());
        self
    }

    pub fn build(&self) -> Result<MultiSSet> {
        let arity = self.dim_bounds.len();
        let indices = all_indices(&self.dim_bounds);
        let mut sorted: BTreeMap<Vec<usize>, Vec<String>> = BTreeMap::new();
        for idx in &indices {
            let mut cells = self.cells.get(idx).cloned().unwrap_or_default();
            cells.sort();
            if cells.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BadStructure {
                    detail: format!("duplicate cell id at {}", index_string(idx)),
                });
            }
            sorted.insert(idx.clone(), cells);
        }
        let position = |idx: &Vec<usize>, id: &String| -> Result<usize> {
            sorted[idx]
                .binary_search(id)
                .map_err(|_| Error::UnknownCell {
                    id: id.clone(),
                    place: format!("level {}", index_string(idx)),
                })
        };
        let mut data = BTreeMap::new();
        for idx in &indices {
            let cells = sorted[idx].clone();
            let mut faces = Vec::new();
            let mut degens = Vec::new();
            for axis in 0..arity {
                let mut face_tables = Vec::new();
                if idx[axis] > 0 {
                    let mut lowered = idx.clone();
                    lowered[axis] -= 1;
                    for i in 0..=idx[axis] {
                        let mut table = Vec::new();
                        for id in &cells {
                            let key = (idx.clone(), axis, i, id.clone());
                            let to = self.faces.get(&key).ok_or_else(|| Error::BadStructure {
                                detail: format!(
                                    "cell `{id}` at {} has no face d{i} on axis {axis}",
                                    index_string(idx)
                                ),
                            })?;
                            table.push(position(&lowered, to)?);
                        }
                        face_tables.push(table);
                    }
                }
                faces.push(face_tables);
                let mut degen_tables = Vec::new();
                if idx[axis] < self.dim_bounds[axis] {
                    let mut raised = idx.clone();
                    raised[axis] += 1;
                    for i in 0..=idx[axis] {
                        let mut table = Vec::new();
                        for id in &cells {
                            let key = (idx.clone(), axis, i, id.clone());
                            let to = self.degens.get(&key).ok_or_else(|| Error::BadStructure {
                                detail: format!(
                                    "cell `{id}` at {} has no degeneracy s{i} on axis {axis}",
                                    index_string(idx)
                                ),
                            })?;
                            table.push(position(&raised, to)?);
                        }
                        degen_tables.push(table);
                    }
                }
                degens.push(degen_tables);
            }
            data.insert(idx.clone(), (cells, faces, degens));
        }
        MultiSSet::from_parts(self.dim_bounds.clone(), data)
    }
}

// ---------------------------------------------------------------------------
// Validation

/// Checks the simplicial identities on every axis and commutation between
/// all pairs of distinct axes.
pub fn validate_multi(x: &MultiSSet) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let arity = x.arity();
    for idx in x.indices() {
        let at = |rep: &mut ValidationReport, law: String, cell: usize| {
            rep.push(
                law,
                format!("cell `{}` at level {}", x.cell_id(&idx, cell), index_string(&idx)),
            );
        };
        for axis in 0..arity {
            let m = idx[axis];
            // d_i d_j = d_{j-1} d_i for i < j, along one axis.
            if m >= 2 {
                let mut lowered = idx.clone();
                lowered[axis] = m - 1;
                for j in 1..=m {
                    for i in 0..j {
                        for c in 0..x.cell_count(&idx) {
                            let left = x.face(&lowered, axis, i, x.face(&idx, axis, j, c));
                            let right = x.face(&lowered, axis, j - 1, x.face(&idx, axis, i, c));
                            if left != right {
                                at(
                                    &mut rep,
                                    format!("axis {axis}: d{i} d{j} = d{} d{i}", j - 1),
                                    c,
                                );
                            }
                        }
                    }
                }
            }
            // s_i s_j = s_{j+1} s_i for i <= j.
            if m + 2 <= x.dim_bounds[axis] {
                let mut raised = idx.clone();
                raised[axis] = m + 1;
                for j in 0..=m {
                    for i in 0..=j {
                        for c in 0..x.cell_count(&idx) {
                            let left =
                                x.degeneracy(&raised, axis, j + 1, x.degeneracy(&idx, axis, i, c));
                            let right =
                                x.degeneracy(&raised, axis, i, x.degeneracy(&idx, axis, j, c));
                            if left != right {
                                at(
                                    &mut rep,
                                    format!("axis {axis}: s{} s{i} = s{i} s{j}", j + 1),
                                    c,
                                );
                            }
                        }
                    }
                }
            }
            // Mixed identities along one axis.
            if m < x.dim_bounds[axis] {
                let mut raised = idx.clone();
                raised[axis] = m + 1;
                for j in 0..=m {
                    for i in 0..=m + 1 {
                        for c in 0..x.cell_count(&idx) {
                            let sc = x.degeneracy(&idx, axis, j, c);
                            let got = x.face(&raised, axis, i, sc);
                            if i == j || i == j + 1 {
                                if got != c {
                                    at(&mut rep, format!("axis {axis}: d{i} s{j} = id"), c);
                                }
                            } else if m >= 1 {
                                let mut lowered = idx.clone();
                                lowered[axis] = m - 1;
                                let want = if i < j {
                                    x.degeneracy(&lowered, axis, j - 1, x.face(&idx, axis, i, c))
                                } else {
                                    x.degeneracy(&lowered, axis, j, x.face(&idx, axis, i - 1, c))
                                };
                                if got != want {
                                    at(
                                        &mut rep,
                                        format!("axis {axis}: d{i} s{j} shifts"),
                                        c,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        // Cross-axis commutation.
        for a in 0..arity {
            for b in a + 1..arity {
                let ma = idx[a];
                let mb = idx[b];
                for c in 0..x.cell_count(&idx) {
                    if ma >= 1 && mb >= 1 {
                        let mut low_a = idx.clone();
                        low_a[a] -= 1;
                        let mut low_b = idx.clone();
                        low_b[b] -= 1;
                        for i in 0..=ma {
                            for j in 0..=mb {
                                let left = x.face(&low_b, a, i, x.face(&idx, b, j, c));
                                let right = x.face(&low_a, b, j, x.face(&idx, a, i, c));
                                if left != right {
                                    at(
                                        &mut rep,
                                        format!("axes {a},{b}: d{i} and d{j} commute"),
                                        c,
                                    );
                                }
                            }
                        }
                    }
                    if ma >= 1 && mb < x.dim_bounds[b] {
                        let mut low_a = idx.clone();
                        low_a[a] -= 1;
                        let mut high_b = idx.clone();
                        high_b[b] += 1;
                        for i in 0..=ma {
                            for j in 0..=mb {
                                let left = x.face(&high_b, a, i, x.degeneracy(&idx, b, j, c));
                                let right = x.degeneracy(&low_a, b, j, x.face(&idx, a, i, c));
                                if left != right {
                                    at(
                                        &mut rep,
                                        format!("axes {a},{b}: d{i} and s{j} commute"),
                                        c,
                                    );
                                }
                            }
                        }
                    }
                    if mb >= 1 && ma < x.dim_bounds[a] {
                        let mut low_b = idx.clone();
                        low_b[b] -= 1;
                        let mut high_a = idx.clone();
                        high_a[a] += 1;
                        for i in 0..=ma {
                            for j in 0..=mb {
                                let left = x.degeneracy(&low_b, a, i, x.face(&idx, b, j, c));
                                let right = x.face(&high_a, b, j, x.degeneracy(&idx, a, i, c));
                                if left != right {
                                    at(
                                        &mut rep,
                                        format!("axes {a},{b}: s{i} and d{j} commute"),
                                        c,
                                    );
                                }
                            }
                        }
                    }
                    if ma < x.dim_bounds[a] && mb < x.dim_bounds[b] {
                        let mut high_a = idx.clone();
                        high_a[a] += 1;
                        let mut high_b = idx.clone();
                        high_b[b] += 1;
                        for i in 0..=ma {
                            for j in 0..=mb {
                                let left = x.degeneracy(&high_b, a, i, x.degeneracy(&idx, b, j, c));
                                let right =
                                    x.degeneracy(&high_a, b, j, x.degeneracy(&idx, a, i, c));
                                if left != right {
                                    at(
                                        &mut rep,
                                        format!("axes {a},{b}: s{i} and s{j} commute"),
                                        c,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Conversions and slices

/// An arity-1 set is a simplicial set.
pub fn to_sset(x: &MultiSSet) -> Result<SimplicialSet> {
    if x.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: x.arity(),
        });
    }
    let d = x.dim_bounds[0];
    let mut cells = Vec::new();
    let mut faces = vec![Vec::new(); d + 1];
    let mut degens = vec![Vec::new(); d + 1];
    for k in 0..=d {
        let idx = vec![k];
        cells.push(x.cells(&idx).to_vec());
        if k > 0 {
            faces[k] = x.level(&idx).faces[0].clone();
        }
        if k < d {
            degens[k] = x.level(&idx).degens[0].clone();
        }
    }
    SimplicialSet::from_parts(d, cells, faces, degens)
}

pub fn from_sset(x: &SimplicialSet) -> MultiSSet {
    let d = x.dim_bound();
    let mut data = BTreeMap::new();
    for k in 0..=d {
        let cells = x.cells(k).to_vec();
        let faces = if k == 0 {
            vec![Vec::new()]
        } else {
            vec![(0..=k).map(|i| (0..cells.len()).map(|c| x.face(k, i, c)).collect()).collect()]
        };
        let degens = if k == d {
            vec![Vec::new()]
        } else {
            vec![(0..=k)
                .map(|i| (0..cells.len()).map(|c| x.degeneracy(k, i, c)).collect())
                .collect()]
        };
        data.insert(vec![k], (cells, faces, degens));
    }
    MultiSSet::from_parts(vec![d], data).expect("one-axis tables carry over")
}

/// The simplicial set running along `axis` with all other coordinates
/// frozen at the values in `at` (the entry at `axis` is ignored).
pub fn slice_sset(x: &MultiSSet, axis: usize, at: &[usize]) -> Result<SimplicialSet> {
    if axis >= x.arity() {
        return Err(Error::AxisOutOfBound {
            axis,
            arity: x.arity(),
        });
    }
    let d = x.dim_bounds[axis];
    let mut cells = Vec::new();
    let mut faces = vec![Vec::new(); d + 1];
    let mut degens = vec![Vec::new(); d + 1];
    for k in 0..=d {
        let mut idx = at.to_vec();
        idx[axis] = k;
        cells.push(x.cells(&idx).to_vec());
        if k > 0 {
            faces[k] = x.level(&idx).faces[axis].clone();
        }
        if k < d {
            degens[k] = x.level(&idx).degens[axis].clone();
        }
    }
    SimplicialSet::from_parts(d, cells, faces, degens)
}

/// Freezes the first axis at level m, leaving an arity n-1 set.
pub fn outer_level(x: &MultiSSet, m: usize) -> Result<MultiSSet> {
    if x.arity() == 0 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: 0,
        });
    }
    if m > x.dim_bounds[0] {
        return Err(Error::LevelOutOfBound {
            level: m,
            bound: x.dim_bounds[0],
        });
    }
    let bounds = x.dim_bounds[1..].to_vec();
    let mut data = BTreeMap::new();
    for inner in all_indices(&bounds) {
        let mut idx = vec![m];
        idx.extend_from_slice(&inner);
        let level = x.level(&idx);
        data.insert(
            inner,
            (
                level.cells.clone(),
                level.faces[1..].to_vec(),
                level.degens[1..].to_vec(),
            ),
        );
    }
    MultiSSet::from_parts(bounds, data)
}

// ---------------------------------------------------------------------------
// Maps

/// A levelwise map of multisimplicial sets; construction checks that the
/// shapes line up and that it commutes with every structure map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMap {
    source: MultiSSet,
    target: MultiSSet,
    tables: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl MultiMap {
    pub fn from_tables(
        source: MultiSSet,
        target: MultiSSet,
        tables: BTreeMap<Vec<usize>, Vec<usize>>,
    ) -> Result<Self> {
        if source.dim_bounds != target.dim_bounds {
            return Err(Error::BoundsMismatch);
        }
        for idx in source.indices() {
            let table = tables.get(&idx).ok_or_else(|| Error::BadStructure {
                detail: format!("map is missing level {}", index_string(&idx)),
            })?;
            if table.len() != source.cell_count(&idx)
                || table.iter().any(|&t| t >= target.cell_count(&idx))
            {
                return Err(Error::BadStructure {
                    detail: format!("map table at {} has the wrong shape", index_string(&idx)),
                });
            }
        }
        for idx in source.indices() {
            let table = &tables[&idx];
            for axis in 0..source.arity() {
                if idx[axis] > 0 {
                    let mut lowered = idx.clone();
                    lowered[axis] -= 1;
                    let below = &tables[&lowered];
                    for i in 0..=idx[axis] {
                        for c in 0..source.cell_count(&idx) {
                            if target.face(&idx, axis, i, table[c])
                                != below[source.face(&idx, axis, i, c)]
                            {
                                return Err(Error::BadStructure {
                                    detail: format!(
                                        "map does not commute with d{i} on axis {axis} at {}",
                                        index_string(&idx)
                                    ),
                                });
                            }
                        }
                    }
                }
                if idx[axis] < source.dim_bounds[axis] {
                    let mut raised = idx.clone();
                    raised[axis] += 1;
                    let above = &tables[&raised];
                    for i in 0..=idx[axis] {
                        for c in 0..source.cell_count(&idx) {
                            if target.degeneracy(&idx, axis, i, table[c])
                                != above[source.degeneracy(&idx, axis, i, c)]
                            {
                                return Err(Error::BadStructure {
                                    detail: format!(
                                        "map does not commute with s{i} on axis {axis} at {}",
                                        index_string(&idx)
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(MultiMap {
            source,
            target,
            tables,
        })
    }

    pub fn from_fn(
        source: &MultiSSet,
        target: &MultiSSet,
        assign: impl Fn(&[usize], &str) -> String,
    ) -> Result<Self> {
        let mut tables = BTreeMap::new();
        for idx in source.indices() {
            let mut table = Vec::new();
            for id in source.cells(&idx) {
                let to = assign(&idx, id);
                let t = target
                    .cell_index(&idx, &to)
                    .ok_or_else(|| Error::UnknownCell {
                        id: to,
                        place: format!("target level {}", index_string(&idx)),
                    })?;
                table.push(t);
            }
            tables.insert(idx, table);
        }
        MultiMap::from_tables(source.clone(), target.clone(), tables)
    }

    pub fn identity(x: &MultiSSet) -> Self {
        let tables = x
            .indices()
            .into_iter()
            .map(|idx| {
                let n = x.cell_count(&idx);
                (idx, (0..n).collect())
            })
            .collect();
        MultiMap {
            source: x.clone(),
            target: x.clone(),
            tables,
        }
    }

    pub fn source(&self) -> &MultiSSet {
        &self.source
    }

    pub fn target(&self) -> &MultiSSet {
        &self.target
    }

    pub fn apply(&self, idx: &[usize], cell: usize) -> usize {
        self.tables[idx][cell]
    }

    pub fn then(&self, other: &MultiMap) -> Result<MultiMap> {
        if self.target != other.source {
            return Err(Error::TargetMismatch);
        }
        let tables = self
            .tables
            .iter()
            .map(|(idx, t)| {
                (
                    idx.clone(),
                    t.iter().map(|&c| other.tables[idx][c]).collect(),
                )
            })
            .collect();
        Ok(MultiMap {
            source: self.source.clone(),
            target: other.target.clone(),
            tables,
        })
    }

    pub fn is_levelwise_bijection(&self) -> bool {
        self.source.indices().iter().all(|idx| {
            if self.source.cell_count(idx) != self.target.cell_count(idx) {
                return false;
            }
            let mut seen = vec![false; self.target.cell_count(idx)];
            self.tables[idx]
                .iter()
                .all(|&t| !std::mem::replace(&mut seen[t], true))
        })
    }
}

/// The map induced on outer levels by a monotone map on the first axis,
/// from the level at `f`'s target rank to the level at its source rank.
pub fn outer_monotone_map(x: &MultiSSet, f: &MonotoneMap) -> Result<MultiMap> {
    let source = outer_level(x, f.target_rank())?;
    let target = outer_level(x, f.source_rank())?;
    let mut tables = BTreeMap::new();
    for inner in source.indices() {
        let mut table = Vec::new();
        for c in 0..source.cell_count(&inner) {
            let mut idx = vec![f.target_rank()];
            idx.extend_from_slice(&inner);
            let (_, t) = x.apply_axis_monotone(0, f, idx, c)?;
            table.push(t);
        }
        tables.insert(inner, table);
    }
    MultiMap::from_tables(source, target, tables)
}

// ---------------------------------------------------------------------------
// Products and diagonals

/// External product: arities and bounds concatenate, cells pair up.
pub fn external_product(x: &MultiSSet, y: &MultiSSet) -> MultiSSet {
    let mut bounds = x.dim_bounds.clone();
    bounds.extend_from_slice(&y.dim_bounds);
    let nx = x.arity();
    let mut data = BTreeMap::new();
    for ix in x.indices() {
        for iy in y.indices() {
            let mut idx = ix.clone();
            idx.extend_from_slice(&iy);
            // Pairs in lexicographic order of (x cell, y cell): both sides
            // are sorted, so the pairs are sorted too.
            let mut cells = Vec::with_capacity(x.cell_count(&ix) * y.cell_count(&iy));
            for a in x.cells(&ix) {
                for b in y.cells(&iy) {
                    cells.push(pair_id(a, b));
                }
            }
            let ny_count = y.cell_count(&iy);
            let mut faces = Vec::new();
            let mut degens = Vec::new();
            for axis in 0..bounds.len() {
                let m = idx[axis];
                let on_x = axis < nx;
                let bound = bounds[axis];
                let mut face_tables = Vec::new();
                if m > 0 {
                    for i in 0..=m {
                        let mut table = Vec::with_capacity(cells.len());
                        for a in 0..x.cell_count(&ix) {
                            for b in 0..ny_count {
                                let t = if on_x {
                                    x.face(&ix, axis, i, a) * ny_count + b
                                } else {
                                    let lowered_count = {
                                        let mut low = iy.clone();
                                        low[axis - nx] -= 1;
                                        y.cell_count(&low)
                                    };
                                    a * lowered_count + y.face(&iy, axis - nx, i, b)
                                };
                                table.push(t);
                            }
                        }
                        face_tables.push(table);
                    }
                }
                faces.push(face_tables);
                let mut degen_tables = Vec::new();
                if m < bound {
                    for i in 0..=m {
                        let mut table = Vec::with_capacity(cells.len());
                        for a in 0..x.cell_count(&ix) {
                            for b in 0..ny_count {
                                let t = if on_x {
                                    x.degeneracy(&ix, axis, i, a) * ny_count + b
                                } else {
                                    let raised_count = {
                                        let mut high = iy.clone();
                                        high[axis - nx] += 1;
                                        y.cell_count(&high)
                                    };
                                    a * raised_count + y.degeneracy(&iy, axis - nx, i, b)
                                };
                                table.push(t);
                            }
                        }
                        degen_tables.push(table);
                    }
                }
                degens.push(degen_tables);
            }
            data.insert(idx, (cells, faces, degens));
        }
    }
    MultiSSet::from_parts(bounds, data).expect("product tables are total")
}

/// Merges `axis` and `axis + 1` into one diagonal axis; the new bound is
/// the smaller of the two and cells keep their names.
pub fn diag_adjacent(x: &MultiSSet, axis: usize) -> Result<MultiSSet> {
    if axis + 1 >= x.arity() {
        return Err(Error::AxisOutOfBound {
            axis: axis + 1,
            arity: x.arity(),
        });
    }
    let merged = x.dim_bounds[axis].min(x.dim_bounds[axis + 1]);
    let mut bounds = Vec::new();
    bounds.extend_from_slice(&x.dim_bounds[..axis]);
    bounds.push(merged);
    bounds.extend_from_slice(&x.dim_bounds[axis + 2..]);
    let unmerge = |idx: &[usize]| -> Vec<usize> {
        let mut full = Vec::with_capacity(x.arity());
        full.extend_from_slice(&idx[..axis]);
        full.push(idx[axis]);
        full.push(idx[axis]);
        full.extend_from_slice(&idx[axis + 1..]);
        full
    };
    let mut data = BTreeMap::new();
    for idx in all_indices(&bounds) {
        let full = unmerge(&idx);
        let cells = x.cells(&full).to_vec();
        let count = cells.len();
        let mut faces = Vec::new();
        let mut degens = Vec::new();
        for (new_axis, &m) in idx.iter().enumerate() {
            let mut face_tables = Vec::new();
            if m > 0 {
                for i in 0..=m {
                    let mut table = Vec::with_capacity(count);
                    for c in 0..count {
                        let t = if new_axis == axis {
                            // Both merged directions drop together.
                            let mut half = full.clone();
                            let first = x.face(&full, axis, i, c);
                            half[axis] -= 1;
                            x.face(&half, axis + 1, i, first)
                        } else {
                            let old_axis = if new_axis < axis { new_axis } else { new_axis + 1 };
                            x.face(&full, old_axis, i, c)
                        };
                        table.push(t);
                    }
                    face_tables.push(table);
                }
            }
            faces.push(face_tables);
            let mut degen_tables = Vec::new();
            if m < bounds[new_axis] {
                for i in 0..=m {
                    let mut table = Vec::with_capacity(count);
                    for c in 0..count {
                        let t = if new_axis == axis {
                            let mut half = full.clone();
                            let first = x.degeneracy(&full, axis, i, c);
                            half[axis] += 1;
                            x.degeneracy(&half, axis + 1, i, first)
                        } else {
                            let old_axis = if new_axis < axis { new_axis } else { new_axis + 1 };
                            x.degeneracy(&full, old_axis, i, c)
                        };
                        table.push(t);
                    }
                    degen_tables.push(table);
                }
            }
            degens.push(degen_tables);
        }
        data.insert(idx, (cells, faces, degens));
    }
    MultiSSet::from_parts(bounds, data)
}

/// The total diagonal: one simplicial direction, every axis stepping in
/// lockstep. The bound is the smallest axis bound.
pub fn total_diag(x: &MultiSSet) -> Result<SimplicialSet> {
    if x.arity() == 0 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: 0,
        });
    }
    let mut merged = x.clone();
    while merged.arity() > 1 {
        merged = diag_adjacent(&merged, 0)?;
    }
    to_sset(&merged)
}

/// The map induced between total diagonals: cell tables carry over level
/// by level.
pub fn total_diag_map(f: &MultiMap) -> Result<crate::sset::SSetMap> {
    let source = total_diag(f.source())?;
    let target = total_diag(f.target())?;
    let n = f.source().arity();
    let levels = (0..=source.dim_bound())
        .map(|k| f.tables[&vec![k; n]].clone())
        .collect();
    crate::sset::SSetMap::from_tables(source, target, levels)
}

/// Collapses all inner axes diagonally, leaving the outer axis and one
/// diagonal axis. The arity must be at least 2; at exactly 2 this is a
/// copy.
pub fn inner_diag_pair(x: &MultiSSet) -> Result<MultiSSet> {
    if x.arity() < 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: x.arity(),
        });
    }
    let mut merged = x.clone();
    while merged.arity() > 2 {
        merged = diag_adjacent(&merged, 1)?;
    }
    Ok(merged)
}

// ---------------------------------------------------------------------------
// Fiber products

pub struct MultiFiberProduct {
    pub object: MultiSSet,
    pub pr1: MultiMap,
    pub pr2: MultiMap,
}

/// Levelwise pullback over a shared target, cells named `(x|y)`.
pub fn multi_fiber_product(f: &MultiMap, g: &MultiMap) -> Result<MultiFiberProduct> {
    if f.target() != g.target() {
        return Err(Error::TargetMismatch);
    }
    let x = f.source();
    let y = g.source();
    let mut pairs: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    let mut index: BTreeMap<Vec<usize>, BTreeMap<(usize, usize), usize>> = BTreeMap::new();
    let mut data = BTreeMap::new();
    for idx in x.indices() {
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for yc in 0..y.cell_count(&idx) {
            buckets.entry(g.apply(&idx, yc)).or_default().push(yc);
        }
        let mut level_pairs = Vec::new();
        for xc in 0..x.cell_count(&idx) {
            if let Some(ys) = buckets.get(&f.apply(&idx, xc)) {
                for &yc in ys {
                    level_pairs.push((xc, yc));
                }
            }
        }
        let mut named: Vec<(String, (usize, usize))> = level_pairs
            .into_iter()
            .map(|(a, b)| (pair_id(x.cell_id(&idx, a), y.cell_id(&idx, b)), (a, b)))
            .collect();
        named.sort();
        index.insert(
            idx.clone(),
            named
                .iter()
                .enumerate()
                .map(|(i, (_, p))| (*p, i))
                .collect(),
        );
        pairs.insert(idx.clone(), named.iter().map(|(_, p)| *p).collect());
        data.insert(
            idx.clone(),
            (
                named.into_iter().map(|(id, _)| id).collect::<Vec<_>>(),
                Vec::new(),
                Vec::new(),
            ),
        );
    }
    for idx in x.indices() {
        let level_pairs = &pairs[&idx];
        let mut faces = Vec::new();
        let mut degens = Vec::new();
        for axis in 0..x.arity() {
            let mut face_tables = Vec::new();
            if idx[axis] > 0 {
                let mut lowered = idx.clone();
                lowered[axis] -= 1;
                for i in 0..=idx[axis] {
                    let table = level_pairs
                        .iter()
                        .map(|&(a, b)| {
                            index[&lowered][&(x.face(&idx, axis, i, a), y.face(&idx, axis, i, b))]
                        })
                        .collect();
                    face_tables.push(table);
                }
            }
            faces.push(face_tables);
            let mut degen_tables = Vec::new();
            if idx[axis] < x.dim_bounds()[axis] {
                let mut raised = idx.clone();
                raised[axis] += 1;
                for i in 0..=idx[axis] {
                    let table = level_pairs
                        .iter()
                        .map(|&(a, b)| {
                            index[&raised][&(
                                x.degeneracy(&idx, axis, i, a),
                                y.degeneracy(&idx, axis, i, b),
                            )]
                        })
                        .collect();
                    degen_tables.push(table);
                }
            }
            degens.push(degen_tables);
        }
        let entry = data.get_mut(&idx).unwrap();
        entry.1 = faces;
        entry.2 = degens;
    }
    let object = MultiSSet::from_parts(x.dim_bounds().to_vec(), data)?;
    let pr1_tables = pairs
        .iter()
        .map(|(idx, l)| (idx.clone(), l.iter().map(|&(a, _)| a).collect()))
        .collect();
    let pr2_tables = pairs
        .iter()
        .map(|(idx, l)| (idx.clone(), l.iter().map(|&(_, b)| b).collect()))
        .collect();
    let pr1 = MultiMap::from_tables(object.clone(), x.clone(), pr1_tables)?;
    let pr2 = MultiMap::from_tables(object.clone(), y.clone(), pr2_tables)?;
    Ok(MultiFiberProduct { object, pr1, pr2 })
}

// ---------------------------------------------------------------------------
// Collapsing an axis

/// Components along one axis: each remaining level becomes the set of
/// path components of the simplicial set running in that direction, named
/// by their smallest member. Fails with a witness if some structure map
/// does not descend to classes, which only happens on invalid input.
pub fn pi0_axis(x: &MultiSSet, axis: usize) -> Result<MultiSSet> {
    Ok(pi0_axis_classes(x, axis)?.0)
}

/// As `pi0_axis`, but also keeps, per remaining multi-index, the table
/// sending each cell at axis level zero to its class.
pub(crate) fn pi0_axis_classes(
    x: &MultiSSet,
    axis: usize,
) -> Result<(MultiSSet, BTreeMap<Vec<usize>, Vec<usize>>)> {
    if axis >= x.arity() {
        return Err(Error::AxisOutOfBound {
            axis,
            arity: x.arity(),
        });
    }
    if x.dim_bounds[axis] < 1 {
        return Err(Error::NeedsLevel {
            needed: 1,
            bound: x.dim_bounds[axis],
        });
    }
    let bounds: Vec<usize> = x
        .dim_bounds
        .iter()
        .enumerate()
        .filter(|&(a, _)| a != axis)
        .map(|(_, &b)| b)
        .collect();
    let reinsert = |inner: &[usize], v: usize| -> Vec<usize> {
        let mut full = Vec::with_capacity(x.arity());
        full.extend_from_slice(&inner[..axis]);
        full.push(v);
        full.extend_from_slice(&inner[axis..]);
        full
    };
    // Classes at axis level 0 for each remaining index.
    let mut class_of: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut data = BTreeMap::new();
    for inner in all_indices(&bounds) {
        let at0 = reinsert(&inner, 0);
        let at1 = reinsert(&inner, 1);
        let mut uf = UnionFind::new(x.cell_count(&at0));
        for e in 0..x.cell_count(&at1) {
            uf.union(x.face(&at1, axis, 0, e), x.face(&at1, axis, 1, e));
        }
        // Representative per root: the smallest identifier in the class.
        let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
        for c in 0..x.cell_count(&at0) {
            let root = uf.find(c);
            rep.entry(root)
                .and_modify(|r| {
                    if x.cell_id(&at0, c) < x.cell_id(&at0, *r) {
                        *r = c;
                    }
                })
                .or_insert(c);
        }
        let mut reps: Vec<usize> = rep.values().copied().collect();
        reps.sort_by_key(|&c| x.cell_id(&at0, c));
        let class_index: BTreeMap<usize, usize> = reps
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        let mut classes = vec![0usize; x.cell_count(&at0)];
        for c in 0..x.cell_count(&at0) {
            classes[c] = class_index[&rep[&uf.find(c)]];
        }
        let cells: Vec<String> = reps
            .iter()
            .map(|&c| x.cell_id(&at0, c).to_string())
            .collect();
        class_of.insert(inner.clone(), classes);
        data.insert(inner, (cells, Vec::new(), Vec::new()));
    }
    // Induced structure maps on classes, with a well-definedness check.
    for inner in all_indices(&bounds) {
        let at0 = reinsert(&inner, 0);
        let classes = &class_of[&inner];
        let class_count = data[&inner].0.len();
        // Members of each class, for checking every member.
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); class_count];
        for c in 0..x.cell_count(&at0) {
            members[classes[c]].push(c);
        }
        let mut faces = Vec::new();
        let mut degens = Vec::new();
        for (new_axis, &m) in inner.iter().enumerate() {
            let old_axis = if new_axis < axis { new_axis } else { new_axis + 1 };
            let mut face_tables = Vec::new();
            if m > 0 {
                let mut lowered = inner.clone();
                lowered[new_axis] -= 1;
                let lowered_classes = &class_of[&lowered];
                for i in 0..=m {
                    let mut table = Vec::with_capacity(class_count);
                    for class_members in members.iter() {
                        let images: Vec<usize> = class_members
                            .iter()
                            .map(|&c| lowered_classes[x.face(&at0, old_axis, i, c)])
                            .collect();
                        if images.windows(2).any(|w| w[0] != w[1]) {
                            return Err(Error::NotWellDefined {
                                detail: format!(
                                    "face d{i} on axis {old_axis} at {} splits a component \
                                     containing `{}`",
                                    index_string(&at0),
                                    x.cell_id(&at0, class_members[0])
                                ),
                            });
                        }
                        table.push(images[0]);
                    }
                    face_tables.push(table);
                }
            }
            faces.push(face_tables);
            let mut degen_tables = Vec::new();
            if m < bounds[new_axis] {
                let mut raised = inner.clone();
                raised[new_axis] += 1;
                let raised_classes = &class_of[&raised];
                for i in 0..=m {
                    let mut table = Vec::with_capacity(class_count);
                    for class_members in members.iter() {
                        let images: Vec<usize> = class_members
                            .iter()
                            .map(|&c| raised_classes[x.degeneracy(&at0, old_axis, i, c)])
                            .collect();
                        if images.windows(2).any(|w| w[0] != w[1]) {
                            return Err(Error::NotWellDefined {
                                detail: format!(
                                    "degeneracy s{i} on axis {old_axis} at {} splits a component \
                                     containing `{}`",
                                    index_string(&at0),
                                    x.cell_id(&at0, class_members[0])
                                ),
                            });
                        }
                        table.push(images[0]);
                    }
                    degen_tables.push(table);
                }
            }
            degens.push(degen_tables);
        }
        let entry = data.get_mut(&inner).unwrap();
        entry.1 = faces;
        entry.2 = degens;
    }
    Ok((MultiSSet::from_parts(bounds, data)?, class_of))
}

/// Collapses the innermost axis to components.
pub fn collapse_inner(x: &MultiSSet) -> Result<MultiSSet> {
    if x.arity() == 0 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: 0,
        });
    }
    pi0_axis(x, x.arity() - 1)
}

/// Applies the innermost collapse `times` times.
pub fn collapse_inner_iterated(x: &MultiSSet, times: usize) -> Result<MultiSSet> {
    let mut current = x.clone();
    for _ in 0..times {
        current = collapse_inner(&current)?;
    }
    Ok(current)
}

/// Collapses every axis, leaving the set of components of the whole
/// object, as a sorted list of representative identifiers.
pub fn component_representatives(x: &MultiSSet) -> Result<Vec<String>> {
    let collapsed = collapse_inner_iterated(x, x.arity())?;
    Ok(collapsed.cells(&[]).to_vec())
}

/// The partition of the cells at the zero multi-index into components of
/// the total diagonal, which for valid input matches the iterated
/// collapse.
pub fn diagonal_components(x: &MultiSSet) -> Result<Partition> {
    let diag = total_diag(x)?;
    crate::sset::pi0(&diag)
}

// ---------------------------------------------------------------------------
// Disjoint unions

pub fn disjoint_union_multi(
    x: &MultiSSet,
    y: &MultiSSet,
    tag_x: &str,
    tag_y: &str,
) -> Result<MultiSSet> {
    if x.dim_bounds != y.dim_bounds {
        return Err(Error::BoundsMismatch);
    }
    let mut placements: BTreeMap<Vec<usize>, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    let mut data = BTreeMap::new();
    for idx in x.indices() {
        let mut ids: Vec<(String, bool, usize)> = Vec::new();
        for (c, id) in x.cells(&idx).iter().enumerate() {
            ids.push((format!("{tag_x}:{id}"), false, c));
        }
        for (c, id) in y.cells(&idx).iter().enumerate() {
            ids.push((format!("{tag_y}:{id}"), true, c));
        }
        ids.sort();
        let mut from_x = vec![0usize; x.cell_count(&idx)];
        let mut from_y = vec![0usize; y.cell_count(&idx)];
        for (pos, (_, is_y, c)) in ids.iter().enumerate() {
            if *is_y {
                from_y[*c] = pos;
            } else {
                from_x[*c] = pos;
            }
        }
        placements.insert(idx.clone(), (from_x, from_y));
        data.insert(
            idx,
            (
                ids.into_iter().map(|(id, _, _)| id).collect::<Vec<_>>(),
                Vec::new(),
                Vec::new(),
            ),
        );
    }
    for idx in x.indices() {
        let count = data[&idx].0.len();
        let mut faces = Vec::new();
        let mut degens = Vec::new();
        for axis in 0..x.arity() {
            let mut face_tables = Vec::new();
            if idx[axis] > 0 {
                let mut lowered = idx.clone();
                lowered[axis] -= 1;
                for i in 0..=idx[axis] {
                    let mut table = vec![0usize; count];
                    for (c, &pos) in placements[&idx].0.iter().enumerate() {
                        table[pos] = placements[&lowered].0[x.face(&idx, axis, i, c)];
                    }
                    for (c, &pos) in placements[&idx].1.iter().enumerate() {
                        table[pos] = placements[&lowered].1[y.face(&idx, axis, i, c)];
                    }
                    face_tables.push(table);
                }
            }
            faces.push(face_tables);
            let mut degen_tables = Vec::new();
            if idx[axis] < x.dim_bounds[axis] {
                let mut raised = idx.clone();
                raised[axis] += 1;
                for i in 0..=idx[axis] {
                    let mut table = vec![0usize; count];
                    for (c, &pos) in placements[&idx].0.iter().enumerate() {
                        table[pos] = placements[&raised].0[x.degeneracy(&idx, axis, i, c)];
                    }
                    for (c, &pos) in placements[&idx].1.iter().enumerate() {
                        table[pos] = placements[&raised].1[y.degeneracy(&idx, axis, i, c)];
                    }
                    degen_tables.push(table);
                }
            }
            degens.push(degen_tables);
        }
        let entry = data.get_mut(&idx).unwrap();
        entry.1 = faces;
        entry.2 = degens;
    }
    MultiSSet::from_parts(x.dim_bounds.clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, nerve};
    use crate::sset::{constant_sset, standard_simplex};

    fn interval_square() -> MultiSSet {
        let edge = from_sset(&standard_simplex(1, 1));
        external_product(&edge, &edge)
    }

    #[test]
    fn product_of_intervals_has_the_right_counts() {
        let sq = interval_square();
        assert_eq!(sq.dim_bounds(), &[1, 1]);
        assert_eq!(sq.cell_count(&[0, 0]), 4);
        assert_eq!(sq.cell_count(&[1, 0]), 6);
        assert_eq!(sq.cell_count(&[0, 1]), 6);
        assert_eq!(sq.cell_count(&[1, 1]), 9);
        assert!(validate_multi(&sq).is_valid());
        let diag = total_diag(&sq).unwrap();
        assert_eq!(diag.cell_count(0), 4);
        assert_eq!(diag.cell_count(1), 9);
        assert!(crate::sset::validate_sset(&diag).is_valid());
    }

    #[test]
    fn one_axis_round_trip() {
        let x = standard_simplex(2, 2);
        let back = to_sset(&from_sset(&x)).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn diagonal_of_a_product_of_nerves_counts_pairs() {
        let n2 = nerve(cyclic_group(2).underlying(), 2).sset;
        let sq = external_product(&from_sset(&n2), &from_sset(&n2));
        assert!(validate_multi(&sq).is_valid());
        let diag = total_diag(&sq).unwrap();
        assert_eq!(diag.cell_count(0), 1);
        assert_eq!(diag.cell_count(1), 4);
        assert_eq!(diag.cell_count(2), 16);
        assert!(crate::sset::validate_sset(&diag).is_valid());
    }

    #[test]
    fn constant_levels_are_recognized() {
        let point = from_sset(&constant_sset(&["p".to_string()], 2));
        assert!(point.is_constant());
        let edge = from_sset(&standard_simplex(1, 1));
        assert!(!edge.is_constant());
    }

    #[test]
    fn outer_vertex_map_picks_an_endpoint() {
        let sq = interval_square();
        let v0 = MonotoneMap::vertex(1, 0);
        let map = outer_monotone_map(&sq, &v0).unwrap();
        let inner = vec![0usize];
        let c = map
            .source()
            .cell_index(&inner, &pair_id("0.1", "0"))
            .unwrap();
        let image = map.apply(&inner, c);
        assert_eq!(map.target().cell_id(&inner, image), pair_id("0", "0"));
    }

    fn square_collapse_fixture(broken: bool) -> MultiSSet {
        let mut b = MultiSSetBuilder::new(vec![1, 1]);
        for id in ["a", "b"] {
            b.cell(&[0, 0], id);
        }
        for id in ["u", "v"] {
            b.cell(&[1, 0], id);
        }
        for id in ["h", "ia", "ib"] {
            b.cell(&[0, 1], id);
        }
        for id in ["w", "wa", "wb"] {
            b.cell(&[1, 1], id);
        }
        for (cell, d0, d1) in [("u", "a", "a"), ("v", "b", "b")] {
            b.face(&[1, 0], 0, 0, cell, d0).face(&[1, 0], 0, 1, cell, d1);
        }
        for (cell, d0, d1) in [("h", "b", "a"), ("ia", "a", "a"), ("ib", "b", "b")] {
            b.face(&[0, 1], 1, 0, cell, d0).face(&[0, 1], 1, 1, cell, d1);
        }
        for (cell, to) in [("w", "h"), ("wa", "ia"), ("wb", "ib")] {
            b.face(&[1, 1], 0, 0, cell, to).face(&[1, 1], 0, 1, cell, to);
        }
        let w_d1 = if broken { "v" } else { "u" };
        b.face(&[1, 1], 1, 0, "w", "v").face(&[1, 1], 1, 1, "w", w_d1);
        for (cell, to) in [("wa", "u"), ("wb", "v")] {
            b.face(&[1, 1], 1, 0, cell, to).face(&[1, 1], 1, 1, cell, to);
        }
        for (cell, to) in [("a", "u"), ("b", "v")] {
            b.degeneracy(&[0, 0], 0, 0, cell, to);
        }
        for (cell, to) in [("a", "ia"), ("b", "ib")] {
            b.degeneracy(&[0, 0], 1, 0, cell, to);
        }
        for (cell, to) in [("h", "w"), ("ia", "wa"), ("ib", "wb")] {
            b.degeneracy(&[0, 1], 0, 0, cell, to);
        }
        for (cell, to) in [("u", "wa"), ("v", "wb")] {
            b.degeneracy(&[1, 0], 1, 0, cell, to);
        }
        b.build().unwrap()
    }

    #[test]
    fn collapsing_a_valid_square_gives_one_class_per_level() {
        let x = square_collapse_fixture(false);
        assert!(validate_multi(&x).is_valid());
        let collapsed = pi0_axis(&x, 1).unwrap();
        assert_eq!(collapsed.arity(), 1);
        assert_eq!(collapsed.cells(&[0]), ["a".to_string()]);
        assert_eq!(collapsed.cells(&[1]), ["u".to_string()]);
    }

    #[test]
    fn collapsing_an_inconsistent_square_reports_the_split() {
        let x = square_collapse_fixture(true);
        assert!(!validate_multi(&x).is_valid());
        match pi0_axis(&x, 1) {
            Err(Error::NotWellDefined { detail }) => {
                assert!(detail.contains("s0"), "unexpected witness: {detail}");
                assert!(detail.contains("`a`"), "unexpected witness: {detail}");
            }
            other => panic!("expected a well-definedness failure, got {other:?}"),
        }
    }

    #[test]
    fn collapsing_the_inner_axis_of_a_nerve_product_leaves_the_outer_nerve() {
        let n2 = nerve(cyclic_group(2).underlying(), 2).sset;
        let sq = external_product(&from_sset(&n2), &from_sset(&n2));
        let t = collapse_inner(&sq).unwrap();
        assert_eq!(t.arity(), 1);
        for k in 0..=2 {
            assert_eq!(t.cell_count(&[k]), n2.cell_count(k));
        }
        assert!(crate::sset::validate_sset(&to_sset(&t).unwrap()).is_valid());
    }

    #[test]
    fn fiber_product_over_a_point_is_the_product_and_commutes_with_diag() {
        let sq = interval_square();
        let point = {
            let pt = from_sset(&constant_sset(&["pt".to_string()], 1));
            external_product(&pt, &pt)
        };
        let f = MultiMap::from_fn(&sq, &point, |_, _| pair_id("pt", "pt")).unwrap();
        let fp = multi_fiber_product(&f, &f).unwrap();
        assert_eq!(fp.object.cell_count(&[0, 0]), 16);
        assert_eq!(fp.object.cell_count(&[1, 1]), 81);
        let left = total_diag(&fp.object).unwrap();
        let df = total_diag_map(&f).unwrap();
        let right = crate::sset::fiber_product(&df, &df).unwrap().object;
        assert_eq!(left, right);
    }

    #[test]
    fn disjoint_union_components_are_counted_separately() {
        let sq = interval_square();
        let both = disjoint_union_multi(&sq, &sq, "l", "r").unwrap();
        assert!(validate_multi(&both).is_valid());
        let reps = component_representatives(&both).unwrap();
        assert_eq!(reps.len(), 2);
        let diag_classes = diagonal_components(&both).unwrap();
        assert_eq!(diag_classes.len(), 2);
    }
}
