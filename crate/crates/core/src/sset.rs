//! Dimension-bounded simplicial sets as explicit tables.
//!
//! A `SimplicialSet` stores every cell up to its dimension bound, degenerate
//! cells included, together with total face and degeneracy tables. Nothing
//! above the bound exists: operations that would need a higher level return
//! an error instead of inventing fillers. Cells are string identifiers,
//! unique within their level and kept sorted, so all iteration and all
//! derived constructions are deterministic.

use crate::groupoid::{FinGroupoid, FinGroupoidBuilder};
use crate::monotone::{generator_steps, GeneratorStep, MonotoneMap};
use crate::report::{Report, ValidationReport};
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    cells: Vec<String>,
    index: BTreeMap<String, usize>,
    /// faces[i][c] is the index of d_i of cell c one level down; empty at level 0.
    faces: Vec<Vec<usize>>,
    /// degens[i][c] is the index of s_i of cell c one level up; empty at the bound.
    degens: Vec<Vec<usize>>,
}

impl Level {
    fn new(cells: Vec<String>) -> Self {
        let index = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Level {
            cells,
            index,
            faces: Vec::new(),
            degens: Vec::new(),
        }
    }
}

/// A finite simplicial set truncated at `dim_bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialSet {
    dim_bound: usize,
    levels: Vec<Level>,
}

impl SimplicialSet {
    pub fn dim_bound(&self) -> usize {
        self.dim_bound
    }

    pub fn cells(&self, level: usize) -> &[String] {
        &self.levels[level].cells
    }

    pub fn cell_count(&self, level: usize) -> usize {
        self.levels[level].cells.len()
    }

    pub fn cell_id(&self, level: usize, cell: usize) -> &str {
        &self.levels[level].cells[cell]
    }

    pub fn cell_index(&self, level: usize, id: &str) -> Option<usize> {
        self.levels[level].index.get(id).copied()
    }

    /// Index of d_i applied to `cell` at `level` (so the result lives one
    /// level down).
    pub fn face(&self, level: usize, i: usize, cell: usize) -> usize {
        self.levels[level].faces[i][cell]
    }

    /// Index of s_i applied to `cell` at `level` (one level up).
    pub fn degeneracy(&self, level: usize, i: usize, cell: usize) -> usize {
        self.levels[level].degens[i][cell]
    }

    /// Flags the cells of `level` that are images of some degeneracy map.
    pub fn degenerate_flags(&self, level: usize) -> Vec<bool> {
        let mut flags = vec![false; self.cell_count(level)];
        if level >= 1 {
            let below = &self.levels[level - 1];
            for table in &below.degens {
                for &t in table {
                    flags[t] = true;
                }
            }
        }
        flags
    }

    /// Applies an arbitrary monotone map contravariantly, by factoring it
    /// into faces and degeneracies.
    pub fn apply_monotone(&self, f: &MonotoneMap, cell: usize) -> Result<usize> {
        if f.target_rank() > self.dim_bound || f.source_rank() > self.dim_bound {
            return Err(Error::LevelOutOfBound {
                level: f.target_rank().max(f.source_rank()),
                bound: self.dim_bound,
            });
        }
        let mut c = cell;
        for step in generator_steps(f) {
            c = match step {
                GeneratorStep::Face { level, i } => self.face(level, i, c),
                GeneratorStep::Degeneracy { level, i } => self.degeneracy(level, i, c),
            };
        }
        Ok(c)
    }

    /// The 0-th vertex of a cell, reached by dropping the top vertex until
    /// level 0.
    pub fn vertex_zero(&self, level: usize, cell: usize) -> usize {
        let mut c = cell;
        for l in (1..=level).rev() {
            c = self.face(l, l, c);
        }
        c
    }

    /// Internal constructor from already-indexed tables. Checks shapes and
    /// ranges but trusts the caller on identifier uniqueness per level.
    pub(crate) fn from_parts(
        dim_bound: usize,
        cells: Vec<Vec<String>>,
        faces: Vec<Vec<Vec<usize>>>,
        degens: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if cells.len() != dim_bound + 1 {
            return Err(Error::BadStructure {
                detail: format!("expected {} levels, got {}", dim_bound + 1, cells.len()),
            });
        }
        let mut levels: Vec<Level> = cells.into_iter().map(Level::new).collect();
        for (k, level_faces) in faces.into_iter().enumerate() {
            if k == 0 {
                continue;
            }
            if level_faces.len() != k + 1 {
                return Err(Error::BadStructure {
                    detail: format!("level {k} needs {} face tables", k + 1),
                });
            }
            for table in &level_faces {
                if table.len() != levels[k].cells.len()
                    || table.iter().any(|&t| t >= levels[k - 1].cells.len())
                {
                    return Err(Error::BadStructure {
                        detail: format!("face table at level {k} has the wrong shape"),
                    });
                }
            }
            levels[k].faces = level_faces;
        }
        for (k, level_degens) in degens.into_iter().enumerate() {
            if k >= dim_bound {
                continue;
            }
            if level_degens.len() != k + 1 {
                return Err(Error::BadStructure {
                    detail: format!("level {k} needs {} degeneracy tables", k + 1),
                });
            }
            for table in &level_degens {
                if table.len() != levels[k].cells.len()
                    || table.iter().any(|&t| t >= levels[k + 1].cells.len())
                {
                    return Err(Error::BadStructure {
                        detail: format!("degeneracy table at level {k} has the wrong shape"),
                    });
                }
            }
            levels[k].degens = level_degens;
        }
        // Totality: every level above 0 needs faces, every level below the
        // bound needs degeneracies.
        for k in 1..=dim_bound {
            if levels[k].faces.len() != k + 1 && !levels[k].cells.is_empty() {
                return Err(Error::BadStructure {
                    detail: format!("missing face tables at level {k}"),
                });
            }
            if levels[k].faces.is_empty() {
                levels[k].faces = vec![Vec::new(); k + 1];
            }
        }
        for k in 0..dim_bound {
            if levels[k].degens.len() != k + 1 && !levels[k].cells.is_empty() {
                return Err(Error::BadStructure {
                    detail: format!("missing degeneracy tables at level {k}"),
                });
            }
            if levels[k].degens.is_empty() {
                levels[k].degens = vec![Vec::new(); k + 1];
            }
        }
        Ok(SimplicialSet { dim_bound, levels })
    }

    /// Keeps only the flagged cells, reindexing all tables. Errors if the
    /// kept cells are not closed under faces and degeneracies.
    pub(crate) fn restrict(&self, keep: &[Vec<bool>]) -> Result<SimplicialSet> {
        let mut new_index: Vec<Vec<Option<usize>>> = Vec::new();
        let mut cells: Vec<Vec<String>> = Vec::new();
        for k in 0..=self.dim_bound {
            let mut ids = Vec::new();
            let mut map = vec![None; self.cell_count(k)];
            for (c, flag) in keep[k].iter().enumerate() {
                if *flag {
                    map[c] = Some(ids.len());
                    ids.push(self.cell_id(k, c).to_string());
                }
            }
            new_index.push(map);
            cells.push(ids);
        }
        let closure_err = |lv: usize, c: usize| Error::BadStructure {
            detail: format!(
                "cell `{}` at level {lv} leaves the restricted set",
                self.cell_id(lv, c)
            ),
        };
        let mut faces = vec![Vec::new(); self.dim_bound + 1];
        let mut degens = vec![Vec::new(); self.dim_bound + 1];
        for k in 1..=self.dim_bound {
            let mut tables = vec![Vec::new(); k + 1];
            for (c, flag) in keep[k].iter().enumerate() {
                if !*flag {
                    continue;
                }
                for (i, table) in tables.iter_mut().enumerate() {
                    let t = self.face(k, i, c);
                    let t2 = new_index[k - 1][t].ok_or_else(|| closure_err(k, c))?;
                    table.push(t2);
                }
            }
            faces[k] = tables;
        }
        for k in 0..self.dim_bound {
            let mut tables = vec![Vec::new(); k + 1];
            for (c, flag) in keep[k].iter().enumerate() {
                if !*flag {
                    continue;
                }
                for (i, table) in tables.iter_mut().enumerate() {
                    let t = self.degeneracy(k, i, c);
                    let t2 = new_index[k + 1][t].ok_or_else(|| closure_err(k, c))?;
                    table.push(t2);
                }
            }
            degens[k] = tables;
        }
        SimplicialSet::from_parts(self.dim_bound, cells, faces, degens)
    }
}

// ---------------------------------------------------------------------------
// Builder

/// Assembles a simplicial set from named cells and maps. `build` fails on
/// structural holes (missing or dangling maps); it does not check the
/// simplicial identities, so deliberately broken fixtures can be built and
/// then fed to `validate_sset`.
#[derive(Debug, Default)]
pub struct SimplicialSetBuilder {
    dim_bound: usize,
    cells: Vec<Vec<String>>,
    faces: BTreeMap<(usize, usize, String), String>,
    degens: BTreeMap<(usize, usize, String), String>,
}

impl SimplicialSetBuilder {
    pub fn new(dim_bound: usize) -> Self {
        SimplicialSetBuilder {
            dim_bound,
            cells: vec![Vec::new(); dim_bound + 1],
            ..Default::default()
        }
    }

    pub fn cell(&mut self, level: usize, id: impl Into<String>) -> &mut Self {
        self.cells[level].push(id.into());
        self
    }

    pub fn face(
        &mut self,
        level: usize,
        i: usize,
        cell: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.faces.insert((level, i, cell.into()), to.into());
        self
    }

    pub fn degeneracy(
        &mut self,
        level: usize,
        i: usize,
        cell: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.degens.insert((level, i, cell.into()), to.into());
        self
    }

    pub fn build(&self) -> Result<SimplicialSet> {
        let mut cells = self.cells.clone();
        for (k, level) in cells.iter_mut().enumerate() {
            level.sort();
            if level.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BadStructure {
                    detail: format!("duplicate cell id at level {k}"),
                });
            }
        }
        let index: Vec<BTreeMap<&String, usize>> = cells
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, c)| (c, i)).collect())
            .collect();
        let lookup = |level: usize, id: &String| -> Result<usize> {
            index
                .get(level)
                .and_then(|m| m.get(id))
                .copied()
                .ok_or_else(|| Error::UnknownCell {
                    id: id.clone(),
                    place: format!("level {level}"),
                })
        };
        let mut faces = vec![Vec::new(); self.dim_bound + 1];
        for k in 1..=self.dim_bound {
            let mut tables = vec![vec![0usize; cells[k].len()]; k + 1];
            for (c, id) in cells[k].iter().enumerate() {
                for (i, table) in tables.iter_mut().enumerate() {
                    let to = self.faces.get(&(k, i, id.clone())).ok_or_else(|| {
                        Error::BadStructure {
                            detail: format!("cell `{id}` at level {k} has no face d{i}"),
                        }
                    })?;
                    table[c] = lookup(k - 1, to)?;
                }
            }
            faces[k] = tables;
        }
        let mut degens = vec![Vec::new(); self.dim_bound + 1];
        for k in 0..self.dim_bound {
            let mut tables = vec![vec![0usize; cells[k].len()]; k + 1];
            for (c, id) in cells[k].iter().enumerate() {
                for (i, table) in tables.iter_mut().enumerate() {
                    let to = self.degens.get(&(k, i, id.clone())).ok_or_else(|| {
                        Error::BadStructure {
                            detail: format!("cell `{id}` at level {k} has no degeneracy s{i}"),
                        }
                    })?;
                    table[c] = lookup(k + 1, to)?;
                }
            }
            degens[k] = tables;
        }
        SimplicialSet::from_parts(self.dim_bound, cells, faces, degens)
    }
}

// ---------------------------------------------------------------------------
// Validation

/// Checks the five simplicial identity families exhaustively and reports
/// every violation with the cell it happens at.
pub fn validate_sset(x: &SimplicialSet) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let d = x.dim_bound;
    // d_i d_j = d_{j-1} d_i for i < j
    for k in 2..=d {
        for j in 1..=k {
            for i in 0..j {
                for c in 0..x.cell_count(k) {
                    let left = x.face(k - 1, i, x.face(k, j, c));
                    let right = x.face(k - 1, j - 1, x.face(k, i, c));
                    if left != right {
                        rep.push(
                            format!("d{i} d{j} = d{} d{i}", j - 1),
                            format!("cell `{}` at level {k}", x.cell_id(k, c)),
                        );
                    }
                }
            }
        }
    }
    // s_i s_j = s_{j+1} s_i for i <= j
    for k in 0..d.saturating_sub(1) {
        for j in 0..=k {
            for i in 0..=j {
                for c in 0..x.cell_count(k) {
                    let left = x.degeneracy(k + 1, j + 1, x.degeneracy(k, i, c));
                    let right = x.degeneracy(k + 1, i, x.degeneracy(k, j, c));
                    if left != right {
                        rep.push(
                            format!("s{} s{i} = s{i} s{j}", j + 1),
                            format!("cell `{}` at level {k}", x.cell_id(k, c)),
                        );
                    }
                }
            }
        }
    }
    // Mixed identities, checked at the source of s_j: X_k -> X_{k+1}.
    for k in 0..d {
        for j in 0..=k {
            for i in 0..=k + 1 {
                for c in 0..x.cell_count(k) {
                    let sc = x.degeneracy(k, j, c);
                    let got = x.face(k + 1, i, sc);
                    if i == j || i == j + 1 {
                        if got != c {
                            rep.push(
                                format!("d{i} s{j} = id"),
                                format!("cell `{}` at level {k}", x.cell_id(k, c)),
                            );
                        }
                    } else if i < j {
                        if k == 0 {
                            continue;
                        }
                        let want = x.degeneracy(k - 1, j - 1, x.face(k, i, c));
                        if got != want {
                            rep.push(
                                format!("d{i} s{j} = s{} d{i}", j - 1),
                                format!("cell `{}` at level {k}", x.cell_id(k, c)),
                            );
                        }
                    } else {
                        // i > j + 1
                        if k == 0 {
                            continue;
                        }
                        let want = x.degeneracy(k - 1, j, x.face(k, i - 1, c));
                        if got != want {
                            rep.push(
                                format!("d{i} s{j} = s{j} d{}", i - 1),
                                format!("cell `{}` at level {k}", x.cell_id(k, c)),
                            );
                        }
                    }
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Standard constructions

/// The simplicial set with the given 0-cells and only degenerate cells above.
pub fn constant_sset(points: &[String], dim_bound: usize) -> SimplicialSet {
    let mut points = points.to_vec();
    points.sort();
    points.dedup();
    let n = points.len();
    let cells: Vec<Vec<String>> = (0..=dim_bound).map(|_| points.clone()).collect();
    let faces = (0..=dim_bound)
        .map(|k| {
            if k == 0 {
                Vec::new()
            } else {
                vec![(0..n).collect::<Vec<_>>(); k + 1]
            }
        })
        .collect();
    let degens = (0..=dim_bound)
        .map(|k| {
            if k == dim_bound {
                Vec::new()
            } else {
                vec![(0..n).collect::<Vec<_>>(); k + 1]
            }
        })
        .collect();
    SimplicialSet::from_parts(dim_bound, cells, faces, degens).expect("constant tables are total")
}

fn monotone_id(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

fn simplex_like(m: usize, dim_bound: usize, keep: impl Fn(&[usize]) -> bool) -> SimplicialSet {
    let mut level_values: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in 0..=dim_bound {
        let mut vals: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..=k {
            let mut next = Vec::new();
            for v in &vals {
                let lo = v.last().copied().unwrap_or(0);
                for x in lo..=m {
                    let mut w = v.clone();
                    w.push(x);
                    next.push(w);
                }
            }
            vals = next;
        }
        vals.retain(|v| keep(v));
        vals.sort_by_key(|v| monotone_id(v));
        level_values.push(vals);
    }
    let index: Vec<BTreeMap<String, usize>> = level_values
        .iter()
        .map(|vals| {
            vals.iter()
                .enumerate()
                .map(|(i, v)| (monotone_id(v), i))
                .collect()
        })
        .collect();
    let cells: Vec<Vec<String>> = level_values
        .iter()
        .map(|vals| vals.iter().map(|v| monotone_id(v)).collect())
        .collect();
    let mut faces = vec![Vec::new(); dim_bound + 1];
    for k in 1..=dim_bound {
        let mut tables = vec![Vec::new(); k + 1];
        for v in &level_values[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let mut w = v.clone();
                w.remove(i);
                table.push(index[k - 1][&monotone_id(&w)]);
            }
        }
        faces[k] = tables;
    }
    let mut degens = vec![Vec::new(); dim_bound + 1];
    for k in 0..dim_bound {
        let mut tables = vec![Vec::new(); k + 1];
        for v in &level_values[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let mut w = v.clone();
                w.insert(i, v[i]);
                table.push(index[k + 1][&monotone_id(&w)]);
            }
        }
        degens[k] = tables;
    }
    SimplicialSet::from_parts(dim_bound, cells, faces, degens).expect("simplex tables are total")
}

/// The standard m-simplex truncated at `dim_bound`; cells at level k are the
/// monotone maps [k] -> [m], named by their values.
pub fn standard_simplex(m: usize, dim_bound: usize) -> SimplicialSet {
    simplex_like(m, dim_bound, |_| true)
}

/// The boundary of the standard m-simplex: the cells whose vertex image is
/// a proper subset of [m].
pub fn boundary_simplex(m: usize, dim_bound: usize) -> SimplicialSet {
    simplex_like(m, dim_bound, |v| {
        let image: std::collections::BTreeSet<usize> = v.iter().copied().collect();
        image.len() < m + 1
    })
}

/// Semi-simplicial input for `free_simplicial_set`: nondegenerate cells with
/// faces landing on nondegenerate cells.
#[derive(Debug, Default, Clone)]
pub struct SemiSimplicialData {
    pub cells: Vec<Vec<String>>,
    /// (level, i, cell) -> face cell one level down.
    pub faces: BTreeMap<(usize, usize, String), String>,
}

impl SemiSimplicialData {
    pub fn new(top_level: usize) -> Self {
        SemiSimplicialData {
            cells: vec![Vec::new(); top_level + 1],
            faces: BTreeMap::new(),
        }
    }

    pub fn cell(&mut self, level: usize, id: impl Into<String>) -> &mut Self {
        self.cells[level].push(id.into());
        self
    }

    pub fn face(
        &mut self,
        level: usize,
        i: usize,
        cell: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.faces.insert((level, i, cell.into()), to.into());
        self
    }
}

/// Freely adds all degeneracies to semi-simplicial data up to `dim_bound`.
/// Cells of the result are pairs of a base cell and a surjection, written
/// `values~base`; base cells keep their plain names.
pub fn free_simplicial_set(data: &SemiSimplicialData, dim_bound: usize) -> Result<SimplicialSet> {
    // A cell at level k is (surjection values [k] ->> [j], base cell at level j).
    fn surjections(k: usize, j: usize) -> Vec<Vec<usize>> {
        // Monotone surjections [k] ->> [j].
        let mut out = vec![vec![0usize]];
        for _ in 1..=k {
            let mut next = Vec::new();
            for v in &out {
                let last = *v.last().unwrap();
                for x in [last, last + 1] {
                    if x <= j {
                        let mut w = v.clone();
                        w.push(x);
                        next.push(w);
                    }
                }
            }
            out = next;
        }
        out.retain(|v| *v.last().unwrap() == j);
        out
    }

    let top = data.cells.len() - 1;
    let base_index: Vec<BTreeMap<String, usize>> = data
        .cells
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort();
            l.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()
        })
        .collect();
    let base_cells: Vec<Vec<String>> = base_index
        .iter()
        .map(|m| m.keys().cloned().collect())
        .collect();
    let base_face = |level: usize, i: usize, cell: &str| -> Result<String> {
        data.faces
            .get(&(level, i, cell.to_string()))
            .cloned()
            .ok_or_else(|| Error::BadStructure {
                detail: format!("cell `{cell}` at level {level} has no face d{i}"),
            })
    };
    // Apply an injective monotone map to a base cell through declared faces.
    let apply_injective = |f: &MonotoneMap, cell: &str| -> Result<String> {
        let mut c = cell.to_string();
        let mut values = f.values().to_vec();
        let mut level = f.target_rank();
        loop {
            let image: std::collections::BTreeSet<usize> = values.iter().copied().collect();
            match (0..=level).rev().find(|j| !image.contains(j)) {
                Some(j) => {
                    c = base_face(level, j, &c)?;
                    for v in values.iter_mut() {
                        if *v > j {
                            *v -= 1;
                        }
                    }
                    level -= 1;
                }
                None => return Ok(c),
            }
        }
    };

    let name = |sigma: &[usize], base: &str| -> String {
        if sigma.len() == sigma.last().unwrap() + 1 {
            base.to_string()
        } else {
            format!("{}~{}", monotone_id(sigma), base)
        }
    };

    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut table_index: Vec<BTreeMap<String, usize>> = Vec::new();
    let mut members: Vec<Vec<(Vec<usize>, String)>> = Vec::new();
    for k in 0..=dim_bound {
        let mut level_members = Vec::new();
        for j in 0..=k.min(top) {
            for base in &base_cells[j] {
                for sigma in surjections(k, j) {
                    level_members.push((sigma, base.clone()));
                }
            }
        }
        level_members.sort_by_key(|(s, b)| name(s, b));
        let ids: Vec<String> = level_members.iter().map(|(s, b)| name(s, b)).collect();
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        cells.push(ids);
        table_index.push(index);
        members.push(level_members);
    }

    // A structure map precomposes the surjection and refactors.
    let act = |k: usize,
               pre: &MonotoneMap,
               sigma: &[usize],
               base: &str,
               table_index: &Vec<BTreeMap<String, usize>>|
     -> Result<usize> {
        let s = MonotoneMap::new(*sigma.last().unwrap(), sigma.to_vec())?;
        let composite = crate::monotone::compose_monotone(pre, &s)?;
        // Epi-mono factor the composite: injective part acts on the base.
        let mut values = composite.values().to_vec();
        let mut rank = composite.target_rank();
        let mut drops = Vec::new();
        loop {
            let image: std::collections::BTreeSet<usize> = values.iter().copied().collect();
            match (0..=rank).rev().find(|j| !image.contains(j)) {
                Some(j) => {
                    drops.push(j);
                    for v in values.iter_mut() {
                        if *v > j {
                            *v -= 1;
                        }
                    }
                    rank -= 1;
                }
                None => break,
            }
        }
        // Rebuild the injective part [rank] -> [original rank].
        let mut inj_values: Vec<usize> = (0..=composite.target_rank()).collect();
        for &j in &drops {
            inj_values.remove(j);
        }
        let inj = MonotoneMap::new(composite.target_rank(), inj_values)?;
        let new_base = apply_injective(&inj, base)?;
        let id = name(&values, &new_base);
        table_index[k]
            .get(&id)
            .copied()
            .ok_or_else(|| Error::UnknownCell {
                id,
                place: format!("level {k}"),
            })
    };

    let mut faces = vec![Vec::new(); dim_bound + 1];
    for k in 1..=dim_bound {
        let mut tables = vec![Vec::new(); k + 1];
        for (sigma, base) in &members[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let pre = MonotoneMap::coface(k, i);
                table.push(act(k - 1, &pre, sigma, base, &table_index)?);
            }
        }
        faces[k] = tables;
    }
    let mut degens = vec![Vec::new(); dim_bound + 1];
    for k in 0..dim_bound {
        let mut tables = vec![Vec::new(); k + 1];
        for (sigma, base) in &members[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let pre = MonotoneMap::codegeneracy(k, i);
                table.push(act(k + 1, &pre, sigma, base, &table_index)?);
            }
        }
        degens[k] = tables;
    }
    SimplicialSet::from_parts(dim_bound, cells, faces, degens)
}

/// Disjoint union, with every identifier prefixed by its side's tag.
pub fn disjoint_union(
    x: &SimplicialSet,
    y: &SimplicialSet,
    tag_x: &str,
    tag_y: &str,
) -> Result<SimplicialSet> {
    if x.dim_bound != y.dim_bound {
        return Err(Error::BoundsMismatch);
    }
    let d = x.dim_bound;
    let mut cells = Vec::new();
    let mut faces = vec![Vec::new(); d + 1];
    let mut degens = vec![Vec::new(); d + 1];
    // Tagged ids per level, sorted; remember where each side's cells went.
    let mut maps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for k in 0..=d {
        let mut ids: Vec<(String, bool, usize)> = Vec::new();
        for (c, id) in x.cells(k).iter().enumerate() {
            ids.push((format!("{tag_x}:{id}"), false, c));
        }
        for (c, id) in y.cells(k).iter().enumerate() {
            ids.push((format!("{tag_y}:{id}"), true, c));
        }
        ids.sort();
        let mut from_x = vec![0usize; x.cell_count(k)];
        let mut from_y = vec![0usize; y.cell_count(k)];
        for (pos, (_, is_y, c)) in ids.iter().enumerate() {
            if *is_y {
                from_y[*c] = pos;
            } else {
                from_x[*c] = pos;
            }
        }
        maps.push((from_x, from_y));
        cells.push(ids.into_iter().map(|(id, _, _)| id).collect::<Vec<_>>());
    }
    for k in 1..=d {
        let mut tables = vec![vec![0usize; cells[k].len()]; k + 1];
        for (c, &pos) in maps[k].0.iter().enumerate() {
            for (i, table) in tables.iter_mut().enumerate() {
                table[pos] = maps[k - 1].0[x.face(k, i, c)];
            }
        }
        for (c, &pos) in maps[k].1.iter().enumerate() {
            for (i, table) in tables.iter_mut().enumerate() {
                table[pos] = maps[k - 1].1[y.face(k, i, c)];
            }
        }
        faces[k] = tables;
    }
    for k in 0..d {
        let mut tables = vec![vec![0usize; cells[k].len()]; k + 1];
        for (c, &pos) in maps[k].0.iter().enumerate() {
            for (i, table) in tables.iter_mut().enumerate() {
                table[pos] = maps[k + 1].0[x.degeneracy(k, i, c)];
            }
        }
        for (c, &pos) in maps[k].1.iter().enumerate() {
            for (i, table) in tables.iter_mut().enumerate() {
                table[pos] = maps[k + 1].1[y.degeneracy(k, i, c)];
            }
        }
        degens[k] = tables;
    }
    SimplicialSet::from_parts(d, cells, faces, degens)
}

// ---------------------------------------------------------------------------
// Maps

/// A levelwise map of simplicial sets commuting with all structure maps.
/// Construction validates commutation, so a held `SSetMap` is always a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSetMap {
    source: SimplicialSet,
    target: SimplicialSet,
    levels: Vec<Vec<usize>>,
}

impl SSetMap {
    pub fn from_tables(
        source: SimplicialSet,
        target: SimplicialSet,
        levels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if source.dim_bound != target.dim_bound {
            return Err(Error::BoundsMismatch);
        }
        let d = source.dim_bound;
        if levels.len() != d + 1 {
            return Err(Error::BadStructure {
                detail: "map needs one table per level".into(),
            });
        }
        for k in 0..=d {
            if levels[k].len() != source.cell_count(k)
                || levels[k].iter().any(|&t| t >= target.cell_count(k))
            {
                return Err(Error::BadStructure {
                    detail: format!("map table at level {k} has the wrong shape"),
                });
            }
        }
        for k in 1..=d {
            for i in 0..=k {
                for c in 0..source.cell_count(k) {
                    if target.face(k, i, levels[k][c]) != levels[k - 1][source.face(k, i, c)] {
                        return Err(Error::BadStructure {
                            detail: format!(
                                "map does not commute with d{i} at level {k} on `{}`",
                                source.cell_id(k, c)
                            ),
                        });
                    }
                }
            }
        }
        for k in 0..d {
            for i in 0..=k {
                for c in 0..source.cell_count(k) {
                    if target.degeneracy(k, i, levels[k][c])
                        != levels[k + 1][source.degeneracy(k, i, c)]
                    {
                        return Err(Error::BadStructure {
                            detail: format!(
                                "map does not commute with s{i} at level {k} on `{}`",
                                source.cell_id(k, c)
                            ),
                        });
                    }
                }
            }
        }
        Ok(SSetMap {
            source,
            target,
            levels,
        })
    }

    /// Builds a map by naming the image of every cell.
    pub fn from_fn(
        source: &SimplicialSet,
        target: &SimplicialSet,
        assign: impl Fn(usize, &str) -> String,
    ) -> Result<Self> {
        let mut levels = Vec::new();
        for k in 0..=source.dim_bound {
            let mut table = Vec::new();
            for id in source.cells(k) {
                let to = assign(k, id);
                let t = target
                    .cell_index(k, &to)
                    .ok_or_else(|| Error::UnknownCell {
                        id: to,
                        place: format!("target level {k}"),
                    })?;
                table.push(t);
            }
            levels.push(table);
        }
        SSetMap::from_tables(source.clone(), target.clone(), levels)
    }

    pub fn identity(x: &SimplicialSet) -> Self {
        let levels = (0..=x.dim_bound)
            .map(|k| (0..x.cell_count(k)).collect())
            .collect();
        SSetMap {
            source: x.clone(),
            target: x.clone(),
            levels,
        }
    }

    pub fn source(&self) -> &SimplicialSet {
        &self.source
    }

    pub fn target(&self) -> &SimplicialSet {
        &self.target
    }

    pub fn apply(&self, level: usize, cell: usize) -> usize {
        self.levels[level][cell]
    }

    pub fn then(&self, other: &SSetMap) -> Result<SSetMap> {
        if self.target != other.source {
            return Err(Error::TargetMismatch);
        }
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, t)| t.iter().map(|&c| other.levels[k][c]).collect())
            .collect();
        Ok(SSetMap {
            source: self.source.clone(),
            target: other.target.clone(),
            levels,
        })
    }

    pub fn is_levelwise_bijection(&self) -> bool {
        (0..=self.source.dim_bound).all(|k| {
            if self.source.cell_count(k) != self.target.cell_count(k) {
                return false;
            }
            let mut seen = vec![false; self.target.cell_count(k)];
            self.levels[k].iter().all(|&t| !std::mem::replace(&mut seen[t], true))
        })
    }
}

/// Exhaustively enumerates all simplicial maps from `source` to `target`.
/// Only sensible for small instances; used to verify universal properties.
pub fn all_sset_maps(source: &SimplicialSet, target: &SimplicialSet) -> Vec<SSetMap> {
    if source.dim_bound != target.dim_bound {
        return Vec::new();
    }
    let d = source.dim_bound;
    let mut out = Vec::new();
    // Depth-first over cells in (level, index) order, checking every
    // structure map whose source and target images are both assigned.
    let order: Vec<(usize, usize)> = (0..=d)
        .flat_map(|k| (0..source.cell_count(k)).map(move |c| (k, c)))
        .collect();
    let mut assign: Vec<Vec<Option<usize>>> = (0..=d)
        .map(|k| vec![None; source.cell_count(k)])
        .collect();

    fn consistent(
        source: &SimplicialSet,
        target: &SimplicialSet,
        assign: &[Vec<Option<usize>>],
        level: usize,
        cell: usize,
    ) -> bool {
        let image = assign[level][cell].unwrap();
        if level >= 1 {
            for i in 0..=level {
                if let Some(fi) = assign[level - 1][source.face(level, i, cell)] {
                    if target.face(level, i, image) != fi {
                        return false;
                    }
                }
            }
        }
        if level < source.dim_bound() {
            for i in 0..=level {
                if let Some(si) = assign[level + 1][source.degeneracy(level, i, cell)] {
                    if target.degeneracy(level, i, image) != si {
                        return false;
                    }
                }
            }
        }
        // Maps from lower cells into this one.
        if level >= 1 {
            for i in 0..=level - 1 {
                for c in 0..source.cell_count(level - 1) {
                    if source.degeneracy(level - 1, i, c) == cell {
                        if let Some(ci) = assign[level - 1][c] {
                            if target.degeneracy(level - 1, i, ci) != image {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        if level < source.dim_bound() {
            for i in 0..=level + 1 {
                for c in 0..source.cell_count(level + 1) {
                    if source.face(level + 1, i, c) == cell {
                        if let Some(ci) = assign[level + 1][c] {
                            if target.face(level + 1, i, ci) != image {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn dfs(
        source: &SimplicialSet,
        target: &SimplicialSet,
        order: &[(usize, usize)],
        pos: usize,
        assign: &mut Vec<Vec<Option<usize>>>,
        out: &mut Vec<SSetMap>,
    ) {
        if pos == order.len() {
            let levels: Vec<Vec<usize>> = assign
                .iter()
                .map(|l| l.iter().map(|o| o.unwrap()).collect())
                .collect();
            if let Ok(m) = SSetMap::from_tables(source.clone(), target.clone(), levels) {
                out.push(m);
            }
            return;
        }
        let (k, c) = order[pos];
        for t in 0..target.cell_count(k) {
            assign[k][c] = Some(t);
            if consistent(source, target, assign, k, c) {
                dfs(source, target, order, pos + 1, assign, out);
            }
            assign[k][c] = None;
        }
    }

    dfs(source, target, &order, 0, &mut assign, &mut out);
    out
}

// ---------------------------------------------------------------------------
// pi0

/// A partition of the 0-cells with canonical representatives: each class is
/// sorted and classes are ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<String>>,
    class_of: BTreeMap<String, usize>,
}

impl Partition {
    pub(crate) fn from_groups(mut groups: Vec<Vec<String>>) -> Self {
        for g in groups.iter_mut() {
            g.sort();
        }
        groups.sort();
        let class_of = groups
            .iter()
            .enumerate()
            .flat_map(|(i, g)| g.iter().map(move |m| (m.clone(), i)))
            .collect();
        Partition {
            classes: groups,
            class_of,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<String>] {
        &self.classes
    }

    pub fn representative(&self, class: usize) -> &str {
        &self.classes[class][0]
    }

    pub fn representatives(&self) -> Vec<String> {
        self.classes.iter().map(|c| c[0].clone()).collect()
    }

    pub fn class_of(&self, id: &str) -> Option<usize> {
        self.class_of.get(id).copied()
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Path components: the coequalizer of d_0, d_1 on 0-cells.
pub fn pi0(x: &SimplicialSet) -> Result<Partition> {
    if x.dim_bound < 1 {
        return Err(Error::NeedsLevel {
            needed: 1,
            bound: x.dim_bound,
        });
    }
    let mut uf = UnionFind::new(x.cell_count(0));
    for e in 0..x.cell_count(1) {
        uf.union(x.face(1, 0, e), x.face(1, 1, e));
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for c in 0..x.cell_count(0) {
        let root = uf.find(c);
        groups.entry(root).or_default().push(x.cell_id(0, c).to_string());
    }
    Ok(Partition::from_groups(groups.into_values().collect()))
}

// ---------------------------------------------------------------------------
// Fiber products

pub struct FiberProduct {
    pub object: SimplicialSet,
    pub pr1: SSetMap,
    pub pr2: SSetMap,
}

pub(crate) fn pair_id(a: &str, b: &str) -> String {
    format!("({a}|{b})")
}

/// Levelwise pullback of `f` and `g` over their shared target. Cells are
/// the matching pairs `(x|y)` and structure maps act componentwise.
pub fn fiber_product(f: &SSetMap, g: &SSetMap) -> Result<FiberProduct> {
    if f.target() != g.target() {
        return Err(Error::TargetMismatch);
    }
    let x = f.source();
    let y = g.source();
    let d = x.dim_bound();
    // Pairs per level, found by bucketing the right side on its image.
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut index: Vec<BTreeMap<(usize, usize), usize>> = Vec::new();
    let mut cells: Vec<Vec<String>> = Vec::new();
    for k in 0..=d {
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for yc in 0..y.cell_count(k) {
            buckets.entry(g.apply(k, yc)).or_default().push(yc);
        }
        let mut level_pairs = Vec::new();
        for xc in 0..x.cell_count(k) {
            if let Some(ys) = buckets.get(&f.apply(k, xc)) {
                for &yc in ys {
                    level_pairs.push((xc, yc));
                }
            }
        }
        let mut named: Vec<(String, (usize, usize))> = level_pairs
            .into_iter()
            .map(|(a, b)| (pair_id(x.cell_id(k, a), y.cell_id(k, b)), (a, b)))
            .collect();
        named.sort();
        let idx = named
            .iter()
            .enumerate()
            .map(|(i, (_, p))| (*p, i))
            .collect::<BTreeMap<_, _>>();
        pairs.push(named.iter().map(|(_, p)| *p).collect());
        cells.push(named.into_iter().map(|(id, _)| id).collect());
        index.push(idx);
    }
    let mut faces = vec![Vec::new(); d + 1];
    for k in 1..=d {
        let mut tables = vec![Vec::new(); k + 1];
        for &(a, b) in &pairs[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let t = (x.face(k, i, a), y.face(k, i, b));
                table.push(index[k - 1][&t]);
            }
        }
        faces[k] = tables;
    }
    let mut degens = vec![Vec::new(); d + 1];
    for k in 0..d {
        let mut tables = vec![Vec::new(); k + 1];
        for &(a, b) in &pairs[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let t = (x.degeneracy(k, i, a), y.degeneracy(k, i, b));
                table.push(index[k + 1][&t]);
            }
        }
        degens[k] = tables;
    }
    let object = SimplicialSet::from_parts(d, cells, faces, degens)?;
    let pr1_levels = pairs.iter().map(|l| l.iter().map(|&(a, _)| a).collect()).collect();
    let pr2_levels = pairs.iter().map(|l| l.iter().map(|&(_, b)| b).collect()).collect();
    let pr1 = SSetMap::from_tables(object.clone(), x.clone(), pr1_levels)?;
    let pr2 = SSetMap::from_tables(object.clone(), y.clone(), pr2_levels)?;
    Ok(FiberProduct { object, pr1, pr2 })
}

// ---------------------------------------------------------------------------
// Segal maps

/// The spine comparison map at level m: every m-cell is sent to its tuple
/// of spine edges inside the set of composable edge tuples.
#[derive(Debug, Clone)]
pub struct SegalMap {
    level: usize,
    source_ids: Vec<String>,
    tuple_ids: Vec<String>,
    tuple_components: Vec<Vec<usize>>,
    map: Vec<usize>,
}

impl SegalMap {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }

    pub fn tuple_ids(&self) -> &[String] {
        &self.tuple_ids
    }

    /// Components of each tuple as indices into the 1-cells.
    pub fn tuple_components(&self) -> &[Vec<usize>] {
        &self.tuple_components
    }

    pub fn image_of(&self, cell: usize) -> usize {
        self.map[cell]
    }

    pub fn non_injective_witness(&self) -> Option<(String, String)> {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (c, &t) in self.map.iter().enumerate() {
            if let Some(&prev) = seen.get(&t) {
                return Some((
                    self.source_ids[prev].clone(),
                    self.source_ids[c].clone(),
                ));
            }
            seen.insert(t, c);
        }
        None
    }

    pub fn non_surjective_witness(&self) -> Option<String> {
        let mut hit = vec![false; self.tuple_ids.len()];
        for &t in &self.map {
            hit[t] = true;
        }
        hit.iter()
            .position(|h| !h)
            .map(|t| self.tuple_ids[t].clone())
    }

    pub fn is_injective(&self) -> bool {
        self.non_injective_witness().is_none()
    }

    pub fn is_surjective(&self) -> bool {
        self.non_surjective_witness().is_none()
    }

    pub fn is_bijection(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// For a bijection, the inverse table from tuples to m-cells.
    pub fn inverse(&self) -> Option<Vec<usize>> {
        if !self.is_bijection() {
            return None;
        }
        let mut inv = vec![0usize; self.tuple_ids.len()];
        for (c, &t) in self.map.iter().enumerate() {
            inv[t] = c;
        }
        Some(inv)
    }
}

/// Nested pair identifier of a composable edge tuple, matching the ids the
/// iterated fiber product would assign.
pub(crate) fn tuple_id(x: &SimplicialSet, components: &[usize]) -> String {
    let mut id = x.cell_id(1, components[0]).to_string();
    for &e in &components[1..] {
        id = pair_id(&id, x.cell_id(1, e));
    }
    id
}

/// Builds the Segal comparison at level m. Level 1 is the identity on
/// 1-cells by convention; levels above the dimension bound are an error.
pub fn segal_map(x: &SimplicialSet, m: usize) -> Result<SegalMap> {
    if m < 1 {
        return Err(Error::BadStructure {
            detail: "segal level must be at least 1".into(),
        });
    }
    if m > x.dim_bound() {
        return Err(Error::LevelOutOfBound {
            level: m,
            bound: x.dim_bound(),
        });
    }
    // Composable tuples (e_1, ..., e_m) with d0(e_j) = d1(e_{j+1}).
    let mut tuples: Vec<Vec<usize>> = (0..x.cell_count(1)).map(|e| vec![e]).collect();
    for _ in 1..m {
        let mut next = Vec::new();
        let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in 0..x.cell_count(1) {
            by_source.entry(x.face(1, 1, e)).or_default().push(e);
        }
        for t in tuples {
            let end = x.face(1, 0, *t.last().unwrap());
            if let Some(es) = by_source.get(&end) {
                for &e in es {
                    let mut t2 = t.clone();
                    t2.push(e);
                    next.push(t2);
                }
            }
        }
        tuples = next;
    }
    let mut named: Vec<(String, Vec<usize>)> = tuples
        .into_iter()
        .map(|t| (tuple_id(x, &t), t))
        .collect();
    named.sort();
    let index: BTreeMap<String, usize> = named
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.clone(), i))
        .collect();
    let tuple_ids: Vec<String> = named.iter().map(|(id, _)| id.clone()).collect();
    let tuple_components: Vec<Vec<usize>> = named.into_iter().map(|(_, t)| t).collect();

    let mut map = Vec::with_capacity(x.cell_count(m));
    for c in 0..x.cell_count(m) {
        let mut components = Vec::with_capacity(m);
        for j in 0..m {
            components.push(x.apply_monotone(&MonotoneMap::spine_edge(m, j), c)?);
        }
        let id = tuple_id(x, &components);
        let t = index.get(&id).copied().ok_or_else(|| Error::NotWellDefined {
            detail: format!(
                "spine of `{}` at level {m} is not composable",
                x.cell_id(m, c)
            ),
        })?;
        map.push(t);
    }
    Ok(SegalMap {
        level: m,
        source_ids: x.cells(m).to_vec(),
        tuple_ids,
        tuple_components,
        map,
    })
}

// ---------------------------------------------------------------------------
// Nerve recognition

/// Result of checking whether a simplicial set is the nerve of a groupoid,
/// with the reconstructed groupoid on success.
#[derive(Debug, Clone)]
pub struct NerveCheck {
    pub report: Report,
    pub groupoid: Option<FinGroupoid>,
}

impl NerveCheck {
    pub fn holds(&self) -> bool {
        self.report.passed()
    }
}

/// Decides whether `x` is the nerve of a finite groupoid: all Segal maps up
/// to the bound must be bijections and the induced composition on edges must
/// have identities and two-sided inverses. Needs at least 3 levels so that
/// associativity is determined.
pub fn is_nerve_of_groupoid(x: &SimplicialSet) -> Result<NerveCheck> {
    if x.dim_bound() < 3 {
        return Err(Error::NeedsLevel {
            needed: 3,
            bound: x.dim_bound(),
        });
    }
    let mut report = Report::new("nerve of a groupoid");
    let mut segal2: Option<SegalMap> = None;
    for m in 2..=x.dim_bound() {
        let s = segal_map(x, m)?;
        let ok = s.is_bijection();
        let witness = if ok {
            format!("{} cells", s.source_ids().len())
        } else if let Some(w) = s.non_surjective_witness() {
            format!("tuple `{w}` has no filler")
        } else {
            let (a, b) = s.non_injective_witness().unwrap();
            format!("cells `{a}` and `{b}` share a spine")
        };
        report.record(format!("segal map at level {m} is a bijection"), ok, witness);
        if m == 2 {
            segal2 = Some(s);
        }
    }
    let segal2 = segal2.unwrap();
    if !report.passed() {
        return Ok(NerveCheck {
            report,
            groupoid: None,
        });
    }

    // Reconstruct: objects are 0-cells, morphisms are 1-cells, the composite
    // of a composable pair is d1 of its unique filler.
    let inv = segal2.inverse().expect("bijection has an inverse");
    let compose: BTreeMap<(usize, usize), usize> = segal2
        .tuple_components()
        .iter()
        .enumerate()
        .map(|(t, comp)| ((comp[0], comp[1]), x.face(2, 1, inv[t])))
        .collect();
    let identity_of: Vec<usize> = (0..x.cell_count(0))
        .map(|v| x.degeneracy(0, 0, v))
        .collect();

    // Unit laws.
    let mut units_ok = true;
    let mut unit_witness = String::new();
    for e in 0..x.cell_count(1) {
        let src = x.face(1, 1, e);
        let tgt = x.face(1, 0, e);
        let left = compose.get(&(identity_of[src], e)).copied();
        let right = compose.get(&(e, identity_of[tgt])).copied();
        if left != Some(e) || right != Some(e) {
            units_ok = false;
            unit_witness = format!("degenerate edge is not a unit for `{}`", x.cell_id(1, e));
            break;
        }
    }
    report.record("degenerate edges are identities", units_ok, unit_witness);

    // Associativity over all composable triples.
    let mut assoc_ok = true;
    let mut assoc_witness = String::new();
    'outer: for (&(f, g), &fg) in &compose {
        for h in 0..x.cell_count(1) {
            if x.face(1, 1, h) != x.face(1, 0, g) {
                continue;
            }
            let gh = compose[&(g, h)];
            if compose[&(fg, h)] != compose[&(f, gh)] {
                assoc_ok = false;
                assoc_witness = format!(
                    "(`{}`;`{}`);`{}`",
                    x.cell_id(1, f),
                    x.cell_id(1, g),
                    x.cell_id(1, h)
                );
                break 'outer;
            }
        }
    }
    report.record("induced composition is associative", assoc_ok, assoc_witness);

    // Two-sided inverses.
    let mut inverse_of: Vec<Option<usize>> = vec![None; x.cell_count(1)];
    let mut inverses_ok = true;
    let mut inv_witness = String::new();
    for e in 0..x.cell_count(1) {
        let src = x.face(1, 1, e);
        let tgt = x.face(1, 0, e);
        let found = (0..x.cell_count(1)).find(|&g| {
            x.face(1, 1, g) == tgt
                && x.face(1, 0, g) == src
                && compose.get(&(e, g)) == Some(&identity_of[src])
                && compose.get(&(g, e)) == Some(&identity_of[tgt])
        });
        match found {
            Some(g) => inverse_of[e] = Some(g),
            None => {
                inverses_ok = false;
                inv_witness = format!("edge `{}` has no two-sided inverse", x.cell_id(1, e));
                break;
            }
        }
    }
    report.record("every edge has a two-sided inverse", inverses_ok, inv_witness);

    if !report.passed() {
        return Ok(NerveCheck {
            report,
            groupoid: None,
        });
    }

    let mut b = FinGroupoidBuilder::new();
    for v in x.cells(0) {
        b.object(v);
    }
    for e in 0..x.cell_count(1) {
        b.morphism(
            x.cell_id(1, e),
            x.cell_id(0, x.face(1, 1, e)),
            x.cell_id(0, x.face(1, 0, e)),
        );
    }
    for v in 0..x.cell_count(0) {
        b.identity(x.cell_id(0, v), x.cell_id(1, identity_of[v]));
    }
    for e in 0..x.cell_count(1) {
        b.inverse(x.cell_id(1, e), x.cell_id(1, inverse_of[e].unwrap()));
    }
    for (&(f, g), &fg) in &compose {
        b.compose(x.cell_id(1, f), x.cell_id(1, g), x.cell_id(1, fg));
    }
    match b.build() {
        Ok(g) => {
            report.pass_with("reconstructed groupoid", format!("{} morphisms", x.cell_count(1)));
            Ok(NerveCheck {
                report,
                groupoid: Some(g),
            })
        }
        Err(e) => {
            report.fail("reconstructed groupoid", e.to_string());
            Ok(NerveCheck {
                report,
                groupoid: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_path_sset() -> SimplicialSetBuilder {
        // Two points and an edge between them, bound one.
        let mut b = SimplicialSetBuilder::new(1);
        b.cell(0, "p").cell(0, "q");
        b.cell(1, "e").cell(1, "sp").cell(1, "sq");
        b.face(1, 0, "e", "q").face(1, 1, "e", "p");
        b.face(1, 0, "sp", "p").face(1, 1, "sp", "p");
        b.face(1, 0, "sq", "q").face(1, 1, "sq", "q");
        b.degeneracy(0, 0, "p", "sp").degeneracy(0, 0, "q", "sq");
        b
    }

    #[test]
    fn the_standard_simplex_validates_with_known_cell_counts() {
        let x = standard_simplex(2, 3);
        assert!(validate_sset(&x).is_valid());
        let counts: Vec<usize> = (0..=3).map(|k| x.cell_count(k)).collect();
        assert_eq!(counts, vec![3, 6, 10, 15]);
        let flags = x.degenerate_flags(2);
        assert_eq!(flags.iter().filter(|f| !**f).count(), 1);
    }

    #[test]
    fn a_misdirected_degeneracy_is_reported_at_its_cell() {
        let good = edge_path_sset().build().unwrap();
        assert!(validate_sset(&good).is_valid());

        let mut bad = edge_path_sset();
        bad.face(1, 0, "sp", "q");
        let report = validate_sset(&bad.build().unwrap());
        assert!(!report.is_valid());
        let hit = report
            .violations
            .iter()
            .find(|v| v.law.contains("s0"))
            .unwrap();
        assert!(hit.witness.contains("`p`"), "witness: {}", hit.witness);
    }

    #[test]
    fn components_see_through_edges_and_unions() {
        let edge = edge_path_sset().build().unwrap();
        assert_eq!(pi0(&edge).unwrap().len(), 1);
        let dot = constant_sset(&["z".into()], 1);
        let both = disjoint_union(&edge, &dot, "l", "r").unwrap();
        let part = pi0(&both).unwrap();
        assert_eq!(part.len(), 2);
        assert!(part.class_of("l:p").is_some());
        assert_eq!(part.class_of("l:p"), part.class_of("l:q"));
    }

    #[test]
    fn the_spine_comparison_finds_the_missing_filler() {
        let circle = boundary_simplex(2, 3);
        let sm = segal_map(&circle, 2).unwrap();
        assert!(!sm.is_bijection());
        let missing = sm.non_surjective_witness().unwrap();
        assert!(missing.contains('|'), "witness `{missing}` should be a pair");
        assert!(!is_nerve_of_groupoid(&circle).unwrap().holds());
    }

    #[test]
    fn fiber_products_pair_cells_over_the_target() {
        let dots = constant_sset(&["a".into(), "b".into()], 1);
        let dot = constant_sset(&["z".into()], 1);
        let collapse = SSetMap::from_fn(&dots, &dot, |_, _| "z".to_string()).unwrap();
        let fp = fiber_product(&collapse, &collapse).unwrap();
        assert_eq!(fp.object.cell_count(0), 4);
        assert!(fp.object.cell_index(0, "(a|b)").is_some());
        assert!(fp.pr1.is_levelwise_bijection() == false);
    }

    #[test]
    fn maps_from_a_point_pick_out_vertices() {
        let dot = constant_sset(&["z".into()], 1);
        let dots = constant_sset(&["a".into(), "b".into()], 1);
        assert_eq!(all_sset_maps(&dot, &dots).len(), 2);
        assert_eq!(all_sset_maps(&dots, &dot).len(), 1);
    }
}
