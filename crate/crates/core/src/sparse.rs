//! Sparse symmetric storage and an LDL^T factorization with a geometric
//! nested-dissection ordering.
//!
//! The eigen and torsion solves factor `K + beta B` many times with the same
//! pattern, so matrices assembled on one mesh share a [`Pattern`] and differ
//! only in their value arrays; a beta sweep is then a value recombination
//! plus a numeric refactorization.

use crate::error::{Error, Result};
use std::sync::Arc;

const NONE: usize = usize::MAX;

/// Shared CSR pattern (full symmetric pattern, both triangles stored).
#[derive(Debug)]
pub struct Pattern {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
}

impl Pattern {
    /// Position of entry (i, j) in the value array.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].binary_search(&j).ok().map(|p| lo + p)
    }
}

/// Symmetric sparse matrix over a shared pattern.
#[derive(Clone, Debug)]
pub struct SparseSym {
    pub pattern: Arc<Pattern>,
    pub values: Vec<f64>,
}

impl SparseSym {
    pub fn n(&self) -> usize {
        self.pattern.n
    }

    /// Build a pattern from unsorted (i, j) pairs (both triangles will be
    /// stored; the diagonal is always included).
    pub fn build_pattern(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Arc<Pattern> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            adj[i].push(i);
        }
        for (i, j) in pairs {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            col_idx.extend_from_slice(list);
            row_ptr.push(col_idx.len());
        }
        Arc::new(Pattern { n, row_ptr, col_idx })
    }

    pub fn zeros(pattern: Arc<Pattern>) -> SparseSym {
        let nnz = pattern.col_idx.len();
        SparseSym {
            pattern,
            values: vec![0.0; nnz],
        }
    }

    /// Add `v` to entry (i, j); panics if the entry is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .pattern
            .find(i, j)
            .expect("entry outside the assembled pattern");
        self.values[p] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let p = &self.pattern;
        for i in 0..p.n {
            let mut s = 0.0;
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                s += self.values[k] * x[p.col_idx[k]];
            }
            y[i] = s;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.matvec(x, &mut y);
        y
    }

    /// self + alpha * other, requiring the same shared pattern.
    pub fn add_scaled(&self, other: &SparseSym, alpha: f64) -> SparseSym {
        assert!(
            Arc::ptr_eq(&self.pattern, &other.pattern),
            "add_scaled requires matrices on the same pattern"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        SparseSym {
            pattern: Arc::clone(&self.pattern),
            values,
        }
    }

    /// Largest relative asymmetry |A - A^T| / max|A|.
    pub fn asymmetry(&self) -> f64 {
        let p = &self.pattern;
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..p.n {
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                let j = p.col_idx[k];
                if j > i {
                    let vij = self.values[k];
                    let vji = p.find(j, i).map_or(0.0, |q| self.values[q]);
                    worst = worst.max((vij - vji).abs());
                }
            }
        }
        worst / scale
    }

    /// Extract the principal submatrix on `keep` (sorted old indices).
    pub fn submatrix(&self, keep: &[usize]) -> SparseSym {
        let p = &self.pattern;
        let mut new_of_old = vec![NONE; p.n];
        for (new, &old) in keep.iter().enumerate() {
            new_of_old[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &old in keep {
            for k in p.row_ptr[old]..p.row_ptr[old + 1] {
                let nj = new_of_old[p.col_idx[k]];
                if nj != NONE {
                    col_idx.push(nj);
                    values.push(self.values[k]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseSym {
            pattern: Arc::new(Pattern {
                n: keep.len(),
                row_ptr,
                col_idx,
            }),
            values,
        }
    }
}

/// Fill-reducing ordering by recursive geometric bisection: split the vertex
/// set at the coordinate median of its wider bounding-box axis, order the
/// two halves recursively and number the separator (the layer of one half
/// adjacent to the other) last.
pub fn nested_dissection_order(pattern: &Pattern, coords: &[[f64; 2]]) -> Vec<usize> {
    assert_eq!(pattern.n, coords.len());
    let mut order = Vec::with_capacity(pattern.n);
    let mut side = vec![0u8; pattern.n]; // 0 = outside the current split
    let nodes: Vec<usize> = (0..pattern.n).collect();
    dissect(pattern, coords, nodes, &mut side, &mut order);
    order
}

fn dissect(
    pattern: &Pattern,
    coords: &[[f64; 2]],
    mut nodes: Vec<usize>,
    side: &mut [u8],
    order: &mut Vec<usize>,
) {
    if nodes.len() <= 48 {
        order.extend_from_slice(&nodes);
        return;
    }
    let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &v in &nodes {
        for a in 0..2 {
            min[a] = min[a].min(coords[v][a]);
            max[a] = max[a].max(coords[v][a]);
        }
    }
    let axis = usize::from(max[1] - min[1] > max[0] - min[0]);
    let mid = nodes.len() / 2;
    nodes.select_nth_unstable_by(mid, |&u, &v| {
        coords[u][axis].total_cmp(&coords[v][axis])
    });
    let (a_nodes, b_nodes) = nodes.split_at(mid);
    for &v in a_nodes {
        side[v] = 1;
    }
    for &v in b_nodes {
        side[v] = 2;
    }
    // separator: vertices of B with a neighbor in A
    let mut sep = Vec::new();
    let mut b_inner = Vec::new();
    for &v in b_nodes {
        let touches_a = (pattern.row_ptr[v]..pattern.row_ptr[v + 1])
            .any(|k| side[pattern.col_idx[k]] == 1);
        if touches_a {
            sep.push(v);
        } else {
            b_inner.push(v);
        }
    }
    let a_nodes = a_nodes.to_vec();
    for &v in &nodes {
        side[v] = 0;
    }
    dissect(pattern, coords, a_nodes, side, order);
    dissect(pattern, coords, b_inner, side, order);
    order.extend_from_slice(&sep);
}

/// Symbolic data for an LDL^T factorization of a permuted symmetric matrix.
pub struct LdlSymbolic {
    n: usize,
    /// order[k] = original index placed at position k
    order: Vec<usize>,
    /// inverse permutation: position of original index
    pos: Vec<usize>,
    parent: Vec<usize>,
    lp: Vec<usize>,
}

impl LdlSymbolic {
    /// Elimination tree and column counts of L for P A P^T.
    pub fn analyze(pattern: &Pattern, order: Vec<usize>) -> LdlSymbolic {
        let n = pattern.n;
        assert_eq!(order.len(), n);
        let mut pos = vec![0usize; n];
        for (k, &old) in order.iter().enumerate() {
            pos[old] = k;
        }
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            let old = order[k];
            flag[k] = k;
            for e in pattern.row_ptr[old]..pattern.row_ptr[old + 1] {
                let mut i = pos[pattern.col_idx[e]];
                while i < k {
                    if flag[i] == k {
                        break;
                    }
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = Vec::with_capacity(n + 1);
        lp.push(0);
        for k in 0..n {
            lp.push(lp[k] + lnz[k]);
        }
        LdlSymbolic {
            n,
            order,
            pos,
            parent,
            lp,
        }
    }

    pub fn fill_nnz(&self) -> usize {
        self.lp[self.n]
    }
}

/// Numeric LDL^T factor; reusable across matrices with the same pattern.
pub struct LdlFactor {
    sym: Arc<LdlSymbolic>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

impl LdlFactor {
    /// Up-looking numeric factorization. Fails on a nonpositive pivot
    /// (the systems factored here are SPD by construction).
    pub fn factor(sym: Arc<LdlSymbolic>, a: &SparseSym) -> Result<LdlFactor> {
        let n = sym.n;
        let pattern = &a.pattern;
        assert_eq!(pattern.n, n);
        let nnz = sym.lp[n];
        let mut li = vec![0usize; nnz];
        let mut lx = vec![0.0f64; nnz];
        let mut d = vec![0.0f64; n];
        let mut y = vec![0.0f64; n];
        let mut len = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut flag = vec![NONE; n];

        for k in 0..n {
            let old = sym.order[k];
            let mut top = n;
            flag[k] = k;
            d[k] = 0.0;
            for e in pattern.row_ptr[old]..pattern.row_ptr[old + 1] {
                let i0 = sym.pos[pattern.col_idx[e]];
                if i0 > k {
                    continue;
                }
                y[i0] += a.values[e];
                // walk up the etree collecting the pattern of row k of L
                let mut lens = 0;
                let mut i = i0;
                while flag[i] != k {
                    stack[lens] = i;
                    lens += 1;
                    flag[i] = k;
                    i = sym.parent[i];
                }
                while lens > 0 {
                    lens -= 1;
                    top -= 1;
                    stack.swap(top, lens);
                }
            }
            d[k] += y[k];
            y[k] = 0.0;
            while top < n {
                let i = stack[top];
                top += 1;
                let yi = y[i];
                y[i] = 0.0;
                let p0 = sym.lp[i];
                for p in p0..p0 + len[i] {
                    y[li[p]] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                d[k] -= lki * yi;
                li[p0 + len[i]] = k;
                lx[p0 + len[i]] = lki;
                len[i] += 1;
            }
            if !(d[k] > 0.0) || !d[k].is_finite() {
                return Err(Error::Breakdown {
                    context: "ldl factorization",
                    reason: format!("nonpositive pivot {} at column {k}", d[k]),
                });
            }
        }
        Ok(LdlFactor { sym, li, lx, d })
    }

    /// Solve A x = b through the permuted factor.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.sym.n;
        let mut x: Vec<f64> = (0..n).map(|k| b[self.sym.order[k]]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in self.sym.lp[j]..self.sym.lp[j + 1] {
                x[self.li[p]] -= self.lx[p] * xj;
            }
        }
        for j in 0..n {
            x[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut xj = x[j];
            for p in self.sym.lp[j]..self.sym.lp[j + 1] {
                xj -= self.lx[p] * x[self.li[p]];
            }
            x[j] = xj;
        }
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.sym.order[k]] = x[k];
        }
        out
    }
}

/// Convenience: analyze + factor with a nested-dissection ordering.
pub fn factor_spd(a: &SparseSym, coords: &[[f64; 2]]) -> Result<(Arc<LdlSymbolic>, LdlFactor)> {
    let order = nested_dissection_order(&a.pattern, coords);
    let sym = Arc::new(LdlSymbolic::analyze(&a.pattern, order));
    let f = LdlFactor::factor(Arc::clone(&sym), a)?;
    Ok((sym, f))
}
