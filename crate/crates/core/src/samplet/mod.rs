//! Samplet bases on a cluster tree and the fast samplet transform.
//!
//! Construction is bottom-up. At a leaf the inputs are the point evaluations,
//! at an internal node the scaling functions of both children. The transposed
//! moment matrix of the inputs is factored as `Mᵀ = Q R`; the first
//! `min(m_q, n_in)` columns of `Q` become scaling functions and the remaining
//! columns are samplets. Those columns are orthogonal to the range of `Mᵀ`,
//! which is exactly the vanishing-moment condition.
//!
//! Transforms run in place on a "slot" layout: slot `t` starts out holding
//! the value at tree position `t`, each node rotates the slots of its inputs,
//! and a final permutation moves every slot to its global samplet index.
//! Global indices are breadth first: root scaling functions, then samplets
//! level by level, left to right within a level.

mod moments;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;

use crate::dense::{self, householder_qr};
use crate::geometry::{ClusterTree, PointCloud};
use crate::{Error, Result};

pub use moments::{moment_dim, multi_indices};
use moments::{moment_matrix_t, shift_matrix, Frame};

/// Per-node orthogonal block.
#[derive(Debug, Clone)]
struct Block {
    /// Slots holding the inputs, in input order.
    slots: Vec<usize>,
    n_scaling: usize,
    /// Row-major `n_in × n_in`; row `k` is the `k`-th output functional.
    qt: Vec<f64>,
    /// Global index of the first samplet of this node.
    samplet_offset: usize,
}

impl Block {
    fn n_in(&self) -> usize {
        self.slots.len()
    }

    fn n_samplets(&self) -> usize {
        self.slots.len() - self.n_scaling
    }
}

/// Samplet basis with `q + 1` vanishing moments.
#[derive(Debug, Clone)]
pub struct SampletBasis {
    tree: ClusterTree,
    q: usize,
    m_q: usize,
    blocks: Vec<Block>,
    /// Slot → global element index.
    slot_to_global: Vec<usize>,
    /// Global element index → slot.
    global_to_slot: Vec<usize>,
    /// Global element index → owning node.
    element_node: Vec<usize>,
}

impl SampletBasis {
    /// Builds the basis for `cloud` on `tree` with polynomial degree `q`.
    pub fn new(tree: ClusterTree, cloud: &PointCloud, q: usize) -> Result<Self> {
        let n = tree.num_points();
        if cloud.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: cloud.len(),
            });
        }
        if cloud.dim() != tree.dim() {
            return Err(Error::DimensionMismatch {
                expected: tree.dim(),
                found: cloud.dim(),
            });
        }
        let dim = cloud.dim();
        let m = moment_dim(dim, q);
        let indices = multi_indices(dim, q);
        let nodes = tree.nodes();
        let frames: Vec<Frame> = nodes.iter().map(|nd| Frame::of(&nd.bbox)).collect();

        let mut blocks: Vec<Option<Block>> = vec![None; nodes.len()];
        // scaling moments of each node in its own frame: [k * m + β]
        let mut scaling_moments: Vec<Vec<f64>> = vec![Vec::new(); nodes.len()];

        for id in (0..nodes.len()).rev() {
            let node = &nodes[id];
            let (slots, mt) = match node.children {
                None => {
                    if node.is_empty() {
                        return Err(Error::EmptyPointSet);
                    }
                    let slots: Vec<usize> = node.range.clone().collect();
                    let pts = tree.permutation()[node.range.clone()]
                        .iter()
                        .map(|&i| cloud.point(i));
                    let mt = moment_matrix_t(&frames[id], &indices, q, pts);
                    (slots, mt)
                }
                Some(children) => {
                    let mut slots = Vec::new();
                    let mut cols: Vec<Vec<f64>> = Vec::new();
                    for &c in &children {
                        let cb = blocks[c].as_ref().expect("children are built first");
                        slots.extend_from_slice(&cb.slots[..cb.n_scaling]);
                        let s = shift_matrix(&frames[c], &frames[id], &indices, q);
                        let smom = &scaling_moments[c];
                        for k in 0..cb.n_scaling {
                            let mk = &smom[k * m..(k + 1) * m];
                            cols.push((0..m).map(|a| dense::dot(&s[a * m..(a + 1) * m], mk)).collect());
                        }
                        scaling_moments[c] = Vec::new();
                    }
                    let n_in = slots.len();
                    let mut mt = vec![0.0; n_in * m];
                    for (i, col) in cols.iter().enumerate() {
                        for a in 0..m {
                            mt[a * n_in + i] = col[a];
                        }
                    }
                    (slots, mt)
                }
            };
            if mt.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("moment matrix"));
            }
            let n_in = slots.len();
            let qr = householder_qr(&mt, n_in, m);
            let n_scaling = m.min(n_in);
            // Q is column-major, so it is Qᵀ in row-major form.
            let qt = qr.q;
            let mut smom = vec![0.0; n_scaling * m];
            for k in 0..n_scaling {
                for a in 0..m {
                    smom[k * m + a] = qr.r[a * n_in + k];
                }
            }
            scaling_moments[id] = smom;
            blocks[id] = Some(Block {
                slots,
                n_scaling,
                qt,
                samplet_offset: 0,
            });
        }

        let mut blocks: Vec<Block> = blocks.into_iter().map(|b| b.expect("every node built")).collect();
        let mut slot_to_global = vec![usize::MAX; n];
        let mut element_node = vec![0; n];
        let root_scaling = blocks[0].n_scaling;
        for k in 0..root_scaling {
            slot_to_global[blocks[0].slots[k]] = k;
        }
        let mut next = root_scaling;
        for (id, b) in blocks.iter_mut().enumerate() {
            b.samplet_offset = next;
            for s in 0..b.n_samplets() {
                slot_to_global[b.slots[b.n_scaling + s]] = next + s;
                element_node[next + s] = id;
            }
            next += b.n_samplets();
        }
        debug_assert_eq!(next, n);
        let mut global_to_slot = vec![0; n];
        for (slot, &g) in slot_to_global.iter().enumerate() {
            global_to_slot[g] = slot;
        }
        Ok(Self {
            tree,
            q,
            m_q: m,
            blocks,
            slot_to_global,
            global_to_slot,
            element_node,
        })
    }

    pub fn len(&self) -> usize {
        self.tree.num_points()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tree(&self) -> &ClusterTree {
        &self.tree
    }

    /// Polynomial degree `q`; samplets have `q + 1` vanishing moments.
    pub fn order(&self) -> usize {
        self.q
    }

    pub fn moment_dim(&self) -> usize {
        self.m_q
    }

    /// Number of root scaling functions at the head of the global ordering.
    pub fn n_root_scaling(&self) -> usize {
        self.blocks[0].n_scaling
    }

    /// Node owning global element `k`.
    pub fn element_node(&self, k: usize) -> usize {
        self.element_node[k]
    }

    /// Level `j` of global element `k` (root scaling functions are level 0).
    pub fn element_level(&self, k: usize) -> usize {
        self.tree.node(self.element_node[k]).level
    }

    pub fn is_scaling(&self, k: usize) -> bool {
        k < self.n_root_scaling()
    }

    /// Index range of samplets owned by `node`.
    pub fn node_samplets(&self, node: usize) -> Range<usize> {
        let b = &self.blocks[node];
        b.samplet_offset..b.samplet_offset + b.n_samplets()
    }

    /// Largest `|Q_νᵀ Q_ν − I|` entry over all node blocks.
    pub fn block_orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let n = b.n_in();
            for i in 0..n {
                for j in 0..=i {
                    let d = dense::dot(&b.qt[i * n..(i + 1) * n], &b.qt[j * n..(j + 1) * n]);
                    let e = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((d - e).abs());
                }
            }
        }
        worst
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// `T v`: point-order values to samplet coefficients.
    pub fn forward(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.forward_into(v, &mut out)?;
        Ok(out)
    }

    pub fn forward_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        let mut x: Vec<f64> = self.tree.permutation().iter().map(|&i| v[i]).collect();
        self.rotate_up(&mut x);
        for (slot, &g) in self.slot_to_global.iter().enumerate() {
            out[g] = x[slot];
        }
        Ok(())
    }

    /// `Tᵀ w`: samplet coefficients back to point-order values.
    pub fn inverse(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.inverse_into(w, &mut out)?;
        Ok(out)
    }

    pub fn inverse_into(&self, w: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(w.len())?;
        self.check_len(out.len())?;
        let mut x: Vec<f64> = self.slot_to_global.iter().map(|&g| w[g]).collect();
        self.rotate_down(&mut x);
        for (t, &i) in self.tree.permutation().iter().enumerate() {
            out[i] = x[t];
        }
        Ok(())
    }

    fn rotate_up(&self, x: &mut [f64]) {
        let mut buf = Vec::new();
        for b in self.blocks.iter().rev() {
            let n = b.n_in();
            buf.clear();
            buf.extend(b.slots.iter().map(|&s| x[s]));
            for (k, &s) in b.slots.iter().enumerate() {
                x[s] = dense::dot(&b.qt[k * n..(k + 1) * n], &buf);
            }
        }
    }

    fn rotate_down(&self, x: &mut [f64]) {
        let mut buf = Vec::new();
        let mut acc = Vec::new();
        for b in &self.blocks {
            let n = b.n_in();
            buf.clear();
            buf.extend(b.slots.iter().map(|&s| x[s]));
            acc.clear();
            acc.resize(n, 0.0);
            for (k, &y) in buf.iter().enumerate() {
                if y != 0.0 {
                    for (a, q) in acc.iter_mut().zip(&b.qt[k * n..(k + 1) * n]) {
                        *a += y * q;
                    }
                }
            }
            for (&s, &a) in b.slots.iter().zip(&acc) {
                x[s] = a;
            }
        }
    }

    /// Applies the node rotations of `T` to every column of a row-major
    /// `N × ncols` matrix whose rows are in slot (tree) order. No permutation
    /// is applied on either side.
    pub(crate) fn rotate_rows_up(&self, data: &mut [f64], ncols: usize) {
        assert_eq!(data.len(), self.len() * ncols);
        let mut tmp = Vec::new();
        let mut out = Vec::new();
        for b in self.blocks.iter().rev() {
            let n = b.n_in();
            tmp.clear();
            for &s in &b.slots {
                tmp.extend_from_slice(&data[s * ncols..(s + 1) * ncols]);
            }
            out.clear();
            out.resize(n * ncols, 0.0);
            dense::gemm(n, n, ncols, &b.qt, (n, 1), &tmp, (ncols, 1), &mut out, ncols);
            for (k, &s) in b.slots.iter().enumerate() {
                data[s * ncols..(s + 1) * ncols].copy_from_slice(&out[k * ncols..(k + 1) * ncols]);
            }
        }
    }

    /// Slot of global element `k`.
    pub(crate) fn slot_of(&self, k: usize) -> usize {
        self.global_to_slot[k]
    }

    /// Coefficient vector `ω_k` of element `k`, scattered to point order.
    pub fn element_coefficients(&self, k: usize) -> Result<Vec<f64>> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.len(),
            });
        }
        let (range, local) = self.element_local(k);
        let mut out = vec![0.0; self.len()];
        for (t, v) in range.zip(local) {
            out[self.tree.permutation()[t]] = v;
        }
        Ok(out)
    }

    /// `ω_k` restricted to the tree-position range of its node.
    fn element_local(&self, k: usize) -> (Range<usize>, Vec<f64>) {
        let node = self.element_node[k];
        let range = self.tree.node(node).range.clone();
        let lo = range.start;
        let mut x = vec![0.0; range.len()];
        x[self.global_to_slot[k] - lo] = 1.0;
        let mut stack = vec![node];
        let mut buf = Vec::new();
        let mut acc = Vec::new();
        while let Some(id) = stack.pop() {
            let b = &self.blocks[id];
            let n = b.n_in();
            buf.clear();
            buf.extend(b.slots.iter().map(|&s| x[s - lo]));
            if buf.iter().any(|&v| v != 0.0) {
                acc.clear();
                acc.resize(n, 0.0);
                for (kk, &y) in buf.iter().enumerate() {
                    if y != 0.0 {
                        for (a, q) in acc.iter_mut().zip(&b.qt[kk * n..(kk + 1) * n]) {
                            *a += y * q;
                        }
                    }
                }
                for (&s, &a) in b.slots.iter().zip(&acc) {
                    x[s - lo] = a;
                }
                if let Some(c) = self.tree.node(id).children {
                    stack.push(c[1]);
                    stack.push(c[0]);
                }
            }
        }
        (range, x)
    }

    /// Dense `T` (rows are elements in global order, columns are points).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut t = DMatrix::zeros(n, n);
        for k in 0..n {
            let (range, local) = self.element_local(k);
            for (pos, v) in range.zip(local) {
                t[(k, self.tree.permutation()[pos])] = v;
            }
        }
        t
    }

    /// Exact `max |TᵀT − I|` entry as computed in floating point.
    ///
    /// Column `t` of `T` is nonzero only on the outputs of the ancestors of
    /// the leaf holding `t`. Two columns therefore only overlap on the outputs
    /// of their lowest common ancestor and above, so every block of `TᵀT`
    /// between sibling subtrees is a single small GEMM.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.len();
        let nodes = self.tree.nodes();
        // prefix[id]: number of outputs owned by the path root..=id
        let mut prefix = vec![0usize; nodes.len()];
        for (id, nd) in nodes.iter().enumerate() {
            let own = self.blocks[id].n_samplets();
            prefix[id] = match nd.parent {
                None => self.blocks[0].n_scaling + own,
                Some(p) => prefix[p] + own,
            };
        }
        let width = prefix.iter().copied().max().unwrap_or(0);
        let mut cols = vec![0.0; n * width];

        // start offset of each node's samplets inside a column
        let mut start = vec![0usize; nodes.len()];
        for (id, nd) in nodes.iter().enumerate() {
            start[id] = match nd.parent {
                None => self.blocks[0].n_scaling,
                Some(p) => prefix[p],
            };
        }

        let mut x = Vec::new();
        let mut y = Vec::new();
        for (leaf, nd) in self.tree.leaves() {
            for (local, t) in nd.range.clone().enumerate() {
                let row = &mut cols[t * width..(t + 1) * width];
                let mut id = leaf;
                x.clear();
                x.resize(self.blocks[id].n_in(), 0.0);
                x[local] = 1.0;
                loop {
                    let b = &self.blocks[id];
                    let m = b.n_in();
                    y.clear();
                    y.extend((0..m).map(|k| dense::dot(&b.qt[k * m..(k + 1) * m], &x)));
                    row[start[id]..start[id] + b.n_samplets()].copy_from_slice(&y[b.n_scaling..]);
                    match nodes[id].parent {
                        None => {
                            row[..b.n_scaling].copy_from_slice(&y[..b.n_scaling]);
                            break;
                        }
                        Some(p) => {
                            let [c0, _] = nodes[p].children.expect("parent has children");
                            let offset = if c0 == id { 0 } else { self.blocks[c0].n_scaling };
                            let pm = self.blocks[p].n_in();
                            x.clear();
                            x.resize(pm, 0.0);
                            x[offset..offset + b.n_scaling].copy_from_slice(&y[..b.n_scaling]);
                            id = p;
                        }
                    }
                }
            }
        }

        let mut worst: f64 = 0.0;
        let mut block = Vec::new();
        const CHUNK: usize = 512;
        for (id, nd) in nodes.iter().enumerate() {
            let k = prefix[id];
            match nd.children {
                Some([a, b]) => {
                    let ra = nodes[a].range.clone();
                    let rb = nodes[b].range.clone();
                    for lo in (ra.start..ra.end).step_by(CHUNK) {
                        let hi = (lo + CHUNK).min(ra.end);
                        let (m, nn) = (hi - lo, rb.len());
                        block.clear();
                        block.resize(m * nn, 0.0);
                        dense::gemm(
                            m,
                            k,
                            nn,
                            &cols[lo * width..],
                            (width, 1),
                            &cols[rb.start * width..],
                            (1, width),
                            &mut block,
                            nn,
                        );
                        worst = block.iter().fold(worst, |w, v| w.max(v.abs()));
                    }
                }
                None => {
                    let r = nd.range.clone();
                    let m = r.len();
                    block.clear();
                    block.resize(m * m, 0.0);
                    dense::gemm(
                        m,
                        k,
                        m,
                        &cols[r.start * width..],
                        (width, 1),
                        &cols[r.start * width..],
                        (1, width),
                        &mut block,
                        m,
                    );
                    for i in 0..m {
                        block[i * m + i] -= 1.0;
                    }
                    worst = block.iter().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
        worst
    }
}

/// Per-level maxima of `‖ω_{j,k}‖₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Profile {
    /// `max_k ‖ω_{j,k}‖₁` for `j = 0..=J`, root scaling functions included at
    /// level 0. Levels without elements report 0.
    pub per_level: Vec<f64>,
    /// Smallest `c` with `‖ω_{j,k}‖₁ ≤ c · 2^{(J−j)/2}` over all samplets, or
    /// `None` when the basis has no samplets.
    pub fitted_constant: Option<f64>,
}

pub fn coefficient_l1_profile(basis: &SampletBasis) -> L1Profile {
    let depth = basis.tree().depth();
    let mut per_level = vec![0.0; depth + 1];
    let mut fitted: Option<f64> = None;
    for k in 0..basis.len() {
        let (_, local) = basis.element_local(k);
        let l1: f64 = local.iter().map(|v| v.abs()).sum();
        let j = basis.element_level(k);
        per_level[j] = f64::max(per_level[j], l1);
        if !basis.is_scaling(k) {
            let c = l1 / libm::pow(2.0, (depth - j) as f64 / 2.0);
            fitted = Some(fitted.map_or(c, |f| f.max(c)));
        }
    }
    L1Profile {
        per_level,
        fitted_constant: fitted,
    }
}

/// Outcome of [`verify_dual_basis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

/// Default cap on `N` for the dense dual-basis check.
pub const DUAL_CHECK_CAP: usize = 512;

/// Checks `⟨ψ_i, ψ̃_k⟩ = δ_ik` through the kernel matrix: forms the dual
/// coefficients `W̃ = K⁻¹ Tᵀ` by a dense Cholesky solve and returns the
/// largest entry of `T K W̃ − I`.
///
/// `kernel` is in point order.
pub fn verify_dual_basis(basis: &SampletBasis, kernel: &DMatrix<f64>, tolerance: f64) -> Result<DualCheck> {
    verify_dual_basis_capped(basis, kernel, tolerance, DUAL_CHECK_CAP)
}

pub fn verify_dual_basis_capped(
    basis: &SampletBasis,
    kernel: &DMatrix<f64>,
    tolerance: f64,
    cap: usize,
) -> Result<DualCheck> {
    let n = basis.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "dual basis check",
            requested: n,
            cap,
        });
    }
    if kernel.nrows() != n || kernel.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: kernel.nrows(),
        });
    }
    let t = basis.to_dense();
    let chol = kernel
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("kernel matrix"))?;
    let dual = chol.solve(&t.transpose());
    let gram = &t * (kernel * dual);
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - e).abs());
        }
    }
    Ok(DualCheck {
        passed: dev <= tolerance,
        max_deviation: dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_cluster_tree;

    fn basis_1d(xs: &[f64], cap: usize, q: usize) -> SampletBasis {
        let cloud = PointCloud::new(1, xs.to_vec()).unwrap();
        let tree = build_cluster_tree(&cloud, cap).unwrap();
        SampletBasis::new(tree, &cloud, q).unwrap()
    }

    #[test]
    fn single_leaf_with_m_points_has_no_samplets() {
        let cloud = PointCloud::new(2, vec![0.0, 0.0, 1.0, 0.2, 0.3, 0.9]).unwrap();
        let tree = build_cluster_tree(&cloud, 3).unwrap();
        let basis = SampletBasis::new(tree, &cloud, 1).unwrap();
        assert_eq!(basis.moment_dim(), 3);
        assert_eq!(basis.n_root_scaling(), 3);
        assert!(basis.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn constant_scaling_and_zero_sum_samplets() {
        let basis = basis_1d(&[0.0, 1.0, 2.0, 3.0], 4, 0);
        assert_eq!(basis.n_root_scaling(), 1);
        let phi = basis.element_coefficients(0).unwrap();
        for v in &phi {
            assert!((v - 0.5).abs() < 1e-15);
        }
        for k in 1..4 {
            let w = basis.element_coefficients(k).unwrap();
            assert!(w.iter().sum::<f64>().abs() < 1e-15);
            assert!((dense::norm2(&w) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_of_unit_vector_is_element() {
        let xs: Vec<f64> = (0..37).map(|i| libm::sin(i as f64 * 1.3)).collect();
        let basis = basis_1d(&xs, 4, 1);
        for k in [0, 1, 5, 36] {
            let mut e = vec![0.0; 37];
            e[k] = 1.0;
            let a = basis.inverse(&e).unwrap();
            let b = basis.element_coefficients(k).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let basis = basis_1d(&[0.0, 1.0, 2.0], 2, 0);
        assert!(matches!(basis.forward(&[1.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(basis.inverse(&[1.0; 4]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn profile_of_single_point() {
        let basis = basis_1d(&[0.25], 2, 1);
        let p = coefficient_l1_profile(&basis);
        assert_eq!(p.per_level, vec![1.0]);
        assert_eq!(p.fitted_constant, None);
    }

    #[test]
    fn profile_single_leaf_bounded_by_sqrt_n() {
        let xs = [0.1, 0.4, 0.45, 0.8, 0.9, 0.95];
        let basis = basis_1d(&xs, 8, 1);
        for k in 0..basis.len() {
            let w = basis.element_coefficients(k).unwrap();
            let l1: f64 = w.iter().map(|v| v.abs()).sum();
            assert!(l1 <= libm::sqrt(6.0) + 1e-12);
        }
    }

    #[test]
    fn dual_check_with_identity_kernel() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.37 % 1.0).collect();
        let basis = basis_1d(&xs, 4, 1);
        let k = DMatrix::identity(20, 20);
        let c = verify_dual_basis(&basis, &k, 1e-12).unwrap();
        assert!(c.passed, "{}", c.max_deviation);
    }

    #[test]
    fn dual_check_rejects_indefinite_kernel() {
        let basis = basis_1d(&[0.0, 0.5, 1.0], 2, 0);
        let k = -DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            verify_dual_basis(&basis, &k, 1e-12),
            Err(Error::NotPositiveDefinite(_))
        ));
    }
}
