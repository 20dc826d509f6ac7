//! Point clouds and the cardinality balanced cluster tree.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Axis-aligned box `[min, max]` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    pub fn contains_box(&self, other: &BoundingBox) -> bool {
        self.contains(&other.min) && self.contains(&other.max)
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Longest edge; ties go to the lowest coordinate index.
    pub fn longest_axis(&self) -> usize {
        let mut best = 0;
        let mut best_w = f64::NEG_INFINITY;
        for (i, w) in self.widths().enumerate() {
            if w > best_w {
                best = i;
                best_w = w;
            }
        }
        best
    }

    pub fn diameter(&self) -> f64 {
        libm::sqrt(self.widths().map(|w| w * w).sum())
    }
}

/// Componentwise min/max of a nonempty point sequence.
pub fn bounding_box<'a, I>(points: I) -> Result<BoundingBox>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut it = points.into_iter();
    let first = it.next().ok_or(Error::EmptyPointSet)?;
    let mut bb = BoundingBox {
        min: first.to_vec(),
        max: first.to_vec(),
    };
    for p in it {
        if p.len() != bb.dim() {
            return Err(Error::DimensionMismatch {
                expected: bb.dim(),
                found: p.len(),
            });
        }
        for (k, &x) in p.iter().enumerate() {
            if x < bb.min[k] {
                bb.min[k] = x;
            }
            if x > bb.max[k] {
                bb.max[k] = x;
            }
        }
    }
    Ok(bb)
}

/// `N` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    bbox: BoundingBox,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if coords.len() % dim != 0 {
            return Err(Error::LengthMismatch {
                expected: (coords.len() / dim + 1) * dim,
                found: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        let bbox = bounding_box(coords.chunks_exact(dim))?;
        Ok(Self { dim, coords, bbox })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyPointSet)?.len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    /// Affine map of the bounding box onto `[0, 1]^d`. Flat axes map to 0.
    pub fn rescaled_to_unit_box(&self) -> PointCloud {
        let bb = &self.bbox;
        let mut coords = self.coords.clone();
        for p in coords.chunks_exact_mut(self.dim) {
            for k in 0..self.dim {
                let w = bb.max[k] - bb.min[k];
                p[k] = if w > 0.0 { ((p[k] - bb.min[k]) / w).clamp(0.0, 1.0) } else { 0.0 };
            }
        }
        PointCloud::new(self.dim, coords).expect("rescaling preserves validity")
    }

    /// Reorders points by `perm` (`new[i] = old[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(self.coords.len());
        for &i in perm {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud::new(self.dim, coords).expect("permutation preserves validity")
    }
}

/// One cluster of the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterNode {
    /// Half-open range into the tree order of the points.
    pub range: Range<usize>,
    pub bbox: BoundingBox,
    pub level: usize,
    pub parent: Option<usize>,
    pub children: Option<[usize; 2]>,
}

impl ClusterNode {
    pub fn len(&self) -> usize {
        self.range.end - self.range.start
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Binary cluster tree. Nodes are stored in breadth-first order, so the root
/// is node 0 and every child comes after its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTree {
    nodes: Vec<ClusterNode>,
    /// `permutation[t]` is the original index of the point at tree position `t`.
    permutation: Vec<usize>,
    inverse: Vec<usize>,
    depth: usize,
    leaf_capacity: usize,
    dim: usize,
}

impl ClusterTree {
    pub fn nodes(&self) -> &[ClusterNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &ClusterNode {
        &self.nodes[i]
    }

    pub fn root(&self) -> &ClusterNode {
        &self.nodes[0]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// `inverse_permutation()[i]` is the tree position of original point `i`.
    pub fn inverse_permutation(&self) -> &[usize] {
        &self.inverse
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_capacity(&self) -> usize {
        self.leaf_capacity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_points(&self) -> usize {
        self.permutation.len()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &ClusterNode)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_leaf())
    }

    /// Node count per level, root first.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.depth + 1];
        for n in &self.nodes {
            counts[n.level] += 1;
        }
        counts
    }
}

/// Builds the cardinality balanced cluster tree.
///
/// A node with more than `leaf_capacity` points is split along the longest
/// edge of its bounding box at the coordinate median: the lower `⌈n/2⌉`
/// points go left. Equal coordinates are ordered by original index, so the
/// result is deterministic.
pub fn build_cluster_tree(cloud: &PointCloud, leaf_capacity: usize) -> Result<ClusterTree> {
    if cloud.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if leaf_capacity == 0 {
        return Err(Error::InvalidParameter("leaf capacity must be positive".into()));
    }
    let n = cloud.len();
    let dim = cloud.dim();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut nodes: Vec<ClusterNode> = Vec::new();
    let mut queue: VecDeque<(Range<usize>, usize, Option<usize>)> = VecDeque::new();
    queue.push_back((0..n, 0, None));

    while let Some((range, level, parent)) = queue.pop_front() {
        let bbox = bounding_box(perm[range.clone()].iter().map(|&i| cloud.point(i)))?;
        let id = nodes.len();
        let len = range.len();
        let split = len > leaf_capacity;
        if split {
            let axis = bbox.longest_axis();
            perm[range.clone()].sort_by(|&a, &b| {
                cloud.point(a)[axis]
                    .total_cmp(&cloud.point(b)[axis])
                    .then(a.cmp(&b))
            });
            let mid = range.start + len.div_ceil(2);
            queue.push_back((range.start..mid, level + 1, Some(id)));
            queue.push_back((mid..range.end, level + 1, Some(id)));
        }
        nodes.push(ClusterNode {
            range,
            bbox,
            level,
            parent,
            children: None,
        });
    }
    // children are pushed in order right after each other
    for id in 1..nodes.len() {
        let p = nodes[id].parent.expect("non-root node has a parent");
        match &mut nodes[p].children {
            None => nodes[p].children = Some([id, id]),
            Some(c) => c[1] = id,
        }
    }

    let depth = nodes.iter().map(|n| n.level).max().unwrap_or(0);
    let mut inverse = vec![0; n];
    for (t, &i) in perm.iter().enumerate() {
        inverse[i] = t;
    }
    Ok(ClusterTree {
        nodes,
        permutation: perm,
        inverse,
        depth,
        leaf_capacity,
        dim,
    })
}
