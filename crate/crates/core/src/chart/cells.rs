use std::sync::Arc;

use super::grid::ChartGrid;

/// A face of a grid cell lying on the boundary of a [`CellSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub cell: usize,
    pub axis: usize,
    /// true when the face is the upper side of `cell` along `axis`.
    pub upper: bool,
}

/// Set of closed grid cells; the integration and degree region type.
#[derive(Debug, Clone)]
pub struct CellSet {
    grid: Arc<ChartGrid>,
    mask: Vec<bool>,
}

impl CellSet {
    pub fn empty(grid: &Arc<ChartGrid>) -> Self {
        Self { grid: grid.clone(), mask: vec![false; grid.cell_count()] }
    }

    pub fn all(grid: &Arc<ChartGrid>) -> Self {
        Self { grid: grid.clone(), mask: vec![true; grid.cell_count()] }
    }

    pub fn from_mask(grid: &Arc<ChartGrid>, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), grid.cell_count(), "cell mask length");
        Self { grid: grid.clone(), mask }
    }

    /// Cells whose centers satisfy `pred`.
    pub fn from_predicate(grid: &Arc<ChartGrid>, pred: impl Fn(&[f64]) -> bool) -> Self {
        let mask = (0..grid.cell_count()).map(|c| pred(&grid.cell_center(c))).collect();
        Self { grid: grid.clone(), mask }
    }

    /// Cells spanned by node indices `lo[a] ..= hi[a]` on every axis.
    pub fn node_box(grid: &Arc<ChartGrid>, lo: &[usize], hi: &[usize]) -> Self {
        Self::from_cell_multi(grid, |m| (0..m.len()).all(|a| m[a] >= lo[a] && m[a] < hi[a]))
    }

    /// Cells lying inside the coordinate box `[lo, hi]` (up to a rounding
    /// allowance of 1e-9 cell widths).
    pub fn coord_box(grid: &Arc<ChartGrid>, lo: &[f64], hi: &[f64]) -> Self {
        let n = grid.dim();
        let ilo: Vec<usize> = (0..n)
            .map(|a| ((lo[a] - grid.origin()[a]) / grid.spacing()[a] - 1e-9).ceil().max(0.0) as usize)
            .collect();
        let ihi: Vec<usize> = (0..n)
            .map(|a| {
                let t = ((hi[a] - grid.origin()[a]) / grid.spacing()[a] + 1e-9).floor();
                t.clamp(0.0, (grid.shape()[a] - 1) as f64) as usize
            })
            .collect();
        Self::node_box(grid, &ilo, &ihi)
    }

    /// Cells all of whose corner nodes are in `nodes`.
    pub fn from_nodes(grid: &Arc<ChartGrid>, nodes: &[bool]) -> Self {
        let offs = grid.corner_offsets();
        let mask = (0..grid.cell_count())
            .map(|c| {
                let b = grid.cell_base_node(c);
                offs.iter().all(|o| nodes[b + o])
            })
            .collect();
        Self { grid: grid.clone(), mask }
    }

    fn from_cell_multi(grid: &Arc<ChartGrid>, pred: impl Fn(&[usize]) -> bool) -> Self {
        let mask = (0..grid.cell_count()).map(|c| pred(&grid.cell_multi(c))).collect();
        Self { grid: grid.clone(), mask }
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.mask[cell]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(c, _)| c)
    }

    pub fn volume(&self) -> f64 {
        self.len() as f64 * self.grid.cell_volume()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert!(self.grid.same_as(&other.grid), "cell sets on different grids");
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid.clone(), mask }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    /// Nodes touched by at least one cell of the set.
    pub fn node_mask(&self) -> Vec<bool> {
        let offs = self.grid.corner_offsets();
        let mut nodes = vec![false; self.grid.node_count()];
        for c in self.cells() {
            let b = self.grid.cell_base_node(c);
            for o in &offs {
                nodes[b + o] = true;
            }
        }
        nodes
    }

    /// Whether the closed sets share at least one node.
    pub fn shares_nodes_with(&self, other: &Self) -> bool {
        let a = self.node_mask();
        let b = other.node_mask();
        a.iter().zip(&b).any(|(&x, &y)| x && y)
    }

    /// Cells of the set at cell-distance ≥ `layers` from its complement
    /// (face and corner neighbours count).
    pub fn inset(&self, layers: usize) -> Self {
        let mut cur = self.clone();
        let n = self.grid.dim();
        let cs = self.grid.cell_shape();
        for _ in 0..layers {
            let mut next = cur.mask.clone();
            for c in cur.cells() {
                let m = self.grid.cell_multi(c);
                let mut keep = true;
                'nb: for bits in 0..3usize.pow(n as u32) {
                    let mut t = bits;
                    let mut nb = m.clone();
                    for a in 0..n {
                        let d = t % 3;
                        t /= 3;
                        if d == 0 && nb[a] == 0 || d == 2 && nb[a] + 1 >= cs[a] {
                            keep = false;
                            break 'nb;
                        }
                        nb[a] = nb[a] + d - 1;
                    }
                    if !cur.mask[self.grid.cell_index(&nb)] {
                        keep = false;
                        break;
                    }
                }
                next[c] = keep;
            }
            cur.mask = next;
        }
        cur
    }

    /// Faces separating a cell of the set from a cell outside it (or from
    /// the outside of the grid).
    pub fn boundary_faces(&self) -> Vec<Face> {
        let n = self.grid.dim();
        let cs = self.grid.cell_shape();
        let mut out = Vec::new();
        for c in self.cells() {
            let m = self.grid.cell_multi(c);
            for axis in 0..n {
                for upper in [false, true] {
                    let outside = if upper { m[axis] + 1 >= cs[axis] } else { m[axis] == 0 };
                    let open = outside || {
                        let mut nb = m.clone();
                        if upper {
                            nb[axis] += 1
                        } else {
                            nb[axis] -= 1
                        }
                        !self.mask[self.grid.cell_index(&nb)]
                    };
                    if open {
                        out.push(Face { cell: c, axis, upper });
                    }
                }
            }
        }
        out
    }

    /// Corner nodes of `face`, ordered by the bits of the remaining axes.
    pub fn face_nodes(&self, face: &Face) -> Vec<usize> {
        let g = &self.grid;
        let n = g.dim();
        let base = g.cell_base_node(face.cell) + if face.upper { g.strides()[face.axis] } else { 0 };
        let others: Vec<usize> = (0..n).filter(|&a| a != face.axis).collect();
        (0..1usize << others.len())
            .map(|bits| {
                base + others
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| bits >> j & 1 == 1)
                    .map(|(_, &a)| g.strides()[a])
                    .sum::<usize>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<ChartGrid> {
        ChartGrid::uniform(vec![0.0, 0.0], 0.1, vec![11, 11]).unwrap()
    }

    #[test]
    fn coord_box_selects_cells() {
        let g = grid();
        let s = CellSet::coord_box(&g, &[0.2, 0.0], &[0.5, 1.0]);
        assert_eq!(s.len(), 30);
        assert!((s.volume() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_box_has_perimeter_faces() {
        let g = grid();
        let s = CellSet::node_box(&g, &[2, 3], &[5, 7]);
        assert_eq!(s.boundary_faces().len(), 2 * (3 + 4));
        let inner = s.inset(1);
        assert_eq!(inner.len(), 2);
    }

    #[test]
    fn disjoint_sets_share_no_nodes() {
        let g = grid();
        let a = CellSet::node_box(&g, &[0, 0], &[3, 3]);
        let b = CellSet::node_box(&g, &[4, 0], &[6, 3]);
        let c = CellSet::node_box(&g, &[3, 0], &[6, 3]);
        assert!(!a.shares_nodes_with(&b));
        assert!(a.shares_nodes_with(&c));
    }
}
