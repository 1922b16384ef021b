//! Reverse Cuthill-McKee ordering and symmetric permutation.
//!
//! RCM runs on the undirected graph of `A + A^T`. Each connected component
//! starts from a pseudo-peripheral node (George-Liu) and is traversed
//! breadth-first, visiting unvisited neighbors by ascending degree with ties
//! broken by ascending index. Components are emitted by ascending index of
//! their start node and the concatenated order is reversed at the end.

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::width::{IndexType, Scalar};

/// A bijection on `[0, n)`. `perm[new] = old`, `inv[old] = new`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            perm: (0..n).collect(),
            inv: (0..n).collect(),
        }
    }

    /// Builds from a new-to-old map, rejecting anything that is not a bijection.
    pub fn from_vec(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inv = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= n {
                return Err(Error::InvalidPermutation(format!(
                    "index {old} out of range for length {n}"
                )));
            }
            if inv[old] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "index {old} appears twice"
                )));
            }
            inv[old] = new;
        }
        Ok(Permutation { perm, inv })
    }

    pub fn reversal(n: usize) -> Self {
        Permutation::from_vec((0..n).rev().collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// New-to-old map.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Old-to-new map.
    pub fn inv(&self) -> &[usize] {
        &self.inv
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            perm: self.inv.clone(),
            inv: self.perm.clone(),
        }
    }

    /// `out[i] = x[perm[i]]`.
    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(
            x.len(),
            self.len(),
            "vector length must match the permutation"
        );
        self.perm.iter().map(|&old| x[old]).collect()
    }

    /// Checks `inv[perm[i]] == i` for all `i`.
    pub fn is_valid(&self) -> bool {
        self.perm.len() == self.inv.len()
            && self
                .perm
                .iter()
                .enumerate()
                .all(|(i, &p)| p < self.inv.len() && self.inv[p] == i)
    }
}

/// Undirected graph in compressed adjacency form, neighbor lists sorted and
/// free of self-loops and duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    xadj: Vec<usize>,
    adj: Vec<usize>,
}

impl Adjacency {
    pub fn len(&self) -> usize {
        self.xadj.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.xadj[v]..self.xadj[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }
}

/// Pattern of `A + A^T` without the diagonal.
pub fn symmetrized_adjacency<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
) -> Result<Adjacency> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut counts = vec![0usize; n + 1];
    for (r, c, _) in a.iter() {
        if r != c {
            counts[r + 1] += 1;
            counts[c + 1] += 1;
        }
    }
    for v in 0..n {
        counts[v + 1] += counts[v];
    }
    let mut fill = counts.clone();
    let mut adj = vec![0usize; counts[n]];
    for (r, c, _) in a.iter() {
        if r != c {
            adj[fill[r]] = c;
            fill[r] += 1;
            adj[fill[c]] = r;
            fill[c] += 1;
        }
    }

    // sort and dedup each list, compacting in place
    let mut xadj = Vec::with_capacity(n + 1);
    xadj.push(0);
    let mut write = 0;
    for v in 0..n {
        let (start, end) = (counts[v], counts[v + 1]);
        adj[start..end].sort_unstable();
        let mut prev = usize::MAX;
        for k in start..end {
            let u = adj[k];
            if u != prev {
                adj[write] = u;
                write += 1;
                prev = u;
            }
        }
        xadj.push(write);
    }
    adj.truncate(write);
    Ok(Adjacency { xadj, adj })
}

/// Breadth-first level structure rooted at one node.
struct Levels {
    order: Vec<usize>,
    /// `order[bounds[l]..bounds[l + 1]]` is level `l`.
    bounds: Vec<usize>,
}

impl Levels {
    fn depth(&self) -> usize {
        self.bounds.len() - 1
    }

    fn last(&self) -> &[usize] {
        let l = self.depth() - 1;
        &self.order[self.bounds[l]..self.bounds[l + 1]]
    }
}

fn rooted_levels(g: &Adjacency, root: usize, stamp: &mut [u32], epoch: u32) -> Levels {
    let mut order = vec![root];
    let mut bounds = vec![0, 1];
    stamp[root] = epoch;
    let mut head = 0;
    loop {
        let level_end = order.len();
        while head < level_end {
            let v = order[head];
            head += 1;
            for &u in g.neighbors(v) {
                if stamp[u] != epoch {
                    stamp[u] = epoch;
                    order.push(u);
                }
            }
        }
        if order.len() == level_end {
            break;
        }
        bounds.push(order.len());
    }
    Levels { order, bounds }
}

fn min_degree_node(g: &Adjacency, nodes: &[usize]) -> usize {
    *nodes
        .iter()
        .min_by_key(|&&v| (g.degree(v), v))
        .expect("level is never empty")
}

/// George-Liu pseudo-peripheral node search within the component of `seed`.
fn pseudo_peripheral(g: &Adjacency, seed: usize, stamp: &mut [u32], epoch: &mut u32) -> usize {
    let mut root = seed;
    *epoch += 1;
    let mut levels = rooted_levels(g, root, stamp, *epoch);
    loop {
        let candidate = min_degree_node(g, levels.last());
        *epoch += 1;
        let next = rooted_levels(g, candidate, stamp, *epoch);
        if next.depth() > levels.depth() {
            root = candidate;
            levels = next;
        } else {
            return root;
        }
    }
}

/// Reverse Cuthill-McKee permutation of a square matrix.
pub fn rcm<O: IndexType, I: IndexType, S: Scalar>(a: &CsrMatrix<O, I, S>) -> Result<Permutation> {
    let g = symmetrized_adjacency(a)?;
    Ok(rcm_graph(&g))
}

pub fn rcm_graph(g: &Adjacency) -> Permutation {
    let n = g.len();
    let mut stamp = vec![0u32; n];
    let mut epoch = 0u32;

    // component discovery; seed each with its minimum-degree node
    let mut component = vec![usize::MAX; n];
    let mut starts = Vec::new();
    for v in 0..n {
        if component[v] != usize::MAX {
            continue;
        }
        let id = starts.len();
        epoch += 1;
        let levels = rooted_levels(g, v, &mut stamp, epoch);
        for &u in &levels.order {
            component[u] = id;
        }
        let seed = min_degree_node(g, &levels.order);
        starts.push(pseudo_peripheral(g, seed, &mut stamp, &mut epoch));
    }
    starts.sort_unstable();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut candidates = Vec::new();
    for start in starts {
        visited[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            candidates.clear();
            candidates.extend(g.neighbors(v).iter().copied().filter(|&u| !visited[u]));
            candidates.sort_unstable_by_key(|&u| (g.degree(u), u));
            for &u in &candidates {
                visited[u] = true;
                order.push(u);
            }
        }
    }
    order.reverse();
    Permutation::from_vec(order).expect("BFS visits every node exactly once")
}

/// `P A P^T`: entry `(r, c)` of the result is `a(perm[r], perm[c])`.
pub fn permute_symmetric<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
    p: &Permutation,
) -> Result<CsrMatrix<O, I, S>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    if p.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} for a {}x{} matrix",
            p.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let mut rowptr = Vec::with_capacity(n + 1);
    let mut colids = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    let mut row: Vec<(usize, S)> = Vec::new();
    rowptr.push(O::try_from_usize(0).unwrap());
    for &old_row in p.perm() {
        let (cols, vals) = a.row(old_row);
        row.clear();
        row.extend(
            cols.iter()
                .zip(vals)
                .map(|(c, &v)| (p.inv()[c.as_usize()], v)),
        );
        row.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in &row {
            colids.push(I::try_from_usize(c).unwrap());
            values.push(v);
        }
        rowptr.push(O::try_from_usize(colids.len()).unwrap());
    }
    Ok(CsrMatrix::from_parts_unchecked(
        n, n, rowptr, colids, values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csr::Bandwidth;
    use crate::triplet::TripletMatrix;

    type Csr = CsrMatrix<i32, i32, f64>;

    fn example_one() -> Csr {
        let t = TripletMatrix::from_entries(
            4,
            4,
            vec![
                (0, 0, 1.0),
                (1, 2, 2.0),
                (2, 1, 3.0),
                (2, 3, 4.0),
                (3, 3, 5.0),
            ],
        )
        .unwrap();
        Csr::from_triplets(&t).unwrap()
    }

    fn symmetric(n: usize, edges: &[(usize, usize)]) -> Csr {
        let mut t = TripletMatrix::new(n, n);
        for v in 0..n {
            t.push(v, v, 4.0).unwrap();
        }
        for &(a, b) in edges {
            t.push(a, b, -1.0).unwrap();
            t.push(b, a, -1.0).unwrap();
        }
        Csr::from_triplets(&t).unwrap()
    }

    #[test]
    fn adjacency_of_example_one() {
        let g = symmetrized_adjacency(&example_one()).unwrap();
        assert_eq!(g.neighbors(0), &[] as &[usize]);
        assert_eq!(g.neighbors(1), &[2]);
        assert_eq!(g.neighbors(2), &[1, 3]);
        assert_eq!(g.neighbors(3), &[2]);
    }

    #[test]
    fn adjacency_of_diagonal_is_empty() {
        let g = symmetrized_adjacency(&Csr::identity(6).unwrap()).unwrap();
        assert!((0..6).all(|v| g.degree(v) == 0));
    }

    #[test]
    fn adjacency_of_symmetric_matches_pattern() {
        let a = symmetric(5, &[(0, 3), (1, 4), (3, 4)]);
        let g = symmetrized_adjacency(&a).unwrap();
        for r in 0..5 {
            let off: Vec<usize> = a
                .row(r)
                .0
                .iter()
                .map(|&c| c as usize)
                .filter(|&c| c != r)
                .collect();
            assert_eq!(g.neighbors(r), off.as_slice());
        }
    }

    #[test]
    fn rejects_non_square() {
        let a = Csr::empty(2, 3).unwrap();
        assert!(matches!(rcm(&a), Err(Error::NotSquare { .. })));
        assert!(matches!(
            symmetrized_adjacency(&a),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            permute_symmetric(&a, &Permutation::identity(2)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn scrambled_path_gets_bandwidth_one() {
        let a = symmetric(5, &[(0, 2), (2, 4), (4, 1), (1, 3)]);
        assert_eq!(a.bandwidth(), Bandwidth(3));
        let p = rcm(&a).unwrap();
        assert!(p.is_valid());
        assert_eq!(permute_symmetric(&a, &p).unwrap().bandwidth(), Bandwidth(1));
    }

    #[test]
    fn diagonal_stays_diagonal() {
        let a = Csr::identity(7).unwrap();
        let p = rcm(&a).unwrap();
        assert!(p.is_valid());
        assert_eq!(permute_symmetric(&a, &p).unwrap().bandwidth(), Bandwidth(0));
    }

    #[test]
    fn disconnected_components_are_ordered_and_reversed() {
        // components {0, 3} and {1, 2, 4}; path 1-4-2 starts at an end node
        let a = symmetric(5, &[(0, 3), (1, 4), (4, 2)]);
        let p = rcm(&a).unwrap();
        // pseudo-peripheral starts: 0 for {0,3}, 1 for the path; CM order
        // 0 3 1 4 2, reversed
        assert_eq!(p.perm(), &[2, 4, 1, 3, 0]);
        assert_eq!(permute_symmetric(&a, &p).unwrap().bandwidth(), Bandwidth(1));
    }

    #[test]
    fn identity_permutation_is_noop() {
        let a = example_one();
        assert_eq!(permute_symmetric(&a, &Permutation::identity(4)).unwrap(), a);
    }

    #[test]
    fn reversal_is_an_involution() {
        let a = example_one();
        let r = Permutation::reversal(4);
        let once = permute_symmetric(&a, &r).unwrap();
        assert_ne!(once, a);
        assert_eq!(permute_symmetric(&once, &r).unwrap(), a);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::from_vec(vec![1, 0, 2]).is_ok());
        assert!(Permutation::from_vec(vec![1, 1, 2]).is_err());
        assert!(Permutation::from_vec(vec![0, 3, 1]).is_err());
        let p = Permutation::from_vec(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inv(), &[1, 2, 0]);
        assert_eq!(p.apply(&[10, 20, 30]), vec![30, 10, 20]);
        assert_eq!(p.inverse().inverse(), p);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            permute_symmetric(&example_one(), &Permutation::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
