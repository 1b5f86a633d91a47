//! Square nonnegative integer matrices, generic over the entry type.
//!
//! Used for transition matrices: entry `(i, j)` counts occurrences of `E_i`
//! and `Ē_i` in the image of `E_j`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::scalar::Count;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Count> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, data: rows.into_iter().flatten().collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Product `self · other`; `None` on overflow.
    pub fn checked_mul(&self, other: &Matrix<T>) -> Option<Matrix<T>> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.checked_mul(b)?;
                    let cell = &mut out.data[i * n + j];
                    *cell = cell.checked_add(&prod)?;
                }
            }
        }
        Some(out)
    }

    pub fn checked_pow(&self, p: u32) -> Option<Matrix<T>> {
        let mut out = Self::identity(self.n);
        for _ in 0..p {
            out = out.checked_mul(self)?;
        }
        Some(out)
    }

    pub fn column_sum(&self, j: usize) -> Option<T> {
        (0..self.n).try_fold(T::zero(), |acc, i| acc.checked_add(self.get(i, j)))
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| !x.is_zero())
    }

    pub fn map<U: Count>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    /// Directed graph with an arc `j → i` whenever entry `(i, j)` is positive.
    fn support_graph(&self) -> DiGraph<usize, ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<_> = (0..self.n).map(|i| g.add_node(i)).collect();
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.get(i, j).is_zero() {
                    g.add_edge(nodes[j], nodes[i], ());
                }
            }
        }
        g
    }

    /// Strong connectivity of the support graph; equivalently, every pair
    /// `(i, j)` has a positive entry in some power `p ≥ 1`.
    pub fn is_irreducible(&self) -> bool {
        self.n > 0 && tarjan_scc(&self.support_graph()).len() == 1 && (self.n > 1 || !self.get(0, 0).is_zero())
    }

    /// Whether column sums of `Mⁿ` grow without bound, per column.
    ///
    /// Column sums are nondecreasing when every column is nonzero, and when
    /// bounded they are constant from `n = r` on; unbounded ones strictly grow
    /// between `n = r` and `n = 2r² + r`. Computed exactly in `BigUint`.
    pub fn growing_columns(&self) -> Vec<bool> {
        let n = self.n;
        let big: Vec<BigUint> = self.data.iter().map(|x| x.to_biguint().expect("nonnegative")).collect();
        let lo = n;
        let hi = 2 * n * n + n;
        // row vector 1ᵀ Mᵏ
        let mut v: Vec<BigUint> = vec![BigUint::from(1u32); n];
        let mut at_lo = v.clone();
        for k in 1..=hi {
            let mut next = vec![BigUint::from(0u32); n];
            for (j, slot) in next.iter_mut().enumerate() {
                for (i, vi) in v.iter().enumerate() {
                    let e = &big[i * n + j];
                    if *e != BigUint::from(0u32) {
                        *slot += vi * e;
                    }
                }
            }
            v = next;
            if k == lo {
                at_lo = v.clone();
            }
        }
        (0..n).map(|j| v[j] > at_lo[j]).collect()
    }

    pub fn all_columns_grow(&self) -> bool {
        self.n > 0 && self.growing_columns().into_iter().all(|g| g)
    }

    /// Strongly connected components of the support graph, as sorted index sets.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let g = self.support_graph();
        let mut out: Vec<BTreeSet<usize>> =
            tarjan_scc(&g).into_iter().map(|c| c.into_iter().map(|ix| g[ix]).collect()).collect();
        out.sort();
        out
    }
}

impl<T: Count + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl<T: Count> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}
