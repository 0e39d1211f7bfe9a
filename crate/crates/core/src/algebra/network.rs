//! Network matrix `G`, its I/O matrix `T = (I - G)^-1`, and `S = T^-1`.

use std::collections::BTreeMap;

use rand::Rng;

use super::linalg::Matrix;
use crate::emp::Emp;
use crate::error::EmpError;
use crate::graph::Dag;
use crate::scalar::Scalar;

/// Strictly lower-triangular network matrix holding one value per edge.
/// Entries are keyed `(row, col)` with 1-based indices, `row > col`.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix<S> {
    n: usize,
    entries: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> GMatrix<S> {
    /// One value per structural edge, produced by `weight(row, col)`.
    pub fn from_fn(dag: &Dag, mut weight: impl FnMut(usize, usize) -> S) -> Self {
        let entries = dag.g_entries().map(|(l, j)| ((l, j), weight(l, j))).collect();
        GMatrix { n: dag.n(), entries }
    }

    /// Random instantiation following [`sample_weight`].
    pub fn random<R: Rng + ?Sized>(dag: &Dag, rng: &mut R) -> Self {
        Self::from_fn(dag, |_, _| sample_weight(rng))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &S)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    /// `true` when the sparsity pattern is exactly the edge set of `dag`.
    pub fn matches(&self, dag: &Dag) -> bool {
        self.n == dag.n() && self.entries.keys().copied().eq(dag.g_entries().collect::<std::collections::BTreeSet<_>>())
    }

    /// A sampled weight that came out as zero makes the draw non-generic.
    pub fn is_degenerate(&self) -> bool {
        self.entries.values().any(|v| v.is_negligible())
    }

    /// Dense `I - G`.
    pub fn i_minus_g(&self) -> Matrix<S> {
        let mut m = Matrix::identity(self.n);
        for (&(l, j), v) in &self.entries {
            m[(l - 1, j - 1)] = -v.clone();
        }
        m
    }
}

/// Unit lower-triangular matrix (`T`, or `S = T^-1`), 1-based accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitLower<S> {
    n: usize,
    data: Vec<S>,
}

pub type TMatrix<S> = UnitLower<S>;

impl<S: Scalar> UnitLower<S> {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![S::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = S::one();
        }
        UnitLower { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[(row - 1) * self.n + (col - 1)]
    }

    fn set(&mut self, row: usize, col: usize, value: S) {
        debug_assert!(row > col);
        self.data[(row - 1) * self.n + (col - 1)] = value;
    }

    pub fn to_dense(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, self.n, |r, c| self.data[r * self.n + c].clone())
    }

    /// Selection `C T B`: rows are the measured nodes, columns the excited
    /// nodes, both in increasing index order.
    pub fn select(&self, emp: &Emp) -> Result<Matrix<S>, EmpError> {
        emp.check_nodes(self.n)?;
        if emp.excited.is_empty() || emp.measured.is_empty() {
            return Err(EmpError::EmptySelection);
        }
        let rows: Vec<usize> = emp.measured.iter().copied().collect();
        let cols: Vec<usize> = emp.excited.iter().copied().collect();
        Ok(Matrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone()))
    }
}

/// `T = (I - G)^-1` through the row recursion `T[l,j] = sum_{i=j}^{l-1} G[l,i] T[i,j]`.
pub fn compute_t<S: Scalar>(g: &GMatrix<S>) -> TMatrix<S> {
    let n = g.n;
    let mut row_entries: Vec<Vec<(usize, S)>> = vec![Vec::new(); n + 1];
    for (&(l, i), v) in &g.entries {
        row_entries[l].push((i, v.clone()));
    }
    let mut t: TMatrix<S> = UnitLower::identity(n);
    for (l, row) in row_entries.iter().enumerate().skip(2) {
        for j in 1..l {
            let mut acc = S::zero();
            for (i, gli) in row {
                if *i >= j {
                    let tij = t.get(*i, j);
                    if !tij.is_zero() {
                        acc = acc + gli.clone() * tij.clone();
                    }
                }
            }
            t.set(l, j, acc);
        }
    }
    t
}

/// `T` through the column recursion `T[l,j] = sum_{i=j+1}^{l} T[l,i] G[i,j]`,
/// filling columns from right to left.
pub fn compute_t_by_columns<S: Scalar>(g: &GMatrix<S>) -> TMatrix<S> {
    let n = g.n;
    let mut col_entries: Vec<Vec<(usize, S)>> = vec![Vec::new(); n + 1];
    for (&(i, j), v) in &g.entries {
        col_entries[j].push((i, v.clone()));
    }
    let mut t: TMatrix<S> = UnitLower::identity(n);
    for j in (1..n).rev() {
        for l in j + 1..=n {
            let mut acc = S::zero();
            for (i, gij) in &col_entries[j] {
                if *i <= l {
                    let tli = t.get(l, *i);
                    if !tli.is_zero() {
                        acc = acc + tli.clone() * gij.clone();
                    }
                }
            }
            t.set(l, j, acc);
        }
    }
    t
}

/// Inverse of a unit lower-triangular matrix by forward substitution on
/// `T S = I`.
pub fn compute_s<S: Scalar>(t: &TMatrix<S>) -> UnitLower<S> {
    let n = t.n;
    let mut s: UnitLower<S> = UnitLower::identity(n);
    for l in 2..=n {
        for j in (1..l).rev() {
            let mut acc = t.get(l, j).clone();
            for i in j + 1..l {
                let tli = t.get(l, i);
                if !tli.is_zero() {
                    acc = acc + tli.clone() * s.get(i, j).clone();
                }
            }
            s.set(l, j, -acc);
        }
    }
    s
}

/// Input-output matrix `M = C T B` for a network and an EMP.
pub fn compute_m<S: Scalar>(g: &GMatrix<S>, emp: &Emp) -> Result<Matrix<S>, EmpError> {
    compute_t(g).select(emp)
}

/// Weight at a generic point: numerator magnitude uniform in `[10^3, 10^6]`
/// with a random sign, denominator uniform in `[1, 10^3]`.
pub fn sample_weight<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    loop {
        let magnitude: i64 = rng.random_range(1_000..=1_000_000);
        let numer = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        let denom: i64 = rng.random_range(1..=1_000);
        let w = S::from_ratio(numer, denom);
        if !w.is_negligible() {
            return w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::figure_one as fig1;
    use crate::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_edges_gives_identity() {
        let dag = Dag::from_lower_pattern(3, &[]);
        let g = GMatrix::<Rational>::from_fn(&dag, |_, _| unreachable!());
        assert_eq!(compute_t(&g), UnitLower::identity(3));
        assert_eq!(compute_s(&UnitLower::<Rational>::identity(3)), UnitLower::identity(3));
    }

    #[test]
    fn two_node_chain() {
        let dag = Dag::from_lower_pattern(2, &[(2, 1)]);
        let g = GMatrix::from_fn(&dag, |_, _| Rational::from_ratio(7, 3));
        assert_eq!(compute_t(&g).get(2, 1), &Rational::from_ratio(7, 3));
    }

    #[test]
    fn figure_one_products_are_identity() {
        let dag = fig1();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g: GMatrix<Rational> = GMatrix::random(&dag, &mut rng);
        assert!(g.matches(&dag));
        let t = compute_t(&g).to_dense();
        let img = g.i_minus_g();
        assert_eq!(img.mul(&t), Matrix::identity(7));
        assert_eq!(t.mul(&img), Matrix::identity(7));
    }

    #[test]
    fn s_is_i_minus_g() {
        let dag = fig1();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g: GMatrix<Rational> = GMatrix::random(&dag, &mut rng);
        let s = compute_s(&compute_t(&g));
        for l in 2..=7 {
            for j in 1..l {
                let expected = -g.get(l, j);
                assert_eq!(s.get(l, j), &expected, "S[{l},{j}]");
            }
        }
    }

    #[test]
    fn three_node_inverse_by_hand() {
        let dag = Dag::from_lower_pattern(3, &[(2, 1), (3, 1), (3, 2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g: GMatrix<Rational> = GMatrix::random(&dag, &mut rng);
        let t = compute_t(&g);
        let s = compute_s(&t);
        let hand = -(t.get(3, 1).clone() - t.get(3, 2).clone() * t.get(2, 1).clone());
        assert_eq!(s.get(3, 1), &hand);
    }

    #[test]
    fn float_scalars_follow_the_same_recursions() {
        let dag = fig1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g: GMatrix<f64> = GMatrix::from_fn(&dag, |_, _| rng.random_range(-1.0..1.0));
        let s = compute_s(&compute_t(&g));
        for ((l, j), v) in g.entries() {
            assert!((s.get(l, j) + v).abs() < 1e-12);
        }
    }

    #[test]
    fn selection() {
        let dag = fig1();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g: GMatrix<Rational> = GMatrix::random(&dag, &mut rng);
        let t = compute_t(&g);
        let all = Emp::new(1..=7, 1..=7);
        assert_eq!(compute_m(&g, &all).unwrap(), t.to_dense());
        let single = compute_m(&g, &Emp::new([1], [7])).unwrap();
        assert_eq!((single.rows(), single.cols()), (1, 1));
        assert_eq!(&single[(0, 0)], t.get(7, 1));
        assert_eq!(compute_m(&g, &Emp::new([], [7])), Err(EmpError::EmptySelection));
    }

    #[test]
    fn sampled_weights_are_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let w: Rational = sample_weight(&mut rng);
            assert!(!w.is_negligible());
            let mag = num_traits::Signed::abs(&w);
            assert!(mag >= Rational::from_ratio(1, 1) && mag <= Rational::from_ratio(1_000_000, 1));
        }
    }
}
