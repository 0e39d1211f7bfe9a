//! Explicit expansion of `G = I - T^-1` entries as signed sums of products of
//! `T` entries.
//!
//! Repeatedly substituting `G[i,j] = T[i,j] - sum_i' T[i,i'] G[i',j]` into
//! itself ends in one monomial per chain `j = i0 < i1 < ... < ik = l` whose
//! intermediate vertices are all out-neighbors of `j`:
//! `(-1)^(k+1) T[l,i(k-1)] ... T[i2,i1] T[i1,j]`. Monomials containing a
//! structurally zero `T` factor (no path between its endpoints) are dropped.

use std::fmt;

use super::network::TMatrix;
use crate::error::AlgebraError;
use crate::graph::Dag;
use crate::scalar::Scalar;

/// One signed product of `T` entries along an increasing vertex chain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Vertex chain from the column index up to the row index.
    pub chain: Vec<usize>,
    /// `+1` or `-1`.
    pub sign: i8,
}

impl Monomial {
    /// Factors `(row, col)` from the outermost `T[l, .]` inwards.
    pub fn factors(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.chain.windows(2).rev().map(|w| (w[1], w[0]))
    }

    pub fn degree(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn eval<S: Scalar>(&self, t: &TMatrix<S>) -> S {
        let prod = self.factors().fold(S::one(), |acc, (r, c)| acc * t.get(r, c).clone());
        if self.sign < 0 {
            -prod
        } else {
            prod
        }
    }

    fn flipped(&self) -> Monomial {
        Monomial { chain: self.chain.clone(), sign: -self.sign }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign < 0 { "-" } else { "+" })?;
        for (r, c) in self.factors() {
            write!(f, "T[{r},{c}]")?;
        }
        Ok(())
    }
}

fn write_sum(f: &mut fmt::Formatter<'_>, terms: &[Monomial]) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str(" 0");
    }
    for m in terms {
        write!(f, " {m}")?;
    }
    Ok(())
}

/// `G[l,j]` (or zero, for a structural zero) as a signed sum of monomials,
/// ordered by degree and then by vertex chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainExpansion {
    pub target: (usize, usize),
    pub monomials: Vec<Monomial>,
}

impl ChainExpansion {
    pub fn eval<S: Scalar>(&self, t: &TMatrix<S>) -> S {
        self.monomials.iter().fold(S::zero(), |acc, m| acc + m.eval(t))
    }

    /// `(row, col)` of every `T` factor appearing anywhere in the expansion.
    pub fn t_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.monomials.iter().flat_map(|m| m.factors())
    }
}

impl fmt::Display for ChainExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[{},{}] =", self.target.0, self.target.1)?;
        write_sum(f, &self.monomials)
    }
}

/// Relation `T[l,j] = sum of monomials` implied by a structural zero `G[l,j] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroConstraint {
    pub target: (usize, usize),
    pub rhs: Vec<Monomial>,
}

impl ZeroConstraint {
    pub fn eval_rhs<S: Scalar>(&self, t: &TMatrix<S>) -> S {
        self.rhs.iter().fold(S::zero(), |acc, m| acc + m.eval(t))
    }
}

impl fmt::Display for ZeroConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T[{},{}] =", self.target.0, self.target.1)?;
        write_sum(f, &self.rhs)
    }
}

/// Chain expansion of `G[l,j]`, `l > j`. The target may be an edge or a
/// structural zero; the expansion is empty when `j` does not reach `l`.
pub fn chain_expand(dag: &Dag, (l, j): (usize, usize)) -> Result<ChainExpansion, AlgebraError> {
    if !(1 <= j && j < l && l <= dag.n()) {
        return Err(AlgebraError::NotLowerTriangular(l, j));
    }
    let mut monomials = Vec::new();
    if dag.reaches(j, l) {
        let hops: Vec<usize> = dag.out_neighbors(j).iter().copied().filter(|&i| i < l && dag.reaches(i, l)).collect();
        let mut chain = vec![j];
        extend_chains(dag, l, &hops, &mut chain, &mut monomials);
    }
    monomials.sort_by(|a, b| (a.chain.len(), &a.chain).cmp(&(b.chain.len(), &b.chain)));
    Ok(ChainExpansion { target: (l, j), monomials })
}

fn extend_chains(dag: &Dag, l: usize, hops: &[usize], chain: &mut Vec<usize>, out: &mut Vec<Monomial>) {
    let last = *chain.last().unwrap();
    // close the chain at l
    let k = chain.len();
    let mut closed = chain.clone();
    closed.push(l);
    out.push(Monomial { chain: closed, sign: if k % 2 == 1 { 1 } else { -1 } });
    for &i in hops.iter().filter(|&&i| i > last) {
        if dag.reaches(last, i) {
            chain.push(i);
            extend_chains(dag, l, hops, chain, out);
            chain.pop();
        }
    }
}

/// Rearranges the vanishing chain sum of a structural zero `(l, j)` into an
/// expression for `T[l,j]`.
pub fn zero_constraint(dag: &Dag, (l, j): (usize, usize)) -> Result<ZeroConstraint, AlgebraError> {
    let expansion = chain_expand(dag, (l, j))?;
    if dag.is_g_entry(l, j) {
        return Err(AlgebraError::NotAStructuralZero(l, j));
    }
    if expansion.monomials.is_empty() {
        return Err(AlgebraError::NoChainExists(l, j));
    }
    let rhs = expansion.monomials.iter().filter(|m| m.degree() > 1).map(Monomial::flipped).collect();
    Ok(ZeroConstraint { target: (l, j), rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::network::{compute_t, GMatrix};
    use crate::networks::{figure_one, path};
    use crate::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn g73_golden() {
        let e = chain_expand(&figure_one(), (7, 3)).unwrap();
        assert_eq!(e.to_string(), "G[7,3] = +T[7,3] -T[7,4]T[4,3] -T[7,5]T[5,3] +T[7,5]T[5,4]T[4,3]");
    }

    #[test]
    fn figure_one_explicit_solution() {
        let dag = figure_one();
        let text = |l, j| chain_expand(&dag, (l, j)).unwrap().to_string();
        assert_eq!(text(3, 1), "G[3,1] = +T[3,1] -T[3,2]T[2,1]");
        assert_eq!(text(4, 2), "G[4,2] = +T[4,2] -T[4,3]T[3,2]");
        assert_eq!(text(5, 3), "G[5,3] = +T[5,3] -T[5,4]T[4,3]");
        assert_eq!(text(7, 4), "G[7,4] = +T[7,4] -T[7,5]T[5,4]");
        // T[7,6] vanishes structurally
        assert_eq!(text(7, 5), "G[7,5] = +T[7,5]");
        assert_eq!(text(6, 5), "G[6,5] = +T[6,5]");
    }

    #[test]
    fn single_edge() {
        let e = chain_expand(&path(2), (2, 1)).unwrap();
        assert_eq!(e.to_string(), "G[2,1] = +T[2,1]");
    }

    #[test]
    fn g52_zero_constraint() {
        let dag = figure_one();
        let z = zero_constraint(&dag, (5, 2)).unwrap();
        assert_eq!(z.to_string(), "T[5,2] = +T[5,3]T[3,2] +T[5,4]T[4,2] -T[5,4]T[4,3]T[3,2]");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let t = compute_t(&GMatrix::<Rational>::random(&dag, &mut rng));
            assert_eq!(z.eval_rhs(&t), *t.get(5, 2));
        }
    }

    #[test]
    fn g61_zero_constraint_holds() {
        let dag = figure_one();
        let z = zero_constraint(&dag, (6, 1)).unwrap();
        assert_eq!(z.to_string(), "T[6,1] = +T[6,2]T[2,1] +T[6,3]T[3,1] -T[6,3]T[3,2]T[2,1]");
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = compute_t(&GMatrix::<Rational>::random(&dag, &mut rng));
        assert_eq!(z.eval_rhs(&t), *t.get(6, 1));
    }

    #[test]
    fn zero_constraint_errors() {
        let dag = figure_one();
        assert_eq!(zero_constraint(&dag, (7, 6)), Err(AlgebraError::NoChainExists(7, 6)));
        assert_eq!(zero_constraint(&dag, (7, 3)), Err(AlgebraError::NotAStructuralZero(7, 3)));
        assert_eq!(chain_expand(&dag, (3, 7)), Err(AlgebraError::NotLowerTriangular(3, 7)));
        assert!(chain_expand(&dag, (7, 6)).unwrap().monomials.is_empty());
    }

    #[test]
    fn expansion_signs_follow_degree() {
        let dag = figure_one();
        for l in 2..=7 {
            for j in 1..l {
                for m in chain_expand(&dag, (l, j)).unwrap().monomials {
                    assert_eq!(m.sign, if m.degree() % 2 == 1 { 1 } else { -1 });
                    assert!(m.chain.windows(2).all(|w| w[0] < w[1]));
                    assert_eq!((m.chain[0], *m.chain.last().unwrap()), (j, l));
                }
            }
        }
    }
}
