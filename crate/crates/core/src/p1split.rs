//! Splitting types on P^1. A restricted monad A → B → C is reduced to the
//! two-term presentation A → ker β ≅ ⊕O(k_i), whose H^0 is exact; the
//! splitting is read off the first differences of h^0(E(t)).

use std::fmt;

use crate::cohomology::hypercoh;
use crate::complex::{self, form_matrix_zero, FormMatrix, MonadSpec};
use crate::field::Field;
use crate::graded::{self, dim_s, Form};
use crate::matrix::{self, Mat};
use crate::Error;

/// Degrees a_1 ≥ … ≥ a_r of E ≅ ⊕O(a_i) on P^1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Splitting(pub Vec<i64>);

impl Splitting {
    pub fn new(mut parts: Vec<i64>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Splitting(parts)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn dual(&self) -> Self {
        Splitting::new(self.0.iter().map(|a| -a).collect())
    }

    /// h^0(⊕O(a_i + t)).
    pub fn h0(&self, t: i64) -> usize {
        self.0.iter().map(|a| (a + t + 1).max(0) as usize).sum()
    }

    /// h^1(⊕O(a_i + t)).
    pub fn h1(&self, t: i64) -> usize {
        self.0.iter().map(|a| (-a - t - 1).max(0) as usize).sum()
    }
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Free generators of ker H^0_*(β) for β : ⊕O(b_j) → ⊕O(c_i) on P^1.
#[derive(Clone, Debug)]
pub struct FreeKernel<E> {
    /// Generator twists k_i; generator i spans a copy of O(k_i).
    pub twists: Vec<i64>,
    /// The inclusion ⊕O(k_i) → ⊕O(b_j).
    pub inclusion: FormMatrix<E>,
}

pub fn kernel_free_basis<F: Field>(f: &F, beta: &FormMatrix<F::Elem>) -> Result<FreeKernel<F::Elem>, Error> {
    if beta.nvars != 2 {
        return Err(Error::Shape("kernel_free_basis works on P^1".into()));
    }
    let rank = beta.cols() as i64 - beta.rows() as i64;
    let degree: i64 = beta.source.iter().sum::<i64>() - beta.target.iter().sum::<i64>();
    if rank < 0 {
        return Err(Error::Shape("beta has more target than source summands".into()));
    }
    let mut twists: Vec<i64> = Vec::new();
    let mut inclusion = form_matrix_zero(f, 2, &[], &beta.source);
    if rank == 0 {
        return Ok(FreeKernel { twists, inclusion });
    }
    let bmax = *beta.source.iter().max().expect("nonempty source");
    let kmin = degree - (rank - 1) * bmax;
    for t in -bmax..=-kmin {
        let h = complex::h0_matrix(f, beta, t);
        let ker = matrix::kernel_basis(f, &h);
        if ker.cols() == 0 {
            continue;
        }
        let old = complex::h0_matrix(f, &inclusion, t);
        let fresh = matrix::extend_basis(f, &old, &ker);
        for c in fresh {
            let v = ker.column(c);
            let mut col = form_matrix_zero(f, 2, &[-t], &beta.source);
            let mut off = 0;
            for (j, &b) in beta.source.iter().enumerate() {
                let sz = dim_s(2, b + t);
                if sz > 0 {
                    col.set(j, 0, Form { nvars: 2, degree: b + t, coeffs: v[off..off + sz].to_vec() });
                }
                off += sz;
            }
            inclusion = append_column(f, &inclusion, &col);
            twists.push(-t);
        }
        if twists.len() as i64 == rank {
            break;
        }
    }
    if twists.len() as i64 != rank || twists.iter().sum::<i64>() != degree {
        return Err(Error::Inconsistent(format!(
            "kernel generators {twists:?} do not match rank {rank} and degree {degree}: beta is not onto"
        )));
    }
    Ok(FreeKernel { twists, inclusion })
}

fn append_column<F: Field>(f: &F, a: &FormMatrix<F::Elem>, col: &FormMatrix<F::Elem>) -> FormMatrix<F::Elem> {
    let mut source = a.source.clone();
    source.extend_from_slice(&col.source);
    let mut out = form_matrix_zero(f, a.nvars, &source, &a.target);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, a.get(i, j).clone());
        }
        out.set(i, a.cols(), col.get(i, 0).clone());
    }
    out
}

/// Solves g ∘ ψ = α degreewise for ψ.
fn factor_through<F: Field>(
    f: &F,
    g: &FormMatrix<F::Elem>,
    alpha: &FormMatrix<F::Elem>,
) -> Result<FormMatrix<F::Elem>, Error> {
    let nvars = g.nvars;
    let mut psi = form_matrix_zero(f, nvars, &alpha.source, &g.source);
    for (j, &a) in alpha.source.iter().enumerate() {
        let sizes: Vec<usize> = g.source.iter().map(|&k| dim_s(nvars, k - a)).collect();
        let ncols: usize = sizes.iter().sum();
        let mut system = matrix::zeros(f, 0, ncols);
        let mut rhs_all = Vec::new();
        for (r, &b) in g.target.iter().enumerate() {
            let rows = dim_s(nvars, b - a);
            let mut block = matrix::zeros(f, rows, 0);
            for (i, &k) in g.source.iter().enumerate() {
                let m = graded::mult_matrix(f, g.get(r, i), k - a);
                let m = if m.rows() == rows { m } else { matrix::zeros(f, rows, sizes[i]) };
                block = block.hcat(&m);
            }
            system = system.vcat(&block);
            let target = alpha.get(r, j);
            if target.degree >= 0 {
                rhs_all.extend(target.coeffs.iter().cloned());
            } else {
                rhs_all.extend(std::iter::repeat_n(f.zero(), rows));
            }
        }
        let rhs = Mat::from_vec(rhs_all.len(), 1, rhs_all);
        let sol = matrix::solve(f, &system, &rhs)
            .ok_or_else(|| Error::Inconsistent("alpha does not land in ker beta".into()))?
            .column(0);
        let mut off = 0;
        for (i, &sz) in sizes.iter().enumerate() {
            if sz > 0 {
                psi.set(i, j, Form { nvars, degree: g.source[i] - a, coeffs: sol[off..off + sz].to_vec() });
            }
            off += sz;
        }
    }
    Ok(psi)
}

/// The two-term complex A → ker β in positions −1, 0 presenting the same
/// sheaf as a monad on P^1.
pub fn two_term<F: Field>(m: &MonadSpec<F>) -> Result<MonadSpec<F>, Error> {
    if m.n != 1 {
        return Err(Error::Shape("splitting types need a complex on P^1".into()));
    }
    if m.start < m.middle - 1 || m.end() > m.middle + 1 {
        return Err(Error::Unsupported("only complexes of length at most three around the middle".into()));
    }
    let f = &m.field;
    let (k_twists, alpha) = match m.diff(m.middle) {
        Some(beta) => {
            let kernel = kernel_free_basis(f, beta)?;
            let alpha = match m.diff(m.middle - 1) {
                Some(a) => factor_through(f, &kernel.inclusion, a)?,
                None => form_matrix_zero(f, 2, &[], &kernel.twists),
            };
            (kernel.twists, alpha)
        }
        None => {
            let mid = m.term(m.middle).to_vec();
            let alpha = match m.diff(m.middle - 1) {
                Some(a) => a.clone(),
                None => form_matrix_zero(f, 2, &[], &mid),
            };
            (mid, alpha)
        }
    };
    let left = alpha.source.clone();
    MonadSpec::new(f.clone(), 1, -1, vec![left, k_twists], vec![alpha], 0)
}

/// Splitting type of the bundle presented by a complex on P^1.
pub fn splitting_type<F: Field>(m: &MonadSpec<F>) -> Result<Splitting, Error> {
    let two = two_term(m)?;
    let rank = two.rank();
    if rank < 0 {
        return Err(Error::Inconsistent("negative rank".into()));
    }
    let rank = rank as usize;
    let c1 = complex::first_chern(&two);
    if rank == 0 {
        return Ok(Splitting(vec![]));
    }
    let kmin = *two.term(0).iter().min().expect("rank > 0");
    let emax = c1 - (rank as i64 - 1) * kmin;
    let (lo, hi) = (-emax - 1, -kmin);
    let h0 = |t: i64| -> Result<usize, Error> {
        hypercoh(&two, t)?
            .get(0)
            .exact()
            .ok_or_else(|| Error::Inconsistent(format!("h^0 undetermined at twist {t}")))
    };
    let values: Vec<usize> = crate::par::map_collect(&(lo..=hi).collect::<Vec<_>>(), |&t| h0(t))
        .into_iter()
        .collect::<Result<_, _>>()?;
    // values[t - lo] − values[t - lo - 1] = #{a_i ≥ −t}
    let mut parts = Vec::new();
    let mut prev_count = 0usize;
    if values[0] != 0 {
        return Err(Error::Inconsistent(format!("h^0 nonzero at twist {lo}: torsion present")));
    }
    for t in lo + 1..=hi {
        let d = values[(t - lo) as usize] as i64 - values[(t - lo - 1) as usize] as i64;
        if d < prev_count as i64 || d as usize > rank {
            return Err(Error::Inconsistent(format!("h^0 differences are not monotone at twist {t}: torsion present")));
        }
        for _ in prev_count..d as usize {
            parts.push(-t);
        }
        prev_count = d as usize;
    }
    let s = Splitting::new(parts);
    if s.rank() != rank || s.degree() != c1 {
        return Err(Error::Inconsistent(format!("recovered {s} does not have rank {rank} and degree {c1}")));
    }
    for (i, t) in (lo..=hi).enumerate() {
        if s.h0(t) != values[i] {
            return Err(Error::Inconsistent(format!("h^0 mismatch at twist {t}")));
        }
    }
    Ok(s)
}

/// Splitting of E_L^∨ for a complex on P^3 and a line L.
pub fn dual_splitting_on_line<F: Field>(
    m: &MonadSpec<F>,
    line: &graded::LinearSubspace<F::Elem>,
) -> Result<Splitting, Error> {
    splitting_type(&complex::restrict(&complex::dualize(m), line))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::form_matrix;
    use crate::field::Rationals;

    #[test]
    fn koszul_kernel_on_p1() {
        let q = Rationals;
        let s = graded::variable(&q, 2, 0);
        let u = graded::variable(&q, 2, 1);
        let beta = form_matrix(&q, 2, &[0, 0], &[1], vec![s.clone(), u.clone()]).unwrap();
        let k = kernel_free_basis(&q, &beta).unwrap();
        assert_eq!(k.twists, vec![-1]);
        let prod = complex::compose(&q, &beta, &k.inclusion).unwrap();
        assert!(complex::fm_is_zero(&q, &prod));
    }

    #[test]
    fn trivial_bundle_splits_trivially() {
        let q = Rationals;
        let m = MonadSpec::line_bundles(q, 1, vec![0, 0, 0]);
        assert_eq!(splitting_type(&m).unwrap(), Splitting(vec![0, 0, 0]));
        let m = MonadSpec::line_bundles(q, 1, vec![-2, 3]);
        assert_eq!(splitting_type(&m).unwrap(), Splitting(vec![3, -2]));
    }

    #[test]
    fn euler_sequence_on_p1() {
        // 0 → O(−1) → 2O → O(1) → 0 leaves the zero bundle; the tangent
        // presentation O → 2O(1) has cokernel O(2)
        let q = Rationals;
        let s = graded::variable(&q, 2, 0);
        let u = graded::variable(&q, 2, 1);
        let alpha = form_matrix(&q, 2, &[0], &[1, 1], vec![s, u]).unwrap();
        let m = MonadSpec::new(q, 1, -1, vec![vec![0], vec![1, 1]], vec![alpha], 0).unwrap();
        assert_eq!(splitting_type(&m).unwrap(), Splitting(vec![2]));
    }
}
