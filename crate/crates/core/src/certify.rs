//! Exact emptiness of degeneracy loci over the algebraic closure.
//!
//! A map of line-bundle sums drops rank somewhere on P^n iff its maximal
//! minors have a common zero. Forms g_1..g_s of degree ≤ D have no common
//! zero iff the ideal they generate contains all of S_d for
//! d = (n+1)(D−1)+1, and the dimension of each I_d is the same over a field
//! and its algebraic closure, so the test is plain linear algebra.

use crate::complex::{FormMatrix, MonadSpec};
use crate::field::{Field, PrimeField};
use crate::graded::{self, dim_s, Form};
use crate::matrix::{self, Mat};
use crate::Error;

/// Prime used when certifying a complex defined over ℚ.
pub const CERT_PRIMES: [u32; 2] = [32003, 10007];

const MAX_MINORS: usize = 20_000;

/// Reduces a form matrix to F_p; `None` if a coefficient has no image.
pub fn reduce_matrix<F: Field>(f: &F, m: &FormMatrix<F::Elem>, p: u32) -> Option<FormMatrix<u32>> {
    let fp = PrimeField::new(p).ok()?;
    let mut entries = Vec::with_capacity(m.entries().len());
    for e in m.entries() {
        let coeffs: Option<Vec<u32>> = e.coeffs.iter().map(|c| f.reduce_mod(c, p)).collect();
        entries.push(Form { nvars: e.nvars, degree: e.degree, coeffs: coeffs? });
    }
    crate::complex::form_matrix(&fp, m.nvars, &m.source, &m.target, entries).ok()
}

fn determinant(f: &PrimeField, m: &FormMatrix<u32>, rows: &[usize], cols: &[usize]) -> Form<u32> {
    if rows.len() == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let deg: i64 = rows.iter().map(|&i| m.target[i]).sum::<i64>() - cols.iter().map(|&j| m.source[j]).sum::<i64>();
    let mut acc = graded::zero_form(f, m.nvars, deg);
    let c0 = cols[0];
    let rest: Vec<usize> = cols[1..].to_vec();
    for (k, &r) in rows.iter().enumerate() {
        let e = m.get(r, c0);
        if graded::is_zero(f, e) {
            continue;
        }
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let minor = determinant(f, m, &sub_rows, &rest);
        if minor.degree < 0 || deg < 0 {
            continue;
        }
        let mut term = graded::mul(f, e, &minor);
        if k % 2 == 1 {
            term = graded::neg(f, &term);
        }
        acc = graded::add(f, &acc, &term);
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All nonzero maximal minors of a map over F_p.
pub fn maximal_minors(f: &PrimeField, m: &FormMatrix<u32>) -> Result<Vec<Form<u32>>, Error> {
    let (r, c) = (m.rows(), m.cols());
    let k = r.min(c);
    if k == 0 {
        return Ok(vec![]);
    }
    let count = graded::binomial(r.max(c) as i64, k as i64);
    if count > MAX_MINORS || k > 6 {
        return Err(Error::Unsupported(format!("{count} minors of size {k} is too many to certify")));
    }
    let mut out = Vec::new();
    if r >= c {
        let cols: Vec<usize> = (0..c).collect();
        for rows in subsets(r, c) {
            let d = determinant(f, m, &rows, &cols);
            if d.degree >= 0 && !graded::is_zero(f, &d) {
                out.push(d);
            }
        }
    } else {
        let t = m.transpose();
        let cols: Vec<usize> = (0..r).collect();
        for rows in subsets(c, r) {
            let d = determinant(f, &t, &rows, &cols);
            if d.degree >= 0 && !graded::is_zero(f, &d) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// Whether the forms have no common zero in P^{nvars-1} over the algebraic
/// closure of F_p.
pub fn no_common_zero(f: &PrimeField, nvars: usize, gens: &[Form<u32>]) -> bool {
    let gens: Vec<&Form<u32>> = gens.iter().filter(|g| g.degree >= 0 && !graded::is_zero(f, g)).collect();
    if gens.is_empty() {
        return false;
    }
    if gens.iter().any(|g| g.degree == 0) {
        return true;
    }
    let dmax = gens.iter().map(|g| g.degree).max().unwrap();
    let dmin = gens.iter().map(|g| g.degree).min().unwrap();
    let bound = nvars as i64 * (dmax - 1) + 1;
    // rows of `basis` are coefficient vectors spanning I_d
    let mut basis: Mat<u32> = Mat::from_vec(0, dim_s(nvars, dmin), vec![]);
    for d in dmin..=bound.max(dmin) {
        let width = dim_s(nvars, d);
        let mut rows: Vec<Vec<u32>> = Vec::new();
        if d > dmin {
            for r in 0..basis.rows() {
                let g = Form { nvars, degree: d - 1, coeffs: basis.row(r).to_vec() };
                for v in 0..nvars {
                    rows.push(graded::mul(f, &g, &graded::variable(f, nvars, v)).coeffs);
                }
            }
        }
        for g in gens.iter().filter(|g| g.degree == d) {
            rows.push(g.coeffs.clone());
        }
        let m = Mat::from_vec(rows.len(), width, rows.concat());
        let (red, piv) = matrix::rref(f, &m);
        if piv.len() == width {
            return true;
        }
        basis = red.row_slice(0, piv.len());
    }
    false
}

/// Certifies over the algebraic closure that a complex of length at most
/// three around its middle presents a vector bundle. Over ℚ the check runs
/// after reduction modulo a large prime, which suffices: full rank of I_d
/// modulo p implies full rank over ℚ.
pub fn bundle_certificate<F: Field>(m: &MonadSpec<F>) -> Result<bool, Error> {
    if m.start < m.middle - 1 || m.end() > m.middle + 1 {
        return Err(Error::Unsupported("closure certificate handles complexes of length ≤ 3 only".into()));
    }
    let primes: Vec<u32> = match m.field.spec() {
        crate::field::FieldSpec::PrimeField(p) => vec![p],
        crate::field::FieldSpec::Rationals => CERT_PRIMES.to_vec(),
    };
    let nvars = m.n + 1;
    for p in primes {
        let fp = PrimeField::new(p)?;
        let mut all_ok = true;
        let mut reduced = true;
        for d in &m.diffs {
            let Some(dp) = reduce_matrix(&m.field, d, p) else {
                reduced = false;
                break;
            };
            // left map must be injective, right map surjective
            let needed = d.rows().min(d.cols());
            let minors = maximal_minors(&fp, &dp)?;
            if needed > 0 && !no_common_zero(&fp, nvars, &minors) {
                all_ok = false;
                break;
            }
        }
        if reduced {
            return Ok(all_ok);
        }
    }
    Err(Error::Unsupported("no usable reduction prime for the closure certificate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables_have_no_common_zero() {
        let f = PrimeField::new(7).unwrap();
        let xs: Vec<_> = (0..3).map(|i| graded::variable(&f, 3, i)).collect();
        assert!(no_common_zero(&f, 3, &xs));
        assert!(!no_common_zero(&f, 3, &xs[..2]));
    }

    #[test]
    fn squares_have_no_common_zero() {
        let f = PrimeField::new(7).unwrap();
        let xs: Vec<_> = (0..4).map(|i| graded::pow(&f, &graded::variable(&f, 4, i), 2)).collect();
        assert!(no_common_zero(&f, 4, &xs));
    }

    #[test]
    fn conic_and_line_meet() {
        // X0^2 + X1^2 + X2^2 and X0 meet over the closure of F_7 even though
        // the intersection has no rational point.
        let f = PrimeField::new(7).unwrap();
        let x: Vec<_> = (0..3).map(|i| graded::variable(&f, 3, i)).collect();
        let conic = (0..3).map(|i| graded::mul(&f, &x[i], &x[i])).reduce(|a, b| graded::add(&f, &a, &b)).unwrap();
        let tail = graded::add(&f, &graded::mul(&f, &x[1], &x[1]), &graded::mul(&f, &x[2], &x[2]));
        assert!(!no_common_zero(&f, 3, &[conic, x[0].clone()]));
        // the same two forms have no F_7-point in common: y^2 + z^2 = 0 is
        // anisotropic mod 7
        let pts = crate::projective::all_points(&f, 2).unwrap();
        assert!(pts.iter().all(|p| !(f.is_zero(&p[0]) && f.is_zero(&graded::evaluate(&f, &tail, p)))));
    }
}
