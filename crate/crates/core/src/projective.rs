//! Points, lines and planes of P^n over a field: enumeration over F_q and
//! seeded sampling.

use std::collections::HashSet;

use rand::Rng;

use crate::field::Field;
use crate::graded::LinearSubspace;
use crate::matrix::{self, Mat};

/// Scales a nonzero vector so that its first nonzero coordinate is 1.
pub fn normalize<F: Field>(f: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let lead = v.iter().find(|c| !f.is_zero(c))?;
    let inv = f.inv(lead)?;
    Some(v.iter().map(|c| f.mul(c, &inv)).collect())
}

/// All points of P^n over a finite field, normalized, in lexicographic
/// order of their coordinate vectors.
pub fn all_points<F: Field>(f: &F, n: usize) -> Option<Vec<Vec<F::Elem>>> {
    let elems = f.elements()?;
    let q = elems.len();
    let mut out = Vec::new();
    for lead in 0..=n {
        // coordinates before `lead` vanish, coordinate `lead` is 1
        let free = (n - lead) as u32;
        for code in 0..q.pow(free) {
            let mut v = vec![f.zero(); n + 1];
            v[lead] = f.one();
            let mut c = code;
            for k in (lead + 1..=n).rev() {
                v[k] = elems[c % q].clone();
                c /= q;
            }
            out.push(v);
        }
    }
    Some(out)
}

pub fn random_point<F: Field, R: Rng + ?Sized>(f: &F, n: usize, rng: &mut R) -> Vec<F::Elem> {
    loop {
        let v: Vec<F::Elem> = (0..=n).map(|_| f.random(rng)).collect();
        if let Some(p) = normalize(f, &v) {
            return p;
        }
    }
}

/// Plücker coordinates of the line through two points of P^3, normalized.
pub fn plucker<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let mut c = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            c.push(f.sub(&f.mul(&a[i], &b[j]), &f.mul(&a[j], &b[i])));
        }
    }
    normalize(f, &c)
}

/// All lines of P^3 over a finite field, from unordered pairs of points
/// deduplicated by Plücker coordinates. Each line is returned as the
/// first pair of points (in enumeration order) spanning it.
pub fn all_lines_p3<F: Field>(f: &F) -> Option<Vec<LinearSubspace<F::Elem>>> {
    let pts = all_points(f, 3)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let key = plucker(f, &pts[i], &pts[j]).expect("distinct points");
            if seen.insert(key) {
                out.push(LinearSubspace::from_points(f, &[pts[i].clone(), pts[j].clone()]).unwrap());
            }
        }
    }
    Some(out)
}

/// The hyperplane {h = 0} as a linear subspace.
pub fn hyperplane<F: Field>(f: &F, h: &[F::Elem]) -> LinearSubspace<F::Elem> {
    LinearSubspace::from_equations(f, &[h.to_vec()]).expect("nonzero linear form")
}

/// A normalized defining form with its zero set.
pub type Hyperplane<E> = (Vec<E>, LinearSubspace<E>);

/// All hyperplanes of P^n over a finite field, keyed by their normalized
/// defining forms.
pub fn all_hyperplanes<F: Field>(f: &F, n: usize) -> Option<Vec<Hyperplane<F::Elem>>> {
    Some(all_points(f, n)?.into_iter().map(|h| {
        let s = hyperplane(f, &h);
        (h, s)
    }).collect())
}

pub fn random_hyperplane<F: Field, R: Rng + ?Sized>(f: &F, n: usize, rng: &mut R) -> (Vec<F::Elem>, LinearSubspace<F::Elem>) {
    let h = random_point(f, n, rng);
    let s = hyperplane(f, &h);
    (h, s)
}

pub fn random_line_p3<F: Field, R: Rng + ?Sized>(f: &F, rng: &mut R) -> LinearSubspace<F::Elem> {
    loop {
        let a = random_point(f, 3, rng);
        let b = random_point(f, 3, rng);
        if let Some(l) = LinearSubspace::from_points(f, &[a, b]) {
            return l;
        }
    }
}

/// Line through two given points, if distinct.
pub fn line_through<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Option<LinearSubspace<F::Elem>> {
    LinearSubspace::from_points(f, &[a.to_vec(), b.to_vec()])
}

/// Canonical key of a subspace: the reduced row echelon form of its
/// parametrization.
pub fn subspace_key<F: Field>(f: &F, s: &LinearSubspace<F::Elem>) -> Mat<F::Elem> {
    matrix::rref(f, &s.param).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn counts_over_f5() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(all_points(&f, 3).unwrap().len(), 156);
        assert_eq!(all_points(&f, 1).unwrap().len(), 6);
        assert_eq!(all_lines_p3(&f).unwrap().len(), 806);
        assert_eq!(all_hyperplanes(&f, 3).unwrap().len(), 156);
    }
}
