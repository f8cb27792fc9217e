//! Multiset matching of complex spectra whose orderings differ.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Outcome of pairing two lists of complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `pairs[i] = j` pairs `left[i]` with `right[j]`.
    pub pairs: Vec<usize>,
    /// Largest distance among the matched pairs.
    pub max_deviation: f64,
    /// Left entries whose nearest right entry was taken by another left entry.
    pub collisions: usize,
}

/// Matches every element of `left` to a distinct element of `right`
/// (`left.len() <= right.len()`) by repeatedly taking the globally closest
/// unmatched pair.
pub fn match_into(left: &[Complex64], right: &[Complex64]) -> Result<Matching> {
    if left.len() > right.len() {
        return Err(Error::MultisetSize {
            left: left.len(),
            right: right.len(),
        });
    }
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(left.len() * right.len());
    let mut nearest = vec![usize::MAX; left.len()];
    for (i, a) in left.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, b) in right.iter().enumerate() {
            let d = (a - b).norm();
            if d < best {
                best = d;
                nearest[i] = j;
            }
            candidates.push((d, i, j));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut pairs = vec![usize::MAX; left.len()];
    let mut taken = vec![false; right.len()];
    let mut remaining = left.len();
    let mut max_deviation = 0.0f64;
    for (d, i, j) in candidates {
        if remaining == 0 {
            break;
        }
        if pairs[i] != usize::MAX || taken[j] {
            continue;
        }
        pairs[i] = j;
        taken[j] = true;
        remaining -= 1;
        max_deviation = max_deviation.max(d);
    }
    let collisions = pairs.iter().zip(&nearest).filter(|(p, n)| p != n).count();
    Ok(Matching {
        pairs,
        max_deviation,
        collisions,
    })
}

/// Matches two multisets of equal size.
pub fn match_multisets(left: &[Complex64], right: &[Complex64]) -> Result<Matching> {
    if left.len() != right.len() {
        return Err(Error::MultisetSize {
            left: left.len(),
            right: right.len(),
        });
    }
    match_into(left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permuted_lists_match_exactly() {
        let a = [c(1., 0.), c(0., 1.), c(-2., 3.)];
        let b = [c(-2., 3.), c(1., 0.), c(0., 1.)];
        let m = match_multisets(&a, &b).unwrap();
        assert_eq!(m.pairs, vec![1, 2, 0]);
        assert_eq!(m.max_deviation, 0.0);
        assert_eq!(m.collisions, 0);
    }

    #[test]
    fn repeated_values_use_distinct_partners() {
        let a = [c(1., 0.), c(1., 0.)];
        let b = [c(1., 0.), c(1.5, 0.)];
        let m = match_multisets(&a, &b).unwrap();
        assert_eq!(m.max_deviation, 0.5);
        assert_eq!(m.collisions, 1);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(match_multisets(&[c(0., 0.)], &[]).is_err());
        assert!(match_into(&[c(0., 0.)], &[c(1., 0.), c(0., 0.)]).is_ok());
    }
}
