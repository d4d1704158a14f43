//! Dense kernels behind the n-norm: numerical rank, Householder volume and
//! the explicit Gram determinant.

use alloc::vec;
use alloc::vec::Vec;

use crate::vector::dot;
use crate::{Error, Result, RANK_TOLERANCE};

fn check_tuple<V: AsRef<[f64]>>(vectors: &[V]) -> Result<usize> {
    let first = vectors.first().ok_or(Error::Empty)?;
    let dim = first.as_ref().len();
    for v in vectors {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if let Some(i) = v.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(dim)
}

/// Rank of the row set by Gaussian elimination with partial pivoting.
///
/// A pivot counts only when its magnitude exceeds `tol * max|a_ij|` (or `tol`
/// when the input is all zeros).
pub(crate) fn numerical_rank(rows: &[&[f64]], tol: f64) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let d = rows[0].len();
    let mut a: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let scale = a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let threshold = tol * if scale > 0.0 { scale } else { 1.0 };

    let mut rank = 0;
    for col in 0..d {
        if rank == m {
            break;
        }
        let (pivot_row, pivot) = (rank..m)
            .map(|r| (r, a[r * d + col].abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            continue;
        }
        if pivot_row != rank {
            for c in 0..d {
                a.swap(rank * d + c, pivot_row * d + c);
            }
        }
        let p = a[rank * d + col];
        for r in rank + 1..m {
            let factor = a[r * d + col] / p;
            if factor != 0.0 {
                for c in col..d {
                    a[r * d + c] -= factor * a[rank * d + c];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// True iff the numerical rank of `vectors` is below their count.
///
/// The pivot threshold is `tol` times the largest absolute entry of the
/// input (or `tol` itself for an all-zero input).
pub fn is_linearly_dependent<V: AsRef<[f64]>>(vectors: &[V], tol: f64) -> Result<bool> {
    if vectors.is_empty() {
        return Ok(false);
    }
    check_tuple(vectors)?;
    let rows: Vec<&[f64]> = vectors.iter().map(|v| v.as_ref()).collect();
    Ok(numerical_rank(&rows, tol) < vectors.len())
}

/// Power of two nearest above `max|v_i|`, so that dividing by it is exact
/// and squares cannot overflow. Zero for a zero vector.
pub(crate) fn binary_scale(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let (_, exp) = libm::frexp(m);
    libm::ldexp(1.0, exp)
}

/// Dependence test on unit-normalised rows, so that one short vector next to
/// long ones is not mistaken for zero. Zero vectors are dependent.
pub(crate) fn normalized_dependent(rows: &[&[f64]], tol: f64) -> bool {
    let mut normalized: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for r in rows {
        let scale = binary_scale(r);
        if scale == 0.0 {
            return true;
        }
        let scaled: Vec<f64> = r.iter().map(|c| c / scale).collect();
        let len = libm::sqrt(dot(&scaled, &scaled));
        normalized.push(scaled.iter().map(|c| c / len).collect());
    }
    let refs: Vec<&[f64]> = normalized.iter().map(|r| r.as_slice()).collect();
    numerical_rank(&refs, tol) < rows.len()
}

/// `|prod R_jj|` of a Householder QR of the `d x n` matrix whose columns are
/// `cols`, which equals `sqrt(det G)`.
pub(crate) fn householder_volume(cols: &[&[f64]]) -> f64 {
    let n = cols.len();
    let d = cols[0].len();
    // column-major copy
    let mut a: Vec<f64> = cols.iter().flat_map(|c| c.iter().copied()).collect();
    let mut volume = 1.0;
    for j in 0..n {
        let col = j * d;
        let tail_sq: f64 = (j + 1..d).map(|i| a[col + i] * a[col + i]).sum();
        let head = a[col + j];
        if tail_sq == 0.0 {
            volume *= head;
            continue;
        }
        let alpha = -libm::copysign(libm::sqrt(head * head + tail_sq), head);
        // v = x - alpha e_j, stored in place of the column tail
        let v0 = head - alpha;
        let vtv = v0 * v0 + tail_sq;
        a[col + j] = v0;
        for k in j + 1..n {
            let other = k * d;
            let mut s = 0.0;
            for i in j..d {
                s += a[col + i] * a[other + i];
            }
            let f = 2.0 * s / vtv;
            for i in j..d {
                a[other + i] -= f * a[col + i];
            }
        }
        volume *= alpha;
    }
    volume.abs()
}

/// Gram n-norm `sqrt(det(<x_i, x_j>))` of an n-tuple in `R^d`, with the
/// default rank tolerance.
///
/// Returns exactly `0.0` when the tuple is numerically dependent.
pub fn gram_nnorm<V: AsRef<[f64]>>(vectors: &[V]) -> Result<f64> {
    gram_nnorm_with_tol(vectors, RANK_TOLERANCE)
}

/// [`gram_nnorm`] with an explicit relative rank tolerance.
pub fn gram_nnorm_with_tol<V: AsRef<[f64]>>(vectors: &[V], tol: f64) -> Result<f64> {
    let dim = check_tuple(vectors)?;
    if vectors.len() > dim {
        return Err(Error::TooManyVectors {
            count: vectors.len(),
            dim,
        });
    }
    let cols: Vec<&[f64]> = vectors.iter().map(|v| v.as_ref()).collect();
    if normalized_dependent(&cols, tol) {
        return Ok(0.0);
    }
    let scales: Vec<f64> = cols.iter().map(|c| binary_scale(c)).collect();
    let scaled: Vec<Vec<f64>> = cols
        .iter()
        .zip(&scales)
        .map(|(c, s)| c.iter().map(|x| x / s).collect())
        .collect();
    let refs: Vec<&[f64]> = scaled.iter().map(|c| c.as_slice()).collect();
    Ok(scales.iter().fold(householder_volume(&refs), |acc, s| acc * s))
}

/// The Gram determinant `det(<x_i, x_j>)` evaluated directly by LU with
/// partial pivoting. May come out slightly negative for dependent tuples.
pub fn gram_determinant<V: AsRef<[f64]>>(vectors: &[V]) -> Result<f64> {
    check_tuple(vectors)?;
    let n = vectors.len();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = dot(vectors[i].as_ref(), vectors[j].as_ref());
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    Ok(determinant(&mut g, n))
}

pub(crate) fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap_or(col);
        let p = a[pivot_row * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
        }
    }
    det
}

/// Orthonormal basis of `span(vectors)` by twice-applied modified
/// Gram-Schmidt; directions that shrink below `1e-8` of their length are
/// dropped.
pub(crate) fn orthonormalize(vectors: &[&[f64]], seed_basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = seed_basis.to_vec();
    let start = basis.len();
    for v in vectors {
        let original = libm::sqrt(dot(v, v));
        if original == 0.0 {
            continue;
        }
        let mut w: Vec<f64> = v.to_vec();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let len = libm::sqrt(dot(&w, &w));
        if len > 1e-8 * original {
            for wi in &mut w {
                *wi /= len;
            }
            basis.push(w);
        }
    }
    basis.split_off(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let a: [&[f64]; 2] = [&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]];
        assert!(!is_linearly_dependent(&a, 1e-9).unwrap());
        let b: [&[f64]; 2] = [&[1.0, 2.0], &[2.0, 4.0]];
        assert!(is_linearly_dependent(&b, 1e-9).unwrap());
        let c: [&[f64]; 2] = [&[1.0, 0.0], &[1.0, 1e-15]];
        assert!(is_linearly_dependent(&c, 1e-9).unwrap());
        // the same pair is independent at a looser-than-pivot tolerance
        assert!(!is_linearly_dependent(&c, 1e-16).unwrap());
    }

    #[test]
    fn rank_of_zero_input() {
        let z: [&[f64]; 2] = [&[0.0, 0.0], &[0.0, 0.0]];
        assert!(is_linearly_dependent(&z, 1e-9).unwrap());
        let empty: [&[f64]; 0] = [];
        assert!(!is_linearly_dependent(&empty, 1e-9).unwrap());
    }

    #[test]
    fn ragged_input_is_rejected() {
        let r: [&[f64]; 2] = [&[1.0, 0.0], &[1.0]];
        assert!(matches!(
            is_linearly_dependent(&r, 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(gram_nnorm(&r).is_err());
    }

    #[test]
    fn too_many_vectors() {
        let r: [&[f64]; 3] = [&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]];
        assert_eq!(
            gram_nnorm(&r),
            Err(Error::TooManyVectors { count: 3, dim: 2 })
        );
    }

    #[test]
    fn small_vector_next_to_unit_anchors_is_not_zeroed() {
        let tiny = 3e-11;
        let t: [&[f64]; 3] = [&[tiny, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]];
        assert_eq!(gram_nnorm(&t).unwrap(), tiny);
    }

    #[test]
    fn huge_and_tiny_entries_do_not_overflow() {
        let t: [&[f64]; 2] = [&[-1e200, 0.0, 0.0], &[0.0, 1.0, 0.0]];
        assert_eq!(gram_nnorm(&t).unwrap(), 1e200);
        let t: [&[f64]; 2] = [&[3e-200, 4e-200], &[0.0, 1.0]];
        assert!((gram_nnorm(&t).unwrap() / 3e-200 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn determinant_matches_square() {
        let t: [&[f64]; 2] = [&[2.0, 0.0], &[0.0, 3.0]];
        assert!((gram_determinant(&t).unwrap() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_complement() {
        let anchors: [&[f64]; 1] = [&[1.0, 1.0, 0.0]];
        let k = orthonormalize(&anchors, &[]);
        assert_eq!(k.len(), 1);
        let e: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let refs: Vec<&[f64]> = e.iter().map(|v| v.as_slice()).collect();
        let c = orthonormalize(&refs, &k);
        assert_eq!(c.len(), 2);
        for q in &c {
            assert!(dot(q, &k[0]).abs() < 1e-15);
            assert!((dot(q, q) - 1.0).abs() < 1e-15);
        }
    }
}
