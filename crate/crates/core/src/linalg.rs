//! Thin wrappers over nalgebra's SVD for the regression code paths.

use nalgebra::{DMatrix, DVector};

/// Least-squares solution of `a x = b` and the inverse Gram matrix.
pub(crate) struct SvdSolve {
    pub solution: DVector<f64>,
    /// `(aᵀa)⁻¹`, i.e. `V diag(1/s²) Vᵀ`.
    pub gram_inverse: DMatrix<f64>,
}

pub(crate) enum Rank {
    Full(SvdSolve),
    Deficient { ratio: f64 },
}

/// Solve by SVD, reporting rank deficiency when the smallest singular value
/// falls below `rel_tol` times the largest.
pub(crate) fn svd_least_squares(a: DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> Rank {
    let svd = a.svd(true, true);
    let s = svd.singular_values.clone();
    let max = s.max();
    let min = s.min();
    if !(max > 0.0) || min < rel_tol * max {
        return Rank::Deficient { ratio: if max > 0.0 { min / max } else { 0.0 } };
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let inv_s = s.map(|x| 1.0 / x);
    let utb = u.transpose() * b;
    let scaled = utb.component_mul(&inv_s);
    let solution = v_t.transpose() * scaled;
    let v = v_t.transpose();
    let mut v_scaled = v.clone();
    for (j, mut col) in v_scaled.column_iter_mut().enumerate() {
        col *= inv_s[j] * inv_s[j];
    }
    let gram_inverse = &v_scaled * v.transpose();
    Rank::Full(SvdSolve { solution, gram_inverse })
}

/// Solve a symmetric system `a x = b`, refusing when `cond(a) > max_condition`.
pub(crate) fn solve_symmetric(a: DMatrix<f64>, b: &DVector<f64>, max_condition: f64) -> Result<DVector<f64>, f64> {
    let svd = a.svd(true, true);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(condition);
    }
    svd.solve(b, 0.0).map_err(|_| condition)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 5.0]);
        let Rank::Full(s) = svd_least_squares(a, &b, 1e-10) else { panic!() };
        assert!((s.solution[0] - 1.0).abs() < 1e-12);
        assert!((s.solution[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_are_deficient() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(svd_least_squares(a, &b, 1e-10), Rank::Deficient { .. }));
    }

    #[test]
    fn ill_conditioned_symmetric_refused() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-13]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(solve_symmetric(a, &b, 1e12).is_err());
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let x = solve_symmetric(a, &b, 1e12).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-14);
    }
}
