//! Log-domain determinants.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// `det(A) = sign · exp(log_abs)`; `singular` means a pivot vanished to
/// working precision, in which case `log_abs` is `-inf` and `sign` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub log_abs: f64,
    pub sign: f64,
    pub singular: bool,
}

impl LogDet {
    pub fn abs(&self) -> f64 {
        if self.singular {
            0.0
        } else {
            self.log_abs.exp()
        }
    }

    pub fn value(&self) -> f64 {
        self.sign * self.abs()
    }

    fn singular() -> Self {
        LogDet {
            log_abs: f64::NEG_INFINITY,
            sign: 0.0,
            singular: true,
        }
    }
}

/// Determinant via LU with partial pivoting, accumulating `ln|u_ii|`.
///
/// A pivot below `n·ε·max|a_ij|` counts as exactly zero. An empty matrix has
/// determinant 1.
pub fn log_det(matrix: &DMatrix<f64>) -> LogDet {
    assert!(matrix.is_square(), "determinant of a non-square matrix");
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if n == 0 {
        return LogDet {
            log_abs: 0.0,
            sign: 1.0,
            singular: false,
        };
    }
    if scale == 0.0 || !scale.is_finite() {
        return LogDet::singular();
    }
    let tiny = n as f64 * f64::EPSILON * scale;
    let mut log_abs = 0.0;
    let mut sign = 1.0;
    for col in 0..n {
        let (offset, pivot_mag) = a
            .view((col, col), (n - col, 1))
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, x)| if x.abs() > best.1 { (i, x.abs()) } else { best });
        if pivot_mag <= tiny {
            return LogDet::singular();
        }
        let p = col + offset;
        if p != col {
            a.swap_rows(p, col);
            sign = -sign;
        }
        let pivot = a[(col, col)];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot.abs().ln();
        for r in col + 1..n {
            let f = a[(r, col)] / pivot;
            if f == 0.0 {
                continue;
            }
            for c in col + 1..n {
                let v = a[(col, c)];
                a[(r, c)] -= f * v;
            }
        }
    }
    LogDet {
        log_abs,
        sign,
        singular: false,
    }
}
