//! Dense complex 2×2 / 4×4 kernel.
//!
//! Everything here works on fixed-size, stack-allocated matrices. The series
//! exponential is deliberately independent of the closed-form propagators so
//! that the two can be checked against each other.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

pub type ComplexMatrix2 = Matrix<2>;
pub type ComplexMatrix4 = Matrix<4>;

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Matrix<N> {
    pub const fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(d: [C64; N]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { ZERO })
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64; N], w: &[C64; N]) -> Self {
        Self::from_fn(|i, j| v[i] * w[j].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &[C64; N]) -> C64 {
        let mv = self.mul_vec(v);
        (0..N).map(|i| v[i].conj() * mv[i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }

    /// Largest entry modulus of `M − M†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let mut a = self.0;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap_or(col);
            if a[pivot][col].is_zero() {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..N {
                let f = a[row][col] / a[col][col];
                for k in col..N {
                    let v = a[col][k];
                    a[row][k] -= f * v;
                }
            }
        }
        det
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Mul<C64> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

pub fn sigma_x() -> Matrix<2> {
    Matrix([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> Matrix<2> {
    Matrix([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> Matrix<2> {
    Matrix([[ONE, ZERO], [ZERO, -ONE]])
}

/// Kronecker product; block `(i, j)` of the result is `a[i][j]·b`.
pub fn kron(a: &Matrix<2>, b: &Matrix<2>) -> Matrix<4> {
    Matrix::from_fn(|r, c| a.0[r / 2][c / 2] * b.0[r % 2][c % 2])
}

/// Kronecker product of two 2-vectors in the `|00⟩, |01⟩, |10⟩, |11⟩` order.
pub fn kron_vec(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Largest `|t|` accepted by [`expm_series`].
pub const SERIES_TIME_LIMIT: f64 = 100.0;
/// Intermediate magnitude above which [`expm_series`] reports overflow.
pub const SERIES_MAGNITUDE_LIMIT: f64 = 1e150;
const SERIES_ORDER: usize = 24;

/// `exp(−i·m·t)` by scaling and squaring a fixed-order Taylor series.
pub fn expm_series<const N: usize>(m: &Matrix<N>, t: f64) -> Result<Matrix<N>> {
    expm_series_bounded(m, t, SERIES_MAGNITUDE_LIMIT)
}

/// [`expm_series`] with an explicit overflow bound.
pub fn expm_series_bounded<const N: usize>(
    m: &Matrix<N>,
    t: f64,
    magnitude_limit: f64,
) -> Result<Matrix<N>> {
    if !t.is_finite() || t.abs() > SERIES_TIME_LIMIT {
        return Err(Error::TimeOutOfRange {
            t,
            limit: SERIES_TIME_LIMIT,
        });
    }
    let x = m.scale(C64::new(0.0, -t));
    if !x.is_finite() {
        return Err(Error::Overflow {
            magnitude: f64::INFINITY,
        });
    }

    // Scale so the Taylor argument has ∞-norm at most 1/2.
    let norm = x.norm_inf();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = x.scale_real(scale);

    let mut sum = Matrix::<N>::identity();
    let mut term = Matrix::<N>::identity();
    for k in 1..=SERIES_ORDER {
        term = (term * x).scale_real(1.0 / k as f64);
        sum += term;
    }

    for _ in 0..squarings {
        sum = sum * sum;
        let magnitude = sum.max_abs();
        if !(magnitude <= magnitude_limit) {
            return Err(Error::Overflow { magnitude });
        }
    }
    Ok(sum)
}

/// Orders complex numbers by real part, then imaginary part, descending.
fn descending(a: &C64, b: &C64) -> core::cmp::Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Both eigenvalues of a 2×2 matrix, sorted by (real, imaginary) descending.
pub fn eig2(m: &Matrix<2>) -> [C64; 2] {
    let half_tr = m.trace() * 0.5;
    let det = m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0];
    let disc = (half_tr * half_tr - det).sqrt();
    let mut ev = [half_tr + disc, half_tr - disc];
    // Canonicalise signed zeros so that ordering is not decided by −0.0.
    for z in ev.iter_mut() {
        if z.re == 0.0 {
            z.re = 0.0;
        }
        if z.im == 0.0 {
            z.im = 0.0;
        }
    }
    ev.sort_by(descending);
    ev
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second matrix. Only the Hermitian part
/// of `m` is used.
pub fn eigh<const N: usize>(m: &Matrix<N>) -> ([f64; N], Matrix<N>) {
    let mut a = m.hermitian_part();
    let mut v = Matrix::<N>::identity();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|p| (p + 1..N).map(move |q| (p, q)))
            .map(|(p, q)| a.0[p][q].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a.0[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // J = diag(1, phase*) on (p, q) followed by a real rotation.
                let mut j = Matrix::<N>::identity();
                j.0[p][p] = C64::new(c, 0.0);
                j.0[p][q] = C64::new(s, 0.0);
                j.0[q][p] = -phase.conj() * s;
                j.0[q][q] = phase.conj() * c;

                a = j.adjoint() * a * j;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                v = v * j;
            }
        }
    }

    let mut order: [usize; N] = core::array::from_fn(|i| i);
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let values = core::array::from_fn(|k| a.0[order[k]][order[k]].re);
    let vectors = Matrix::from_fn(|i, k| v.0[i][order[k]]);
    (values, vectors)
}

/// Column `k` of `m`.
pub fn column<const N: usize>(m: &Matrix<N>, k: usize) -> [C64; N] {
    core::array::from_fn(|i| m.0[i][k])
}

/// `f` applied to the spectrum of a Hermitian matrix.
pub fn hermitian_function<const N: usize>(m: &Matrix<N>, f: impl Fn(f64) -> f64) -> Matrix<N> {
    let (values, vectors) = eigh(m);
    let mut out = Matrix::<N>::zeros();
    for (k, &lambda) in values.iter().enumerate() {
        let col = column(&vectors, k);
        out += Matrix::outer(&col, &col).scale_real(f(lambda));
    }
    out
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
/// Negative float noise in the spectrum is clipped to zero.
pub fn sqrt_psd<const N: usize>(m: &Matrix<N>) -> Matrix<N> {
    hermitian_function(m, |x| x.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity() {
        let i2 = Matrix::<2>::identity();
        assert_eq!(kron(&i2, &i2), Matrix::<4>::identity());
    }

    #[test]
    fn kron_sigma_x_preserves_symmetric_bell_state() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let bell = [ZERO, c(s, 0.0), c(s, 0.0), ZERO];
        let out = kron(&sigma_x(), &sigma_x()).mul_vec(&bell);
        for (o, b) in out.iter().zip(bell.iter()) {
            assert!((o - b).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_diagonal_blocks() {
        let d = Matrix::diag([c(2.0, 0.0), c(3.0, 0.0)]);
        let expected = Matrix::diag([c(2.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(kron(&d, &Matrix::identity()), expected);
    }

    #[test]
    fn expm_at_zero_time_is_identity() {
        let m = Matrix::from_fn(|i, j| c(i as f64 + 0.3, j as f64 - 1.7));
        assert_eq!(expm_series(&m, 0.0).unwrap(), Matrix::<2>::identity());
    }

    #[test]
    fn expm_sigma_z_half_turn() {
        let u = expm_series(&sigma_z(), PI).unwrap();
        assert!(u.max_abs_diff(&-Matrix::<2>::identity()) < 1e-14);
    }

    #[test]
    fn expm_rejects_long_times() {
        assert!(matches!(
            expm_series(&sigma_z(), 100.5),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(expm_series(&sigma_z(), f64::NAN).is_err());
    }

    #[test]
    fn expm_reports_overflow() {
        // exp(−i·(i·10)·t) = exp(10 t): grows past the bound quickly.
        let m = Matrix::diag([c(0.0, 10.0), ZERO]);
        assert!(matches!(
            expm_series_bounded(&m, 50.0, 1e100),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn eig2_exceptional_point() {
        let h = Matrix([[c(1.0, 0.0), I], [I, c(-1.0, 0.0)]]);
        let ev = eig2(&h);
        assert!(ev[0].norm() < 1e-12 && ev[1].norm() < 1e-12);
    }

    #[test]
    fn eig2_broken_and_unbroken() {
        let h = |a: f64| Matrix([[c(a, 0.0), I], [I, c(-a, 0.0)]]);
        let ev = eig2(&h(0.8));
        assert!((ev[0] - c(0.0, 0.6)).norm() < 1e-12, "{ev:?}");
        assert!((ev[1] - c(0.0, -0.6)).norm() < 1e-12, "{ev:?}");
        let ev = eig2(&h(2.0));
        assert!((ev[0] - c(3f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(-(3f64.sqrt()), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn determinant_matches_two_by_two_formula() {
        let m = Matrix([[c(1.0, 2.0), c(-0.5, 0.1)], [c(3.0, -1.0), c(0.2, 0.7)]]);
        let direct = m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0];
        assert!((m.determinant() - direct).norm() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_hermitian_matrix() {
        let m = Matrix::<4>::from_fn(|i, j| {
            let x = c((i * 3 + j) as f64 * 0.37, (i as f64 - j as f64) * 0.11);
            x
        })
        .hermitian_part();
        let (values, vectors) = eigh(&m);
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let rebuilt = vectors * Matrix::diag(values.map(|x| c(x, 0.0))) * vectors.adjoint();
        assert!(rebuilt.max_abs_diff(&m) < 1e-12);
        assert!((vectors.adjoint() * vectors).max_abs_diff(&Matrix::identity()) < 1e-12);
    }

    #[test]
    fn eigh_handles_degenerate_spectrum() {
        let (values, _) = eigh(&Matrix::<4>::identity().scale_real(0.25));
        assert!(values.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }
}
