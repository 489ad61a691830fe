//! Two-photon polarization tomography: 16 projective bases, Poisson count
//! simulation and maximum-likelihood reconstruction.
//!
//! The estimate is parameterized as `ρ = T†T / tr(T†T)` with `T` lower
//! triangular (4 real diagonal entries, 6 complex sub-diagonal entries), so
//! every iterate is a valid density matrix. The Poisson log-likelihood
//! `Σ n·ln μ − μ` is maximized with L-BFGS on those 16 real parameters,
//! starting from linear inversion projected onto the physical states.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::dynamics::DensityMatrix;
use crate::linalg::{
    eigh, hermitian_function, kron, kron_vec, sigma_x, sigma_y, sigma_z, sqrt_psd, ComplexMatrix4,
    Matrix, C64, ONE, ZERO,
};
use crate::{Error, Result};

/// Single-photon polarization states used by the projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
    /// `(H + V)/√2`
    D,
    /// `(H − iV)/√2`
    R,
    /// `(H + iV)/√2`
    L,
}

/// Analyzer settings in front of a horizontal polarizer, in degrees.
/// Light meets the QWP first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzerSettings {
    pub qwp_deg: f64,
    pub hwp_deg: f64,
}

impl Polarization {
    pub fn ket(self) -> [C64; 2] {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            Polarization::H => [ONE, ZERO],
            Polarization::V => [ZERO, ONE],
            Polarization::D => [C64::new(s, 0.0), C64::new(s, 0.0)],
            Polarization::R => [C64::new(s, 0.0), C64::new(0.0, -s)],
            Polarization::L => [C64::new(s, 0.0), C64::new(0.0, s)],
        }
    }

    pub fn settings(self) -> AnalyzerSettings {
        let (qwp_deg, hwp_deg) = match self {
            Polarization::H => (0.0, 0.0),
            Polarization::V => (0.0, 45.0),
            Polarization::D => (45.0, 22.5),
            Polarization::R => (0.0, 22.5),
            Polarization::L => (45.0, 0.0),
        };
        AnalyzerSettings { qwp_deg, hwp_deg }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
            Polarization::D => 'D',
            Polarization::R => 'R',
            Polarization::L => 'L',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        Some(match c {
            'H' => Polarization::H,
            'V' => Polarization::V,
            'D' => Polarization::D,
            'R' => Polarization::R,
            'L' => Polarization::L,
            _ => return None,
        })
    }
}

/// Two-photon basis label such as `HV` (photon 1 first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel(pub Polarization, pub Polarization);

impl BasisLabel {
    pub fn ket(&self) -> [C64; 4] {
        kron_vec(&self.0.ket(), &self.1.ket())
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.symbol(), self.1.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseBasisError;

impl fmt::Display for ParseBasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("basis label must be two characters from {H, V, D, R, L}")
    }
}

impl FromStr for BasisLabel {
    type Err = ParseBasisError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Ok(BasisLabel(
                Polarization::from_symbol(a).ok_or(ParseBasisError)?,
                Polarization::from_symbol(b).ok_or(ParseBasisError)?,
            )),
            _ => Err(ParseBasisError),
        }
    }
}

/// The 16 measured projections, in measurement order.
pub const BASIS_ORDER: [BasisLabel; 16] = {
    use Polarization::*;
    [
        BasisLabel(H, H),
        BasisLabel(H, V),
        BasisLabel(V, V),
        BasisLabel(V, H),
        BasisLabel(R, H),
        BasisLabel(R, V),
        BasisLabel(D, V),
        BasisLabel(D, H),
        BasisLabel(D, R),
        BasisLabel(D, D),
        BasisLabel(R, D),
        BasisLabel(H, D),
        BasisLabel(V, D),
        BasisLabel(V, L),
        BasisLabel(H, L),
        BasisLabel(R, L),
    ]
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionBasis {
    pub label: BasisLabel,
    pub ket: [C64; 4],
    pub settings: [AnalyzerSettings; 2],
}

pub fn basis_set() -> [ProjectionBasis; 16] {
    BASIS_ORDER.map(|label| ProjectionBasis {
        label,
        ket: label.ket(),
        settings: [label.0.settings(), label.1.settings()],
    })
}

/// Coincidence counts for one projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountRecord {
    pub basis: BasisLabel,
    /// `total · ⟨b|ρ|b⟩` when the generating state is known.
    pub expected: Option<f64>,
    pub observed: u64,
    /// Count scale: the number of events a projection with unit probability
    /// would collect.
    pub total: u64,
}

/// Default count scale per basis.
pub const DEFAULT_TOTAL: u64 = 10_000;

fn projection_probability(rho: &ComplexMatrix4, ket: &[C64; 4]) -> f64 {
    rho.expectation(ket).re.max(0.0)
}

fn require_total(total: u64) -> Result<()> {
    if total == 0 {
        return Err(Error::InvalidParameter {
            name: "total",
            value: 0.0,
            reason: "count scale must be positive",
        });
    }
    Ok(())
}

/// Noise-free counts: `observed = round(expected)`.
pub fn noiseless_counts(rho: &DensityMatrix, total: u64) -> Result<Vec<CountRecord>> {
    require_total(total)?;
    Ok(BASIS_ORDER
        .iter()
        .map(|&basis| {
            let expected = total as f64 * projection_probability(rho.matrix(), &basis.ket());
            CountRecord {
                basis,
                expected: Some(expected),
                observed: expected.round() as u64,
                total,
            }
        })
        .collect())
}

/// Poisson-distributed counts with mean `total · ⟨b|ρ|b⟩`, reproducible from
/// `seed`.
pub fn simulate_counts(rho: &DensityMatrix, total: u64, seed: u64) -> Result<Vec<CountRecord>> {
    let mut records = noiseless_counts(rho, total)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in records.iter_mut() {
        let mean = r.expected.unwrap_or(0.0);
        r.observed = if mean > 0.0 {
            let dist = Poisson::new(mean).map_err(|_| Error::InvalidParameter {
                name: "expected",
                value: mean,
                reason: "not a valid Poisson mean",
            })?;
            dist.sample(&mut rng) as u64
        } else {
            0
        };
    }
    Ok(records)
}

/// Uhlmann fidelity `(tr√(√a·b·√a))²`, clamped to `[0, 1]`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let root = sqrt_psd(a.matrix());
    let (values, _) = eigh(&(root * *b.matrix() * root));
    let tr: f64 = values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    (tr * tr).clamp(0.0, 1.0)
}

/// `Σ_b n_b·ln μ_b − μ_b` with `μ_b = total_b · ⟨b|ρ|b⟩` (constant terms
/// dropped).
pub fn log_likelihood(rho: &DensityMatrix, counts: &[CountRecord]) -> f64 {
    let projectors = Projectors::new(counts);
    projectors.log_likelihood(rho.matrix()).0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Log-likelihood improvement counted as a stall.
    pub tolerance: f64,
    /// Consecutive stalls that end the optimization.
    pub patience: usize,
    /// Weight of `I/4` mixed into the starting point so that the Cholesky
    /// factor is well defined.
    pub initial_mixing: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tolerance: 1e-10,
            patience: 3,
            initial_mixing: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleResult {
    pub rho_hat: DensityMatrix,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub fidelity_vs_truth: Option<f64>,
}

impl MleResult {
    pub fn with_truth(mut self, truth: &DensityMatrix) -> Self {
        self.fidelity_vs_truth = Some(fidelity(&self.rho_hat, truth));
        self
    }
}

/// Per-record projector data used by the likelihood.
struct Projectors {
    kets: Vec<[C64; 4]>,
    observed: Vec<f64>,
    totals: Vec<f64>,
}

impl Projectors {
    fn new(counts: &[CountRecord]) -> Self {
        Self {
            kets: counts.iter().map(|r| r.basis.ket()).collect(),
            observed: counts.iter().map(|r| r.observed as f64).collect(),
            totals: counts.iter().map(|r| r.total as f64).collect(),
        }
    }

    /// Log-likelihood and its derivative `G = ∂L/∂ρ`.
    fn log_likelihood(&self, rho: &ComplexMatrix4) -> (f64, ComplexMatrix4) {
        let mut value = 0.0;
        let mut grad = Matrix::zeros();
        for ((ket, &n), &total) in self.kets.iter().zip(&self.observed).zip(&self.totals) {
            let p = rho.expectation(ket).re;
            let mu = total * p;
            if n > 0.0 {
                if !(p > 0.0) {
                    return (f64::NEG_INFINITY, grad);
                }
                value += n * mu.ln();
            }
            value -= mu;
            let weight = if n > 0.0 { n / p } else { 0.0 } - total;
            grad += Matrix::outer(ket, ket).scale_real(weight);
        }
        (value, grad)
    }
}

const PARAMETERS: usize = 16;
const SUB_DIAGONAL: [(usize, usize); 6] = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

fn unpack(x: &[f64; PARAMETERS]) -> ComplexMatrix4 {
    let mut t = Matrix::zeros();
    for i in 0..4 {
        t.0[i][i] = C64::new(x[i], 0.0);
    }
    for (k, &(i, j)) in SUB_DIAGONAL.iter().enumerate() {
        t.0[i][j] = C64::new(x[4 + 2 * k], x[5 + 2 * k]);
    }
    t
}

fn pack(t: &ComplexMatrix4) -> [f64; PARAMETERS] {
    let mut x = [0.0; PARAMETERS];
    for i in 0..4 {
        x[i] = t.0[i][i].re;
    }
    for (k, &(i, j)) in SUB_DIAGONAL.iter().enumerate() {
        x[4 + 2 * k] = t.0[i][j].re;
        x[5 + 2 * k] = t.0[i][j].im;
    }
    x
}

fn density_from_factor(t: &ComplexMatrix4) -> (ComplexMatrix4, f64) {
    let gram = t.adjoint() * *t;
    let tau = gram.trace().re;
    (gram.scale_real(1.0 / tau), tau)
}

/// Negative log-likelihood and its gradient in the packed parameters.
fn objective(projectors: &Projectors, x: &[f64; PARAMETERS]) -> (f64, [f64; PARAMETERS]) {
    let t = unpack(x);
    let (rho, tau) = density_from_factor(&t);
    if !(tau > 0.0) || !tau.is_finite() {
        return (f64::INFINITY, [0.0; PARAMETERS]);
    }
    let (value, g) = projectors.log_likelihood(&rho);
    if !value.is_finite() {
        return (f64::INFINITY, [0.0; PARAMETERS]);
    }
    let g_rho = (g * rho).trace().re;
    let shifted = g - Matrix::<4>::identity().scale_real(g_rho);
    let m = shifted * t.adjoint();
    let s = 2.0 / tau;
    let mut grad_t = Matrix::<4>::zeros();
    for i in 0..4 {
        for j in 0..=i {
            // ∂L/∂Re T_ij = s·Re M_ji, ∂L/∂Im T_ij = −s·Im M_ji
            grad_t.0[i][j] = C64::new(s * m.0[j][i].re, -s * m.0[j][i].im);
        }
    }
    let grad = pack(&grad_t).map(|v| -v);
    (-value, grad)
}

/// Lower-triangular `T` with `T†T = ρ`, via Cholesky of the index-reversed ρ.
fn lower_factor(rho: &ComplexMatrix4) -> ComplexMatrix4 {
    let flip = |m: &ComplexMatrix4| Matrix::<4>::from_fn(|i, j| m.0[3 - i][3 - j]);
    let a = flip(rho);
    let mut l = Matrix::<4>::zeros();
    for j in 0..4 {
        let mut d = a.0[j][j].re;
        for k in 0..j {
            d -= l.0[j][k].norm_sqr();
        }
        let d = d.max(1e-300).sqrt();
        l.0[j][j] = C64::new(d, 0.0);
        for i in j + 1..4 {
            let mut v = a.0[i][j];
            for k in 0..j {
                v -= l.0[i][k] * l.0[j][k].conj();
            }
            l.0[i][j] = v / d;
        }
    }
    flip(&l.adjoint())
}

/// Two-qubit Pauli products `σ_i ⊗ σ_j`, `i, j ∈ {I, X, Y, Z}`.
fn pauli_products() -> [ComplexMatrix4; 16] {
    let singles = [Matrix::<2>::identity(), sigma_x(), sigma_y(), sigma_z()];
    core::array::from_fn(|k| kron(&singles[k / 4], &singles[k % 4]))
}

/// Solves the square system `a·x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `1e-10` of the largest
/// entry.
fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    if !(scale > 0.0) {
        return None;
    }
    for col in 0..N {
        let pivot = (col..N).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 * scale {
            return None;
        }
        a.swap(pivot, col);
        b.swap(pivot, col);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut v = b[row];
        for k in row + 1..N {
            v -= a[row][k] * x[k];
        }
        x[row] = v / a[row][row];
    }
    Some(x)
}

fn validate_counts(counts: &[CountRecord]) -> Result<()> {
    if counts.is_empty() {
        return Err(Error::Underdetermined {
            reason: "no count records",
        });
    }
    for r in counts {
        require_total(r.total)?;
    }
    if counts.iter().all(|r| r.observed == 0) {
        return Err(Error::Underdetermined {
            reason: "all counts are zero",
        });
    }
    Ok(())
}

/// Least-squares linear inversion in the Pauli basis, with negative
/// eigenvalues clipped and the trace renormalized.
pub fn linear_inversion(counts: &[CountRecord]) -> Result<DensityMatrix> {
    validate_counts(counts)?;
    let paulis = pauli_products();
    // Normal equations of p_b = ¼·Σ_k r_k·⟨b|P_k|b⟩.
    let mut normal = [[0.0; 16]; 16];
    let mut rhs = [0.0; 16];
    for r in counts {
        let ket = r.basis.ket();
        let row: [f64; 16] = core::array::from_fn(|k| 0.25 * paulis[k].expectation(&ket).re);
        let f = r.observed as f64 / r.total as f64;
        for i in 0..16 {
            rhs[i] += row[i] * f;
            for j in 0..16 {
                normal[i][j] += row[i] * row[j];
            }
        }
    }
    let coeffs = solve_dense(normal, rhs).ok_or(Error::Underdetermined {
        reason: "projections are not informationally complete",
    })?;
    let raw = paulis
        .iter()
        .zip(coeffs.iter())
        .fold(Matrix::<4>::zeros(), |acc, (p, &c)| acc + p.scale_real(0.25 * c));
    let clipped = hermitian_function(&raw, |x| x.max(0.0));
    let tr = clipped.trace().re;
    if !(tr > 0.0) {
        return Ok(DensityMatrix::maximally_mixed());
    }
    DensityMatrix::new(clipped.scale_real(1.0 / tr))
}

pub fn mle_reconstruct(counts: &[CountRecord]) -> Result<MleResult> {
    mle_reconstruct_with(counts, &MleOptions::default())
}

const LBFGS_MEMORY: usize = 8;

/// Maximum-likelihood state estimate from count records.
pub fn mle_reconstruct_with(counts: &[CountRecord], options: &MleOptions) -> Result<MleResult> {
    let start = linear_inversion(counts)?;
    let projectors = Projectors::new(counts);

    let mix = options.initial_mixing.clamp(0.0, 1.0);
    let seed = start.matrix().scale_real(1.0 - mix) + Matrix::<4>::identity().scale_real(mix / 4.0);
    let mut x = pack(&lower_factor(&seed));
    let (mut f, mut g) = objective(&projectors, &x);
    if !f.is_finite() {
        // Linear inversion left a zero-probability projection with counts.
        let mixed = Matrix::<4>::identity().scale_real(0.25);
        x = pack(&lower_factor(&mixed));
        (f, g) = objective(&projectors, &x);
    }

    let mut history: Vec<([f64; PARAMETERS], [f64; PARAMETERS], f64)> = Vec::new();
    let mut stalls = 0;
    let mut iterations = 0;
    while stalls < options.patience {
        if iterations >= options.max_iterations {
            return Err(Error::NonConvergence { iterations });
        }
        iterations += 1;

        let mut direction = lbfgs_direction(&g, &history);
        let mut slope = dot(&g, &direction);
        if !(slope < 0.0) {
            history.clear();
            direction = g.map(|v| -v);
            slope = dot(&g, &direction);
        }
        let accepted = line_search(&projectors, &x, f, &direction, slope)
            .or_else(|| {
                if history.is_empty() {
                    return None;
                }
                history.clear();
                let steepest = g.map(|v| -v);
                line_search(&projectors, &x, f, &steepest, dot(&g, &steepest))
            });

        let Some((x_new, f_new, g_new)) = accepted else {
            stalls += 1;
            continue;
        };

        let improvement = f - f_new;
        let s: [f64; PARAMETERS] = core::array::from_fn(|i| x_new[i] - x[i]);
        let y: [f64; PARAMETERS] = core::array::from_fn(|i| g_new[i] - g[i]);
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == LBFGS_MEMORY {
                history.remove(0);
            }
            history.push((s, y, 1.0 / sy));
        }
        x = x_new;
        f = f_new;
        g = g_new;
        if improvement < options.tolerance {
            stalls += 1;
        } else {
            stalls = 0;
        }
    }

    let (rho, _) = density_from_factor(&unpack(&x));
    Ok(MleResult {
        rho_hat: DensityMatrix::new(rho)?,
        log_likelihood: -f,
        iterations,
        fidelity_vs_truth: None,
    })
}

fn dot(a: &[f64; PARAMETERS], b: &[f64; PARAMETERS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion for the L-BFGS search direction.
fn lbfgs_direction(
    g: &[f64; PARAMETERS],
    history: &[([f64; PARAMETERS], [f64; PARAMETERS], f64)],
) -> [f64; PARAMETERS] {
    let mut q = *g;
    let mut alphas = [0.0; LBFGS_MEMORY];
    for (k, (s, y, rho)) in history.iter().enumerate().rev() {
        let alpha = rho * dot(s, &q);
        alphas[k] = alpha;
        for i in 0..PARAMETERS {
            q[i] -= alpha * y[i];
        }
    }
    if let Some((s, y, _)) = history.last() {
        let gamma = dot(s, y) / dot(y, y);
        q = q.map(|v| v * gamma);
    }
    for (k, (s, y, rho)) in history.iter().enumerate() {
        let beta = rho * dot(y, &q);
        for i in 0..PARAMETERS {
            q[i] += s[i] * (alphas[k] - beta);
        }
    }
    q.map(|v| -v)
}

/// Backtracking line search with the Armijo condition.
fn line_search(
    projectors: &Projectors,
    x: &[f64; PARAMETERS],
    f: f64,
    direction: &[f64; PARAMETERS],
    slope: f64,
) -> Option<([f64; PARAMETERS], f64, [f64; PARAMETERS])> {
    if !(slope < 0.0) {
        return None;
    }
    // Keep the first trial step comparable to the parameter scale.
    let x_norm = dot(x, x).sqrt();
    let d_norm = dot(direction, direction).sqrt();
    let mut step = if d_norm > x_norm && d_norm > 0.0 {
        x_norm / d_norm
    } else {
        1.0
    };
    for _ in 0..60 {
        let trial: [f64; PARAMETERS] = core::array::from_fn(|i| x[i] + step * direction[i]);
        let (f_trial, g_trial) = objective(projectors, &trial);
        if f_trial.is_finite() && f_trial <= f + 1e-4 * step * slope {
            return Some((trial, f_trial, g_trial));
        }
        step *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence;
    use crate::optics::WavePlate;
    use crate::linalg::I;

    #[test]
    fn basis_order_and_kets() {
        let set = basis_set();
        let labels: Vec<_> = set.iter().map(|b| alloc::format!("{}", b.label)).collect();
        assert_eq!(
            labels,
            [
                "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD",
                "VL", "HL", "RL"
            ]
        );
        assert_eq!(set[0].ket, [ONE, ZERO, ZERO, ZERO]);
        let dd = set.iter().find(|b| b.label == "DD".parse().unwrap()).unwrap();
        assert!(dd.ket.iter().all(|z| (z - C64::new(0.5, 0.0)).norm() < 1e-15));
        for b in &set {
            let n: f64 = b.ket.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn analyzer_settings_project_onto_the_labelled_state() {
        use Polarization::*;
        for p in [H, V, D, R, L] {
            let s = p.settings();
            let analyzer =
                WavePlate::half(s.hwp_deg).matrix() * WavePlate::quarter(s.qwp_deg).matrix();
            let out = analyzer.mul_vec(&p.ket());
            assert!((out[0].norm() - 1.0).abs() < 1e-14, "{p:?}");
        }
    }

    #[test]
    fn label_parsing() {
        assert_eq!("RL".parse::<BasisLabel>(), Ok(BasisLabel(Polarization::R, Polarization::L)));
        assert!("HX".parse::<BasisLabel>().is_err());
        assert!("HHH".parse::<BasisLabel>().is_err());
        assert!("H".parse::<BasisLabel>().is_err());
    }

    #[test]
    fn expected_counts_for_reference_states() {
        let hh = DensityMatrix::from_pure(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        let counts = noiseless_counts(&hh, 10_000).unwrap();
        assert_eq!(counts[0].expected, Some(10_000.0));

        let counts = noiseless_counts(&DensityMatrix::bell(), 10_000).unwrap();
        let get = |l: &str| {
            let label: BasisLabel = l.parse().unwrap();
            counts.iter().find(|r| r.basis == label).unwrap().expected.unwrap()
        };
        assert!(get("HH").abs() < 1e-9);
        assert!((get("HV") - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn zero_total_rejected() {
        assert!(simulate_counts(&DensityMatrix::bell(), 0, 1).unwrap_err().is_validation());
    }

    #[test]
    fn simulated_counts_are_seed_deterministic() {
        let rho = DensityMatrix::bell();
        let a = simulate_counts(&rho, 10_000, 42).unwrap();
        let b = simulate_counts(&rho, 10_000, 42).unwrap();
        let c = simulate_counts(&rho, 10_000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // Zero-mean projections never fire.
        assert_eq!(a[0].observed, 0);
    }

    #[test]
    fn fidelity_reference_values() {
        let hh = DensityMatrix::from_pure(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        let vv = DensityMatrix::from_pure(&[ZERO, ZERO, ZERO, ONE]).unwrap();
        let bell = DensityMatrix::bell();
        assert!((fidelity(&bell, &bell) - 1.0).abs() < 1e-12);
        assert!(fidelity(&hh, &vv) < 1e-12);
        assert!((fidelity(&bell, &DensityMatrix::maximally_mixed()) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let truth = DensityMatrix::new(
            *DensityMatrix::bell().matrix() * C64::new(0.7, 0.0)
                + Matrix::<4>::identity().scale_real(0.3 / 4.0),
        )
        .unwrap();
        let counts = simulate_counts(&truth, 5_000, 7).unwrap();
        let projectors = Projectors::new(&counts);
        let x: [f64; PARAMETERS] =
            core::array::from_fn(|i| 0.3 + 0.05 * i as f64 * if i % 3 == 0 { -1.0 } else { 1.0 });
        let (_, grad) = objective(&projectors, &x);
        for i in 0..PARAMETERS {
            let h = 1e-6;
            let mut up = x;
            let mut down = x;
            up[i] += h;
            down[i] -= h;
            let fd = (objective(&projectors, &up).0 - objective(&projectors, &down).0) / (2.0 * h);
            assert!(
                (fd - grad[i]).abs() < 1e-5 * (1.0 + fd.abs()),
                "param {i}: fd={fd} analytic={}",
                grad[i]
            );
        }
    }

    #[test]
    fn lower_factor_round_trip() {
        let rho = DensityMatrix::new(
            Matrix::diag([0.4, 0.3, 0.2, 0.1].map(|x| C64::new(x, 0.0)))
                + Matrix::from_fn(|i, j| match (i, j) {
                    (0, 3) => C64::new(0.05, 0.02),
                    (3, 0) => C64::new(0.05, -0.02),
                    (1, 2) => I * 0.1,
                    (2, 1) => -I * 0.1,
                    _ => ZERO,
                }),
        )
        .unwrap();
        let t = lower_factor(rho.matrix());
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(t.0[i][j], ZERO);
            }
        }
        let (back, _) = density_from_factor(&t);
        assert!(back.max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn maximally_mixed_noiseless() {
        let truth = DensityMatrix::maximally_mixed();
        let counts = noiseless_counts(&truth, DEFAULT_TOTAL).unwrap();
        let result = mle_reconstruct(&counts).unwrap().with_truth(&truth);
        assert!(result.fidelity_vs_truth.unwrap() > 0.999);
        assert!(result.rho_hat.matrix().max_abs_diff(truth.matrix()) < 1e-3);
    }

    #[test]
    fn bell_noiseless() {
        let truth = DensityMatrix::bell();
        let counts = noiseless_counts(&truth, DEFAULT_TOTAL).unwrap();
        let result = mle_reconstruct(&counts).unwrap().with_truth(&truth);
        assert!(result.fidelity_vs_truth.unwrap() > 0.999, "{result:?}");
        assert!(concurrence(&result.rho_hat).unwrap().value > 0.998);
        assert!(result.log_likelihood >= log_likelihood(&linear_inversion(&counts).unwrap(), &counts) - 1e-6);
    }

    #[test]
    fn mle_rejects_empty_or_incomplete_data() {
        assert!(mle_reconstruct(&[]).is_err());
        let counts = noiseless_counts(&DensityMatrix::bell(), 100).unwrap();
        assert!(matches!(
            mle_reconstruct(&counts[..4]),
            Err(Error::Underdetermined { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let counts = simulate_counts(&DensityMatrix::bell(), 10_000, 3).unwrap();
        let options = MleOptions {
            max_iterations: 2,
            ..MleOptions::default()
        };
        assert_eq!(
            mle_reconstruct_with(&counts, &options),
            Err(Error::NonConvergence { iterations: 2 })
        );
    }
}
