//! Numeric evaluation of the multivariable theta function
//! θ_b(τ, z) = Σ_v exp(πiτ·b(v,v) + 2πi·b(v,z)) and verification of its
//! transformation laws at sample points.
//!
//! This is the one module where floating point is allowed: it checks
//! analytic identities within a tolerance; everything exact lives in
//! [`crate::qtheta`]. Vectors are enumerated once per evaluator with a
//! float Fincke–Pohst sweep, then kept or dropped by their exact integer
//! norm, so the cached term list is exact even though the search is not.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bilform::BilinearForm;
use crate::error::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Evaluator for a fixed even positive-definite lattice: caches every
/// vector with ½b(v,v) ≤ R² so repeated evaluations are cheap. Only
/// b(v,v) and the integer pairing row Gv matter for θ, so those are what
/// get stored.
#[derive(Debug, Clone)]
pub struct JacobiEvaluator {
    b: BilinearForm,
    /// cutoff radius R; vectors with ½b(v,v) ≤ R² are summed exactly
    radius: u32,
    /// working precision in binary digits (f64 evaluation gives 53)
    precision_bits: u32,
    /// largest cached norm b(v,v) = 2R²
    budget: i64,
    tol: f64,
    /// per-vector norms b(v,v)
    norms: Vec<i32>,
    /// per-vector rows Gv, flattened (length = norms.len() · rank)
    gv_flat: Vec<i16>,
    /// max |(Gv)_i| over the cache, sizing the power tables
    kmax: usize,
    /// float Gram for pairings with complex arguments
    gram_f: Vec<Vec<f64>>,
    /// lower bound on the smallest eigenvalue of the Gram matrix
    lambda_min: f64,
    /// exact vector counts by half-norm n for the tail window just past
    /// the cutoff; the crude geometric bound only kicks in after these
    exact_counts: Vec<f64>,
}

impl JacobiEvaluator {
    /// Sum exactly over ½b(v,v) ≤ `radius`²; `tol` caps the acceptable
    /// tail bound per evaluation.
    pub fn new(b: BilinearForm, radius: u32, tol: f64) -> Result<Self> {
        Self::with_precision(b, radius, tol, 53)
    }

    /// `precision_bits` must be ≥ 53; evaluation runs in f64, which
    /// provides exactly 53.
    pub fn with_precision(
        b: BilinearForm,
        radius: u32,
        tol: f64,
        precision_bits: u32,
    ) -> Result<Self> {
        if radius < 1 {
            return Err(Error::PreconditionFailed("cutoff radius must be ≥ 1".into()));
        }
        if precision_bits < 53 {
            return Err(Error::PreconditionFailed(
                "working precision must be ≥ 53 binary digits".into(),
            ));
        }
        if !b.is_even() {
            return Err(Error::NotEven);
        }
        let budget = 2 * (radius as i64) * (radius as i64);
        let d = b.rank();
        let gram_i: Vec<Vec<i64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| b.gram().at(i, j).to_i64().expect("desk-scale entries"))
                    .collect()
            })
            .collect();
        let gram_f: Vec<Vec<f64>> =
            gram_i.iter().map(|row| row.iter().map(|&x| x as f64).collect()).collect();
        let (norms, gv_flat, kmax) = enumerate_terms(&gram_i, &gram_f, budget)?;
        // λ_min(G) ≥ 1 / λ_max(G⁻¹) ≥ 1 / (d · max |G⁻¹_ij|)
        let lambda_min = if d == 0 {
            1.0
        } else {
            let inv = b.gram().rational_inverse().map_err(|_| Error::SingularMatrix)?;
            let mut maxabs: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    maxabs = maxabs.max(inv.at(i, j).to_f64().unwrap_or(f64::MAX).abs());
                }
            }
            1.0 / (d as f64 * maxabs)
        };
        // exact counts for half-norms n0 < n ≤ n_ext tighten the tail
        // bound by orders of magnitude over the box-count estimate
        let n0 = (radius as i64) * (radius as i64);
        let n_ext = 2 * n0 + 24;
        let exact_counts = if d == 0 {
            Vec::new()
        } else {
            let theta = crate::qtheta::theta_series(&b, n_ext + 1)?;
            ((n0 + 1)..=n_ext)
                .map(|n| {
                    theta
                        .series
                        .coeff(n)
                        .map(|c| c.to_f64().unwrap_or(f64::MAX))
                        .unwrap_or(0.0)
                })
                .collect()
        };
        Ok(JacobiEvaluator {
            b,
            radius,
            precision_bits,
            budget,
            tol,
            norms,
            gv_flat,
            kmax,
            gram_f,
            lambda_min,
            exact_counts,
        })
    }

    pub fn with_defaults(b: BilinearForm) -> Result<Self> {
        Self::new(b, 4, 1e-8)
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn form(&self) -> &BilinearForm {
        &self.b
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn cached_vectors(&self) -> usize {
        self.norms.len()
    }

    /// Norms b(v,v) of every cached vector, in enumeration order.
    pub fn norm_histogram(&self) -> Vec<i64> {
        self.norms.iter().map(|&n| n as i64).collect()
    }

    fn dim(&self) -> usize {
        self.b.rank()
    }

    /// Complex bilinear pairing b(x, y) = xᵀ G y.
    fn pair(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += x[i] * self.gram_f[i][j] * y[j];
            }
        }
        acc
    }

    /// Truncated θ_b(τ, z) with an a-priori tail bound; errors if the
    /// bound exceeds the configured tolerance.
    pub fn theta_eval(&self, tau: Complex64, z: &[Complex64]) -> Result<(Complex64, f64)> {
        if tau.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane);
        }
        let d = self.dim();
        if z.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "z has {} coordinates, form has rank {}",
                z.len(),
                d
            )));
        }
        let bound = self.tail_bound(tau.im, z);
        if !(bound <= self.tol) {
            return Err(Error::TailBoundTooLarge { bound, tol: self.tol });
        }
        // The summand factors as q^{b(v,v)} · Π_i w_i^{(Gv)_i} with
        // q = e^{πiτ} and w_i = e^{2πi z_i}; tabulating the powers avoids
        // one complex exp per cached vector.
        let q = (Complex64::new(0.0, PI) * tau).exp();
        let mut qpow = vec![Complex64::new(1.0, 0.0); self.budget as usize + 1];
        for n in 1..qpow.len() {
            qpow[n] = qpow[n - 1] * q;
        }
        let k = self.kmax;
        let width = 2 * k + 1;
        let mut wpow = vec![Complex64::new(1.0, 0.0); d.max(1) * width];
        for i in 0..d {
            let w = (Complex64::new(0.0, 2.0 * PI) * z[i]).exp();
            let winv = w.finv();
            for step in 1..=k {
                wpow[i * width + k + step] = wpow[i * width + k + step - 1] * w;
                wpow[i * width + k - step] = wpow[i * width + k - step + 1] * winv;
            }
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (idx, &norm) in self.norms.iter().enumerate() {
            let mut term = qpow[norm as usize];
            let gv = &self.gv_flat[idx * d..(idx + 1) * d];
            for (i, &g) in gv.iter().enumerate() {
                term *= wpow[i * width + (k as i64 + g as i64) as usize];
            }
            sum += term;
        }
        Ok((sum, bound))
    }

    /// Upper bound for the dropped terms Σ_{½b(v,v) > R²} |…| using
    /// |b(v, Im z)| ≤ √(b(v,v))·√(b(y,y)), exact vector counts in the
    /// window just past the cutoff, and the crude box count
    /// (2⌊√(2n/λ_min)⌋+1)^d beyond it, summed with a geometric remainder.
    fn tail_bound(&self, im_tau: f64, z: &[Complex64]) -> f64 {
        let d = self.dim() as i32;
        if d == 0 {
            return 0.0;
        }
        let y: Vec<Complex64> = z.iter().map(|w| Complex64::new(w.im, 0.0)).collect();
        let s = self.pair(&y, &y).re.max(0.0).sqrt();
        // index by half-norms n = ½b(v,v); the cache stops at n0
        let n0 = (self.radius as f64) * (self.radius as f64);
        let magnitude =
            |n: f64| -> f64 { (-2.0 * PI * im_tau * n + 2.0 * PI * (2.0 * n).sqrt() * s).exp() };
        let mut total = 0.0;
        for (k, &count) in self.exact_counts.iter().enumerate() {
            total += count * magnitude(n0 + 1.0 + k as f64);
        }
        let crude = |n: f64| -> f64 {
            let count = (2.0 * (2.0 * n / self.lambda_min).sqrt().floor() + 1.0).powi(d);
            count * magnitude(n)
        };
        let start = n0 + self.exact_counts.len() as f64 + 1.0;
        let mut n = start;
        let mut prev = crude(n);
        total += prev;
        loop {
            n += 1.0;
            let t = crude(n);
            total += t;
            let ratio = t / prev;
            prev = t;
            if t < 1e-300 {
                break;
            }
            if ratio < 0.5 && n > start + 16.0 {
                // geometric remainder
                total += t * ratio / (1.0 - ratio);
                break;
            }
            if n > start + 4096.0 {
                return f64::INFINITY;
            }
        }
        total
    }

    /// The automorphy factor without the weight piece: for A ∈ SL₂(Z) it
    /// is exp(πi·c·(cτ+d)⁻¹·b(z,z)); for a lattice shift (m₁, m₂) it is
    /// exp(−2πi·(b(z,m₁) + ½b(m₁,m₁)τ)).
    pub fn cocycle_factor(
        &self,
        element: &GroupElement,
        tau: Complex64,
        z: &[Complex64],
    ) -> Result<Complex64> {
        match element {
            GroupElement::Sl2(m) => {
                check_sl2(m)?;
                let c = m[1][0] as f64;
                let dd = m[1][1] as f64;
                let denom = tau * c + dd;
                let zz = self.pair(z, z);
                Ok((Complex64::new(0.0, PI) * c / denom * zz).exp())
            }
            GroupElement::Shift(m1, _m2) => {
                let m1c: Vec<Complex64> =
                    m1.iter().map(|&k| Complex64::new(k as f64, 0.0)).collect();
                let bzm = self.pair(z, &m1c);
                let bmm = self.pair(&m1c, &m1c);
                Ok((Complex64::new(0.0, -2.0 * PI) * (bzm + bmm * tau * 0.5)).exp())
            }
        }
    }

    /// Full automorphy factor including the weight-(rank/2) piece; for
    /// ranks divisible by 8 the power is integral and branch-free.
    pub fn full_factor(
        &self,
        element: &GroupElement,
        tau: Complex64,
        z: &[Complex64],
    ) -> Result<Complex64> {
        let base = self.cocycle_factor(element, tau, z)?;
        match element {
            GroupElement::Sl2(m) => {
                let c = m[1][0] as f64;
                let dd = m[1][1] as f64;
                let denom = tau * c + dd;
                Ok(denom.powf(self.dim() as f64 / 2.0) * base)
            }
            GroupElement::Shift(..) => Ok(base),
        }
    }

    /// Residual of the transformation law at the given samples: for
    /// A ∈ SL₂, |θ(Aτ, (cτ+d)⁻¹z) − (cτ+d)^{rank/2}·factor·θ(τ,z)|; for a
    /// shift, |θ(τ, z + m₁τ + m₂) − factor·θ(τ,z)|.
    pub fn check_transformation(
        &self,
        element: &GroupElement,
        samples: &[(Complex64, Vec<Complex64>)],
        tol: f64,
    ) -> Result<TransformationReport> {
        let mut max_residual: f64 = 0.0;
        let mut max_tail: f64 = 0.0;
        for (tau, z) in samples {
            if let GroupElement::Sl2(m) = element {
                check_sl2(m)?;
            }
            let (theta, tail1) = self.theta_eval(*tau, z)?;
            let (tau2, z2) = element.act(*tau, z);
            let (lhs, tail2) = self.theta_eval(tau2, &z2)?;
            let rhs = self.full_factor(element, *tau, z)? * theta;
            max_residual = max_residual.max((lhs - rhs).norm());
            max_tail = max_tail.max(tail1.max(tail2));
        }
        Ok(TransformationReport {
            samples: samples.len(),
            max_residual,
            max_tail_bound: max_tail,
            tol,
            pass: max_residual < tol,
        })
    }
}

/// Float Fincke–Pohst sweep over the lattice, with every candidate kept or
/// dropped by its exact integer norm ≤ budget. Returns (norms, flattened
/// Gv rows, max |Gv| entry).
fn enumerate_terms(
    gram_i: &[Vec<i64>],
    gram_f: &[Vec<f64>],
    budget: i64,
) -> Result<(Vec<i32>, Vec<i16>, usize)> {
    let d = gram_i.len();
    if d == 0 {
        return Ok((vec![0], vec![], 0));
    }
    // LDLᵀ: Q(x) = Σ_i diag_i (x_i + Σ_{j>i} u_{ij} x_j)²
    let mut diag = vec![0.0f64; d];
    let mut u = vec![vec![0.0f64; d]; d];
    let mut work: Vec<Vec<f64>> = gram_f.to_vec();
    for i in 0..d {
        diag[i] = work[i][i];
        if diag[i] <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        for j in (i + 1)..d {
            u[i][j] = work[i][j] / diag[i];
        }
        for r in (i + 1)..d {
            for c in (i + 1)..d {
                work[r][c] -= work[i][c] * work[i][r] / diag[i];
            }
        }
    }
    let slack = budget as f64 * 1e-9 + 1e-9;
    let limit = budget as f64 + slack;
    let mut state = EnumState {
        gram_i,
        diag: &diag,
        u: &u,
        budget,
        limit,
        x: vec![0i64; d],
        norms: Vec::new(),
        gv_flat: Vec::new(),
        kmax: 0,
    };
    state.descend(d, 0.0);
    Ok((state.norms, state.gv_flat, state.kmax))
}

struct EnumState<'a> {
    gram_i: &'a [Vec<i64>],
    diag: &'a [f64],
    u: &'a [Vec<f64>],
    budget: i64,
    limit: f64,
    x: Vec<i64>,
    norms: Vec<i32>,
    gv_flat: Vec<i16>,
    kmax: usize,
}

impl EnumState<'_> {
    /// Choose coordinate `level − 1` given the ones above it; `partial` is
    /// the Q-value of the already-chosen coordinates.
    fn descend(&mut self, level: usize, partial: f64) {
        let d = self.diag.len();
        let i = level - 1;
        let center: f64 = ((i + 1)..d).map(|j| self.u[i][j] * self.x[j] as f64).sum();
        let radius = ((self.limit - partial) / self.diag[i]).max(0.0).sqrt();
        let lo = (-center - radius).ceil() as i64;
        let hi = (-center + radius).floor() as i64;
        for xi in lo..=hi {
            self.x[i] = xi;
            if i == 0 {
                self.emit();
            } else {
                let dev = xi as f64 + center;
                self.descend(i, partial + self.diag[i] * dev * dev);
            }
        }
        self.x[i] = 0;
    }

    /// Exact norm decides membership; float bounds only pruned the search.
    fn emit(&mut self) {
        let d = self.diag.len();
        let mut norm: i64 = 0;
        let mut gv = vec![0i64; d];
        for r in 0..d {
            let mut row = 0i64;
            for c in 0..d {
                row += self.gram_i[r][c] * self.x[c];
            }
            gv[r] = row;
            norm += self.x[r] * row;
        }
        if norm <= self.budget {
            self.norms.push(i32::try_from(norm).expect("norm fits i32"));
            for &g in &gv {
                self.kmax = self.kmax.max(g.unsigned_abs() as usize);
                self.gv_flat.push(i16::try_from(g).expect("pairing fits i16"));
            }
        }
    }
}

/// Group element acting on (τ, z): an SL₂(Z) matrix or a lattice shift
/// z ↦ z + m₁τ + m₂.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupElement {
    Sl2([[i64; 2]; 2]),
    Shift(Vec<i64>, Vec<i64>),
}

impl GroupElement {
    pub fn s() -> Self {
        GroupElement::Sl2([[0, -1], [1, 0]])
    }

    pub fn t() -> Self {
        GroupElement::Sl2([[1, 1], [0, 1]])
    }

    /// Matrix product for SL₂ elements.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Sl2(a), GroupElement::Sl2(b)) => {
                let mut m = [[0i64; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                    }
                }
                Ok(GroupElement::Sl2(m))
            }
            _ => Err(Error::PreconditionFailed(
                "composition implemented for SL2 elements only".into(),
            )),
        }
    }

    /// Action on (τ, z).
    pub fn act(&self, tau: Complex64, z: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        match self {
            GroupElement::Sl2(m) => {
                let (a, b, c, d) =
                    (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
                let denom = tau * c + d;
                ((tau * a + b) / denom, z.iter().map(|w| w / denom).collect())
            }
            GroupElement::Shift(m1, m2) => (
                tau,
                z.iter()
                    .zip(m1.iter().zip(m2.iter()))
                    .map(|(w, (&p, &q))| w + tau * p as f64 + q as f64)
                    .collect(),
            ),
        }
    }
}

/// Checks that `m` has determinant 1.
pub fn check_sl2(m: &[[i64; 2]; 2]) -> Result<()> {
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1 {
        return Err(Error::NotSL2);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformationReport {
    pub samples: usize,
    pub max_residual: f64,
    pub max_tail_bound: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Standard sample points: τ chosen so that both Im τ and Im(−1/τ) stay
/// near 1 (keeping tails small on both sides of the S law), with small z.
pub fn default_samples(dim: usize) -> Vec<(Complex64, Vec<Complex64>)> {
    let taus = [
        Complex64::new(0.0, 1.0),
        Complex64::new(0.2, 1.05),
        Complex64::new(-0.25, 1.1),
        Complex64::new(0.1, 0.98),
        Complex64::new(-0.15, 1.0),
    ];
    taus.iter()
        .enumerate()
        .map(|(k, &tau)| {
            let z: Vec<Complex64> = (0..dim)
                .map(|i| {
                    Complex64::new(
                        0.05 * ((i + k) % 3) as f64,
                        0.03 * ((i + 2 * k) % 2) as f64,
                    )
                })
                .collect();
            (tau, z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices;

    fn a1_eval() -> JacobiEvaluator {
        JacobiEvaluator::new(BilinearForm::rank_one(2), 6, 1e-8).unwrap()
    }

    fn e8_eval() -> JacobiEvaluator {
        JacobiEvaluator::new(lattices::e8(), 4, 1e-8).unwrap()
    }

    #[test]
    fn theta_near_one_high_in_upper_half_plane() {
        // b = (2), τ = 5i, z = 0: θ = 1 + 2e^{−10π} + … ≈ 1
        let ev = a1_eval();
        let (val, _) =
            ev.theta_eval(Complex64::new(0.0, 5.0), &[Complex64::new(0.0, 0.0)]).unwrap();
        assert!((val - 1.0).norm() < 1e-12, "{val}");
    }

    #[test]
    fn vector_count_matches_exact_theta_series() {
        // coefficient sums of the exact Θ must equal the cache size
        let ev = e8_eval();
        let theta = crate::qtheta::theta_series(&lattices::e8(), 17).unwrap();
        let mut expected = num_bigint::BigInt::from(0);
        for n in 0..=16 {
            if let Some(c) = theta.series.coeff(n) {
                expected += c.to_integer();
            }
        }
        assert_eq!(num_bigint::BigInt::from(ev.cached_vectors()), expected);
    }

    #[test]
    fn rejects_lower_half_plane_and_bad_shapes() {
        let ev = a1_eval();
        assert!(matches!(
            ev.theta_eval(Complex64::new(0.0, -1.0), &[Complex64::new(0.0, 0.0)]),
            Err(Error::NotInUpperHalfPlane)
        ));
        assert!(matches!(
            ev.theta_eval(Complex64::new(0.0, 1.0), &[]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tail_bound_blows_up_for_tiny_imaginary_part() {
        let ev = a1_eval();
        assert!(matches!(
            ev.theta_eval(Complex64::new(0.0, 1e-3), &[Complex64::new(0.0, 0.0)]),
            Err(Error::TailBoundTooLarge { .. })
        ));
    }

    #[test]
    fn integer_periodicity_and_t_invariance() {
        let ev = a1_eval();
        let samples = default_samples(1);
        // z ↦ z + m₂ leaves θ fixed (factor 1)
        let shift = GroupElement::Shift(vec![0], vec![1]);
        let rep = ev.check_transformation(&shift, &samples, 1e-10).unwrap();
        assert!(rep.pass, "{rep:?}");
        // τ ↦ τ+1 leaves θ fixed for even lattices
        let rep = ev.check_transformation(&GroupElement::t(), &samples, 1e-10).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn lattice_shift_law() {
        let ev = a1_eval();
        let samples = vec![(Complex64::new(0.0, 1.0), vec![Complex64::new(0.1, 0.2)])];
        let shift = GroupElement::Shift(vec![1], vec![0]);
        let rep = ev.check_transformation(&shift, &samples, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn e8_t_and_s_laws() {
        let ev = e8_eval();
        let samples = default_samples(8);
        let rep = ev.check_transformation(&GroupElement::t(), &samples, 1e-8).unwrap();
        assert!(rep.pass, "T law: {rep:?}");
        let rep = ev.check_transformation(&GroupElement::s(), &samples, 1e-8).unwrap();
        assert!(rep.pass, "S law: {rep:?}");
    }

    #[test]
    fn e8_shift_law() {
        let ev = e8_eval();
        let mut m1 = vec![0i64; 8];
        m1[2] = 1;
        let mut m2 = vec![0i64; 8];
        m2[5] = -1;
        let shift = GroupElement::Shift(m1, m2);
        let samples = default_samples(8);
        let rep = ev.check_transformation(&shift, &samples, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn cocycle_composition_identity() {
        let ev = e8_eval();
        let tau = Complex64::new(0.1, 1.2);
        let z: Vec<Complex64> =
            (0..8).map(|i| Complex64::new(0.03 * i as f64, 0.02)).collect();
        let pairs = [
            (GroupElement::t(), GroupElement::s()),
            (GroupElement::s(), GroupElement::t()),
            (GroupElement::Sl2([[1, 2], [0, 1]]), GroupElement::Sl2([[1, 0], [3, 1]])),
            (GroupElement::Sl2([[2, 1], [1, 1]]), GroupElement::Sl2([[1, -1], [0, 1]])),
        ];
        for (g1, g2) in &pairs {
            let g12 = g1.compose(g2).unwrap();
            let lhs = ev.full_factor(&g12, tau, &z).unwrap();
            let (tau2, z2) = g2.act(tau, &z);
            let rhs =
                ev.full_factor(g1, tau2, &z2).unwrap() * ev.full_factor(g2, tau, &z).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "cocycle failed for {g1:?}·{g2:?}");
        }
    }

    #[test]
    fn doubling_radius_never_increases_tail_bound() {
        let b = BilinearForm::rank_one(2);
        let small = JacobiEvaluator::new(b.clone(), 2, 1e4).unwrap();
        let big = JacobiEvaluator::new(b, 4, 1e4).unwrap();
        let tau = Complex64::new(0.0, 0.4);
        let z = [Complex64::new(0.1, 0.1)];
        let (_, t_small) = small.theta_eval(tau, &z).unwrap();
        let (_, t_big) = big.theta_eval(tau, &z).unwrap();
        assert!(t_big <= t_small, "tail {t_big} vs {t_small}");
    }
}
