//! Exact Laurent q-series arithmetic, the modular discriminant Δ, lattice
//! theta series by exact vector enumeration, and the conjectural edge image
//! Δ^{−d/8}·Θ_b with modular-weight bookkeeping.
//!
//! Everything in this module is exact: coefficients are big rationals and
//! the enumeration bounds use integer square roots, never floating point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bilform::BilinearForm;
use crate::error::{Error, Result};

/// A truncated Laurent series in q: coefficients are known exactly for all
/// exponents `< trunc` (and vanish below some finite lowest exponent).
/// Carries an optional modular-weight tag; weights add under
/// multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    /// nonzero known coefficients, exponent -> value
    coeffs: BTreeMap<i64, BigRational>,
    /// coefficients are valid on exponents < trunc
    trunc: i64,
    weight: Option<BigRational>,
}

impl QSeries {
    pub fn zero(trunc: i64) -> Self {
        QSeries { coeffs: BTreeMap::new(), trunc, weight: None }
    }

    pub fn one(trunc: i64) -> Self {
        Self::monomial(0, BigRational::one(), trunc)
    }

    pub fn monomial(exp: i64, coeff: BigRational, trunc: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if exp < trunc && !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        QSeries { coeffs, trunc, weight: None }
    }

    pub fn from_integer_coeffs(pairs: &[(i64, i64)], trunc: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(e, c) in pairs {
            if e < trunc && c != 0 {
                coeffs.insert(e, BigRational::from_integer(BigInt::from(c)));
            }
        }
        QSeries { coeffs, trunc, weight: None }
    }

    pub fn with_weight(mut self, w: BigRational) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn weight(&self) -> Option<&BigRational> {
        self.weight.as_ref()
    }

    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    /// Exact coefficient at `n`, or None if `n` lies beyond the truncation.
    pub fn coeff(&self, n: i64) -> Option<BigRational> {
        if n >= self.trunc {
            return None;
        }
        Some(self.coeffs.get(&n).cloned().unwrap_or_else(BigRational::zero))
    }

    /// Lowest exponent with a nonzero known coefficient, if any.
    pub fn lowest(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All known coefficients have integer values.
    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let trunc = self.trunc.min(other.trunc);
        let mut coeffs = BTreeMap::new();
        for (e, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if *e < trunc {
                let entry = coeffs.entry(*e).or_insert_with(BigRational::zero);
                *entry += c;
            }
        }
        coeffs.retain(|_, c: &mut BigRational| !c.is_zero());
        QSeries { coeffs, trunc, weight: None }
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            trunc: self.trunc,
            weight: self.weight.clone(),
        }
    }

    /// Product; validity window shrinks to what both factors determine:
    /// exponent e is known iff every split e = a + b with a, b above the
    /// factors' lowest exponents has both parts known.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let lo_a = self.lowest().unwrap_or(self.trunc);
        let lo_b = other.lowest().unwrap_or(other.trunc);
        let trunc = (self.trunc + lo_b).min(other.trunc + lo_a);
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if e < trunc {
                    *coeffs.entry(e).or_insert_with(BigRational::zero) += ca * cb;
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        let weight = match (&self.weight, &other.weight) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        QSeries { coeffs, trunc, weight }
    }

    pub fn pow(&self, k: u64) -> QSeries {
        let mut acc = QSeries::one(self.trunc).with_weight(BigRational::zero());
        if self.weight.is_none() {
            acc.weight = None;
        }
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse, requiring an invertible (nonzero) leading
    /// coefficient. The inverse of a series with lowest exponent m has
    /// lowest exponent −m.
    pub fn invert_unit(&self) -> Result<QSeries> {
        let m = self.lowest().ok_or(Error::NonUnitLeading)?;
        let lead = self.coeffs[&m].clone();
        if lead.is_zero() {
            return Err(Error::NonUnitLeading);
        }
        // self = q^m · lead · (1 + t), invert the three factors
        let n_terms = self.trunc - m; // known coefficients of (1 + t)
        let mut inv = vec![BigRational::zero(); n_terms.max(0) as usize];
        if inv.is_empty() {
            return Err(Error::NonUnitLeading);
        }
        // u[k] = coefficient of q^k in self / (lead·q^m)
        let u = |k: i64| -> BigRational {
            self.coeffs
                .get(&(k + m))
                .map(|c| c / &lead)
                .unwrap_or_else(BigRational::zero)
        };
        inv[0] = BigRational::one();
        for k in 1..n_terms {
            let mut s = BigRational::zero();
            for i in 1..=k {
                s += u(i) * &inv[(k - i) as usize];
            }
            inv[k as usize] = -s;
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in inv.into_iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(k as i64 - m, c / &lead);
            }
        }
        let weight = self.weight.as_ref().map(|w| -w);
        Ok(QSeries { coeffs, trunc: n_terms - m, weight })
    }
}

/// Δ = q·∏_{n≥1}(1−qⁿ)²⁴, truncated at `n`, weight 12.
pub fn delta_series(n: i64) -> Result<QSeries> {
    if n < 2 {
        return Err(Error::PreconditionFailed(
            "delta truncation must be at least 2".into(),
        ));
    }
    let mut prod = QSeries::one(n);
    for m in 1..n {
        let factor = QSeries::from_integer_coeffs(&[(0, 1), (m, -1)], n);
        prod = prod.mul(&factor);
        // the product over m < n suffices: higher factors are 1 + O(q^n)
    }
    let prod24 = prod.pow(24);
    let q = QSeries::monomial(1, BigRational::one(), n);
    Ok(q.mul(&prod24).with_weight(BigRational::from_integer(BigInt::from(12))))
}

/// Eisenstein series E₄ = 1 + 240·Σ σ₃(n)qⁿ, a derived cross-check oracle.
pub fn eisenstein_e4(n: i64) -> QSeries {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, BigRational::one());
    for k in 1..n {
        let s3 = sigma3(k as u64);
        coeffs.insert(k, BigRational::from_integer(BigInt::from(240u64) * s3));
    }
    QSeries { coeffs, trunc: n, weight: Some(BigRational::from_integer(BigInt::from(4))) }
}

/// σ₃(n) = Σ_{d|n} d³.
pub fn sigma3(n: u64) -> BigInt {
    let mut s = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            s += BigInt::from(d).pow(3);
        }
    }
    s
}

/// Theta series of an even positive-definite lattice: integer coefficients,
/// constant term 1, supported on nonnegative exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaSeries {
    pub series: QSeries,
    pub label: Option<String>,
    pub rank: usize,
}

/// Θ_b = Σ_{v∈Z^d} q^{½b(v,v)} truncated at `n`, by exact rational
/// Cholesky bound propagation over integer coordinates.
pub fn theta_series(b: &BilinearForm, n: i64) -> Result<ThetaSeries> {
    if !b.is_even() {
        return Err(Error::NotEven);
    }
    let sig = b.signature();
    let d = b.rank();
    if sig.b_minus != 0 || sig.b_zero != 0 {
        return Err(Error::NotPositiveDefinite);
    }
    let gram: RatMat = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| BigRational::from_integer(b.gram().at(i, j).clone()))
                .collect()
        })
        .collect();
    let budget = BigRational::from_integer(BigInt::from(2 * (n - 1).max(0)));
    let shift = vec![BigRational::zero(); d];
    let norms = count_norms(&gram, &shift, &budget)?;

    let mut coeffs = BTreeMap::new();
    for (norm, c) in &norms {
        // norm = b(v,v) is a nonnegative even integer for even lattices
        let exp = norm / BigRational::from_integer(BigInt::from(2));
        debug_assert!(exp.is_integer());
        let e = i64::try_from(&exp.to_integer()).expect("exponent fits in i64");
        if e < n {
            coeffs.insert(e, BigRational::from_integer(c.clone()));
        }
    }
    let series = QSeries { coeffs, trunc: n, weight: None };
    debug_assert_eq!(series.coeff(0), Some(BigRational::one()));
    Ok(ThetaSeries { series, label: b.label().map(str::to_owned), rank: d })
}

type RatMat = Vec<Vec<BigRational>>;

/// Exact histogram of (v+t)ᵀG(v+t) over v ∈ Z^r within `budget`, for a
/// positive-definite rational G.
///
/// Small ranks are enumerated directly with Fincke–Pohst bounds. Larger
/// ranks split off the last four coordinates: writing v = (a, b),
/// (v+t)ᵀG(v+t) = (a + t_a + G_aa⁻¹G_ab w)ᵀ G_aa (…) + wᵀ S w with
/// w = b + t_b and the Schur complement S = G_bb − G_baG_aa⁻¹G_ab; the
/// inner histogram only depends on the fractional part of the induced
/// shift, so it is computed once per residue class instead of once per b.
fn count_norms(
    gram: &RatMat,
    shift: &[BigRational],
    budget: &BigRational,
) -> Result<BTreeMap<BigRational, BigInt>> {
    let r = gram.len();
    const DIRECT_RANK: usize = 4;
    if r <= DIRECT_RANK {
        let (q, u) = rational_cholesky(gram)?;
        let mut out: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        let mut v = vec![BigInt::zero(); r];
        enumerate_shifted(&q, &u, shift, r, budget, &BigRational::zero(), &mut v, &mut |_, norm| {
            *out.entry(norm.clone()).or_insert_with(BigInt::zero) += 1;
        });
        return Ok(out);
    }

    let k = r - DIRECT_RANK;
    // blocks: a = first k coordinates, b = last DIRECT_RANK coordinates
    let g_aa: RatMat = (0..k).map(|i| gram[i][..k].to_vec()).collect();
    let g_ab: RatMat = (0..k).map(|i| gram[i][k..].to_vec()).collect();
    let g_bb: RatMat = (k..r).map(|i| gram[i][k..].to_vec()).collect();

    let aa = crate::matrix::RatMatrix::new(k, k, g_aa.concat());
    let aa_inv = aa.inverse().map_err(|_| Error::NotPositiveDefinite)?;

    // Schur complement S = G_bb − G_ba·G_aa⁻¹·G_ab
    let m = DIRECT_RANK;
    let mut s = g_bb.clone();
    // aa_inv_ab[i][j] = (G_aa⁻¹ G_ab)_{ij}
    let mut aa_inv_ab = vec![vec![BigRational::zero(); m]; k];
    for i in 0..k {
        for j in 0..m {
            let mut acc = BigRational::zero();
            for l in 0..k {
                acc += aa_inv.at(i, l) * &g_ab[l][j];
            }
            aa_inv_ab[i][j] = acc;
        }
    }
    for i in 0..m {
        for j in 0..m {
            let mut acc = BigRational::zero();
            for l in 0..k {
                acc += &g_ab[l][i] * &aa_inv_ab[l][j];
            }
            s[i][j] -= acc;
        }
    }

    let (qs, us) = rational_cholesky(&s)?;
    let t_b = &shift[k..];
    let t_a = &shift[..k];

    // pass 1: group the outer vectors by (inner residue class, outer norm)
    let mut groups: BTreeMap<(Vec<BigRational>, BigRational), BigInt> = BTreeMap::new();
    let mut v = vec![BigInt::zero(); m];
    enumerate_shifted(&qs, &us, t_b, m, budget, &BigRational::zero(), &mut v, &mut |vb, snorm| {
        // induced shift on the a-block: t_a + G_aa⁻¹G_ab·(b + t_b)
        let mut class = Vec::with_capacity(k);
        for i in 0..k {
            let mut acc = t_a[i].clone();
            for j in 0..m {
                let w = BigRational::from_integer(vb[j].clone()) + &t_b[j];
                acc += &aa_inv_ab[i][j] * w;
            }
            class.push(fractional_part(&acc));
        }
        *groups
            .entry((class, snorm.clone()))
            .or_insert_with(BigInt::zero) += 1;
    });

    // pass 2: one inner histogram per residue class, reused across norms
    let mut inner_cache: BTreeMap<Vec<BigRational>, BTreeMap<BigRational, BigInt>> =
        BTreeMap::new();
    let mut out: BTreeMap<BigRational, BigInt> = BTreeMap::new();
    for ((class, snorm), mult) in groups {
        if !inner_cache.contains_key(&class) {
            let hist = count_norms(&g_aa, &class, budget)?;
            inner_cache.insert(class.clone(), hist);
        }
        for (anorm, acount) in &inner_cache[&class] {
            let total = anorm + &snorm;
            if total <= *budget {
                *out.entry(total).or_insert_with(BigInt::zero) += acount * &mult;
            }
        }
    }
    Ok(out)
}

fn fractional_part(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Returns (q, u) with xᵀGx = Σ q_i(x_i + Σ_{j>i} u_ij x_j)², q_i > 0.
fn rational_cholesky(a: &RatMat) -> Result<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let d = a.len();
    let mut a = a.clone();
    let mut q = vec![BigRational::zero(); d];
    let mut u = vec![vec![BigRational::zero(); d]; d];
    for i in 0..d {
        let pivot = a[i][i].clone();
        if !pivot.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        q[i] = pivot.clone();
        for j in i + 1..d {
            u[i][j] = &a[i][j] / &pivot;
        }
        for r in i + 1..d {
            for c in i + 1..d {
                let delta = &a[i][r] * &a[i][c] / &pivot;
                a[r][c] = &a[r][c] - delta;
            }
        }
    }
    Ok((q, u))
}

/// Recursive coordinate enumeration of all v with
/// Σ q_i((v_i+t_i) + Σ_{j>i} u_ij (v_j+t_j))² ≤ remaining, fixing
/// coordinates from the last index down with exact interval bounds.
#[allow(clippy::too_many_arguments)]
fn enumerate_shifted(
    q: &[BigRational],
    u: &[Vec<BigRational>],
    t: &[BigRational],
    i: usize,
    remaining: &BigRational,
    norm_so_far: &BigRational,
    v: &mut Vec<BigInt>,
    visit: &mut impl FnMut(&[BigInt], &BigRational),
) {
    if i == 0 {
        visit(v, norm_so_far);
        return;
    }
    let i = i - 1;
    let mut center = t[i].clone();
    for j in i + 1..v.len() {
        center += &u[i][j] * (BigRational::from_integer(v[j].clone()) + &t[j]);
    }
    // q_i (v_i + center)² ≤ remaining
    let bound2 = remaining / &q[i];
    let hi = max_int_plus_c_leq_sqrt(&bound2, &center);
    let lo = -max_int_plus_c_leq_sqrt(&bound2, &(-&center));
    let mut n = lo;
    while n <= hi {
        v[i] = n.clone();
        let x = BigRational::from_integer(n.clone()) + &center;
        let used = &q[i] * (&x * &x);
        let rem = remaining - &used;
        if !rem.is_negative() {
            let norm = norm_so_far + &used;
            enumerate_shifted(q, u, t, i, &rem, &norm, v, visit);
        }
        n += 1;
    }
    v[i] = BigInt::zero();
}

/// Largest integer t with t + c ≤ √r (r ≥ 0 rational, c rational), exact.
fn max_int_plus_c_leq_sqrt(r: &BigRational, c: &BigRational) -> BigInt {
    debug_assert!(!r.is_negative());
    // √r = √(a·b) / b for r = a/b
    let a = r.numer().clone();
    let b = r.denom().clone();
    let m = (&a * &b).sqrt(); // m ≤ √(ab) < m+1
    // t ≤ √(ab)/b − c. Estimate from m, then fix up with the exact predicate
    // (tq + p)·b ≤ q·√(ab) ⇔ L ≤ 0 or L² ≤ q²ab, L = (tq + p)b, q > 0.
    let p = c.numer().clone();
    let qd = c.denom().clone();
    let ok = |t: &BigInt| -> bool {
        let l = (t * &qd + &p) * &b;
        if l.is_negative() || l.is_zero() {
            return true;
        }
        &l * &l <= &qd * &qd * &a * &b
    };
    let mut t = (&m * &qd - &p * &b).div_floor(&(&qd * &b));
    while ok(&(&t + 1)) {
        t += 1;
    }
    while !ok(&t) {
        t -= 1;
    }
    t
}

/// Edge-image report: the Laurent series Δ^{−d/8}·Θ_b with weight −d. The
/// identification with the homotopy-theoretic element is conjectural (and only pinned
/// down up to sign), which the flag records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeImage {
    pub series: QSeries,
    pub rank: usize,
    pub pole_order: i64,
    pub conjectural: bool,
    pub sign_ambiguous: bool,
}

/// Δ^{−d/8}·Θ_b for an even unimodular positive-definite lattice of rank
/// divisible by 8, exact to truncation `n`.
pub fn edge_image(b: &BilinearForm, n: i64) -> Result<EdgeImage> {
    crate::lattices::validate_even_unimodular_posdef(b).map_err(|e| {
        Error::PreconditionFailed(format!("edge image needs even unimodular positive-definite b: {e}"))
    })?;
    let d = b.rank();
    if d % 8 != 0 {
        return Err(Error::PreconditionFailed(format!(
            "rank {d} is not divisible by 8"
        )));
    }
    let k = (d / 8) as i64;
    // compute with extra head-room so the quotient is valid on [−k, n)
    let work = n + k + 1;
    let theta = theta_series(b, work)?;
    let delta_k = delta_series(work)?.pow(k as u64);
    let inv = delta_k.invert_unit()?;
    let series = theta
        .series
        .mul(&inv)
        .with_weight(BigRational::from_integer(BigInt::from(-(d as i64))));
    let pole_order = -series.lowest().unwrap_or(0);
    Ok(EdgeImage { series, rank: d, pole_order, conjectural: true, sign_ambiguous: true })
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            lowest: i64,
            coeffs: Vec<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            weight: Option<String>,
        }
        let lowest = self.lowest().unwrap_or(0);
        let coeffs = (lowest..self.trunc)
            .map(|e| {
                self.coeffs
                    .get(&e)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "0".to_string())
            })
            .collect();
        Repr { lowest, coeffs, weight: self.weight.as_ref().map(|w| w.to_string()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            lowest: i64,
            coeffs: Vec<String>,
            #[serde(default)]
            weight: Option<String>,
        }
        let repr = Repr::deserialize(d)?;
        let mut coeffs = BTreeMap::new();
        for (i, c) in repr.coeffs.iter().enumerate() {
            let v: BigRational = c
                .parse()
                .map_err(|e| D::Error::custom(format!("bad coefficient {c:?}: {e}")))?;
            if !v.is_zero() {
                coeffs.insert(repr.lowest + i as i64, v);
            }
        }
        let weight = match repr.weight {
            Some(w) => Some(
                w.parse()
                    .map_err(|e| D::Error::custom(format!("bad weight {w:?}: {e}")))?,
            ),
            None => None,
        };
        Ok(QSeries { coeffs, trunc: repr.lowest + repr.coeffs.len() as i64, weight })
    }
}
