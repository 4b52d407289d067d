//! Integral symmetric bilinear forms: exact signatures, functorial
//! operations, radical splitting, the stable ±1 normal form of unimodular
//! forms, and a desk-scale brute-force stable-congruence oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// An integral symmetric bilinear form, identified with its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BilinearForm {
    gram: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// Parity of a form: even iff every diagonal Gram entry is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Exact inertia data of a form, computed over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRecord {
    pub b_plus: usize,
    pub b_minus: usize,
    pub b_zero: usize,
    pub parity: Parity,
    #[serde(with = "crate::bilform::bigint_string")]
    pub det: BigInt,
    pub unimodular: bool,
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An integral quadratic polynomial `sum c_ii x_i^2 + sum_{i<j} c_ij x_i x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    dim: usize,
    /// coefficient of x_i^2
    diag: Vec<BigInt>,
    /// coefficient of x_i x_j for i < j, row-major upper triangle
    mixed: Vec<BigInt>,
}

/// Outcome of a bounded search: a definite answer or search exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Decided(bool),
    Inconclusive,
}

impl Decision {
    pub fn is_true(self) -> bool {
        self == Decision::Decided(true)
    }
}

impl BilinearForm {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(BilinearForm { gram, label: None })
    }

    pub fn with_label(gram: IntMatrix, label: impl Into<String>) -> Result<Self> {
        let mut f = Self::new(gram)?;
        f.label = Some(label.into());
        Ok(f)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(IntMatrix::from_i64(rows)).expect("symmetric input")
    }

    /// Rank-0 form (the empty direct sum).
    pub fn empty() -> Self {
        BilinearForm { gram: IntMatrix::zero(0, 0), label: None }
    }

    /// Rank-1 form `(n)`.
    pub fn rank_one(n: i64) -> Self {
        Self::from_i64(&[&[n]])
    }

    /// The hyperbolic plane `[[0,1],[1,0]]`.
    pub fn hyperbolic() -> Self {
        Self::from_i64(&[&[0, 1], &[1, 0]])
    }

    /// Diagonal form with the given entries.
    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut gram = IntMatrix::zero(n, n);
        for (i, &e) in entries.iter().enumerate() {
            *gram.at_mut(i, i) = BigInt::from(e);
        }
        BilinearForm { gram, label: None }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| (self.gram.at(i, i) % BigInt::from(2)).is_zero())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn negate(&self) -> BilinearForm {
        BilinearForm { gram: self.gram.neg(), label: None }
    }

    /// The pairing b(x, y) = xᵀ·G·y.
    pub fn eval(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.rank());
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    /// Exact inertia via symmetric reduction over Q with 1x1 pivots and 2x2
    /// hyperbolic pivots (each contributing one positive and one negative
    /// eigenvalue). No floating point.
    pub fn signature(&self) -> SignatureRecord {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(self.gram.at(i, j).clone()))
                    .collect()
            })
            .collect();
        let mut alive: Vec<usize> = (0..n).collect();
        let mut plus = 0usize;
        let mut minus = 0usize;
        let mut zero = 0usize;

        while !alive.is_empty() {
            // prefer a nonzero diagonal pivot
            if let Some(&p) = alive.iter().find(|&&i| !a[i][i].is_zero()) {
                if a[p][p].is_positive() {
                    plus += 1;
                } else {
                    minus += 1;
                }
                let others: Vec<usize> = alive.iter().copied().filter(|&i| i != p).collect();
                for &i in &others {
                    if a[i][p].is_zero() {
                        continue;
                    }
                    let f = &a[i][p] / &a[p][p];
                    for &j in &others {
                        let sub = &f * &a[p][j];
                        a[i][j] = &a[i][j] - sub;
                    }
                }
                // re-symmetrize is unnecessary: the update above is symmetric
                alive = others;
                continue;
            }
            // all diagonals zero: either the block vanishes or there is an
            // off-diagonal entry giving a hyperbolic 2x2 pivot
            let mut pair = None;
            'search: for (ai, &i) in alive.iter().enumerate() {
                for &j in alive.iter().skip(ai + 1) {
                    if !a[i][j].is_zero() {
                        pair = Some((i, j));
                        break 'search;
                    }
                }
            }
            match pair {
                None => {
                    zero += alive.len();
                    break;
                }
                Some((p, q)) => {
                    plus += 1;
                    minus += 1;
                    let c = a[p][q].clone();
                    let others: Vec<usize> =
                        alive.iter().copied().filter(|&i| i != p && i != q).collect();
                    // clear the p,q rows/columns against the hyperbolic block:
                    // b(x',y') = b(x,y) - (b(x,q)b(p,y) + b(x,p)b(q,y)) / c
                    let snapshot: Vec<(usize, BigRational, BigRational)> = others
                        .iter()
                        .map(|&i| (i, a[i][q].clone(), a[i][p].clone()))
                        .collect();
                    for &(i, ref biq, ref bip) in &snapshot {
                        let fp = biq / &c;
                        let fq = bip / &c;
                        for &j in &others {
                            let sub = &fp * &a[p][j] + &fq * &a[q][j];
                            a[i][j] = &a[i][j] - sub;
                        }
                    }
                    alive = others;
                }
            }
        }

        let det = self.det();
        SignatureRecord {
            b_plus: plus,
            b_minus: minus,
            b_zero: zero,
            parity: if self.is_even() { Parity::Even } else { Parity::Odd },
            unimodular: det.abs().is_one(),
            det,
        }
    }

    /// Pullback along `a`: the form with Gram matrix `a^T * gram * a`.
    pub fn pullback(&self, a: &IntMatrix) -> Result<BilinearForm> {
        if a.rows() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "pullback matrix has {} rows, form has rank {}",
                a.rows(),
                self.rank()
            )));
        }
        let gram = a.transpose().mul(&self.gram).mul(a);
        Ok(BilinearForm { gram, label: None })
    }

    pub fn direct_sum(&self, other: &BilinearForm) -> BilinearForm {
        BilinearForm {
            gram: self.gram.block_diag(&other.gram),
            label: None,
        }
    }

    /// Splits off the radical: returns `(b_zero_rank, core, basis_change)`
    /// with `basis_change` unimodular and `pullback(basis_change)` block
    /// diagonal `0 ⊕ core`, where `core` is nondegenerate over Q.
    pub fn radical_split(&self) -> (usize, BilinearForm, IntMatrix) {
        if !self.det().is_zero() {
            return (0, self.clone(), IntMatrix::identity(self.rank()));
        }
        let (kernel, complement) = self.gram.saturated_kernel();
        let k = kernel.cols();
        let mut cols: Vec<Vec<BigInt>> = (0..k).map(|j| kernel.column(j)).collect();
        cols.extend((0..complement.cols()).map(|j| complement.column(j)));
        let basis_change = IntMatrix::from_columns(self.rank(), &cols);
        debug_assert!(basis_change.det().abs().is_one());
        let core = self
            .pullback(&complement)
            .expect("complement has matching row count");
        (k, core, basis_change)
    }

    /// For unimodular forms: the stable diagonal-(±1) normal form, reported
    /// as the pair (number of +1 entries, number of -1 entries).
    pub fn unimodular_stable_form(&self) -> Result<(usize, usize)> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular { det: det.to_string() });
        }
        let sig = self.signature();
        Ok((sig.b_plus, sig.b_minus))
    }

    /// Exhaustive desk-scale search for a stable congruence between `self`
    /// and `other`: stabilize both sides by diagonal ±1 forms (up to
    /// `stab_limit` extra summands) and enumerate change-of-basis matrices
    /// with entries bounded by `coeff_bound`. `Decided(true)` is a proof;
    /// anything else only reflects search exhaustion.
    pub fn congruent_stably_bruteforce(
        &self,
        other: &BilinearForm,
        stab_limit: usize,
        coeff_bound: u32,
    ) -> Decision {
        const CANDIDATE_CAP: u64 = 20_000_000;
        let sig_b = self.signature();
        let sig_c = other.signature();
        if sig_b.b_zero != sig_c.b_zero {
            // stabilization never changes the radical
            return Decision::Decided(false);
        }

        for extra in 0..=stab_limit {
            // r ones and s minus-ones on the left; signatures must match
            // after stabilization, which pins the right-hand counts.
            for r in 0..=extra {
                let s = extra - r;
                let rp = (sig_b.b_plus + r).checked_sub(sig_c.b_plus);
                let sp = (sig_b.b_minus + s).checked_sub(sig_c.b_minus);
                let (rp, sp) = match (rp, sp) {
                    (Some(a), Some(b)) => (a, b),
                    _ => continue,
                };
                if rp + sp > stab_limit {
                    continue;
                }
                let left = self.stabilize(r, s);
                let right = other.stabilize(rp, sp);
                if left.rank() != right.rank() {
                    continue;
                }
                let n = left.rank();
                if n == 0 {
                    return Decision::Decided(true);
                }
                let base = 2 * coeff_bound as u64 + 1;
                let total = (n * n) as u32;
                let candidates = base.checked_pow(total);
                match candidates {
                    Some(c) if c <= CANDIDATE_CAP => {
                        if search_congruence(&left, &right, coeff_bound) {
                            return Decision::Decided(true);
                        }
                    }
                    _ => return Decision::Inconclusive,
                }
            }
        }
        Decision::Inconclusive
    }

    fn stabilize(&self, ones: usize, minus_ones: usize) -> BilinearForm {
        let mut extra = vec![1i64; ones];
        extra.extend(std::iter::repeat(-1).take(minus_ones));
        self.direct_sum(&BilinearForm::diagonal(&extra))
    }
}

/// Deterministic exhaustive search for unimodular P with P^T A P = B,
/// entries in [-bound, bound], column-by-column with pruning on the
/// partial Gram constraints.
fn search_congruence(a: &BilinearForm, b: &BilinearForm, bound: u32) -> bool {
    let n = a.rank();
    let bound = bound as i64;
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(n);

    fn rec(
        a: &BilinearForm,
        b: &BilinearForm,
        bound: i64,
        cols: &mut Vec<Vec<BigInt>>,
    ) -> bool {
        let n = a.rank();
        let k = cols.len();
        if k == n {
            let p = IntMatrix::from_columns(n, cols);
            return p.det().abs().is_one();
        }
        // enumerate candidate column k in lexicographic order
        let mut v = vec![-bound; n];
        loop {
            let col: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            let av = a.gram().mul_vec(&col);
            // check pairings against the already chosen columns and itself
            let mut ok = {
                let diag: BigInt = (0..n).map(|i| &col[i] * &av[i]).sum();
                diag == *b.gram().at(k, k)
            };
            if ok {
                for (j, cj) in cols.iter().enumerate() {
                    let pairing: BigInt = (0..n).map(|i| &cj[i] * &av[i]).sum();
                    if pairing != *b.gram().at(j, k) {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                cols.push(col);
                if rec(a, b, bound, cols) {
                    return true;
                }
                cols.pop();
            }
            // odometer increment
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                v[i] += 1;
                if v[i] <= bound {
                    break;
                }
                v[i] = -bound;
                i += 1;
            }
        }
    }

    rec(a, b, bound, &mut cols)
}

impl QuadraticForm {
    pub fn new(dim: usize, diag: Vec<BigInt>, mixed: Vec<BigInt>) -> Self {
        assert_eq!(diag.len(), dim);
        assert_eq!(mixed.len(), dim * dim.saturating_sub(1) / 2);
        QuadraticForm { dim, diag, mixed }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn mixed_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        // index into the upper triangle, row-major
        i * self.dim - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn mixed_coeff(&self, i: usize, j: usize) -> &BigInt {
        &self.mixed[self.mixed_index(i, j)]
    }

    /// The associated bilinear form b(v,w) = q(v+w) - q(v) - q(w), i.e.
    /// Gram diagonal 2*c_ii and off-diagonal c_ij.
    pub fn to_bilinear(&self) -> BilinearForm {
        let n = self.dim;
        let mut gram = IntMatrix::zero(n, n);
        for i in 0..n {
            *gram.at_mut(i, i) = &self.diag[i] * 2;
            for j in i + 1..n {
                *gram.at_mut(i, j) = self.mixed_coeff(i, j).clone();
                *gram.at_mut(j, i) = self.mixed_coeff(i, j).clone();
            }
        }
        BilinearForm { gram, label: None }
    }

    /// Partial inverse: q(x) = b(x,x)/2 exists integrally iff every diagonal
    /// Gram entry is even.
    pub fn from_bilinear(b: &BilinearForm) -> Result<QuadraticForm> {
        let n = b.rank();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let d = b.gram().at(i, i);
            if !(d % BigInt::from(2)).is_zero() {
                return Err(Error::NonEvenDiagonal { index: i });
            }
            diag.push(d / 2);
        }
        let mut mixed = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                mixed.push(b.gram().at(i, j).clone());
            }
        }
        Ok(QuadraticForm { dim: n, diag, mixed })
    }

    /// Evaluates q at an integer vector.
    pub fn eval(&self, v: &[BigInt]) -> BigInt {
        assert_eq!(v.len(), self.dim);
        let mut acc = BigInt::zero();
        for i in 0..self.dim {
            acc += &self.diag[i] * &v[i] * &v[i];
            for j in i + 1..self.dim {
                acc += self.mixed_coeff(i, j) * &v[i] * &v[j];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices;

    #[test]
    fn signature_rank_one() {
        let sig = BilinearForm::rank_one(1).signature();
        assert_eq!((sig.b_plus, sig.b_minus, sig.b_zero), (1, 0, 0));
        assert_eq!(sig.parity, Parity::Odd);
        assert_eq!(sig.det, BigInt::one());
        assert!(sig.unimodular);
    }

    #[test]
    fn signature_hyperbolic() {
        let sig = BilinearForm::hyperbolic().signature();
        assert_eq!((sig.b_plus, sig.b_minus, sig.b_zero), (1, 1, 0));
        assert_eq!(sig.parity, Parity::Even);
        assert_eq!(sig.det, BigInt::from(-1));
        assert!(sig.unimodular);
    }

    #[test]
    fn signature_e8() {
        let e8 = lattices::e8();
        let sig = e8.signature();
        assert_eq!((sig.b_plus, sig.b_minus, sig.b_zero), (8, 0, 0));
        assert_eq!(sig.parity, Parity::Even);
        assert_eq!(sig.det, BigInt::one());
    }

    #[test]
    fn pullback_identity_and_elementary() {
        let b = BilinearForm::from_i64(&[&[2, 1], &[1, 4]]);
        let id = IntMatrix::identity(2);
        assert_eq!(b.pullback(&id).unwrap().gram(), b.gram());

        // e_0 -> e_0 + e_1: new (0,0) entry is b00 + b11 + 2 b01
        let e = IntMatrix::from_i64(&[&[1, 0], &[1, 1]]);
        let p = b.pullback(&e).unwrap();
        assert_eq!(p.gram().at(0, 0), &BigInt::from(2 + 4 + 2));
    }

    #[test]
    fn pullback_poincare_identity() {
        // A^T diag(1,-1,-1) A = h for the standard 3x2 matrix A
        let a = IntMatrix::from_i64(&[&[1, 1], &[-1, 0], &[0, 1]]);
        let d = BilinearForm::diagonal(&[1, -1, -1]);
        let p = d.pullback(&a).unwrap();
        assert_eq!(p.gram(), BilinearForm::hyperbolic().gram());
    }

    #[test]
    fn pullback_composes_contravariantly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4);
            let mut g = IntMatrix::zero(n, n);
            for i in 0..n {
                for j in i..n {
                    let x = BigInt::from(rng.gen_range(-3i64..=3));
                    *g.at_mut(i, j) = x.clone();
                    *g.at_mut(j, i) = x;
                }
            }
            let b = BilinearForm::new(g).unwrap();
            let rand_mat = |rng: &mut rand_chacha::ChaCha8Rng, r: usize, c: usize| {
                IntMatrix::new(
                    r,
                    c,
                    (0..r * c).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect(),
                )
            };
            let a1 = rand_mat(&mut rng, n, n);
            let a2 = rand_mat(&mut rng, n, n);
            let lhs = b.pullback(&a1.mul(&a2)).unwrap();
            let rhs = b.pullback(&a1).unwrap().pullback(&a2).unwrap();
            assert_eq!(lhs.gram(), rhs.gram());
        }
    }

    #[test]
    fn direct_sum_signature_adds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let n = rng.gen_range(0..=3);
                let mut g = IntMatrix::zero(n, n);
                for i in 0..n {
                    for j in i..n {
                        let x = BigInt::from(rng.gen_range(-3i64..=3));
                        *g.at_mut(i, j) = x.clone();
                        *g.at_mut(j, i) = x;
                    }
                }
                BilinearForm::new(g).unwrap()
            };
            let b = mk(&mut rng);
            let c = mk(&mut rng);
            let s = b.direct_sum(&c).signature();
            let sb = b.signature();
            let sc = c.signature();
            assert_eq!(s.b_plus, sb.b_plus + sc.b_plus);
            assert_eq!(s.b_minus, sb.b_minus + sc.b_minus);
            assert_eq!(s.b_zero, sb.b_zero + sc.b_zero);
        }
    }

    #[test]
    fn direct_sum_with_empty() {
        let b = BilinearForm::from_i64(&[&[3]]);
        assert_eq!(b.direct_sum(&BilinearForm::empty()).gram(), b.gram());
    }

    #[test]
    fn qform_round_trip() {
        // q = x^2 gives b = (2)
        let q = QuadraticForm::new(1, vec![BigInt::one()], vec![]);
        let b = q.to_bilinear();
        assert_eq!(b.gram(), BilinearForm::rank_one(2).gram());
        let q2 = QuadraticForm::from_bilinear(&b).unwrap();
        assert_eq!(q, q2);

        assert_eq!(
            QuadraticForm::from_bilinear(&BilinearForm::rank_one(1)).unwrap_err(),
            Error::NonEvenDiagonal { index: 0 }
        );
    }

    #[test]
    fn qform_round_trip_even_forms() {
        let e8 = lattices::e8();
        let q = QuadraticForm::from_bilinear(&e8).unwrap();
        assert_eq!(q.to_bilinear().gram(), e8.gram());
    }

    #[test]
    fn radical_split_cases() {
        let (z, core, basis) = BilinearForm::rank_one(0).radical_split();
        assert_eq!(z, 1);
        assert_eq!(core.rank(), 0);
        assert_eq!(basis, IntMatrix::identity(1));

        let b = BilinearForm::from_i64(&[&[2, 1], &[1, 2]]);
        let (z, core, basis) = b.radical_split();
        assert_eq!((z, core.rank()), (0, 2));
        assert_eq!(basis, IntMatrix::identity(2));

        let b = BilinearForm::from_i64(&[&[0, 0], &[0, 3]]);
        let (z, core, basis) = b.radical_split();
        assert_eq!(z, 1);
        assert_eq!(core.gram(), BilinearForm::rank_one(3).gram());
        let p = b.pullback(&basis).unwrap();
        assert!(p.gram().at(0, 0).is_zero());
        assert!(p.gram().at(0, 1).is_zero());
    }

    #[test]
    fn radical_split_matches_snf_zero_count() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.gen_range(1..=4);
            let mut g = IntMatrix::zero(n, n);
            for i in 0..n {
                for j in i..n {
                    let x = BigInt::from(rng.gen_range(-2i64..=2));
                    *g.at_mut(i, j) = x.clone();
                    *g.at_mut(j, i) = x;
                }
            }
            let b = BilinearForm::new(g).unwrap();
            let (z, core, basis) = b.radical_split();
            let (d, _, _) = b.gram().smith_normal_form();
            let snf_zeros = (0..n).filter(|&i| d.at(i, i).is_zero()).count();
            assert_eq!(z, snf_zeros);
            assert!(!core.det().is_zero() || core.rank() == 0);
            // pullback is block diag 0 ⊕ core
            let p = b.pullback(&basis).unwrap();
            for i in 0..z {
                for j in 0..n {
                    assert!(p.gram().at(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn unimodular_stable_form_examples() {
        assert_eq!(BilinearForm::hyperbolic().unimodular_stable_form().unwrap(), (1, 1));
        assert_eq!(lattices::e8().unimodular_stable_form().unwrap(), (8, 0));
        assert_eq!(
            BilinearForm::diagonal(&[1, 1, -1]).unimodular_stable_form().unwrap(),
            (2, 1)
        );
        assert!(matches!(
            BilinearForm::rank_one(2).unimodular_stable_form(),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn bruteforce_reflexive() {
        let b = BilinearForm::from_i64(&[&[2, 1], &[1, 2]]);
        assert_eq!(b.congruent_stably_bruteforce(&b, 0, 1), Decision::Decided(true));
    }

    #[test]
    fn bruteforce_hyperbolic_vs_diag() {
        let h = BilinearForm::hyperbolic();
        let d = BilinearForm::diagonal(&[1, -1]);
        assert_eq!(h.congruent_stably_bruteforce(&d, 1, 2), Decision::Decided(true));
    }

    #[test]
    fn bruteforce_det_obstruction() {
        // (2) vs (3): no stable congruence exists; search alone cannot prove
        // the negative, so it reports Inconclusive.
        let a = BilinearForm::rank_one(2);
        let b = BilinearForm::rank_one(3);
        assert_eq!(a.congruent_stably_bruteforce(&b, 1, 2), Decision::Inconclusive);
    }

    #[test]
    fn signature_invariant_under_unimodular_pullback() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut tested = 0;
        while tested < 100 {
            let n = rng.gen_range(1..=6);
            let mut g = IntMatrix::zero(n, n);
            for i in 0..n {
                for j in i..n {
                    let x = BigInt::from(rng.gen_range(-3i64..=3));
                    *g.at_mut(i, j) = x.clone();
                    *g.at_mut(j, i) = x;
                }
            }
            let b = BilinearForm::new(g).unwrap();
            // random product of elementary matrices is unimodular
            let mut p = IntMatrix::identity(n);
            for _ in 0..6 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let mut e = IntMatrix::identity(n);
                *e.at_mut(i, j) = BigInt::from(rng.gen_range(-2i64..=2));
                p = p.mul(&e);
            }
            let sig1 = b.signature();
            let sig2 = b.pullback(&p).unwrap().signature();
            assert_eq!(
                (sig1.b_plus, sig1.b_minus, sig1.b_zero),
                (sig2.b_plus, sig2.b_minus, sig2.b_zero)
            );
            tested += 1;
        }
    }
}
