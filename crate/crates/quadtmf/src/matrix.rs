//! Exact integer and rational matrix kernels: Smith normal form, saturated
//! kernels and rational inverses. Entries are arbitrary-precision; fixed-width
//! integers are deliberately not used here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix in row-major order over `BigInt`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

/// Dense rational matrix; `BigRational` keeps every entry in lowest terms
/// with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        IntMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine integers, mostly for tests and builtins.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: r, cols: c, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> IntMatrix {
        let mut m = IntMatrix::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                *m.at_mut(i, j) = col[i].clone();
            }
        }
        m
    }

    /// Block-diagonal concatenation.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut m = IntMatrix::zero(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                *m.at_mut(self.rows + i, self.cols + j) = other.at(i, j).clone();
            }
        }
        m
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect(),
        }
    }

    /// Exact determinant via Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[idx(k, k)].is_zero() {
                // pivot search
                let mut found = None;
                for i in k + 1..n {
                    if !a[idx(i, k)].is_zero() {
                        found = Some(i);
                        break;
                    }
                }
                match found {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(idx(k, j), idx(i, j));
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[idx(i, j)] * &a[idx(k, k)] - &a[idx(i, k)] * &a[idx(k, j)];
                    a[idx(i, j)] = num / &prev;
                }
            }
            prev = a[idx(k, k)].clone();
        }
        sign * a[idx(n - 1, n - 1)].clone()
    }

    /// Smith normal form: returns `(d, u, v)` with `d = u * self * v`,
    /// `u`, `v` unimodular, `d` diagonal with nonnegative entries satisfying
    /// `d[i] | d[i+1]`.
    pub fn smith_normal_form(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let k = self.rows.min(self.cols);

        for t in 0..k {
            loop {
                // smallest-nonzero-pivot selection in the trailing block
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..d.rows {
                    for j in t..d.cols {
                        if !d.at(i, j).is_zero() {
                            let better = match &pivot {
                                None => true,
                                Some((pi, pj)) => d.at(i, j).abs() < d.at(*pi, *pj).abs(),
                            };
                            if better {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
                let (pi, pj) = match pivot {
                    Some(p) => p,
                    None => return (d, u, v), // trailing block all zero
                };
                if pi != t {
                    d.swap_rows(t, pi);
                    u.swap_rows(t, pi);
                }
                if pj != t {
                    d.swap_cols(t, pj);
                    v.swap_cols(t, pj);
                }
                if d.at(t, t).is_negative() {
                    d.scale_row(t, -1);
                    u.scale_row(t, -1);
                }

                // reduce the pivot row and column
                let mut clean = true;
                for i in t + 1..d.rows {
                    if !d.at(i, t).is_zero() {
                        let q = div_round(d.at(i, t), d.at(t, t));
                        if !q.is_zero() {
                            d.row_add(i, t, &(-&q));
                            u.row_add(i, t, &(-&q));
                        }
                        if !d.at(i, t).is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in t + 1..d.cols {
                    if !d.at(t, j).is_zero() {
                        let q = div_round(d.at(t, j), d.at(t, t));
                        if !q.is_zero() {
                            d.col_add(j, t, &(-&q));
                            v.col_add(j, t, &(-&q));
                        }
                        if !d.at(t, j).is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue;
                }

                // pivot must divide every entry of the trailing block
                let mut offender = None;
                'outer: for i in t + 1..d.rows {
                    for j in t + 1..d.cols {
                        if !(d.at(i, j) % d.at(t, t)).is_zero() {
                            offender = Some(i);
                            break 'outer;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        // fold the offending row into the pivot row and retry
                        d.row_add(t, i, &BigInt::one());
                        u.row_add(t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
        }
        (d, u, v)
    }

    /// Basis of the saturated kernel `{v : self * v = 0}` together with a
    /// complement, so that `Z^cols = kernel ⊕ complement`. Both are returned
    /// as column matrices; stacking their columns gives a unimodular matrix.
    pub fn saturated_kernel(&self) -> (IntMatrix, IntMatrix) {
        let (d, _u, v) = self.smith_normal_form();
        let mut kernel_cols = Vec::new();
        let mut complement_cols = Vec::new();
        for j in 0..self.cols {
            let zero_col = j >= self.rows || d.at(j, j).is_zero();
            if zero_col {
                kernel_cols.push(v.column(j));
            } else {
                complement_cols.push(v.column(j));
            }
        }
        (
            IntMatrix::from_columns(self.cols, &kernel_cols),
            IntMatrix::from_columns(self.cols, &complement_cols),
        )
    }

    /// Exact inverse over the rationals.
    pub fn rational_inverse(&self) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        self.to_rational().inverse()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            let c = self.cols;
            self.entries.swap(a * c + j, b * c + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            let c = self.cols;
            self.entries.swap(i * c + a, i * c + b);
        }
    }

    fn scale_row(&mut self, i: usize, s: i64) {
        let s = BigInt::from(s);
        for j in 0..self.cols {
            let v = self.at(i, j) * &s;
            *self.at_mut(i, j) = v;
        }
    }

    /// row i += q * row k
    fn row_add(&mut self, i: usize, k: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * self.at(k, j);
            *self.at_mut(i, j) += add;
        }
    }

    /// col j += q * col k
    fn col_add(&mut self, j: usize, k: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * self.at(i, k);
            *self.at_mut(i, j) += add;
        }
    }
}

/// Round-to-nearest integer division, used to keep SNF entries small.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        RatMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.entries[i * self.cols + j]
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        RatMatrix { rows: n, cols: n, entries }
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::new(
            self.rows,
            other.cols,
            vec![BigRational::zero(); self.rows * other.cols],
        );
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = self.at(i, k) * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// Gauss-Jordan inverse; errors on singular input.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| !a.at(i, k).is_zero());
            let pr = pivot_row.ok_or(Error::SingularMatrix)?;
            if pr != k {
                for j in 0..n {
                    let c = n;
                    a.entries.swap(k * c + j, pr * c + j);
                    inv.entries.swap(k * c + j, pr * c + j);
                }
            }
            let p = a.at(k, k).clone();
            for j in 0..n {
                let x = self_div(a.at(k, j), &p);
                *a.at_mut(k, j) = x;
                let y = self_div(inv.at(k, j), &p);
                *inv.at_mut(k, j) = y;
            }
            for i in 0..n {
                if i == k || a.at(i, k).is_zero() {
                    continue;
                }
                let f = a.at(i, k).clone();
                for j in 0..n {
                    let x = a.at(i, j) - &f * a.at(k, j);
                    *a.at_mut(i, j) = x;
                    let y = inv.at(i, j) - &f * inv.at(k, j);
                    *inv.at_mut(i, j) = y;
                }
            }
        }
        Ok(inv)
    }
}

fn self_div(a: &BigRational, b: &BigRational) -> BigRational {
    a / b
}

// Matrices serialize as arrays of arrays of decimal strings so big integers
// survive JSON round-trips bit-exactly.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).to_string()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json::Value>> = Vec::deserialize(deserializer)?;
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            for val in row {
                let e = match val {
                    serde_json::Value::String(s) => s
                        .parse::<BigInt>()
                        .map_err(|e| D::Error::custom(format!("bad integer {s:?}: {e}")))?,
                    serde_json::Value::Number(n) => {
                        let s = n.to_string();
                        s.parse::<BigInt>()
                            .map_err(|e| D::Error::custom(format!("bad integer {s:?}: {e}")))?
                    }
                    _ => return Err(D::Error::custom("matrix entries must be strings or integers")),
                };
                entries.push(e);
            }
        }
        Ok(IntMatrix { rows: r, cols: c, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix) {
        let (d, u, v) = m.smith_normal_form();
        assert_eq!(u.mul(m).mul(&v), d, "d = u*m*v must hold");
        assert_eq!(u.det().abs(), BigInt::one());
        assert_eq!(v.det().abs(), BigInt::one());
        let k = d.rows().min(d.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    assert!(d.at(i, j).is_zero(), "off-diagonal must vanish");
                }
            }
        }
        for i in 0..k {
            assert!(!d.at(i, i).is_negative());
            if i + 1 < k && !d.at(i + 1, i + 1).is_zero() {
                assert!(
                    (d.at(i + 1, i + 1) % d.at(i, i).max(&BigInt::one())).is_zero()
                        || d.at(i, i).is_zero() == d.at(i + 1, i + 1).is_zero()
                );
            }
            if i + 1 < k && !d.at(i, i).is_zero() {
                assert!((d.at(i + 1, i + 1) % d.at(i, i)).is_zero(), "divisibility chain");
            }
            if d.at(i, i).is_zero() && i + 1 < k {
                assert!(d.at(i + 1, i + 1).is_zero(), "zeros come last");
            }
        }
    }

    #[test]
    fn snf_one_by_one() {
        let m = IntMatrix::from_i64(&[&[2]]);
        let (d, u, v) = m.smith_normal_form();
        assert_eq!(d, IntMatrix::from_i64(&[&[2]]));
        assert_eq!(u, IntMatrix::identity(1));
        assert_eq!(v, IntMatrix::identity(1));
    }

    #[test]
    fn snf_zero_matrix() {
        let m = IntMatrix::from_i64(&[&[0]]);
        let (d, _, _) = m.smith_normal_form();
        assert_eq!(d, IntMatrix::from_i64(&[&[0]]));
    }

    #[test]
    fn snf_a2_gram() {
        // [[2,1],[1,2]] has invariant factors 1, 3
        let m = IntMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        let (d, _, _) = m.smith_normal_form();
        assert_eq!(d, IntMatrix::from_i64(&[&[1, 0], &[0, 3]]));
        check_snf(&m);
    }

    #[test]
    fn snf_random_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=4);
            let entries: Vec<BigInt> = (0..r * c)
                .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
                .collect();
            let m = IntMatrix::new(r, c, entries);
            check_snf(&m);
        }
    }

    #[test]
    fn snf_rank_invariant_under_unimodular() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[1, 2]]);
        let (d, _, _) = m.smith_normal_form();
        let rank = (0..2).filter(|&i| !d.at(i, i).is_zero()).count();
        assert_eq!(rank, 1);
        let p = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let (d2, _, _) = p.mul(&m).smith_normal_form();
        let rank2 = (0..2).filter(|&i| !d2.at(i, i).is_zero()).count();
        assert_eq!(rank, rank2);
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        let (k, c) = IntMatrix::from_i64(&[&[0]]).saturated_kernel();
        assert_eq!(k.cols(), 1);
        assert_eq!(c.cols(), 0);
        assert_eq!(k.at(0, 0).abs(), BigInt::one());

        let (k, c) = IntMatrix::from_i64(&[&[1]]).saturated_kernel();
        assert_eq!(k.cols(), 0);
        assert_eq!(c.cols(), 1);
    }

    #[test]
    fn kernel_rank_one() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[1, 2]]);
        let (k, c) = m.saturated_kernel();
        assert_eq!(k.cols(), 1);
        assert_eq!(c.cols(), 1);
        // kernel vector is primitive and killed by m
        let v = k.column(0);
        assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        let g = num_integer::Integer::gcd(&v[0], &v[1]);
        assert_eq!(g, BigInt::one());
        // kernel ⊕ complement = Z^2
        let full = IntMatrix::from_columns(2, &[k.column(0), c.column(0)]);
        assert_eq!(full.det().abs(), BigInt::one());
    }

    #[test]
    fn rational_inverse_examples() {
        let m = IntMatrix::from_i64(&[&[5]]);
        let inv = m.rational_inverse().unwrap();
        assert_eq!(inv.at(0, 0), &BigRational::new(BigInt::one(), BigInt::from(5)));

        let id = IntMatrix::identity(3);
        assert_eq!(id.rational_inverse().unwrap(), RatMatrix::identity(3));

        let m = IntMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        let inv = m.rational_inverse().unwrap();
        let prod = m.to_rational().mul(&inv);
        assert_eq!(prod, RatMatrix::identity(2));

        let s = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.rational_inverse().unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn rational_inverse_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 1000 {
            let n = rng.gen_range(1..=4);
            let entries: Vec<BigInt> = (0..n * n)
                .map(|_| BigInt::from(rng.gen_range(-5i64..=5)))
                .collect();
            let m = IntMatrix::new(n, n, entries);
            if m.det().is_zero() {
                continue;
            }
            let inv = m.rational_inverse().unwrap();
            assert_eq!(inv.mul(&m.to_rational()), RatMatrix::identity(n));
            done += 1;
        }
    }

    #[test]
    fn json_round_trip_preserves_big_integers() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let m = IntMatrix::new(1, 2, vec![big.clone(), -big.clone()]);
        let s = serde_json::to_string(&m).unwrap();
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
