//! Discriminant groups and torsion linking forms of integral symmetric
//! bilinear forms, brute-force isomorphism testing of torsion forms, and the
//! stable ±equivalence decision (free rank + torsion linking form).

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bilform::{BilinearForm, Decision};
use crate::error::{Error, Result};

/// A finite abelian group `⊕ Z/d_i` (divisibility chain, each `d_i >= 2`)
/// with a symmetric Q/Z-valued pairing on its generators. Entries are
/// reduced fractions in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionLinkingForm {
    invariant_factors: Vec<u64>,
    /// entry (i,j) = lambda(g_i, g_j) as a reduced fraction in [0,1)
    gram_qz: Vec<Vec<Fraction>>,
}

/// Reduced fraction in [0,1), serialized as "p/q".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn from_rational_mod_one(r: &BigRational) -> Fraction {
        let mut x = r.clone();
        let one = BigRational::one();
        // reduce into [0,1)
        let floor = x.floor();
        x -= floor;
        if x >= one {
            x -= one;
        }
        Fraction {
            num: x.numer().to_u64().expect("desk-scale torsion"),
            den: x.denom().to_u64().expect("desk-scale torsion"),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.num, self.den))
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (n, q) = s
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
        let num: u64 = n.parse().map_err(serde::de::Error::custom)?;
        let den: u64 = q.parse().map_err(serde::de::Error::custom)?;
        if den == 0 || num >= den {
            return Err(serde::de::Error::custom("fraction must be reduced in [0,1)"));
        }
        Ok(Fraction { num, den })
    }
}

/// Complete discriminant data of a bilinear form: the free rank of its
/// cokernel plus the torsion linking form on the finite part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantData {
    pub free_rank: usize,
    pub torsion: TorsionLinkingForm,
}

impl TorsionLinkingForm {
    pub fn new(invariant_factors: Vec<u64>, gram_qz: Vec<Vec<Fraction>>) -> Result<Self> {
        let k = invariant_factors.len();
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Parse("invariant factors must form a divisibility chain".into()));
            }
        }
        if invariant_factors.iter().any(|&d| d < 2) {
            return Err(Error::Parse("invariant factors must be >= 2".into()));
        }
        if gram_qz.len() != k || gram_qz.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("linking Gram must be k x k".into()));
        }
        let form = TorsionLinkingForm { invariant_factors, gram_qz };
        for i in 0..k {
            for j in 0..k {
                if form.gram_qz[i][j] != form.gram_qz[j][i] {
                    return Err(Error::NotSymmetric);
                }
                // d_i * lambda(g_i, g_j) must vanish mod 1
                let v = form.gram_qz[i][j].to_rational()
                    * BigRational::from_integer(BigInt::from(form.invariant_factors[i]));
                if !v.is_integer() {
                    return Err(Error::Parse(format!(
                        "order relation violated at ({i},{j})"
                    )));
                }
            }
        }
        Ok(form)
    }

    /// The trivial form on the trivial group.
    pub fn trivial() -> Self {
        TorsionLinkingForm { invariant_factors: vec![], gram_qz: vec![] }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn gram_qz(&self) -> &[Vec<Fraction>] {
        &self.gram_qz
    }

    pub fn group_order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    /// Value of the pairing on two elements given in generator coordinates.
    pub fn eval(&self, x: &[u64], y: &[u64]) -> Fraction {
        let k = self.invariant_factors.len();
        assert_eq!(x.len(), k);
        assert_eq!(y.len(), k);
        let mut acc = BigRational::zero();
        for i in 0..k {
            for j in 0..k {
                acc += BigRational::from_integer(BigInt::from(x[i]))
                    * self.gram_qz[i][j].to_rational()
                    * BigRational::from_integer(BigInt::from(y[j]));
            }
        }
        Fraction::from_rational_mod_one(&acc)
    }

    /// Brute-force isomorphism test: enumerate generator images, keep the
    /// maps that are automorphisms of the abstract group, and check the
    /// pairing is preserved. Exhaustive for group order within `budget`,
    /// hence Decided either way.
    pub fn isomorphic(&self, other: &TorsionLinkingForm, budget: u64) -> Result<Decision> {
        if self.invariant_factors != other.invariant_factors {
            return Ok(Decision::Decided(false));
        }
        let order = self.group_order();
        if order > budget {
            return Err(Error::BudgetExceeded(format!(
                "torsion order {order} exceeds budget {budget}"
            )));
        }
        if self.invariant_factors.is_empty() {
            return Ok(Decision::Decided(true));
        }

        let k = self.invariant_factors.len();
        let factors = &self.invariant_factors;

        // all elements of the target group, in generator coordinates
        let elements: Vec<Vec<u64>> = {
            let mut out = vec![vec![]];
            for &d in factors.iter() {
                let mut next = Vec::with_capacity(out.len() * d as usize);
                for e in &out {
                    for c in 0..d {
                        let mut e2 = e.clone();
                        e2.push(c);
                        next.push(e2);
                    }
                }
                out = next;
            }
            out
        };

        let elem_order = |e: &[u64]| -> u64 {
            // order of sum c_i g_i = lcm(d_i / gcd(c_i, d_i))
            let mut ord: u64 = 1;
            for (c, &d) in e.iter().zip(factors) {
                let g = num_integer::gcd(*c, d);
                ord = num_integer::lcm(ord, d / g);
            }
            ord
        };

        // candidate images for generator i: elements of order dividing d_i
        // (a hom needs d_i * image = 0); exact order d_i is necessary for an
        // automorphism but surjectivity is checked globally below.
        let candidates: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                (0..elements.len())
                    .filter(|&e| factors[i] % elem_order(&elements[e]) == 0)
                    .collect()
            })
            .collect();

        // lexicographic depth-first enumeration, deterministic
        let mut choice = vec![0usize; k];
        let mut depth = 0usize;
        loop {
            if depth == k {
                let imgs: Vec<Vec<u64>> = (0..k)
                    .map(|i| elements[candidates[i][choice[i]]].clone())
                    .collect();
                if is_automorphism(factors, &imgs) && preserves_form(self, other, &imgs) {
                    return Ok(Decision::Decided(true));
                }
                // backtrack
                depth -= 1;
                loop {
                    choice[depth] += 1;
                    if choice[depth] < candidates[depth].len() {
                        depth += 1;
                        break;
                    }
                    choice[depth] = 0;
                    if depth == 0 {
                        return Ok(Decision::Decided(false));
                    }
                    depth -= 1;
                }
                continue;
            }
            // partial pruning: pairings among chosen generators must match
            let i = depth;
            let img_i = &elements[candidates[i][choice[i]]];
            let mut ok = other.eval(img_i, img_i) == self.gram_qz[i][i];
            if ok {
                for j in 0..i {
                    let img_j = &elements[candidates[j][choice[j]]];
                    if other.eval(img_i, img_j) != self.gram_qz[i][j] {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                depth += 1;
                continue;
            }
            loop {
                choice[depth] += 1;
                if choice[depth] < candidates[depth].len() {
                    break;
                }
                choice[depth] = 0;
                if depth == 0 {
                    return Ok(Decision::Decided(false));
                }
                depth -= 1;
            }
        }
    }
}

fn is_automorphism(factors: &[u64], images: &[Vec<u64>]) -> bool {
    // the hom g_i -> images[i] is an automorphism iff it is surjective
    let order: u64 = factors.iter().product();
    let k = factors.len();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut frontier = vec![vec![0u64; k]];
    seen.insert(frontier[0].clone());
    while let Some(e) = frontier.pop() {
        for img in images {
            let mut f = e.clone();
            for t in 0..k {
                f[t] = (f[t] + img[t]) % factors[t];
            }
            if seen.insert(f.clone()) {
                frontier.push(f);
            }
        }
    }
    seen.len() as u64 == order
}

fn preserves_form(a: &TorsionLinkingForm, b: &TorsionLinkingForm, images: &[Vec<u64>]) -> bool {
    let k = a.invariant_factors.len();
    for i in 0..k {
        for j in i..k {
            if b.eval(&images[i], &images[j]) != a.gram_qz[i][j] {
                return false;
            }
        }
    }
    true
}

/// Discriminant data of `b`: the free rank is the nullity, the torsion
/// linking form lives on the cokernel of the nondegenerate core `C`, with
/// `lambda([x],[y]) = + x^T C^{-1} y mod 1` (positive sign convention;
/// `negate_orientation` flips it).
pub fn discriminant(b: &BilinearForm) -> DiscriminantData {
    discriminant_oriented(b, false)
}

pub fn discriminant_oriented(b: &BilinearForm, negate_orientation: bool) -> DiscriminantData {
    let (free_rank, core, _) = b.radical_split();
    let r = core.rank();
    if r == 0 {
        return DiscriminantData { free_rank, torsion: TorsionLinkingForm::trivial() };
    }
    let (d, u, _v) = core.gram().smith_normal_form();
    // coker(C) ≅ Z^r / d Z^r via x -> u x; generator of the Z/d_i factor
    // lifts to column i of u^{-1}
    let u_inv = u.rational_inverse().expect("unimodular");
    let c_inv = core.gram().rational_inverse().expect("core nondegenerate");

    let mut torsion_idx = Vec::new();
    for i in 0..r {
        let di = d.at(i, i);
        debug_assert!(!di.is_zero());
        if !di.abs().is_one() {
            torsion_idx.push(i);
        }
    }
    let factors: Vec<u64> = torsion_idx
        .iter()
        .map(|&i| d.at(i, i).to_u64().expect("desk-scale torsion"))
        .collect();

    let k = torsion_idx.len();
    let mut gram_qz = vec![vec![Fraction { num: 0, den: 1 }; k]; k];
    for (a, &ia) in torsion_idx.iter().enumerate() {
        for (bb, &ib) in torsion_idx.iter().enumerate() {
            // lambda = (u^{-1} e_ia)^T C^{-1} (u^{-1} e_ib)
            let xa: Vec<BigRational> = (0..r).map(|t| u_inv.at(t, ia).clone()).collect();
            let xb: Vec<BigRational> = (0..r).map(|t| u_inv.at(t, ib).clone()).collect();
            let cb = c_inv.mul_vec(&xb);
            let mut val: BigRational = (0..r).map(|t| &xa[t] * &cb[t]).sum();
            if negate_orientation {
                val = -val;
            }
            gram_qz[a][bb] = Fraction::from_rational_mod_one(&val);
        }
    }

    let torsion = TorsionLinkingForm::new(factors, gram_qz).expect("construction is valid");
    DiscriminantData { free_rank, torsion }
}

/// Stable ±equivalence of presentations: true iff the free ranks agree and
/// the torsion linking forms are isomorphic.
pub fn pm_equivalent(b: &BilinearForm, c: &BilinearForm) -> Decision {
    pm_equivalent_budget(b, c, 10_000)
}

pub fn pm_equivalent_budget(b: &BilinearForm, c: &BilinearForm, budget: u64) -> Decision {
    let db = discriminant(b);
    let dc = discriminant(c);
    if db.free_rank != dc.free_rank {
        return Decision::Decided(false);
    }
    match db.torsion.isomorphic(&dc.torsion, budget) {
        Ok(d) => d,
        Err(_) => Decision::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn frac(num: u64, den: u64) -> Fraction {
        Fraction { num, den }
    }

    fn z5(lam_num: u64) -> TorsionLinkingForm {
        TorsionLinkingForm::new(vec![5], vec![vec![frac(lam_num, 5)]]).unwrap()
    }

    #[test]
    fn discriminant_rank_one() {
        let d = discriminant(&BilinearForm::rank_one(5));
        assert_eq!(d.free_rank, 0);
        assert_eq!(d.torsion.invariant_factors(), &[5]);
        assert_eq!(d.torsion.gram_qz()[0][0], frac(1, 5));
    }

    #[test]
    fn discriminant_zero_form() {
        let d = discriminant(&BilinearForm::rank_one(0));
        assert_eq!(d.free_rank, 1);
        assert!(d.torsion.invariant_factors().is_empty());
    }

    #[test]
    fn discriminant_unimodular_is_trivial() {
        let d = discriminant(&BilinearForm::diagonal(&[1, -1]));
        assert_eq!(d.free_rank, 0);
        assert!(d.torsion.invariant_factors().is_empty());
    }

    #[test]
    fn discriminant_orientation_flag() {
        let d = discriminant_oriented(&BilinearForm::rank_one(5), true);
        assert_eq!(d.torsion.gram_qz()[0][0], frac(4, 5));
    }

    #[test]
    fn torsion_iso_square_classes_mod_5() {
        // 1/5 ~ 4/5 via g -> 2g, but 1/5 !~ 2/5
        assert_eq!(z5(1).isomorphic(&z5(4), 100).unwrap(), Decision::Decided(true));
        assert_eq!(z5(1).isomorphic(&z5(2), 100).unwrap(), Decision::Decided(false));
        assert_eq!(z5(2).isomorphic(&z5(3), 100).unwrap(), Decision::Decided(true));
        assert_eq!(z5(1).isomorphic(&z5(1), 100).unwrap(), Decision::Decided(true));
    }

    #[test]
    fn torsion_iso_budget() {
        let big = TorsionLinkingForm::new(vec![10007], vec![vec![frac(1, 10007)]]).unwrap();
        assert!(matches!(
            big.isomorphic(&big, 10_000),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn pm_equivalent_hyperbolic_diag() {
        assert_eq!(
            pm_equivalent(&BilinearForm::hyperbolic(), &BilinearForm::diagonal(&[1, -1])),
            Decision::Decided(true)
        );
    }

    #[test]
    fn pm_equivalent_distinguishes_square_classes() {
        // (5) has lambda = 1/5; [[2,1],[1,3]] presents Z/5 in the other
        // square class
        let b = BilinearForm::rank_one(5);
        let c = BilinearForm::from_i64(&[&[2, 1], &[1, 3]]);
        let dc = discriminant(&c);
        assert_eq!(dc.torsion.invariant_factors(), &[5]);
        let lam = dc.torsion.gram_qz()[0][0].clone();
        // representative of the non-square class {2,3}
        assert!(lam == frac(2, 5) || lam == frac(3, 5), "got {lam:?}");
        assert_eq!(pm_equivalent(&b, &c), Decision::Decided(false));
    }

    #[test]
    fn pm_equivalent_stabilization() {
        let b = BilinearForm::from_i64(&[&[2, 1], &[1, 2]]);
        let stab = b.direct_sum(&BilinearForm::diagonal(&[1, -1]));
        assert_eq!(pm_equivalent(&b, &stab), Decision::Decided(true));
    }

    #[test]
    fn discriminant_invariant_under_unimodular_pullback_and_stabilization() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let mut g = crate::matrix::IntMatrix::zero(n, n);
            for i in 0..n {
                for j in i..n {
                    let x = BigInt::from(rng.gen_range(-3i64..=3));
                    *g.at_mut(i, j) = x.clone();
                    *g.at_mut(j, i) = x;
                }
            }
            let b = BilinearForm::new(g).unwrap();
            let d0 = discriminant(&b);

            // unimodular pullback
            let mut p = crate::matrix::IntMatrix::identity(n);
            for _ in 0..4 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let mut e = crate::matrix::IntMatrix::identity(n);
                *e.at_mut(i, j) = BigInt::from(rng.gen_range(-2i64..=2));
                p = p.mul(&e);
            }
            let bp = b.pullback(&p).unwrap();
            let d1 = discriminant(&bp);
            assert_eq!(d0.free_rank, d1.free_rank);
            assert_eq!(
                d0.torsion.isomorphic(&d1.torsion, 10_000).unwrap(),
                Decision::Decided(true)
            );

            // ±1 stabilization
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let d2 = discriminant(&b.direct_sum(&BilinearForm::rank_one(sign)));
            assert_eq!(d0.free_rank, d2.free_rank);
            assert_eq!(
                d0.torsion.isomorphic(&d2.torsion, 10_000).unwrap(),
                Decision::Decided(true)
            );
        }
    }

    #[test]
    fn pm_equivalent_agrees_with_bruteforce_oracle_rank_le_2() {
        // soundness: oracle Decided(true) ⇒ pm_equivalent Decided(true)
        let mut forms = Vec::new();
        for a in -2i64..=2 {
            forms.push(BilinearForm::rank_one(a));
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    forms.push(BilinearForm::from_i64(&[&[a, b], &[b, c]]));
                }
            }
        }
        for x in &forms {
            for y in &forms {
                if x.congruent_stably_bruteforce(y, 1, 1).is_true() {
                    assert_eq!(
                        pm_equivalent(x, y),
                        Decision::Decided(true),
                        "oracle true but pm_equivalent disagrees for {:?} vs {:?}",
                        x.gram(),
                        y.gram()
                    );
                }
            }
        }
    }

    #[test]
    fn pm_equivalent_is_equivalence_relation_on_pool() {
        let pool = vec![
            BilinearForm::rank_one(5),
            BilinearForm::hyperbolic(),
            BilinearForm::diagonal(&[1, -1]),
            BilinearForm::rank_one(2),
            BilinearForm::rank_one(-2),
            BilinearForm::from_i64(&[&[2, 1], &[1, 2]]),
            BilinearForm::rank_one(0),
        ];
        let n = pool.len();
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                rel[i][j] = pm_equivalent(&pool[i], &pool[j]).is_true();
            }
        }
        for i in 0..n {
            assert!(rel[i][i], "reflexive at {i}");
            for j in 0..n {
                assert_eq!(rel[i][j], rel[j][i], "symmetric at {i},{j}");
                for k in 0..n {
                    if rel[i][j] && rel[j][k] {
                        assert!(rel[i][k], "transitive at {i},{j},{k}");
                    }
                }
            }
        }
    }
}
