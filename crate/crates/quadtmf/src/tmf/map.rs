//! Graded maps between finite sums of shifted TMF copies, as matrices of
//! π_*TMF elements, plus a few explicit small matrices on L₀ (restriction,
//! duality, transfer) as builtins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tmf::coeff::{TmfCoeffTable, TmfElement};

/// A degree-`degree` map ⊕_j TMF[source_j] → ⊕_i TMF[target_i]. Entry
/// (i, j) lives in π of degree source_j − target_i + degree; this is
/// validated on construction (zeros included).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmfMap {
    pub source: Vec<i64>,
    pub target: Vec<i64>,
    pub degree: i64,
    /// row-major: matrix[i][j] maps summand j of the source to summand i
    /// of the target
    pub matrix: Vec<Vec<TmfElement>>,
}

impl TmfMap {
    pub fn new(
        source: Vec<i64>,
        target: Vec<i64>,
        degree: i64,
        matrix: Vec<Vec<TmfElement>>,
    ) -> Result<Self> {
        if matrix.len() != target.len() || matrix.iter().any(|row| row.len() != source.len()) {
            return Err(Error::ShapeMismatch(format!(
                "matrix must be {}x{}",
                target.len(),
                source.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let expected = source[j] - target[i] + degree;
                if entry.degree != expected {
                    return Err(Error::ShapeMismatch(format!(
                        "entry ({i},{j}) has degree {}, expected {expected}",
                        entry.degree
                    )));
                }
            }
        }
        Ok(TmfMap { source, target, degree, matrix })
    }

    /// Identity on ⊕ TMF[shifts].
    pub fn identity(shifts: Vec<i64>) -> Self {
        let n = shifts.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            TmfElement::one()
                        } else {
                            TmfElement::zero(shifts[j] - shifts[i])
                        }
                    })
                    .collect()
            })
            .collect();
        TmfMap { source: shifts.clone(), target: shifts, degree: 0, matrix }
    }

    /// Composite self ∘ g (apply `g` first). Degrees add; entries multiply
    /// in π_*TMF, so they may come out Unknown where the table is silent.
    pub fn compose(&self, g: &TmfMap, table: &TmfCoeffTable) -> Result<TmfMap> {
        if self.source != g.target {
            return Err(Error::ShapeMismatch(format!(
                "source shifts {:?} do not match target shifts {:?}",
                self.source, g.target
            )));
        }
        let degree = self.degree + g.degree;
        let mut matrix = Vec::with_capacity(self.target.len());
        for i in 0..self.target.len() {
            let mut row = Vec::with_capacity(g.source.len());
            for j in 0..g.source.len() {
                let mut acc = TmfElement::zero(g.source[j] - self.target[i] + degree);
                for k in 0..self.source.len() {
                    let prod = self.matrix[i][k].mul(&g.matrix[k][j], table);
                    acc = acc.add(&prod, table)?;
                }
                row.push(acc);
            }
            matrix.push(row);
        }
        TmfMap::new(g.source.clone(), self.target.clone(), degree, matrix)
    }

    /// True for a 1×1 matrix; returns its sole entry.
    pub fn scalar(&self) -> Option<&TmfElement> {
        if self.target.len() == 1 && self.source.len() == 1 {
            Some(&self.matrix[0][0])
        } else {
            None
        }
    }
}

/// Sign parameter for the construction's ±1 ambiguities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn unit(self, table: &TmfCoeffTable) -> TmfElement {
        let one = TmfElement::one();
        match self {
            Sign::Plus => one,
            Sign::Minus => one.scale(&num_bigint::BigInt::from(-1), table),
        }
    }
}

/// The explicit maps on L₀ = TMF ⊕ TMF[1] (written in the dual
/// basis, so sources/targets are the shifts [0, 1]).
pub fn builtin_map(name: &str, sign: Sign, table: &TmfCoeffTable) -> Result<TmfMap> {
    let eta = table.generator("eta")?;
    let s = sign.unit(table);
    match name {
        // e^*: L₀ → TMF, the row (1 η)
        "restriction_L0" => TmfMap::new(
            vec![0, 1],
            vec![0],
            0,
            vec![vec![TmfElement::one(), eta]],
        ),
        // self-duality of L₀: the matrix (0 ±1; ±1 η)
        "duality_L0" => TmfMap::new(
            vec![0, 1],
            vec![1, 0],
            0,
            vec![
                vec![TmfElement::zero(-1), s.clone()],
                vec![s, eta],
            ],
        ),
        // dual of the restriction: the column (η; 1), degree 1
        "transfer_L0" => TmfMap::new(
            vec![0],
            vec![0, 1],
            1,
            vec![
                vec![eta.mul(&s, table)],
                vec![s],
            ],
        ),
        // unit-interval cobordism with a 2-handle: the middle matrix of the
        // S²×S² composite, (1 η; 0 1) with a choice of ± on the diagonal
        "slide_L0" => TmfMap::new(
            vec![0, 1],
            vec![0, 1],
            0,
            vec![
                vec![s.clone(), eta],
                vec![TmfElement::zero(-1), s],
            ],
        ),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmf::coeff::TmfValue;

    fn table() -> TmfCoeffTable {
        TmfCoeffTable::load_default().unwrap()
    }

    #[test]
    fn shape_and_degree_validation() {
        let t = table();
        let eta = t.generator("eta").unwrap();
        // η in a slot demanding degree 0 must be rejected
        assert!(matches!(
            TmfMap::new(vec![0], vec![0], 0, vec![vec![eta]]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            TmfMap::new(vec![0, 1], vec![0], 0, vec![vec![TmfElement::one()]]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn identity_composes_neutrally() {
        let t = table();
        let f = builtin_map("restriction_L0", Sign::Plus, &t).unwrap();
        let id_src = TmfMap::identity(vec![0, 1]);
        let id_tgt = TmfMap::identity(vec![0]);
        assert_eq!(f.compose(&id_src, &t).unwrap(), f);
        assert_eq!(id_tgt.compose(&f, &t).unwrap(), f);
    }

    #[test]
    fn restriction_transfer_composite_is_two_eta() {
        let t = table();
        let res = builtin_map("restriction_L0", Sign::Plus, &t).unwrap();
        let tr = builtin_map("transfer_L0", Sign::Plus, &t).unwrap();
        let comp = res.compose(&tr, &t).unwrap();
        // (1 η)·(η; 1) = 2η = 0
        assert!(comp.scalar().unwrap().is_zero());
        assert_eq!(comp.degree, 1);
    }

    #[test]
    fn s2xs2_composite_is_eta() {
        let t = table();
        let res = builtin_map("restriction_L0", Sign::Plus, &t).unwrap();
        let mid = builtin_map("slide_L0", Sign::Plus, &t).unwrap();
        let tr = builtin_map("transfer_L0", Sign::Plus, &t).unwrap();
        let comp = res.compose(&mid, &t).unwrap().compose(&tr, &t).unwrap();
        assert_eq!(comp.scalar().unwrap(), &t.generator("eta").unwrap());
        // the sign ambiguity does not matter: η = -η because 2η = 0
        let mid_minus = builtin_map("slide_L0", Sign::Minus, &t).unwrap();
        let comp2 = res.compose(&mid_minus, &t).unwrap().compose(&tr, &t).unwrap();
        assert_eq!(comp2.scalar().unwrap(), &t.generator("eta").unwrap());
    }

    #[test]
    fn duality_matrix_shape() {
        let t = table();
        let d = builtin_map("duality_L0", Sign::Plus, &t).unwrap();
        assert_eq!(d.target, vec![1, 0]);
        assert!(matches!(d.matrix[0][0].value, TmfValue::Zero));
        assert_eq!(d.matrix[1][1], t.generator("eta").unwrap());
        // duality composed with itself resolves (entries η·η = η² known)
        let dd = d.compose(&builtin_map("duality_L0", Sign::Plus, &t).unwrap(), &t);
        assert!(matches!(dd, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn composition_degree_adds_and_associates() {
        let t = table();
        let res = builtin_map("restriction_L0", Sign::Plus, &t).unwrap();
        let mid = builtin_map("slide_L0", Sign::Minus, &t).unwrap();
        let tr = builtin_map("transfer_L0", Sign::Plus, &t).unwrap();
        let left = res.compose(&mid, &t).unwrap().compose(&tr, &t).unwrap();
        let right = res.compose(&mid.compose(&tr, &t).unwrap(), &t).unwrap();
        assert_eq!(left, right);
        assert_eq!(left.degree, 1);
    }
}
