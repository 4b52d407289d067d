//! Builtin named forms and lattices. Each Gram matrix is validated on
//! construction (symmetry, and for the even unimodular lattices: parity,
//! determinant and definiteness).

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::bilform::BilinearForm;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Gram matrix of the E8 root lattice in the standard root basis
/// (the E8 Cartan matrix).
pub fn e8() -> BilinearForm {
    let g = IntMatrix::from_i64(&[
        &[2, -1, 0, 0, 0, 0, 0, 0],
        &[-1, 2, -1, 0, 0, 0, 0, 0],
        &[0, -1, 2, -1, 0, 0, 0, -1],
        &[0, 0, -1, 2, -1, 0, 0, 0],
        &[0, 0, 0, -1, 2, -1, 0, 0],
        &[0, 0, 0, 0, -1, 2, -1, 0],
        &[0, 0, 0, 0, 0, -1, 2, 0],
        &[0, 0, -1, 0, 0, 0, 0, 2],
    ]);
    let form = BilinearForm::with_label(g, "E8").expect("symmetric");
    debug_assert!(validate_even_unimodular_posdef(&form).is_ok());
    form
}

/// Gram matrix of the even unimodular lattice D16+ in the basis
/// e1+e2, e2-e1, e3-e2, ..., e15-e14, (e1+...+e16)/2.
pub fn d16_plus() -> BilinearForm {
    let mut basis: Vec<Vec<i64>> = Vec::with_capacity(16);
    let mut v = vec![0i64; 16];
    v[0] = 1;
    v[1] = 1;
    basis.push(v);
    for i in 1..15 {
        let mut v = vec![0i64; 16];
        v[i] = 1;
        v[i - 1] = -1;
        basis.push(v);
    }
    // the glue vector (1/2, ..., 1/2); dot products stay integral, so work
    // with 2x the vector and divide pairings by 4
    basis.push(vec![1; 16]); // placeholder marker handled below

    let n = 16;
    let mut gram = IntMatrix::zero(n, n);
    let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    for i in 0..n {
        for j in 0..n {
            let glue_i = i == n - 1;
            let glue_j = j == n - 1;
            let raw = dot(&basis[i], &basis[j]);
            let val = match (glue_i, glue_j) {
                (true, true) => raw / 4,  // (1/2 * 1/2) * 16 = 4
                (true, false) | (false, true) => raw / 2,
                (false, false) => raw,
            };
            *gram.at_mut(i, j) = BigInt::from(val);
        }
    }
    let form = BilinearForm::with_label(gram, "D16+").expect("symmetric");
    debug_assert!(validate_even_unimodular_posdef(&form).is_ok());
    form
}

/// The hyperbolic plane, labelled.
pub fn hyperbolic() -> BilinearForm {
    BilinearForm::with_label(IntMatrix::from_i64(&[&[0, 1], &[1, 0]]), "H").expect("symmetric")
}

pub fn validate_even_unimodular_posdef(b: &BilinearForm) -> Result<()> {
    if !b.is_even() {
        return Err(Error::NotEven);
    }
    if !b.det().abs().is_one() {
        return Err(Error::NotUnimodular { det: b.det().to_string() });
    }
    let sig = b.signature();
    if sig.b_minus != 0 || sig.b_zero != 0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// Looks up a builtin form by name. Recognized: E8, D16+, H (hyperbolic
/// plane), A1 (= (2)), and `diag(a,b,...)` shorthand.
pub fn builtin(name: &str) -> Result<BilinearForm> {
    match name {
        "E8" => Ok(e8()),
        "D16+" => Ok(d16_plus()),
        "H" => Ok(hyperbolic()),
        "A1" => Ok(BilinearForm::with_label(IntMatrix::from_i64(&[&[2]]), "A1").unwrap()),
        _ => {
            if let Some(inner) = name.strip_prefix("diag(").and_then(|s| s.strip_suffix(')')) {
                let entries: std::result::Result<Vec<i64>, _> =
                    inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
                let entries = entries.map_err(|e| Error::Parse(format!("bad diag entry: {e}")))?;
                return Ok(BilinearForm::diagonal(&entries));
            }
            Err(Error::UnknownName(name.to_string()))
        }
    }
}

/// Names of all builtin forms, for CLI listings.
pub fn builtin_names() -> &'static [&'static str] {
    &["E8", "D16+", "H", "A1"]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_is_even_unimodular_posdef() {
        validate_even_unimodular_posdef(&e8()).unwrap();
        let sig = e8().signature();
        assert_eq!((sig.b_plus, sig.b_minus, sig.b_zero), (8, 0, 0));
    }

    #[test]
    fn d16_plus_is_even_unimodular_posdef() {
        validate_even_unimodular_posdef(&d16_plus()).unwrap();
        let sig = d16_plus().signature();
        assert_eq!((sig.b_plus, sig.b_minus, sig.b_zero), (16, 0, 0));
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(builtin("E8").unwrap().rank(), 8);
        assert_eq!(builtin("diag(1,-1)").unwrap().rank(), 2);
        assert!(matches!(builtin("nope"), Err(Error::UnknownName(_))));
    }
}
