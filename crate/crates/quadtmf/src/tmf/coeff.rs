//! The graded coefficient ring π_*TMF as a data-driven partial ring: group
//! presentations per degree, named generators, and a partial multiplication
//! table, loaded from a versioned JSON file and validated against the
//! required structural facts on load.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default shipped table; override with [`TmfCoeffTable::from_json`] or the
/// `QUADTMF_TABLE` environment variable at the CLI layer.
pub const DEFAULT_TABLE_JSON: &str = include_str!("../../data/tmf_table.json");

/// Group presentation in one degree: the tracked named generators with
/// their orders (0 = infinite, None = untracked), plus whether the listing
/// is complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub degree: i64,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial_on: Option<String>,
    pub generators: Vec<GeneratorDecl>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDecl {
    pub name: String,
    /// cyclic order: 0 = infinite, None = untracked
    pub order: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ProductDecl {
    left: String,
    right: String,
    /// linear combination as (generator, integer coefficient) pairs;
    /// empty = zero
    result: Vec<(String, String)>,
    provenance: String,
}

#[derive(Debug, Clone, Deserialize)]
struct TableFile {
    version: u32,
    degree_range: (i64, i64),
    pi0_units_are_pm_one: bool,
    groups: Vec<GroupPresentation>,
    products: Vec<ProductDecl>,
}

/// Validated coefficient table. Immutable after load.
#[derive(Debug, Clone)]
pub struct TmfCoeffTable {
    pub version: u32,
    pub degree_range: (i64, i64),
    groups: BTreeMap<i64, GroupPresentation>,
    /// generator name -> (degree, order)
    generators: BTreeMap<String, (i64, Option<u64>)>,
    /// (left, right) -> linear combination
    products: BTreeMap<(String, String), BTreeMap<String, BigInt>>,
}

impl TmfCoeffTable {
    /// Loads and validates the shipped default table.
    pub fn load_default() -> Result<Self> {
        Self::from_json(DEFAULT_TABLE_JSON)
    }

    /// Parses and validates a table. Every violated fact is reported.
    pub fn from_json(json: &str) -> Result<Self> {
        let file: TableFile =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("table JSON: {e}")))?;

        let mut violations = Vec::new();
        let mut groups = BTreeMap::new();
        let mut generators: BTreeMap<String, (i64, Option<u64>)> = BTreeMap::new();
        let (lo, hi) = file.degree_range;
        if lo > hi {
            violations.push("degree_range is empty".to_string());
        }
        for g in &file.groups {
            if g.degree < lo || g.degree > hi {
                violations.push(format!("group degree {} outside degree_range", g.degree));
            }
            if groups.insert(g.degree, g.clone()).is_some() {
                violations.push(format!("duplicate group entry for degree {}", g.degree));
            }
            for gen in &g.generators {
                if generators
                    .insert(gen.name.clone(), (g.degree, gen.order))
                    .is_some()
                {
                    violations.push(format!("duplicate generator name {:?}", gen.name));
                }
            }
        }

        // facts the table must certify
        let expect = |name: &str, degree: i64, violations: &mut Vec<String>| {
            match generators.get(name) {
                Some((d, _)) if *d == degree => {}
                Some((d, _)) => {
                    violations.push(format!("{name} listed in degree {d}, expected {degree}"))
                }
                None => violations.push(format!("missing required generator {name} (degree {degree})")),
            }
        };
        expect("eta", 1, &mut violations);
        expect("nu", 3, &mut violations);
        expect("eps", 8, &mut violations);
        expect("kappa", 14, &mut violations);
        expect("kappabar", 20, &mut violations);
        if let Some((_, order)) = generators.get("eta") {
            if *order != Some(2) {
                violations.push("2*eta = 0 violated: eta must have order 2".to_string());
            }
        }
        match groups.get(&-1) {
            Some(g) if g.complete && g.generators.is_empty() => {}
            Some(_) => violations.push("degree -1 group must be complete and trivial".to_string()),
            None => violations.push("degree -1 entry missing (must be the trivial group)".to_string()),
        }
        match groups.get(&0) {
            Some(g) if g.polynomial_on.as_deref() == Some("j") => {}
            _ => violations.push("degree 0 must be the polynomial ring on j".to_string()),
        }
        if !file.pi0_units_are_pm_one {
            violations.push("units of pi_0 must be ±1".to_string());
        }

        // products
        let mut products: BTreeMap<(String, String), BTreeMap<String, BigInt>> = BTreeMap::new();
        for p in &file.products {
            let (ldeg, lord) = match generators.get(&p.left) {
                Some(v) => *v,
                None => {
                    violations.push(format!("product references unknown generator {:?}", p.left));
                    continue;
                }
            };
            let (rdeg, rord) = match generators.get(&p.right) {
                Some(v) => *v,
                None => {
                    violations.push(format!("product references unknown generator {:?}", p.right));
                    continue;
                }
            };
            let mut combo = BTreeMap::new();
            let mut bad = false;
            for (name, coeff) in &p.result {
                let Some((gdeg, _)) = generators.get(name) else {
                    violations.push(format!("product result references unknown generator {name:?}"));
                    bad = true;
                    continue;
                };
                if *gdeg != ldeg + rdeg {
                    violations.push(format!(
                        "product {}·{} result {name} has degree {gdeg}, expected {}",
                        p.left,
                        p.right,
                        ldeg + rdeg
                    ));
                }
                let c: BigInt = match coeff.parse() {
                    Ok(c) => c,
                    Err(e) => {
                        violations.push(format!("bad coefficient {coeff:?}: {e}"));
                        bad = true;
                        continue;
                    }
                };
                *combo.entry(name.clone()).or_insert_with(BigInt::zero) += c;
            }
            if bad {
                continue;
            }
            // torsion orders respected: ord(x)·(x·y) = 0 and ord(y)·(x·y) = 0
            for ord in [lord, rord] {
                if let Some(k) = ord {
                    if k > 0 {
                        let scaled: BTreeMap<String, BigInt> = combo
                            .iter()
                            .map(|(n, c)| (n.clone(), c * BigInt::from(k)))
                            .collect();
                        if !reduces_to_zero(&scaled, &generators) {
                            violations.push(format!(
                                "torsion violated: {}·({}·{}) ≠ 0",
                                k, p.left, p.right
                            ));
                        }
                    }
                }
            }
            products.insert((p.left.clone(), p.right.clone()), combo);
        }

        // graded commutativity for pairs stored in both orders
        for ((l, r), combo) in &products {
            if let Some(rev) = products.get(&(r.clone(), l.clone())) {
                let ldeg = generators[l].0;
                let rdeg = generators[r].0;
                let sign: BigInt = if (ldeg * rdeg) % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                let mut diff: BTreeMap<String, BigInt> = rev.clone();
                for (n, c) in combo {
                    *diff.entry(n.clone()).or_insert_with(BigInt::zero) -= c * &sign;
                }
                if !reduces_to_zero(&diff, &generators) {
                    violations.push(format!("graded commutativity violated for {l}·{r}"));
                }
            }
        }

        if !violations.is_empty() {
            return Err(Error::ValidationError(violations));
        }
        Ok(TmfCoeffTable {
            version: file.version,
            degree_range: file.degree_range,
            groups,
            generators,
            products,
        })
    }

    /// Stored presentation at degree `n`.
    pub fn group_at(&self, n: i64) -> Result<&GroupPresentation> {
        if n < self.degree_range.0 || n > self.degree_range.1 {
            return Err(Error::OutOfRange(n));
        }
        self.groups.get(&n).ok_or(Error::OutOfRange(n))
    }

    pub fn generator(&self, name: &str) -> Result<TmfElement> {
        let (degree, _) = self
            .generators
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        Ok(TmfElement {
            degree: *degree,
            value: TmfValue::Combo(BTreeMap::from([(name.to_string(), BigInt::one())])),
        }
        .canonicalize(self))
    }

    pub fn generator_order(&self, name: &str) -> Option<Option<u64>> {
        self.generators.get(name).map(|&(_, ord)| ord)
    }

    fn monomial_product(&self, l: &str, r: &str) -> Option<(BTreeMap<String, BigInt>, BigInt)> {
        // unit acts as identity
        if l == "1" {
            return Some((BTreeMap::from([(r.to_string(), BigInt::one())]), BigInt::one()));
        }
        if r == "1" {
            return Some((BTreeMap::from([(l.to_string(), BigInt::one())]), BigInt::one()));
        }
        if let Some(c) = self.products.get(&(l.to_string(), r.to_string())) {
            return Some((c.clone(), BigInt::one()));
        }
        // graded commutativity lets us use the reversed entry with a sign
        if let Some(c) = self.products.get(&(r.to_string(), l.to_string())) {
            let ldeg = self.generators[l].0;
            let rdeg = self.generators[r].0;
            let sign = if (ldeg * rdeg) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            return Some((c.clone(), sign));
        }
        None
    }
}

fn reduces_to_zero(
    combo: &BTreeMap<String, BigInt>,
    generators: &BTreeMap<String, (i64, Option<u64>)>,
) -> bool {
    combo.iter().all(|(name, coeff)| {
        match generators.get(name).and_then(|&(_, ord)| ord) {
            Some(k) if k > 0 => (coeff % BigInt::from(k)).is_zero(),
            // infinite or untracked order: must vanish on the nose
            _ => coeff.is_zero(),
        }
    })
}

/// An element of π_*TMF at a fixed degree: zero, an integer combination of
/// named generators, or Unknown (arithmetic never invents products the
/// table does not store).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmfElement {
    pub degree: i64,
    pub value: TmfValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TmfValue {
    Zero,
    /// generator name -> integer coefficient (serialized as decimal string)
    Combo(
        #[serde(with = "combo_strings")]
        BTreeMap<String, BigInt>,
    ),
    Unknown(String),
}

mod combo_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, BigInt>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let repr: BTreeMap<&String, String> = m.iter().map(|(k, v)| (k, v.to_string())).collect();
        repr.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<String, BigInt>, D::Error> {
        let repr: BTreeMap<String, String> = BTreeMap::deserialize(d)?;
        repr.into_iter()
            .map(|(k, v)| Ok((k, v.parse().map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

impl TmfElement {
    pub fn zero(degree: i64) -> Self {
        TmfElement { degree, value: TmfValue::Zero }
    }

    pub fn unknown(degree: i64, reason: impl Into<String>) -> Self {
        TmfElement { degree, value: TmfValue::Unknown(reason.into()) }
    }

    /// The unit 1 ∈ π₀.
    pub fn one() -> Self {
        TmfElement {
            degree: 0,
            value: TmfValue::Combo(BTreeMap::from([("1".to_string(), BigInt::one())])),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.value, TmfValue::Zero)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.value, TmfValue::Unknown(_))
    }

    /// Reduce coefficients modulo the generators' torsion orders and drop
    /// zeros; the canonical form is unique.
    pub fn canonicalize(mut self, table: &TmfCoeffTable) -> Self {
        if let TmfValue::Combo(combo) = &mut self.value {
            combo.retain(|name, coeff| {
                if let Some(Some(k)) = table.generator_order(name) {
                    if k > 0 {
                        let m = BigInt::from(k);
                        *coeff = ((&*coeff % &m) + &m) % &m;
                    }
                }
                !coeff.is_zero()
            });
            if combo.is_empty() {
                self.value = TmfValue::Zero;
            }
        }
        self
    }

    pub fn add(&self, other: &TmfElement, table: &TmfCoeffTable) -> Result<TmfElement> {
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!(
                "cannot add degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let value = match (&self.value, &other.value) {
            (TmfValue::Unknown(r), _) | (_, TmfValue::Unknown(r)) => {
                TmfValue::Unknown(r.clone())
            }
            (TmfValue::Zero, v) | (v, TmfValue::Zero) => v.clone(),
            (TmfValue::Combo(a), TmfValue::Combo(b)) => {
                let mut sum = a.clone();
                for (n, c) in b {
                    *sum.entry(n.clone()).or_insert_with(BigInt::zero) += c;
                }
                TmfValue::Combo(sum)
            }
        };
        Ok(TmfElement { degree: self.degree, value }.canonicalize(table))
    }

    pub fn scale(&self, k: &BigInt, table: &TmfCoeffTable) -> TmfElement {
        let value = match &self.value {
            TmfValue::Zero => TmfValue::Zero,
            _ if k.is_zero() => TmfValue::Zero,
            TmfValue::Unknown(r) => TmfValue::Unknown(r.clone()),
            TmfValue::Combo(c) => {
                TmfValue::Combo(c.iter().map(|(n, v)| (n.clone(), v * k)).collect())
            }
        };
        TmfElement { degree: self.degree, value }.canonicalize(table)
    }

    /// Product: degrees add; Zero absorbs; generator pairs resolve via the
    /// table or yield Unknown.
    pub fn mul(&self, other: &TmfElement, table: &TmfCoeffTable) -> TmfElement {
        let degree = self.degree + other.degree;
        match (&self.value, &other.value) {
            (TmfValue::Zero, _) | (_, TmfValue::Zero) => TmfElement::zero(degree),
            (TmfValue::Unknown(r), _) | (_, TmfValue::Unknown(r)) => {
                TmfElement::unknown(degree, r.clone())
            }
            (TmfValue::Combo(a), TmfValue::Combo(b)) => {
                let mut acc: BTreeMap<String, BigInt> = BTreeMap::new();
                for (ln, lc) in a {
                    for (rn, rc) in b {
                        match table.monomial_product(ln, rn) {
                            Some((combo, sign)) => {
                                for (n, c) in combo {
                                    *acc.entry(n).or_insert_with(BigInt::zero) +=
                                        lc * rc * &c * &sign;
                                }
                            }
                            None => {
                                return TmfElement::unknown(
                                    degree,
                                    format!("product {ln}·{rn} not in table"),
                                );
                            }
                        }
                    }
                }
                TmfElement { degree, value: TmfValue::Combo(acc) }.canonicalize(table)
            }
        }
    }

    /// Short human-readable rendering, e.g. "nu^2", "12*nu", "0", "?".
    pub fn display(&self) -> String {
        match &self.value {
            TmfValue::Zero => "0".to_string(),
            TmfValue::Unknown(_) => "?".to_string(),
            TmfValue::Combo(c) => c
                .iter()
                .map(|(n, k)| {
                    if k.is_one() {
                        n.clone()
                    } else {
                        format!("{k}*{n}")
                    }
                })
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> TmfCoeffTable {
        TmfCoeffTable::load_default().unwrap()
    }

    #[test]
    fn default_table_loads_with_required_generators() {
        let t = table();
        for (name, deg) in [("eta", 1), ("nu", 3), ("eps", 8), ("kappa", 14), ("kappabar", 20)] {
            assert_eq!(t.generator(name).unwrap().degree, deg);
        }
    }

    #[test]
    fn group_lookups() {
        let t = table();
        assert!(t.group_at(-1).unwrap().generators.is_empty());
        assert_eq!(t.group_at(1).unwrap().generators[0].name, "eta");
        assert_eq!(t.group_at(0).unwrap().polynomial_on.as_deref(), Some("j"));
        assert!(matches!(t.group_at(99), Err(Error::OutOfRange(99))));
    }

    #[test]
    fn mutated_tables_fail_with_named_violation() {
        let broken = DEFAULT_TABLE_JSON.replace(
            r#"{ "name": "eta", "order": 2 }"#,
            r#"{ "name": "eta", "order": 4 }"#,
        );
        match TmfCoeffTable::from_json(&broken) {
            Err(Error::ValidationError(v)) => {
                assert!(v.iter().any(|m| m.contains("eta must have order 2")), "{v:?}");
            }
            other => panic!("expected ValidationError, got {other:?}"),
        }

        let no_minus_one = DEFAULT_TABLE_JSON.replace(
            r#"{ "degree": -1, "complete": true, "generators": [], "provenance": "literature" },"#,
            r#"{ "degree": -1, "complete": true, "generators": [{ "name": "ghost", "order": 3 }], "provenance": "literature" },"#,
        );
        match TmfCoeffTable::from_json(&no_minus_one) {
            Err(Error::ValidationError(v)) => {
                assert!(v.iter().any(|m| m.contains("degree -1")), "{v:?}");
            }
            other => panic!("expected ValidationError, got {other:?}"),
        }
    }

    #[test]
    fn two_eta_vanishes() {
        let t = table();
        let eta = t.generator("eta").unwrap();
        assert!(eta.add(&eta, &t).unwrap().is_zero());
        assert!(eta.scale(&BigInt::from(2), &t).is_zero());
    }

    #[test]
    fn products_resolve_or_stay_unknown() {
        let t = table();
        let eta = t.generator("eta").unwrap();
        let nu = t.generator("nu").unwrap();
        let eta2 = eta.mul(&eta, &t);
        assert_eq!(eta2, t.generator("eta^2").unwrap());
        assert!(eta.mul(&nu, &t).is_zero());
        assert_eq!(nu.mul(&nu, &t), t.generator("nu^2").unwrap());
        // eta^3 = 12 nu
        let eta3 = eta.mul(&eta2, &t);
        assert_eq!(eta3, nu.scale(&BigInt::from(12), &t));
        // eta^4 = 12 eta nu = 0
        assert!(eta.mul(&eta3, &t).is_zero());
        // untabulated product: Unknown, not a guess
        let eps = t.generator("eps").unwrap();
        assert!(eps.mul(&nu, &t).is_unknown());
        // zero absorbs even Unknown-adjacent degrees
        assert!(eps.mul(&TmfElement::zero(3), &t).is_zero());
    }

    #[test]
    fn unit_is_identity() {
        let t = table();
        let one = TmfElement::one();
        let nu = t.generator("nu").unwrap();
        assert_eq!(one.mul(&nu, &t), nu);
        assert_eq!(nu.mul(&one, &t), nu);
        // -1 squares to 1
        let minus = one.scale(&BigInt::from(-1), &t);
        assert_eq!(minus.mul(&minus, &t), one);
    }

    #[test]
    fn associativity_where_resolved() {
        let t = table();
        let eta = t.generator("eta").unwrap();
        let a = eta.mul(&eta, &t).mul(&eta, &t);
        let b = eta.mul(&eta.mul(&eta, &t), &t);
        assert_eq!(a, b);
    }

    #[test]
    fn element_json_round_trip() {
        let t = table();
        let x = t.generator("nu").unwrap().scale(&BigInt::from(7), &t);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<TmfElement>(&s).unwrap(), x);
    }
}
