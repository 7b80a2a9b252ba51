//! JSON file formats. Rationals are `[numerator, denominator]` pairs with a
//! positive denominator; integers may be JSON numbers or decimal strings.

use std::collections::BTreeMap;
use std::fmt;

use mcflow_core::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// A rational in its `[n, d]` wire form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub Rational);

fn parse_int(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(i.into())
            } else if let Some(u) = n.as_u64() {
                Ok(u.into())
            } else {
                Err(format!("{n} is not an integer"))
            }
        }
        Value::String(s) => s.parse::<BigInt>().map_err(|_| format!("\"{s}\" is not an integer")),
        other => Err(format!("{other} is not an integer")),
    }
}

pub fn parse_rational(v: &Value) -> Result<Rational, String> {
    let Value::Array(parts) = v else {
        return Err(format!("rational must be [numerator, denominator], got {v}"));
    };
    let [n, d] = parts.as_slice() else {
        return Err(format!("rational must have two entries, got {v}"));
    };
    let (n, d) = (parse_int(n)?, parse_int(d)?);
    if !d.is_positive() {
        return Err(format!("rational {v} needs a positive denominator"));
    }
    Ok(Rational::new(n, d))
}

fn int_value(i: &BigInt) -> Value {
    match i.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(i.to_string()),
    }
}

pub fn rational_value(q: &Rational) -> Value {
    Value::Array(vec![int_value(q.numer()), int_value(q.denom())])
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        parse_rational(&v).map(Rat).map_err(D::Error::custom)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational_value(&self.0).serialize(s)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom() == &BigInt::from(1) || self.0.numer().is_zero() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: Vec<Rat>,
    pub kappa: Rat,
    #[serde(rename = "C")]
    pub c: Rat,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum KindJson {
    /// The string `"orbit"`.
    Tag(String),
    Formal {
        formal: usize,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub id: String,
    pub qdeg: Rat,
    pub parity: u8,
    pub kind: KindJson,
    #[serde(default)]
    pub level: u32,
    pub action: Rat,
    #[serde(default)]
    pub t_exp: u8,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub gen: String,
    pub coeff: Rat,
    #[serde(default)]
    pub monomial: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ConstantJson {
    pub d: usize,
    pub inputs: Vec<String>,
    pub output: Vec<TermJson>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub from: String,
    pub to: String,
    pub coeff: Rat,
    #[serde(default)]
    pub monomial: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub basis: Vec<GeneratorJson>,
    #[serde(default)]
    pub differential: Vec<EntryJson>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub levels: Vec<ComplexJson>,
    #[serde(default)]
    pub maps: Vec<Vec<EntryJson>>,
}

/// One input file. Every section is optional; several files are merged
/// into one workspace. A complex file (`basis`, `differential`), a cap
/// file (`caps`) and an orbit model file (`spec`, `eta`, `slope`,
/// `hess_bound`, `h_knots`) are all special cases of this shape.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FileJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict_parity: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GeneratorJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<ConstantJson>>,
    /// A degree-2 element for `curvature` and `deform`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<GeneratorJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential: Option<Vec<EntryJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<BTreeMap<String, Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hess_bound: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_knots: Option<Vec<(Rat, Rat)>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcflow_core::rational::rat;

    #[test]
    fn rationals_round_trip() {
        let r: Rat = serde_json::from_str("[-3, 6]").unwrap();
        assert_eq!(r.0, rat(-1, 2));
        assert_eq!(serde_json::to_string(&r).unwrap(), "[-1,2]");
        let big: Rat = serde_json::from_str("[\"123456789012345678901234567890\", 1]").unwrap();
        assert_eq!(serde_json::to_value(&big).unwrap()[0], Value::String("123456789012345678901234567890".into()));
    }

    #[test]
    fn malformed_rationals_are_rejected() {
        for bad in ["[1, 0]", "[1, -2]", "[1]", "\"1/2\"", "[1.5, 2]", "[1, 2, 3]"] {
            assert!(serde_json::from_str::<Rat>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn generator_kinds() {
        let g: GeneratorJson = serde_json::from_str(
            r#"{"id": "x", "qdeg": [0, 1], "parity": 0, "kind": {"formal": 0}, "level": 0, "action": [-2, 1], "t_exp": 0}"#,
        )
        .unwrap();
        assert_eq!(g.kind, KindJson::Formal { formal: 0 });
        let g: GeneratorJson = serde_json::from_str(
            r#"{"id": "w", "qdeg": [0, 1], "parity": 0, "kind": "orbit", "level": 1, "action": [0, 1]}"#,
        )
        .unwrap();
        assert_eq!(g.kind, KindJson::Tag("orbit".into()));
    }
}
