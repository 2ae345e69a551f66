//! JSON input: fans and sheaf descriptors.
//!
//! A fan file lists rays and maximal cones:
//!
//! ```json
//! {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [0, 2]]}
//! ```
//!
//! A sheaf file is one descriptor, tagged by `kind`:
//!
//! ```json
//! {"kind": "line_bundles", "divisors": [[0, 0, 1], [0, 0, 0]]}
//! {"kind": "standard_open", "cone": [0, 1], "twist": [1, 0]}
//! {"kind": "standard_point", "cone": [0], "twist": [0, 0], "flavor": "A"}
//! {"kind": "presented", "stalks": [...], "restrictions": [...]}
//! ```
//!
//! Rationals are written as strings (`"3"`, `"-1/2"`) or integers.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graded_modules::{FgGradedModule, ModuleMorphism};
use crate::lattice_fan::{build_fan, Fan, LatticeVector};
use crate::linalg::Q;
use crate::sheaf_modules::{frame, standard_open, standard_point, SheafOfModules};
use crate::stalk_algebras::Flavor;
use crate::toric_geometry::{line_bundle, psi, CoherentData};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Int(i64),
    Text(String),
}

impl Rational {
    fn value(&self) -> Result<Q> {
        match self {
            Rational::Int(n) => Ok(Q::from_integer((*n).into())),
            Rational::Text(s) => s.trim().parse::<Q>().map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub degree: Vec<i64>,
    /// `[generator, coefficient]` pairs.
    pub entries: Vec<(usize, Rational)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StalkFile {
    pub cone: Vec<usize>,
    pub gens: Vec<Vec<i64>>,
    #[serde(default)]
    pub relations: Vec<RelationFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionFile {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    /// `[row, column, coefficient]` triples.
    pub entries: Vec<(usize, usize, Rational)>,
}

fn flavor_a() -> String {
    "A".into()
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SheafFile {
    LineBundles {
        divisors: Vec<Vec<i64>>,
    },
    StandardOpen {
        cone: Vec<usize>,
        twist: Vec<i64>,
        #[serde(default = "flavor_a")]
        flavor: String,
    },
    StandardPoint {
        cone: Vec<usize>,
        twist: Vec<i64>,
        #[serde(default = "flavor_a")]
        flavor: String,
    },
    Presented {
        #[serde(default = "flavor_a")]
        flavor: String,
        stalks: Vec<StalkFile>,
        #[serde(default)]
        restrictions: Vec<RestrictionFile>,
    },
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: line {} column {}: {e}", e.line(), e.column())))
}

pub fn fan_from_json(text: &str) -> Result<Fan> {
    let f: FanFile = parse_json(text, "fan")?;
    build_fan(f.rank, f.rays.into_iter().map(LatticeVector).collect(), &f.cones)
}

fn parse_flavor(s: &str) -> Result<Flavor> {
    match s {
        "A" | "a" => Ok(Flavor::A),
        "B" | "b" => Ok(Flavor::B),
        _ => Err(Error::Unknown { kind: "flavor", name: s.into() }),
    }
}

/// What a sheaf file describes, resolved against a fan.
#[derive(Clone, Debug)]
pub enum SheafInput {
    LineBundles(Vec<crate::toric_geometry::EquivariantLineBundle>),
    Sheaf(SheafOfModules),
}

impl SheafInput {
    pub fn to_sheaf(&self) -> Result<SheafOfModules> {
        match self {
            SheafInput::LineBundles(b) => psi(&CoherentData::LineBundles(b.clone())),
            SheafInput::Sheaf(s) => Ok(s.clone()),
        }
    }
}

pub fn sheaf_from_json(fan: &Arc<Fan>, text: &str) -> Result<SheafInput> {
    let file: SheafFile = parse_json(text, "sheaf")?;
    match file {
        SheafFile::LineBundles { divisors } => {
            if divisors.is_empty() {
                return Err(Error::Parse("sheaf: no divisors".into()));
            }
            Ok(SheafInput::LineBundles(divisors.iter().map(|d| line_bundle(fan, d)).collect::<Result<_>>()?))
        }
        SheafFile::StandardOpen { cone, twist, flavor } => {
            Ok(SheafInput::Sheaf(standard_open(fan, fan.cone_id_or_err(&cone)?, parse_flavor(&flavor)?, &twist)?))
        }
        SheafFile::StandardPoint { cone, twist, flavor } => {
            Ok(SheafInput::Sheaf(standard_point(fan, fan.cone_id_or_err(&cone)?, parse_flavor(&flavor)?, &twist)?))
        }
        SheafFile::Presented { flavor, stalks, restrictions } => {
            let flavor = parse_flavor(&flavor)?;
            let mut modules: Vec<FgGradedModule> = fan.cone_ids().map(|c| FgGradedModule::zero(frame(fan, c, flavor))).collect();
            for s in stalks {
                let c = fan.cone_id_or_err(&s.cone)?;
                let relations = s
                    .relations
                    .into_iter()
                    .map(|r| Ok((r.degree, r.entries.iter().map(|(i, a)| Ok((*i, a.value()?))).collect::<Result<_>>()?)))
                    .collect::<Result<Vec<_>>>()?;
                modules[c] = FgGradedModule::new(frame(fan, c, flavor), s.gens, relations)?;
            }
            let mut given = BTreeMap::new();
            for r in restrictions {
                let (s, t) = (fan.cone_id_or_err(&r.from)?, fan.cone_id_or_err(&r.to)?);
                let entries = r.entries.iter().map(|(i, j, a)| Ok(((*i, *j), a.value()?))).collect::<Result<Vec<_>>>()?;
                let shift = vec![0; modules[t].frame.degree_len()];
                given.insert((s, t), ModuleMorphism::new(modules[s].clone(), modules[t].clone(), entries, shift)?);
            }
            Ok(SheafInput::Sheaf(SheafOfModules::new(fan.clone(), flavor, modules, given)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::builtin_fan;

    #[test]
    fn fan_round_trip() {
        let f = fan_from_json(r#"{"rank": 2, "rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[0,2]]}"#).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.num_cones(), 7);
        assert!(matches!(fan_from_json("{\"rank\": 2,"), Err(Error::Parse(_))));
        assert!(fan_from_json(r#"{"rank": 2, "rays": [[2,0],[0,1]], "cones": [[0,1]]}"#).is_err());
    }

    #[test]
    fn descriptors() {
        let f = Arc::new(builtin_fan("a2").unwrap());
        let s = sheaf_from_json(&f, r#"{"kind": "standard_open", "cone": [0, 1], "twist": [1, 0]}"#).unwrap();
        assert_eq!(s.to_sheaf().unwrap().piece_dim(0, &[1, 0]), 1);
        let lb = sheaf_from_json(&f, r#"{"kind": "line_bundles", "divisors": [[-1, -1]]}"#).unwrap();
        let top = f.cone_id(&[0, 1]).unwrap();
        assert_eq!(lb.to_sheaf().unwrap().stalk(top).gens(), &[vec![1, 1]]);
        // 𝒜_{[σ]} modulo x₁ on the top cone, zero elsewhere.
        let p = sheaf_from_json(
            &f,
            r#"{"kind": "presented", "stalks": [
                {"cone": [0, 1], "gens": [[0, 0]], "relations": [{"degree": [1, 0], "entries": [[0, "1"]]}]}
            ]}"#,
        )
        .unwrap()
        .to_sheaf()
        .unwrap();
        assert_eq!(p.piece_dim(top, &[0, 3]), 1);
        assert_eq!(p.piece_dim(top, &[1, 0]), 0);
        assert!(sheaf_from_json(&f, r#"{"kind": "bogus"}"#).is_err());
    }
}
