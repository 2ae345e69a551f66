//! Check results and their JSON form.

use serde::Serialize;

use crate::degreewise_homology::EvaluatedComplex;
use crate::monomial_complex::{Counterexample, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply to the input (e.g. a non-complete fan).
    Inapplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvaluatedJson {
    pub start: i64,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    /// Row-major entries, each a rational printed as `p` or `p/q`.
    pub matrices: Vec<Vec<Vec<String>>>,
}

impl From<&EvaluatedComplex> for EvaluatedJson {
    fn from(ec: &EvaluatedComplex) -> Self {
        EvaluatedJson {
            start: ec.start,
            dims: ec.dims.clone(),
            ranks: ec.maps.iter().map(|m| m.rank()).collect(),
            matrices: ec
                .maps
                .iter()
                .map(|m| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m.get(r, c).to_string()).collect()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleJson {
    /// `"stalk"` or `"chart"`.
    pub site: &'static str,
    pub cone: usize,
    pub degree: Vec<i64>,
    pub complex: EvaluatedJson,
    /// `None` when `d² ≠ 0` at this site and degree.
    pub cohomology: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<&Counterexample> for CounterexampleJson {
    fn from(c: &Counterexample) -> Self {
        let (site, cone) = match c.site {
            Site::Stalk(x) => ("stalk", x),
            Site::Chart(x) => ("chart", x),
        };
        CounterexampleJson {
            site,
            cone,
            degree: c.degree.clone(),
            complex: EvaluatedJson::from(&c.complex),
            cohomology: c.cohomology.clone(),
            note: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Number of (site, degree) pairs or items examined.
    pub examined: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, examined: usize) -> Self {
        Check { name: name.into(), status: Status::Pass, examined, counterexample: None, detail: None }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, examined: 0, counterexample: None, detail: Some(detail.into()) }
    }

    pub fn inapplicable(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Inapplicable,
            examined: 0,
            counterexample: None,
            detail: Some(detail.into()),
        }
    }

    /// Pass when `found` is `None`, otherwise a failure carrying it.
    pub fn from_sweep(name: impl Into<String>, examined: usize, found: Option<Counterexample>) -> Self {
        match found {
            None => Check::pass(name, examined),
            Some(c) => Check {
                name: name.into(),
                status: Status::Fail,
                examined,
                counterexample: Some(CounterexampleJson::from(&c)),
                detail: None,
            },
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Folds a list of checks under one name: the first failure wins.
pub fn combine(name: impl Into<String>, checks: Vec<Check>) -> Check {
    let name = name.into();
    let examined = checks.iter().map(|c| c.examined).sum();
    match checks.into_iter().find(|c| c.status == Status::Fail) {
        Some(mut f) => {
            let inner = std::mem::take(&mut f.name);
            f.name = name;
            f.examined = examined;
            f.detail = Some(match f.detail {
                Some(d) => format!("{inner}: {d}"),
                None => inner,
            });
            f
        }
        None => Check::pass(name, examined),
    }
}
