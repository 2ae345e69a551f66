//! Named verification suites and their JSON reports.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::degreewise_homology::{verification_degrees, DegreeWindow};
use crate::error::{Error, Result};
use crate::io::SheafInput;
use crate::koszul::{
    augmented_k_structure, ball_check, commute_square_check, complex_check, exactness_check, generator_check,
    hom_matching_check, koszul_k,
};
use crate::lattice_fan::{Fan, LatticeVector};
use crate::report::{combine, Check};
use crate::sheaf_modules::{hom_pieces, standard_open, standard_point, SheafComplex, SheafOfModules};
use crate::stalk_algebras::Flavor;
use crate::toric_geometry::{canonical, cousin_check, serre_check, tensor_line_bundle, EquivariantLineBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Validate,
    KoszulSelfcheck,
    CompleteAcyclicity,
    SerreCheck,
    CousinCheck,
    HomTable,
    CommuteCheck,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Validate,
        Suite::KoszulSelfcheck,
        Suite::CompleteAcyclicity,
        Suite::SerreCheck,
        Suite::CousinCheck,
        Suite::HomTable,
        Suite::CommuteCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Validate => "validate",
            Suite::KoszulSelfcheck => "koszul-selfcheck",
            Suite::CompleteAcyclicity => "complete-acyclicity",
            Suite::SerreCheck => "serre-check",
            Suite::CousinCheck => "cousin-check",
            Suite::HomTable => "hom-table",
            Suite::CommuteCheck => "commute-check",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Unknown { kind: "suite", name: s.into() })
    }
}

#[derive(Clone, Debug)]
pub struct Job {
    pub fan: Arc<Fan>,
    pub fan_label: String,
    pub sheaf: Option<SheafInput>,
    pub sheaf_label: Option<String>,
    pub suite: Suite,
    /// Overrides the computed window with the cube `[lo, hi]^n`.
    pub window: Option<(i64, i64)>,
    pub chambers: bool,
}

impl Job {
    pub fn new(fan: Arc<Fan>, fan_label: impl Into<String>, suite: Suite) -> Self {
        Job { fan, fan_label: fan_label.into(), sheaf: None, sheaf_label: None, suite, window: None, chambers: false }
    }

    pub fn with_sheaf(mut self, sheaf: SheafInput, label: impl Into<String>) -> Self {
        self.sheaf = Some(sheaf);
        self.sheaf_label = Some(label.into());
        self
    }

    /// Twists, generator and relation degrees of the inputs.
    fn job_degrees(&self) -> Result<Vec<Vec<i64>>> {
        let rank = self.fan.rank();
        let mut out = vec![vec![0; rank]];
        match &self.sheaf {
            Some(SheafInput::LineBundles(b)) => out.extend(b.iter().flat_map(|l| l.characters.iter().map(|m| m.0.clone()))),
            Some(SheafInput::Sheaf(s)) => out.extend(s.degrees().into_iter().filter(|d| d.len() == rank)),
            None => {}
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FanSummary {
    pub name: String,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub smooth: bool,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub fan: FanSummary,
    pub sheaf: Option<String>,
    pub window: DegreeWindow,
    pub chambers: Option<usize>,
    pub degrees_checked: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut s = format!("{} on {}: {}\n", self.suite, self.fan.name, if self.passed() { "PASS" } else { "FAIL" });
        for c in &self.checks {
            s.push_str(&format!("  {:<40} {:?} ({} examined)\n", c.name, c.status, c.examined));
            if let Some(d) = &c.detail {
                s.push_str(&format!("    {d}\n"));
            }
            if let Some(x) = &c.counterexample {
                s.push_str(&format!("    at {} {} degree {:?}: dims {:?}\n", x.site, x.cone, x.degree, x.complex.dims));
            }
        }
        s
    }
}

fn fan_summary(fan: &Fan, name: &str) -> FanSummary {
    FanSummary {
        name: name.into(),
        rank: fan.rank(),
        rays: fan.rays().iter().map(|r| r.0.clone()).collect(),
        max_cones: fan.max_cones().iter().map(|&c| fan.cone(c).rays.clone()).collect(),
        smooth: true,
        complete: fan.is_complete(),
    }
}

fn structure_sheaf(fan: &Arc<Fan>) -> SheafOfModules {
    EquivariantLineBundle::trivial(fan).to_sheaf()
}

fn line_bundles(job: &Job) -> Result<Vec<EquivariantLineBundle>> {
    match &job.sheaf {
        None => Ok(vec![EquivariantLineBundle::trivial(&job.fan)]),
        Some(SheafInput::LineBundles(b)) => Ok(b.clone()),
        Some(SheafInput::Sheaf(_)) => Err(Error::NotLocallyFree),
    }
}

/// `Hom(𝒜(m)_{[σ]}, G)` in degree `d` is the piece of `G_σ` at `m + d`.
pub fn projective_hom_check(fan: &Arc<Fan>, targets: &[SheafOfModules], twists: &[LatticeVector], degrees: &[LatticeVector]) -> Result<Check> {
    let mut examined = 0;
    for sigma in fan.cone_ids() {
        for m in twists {
            let p = standard_open(fan, sigma, Flavor::A, &m.0)?;
            for (gi, g) in targets.iter().enumerate() {
                for d in degrees {
                    let lhs = hom_pieces(&p, g, d)?;
                    let at: Vec<i64> = m.0.iter().zip(&d.0).map(|(a, b)| a + b).collect();
                    let rhs = g.piece_dim(sigma, &at);
                    examined += 1;
                    if lhs != rhs {
                        return Ok(Check::fail(
                            "projective-hom",
                            format!("σ={sigma} m={:?} target {gi} degree {:?}: Hom {lhs}, stalk {rhs}", m.0, d.0),
                        ));
                    }
                }
            }
        }
    }
    Ok(Check::pass("projective-hom", examined))
}

/// Runs a job on the current rayon pool.
pub fn run(job: &Job) -> Result<Report> {
    let fan = &job.fan;
    let rank = fan.rank();
    let (mut window, chambers) = verification_degrees(fan, &job.job_degrees()?, job.chambers);
    if let Some((lo, hi)) = job.window {
        if lo > hi {
            return Err(Error::Parse(format!("empty window {lo}..{hi}")));
        }
        window = DegreeWindow::cube(rank, lo, hi);
    }
    let mut degrees = window.degrees();
    if let Some(c) = &chambers {
        degrees.extend(c.representatives.iter().cloned());
        degrees.sort();
        degrees.dedup();
    }
    // Twists for the generator families. K commutes with twists, so the
    // unit cube around the job's degrees is enough.
    let twists = DegreeWindow::around(rank, &job.job_degrees()?, 1).degrees();
    let input = job.sheaf.as_ref().map(|s| s.to_sheaf()).transpose()?;

    let mut checks = Vec::new();
    match job.suite {
        Suite::Validate => {
            checks.push(Check::pass("smooth", fan.num_cones()));
            checks.push(match fan.check_sign_coherence() {
                Ok(()) => Check::pass("sign-coherence", fan.num_cones()),
                Err(e) => Check::fail("sign-coherence", e.to_string()),
            });
            checks.push(if fan.is_complete() {
                Check::pass("complete", fan.max_cones().len())
            } else {
                Check::inapplicable("complete", "fan is not complete")
            });
            if let Some(s) = &input {
                checks.push(match s.check_sheaf_law() {
                    Ok(()) => Check::pass("sheaf-law", fan.num_cones()),
                    Err(e) => Check::fail("sheaf-law", e.to_string()),
                });
                checks.push(if s.is_coherent() {
                    Check::pass("coherent", fan.num_cones())
                } else {
                    Check::fail("coherent", "some stalk is not of the form required of a coherent sheaf")
                });
            }
        }
        Suite::KoszulSelfcheck => {
            checks.push(ball_check(fan, &degrees)?);
            checks.push(generator_check(fan, Flavor::A, &degrees, &twists)?);
            checks.push(generator_check(fan, Flavor::B, &degrees, &twists)?);
            if let Some(s) = &input {
                let k = koszul_k(&SheafComplex::single(s.clone()))?;
                checks.push(complex_check("K(input) d^2", &k, &degrees, false));
            }
        }
        Suite::CompleteAcyclicity => match augmented_k_structure(fan) {
            Ok(c) => {
                checks.push(complex_check("augmented d^2", &c, &degrees, false));
                checks.push(exactness_check("augmented exactness", &c, &degrees, false));
            }
            Err(Error::FanNotComplete) => checks.push(Check::inapplicable("augmented exactness", "fan is not complete")),
            Err(e) => return Err(e),
        },
        Suite::SerreCheck => {
            checks.extend(serre_check(fan, &line_bundles(job)?, &degrees)?.checks);
        }
        Suite::CousinCheck => {
            let omega = canonical(fan)?;
            let g = match &input {
                None => omega.to_sheaf(),
                Some(s) => tensor_line_bundle(s, &omega)?,
            };
            checks.extend(cousin_check(&g, &degrees)?);
        }
        Suite::HomTable => {
            let zero = vec![0; rank];
            let mut targets = Vec::new();
            for s in fan.cone_ids() {
                targets.push(standard_open(fan, s, Flavor::A, &zero)?);
                targets.push(standard_point(fan, s, Flavor::A, &zero)?);
            }
            targets.push(structure_sheaf(fan));
            targets.push(canonical(fan)?.to_sheaf());
            if let Some(s) = &input {
                targets.push(s.clone());
            }
            checks.push(projective_hom_check(fan, &targets, &twists, &degrees)?);
            checks.push(hom_matching_check(fan, &twists)?);
        }
        Suite::CommuteCheck => {
            let n = input.unwrap_or_else(|| structure_sheaf(fan));
            if n.flavor() != Flavor::A {
                return Err(Error::FlavorMismatch { expected: "A" });
            }
            checks.push(commute_square_check(&SheafComplex::single(n), &degrees)?);
        }
    }
    Ok(Report {
        suite: job.suite,
        fan: fan_summary(fan, &job.fan_label),
        sheaf: job.sheaf_label.clone(),
        window,
        chambers: chambers.map(|c| c.representatives.len()),
        degrees_checked: degrees.len(),
        checks,
    })
}

/// Runs a job on a pool of `threads` workers (`0` = rayon's default).
pub fn run_with_threads(job: &Job, threads: usize) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
    pool.install(|| run(job))
}

/// All suites that apply to a fan, folded into one check each.
pub fn full_suite(fan: &Arc<Fan>, label: &str) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for suite in Suite::ALL {
        if matches!(suite, Suite::SerreCheck | Suite::CousinCheck) && !fan.is_complete() {
            out.push(Check::inapplicable(suite.name(), "fan is not complete"));
            continue;
        }
        let r = run(&Job::new(fan.clone(), label, suite))?;
        out.push(combine(suite.name(), r.checks));
    }
    Ok(out)
}
