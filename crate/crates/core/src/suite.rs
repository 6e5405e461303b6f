//! Randomized verification suites over the generated families.
//!
//! A suite runs `trials` seeded trials for every `n` in a range, in parallel,
//! and summarizes them in a deterministic JSON report. Trial `t` at dimension
//! `n` uses the seed `sub_seed(sub_seed(seed, n), t)`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{check_sum_bound, disjointify, pair_report, predict_cases, verify_fermat_plus_one, TrichotomyCase};
use crate::error::{Error, Result};
use crate::families::{
    gen_case_ii, gen_case_iii, gen_fermat_plus, gen_pentahedral_nonunique, penta_plane_part,
    random_kruskal_set, Witness,
};
use crate::points::{cb_check, cb_hf_inequality, h_vector, kruskal_rank, PointSet};
use crate::seed::sub_seed;
use crate::terracini::{in_concise_terracini, terracini_defect};

pub const MAX_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Main,
    SylvesterBound,
    Terracini,
    Cb,
    FermatPlus,
    Penta,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::Main,
        Theorem::SylvesterBound,
        Theorem::Terracini,
        Theorem::Cb,
        Theorem::FermatPlus,
        Theorem::Penta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Main => "main",
            Theorem::SylvesterBound => "sylvester-bound",
            Theorem::Terracini => "terracini",
            Theorem::Cb => "cb",
            Theorem::FermatPlus => "fermat-plus",
            Theorem::Penta => "penta",
        }
    }

    /// Smallest and largest `n` the suite accepts.
    pub fn n_bounds(self) -> (usize, usize) {
        match self {
            Theorem::Main => (3, MAX_N),
            Theorem::SylvesterBound | Theorem::Cb | Theorem::FermatPlus => (1, MAX_N),
            Theorem::Terracini => (3, MAX_N),
            Theorem::Penta => (3, 3),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub theorem: Theorem,
    pub n_range: (usize, usize),
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(theorem: Theorem, n_range: (usize, usize), trials: usize, seed: u64) -> Self {
        SuiteConfig {
            theorem,
            n_range,
            trials,
            seed,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        let (lo, hi) = self.n_range;
        let (min, max) = self.theorem.n_bounds();
        if lo > hi || lo < min || hi > max {
            return Err(Error::Precondition(format!(
                "{} supports n in {min}..={max}, got {lo}..={hi}",
                self.theorem
            )));
        }
        Ok(())
    }
}

/// Result of one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub passed: bool,
    /// Trials attaining the bound with equality (sylvester-bound only).
    pub sharp: usize,
    pub reason: Option<String>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSummary {
    pub n: usize,
    pub passed: usize,
    pub failed: usize,
    pub sharp: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub theorem: Theorem,
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub per_n: Vec<DimensionSummary>,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
    pub first_counterexample: Option<TrialOutcome>,
}

impl SuiteSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    sub_seed(sub_seed(seed, n as u64), trial as u64)
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteSummary> {
    cfg.validate()?;
    let (lo, hi) = cfg.n_range;
    let jobs: Vec<(usize, usize)> = (lo..=hi)
        .flat_map(|n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(n, t)| run_trial(cfg.theorem, n, t, trial_seed(cfg.seed, n, t)))
        .collect();
    let per_n = (lo..=hi)
        .map(|n| {
            let of_n = outcomes.iter().filter(|o| o.n == n);
            let passed = of_n.clone().filter(|o| o.passed).count();
            DimensionSummary {
                n,
                passed,
                failed: cfg.trials - passed,
                sharp: of_n.map(|o| o.sharp).sum(),
            }
        })
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let summary = SuiteSummary {
        theorem: cfg.theorem,
        n_min: lo,
        n_max: hi,
        trials: cfg.trials,
        seed: cfg.seed,
        per_n,
        passed,
        failed: outcomes.len() - passed,
        all_passed: passed == outcomes.len(),
        first_counterexample: outcomes.into_iter().find(|o| !o.passed),
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, summary.to_json() + "\n")
            .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(summary)
}

/// A failed check, with the witness that produced it when there is one.
struct Failure {
    reason: String,
    witness: Option<Box<Witness>>,
}

fn fail<T>(reason: impl Into<String>, witness: Option<&Witness>) -> std::result::Result<T, Failure> {
    Err(Failure {
        reason: reason.into(),
        witness: witness.cloned().map(Box::new),
    })
}

fn lift<T>(r: Result<T>, witness: Option<&Witness>) -> std::result::Result<T, Failure> {
    r.or_else(|e| fail(e.to_string(), witness))
}

pub fn run_trial(theorem: Theorem, n: usize, trial: usize, seed: u64) -> TrialOutcome {
    let result = match theorem {
        Theorem::Main => check_main(n, seed),
        Theorem::SylvesterBound => check_sylvester_bound(n, seed),
        Theorem::Terracini => check_terracini(n, trial, seed),
        Theorem::Cb => check_cb(n, seed),
        Theorem::FermatPlus => check_fermat_plus(n, seed),
        Theorem::Penta => check_penta(seed),
    };
    match result {
        Ok(sharp) => TrialOutcome {
            n,
            trial,
            seed,
            passed: true,
            sharp,
            reason: None,
            witness: None,
        },
        Err(f) => TrialOutcome {
            n,
            trial,
            seed,
            passed: false,
            sharp: 0,
            reason: Some(f.reason),
            witness: f.witness.map(|w| *w),
        },
    }
}

type Check = std::result::Result<usize, Failure>;

fn pair_of(w: &Witness) -> std::result::Result<(&crate::decomp::Decomposition, &crate::decomp::Decomposition), Failure> {
    w.pair().map_or_else(|| fail("witness has fewer than two decompositions", Some(w)), Ok)
}

/// Case II and case III witnesses have the structure of the trichotomy.
fn check_main(n: usize, seed: u64) -> Check {
    let mut cases = Vec::new();
    if n >= 3 {
        cases.push((lift(gen_case_ii(n, seed), None)?, TrichotomyCase::II));
    }
    cases.push((lift(gen_case_iii(n, seed), None)?, TrichotomyCase::III));
    for (w, case) in &cases {
        let (a, b) = pair_of(w)?;
        let rep = lift(pair_report(&a.points, &b.points), Some(w))?;
        if a.len() != n + 2 || b.len() != n + 2 {
            return fail("decompositions are not of length n+2", Some(w));
        }
        if !rep.satisfies_main_bullets(n) {
            return fail("pair violates the trichotomy bullets", Some(w));
        }
        if n >= 4 && rep.intersection == 0 {
            return fail("decompositions are disjoint", Some(w));
        }
        let (min_shared, on_flats, kruskal) = match case {
            TrichotomyCase::II => (n as i64 - 3, rep.diff_two_lines, 2),
            _ => (n as i64 - 2, rep.diff_two_planes, 3),
        };
        if (rep.intersection as i64) < min_shared || !on_flats {
            return fail(format!("case {case} structure fails"), Some(w));
        }
        if rep.kruskal_a != kruskal || rep.kruskal_b != kruskal {
            return fail(format!("case {case} Kruskal rank is not {kruskal}"), Some(w));
        }
        for dec in [a, b] {
            if !lift(predict_cases(&dec.points), Some(w))?.contains(case) {
                return fail(format!("prediction excludes case {case}"), Some(w));
            }
        }
    }
    Ok(0)
}

/// `len(A) + len(B) >= 3 + 2n`, with equality exactly on the fermat-plus family.
fn check_sylvester_bound(n: usize, seed: u64) -> Check {
    let mut witnesses = vec![lift(gen_fermat_plus(n, seed), None)?];
    if n >= 2 {
        witnesses.push(lift(gen_case_iii(n, seed), None)?);
    }
    if n >= 3 {
        witnesses.push(lift(gen_case_ii(n, seed), None)?);
    }
    if n == 3 {
        witnesses.push(lift(gen_pentahedral_nonunique(seed), None)?);
    }
    let mut sharp = 0;
    for w in &witnesses {
        let (a, b) = pair_of(w)?;
        let (holds, slack) = lift(check_sum_bound(&w.form, a, b), Some(w))?;
        if !holds {
            return fail(format!("sum bound fails with slack {slack}"), Some(w));
        }
        let expect_sharp = w.family == "fermat-plus";
        if (slack == 0) != expect_sharp {
            return fail(format!("{} has slack {slack}", w.family), Some(w));
        }
        if slack == 0 {
            sharp += 1;
        }
    }
    Ok(sharp)
}

/// Positive Terracini defect exactly when the Kruskal rank is at most 3.
/// Trial `t` uses `r = 2 + t mod n`.
fn check_terracini(n: usize, trial: usize, seed: u64) -> Check {
    let r = 2 + trial % n;
    let a = lift(random_kruskal_set(n, r, seed), None)?;
    let defect = lift(terracini_defect(&a, 3), None)?;
    let in_locus = lift(in_concise_terracini(&a), None)?;
    if (defect > 0) != (r <= 3) || in_locus != (r <= 3) {
        return fail(format!("r = {r}: defect {defect}, classifier {in_locus}"), None);
    }
    Ok(0)
}

fn cb_holds(z: &PointSet) -> Result<bool> {
    if !cb_check(z, 3)? {
        return Ok(false);
    }
    let tau = h_vector(z).tau as u32;
    Ok((0..tau).all(|t| !cb_check(z, t).unwrap_or(false) || cb_hf_inequality(z, t)))
}

/// Unions of disjoint non-redundant pairs are CB(3), and CB sets satisfy
/// the Hilbert function inequality.
fn check_cb(n: usize, seed: u64) -> Check {
    let mut witnesses = vec![lift(gen_fermat_plus(n, seed), None)?];
    if n >= 2 {
        witnesses.push(lift(gen_case_iii(n, seed), None)?);
    }
    if n >= 3 {
        witnesses.push(lift(gen_case_ii(n, seed), None)?);
    }
    for w in &witnesses {
        let (a, b) = pair_of(w)?;
        let (_, a2, b2) = lift(disjointify(&w.form, a, b), Some(w))?;
        let z = a2.points.union(&b2.points);
        if !lift(cb_holds(&z), Some(w))? {
            return fail("union of the disjoint pair fails CB or the HF inequality", Some(w));
        }
    }
    Ok(0)
}

fn check_fermat_plus(n: usize, seed: u64) -> Check {
    let w = lift(gen_fermat_plus(n, seed), None)?;
    let (a, b) = pair_of(&w)?;
    if !lift(verify_fermat_plus_one(&w.form, a, b), Some(&w))? {
        return fail("fermat-plus structure fails", Some(&w));
    }
    Ok(0)
}

/// Two distinct length-5 decompositions of a concise quaternary cubic of the
/// form `F' + L^3` with `F'` in `Sub_3`.
fn check_penta(seed: u64) -> Check {
    let w = lift(gen_pentahedral_nonunique(seed), None)?;
    lift(w.certify(), Some(&w))?;
    let (a, b) = pair_of(&w)?;
    if a.len() != 5 || b.len() != 5 || a.points.same_set(&b.points) {
        return fail("expected two distinct length-5 decompositions", Some(&w));
    }
    let (plane, _) = lift(penta_plane_part(&w), Some(&w))?;
    if lift(plane.catalecticant_rank(), Some(&w))? != 3 {
        return fail("plane part is not in Sub_3", Some(&w));
    }
    if kruskal_rank(&a.points) >= 4 {
        return fail("pentahedral decomposition is in linear general position", Some(&w));
    }
    Ok(0)
}
