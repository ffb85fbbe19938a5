//! Property checks of density axioms over seeded set families, with
//! counterexample fixtures and a self-test of the harness.

mod axioms;
mod family;
mod fixtures;
mod mutation;
mod pairs;
mod structural;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::densities::{DensityValue, Functional, Result, Schedule};
use crate::setkit::SetExpr;

pub use axioms::audit_functional;
pub use family::{random_periodic, FamilyKind, TestFamily};
pub use fixtures::{cofinite_conjugate, cofinite_indicator, constant_one, minimum_functional, Fixture};
pub use mutation::{mutation_report, mutation_self_test, MutantOutcome};
pub use pairs::audit_conjugate_pair;
pub use structural::audit_structural_theorems;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    F1,
    F2,
    /// `max(f(X), f(Y)) ≤ f(X ∪ Y)`.
    F2Flat,
    F3,
    F4,
    /// `f(k·X + h) = f(X)/k`.
    F4Flat,
    F5,
    /// `0 ≤ f(X) ≤ 1`.
    Bounded,
    L1,
    L2,
    L3,
    L4,
}

impl Axiom {
    pub const UPPER: [Axiom; 5] = [Axiom::F1, Axiom::F2, Axiom::F3, Axiom::F4, Axiom::F5];
    pub const LOWER: [Axiom; 4] = [Axiom::L1, Axiom::L2, Axiom::L3, Axiom::L4];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::F1 => "f1",
            Axiom::F2 => "f2",
            Axiom::F2Flat => "f2flat",
            Axiom::F3 => "f3",
            Axiom::F4 => "f4",
            Axiom::F4Flat => "f4flat",
            Axiom::F5 => "f5",
            Axiom::Bounded => "bounded",
            Axiom::L1 => "l1",
            Axiom::L2 => "l2",
            Axiom::L3 => "l3",
            Axiom::L4 => "l4",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "f1" => Axiom::F1,
            "f2" => Axiom::F2,
            "f2flat" | "f2b" | "f2♭" => Axiom::F2Flat,
            "f3" => Axiom::F3,
            "f4" => Axiom::F4,
            "f4flat" | "f4b" | "f4♭" => Axiom::F4Flat,
            "f5" => Axiom::F5,
            "bounded" => Axiom::Bounded,
            "l1" => Axiom::L1,
            "l2" => Axiom::L2,
            "l3" => Axiom::L3,
            "l4" => Axiom::L4,
            other => return Err(format!("unknown axiom {other:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// Outcome of one property. `margin` is the smallest slack observed; a
/// property fails when some check has slack below `−tol`, and `witness`
/// names the first such check.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomResult {
    pub name: String,
    pub status: Status,
    pub margin: Option<f64>,
    pub witness: Option<String>,
    pub checked: usize,
    pub skipped: usize,
    /// First evaluation error, when checks were skipped.
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub functional: String,
    pub family: String,
    pub seed: u64,
    pub tolerance: f64,
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn get(&self, name: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.axioms.iter().filter(|a| a.status == Status::Fail).map(|a| a.name.as_str()).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|a| a.status != Status::Fail)
    }
}

/// Accumulates checks of one property in a fixed order.
pub(crate) struct Tally {
    name: String,
    tol: f64,
    margin: Option<f64>,
    witness: Option<String>,
    checked: usize,
    skipped: usize,
    reason: Option<String>,
}

impl Tally {
    pub(crate) fn new(name: impl Into<String>, tol: f64) -> Self {
        Tally { name: name.into(), tol, margin: None, witness: None, checked: 0, skipped: 0, reason: None }
    }

    pub(crate) fn record(&mut self, margin: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if self.margin.is_none_or(|m| margin < m) {
            self.margin = Some(margin);
        }
        if margin < -self.tol && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    pub(crate) fn skip(&mut self, reason: impl fmt::Display) {
        self.skipped += 1;
        if self.reason.is_none() {
            self.reason = Some(reason.to_string());
        }
    }

    /// Records a check over possibly failed evaluations.
    pub(crate) fn check<const N: usize>(
        &mut self,
        vals: [&Result<DensityValue>; N],
        margin: impl FnOnce([&DensityValue; N]) -> f64,
        witness: impl FnOnce() -> String,
    ) {
        let mut ok = Vec::with_capacity(N);
        for v in vals {
            match v {
                Ok(v) => ok.push(v),
                Err(e) => return self.skip(e),
            }
        }
        let arr: [&DensityValue; N] = ok.try_into().unwrap_or_else(|_| unreachable!());
        self.record(margin(arr), witness);
    }

    pub(crate) fn finish(self) -> AxiomResult {
        let status = match self.margin {
            None => Status::Skipped,
            Some(m) if m < -self.tol => Status::Fail,
            Some(_) => Status::Pass,
        };
        let witness = if status == Status::Fail { self.witness } else { None };
        AxiomResult { name: self.name, status, margin: self.margin, witness, checked: self.checked, skipped: self.skipped, reason: self.reason }
    }
}

/// Slack of `a ≤ b` between brackets.
pub(crate) fn le(a: &DensityValue, b: &DensityValue) -> f64 {
    b.hi - a.lo
}

/// Slack of `a = b·scale` (never positive).
pub(crate) fn eq_scaled(a: &DensityValue, b: &DensityValue, scale: f64) -> f64 {
    -(a.lo - b.hi * scale).max(b.lo * scale - a.hi).max(0.0)
}

pub(crate) fn eq_const(a: &DensityValue, c: f64) -> f64 {
    -(a.lo - c).max(c - a.hi).max(0.0)
}

/// Evaluates in parallel; the output order matches the input.
pub(crate) fn eval_all(f: &Functional, sets: &[SetExpr], sch: &Schedule) -> Vec<Result<DensityValue>> {
    sets.par_iter().map(|e| f.eval(e, sch)).collect()
}

/// Unordered pairs `i < j`.
pub(crate) fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}
