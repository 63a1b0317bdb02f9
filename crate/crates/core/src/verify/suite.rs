//! Suites: which checks run on which fields, and what outcome is expected.

use wildmatch::WildMatch;

use super::checks::*;
use super::{ResidualReport, SamplingPlan, VerifyError};
use crate::fields::{field_catalog, negative_controls, positive_catalog, CartesianScalar, StructuredField};
use crate::operators::DerivativeEngine;

type Engine = DerivativeEngine<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Positive,
    Negative,
    Identities,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Suite::All),
            "positive" => Some(Suite::Positive),
            "negative" => Some(Suite::Negative),
            "identities" => Some(Suite::Identities),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Positive => "positive",
            Suite::Negative => "negative",
            Suite::Identities => "identities",
        }
    }
}

/// Checks run on catalog fields.
pub const FIELD_CHECKS: &[&str] = &[
    "condition",
    "holomorphy_tr",
    "angular_condition",
    "cr_system",
    "t_derivative_closure",
    "harmonic_v_over_r",
    "theorem",
    "laplacian_cross_route",
    "spherical_cartesian_consistency",
    "angular_laplace_relation",
    "operator_commutation",
    "axial_regularity",
    "angular_v_holomorphy",
];

/// Checks of unconditional identities, run on their own fixtures.
pub const IDENTITY_CHECKS: &[&str] = &[
    "frame_identities",
    "quaternion_power",
    "second_angular_identity",
    "iota_product_rule",
    "operator_commutation",
];

/// Checks every field is expected to pass, whatever its hypotheses.
const UNIVERSAL: &[&str] = &["spherical_cartesian_consistency"];

const RANDOM_FIXTURES: usize = 20;

/// One identity check on one fixture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityTarget {
    pub name: String,
    pub check: &'static str,
}

pub fn identity_targets() -> Vec<IdentityTarget> {
    let t = |name: &str, check| IdentityTarget {
        name: name.to_string(),
        check,
    };
    let mut out = vec![
        t("frame", "frame_identities"),
        t("fueter:z^2..z^6", "quaternion_power"),
        t("random-trig-polynomials", "second_angular_identity"),
        t("random-quaternion-fields", "iota_product_rule"),
    ];
    for g in commutation_scalars() {
        out.push(t(&format!("scalar:{}", g.name()), "operator_commutation"));
    }
    out
}

fn commutation_scalars() -> Vec<CartesianScalar<f64>> {
    vec![
        CartesianScalar::xy(),
        CartesianScalar::tx_plus_y2(),
        CartesianScalar::x_squared(),
        CartesianScalar::t2_minus_x2(),
    ]
}

fn run_identity(target: &IdentityTarget, plan: &SamplingPlan, engine: &Engine) -> Result<ResidualReport, VerifyError> {
    let seed = plan.rng_seed;
    match target.check {
        "frame_identities" => check_frame_identities(plan),
        "quaternion_power" => check_quaternion_power(plan, 6),
        "second_angular_identity" => check_second_angular_random(RANDOM_FIXTURES, seed, plan, engine),
        "iota_product_rule" => check_iota_product_rule(RANDOM_FIXTURES, seed, plan, engine),
        "operator_commutation" => {
            let g = commutation_scalars()
                .into_iter()
                .find(|g| format!("scalar:{}", g.name()) == target.name)
                .ok_or_else(|| VerifyError::UnknownField(target.name.clone()))?;
            check_operator_commutation(&target.name, &g, plan, engine)
        }
        other => Err(VerifyError::UnknownCheck(other.to_string())),
    }
}

/// Whether `check` is meaningful on `f`.
pub fn applies(check: &str, f: &StructuredField<f64>) -> bool {
    match check {
        "axial_regularity" => f.fueter_seed().is_some(),
        "laplacian_cross_route" => f.satisfies_condition(),
        _ => FIELD_CHECKS.contains(&check),
    }
}

/// Runs a field check by name.
pub fn run_field_check(
    check: &str,
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<ResidualReport, VerifyError> {
    match check {
        "condition" => check_condition(f, plan, engine),
        "holomorphy_tr" => check_holomorphy_tr(f, plan, engine),
        "angular_condition" => check_angular_condition(f, plan, engine),
        "cr_system" => check_cr_system(f, plan, engine),
        "t_derivative_closure" => check_t_derivative_closure(f, plan, engine),
        "harmonic_v_over_r" => check_harmonic_v_over_r(f, plan, engine),
        "theorem" => check_theorem(f, plan, engine),
        "laplacian_cross_route" => check_laplacian_cross_route(f, plan, engine),
        "spherical_cartesian_consistency" => check_spherical_cartesian_consistency(f, plan, engine),
        "angular_laplace_relation" => check_angular_laplace_relation(f, plan, engine),
        "operator_commutation" => check_operator_commutation_field(f, plan, engine),
        "axial_regularity" => check_axial_regularity(f, plan, engine),
        "angular_v_holomorphy" => check_angular_v_holomorphy(f, plan, engine),
        other => Err(VerifyError::UnknownCheck(other.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    Fail,
    /// Informational: the field does not meet the check's hypotheses.
    Any,
}

impl Expectation {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::Pass => "pass",
            Expectation::Fail => "fail",
            Expectation::Any => "any",
        }
    }
}

/// Condition fields must pass everything. Controls must fail the checks
/// they are built to violate and pass the universal ones; their remaining
/// checks are informational.
pub fn expectation(check: &str, f: &StructuredField<f64>) -> Expectation {
    if f.satisfies_condition() {
        Expectation::Pass
    } else if f.must_fail().contains(&check) {
        Expectation::Fail
    } else if UNIVERSAL.contains(&check) {
        Expectation::Pass
    } else {
        Expectation::Any
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: ResidualReport,
    pub expected: Expectation,
}

impl Outcome {
    pub fn as_expected(&self) -> bool {
        match self.expected {
            Expectation::Pass => self.report.pass,
            Expectation::Fail => !self.report.pass,
            Expectation::Any => true,
        }
    }
}

fn normalize(s: &str) -> String {
    s.replace('^', "")
}

/// Names matched by `selectors` (globs; `^` is ignored on both sides, so
/// `control:x3` selects `control:x^3`). An empty selector list selects all.
/// A selector matching no known name is an error.
pub fn select_fields(selectors: &[String], names: &[String]) -> Result<Vec<String>, VerifyError> {
    if selectors.is_empty() {
        return Ok(names.to_vec());
    }
    let globs: Vec<_> = selectors.iter().map(|s| WildMatch::new(&normalize(s))).collect();
    for (sel, g) in selectors.iter().zip(&globs) {
        if !names.iter().any(|n| g.matches(&normalize(n))) {
            return Err(VerifyError::UnknownField(sel.clone()));
        }
    }
    Ok(names
        .iter()
        .filter(|n| globs.iter().any(|g| g.matches(&normalize(n))))
        .cloned()
        .collect())
}

/// Validates check names; an empty list selects all.
pub fn select_checks(checks: &[String]) -> Result<Vec<String>, VerifyError> {
    for c in checks {
        if !FIELD_CHECKS.contains(&c.as_str()) && !IDENTITY_CHECKS.contains(&c.as_str()) {
            return Err(VerifyError::UnknownCheck(c.clone()));
        }
    }
    Ok(checks.to_vec())
}

/// Every selectable field or fixture name.
pub fn known_names() -> Vec<String> {
    let mut names: Vec<String> = field_catalog::<f64>().iter().map(|f| f.name().to_string()).collect();
    names.extend(identity_targets().into_iter().map(|t| t.name));
    names.dedup();
    names
}

/// Runs `suite` restricted to the selected fields and checks. Entries are
/// ordered by `(field, check)`.
pub fn run_suite(
    suite: Suite,
    field_selectors: &[String],
    checks: &[String],
    plan: &SamplingPlan,
    engine: &Engine,
) -> Result<Vec<Outcome>, VerifyError> {
    plan.validate()?;
    let checks = select_checks(checks)?;
    let wanted = |c: &str| checks.is_empty() || checks.iter().any(|x| x == c);
    let selected = select_fields(field_selectors, &known_names())?;
    let is_selected = |n: &str| selected.iter().any(|s| s == n);

    let fields: Vec<StructuredField<f64>> = match suite {
        Suite::All => field_catalog(),
        Suite::Positive => positive_catalog(),
        Suite::Negative => negative_controls(),
        Suite::Identities => Vec::new(),
    };
    let mut outcomes = Vec::new();
    for f in fields.iter().filter(|f| is_selected(f.name())) {
        for &check in FIELD_CHECKS {
            if wanted(check) && applies(check, f) {
                outcomes.push(Outcome {
                    report: run_field_check(check, f, plan, engine)?,
                    expected: expectation(check, f),
                });
            }
        }
    }
    if matches!(suite, Suite::All | Suite::Identities) {
        for target in identity_targets() {
            if wanted(target.check) && is_selected(&target.name) {
                outcomes.push(Outcome {
                    report: run_identity(&target, plan, engine)?,
                    expected: Expectation::Pass,
                });
            }
        }
    }
    outcomes.sort_by(|a, b| {
        (a.report.field.as_str(), a.report.check.as_str())
            .cmp(&(b.report.field.as_str(), b.report.check.as_str()))
    });
    Ok(outcomes)
}
