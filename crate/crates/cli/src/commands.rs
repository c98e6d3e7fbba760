//! One function per subcommand.  Each loads its inputs through the config,
//! runs the computation, and assembles an ordered [`Report`]; mathematical
//! findings become records, while unresolvable inputs stay errors for the
//! caller to map to exit code 2.

use riskdual::func::{bump_family, lipschitz_envelope, upper_envelope, BoundedFunction};
use riskdual::io::{load_function, load_measure, load_sequence, load_space, load_utility};
use riskdual::lp::{
    bipolar_membership, conic_combination_feasible, polar_scenario_set, AcceptanceCone,
};
use riskdual::measure::Measure;
use riskdual::sampling::{random_function, rng_from_seed};
use riskdual::suite::run_suite;
use riskdual::utility::{
    acceptance_test, conjugate_penalty, fatou_check, support_localization_probe, ScenarioRepr,
    Utility,
};
use riskdual::{Error, Result};

use crate::config::RunConfig;
use crate::report::{Report, Status};

fn measure_witness(mu: &Measure) -> String {
    mu.weights()
        .iter()
        .map(|&(i, w)| format!("{}={}", mu.space().id(i), w))
        .collect::<Vec<_>>()
        .join(", ")
}

fn values_witness(f: &BoundedFunction) -> String {
    serde_json::to_string(f.values()).expect("value array serializes")
}

fn max_gap(a: &BoundedFunction, b: &BoundedFunction) -> f64 {
    (0..a.len())
        .map(|i| (a.value(i) - b.value(i)).abs())
        .fold(0.0, f64::max)
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// u(f), the minimizing measure, the acceptance decision, and a bisection
/// cross-check of the value.
pub fn cmd_eval(cfg: &RunConfig) -> Result<Report> {
    let space = load_space(&cfg.require("space", &cfg.space)?)?;
    let utility = load_utility(&cfg.require("utility", &cfg.utility)?, &space)?;
    let f = load_function(&cfg.require("function", &cfg.function)?, Some(utility.space()))?;

    let mut report = Report::new("eval", cfg.seed);
    let (value, witness) = utility.eval_with_witness(&f)?;
    report.push("utility_value", Status::Info, Some(value));
    if let Some(mu) = &witness {
        report.push_witness(
            "minimizing_measure",
            Status::Info,
            None,
            measure_witness(mu),
        );
    }
    let decision = acceptance_test(&utility, &f, true)?;
    report.push_witness(
        "acceptance",
        Status::Info,
        Some(decision.value),
        if decision.accepted { "accepted" } else { "rejected" },
    );
    let bisected = decision.bisection_value.expect("bisection requested");
    let consistent = (bisected - value).abs() <= cfg.tol.max(1e-7);
    report.push_witness(
        "bisection_consistency",
        status(consistent),
        Some(bisected),
        format!("largest acceptable cash reduction vs u(f)={value}"),
    );
    Ok(report)
}

/// Lower/upper envelope tables with per-modulus sup gaps; the gap runs must
/// be non-increasing in n.
pub fn cmd_envelope(cfg: &RunConfig) -> Result<Report> {
    let space = load_space(&cfg.require("space", &cfg.space)?)?;
    let f = load_function(&cfg.require("function", &cfg.function)?, Some(space.primary()))?;
    if cfg.envelope_ns.is_empty() {
        return Err(Error::param("envelope_ns", "need at least one modulus"));
    }
    let mut ns = cfg.envelope_ns.clone();
    ns.sort_by(|a, b| a.partial_cmp(b).expect("finite moduli"));

    let mut report = Report::new("envelope", cfg.seed);
    let mut lower_gaps = Vec::new();
    let mut upper_gaps = Vec::new();
    for &n in &ns {
        let g = lipschitz_envelope(&f, n)?;
        let h = upper_envelope(&f, n)?;
        let lower = max_gap(&f, &g);
        let upper = max_gap(&h, &f);
        report.push_witness(format!("g_n={n}"), Status::Info, None, values_witness(&g));
        report.push_witness(format!("h_n={n}"), Status::Info, None, values_witness(&h));
        report.push(format!("lower_gap_n={n}"), Status::Info, Some(lower));
        report.push(format!("upper_gap_n={n}"), Status::Info, Some(upper));
        lower_gaps.push(lower);
        upper_gaps.push(upper);
    }
    let non_increasing = |gaps: &[f64]| gaps.windows(2).all(|w| w[1] <= w[0]);
    report.push(
        "lower_gap_non_increasing",
        status(non_increasing(&lower_gaps)),
        None,
    );
    report.push(
        "upper_gap_non_increasing",
        status(non_increasing(&upper_gaps)),
        None,
    );
    Ok(report)
}

/// Polar scenario vertices, the bipolar round trip over random probes, a
/// directed membership probe, and conjugate penalties at given measures.
pub fn cmd_duality(cfg: &RunConfig) -> Result<Report> {
    let space = load_space(&cfg.require("space", &cfg.space)?)?;
    let utility = load_utility(&cfg.require("utility", &cfg.utility)?, &space)?;
    let cone: AcceptanceCone = match &utility {
        Utility::Coherent(set) => match set.repr() {
            ScenarioRepr::Polytope(cone) => cone.clone(),
            ScenarioRepr::Vertices(_) => {
                return Err(Error::param(
                    "utility",
                    "duality needs an indicator_cone utility (generator form)",
                ))
            }
        },
        _ => {
            return Err(Error::param(
                "utility",
                "duality needs an indicator_cone utility",
            ))
        }
    };
    let polar = polar_scenario_set(&cone, cfg.allow_oracle)?;

    let mut report = Report::new("duality", cfg.seed);
    match polar.repr() {
        ScenarioRepr::Vertices(vs) => {
            for (k, v) in vs.iter().enumerate() {
                report.push_witness(format!("vertex_{k}"), Status::Info, None, measure_witness(v));
            }
        }
        ScenarioRepr::Polytope(_) => {
            report.push_witness(
                "vertices",
                Status::Skipped,
                None,
                "constraint form: space exceeds the exact enumeration cap",
            );
        }
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut agreements = 0usize;
    let mut first_mismatch: Option<String> = None;
    for p in 0..cfg.probes {
        let probe = random_function(cone.space(), 2.0, &mut rng)?;
        let decision = bipolar_membership(&probe, &polar)?;
        let feasible = conic_combination_feasible(&cone, &probe)?;
        let borderline = decision.min_value.is_some_and(|m| m.abs() <= 1e-7);
        if decision.accepted == feasible || borderline {
            agreements += 1;
        } else if first_mismatch.is_none() {
            first_mismatch = Some(format!(
                "probe {p}: accepted={} but cone membership={feasible} (min {:?})",
                decision.accepted, decision.min_value
            ));
        }
    }
    let all_agree = agreements == cfg.probes;
    report.push_witness(
        "bipolar_round_trip",
        status(all_agree),
        Some(agreements as f64),
        first_mismatch.unwrap_or_else(|| format!("{agreements}/{} probes agree", cfg.probes)),
    );

    if let Some(path) = &cfg.function {
        let probe = load_function(&cfg.path(path), Some(cone.space()))?;
        let decision = bipolar_membership(&probe, &polar)?;
        let verdict = if decision.accepted { "accepted" } else { "rejected" };
        let witness = match &decision.witness {
            Some(mu) => format!("{verdict}; witness {}", measure_witness(mu)),
            None => verdict.to_string(),
        };
        report.push_witness("probe_membership", Status::Info, decision.min_value, witness);
    }

    for (k, path) in cfg.measures.iter().enumerate() {
        let mu = load_measure(&cfg.path(path), Some(cone.space()))?;
        let conj = conjugate_penalty(&cone, &mu)?;
        if conj.value.is_finite() {
            report.push(format!("conjugate_{k}"), Status::Info, Some(conj.value));
        } else {
            let certificate = conj
                .certificate
                .as_ref()
                .map(values_witness)
                .unwrap_or_default();
            report.push_witness(
                format!("conjugate_{k}"),
                Status::Info,
                None,
                format!("infinite; separating function {certificate}"),
            );
        }
    }
    Ok(report)
}

/// u along a decreasing sequence against u at its limit; a value increase is
/// a failure record, not an input error.
pub fn cmd_fatou(cfg: &RunConfig) -> Result<Report> {
    let space = load_space(&cfg.require("space", &cfg.space)?)?;
    let utility = load_utility(&cfg.require("utility", &cfg.utility)?, &space)?;
    let seq = load_sequence(&cfg.require("sequence", &cfg.sequence)?, &space)?;
    let tol = cfg.fatou_tolerance();

    let mut report = Report::new("fatou", cfg.seed);
    match fatou_check(&utility, &seq, tol) {
        Ok(rep) => {
            for (m, value) in rep.values.iter().enumerate() {
                report.push(format!("u_f_m={}", m + 1), Status::Info, Some(*value));
            }
            report.push("limit_value", Status::Info, Some(rep.limit_value));
            report.push("gap", Status::Info, Some(rep.gap));
            let witness = if rep.pass {
                format!("gap within tolerance {tol}")
            } else {
                format!("gap {} exceeds tolerance {tol}", rep.gap)
            };
            report.push_witness("monotone_continuity", status(rep.pass), Some(rep.gap), witness);
        }
        Err(Error::MonotonicityViolation {
            step,
            prev,
            next,
            tol: mono_tol,
        }) => {
            report.push_witness(
                "monotone_decrease",
                Status::Fail,
                Some(next),
                format!("values increased at step {step}: {prev} -> {next} (tol {mono_tol})"),
            );
        }
        Err(other) => return Err(other),
    }
    Ok(report)
}

/// Bump-family localization table: η_n, u(−ψ_n), the scaling coefficients,
/// and partial-sum divergence bounds, plus the u(0) = 0 sanity record.
pub fn cmd_probe(cfg: &RunConfig) -> Result<Report> {
    let space = load_space(&cfg.require("space", &cfg.space)?)?;
    let utility = load_utility(&cfg.require("utility", &cfg.utility)?, &space)?;
    if cfg.centers.is_empty() {
        return Err(Error::param("centers", "need at least one bump center id"));
    }
    let domain = utility.space();
    let centers = cfg
        .centers
        .iter()
        .map(|id| {
            domain.index_of(id).ok_or_else(|| Error::UnresolvedReference {
                reference: id.clone(),
                reason: "center id is not a point of the space".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fam = bump_family(domain, &centers)?;
    let horizon = cfg.n_max.min(fam.len());
    let rep = support_localization_probe(&utility, &fam, horizon)?;

    let mut report = Report::new("probe", cfg.seed);
    let zero = BoundedFunction::zero(domain.clone());
    let u0 = utility.eval(&zero)?;
    report.push("empty_run_u0", status(u0.abs() <= cfg.tol), Some(u0));

    for probe in &rep.probes {
        let n = probe.n;
        report.push(format!("eta_n={n}"), Status::Info, Some(probe.radius));
        if probe.skipped {
            report.push_witness(
                format!("u_neg_psi_n={n}"),
                Status::Skipped,
                Some(probe.u_neg_psi),
                "bump invisible to the utility; skipped",
            );
        } else {
            report.push(format!("u_neg_psi_n={n}"), Status::Info, Some(probe.u_neg_psi));
            report.push(format!("a_n={n}"), Status::Info, probe.coefficient);
        }
    }
    let all_active = rep.probes.iter().all(|p| !p.skipped);
    for part in &rep.partials {
        // The −N bound is only a claim when every bump contributes; with
        // skips the stalled partial sums are reported, not judged.
        let st = if all_active {
            status(part.ok)
        } else {
            Status::Info
        };
        report.push_witness(
            format!("u_g_N={}", part.n),
            st,
            Some(part.value),
            format!("divergence bound {}", part.bound),
        );
    }
    report.push_witness(
        "divergence",
        Status::Info,
        None,
        if rep.divergent {
            "certified: u(g_N) ≤ −N at every horizon"
        } else {
            "not certified: a bump was skipped or a partial sum stalled"
        },
    );
    Ok(report)
}

/// The full acceptance battery, one record per criterion.
pub fn cmd_suite(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new("suite", cfg.seed);
    for r in run_suite(cfg.seed)? {
        report.push_witness(
            format!("criterion_{}_{}", r.index, r.name),
            status(r.passed),
            Some(r.checks as f64),
            r.detail,
        );
    }
    Ok(report)
}
