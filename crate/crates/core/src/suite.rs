//! The acceptance suite: nine numbered property batteries covering
//! envelopes, polarity round trips, penalty duality, conjugates, axioms,
//! monotone continuity, stationary sequences, localization, and determinism.
//!
//! Each criterion returns a [`CriterionResult`] with pass/fail, check
//! counts, and the first failing instance.  [`run_suite`] executes all nine;
//! the determinism criterion reruns the first eight with the same seed and
//! byte-compares the serialized results.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::func::{
    boundary_power_sequence, bump_family, lipschitz_envelope, stationary_sequence,
    upper_envelope, BoundedFunction, DecreasingSequence,
};
use crate::lp::{
    bipolar_membership, conic_combination_feasible, enumerate_polar_vertices,
    polar_scenario_set, rational_from_f64, AcceptanceCone,
};
use crate::measure::{evaluate, Measure};
use crate::sampling::{
    random_cone, random_function, random_line_space, random_measure, rng_from_seed,
};
use crate::space::{sample_interval, sample_paths, MetricSpace};
use crate::utility::{
    axioms_check, conjugate_penalty, entropic_eval, fatou_check, support_localization_probe,
    BoundaryUtility, Penalty, ScenarioSet, Utility, UtilityOracle,
};

/// Seed used by the acceptance battery and the CLI when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Summary, or the first failing instance.
    pub detail: String,
}

struct Tally {
    checks: usize,
    failures: usize,
    first: Option<String>,
    /// Running sum of interesting computed values; surfaced in the detail
    /// string so the determinism criterion's byte comparison covers the
    /// numerics, not just the pass/fail pattern.
    checksum: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: 0,
            first: None,
            checksum: 0.0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn note(&mut self, value: f64) {
        self.checksum += value;
    }

    fn finish(self, index: usize, name: &str) -> CriterionResult {
        let passed = self.failures == 0;
        let detail = match self.first {
            Some(first) => format!("{}/{} checks failed; first: {first}", self.failures, self.checks),
            None => format!("{} checks passed (checksum {:e})", self.checks, self.checksum),
        };
        CriterionResult {
            index,
            name: name.to_string(),
            passed,
            checks: self.checks,
            failures: self.failures,
            detail,
        }
    }
}

fn criterion_rng(seed: u64, index: u64) -> ChaCha8Rng {
    rng_from_seed(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

// ---------------------------------------------------------------------------
// Criterion 1: envelope suite.

fn rational_values(f: &BoundedFunction) -> Result<Vec<BigRational>> {
    f.values().iter().map(|&v| rational_from_f64(v)).collect()
}

fn rational_dist(space: &Arc<MetricSpace>) -> Result<Vec<Vec<BigRational>>> {
    (0..space.len())
        .map(|i| {
            (0..space.len())
                .map(|j| rational_from_f64(space.dist(i, j)))
                .collect()
        })
        .collect()
}

/// Exact lower envelope min_y f(y) + n·d(x, y) in rational arithmetic.
fn rational_envelope(
    fr: &[BigRational],
    dist: &[Vec<BigRational>],
    n: &BigRational,
) -> Vec<BigRational> {
    (0..fr.len())
        .map(|x| {
            (0..fr.len())
                .map(|y| &fr[y] + n * &dist[x][y])
                .min()
                .expect("nonempty space")
        })
        .collect()
}

/// Exact best Lipschitz constant of f.
fn rational_lipschitz(fr: &[BigRational], dist: &[Vec<BigRational>]) -> BigRational {
    let mut best = BigRational::zero();
    for i in 0..fr.len() {
        for j in 0..fr.len() {
            if dist[i][j].is_zero() {
                continue;
            }
            let slope = (&fr[i] - &fr[j]).abs() / &dist[i][j];
            if slope > best {
                best = slope;
            }
        }
    }
    best
}

fn rational_ceil(r: &BigRational) -> BigRational {
    r.ceil()
}

fn envelope_battery(
    t: &mut Tally,
    tag: &str,
    f: &BoundedFunction,
    ns: &[f64],
) -> Result<()> {
    let space = f.space();
    let d = space.len();
    let fr = rational_values(f)?;
    let dist = rational_dist(space)?;

    let mut prev: Option<BoundedFunction> = None;
    for &n in ns {
        let g = lipschitz_envelope(f, n)?;
        let h = upper_envelope(f, n)?;
        t.note(g.value(0) + h.value(d - 1));
        for x in 0..d {
            t.check(g.value(x) <= f.value(x), || {
                format!("{tag}: g_{n} exceeds f at {}", space.id(x))
            });
            t.check(h.value(x) >= f.value(x), || {
                format!("{tag}: h_{n} below f at {}", space.id(x))
            });
        }
        for x in 0..d {
            for y in (x + 1)..d {
                let bound = n * space.dist(x, y) + 1e-9;
                t.check((g.value(x) - g.value(y)).abs() <= bound, || {
                    format!("{tag}: g_{n} not {n}-Lipschitz on ({x},{y})")
                });
                t.check((h.value(x) - h.value(y)).abs() <= bound, || {
                    format!("{tag}: h_{n} not {n}-Lipschitz on ({x},{y})")
                });
            }
        }
        if let Some(p) = &prev {
            for x in 0..d {
                t.check(p.value(x) <= g.value(x), || {
                    format!("{tag}: lower envelope not monotone in n at {}", space.id(x))
                });
            }
        }
        prev = Some(g);
    }

    // Quantitative bound, exactly, at the two smallest levels: the exact
    // envelope dominates the minimum of f over the 2‖f‖/n ball, and the
    // floating envelope tracks the exact one to 1e-12.
    let norm_r = rational_from_f64(f.sup_norm())?;
    for &n in ns.iter().take(2) {
        let nr = rational_from_f64(n)?;
        let exact = rational_envelope(&fr, &dist, &nr);
        let radius = BigRational::from_integer(2.into()) * &norm_r / &nr;
        let g = lipschitz_envelope(f, n)?;
        for x in 0..d {
            let ball_min = (0..d)
                .filter(|&y| dist[x][y] <= radius)
                .map(|y| fr[y].clone())
                .min()
                .expect("ball contains x itself");
            t.check(exact[x] >= ball_min, || {
                format!("{tag}: quantitative bound fails exactly at {}", space.id(x))
            });
            let drift = (&exact[x] - rational_from_f64(g.value(x)).expect("finite")).abs();
            t.check(drift <= rational_from_f64(1e-12).expect("finite"), || {
                format!("{tag}: float envelope drifts from exact at {}", space.id(x))
            });
        }
    }

    // Idempotence at n ≥ the measured Lipschitz constant, exactly in
    // rational arithmetic, and to 1e-12 in floating point.
    let lip = rational_lipschitz(&fr, &dist);
    let n_star = {
        let c = rational_ceil(&lip);
        if c <= lip {
            c + BigRational::from_integer(1.into())
        } else {
            c
        }
    };
    use num_traits::ToPrimitive;
    let n_star_f = n_star.to_f64().expect("small integer");
    let exact = rational_envelope(&fr, &dist, &n_star);
    for x in 0..d {
        t.check(exact[x] == fr[x], || {
            format!("{tag}: exact envelope not idempotent at {}", space.id(x))
        });
    }
    // The floating envelope carries rounding noise proportional to the
    // magnitude of the candidate terms n·d(x,y); scale the tolerance
    // accordingly (the exact claim above is the zero-tolerance one).
    let diam = (0..d)
        .flat_map(|x| (0..d).map(move |y| (x, y)))
        .map(|(x, y)| space.dist(x, y))
        .fold(0.0, f64::max);
    let float_tol = 1e-12 + 1e-14 * n_star_f * diam;
    let g = lipschitz_envelope(f, n_star_f)?;
    for x in 0..d {
        t.check((g.value(x) - f.value(x)).abs() <= float_tol, || {
            format!("{tag}: float envelope not idempotent at {}", space.id(x))
        });
    }
    Ok(())
}

pub fn criterion_1_envelopes(seed: u64) -> Result<CriterionResult> {
    let mut rng = criterion_rng(seed, 1);
    let mut t = Tally::new();
    let interval = sample_interval(20, false)?;
    let grid = interval.ambient().clone();
    for rep in 0..50 {
        let f = random_function(&grid, 2.0, &mut rng)?;
        envelope_battery(&mut t, &format!("interval#{rep}"), &f, &[1.0, 2.0, 3.0, 5.0, 8.0])?;
    }
    for rep in 0..10 {
        use rand::Rng;
        let space = sample_paths(5, 6, rng.random())?;
        let f = random_function(&space, 2.0, &mut rng)?;
        envelope_battery(&mut t, &format!("paths#{rep}"), &f, &[1.0, 2.0, 4.0])?;
    }
    Ok(t.finish(1, "envelope_suite"))
}

// ---------------------------------------------------------------------------
// Criterion 2: duality round trip.

pub fn criterion_2_duality(seed: u64) -> Result<CriterionResult> {
    let mut rng = criterion_rng(seed, 2);
    let mut t = Tally::new();
    for c in 0..100 {
        let d = 2 + (c % 7);
        let space = random_line_space(d, &mut rng)?;
        let gens = 1 + (c % 3);
        let cone = random_cone(&space, gens, 1.0, &mut rng)?;
        let s = polar_scenario_set(&cone, true)?;
        for _ in 0..200 {
            let f = random_function(&space, 2.0, &mut rng)?;
            let dec = bipolar_membership(&f, &s)?;
            let feasible = conic_combination_feasible(&cone, &f)?;
            if let Some(min) = dec.min_value {
                t.note(min);
            }
            let agree = match dec.min_value {
                Some(min) => dec.accepted == feasible || min.abs() <= 1e-7,
                // Empty polar: the cone contains a strictly negative
                // function and hence everything.
                None => feasible,
            };
            t.check(agree, || {
                format!(
                    "cone#{c}: bipolar={} lp={} min={:?}",
                    dec.accepted, feasible, dec.min_value
                )
            });
        }
    }
    Ok(t.finish(2, "duality_round_trip"))
}

// ---------------------------------------------------------------------------
// Criterion 3: penalty duality (entropic closed form vs grid).

/// Grid minimization of μ(f) + γ·KL(μ‖ν) over the 2- or 3-point simplex in
/// steps of 1e-3, via a precomputed t·ln t table.
fn entropic_grid_min(f: &[f64], nu: &[f64], gamma: f64) -> (f64, Vec<f64>) {
    const STEPS: usize = 1000;
    let xlnx: Vec<f64> = (0..=STEPS)
        .map(|i| {
            let x = i as f64 / STEPS as f64;
            if i == 0 {
                0.0
            } else {
                x * x.ln()
            }
        })
        .collect();
    let lnnu: Vec<f64> = nu.iter().map(|&v| v.ln()).collect();
    let coord = |i: usize| i as f64 / STEPS as f64;
    let mut best = f64::INFINITY;
    let mut arg = vec![0.0; f.len()];
    match f.len() {
        2 => {
            for i in 0..=STEPS {
                let (a, b) = (coord(i), coord(STEPS - i));
                let kl = xlnx[i] + xlnx[STEPS - i] - a * lnnu[0] - b * lnnu[1];
                let val = a * f[0] + b * f[1] + gamma * kl;
                if val < best {
                    best = val;
                    arg = vec![a, b];
                }
            }
        }
        3 => {
            for i in 0..=STEPS {
                for j in 0..=(STEPS - i) {
                    let k = STEPS - i - j;
                    let (a, b, c) = (coord(i), coord(j), coord(k));
                    let kl = xlnx[i] + xlnx[j] + xlnx[k]
                        - a * lnnu[0]
                        - b * lnnu[1]
                        - c * lnnu[2];
                    let val = a * f[0] + b * f[1] + c * f[2] + gamma * kl;
                    if val < best {
                        best = val;
                        arg = vec![a, b, c];
                    }
                }
            }
        }
        _ => unreachable!("grid minimization is for 2- and 3-point spaces"),
    }
    (best, arg)
}

pub fn criterion_3_penalty_duality(seed: u64) -> Result<CriterionResult> {
    let mut rng = criterion_rng(seed, 3);
    let mut t = Tally::new();
    let spaces = [
        sample_interval(2, false)?.ambient().clone(),
        sample_interval(3, false)?.ambient().clone(),
    ];
    for space in &spaces {
        let d = space.len();
        let references = if d == 2 {
            vec![vec![0.5, 0.5], vec![0.25, 0.75]]
        } else {
            vec![vec![1.0 / 3.0; 3], vec![0.2, 0.3, 0.5]]
        };
        let mut fns = vec![random_function(space, 1.5, &mut rng)?];
        fns.push(random_function(space, 1.5, &mut rng)?);
        fns.push(BoundedFunction::from_fn(space.clone(), |i| i as f64)?);
        for nu_w in &references {
            let nu = Measure::new(
                space.clone(),
                nu_w.iter().copied().enumerate().collect(),
            )?;
            for &gamma in &[0.5, 1.0] {
                for f in &fns {
                    let (value, minimizer) = entropic_eval(gamma, &nu, f)?;
                    let (grid_value, grid_arg) =
                        entropic_grid_min(f.values(), nu_w, gamma);
                    t.note(value + grid_value);
                    t.check((grid_value - value).abs() <= 1e-3, || {
                        format!(
                            "d={d} γ={gamma}: closed form {value} vs grid {grid_value}"
                        )
                    });
                    for i in 0..d {
                        t.check((grid_arg[i] - minimizer.weight(i)).abs() <= 1e-3, || {
                            format!(
                                "d={d} γ={gamma}: argmin coordinate {i} off by more than the grid step"
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(t.finish(3, "penalty_duality"))
}

// ---------------------------------------------------------------------------
// Criterion 4: conjugate consistency.

pub fn criterion_4_conjugates(seed: u64) -> Result<CriterionResult> {
    let mut rng = criterion_rng(seed, 4);
    let mut t = Tally::new();
    for c in 0..50 {
        let d = 2 + (c % 5);
        let space = random_line_space(d, &mut rng)?;
        // First generator gets an exact −1 at its minimum coordinate so
        // non-members always exist (δ there violates the polar constraint).
        let mut g0 = random_function(&space, 1.0, &mut rng)?;
        let i_star = (0..d)
            .min_by(|&a, &b| {
                g0.value(a)
                    .partial_cmp(&g0.value(b))
                    .expect("finite")
            })
            .expect("nonempty");
        let mut vals = g0.values().to_vec();
        vals[i_star] = -1.0;
        g0 = BoundedFunction::new(space.clone(), vals)?;
        let mut gens = vec![g0.clone()];
        for _ in 0..(c % 3) {
            gens.push(random_function(&space, 1.0, &mut rng)?);
        }
        let cone = AcceptanceCone::new(space.clone(), gens)?;

        for v in enumerate_polar_vertices(&cone)? {
            let conj = conjugate_penalty(&cone, &v)?;
            t.check(conj.value == 0.0, || {
                format!("cone#{c}: conjugate nonzero on a polar vertex")
            });
        }

        for p in 0..50 {
            let mu = random_measure(&space, &mut rng)?;
            let a = evaluate(&mu, &g0)?;
            // Mix toward δ_{i*} until μ_t(g0) ≤ −0.2.
            let t_mix = (((a + 0.2) / (a + 1.0)) + 0.05).clamp(0.0, 0.999);
            let weights: Vec<(usize, f64)> = (0..d)
                .map(|i| {
                    let w = (1.0 - t_mix) * mu.weight(i)
                        + if i == i_star { t_mix } else { 0.0 };
                    (i, w)
                })
                .collect();
            let bad = Measure::normalized(space.clone(), weights)?;
            t.note(evaluate(&bad, &g0)?);
            t.check(evaluate(&bad, &g0)? <= -0.1, || {
                format!("cone#{c} probe#{p}: non-member construction failed")
            });
            let conj = conjugate_penalty(&cone, &bad)?;
            t.check(conj.value.is_infinite(), || {
                format!("cone#{c} probe#{p}: conjugate finite on a non-member")
            });
            match conj.certificate {
                Some(ray) => {
                    t.check(conic_combination_feasible(&cone, &ray)?, || {
                        format!("cone#{c} probe#{p}: certificate not in the cone")
                    });
                    t.check(evaluate(&bad, &ray)? < -1e-9, || {
                        format!("cone#{c} probe#{p}: certificate does not separate")
                    });
                }
                None => t.check(false, || {
                    format!("cone#{c} probe#{p}: infinite conjugate without a ray")
                }),
            }
        }
    }
    Ok(t.finish(4, "conjugate_consistency"))
}

// ---------------------------------------------------------------------------
// Criterion 5: axiom suite.

fn three_point_line() -> Result<Arc<MetricSpace>> {
    let coords = [0.0, 0.5, 1.0];
    let dist = coords
        .iter()
        .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
        .collect();
    MetricSpace::new(
        vec!["l".into(), "m".into(), "r".into()],
        dist,
        Some(coords.to_vec()),
    )
}

pub fn criterion_5_axioms(seed: u64) -> Result<CriterionResult> {
    let mut rng = criterion_rng(seed, 5);
    let mut t = Tally::new();
    let s3 = three_point_line()?;
    let scalars = [-1.0, 0.5, 2.0, 3.7];

    let half = Measure::new(s3.clone(), vec![(0, 0.5), (1, 0.5)])?;
    let vert_set = ScenarioSet::from_vertices(
        s3.clone(),
        vec![
            Measure::dirac(s3.clone(), 0)?,
            Measure::uniform(s3.clone())?,
            half,
        ],
    )?;
    let cone = AcceptanceCone::new(
        s3.clone(),
        vec![
            BoundedFunction::new(s3.clone(), vec![1.0, -1.0, 0.5])?,
            BoundedFunction::new(s3.clone(), vec![0.2, 0.3, -0.1])?,
        ],
    )?;
    let pair = sample_interval(5, true)?;
    let boundary = BoundaryUtility::new(pair.clone(), vec![3, 4, 5], None, None)?;

    let utilities: Vec<(&str, Utility)> = vec![
        ("coherent_vertices", Utility::Coherent(vert_set.clone())),
        ("coherent_polytope", Utility::Coherent(ScenarioSet::from_cone(cone))),
        (
            "entropic",
            Utility::Concave(Penalty::entropic(1.0, Measure::uniform(s3.clone())?)?),
        ),
        (
            "tabulated",
            Utility::Concave(Penalty::tabulated(vec![
                (Measure::dirac(s3.clone(), 0)?, 0.0),
                (Measure::uniform(s3.clone())?, 0.3),
            ])?),
        ),
        ("worst_case", Utility::WorstCase(s3.clone())),
        ("boundary", Utility::Boundary(boundary)),
    ];

    for (name, u) in &utilities {
        let space = u.space().clone();
        let probes = (0..100)
            .map(|_| random_function(&space, 2.0, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        t.note(u.eval(&probes[0])?);
        let report = axioms_check(u, &probes, &scalars)?;
        t.check(report.passed(), || {
            let bad = report
                .records
                .iter()
                .find(|r| !r.passed())
                .expect("failed report has a failing record");
            format!("{name}: axiom {} violated", bad.kind.name())
        });
        let homog = report.record(crate::utility::AxiomKind::PositiveHomogeneity);
        t.check(homog.checked == u.is_coherent(), || {
            format!("{name}: homogeneity coverage does not match coherence claim")
        });
    }

    // The deliberately broken oracle must fail, with a concrete witness.
    struct Broken(Utility);
    impl UtilityOracle for Broken {
        fn eval(&self, f: &BoundedFunction) -> Result<f64> {
            Ok(self.0.eval(f)? + 0.1 * f.sup_norm())
        }
        fn declared_coherent(&self) -> bool {
            true
        }
    }
    let broken = Broken(Utility::Coherent(vert_set));
    let probes = (0..100)
        .map(|_| random_function(&s3, 2.0, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let report = axioms_check(&broken, &probes, &scalars)?;
    t.check(!report.passed(), || "broken oracle passed the battery".into());
    let has_witness = report
        .records
        .iter()
        .any(|r| !r.passed() && r.witness.is_some());
    t.check(has_witness, || "broken oracle failed without a witness".into());

    Ok(t.finish(5, "axiom_suite"))
}

// ---------------------------------------------------------------------------
// Criterion 6: Fatou dichotomy.

/// φ(0.99)^30 with the same iterated product the sequence builder uses.
fn iterated_power(base: f64, m: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..m {
        p *= base;
    }
    p
}

pub fn criterion_6_fatou(seed: u64) -> Result<CriterionResult> {
    let _ = seed; // fully deterministic fixture
    let mut t = Tally::new();
    let pair = sample_interval(99, true)?;
    let interior = pair.interior_space().clone();
    let zero = BoundedFunction::zero(pair.ambient().clone());
    let max_phi = 0.99; // interior point nearest the charged boundary

    // Interior-vertex coherent utilities.
    let mix = Measure::new(interior.clone(), vec![(29, 0.5), (69, 0.5)])?;
    let interior_utilities: Vec<(String, Utility)> = vec![
        (
            "dirac_mid".into(),
            Utility::Coherent(ScenarioSet::from_vertices(
                interior.clone(),
                vec![Measure::dirac(interior.clone(), 49)?],
            )?),
        ),
        (
            "dirac_near_boundary".into(),
            Utility::Coherent(ScenarioSet::from_vertices(
                interior.clone(),
                vec![Measure::dirac(interior.clone(), 98)?],
            )?),
        ),
        (
            "uniform".into(),
            Utility::Coherent(ScenarioSet::from_vertices(
                interior.clone(),
                vec![Measure::uniform(interior.clone())?],
            )?),
        ),
        (
            "two_point_mix".into(),
            Utility::Coherent(ScenarioSet::from_vertices(interior.clone(), vec![mix])?),
        ),
    ];

    for &k in &[1.0, 3.0] {
        let seq = boundary_power_sequence(&pair, &zero, k, 1, 30)?;
        let tol = k * iterated_power(max_phi, 30);
        for (name, u) in &interior_utilities {
            let report = fatou_check(u, &seq, tol)?;
            t.check(report.pass, || {
                format!("k={k} {name}: gap {} exceeds {tol}", report.gap)
            });
            t.check(report.gap >= 0.0, || format!("k={k} {name}: negative gap"));
            t.check(report.limit_value == 0.0, || {
                format!("k={k} {name}: limit value not 0")
            });
        }

        let approach: Vec<usize> = vec![96, 97, 98, 99];
        let bu = BoundaryUtility::new(pair.clone(), approach, None, None)?;
        let u = Utility::Boundary(bu);
        let report = fatou_check(&u, &seq, 1e-6)?;
        t.check(!report.pass, || format!("k={k} boundary: unexpectedly passed"));
        t.check((report.gap - k).abs() <= 1e-9, || {
            format!("k={k} boundary: gap {} is not k", report.gap)
        });
    }
    Ok(t.finish(6, "fatou_dichotomy"))
}

// ---------------------------------------------------------------------------
// Criterion 7: stationary sequences.

pub fn criterion_7_stationary(seed: u64) -> Result<CriterionResult> {
    let _ = seed; // fully deterministic fixture
    let mut t = Tally::new();
    let pair = sample_interval(20, false)?;
    let grid = pair.ambient().clone();
    let coord = BoundedFunction::from_fn(grid.clone(), |i| grid.label(i).expect("labeled"))?;

    // f_n(x) = xⁿ by iterated multiplication; limit 0 on the interior grid.
    let horizon = 60;
    let mut terms = Vec::with_capacity(horizon);
    let mut current = coord.clone();
    for _ in 0..horizon {
        terms.push(current.clone());
        current = current.mul(&coord)?;
    }
    let seq = DecreasingSequence::new(terms, BoundedFunction::zero(grid.clone()))?;

    match stationary_sequence(&seq, 0.1) {
        Ok(res) => {
            // G_n nested decreasing.
            for w in res.g_sets.windows(2) {
                let nested = w[1].iter().all(|x| w[0].contains(x));
                t.check(nested, || "index sets G_n fail to nest".into());
            }
            // Every point stationary at the horizon.
            let last = res.g.last().expect("nonempty");
            for x in 0..grid.len() {
                t.check(last.value(x) == 0.0, || {
                    format!("point {} not stationary by the horizon", grid.id(x))
                });
            }
            // Witness equals the brute-force minimum, bitwise.
            for x in 0..grid.len() {
                let mut brute = f64::INFINITY;
                for (i, gn) in res.g.iter().enumerate() {
                    let n = (i + 1) as f64;
                    brute = brute.min((n + 1.0) * 0.0 - n * gn.value(x));
                }
                t.check(res.witness.value(x) == brute, || {
                    format!("witness differs from brute force at {}", grid.id(x))
                });
            }
            // The witness is nontrivial: strictly negative where G_1 holds.
            if let Some(first_set) = res.g_sets.first() {
                for &x in first_set {
                    t.check(res.witness.value(x) < 0.0, || {
                        format!("witness vanishes inside G_1 at {}", grid.id(x))
                    });
                }
            }
        }
        Err(e) => t.check(false, || format!("stationary sequence failed: {e}")),
    }
    Ok(t.finish(7, "stationary_sequences"))
}

// ---------------------------------------------------------------------------
// Criterion 8: localization probe.

pub fn criterion_8_localization(seed: u64) -> Result<CriterionResult> {
    let _ = seed; // fully deterministic fixture
    let mut t = Tally::new();
    let coords: Vec<f64> = (0..5).map(|i| i as f64).collect();
    let dist = coords
        .iter()
        .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
        .collect();
    let space = MetricSpace::new(
        (0..5).map(|i| format!("x{}", i + 1)).collect(),
        dist,
        Some(coords),
    )?;
    let fam = bump_family(&space, &[0, 1, 2, 3, 4])?;

    // η_n = (1/8)·2^{1−n}, exactly.
    for n in 1..=5usize {
        let expected = 0.125 * iterated_power(0.5, n - 1);
        t.check(fam.radius(n - 1) == expected, || {
            format!("η_{n} is {} not {expected}", fam.radius(n - 1))
        });
    }

    let scenarios = (0..5)
        .map(|i| Measure::dirac(space.clone(), i))
        .collect::<Result<Vec<_>>>()?;
    let u = Utility::Coherent(ScenarioSet::from_vertices(space.clone(), scenarios)?);
    let report = support_localization_probe(&u, &fam, 5)?;
    t.check(report.divergent, || "probe did not certify divergence".into());
    for p in &report.probes {
        t.check(p.u_neg_psi == -1.0, || {
            format!("u(−ψ_{}) is {} not −1", p.n, p.u_neg_psi)
        });
        t.check(p.coefficient == Some(-(p.n as f64)), || {
            format!("coefficient a_{} is not −{}", p.n, p.n)
        });
    }
    for part in &report.partials {
        t.check(part.value == -(part.n as f64), || {
            format!("u(g_{}) is {} not −{}", part.n, part.value, part.n)
        });
    }
    Ok(t.finish(8, "localization_probe"))
}

// ---------------------------------------------------------------------------
// Criterion 9 and the full suite.

fn run_first_eight(seed: u64) -> Result<Vec<CriterionResult>> {
    Ok(vec![
        criterion_1_envelopes(seed)?,
        criterion_2_duality(seed)?,
        criterion_3_penalty_duality(seed)?,
        criterion_4_conjugates(seed)?,
        criterion_5_axioms(seed)?,
        criterion_6_fatou(seed)?,
        criterion_7_stationary(seed)?,
        criterion_8_localization(seed)?,
    ])
}

fn determinism_result(
    first: &[CriterionResult],
    second: &[CriterionResult],
) -> Result<CriterionResult> {
    let a = serde_json::to_string(first)?;
    let b = serde_json::to_string(second)?;
    let mut t = Tally::new();
    t.check(a == b, || {
        "rerun with the same seed produced different bytes".into()
    });
    let mut nine = t.finish(9, "determinism");
    if nine.passed {
        nine.detail = format!("two runs, {} serialized bytes each, byte-identical", a.len());
    }
    Ok(nine)
}

/// Determinism criterion on its own: two full runs of the first eight
/// criteria with the same seed must serialize to identical bytes.
pub fn criterion_9_determinism(seed: u64) -> Result<CriterionResult> {
    let first = run_first_eight(seed)?;
    let second = run_first_eight(seed)?;
    determinism_result(&first, &second)
}

/// Run all nine criteria.  Criterion 9 reruns the first eight with the same
/// seed and compares the serialized results byte for byte.
pub fn run_suite(seed: u64) -> Result<Vec<CriterionResult>> {
    let mut results = run_first_eight(seed)?;
    let rerun = run_first_eight(seed)?;
    let nine = determinism_result(&results, &rerun)?;
    results.push(nine);
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full batteries run in the dedicated acceptance target; here we
    // exercise the cheap fully-deterministic criteria and the plumbing.

    #[test]
    fn deterministic_fixtures_pass() {
        assert!(criterion_6_fatou(0).unwrap().passed);
        assert!(criterion_7_stationary(0).unwrap().passed);
        assert!(criterion_8_localization(0).unwrap().passed);
    }

    #[test]
    fn tally_reports_first_failure() {
        let mut t = Tally::new();
        t.check(true, || unreachable!());
        t.check(false, || "first".into());
        t.check(false, || "second".into());
        let r = t.finish(42, "demo");
        assert!(!r.passed);
        assert_eq!(r.checks, 3);
        assert_eq!(r.failures, 2);
        assert!(r.detail.contains("first"));
        assert!(!r.detail.contains("second"));
    }

    #[test]
    fn criterion_results_serialize_stably() {
        let a = serde_json::to_string(&criterion_8_localization(0).unwrap()).unwrap();
        let b = serde_json::to_string(&criterion_8_localization(0).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_minimizer_matches_closed_form_on_a_spot_check() {
        let (best, arg) = entropic_grid_min(&[0.0, 2.0], &[0.5, 0.5], 1.0);
        let expected = 2.0_f64.ln() - (1.0 + (-2.0_f64).exp()).ln();
        assert!((best - expected).abs() <= 1e-3);
        let e2 = (-2.0_f64).exp();
        assert!((arg[0] - 1.0 / (1.0 + e2)).abs() <= 1e-3);
    }
}
