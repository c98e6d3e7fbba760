//! Verification harnesses: axiom batteries over probe families, monotone
//! continuity (Fatou) checks along decreasing sequences, and the bump-family
//! probe that certifies a coherent utility concentrates on the sampled
//! interior.

use crate::error::{Error, Result};
use crate::func::{bump_sum, BoundedFunction, BumpFamily, DecreasingSequence};
use crate::utility::UtilityOracle;

/// Tolerance for every axiom identity/inequality.
pub const AXIOM_TOL: f64 = 1e-9;

/// Slack allowed when checking that a value sequence is non-increasing.
pub const MONO_TOL: f64 = 1e-9;

/// The axioms the battery exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    /// u(f + a) = u(f) + a for constants a.
    Monetary,
    /// f ≤ g pointwise implies u(f) ≤ u(g).
    Monotone,
    /// u(½f + ½g) ≥ ½u(f) + ½u(g).
    Concave,
    /// u(λf) = λ·u(f) for λ > 0 (claimed only for coherent oracles).
    PositiveHomogeneity,
    /// |u(f)| ≤ ‖f‖.
    NormBound,
    /// u(|f|) ≥ 0.
    NonnegativeAcceptance,
}

impl AxiomKind {
    pub fn name(self) -> &'static str {
        match self {
            AxiomKind::Monetary => "monetary",
            AxiomKind::Monotone => "monotone",
            AxiomKind::Concave => "concave",
            AxiomKind::PositiveHomogeneity => "positive_homogeneity",
            AxiomKind::NormBound => "norm_bound",
            AxiomKind::NonnegativeAcceptance => "nonnegative_acceptance",
        }
    }
}

/// First failing instance of an axiom, with both sides of the comparison.
#[derive(Debug, Clone)]
pub struct AxiomWitness {
    pub description: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome for one axiom across the whole probe family.
#[derive(Debug, Clone)]
pub struct AxiomRecord {
    pub kind: AxiomKind,
    /// False when the axiom is not claimed for this oracle (then `passed`
    /// is vacuously true).
    pub checked: bool,
    pub instances: usize,
    pub violations: usize,
    pub witness: Option<AxiomWitness>,
}

impl AxiomRecord {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Battery result; `passed` requires every checked axiom to hold.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub records: Vec<AxiomRecord>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(AxiomRecord::passed)
    }

    pub fn record(&self, kind: AxiomKind) -> &AxiomRecord {
        self.records
            .iter()
            .find(|r| r.kind == kind)
            .expect("all kinds are always present")
    }
}

struct AxiomTally {
    kind: AxiomKind,
    checked: bool,
    instances: usize,
    violations: usize,
    witness: Option<AxiomWitness>,
}

impl AxiomTally {
    fn new(kind: AxiomKind, checked: bool) -> Self {
        AxiomTally {
            kind,
            checked,
            instances: 0,
            violations: 0,
            witness: None,
        }
    }

    /// Check lhs ≥ rhs − tol (equalities are two such checks).
    fn check_ge(&mut self, lhs: f64, rhs: f64, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if lhs < rhs - AXIOM_TOL {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(AxiomWitness {
                    description: describe(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    fn check_eq(&mut self, lhs: f64, rhs: f64, describe: impl Fn() -> String) {
        self.instances += 1;
        if (lhs - rhs).abs() > AXIOM_TOL {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(AxiomWitness {
                    description: describe(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    fn finish(self) -> AxiomRecord {
        AxiomRecord {
            kind: self.kind,
            checked: self.checked,
            instances: self.instances,
            violations: self.violations,
            witness: self.witness,
        }
    }
}

/// Run the axiom battery on `probes`, using `scalars` for cash shifts and
/// (their positive members) homogeneity factors.  Monotonicity and concavity
/// run over consecutive probe pairs.  Positive homogeneity is exercised only
/// when the oracle declares coherence; the record stays in the report marked
/// unchecked otherwise.
pub fn axioms_check(
    u: &dyn UtilityOracle,
    probes: &[BoundedFunction],
    scalars: &[f64],
) -> Result<AxiomReport> {
    if probes.is_empty() {
        return Err(Error::param("probes", "axiom battery needs at least one probe"));
    }
    for s in scalars {
        if !s.is_finite() {
            return Err(Error::param("scalars", format!("scalar {s} is not finite")));
        }
    }
    let values: Vec<f64> = probes.iter().map(|f| u.eval(f)).collect::<Result<_>>()?;

    let mut monetary = AxiomTally::new(AxiomKind::Monetary, true);
    let mut monotone = AxiomTally::new(AxiomKind::Monotone, true);
    let mut concave = AxiomTally::new(AxiomKind::Concave, true);
    let coherent = u.declared_coherent();
    let mut homog = AxiomTally::new(AxiomKind::PositiveHomogeneity, coherent);
    let mut norm = AxiomTally::new(AxiomKind::NormBound, true);
    let mut nonneg = AxiomTally::new(AxiomKind::NonnegativeAcceptance, true);

    for (i, f) in probes.iter().enumerate() {
        let uf = values[i];

        for &a in scalars {
            let shifted = u.eval(&f.shift(a)?)?;
            monetary.check_eq(shifted, uf + a, || {
                format!("u(f{i} + {a}) vs u(f{i}) + {a}")
            });
        }

        if coherent {
            for &lam in scalars.iter().filter(|&&l| l > 0.0) {
                let scaled = u.eval(&f.scale(lam)?)?;
                homog.check_eq(scaled, lam * uf, || {
                    format!("u({lam}·f{i}) vs {lam}·u(f{i})")
                });
            }
        }

        norm.check_ge(f.sup_norm(), uf.abs(), || {
            format!("‖f{i}‖ vs |u(f{i})|")
        });
        let abs_val = u.eval(&f.abs())?;
        nonneg.check_ge(abs_val, 0.0, || format!("u(|f{i}|) vs 0"));

        if i + 1 < probes.len() {
            let g = &probes[i + 1];
            let ug = values[i + 1];
            let upper = f.pointwise_max(g)?;
            let u_upper = u.eval(&upper)?;
            monotone.check_ge(u_upper, uf, || {
                format!("u(max(f{i}, f{})) vs u(f{i})", i + 1)
            });
            monotone.check_ge(u_upper, ug, || {
                format!("u(max(f{i}, f{j})) vs u(f{j})", j = i + 1)
            });

            let mid = f.add(g)?.scale(0.5)?;
            let u_mid = u.eval(&mid)?;
            concave.check_ge(u_mid, 0.5 * (uf + ug), || {
                format!("u(½f{i} + ½f{}) vs ½u(f{i}) + ½u(f{})", i + 1, i + 1)
            });
        }
    }

    Ok(AxiomReport {
        records: vec![
            monetary.finish(),
            monotone.finish(),
            concave.finish(),
            homog.finish(),
            norm.finish(),
            nonneg.finish(),
        ],
    })
}

/// Monotone-continuity check along a decreasing sequence.
#[derive(Debug, Clone)]
pub struct FatouReport {
    /// u(f_m) along the sequence.
    pub values: Vec<f64>,
    pub limit_value: f64,
    /// inf_m u(f_m) − u(f) = last value − limit value.
    pub gap: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Evaluate the oracle along `seq` and compare the decreasing value run
/// against the value at the pointwise limit.  Boundary-reading oracles get
/// the ambient view (an error if the sequence has none).  A value increase
/// beyond [`MONO_TOL`] means the oracle is not monotone and is an error, not
/// a Fatou failure.
pub fn fatou_check(
    u: &dyn UtilityOracle,
    seq: &DecreasingSequence,
    tol: f64,
) -> Result<FatouReport> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "tolerance must be positive"));
    }
    let (terms, limit) = if u.prefers_ambient() {
        match (seq.ambient_terms(), seq.ambient_limit()) {
            (Some(t), Some(l)) => (t, l),
            _ => {
                return Err(Error::param(
                    "seq",
                    "oracle reads the ambient space but the sequence has no ambient view",
                ))
            }
        }
    } else {
        (seq.terms(), seq.limit())
    };
    let values: Vec<f64> = terms.iter().map(|f| u.eval(f)).collect::<Result<_>>()?;
    for (m, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + MONO_TOL {
            return Err(Error::MonotonicityViolation {
                step: m + 1,
                prev: w[0],
                next: w[1],
                tol: MONO_TOL,
            });
        }
    }
    let limit_value = u.eval(limit)?;
    let last = *values.last().expect("sequence has at least one term");
    let gap = last - limit_value;
    Ok(FatouReport {
        values,
        limit_value,
        gap,
        tol,
        pass: gap <= tol,
    })
}

/// One bump probe of the localization run.
#[derive(Debug, Clone)]
pub struct BumpProbe {
    /// 1-based bump index.
    pub n: usize,
    pub radius: f64,
    /// u(−ψ_n).
    pub u_neg_psi: f64,
    /// n / u(−ψ_n) when the bump is active.
    pub coefficient: Option<f64>,
    /// True when u(−ψ_n) ≈ 0: no scenario sees this bump, it contributes
    /// nothing and is skipped.
    pub skipped: bool,
}

/// Partial-sum check: u(g_N) against the divergence bound −N.
#[derive(Debug, Clone)]
pub struct LocalizationPartial {
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct LocalizationReport {
    pub probes: Vec<BumpProbe>,
    pub partials: Vec<LocalizationPartial>,
    /// True when every bump was active and every partial sum met its bound:
    /// the certified divergence u(g_N) → −∞ that forces scenarios to live on
    /// the sampled points.
    pub divergent: bool,
}

/// Scale each bump ψ_n by a_n = n / u(−ψ_n) < 0 and check the partial sums
/// g_N = Σ_{n≤N} a_n ψ_n satisfy u(g_N) ≤ −N (up to [`AXIOM_TOL`]).  Bumps
/// invisible to the utility (u(−ψ_n) ≈ 0) are recorded and skipped.
pub fn support_localization_probe(
    u: &dyn UtilityOracle,
    fam: &BumpFamily,
    n_max: usize,
) -> Result<LocalizationReport> {
    if !u.declared_coherent() {
        return Err(Error::NotCoherent { got: "concave" });
    }
    if n_max == 0 || n_max > fam.len() {
        return Err(Error::param(
            "n_max",
            format!("n_max must be in 1..={}, got {n_max}", fam.len()),
        ));
    }
    let mut probes = Vec::with_capacity(n_max);
    let mut coeffs: Vec<f64> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let psi = fam.psi(n - 1);
        let val = u.eval(&psi.neg())?;
        let skipped = val >= -1e-12;
        let coefficient = if skipped {
            coeffs.push(0.0);
            None
        } else {
            let a = n as f64 / val;
            coeffs.push(a);
            Some(a)
        };
        probes.push(BumpProbe {
            n,
            radius: fam.radius(n - 1),
            u_neg_psi: val,
            coefficient,
            skipped,
        });
    }
    let mut partials = Vec::with_capacity(n_max);
    let mut all_ok = true;
    for n in 1..=n_max {
        let g = bump_sum(fam, &coeffs[..n], n)?;
        let value = u.eval(&g)?;
        let bound = -(n as f64);
        let ok = value <= bound + AXIOM_TOL;
        all_ok &= ok;
        partials.push(LocalizationPartial {
            n,
            value,
            bound,
            ok,
        });
    }
    let divergent = all_ok && probes.iter().all(|p| !p.skipped);
    Ok(LocalizationReport {
        probes,
        partials,
        divergent,
    })
}
