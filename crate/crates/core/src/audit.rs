//! Statement audit: evaluates both sides of every checkable statement on a
//! concrete instance and reports agreement, with witnesses for disagreements.
//!
//! Verdicts are sampled on instances, not proved. A `fail` on an
//! `equivalence` or `implication` entry is a finding about the statement;
//! a `fail` on a `consistency` entry means two computations of the same
//! object disagree.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::{
    check_constant_generalized, check_constant_gphihs, check_dependent_identity, check_phi_gs, classify_ricci,
    conharmonic_flat, constant_generalized_tensor, ghs_value, random_horizontal_vector, PhiGsMode,
};
use crate::curvature::{generalized_components_formula, ricci_formula, CoefficientTriple, CurvatureBundle, SymmetryResiduals};
use crate::error::Result;
use crate::hypersurface::{extract_sigma, HypersurfaceData};
use crate::manifest::{HypersurfaceSection, Manifest, Options};
use crate::structure::StructureData;
use crate::tensor::{delta, make_phi, C64};

/// Number of random horizontal vectors used to sample holomorphic sectional values.
pub const GHS_SAMPLES: usize = 32;
const GHS_SEED: u64 = 0x6768_7321;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// Two computations of the same object.
    Consistency,
    /// Both sides evaluated; pass when they agree.
    Equivalence,
    /// Conclusion checked only where the hypothesis holds.
    Implication,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub kind: EntryKind,
    pub verdict: Verdict,
    pub statement: String,
    pub hypothesis: Option<bool>,
    pub conclusion: Option<bool>,
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub theorem: String,
    /// `forward`: hypothesis holds, conclusion fails. `reverse`: the converse.
    /// `consistency`: two computations disagree.
    pub direction: String,
    pub description: String,
    pub residuals: BTreeMap<String, f64>,
    /// Key into the report's `witnesses` map.
    pub witness: String,
    /// Number of instances showing the same disagreement (batch audits).
    #[serde(default = "one")]
    pub occurrences: usize,
    /// Trial indices of those instances (batch audits).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<usize>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedConstant {
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub coefficients: CoefficientTriple,
    pub tolerance: f64,
    pub flags: BTreeMap<String, bool>,
    pub constants: BTreeMap<String, FittedConstant>,
    pub residuals: BTreeMap<String, f64>,
    pub audit: BTreeMap<String, AuditEntry>,
    pub findings: Vec<Finding>,
    pub witnesses: BTreeMap<String, Value>,
}

impl ClassificationReport {
    pub fn consistency_failures(&self) -> Vec<&str> {
        self.audit
            .iter()
            .filter(|(_, e)| e.kind == EntryKind::Consistency && e.verdict == Verdict::Fail)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

fn max4(n: usize, f: impl Fn(usize, usize, usize, usize) -> C64) -> f64 {
    let mut m = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    m = m.max(f(a, b, c, d).norm());
                }
            }
        }
    }
    m
}

/// Least-squares scalar `t` with `x ≈ t·basis`, and the remaining max deviation.
fn fit_scalar(n: usize, x: impl Fn(usize, usize, usize, usize) -> C64, basis: impl Fn(usize, usize, usize, usize) -> f64) -> (f64, f64) {
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let e = basis(a, b, c, d);
                    num += x(a, b, c, d) * e;
                    den += e * e;
                }
            }
        }
    }
    let t = if den > 0.0 { num.re / den } else { 0.0 };
    let res = max4(n, |a, b, c, d| x(a, b, c, d) - t * basis(a, b, c, d));
    (t, res)
}

/// Part of `x[a,d,b,c]` symmetric in `(a,d)` and in `(b,c)`.
fn sym_pairs(x: impl Fn(usize, usize, usize, usize) -> C64) -> impl Fn(usize, usize, usize, usize) -> C64 {
    move |a, d, b, c| 0.25 * (x(a, d, b, c) + x(d, a, b, c) + x(a, d, c, b) + x(d, a, c, b))
}

fn dtilde(a: usize, d: usize, b: usize, c: usize) -> f64 {
    delta(a, b) * delta(d, c) + delta(a, c) * delta(d, b)
}

/// Everything the audit needs from one instance, computed once.
struct Evaluation<'a> {
    st: &'a StructureData,
    bundle: CurvatureBundle,
    tol: f64,
    n: usize,
    lambda: f64,
    mu: f64,
    eta_einstein: bool,
    eta_fit: f64,
    einstein: bool,
    flat: f64,
    phi_gs: crate::classify::Check,
    phi_gs_components: crate::classify::Check,
    gamma: crate::classify::ConstantFit,
    ghs_spread: f64,
    ghs_mean: f64,
    cg: crate::classify::ConstantGeneralized,
    admissible: bool,
    admissibility_residual: f64,
}

impl<'a> Evaluation<'a> {
    fn new(st: &'a StructureData, coeffs: CoefficientTriple, tol: f64) -> Result<Self> {
        let adm = st.validate_admissible(tol)?;
        let bundle = CurvatureBundle::build(st, coeffs, tol)?;
        let n = st.n;
        let rc = classify_ricci(&bundle.ricci, tol);
        let phi = make_phi(n)?;
        let phi_gs = check_phi_gs(&bundle.g, &phi, tol, PhiGsMode::Contraction);
        let phi_gs_components = check_phi_gs(&bundle.g, &phi, tol, PhiGsMode::Components);
        let gamma = check_constant_gphihs(&bundle.g, tol);
        let mut rng = ChaCha8Rng::seed_from_u64(GHS_SEED);
        let mut values = Vec::with_capacity(GHS_SAMPLES);
        for _ in 0..GHS_SAMPLES {
            let x = random_horizontal_vector(n, &mut rng);
            values.push(ghs_value(&bundle.g, &bundle.metric, &phi, &x, tol)?);
        }
        let mean = values.iter().sum::<C64>() / values.len() as f64;
        let spread = values.iter().fold(mean.im.abs(), |m, v| m.max((v - mean).norm()));
        let cg = check_constant_generalized(&bundle.g, &bundle.metric, tol);
        Ok(Self {
            st,
            n,
            tol,
            lambda: rc.lambda,
            mu: rc.mu,
            eta_einstein: rc.is_eta_einstein,
            eta_fit: rc.eta_einstein_residual.max(rc.phi_invariant_residual),
            einstein: rc.is_einstein,
            flat: bundle.g.max_abs(),
            phi_gs,
            phi_gs_components,
            gamma,
            ghs_spread: spread,
            ghs_mean: mean.re,
            cg,
            admissible: adm.is_admissible(),
            admissibility_residual: adm.max_residual(),
            bundle,
        })
    }

    fn coeffs(&self) -> CoefficientTriple {
        self.bundle.coeffs
    }

    fn nonzero(&self, x: f64) -> bool {
        x.abs() > self.tol
    }

    fn a13_norm(&self) -> f64 {
        self.st.a13.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max |A^{ad}_{bc} − B^{ah}_c B_{bh}^d − t δ^a_c δ^d_b|`.
    fn a22_product_residual(&self, t: f64) -> f64 {
        let s = self.st;
        let n = self.n;
        max4(n, |a, d, b, c| {
            let bb: C64 = (0..n).map(|h| s.b3u[[a, h, c]] * s.b3d[[b, h, d]]).sum();
            s.a22[[a, d, b, c]] - bb - t * delta(a, c) * delta(d, b)
        })
    }

    /// `max |B^{ab}_{[cd]} − t δ^a_{[c} δ^b_{d]}|`.
    fn b22_anti_residual(&self, t: f64) -> f64 {
        let s = self.st;
        max4(self.n, |a, b, c, d| {
            0.5 * (s.b22[[a, b, c, d]] - s.b22[[a, b, d, c]]) - 0.5 * t * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c))
        })
    }

    fn lambda_theorem(&self) -> f64 {
        let c = self.coeffs();
        let n = self.n as f64;
        (c.a0 + 2.0 * n * c.a1 - 2.0 * c.a2 * self.bundle.s) / c.a1
    }

    fn q(&self, x: usize, y: usize) -> C64 {
        self.bundle.q.get(&[1 + x, 1 + y])
    }
}

struct Builder {
    tol: f64,
    entries: BTreeMap<String, AuditEntry>,
}

impl Builder {
    fn consistency(&mut self, id: &str, statement: &str, residuals: &[(&str, f64)]) {
        let ok = residuals.iter().all(|(_, r)| *r <= self.tol);
        self.push(id, EntryKind::Consistency, statement, None, Some(ok), residuals, if ok { Verdict::Pass } else { Verdict::Fail }, None);
    }

    fn equivalence(&mut self, id: &str, statement: &str, gate: Option<&str>, lhs: bool, rhs: bool, residuals: &[(&str, f64)]) {
        if let Some(why) = gate {
            self.push(id, EntryKind::Equivalence, statement, None, None, residuals, Verdict::NotApplicable, Some(why.into()));
            return;
        }
        let v = if lhs == rhs { Verdict::Pass } else { Verdict::Fail };
        let note = (!lhs && !rhs).then(|| "both sides false on this instance".to_string());
        self.push(id, EntryKind::Equivalence, statement, Some(lhs), Some(rhs), residuals, v, note);
    }

    fn implication(&mut self, id: &str, statement: &str, gate: Option<&str>, hyp: bool, concl: bool, residuals: &[(&str, f64)]) {
        if let Some(why) = gate {
            self.push(id, EntryKind::Implication, statement, None, None, residuals, Verdict::NotApplicable, Some(why.into()));
            return;
        }
        if !hyp {
            self.push(id, EntryKind::Implication, statement, Some(false), None, residuals, Verdict::NotApplicable, Some("hypothesis does not hold".into()));
            return;
        }
        let v = if concl { Verdict::Pass } else { Verdict::Fail };
        self.push(id, EntryKind::Implication, statement, Some(true), Some(concl), residuals, v, None);
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        id: &str,
        kind: EntryKind,
        statement: &str,
        hypothesis: Option<bool>,
        conclusion: Option<bool>,
        residuals: &[(&str, f64)],
        verdict: Verdict,
        note: Option<String>,
    ) {
        let residuals = residuals.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        self.entries.insert(
            id.to_string(),
            AuditEntry { kind, verdict, statement: statement.to_string(), hypothesis, conclusion, residuals, note },
        );
    }
}

fn curvature_entries(ev: &Evaluation, b: &mut Builder) -> Result<()> {
    let sym = SymmetryResiduals::of(&ev.bundle.r4);
    b.consistency(
        "2.5",
        "completed Riemann tensor has the curvature symmetries and hat reality",
        &[
            ("last_pair", sym.last_pair),
            ("first_pair", sym.first_pair),
            ("pair_swap", sym.pair_swap),
            ("bianchi", sym.bianchi),
            ("hat_reality", sym.hat_reality),
        ],
    );
    let rf = ricci_formula(ev.st, &ev.bundle.metric)?;
    let ricci_diff = rf.ricci.max_abs_diff(&ev.bundle.ricci)?;
    b.consistency(
        "2.6",
        "closed-form Ricci components equal the contraction of the Riemann tensor",
        &[("formula_vs_contraction", ricci_diff), ("scalar", (rf.s - ev.bundle.s).abs())],
    );
    let gf = generalized_components_formula(ev.st, &ev.bundle.ricci_data(), ev.coeffs(), ev.tol)?;
    b.consistency(
        "3.1",
        "closed-form generalized curvature components equal the defining combination",
        &[("formula_vs_definition", gf.max_abs_diff(&ev.bundle.g)?)],
    );
    Ok(())
}

fn flatness_entries(ev: &Evaluation, b: &mut Builder) {
    let c = ev.coeffs();
    let n = ev.n as f64;
    let s = ev.bundle.s;
    let gate = (!ev.nonzero(c.a0) || !ev.nonzero(c.a1)).then_some("requires a0 != 0 and a1 != 0");
    let flat = ev.flat <= ev.tol;

    let (lam_t, mu_t, t) = if gate.is_none() {
        let lam_t = ev.lambda_theorem();
        let mu_t = -(2.0 * n + lam_t);
        (lam_t, mu_t, c.a1 / c.a0 * mu_t)
    } else {
        (f64::NAN, f64::NAN, 0.0)
    };
    let lam_res = (ev.lambda - lam_t).abs();
    let mu_res = (ev.mu - mu_t).abs();
    let a13 = ev.a13_norm();
    let a22 = ev.a22_product_residual(t);
    let b22 = ev.b22_anti_residual(t);
    let tol = ev.tol;
    let rhs_32 = gate.is_none() && ev.eta_einstein && lam_res <= tol && mu_res <= tol && a13 <= tol && a22 <= tol && b22 <= tol;
    b.equivalence(
        "3.2",
        "flat generalized curvature iff eta-Einstein with prescribed lambda, mu and block conditions on A13, A22, B22",
        gate,
        flat,
        rhs_32,
        &[
            ("flatness", ev.flat),
            ("eta_einstein_fit", ev.eta_fit),
            ("lambda", lam_res),
            ("mu", mu_res),
            ("a13", a13),
            ("a22", a22),
            ("b22_antisymmetric", b22),
        ],
    );

    b.implication(
        "3.8",
        "flat generalized curvature implies Phi-semisymmetry",
        None,
        flat,
        ev.phi_gs.holds && ev.phi_gs_components.holds,
        &[("flatness", ev.flat), ("phi_gs", ev.phi_gs.residual), ("phi_gs_components", ev.phi_gs_components.residual)],
    );

    let mu_39 = if gate.is_none() { -(c.a0 + 4.0 * n * c.a1 - 2.0 * c.a2 * s) / c.a1 } else { 0.0 };
    let a22_39 = ev.a22_product_residual(if gate.is_none() { c.a1 / c.a0 * mu_39 } else { 0.0 });
    let rhs_39 = gate.is_none() && ev.phi_gs.holds && a13 <= tol && a22_39 <= tol;
    b.equivalence(
        "3.9",
        "flat generalized curvature iff Phi-semisymmetric with A13 = 0 and the A22 block condition",
        gate,
        flat,
        rhs_39,
        &[("flatness", ev.flat), ("phi_gs", ev.phi_gs.residual), ("a13", a13), ("a22", a22_39)],
    );

    let rhs_310 = gate.is_none() && ev.eta_einstein && lam_res <= tol && mu_res <= tol && b22 <= tol;
    b.equivalence(
        "3.10",
        "Phi-semisymmetry iff eta-Einstein with prescribed lambda, mu and the B22 antisymmetric condition",
        gate,
        ev.phi_gs.holds,
        rhs_310,
        &[
            ("phi_gs", ev.phi_gs.residual),
            ("eta_einstein_fit", ev.eta_fit),
            ("lambda", lam_res),
            ("mu", mu_res),
            ("b22_antisymmetric", b22),
        ],
    );

    let st = ev.st;
    let nn = ev.n;
    let d311 = |a: usize, d: usize, b: usize, c2: usize| {
        let bb: C64 = (0..nn).map(|h| st.b3d[[h, b, a]] * st.b3u[[d, h, c2]]).sum();
        st.a22[[a, d, b, c2]] + bb - t * delta(a, b) * delta(d, c2)
    };
    let ((g311, a22_311), a22_311_sym) = if gate.is_none() {
        (fit_scalar(nn, d311, dtilde), fit_scalar(nn, sym_pairs(d311), dtilde).1)
    } else {
        ((0.0, f64::NAN), f64::NAN)
    };
    let gamma_311 = 2.0 * c.a0 * g311;
    let rhs_311 = rhs_310 && a22_311 <= tol;
    b.equivalence(
        "3.11",
        "Phi-semisymmetric with constant GPhiHS iff the conditions for Phi-semisymmetry plus an A22 formula in gamma",
        gate,
        ev.phi_gs.holds && ev.ghs_spread <= tol,
        rhs_311,
        &[
            ("phi_gs", ev.phi_gs.residual),
            ("ghs_spread", ev.ghs_spread),
            ("a22", a22_311),
            ("a22_symmetrized", a22_311_sym),
            ("gamma_from_a22", gamma_311),
            ("gamma_sampled", ev.ghs_mean),
        ],
    );
}

fn holomorphic_entries(ev: &Evaluation, b: &mut Builder) {
    let c = ev.coeffs();
    let tol = ev.tol;
    let sampled = ev.ghs_spread <= tol;
    b.equivalence(
        "3.4",
        "constant GPhiHS iff the symmetrized mixed block is proportional to the symmetrized Kronecker tensor",
        None,
        sampled,
        ev.gamma.holds,
        &[
            ("ghs_spread", ev.ghs_spread),
            ("block_fit", ev.gamma.residual),
            ("gamma_fit", ev.gamma.value),
            ("gamma_sampled", ev.ghs_mean),
        ],
    );

    let gate = (!ev.nonzero(c.a0)).then_some("requires a0 != 0");
    let st = ev.st;
    let n = ev.n;
    let s = ev.bundle.s;
    let d35 = |a: usize, d: usize, b2: usize, c2: usize| {
        let anti = 0.5 * (st.b22_low[[b2, c2, a, d]] - st.b22_low[[b2, c2, d, a]]);
        let bb: C64 = (0..n).map(|h| st.b3d[[h, b2, a]] * st.b3u[[d, h, c2]]).sum();
        let sym_q =
            0.25 * (ev.q(d, c2) * delta(a, b2) + ev.q(a, c2) * delta(d, b2) + ev.q(d, b2) * delta(a, c2) + ev.q(a, b2) * delta(d, c2));
        st.a22[[a, d, b2, c2]] - anti + bb + 2.0 * c.a1 / c.a0 * sym_q
    };
    let ((coef, res), res_sym) = if gate.is_none() {
        (fit_scalar(n, d35, dtilde), fit_scalar(n, sym_pairs(d35), dtilde).1)
    } else {
        ((0.0, f64::NAN), f64::NAN)
    };
    let gamma_35 = 2.0 * c.a0 * coef + 2.0 * c.a2 * s - c.a0;
    b.equivalence(
        "3.5",
        "constant GPhiHS iff A22 is given by the stated combination with some gamma",
        gate,
        sampled,
        gate.is_none() && res <= tol,
        &[
            ("ghs_spread", ev.ghs_spread),
            ("a22", res),
            ("a22_symmetrized", res_sym),
            ("gamma_from_a22", gamma_35),
            ("gamma_sampled", ev.ghs_mean),
        ],
    );

    b.equivalence(
        "3.7",
        "Phi-semisymmetry by the listed vanishing components iff by the commutator definition",
        None,
        ev.phi_gs_components.holds,
        ev.phi_gs.holds,
        &[("components", ev.phi_gs_components.residual), ("contraction", ev.phi_gs.residual)],
    );
}

fn constant_entries(ev: &Evaluation, b: &mut Builder) -> Result<()> {
    let c = ev.coeffs();
    let n = ev.n;
    let nf = n as f64;
    let tol = ev.tol;
    let s = ev.bundle.s;
    let g = &ev.bundle.g;

    let kv = (0..n).map(|a| g.get(&[1 + n + a, 0, 1 + a, 0]).re).sum::<f64>() / n as f64;
    let families = constant_generalized_tensor(n, kv, tol)?;
    let fam_res = families.max_abs_diff(g)?;
    b.equivalence(
        "4.3",
        "constant generalized curvature iff the three component families take the kappa values and all else vanishes",
        None,
        ev.cg.holds,
        fam_res <= tol,
        &[
            ("fit", ev.cg.residual),
            ("families", fam_res),
            ("vertical", ev.cg.vertical_residual),
            ("mixed", ev.cg.mixed_residual),
            ("hatted", ev.cg.hatted_residual),
        ],
    );

    let hyp = ev.cg.holds && (ev.cg.kappa - 2.0 * c.a2 * s).abs() <= tol;
    let kflat = conharmonic_flat(&ev.bundle, tol);
    let coeff_cond = (c.a0 - 1.0).abs() <= tol && (c.a1 + 1.0 / (2.0 * nf - 1.0)).abs() <= tol;
    b.equivalence(
        "4.2",
        "with constant generalized curvature 2 a2 s, conharmonic flatness iff a0 = 1 and a1 = -1/(2n-1)",
        (!hyp).then_some("requires constant generalized curvature equal to 2 a2 s"),
        kflat.holds,
        coeff_cond,
        &[("kappa_minus_2a2s", (ev.cg.kappa - 2.0 * c.a2 * s).abs()), ("conharmonic", kflat.residual), ("fit", ev.cg.residual)],
    );

    b.equivalence(
        "4.4",
        "Phi-semisymmetry iff constant generalized curvature with kappa = 0",
        None,
        ev.phi_gs.holds,
        ev.flat <= tol,
        &[("phi_gs", ev.phi_gs.residual), ("flatness", ev.flat)],
    );

    b.implication(
        "4.5",
        "constant generalized curvature kappa implies constant GPhiHS equal to kappa",
        None,
        ev.cg.holds,
        ev.ghs_spread <= tol && (ev.ghs_mean - ev.cg.kappa).abs() <= tol && ev.gamma.holds && (ev.gamma.value - ev.cg.kappa).abs() <= tol,
        &[
            ("fit", ev.cg.residual),
            ("ghs_spread", ev.ghs_spread),
            ("gamma_sampled_minus_kappa", (ev.ghs_mean - ev.cg.kappa).abs()),
            ("gamma_fit_minus_kappa", (ev.gamma.value - ev.cg.kappa).abs()),
        ],
    );

    let gate = (!ev.nonzero(c.a0) || !ev.nonzero(c.a1)).then_some("requires a0 != 0 and a1 != 0");
    let (rhs, kappa_rhs, a22, b22) = if gate.is_none() {
        let mu_t = -(2.0 * nf + ev.lambda);
        let t = c.a1 / c.a0 * mu_t;
        let a22 = ev.a22_product_residual(t);
        let b22 = ev.b22_anti_residual(t);
        let kappa = c.a1 * ev.lambda - c.a0 - 2.0 * nf * c.a1 + 2.0 * c.a2 * s;
        let rhs = ev.eta_einstein && (ev.mu - mu_t).abs() <= tol && ev.a13_norm() <= tol && a22 <= tol && b22 <= tol;
        (rhs, kappa, a22, b22)
    } else {
        (false, f64::NAN, f64::NAN, f64::NAN)
    };
    let kappa_gap = if ev.cg.holds && rhs { (ev.cg.kappa - kappa_rhs).abs() } else { 0.0 };
    b.equivalence(
        "4.6",
        "constant generalized curvature kappa iff eta-Einstein with lambda determined by kappa and block conditions",
        gate,
        ev.cg.holds,
        rhs && kappa_gap <= tol,
        &[
            ("fit", ev.cg.residual),
            ("eta_einstein_fit", ev.eta_fit),
            ("mu", (ev.mu + 2.0 * nf + ev.lambda).abs()),
            ("a13", ev.a13_norm()),
            ("a22", a22),
            ("b22_antisymmetric", b22),
            ("kappa_gap", kappa_gap),
        ],
    );

    let di = check_dependent_identity(&ev.bundle, tol)?;
    let mut res = vec![
        ("identity", di.identity_residual),
        ("alpha_form", di.alpha_form_residual),
        ("scalar_constraint", di.scalar_constraint_residual),
    ];
    if let Some(e) = di.einstein_consequence {
        res.push(("einstein", e));
    }
    if let Some(k) = di.kenmotsu_scalar {
        res.push(("scalar_curvature", k));
    }
    let concl = di.einstein_consequence.is_none_or(|e| e <= tol)
        && di.kenmotsu_scalar.is_none_or(|k| k <= tol)
        && (di.alpha.abs() <= tol || di.scalar_constraint_residual <= tol);
    b.implication(
        "4.7",
        "the dependent-coefficient identity implies Einstein, the scalar constraint and the scalar curvature value",
        None,
        di.holds,
        concl,
        &res,
    );
    Ok(())
}

fn hypersurface_entry(h: &HypersurfaceData, tol: f64, b: &mut Builder) -> Result<()> {
    let ex = extract_sigma(h, tol)?;
    let res: Vec<(&str, f64)> = ex.residuals.iter().map(|r| (r.name.as_str(), r.value)).collect();
    let matching = ex.residuals.iter().filter(|r| r.name != "sigma_symmetry").all(|r| r.value <= tol);
    let symmetric = ex.residuals.iter().find(|r| r.name == "sigma_symmetry").is_some_and(|r| r.value <= tol);
    b.implication(
        "5.4",
        "ambient data satisfying the matching system determine a symmetric second quadratic form",
        None,
        matching,
        symmetric,
        &res,
    );
    Ok(())
}

fn build_report(st: &StructureData, coeffs: CoefficientTriple, tol: f64, hyper: Option<&HypersurfaceData>, audit: bool) -> Result<ClassificationReport> {
    let ev = Evaluation::new(st, coeffs, tol)?;
    let mut flags = BTreeMap::new();
    flags.insert("admissible".to_string(), ev.admissible);
    flags.insert("einstein".to_string(), ev.einstein);
    flags.insert("eta_einstein".to_string(), ev.eta_einstein);
    flags.insert("phi_semisymmetric".to_string(), ev.phi_gs.holds);
    flags.insert("phi_semisymmetric_components".to_string(), ev.phi_gs_components.holds);
    flags.insert("constant_gphihs".to_string(), ev.gamma.holds);
    flags.insert("constant_generalized".to_string(), ev.cg.holds);
    flags.insert("flat_generalized".to_string(), ev.flat <= tol);
    flags.insert("conharmonic_flat".to_string(), conharmonic_flat(&ev.bundle, tol).holds);
    let di = check_dependent_identity(&ev.bundle, tol)?;
    flags.insert("dependent_identity".to_string(), di.holds);

    let mut constants = BTreeMap::new();
    constants.insert("lambda".to_string(), FittedConstant { value: ev.lambda, residual: ev.eta_fit });
    constants.insert("mu".to_string(), FittedConstant { value: ev.mu, residual: ev.eta_fit });
    constants.insert("gamma".to_string(), FittedConstant { value: ev.gamma.value, residual: ev.gamma.residual });
    constants.insert("kappa".to_string(), FittedConstant { value: ev.cg.kappa, residual: ev.cg.residual });
    constants.insert("scalar_curvature".to_string(), FittedConstant { value: ev.bundle.s, residual: 0.0 });

    let mut residuals = BTreeMap::new();
    residuals.insert("admissibility".to_string(), ev.admissibility_residual);
    residuals.insert("flatness".to_string(), ev.flat);
    residuals.insert("phi_semisymmetry".to_string(), ev.phi_gs.residual);
    residuals.insert("phi_semisymmetry_components".to_string(), ev.phi_gs_components.residual);
    residuals.insert("ghs_spread".to_string(), ev.ghs_spread);
    residuals.insert("conharmonic".to_string(), conharmonic_flat(&ev.bundle, tol).residual);
    residuals.insert("dependent_identity".to_string(), di.identity_residual);

    let mut b = Builder { tol, entries: BTreeMap::new() };
    if audit {
        curvature_entries(&ev, &mut b)?;
        flatness_entries(&ev, &mut b);
        holomorphic_entries(&ev, &mut b);
        constant_entries(&ev, &mut b)?;
        if let Some(h) = hyper {
            hypersurface_entry(h, tol, &mut b)?;
        }
    }
    let mut report = ClassificationReport {
        n: st.n,
        coefficients: coeffs,
        tolerance: tol,
        flags,
        constants,
        residuals,
        audit: b.entries,
        findings: Vec::new(),
        witnesses: BTreeMap::new(),
    };
    let findings = findings_from(&report.audit, "instance");
    if !findings.is_empty() {
        let mut m = Manifest::new(st.clone(), coeffs);
        m.options = Options { tolerance: tol, enforce_conjugate_pairs: true };
        m.hypersurface = hyper.map(|h| HypersurfaceSection { data: h.clone(), frame_change: None, curvature: None });
        report.witnesses.insert("instance".to_string(), m.to_json());
    }
    report.findings = findings;
    Ok(report)
}

fn findings_from(audit: &BTreeMap<String, AuditEntry>, witness: &str) -> Vec<Finding> {
    audit
        .iter()
        .filter(|(_, e)| e.verdict == Verdict::Fail)
        .map(|(id, e)| {
            let direction = match (e.kind, e.hypothesis, e.conclusion) {
                (EntryKind::Consistency, _, _) => "consistency",
                (_, Some(true), Some(false)) => "forward",
                _ => "reverse",
            };
            let description = match direction {
                "consistency" => format!("two computations disagree: {}", e.statement),
                "forward" => format!("left side holds but right side fails: {}", e.statement),
                _ => format!("right side holds but left side fails: {}", e.statement),
            };
            Finding {
                theorem: id.clone(),
                direction: direction.to_string(),
                description,
                residuals: e.residuals.clone(),
                witness: witness.to_string(),
                occurrences: 1,
                trials: Vec::new(),
            }
        })
        .collect()
}

/// Flags, fitted constants and residuals without the theorem audit.
pub fn classify_instance(st: &StructureData, coeffs: CoefficientTriple, tol: f64) -> Result<ClassificationReport> {
    build_report(st, coeffs, tol, None, false)
}

/// Full report including the theorem audit and findings.
pub fn audit_theorems(st: &StructureData, coeffs: CoefficientTriple, tol: f64) -> Result<ClassificationReport> {
    build_report(st, coeffs, tol, None, true)
}

/// As [`audit_theorems`], also auditing a hypersurface section.
pub fn audit_with_hypersurface(
    st: &StructureData,
    coeffs: CoefficientTriple,
    tol: f64,
    hyper: Option<&HypersurfaceData>,
) -> Result<ClassificationReport> {
    build_report(st, coeffs, tol, hyper, true)
}

/// Instance families generated by the batch audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Generic admissible instance with generic coefficients.
    Random,
    /// Constant curvature −1 Riemann tensor with generic coefficients.
    ConstantCurvature,
    /// Flat generalized curvature, `k = 0` branch.
    FlatBranchA,
    /// Flat generalized curvature, `a₀ = −(2n−1)a₁` branch.
    FlatBranchB,
    /// Φ-semisymmetric with nonzero generalized curvature.
    PhiSemisymmetricNonflat,
    /// As above with a trace-free `A^a_{bcd}`.
    Twisted,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 6] = [
        InstanceKind::Random,
        InstanceKind::ConstantCurvature,
        InstanceKind::FlatBranchA,
        InstanceKind::FlatBranchB,
        InstanceKind::PhiSemisymmetricNonflat,
        InstanceKind::Twisted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Random => "random",
            InstanceKind::ConstantCurvature => "constant_curvature",
            InstanceKind::FlatBranchA => "flat_branch_a",
            InstanceKind::FlatBranchB => "flat_branch_b",
            InstanceKind::PhiSemisymmetricNonflat => "phi_semisymmetric_nonflat",
            InstanceKind::Twisted => "twisted",
        }
    }
}

fn signed_magnitude(rng: &mut ChaCha8Rng) -> f64 {
    let m = rng.random_range(0.1..2.0);
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Generic coefficients with `|a₀|, |a₁| ≥ 0.1`.
pub fn random_coefficients(rng: &mut ChaCha8Rng) -> CoefficientTriple {
    let a0 = signed_magnitude(rng);
    let a1 = signed_magnitude(rng);
    let a2 = rng.random_range(-2.0..2.0);
    CoefficientTriple::new(a0, a1, a2)
}

/// Parameters `(k, m)` of [`StructureData::eta_einstein_family`] for which the
/// generalized curvature is Φ-semisymmetric; `None` when degenerate.
pub fn phi_semisymmetric_parameters(n: usize, c: CoefficientTriple) -> Option<(f64, f64)> {
    let nf = n as f64;
    let den = c.a1 + 4.0 * nf * c.a2;
    if den.abs() < 1e-3 || c.a0.abs() < 1e-3 {
        return None;
    }
    let lambda = (c.a0 + 2.0 * nf * c.a1 + 4.0 * nf * c.a2) / den;
    let s = -2.0 * nf + 2.0 * nf * lambda;
    let k = (c.a0 - 2.0 * c.a1 * lambda - 2.0 * c.a2 * s) / c.a0;
    let m = (lambda + 2.0 * nf - (2.0 * nf - 1.0) * k) / (nf + 1.0);
    Some((k, m))
}

/// Instance assembled from the flatness conditions for the given
/// coefficients: `λ` solves `a₁λ = a₀ + 2na₁ − 2a₂s` with `s = 2n(λ − 1)`,
/// `μ = −(2n+λ)`, `A^a_{bcd} = 0` and the `A22`, `B22` blocks carry
/// `(a₁/a₀)μ`. Returns the instance and the prescribed `(λ, μ)`; `None` when
/// `a₀ = 0` or `a₁ + 4na₂ = 0`.
pub fn flatness_construction(
    n: usize,
    c: CoefficientTriple,
    seed: u64,
    scale: f64,
) -> Result<Option<(StructureData, f64, f64)>> {
    let nf = n as f64;
    let den = c.a1 + 4.0 * nf * c.a2;
    if c.a0 == 0.0 || den == 0.0 {
        return Ok(None);
    }
    let lambda = (c.a0 + 2.0 * nf * c.a1 + 4.0 * nf * c.a2) / den;
    let mu = -(2.0 * nf + lambda);
    let st = StructureData::eta_einstein(n, seed, scale, c.a1 / c.a0 * mu)?;
    Ok(Some((st, lambda, mu)))
}

/// Instance and coefficients of the given family.
pub fn generate_instance(kind: InstanceKind, n: usize, seed: u64, scale: f64) -> Result<(StructureData, CoefficientTriple)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = random_coefficients(&mut rng);
    let nf = n as f64;
    let st = match kind {
        InstanceKind::Random => StructureData::random_admissible(n, seed, scale)?,
        InstanceKind::ConstantCurvature => StructureData::eta_einstein(n, seed, scale, 0.0)?,
        InstanceKind::FlatBranchA => {
            c.a2 = -(c.a0 + 4.0 * nf * c.a1) / (4.0 * nf * (2.0 * nf + 1.0));
            StructureData::eta_einstein(n, seed, scale, 0.0)?
        }
        InstanceKind::FlatBranchB => {
            c.a0 = -(2.0 * nf - 1.0) * c.a1;
            StructureData::eta_einstein(n, seed, scale, (2.0 * nf + 1.0) / (2.0 * nf - 1.0))?
        }
        InstanceKind::PhiSemisymmetricNonflat | InstanceKind::Twisted => {
            let twist = if kind == InstanceKind::Twisted { 0.5 } else { 0.0 };
            let (k, m) = loop {
                if let Some(p) = phi_semisymmetric_parameters(n, c) {
                    break p;
                }
                c.a2 = rng.random_range(-2.0..2.0);
            };
            StructureData::eta_einstein_family(n, seed, scale, k, m, twist)?
        }
    };
    Ok((st, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub scale: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub not_applicable: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub config: BatchConfig,
    pub instances: usize,
    /// Per theorem id, per instance family.
    pub tallies: BTreeMap<String, BTreeMap<String, Tally>>,
    pub findings: Vec<Finding>,
    pub witnesses: BTreeMap<String, Value>,
    /// Consistency entries that failed, as `trial/kind/id`.
    pub consistency_failures: Vec<String>,
}

impl BatchReport {
    pub fn has_consistency_failures(&self) -> bool {
        !self.consistency_failures.is_empty()
    }
}

/// Audits every instance family over `trials` seeds starting at `seed`.
/// Findings are grouped by theorem, direction and family; the first
/// occurrence of each group is serialized as its witness.
pub fn audit_batch(config: BatchConfig) -> Result<BatchReport> {
    let mut tallies: BTreeMap<String, BTreeMap<String, Tally>> = BTreeMap::new();
    let mut groups: BTreeMap<(String, String, String), Finding> = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    let mut consistency_failures = Vec::new();
    let mut instances = 0;
    for t in 0..config.trials {
        let seed = config.seed.wrapping_add(t as u64);
        for kind in InstanceKind::ALL {
            let (st, coeffs) = generate_instance(kind, config.n, seed, config.scale)?;
            let hyper = (kind == InstanceKind::Random).then(|| HypersurfaceData::consistent(config.n + 1, seed)).transpose()?;
            let ev = Evaluation::new(&st, coeffs, config.tolerance)?;
            let mut b = Builder { tol: config.tolerance, entries: BTreeMap::new() };
            curvature_entries(&ev, &mut b)?;
            flatness_entries(&ev, &mut b);
            holomorphic_entries(&ev, &mut b);
            constant_entries(&ev, &mut b)?;
            if let Some(h) = &hyper {
                hypersurface_entry(h, config.tolerance, &mut b)?;
            }
            instances += 1;
            for (id, e) in &b.entries {
                let tally = tallies.entry(id.clone()).or_default().entry(kind.name().to_string()).or_default();
                match e.verdict {
                    Verdict::Pass => tally.pass += 1,
                    Verdict::Fail => tally.fail += 1,
                    Verdict::NotApplicable => tally.not_applicable += 1,
                }
                if e.kind == EntryKind::Consistency && e.verdict == Verdict::Fail {
                    consistency_failures.push(format!("{t}/{}/{id}", kind.name()));
                }
            }
            let wid = format!("trial-{t}/{}", kind.name());
            for f in findings_from(&b.entries, &wid) {
                let key = (f.theorem.clone(), f.direction.clone(), kind.name().to_string());
                match groups.get_mut(&key) {
                    Some(g) => {
                        g.occurrences += 1;
                        g.trials.push(t);
                    }
                    None => {
                        let mut m = Manifest::new(st.clone(), coeffs);
                        m.options = Options { tolerance: config.tolerance, enforce_conjugate_pairs: true };
                        m.hypersurface = hyper.clone().map(|h| HypersurfaceSection { data: h, frame_change: None, curvature: None });
                        witnesses.insert(wid.clone(), m.to_json());
                        groups.insert(key, Finding { trials: vec![t], ..f });
                    }
                }
            }
        }
    }
    Ok(BatchReport {
        config,
        instances,
        tallies,
        findings: groups.into_values().collect(),
        witnesses,
        consistency_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn verdict(r: &ClassificationReport, id: &str) -> Verdict {
        r.audit[id].verdict
    }

    #[test]
    fn consistency_entries_pass_on_random_instances() {
        for n in 1..=3 {
            let (st, c) = generate_instance(InstanceKind::Random, n, 11, 1.0).unwrap();
            let r = audit_theorems(&st, c, TOL).unwrap();
            assert!(r.consistency_failures().is_empty(), "{:?}", r.consistency_failures());
        }
    }

    #[test]
    fn flat_constructions_are_flat_and_pass_the_flatness_criterion() {
        for n in 1..=3 {
            for kind in [InstanceKind::FlatBranchA, InstanceKind::FlatBranchB] {
                let (st, c) = generate_instance(kind, n, 3, 1.0).unwrap();
                let r = audit_theorems(&st, c, TOL).unwrap();
                assert!(r.flags["flat_generalized"], "{kind:?} n={n}: {}", r.residuals["flatness"]);
                assert_eq!(verdict(&r, "3.2"), Verdict::Pass, "{kind:?} n={n}: {:?}", r.audit["3.2"]);
                assert_eq!(verdict(&r, "3.8"), Verdict::Pass);
            }
        }
    }

    #[test]
    fn flatness_construction_is_flat_only_on_feasible_branches() {
        let n = 2;
        let nf = n as f64;
        let a1 = 0.7;
        for (c, flat) in [
            (CoefficientTriple::new(1.3, a1, -(1.3 + 4.0 * nf * a1) / (4.0 * nf * (2.0 * nf + 1.0))), true),
            (CoefficientTriple::new(-(2.0 * nf - 1.0) * a1, a1, 0.4), true),
            (CoefficientTriple::new(1.3, a1, 0.4), false),
        ] {
            let (st, lambda, _) = flatness_construction(n, c, 1, 1.0).unwrap().unwrap();
            let r = classify_instance(&st, c, TOL).unwrap();
            assert_eq!(r.flags["flat_generalized"], flat, "{c:?}");
            assert_eq!((r.constants["lambda"].value - lambda).abs() < TOL, flat, "{c:?}");
        }
    }

    #[test]
    fn constant_curvature_instance_has_predicted_kappa() {
        let n = 2;
        let (st, c) = generate_instance(InstanceKind::ConstantCurvature, n, 5, 1.0).unwrap();
        let r = audit_theorems(&st, c, TOL).unwrap();
        assert!(r.flags["constant_generalized"]);
        let s = -2.0 * n as f64 * (2 * n + 1) as f64;
        let want = -c.a0 - 4.0 * n as f64 * c.a1 + 2.0 * c.a2 * s;
        assert!((r.constants["kappa"].value - want).abs() < 1e-9);
        assert_eq!(verdict(&r, "4.5"), Verdict::Pass);
        assert_eq!(verdict(&r, "4.6"), Verdict::Pass);
    }

    #[test]
    fn phi_semisymmetric_nonflat_instance_is_not_flat() {
        for n in 1..=3 {
            let (st, c) = generate_instance(InstanceKind::PhiSemisymmetricNonflat, n, 8, 1.0).unwrap();
            let r = audit_theorems(&st, c, TOL).unwrap();
            assert!(r.flags["phi_semisymmetric"], "n={n}: {}", r.residuals["phi_semisymmetry"]);
            assert!(!r.flags["flat_generalized"]);
            assert_eq!(verdict(&r, "4.4"), Verdict::Fail);
            assert!(r.findings.iter().any(|f| f.theorem == "4.4" && f.direction == "forward"));
            assert!(r.witnesses.contains_key("instance"));
        }
    }

    #[test]
    fn twisted_instance_separates_component_and_commutator_forms() {
        let (st, c) = generate_instance(InstanceKind::Twisted, 2, 8, 1.0).unwrap();
        let r = audit_theorems(&st, c, TOL).unwrap();
        assert!(r.flags["phi_semisymmetric_components"]);
        assert!(!r.flags["phi_semisymmetric"]);
        assert_eq!(verdict(&r, "3.7"), Verdict::Fail);
    }

    #[test]
    fn coefficient_gate_gives_not_applicable() {
        let (st, _) = generate_instance(InstanceKind::Random, 2, 1, 1.0).unwrap();
        let r = audit_theorems(&st, CoefficientTriple::new(0.0, 1.0, 0.0), TOL).unwrap();
        assert_eq!(verdict(&r, "3.2"), Verdict::NotApplicable);
        assert_eq!(verdict(&r, "3.5"), Verdict::NotApplicable);
    }

    #[test]
    fn witness_reproduces_the_report() {
        let (st, c) = generate_instance(InstanceKind::PhiSemisymmetricNonflat, 2, 2, 1.0).unwrap();
        let r = audit_theorems(&st, c, TOL).unwrap();
        let m = Manifest::from_json_str(&r.witnesses["instance"].to_string()).unwrap();
        let again = audit_theorems(&m.structure, m.coefficients, m.options.tolerance).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn batch_is_deterministic() {
        let cfg = BatchConfig { n: 2, trials: 3, seed: 42, scale: 0.5, tolerance: TOL };
        let a = serde_json::to_string(&audit_batch(cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&audit_batch(cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_round_trips_through_json() {
        let (st, c) = generate_instance(InstanceKind::Twisted, 2, 4, 1.0).unwrap();
        let r = audit_theorems(&st, c, TOL).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: ClassificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
