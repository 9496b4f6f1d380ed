//! Classification of curvature data: η-Einstein fits, Φ-semisymmetry,
//! holomorphic sectional curvature and constant generalized curvature.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{complete_lowered, metric_block, ricci_metric_block, CurvatureBundle};
use crate::error::{Error, Result};
use crate::tensor::{apply, delta, hat, ComponentTensor, Frame, Metric, C64};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Result of fitting `r = λ g + μ η⊗η`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciClassification {
    pub is_einstein: bool,
    pub is_eta_einstein: bool,
    pub is_phi_invariant: bool,
    pub lambda: f64,
    pub mu: f64,
    /// Largest `|r_{ab}|`, `|r_{a0}|` (and conjugates).
    pub phi_invariant_residual: f64,
    /// Largest deviation of `r_{âb}` from `λ δ^a_b`, including `Im λ`.
    pub eta_einstein_residual: f64,
}

pub fn classify_ricci(ricci: &ComponentTensor, tol: f64) -> RicciClassification {
    let n = ricci.n();
    let f = Frame::new(n);
    let mut phi_res = 0.0f64;
    let mut diag = C64::new(0.0, 0.0);
    for a in 0..n {
        phi_res = phi_res
            .max(ricci.get(&[f.l(a), 0]).norm())
            .max(ricci.get(&[f.h(a), 0]).norm())
            .max(ricci.get(&[0, f.l(a)]).norm())
            .max(ricci.get(&[0, f.h(a)]).norm());
        for b in 0..n {
            phi_res = phi_res
                .max(ricci.get(&[f.l(a), f.l(b)]).norm())
                .max(ricci.get(&[f.h(a), f.h(b)]).norm());
        }
        diag += ricci.get(&[f.h(a), f.l(a)]);
    }
    let lambda_c = diag / n as f64;
    let mut fit = lambda_c.im.abs();
    for a in 0..n {
        for b in 0..n {
            let want = lambda_c * delta(a, b);
            fit = fit
                .max((ricci.get(&[f.h(a), f.l(b)]) - want).norm())
                .max((ricci.get(&[f.l(b), f.h(a)]) - want).norm());
        }
    }
    let r00 = ricci.get(&[0, 0]);
    fit = fit.max(r00.im.abs());
    let lambda = lambda_c.re;
    let mu = r00.re - lambda;
    let is_phi_invariant = phi_res <= tol;
    let is_eta_einstein = is_phi_invariant && fit <= tol;
    RicciClassification {
        is_einstein: is_eta_einstein && mu.abs() <= tol,
        is_eta_einstein,
        is_phi_invariant,
        lambda,
        mu,
        phi_invariant_residual: phi_res,
        eta_einstein_residual: fit,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiGsMode {
    /// The seven component families (and conjugates) that must vanish.
    Components,
    /// `G_{iqkl} Φ^q_j + G_{tjkl} Φ^t_i = 0` over every tuple.
    Contraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
}

/// Index tuples probed by the component form of the Φ-semisymmetry test.
pub fn phi_gs_component_tuples(n: usize) -> Vec<[usize; 4]> {
    let f = Frame::new(n);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            out.push([f.l(a), 0, f.l(b), 0]);
            out.push([f.h(a), 0, f.l(b), 0]);
            for c in 0..n {
                out.push([f.l(a), 0, f.l(b), f.l(c)]);
                out.push([f.h(a), 0, f.l(b), f.l(c)]);
                out.push([f.l(a), 0, f.h(b), f.l(c)]);
                for d in 0..n {
                    out.push([f.l(a), f.l(b), f.l(c), f.l(d)]);
                    out.push([f.h(a), f.h(b), f.l(c), f.l(d)]);
                }
            }
        }
    }
    let conj: Vec<[usize; 4]> = out.iter().map(|t| t.map(|i| hat(i, n))).collect();
    out.extend(conj);
    out
}

pub fn check_phi_gs(g: &ComponentTensor, phi: &ComponentTensor, tol: f64, mode: PhiGsMode) -> Check {
    let residual = match mode {
        PhiGsMode::Components => phi_gs_component_tuples(g.n())
            .iter()
            .fold(0.0f64, |m, t| m.max(g.get(t).norm())),
        PhiGsMode::Contraction => {
            let d = g.dim();
            let mut worst = 0.0f64;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let mut acc = C64::new(0.0, 0.0);
                            for q in 0..d {
                                acc += g.get(&[i, q, k, l]) * phi.get(&[q, j]) + g.get(&[q, j, k, l]) * phi.get(&[q, i]);
                            }
                            worst = worst.max(acc.norm());
                        }
                    }
                }
            }
            worst
        }
    };
    Check {
        holds: residual <= tol,
        residual,
    }
}

/// Holomorphic sectional value `G(ΦX, X, ΦX, X) / g(X, X)²` for `X ∈ ker η`.
pub fn ghs_value(g: &ComponentTensor, metric: &Metric, phi: &ComponentTensor, x: &[C64], tol: f64) -> Result<C64> {
    let d = g.dim();
    if x.len() != d {
        return Err(Error::InvalidVector(format!("expected {d} components, got {}", x.len())));
    }
    if x[0].norm() > tol {
        return Err(Error::InvalidVector("vertical component must vanish".into()));
    }
    let gxx = metric.inner(x, x);
    if gxx.im.abs() > tol || gxx.re <= tol {
        return Err(Error::InvalidVector(format!("g(X, X) = {gxx} is not positive")));
    }
    let px = apply(phi, x);
    let mut num = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            let w = px[i] * x[j];
            if w.norm() == 0.0 {
                continue;
            }
            for k in 0..d {
                for l in 0..d {
                    num += g.get(&[i, j, k, l]) * w * px[k] * x[l];
                }
            }
        }
    }
    Ok(num / (gxx * gxx))
}

/// Random hat-real unit vector in `ker η`.
pub fn random_horizontal_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    let f = Frame::new(n);
    let mut x = vec![C64::new(0.0, 0.0); 2 * n + 1];
    let mut norm2 = 0.0;
    for a in 0..n {
        let v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        x[f.l(a)] = v;
        x[f.h(a)] = v.conj();
        norm2 += 2.0 * v.norm_sqr();
    }
    if norm2 == 0.0 {
        x[f.l(0)] = re(1.0);
        x[f.h(0)] = re(1.0);
        norm2 = 2.0;
    }
    let s = norm2.sqrt();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// A fitted constant with its fit residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    pub holds: bool,
    pub value: f64,
    pub residual: f64,
}

/// Symmetrized `G_{âbcd̂}` block indexed `[a,d,b,c]` and `δ̃^{ad}_{bc}`.
fn holomorphic_block(g: &ComponentTensor) -> (Vec<C64>, Vec<f64>) {
    let n = g.n();
    let f = Frame::new(n);
    let at = |a: usize, d: usize, b: usize, c: usize| g.get(&[f.h(a), f.l(b), f.l(c), f.h(d)]);
    let mut ks = Vec::with_capacity(n.pow(4));
    let mut dt = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for d in 0..n {
            for b in 0..n {
                for c in 0..n {
                    ks.push(0.25 * (at(a, d, b, c) + at(d, a, b, c) + at(a, d, c, b) + at(d, a, c, b)));
                    dt.push(delta(a, b) * delta(d, c) + delta(a, c) * delta(d, b));
                }
            }
        }
    }
    (ks, dt)
}

/// Fits `γ` in `G^{(ad)}_{(bc)} = (γ/2) δ̃^{ad}_{bc}` with `G^{ad}_{bc} := G_{âbcd̂}`.
pub fn check_constant_gphihs(g: &ComponentTensor, tol: f64) -> ConstantFit {
    let (ks, dt) = holomorphic_block(g);
    let num: C64 = ks.iter().zip(&dt).map(|(k, d)| k * d).sum();
    let den: f64 = dt.iter().map(|d| d * d).sum();
    let gamma = 2.0 * num.re / den;
    let residual = ks
        .iter()
        .zip(&dt)
        .fold(num.im.abs() / den, |m, (k, d)| m.max((k - 0.5 * gamma * d).norm()));
    ConstantFit {
        holds: residual <= tol,
        value: gamma,
        residual,
    }
}

/// Constant generalized curvature fit together with the per-family view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantGeneralized {
    pub holds: bool,
    pub kappa: f64,
    pub residual: f64,
    /// `G_{â0b0} − κ δ^a_b`.
    pub vertical_residual: f64,
    /// `G_{âbcd̂} − κ δ^a_c δ^d_b`.
    pub mixed_residual: f64,
    /// `G_{âb̂cd} − 2κ δ^a_{[c} δ^b_{d]}`.
    pub hatted_residual: f64,
}

pub fn check_constant_generalized(g: &ComponentTensor, metric: &Metric, tol: f64) -> ConstantGeneralized {
    let f = metric_block(metric);
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (gv, fv) in g.data().iter().zip(f.data().iter()) {
        num += gv * fv.re;
        den += fv.re * fv.re;
    }
    let kappa = num.re / den;
    let residual = g
        .data()
        .iter()
        .zip(f.data().iter())
        .fold(num.im.abs() / den, |m, (gv, fv)| m.max((gv - kappa * fv).norm()));
    let n = g.n();
    let fr = Frame::new(n);
    let (mut v, mut m, mut h) = (0.0f64, 0.0f64, 0.0f64);
    for a in 0..n {
        for b in 0..n {
            v = v.max((g.get(&[fr.h(a), 0, fr.l(b), 0]) - kappa * delta(a, b)).norm());
            for c in 0..n {
                for d in 0..n {
                    let mixed = kappa * delta(a, c) * delta(d, b);
                    m = m.max((g.get(&[fr.h(a), fr.l(b), fr.l(c), fr.h(d)]) - mixed).norm());
                    let hatted = kappa * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
                    h = h.max((g.get(&[fr.h(a), fr.h(b), fr.l(c), fr.l(d)]) - hatted).norm());
                }
            }
        }
    }
    ConstantGeneralized {
        holds: residual <= tol,
        kappa,
        residual,
        vertical_residual: v,
        mixed_residual: m,
        hatted_residual: h,
    }
}

/// Tensor assembled from the three component families of constant
/// generalized curvature `κ`, completed by symmetry and conjugation.
pub fn constant_generalized_tensor(n: usize, kappa: f64, tol: f64) -> Result<ComponentTensor> {
    let f = Frame::new(n);
    let mut seeds = Vec::new();
    for a in 0..n {
        for b in 0..n {
            seeds.push(([f.h(a), 0, f.l(b), 0], re(kappa * delta(a, b))));
            for c in 0..n {
                for d in 0..n {
                    seeds.push(([f.h(a), f.l(b), f.l(c), f.h(d)], re(kappa * delta(a, c) * delta(d, b))));
                    let hh = kappa * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
                    seeds.push(([f.h(a), f.h(b), f.l(c), f.l(d)], re(hh)));
                }
            }
        }
    }
    complete_lowered(n, &seeds, tol)
}

/// Evaluation of `G = (a₀/3){P(X,Y,Z,W) − P(Y,X,Z,W) + C}` and its consequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependentIdentity {
    pub alpha: f64,
    pub beta: f64,
    /// `max |G − (a₀/3)(P − Pᵀ¹² + C)|`.
    pub identity_residual: f64,
    /// `max |α E + β s F|`.
    pub alpha_form_residual: f64,
    pub holds: bool,
    /// `max |r − (−(α+2nβ)s/((2n−1)α)) g|`, when the identity holds and `α ≠ 0`.
    pub einstein_consequence: Option<f64>,
    /// `|a₀ + 4n a₁ + 4n(2n+1) a₂|`.
    pub scalar_constraint_residual: f64,
    /// `|s − 2n(2n−1)α/(α+2nβ)|`, when the identity holds and `α+2nβ ≠ 0`.
    pub kenmotsu_scalar: Option<f64>,
}

pub fn check_dependent_identity(b: &CurvatureBundle, tol: f64) -> Result<DependentIdentity> {
    let n = b.n as f64;
    let c = b.coeffs;
    let alpha = c.a1 + c.a0 / (6.0 * n);
    let beta = 2.0 * c.a2 + c.a0 / (6.0 * n * (2.0 * n + 1.0));
    let pt = b.p.permuted(&[1, 0, 2, 3]);
    let rhs = b.p.sub(&pt)?.add(&b.c)?.scaled(re(c.a0 / 3.0));
    let identity_residual = b.g.sub(&rhs)?.max_abs();
    let e = ricci_metric_block(&b.metric, &b.ricci);
    let fm = metric_block(&b.metric);
    let alpha_form_residual = e.scaled(re(alpha)).add(&fm.scaled(re(beta * b.s)))?.max_abs();
    let holds = identity_residual <= tol;
    let einstein_consequence = (holds && alpha.abs() > tol).then(|| {
        let factor = -(alpha + 2.0 * n * beta) * b.s / ((2.0 * n - 1.0) * alpha);
        b.ricci
            .sub(&b.metric.g.scaled(re(factor)))
            .map(|t| t.max_abs())
            .unwrap_or(f64::INFINITY)
    });
    let kenmotsu_scalar = (holds && (alpha + 2.0 * n * beta).abs() > tol)
        .then(|| (b.s - 2.0 * n * (2.0 * n - 1.0) * alpha / (alpha + 2.0 * n * beta)).abs());
    Ok(DependentIdentity {
        alpha,
        beta,
        identity_residual,
        alpha_form_residual,
        holds,
        einstein_consequence,
        scalar_constraint_residual: c.scalar_constraint(b.n).abs(),
        kenmotsu_scalar,
    })
}

/// Whether the conharmonic tensor of the bundle vanishes.
pub fn conharmonic_flat(b: &CurvatureBundle, tol: f64) -> Check {
    let residual = b.k.max_abs();
    Check {
        holds: residual <= tol,
        residual,
    }
}
