//! Hypersurfaces of Hermitian manifolds: product complex structure, second
//! quadratic form from the Cartan structure equations, and curvature transport.
//!
//! Ambient indices are 0-based `0..n`; the last one (`n−1`) is the
//! distinguished normal index, the first `n−1` are the hypersurface Latin
//! indices.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::structure::Residual;
use crate::tensor::{apply, delta, make_metric, make_phi, Frame, C64, I};

fn max_abs2(x: &Array2<C64>) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Ambient structure components and second-quadratic-form input.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceData {
    /// Ambient complex dimension.
    pub n: usize,
    /// `B^{αβ}_γ`, indexed `[α,β,γ]`.
    pub b_up: Array3<C64>,
    /// `B_{αβ}^γ`, indexed `[α,β,γ]`.
    pub b_low: Array3<C64>,
    /// `B^n_{nb}`, indexed `[b]`.
    pub b_n_nb: Array1<C64>,
    /// `B_n^{nb}`, indexed `[b]`.
    pub b_n_nb_low: Array1<C64>,
    /// Hypersurface `B^{ab}_c`, when known.
    pub kenmotsu_b3u: Option<Array3<C64>>,
    /// `σ^{ab}`, when supplied; otherwise solved from its defining relation.
    pub sigma_uu: Option<Array2<C64>>,
}

impl HypersurfaceData {
    pub fn latin(&self) -> usize {
        self.n - 1
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Err(Error::ShapeMismatch("ambient dimension must be at least 2".into()));
        }
        let m = n - 1;
        let bad = |name: &str, want: &[usize], got: &[usize]| {
            Error::ShapeMismatch(format!("{name}: expected {want:?}, got {got:?}"))
        };
        for (name, a) in [("b_up", &self.b_up), ("b_low", &self.b_low)] {
            if a.shape() != [n, n, n] {
                return Err(bad(name, &[n, n, n], a.shape()));
            }
        }
        for (name, a) in [("b_n_nb", &self.b_n_nb), ("b_n_nb_low", &self.b_n_nb_low)] {
            if a.shape() != [m] {
                return Err(bad(name, &[m], a.shape()));
            }
        }
        if let Some(k) = &self.kenmotsu_b3u {
            if k.shape() != [m, m, m] {
                return Err(bad("kenmotsu_b3u", &[m, m, m], k.shape()));
            }
        }
        if let Some(s) = &self.sigma_uu {
            if s.shape() != [m, m] {
                return Err(bad("sigma_uu", &[m, m], s.shape()));
            }
        }
        Ok(())
    }

    /// All ambient components zero.
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ShapeMismatch("ambient dimension must be at least 2".into()));
        }
        Ok(Self {
            n,
            b_up: Array3::zeros((n, n, n)),
            b_low: Array3::zeros((n, n, n)),
            b_n_nb: Array1::zeros(n - 1),
            b_n_nb_low: Array1::zeros(n - 1),
            kenmotsu_b3u: None,
            sigma_uu: None,
        })
    }

    /// Random ambient data for which every matching relation holds:
    /// `B^{na}_b = δ/√2 + K` with `K` anti-Hermitian, `B^{an}_b = −B^{na}_b`,
    /// `B^{ab}_n = 0`, `B^n_{nb} = 0`, lower family conjugate.
    pub fn consistent(n: usize, seed: u64) -> Result<Self> {
        let mut h = Self::zeros(n)?;
        let m = n - 1;
        let nn = n - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let raw = Array2::from_shape_simple_fn((m, m), &mut c);
        let k = Array2::from_shape_fn((m, m), |(a, b)| 0.5 * (raw[[a, b]] - raw[[b, a]].conj()));
        let raw3 = Array3::from_shape_simple_fn((m, m, m), &mut c);
        for a in 0..m {
            for b in 0..m {
                let x = C64::new(delta(a, b) / SQRT_2, 0.0) + k[[a, b]];
                h.b_up[[nn, a, b]] = x;
                h.b_up[[a, nn, b]] = -x;
                for cc in 0..m {
                    h.b_up[[a, b, cc]] = 0.5 * (raw3[[a, b, cc]] - raw3[[b, a, cc]]);
                }
            }
        }
        h.b_low = h.b_up.mapv(|v| v.conj());
        h.kenmotsu_b3u = Some(h.b_up.slice(ndarray::s![..m, ..m, ..m]).to_owned());
        Ok(h)
    }
}

/// Components of the second quadratic form produced by the matching.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaComponents {
    /// `σ^a_b`, indexed `[a,b]`.
    pub sigma_ud: Array2<C64>,
    /// `σ_a^b`, indexed `[a,b]`.
    pub sigma_du: Array2<C64>,
    /// `σ^{ab}`.
    pub sigma_uu: Array2<C64>,
    /// `σ_{ab}`.
    pub sigma_dd: Array2<C64>,
    /// `σ_{nb}`.
    pub sigma_nd: Array1<C64>,
    /// `σ_n^b`.
    pub sigma_nu: Array1<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaExtraction {
    pub sigma: SigmaComponents,
    /// `r1`..`r9` in the order of the matching system, then `sigma_symmetry`.
    pub residuals: Vec<Residual>,
    pub consistent: bool,
}

/// Assigns the second quadratic form and checks every matching relation.
pub fn extract_sigma(h: &HypersurfaceData, tol: f64) -> Result<SigmaExtraction> {
    h.check_shapes()?;
    let m = h.latin();
    let nn = h.n - 1;
    let sigma_ud = Array2::from_shape_fn((m, m), |(a, b)| I * (SQRT_2 * h.b_up[[a, nn, b]] + delta(a, b)));
    let sigma_du = sigma_ud.mapv(|v| v.conj());
    let sigma_dd: Array2<C64> = Array2::zeros((m, m));
    let sigma_nd: Array1<C64> = Array1::zeros(m);
    let sigma_nu: Array1<C64> = Array1::zeros(m);
    let sigma_uu = h
        .sigma_uu
        .clone()
        .unwrap_or_else(|| Array2::from_shape_fn((m, m), |(a, b)| h.b_up[[a, b, nn]] / (I * SQRT_2)));

    let mut residuals = Vec::new();
    let mut push = |name: &str, value: f64| {
        residuals.push(Residual {
            name: name.into(),
            value,
        })
    };
    let kb = h.kenmotsu_b3u.as_ref();
    let r1 = kb.map_or(0.0, |k| {
        k.indexed_iter().fold(0.0f64, |acc, ((a, b, c), v)| acc.max((h.b_up[[a, b, c]] - v).norm()))
    });
    push("r1", r1);
    push(
        "r2",
        max_abs2(&Array2::from_shape_fn((m, m), |(a, b)| {
            SQRT_2 * h.b_up[[a, nn, b]] + I * sigma_ud[[a, b]] + delta(a, b)
        })),
    );
    push(
        "r3",
        max_abs2(&Array2::from_shape_fn((m, m), |(a, b)| {
            I * sigma_uu[[a, b]] - h.b_up[[a, b, nn]] / SQRT_2
        })),
    );
    let r4 = kb.map_or(0.0, |k| {
        k.indexed_iter()
            .fold(0.0f64, |acc, ((a, b, c), v)| acc.max((h.b_low[[a, b, c]] - v.conj()).norm()))
    });
    push("r4", r4);
    push(
        "r5",
        max_abs2(&Array2::from_shape_fn((m, m), |(a, b)| {
            SQRT_2 * h.b_low[[a, nn, b]] - I * sigma_du[[a, b]] + delta(a, b)
        })),
    );
    push(
        "r6",
        max_abs2(&Array2::from_shape_fn((m, m), |(a, b)| {
            I * sigma_dd[[a, b]] + h.b_low[[a, b, nn]] / SQRT_2
        })),
    );
    push(
        "r7",
        max_abs2(&Array2::from_shape_fn((m, m), |(a, b)| {
            SQRT_2 * h.b_up[[nn, a, b]] - SQRT_2 * h.b_low[[nn, b, a]] - 2.0 * I * sigma_ud[[a, b]]
        })),
    );
    push(
        "r8",
        (0..m).fold(0.0f64, |acc, b| acc.max((h.b_n_nb[b] + I * sigma_nd[b]).norm())),
    );
    push(
        "r9",
        (0..m).fold(0.0f64, |acc, b| acc.max((h.b_n_nb_low[b] - I * sigma_nu[b]).norm())),
    );
    push(
        "sigma_symmetry",
        max_abs2(&Array2::from_shape_fn((m, m), |(a, b)| sigma_uu[[a, b]] - sigma_uu[[b, a]])),
    );
    let consistent = residuals.iter().all(|r| r.value <= tol);
    Ok(SigmaExtraction {
        sigma: SigmaComponents {
            sigma_ud,
            sigma_du,
            sigma_uu,
            sigma_dd,
            sigma_nd,
            sigma_nu,
        },
        residuals,
        consistent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CartanKind {
    Hermitian,
    Kenmotsu,
}

/// One 2-form term of a structure equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanTerm {
    /// `dω^a`, `dω_a` or `dω`.
    pub form: String,
    pub wedge: String,
    pub coefficient: String,
}

fn term(form: &str, wedge: &str, coefficient: &str) -> CartanTerm {
    CartanTerm {
        form: form.into(),
        wedge: wedge.into(),
        coefficient: coefficient.into(),
    }
}

/// First group of structure equations, coefficient by coefficient.
/// Hypersurface-intrinsic quantities carry the suffix `[K]`.
pub fn cartan_coefficients(kind: CartanKind) -> Vec<CartanTerm> {
    match kind {
        CartanKind::Hermitian => vec![
            term("dω^a", "ω^a_b∧ω^b", "1"),
            term("dω^a", "ω^c∧ω_b", "B^{ab}_{c}"),
            term("dω^a", "ω^b∧ω", "sqrt2*B^{an}_{b} + i*sigma^{a}_{b}"),
            term("dω^a", "ω_b∧ω", "i*sigma^{ab} - (1/sqrt2)*B^{ab}_{n}"),
            term("dω_a", "ω_a^b∧ω_b", "-1"),
            term("dω_a", "ω_c∧ω^b", "B_{ab}^{c}"),
            term("dω_a", "ω_b∧ω", "sqrt2*B_{an}^{b} - i*sigma_{a}^{b}"),
            term("dω_a", "ω^b∧ω", "-(i*sigma_{ab} + (1/sqrt2)*B_{ab}^{n})"),
            term("dω", "ω^b∧ω_a", "sqrt2*B^{na}_{b} - sqrt2*B_{nb}^{a} - 2i*sigma^{a}_{b}"),
            term("dω", "ω∧ω^b", "B^{n}_{nb} + i*sigma_{nb}"),
            term("dω", "ω∧ω_b", "B_{n}^{nb} - i*sigma_{n}^{b}"),
        ],
        CartanKind::Kenmotsu => vec![
            term("dω^a", "ω^a_b∧ω^b", "1"),
            term("dω^a", "ω^c∧ω_b", "B^{ab}_{c}[K]"),
            term("dω^a", "ω^b∧ω", "-delta^{a}_{b}"),
            term("dω_a", "ω_a^b∧ω_b", "-1"),
            term("dω_a", "ω_c∧ω^b", "B_{ab}^{c}[K]"),
            term("dω_a", "ω_b∧ω", "-delta_{a}^{b}"),
        ],
    }
}

/// Equations obtained by matching two coefficient tables term by term.
/// Terms with identical coefficients on both sides produce no equation.
pub fn equate_tables(lhs: &[CartanTerm], rhs: &[CartanTerm]) -> Vec<String> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for t in lhs.iter().chain(rhs) {
        let k = (t.form.as_str(), t.wedge.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let lookup = |table: &[CartanTerm], k: (&str, &str)| {
        table
            .iter()
            .find(|t| t.form == k.0 && t.wedge == k.1)
            .map_or("0".to_string(), |t| t.coefficient.clone())
    };
    keys.into_iter()
        .filter_map(|k| {
            let l = lookup(lhs, k);
            let r = lookup(rhs, k);
            if l == r {
                return None;
            }
            if r == "0" {
                if let Some(inner) = l.strip_prefix("-(").and_then(|s| s.strip_suffix(')')) {
                    return Some(format!("{inner} = 0"));
                }
            }
            Some(format!("{l} = {r}"))
        })
        .collect()
}

/// Matching system between a Hermitian ambient and a Kenmotsu-type
/// hypersurface, as hand-written equations.
pub const MATCHING_SYSTEM: [&str; 9] = [
    "B^{ab}_{c} = B^{ab}_{c}[K]",
    "sqrt2*B^{an}_{b} + i*sigma^{a}_{b} = -delta^{a}_{b}",
    "i*sigma^{ab} - (1/sqrt2)*B^{ab}_{n} = 0",
    "B_{ab}^{c} = B_{ab}^{c}[K]",
    "sqrt2*B_{an}^{b} - i*sigma_{a}^{b} = -delta_{a}^{b}",
    "i*sigma_{ab} + (1/sqrt2)*B_{ab}^{n} = 0",
    "sqrt2*B^{na}_{b} - sqrt2*B_{nb}^{a} - 2i*sigma^{a}_{b} = 0",
    "B^{n}_{nb} + i*sigma_{nb} = 0",
    "B_{n}^{nb} - i*sigma_{n}^{b} = 0",
];

/// Invertible frame change `C` with its inverse `C̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameChange {
    pub cmat: DMatrix<C64>,
    pub cinv: DMatrix<C64>,
}

impl FrameChange {
    pub fn new(cmat: DMatrix<C64>) -> Result<Self> {
        if !cmat.is_square() {
            return Err(Error::ShapeMismatch(format!("frame change is {}x{}", cmat.nrows(), cmat.ncols())));
        }
        let cinv = cmat.clone().try_inverse().ok_or(Error::SingularFrameChange)?;
        if !cinv.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::SingularFrameChange);
        }
        Ok(Self { cmat, cinv })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            cmat: DMatrix::identity(dim, dim),
            cinv: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.cmat.nrows()
    }

    /// The frame change going the other way.
    pub fn inverse(&self) -> Self {
        Self {
            cmat: self.cinv.clone(),
            cinv: self.cmat.clone(),
        }
    }

    /// Transport by `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            cmat: &self.cmat * &next.cmat,
            cinv: &next.cinv * &self.cinv,
        }
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.cmat.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `max |C C̃ − I|`.
    pub fn inverse_residual(&self) -> f64 {
        let d = self.dim();
        (&self.cmat * &self.cinv - DMatrix::<C64>::identity(d, d))
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// `R^i_{jkl} = C̃^i_q R̃^q_{rst} C^r_j C^s_k C^t_l`.
pub fn transform_curvature(rtilde: &Array4<C64>, f: &FrameChange) -> Result<Array4<C64>> {
    let d = f.dim();
    if rtilde.shape() != [d, d, d, d] {
        return Err(Error::ShapeMismatch(format!(
            "curvature shape {:?} vs frame change of size {d}",
            rtilde.shape()
        )));
    }
    let c = &f.cmat;
    let ct = &f.cinv;
    // contract one slot at a time
    let step = |src: &Array4<C64>, slot: usize, m: &dyn Fn(usize, usize) -> C64| {
        Array4::from_shape_fn((d, d, d, d), |(a, b, cc, e)| {
            let mut idx = [a, b, cc, e];
            let out = idx[slot];
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..d {
                idx[slot] = p;
                acc += m(out, p) * src[idx];
            }
            acc
        })
    };
    let t = step(rtilde, 0, &|i, q| ct[(i, q)]);
    let t = step(&t, 1, &|j, r| c[(r, j)]);
    let t = step(&t, 2, &|k, s| c[(s, k)]);
    Ok(step(&t, 3, &|l, tt| c[(tt, l)]))
}

/// Residuals of the product almost complex structure on `M × ℝ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStructureResiduals {
    /// `max ‖J²U + U‖`.
    pub j_squared: f64,
    /// `max |h(JU, JV) − h(U, V)|`.
    pub compatibility: f64,
}

/// Tangent vector of `M × ℝ`: frame components plus the `d/dt` coefficient.
pub type ProductVector = (Vec<C64>, C64);

/// `J(X, f d/dt) = (ΦX − f ξ, η(X) d/dt)`.
pub fn product_j(phi: &crate::tensor::ComponentTensor, u: &ProductVector) -> ProductVector {
    let (x, f) = u;
    let mut out = apply(phi, x);
    out[0] -= *f;
    (out, x[0])
}

pub fn product_complex_structure_check(n: usize, samples: usize, seed: u64) -> Result<ProductStructureResiduals> {
    let metric = make_metric(n)?;
    let phi = make_phi(n)?;
    let fr = Frame::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| -> ProductVector {
        let mut x = vec![C64::new(0.0, 0.0); 2 * n + 1];
        x[0] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for a in 0..n {
            let v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            x[fr.l(a)] = v;
            x[fr.h(a)] = v.conj();
        }
        (x, C64::new(rng.random_range(-1.0..1.0), 0.0))
    };
    let h = |u: &ProductVector, v: &ProductVector| metric.inner(&u.0, &v.0) + u.1 * v.1;
    let mut res = ProductStructureResiduals {
        j_squared: 0.0,
        compatibility: 0.0,
    };
    for _ in 0..samples {
        let u = sample(&mut rng);
        let v = sample(&mut rng);
        let ju = product_j(&phi, &u);
        let jju = product_j(&phi, &ju);
        let sq = jju.0.iter().zip(&u.0).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>() + (jju.1 + u.1).norm_sqr();
        res.j_squared = res.j_squared.max(sq.sqrt());
        let jv = product_j(&phi, &v);
        res.compatibility = res.compatibility.max((h(&ju, &jv) - h(&u, &v)).norm());
    }
    Ok(res)
}

/// Residuals of transporting a curvature tensor between frames.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportCheck {
    /// `max |T(T(R, C), C⁻¹) − R|`.
    pub round_trip: f64,
    /// `max |T(T(R, C₁), C₂) − T(R, C₁C₂)|` against a seeded second frame change.
    pub composition: f64,
    pub condition_number: f64,
    pub inverse_residual: f64,
}

/// Seeded well-conditioned frame change `I + 0.3 X` of size `dim`.
pub fn sample_frame_change(dim: usize, seed: u64) -> Result<FrameChange> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        0.3 * z + if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    });
    FrameChange::new(m)
}

/// Round-trip and composition residuals of [`transform_curvature`]. Missing
/// inputs are replaced by seeded samples.
pub fn transport_check(
    dim: usize,
    curvature: Option<&Array4<C64>>,
    frame: Option<&FrameChange>,
    seed: u64,
) -> Result<TransportCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled;
    let r = match curvature {
        Some(r) => r,
        None => {
            sampled = Array4::from_shape_simple_fn((dim, dim, dim, dim), || {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            &sampled
        }
    };
    let own;
    let f = match frame {
        Some(f) => f,
        None => {
            own = sample_frame_change(dim, seed ^ 0x5a5a)?;
            &own
        }
    };
    let diff = |x: &Array4<C64>, y: &Array4<C64>| x.iter().zip(y.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let there = transform_curvature(r, f)?;
    let back = transform_curvature(&there, &f.inverse())?;
    let second = sample_frame_change(f.dim(), seed.wrapping_add(1))?;
    let stepwise = transform_curvature(&there, &second)?;
    let direct = transform_curvature(r, &f.then(&second))?;
    Ok(TransportCheck {
        round_trip: diff(&back, r),
        composition: diff(&stepwise, &direct),
        condition_number: f.condition_number(),
        inverse_residual: f.inverse_residual(),
    })
}
