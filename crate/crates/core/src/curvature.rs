//! Riemann, Ricci and derived curvature tensors of a Kenmotsu-type instance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{quad_a22, quad_b31, StructureData};
use crate::tensor::{contract, delta, hat, make_metric, raise_index, ComponentTensor, Frame, Metric, Variance, C64};

/// Scalars `(a₀, a₁, a₂)` of the generalized curvature tensor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTriple {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl CoefficientTriple {
    pub fn new(a0: f64, a1: f64, a2: f64) -> Self {
        Self { a0, a1, a2 }
    }

    /// `a₀ + 4n a₁ + 4n(2n+1) a₂`.
    pub fn scalar_constraint(&self, n: usize) -> f64 {
        let n = n as f64;
        self.a0 + 4.0 * n * self.a1 + 4.0 * n * (2.0 * n + 1.0) * self.a2
    }
}

/// Symmetry diagnostics of a completed rank-4 tensor.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResiduals {
    pub last_pair: f64,
    pub first_pair: f64,
    pub pair_swap: f64,
    pub bianchi: f64,
    pub hat_reality: f64,
}

impl SymmetryResiduals {
    pub fn of(t: &ComponentTensor) -> Self {
        let d = t.dim();
        let mut r = Self::default();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = t.get(&[i, j, k, l]);
                        r.last_pair = r.last_pair.max((v + t.get(&[i, j, l, k])).norm());
                        r.first_pair = r.first_pair.max((v + t.get(&[j, i, k, l])).norm());
                        r.pair_swap = r.pair_swap.max((v - t.get(&[k, l, i, j])).norm());
                        let cyc = v + t.get(&[i, k, l, j]) + t.get(&[i, l, j, k]);
                        r.bianchi = r.bianchi.max(cyc.norm());
                    }
                }
            }
        }
        r.hat_reality = t.hat_reality_residual();
        r
    }

    pub fn max(&self) -> f64 {
        [self.last_pair, self.first_pair, self.pair_swap, self.bianchi, self.hat_reality]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Fills a lowered rank-4 tensor from a list of seed components using the
/// algebraic curvature symmetries, conjugation and the cyclic identity.
struct Completer {
    n: usize,
    d: usize,
    values: Vec<C64>,
    known: Vec<bool>,
    tol: f64,
}

impl Completer {
    fn new(n: usize, tol: f64) -> Self {
        let d = 2 * n + 1;
        Self {
            n,
            d,
            values: vec![C64::new(0.0, 0.0); d.pow(4)],
            known: vec![false; d.pow(4)],
            tol,
        }
    }

    #[inline]
    fn flat(&self, t: [usize; 4]) -> usize {
        ((t[0] * self.d + t[1]) * self.d + t[2]) * self.d + t[3]
    }

    fn orbit(&mut self, t: [usize; 4], v: C64) -> Result<()> {
        let mut stack = vec![(t, v)];
        while let Some((t, v)) = stack.pop() {
            let f = self.flat(t);
            if self.known[f] {
                let existing = self.values[f];
                if (existing - v).norm() > self.tol {
                    return Err(Error::CompletionConflict {
                        tuple: t.to_vec(),
                        existing,
                        incoming: v,
                    });
                }
                continue;
            }
            self.known[f] = true;
            self.values[f] = v;
            let [i, j, k, l] = t;
            let n = self.n;
            stack.push(([i, j, l, k], -v));
            stack.push(([j, i, k, l], -v));
            stack.push(([k, l, i, j], v));
            stack.push(([hat(i, n), hat(j, n), hat(k, n), hat(l, n)], v.conj()));
        }
        Ok(())
    }

    fn bianchi_fill(&mut self) -> Result<()> {
        let d = self.d;
        loop {
            let mut changed = false;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let t = [i, j, k, l];
                            if self.known[self.flat(t)] {
                                continue;
                            }
                            let p = self.flat([i, k, l, j]);
                            let q = self.flat([i, l, j, k]);
                            if self.known[p] && self.known[q] {
                                let v = -(self.values[p] + self.values[q]);
                                self.orbit(t, v)?;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn finish(self) -> ComponentTensor {
        let mut out = ComponentTensor::zeros(self.n, &[Variance::Lower; 4]).expect("n >= 1");
        for (slot, v) in out.data_mut().iter_mut().zip(self.values) {
            *slot = v;
        }
        out
    }
}

/// Completes seed components `(tuple, value)` into a full lowered tensor.
/// Entries reachable neither by symmetry nor by the cyclic identity are zero.
pub fn complete_lowered(n: usize, seeds: &[([usize; 4], C64)], tol: f64) -> Result<ComponentTensor> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut c = Completer::new(n, tol);
    for &(t, v) in seeds {
        c.orbit(t, v)?;
    }
    c.bianchi_fill()?;
    Ok(c.finish())
}

/// Riemann tensor in both index placements.
#[derive(Clone, Debug)]
pub struct Riemann {
    /// `R_{ijkl}`.
    pub r4: ComponentTensor,
    /// `R^i_{jkl}`.
    pub rmixed: ComponentTensor,
}

fn riemann_seeds(s: &StructureData) -> Vec<([usize; 4], C64)> {
    let n = s.n;
    let f = Frame::new(n);
    let qa = quad_a22(&s.b3u, &s.b3d);
    let qb = quad_b31(&s.b3u);
    let mut seeds = Vec::new();
    let re = |x: f64| C64::new(x, 0.0);
    for a in 0..n {
        for c in 0..n {
            seeds.push(([f.h(a), 0, f.l(c), 0], re(-delta(a, c))));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let dd = delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c);
                    seeds.push((
                        [f.h(a), f.h(b), f.l(c), f.l(d)],
                        s.b22[[a, b, c, d]] - s.b22[[a, b, d, c]] - dd,
                    ));
                    seeds.push(([f.h(a), f.h(b), f.l(c), f.h(d)], s.b31[[a, b, d, c]] - qb[[a, b, d, c]]));
                    seeds.push(([f.h(a), f.l(b), f.l(c), f.l(d)], 2.0 * s.a13[[a, b, c, d]]));
                    seeds.push((
                        [f.h(a), f.l(b), f.l(c), f.h(d)],
                        s.a22[[a, d, b, c]] - qa[[a, d, b, c]] - delta(a, c) * delta(d, b),
                    ));
                }
            }
        }
    }
    seeds
}

/// Riemann tensor from the structure tensors. A conflict during completion
/// means the data is not consistent with the curvature symmetries.
pub fn build_riemann(s: &StructureData, metric: &Metric, tol: f64) -> Result<Riemann> {
    s.check_shapes()?;
    let r4 = complete_lowered(s.n, &riemann_seeds(s), tol)?;
    let rmixed = raise_index(&r4, 0, metric)?;
    Ok(Riemann { r4, rmixed })
}

/// Ricci tensor with its operator and the scalar curvature.
#[derive(Clone, Debug)]
pub struct Ricci {
    /// `r_{ij}`.
    pub ricci: ComponentTensor,
    /// `Q^k_j`, slot 0 upper.
    pub q: ComponentTensor,
    pub s: f64,
}

impl Ricci {
    fn from_ricci(ricci: ComponentTensor, metric: &Metric) -> Result<Self> {
        let q = raise_index(&ricci, 0, metric)?;
        let s = contract(&q, 0, 1)?.get(&[]).re;
        Ok(Self { ricci, q, s })
    }
}

/// `r_{jl} = g^{ik} R_{ijkl}`.
pub fn ricci_contraction(r4: &ComponentTensor, metric: &Metric) -> Result<Ricci> {
    let mixed = raise_index(r4, 0, metric)?;
    let ricci = contract(&mixed, 0, 2)?;
    Ricci::from_ricci(ricci, metric)
}

/// Ricci tensor from the closed-form component expressions.
pub fn ricci_formula(s: &StructureData, metric: &Metric) -> Result<Ricci> {
    s.check_shapes()?;
    let n = s.n;
    let f = Frame::new(n);
    let mut r = ComponentTensor::zeros(n, &[Variance::Lower, Variance::Lower])?;
    r.set(&[0, 0], C64::new(-2.0 * n as f64, 0.0));
    let trace_b3d: Vec<C64> = (0..n).map(|h| (0..n).map(|c| s.b3d[[c, h, c]]).sum()).collect();
    for a in 0..n {
        for b in 0..n {
            let mut lat = C64::new(0.0, 0.0);
            let mut mix = C64::new(-2.0 * n as f64 * delta(a, b), 0.0);
            for c in 0..n {
                lat += -2.0 * s.a13[[c, a, b, c]] + s.b31_low[[c, a, b, c]];
                for h in 0..n {
                    lat -= s.b3d[[c, a, h]] * s.b3d[[h, b, c]];
                }
                mix -= s.b22[[c, a, b, c]] - s.b22[[c, a, c, b]];
                mix += s.a22[[a, c, c, b]];
            }
            for h in 0..n {
                mix -= s.b3u[[a, h, b]] * trace_b3d[h];
            }
            r.set(&[f.l(a), f.l(b)], lat);
            r.set(&[f.h(a), f.h(b)], lat.conj());
            r.set(&[f.h(a), f.l(b)], mix);
            r.set(&[f.l(b), f.h(a)], mix);
        }
    }
    Ricci::from_ricci(r, metric)
}

/// Which of the two Ricci evaluation paths to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RicciMode {
    Formula,
    Contraction,
}

/// `[i,j,k,l] ↦ A_{ik} B_{jl} − A_{il} B_{jk}`.
pub(crate) fn wedge(a: &ComponentTensor, b: &ComponentTensor) -> ComponentTensor {
    ComponentTensor::from_fn(a.n(), &[Variance::Lower; 4], |t| {
        let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
        a.get(&[i, k]) * b.get(&[j, l]) - a.get(&[i, l]) * b.get(&[j, k])
    })
    .expect("n >= 1")
}

/// `g r − g r + r g − r g`.
pub(crate) fn ricci_metric_block(metric: &Metric, ricci: &ComponentTensor) -> ComponentTensor {
    wedge(&metric.g, ricci).add(&wedge(ricci, &metric.g)).expect("same shape")
}

/// `g g − g g`.
pub fn metric_block(metric: &Metric) -> ComponentTensor {
    wedge(&metric.g, &metric.g)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Generalized curvature tensor from its defining combination.
pub fn build_generalized(
    r4: &ComponentTensor,
    ricci: &ComponentTensor,
    s: f64,
    metric: &Metric,
    coeffs: CoefficientTriple,
) -> Result<ComponentTensor> {
    let e = ricci_metric_block(metric, ricci);
    let f = metric_block(metric);
    r4.scaled(re(coeffs.a0))
        .add(&e.scaled(re(coeffs.a1)))?
        .add(&f.scaled(re(2.0 * coeffs.a2 * s)))
}

/// Generalized curvature tensor from its five closed-form component
/// families, completed like the Riemann tensor.
pub fn generalized_components_formula(
    st: &StructureData,
    ric: &Ricci,
    coeffs: CoefficientTriple,
    tol: f64,
) -> Result<ComponentTensor> {
    st.check_shapes()?;
    let n = st.n;
    let f = Frame::new(n);
    let CoefficientTriple { a0, a1, a2 } = coeffs;
    let s = ric.s;
    let nf = n as f64;
    let qa = quad_a22(&st.b3u, &st.b3d);
    let r = &ric.ricci;
    let q = |x: usize, y: usize| ric.q.get(&[f.l(x), f.l(y)]);
    let shift = 2.0 * a2 * s - a0;
    let mut seeds = Vec::new();
    for a in 0..n {
        for b in 0..n {
            seeds.push(([f.l(a), 0, f.l(b), 0], a1 * r.get(&[f.l(a), f.l(b)])));
            seeds.push((
                [f.h(a), 0, f.l(b), 0],
                re(-(a0 + 2.0 * nf * a1 - 2.0 * a2 * s) * delta(a, b)) + a1 * r.get(&[f.h(a), f.l(b)]),
            ));
            for c in 0..n {
                for d in 0..n {
                    let item3 = 2.0 * a0 * st.a13[[a, b, c, d]]
                        + a1 * (delta(a, c) * r.get(&[f.l(b), f.l(d)]) - delta(a, d) * r.get(&[f.l(b), f.l(c)]));
                    seeds.push(([f.h(a), f.l(b), f.l(c), f.l(d)], item3));
                    let item4 = a0 * (st.a22[[a, d, b, c]] - qa[[a, d, b, c]])
                        + a1 * (delta(a, c) * q(d, b) + delta(d, b) * q(a, c))
                        + shift * delta(a, c) * delta(d, b);
                    seeds.push(([f.h(a), f.l(b), f.l(c), f.h(d)], item4));
                    let item5 = a0 * (st.b22[[a, b, c, d]] - st.b22[[a, b, d, c]])
                        + a1 * (delta(a, c) * q(b, d) - delta(a, d) * q(b, c) + q(a, c) * delta(b, d)
                            - q(a, d) * delta(b, c))
                        + shift * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
                    seeds.push(([f.h(a), f.h(b), f.l(c), f.l(d)], item5));
                }
            }
        }
    }
    complete_lowered(n, &seeds, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalKind {
    Projective,
    Concircular,
    Conharmonic,
}

/// Projective, concircular or conharmonic tensor of a `2n+1`-dimensional
/// instance.
pub fn build_classical(
    kind: ClassicalKind,
    r4: &ComponentTensor,
    ricci: &ComponentTensor,
    s: f64,
    metric: &Metric,
) -> Result<ComponentTensor> {
    let n = r4.n() as f64;
    match kind {
        ClassicalKind::Projective => r4.sub(&wedge(&metric.g, ricci).scaled(re(1.0 / (2.0 * n)))),
        ClassicalKind::Concircular => r4.sub(&metric_block(metric).scaled(re(s / (2.0 * n * (2.0 * n + 1.0))))),
        ClassicalKind::Conharmonic => r4.sub(&ricci_metric_block(metric, ricci).scaled(re(1.0 / (2.0 * n - 1.0)))),
    }
}

/// Every derived curvature tensor of one instance.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub n: usize,
    pub coeffs: CoefficientTriple,
    pub metric: Metric,
    pub r4: ComponentTensor,
    pub rmixed: ComponentTensor,
    pub ricci: ComponentTensor,
    pub q: ComponentTensor,
    pub s: f64,
    pub g: ComponentTensor,
    pub p: ComponentTensor,
    pub c: ComponentTensor,
    pub k: ComponentTensor,
}

impl CurvatureBundle {
    /// Builds the bundle from structure data; the Ricci tensor is obtained by
    /// contraction of the completed Riemann tensor.
    pub fn build(st: &StructureData, coeffs: CoefficientTriple, tol: f64) -> Result<Self> {
        let metric = make_metric(st.n)?;
        let riem = build_riemann(st, &metric, tol)?;
        Self::from_riemann(riem, metric, coeffs)
    }

    /// Builds the bundle from an arbitrary lowered curvature-like tensor.
    pub fn from_r4(r4: ComponentTensor, coeffs: CoefficientTriple) -> Result<Self> {
        let metric = make_metric(r4.n())?;
        let rmixed = raise_index(&r4, 0, &metric)?;
        Self::from_riemann(Riemann { r4, rmixed }, metric, coeffs)
    }

    fn from_riemann(riem: Riemann, metric: Metric, coeffs: CoefficientTriple) -> Result<Self> {
        let ric = ricci_contraction(&riem.r4, &metric)?;
        let g = build_generalized(&riem.r4, &ric.ricci, ric.s, &metric, coeffs)?;
        let p = build_classical(ClassicalKind::Projective, &riem.r4, &ric.ricci, ric.s, &metric)?;
        let c = build_classical(ClassicalKind::Concircular, &riem.r4, &ric.ricci, ric.s, &metric)?;
        let k = build_classical(ClassicalKind::Conharmonic, &riem.r4, &ric.ricci, ric.s, &metric)?;
        Ok(Self {
            n: riem.r4.n(),
            coeffs,
            metric,
            r4: riem.r4,
            rmixed: riem.rmixed,
            ricci: ric.ricci,
            q: ric.q,
            s: ric.s,
            g,
            p,
            c,
            k,
        })
    }

    pub fn ricci_data(&self) -> Ricci {
        Ricci {
            ricci: self.ricci.clone(),
            q: self.q.clone(),
            s: self.s,
        }
    }

    /// Same bundle with a different coefficient triple.
    pub fn with_coeffs(&self, coeffs: CoefficientTriple) -> Result<Self> {
        let g = build_generalized(&self.r4, &self.ricci, self.s, &self.metric, coeffs)?;
        Ok(Self {
            coeffs,
            g,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::lower_index;

    const TOL: f64 = 1e-9;

    fn zero_bundle(n: usize, coeffs: CoefficientTriple) -> CurvatureBundle {
        CurvatureBundle::build(&StructureData::zeros(n).unwrap(), coeffs, TOL).unwrap()
    }

    #[test]
    fn riemann_vertical_family() {
        let st = StructureData::random_admissible(2, 4, 1.0).unwrap();
        let m = make_metric(2).unwrap();
        let r = build_riemann(&st, &m, TOL).unwrap();
        assert!((r.rmixed.get(&[1, 0, 1, 0]) - re(-1.0)).norm() < 1e-14);
        assert!(r.rmixed.get(&[1, 0, 2, 0]).norm() < 1e-14);
    }

    #[test]
    fn zero_structure_riemann_values() {
        let n = 2;
        let b = zero_bundle(n, CoefficientTriple::new(1.0, 0.0, 0.0));
        // R^a_{b̂cd} at (1,2,1,2)
        assert!((b.rmixed.get(&[1, 2 + n, 1, 2]) - re(-1.0)).norm() < 1e-14);
        // constant curvature −1
        let expect = metric_block(&b.metric).scaled(re(-1.0));
        assert!(b.r4.max_abs_diff(&expect).unwrap() < 1e-14);
    }

    #[test]
    fn vanishing_a13_gives_vanishing_latin_block() {
        let st = StructureData::eta_einstein(3, 2, 1.0, 0.4).unwrap();
        let b = CurvatureBundle::build(&st, CoefficientTriple::new(1.0, 0.0, 0.0), TOL).unwrap();
        for a in 1..=3 {
            for bb in 1..=3 {
                for c in 1..=3 {
                    for d in 1..=3 {
                        assert!(b.rmixed.get(&[a, bb, c, d]).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn lowering_matches_hat_rule() {
        let st = StructureData::random_admissible(2, 6, 1.0).unwrap();
        let m = make_metric(2).unwrap();
        let r = build_riemann(&st, &m, TOL).unwrap();
        let lowered = lower_index(&r.rmixed, 0, &m).unwrap();
        assert!(lowered.max_abs_diff(&r.r4).unwrap() < 1e-14);
        for t in r.r4.tuples() {
            let mut h = t.clone();
            h[0] = hat(t[0], 2);
            assert!((r.r4.get(&t) - r.rmixed.get(&h)).norm() < 1e-14);
        }
    }

    #[test]
    fn ricci_formula_matches_contraction() {
        for n in 1..=3 {
            let m = make_metric(n).unwrap();
            for seed in 0..10 {
                let st = StructureData::random_admissible(n, seed, 1.0).unwrap();
                let r = build_riemann(&st, &m, TOL).unwrap();
                let a = ricci_contraction(&r.r4, &m).unwrap();
                let b = ricci_formula(&st, &m).unwrap();
                assert!(a.ricci.max_abs_diff(&b.ricci).unwrap() < 1e-12, "n={n} seed={seed}");
                assert!((a.ricci.get(&[0, 0]) - re(-2.0 * n as f64)).norm() < 1e-12);
                for i in 1..=2 * n {
                    assert!(a.ricci.get(&[i, 0]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_structure_ricci_and_scalar() {
        let n = 2;
        let b = zero_bundle(n, CoefficientTriple::new(1.0, 0.0, 0.0));
        assert!((b.ricci.get(&[3, 1]) - re(-4.0)).norm() < 1e-14);
        assert!((b.s + 20.0).abs() < 1e-12);
        for n in 1..=4 {
            let b = zero_bundle(n, CoefficientTriple::new(1.0, 0.0, 0.0));
            let nf = n as f64;
            assert!((b.s + 2.0 * nf * (2.0 * nf + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_reduces_to_riemann() {
        let st = StructureData::random_admissible(2, 1, 1.0).unwrap();
        let b = CurvatureBundle::build(&st, CoefficientTriple::new(1.0, 0.0, 0.0), TOL).unwrap();
        assert_eq!(b.g.max_abs_diff(&b.r4).unwrap(), 0.0);
        let z = b.with_coeffs(CoefficientTriple::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(z.g.max_abs(), 0.0);
    }

    #[test]
    fn generalized_formula_matches_definition() {
        for n in 1..=3 {
            for seed in 0..5 {
                let st = StructureData::random_admissible(n, seed, 1.0).unwrap();
                let coeffs = CoefficientTriple::new(1.3, -0.7, 0.4);
                let b = CurvatureBundle::build(&st, coeffs, TOL).unwrap();
                let gf = generalized_components_formula(&st, &b.ricci_data(), coeffs, TOL).unwrap();
                assert!(gf.max_abs_diff(&b.g).unwrap() < 1e-12);
                // item 1
                for a in 1..=n {
                    for c in 1..=n {
                        let want = coeffs.a1 * b.ricci.get(&[a, c]);
                        assert!((b.g.get(&[a, 0, c, 0]) - want).norm() < 1e-12);
                    }
                }
            }
        }
        let z = CoefficientTriple::new(0.0, 0.0, 0.0);
        let st = StructureData::random_admissible(2, 0, 1.0).unwrap();
        let m = make_metric(2).unwrap();
        let ric = ricci_formula(&st, &m).unwrap();
        assert_eq!(generalized_components_formula(&st, &ric, z, TOL).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn zero_structure_generalized_item_two() {
        let n = 2;
        let c = CoefficientTriple::new(0.9, 0.3, -0.2);
        let b = zero_bundle(n, c);
        let want = -(c.a0 + 4.0 * n as f64 * c.a1 - 2.0 * c.a2 * b.s);
        assert!((b.g.get(&[3, 0, 1, 0]) - re(want)).norm() < 1e-12);
        let want5 = 2.0 * c.a2 * b.s - c.a0 - 2.0 * n as f64 * c.a1 * 2.0;
        // (1,2,1,2): δδ − δδ = 1 and the Q terms give 2·(−2n)·a₁
        assert!((b.g.get(&[3, 4, 1, 2]) - re(want5)).norm() < 1e-12);
    }

    #[test]
    fn symmetries_hold() {
        for n in 1..=3 {
            let st = StructureData::random_admissible(n, 21, 1.0).unwrap();
            let b = CurvatureBundle::build(&st, CoefficientTriple::new(0.5, 1.5, -1.0), TOL).unwrap();
            for t in [&b.r4, &b.g] {
                let s = SymmetryResiduals::of(t);
                assert!(s.max() < 1e-12, "{s:?}");
            }
            for t in [&b.p, &b.c, &b.k, &b.ricci] {
                assert!(t.hat_reality_residual() < 1e-12);
            }
            let sym = b.ricci.max_abs_diff(&b.ricci.permuted(&[1, 0])).unwrap();
            assert!(sym < 1e-12);
        }
    }

    #[test]
    fn classical_tensors_reduce() {
        let n = 2;
        let m = make_metric(n).unwrap();
        let st = StructureData::random_admissible(n, 3, 1.0).unwrap();
        let r = build_riemann(&st, &m, TOL).unwrap();
        let zero = ComponentTensor::zeros(n, &[Variance::Lower; 2]).unwrap();
        let p = build_classical(ClassicalKind::Projective, &r.r4, &zero, 0.0, &m).unwrap();
        assert_eq!(p.max_abs_diff(&r.r4).unwrap(), 0.0);
        let c = build_classical(ClassicalKind::Concircular, &r.r4, &zero, 0.0, &m).unwrap();
        assert_eq!(c.max_abs_diff(&r.r4).unwrap(), 0.0);
    }

    #[test]
    fn conharmonic_vanishes_on_matching_coefficients() {
        // K = G − 2a₂s(gg−gg) when a₀ = 1 and a₁ = −1/(2n−1)
        let n = 3;
        let st = StructureData::random_admissible(n, 2, 1.0).unwrap();
        let c = CoefficientTriple::new(1.0, -1.0 / (2.0 * n as f64 - 1.0), 0.3);
        let b = CurvatureBundle::build(&st, c, TOL).unwrap();
        let lhs = b.g.sub(&metric_block(&b.metric).scaled(re(2.0 * c.a2 * b.s))).unwrap();
        assert!(lhs.max_abs_diff(&b.k).unwrap() < 1e-12);
    }

    #[test]
    fn inconsistent_data_reports_conflict() {
        let mut st = StructureData::random_admissible(2, 8, 1.0).unwrap();
        st.a22[[0, 1, 1, 0]] += C64::new(0.3, 0.1);
        let st = st.with_conjugate_lower();
        let m = make_metric(2).unwrap();
        assert!(matches!(build_riemann(&st, &m, TOL), Err(Error::CompletionConflict { .. })));
    }
}
