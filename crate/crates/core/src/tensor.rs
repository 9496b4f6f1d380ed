//! Index algebra over adapted complex frames.
//!
//! A frame over a `2n+1`-dimensional almost contact metric manifold is
//! `(ε₀ = ξ, ε₁ … εₙ, ε₁̂ … εₙ̂)` with `â = a + n`. Every tensor in this crate is
//! stored densely over the full index range `0..=2n` in every slot.

use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Hat involution on frame indices: `0̂ = 0`, `â = a + n`, `(a+n)^ = a`.
#[inline]
pub fn hat(i: usize, n: usize) -> usize {
    if i == 0 {
        0
    } else if i <= n {
        i + n
    } else {
        i - n
    }
}

/// A validated frame index together with its dimension parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrameIndex {
    value: usize,
    n: usize,
}

impl FrameIndex {
    pub fn new(value: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if value > 2 * n {
            return Err(Error::IndexOutOfRange {
                index: value,
                max: 2 * n,
            });
        }
        Ok(Self { value, n })
    }

    /// The Latin index `a` (1-based, `1..=n`).
    pub fn latin(a: usize, n: usize) -> Result<Self> {
        if a == 0 || a > n {
            return Err(Error::IndexOutOfRange { index: a, max: n });
        }
        Self::new(a, n)
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn hat(self) -> Self {
        Self {
            value: hat(self.value, self.n),
            n: self.n,
        }
    }

    pub fn is_vertical(self) -> bool {
        self.value == 0
    }

    pub fn is_latin(self) -> bool {
        (1..=self.n).contains(&self.value)
    }

    pub fn is_hatted(self) -> bool {
        self.value > self.n
    }
}

/// Small helper mapping 0-based structure indices into frame positions.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame {
    pub n: usize,
}

impl Frame {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// Frame position of Latin index `a` (0-based).
    #[inline]
    pub fn l(self, a: usize) -> usize {
        1 + a
    }

    /// Frame position of hatted index `â` (0-based `a`).
    #[inline]
    pub fn h(self, a: usize) -> usize {
        1 + self.n + a
    }
}

#[inline]
pub(crate) fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Upper,
    Lower,
}

/// Dense complex tensor over the frame index range `0..=2n` in every slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentTensor {
    n: usize,
    variance: Vec<Variance>,
    data: ArrayD<C64>,
}

impl ComponentTensor {
    pub fn zeros(n: usize, variance: &[Variance]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let dim = 2 * n + 1;
        Ok(Self {
            n,
            variance: variance.to_vec(),
            data: ArrayD::zeros(IxDyn(&vec![dim; variance.len()])),
        })
    }

    pub fn from_fn(n: usize, variance: &[Variance], mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        let mut t = Self::zeros(n, variance)?;
        for (idx, v) in t.data.indexed_iter_mut() {
            *v = f(idx.slice());
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &ArrayD<C64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ArrayD<C64> {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[idx]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: C64) {
        self.data[idx] = v;
    }

    /// All index tuples in row-major order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        self.data.indexed_iter().map(|(i, _)| i.slice().to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.variance != other.variance {
            return Err(Error::ShapeMismatch(format!(
                "(n={}, {:?}) vs (n={}, {:?})",
                self.n, self.variance, other.n, other.variance
            )));
        }
        Ok(())
    }

    /// Largest entrywise deviation between two tensors of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            n: self.n,
            variance: self.variance.clone(),
            data: self.data.mapv(|v| v * s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            n: self.n,
            variance: self.variance.clone(),
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            n: self.n,
            variance: self.variance.clone(),
            data: &self.data - &other.data,
        })
    }

    /// Slot `k` of the output is slot `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let variance = perm.iter().map(|&p| self.variance[p]).collect();
        Self {
            n: self.n,
            variance,
            data: self.data.clone().permuted_axes(IxDyn(perm)).as_standard_layout().to_owned(),
        }
    }

    /// Largest deviation from hat-reality, `T(i…) = conj(T(î…))`.
    pub fn hat_reality_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        let mut h = vec![0; self.rank()];
        for (idx, v) in self.data.indexed_iter() {
            for (k, &i) in idx.slice().iter().enumerate() {
                h[k] = hat(i, n);
            }
            worst = worst.max((v - self.data[h.as_slice()].conj()).norm());
        }
        worst
    }
}

/// Canonical metric of the adapted frame together with its inverse.
#[derive(Clone, Debug)]
pub struct Metric {
    pub g: ComponentTensor,
    pub ginv: ComponentTensor,
}

impl Metric {
    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// `g(X, Y) = g_ij X^i Y^j` (bilinear, no conjugation).
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        let d = self.g.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let gij = self.g.get(&[i, j]);
                if gij != C64::new(0.0, 0.0) {
                    s += gij * x[i] * y[j];
                }
            }
        }
        s
    }
}

pub fn make_metric(n: usize) -> Result<Metric> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let pattern = |idx: &[usize]| {
        let (i, j) = (idx[0], idx[1]);
        if (i == 0 && j == 0) || (i != 0 && j == hat(i, n)) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    };
    Ok(Metric {
        g: ComponentTensor::from_fn(n, &[Variance::Lower, Variance::Lower], pattern)?,
        ginv: ComponentTensor::from_fn(n, &[Variance::Upper, Variance::Upper], pattern)?,
    })
}

/// Components `Φ^i_j` of the structure endomorphism; slot 0 is the upper index.
pub fn make_phi(n: usize) -> Result<ComponentTensor> {
    ComponentTensor::from_fn(n, &[Variance::Upper, Variance::Lower], |idx| {
        let (i, j) = (idx[0], idx[1]);
        if i != j || i == 0 {
            C64::new(0.0, 0.0)
        } else if i <= n {
            I
        } else {
            -I
        }
    })
}

/// Applies a rank-(1,1) tensor to a vector: `(A X)^i = A^i_j X^j`.
pub fn apply(op: &ComponentTensor, x: &[C64]) -> Vec<C64> {
    let d = op.dim();
    (0..d)
        .map(|i| (0..d).map(|j| op.get(&[i, j]) * x[j]).sum())
        .collect()
}

/// All permutations of `0..k` with their signs.
pub(crate) fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}

fn check_slots(t: &ComponentTensor, slots: &[usize], excluded: &[usize]) -> Result<()> {
    let rank = t.rank();
    for &s in slots.iter().chain(excluded) {
        if s >= rank {
            return Err(Error::SlotOutOfRange { slot: s, rank });
        }
    }
    for (k, &s) in slots.iter().enumerate() {
        if slots[..k].contains(&s) {
            return Err(Error::DuplicateSlot { slot: s });
        }
        if excluded.contains(&s) {
            return Err(Error::OverlappingSlots(s));
        }
    }
    Ok(())
}

fn permutation_average(t: &ComponentTensor, slots: &[usize], alternating: bool) -> ComponentTensor {
    let perms = signed_permutations(slots.len());
    let weight = 1.0 / perms.len() as f64;
    let mut out = t.clone();
    let mut src = vec![0; t.rank()];
    for (idx, v) in out.data.indexed_iter_mut() {
        let idx = idx.slice();
        let mut acc = C64::new(0.0, 0.0);
        for (p, sign) in &perms {
            src.copy_from_slice(idx);
            for (k, &s) in slots.iter().enumerate() {
                src[s] = idx[slots[p[k]]];
            }
            let term = t.data[src.as_slice()];
            acc += if alternating { term * *sign } else { term };
        }
        *v = acc * weight;
    }
    out
}

/// Alternating average over permutations of `slots` with weight `1/k!`.
/// Slots listed in `excluded` are the `|·|` slots held fixed; they must not
/// overlap `slots`.
pub fn antisymmetrize(t: &ComponentTensor, slots: &[usize], excluded: &[usize]) -> Result<ComponentTensor> {
    check_slots(t, slots, excluded)?;
    Ok(permutation_average(t, slots, true))
}

/// Symmetric average over permutations of `slots` with weight `1/k!`.
pub fn symmetrize(t: &ComponentTensor, slots: &[usize], excluded: &[usize]) -> Result<ComponentTensor> {
    check_slots(t, slots, excluded)?;
    Ok(permutation_average(t, slots, false))
}

/// Traces an upper slot against a lower slot.
pub fn contract(t: &ComponentTensor, upper_slot: usize, lower_slot: usize) -> Result<ComponentTensor> {
    let rank = t.rank();
    for s in [upper_slot, lower_slot] {
        if s >= rank {
            return Err(Error::SlotOutOfRange { slot: s, rank });
        }
    }
    if upper_slot == lower_slot {
        return Err(Error::DuplicateSlot { slot: upper_slot });
    }
    if t.variance[upper_slot] != Variance::Upper {
        return Err(Error::VarianceMismatch {
            slot: upper_slot,
            expected: Variance::Upper,
        });
    }
    if t.variance[lower_slot] != Variance::Lower {
        return Err(Error::VarianceMismatch {
            slot: lower_slot,
            expected: Variance::Lower,
        });
    }
    let keep: Vec<usize> = (0..rank).filter(|&s| s != upper_slot && s != lower_slot).collect();
    let variance: Vec<Variance> = keep.iter().map(|&s| t.variance[s]).collect();
    let dim = t.dim();
    let mut out = ComponentTensor::zeros(t.n, &variance)?;
    let mut src = vec![0; rank];
    for (idx, v) in out.data.indexed_iter_mut() {
        for (k, &s) in keep.iter().enumerate() {
            src[s] = idx.slice()[k];
        }
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..dim {
            src[upper_slot] = p;
            src[lower_slot] = p;
            acc += t.data[src.as_slice()];
        }
        *v = acc;
    }
    Ok(out)
}

fn move_index(t: &ComponentTensor, slot: usize, by: &ComponentTensor, from: Variance, to: Variance) -> Result<ComponentTensor> {
    if slot >= t.rank() {
        return Err(Error::SlotOutOfRange { slot, rank: t.rank() });
    }
    if t.variance[slot] != from {
        return Err(Error::VarianceMismatch { slot, expected: from });
    }
    if by.n != t.n {
        return Err(Error::ShapeMismatch(format!("metric n={} vs tensor n={}", by.n, t.n)));
    }
    let mut variance = t.variance.clone();
    variance[slot] = to;
    let dim = t.dim();
    let mut out = ComponentTensor::zeros(t.n, &variance)?;
    let mut src = vec![0; t.rank()];
    for (idx, v) in out.data.indexed_iter_mut() {
        let idx = idx.slice();
        src.copy_from_slice(idx);
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..dim {
            let m = by.data[[idx[slot], p].as_slice()];
            if m != C64::new(0.0, 0.0) {
                src[slot] = p;
                acc += m * t.data[src.as_slice()];
            }
        }
        *v = acc;
    }
    Ok(out)
}

/// `T_{… i …} = g_{ip} T^{… p …}`.
pub fn lower_index(t: &ComponentTensor, slot: usize, metric: &Metric) -> Result<ComponentTensor> {
    move_index(t, slot, &metric.g, Variance::Upper, Variance::Lower)
}

/// `T^{… i …} = g^{ip} T_{… p …}`.
pub fn raise_index(t: &ComponentTensor, slot: usize, metric: &Metric) -> Result<ComponentTensor> {
    move_index(t, slot, &metric.ginv, Variance::Lower, Variance::Upper)
}

/// Fills every entry not covered by `known` with the conjugate of its hat
/// image. Entries known on both sides must already be conjugate within `tol`.
pub fn conjugate_complete(
    t: &ComponentTensor,
    known: impl Fn(&[usize]) -> bool,
    tol: f64,
) -> Result<ComponentTensor> {
    let n = t.n;
    let mut out = t.clone();
    let mut h = vec![0; t.rank()];
    for (idx, v) in out.data.indexed_iter_mut() {
        let idx = idx.slice();
        for (k, &i) in idx.iter().enumerate() {
            h[k] = hat(i, n);
        }
        let here = known(idx);
        let there = known(&h);
        match (here, there) {
            (true, true) => {
                let delta = (t.data[idx] - t.data[h.as_slice()].conj()).norm();
                if delta > tol {
                    return Err(Error::ConjugationConflict {
                        tuple: idx.to_vec(),
                        delta,
                    });
                }
            }
            (true, false) => {}
            (false, true) => *v = t.data[h.as_slice()].conj(),
            (false, false) => return Err(Error::CoverageGap { tuple: idx.to_vec() }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn hat_is_an_involution() {
        for n in 1..=8 {
            for i in 0..=2 * n {
                assert_eq!(hat(hat(i, n), n), i);
            }
            assert_eq!(hat(0, n), 0);
            assert_eq!(hat(1, n), 1 + n);
        }
    }

    #[test]
    fn frame_index_classification() {
        let i = FrameIndex::new(3, 2).unwrap();
        assert!(i.is_hatted());
        assert_eq!(i.hat().value(), 1);
        assert!(FrameIndex::new(5, 2).is_err());
        assert!(matches!(FrameIndex::new(0, 0), Err(Error::ZeroDimension)));
        assert!(FrameIndex::latin(0, 2).is_err());
    }

    #[test]
    fn metric_components() {
        let m = make_metric(2).unwrap();
        assert_eq!(m.g.get(&[0, 0]), c(1.0));
        assert_eq!(m.g.get(&[3, 1]), c(1.0));
        assert_eq!(m.g.get(&[1, 0]), c(0.0));
        assert_eq!(m.g.get(&[2, 0]), c(0.0));
        assert_eq!(m.g.get(&[1, 2]), c(0.0));
        assert_eq!(m.g.get(&[3, 4]), c(0.0));
        assert!(matches!(make_metric(0), Err(Error::ZeroDimension)));
    }

    #[test]
    fn metric_times_inverse_is_identity() {
        for n in 1..=6 {
            let m = make_metric(n).unwrap();
            let d = 2 * n + 1;
            for i in 0..d {
                for j in 0..d {
                    let s: C64 = (0..d).map(|k| m.g.get(&[i, k]) * m.ginv.get(&[k, j])).sum();
                    assert!((s - c(delta(i, j))).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phi_components() {
        let phi = make_phi(1).unwrap();
        assert_eq!(phi.get(&[1, 1]), I);
        assert_eq!(phi.get(&[2, 2]), -I);
        let phi = make_phi(3).unwrap();
        for i in 0..7 {
            assert_eq!(phi.get(&[i, 0]), c(0.0));
        }
        // Φ^j_i = -Φ^î_ĵ
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(phi.get(&[j, i]), -phi.get(&[hat(i, 3), hat(j, 3)]));
            }
        }
    }

    #[test]
    fn antisymmetrize_delta_pair() {
        // T^{ab}_{cd} = δ^a_c δ^b_d, antisymmetrized over (c,d)
        let t = ComponentTensor::from_fn(
            2,
            &[Variance::Upper, Variance::Upper, Variance::Lower, Variance::Lower],
            |i| c(delta(i[0], i[2]) * delta(i[1], i[3])),
        )
        .unwrap();
        let a = antisymmetrize(&t, &[2, 3], &[]).unwrap();
        assert!((a.get(&[1, 2, 1, 2]) - c(0.5)).norm() < 1e-15);
        assert!((a.get(&[1, 2, 2, 1]) - c(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn antisymmetrize_rejects_overlap() {
        let t = ComponentTensor::zeros(1, &[Variance::Lower; 3]).unwrap();
        assert!(matches!(antisymmetrize(&t, &[0, 1], &[1]), Err(Error::OverlappingSlots(1))));
        assert!(matches!(antisymmetrize(&t, &[0, 3], &[]), Err(Error::SlotOutOfRange { .. })));
    }

    #[test]
    fn antisymmetrize_three_slots_over_single_latin_value() {
        // n = 1 and all three slots restricted to the single Latin value: the
        // alternating sum cancels.
        let t = ComponentTensor::from_fn(1, &[Variance::Lower; 3], |i| {
            if i.iter().all(|&k| k == 1) {
                c(2.5)
            } else {
                c(0.0)
            }
        })
        .unwrap();
        let a = antisymmetrize(&t, &[0, 1, 2], &[]).unwrap();
        assert_eq!(a.max_abs(), 0.0);
    }

    #[test]
    fn symmetrize_rank_two_is_half_sum_with_transpose() {
        let t = ComponentTensor::from_fn(2, &[Variance::Lower; 2], |i| C64::new(i[0] as f64, (3 * i[1]) as f64)).unwrap();
        let s = symmetrize(&t, &[0, 1], &[]).unwrap();
        let half = t.add(&t.permuted(&[1, 0])).unwrap().scaled(c(0.5));
        assert!(s.max_abs_diff(&half).unwrap() < 1e-15);
        let a = antisymmetrize(&t, &[0, 1], &[]).unwrap();
        assert!(symmetrize(&a, &[0, 1], &[]).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn symmetrize_keeps_delta_tilde() {
        let n = 2;
        let t = ComponentTensor::from_fn(
            n,
            &[Variance::Upper, Variance::Upper, Variance::Lower, Variance::Lower],
            |i| c(delta(i[0], i[2]) * delta(i[1], i[3]) + delta(i[0], i[3]) * delta(i[1], i[2])),
        )
        .unwrap();
        assert!(symmetrize(&t, &[0, 1], &[]).unwrap().max_abs_diff(&t).unwrap() < 1e-15);
        assert!(symmetrize(&t, &[2, 3], &[]).unwrap().max_abs_diff(&t).unwrap() < 1e-15);
    }

    #[test]
    fn contract_identity() {
        for n in 1..=4 {
            let id = ComponentTensor::from_fn(n, &[Variance::Upper, Variance::Lower], |i| c(delta(i[0], i[1]))).unwrap();
            let tr = contract(&id, 0, 1).unwrap();
            assert_eq!(tr.rank(), 0);
            assert_eq!(tr.get(&[]), c((2 * n + 1) as f64));
        }
    }

    #[test]
    fn contract_rejects_variance_mismatch() {
        let t = ComponentTensor::zeros(1, &[Variance::Lower, Variance::Lower]).unwrap();
        assert!(matches!(contract(&t, 0, 1), Err(Error::VarianceMismatch { slot: 0, .. })));
        let m = make_metric(1).unwrap();
        assert!(lower_index(&t, 0, &m).is_err());
        assert!(raise_index(&t, 0, &m).is_ok());
    }

    #[test]
    fn raise_then_lower_roundtrips() {
        let n = 2;
        let m = make_metric(n).unwrap();
        let t = ComponentTensor::from_fn(n, &[Variance::Lower; 3], |i| C64::new(i[0] as f64 - i[2] as f64, i[1] as f64)).unwrap();
        let up = raise_index(&t, 1, &m).unwrap();
        assert_eq!(up.variance()[1], Variance::Upper);
        let back = lower_index(&up, 1, &m).unwrap();
        assert!(back.max_abs_diff(&t).unwrap() < 1e-15);
    }

    #[test]
    fn conjugate_complete_fills_hat_images() {
        let n = 2;
        let mut t = ComponentTensor::zeros(n, &[Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower]).unwrap();
        t.set(&[1, 0, 1, 0], C64::new(-1.0, 0.25));
        let known = |i: &[usize]| i[0] <= n;
        let out = conjugate_complete(&t, known, 1e-12).unwrap();
        assert_eq!(out.get(&[3, 0, 3, 0]), C64::new(-1.0, -0.25));
    }

    #[test]
    fn conjugate_complete_errors() {
        let n = 1;
        let mut t = ComponentTensor::zeros(n, &[Variance::Lower; 2]).unwrap();
        t.set(&[1, 1], C64::new(1.0, 1.0));
        t.set(&[2, 2], C64::new(1.0, 1.0));
        assert!(matches!(
            conjugate_complete(&t, |_| true, 1e-12),
            Err(Error::ConjugationConflict { .. })
        ));
        assert!(matches!(conjugate_complete(&t, |_| false, 1e-12), Err(Error::CoverageGap { .. })));
        // real values on self-conjugate tuples stay put
        let r = ComponentTensor::from_fn(n, &[Variance::Lower; 2], |i| c((i[0] * 3 + i[1]) as f64)).unwrap();
        let known = |i: &[usize]| [i[0], i[1]] <= [hat(i[0], n), hat(i[1], n)];
        let out = conjugate_complete(&r, known, 1e-12).unwrap();
        assert_eq!(out.get(&[0, 0]), r.get(&[0, 0]));
        assert_eq!(out.get(&[0, 2]), r.get(&[0, 1]));
        assert_eq!(out.get(&[2, 1]), r.get(&[1, 2]));
    }
}
