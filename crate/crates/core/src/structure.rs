//! Structure-tensor inputs of a Kenmotsu-type instance.
//!
//! Latin indices are 0-based here (`0..n`); they map to frame positions
//! `1 + a` (Latin) and `1 + n + a` (hatted).

use ndarray::{Array2, Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{delta, signed_permutations, C64};

/// Structure tensors of one instance.
///
/// | field | index order | component |
/// |-------|-------------|-----------|
/// | `b3u` | `[a,b,c]`   | `B^{ab}_c` |
/// | `b3d` | `[a,b,c]`   | `B_{ab}^c` |
/// | `a22` | `[a,d,b,c]` | `A^{ad}_{bc}` |
/// | `a13` | `[a,b,c,d]` | `A^a_{bcd}` |
/// | `a31` | `[a,c,d,b]` | `A^{acd}_b` |
/// | `b22` | `[a,b,c,d]` | `B^{ab}_{cd}` |
/// | `b31` | `[a,b,d,c]` | `B^{abd}_c` |
///
/// The `*_low` arrays hold the lower-index family in the same index order.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureData {
    pub n: usize,
    pub b3u: Array3<C64>,
    pub b3d: Array3<C64>,
    pub a22: Array4<C64>,
    pub a13: Array4<C64>,
    pub a31: Array4<C64>,
    pub b22: Array4<C64>,
    pub b31: Array4<C64>,
    pub a22_low: Array4<C64>,
    pub a13_low: Array4<C64>,
    pub a31_low: Array4<C64>,
    pub b22_low: Array4<C64>,
    pub b31_low: Array4<C64>,
}

fn conj3(x: &Array3<C64>) -> Array3<C64> {
    x.mapv(|v| v.conj())
}

fn conj4(x: &Array4<C64>) -> Array4<C64> {
    x.mapv(|v| v.conj())
}

fn max_abs4(x: &Array4<C64>) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// `[a,d,b,c] ↦ Σ_h B^{ah}_c B_{bh}^d`.
pub(crate) fn quad_a22(b3u: &Array3<C64>, b3d: &Array3<C64>) -> Array4<C64> {
    let n = b3u.dim().0;
    Array4::from_shape_fn((n, n, n, n), |(a, d, b, c)| (0..n).map(|h| b3u[[a, h, c]] * b3d[[b, h, d]]).sum())
}

/// `[a,b,d,c] ↦ Σ_h B^{ab}_h B^{hd}_c`.
pub(crate) fn quad_b31(b3u: &Array3<C64>) -> Array4<C64> {
    let n = b3u.dim().0;
    Array4::from_shape_fn((n, n, n, n), |(a, b, d, c)| (0..n).map(|h| b3u[[a, b, h]] * b3u[[h, d, c]]).sum())
}

/// Half the alternating sum over the last two slots.
fn anti_last(x: &Array4<C64>) -> Array4<C64> {
    let n = x.dim().0;
    Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| 0.5 * (x[[a, b, c, d]] - x[[a, b, d, c]]))
}

fn total_anti_bcd(x: &Array4<C64>) -> Array4<C64> {
    let n = x.dim().0;
    let perms = signed_permutations(3);
    Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| {
        let idx = [b, c, d];
        perms
            .iter()
            .map(|(p, s)| x[[a, idx[p[0]], idx[p[1]], idx[p[2]]]] * *s)
            .sum::<C64>()
            / 6.0
    })
}

/// Admissible `A^a_{bcd}` with `Σ_c (A^c_{abc} + A^c_{bac}) = 0`, so it
/// leaves the Ricci tensor unchanged. Needs `n ≥ 2`.
fn trace_free_a13(raw: &Array4<C64>) -> Array4<C64> {
    let n = raw.dim().0;
    let x = anti_last(raw);
    let x = &x - &total_anti_bcd(&x);
    let corr = 1.0 / (2.0 * (n as f64 - 1.0));
    let tr = Array2::from_shape_fn((n, n), |(a, b)| {
        corr * (0..n).map(|c| x[[c, a, b, c]] + x[[c, b, a, c]]).sum::<C64>()
    });
    Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| {
        x[[a, b, c, d]] + tr[[b, d]] * delta(a, c) - tr[[b, c]] * delta(a, d)
    })
}

/// One named residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

/// Residuals of the admissibility relations plus the extra consistency
/// conditions the curvature completion relies on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub tolerance: f64,
    /// `rel1`..`rel3` for the upper family, `rel4`..`rel6` for the lower one.
    pub relations: Vec<Residual>,
    /// `b3_antisymmetry`, `a22_symmetry`, `b31_a13_link`, `conjugate_pairs`.
    pub extended: Vec<Residual>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.relations.iter().all(|r| r.value <= self.tolerance)
    }

    /// Admissible and consistent enough for the curvature completion to be
    /// free of conflicts.
    pub fn is_consistent(&self) -> bool {
        self.is_admissible() && self.extended.iter().all(|r| r.value <= self.tolerance)
    }

    pub fn max_residual(&self) -> f64 {
        self.relations.iter().chain(&self.extended).fold(0.0, |m, r| m.max(r.value))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.relations.iter().chain(&self.extended).find(|r| r.name == name).map(|r| r.value)
    }
}

/// Samples complex entries with real and imaginary parts in `[-scale, scale)`.
struct Sampler {
    rng: ChaCha8Rng,
    scale: f64,
}

impl Sampler {
    fn new(seed: u64, scale: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            scale,
        }
    }

    fn c(&mut self) -> C64 {
        let re = self.rng.random_range(-1.0..1.0);
        let im = self.rng.random_range(-1.0..1.0);
        C64::new(re, im) * self.scale
    }

    fn arr3(&mut self, n: usize) -> Array3<C64> {
        Array3::from_shape_simple_fn((n, n, n), || self.c())
    }

    fn arr4(&mut self, n: usize) -> Array4<C64> {
        Array4::from_shape_simple_fn((n, n, n, n), || self.c())
    }
}

impl StructureData {
    /// The pure Kenmotsu instance: every structure tensor zero.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let z3 = Array3::zeros((n, n, n));
        let z4 = Array4::zeros((n, n, n, n));
        Ok(Self {
            n,
            b3u: z3.clone(),
            b3d: z3,
            a22: z4.clone(),
            a13: z4.clone(),
            a31: z4.clone(),
            b22: z4.clone(),
            b31: z4.clone(),
            a22_low: z4.clone(),
            a13_low: z4.clone(),
            a31_low: z4.clone(),
            b22_low: z4.clone(),
            b31_low: z4,
        })
    }

    /// Builds an instance from the upper family; the lower family is the
    /// componentwise conjugate.
    pub fn from_upper(
        b3u: Array3<C64>,
        a22: Array4<C64>,
        a13: Array4<C64>,
        a31: Array4<C64>,
        b22: Array4<C64>,
        b31: Array4<C64>,
    ) -> Result<Self> {
        let n = b3u.dim().0;
        let mut s = Self::zeros(n)?;
        s.b3u = b3u;
        s.a22 = a22;
        s.a13 = a13;
        s.a31 = a31;
        s.b22 = b22;
        s.b31 = b31;
        s.check_shapes()?;
        Ok(s.with_conjugate_lower())
    }

    /// Replaces the lower family (and `b3d`) by the conjugate of the upper one.
    pub fn with_conjugate_lower(mut self) -> Self {
        self.b3d = conj3(&self.b3u);
        self.a22_low = conj4(&self.a22);
        self.a13_low = conj4(&self.a13);
        self.a31_low = conj4(&self.a31);
        self.b22_low = conj4(&self.b22);
        self.b31_low = conj4(&self.b31);
        self
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        for (name, shape) in [("B3u", self.b3u.shape()), ("B3d", self.b3d.shape())] {
            if shape != [n, n, n] {
                return Err(Error::ShapeMismatch(format!("{name}: expected {:?}, got {:?}", [n; 3], shape)));
            }
        }
        for (name, arr) in self.named_rank4() {
            if arr.shape() != [n, n, n, n] {
                return Err(Error::ShapeMismatch(format!("{name}: expected {:?}, got {:?}", [n; 4], arr.shape())));
            }
        }
        Ok(())
    }

    pub(crate) fn named_rank4(&self) -> [(&'static str, &Array4<C64>); 10] {
        [
            ("A22", &self.a22),
            ("A13", &self.a13),
            ("A31", &self.a31),
            ("B22", &self.b22),
            ("B31", &self.b31),
            ("A22_low", &self.a22_low),
            ("A13_low", &self.a13_low),
            ("A31_low", &self.a31_low),
            ("B22_low", &self.b22_low),
            ("B31_low", &self.b31_low),
        ]
    }

    /// Largest deviation of the lower family from the conjugate of the upper one.
    pub fn conjugate_pair_residual(&self) -> f64 {
        let d3 = self
            .b3d
            .iter()
            .zip(self.b3u.iter())
            .fold(0.0f64, |m, (l, u)| m.max((l - u.conj()).norm()));
        [
            (&self.a22_low, &self.a22),
            (&self.a13_low, &self.a13),
            (&self.a31_low, &self.a31),
            (&self.b22_low, &self.b22),
            (&self.b31_low, &self.b31),
        ]
        .iter()
        .fold(d3, |m, (l, u)| {
            l.iter().zip(u.iter()).fold(m, |m, (l, u)| m.max((l - u.conj()).norm()))
        })
    }

    /// Residuals of the three upper relations, evaluated on the given family.
    fn relation_residuals(
        b3u: &Array3<C64>,
        b3d: &Array3<C64>,
        a22: &Array4<C64>,
        a13: &Array4<C64>,
        a31: &Array4<C64>,
        b22: &Array4<C64>,
        b31: &Array4<C64>,
    ) -> [f64; 3] {
        let n = b3u.dim().0;
        // A^{ad}_{[bc]} − B^{ad}_{[cb]} − B^{ah}_{[b} B_{|h|c]}^d
        let rel1 = Array4::from_shape_fn((n, n, n, n), |(a, d, b, c)| {
            let a_anti = 0.5 * (a22[[a, d, b, c]] - a22[[a, d, c, b]]);
            let b_anti = 0.5 * (b22[[a, d, c, b]] - b22[[a, d, b, c]]);
            let quad: C64 = (0..n)
                .map(|h| 0.5 * (b3u[[a, h, b]] * b3d[[h, c, d]] - b3u[[a, h, c]] * b3d[[h, b, d]]))
                .sum();
            a_anti - b_anti - quad
        });
        // A^{acd}_b − B^{a[cd]}_b + B^{a[c}_h B^{|h|d]}_b
        let rel2 = Array4::from_shape_fn((n, n, n, n), |(a, c, d, b)| {
            let b_anti = 0.5 * (b31[[a, c, d, b]] - b31[[a, d, c, b]]);
            let quad: C64 = (0..n)
                .map(|h| 0.5 * (b3u[[a, c, h]] * b3u[[h, d, b]] - b3u[[a, d, h]] * b3u[[h, c, b]]))
                .sum();
            a31[[a, c, d, b]] - b_anti + quad
        });
        let rel3 = total_anti_bcd(a13);
        [max_abs4(&rel1), max_abs4(&rel2), max_abs4(&rel3)]
    }

    /// Admissibility residuals. The lower relations are checked as the
    /// conjugates of the upper ones, applied to the stored lower family.
    pub fn validate_admissible(&self, tol: f64) -> Result<AdmissibilityReport> {
        self.check_shapes()?;
        let n = self.n;
        let up = Self::relation_residuals(&self.b3u, &self.b3d, &self.a22, &self.a13, &self.a31, &self.b22, &self.b31);
        let low = Self::relation_residuals(
            &self.b3d,
            &self.b3u,
            &self.a22_low,
            &self.a13_low,
            &self.a31_low,
            &self.b22_low,
            &self.b31_low,
        );
        let relations = up
            .iter()
            .chain(low.iter())
            .enumerate()
            .map(|(k, &value)| Residual {
                name: format!("rel{}", k + 1),
                value,
            })
            .collect();

        let b3_anti = self
            .b3u
            .indexed_iter()
            .fold(0.0f64, |m, ((a, b, c), v)| m.max((v + self.b3u[[b, a, c]]).norm()));
        let m = &self.a22 - &quad_a22(&self.b3u, &self.b3d);
        let a22_sym = m.indexed_iter().fold(0.0f64, |acc, ((a, d, b, c), v)| {
            acc.max((v - m[[d, a, c, b]]).norm()).max((v - m[[c, b, d, a]].conj()).norm())
        });
        let qb = quad_b31(&self.b3u);
        let link = Array4::from_shape_fn((n, n, n, n), |(a, b, d, c)| {
            self.b31[[a, b, d, c]] - qb[[a, b, d, c]] - 2.0 * self.a13[[c, d, a, b]].conj()
        });
        let extended = vec![
            Residual {
                name: "b3_antisymmetry".into(),
                value: b3_anti,
            },
            Residual {
                name: "a22_symmetry".into(),
                value: a22_sym,
            },
            Residual {
                name: "b31_a13_link".into(),
                value: max_abs4(&link),
            },
            Residual {
                name: "conjugate_pairs".into(),
                value: self.conjugate_pair_residual(),
            },
        ];
        Ok(AdmissibilityReport {
            tolerance: tol,
            relations,
            extended,
        })
    }

    /// `A^{acd}_b` solved from the second relation.
    fn solve_a31(b3u: &Array3<C64>, b31: &Array4<C64>) -> Array4<C64> {
        let n = b3u.dim().0;
        Array4::from_shape_fn((n, n, n, n), |(a, c, d, b)| {
            let b_anti = 0.5 * (b31[[a, c, d, b]] - b31[[a, d, c, b]]);
            let quad: C64 = (0..n)
                .map(|h| 0.5 * (b3u[[a, c, h]] * b3u[[h, d, b]] - b3u[[a, d, h]] * b3u[[h, c, b]]))
                .sum();
            b_anti - quad
        })
    }

    /// `B^{ab}_{cd}` with the given symmetric part and the antisymmetric part
    /// fixed by the first relation.
    fn solve_b22(sym: &Array4<C64>, b3u: &Array3<C64>, b3d: &Array3<C64>, a22: &Array4<C64>) -> Array4<C64> {
        let n = b3u.dim().0;
        let t = Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| {
            (0..n).map(|h| b3u[[a, h, c]] * b3d[[d, h, b]]).sum::<C64>()
        });
        let a_anti = anti_last(a22);
        let t_anti = anti_last(&t);
        Array4::from_shape_fn((n, n, n, n), |(a, b, c, d)| {
            0.5 * (sym[[a, b, c, d]] + sym[[a, b, d, c]]) - a_anti[[a, b, c, d]] - t_anti[[a, b, c, d]]
        })
    }

    /// Deterministic random instance satisfying every admissibility relation
    /// and the extended consistency conditions.
    pub fn random_admissible(n: usize, seed: u64, scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut rng = Sampler::new(seed, scale);

        let raw = rng.arr3(n);
        let b3u = Array3::from_shape_fn((n, n, n), |(a, b, c)| 0.5 * (raw[[a, b, c]] - raw[[b, a, c]]));
        let b3d = conj3(&b3u);

        let raw = rng.arr4(n);
        let m = Array4::from_shape_fn((n, n, n, n), |(a, d, b, c)| {
            0.25 * (raw[[a, d, b, c]] + raw[[d, a, c, b]] + raw[[c, b, d, a]].conj() + raw[[b, c, a, d]].conj())
        });
        let a22 = &m + &quad_a22(&b3u, &b3d);

        let sym = rng.arr4(n);
        let b22 = Self::solve_b22(&sym, &b3u, &b3d, &a22);

        let a13 = anti_last(&rng.arr4(n));
        let a13 = &a13 - &total_anti_bcd(&a13);

        let qb = quad_b31(&b3u);
        let b31 = Array4::from_shape_fn((n, n, n, n), |(a, b, d, c)| qb[[a, b, d, c]] + 2.0 * a13[[c, d, a, b]].conj());
        let a31 = Self::solve_a31(&b3u, &b31);

        Self::from_upper(b3u, a22, a13, a31, b22, b31)
    }

    /// η-Einstein instance with `A^a_{bcd} = 0`,
    /// `A^{ad}_{bc} = B^{ah}_c B_{bh}^d + k δ^a_c δ^d_b` and
    /// `B^{ab}_{[cd]} = k δ^a_{[c} δ^b_{d]}`; its Ricci tensor has
    /// `r_{âb} = (k(2n−1) − 2n) δ^a_b`. With `k = 0` the Riemann tensor has
    /// constant curvature −1.
    pub fn eta_einstein(n: usize, seed: u64, scale: f64, k: f64) -> Result<Self> {
        Self::eta_einstein_family(n, seed, scale, k, 0.0, 0.0)
    }

    /// Extends [`StructureData::eta_einstein`] by `m (δ^a_b δ^d_c + δ^a_c δ^d_b)`
    /// in `A^{ad}_{bc}` and a random `A^a_{bcd}` of size `twist` whose
    /// symmetrized trace vanishes. The Ricci tensor stays η-Einstein with
    /// `r_{âb} = (k(2n−1) + m(n+1) − 2n) δ^a_b`.
    pub fn eta_einstein_family(n: usize, seed: u64, scale: f64, k: f64, m: f64, twist: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut rng = Sampler::new(seed, scale);
        let raw = rng.arr3(n);
        let b3u = Array3::from_shape_fn((n, n, n), |(a, b, c)| 0.5 * (raw[[a, b, c]] - raw[[b, a, c]]));
        let b3d = conj3(&b3u);
        let qa = quad_a22(&b3u, &b3d);
        let a22 = Array4::from_shape_fn((n, n, n, n), |(a, d, b, c)| {
            qa[[a, d, b, c]] + k * delta(a, c) * delta(d, b) + m * (delta(a, b) * delta(d, c) + delta(a, c) * delta(d, b))
        });
        let sym = rng.arr4(n);
        let b22 = Self::solve_b22(&sym, &b3u, &b3d, &a22);
        let a13 = if twist != 0.0 && n > 1 {
            trace_free_a13(&rng.arr4(n)).mapv(|v| v * twist)
        } else {
            Array4::zeros((n, n, n, n))
        };
        let qb = quad_b31(&b3u);
        let b31 = Array4::from_shape_fn((n, n, n, n), |(a, b, d, c)| qb[[a, b, d, c]] + 2.0 * a13[[c, d, a, b]].conj());
        let a31 = Self::solve_a31(&b3u, &b31);
        Self::from_upper(b3u, a22, a13, a31, b22, b31)
    }

    pub fn is_zero(&self) -> bool {
        self.b3u.iter().all(|v| v.norm() == 0.0) && self.named_rank4().iter().all(|(_, a)| a.iter().all(|v| v.norm() == 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_instance_is_admissible() {
        for n in 1..=4 {
            let s = StructureData::zeros(n).unwrap();
            let rep = s.validate_admissible(0.0).unwrap();
            assert!(rep.is_consistent());
            assert_eq!(rep.max_residual(), 0.0);
        }
        assert!(StructureData::zeros(0).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let a = StructureData::random_admissible(2, 7, 1.0).unwrap();
        let b = StructureData::random_admissible(2, 7, 1.0).unwrap();
        assert_eq!(a, b);
        let c = StructureData::random_admissible(2, 8, 1.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generator_output_is_admissible() {
        for n in 1..=4 {
            for seed in 0..100 {
                let s = StructureData::random_admissible(n, seed, 1.0).unwrap();
                let rep = s.validate_admissible(1e-12).unwrap();
                assert!(rep.is_consistent(), "n={n} seed={seed}: {rep:?}");
            }
        }
    }

    #[test]
    fn zero_scale_gives_zero_instance() {
        let s = StructureData::random_admissible(3, 11, 0.0).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn relation_one_detects_perturbed_a22() {
        let mut s = StructureData::random_admissible(2, 3, 1.0).unwrap();
        s.a22[[0, 1, 0, 1]] += C64::new(0.5, 0.0);
        let s = s.with_conjugate_lower();
        let rep = s.validate_admissible(1e-12).unwrap();
        assert!(rep.get("rel1").unwrap() > 0.1);
        assert!(rep.get("rel4").unwrap() > 0.1);
        assert!(!rep.is_admissible());
    }

    #[test]
    fn total_antisymmetry_violation_is_reported() {
        let mut s = StructureData::zeros(3).unwrap();
        s.a13[[0, 0, 1, 2]] = C64::new(1.0, 0.0);
        let s = s.with_conjugate_lower();
        let rep = s.validate_admissible(1e-9).unwrap();
        assert!((rep.get("rel3").unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(!rep.is_admissible());
    }

    #[test]
    fn three_slot_antisymmetry_vanishes_for_n1() {
        let mut s = StructureData::zeros(1).unwrap();
        s.a13[[0, 0, 0, 0]] = C64::new(2.0, -1.0);
        let rep = s.with_conjugate_lower().validate_admissible(1e-12).unwrap();
        assert_eq!(rep.get("rel3").unwrap(), 0.0);
    }

    #[test]
    fn conjugation_closure_is_idempotent() {
        let s = StructureData::random_admissible(3, 5, 0.7).unwrap();
        let once = s.clone().with_conjugate_lower();
        assert_eq!(once, s);
        assert_eq!(once.clone().with_conjugate_lower(), once);
        assert_eq!(s.conjugate_pair_residual(), 0.0);
    }

    #[test]
    fn independent_lower_family_is_flagged() {
        let mut s = StructureData::random_admissible(2, 1, 1.0).unwrap();
        s.b22_low[[0, 0, 0, 1]] += C64::new(0.0, 0.3);
        let rep = s.validate_admissible(1e-9).unwrap();
        assert!(rep.get("conjugate_pairs").unwrap() > 0.29);
    }

    #[test]
    fn eta_einstein_instance_is_consistent() {
        for n in 1..=3 {
            let s = StructureData::eta_einstein(n, 9, 1.0, 0.75).unwrap();
            assert!(s.validate_admissible(1e-12).unwrap().is_consistent());
            assert!(s.a13.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn eta_einstein_family_ricci_is_predicted() {
        use crate::curvature::ricci_formula;
        use crate::tensor::make_metric;
        for n in 2..=3 {
            let (k, m) = (0.4, -0.3);
            let s = StructureData::eta_einstein_family(n, 4, 1.0, k, m, 0.8).unwrap();
            assert!(s.validate_admissible(1e-12).unwrap().is_consistent());
            assert!(s.a13.iter().any(|v| v.norm() > 1e-3));
            let r = ricci_formula(&s, &make_metric(n).unwrap()).unwrap().ricci;
            let lam = k * (2 * n - 1) as f64 + m * (n + 1) as f64 - 2.0 * n as f64;
            for a in 0..n {
                for b in 0..n {
                    assert!(r.get(&[1 + a, 1 + b]).norm() < 1e-12);
                    let want = if a == b { lam } else { 0.0 };
                    assert!((r.get(&[1 + n + a, 1 + b]) - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut s = StructureData::zeros(2).unwrap();
        s.b22 = Array4::zeros((3, 3, 3, 3));
        assert!(matches!(s.validate_admissible(1e-9), Err(Error::ShapeMismatch(m)) if m.starts_with("B22")));
    }
}
