//! JSON manifests: structure data, coefficients, options and an optional
//! hypersurface section. Complex numbers are `[re, im]` pairs; tensors are
//! nested arrays in the index order documented on [`StructureData`].

use std::path::Path;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Array3, Array4, ArrayD, IxDyn};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::curvature::CoefficientTriple;
use crate::error::{Error, Result};
use crate::hypersurface::{FrameChange, HypersurfaceData};
use crate::structure::StructureData;
use crate::tensor::{C64, DEFAULT_TOLERANCE};

pub const SCHEMA: &str = "agcurv/1";
pub const TOLERANCE_ENV: &str = "AGCURV_TOLERANCE";

/// Default tolerance, overridable through `AGCURV_TOLERANCE`.
pub fn default_tolerance() -> f64 {
    std::env::var(TOLERANCE_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t >= 0.0)
        .unwrap_or(DEFAULT_TOLERANCE)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "yes")]
    pub enforce_conjugate_pairs: bool,
}

fn yes() -> bool {
    true
}

impl Default for Options {
    fn default() -> Self {
        Self { tolerance: default_tolerance(), enforce_conjugate_pairs: true }
    }
}

/// Hypersurface section of a manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceSection {
    pub data: HypersurfaceData,
    /// Frame change used by the transport check.
    pub frame_change: Option<FrameChange>,
    /// Ambient curvature `R̃_{ijkl}` to transport; a seeded sample is used when absent.
    pub curvature: Option<Array4<C64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub structure: StructureData,
    pub coefficients: CoefficientTriple,
    pub options: Options,
    pub hypersurface: Option<HypersurfaceSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    schema: Option<String>,
    n: usize,
    structure: Map<String, Value>,
    coefficients: CoefficientTriple,
    #[serde(default)]
    options: Options,
    #[serde(default)]
    hypersurface: Option<RawHypersurface>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypersurface {
    n: usize,
    b_up: Value,
    #[serde(default)]
    b_low: Option<Value>,
    b_n_nb: Value,
    #[serde(default)]
    b_n_nb_low: Option<Value>,
    #[serde(default)]
    kenmotsu_b3u: Option<Value>,
    #[serde(default)]
    sigma_uu: Option<Value>,
    #[serde(default)]
    frame_change: Option<Value>,
    #[serde(default)]
    curvature: Option<Value>,
}

const UPPER: [&str; 6] = ["B3u", "A22", "A13", "A31", "B22", "B31"];
const LOWER: [&str; 6] = ["B3d", "A22_low", "A13_low", "A31_low", "B22_low", "B31_low"];

fn complex_at(v: &Value, path: &str) -> Result<C64> {
    match v {
        Value::Number(x) => Ok(C64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(Error::manifest(path, "expected [re, im] with numeric entries")),
        },
        _ => Err(Error::manifest(path, "expected a complex number [re, im]")),
    }
}

/// Decodes a nested array of the given shape.
pub fn decode_tensor(v: &Value, path: &str, shape: &[usize]) -> Result<ArrayD<C64>> {
    let mut out = Vec::with_capacity(shape.iter().product());
    fn walk(v: &Value, path: &str, shape: &[usize], out: &mut Vec<C64>) -> Result<()> {
        let Some((&len, rest)) = shape.split_first() else {
            out.push(complex_at(v, path)?);
            return Ok(());
        };
        let items = v.as_array().ok_or_else(|| Error::manifest(path, format!("expected an array of length {len}")))?;
        if items.len() != len {
            return Err(Error::manifest(path, format!("expected {len} entries, got {}", items.len())));
        }
        for (i, item) in items.iter().enumerate() {
            walk(item, &format!("{path}[{i}]"), rest, out)?;
        }
        Ok(())
    }
    walk(v, path, shape, &mut out)?;
    if let Some(bad) = out.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::manifest(path, format!("non-finite entry at flat position {bad}")));
    }
    Ok(ArrayD::from_shape_vec(IxDyn(shape), out).expect("shape checked during walk"))
}

fn decode3(v: &Value, path: &str, n: usize) -> Result<Array3<C64>> {
    Ok(decode_tensor(v, path, &[n; 3])?.into_dimensionality().expect("rank 3"))
}

fn decode4(v: &Value, path: &str, n: usize) -> Result<Array4<C64>> {
    Ok(decode_tensor(v, path, &[n; 4])?.into_dimensionality().expect("rank 4"))
}

fn decode2(v: &Value, path: &str, n: usize) -> Result<Array2<C64>> {
    Ok(decode_tensor(v, path, &[n; 2])?.into_dimensionality().expect("rank 2"))
}

fn decode1(v: &Value, path: &str, n: usize) -> Result<Array1<C64>> {
    Ok(decode_tensor(v, path, &[n])?.into_dimensionality().expect("rank 1"))
}

/// Encodes any array as nested `[re, im]` lists.
pub fn encode_tensor<D: ndarray::Dimension>(a: &ndarray::Array<C64, D>) -> Value {
    fn walk(view: ndarray::ArrayViewD<'_, C64>) -> Value {
        if view.ndim() == 0 {
            let z = view.first().copied().unwrap_or_default();
            return json!([z.re, z.im]);
        }
        Value::Array(view.outer_iter().map(walk).collect())
    }
    walk(a.view().into_dyn())
}

fn encode_matrix(m: &DMatrix<C64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

impl Manifest {
    pub fn new(structure: StructureData, coefficients: CoefficientTriple) -> Self {
        Self { structure, coefficients, options: Options::default(), hypersurface: None }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawManifest = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::manifest(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
        })?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn from_raw(raw: RawManifest) -> Result<Self> {
        if let Some(s) = &raw.schema {
            if s != SCHEMA {
                return Err(Error::manifest("schema", format!("unsupported schema {s:?}, expected {SCHEMA:?}")));
            }
        }
        let n = raw.n;
        if n == 0 {
            return Err(Error::manifest("n", "must be at least 1"));
        }
        let opts = raw.options;
        if !opts.tolerance.is_finite() || opts.tolerance < 0.0 {
            return Err(Error::manifest("options.tolerance", "must be finite and non-negative"));
        }
        for key in raw.structure.keys() {
            if !UPPER.contains(&key.as_str()) && !LOWER.contains(&key.as_str()) {
                return Err(Error::manifest(format!("structure.{key}"), "unknown field"));
            }
        }
        let field = |name: &str| -> Result<&Value> {
            raw.structure.get(name).ok_or_else(|| Error::manifest(format!("structure.{name}"), "missing field"))
        };
        let p = |name: &str| format!("structure.{name}");
        let mut s = StructureData::zeros(n)?;
        s.b3u = decode3(field("B3u")?, &p("B3u"), n)?;
        s.a22 = decode4(field("A22")?, &p("A22"), n)?;
        s.a13 = decode4(field("A13")?, &p("A13"), n)?;
        s.a31 = decode4(field("A31")?, &p("A31"), n)?;
        s.b22 = decode4(field("B22")?, &p("B22"), n)?;
        s.b31 = decode4(field("B31")?, &p("B31"), n)?;
        let conj = s.clone().with_conjugate_lower();
        let get_lower = |name: &str| raw.structure.get(name);
        s.b3d = match get_lower("B3d") {
            Some(v) => decode3(v, &p("B3d"), n)?,
            None => conj.b3d.clone(),
        };
        let lower4: [(&str, &mut Array4<C64>, &Array4<C64>); 5] = [
            ("A22_low", &mut s.a22_low, &conj.a22_low),
            ("A13_low", &mut s.a13_low, &conj.a13_low),
            ("A31_low", &mut s.a31_low, &conj.a31_low),
            ("B22_low", &mut s.b22_low, &conj.b22_low),
            ("B31_low", &mut s.b31_low, &conj.b31_low),
        ];
        for (name, slot, fallback) in lower4 {
            *slot = match get_lower(name) {
                Some(v) => decode4(v, &p(name), n)?,
                None => fallback.clone(),
            };
        }
        if opts.enforce_conjugate_pairs {
            let d3 = s.b3d.iter().zip(conj.b3d.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
            if d3 > opts.tolerance {
                return Err(Error::manifest(p("B3d"), format!("not the conjugate of B3u (max deviation {d3:.3e})")));
            }
            for ((name, arr), (_, want)) in s.named_rank4().into_iter().zip(conj.named_rank4()).skip(5) {
                let d = arr.iter().zip(want.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
                if d > opts.tolerance {
                    return Err(Error::manifest(p(name), format!("not the conjugate of its upper partner (max deviation {d:.3e})")));
                }
            }
        }
        let hypersurface = raw.hypersurface.map(decode_hypersurface).transpose()?;
        Ok(Self { structure: s, coefficients: raw.coefficients, options: opts, hypersurface })
    }

    pub fn to_json(&self) -> Value {
        let s = &self.structure;
        let mut st = Map::new();
        st.insert("B3u".into(), encode_tensor(&s.b3u));
        st.insert("B3d".into(), encode_tensor(&s.b3d));
        for (name, arr) in s.named_rank4() {
            st.insert(name.into(), encode_tensor(arr));
        }
        let mut root = Map::new();
        root.insert("schema".into(), json!(SCHEMA));
        root.insert("n".into(), json!(s.n));
        root.insert("structure".into(), Value::Object(st));
        root.insert("coefficients".into(), serde_json::to_value(self.coefficients).expect("plain struct"));
        root.insert("options".into(), serde_json::to_value(self.options).expect("plain struct"));
        if let Some(h) = &self.hypersurface {
            root.insert("hypersurface".into(), encode_hypersurface(h));
        }
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("values are finite")
    }
}

fn decode_hypersurface(raw: RawHypersurface) -> Result<HypersurfaceSection> {
    let n = raw.n;
    if n < 2 {
        return Err(Error::manifest("hypersurface.n", "ambient dimension must be at least 2"));
    }
    let m = n - 1;
    let p = |name: &str| format!("hypersurface.{name}");
    let b_up = decode3(&raw.b_up, &p("b_up"), n)?;
    let b_low = match &raw.b_low {
        Some(v) => decode3(v, &p("b_low"), n)?,
        None => b_up.mapv(|z| z.conj()),
    };
    let b_n_nb = decode1(&raw.b_n_nb, &p("b_n_nb"), m)?;
    let b_n_nb_low = match &raw.b_n_nb_low {
        Some(v) => decode1(v, &p("b_n_nb_low"), m)?,
        None => b_n_nb.mapv(|z| z.conj()),
    };
    let kenmotsu_b3u = raw.kenmotsu_b3u.as_ref().map(|v| decode3(v, &p("kenmotsu_b3u"), m)).transpose()?;
    let sigma_uu = raw.sigma_uu.as_ref().map(|v| decode2(v, &p("sigma_uu"), m)).transpose()?;
    let dim = 2 * n;
    let frame_change = match &raw.frame_change {
        Some(v) => {
            let a = decode2(v, &p("frame_change"), dim)?;
            let mat = DMatrix::from_fn(dim, dim, |i, j| a[[i, j]]);
            Some(FrameChange::new(mat).map_err(|e| Error::manifest(p("frame_change"), e.to_string()))?)
        }
        None => None,
    };
    let curvature = raw.curvature.as_ref().map(|v| decode4(v, &p("curvature"), dim)).transpose()?;
    let data = HypersurfaceData { n, b_up, b_low, b_n_nb, b_n_nb_low, kenmotsu_b3u, sigma_uu };
    Ok(HypersurfaceSection { data, frame_change, curvature })
}

fn encode_hypersurface(h: &HypersurfaceSection) -> Value {
    let d = &h.data;
    let mut o = Map::new();
    o.insert("n".into(), json!(d.n));
    o.insert("b_up".into(), encode_tensor(&d.b_up));
    o.insert("b_low".into(), encode_tensor(&d.b_low));
    o.insert("b_n_nb".into(), encode_tensor(&d.b_n_nb));
    o.insert("b_n_nb_low".into(), encode_tensor(&d.b_n_nb_low));
    if let Some(k) = &d.kenmotsu_b3u {
        o.insert("kenmotsu_b3u".into(), encode_tensor(k));
    }
    if let Some(sg) = &d.sigma_uu {
        o.insert("sigma_uu".into(), encode_tensor(sg));
    }
    if let Some(f) = &h.frame_change {
        o.insert("frame_change".into(), encode_matrix(&f.cmat));
    }
    if let Some(c) = &h.curvature {
        o.insert("curvature".into(), encode_tensor(c));
    }
    Value::Object(o)
}
