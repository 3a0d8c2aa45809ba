//! JSON interchange for Choi matrices.
//!
//! ```json
//! { "schema_version": 1, "role": "channel",
//!   "dims": { "A0": 2, "B0": 1, "A1": 1, "B1": 2 },
//!   "matrix": { "re": [[...], ...], "im": [[...], ...] } }
//! ```
//!
//! The key order of `dims` is the factor order of the matrix.

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::quantum::{
    channel_defect, comb_defect, is_psd, state_preparation, wire_label, BipartiteChannel, ChannelDims, Comb, CombLayout, Superchannel, A0, A0P,
    A1, A1P, B0, B0P, B1, B1P, CHANNEL_ORDER, SUPERCHANNEL_ORDER,
};
use crate::tensor::{CMatrix, DimSpec, LabeledMatrix, C64};

pub const SCHEMA_VERSION: u64 = 1;
/// `max |M − M†| ≤ HERMITIAN_TOL · max(1, max |M|)` on load.
pub const HERMITIAN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Channel,
    Superchannel,
    Comb,
    State,
    Povm,
}

impl Role {
    pub const ALL: [Role; 5] = [Role::Channel, Role::Superchannel, Role::Comb, Role::State, Role::Povm];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Channel => "channel",
            Role::Superchannel => "superchannel",
            Role::Comb => "comb",
            Role::State => "state",
            Role::Povm => "povm",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a document failed and why. An empty path means the whole input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}: {reason}", if path.is_empty() { "<document>" } else { path.as_str() })]
pub struct DocumentError {
    pub path: String,
    pub reason: String,
}

impl DocumentError {
    pub fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { path: path.into(), reason: reason.into() }
    }
}

type Result<T> = std::result::Result<T, DocumentError>;

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiDocument {
    pub schema_version: u64,
    pub role: Role,
    /// Factor labels and dims in matrix order.
    pub matrix: LabeledMatrix,
}

fn known_fields(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(DocumentError::new(format!("{prefix}{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, prefix: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| DocumentError::new(format!("{prefix}{key}"), "missing field"))
}

fn rows(v: &Value, path: &str) -> Result<Vec<Vec<f64>>> {
    let rows = v.as_array().ok_or_else(|| DocumentError::new(path, "expected an array of rows"))?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let rp = format!("{path}[{i}]");
            let r = r.as_array().ok_or_else(|| DocumentError::new(&rp, "expected an array of numbers"))?;
            r.iter()
                .enumerate()
                .map(|(j, x)| x.as_f64().filter(|x| x.is_finite()).ok_or_else(|| DocumentError::new(format!("{rp}[{j}]"), "expected a finite number")))
                .collect()
        })
        .collect()
}

/// Parses and validates a document: schema, shape, size against `dims`
/// and Hermiticity. Role-specific conditions are left to the checks.
pub fn parse_choi(bytes: &[u8]) -> Result<ChoiDocument> {
    let text = std::str::from_utf8(bytes).map_err(|e| DocumentError::new("", format!("not valid UTF-8: {e}")))?;
    let root: Value = serde_json::from_str(text).map_err(|e| DocumentError::new("", format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| DocumentError::new("", "expected a JSON object"))?;
    known_fields(obj, &["schema_version", "role", "dims", "matrix"], "")?;

    let version = field(obj, "schema_version", "")?;
    let schema_version = version.as_u64().ok_or_else(|| DocumentError::new("schema_version", "expected a non-negative integer"))?;
    if schema_version != SCHEMA_VERSION {
        return Err(DocumentError::new("schema_version", format!("unsupported version {schema_version}, expected {SCHEMA_VERSION}")));
    }

    let role = field(obj, "role", "")?;
    let role = role.as_str().and_then(Role::parse).ok_or_else(|| {
        let names: Vec<&str> = Role::ALL.iter().map(|r| r.as_str()).collect();
        DocumentError::new("role", format!("expected one of {}", names.join(", ")))
    })?;

    let dims = field(obj, "dims", "")?.as_object().ok_or_else(|| DocumentError::new("dims", "expected an object of label to dimension"))?;
    if dims.is_empty() {
        return Err(DocumentError::new("dims", "at least one factor is required"));
    }
    let mut factors = Vec::with_capacity(dims.len());
    for (label, d) in dims {
        let path = format!("dims.{label}");
        if label.is_empty() {
            return Err(DocumentError::new(path, "labels must be non-empty"));
        }
        let d = d.as_u64().filter(|&d| d > 0).ok_or_else(|| DocumentError::new(&path, "expected a positive integer"))?;
        factors.push((label.clone(), usize::try_from(d).map_err(|_| DocumentError::new(&path, "dimension too large"))?));
    }
    let spec = DimSpec::new(factors).map_err(|e| DocumentError::new("dims", e.to_string()))?;
    let total = spec.dims().iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| DocumentError::new("dims", "total dimension overflows"))?;

    let m = field(obj, "matrix", "")?.as_object().ok_or_else(|| DocumentError::new("matrix", "expected an object with re and im"))?;
    known_fields(m, &["re", "im"], "matrix.")?;
    let re = rows(field(m, "re", "matrix.")?, "matrix.re")?;
    let im = rows(field(m, "im", "matrix.")?, "matrix.im")?;
    let n = re.len();
    for (name, part) in [("re", &re), ("im", &im)] {
        if part.len() != n || part.iter().any(|r| r.len() != n) {
            return Err(DocumentError::new("matrix", format!("{name} is not a square {n}x{n} array")));
        }
    }
    if n != total {
        return Err(DocumentError::new("matrix", format!("matrix is {n}x{n} but dims {spec} give {total}")));
    }
    let data: Vec<C64> = re.iter().flatten().zip(im.iter().flatten()).map(|(&a, &b)| C64::new(a, b)).collect();
    let mat = CMatrix::from_vec(n, n, data);
    let defect = mat.hermiticity_defect();
    if defect > HERMITIAN_TOL * mat.max_abs().max(1.0) {
        return Err(DocumentError::new("matrix", format!("not Hermitian (max |M - M^dagger| = {defect:.3e})")));
    }
    let matrix = LabeledMatrix::new(spec, mat).map_err(|e| DocumentError::new("matrix", e.to_string()))?;
    Ok(ChoiDocument { schema_version, role, matrix })
}

fn float(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

impl ChoiDocument {
    pub fn new(role: Role, matrix: LabeledMatrix) -> Self {
        Self { schema_version: SCHEMA_VERSION, role, matrix }
    }

    pub fn channel(n: &BipartiteChannel) -> Self {
        Self::new(Role::Channel, n.choi().clone())
    }

    pub fn superchannel(t: &Superchannel) -> Self {
        Self::new(Role::Superchannel, t.choi().clone())
    }

    /// Full-precision JSON value; numbers use the shortest round-trip form.
    pub fn to_value(&self) -> Value {
        let mut dims = Map::new();
        for (l, d) in self.matrix.spec().factors() {
            dims.insert(l.clone(), Value::from(*d));
        }
        let m = self.matrix.matrix();
        let part = |f: fn(&C64) -> f64| -> Value { Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|z| float(f(z))).collect())).collect()) };
        let mut matrix = Map::new();
        matrix.insert("re".into(), part(|z| z.re));
        matrix.insert("im".into(), part(|z| z.im));
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(self.schema_version));
        root.insert("role".into(), Value::from(self.role.as_str()));
        root.insert("dims".into(), Value::Object(dims));
        root.insert("matrix".into(), Value::Object(matrix));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }

    fn expect_role(&self, allowed: &[Role]) -> Result<()> {
        if allowed.contains(&self.role) {
            return Ok(());
        }
        let names: Vec<&str> = allowed.iter().map(|r| r.as_str()).collect();
        Err(DocumentError::new("role", format!("expected {}, got {}", names.join(" or "), self.role)))
    }

    fn expect_labels(&self, labels: &[&str]) -> Result<()> {
        let s = self.matrix.spec();
        if s.len() != labels.len() || !labels.iter().all(|l| s.contains(l)) {
            return Err(DocumentError::new("dims", format!("expected factors {}, got {s}", labels.join(", "))));
        }
        Ok(())
    }

    /// Channel (role `channel` or `povm`) or trivial-input preparation
    /// (role `state`), validated as CPTP.
    pub fn to_channel(&self) -> Result<BipartiteChannel> {
        self.expect_role(&[Role::Channel, Role::Povm, Role::State])?;
        if self.role == Role::State {
            if self.matrix.spec().len() != 2 {
                return Err(DocumentError::new("dims", format!("a state needs two factors, got {}", self.matrix.spec())));
            }
            return state_preparation(&self.matrix).map_err(|e| DocumentError::new("matrix", e.to_string()));
        }
        self.expect_labels(&CHANNEL_ORDER)?;
        BipartiteChannel::from_choi(self.matrix.clone()).map_err(|e| DocumentError::new("matrix", e.to_string()))
    }

    /// Superchannel Choi over the eight superchannel factors, unvalidated.
    pub fn to_superchannel(&self) -> Result<Superchannel> {
        self.expect_role(&[Role::Superchannel])?;
        self.expect_labels(&SUPERCHANNEL_ORDER)?;
        Superchannel::from_choi(self.matrix.clone()).map_err(|e| DocumentError::new("dims", e.to_string()))
    }

    /// Comb over `A0^k B0^k A1^k B1^k` for `k = 1..=n+1`, unvalidated.
    /// Memory is internal to the layers and does not enter the Choi matrix.
    pub fn to_comb(&self) -> Result<Comb> {
        self.expect_role(&[Role::Comb])?;
        let s = self.matrix.spec();
        if s.len() % 4 != 0 || s.len() < 8 {
            return Err(DocumentError::new("dims", format!("a comb needs 4(n+1) wire factors with n >= 1, got {s}")));
        }
        let mut wires = Vec::new();
        for k in 1..=s.len() / 4 {
            let dim = |base: &str| {
                let l = wire_label(base, k);
                s.dim_of(&l).map_err(|_| DocumentError::new("dims", format!("missing comb factor {l}")))
            };
            wires.push(ChannelDims::new(dim(A0)?, dim(B0)?, dim(A1)?, dim(B1)?));
        }
        let memory = vec![(1, 1); wires.len() - 1];
        Comb::from_choi(CombLayout { wires, memory }, self.matrix.clone()).map_err(|e| DocumentError::new("dims", e.to_string()))
    }

    /// First violated role condition, if any.
    pub fn defect(&self) -> Result<Option<String>> {
        Ok(match self.role {
            Role::Channel => {
                self.expect_labels(&CHANNEL_ORDER)?;
                channel_defect(&self.matrix.permute(&CHANNEL_ORDER).map_err(|e| DocumentError::new("dims", e.to_string()))?)
            }
            Role::State => {
                let t = self.matrix.trace();
                if !is_psd(&self.matrix) {
                    Some("state is not PSD".into())
                } else if (t.re - 1.0).abs() > HERMITIAN_TOL || t.im.abs() > HERMITIAN_TOL {
                    Some(format!("state trace {} is not 1", t.re))
                } else {
                    None
                }
            }
            Role::Povm => {
                self.expect_labels(&CHANNEL_ORDER)?;
                let j = self.matrix.permute(&CHANNEL_ORDER).map_err(|e| DocumentError::new("dims", e.to_string()))?;
                channel_defect(&j).or_else(|| classical_outcome_defect(&j))
            }
            Role::Superchannel => crate::quantum::superchannel_defect(self.to_superchannel()?.choi()),
            Role::Comb => {
                let c = self.to_comb()?;
                comb_defect(c.layout(), c.choi())
            }
        })
    }
}

/// A measurement channel has trivial `B1` and is block diagonal in the
/// outcome register `A1`.
fn classical_outcome_defect(j: &LabeledMatrix) -> Option<String> {
    let s = j.spec();
    if s.dim_of(B1).ok()? != 1 {
        return Some("measurement channel must have trivial B1".into());
    }
    let (din, k) = (s.dim_of_set(&[A0, B0]).ok()?, s.dim_of(A1).ok()?);
    let m = j.matrix();
    let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
    for r in 0..din * k {
        for c in 0..din * k {
            if r % k != c % k && m[(r, c)].norm() > tol {
                return Some("measurement channel has coherences between outcomes".into());
            }
        }
    }
    None
}

/// Slot and output dims read off the superchannel factor labels.
pub fn superchannel_dims(spec: &DimSpec) -> Option<(ChannelDims, ChannelDims)> {
    let d = |l: &str| spec.dim_of(l).ok();
    Some((ChannelDims::new(d(A0)?, d(B0)?, d(A1)?, d(B1)?), ChannelDims::new(d(A0P)?, d(B0P)?, d(A1P)?, d(B1P)?)))
}
