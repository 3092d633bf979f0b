//! JSON payloads for exact objects.
//!
//! Rationals are `["num", "den"]` string pairs in lowest terms. A trigonometric
//! polynomial stores one frequency of each `+-m` pair (first nonzero entry
//! positive), sorted lexicographically; the partner follows from Hermitian
//! symmetry. Parse errors carry a JSON path such as `$.comps[2].scalar.terms[0].re`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::connection::Connection;
use crate::error::{parse_err, Error, Result};
use crate::lie::ExtElement;
use crate::scalars::{Coeff, Freq, Rational, TrigScalar};
use crate::tensors::{SymTensorField, SymplecticModel, Tensor};

/// Objects with a canonical JSON form.
pub trait Payload: Sized {
    fn to_json(&self) -> Value;
    fn from_json_at(v: &Value, at: &str) -> Result<Self>;

    fn from_json(v: &Value) -> Result<Self> {
        Self::from_json_at(v, "$")
    }
}

/// Pretty-printed canonical text.
pub fn to_text<T: Payload>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(&x.to_json()).expect("payload values serialize");
    s.push('\n');
    s
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

pub fn from_text<T: Payload>(text: &str) -> Result<T> {
    T::from_json(&parse_value(text)?)
}

fn field<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a Value> {
    let obj = v.as_object().ok_or_else(|| parse_err(at, "expected an object"))?;
    obj.get(key).ok_or_else(|| parse_err(at, format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(at, "expected an array"))
}

fn uint(v: &Value, at: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| parse_err(at, "expected a non-negative integer"))
}

fn int(v: &Value, at: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| parse_err(at, "expected an integer"))
}

fn model_at(v: &Value, at: &str) -> Result<SymplecticModel> {
    let n = uint(field(v, "n", at)?, &format!("{at}.n"))?;
    SymplecticModel::new(n).map_err(|e| parse_err(format!("{at}.n"), e.to_string()))
}

fn relocate(e: Error, at: &str) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => parse_err(at, other.to_string()),
    }
}

impl Payload for Rational {
    fn to_json(&self) -> Value {
        json!([self.numer().to_string(), self.denom().to_string()])
    }

    fn from_json_at(v: &Value, at: &str) -> Result<Self> {
        let pair = array(v, at)?;
        if pair.len() != 2 {
            return Err(parse_err(at, "rational needs [\"num\", \"den\"]"));
        }
        let part = |k: usize| -> Result<BigInt> {
            let here = format!("{at}[{k}]");
            let s = pair[k].as_str().ok_or_else(|| parse_err(&here, "expected a decimal string"))?;
            s.parse::<BigInt>().map_err(|e| parse_err(&here, format!("bad integer `{s}`: {e}")))
        };
        let (num, den) = (part(0)?, part(1)?);
        if den == BigInt::from(0) {
            return Err(parse_err(format!("{at}[1]"), "zero denominator"));
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

impl Payload for TrigScalar<Rational> {
    fn to_json(&self) -> Value {
        let dim = self.dim();
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .filter(|(m, _)| m.is_canonical())
            .map(|(m, c)| json!({ "m": m.to_vec(dim), "re": c.re.to_json(), "im": c.im.to_json() }))
            .collect();
        json!({ "dim": dim, "terms": terms })
    }

    fn from_json_at(v: &Value, at: &str) -> Result<Self> {
        let dim = uint(field(v, "dim", at)?, &format!("{at}.dim"))?;
        if dim == 0 || dim % 2 != 0 || dim > crate::scalars::MAX_DIM {
            return Err(parse_err(format!("{at}.dim"), format!("unsupported torus dimension {dim}")));
        }
        let mut out = TrigScalar::zero(dim);
        let mut prev: Option<Freq> = None;
        for (k, t) in array(field(v, "terms", at)?, &format!("{at}.terms"))?.iter().enumerate() {
            let here = format!("{at}.terms[{k}]");
            let mv = array(field(t, "m", &here)?, &format!("{here}.m"))?;
            let m: Vec<i64> = mv.iter().enumerate().map(|(i, x)| int(x, &format!("{here}.m[{i}]"))).collect::<Result<_>>()?;
            if m.len() != dim {
                return Err(parse_err(format!("{here}.m"), format!("expected {dim} entries, got {}", m.len())));
            }
            let f = Freq::from_slice(&m).map_err(|e| relocate(e, &format!("{here}.m")))?;
            if !f.is_canonical() {
                return Err(parse_err(format!("{here}.m"), "first nonzero entry must be positive"));
            }
            if prev.is_some_and(|p| p >= f) {
                return Err(parse_err(format!("{here}.m"), "frequencies must be strictly increasing"));
            }
            prev = Some(f);
            let re = Rational::from_json_at(field(t, "re", &here)?, &format!("{here}.re"))?;
            let im = Rational::from_json_at(field(t, "im", &here)?, &format!("{here}.im"))?;
            if f.is_zero() && !im.is_zero() {
                return Err(parse_err(format!("{here}.im"), "constant term must be real"));
            }
            if re.is_zero() && im.is_zero() {
                return Err(parse_err(&here, "zero coefficients are not stored"));
            }
            out = &out + &TrigScalar::hermitian_mode(dim, f, &Coeff::new(re, im));
        }
        Ok(out)
    }
}

impl Payload for SymTensorField<Rational> {
    fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components()
            .iter()
            .filter(|(_, f)| !f.is_zero())
            .map(|(idx, f)| json!({ "idx": idx, "scalar": f.to_json() }))
            .collect();
        json!({ "n": self.model().n(), "degree": self.degree(), "comps": comps })
    }

    fn from_json_at(v: &Value, at: &str) -> Result<Self> {
        let model = model_at(v, at)?;
        let degree = uint(field(v, "degree", at)?, &format!("{at}.degree"))?;
        let mut out = SymTensorField::zero(model, degree);
        let mut prev: Option<Vec<u8>> = None;
        for (k, c) in array(field(v, "comps", at)?, &format!("{at}.comps"))?.iter().enumerate() {
            let here = format!("{at}.comps[{k}]");
            let idx = index(field(c, "idx", &here)?, &format!("{here}.idx"), degree, model.dim())?;
            if idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(parse_err(format!("{here}.idx"), "index must be sorted"));
            }
            if prev.as_ref().is_some_and(|p| *p >= idx) {
                return Err(parse_err(format!("{here}.idx"), "components must be strictly increasing"));
            }
            prev = Some(idx.clone());
            let f = scalar_on(c, &here, model)?;
            out.set(&idx, f);
        }
        Ok(out)
    }
}

fn index(v: &Value, at: &str, len: usize, dim: usize) -> Result<Vec<u8>> {
    let a = array(v, at)?;
    if a.len() != len {
        return Err(parse_err(at, format!("expected {len} indices, got {}", a.len())));
    }
    a.iter()
        .enumerate()
        .map(|(i, x)| {
            let here = format!("{at}[{i}]");
            let k = uint(x, &here)?;
            if k >= dim {
                return Err(parse_err(here, format!("index {k} out of range for dimension {dim}")));
            }
            Ok(k as u8)
        })
        .collect()
}

fn scalar_on(c: &Value, at: &str, model: SymplecticModel) -> Result<TrigScalar<Rational>> {
    let here = format!("{at}.scalar");
    let f = TrigScalar::from_json_at(field(c, "scalar", at)?, &here)?;
    if f.dim() != model.dim() {
        return Err(parse_err(format!("{here}.dim"), format!("expected {}, got {}", model.dim(), f.dim())));
    }
    if f.is_zero() {
        return Err(parse_err(here, "zero components are not stored"));
    }
    Ok(f)
}

/// General tensors: `{ "n", "rank", "entries": [{ "idx", "scalar" }] }`, nonzero entries only.
fn dense_json(model: SymplecticModel, t: &Tensor<Rational>) -> Value {
    let entries: Vec<Value> =
        t.entries().filter(|(_, f)| !f.is_zero()).map(|(idx, f)| json!({ "idx": idx, "scalar": f.to_json() })).collect();
    json!({ "n": model.n(), "rank": t.rank(), "entries": entries })
}

fn dense_from(v: &Value, at: &str) -> Result<(SymplecticModel, Tensor<Rational>)> {
    let model = model_at(v, at)?;
    let rank = uint(field(v, "rank", at)?, &format!("{at}.rank"))?;
    let mut t = Tensor::zeros(model.dim(), rank);
    let mut prev: Option<Vec<u8>> = None;
    for (k, e) in array(field(v, "entries", at)?, &format!("{at}.entries"))?.iter().enumerate() {
        let here = format!("{at}.entries[{k}]");
        let idx = index(field(e, "idx", &here)?, &format!("{here}.idx"), rank, model.dim())?;
        if prev.as_ref().is_some_and(|p| *p >= idx) {
            return Err(parse_err(format!("{here}.idx"), "entries must be strictly increasing"));
        }
        prev = Some(idx.clone());
        t.set(&idx, scalar_on(e, &here, model)?);
    }
    Ok((model, t))
}

impl Payload for Connection<Rational> {
    fn to_json(&self) -> Value {
        let m = self.model();
        let pi = match self.pi_sym() {
            Ok(s) if self.is_torsion_free() => s.to_json(),
            _ => dense_json(m, self.pi()),
        };
        json!({ "n": m.n(), "torsion_free": self.is_torsion_free(), "pi": pi })
    }

    fn from_json_at(v: &Value, at: &str) -> Result<Self> {
        let model = model_at(v, at)?;
        let tf = field(v, "torsion_free", at)?.as_bool().ok_or_else(|| parse_err(format!("{at}.torsion_free"), "expected a boolean"))?;
        let here = format!("{at}.pi");
        let pv = field(v, "pi", at)?;
        let c = if tf {
            let s = SymTensorField::from_json_at(pv, &here)?;
            if s.degree() != 3 {
                return Err(parse_err(format!("{here}.degree"), "connection needs degree 3"));
            }
            if s.model() != model {
                return Err(parse_err(format!("{here}.n"), "differs from the connection's n"));
            }
            Connection::from_sym(&s).map_err(|e| relocate(e, &here))?
        } else {
            let (m2, t) = dense_from(pv, &here)?;
            if m2 != model {
                return Err(parse_err(format!("{here}.n"), "differs from the connection's n"));
            }
            let c = Connection::from_tensor(model, t).map_err(|e| relocate(e, &here))?;
            if c.is_torsion_free() {
                return Err(parse_err(format!("{at}.torsion_free"), "false, but the difference tensor is symmetric"));
            }
            c
        };
        Ok(c)
    }
}

impl Payload for ExtElement<Rational> {
    fn to_json(&self) -> Value {
        json!({ "a0": self.a0.to_json(), "a2": self.a2.to_json(), "a3": self.a3.to_json() })
    }

    fn from_json_at(v: &Value, at: &str) -> Result<Self> {
        let a0 = TrigScalar::from_json_at(field(v, "a0", at)?, &format!("{at}.a0"))?;
        let a2 = SymTensorField::from_json_at(field(v, "a2", at)?, &format!("{at}.a2"))?;
        let a3 = SymTensorField::from_json_at(field(v, "a3", at)?, &format!("{at}.a3"))?;
        ExtElement::new(a0, a2, a3).map_err(|e| relocate(e, at))
    }
}

/// Any exportable object, recognized by its keys.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPayload {
    Scalar(TrigScalar<Rational>),
    Tensor(SymTensorField<Rational>),
    Connection(Connection<Rational>),
    Ext(ExtElement<Rational>),
}

impl Payload for AnyPayload {
    fn to_json(&self) -> Value {
        match self {
            AnyPayload::Scalar(x) => x.to_json(),
            AnyPayload::Tensor(x) => x.to_json(),
            AnyPayload::Connection(x) => x.to_json(),
            AnyPayload::Ext(x) => x.to_json(),
        }
    }

    fn from_json_at(v: &Value, at: &str) -> Result<Self> {
        let obj: &Map<String, Value> = v.as_object().ok_or_else(|| parse_err(at, "expected an object"))?;
        if obj.contains_key("terms") {
            TrigScalar::from_json_at(v, at).map(AnyPayload::Scalar)
        } else if obj.contains_key("comps") {
            SymTensorField::from_json_at(v, at).map(AnyPayload::Tensor)
        } else if obj.contains_key("torsion_free") {
            Connection::from_json_at(v, at).map(AnyPayload::Connection)
        } else if obj.contains_key("a0") {
            ExtElement::from_json_at(v, at).map(AnyPayload::Ext)
        } else {
            Err(parse_err(at, "unrecognized payload: expected a scalar, tensor, connection or extended element"))
        }
    }
}
