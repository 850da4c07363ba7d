use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::MapError;
use crate::exact_linalg::{IntMatrix2, Rational};
use crate::numeric::{self, Mat2, Vec2, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Sin,
    Cos,
}

/// `coef · sin(2π k·x)` or `coef · cos(2π k·x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub coef: Vec2,
    pub freq: [i64; 2],
    pub phase: Phase,
}

impl TrigTerm {
    pub fn sin(coef: Vec2, freq: [i64; 2]) -> Self {
        TrigTerm { coef, freq, phase: Phase::Sin }
    }

    pub fn cos(coef: Vec2, freq: [i64; 2]) -> Self {
        TrigTerm { coef, freq, phase: Phase::Cos }
    }

    fn lipschitz(&self) -> f64 {
        TAU * numeric::norm(self.coef) * numeric::norm([self.freq[0] as f64, self.freq[1] as f64])
    }
}

/// A lift `F: R^2 → R^2` with `F(x + k) = F(x) + M k`.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusLift {
    Affine { m: IntMatrix2, t: Vec2 },
    TrigPerturbed { m: IntMatrix2, t: Vec2, terms: Vec<TrigTerm> },
    /// `outer ∘ inner`.
    Compose(Box<TorusLift>, Box<TorusLift>),
    Inverse(Box<TorusLift>),
}

impl TorusLift {
    pub fn affine(m: IntMatrix2, t: Vec2) -> Result<Self, MapError> {
        if m.det().abs() != 1 {
            return Err(MapError::Invalid(format!("linear part {m} is not invertible over Z")));
        }
        Ok(TorusLift::Affine { m, t })
    }

    pub fn linear(m: IntMatrix2) -> Result<Self, MapError> {
        Self::affine(m, [0.0, 0.0])
    }

    pub fn translation(t: Vec2) -> Self {
        TorusLift::Affine { m: IntMatrix2::IDENTITY, t }
    }

    pub fn identity() -> Self {
        Self::translation([0.0, 0.0])
    }

    /// `Mx + t + Σ terms`, rejected unless it is invertible by a verified scheme.
    pub fn trig(m: IntMatrix2, t: Vec2, terms: Vec<TrigTerm>) -> Result<Self, MapError> {
        if m.det().abs() != 1 {
            return Err(MapError::Invalid(format!("linear part {m} is not invertible over Z")));
        }
        let f = TorusLift::TrigPerturbed { m, t, terms };
        if f.triangular_shear().is_none() {
            let lip = f.perturbation_lipschitz();
            let bound = 1.0 / numeric::op_norm(&numeric::mat_inv(&m.to_f64()));
            if lip >= bound {
                return Err(MapError::NotInvertible { lip, bound });
            }
        }
        Ok(f)
    }

    pub fn compose(outer: TorusLift, inner: TorusLift) -> Self {
        TorusLift::Compose(Box::new(outer), Box::new(inner))
    }

    /// Inverse node, pushed down to the leaves.
    pub fn inverse(f: TorusLift) -> Self {
        match f {
            TorusLift::Inverse(g) => *g,
            TorusLift::Compose(a, b) => TorusLift::compose(TorusLift::inverse(*b), TorusLift::inverse(*a)),
            leaf => TorusLift::Inverse(Box::new(leaf)),
        }
    }

    /// The cat map `[[2,1],[1,1]]`.
    pub fn cat() -> Self {
        TorusLift::Affine { m: IntMatrix2::new(2, 1, 1, 1), t: [0.0, 0.0] }
    }

    /// `(x + eps sin 2πy, y)`.
    pub fn shear(eps: f64) -> Self {
        TorusLift::TrigPerturbed {
            m: IntMatrix2::IDENTITY,
            t: [0.0, 0.0],
            terms: vec![TrigTerm::sin([eps, 0.0], [0, 1])],
        }
    }

    /// `cat ∘ shear(eps)`.
    pub fn cat_shear(eps: f64) -> Self {
        TorusLift::compose(TorusLift::cat(), TorusLift::shear(eps))
    }

    pub fn linear_part(&self) -> IntMatrix2 {
        match self {
            TorusLift::Affine { m, .. } | TorusLift::TrigPerturbed { m, .. } => *m,
            TorusLift::Compose(a, b) => a.linear_part().mul(&b.linear_part()),
            TorusLift::Inverse(f) => f.linear_part().inverse().expect("unimodular"),
        }
    }

    /// Sum of `2π |coef| |freq|` over leaf terms: a bound on `Lip(P)`.
    pub fn perturbation_lipschitz(&self) -> f64 {
        match self {
            TorusLift::Affine { .. } => 0.0,
            TorusLift::TrigPerturbed { terms, .. } => terms.iter().map(TrigTerm::lipschitz).sum(),
            TorusLift::Compose(a, b) => a.perturbation_lipschitz() + b.perturbation_lipschitz(),
            TorusLift::Inverse(f) => f.perturbation_lipschitz(),
        }
    }

    pub fn is_affine(&self) -> bool {
        match self {
            TorusLift::Affine { .. } => true,
            TorusLift::TrigPerturbed { terms, .. } => terms.iter().all(|t| t.coef == [0.0, 0.0]),
            TorusLift::Compose(a, b) => a.is_affine() && b.is_affine(),
            TorusLift::Inverse(f) => f.is_affine(),
        }
    }

    /// Axis `i` when the map is `x_i ↦ x_i + t_i + P(x_j)`, `x_j ↦ x_j + t_j`.
    fn triangular_shear(&self) -> Option<usize> {
        let TorusLift::TrigPerturbed { m, terms, .. } = self else { return None };
        if *m != IntMatrix2::IDENTITY {
            return None;
        }
        (0..2).find(|&i| {
            let j = 1 - i;
            terms.iter().all(|t| t.coef[j] == 0.0 && t.freq[i] == 0)
        })
    }

    pub fn eval(&self, x: Vec2) -> Result<Vec2, MapError> {
        self.eval_jac(x).map(|(y, _)| y)
    }

    /// Value and Jacobian at `x`.
    pub fn eval_jac(&self, x: Vec2) -> Result<(Vec2, Mat2), MapError> {
        match self {
            TorusLift::Affine { m, t } => {
                let mf = m.to_f64();
                Ok((numeric::add(numeric::mat_vec(&mf, x), *t), mf))
            }
            TorusLift::TrigPerturbed { m, t, terms } => {
                let mf = m.to_f64();
                let (p, dp) = perturbation(terms, x);
                let y = numeric::add(numeric::add(numeric::mat_vec(&mf, x), *t), p);
                let j = [[mf[0][0] + dp[0][0], mf[0][1] + dp[0][1]], [mf[1][0] + dp[1][0], mf[1][1] + dp[1][1]]];
                Ok((y, j))
            }
            TorusLift::Compose(a, b) => {
                let (y, jb) = b.eval_jac(x)?;
                let (z, ja) = a.eval_jac(y)?;
                Ok((z, numeric::mat_mul(&ja, &jb)))
            }
            TorusLift::Inverse(f) => f.inverse_eval_jac(x),
        }
    }

    /// `F⁻¹(y)` and its Jacobian.
    pub fn inverse_eval_jac(&self, y: Vec2) -> Result<(Vec2, Mat2), MapError> {
        match self {
            TorusLift::Affine { m, t } => {
                let mi = numeric::mat_inv(&m.to_f64());
                Ok((numeric::mat_vec(&mi, numeric::sub(y, *t)), mi))
            }
            TorusLift::TrigPerturbed { m, t, terms } => {
                if let Some(i) = self.triangular_shear() {
                    let j = 1 - i;
                    let mut x = [0.0; 2];
                    x[j] = y[j] - t[j];
                    let (p, _) = perturbation(terms, x);
                    x[i] = y[i] - t[i] - p[i];
                    let (_, jac) = self.eval_jac(x)?;
                    return Ok((x, numeric::mat_inv(&jac)));
                }
                newton_inverse(&m.to_f64(), *t, terms, y)
            }
            TorusLift::Compose(a, b) => {
                let (u, ja) = a.inverse_eval_jac(y)?;
                let (x, jb) = b.inverse_eval_jac(u)?;
                Ok((x, numeric::mat_mul(&jb, &ja)))
            }
            TorusLift::Inverse(f) => f.eval_jac(y),
        }
    }

    pub fn inverse_eval(&self, y: Vec2) -> Result<Vec2, MapError> {
        self.inverse_eval_jac(y).map(|(x, _)| x)
    }

    /// `F^n(x)` in the plane.
    pub fn iterate(&self, x: Vec2, n: usize) -> Result<Vec2, MapError> {
        let mut y = x;
        for _ in 0..n {
            y = self.eval(y)?;
        }
        Ok(y)
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let v: Value = serde_json::from_str(text).map_err(|e| MapError::Parse(e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self, MapError> {
        let family = v.get("family").and_then(Value::as_str).ok_or_else(|| MapError::Parse("missing \"family\"".into()))?;
        let field = |k: &str| v.get(k).ok_or_else(|| MapError::Parse(format!("missing \"{k}\"")));
        match family {
            "affine" | "trig_perturbed" => {
                let m = match v.get("M") {
                    Some(mv) => serde_json::from_value::<IntMatrix2>(mv.clone()).map_err(|e| MapError::Parse(format!("M: {e}")))?,
                    None => IntMatrix2::IDENTITY,
                };
                let t = match v.get("t") {
                    Some(tv) => parse_vec2(tv)?,
                    None => [0.0, 0.0],
                };
                if family == "affine" {
                    return Self::affine(m, t);
                }
                let terms = match v.get("terms") {
                    Some(Value::Array(items)) => items.iter().map(parse_term).collect::<Result<Vec<_>, _>>()?,
                    Some(_) => return Err(MapError::Parse("\"terms\" must be an array".into())),
                    None => Vec::new(),
                };
                Self::trig(m, t, terms)
            }
            "compose" => Ok(Self::compose(Self::from_value(field("outer")?)?, Self::from_value(field("inner")?)?)),
            "inverse" => Ok(Self::inverse(Self::from_value(field("of")?)?)),
            other => Err(MapError::Parse(format!("unknown family \"{other}\""))),
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            TorusLift::Affine { m, t } => json!({"family": "affine", "M": m, "t": t}),
            TorusLift::TrigPerturbed { m, t, terms } => json!({
                "family": "trig_perturbed",
                "M": m,
                "t": t,
                "terms": terms.iter().map(|term| json!({
                    "coef": term.coef,
                    "freq": term.freq,
                    "phase": match term.phase { Phase::Sin => "sin", Phase::Cos => "cos" },
                })).collect::<Vec<_>>(),
            }),
            TorusLift::Compose(a, b) => json!({"family": "compose", "outer": a.to_value(), "inner": b.to_value()}),
            TorusLift::Inverse(f) => json!({"family": "inverse", "of": f.to_value()}),
        }
    }
}

impl Serialize for TorusLift {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusLift {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        TorusLift::from_value(&v).map_err(serde::de::Error::custom)
    }
}

fn perturbation(terms: &[TrigTerm], x: Vec2) -> (Vec2, Mat2) {
    let mut p = [0.0; 2];
    let mut dp = [[0.0; 2]; 2];
    for term in terms {
        let k = [term.freq[0] as f64, term.freq[1] as f64];
        let arg = TAU * (k[0] * x[0] + k[1] * x[1]);
        let (s, c) = arg.sin_cos();
        let (val, der) = match term.phase {
            Phase::Sin => (s, TAU * c),
            Phase::Cos => (c, -TAU * s),
        };
        for i in 0..2 {
            p[i] += term.coef[i] * val;
            for j in 0..2 {
                dp[i][j] += term.coef[i] * der * k[j];
            }
        }
    }
    (p, dp)
}

/// Solves `Mx + t + P(x) = y`: Newton, with the contraction
/// `x ↦ M⁻¹(y - t - P(x))` as fallback when a Newton step does not help.
fn newton_inverse(m: &Mat2, t: Vec2, terms: &[TrigTerm], y: Vec2) -> Result<(Vec2, Mat2), MapError> {
    let mi = numeric::mat_inv(m);
    let residual = |x: Vec2| {
        let (p, dp) = perturbation(terms, x);
        let g = numeric::sub(numeric::add(numeric::add(numeric::mat_vec(m, x), t), p), y);
        let j = [[m[0][0] + dp[0][0], m[0][1] + dp[0][1]], [m[1][0] + dp[1][0], m[1][1] + dp[1][1]]];
        (g, j, p)
    };
    let mut x = numeric::mat_vec(&mi, numeric::sub(y, t));
    let tol = 1e-15 * (1.0 + numeric::norm(y));
    for _ in 0..200 {
        let (g, j, p) = residual(x);
        let r = numeric::norm(g);
        if r <= tol {
            return Ok((x, numeric::mat_inv(&j)));
        }
        let newton = numeric::sub(x, numeric::mat_vec(&numeric::mat_inv(&j), g));
        let (gn, _, _) = residual(newton);
        x = if numeric::norm(gn) < r && newton[0].is_finite() && newton[1].is_finite() {
            newton
        } else {
            numeric::mat_vec(&mi, numeric::sub(numeric::sub(y, t), p))
        };
        if !(x[0].is_finite() && x[1].is_finite()) {
            break;
        }
    }
    let (g, j, _) = residual(x);
    if numeric::norm(g) <= 1e-12 * (1.0 + numeric::norm(y)) {
        return Ok((x, numeric::mat_inv(&j)));
    }
    Err(MapError::InversionDivergence { at: y })
}

fn parse_num(v: &Value) -> Result<f64, MapError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| MapError::Parse(format!("bad number {n}"))),
        Value::String(s) => s
            .parse::<Rational>()
            .map(|r| r.to_f64())
            .map_err(|e| MapError::Parse(format!("bad number \"{s}\": {e}"))),
        other => Err(MapError::Parse(format!("expected number, got {other}"))),
    }
}

fn parse_vec2(v: &Value) -> Result<Vec2, MapError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok([parse_num(a)?, parse_num(b)?]),
        _ => Err(MapError::Parse(format!("expected a 2-vector, got {v}"))),
    }
}

fn parse_term(v: &Value) -> Result<TrigTerm, MapError> {
    let coef = parse_vec2(v.get("coef").ok_or_else(|| MapError::Parse("term missing \"coef\"".into()))?)?;
    let fv = parse_vec2(v.get("freq").ok_or_else(|| MapError::Parse("term missing \"freq\"".into()))?)?;
    if fv.iter().any(|k| k.fract() != 0.0) {
        return Err(MapError::Parse("frequencies must be integers".into()));
    }
    let phase = match v.get("phase").and_then(Value::as_str).unwrap_or("sin") {
        "sin" => Phase::Sin,
        "cos" => Phase::Cos,
        p => return Err(MapError::Parse(format!("unknown phase \"{p}\""))),
    };
    Ok(TrigTerm { coef, freq: [fv[0] as i64, fv[1] as i64], phase })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        numeric::norm(numeric::sub(a, b)) < tol
    }

    #[test]
    fn periodicity_of_composite() {
        let f = TorusLift::compose(TorusLift::cat_shear(0.05), TorusLift::inverse(TorusLift::shear(0.3)));
        let m = f.linear_part().to_f64();
        for x in [[0.1, 0.7], [0.33, -0.2]] {
            for k in [[1.0, 0.0], [-2.0, 1.0], [2.0, 2.0]] {
                let lhs = f.eval(numeric::add(x, k)).unwrap();
                let rhs = numeric::add(f.eval(x).unwrap(), numeric::mat_vec(&m, k));
                assert!(close(lhs, rhs, 1e-12));
            }
        }
    }

    #[test]
    fn inverses_round_trip() {
        let general = TorusLift::trig(
            IntMatrix2::new(2, 1, 1, 1),
            [0.1, 0.0],
            vec![TrigTerm::cos([0.02, 0.01], [1, 1]), TrigTerm::sin([0.0, 0.02], [1, 0])],
        )
        .unwrap();
        for f in [TorusLift::cat_shear(0.3), TorusLift::shear(0.3), general] {
            let g = TorusLift::inverse(f.clone());
            for x in [[0.2, 0.9], [-1.3, 0.4]] {
                assert!(close(g.eval(f.eval(x).unwrap()).unwrap(), x, 1e-12));
                let (_, jf) = f.eval_jac(x).unwrap();
                let (_, jg) = g.eval_jac(f.eval(x).unwrap()).unwrap();
                let p = numeric::mat_mul(&jg, &jf);
                assert!((p[0][0] - 1.0).abs() < 1e-10 && p[0][1].abs() < 1e-10 && (p[1][1] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let f = TorusLift::compose(TorusLift::cat_shear(0.05), TorusLift::shear(0.1));
        let x = [0.31, 0.77];
        let (_, j) = f.eval_jac(x).unwrap();
        let h = 1e-6;
        for c in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let d = numeric::scale(0.5 / h, numeric::sub(f.eval(xp).unwrap(), f.eval(xm).unwrap()));
            assert!((d[0] - j[0][c]).abs() < 1e-7 && (d[1] - j[1][c]).abs() < 1e-7);
        }
    }

    #[test]
    fn large_general_perturbation_rejected() {
        let r = TorusLift::trig(IntMatrix2::new(2, 1, 1, 1), [0.0, 0.0], vec![TrigTerm::sin([0.5, 0.5], [1, 1])]);
        assert!(matches!(r, Err(MapError::NotInvertible { .. })));
    }

    #[test]
    fn json_round_trip_and_strings() {
        let text = r#"{"family":"compose",
            "outer":{"family":"affine","M":[[2,1],[1,1]],"t":[0,"1/4"]},
            "inner":{"family":"trig_perturbed","M":[[1,0],[0,1]],"t":[0,0],
                     "terms":[{"coef":["1/20",0],"freq":[0,1],"phase":"sin"}]}}"#;
        let f = TorusLift::from_json(text).unwrap();
        let x = [0.3, 0.4];
        let expect = TorusLift::compose(TorusLift::affine(IntMatrix2::new(2, 1, 1, 1), [0.0, 0.25]).unwrap(), TorusLift::shear(0.05));
        assert!(close(f.eval(x).unwrap(), expect.eval(x).unwrap(), 1e-15));
        let back = TorusLift::from_value(&f.to_value()).unwrap();
        assert_eq!(back, f);
        assert!(TorusLift::from_json(r#"{"family":"nope"}"#).is_err());
    }
}
