//! Integer 2×2 matrices and dense matrices over a quadratic field.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{LinalgError, QuadNum, Rational};

/// A 2×2 integer matrix, row-major. JSON form `[[a,b],[c,d]]`; entries may
/// be numbers or integer strings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct IntMatrix2(pub [[i64; 2]; 2]);

impl<'de> Deserialize<'de> for IntMatrix2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Cell {
            Int(i64),
            Str(String),
        }
        let rows: [[Cell; 2]; 2] = Deserialize::deserialize(d)?;
        let conv = |c: &Cell| -> Result<i64, D::Error> {
            match c {
                Cell::Int(i) => Ok(*i),
                Cell::Str(s) => {
                    let r: Rational = s.parse().map_err(serde::de::Error::custom)?;
                    if !r.is_integer() {
                        return Err(serde::de::Error::custom(format!("{s} is not an integer")));
                    }
                    i64::try_from(r.numer()).map_err(serde::de::Error::custom)
                }
            }
        };
        Ok(IntMatrix2([
            [conv(&rows[0][0])?, conv(&rows[0][1])?],
            [conv(&rows[1][0])?, conv(&rows[1][1])?],
        ]))
    }
}

impl std::str::FromStr for IntMatrix2 {
    type Err = LinalgError;

    /// Parses JSON `[[a,b],[c,d]]`, or `0` for the zero matrix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "0" {
            return Ok(IntMatrix2([[0, 0], [0, 0]]));
        }
        serde_json::from_str(s).map_err(|e| LinalgError::Parse(format!("matrix {s:?}: {e}")))
    }
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2([[1, 0], [0, 1]]);

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2([[a, b], [c, d]])
    }

    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_sl2(&self) -> bool {
        self.det() == 1
    }

    pub fn is_anosov(&self) -> bool {
        self.is_sl2() && self.trace().abs() > 2
    }

    /// True when some positive power is the identity.
    pub fn is_finite_order(&self) -> bool {
        let t = self.trace().abs();
        self.is_sl2() && (t < 2 || (t == 2 && (*self == Self::IDENTITY || *self == Self::IDENTITY.neg())))
    }

    pub fn neg(&self) -> Self {
        let m = self.0;
        IntMatrix2([[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]])
    }

    pub fn transpose(&self) -> Self {
        let m = self.0;
        IntMatrix2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// Adjugate; equals the inverse when det = 1.
    pub fn adjugate(&self) -> Self {
        let m = self.0;
        IntMatrix2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    /// Inverse for det = ±1.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        match self.det() {
            1 => Ok(self.adjugate()),
            -1 => Ok(self.adjugate().neg()),
            det => Err(LinalgError::NotUnimodular { det }),
        }
    }

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let (a, b) = (self.0, o.0);
        let e = |i: usize, j: usize| -> Option<i64> {
            a[i][0].checked_mul(b[0][j])?.checked_add(a[i][1].checked_mul(b[1][j])?)
        };
        Some(IntMatrix2([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]]))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("integer overflow in 2x2 product")
    }

    /// `self^n` for any integer n (negative powers need det = ±1).
    pub fn checked_pow(&self, n: i64) -> Option<Self> {
        let base = if n < 0 { self.inverse().ok()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::IDENTITY;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.checked_mul(&b)?;
            }
        }
        Some(acc)
    }

    pub fn apply(&self, v: [i64; 2]) -> [i64; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let m = self.0;
        [[m[0][0] as f64, m[0][1] as f64], [m[1][0] as f64, m[1][1] as f64]]
    }

    pub fn to_quad(&self) -> QuadMatrix {
        QuadMatrix::from_ints(2, 2, &[self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]])
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Dense row-major matrix with entries in one quadratic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QuadNum>,
}

/// Column vector of length 2 over a quadratic field.
pub type QuadVec2 = [QuadNum; 2];

impl QuadMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<QuadNum>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!("{} entries for {rows}x{cols}", data.len())));
        }
        let m = QuadMatrix { rows, cols, data };
        m.field()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QuadMatrix { rows, cols, data: vec![QuadNum::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = QuadNum::one();
        }
        m
    }

    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Self {
        QuadMatrix { rows, cols, data: v.iter().map(|&x| QuadNum::int(x)).collect() }
    }

    pub fn from_rationals(rows: usize, cols: usize, v: Vec<Rational>) -> Self {
        assert_eq!(v.len(), rows * cols);
        QuadMatrix { rows, cols, data: v.into_iter().map(QuadNum::rational).collect() }
    }

    pub fn column(v: &QuadVec2) -> Self {
        QuadMatrix::new(2, 1, v.to_vec()).expect("vector entries share a field")
    }

    pub fn row(v: &QuadVec2) -> Self {
        QuadMatrix::new(1, 2, v.to_vec()).expect("vector entries share a field")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadNum {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QuadNum) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[QuadNum] {
        &self.data
    }

    /// Common field parameter, 1 when every entry is rational.
    pub fn field(&self) -> Result<u64, LinalgError> {
        let mut d = 1;
        for x in &self.data {
            if x.d() != 1 {
                if d != 1 && d != x.d() {
                    return Err(LinalgError::FieldMismatch(d, x.d()));
                }
                d = x.d();
            }
        }
        Ok(d)
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(QuadNum::is_rational)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(QuadNum::is_zero)
    }

    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(QuadNum::is_integer)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, LinalgError> {
        self.same_shape(o)?;
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_, _>>()?;
        Ok(QuadMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, LinalgError> {
        self.same_shape(o)?;
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_, _>>()?;
        Ok(QuadMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = QuadNum::zero();
                for k in 0..self.cols {
                    acc = acc.checked_add(&self.get(i, k).checked_mul(o.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &QuadNum) -> Result<Self, LinalgError> {
        let data = self.data.iter().map(|x| x.checked_mul(s)).collect::<Result<_, _>>()?;
        Ok(QuadMatrix { rows: self.rows, cols: self.cols, data })
    }

    fn same_shape(&self, o: &Self) -> Result<(), LinalgError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(LinalgError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    /// Gauss-Jordan inverse over the field.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(LinalgError::DivisionByZero)?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).recip()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).checked_mul(&p)?);
                inv.set(col, j, inv.get(col, j).checked_mul(&p)?);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j).checked_sub(&f.checked_mul(a.get(col, j))?)?);
                    inv.set(r, j, inv.get(r, j).checked_sub(&f.checked_mul(inv.get(col, j))?)?);
                }
            }
        }
        Ok(inv)
    }

    pub fn apply(&self, v: &[QuadNum]) -> Result<Vec<QuadNum>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape("vector length".into()));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = QuadNum::zero();
                for (k, x) in v.iter().enumerate() {
                    acc = acc.checked_add(&self.get(i, k).checked_mul(x)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Entrywise fractional parts; exact reduction mod Z.
    pub fn fract(&self) -> Self {
        QuadMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(QuadNum::fract).collect() }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64()).collect()).collect()
    }

    /// 2×2 float rendering; panics on other shapes.
    pub fn to_mat2(&self) -> [[f64; 2]; 2] {
        assert!(self.rows == 2 && self.cols == 2);
        [[self.get(0, 0).to_f64(), self.get(0, 1).to_f64()], [self.get(1, 0).to_f64(), self.get(1, 1).to_f64()]]
    }
}

impl fmt::Debug for QuadMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Rows of entries. Rational entries serialize as `"p/q"` strings, irrational
/// ones as `{"a","b","d"}` objects.
impl Serialize for QuadMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Cell<'a> {
            Rat(&'a Rational),
            Quad(&'a QuadNum),
        }
        let rows: Vec<Vec<Cell>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = self.get(i, j);
                        if x.is_rational() {
                            Cell::Rat(x.a())
                        } else {
                            Cell::Quad(x)
                        }
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Cell {
            Quad(QuadNum),
            Rat(Rational),
        }
        let rows: Vec<Vec<Cell>> = Vec::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|cell| match cell {
                Cell::Quad(q) => q,
                Cell::Rat(x) => QuadNum::rational(x),
            })
            .collect();
        QuadMatrix::new(r, c, data).map_err(serde::de::Error::custom)
    }
}

/// Kronecker product: block `(i, j)` is `p[i][j]·q`.
pub fn kronecker(p: &QuadMatrix, q: &QuadMatrix) -> Result<QuadMatrix, LinalgError> {
    let dp = p.field()?;
    let dq = q.field()?;
    if dp != 1 && dq != 1 && dp != dq {
        return Err(LinalgError::FieldMismatch(dp, dq));
    }
    let (m, n, r, s) = (p.rows, p.cols, q.rows, q.cols);
    let mut out = QuadMatrix::zeros(m * r, n * s);
    for i in 0..m {
        for j in 0..n {
            for k in 0..r {
                for l in 0..s {
                    out.set(i * r + k, j * s + l, p.get(i, j).checked_mul(q.get(k, l))?);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kron_cat_is_block_diagonal() {
        let cat = IntMatrix2::new(2, 1, 1, 1).to_quad();
        let k = kronecker(&QuadMatrix::identity(2), &cat).unwrap();
        let expect = QuadMatrix::from_ints(4, 4, &[2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 2, 1, 0, 0, 1, 1]);
        assert_eq!(k, expect);
    }

    #[test]
    fn kron_field_mismatch() {
        let a = QuadMatrix::new(1, 1, vec![QuadNum::sqrt(2).unwrap()]).unwrap();
        let b = QuadMatrix::new(1, 1, vec![QuadNum::sqrt(5).unwrap()]).unwrap();
        assert_eq!(kronecker(&a, &b), Err(LinalgError::FieldMismatch(2, 5)));
    }

    #[test]
    fn int_matrix_predicates_and_powers() {
        let cat = IntMatrix2::new(2, 1, 1, 1);
        assert!(cat.is_anosov());
        assert!(!IntMatrix2::new(1, 1, 0, 1).is_anosov());
        assert!(IntMatrix2::new(0, -1, 1, 0).is_finite_order());
        assert_eq!(cat.checked_pow(-1).unwrap(), IntMatrix2::new(1, -1, -1, 2));
        assert_eq!(cat.checked_pow(2).unwrap(), IntMatrix2::new(5, 3, 3, 2));
        assert!(cat.checked_pow(200).is_none());
    }

    #[test]
    fn quad_matrix_json_round_trip() {
        let m = QuadMatrix::new(
            1,
            2,
            vec![QuadNum::int(3), QuadNum::sqrt(5).unwrap()],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["3/1",{"a":"0/1","b":"1/1","d":5}]]"#);
        let back: QuadMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn int_matrix_parsing() {
        let m: IntMatrix2 = "[[2,\"1\"],[1,1]]".parse().unwrap();
        assert_eq!(m, IntMatrix2::new(2, 1, 1, 1));
        assert_eq!("0".parse::<IntMatrix2>().unwrap(), IntMatrix2::new(0, 0, 0, 0));
        assert!("[[1,2],[3]]".parse::<IntMatrix2>().is_err());
        assert!("[[\"1/2\",0],[0,1]]".parse::<IntMatrix2>().is_err());
    }

    #[test]
    fn gauss_jordan_inverse() {
        let m = QuadMatrix::from_ints(3, 3, &[2, 0, 1, 1, 1, 0, 0, 3, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.checked_mul(&inv).unwrap(), QuadMatrix::identity(3));
    }
}
