//! Truncated formal power series over the rationals, differential
//! operators built from constants, the identity and the derivative, and
//! Wronskian tests for constant-coefficient linear recurrences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::par::Exec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("precision exhausted: need {needed} known coefficients, have {available}")]
    PrecisionExhausted { needed: usize, available: usize },
    #[error("empty list")]
    EmptyList,
    #[error("recurrence coefficients are all zero")]
    AllZeroCoefficients,
    #[error("denominator vanishes at 0")]
    SingularDenominator,
    #[error("recurrence and operator sides disagree at index {0}")]
    InternalEquivalenceViolation(usize),
    #[error("cannot parse operator: {0}")]
    BadOperator(String),
}

/// The first `precision` coefficients of a power series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::PrecisionExhausted { needed: 1, available: 0 });
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn from_integers<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>) -> Result<Self, SeriesError> {
        TruncatedSeries::new(coeffs.into_iter().map(|c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero(precision: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![BigRational::zero(); precision.max(1)],
        }
    }

    pub fn constant(c: BigRational, precision: usize) -> Self {
        let mut s = TruncatedSeries::zero(precision);
        s.coeffs[0] = c;
        s
    }

    /// `x^k`.
    pub fn monomial(k: usize, precision: usize) -> Self {
        let mut s = TruncatedSeries::zero(precision);
        if k < s.coeffs.len() {
            s.coeffs[k] = BigRational::one();
        }
        s
    }

    /// `f_{k+n} = c_0 f_k + ... + c_{n-1} f_{k+n-1}` from `n` initial terms.
    pub fn from_recurrence(initial: &[BigRational], coeffs: &[BigRational], precision: usize) -> Result<Self, SeriesError> {
        if initial.len() != coeffs.len() || initial.is_empty() {
            return Err(SeriesError::EmptyList);
        }
        let n = coeffs.len();
        let mut out: Vec<BigRational> = initial.iter().take(precision).cloned().collect();
        while out.len() < precision {
            let k = out.len() - n;
            let next = coeffs
                .iter()
                .enumerate()
                .fold(BigRational::zero(), |acc, (i, c)| acc + c * &out[k + i]);
            out.push(next);
        }
        TruncatedSeries::new(out)
    }

    /// Expansion of `p(x) / q(x)`, coefficients listed from the constant
    /// term up.
    pub fn from_rational_function(p: &[BigRational], q: &[BigRational], precision: usize) -> Result<Self, SeriesError> {
        let q0 = q.first().filter(|c| !c.is_zero()).ok_or(SeriesError::SingularDenominator)?;
        let mut out: Vec<BigRational> = Vec::with_capacity(precision);
        for m in 0..precision {
            let mut acc = p.get(m).cloned().unwrap_or_else(BigRational::zero);
            for j in 1..q.len().min(m + 1) {
                acc -= &q[j] * &out[m - j];
            }
            out.push(acc / q0);
        }
        TruncatedSeries::new(out)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn truncate(&self, precision: usize) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs[..precision.clamp(1, self.precision())].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        TruncatedSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Truncated convolution at the smaller precision.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        let coeffs = (0..n)
            .map(|m| {
                (0..=m).fold(BigRational::zero(), |acc, i| {
                    if self.coeffs[i].is_zero() || other.coeffs[m - i].is_zero() {
                        acc
                    } else {
                        acc + &self.coeffs[i] * &other.coeffs[m - i]
                    }
                })
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// `x^k f`, known `k` coefficients further than `f`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries { coeffs }
    }

    /// `(Σ a_n x^n)' = Σ (n+1) a_{n+1} x^n`; one coefficient is consumed.
    pub fn derivative(&self) -> Result<Self, SeriesError> {
        if self.precision() < 2 {
            return Err(SeriesError::PrecisionExhausted {
                needed: 2,
                available: self.precision(),
            });
        }
        Ok(TruncatedSeries {
            coeffs: (1..self.precision()).map(|n| &self.coeffs[n] * rat(n as i64)).collect(),
        })
    }

    pub fn nth_derivative(&self, n: usize) -> Result<Self, SeriesError> {
        (0..n).try_fold(self.clone(), |f, _| f.derivative())
    }

    /// Index of the first nonzero known coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn zero_test(&self) -> ZeroTest {
        match self.first_nonzero() {
            Some(i) => ZeroTest::Nonzero(i),
            None => ZeroTest::ZeroWithinPrecision(self.precision()),
        }
    }
}

impl fmt::Display for TruncatedSeries {
    /// Coefficient-list form, e.g. `[0, 1, 1/2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Outcome of a zero test on a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ZeroTest {
    /// Every known coefficient vanishes; the payload is the precision.
    ZeroWithinPrecision(usize),
    /// Index of the first nonzero coefficient.
    Nonzero(usize),
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroTest::ZeroWithinPrecision(_))
    }
}

impl fmt::Display for ZeroTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroTest::ZeroWithinPrecision(p) => write!(f, "ZeroWithinPrecision({p})"),
            ZeroTest::Nonzero(i) => write!(f, "Nonzero({i})"),
        }
    }
}

/// Differential operators: constants, the identity and the derivative,
/// closed under pointwise sum, product and composition. `X` is the
/// constant map with value `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DiffOpExpr {
    Const(BigRational),
    X,
    Id,
    D,
    Add(Box<DiffOpExpr>, Box<DiffOpExpr>),
    Mul(Box<DiffOpExpr>, Box<DiffOpExpr>),
    /// `Compose(a, b)` applies `b` first.
    Compose(Box<DiffOpExpr>, Box<DiffOpExpr>),
}

impl DiffOpExpr {
    pub fn add(a: DiffOpExpr, b: DiffOpExpr) -> Self {
        DiffOpExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: DiffOpExpr, b: DiffOpExpr) -> Self {
        DiffOpExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn compose(a: DiffOpExpr, b: DiffOpExpr) -> Self {
        DiffOpExpr::Compose(Box::new(a), Box::new(b))
    }

    /// `D^n`.
    pub fn derivative_power(n: usize) -> Self {
        (0..n).fold(DiffOpExpr::Id, |acc, _| match acc {
            DiffOpExpr::Id => DiffOpExpr::D,
            other => DiffOpExpr::compose(DiffOpExpr::D, other),
        })
    }

    /// `f ↦ (x^k f)^{(n)}`.
    pub fn shifted_derivative(k: usize, n: usize) -> Self {
        let mut multiply = DiffOpExpr::Id;
        for _ in 0..k {
            multiply = DiffOpExpr::mul(DiffOpExpr::X, multiply);
        }
        if n == 0 {
            multiply
        } else {
            DiffOpExpr::compose(DiffOpExpr::derivative_power(n), multiply)
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            DiffOpExpr::Add(..) => 0,
            DiffOpExpr::Mul(..) => 1,
            DiffOpExpr::Compose(..) => 2,
            _ => 3,
        }
    }
}

pub fn apply_op(op: &DiffOpExpr, f: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    Ok(match op {
        DiffOpExpr::Const(c) => TruncatedSeries::constant(c.clone(), f.precision()),
        DiffOpExpr::X => TruncatedSeries::monomial(1, f.precision()),
        DiffOpExpr::Id => f.clone(),
        DiffOpExpr::D => f.derivative()?,
        DiffOpExpr::Add(a, b) => apply_op(a, f)?.add(&apply_op(b, f)?),
        DiffOpExpr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
            // Multiplying by x is exact one coefficient further.
            (DiffOpExpr::X, other) | (other, DiffOpExpr::X) => apply_op(other, f)?.shift(1),
            _ => apply_op(a, f)?.mul(&apply_op(b, f)?),
        },
        DiffOpExpr::Compose(a, b) => apply_op(a, &apply_op(b, f)?)?,
    })
}

impl fmt::Display for DiffOpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &DiffOpExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            DiffOpExpr::Const(c) if c.is_integer() && !c.is_negative() => write!(f, "{c}"),
            DiffOpExpr::Const(c) => write!(f, "({c})"),
            DiffOpExpr::X => write!(f, "x"),
            DiffOpExpr::Id => write!(f, "id"),
            DiffOpExpr::D => write!(f, "D"),
            DiffOpExpr::Add(a, b) => {
                wrap(f, a, 0)?;
                write!(f, " + ")?;
                wrap(f, b, 1)
            }
            DiffOpExpr::Mul(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " * ")?;
                wrap(f, b, 2)
            }
            DiffOpExpr::Compose(a, b) => {
                wrap(f, a, 2)?;
                write!(f, ".")?;
                wrap(f, b, 3)
            }
        }
    }
}

impl FromStr for DiffOpExpr {
    type Err = SeriesError;

    /// `+` < `*` < `.` (composition), all left-associative; atoms are
    /// `id`, `D`, `x`, rationals like `3/2` and parenthesised expressions.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = tokenize_op(s)?;
        let mut pos = 0;
        let e = parse_sum(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(SeriesError::BadOperator(format!("unexpected `{}`", tokens[pos])));
        }
        Ok(e)
    }
}

fn tokenize_op(s: &str) -> Result<Vec<String>, SeriesError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+*.()".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '-' || c == '/' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '/') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(SeriesError::BadOperator(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

fn parse_sum(t: &[String], pos: &mut usize) -> Result<DiffOpExpr, SeriesError> {
    let mut e = parse_product(t, pos)?;
    while t.get(*pos).is_some_and(|s| s == "+") {
        *pos += 1;
        e = DiffOpExpr::add(e, parse_product(t, pos)?);
    }
    Ok(e)
}

fn parse_product(t: &[String], pos: &mut usize) -> Result<DiffOpExpr, SeriesError> {
    let mut e = parse_compose(t, pos)?;
    while t.get(*pos).is_some_and(|s| s == "*") {
        *pos += 1;
        e = DiffOpExpr::mul(e, parse_compose(t, pos)?);
    }
    Ok(e)
}

fn parse_compose(t: &[String], pos: &mut usize) -> Result<DiffOpExpr, SeriesError> {
    let mut e = parse_atom(t, pos)?;
    while t.get(*pos).is_some_and(|s| s == ".") {
        *pos += 1;
        e = DiffOpExpr::compose(e, parse_atom(t, pos)?);
    }
    Ok(e)
}

fn parse_atom(t: &[String], pos: &mut usize) -> Result<DiffOpExpr, SeriesError> {
    let tok = t
        .get(*pos)
        .ok_or_else(|| SeriesError::BadOperator("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "id" => Ok(DiffOpExpr::Id),
        "D" => Ok(DiffOpExpr::D),
        "x" => Ok(DiffOpExpr::X),
        "(" => {
            let e = parse_sum(t, pos)?;
            if t.get(*pos).map(String::as_str) != Some(")") {
                return Err(SeriesError::BadOperator("expected `)`".into()));
            }
            *pos += 1;
            Ok(e)
        }
        other => other
            .parse::<BigRational>()
            .map(DiffOpExpr::Const)
            .map_err(|_| SeriesError::BadOperator(format!("unexpected `{other}`"))),
    }
}

/// Determinant of the matrix whose row `i` holds the `i`-th derivatives.
/// Result precision is the smallest input precision minus `n - 1`.
pub fn wronskian(fs: &[TruncatedSeries]) -> Result<TruncatedSeries, SeriesError> {
    wronskian_with(fs, Exec::default())
}

pub fn wronskian_with(fs: &[TruncatedSeries], exec: Exec) -> Result<TruncatedSeries, SeriesError> {
    let n = fs.len();
    if n == 0 {
        return Err(SeriesError::EmptyList);
    }
    let min = fs.iter().map(TruncatedSeries::precision).min().expect("non-empty");
    if min < n {
        return Err(SeriesError::PrecisionExhausted { needed: n, available: min });
    }
    let target = min - (n - 1);
    let mut rows: Vec<Vec<TruncatedSeries>> = Vec::with_capacity(n);
    let mut current: Vec<TruncatedSeries> = fs.iter().map(|f| f.truncate(min)).collect();
    for i in 0..n {
        rows.push(current.iter().map(|f| f.truncate(target)).collect());
        if i + 1 < n {
            current = current.iter().map(|f| f.derivative()).collect::<Result<_, _>>()?;
        }
    }
    Ok(determinant(&rows, exec))
}

/// Laplace expansion along the last row, memoised over column subsets.
fn determinant(rows: &[Vec<TruncatedSeries>], exec: Exec) -> TruncatedSeries {
    let n = rows.len();
    let precision = rows[0][0].precision();
    let mut minors: Vec<Option<TruncatedSeries>> = vec![None; 1 << n];
    minors[0] = Some(TruncatedSeries::constant(BigRational::one(), precision));
    for k in 1..=n {
        let subsets: Vec<usize> = (0..1usize << n).filter(|s| s.count_ones() as usize == k).collect();
        let values = exec.map(&subsets, |&s| {
            let row = &rows[k - 1];
            let mut acc = TruncatedSeries::zero(precision);
            let mut pos = 0;
            for (j, entry) in row.iter().enumerate() {
                if s & (1 << j) == 0 {
                    continue;
                }
                let minor = minors[s & !(1 << j)].as_ref().expect("computed at the previous size");
                let term = entry.mul(minor);
                acc = if (k - 1 + pos) % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                pos += 1;
            }
            acc
        });
        for (s, v) in subsets.into_iter().zip(values) {
            minors[s] = Some(v);
        }
    }
    minors[(1 << n) - 1].take().expect("full minor")
}

/// Is `f` annihilated by some recurrence of order at most `n`? Tests
/// `W(f^(n), (x f)^(n), ..., (x^n f)^(n))` on the known window.
pub fn is_linear_recurrence(f: &TruncatedSeries, n: usize) -> Result<ZeroTest, SeriesError> {
    let needed = 2 * n + 2;
    if f.precision() < needed {
        return Err(SeriesError::PrecisionExhausted {
            needed,
            available: f.precision(),
        });
    }
    let family = (0..=n)
        .map(|k| f.shift(k).truncate(f.precision()).nth_derivative(n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(wronskian(&family)?.zero_test())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceOutcome {
    /// Both sides hold on the window.
    pub holds: bool,
    /// Number of recurrence instances checked.
    pub window: usize,
}

/// Evaluates `Σ a_j f_{k+j} = 0` and `((a_0 x^n + ... + a_n) f)^(n) = 0`
/// on the known window; the two must agree.
pub fn recurrence_equivalence_check(f: &TruncatedSeries, a: &[BigRational]) -> Result<EquivalenceOutcome, SeriesError> {
    if a.is_empty() || a.iter().all(Zero::is_zero) {
        return Err(SeriesError::AllZeroCoefficients);
    }
    let n = a.len() - 1;
    if f.precision() < n + 2 {
        return Err(SeriesError::PrecisionExhausted {
            needed: n + 2,
            available: f.precision(),
        });
    }
    let window = f.precision() - n;
    let direct: Vec<bool> = (0..window)
        .map(|k| {
            a.iter()
                .enumerate()
                .fold(BigRational::zero(), |acc, (j, c)| acc + c * f.coeff(k + j))
                .is_zero()
        })
        .collect();
    let product = a
        .iter()
        .enumerate()
        .map(|(j, c)| f.shift(n - j).scale(c))
        .reduce(|x, y| x.add(&y))
        .expect("non-empty");
    let operator = product.truncate(f.precision()).nth_derivative(n)?;
    for (k, &d) in direct.iter().enumerate() {
        if d != operator.coeff(k).is_zero() {
            return Err(SeriesError::InternalEquivalenceViolation(k));
        }
    }
    Ok(EquivalenceOutcome {
        holds: direct.iter().all(|&d| d),
        window,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub antecedent: ZeroTest,
    pub consequent: ZeroTest,
    /// Antecedent vanished but the consequent did not: a sign of too little
    /// precision.
    pub flagged: bool,
}

/// Compares `W(T_1 f, ..., T_n f)` with `W(T_1 f, ..., T_{n+1} f)`.
pub fn wronskian_monotonicity_check(ops: &[DiffOpExpr], f: &TruncatedSeries) -> Result<MonotonicityReport, SeriesError> {
    if ops.len() < 2 {
        return Err(SeriesError::EmptyList);
    }
    let images = ops.iter().map(|op| apply_op(op, f)).collect::<Result<Vec<_>, _>>()?;
    let antecedent = wronskian(&images[..images.len() - 1])?.zero_test();
    let consequent = wronskian(&images)?.zero_test();
    Ok(MonotonicityReport {
        antecedent,
        consequent,
        flagged: antecedent.is_zero() && !consequent.is_zero(),
    })
}

/// The operator family `f ↦ (x^k f)^(n)`, `k = 0..=n`.
pub fn recurrence_family(n: usize) -> Vec<DiffOpExpr> {
    (0..=n).map(|k| DiffOpExpr::shifted_derivative(k, n)).collect()
}
