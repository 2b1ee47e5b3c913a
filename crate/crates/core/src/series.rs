//! Exact truncated power series in `x`, `q` and `y`, and the generating
//! functions built on top of them.
//!
//! A [`TruncatedSeries`] stores every coefficient `x^i q^j y^l` with
//! `i < orders.x`, `j < orders.q`, `l < orders.y`; anything at or beyond an
//! order is unknown. Binary operations keep the per-variable minimum of the
//! operands' orders, so the orders carried by a result are exactly the range
//! over which it can be trusted.
//!
//! All denominators that appear are products of `1 - c * monomial`, so the
//! only division primitive is [`TruncatedSeries::invert_unit`], which keeps
//! coefficients integral.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-variable truncation orders (exclusive exponent bounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orders {
    pub x: usize,
    pub q: usize,
    pub y: usize,
}

impl Orders {
    pub const fn new(x: usize, q: usize, y: usize) -> Self {
        Orders { x, q, y }
    }

    /// Orders for a series in `x` alone.
    pub const fn x_only(x: usize) -> Self {
        Orders { x, q: 1, y: 1 }
    }

    pub fn min(self, other: Orders) -> Orders {
        Orders {
            x: self.x.min(other.x),
            q: self.q.min(other.q),
            y: self.y.min(other.y),
        }
    }

    fn len(self) -> usize {
        self.x * self.q * self.y
    }

    fn contains(self, (i, j, l): Exponent) -> bool {
        i < self.x && j < self.q && l < self.y
    }
}

/// Exponents of `x`, `q`, `y`.
pub type Exponent = (usize, usize, usize);

#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    orders: Orders,
    // dense, index = (i * orders.q + j) * orders.y + l
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn zero(orders: Orders) -> Self {
        TruncatedSeries { orders, coeffs: vec![BigInt::zero(); orders.len()] }
    }

    pub fn one(orders: Orders) -> Self {
        Self::monomial(BigInt::one(), (0, 0, 0), orders)
    }

    pub fn constant(c: impl Into<BigInt>, orders: Orders) -> Self {
        Self::monomial(c.into(), (0, 0, 0), orders)
    }

    /// `c * x^i q^j y^l`; silently zero when the exponent is truncated away.
    pub fn monomial(c: impl Into<BigInt>, exp: Exponent, orders: Orders) -> Self {
        let mut s = Self::zero(orders);
        if orders.contains(exp) {
            let idx = s.index(exp);
            s.coeffs[idx] = c.into();
        }
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated
    /// exponents accumulate and truncated ones are dropped.
    pub fn from_terms<I, C>(terms: I, orders: Orders) -> Self
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut s = Self::zero(orders);
        for (exp, c) in terms {
            if orders.contains(exp) {
                let idx = s.index(exp);
                s.coeffs[idx] += c.into();
            }
        }
        s
    }

    /// `sum_i coeffs[i] x^i`.
    pub fn from_x_poly(coeffs: &[i64], orders: Orders) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| ((i, 0, 0), c)), orders)
    }

    pub fn orders(&self) -> Orders {
        self.orders
    }

    fn index(&self, (i, j, l): Exponent) -> usize {
        (i * self.orders.q + j) * self.orders.y + l
    }

    fn exponent_at(&self, idx: usize) -> Exponent {
        let l = idx % self.orders.y;
        let rest = idx / self.orders.y;
        (rest / self.orders.q, rest % self.orders.q, l)
    }

    /// Coefficient of `x^i q^j y^l`.
    ///
    /// # Panics
    /// If the exponent lies beyond the truncation orders (the value is unknown).
    pub fn coefficient(&self, i: usize, j: usize, l: usize) -> &BigInt {
        assert!(
            self.orders.contains((i, j, l)),
            "coefficient x^{i} q^{j} y^{l} is beyond truncation orders {:?}",
            self.orders
        );
        &self.coeffs[self.index((i, j, l))]
    }

    pub fn get(&self, exp: Exponent) -> Option<&BigInt> {
        self.orders.contains(exp).then(|| &self.coeffs[self.index(exp)])
    }

    fn nonzero(&self) -> impl Iterator<Item = (Exponent, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| (self.exponent_at(idx), c))
    }

    /// Nonzero terms in graded lexicographic order: by total degree, then by
    /// `(x, q, y)` exponents lexicographically.
    pub fn terms(&self) -> Vec<(Exponent, BigInt)> {
        let mut out: Vec<(Exponent, BigInt)> = self.nonzero().map(|(e, c)| (e, c.clone())).collect();
        out.sort_by_key(|&((i, j, l), _)| (i + j + l, i, j, l));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Restricts to (possibly) smaller orders.
    pub fn truncate(&self, orders: Orders) -> Self {
        let orders = orders.min(self.orders);
        Self::from_terms(self.nonzero().map(|(e, c)| (e, c.clone())), orders)
    }

    /// Coefficient-wise equality over the common truncation range.
    pub fn agrees_with(&self, other: &TruncatedSeries) -> bool {
        self.first_difference(other).is_none()
    }

    /// First exponent (in storage order) within the common orders where the
    /// two series differ, with both coefficients.
    pub fn first_difference(&self, other: &TruncatedSeries) -> Option<(Exponent, BigInt, BigInt)> {
        let common = self.orders.min(other.orders);
        for i in 0..common.x {
            for j in 0..common.q {
                for l in 0..common.y {
                    let (a, b) = (self.coefficient(i, j, l), other.coefficient(i, j, l));
                    if a != b {
                        return Some(((i, j, l), a.clone(), b.clone()));
                    }
                }
            }
        }
        None
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        TruncatedSeries { orders: self.orders, coeffs: self.coeffs.iter().map(|v| v * &c).collect() }
    }

    /// Multiplies by `x^i q^j y^l`. The known range grows by the shift.
    pub fn shift(&self, (di, dj, dl): Exponent) -> Self {
        let orders = Orders::new(self.orders.x + di, self.orders.q + dj, self.orders.y + dl);
        Self::from_terms(self.nonzero().map(|((i, j, l), c)| ((i + di, j + dj, l + dl), c.clone())), orders)
    }

    /// Formal derivative in `x`; the `x` order drops by one.
    pub fn derivative_x(&self) -> Self {
        let orders = Orders { x: self.orders.x.saturating_sub(1), ..self.orders };
        Self::from_terms(
            self.nonzero()
                .filter(|&((i, _, _), _)| i > 0)
                .map(|((i, j, l), c)| ((i - 1, j, l), c * i)),
            orders,
        )
    }

    /// The substitution `x -> x q`: `x^i q^j y^l` becomes `x^i q^(i + j) y^l`.
    pub fn substitute_x_times_q(&self) -> Self {
        Self::from_terms(self.nonzero().map(|((i, j, l), c)| ((i, i + j, l), c.clone())), self.orders)
    }

    /// The coefficient of `x^n`, as a series in `q` and `y` (with `x` order 1).
    pub fn x_slice(&self, n: usize) -> Self {
        let orders = Orders { x: 1, ..self.orders };
        if n >= self.orders.x {
            return Self::zero(Orders { x: 0, ..orders });
        }
        Self::from_terms(
            self.nonzero().filter(|&((i, _, _), _)| i == n).map(|((_, j, l), c)| ((0, j, l), c.clone())),
            orders,
        )
    }

    /// Sum of all stored coefficients, i.e. the value at `x = q = y = 1` of
    /// the truncated polynomial.
    pub fn sum_coefficients(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Multiplicative inverse of a series whose constant term is `1` or `-1`.
    pub fn invert_unit(&self) -> Result<Self> {
        let orders = self.orders;
        if orders.len() == 0 {
            return Ok(self.clone());
        }
        let c0 = self.coeffs[0].clone();
        if !(c0.abs().is_one()) {
            return Err(Error::NotAUnit(c0.to_string()));
        }
        let rest: Vec<(Exponent, BigInt)> =
            self.nonzero().filter(|&(e, _)| e != (0, 0, 0)).map(|(e, c)| (e, c.clone())).collect();
        let mut inv = Self::zero(orders);
        inv.coeffs[0] = c0.clone();
        // storage order is lexicographic in (i, j, l), so every b_{e - f}
        // with f > 0 componentwise is already known when b_e is computed
        for idx in 1..orders.len() {
            let (i, j, l) = inv.exponent_at(idx);
            let mut acc = BigInt::zero();
            for &((fi, fj, fl), ref c) in &rest {
                if fi <= i && fj <= j && fl <= l {
                    let other = &inv.coeffs[inv.index((i - fi, j - fj, l - fl))];
                    if !other.is_zero() {
                        acc += c * other;
                    }
                }
            }
            inv.coeffs[idx] = -(acc * &c0);
        }
        Ok(inv)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.orders), |acc, _| &acc * self)
    }

    /// Plain-text rendering: one `coeff x^a q^b y^c` line per nonzero term,
    /// in graded lexicographic order, leaving out variables with exponent 0.
    pub fn to_plain(&self) -> String {
        let mut out = String::new();
        for ((i, j, l), c) in self.terms() {
            out.push_str(&c.to_string());
            for (name, e) in [("x", i), ("q", j), ("y", l)] {
                if e > 0 {
                    out.push_str(&format!(" {name}^{e}"));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            terms: self
                .terms()
                .into_iter()
                .map(|((x, q, y), c)| TermJson { x, q, y, coeff: c.to_string() })
                .collect(),
            orders: self.orders,
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let terms = json
            .terms
            .iter()
            .map(|t| {
                t.coeff
                    .parse::<BigInt>()
                    .map(|c| ((t.x, t.q, t.y), c))
                    .map_err(|_| Error::InvalidArgument(format!("bad coefficient {:?}", t.coeff)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(terms, json.orders))
    }
}

/// JSON form: `{"terms":[{"x":..,"q":..,"y":..,"coeff":"<decimal>"}],"orders":{..}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<TermJson>,
    pub orders: Orders,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub x: usize,
    pub q: usize,
    pub y: usize,
    pub coeff: String,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let orders = self.orders.min(rhs.orders);
        let mut out = self.truncate(orders);
        for (e, c) in rhs.nonzero() {
            if orders.contains(e) {
                let idx = out.index(e);
                out.coeffs[idx] += c;
            }
        }
        out
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { orders: self.orders, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let orders = self.orders.min(rhs.orders);
        let mut out = TruncatedSeries::zero(orders);
        let left: Vec<_> = self.nonzero().filter(|&(e, _)| orders.contains(e)).collect();
        let right: Vec<_> = rhs.nonzero().filter(|&(e, _)| orders.contains(e)).collect();
        for &((ai, aj, al), a) in &left {
            for &((bi, bj, bl), b) in &right {
                let e = (ai + bi, aj + bj, al + bl);
                if orders.contains(e) {
                    let idx = out.index(e);
                    out.coeffs[idx] += a * b;
                }
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned_binop!(Add add, Sub sub, Mul mul);

pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a + b
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a * b
}

pub fn series_derivative_x(a: &TruncatedSeries) -> TruncatedSeries {
    a.derivative_x()
}

pub fn series_invert_unit(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.invert_unit()
}

pub fn substitute_x_times_q(a: &TruncatedSeries) -> TruncatedSeries {
    a.substitute_x_times_q()
}

/// `1 - c * x^i q^j y^l`.
fn one_minus(c: i64, exp: Exponent, orders: Orders) -> TruncatedSeries {
    &TruncatedSeries::one(orders) - &TruncatedSeries::monomial(c, exp, orders)
}

/// `1 / (1 - c * x^i q^j y^l)`.
fn geometric(c: i64, exp: Exponent, orders: Orders) -> TruncatedSeries {
    one_minus(c, exp, orders).invert_unit().expect("constant term is 1")
}

/// `(xq)_n = (1 - xq)(1 - xq^2) ... (1 - xq^n)`.
pub fn q_pochhammer(n: usize, orders: Orders) -> TruncatedSeries {
    (1..=n).fold(TruncatedSeries::one(orders), |acc, i| &acc * &one_minus(1, (1, i, 0), orders))
}

/// `g_k(x)`, whose `x^n` coefficient counts permutations of length `n` with
/// exactly `k` valleys.
///
/// Starts from `f_0 = 1 / (1 - 2x)`, applies
/// `f_{j+1} = D_x(f_j) / (1 - (2(j + 1) + 2) x)` `k` times and returns
/// `g_k = x^(2k+1) f_k`.
pub fn gf_valley_perms(k: usize, x_order: usize) -> TruncatedSeries {
    // each derivative costs one order of x; the final shift gives back 2k + 1
    let start = Orders::x_only(x_order + k);
    let mut f = geometric(2, (1, 0, 0), start);
    for j in 0..k {
        let step = f.derivative_x();
        let denom = geometric(2 * (j as i64 + 1) + 2, (1, 0, 0), step.orders());
        f = &step * &denom;
    }
    f.shift((2 * k + 1, 0, 0)).truncate(Orders::x_only(x_order))
}

/// Numerators of the tabulated rational forms of `g_0 .. g_4`:
/// `(scalar, power of x, polynomial factor)`.
const TABLE1_NUMERATORS: [(i64, usize, &[i64]); 5] = [
    (1, 1, &[1]),
    (2, 3, &[1]),
    (16, 5, &[1, -3]),
    (16, 7, &[17, -184, 636, -720]),
    (256, 9, &[31, -788, 8096, -43132, 126072, -192672, 120960]),
];

/// The tabulated closed form of `g_k` for `k <= 4`, expanded as
/// `numerator * prod_{j=1}^{k+1} (1 - 2jx)^-(k + 2 - j)`.
pub fn gf_table1_closed_form(k: usize, x_order: usize) -> Result<TruncatedSeries> {
    let &(scalar, shift, poly) = TABLE1_NUMERATORS.get(k).ok_or(Error::NoClosedForm(k))?;
    let orders = Orders::x_only(x_order);
    let mut denom = TruncatedSeries::one(orders);
    for j in 1..=k + 1 {
        denom = &denom * &one_minus(2 * j as i64, (1, 0, 0), orders).pow((k + 2 - j) as u32);
    }
    let numer = TruncatedSeries::from_x_poly(poly, orders).scale(scalar).shift((shift, 0, 0));
    Ok((&numer * &denom.invert_unit()?).truncate(orders))
}

/// `V(x, y) = xy / (1 - x - y / (1 - x))`: the `x^n y^k` coefficient counts
/// valleyless sequences of length `n` with maximum entry `k`.
pub fn gf_valleyless_bivariate(x_order: usize, y_order: usize) -> TruncatedSeries {
    let orders = Orders::new(x_order, 1, y_order);
    let y_over = &TruncatedSeries::monomial(1, (0, 0, 1), orders) * &geometric(1, (1, 0, 0), orders);
    let denom = &one_minus(1, (1, 0, 0), orders) - &y_over;
    let inv = denom.invert_unit().expect("constant term is 1");
    &TruncatedSeries::monomial(1, (1, 0, 1), orders) * &inv
}

/// `b_n(x, q)` by iterating `b_n(x, q) = b_{n-1}(xq, q) / (1 - xq)^2` from
/// `b_0 = 0`, `b_1 = xq / (1 - xq)`.
pub fn b_n_recursive(n: usize, orders: Orders) -> TruncatedSeries {
    if n == 0 {
        return TruncatedSeries::zero(orders);
    }
    let xq = TruncatedSeries::monomial(1, (1, 1, 0), orders);
    let inv_sq = geometric(1, (1, 1, 0), orders).pow(2);
    let mut b = &xq * &geometric(1, (1, 1, 0), orders);
    for _ in 1..n {
        b = &b.substitute_x_times_q() * &inv_sq;
    }
    b
}

/// `b_n(x, q) = x q^n (1 - x q^n) / (xq)_n^2`, the `y^n` coefficient of `V(x, q, y)`.
pub fn b_n_closed(n: usize, orders: Orders) -> Result<TruncatedSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("closed form needs n >= 1".into()));
    }
    let numer = &TruncatedSeries::monomial(1, (1, n, 0), orders) * &one_minus(1, (1, n, 0), orders);
    let denom = q_pochhammer(n, orders).pow(2).invert_unit()?;
    Ok(&numer * &denom)
}

/// `V(x, q, y) = sum_{n >= 1} b_n(x, q) y^n`: the coefficient of
/// `x^n q^p y^k` counts valleyless sequences of length `n`, sum `p` and
/// maximum entry `k`. Terms with `n >= y_order` cannot reach a retained `y`
/// exponent, so the truncated sum is exact.
pub fn v_xqy(x_order: usize, q_order: usize, y_order: usize) -> TruncatedSeries {
    let orders = Orders::new(x_order, q_order, y_order);
    let mut v = TruncatedSeries::zero(orders);
    let b_orders = Orders { y: 1, ..orders };
    for n in 1..y_order {
        let b = b_n_closed(n, b_orders).expect("n >= 1");
        // b_n has no y, so only its y^0 layer needs computing before the shift
        let term = TruncatedSeries::from_terms(b.terms().into_iter().map(|((i, j, _), c)| ((i, j, n), c)), orders);
        v = &v + &term;
    }
    v
}

/// `a_n(q, y)`, the coefficient of `x^n` in `V(x, q, y)`, from the three-term
/// recurrence `a_n = (2q a_{n-1} - q^2 a_{n-2}) / (1 - y q^n)` for `n > 2`
/// with `a_0 = 0`, `a_1 = yq / (1 - yq)`, `a_2 = (q^2 y + q^3 y^2) / ((1 - yq)(1 - yq^2))`.
pub fn a_n_recurrence(n: usize, q_order: usize, y_order: usize) -> TruncatedSeries {
    let orders = Orders::new(1, q_order, y_order);
    let mut prev = a_base(0, orders);
    if n == 0 {
        return prev;
    }
    let mut cur = a_base(1, orders);
    if n == 1 {
        return cur;
    }
    let a2 = a_base(2, orders);
    prev = cur;
    cur = a2;
    for m in 3..=n {
        let next = a_n_step(m, &cur, &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// The stated initial values `a_0`, `a_1`, `a_2`.
pub fn a_base(n: usize, orders: Orders) -> TruncatedSeries {
    match n {
        0 => TruncatedSeries::zero(orders),
        1 => &TruncatedSeries::monomial(1, (0, 1, 1), orders) * &geometric(1, (0, 1, 1), orders),
        2 => {
            let numer = TruncatedSeries::from_terms([((0, 2, 1), 1), ((0, 3, 2), 1)], orders);
            let denom = &one_minus(1, (0, 1, 1), orders) * &one_minus(1, (0, 2, 1), orders);
            &numer * &denom.invert_unit().expect("constant term is 1")
        }
        _ => panic!("a_{n} is not a base case"),
    }
}

/// One application of the recurrence: `(2q a_{n-1} - q^2 a_{n-2}) / (1 - y q^n)`.
///
/// Only valid for `n > 2`; applied at `n = 2` it does not reproduce `a_2`.
pub fn a_n_step(n: usize, prev: &TruncatedSeries, prev2: &TruncatedSeries) -> TruncatedSeries {
    let orders = prev.orders().min(prev2.orders());
    let numer = &prev.shift((0, 1, 0)).scale(2) - &prev2.shift((0, 2, 0));
    &numer.truncate(orders) * &geometric(1, (0, n, 1), orders)
}

/// Both inversion generating functions of length-`n` permutations:
/// `prod_{j=1}^{n-1} (1 + q^j)` over valleyless ones and
/// `prod_{j=1}^{n-1} (1 + q + ... + q^j)` over all of them.
pub fn q_inversion_products(n: usize, q_order: usize) -> Result<(TruncatedSeries, TruncatedSeries)> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let orders = Orders::new(1, q_order, 1);
    let mut valleyless = TruncatedSeries::one(orders);
    let mut all = TruncatedSeries::one(orders);
    for j in 1..n {
        let two_terms = TruncatedSeries::from_terms([((0, 0, 0), 1), ((0, j, 0), 1)], orders);
        let q_int = TruncatedSeries::from_terms((0..=j).map(|e| ((0, e, 0), 1)), orders);
        valleyless = &valleyless * &two_terms;
        all = &all * &q_int;
    }
    Ok((valleyless, all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xs(coeffs: &[i64], order: usize) -> TruncatedSeries {
        TruncatedSeries::from_x_poly(coeffs, Orders::x_only(order))
    }

    fn x_coeffs(s: &TruncatedSeries) -> Vec<i64> {
        (0..s.orders().x).map(|i| s.coefficient(i, 0, 0).try_into().unwrap()).collect()
    }

    #[test]
    fn add_and_mul_basics() {
        let o = Orders::new(4, 4, 4);
        let a = TruncatedSeries::from_terms([((1, 0, 0), 1), ((0, 1, 0), 1)], o);
        let b = TruncatedSeries::from_terms([((1, 0, 0), 1), ((0, 1, 0), -1)], o);
        assert_eq!(&a + &b, TruncatedSeries::monomial(2, (1, 0, 0), o));
        assert_eq!(&a + &TruncatedSeries::zero(o), a);
        assert_eq!(&xs(&[1, 1], 5) + &xs(&[1, -1], 5), xs(&[2], 5));
        assert_eq!(&xs(&[1, 1], 5) * &xs(&[1, 1], 5), xs(&[1, 2, 1], 5));
        assert_eq!(&a * &TruncatedSeries::one(o), a);
        // telescoping
        let m = 7;
        assert_eq!(&xs(&[1, -1], m) * &xs(&[1; 7], m), xs(&[1], m));
    }

    #[test]
    fn binary_ops_take_minimum_orders() {
        let a = TruncatedSeries::one(Orders::new(5, 2, 3));
        let b = TruncatedSeries::one(Orders::new(3, 4, 3));
        assert_eq!((&a + &b).orders(), Orders::new(3, 2, 3));
        assert_eq!((&a * &b).orders(), Orders::new(3, 2, 3));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(xs(&[0, 0, 1], 5).derivative_x(), xs(&[0, 2], 4));
        assert!(xs(&[7], 5).derivative_x().is_zero());
        let d = geometric(2, (1, 0, 0), Orders::x_only(6)).derivative_x();
        assert_eq!(d.orders().x, 5);
        // d/dx sum 2^i x^i = sum i 2^i x^(i-1)
        assert_eq!(x_coeffs(&d), vec![2, 8, 24, 64, 160]);
    }

    #[test]
    fn inversion_examples() {
        let o = Orders::new(6, 6, 6);
        assert_eq!(TruncatedSeries::one(o).invert_unit().unwrap(), TruncatedSeries::one(o));
        assert_eq!(x_coeffs(&xs(&[1, -2], 6).invert_unit().unwrap()), vec![1, 2, 4, 8, 16, 32]);
        let inv = one_minus(1, (0, 1, 1), o).invert_unit().unwrap();
        let expected = TruncatedSeries::from_terms((0..6).map(|e| ((0, e, e), 1)), o);
        assert_eq!(inv, expected);
        assert_eq!(
            xs(&[2, 1], 4).invert_unit().unwrap_err(),
            Error::NotAUnit("2".into())
        );
        assert_eq!(x_coeffs(&xs(&[-1, 1], 4).invert_unit().unwrap()), vec![-1, -1, -1, -1]);
    }

    #[test]
    fn substitution_examples() {
        let o = Orders::new(4, 8, 1);
        let x = TruncatedSeries::monomial(1, (1, 0, 0), o);
        assert_eq!(x.substitute_x_times_q(), TruncatedSeries::monomial(1, (1, 1, 0), o));
        let c = TruncatedSeries::constant(5, o);
        assert_eq!(c.substitute_x_times_q(), c);
        let b1 = b_n_recursive(1, o).substitute_x_times_q();
        let expected = TruncatedSeries::from_terms((1..4).map(|i| ((i, 2 * i, 0), 1)), o);
        assert_eq!(b1, expected);
    }

    #[test]
    fn pochhammer_examples() {
        let o = Orders::new(5, 10, 1);
        assert_eq!(q_pochhammer(0, o), TruncatedSeries::one(o));
        assert_eq!(q_pochhammer(1, o), one_minus(1, (1, 1, 0), o));
        let expected = TruncatedSeries::from_terms(
            [((0, 0, 0), 1), ((1, 1, 0), -1), ((1, 2, 0), -1), ((2, 3, 0), 1)],
            o,
        );
        assert_eq!(q_pochhammer(2, o), expected);
    }

    #[test]
    fn valley_gf_examples() {
        let g0 = gf_valley_perms(0, 5);
        assert_eq!(x_coeffs(&g0), vec![0, 1, 2, 4, 8]);
        let g1 = gf_valley_perms(1, 6);
        assert_eq!(x_coeffs(&g1), vec![0, 0, 0, 2, 16, 88]);
        let g2 = gf_valley_perms(2, 6);
        assert_eq!(x_coeffs(&g2), vec![0, 0, 0, 0, 0, 16]);
        assert!(gf_valley_perms(3, 7).is_zero());
    }

    #[test]
    fn table1_closed_forms_match_recursion() {
        for k in 0..=4 {
            for m in [1, 9, 14] {
                let closed = gf_table1_closed_form(k, m).unwrap();
                assert_eq!(closed.orders(), Orders::x_only(m));
                assert!(closed.agrees_with(&gf_valley_perms(k, m)), "k = {k}, m = {m}");
            }
        }
        assert_eq!(gf_table1_closed_form(3, 8).unwrap().coefficient(7, 0, 0), &BigInt::from(272));
        assert_eq!(gf_table1_closed_form(4, 10).unwrap().coefficient(9, 0, 0), &BigInt::from(7936));
        assert_eq!(gf_table1_closed_form(5, 10).unwrap_err(), Error::NoClosedForm(5));
    }

    #[test]
    fn bivariate_examples() {
        let v = gf_valleyless_bivariate(8, 7);
        for k in 1..7 {
            assert_eq!(v.coefficient(1, 0, k), &BigInt::one());
        }
        assert_eq!(v.coefficient(2, 0, 2), &BigInt::from(3));
        assert_eq!(v.coefficient(6, 0, 5), &BigInt::from(1287));
        assert!(v.coefficient(0, 0, 0).is_zero());
    }

    #[test]
    fn b_n_examples() {
        let o = Orders::new(8, 24, 1);
        assert!(b_n_recursive(0, o).is_zero());
        let b1 = TruncatedSeries::from_terms((1..8).map(|i| ((i, i, 0), 1)), o);
        assert_eq!(b_n_recursive(1, o), b1);
        assert_eq!(b_n_closed(1, o).unwrap(), b1);
        for n in 1..=6 {
            assert_eq!(b_n_recursive(n, o), b_n_closed(n, o).unwrap(), "n = {n}");
        }
        assert_eq!(b_n_closed(2, o).unwrap().coefficient(2, 4, 0), &BigInt::one());
        assert_eq!(b_n_closed(2, o).unwrap().coefficient(3, 4, 0), &BigInt::from(3));
        assert!(b_n_closed(0, o).is_err());
    }

    #[test]
    fn v_xqy_examples() {
        let v = v_xqy(11, 21, 6);
        assert_eq!(v.coefficient(10, 20, 5), &BigInt::from(325));
        for k in 1..6 {
            assert_eq!(v.coefficient(1, k, k), &BigInt::one());
        }
        let marginal: BigInt = (0..21).map(|p| v.coefficient(4, p, 3)).sum();
        assert_eq!(marginal, BigInt::from(35));
    }

    #[test]
    fn a_n_examples() {
        let a1 = a_n_recurrence(1, 8, 8);
        let expected = TruncatedSeries::from_terms((1..8).map(|e| ((0, e, e), 1)), Orders::new(1, 8, 8));
        assert_eq!(a1, expected);
        let a2 = a_n_recurrence(2, 10, 4);
        let y2: Vec<i64> = (0..10).map(|p| a2.coefficient(0, p, 2).try_into().unwrap()).collect();
        assert_eq!(y2, vec![0, 0, 0, 2, 1, 0, 0, 0, 0, 0]);
        let a3 = a_n_recurrence(3, 10, 4);
        let y2: Vec<i64> = (0..10).map(|p| a3.coefficient(0, p, 2).try_into().unwrap()).collect();
        assert_eq!(y2, vec![0, 0, 0, 0, 3, 2, 1, 0, 0, 0]);
    }

    #[test]
    fn a_n_step_fails_at_two() {
        let o = Orders::new(1, 12, 6);
        let naive = a_n_step(2, &a_base(1, o), &a_base(0, o));
        assert!(!naive.agrees_with(&a_base(2, o)));
        let v = v_xqy(4, 12, 6);
        assert!(a_base(2, o).agrees_with(&v.x_slice(2)));
        let a3 = a_n_step(3, &a_base(2, o), &a_base(1, o));
        assert!(a3.agrees_with(&v.x_slice(3)));
    }

    #[test]
    fn inversion_products_examples() {
        let (v1, a1) = q_inversion_products(1, 5).unwrap();
        assert_eq!(v1, TruncatedSeries::one(Orders::new(1, 5, 1)));
        assert_eq!(a1, TruncatedSeries::one(Orders::new(1, 5, 1)));
        let (v3, a3) = q_inversion_products(3, 8).unwrap();
        let expected = TruncatedSeries::from_terms((0..4).map(|e| ((0, e, 0), 1)), Orders::new(1, 8, 1));
        assert_eq!(v3, expected);
        assert_eq!(a3.sum_coefficients(), BigInt::from(6));
        for n in 1..10 {
            let (v, _) = q_inversion_products(n, n * n).unwrap();
            assert_eq!(v.sum_coefficients(), BigInt::one() << (n - 1));
        }
    }

    #[test]
    fn plain_and_json_rendering() {
        let o = Orders::new(3, 3, 3);
        let s = TruncatedSeries::from_terms([((0, 0, 0), 3), ((1, 0, 1), -2), ((0, 2, 0), 5)], o);
        assert_eq!(s.to_plain(), "3\n5 q^2\n-2 x^1 y^1\n");
        let json = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(
            json,
            r#"{"terms":[{"x":0,"q":0,"y":0,"coeff":"3"},{"x":0,"q":2,"y":0,"coeff":"5"},{"x":1,"q":0,"y":1,"coeff":"-2"}],"orders":{"x":3,"q":3,"y":3}}"#
        );
    }

    fn arb_series(orders: Orders) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(-50i64..50, orders.len())
            .prop_map(move |c| TruncatedSeries { orders, coeffs: c.into_iter().map(BigInt::from).collect() })
    }

    proptest! {
        #[test]
        fn unit_inverse_is_inverse(mut s in arb_series(Orders::new(4, 3, 3)), neg in any::<bool>()) {
            s.coeffs[0] = if neg { BigInt::from(-1) } else { BigInt::one() };
            let inv = s.invert_unit().unwrap();
            prop_assert_eq!(&s * &inv, TruncatedSeries::one(s.orders()));
        }

        #[test]
        fn json_round_trip(s in arb_series(Orders::new(3, 4, 2))) {
            let text = serde_json::to_string(&s.to_json()).unwrap();
            let back: SeriesJson = serde_json::from_str(&text).unwrap();
            let back = TruncatedSeries::from_json(&back).unwrap();
            prop_assert_eq!(back.orders(), s.orders());
            prop_assert_eq!(back, s);
        }

        #[test]
        fn mul_commutes_and_distributes(
            a in arb_series(Orders::new(3, 3, 2)),
            b in arb_series(Orders::new(3, 3, 2)),
            c in arb_series(Orders::new(3, 3, 2)),
        ) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
