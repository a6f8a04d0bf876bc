//! Exact sparse polynomials over k[S] and their content ideals.
//!
//! Coefficients live in ℚ (arbitrary precision) or a prime field 𝔽p.  A
//! polynomial's content is the fractional ideal generated by its exponent
//! set, which is where the monoid layer meets the ring layer: the
//! Dedekind–Mertens exponent, the extension-operator membership test, and
//! the stable-closure witness construction below are all driven by exact
//! ideal arithmetic on contents.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::ideal::{FracIdeal, IdealError};
use crate::semigroup::NumericalSemigroup;
use crate::star::{StarContext, StarOp};

#[derive(Debug, Error, PartialEq)]
pub enum ContentError {
    #[error("coefficient fields differ: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("the zero polynomial has no content ideal")]
    ZeroPolynomial,
    #[error("generator has support outside the semigroup (exponent {0})")]
    NotInR(i64),
    #[error("content identity not reached within exponent cap {cap}")]
    CapExceeded { cap: u32 },
    #[error("hypothesis violated: {0}")]
    PreconditionFailed(String),
    #[error("bad polynomial literal: {0}")]
    BadLiteral(String),
    #[error("field modulus must be a prime below 2^31, got {0}")]
    BadModulus(u64),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// Coefficient field descriptor: the rationals or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Q,
    Fp(u64),
}

impl Field {
    /// Validated prime-field constructor.
    pub fn prime(p: u64) -> Result<Self, ContentError> {
        let is_prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if !is_prime || p >= 1 << 31 {
            return Err(ContentError::BadModulus(p));
        }
        Ok(Field::Fp(p))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "F{p}"),
        }
    }
}

/// A single exact coefficient, tagged by its field variant.
#[derive(Debug, Clone, PartialEq)]
enum Scalar {
    Q(BigRational),
    Fp(u64),
}

impl Scalar {
    fn from_integer(field: Field, n: i64) -> Self {
        match field {
            Field::Q => Scalar::Q(BigRational::from(BigInt::from(n))),
            Field::Fp(p) => Scalar::Fp((n.rem_euclid(p as i64)) as u64),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(a) => *a == 0,
        }
    }

    fn add(&self, other: &Self, field: Field) -> Self {
        match (self, other, field) {
            (Scalar::Q(a), Scalar::Q(b), _) => Scalar::Q(a + b),
            (Scalar::Fp(a), Scalar::Fp(b), Field::Fp(p)) => Scalar::Fp((a + b) % p),
            _ => unreachable!("scalars always match their polynomial's field"),
        }
    }

    fn mul(&self, other: &Self, field: Field) -> Self {
        match (self, other, field) {
            (Scalar::Q(a), Scalar::Q(b), _) => Scalar::Q(a * b),
            (Scalar::Fp(a), Scalar::Fp(b), Field::Fp(p)) => Scalar::Fp(a * b % p),
            _ => unreachable!("scalars always match their polynomial's field"),
        }
    }

    fn neg(&self, field: Field) -> Self {
        match (self, field) {
            (Scalar::Q(a), _) => Scalar::Q(-a),
            (Scalar::Fp(a), Field::Fp(p)) => Scalar::Fp((p - a) % p),
            _ => unreachable!("scalars always match their polynomial's field"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, field: Field) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        match (self, field) {
            (Scalar::Q(a), _) => Some(Scalar::Q(a.recip())),
            (Scalar::Fp(a), Field::Fp(p)) => {
                // Fermat: a^(p-2) mod p.
                let mut acc = 1u128;
                let mut base = *a as u128;
                let mut e = p - 2;
                let m = p as u128;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    e >>= 1;
                }
                Some(Scalar::Fp(acc as u64))
            }
            _ => unreachable!("scalars always match their polynomial's field"),
        }
    }
}

/// Exact sparse polynomial with Laurent support (integer exponents).
///
/// Zero coefficients are never stored, so `coeffs.is_empty()` iff the
/// polynomial is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    field: Field,
    coeffs: BTreeMap<i64, Scalar>,
}

impl SparsePoly {
    pub fn zero(field: Field) -> Self {
        SparsePoly {
            field,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(field: Field) -> Self {
        Self::monomial(field, 0)
    }

    /// The monomial t^exp with coefficient 1.
    pub fn monomial(field: Field, exp: i64) -> Self {
        Self::from_integer_terms(field, &[(exp, 1)])
    }

    /// Build from (exponent, integer coefficient) pairs; like terms merge
    /// and zero coefficients drop.
    pub fn from_integer_terms(field: Field, terms: &[(i64, i64)]) -> Self {
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for &(exp, c) in terms {
            let s = Scalar::from_integer(field, c);
            merge_term(&mut coeffs, exp, s, field);
        }
        SparsePoly { field, coeffs }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponents carrying nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// If the polynomial is a single nonzero term, its exponent.
    pub fn monomial_exponent(&self) -> Option<i64> {
        if self.coeffs.len() == 1 {
            self.coeffs.keys().next().copied()
        } else {
            None
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), ContentError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(ContentError::FieldMismatch(self.field, other.field))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ContentError> {
        self.check_field(other)?;
        let mut coeffs = self.coeffs.clone();
        for (&exp, c) in &other.coeffs {
            merge_term(&mut coeffs, exp, c.clone(), self.field);
        }
        Ok(SparsePoly {
            field: self.field,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            field: self.field,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e, c.neg(self.field)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ContentError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ContentError> {
        self.check_field(other)?;
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (&ea, ca) in &self.coeffs {
            for (&eb, cb) in &other.coeffs {
                merge_term(&mut coeffs, ea + eb, ca.mul(cb, self.field), self.field);
            }
        }
        Ok(SparsePoly {
            field: self.field,
            coeffs,
        })
    }

    /// Scale so the coefficient at `exp` becomes 1; `None` if absent.
    fn normalized_at(&self, exp: i64) -> Option<Self> {
        let inv = self.coeffs.get(&exp)?.inv(self.field)?;
        Some(SparsePoly {
            field: self.field,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e, c.mul(&inv, self.field)))
                .collect(),
        })
    }
}

fn merge_term(coeffs: &mut BTreeMap<i64, Scalar>, exp: i64, s: Scalar, field: Field) {
    if s.is_zero() {
        return;
    }
    match coeffs.remove(&exp) {
        None => {
            coeffs.insert(exp, s);
        }
        Some(existing) => {
            let merged = existing.add(&s, field);
            if !merged.is_zero() {
                coeffs.insert(exp, merged);
            }
        }
    }
}

/// True iff every exponent of `f` lies in `e` (membership is componentwise
/// for homogeneous ideals).  The zero polynomial is in every ideal.
pub fn poly_in_ideal(sg: &NumericalSemigroup, f: &SparsePoly, e: &FracIdeal) -> bool {
    f.coeffs.keys().all(|&n| e.member(sg, n))
}

/// Content ideal: the fractional ideal generated by the exponent set of `f`.
pub fn content(sg: &NumericalSemigroup, f: &SparsePoly) -> Result<FracIdeal, ContentError> {
    if f.is_zero() {
        return Err(ContentError::ZeroPolynomial);
    }
    Ok(FracIdeal::normalize(sg, &f.support())?)
}

/// Content of a finitely generated ideal: the sum of generator contents.
pub fn content_of_ideal(
    sg: &NumericalSemigroup,
    gens: &[SparsePoly],
) -> Result<FracIdeal, ContentError> {
    let mut it = gens.iter();
    let first = it.next().ok_or(ContentError::ZeroPolynomial)?;
    let mut acc = content(sg, first)?;
    for g in it {
        acc = acc.sum(sg, &content(sg, g)?);
    }
    Ok(acc)
}

/// Default search cap for [`dm_exponent`]: 2 plus the degree span of `g`.
pub fn default_dm_cap(g: &SparsePoly) -> u32 {
    match (g.coeffs.keys().next(), g.coeffs.keys().last()) {
        (Some(lo), Some(hi)) => 2 + (hi - lo) as u32,
        _ => 2,
    }
}

/// Smallest m in [2, cap] with C(g)^m·C(f) = C(g)^{m-1}·C(f·g), verified
/// exactly through ideal arithmetic.  `CapExceeded` means the cap was too
/// small, not that no such m exists.
pub fn dm_exponent(
    sg: &NumericalSemigroup,
    f: &SparsePoly,
    g: &SparsePoly,
    cap: u32,
) -> Result<u32, ContentError> {
    let cf = content(sg, f)?;
    let cg = content(sg, g)?;
    let cfg = content(sg, &f.mul(g)?)?;
    let mut power = cg.clone(); // C(g)^1
    for m in 2..=cap {
        // power is C(g)^{m-1} here.
        let rhs = power.product(sg, &cfg);
        power = power.product(sg, &cg);
        let lhs = power.product(sg, &cf);
        if lhs == rhs {
            return Ok(m);
        }
    }
    Err(ContentError::CapExceeded { cap })
}

/// Tri-state answer for membership questions that are only partially
/// decidable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => write!(f, "yes"),
            Verdict::No => write!(f, "no"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Decide whether 1 lies in the closure of A = t^scale·(gens) under the
/// largest star operation on the full ring that restricts to `star` on
/// homogeneous ideals.
///
/// If A contains a nonzero homogeneous element the answer is exact: 1 is in
/// the closure iff 0 lies in the `star`-closure of the shifted content of
/// A.  A principal A is its own closure, so membership is read off
/// directly.  Otherwise the closure is an infinite intersection with no
/// computable description; we sample elements z multiplying A into the
/// ring and check the factor 1 ∈ z⁻¹·(C(zA))^star — a failed sample is a
/// sound "no", and survival of all samples is an honest "unknown".
pub fn extension_membership(
    ctx: &StarContext,
    star: &StarOp,
    gens: &[SparsePoly],
    scale: i64,
) -> Result<Verdict, ContentError> {
    let sg = &ctx.sg;
    let first = gens.first().ok_or(ContentError::ZeroPolynomial)?;
    for g in gens {
        first.check_field(g)?;
        if g.is_zero() {
            return Err(ContentError::ZeroPolynomial);
        }
        if let Some(&e) = g.coeffs.keys().find(|&&e| !sg.contains(e)) {
            return Err(ContentError::NotInR(e));
        }
    }

    if has_homogeneous_element(sg, gens) {
        let c = content_of_ideal(sg, gens)?.shift(scale);
        return Ok(if ctx.apply(star, &c).member(sg, 0) {
            Verdict::Yes
        } else {
            Verdict::No
        });
    }

    if gens.len() == 1 {
        // A = t^scale·g·R with g not a monomial: units of k[S] are the
        // nonzero constants, so 1 ∈ A is impossible here.
        return Ok(Verdict::No);
    }

    sampled_upper_bound(ctx, star, gens, scale)
}

/// The sampling branch on its own: a sound "no" if some sampled
/// multiplier z certifies 1 ∉ z⁻¹·(C(zA))^star, otherwise "unknown".
/// Never returns "yes".
pub fn sampled_upper_bound(
    ctx: &StarContext,
    star: &StarOp,
    gens: &[SparsePoly],
    scale: i64,
) -> Result<Verdict, ContentError> {
    let sg = &ctx.sg;
    if gens.is_empty() || gens.iter().any(|g| g.is_zero()) {
        return Err(ContentError::ZeroPolynomial);
    }
    for z in sample_multipliers(sg, gens, scale) {
        let scaled: Vec<SparsePoly> = gens
            .iter()
            .map(|g| z.mul(g).expect("sample shares the generators' field"))
            .collect();
        let c_za = content_of_ideal(sg, &scaled)?.shift(scale);
        if !poly_in_ideal(sg, &z, &ctx.apply(star, &c_za)) {
            return Ok(Verdict::No);
        }
    }
    Ok(Verdict::Unknown)
}

/// Detect a nonzero homogeneous element of the ideal generated by `gens`:
/// either a generator is a monomial, or a two-generator combination
/// t^a·gᵢ − c·t^b·gⱼ collapses to one (a, b ranging over semigroup
/// elements that align a pair of supported exponents, c chosen to cancel
/// there).
fn has_homogeneous_element(sg: &NumericalSemigroup, gens: &[SparsePoly]) -> bool {
    if gens.iter().any(|g| g.monomial_exponent().is_some()) {
        return true;
    }
    for (i, gi) in gens.iter().enumerate() {
        for gj in &gens[i..] {
            for &ei in gi.coeffs.keys() {
                for &ej in gj.coeffs.keys() {
                    let target = ei.max(ej);
                    let (a, b) = (target - ei, target - ej);
                    if !sg.contains(a) || !sg.contains(b) {
                        continue;
                    }
                    let lifted_i = gi
                        .mul(&SparsePoly::monomial(gi.field, a))
                        .and_then(|p| p.normalized_at(target).ok_or(ContentError::ZeroPolynomial));
                    let lifted_j = gj
                        .mul(&SparsePoly::monomial(gj.field, b))
                        .and_then(|p| p.normalized_at(target).ok_or(ContentError::ZeroPolynomial));
                    if let (Ok(pi), Ok(pj)) = (lifted_i, lifted_j) {
                        let diff = pi.sub(&pj).expect("same field");
                        if !diff.is_zero() && diff.monomial_exponent().is_some() {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Cap on the number of sampled multipliers per membership query.
const SAMPLE_CAP: usize = 2000;

/// Products of at most three elements of the test family — the generators
/// themselves, 1 + t^g for each gap g, and the monomials t^s for semigroup
/// elements s up to twice the conductor — filtered to those multiplying
/// t^scale·(gens) into the ring.
fn sample_multipliers(
    sg: &NumericalSemigroup,
    gens: &[SparsePoly],
    scale: i64,
) -> Vec<SparsePoly> {
    let field = gens[0].field;
    let mut family: Vec<SparsePoly> = gens.to_vec();
    for &g in &sg.gaps {
        family.push(SparsePoly::from_integer_terms(field, &[(0, 1), (g as i64, 1)]));
    }
    for s in 0..=2 * sg.conductor as i64 {
        if sg.contains(s) {
            family.push(SparsePoly::monomial(field, s));
        }
    }

    let clears = |z: &SparsePoly| {
        gens.iter().all(|g| {
            let prod = z.mul(g).expect("family shares the generators' field");
            prod.coeffs.keys().all(|&e| sg.contains(e + scale))
        })
    };

    let mut out = Vec::new();
    'outer: for i in 0..family.len() {
        for j in i..=family.len() {
            for k in j..=family.len() {
                // Index == len means "omit this factor".
                let mut z = family[i].clone();
                if j < family.len() {
                    z = z.mul(&family[j]).expect("same field");
                }
                if k < family.len() {
                    z = z.mul(&family[k]).expect("same field");
                }
                if !z.is_zero() && clears(&z) {
                    out.push(z);
                    if out.len() >= SAMPLE_CAP {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

/// Result of [`tilde_witness_check`]: the exponent used and the three
/// verified facts about the witness ideal J₀.
#[derive(Debug, Clone)]
pub struct TildeReport {
    /// Max content-identity exponent over the generators.
    pub m: u32,
    /// J₀ = (C(g₁)+⋯+C(gₙ))^{n·m}.
    pub j0: FracIdeal,
    /// star-closure of J₀ equals S.
    pub j0_closure_is_s: bool,
    /// C(f)·J₀ ⊆ E.
    pub content_times_j0_in_e: bool,
    /// C(f) lies in the stable-closure of E.
    pub content_in_stable_closure_of_e: bool,
}

impl TildeReport {
    pub fn pass(&self) -> bool {
        self.j0_closure_is_s && self.content_times_j0_in_e && self.content_in_stable_closure_of_e
    }
}

/// Given f with f·gᵢ ∈ E for all i and C(g₁,…,gₙ) star-dense, build the
/// witness ideal J₀ = (ΣC(gᵢ))^{n·m} and verify that it certifies
/// C(f) ⊆ stable-closure(E).  This cross-checks the monoid-level stable
/// closure against the polynomial-level construction.
pub fn tilde_witness_check(
    ctx: &StarContext,
    star: &StarOp,
    f: &SparsePoly,
    gs: &[SparsePoly],
    e: &FracIdeal,
    cap: Option<u32>,
) -> Result<TildeReport, ContentError> {
    let sg = &ctx.sg;
    if f.is_zero() {
        return Err(ContentError::ZeroPolynomial);
    }
    for (i, g) in gs.iter().enumerate() {
        let fg = f.mul(g)?;
        if !poly_in_ideal(sg, &fg, e) {
            return Err(ContentError::PreconditionFailed(format!(
                "f·g_{} is not contained in E",
                i + 1
            )));
        }
    }
    let cg = content_of_ideal(sg, gs)?;
    if ctx.apply(star, &cg) != FracIdeal::semigroup(sg) {
        return Err(ContentError::PreconditionFailed(
            "closure of the generator content is not the whole semigroup".into(),
        ));
    }

    let mut m = 2;
    for g in gs {
        m = m.max(dm_exponent(sg, f, g, cap.unwrap_or_else(|| default_dm_cap(g)))?);
    }
    let n = gs.len() as u32;
    let j0 = cg.power(sg, n * m);
    let cf = content(sg, f)?;

    let stable = ctx.stable_closure(star);
    Ok(TildeReport {
        m,
        j0_closure_is_s: ctx.apply(star, &j0) == FracIdeal::semigroup(sg),
        content_times_j0_in_e: cf.product(sg, &j0).subset_of(sg, e),
        content_in_stable_closure_of_e: cf.subset_of(sg, &ctx.apply(&stable, e)),
        j0,
    })
}

// ---------------------------------------------------------------------------
// Polynomial literals: "1 + 2*t^3 - t^5 @F2"
// ---------------------------------------------------------------------------

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 @{}", self.field);
        }
        for (i, (&exp, c)) in self.coeffs.iter().enumerate() {
            let (sign, mag) = coeff_parts(c);
            if i == 0 {
                if sign {
                    write!(f, "-")?;
                }
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (mag.as_str(), exp) {
                (_, 0) => write!(f, "{mag}")?,
                ("1", e) => write!(f, "t^{e}")?,
                (_, e) => write!(f, "{mag}*t^{e}")?,
            }
        }
        write!(f, " @{}", self.field)
    }
}

/// Split a coefficient into (is-negative, magnitude string).  Prime-field
/// coefficients are canonically in [0, p) and never negative.
fn coeff_parts(c: &Scalar) -> (bool, String) {
    match c {
        Scalar::Q(q) => (q.is_negative(), q.abs().to_string()),
        Scalar::Fp(a) => (false, a.to_string()),
    }
}

/// Parse a polynomial literal.  Terms are `coeff`, `t^exp`, or
/// `coeff*t^exp`; rational coefficients may be written `a/b`; an optional
/// trailing `@Q` / `@F<p>` picks the field (default ℚ).
pub fn parse_poly(input: &str) -> Result<SparsePoly, ContentError> {
    let bad = |msg: &str| ContentError::BadLiteral(format!("{msg} in {input:?}"));
    let (body, field) = match input.rsplit_once('@') {
        None => (input, Field::Q),
        Some((body, tag)) => {
            let tag = tag.trim();
            let field = if tag == "Q" {
                Field::Q
            } else if let Some(p) = tag.strip_prefix('F') {
                let p: u64 = p.parse().map_err(|_| bad("unreadable field tag"))?;
                Field::prime(p)?
            } else {
                return Err(bad("unknown field tag"));
            };
            (body, field)
        }
    };

    let mut terms: Vec<(i64, BigRational)> = Vec::new();
    let mut rest = body.trim();
    if rest.is_empty() {
        return Err(bad("empty literal"));
    }
    let mut leading = true;
    while !rest.is_empty() {
        let negative = match rest.chars().next() {
            Some('-') => {
                rest = rest[1..].trim_start();
                true
            }
            Some('+') => {
                if leading {
                    return Err(bad("leading '+'"));
                }
                rest = rest[1..].trim_start();
                false
            }
            _ if leading => false,
            _ => return Err(bad("expected '+' or '-' between terms")),
        };
        leading = false;
        // A sign right after '^' belongs to the exponent, not a new term.
        let mut end = rest.len();
        let mut prev_caret = false;
        for (i, ch) in rest.char_indices() {
            if (ch == '+' || ch == '-') && !prev_caret {
                end = i;
                break;
            }
            if !ch.is_whitespace() {
                prev_caret = ch == '^';
            }
        }
        let term = rest[..end].trim();
        rest = rest[end..].trim_start();
        if term.is_empty() {
            return Err(bad("empty term"));
        }

        let (coeff_str, exp) = match term.find('t') {
            None => (term, 0i64),
            Some(tpos) => {
                let before = term[..tpos].trim_end().trim_end_matches('*').trim_end();
                let after = &term[tpos + 1..];
                let exp = if after.is_empty() {
                    1
                } else {
                    after
                        .strip_prefix('^')
                        .ok_or_else(|| bad("expected '^' after 't'"))?
                        .trim()
                        .parse::<i64>()
                        .map_err(|_| bad("unreadable exponent"))?
                };
                (before, exp)
            }
        };
        let coeff: BigRational = if coeff_str.is_empty() {
            BigRational::one()
        } else if let Some((num, den)) = coeff_str.split_once('/') {
            let n: BigInt = num.trim().parse().map_err(|_| bad("unreadable coefficient"))?;
            let d: BigInt = den.trim().parse().map_err(|_| bad("unreadable coefficient"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            BigRational::new(n, d)
        } else {
            let n: BigInt = coeff_str.parse().map_err(|_| bad("unreadable coefficient"))?;
            BigRational::from(n)
        };
        terms.push((exp, if negative { -coeff } else { coeff }));
    }

    let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
    for (exp, q) in terms {
        let s = match field {
            Field::Q => Scalar::Q(q),
            Field::Fp(p) => {
                // a/b mod p; fractions with p | b are rejected.
                let p_big = BigInt::from(p);
                let num = ((q.numer() % &p_big) + &p_big) % &p_big;
                let den = ((q.denom() % &p_big) + &p_big) % &p_big;
                let num: u64 = num.try_into().expect("reduced residue fits in u64");
                let den: u64 = den.try_into().expect("reduced residue fits in u64");
                let den_inv = Scalar::Fp(den)
                    .inv(field)
                    .ok_or_else(|| bad("denominator divisible by the field modulus"))?;
                Scalar::Fp(num).mul(&den_inv, field)
            }
        };
        merge_term(&mut coeffs, exp, s, field);
    }
    Ok(SparsePoly { field, coeffs })
}
