//! Convex non-decreasing weights `g` and their closed-form derivatives and
//! antiderivatives.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The closed catalog of weight functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    /// `g(x) = c`
    Constant { c: f64 },
    /// `g(x) = c·x^p`, `p ≥ 1`
    Monomial { p: f64, c: f64 },
    /// `g(x) = Σ aᵢ xⁱ` with `aᵢ ≥ 0`
    Poly { coeffs: Vec<f64> },
    /// `g(x) = eˣ`
    Exp,
    /// `g(x) = e^{x²}`
    ExpSq,
    /// `g(x) = sinh x`
    Sinh,
    /// `g(x) = cosh x`
    Cosh,
    /// `g(x) = x^p / (1 - x)` on `[0, 1)`
    RationalMinus { p: u32 },
    /// `g(x) = x^p / (1 + x)`
    RationalPlus { p: u32 },
}

/// A validated weight together with the interval on which it was validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    preset: Preset,
    lo: f64,
    hi: f64,
    hi_open: bool,
    notes: Vec<String>,
}

const VALIDATION_SAMPLES: usize = 1000;
const UNBOUNDED_SPAN: f64 = 20.0;

#[inline]
fn mono(c: f64, x: f64, e: i32) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * x.powi(e)
    }
}

#[inline]
fn mono_f(c: f64, x: f64, e: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else if x == 0.0 && e < 0.0 {
        f64::INFINITY.copysign(c)
    } else if x == 0.0 && e == 0.0 {
        c
    } else {
        c * x.powf(e)
    }
}

/// `∫₀ˣ e^{t²} dt`.
fn int_exp_sq(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        return -int_exp_sq(-x);
    }
    if x > 26.0 {
        // asymptotic expansion of e^{x²} · Dawson-type tail
        let x2 = x * x;
        let mut term = 1.0;
        let mut acc = 1.0;
        for k in 1..8 {
            term *= (2 * k - 1) as f64 / (2.0 * x2);
            acc += term;
        }
        return x2.exp() / (2.0 * x) * acc;
    }
    // Σ x^{2k+1} / (k! (2k+1)), all terms positive
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    let mut k = 0u32;
    loop {
        k += 1;
        power *= x2 / k as f64;
        let term = power / (2.0 * k as f64 + 1.0);
        sum += term;
        if !sum.is_finite() || (term <= 1e-17 * sum && k as f64 >= x2) {
            break;
        }
    }
    sum
}

impl Preset {
    fn g(&self, x: f64) -> f64 {
        match self {
            Preset::Constant { c } => *c,
            Preset::Monomial { p, c } => mono_f(*c, x, *p),
            Preset::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a),
            Preset::Exp => x.exp(),
            Preset::ExpSq => (x * x).exp(),
            Preset::Sinh => x.sinh(),
            Preset::Cosh => x.cosh(),
            Preset::RationalMinus { p } => x.powi(*p as i32) / (1.0 - x),
            Preset::RationalPlus { p } => x.powi(*p as i32) / (1.0 + x),
        }
    }

    fn dg(&self, x: f64) -> f64 {
        match self {
            Preset::Constant { .. } => 0.0,
            Preset::Monomial { p, c } => mono_f(c * p, x, p - 1.0),
            Preset::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, a)| acc * x + i as f64 * a),
            Preset::Exp => x.exp(),
            Preset::ExpSq => 2.0 * x * (x * x).exp(),
            Preset::Sinh => x.cosh(),
            Preset::Cosh => x.sinh(),
            Preset::RationalMinus { p } => {
                let p = *p as i32;
                let d = 1.0 - x;
                mono(p as f64, x, p - 1) / d + x.powi(p) / (d * d)
            }
            Preset::RationalPlus { p } => {
                let p = *p as i32;
                let d = 1.0 + x;
                mono(p as f64, x, p - 1) / d - x.powi(p) / (d * d)
            }
        }
    }

    fn ddg(&self, x: f64) -> f64 {
        match self {
            Preset::Constant { .. } => 0.0,
            Preset::Monomial { p, c } => mono_f(c * p * (p - 1.0), x, p - 2.0),
            Preset::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (i, a)| acc * x + (i * (i - 1)) as f64 * a),
            Preset::Exp => x.exp(),
            Preset::ExpSq => (2.0 + 4.0 * x * x) * (x * x).exp(),
            Preset::Sinh => x.sinh(),
            Preset::Cosh => x.cosh(),
            Preset::RationalMinus { p } => {
                let p = *p as i32;
                let pf = p as f64;
                let d = 1.0 - x;
                mono(pf * (pf - 1.0), x, p - 2) / d
                    + mono(2.0 * pf, x, p - 1) / (d * d)
                    + 2.0 * x.powi(p) / (d * d * d)
            }
            Preset::RationalPlus { p } => {
                let p = *p as i32;
                let pf = p as f64;
                let d = 1.0 + x;
                mono(pf * (pf - 1.0), x, p - 2) / d - mono(2.0 * pf, x, p - 1) / (d * d)
                    + 2.0 * x.powi(p) / (d * d * d)
            }
        }
    }

    fn antiderivative(&self, x: f64) -> f64 {
        match self {
            Preset::Constant { c } => c * x,
            Preset::Monomial { p, c } => c * x.powf(p + 1.0) / (p + 1.0),
            Preset::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, a)| acc * x + a / (i + 1) as f64)
                * x,
            Preset::Exp => x.exp_m1(),
            Preset::ExpSq => int_exp_sq(x),
            Preset::Sinh => 2.0 * (0.5 * x).sinh().powi(2),
            Preset::Cosh => x.sinh(),
            // tᵖ/(1-t) = 1/(1-t) - Σ_{j<p} tʲ
            Preset::RationalMinus { p } => {
                let poly: f64 = (1..=*p as i32).map(|j| x.powi(j) / j as f64).sum();
                -(-x).ln_1p() - poly
            }
            // tᵖ/(1+t) = Σ_{j<p} (-1)^{p-1-j} tʲ + (-1)ᵖ/(1+t)
            Preset::RationalPlus { p } => {
                let p = *p as i32;
                let poly: f64 = (0..p)
                    .map(|j| {
                        let sign = if (p - 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
                        sign * x.powi(j + 1) / (j + 1) as f64
                    })
                    .sum();
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                poly + sign * x.ln_1p()
            }
        }
    }

    fn default_interval(&self) -> (f64, f64, bool) {
        match self {
            Preset::RationalMinus { .. } => (0.0, 1.0, true),
            _ => (0.0, f64::INFINITY, false),
        }
    }

    /// Strictly increasing or strictly convex on `(0, ∞)`.
    fn is_strict(&self) -> bool {
        match self {
            Preset::Constant { .. } => false,
            Preset::Poly { coeffs } => coeffs.iter().skip(1).any(|&a| a > 0.0),
            _ => true,
        }
    }

    fn check_params(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWeight(m));
        match self {
            Preset::Constant { c } if !(c.is_finite() && *c > 0.0) => {
                bad(format!("constant weight must be positive, got {c}"))
            }
            Preset::Monomial { p, c } if !(p.is_finite() && *p >= 1.0) => {
                let _ = c;
                bad(format!("monomial exponent must be >= 1, got {p}"))
            }
            Preset::Monomial { c, .. } if !(c.is_finite() && *c > 0.0) => {
                bad(format!("monomial coefficient must be positive, got {c}"))
            }
            Preset::Poly { coeffs } if coeffs.is_empty() => bad("empty polynomial".into()),
            Preset::Poly { coeffs } if coeffs.iter().any(|a| !(a.is_finite() && *a >= 0.0)) => {
                bad("polynomial coefficients must be finite and nonnegative".into())
            }
            Preset::Poly { coeffs } if coeffs.iter().all(|&a| a == 0.0) => {
                bad("zero polynomial".into())
            }
            Preset::RationalMinus { p } | Preset::RationalPlus { p } if *p < 1 => {
                bad("rational weights need an integer exponent >= 1".into())
            }
            _ => Ok(()),
        }
    }

    /// Canonical string id, e.g. `monomial:2`, `rational-minus:1`.
    pub fn id(&self) -> String {
        match self {
            Preset::Constant { c } => format!("constant:{c}"),
            Preset::Monomial { p, c } if *c == 1.0 => format!("monomial:{p}"),
            Preset::Monomial { p, c } => format!("monomial:{p}:{c}"),
            Preset::Poly { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|a| a.to_string()).collect();
                format!("poly:{}", parts.join(":"))
            }
            Preset::Exp => "exp".into(),
            Preset::ExpSq => "exp-sq".into(),
            Preset::Sinh => "sinh".into(),
            Preset::Cosh => "cosh".into(),
            Preset::RationalMinus { p } => format!("rational-minus:{p}"),
            Preset::RationalPlus { p } => format!("rational-plus:{p}"),
        }
    }

    /// Builds a preset from its name and parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Preset> {
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if params.len() < lo || params.len() > hi {
                Err(Error::InvalidWeight(format!(
                    "preset `{name}` takes {lo}..={hi} parameters, got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        let int_param = |v: f64| -> Result<u32> {
            if v.fract() == 0.0 && v >= 1.0 && v <= 64.0 {
                Ok(v as u32)
            } else {
                Err(Error::InvalidWeight(format!("`{name}` needs an integer exponent, got {v}")))
            }
        };
        let preset = match name {
            "constant" | "const" => {
                arity(0, 1)?;
                Preset::Constant { c: params.first().copied().unwrap_or(1.0) }
            }
            "monomial" | "mono" => {
                arity(1, 2)?;
                Preset::Monomial { p: params[0], c: params.get(1).copied().unwrap_or(1.0) }
            }
            "poly" => {
                arity(1, 32)?;
                Preset::Poly { coeffs: params.to_vec() }
            }
            "exp" => {
                arity(0, 0)?;
                Preset::Exp
            }
            "exp-sq" | "expsq" => {
                arity(0, 0)?;
                Preset::ExpSq
            }
            "sinh" => {
                arity(0, 0)?;
                Preset::Sinh
            }
            "cosh" => {
                arity(0, 0)?;
                Preset::Cosh
            }
            "rational-minus" => {
                arity(1, 1)?;
                Preset::RationalMinus { p: int_param(params[0])? }
            }
            "rational-plus" => {
                arity(1, 1)?;
                Preset::RationalPlus { p: int_param(params[0])? }
            }
            other => return Err(Error::InvalidWeight(format!("unknown weight preset `{other}`"))),
        };
        preset.check_params()?;
        Ok(preset)
    }
}

impl Weight {
    /// Validates `preset` on its default interval.
    pub fn new(preset: Preset) -> Result<Weight> {
        let (lo, hi, open) = preset.default_interval();
        Weight::build(preset, lo, hi, open)
    }

    /// Validates `preset` on the closed interval `[lo, hi]`.
    pub fn with_interval(preset: Preset, lo: f64, hi: f64) -> Result<Weight> {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidWeight(format!("bad validity interval [{lo}, {hi}]")));
        }
        Weight::build(preset, lo, hi, false)
    }

    /// `make_weight`: preset name + parameter list.
    pub fn from_preset(name: &str, params: &[f64]) -> Result<Weight> {
        Weight::new(Preset::from_name(name, params)?)
    }

    /// Parses an id such as `monomial:2`, `exp`, `rational-minus:1`.
    pub fn parse(id: &str) -> Result<Weight> {
        let mut parts = id.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let params = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidWeight(format!("bad parameter `{p}` in `{id}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Weight::from_preset(name, &params)
    }

    fn build(preset: Preset, lo: f64, hi: f64, hi_open: bool) -> Result<Weight> {
        preset.check_params()?;
        let top = if hi.is_infinite() {
            lo + UNBOUNDED_SPAN
        } else if hi_open {
            hi - 1e-6 * (hi - lo)
        } else {
            hi
        };
        let mut notes = Vec::new();
        for j in 0..VALIDATION_SAMPLES {
            let x = lo + (top - lo) * j as f64 / (VALIDATION_SAMPLES - 1) as f64;
            let (g, dg, ddg) = (preset.g(x), preset.dg(x), preset.ddg(x));
            if g.is_nan() || dg.is_nan() || ddg.is_nan() || g.is_infinite() || dg.is_infinite() {
                return Err(Error::InvalidWeight(format!(
                    "{} is not finite at x = {x}",
                    preset.id()
                )));
            }
            let tol = 1e-12 * (1.0 + g.abs() + dg.abs());
            if g < 0.0 {
                return Err(Error::InvalidWeight(format!("{} is negative at x = {x}", preset.id())));
            }
            if g == 0.0 {
                if x > 0.0 {
                    return Err(Error::InvalidWeight(format!("{} vanishes at x = {x}", preset.id())));
                }
                notes.push(format!("{} vanishes at x = 0 (accepted)", preset.id()));
            }
            if dg < -tol {
                return Err(Error::InvalidWeight(format!("{} is decreasing at x = {x}", preset.id())));
            }
            if ddg < -tol {
                return Err(Error::InvalidWeight(format!("{} is concave at x = {x}", preset.id())));
            }
        }
        Ok(Weight { preset, lo, hi, hi_open, notes })
    }

    #[inline]
    pub fn g(&self, x: f64) -> f64 {
        self.preset.g(x)
    }

    #[inline]
    pub fn dg(&self, x: f64) -> f64 {
        self.preset.dg(x)
    }

    #[inline]
    pub fn ddg(&self, x: f64) -> f64 {
        self.preset.ddg(x)
    }

    /// `G(x) = ∫₀ˣ g`.
    #[inline]
    pub fn antiderivative(&self, x: f64) -> f64 {
        self.preset.antiderivative(x)
    }

    pub fn preset(&self) -> &Preset {
        &self.preset
    }

    pub fn id(&self) -> String {
        self.preset.id()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn is_constant(&self) -> bool {
        !self.preset.is_strict()
    }

    /// Checks that `x` (a value of Φ) lies in the validity interval.
    pub fn check_value(&self, x: f64) -> Result<()> {
        let inside = x >= self.lo && if self.hi_open { x < self.hi } else { x <= self.hi };
        if inside {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "Φ = {x} outside the validity interval of {} [{}, {}{}",
                self.id(),
                self.lo,
                self.hi,
                if self.hi_open { ")" } else { "]" }
            )))
        }
    }

    pub fn check_values(&self, xs: &[f64]) -> Result<()> {
        xs.iter().try_for_each(|&x| self.check_value(x))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Weight> {
        Weight::parse(s)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let id = String::deserialize(d)?;
        Weight::parse(&id).map_err(serde::de::Error::custom)
    }
}
