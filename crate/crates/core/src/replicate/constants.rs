use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certify::Certificate;
use crate::error::{Error, Result};
use crate::pipeline::{GroupSpec, Target};
use crate::rootsys::{Family, PlaneType};

/// Shipped literature constants.
pub const DEFAULT_CONSTANTS: &str = include_str!("../../data/constants.json");

const FILE_VERSION: u32 = 1;

/// The inequality a constant witnesses, always of the form `x − λΔ ⩾_R 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Statement {
    /// `x = Adj_V` in the rank-two group whose root system is `plane`.
    Adj { plane: PlaneType },
    /// `x = Δ²` in the given group.
    DeltaSq { family: Family, rank: usize },
    /// `x = Lev₂³ + Lev₃³` in Sp₆(ℤ).
    Levels23,
    /// Type A, rank n ⩾ 5: a witness `((n−1)·λ, R)` taken as given.
    AFamily,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Adj { plane } => write!(f, "Adj[{plane}]"),
            Statement::DeltaSq { family, rank } => write!(f, "Delta^2[{family}{rank}]"),
            Statement::Levels23 => f.write_str("Lev2+Lev3[C3]"),
            Statement::AFamily => f.write_str("A-family"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Literature { citation: String },
    Certificate { id: String },
}

impl Source {
    pub fn is_certified(&self) -> bool {
        matches!(self, Source::Certificate { .. })
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Literature { citation } => write!(f, "literature: {citation}"),
            Source::Certificate { id } => write!(f, "certificate {}", &id[..id.len().min(16)]),
        }
    }
}

/// Parses `"p/q"`, an integer or a finite decimal exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(digits, den);
    Ok(if neg { -q } else { q })
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Finite decimals print as decimals, everything else as `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    let mut den = q.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    let places = twos.max(fives);
    if den != BigInt::from(1) || places > 40 {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let scaled = (q * BigRational::from_integer(num_traits::pow(BigInt::from(10), places))).to_integer();
    let digits = scaled.abs().to_string();
    let sign = if q.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (i, f) = padded.split_at(padded.len() - places);
    format!("{sign}{i}.{f}")
}

/// A witness `x − λΔ ⩾_R 0` for one statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constant {
    pub statement: Statement,
    pub radius: usize,
    #[serde(with = "rational_string")]
    pub lambda: BigRational,
    pub source: Source,
}

impl Constant {
    fn validate(&self) -> Result<()> {
        if self.lambda.is_negative() {
            return Err(Error::Domain(format!("{}: negative lambda", self.statement)));
        }
        if self.radius == 0 {
            return Err(Error::Domain(format!("{}: radius must be at least 1", self.statement)));
        }
        Ok(())
    }

    /// Which statement a certificate witnesses, if it is one we consume.
    pub fn from_certificate(cert: &Certificate) -> Result<Self> {
        let GroupSpec::Chevalley { family, rank } = cert.group else {
            return Err(Error::Domain(format!(
                "certificate for {} has no table row",
                cert.group
            )));
        };
        let plane = |f: Family| match f {
            Family::A => Some(PlaneType::A2),
            Family::B | Family::C => Some(PlaneType::C2),
            Family::G => Some(PlaneType::G2),
            _ => None,
        };
        let statement = match (cert.target, family, rank) {
            (Target::Adj, f, 2) if plane(f).is_some() => Statement::Adj {
                plane: plane(f).expect("checked"),
            },
            (Target::Levels23, Family::C, 3) => Statement::Levels23,
            (Target::DeltaSq, f, r) => Statement::DeltaSq { family: f, rank: r },
            (t, f, r) => return Err(Error::Domain(format!("certificate {t} on {f}{r} has no table row"))),
        };
        let c = Constant {
            statement,
            radius: cert.radius,
            lambda: cert.lambda_certified()?,
            source: Source::Certificate { id: cert.id()? },
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsFile {
    version: u32,
    constants: Vec<Constant>,
}

/// Constants keyed by `(statement, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSet {
    map: BTreeMap<(Statement, usize), Constant>,
}

impl ConstantSet {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let file: ConstantsFile = serde_json::from_str(text).map_err(|e| Error::format(origin, e))?;
        if file.version != FILE_VERSION {
            return Err(Error::format(origin, format!("unsupported version {}", file.version)));
        }
        let mut map = BTreeMap::new();
        for c in file.constants {
            c.validate().map_err(|e| Error::format(origin, e))?;
            let key = (c.statement, c.radius);
            if map.insert(key, c).is_some() {
                return Err(Error::format(
                    origin,
                    format!("duplicate constant {} at R = {}", key.0, key.1),
                ));
            }
        }
        Ok(ConstantSet { map })
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_CONSTANTS, Path::new("<shipped constants>")).expect("shipped constants are valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn get(&self, statement: Statement, radius: usize) -> Option<&Constant> {
        self.map.get(&(statement, radius))
    }

    pub fn require(&self, statement: Statement, radius: usize) -> Result<&Constant> {
        self.get(statement, radius)
            .ok_or_else(|| Error::Domain(format!("no constant for {statement} at R = {radius}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constant> {
        self.map.values()
    }

    /// Installs `c` if no constant exists for its key, if it is smaller than
    /// the existing one, or if `force` is set. Returns whether it was installed.
    pub fn offer(&mut self, c: Constant, force: bool) -> bool {
        let key = (c.statement, c.radius);
        let take = match self.map.get(&key) {
            None => true,
            Some(old) => force || c.lambda < old.lambda,
        };
        if take {
            self.map.insert(key, c);
        }
        take
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ConstantsFile {
            version: FILE_VERSION,
            constants: self.map.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Consistency(e.to_string()))
    }
}
