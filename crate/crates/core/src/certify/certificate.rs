use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{domination_constant, kappa_lower_bound, verify, CertifiedBound, RationalGram, Verified};
use crate::chevalley::BallCache;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::pipeline::{build_problem, GroupSpec, Target};
use crate::sos::{SolverStats, SosProblem};

pub const FORMAT: &str = "kazhdan-certificate";
pub const FORMAT_VERSION: u32 = 2;
const LAYOUT: &str = "upper triangle, row-major, i64 little-endian numerators over 2^bits";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalString {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalString {
    fn from(q: &BigRational) -> Self {
        RationalString {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

impl RationalString {
    pub fn to_rational(&self) -> Result<BigRational> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| Error::Domain(format!("bad integer {s:?}")))
        };
        let den = parse(&self.den)?;
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(BigRational::new(parse(&self.num)?, den))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().ok().and_then(|q| q.to_f64()).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramAttachment {
    /// File name, relative to the certificate.
    pub path: String,
    pub sha256: String,
    pub n: usize,
    pub denominator_bits: u32,
    pub eps: RationalString,
    pub layout: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub solver: SolverStats,
    pub solver_lambda: f64,
    pub code_version: String,
    pub config_sha256: String,
}

/// Immutable record of a certified bound `target − λ·Δ ⩾ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format: String,
    pub version: u32,
    pub group: GroupSpec,
    pub target: Target,
    pub radius: usize,
    pub generators: usize,
    pub lambda_rounded: RationalString,
    pub lambda_shift: RationalString,
    pub lambda_certified: RationalString,
    pub residual_l1: RationalString,
    pub domination_constant: RationalString,
    pub kappa_lower_bound: f64,
    pub gram: GramAttachment,
    pub provenance: Provenance,
}

fn gram_bytes(g: &RationalGram) -> Vec<u8> {
    g.upper_triangle().iter().flat_map(|v| v.to_le_bytes()).collect()
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Certificate {
    pub fn new(
        group: GroupSpec,
        target: Target,
        p: &SosProblem,
        bound: &CertifiedBound,
        solver: SolverStats,
        solver_lambda: f64,
        config_json: &str,
    ) -> Self {
        let v = &bound.verified;
        let sha = sha_hex(&gram_bytes(&bound.gram));
        Certificate {
            format: FORMAT.into(),
            version: FORMAT_VERSION,
            group,
            target,
            radius: p.radius,
            generators: p.generators,
            lambda_rounded: (&v.lambda_rounded).into(),
            lambda_shift: (&v.lambda_shift).into(),
            lambda_certified: (&v.lambda_certified).into(),
            residual_l1: (&v.residual_l1).into(),
            domination_constant: (&v.domination_constant).into(),
            kappa_lower_bound: bound.kappa_lower_bound,
            gram: GramAttachment {
                path: format!("gram-{sha}.bin"),
                sha256: sha,
                n: bound.gram.n,
                denominator_bits: bound.gram.bits,
                eps: (&bound.gram.eps()).into(),
                layout: LAYOUT.into(),
            },
            provenance: Provenance {
                solver,
                solver_lambda: if solver_lambda.is_finite() { solver_lambda } else { 0.0 },
                code_version: env!("CARGO_PKG_VERSION").into(),
                config_sha256: sha_hex(config_json.as_bytes()),
            },
        }
    }

    pub fn lambda_certified(&self) -> Result<BigRational> {
        self.lambda_certified.to_rational()
    }

    fn json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Consistency(e.to_string()))
    }

    /// Content address of the envelope.
    pub fn id(&self) -> Result<String> {
        Ok(sha_hex(self.json()?.as_bytes()))
    }

    /// Writes `cert-<hash>.json` and the Gram attachment into `dir`; existing
    /// files with the same name have the same content and are left alone.
    pub fn write(&self, gram: &RationalGram, dir: &Path) -> Result<PathBuf> {
        let bytes = gram_bytes(gram);
        if sha_hex(&bytes) != self.gram.sha256 {
            return Err(Error::Consistency("Gram matrix does not match the certificate".into()));
        }
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let gram_path = dir.join(&self.gram.path);
        if !gram_path.exists() {
            let tmp = gram_path.with_extension("tmp");
            fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
            fs::rename(&tmp, &gram_path).map_err(|e| Error::io(&gram_path, e))?;
        }
        let json = self.json()?;
        let path = dir.join(format!("cert-{}.json", &sha_hex(json.as_bytes())[..16]));
        if !path.exists() {
            fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
        }
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let c: Certificate = serde_json::from_str(&text).map_err(|e| Error::format(path, e))?;
        if c.format != FORMAT || c.version != FORMAT_VERSION {
            return Err(Error::format(
                path,
                format!("unsupported format {} v{}", c.format, c.version),
            ));
        }
        Ok(c)
    }

    /// Reads the attachment next to `cert_path` and checks its hash.
    pub fn load_gram(&self, cert_path: &Path) -> Result<RationalGram> {
        let dir = cert_path.parent().unwrap_or(Path::new("."));
        let path = dir.join(&self.gram.path);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if sha_hex(&bytes) != self.gram.sha256 {
            return Err(Error::format(&path, "sha256 mismatch"));
        }
        if bytes.len() % 8 != 0 {
            return Err(Error::format(&path, "length is not a multiple of 8"));
        }
        let upper: Vec<i64> = bytes
            .chunks_exact(8)
            .map(|c| i64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let eps = self.gram.eps.to_rational()?;
        let eps_num = (eps * BigRational::from_integer(BigInt::from(1u64) << self.gram.denominator_bits))
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("eps numerator"))?;
        RationalGram::from_upper_triangle(self.gram.n, self.gram.denominator_bits, &upper, eps_num)
    }

    /// Re-verifies from the file alone: rebuilds the problem, proves the
    /// Gram matrix definite and recomputes the residual exactly. No solver
    /// is involved.
    pub fn replay(path: &Path, exec: Exec, cache: Option<&BallCache>) -> Result<Verified> {
        let cert = Self::load(path)?;
        let gram = cert.load_gram(path)?;
        let p = build_problem(&cert.group, cert.target, cert.radius, exec, cache)?;
        cert.check_against(&p, &gram)
    }

    /// Checks the recorded numbers against `p` and `gram`.
    pub fn check_against(&self, p: &SosProblem, gram: &RationalGram) -> Result<Verified> {
        if p.n != self.gram.n || p.generators != self.generators {
            return Err(Error::Certification(
                "certificate does not match the rebuilt problem".into(),
            ));
        }
        let v = verify(p, gram, &self.lambda_rounded.to_rational()?)?;
        let expect_c = domination_constant(p.radius, p.involutive_generator);
        let checks = [
            (
                "domination constant",
                &v.domination_constant,
                self.domination_constant.to_rational()?,
            ),
            ("lambda shift", &v.lambda_shift, self.lambda_shift.to_rational()?),
            ("residual norm", &v.residual_l1, self.residual_l1.to_rational()?),
            (
                "certified lambda",
                &v.lambda_certified,
                self.lambda_certified.to_rational()?,
            ),
            (
                "domination constant formula",
                &expect_c,
                self.domination_constant.to_rational()?,
            ),
        ];
        for (what, got, recorded) in checks {
            if *got != recorded {
                return Err(Error::Certification(format!(
                    "{what}: recomputed {got}, recorded {recorded}"
                )));
            }
        }
        if v.lambda_certified < BigRational::zero() {
            return Err(Error::Certification("certified lambda is negative".into()));
        }
        if kappa_lower_bound(&v.lambda_certified, p.generators) < self.kappa_lower_bound {
            return Err(Error::Certification(
                "recorded kappa exceeds the recomputed bound".into(),
            ));
        }
        Ok(v)
    }
}
