use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};

/// Seed used when a factor certifies its own rank at construction.
const RANK_CERT_SEED: u64 = 0x5eed_cafe;
const RANK_CERT_TRIALS: usize = 2;

/// Which classical Cartan factor, with its dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// `p x q` complex matrices, `p <= q`.
    I { p: usize, q: usize },
    /// `n x n` antisymmetric matrices.
    II { n: usize },
    /// `n x n` symmetric matrices.
    III { n: usize },
    /// The spin factor on `C^n` (Lie ball).
    IV { n: usize },
}

impl FactorKind {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            FactorKind::I { p, q } => p * q,
            FactorKind::II { n } => n * (n - 1) / 2,
            FactorKind::III { n } => n * (n + 1) / 2,
            FactorKind::IV { n } => n,
        }
    }

    /// Closed-form rank of the triple system.
    pub fn expected_rank(&self) -> usize {
        match *self {
            FactorKind::I { p, q } => p.min(q),
            FactorKind::II { n } => n / 2,
            FactorKind::III { n } => n,
            FactorKind::IV { .. } => 2,
        }
    }

    /// Side length of the underlying matrix, `None` for the spin factor.
    pub fn matrix_shape(&self) -> Option<(usize, usize)> {
        match *self {
            FactorKind::I { p, q } => Some((p, q)),
            FactorKind::II { n } | FactorKind::III { n } => Some((n, n)),
            FactorKind::IV { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FactorKind::I { p, q } => {
                if p == 0 || p > q {
                    bail!(Argument, "type I requires 1 <= p <= q, got p={p}, q={q}");
                }
            }
            FactorKind::II { n } => {
                if n < 2 {
                    bail!(Argument, "type II requires n >= 2, got {n}");
                }
            }
            FactorKind::III { n } => {
                if n < 1 {
                    bail!(Argument, "type III requires n >= 1, got {n}");
                }
            }
            FactorKind::IV { n } => {
                if n < 2 {
                    bail!(Argument, "type IV requires n >= 2, got {n}");
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FactorKind::I { p, q } => write!(f, "I({p},{q})"),
            FactorKind::II { n } => write!(f, "II({n})"),
            FactorKind::III { n } => write!(f, "III({n})"),
            FactorKind::IV { n } => write!(f, "IV({n})"),
        }
    }
}

/// One classical irreducible factor together with its certified rank.
///
/// Construction runs [`super::system_rank`] on random elements and refuses
/// the factor if the measured rank disagrees with the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FactorDescriptor", into = "FactorDescriptor")]
pub struct CartanFactor {
    kind: FactorKind,
    rank: usize,
}

impl CartanFactor {
    pub fn new(kind: FactorKind) -> Result<Self> {
        kind.validate()?;
        let provisional = CartanFactor { kind, rank: kind.expected_rank() };
        let measured = super::system_rank(&provisional, RANK_CERT_TRIALS, RANK_CERT_SEED);
        if measured != provisional.rank {
            bail!(
                Consistency,
                "rank certification for {kind} measured {measured}, closed form {}",
                provisional.rank
            );
        }
        Ok(provisional)
    }

    pub fn type_i(p: usize, q: usize) -> Result<Self> {
        Self::new(FactorKind::I { p, q })
    }

    pub fn type_ii(n: usize) -> Result<Self> {
        Self::new(FactorKind::II { n })
    }

    pub fn type_iii(n: usize) -> Result<Self> {
        Self::new(FactorKind::III { n })
    }

    pub fn type_iv(n: usize) -> Result<Self> {
        Self::new(FactorKind::IV { n })
    }

    /// The unit disc, `I(1,1)`.
    pub fn disc() -> Self {
        Self::type_i(1, 1).expect("disc is a valid factor")
    }

    /// The Euclidean unit ball of `C^n`, `I(1,n)`.
    pub fn ball(n: usize) -> Result<Self> {
        Self::type_i(1, n)
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.kind.ambient_dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl fmt::Display for CartanFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Wire form: `{"kind":"I","p":2,"q":3}`, `{"kind":"IV","n":5}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl TryFrom<FactorDescriptor> for CartanFactor {
    type Error = Error;

    fn try_from(d: FactorDescriptor) -> Result<Self> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::Argument(format!("factor kind {} needs field `{name}`", d.kind)))
        };
        let kind = match d.kind.as_str() {
            "I" => FactorKind::I { p: need(d.p, "p")?, q: need(d.q, "q")? },
            "II" => FactorKind::II { n: need(d.n, "n")? },
            "III" => FactorKind::III { n: need(d.n, "n")? },
            "IV" => FactorKind::IV { n: need(d.n, "n")? },
            other => bail!(Argument, "unknown factor kind `{other}` (expected I, II, III or IV)"),
        };
        CartanFactor::new(kind)
    }
}

impl From<CartanFactor> for FactorDescriptor {
    fn from(f: CartanFactor) -> Self {
        match f.kind {
            FactorKind::I { p, q } => FactorDescriptor { kind: "I".into(), p: Some(p), q: Some(q), n: None },
            FactorKind::II { n } => FactorDescriptor { kind: "II".into(), p: None, q: None, n: Some(n) },
            FactorKind::III { n } => FactorDescriptor { kind: "III".into(), p: None, q: None, n: Some(n) },
            FactorKind::IV { n } => FactorDescriptor { kind: "IV".into(), p: None, q: None, n: Some(n) },
        }
    }
}
