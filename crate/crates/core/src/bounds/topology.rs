use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Genus, boundary components and branching orders of a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySignature {
    pub g: u32,
    pub m: u32,
    /// Interior branching order.
    pub b: u32,
    /// Boundary branching order.
    pub d: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RCase {
    /// `2b + d < 4g − 4 + 2m`
    Low,
    /// `4g − 4 + 2m ≤ 2b + d ≤ 8g − 8 + 4m`
    Middle,
    /// `8g − 8 + 4m < 2b + d`
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologicalR {
    pub r: i64,
    pub case: RCase,
    /// Middle case with odd `d`, where `⌊−d/2⌋` rounds away from zero.
    pub odd_d_middle: bool,
}

impl TopologySignature {
    pub fn new(g: u32, m: u32, b: u32, d: u32) -> Result<Self> {
        let s = TopologySignature { g, m, b, d };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("a capillary surface needs m ≥ 1 boundary components".into()));
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.g as i64 - self.m as i64
    }
}

pub fn topological_r(sig: &TopologySignature) -> TopologicalR {
    let (g, m, b, d) = (sig.g as i64, sig.m as i64, sig.b as i64, sig.d as i64);
    let branch = 2 * b + d;
    if branch < 4 * g - 4 + 2 * m {
        TopologicalR { r: 6 * g - 6 + 3 * m - 2 * b - d, case: RCase::Low, odd_d_middle: false }
    } else if branch <= 8 * g - 8 + 4 * m {
        TopologicalR {
            r: 4 * g - 2 + 2 * m - 2 * b + 2 * (-d).div_euclid(2),
            case: RCase::Middle,
            odd_d_middle: d % 2 == 1,
        }
    } else {
        TopologicalR { r: 0, case: RCase::High, odd_d_middle: false }
    }
}

/// Boundary Maslov index `2χ(Σ) + 2b + d`.
pub fn maslov_index(sig: &TopologySignature) -> i64 {
    2 * sig.euler_characteristic() + 2 * sig.b as i64 + sig.d as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_evaluated_signatures() {
        let r = |g, m, b, d| topological_r(&TopologySignature::new(g, m, b, d).unwrap());
        assert_eq!(r(0, 1, 0, 0), TopologicalR { r: 0, case: RCase::High, odd_d_middle: false });
        assert_eq!(r(1, 1, 0, 0).r, 3);
        assert_eq!(r(1, 1, 0, 0).case, RCase::Low);
        assert_eq!(r(0, 2, 0, 0), TopologicalR { r: 2, case: RCase::Middle, odd_d_middle: false });
        assert!(r(1, 1, 0, 3).odd_d_middle);
        assert_eq!(r(1, 1, 0, 3).r, 4 - 2 + 2 - 4);
    }

    #[test]
    fn maslov_examples() {
        let mu = |g, m, b, d| maslov_index(&TopologySignature::new(g, m, b, d).unwrap());
        assert_eq!(mu(0, 1, 0, 0), 2);
        assert_eq!(mu(0, 2, 0, 0), 0);
        assert_eq!(mu(1, 1, 2, 1), 3);
        assert!(TopologySignature::new(0, 0, 0, 0).is_err());
    }
}
