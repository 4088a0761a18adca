//! Collusion strategies under the marking assumption.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{BitVector, Codebook};
use crate::error::{Error, Result};
use crate::rng::{below, derive, Tag};
use crate::scoring::check_members;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Copy the bit of a uniformly chosen colluder.
    Interleave,
    Majority,
    Minority,
    AllOne,
    AllZero,
    /// Fair coin on every detectable position.
    Coinflip,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Interleave,
        Strategy::Majority,
        Strategy::Minority,
        Strategy::AllOne,
        Strategy::AllZero,
        Strategy::Coinflip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Interleave => "interleave",
            Strategy::Majority => "majority",
            Strategy::Minority => "minority",
            Strategy::AllOne => "all_one",
            Strategy::AllZero => "all_zero",
            Strategy::Coinflip => "coinflip",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forgery {
    pub bits: BitVector,
    pub strategy: Strategy,
    pub coalition: Vec<usize>,
    pub seed: u64,
}

fn check_coalition(cb: &Codebook, members: &[usize]) -> Result<()> {
    check_members(cb.n(), members)?;
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig("coalition lists a user twice".into()));
    }
    Ok(())
}

/// The pirates' output. Columns on which the coalition agrees always carry
/// the shared bit; the strategy only decides the remaining ones.
pub fn forge(strategy: Strategy, cb: &Codebook, coalition: &[usize], seed: u64) -> Result<Forgery> {
    check_coalition(cb, coalition)?;
    let size = coalition.len();
    let bits = BitVector::from_bools((0..cb.ell()).map(|i| {
        let ones = coalition.iter().filter(|&&j| cb.entry(j, i)).count();
        if ones == 0 || ones == size {
            return ones == size;
        }
        let coin = derive(seed, Tag::Attack, i as u64);
        let tie_or_flip = coin >> 63 == 1;
        match strategy {
            Strategy::Interleave => cb.entry(coalition[below(coin, size as u64) as usize], i),
            Strategy::Majority if 2 * ones == size => tie_or_flip,
            Strategy::Majority => 2 * ones > size,
            Strategy::Minority if 2 * ones == size => tie_or_flip,
            Strategy::Minority => 2 * ones < size,
            Strategy::AllOne => true,
            Strategy::AllZero => false,
            Strategy::Coinflip => tie_or_flip,
        }
    }));
    Ok(Forgery { bits, strategy, coalition: coalition.to_vec(), seed })
}

/// Whether `y` respects every column on which the coalition agrees.
/// Malformed input (wrong length, bad indices, empty coalition) is reported
/// as a violation.
pub fn verify_marking(cb: &Codebook, coalition: &[usize], y: &BitVector) -> bool {
    if y.len() != cb.ell() || check_members(cb.n(), coalition).is_err() {
        return false;
    }
    (0..cb.ell()).all(|i| {
        let first = cb.entry(coalition[0], i);
        !coalition.iter().all(|&j| cb.entry(j, i) == first) || y.get(i) == first
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{BiasVector, BitMatrix, Generator};
    use crate::params::Variant;
    use crate::scoring::{accuse, coalition_score};
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assert_ne, proptest, ProptestConfig};

    fn columns(cols: &[&str]) -> Codebook {
        let rows = cols[0].len();
        let mut m = BitMatrix::zeros(rows, cols.len());
        for (i, col) in cols.iter().enumerate() {
            for (j, ch) in col.chars().enumerate() {
                m.set(j, i, ch == '1');
            }
        }
        Codebook::new(0, 0.1, BiasVector::new(vec![0.5; cols.len()], 0.1).unwrap(), m).unwrap()
    }

    #[test]
    fn unanimous_columns_are_forced() {
        let cb = columns(&["111", "000"]);
        for st in Strategy::ALL {
            let f = forge(st, &cb, &[0, 1, 2], 5).unwrap();
            assert_eq!(f.bits.to_ascii(), "10", "{st}");
        }
    }

    #[test]
    fn majority_and_minority_on_mixed_column() {
        let cb = columns(&["110"]);
        assert_eq!(forge(Strategy::Majority, &cb, &[0, 1, 2], 0).unwrap().bits.to_ascii(), "1");
        assert_eq!(forge(Strategy::Minority, &cb, &[0, 1, 2], 0).unwrap().bits.to_ascii(), "0");
        assert_eq!(forge(Strategy::AllOne, &cb, &[0, 1, 2], 0).unwrap().bits.to_ascii(), "1");
        assert_eq!(forge(Strategy::AllZero, &cb, &[0, 1, 2], 0).unwrap().bits.to_ascii(), "0");
    }

    #[test]
    fn ties_use_seeded_coin() {
        let cb = columns(&vec!["10"; 200]);
        let a = forge(Strategy::Majority, &cb, &[0, 1], 17).unwrap();
        assert_eq!(a, forge(Strategy::Majority, &cb, &[0, 1], 17).unwrap());
        let ones = a.bits.count_ones();
        assert!(ones > 60 && ones < 140, "{ones}");
        // minority uses the same coin on ties
        assert_eq!(forge(Strategy::Minority, &cb, &[0, 1], 17).unwrap().bits, a.bits);
        assert_ne!(forge(Strategy::Majority, &cb, &[0, 1], 18).unwrap().bits, a.bits);
    }

    #[test]
    fn coalition_validation() {
        let cb = columns(&["10"]);
        assert!(matches!(forge(Strategy::Majority, &cb, &[], 0), Err(Error::EmptyCoalition)));
        assert!(matches!(forge(Strategy::Majority, &cb, &[2], 0), Err(Error::InvalidIndex { index: 2, n: 2 })));
        assert!(forge(Strategy::Majority, &cb, &[1, 1], 0).is_err());
    }

    #[test]
    fn verify_marking_examples() {
        let cb = columns(&["11", "10", "00"]);
        let y = BitVector::parse_ascii("110").unwrap();
        assert!(verify_marking(&cb, &[0, 1], &y));
        assert!(!verify_marking(&cb, &[0, 1], &BitVector::parse_ascii("011").unwrap()));
        assert!(!verify_marking(&cb, &[0, 1], &BitVector::parse_ascii("11").unwrap()));
        // a lone user makes every column unanimous
        let cw = cb.codeword(1);
        let mut flipped = cw.clone();
        flipped.set(0, !cw.get(0));
        assert!(verify_marking(&cb, &[1], &cw));
        assert!(!verify_marking(&cb, &[1], &flipped));
    }

    #[test]
    fn strategy_tokens() {
        for st in Strategy::ALL {
            assert_eq!(st.as_str().parse::<Strategy>().unwrap(), st);
            assert_eq!(serde_json::to_string(&st).unwrap(), format!("\"{st}\""));
        }
        assert!("majorty".parse::<Strategy>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn forgeries_respect_marking(seed: u64, c in 1usize..6, ell in 1usize..120) {
            let cb = Generator::new(8, ell, 0.05, seed).generate().unwrap();
            let members: Vec<usize> = (0..c).map(|k| (k * 3 + seed as usize % 2) % 8).collect();
            for st in Strategy::ALL {
                let f = forge(st, &cb, &members, seed).unwrap();
                prop_assert!(verify_marking(&cb, &members, &f.bits));
                prop_assert_eq!(&f, &forge(st, &cb, &members, seed).unwrap());
            }
        }

        #[test]
        fn lone_interleaver_copies_codeword(seed: u64, user in 0usize..5) {
            let cb = Generator::new(5, 90, 0.05, seed).generate().unwrap();
            let f = forge(Strategy::Interleave, &cb, &[user], seed).unwrap();
            prop_assert_eq!(f.bits, cb.codeword(user));
        }

        #[test]
        fn majority_minority_relation(seed: u64, c in 1usize..4) {
            let size = 2 * c + 1;
            let cb = Generator::new(size, 100, 0.05, seed).generate().unwrap();
            let members: Vec<usize> = (0..size).collect();
            let maj = forge(Strategy::Majority, &cb, &members, seed).unwrap().bits;
            let min = forge(Strategy::Minority, &cb, &members, seed).unwrap().bits;
            for i in 0..100 {
                let ones = members.iter().filter(|&&j| cb.entry(j, i)).count();
                if ones == 0 || ones == size {
                    prop_assert_eq!(maj.get(i), min.get(i));
                } else {
                    prop_assert_ne!(maj.get(i), min.get(i));
                }
            }
        }

        #[test]
        fn high_coalition_score_implies_accusation(seed: u64, c in 1usize..5, z in -20.0f64..20.0) {
            let cb = Generator::new(10, 200, 0.05, seed).generate().unwrap();
            let members: Vec<usize> = (0..c).collect();
            let f = forge(Strategy::Interleave, &cb, &members, seed).unwrap();
            let total = coalition_score(&cb, &f.bits, &members, Variant::Symmetric).unwrap();
            let report = accuse(&cb, &f.bits, z, Variant::Symmetric).unwrap();
            if total > c as f64 * z {
                prop_assert!(members.iter().any(|&j| report.is_accused(j)));
            }
        }
    }
}
