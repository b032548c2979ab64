//! Adem-relation normalization at p = 2, kept as an independent check on
//! the Milnor product.

use super::{binomial_mod, Milnor, MilnorElement};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdemError {
    #[error("word degree {0} exceeds cap {1}")]
    DegreeCap(u32, u32),
}

/// Rewrites `Sq^{a_1} ... Sq^{a_n}` as a sum of admissible words
/// (`a_i ≥ 2 a_{i+1}`), with zero exponents dropped. Coefficients mod 2.
pub fn adem_normalize(word: &[u32], cap: u32) -> Result<BTreeMap<Vec<u32>, u32>, AdemError> {
    let deg: u32 = word.iter().sum();
    if deg > cap {
        return Err(AdemError::DegreeCap(deg, cap));
    }
    let mut memo = HashMap::new();
    let clean: Vec<u32> = word.iter().copied().filter(|&a| a > 0).collect();
    Ok(normalize(&clean, &mut memo))
}

fn normalize(word: &[u32], memo: &mut HashMap<Vec<u32>, BTreeMap<Vec<u32>, u32>>) -> BTreeMap<Vec<u32>, u32> {
    if let Some(done) = memo.get(word) {
        return done.clone();
    }
    let bad = (0..word.len().saturating_sub(1)).find(|&i| word[i] < 2 * word[i + 1]);
    let mut out = BTreeMap::new();
    match bad {
        None => {
            out.insert(word.to_vec(), 1);
        }
        Some(i) => {
            let (a, b) = (word[i], word[i + 1]);
            for c in 0..=a / 2 {
                if binomial_mod(2, b - c - 1, a - 2 * c) == 0 {
                    continue;
                }
                let mut next: Vec<u32> = word[..i].to_vec();
                next.push(a + b - c);
                if c > 0 {
                    next.push(c);
                }
                next.extend_from_slice(&word[i + 2..]);
                for (w, k) in normalize(&next, memo) {
                    *out.entry(w).or_insert(0) ^= k;
                }
            }
            out.retain(|_, k| *k != 0);
        }
    }
    memo.insert(word.to_vec(), out.clone());
    out
}

/// The Milnor-basis expansion of an admissible sum.
pub fn admissible_to_milnor(sum: &BTreeMap<Vec<u32>, u32>) -> MilnorElement {
    let mut total = MilnorElement::zero(2);
    for (w, &c) in sum {
        let mut e = MilnorElement::unit(2);
        for &a in w {
            e = e.multiply(&MilnorElement::monomial(2, Milnor::p_part(&[a]), 1));
        }
        total.add(&e, c);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adm(words: &[&[u32]]) -> BTreeMap<Vec<u32>, u32> {
        words.iter().map(|w| (w.to_vec(), 1)).collect()
    }

    #[test]
    fn basic_relations() {
        assert!(adem_normalize(&[1, 1], 10).unwrap().is_empty());
        assert_eq!(adem_normalize(&[1, 2], 10).unwrap(), adm(&[&[3]]));
        assert_eq!(adem_normalize(&[2, 2], 10).unwrap(), adm(&[&[3, 1]]));
        assert_eq!(adem_normalize(&[2, 4], 10).unwrap(), adm(&[&[6], &[5, 1]]));
        assert!(matches!(adem_normalize(&[8, 8], 10), Err(AdemError::DegreeCap(16, 10))));
    }

    #[test]
    fn milnor_agrees_with_adem() {
        for i in 0..=8u32 {
            for j in 0..=8u32 {
                let x = MilnorElement::monomial(2, Milnor::p_part(&[i]), 1);
                let y = MilnorElement::monomial(2, Milnor::p_part(&[j]), 1);
                let adem = admissible_to_milnor(&adem_normalize(&[i, j], 64).unwrap());
                assert_eq!(x.multiply(&y), adem, "Sq{i} Sq{j}");
            }
        }
    }

    #[test]
    fn triple_words_agree() {
        for w in [[2u32, 2, 2], [1, 2, 1], [3, 2, 4], [4, 4, 4], [1, 4, 6]] {
            let mut e = MilnorElement::unit(2);
            for &a in &w {
                e = e.multiply(&MilnorElement::monomial(2, Milnor::p_part(&[a]), 1));
            }
            assert_eq!(admissible_to_milnor(&adem_normalize(&w, 64).unwrap()), e, "{w:?}");
        }
    }
}
