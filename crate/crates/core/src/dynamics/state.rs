use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary neuron states, bit-packed: bit `i` set means neuron `i` is `+1`.
///
/// Storage cannot represent any value other than `-1` or `+1`. Padding bits
/// past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct State {
    len: usize,
    words: Vec<u64>,
}

pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl State {
    pub fn all_positive(len: usize) -> Self {
        let mut words = vec![u64::MAX; words_for(len)];
        if let Some(last) = words.last_mut() {
            let rem = len % 64;
            if rem != 0 {
                *last = (1u64 << rem) - 1;
            }
        }
        State { len, words }
    }

    pub fn all_negative(len: usize) -> Self {
        State {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut state = State::all_negative(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => state.set_positive(i, true),
                -1 => {}
                other => return Err(Error::InvalidSpin(other as i64)),
            }
        }
        Ok(state)
    }

    /// Each neuron is independently `+1` with probability `positive_bias`.
    pub fn random<R: Rng + ?Sized>(len: usize, positive_bias: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&positive_bias) {
            return Err(Error::domain(
                "positive_bias",
                format!("{positive_bias} is not a probability"),
            ));
        }
        let mut state = State::all_negative(len);
        for i in 0..len {
            if rng.random_bool(positive_bias) {
                state.set_positive(i, true);
            }
        }
        Ok(state)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_positive(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// Value of neuron `i` as `-1` or `+1`. Panics if `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        assert!(i < self.len, "neuron index {i} out of range {}", self.len);
        if self.is_positive(i) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub(crate) fn set_positive(&mut self, i: usize, positive: bool) {
        let mask = 1u64 << (i & 63);
        if positive {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Callers must keep padding bits past `len` clear.
    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn count_positive(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions where `self` and `other` differ. Panics on length mismatch.
    pub fn differing(&self, other: &State) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Copy of this state with neuron `index` negated.
    pub fn flipped(&self, index: usize) -> Result<State> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len,
            });
        }
        let mut out = self.clone();
        out.words[index >> 6] ^= 1u64 << (index & 63);
        Ok(out)
    }

    pub fn negated(&self) -> State {
        let mut out = State {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_padding();
        out
    }

    /// Applies `perm` so that neuron `i` of the result is neuron `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> State {
        assert_eq!(perm.len(), self.len);
        let mut out = State::all_negative(self.len);
        for (i, &src) in perm.iter().enumerate() {
            out.set_positive(i, self.is_positive(src));
        }
        out
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = i8> + '_ {
        (0..self.len).map(move |i| if self.is_positive(i) { 1 } else { -1 })
    }

    pub fn to_signs(&self) -> Vec<i8> {
        self.iter().collect()
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl TryFrom<Vec<i8>> for State {
    type Error = Error;

    fn try_from(signs: Vec<i8>) -> Result<Self> {
        State::from_signs(&signs)
    }
}

impl From<State> for Vec<i8> {
    fn from(state: State) -> Self {
        state.to_signs()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State[")?;
        for s in self.iter() {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn padding_stays_clear() {
        let s = State::all_positive(70);
        assert_eq!(s.count_positive(), 70);
        assert_eq!(s.negated().count_positive(), 0);
        assert_eq!(State::all_negative(70).negated().count_positive(), 70);
    }

    #[test]
    fn flip_is_an_involution() {
        let s = State::from_signs(&[1, 1]).unwrap();
        let f = s.flipped(0).unwrap();
        assert_eq!(f.to_signs(), vec![-1, 1]);
        assert_eq!(s.to_signs(), vec![1, 1]);
        assert_eq!(f.flipped(0).unwrap(), s);
        assert!(matches!(s.flipped(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn rejects_zero_spin() {
        assert!(matches!(
            State::from_signs(&[1, 0, -1]),
            Err(Error::InvalidSpin(0))
        ));
    }

    #[test]
    fn random_extremes() {
        let mut r = rng::stream(1, 0);
        assert_eq!(
            State::random(100, 1.0, &mut r).unwrap().count_positive(),
            100
        );
        assert_eq!(State::random(100, 0.0, &mut r).unwrap().count_positive(), 0);
        assert!(State::random(100, 1.5, &mut r).is_err());
        assert!(State::random(100, -0.1, &mut r).is_err());
    }

    #[test]
    fn random_bias_concentrates() {
        let mut r = rng::stream(2, 0);
        let s = State::random(10_000, 0.6, &mut r).unwrap();
        let frac = s.count_positive() as f64 / 10_000.0;
        let tol = 3.0 * (0.6f64 * 0.4 / 10_000.0).sqrt();
        assert!((frac - 0.6).abs() <= tol, "fraction {frac}");
    }

    #[test]
    fn serde_as_sign_list() {
        let s = State::from_signs(&[1, -1, -1]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[1,-1,-1]");
        let back: State = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<State>("[1,2]").is_err());
    }
}
