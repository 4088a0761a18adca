//! Bias sampling, codebook generation and the binary codebook format.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, FormatError, Result};
use crate::numerics::{check_delta, delta_prime};
use crate::params::SchemeParams;
use crate::rng::{derive, unit_f64, Stream, Tag};
use crate::scalar::Real;

pub const MAGIC: [u8; 4] = *b"TDCB";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 8 + 8 + 8;

/// Default cap on `n * ell`: 2^33 bits, i.e. 1 GiB of packed entries.
pub const DEFAULT_MEMORY_BUDGET_BITS: u64 = 1 << 33;

/// Inverse of the bias distribution function: maps a uniform `u` onto
/// `[delta, 1 - delta]` with density proportional to `1 / sqrt(p (1 - p))`.
///
/// Written as `(1 + sin t) / 2` with `t` centred on zero, which equals
/// `sin^2(delta' + u (pi - 4 delta') / 2)` but keeps `u = 1/2` at exactly
/// one half and makes `p(u) + p(1 - u) = 1` hold to rounding.
pub fn sample_bias<T: Real>(u: T, delta: T) -> Result<T> {
    check_delta(delta)?;
    if !(u >= T::zero() && u <= T::one()) {
        return Err(domain("u", u.as_f64()));
    }
    if u == T::zero() {
        return Ok(delta);
    }
    if u == T::one() {
        return Ok(T::one() - delta);
    }
    let dp = delta_prime(delta)?;
    let half = T::lit(0.5);
    let t = (u - half) * (T::PI() - T::lit(4.0) * dp);
    let p = half * (T::one() + t.sin());
    Ok(p.max(delta).min(T::one() - delta))
}

/// Distribution function of the bias: `(2 asin(sqrt p) - 2 delta') / (pi - 4 delta')`.
pub fn bias_cdf<T: Real>(p: T, delta: T) -> Result<T> {
    check_delta(delta)?;
    if !(p >= delta && p <= T::one() - delta) {
        return Err(domain("p", p.as_f64()));
    }
    let dp = delta_prime(delta)?;
    let two = T::lit(2.0);
    let v = (two * p.sqrt().asin() - two * dp) / (T::PI() - two * two * dp);
    Ok(v.max(T::zero()).min(T::one()))
}

/// Per-position biases, all inside `[delta, 1 - delta]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasVector {
    values: Vec<f64>,
}

impl BiasVector {
    pub fn new(values: Vec<f64>, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        for &p in &values {
            if !(p >= delta && p <= 1.0 - delta) {
                return Err(domain("bias", p));
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A packed word of bits, position `i` at bit `i % 64` of word `i / 64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::default();
        for b in bits {
            v.push(b);
        }
        v
    }

    fn from_words(len: usize, words: &[u64]) -> Self {
        Self { len, words: words.to_vec() }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The bits as a string of `0`/`1` characters.
    pub fn to_ascii(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse_ascii(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidConfig(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Self::from_bools)
    }
}

/// Row-major bit matrix; each row starts on a fresh 64-bit word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_words: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let row_words = words_for(cols);
        Self { rows, cols, row_words, words: vec![0; rows * row_words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols);
        self.words[row * self.row_words + col / 64] >> (col % 64) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, bit: bool) {
        assert!(row < self.rows && col < self.cols);
        let w = &mut self.words[row * self.row_words + col / 64];
        let mask = 1u64 << (col % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.words[row * self.row_words..(row + 1) * self.row_words]
    }

    pub fn row(&self, row: usize) -> BitVector {
        assert!(row < self.rows);
        BitVector::from_words(self.cols, self.row_words(row))
    }

    pub fn column_ones(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, col)).count()
    }
}

/// An `n x ell` binary fingerprinting code with its biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    seed: u64,
    delta: f64,
    biases: BiasVector,
    matrix: BitMatrix,
}

impl Codebook {
    pub fn new(seed: u64, delta: f64, biases: BiasVector, matrix: BitMatrix) -> Result<Self> {
        if biases.len() != matrix.cols() {
            return Err(Error::DimensionMismatch { expected: biases.len(), got: matrix.cols() });
        }
        check_delta(delta)?;
        let biases = BiasVector::new(biases.values, delta)?;
        Ok(Self { seed, delta, biases, matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn ell(&self) -> usize {
        self.matrix.cols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn biases(&self) -> &[f64] {
        self.biases.values()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn entry(&self, user: usize, position: usize) -> bool {
        self.matrix.get(user, position)
    }

    pub fn codeword(&self, user: usize) -> BitVector {
        self.matrix.row(user)
    }
}

/// Codebook generation with an explicit memory cap.
#[derive(Debug, Clone, Copy)]
pub struct Generator {
    pub n: usize,
    pub ell: usize,
    pub delta: f64,
    pub seed: u64,
    pub memory_budget_bits: u64,
}

impl Generator {
    pub fn new(n: usize, ell: usize, delta: f64, seed: u64) -> Self {
        Self { n, ell, delta, seed, memory_budget_bits: DEFAULT_MEMORY_BUDGET_BITS }
    }

    pub fn for_scheme(n: usize, scheme: &SchemeParams<f64>, seed: u64) -> Result<Self> {
        let ell = usize::try_from(scheme.ell).map_err(|_| Error::Capacity {
            n: n as u64,
            ell: scheme.ell,
            budget_bits: DEFAULT_MEMORY_BUDGET_BITS,
        })?;
        Ok(Self::new(n, ell, scheme.delta, seed))
    }

    pub fn with_budget(mut self, bits: u64) -> Self {
        self.memory_budget_bits = bits;
        self
    }

    pub fn generate(&self) -> Result<Codebook> {
        let seed = self.seed;
        self.generate_with(|i| unit_f64(derive(seed, Tag::Bias, i as u64)))
    }

    /// Like [`generate`](Self::generate) but with the per-position uniforms
    /// feeding the bias sampler supplied by the caller.
    pub fn generate_with<U>(&self, bias_uniform: U) -> Result<Codebook>
    where
        U: Fn(usize) -> f64 + Sync,
    {
        self.check()?;
        let delta = self.delta;
        let biases = (0..self.ell)
            .into_par_iter()
            .map(|i| sample_bias(bias_uniform(i), delta))
            .collect::<Result<Vec<f64>>>()?;
        let mut matrix = BitMatrix::zeros(self.n, self.ell);
        let row_words = matrix.row_words;
        if row_words > 0 {
            let seed = self.seed;
            matrix.words.par_chunks_mut(row_words).enumerate().for_each(|(user, row)| {
                let mut stream = Stream::derived(seed, Tag::Entry, user as u64);
                for (i, &p) in biases.iter().enumerate() {
                    if stream.next_f64() < p {
                        row[i / 64] |= 1 << (i % 64);
                    }
                }
            });
        }
        Codebook::new(self.seed, delta, BiasVector { values: biases }, matrix)
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("n", 0.0));
        }
        if self.ell == 0 {
            return Err(domain("ell", 0.0));
        }
        check_delta(self.delta)?;
        let bits = (self.n as u64).checked_mul(words_for(self.ell) as u64 * 64);
        match bits {
            Some(b) if b <= self.memory_budget_bits => Ok(()),
            _ => Err(Error::Capacity { n: self.n as u64, ell: self.ell as u64, budget_bits: self.memory_budget_bits }),
        }
    }
}

/// Codebook for `n` users under `scheme`, fully determined by `(seed, n, scheme)`.
pub fn gen_codebook(n: usize, scheme: &SchemeParams<f64>, seed: u64) -> Result<Codebook> {
    Generator::for_scheme(n, scheme, seed)?.generate()
}

pub fn to_bytes(cb: &Codebook) -> Vec<u8> {
    let row_bytes = cb.ell().div_ceil(8);
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * cb.ell() + cb.n() * row_bytes + 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(cb.n() as u64).to_le_bytes());
    out.extend_from_slice(&(cb.ell() as u64).to_le_bytes());
    out.extend_from_slice(&cb.seed.to_le_bytes());
    out.extend_from_slice(&cb.delta.to_le_bytes());
    for p in cb.biases() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    for user in 0..cb.n() {
        let words = cb.matrix.row_words(user);
        out.extend(words.iter().flat_map(|w| w.to_le_bytes()).take(row_bytes));
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn write_codebook<W: Write>(cb: &Codebook, mut sink: W) -> Result<()> {
    sink.write_all(&to_bytes(cb))?;
    sink.flush()?;
    Ok(())
}

pub fn read_codebook<R: Read>(mut source: R) -> Result<Codebook> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    from_bytes(&buf)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out = self.buf[self.pos..self.pos + N].try_into().expect("length checked by caller");
        self.pos += N;
        out
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub fn from_bytes(buf: &[u8]) -> Result<Codebook> {
    if buf.is_empty() {
        return Err(FormatError::Empty.into());
    }
    if buf.len() < HEADER_LEN {
        return Err(FormatError::Truncated { needed: HEADER_LEN as u64, have: buf.len() as u64 }.into());
    }
    let mut cur = Cursor { buf, pos: 0 };
    let magic: [u8; 4] = cur.take();
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let version = u16::from_le_bytes(cur.take());
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let n = cur.u64();
    let ell = cur.u64();
    let seed = cur.u64();
    let delta = cur.f64();
    if n == 0 {
        return Err(FormatError::InvalidHeader("zero users").into());
    }
    if ell == 0 {
        return Err(FormatError::InvalidHeader("zero positions").into());
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(FormatError::InvalidHeader("delta outside (0, 1/2)").into());
    }
    let row_bytes = ell.div_ceil(8);
    let expected = ell
        .checked_mul(8)
        .and_then(|b| n.checked_mul(row_bytes).and_then(|m| m.checked_add(b)))
        .and_then(|body| body.checked_add(HEADER_LEN as u64 + 4))
        .ok_or(FormatError::InvalidHeader("dimensions overflow"))?;
    let have = buf.len() as u64;
    if have < expected {
        return Err(FormatError::Truncated { needed: expected, have }.into());
    }
    if have > expected {
        return Err(FormatError::TrailingBytes(have - expected).into());
    }
    let body_len = buf.len() - 4;
    let stored = u32::from_le_bytes(buf[body_len..].try_into().expect("four bytes"));
    let computed = crc32fast::hash(&buf[..body_len]);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed }.into());
    }

    // sizes now agree with the actual buffer, so they fit in usize
    let (n, ell, row_bytes) = (n as usize, ell as usize, row_bytes as usize);
    let mut biases = Vec::with_capacity(ell);
    for i in 0..ell {
        let p = cur.f64();
        if !(p >= delta && p <= 1.0 - delta) {
            return Err(FormatError::BiasOutOfRange(i as u64).into());
        }
        biases.push(p);
    }
    let mut matrix = BitMatrix::zeros(n, ell);
    let tail_bits = ell % 8;
    for user in 0..n {
        let bytes = &buf[cur.pos..cur.pos + row_bytes];
        cur.pos += row_bytes;
        if tail_bits != 0 && bytes[row_bytes - 1] >> tail_bits != 0 {
            return Err(FormatError::Padding(user as u64).into());
        }
        let row = &mut matrix.words[user * matrix.row_words..(user + 1) * matrix.row_words];
        for (k, &b) in bytes.iter().enumerate() {
            row[k / 8] |= u64::from(b) << (8 * (k % 8));
        }
    }
    Codebook::new(seed, delta, BiasVector { values: biases }, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sample_bias_identities() {
        for delta in [1e-4f64, 0.017662, 0.1, 0.3] {
            assert_eq!(sample_bias(0.0, delta).unwrap(), delta);
            assert_eq!(sample_bias(1.0, delta).unwrap(), 1.0 - delta);
            assert_eq!(sample_bias(0.5, delta).unwrap(), 0.5);
        }
        assert_eq!(sample_bias(0.5f32, 0.1).unwrap(), 0.5);
    }

    #[test]
    fn sample_bias_matches_sine_squared_form() {
        let delta = 0.05f64;
        let dp = delta.sqrt().asin();
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            let direct = (dp + u * (std::f64::consts::PI - 4.0 * dp) / 2.0).sin().powi(2);
            assert!((sample_bias(u, delta).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn sample_bias_domain() {
        assert!(sample_bias(-0.1, 0.1).is_err());
        assert!(sample_bias(1.1, 0.1).is_err());
        assert!(sample_bias(0.5, 0.5).is_err());
        assert!(sample_bias(0.5, 0.0).is_err());
        assert!(sample_bias(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn cdf_inverts_sampler() {
        for k in 0..=50 {
            let u = k as f64 / 50.0;
            let p = sample_bias(u, 0.02).unwrap();
            assert!((bias_cdf(p, 0.02).unwrap() - u).abs() < 1e-12);
        }
    }

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn bias_samples_follow_distribution() {
        let delta = 0.01;
        let cb = Generator::new(1, 100_000, delta, 42).generate().unwrap();
        let d = ks_statistic(cb.biases().to_vec(), |p| bias_cdf(p, delta).unwrap());
        // asymptotic 1% critical value of the two-sided KS statistic
        let critical = 1.6276 / (100_000f64).sqrt();
        assert!(d < critical, "D = {d}, critical {critical}");
    }

    #[test]
    fn stub_uniforms_give_flat_biases() {
        let cb = Generator::new(1, 300, 0.05, 9).generate_with(|_| 0.5).unwrap();
        assert!(cb.biases().iter().all(|&p| p == 0.5));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Generator::new(10, 100, 0.03, 77).generate().unwrap();
        let b = Generator::new(10, 100, 0.03, 77).generate().unwrap();
        assert_eq!(to_bytes(&a), to_bytes(&b));
        let c = Generator::new(10, 100, 0.03, 78).generate().unwrap();
        assert_ne!(a.matrix(), c.matrix());
        assert_ne!(a.biases(), c.biases());
    }

    #[test]
    fn columns_concentrate_around_bias() {
        let n = 1000;
        let cb = Generator::new(n, 1000, 0.01, 5).generate().unwrap();
        let good = (0..cb.ell())
            .filter(|&i| {
                let p = cb.biases()[i];
                let frac = cb.matrix().column_ones(i) as f64 / n as f64;
                (frac - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt()
            })
            .count();
        assert!(good as f64 >= 0.99 * cb.ell() as f64, "{good}");
    }

    #[test]
    fn capacity_is_enforced() {
        let err = Generator::new(1000, 1000, 0.1, 1).with_budget(64_000).generate().unwrap_err();
        assert!(matches!(err, Error::Capacity { n: 1000, ell: 1000, .. }));
        assert!(Generator::new(10, 64, 0.1, 1).with_budget(640).generate().is_ok());
        assert!(Generator::new(0, 64, 0.1, 1).generate().is_err());
    }

    #[test]
    fn file_round_trip() {
        for ell in [1usize, 7, 8, 63, 64, 65, 200] {
            let cb = Generator::new(5, ell, 0.07, ell as u64).generate().unwrap();
            let mut buf = Vec::new();
            write_codebook(&cb, &mut buf).unwrap();
            assert_eq!(buf.len(), HEADER_LEN + 8 * ell + 5 * ell.div_ceil(8) + 4);
            assert_eq!(read_codebook(buf.as_slice()).unwrap(), cb);
        }
    }

    #[test]
    fn file_layout_is_lsb_first() {
        let mut m = BitMatrix::zeros(1, 10);
        m.set(0, 0, true);
        m.set(0, 9, true);
        let cb = Codebook::new(3, 0.1, BiasVector::new(vec![0.5; 10], 0.1).unwrap(), m).unwrap();
        let bytes = to_bytes(&cb);
        assert_eq!(&bytes[..4], b"TDCB");
        assert_eq!(&bytes[4..6], &[1, 0]);
        let rows = HEADER_LEN + 80;
        assert_eq!(&bytes[rows..rows + 2], &[0b0000_0001, 0b0000_0010]);
        let crc = u32::from_le_bytes(bytes[rows + 2..].try_into().unwrap());
        assert_eq!(crc, crc32fast::hash(&bytes[..rows + 2]));
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let cb = Generator::new(4, 20, 0.1, 11).generate().unwrap();
        let good = to_bytes(&cb);

        assert!(matches!(from_bytes(&[]), Err(Error::Format(FormatError::Empty))));

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::BadMagic(_)))));

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::UnsupportedVersion(2)))));

        // enlarged length field: the file is now too short for its header
        let mut bad = good.clone();
        bad[6] = 5;
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::Truncated { .. }))));
        let mut bad = good.clone();
        bad[6] = 3;
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::TrailingBytes(_)))));
        let mut bad = good.clone();
        bad[13] = 0xff;
        assert!(from_bytes(&bad).is_err());

        assert!(matches!(from_bytes(&good[..good.len() - 1]), Err(Error::Format(FormatError::Truncated { .. }))));

        let mut bad = good.clone();
        let last_row = bad.len() - 5;
        bad[last_row] ^= 0x01;
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::Checksum { .. }))));

        // set a padding bit and fix up the checksum
        let mut bad = good.clone();
        let body = bad.len() - 4;
        bad[body - 1] |= 0x80;
        let crc = crc32fast::hash(&bad[..body]);
        bad[body..].copy_from_slice(&crc.to_le_bytes());
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::Padding(3)))));
    }

    #[test]
    fn bit_vector_ascii() {
        let v = BitVector::parse_ascii("0110\n").unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.to_ascii(), "0110");
        assert_eq!(v.count_ones(), 2);
        assert!(BitVector::parse_ascii("01a").is_err());
        let long = BitVector::from_bools((0..130).map(|i| i % 3 == 0));
        assert_eq!(BitVector::parse_ascii(&long.to_ascii()).unwrap(), long);
    }

    proptest! {
        #[test]
        fn sampler_monotone_and_symmetric(a in 0.0f64..=1.0, b in 0.0f64..=1.0, delta in 1e-6f64..0.49) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let p_lo = sample_bias(lo, delta).unwrap();
            let p_hi = sample_bias(hi, delta).unwrap();
            prop_assert!(p_lo <= p_hi);
            prop_assert!(p_lo >= delta && p_hi <= 1.0 - delta);
            let mirrored = sample_bias(1.0 - a, delta).unwrap();
            prop_assert!((sample_bias(a, delta).unwrap() + mirrored - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn round_trip_any_shape(n in 1usize..6, ell in 1usize..140, seed: u64) {
            let cb = Generator::new(n, ell, 0.05, seed).generate().unwrap();
            prop_assert_eq!(from_bytes(&to_bytes(&cb)).unwrap(), cb);
        }
    }
}
