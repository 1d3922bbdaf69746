//! Linear block codes over small finite fields.
//!
//! Codes enter the pipeline purely through their codeword lists: message
//! `i` (zero-based) is encoded by writing `i` in base `q`, most significant
//! digit first, and multiplying that row vector by the generator matrix over
//! `F_q`. The module bundles the named codes the binary and the test suites
//! exercise — the single parity check code, two Hamming-family codes, and
//! the uncoded `[n, n]` blocks — and accepts arbitrary generator matrices
//! from JSON.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Cap on the number of messages `q^k` a code may enumerate.
pub const MAX_MESSAGES: u64 = 1 << 20;

/// Cap on the codebook size accepted by [`LinearCode::min_distance`].
pub const MAX_DISTANCE_MESSAGES: u64 = 1 << 16;

/// One codeword: a length-`n` string of symbols from `{0, …, q−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword {
    symbols: Vec<u8>,
}

impl Codeword {
    /// Wraps a raw symbol string. Symbol range is checked at the point of
    /// use (against a code's field or a channel's input alphabet), which
    /// lets tests and callers assemble arbitrary — including nonlinear —
    /// codebooks for the classical decoders.
    pub fn new(symbols: Vec<u8>) -> Self {
        Codeword { symbols }
    }

    /// The symbol string.
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Block length.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Whether the codeword is empty (never true for validated codes).
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Hamming distance to another codeword of the same length.
    pub fn hamming_distance(&self, other: &Codeword) -> usize {
        assert_eq!(self.len(), other.len(), "distance requires equal lengths");
        self.symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Serialized form of a code: field size and generator matrix.
///
/// ```json
/// {"q": 2, "generator": [[1, 0, 1], [0, 1, 1]]}
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeDefinition {
    /// Field size.
    pub q: u8,
    /// `k × n` generator matrix with entries in `{0, …, q−1}`.
    pub generator: Vec<Vec<u8>>,
}

/// An `[n, k]_q` linear code with its full codebook enumerated.
#[derive(Clone, Debug)]
pub struct LinearCode {
    q: u8,
    n: usize,
    k: usize,
    generator: Vec<Vec<u8>>,
    codewords: Vec<Codeword>,
}

/// Field arithmetic for the supported `q`: prime fields via modular
/// arithmetic, plus `F₄` as `F₂[x]/(x² + x + 1)` with elements
/// `{0, 1, x, x+1}` encoded as `{0, 1, 2, 3}`.
fn field_supported(q: u8) -> bool {
    q == 4 || (q >= 2 && (2..q).all(|d| !q.is_multiple_of(d)))
}

fn gf_add(q: u8, a: u8, b: u8) -> u8 {
    if q == 4 {
        a ^ b
    } else {
        ((a as u16 + b as u16) % q as u16) as u8
    }
}

fn gf_mul(q: u8, a: u8, b: u8) -> u8 {
    if q == 4 {
        // Multiplication table of F₄ in the {0, 1, x, x+1} encoding.
        const TABLE: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        TABLE[a as usize][b as usize]
    } else {
        ((a as u16 * b as u16) % q as u16) as u8
    }
}

impl LinearCode {
    /// Builds a code from a generator matrix over `F_q`, enumerating all
    /// `q^k` codewords.
    ///
    /// Errors if the field size is unsupported, the matrix is ragged or
    /// carries out-of-range symbols, the message count exceeds
    /// [`MAX_MESSAGES`], or the generator has dependent rows (duplicate
    /// codewords would make messages indistinguishable).
    pub fn from_generator(q: u8, generator: Vec<Vec<u8>>) -> Result<Self> {
        if !field_supported(q) {
            return Err(Error::validation(format!(
                "unsupported field size {q}: expected a prime or 4"
            )));
        }
        let k = generator.len();
        if k == 0 {
            return Err(Error::validation(
                "generator matrix must have at least one row",
            ));
        }
        let n = generator[0].len();
        if n == 0 {
            return Err(Error::validation("generator rows must be nonempty"));
        }
        if generator.iter().any(|row| row.len() != n) {
            return Err(Error::validation(
                "generator rows must all have the same length",
            ));
        }
        if generator.iter().flatten().any(|&s| s >= q) {
            return Err(Error::validation(format!(
                "generator entries must lie in 0..{q}"
            )));
        }
        let m = (q as u64)
            .checked_pow(k as u32)
            .filter(|&m| m <= MAX_MESSAGES)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "codebook size {q}^{k} exceeds the {MAX_MESSAGES} message limit"
                ))
            })?;

        let mut codewords = Vec::with_capacity(m as usize);
        let mut message = vec![0u8; k];
        for index in 0..m {
            // Base-q digits of the message index, most significant first.
            let mut rem = index;
            for slot in (0..k).rev() {
                message[slot] = (rem % q as u64) as u8;
                rem /= q as u64;
            }
            let mut word = vec![0u8; n];
            for (row, &digit) in generator.iter().zip(&message) {
                if digit == 0 {
                    continue;
                }
                for (symbol, &g) in word.iter_mut().zip(row) {
                    *symbol = gf_add(q, *symbol, gf_mul(q, digit, g));
                }
            }
            codewords.push(Codeword { symbols: word });
        }

        let unique: std::collections::HashSet<&Codeword> = codewords.iter().collect();
        if unique.len() != codewords.len() {
            return Err(Error::validation(
                "generator rows are linearly dependent: codewords collide",
            ));
        }

        Ok(LinearCode {
            q,
            n,
            k,
            generator,
            codewords,
        })
    }

    /// Builds one of the named codes used by the binary and test suites:
    ///
    /// * `spc_3_2` — the `[3, 2]₂` single parity check code,
    /// * `reduced_hamming_6_3` — the `[6, 3]₂` code obtained by dropping
    ///   one message bit (and its columns) from the `[7, 4]₂` Hamming code,
    /// * `hamming_7_4` — the `[7, 4]₂` Hamming code,
    /// * `trivial_<n>` (e.g. `trivial_3`) — the uncoded `[n, n]₂` block.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "spc_3_2" => Self::from_generator(2, vec![vec![1, 0, 1], vec![0, 1, 1]]),
            "reduced_hamming_6_3" => Self::from_generator(
                2,
                vec![
                    vec![1, 0, 0, 1, 1, 0],
                    vec![0, 1, 0, 1, 0, 1],
                    vec![0, 0, 1, 0, 1, 1],
                ],
            ),
            "hamming_7_4" => Self::from_generator(
                2,
                vec![
                    vec![1, 0, 0, 0, 0, 1, 1],
                    vec![0, 1, 0, 0, 1, 0, 1],
                    vec![0, 0, 1, 0, 1, 1, 0],
                    vec![0, 0, 0, 1, 1, 1, 1],
                ],
            ),
            other => {
                if let Some(suffix) = other.strip_prefix("trivial_") {
                    let n: usize = suffix
                        .parse()
                        .map_err(|_| Error::validation(format!("unknown code name '{other}'")))?;
                    if n == 0 || n > 20 {
                        return Err(Error::validation(format!(
                            "trivial code length {n} out of the supported range 1..=20"
                        )));
                    }
                    let generator = (0..n)
                        .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
                        .collect();
                    Self::from_generator(2, generator)
                } else {
                    Err(Error::validation(format!("unknown code name '{other}'")))
                }
            }
        }
    }

    /// Parses a [`CodeDefinition`] from JSON and builds the code.
    pub fn from_json_str(json: &str) -> Result<Self> {
        let def: CodeDefinition = serde_json::from_str(json)
            .map_err(|e| Error::validation(format!("malformed code definition: {e}")))?;
        Self::from_generator(def.q, def.generator)
    }

    /// Field size.
    pub fn q(&self) -> u8 {
        self.q
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Message length (generator rows).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of messages `M = q^k`.
    pub fn num_messages(&self) -> usize {
        self.codewords.len()
    }

    /// Generator matrix.
    pub fn generator(&self) -> &[Vec<u8>] {
        &self.generator
    }

    /// All codewords, indexed by message.
    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    /// Codeword for a zero-based message index.
    pub fn codeword(&self, message: usize) -> &Codeword {
        &self.codewords[message]
    }

    /// Minimum Hamming distance, computed as the minimum weight over the
    /// nonzero codewords (they coincide for linear codes).
    ///
    /// Errors with [`Error::TooLarge`] if the codebook exceeds
    /// [`MAX_DISTANCE_MESSAGES`] entries.
    pub fn min_distance(&self) -> Result<usize> {
        if self.codewords.len() as u64 > MAX_DISTANCE_MESSAGES {
            return Err(Error::TooLarge(format!(
                "minimum distance over {} codewords exceeds the {} limit",
                self.codewords.len(),
                MAX_DISTANCE_MESSAGES
            )));
        }
        self.codewords
            .iter()
            .map(|w| w.symbols.iter().filter(|&&s| s != 0).count())
            .filter(|&w| w > 0)
            .min()
            .ok_or_else(|| Error::validation("minimum distance undefined for a single codeword"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spc_code_lists_even_weight_words() {
        let code = LinearCode::named("spc_3_2").unwrap();
        assert_eq!(code.n(), 3);
        assert_eq!(code.k(), 2);
        assert_eq!(code.num_messages(), 4);
        let words: Vec<&[u8]> = code.codewords().iter().map(|c| c.symbols()).collect();
        assert_eq!(
            words,
            vec![
                &[0, 0, 0][..],
                &[0, 1, 1][..],
                &[1, 0, 1][..],
                &[1, 1, 0][..]
            ],
            "messages 0..4 in base-2 MSB-first order times the generator"
        );
        assert_eq!(code.min_distance().unwrap(), 2);
    }

    #[test]
    fn hamming_code_has_distance_three() {
        let code = LinearCode::named("hamming_7_4").unwrap();
        assert_eq!((code.n(), code.k(), code.num_messages()), (7, 4, 16));
        assert_eq!(code.min_distance().unwrap(), 3);
        // Every pair differs in at least three positions — distance via
        // weights must agree with the pairwise definition on a linear code.
        for a in code.codewords() {
            for b in code.codewords() {
                if a != b {
                    assert!(a.hamming_distance(b) >= 3);
                }
            }
        }
    }

    #[test]
    fn reduced_hamming_code_shape_and_distance() {
        let code = LinearCode::named("reduced_hamming_6_3").unwrap();
        assert_eq!((code.n(), code.k(), code.num_messages()), (6, 3, 8));
        assert_eq!(code.min_distance().unwrap(), 3);
    }

    #[test]
    fn trivial_codes_enumerate_all_words() {
        let code = LinearCode::named("trivial_2").unwrap();
        assert_eq!((code.n(), code.k(), code.num_messages()), (2, 2, 4));
        assert_eq!(code.min_distance().unwrap(), 1);
        let words: Vec<&[u8]> = code.codewords().iter().map(|c| c.symbols()).collect();
        assert_eq!(
            words,
            vec![&[0, 0][..], &[0, 1][..], &[1, 0][..], &[1, 1][..]]
        );
        assert!(LinearCode::named("trivial_0").is_err());
        assert!(LinearCode::named("trivial_21").is_err());
        assert!(LinearCode::named("mystery_code").is_err());
    }

    #[test]
    fn quaternary_field_tables_satisfy_field_axioms() {
        // F₄ sanity: x · (x+1) = 1, x · x = x + 1, additive xor.
        assert_eq!(gf_mul(4, 2, 3), 1);
        assert_eq!(gf_mul(4, 2, 2), 3);
        assert_eq!(gf_add(4, 2, 3), 1);
        // Every nonzero element must have an inverse.
        for a in 1..4u8 {
            assert!(
                (1..4u8).any(|b| gf_mul(4, a, b) == 1),
                "{a} needs an inverse"
            );
        }
        // Distributivity spot check over all triples.
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    assert_eq!(
                        gf_mul(4, a, gf_add(4, b, c)),
                        gf_add(4, gf_mul(4, a, b), gf_mul(4, a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn quaternary_repetition_code_enumerates_in_message_order() {
        let code = LinearCode::from_generator(4, vec![vec![1, 1]]).unwrap();
        assert_eq!(code.num_messages(), 4);
        let words: Vec<&[u8]> = code.codewords().iter().map(|c| c.symbols()).collect();
        assert_eq!(
            words,
            vec![&[0, 0][..], &[1, 1][..], &[2, 2][..], &[3, 3][..]]
        );
        assert_eq!(code.min_distance().unwrap(), 2);
    }

    #[test]
    fn ternary_code_uses_modular_arithmetic() {
        let code = LinearCode::from_generator(3, vec![vec![1, 2]]).unwrap();
        let words: Vec<&[u8]> = code.codewords().iter().map(|c| c.symbols()).collect();
        assert_eq!(words, vec![&[0, 0][..], &[1, 2][..], &[2, 1][..]]);
    }

    #[test]
    fn generator_validation_rejects_bad_input() {
        assert!(
            LinearCode::from_generator(6, vec![vec![1]]).is_err(),
            "q = 6 is not a field"
        );
        assert!(LinearCode::from_generator(2, vec![]).is_err());
        assert!(LinearCode::from_generator(2, vec![vec![1, 0], vec![1]]).is_err());
        assert!(LinearCode::from_generator(2, vec![vec![0, 2]]).is_err());
        // Dependent rows: both encode the same codeword set.
        assert!(
            LinearCode::from_generator(2, vec![vec![1, 1], vec![1, 1]]).is_err(),
            "duplicate codewords must be rejected"
        );
    }

    #[test]
    fn message_count_guard_trips() {
        // 2^21 messages exceed the cap.
        let generator = vec![vec![0u8; 21]; 21]
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut row = row.clone();
                row[i] = 1;
                row
            })
            .collect();
        assert!(matches!(
            LinearCode::from_generator(2, generator),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"q": 2, "generator": [[1, 0, 1], [0, 1, 1]]}"#;
        let code = LinearCode::from_json_str(json).unwrap();
        assert_eq!(code.num_messages(), 4);
        assert_eq!(
            code.generator(),
            LinearCode::named("spc_3_2").unwrap().generator()
        );
        assert!(LinearCode::from_json_str("{\"q\": 2}").is_err());
        assert!(LinearCode::from_json_str("not json").is_err());
    }
}
