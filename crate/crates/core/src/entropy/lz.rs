//! LZ77 with hash chains, Elias-gamma coded tokens and a minimum-bit parse.
//!
//! Layout: `γ(n + 1)` then tokens until `n` bytes are produced.
//! A literal is `0` plus eight bits; a match is `1`, `γ(offset)`,
//! `γ(length − MIN_MATCH + 1)`. Matches may overlap the output cursor.
//!
//! The parse is a shortest path over token costs. At each position every
//! length up to the longest match is priced with the nearest offset that
//! reaches it. A match of `LONG_MATCH` bytes or more is taken outright and
//! the positions it covers are not searched.
//!
//! Candidates come from two hash chains: one keyed on 3-byte contexts and
//! one on 8-byte contexts, so distant long matches stay reachable when short
//! contexts repeat often.

use super::{Compressor, EntropyError};
use crate::codec::{gamma_length, BitReader, Bits, CodecError};

const MIN_MATCH: usize = 3;
const LONG_MATCH: usize = 1 << 12;
const LONG_KEY: usize = 8;
const HASH_BITS: u32 = 16;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct LzCompressor {
    window: usize,
    max_chain: usize,
}

impl Default for LzCompressor {
    fn default() -> Self {
        LzCompressor {
            window: 1 << 16,
            max_chain: 256,
        }
    }
}

impl LzCompressor {
    pub fn new(window: usize, max_chain: usize) -> Self {
        LzCompressor {
            window: window.max(1),
            max_chain: max_chain.max(1),
        }
    }
}

fn hash(key: &[u8]) -> usize {
    let v = key
        .iter()
        .fold(0u64, |h, &b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    (v.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> (64 - HASH_BITS)) as usize
}

fn match_cost(offset: usize, len: usize) -> u64 {
    (1 + gamma_length(offset as u64) + gamma_length((len - MIN_MATCH + 1) as u64)) as u64
}

const LITERAL_COST: u64 = 9;

struct Chains {
    key: usize,
    head: Vec<usize>,
    prev: Vec<usize>,
}

impl Chains {
    fn new(key: usize, n: usize) -> Self {
        Chains {
            key,
            head: vec![NONE; 1 << HASH_BITS],
            prev: vec![NONE; n],
        }
    }

    fn insert(&mut self, data: &[u8], pos: usize) {
        if pos + self.key <= data.len() {
            let h = hash(&data[pos..pos + self.key]);
            self.prev[pos] = self.head[h];
            self.head[h] = pos;
        }
    }

    fn first(&self, data: &[u8], pos: usize) -> usize {
        if pos + self.key <= data.len() {
            self.head[hash(&data[pos..pos + self.key])]
        } else {
            NONE
        }
    }
}

#[derive(Clone, Copy)]
enum Token {
    Literal,
    Match { offset: usize, len: usize },
}

impl Token {
    fn len(self) -> usize {
        match self {
            Token::Literal => 1,
            Token::Match { len, .. } => len,
        }
    }
}

impl LzCompressor {
    /// Candidate matches at `pos` as `(offset, length)`, nearest first.
    fn candidates(
        &self,
        data: &[u8],
        pos: usize,
        chains: &[Chains; 2],
        out: &mut Vec<(usize, usize)>,
    ) {
        out.clear();
        let rest = &data[pos..];
        for chain in chains {
            let mut cand = chain.first(data, pos);
            let mut steps = 0;
            while cand != NONE && steps < self.max_chain && pos - cand <= self.window {
                let len = data[cand..]
                    .iter()
                    .zip(rest)
                    .take_while(|(a, b)| a == b)
                    .count();
                if len >= MIN_MATCH {
                    out.push((pos - cand, len));
                    if len >= LONG_MATCH || len == rest.len() {
                        break;
                    }
                }
                cand = chain.prev[cand];
                steps += 1;
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// Relaxes every edge leaving `pos`. Returns the first position worth
    /// searching next: past a long match, or `pos + 1`.
    fn relax(
        &self,
        data: &[u8],
        pos: usize,
        chains: &[Chains; 2],
        cands: &mut Vec<(usize, usize)>,
        cost: &mut [u64],
        step: &mut [Token],
    ) -> usize {
        let here = cost[pos];
        if here + LITERAL_COST < cost[pos + 1] {
            cost[pos + 1] = here + LITERAL_COST;
            step[pos + 1] = Token::Literal;
        }
        self.candidates(data, pos, chains, cands);
        if let Some(&(offset, len)) = cands.iter().find(|c| c.1 >= LONG_MATCH) {
            let end = pos + len;
            let c = here + match_cost(offset, len);
            if c < cost[end] {
                cost[end] = c;
                step[end] = Token::Match { offset, len };
            }
            return end;
        }
        // Each length is priced with the nearest offset reaching it.
        let mut covered = MIN_MATCH - 1;
        for &(offset, len) in cands.iter() {
            for l in covered + 1..=len {
                let c = here + match_cost(offset, l);
                if c < cost[pos + l] {
                    cost[pos + l] = c;
                    step[pos + l] = Token::Match { offset, len: l };
                }
            }
            covered = covered.max(len);
        }
        pos + 1
    }

    fn parse(&self, data: &[u8]) -> Vec<Token> {
        let n = data.len();
        let mut chains = [Chains::new(MIN_MATCH, n), Chains::new(LONG_KEY, n)];
        let mut cost = vec![u64::MAX; n + 1];
        let mut step = vec![Token::Literal; n + 1];
        cost[0] = 0;
        let mut cands = Vec::new();
        let mut skip_to = 0;
        for pos in 0..n {
            if pos >= skip_to {
                skip_to = self.relax(data, pos, &chains, &mut cands, &mut cost, &mut step);
            }
            for chain in &mut chains {
                chain.insert(data, pos);
            }
        }
        let mut tokens = Vec::new();
        let mut at = n;
        while at > 0 {
            let t = step[at];
            tokens.push(t);
            at -= t.len();
        }
        tokens.reverse();
        tokens
    }
}

impl Compressor for LzCompressor {
    fn name(&self) -> &str {
        "lz77"
    }

    fn compress(&self, data: &[u8]) -> Bits {
        let mut out = Bits::new();
        out.push_gamma(data.len() as u64 + 1);
        let mut pos = 0;
        for token in self.parse(data) {
            match token {
                Token::Literal => {
                    out.push(false);
                    out.push_bits(data[pos] as u64, 8);
                }
                Token::Match { offset, len } => {
                    out.push(true);
                    out.push_gamma(offset as u64);
                    out.push_gamma((len - MIN_MATCH + 1) as u64);
                }
            }
            pos += token.len();
        }
        out
    }

    fn decompress_from(&self, reader: &mut BitReader<'_>) -> Result<Vec<u8>, EntropyError> {
        let n = reader.read_gamma()? - 1;
        let n = usize::try_from(n).map_err(|_| CodecError::Malformed {
            offset: 0,
            reason: format!("length {n} does not fit in memory"),
        })?;
        let mut out: Vec<u8> = Vec::new();
        while out.len() < n {
            let at = reader.position();
            if reader.read_bit()? {
                let offset = reader.read_gamma()? as usize;
                let len = reader.read_gamma()? as usize + MIN_MATCH - 1;
                if offset > out.len() || out.len() + len > n {
                    return Err(CodecError::Malformed {
                        offset: at,
                        reason: format!("match (offset {offset}, length {len}) outside output"),
                    }
                    .into());
                }
                let start = out.len() - offset;
                for i in 0..len {
                    out.push(out[start + i]);
                }
            } else {
                out.push(reader.read_bits(8)? as u8);
            }
        }
        Ok(out)
    }

    fn header_length(&self, input_len: usize) -> usize {
        gamma_length(input_len as u64 + 1)
    }
}
