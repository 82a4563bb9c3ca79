//! Randomized identification codes on the power shell with an
//! information-density threshold decoder, and Monte Carlo error estimates.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{add_noise, dist2, info_density_from_norms, norm2, ChannelSpec};
use crate::error::{check_dim, domain, Error, Result};
use crate::numerics::{clopper_pearson, par_blocks, RngStream, StreamRng};
use crate::shell_quant::{parse, sample_sphere, GENERATE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Every message owns its own i.i.d. codewords.
    IndependentPools,
    /// One shared pool; each message is a distinct random subset of it.
    SharedPoolSubsets,
}

impl Construction {
    fn name(self) -> &'static str {
        match self {
            Construction::IndependentPools => "independent_pools",
            Construction::SharedPoolSubsets => "shared_pool_subsets",
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent_pools" => Ok(Construction::IndependentPools),
            "shared_pool_subsets" => Ok(Construction::SharedPoolSubsets),
            _ => Err(Error::Parse(format!("unknown construction {s:?}"))),
        }
    }
}

/// Shape of a code to build.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdCodeDesign {
    pub messages: usize,
    /// Codewords per message (independent pools) or pool size (shared pool).
    pub codewords: usize,
    /// Subset size for the shared pool; ignored otherwise.
    pub subset_size: usize,
    pub log2_k: f64,
    pub construction: Construction,
}

/// An identification code: a pool of shell codewords, and for each message
/// the indices its encoder picks from uniformly.
#[derive(Clone, Debug, PartialEq)]
pub struct IdCode {
    spec: ChannelSpec,
    construction: Construction,
    log2_k: f64,
    seed: u64,
    pool: Vec<f64>,
    supports: Vec<Vec<u32>>,
}

/// `C(m, t)`, saturating.
fn binomial(m: usize, t: usize) -> u128 {
    if t > m {
        return 0;
    }
    let t = t.min(m - t);
    let mut acc: u128 = 1;
    for i in 0..t {
        acc = match acc.checked_mul((m - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All size-`t` subsets of `0..m` in lexicographic order.
fn all_subsets(m: usize, t: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..t as u32).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..t).rev().find(|&i| (cur[i] as usize) < m - t + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..t {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

const ENUMERATE_LIMIT: u128 = 1 << 16;

pub fn build_id_code(spec: &ChannelSpec, design: &IdCodeDesign, stream: &RngStream) -> Result<IdCode> {
    let &IdCodeDesign { messages, codewords, subset_size, log2_k, construction } = design;
    if messages < 2 {
        return domain(format!("an identification code needs N >= 2 messages, got {messages}"));
    }
    if log2_k.is_nan() {
        return domain("threshold log2_K is NaN");
    }
    let n = spec.n();
    let mut rng = stream.rng();
    let draw_pool = |count: usize, rng: &mut StreamRng| {
        let mut pool = Vec::with_capacity(count * n);
        for _ in 0..count {
            pool.extend(sample_sphere(n, spec.shell_radius(), rng));
        }
        pool
    };
    let (pool, supports) = match construction {
        Construction::IndependentPools => {
            if codewords < 1 {
                return domain("need at least one codeword per message");
            }
            let total = messages.checked_mul(codewords).filter(|&t| t <= u32::MAX as usize);
            let total = total.ok_or_else(|| Error::Construction("code too large".into()))?;
            let pool = draw_pool(total, &mut rng);
            let supports = (0..messages)
                .map(|i| ((i * codewords) as u32..((i + 1) * codewords) as u32).collect())
                .collect();
            (pool, supports)
        }
        Construction::SharedPoolSubsets => {
            if !(subset_size >= 1 && subset_size <= codewords) || codewords > u32::MAX as usize {
                return domain(format!("need 1 <= T <= M, got T = {subset_size}, M = {codewords}"));
            }
            let available = binomial(codewords, subset_size);
            if (messages as u128) > available {
                return Err(Error::Construction(format!(
                    "N = {messages} exceeds the {available} distinct subsets of size {subset_size} from {codewords}"
                )));
            }
            let pool = draw_pool(codewords, &mut rng);
            let supports = if available <= ENUMERATE_LIMIT {
                let all = all_subsets(codewords, subset_size);
                let picks = index::sample(&mut rng, all.len(), messages);
                picks.into_iter().map(|k| all[k].clone()).collect()
            } else {
                let mut seen = BTreeSet::new();
                let mut out = Vec::with_capacity(messages);
                while out.len() < messages {
                    let mut s: Vec<u32> =
                        index::sample(&mut rng, codewords, subset_size).into_iter().map(|v| v as u32).collect();
                    s.sort_unstable();
                    if seen.insert(s.clone()) {
                        out.push(s);
                    }
                }
                out
            };
            (pool, supports)
        }
    };
    Ok(IdCode { spec: *spec, construction, log2_k, seed: stream.seed, pool, supports })
}

impl IdCode {
    /// A code from explicit per-message codebooks of equal size. Identical
    /// codebooks are allowed.
    pub fn from_codebooks(spec: &ChannelSpec, codebooks: &[Vec<Vec<f64>>], log2_k: f64) -> Result<Self> {
        if codebooks.len() < 2 {
            return domain("an identification code needs N >= 2 messages");
        }
        let size = codebooks[0].len();
        if size == 0 || codebooks.iter().any(|c| c.len() != size) {
            return domain("codebooks must be non-empty and of equal size");
        }
        let mut pool = Vec::new();
        let mut supports = Vec::new();
        let mut next = 0u32;
        for book in codebooks {
            let mut s = Vec::with_capacity(size);
            for c in book {
                spec.check_on_shell(c, GENERATE_TOL)?;
                pool.extend_from_slice(c);
                s.push(next);
                next += 1;
            }
            supports.push(s);
        }
        Ok(IdCode { spec: *spec, construction: Construction::IndependentPools, log2_k, seed: 0, pool, supports })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn log2_k(&self) -> f64 {
        self.log2_k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn messages(&self) -> usize {
        self.supports.len()
    }

    /// Support size of each encoder.
    pub fn per_message_codewords(&self) -> usize {
        self.supports[0].len()
    }

    pub fn pool_size(&self) -> usize {
        self.pool.len() / self.spec.n()
    }

    pub fn support(&self, i: usize) -> &[u32] {
        &self.supports[i]
    }

    pub fn codeword(&self, index: u32) -> &[f64] {
        let n = self.spec.n();
        &self.pool[index as usize * n..(index as usize + 1) * n]
    }

    /// Same codewords, different threshold.
    pub fn with_threshold(&self, log2_k: f64) -> Self {
        IdCode { log2_k, ..self.clone() }
    }

    fn check_message(&self, i: usize) -> Result<()> {
        if i >= self.messages() {
            return domain(format!("message {i} out of range 0..{}", self.messages()));
        }
        Ok(())
    }

    fn accepts(&self, i: usize, y: &[f64]) -> bool {
        let y2 = norm2(y);
        self.supports[i]
            .iter()
            .any(|&c| info_density_from_norms(&self.spec, y2, dist2(y, self.codeword(c))) > self.log2_k)
    }

    fn transmit(&self, i: usize, rng: &mut StreamRng) -> Vec<f64> {
        let s = &self.supports[i];
        let pick = s[rng.random_range(0..s.len())];
        let mut y = self.codeword(pick).to_vec();
        add_noise(&mut y, rng);
        y
    }

    /// Header plus codewords and supports, reals at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "id-code 1");
        let _ = writeln!(out, "n {}", self.spec.n());
        let _ = writeln!(out, "power {:.16e}", self.spec.power());
        let _ = writeln!(out, "messages {}", self.messages());
        let _ = writeln!(out, "pool {}", self.pool_size());
        let _ = writeln!(out, "subset_size {}", self.per_message_codewords());
        let _ = writeln!(out, "log2_k {:.16e}", self.log2_k);
        let _ = writeln!(out, "construction {}", self.construction.name());
        let _ = writeln!(out, "seed {}", self.seed);
        for c in self.pool.chunks_exact(self.spec.n()) {
            let row: Vec<String> = c.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        for s in &self.supports {
            let row: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {key}")))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.trim().to_string()),
                _ => Err(Error::Parse(format!("expected {key}, found {line:?}"))),
            }
        };
        if field("id-code")? != "1" {
            return Err(Error::Parse("unsupported id-code version".into()));
        }
        let n: usize = parse(&field("n")?)?;
        let power: f64 = parse(&field("power")?)?;
        let messages: usize = parse(&field("messages")?)?;
        let pool_size: usize = parse(&field("pool")?)?;
        let subset_size: usize = parse(&field("subset_size")?)?;
        let log2_k: f64 = parse(&field("log2_k")?)?;
        let construction: Construction = field("construction")?.parse()?;
        let seed: u64 = parse(&field("seed")?)?;
        let spec = ChannelSpec::new(n, power)?;
        let mut pool = Vec::with_capacity(pool_size * n);
        for _ in 0..pool_size {
            let line = lines.next().ok_or_else(|| Error::Parse("missing codeword row".into()))?;
            let row = line.split_whitespace().map(parse::<f64>).collect::<Result<Vec<_>>>()?;
            check_dim(n, row.len())?;
            spec.check_on_shell(&row, GENERATE_TOL)?;
            pool.extend(row);
        }
        let mut supports = Vec::with_capacity(messages);
        for _ in 0..messages {
            let line = lines.next().ok_or_else(|| Error::Parse("missing support row".into()))?;
            let row = line.split_whitespace().map(parse::<u32>).collect::<Result<Vec<_>>>()?;
            check_dim(subset_size, row.len())?;
            if row.iter().any(|&v| v as usize >= pool_size) {
                return Err(Error::Parse("support index outside the pool".into()));
            }
            supports.push(row);
        }
        if messages < 2 {
            return Err(Error::Parse("an identification code needs N >= 2 messages".into()));
        }
        Ok(IdCode { spec, construction, log2_k, seed, pool, supports })
    }
}

/// Accepts iff some codeword of message `i` has information density with
/// `y` above `log2_K`.
pub fn identify(code: &IdCode, i: usize, y: &[f64]) -> Result<bool> {
    code.check_message(i)?;
    check_dim(code.spec.n(), y.len())?;
    Ok(code.accepts(i, y))
}

/// Error rate with a 95% Clopper-Pearson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub count: u64,
}

impl ErrorEstimate {
    fn from_count(count: u64, trials: usize) -> Self {
        let (ci_low, ci_high) = clopper_pearson(count, trials as u64, 0.95);
        ErrorEstimate { value: count as f64 / trials as f64, ci_low, ci_high, trials, count }
    }

    /// An exactly known rate (0 or 1) with a zero-width interval.
    fn exact(value: f64, trials: usize) -> Self {
        let count = if value == 1.0 { trials as u64 } else { 0 };
        ErrorEstimate { value, ci_low: value, ci_high: value, trials, count }
    }
}

fn count_events(code: &IdCode, sender: usize, decoder: usize, event_on_accept: bool, trials: usize, stream: &RngStream) -> u64 {
    par_blocks(trials, stream, |rng, len| {
        let mut hits = 0u64;
        for _ in 0..len {
            let y = code.transmit(sender, rng);
            if code.accepts(decoder, &y) == event_on_accept {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 100 {
        return domain(format!("error estimation needs at least 100 trials, got {trials}"));
    }
    Ok(())
}

/// Missed detection rate of message `i`.
pub fn estimate_type1(code: &IdCode, i: usize, trials: usize, stream: &RngStream) -> Result<ErrorEstimate> {
    code.check_message(i)?;
    check_trials(trials)?;
    if code.log2_k == f64::NEG_INFINITY {
        return Ok(ErrorEstimate::exact(0.0, trials));
    }
    if code.log2_k == f64::INFINITY {
        return Ok(ErrorEstimate::exact(1.0, trials));
    }
    Ok(ErrorEstimate::from_count(count_events(code, i, i, false, trials, stream), trials))
}

/// Rate at which decoder `j` accepts when message `i` is sent.
pub fn estimate_type2(code: &IdCode, i: usize, j: usize, trials: usize, stream: &RngStream) -> Result<ErrorEstimate> {
    code.check_message(i)?;
    code.check_message(j)?;
    if i == j {
        return domain("type-II error needs two different messages");
    }
    check_trials(trials)?;
    if code.log2_k == f64::INFINITY {
        return Ok(ErrorEstimate::exact(0.0, trials));
    }
    if code.log2_k == f64::NEG_INFINITY {
        return Ok(ErrorEstimate::exact(1.0, trials));
    }
    Ok(ErrorEstimate::from_count(count_events(code, i, j, true, trials, stream), trials))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub sent: usize,
    pub tested: usize,
    pub estimate: ErrorEstimate,
}

/// Exhaustive per-message and per-pair error estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub max_type1: ErrorEstimate,
    pub argmax_type1: usize,
    pub max_type2: ErrorEstimate,
    pub argmax_type2: (usize, usize),
    pub type1: Vec<ErrorEstimate>,
    pub type2: Vec<PairEstimate>,
    pub eps: f64,
    pub delta: f64,
    /// Both maxima have their upper confidence limit within `(eps, delta)`.
    pub certified: bool,
}

/// Default cap on `N (N-1) trials_per_pair`.
pub const DEFAULT_PAIR_BUDGET: u128 = 1 << 32;

/// The max over pairs is taken on point estimates; certification uses the
/// upper 95% limits. Pairs use independent streams, so the table is not
/// numerically symmetric.
pub fn code_error_profile(
    code: &IdCode,
    trials_per_pair: usize,
    stream: &RngStream,
    eps: f64,
    delta: f64,
    budget: u128,
) -> Result<ErrorProfile> {
    check_trials(trials_per_pair)?;
    let n_msg = code.messages();
    let required = (n_msg as u128) * (n_msg as u128 - 1) * trials_per_pair as u128;
    if required > budget {
        return Err(Error::BudgetExceeded { what: "type-II trials".into(), required, budget });
    }
    let type1 = (0..n_msg)
        .map(|i| estimate_type1(code, i, trials_per_pair, &stream.fork(0).fork(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut type2 = Vec::with_capacity(n_msg * (n_msg - 1));
    for i in 0..n_msg {
        for j in (0..n_msg).filter(|&j| j != i) {
            let s = stream.fork(1).fork((i * n_msg + j) as u64);
            type2.push(PairEstimate { sent: i, tested: j, estimate: estimate_type2(code, i, j, trials_per_pair, &s)? });
        }
    }
    let argmax_type1 = (0..n_msg).fold(0, |b, i| if type1[i].value > type1[b].value { i } else { b });
    let worst = (0..type2.len()).fold(0, |b, k| if type2[k].estimate.value > type2[b].estimate.value { k } else { b });
    let max_type1 = type1[argmax_type1];
    let max_type2 = type2[worst].estimate;
    Ok(ErrorProfile {
        max_type1,
        argmax_type1,
        max_type2,
        argmax_type2: (type2[worst].sent, type2[worst].tested),
        certified: max_type1.ci_high <= eps && max_type2.ci_high <= delta,
        type1,
        type2,
        eps,
        delta,
    })
}
