//! Support for the command-line workbench: synthetic lexicons, observation
//! files, the randomized equivalence suite and the trie/DAWG benchmark.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{build_dawg, build_trie, NodeAutomaton};
use crate::decoder::{self, DecodeResult, Variant};
use crate::error::{Error, Result};
use crate::letter_hmm::{
    sample_observations_with, Alphabet, HmmConfig, LetterModels, ObservationSequence,
};
use crate::lexicon::Lexicon;
use crate::lexicon_hmm::LexiconHmm;
use crate::oracle;
use crate::pph::PphCoding;
use crate::score::{FixedLog, LogScore};

fn random_string<R: Rng + ?Sized>(rng: &mut R, letters: &[char], len: usize) -> String {
    (0..len)
        .map(|_| *letters.choose(rng).expect("non-empty alphabet"))
        .collect()
}

fn distinct_strings<R: Rng + ?Sized>(
    rng: &mut R,
    letters: &[char],
    count: usize,
    lens: std::ops::RangeInclusive<usize>,
) -> Vec<String> {
    let mut out = BTreeSet::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count + 100 {
        let len = rng.gen_range(lens.clone());
        out.insert(random_string(rng, letters, len));
        attempts += 1;
    }
    out.into_iter().collect()
}

/// Words `p + q` for every prefix `p` of one random pool and suffix `q` of
/// another. Suffix sharing makes the DAWG much smaller than the trie.
pub fn synthetic_lexicon(
    prefix_pool: usize,
    suffix_pool: usize,
    alphabet: &Alphabet,
    seed: u64,
) -> Result<Lexicon> {
    if prefix_pool == 0 || suffix_pool == 0 {
        return Err(Error::EmptyLexicon);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = alphabet.symbols();
    let prefixes = distinct_strings(&mut rng, letters, prefix_pool, 2..=5);
    let suffixes = distinct_strings(&mut rng, letters, suffix_pool, 3..=6);
    Lexicon::new(
        prefixes
            .iter()
            .flat_map(|p| suffixes.iter().map(move |q| format!("{p}{q}"))),
    )
}

/// Up to `words` distinct random words of length `1..=max_len`.
pub fn random_lexicon<R: Rng + ?Sized>(
    rng: &mut R,
    words: usize,
    letters: &[char],
    max_len: usize,
) -> Result<Lexicon> {
    Lexicon::new(distinct_strings(
        rng,
        letters,
        words.max(1),
        1..=max_len.max(1),
    ))
}

fn check_letters(lexicon: &Lexicon, config: &HmmConfig) -> Result<()> {
    match lexicon
        .letters()
        .into_iter()
        .find(|&c| config.alphabet.index_of(c).is_none())
    {
        Some(c) => Err(Error::MissingLetterModel(c)),
        None => Ok(()),
    }
}

/// One generated observation sequence and the word it was sampled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub truth: String,
    pub obs: ObservationSequence,
}

/// Samples `count` sequences from uniformly chosen words.
pub fn generate(
    lexicon: &Lexicon,
    config: &HmmConfig,
    count: usize,
    seed: u64,
) -> Result<Vec<Sample>> {
    config.validate()?;
    check_letters(lexicon, config)?;
    let words: Vec<&str> = lexicon.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let truth = words[rng.gen_range(0..words.len())];
            let obs = sample_observations_with(truth, config, &mut rng)?;
            Ok(Sample {
                truth: truth.to_string(),
                obs,
            })
        })
        .collect()
}

/// Observation file text: a `# truth <word>` line before each sequence.
pub fn format_samples(samples: &[Sample], alphabet: &Alphabet) -> String {
    let mut out = String::new();
    for s in samples {
        let _ = writeln!(out, "# truth {}", s.truth);
        let _ = writeln!(out, "{}", s.obs.to_line(alphabet));
    }
    out
}

/// One sequence line of an observation file.
#[derive(Debug)]
pub struct ObsRecord {
    /// 1-based line number.
    pub line: usize,
    /// From the nearest preceding `# truth` comment, if any.
    pub truth: Option<String>,
    pub sequence: Result<ObservationSequence>,
}

/// Splits an observation file into sequences. Blank lines and comments are
/// skipped; a `# truth <word>` comment labels the next sequence.
pub fn parse_observations(text: &str, alphabet: &Alphabet) -> Vec<ObsRecord> {
    let mut out = Vec::new();
    let mut truth = None;
    for (i, line) in text.lines().enumerate() {
        let line_t = line.trim();
        if let Some(comment) = line_t.strip_prefix('#') {
            if let Some(word) = comment.trim().strip_prefix("truth ") {
                truth = Some(word.trim().to_string());
            }
            continue;
        }
        if line_t.is_empty() {
            continue;
        }
        out.push(ObsRecord {
            line: i + 1,
            truth: truth.take(),
            sequence: ObservationSequence::parse_line(line_t, alphabet),
        });
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub instances: usize,
    pub seed: u64,
    /// Test hook: shift one path-index increment of every DAWG before use.
    pub corrupt_pph: bool,
}

/// A failing instance, shrunk to a small lexicon and observation sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub check: &'static str,
    pub detail: String,
    pub instance_seed: u64,
    pub n: usize,
    pub words: Vec<String>,
    pub obs: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FAIL {}: {}", self.check, self.detail)?;
        writeln!(f, "  instance seed: {}", self.instance_seed)?;
        writeln!(f, "  n: {}", self.n)?;
        writeln!(f, "  lexicon: {}", self.words.join(" "))?;
        write!(f, "  obs: {}", self.obs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub instances: usize,
    pub checks: usize,
    pub failure: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Failure {
    check: &'static str,
    detail: String,
}

fn fail(check: &'static str, detail: impl Into<String>) -> Failure {
    Failure {
        check,
        detail: detail.into(),
    }
}

fn require(
    ok: bool,
    check: &'static str,
    detail: impl FnOnce() -> String,
) -> std::result::Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(fail(check, detail()))
    }
}

struct Instance<'c> {
    config: &'c HmmConfig,
    exact: &'c LetterModels<FixedLog>,
    float: &'c LetterModels<f64>,
    corrupt_pph: bool,
}

fn coding_for(automaton: NodeAutomaton, corrupt: bool) -> std::result::Result<PphCoding, Failure> {
    let mut coding =
        PphCoding::new(automaton).map_err(|e| fail("pph-annotation", e.to_string()))?;
    if corrupt {
        let root = coding.automaton().root();
        let last = coding.automaton().successors(root).len() - 1;
        coding.corrupt_increment(root, last, 1);
    }
    Ok(coding)
}

fn check_coding(
    name: &'static str,
    coding: &PphCoding,
    lexicon: &Lexicon,
) -> std::result::Result<usize, Failure> {
    let a = coding.automaton();
    let expected = oracle::canonical_order(lexicon);
    let language: BTreeSet<String> = a.language().into_iter().collect();
    require(language.iter().eq(lexicon.iter()), "language", || {
        format!("{name} language differs from the lexicon")
    })?;
    let paths = oracle::enumerate_paths_dfs(a);
    require(paths.len() == expected.len(), "pph-bijection", || {
        format!(
            "{name}: {} full paths for {} words",
            paths.len(),
            expected.len()
        )
    })?;
    for (pos, path) in paths.iter().enumerate() {
        let word = a.spell(path);
        let code = coding
            .encode_path(path)
            .map_err(|e| fail("pph-bijection", e.to_string()))?;
        require(
            u64::from(code) == pos as u64 && word == expected[pos],
            "pph-bijection",
            || format!("{name}: path {word:?} completes at position {pos} but encodes to {code}"),
        )?;
        let back = coding
            .decode(pos as u64)
            .map_err(|e| fail("pph-bijection", format!("{name}: decode({pos}): {e}")))?;
        require(&back == path, "pph-bijection", || {
            format!("{name}: decode({pos}) does not return {word:?}")
        })?;
    }
    Ok(3)
}

fn same_ranking<F: LogScore>(a: &DecodeResult<F>, b: &[crate::decoder::Hypothesis<F>]) -> bool {
    a.ranking.len() == b.len()
        && a.ranking
            .iter()
            .zip(b)
            .all(|(x, y)| x.word == y.word && x.pph == y.pph && x.score == y.score)
}

fn show<F: LogScore>(r: &[crate::decoder::Hypothesis<F>]) -> String {
    let parts: Vec<String> = r
        .iter()
        .map(|h| format!("{}/{}/{}", h.word, h.pph, h.score.to_f64()))
        .collect();
    format!("[{}]", parts.join(", "))
}

impl Instance<'_> {
    /// Runs every check on one (lexicon, observation, n) triple; returns the
    /// number of checks performed.
    fn run(
        &self,
        lexicon: &Lexicon,
        obs: &ObservationSequence,
        n: usize,
    ) -> std::result::Result<usize, Failure> {
        let mut checks = 0;
        let dawg = build_dawg(lexicon).map_err(|e| fail("build", e.to_string()))?;
        let trie = build_trie(lexicon).map_err(|e| fail("build", e.to_string()))?;
        let dawg = Arc::new(coding_for(dawg, self.corrupt_pph)?);
        let trie = Arc::new(coding_for(trie, false)?);
        checks += check_coding("dawg", &dawg, lexicon)?;
        checks += check_coding("trie", &trie, lexicon)?;

        let decode_err = |e: Error| fail("decode", e.to_string());
        // 1-best variants agree bit for bit, and their score is the best
        // single-word score.
        let h = LexiconHmm::expand(dawg.clone(), self.float).map_err(decode_err)?;
        let tab = decoder::viterbi_tabular(&h, obs).map_err(decode_err)?;
        for v in [Variant::FlipFlop, Variant::InPlace] {
            let r = decoder::decode(&h, obs, v, 1).map_err(decode_err)?;
            require(r.ranking == tab.ranking, "1-best-agreement", || {
                format!(
                    "{v} gives {} but tabular gives {}",
                    show(&r.ranking),
                    show(&tab.ranking)
                )
            })?;
        }
        checks += 2;
        let table = oracle::word_score_table(lexicon, self.float, obs).map_err(decode_err)?;
        let best = table
            .iter()
            .map(|h| h.score)
            .fold(f64::NEG_INFINITY, f64::max);
        match tab.best() {
            Some(b) => {
                require(b.score == best, "1-best-score", || {
                    format!("decoded {} but best word score is {best}", b.score)
                })?;
                require(lexicon.contains(&b.word), "1-best-score", || {
                    format!("decoded {:?} is not a word", b.word)
                })?;
            }
            None => require(best == f64::NEG_INFINITY, "1-best-score", || {
                format!("decoder found nothing but a word scores {best}")
            })?,
        }
        checks += 1;

        // n-best in exact arithmetic against the exhaustive ranking.
        let truth = oracle::nbest_exhaustive(lexicon, self.exact, obs, n).map_err(decode_err)?;
        let mut merges = Vec::new();
        for (name, coding) in [("dawg", &dawg), ("trie", &trie)] {
            let hx = LexiconHmm::expand(coding.clone(), self.exact).map_err(decode_err)?;
            for v in [Variant::NBestNaive, Variant::NBestImproved] {
                let r = decoder::decode(&hx, obs, v, n).map_err(decode_err)?;
                require(same_ranking(&r, &truth), "n-best-agreement", || {
                    format!(
                        "{name} {v} n={n} gives {} but exhaustive gives {}",
                        show(&r.ranking),
                        show(&truth)
                    )
                })?;
                merges.push(r.counters.merges);
                checks += 1;
            }
        }
        require(
            merges[1] <= merges[0] && merges[3] <= merges[2],
            "merge-count",
            || format!("improved merges exceed naive: {merges:?}"),
        )?;
        Ok(checks + 1)
    }

    /// Greedily drops words and observation symbols while the instance keeps
    /// failing.
    fn shrink(
        &self,
        mut words: Vec<String>,
        mut obs: Vec<usize>,
        n: usize,
    ) -> (Vec<String>, Vec<usize>, Failure) {
        let alphabet = &self.config.alphabet;
        let try_run = |words: &[String], obs: &[usize]| -> Option<Failure> {
            let lexicon = Lexicon::new(words.iter().cloned()).ok()?;
            let seq = ObservationSequence::from_indices(obs.to_vec(), alphabet).ok()?;
            self.run(&lexicon, &seq, n).err()
        };
        let mut last = try_run(&words, &obs).expect("shrinking a failing instance");
        loop {
            let mut changed = false;
            let mut i = 0;
            while i < words.len() && words.len() > 1 {
                let mut fewer = words.clone();
                fewer.remove(i);
                match try_run(&fewer, &obs) {
                    Some(f) => {
                        words = fewer;
                        last = f;
                        changed = true;
                    }
                    None => i += 1,
                }
            }
            let mut i = obs.len();
            while i > 0 {
                i -= 1;
                let mut shorter = obs.clone();
                shorter.remove(i);
                if let Some(f) = try_run(&words, &shorter) {
                    obs = shorter;
                    last = f;
                    changed = true;
                    i = i.min(obs.len());
                }
            }
            if !changed {
                return (words, obs, last);
            }
        }
    }
}

/// Randomized equivalence suite over sub-lexicons of `lexicon`: path-index
/// bijection on trie and DAWG, 1-best decoder agreement, and n-best agreement
/// with the exhaustive oracle. Stops at the first failure.
pub fn verify(lexicon: &Lexicon, config: &HmmConfig, opts: &VerifyOptions) -> Result<VerifyReport> {
    config.validate()?;
    check_letters(lexicon, config)?;
    let exact = LetterModels::<FixedLog>::new(config)?;
    let float = LetterModels::<f64>::new(config)?;
    let inst = Instance {
        config,
        exact: &exact,
        float: &float,
        corrupt_pph: opts.corrupt_pph,
    };
    let all: Vec<String> = lexicon.iter().map(String::from).collect();
    let k = config.alphabet.len();
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = 0;
    for i in 0..opts.instances {
        let instance_seed: u64 = master.gen();
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
        let words: Vec<String> = if i == 0 && all.len() <= 200 {
            all.clone()
        } else {
            let size = rng.gen_range(1..=all.len().min(200));
            all.choose_multiple(&mut rng, size).cloned().collect()
        };
        let sub = Lexicon::new(words.iter().cloned())?;
        let truth = words.choose(&mut rng).expect("non-empty");
        let mut obs = sample_observations_with(truth, config, &mut rng)?
            .symbols()
            .to_vec();
        // Half of the instances get extra noise so that no word fits cleanly.
        if rng.gen_bool(0.5) {
            for _ in 0..rng.gen_range(1..=3) {
                match rng.gen_range(0..3) {
                    0 if !obs.is_empty() => {
                        let at = rng.gen_range(0..obs.len());
                        obs[at] = rng.gen_range(0..k);
                    }
                    1 => obs.insert(rng.gen_range(0..=obs.len()), rng.gen_range(0..k)),
                    _ if obs.len() > 1 => {
                        obs.remove(rng.gen_range(0..obs.len()));
                    }
                    _ => {}
                }
            }
        }
        let n = rng.gen_range(1..=5);
        let seq = ObservationSequence::from_indices(obs.clone(), &config.alphabet)?;
        match inst.run(&sub, &seq, n) {
            Ok(c) => checks += c,
            Err(_) => {
                let (words, obs, f) = inst.shrink(words, obs, n);
                let obs = ObservationSequence::from_indices(obs, &config.alphabet)?
                    .to_line(&config.alphabet);
                let failure = Counterexample {
                    check: f.check,
                    detail: f.detail,
                    instance_seed,
                    n,
                    words,
                    obs,
                };
                return Ok(VerifyReport {
                    instances: i + 1,
                    checks,
                    failure: Some(failure),
                });
            }
        }
    }
    Ok(VerifyReport {
        instances: opts.instances,
        checks,
        failure: None,
    })
}

/// One benchmark row: a decoder variant run over every sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub structure: &'static str,
    pub variant: Variant,
    /// HMM states.
    pub states: usize,
    /// Mean predecessors per HMM state.
    pub mean_predecessors: f64,
    pub frames_total: usize,
    pub sequences: usize,
    pub wall_ms: f64,
    pub ops: u64,
    pub token_slots: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

pub const BENCH_CSV_HEADER: &str =
    "structure,variant,N,p,T_total,sequences,wall_ms,ops,token_slots";

impl BenchReport {
    pub fn row(&self, structure: &str, variant: Variant) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.structure == structure && r.variant == variant)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{BENCH_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.4},{},{},{:.3},{},{}",
                r.structure,
                r.variant,
                r.states,
                r.mean_predecessors,
                r.frames_total,
                r.sequences,
                r.wall_ms,
                r.ops,
                r.token_slots
            );
        }
        out
    }
}

/// Decodes the same generated sequences with trie and DAWG expansions of
/// `lexicon`, once per variant.
pub fn bench(
    lexicon: &Lexicon,
    config: &HmmConfig,
    sequences: usize,
    seed: u64,
    variants: &[Variant],
) -> Result<BenchReport> {
    let samples = generate(lexicon, config, sequences, seed)?;
    bench_samples(lexicon, config, &samples, variants)
}

pub fn bench_samples(
    lexicon: &Lexicon,
    config: &HmmConfig,
    samples: &[Sample],
    variants: &[Variant],
) -> Result<BenchReport> {
    let models = LetterModels::<f64>::new(config)?;
    let frames_total = samples.iter().map(|s| s.obs.len()).sum();
    let mut rows = Vec::new();
    for (structure, automaton) in [
        ("trie", build_trie(lexicon)?),
        ("dawg", build_dawg(lexicon)?),
    ] {
        let hmm = LexiconHmm::expand(PphCoding::new(automaton)?, &models)?;
        let stats = hmm.decode_stats(frames_total);
        for &variant in variants {
            let mut counters = crate::decoder::Counters::default();
            let started = Instant::now();
            for s in samples {
                counters += decoder::decode(&hmm, &s.obs, variant, 1)?.counters;
            }
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            rows.push(BenchRow {
                structure,
                variant,
                states: stats.states,
                mean_predecessors: stats.mean_predecessors,
                frames_total,
                sequences: samples.len(),
                wall_ms,
                ops: counters.ops,
                token_slots: counters.token_slots,
            });
        }
    }
    Ok(BenchReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Lexicon {
        Lexicon::new(["ab", "ba", "bb", "bc", "bcd", "c"]).unwrap()
    }

    fn config(alpha: &str) -> HmmConfig {
        HmmConfig::new(Alphabet::new(alpha.chars()).unwrap())
    }

    #[test]
    fn synthetic_lexicon_is_a_product() {
        let l = synthetic_lexicon(7, 5, &Alphabet::new("abcdefgh".chars()).unwrap(), 3).unwrap();
        assert!(l.len() <= 35 && l.len() > 25);
        let again =
            synthetic_lexicon(7, 5, &Alphabet::new("abcdefgh".chars()).unwrap(), 3).unwrap();
        assert_eq!(l, again);
        assert!(build_dawg(&l).unwrap().node_count() < build_trie(&l).unwrap().node_count());
    }

    #[test]
    fn generated_file_round_trips() {
        let c = config("abcd");
        let samples = generate(&toy(), &c, 20, 9).unwrap();
        assert_eq!(samples, generate(&toy(), &c, 20, 9).unwrap());
        let text = format_samples(&samples, &c.alphabet);
        let recs = parse_observations(&text, &c.alphabet);
        assert_eq!(recs.len(), 20);
        for (r, s) in recs.iter().zip(&samples) {
            assert_eq!(r.truth.as_deref(), Some(s.truth.as_str()));
            assert_eq!(r.sequence.as_ref().unwrap(), &s.obs);
        }
        assert!(generate(&toy(), &c, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn spelled_lines_with_no_self_loops() {
        let mut c = config("abcd");
        c.states_per_letter = 1;
        c.self_loop_prob = 0.0;
        c.emission_peak = 1.0;
        for s in generate(&toy(), &c, 30, 4).unwrap() {
            assert_eq!(s.obs.to_line(&c.alphabet).replace(' ', ""), s.truth);
        }
    }

    #[test]
    fn observation_file_errors_are_per_line() {
        let c = config("ab");
        let recs = parse_observations("# header\na b\n\na z\nb\n", &c.alphabet);
        assert_eq!(recs.len(), 3);
        assert!(recs[1].sequence.is_err());
        assert_eq!(recs[1].line, 4);
        assert!(recs[2].sequence.is_ok());
    }

    #[test]
    fn verify_toy_passes_and_corruption_fails() {
        let c = config("abcd");
        let ok = verify(
            &toy(),
            &c,
            &VerifyOptions {
                instances: 20,
                seed: 5,
                corrupt_pph: false,
            },
        )
        .unwrap();
        assert!(ok.passed(), "{}", ok.failure.unwrap());
        let bad = verify(
            &toy(),
            &c,
            &VerifyOptions {
                instances: 20,
                seed: 5,
                corrupt_pph: true,
            },
        )
        .unwrap();
        let f = bad.failure.expect("corruption must be caught");
        assert_eq!(f.check, "pph-bijection");
        assert_eq!(bad.instances, 1);
        assert!(f.words.len() <= 6);
        let none = verify(
            &toy(),
            &c,
            &VerifyOptions {
                instances: 0,
                seed: 5,
                corrupt_pph: false,
            },
        )
        .unwrap();
        assert!(none.passed() && none.checks == 0);
    }

    #[test]
    fn bench_rows() {
        let c = config("abcdefgh");
        let l = synthetic_lexicon(6, 6, &c.alphabet, 1).unwrap();
        let r = bench(&l, &c, 3, 2, &[Variant::FlipFlop, Variant::InPlace]).unwrap();
        assert_eq!(r.rows.len(), 4);
        let (tf, ti) = (
            r.row("trie", Variant::FlipFlop).unwrap(),
            r.row("trie", Variant::InPlace).unwrap(),
        );
        let (df, di) = (
            r.row("dawg", Variant::FlipFlop).unwrap(),
            r.row("dawg", Variant::InPlace).unwrap(),
        );
        assert_eq!(tf.ops, ti.ops);
        assert_eq!(tf.token_slots, 2 * ti.token_slots);
        assert_eq!(ti.token_slots, ti.states);
        assert!(df.states < tf.states && df.ops < tf.ops);
        assert_eq!(df.ops, di.ops);
        assert!(r.to_csv().starts_with(BENCH_CSV_HEADER));
    }
}
