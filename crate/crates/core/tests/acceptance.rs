//! Acceptance checks, one pass/fail line each. Runs without the libtest
//! harness so the lines are printed even when everything passes.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{alphabet, random_case, toy};
use lexvit::decoder::{
    nbest_improved, nbest_naive, viterbi_flipflop, viterbi_inplace, viterbi_tabular,
};
use lexvit::oracle::{enumerate_paths_dfs, nbest_exhaustive};
use lexvit::workbench::{self, random_lexicon, synthetic_lexicon};
use lexvit::{
    build_dawg, build_trie, FixedLog, HmmConfig, Hypothesis, LetterModels, LexiconHmm, LogScore,
    ObservationSequence, PphCoding, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn toy_golden() -> Outcome {
    let started = Instant::now();
    let trie = build_trie(&toy()).map_err(|e| e.to_string())?;
    let dawg = build_dawg(&toy()).map_err(|e| e.to_string())?;
    ensure(trie.node_count() == 10, || {
        format!("trie has {} nodes", trie.node_count())
    })?;
    ensure(dawg.node_count() == 9, || {
        format!("DAWG has {} nodes", dawg.node_count())
    })?;
    let coding = PphCoding::new(dawg).map_err(|e| e.to_string())?;
    let table = [
        ("ab", 0),
        ("ba", 1),
        ("bb", 2),
        ("bcd", 3),
        ("bc", 4),
        ("c", 5),
    ];
    for (w, want) in table {
        let got = coding.encode_word(w).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("pph({w}) = {got}, expected {want}"))?;
        let back = coding.decode_word(want as u64).map_err(|e| e.to_string())?;
        ensure(back == w, || format!("decode({want}) = {back}"))?;
    }
    let took = within(Duration::from_secs(1), started)?;
    Ok(format!(
        "trie N=10, DAWG N=9, ab0 ba1 bb2 bcd3 bc4 c5 ({took:.2?})"
    ))
}

fn pph_bijection() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut lexicons = 0;
    let mut paths_checked = 0;
    while lexicons < 200 {
        let k = rng.gen_range(2..=26);
        let letters = alphabet(k);
        let target = rng.gen_range(5..=500);
        let lexicon =
            random_lexicon(&mut rng, target, letters.symbols(), 9).map_err(|e| e.to_string())?;
        if lexicon.len() < 5 {
            continue;
        }
        lexicons += 1;
        for automaton in [build_trie(&lexicon), build_dawg(&lexicon)] {
            let coding =
                PphCoding::new(automaton.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let paths = enumerate_paths_dfs(coding.automaton());
            let w = lexicon.len();
            let mut values = BTreeSet::new();
            for (pos, path) in paths.iter().enumerate() {
                let code = coding.encode_path(path).map_err(|e| e.to_string())?;
                ensure(code as usize == pos, || {
                    format!("path at DFS position {pos} encodes to {code}")
                })?;
                let back = coding.decode(u64::from(code)).map_err(|e| e.to_string())?;
                ensure(&back == path, || {
                    format!("decode(encode(path)) differs at {pos}")
                })?;
                values.insert(code);
            }
            ensure(
                paths.len() == w && values.len() == w && values.iter().copied().eq(0..w as u32),
                || {
                    format!(
                        "{} paths with {} distinct values for W={w}",
                        paths.len(),
                        values.len()
                    )
                },
            )?;
            paths_checked += paths.len();
        }
    }
    let took = within(Duration::from_secs(30), started)?;
    Ok(format!(
        "{lexicons} lexicons, {paths_checked} paths over trie and DAWG ({took:.2?})"
    ))
}

fn decoder_equivalence() -> Outcome {
    let started = Instant::now();
    let instances = 250;
    for seed in 0..instances {
        let case = random_case(1000 + seed);
        let models = LetterModels::<f64>::new(&case.config).map_err(|e| e.to_string())?;
        let coding = PphCoding::new(build_dawg(&case.lexicon).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let hmm = LexiconHmm::expand(coding, &models).map_err(|e| e.to_string())?;
        let tab = viterbi_tabular(&hmm, &case.obs).map_err(|e| e.to_string())?;
        let ff = viterbi_flipflop(&hmm, &case.obs).map_err(|e| e.to_string())?;
        let ip = viterbi_inplace(&hmm, &case.obs).map_err(|e| e.to_string())?;
        let key = |r: &lexvit::DecodeResult<f64>| {
            r.ranking
                .iter()
                .map(|h| (h.word.clone(), h.pph, h.score.to_bits()))
                .collect::<Vec<_>>()
        };
        ensure(key(&tab) == key(&ff) && key(&tab) == key(&ip), || {
            format!(
                "seed {seed}: tabular {:?} flipflop {:?} inplace {:?}",
                tab.ranking, ff.ranking, ip.ranking
            )
        })?;
        if let Some(best) = ip.best() {
            let word = hmm
                .coding()
                .decode_word(u64::from(best.pph))
                .map_err(|e| e.to_string())?;
            ensure(word == tab.ranking[0].word, || {
                format!(
                    "seed {seed}: pph {} decodes to {word}, backtracking gives {}",
                    best.pph, tab.ranking[0].word
                )
            })?;
        }
    }
    let took = within(Duration::from_secs(60), started)?;
    Ok(format!(
        "{instances} instances bit-identical, pph matches backtracking ({took:.2?})"
    ))
}

fn memory_halving() -> Outcome {
    let mut checked = 0;
    for seed in 0..50 {
        let case = random_case(5000 + seed);
        let models = LetterModels::<f64>::new(&case.config).map_err(|e| e.to_string())?;
        let coding = PphCoding::new(build_dawg(&case.lexicon).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let hmm = LexiconHmm::expand(coding, &models).map_err(|e| e.to_string())?;
        let (n, t) = (hmm.state_count(), case.obs.len());
        let slots = |v| {
            lexvit::decode(&hmm, &case.obs, v, 1)
                .map(|r| r.counters.token_slots)
                .map_err(|e| e.to_string())
        };
        let (ip, ff, tab) = (
            slots(Variant::InPlace)?,
            slots(Variant::FlipFlop)?,
            slots(Variant::Tabular)?,
        );
        ensure(ip == n && ff == 2 * n && tab == n * t, || {
            format!("N={n} T={t}: inplace {ip}, flipflop {ff}, tabular {tab}")
        })?;
        checked += 1;
    }
    Ok(format!(
        "{checked} instances: inplace = N, flipflop = 2N, tabular = N*T exactly"
    ))
}

fn same<F: LogScore>(a: &[Hypothesis<F>], b: &[Hypothesis<F>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.word == y.word && x.pph == y.pph && x.score == y.score)
}

/// Compares naive, improved and exhaustive n-best; returns whether they all
/// agree and whether the merge bound held.
fn nbest_agree<F: LogScore>(
    lexicon: &lexvit::Lexicon,
    config: &HmmConfig,
    obs: &ObservationSequence,
    n: usize,
) -> Result<(bool, bool), String> {
    let models = LetterModels::<F>::new(config).map_err(|e| e.to_string())?;
    let coding = PphCoding::new(build_dawg(lexicon).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let hmm = LexiconHmm::expand(coding, &models).map_err(|e| e.to_string())?;
    let naive = nbest_naive(&hmm, obs, n).map_err(|e| e.to_string())?;
    let improved = nbest_improved(&hmm, obs, n).map_err(|e| e.to_string())?;
    let truth = nbest_exhaustive(lexicon, &models, obs, n).map_err(|e| e.to_string())?;
    Ok((
        same(&naive.ranking, &truth) && same(&improved.ranking, &truth),
        improved.counters.merges <= naive.counters.merges,
    ))
}

fn nbest_correctness() -> Outcome {
    let started = Instant::now();
    let mut runs = 0;
    let mut float_mismatches = 0;
    let mut float_runs = 0;
    let mut cases = Vec::new();
    // Toy lexicon under a few configurations and observation strings.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for line in ["b c d", "b c", "a b", "b b", "c", "b a b c d", "d d d"] {
        for _ in 0..4 {
            let config = common::random_config(&mut rng, alphabet(4));
            let obs = ObservationSequence::parse_line(line, &config.alphabet)
                .map_err(|e| e.to_string())?;
            cases.push((toy(), config, obs, 1..=6));
        }
    }
    let toy_cases = cases.len();
    for seed in 0..120 {
        let c = random_case(9000 + seed);
        cases.push((c.lexicon, c.config, c.obs, 1..=5));
    }
    for (lexicon, config, obs, ns) in &cases {
        for n in ns.clone() {
            let (agree, merges) = nbest_agree::<FixedLog>(lexicon, config, obs, n)?;
            ensure(agree, || {
                format!("rankings differ: lexicon {:?} obs {:?} n={n}", lexicon, obs)
            })?;
            ensure(merges, || {
                format!("improved merges exceed naive: lexicon {:?} n={n}", lexicon)
            })?;
            runs += 1;
            let (agree_f64, _) = nbest_agree::<f64>(lexicon, config, obs, n)?;
            float_runs += 1;
            float_mismatches += usize::from(!agree_f64);
        }
    }
    let took = within(Duration::from_secs(120), started)?;
    Ok(format!(
        "{} toy + {} random instances, {runs} exact-arithmetic runs identical, merges(improved) <= merges(naive); \
         f64 runs agreeing: {}/{float_runs} ({took:.2?})",
        toy_cases,
        cases.len() - toy_cases,
        float_runs - float_mismatches
    ))
}

fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

fn random_obs(rng: &mut ChaCha8Rng, t: usize, k: usize, config: &HmmConfig) -> ObservationSequence {
    ObservationSequence::from_indices(
        (0..t).map(|_| rng.gen_range(0..k)).collect(),
        &config.alphabet,
    )
    .unwrap()
}

fn work_scaling() -> Outcome {
    let started = Instant::now();
    let config = HmmConfig::new(alphabet(26));
    let models = LetterModels::<f64>::new(&config).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let lexicon =
        random_lexicon(&mut rng, 1000, config.alphabet.symbols(), 8).map_err(|e| e.to_string())?;
    let coding = PphCoding::new(build_dawg(&lexicon).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let hmm = LexiconHmm::expand(coding, &models).map_err(|e| e.to_string())?;
    let ts = [10usize, 20, 50, 100, 200, 300, 500, 700, 1000];
    let mut ops = Vec::new();
    for &t in &ts {
        let obs = random_obs(&mut rng, t, 26, &config);
        ops.push(
            viterbi_inplace(&hmm, &obs)
                .map_err(|e| e.to_string())?
                .counters
                .ops as f64,
        );
    }
    let xs: Vec<f64> = ts.iter().map(|&t| t as f64).collect();
    let r2 = r_squared(&xs, &ops);
    ensure(r2 >= 0.999, || format!("R^2 = {r2:.6} for ops against T"))?;

    let t = 50;
    let obs = random_obs(&mut rng, t, 26, &config);
    let mut ratios = Vec::new();
    for words in [100, 300, 1000, 3000, 10_000] {
        let lexicon = random_lexicon(&mut rng, words, config.alphabet.symbols(), 9)
            .map_err(|e| e.to_string())?;
        let coding = PphCoding::new(build_dawg(&lexicon).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let hmm = LexiconHmm::expand(coding, &models).map_err(|e| e.to_string())?;
        let ops = viterbi_inplace(&hmm, &obs)
            .map_err(|e| e.to_string())?
            .counters
            .ops as f64;
        ratios.push(ops / (t as f64 * hmm.transition_count() as f64));
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    ensure(hi / lo - 1.0 <= 0.01, || {
        format!("ops / (T * sum|pred|) ranges over [{lo}, {hi}]")
    })?;
    let took = within(Duration::from_secs(300), started)?;
    Ok(format!(
        "R^2 = {r2:.6} over T in 10..1000; ops / (T * sum|pred|) in [{lo:.4}, {hi:.4}] for 100..10000 words ({took:.2?})"
    ))
}

fn trie_vs_dawg() -> Outcome {
    let started = Instant::now();
    let config = HmmConfig::new(alphabet(26));
    let lexicon = synthetic_lexicon(110, 110, &config.alphabet, 11).map_err(|e| e.to_string())?;
    ensure(lexicon.len() >= 10_000, || {
        format!("synthetic lexicon has only {} words", lexicon.len())
    })?;
    let report = workbench::bench(&lexicon, &config, 20, 3, &[Variant::InPlace])
        .map_err(|e| e.to_string())?;
    let trie = report
        .row("trie", Variant::InPlace)
        .ok_or("missing trie row")?;
    let dawg = report
        .row("dawg", Variant::InPlace)
        .ok_or("missing dawg row")?;
    ensure(dawg.ops < trie.ops, || {
        format!("DAWG ops {} not below trie ops {}", dawg.ops, trie.ops)
    })?;
    let wall = trie.wall_ms / dawg.wall_ms;
    ensure(wall >= 2.0, || {
        format!("wall-clock ratio trie/DAWG = {wall:.2}")
    })?;
    let ops_ratio = trie.ops as f64 / dawg.ops as f64;
    let np = |r: &workbench::BenchRow| r.states as f64 * r.mean_predecessors;
    let np_ratio = np(trie) / np(dawg);
    let dev = (ops_ratio / np_ratio - 1.0).abs();
    ensure(dev <= 0.2, || {
        format!("ops ratio {ops_ratio:.3} vs N*p ratio {np_ratio:.3}")
    })?;
    let (ta, da) = (
        build_trie(&lexicon).unwrap().stats(),
        build_dawg(&lexicon).unwrap().stats(),
    );
    let took = within(Duration::from_secs(300), started)?;
    Ok(format!(
        "W={}, HMM N {} -> {}, ops ratio {ops_ratio:.2} vs N*p ratio {np_ratio:.2}, wall ratio {wall:.1} \
         (automaton N {} -> {}, arcs {} -> {}) ({took:.2?})",
        lexicon.len(),
        trie.states,
        dawg.states,
        ta.node_count,
        da.node_count,
        ta.arc_count,
        da.arc_count
    ))
}

fn recognition() -> Outcome {
    let started = Instant::now();
    let mut config = HmmConfig::new(alphabet(26));
    config.emission_peak = 0.9;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut words = BTreeSet::new();
    while words.len() < 100 {
        let len = rng.gen_range(3..=8);
        words.insert(
            (0..len)
                .map(|_| config.alphabet.symbol(rng.gen_range(0..26)))
                .collect::<String>(),
        );
    }
    let lexicon = lexvit::Lexicon::new(words).map_err(|e| e.to_string())?;
    let samples = workbench::generate(&lexicon, &config, 500, 21).map_err(|e| e.to_string())?;
    let text = workbench::format_samples(&samples, &config.alphabet);
    let models = LetterModels::<f64>::new(&config).map_err(|e| e.to_string())?;
    let coding = PphCoding::new(build_dawg(&lexicon).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let hmm = LexiconHmm::expand(coding, &models).map_err(|e| e.to_string())?;
    let records = workbench::parse_observations(&text, &config.alphabet);
    let mut correct = 0;
    for rec in &records {
        let obs = rec.sequence.as_ref().map_err(|e| e.to_string())?;
        let r = viterbi_inplace(&hmm, obs).map_err(|e| e.to_string())?;
        if r.best().map(|h| h.word.as_str()) == rec.truth.as_deref() {
            correct += 1;
        }
    }
    let acc = correct as f64 / records.len() as f64;
    ensure(records.len() == 500, || {
        format!("{} sequences parsed", records.len())
    })?;
    ensure(acc >= 0.95, || format!("accuracy {correct}/500"))?;
    let took = within(Duration::from_secs(60), started)?;
    Ok(format!(
        "accuracy {correct}/{} = {:.1}% with emission peak 0.9 ({took:.2?})",
        records.len(),
        100.0 * acc
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("toy golden automata and path indices", toy_golden),
        ("path-index bijection on random lexicons", pph_bijection),
        ("1-best decoder equivalence", decoder_equivalence),
        ("token-slot counts", memory_halving),
        ("n-best against the exhaustive oracle", nbest_correctness),
        ("work scaling", work_scaling),
        ("trie vs DAWG speedup", trie_vs_dawg),
        ("recognition sanity", recognition),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
