//! One check per acceptance criterion. Each returns a short detail string on
//! success and a reason on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use gunrock_core::analytics::{load_logs, ols_fit, run_engagement_analyses, student_t_two_sided_p, write_synthetic_log, SynthConfig};
use gunrock_core::dialog::{fst_step, DialogState, TurnInput, RETRIEVAL};
use gunrock_core::nlu::{DialogActTag, SessionContext};
use gunrock_core::phonetic::{encode_double_metaphone, synthesize_tokens};
use gunrock_core::service::{read_log_file, LogEvent, LogWriter, Role, TurnLine};
use gunrock_core::{load_components, DataSource};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{george_engine, replay_sample_chat};

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------- metaphone

pub fn metaphone_vectors() -> Vec<(String, String, String)> {
    include_str!("../data/dmetaphone_vectors.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut f = l.split('\t').map(str::to_string);
            (f.next().unwrap_or_default(), f.next().unwrap_or_default(), f.next().unwrap_or_default())
        })
        .collect()
}

pub fn check_metaphone() -> Check {
    let vectors = metaphone_vectors();
    ensure!(vectors.len() >= 200, "only {} vectors", vectors.len());
    let start = Instant::now();
    let mut bad = Vec::new();
    for (word, primary, secondary) in &vectors {
        match encode_double_metaphone(word) {
            Ok(c) if &c.primary == primary && &c.secondary == secondary => {}
            Ok(c) => bad.push(format!("{word}: got {c}, want {primary}/{secondary}")),
            Err(e) => bad.push(format!("{word}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    ensure!(bad.is_empty(), "{} mismatches, first: {}", bad.len(), bad[0]);
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(format!("{} words agree in {:.1} ms", vectors.len(), elapsed.as_secs_f64() * 1e3))
}

// ---------------------------------------------------------------- sample chat

pub const USER3_SEGMENTS: [&str; 5] =
    ["ha", "it's a tough question", "i don't think i have a good one to recommend", "wait", "i think that a star is born is good"];
pub const USER5_SEGMENTS: [&str; 3] = [
    "when i watched a star is born the music was amazing",
    "and bradley cooper was super talented in the movie",
    "i really like bradley cooper",
];
/// (from, to) of every movies-flow transition fired during the replay.
pub const MOVIES_TRACE: [(&str, &str); 4] =
    [("opener", "elicit_title"), ("elicit_title", "rate_movie"), ("rate_movie", "discuss_fact"), ("discuss_fact", "wrapup")];

fn strings(v: &serde_json::Value) -> Vec<String> {
    v.as_array().map(|a| a.iter().filter_map(|s| s.as_str().map(str::to_string)).collect()).unwrap_or_default()
}

pub fn check_sample_chat() -> Check {
    let replay = replay_sample_chat(11);
    let r = &replay.replies;
    ensure!(r.len() == 5, "expected 5 replies");

    let corrections: Vec<serde_json::Value> =
        r.iter().flat_map(|rep| rep.debug["corrections"].as_array().cloned().unwrap_or_default()).collect();
    ensure!(corrections.len() == 1, "expected one correction, got {}", corrections.len());
    ensure!(
        corrections[0]["original"] == "stars born" && corrections[0]["replacement"] == "a star is born",
        "wrong correction {}",
        corrections[0]
    );
    ensure!(r[1].debug["segments"].as_array().map(Vec::len) == Some(2), "User_2 should split into two segments");
    ensure!(strings(&r[2].debug["segments"]) == USER3_SEGMENTS, "User_3 segments {:?}", r[2].debug["segments"]);
    ensure!(strings(&r[4].debug["segments"]) == USER5_SEGMENTS, "User_5 segments {:?}", r[4].debug["segments"]);
    let him = r[4].debug["resolutions"]
        .as_array()
        .and_then(|a| a.iter().find(|x| x["pronoun"] == "him"))
        .map(|x| x["replacement"].clone());
    ensure!(him == Some("bradley cooper".into()), "him resolved to {him:?}");
    ensure!(r[1].debug["acts"][0][0] == "pos_answer", "\"sure\" tagged {}", r[1].debug["acts"][0]);

    ensure!(r[0].module == "launch" && r[0].response_keys == ["launch.resume_offer"], "User_1 reply {:?}", r[0].response_keys);
    let trace: Vec<(String, String)> =
        r.iter().flat_map(|rep| rep.steps.iter()).filter(|s| s.module == "movies").map(|s| (s.from.clone(), s.to.clone())).collect();
    let want: Vec<(String, String)> = MOVIES_TRACE.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure!(trace == want, "movies trace {trace:?}");
    ensure!(r[1..].iter().all(|rep| rep.module == "movies"), "a reply left the movies module");
    ensure!(r[2].response_keys == ["movies.ground_title", "movies.ask_rating"], "User_3 keys {:?}", r[2].response_keys);
    ensure!(r[3].debug["attr_updates"]["movie_rating"] == "10", "rating not stored: {}", r[3].debug["attr_updates"]);
    ensure!(
        r[4].response.contains("Bradley Cooper") && r[4].response_keys.contains(&"movies.fact".to_string()),
        "User_5 reply lacks the Bradley Cooper fact: {}",
        r[4].response
    );
    ensure!(r[2].response.contains("A Star Is Born"), "grounding misses the corrected title: {}", r[2].response);

    let again = replay_sample_chat(11);
    ensure!(
        replay.greeting == again.greeting && r.iter().zip(&again.replies).all(|(a, b)| a.response == b.response && a.ssml == b.ssml),
        "replay is not deterministic under a fixed seed"
    );
    Ok("1 correction, 5 + 3 segments, him -> bradley cooper, rating 10, trace matches".into())
}

// ---------------------------------------------------------------- persona

pub const JEOPARDY_ANSWER: &str = "Sure I like Jeopardy, especially when Watson competed.";
pub const JEOPARDY_REASON: &str = "I'm so impressed with the capabilities of a supercomputer.";

pub fn check_persona() -> Check {
    let bundled = include_str!("../../data/persona.tsv");
    ensure!(
        bundled.lines().any(|l| l.contains(JEOPARDY_ANSWER) && l.contains(JEOPARDY_REASON)),
        "persona file lacks the jeopardy entry"
    );
    let engine = george_engine(3);
    let s = engine.open_session("trebek").map_err(|e| e.to_string())?;
    let first = engine.handle_text(&s.session_id, "do you like jeopardy").map_err(|e| e.to_string())?;
    ensure!(first.response == JEOPARDY_ANSWER, "answer was {:?}", first.response);
    ensure!(first.backstory, "answer not flagged as a backstory query");
    let why = engine.handle_text(&s.session_id, "why").map_err(|e| e.to_string())?;
    ensure!(why.response == JEOPARDY_REASON, "reasoning was {:?}", why.response);
    Ok("answer and reasoning verbatim".into())
}

// ---------------------------------------------------------------- FST

const FUZZ_WORDS: &[&str] = &[
    "i", "you", "like", "love", "hate", "the", "movie", "a star is born", "harry potter", "bradley cooper", "dog", "cat",
    "named", "rex", "yes", "no", "sure", "nope", "ten", "seven", "three", "what", "is", "do", "why", "let's", "talk",
    "about", "music", "books", "sports", "travel", "food", "games", "technology", "news", "animals", "movies", "stop",
    "it", "him", "was", "good", "bad", "boring", "amazing", "my", "have", "pet", "and", "but", "wait", "ha", "um",
    "titanic", "paris", "lion", "tell", "me", "more", "favorite", "twenty", "one", "hundred", "zzk", "blorf",
];

pub fn random_utterance(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..=12);
    (0..n).map(|_| FUZZ_WORDS[rng.random_range(0..FUZZ_WORDS.len())]).collect::<Vec<_>>().join(" ")
}

pub fn check_fst_fuzz(fixtures: usize) -> Check {
    let comp = load_components(&DataSource::Bundled).map_err(|e| e.to_string())?;
    let tagset = comp.pipeline.acts.tagset().to_vec();
    let slot_names = ["fact", "description", "title", "person", "animal", "number", "topic", "user_name", "last_topic"];
    let flows: Vec<_> = comp.flows.modules().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut steps = 0usize;
    for i in 0..fixtures {
        let text = random_utterance(&mut rng);
        let prior = rng.random_bool(0.5).then(|| DialogActTag::new(tagset[rng.random_range(0..tagset.len())].clone(), 1.0));
        let ctx = SessionContext { turn_index: 1, mentions: vec![], prior_system_act: prior };
        let mut nlu = comp.pipeline.analyze_untimed(&synthesize_tokens(&text, 300), &ctx).map_err(|e| e.to_string())?;
        // Perturb the analysis so guards see combinations the pipeline rarely emits.
        for seg in 0..nlu.segments.len() {
            if rng.random_bool(0.3) {
                nlu.acts[seg] = vec![DialogActTag::new(tagset[rng.random_range(0..tagset.len())].clone(), 1.0)];
            }
            if rng.random_bool(0.3) {
                nlu.sentiment[seg] = rng.random_range(-1.0..=1.0);
            }
        }
        let slots: BTreeSet<String> = slot_names.iter().filter(|_| rng.random_bool(0.4)).map(|s| s.to_string()).collect();
        let mut attributes = BTreeMap::new();
        if rng.random_bool(0.3) {
            attributes.insert("has_pet".to_string(), "yes".to_string());
        }
        let central = rng.random_range(0..nlu.segments.len().max(1));
        let input = TurnInput { nlu: &nlu, central, attributes: &attributes, slots: &slots };
        for flow in &flows {
            for state in &flow.states {
                let seed = rng.random::<u64>();
                let a = fst_step(flow, state, &input, seed)
                    .map_err(|e| format!("fixture {i} {text:?}: {} stuck in {state}: {e}", flow.module_id))?;
                let b = fst_step(flow, state, &input, seed).map_err(|e| e.to_string())?;
                ensure!(a == b, "nondeterministic step in {}/{state} on {text:?}", flow.module_id);
                ensure!(flow.has_state(&a.to), "{}/{state} moved to unknown state {}", flow.module_id, a.to);
                ensure!(!a.response_keys.is_empty(), "{}/{state} produced no response keys", flow.module_id);
                ensure!(
                    a.response_keys.iter().all(|k| comp.templates.contains_key(k)),
                    "{}/{state} emitted a key without templates",
                    flow.module_id
                );
                steps += 1;
            }
        }
    }
    Ok(format!("{fixtures} fixtures, {steps} steps, no stuck state"))
}

/// From every state of every topic flow, "let's talk about <topic>" moves
/// the conversation to that topic's module within one turn.
pub fn check_mixed_initiative() -> Check {
    let engine = george_engine(5);
    let comp = engine.components().clone();
    let targets: Vec<(String, String)> = comp
        .flows
        .modules()
        .filter_map(|f| f.topic.clone().map(|t| (f.module_id.clone(), t)))
        .collect();
    let mut switches = 0;
    for flow in comp.flows.modules() {
        for state in &flow.states {
            for (target, topic) in targets.iter().filter(|(m, _)| *m != flow.module_id) {
                let s = engine.open_session("switcher").map_err(|e| e.to_string())?;
                let mut ds = DialogState::new(&s.session_id);
                ds.active_module = Some(flow.module_id.clone());
                ds.module_state = Some(state.clone());
                ds.turn_count = 3;
                engine.restore_dialog_state(&s.session_id, ds).map_err(|e| e.to_string())?;
                let reply = engine.handle_text(&s.session_id, &format!("let's talk about {topic}")).map_err(|e| e.to_string())?;
                ensure!(
                    reply.module == *target,
                    "{}/{state} -> {topic}: answered by {}",
                    flow.module_id,
                    reply.module
                );
                engine.close_session(&s.session_id, None).map_err(|e| e.to_string())?;
                switches += 1;
            }
        }
    }
    Ok(format!("{switches} switches succeeded"))
}

/// Utterances no topic module claims still get a non-empty answer.
pub fn check_retrieval_liveness(utterances: usize) -> Check {
    let engine = george_engine(9);
    let s = engine.open_session("wanderer").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut retrieval = 0;
    for _ in 0..utterances {
        let text = random_utterance(&mut rng);
        let reply = engine.handle_text(&s.session_id, &text).map_err(|e| e.to_string())?;
        ensure!(!reply.response.trim().is_empty(), "empty reply to {text:?}");
        retrieval += usize::from(reply.module == RETRIEVAL);
    }
    for text in ["blorf zzk", "what is the capital of atlantis", "qwerty"] {
        let fresh = engine.open_session("lost").map_err(|e| e.to_string())?;
        engine.handle_text(&fresh.session_id, "hello").map_err(|e| e.to_string())?;
        let reply = engine.handle_text(&fresh.session_id, text).map_err(|e| e.to_string())?;
        ensure!(!reply.response.trim().is_empty(), "empty reply to {text:?}");
        ensure!(reply.module == RETRIEVAL, "{text:?} answered by {}", reply.module);
        retrieval += 1;
    }
    Ok(format!("{} replies, {retrieval} from retrieval", utterances + 3))
}

// ---------------------------------------------------------------- templates

pub fn check_template_rotation() -> Check {
    let comp = load_components(&DataSource::Bundled).map_err(|e| e.to_string())?;
    let bank = &comp.templates;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 1.0f64;
    let mut keys = 0;
    for key in bank.keys() {
        let n = bank.templates(key).len();
        let mut used = BTreeSet::new();
        for cycle in 0..10 {
            let mut seen = BTreeSet::new();
            for _ in 0..n {
                let t = bank.select_template(key, &mut used, rng.random()).map_err(|e| e.to_string())?;
                ensure!(seen.insert(t.id.clone()), "{key}: {} repeated in cycle {cycle}", t.id);
            }
        }
        keys += 1;
        if n < 2 {
            continue;
        }
        let draws = 200 * n;
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for _ in 0..draws {
            let mut fresh = BTreeSet::new();
            let t = bank.select_template(key, &mut fresh, rng.random()).map_err(|e| e.to_string())?;
            *counts.entry(t.id.clone()).or_default() += 1;
        }
        ensure!(counts.len() == n, "{key}: only {} of {n} templates drawn", counts.len());
        let expected = draws as f64 / n as f64;
        let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new((n - 1) as f64).map_err(|e| e.to_string())?.cdf(stat);
        ensure!(p > 0.01, "{key}: chi-square p = {p:.4}");
        worst = worst.min(p);
    }
    Ok(format!("{keys} keys, no early repeats, min chi-square p = {worst:.3}"))
}

// ---------------------------------------------------------------- OLS

pub fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

/// Exact slope and intercept.
pub fn exact_fit(x: &[f64], y: &[f64]) -> (BigRational, BigRational) {
    let n = BigRational::from_integer(BigInt::from(x.len()));
    let xs: Vec<BigRational> = x.iter().map(|&v| rational(v)).collect();
    let ys: Vec<BigRational> = y.iter().map(|&v| rational(v)).collect();
    let mx = xs.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let my = ys.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let mut sxy = BigRational::zero();
    let mut sxx = BigRational::zero();
    for (xi, yi) in xs.iter().zip(&ys) {
        sxy += (xi - &mx) * (yi - &my);
        sxx += (xi - &mx) * (xi - &mx);
    }
    let beta = sxy / sxx;
    let intercept = my - &beta * mx;
    (beta, intercept)
}

fn rel_close(got: f64, want: &BigRational, tol: f64) -> bool {
    let w = want.to_f64().unwrap_or(f64::NAN);
    let err = (rational(got) - want).abs().to_f64().unwrap_or(f64::INFINITY);
    err <= tol * w.abs().max(1.0)
}

/// A random design with 3 to 10 points on a 0.25 grid and a non-constant x.
pub fn random_design(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let n = rng.random_range(3..=10);
        let x: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(-400..=400)) / 4.0).collect();
        let y: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(-4000..=4000)) / 4.0).collect();
        if x.iter().any(|&v| v != x[0]) {
            return (x, y);
        }
    }
}

pub fn t_oracle() -> Vec<(f64, f64, f64)> {
    include_str!("../data/t_pvalues.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<f64> = l.split('\t').map(|v| v.parse().expect("number")).collect();
            (f[0], f[1], f[2])
        })
        .collect()
}

pub fn check_ols() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fixtures = 500;
    for i in 0..fixtures {
        let (x, y) = random_design(&mut rng);
        let fit = ols_fit(&x, &y).map_err(|e| format!("fixture {i}: {e}"))?;
        let (beta, intercept) = exact_fit(&x, &y);
        ensure!(rel_close(fit.beta, &beta, 1e-9), "fixture {i}: beta {} vs {}", fit.beta, beta);
        ensure!(rel_close(fit.intercept, &intercept, 1e-9), "fixture {i}: intercept {} vs {}", fit.intercept, intercept);

        let n = x.len() as f64;
        let resid: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - fit.intercept - fit.beta * xi).collect();
        let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max) * x.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let dot_x: f64 = resid.iter().zip(&x).map(|(r, xi)| r * xi).sum();
        let sum: f64 = resid.iter().sum();
        ensure!(dot_x.abs() / scale < 1e-8 * n, "fixture {i}: residuals not orthogonal to x ({dot_x})");
        ensure!(sum.abs() / scale < 1e-8 * n, "fixture {i}: residuals do not sum to zero ({sum})");

        let (a, b) = (f64::from(rng.random_range(1..=50)) / 8.0, f64::from(rng.random_range(1..=50)) / 8.0);
        let xs: Vec<f64> = x.iter().map(|v| v * a).collect();
        let ys: Vec<f64> = y.iter().map(|v| v * b).collect();
        let scaled = ols_fit(&xs, &ys).map_err(|e| e.to_string())?;
        let want = fit.beta * b / a;
        ensure!((scaled.beta - want).abs() <= 1e-9 * want.abs().max(1.0), "fixture {i}: scaled beta {} vs {want}", scaled.beta);
        if fit.t.is_finite() && fit.se > 0.0 {
            ensure!((scaled.t - fit.t).abs() <= 1e-7 * fit.t.abs().max(1.0), "fixture {i}: t changed under scaling");
        }
    }
    let oracle = t_oracle();
    let mut worst = 0.0f64;
    for &(t, df, p) in &oracle {
        let got = student_t_two_sided_p(t, df);
        worst = worst.max((got - p).abs());
        ensure!((got - p).abs() < 1e-10, "p(t={t}, df={df}) = {got}, oracle {p}");
    }
    Ok(format!("{fixtures} exact fits, {} p-values, max |dp| = {worst:.1e}", oracle.len()))
}

// ---------------------------------------------------------------- planted

pub fn check_planted_recovery() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("synth.jsonl");
    let cfg = SynthConfig { conversations: 2000, ..Default::default() };
    write_synthetic_log(&path, &cfg).map_err(|e| e.to_string())?;
    let logs = load_logs(&path, 3).map_err(|e| e.to_string())?;
    ensure!(logs.metrics.len() == cfg.conversations, "{} conversations kept", logs.metrics.len());
    ensure!(logs.excluded_short == cfg.short_conversations, "{} short conversations excluded", logs.excluded_short);
    let report = run_engagement_analyses(&logs.metrics);
    let planted = [
        ("rating_by_words", cfg.planted.rating_by_words),
        ("turns_by_words", cfg.planted.turns_by_words),
        ("rating_by_backstory", cfg.planted.rating_by_backstory),
        ("rating_by_pet", cfg.planted.rating_by_pet),
    ];
    let mut parts = Vec::new();
    for (id, want) in planted {
        let a = report.analyses.iter().find(|a| a.id == id).ok_or(format!("analysis {id} missing"))?;
        let r = a.result.ok_or(format!("{id} skipped: {:?}", a.skipped))?;
        let z = (r.beta - want) / r.se;
        ensure!(z.abs() < 3.0, "{id}: beta {:.4} vs planted {want} ({z:.2} se)", r.beta);
        parts.push(format!("{id} {z:+.2}se"));
    }
    ensure!(report.analyses[2].model.contains("ln("), "backstory model is not log-log");
    ensure!(report.analyses[3].model.contains("yes = 1, no = 0"), "pet model is not yes/no");
    let elapsed = start.elapsed();
    ensure!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    Ok(format!("{} in {:.1} s", parts.join(", "), elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------- logs

pub fn check_truncated_log() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("crash.jsonl");
    let writer = LogWriter::open(&path).map_err(|e| e.to_string())?;
    let mut events = vec![LogEvent::SessionStart { session_id: "s1".into(), user_ref: "u".into(), ts_ms: 1, greeting: "Hi.".into() }];
    for i in 0..6u32 {
        events.push(LogEvent::Turn(TurnLine {
            session_id: "s1".into(),
            turn_index: i,
            role: if i % 2 == 0 { Role::User } else { Role::System },
            text: format!("line {i}"),
            ts_ms: 10 + u64::from(i),
            ..Default::default()
        }));
    }
    for e in &events {
        writer.append(e).map_err(|e| e.to_string())?;
    }
    drop(writer);
    let full = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let last = LogEvent::SessionEnd { session_id: "s1".into(), ts_ms: 99, rating: Some(4) };
    let tmp = dir.path().join("one.jsonl");
    LogWriter::open(&tmp).and_then(|w| w.append(&last)).map_err(|e| e.to_string())?;
    let line = std::fs::read_to_string(&tmp).map_err(|e| e.to_string())?;
    for cut in 1..line.trim_end().len() {
        std::fs::write(&path, format!("{full}{}", &line[..cut])).map_err(|e| e.to_string())?;
        let read = read_log_file(&path).map_err(|e| e.to_string())?;
        ensure!(read.events == events, "cut at {cut}: {} events survived", read.events.len());
        ensure!(read.skipped == 1, "cut at {cut}: {} lines skipped", read.skipped);
    }
    Ok(format!("{} complete lines kept at every cut point", events.len()))
}
