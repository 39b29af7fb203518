use std::path::PathBuf;

use gunrock_cli::commands::{analyze, correct, render, synth, Format};

#[test]
fn correct_emits_one_line_per_utterance() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("movies.tsv");
    std::fs::write(&kb, "# titles\na star is born\tmovie\n").unwrap();
    let input = dir.path().join("in.jsonl");
    let line = |words: &[&str]| {
        let toks: Vec<_> = words
            .iter()
            .enumerate()
            .map(|(i, w)| serde_json::json!({"word": w, "start_ms": i * 300, "end_ms": i * 300 + 260}))
            .collect();
        serde_json::to_string(&toks).unwrap()
    };
    let body = format!("{}\n\n{{\"tokens\": {}}}\n", line(&["i", "saw", "stars", "born"]), line(&["hello"]));
    std::fs::write(&input, body).unwrap();

    let mut out = Vec::new();
    assert_eq!(correct(&[kb], &input, None, &mut out).unwrap(), 2);
    let lines: Vec<serde_json::Value> =
        String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["text"], "i saw a star is born");
    assert_eq!(lines[0]["corrections"][0]["replacement"], "a star is born");
    assert_eq!(lines[1]["text"], "hello");
    assert_eq!(lines[1]["corrections"].as_array().unwrap().len(), 0);
}

#[test]
fn synth_then_analyze_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("synthetic.jsonl");
    let summary: serde_json::Value = serde_json::from_str(&synth(&log, 300, 11).unwrap()).unwrap();
    assert!(summary["sessions"].as_u64().unwrap() >= 300);

    let out = dir.path().join("report");
    let report = analyze(&log, 3, Some(&out)).unwrap();
    assert_eq!(report.summary.conversations, 300);
    let mut names: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "points_rating_by_backstory.csv",
            "points_rating_by_pet.csv",
            "points_rating_by_words.csv",
            "points_turns_by_words.csv",
            "report.json",
            "report.txt",
        ]
    );
    let json: serde_json::Value = serde_json::from_str(&render(&report, Format::Json)).unwrap();
    assert_eq!(json["analyses"].as_array().unwrap().len(), 4);
    assert!(render(&report, Format::Table).contains("rating_by_words"));
    let csv = render(&report, Format::Csv);
    assert!(csv.starts_with("analysis,x,y\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("turns_by_words,")).count(), 300);
}

#[test]
fn analyze_missing_log_fails() {
    assert!(analyze(&PathBuf::from("/nonexistent/log.jsonl"), 3, None).is_err());
}
