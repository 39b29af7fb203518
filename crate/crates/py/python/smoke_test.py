"""Exercise the extension module end to end: python python/smoke_test.py"""

import os
import tempfile

import gunrock


def main():
    assert gunrock.double_metaphone("smith") == ("SM0", "XMT")
    assert gunrock.double_metaphone("knight") == ("NT", "NT")

    corrector = gunrock.PhoneticCorrector([("a star is born", "movie")])
    words = ["i", "saw", "stars", "born"]
    fixed = corrector.correct([(w, 300 * i, 300 * i + 260) for i, w in enumerate(words)])
    assert fixed["text"] == "i saw a star is born", fixed

    fit = gunrock.ols_fit([1.0, 2.0, 3.0, 4.0], [2.1, 3.9, 6.2, 7.8])
    assert abs(fit["beta"] - 1.94) < 1e-9 and 0.0 <= fit["p"] <= 1.0, fit

    with tempfile.TemporaryDirectory() as tmp:
        log = os.path.join(tmp, "conv.jsonl")
        engine = gunrock.Engine(log_path=log, seed=3)
        session, greeting = engine.open_session("py-user")
        assert greeting
        reply = engine.handle_text(session, "what's your favorite color")
        assert reply["module"] == "persona" and reply["backstory"], reply
        reply = engine.handle_turn(session, [("i", 0, 200), ("like", 240, 500), ("movies", 540, 900)])
        assert reply["response"] and "ssml" in reply
        engine.handle_text(session, "tell me more")
        record = engine.close_session(session, 5)
        assert record["rating"] == 5 and len(record["turns"]) == 6
        try:
            engine.handle_text(session, "hello")
        except gunrock.SessionClosed:
            pass
        else:
            raise AssertionError("closed session accepted a turn")
        try:
            engine.close_session(session, 9)
        except ValueError:
            pass
        else:
            raise AssertionError("rating 9 accepted")

        report = gunrock.analyze_log(log)
        assert report["summary"]["conversations"] == 1

        synthetic = os.path.join(tmp, "synthetic.jsonl")
        gunrock.write_synthetic_log(synthetic, conversations=400, seed=1)
        report = gunrock.analyze_log(synthetic)
        assert report["summary"]["conversations"] == 400
        assert [a["id"] for a in report["analyses"]] == [
            "rating_by_words",
            "turns_by_words",
            "rating_by_backstory",
            "rating_by_pet",
        ]

    print("smoke test ok")


if __name__ == "__main__":
    main()
