import math
import os
import pathlib

import pytest

import hallucorrect as hc

FIXTURES = pathlib.Path(os.environ.get("HC_FIXTURE_DIR", pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures"))


def test_ned_examples():
    assert hc.ned("abc", "abc") == 0.0
    assert hc.ned("", "abc") == 1.0
    assert hc.ned("kitten", "sitting") == pytest.approx(3 / 7, abs=0)


def test_pearson_and_alignment():
    assert hc.pearson([1, 2, 3, 4], [2, 4, 5, 9]) == pytest.approx(11 / math.sqrt(130), abs=1e-12)
    rows = {r["method"]: r["diff"] for r in hc.alignment_report({"rarr": 0.68, "cove": 0.54}, {"rarr": 0.65, "cove": 0.52})}
    assert rows == {"cove": 0.02, "rarr": 0.03}


def test_errors_carry_codes():
    with pytest.raises(hc.HallucorrectError) as info:
        hc.pearson([1, 1, 1], [1, 2, 3])
    assert info.value.code == "degenerate_variance"


def test_nli_and_similarity():
    t = hc.nli_scores("The cat sat.", "The cat sat.")
    assert t["entailment"] + t["neutral"] + t["contradiction"] == pytest.approx(1.0, abs=1e-6)
    assert t["entailment"] > max(t["neutral"], t["contradiction"])
    assert hc.semantic_similarity("same text", "same text") == pytest.approx(1.0, abs=1e-6)


def test_judge_scale():
    assert [hc.normalize_judge_score(s) for s in (1, 10)] == [0.0, 1.0]
    assert hc.parse_judge_score("reasoning\nScore: 7") == 7
    assert hc.parse_judge_score("nothing") is None


def test_text_helpers():
    assert hc.parse_numbered_list("Questions:\n1. A?\n2) B?") == ["A?", "B?"]
    assert hc.chunk_text(" ".join(f"w{i}" for i in range(10)), 4, 0) == ["w0 w1 w2 w3", "w4 w5 w6 w7", "w8 w9"]
    assert hc.extract_article_text((FIXTURES / "html" / "hello.html").read_text()) == "Hello"
    prompt = hc.render_prompt("rarr_answer", {"claim": "C", "query": "Q", "evidence": "E"})
    assert prompt.endswith("1. You said: C\n2. I checked: Q\n3. I found this article: E\n4. Reasoning:")


def test_rarr_pipeline_with_python_model():
    loaded = hc.load_summedits(str(FIXTURES / "summedits" / "news_sample.json"))
    assert len(loaded["records"]) == 3
    record = loaded["records"][2]
    calls = []

    def model(prompt):
        calls.append(prompt)
        if prompt.endswith("To verify it,"):
            return "\n1. I googled: Did the council approve a budget?"
        return " The article agrees.\n5. Therefore: This agrees with what you said."

    out = hc.run_pipeline(record, {"system": "rarr", "llm_backend": "py"}, model)
    assert out["text"] == record["input_summary"]
    assert len(calls) == 2
    assert [t["stage"] for t in out["trace"]] == ["generate_questions", "retrieve", "answer"]


def test_aggregate_and_table():
    report = {
        "record_id": "a",
        "ned": 0.2,
        "sem": 0.949,
        "nli": {"ent": 0.5, "neu": 0.3, "con": 0.2},
        "geval": {"overall": 0.6, "factuality": 0.7, "relevance": 0.8},
    }
    row = hc.aggregate([report])
    assert row["n"] == 1
    row["label"] = "demo"
    assert hc.render_table([row], "csv").splitlines()[1] == "demo,1,0.20*,95*,50*,30*,20*,60*,70*,80*"
