import pytest
from fastapi.testclient import TestClient

from damteval.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture(scope="session")
def score_payload(toy_tree):
    return {
        "refs_path": str(toy_tree["refs"]),
        "hyps_dir": str(toy_tree["hyps"]),
        "emb_ref_path": str(toy_tree["embs"] / "ref.emb1"),
        "emb_dir": str(toy_tree["embs"]),
    }


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


class TestScoreEndpoint:
    def test_scores_match_fixture(self, client, score_payload, toy_expected):
        response = client.post("/score", json=score_payload)
        assert response.status_code == 200
        body = response.json()
        assert body["with_difficulty"] is True
        systems = {row["system"]: row for row in body["systems"]}
        assert list(systems) == ["sysA", "sysB", "sysC"]
        for name, expected in toy_expected["systems"].items():
            assert systems[name]["da_f"] == pytest.approx(
                expected["da_f"], abs=1e-9
            )
            assert systems[name]["f"] == pytest.approx(expected["f"], abs=1e-9)

    def test_no_difficulty(self, client, score_payload):
        response = client.post(
            "/score", json={**score_payload, "no_difficulty": True}
        )
        assert response.status_code == 200
        for row in response.json()["systems"]:
            assert row["da_f"] is None

    def test_missing_file_is_structured_error(self, client, score_payload):
        response = client.post(
            "/score", json={**score_payload, "refs_path": "/nonexistent/refs.txt"}
        )
        assert response.status_code == 400
        error = response.json()["error"]
        assert error["code"] == "IO"

    def test_domain_error_carries_code(self, client, score_payload, tmp_path):
        short = tmp_path / "refs.txt"
        short.write_text("only one line\n")
        response = client.post(
            "/score", json={**score_payload, "refs_path": str(short)}
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "ALIGNMENT"


class TestBleuEndpoint:
    def test_runs_on_toy_text(self, client, toy_tree):
        response = client.post(
            "/bleu",
            json={
                "refs_path": str(toy_tree["refs"]),
                "hyps_dir": str(toy_tree["hyps"]),
            },
        )
        assert response.status_code == 200
        rows = response.json()["systems"]
        assert [r["system"] for r in rows] == ["sysA", "sysB", "sysC"]


class TestCorrelateEndpoint:
    def test_perfect_metric(self, client):
        human = {"a": 0.3, "b": 0.2, "c": 0.1}
        response = client.post(
            "/correlate",
            json={"metric_scores": {"m": human}, "human_scores": human},
        )
        assert response.status_code == 200
        block = response.json()["metrics"][0]["all_systems"]
        assert block["pearson_r"] == 1.0
        assert block["kendall_tau"] == 1.0
        assert block["spearman_rho"] == 1.0
        assert block["absolute"] is True

    def test_absolute_values_reported(self, client):
        human = {"a": 0.3, "b": 0.2, "c": 0.1}
        inverted = {"a": 0.1, "b": 0.2, "c": 0.3}
        response = client.post(
            "/correlate",
            json={"metric_scores": {"m": inverted}, "human_scores": human},
        )
        block = response.json()["metrics"][0]["all_systems"]
        assert block["pearson_r"] == 1.0  # |-1|

    def test_top_subset(self, client):
        human = {f"s{i}": 10.0 - i for i in range(10)}
        metric = dict(human)
        response = client.post(
            "/correlate",
            json={
                "metric_scores": {"m": metric},
                "human_scores": human,
                "top_fraction": 0.3,
            },
        )
        m = response.json()["metrics"][0]
        assert m["top_k"] == 3
        assert m["top_systems"]["n"] == 3

    def test_system_set_mismatch(self, client):
        response = client.post(
            "/correlate",
            json={
                "metric_scores": {"m": {"a": 1.0, "b": 2.0}},
                "human_scores": {"a": 1.0, "c": 2.0},
            },
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "CONFIG"

    def test_both_top_modes_rejected(self, client):
        human = {"a": 1.0, "b": 2.0, "c": 3.0}
        response = client.post(
            "/correlate",
            json={
                "metric_scores": {"m": human},
                "human_scores": human,
                "top_fraction": 0.5,
                "top_k": 2,
            },
        )
        assert response.status_code == 400


class TestSweepEndpoint:
    def test_series_over_k(self, client):
        human = {f"s{i}": 10.0 - i for i in range(5)}
        response = client.post(
            "/sweep",
            json={"metric_scores": {"m": dict(human)}, "human_scores": human},
        )
        points = response.json()["points"]
        assert [p["k"] for p in points] == [2, 3, 4, 5]
        assert all(p["kendall_tau"] == 1.0 for p in points)

    def test_k_below_two_rejected(self, client):
        human = {"a": 1.0, "b": 2.0}
        response = client.post(
            "/sweep",
            json={
                "metric_scores": {"m": human},
                "human_scores": human,
                "k_min": 1,
            },
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "INSUFFICIENT_SYSTEMS"


class TestRankReportEndpoint:
    def test_multi_metric_report(self, client):
        human = {"a": 0.9, "b": 0.5, "c": 0.1}
        response = client.post(
            "/rank-report",
            json={
                "metric_scores": {
                    "good": {"a": 3.0, "b": 2.0, "c": 1.0},
                    "err": {"a": 0.1, "b": 0.2, "c": 0.9},
                },
                "human_scores": human,
                "directions": {"err": "lower"},
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["sum_abs_delta"] == {"good": 0, "err": 0}
        assert [row["system"] for row in body["systems"]] == ["a", "b", "c"]
        assert body["systems"][0]["metrics"]["good"]["rank"] == 1


class TestDifficultyEndpoint:
    def test_histogram_default(self, client, toy_tree):
        response = client.post(
            "/difficulty",
            json={
                "emb_ref_path": str(toy_tree["embs"] / "ref.emb1"),
                "emb_dir": str(toy_tree["embs"]),
                "histogram_bins": 10,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["k_systems"] == 3
        assert body["n_segments"] == 2
        assert body["tokens"] is None
        assert sum(b["count"] for b in body["histogram"]) == body["n_tokens"]

    def test_per_token_rows(self, client, toy_tree, toy_expected):
        response = client.post(
            "/difficulty",
            json={
                "emb_ref_path": str(toy_tree["embs"] / "ref.emb1"),
                "emb_dir": str(toy_tree["embs"]),
                "per_token": True,
            },
        )
        body = response.json()
        tokens = body["tokens"]
        assert body["histogram"] is None
        assert [t["token"] for t in tokens if t["segment"] == 0] == [
            "the",
            "cat",
            "sat",
        ]
        weights = [t["weight"] for t in tokens if t["segment"] == 0]
        assert weights == pytest.approx(toy_expected["weights"][0], abs=1e-9)

    def test_subset_of_systems(self, client, toy_tree):
        response = client.post(
            "/difficulty",
            json={
                "emb_ref_path": str(toy_tree["embs"] / "ref.emb1"),
                "emb_dir": str(toy_tree["embs"]),
                "systems": ["sysA", "sysB"],
            },
        )
        assert response.json()["k_systems"] == 2
