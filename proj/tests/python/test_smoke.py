import json

import pytest

import _eagle as eagle

SCHEMA = json.dumps(
    {
        "node_types": [
            {"name": "Author", "count": 40, "attr_dim": 8},
            {"name": "Paper", "count": 30, "attr_dim": 8},
            {"name": "Venue", "count": 6, "attr_dim": 4},
        ],
        "edge_types": [
            {"name": "Write", "src": "Author", "dst": "Paper", "mean_out_degree": 1.5},
            {"name": "Publish", "src": "Paper", "dst": "Venue", "mean_out_degree": 1.0},
        ],
        "communities": 3,
    }
)

CONFIG = json.dumps(
    {
        "embed_dim": 8,
        "hidden_dim": 8,
        "learning_rate": 0.01,
        "pretrain_epochs": 3,
        "finetune_epochs": 3,
        "score_rounds": 2,
    }
)


def test_generate_is_deterministic():
    g1 = eagle.generate(SCHEMA, seed=5)
    g2 = eagle.generate(SCHEMA, seed=5)
    assert g1.node_count("Paper") == 30
    assert g1.node_types() == ["Author", "Paper", "Venue"]
    assert g1.total_node_count() == 76
    assert g1.total_edge_count() == g2.total_edge_count()


def test_auc():
    assert eagle.auc([0.9, 0.1], [1, 0]) == 1.0
    assert eagle.auc([0.5, 0.5], [1, 0]) == 0.5
    with pytest.raises(eagle.DataError):
        eagle.auc([0.5, 0.5], [1, 1])


def test_graph_io_roundtrip(tmp_path):
    g = eagle.generate(SCHEMA, seed=7)
    eagle.save_graph(g, str(tmp_path))
    back = eagle.load_graph(str(tmp_path))
    assert back.total_node_count() == g.total_node_count()
    assert back.total_edge_count() == g.total_edge_count()


def test_full_pipeline():
    g = eagle.generate(SCHEMA, seed=11)
    pre, fine = eagle.split(g, fraction=0.3, seed=1)
    ckpt = eagle.pretrain(CONFIG, pre)
    injected, labels = eagle.inject(fine, "Paper", count=3, k=5, seed=2)
    assert sum(labels) == 3
    report = eagle.detect(CONFIG, injected, labels, ckpt)
    assert 0.0 <= report["auc"] <= 1.0
    assert len(report["entries"]) == len(labels)
    ranks = [e["rank"] for e in report["entries"]]
    assert ranks == list(range(1, len(labels) + 1))


def test_bad_config_raises():
    g = eagle.generate(SCHEMA, seed=3)
    with pytest.raises(eagle.ConfigError):
        eagle.detect(json.dumps({"bogus": 1}), g, [0] * 30, None)
