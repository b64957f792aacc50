import json
import math

import pytest

from predclass.data import FeatureTable, Labeling
from predclass.datasets import demo_train, demo_test
from predclass.finite import FiniteModelConfig, demo_config, mdpc_classify, spc_classify
from predclass.report import classification_report, parse_report, sig, write_report


def test_sig_keeps_fifteen_digits():
    assert sig(1 / 3) == float("3.33333333333333e-01")
    assert sig(float("-inf")) == float("-inf")


def test_report_round_trip(tmp_path):
    train, labels = demo_train()
    res = mdpc_classify(demo_test(), train, labels, demo_config())
    report = classification_report({"model": "finite"}, res, class_labels=[1, 2])
    path = tmp_path / "r.json"
    write_report(report, path)
    back = parse_report(path)
    assert back["argmax_labels"] == [1, 1, 1]
    assert back["structures"]["total"] == 8


def test_parse_rejects_denormalized_posteriors(tmp_path):
    report = {
        "items": [{"item": 1, "argmax": 1,
                   "posterior": [{"log": math.log(0.5), "linear": 0.5},
                                 {"log": math.log(0.4), "linear": 0.4}]}],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(report))
    with pytest.raises(ValueError):
        parse_report(path)


def test_structure_table_capped(tmp_path):
    train = FeatureTable.from_rows([(1,), (2,)] * 3)
    labels = Labeling.from_sequence([1, 2] * 3, 2)
    test = FeatureTable.from_rows([(1,)] * 8)  # 256 structures > cap of 100
    res = spc_classify(test, train, labels, FiniteModelConfig(alphabet_sizes=(2,)))
    report = classification_report({}, res)
    assert report["structures"]["total"] == 256
    assert report["structures"]["shown"] == 100
