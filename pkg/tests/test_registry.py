import dataclasses
import json
import os
from fractions import Fraction

import pytest

import fincomplete as fc
from fincomplete.errors import InputError
from fincomplete.registry import ExpectedRow, execute_row, replay
from fincomplete.serialization import load_model_file, theorem_report_to_dict

REGISTRY_DIR = os.path.join(os.path.dirname(__file__), "..", "registry")


def test_all_entries_replay_verified():
    for report in fc.replay_all():
        assert report.verified, report.theorem


def test_unknown_id_rejected():
    with pytest.raises(InputError):
        fc.load("CE99")


def test_known_masses():
    e = fc.load("CE55")
    assert e.model.prob[3] == (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2))
    e = fc.load("CE53")
    assert e.components["Q"].prob[0] == (Fraction(1, 3), Fraction(2, 3))


def test_mutated_mass_is_detected():
    e = fc.load("CE55")
    rows = [list(r) for r in e.model.prob]
    rows[3] = [Fraction(1, 6), Fraction(1, 6), Fraction(2, 3)]
    mutated = dataclasses.replace(e, model=dataclasses.replace(e.model, prob=tuple(tuple(r) for r in rows)))
    report = replay(mutated)
    assert not report.verified
    bad_rows = [label for label, rep in report.hypothesis_results if rep.failed]
    assert bad_rows  # the diff names the offending rows
    for label, rep in report.hypothesis_results:
        if rep.failed:
            assert "expected" in rep.witness and "actual" in rep.witness


def test_replay_is_deterministic():
    first = [json.dumps(theorem_report_to_dict(r), sort_keys=True) for r in fc.replay_all()]
    second = [json.dumps(theorem_report_to_dict(r), sort_keys=True) for r in fc.replay_all()]
    assert first == second


def test_shipped_model_files_match_entries():
    for rid in fc.REGISTRY_IDS:
        e = fc.load(rid)
        doc = load_model_file(os.path.join(REGISTRY_DIR, f"{rid.lower()}.model"))
        assert doc.model == e.model
        assert doc.partitions == e.partitions
        assert doc.functions == e.functions
        for name, comp in e.components.items():
            cdoc = load_model_file(
                os.path.join(REGISTRY_DIR, f"{rid.lower()}_{name.lower()}.model")
            )
            assert cdoc.model == comp


def test_paper_quoted_witnesses_are_rechecked_exactly():
    e53 = fc.load("CE53")
    h = e53.functions["abs-diff-centered"]
    for i in range(4):
        assert e53.model.expectation(i, h.values) == 0
    e54 = fc.load("CE54")
    h = e54.functions["abs-diff-centered"]
    for i in range(4):
        assert e54.model.expectation(i, h.values) == 0
    # the uncentered expectation values behind those constants
    for i in range(4):
        assert e53.model.expectation(i, fc.load("CE53").functions["abs-diff"].values) == Fraction(2, 3)


def test_unknown_row_operation_rejected():
    e = fc.load("CE55")
    row = ExpectedRow("bogus", "no-such-op", {}, {})
    with pytest.raises(InputError):
        execute_row(e, row)


def test_every_row_is_cli_expressible():
    # every row carries flat, string-or-json arguments, the shape the CLI
    # accepts (the CLI tests replay the key rows through the real CLI)
    for rid in fc.REGISTRY_IDS:
        e = fc.load(rid)
        for row in e.expected:
            assert isinstance(row.op, str)
            json.dumps(row.args)
            json.dumps(row.expected)
