"""Test the command line interface and its exit codes."""

import json
import os
import tempfile

import pytest

import gentlenet as gn
from gentlenet.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main


def test_patterns_command(capsys):
    with tempfile.TemporaryDirectory() as tmpdir:
        code = main(["--out", tmpdir, "gp", "patterns", "--spec", "A(C4)"])
        assert code == EXIT_OK
        assert os.path.exists(os.path.join(tmpdir, "patterns.csv"))
    assert "contains F2xF2: true" in capsys.readouterr().out


def test_named_outputs():
    with tempfile.TemporaryDirectory() as tmpdir:
        code = main(
            [
                "--out",
                tmpdir,
                "median",
                "--spec",
                "C(C5)",
                "--radius",
                "2",
                "--name",
                "c5",
            ]
        )
        assert code == EXIT_OK
        assert sorted(os.listdir(tmpdir)) == ["c5.csv", "c5.json"]
        code = main(["--out", tmpdir, "hyp", "sequences", "--exponents", "3"])
        assert code == EXIT_OK
        _, frame = gn.experiments.read_table(
            os.path.join(tmpdir, "sequences.csv")
        )
        assert len(frame) == 1
        code = main(["--out", tmpdir, "lamp", "witness", "--R", "6"])
        assert code == EXIT_OK
        assert os.path.exists(os.path.join(tmpdir, "lamp-witness_R6.family"))


def test_configuration_errors():
    with tempfile.TemporaryDirectory() as tmpdir:
        base = ["--out", tmpdir]
        assert main([*base, "--threads", "0", "hyp", "sequences"]) == (
            EXIT_CONFIG
        )
        assert main([*base, "gp", "ball", "--spec", "no-such-group"]) == (
            EXIT_CONFIG
        )
        delta = [*base, "hyp", "delta", "--spec", "Z2", "--sample", "many"]
        assert main(delta) == EXIT_CONFIG
        missing = os.path.join(tmpdir, "missing.json")
        assert main([*base, "suite", "--config", missing]) == EXIT_CONFIG
        bumped = os.path.join(tmpdir, "bumped.json")
        with open(bumped, "w", encoding="utf-8") as fout:
            json.dump({"schema": 2, "experiments": []}, fout)
        assert main([*base, "suite", "--config", bumped]) == EXIT_CONFIG
    with pytest.raises(SystemExit):
        main(["gp"])


def test_runtime_failure():
    with tempfile.TemporaryDirectory() as tmpdir:
        code = main(
            [
                "--out",
                tmpdir,
                "hyp",
                "detour",
                "--spec",
                "Z2",
                "--radius",
                "2",
                "--x",
                "a^-4",
                "--y",
                "a^4",
            ]
        )
    assert code == EXIT_FAILURE


def test_suite_from_config():
    document = {
        "schema": 1,
        "seed": 1,
        "out": "ignored",
        "experiments": [
            {"name": "seq", "kind": "sequences", "params": {"exponents": [4]}},
            {"name": "z", "kind": "ball", "params": {"spec": "Z", "radius": 2}},
        ],
    }
    with tempfile.TemporaryDirectory() as tmpdir:
        path = os.path.join(tmpdir, "config.json")
        with open(path, "w", encoding="utf-8") as fout:
            json.dump(document, fout)
        out = os.path.join(tmpdir, "results")
        assert main(["--out", out, "suite", "--config", path]) == EXIT_OK
        assert sorted(os.listdir(out)) == ["seq.csv", "z.csv", "z.json"]
        header, _ = gn.experiments.read_table(os.path.join(out, "seq.csv"))
        assert header["seed"] == "1"
        empty = os.path.join(tmpdir, "empty.json")
        with open(empty, "w", encoding="utf-8") as fout:
            json.dump({"schema": 1, "experiments": []}, fout)
        nothing = os.path.join(tmpdir, "nothing")
        assert main(["--out", nothing, "suite", "--config", empty]) == EXIT_OK
        assert not os.path.exists(nothing)
