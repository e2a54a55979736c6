#!/usr/bin/env python3
"""End-to-end checks of the fairaudit executable."""

import argparse
import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

BINARY = None
DATA = None
SCHEMA = None


def run(*args, check_code=None):
    proc = subprocess.run([BINARY, *args], capture_output=True, text=True)
    if check_code is not None and proc.returncode != check_code:
        raise AssertionError(
            f"exit {proc.returncode} != {check_code}\nstdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
        )
    return proc


def fixture_args(*extra):
    return [
        "--input", str(DATA / "case_study.csv"),
        "--outcome", "mortality_28d",
        "--score", "risk_score",
        "--group", "sex",
        "--threshold", "0.41",
        *extra,
    ]


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.schema = json.loads(Path(SCHEMA).read_text())
        cls.tmp = tempfile.TemporaryDirectory()
        cls.tmpdir = Path(cls.tmp.name)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def validate(self, text):
        doc = json.loads(text)
        jsonschema.validate(doc, self.schema)
        return doc

    def test_version(self):
        proc = run("--version", check_code=0)
        self.assertRegex(proc.stdout.strip(), r"\d+\.\d+\.\d+")

    def test_missing_required_flag_is_input_error(self):
        proc = run("--input", str(DATA / "case_study.csv"), "--outcome", "mortality_28d")
        self.assertEqual(proc.returncode, 1)
        self.assertTrue(proc.stderr.startswith("fairaudit: "))
        self.assertIn("--group", proc.stderr)
        self.assertEqual(proc.stdout, "")

    def test_unknown_column_is_input_error(self):
        proc = run(*fixture_args("--covariates", "height"))
        self.assertEqual(proc.returncode, 1)
        self.assertIn("height", proc.stderr)

    def test_missing_file_is_input_error(self):
        proc = run("--input", str(self.tmpdir / "absent.csv"), "--outcome", "y", "--group", "g",
                   "--score", "s", "--threshold", "0.5")
        self.assertEqual(proc.returncode, 1)
        self.assertTrue(proc.stderr.startswith("fairaudit: "))

    def test_bad_condition_is_input_error(self):
        proc = run(*fixture_args("--condition", "old=age >>= 60"))
        self.assertEqual(proc.returncode, 1)

    def test_json_report_validates(self):
        proc = run(*fixture_args("--condition", "age60=age >= 60", "--epsilon", "0.05",
                                 "--bootstrap", "200", "--seed", "7"), check_code=0)
        doc = self.validate(proc.stdout)
        self.assertEqual(doc["comparisons"][0]["group_a"], "F")
        criteria = [row["criterion"] for row in doc["comparisons"][0]["rows"]]
        self.assertEqual(criteria.count("conditional_statistical_parity"), 1)
        self.assertEqual(len(doc["epsilon_assessments"]), 1)
        self.assertIsNotNone(doc["diagnostics"])

    def test_all_criteria_validate(self):
        proc = run(*fixture_args("--criteria", "all", "--meta"), check_code=0)
        doc = self.validate(proc.stdout)
        self.assertTrue(doc["meta_metrics"])

    def test_single_criterion(self):
        proc = run(*fixture_args("--criteria", "statistical_parity"), check_code=0)
        doc = self.validate(proc.stdout)
        rows = doc["comparisons"][0]["rows"]
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]["criterion"], "statistical_parity")

    def test_output_file_matches_stdout(self):
        target = self.tmpdir / "report.json"
        args = fixture_args("--bootstrap", "100", "--seed", "3")
        stdout = run(*args, check_code=0).stdout
        proc = run(*args, "--output", str(target), check_code=0)
        self.assertEqual(proc.stdout, "")
        self.assertEqual(target.read_text(), stdout)
        self.assertFalse(Path(str(target) + ".tmp").exists())

    def test_markdown_output(self):
        proc = run(*fixture_args("--format", "markdown"), check_code=0)
        self.assertTrue(proc.stdout.startswith("# Fairness audit report"))
        self.assertIn("| Statistical Parity |", proc.stdout)

    def test_deterministic_across_runs_and_workers(self):
        args = fixture_args("--bootstrap", "300", "--seed", "42")
        first = run(*args, "--workers", "1", check_code=0).stdout
        self.assertEqual(run(*args, "--workers", "1", check_code=0).stdout, first)
        self.assertEqual(run(*args, "--workers", "4", check_code=0).stdout, first)

    def test_degenerate_bootstrap_is_computation_error(self):
        path = self.tmpdir / "tiny.csv"
        rows = ["g,y,d"]
        rows += ["A,1,1", "A,0,0", "A,0,0", "A,1,0"]
        rows += ["B,1,1", "B,0,0", "B,0,0", "B,0,1"]
        path.write_text("\n".join(rows) + "\n")
        out = self.tmpdir / "tiny.json"
        proc = run("--input", str(path), "--outcome", "y", "--decision", "d", "--group", "g",
                   "--criteria", "predictive_parity", "--bootstrap", "200",
                   "--output", str(out))
        self.assertEqual(proc.returncode, 2, proc.stderr)
        self.assertTrue(proc.stderr.startswith("fairaudit: "))
        doc = self.validate(out.read_text())
        self.assertEqual(doc["comparisons"][0]["rows"][0]["status"], "error")


def main():
    global BINARY, DATA, SCHEMA
    parser = argparse.ArgumentParser()
    parser.add_argument("--binary", required=True)
    parser.add_argument("--data", required=True, type=Path)
    parser.add_argument("--schema", required=True, type=Path)
    args, rest = parser.parse_known_args()
    BINARY, DATA, SCHEMA = args.binary, args.data, args.schema
    unittest.main(argv=[sys.argv[0], *rest], verbosity=2)


if __name__ == "__main__":
    main()
