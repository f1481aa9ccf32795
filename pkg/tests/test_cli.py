"""Tests for the command-line front end: formats, exit codes, round-trips."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from ringfill import check_requirements, run_lifecycle
from ringfill.cli import main, parse_trace_report, trace_report

from conftest import make_params

PLAN_ARGS = ["plan", "--tokens", "4", "--buckets", "4", "--fill", "2", "--first", "0"]
TRACE_ARGS = [
    "trace",
    "--tokens",
    "5",
    "--buckets",
    "4",
    "--fill",
    "3",
    "--first",
    "0",
    "--target-buckets",
    "5",
]
VERIFY_PASS_ARGS = [
    "verify",
    "--tokens",
    "10",
    "--buckets",
    "4",
    "--fill",
    "2",
    "--first",
    "0",
    "--target-buckets",
    "5",
]
VERIFY_FAIL_ARGS = [
    "verify",
    "--tokens",
    "5",
    "--buckets",
    "4",
    "--fill",
    "3",
    "--first",
    "0",
    "--target-buckets",
    "5",
]


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPlan:
    def test_csv_lists_token_label_and_bucket(self, capsys):
        code, out, err = run_cli(capsys, PLAN_ARGS + ["--format", "csv"])
        assert code == 0
        assert err == ""
        assert out == (
            "token,label,stage1_bucket\n"
            "0,1,1\n"
            "1,0,0\n"
            "2,2,0\n"
            "3,3,1\n"
        )

    def test_table_is_aligned(self, capsys):
        code, out, _ = run_cli(capsys, PLAN_ARGS)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "token  label  stage1_bucket"
        assert lines[1] == "    0      1              1"
        assert len(lines) == 5

    def test_json_reports_instance_and_records(self, capsys):
        code, out, _ = run_cli(capsys, PLAN_ARGS + ["--format", "json"])
        assert code == 0
        document = json.loads(out)
        assert document["params"] == {
            "token_count": 4,
            "first_set_size": 4,
            "fill_width": 2,
            "first_bucket": 0,
        }
        assert document["placements"][2] == {
            "token": 2,
            "label": 2,
            "stage1_bucket": 0,
        }

    def test_empty_instance_emits_only_the_header(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["plan", "--tokens", "0", "--buckets", "3", "--fill", "1", "--first", "0", "--format", "csv"],
        )
        assert code == 0
        assert out == "token,label,stage1_bucket\n"

    def test_oversized_window_is_an_input_error(self, capsys):
        code, out, err = run_cli(
            capsys,
            ["plan", "--tokens", "5", "--buckets", "4", "--fill", "5", "--first", "0"],
        )
        assert code == 1
        assert out == ""
        assert "fill_width" in err
        assert "first_set_size" in err

    def test_window_start_off_the_ring_is_an_input_error(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["plan", "--tokens", "5", "--buckets", "4", "--fill", "2", "--first", "7"],
        )
        assert code == 1
        assert "first_bucket" in err


class TestTrace:
    def test_json_carries_the_full_lifecycle(self, capsys):
        code, out, _ = run_cli(capsys, TRACE_ARGS + ["--format", "json"])
        assert code == 0
        document = json.loads(out)
        assert document["params"]["second_set_size"] == 5
        assert document["occupancy1"] == [2, 1, 2, 0]
        assert document["occupancy2"] == [1, 1, 2, 1]
        assert document["occupancy3"] == [1, 2, 1, 1, 0]
        assert document["gap"] == {
            "present": True,
            "gap_start": 4,
            "gap_length": 2,
            "round": 1,
            "offset": 2,
        }
        assert document["placements"][3] == {
            "token": 3,
            "label": 3,
            "stage1_bucket": 0,
            "stage2_bucket": 3,
            "stage3_bucket": 3,
            "moved_in_stage2": True,
        }
        statuses = {entry["id"]: entry["status"] for entry in document["requirements"]}
        assert statuses["R6"] == "fail"
        assert statuses["R1"] == "pass"

    def test_trace_exits_zero_even_when_a_requirement_fails(self, capsys):
        code, _, _ = run_cli(capsys, TRACE_ARGS)
        assert code == 0

    def test_csv_adds_the_later_stages_and_the_move_flag(self, capsys):
        code, out, _ = run_cli(capsys, TRACE_ARGS + ["--format", "csv"])
        assert code == 0
        assert out == (
            "token,label,stage1_bucket,stage2_bucket,stage3_bucket,moved\n"
            "0,2,2,2,2,0\n"
            "1,1,1,1,1,0\n"
            "2,0,0,0,0,0\n"
            "3,3,0,3,3,1\n"
            "4,6,2,2,1,0\n"
        )

    def test_table_summarizes_occupancy_and_gap(self, capsys):
        code, out, _ = run_cli(capsys, TRACE_ARGS)
        assert code == 0
        assert "occupancy1: 2 1 2 0" in out
        assert "occupancy3: 1 2 1 1 0" in out
        assert "gap: start=4 length=2 round=1 offset=2" in out

    def test_gap_free_instance_reports_no_gap(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["trace", "--tokens", "8", "--buckets", "4", "--fill", "2", "--first", "0", "--target-buckets", "5"],
        )
        assert code == 0
        assert "gap: none" in out

    def test_second_set_not_larger_is_an_input_error(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["trace", "--tokens", "3", "--buckets", "4", "--fill", "2", "--first", "0", "--target-buckets", "4"],
        )
        assert code == 1
        assert "second_set_size" in err


class TestVerify:
    def test_clean_instance_prints_seven_pass_lines(self, capsys):
        code, out, _ = run_cli(capsys, VERIFY_PASS_ARGS)
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 7
        assert [line.split()[0] for line in lines] == [
            "R1",
            "R2",
            "R3",
            "R4",
            "R5",
            "R6",
            "RC",
        ]
        assert all(line.split()[1] == "pass" for line in lines)

    def test_violating_instance_exits_two_with_a_witness(self, capsys):
        code, out, _ = run_cli(capsys, VERIFY_FAIL_ARGS)
        assert code == 2
        assert "R6 FAIL" in out
        witness_line = next(
            line for line in out.splitlines() if line.lstrip().startswith("witness:")
        )
        witness = json.loads(witness_line.split("witness:", 1)[1])
        assert witness["clause"] == "count"
        assert witness["occupancy3"] == [1, 2, 1, 1, 0]
        assert witness["spread"] == 2

    def test_json_verdicts_match_the_exit_code(self, capsys):
        code, out, _ = run_cli(capsys, VERIFY_FAIL_ARGS + ["--format", "json"])
        assert code == 2
        document = json.loads(out)
        failing = [e["id"] for e in document["requirements"] if e["status"] == "fail"]
        assert failing == ["R6"]

    def test_invalid_window_start_is_an_input_error(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["verify", "--tokens", "3", "--buckets", "4", "--fill", "2", "--first", "7", "--target-buckets", "5"],
        )
        assert code == 1
        assert "first_bucket" in err


class TestSweepCommand:
    def test_small_domain_summary_and_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, ["sweep", "--max-buckets", "2"])
        assert code == 0
        assert "instances checked: 104" in out
        assert "oracle mismatches: 0" in out
        assert "R1 violations: 0" in out
        assert "R6 violations: 4" in out
        assert "unexpected violations: 0" in out
        assert "result: only the documented gap-case count violations" in out

    def test_single_bucket_domain_is_clean(self, capsys):
        code, out, _ = run_cli(capsys, ["sweep", "--max-buckets", "1"])
        assert code == 0
        assert "instances checked: 8" in out
        assert "R6 violations: 0" in out

    def test_json_summary_carries_the_minimal_witness(self, capsys):
        code, out, _ = run_cli(capsys, ["sweep", "--max-buckets", "2", "--format", "json"])
        assert code == 0
        document = json.loads(out)
        assert document["domain"] == {
            "max_buckets": 2,
            "max_rounds": 4,
            "target_span": 2,
        }
        assert document["instances_checked"] == 104
        assert document["violation_counts"]["R6"] == 4
        minimal = document["minimal_violations"]["R6"]
        assert minimal["params"] == {
            "token_count": 3,
            "first_set_size": 2,
            "fill_width": 2,
            "first_bucket": 0,
            "second_set_size": 3,
        }
        assert minimal["check"]["status"] == "fail"
        assert minimal["check"]["witness"]["occupancy3"] == [2, 1, 0]
        assert document["only_expected_failures"] is True

    def test_zero_rounds_is_an_input_error(self, capsys):
        code, _, err = run_cli(capsys, ["sweep", "--max-rounds", "0"])
        assert code == 1
        assert "max_rounds" in err

    def test_narrow_target_span_is_an_input_error(self, capsys):
        code, _, err = run_cli(capsys, ["sweep", "--target-span", "1"])
        assert code == 1
        assert "target_span" in err


class TestArgumentHandling:
    def test_missing_subcommand_exits_one(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(PLAN_ARGS + ["--bogus"])
        assert excinfo.value.code == 1

    def test_non_integer_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["plan", "--tokens", "x", "--buckets", "4", "--fill", "2", "--first", "0"])
        assert excinfo.value.code == 1
        assert "decimal integer" in capsys.readouterr().err

    def test_negative_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["plan", "--tokens", "-3", "--buckets", "4", "--fill", "2", "--first", "0"])
        assert excinfo.value.code == 1

    def test_csv_format_is_rejected_for_verify(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(VERIFY_PASS_ARGS + ["--format", "csv"])
        assert excinfo.value.code == 1


class TestOutputHandling:
    def test_report_goes_to_the_requested_file(self, capsys, tmp_path):
        target = tmp_path / "plan.csv"
        code, out, _ = run_cli(
            capsys, PLAN_ARGS + ["--format", "csv", "--output", str(target)]
        )
        assert code == 0
        assert out == ""
        assert target.read_text(encoding="utf-8").startswith("token,label,stage1_bucket\n")

    def test_unwritable_output_path_is_an_input_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            PLAN_ARGS + ["--output", str(tmp_path / "missing" / "plan.txt")],
        )
        assert code == 1
        assert err.startswith("error:")

    def test_repeated_runs_are_byte_identical(self, capsys):
        outputs = []
        for _ in range(2):
            _, out, _ = run_cli(capsys, TRACE_ARGS + ["--format", "json"])
            outputs.append(out)
        assert outputs[0] == outputs[1]

    def test_module_entry_point_matches_the_library(self):
        result = subprocess.run(
            [sys.executable, "-m", "ringfill.cli"] + PLAN_ARGS + ["--format", "csv"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert result.stdout.splitlines()[1] == "0,1,1"


class TestTraceRoundTrip:
    def trip(self, params):
        trace = run_lifecycle(params)
        report = check_requirements(trace)
        document = json.loads(json.dumps(trace_report(trace, report)))
        rebuilt = parse_trace_report(document)
        assert rebuilt == trace
        assert check_requirements(rebuilt) == report

    def test_clean_instance_survives_the_round_trip(self):
        self.trip(make_params(10, 4, 2, target=5))

    def test_violating_instance_survives_the_round_trip(self):
        self.trip(make_params(5, 4, 3, target=5))

    def test_empty_instance_survives_the_round_trip(self):
        self.trip(make_params(0, 3, 2))

    def test_wrapped_window_survives_the_round_trip(self):
        self.trip(make_params(9, 4, 3, first=3, target=7))


class TestTraceReportValidation:
    @pytest.fixture
    def document(self):
        trace = run_lifecycle(make_params(5, 4, 3, target=5))
        report = check_requirements(trace)
        return json.loads(json.dumps(trace_report(trace, report)))

    def test_missing_params_is_rejected(self, document):
        del document["params"]
        with pytest.raises(ValueError, match="params"):
            parse_trace_report(document)

    def test_invalid_params_are_rejected(self, document):
        document["params"]["fill_width"] = 9
        with pytest.raises(ValueError, match="fill_width"):
            parse_trace_report(document)

    def test_non_integer_params_are_rejected(self, document):
        document["params"]["token_count"] = True
        with pytest.raises(ValueError, match="integers"):
            parse_trace_report(document)

    def test_wrong_placement_count_is_rejected(self, document):
        document["placements"].pop()
        with pytest.raises(ValueError, match="expected 5 placements"):
            parse_trace_report(document)

    def test_out_of_order_tokens_are_rejected(self, document):
        document["placements"].reverse()
        with pytest.raises(ValueError, match="dense and ordered"):
            parse_trace_report(document)

    def test_unknown_placement_field_is_rejected(self, document):
        document["placements"][0]["extra"] = 1
        with pytest.raises(ValueError, match="exactly the fields"):
            parse_trace_report(document)

    def test_non_boolean_move_flag_is_rejected(self, document):
        document["placements"][0]["moved_in_stage2"] = 1
        with pytest.raises(ValueError, match="boolean"):
            parse_trace_report(document)

    def test_bucket_outside_its_set_is_rejected(self, document):
        document["placements"][0]["stage3_bucket"] = 9
        with pytest.raises(ValueError, match="outside its set"):
            parse_trace_report(document)

    def test_wrong_histogram_length_is_rejected(self, document):
        document["occupancy3"].append(0)
        with pytest.raises(ValueError, match="occupancy3"):
            parse_trace_report(document)

    def test_mismatched_tally_is_rejected(self, document):
        document["occupancy2"][0] += 1
        document["occupancy2"][1] -= 1
        with pytest.raises(ValueError, match="tally"):
            parse_trace_report(document)

    def test_stage1_counts_outside_the_window_are_rejected(self, document):
        # Shift a token into ring bucket 3, outside the width-3 window,
        # keeping the tally consistent so only the window rule can object.
        document["placements"][0]["stage1_bucket"] = 3
        document["occupancy1"] = [2, 1, 1, 1]
        with pytest.raises(ValueError, match="outside the fill window"):
            parse_trace_report(document)
