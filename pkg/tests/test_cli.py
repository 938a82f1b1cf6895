import json
import subprocess
import sys

import pytest

from qkc.cli import main
from qkc.gatesets import builtin_gateset
from qkc.ir import validate
from qkc.textformat import parse


def qk(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_check_ok(capsys, program_path):
    code, out, _ = qk(capsys, "check", program_path("bell_rus"))
    assert code == 0 and "ok" in out


def test_check_toy_program_with_gateset_flag(capsys, tmp_path):
    f = write(tmp_path, "t.qk", "allocate q1:\n  allocate q2:\n    mix q2\n    entangle q2 q1\n  measure done\nmeasure done\n")
    assert qk(capsys, "check", f, "--gateset", "toy")[0] == 0
    code, _, err = qk(capsys, "check", f)
    assert code == 1 and "gate set" in err


def test_check_duplicate_target(capsys, tmp_path):
    f = write(tmp_path, "bad.qk", "@gateset cliffords\nallocate q:\n  cx q q\nmeasure done\n")
    code, _, err = qk(capsys, "check", f)
    assert code == 1 and "duplicate target" in err


def test_missing_file_is_io_error(capsys, tmp_path):
    assert qk(capsys, "check", str(tmp_path / "nope.qk"))[0] == 2
    assert qk(capsys, "run", str(tmp_path / "nope.qk"))[0] == 2


def test_parse_error_is_user_error(capsys, tmp_path):
    f = write(tmp_path, "p.qk", "allocate q:\n  h q\n")
    code, _, err = qk(capsys, "check", f)
    assert code == 1 and "line" in err


def test_compile_rep3bit_and_manifest(capsys, tmp_path, program_path):
    out_file, man = tmp_path / "c.qk", tmp_path / "m.json"
    code, _, _ = qk(capsys, "compile", program_path("bell_rus"), "--pipeline", "rep3bit",
                    "--out", str(out_file), "--manifest", str(man))
    assert code == 0
    prog = parse(out_file.read_text())
    assert prog.gateset == "cliffords" and validate(prog, builtin_gateset("cliffords")) == []
    manifest = json.loads(man.read_text())
    assert manifest["callbacks"]["rep3bit.repeat_until_zero"] == ["rep3bit", "repeat_until_zero"]
    assert manifest["pipeline"] == ["rep3bit"]


def test_compile_full_shor_pipeline_revalidates(capsys, program_path):
    code, out, _ = qk(capsys, "compile", program_path("fix_test"), "--pipeline", "toy2cliffords,rep3bit,rep3phase,h2")
    assert code == 0
    prog = parse(out)
    assert prog.gateset == "trapped-ion" and validate(prog, builtin_gateset("trapped-ion")) == []


def test_compile_empty_pipeline_echoes_canonically(capsys, tmp_path):
    f = write(tmp_path, "b.qk", "@gateset cliffords\nallocate q1:\n    allocate q2:\n        h q2; cx q2 q1\n    measure done\nmeasure repeat_until_zero\n")
    code, out, _ = qk(capsys, "compile", f)
    assert code == 0 and out.splitlines()[3] == "    h q2"


def test_compile_errors(capsys, program_path):
    assert qk(capsys, "compile", program_path("fix_test"), "--pipeline", "bogus")[0] == 1
    code, _, err = qk(capsys, "compile", program_path("fix_test"), "--pipeline", "rep3bit")
    assert code == 1 and "expects gate set" in err


def test_run_formats_and_determinism(capsys, program_path):
    args = ["run", program_path("bell_rus"), "--shots", "300", "--seed", "9"]
    code, js, _ = qk(capsys, *args, "--format", "json")
    assert code == 0
    hist = json.loads(js)
    assert sum(hist.values()) == 300 and all(k.startswith("0") for k in hist)
    assert qk(capsys, *args, "--format", "json")[1] == js
    assert qk(capsys, *args, "--format", "json", "--threads", "3")[1] == js
    csv_out = qk(capsys, *args, "--format", "csv")[1].splitlines()
    assert csv_out[0] == "bitstring,count" and len(csv_out) == len(hist) + 1
    assert qk(capsys, *args, "--format", "text")[1].split()[0] == "0"


def test_run_empty_kernel(capsys, program_path):
    code, out, _ = qk(capsys, "run", program_path("empty"), "--shots", "10", "--format", "json")
    assert code == 0 and json.loads(out) == {"0": 10}


def test_run_with_noise_and_pipeline(capsys, program_path):
    code, out, _ = qk(capsys, "run", program_path("flip_one"), "--pipeline", "rep3bit", "--shots", "200",
                      "--noise", "0,0,0,0.05", "--format", "json")
    assert code == 0 and set(json.loads(out)) <= {"0", "1"}
    assert qk(capsys, "run", program_path("flip_one"), "--noise", "0.1,2,0,0")[0] == 1
    assert qk(capsys, "run", program_path("flip_one"), "--shots", "0")[0] == 1


def test_unregistered_callback(capsys, tmp_path):
    f = write(tmp_path, "u.qk", "@gateset cliffords\nallocate q:\nmeasure my_decoder\n")
    code, _, err = qk(capsys, "run", f)
    assert code == 1 and "my_decoder" in err and "library" in err


def test_trace_records(capsys, program_path):
    code, out, _ = qk(capsys, "trace", program_path("empty"))
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert len(recs) == 1 and recs[0]["rule"] == "EndDone" and recs[0]["mstack"] == [0]
    code, out, _ = qk(capsys, "trace", program_path("bell_rus"), "--seed", "1")
    measured = [json.loads(line) for line in out.splitlines() if json.loads(line)["bit"] is not None]
    assert len(measured) % 2 == 0 and measured[-1]["mstack"][0] == 0


def test_trace_compiled_bell_has_six_measurements_per_round(capsys, program_path):
    code, out, _ = qk(capsys, "trace", program_path("bell_rus"), "--pipeline", "rep3bit", "--seed", "1")
    recs = [json.loads(line) for line in out.splitlines()]
    measured = [r for r in recs if r["bit"] is not None]
    assert code == 0 and len(measured) % 6 == 0
    # after the wrapped done decodes, the stack holds one logical bit
    first_round = measured[:6]
    assert [r["callback"] for r in first_round] == ["done", "done", "rep3bit.done", "done", "done", "rep3bit.repeat_until_zero"]
    assert len(first_round[2]["mstack"]) == 1


def test_console_script_entry_point(program_path):
    res = subprocess.run([sys.executable, "-m", "qkc.cli", "check", program_path("empty")],
                         capture_output=True, text=True)
    assert res.returncode == 0
