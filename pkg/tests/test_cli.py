import io
import json
import subprocess
import sys

import pytest

from ctkernel.cli import main

from corpus_tools import CORPUS


class Tty(io.StringIO):
    def isatty(self):
        return True


def run(*argv, stdin="", out_cls=io.StringIO):
    out, err = out_cls(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err, stdin=io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def write(tmp_path):
    def w(text, fname="p.ct"):
        p = tmp_path / fname
        p.write_text(text)
        return str(p)
    return w


def test_check_prints_the_type(write):
    code, out, err = run("check", write("x[y].(close y | wait x.0)"))
    assert code == 0 and err == "" and "x : 1 * bot" in out


def test_check_json_is_a_derivation(write):
    code, out, _ = run("check", "--json", write("close x"))
    doc = json.loads(out)
    assert code == 0 and doc["rule"] == "One"


def test_expect_mismatch(write):
    code, _, err = run("check", write("close x"), "--expect", "x : bot")
    assert code == 1 and err.startswith("CT-ERR:TypeMismatch:")
    assert run("check", write("close x"), "--expect", "x : 1")[0] == 0


@pytest.mark.parametrize("text,code,cls", [
    ("close", 2, "ParseError"),
    ("new (x,y){close x | close y}", 1, "NotDual"),
    ("close x | close x", 1, "NameClash"),
])
def test_error_exit_codes(write, text, code, cls):
    got, out, err = run("check", write(text))
    assert got == code and out == ""
    assert err.startswith(f"CT-ERR:{cls}:") and err.count("\n") == 1


def test_usage_errors():
    for argv in [(), ("frobnicate",), ("check",), ("gen", "--depth", "0"), ("run", "x.ct", "--policy", "odd")]:
        code, _, err = run(*argv)
        assert code == 4 and err.startswith("CT-ERR:Usage:"), argv
    code, _, err = run("check", "/nonexistent/p.ct")
    assert code == 4 and err.startswith("CT-ERR:Io:")


def test_every_error_line_is_tagged(write):
    _, _, err = run("step", write("close x"), "-l", "9")
    assert all(line.startswith("CT-ERR:") for line in err.splitlines()) and err


def test_trans_lists_corpus_transitions():
    code, out, _ = run("trans", str(CORPUS / "par_sync.ct"))
    assert code == 0
    assert out.splitlines() == ["x[]  ==>  0 | wait y.0", "y()  ==>  close x | 0", "<x[],y()>  ==>  0 | 0"]


def test_trans_json_reports_pending_receives():
    code, out, _ = run("trans", "--json", str(CORPUS / "recv_type.ct"))
    doc = json.loads(out)
    assert code == 0 and doc["transitions"] == [] and doc["pending_type_receives"] == ["x"]


def test_step_by_number_and_label_agree(write):
    p = write("close x | wait y.0")
    by_num = run("step", p, "-l", "3")
    by_label = run("step", p, "-l", "<x[],y()>")
    assert by_num == by_label and by_num[1].endswith("final: 0 | 0  ::  (empty)\n")


def test_script_and_interactive_agree(write):
    p = write("close x | wait y.0")
    scripted = run("step", "--json", p, "-l", "1", "-l", "y()")
    interactive = run("step", "--json", p, "-i", stdin="1\ny()\n", out_cls=io.StringIO)
    trace_line = interactive[1].splitlines()[-1].split("> ")[-1]
    assert scripted[0] == interactive[0] == 0
    assert json.loads(scripted[1]) == json.loads(trace_line)


def test_step_type_receive_by_label():
    code, out, _ = run("step", str(CORPUS / "recv_type.ct"), "-l", "x(type 1 * bot)")
    assert code == 0 and "x(u).link [1 * bot] x u" in out


def test_run_reduces_and_reports_budget(write):
    p = write("new (x,y){!x(u).close u | spawn y[y'].?y[a].wait a.?y'[b].wait b.0}")
    code, out, _ = run("run", p)
    assert code == 0 and out.splitlines()[-1] == "tau  ==>  0 | 0 | 0"
    assert len(out.splitlines()) == 6
    code, _, err = run("run", p, "--max-steps", "1")
    assert code == 3 and err.startswith("CT-ERR:BudgetExhausted:")


def test_run_random_policy_is_seeded(write):
    p = write("new (x,y){close x | wait y.0} | new (u,v){close u | wait v.0}")
    assert run("run", p, "--policy", "random", "--seed", "3") == run("run", p, "--policy", "random", "--seed", "3")


def test_explore_terminate_and_budget(write):
    p = write("new (x,y){!x(u).close u | spawn y[y'].?y[a].wait a.?y'[b].wait b.0}")
    code, out, _ = run("explore", "--json", p)
    assert code == 0 and json.loads(out)["steps"]
    code, _, err = run("explore", p, "--budget", "1")
    assert code == 3 and err.startswith("CT-ERR:BudgetExhausted:")


def test_explore_graph(write):
    code, out, _ = run("explore", "--goal", "graph", write("close x | close y"))
    assert code == 0 and out.splitlines()[-1] == "4 states, 4 edges"


def test_gen_is_reproducible():
    a = run("gen", "--seed", "7", "--count", "3", "--json")
    assert a == run("gen", "--seed", "7", "--count", "3", "--json")
    assert [json.loads(l)["seed"] for l in a[1].splitlines()] == [7, 8, 9]


def test_graph_is_dot(write, tmp_path):
    code, out, _ = run("graph", write("close x | close y"))
    assert code == 0 and out.startswith("digraph lts {") and out.count("->") == 4
    target = tmp_path / "g.dot"
    assert run("graph", write("close x | close y"), "-o", str(target))[1] == ""
    assert target.read_text() == out


def test_colour_follows_tty_and_ct_color(write, monkeypatch):
    p = write("close x")
    monkeypatch.setenv("CT_COLOR", "1")
    assert "\x1b[" in run("trans", p, out_cls=Tty)[1]
    monkeypatch.setenv("CT_COLOR", "0")
    assert "\x1b[" not in run("trans", p, out_cls=Tty)[1]
    monkeypatch.delenv("CT_COLOR")
    assert "\x1b[" not in run("trans", p)[1]


def test_console_entry_point(write):
    r = subprocess.run([sys.executable, "-m", "ctkernel.cli", "check", write("wait")], capture_output=True,
                       text=True)
    assert r.returncode == 2 and r.stderr.startswith("CT-ERR:ParseError:")
