import json
import subprocess
import sys

from braidforge.fixtures import fixture_path

THETA = str(fixture_path("theta"))
PATHG = str(fixture_path("path"))


def run_cli(*argv, env=None):
    import os
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([sys.executable, "-m", "braidforge.cli", *argv],
                          capture_output=True, text=True, env=full_env)


def test_present_theta_n2_text():
    out = run_cli("present", THETA, "-n", "2")
    assert out.returncode == 0
    assert out.stdout.strip() == \
        "⟨{e(1,8),2}, {e(1,11),2}, {e(5,9),6} | ⟩"


def test_present_path_trivial():
    out = run_cli("present", PATHG, "-n", "2")
    assert out.returncode == 0
    assert out.stdout.strip() == "⟨ | ⟩"


def test_h1_theta_n4():
    out = run_cli("h1", THETA, "-n", "4")
    assert out.returncode == 0
    assert out.stdout.strip() == "Z^3"


def test_json_outputs_are_byte_identical(tmp_path):
    a = run_cli("present", THETA, "-n", "3", "--json")
    b = run_cli("present", THETA, "-n", "3", "--json")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    payload = json.loads(a.stdout)
    assert payload["manifest"]["command"] == "present"
    assert payload["manifest"]["version"]
    assert list(payload["manifest"]["inputs"]) == ["graph"]
    assert payload["manifest"]["parameters"]["particles"] == 3
    assert payload["generators"][2] == "{e(5,9),1,6}"
    assert payload["tree_conditions"]["t3"] == "unverified"


def test_json_file_plus_text(tmp_path):
    out_file = tmp_path / "pres.json"
    r = run_cli("present", THETA, "-n", "2", "--json", str(out_file))
    assert r.returncode == 0
    assert r.stdout.strip().startswith("⟨")
    data = json.loads(out_file.read_text())
    assert data["relators"] == []


def test_exit_codes():
    assert run_cli("nonsense").returncode == 1                 # usage
    assert run_cli("present", THETA).returncode == 1           # missing -n
    assert run_cli("present", "missing.json", "-n", "2").returncode == 2
    assert run_cli("present", THETA, "-n", "6").returncode == 2   # subdivision
    r = run_cli("present", THETA, "-n", "3", "--max-steps", "1")
    assert r.returncode == 3                                   # rewrite bound


def test_subdivide_roundtrip(tmp_path):
    raw = tmp_path / "raw_theta.json"
    raw.write_text(json.dumps({"vertices": [1, 2],
                               "edges": [[1, 2], [1, 2], [1, 2]],
                               "tree_edges": [[1, 2]], "root": 1}))
    out_file = tmp_path / "sub.json"
    r = run_cli("subdivide", str(raw), "-n", "5", "--json", str(out_file))
    assert r.returncode == 0
    data = json.loads(out_file.read_text())["graph"]
    assert len(data["vertices"]) == 11
    graph_file = tmp_path / "graph.json"
    graph_file.write_text(json.dumps(data))
    r2 = run_cli("present", str(graph_file), "-n", "5")
    assert r2.returncode == 0
    assert r2.stdout.count("e(") >= 10


def test_cells_listing():
    r = run_cli("cells", THETA, "-n", "2", "--dim", "1", "--kind", "critical")
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("{e(1,8),2}")
    assert "critical" in lines[0]


def test_minimal_and_oracle():
    r = run_cli("minimal", THETA, "-n", "4", "--json")
    assert r.returncode == 0
    data = json.loads(r.stdout)
    assert len(data["generators"]) == 3
    assert data["h1"] == "Z^3"
    assert data["target_reached"] is True

    o = run_cli("oracle", THETA, "-n", "2", "--json")
    assert o.returncode == 0
    odata = json.loads(o.stdout)
    assert odata["h1"] == "Z^3"


def test_stabilize_output():
    r = run_cli("stabilize", THETA, "--from", "2", "--to", "4", "--json")
    assert r.returncode == 0
    data = json.loads(r.stdout)
    assert [row["n"] for row in data["rows"]] == [2, 3, 4]
    assert data["rows"][2]["lifting_ok"] is True
    assert data["rows"][2]["minimized_generators"] == 3


def test_physical_and_locally_abelian(tmp_path):
    loops = tmp_path / "loops.json"
    loops.write_text(json.dumps({"loops": [
        {"type": "Y", "k": 4, "m": 6, "n": 9, "spectators": [1, 2]},
        {"type": "Y", "k": 4, "m": 6, "n": 9, "spectators": [1, 10]},
        {"type": "Y", "k": 4, "m": 6, "n": 9, "spectators": [10, 11]},
        {"type": "O", "cycle": [1, 2, 3, 4, 5, 6, 7, 8], "spectators": [9, 10, 11]},
        {"type": "O", "cycle": [5, 6, 7, 8, 1, 11, 10, 9], "spectators": [2, 3, 4]},
    ]}))
    r = run_cli("physical", THETA, "-n", "4", "--loops", str(loops), "--json")
    assert r.returncode == 0
    data = json.loads(r.stdout)
    assert len(data["generators"]) == 5
    assert len(data["relators"]) == 3
    assert len(data["dictionary"]) == 5

    la = run_cli("locally-abelian", THETA, "-n", "4", "--loops", str(loops), "--json")
    assert la.returncode == 0
    ldata = json.loads(la.stdout)
    assert ldata["constraints"] == [[1, -1, 0], [0, 1, -1]]
    assert ldata["residual_relators"] == []

    # unsolvable loop set exits with computation failure
    few = tmp_path / "few.json"
    few.write_text(json.dumps({"loops": [
        {"type": "Y", "k": 4, "m": 6, "n": 9, "spectators": [1, 2]}]}))
    bad = run_cli("physical", THETA, "-n", "4", "--loops", str(few))
    assert bad.returncode == 3
    assert "unsolved" in bad.stderr


def test_rep_solve_and_verify(tmp_path):
    pres = tmp_path / "minimal.json"
    r = run_cli("minimal", THETA, "-n", "4", "--json", str(pres))
    assert r.returncode == 0

    solved = tmp_path / "assignment.json"
    r2 = run_cli("rep-solve", str(pres), "-k", "2", "--seed", "0",
                 "--json", str(solved))
    assert r2.returncode == 0
    blob = json.loads(solved.read_text())
    assert blob["max_deviation"] < 1e-8

    assignment = tmp_path / "a.json"
    assignment.write_text(json.dumps(blob["assignment"]))
    r3 = run_cli("rep-verify", str(pres), str(assignment), "--tol", "1e-8")
    assert r3.returncode == 0
    assert "PASS" in r3.stdout

    # and an assignment that fails: non-monomial conjugator next to a
    # nondegenerate diagonal exchange matrix
    s = 0.7071067811865476
    bad = {"k": 2, "matrices": {
        "{e(5,9),1,2,6}": [[1, 0], [0, 0], [0, 0], [0, 1]],   # diag(1, i)
        "{e(1,8),2,3,4}": [[s, 0], [s, 0], [s, 0], [-s, 0]],  # Hadamard
        "{e(1,11),2,3,4}": [[1, 0], [0, 0], [0, 0], [1, 0]],  # identity
    }}
    bad_file = tmp_path / "bad.json"
    bad_file.write_text(json.dumps(bad))
    r4 = run_cli("rep-verify", str(pres), str(bad_file), "--tol", "1e-8")
    assert r4.returncode == 3
    assert "FAIL" in r4.stdout


def test_rep_solve_determinism_with_threads(tmp_path):
    pres = tmp_path / "minimal.json"
    run_cli("minimal", THETA, "-n", "4", "--json", str(pres))
    a = run_cli("rep-solve", str(pres), "-k", "2", "--seed", "3",
                "--restarts", "4", "--json")
    b = run_cli("rep-solve", str(pres), "-k", "2", "--seed", "3",
                "--restarts", "4", "--json", env={"BRAIDFORGE_THREADS": "2"})
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
