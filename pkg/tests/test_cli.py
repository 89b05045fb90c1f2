import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mmtri.cli import dumps_json, main

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "mmtri" / "schemas"


def run_cli(args, out_path):
    code = main(args + ["--out", str(out_path)])
    return code, out_path.read_text() if out_path.exists() else None


def validate(payload, schema_name):
    if jsonschema is None:
        pytest.skip("jsonschema not installed")
    schema = json.loads((SCHEMA_DIR / f"{schema_name}.schema.json").read_text())
    jsonschema.validate(payload, schema)


@pytest.fixture()
def sphere_spec(tmp_path):
    path = tmp_path / "sphere.json"
    path.write_text(json.dumps({"type": "sphere", "dim": 2, "curvature": 1.0}))
    return path


@pytest.fixture()
def plane_spec(tmp_path):
    path = tmp_path / "plane.json"
    path.write_text(json.dumps({"type": "euclidean", "dim": 2, "extent": 8.0}))
    return path


# ---------------------------------------------------------------------------
# serializer

def test_dumps_json_float_format():
    text = dumps_json({"x": 1.0 / 3.0, "i": 4, "b": True, "n": None, "s": "a\"b"})
    assert "0.33333333333333331" in text
    assert '"s": "a\\"b"' in text
    assert json.loads(text) == {"x": 1.0 / 3.0, "i": 4, "b": True, "n": None, "s": 'a"b'}
    assert dumps_json(float("inf")) == "null"
    assert dumps_json(np.float64(2.5)) == "2.5"
    assert dumps_json(np.arange(3)) == "[\n  0,\n  1,\n  2\n]"


# ---------------------------------------------------------------------------
# bounds

def test_bounds_example_values(tmp_path):
    code, text = run_cli(
        ["bounds", "--K", "0", "--N", "2", "--D", "2", "--eps", "1"], tmp_path / "b.json"
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["n1"] == 16
    assert payload["n2"] == 81
    validate(payload, "bounds")


def test_bounds_spherical_regime_nulls(tmp_path):
    code, text = run_cli(
        ["bounds", "--K", "1", "--N", "2", "--D", "3.14159", "--eps", "0.4"],
        tmp_path / "b.json",
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["net_card_bound"] is None
    assert payload["degree_bound"] is None
    validate(payload, "bounds")


def test_bounds_domain_error_exit_2(capsys):
    # 9 eps/2 beyond the spherical domain
    assert main(["bounds", "--K", "1", "--N", "2", "--D", "3.1", "--eps", "0.8"]) == 2
    assert "domain error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# exit codes and validation

def test_missing_seed_is_validation_error(capsys, sphere_spec):
    code = main(["net", "--space", str(sphere_spec), "--eps", "0.4", "--samples", "100"])
    assert code == 1
    assert "--seed" in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 1


def test_malformed_space_spec(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(["net", "--space", str(bad), "--eps", "0.4", "--samples", "10",
                 "--seed", "1"])
    assert code == 1


# ---------------------------------------------------------------------------
# net + compare-patterns

def test_net_report_and_schema(tmp_path, sphere_spec):
    out = tmp_path / "net.json"
    code, text = run_cli(
        ["net", "--space", str(sphere_spec), "--eps", "0.5", "--samples", "2000",
         "--seed", "3", "--with-distances"], out
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "net")
    assert payload["n_centers"] == len(payload["centers"])
    assert payload["separation"] >= 0.5
    assert payload["covering"] <= 0.5
    assert len(payload["center_distances"]) == payload["n_centers"]


def test_compare_patterns_self_and_audit(tmp_path, sphere_spec):
    out = tmp_path / "net.json"
    run_cli(["net", "--space", str(sphere_spec), "--eps", "0.5", "--samples", "2000",
             "--seed", "3", "--with-distances"], out)
    res = tmp_path / "cmp.json"
    code, text = run_cli(
        ["compare-patterns", "--net-a", str(out), "--net-b", str(out),
         "--C", "2", "--K", "1", "--N", "2", "--D", "3.141592653589793"], res
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "compare_patterns")
    assert payload["identical"] is True
    assert payload["violations"] == []
    # audit without distances fails validation
    stripped = json.loads(out.read_text())
    stripped["center_distances"] = None
    out2 = tmp_path / "net2.json"
    out2.write_text(json.dumps(stripped))
    assert main(["compare-patterns", "--net-a", str(out2), "--net-b", str(out2),
                 "--C", "2", "--K", "1", "--N", "2", "--D", "3.14"]) == 1


# ---------------------------------------------------------------------------
# triangulate

def test_triangulate_outputs(tmp_path, sphere_spec):
    out = tmp_path / "tri.json"
    prefix = tmp_path / "mesh"
    code, text = run_cli(
        ["triangulate", "--space", str(sphere_spec), "--eps", "0.7", "--samples", "2000",
         "--seed", "4", "--out-prefix", str(prefix)], out
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "triangulate")
    assert payload["off_file"] is not None
    off = Path(payload["off_file"]).read_text().splitlines()
    assert off[0] == "OFF"
    nv, nf, _ = map(int, off[1].split())
    assert nv == payload["n_vertices"]
    assert nf == payload["simplex_counts"]["2"]
    listing = Path(payload["simplex_list_file"]).read_text().splitlines()
    assert len(listing) == sum(payload["simplex_counts"].values())


# ---------------------------------------------------------------------------
# discretize

def test_discretize_outputs(tmp_path, plane_spec):
    out = tmp_path / "disc.json"
    prefix = tmp_path / "disc"
    code, text = run_cli(
        ["discretize", "--space", str(plane_spec), "--eps", "0.8", "--samples", "8000",
         "--seed", "5", "--pairs", "500", "--out-prefix", str(prefix)], out
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "discretize")
    assert payload["rough_isometry"]["violations"] == []
    assert payload["rho0"] <= payload["degree_bound"]
    edges = Path(payload["edges_file"]).read_text().splitlines()
    assert len(edges) == payload["n_edges"]
    masses = Path(payload["masses_file"]).read_text().splitlines()
    assert masses[0] == "index,mass"
    total = sum(float(line.split(",")[1]) for line in masses[1:])
    assert total == pytest.approx(payload["mass_total"], rel=1e-12)
    assert payload["mass_total"] == pytest.approx(64.0, rel=1e-9)  # side 8 square


# ---------------------------------------------------------------------------
# growth

def test_growth_space_and_graph(tmp_path, plane_spec):
    out = tmp_path / "growth.json"
    code, text = run_cli(
        ["growth", "--space", str(plane_spec), "--rmax", "3.5", "--grid-points", "10",
         "--budget", "30000", "--seed", "6", "--r0", "1.0", "--V0", "2.0"], out
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "growth")
    assert payload["kind"] == "space"
    assert payload["non_collapsing"]["holds"] is True

    edges = tmp_path / "edges.txt"
    edges.write_text("".join(f"{i} {i+1}\n" for i in range(40)))  # path graph
    out2 = tmp_path / "growth2.json"
    code, text = run_cli(
        ["growth", "--graph", str(edges), "--rmax", "12", "--grid-points", "12",
         "--base", "20"], out2
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "growth")
    assert payload["kind"] == "graph"
    assert payload["classification"] == "polynomial"  # V = 2 rho + 1 on a path
    assert abs(payload["exponent"] - 1.0) < 0.3

    assert main(["growth", "--rmax", "3"]) == 1  # neither input
    assert main(["growth", "--space", str(plane_spec), "--graph", str(edges),
                 "--rmax", "3"]) == 1  # both inputs


# ---------------------------------------------------------------------------
# fisher-embed

def test_fisher_embed_example(tmp_path):
    out = tmp_path / "emb.json"
    code, text = run_cli(["fisher-embed", "--p", "0.5,0.5"], out)
    assert code == 0
    payload = json.loads(text)
    validate(payload, "fisher_embed")
    root2 = 1.4142135623730951
    assert payload["embedding"] == [root2, root2]
    assert payload["sum_of_squares"] == pytest.approx(4.0, abs=1e-12)
    assert main(["fisher-embed", "--p", "1.0,0.0"]) == 1  # boundary rejected


# ---------------------------------------------------------------------------
# verify-bg

def test_verify_bg_exact_and_mc(tmp_path, sphere_spec):
    out = tmp_path / "bg.json"
    code, text = run_cli(
        ["verify-bg", "--space", str(sphere_spec), "--rmax", "3.0", "--grid-points", "10",
         "--seed", "7", "--exact"], out
    )
    assert code == 0
    payload = json.loads(text)
    validate(payload, "verify_bg")
    assert payload["method"] == "closed_form"
    assert payload["passed"] is True
    code, text = run_cli(
        ["verify-bg", "--space", str(sphere_spec), "--rmax", "3.0", "--grid-points", "8",
         "--seed", "7", "--budget", "50000"], out
    )
    payload = json.loads(text)
    assert payload["method"] == "monte_carlo"
    assert payload["passed"] is True
    # domain error: grid beyond the spherical diameter
    assert main(["verify-bg", "--space", str(sphere_spec), "--rmax", "4.0",
                 "--grid-points", "8", "--seed", "7", "--exact"]) == 2


# ---------------------------------------------------------------------------
# determinism

SUBCOMMAND_MATRIX = [
    ("bounds", ["bounds", "--K", "0", "--N", "2", "--D", "2", "--eps", "0.5", "--C", "2"]),
    ("net", ["net", "--space", "SPHERE", "--eps", "0.5", "--samples", "1500",
             "--seed", "11", "--with-distances"]),
    ("triangulate", ["triangulate", "--space", "SPHERE", "--eps", "0.6", "--samples", "1500",
                     "--seed", "12", "--out-prefix", "PREFIX"]),
    ("discretize", ["discretize", "--space", "PLANE", "--eps", "0.9", "--samples", "5000",
                    "--seed", "13", "--pairs", "300", "--out-prefix", "PREFIX"]),
    ("growth", ["growth", "--space", "PLANE", "--rmax", "3.0", "--grid-points", "8",
                "--budget", "20000", "--seed", "14"]),
    ("fisher-embed", ["fisher-embed", "--p", "0.2,0.3,0.5"]),
    ("verify-bg", ["verify-bg", "--space", "SPHERE", "--rmax", "2.5", "--grid-points", "8",
                   "--seed", "15", "--budget", "20000"]),
]


@pytest.mark.parametrize("name,argv", SUBCOMMAND_MATRIX)
def test_subcommand_determinism(tmp_path, sphere_spec, plane_spec, name, argv):
    outs = []
    for run in (1, 2):
        out = tmp_path / f"{name}_{run}.json"
        args = [
            str(sphere_spec) if a == "SPHERE" else
            str(plane_spec) if a == "PLANE" else
            str(tmp_path / f"{name}_pfx") if a == "PREFIX" else a
            for a in argv
        ]
        code, text = run_cli(args, out)
        assert code == 0
        outs.append(text)
    assert outs[0] == outs[1]


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "b.json"
    proc = subprocess.run(
        ["mmtri", "bounds", "--K", "0", "--N", "2", "--D", "2", "--eps", "1",
         "--out", str(out)],
        capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["n1"] == 16


def test_determinism_across_backends(tmp_path, plane_spec):
    """The numpy fallback must reproduce the numba output byte for byte on
    euclidean payloads (identical reduction orders)."""
    script = (
        "import sys; from mmtri.cli import main; sys.exit(main(sys.argv[1:]))"
    )
    outs = []
    for flag in ("1", "0"):
        out = tmp_path / f"backend_{flag}.json"
        env = dict(os.environ, MMTRI_NUMBA=flag)
        subprocess.run(
            [sys.executable, "-c", script, "net", "--space", str(plane_spec),
             "--eps", "1.0", "--samples", "3000", "--seed", "21", "--out", str(out)],
            check=True, env=env, timeout=600,
        )
        outs.append(out.read_text())
    assert outs[0] == outs[1]
