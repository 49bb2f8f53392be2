import copy
import io as sio
import json
from pathlib import Path

import pytest

from thimble import io
from thimble.cli import run
from thimble.corelin import InputError
from thimble.examples import BUNDLED

DATA = Path(io.example_path("kronecker.json")).parent


def cli(*argv):
    out, err = sio.StringIO(), sio.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def doc(name):
    return json.loads((DATA / name).read_text())


def test_bundled_list_matches_constructors():
    assert io.bundled_examples() == sorted(BUNDLED)


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_bundled_files_are_canonical(name):
    text = (DATA / name).read_text()
    assert io.emit(BUNDLED[name]()) == text
    assert io.emit(io.parse(text).obj) == text


def test_unknown_key_rejected():
    d = doc("kronecker.json")
    d["payload"]["colour"] = "blue"
    with pytest.raises(InputError, match="colour"):
        io.parse(json.dumps(d))
    d = doc("kronecker.json")
    d["payload"]["generators"][1]["weight"] = 2
    with pytest.raises(InputError, match=r"generators\[1\]"):
        io.parse(json.dumps(d))


def test_non_composable_entry_named():
    d = doc("kronecker.json")
    d["payload"]["ops"] = [{"arity": 2, "inputs": ["x", "y"], "output": ["x"]}]
    with pytest.raises(InputError, match=r"ops\[0\]"):
        io.parse(json.dumps(d))


def test_duplicates_rejected():
    d = doc("kronecker.json")
    d["payload"]["generators"].append(copy.deepcopy(d["payload"]["generators"][0]))
    with pytest.raises(InputError, match="generators"):
        io.parse(json.dumps(d))
    with pytest.raises(InputError, match="duplicate key"):
        io.parse('{"kind": "ainfty_algebra", "kind": "ainfty_algebra", "payload": {}}')


def test_unknown_kind_and_bad_json():
    with pytest.raises(InputError, match="kind"):
        io.parse('{"kind": "sheaf", "payload": {}}')
    with pytest.raises(InputError, match="line 2 column"):
        io.parse('{"kind": "ainfty_algebra",\n  "payload": }')


def test_missing_file():
    with pytest.raises(InputError, match="no such file"):
        io.read("/nonexistent/nothing.json")


def test_bundled_name_resolution():
    assert io.read("examples/kronecker.json").kind == "ainfty_algebra"


def test_cr_arc_mismatch_is_input_error():
    d = doc("constant_strip.json")
    d["payload"]["arcs"][0] += 0.3
    with pytest.raises(InputError, match="arc"):
        io.parse(json.dumps(d))


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------


def test_ainfty_check_example():
    code, out, _ = cli("ainfty", "check", "examples/kronecker.json")
    assert code == 0 and "relations: ok" in out


def test_ext_dim_example():
    code, out, _ = cli("ext", "dim", "--alg", "examples/kronecker.json",
                       "--M", "dual_diagonal", "--N", "diagonal", "--k", "1")
    assert code == 0 and out.strip() == "3"


def test_crindex_examples():
    code, out, _ = cli("crindex", "index", "examples/constant_strip.json")
    assert code == 0 and "index: 0" in out and "deg: -1" in out
    code, out, _ = cli("crindex", "index", "shifted_strip.json")
    assert code == 0 and "index: -1" in out and "injective: yes" in out


def test_crindex_spectrum_and_tol_placement():
    a = cli("crindex", "spectrum", "constant_strip.json", "--k", "2", "--tol", "1e-8")
    b = cli("crindex", "--tol", "1e-8", "spectrum", "constant_strip.json", "--k", "2")
    assert a == b and a[0] == 0
    assert "mu -1.57079632" in a[1] and "mu 1.57079632" in a[1]


@pytest.mark.parametrize("argv,code", [
    (("ainfty", "check", "kronecker.json"), 0),
    (("ainfty", "homology", "kronecker.json"), 0),
    (("bimod", "check", "kronecker_split.json"), 0),
    (("bimod", "check", "kronecker_twisted.json"), 0),
    (("bimod", "qinv", "kronecker_twist_map.json"), 1),
    (("bimod", "delta", "kronecker_twisted.json"), 0),
    (("bimod", "bc", "kronecker_split.json", "--ordinates", "1,0", "--c", "0.5"), 0),
    (("hoch", "homology", "kronecker_split.json"), 0),
    (("hoch", "ext-class", "kronecker_twisted.json"), 0),
    (("hoch", "x", "kronecker_unit_cochain.json"), 0),
    (("hoch", "y", "kronecker_unit_cochain.json"), 0),
    (("bnd", "check", "interval.json"), 0),
    (("bnd", "homology", "interval.json"), 0),
    (("crindex", "spectrum", "shifted_strip.json"), 0),
    (("ainfty", "check", "kronecker_split.json"), 2),
    (("ainfty", "check", "/no/such.json"), 2),
    (("ainfty", "frobnicate", "kronecker.json"), 2),
    (("bimod", "bc", "kronecker_split.json"), 2),
])
def test_exit_codes(argv, code):
    assert cli(*argv)[0] == code


def test_ext_class_reports():
    assert "nontrivial" in cli("hoch", "ext-class", "kronecker_twisted.json")[1]
    assert "extension class: trivial" in cli("hoch", "ext-class", "kronecker_split.json")[1]


def test_bc_total():
    out = cli("bimod", "bc", "kronecker_split.json", "--ordinates", "1,0", "--c", "0.5")[1]
    assert "total: 6" in out


def test_failed_property_exit(tmp_path):
    bad = {"kind": "boundary_algebra", "payload": {
        "n": 0, "unit": "e", "product": [], "D": [["e", "x"]],
        "generators": [{"name": "e", "deg": 0}, {"name": "x", "deg": 1}]}}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(bad))
    code, out, _ = cli("bnd", "check", str(f))
    assert code == 1 and "violation: symmetry" in out


def test_numerical_failure_exit(tmp_path):
    d = doc("constant_strip.json")
    d["payload"]["ends"][0]["a"] = {"samples": [[[0.3, 0.1], [0.1, -0.2]], [[0.5, 0.0], [0.0, 0.4]]]}
    f = tmp_path / "smooth.json"
    f.write_text(json.dumps(d))
    assert cli("crindex", "spectrum", str(f))[0] == 0
    # below machine precision the step doubling cannot converge
    code, _, err = cli("crindex", "spectrum", str(f), "--tol", "1e-15")
    assert code == 3 and "numerical failure" in err


@pytest.mark.parametrize("argv", [
    ("bimod", "delta", "kronecker_twisted.json", "--seed", "4"),
    ("hoch", "x", "kronecker_unit_cochain.json"),
    ("crindex", "spectrum", "constant_strip.json"),
    ("bimod", "dual", "kronecker_split.json"),
])
def test_output_deterministic(argv):
    assert cli(*argv) == cli(*argv)


def test_emitted_output_parses_back():
    code, out, _ = cli("bimod", "dual", "kronecker_twisted.json")
    assert code == 0
    assert io.parse(out).kind == "ainfty_bimodule"
    code, out, _ = cli("hoch", "x", "kronecker_unit_cochain.json")
    assert io.parse(out).kind == "bimodule_hom"
