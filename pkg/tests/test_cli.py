"""Command-line interface: outputs, exit-code vocabulary, file round trips."""

import json

import numpy as np
import pytest

from maassforms.cli import main
from maassforms.forms import load_form


def run(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def example_form(tmp_path_factory):
    path = tmp_path_factory.mktemp("forms") / "f.json"
    code = run(
        "example", "--level", "1", "--weight", "-2", "--cusp", "inf",
        "--character", "triv", "--nmax", "10", "--out", str(path),
    )
    assert code == 0
    return path


class TestExample:
    def test_writes_form_with_expected_leading_datum(self, example_form):
        form = load_form(example_form)
        assert form.weight == -2 and form.level == 1
        assert abs(form.c_minus_zero - 1.0 / 3.0) < 1e-3

    def test_invalid_cusp_exits_2(self, tmp_path, capsys):
        code = run(
            "example", "--level", "4", "--weight", "-2", "--cusp", "bogus",
            "--character", "triv", "--nmax", "4", "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert "cusp" in capsys.readouterr().err

    def test_nonnegative_weight_exits_2(self, tmp_path):
        code = run(
            "example", "--level", "1", "--weight", "0", "--cusp", "inf",
            "--character", "triv", "--nmax", "4", "--out", str(tmp_path / "x.json"),
        )
        assert code == 2

    def test_parity_mismatch_exits_3(self, tmp_path):
        # quadratic character mod 4 is odd; weight -2 needs an even character
        code = run(
            "example", "--level", "4", "--weight", "-2", "--cusp", "inf",
            "--character", "quadratic", "--nmax", "4", "--out", str(tmp_path / "x.json"),
        )
        assert code == 3

    def test_equivalent_cusp_string_accepted(self, tmp_path):
        # 7/3 reduces to the representative class at level 1
        code = run(
            "example", "--level", "1", "--weight", "-2", "--cusp", "7/3",
            "--character", "triv", "--nmax", "3", "--out", str(tmp_path / "y.json"),
        )
        assert code == 0


class TestVerifyFe:
    def test_exact_pair_passes_default_tolerance(self, tmp_path, capsys):
        from maassforms.eisenstein import harmonic_eisenstein_level_one
        from maassforms.forms import save_form

        path = tmp_path / "exact.json"
        save_form(harmonic_eisenstein_level_one(40), path)
        out = tmp_path / "resid.csv"
        code = run(
            "verify-fe", "--f", str(path), "--g", str(path),
            "--grid=-1:1:3,0:2:2", "--tol", "1e-4", "--out", str(out),
        )
        assert code == 0
        text = out.read_text()
        assert text.splitlines()[0] == "re_s,im_s,lambda_residual,omega_residual,tail_bound"
        assert "PASS" in capsys.readouterr().out

    def test_extracted_pair_passes_truncation_tolerance(self, example_form, capsys):
        # a bound-60 extraction is a ~1e-3-accurate pair; the residual sees
        # exactly that, so the tolerance is the coset tail, not 1e-4
        code = run(
            "verify-fe", "--f", str(example_form), "--g", str(example_form),
            "--grid=-1:1:3,0:2:2", "--tol", "1e-2",
        )
        assert code == 0
        assert "PASS" in capsys.readouterr().out

    def test_corrupted_pair_exits_5(self, example_form, tmp_path):
        data = json.loads(example_form.read_text())
        data["c_plus"][2][0] += 0.1
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        code = run(
            "verify-fe", "--f", str(example_form), "--g", str(bad),
            "--grid=-1:1:3,0:2:2", "--tol", "1e-4",
        )
        assert code == 5

    def test_psi_coprimality_exits_2(self, tmp_path):
        # build a level-5 form file by hand (content irrelevant to the check)
        form = {
            "weight": -2, "level": 5,
            "character": {"modulus": 5, "exponents": [0], "generators": [2]},
            "alpha": 0.0, "n_max": 2,
            "c_plus": [[0.0, 0.0]] * 3, "c_minus_zero": [0.0, 0.0],
            "c_minus": [[0.0, 0.0]] * 2,
        }
        path = tmp_path / "f5.json"
        path.write_text(json.dumps(form))
        code = run(
            "verify-fe", "--f", str(path), "--g", str(path),
            "--psi", "5:quadratic", "--grid", "0:1:2,0:1:2",
        )
        assert code == 2

    def test_twisted_pass(self, tmp_path):
        from maassforms.eisenstein import harmonic_eisenstein_level_one
        from maassforms.forms import save_form

        ref = harmonic_eisenstein_level_one(400)
        path = tmp_path / "ref.json"
        save_form(ref, path)
        code = run(
            "verify-fe", "--f", str(path), "--g", str(path),
            "--psi", "5:quadratic", "--grid=-1:2:2,0:1:2", "--tol", "1e-4",
        )
        assert code == 0


class TestOps:
    def test_shadow_of_pure_plus_form_is_zero(self, tmp_path, capsys):
        form = {
            "weight": -2, "level": 1,
            "character": {"modulus": 1, "exponents": [], "generators": []},
            "alpha": 0.0, "n_max": 2,
            "c_plus": [[1.0, 0.0], [2.0, 0.0], [0.5, 0.0]],
            "c_minus_zero": [0.0, 0.0],
            "c_minus": [[0.0, 0.0]] * 2,
        }
        path = tmp_path / "plus.json"
        path.write_text(json.dumps(form))
        assert run("shadow", "--in", str(path)) == 0
        data = json.loads(capsys.readouterr().out)
        assert all(re == 0 and im == 0 for re, im in data["coefficients"])
        assert data["weight"] == 4

    def test_bol_writes_weight_two_minus_k(self, example_form, tmp_path):
        out = tmp_path / "bol.json"
        assert run("bol", "--in", str(example_form), "--out", str(out)) == 0
        data = json.loads(out.read_text())
        assert data["weight"] == 4

    def test_twist_round_trip(self, example_form, tmp_path):
        out = tmp_path / "twisted.json"
        assert run("twist", "--in", str(example_form), "--psi", "5:quadratic",
                   "--out", str(out)) == 0
        tw = load_form(out)
        assert tw.level == 25
        assert tw.c_minus_zero == 0

    def test_eval_and_extract(self, example_form, capsys):
        assert run("eval", "--in", str(example_form), "--tau", "0.3+0.7j") == 0
        out = capsys.readouterr().out
        assert "f(" in out and "tail" in out
        assert run("extract", "--in", str(example_form), "--n", "1") == 0
        out = capsys.readouterr().out
        assert "c+(1)" in out

    def test_eval_rejects_lower_half_plane(self, example_form):
        assert run("eval", "--in", str(example_form), "--tau", "0.3-0.7j") == 3

    def test_cusps_json(self, capsys):
        assert run("cusps", "--level", "6") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["N"] == 6
        assert len(data["cusps"]) == 4
        labels = {c["repr"] for c in data["cusps"]}
        assert "inf" in labels
        widths = {c["repr"]: c["width"] for c in data["cusps"]}
        assert widths["0/1"] == 6

    def test_dim(self, capsys):
        assert run("dim", "--level", "4", "--character", "triv") == 0
        assert capsys.readouterr().out.strip() == "3"

    def test_json_bit_exact_round_trip(self, example_form, tmp_path):
        form = load_form(example_form)
        again = tmp_path / "copy.json"
        from maassforms.forms import save_form

        save_form(form, again)
        form2 = load_form(again)
        assert np.array_equal(form.c_plus, form2.c_plus)
        assert np.array_equal(form.c_minus, form2.c_minus)
        assert form.c_minus_zero == form2.c_minus_zero


class TestSelfcheck:
    def test_selfcheck_passes(self, capsys):
        assert run("selfcheck") == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out
        assert "FAIL" not in out
