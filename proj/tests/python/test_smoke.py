import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import bolab

CONFIG_DIR = Path(os.environ.get("BOLAB_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


def test_grid_and_kappa():
    g = bolab.build_grid(-1.0, 1.0, 9)
    assert g.n == 9
    assert g.h == pytest.approx(0.2)
    assert np.allclose(g.points(), np.linspace(-0.8, 0.8, 9))
    assert 0.1494 <= bolab.kappa(bolab.harmonic(2000.0)) <= 0.1496
    modes = bolab.analytic_normal_modes(bolab.harmonic(1.0))
    assert modes.ground_energy == pytest.approx(math.sqrt(5.0) / 2.0)


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        bolab.harmonic(-1.0)
    with pytest.raises(ValueError):
        bolab.build_grid(1.0, -1.0, 10)


def test_pipeline_matches_exact_for_separable_model():
    spec = bolab.separable(20.0)
    g1 = bolab.build_grid(-3.0, 3.0, 30)
    g2 = bolab.build_grid(-7.0, 7.0, 40)
    field = bolab.scan_pes(spec, g1, g2, 2)
    assert field.lambdas.shape == (2, 30)
    assert field.psi(0).shape == (30, 40)
    nuc = bolab.solve_nuclear(field, spec, 0, 2)
    assert nuc.thetas.shape == (30, 2)
    exact = bolab.solve_exact(spec, g1, g2, 1)
    assert nuc.energies[0] == pytest.approx(exact.energies[0], rel=1e-10)
    assert bolab.effective_energies(field, spec, 1, 1)[0] == pytest.approx(exact.energies[0], rel=1e-10)


def test_uncertainty_of_gaussian():
    g = bolab.build_grid(-10.0, 10.0, 399)
    x = g.points()
    f = np.exp(-x * x / 2)
    f /= math.sqrt(g.h) * np.linalg.norm(f)
    r = bolab.uncertainty_product(g, f)
    assert abs(r["product"] - 0.5) < 1e-3
    assert r["bound_ok"]


def test_compare_report_as_dict():
    text = (CONFIG_DIR / "separable.json").read_text()
    report = bolab.compare(text)
    assert report["rows"][0]["relative_error"] <= 1e-8
    with pytest.raises(ValueError):
        bolab.compare(json.dumps({"schema_version": 2}))


def test_run_command(tmp_path):
    code, log = bolab.run("pes", str(CONFIG_DIR / "separable.json"), out=str(tmp_path))
    assert code == 0
    assert (tmp_path / "pes.csv").read_text().startswith("x1,lambda_0")
    assert "wrote" in log
    code, _ = bolab.run("nope", str(CONFIG_DIR / "separable.json"))
    assert code == 1
