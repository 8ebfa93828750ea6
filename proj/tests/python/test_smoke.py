import math

import numpy as np
import pytest

import feller_kit as fk


def test_catalog_labels():
    names = [e["name"] for e in fk.catalog()]
    assert names == sorted(names)
    labels = {e["name"]: e["expected_feller"] for e in fk.catalog()}
    assert labels["non-feller-drift"] is False
    assert labels["two-state"] is True


def test_two_state_closed_form():
    fam = fk.two_state(1.0, 1.0)
    u = fam.semigroup(0.5, np.array([1.0, 0.0]))
    assert u[0] == pytest.approx((1 + math.exp(-1.0)) / 2, abs=1e-15)
    r, err = fam.resolvent(256.0, np.array([1.0, 0.0]))
    assert err == 0.0
    assert np.max(np.abs(256.0 * r - np.array([1.0, 0.0]))) == pytest.approx(1 / 258, abs=1e-12)


def test_expm_and_generator_roundtrip():
    q = np.array([[-2.0, 2.0], [1.0, -1.0]])
    fam = fk.from_generator(q)
    assert np.array_equal(fam.generator, q)
    p = fk.expm(q)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-14)
    with pytest.raises(ValueError):
        fk.from_generator(np.array([[1.0, -1.0], [0.0, 0.0]]))


def test_invert_zero_generator():
    fam = fk.from_generator(np.zeros((3, 3)))
    f = np.array([1.0, -0.5, 0.25])
    out = fk.invert(fam, f, lam=2.0, t=0.5)
    assert np.allclose(out["value"], (1 - math.exp(-math.e)) * f, rtol=0, atol=1e-12)


def test_inversion_sweep_decreases():
    fam = fk.two_state(1.0, 1.0)
    sweep = fk.inversion_sweep(fam, 0.25, np.array([1.0, 0.0]), [1, 2, 4, 8, 16])
    errs = [row["sup_error"] for row in sweep]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 2e-2


def test_cancellation_error_is_raised():
    fam = fk.heat_kernel(2.0, 0.1)
    with pytest.raises(fk.CancellationError):
        fk.invert(fam, np.full(fam.size, 0.5), lam=14.0, t=0.25)


def test_battery_verdicts():
    rep = fk.check("two-state")
    assert rep["equivalence_consistent"] and rep["verdict_matches_expected"]
    drift = fk.check("non-feller-drift")
    assert all(not c["pass"] for c in drift["checks"] if c["id"].startswith("thm_"))
    custom = fk.battery(fk.birth_death(10), t_grid=[1.0, 0.1], lambda_grid=[1.0, 10.0])
    assert custom["grid"]["points"] == 10


def test_cli_in_process():
    code, out, err = fk.cli("list")
    assert code == 0 and "two-state" in out
    code, out, err = fk.cli("check", "--process", "two-state", "--bogus")
    assert code == 1 and err
