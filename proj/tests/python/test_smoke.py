import math

import pytest

import mbpi


@pytest.fixture
def recurrent():
    return mbpi.ModelSpec(mbpi.make_stable_offspring(0.5, 1.0), mbpi.make_stable_immigration(0.75, 0.25))


@pytest.fixture
def transient():
    return mbpi.ModelSpec(mbpi.make_stable_offspring(0.75, 1.0), mbpi.make_stable_immigration(0.5, 0.25))


def test_law_coefficients():
    a = mbpi.make_stable_offspring(0.5, 1.0)
    assert a.coefficients[0] == pytest.approx(1.0)
    assert a.coefficients[2] == pytest.approx(0.375)
    assert a.validate()
    assert a(0.5) == pytest.approx(0.5**1.5)


def test_kernel_closed_forms(recurrent, transient):
    assert mbpi.compute_F(recurrent, 2.0, 0.0).real == pytest.approx(0.75, rel=1e-10)
    assert mbpi.compute_P(recurrent, 2.0, 0.0).real == pytest.approx(0.74610180607990217, rel=1e-10)
    assert mbpi.compute_P(recurrent, 0.0, 0.5, i=3).real == pytest.approx(0.125)
    p = mbpi.compute_P(transient, 100.0, 0.0).real
    assert math.log(p) == pytest.approx(1.0 - 76.0 ** (1.0 / 3.0), rel=1e-9)


def test_transition_row(recurrent):
    row = mbpi.transition_probs(recurrent, 0, 1.0)
    assert len(row) == 64
    assert row[1] == pytest.approx(0.094818901296447901, abs=1e-9)


def test_limits(recurrent, transient):
    assert mbpi.compute_U(recurrent, 0.0).real == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert mbpi.compute_B(transient, 0.3) == pytest.approx(1.0, rel=1e-12)
    assert mbpi.compute_pi(transient, 0.0) == pytest.approx(math.e, rel=1e-12)
    u = mbpi.invariant_measure(recurrent)
    assert u[1] / u[0] == pytest.approx(0.25, rel=1e-9)


def test_rate_slope(recurrent):
    slope, predicted, r2 = mbpi.rate_slope(recurrent)
    assert predicted == pytest.approx(-0.5)
    assert abs(slope - predicted) < 0.1
    assert r2 > 0.999


def test_errors(recurrent, transient):
    with pytest.raises(mbpi.DomainError):
        mbpi.make_stable_offspring(1.5, 1.0)
    with pytest.raises(mbpi.PreconditionError):
        mbpi.compute_U(transient, 0.0)
    with pytest.raises(mbpi.DomainError):
        mbpi.compute_F(recurrent, 1.0, 2.0)


def test_simulation_reproducible(recurrent):
    a = mbpi.simulate_pmf(recurrent, 0, 2.0, 500, seed=3)
    b = mbpi.simulate_pmf(recurrent, 0, 2.0, 500, seed=3)
    assert a == b
    assert sum(a[0]) == pytest.approx(1.0)


def test_cli_entry(tmp_path):
    assert "d/c = |gamma|" in mbpi.list_families()
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[task]\nname = validate\n[offspring]\nfamily = stable\nc = 1\n")
    code, _, err = mbpi.run(str(cfg), str(tmp_path / "out"))
    assert code == 2
    assert "nu" in err
