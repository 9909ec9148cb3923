import math

import pytest

from puwbench.errors import InsufficientData
from puwbench.probes import (
    PROBES,
    ProbeReport,
    Verdict,
    probe_adjustability,
    probe_amortization,
    probe_context_sensitivity,
    probe_generation_ratio,
    probe_hardness,
    probe_solvability,
    probe_soundness_completeness,
    probe_spot_check,
    probe_switchability,
    probe_tractability,
    probe_variability,
    probe_verification_ratio,
    reports_to_csv,
)
from puwbench.probes.report import flatten


def test_variability_cryptopuzzle_near_one():
    r = probe_variability("cryptopuzzle", trials=1000, seed=0)
    assert r.verdict is Verdict.PASS and abs(r.value - 1) <= 0.1 and r.n == 1000


def test_variability_kov_fixed_shape():
    r = probe_variability("kov", trials=100, seed=0)
    assert r.value < 0.05 and r.verdict is Verdict.REPORT_ONLY


def test_variability_tsp_positive():
    r = probe_variability("tsp", trials=100, seed=0)
    assert r.value > 0 and r.verdict is Verdict.REPORT_ONLY


def test_variability_needs_trials():
    with pytest.raises(InsufficientData):
        probe_variability("kov", trials=10)


def test_amortization():
    assert probe_amortization("cryptopuzzle", 0.5).verdict is Verdict.PASS
    assert probe_amortization("cryptopuzzle", 0.5).details["cache_hits"] == 0
    assert probe_amortization("kov", 0.0).value == pytest.approx(1.0)
    warm = probe_amortization("kov", 0.5)
    assert warm.value > 1.2 and warm.verdict is Verdict.REPORT_ONLY
    assert warm.value == pytest.approx(1 / (1 - 0.5))


def test_amortization_other_backends():
    with pytest.raises(ValueError):
        probe_amortization("tsp", 0.5)


def test_switchability_zero_elapsed():
    for backend in ("cryptopuzzle", "kov", "tsp"):
        r = probe_switchability(backend, elapsed_fraction=0.0)
        assert r.value == 0.0


def test_switchability_cryptopuzzle_memoryless():
    r = probe_switchability("cryptopuzzle", elapsed_fraction=0.5, trials=4000, seed=1)
    assert abs(r.value) <= 2 * r.dispersion
    assert r.verdict is Verdict.PASS


def test_switchability_kov_loses_progress():
    r = probe_switchability("kov", elapsed_fraction=0.9)
    assert r.value == pytest.approx(0.9, abs=0.05)


def test_switchability_range():
    with pytest.raises(ValueError):
        probe_switchability("kov", elapsed_fraction=1.0)


def test_verification_ratios():
    (c,) = probe_verification_ratio("cryptopuzzle", trials=20, nonce_bits=16)
    assert c.value < 1e-3
    full, spot = probe_verification_ratio("kov", trials=20)
    assert full.value == pytest.approx(1.0)
    assert spot.value < full.value
    (t,) = probe_verification_ratio("tsp", trials=20)
    assert t.value < 0.1
    with pytest.raises(InsufficientData):
        probe_verification_ratio("kov", trials=5)


@pytest.mark.parametrize("backend", ["cryptopuzzle", "kov", "tsp"])
def test_soundness_full_mode_clean(backend):
    fa, fr = probe_soundness_completeness(backend, trials=200, seed=2)
    assert fa.value == 0 and fr.value == 0
    assert fa.verdict is Verdict.PASS and fr.verdict is Verdict.PASS


def test_spot_check_rate():
    r = probe_spot_check(0.1, trials=1000, seed=0)
    assert r.verdict is Verdict.PASS
    assert r.details["expected"] == pytest.approx(0.9)


def test_context_sensitivity_cryptopuzzle():
    distinct, replay = probe_context_sensitivity("cryptopuzzle", trials=50)
    assert distinct.value == 1 and replay.value == 1 and replay.verdict is Verdict.PASS


def test_context_sensitivity_supply_classes_reported():
    kd, kr = probe_context_sensitivity("kov", trials=30)
    assert kd.value == pytest.approx(1 / 30) and kr.value == 0
    td, tr = probe_context_sensitivity("tsp", trials=30)
    assert td.value == 1 and tr.value == 1
    assert {kd.verdict, kr.verdict, td.verdict, tr.verdict} == {Verdict.REPORT_ONLY}


@pytest.mark.parametrize("backend", ["cryptopuzzle", "kov", "tsp"])
@pytest.mark.parametrize("direction", ["lower", "upper"])
def test_adjustability_monotone(backend, direction):
    r = probe_adjustability(backend, direction, trials=100)
    assert r.verdict is Verdict.PASS


def test_solvability_cryptopuzzle_matches_analytic():
    r = probe_solvability("cryptopuzzle", trials=2000, seed=0)
    assert r.verdict is Verdict.PASS
    assert r.details["analytic"] == pytest.approx(math.exp(-1), abs=1e-4)


def test_generation_and_tractability_reported():
    g = probe_generation_ratio("cryptopuzzle", trials=20)
    assert g.value < 1e-3
    t = probe_tractability("cryptopuzzle", trials=500)
    assert t.value == pytest.approx(math.log(100), rel=0.2)
    h = probe_hardness("cryptopuzzle", trials=500)
    assert h.value < 0.05


def test_reports_always_carry_n_and_dispersion():
    reports = flatten([probe_spot_check(trials=100), probe_amortization("kov", 0.5),
                       probe_verification_ratio("kov", trials=20)])
    for r in reports:
        assert isinstance(r, ProbeReport) and r.n > 0 and not math.isnan(r.dispersion)
    assert reports_to_csv(reports).count("\n") == len(reports) + 1


def test_probes_deterministic_per_seed():
    a = reports_to_csv([probe_variability("tsp", trials=100, seed=4)])
    b = reports_to_csv([probe_variability("tsp", trials=100, seed=4)])
    c = reports_to_csv([probe_variability("tsp", trials=100, seed=5)])
    assert a == b != c


def test_registry_names():
    assert {"variability", "fairness", "soundness", "spot_check", "retarget"} <= set(PROBES)
