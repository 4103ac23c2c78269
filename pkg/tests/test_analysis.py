import math

import numpy as np
import pytest

import pnmcore as p
from pnmcore.analysis import CLASS_NAMES, REFINE_XTOL


def test_scan_diagonal_is_cptp(catalog_grids):
    for name, grid in catalog_grids.items():
        diag = np.diag(grid.value)
        assert np.all(np.abs(diag) <= 1e-10), name
        assert all(
            CLASS_NAMES[int(grid.cls[i, i])] == "CPTP" for i in range(grid.n)
        ), name


def test_scan_rejects_bad_arguments():
    e = p.make_preset("paper-example")
    with pytest.raises(ValueError):
        p.scan_regions(e, -1.0, 100)
    with pytest.raises(ValueError):
        p.scan_regions(e, 1.0, 4)


def test_scan_matches_dense_choi_eigenvalues():
    # the closed-form scan agrees with the brute-force superoperator path
    e = p.make_preset("paper-example")
    grid = p.scan_regions(e, 2.0, 32)
    from pnmcore import linalg

    for i in (0, 5, 17):
        for j in (20, 31):
            s, t = float(grid.times[i]), float(grid.times[j])
            dense = linalg.min_choi_eigenvalue(e.intermediate_map(s, t))
            assert abs(grid.value[i, j] - dense) < 1e-9


def test_scan_quasi_eternal_matches_scalar_probs():
    e = p.QuasiEternal(alpha=0.1, t0=4.0)
    grid = p.scan_regions(e, 10.0, 64)
    for i, j in ((3, 40), (20, 63), (50, 60)):
        s, t = float(grid.times[i]), float(grid.times[j])
        assert abs(grid.value[i, j] - min(e.probs(s, t))) < 1e-12


def test_regularized_scan_for_non_invertible():
    e = p.make_preset("appendix-f")
    grid = p.scan_regions(e, 5.0, 64)
    assert grid.regularized
    # regularized value (f(s) - f(t))/4 at a sampled cell
    s, t = float(grid.times[2]), float(grid.times[40])
    assert abs(grid.value[2, 40] - (e.f_at(s) - e.f_at(t)) / 4) < 1e-12


def test_min_value_location(catalog_grids):
    v, s, t = catalog_grids["paper-example"].min_value()
    assert v < 0
    assert s < t


def test_characteristic_times_ordering(catalog):
    for name, (_, _, ct) in catalog.items():
        assert ct.T <= ct.tau + REFINE_XTOL, name
        assert ct.tau <= ct.t_star + REFINE_XTOL, name
        assert ct.T >= 0.0, name


def test_classifications(catalog):
    assert catalog["paper-example"][2].classification == "NNM"
    assert catalog["appendix-f"][2].classification == "NNM"
    assert catalog["quasi-eternal"][2].classification == "NNM"
    assert catalog["eternal"][2].classification == "PNM"
    assert catalog["unitary-prefix"][2].classification == "PNM"
    assert catalog["pathological"][2].classification == "PNM"


def test_markovian_detection():
    e = p.Depolarizing(p.ScalarFn.parse("exp(-t)"))
    ct = p.characteristic_times(e, 3.0, 200)
    assert ct.classification == "Markovian"
    assert not math.isfinite(ct.T)
    assert "T" in ct.horizon_limited and "tau" in ct.horizon_limited


def test_unitary_trivial_detection():
    e = p.Depolarizing(p.ScalarFn.constant(1.0))
    ct = p.characteristic_times(e, 2.0, 64)
    assert ct.classification == "UnitaryTrivial"


def test_eternal_triple_collapses(catalog):
    ct = catalog["eternal"][2]
    assert ct.T == 0.0
    assert ct.tau == 0.0
    assert ct.t_star == 0.0


def test_t_equals_tau_forces_t_star():
    # whenever T = tau the third time collapses onto them
    e = p.make_preset("eternal")
    t_star = p.compute_t_star(e, 3.0, 0.1, 0.1, 100)
    assert t_star == 0.1


def test_characteristic_value_returns_at_t_star(catalog):
    for name in ("paper-example", "appendix-f"):
        e, _, ct = catalog[name]
        assert abs(e.f_at(ct.t_star) - e.f_at(ct.T)) < 1e-3, name


def test_extract_core_depolarizing(catalog):
    e, horizon, ct = catalog["paper-example"]
    core = p.extract_pnm_core(e, ct.T)
    assert isinstance(core, p.Depolarizing)
    assert abs(core.f_at(0.0) - 1.0) < 1e-9
    # core characteristic function is the renormalized shift of the parent
    for t in (0.1, 0.5, 1.0):
        assert abs(core.f_at(t) - e.f_at(t + ct.T) / e.f_at(ct.T)) < 1e-12


def test_extract_core_zero_shift_is_identity():
    e = p.make_preset("eternal")
    assert p.extract_pnm_core(e, 0.0) is e


def test_extract_core_quasi_eternal(catalog):
    e, _, ct = catalog["quasi-eternal"]
    core = p.extract_pnm_core(e, ct.T)
    assert isinstance(core, p.QuasiEternal)
    assert core.alpha == e.alpha
    assert abs(core.t0 - p.t0_alpha(e.alpha)) < 5e-3


def test_core_is_pnm(catalog):
    for name in ("paper-example", "appendix-f"):
        e, horizon, ct = catalog[name]
        core = p.extract_pnm_core(e, ct.T)
        core_ct = p.characteristic_times(core, horizon - ct.T, 400)
        assert core_ct.classification == "PNM", name
        assert core_ct.T <= 2e-3, name


def test_core_idempotent(catalog):
    # extracting the core of a core changes nothing beyond grid tolerance
    e, horizon, ct = catalog["paper-example"]
    core = p.extract_pnm_core(e, ct.T)
    core_ct = p.characteristic_times(core, horizon - ct.T, 400)
    again = p.extract_pnm_core(core, core_ct.T)
    for t in (0.2, 0.7):
        assert abs(again.f_at(t) - core.f_at(t)) < 1e-3


def test_shifted_core_times(catalog):
    e, horizon, ct = catalog["paper-example"]
    shifted = p.shifted_core_times(ct)
    assert shifted.T == 0.0
    assert abs(shifted.tau - (ct.tau - ct.T)) < 1e-12
    assert abs(shifted.t_star - (ct.t_star - ct.T)) < 1e-12
    core = p.extract_pnm_core(e, ct.T)
    recomputed = p.characteristic_times(core, horizon - ct.T, 400)
    assert abs(recomputed.tau - shifted.tau) < 5e-3
    assert abs(recomputed.t_star - shifted.t_star) < 5e-3


def test_composition_rules_hold(catalog_grids):
    for name, grid in catalog_grids.items():
        violations = p.verify_composition_rules(grid, samples=10_000, seed=7)
        assert violations == [], name


def test_composition_rules_deterministic(catalog_grids):
    grid = catalog_grids["paper-example"]
    a = p.verify_composition_rules(grid, samples=500, seed=3)
    b = p.verify_composition_rules(grid, samples=500, seed=3)
    assert a == b
