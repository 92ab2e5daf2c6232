import json
import math
import warnings

import numpy as np
import pytest

from mixmax.operators import OperatorSpec, materialize
from mixmax.spectral import (
    PrecisionWarning, approx_eigenvalue, approx_eigenvalues, check_c_condition, curve_distance,
    eigenvalues, entropy, entropy_estimate, formula_deviation, limiting_curve, report_csv,
    spectrum_of_matrix, spectrum_report,
)

GOLD = (3 + math.sqrt(5)) / 2


def test_two_by_two_closed_form():
    sp = eigenvalues(OperatorSpec.two(2))
    assert np.allclose(sorted(sp.eigenvalues.real), [1 / GOLD, GOLD])
    assert entropy(sp).entropy == pytest.approx(math.log(GOLD))
    v = check_c_condition(sp)
    assert v.passed and v.min_gap == pytest.approx(1 - 1 / GOLD)


def test_exact_and_float_routes_agree():
    m = materialize(OperatorSpec.two(64, -1))
    a, b = spectrum_of_matrix(m, "float"), spectrum_of_matrix(m, "exact")
    assert np.max(np.abs(a.log_moduli - b.log_moduli)) < 1e-9
    assert a.real_count == b.real_count


def test_exact_route_matches_numpy_on_random_integer_matrix(rng):
    m = [[rng.randrange(-9, 10) for _ in range(12)] for _ in range(12)]
    a, b = spectrum_of_matrix(m, "float"), spectrum_of_matrix(m, "exact")
    assert np.allclose(np.sort_complex(a.eigenvalues), np.sort_complex(b.eigenvalues), atol=1e-9)


def test_table_entropy_n256():
    sp = eigenvalues(OperatorSpec.two(256, -1))
    rep = entropy(sp)
    assert rep.entropy == pytest.approx(164.5, abs=0.5)
    assert rep.contracting == pytest.approx(rep.entropy, rel=1e-9)
    assert abs(sp.log_det) < 1e-6 * 256
    assert rep.lambda_min == pytest.approx(0.25, abs=0.005)
    assert rep.lambda_max == pytest.approx(3002, abs=30)
    v = check_c_condition(sp)
    assert v.passed and v.min_gap > 1e-3


def test_large_s_needs_exact_route():
    spec = OperatorSpec.two(256, 487013230256099064)
    sp = eigenvalues(spec)
    assert sp.method == "exact"
    assert entropy(sp).entropy == pytest.approx(193.6, abs=0.5)
    assert abs(sp.log_det) < 1e-6 * 256
    with pytest.warns(PrecisionWarning):
        eigenvalues(spec, method="float")


@pytest.mark.parametrize("N,k,h,tol", [(8, 53, 220.4, 0.5), (17, 36, 374.3, 0.5), (40, 42, 1106.3, 1.5)])
def test_three_param_entropy(N, k, h, tol):
    sp = eigenvalues(OperatorSpec.three(N, 2**k + 1))
    assert entropy(sp).entropy == pytest.approx(h, abs=tol)
    assert abs(sp.log_det) < 1e-3 * N
    assert check_c_condition(sp).passed


def test_three_param_lambda_max_is_of_order_m():
    m = 2**52 + 1
    sp = eigenvalues(OperatorSpec.three(60, m))
    ratio = math.exp(sp.log_moduli[-1] - math.log(m))
    assert 1 < ratio < 5


@pytest.mark.xfail(strict=True, reason="measured lambda_max/m = 2.43; see decisions ledger")
def test_three_param_lambda_max_within_five_percent_of_m():
    m = 2**52 + 1
    sp = eigenvalues(OperatorSpec.three(60, m))
    assert math.exp(sp.log_moduli[-1] - math.log(m)) == pytest.approx(1, rel=0.05)


def test_rotation_fails_c_condition():
    sp = spectrum_of_matrix([[0, -1], [1, 0]], "float")
    assert not check_c_condition(sp).passed


def test_limiting_curve_examples():
    assert limiting_curve(0.0) == pytest.approx(4)
    assert limiting_curve(2 * math.pi / 3) == pytest.approx(1)
    assert limiting_curve(math.pi) == pytest.approx(0, abs=1e-15)


def test_approx_eigenvalue_examples():
    assert approx_eigenvalue(0, 256) == pytest.approx(0.25)
    assert approx_eigenvalue(128, 256) == pytest.approx(0.5j)
    with pytest.raises(ValueError):
        approx_eigenvalue(129, 256)
    assert len(approx_eigenvalues(256)) == 257


def test_formula_within_its_own_domain():
    # the formula spans phases |phi| <= pi/2, i.e. moduli up to 0.5
    dev = formula_deviation(eigenvalues(OperatorSpec.two(256, -1)), max_modulus=0.5)
    assert len(dev) > 100
    assert dev.max() < 0.01


def test_leaf_shape():
    sp = eigenvalues(OperatorSpec.two(256, -1))
    inv = sp.inverse()[~sp.real_mask]
    assert np.allclose(inv, 1 / sp.eigenvalues[~sp.real_mask])
    assert curve_distance(inv).max() <= 0.02 * 4


def test_entropy_estimate():
    assert entropy_estimate(7307) == pytest.approx(4651.7, abs=0.1)


def test_spectrum_report_document():
    rep = spectrum_report(OperatorSpec.two(256, -1))
    assert rep["schema"] == "mixmax.spectrum/1"
    assert len(rep["eigenvalues"]) == len(rep["inverse_eigenvalues"]) == 256
    for ev, iv in zip(rep["eigenvalues"], rep["inverse_eigenvalues"]):
        z = complex(ev["re"], ev["im"])
        assert complex(iv["re"], iv["im"]) == pytest.approx(1 / z, rel=1e-9)
    json.dumps(rep)
    csv = report_csv(rep["eigenvalues"])
    assert csv.count("\n") == 257


def test_report_handles_underflowing_moduli():
    # the smallest eigenvalue here is far below the binary64 range
    rep = spectrum_report(OperatorSpec.three(60, 2**60 + 1))
    text = json.dumps(rep, allow_nan=False)
    assert "null" in text


def test_cap():
    with pytest.raises(ValueError):
        eigenvalues(OperatorSpec.two(300), cap=256)


def test_float_route_quiet_for_small_entries():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eigenvalues(OperatorSpec.two(32, -1), method="float")
