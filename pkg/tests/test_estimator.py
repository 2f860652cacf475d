import json

import numpy as np
import pytest

from revecc import estimator as est
from revecc.gatecore import ResourceReport, measure

NS = (32, 64, 110)


def test_fit_recovers_exact_data():
    data = [(n, 224 * n * n * np.log2(n) + 2045 * n * n) for n in (16, 32, 64, 128, 256)]
    fit = est.fit_scaling(data)
    assert fit.alpha == pytest.approx(224, rel=1e-6)
    assert fit.beta == pytest.approx(2045, rel=1e-6)
    assert fit(100) == pytest.approx(224 * 1e4 * np.log2(100) + 2045e4, rel=1e-9)


def test_fit_two_points_interpolates():
    fit = est.fit_scaling([(16, 1000.0), (64, 90000.0)])
    assert fit(16) == pytest.approx(1000.0)
    assert fit(64) == pytest.approx(90000.0)
    assert fit.residual == pytest.approx(0, abs=1e-6)


def test_fit_linear_form():
    data = [(n, 16 * n * np.log2(n) - 26.9 * n) for n in (8, 32, 128)]
    fit = est.fit_scaling(data, form="nlogn")
    assert (fit.alpha, fit.beta) == pytest.approx((16, -26.9))


@pytest.mark.parametrize("data", [[(32, 1.0)], [(32, 1.0), (32, 2.0)], []])
def test_fit_degenerate(data):
    with pytest.raises(ValueError):
        est.fit_scaling(data)


def test_fit_unknown_form():
    with pytest.raises(ValueError):
        est.fit_scaling([(2, 1), (4, 2)], form="cubic")


def test_shor_totals_factor_2n():
    rep = ResourceReport(qubit_highwater=1014, toffoli_count=1000, toffoli_depth=900, cnot_count=5, not_count=2)
    tot = est.shor_totals(rep, 110)
    assert (tot.qubits, tot.toffoli, tot.depth) == (1014, 220_000, 198_000)
    assert est.shor_totals(ResourceReport(toffoli_count=7, toffoli_depth=-1, cnot_count=0, not_count=0, qubit_highwater=10), 4).depth == -1


def test_paper_shor_formula():
    assert est.paper_shor_toffoli(256) == pytest.approx(1.26e11, rel=0.03)
    for n, (q, t, _) in est.TABLE2.items():
        assert est.REFERENCE["point_add"].qubits(n) == q
        assert est.paper_shor_toffoli(n) == pytest.approx(t, rel=0.1)


def test_reference_formula_values():
    assert est.REFERENCE["inv_modp"].toffoli(64) == 786432
    assert est.REFERENCE["ctrl_neg_modp"].toffoli(64) == pytest.approx(2144)
    assert est.REFERENCE["add_const_modp"].toffoli(64) == pytest.approx(4422.4)


def test_reference_check_unknown_tag():
    with pytest.raises(KeyError):
        est.reference_check("div_modp", 32)


def test_reference_check_inv_64():
    chk = est.reference_check("inv_modp", 64)
    assert chk.expected_toffoli == 786432
    assert 0.75 <= chk.ratio <= 1.25, chk.ratio


@pytest.mark.parametrize("n", NS)
@pytest.mark.parametrize("tag", [t for t in est.REFERENCE if t != "point_add"])
def test_reference_qubits_exact(tag, n):
    chk = est.reference_check(tag, n)
    assert chk.measured_qubits == chk.expected_qubits


@pytest.mark.parametrize("n", NS)
@pytest.mark.parametrize("tag", [t for t in est.REFERENCE if t != "point_add"])
def test_reference_ratio_within_tolerance(tag, n):
    ratio = est.reference_check(tag, n).ratio
    assert 0.75 <= ratio <= 1.25, ratio


@pytest.mark.parametrize("tag", [t for t in est.REFERENCE if t != "point_add"])
def test_reference_ratio_stable(tag):
    ratios = [est.reference_check(tag, n).ratio for n in NS]
    assert max(ratios) / min(ratios) - 1 < 0.10, ratios


@pytest.mark.parametrize("tag", [t for t in est.REFERENCE if t != "point_add"])
def test_depth_at_most_count(tag):
    rep = measure(est.build_for_tag(tag, est.prime_for(16)[0]))
    assert 0 < rep.toffoli_depth <= rep.toffoli_count


def test_prime_for():
    assert est.prime_for(192)[1] == "P-192"
    p, label = est.prime_for(110)
    assert label == "synthetic-110" and p.bit_length() == 110


def test_point_add_resources_n110_qubits():
    (row,) = est.point_add_resources([110], depth=False)
    assert row.report.qubit_highwater == 1014
    assert row.report.toffoli_depth == -1


def test_point_add_resources_depth_small():
    rows = est.point_add_resources([16, 20])
    for r in rows:
        assert 0.85 <= r.report.toffoli_depth / r.report.toffoli_count < 1.0


def test_csv_and_json_output():
    rows = est.point_add_resources([8], depth=True)
    text = est.to_csv(rows)
    header, line = text.strip().split("\n")
    assert header.split(",") == est.CSV_COLUMNS
    vals = dict(zip(est.CSV_COLUMNS, line.split(",")))
    assert int(vals["shor_toffoli"]) == 16 * int(vals["toffoli"])
    doc = json.loads(est.to_json(rows))
    assert set(doc) == {"rows"}
    assert set(doc["rows"][0]) == set(est.CSV_COLUMNS) | {"p"}
    assert est.to_json(rows) == est.to_json(est.point_add_resources([8]))
