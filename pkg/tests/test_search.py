import pytest

from harmonic_dpo.errors import BracketSingular, InvalidParams, NoCrossing
from harmonic_dpo.search import find_entanglement_boundary, find_optimal_squeezing

BOUNDARY_RATIO = 1.2253233321507773


@pytest.mark.parametrize("kappa", [0.1, 0.3, 0.5, 1.0])
def test_squeezing_optimum(kappa):
    opt = find_optimal_squeezing(kappa)
    assert opt.eps1_star == pytest.approx(kappa, rel=1e-4)
    assert opt.var_minus_star == pytest.approx(7 / 12, abs=1e-9)
    assert opt.squeezing_percent == pytest.approx(41.667, abs=1e-3)


def test_squeezing_optimum_on_edge_returns_edge():
    opt = find_optimal_squeezing(1.0, bracket=(2.0, 4.0), scan_points=11)
    assert opt.eps1_star == pytest.approx(2.0)


@pytest.mark.parametrize("kappa", [0.1, 0.3, 1.0, 3.0])
def test_boundary_ratio_reduced(kappa):
    b = find_entanglement_boundary(kappa)
    assert 1.1 < b.ratio < 1.25
    assert b.ratio == pytest.approx(BOUNDARY_RATIO, abs=1e-6)


def test_boundary_other_pipelines_have_no_crossing():
    with pytest.raises(NoCrossing):
        find_entanglement_boundary(1.0, pipeline="general")
    with pytest.raises(NoCrossing):
        find_entanglement_boundary(1.0, pipeline="oracle")


def test_bad_inputs():
    with pytest.raises(InvalidParams):
        find_entanglement_boundary(1.0, pipeline="exact")
    with pytest.raises(InvalidParams):
        find_optimal_squeezing(-1.0)
    with pytest.raises(InvalidParams):
        find_optimal_squeezing(1.0, bracket=(2.0, 1.0))
    with pytest.raises(BracketSingular):
        find_entanglement_boundary(1.0, bracket=(0.25, 0.25 + 1e-12), scan_points=3)
