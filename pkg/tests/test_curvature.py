import numpy as np
import pytest

from curvature import (
    curvature,
    curvature_log_line,
    curvature_multivar,
    det_curvature_routes,
    det_jet_curvature,
    det_minor_derivatives,
    jet_curvature,
    line_jet_entries,
    numerical_rank,
    quotient_curvature,
    quotient_det_residual,
    quotient_metric,
    trace_formula_residual,
    trace_formula_terms,
    wedge_gram,
)
from errors import ConfigError, DegenerateJetMetric, DegenerateMetric, InternalInconsistency, JetShapeError
from models import (
    BiPolyModel,
    DiagModel,
    ExpModel,
    FrameConjModel,
    HoloFrame,
    KernelModel,
    PolyModel,
    PowerModel,
    ScaleModel,
    SeparableModel,
    frame_transform,
    lift,
)
from wjet import MatrixJet

LINE_MODELS = [
    PowerModel(1.0),
    PowerModel(3.0),
    ExpModel(),
    PolyModel((1.0, 1.0, 0.5, 0.25, 0.125, 0.0625)),
    KernelModel((1.0, 0.5), tail="repeat"),
    ScaleModel(PowerModel(1.0), (1.0, 0.5)),
]


def theta_at(model, z, k=0):
    hjet = lift(model, z, (k + 2, k + 2))
    return jet_curvature(hjet, k).theta if k else curvature(hjet).theta


def test_base_curvature_examples():
    assert curvature(lift(PowerModel(3.0), 0.0, (1, 1))).scalar == pytest.approx(3.0)
    assert curvature(lift(ExpModel(), 0.4, (1, 1))).scalar == pytest.approx(1.0)
    theta = curvature(lift(DiagModel((PowerModel(1.0), PowerModel(2.0))), 0.0, (1, 1))).theta
    np.testing.assert_allclose(theta, np.diag([1.0, 2.0]), atol=1e-14)


def test_sign_convention():
    form = curvature(lift(PowerModel(2.0), 0.5, (1, 1)))
    assert form.scalar == pytest.approx(2.0 / 0.75**2)
    assert form.negated[0, 0].real == pytest.approx(-2.0 / 0.75**2)


@pytest.mark.parametrize("z", [0.0, 0.3 + 0.2j, -0.5j])
def test_log_route_matches(z):
    for model in LINE_MODELS:
        hjet = lift(model, z, (1, 1))
        assert curvature_log_line(hjet) == pytest.approx(curvature(hjet).scalar, rel=1e-10)
    assert curvature_log_line(lift(PolyModel((2.0,)), z, (1, 1))) == 0
    assert curvature_log_line(lift(PolyModel((1.0, 1.0)), 0.0, (1, 1))) == pytest.approx(1.0)


def test_wedge_gram_examples():
    assert wedge_gram(lift(PowerModel(1.0), 0.0, (1, 1)), 1).hk[0, 0] == pytest.approx(1.0)
    assert wedge_gram(lift(ExpModel(), 0.0, (1, 1)), 1).hk[0, 0] == pytest.approx(1.0)
    hk = wedge_gram(lift(DiagModel((PowerModel(1.0), PowerModel(1.0))), 0.0, (1, 1)), 1).hk
    np.testing.assert_allclose(hk, np.eye(2), atol=1e-14)


def test_wedge_gram_jet_constant_term():
    hjet = lift(DiagModel((PowerModel(1.0), ExpModel())), 0.2 + 0.2j, (4, 4))
    for k in range(3):
        gram = wedge_gram(hjet, k, jet_order=1)
        np.testing.assert_allclose(gram.jet.value, wedge_gram(hjet, k).hk, rtol=1e-10)


def test_curvature_from_wedge_gram():
    hjet = lift(DiagModel((PowerModel(1.0), ExpModel())), 0.3 - 0.1j, (1, 1))
    h = hjet.value
    expected = np.linalg.solve(h, wedge_gram(hjet, 1).hk) / np.linalg.det(h)
    np.testing.assert_allclose(curvature(hjet).theta, expected, atol=1e-12)


def test_jet_curvature_trace_power():
    form = jet_curvature(lift(PowerModel(1.0), 0.0, (3, 3)), 1)
    assert np.trace(form.theta).real == pytest.approx(4.0)
    assert form.discrepancy < 1e-10
    assert form.rank == 2


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("model", LINE_MODELS, ids=lambda m: m.to_dict()["type"])
def test_line_jet_structure(model, k):
    theta = theta_at(model, 0.25 + 0.15j, k)
    norm = np.linalg.norm(theta)
    assert np.linalg.norm(theta[:, :k]) < 1e-9 * norm
    entries = line_jet_entries(lift(model, 0.25 + 0.15j, (k + 2, k + 2)), k)
    formula, _ = det_curvature_routes(lift(model, 0.25 + 0.15j, (k + 2, k + 2)), k)
    assert entries[-1].real == pytest.approx(formula, rel=1e-8)


def test_rank_bound_for_rank_two():
    theta = theta_at(DiagModel((PowerModel(1.0), PowerModel(2.0))), 0.3 + 0.1j, 2)
    s = np.linalg.svd(theta, compute_uv=False)
    assert s[2] < 1e-8 * s[0]
    assert numerical_rank(theta) == 2


def test_jet_curvature_needs_order():
    with pytest.raises(JetShapeError):
        jet_curvature(lift(PowerModel(1.0), 0.0, (1, 1)), 1)


def test_jet_curvature_degenerate():
    with pytest.raises(DegenerateJetMetric):
        jet_curvature(lift(PolyModel((1.0,)), 0.0, (3, 3)), 1)


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.5])
def test_det_curvature_power(lam):
    hjet = lift(PowerModel(lam), 0.0, (2, 2))
    formula, log_route = det_curvature_routes(hjet, 1)
    assert formula == pytest.approx(2 * (lam + 1))
    assert log_route == pytest.approx(2 * (lam + 1))


def test_det_curvature_exp_and_k0():
    assert det_jet_curvature(lift(ExpModel(), 0.0, (2, 2)), 1) == pytest.approx(2.0)
    hjet = lift(PowerModel(2.0), 0.4j, (1, 1))
    assert det_jet_curvature(hjet, 0) == pytest.approx(curvature_log_line(hjet))


def test_det_curvature_rank_one_only():
    with pytest.raises(JetShapeError):
        det_curvature_routes(lift(DiagModel((ExpModel(), ExpModel())), 0.0, (2, 2)), 1)


@pytest.mark.parametrize("model", LINE_MODELS[:4], ids=lambda m: m.to_dict()["type"])
def test_det_minor_derivatives(model):
    hjet = lift(model, 0.3 - 0.2j, (3, 3))
    for k in (1, 2):
        for name, (jet_value, minor) in det_minor_derivatives(hjet, k).items():
            assert jet_value == pytest.approx(minor, rel=1e-9, abs=1e-12), name


def test_quotient_metric_examples():
    lam = 2.0
    assert quotient_metric(lift(PowerModel(lam), 0.0, (2, 2)), 1).value[0, 0] == pytest.approx(lam)
    assert quotient_metric(lift(ExpModel(), 0.0, (2, 2)), 1).value[0, 0] == pytest.approx(1.0)
    hjet = lift(PowerModel(lam), 0.2, (2, 2))
    np.testing.assert_allclose(quotient_metric(hjet, 0).coeffs, hjet.truncate((1, 1)).coeffs)


def test_quotient_curvature_examples():
    for lam in (1.0, 2.5):
        assert quotient_curvature(lift(PowerModel(lam), 0.0, (2, 2)), 1)[0, 0] == pytest.approx(lam + 2)
    assert quotient_curvature(lift(ExpModel(), 0.35 + 0.1j, (2, 2)), 1)[0, 0] == pytest.approx(1.0)


def test_trace_formula_examples():
    upper, lower, quotient = trace_formula_terms(lift(PowerModel(1.0), 0.0, (3, 3)), 1)
    assert upper[0, 0] == pytest.approx(4.0)
    assert lower[0, 0] == pytest.approx(1.0)
    assert quotient[0, 0] == pytest.approx(3.0)
    assert trace_formula_residual(lift(ExpModel(), 0.0, (3, 3)), 1) < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_trace_formula_rank_two(k):
    hjet = lift(DiagModel((PowerModel(1.0), PowerModel(2.0))), 0.3 + 0.1j, (k + 2, k + 2))
    assert trace_formula_residual(hjet, k) < 1e-8
    assert quotient_det_residual(hjet, k) < 1e-8


def test_trace_formula_needs_k():
    with pytest.raises(JetShapeError):
        trace_formula_terms(lift(ExpModel(), 0.0, (2, 2)), 0)


def test_gauge_moves_theta_by_similarity():
    frame = HoloFrame([np.eye(2), [[0.3, 1.0], [0.2j, 0.0]]])
    model = DiagModel((PowerModel(1.0), PowerModel(2.0)))
    z0 = 0.2 - 0.3j
    theta = curvature(lift(model, z0, (1, 1))).theta
    moved = curvature(lift(frame_transform(model, frame), z0, (1, 1))).theta
    a = frame.value(z0)
    np.testing.assert_allclose(moved, np.linalg.solve(a, theta @ a), atol=1e-12)


def test_multivariable_product_disk():
    form = curvature_multivar(SeparableModel(PowerModel(1.0), PowerModel(1.0)), (0.0, 0.0))
    np.testing.assert_allclose(form.theta[:, :, 0, 0], np.eye(2), atol=1e-14)
    assert form.discrepancy < 1e-12


def test_multivariable_off_origin():
    form = curvature_multivar(SeparableModel(PowerModel(1.0), ExpModel()), (0.3, 0.5j))
    assert form.theta[0, 0, 0, 0] == pytest.approx(1 / (1 - 0.09) ** 2)
    assert form.theta[1, 1, 0, 0] == pytest.approx(1.0)
    assert abs(form.theta[0, 1, 0, 0]) < 1e-12


def test_multivariable_bipoly():
    model = BiPolyModel({(0, 0, 0, 0): 1.0, (1, 1, 0, 0): 1.0, (0, 0, 1, 1): 1.0})
    form = curvature_multivar(model, (0.0, 0.0))
    np.testing.assert_allclose(form.theta[:, :, 0, 0], np.eye(2), atol=1e-14)


def test_multivariable_single_variable_agrees():
    hjet = lift(PowerModel(2.0), 0.3j, (1, 1))
    form = curvature_multivar(PowerModel(2.0), 0.3j)
    np.testing.assert_allclose(form.theta[0, 0], curvature(hjet).theta)


def test_multivariable_flat():
    form = curvature_multivar(BiPolyModel({(0, 0, 0, 0): 1.0}), (0.1, 0.2))
    np.testing.assert_allclose(form.theta, 0)


def test_multivariable_wrong_point():
    with pytest.raises(ConfigError):
        curvature_multivar(SeparableModel(PowerModel(1.0), ExpModel()), (0.1,))


def test_non_finite_metric_is_degenerate():
    hjet = MatrixJet(0.3, np.full((4, 4, 1, 1), np.nan, dtype=complex))
    with pytest.raises(DegenerateMetric):
        curvature(hjet)
    with pytest.raises(DegenerateMetric):
        jet_curvature(hjet, 1)
    with pytest.raises(DegenerateMetric):
        numerical_rank(np.full((2, 2), np.inf))


def test_route_disagreement_is_optional():
    # far out on the plane the two routes for J_3 drift apart in double precision
    hjet = lift(ExpModel(), 6.0, (5, 5))
    with pytest.raises(InternalInconsistency):
        trace_formula_terms(hjet, 3)
    upper, lower, quotient = trace_formula_terms(hjet, 3, strict=False)
    assert upper.shape == lower.shape == quotient.shape == (1, 1)
    assert np.isfinite(quotient_det_residual(hjet, 3, strict=False))
    assert jet_curvature(hjet, 3, strict=False).discrepancy > 1e-7


CATALOG = [
    PowerModel(1.0),
    PowerModel(2.0),
    PowerModel(3.0),
    PowerModel(2.5),
    ExpModel(),
    PolyModel((1.0, 1.0, 0.5, 0.25)),
    KernelModel((1.0, 0.5), tail="repeat"),
    ScaleModel(PowerModel(1.0), (1.0, 0.5)),
    FrameConjModel(PowerModel(2.0), HoloFrame.scalar([1.0, 0.5j])),
    DiagModel((PowerModel(1.0), PowerModel(2.0))),
    FrameConjModel(DiagModel((PowerModel(1.0), ExpModel())), HoloFrame([np.eye(2), [[0.0, 0.5], [0.2, 0.0]]])),
]


def seeded_points(count, radius=0.45, seed=11):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=count))
    angle = rng.uniform(0.0, 2 * np.pi, size=count)
    return [complex(z) for z in r * np.exp(1j * angle)]


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("model", [m for m in CATALOG if m.rank == 1], ids=lambda m: m.to_dict()["type"])
def test_det_curvature_routes_sweep(model, k):
    for z in seeded_points(50):
        formula, log_route = det_curvature_routes(lift(model, z, (k + 1, k + 1)), k)
        assert np.isfinite(formula)
        assert abs(formula - log_route) < 1e-9 * abs(formula), z


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("model", CATALOG, ids=lambda m: f"{m.to_dict()['type']}{m.rank}")
def test_trace_formula_and_rank_sweep(model, k):
    n = model.rank
    for z in seeded_points(25, seed=12):
        hjet = lift(model, z, (k + 2, k + 2))
        assert np.all(np.isfinite(hjet.coeffs))
        upper, lower, quotient = trace_formula_terms(hjet, k)
        residual = np.linalg.norm(upper - lower - quotient) / max(1.0, float(np.linalg.norm(upper)))
        assert residual < 1e-8, z
        s = np.linalg.svd(jet_curvature(hjet, k).theta, compute_uv=False)
        assert s[n] < 1e-8 * s[0], z


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0])
def test_integer_power_closed_forms(lam):
    hjet = lift(PowerModel(lam), 0.0, (3, 3))
    assert abs(curvature(hjet).scalar - lam) < 1e-10
    assert det_jet_curvature(hjet, 1) == pytest.approx(2 * (lam + 1), abs=1e-9)
    upper, lower, quotient = trace_formula_terms(hjet, 1)
    assert upper[0, 0].real == pytest.approx(2 * lam + 2)
    assert quotient[0, 0].real == pytest.approx(lam + 2)
