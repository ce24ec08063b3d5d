import math

import numpy as np
import pytest

from stieltjes.electrostatics import field_for_family
from stieltjes.errors import CurveError, NumericalError, PreconditionError
from stieltjes.numkernel import ClosedCurve
from stieltjes.orthopoly import Family, PolynomialFamily, zeros
from stieltjes.qhj import (
    ModelKind,
    action_integral,
    build_model,
    model_curve,
    node_residues,
    qmf_eval,
    qmf_poles,
    quantize_contour,
    riccati_grid,
    riccati_residual,
    spectrum,
    wavefunction_nodes,
)

OSC = build_model("oscillator")
COULOMB = [build_model("coulomb", l) for l in range(3)]
MODELS = [OSC] + COULOMB


def test_build_oscillator():
    assert OSC.family_map == PolynomialFamily.hermite()
    assert OSC.level(3).field == field_for_family(PolynomialFamily.hermite())


def test_build_coulomb():
    m = COULOMB[0]
    assert m.family_map == PolynomialFamily.laguerre(1)
    assert m.pole_residue == -1.0
    assert COULOMB[2].family_map.laguerre_m == 5
    # field pattern b/r + C with b = -(l+1), C = 1/(n+l+1)
    assert m.level(2).field.c0 == pytest.approx(1 / 3)
    assert m.level(2).field.poles == ((0.0, -1.0),)


@pytest.mark.parametrize("bad", [-1, 0.5, None])
def test_build_coulomb_rejects(bad):
    with pytest.raises(ValueError):
        build_model("coulomb", bad)


def test_bracket_is_constant_after_sigma_weighting():
    for model in MODELS:
        for n in range(6):
            lev = model.level(n)
            xs = np.linspace(0.3, 9.0, 31)
            g = 2 * lev.energy - 2 * model.potential(xs) + lev.field.value(xs) ** 2 - lev.field.derivative(xs)
            vals = model.sigma(xs) * g
            assert np.ptp(vals) <= 1e-12 * max(1.0, np.max(np.abs(vals)))


def test_spectrum_examples():
    assert spectrum(OSC, 0).energy == 0.5
    assert spectrum(OSC, 3).energy == 3.5
    assert spectrum(COULOMB[0], 0).energy == -0.5


def test_spectrum_closed_forms():
    for n in range(21):
        assert spectrum(OSC, n).energy == n + 0.5
        for l, model in enumerate(COULOMB):
            assert spectrum(model, n).energy == -1 / (2 * (n + l + 1) ** 2)


def test_spectrum_increasing_and_bounded():
    for model in MODELS:
        e = [spectrum(model, n).energy for n in range(21)]
        assert all(b > a for a, b in zip(e, e[1:]))
    for model in COULOMB:
        e = [spectrum(model, n).energy for n in range(200)]
        assert max(e) < 0 and abs(e[-1]) < 1e-4


def test_qmf_ground_state_oscillator():
    xs = np.array([-1.3, 0.0, 0.4, 2.2])
    assert np.allclose(qmf_eval(OSC, 0, xs), 1j * xs, atol=1e-15)


def test_qmf_is_log_derivative_of_psi():
    # p = -i d/dx ln psi with psi = f exp(-U); compare against finite differences of ln psi
    for model, n in [(OSC, 4), (COULOMB[1], 3)]:
        lev = model.level(n)
        nodes = wavefunction_nodes(model, n).as_array()

        def log_psi(x):
            return np.sum(np.log(np.abs(x - nodes))) - lev.field.potential(x)

        for x in ([0.37, 1.9, 2.6] if model is OSC else [0.9, 4.1, 13.0]):
            h = 1e-6
            dlog = (log_psi(x + h) - log_psi(x - h)) / (2 * h)
            assert qmf_eval(model, n, x) == pytest.approx(-1j * dlog, rel=1e-7)


def test_qmf_parity_oscillator():
    xs = np.array([0.3, 0.9, 1.7, 3.1])
    assert np.allclose(qmf_eval(OSC, 2, -xs), -qmf_eval(OSC, 2, xs), atol=1e-14)


def test_qmf_at_pole_raises():
    with pytest.raises(NumericalError):
        qmf_eval(OSC, 1, 0.0)
    with pytest.raises(NumericalError):
        qmf_eval(COULOMB[0], 0, 0.0)


def test_residue_at_node_oscillator_n1():
    (res,) = node_residues(OSC, 1)
    assert abs(res + 1j) <= 1e-8


def test_residues_all_models():
    for model in MODELS:
        for n in range(1, 21):
            assert max(abs(r + 1j) for r in node_residues(model, n)) <= 1e-8


def test_riccati_examples():
    assert riccati_residual(OSC, 0, 0.7) <= 1e-9
    xs = riccati_grid(OSC, 4)
    assert xs.size == 21 and np.all(riccati_residual(OSC, 4, xs) <= 1e-7)
    m = COULOMB[1]
    xs = np.linspace(0.5, 20, 21)
    xs = xs[np.min(np.abs(xs[:, None] - np.array(qmf_poles(m, 2)[0])), axis=1) > 1e-3]
    assert np.all(riccati_residual(m, 2, xs) <= 1e-7)


def test_riccati_near_pole_rejected():
    with pytest.raises(PreconditionError):
        riccati_residual(OSC, 1, 1e-4)


def test_riccati_detects_wrong_energy():
    # shifting E by 1e-3 must break the identity far above tolerance
    model = OSC
    lev = model.level(3)
    xs = riccati_grid(model, 3)
    p = qmf_eval(model, 3, xs)
    dp = (qmf_eval(model, 3, xs + 1e-6) - qmf_eval(model, 3, xs - 1e-6)) / 2e-6
    wrong = np.abs(p * p - 1j * dp - 2 * (lev.energy + 1e-3 - model.potential(xs)))
    assert np.min(wrong) > 1e-4


def test_quantize_examples():
    assert abs(quantize_contour(OSC, 0)) <= 1e-12
    assert quantize_contour(OSC, 3) == pytest.approx(3, abs=1e-8)
    m = COULOMB[0]
    curve = model_curve(m, 2)
    assert not curve.contains(0.0)
    assert quantize_contour(m, 2, curve) == pytest.approx(2, abs=1e-8)


def test_quantize_all_levels():
    for model in MODELS:
        for n in range(21):
            j = action_integral(model, n)
            assert abs(j.real - n) <= 1e-8 and abs(j.imag) <= 1e-9


def test_quantize_curve_errors():
    m = COULOMB[0]
    with pytest.raises(CurveError):
        quantize_contour(m, 2, ClosedCurve(3.0, 10.0, 5.0))  # encloses r = 0
    with pytest.raises(CurveError):
        quantize_contour(OSC, 3, ClosedCurve(0.0, 0.5, 0.5))  # misses outer nodes
    node = wavefunction_nodes(OSC, 2).positions[1]
    with pytest.raises(CurveError):
        quantize_contour(OSC, 2, ClosedCurve(0.0, node + 5e-4, 1.0, 64))


def test_wavefunction_nodes_examples():
    assert wavefunction_nodes(OSC, 1).positions == (0.0,)
    assert wavefunction_nodes(OSC, 2).positions == pytest.approx((-1 / math.sqrt(2), 1 / math.sqrt(2)))
    (r1,) = wavefunction_nodes(COULOMB[0], 1).positions
    # Laguerre m=1, n=1 zero is 2; kappa = 1/2, r = x / (2 kappa)
    assert r1 == pytest.approx(zeros(PolynomialFamily.laguerre(1), 1).positions[0] / 1.0)
    assert wavefunction_nodes(OSC, 0).n == 0


def test_coulomb_nodes_are_radial_wavefunction_zeros():
    # closed-form radial function for l=0, n=1: u = r (1 - r/2) exp(-r/2), node at r = 2
    assert wavefunction_nodes(COULOMB[0], 1).positions[0] == pytest.approx(2.0, abs=1e-14)
    # l=0, n=2: u ~ r (1 - 2r/3 + 2r^2/27) exp(-r/3)
    roots = np.sort(np.roots([2 / 27, -2 / 3, 1]))
    assert wavefunction_nodes(COULOMB[0], 2).positions == pytest.approx(tuple(roots), rel=1e-12)
