import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from thimble.corelin import InputError
from thimble.crindex import (
    INPUT,
    OUTPUT,
    CROperatorData,
    End,
    NumericalFailure,
    Shooter,
    SLProblem,
    angle_scan_roots,
    closed_form_spectrum,
    constant_strip,
    index,
    relabel,
    spectrum_near_zero,
    total_angle,
)

seeds = st.integers(0, 10_000)


def random_samples(rng, n=9, scale=2.0):
    out = []
    c = [rng.uniform(-scale, scale) for _ in range(6)]
    for k in range(n):
        t = k / (n - 1)
        a11 = c[0] + c[1] * t
        a22 = c[2] + c[3] * math.sin(3 * t)
        a12 = c[4] * math.cos(2 * t) + c[5] * t
        out.append([[a11, a12], [a12, a22]])
    return out


def defect_oracle(p, mu):
    """Cross product of Y(1) with the direction of lambda_1, by an adaptive solver."""
    def coeffs(t):
        return np.array(p.coefficients(t))

    def f(t, y):
        a11, a12, a22 = coeffs(t)
        w1 = (a11 - mu) * y[0] + a12 * y[1]
        w2 = a12 * y[0] + (a22 - mu) * y[1]
        return [-w2, w1]

    sol = solve_ivp(f, (0, 1), [math.cos(p.theta0), math.sin(p.theta0)],
                    rtol=1e-11, atol=1e-11)
    y = sol.y[:, -1]
    return y[0] * math.sin(p.theta1) - y[1] * math.cos(p.theta1)


def test_zero_coefficients_have_zero_angle():
    assert total_angle(SLProblem(0.3, 1.0, const=0.0)) == 0.0
    assert abs(total_angle(SLProblem(0.3, 1.0, const=0.0), numeric=True)) < 1e-12


@given(st.floats(-6, 6), st.floats(0, 3.14))
def test_constant_angle_closed_form_matches_integrator(a, th):
    p = SLProblem(th, 1.0, const=a)
    assert abs(total_angle(p) - total_angle(p, numeric=True)) < 1e-8


@given(seeds)
def test_sampled_angle_self_consistent(seed):
    p = SLProblem(0.2, 1.1, samples=random_samples(random.Random(seed)))
    sh = Shooter(p, 1e-8)
    from thimble.crindex import _integrate
    w_n = _integrate(p, np.array([0.0]), sh.steps)[0]
    w_2n = _integrate(p, np.array([0.0]), 2 * sh.steps)[0]
    assert abs(w_n - w_2n) < 1e-6


def test_strip_spectrum_nearest_zero():
    p = SLProblem(0.0, math.pi / 2, const=0.0)
    sp = spectrum_near_zero(p, 2)
    assert [round(e.mu, 9) for e in sp] == [round(-math.pi / 2, 9), round(math.pi / 2, 9)]
    assert sp[0].angle - sp[1].angle == pytest.approx(math.pi)


@given(st.floats(-4, 4), st.floats(0, 3.1), st.floats(0, 3.1))
def test_constant_spectrum_closed_form(a, t0, t1):
    if abs(math.remainder(a - (t1 - t0), math.pi)) < 0.05:
        return
    p = SLProblem(t0, t1, const=a)
    sp = spectrum_near_zero(p, 3)
    for e in sp:
        j = round((e.mu - (a + t0 - t1)) / math.pi)
        assert abs(e.mu - closed_form_spectrum(a, t0, t1, [j])[0]) < 1e-6
        assert (e.mu < 0) == (e.angle > a)


@pytest.mark.parametrize("seed", range(5))
def test_sampled_spectrum_matches_independent_solver(seed):
    rng = random.Random(seed)
    p = SLProblem(rng.uniform(0, 3), rng.uniform(0, 3), samples=random_samples(rng))
    sp = spectrum_near_zero(p, 4)
    for e in sp:
        lo, hi = e.mu - 1e-3, e.mu + 1e-3
        assert defect_oracle(p, lo) * defect_oracle(p, hi) < 0
        root = brentq(lambda m: defect_oracle(p, m), lo, hi, xtol=1e-12)
        assert abs(root - e.mu) < 1e-6
    ang = total_angle(p)
    for x, y in zip(sp, sp[1:]):
        assert x.angle - y.angle == pytest.approx(math.pi, abs=1e-12)
    for e in sp:
        assert (e.mu < 0) == (e.angle > ang)


@pytest.mark.parametrize("seed", range(4))
def test_eigenvalues_simple_by_dense_scan(seed):
    rng = random.Random(100 + seed)
    p = SLProblem(rng.uniform(0, 3), rng.uniform(0, 3), samples=random_samples(rng, scale=4))
    sp = spectrum_near_zero(p, 5)
    for x, y in zip(sp, sp[1:]):
        assert y.mu - x.mu > 1e-4
    # step 1e-4 around each eigenvalue: exactly one crossing
    for e in sp:
        assert angle_scan_roots(p, e.mu - 0.05, e.mu + 0.05, n=1001) == 1
    assert angle_scan_roots(p, sp[0].mu - 1e-3, sp[-1].mu + 1e-3, n=4001) == len(sp)


def test_non_transverse_refused():
    p = SLProblem(0.0, 0.5, const=0.5)
    with pytest.raises(InputError, match="transverse"):
        spectrum_near_zero(p)
    with pytest.raises(InputError, match="transverse"):
        index(CROperatorData(1, (End(p, INPUT), End(p, OUTPUT)), (0.0, -0.5 + 0.5)))


def test_budget_overrun_reports_numerical_failure():
    p = SLProblem(0.2, 1.0, samples=random_samples(random.Random(1), scale=40))
    with pytest.raises(NumericalFailure):
        Shooter(p, 1e-14, max_steps=64)
    with pytest.raises(NumericalFailure):
        spectrum_near_zero(SLProblem(0.2, 1.0, const=0.3), 2, tol=1e-9, max_iter=3)


def test_input_validation():
    with pytest.raises(InputError):
        SLProblem(0.0, 1.0)
    with pytest.raises(InputError, match="symmetric"):
        SLProblem(0.0, 1.0, samples=[[[1, 2], [0, 1]], [[1, 0], [0, 1]]])
    with pytest.raises(InputError):
        End(SLProblem(0.0, 1.0, const=0.1), "sideways")
    p = SLProblem(0.0, math.pi / 2, const=0.0)
    with pytest.raises(InputError, match="arc"):
        CROperatorData(1, (End(p, INPUT), End(p, OUTPUT)), (0.3, 0.0))
    with pytest.raises(InputError, match="one boundary arc"):
        CROperatorData(1, (End(p, INPUT),), ())


def test_strip_index_and_shift():
    s = constant_strip()
    r = index(s)
    assert (r.degree, r.index, r.regular_if_index_zero) == (-1, 0, True)
    shifted = CROperatorData(1, s.ends, (s.arcs[0], s.arcs[1] - math.pi))
    r = index(shifted)
    assert (r.degree, r.index, r.injective) == (-2, -1, True)
    positive = CROperatorData(1, s.ends, (s.arcs[0] + 2 * math.pi, s.arcs[1]))
    r = index(positive)
    assert r.degree == 1 and not r.injective


@pytest.mark.parametrize("seed", range(10))
def test_relabeling_invariance_with_sampled_ends(seed):
    rng = random.Random(seed)
    ends = []
    for _ in range(rng.randint(1, 3)):
        p = SLProblem(rng.uniform(0, 3), rng.uniform(0, 3), samples=random_samples(rng))
        ends.append(End(p, rng.choice((INPUT, OUTPUT))))
    arcs = []
    for k in range(len(ends)):
        _, ex = ends[k].entry_exit()
        en, _ = ends[(k + 1) % len(ends)].entry_exit()
        arcs.append(en - ex + rng.randint(-1, 1) * math.pi)
    data = CROperatorData(rng.randint(-1, 1), tuple(ends), tuple(arcs))
    base = index(data).index
    for k in range(len(ends)):
        assert index(relabel(data, k)).index == base
