"""Sturm-Liouville spectra and the index formula for Cauchy-Riemann operators.

The boundary-value operator is ``A Y = i Y' + a_t Y`` with ``Y(0)`` in the
line at angle ``theta0`` and ``Y(1)`` in the line at angle ``theta1``.  Writing
``Y = r exp(i phi)``, the eigenvalue equation ``A Y = mu Y`` becomes

    phi' = a11 cos^2 phi + 2 a12 sin phi cos phi + a22 sin^2 phi - mu,

so the total angle ``w(mu) = phi(1) - theta0`` of an eigenvector path is
strictly decreasing in ``mu``, with ``w(0)`` the total angle of
``t -> g_t(lambda_0)``.  Angles are measured so that one loop of RP^1 is pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corelin import InputError

TRANSVERSALITY_MARGIN = 1e-9


class NumericalFailure(RuntimeError):
    """A tolerance was not reached within the iteration budget."""


def _line_angle(theta: float) -> float:
    return math.fmod(math.fmod(theta, math.pi) + math.pi, math.pi)


@dataclass(frozen=True)
class SLProblem:
    """Boundary lines (angles mod pi) and a family of symmetric matrices ``a_t``.

    ``const`` gives ``a_t = const * Id``; otherwise ``samples`` holds
    ``[[a11, a12], [a12, a22]]`` on a uniform grid of ``[0, 1]``.
    """

    theta0: float
    theta1: float
    const: float | None = None
    samples: tuple | None = None
    _grid: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for th in (self.theta0, self.theta1):
            if not math.isfinite(th):
                raise InputError("boundary angles must be finite")
        object.__setattr__(self, "theta0", _line_angle(self.theta0))
        object.__setattr__(self, "theta1", _line_angle(self.theta1))
        if (self.const is None) == (self.samples is None):
            raise InputError("give exactly one of a constant or sampled coefficients")
        if self.samples is not None:
            arr = np.asarray(self.samples, dtype=float)
            if arr.ndim != 3 or arr.shape[1:] != (2, 2) or arr.shape[0] < 2:
                raise InputError("samples must be a list of at least two 2x2 matrices")
            if not np.all(np.isfinite(arr)):
                raise InputError("samples contain non-finite entries")
            if np.max(np.abs(arr[:, 0, 1] - arr[:, 1, 0])) > 1e-12:
                raise InputError("sampled matrices must be symmetric")
            object.__setattr__(self, "samples", tuple(tuple(map(tuple, m)) for m in arr))
            object.__setattr__(self, "_grid", arr)
        elif not math.isfinite(self.const):
            raise InputError("constant coefficient must be finite")

    @property
    def is_constant(self) -> bool:
        return self.const is not None

    def coefficients(self, t: float) -> tuple[float, float, float]:
        """``(a11, a12, a22)`` at time ``t`` by linear interpolation."""
        if self.const is not None:
            return self.const, 0.0, self.const
        g = self._grid
        n = g.shape[0] - 1
        x = min(max(t, 0.0), 1.0) * n
        k = min(int(x), n - 1)
        s = x - k
        m = (1 - s) * g[k] + s * g[k + 1]
        return m[0, 0], m[0, 1], m[1, 1]

    def eigen_bounds(self) -> tuple[float, float]:
        """Integrals of the smallest and largest eigenvalue of ``a_t`` (grid bound)."""
        if self.const is not None:
            return self.const, self.const
        g = self._grid
        tr = (g[:, 0, 0] + g[:, 1, 1]) / 2
        disc = np.sqrt(((g[:, 0, 0] - g[:, 1, 1]) / 2) ** 2 + g[:, 0, 1] ** 2)
        return float(np.min(tr - disc)), float(np.max(tr + disc))

    def relabeled(self) -> "SLProblem":
        """The same end seen from the other side: lines swapped, ``a_t -> -a_{1-t}``."""
        if self.const is not None:
            return SLProblem(self.theta1, self.theta0, const=-self.const)
        g = -self._grid[::-1]
        return SLProblem(self.theta1, self.theta0, samples=g.tolist())


def _rhs(phi: np.ndarray, coeffs: tuple, mu: np.ndarray) -> np.ndarray:
    a11, a12, a22 = coeffs
    c, s = np.cos(phi), np.sin(phi)
    return a11 * c * c + 2 * a12 * s * c + a22 * s * s - mu


def _table(p: SLProblem, steps: int) -> list:
    """Coefficients at ``t_k``, ``t_k + h/2``, ``t_k + h`` for each RK4 step."""
    t = np.arange(steps) / steps
    h = 1.0 / steps
    cols = []
    for u in (t, t + h / 2, t + h):
        if p.const is not None:
            a = np.full_like(u, p.const)
            cols.append(np.stack([a, np.zeros_like(u), a], axis=1))
            continue
        g = p._grid
        n = g.shape[0] - 1
        x = np.clip(u, 0.0, 1.0) * n
        k = np.minimum(x.astype(int), n - 1)
        w = (x - k)[:, None, None]
        m = (1 - w) * g[k] + w * g[k + 1]
        cols.append(np.stack([m[:, 0, 0], m[:, 0, 1], m[:, 1, 1]], axis=1))
    return list(zip(*(c.tolist() for c in cols)))


def _integrate(p: SLProblem, mu: np.ndarray, steps: int, table: list | None = None) -> np.ndarray:
    """``phi(1)`` by fixed-step RK4 from ``phi(0) = theta0``, vectorized over ``mu``."""
    h = 1.0 / steps
    phi = np.full_like(mu, p.theta0, dtype=float)
    for c0, cm, c1 in table if table is not None else _table(p, steps):
        k1 = _rhs(phi, c0, mu)
        k2 = _rhs(phi + h / 2 * k1, cm, mu)
        k3 = _rhs(phi + h / 2 * k2, cm, mu)
        k4 = _rhs(phi + h * k3, c1, mu)
        phi = phi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return phi


class Shooter:
    """Angle map ``w(mu)`` with a step count fixed by a doubling test."""

    def __init__(self, p: SLProblem, tol: float = 1e-8, probe: Sequence[float] = (0.0,),
                 max_steps: int = 1 << 16):
        self.p = p
        grid_n = 1 if p.const is not None else len(p.samples) - 1
        steps = max(16, grid_n)
        while steps % grid_n:
            steps += 1
        mu = np.asarray(probe, dtype=float)
        prev = _integrate(p, mu, steps)
        last_err, stalled = math.inf, 0
        while True:
            if steps * 2 > max_steps:
                raise NumericalFailure(f"integrator did not reach tolerance {tol} "
                                       f"within {max_steps} steps")
            cur = _integrate(p, mu, steps * 2)
            steps *= 2
            err = float(np.max(np.abs(cur - prev)))
            if err < tol:
                break
            # RK4 error should drop ~16x per doubling; twice without progress
            # means roundoff dominates
            stalled = stalled + 1 if steps >= 1024 and err > last_err / 2 else 0
            if stalled >= 2:
                raise NumericalFailure(f"integrator stalled at error {err:.1e} above tolerance {tol}")
            last_err, prev = err, cur
        self.steps = steps
        self._tab = _table(p, steps)

    def w(self, mu) -> np.ndarray:
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        return _integrate(self.p, mu, self.steps, self._tab) - self.p.theta0


def total_angle(p: SLProblem, tol: float = 1e-8, numeric: bool = False) -> float:
    """Total angle of ``t -> g_t(lambda_0)``; closed form when ``a`` is constant."""
    if p.const is not None and not numeric:
        return float(p.const)
    return float(Shooter(p, tol).w(0.0)[0])


def check_transverse(p: SLProblem, angle: float | None = None, tol: float = 1e-8) -> float:
    """Return the total angle, refusing data with ``g_1(lambda_0) = lambda_1``."""
    ang = total_angle(p, tol) if angle is None else angle
    r = math.remainder(ang - (p.theta1 - p.theta0), math.pi)
    if abs(r) < TRANSVERSALITY_MARGIN:
        raise InputError("boundary condition is not transverse: g_1(lambda_0) = lambda_1")
    return ang


@dataclass(frozen=True)
class Eigenpair:
    mu: float
    angle: float  # total angle of the eigenvector path


def spectrum_near_zero(p: SLProblem, k: int = 4, tol: float = 1e-6,
                       int_tol: float = 1e-8, max_iter: int = 200) -> list[Eigenpair]:
    """The ``k`` eigenvalues closest to 0, increasing, with winding labels.

    Each eigenvalue solves ``w(mu) = theta1 - theta0 + j pi``; the targets
    around ``w(0)`` are solved together by a vectorized bracketing iteration.
    """
    if k < 1:
        raise InputError("k must be positive")
    lo_b, hi_b = p.eigen_bounds()
    base = p.theta1 - p.theta0
    # brackets for target T: [lo_b - T - 1, hi_b - T + 1]
    ang0 = total_angle(p, int_tol)
    check_transverse(p, ang0)
    j0 = math.floor((ang0 - base) / math.pi)
    # mu is monotone in j, so the k nearest zero lie within k labels of j0
    js = np.arange(j0 - k, j0 + k + 2)
    targets = base + js * math.pi
    lo = lo_b - targets - 1.0
    hi = hi_b - targets + 1.0
    probe = np.concatenate([[0.0], lo, hi])
    shoot = Shooter(p, int_tol, probe=probe)
    wlo, whi = shoot.w(lo), shoot.w(hi)
    if np.any(wlo < targets) or np.any(whi > targets):
        raise NumericalFailure("eigenvalue bracket does not enclose the root")
    # Illinois iteration: regula falsi that halves a stale end's value, so
    # both ends converge and the bracket is kept at every step
    flo, fhi = wlo - targets, whi - targets
    side = np.zeros(len(targets), dtype=int)
    it = 0
    while np.max(hi - lo) > tol * 1e-6:
        it += 1
        if it > max_iter:
            raise NumericalFailure(f"root refinement did not reach tolerance {tol} in {max_iter} steps")
        x = (lo * fhi - hi * flo) / (fhi - flo)
        x = np.where((x > lo) & (x < hi), x, (lo + hi) / 2)
        fx = shoot.w(x) - targets
        up = fx > 0
        lo, flo = np.where(up, x, lo), np.where(up, fx, flo)
        hi, fhi = np.where(up, hi, x), np.where(up, fhi, fx)
        fhi = np.where(up & (side == 1), fhi / 2, fhi)
        flo = np.where(~up & (side == -1), flo / 2, flo)
        side = np.where(up, 1, -1)
        done = fx == 0
        lo, hi = np.where(done, x, lo), np.where(done, x, hi)
    mus = (lo + hi) / 2
    order = np.argsort(np.abs(mus))[:k]
    chosen = sorted(order, key=lambda i: mus[i])
    out = [Eigenpair(float(mus[i]), float(targets[i])) for i in chosen]
    for a, b in zip(out, out[1:]):
        if abs((a.angle - b.angle) - math.pi) > 1e-9 or not a.mu < b.mu:
            raise NumericalFailure("eigenvalues nearest zero are not consecutive")
    for e in out:
        if (e.mu < 0) != (e.angle > ang0):
            raise NumericalFailure("sign rule violated; tolerance too loose for this problem")
    return out


def closed_form_spectrum(const: float, theta0: float, theta1: float, js: Sequence[int]) -> list[float]:
    """``mu_j = angle + theta0 - theta1 + j pi`` for ``a_t = angle * Id``."""
    return [const + _line_angle(theta0) - _line_angle(theta1) + j * math.pi for j in js]


def angle_scan_roots(p: SLProblem, mu_lo: float, mu_hi: float, n: int = 4001,
                     int_tol: float = 1e-8) -> int:
    """Number of eigenvalues in ``(mu_lo, mu_hi)`` from a dense scan of ``w``."""
    grid = np.linspace(mu_lo, mu_hi, n)
    shoot = Shooter(p, int_tol, probe=[mu_lo, mu_hi])
    w = shoot.w(grid)
    base = p.theta1 - p.theta0
    cells = np.floor((w - base) / math.pi)
    return int(cells[0] - cells[-1])


# ---------------------------------------------------------------------------
# index formula
# ---------------------------------------------------------------------------


INPUT, OUTPUT = "input", "output"


@dataclass(frozen=True)
class End:
    problem: SLProblem
    role: str

    def __post_init__(self):
        if self.role not in (INPUT, OUTPUT):
            raise InputError(f"role must be 'input' or 'output', got {self.role!r}")

    def entry_exit(self) -> tuple[float, float]:
        p = self.problem
        return (p.theta0, p.theta1) if self.role == INPUT else (p.theta1, p.theta0)

    def relabeled(self) -> "End":
        return End(self.problem.relabeled(), OUTPUT if self.role == INPUT else INPUT)


@dataclass(frozen=True)
class CROperatorData:
    """Ends in boundary order; ``arcs[k]`` runs from end ``k`` to end ``k + 1``."""

    euler: int
    ends: tuple
    arcs: tuple

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(self.ends))
        object.__setattr__(self, "arcs", tuple(float(a) for a in self.arcs))
        if not self.ends:
            raise InputError("need at least one end")
        if len(self.arcs) != len(self.ends):
            raise InputError(f"need one boundary arc per end, got {len(self.arcs)} "
                             f"for {len(self.ends)} ends")
        n = len(self.ends)
        for k in range(n):
            _, exit_ = self.ends[k].entry_exit()
            entry, _ = self.ends[(k + 1) % n].entry_exit()
            r = math.remainder(self.arcs[k] - (entry - exit_), math.pi)
            if abs(r) > 1e-9:
                raise InputError(f"arc {k} does not join the line of end {k} "
                                 f"to the line of end {(k + 1) % n}")


@dataclass(frozen=True)
class IndexReport:
    degree: int
    index: int
    injective: bool
    regular_if_index_zero: bool
    angles: tuple  # connecting-path angle chosen per end


def connecting_angle(end: End, tol: float = 1e-8) -> float:
    """Angle of the chosen class of paths from ``lambda_0`` to ``lambda_1``."""
    p = end.problem
    ang = check_transverse(p, tol=tol)
    base = p.theta1 - p.theta0
    if end.role == INPUT:
        j = math.ceil((ang - base) / math.pi) - 1
    else:
        j = math.floor((ang - base) / math.pi) + 1
    alpha = base + j * math.pi
    if end.role == INPUT and not alpha < ang < alpha + math.pi:
        raise NumericalFailure("selection rule failed for an input end")
    if end.role == OUTPUT and not alpha - math.pi < ang < alpha:
        raise NumericalFailure("selection rule failed for an output end")
    return alpha


def index(data: CROperatorData, tol: float = 1e-8) -> IndexReport:
    """``index(D) = chi + deg(lambda_hat)`` with the degree read off boundary angles."""
    angles = []
    total = sum(data.arcs)
    for end in data.ends:
        alpha = connecting_angle(end, tol)
        angles.append(alpha)
        total += alpha if end.role == INPUT else -alpha
    q = total / math.pi
    deg = round(q)
    if abs(q - deg) > 1e-6:
        raise AssertionError(f"total boundary angle {total} is not a multiple of pi")
    ind = data.euler + deg
    return IndexReport(deg, ind, deg < 0, data.euler == 1 and ind == 0, tuple(angles))


def relabel(data: CROperatorData, k: int) -> CROperatorData:
    ends = list(data.ends)
    ends[k] = ends[k].relabeled()
    return CROperatorData(data.euler, tuple(ends), data.arcs)


def constant_strip() -> CROperatorData:
    """Strip with ``a = 0`` and lines at 0 and pi/2 on both ends."""
    p = SLProblem(0.0, math.pi / 2, const=0.0)
    return CROperatorData(1, (End(p, INPUT), End(p, OUTPUT)), (0.0, 0.0))
