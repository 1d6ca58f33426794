"""Blade element momentum model of a rotor with linearly varying twist and chord.

The span between the root and tip radius is split into equal annuli.  In
each annulus the axial and tangential induction factors are found by damped
fixed-point iteration of the blade-element / momentum balance with the
Prandtl tip-loss factor; for heavily loaded elements (a > 0.4) Buhl's
empirical thrust relation replaces the momentum one.  Elemental torque and
thrust are summed into shaft power and axial force.

The solver is vectorized over a batch of designs so that noise samples and
whole populations can be evaluated in one call.  Internally everything is
SI; rotor speed enters in rpm and angles in degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import ModelError
from .polar import PolarTable

CHORD_SUM = 1.095

N_ELEMENTS = 40
RELAXATION = 0.25
TOLERANCE = 1e-8
MAX_ITER = 500
HIGH_INDUCTION = 0.4

OK, NO_CONVERGENCE, OUT_OF_RANGE, INVALID = 0, 1, 2, 3
STATUS_CODES = {
    OK: None,
    NO_CONVERGENCE: "bemt-no-convergence",
    OUT_OF_RANGE: "polar-out-of-range",
    INVALID: "invalid-geometry",
}


class BEMTError(ModelError):
    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class BladeDesign:
    gamma_r: float  # root twist, deg
    gamma_t: float  # tip twist, deg
    c_r: float      # root chord, m
    omega: float    # rotor speed, rpm
    chord_sum: float = CHORD_SUM

    @property
    def c_t(self) -> float:
        return self.chord_sum - self.c_r


@dataclass(frozen=True)
class RotorEnvironment:
    b: int = 2
    r_t: float = 5.0
    r_r: float = 1.27
    rho: float = 1.25
    v_re: float = 10.0

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 1:
            raise ModelError(f"blade count must be a positive integer, got {self.b}")
        if not self.r_t > self.r_r > 0:
            raise ModelError("need tip radius > root radius > 0")
        if self.rho <= 0:
            raise ModelError("air density must be positive")
        if self.v_re < 0:
            raise ModelError("wind speed must be >= 0")


@dataclass(frozen=True)
class RotorPerformance:
    P: float    # shaft power, W
    F_a: float  # axial thrust, N

    def power_coefficient(self, env: RotorEnvironment) -> float:
        return self.P / (0.5 * env.rho * swept_area(env.r_t, env.r_r) * env.v_re**3)


@dataclass
class RotorSolution:
    """Batch result; ``status`` holds one of the module's integer codes per design."""

    P: np.ndarray
    F_a: np.ndarray
    status: np.ndarray
    iterations: np.ndarray
    high_induction: np.ndarray  # number of elements on the empirical thrust branch

    @property
    def codes(self) -> list[Optional[str]]:
        return [STATUS_CODES[int(s)] for s in self.status]


def swept_area(r_t, r_r):
    return np.pi * (np.asarray(r_t) ** 2 - np.asarray(r_r) ** 2)


def _tip_loss(tip, sin_phi):
    """Prandtl factor; ``tip`` is b (r_t - r) / (2 r)."""
    s = np.maximum(np.abs(sin_phi), 1e-6)
    expo = np.exp(-tip / s)
    return np.maximum((2.0 / np.pi) * np.arccos(np.clip(expo, 0.0, 1.0)), 1e-6)


def _induction_update(a, ap, V, Om_r, theta, sigma, tip, polar):
    """One un-relaxed update of (a, a') plus the element quantities used.

    ``Om_r`` is the blade speed Omega r, ``sigma`` the local solidity
    b c / (2 pi r) and ``tip`` the tip-loss exponent factor.
    """
    phi = np.arctan2((1.0 - a) * V, (1.0 + ap) * Om_r)
    sphi, cphi = np.sin(phi), np.cos(phi)
    alpha = np.degrees(phi) - theta
    cl, cd = polar.lookup_clamped(alpha)
    cn = cl * cphi + cd * sphi
    ct = cl * sphi - cd * cphi
    F = _tip_loss(tip, sphi)
    sphi_safe = np.where(np.abs(sphi) < 1e-9, 1e-9, sphi)
    k = sigma * cn / (4.0 * F * sphi_safe**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        a_new = k / (1.0 + k)
        high = k > HIGH_INDUCTION / (1.0 - HIGH_INDUCTION)
        if np.any(high):
            # Buhl's relation, inverted for a given local thrust coefficient
            g1 = 2.0 * F * k - (10.0 / 9.0 - F)
            g2 = np.maximum(2.0 * F * k - F * (4.0 / 3.0 - F), 0.0)
            g3 = 2.0 * F * k - (25.0 / 9.0 - 2.0 * F)
            small = np.abs(g3) < 1e-6
            buhl = np.where(small, 1.0 - 1.0 / (2.0 * np.sqrt(np.where(g2 > 0, g2, 1.0))),
                            (g1 - np.sqrt(g2)) / np.where(small, 1.0, g3))
            a_new = np.where(high, buhl, a_new)
        kp = sigma * ct / (4.0 * F * sphi_safe * cphi)
        ap_new = kp / (1.0 - kp)
    return a_new, ap_new, high, alpha, cn, ct


def solve_rotor(gamma_r, gamma_t, c_r, c_t, omega_rpm, b, r_t, r_r, rho, v, polar: PolarTable,
                n_elements: int = N_ELEMENTS, relaxation: float = RELAXATION, tol: float = TOLERANCE,
                max_iter: int = MAX_ITER, momentum_only: bool = False,
                forced_induction: Optional[tuple[float, float]] = None) -> RotorSolution:
    """Power and thrust for a batch of designs (all arguments broadcast to (k,)).

    ``momentum_only`` with ``forced_induction=(a, a')`` skips the blade
    element side entirely: each annulus carries momentum thrust
    ``4 pi r rho V^2 a (1 - a) dr`` and delivers the work ``dT V (1 - a)``,
    with unit loss factor.  It exists to check the integration against the
    actuator-disc identity.
    """
    arrs = np.broadcast_arrays(*(np.atleast_1d(np.asarray(v_, dtype=float)) for v_ in
                                 (gamma_r, gamma_t, c_r, c_t, omega_rpm, b, r_t, r_r, rho, v)))
    gamma_r, gamma_t, c_r, c_t, omega_rpm, b, r_t, r_r, rho, v = (x.reshape(-1) for x in arrs)
    k = gamma_r.shape[0]
    status = np.zeros(k, dtype=int)
    status[~((r_t > r_r) & (r_r > 0) & (b >= 1) & (rho > 0) & (v >= 0) & (c_r > 0) & (c_t > 0)
             & np.all(np.isfinite(np.column_stack(arrs)).reshape(k, -1), axis=1))] = INVALID

    frac = (np.arange(n_elements) + 0.5) / n_elements
    edges = r_r[:, None] + (r_t - r_r)[:, None] * (np.arange(n_elements + 1) / n_elements)[None, :]
    dr = np.diff(edges, axis=1)
    r = 0.5 * (edges[:, 1:] + edges[:, :-1])
    theta = gamma_r[:, None] + (gamma_t - gamma_r)[:, None] * frac[None, :]
    chord = c_r[:, None] + (c_t - c_r)[:, None] * frac[None, :]
    Om = omega_rpm * (2.0 * np.pi / 60.0)
    V = np.broadcast_to(v[:, None], r.shape)
    OmB = np.broadcast_to(Om[:, None], r.shape)
    B = np.broadcast_to(b[:, None], r.shape)
    RT = np.broadcast_to(r_t[:, None], r.shape)

    P = np.zeros(k)
    T = np.zeros(k)
    iters = np.zeros(k, dtype=int)
    n_high = np.zeros(k, dtype=int)

    if momentum_only:
        if forced_induction is None:
            raise ModelError("momentum_only mode needs forced_induction=(a, a')")
        a0, _ = forced_induction
        dT = 4.0 * np.pi * r * rho[:, None] * V**2 * a0 * (1.0 - a0) * dr
        T = np.where(status == OK, dT.sum(axis=1), np.nan)
        P = np.where(status == OK, (dT * V * (1.0 - a0)).sum(axis=1), np.nan)
        return RotorSolution(P, T, status, iters, n_high)

    a = np.full(r.shape, 0.3)
    ap = np.zeros(r.shape)
    live = (status == OK)[:, None] & (V > 0)
    if forced_induction is not None:
        a[:], ap[:] = forced_induction
        live[:] = False
    Om_r = OmB * r
    sigma = B * chord / (2.0 * np.pi * r)
    tip = 0.5 * B * (RT - r) / r

    # iterate on a compacted working set of the unconverged elements
    a_f, ap_f = a.reshape(-1), ap.reshape(-1)
    it_f = np.zeros(a_f.size, dtype=int)
    failed_f = np.zeros(a_f.size, dtype=bool)
    work = np.flatnonzero(live.reshape(-1))
    consts = [x.reshape(-1)[work] for x in (V, Om_r, theta, sigma, tip)]
    a_w, ap_w = a_f[work], ap_f[work]
    for it in range(1, max_iter + 1):
        if work.size == 0:
            break
        a_new, ap_new, _, _, _, _ = _induction_update(a_w, ap_w, *consts, polar)
        bad = ~(np.isfinite(a_new) & np.isfinite(ap_new))
        resid = np.maximum(np.abs(a_new - a_w), np.abs(ap_new - ap_w))
        done = (resid < tol) & ~bad
        a_w = np.where(done, a_new, a_w + relaxation * (a_new - a_w))
        ap_w = np.where(done, ap_new, ap_w + relaxation * (ap_new - ap_w))
        finished = done | bad
        if np.any(finished):
            idx = work[finished]
            a_f[idx], ap_f[idx], it_f[idx] = a_w[finished], ap_w[finished], it
            # non-finite update: stop iterating the element, flag the design
            failed_f[work[bad]] = True
            keep = ~finished
            work, a_w, ap_w = work[keep], a_w[keep], ap_w[keep]
            consts = [c[keep] for c in consts]
    # whatever is left hit the iteration cap
    a_f[work], ap_f[work], it_f[work] = a_w, ap_w, max_iter
    failed_f[work] = True
    a_f[failed_f] = np.nan
    status[np.any(failed_f.reshape(r.shape), axis=1) & (status == OK)] = NO_CONVERGENCE
    iters = it_f.reshape(r.shape).max(axis=1)

    calm = (v == 0) & (status == OK)
    good = (status == OK) & ~calm
    if np.any(good):
        g = np.flatnonzero(good)
        sl = (g, slice(None))
        _, _, high, alpha, cn, ct = _induction_update(
            a[sl], ap[sl], V[sl], Om_r[sl], theta[sl], sigma[sl], tip[sl], polar)
        outside = ~np.all(polar.covers(alpha), axis=1)
        status[g[outside]] = OUT_OF_RANGE
        n_high[g] = high.sum(axis=1)
        W2 = ((1.0 - a[sl]) * V[sl]) ** 2 + ((1.0 + ap[sl]) * OmB[sl] * r[sl]) ** 2
        q = 0.5 * rho[g, None] * W2 * B[sl] * chord[sl]
        T[g] = np.sum(q * cn * dr[g], axis=1)
        P[g] = Om[g] * np.sum(q * ct * r[sl] * dr[g], axis=1)
    P = np.where(status == OK, P, np.nan)
    T = np.where(status == OK, T, np.nan)
    return RotorSolution(P, T, status, iters, n_high)


def bemt_evaluate(d: BladeDesign, env: RotorEnvironment, polar: PolarTable,
                  n_elements: int = N_ELEMENTS, **solver) -> RotorPerformance:
    """Single-design wrapper; raises :class:`BEMTError` on solver failure."""
    sol = solve_rotor(d.gamma_r, d.gamma_t, d.c_r, d.c_t, d.omega, env.b, env.r_t, env.r_r,
                      env.rho, env.v_re, polar, n_elements=n_elements, **solver)
    s = int(sol.status[0])
    if s != OK:
        raise BEMTError(f"BEMT failed for {d}: {STATUS_CODES[s]}", STATUS_CODES[s])
    return RotorPerformance(float(sol.P[0]), float(sol.F_a[0]))


def power_coefficient(P, rho, r_t, r_r, v):
    denom = 0.5 * np.asarray(rho) * swept_area(r_t, r_r) * np.asarray(v, dtype=float) ** 3
    return np.asarray(P) / denom if np.ndim(P) else float(P) / float(denom)


BETZ = 16.0 / 27.0
