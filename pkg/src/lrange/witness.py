"""Constructive witnesses: unitaries that realize pinched targets.

Given a pinched diagonal tuple, the image point ``y = L(U* D_hat U)`` is
known to stay inside the range of the unpinched tuple.  The routines here
make that effective: they return a unitary ``u'`` with
``L(u'* D u') ~ y``, found by sliding along a geodesic from ``U`` to a
slice-degenerating unitary until the query point crosses the slice
surface, then reading the crossing angles off the ellipsoid
parametrization.  Chains of pinchings are handled inductively, and
star-shapedness reduces to a synthesized scaling chain on the traceless
part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    ALGEBRAIC_TOL,
    DiagonalTuple,
    HermitianTuple,
    LinearMapSpec,
    NumericalError,
    UnitaryMatrix,
    conjugate_tuple,
    eval_map,
    star_center,
)
from .ellipsoid import (
    ON_SURFACE,
    OUTSIDE,
    EllipsoidParams,
    _RANK_CUTOFF,
    _slice_geometry,
    angles_of_omega,
    degenerate_unitary,
    lift_map,
    nearest_surface,
    slice_membership,
    t_theta_phi,
)
from .pinching import PinchChain, Pinching, ScalingTarget, SynthResult, apply_chain, synth_scaling

__all__ = [
    "Witness",
    "PathSpec",
    "StarWitness",
    "WitnessError",
    "principal_log_unitary",
    "make_path",
    "unitary_path",
    "single_pinch_witness",
    "chain_witness",
    "star_scaling_chain",
    "star_point_witness",
]

_GRID_POINTS = 200
_MAX_BISECT = 60
_SCAN_BAND = 1e-9


class WitnessError(RuntimeError):
    """The crossing search failed; diagnostics are carried in the message."""


@dataclass(frozen=True, eq=False)
class Witness:
    """A certified preimage: ``L(uprime* D uprime)`` hits the target.

    ``theta``, ``phi`` and ``t`` record where on the rotation family and
    along the degeneration path the crossing was found; ``residual`` is
    the re-evaluated distance to the target, never an estimate.
    """

    uprime: UnitaryMatrix
    theta: float
    phi: float
    t: float
    residual: float


@dataclass(frozen=True, eq=False)
class PathSpec:
    """The geodesic ``f(t) = U exp(t K)`` with ``K = log(U* V)`` principal.

    The generator's eigendecomposition is cached so path points cost two
    matrix products each.
    """

    start: UnitaryMatrix
    end: UnitaryMatrix
    generator: np.ndarray

    def __post_init__(self):
        h = (self.generator - self.generator.conj().T) / 2j
        h = (h + h.conj().T) / 2
        phases, basis = np.linalg.eigh(h)
        object.__setattr__(self, "_phases", phases)
        object.__setattr__(self, "_basis", basis)
        endpoint = self.at_raw(np.array([1.0]))[0]
        drift = float(np.linalg.norm(endpoint - self.end.mat))
        if drift > ALGEBRAIC_TOL:
            raise NumericalError(
                f"geodesic endpoint misses target by {drift:.3e}"
            )

    def at_raw(self, ts: np.ndarray) -> np.ndarray:
        """Path points at parameters ``ts`` as one (T, n, n) array."""
        basis = self._basis
        rot = np.exp(1j * np.outer(ts, self._phases))
        return np.einsum(
            "ab,tb,cb->tac", self.start.mat @ basis, rot, basis.conj()
        )

    def at(self, t: float) -> UnitaryMatrix:
        return UnitaryMatrix(self.at_raw(np.array([float(t)]))[0])


def principal_log_unitary(w: UnitaryMatrix) -> np.ndarray:
    """Skew-Hermitian principal logarithm of a unitary.

    Eigenphases are taken in (-pi, pi]; a phase landing exactly on -pi is
    deterministically moved to +pi.  Works for clustered and degenerate
    spectra via the complex Schur form.
    """
    t, z = scipy.linalg.schur(w.mat, output="complex")
    lam = np.diagonal(t)
    mags = np.abs(lam)
    lam = lam / np.where(mags > 0, mags, 1.0)
    psi = np.angle(lam)
    psi = np.where(psi <= -np.pi, psi + 2.0 * np.pi, psi)
    k = (z * (1j * psi)) @ z.conj().T
    return (k - k.conj().T) / 2


def make_path(u: UnitaryMatrix, v: UnitaryMatrix) -> PathSpec:
    if u.n != v.n:
        raise ValueError(f"path endpoints disagree: n={u.n} vs n={v.n}")
    w = UnitaryMatrix(u.mat.conj().T @ v.mat)
    return PathSpec(u, v, principal_log_unitary(w))


def unitary_path(u: UnitaryMatrix, v: UnitaryMatrix, t: float) -> UnitaryMatrix:
    """The point ``f(t) = U exp(t log(U* V))``; ``f(0) = U``, ``f(1) = V``."""
    return make_path(u, v).at(t)


def _reduction_permutation(s: int, t: int, n: int) -> np.ndarray:
    """Source indices: position 1 reads slot ``s``, position 2 slot ``t``."""
    rest = [j for j in range(n) if j not in (s - 1, t - 1)]
    return np.array([s - 1, t - 1] + rest)


def _scan_stats(
    d: DiagonalTuple, us: np.ndarray, cs: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Least-norm preimage data for a batch of slices: (rho, residual, rank)."""
    a, _, _, m = _slice_geometry(d, us, cs)
    p, sig, qt = np.linalg.svd(m)
    keep = sig > _RANK_CUTOFF * sig[:, :1]
    r = y[None, :] - a
    s = np.einsum("tji,tj->ti", p, r)
    z = np.where(keep, s / np.where(keep, sig, 1.0), 0.0)
    omega = np.einsum("tji,tj->ti", qt, z)
    resid = np.linalg.norm(np.einsum("tij,tj->ti", m, omega) - r, axis=1)
    rho = np.linalg.norm(z, axis=1)
    return rho, resid, keep.sum(axis=1)


def _params_at(d: DiagonalTuple, u_mat: np.ndarray, cs: np.ndarray) -> EllipsoidParams:
    a, b, c, _ = _slice_geometry(d, u_mat[None], cs)
    return EllipsoidParams(a[0], b[0], c[0])


def _witness_at(
    d: DiagonalTuple,
    cs: np.ndarray,
    u_mat: np.ndarray,
    y: np.ndarray,
) -> tuple[float, float, float, np.ndarray]:
    """Best surface witness at a fixed path point: (theta, phi, dist, omega)."""
    params = _params_at(d, u_mat, cs)
    omega, dist = nearest_surface(params, y)
    theta, phi = angles_of_omega(omega)
    return theta, phi, dist, omega


def _pinch12_witness(
    d: DiagonalTuple,
    spec3: LinearMapSpec,
    u: UnitaryMatrix,
    y: np.ndarray,
    tol: float,
) -> tuple[UnitaryMatrix, float, float, float]:
    """Crossing search for a pinching already sitting at slots (1, 2)."""
    n = d.n
    cs = spec3.stack()
    member_band = max(1e-9, min(1e-6, tol))
    band = _SCAN_BAND
    goal = max(1e-12, 1e-3 * tol)

    verdict = slice_membership(_params_at(d, u.mat, cs), y, member_band)
    if verdict.kind == OUTSIDE:
        raise WitnessError(
            "target lies outside the hull of the initial slice "
            f"(distance {verdict.distance:.3e}); the pinched point must sit "
            "inside, so the inputs are inconsistent"
        )
    if verdict.kind == ON_SURFACE:
        theta, phi, dist, _ = _witness_at(d, cs, u.mat, y)
        uprime = UnitaryMatrix(t_theta_phi(theta, phi, n).mat @ u.mat)
        return uprime, theta, phi, 0.0

    # strictly inside a non-degenerate slice: slide toward the flattened one
    cert = degenerate_unitary(d, spec3)
    path = make_path(u, cert.v)
    ts = np.linspace(0.0, 1.0, _GRID_POINTS)
    rho, resid, rank = _scan_stats(d, path.at_raw(ts), cs, y)
    inside = (resid <= band) & (rank == 3) & (rho < 1.0 - band)
    exits = np.nonzero(~inside)[0]

    if exits.size == 0:
        lo, hi = float(ts[-2]), 1.0
    else:
        first = int(exits[0])
        if first == 0:
            raise WitnessError(
                "slice membership flipped between verdict and scan at t=0; "
                f"rho={rho[0]:.6f}, residual={resid[0]:.3e}"
            )
        lo, hi = float(ts[first - 1]), float(ts[first])

    best: tuple[float, float, float, float] | None = None  # (dist, t, theta, phi)
    for _ in range(_MAX_BISECT):
        u_hi = path.at_raw(np.array([hi]))[0]
        theta, phi, dist, _ = _witness_at(d, cs, u_hi, y)
        if best is None or dist < best[0]:
            best = (dist, hi, theta, phi)
        if dist <= goal:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        rho_m, resid_m, rank_m = _scan_stats(d, path.at_raw(np.array([mid])), cs, y)
        if (resid_m[0] <= band) and (rank_m[0] == 3) and (rho_m[0] < 1.0 - band):
            lo = mid
        else:
            hi = mid

    # degenerate endpoint fallback: the flattened slice fills its hull
    theta1, phi1, dist1, _ = _witness_at(d, cs, path.at_raw(np.array([1.0]))[0], y)
    if best is None or dist1 < best[0]:
        best = (dist1, 1.0, theta1, phi1)

    dist, t_star, theta, phi = best
    if dist > tol:
        raise WitnessError(
            f"crossing search stalled: best surface distance {dist:.3e} at "
            f"t={t_star:.6f} exceeds tolerance {tol:.1e}"
        )
    uprime = UnitaryMatrix(
        t_theta_phi(theta, phi, n).mat @ path.at_raw(np.array([t_star]))[0]
    )
    return uprime, theta, phi, t_star


def single_pinch_witness(
    d: DiagonalTuple,
    spec: LinearMapSpec,
    pinch: Pinching,
    u: UnitaryMatrix | None = None,
    tol: float = 1e-6,
) -> Witness:
    """Witness for one pinching: ``L(uprime* D uprime) ~ L(U* D_hat U)``.

    The pinched pair is first permuted to slots (1, 2).  The target is an
    exact convex combination of the slice points at ``theta = 0`` and
    ``theta = pi/2``, so it lies in the hull of the slice at ``U``; the
    geodesic toward the degenerating unitary then must carry the slice
    surface through the target, and the crossing is located by a 200-point
    scan followed by bisection (at most 60 steps).
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    n = d.n
    if n < 2:
        raise ValueError("witnesses need n >= 2")
    if spec.l == 3 and n < 3:
        raise ValueError("three output coordinates require n >= 3")
    if spec.l > 3:
        raise ValueError(
            f"witnesses handle at most 3 output coordinates, got l={spec.l}; "
            "inclusion genuinely fails beyond that"
        )
    if pinch.t > n:
        raise ValueError(f"pinching {pinch} exceeds dimension n={n}")
    spec3 = lift_map(spec)
    if spec3.m != d.m or spec3.n != n:
        raise ValueError(
            f"map expects (m={spec3.m}, n={spec3.n}), tuple has (m={d.m}, n={n})"
        )
    if u is None:
        u = UnitaryMatrix.identity(n)
    if u.n != n:
        raise ValueError(f"unitary has n={u.n}, tuple has n={n}")

    d_hat = apply_chain(PinchChain(n, (pinch,)), d)
    y = eval_map(spec3, conjugate_tuple(d_hat.to_hermitian(), u))

    sigma = _reduction_permutation(pinch.s, pinch.t, n)
    pi_mat = np.zeros((n, n))
    pi_mat[np.arange(n), sigma] = 1.0
    d_red = DiagonalTuple(d.vectors[:, sigma])
    u_red = UnitaryMatrix(pi_mat @ u.mat)

    uprime_red, theta, phi, t_star = _pinch12_witness(d_red, spec3, u_red, y, tol)
    uprime = UnitaryMatrix(pi_mat.T @ uprime_red.mat)

    achieved = eval_map(spec3, conjugate_tuple(d.to_hermitian(), uprime))
    residual = float(np.linalg.norm(achieved - y))
    if residual > tol:
        raise WitnessError(
            f"witness re-evaluation residual {residual:.3e} exceeds tol {tol:.1e}"
        )
    return Witness(uprime, theta, phi, t_star, residual)


def chain_witness(
    d: DiagonalTuple,
    spec: LinearMapSpec,
    chain: PinchChain,
    u: UnitaryMatrix | None = None,
    tol: float = 1e-6,
) -> Witness:
    """Witness for a whole chain, by induction over its pinchings.

    The fixed target is ``y0 = L(U* D_hat U)`` for the fully pinched
    tuple.  Pinchings are peeled off front to back: each single-pinch
    witness re-expresses the running target over a one-step-less-pinched
    tuple, accumulating at most ``len(chain) * tol`` of residual.
    """
    n = d.n
    if chain.n != n:
        raise ValueError(f"chain acts on n={chain.n}, tuple has n={n}")
    if u is None:
        u = UnitaryMatrix.identity(n)
    spec3 = lift_map(spec)
    y0 = eval_map(
        spec3, conjugate_tuple(apply_chain(chain, d).to_hermitian(), u)
    )
    current = u
    theta = phi = t_star = 0.0
    for j, pinch in enumerate(chain.steps):
        partial = apply_chain(PinchChain(n, chain.steps[j + 1 :]), d)
        w = single_pinch_witness(partial, spec, pinch, current, tol)
        current, theta, phi, t_star = w.uprime, w.theta, w.phi, w.t
    achieved = eval_map(spec3, conjugate_tuple(d.to_hermitian(), current))
    residual = float(np.linalg.norm(achieved - y0))
    return Witness(current, theta, phi, t_star, residual)


@dataclass(frozen=True, eq=False)
class StarWitness:
    """A star-shapedness certificate for one ray point.

    ``witness.residual`` is the full re-evaluated error against the convex
    combination ``alpha L(U* D U) + (1 - alpha) center``; the synthesis
    error of the scaling chain is surfaced separately since it bounds the
    systematic part of that residual.
    """

    witness: Witness
    target: np.ndarray
    synth_error: float
    chain_length: int


def star_scaling_chain(
    d: DiagonalTuple, spec: LinearMapSpec, alpha: float, tol: float
) -> SynthResult:
    """Pinching chain approximating multiplication by ``alpha``.

    The synthesis tolerance is budgeted so that the chain's systematic
    error, amplified by the map norm and the traceless data scale, stays
    well under the witness tolerance.  Chains depend only on ``(n,
    alpha)`` up to that budget, so callers sweeping many unitaries should
    synthesize once and pass the result through.
    """
    means = d.vectors.mean(axis=1)
    scale = float(np.abs(d.vectors - means[:, None]).max())
    cs = lift_map(spec).stack()
    row_norms = np.linalg.norm(cs, axis=(2, 3)).sum(axis=1)
    l_scale = float(np.sqrt((row_norms**2).sum()))
    synth_tol = min(1e-2, tol / (4.0 * max(1.0, l_scale * scale * np.sqrt(d.m))))
    return synth_scaling(ScalingTarget(d.n, alpha), tol=max(synth_tol, 1e-13))


def star_point_witness(
    d: DiagonalTuple,
    spec: LinearMapSpec,
    u: UnitaryMatrix,
    alpha: float,
    tol: float = 1e-3,
    synth: SynthResult | None = None,
) -> StarWitness:
    """Witness that the ray point toward the trace center stays in range.

    The tuple is first reduced to its traceless part (the center shift
    commutes with conjugation); on traceless data the scaling map acts as
    plain multiplication by ``alpha``, so a synthesized scaling chain plus
    the inductive chain witness produces the certificate.  For ``n = 2``
    with at most two output coordinates the reduced range is an affine
    image of a single numerical range, hence convex, and a descent-based
    membership query replaces the chain construction.
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"ray parameter must lie in [0, 1], got {alpha}")
    if spec.l > 3:
        raise ValueError(
            f"star witnesses handle at most 3 output coordinates, got l={spec.l}"
        )
    n = d.n
    if spec.l == 3 and n < 3:
        raise ValueError("three output coordinates require n >= 3")
    if u.n != n:
        raise ValueError(f"unitary has n={u.n}, tuple has n={n}")
    herm = d.to_hermitian()
    spec3 = lift_map(spec)
    target = alpha * eval_map(spec3, conjugate_tuple(herm, u)) + (
        1.0 - alpha
    ) * star_center(spec3, herm)

    if alpha == 1.0:
        achieved = eval_map(spec3, conjugate_tuple(herm, u))
        residual = float(np.linalg.norm(achieved - target))
        return StarWitness(Witness(u, 0.0, 0.0, 0.0, residual), target, 0.0, 0)

    if n == 2:
        from .optimize import DescentOptions, orbit_distance

        result = orbit_distance(
            spec3,
            herm,
            target,
            DescentOptions(target_distance=0.25 * tol),
        )
        return StarWitness(
            Witness(result.ubest, 0.0, 0.0, 0.0, result.distance), target, 0.0, 0
        )

    means = d.vectors.mean(axis=1)
    d0 = DiagonalTuple(d.vectors - means[:, None])
    if synth is None:
        synth = star_scaling_chain(d, spec3, alpha, tol)
    chain = synth.chain
    step_tol = min(1e-6, tol / (2.0 * max(1, len(chain))))
    cw = chain_witness(d0, spec3, chain, u, tol=max(step_tol, 1e-10))
    achieved = eval_map(spec3, conjugate_tuple(herm, cw.uprime))
    residual = float(np.linalg.norm(achieved - target))
    return StarWitness(
        Witness(cw.uprime, cw.theta, cw.phi, cw.t, residual),
        target,
        synth.achieved_error,
        len(chain),
    )
