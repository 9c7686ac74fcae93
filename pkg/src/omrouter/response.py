"""Frequency-domain response and output spectra of the probed optical port.

Two independent evaluation paths are provided on purpose:

* ``closed`` -- explicit algebraic coefficients obtained by eliminating the
  mechanical fluctuation from the linearized dynamics (fast, vectorized);
* ``oracle`` -- a direct solve of the 6x6 frequency-domain linear system in
  the doubled basis ``(da, da^+, dc, dc^+, dq, dp)``.

The oracle is the arbiter of correctness: the closed forms were derived by
hand and every sign/conjugation choice in them is validated against the
matrix solve (see docs/derivation_notes.md).  The probe frequency ``omega``
is measured relative to the optical pump carrier, so the conventional axis
value "omega/omega_m = 1" is the lower mechanical sideband.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, SingularPointError
from .model import CONSTANTS, SystemParams, thermal_occupation
from .steady import SteadyState, solve_steady_state

__all__ = [
    "ResponseCoefficients",
    "SpectrumPoint",
    "ScanResult",
    "closed_form_coefficients",
    "linear_solve_coefficients",
    "coefficients",
    "reflection",
    "transmission",
    "thermal_noise_spectrum",
    "vacuum_noise_spectrum",
    "scan_spectrum",
    "closed_vs_oracle_deviation",
]

_D_FLOOR = 1e-300
_COEFF_NAMES = ("e1", "f1", "e2", "f2", "v")


@dataclass(frozen=True)
class ResponseCoefficients:
    """Linear response of the optical fluctuation at one frequency.

    ``e1``/``f1`` multiply the co- and counter-rotating optical inputs,
    ``e2``/``f2`` the microwave inputs, and ``v`` the mechanical force noise.
    ``a1``..``b2`` are the four shifted cavity denominators, ``n_mech`` the
    mechanical response polynomial, and ``d_det`` the common denominator of
    the closed forms.
    """

    omega: float
    e1: complex
    f1: complex
    e2: complex
    f2: complex
    v: complex
    a1: complex
    b1: complex
    a2: complex
    b2: complex
    n_mech: complex
    d_det: complex


@dataclass(frozen=True)
class SpectrumPoint:
    """One node of an output-spectrum scan (all columns dimensionless)."""

    omega: float
    r_refl: float
    t_trans: float
    s_thermal: float
    s_vacuum: float


@dataclass(frozen=True)
class ScanResult:
    """Spectrum scan output: one point per grid node plus an error summary.

    Nodes that failed evaluate to NaN columns and contribute an entry
    ``(index, omega, message)`` to ``errors``.
    """

    points: list[SpectrumPoint]
    errors: list[tuple[int, float, str]]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def _intermediates(params: SystemParams, state: SteadyState, omega):
    d1, d2 = state.delta1, state.delta2
    a1 = d1 + omega + 2j * params.kappa1
    b1 = d1 - omega - 2j * params.kappa1
    a2 = d2 + omega + 2j * params.kappa2
    b2 = d2 - omega - 2j * params.kappa2
    n = omega**2 + 1j * omega * params.gamma_m - params.omega_m**2
    hbar = CONSTANTS.hbar
    pa = 2.0 * hbar * abs(state.a_s) ** 2 * params.g1**2 * d1
    pc = 2.0 * hbar * abs(state.c_s) ** 2 * params.g2**2 * d2
    d = pa * a2 * b2 + pc * a1 * b1 + params.mass * n * a1 * b1 * a2 * b2
    return a1, b1, a2, b2, n, d


def _closed_arrays(params: SystemParams, state: SteadyState, omega):
    """Closed-form coefficient arrays and a bad-node mask."""
    a1, b1, a2, b2, n, d = _intermediates(params, state, omega)
    bad = (np.abs(d) < _D_FLOOR) | ~np.isfinite(d)
    d = np.where(bad, 1.0, d)
    hbar = CONSTANTS.hbar
    a_s, c_s = state.a_s, state.c_s
    g1, g2 = params.g1, params.g2
    s1 = math.sqrt(2.0 * params.kappa1)
    s2 = math.sqrt(2.0 * params.kappa2)

    # hbar multiplies only the coupling-squared terms of e1; putting it on
    # the mechanical term as well would be dimensionally inconsistent with
    # the shared denominator (docs/derivation_notes.md, verified vs oracle).
    e1 = -1j * s1 * (hbar * abs(a_s) ** 2 * g1**2 * a2 * b2
                     + 2.0 * hbar * abs(c_s) ** 2 * g2**2 * state.delta2 * a1
                     + params.mass * n * a1 * a2 * b2) / d
    f1 = -1j * s1 * hbar * a_s**2 * g1**2 * a2 * b2 / d
    e2 = -1j * s2 * hbar * g1 * g2 * a_s * np.conj(c_s) * a1 * a2 / d
    f2 = 1j * s2 * hbar * g1 * g2 * a_s * c_s * a1 * b2 / d
    v = a_s * g1 * a1 * a2 * b2 / d
    return {"e1": e1, "f1": f1, "e2": e2, "f2": f2, "v": v}, bad


def _oracle_system(params: SystemParams, state: SteadyState, omega):
    """Scaled 6x6 system matrix batch and the shared right-hand sides.

    Frequencies are scaled by the mechanical frequency and the mechanical
    coordinates by ``sqrt(hbar/(m*omega_m))`` so the matrix entries stay
    near unity despite the SI magnitudes.
    """
    wm = params.omega_m
    x_s = math.sqrt(CONSTANTS.hbar / (params.mass * wm))
    g1t = params.g1 * x_s / wm
    g2t = params.g2 * x_s / wm
    k1t = params.kappa1 / wm
    k2t = params.kappa2 / wm
    d1t = state.delta1 / wm
    d2t = state.delta2 / wm
    gmt = params.gamma_m / wm
    om = np.atleast_1d(np.asarray(omega, dtype=float)) / wm
    n = om.size
    a_s, c_s = state.a_s, state.c_s

    mat = np.zeros((n, 6, 6), dtype=complex)
    mat[:, 0, 0] = 2.0 * k1t + 1j * (d1t - om)
    mat[:, 0, 4] = 1j * g1t * a_s
    mat[:, 1, 1] = 2.0 * k1t - 1j * (d1t + om)
    mat[:, 1, 4] = -1j * g1t * np.conj(a_s)
    mat[:, 2, 2] = 2.0 * k2t + 1j * (d2t - om)
    mat[:, 2, 4] = -1j * g2t * c_s
    mat[:, 3, 3] = 2.0 * k2t - 1j * (d2t + om)
    mat[:, 3, 4] = 1j * g2t * np.conj(c_s)
    mat[:, 4, 4] = -1j * om
    mat[:, 4, 5] = -1.0
    mat[:, 5, 0] = g1t * np.conj(a_s)
    mat[:, 5, 1] = g1t * a_s
    mat[:, 5, 2] = -g2t * np.conj(c_s)
    mat[:, 5, 3] = -g2t * c_s
    mat[:, 5, 4] = 1.0
    mat[:, 5, 5] = gmt - 1j * om

    rhs = np.zeros((6, 5), dtype=complex)
    rhs[0, 0] = math.sqrt(2.0 * params.kappa1) / wm
    rhs[1, 1] = math.sqrt(2.0 * params.kappa1) / wm
    rhs[2, 2] = math.sqrt(2.0 * params.kappa2) / wm
    rhs[3, 3] = math.sqrt(2.0 * params.kappa2) / wm
    rhs[5, 4] = 1.0 / (params.mass * wm**2 * x_s)
    return mat, rhs


def _oracle_arrays(params: SystemParams, state: SteadyState, omega):
    """Matrix-solve coefficient arrays and a bad-node mask."""
    mat, rhs = _oracle_system(params, state, omega)
    n = mat.shape[0]
    bad = np.zeros(n, dtype=bool)
    try:
        sol = np.linalg.solve(mat, rhs[None, :, :])
        row = sol[:, 0, :]
    except np.linalg.LinAlgError:
        row = np.zeros((n, 5), dtype=complex)
        for i in range(n):
            try:
                row[i] = np.linalg.solve(mat[i], rhs)[0]
            except np.linalg.LinAlgError:
                bad[i] = True
                row[i] = np.nan
    nonfinite = ~np.isfinite(row).all(axis=1)
    bad |= nonfinite
    return {name: row[:, k] for k, name in enumerate(_COEFF_NAMES)}, bad


def _arrays(params, state, omega, method):
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if method == "closed":
        return _closed_arrays(params, state, omega)
    if method == "oracle":
        return _oracle_arrays(params, state, omega)
    raise InvalidParameterError(f"unknown evaluation method {method!r}")


def _build_coefficients(params, state, omega, coeffs) -> ResponseCoefficients:
    a1, b1, a2, b2, n, d = _intermediates(params, state, omega)
    return ResponseCoefficients(
        omega=float(omega),
        e1=complex(coeffs["e1"]), f1=complex(coeffs["f1"]),
        e2=complex(coeffs["e2"]), f2=complex(coeffs["f2"]),
        v=complex(coeffs["v"]),
        a1=complex(a1), b1=complex(b1), a2=complex(a2), b2=complex(b2),
        n_mech=complex(n), d_det=complex(d))


def closed_form_coefficients(params: SystemParams, state: SteadyState,
                             omega: float) -> ResponseCoefficients:
    """Closed-form response coefficients at a single frequency."""
    arrs, bad = _closed_arrays(params, state, np.atleast_1d(float(omega)))
    if bad[0]:
        raise SingularPointError(
            f"closed-form denominator vanishes at omega={omega!r}")
    return _build_coefficients(params, state, float(omega),
                               {k: v[0] for k, v in arrs.items()})


def linear_solve_coefficients(params: SystemParams, state: SteadyState,
                              omega: float) -> ResponseCoefficients:
    """Response coefficients from the direct 6x6 matrix solve."""
    arrs, bad = _oracle_arrays(params, state, np.atleast_1d(float(omega)))
    if bad[0]:
        mat, _ = _oracle_system(params, state, np.atleast_1d(float(omega)))
        try:
            cond = float(np.linalg.cond(mat[0]))
        except np.linalg.LinAlgError:
            cond = math.inf
        raise SingularPointError(
            f"fluctuation system singular at omega={omega!r} "
            f"(condition estimate {cond:.3e})")
    return _build_coefficients(params, state, float(omega),
                               {k: v[0] for k, v in arrs.items()})


def coefficients(params: SystemParams, state: SteadyState, omega: float,
                 method: str = "closed") -> ResponseCoefficients:
    if method == "closed":
        return closed_form_coefficients(params, state, omega)
    if method == "oracle":
        return linear_solve_coefficients(params, state, omega)
    raise InvalidParameterError(f"unknown evaluation method {method!r}")


def _scalar_or_array(values, bad, omega, scalar_input):
    if scalar_input:
        if bad[0]:
            raise SingularPointError(
                f"response singular at omega={float(omega)!r}")
        return float(values[0])
    return np.where(bad, np.nan, values)


def reflection(params: SystemParams, state: SteadyState, omega,
               method: str = "closed"):
    """Probability that the probe photon leaves through the input port."""
    scalar = np.isscalar(omega) or np.ndim(omega) == 0
    arrs, bad = _arrays(params, state, omega, method)
    z = math.sqrt(2.0 * params.kappa1) * arrs["e1"]
    return _scalar_or_array(np.abs(z - 1.0) ** 2, bad, omega, scalar)


def transmission(params: SystemParams, state: SteadyState, omega,
                 method: str = "closed"):
    """Probability that the probe photon leaves through the far port."""
    scalar = np.isscalar(omega) or np.ndim(omega) == 0
    arrs, bad = _arrays(params, state, omega, method)
    z = math.sqrt(2.0 * params.kappa1) * arrs["e1"]
    return _scalar_or_array(np.abs(z) ** 2, bad, omega, scalar)


def vacuum_noise_spectrum(params: SystemParams, state: SteadyState, omega,
                          method: str = "closed"):
    """Output photons per unit dimensionless bandwidth from vacuum inputs
    scattered off the counter-rotating channel, ``4*kappa1*|f1|**2``."""
    scalar = np.isscalar(omega) or np.ndim(omega) == 0
    arrs, bad = _arrays(params, state, omega, method)
    return _scalar_or_array(4.0 * params.kappa1 * np.abs(arrs["f1"]) ** 2,
                            bad, omega, scalar)


def thermal_noise_spectrum(params: SystemParams, state: SteadyState, omega,
                           method: str = "closed"):
    """Output noise transduced from the mechanical thermal bath.

    Evaluated through the Bose occupation rather than the raw ``coth``
    correlator so that it is numerically stable and exactly zero at T = 0
    for positive frequencies:

        S = 4*kappa1*|v|^2 * hbar*gamma_m*m * |omega| * (nbar + [omega < 0])
    """
    scalar = np.isscalar(omega) or np.ndim(omega) == 0
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(om == 0.0):
        raise InvalidParameterError(
            "thermal spectrum is singular at omega = 0")
    arrs, bad = _arrays(params, state, omega, method)
    nbar = thermal_occupation(np.abs(om), params.temperature)
    weight = np.abs(om) * (np.atleast_1d(nbar) + (om < 0.0))
    s = (4.0 * params.kappa1 * np.abs(arrs["v"]) ** 2
         * CONSTANTS.hbar * params.gamma_m * params.mass * weight)
    return _scalar_or_array(s, bad, omega, scalar)


def scan_spectrum(params: SystemParams, omega_grid, method: str = "closed",
                  state: SteadyState | None = None) -> ScanResult:
    """Evaluate all four spectra on a frequency grid.

    The steady state is solved once and reused.  Per-node failures (singular
    denominator, zero frequency in the thermal column, non-finite output)
    are recorded in the result's error list while the scan continues.
    """
    grid = np.asarray(omega_grid, dtype=float)
    if grid.size == 0:
        return ScanResult([], [])
    if grid.ndim != 1 or (grid.size > 1 and not np.all(np.diff(grid) > 0.0)):
        raise InvalidParameterError("omega grid must be strictly increasing")
    if state is None:
        state = solve_steady_state(params)

    arrs, bad = _arrays(params, state, grid, method)
    z = math.sqrt(2.0 * params.kappa1) * arrs["e1"]
    r = np.abs(z - 1.0) ** 2
    t = np.abs(z) ** 2
    sv = 4.0 * params.kappa1 * np.abs(arrs["f1"]) ** 2

    zero = grid == 0.0
    safe = np.where(zero, 1.0, grid)
    nbar = np.atleast_1d(thermal_occupation(np.abs(safe), params.temperature))
    st = (4.0 * params.kappa1 * np.abs(arrs["v"]) ** 2 * CONSTANTS.hbar
          * params.gamma_m * params.mass * np.abs(safe)
          * (nbar + (safe < 0.0)))

    errors: list[tuple[int, float, str]] = []
    points: list[SpectrumPoint] = []
    columns = np.stack([r, t, st, sv], axis=1)
    for i, w in enumerate(grid):
        if bad[i]:
            errors.append((i, float(w), "singular response denominator"))
            points.append(SpectrumPoint(float(w), math.nan, math.nan,
                                        math.nan, math.nan))
        elif zero[i]:
            errors.append((i, 0.0, "thermal spectrum singular at omega = 0"))
            points.append(SpectrumPoint(0.0, float(r[i]), float(t[i]),
                                        math.nan, float(sv[i])))
        elif not np.all(np.isfinite(columns[i])):
            errors.append((i, float(w), "non-finite spectrum value"))
            points.append(SpectrumPoint(float(w), math.nan, math.nan,
                                        math.nan, math.nan))
        else:
            points.append(SpectrumPoint(float(w), float(r[i]), float(t[i]),
                                        float(st[i]), float(sv[i])))
    return ScanResult(points, errors)


def closed_vs_oracle_deviation(params: SystemParams, state: SteadyState,
                               omega_grid) -> dict[str, float]:
    """Worst relative disagreement between the two evaluation paths.

    Returns per-coefficient maxima plus the overall ``"max"`` entry.  The
    relative deviation uses an absolute floor of 1e-12 in the denominator so
    coefficients that are identically zero compare cleanly.
    """
    grid = np.asarray(omega_grid, dtype=float)
    closed, bad_c = _closed_arrays(params, state, grid)
    oracle, bad_o = _oracle_arrays(params, state, grid)
    if np.any(bad_c) or np.any(bad_o):
        raise SingularPointError("deviation grid hits a singular node")
    out: dict[str, float] = {}
    worst = 0.0
    for name in _COEFF_NAMES:
        x, y = closed[name], oracle[name]
        denom = np.maximum(np.maximum(np.abs(x), np.abs(y)), 1e-12)
        dev = float(np.max(np.abs(x - y) / denom))
        out[name] = dev
        worst = max(worst, dev)
    out["max"] = worst
    return out
