"""Special functions: complex gamma, integer-order incomplete gamma, the
Mellin kernel W_nu, and numerical Mellin inversion on vertical lines.

W_nu(s) is the Mellin transform of x |-> Gamma(nu, 2x) e^x.  For a positive
integer nu it collapses to the finite sum

    W_nu(s) = Gamma(nu) * sum_{l=0}^{nu-1} (2^l / l!) Gamma(s + l),

which is what we evaluate; the defining integral is kept in the test suite
as an independent quadrature oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PoleError",
    "QuadratureError",
    "MellinLineSpec",
    "gamma_complex",
    "inc_gamma",
    "w_nu",
    "mellin_invert_w",
]


class PoleError(ValueError):
    """Raised when gamma is evaluated at a non-positive integer."""


class QuadratureError(RuntimeError):
    """Raised when a quadrature result is not resolved to the requested level."""


# Lanczos coefficients (g = 607/128, 15 terms).  Together with the reflection
# formula this gives close to machine precision on |s| <= 50 away from poles.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array(
    [
        0.99999999999999709182,
        57.156235665862923517,
        -59.597960355475491248,
        14.136097974741747174,
        -0.49191381609762019978,
        3.3994649984811888699e-5,
        4.6523628927048575665e-5,
        -9.8374475304879564677e-5,
        1.5808870322491248884e-4,
        -2.1026444172410488319e-4,
        2.1743961811521264320e-4,
        -1.6431810653676389022e-4,
        8.4418223983852743293e-5,
        -2.6190838401581408670e-5,
        3.6899182659531622704e-6,
    ]
)


def _lanczos_gamma(z):
    # valid for Re(z) >= 0.5; z is a complex ndarray
    zm1 = z - 1.0
    acc = np.full_like(z, _LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[i] / (zm1 + i)
    t = zm1 + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (zm1 + 0.5) * np.exp(-t) * acc


def gamma_complex(s):
    """Gamma(s) for complex s (scalar or ndarray), poles excluded.

    Raises PoleError at non-positive integers.  Accuracy is ~1e-14 relative
    on |s| <= 50.
    """
    arr = np.asarray(s, dtype=complex)
    if np.any((arr.real <= 0.5) & (arr.imag == 0.0) & (arr.real == np.round(arr.real))):
        raise PoleError("gamma evaluated at a non-positive integer")
    out = np.empty_like(arr)
    right = arr.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_gamma(arr[right])
    if np.any(~right):
        z = arr[~right]
        # reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        out[~right] = math.pi / (np.sin(math.pi * z) * _lanczos_gamma(1.0 - z))
    if np.isscalar(s) or np.ndim(s) == 0:
        return complex(out)
    return out


def inc_gamma(nu: int, x: float) -> float:
    """Upper incomplete gamma Gamma(nu, x) for integer nu >= 1 and x >= 0.

    Uses the exact finite sum Gamma(nu) e^{-x} sum_{l<nu} x^l/l!.
    """
    if nu < 1 or nu != int(nu):
        raise ValueError(f"nu must be a positive integer, got {nu}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    return _inc_gamma_scaled(int(nu), x, 0.0)


def _inc_gamma_scaled(nu: int, x: float, shift: float) -> float:
    """Gamma(nu, x) * e^{shift}, computed without forming e^{-x} and e^{shift}
    separately.  Valid for any real x (the finite sum is entire in x)."""
    term = 1.0
    acc = 1.0
    for l in range(1, nu):
        term *= x / l
        acc += term
    return math.gamma(nu) * math.exp(shift - x) * acc


def w_nu(nu: int, s):
    """Mellin kernel W_nu(s) = Gamma(nu) sum_{l<nu} (2^l/l!) Gamma(s+l).

    Requires Re(s) > 0 (scalar or ndarray s).
    """
    if nu < 1 or nu != int(nu):
        raise ValueError(f"nu must be a positive integer, got {nu}")
    arr = np.asarray(s, dtype=complex)
    if np.any(arr.real <= 0):
        raise ValueError("w_nu requires Re(s) > 0")
    acc = np.zeros_like(arr)
    coef = 1.0
    for l in range(int(nu)):
        acc = acc + coef * gamma_complex(arr + l)
        coef *= 2.0 / (l + 1)
    acc = math.gamma(nu) * acc
    if np.isscalar(s) or np.ndim(s) == 0:
        return complex(acc)
    return acc


@dataclass(frozen=True)
class MellinLineSpec:
    """Vertical contour Re(s) = abscissa, truncated at |Im(s)| <= half_height,
    integrated with Gauss-Legendre panels of width <= 1 and node_count nodes
    per panel."""

    abscissa: float
    half_height: float
    node_count: int = 12

    def __post_init__(self):
        if self.abscissa <= 0:
            raise ValueError("abscissa must be > 0")
        if self.half_height <= 0:
            raise ValueError("half_height must be > 0")
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")


def _line_nodes(line: MellinLineSpec, nodes_per_panel: int):
    npanels = max(1, int(math.ceil(2.0 * line.half_height)))
    edges = np.linspace(-line.half_height, line.half_height, npanels + 1)
    xg, wg = np.polynomial.legendre.leggauss(nodes_per_panel)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return t, w


def _invert_on_line(nu: int, x: float, line: MellinLineSpec, nodes_per_panel: int) -> float:
    t, w = _line_nodes(line, nodes_per_panel)
    s = line.abscissa + 1j * t
    vals = x ** (-s) * w_nu(nu, s)
    return float(np.real(np.sum(w * vals)) / (2.0 * math.pi))


def mellin_invert_w(nu: int, x: float, line: MellinLineSpec, full_output: bool = False):
    """Truncated line integral (1/2 pi i) int x^{-s} W_nu(s) ds on Re(s) = sigma.

    For half_height >= 200 this recovers Gamma(nu, 2x) e^x to ~1e-6 absolute
    for x in [0.3, 3] (the nu = 1 case is the classical pair Gamma(s) <-> e^-x).

    With full_output=True returns (value, info) where info carries the panel
    refinement error estimate and a tail bound from |W_nu(sigma+it)| = O(t^-2).
    """
    if x <= 0:
        raise ValueError(f"x must be > 0, got {x}")
    value = _invert_on_line(nu, x, line, line.node_count)
    alt_nodes = line.node_count // 2 if line.node_count >= 4 else line.node_count + 3
    panel_err = abs(value - _invert_on_line(nu, x, line, alt_nodes))

    # tail bound: |W_nu| <= C / t^2 on the line, with C measured near the cutoff
    probe = line.abscissa + 1j * np.linspace(0.5 * line.half_height, line.half_height, 16)
    c_decay = float(np.max(np.abs(w_nu(nu, probe)) * probe.imag**2))
    tail = x ** (-line.abscissa) * c_decay / (math.pi * line.half_height)

    err_est = panel_err + tail
    if panel_err > 1e-4 * abs(value) + 1e-15:
        raise QuadratureError(
            f"line integral not resolved: panel refinement changes the value by "
            f"{panel_err:.3e} (node_count={line.node_count})"
        )
    if full_output:
        return value, {"panel_error": panel_err, "tail_bound": tail, "error_estimate": err_est}
    return value
