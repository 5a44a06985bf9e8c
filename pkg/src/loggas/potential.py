"""Polynomial external fields and their admissibility checks.

A field V enters every downstream formula only through its values and
first two derivatives, so potentials are stored as plain polynomial
coefficients and evaluated exactly.  Admissibility (convexity in the
sense of a strictly increasing V', plus growth at infinity) is verified
on a wide Chebyshev grid rather than symbolically.
"""

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly


@dataclass(frozen=True)
class Potential:
    """Polynomial field V(x) = sum_k coeffs[k] * x**k.

    Parameters
    ----------
    coeffs : sequence of float
        Polynomial coefficients in ascending degree.  Trailing zeros are
        stripped so ``degree`` is meaningful.
    asserts_ga_infinity : bool
        Caller's assertion that V admits the required analytic growth
        extension off the real axis.  Recorded verbatim; nothing here
        attempts to verify it.
    """

    coeffs: tuple
    asserts_ga_infinity: bool = False

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        if not c:
            raise ValueError("potential needs at least one coefficient")
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self):
        return self.coeffs[-1]

    def eval(self, x, order=0):
        """Evaluate V, V' or V'' at x (scalar or array).

        order selects the derivative: 0, 1 or 2.  Derivatives of the
        polynomial are exact, not finite differences.
        """
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
        c = np.asarray(self.coeffs, dtype=float)
        if order:
            c = npoly.polyder(c, order)
        return npoly.polyval(x, c)

    def __call__(self, x):
        return self.eval(x, 0)

    def scale(self):
        """Characteristic length |leading coeff|^(-1/degree).

        Used to size initial guesses and validation grids; 1.0 for
        constant or degenerate input.
        """
        if self.degree < 1 or self.leading_coefficient <= 0:
            return 1.0
        return float(self.leading_coefficient) ** (-1.0 / self.degree)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the grid admissibility check."""

    ok: bool
    convex_ok: bool
    monotone_ok: bool
    growth_ok: bool
    first_violation: float  # NaN when no violation was found
    grid_radius: float
    grid_points: int


def validate_ga(V, grid_radius=None, grid_points=2048):
    """Check admissibility of V on a symmetric Chebyshev grid.

    Verifies V'' >= 0 everywhere on the grid with at most isolated
    zeros, V' strictly increasing across consecutive grid points, and
    even degree with positive leading coefficient (growth at infinity).
    The default radius is 10*(1 + 2*scale), wide enough that the support
    of any downstream equilibrium problem sits deep inside.

    Returns a ValidationReport; never raises on a failing V.
    """
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    if grid_radius is None:
        grid_radius = 10.0 * (1.0 + 2.0 * V.scale())
    k = np.arange(1, grid_points + 1)
    x = grid_radius * np.cos((2 * k - 1) * np.pi / (2 * grid_points))
    x = np.sort(x)

    vpp = V.eval(x, 2)
    neg = vpp < 0.0
    # isolated zeros of V'' are fine (x**4 at the origin); a whole flat
    # stretch is not
    zeros = np.count_nonzero(vpp == 0.0)
    convex_ok = (not neg.any()) and zeros <= max(1, V.degree)

    vp = V.eval(x, 1)
    dvp = np.diff(vp)
    monotone_ok = bool((dvp > 0.0).all())

    growth_ok = V.degree >= 2 and V.degree % 2 == 0 and V.leading_coefficient > 0

    first_violation = np.nan
    if neg.any():
        first_violation = float(x[np.argmax(neg)])
    elif not monotone_ok:
        first_violation = float(x[np.argmax(dvp <= 0.0)])

    ok = convex_ok and monotone_ok and growth_ok
    return ValidationReport(
        ok=ok,
        convex_ok=convex_ok,
        monotone_ok=monotone_ok,
        growth_ok=growth_ok,
        first_violation=first_violation,
        grid_radius=float(grid_radius),
        grid_points=int(grid_points),
    )


def potential_from_json(source):
    """Build a Potential from a JSON object {"coeffs": [...], "ga_infinity": bool}.

    Accepts a dict, a JSON string, or anything json.loads handles.
    """
    if isinstance(source, (str, bytes)):
        obj = json.loads(source)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ValueError("potential entry must be a JSON object")
    if "coeffs" not in obj:
        raise ValueError('potential entry needs a "coeffs" array')
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, (list, tuple)) or not coeffs:
        raise ValueError('"coeffs" must be a non-empty array of numbers')
    try:
        coeffs = tuple(float(v) for v in coeffs)
    except (TypeError, ValueError):
        raise ValueError('"coeffs" must contain only numbers') from None
    ga = obj.get("ga_infinity", False)
    if not isinstance(ga, bool):
        raise ValueError('"ga_infinity" must be a boolean')
    return Potential(coeffs, asserts_ga_infinity=ga)


def potential_to_json(V):
    """Serialize a Potential to the JSON-object form used by the CLI."""
    return {"coeffs": list(V.coeffs), "ga_infinity": V.asserts_ga_infinity}
