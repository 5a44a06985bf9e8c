"""Closed-form upper-tail approximations and deviation statistics.

Houses the leading-order tail approximation F(t) for the largest
particle, the edge rescaling t(s), the correction-series coefficients
d_j of the rescaled exponent, the growth thresholds alpha_k that
delimit how many corrections the leading order needs, and the
rate-style statistics used to compare against the exact oracle.

Probabilities below 1e-300 exist only in log space here; the
linear-space evaluator returns None for them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import eta, eta_prime, g_factor
from .errors import NumericalError

UNDERFLOW_LIMIT = 1e-300
LOG_UNDERFLOW = math.log(UNDERFLOW_LIMIT)
K_MAX_SUPPORTED = 6
TW_CUTOFF = 8.0
MODERATE_MARGIN = 0.5


@dataclass(frozen=True)
class TailModel:
    """Tail approximation family for one (potential, N) pair.

    cramer holds (d_1, ..., d_{k_max}); together with the exact rate
    function it gives both the plain approximation F(t) and its
    rescaled truncations.
    """

    eq: object
    potential: object
    N: int
    cramer: tuple
    k_max: int


def build_tail_model(eq, V, N, k=K_MAX_SUPPORTED):
    """Assemble a TailModel, computing k correction coefficients."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    d = cramer_coefficients(eq, V, k)
    return TailModel(eq=eq, potential=V, N=int(N), cramer=tuple(d), k_max=k)


def alpha_threshold(k):
    """Growth exponent delimiting the k-th correction regime: 2/3 - 2/(2k+5).

    Strictly increasing in k with limit 2/3; alpha_threshold(0) = 4/15
    bounds the window where the limiting edge law needs no correction.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    return 2.0 / 3.0 - 2.0 / (2 * k + 5)


def cramer_coefficients(eq, V, k):
    """Correction coefficients d_1..d_k of the rescaled tail exponent.

    The rate function near the right edge is eta(b + v) =
    sum_m c_m v^{m+3/2}; taking c_m from a degree-32 Chebyshev fit of
    the analytic integrand h(v) = sqrt(b + v - a) G(b + v) (term-wise
    integrated, c_m = h_m/(m+3/2)) keeps the high-order coefficients
    stable where repeated finite differencing would not.  d_j rescales
    c_j by gamma^{-(j+3/2)}.

    The zeroth coefficient must reproduce the universal 4/3 prefactor;
    a violation means eq and V are inconsistent and raises
    NumericalError.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > K_MAX_SUPPORTED:
        raise ValueError(
            f"k = {k} unsupported: the Chebyshev-to-Taylor conversion "
            f"loses about two digits per order, cap is {K_MAX_SUPPORTED}")
    a, b = eq.a, eq.b
    r_fit = min(1.0, (b - a) / 4.0)

    def h(v):
        v = np.atleast_1d(v)
        return np.sqrt((b + v) - a) * g_factor(eq, V, b + v)

    cheb = np.polynomial.chebyshev.Chebyshev.interpolate(h, 32, domain=[0.0, r_fit])
    taylor = cheb.convert(kind=np.polynomial.Polynomial)
    h_m = taylor.coef
    m = np.arange(h_m.size)
    c = h_m / (m + 1.5)
    c0_scaled = c[0] * eq.gamma ** (-1.5)
    if abs(c0_scaled - 4.0 / 3.0) > 1e-8:
        raise NumericalError(
            f"edge-coefficient gate failed: c0*gamma^(-3/2) = {c0_scaled!r}, "
            f"expected 4/3 (gamma = {eq.gamma!r}, b = {b!r})")
    j = np.arange(1, k + 1)
    d = c[1:k + 1] * eq.gamma ** (-(j + 1.5))
    return [float(v) for v in d]


def log_f_approx(model, t):
    """log F(t) for t > b, assembled without forming exp(-N eta)."""
    eq, V, N = model.eq, model.potential, model.N
    if t <= eq.b:
        raise ValueError(f"tail approximation needs t > b = {eq.b!r}, got {t!r}")
    ep = eta_prime(eq, V, t)
    return (math.log((eq.b - eq.a) / (8.0 * math.pi))
            - N * eta(eq, V, t)
            - math.log(N * (t - eq.b) * (t - eq.a) * ep))


def f_approx(model, t):
    """Leading-order tail approximation F(t), t > b.

    Returns None when the value sits below the linear-space floor of
    1e-300; use log_f_approx there.
    """
    lf = log_f_approx(model, t)
    if lf < LOG_UNDERFLOW:
        return None
    return math.exp(lf)


def rescale(model, s):
    """Edge coordinate map t(s) = b + s/(gamma N^{2/3}), s >= 0."""
    if s < 0:
        raise ValueError(f"rescale needs s >= 0, got {s!r}")
    return model.eq.b + s / (model.eq.gamma * model.N ** (2.0 / 3.0))


def eta_tilde(model, s, k):
    """Truncated rescaled exponent: (4/3)s^{3/2} plus the first k
    corrections d_j s^{j+3/2} N^{-2j/3}."""
    if s < 0:
        raise ValueError(f"eta_tilde needs s >= 0, got {s!r}")
    if not 0 <= k <= model.k_max:
        raise ValueError(f"k must be in [0, {model.k_max}], got {k!r}")
    total = (4.0 / 3.0) * s ** 1.5
    for j in range(1, k + 1):
        total += model.cramer[j - 1] * s ** (j + 1.5) * model.N ** (-2.0 * j / 3.0)
    return total


def moderate_leading(model, s, k):
    """Rescaled-regime prediction exp(-eta_tilde(s, k)) / (16 pi s^{3/2})."""
    if s <= 0:
        raise ValueError(f"moderate_leading needs s > 0, got {s!r}")
    return math.exp(-eta_tilde(model, s, k)) / (16.0 * math.pi * s ** 1.5)


def tw_tail_asymptotic(s):
    """Right-tail asymptotic of the limiting edge law:
    exp(-(4/3)s^{3/2}) / (16 pi s^{3/2}), s > 0."""
    if s <= 0:
        raise ValueError(f"tw_tail_asymptotic needs s > 0, got {s!r}")
    return math.exp(-(4.0 / 3.0) * s ** 1.5) / (16.0 * math.pi * s ** 1.5)


@dataclass(frozen=True)
class Regime:
    """Classifier outcome: kind is one of 'tracy-widom', 'moderate',
    'large'; k the minimal correction order (None in the large regime)."""

    kind: str
    k: object

    def label(self):
        if self.kind == "moderate":
            return f"moderate({self.k})"
        return self.kind


def regime_classify(s, N):
    """Classify the rescaled threshold s at matrix size N.

    Fixed desk-scale margins: s <= 8 counts as the limiting-law regime;
    otherwise the least k <= 6 with s <= 0.5 N^{alpha_k} selects the
    moderate regime with k corrections; past all thresholds s is of
    edge order N^{2/3} and classifies as large.
    """
    if s < 0:
        raise ValueError(f"s must be non-negative, got {s!r}")
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if s <= TW_CUTOFF:
        return Regime(kind="tracy-widom", k=0)
    for k in range(K_MAX_SUPPORTED + 1):
        if s <= MODERATE_MARGIN * N ** alpha_threshold(k):
            return Regime(kind="moderate", k=k)
    return Regime(kind="large", k=None)


@dataclass(frozen=True)
class DeviationStatistics:
    """Rate-style views of log F at one threshold.

    ldp_rate = log F / N should track -eta(t) - log(N)/N with an O(1/N)
    remainder; mdp_rate = log F / s^{3/2} should track -4/3 -
    log(16 pi s^{3/2})/s^{3/2}.  The residual fields hold what is left
    after subtracting those predictions.
    """

    t: float
    s: float
    log_f: float
    ldp_rate: float
    ldp_eta_term: float
    ldp_logn_term: float
    ldp_residual: float
    mdp_rate: float
    mdp_main_term: float
    mdp_log_term: float
    mdp_residual: float


def deviation_statistics(model, t=None, s=None):
    """Assemble the deviation-principle statistics at a threshold given
    either as a raw coordinate t > b or a rescaled coordinate s > 0."""
    if (t is None) == (s is None):
        raise ValueError("give exactly one of t or s")
    eq, N = model.eq, model.N
    if t is None:
        if s <= 0:
            raise ValueError(f"s must be positive, got {s!r}")
        t = rescale(model, s)
    else:
        s = (t - eq.b) * eq.gamma * N ** (2.0 / 3.0)
        if s <= 0:
            raise ValueError(f"t must exceed b = {eq.b!r}, got {t!r}")
    log_f = log_f_approx(model, t)
    ldp_rate = log_f / N
    ldp_eta_term = -eta(eq, model.potential, t)
    ldp_logn_term = -math.log(N) / N
    s32 = s ** 1.5
    mdp_rate = log_f / s32
    mdp_main_term = -4.0 / 3.0
    mdp_log_term = -math.log(16.0 * math.pi * s32) / s32
    return DeviationStatistics(
        t=float(t), s=float(s), log_f=log_f,
        ldp_rate=ldp_rate,
        ldp_eta_term=ldp_eta_term,
        ldp_logn_term=ldp_logn_term,
        ldp_residual=ldp_rate - ldp_eta_term - ldp_logn_term,
        mdp_rate=mdp_rate,
        mdp_main_term=mdp_main_term,
        mdp_log_term=mdp_log_term,
        mdp_residual=mdp_rate - mdp_main_term - mdp_log_term,
    )
