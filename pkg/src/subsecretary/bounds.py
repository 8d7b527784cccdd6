"""Closed-form competitive-ratio bounds and per-round probability thresholds."""

import math
from dataclasses import asdict, dataclass, field

from .errors import InputError

E = math.e
_SQRT_2PI = math.sqrt(2 * math.pi)

# constants quoted alongside the greedy formula; they are reported, not derived
GREEDY_STATED_MIN_K2 = 0.177
GREEDY_STATED_LIMIT = 0.275


@dataclass(frozen=True)
class BoundReport:
    kind: str
    params: dict
    value: float
    caveat: bool = False
    n_adjusted: float = None
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _k_factor(k):
    return 1.0 - math.sqrt(k - 1) / ((k + 1) * _SQRT_2PI)


def _check_k(k):
    if int(k) != k or k < 1:
        raise InputError(f"k must be a positive integer, got {k}")


def _check_alpha(alpha):
    if not 0 <= alpha <= 1:
        raise InputError(f"alpha must lie in [0, 1], got {alpha}")


def bound_k_secretary(k, alpha=1.0, n=None):
    """``(alpha/e) (1 - sqrt(k-1) / ((k+1) sqrt(2 pi)))``; with ``n``, also minus ``6k^2/n``."""
    _check_k(k)
    _check_alpha(alpha)
    value = alpha / E * _k_factor(k)
    adjusted = None if n is None else value - 6 * k * k / n
    return BoundReport("k-secretary", {"k": int(k), "alpha": alpha, "n": n}, value, False, adjusted)


def bound_greedy_k_secretary(k, n=None):
    """Bound for the k-secretary algorithm driven by the greedy offline solver."""
    _check_k(k)
    head = (1 + 1 / (2 * E ** 3) - 3 / (2 * E) - (E - 1) / (E * E * k)) / (E - 1)
    value = head * _k_factor(k)
    adjusted = None if n is None else value - 6 * k * k / n
    notes = {"stated_min_k_ge_2": GREEDY_STATED_MIN_K2, "stated_limit": GREEDY_STATED_LIMIT}
    return BoundReport("greedy-k-secretary", {"k": int(k), "alpha": 1 - 1 / E, "n": n},
                       max(value, 0.0), False, adjusted, notes)


def greedy_limit():
    """``k -> infinity`` value of :func:`bound_greedy_k_secretary`."""
    return (1 + 1 / (2 * E ** 3) - 3 / (2 * E)) / (E - 1)


def bound_matching(alpha=1.0, n=None):
    """``alpha / 4``; with ``n``, also the ``alpha/4 - 5/n`` finite-size figure."""
    _check_alpha(alpha)
    adjusted = None if n is None else alpha / 4 - 5 / n
    return BoundReport("matching", {"alpha": alpha, "n": n}, alpha / 4, False, adjusted)


def bound_packing(alpha, B, d, known=False):
    """Exponent factor of the packing guarantee: ``alpha d^(-2/(B-1))`` or ``alpha d^(-1/(B-1))``.

    The guarantee holds up to an unspecified constant, so ``caveat`` is always set.
    """
    _check_alpha(alpha)
    if B < 2:
        raise InputError(f"packing bounds need B >= 2, got {B}")
    if d < 1:
        raise InputError(f"packing bounds need d >= 1, got {d}")
    power = (1 if known else 2) / (B - 1)
    return BoundReport("packing-known" if known else "packing", {"alpha": alpha, "B": B, "d": d,
                       "known": bool(known)}, alpha * d ** (-power), True)


def greedy_stage_alpha(ell, n, k):
    """Stage-wise guarantee of greedy on a random prefix: ``1 - l/(en) - 1/(ek)``."""
    if n < 1 or k < 1:
        raise InputError("need n >= 1 and k >= 1")
    return 1 - ell / (E * n) - 1 / (E * k)


def sample_rounds(p, n):
    """Number of observe-only rounds, ``ceil(p n) - 1``."""
    return max(math.ceil(p * n) - 1, 0)


def collision_bound(ell, n):
    """Lower bound ``(ceil(n/2) - 1) / (l - 1)`` on a tentative edge being feasible."""
    first = math.ceil(n / 2)
    if ell < first:
        raise InputError(f"round {ell} lies in the sampling phase (first active round {first})")
    if ell == 1:
        return 1.0
    return min(1.0, (first - 1) / (ell - 1))


def psi(B, d):
    """``d^(1/(B-1))``; infinite when ``B <= 1``, and 1 when the matrix has no nonzeros."""
    if B <= 1:
        return math.inf
    if math.isinf(B) or d <= 1:
        return 1.0
    return d ** (1 / (B - 1))


def packing_audit_rounds(n, B, d):
    """Last round ``l`` with ``l <= n / (4 e psi)``."""
    return int(math.floor(n / (4 * E * psi(B, d)) + 1e-12))


def known_sample_fraction(B, d):
    """``1 - (1/(2e)) (1/(2d))^(1/(B-1))``; 1 (sample everything) when ``B <= 1``."""
    if d < 1:
        d = 1
    if B <= 1:
        return 1.0
    if math.isinf(B):
        return 1 - 1 / (2 * E)
    return 1 - (1 / (2 * E)) * (1 / (2 * d)) ** (1 / (B - 1))
