"""From-scratch reference implementations used as test oracles.

These rebuild every quantity directly from the full history with plain
Python loops (rejection times, per-window candidate counts, wealth), never
incrementally, so they share no code path with the package's state machines.

History bit lists are 0-based: R[i], C[i] describe step i+1.
"""

from __future__ import annotations


def window_starts(R: list[bool]) -> list[int]:
    """Window opening times: 0, then each rejection time (1-based)."""
    return [0] + [i + 1 for i, r in enumerate(R) if r]


def payout_sum(R, C, alpha, w0, gam, discounted=True) -> float:
    """The gamma-scheduled payout available at step t = len(R) + 1."""
    t = len(R) + 1
    total = 0.0
    for k, tau in enumerate(window_starts(R)):
        cjp = sum(1 for i in range(tau, t - 1) if C[i]) if discounted else 0
        weight = w0 if k == 0 else (alpha - w0 if k == 1 else alpha)
        total += weight * gam[t - tau - cjp]
    return total


def saffron_levels(R, C, alpha, w0, gam, lam) -> tuple[float, float]:
    s = payout_sum(R, C, alpha, w0, gam, discounted=True)
    return min(lam, (1.0 - lam) * s), lam


def saffron_ai_levels(R, C, alpha, w0, gam) -> tuple[float, float]:
    s = payout_sum(R, C, alpha, w0, gam, discounted=True)
    a = s / (1.0 + s)
    return a, a


def lord_level(R, alpha, w0, gam) -> float:
    return payout_sum(R, [False] * len(R), alpha, w0, gam, discounted=False)


def alpha_investing_replay(pvalues, alpha, psi_of_t) -> dict:
    """Replay the wealth machine; psi_of_t maps the 1-based step to psi."""
    wealth = alpha
    levels, rejected, wealth_path = [], [], []
    for i, p in enumerate(pvalues):
        pen = psi_of_t(i + 1) * wealth
        a = pen / (1.0 + pen)
        rej = p <= a
        if rej:
            wealth += alpha
        else:
            wealth -= pen
        levels.append(a)
        rejected.append(rej)
        wealth_path.append(wealth)
    return {"levels": levels, "rejected": rejected, "wealth": wealth_path}


def recount_fdp(rejected, is_null) -> float:
    total = false = 0
    for r, null in zip(rejected, is_null):
        if r:
            total += 1
            if null:
                false += 1
    return false / total if total else 0.0


def recount_power(rejected, is_null) -> float:
    non_null = hits = 0
    for r, null in zip(rejected, is_null):
        if not null:
            non_null += 1
            if r:
                hits += 1
    return hits / non_null if non_null else 0.0
