from collections import defaultdict

from arpersist.innovations import DiscreteInteger

MAX_ORACLE_STEPS = 20
MAX_ORACLE_SUPPORT = 64


def brute_force_tail(model: DiscreteInteger, x0: float, start: float, n: int) -> float:
    """Exact ``P_start(T > n)`` for the random exchange chain by dynamic programming.

    The reachable states are ``start - j`` and ``m - j`` for support points ``m``, so the
    distribution of the surviving chain is propagated over a small finite set.

    Raises:
        ValueError: If ``n > 20`` or the support exceeds 64 points.
    """
    if not 0 <= n <= MAX_ORACLE_STEPS:
        raise ValueError(f"Expected 0 <= n <= {MAX_ORACLE_STEPS} but got {n}.")
    if model.support_max >= MAX_ORACLE_SUPPORT:
        raise ValueError(f"Support of {model.support_max + 1} points is too large.")
    if start <= x0:
        return 0.0
    atoms = [(float(m), p) for m, p in enumerate(model.probs) if p > 0]
    alive = {float(start): 1.0}
    for _ in range(n):
        moved: dict[float, float] = defaultdict(float)
        for state, mass in alive.items():
            for eta, p in atoms:
                nxt = max(state - 1.0, eta)
                if nxt > x0:
                    moved[nxt] += mass * p
        alive = moved
    return sum(alive.values())
