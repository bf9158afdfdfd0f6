"""Independent reference computations in exact rational arithmetic.

These follow the verbal definitions of the rules rather than the library's
formulas, so agreement is a real cross-check.
"""

from fractions import Fraction


def _q(values):
    return [Fraction(v) for v in values]


def geometric_by_residual(revenues, needs, lam):
    """Each agent keeps need + lam * (own surplus + residual handed up from below).

    The residual handed up by agent i is whatever of (r_i + incoming) agent i
    did not keep.  The top agent takes what is left of total revenue.
    """
    r, z, lam = _q(revenues), _q(needs), Fraction(lam)
    n = len(r)
    x = []
    incoming = Fraction(0)
    for i in range(n - 1):
        xi = z[i] + lam * (r[i] - z[i] + incoming)
        x.append(xi)
        incoming = r[i] + incoming - xi
    x.append(sum(r) - sum(x))
    return x


def serial_by_shares(revenues, needs):
    """Split each agent's surplus into equal parts for them and every superior."""
    r, z = _q(revenues), _q(needs)
    n = len(r)
    x = list(z)
    for j in range(n):
        part = (r[j] - z[j]) / (n - j)
        for k in range(j, n):
            x[k] += part
    return x
