"""Pure-Python exact kernels.

Same signatures as the compiled ``_ckernels`` module; one of them is picked
at import time by :mod:`nashflow.kernels`.
"""
from fractions import Fraction


def earliest_event(slacks, rates):
    """Smallest positive time at which ``slack + rate * t`` reaches zero.

    Only entries with a negative rate can hit zero. Returns ``(None, [])``
    when no entry does, else ``(delta, indices)`` with every index attaining
    the minimum. Comparisons are done on integer cross products so no
    intermediate Fractions are built.
    """
    best_n = best_d = None
    hits = []
    for i in range(len(rates)):
        r = rates[i]
        if r >= 0:
            continue
        s = slacks[i]
        # delta = s / (-r) = (sn * rd) / (sd * -rn)
        n = s.numerator * r.denominator
        d = -r.numerator * s.denominator
        if best_n is None:
            best_n, best_d = n, d
            hits = [i]
            continue
        lhs = n * best_d
        rhs = best_n * d
        if lhs < rhs:
            best_n, best_d = n, d
            hits = [i]
        elif lhs == rhs:
            hits.append(i)
    if best_n is None:
        return None, []
    return Fraction(best_n, best_d), hits


def axpy(values, slopes, delta):
    """Return ``[v + s * delta for v, s in zip(values, slopes)]``."""
    if delta == 0:
        return list(values)
    return [v + s * delta if s else v for v, s in zip(values, slopes)]


def solve_exact(matrix, rhs):
    """Solve ``matrix @ x = rhs`` over the rationals.

    ``matrix`` is m x n with m >= n. Rows are scaled to integers and reduced
    with fraction-free (Bareiss) elimination. Returns ``None`` when the
    columns are rank deficient or the system is inconsistent.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if n == 0:
        return [] if all(Fraction(b) == 0 for b in rhs) else None
    if m < n:
        return None
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in matrix[i]]
        row.append(Fraction(rhs[i]))
        den = 1
        for v in row:
            den = den * v.denominator // _gcd(den, v.denominator)
        rows.append([v.numerator * (den // v.denominator) for v in row])

    prev = 1
    for k in range(n):
        piv = k
        while piv < m and rows[piv][k] == 0:
            piv += 1
        if piv == m:
            return None
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
        rk = rows[k]
        akk = rk[k]
        for i in range(k + 1, m):
            ri = rows[i]
            aik = ri[k]
            for j in range(k + 1, n + 1):
                ri[j] = (ri[j] * akk - rk[j] * aik) // prev
            ri[k] = 0
        prev = akk
    for i in range(n, m):
        if rows[i][n] != 0:
            return None

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        ri = rows[i]
        acc = Fraction(ri[n])
        for j in range(i + 1, n):
            if ri[j]:
                acc -= ri[j] * x[j]
        x[i] = acc / ri[i]
    return x


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a
