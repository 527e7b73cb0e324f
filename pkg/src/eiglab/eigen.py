"""Dense nonsymmetric eigenvalues: Householder Hessenberg reduction followed by
single-shift complex QR iteration with Wilkinson shifts and deflation."""

import numpy as np

from .errors import NoConvergence
from .matrix import EPS, as_matrix


def hessenberg(a):
    """Unitarily similar upper Hessenberg form of ``a`` (Householder)."""
    h = as_matrix(a, square=True).copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h


def _givens(a, b):
    """Return (c, s) with c real so that [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    norm = np.hypot(abs(a), abs(b))
    c = abs(a) / norm
    s = (a / abs(a)) * np.conj(b) / norm
    return c, s


def _eig2(a, b, c, d):
    """Both eigenvalues of [[a, b], [c, d]], centred to avoid cancellation."""
    mid = (a + d) / 2
    half = (a - d) / 2
    disc = np.sqrt(half * half + b * c)
    return mid + disc, mid - disc


def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closer to ``d``."""
    l1, l2 = _eig2(a, b, c, d)
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def _negligible(h, k, scale):
    """Ahues-Tisseur test: may ``h[k, k-1]`` be set to zero?"""
    sub = abs(h[k, k - 1])
    if sub == 0.0:
        return True
    local = abs(h[k, k]) + abs(h[k - 1, k - 1])
    if local == 0.0:
        local = scale
    if sub > EPS * local:
        return False
    # refinement of the conservative test above, as in LAPACK's zlahqr
    sup = abs(h[k - 1, k])
    ab, ba = max(sub, sup), min(sub, sup)
    diff = abs(h[k - 1, k - 1] - h[k, k])
    aa, bb = max(abs(h[k, k]), diff), min(abs(h[k, k]), diff)
    s = aa + ab
    return ba * (ab / s) <= max(np.finfo(float).tiny, EPS * (bb * (aa / s)))


def _qr_sweep(h, lo, hi, mu):
    """One explicitly shifted QR step on the active window ``h[lo:hi+1, lo:hi+1]``."""
    idx = np.arange(lo, hi + 1)
    h[idx, idx] -= mu
    rotations = []
    for k in range(lo, hi):
        c, s = _givens(h[k, k], h[k + 1, k])
        rows = h[k:k + 2, k:hi + 1]
        top = c * rows[0] + s * rows[1]
        bottom = -np.conj(s) * rows[0] + c * rows[1]
        rows[0], rows[1] = top, bottom
        h[k + 1, k] = 0.0
        rotations.append((k, c, s))
    for k, c, s in rotations:
        last = min(k + 2, hi)
        cols = h[lo:last + 1, k:k + 2]
        left = c * cols[:, 0] + np.conj(s) * cols[:, 1]
        right = -s * cols[:, 0] + c * cols[:, 1]
        cols[:, 0], cols[:, 1] = left, right
    h[idx, idx] += mu


def eigenvalues(a, max_iter=None):
    """All ``n`` eigenvalues of ``a`` (with multiplicity), complex.

    Raises :class:`NoConvergence` when the total number of QR sweeps exceeds
    ``max_iter`` (default ``30 n``); the exception's ``partial`` attribute holds
    the eigenvalues that had already deflated.
    """
    h = hessenberg(a)
    n = h.shape[0]
    if max_iter is None:
        max_iter = 30 * n
    scale = np.max(np.abs(h))
    if scale == 0.0:
        return np.zeros(n, dtype=complex)
    found = np.full(n, np.nan, dtype=complex)
    hi = n - 1
    sweeps = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            found[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            if _negligible(h, lo, scale):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            found[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            found[lo], found[hi] = _eig2(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            hi -= 2
            since_deflation = 0
            continue
        if sweeps >= max_iter:
            done = found[~np.isnan(found)]
            raise NoConvergence(
                f"QR iteration did not converge after {sweeps} sweeps "
                f"({done.size} of {n} eigenvalues found)",
                partial=done,
            )
        since_deflation += 1
        if since_deflation % 10 == 0:
            # exceptional shift to break cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1 + 1j)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        _qr_sweep(h, lo, hi, mu)
        sweeps += 1
    return found
