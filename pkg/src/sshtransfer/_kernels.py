"""Compiled inner loops: tridiagonal eigensolver and step integrators.

Everything here works on real symmetric tridiagonal matrices stored as
``(diag[n], offdiag[n-1])``.  The integrators take a block of pre-sampled
"stage" couplings of shape ``(n_steps, n_stages, n-1)``; each stage is one
exponential ``exp(-i dt H_stage)`` with ``H_stage = T(stage_j * jscale) +
stage_b * diag(fields)``.  Midpoint uses one stage, the fourth-order
commutator-free Magnus scheme uses two.
"""

import math

import numba as nb
import numpy as np

_EPS = 2.220446049250313e-16
TAYLOR_TOL = 1e-17
MAX_SWEEPS = 60


@nb.njit(cache=True, nogil=True)
def tql_implicit(d, e, z):
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place.

    ``d`` (n) holds the diagonal and becomes the eigenvalues; ``e`` (n) holds
    the off-diagonal in ``e[:n-1]`` and is destroyed; ``z`` (n, n) must come
    in as the identity and leaves with eigenvectors in its columns.
    Returns 0 on success, or 1 + the row that failed to converge.
    """
    n = d.shape[0]
    if n > 0:
        e[n - 1] = 0.0
    # scale by a power of two to unit norm (exact), so tiny or subnormal
    # entries neither stall the iteration nor lose their mantissa
    anorm = 0.0
    for i in range(n):
        anorm = max(anorm, abs(d[i]) + abs(e[i]))
    shift = 0
    if anorm > 0.0:
        shift = -math.frexp(anorm)[1]
        for i in range(n):
            d[i] = math.ldexp(d[i], shift)
            e[i] = math.ldexp(e[i], shift)
    floor = _EPS * math.ldexp(anorm, shift)  # couplings below eps * ||T|| are dropped (backward stable)
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > MAX_SWEEPS:
                for i in range(n):
                    d[i] = math.ldexp(d[i], -shift)
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    for i in range(n):
        d[i] = math.ldexp(d[i], -shift)
    return 0


@nb.njit(cache=True, nogil=True)
def taylor_order(x):
    """Smallest truncation order whose first dropped term is below TAYLOR_TOL."""
    term = 1.0
    k = 0
    while True:
        k += 1
        term = term * x / (k + 1)
        if term <= TAYLOR_TOL or k >= 60:
            return k


@nb.njit(cache=True, nogil=True)
def _stage_matrix(stage_j, jscale, stage_b, fields, w, d):
    n = d.shape[0]
    bound = 0.0
    for i in range(n - 1):
        w[i] = stage_j[i] * jscale[i]
    for i in range(n):
        d[i] = stage_b * fields[i]
        g = abs(d[i])
        if i > 0:
            g += abs(w[i - 1])
        if i < n - 1:
            g += abs(w[i])
        if g > bound:
            bound = g
    return bound


@nb.njit(cache=True, nogil=True)
def evolve_taylor(psi, stage_j, jscale, stage_b, fields, dt):
    """Apply every stage exponential in order; exp evaluated by Taylor series.

    The order is chosen per stage from the Gershgorin bound so that the
    truncation error sits below double rounding; steps with ``|H| dt > 0.5``
    are split into equal substeps first.  Updates ``psi`` in place.
    """
    n = psi.shape[0]
    pr = np.empty(n)
    pi = np.empty(n)
    tr = np.empty(n)
    ti = np.empty(n)
    nr = np.empty(n)
    ni = np.empty(n)
    w = np.empty(max(n - 1, 1))
    d = np.empty(n)
    for i in range(n):
        pr[i] = psi[i].real
        pi[i] = psi[i].imag
    for k in range(stage_j.shape[0]):
        for s in range(stage_j.shape[1]):
            bound = _stage_matrix(stage_j[k, s], jscale, stage_b[s], fields, w, d)
            nsub = 1
            if bound * dt > 0.5:
                nsub = int(math.ceil(bound * dt / 0.5))
            h = dt / nsub
            order = taylor_order(bound * h)
            for _ in range(nsub):
                for i in range(n):
                    tr[i] = pr[i]
                    ti[i] = pi[i]
                for m in range(1, order + 1):
                    c = h / m
                    for i in range(n):
                        nr[i] = d[i] * tr[i]
                        ni[i] = d[i] * ti[i]
                    for i in range(n - 1):
                        nr[i] += w[i] * tr[i + 1]
                        ni[i] += w[i] * ti[i + 1]
                        nr[i + 1] += w[i] * tr[i]
                        ni[i + 1] += w[i] * ti[i]
                    # multiply by -i*c
                    for i in range(n):
                        a = c * ni[i]
                        b = -c * nr[i]
                        tr[i] = a
                        ti[i] = b
                        pr[i] += a
                        pi[i] += b
    for i in range(n):
        psi[i] = complex(pr[i], pi[i])


@nb.njit(cache=True, nogil=True)
def evolve_spectral(psi, stage_j, jscale, stage_b, fields, dt):
    """Same contract as ``evolve_taylor`` but exponentiates by eigendecomposition.

    Returns 0, or 1 + the step index whose eigensolve failed.
    """
    n = psi.shape[0]
    w = np.empty(max(n - 1, 1))
    d = np.empty(n)
    e = np.empty(n)
    z = np.empty((n, n))
    coef = np.empty(n, np.complex128)
    for k in range(stage_j.shape[0]):
        for s in range(stage_j.shape[1]):
            _stage_matrix(stage_j[k, s], jscale, stage_b[s], fields, w, d)
            for i in range(n - 1):
                e[i] = w[i]
            for i in range(n):
                for j in range(n):
                    z[i, j] = 0.0
                z[i, i] = 1.0
            if tql_implicit(d, e, z) != 0:
                return k + 1
            for j in range(n):
                acc = 0.0 + 0.0j
                for i in range(n):
                    acc += z[i, j] * psi[i]
                coef[j] = acc * complex(math.cos(d[j] * dt), -math.sin(d[j] * dt))
            for i in range(n):
                acc = 0.0 + 0.0j
                for j in range(n):
                    acc += z[i, j] * coef[j]
                psi[i] = acc
    return 0


@nb.njit(cache=True, nogil=True)
def _apply_h(v, w, fields, out):
    n = v.shape[0]
    for i in range(n):
        out[i] = fields[i] * v[i]
    for i in range(n - 1):
        out[i] += w[i] * v[i + 1]
        out[i + 1] += w[i] * v[i]


@nb.njit(cache=True, nogil=True)
def evolve_rk4(psi, node_j, jscale, fields, dt):
    """Classical RK4 on ``i dpsi/dt = H psi``; ``node_j`` is (steps, 3, n-1)
    sampled at the start, middle and end of each step."""
    n = psi.shape[0]
    w = np.empty((3, max(n - 1, 1)))
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    tmp = np.empty(n, np.complex128)
    for k in range(node_j.shape[0]):
        for q in range(3):
            for i in range(n - 1):
                w[q, i] = node_j[k, q, i] * jscale[i]
        _apply_h(psi, w[0], fields, k1)
        for i in range(n):
            k1[i] *= -1j
            tmp[i] = psi[i] + 0.5 * dt * k1[i]
        _apply_h(tmp, w[1], fields, k2)
        for i in range(n):
            k2[i] *= -1j
            tmp[i] = psi[i] + 0.5 * dt * k2[i]
        _apply_h(tmp, w[1], fields, k3)
        for i in range(n):
            k3[i] *= -1j
            tmp[i] = psi[i] + dt * k3[i]
        _apply_h(tmp, w[2], fields, k4)
        for i in range(n):
            k4[i] *= -1j
            psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
