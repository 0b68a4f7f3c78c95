"""Compiled inner loops for GF(p) elimination, Pauli algebra and cut sweeps.

All kernels take ``int64`` numpy arrays and are compiled with numba. Setting
``NUMBA_DISABLE_JIT=1`` runs them as ordinary Python.

Pauli conventions used throughout:

- a symplectic vector ``v`` of length ``2n`` is split as ``(x | z)``;
- ``W(x, z) = tau^(x.z) X^x Z^z`` with ``tau^2 = omega = exp(2 pi i / p)``;
  ``tau`` has order ``p`` for odd ``p`` and order 4 for ``p = 2`` (``tau = i``);
- a generator is ``tau^s W(v)`` with ``s`` taken modulo ``order``;
- ``W(a) W(b) = tau^(-<a, b>) W(a + b)`` with ``<a, b> = a_x.b_z - a_z.b_x``
  evaluated over the integers before reducing ``a + b`` modulo ``p``.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def inverse_mod(a, p):
    """Multiplicative inverse of ``a`` modulo the prime ``p`` (0 if ``a = 0``)."""
    a = a % p
    for b in range(1, p):
        if (a * b) % p == 1:
            return b
    return 0


@njit(cache=True)
def gf_rank(mat, p):
    """Rank of ``mat`` over GF(p). The input is left untouched."""
    m = mat.copy() % p
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(cols):
                tmp = m[r, k]
                m[r, k] = m[piv, k]
                m[piv, k] = tmp
        inv = inverse_mod(m[r, c], p)
        for k in range(c, cols):
            m[r, k] = (m[r, k] * inv) % p
        for i in range(r + 1, rows):
            f = m[i, c]
            if f != 0:
                for k in range(c, cols):
                    m[i, k] = (m[i, k] - f * m[r, k]) % p
        r += 1
    return r


@njit(cache=True)
def multiply_into(a, phase_a, b, phase_b, c, p, order):
    """Overwrite ``a`` with the reduced vector of ``(tau^phase_a W(a)) (tau^phase_b W(b))^c``.

    Returns the phase exponent of the product modulo ``order``.
    """
    n = a.shape[0] // 2
    sympl = 0
    for k in range(n):
        sympl += a[k] * c * b[n + k] - a[n + k] * c * b[k]
    phase = phase_a + c * phase_b - sympl
    # W(x + p kx, z + p kz) = tau^(p (kx.z + x.kz + p kx.kz)) W(x, z)
    corr = 0
    for k in range(n):
        x = a[k] + c * b[k]
        z = a[n + k] + c * b[n + k]
        kx = x // p
        kz = z // p
        xr = x - kx * p
        zr = z - kz * p
        corr += kx * zr + xr * kz + p * kx * kz
        a[k] = xr
        a[n + k] = zr
    return (phase + p * corr) % order


@njit(cache=True)
def echelonize(gens, phases, cols, p, order):
    """Phase-tracked reduced row echelon form on the listed columns, in place.

    Row operations are group multiplications, so the rows keep generating the
    same stabilizer group. Returns the number of pivot rows, which come first.
    """
    rows = gens.shape[0]
    width = gens.shape[1]
    r = 0
    for ci in range(cols.shape[0]):
        if r == rows:
            break
        c = cols[ci]
        piv = -1
        for i in range(r, rows):
            if gens[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(width):
                tmp = gens[r, k]
                gens[r, k] = gens[piv, k]
                gens[piv, k] = tmp
            tp = phases[r]
            phases[r] = phases[piv]
            phases[piv] = tp
        inv = inverse_mod(gens[r, c], p)
        if inv != 1:
            scratch = np.zeros(width, dtype=np.int64)
            phases[r] = multiply_into(scratch, 0, gens[r], phases[r], inv, p, order)
            for k in range(width):
                gens[r, k] = scratch[k]
        for i in range(rows):
            if i != r and gens[i, c] != 0:
                factor = (p - gens[i, c]) % p
                phases[i] = multiply_into(gens[i], phases[i], gens[r], phases[r], factor, p, order)
        r += 1
    return r


@njit(cache=True)
def measure(gens, phases, u, t, p, order):
    """Measure ``tau^t W(u)`` and postselect eigenvalue 1, updating the tableau in place.

    Returns 1 for a uniformly random outcome (state kept, norm^2 scaled by 1/p),
    0 for a deterministic outcome equal to 1, -1 for a deterministic outcome
    different from 1 (projection annihilates the state), and -2 when ``u``
    commutes with every generator without lying in their span.
    """
    rows = gens.shape[0]
    n = gens.shape[1] // 2
    pivot = -1
    comm = np.zeros(rows, dtype=np.int64)
    for i in range(rows):
        s = 0
        for k in range(n):
            s += u[k] * gens[i, n + k] - u[n + k] * gens[i, k]
        comm[i] = s % p
        if pivot < 0 and comm[i] != 0:
            pivot = i
    if pivot >= 0:
        inv = inverse_mod(comm[pivot], p)
        for i in range(rows):
            if i != pivot and comm[i] != 0:
                factor = (-comm[i] * inv) % p
                phases[i] = multiply_into(
                    gens[i], phases[i], gens[pivot], phases[pivot], factor, p, order
                )
        for k in range(2 * n):
            gens[pivot, k] = u[k]
        phases[pivot] = t % order
        return 1

    cols = np.arange(2 * n)
    rank = echelonize(gens, phases, cols, p, order)
    w = u.copy()
    phase = t % order
    for r in range(rank):
        lead = -1
        for k in range(2 * n):
            if gens[r, k] != 0:
                lead = k
                break
        e = w[lead] % p
        if e != 0:
            phase = multiply_into(w, phase, gens[r], phases[r], p - e, p, order)
    for k in range(2 * n):
        if w[k] != 0:
            return -2
    if phase % order == 0:
        return 0
    return -1


@njit(cache=True)
def cut_histogram(edge_masks, weights, terminal_bits, n_vertices, max_cut):
    """Count cuts by value over all ``2^n_vertices`` subsets, bucketed by ``S & T``.

    ``hist[a, c]`` is the number of vertex subsets ``S`` whose terminal part
    has index ``a`` (bit ``i`` set iff terminal ``i`` is in ``S``) and whose
    cut value is ``c``.
    """
    n_t = terminal_bits.shape[0]
    hist = np.zeros((1 << n_t, max_cut + 1), dtype=np.int64)
    n_e = edge_masks.shape[0]
    for s in range(1 << n_vertices):
        c = 0
        for e in range(n_e):
            inter = s & edge_masks[e]
            if inter != 0 and inter != edge_masks[e]:
                c += weights[e]
        a = 0
        for i in range(n_t):
            if (s >> terminal_bits[i]) & 1:
                a |= 1 << i
        hist[a, c] += 1
    return hist
