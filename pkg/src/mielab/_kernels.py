"""Numba kernels for packed-word tableau simulation and cluster dynamics.

Tableau layout: rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers.
``xs``/``zs`` are (2n, W) uint64 arrays (qubit q lives at word q>>6,
bit q&63); ``rs`` is a (2n,) uint8 array of mod-4 phase exponents in the
i^r * prod X^x Z^z convention (see pauli.py).
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_M1 = uint64(0x5555555555555555)
_M2 = uint64(0x3333333333333333)
_M4 = uint64(0x0F0F0F0F0F0F0F0F)
_H01 = uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcount(v):
    v = v - ((v >> uint64(1)) & _M1)
    v = (v & _M2) + ((v >> uint64(2)) & _M2)
    v = (v + (v >> uint64(4))) & _M4
    return (v * _H01) >> uint64(56)


@njit(cache=True, inline="always")
def _parity_and(a, b):
    acc = uint64(0)
    for w in range(a.shape[0]):
        acc ^= a[w] & b[w]
    return int(_popcount(acc)) & 1


@njit(cache=True, inline="always")
def _omega(xa, za, xb, zb):
    """Symplectic form between two packed Paulis (1 = anticommute)."""
    acc = uint64(0)
    for w in range(xa.shape[0]):
        acc ^= (xa[w] & zb[w]) ^ (za[w] & xb[w])
    return int(_popcount(acc)) & 1


@njit(cache=True)
def k_omega(xa, za, xb, zb):
    return _omega(xa, za, xb, zb)


@njit(cache=True, inline="always")
def _rowmult(xs, zs, rs, h, i):
    """Row h <- (row i) * (row h), with mod-4 phase tracking."""
    sw = 0
    for w in range(xs.shape[1]):
        sw ^= int(_popcount(zs[i, w] & xs[h, w]))
    rs[h] = (rs[i] + rs[h] + 2 * sw) & 3
    for w in range(xs.shape[1]):
        xs[h, w] ^= xs[i, w]
        zs[h, w] ^= zs[i, w]


# ---------------------------------------------------------------------------
# Single-qubit / two-qubit deterministic gates (column ops)
# ---------------------------------------------------------------------------


@njit(cache=True)
def k_gate_h(xs, zs, rs, q):
    w = q >> 6
    m = uint64(1) << uint64(q & 63)
    for row in range(xs.shape[0]):
        xb = xs[row, w] & m
        zb = zs[row, w] & m
        if xb and zb:
            rs[row] = (rs[row] + 2) & 3
        xs[row, w] ^= xb ^ zb
        zs[row, w] ^= xb ^ zb


@njit(cache=True)
def k_gate_s(xs, zs, rs, q):
    w = q >> 6
    m = uint64(1) << uint64(q & 63)
    for row in range(xs.shape[0]):
        if xs[row, w] & m:
            rs[row] = (rs[row] + 1) & 3
            zs[row, w] ^= m


@njit(cache=True)
def k_gate_x(xs, zs, rs, q):
    w = q >> 6
    m = uint64(1) << uint64(q & 63)
    for row in range(xs.shape[0]):
        if zs[row, w] & m:
            rs[row] = (rs[row] + 2) & 3


@njit(cache=True)
def k_gate_z(xs, zs, rs, q):
    w = q >> 6
    m = uint64(1) << uint64(q & 63)
    for row in range(xs.shape[0]):
        if xs[row, w] & m:
            rs[row] = (rs[row] + 2) & 3


@njit(cache=True)
def k_gate_cnot(xs, zs, rs, a, b):
    wa = a >> 6
    ma = uint64(1) << uint64(a & 63)
    wb = b >> 6
    mb = uint64(1) << uint64(b & 63)
    for row in range(xs.shape[0]):
        if xs[row, wa] & ma:
            xs[row, wb] ^= mb
        if zs[row, wb] & mb:
            zs[row, wa] ^= ma


@njit(cache=True)
def k_gate_cz(xs, zs, rs, a, b):
    wa = a >> 6
    ma = uint64(1) << uint64(a & 63)
    wb = b >> 6
    mb = uint64(1) << uint64(b & 63)
    for row in range(xs.shape[0]):
        xa = xs[row, wa] & ma
        xb = xs[row, wb] & mb
        if xa and xb:
            rs[row] = (rs[row] + 2) & 3
        if xb:
            zs[row, wa] ^= ma
        if xa:
            zs[row, wb] ^= mb


@njit(cache=True)
def k_clifford_layer(xs, zs, rs, pairs, bits_tabs, phase_tabs, sign_masks):
    """Apply sampled two-qubit Cliffords on disjoint qubit pairs.

    pairs: (g, 2) int64.  bits_tabs/phase_tabs: (g, 16) uint8 lookup of the
    conjugation images; key = xa | za<<1 | xb<<2 | zb<<3.  sign_masks adds
    2*popcount(key & mask) to the phase (uniform sign bits).
    """
    n_rows = xs.shape[0]
    for g in range(pairs.shape[0]):
        a = pairs[g, 0]
        b = pairs[g, 1]
        wa = a >> 6
        ma = uint64(1) << uint64(a & 63)
        wb = b >> 6
        mb = uint64(1) << uint64(b & 63)
        smask = sign_masks[g]
        for row in range(n_rows):
            key = 0
            if xs[row, wa] & ma:
                key |= 1
            if zs[row, wa] & ma:
                key |= 2
            if xs[row, wb] & mb:
                key |= 4
            if zs[row, wb] & mb:
                key |= 8
            if key == 0:
                continue
            nb = bits_tabs[g, key]
            dph = phase_tabs[g, key] + 2 * _popcount(uint64(key & smask))
            rs[row] = (rs[row] + dph) & 3
            # clear then set the a,b bits
            if (nb & 1) != ((key & 1)):
                xs[row, wa] ^= ma
            if ((nb >> 1) & 1) != ((key >> 1) & 1):
                zs[row, wa] ^= ma
            if ((nb >> 2) & 1) != ((key >> 2) & 1):
                xs[row, wb] ^= mb
            if ((nb >> 3) & 1) != ((key >> 3) & 1):
                zs[row, wb] ^= mb


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


@njit(cache=True)
def k_measure(xs, zs, rs, n, px, pz, p_phase, coin):
    """Measure the packed Pauli (px, pz, i^p_phase).

    Returns (deterministic, outcome_bit); outcome value is (-1)^outcome_bit.
    """
    W = xs.shape[1]
    pivot = -1
    for row in range(n, 2 * n):
        if _omega(xs[row], zs[row], px, pz):
            pivot = row
            break
    if pivot >= 0:
        for row in range(2 * n):
            if row != pivot and _omega(xs[row], zs[row], px, pz):
                _rowmult(xs, zs, rs, row, pivot)
        d = pivot - n
        for w in range(W):
            xs[d, w] = xs[pivot, w]
            zs[d, w] = zs[pivot, w]
            xs[pivot, w] = px[w]
            zs[pivot, w] = pz[w]
        rs[d] = rs[pivot]
        rs[pivot] = (p_phase + 2 * coin) & 3
        return 0, coin
    # deterministic: accumulate the product of stabilizers selected by
    # destabilizer anticommutation
    accx = np.zeros(W, np.uint64)
    accz = np.zeros(W, np.uint64)
    accr = 0
    for i in range(n):
        if _omega(xs[i], zs[i], px, pz):
            sw = 0
            for w in range(W):
                sw += int(_popcount(accz[w] & xs[n + i, w]))
            accr = (accr + rs[n + i] + 2 * sw) & 3
            for w in range(W):
                accx[w] ^= xs[n + i, w]
                accz[w] ^= zs[n + i, w]
    outcome = ((accr - p_phase) >> 1) & 1
    return 1, outcome


@njit(cache=True)
def k_measure_site_pauli(xs, zs, rs, n, site, is_x, coin):
    """Measure single-site Z (is_x=0) or X (is_x=1)."""
    W = xs.shape[1]
    px = np.zeros(W, np.uint64)
    pz = np.zeros(W, np.uint64)
    m = uint64(1) << uint64(site & 63)
    if is_x:
        px[site >> 6] = m
    else:
        pz[site >> 6] = m
    return k_measure(xs, zs, rs, n, px, pz, 0, coin)


@njit(cache=True)
def k_measure_basis_sites(xs, zs, rs, n, sites, is_x, coins):
    """Measure every listed site in the Z (or X) basis, in order."""
    W = xs.shape[1]
    px = np.zeros(W, np.uint64)
    pz = np.zeros(W, np.uint64)
    for k in range(sites.shape[0]):
        site = sites[k]
        w = site >> 6
        m = uint64(1) << uint64(site & 63)
        if is_x:
            px[w] = m
        else:
            pz[w] = m
        k_measure(xs, zs, rs, n, px, pz, 0, coins[k])
        px[w] = uint64(0)
        pz[w] = uint64(0)


@njit(cache=True)
def k_measure_two_site_layer(xs, zs, rs, n, sites_a, sites_b, is_x, coins):
    """Measure X_a X_b (is_x=1) or Z_a Z_b (is_x=0) for each listed pair."""
    W = xs.shape[1]
    px = np.zeros(W, np.uint64)
    pz = np.zeros(W, np.uint64)
    for k in range(sites_a.shape[0]):
        a = sites_a[k]
        b = sites_b[k]
        wa = a >> 6
        ma = uint64(1) << uint64(a & 63)
        wb = b >> 6
        mb = uint64(1) << uint64(b & 63)
        if is_x:
            px[wa] |= ma
            px[wb] |= mb
        else:
            pz[wa] |= ma
            pz[wb] |= mb
        k_measure(xs, zs, rs, n, px, pz, 0, coins[k])
        px[wa] = uint64(0)
        px[wb] = uint64(0)
        pz[wa] = uint64(0)
        pz[wb] = uint64(0)


@njit(cache=True)
def k_measure_x_sites(xs, zs, rs, n, sites, coins):
    k_measure_basis_sites(xs, zs, rs, n, sites, 1, coins)


# ---------------------------------------------------------------------------
# Entanglement entropy via restricted-column GF(2) rank
# ---------------------------------------------------------------------------


@njit(cache=True)
def k_entropy_bits(xs, zs, n, sites):
    """S_A in bits = rank of stabilizer rows restricted to A, minus |A|."""
    m = sites.shape[0]
    if m == 0:
        return 0
    nw = (2 * m + 63) >> 6
    basis = np.zeros((n, nw), np.uint64)
    pivots = np.empty(n, np.int64)
    nbasis = 0
    row = np.zeros(nw, np.uint64)
    for g in range(n, 2 * n):
        for w in range(nw):
            row[w] = uint64(0)
        for t in range(m):
            q = sites[t]
            wq = q >> 6
            mq = uint64(1) << uint64(q & 63)
            if xs[g, wq] & mq:
                row[(2 * t) >> 6] |= uint64(1) << uint64((2 * t) & 63)
            if zs[g, wq] & mq:
                row[(2 * t + 1) >> 6] |= uint64(1) << uint64((2 * t + 1) & 63)
        # reduce against current basis
        for b in range(nbasis):
            pv = pivots[b]
            if (row[pv >> 6] >> uint64(pv & 63)) & uint64(1):
                for w in range(nw):
                    row[w] ^= basis[b, w]
        # find pivot
        pv = -1
        for w in range(nw):
            if row[w] != uint64(0):
                v = row[w]
                bit = 0
                while not (v & uint64(1)):
                    v >>= uint64(1)
                    bit += 1
                pv = (w << 6) + bit
                break
        if pv >= 0:
            for w in range(nw):
                basis[nbasis, w] = row[w]
            pivots[nbasis] = pv
            nbasis += 1
    return nbasis - m


# ---------------------------------------------------------------------------
# Percolation cluster dynamics (union-find with fresh nodes for splits)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True)
def k_cluster_merge(parent, size, handle, i, j):
    ri = _find(parent, handle[i])
    rj = _find(parent, handle[j])
    if ri == rj:
        return
    if size[ri] < size[rj]:
        ri, rj = rj, ri
    parent[rj] = ri
    size[ri] += size[rj]


@njit(cache=True)
def k_cluster_split(parent, size, handle, i, n_nodes):
    """Detach site i into a fresh singleton node; returns new node count."""
    r = _find(parent, handle[i])
    if size[r] == 1:
        return n_nodes
    size[r] -= 1
    parent[n_nodes] = n_nodes
    size[n_nodes] = 1
    handle[i] = n_nodes
    return n_nodes + 1


@njit(cache=True)
def k_cluster_observables(parent, size, handle, a_sites, b_sites, out):
    """out[0] = s1, out[1] = s2 for the given disjoint regions."""
    na = a_sites.shape[0]
    nb = b_sites.shape[0]
    tot = na + nb
    roots = np.empty(tot, np.int64)
    from_b = np.empty(tot, np.uint8)
    for k in range(na):
        roots[k] = _find(parent, handle[a_sites[k]])
        from_b[k] = 0
    for k in range(nb):
        roots[na + k] = _find(parent, handle[b_sites[k]])
        from_b[na + k] = 1
    order = np.argsort(roots)
    s1 = 0
    s2 = 0
    k = 0
    while k < tot:
        r = roots[order[k]]
        cnt = 0
        in_a = False
        in_b = False
        while k < tot and roots[order[k]] == r:
            cnt += 1
            if from_b[order[k]]:
                in_b = True
            else:
                in_a = True
            k += 1
        if in_a and in_b:
            if cnt == size[r]:
                s1 += 1
            else:
                s2 += 1
    out[0] = s1
    out[1] = s2
