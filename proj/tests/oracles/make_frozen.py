"""Independent reference computations for the unit tests.

Re-run to regenerate tests/frozen_values.hpp:
    python3 tests/oracles/make_frozen.py > tests/frozen_values.hpp
"""
import math
import sys

import mpmath
import networkx as nx
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def operator(dim, cells, mesh, periodic, shift):
    n = cells * mesh
    h = 1.0 / mesh
    one = sp.identity(n, format="csr")
    lap1 = sp.diags([2.0 * np.ones(n), -np.ones(n - 1), -np.ones(n - 1)], [0, -1, 1], format="lil")
    if periodic:
        lap1[0, n - 1] -= 1.0
        lap1[n - 1, 0] -= 1.0
    lap1 = lap1.tocsr() / (h * h)
    lap = sp.csr_matrix((n**dim, n**dim))
    for a in range(dim):
        term = sp.identity(1, format="csr")
        # node index with axis 0 fastest: kron(axis dim-1, ..., axis 0)
        for b in reversed(range(dim)):
            term = sp.kron(term, lap1 if b == a else one, format="csr")
        lap = lap + term
    return (lap + sp.diags(shift)).tocsc()


def coords(i, n, dim):
    out = []
    for _ in range(dim):
        out.append(i % n)
        i //= n
    return out


def bump(r2):
    s = r2 / 0.01
    return 0.0 if s >= 1.0 else math.exp(1.0 - 1.0 / (1.0 - s))


def potential(dim, cells, mesh, omega):
    n = cells * mesh
    h = 1.0 / mesh
    v = np.zeros(n**dim)
    for i in range(n**dim):
        c = coords(i, n, dim)
        cell = [x // mesh for x in c]
        r2 = sum((-0.5 + x * h - z) ** 2 for x, z in zip(c, cell))
        j = 0
        for a in reversed(range(dim)):
            j = j * cells + cell[a]
        v[i] = omega[j] * bump(r2)
    return v


def emit_array(name, values, fmt="{:.17g}", ctype="double"):
    body = ", ".join(fmt.format(x) for x in values)
    print(f"inline constexpr {ctype} {name}[] = {{{body}}};")


OMEGA16 = [((7 * j) % 5) / 4.0 for j in range(16)]


def landscape_1d():
    v = potential(1, 16, 20, OMEGA16)
    a = operator(1, 16, 20, False, 1.0 * v + 1e-3)
    u = spla.spsolve(a, np.ones(320))
    nodes = [0, 10, 160, 170, 319]
    emit_array("kLandscape1dNodes", nodes, "{}", "std::size_t")
    emit_array("kLandscape1dValues", [u[i] for i in nodes])


def landscape_2d_periodic():
    omega = [0.2, 1.0, 0.0, 0.6]
    v = potential(2, 2, 20, omega)
    a = operator(2, 2, 20, True, 1.0 * v + 0.1)
    u = spla.spsolve(a, np.ones(1600))
    nodes = [0, 10 + 40 * 10, 30 + 40 * 10, 30 + 40 * 30, 1599]
    emit_array("kLandscape2dNodes", nodes, "{}", "std::size_t")
    emit_array("kLandscape2dValues", [u[i] for i in nodes])


def synthetic_3d():
    n = 12
    idx = np.arange(n**3)
    v = 0.5 * (1.0 + np.sin(0.7 * idx))
    a = operator(3, 2, 6, False, 2.0 * v + 0.01)
    u = spla.spsolve(a, np.ones(n**3))
    nodes = [0, 500, 863, 1727]
    emit_array("kSynthetic3dNodes", nodes, "{}", "std::size_t")
    emit_array("kSynthetic3dValues", [u[i] for i in nodes])


def green_free_1d():
    a = operator(1, 4, 16, False, np.ones(64))
    rhs = np.zeros(64)
    rhs[32] = 16.0
    g = spla.spsolve(a, rhs)
    nodes = [0, 16, 31, 32, 48, 63]
    emit_array("kGreenFreeNodes", nodes, "{}", "std::size_t")
    emit_array("kGreenFreeValues", [g[i] for i in nodes])


def agmon_1d():
    v = potential(1, 16, 20, OMEGA16)
    a = operator(1, 16, 20, False, 1.0 * v + 1e-6)
    rhs = np.zeros(320)
    rhs[170] = 20.0
    g = spla.spsolve(a, rhs)
    h = 1.0 / 20
    mu, inner, outer = 0.1, 1.0, 7.0

    def chi(r):
        return min(min(max(r - inner, 0.0), 1.0), min(max(outer - r, 0.0), 1.0))

    lhs = rhs_total = 0.0
    for i in range(320):
        r, rn = abs(i - 170) * h, abs(i + 1 - 170) * h
        gn = g[i + 1] if i + 1 < 320 else 0.0
        dg2 = ((gn - g[i]) / h) ** 2
        dh2 = ((mu * rn - mu * r) / h) ** 2
        dchi2 = ((chi(rn) - chi(r)) / h) ** 2
        e2h = math.exp(2 * mu * r)
        lhs += 0.5 * chi(r) ** 2 * e2h * dg2 + chi(r) ** 2 * e2h * g[i] ** 2 * (v[i] - 4 * dh2)
        rhs_total += 4 * dchi2 * e2h * g[i] ** 2
    emit_array("kAgmon1dLhsRhs", [lhs * h, rhs_total * h])


def gap_moments():
    mpmath.mp.dps = 30
    rows = []
    for q in (0.5, 0.25):
        for p in (1, 2, 4, 8):
            s = mpmath.nsum(lambda k: k**p * (k - 1) * q**2 * (1 - q) ** (k - 2), [2, mpmath.inf])
            rows.append(float(s ** (mpmath.mpf(1) / p)))
    emit_array("kGapMomentsQHalf", rows[:4])
    emit_array("kGapMomentsQQuarter", rows[4:])


def sites_in_edge_cube(k, dim):
    # Integer points strictly inside the cube of side 2^{k-1} around an integer center.
    half = 2.0 ** (k - 2)
    per_axis = sum(1 for j in range(-64, 65) if abs(j) < half)
    return per_axis**dim


def choose_k(closed, dim):
    for k in range(1, 31):
        if closed ** sites_in_edge_cube(k, dim) < 0.5:
            return k
    raise ValueError


def choose_k_table():
    emit_array("kEdgeCubeSites2d", [sites_in_edge_cube(k, 2) for k in range(1, 7)], "{}", "std::size_t")
    cases = [(0.5, 1), (0.5, 2), (0.5, 3), (0.9, 2), (0.75, 2), (0.99, 2), (0.999, 2)]
    emit_array("kChooseKClosed", [c for c, _ in cases])
    emit_array("kChooseKDim", [d for _, d in cases], "{}", "int")
    emit_array("kChooseKExpected", [choose_k(c, d) for c, d in cases], "{}", "int")


def weighted_fit():
    r = np.arange(20, dtype=float)
    vals = 2.0 * np.exp(-0.3 * r) * (1 + 0.05 * np.sin(1.7 * r))
    ci = 0.02 * vals * (1 + r / 10)
    w = 1.0 / (ci / vals) ** 2
    y = np.log(vals)
    slope, intercept = np.polyfit(r, y, 1, w=np.sqrt(w))
    resid = y - (intercept + slope * r)
    ym = np.sum(w * y) / np.sum(w)
    r2 = 1 - np.sum(w * resid**2) / np.sum(w * (y - ym) ** 2)
    emit_array("kFitRateInterceptR2", [-slope, intercept, r2])


def chemical_distance():
    side, dim = 5, 2
    g = nx.Graph()
    for v in range(side * side):
        x, y = v % side, v // side
        g.add_node(v)
        for a in range(dim):
            nb = [x, y]
            nb[a] += 1
            if nb[a] < side:
                g.add_edge(v, nb[0] + side * nb[1], weight=1 if (3 * v + 5 * a) % 7 < 3 else 0)
    d = nx.single_source_dijkstra_path_length(g, 2 + side * 2)
    emit_array("kChemicalDistance5x5", [d[v] for v in range(side * side)], "{}", "int")


def main():
    print("#pragma once")
    print("// Generated by tests/oracles/make_frozen.py; do not edit by hand.")
    print("#include <cstddef>")
    print("namespace frozen {")
    landscape_1d()
    landscape_2d_periodic()
    synthetic_3d()
    green_free_1d()
    agmon_1d()
    gap_moments()
    choose_k_table()
    weighted_fit()
    chemical_distance()
    print("}  // namespace frozen")


if __name__ == "__main__":
    sys.exit(main())
