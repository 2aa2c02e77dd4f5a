# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled enumeration and bound kernels.

Mirrors the pure-Python loops of ``sucrcsp.engine`` step for step, so both
backends report identical counters.  Resources are flat records: layer
(kind, x, y), mode (kind, x, y), three counters and a cost.
"""
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from libc.math cimport INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64

cdef enum:
    STAY = 0
    CHANGE = 1
    INFEAS = 2

cdef i64 NO_PATH_COUNT = 1099511627776  # 1 << 40, see monoid.NO_PATH_COUNT

cdef struct Res:
    int lk
    i64 lx
    i64 ly
    int mk
    i64 mx
    i64 my
    i64 ns
    i64 nl
    i64 nd
    double cost


cdef inline void md_plus(int k1, i64 x1, i64 y1, int k2, i64 x2, i64 y2, i64 tau,
                         int* k, i64* x, i64* y) noexcept nogil:
    if k1 == INFEAS or k2 == INFEAS:
        k[0] = INFEAS; x[0] = 0; y[0] = 0
    elif k1 == STAY:
        if k2 == STAY:
            k[0] = STAY; x[0] = x1 + x2; y[0] = 0
        else:
            k[0] = CHANGE; x[0] = x1 + x2; y[0] = y2
    elif k2 == STAY:
        k[0] = CHANGE; x[0] = x1; y[0] = y1 + x2
    elif y1 + x2 < tau:
        k[0] = INFEAS; x[0] = 0; y[0] = 0
    else:
        k[0] = CHANGE; x[0] = x1; y[0] = y2


cdef inline bint md_leq(int k1, i64 x1, i64 y1, int k2, i64 x2, i64 y2) noexcept nogil:
    if k2 == INFEAS:
        return True
    if k1 == INFEAS:
        return False
    if k1 == STAY:
        if k2 == STAY:
            return x1 >= x2
        return x1 >= x2 and x1 >= y2
    if k2 == STAY:
        return False
    return x1 >= x2 and y1 >= y2


cdef inline i64 imax(i64 a, i64 b) noexcept nogil:
    return a if a > b else b


cdef inline i64 imin(i64 a, i64 b) noexcept nogil:
    return a if a < b else b


cdef inline void md_meet(int k1, i64 x1, i64 y1, int k2, i64 x2, i64 y2,
                         int* k, i64* x, i64* y) noexcept nogil:
    if k1 == INFEAS:
        k[0] = k2; x[0] = x2; y[0] = y2
    elif k2 == INFEAS:
        k[0] = k1; x[0] = x1; y[0] = y1
    elif k1 == STAY:
        k[0] = STAY; y[0] = 0
        if k2 == STAY:
            x[0] = imax(x1, x2)
        else:
            x[0] = imax(x1, imax(x2, y2))
    elif k2 == STAY:
        k[0] = STAY; y[0] = 0
        x[0] = imax(x2, imax(x1, y1))
    else:
        k[0] = CHANGE; x[0] = imax(x1, x2); y[0] = imax(y1, y2)


cdef inline Res res_plus(const Res* a, const Res* b, i64 tl, i64 tm) noexcept nogil:
    cdef Res r
    md_plus(a.lk, a.lx, a.ly, b.lk, b.lx, b.ly, tl, &r.lk, &r.lx, &r.ly)
    md_plus(a.mk, a.mx, a.my, b.mk, b.mx, b.my, tm, &r.mk, &r.mx, &r.my)
    r.ns = a.ns + b.ns
    r.nl = a.nl + b.nl
    r.nd = a.nd + b.nd
    r.cost = a.cost + b.cost
    return r


cdef inline bint res_leq(const Res* a, const Res* b) noexcept nogil:
    return (a.cost <= b.cost and a.ns <= b.ns and a.nl <= b.nl and a.nd <= b.nd
            and md_leq(a.lk, a.lx, a.ly, b.lk, b.lx, b.ly)
            and md_leq(a.mk, a.mx, a.my, b.mk, b.mx, b.my))


cdef inline Res res_meet(const Res* a, const Res* b) noexcept nogil:
    cdef Res r
    md_meet(a.lk, a.lx, a.ly, b.lk, b.lx, b.ly, &r.lk, &r.lx, &r.ly)
    md_meet(a.mk, a.mx, a.my, b.mk, b.mx, b.my, &r.mk, &r.mx, &r.my)
    r.ns = imin(a.ns, b.ns)
    r.nl = imin(a.nl, b.nl)
    r.nd = imin(a.nd, b.nd)
    r.cost = a.cost if a.cost < b.cost else b.cost
    return r


cdef inline bint res_infeasible(const Res* r, i64 max_s, i64 max_l, i64 max_d) noexcept nogil:
    return (r.lk == INFEAS or r.mk == INFEAS or r.ns > max_s or r.nl > max_l or r.nd > max_d)


cdef inline Res load_res(const i64[:, ::1] ints, const double[::1] cost, Py_ssize_t i) noexcept nogil:
    cdef Res r
    r.lk = <int>ints[i, 0]; r.lx = ints[i, 1]; r.ly = ints[i, 2]
    r.mk = <int>ints[i, 3]; r.mx = ints[i, 4]; r.my = ints[i, 5]
    r.ns = ints[i, 6]; r.nl = ints[i, 7]; r.nd = ints[i, 8]
    r.cost = cost[i]
    return r


cdef inline void store_res(i64[:, ::1] ints, double[::1] cost, Py_ssize_t i, const Res* r) noexcept nogil:
    ints[i, 0] = r.lk; ints[i, 1] = r.lx; ints[i, 2] = r.ly
    ints[i, 3] = r.mk; ints[i, 4] = r.mx; ints[i, 5] = r.my
    ints[i, 6] = r.ns; ints[i, 7] = r.nl; ints[i, 8] = r.nd
    cost[i] = r.cost


cdef Res top_res() noexcept nogil:
    cdef Res r
    r.lk = INFEAS; r.lx = 0; r.ly = 0
    r.mk = INFEAS; r.mx = 0; r.my = 0
    r.ns = NO_PATH_COUNT; r.nl = NO_PATH_COUNT; r.nd = NO_PATH_COUNT
    r.cost = INFINITY
    return r


cdef Res neutral_res() noexcept nogil:
    cdef Res r
    r.lk = STAY; r.lx = 0; r.ly = 0
    r.mk = STAY; r.mx = 0; r.my = 0
    r.ns = 0; r.nl = 0; r.nd = 0
    r.cost = 0.0
    return r


def compute_bounds(const int[::1] out_ptr, const int[::1] out_arcs, const int[::1] heads,
                   const i64[:, ::1] res, const double[::1] cost, const int[::1] topo,
                   int dest, i64 tau_lay, i64 tau_mod):
    cdef Py_ssize_t n = topo.shape[0]
    cdef Py_ssize_t i, j
    cdef int v, a
    cdef Res b, arc, head_b, s
    out_ints = np.zeros((n, 9), dtype=np.int64)
    out_cost = np.zeros(n, dtype=np.float64)
    cdef i64[:, ::1] bi = out_ints
    cdef double[::1] bc = out_cost
    cdef Res top = top_res()
    cdef vector[Res] bounds
    bounds.resize(n, top)
    with nogil:
        bounds[dest] = neutral_res()
        for i in range(n - 1, -1, -1):
            v = topo[i]
            if v == dest:
                continue
            b = top
            for j in range(out_ptr[v], out_ptr[v + 1]):
                a = out_arcs[j]
                arc = load_res(res, cost, a)
                s = res_plus(&arc, &bounds[heads[a]], tau_lay, tau_mod)
                b = res_meet(&b, &s)
            bounds[v] = b
        for i in range(n):
            store_res(bi, bc, i, &bounds[i])
    return out_ints, out_cost


cdef bint dom_insert(vector[Res]& fres, vector[int]& fidx, const Res* r, int idx, i64* evicted) noexcept nogil:
    """Dominance test plus frontier update; False when ``r`` is dominated."""
    cdef Py_ssize_t k, m = 0
    cdef Py_ssize_t size = <Py_ssize_t>fres.size()
    for k in range(size):
        if res_leq(&fres[k], r):
            return False
    for k in range(size):
        if not res_leq(r, &fres[k]):
            if m != k:
                fres[m] = fres[k]
                fidx[m] = fidx[k]
            m += 1
    evicted[0] = size - m
    fres.resize(m)
    fidx.resize(m)
    fres.push_back(r[0])
    fidx.push_back(idx)
    return True


ctypedef pair[double, int] HeapItem  # (-key, -label index): max-heap pops min key, FIFO on ties


def solve(const int[::1] out_ptr, const int[::1] out_arcs, const int[::1] heads,
          const i64[:, ::1] res, const double[::1] cost, const int[::1] topo,
          const i64[::1] vtime, const cnp.uint8_t[::1] reach,
          const i64[:, ::1] bres, const double[::1] bcost,
          int origin, int dest, i64 tau_lay, i64 tau_mod,
          i64 max_s, i64 max_l, i64 max_d,
          int strategy, int key, bint use_dom, bint use_low, bint trace, i64 cap):
    cdef Py_ssize_t n = topo.shape[0]
    cdef vector[Res] lres
    cdef vector[int] lvert
    cdef vector[int] lparent
    cdef vector[int] larc
    cdef vector[double] ub_hist
    cdef vector[int] explored
    cdef vector[vector[int]] front
    cdef vector[vector[Res]] fres
    cdef i64 evicted = 0
    cdef vector[vector[int]] buckets
    cdef vector[int] arrivals
    cdef vector[int] kept
    cdef priority_queue[HeapItem] heap
    cdef vector[Res] bvec
    cdef i64 iterations = 0, ddom = 0, dlow = 0, od = 0
    cdef bint aborted = False
    cdef double ub = INFINITY
    cdef int best = -1
    cdef int idx, v, w, a, o, child
    cdef Py_ssize_t i, j, k, m
    cdef Res r, arc, proj
    cdef double kval

    if use_low or key == 2:
        bvec.resize(n)
        for i in range(n):
            bvec[i] = load_res(bres, bcost, i)

    front.resize(n)
    fres.resize(n)
    with nogil:
        lres.push_back(neutral_res())
        lvert.push_back(origin)
        lparent.push_back(-1)
        larc.push_back(-1)

        if strategy == 1:
            # label correcting
            if key == 0:
                kval = <double>vtime[origin]
            elif key == 1:
                kval = 0.0
            else:
                kval = bvec[origin].cost
            heap.push(HeapItem(-kval, 0))
            while not heap.empty():
                idx = -heap.top().second
                heap.pop()
                v = lvert[idx]
                r = lres[idx]
                if v == dest:
                    od += 1
                    if not res_infeasible(&r, max_s, max_l, max_d) and r.cost < ub:
                        ub = r.cost
                        best = idx
                        ub_hist.push_back(ub)
                    continue
                if use_low:
                    proj = res_plus(&r, &bvec[v], tau_lay, tau_mod)
                    if res_infeasible(&proj, max_s, max_l, max_d) or not (proj.cost <= ub):
                        dlow += 1
                        continue
                if use_dom:
                    if not dom_insert(fres[v], front[v], &r, idx, &evicted):
                        ddom += 1
                        continue
                if cap >= 0 and iterations >= cap:
                    aborted = True
                    break
                for j in range(out_ptr[v], out_ptr[v + 1]):
                    a = out_arcs[j]
                    w = heads[a]
                    if not reach[w]:
                        continue
                    arc = load_res(res, cost, a)
                    child = <int>lres.size()
                    lres.push_back(res_plus(&lres[idx], &arc, tau_lay, tau_mod))
                    lvert.push_back(w)
                    lparent.push_back(idx)
                    larc.push_back(a)
                    if key == 0:
                        kval = <double>vtime[w]
                    elif key == 1:
                        kval = lres[child].cost
                    else:
                        kval = lres[child].cost + bvec[w].cost
                    iterations += 1
                    heap.push(HeapItem(-kval, -child))
                    if trace:
                        explored.push_back(a)
        else:
            # label setting, vertices in topological order
            buckets.resize(n)
            buckets[origin].push_back(0)
            for i in range(n):
                v = topo[i]
                arrivals.swap(buckets[v])
                buckets[v].clear()
                if v == dest:
                    for k in range(<Py_ssize_t>arrivals.size()):
                        idx = arrivals[k]
                        od += 1
                        if not res_infeasible(&lres[idx], max_s, max_l, max_d) and lres[idx].cost < ub:
                            ub = lres[idx].cost
                            best = idx
                            ub_hist.push_back(ub)
                    arrivals.clear()
                    continue
                front[v].clear()
                fres[v].clear()
                for k in range(<Py_ssize_t>arrivals.size()):
                    idx = arrivals[k]
                    if use_low:
                        proj = res_plus(&lres[idx], &bvec[v], tau_lay, tau_mod)
                        if res_infeasible(&proj, max_s, max_l, max_d) or not (proj.cost <= ub):
                            dlow += 1
                            continue
                    if use_dom:
                        if not dom_insert(fres[v], front[v], &lres[idx], idx, &evicted):
                            ddom += 1
                            continue
                        ddom += evicted
                    else:
                        front[v].push_back(idx)
                arrivals.clear()
                if cap >= 0 and iterations >= cap:
                    aborted = True
                    break
                for k in range(<Py_ssize_t>front[v].size()):
                    idx = front[v][k]
                    for j in range(out_ptr[v], out_ptr[v + 1]):
                        a = out_arcs[j]
                        w = heads[a]
                        if not reach[w]:
                            continue
                        arc = load_res(res, cost, a)
                        child = <int>lres.size()
                        lres.push_back(res_plus(&lres[idx], &arc, tau_lay, tau_mod))
                        lvert.push_back(w)
                        lparent.push_back(idx)
                        larc.push_back(a)
                        buckets[w].push_back(child)
                        iterations += 1
                        if trace:
                            explored.push_back(a)
                front[v].clear()
                fres[v].clear()

    path = None
    if best >= 0:
        path = []
        idx = best
        while lparent[idx] >= 0:
            path.append(larc[idx])
            idx = lparent[idx]
        path.reverse()
    hist = [ub_hist[i] for i in range(<Py_ssize_t>ub_hist.size())]
    ex = [explored[i] for i in range(<Py_ssize_t>explored.size())] if trace else None
    return path, ub, iterations, ddom, dlow, od, aborted, hist, ex
