# cython: language_level=3
"""Compiled versions of the hot kernels (see ``_pykernels`` for contracts)."""
import numpy as np

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc


cdef inline bint _heap_less(double da, Py_ssize_t na, double db, Py_ssize_t nb) noexcept nogil:
    return da < db or (da == db and na < nb)


cdef void _heap_push(double* hd, Py_ssize_t* hn, Py_ssize_t* size, double d, Py_ssize_t v) noexcept nogil:
    cdef Py_ssize_t k = size[0]
    cdef Py_ssize_t parent
    size[0] += 1
    while k > 0:
        parent = (k - 1) >> 1
        if _heap_less(d, v, hd[parent], hn[parent]):
            hd[k] = hd[parent]
            hn[k] = hn[parent]
            k = parent
        else:
            break
    hd[k] = d
    hn[k] = v


cdef void _heap_pop(double* hd, Py_ssize_t* hn, Py_ssize_t* size, double* d_out, Py_ssize_t* v_out) noexcept nogil:
    cdef Py_ssize_t last, k, child
    cdef double d
    cdef Py_ssize_t v
    d_out[0] = hd[0]
    v_out[0] = hn[0]
    size[0] -= 1
    last = size[0]
    if last == 0:
        return
    d = hd[last]
    v = hn[last]
    k = 0
    while True:
        child = 2 * k + 1
        if child >= last:
            break
        if child + 1 < last and _heap_less(hd[child + 1], hn[child + 1], hd[child], hn[child]):
            child += 1
        if _heap_less(hd[child], hn[child], d, v):
            hd[k] = hd[child]
            hn[k] = hn[child]
            k = child
        else:
            break
    hd[k] = d
    hn[k] = v


def all_pairs_train_time(indptr, indices, weights, labels, double stop_time,
                         double transfer_time, bint penalty_aware):
    cdef long long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef long long[::1] lab = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef Py_ssize_t m = ix.shape[0]
    out_arr = np.full((n, n), np.inf)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] dist = np.empty(n)
    cdef double[::1] tsum = np.empty(n)
    cdef long long[::1] hops = np.empty(n, dtype=np.int64)
    cdef long long[::1] ch = np.empty(n, dtype=np.int64)
    cdef long long[::1] pred = np.empty(n, dtype=np.int64)
    cdef unsigned char[::1] done = np.empty(n, dtype=np.uint8)
    cdef Py_ssize_t cap = m + n + 1
    cdef double* hd = <double*>malloc(cap * sizeof(double))
    cdef Py_ssize_t* hn = <Py_ssize_t*>malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t size, s, u, v, e
    cdef double d, w, nd, dv
    cdef long long delta, nch
    if hd == NULL or hn == NULL:
        free(hd)
        free(hn)
        raise MemoryError()
    try:
        with nogil:
            for s in range(n):
                for v in range(n):
                    dist[v] = INFINITY
                    tsum[v] = 0.0
                    hops[v] = 0
                    ch[v] = 0
                    pred[v] = -1
                    done[v] = 0
                dist[s] = 0.0
                size = 0
                _heap_push(hd, hn, &size, 0.0, s)
                while size > 0:
                    _heap_pop(hd, hn, &size, &d, &u)
                    if done[u] or d > dist[u]:
                        continue
                    done[u] = 1
                    for e in range(ip[u], ip[u + 1]):
                        v = ix[e]
                        if done[v]:
                            continue
                        w = wt[e]
                        delta = 1 if lab[v] != lab[u] else 0
                        if penalty_aware:
                            nd = d + w + (stop_time + transfer_time * delta)
                        else:
                            nd = d + w
                        nch = ch[u] + delta
                        dv = dist[v]
                        if nd < dv or (nd == dv and (nch < ch[v] or (nch == ch[v] and u < pred[v]))):
                            dist[v] = nd
                            tsum[v] = tsum[u] + w
                            hops[v] = hops[u] + 1
                            ch[v] = nch
                            pred[v] = u
                            # lazy deletion bounds heap growth by the number of relaxations
                            if size == cap:
                                with gil:
                                    raise MemoryError("heap overflow")
                            _heap_push(hd, hn, &size, nd, v)
                for v in range(n):
                    if dist[v] < INFINITY:
                        out[s, v] = tsum[v] + stop_time * hops[v] + transfer_time * ch[v]
    finally:
        free(hd)
        free(hn)
    return out_arr


def transport_ssp(cost, supply, capacity, double tol):
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t nb = c.shape[0]
    cdef Py_ssize_t nm = c.shape[1]
    flow_arr = np.zeros((nb, nm))
    cdef double[:, ::1] flow = flow_arr
    cdef double[::1] sup = np.array(supply, dtype=np.float64)
    cdef double[::1] cap = np.array(capacity, dtype=np.float64)
    cdef double[::1] pi_o = np.zeros(nb)
    cdef double[::1] pi_s = np.zeros(nm)
    cdef double[::1] do_ = np.empty(nb)
    cdef double[::1] ds = np.empty(nm)
    cdef long long[::1] pred_s = np.empty(nm, dtype=np.int64)
    cdef long long[::1] pred_o = np.empty(nb, dtype=np.int64)
    cdef unsigned char[::1] vis_o = np.empty(nb, dtype=np.uint8)
    cdef unsigned char[::1] vis_s = np.empty(nm, dtype=np.uint8)
    cdef Py_ssize_t i, j, io, js, target, start, jb
    cdef double bo, bs, rc, nd, dt, bottleneck, cij
    cdef bint any_active
    with nogil:
        while True:
            any_active = False
            for i in range(nb):
                if sup[i] > tol:
                    do_[i] = 0.0
                    any_active = True
                else:
                    do_[i] = INFINITY
                pred_o[i] = -1
                vis_o[i] = 0
            if not any_active:
                break
            for j in range(nm):
                ds[j] = INFINITY
                pred_s[j] = -1
                vis_s[j] = 0
            target = -1
            while True:
                io = -1
                bo = INFINITY
                for i in range(nb):
                    if not vis_o[i] and do_[i] < bo:
                        bo = do_[i]
                        io = i
                js = -1
                bs = INFINITY
                for j in range(nm):
                    if not vis_s[j] and ds[j] < bs:
                        bs = ds[j]
                        js = j
                if io < 0 and js < 0:
                    break
                if io >= 0 and bo <= bs:
                    vis_o[io] = 1
                    for j in range(nm):
                        cij = c[io, j]
                        if vis_s[j] or cij == INFINITY:
                            continue
                        rc = cij + pi_o[io] - pi_s[j]
                        if rc < 0.0:
                            rc = 0.0
                        nd = bo + rc
                        if nd < ds[j]:
                            ds[j] = nd
                            pred_s[j] = io
                else:
                    vis_s[js] = 1
                    if cap[js] > tol:
                        target = js
                        break
                    for i in range(nb):
                        if vis_o[i] or flow[i, js] <= tol:
                            continue
                        rc = -c[i, js] + pi_s[js] - pi_o[i]
                        if rc < 0.0:
                            rc = 0.0
                        nd = bs + rc
                        if nd < do_[i]:
                            do_[i] = nd
                            pred_o[i] = js
            if target < 0:
                break
            dt = ds[target]
            bottleneck = cap[target]
            j = target
            while True:
                i = pred_s[j]
                jb = pred_o[i]
                if jb < 0:
                    if sup[i] < bottleneck:
                        bottleneck = sup[i]
                    start = i
                    break
                if flow[i, jb] < bottleneck:
                    bottleneck = flow[i, jb]
                j = jb
            j = target
            while True:
                i = pred_s[j]
                flow[i, j] += bottleneck
                jb = pred_o[i]
                if jb < 0:
                    break
                flow[i, jb] -= bottleneck
                if flow[i, jb] <= tol:
                    flow[i, jb] = 0.0
                j = jb
            sup[start] -= bottleneck
            cap[target] -= bottleneck
            for i in range(nb):
                pi_o[i] += do_[i] if do_[i] < dt else dt
            for j in range(nm):
                pi_s[j] += ds[j] if ds[j] < dt else dt
    unshipped = 0.0
    for i in range(nb):
        if sup[i] > tol:
            unshipped += sup[i]
    return flow_arr, unshipped
