"""Pure-Python/numpy versions of the hot kernels.

Same contracts as the compiled ``_ckernels`` module; used when the
extension is not built or when ``RAILEVAC_PURE_PYTHON`` is set.
"""
import heapq
import math

import numpy as np

INF = math.inf


def all_pairs_train_time(indptr, indices, weights, labels, stop_time, transfer_time, penalty_aware):
    """All-pairs train time on a CSR graph.

    The path to each target is the Dijkstra tree path under ``weights``
    (plain mode) or under ``weights + stop_time + transfer_time * [label
    change]`` (penalty-aware mode). The returned value for the path is
    ``sum(weights) + stop_time * hops + transfer_time * changes``. Distance
    ties prefer fewer line changes, then the lower predecessor index.
    """
    indptr = np.asarray(indptr, dtype=np.int64).tolist()
    indices = np.asarray(indices, dtype=np.int64).tolist()
    weights = np.asarray(weights, dtype=np.float64).tolist()
    labels = np.asarray(labels, dtype=np.int64).tolist()
    n = len(indptr) - 1
    out = np.full((n, n), INF)
    ts, tc = float(stop_time), float(transfer_time)
    for s in range(n):
        dist = [INF] * n
        tsum = [0.0] * n
        hops = [0] * n
        ch = [0] * n
        pred = [-1] * n
        done = [False] * n
        dist[s] = 0.0
        heap = [(0.0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u] or d > dist[u]:
                continue
            done[u] = True
            lu = labels[u]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if done[v]:
                    continue
                w = weights[e]
                delta = 1 if labels[v] != lu else 0
                nd = d + w + (ts + tc * delta if penalty_aware else 0.0)
                nch = ch[u] + delta
                dv = dist[v]
                if nd < dv or (nd == dv and (nch < ch[v] or (nch == ch[v] and u < pred[v]))):
                    dist[v] = nd
                    tsum[v] = tsum[u] + w
                    hops[v] = hops[u] + 1
                    ch[v] = nch
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
        row = out[s]
        for v in range(n):
            if dist[v] < INF:
                row[v] = tsum[v] + ts * hops[v] + tc * ch[v]
    return out


def transport_ssp(cost, supply, capacity, tol):
    """Min-cost transportation by successive shortest paths.

    ``cost`` is (origins x sinks) with ``inf`` marking forbidden arcs;
    ``supply`` must be shipped in full and ``capacity`` bounds each sink.
    Returns ``(flow, unshipped)``; ``unshipped > 0`` means infeasible.
    """
    cost = np.asarray(cost, dtype=np.float64)
    nb, nm = cost.shape
    finite = np.isfinite(cost)
    c = np.where(finite, cost, 0.0)
    flow = np.zeros((nb, nm))
    sup = np.asarray(supply, dtype=np.float64).copy()
    cap = np.asarray(capacity, dtype=np.float64).copy()
    pi_o = np.zeros(nb)
    pi_s = np.zeros(nm)
    while True:
        active = sup > tol
        if not active.any():
            break
        do = np.where(active, 0.0, INF)
        ds = np.full(nm, INF)
        pred_s = np.full(nm, -1, dtype=np.int64)
        pred_o = np.full(nb, -1, dtype=np.int64)
        vis_o = np.zeros(nb, dtype=bool)
        vis_s = np.zeros(nm, dtype=bool)
        target = -1
        while True:
            mo = np.where(vis_o, INF, do)
            ms = np.where(vis_s, INF, ds)
            io = int(np.argmin(mo)) if nb else -1
            js = int(np.argmin(ms)) if nm else -1
            bo = mo[io] if nb else INF
            bs = ms[js] if nm else INF
            if bo == INF and bs == INF:
                break
            if bo <= bs:
                vis_o[io] = True
                rc = np.maximum(c[io] + pi_o[io] - pi_s, 0.0)
                nd = np.where(finite[io] & ~vis_s, bo + rc, INF)
                better = nd < ds
                ds[better] = nd[better]
                pred_s[better] = io
            else:
                vis_s[js] = True
                if cap[js] > tol:
                    target = js
                    break
                back = (flow[:, js] > tol) & ~vis_o
                rc = np.maximum(-c[:, js] + pi_s[js] - pi_o, 0.0)
                nd = np.where(back, bs + rc, INF)
                better = nd < do
                do[better] = nd[better]
                pred_o[better] = js
        if target < 0:
            break
        dt = ds[target]
        # walk back to the originating supply node
        bottleneck = cap[target]
        j = target
        path = []
        while True:
            i = pred_s[j]
            path.append((i, j))
            jb = pred_o[i]
            if jb < 0:
                bottleneck = min(bottleneck, sup[i])
                start = i
                break
            bottleneck = min(bottleneck, flow[i, jb])
            j = jb
        for i, j in path:
            flow[i, j] += bottleneck
            jb = pred_o[i]
            if jb >= 0:
                flow[i, jb] -= bottleneck
                if flow[i, jb] <= tol:
                    flow[i, jb] = 0.0
        sup[start] -= bottleneck
        cap[target] -= bottleneck
        pi_o += np.minimum(do, dt)
        pi_s += np.minimum(ds, dt)
    unshipped = float(sup[sup > tol].sum())
    return flow, unshipped
