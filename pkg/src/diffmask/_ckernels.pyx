# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np

from libc.math cimport sqrt


cdef double _norm(const double[:, ::1] m, Py_ssize_t row) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t j
    for j in range(m.shape[1]):
        s += m[row, j] * m[row, j]
    return sqrt(s)


def nearest_seed(tokens, seeds):
    cdef const double[:, ::1] tok = np.ascontiguousarray(tokens, dtype=np.float64)
    cdef const double[:, ::1] sd = np.ascontiguousarray(seeds, dtype=np.float64)
    if tok.shape[0] > 0 and tok.shape[1] != sd.shape[1]:
        raise ValueError("dimension mismatch")
    cdef Py_ssize_t n = tok.shape[0], kk = sd.shape[0], d = tok.shape[1]
    best_arr = np.empty(n, dtype=np.float64)
    arg_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] best = best_arr
    cdef long long[::1] arg = arg_arr
    seed_norm_arr = np.empty(kk, dtype=np.float64)
    cdef double[::1] seed_norms = seed_norm_arr
    cdef Py_ssize_t i, k, j
    cdef double tn, sn, dot, c, b
    cdef long long a
    with nogil:
        for k in range(kk):
            seed_norms[k] = _norm(sd, k)
        for i in range(n):
            tn = _norm(tok, i)
            b = -2.0
            a = 0
            for k in range(kk):
                sn = seed_norms[k]
                if tn == 0.0 or sn == 0.0:
                    c = 0.0
                else:
                    dot = 0.0
                    for j in range(d):
                        dot += tok[i, j] * sd[k, j]
                    c = dot / (tn * sn)
                    if c > 1.0:
                        c = 1.0
                    elif c < -1.0:
                        c = -1.0
                if c > b:
                    b = c
                    a = k
            best[i] = b
            arg[i] = a
    return best_arr, arg_arr


def weighted_draw(weights, sizes, long long budget, uniforms):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const long long[::1] sz = np.ascontiguousarray(sizes, dtype=np.int64)
    cdef const double[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t g = w.shape[0]
    alive_arr = np.ones(g, dtype=np.uint8)
    out_arr = np.empty(g, dtype=np.int64)
    cdef unsigned char[::1] alive = alive_arr
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t n_alive = g, step = 0, i, chosen, last_pos, pick
    cdef long long masked = 0
    cdef double total, target, acc
    with nogil:
        while masked < budget and n_alive > 0:
            total = 0.0
            for i in range(g):
                if alive[i]:
                    total += w[i]
            chosen = -1
            if total > 0.0:
                target = u[step] * total
                acc = 0.0
                last_pos = -1
                for i in range(g):
                    if alive[i] and w[i] > 0.0:
                        last_pos = i
                        acc += w[i]
                        if target < acc:
                            chosen = i
                            break
                if chosen < 0:
                    chosen = last_pos
            else:
                pick = <Py_ssize_t>(u[step] * n_alive)
                if pick >= n_alive:
                    pick = n_alive - 1
                for i in range(g):
                    if alive[i]:
                        if pick == 0:
                            chosen = i
                            break
                        pick -= 1
            alive[chosen] = 0
            n_alive -= 1
            masked += sz[chosen]
            out[step] = chosen
            step += 1
    return out_arr[:step].tolist()
