"""Pure-Python kernels.

Operation order mirrors ``_ckernels.pyx`` exactly (left-to-right sums, the
same divisions) so both backends produce bit-identical doubles.
"""
import math

import numpy as np


def _norm(row):
    s = 0.0
    for x in row:
        s += x * x
    return math.sqrt(s)


def nearest_seed(tokens, seeds):
    """Max cosine of each token row against the seed rows.

    Returns ``(best, argbest)``; ties go to the lowest seed index and a
    zero-norm vector on either side contributes cosine 0.
    """
    tok = np.asarray(tokens, dtype=np.float64).tolist()
    sd = np.asarray(seeds, dtype=np.float64).tolist()
    if tok and sd and len(tok[0]) != len(sd[0]):
        raise ValueError("dimension mismatch")
    seed_norms = [_norm(s) for s in sd]
    n = len(tok)
    best = np.empty(n, dtype=np.float64)
    arg = np.empty(n, dtype=np.int64)
    for i in range(n):
        t = tok[i]
        tn = _norm(t)
        b = -2.0
        a = 0
        for k in range(len(sd)):
            s = sd[k]
            sn = seed_norms[k]
            if tn == 0.0 or sn == 0.0:
                c = 0.0
            else:
                dot = 0.0
                for j in range(len(t)):
                    dot += t[j] * s[j]
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
    return best, arg


def weighted_draw(weights, sizes, budget, uniforms):
    """Sequential weighted draw of groups without replacement.

    Consumes ``uniforms[step]`` per draw and stops once the summed sizes of
    drawn groups reach ``budget``. When every remaining weight is zero the
    draw is uniform over the remaining groups. Returns the drawn group
    indices in draw order.
    """
    w = np.asarray(weights, dtype=np.float64).tolist()
    sz = np.asarray(sizes, dtype=np.int64).tolist()
    u = np.asarray(uniforms, dtype=np.float64).tolist()
    g = len(w)
    alive = [True] * g
    n_alive = g
    masked = 0
    drawn = []
    step = 0
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
            pick = int(u[step] * n_alive)
            if pick >= n_alive:
                pick = n_alive - 1
            for i in range(g):
                if alive[i]:
                    if pick == 0:
                        chosen = i
                        break
                    pick -= 1
        alive[chosen] = False
        n_alive -= 1
        masked += sz[chosen]
        drawn.append(chosen)
        step += 1
    return drawn
