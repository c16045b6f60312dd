"""Independent reference implementations used only by the tests."""

import math

import numpy as np


def brute_lof(X, k):
    """LOF straight from the definitions, with plain Python loops."""
    X = [list(map(float, row)) for row in np.atleast_2d(X)]
    n = len(X)
    d = [[math.dist(X[i], X[j]) for j in range(n)] for i in range(n)]
    kdist = []
    neigh = []
    for p in range(n):
        others = sorted(d[p][o] for o in range(n) if o != p)
        kd = others[k - 1]
        kdist.append(kd)
        neigh.append([o for o in range(n) if o != p and d[p][o] <= kd])
    lrd = []
    for p in range(n):
        s = sum(max(kdist[o], d[p][o]) for o in neigh[p])
        lrd.append(len(neigh[p]) / s)
    return np.array([sum(lrd[o] for o in neigh[p]) / len(neigh[p]) / lrd[p]
                     for p in range(n)]), kdist, neigh


def brute_knn(X, k):
    _, kdist, neigh = brute_lof(X, k)
    return kdist, neigh


def numeric_grad(f, params, step=1e-5):
    """Central differences of scalar ``f()`` w.r.t. every entry of every array."""
    out = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = p[i]
            p[i] = old + step
            hi = f()
            p[i] = old - step
            lo = f()
            p[i] = old
            g[i] = (hi - lo) / (2 * step)
        out.append(g)
    return out


def reference_forward(weights, biases, X):
    """Second, loop-free-but-independent MLP forward: returns logits, probabilities."""
    a = np.asarray(X, dtype=float)
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = np.einsum("oi,ni->no", W, a) + b
        a = z if i == len(weights) - 1 else np.where(z > 0, z, 0.0)
    m = a.max(axis=1, keepdims=True)
    logp = a - m - np.log(np.exp(a - m).sum(axis=1, keepdims=True))
    return a, np.exp(logp)


def plain_ce_train(X, y, num_classes, hidden, epochs, batch_size, lr, eta, seed):
    """Mean cross-entropy SGD written out longhand; same seeding rule as the trainer."""
    from ousm.model import forward, init_model

    model = init_model([X.shape[1], *hidden, num_classes], seed=[seed, 0])
    rng = np.random.default_rng([seed, 1])
    n = X.shape[0]
    for _ in range(epochs):
        perm = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = perm[start:start + batch_size]
            rec = forward(model, X[idx])
            delta = rec.probabilities.copy()
            delta[np.arange(idx.size), y[idx]] -= 1.0
            delta *= np.full(idx.size, 1.0 / idx.size)[:, None]
            grads = []
            for i in range(len(model.weights) - 1, -1, -1):
                a = rec.activations[i]
                grads.append((i, delta.T @ a + (2.0 * eta) * model.weights[i], delta.sum(axis=0)))
                if i > 0:
                    delta = (delta @ model.weights[i]) * (a > 0.0)
            for i, gw, gb in grads:
                model.weights[i] -= lr * gw
                model.biases[i] -= lr * gb
    return model
