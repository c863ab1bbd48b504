#!/usr/bin/env python3
"""Independent evaluation of simulation, counts and interval terms.

Reimplements the generator, the sampler and every interval formula with numpy
so the frozen values in tests/unit/test_golden.cpp can be regenerated:

    python3 tests/oracles/golden_oracle.py > tests/oracles/golden_values.json
"""
import json
import math

import numpy as np

MASK = (1 << 64) - 1
C = 48.0


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next() >> 11) * 2.0**-53


def cdf(row):
    acc = 0.0
    out = []
    last = 0
    for j, v in enumerate(row):
        acc += float(v)
        out.append(acc)
        if v > 0:
            last = j
    for j in range(last, len(out)):
        out[j] = 1.0
    return out


def draw(c, rng):
    u = rng.uniform()
    for j, v in enumerate(c):
        if v > u:
            return j
    return len(c) - 1


def stationary(M):
    w, V = np.linalg.eig(M.T)
    v = np.real(V[:, np.argmin(abs(w - 1))])
    return v / v.sum()


def simulate(M, mu, m, seed):
    rng = SplitMix64(seed)
    rows = [cdf(r) for r in M]
    x = [draw(cdf(mu), rng)]
    for _ in range(m - 1):
        x.append(draw(rows[x[-1]], rng))
    return np.array(x)


def counts(x, k, d):
    steps = (len(x) - 1) // k
    N = np.zeros((d, d), dtype=np.int64)
    a = x[0 : steps * k : k]
    b = x[k : steps * k + 1 : k]
    np.add.at(N, (a, b), 1)
    return N


def objective(t, m, dp):
    c = 0 if m == 0 else max(0, math.ceil(math.log(2 * m / t)))
    return (1 + c) * dp * math.exp(-t)


def tau(delta, m, dp):
    lo, hi = 1e-12, 1.0
    while objective(hi, m, dp) > delta:
        hi *= 2
    while hi - lo > 1e-12 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if objective(mid, m, dp) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def dilated_gap_k(P, pi):
    r = np.sqrt(pi)
    L = (r[:, None] * P) / r[None, :]
    s = np.linalg.svd(L, compute_uv=False)
    return 1.0 - s[1]


def dilated_pssg(M, kmax):
    pi = stationary(M)
    best = 0.0
    P = np.eye(len(M))
    for k in range(1, kmax + 1):
        P = P @ M
        best = max(best, dilated_gap_k(P, pi) / k)
    return best


def terms(N, alpha, tau_value, gap):
    d = len(N)
    Ni = N.sum(axis=1)
    steps = Ni.sum()
    lo = Ni.min() + d * alpha
    hi = Ni.max() + d * alpha
    pi_hat = (Ni + d * alpha) / (steps + d * d * alpha)
    d_hat = 4 * tau_value * math.sqrt(d / lo) + 2 * alpha * d / lo
    a_hat = math.sqrt(d) * hi / lo * d_hat
    b_hat = C / gap * math.log(2 * math.sqrt(2 * (steps + d * d * alpha) / lo)) * d_hat
    c = 0.0
    for p in pi_hat:
        c = max(c, b_hat / p, b_hat / (p - b_hat) if p > b_hat else math.inf)
    return dict(a_hat=a_hat, b_hat=b_hat, c_hat=0.5 * c, d_hat=d_hat, tau=tau_value, gap=gap)


def smoothed(N, alpha):
    d = len(N)
    Ni = N.sum(axis=1)
    return (N + alpha) / (Ni + d * alpha)[:, None]


def spec_gap_literal(N, alpha):
    d = len(N)
    Ni = N.sum(axis=1) + d * alpha
    L = (N + alpha) / np.sqrt(np.outer(Ni, Ni))
    r = np.sqrt(Ni / Ni.sum())
    v = np.concatenate([r, r]) / math.sqrt(2)
    w = np.concatenate([r, -r]) / math.sqrt(2)
    S = np.block([[np.zeros((d, d)), L], [L.T, np.zeros((d, d))]])
    S = S - np.outer(v, v) + np.outer(w, w)
    return 1.0 - max(abs(np.linalg.eigvalsh(S)))


def general_case(M, m, seed, alpha, delta, K):
    d = len(M)
    x = simulate(M, stationary(M), m, seed)
    out = {"first_states": x[:12].tolist(), "per_k": []}
    for k in range(1, K + 1):
        N = counts(x, k, d)
        t = tau(delta / (4 * d * K), int(N.sum()), d + 1)
        gap = dilated_pssg(smoothed(N, alpha), K)
        row = terms(N, alpha, t, gap)
        row["k"] = k
        row["g_hat"] = spec_gap_literal(N, alpha)
        row["n_min"] = int(N.sum(axis=1).min())
        out["per_k"].append(row)
    out["point"] = max(r["g_hat"] / r["k"] for r in out["per_k"])
    return out


def reversible_case(M, m, seed, alpha, delta):
    d = len(M)
    x = simulate(M, stationary(M), m, seed)
    N = counts(x, 1, d)
    Ni = N.sum(axis=1) + d * alpha
    A = (N + N.T + 2 * alpha) / (2 * np.sqrt(np.outer(Ni, Ni)))
    ev = np.sort(np.linalg.eigvalsh(A))[::-1]
    asg = 1 - max(ev[1], abs(ev[-1]))
    t = tau(delta / d, int(N.sum()), d + 1)
    row = terms(N, alpha, t, asg)
    row["asg_hat"] = asg
    return row


def compute():
    rng = SplitMix64(1234567)
    general = np.array([[0.6, 0.3, 0.1], [0.1, 0.6, 0.3], [0.3, 0.2, 0.5]])
    birth_death = np.array([[0.6, 0.4, 0.0], [0.2, 0.5, 0.3], [0.0, 0.3, 0.7]])
    return {
        "splitmix_1234567": [rng.next() for _ in range(3)],
        "general": general_case(general, 100000, 42, 1.0, 0.05, 3),
        "reversible": reversible_case(birth_death, 100000, 42, 1.0, 0.05),
    }


def main():
    print(json.dumps(compute(), indent=2))


if __name__ == "__main__":
    main()
