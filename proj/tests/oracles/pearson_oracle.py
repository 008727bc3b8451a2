"""Freezes high-precision Pearson r and two-sided p-values for the acceptance suite.

Run once; the output JSON is committed under tests/data/.
"""
import json
import random

import mpmath as mp

mp.mp.dps = 60


def reference(xs, ys):
    n = len(xs)
    X = [mp.mpf(x) for x in xs]
    Y = [mp.mpf(y) for y in ys]
    mx = mp.fsum(X) / n
    my = mp.fsum(Y) / n
    sxy = mp.fsum((a - mx) * (b - my) for a, b in zip(X, Y))
    sxx = mp.fsum((a - mx) ** 2 for a in X)
    syy = mp.fsum((b - my) ** 2 for b in Y)
    r = sxy / mp.sqrt(sxx * syy)
    nu = n - 2
    if abs(r) == 1:
        return r, mp.mpf(0)
    t2 = r * r * nu / (1 - r * r)
    p = mp.betainc(mp.mpf(nu) / 2, mp.mpf(1) / 2, 0, nu / (nu + t2), regularized=True)
    return r, p


def main():
    rng = random.Random(20250917)
    sizes = [5, 6, 7, 8, 10, 12, 15, 20, 25, 30, 40, 50, 60, 75, 89, 100,
             120, 150, 200, 250, 300, 350, 402, 450, 500]
    datasets = []
    for i, n in enumerate(sizes):
        slope = rng.choice([-2.0, -0.5, 0.0, 0.1, 0.3, 1.0, 3.0])
        noise = rng.choice([0.1, 1.0, 5.0, 20.0])
        xs = [rng.uniform(100.0, 5000.0) if i % 2 else rng.gauss(0.0, 10.0) for _ in range(n)]
        ys = [slope * x + rng.gauss(0.0, noise * (abs(slope) * 50 + 1)) for x in xs]
        r, p = reference(xs, ys)
        datasets.append({
            "n": n,
            "xs": xs,
            "ys": ys,
            "r": mp.nstr(r, 25),
            "p": mp.nstr(p, 25),
        })
    with open("tests/data/pearson_oracle.json", "w") as f:
        json.dump({"datasets": datasets}, f, indent=1)


if __name__ == "__main__":
    main()
