"""Smoke test for the tscore_py extension.

Build it first, for example with
    pip install --no-build-isolation -e crates/py
then run
    python python/smoke_test.py
"""

import math
import sys

import tscore_py as ts


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    checks = []

    scores = ts.fit_stigler([[0, 3], [1, 0]], ["JA", "JB"])
    checks.append(("stigler closed form", close(scores.mu[0], math.log(3) / 2, 1e-6)))
    checks.append(("stigler ranking", scores.ranking() == [0, 1]))

    checks.append(("sleeping beauty", ts.sleeping_beauty([1, 4, 9]) == (2.5, 3)))
    checks.append(("sleeping beauty linear", ts.sleeping_beauty([2, 4, 6, 8])[0] == 0.0))

    pr = ts.pagerank([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    checks.append(("pagerank uniform", all(close(x, 1 / 3, 1e-12) for x in pr)))

    corpus = ts.synthesize(p=100, n=600, k=3, mu=[1.0, 0.0, -1.0], pair_prob=0.02, seed=5)
    fit = ts.fit_topics(corpus.counts, 3, seed=5)
    err, perm = ts.l1_error(fit.a_hat, corpus.a)
    checks.append(("topic recovery", err < 0.5 and sorted(perm) == [0, 1, 2]))
    columns = [sum(row[k] for row in fit.a_hat) for k in range(3)]
    checks.append(("topic columns on simplex", all(close(c, 1.0, 1e-9) for c in columns)))

    w = ts.estimate_weights(fit.a_hat, corpus.counts)
    checks.append(("weights on simplex", all(close(sum(w[k][i] for k in range(3)), 1.0, 1e-9) for i in range(600))))

    tr = ts.tr_score(corpus.counts, corpus.citations, 3, seed=5)
    checks.append(("tr-score median zero", sorted(tr.mu)[1] == 0.0 and tr.n_pairs > 0))

    values, k_hat = ts.select_k([[10.0, 0.0], [0.0, 5.0]], 2, threshold=1.0)
    checks.append(("select k", k_hat == 2 and close(values[0], 10.0, 1e-9)))

    try:
        ts.fit_stigler([[0, 1], [1]])
        checks.append(("input error raised", False))
    except ts.InputError:
        checks.append(("input error raised", True))

    failed = [name for name, ok in checks if not ok]
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
