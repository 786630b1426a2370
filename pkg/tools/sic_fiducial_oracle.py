"""Search for a Weyl-Heisenberg covariant SIC fiducial by random-restart minimization.

The clock and shift matrices are built here directly (not from the package) so
the search is independent of the code it is used to test.

    python3 tools/sic_fiducial_oracle.py --d 2 --out src/quonforge/data/sic_fiducial_d2.json
"""

from __future__ import annotations

import argparse
import json

import numpy as np
from scipy.optimize import least_squares, minimize


def clock_shift(d: int) -> tuple[np.ndarray, np.ndarray]:
    w = np.exp(2j * np.pi / d)
    clock = np.diag(w ** np.arange(d))
    shift = np.roll(np.eye(d), -1, axis=0)  # |k> -> |k-1 mod d>
    return clock, shift


def orbit(psi: np.ndarray) -> np.ndarray:
    d = len(psi)
    clock, shift = clock_shift(d)
    return np.array(
        [np.linalg.matrix_power(clock, a) @ np.linalg.matrix_power(shift, b) @ psi for a in range(d) for b in range(d)]
    )


def gram_deviations(params: np.ndarray, d: int) -> np.ndarray:
    psi = params[:d] + 1j * params[d:]
    psi = psi / np.linalg.norm(psi)
    vecs = orbit(psi)
    gram = np.abs(vecs.conj() @ vecs.T) ** 2
    target = (d * np.eye(d * d) + 1) / (d + 1)
    return (gram - target).ravel()


def gram_residual(params: np.ndarray, d: int) -> float:
    return float(np.sum(gram_deviations(params, d) ** 2))


def search(d: int, restarts: int = 20, seed: int = 7) -> tuple[np.ndarray, float]:
    rng = np.random.default_rng(seed)
    best, best_val = None, np.inf
    for _ in range(restarts):
        x0 = rng.normal(size=2 * d)
        res = minimize(gram_residual, x0, args=(d,), method="BFGS", options={"gtol": 1e-14, "maxiter": 5000})
        if res.fun < best_val:
            best, best_val = res.x, res.fun
    # polish the best restart on the residual vector itself
    best = least_squares(gram_deviations, best, args=(d,), xtol=1e-15, ftol=1e-15, gtol=1e-15).x
    psi = best[:d] + 1j * best[d:]
    psi = psi / np.linalg.norm(psi)
    vecs = orbit(psi)
    gram = np.abs(vecs.conj() @ vecs.T) ** 2
    worst = float(np.max(np.abs(gram - (d * np.eye(d * d) + 1) / (d + 1))))
    return psi, worst


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    psi, worst = search(args.d, args.restarts, args.seed)
    payload = {"d": args.d, "fiducial": [[float(c.real), float(c.imag)] for c in psi], "gram_worst": worst}
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if worst <= 1e-10 else 1


if __name__ == "__main__":
    raise SystemExit(main())
