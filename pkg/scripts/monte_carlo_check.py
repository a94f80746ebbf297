"""Compare exact averages with Haar sampling (unitary moments and HCIZ)."""

import argparse

import numpy as np

from haarint import hciz_eigen, integrate


def haar_unitary(n, size, rng):
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    n = args.dim
    U = haar_unitary(n, args.samples, rng)
    a = np.abs(U[:, 0, 0]) ** 2
    checks = [
        ("abs(U[1,1])^2", a),
        ("abs(U[1,1])^4", a**2),
        ("U[1,1]*conj(U[1,2])*U[2,2]*conj(U[2,1])", (U[:, 0, 0] * np.conj(U[:, 0, 1]) * U[:, 1, 1] * np.conj(U[:, 1, 0])).real),
    ]
    for expr, samples in checks:
        exact = float(integrate(expr, f"U({n})").re)
        print(f"{expr:<42} exact {exact:+.6f}  sampled {samples.mean():+.6f}")
    ea, eb = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    mc = np.exp(np.einsum("i,sij,j->s", ea, np.abs(U) ** 2, eb)).mean()
    print(f"{'HCIZ random spectra':<42} exact {float(hciz_eigen(list(ea), list(eb))):+.6f}  sampled {mc:+.6f}")


if __name__ == "__main__":
    main()
