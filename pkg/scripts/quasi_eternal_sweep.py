#!/usr/bin/env python3
"""Sweep the quasi-eternal family over t0 at fixed alpha and print T, tau,
and the classification.  T should track t0 - t0_alpha(alpha): the initial
segment up to the threshold is the removable Markovian prefix."""

import argparse

import pnmcore as p


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--t0-max", type=float, default=6.0)
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--horizon", type=float, default=40.0)
    args = ap.parse_args()

    thr = p.t0_alpha(args.alpha)
    print(f"alpha = {args.alpha}, validity threshold t0_alpha = {thr:.5f}")
    print(f"{'t0':>8} {'T':>10} {'t0-thr':>10} {'tau':>10} {'class':>6}")
    for k in range(args.steps):
        t0 = thr + k * (args.t0_max - thr) / max(args.steps - 1, 1)
        e = p.QuasiEternal(alpha=args.alpha, t0=t0)
        ct = p.characteristic_times(e, args.horizon, 400)
        print(f"{t0:8.4f} {ct.T:10.5f} {t0 - thr:10.5f} {ct.tau:10.5f} {ct.classification:>6}")


if __name__ == "__main__":
    main()
