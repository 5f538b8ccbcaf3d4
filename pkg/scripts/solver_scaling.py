"""Time the exact solver on primes, pure-power ideals and random Borel families.

Prints one line per instance: poset size, value, search nodes, certificate
counts and seconds.
"""
import argparse
import random

from borelsd.family import build_ideals, random_family
from borelsd.monomial import IrreducibleIdeal, MonomialIdeal
from borelsd.sdepth import IDEAL, QUOTIENT, SolverStats, char_poset, sdepth_exact


def instances(seed: int, max_n: int):
    for n in range(2, max_n + 1):
        yield f"prime n={n}", MonomialIdeal.prime(n, n)
        yield f"cube n={n} e=3", IrreducibleIdeal.from_exponents([3] * n, n).as_ideal()
    rng = random.Random(seed)
    for t in range(10):
        F = random_family(max_n, rng.randint(0, 2), 3, True, rng.getrandbits(32))
        yield f"family #{t} {F.n_seq}", build_ideals(F)[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--quotient", action="store_true")
    ap.add_argument("--no-lp", action="store_true", help="pure combinatorial search")
    args = ap.parse_args()
    mode = QUOTIENT if args.quotient else IDEAL
    print(f"{'instance':<28}{'points':>8}{'sdepth':>8}{'nodes':>9}{'lp':>5}{'mip':>5}{'seconds':>10}")
    for name, I in instances(args.seed, args.max_n):
        P = char_poset(I, mode)
        stats = SolverStats()
        value, _ = sdepth_exact(P, stats=stats, use_lp=not args.no_lp)
        print(f"{name:<28}{len(P):>8}{value:>8}{stats.nodes:>9}{stats.lp_refutations:>5}"
              f"{stats.mip_covers:>5}{stats.seconds:>10.3f}")


if __name__ == "__main__":
    main()
