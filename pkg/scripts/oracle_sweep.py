"""How often does the exhaustive search find homeomorphism data between
random tiny families whose spectra are certified to almost oscillate?

Prints one row per budget: obstructed instances, how many still admit data,
and the least budget at which data first appears.
"""
import argparse
import itertools
import random
from dataclasses import dataclass

from psilab.families import ADFamily, Certificate
from psilab.psi import PsiTruncation, brute_force_homeo_search, obstruction_report
from psilab.streams import Literal


@dataclass
class SweepConfig:
    trials: int = 200
    members: int = 3
    N: int = 12
    density: float = 0.5
    max_budget: int = 3
    seed: int = 0


def tiny_family(rng, k, N, density):
    sets = [sorted(x for x in range(N) if rng.random() < density) for _ in range(k)]
    certs = {(i, j): Certificate.of(set(sets[i]) & set(sets[j])) for i, j in itertools.combinations(range(k), 2)}
    return ADFamily([Literal(s) for s in sets], certs, horizon=N)


def sweep(cfg: SweepConfig):
    rng = random.Random(cfg.seed)
    pairs = []
    for _ in range(cfg.trials):
        f = tiny_family(rng, cfg.members, cfg.N, cfg.density)
        g = tiny_family(rng, cfg.members, cfg.N, cfg.density)
        rep = obstruction_report(f, g)
        if rep.obstructed:
            pairs.append((PsiTruncation(f, cfg.N), PsiTruncation(g, cfg.N), rep.bound))
    rows = []
    for b in range(cfg.max_budget + 1):
        found = sum(brute_force_homeo_search(s, t, b) is not None for s, t, _ in pairs)
        within = sum(brute_force_homeo_search(s, t, b) is not None for s, t, n in pairs if b <= n)
        rows.append((b, len(pairs), found, within))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(SweepConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = SweepConfig(**vars(ap.parse_args(argv)))
    print(f"# {cfg}")
    print("budget  obstructed  data_found  data_found_with_budget<=bound")
    for b, total, found, within in sweep(cfg):
        print(f"{b:>6}  {total:>10}  {found:>10}  {within:>29}")


if __name__ == "__main__":
    main()
