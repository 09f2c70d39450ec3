"""Obstruction reports for Luzin and branch families built over two almost
oscillating branches of the greedy split tree."""
import argparse
import time

from psilab.families import LuzinSpec, TreeSpec, branch_family, luzin_family
from psilab.oscillation import SplitTree, almost_oscillating_family
from psilab.psi import obstruction_report
from psilab.runner import fmt_set
from psilab.streams import Thinned


def report(label, f, g):
    t0 = time.perf_counter()
    rep = obstruction_report(f, g)
    print(f"{label}: {rep.verdict}, bound={rep.bound}, horizon={rep.horizon} ({time.perf_counter() - t0:.2f}s)")
    for s in rep.spectra:
        print(f"  spectrum {fmt_set(s.values)} exact={s.exact}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--members", type=int, default=6)
    ap.add_argument("--prefix", type=int, default=16, help="elements materialized per branch")
    args = ap.parse_args(argv)
    pa, pb = almost_oscillating_family(2, args.prefix, SplitTree())
    report("luzin over thinned branches",
           luzin_family(LuzinSpec(Thinned(pa)), args.members, name="F"),
           luzin_family(LuzinSpec(Thinned(pb)), args.members, name="G"))
    report("branch families",
           branch_family(TreeSpec(pa), args.members, name="F"),
           branch_family(TreeSpec(pb), args.members, name="G"))


if __name__ == "__main__":
    main()
