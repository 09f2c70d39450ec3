"""Execute a parsed program and assemble its report.

Declarations are built lazily in program order; analyses run one after the
other and each yields one record. The text and CSV renderings depend only on
the records, so a program always produces the same bytes.
"""
from __future__ import annotations

import csv
import io
import random
import sys
from dataclasses import dataclass, field

from . import __version__
from .dsl import Analysis, FamilyDecl, SetDecl, SpecProgram
from .families import (ADFamily, InfeasibleError, LuzinSpec, SpecViolation, TreeSpec,
                       branch_family, doubling, luzin_family, spectrum)
from .oscillation import SplitTree, almost_oscillating_family, almost_oscillation_bound
from .psi import (PreconditionError, PsiTruncation, brute_force_homeo_search,
                  obstruction_report, self_obstruction)
from .streams import ChainViolation, Literal, NatStream, StreamExhausted, Thinned, dyadic_block, evens, omega

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

# values longer than this are abbreviated in reports
MAX_DIGITS = 24
_FAILURES = (SpecViolation, InfeasibleError, PreconditionError, ChainViolation, StreamExhausted, ValueError)


class AnalysisError(RuntimeError):
    """A construction or analysis failed; ``where`` names the culprit."""

    def __init__(self, where: str, cause: Exception):
        super().__init__(f"{where}: {cause}")
        self.where = where
        self.cause = cause


def fmt_int(v: int) -> str:
    s = str(v)
    if len(s) <= MAX_DIGITS:
        return s
    return f"{s[:12]}...{s[-6:]}({len(s)}d)"


def fmt_set(values) -> str:
    return "{" + ",".join(fmt_int(v) for v in sorted(values)) + "}"


@dataclass(frozen=True)
class Record:
    analysis: str
    args: tuple[str, ...]
    horizon: str
    result: tuple[str, ...]

    @property
    def summary(self) -> str:
        """Compact one-line form without the horizon, e.g. ``spectrum,F,{2,4},exact``."""
        return ",".join((self.analysis,) + self.args + self.result)

    def fields(self) -> list[str]:
        return [self.analysis, *self.args, self.horizon, *self.result]


@dataclass
class Report:
    records: list[Record] = field(default_factory=list)
    globals: dict[str, int] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in self.records:
            w.writerow(r.fields())
        return buf.getvalue()

    def to_text(self) -> str:
        g = self.globals
        head = [f"# psilab {__version__}",
                "# " + " ".join(f"{k}={g[k]}" for k in sorted(g))]
        rows = [("analysis", "args", "horizon", "result")]
        rows += [(r.analysis, " ".join(r.args), r.horizon, " ".join(r.result)) for r in self.records]
        widths = [max(len(row[c]) for row in rows) for c in range(3)]
        lines = ["  ".join(row[c].ljust(widths[c]) for c in range(3)) + "  " + row[3] for row in rows]
        return "\n".join(head + [ln.rstrip() for ln in lines]) + "\n"


class _Env:
    def __init__(self, prog: SpecProgram):
        self.prog = prog
        self.g = prog.globals
        self.rng = random.Random(self.g["seed"])
        self.tree = SplitTree()
        self._osc: dict[int, list[NatStream]] = {}
        self.objects: dict[str, NatStream | ADFamily] = {}

    def get(self, name: str):
        if name not in self.objects:
            decl = self.prog.declarations[name]
            try:
                if isinstance(decl, SetDecl):
                    obj = self._set(decl)
                else:
                    obj = self._family(decl)
            except AnalysisError:
                raise
            except _FAILURES as e:
                raise AnalysisError(f"declaration {name} (line {decl.line})", e) from e
            self.objects[name] = obj
        return self.objects[name]

    def _set(self, d: SetDecl) -> NatStream:
        if d.kind == "omega":
            return omega()
        if d.kind == "evens":
            return evens()
        if d.kind == "dyadic":
            return dyadic_block(d.args[0])
        if d.kind == "literal":
            return Literal(d.args, name=d.name)
        if d.kind == "thin":
            return Thinned(self.get(d.args[0]), name=d.name)
        if d.kind == "node":
            return self.tree.node(d.args[0])
        m, pick = d.args
        if m not in self._osc:
            self._osc[m] = almost_oscillating_family(m, self.g["prefix"], self.tree)
        return self._osc[m][pick]

    def _family(self, d: FamilyDecl) -> ADFamily:
        h = self.g["horizon"]
        if d.kind == "luzin":
            (tag, val), members = d.args
            sizes = doubling(val) if tag == "doubling" else self.get(val)
            return luzin_family(LuzinSpec(sizes), members, horizon=h, name=d.name)
        if d.kind == "branches":
            a, count = d.args
            return branch_family(TreeSpec(self.get(a)), count, horizon=h, name=d.name)
        if d.kind == "union":
            return self.get(d.args[0]).union(self.get(d.args[1]), name=d.name)
        base, n = d.args
        perm = list(range(n))
        self.rng.shuffle(perm)
        return self.get(base).transported(perm, name=d.name)


def _run_one(env: _Env, a: Analysis) -> Record:
    if a.kind == "spectrum":
        s = spectrum(env.get(a.args[0]))
        return Record(a.kind, a.args, str(s.horizon), (fmt_set(s.values), "exact" if s.exact else "horizon"))
    if a.kind == "oscillation":
        k = env.g["prefix"]
        p, q = (env.get(n).take(k) for n in a.args)
        bound = almost_oscillation_bound(p, q, min_survivors=2)
        return Record(a.kind, a.args, f"k={k}", (_bound(bound), "almost-oscillating" if bound is not None else "none"))
    if a.kind == "obstruct":
        rep = obstruction_report(env.get(a.args[0]), env.get(a.args[1]))
        return Record(a.kind, a.args, str(rep.horizon), (_bound(rep.bound), rep.verdict))
    if a.kind == "selfobstruct":
        fam = env.get(a.args[0])
        so = self_obstruction(fam)
        if so is None:
            return Record(a.kind, a.args, str(fam.horizon), ("none",))
        parts = f"{' '.join(map(str, so.part0))}|{' '.join(map(str, so.part1))}"
        return Record(a.kind, a.args, str(fam.horizon), (parts, _bound(so.bound)))
    f1, f2, n, budget = a.args
    src = PsiTruncation(env.get(f1), n)
    tgt = PsiTruncation(env.get(f2), n)
    found = brute_force_homeo_search(src, tgt, budget)
    args = (f1, f2, f"budget={budget}")
    if found is None:
        return Record(a.kind, args, f"N={n}", ("absent",))
    return Record(a.kind, args, f"N={n}",
                  ("found", "members=" + " ".join(map(str, found.member_map)),
                   "omega=" + " ".join(map(str, found.omega_map))))


def _bound(b: int | None) -> str:
    return "bound=none" if b is None else f"bound={fmt_int(b)}"


def run_spec(prog: SpecProgram) -> Report:
    """Run every analysis in order; failures raise :class:`AnalysisError`."""
    env = _Env(prog)
    # declarations first, in order, so transport permutations follow the seed
    for name in prog.declarations:
        env.get(name)
    report = Report(globals=dict(prog.globals))
    for a in prog.analyses:
        try:
            report.records.append(_run_one(env, a))
        except AnalysisError as e:
            raise AnalysisError(f"analyze {a.kind} (line {a.line}) via {e.where}", e.cause) from e
        except _FAILURES as e:
            raise AnalysisError(f"analyze {a.kind} (line {a.line})", e) from e
    return report
