"""Line-oriented construction language.

::

    # comments run to end of line
    option horizon=64 prefix=16 seed=0
    set A = literal(1,3,6)
    set P = oscfamily(4, pick=1)
    family F = branches A=A count=3
    family G = luzin L=doubling(1) members=4
    analyze spectrum F
    analyze obstruct F G

Names must be declared before use. ``parse_spec`` stops at the first error
and reports its line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

DEFAULTS = {"horizon": 64, "prefix": 16, "seed": 0}

SET_KINDS = ("omega", "evens", "dyadic", "oscfamily", "literal", "thin", "node")
FAMILY_KINDS = ("luzin", "branches", "union", "transport")
ANALYSES = {"spectrum": 1, "oscillation": 2, "obstruct": 2, "selfobstruct": 1, "oracle": 2}

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([=(),])|(\S))")


class SpecError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message}, line {line}")
        self.message = message
        self.line = line


@dataclass(frozen=True)
class SetDecl:
    name: str
    kind: str
    args: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FamilyDecl:
    name: str
    kind: str
    args: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Analysis:
    kind: str
    args: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass
class SpecProgram:
    declarations: dict[str, SetDecl | FamilyDecl] = field(default_factory=dict)
    analyses: list[Analysis] = field(default_factory=list)
    globals: dict[str, int] = field(default_factory=lambda: dict(DEFAULTS))


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[str] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m.group(4):
                raise SpecError(f"syntax error: unexpected character {m.group(4)!r}", lineno)
            self.toks.append(m.group(1) or m.group(2) or m.group(3))
            pos = m.end()
        self.i = 0

    def error(self, expected: str) -> SpecError:
        got = self.toks[self.i] if self.i < len(self.toks) else "end of line"
        return SpecError(f"syntax error: expected {expected}, got {got!r}", self.lineno)

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: str | None = None, what: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise self.error(what or repr(expected))
        self.i += 1
        return tok

    def ident(self, what: str = "a name") -> str:
        tok = self.peek()
        if tok is None or not (tok[0].isalpha() or tok[0] == "_"):
            raise self.error(what)
        self.i += 1
        return tok

    def int(self, what: str = "a natural number") -> int:
        tok = self.peek()
        if tok is None or not tok.isdigit():
            raise self.error(what)
        self.i += 1
        return int(tok)

    def keyed_int(self, key: str) -> int:
        self.take(key, f"'{key}='")
        self.take("=")
        return self.int()

    def end(self) -> None:
        if self.peek() is not None:
            raise self.error("end of line")


def parse_spec(text: str) -> SpecProgram:
    prog = SpecProgram()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        ln = _Line(body, lineno)
        head = ln.take(what="'set', 'family', 'analyze' or 'option'")
        if head == "set":
            decl = _parse_set(ln, prog)
        elif head == "family":
            decl = _parse_family(ln, prog)
        elif head == "analyze":
            prog.analyses.append(_parse_analysis(ln, prog))
            continue
        elif head == "option":
            _parse_option(ln, prog)
            continue
        else:
            ln.i -= 1
            raise ln.error("'set', 'family', 'analyze' or 'option'")
        if decl.name in prog.declarations:
            raise SpecError(f"duplicate declaration {decl.name}", lineno)
        prog.declarations[decl.name] = decl
    return prog


def _ref(ln: _Line, prog: SpecProgram, want: type) -> str:
    name = ln.ident()
    decl = prog.declarations.get(name)
    if decl is None:
        raise SpecError(f"unknown name {name}", ln.lineno)
    if not isinstance(decl, want):
        kind = "set" if want is SetDecl else "family"
        raise SpecError(f"{name} is not a {kind}", ln.lineno)
    return name


def _parse_set(ln: _Line, prog: SpecProgram) -> SetDecl:
    name = ln.ident()
    ln.take("=")
    kind = ln.ident("a set construction")
    args: tuple = ()
    if kind in ("omega", "evens"):
        pass
    elif kind == "dyadic":
        ln.take("(")
        args = (ln.int(),)
        ln.take(")")
    elif kind == "oscfamily":
        ln.take("(")
        m = ln.int()
        ln.take(",")
        pick = ln.keyed_int("pick")
        ln.take(")")
        if m < 1 or pick >= m:
            raise SpecError(f"oscfamily needs 0 <= pick < m, got m={m} pick={pick}", ln.lineno)
        args = (m, pick)
    elif kind == "literal":
        ln.take("(")
        vals = [ln.int()]
        while ln.peek() == ",":
            ln.take(",")
            vals.append(ln.int())
        ln.take(")")
        args = tuple(sorted(set(vals)))
    elif kind == "thin":
        ln.take("(")
        args = (_ref(ln, prog, SetDecl),)
        ln.take(")")
    elif kind == "node":
        ln.take("(")
        word = ""
        if ln.peek() != ")":
            word = ln.take(what="a binary word")
            if word.strip("01"):
                ln.i -= 1
                raise ln.error("a binary word")
        ln.take(")")
        args = (word,)
    else:
        raise SpecError(f"unknown construction name {kind}", ln.lineno)
    ln.end()
    return SetDecl(name, kind, args, ln.lineno)


def _parse_family(ln: _Line, prog: SpecProgram) -> FamilyDecl:
    name = ln.ident()
    ln.take("=")
    kind = ln.ident("a family construction")
    if kind == "luzin":
        ln.take("L", "'L='")
        ln.take("=")
        if ln.peek() == "doubling":
            ln.take()
            ln.take("(")
            sizes: tuple = ("doubling", ln.int())
            ln.take(")")
        else:
            sizes = ("set", _ref(ln, prog, SetDecl))
        members = ln.keyed_int("members")
        args: tuple = (sizes, members)
    elif kind == "branches":
        ln.take("A", "'A='")
        ln.take("=")
        a = _ref(ln, prog, SetDecl)
        args = (a, ln.keyed_int("count"))
    elif kind == "union":
        ln.take("(")
        f1 = _ref(ln, prog, FamilyDecl)
        ln.take(",")
        f2 = _ref(ln, prog, FamilyDecl)
        ln.take(")")
        args = (f1, f2)
    elif kind == "transport":
        ln.take("(")
        f = _ref(ln, prog, FamilyDecl)
        ln.take(",")
        n = ln.keyed_int("N")
        ln.take(")")
        args = (f, n)
    else:
        raise SpecError(f"unknown construction name {kind}", ln.lineno)
    ln.end()
    return FamilyDecl(name, kind, args, ln.lineno)


def _parse_analysis(ln: _Line, prog: SpecProgram) -> Analysis:
    kind = ln.ident("an analysis")
    if kind not in ANALYSES:
        raise SpecError(f"unknown analysis {kind}", ln.lineno)
    want = SetDecl if kind == "oscillation" else FamilyDecl
    args: tuple = tuple(_ref(ln, prog, want) for _ in range(ANALYSES[kind]))
    if kind == "oracle":
        args += (ln.keyed_int("N"), ln.keyed_int("budget"))
    ln.end()
    return Analysis(kind, args, ln.lineno)


def _parse_option(ln: _Line, prog: SpecProgram) -> None:
    seen = False
    while ln.peek() is not None:
        key = ln.ident("an option name")
        if key not in DEFAULTS:
            raise SpecError(f"unknown option {key}", ln.lineno)
        ln.take("=")
        value = ln.int()
        if key in ("horizon", "prefix") and value < 1:
            raise SpecError(f"{key} must be positive", ln.lineno)
        prog.globals[key] = value
        seen = True
    if not seen:
        raise ln.error("key=value")


def _format_set(d: SetDecl) -> str:
    if d.kind in ("omega", "evens"):
        return d.kind
    if d.kind == "oscfamily":
        return f"oscfamily({d.args[0]}, pick={d.args[1]})"
    return f"{d.kind}({','.join(str(a) for a in d.args)})"


def _format_family(d: FamilyDecl) -> str:
    if d.kind == "luzin":
        (tag, val), members = d.args
        sizes = f"doubling({val})" if tag == "doubling" else val
        return f"luzin L={sizes} members={members}"
    if d.kind == "branches":
        return f"branches A={d.args[0]} count={d.args[1]}"
    if d.kind == "union":
        return f"union({d.args[0]},{d.args[1]})"
    return f"transport({d.args[0]}, N={d.args[1]})"


def format_spec(prog: SpecProgram) -> str:
    """Canonical text; parsing it gives back an equal program."""
    g = prog.globals
    lines = [f"option horizon={g['horizon']} prefix={g['prefix']} seed={g['seed']}"]
    for d in prog.declarations.values():
        if isinstance(d, SetDecl):
            lines.append(f"set {d.name} = {_format_set(d)}")
        else:
            lines.append(f"family {d.name} = {_format_family(d)}")
    for a in prog.analyses:
        if a.kind == "oracle":
            lines.append(f"analyze oracle {a.args[0]} {a.args[1]} N={a.args[2]} budget={a.args[3]}")
        else:
            lines.append(f"analyze {a.kind} {' '.join(a.args)}")
    return "\n".join(lines) + "\n"
