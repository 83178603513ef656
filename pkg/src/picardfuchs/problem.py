"""Problem ingestion: the key-value input file describing a family.

Format, one `key = value` pair per line, `#` comments, `f` repeatable:

    x = x1 x2
    y = y1
    params = lam
    invertible = lam ; 1 - lam
    f = x2^2 - x1*(x1 - 1)*(x1 - lam)
    u = 0 0
    v = 0
    max_order = 4
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gkz import ClassIndex
from .parse import ParseError, parse_poly
from .weyl import TwistData


@dataclass
class ProblemSpec:
    x_vars: tuple
    y_vars: tuple
    params: tuple
    invertibles: tuple
    f_texts: tuple
    u: tuple
    v: tuple
    max_order: int = 4
    x_degree: int | None = None
    y_degree: int | None = None
    mu_degree: int | None = None
    del_order: int | None = None
    seed: int = 0

    def twist(self) -> TwistData:
        f = [parse_poly(t, self.x_vars, self.params) for t in self.f_texts]
        inv = [parse_poly(t, (), self.params).constant_value()
               for t in self.invertibles]
        inv_polys = []
        for r in inv:
            num = getattr(r, "num", None)
            if num is None:
                raise ParseError("invertible entries must be polynomial")
            if not r.den.is_constant():
                raise ParseError("invertible entries must be polynomial")
            inv_polys.append(num)
        return TwistData(self.x_vars, self.y_vars, f, params=self.params,
                         invertibles=tuple(inv_polys))

    def class_index(self) -> ClassIndex:
        return ClassIndex.of(self.u, self.v)


def parse_problem(text: str) -> ProblemSpec:
    data = {"f": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if key in ("f", "f1", "f2", "f3", "f4", "f5", "f6"):
            data["f"].append((key, value))
        else:
            if key in data:
                raise ParseError(f"line {lineno}: duplicate key {key!r}")
            data[key] = value

    def names(key, default=None):
        if key not in data:
            if default is None:
                raise ParseError(f"missing required key {key!r}")
            return default
        return tuple(data[key].replace(",", " ").split())

    x_vars = names("x")
    f_entries = sorted(data["f"], key=lambda kv: kv[0])
    if not f_entries:
        raise ParseError("no defining equations (key 'f')")
    f_texts = tuple(v for _, v in f_entries)
    y_vars = names("y", default=tuple(f"y{j+1}" for j in range(len(f_texts))))
    if len(y_vars) != len(f_texts):
        raise ParseError("number of y variables must match the equations")
    params = names("params", default=())
    invertibles = tuple(
        part.strip() for part in data.get("invertible", "").split(";")
        if part.strip())

    def ints(key, default):
        if key not in data:
            return default
        return tuple(int(t) for t in data[key].replace(",", " ").split())

    u = ints("u", (0,) * len(x_vars))
    v = ints("v", (0,) * len(f_texts))
    if len(u) != len(x_vars):
        raise ParseError("u must have one entry per x variable")
    if len(v) != len(f_texts):
        raise ParseError("v must have one entry per equation")

    def opt_int(key):
        return int(data[key]) if key in data else None

    spec = ProblemSpec(
        x_vars=x_vars, y_vars=y_vars, params=params,
        invertibles=invertibles, f_texts=f_texts, u=u, v=v,
        max_order=int(data.get("max_order", 4)),
        x_degree=opt_int("x_degree"), y_degree=opt_int("y_degree"),
        mu_degree=opt_int("mu_degree"), del_order=opt_int("del_order"),
        seed=int(data.get("seed", 0)),
    )
    # validate the polynomials parse at all
    spec.twist()
    return spec


def load_problem(path: str) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read())
