"""Plain-text QP interchange format.

A document is a sequence of sections -- ``n``, ``p``, ``E`` (row-major),
``F``, ``M`` (row-major), ``gamma`` -- holding whitespace-separated decimal
numbers; ``#`` starts a comment anywhere on a line.  Sizes ``n`` and ``p``
must appear before the arrays they dimension.  Floats are written with 17
significant digits so that write/parse round-trips are exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .solver import QpProblem

_SECTIONS = ("n", "p", "E", "F", "M", "gamma")
_SYMMETRY_RTOL = 1e-10


@dataclass
class QpFileDocument:
    """Parsed QP data; ``to_problem`` factorizes and builds the dual
    Hessian."""

    n: int
    p: int
    e: np.ndarray
    f: np.ndarray
    m: np.ndarray
    gamma: np.ndarray

    def to_problem(self, w_cap=None) -> QpProblem:
        return QpProblem.build(self.e, self.f, self.m, self.gamma, w_cap=w_cap)


def _tokenize(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        for match in re.finditer(r"\S+", body):
            yield match.group(), lineno, match.start() + 1


def parse_qp_document(text: str) -> QpFileDocument:
    tokens = list(_tokenize(text))
    pos = 0
    raw: dict = {}

    def take_numbers(count, section, line, col):
        nonlocal pos
        out = []
        for _ in range(count):
            if pos >= len(tokens):
                raise ParseError(
                    f"section {section!r} needs {count} numbers, got {len(out)}", line, col)
            tok, tl, tc = tokens[pos]
            try:
                out.append(float(tok))
            except ValueError:
                raise ParseError(f"expected a number, got {tok!r}", tl, tc) from None
            pos += 1
        return np.array(out)

    while pos < len(tokens):
        name, line, col = tokens[pos]
        if name not in _SECTIONS:
            raise ParseError(f"unexpected token {name!r}", line, col)
        if name in raw:
            raise ParseError(f"duplicate section {name!r}", line, col)
        pos += 1
        if name in ("n", "p"):
            value = take_numbers(1, name, line, col)[0]
            if value != int(value) or (name == "n" and value < 1) or (name == "p" and value < 0):
                raise ParseError(f"section {name!r} must be a "
                                 f"{'positive' if name == 'n' else 'non-negative'} integer",
                                 line, col)
            raw[name] = int(value)
            continue
        if "n" not in raw or ("p" not in raw and name in ("M", "gamma")):
            raise ParseError(f"section {name!r} appears before its dimensions", line, col)
        n = raw["n"]
        p = raw.get("p", 0)
        count = {"E": n * n, "F": n, "M": p * n, "gamma": p}[name]
        raw[name] = take_numbers(count, name, line, col)

    missing = [s for s in _SECTIONS if s not in raw]
    if missing:
        raise ParseError(f"missing sections: {', '.join(missing)}")
    n, p = raw["n"], raw["p"]
    e = raw["E"].reshape(n, n)
    m = raw["M"].reshape(p, n)
    scale = np.abs(e).max()
    if scale and np.abs(e - e.T).max() > _SYMMETRY_RTOL * scale:
        raise ParseError("E is not symmetric within 1e-10 relative tolerance")
    return QpFileDocument(n=n, p=p, e=e, f=raw["F"], m=m, gamma=raw["gamma"])


def load_qp_file(path) -> QpFileDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_qp_document(fh.read())


def _row(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def format_qp_document(doc: QpFileDocument) -> str:
    lines = [f"n {doc.n}", f"p {doc.p}", "E"]
    lines += [_row(row) for row in doc.e]
    lines.append("F")
    lines.append(_row(doc.f))
    lines.append("M")
    lines += [_row(row) for row in doc.m]
    lines.append("gamma")
    lines.append(_row(doc.gamma) if doc.p else "")
    return "\n".join(lines) + "\n"


def save_qp_file(doc: QpFileDocument, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_qp_document(doc))
