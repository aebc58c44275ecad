"""Plain-text matrix / instance format.

::

    # comment
    dense 2
    0 0.5
    0 0.5
    c: -0.5 0.5

or ``tridiag n`` followed by three lines: sub (n-1 values), diag (n values),
sup (n-1 values).  For ``n = 1`` the two band lines are empty.  Scalars are
written with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import AveError, AveInstance, Matrix, TriDiagMatrix, dense_of


class ParseError(AveError):
    pass


def fmt(x: float) -> str:
    return repr(float(x))


def _fmt_row(values) -> str:
    return " ".join(fmt(v) for v in values)


def format_matrix(m: Matrix) -> str:
    if isinstance(m, TriDiagMatrix):
        lines = [f"tridiag {m.n}", _fmt_row(m.sub), _fmt_row(m.diag), _fmt_row(m.sup)]
    else:
        a = dense_of(m)
        lines = [f"dense {a.shape[0]}"] + [_fmt_row(row) for row in a]
    return "\n".join(lines) + "\n"


def format_instance(inst: AveInstance) -> str:
    return format_matrix(inst.matrix) + "c: " + _fmt_row(inst.rhs) + "\n"


def _floats(line: str, lineno: int) -> list[float]:
    try:
        return [float(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"line {lineno}: cannot parse scalars in {line!r}") from None


def _parse(text: str, need_rhs: bool):
    # Keep blank lines: they are meaningful for n = 1 tridiagonal bands.
    lines = [
        (i + 1, ln.strip())
        for i, ln in enumerate(text.splitlines())
        if not ln.lstrip().startswith("#")
    ]
    while lines and not lines[0][1]:
        lines.pop(0)
    if not lines:
        raise ParseError("empty input")
    lineno, header = lines.pop(0)
    parts = header.split()
    if len(parts) != 2 or parts[0] not in ("dense", "tridiag"):
        raise ParseError(f"line {lineno}: expected 'dense n' or 'tridiag n'")
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"line {lineno}: bad dimension {parts[1]!r}") from None
    if n < 1:
        raise ParseError(f"line {lineno}: dimension must be positive")

    kind = parts[0]
    nrows = n if kind == "dense" else 3
    if kind == "dense" or n > 1:
        lines = [(i, ln) for i, ln in lines if ln]
    if len(lines) < nrows:
        raise ParseError(f"expected {nrows} matrix lines, found {len(lines)}")
    rows = [(_floats(ln, i), i) for i, ln in lines[:nrows]]
    rest = [(i, ln) for i, ln in lines[nrows:] if ln]

    if kind == "dense":
        for vals, i in rows:
            if len(vals) != n:
                raise ParseError(f"line {i}: expected {n} values, got {len(vals)}")
        matrix: Matrix = np.array([vals for vals, _ in rows], dtype=float)
    else:
        expect = (n - 1, n, n - 1)
        for (vals, i), want in zip(rows, expect):
            if len(vals) != want:
                raise ParseError(f"line {i}: expected {want} values, got {len(vals)}")
        matrix = TriDiagMatrix(rows[0][0], rows[1][0], rows[2][0])

    rhs = None
    if rest:
        i, ln = rest[0]
        if not ln.startswith("c:"):
            raise ParseError(f"line {i}: unexpected content {ln!r}")
        tail = ln[2:] + " " + " ".join(l for _, l in rest[1:])
        rhs = _floats(tail, i)
        if len(rhs) != n:
            raise ParseError(f"line {i}: expected {n} rhs values, got {len(rhs)}")
    if need_rhs and rhs is None:
        raise ParseError("instance file lacks a 'c:' line")
    return matrix, rhs


def parse_matrix(text: str) -> Matrix:
    return _parse(text, need_rhs=False)[0]


def parse_instance(text: str) -> AveInstance:
    matrix, rhs = _parse(text, need_rhs=True)
    return AveInstance(matrix, rhs)


def read_instance(path) -> AveInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from None
    return parse_instance(text)


def read_matrix(path) -> Matrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from None
    return parse_matrix(text)


def write_instance(path, inst: AveInstance) -> None:
    Path(path).write_text(format_instance(inst))
