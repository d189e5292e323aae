"""Model problems and Matrix Market coordinate I/O."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .linalg import as_sparse

__all__ = [
    "ProblemSpec",
    "MatrixMarketError",
    "generate",
    "poisson1d",
    "poisson2d",
    "advdiff1d",
    "read_matrix_market",
    "write_matrix_market",
]

KINDS = ("poisson1d", "poisson2d", "advdiff1d", "custom_file")


@dataclass(frozen=True)
class ProblemSpec:
    """Which model matrix to build. Boundary rows are always eliminated (Dirichlet)."""

    kind: str = "poisson1d"
    n: int = 32
    nx: int = 8
    ny: int = 8
    peclet: float = 10.0
    path: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}; expected one of {KINDS}")


class MatrixMarketError(ValueError):
    def __init__(self, lineno, msg):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}")


def poisson1d(n):
    if n < 2:
        raise ValueError(f"poisson1d needs n >= 2, got {n}")
    return as_sparse(sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n)))


def poisson2d(nx, ny):
    if nx < 2 or ny < 2:
        raise ValueError(f"poisson2d needs nx, ny >= 2, got {nx}x{ny}")
    Ix = sparse.identity(nx)
    Iy = sparse.identity(ny)
    Tx = sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(nx, nx))
    Ty = sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(ny, ny))
    # grid point (i, j) -> j * nx + i
    return as_sparse(sparse.kron(Iy, Tx) + sparse.kron(Ty, Ix))


def advdiff1d(n, peclet):
    """Steady -u'' + v u' on (0, 1), scaled by h^2.

    The mesh Peclet number is ``p = peclet * h / 2`` with ``h = 1 / (n + 1)``.
    Central differences are used for ``|p| <= 1``, first-order upwinding
    otherwise.
    """
    if n < 2:
        raise ValueError(f"advdiff1d needs n >= 2, got {n}")
    p = peclet / (2.0 * (n + 1))
    if abs(p) <= 1.0:
        lo, di, up = -1.0 - p, 2.0, -1.0 + p
    elif p > 0:
        lo, di, up = -1.0 - 2.0 * p, 2.0 + 2.0 * p, -1.0
    else:
        lo, di, up = -1.0, 2.0 - 2.0 * p, -1.0 + 2.0 * p
    return as_sparse(sparse.diags([lo, di, up], [-1, 0, 1], shape=(n, n)))


def generate(spec):
    if spec.kind == "poisson1d":
        return poisson1d(spec.n)
    if spec.kind == "poisson2d":
        return poisson2d(spec.nx, spec.ny)
    if spec.kind == "advdiff1d":
        return advdiff1d(spec.n, spec.peclet)
    return read_matrix_market(spec.path)


def _parse_number(tok, field, lineno):
    try:
        if field == "integer":
            return int(tok)
        return float(tok)
    except ValueError:
        raise MatrixMarketError(lineno, f"cannot parse {tok!r} as {field}") from None


def read_matrix_market(path):
    """Read a coordinate-format Matrix Market file into canonical CSR.

    Supports ``real``, ``integer`` and ``complex`` fields with ``general``,
    ``symmetric``, ``skew-symmetric`` and ``hermitian`` symmetry. Symmetric
    variants store one triangle; the other is filled in on read.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise MatrixMarketError(1, "empty file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket":
        raise MatrixMarketError(1, "missing '%%MatrixMarket' banner")
    obj, fmt, field, symm = (h.lower() for h in header[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MatrixMarketError(1, f"only 'matrix coordinate' is supported, got {obj} {fmt}")
    if field not in ("real", "integer", "complex"):
        raise MatrixMarketError(1, f"unsupported field {field!r}")
    if symm not in ("general", "symmetric", "skew-symmetric", "hermitian"):
        raise MatrixMarketError(1, f"unsupported symmetry {symm!r}")
    if symm == "hermitian" and field != "complex":
        raise MatrixMarketError(1, "hermitian symmetry requires a complex field")

    lineno = 1
    size = None
    count = 0
    rows, cols, vals = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        toks = s.split()
        if size is None:
            if len(toks) != 3:
                raise MatrixMarketError(lineno, "size line must have 3 integers")
            size = tuple(_parse_number(t, "integer", lineno) for t in toks)
            if min(size) < 0:
                raise MatrixMarketError(lineno, "negative size")
            continue
        want = 4 if field == "complex" else 3
        if len(toks) != want:
            raise MatrixMarketError(lineno, f"expected {want} tokens, got {len(toks)}")
        i = _parse_number(toks[0], "integer", lineno)
        j = _parse_number(toks[1], "integer", lineno)
        if not (1 <= i <= size[0] and 1 <= j <= size[1]):
            raise MatrixMarketError(lineno, f"index ({i}, {j}) outside {size[0]}x{size[1]}")
        if field == "complex":
            v = complex(_parse_number(toks[2], "real", lineno), _parse_number(toks[3], "real", lineno))
        else:
            v = _parse_number(toks[2], field, lineno)
        if symm != "general" and j > i:
            raise MatrixMarketError(lineno, f"upper-triangle entry ({i}, {j}) in {symm} file")
        count += 1
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
        if symm != "general" and i != j:
            rows.append(j - 1)
            cols.append(i - 1)
            if symm == "symmetric":
                vals.append(v)
            elif symm == "skew-symmetric":
                vals.append(-v)
            else:
                vals.append(np.conj(v))
    if size is None:
        raise MatrixMarketError(lineno, "missing size line")
    if count != size[2]:
        raise MatrixMarketError(lineno, f"expected {size[2]} entries, found {count}")
    A = sparse.coo_matrix(
        (np.asarray(vals, dtype=np.complex128), (rows, cols)), shape=size[:2]
    )
    return as_sparse(A)


def _fmt(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def write_matrix_market(A, path):
    """Write `A` as a ``general`` coordinate file.

    Values are written in shortest round-trip form, so reading the file back
    is bit-exact. The field is ``real`` when every stored entry has zero
    imaginary part.
    """
    A = as_sparse(A).tocoo()
    is_real = not np.any(A.data.imag)
    field = "real" if is_real else "complex"
    out = [f"%%MatrixMarket matrix coordinate {field} general",
           f"{A.shape[0]} {A.shape[1]} {A.nnz}"]
    order = np.lexsort((A.col, A.row))
    for r, c, v in zip(A.row[order], A.col[order], A.data[order]):
        if is_real:
            out.append(f"{r + 1} {c + 1} {_fmt(v.real)}")
        else:
            out.append(f"{r + 1} {c + 1} {_fmt(v.real)} {_fmt(v.imag)}")
    Path(path).write_text("\n".join(out) + "\n")
