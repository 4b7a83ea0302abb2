"""Second-order operators ``L = sum_{|j|<=2} c_j(x) d^j`` given by Taylor tables of their coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .multiindex import IDX_2E, IDX_CROSS, IDX_E, PAIRS, count_upto, numbering, upto
from .taylor import TaylorTable, _as_center

# the ten operator multi-indices, position == numbering
OPERATOR_INDICES = tuple(tuple(int(v) for v in j) for j in upto(2))
OPERATOR_INDICES = tuple(sorted(OPERATOR_INDICES, key=numbering))


class OperatorCase(str, Enum):
    HELMHOLTZ_CONST = "helmholtz_const"
    HELMHOLTZ_AIRY = "helmholtz_airy"
    CONVECTED_AIRY = "convected_airy"


@dataclass(frozen=True, eq=False)
class PdeCoefficients:
    """Taylor tables at ``center`` of the ten coefficient functions.

    ``tables[numbering(j)]`` holds the table of ``c_j``; all rows share the
    same truncation order ``max_order``.
    """

    center: np.ndarray
    max_order: int
    tables: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", _as_center(self.center))
        arr = np.array(self.tables, dtype=np.complex128)
        if arr.shape != (10, count_upto(self.max_order)):
            raise ValueError(f"expected tables of shape (10, {count_upto(self.max_order)}), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "tables", arr)

    @classmethod
    def from_tables(cls, tables: dict) -> PdeCoefficients:
        """Build from ``{j: TaylorTable}``; missing coefficients are zero."""
        if not tables:
            raise ValueError("no coefficient tables given")
        first = next(iter(tables.values()))
        order = min(t.order for t in tables.values())
        arr = np.zeros((10, count_upto(order)), dtype=np.complex128)
        for j, t in tables.items():
            if sum(j) > 2:
                raise ValueError(f"operator multi-index {j} has length > 2")
            if not t.same_center(first):
                raise ValueError("coefficient tables do not share a center")
            arr[numbering(j)] = t.coeffs[: count_upto(order)]
        return cls(first.center, order, arr)

    def table(self, j) -> TaylorTable:
        return TaylorTable(self.center, self.max_order, self.tables[numbering(j)])

    def value(self, j) -> complex:
        """``c_j(x_C)``."""
        return complex(self.tables[numbering(j), 0])

    def principal(self) -> np.ndarray:
        """Center values of the d11, d22, d33, d12, d13, d23 coefficients."""
        return np.array([self.tables[k, 0] for k in IDX_2E + IDX_CROSS], dtype=np.complex128)

    def truncate(self, order: int) -> PdeCoefficients:
        if order > self.max_order:
            raise ValueError(f"coefficients only known up to order {self.max_order}")
        return PdeCoefficients(self.center, order, self.tables[:, : count_upto(order)])

    def scaled(self, factor: complex) -> PdeCoefficients:
        return PdeCoefficients(self.center, self.max_order, self.tables * factor)

    def require_order(self, order: int) -> None:
        if self.max_order < order:
            raise ValueError(f"coefficient tables have order {self.max_order}, at least {order} is required")

    def scale(self) -> float:
        return float(np.max(np.abs(self.tables)))


def builtin_operator(case, kappa: float, mach: float = 0.0, center=(0.0, 0.0, 0.0), max_order: int = 4) -> PdeCoefficients:
    """Coefficients of the three reference operators.

    HELMHOLTZ_CONST: Laplacian + kappa^2.
    HELMHOLTZ_AIRY: Laplacian + kappa^2 (1 - x1).
    CONVECTED_AIRY: Laplacian - mach^2 d33 + 2 i kappa mach d3 + kappa^2 (1 - x3).
    The convected case varies along x3, the direction its Airy solution
    depends on.
    """
    case = OperatorCase(case)
    center = _as_center(center)
    n = count_upto(max_order)
    tables = np.zeros((10, n), dtype=np.complex128)
    for k in IDX_2E:
        tables[k, 0] = 1.0
    k2 = kappa * kappa
    if case is OperatorCase.HELMHOLTZ_CONST:
        tables[0, 0] = k2
    else:
        axis = 0 if case is OperatorCase.HELMHOLTZ_AIRY else 2
        tables[0, 0] = k2 * (1.0 - center[axis])
        if max_order >= 1:
            tables[0, IDX_E[axis]] = -k2
    if case is OperatorCase.CONVECTED_AIRY:
        if abs(mach) >= 1:
            raise ValueError(f"convected operator needs |M0| < 1, got {mach}")
        tables[IDX_2E[2], 0] = 1.0 - mach * mach
        tables[IDX_E[2], 0] = 2j * kappa * mach
    return PdeCoefficients(center, max_order, tables)


def coefficients_from_flow(rho: TaylorTable, m1: TaylorTable, m2: TaylorTable, m3: TaylorTable,
                           kappa: float) -> PdeCoefficients:
    """Convected Helmholtz coefficients from density and Mach-vector tables.

    First-order coefficients involve one derivative of the flow, so the
    result has order one less than the inputs.
    """
    mach = (m1, m2, m3)
    for t in mach:
        rho._check_center(t)
    order = min(t.order for t in (rho,) + mach) - 1
    if order < 0:
        raise ValueError("flow tables need order >= 1")
    if rho.coeffs[0].real <= 0 or abs(rho.coeffs[0].imag) > 0:
        raise ValueError("density must be positive at the center")
    if sum(abs(t.coeffs[0]) ** 2 for t in mach) >= 1:
        raise ValueError("flow must be subsonic at the center")

    rho = rho.truncate(order + 1)
    mach = tuple(t.truncate(order + 1) for t in mach)
    e = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def d(t, k):
        return t.derivative(e[k])

    div_rho_m = sum((d(rho * mach[k], k) for k in range(3)), TaylorTable.zeros(rho.center, order))
    out = np.zeros((10, count_upto(order)), dtype=np.complex128)
    for k in range(3):
        out[IDX_2E[k]] = (rho * (mach[k] * mach[k] - 1.0)).truncate(order).coeffs
    for p, (k, kp) in enumerate(PAIRS):
        out[IDX_CROSS[p]] = (rho * mach[k] * mach[kp]).truncate(order).coeffs
    rho_o = rho.truncate(order)
    mach_o = tuple(t.truncate(order) for t in mach)
    for k in range(3):
        convect = sum((mach_o[l] * d(mach[k], l) for l in range(3)), TaylorTable.zeros(rho.center, order))
        ck = rho_o * convect + div_rho_m * mach_o[k] - d(rho, k) - (2j * kappa) * (rho_o * mach_o[k])
        out[IDX_E[k]] = ck.coeffs
    out[0] = ((-1j * kappa) * div_rho_m - (kappa * kappa) * rho_o).coeffs
    return PdeCoefficients(rho.center, order, out)


# text format: "j1 j2 j3 | i1 i2 i3 | re im", plus an optional "center x y z" line

def dump_coefficients(coeffs: PdeCoefficients, path) -> None:
    lines = ["center " + " ".join(repr(float(v)) for v in coeffs.center)]
    for j in OPERATOR_INDICES:
        t = coeffs.table(j)
        for i, v in t.as_dict().items():
            if v != 0:
                lines.append(f"{j[0]} {j[1]} {j[2]} | {i[0]} {i[1]} {i[2]} | {v.real!r} {v.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_coefficients(path, center=None, max_order: int | None = None) -> PdeCoefficients:
    entries: dict[tuple, dict] = {}
    file_center = None
    top = 0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("center"):
            file_center = [float(v) for v in line.split()[1:4]]
            continue
        parts = [p.split() for p in line.split("|")]
        if len(parts) != 3 or [len(p) for p in parts] != [3, 3, 2]:
            raise ValueError(f"{path}:{lineno}: expected 'j1 j2 j3 | i1 i2 i3 | re im'")
        j = tuple(int(v) for v in parts[0])
        i = tuple(int(v) for v in parts[1])
        if sum(j) > 2 or min(j) < 0 or min(i) < 0:
            raise ValueError(f"{path}:{lineno}: bad multi-index")
        entries.setdefault(j, {})[i] = complex(float(parts[2][0]), float(parts[2][1]))
        top = max(top, sum(i))
    if center is None:
        center = file_center if file_center is not None else (0.0, 0.0, 0.0)
    order = top if max_order is None else max_order
    tables = {j: TaylorTable.from_dict(center, order, entries.get(j, {})) for j in OPERATOR_INDICES}
    return PdeCoefficients.from_tables(tables)
