"""Phase-normalised character matrices of a set against a family of characters.

For a in A and gamma in Gamma with nonzero set-average gamma(A), the entry is

    M[a, gamma] = gamma(a) * conj(gamma(A)) / |gamma(A)|,

a unit-modulus number whose column sums come out real and nonnegative, equal
to |A| * |gamma(A)|.  When Gamma sits inside the eps-spectrum of A the grand
sum is therefore at least eps * |A| * |Gamma|.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .fourier import FourierTable, SpectrumSet
from .groups import ElementSet, FiniteAbelianGroup, char_matrix

__all__ = ["CoherenceMatrix", "BoundedFunction", "build_matrix", "bilinear", "mean_value"]

_TOL = 1e-9


class CoherenceMatrix:
    """Dense unit-modulus matrix with optional element labels on both axes."""

    __slots__ = ("entries", "row_indices", "col_indices", "group", "col_means")

    def __init__(
        self,
        entries: np.ndarray,
        row_indices: Optional[np.ndarray] = None,
        col_indices: Optional[np.ndarray] = None,
        group: Optional[FiniteAbelianGroup] = None,
        col_means: Optional[np.ndarray] = None,
        _check_column_sums: bool = False,
    ):
        entries = np.asarray(entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.size == 0:
            raise ValueError(f"entries must be a nonempty 2-d array, got shape {entries.shape}")
        mod_err = float(np.max(np.abs(np.abs(entries) - 1.0)))
        if mod_err > _TOL:
            raise AssertionError(f"entries must have unit modulus, worst error {mod_err}")
        if _check_column_sums:
            sums = entries.sum(axis=0)
            scale = entries.shape[0]
            if float(np.max(np.abs(sums.imag))) > _TOL * scale:
                raise AssertionError("column sums must be real")
            if float(sums.real.min()) < -_TOL * scale:
                raise AssertionError("column sums must be nonnegative")
        if col_means is None:
            col_means = np.abs(entries.mean(axis=0))
        entries.setflags(write=False)
        self.entries = entries
        self.row_indices = None if row_indices is None else np.asarray(row_indices, dtype=np.int64)
        self.col_indices = None if col_indices is None else np.asarray(col_indices, dtype=np.int64)
        self.group = group
        self.col_means = np.asarray(col_means, dtype=np.float64)

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def from_entries(cls, entries: np.ndarray) -> "CoherenceMatrix":
        """Unlabelled matrix for experiments; only unit modulus is enforced."""
        return cls(entries)

    def __repr__(self) -> str:
        return f"CoherenceMatrix({self.n_rows}x{self.n_cols})"


@dataclass(frozen=True)
class BoundedFunction:
    """Complex test function on one side of a matrix, sup-norm at most 1."""

    side: str
    values: np.ndarray

    def __post_init__(self):
        if self.side not in ("rows", "cols"):
            raise ValueError(f"side must be 'rows' or 'cols', got {self.side!r}")
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty vector")
        sup = float(np.max(np.abs(values)))
        if sup > 1.0 + _TOL:
            raise ValueError(f"sup-norm {sup} exceeds 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def build_matrix(
    a: ElementSet,
    gamma: Union[ElementSet, SpectrumSet],
    table: FourierTable,
) -> CoherenceMatrix:
    """Coherence matrix of the set A against the character family Gamma."""
    if isinstance(gamma, SpectrumSet):
        gamma = gamma.members
    group = a.group
    if gamma.group != group or table.group != group:
        raise ValueError("set, characters and table must share one group")
    if a.size == 0 or gamma.size == 0:
        raise ValueError("both the set and the character family must be nonempty")
    rows = a.indices()
    cols = gamma.indices()
    coeffs = table.coeffs[cols]
    mags = np.abs(coeffs)
    dead = mags <= 1e-12 * max(1, a.size)
    if dead.any():
        offenders = [group.decode(int(i)) for i in cols[dead][:4]]
        raise ValueError(
            f"characters with vanishing set-average cannot be normalised: {offenders}"
        )
    entries = char_matrix(group, rows, cols) * (np.conj(coeffs) / mags)[None, :]
    return CoherenceMatrix(
        entries,
        row_indices=rows,
        col_indices=cols,
        group=group,
        col_means=mags / a.size,
        _check_column_sums=True,
    )


def bilinear(f: BoundedFunction, m: CoherenceMatrix, g: BoundedFunction) -> complex:
    """Plain bilinear form f^T M g (no conjugation on either side)."""
    if f.side != "rows" or g.side != "cols":
        raise ValueError("bilinear expects a row-side f and a column-side g")
    if len(f) != m.n_rows or len(g) != m.n_cols:
        raise ValueError(
            f"shape mismatch: f has {len(f)}, g has {len(g)}, matrix is "
            f"{m.n_rows}x{m.n_cols}"
        )
    return complex(f.values @ m.entries @ g.values)


def mean_value(m: CoherenceMatrix) -> complex:
    """Average entry of the matrix."""
    return complex(m.entries.mean())
