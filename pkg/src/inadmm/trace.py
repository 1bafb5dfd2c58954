"""Per-iteration solve traces and their CSV serialization."""

import numpy as np

__all__ = ["TraceRow", "SolveTrace", "CSV_COLUMNS"]

CSV_COLUMNS = (
    "k",
    "primal",
    "dual",
    "gap",
    "feas_residual",
    "zbar_norm",
    "dw_norm",
    "dw_sq_sum",
)


class TraceRow:
    """One iteration's record.  Scalar columns go to CSV; vectors stay in memory."""

    __slots__ = (
        "k",
        "primal",
        "dual",
        "gap",
        "feas_residual",
        "zbar_norm",
        "dw_norm",
        "dw_sq_sum",
        "vectors",
    )

    def __init__(self, k, primal=np.nan, dual=np.nan, feas_residual=np.nan,
                 zbar_norm=np.nan, dw_norm=np.nan, dw_sq_sum=np.nan, vectors=None):
        self.k = k
        self.primal = primal
        self.dual = dual
        self.gap = primal - dual if np.isfinite(primal) and np.isfinite(dual) else np.inf
        self.feas_residual = feas_residual
        self.zbar_norm = zbar_norm
        self.dw_norm = dw_norm
        self.dw_sq_sum = dw_sq_sum
        self.vectors = vectors or {}

    def scalars(self):
        return (self.k, self.primal, self.dual, self.gap, self.feas_residual,
                self.zbar_norm, self.dw_norm, self.dw_sq_sum)


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


class SolveTrace:
    """Append-only record of a solver run."""

    def __init__(self):
        self.rows = []
        self.converged = False
        self.iterations = 0
        self.final = {}

    def append(self, row):
        self.rows.append(row)
        self.iterations = row.k

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def column(self, name):
        """All values of one scalar column as an array."""
        idx = CSV_COLUMNS.index(name)
        return np.array([row.scalars()[idx] for row in self.rows])

    def vector_series(self, name):
        """All stored per-iteration vectors under `name` (skips missing rows)."""
        return [(row.k, row.vectors[name]) for row in self.rows if name in row.vectors]

    def write_csv(self, path_or_file):
        """Write scalar columns; floats at 17 significant digits."""
        if hasattr(path_or_file, "write"):
            self._write(path_or_file)
        else:
            with open(path_or_file, "w") as fh:
                self._write(fh)

    def _write(self, fh):
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            fh.write(",".join(_fmt(v) for v in row.scalars()) + "\n")
