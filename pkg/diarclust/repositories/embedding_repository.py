"""
Embedding repository: CSV embeddings, truth labels and clustering outputs.
"""

import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from diarclust.autodiff.ops import value_of
from diarclust.exceptions import EmbeddingCsvError
from diarclust.models.embedding import EmbeddingSet

logger = logging.getLogger(__name__)

INDEX_COLUMNS = ["n", "i", "s"]
FLOAT_FORMAT = "%.10g"


def _first_bad_row(frame: pd.DataFrame) -> int:
    bad = frame.apply(pd.to_numeric, errors="coerce").isna().any(axis=1)
    return int(np.flatnonzero(bad.to_numpy())[0])


class EmbeddingRepository:
    """Repository for embedding and assignment CSV files."""

    def __init__(self, base_dir: Union[str, Path] = "."):
        self.base_dir = Path(base_dir)

    def read_embeddings(self, path: Union[str, Path]) -> EmbeddingSet:
        """
        Read `n,i,s,e_1..e_C` rows; row n must be the n-th data row.

        Raises:
            EmbeddingCsvError: With the file line number of the first bad row
        """
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        except pd.errors.ParserError as e:
            raise EmbeddingCsvError(f"unreadable CSV: {e}", 1) from e
        except pd.errors.EmptyDataError as e:
            raise EmbeddingCsvError("file is empty", 1) from e

        columns = list(frame.columns)
        dims = len(columns) - len(INDEX_COLUMNS)
        expected = INDEX_COLUMNS + [f"e_{c}" for c in range(1, dims + 1)]
        if dims < 1 or columns != expected:
            raise EmbeddingCsvError(f"header must be n,i,s,e_1..e_C, got {','.join(columns)}", 1)
        if frame.empty:
            return EmbeddingSet(np.zeros((0, dims)), [])

        numeric = frame.apply(pd.to_numeric, errors="coerce")
        if numeric.isna().to_numpy().any():
            row = _first_bad_row(frame)
            raise EmbeddingCsvError(f"non-numeric value in row n={frame.iloc[row, 0]}", row + 2)

        index_part = numeric[INDEX_COLUMNS].to_numpy()
        if not np.all(index_part == np.round(index_part)):
            row = int(np.flatnonzero(np.any(index_part != np.round(index_part), axis=1))[0])
            raise EmbeddingCsvError("n, i and s must be integers", row + 2)
        order = index_part[:, 0].astype(np.int64)
        mismatch = np.flatnonzero(order != np.arange(len(order)))
        if mismatch.size:
            row = int(mismatch[0])
            raise EmbeddingCsvError(f"expected n={row}, got {order[row]}", row + 2)

        values = numeric[expected[3:]].to_numpy(dtype=np.float64)
        if not np.all(np.isfinite(values)):
            row = int(np.flatnonzero(~np.all(np.isfinite(values), axis=1))[0])
            raise EmbeddingCsvError("embedding values must be finite", row + 2)

        index = [(int(i), int(s)) for i, s in index_part[:, 1:3].astype(np.int64)]
        if len(set(index)) != len(index):
            seen = set()
            for row, pair in enumerate(index):
                if pair in seen:
                    raise EmbeddingCsvError(f"duplicate (i, s) pair {pair}", row + 2)
                seen.add(pair)
        logger.info(f"Read {len(index)} embeddings of dimension {dims} from {path}")
        return EmbeddingSet(values, index)

    def write_embeddings(self, embeddings: EmbeddingSet, path: Union[str, Path]) -> Path:
        values = embeddings.values()
        frame = pd.DataFrame(values, columns=[f"e_{c}" for c in range(1, embeddings.dim + 1)])
        frame.insert(0, "s", [s for _, s in embeddings.index])
        frame.insert(0, "i", [i for i, _ in embeddings.index])
        frame.insert(0, "n", np.arange(embeddings.n))
        return self._write(frame, path)

    def read_truth(self, path: Union[str, Path], n: int) -> np.ndarray:
        """Read `n,label` rows for embeddings 0..n-1."""
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        if list(frame.columns) != ["n", "label"]:
            raise EmbeddingCsvError("truth header must be n,label", 1)
        order = pd.to_numeric(frame["n"], errors="coerce").to_numpy()
        mismatch = np.flatnonzero(order != np.arange(len(order)))
        if mismatch.size:
            raise EmbeddingCsvError(f"expected n={int(mismatch[0])}", int(mismatch[0]) + 2)
        if len(frame) != n:
            raise EmbeddingCsvError(f"{len(frame)} truth labels for {n} embeddings", len(frame) + 1)
        return frame["label"].to_numpy()

    def write_truth(self, labels: Sequence, path: Union[str, Path]) -> Path:
        frame = pd.DataFrame({"n": np.arange(len(labels)), "label": list(labels)})
        return self._write(frame, path)

    def write_assignments(self, embeddings: EmbeddingSet, labels: np.ndarray, path: Union[str, Path]) -> Path:
        frame = pd.DataFrame({
            "n": np.arange(embeddings.n),
            "i": [i for i, _ in embeddings.index],
            "s": [s for _, s in embeddings.index],
            "cluster": np.asarray(labels, dtype=np.int64),
        })
        return self._write(frame, path)

    def write_responsibilities(self, R, path: Union[str, Path]) -> Path:
        values = np.asarray(value_of(R), dtype=np.float64)
        frame = pd.DataFrame(values, columns=[f"r_{k}" for k in range(1, values.shape[1] + 1)])
        frame.insert(0, "n", np.arange(values.shape[0]))
        return self._write(frame, path)

    def _write(self, frame: pd.DataFrame, path: Union[str, Path]) -> Path:
        target = Path(path)
        if not target.is_absolute():
            target = self.base_dir / target
        target.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(target, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"Wrote {target}")
        return target
