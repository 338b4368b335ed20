"""
Plain-text matrix files and run manifests.

A matrix file is either CSV::

    # rows=2 cols=3
    2,3,1
    2,1,3

or JSON ``{"rows": 2, "cols": 3, "data": [2, 3, 1, 2, 1, 3]}`` (row-major).
Values are written with 17 significant digits, so reading a written file
returns the same doubles.
"""

import json
import logging
import re
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from lqrecover.exceptions import MatrixFileError


logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
_HEADER = re.compile(r"^#\s*rows\s*=\s*(\d+)\s+cols\s*=\s*(\d+)\s*$")

PathLike = Union[str, Path]


def _is_json(path: Path) -> bool:
    return path.suffix.lower() == ".json"


def write_matrix(path: PathLike, matrix: npt.ArrayLike) -> Path:
    """Write a 2-D array (a 1-D array becomes one column) as CSV or JSON by suffix."""
    path = Path(path)
    M = np.asarray(matrix, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise MatrixFileError(f"Only 1-D or 2-D arrays can be written, got {M.ndim} dimensions")
    rows, cols = M.shape
    try:
        if _is_json(path):
            payload = {"rows": rows, "cols": cols, "data": [float(v) for v in M.ravel()]}
            path.write_text(json.dumps(payload), encoding="utf-8")
        else:
            lines = [f"# rows={rows} cols={cols}"]
            lines += [",".join(FLOAT_FORMAT % v for v in row) for row in M]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise MatrixFileError(f"Failed to write {path}: {e}") from e
    return path


def _read_json(path: Path, text: str) -> np.ndarray:
    try:
        payload = json.loads(text)
        rows, cols = int(payload["rows"]), int(payload["cols"])
        data = np.asarray(payload["data"], dtype=float)
    except (ValueError, KeyError, TypeError) as e:
        raise MatrixFileError(f"Malformed JSON matrix file {path}: {e}") from e
    if data.size != rows * cols:
        raise MatrixFileError(f"{path} declares {rows}x{cols} but holds {data.size} values")
    return data.reshape(rows, cols)


def _read_csv(path: Path, text: str) -> np.ndarray:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise MatrixFileError(f"{path} is empty")
    header = _HEADER.match(lines[0])
    if header is None:
        raise MatrixFileError(f"{path} must start with '# rows=<m> cols=<n>', got {lines[0]!r}")
    rows, cols = int(header.group(1)), int(header.group(2))
    body = lines[1:]
    if len(body) != rows:
        raise MatrixFileError(f"{path} declares {rows} rows but holds {len(body)}")
    values = []
    for i, line in enumerate(body, start=1):
        fields = line.split(",")
        if len(fields) != cols:
            raise MatrixFileError(f"{path}: row {i} has {len(fields)} values, expected {cols}")
        try:
            values.append([float(v) for v in fields])
        except ValueError as e:
            raise MatrixFileError(f"{path}: row {i} is not numeric: {e}") from e
    return np.array(values, dtype=float).reshape(rows, cols)


def read_matrix(path: PathLike) -> np.ndarray:
    """
    Read a matrix file.

    Raises:
        MatrixFileError: If the file is unreadable or its shape header
            disagrees with its data.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MatrixFileError(f"Failed to read {path}: {e}") from e
    M = _read_json(path, text) if _is_json(path) else _read_csv(path, text)
    logger.debug("read %dx%d matrix from %s", M.shape[0], M.shape[1], path)
    return M


def read_vector(path: PathLike) -> np.ndarray:
    """Read a matrix file holding a single row or a single column."""
    M = read_matrix(path)
    if 1 not in M.shape:
        raise MatrixFileError(f"{path} holds a {M.shape[0]}x{M.shape[1]} matrix, expected a vector")
    return M.ravel()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    """Record of one run: what was asked for and what was written.

    Attributes:
        tool_version: Package version that produced the outputs.
        command: Subcommand name.
        config: Fully resolved configuration.
        config_hash: SHA-256 of the canonical configuration JSON.
        master_seed: Root seed of the run.
        started_at: UTC ISO timestamp.
        finished_at: UTC ISO timestamp, set by ``finish``.
        outputs: Output files by role.
    """
    tool_version: str
    command: str
    config: Dict[str, Any]
    config_hash: str
    master_seed: int
    started_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None
    outputs: Dict[str, str] = field(default_factory=dict)

    def add_output(self, role: str, path: PathLike) -> None:
        self.outputs[role] = str(path)

    def finish(self) -> None:
        self.finished_at = _now()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, path: PathLike) -> Path:
        path = Path(path)
        try:
            path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        except OSError as e:
            raise MatrixFileError(f"Failed to write manifest {path}: {e}") from e
        logger.info("Wrote manifest %s", path)
        return path

    @classmethod
    def from_file(cls, path: PathLike) -> Self:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return cls(**data)
        except (OSError, ValueError, TypeError) as e:
            raise MatrixFileError(f"Failed to read manifest {path}: {e}") from e
