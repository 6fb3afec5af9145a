"""Dataset ingestion and result serialization for the command-line tools.

CSV datasets carry one header row of unique column names and numeric
cells.  Designs are centered on load (the response too): every consumer
works with centered columns, and constant columns — zero after centering
— are dropped with a warning.  Search results and run manifests are
written as JSON validating against the schemas shipped in
``substab/schemas``; the manifest (seed, configuration hash, versions)
pins down everything needed to reproduce a run byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from importlib import metadata, resources
from pathlib import Path

import numpy as np
import pandas as pd

from .fsss import SearchResult
from .linalg import DesignMatrix
from .synthetic import GroundTruth

__all__ = [
    "load_csv",
    "save_dataset",
    "truth_to_dict",
    "truth_from_dict",
    "result_to_dict",
    "write_json",
    "write_manifest",
    "load_schema",
]

log = logging.getLogger(__name__)


def _read_header(path: Path) -> list[str]:
    with open(path, newline="", encoding="utf-8") as fh:
        try:
            header = next(csv.reader(fh))
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
    names = [h.strip() for h in header]
    seen: dict[str, int] = {}
    for name in names:
        seen[name] = seen.get(name, 0) + 1
    dupes = sorted(n for n, c in seen.items() if c > 1)
    if dupes:
        raise ValueError(f"{path}: duplicate column names {dupes}")
    return names


def load_csv(path, response: str | None = None):
    """Load a dataset: centered design plus (optionally) a centered response.

    The named response column, when requested, is split off before the
    design is assembled.  Non-numeric or missing cells raise with their
    row and column; constant columns are dropped with a warning since they
    carry no signal once centered.
    """
    path = Path(path)
    names = _read_header(path)
    df = pd.read_csv(path)
    if list(df.columns) != names:  # pragma: no cover - header re-read safety net
        df.columns = names

    for col in names:
        vals = pd.to_numeric(df[col], errors="coerce")
        bad = vals.isna() & df[col].notna()
        if bad.any():
            r = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"{path}: non-numeric value {df[col].iloc[r]!r} at row {r + 2}, column {col!r}"
            )
        missing = vals.isna()
        if missing.any():
            r = int(np.flatnonzero(missing)[0])
            raise ValueError(f"{path}: missing value at row {r + 2}, column {col!r}")
        df[col] = vals.astype(np.float64)

    y = None
    if response is not None:
        if response not in df.columns:
            raise ValueError(f"{path}: no column named {response!r} to use as the response")
        y = df.pop(response).to_numpy()
        y = y - y.mean()

    values = df.to_numpy()
    keep = [j for j in range(values.shape[1]) if np.ptp(values[:, j]) > 0]
    dropped = [df.columns[j] for j in range(values.shape[1]) if j not in keep]
    if dropped:
        log.warning("dropping %d constant column(s): %s", len(dropped), dropped)
    X = DesignMatrix.from_array(values[:, keep], column_names=[df.columns[j] for j in keep])
    log.info("loaded %s: %d rows, %d feature columns", path, X.n, X.p)
    return X, y


def save_dataset(path, X: DesignMatrix, y: np.ndarray | None = None, response_name: str = "y"):
    """Write a design (and optional response) as a headered CSV."""
    df = pd.DataFrame(X.values, columns=list(X.column_names))
    if y is not None:
        if response_name in df.columns:
            raise ValueError(f"response name {response_name!r} collides with a feature column")
        df[response_name] = np.asarray(y, dtype=np.float64)
    df.to_csv(path, index=False)


def truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "beta": [float(b) for b in truth.beta],
        "support": list(truth.support),
        "clusters": [list(c) for c in truth.clusters],
        "cluster_signal": list(truth.cluster_signal),
        "block_parents": [list(b) for b in truth.block_parents],
        "block_children": [list(b) for b in truth.block_children],
        "individuals": list(truth.individuals),
        "labels": list(truth.labels),
        "column_names": list(truth.column_names),
    }


def truth_from_dict(d: dict) -> GroundTruth:
    return GroundTruth(
        beta=np.asarray(d["beta"], dtype=np.float64),
        support=tuple(d["support"]),
        clusters=tuple(tuple(c) for c in d["clusters"]),
        cluster_signal=tuple(bool(b) for b in d["cluster_signal"]),
        block_parents=tuple(tuple(b) for b in d["block_parents"]),
        block_children=tuple(tuple(b) for b in d["block_children"]),
        individuals=tuple(d["individuals"]),
        labels=tuple(d["labels"]),
        column_names=tuple(d["column_names"]),
    )


def result_to_dict(result: SearchResult) -> dict:
    """Search result as a JSON-ready mapping (0-based indices plus names)."""
    return {
        "alpha": result.alpha,
        "K": result.K,
        "mode": result.mode,
        "seed": result.seed,
        "exhausted": result.exhausted,
        "restarts": result.restarts,
        "pi_evaluations": result.pi_evaluations,
        "models": [
            {
                "features": list(m.features),
                "names": list(m.names),
                "stability": m.stability,
            }
            for m in result.models
        ],
    }


def write_json(path, payload: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _package_versions() -> dict:
    import platform

    import scipy

    try:
        own = metadata.version("substab")
    except metadata.PackageNotFoundError:  # pragma: no cover - source checkout
        own = "unknown"
    return {
        "substab": own,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def config_hash(config: dict) -> str:
    """sha256 over the canonical JSON encoding of a configuration mapping."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_manifest(path, command: str, seed: int, config: dict):
    """Record what produced a run's outputs: command, seed, config + hash, versions."""
    payload = {
        "command": command,
        "seed": int(seed),
        "config": config,
        "config_sha256": config_hash(config),
        "versions": _package_versions(),
    }
    write_json(path, payload)
    return payload


def load_schema(name: str) -> dict:
    """One of the shipped JSON schemas ('models' or 'manifest')."""
    ref = resources.files("substab") / "schemas" / f"{name}.schema.json"
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)
