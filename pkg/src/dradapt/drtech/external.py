"""Subprocess protocol for external DR techniques (UMAP, UMATO, ...).

Contract, bit-exact:
  * the command is invoked as ``<cmd> --input <csv> --output <csv>``;
  * the hyperparameter assignment (plus a reserved ``"seed"`` key) is
    written to the process's stdin as a single JSON object;
  * the process must write an N-row, 2-column CSV without header to the
    output path and exit 0.
"""

import json
import os
import subprocess
import tempfile

import numpy as np

from ..data import Dataset, write_points
from ..errors import ExternalTechniqueError


def run_external_command(command, ds: Dataset, assignment: dict, seed: int,
                         timeout: float = 600.0) -> np.ndarray:
    if isinstance(command, str):
        command = command.split()
    with tempfile.TemporaryDirectory(prefix="dradapt-ext-") as tmp:
        in_path = os.path.join(tmp, "input.csv")
        out_path = os.path.join(tmp, "output.csv")
        write_points(ds.points, in_path)
        payload = dict(assignment)
        payload["seed"] = int(seed)
        try:
            proc = subprocess.run(
                list(command) + ["--input", in_path, "--output", out_path],
                input=json.dumps(payload).encode(),
                capture_output=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ExternalTechniqueError(f"external command failed to run: {exc}")
        if proc.returncode != 0:
            raise ExternalTechniqueError(
                f"external command exited {proc.returncode}",
                exit_code=proc.returncode,
                stderr=proc.stderr.decode(errors="replace"))
        if not os.path.exists(out_path):
            raise ExternalTechniqueError("external command produced no output file",
                                         stderr=proc.stderr.decode(errors="replace"))
        try:
            pts = np.loadtxt(out_path, delimiter=",", ndmin=2, dtype=np.float64)
        except ValueError as exc:
            raise ExternalTechniqueError(f"malformed output CSV: {exc}")
    if pts.shape != (ds.n, 2):
        raise ExternalTechniqueError(
            f"expected {ds.n} rows x 2 columns, got {pts.shape[0]} x {pts.shape[1]}")
    if not np.isfinite(pts).all():
        raise ExternalTechniqueError("output contains NaN or Inf")
    return pts
