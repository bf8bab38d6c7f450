"""Serialized forms: JSON configs and reports, CSV run logs.

All numeric output is printed with 17 significant digits so that reports are
reproducible and diffable; rereading a report reproduces the numbers exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .measurement import MeasurementOp, eigen_measurement, standard_measurement
from .simulate import PipelineConfig, RunLog
from .states import QuantumState, state_from_json_dict, state_to_json_dict
from .transforms import ComplexMap, OrthoMap

FLOAT_FMT = ".17g"


def format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ConfigError(f"cannot serialize non-finite value {x!r}")
    return format(float(x), FLOAT_FMT)


def _render(obj) -> str:
    """Render to JSON with fixed float formatting and sorted keys."""
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        body = ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        return "[" + ",".join(_render(v) for v in seq) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise ConfigError(f"cannot serialize object of type {type(obj).__name__}")


def dump_json(path: str | Path, obj) -> None:
    Path(path).write_text(_render(obj) + "\n", encoding="utf-8")


def dumps_json(obj) -> str:
    return _render(obj)


def load_json(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON from {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"expected a JSON object at the top level of {path}")
    return data


def write_csv(path: str | Path, header: list[str], rows) -> None:
    """Write rows with floats rendered at 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(x) if isinstance(x, (float, np.floating)) else x for x in row]
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_table(out_dir: str | Path, name: str, header: list[str], rows, fmt: str = "csv") -> Path:
    """Write tabular data as <name>.csv or, with fmt json, as <name>.rows.json."""
    out_dir = Path(out_dir)
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        write_csv(path, header, rows)
    elif fmt == "json":
        path = out_dir / f"{name}.rows.json"
        dump_json(path, {"header": header, "rows": [list(r) for r in rows]})
    else:
        raise ConfigError(f"unknown table format {fmt!r}")
    return path


# ---------------------------------------------------------------------------
# states


def state_to_dict(state: QuantumState) -> dict:
    return state_to_json_dict(state)


def state_from_dict(data: dict) -> QuantumState:
    """Read a state, either flat or as a list of factors to compose."""
    from .composite import compose_many

    if "factors" in data:
        factors = [state_from_json_dict(f) for f in data["factors"]]
        return compose_many(factors)
    return state_from_json_dict(data)


# ---------------------------------------------------------------------------
# maps


def complex_map_to_dict(c: ComplexMap) -> dict:
    return {
        "kind": "complex",
        "n": c.n,
        "re": c.matrix.real.tolist(),
        "im": c.matrix.imag.tolist(),
        "sigma": c.sigma,
    }


def ortho_map_to_dict(m: OrthoMap) -> dict:
    return {"kind": "orthogonal", "dim": m.matrix.shape[0], "matrix": m.matrix.tolist()}


def map_from_dict(data: dict) -> ComplexMap | OrthoMap:
    kind = data.get("kind")
    try:
        if kind == "complex":
            u = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
            return ComplexMap(u, int(data.get("sigma", 1)))
        if kind == "orthogonal":
            return OrthoMap(np.asarray(data["matrix"], dtype=float))
    except KeyError as exc:
        raise ConfigError(f"map serialization missing field {exc}") from exc
    raise ConfigError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# measurements


def measurement_to_dict(m: MeasurementOp) -> dict:
    return {
        "basis_re": m.basis.real.tolist(),
        "basis_im": m.basis.imag.tolist(),
        "values": list(m.values),
        "groups": [list(g) for g in m.groups],
    }


def measurement_from_dict(data: dict) -> MeasurementOp:
    """Read a measurement from basis+values, Hermitian, or shorthand form."""
    if "hermitian_re" in data:
        h = np.asarray(data["hermitian_re"], dtype=float)
        if "hermitian_im" in data:
            h = h + 1j * np.asarray(data["hermitian_im"], dtype=float)
        return eigen_measurement(h)
    if "standard_values" in data:
        return standard_measurement(data["standard_values"])
    try:
        basis = np.asarray(data["basis_re"], dtype=float)
        if "basis_im" in data:
            basis = basis + 1j * np.asarray(data["basis_im"], dtype=float)
        values = tuple(tuple(v) if isinstance(v, list) else v for v in data["values"])
        groups = tuple(tuple(g) for g in data.get("groups", []))
        return MeasurementOp(basis, values, groups)
    except KeyError as exc:
        raise ConfigError(f"measurement serialization missing field {exc}") from exc


# ---------------------------------------------------------------------------
# pipelines


def pipeline_from_dict(data: dict) -> PipelineConfig:
    try:
        source = data["source"]
        prep = data["preparation"]
        meas = data["measurement"]
    except KeyError as exc:
        raise ConfigError(f"pipeline config missing field {exc}") from exc
    source_val = source if source == "prior" else state_from_dict(source)
    interaction = None
    if data.get("interaction") is not None:
        m = map_from_dict(data["interaction"])
        if isinstance(m, OrthoMap):
            raise ConfigError("pipeline interactions must be complex maps")
        interaction = m
    return PipelineConfig(
        source=source_val,
        preparation=measurement_from_dict(prep),
        prep_outcome=int(data.get("prep_outcome", 0)),
        measurement=measurement_from_dict(meas),
        interaction=interaction,
        runs=int(data.get("runs", 10_000)),
        seed=int(data.get("seed", 0)),
        reveal_hidden=bool(data.get("reveal_hidden", False)),
        selection_enabled=bool(data.get("selection_enabled", True)),
    )


def runlog_rows(log: RunLog):
    if log.hidden_labels is None:
        for r, o in enumerate(log.outcomes):
            yield [r, int(o)]
    else:
        for r, (o, lab, sgn) in enumerate(zip(log.outcomes, log.hidden_labels, log.hidden_signs)):
            yield [r, int(o), "ab"[int(lab)], "+" if sgn > 0 else "-"]


def write_runlog_csv(path: str | Path, log: RunLog) -> None:
    header = ["run", "outcome"]
    if log.hidden_labels is not None:
        header += ["hidden_label", "hidden_sign"]
    write_csv(path, header, runlog_rows(log))


def read_runlog_csv(path: str | Path, n_outcomes: int, seed: int = 0, prep_attempts: int = 0) -> RunLog:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read run log {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or header[:2] != ["run", "outcome"]:
        raise ConfigError(f"unrecognized run log header in {path}")
    hidden = len(header) == 4
    outcomes, labels, signs = [], [], []
    for row in reader:
        if not row:
            continue
        outcomes.append(int(row[1]))
        if hidden:
            labels.append(0 if row[2] == "a" else 1)
            signs.append(1 if row[3] == "+" else -1)
    return RunLog(
        n_outcomes=n_outcomes,
        outcomes=np.asarray(outcomes, dtype=np.int64),
        hidden_labels=np.asarray(labels, dtype=np.int64) if hidden else None,
        hidden_signs=np.asarray(signs, dtype=np.int64) if hidden else None,
        prep_attempts=prep_attempts,
        seed=seed,
    )
