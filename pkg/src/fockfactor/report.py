"""Check records, verification reports, and their JSON/CSV serializations.

Reports serialize deterministically: keys are sorted and values converted
to plain JSON types, so two runs of the same configuration differ only in
the 'created' timestamp and the per-check wall times.
"""

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    """Outcome of one named check.

    ``relation`` states the identity or bound being measured in plain
    text; ``order`` carries a fitted convergence order where one exists.
    Diagnostics that are recorded but not gated use tolerance=inf and
    passed=True.
    """
    name: str
    relation: str
    residual: float
    tolerance: float
    passed: bool
    order: float = None
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0


def gated_check(name, relation, residual, tolerance, order=None,
                details=None, wall_time=0.0):
    return CheckRecord(name=name, relation=relation,
                       residual=float(residual), tolerance=float(tolerance),
                       passed=bool(residual <= tolerance), order=order,
                       details=details or {}, wall_time=wall_time)


def recorded_check(name, relation, residual, order=None, details=None,
                   wall_time=0.0):
    """A diagnostic that never gates: tolerance is infinite by contract."""
    return CheckRecord(name=name + " (recorded, not gated)",
                       relation=relation, residual=float(residual),
                       tolerance=math.inf, passed=True, order=order,
                       details=details or {}, wall_time=wall_time)


@dataclass
class VerificationReport:
    suite: str
    seed: int
    config: dict
    checks: list
    tool_version: str = TOOL_VERSION
    schema_version: int = SCHEMA_VERSION
    created: str = ""

    def __post_init__(self):
        if not self.created:
            self.created = datetime.now(timezone.utc).isoformat()

    @property
    def passed(self):
        return all(check.passed for check in self.checks)


def _jsonable(value):
    """Convert to plain JSON types; non-finite floats become strings so
    the output stays standard JSON."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        return {"imag": _jsonable(value.imag), "real": _jsonable(value.real)}
    if isinstance(value, bool):
        return value
    if value is None or isinstance(value, (int, str)):
        return value
    if hasattr(value, "item"):
        return _jsonable(value.item())
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    return str(value)


def report_to_dict(report):
    payload = asdict(report)
    payload["passed"] = report.passed
    return _jsonable(payload)


def write_report_json(report, path):
    with open(path, "w") as handle:
        json.dump(report_to_dict(report), handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_checks_csv(checks, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["name", "relation", "residual", "tolerance",
                         "passed", "order"])
        for check in checks:
            writer.writerow([
                check.name, check.relation, "%.17g" % check.residual,
                "inf" if math.isinf(check.tolerance)
                else "%.17g" % check.tolerance,
                str(check.passed).lower(),
                "" if check.order is None else "%.6g" % check.order])


def write_convergence_csv(records, path):
    """One row per ladder point: check,spacing,residual,fitted_order."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["check", "spacing", "residual", "fitted_order"])
        for record in records:
            for spacing, residual in zip(record.spacings, record.residuals):
                writer.writerow([record.label, "%.17g" % spacing,
                                 "%.17g" % residual,
                                 "inf" if math.isinf(record.fitted_order)
                                 else "%.6g" % record.fitted_order])


def write_spectrum_csv(result, path):
    """One row per eigenvalue: index,eigenvalue,residual_norm."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "eigenvalue", "residual_norm"])
        for idx, value in enumerate(result.eigenvalues):
            writer.writerow([idx, "%.17g" % value,
                             "%.17g" % result.residual_norms[idx]])


def write_samples_csv(configurations, path):
    """One row per drawn configuration: index,count,positions..."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "count", "positions"])
        for idx, positions in enumerate(configurations):
            writer.writerow([idx, len(positions)]
                            + ["%.17g" % p for p in positions])
