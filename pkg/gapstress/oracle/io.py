"""
CSV and JSON export of oracle results.
"""

import csv
import json
from pathlib import Path
from typing import Iterable, List

import structlog

from ..models import FunctionalRecord
from .solver import FunctionalResults, OracleSolution

logger = structlog.get_logger()

SOLUTION_COLUMNS = ["node", "x", "y", "u1", "u2"]


def write_solution_csv(sol: OracleSolution, path: Path) -> None:
    """Write one row per layout node: node, x, y, u1, u2."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    disp = sol.displacement
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(SOLUTION_COLUMNS)
        for n, ((x, y), (u1, u2)) in enumerate(zip(sol.layout.points, disp)):
            writer.writerow([n, f"{x:.17g}", f"{y:.17g}", f"{u1:.17g}", f"{u2:.17g}"])
    logger.debug("Solution written", path=str(path), nodes=len(disp))


def functional_records(res: FunctionalResults, eps: float, mesh_h: float, dofs: int) -> List[FunctionalRecord]:
    """Flatten capacities and functionals into records; indices are 1-based."""

    def rec(quantity: str, indices: List[int], value: float) -> FunctionalRecord:
        return FunctionalRecord(
            epsilon=eps, quantity=quantity, indices=indices, value=float(value), mesh_h=mesh_h, dofs=dofs
        )

    out: List[FunctionalRecord] = []
    for r in range(6):
        for c in range(6):
            out.append(rec("a", [r // 3 + 1, c // 3 + 1, r % 3 + 1, c % 3 + 1], res.a[r, c]))
    for r in range(6):
        out.append(rec("b_tilde", [r // 3 + 1, r % 3 + 1], res.b_tilde[r]))
        out.append(rec("C", [r // 3 + 1, r % 3 + 1], res.C[r]))
    for beta in range(3):
        out.append(rec("b1", [beta + 1], res.b1[beta]))
        if res.b1_star is not None:
            out.append(rec("b1_star", [beta + 1], res.b1_star[beta]))
    return out


def write_functionals_json(records: Iterable[FunctionalRecord], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [r.model_dump(mode="json") for r in records]
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    logger.debug("Functionals written", path=str(path), records=len(payload))


def read_functionals_json(path: Path) -> List[FunctionalRecord]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [FunctionalRecord(**item) for item in data]
