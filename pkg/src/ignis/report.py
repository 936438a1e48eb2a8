"""Markdown report comparing a simulation study with published reference values."""

from __future__ import annotations

from pathlib import Path

from ignis.families import CopulaFamily
from ignis.pipeline import StudyTable

# Published reference values: (family, theta) -> (estimate, se).
REFERENCE_MOM = {
    (CopulaFamily.A1, 2.0): (4.4860, 0.1597),
    (CopulaFamily.A1, 5.0): (9.5215, 0.8844),
    (CopulaFamily.A1, 10.0): (6.1183, 1.2273),
    (CopulaFamily.A2, 2.0): (1.9047, 0.0709),
    (CopulaFamily.A2, 5.0): (4.9398, 0.2335),
    (CopulaFamily.A2, 10.0): (9.4366, 0.1900),
}

REFERENCE_IGNIS = {
    (CopulaFamily.CLAYTON, 2.0): (1.9289, 0.1044),
    (CopulaFamily.GUMBEL, 2.0): (2.0248, 0.0460),
    (CopulaFamily.FRANK, 2.0): (1.8426, 0.0985),
    (CopulaFamily.A1, 2.0): (2.0828, 0.0789),
    (CopulaFamily.A2, 2.0): (1.9205, 0.0536),
    (CopulaFamily.CLAYTON, 5.0): (4.9696, 0.1957),
    (CopulaFamily.GUMBEL, 5.0): (5.0243, 0.1156),
    (CopulaFamily.FRANK, 5.0): (4.8715, 0.1406),
    (CopulaFamily.A1, 5.0): (4.9502, 0.1782),
    (CopulaFamily.A2, 5.0): (5.0869, 0.1365),
    (CopulaFamily.CLAYTON, 10.0): (10.0439, 0.2968),
    (CopulaFamily.GUMBEL, 10.0): (9.8307, 0.2461),
    (CopulaFamily.FRANK, 10.0): (9.9020, 0.2036),
    (CopulaFamily.A1, 10.0): (9.8938, 0.2326),
    (CopulaFamily.A2, 10.0): (9.8044, 0.2967),
}

REL_TOL = 0.10


def _num(x, spec=".4f") -> str:
    return "-" if x is None else format(x, spec)


def _rows(table: StudyTable, method: str, reference: dict) -> list[str]:
    out = []
    for r in table.select(method):
        ref = reference.get((r.family, r.theta))
        err = None if r.theta_hat is None else abs(r.theta_hat - r.theta) / r.theta
        ok = "n/a" if err is None else ("yes" if err <= REL_TOL else "no")
        ref_txt = "-" if ref is None else f"{ref[0]:.4f} ({ref[1]:.4f})"
        ref_ok = "-" if ref is None else ("yes" if abs(ref[0] - r.theta) / r.theta <= REL_TOL else "no")
        out.append(f"| {r.family.value} | {r.theta:g} | {r.n} | {_num(r.theta_hat)} | {_num(r.se)} | "
                   f"{_num(err, '.1%')} | {ok} | {ref_txt} | {ref_ok} | {r.note} |")
    return out


def write_report(table: StudyTable, path: str | Path, *, scale: str, seed: int, elapsed: float,
                 final_val_loss: float | None = None) -> None:
    head = ("| family | theta | n | estimate | se | rel. error | within 10% | reference (se) | "
            "reference within 10% | note |\n|---|---|---|---|---|---|---|---|---|---|")
    lines = [
        f"# IGNIS reproduction ({scale} scale, seed {seed})",
        "",
        f"Wall time: {elapsed:.1f} s." + (f" Final validation MSE: {final_val_loss:.4f}." if final_val_loss else ""),
        "",
        f"Tolerance band: |estimate - theta| / theta <= {REL_TOL:.0%}.",
        "",
        "## Method of moments (A1, A2)",
        "",
        head,
        *_rows(table, "mom", REFERENCE_MOM),
        "",
        "A1's Kendall's tau is strictly increasing in theta, so the moment equation has a single root;",
        "reference A1 values far from the truth are not reproduced by a correct tau formula.",
        "",
        "## IGNIS network",
        "",
        head,
        *_rows(table, "ignis", REFERENCE_IGNIS),
        "",
    ]
    Path(path).write_text("\n".join(lines), encoding="utf-8")
