"""Side-by-side comparison of the bundled analysis with the published values."""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import AnalysisResult, analyze
from .states import InputCorrelations, product_bounds, witness

# (name, published value, tolerance)
PUBLISHED = (
    ("E00", 0.0938, 2e-4),
    ("E01", 0.0898, 2e-4),
    ("E10", 0.0607, 2e-4),
    ("E11", 0.00567, 2e-4),
    ("<x1x2>_exp", -0.469, 1e-3),
    ("<y1y2>_exp", -0.236, 1e-3),
    ("<x1y1x2y2>_exp", -0.204, 1e-3),
    ("se <x1x2>_exp", 0.003, 1e-3),
    ("se <y1y2>_exp", 0.003, 1e-3),
    ("se <x1y1x2y2>_exp", 0.003, 1e-3),
    ("Vx^2", 0.491, 2e-3),
    ("Vy^2", 0.276, 2e-3),
    ("C^2 lower", -0.252, 2e-3),
    ("C^2 upper", -0.204, 2e-3),
    ("|iC| lower", 0.452, 2e-3),
    ("|iC| upper", 0.502, 2e-3),
    ("witness", 1.8106, 1e-9),
    ("product bound lower", 0.811, 5e-4),
    ("product bound upper", 1.0, 0.0),
)

# Without square roots only the product rows make sense.
_SQRT_ROWS = {"|iC| lower", "|iC| upper"}


@dataclass
class ComparisonRow:
    name: str
    published: float
    computed: float | None
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.computed is not None and abs(self.computed - self.published) <= self.tolerance + 1e-15

    def to_dict(self) -> dict:
        return {"name": self.name, "published": self.published, "computed": self.computed,
                "tolerance": self.tolerance, "pass": self.passed}


def computed_values(result: AnalysisResult, corrs: InputCorrelations) -> dict[str, float | None]:
    e, c, r = result.averages, result.correlations, result.report
    bounds = product_bounds(corrs)
    imag = r.imag_c_interval or (None, None)
    return {
        "E00": e.e00, "E01": e.e01, "E10": e.e10, "E11": e.e11,
        "<x1x2>_exp": c.c_xx_exp, "<y1y2>_exp": c.c_yy_exp, "<x1y1x2y2>_exp": c.c_prod_exp,
        "se <x1x2>_exp": c.se_xx, "se <y1y2>_exp": c.se_yy, "se <x1y1x2y2>_exp": c.se_prod,
        "Vx^2": r.vx2, "Vy^2": r.vy2,
        "C^2 lower": r.c2_interval[0], "C^2 upper": r.c2_interval[1],
        "|iC| lower": imag[0], "|iC| upper": imag[1],
        "witness": witness(corrs).value,
        "product bound lower": bounds.lower, "product bound upper": bounds.upper,
    }


def compare(counts, corrs: InputCorrelations, method: str = "delta", replicates: int = 10000,
            seed: int = 0, product_only: bool = False) -> tuple[AnalysisResult, list[ComparisonRow]]:
    result = analyze(counts, corrs, method, replicates, seed, product_only)
    values = computed_values(result, corrs)
    rows = [ComparisonRow(name, pub, values[name], tol) for name, pub, tol in PUBLISHED
            if not (product_only and name in _SQRT_ROWS)]
    return result, rows


def format_table(rows: list[ComparisonRow]) -> str:
    lines = [f"{'quantity':<22}{'published':>12}{'computed':>14}{'tolerance':>11}  verdict"]
    for row in rows:
        comp = "n/a" if row.computed is None else f"{row.computed:.5f}"
        lines.append(f"{row.name:<22}{row.published:>12.5f}{comp:>14}{row.tolerance:>11.1e}  "
                     f"{'PASS' if row.passed else 'FAIL'}")
    return "\n".join(lines)
