"""Count tables -> error-pattern averages -> correlations -> visibilities.

Cells are grouped by whether the outcome pair shows the singlet's expected
anti-correlation in x (i = 0) or an error (i = 1, x1 x2 = +1), and
likewise in y (j).  Each group holds four of the sixteen cells and E_ij is
the mean normalized count over the group, so 4 * sum(E_ij) = 1.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .design import X_SIGNS, Y_SIGNS
from .errors import DomainError, WitnessError
from .simulator import CountTable
from .states import InputCorrelations, witness

PATTERNS = ("00", "01", "10", "11")

X_CORR = np.outer(X_SIGNS, X_SIGNS)  # x1 x2 per cell
Y_CORR = np.outer(Y_SIGNS, Y_SIGNS)
PROD_CORR = X_CORR * Y_CORR

# (i, j) label of every cell: i = 1 where x1 x2 = +1, j = 1 where y1 y2 = +1.
ERROR_PATTERN = np.array(
    [[f"{int(X_CORR[r, c] > 0)}{int(Y_CORR[r, c] > 0)}" for c in range(4)] for r in range(4)]
)

# Per-cell weights w such that estimator = sum(w * n) / sum(n).
ESTIMATOR_WEIGHTS = {
    **{f"e{ij}": (ERROR_PATTERN == ij) / 4.0 for ij in PATTERNS},
    "c_xx_exp": X_CORR.astype(float),
    "c_yy_exp": Y_CORR.astype(float),
    "c_prod_exp": PROD_CORR.astype(float),
}

# Coefficients on (E00, E01, E10, E11).
_CORR_COEFFS = {
    "c_xx_exp": 4.0 * np.array([-1, -1, 1, 1]),
    "c_yy_exp": 4.0 * np.array([-1, 1, -1, 1]),
    "c_prod_exp": 4.0 * np.array([1, -1, -1, 1]),
}

METHODS = ("delta", "bootstrap")
DEFAULT_REPLICATES = 10000


def _as_counts(counts) -> np.ndarray:
    n = counts.counts if isinstance(counts, CountTable) else np.asarray(counts, dtype=float)
    n = np.asarray(n, dtype=float)
    if n.shape != (4, 4):
        raise DomainError(f"count table must be 4x4, got {n.shape}")
    if np.any(n < 0) or not np.all(np.isfinite(n)):
        raise DomainError("counts must be finite and non-negative")
    if n.sum() <= 0:
        raise DomainError("count table is empty (total counts = 0)")
    return n


def _weights(quantities) -> np.ndarray:
    try:
        return np.array([ESTIMATOR_WEIGHTS[q] for q in quantities])
    except KeyError as exc:
        raise ValueError(f"unknown estimator {exc.args[0]!r}; choose from {sorted(ESTIMATOR_WEIGHTS)}") from None


def _estimate(w: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Evaluate ratio estimators; ``n`` may carry leading replicate axes."""
    return np.einsum("qij,...ij->...q", w, n) / n.sum(axis=(-2, -1))[..., None]


def bootstrap_tables(n: np.ndarray, replicates: int, seed: int) -> np.ndarray:
    """Parametric bootstrap: every cell redrawn as Poisson(n) from its own substream."""
    out = np.empty((replicates, 16))
    for k, mean in enumerate(n.ravel()):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(k,))))
        out[:, k] = rng.poisson(mean, size=replicates)
    return out.reshape(replicates, 4, 4)


def error_covariance(counts, quantities, method: str = "delta",
                     replicates: int = DEFAULT_REPLICATES, seed: int = 0) -> np.ndarray:
    """Covariance matrix of the named estimators under Poisson cell noise."""
    n = _as_counts(counts)
    w = _weights(quantities)
    if method == "delta":
        total = n.sum()
        f = _estimate(w, n)
        g = (w - f[:, None, None]) / total
        return np.einsum("aij,bij,ij->ab", g, g, n)
    if method == "bootstrap":
        if replicates < 2:
            raise ValueError("bootstrap needs at least 2 replicates")
        reps = bootstrap_tables(n, replicates, seed)
        reps = reps[reps.sum(axis=(1, 2)) > 0]
        return np.atleast_2d(np.cov(_estimate(w, reps), rowvar=False, ddof=1))
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def propagate_errors(counts, quantity: str, method: str = "delta",
                     replicates: int = DEFAULT_REPLICATES, seed: int = 0) -> float:
    """Standard error of one named estimator (e00..e11, c_xx_exp, c_yy_exp, c_prod_exp)."""
    cov = error_covariance(counts, [quantity], method, replicates, seed)
    return float(np.sqrt(cov[0, 0]))


@dataclass
class ErrorPatternAverages:
    e00: float
    e01: float
    e10: float
    e11: float
    se00: float
    se01: float
    se10: float
    se11: float
    total_counts: int
    cov: np.ndarray = field(repr=False)
    method: str = "delta"

    @property
    def values(self) -> np.ndarray:
        return np.array([self.e00, self.e01, self.e10, self.e11])

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "cov"}
        d["total_counts"] = int(d["total_counts"])
        return d


def classify(counts, method: str = "delta", replicates: int = DEFAULT_REPLICATES,
             seed: int = 0) -> ErrorPatternAverages:
    n = _as_counts(counts)
    names = [f"e{ij}" for ij in PATTERNS]
    e = _estimate(_weights(names), n)
    cov = error_covariance(n, names, method, replicates, seed)
    se = np.sqrt(np.clip(np.diag(cov), 0, None))
    return ErrorPatternAverages(*map(float, e), *map(float, se),
                                total_counts=int(round(n.sum())), cov=cov, method=method)


@dataclass
class ExperimentalCorrelations:
    c_xx_exp: float
    c_yy_exp: float
    c_prod_exp: float
    se_xx: float
    se_yy: float
    se_prod: float

    def to_dict(self) -> dict:
        return asdict(self)


def correlations(e: ErrorPatternAverages) -> ExperimentalCorrelations:
    vals, ses = [], []
    for name in ("c_xx_exp", "c_yy_exp", "c_prod_exp"):
        a = _CORR_COEFFS[name]
        vals.append(float(a @ e.values))
        ses.append(float(np.sqrt(max(a @ e.cov @ a, 0.0))))
    return ExperimentalCorrelations(*vals, *ses)


@dataclass
class VisibilityReport:
    """Squared visibilities and the signed interval for C^2.

    ``c2_interval`` is numerically ordered; ``c2_observed`` is the raw product
    correlation (input product correlation = 1) and ``c2_scaled`` divides it
    by the witness lower bound on the input product correlation.
    """

    vx2: float
    se_vx2: float
    vy2: float
    se_vy2: float
    c2_observed: float
    se_c2_observed: float
    c2_scaled: float
    se_c2_scaled: float
    c2_interval: tuple[float, float]
    se_c2_interval: tuple[float, float]
    imag_c_interval: tuple[float, float] | None
    se_imag_c_interval: tuple[float, float] | None
    vx: float | None
    vy: float | None
    witness_value: float
    witness_se: float
    product_lower_bound: float
    fragile: bool
    product_only: bool
    inputs: InputCorrelations

    @property
    def c2_negative(self) -> bool:
        return self.c2_interval[1] < 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["inputs"] = self.inputs.to_dict()
        d["c2_negative"] = self.c2_negative
        for k in ("c2_interval", "se_c2_interval", "imag_c_interval", "se_imag_c_interval"):
            if d[k] is not None:
                d[k] = list(d[k])
        return d


def visibilities(e: ErrorPatternAverages, corrs: InputCorrelations,
                 product_only: bool = False) -> VisibilityReport:
    """Recover V_x^2, V_y^2 and bounds on C^2 assuming identical local measurements."""
    w = witness(corrs)
    if not w.entangled:
        raise WitnessError(
            f"witness value {w.value:.4f} <= 1 (<x1x2> + <y1y2> < -1 violated); C^2 is unrecoverable")
    if corrs.c_xx == 0 or corrs.c_yy == 0:
        raise DomainError("input correlations must be nonzero")
    ec = correlations(e)

    ax, ay = abs(corrs.c_xx), abs(corrs.c_yy)
    vx2 = 4.0 * (e.e00 + e.e01 - e.e10 - e.e11) / ax
    vy2 = 4.0 * (e.e00 + e.e10 - e.e01 - e.e11) / ay
    se_vx2 = float(np.hypot(ec.se_xx / ax, vx2 * corrs.se_xx / ax))
    se_vy2 = float(np.hypot(ec.se_yy / ay, vy2 * corrs.se_yy / ay))

    lower_bound = w.value - 1.0
    observed = ec.c_prod_exp
    scaled = observed / lower_bound
    se_scaled = float(np.hypot(ec.se_prod / lower_bound, scaled * w.se / lower_bound))
    ends = sorted([(observed, ec.se_prod), (scaled, se_scaled)], key=lambda t: t[0])
    interval = (ends[0][0], ends[1][0])
    se_interval = (ends[0][1], ends[1][1])

    imag = se_imag = None
    if interval[1] < 0 and not product_only:
        imag = (float(np.sqrt(-interval[1])), float(np.sqrt(-interval[0])))
        se_imag = (se_interval[1] / (2 * imag[0]), se_interval[0] / (2 * imag[1]))

    vx = vy = None
    if not product_only:
        vx = float(np.sqrt(vx2)) if vx2 >= 0 else None
        vy = float(np.sqrt(vy2)) if vy2 >= 0 else None

    return VisibilityReport(
        vx2=float(vx2), se_vx2=se_vx2, vy2=float(vy2), se_vy2=se_vy2,
        c2_observed=float(observed), se_c2_observed=float(ec.se_prod),
        c2_scaled=float(scaled), se_c2_scaled=se_scaled,
        c2_interval=(float(interval[0]), float(interval[1])),
        se_c2_interval=(float(se_interval[0]), float(se_interval[1])),
        imag_c_interval=imag, se_imag_c_interval=se_imag,
        vx=vx, vy=vy,
        witness_value=float(w.value), witness_se=w.se,
        product_lower_bound=float(lower_bound),
        fragile=bool(w.value - 1.0 <= w.se),
        product_only=product_only,
        inputs=corrs,
    )


@dataclass
class AnalysisResult:
    averages: ErrorPatternAverages
    correlations: ExperimentalCorrelations
    report: VisibilityReport | None

    def to_dict(self) -> dict:
        return {
            "error_pattern_averages": self.averages.to_dict(),
            "experimental_correlations": self.correlations.to_dict(),
            "visibilities": None if self.report is None else self.report.to_dict(),
        }


def analyze(counts, corrs: InputCorrelations, method: str = "delta",
            replicates: int = DEFAULT_REPLICATES, seed: int = 0,
            product_only: bool = False) -> AnalysisResult:
    e = classify(counts, method, replicates, seed)
    return AnalysisResult(e, correlations(e), visibilities(e, corrs, product_only))
