"""Least-squares line fits, one-way ANOVA and pairwise mean differences.

P-values come from the F and t distributions in ``scipy.stats``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _special
from scipy import stats as _dist

from .errors import ParameterError

INFINITE = "infinite"


@dataclass
class LineFit:
    m: float
    b: float
    r2: float
    n: int

    def predict(self, x):
        return self.m * np.asarray(x, dtype=np.float64) + self.b


def linfit(xs, ys):
    """Ordinary least squares ``y = m*x + b`` with ``R^2 = 1 - SS_res/SS_tot``.

    A perfectly flat ``y`` (``SS_tot = 0``) is fitted exactly and reports
    ``R^2 = 1``.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("xs and ys must be 1-D sequences of equal length")
    if x.size < 2:
        raise ParameterError("need at least two points for a line fit")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx <= 1e-300 * max(1.0, float(np.abs(x).max()) ** 2):
        raise ParameterError("degenerate fit: all x values are equal")
    m = float(np.sum((x - xm) * (y - ym)) / sxx)
    b = float(ym - m * xm)
    ss_tot = float(np.sum((y - ym) ** 2))
    ss_res = float(np.sum((y - (m * x + b)) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return LineFit(m, b, r2, int(x.size))


# ---------------------------------------------------------------------------
# distribution tails
# ---------------------------------------------------------------------------

def betainc_reg(a, b, x):
    """Regularized incomplete beta ``I_x(a, b)``."""
    if a <= 0 or b <= 0:
        raise ParameterError("betainc_reg needs a > 0 and b > 0")
    return float(_special.betainc(a, b, min(max(x, 0.0), 1.0)))


def f_sf(f, d1, d2):
    """Upper tail ``P(F > f)`` of the F distribution."""
    if math.isinf(f):
        return 0.0
    if f <= 0:
        return 1.0
    return float(_dist.f.sf(f, d1, d2))


def t_sf_two_sided(t, df):
    """Two-sided tail ``P(|T| > |t|)`` of Student's t."""
    if math.isinf(t):
        return 0.0
    return float(2.0 * _dist.t.sf(abs(t), df))


# ---------------------------------------------------------------------------
# ANOVA
# ---------------------------------------------------------------------------

@dataclass
class AnovaTable:
    ss_between: float
    ss_error: float
    ss_total: float
    df_between: int
    df_error: int
    df_total: int
    ms_between: float
    ms_error: float
    F: float
    p_value: float
    k: int
    ns: list
    r_squared: float
    adj_r_squared: float

    def to_dict(self):
        f = INFINITE if math.isinf(self.F) else self.F
        return {
            "between": {"sum_of_squares": self.ss_between, "df": self.df_between,
                        "mean_square": self.ms_between},
            "error": {"sum_of_squares": self.ss_error, "df": self.df_error,
                      "mean_square": self.ms_error},
            "total": {"sum_of_squares": self.ss_total, "df": self.df_total},
            "F": f, "p_value": self.p_value, "k": self.k, "n_per_group": list(self.ns),
            "r_squared": self.r_squared, "adj_r_squared": self.adj_r_squared,
        }


def anova_from_sums(ss_between, ss_error, df_between, df_error, ns=None):
    """Finish an ANOVA table from its sums of squares and degrees of freedom.

    ``F`` is ``inf`` when the error sum of squares vanishes while the
    between-group one does not, and 0 when both vanish.
    """
    ms_b = ss_between / df_between
    ms_e = ss_error / df_error
    if ms_e == 0:
        f = math.inf if ms_b > 0 else 0.0
    else:
        f = ms_b / ms_e
    ss_t = ss_between + ss_error
    df_t = df_between + df_error
    r2 = ss_between / ss_t if ss_t > 0 else 0.0
    adj = 1.0 - (1.0 - r2) * df_t / df_error if ss_t > 0 else 0.0
    return AnovaTable(ss_between, ss_error, ss_t, df_between, df_error, df_t,
                      ms_b, ms_e, f, f_sf(f, df_between, df_error),
                      df_between + 1, list(ns or []), r2, adj)


def one_way_anova(groups):
    """Between/within decomposition of ``k >= 2`` groups of ``n >= 2``."""
    arrs = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    if len(arrs) < 2:
        raise ParameterError("ANOVA needs at least two groups")
    if any(a.size < 2 for a in arrs):
        raise ParameterError("every ANOVA group needs at least two observations")
    allv = np.concatenate(arrs)
    grand = allv.mean()
    ss_b = float(sum(a.size * (a.mean() - grand) ** 2 for a in arrs))
    ss_e = float(sum(np.sum((a - a.mean()) ** 2) for a in arrs))
    k = len(arrs)
    n = int(allv.size)
    return anova_from_sums(ss_b, ss_e, k - 1, n - k, [int(a.size) for a in arrs])


@dataclass
class PairwiseDiff:
    i: int
    j: int
    diff: float
    se: float
    p_value: float | None

    def to_dict(self):
        return {"i": self.i, "j": self.j, "mean_diff": self.diff, "se": self.se,
                "p_value": self.p_value}


def pairwise_from_means(means, ns, ms_error, df_error=None):
    """All ordered pairs ``(i, j)``, ``i != j``: ``mean_i - mean_j`` and its SE.

    ``SE = sqrt(MSE * (1/n_i + 1/n_j))``, which is ``sqrt(2*MSE/n)`` for
    balanced groups.  With ``df_error`` given, an unadjusted two-sided
    t-test p-value is attached.
    """
    if ms_error < 0:
        raise ParameterError("ms_error must be >= 0")
    out = []
    k = len(means)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            diff = float(means[i] - means[j])
            se = math.sqrt(ms_error * (1.0 / ns[i] + 1.0 / ns[j]))
            p = None
            if df_error is not None:
                if se > 0:
                    p = t_sf_two_sided(diff / se, df_error)
                else:
                    p = 1.0 if diff == 0 else 0.0
            out.append(PairwiseDiff(i, j, diff, se, p))
    return out


def pairwise_mean_diff(groups, ms_error=None):
    """Pairwise differences of group means; MSE defaults to the ANOVA error."""
    arrs = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    df_e = int(sum(a.size for a in arrs) - len(arrs))
    if ms_error is None:
        ms_error = one_way_anova(arrs).ms_error
    return pairwise_from_means([a.mean() for a in arrs], [a.size for a in arrs],
                               ms_error, df_e if df_e > 0 else None)
