"""Regression and likelihood estimators for network outcome models."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .network import DirectedNetwork, exposure
from .numutil import design_condition, golden_section_maximize, log1pexp, sigmoid, spectral_radius
from .outcomes import STABILITY_MARGIN, PanelDataset

CONDITION_LIMIT = 1e10
SCORE_TOL = 1e-8
MAX_IRLS_ITER = 100

ALTER_TERMS = ("contemporaneous", "lag1", "lag2", "sum", "difference")
STRATA = ("none", "adopters", "non-adopters")


class CollinearityError(ValueError):
    """The design matrix has (near-)linearly dependent columns."""


class SeparationError(ValueError):
    """The logistic likelihood has no finite maximizer for these data."""


class StratumError(ValueError):
    """A prior-state stratum is empty or has a single outcome class."""


class BoundaryWarning(UserWarning):
    """A likelihood optimum sits against the edge of the stability region."""


@dataclass(frozen=True)
class Term:
    name: str
    estimate: float
    std_error: float


@dataclass(frozen=True)
class FitResult:
    """Named coefficient estimates with convergence diagnostics."""

    terms: tuple[Term, ...]
    converged: bool
    iterations: int
    log_likelihood: float | None = None
    ridge: float | None = None

    def names(self) -> list[str]:
        return [t.name for t in self.terms]

    def _term(self, name: str) -> Term:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(f"no term named {name!r}; available: {self.names()}")

    def estimate(self, name: str) -> float:
        return self._term(name).estimate

    def std_error(self, name: str) -> float:
        return self._term(name).std_error


def _as_design(x, y, names):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("design matrix must be 2-d")
    if y.ndim != 1 or y.shape[0] != x.shape[0]:
        raise ValueError(
            f"outcome length {y.shape} does not match design rows {x.shape[0]}"
        )
    if names is None:
        names = [f"x{j}" for j in range(x.shape[1])]
    names = list(names)
    if len(names) != x.shape[1]:
        raise ValueError("one name per design column is required")
    return x, y, names


def _check_collinearity(x, names):
    cond, null_vec = design_condition(x)
    if cond > CONDITION_LIMIT:
        loadings = np.abs(null_vec)
        offenders = [
            names[j] for j in range(len(names)) if loadings[j] >= 0.1 * loadings.max()
        ]
        raise CollinearityError(
            f"design columns are collinear (condition number {cond:.3e}); "
            f"offending columns: {offenders}"
        )


def fit_ols(x, y, names=None) -> FitResult:
    """Ordinary least squares with classical standard errors."""
    x, y, names = _as_design(x, y, names)
    n, p = x.shape
    if n <= p:
        raise ValueError(f"need more rows than columns, got {n} rows for {p} columns")
    _check_collinearity(x, names)
    beta, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    rss = float(resid @ resid)
    sigma2 = rss / (n - p)
    _, s, vt = np.linalg.svd(x, full_matrices=False)
    xtx_inv = (vt.T / s**2) @ vt
    se = np.sqrt(np.clip(sigma2 * np.diag(xtx_inv), 0.0, None))
    ll = -0.5 * n * (math.log(2.0 * math.pi * max(rss, 1e-300) / n) + 1.0)
    terms = tuple(Term(nm, float(b), float(e)) for nm, b, e in zip(names, beta, se))
    return FitResult(terms, converged=True, iterations=1, log_likelihood=ll)


def _logistic_loglik(x, y, beta, lam):
    eta = x @ beta
    ll = float(y @ eta - log1pexp(eta).sum())
    if lam:
        ll -= 0.5 * lam * float(beta @ beta)
    return ll


def _irls(x, y, lam, tol, max_iter):
    n, p = x.shape
    beta = np.zeros(p)
    ll = _logistic_loglik(x, y, beta, lam)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = x @ beta
        pr = sigmoid(eta)
        score = x.T @ (y - pr)
        if lam:
            score = score - lam * beta
        if np.linalg.norm(score) < tol:
            converged = True
            break
        wvec = np.clip(pr * (1.0 - pr), 1e-12, None)
        h = (x * wvec[:, None]).T @ x
        if lam:
            h = h + lam * np.eye(p)
        step = np.linalg.solve(h, score)
        stride = 1.0
        for _half in range(40):
            cand = beta + stride * step
            ll_cand = _logistic_loglik(x, y, cand, lam)
            if ll_cand >= ll - 1e-12:
                break
            stride *= 0.5
        beta = beta + stride * step
        ll = ll_cand
    eta = x @ beta
    pr = sigmoid(eta)
    return beta, pr, eta, it, converged


def _looks_separated(eta, y):
    margins = np.where(y > 0.5, eta, -eta)
    return bool(np.all(margins > 0.0) and margins.min() > 5.0)


def fit_logistic(x, y, names=None, ridge=None, tol=SCORE_TOL, max_iter=MAX_IRLS_ITER) -> FitResult:
    """Logistic regression by iteratively reweighted least squares.

    Convergence is declared when the score norm falls below tol. Perfect
    separation (including a single-class outcome) raises SeparationError
    unless a ridge penalty is supplied, in which case the penalized fit is
    returned with the penalty recorded on the result.
    """
    x, y, names = _as_design(x, y, names)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("logistic outcomes must be 0/1 valued")
    if ridge is not None and not ridge > 0.0:
        raise ValueError("ridge penalty must be positive when supplied")
    _check_collinearity(x, names)

    degenerate = y.min() == y.max()
    if degenerate and ridge is None:
        raise SeparationError(
            "all outcomes are identical; the likelihood has no finite maximum"
        )
    lam = 0.0
    if not degenerate:
        beta, pr, eta, it, converged = _irls(x, y, 0.0, tol, max_iter)
        # the score also vanishes when coefficients diverge and the fitted
        # probabilities saturate, so separation must be checked even after
        # a nominally converged run
        if _looks_separated(eta, y):
            if ridge is None:
                raise SeparationError(
                    "perfect separation detected; coefficients diverge "
                    "(pass ridge= to fit a penalized model instead)"
                )
            lam = float(ridge)
    else:
        converged = False
        lam = float(ridge)
    if lam:
        beta, pr, eta, it, converged = _irls(x, y, lam, tol, max_iter)

    wvec = np.clip(pr * (1.0 - pr), 1e-12, None)
    h = (x * wvec[:, None]).T @ x
    if lam:
        h = h + lam * np.eye(x.shape[1])
    cov = np.linalg.inv(h)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    ll = _logistic_loglik(x, y, beta, 0.0)
    terms = tuple(Term(nm, float(b), float(e)) for nm, b, e in zip(names, beta, se))
    return FitResult(
        terms,
        converged=converged,
        iterations=it,
        log_likelihood=ll,
        ridge=lam if lam else None,
    )


# ===== directional exposure regression =====


@dataclass(frozen=True)
class QadResult:
    """Forward and reverse exposure coefficients from one regression."""

    forward: float
    reverse: float
    difference: float
    family: str

    def __post_init__(self):
        if self.difference != self.forward - self.reverse:
            raise ValueError("difference must equal forward - reverse exactly")


def qad_fit(net: DirectedNetwork, y, family: str = "linear") -> QadResult:
    """Regress y on its own forward and reverse exposures plus an intercept.

    family 'linear' fits least squares on continuous y; 'logistic' fits a
    logit on 0/1 y. A symmetric network makes the two exposure columns
    identical and raises CollinearityError.
    """
    if family not in ("linear", "logistic"):
        raise ValueError(f"family must be 'linear' or 'logistic', got {family!r}")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (net.n,):
        raise ValueError(f"outcome must have shape ({net.n},), got {y.shape}")
    fwd = exposure(net, y, "forward")
    rev = exposure(net, y, "reverse")
    design = np.column_stack([np.ones(net.n), fwd, rev])
    names = ["intercept", "forward", "reverse"]
    if family == "linear":
        fit = fit_ols(design, y, names)
    else:
        fit = fit_logistic(design, y, names)
    f = fit.estimate("forward")
    r = fit.estimate("reverse")
    return QadResult(forward=f, reverse=r, difference=f - r, family=family)


# ===== autoregressive maximum likelihood =====


def _gauss_const(n):
    return -0.5 * n * (math.log(2.0 * math.pi) + 1.0)


def sar_loglik(net: DirectedNetwork, z, rho1: float, rho2: float = 0.0) -> float:
    """Gaussian log-likelihood at (rho1, rho2), profiled over the noise variance."""
    z = np.asarray(z, dtype=np.float64)
    n = net.n
    w = net.to_dense()
    a = np.eye(n) - rho1 * w - rho2 * w.T
    az = a @ z
    sig2 = float(az @ az) / n
    if sig2 <= 0.0:
        return -math.inf
    sign, logdet = np.linalg.slogdet(a)
    if sign <= 0:
        return -math.inf
    return _gauss_const(n) - 0.5 * n * math.log(sig2) + logdet


def _one_rho_mle(net, z):
    n = net.n
    w = net.to_dense()
    lam = np.linalg.eigvals(w)
    sr = float(np.max(np.abs(lam))) if n else 0.0
    bound = STABILITY_MARGIN / sr if sr > 1e-12 else 100.0
    wz = w @ z
    zz = float(z @ z)
    a = float(z @ wz)
    b = float(wz @ wz)
    evals = [0]

    def prof(rho):
        evals[0] += 1
        sig2 = (zz - 2.0 * rho * a + rho * rho * b) / n
        if sig2 <= 0.0:
            return -math.inf
        logdet = float(np.log(np.abs(1.0 - rho * lam)).sum())
        return _gauss_const(n) - 0.5 * n * math.log(sig2) + logdet

    lo, hi = -bound + 1e-9, bound - 1e-9
    grid = np.linspace(lo, hi, 41)
    vals = [prof(r) for r in grid]
    best = int(np.argmax(vals))
    g_lo = grid[max(best - 1, 0)]
    g_hi = grid[min(best + 1, len(grid) - 1)]
    rho_hat, ll, gevals = golden_section_maximize(prof, g_lo, g_hi, tol=1e-10)

    if bound - abs(rho_hat) < 0.01 * bound:
        warnings.warn(
            f"rho estimate {rho_hat:.4f} is within 1% of the stability bound "
            f"{bound:.4f}",
            BoundaryWarning,
        )
    h = max(1e-6, 1e-5 * bound)
    d2 = (prof(rho_hat + h) - 2.0 * prof(rho_hat) + prof(rho_hat - h)) / h**2
    se = math.sqrt(-1.0 / d2) if d2 < 0 else math.inf
    sig2_hat = (zz - 2.0 * rho_hat * a + rho_hat * rho_hat * b) / n
    sd_hat = math.sqrt(sig2_hat)
    sd_se = sd_hat / math.sqrt(2.0 * n)
    terms = (
        Term("rho", float(rho_hat), float(se)),
        Term("noise_sd", float(sd_hat), float(sd_se)),
    )
    return FitResult(terms, converged=True, iterations=evals[0], log_likelihood=float(ll))


def _two_rho_mle(net, z):
    n = net.n
    w = net.to_dense()
    wt = w.T
    wz = w @ z
    wtz = wt @ z
    zz = float(z @ z)
    c1 = float(z @ wz)
    c2 = float(z @ wtz)
    c11 = float(wz @ wz)
    c12 = float(wz @ wtz)
    c22 = float(wtz @ wtz)
    evals = [0]

    def sig2_of(r1, r2):
        return (
            zz
            - 2.0 * r1 * c1
            - 2.0 * r2 * c2
            + r1 * r1 * c11
            + 2.0 * r1 * r2 * c12
            + r2 * r2 * c22
        ) / n

    def prof(r1, r2):
        evals[0] += 1
        sig2 = sig2_of(r1, r2)
        if sig2 <= 0.0:
            return -math.inf
        sign, logdet = np.linalg.slogdet(np.eye(n) - r1 * w - r2 * wt)
        if sign <= 0:
            return -math.inf
        return _gauss_const(n) - 0.5 * n * math.log(sig2) + logdet

    def stable(r1, r2):
        # called many times inside the line search, so the cheap iterative
        # radius estimate is used instead of a full eigendecomposition
        return spectral_radius(r1 * w + r2 * wt, exact_max_n=0, iters=80) < STABILITY_MARGIN

    sr_w = spectral_radius(w)
    axis_bound = STABILITY_MARGIN / sr_w if sr_w > 1e-12 else 100.0

    def t_bound(r1c, r2c, d1, d2, direction):
        # Expand from the (stable) current point, then bisect the edge.
        step = axis_bound / 4.0
        t_stable = 0.0
        t = direction * step
        for _ in range(30):
            if stable(r1c + t * d1, r2c + t * d2):
                t_stable = t
                t += direction * step
                step *= 2.0
            else:
                break
        else:
            return t_stable
        t_bad = t
        for _ in range(25):
            mid = 0.5 * (t_stable + t_bad)
            if stable(r1c + mid * d1, r2c + mid * d2):
                t_stable = mid
            else:
                t_bad = mid
        return t_stable

    grid = np.linspace(-axis_bound + 1e-9, axis_bound - 1e-9, 20)
    vals = [prof(r, 0.0) for r in grid]
    r1 = float(grid[int(np.argmax(vals))])
    r2 = 0.0
    # the two coefficients are often strongly correlated, so the line
    # searches alternate between the axes and the diagonals; axis-only
    # descent crawls along the ridge and stalls short of the optimum
    half = math.sqrt(0.5)
    directions = ((1.0, 0.0), (0.0, 1.0), (half, half), (half, -half))
    for _round in range(40):
        moved = 0.0
        for d1, d2 in directions:
            hi = t_bound(r1, r2, d1, d2, +1.0)
            lo = t_bound(r1, r2, d1, d2, -1.0)
            if hi - lo < 1e-12:
                continue
            shrink = 1e-6 * (hi - lo)

            def slice_f(t, d1=d1, d2=d2):
                return prof(r1 + t * d1, r2 + t * d2)

            t_new, _, _ = golden_section_maximize(
                slice_f, lo + shrink, hi - shrink, tol=1e-7
            )
            r1 += t_new * d1
            r2 += t_new * d2
            moved = max(moved, abs(t_new))
        if moved < 1e-6:
            break
    # boundary proximity of the final estimate, measured along its own ray
    radius = math.hypot(r1, r2)
    if radius > 1e-12:
        t_edge = t_bound(0.0, 0.0, r1 / radius, r2 / radius, +1.0)
        if radius > 0.99 * t_edge:
            warnings.warn(
                f"rho estimate ({r1:.4f}, {r2:.4f}) is within 1% of the "
                "stability region boundary",
                BoundaryWarning,
            )
    ll = prof(r1, r2)
    h = 1e-4
    f0 = ll
    f_pp = prof(r1 + h, r2 + h)
    f_pm = prof(r1 + h, r2 - h)
    f_mp = prof(r1 - h, r2 + h)
    f_mm = prof(r1 - h, r2 - h)
    d11 = (prof(r1 + h, r2) - 2.0 * f0 + prof(r1 - h, r2)) / h**2
    d22 = (prof(r1, r2 + h) - 2.0 * f0 + prof(r1, r2 - h)) / h**2
    d12 = (f_pp - f_pm - f_mp + f_mm) / (4.0 * h**2)
    hess = np.array([[d11, d12], [d12, d22]])
    try:
        cov = np.linalg.inv(-hess)
        ses = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        if not np.all(np.isfinite(ses)):
            ses = np.array([math.inf, math.inf])
    except np.linalg.LinAlgError:
        ses = np.array([math.inf, math.inf])
    sd_hat = math.sqrt(sig2_of(r1, r2))
    terms = (
        Term("rho1", r1, float(ses[0])),
        Term("rho2", r2, float(ses[1])),
        Term("noise_sd", sd_hat, sd_hat / math.sqrt(2.0 * n)),
    )
    return FitResult(terms, converged=True, iterations=evals[0], log_likelihood=float(ll))


def sar_mle(net: DirectedNetwork, z, mode: str = "one-rho") -> FitResult:
    """Maximum-likelihood autoregression coefficients from one outcome vector.

    mode 'one-rho' estimates a single forward coefficient; 'two-rho'
    estimates forward and reverse coefficients jointly. The log-determinant
    term is exact and the search is confined to the stability region; an
    optimum within 1% of its boundary triggers a BoundaryWarning. Standard
    errors come from the curvature of the profiled log-likelihood.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (net.n,):
        raise ValueError(f"outcome must have shape ({net.n},), got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("outcome contains non-finite values")
    if mode == "one-rho":
        return _one_rho_mle(net, z)
    if mode == "two-rho":
        return _two_rho_mle(net, z)
    raise ValueError(f"mode must be 'one-rho' or 'two-rho', got {mode!r}")


# ===== longitudinal logistic model =====


@dataclass(frozen=True)
class CfModelSpec:
    """Term selection for the pooled transition logit.

    alter_terms picks exposure regressors: 'contemporaneous' (outcome-wave
    exposure), 'lag1', 'lag2', or the reparameterized 'sum' / 'difference'
    of contemporaneous and lag1. Raw contemporaneous/lag1 cannot be mixed
    with sum/difference in one fit. Stratifying on the prior state drops
    the ego-lag term, which would be constant within a stratum.
    """

    alter_terms: tuple[str, ...]
    include_ego_lag: bool = True
    covariate_columns: tuple[int, ...] | None = None
    stratify_on_prior_state: str = "none"

    def __post_init__(self):
        terms = tuple(self.alter_terms)
        object.__setattr__(self, "alter_terms", terms)
        if not terms:
            raise ValueError("at least one alter term is required")
        unknown = [t for t in terms if t not in ALTER_TERMS]
        if unknown:
            raise ValueError(f"unknown alter terms {unknown}; valid: {list(ALTER_TERMS)}")
        if len(set(terms)) != len(terms):
            raise ValueError("alter terms must be unique")
        if {"sum", "difference"} & set(terms) and {"contemporaneous", "lag1"} & set(terms):
            raise ValueError(
                "sum/difference terms cannot be combined with raw "
                "contemporaneous/lag1 terms"
            )
        if self.stratify_on_prior_state not in STRATA:
            raise ValueError(
                f"stratify_on_prior_state must be one of {STRATA}, "
                f"got {self.stratify_on_prior_state!r}"
            )
        if self.stratify_on_prior_state != "none" and self.include_ego_lag:
            raise ValueError(
                "ego lag is constant within a prior-state stratum; "
                "set include_ego_lag=False when stratifying"
            )
        if self.covariate_columns is not None:
            object.__setattr__(
                self, "covariate_columns", tuple(int(c) for c in self.covariate_columns)
            )


def fit_cf_model(panel: PanelDataset, spec: CfModelSpec) -> FitResult:
    """Pooled logistic fit of wave-to-wave transitions.

    Each transition contributes one row per node: the outcome is the node's
    next-wave state; regressors are an intercept, optionally the node's own
    current state, the selected alter exposure terms and next-wave
    covariates. Transitions that lack the waves needed by a lag are
    dropped; 'lag2' therefore requires at least three waves.
    """
    t_waves = panel.n_waves
    if t_waves < 2:
        raise ValueError("panel must contain at least two waves")
    needs_lag2 = "lag2" in spec.alter_terms
    if needs_lag2 and t_waves < 3:
        raise ValueError("lag2 terms require at least three waves")
    if spec.covariate_columns is not None:
        bad = [c for c in spec.covariate_columns if not 0 <= c < panel.n_covariates]
        if bad:
            raise ValueError(
                f"covariate columns {bad} out of range for p={panel.n_covariates}"
            )
        cov_cols = spec.covariate_columns
    else:
        cov_cols = tuple(range(panel.n_covariates))

    start = 1 if needs_lag2 else 0
    outcome_parts = []
    column_parts = []
    names = ["intercept"]
    if spec.include_ego_lag:
        names.append("ego_lag")
    names += [f"alter_{t}" for t in spec.alter_terms]
    names += [f"x{c + 1}" for c in cov_cols]

    for t in range(start, t_waves - 1):
        cur = panel.waves[t]
        nxt = panel.waves[t + 1]
        y_next = nxt.outcomes.astype(np.float64)
        y_cur = cur.outcomes.astype(np.float64)
        contemp = exposure(nxt.network, y_next, "forward")
        lag1 = exposure(cur.network, y_cur, "forward")
        cols = [np.ones(panel.n)]
        if spec.include_ego_lag:
            cols.append(y_cur)
        for term in spec.alter_terms:
            if term == "contemporaneous":
                cols.append(contemp)
            elif term == "lag1":
                cols.append(lag1)
            elif term == "lag2":
                prev = panel.waves[t - 1]
                cols.append(exposure(prev.network, prev.outcomes.astype(np.float64), "forward"))
            elif term == "sum":
                cols.append(contemp + lag1)
            elif term == "difference":
                cols.append(contemp - lag1)
        for c in cov_cols:
            cols.append(nxt.covariates[:, c])
        block = np.column_stack(cols)
        if spec.stratify_on_prior_state == "non-adopters":
            mask = y_cur == 0.0
        elif spec.stratify_on_prior_state == "adopters":
            mask = y_cur == 1.0
        else:
            mask = np.ones(panel.n, dtype=bool)
        outcome_parts.append(y_next[mask])
        column_parts.append(block[mask])

    y_all = np.concatenate(outcome_parts)
    x_all = np.vstack(column_parts)
    if spec.stratify_on_prior_state != "none":
        if y_all.size == 0 or y_all.min() == y_all.max():
            raise StratumError(
                f"stratum {spec.stratify_on_prior_state!r} needs both outcome "
                f"classes, got {y_all.size} rows"
            )
    return fit_logistic(x_all, y_all, names)


def sum_peer_effects(fit: FitResult, terms) -> float:
    """Sum of the named coefficient estimates; an empty selection sums to zero."""
    return math.fsum(fit.estimate(t) for t in terms)
