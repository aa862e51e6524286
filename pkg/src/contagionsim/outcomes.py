"""Generative models for node outcomes: autoregressive, pairwise-energy, panel."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .network import DirectedNetwork, exposure
from .numutil import sigmoid, spectral_radius

STABILITY_MARGIN = 0.99
EXACT_ENUMERATION_LIMIT = 14
SOLVE_RESIDUAL_TOL = 1e-10


class StabilityError(ValueError):
    """The autoregressive system's spectral radius is at or beyond the margin."""


class ConvergenceWarning(UserWarning):
    """An iterative scheme stopped before reaching a fixed point."""


# ===== simultaneous autoregressive process =====


@dataclass(frozen=True)
class SarParams:
    """Coefficients of the simultaneous autoregressive outcome process.

    rho1 weights exposure along out-edges (the nodes an ego points at),
    rho2 weights exposure along in-edges (the nodes pointing at the ego).
    Noise is iid Gaussian with standard deviation noise_sd.
    """

    rho1: float
    rho2: float = 0.0
    noise_sd: float = 1.0

    def __post_init__(self):
        vals = [self.rho1, self.rho2, self.noise_sd]
        if not np.all(np.isfinite(vals)):
            raise ValueError("autoregressive parameters must be finite")
        if self.noise_sd <= 0:
            raise ValueError("noise_sd must be positive")


def _interaction_matrix(net: DirectedNetwork, params: SarParams) -> np.ndarray:
    w = net.to_dense()
    return params.rho1 * w + params.rho2 * w.T


def check_sar_stability(net: DirectedNetwork, params: SarParams) -> float:
    """Spectral radius of the interaction matrix; raises if >= the margin."""
    sr = spectral_radius(_interaction_matrix(net, params))
    if sr >= STABILITY_MARGIN:
        raise StabilityError(
            f"interaction spectral radius {sr:.4f} >= {STABILITY_MARGIN}; "
            "the process has no stable solution"
        )
    return sr


def sar_solve(net: DirectedNetwork, params: SarParams, u) -> np.ndarray:
    """Solve z = rho1*W z + rho2*W' z + u for z given the noise vector u.

    u may be one vector of length n or a matrix of column vectors. The
    solve residual is checked against a 1e-10 max-norm tolerance.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape[0] != net.n or u.ndim not in (1, 2):
        raise ValueError(f"noise must have n={net.n} rows, got shape {u.shape}")
    check_sar_stability(net, params)
    a = np.eye(net.n) - _interaction_matrix(net, params)
    z = np.linalg.solve(a, u)
    resid = np.max(np.abs(u - a @ z))
    if resid >= SOLVE_RESIDUAL_TOL:
        raise np.linalg.LinAlgError(
            f"solve residual {resid:.3e} exceeds {SOLVE_RESIDUAL_TOL:.0e}"
        )
    return z


def sar_generate(
    net: DirectedNetwork,
    params: SarParams,
    rng: np.random.Generator,
    size: int | None = None,
    return_noise: bool = False,
):
    """Draw outcome vector(s) from the autoregressive process.

    With size=None returns one vector of length n; with size=k returns an
    (n, k) matrix of independent draws sharing one matrix factorization.
    """
    shape = (net.n,) if size is None else (net.n, int(size))
    u = rng.normal(0.0, params.noise_sd, size=shape)
    z = sar_solve(net, params, u)
    return (z, u) if return_noise else z


def sar_power_series(net: DirectedNetwork, params: SarParams, u, order: int) -> np.ndarray:
    """Truncated series u + A u + A^2 u + ... + A^order u with A the interaction matrix.

    Converges to the exact solution as order grows when the process is
    stable; no stability check is performed here.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    u = np.asarray(u, dtype=np.float64)
    if u.shape[0] != net.n:
        raise ValueError(f"noise must have n={net.n} rows, got shape {u.shape}")
    w = net.to_dense()
    wt = w.T
    term = u.copy()
    acc = u.copy()
    for _ in range(order):
        term = params.rho1 * (w @ term) + params.rho2 * (wt @ term)
        acc = acc + term
    return acc


def dichotomize(z, threshold: float) -> np.ndarray:
    """Binary indicator of values strictly above the threshold."""
    return (np.asarray(z, dtype=np.float64) > threshold).astype(np.int64)


# ===== pairwise-energy binary process =====


@dataclass(frozen=True)
class IsingParams:
    """Coefficients of the binary pairwise-energy model.

    alpha scores a node being active, beta scores disagreement across each
    out-edge, gamma scores joint activity across each out-edge.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.alpha, self.beta, self.gamma])):
            raise ValueError("energy parameters must be finite")


def _validate_binary(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"state vector must have shape ({n},), got {y.shape}")
    y = y.astype(np.int64)
    if y.size and not np.isin(y, (0, 1)).all():
        raise ValueError("state vector must be 0/1 valued")
    return y


def ising_node_energy(net: DirectedNetwork, y, params: IsingParams, i: int) -> float:
    """Energy contribution of node i given the full state vector.

    alpha * y_i plus, over i's out-edges, beta * w * (y_i - y_j)^2 and
    gamma * w * y_i * y_j.
    """
    y = _validate_binary(y, net.n)
    if not 0 <= i < net.n:
        raise ValueError(f"node index {i} out of range for n={net.n}")
    mask = net.src == i
    yj = y[net.dst[mask]]
    w = net.weight[mask]
    yi = y[i]
    return float(
        params.alpha * yi
        + params.beta * np.sum(w * (yi - yj) ** 2)
        + params.gamma * np.sum(w * yi * yj)
    )


def ising_total_energy(net: DirectedNetwork, y, params: IsingParams) -> float:
    """Sum of node energies; the pair terms make it invariant to edge reversal."""
    y = _validate_binary(y, net.n)
    ys = y[net.src]
    yd = y[net.dst]
    return float(
        params.alpha * y.sum()
        + params.beta * np.sum(net.weight * (ys - yd) ** 2)
        + params.gamma * np.sum(net.weight * ys * yd)
    )


def enumerate_states(n: int) -> np.ndarray:
    """All 2^n binary states; row index encodes the state with bit j = node j."""
    if n > EXACT_ENUMERATION_LIMIT:
        raise ValueError(
            f"exact enumeration is limited to n <= {EXACT_ENUMERATION_LIMIT}, got {n}"
        )
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.int64)


def state_index(y) -> int:
    """Row index of a binary state under the enumerate_states encoding."""
    y = np.asarray(y, dtype=np.int64)
    return int(np.dot(y, 1 << np.arange(y.size)))


def ising_exact_distribution(net: DirectedNetwork, params: IsingParams) -> np.ndarray:
    """Exact probability of every configuration, normalized over all 2^n states.

    Probability is proportional to exp(total energy). Index encoding matches
    enumerate_states/state_index.
    """
    states = enumerate_states(net.n)
    logw = params.alpha * states.sum(axis=1).astype(np.float64)
    if net.m > 0:
        s = states[:, net.src]
        d = states[:, net.dst]
        logw = logw + params.beta * ((s - d) ** 2 @ net.weight)
        logw = logw + params.gamma * ((s * d) @ net.weight)
    logw -= logw.max()
    probs = np.exp(logw)
    probs /= probs.sum()
    return probs


def _symmetrized_neighbors(net: DirectedNetwork):
    """Per-node neighbor indices and weights of W + W', plus weight totals."""
    idx: list[list[int]] = [[] for _ in range(net.n)]
    wts: list[list[float]] = [[] for _ in range(net.n)]
    for s, d, w in zip(net.src.tolist(), net.dst.tolist(), net.weight.tolist()):
        idx[s].append(d)
        wts[s].append(w)
        idx[d].append(s)
        wts[d].append(w)
    nbr_idx = [np.asarray(ix, dtype=np.int64) for ix in idx]
    nbr_w = [np.asarray(wv, dtype=np.float64) for wv in wts]
    w_sum = np.array([wv.sum() for wv in nbr_w])
    return nbr_idx, nbr_w, w_sum


def ising_gibbs_sample(
    net: DirectedNetwork,
    params: IsingParams,
    sweeps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """State after the given number of sequential single-site sweeps.

    Each site update draws Y_i = 1 with probability
    exp(E[Y_i=1]) / (exp(E[Y_i=1]) + exp(E[Y_i=0])) holding the rest fixed,
    visiting sites in index order. Start state is uniform random.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    nbr_idx, nbr_w, w_sum = _symmetrized_neighbors(net)
    y = rng.integers(0, 2, size=net.n)
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    coef = gamma - 2.0 * beta
    for _ in range(sweeps):
        for i in range(net.n):
            dot = float(nbr_w[i] @ y[nbr_idx[i]]) if nbr_idx[i].size else 0.0
            f = alpha + beta * w_sum[i] + coef * dot
            if f >= 0:
                p = 1.0 / (1.0 + math.exp(-f))
            else:
                e = math.exp(f)
                p = e / (1.0 + e)
            y[i] = 1 if rng.random() < p else 0
    return y.astype(np.int64)


def ising_gibbs_states(
    net: DirectedNetwork,
    params: IsingParams,
    n_states: int,
    rng: np.random.Generator,
    burn_in: int = 1000,
    thin: int = 1,
    chains: int = 1,
) -> np.ndarray:
    """Retained post-burn-in states for distribution checks, (n_states, n).

    Runs the same sequential-sweep sampler, optionally as several parallel
    chains whose retained states are interleaved.
    """
    if n_states < 1 or thin < 1 or chains < 1 or burn_in < 0:
        raise ValueError("n_states, thin, chains must be >= 1 and burn_in >= 0")
    nbr_idx, nbr_w, w_sum = _symmetrized_neighbors(net)
    per_chain = -(-n_states // chains)
    y = rng.integers(0, 2, size=(chains, net.n))
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    coef = gamma - 2.0 * beta
    kept = []
    total = burn_in + per_chain * thin
    for sweep in range(total):
        for i in range(net.n):
            if nbr_idx[i].size:
                dot = y[:, nbr_idx[i]] @ nbr_w[i]
            else:
                dot = np.zeros(chains)
            p = sigmoid(alpha + beta * w_sum[i] + coef * dot)
            y[:, i] = rng.random(chains) < p
        if sweep >= burn_in and (sweep - burn_in) % thin == 0:
            kept.append(y.copy())
    out = np.concatenate(kept, axis=0)
    return out[:n_states].astype(np.int64)


# ===== longitudinal binary panel =====


@dataclass(frozen=True)
class PanelGenSpec:
    """Transition model for a binary panel on a fixed network.

    Wave 1 is iid Bernoulli(initial_prevalence). Each later wave is drawn
    from a logistic transition with intercept mu, own-lag alpha_ego, lagged
    forward exposure beta_lag, same-wave forward exposure gamma_contemp and
    covariate coefficients delta on iid standard normal covariates.
    """

    mu: float
    alpha_ego: float
    beta_lag: float
    gamma_contemp: float
    delta: np.ndarray = field(default_factory=lambda: np.empty(0))
    initial_prevalence: float = 0.5
    waves: int = 2

    def __post_init__(self):
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=np.float64))
        vals = [self.mu, self.alpha_ego, self.beta_lag, self.gamma_contemp]
        if not np.all(np.isfinite(vals)) or not np.all(np.isfinite(self.delta)):
            raise ValueError("panel coefficients must be finite")
        if self.delta.ndim != 1:
            raise ValueError("delta must be a 1-d coefficient vector")
        if not 0.0 <= self.initial_prevalence <= 1.0:
            raise ValueError("initial_prevalence must be in [0, 1]")
        if self.waves < 2:
            raise ValueError("a panel needs at least 2 waves")


@dataclass(frozen=True)
class Wave:
    """One observation wave: the network plus binary outcomes and covariates."""

    network: DirectedNetwork
    outcomes: np.ndarray
    covariates: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "outcomes", _validate_binary(self.outcomes, self.network.n))
        cov = np.asarray(self.covariates, dtype=np.float64)
        if cov.ndim != 2 or cov.shape[0] != self.network.n:
            raise ValueError(
                f"covariates must be ({self.network.n}, p), got {cov.shape}"
            )
        object.__setattr__(self, "covariates", cov)


@dataclass(frozen=True)
class PanelDataset:
    """Ordered waves sharing one node set."""

    waves: tuple[Wave, ...]

    def __post_init__(self):
        waves = tuple(self.waves)
        object.__setattr__(self, "waves", waves)
        if len(waves) < 1:
            raise ValueError("panel must contain at least one wave")
        n = waves[0].network.n
        p = waves[0].covariates.shape[1]
        for w in waves:
            if w.network.n != n:
                raise ValueError("all waves must share the same node count")
            if w.covariates.shape[1] != p:
                raise ValueError("all waves must share the same covariate count")

    @property
    def n(self) -> int:
        return self.waves[0].network.n

    @property
    def n_waves(self) -> int:
        return len(self.waves)

    @property
    def n_covariates(self) -> int:
        return self.waves[0].covariates.shape[1]


def generate_panel(
    net: DirectedNetwork,
    spec: PanelGenSpec,
    rng: np.random.Generator,
    max_refresh: int = 100,
) -> PanelDataset:
    """Simulate a binary panel whose transitions follow the logistic model.

    The same-wave exposure term makes the transition self-referential, so
    wave t+1 is drawn in two stages that share one uniform draw per node:
    first a provisional state from the lagged terms alone, then repeated
    synchronous refreshes that add gamma times the forward exposure of the
    current wave state. With the uniforms frozen the refresh map is monotone
    for gamma >= 0 and reaches a fixed point in at most n passes, at which
    every node satisfies Y_i = 1{u_i < sigmoid(eta_i + gamma * exposure_i)}
    with the realized same-wave exposure. For gamma < 0 the pass count is
    capped and a ConvergenceWarning is issued if the state still cycles.
    """
    n = net.n
    p = spec.delta.size
    y = (rng.random(n) < spec.initial_prevalence).astype(np.int64)
    x = rng.standard_normal((n, p)) if p else np.zeros((n, 0))
    waves = [Wave(net, y, x)]
    for _t in range(spec.waves - 1):
        x_next = rng.standard_normal((n, p)) if p else np.zeros((n, 0))
        eta = (
            spec.mu
            + spec.alpha_ego * y
            + spec.beta_lag * exposure(net, y, "forward")
        )
        if p:
            eta = eta + x_next @ spec.delta
        u = rng.random(n)
        v = (u < sigmoid(eta)).astype(np.int64)
        if spec.gamma_contemp != 0.0:
            for _ in range(max_refresh):
                nxt = (
                    u < sigmoid(eta + spec.gamma_contemp * exposure(net, v, "forward"))
                ).astype(np.int64)
                if np.array_equal(nxt, v):
                    break
                v = nxt
            else:
                warnings.warn(
                    "same-wave refresh did not reach a fixed point; "
                    "keeping the last state",
                    ConvergenceWarning,
                )
        y = v
        waves.append(Wave(net, y, x_next))
    return PanelDataset(tuple(waves))
