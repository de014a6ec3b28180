"""Discretized one-photon toy model of a decaying level.

Atomic states ``a`` with energies ``E_a`` are coupled to one-photon states
``|b, w_k>`` (energy ``E_b + w_k``) through

    <a| H |b, w_k> = g * C[a, b] * f(w_k) * sqrt(weight_k),
    f(w) = sqrt(w) * exp(-(w / w_c)**2),

where ``w_k, weight_k`` is a quadrature rule on ``[0, w_max]``. Everything
here is dense linear algebra on a few hundred to a few thousand states.

Conventions: ``Q0(z)[a, a'] = sum_b C[a,b] C[a',b] S(z - E_b)`` with
``S(w) = int_0^wmax rho(v) / (v - w) dv`` and ``rho = f**2``. The golden-rule
matrix is ``Z = Q0(E_j + i0)``, the pole solves ``E_j - z - g^2 Q0(z) = 0`` on
the second sheet and sits near ``E_j - g^2 Z``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "ModelConfig",
    "ConfigError",
    "ModelError",
    "FeshbachError",
    "ConvergenceError",
    "ToyModel",
    "SurvivalSeries",
    "FeshbachData",
    "ResolventCheck",
    "PoleResult",
    "CorollaryRow",
    "read_config",
    "parse_config",
    "build_model",
    "random_model",
    "survival_amplitude",
    "fit_decay_rate",
    "decay_fit",
    "feshbach_operator",
    "resolvent_identity_check",
    "stieltjes",
    "principal_value",
    "q0_matrix",
    "z_matrix_toy",
    "resonance_pole",
    "corollary_limit_check",
    "feshbach_suite",
]


class ConfigError(ValueError):
    """Malformed model configuration."""


class ModelError(ValueError):
    """Configuration is well formed but describes an invalid model."""


class FeshbachError(ArithmeticError):
    """The complementary block (or H - z itself) is numerically singular at z."""


class ConvergenceError(ArithmeticError):
    def __init__(self, message: str, trace: Sequence[complex] = ()):
        super().__init__(message)
        self.trace = list(trace)


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of a toy model; defaults give the two-level demo model."""

    levels: tuple[float, ...] = (-0.25, -0.0625)
    degeneracies: tuple[int, ...] | None = None
    j: int | None = None
    grid: str = "tanh"
    K: int = 400
    omega_max: float | None = None
    grid_center: float | None = None
    stretch_width: float = 0.05
    stretch_ratio: float = 20.0
    coupling: tuple[tuple[float, ...], ...] | None = None
    cutoff_scale: float = 1.0
    g: float = 0.05
    nodes: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    @property
    def level_index(self) -> int:
        return len(self.levels) - 1 if self.j is None else self.j

    def with_g(self, g: float) -> "ModelConfig":
        return replace(self, g=g)


_FLOAT_KEYS = {"omega_max", "grid_center", "stretch_width", "stretch_ratio", "cutoff_scale", "g"}
_INT_KEYS = {"j", "K"}
_FLOAT_LIST_KEYS = {"levels", "nodes", "weights"}


def parse_config(text: str, source: str = "<config>") -> ModelConfig:
    """Parse flat ``key = value`` text.

    Lists are comma separated; ``coupling`` rows are separated by ``;``.
    Lines starting with ``#`` are comments.
    """
    kwargs: dict = {}
    fields_ = set(ModelConfig.__dataclass_fields__)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected key = value, got {raw.strip()!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        if key not in fields_:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in kwargs:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                kwargs[key] = float(val)
            elif key in _INT_KEYS:
                kwargs[key] = int(val)
            elif key in _FLOAT_LIST_KEYS:
                kwargs[key] = tuple(float(t) for t in val.split(","))
            elif key == "degeneracies":
                kwargs[key] = tuple(int(t) for t in val.split(","))
            elif key == "coupling":
                kwargs[key] = tuple(
                    tuple(float(t) for t in row.split(",")) for row in val.split(";")
                )
            else:
                kwargs[key] = val
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key}: {exc}") from None
    return ModelConfig(**kwargs)


def read_config(path: str | Path) -> ModelConfig:
    path = Path(path)
    return parse_config(path.read_text(), str(path))


def config_to_text(cfg: ModelConfig) -> str:
    lines = []
    for name in ModelConfig.__dataclass_fields__:
        v = getattr(cfg, name)
        if v is None:
            continue
        if name == "coupling":
            v = ";".join(",".join(repr(float(x)) for x in row) for row in v)
        elif isinstance(v, tuple):
            v = ",".join(repr(x) for x in v)
        lines.append(f"{name} = {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- model


def coupling_amplitude(omega, scale: float = 1.0):
    """``f(w) = sqrt(w) exp(-(w/scale)^2)``."""
    omega = np.asarray(omega, dtype=float)
    return np.sqrt(omega) * np.exp(-((omega / scale) ** 2))


def spectral_density(omega, scale: float = 1.0):
    """``rho(w) = f(w)^2 = w exp(-2 (w/scale)^2)``; entire, so valid for complex w."""
    omega = np.asarray(omega)
    return omega * np.exp(-2.0 * (omega / scale) ** 2)


def _tanh_grid(K: int, upper: float, center: float, width: float, ratio: float):
    """Midpoint rule in the variable ``u = U(w)/U(upper)`` where the node density
    ``U'(w) = 1 + ratio * sech^2((w - center)/width)`` clusters nodes at ``center``."""

    def cumulative(w):
        return w + ratio * width * (np.tanh((w - center) / width) - np.tanh(-center / width))

    total = cumulative(upper)
    targets = (np.arange(K) + 0.5) / K * total
    lo = np.zeros(K)
    hi = np.full(K, upper)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = cumulative(mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * upper):
            break
    nodes = 0.5 * (lo + hi)
    density = 1.0 + ratio / np.cosh((nodes - center) / width) ** 2
    weights = total / (K * density)
    return nodes, weights


@dataclass(frozen=True, eq=False)
class ToyModel:
    """Assembled Hamiltonian. State ordering: the ``N`` atomic vacuum states,
    then for each atomic state ``b`` its ``K`` one-photon states."""

    config: ModelConfig
    energies: np.ndarray
    state_level: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    coupling: np.ndarray
    H: np.ndarray
    flags: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def g(self) -> float:
        return self.config.g

    @property
    def j(self) -> int:
        return self.config.level_index

    @property
    def E_j(self) -> float:
        return float(self.config.levels[self.j])

    @property
    def n_atomic(self) -> int:
        return len(self.energies)

    @property
    def K(self) -> int:
        return len(self.nodes)

    @property
    def dimension(self) -> int:
        return self.H.shape[0]

    @property
    def omega_max(self) -> float:
        return _omega_max(self.config)

    @property
    def level_states(self) -> np.ndarray:
        """Atomic indices belonging to the distinguished level."""
        return np.flatnonzero(self.state_level == self.j)

    @property
    def H0(self) -> np.ndarray:
        return np.diag(np.diag(self.H))

    @property
    def W(self) -> np.ndarray:
        return self.H - self.H0

    def photon_index(self, b: int, k: int) -> int:
        return self.n_atomic + b * self.K + k

    def vacuum_state(self, a: int) -> np.ndarray:
        v = np.zeros(self.dimension)
        v[a] = 1.0
        return v

    def level_vector(self, phi: Sequence[complex]) -> np.ndarray:
        """Embed a vector on the distinguished level as ``phi (x) vacuum``."""
        phi = np.asarray(phi)
        states = self.level_states
        if phi.shape != (len(states),):
            raise ValueError(f"expected {len(states)} components, got {phi.shape}")
        out = np.zeros(self.dimension, dtype=np.result_type(phi, float))
        out[states] = phi
        return out

    def with_g(self, g: float) -> "ToyModel":
        return build_model(self.config.with_g(g))

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if "eig" not in self._cache:
            try:
                self._cache["eig"] = np.linalg.eigh(self.H)
            except np.linalg.LinAlgError as exc:
                raise ArithmeticError(f"symmetric eigensolver failed (D={self.dimension}): {exc}") from exc
        return self._cache["eig"]

    def checksum(self) -> str:
        """SHA-256 of the Hamiltonian rounded to 12 decimals."""
        h = hashlib.sha256()
        h.update(np.asarray(self.H.shape, dtype=np.int64).tobytes())
        h.update(np.round(self.H, 12).astype("<f8").tobytes())
        return h.hexdigest()


def _omega_max(cfg: ModelConfig) -> float:
    if cfg.omega_max is not None:
        return float(cfg.omega_max)
    return 10.0 * (cfg.levels[cfg.level_index] - cfg.levels[0]) if cfg.level_index > 0 else 2.0


def build_model(config: ModelConfig | None = None) -> ToyModel:
    """Assemble the dense Hamiltonian. Deterministic in ``config``."""
    cfg = config or ModelConfig()
    levels = np.asarray(cfg.levels, dtype=float)
    if levels.ndim != 1 or len(levels) == 0:
        raise ModelError("need at least one level")
    if np.any(np.diff(levels) <= 0):
        raise ModelError("levels must be strictly increasing")
    if not 0 <= cfg.level_index < len(levels):
        raise ModelError(f"level index j={cfg.level_index} out of range")
    if cfg.g < 0 or not math.isfinite(cfg.g):
        raise ModelError(f"coupling strength must be >= 0, got g={cfg.g}")
    degs = cfg.degeneracies or (1,) * len(levels)
    if len(degs) != len(levels) or any(d < 1 for d in degs):
        raise ModelError("degeneracies must be positive, one per level")
    state_level = np.repeat(np.arange(len(levels)), degs)
    energies = levels[state_level]
    N = len(energies)

    upper = _omega_max(cfg)
    if cfg.nodes is not None or cfg.weights is not None:
        if cfg.nodes is None or cfg.weights is None or len(cfg.nodes) != len(cfg.weights):
            raise ModelError("explicit nodes and weights must be given together, same length")
        nodes = np.asarray(cfg.nodes, dtype=float)
        weights = np.asarray(cfg.weights, dtype=float)
    elif cfg.K < 0:
        raise ModelError("K must be >= 0")
    elif cfg.grid == "linear":
        h = upper / cfg.K if cfg.K else 0.0
        nodes = (np.arange(cfg.K) + 0.5) * h
        weights = np.full(cfg.K, h)
    elif cfg.grid == "tanh":
        if cfg.grid_center is not None:
            center = cfg.grid_center
        elif cfg.level_index > 0:
            center = levels[cfg.level_index] - levels[cfg.level_index - 1]
        else:
            center = 0.5 * upper
        nodes, weights = _tanh_grid(cfg.K, upper, center, cfg.stretch_width, cfg.stretch_ratio)
    else:
        raise ModelError(f"unknown grid kind {cfg.grid!r} (linear or tanh)")
    if np.any(np.diff(nodes) <= 0):
        raise ModelError("grid nodes must be strictly increasing")
    if np.any(weights <= 0):
        raise ModelError("quadrature weights must be positive")
    if len(nodes) and nodes[0] <= 0:
        raise ModelError("grid nodes must be positive")

    if cfg.coupling is None:
        C = np.ones((N, N)) - np.eye(N)
    else:
        C = np.asarray(cfg.coupling, dtype=float)
        if C.shape != (N, N):
            raise ModelError(f"coupling matrix must be {N}x{N}, got {C.shape}")

    K = len(nodes)
    D = N + N * K
    H = np.zeros((D, D))
    H[np.arange(N), np.arange(N)] = energies
    if K:
        photon_e = (energies[:, None] + nodes[None, :]).ravel()
        H[np.arange(N, D), np.arange(N, D)] = photon_e
        amp = coupling_amplitude(nodes, cfg.cutoff_scale) * np.sqrt(weights)
        block = cfg.g * (C[:, :, None] * amp[None, None, :]).reshape(N, N * K)
        H[:N, N:] = block
        H[N:, :N] = block.T
    flags = () if K else ("empty-continuum",)
    return ToyModel(cfg, energies, state_level, nodes, weights, C, H, flags)


def random_model(rng: np.random.Generator, max_dim: int = 50) -> ToyModel:
    """Small random model with ``D <= max_dim`` for identity checks."""
    M = int(rng.integers(2, 4))
    levels = np.sort(rng.uniform(-1.0, -0.1, M))
    while np.min(np.diff(levels)) < 0.05:
        levels = np.sort(rng.uniform(-1.0, -0.1, M))
    degs = tuple(int(d) for d in rng.integers(1, 3, M))
    N = sum(degs)
    k_max = max(1, (max_dim - N) // N)
    K = int(rng.integers(1, k_max + 1))
    C = rng.normal(size=(N, N))
    cfg = ModelConfig(
        levels=tuple(float(x) for x in levels),
        degeneracies=degs,
        j=int(rng.integers(1, M)),
        grid="linear",
        K=K,
        omega_max=float(rng.uniform(0.5, 3.0)),
        coupling=tuple(tuple(float(x) for x in row) for row in C),
        g=float(rng.uniform(0.05, 0.5)),
    )
    return build_model(cfg)


# ---------------------------------------------------------------- survival


@dataclass
class SurvivalSeries:
    times: np.ndarray
    amplitude: np.ndarray

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.amplitude)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "re_A", "im_A", "abs_A"])
        for s, a in zip(self.times, self.amplitude):
            w.writerow([repr(float(s)), repr(float(a.real)), repr(float(a.imag)), repr(float(abs(a)))])
        return buf.getvalue()


def survival_amplitude(
    model: ToyModel,
    phi1: np.ndarray,
    phi2: np.ndarray | None = None,
    times: Sequence[float] = (0.0,),
) -> SurvivalSeries:
    """``A(s) = <phi1, exp(-i s H) phi2>`` from the full eigendecomposition."""
    phi2 = phi1 if phi2 is None else phi2
    vals, vecs = model.eigensystem()
    a = vecs.T @ np.asarray(phi1)
    b = vecs.T @ np.asarray(phi2)
    weights = np.conj(a) * b
    times = np.asarray(times, dtype=float)
    amp = np.empty(times.shape, dtype=complex)
    for start in range(0, len(times), 512):
        chunk = times[start : start + 512]
        amp[start : start + 512] = np.exp(-1j * np.outer(chunk, vals)) @ weights
    return SurvivalSeries(times, amp)


def fit_decay_rate(series: SurvivalSeries) -> float:
    """Least-squares slope of ``-log|A(s)|`` against ``s``."""
    slope, _ = np.polyfit(series.times, np.log(series.modulus), 1)
    return float(-slope)


@dataclass
class DecayFit:
    rate: float
    predicted: float
    window: tuple[float, float]
    series: SurvivalSeries

    @property
    def relative_error(self) -> float:
        return abs(self.rate - self.predicted) / self.predicted


def decay_fit(model: ToyModel, samples: int = 400, window=(0.1, 0.5)) -> DecayFit:
    """Fit the amplitude decay of the (first) level state over
    ``s in window / (g^2 Im Z)`` and compare with ``g^2 Im Z``."""
    Z = z_matrix_toy(model)
    lam = np.linalg.eigvals(Z)
    im = float(np.max(lam.imag))
    if im <= 0:
        raise ModelError("Im Z has no positive eigenvalue; nothing decays")
    predicted = model.g**2 * im
    lo, hi = window[0] / predicted, window[1] / predicted
    phi = _z_eigvec(Z, int(np.argmax(lam.imag)))
    series = survival_amplitude(model, model.level_vector(phi), times=np.linspace(lo, hi, samples))
    return DecayFit(fit_decay_rate(series), predicted, (lo, hi), series)


def _z_eigvec(Z: np.ndarray, idx: int) -> np.ndarray:
    if Z.shape == (1, 1):
        return np.ones(1)
    _, vecs = np.linalg.eig(Z)
    v = vecs[:, idx]
    v = v / np.linalg.norm(v)
    if np.allclose(v.imag, 0, atol=1e-14):
        v = v.real
    return v


# ---------------------------------------------------------------- Feshbach


@dataclass
class FeshbachData:
    z: complex
    rho0: float
    p_index: np.ndarray
    F: np.ndarray


def _p_index(model: ToyModel, rho0: float) -> np.ndarray:
    states = list(model.level_states)
    if rho0 > 0:
        low = np.flatnonzero(model.nodes < rho0)
        states += [model.photon_index(a, k) for a in model.level_states for k in low]
    return np.asarray(sorted(states))


_COND_LIMIT = 1e12


def _check_conditioning(block: np.ndarray, z: complex, what: str):
    if block.size and np.linalg.cond(block) > _COND_LIMIT:
        raise FeshbachError(f"{what} is numerically singular at z={z!r}")


def feshbach_operator(model: ToyModel, z: complex, rho0: float = 0.0) -> FeshbachData:
    """``F(z) = P(H - z)P - P W Pb [Pb (H - z) Pb]^-1 Pb W P`` on ran P."""
    p = _p_index(model, rho0)
    q = np.setdiff1d(np.arange(model.dimension), p)
    H, W = model.H, model.W
    Hqq = H[np.ix_(q, q)] - z * np.eye(len(q))
    _check_conditioning(Hqq, z, "complementary block Pb (H - z) Pb")
    X = np.linalg.solve(Hqq, W[np.ix_(q, p)]) if len(q) else np.zeros((0, len(p)))
    F = H[np.ix_(p, p)] - z * np.eye(len(p)) - W[np.ix_(p, q)] @ X
    return FeshbachData(complex(z), rho0, p, F)


@dataclass
class ResolventCheck:
    scalar: float
    reconstruction: float

    @property
    def residual(self) -> float:
        return max(self.scalar, self.reconstruction)


def resolvent_identity_check(
    model: ToyModel,
    z: complex,
    phi1: np.ndarray | None = None,
    phi2: np.ndarray | None = None,
    rho0: float = 0.0,
    rng: np.random.Generator | None = None,
    n_random: int = 4,
) -> ResolventCheck:
    """Compare ``(H - z)^-1`` with its Feshbach reconstruction.

    ``phi1, phi2`` are coordinate vectors on ran P (default: first P state).
    The reconstruction is tested on ``n_random`` random full vectors.
    """
    D = model.dimension
    Hz = model.H - z * np.eye(D)
    _check_conditioning(Hz, z, "H - z")
    data = feshbach_operator(model, z, rho0)
    p = data.p_index
    q = np.setdiff1d(np.arange(D), p)
    direct = np.linalg.inv(Hz)

    nP = len(p)
    phi1 = np.eye(nP)[0] if phi1 is None else np.asarray(phi1)
    phi2 = np.eye(nP)[0] if phi2 is None else np.asarray(phi2)
    lhs = np.conj(phi1) @ direct[np.ix_(p, p)] @ phi2
    rhs = np.conj(phi1) @ np.linalg.solve(data.F, phi2)
    scalar = abs(lhs - rhs)

    P = np.zeros((D, D))
    P[p, p] = 1.0
    Pb = np.eye(D) - P
    Rq = np.zeros((D, D), dtype=complex)
    if len(q):
        Rq[np.ix_(q, q)] = np.linalg.inv(Hz[np.ix_(q, q)])
    W = model.W
    left = P - Rq @ W @ P
    right = P - P @ W @ Rq
    Finv = np.zeros((D, D), dtype=complex)
    Finv[np.ix_(p, p)] = np.linalg.inv(data.F)
    recon = left @ Finv @ right + Pb @ Rq @ Pb

    rng = rng or np.random.default_rng(0)
    vecs = rng.normal(size=(D, n_random)) + 1j * rng.normal(size=(D, n_random))
    diff = (direct - recon) @ vecs
    reconstruction = float(np.max(np.abs(diff)))
    return ResolventCheck(float(scalar), reconstruction)


def feshbach_suite(
    seed: int, n_models: int = 100, max_dim: int = 50
) -> list[tuple[ToyModel, complex, ResolventCheck]]:
    """Resolvent identity on ``n_models`` random models, ``|Im z| in [0.1, 1]``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_models):
        model = random_model(rng, max_dim)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        z = complex(model.E_j + rng.uniform(-0.2, 0.2), sign * rng.uniform(0.1, 1.0))
        out.append((model, z, resolvent_identity_check(model, z, rng=rng)))
    return out


# ---------------------------------------------------------------- golden rule


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


def _panels(a: float, b: float, n: int) -> list[tuple[float, float]]:
    edges = np.linspace(a, b, n + 1)
    return list(zip(edges[:-1], edges[1:]))


def _gauss(f, panels) -> complex:
    total = 0.0
    for a, b in panels:
        if b <= a:
            continue
        half = 0.5 * (b - a)
        x = 0.5 * (a + b) + half * _GL_NODES
        total = total + half * np.sum(_GL_WEIGHTS * f(x))
    return total


def _punctured_panels(upper: float, center: float, per_side: int = 6) -> list[tuple[float, float]]:
    """Panels on [0, upper] with a breakpoint at ``center`` and matching
    panels on both sides of it, so no node falls on the puncture."""
    if not 0 < center < upper:
        return _panels(0.0, upper, 2 * per_side)
    delta = min(center, upper - center)
    panels = _panels(center - delta, center, per_side) + _panels(center, center + delta, per_side)
    if center - delta > 0:
        panels += _panels(0.0, center - delta, per_side)
    if center + delta < upper:
        panels += _panels(center + delta, upper, per_side)
    return panels


def stieltjes(w: complex, upper: float, scale: float = 1.0, sheet: int = 1) -> complex:
    """``S(w) = int_0^upper rho(v)/(v - w) dv`` and its continuation.

    Uses ``S(w) = int (rho(v) - rho(w))/(v - w) dv + rho(w) [Log(upper - w) - Log(-w)]``;
    the first integrand is entire in ``v``. ``sheet=2`` continues from the
    upper half plane through the cut ``(0, upper)`` into the lower half plane,
    adding ``2 pi i rho(w)`` there. Real ``w`` on the cut is taken as ``w + i0``.
    """
    w = complex(w)
    rw = spectral_density(w, scale)
    on_cut = 0.0 < w.real < upper
    panels = _punctured_panels(upper, w.real if on_cut else -1.0)
    smooth = _gauss(lambda v: (spectral_density(v, scale) - rw) / (v - w), panels)
    if rw == 0:
        log_term = 0.0
    elif w.imag == 0.0 and on_cut:
        log_term = math.log((upper - w.real) / w.real) + 1j * math.pi
    else:
        log_term = np.log(upper - w) - np.log(-w)
    value = smooth + rw * log_term
    if sheet == 2 and on_cut and w.imag < 0:
        value += 2j * math.pi * rw
    return complex(value)


def principal_value(pole: float, upper: float, scale: float = 1.0) -> float:
    """``PV int_0^upper rho(v)/(v - pole) dv`` by singularity subtraction on a
    symmetric punctured panel set."""
    if not 0 < pole < upper:
        raise ValueError("pole must lie inside (0, upper)")
    rp = float(spectral_density(pole, scale))
    panels = _punctured_panels(upper, pole)
    smooth = _gauss(lambda v: (spectral_density(v, scale) - rp) / (v - pole), panels)
    return float(smooth + rp * math.log((upper - pole) / pole))


def _channel_weights(model: ToyModel) -> np.ndarray:
    """``C[a, b] C[a', b]`` for a, a' on the level, shape (d_j, d_j, N)."""
    Cj = model.coupling[model.level_states]
    return Cj[:, None, :] * Cj[None, :, :]


def q0_matrix(model: ToyModel, z: complex, sheet: int = 1) -> np.ndarray:
    """``Q0(z)`` on the distinguished level (first or second sheet)."""
    upper = model.omega_max
    scale = model.config.cutoff_scale
    S = np.array(
        [stieltjes(z - e, upper, scale, sheet) for e in model.energies], dtype=complex
    )
    return _channel_weights(model) @ S


def z_matrix_toy(model: ToyModel) -> np.ndarray:
    """Golden-rule matrix ``Z`` (g independent).

    For each channel ``b``: ``PV int rho(v)/(v + E_b - E_j) dv + i pi rho(E_j - E_b)``
    when ``E_b < E_j``; a regular integral otherwise (``E_b = E_j`` gives the
    diagonal ``int rho(v)/v dv`` term).
    """
    upper = model.omega_max
    scale = model.config.cutoff_scale
    S = np.empty(model.n_atomic, dtype=complex)
    for b, e in enumerate(model.energies):
        gap = model.E_j - e
        if gap > 0:
            if gap >= upper:
                raise ModelError(
                    f"resonant frequency {gap} outside grid support (0, {upper})"
                )
            S[b] = principal_value(gap, upper, scale) + 1j * math.pi * float(
                spectral_density(gap, scale)
            )
        else:
            S[b] = stieltjes(complex(gap, 0.0), upper, scale).real
    return _channel_weights(model) @ S


@dataclass
class PoleResult:
    z: complex
    residual: float
    iterations: int
    trace: list[complex]

    def to_text(self) -> str:
        lines = [
            f"pole_re = {self.z.real!r}",
            f"pole_im = {self.z.imag!r}",
            f"residual = {self.residual!r}",
            f"iterations = {self.iterations}",
        ]
        lines += [f"trace[{i}] = {z.real!r} {z.imag!r}" for i, z in enumerate(self.trace)]
        return "\n".join(lines) + "\n"


def resonance_pole(
    model: ToyModel,
    g: float | None = None,
    which: int | None = None,
    tol: float = 1e-12,
    max_iter: int = 60,
) -> PoleResult:
    """Zero of ``E_j - z - g^2 mu(z)`` where ``mu`` is an eigenvalue of the
    second-sheet ``Q0(z)``, by Newton's method from ``E_j - i g^2 Im Z``."""
    g = model.g if g is None else g
    Ej = model.E_j
    if g == 0:
        return PoleResult(complex(Ej), 0.0, 0, [complex(Ej)])
    lam = np.linalg.eigvals(z_matrix_toy(model))
    idx = int(np.argmax(lam.imag)) if which is None else which
    target = lam[idx]
    g2 = g * g

    def mu(z: complex) -> complex:
        nonlocal target
        Q = q0_matrix(model, z, sheet=2)
        ev = np.linalg.eigvals(Q) if Q.shape != (1, 1) else Q.ravel()
        target = ev[int(np.argmin(np.abs(ev - target)))]
        return complex(target)

    def h(z: complex) -> complex:
        return Ej - z - g2 * mu(z)

    z = complex(Ej, -g2 * target.imag)
    trace = [z]
    for it in range(1, max_iter + 1):
        hz = h(z)
        if abs(hz) < tol:
            return PoleResult(z, abs(hz), it - 1, trace)
        step = 1e-6 * max(g2, 1e-12)
        saved = target
        dh = (h(z + step) - h(z - step)) / (2 * step)
        target = saved
        if dh == 0 or not np.isfinite(dh):
            raise ConvergenceError(f"zero derivative at z={z!r}", trace)
        z = z - hz / dh
        trace.append(z)
    hz = h(z)
    if abs(hz) < tol:
        return PoleResult(z, abs(hz), max_iter, trace)
    raise ConvergenceError(
        f"Newton iteration did not converge in {max_iter} steps (|h|={abs(hz):.3e})", trace
    )


@dataclass
class CorollaryRow:
    g: float
    s: float
    amplitude: float
    prediction: float

    @property
    def deviation(self) -> float:
        return abs(self.amplitude - self.prediction)


def corollary_limit_check(
    model: ToyModel, tau: float, g_list: Sequence[float], phi: np.ndarray | None = None
) -> list[CorollaryRow]:
    """``|<Phi, exp(-i s H_g) Phi>|`` at ``s = tau/g^2`` against
    ``exp(-tau Im Gamma)`` for ``phi`` an eigenvector of Z with eigenvalue Gamma."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    Z = z_matrix_toy(model)
    lam = np.linalg.eigvals(Z)
    if phi is None:
        idx = int(np.argmax(lam.imag))
        phi = _z_eigvec(Z, idx)
        gamma = lam[idx]
    else:
        phi = np.asarray(phi)
        phi = phi / np.linalg.norm(phi)
        zphi = Z @ phi
        gamma = np.vdot(phi, zphi)
        if np.linalg.norm(zphi - gamma * phi) > 1e-8 * max(1.0, np.linalg.norm(zphi)):
            raise ValueError("phi is not an eigenvector of Z")
    prediction = math.exp(-tau * float(gamma.imag))
    rows = []
    for g in g_list:
        m = model.with_g(g)
        s = tau / g**2 if g > 0 else 0.0
        amp = survival_amplitude(m, m.level_vector(phi), times=[s]).modulus[0]
        rows.append(CorollaryRow(float(g), s, float(amp), prediction))
    return rows


def corollary_to_csv(rows: Sequence[CorollaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g", "s", "abs_A", "exp_minus_tau_ImGamma", "deviation"])
    for r in rows:
        w.writerow([repr(r.g), repr(r.s), repr(r.amplitude), repr(r.prediction), repr(r.deviation)])
    return buf.getvalue()
