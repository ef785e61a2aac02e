"""Reflection designs that minimize the radars' (sum) received signal power.

The common problem is a convex QCQP: minimize theta^H U theta
+ 2 Re(v^H theta) + c over per-element amplitude caps |theta_n| <= beta.
Five designs are provided:

* accelerated projected gradient (global optimum of the QCQP),
* the semi-closed multiplier form theta = -(U + diag(lam))^{-1} v with a
  KKT certificate and dual value for optimality checking,
* reverse alignment, a closed form for the single-radar case,
* a regularized least-squares design that nulls the stacked link equations,
* two baselines: a DFT codebook search and random phases.

All designs return amplitude-feasible vectors; objectives are reported on
the same scale as :func:`irstealth.power_model.sum_power` (watts when the
instance comes from a scenario).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import cascaded_response, split_ts_response, upa_response
from .power_model import (Scenario, beamforming_gains, cascaded_vectors,
                          link_weights)


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted; ``best`` holds the best iterate found."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


class InfeasibleError(RuntimeError):
    """No candidate in the search grid satisfied the amplitude constraints."""


@dataclass(frozen=True, eq=False)
class QcqpInstance:
    """Quadratic objective data (Hermitian PSD matrix, linear term, constant)."""

    u_mat: np.ndarray
    v_vec: np.ndarray
    c_const: float
    beta_max: float

    def __post_init__(self):
        u = np.asarray(self.u_mat)
        v = np.asarray(self.v_vec)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"quadratic term must be square, got {u.shape}")
        if v.shape != (u.shape[0],):
            raise ValueError("linear term length does not match the matrix")
        scale = max(float(np.max(np.abs(u), initial=0.0)), 1e-300)
        if np.max(np.abs(u - u.conj().T)) > 1e-9 * scale:
            raise ValueError("quadratic term must be Hermitian")
        if float(np.linalg.eigvalsh(u)[0]) < -1e-9 * scale:
            raise ValueError("quadratic term must be positive semidefinite")
        if self.c_const < -1e-9 * scale:
            raise ValueError("constant term must be nonnegative")
        if not 0 < self.beta_max <= 1:
            raise ValueError(f"beta_max must be in (0, 1], got {self.beta_max}")

    @property
    def n_elements(self) -> int:
        return np.asarray(self.v_vec).size

    def objective(self, theta: np.ndarray) -> float:
        theta = np.asarray(theta)
        quad = np.real(theta.conj() @ (self.u_mat @ theta))
        return float(quad + 2.0 * np.real(np.vdot(self.v_vec, theta)) + self.c_const)


@dataclass
class ReflectionSolution:
    """A reflection vector with its achieved objective and solver metadata."""

    theta: np.ndarray
    objective: float
    solver: str
    iterations: int = 0
    kkt_residual: float | None = None
    multipliers: np.ndarray | None = None


def build_instance(scenario: Scenario) -> QcqpInstance:
    """Objective data of the sum-received-power problem for a scenario.

    Every echo/cross link contributes its cascaded panel response weighted by
    the transmit power and the squared beamforming gains, so the instance
    objective at any feasible theta equals the sum received power in watts.
    """
    gains = beamforming_gains(scenario)
    u, _ = cascaded_vectors(scenario)
    w = link_weights(scenario, gains)
    return _assemble_instance(w, u, gains.c_nirs, scenario.target.irs.beta_max)


def build_instance_from_estimates(scenario: Scenario, angles, g2) -> QcqpInstance:
    """Objective data built from sensed arrival angles and gain estimates.

    ``angles`` are the estimated arrival directions (one per radar, any
    order) and ``g2`` the matching power-scaled squared beamforming gains.
    The coating coefficients are a fixed property of the target and are taken
    from the scenario.  The uniform power scale carried by the gain estimates
    rescales the objective without moving its minimizer.  Assumes a common
    transmit power across radars.
    """
    g2 = np.asarray(g2, dtype=float)
    if len(angles) != g2.size:
        raise ValueError("need one gain estimate per estimated angle")
    target = scenario.target
    responses = []
    for pair in angles:
        full = upa_response(target.surface_geometry, pair, scenario.wavelength)
        responses.append(split_ts_response(full, target.irs_geometry.nx,
                                           target.nirs_geometry.nx,
                                           target.irs_geometry.ny))
    k_r = g2.size
    n1 = target.irs_geometry.num_elements
    phi = np.asarray(target.nirs.phi)
    u = np.zeros((k_r, k_r, n1), dtype=complex)
    c = np.zeros((k_r, k_r), dtype=complex)
    for k in range(k_r):
        for j in range(k_r):
            u[k, j] = cascaded_response(responses[k][0], responses[j][0])
            c[k, j] = np.vdot(cascaded_response(responses[k][1], responses[j][1]), phi)
    w = g2[:, None] * g2[None, :]
    return _assemble_instance(w, u, c, target.irs.beta_max)


def _assemble_instance(weights, u, c, beta_max) -> QcqpInstance:
    u_mat = np.einsum("kj,kjn,kjm->nm", weights, u, u.conj())
    u_mat = 0.5 * (u_mat + u_mat.conj().T)
    v_vec = np.einsum("kj,kj,kjn->n", weights, c, u)
    c_const = float(np.sum(weights * np.abs(c) ** 2))
    return QcqpInstance(u_mat, v_vec, c_const, beta_max)


def _project(theta: np.ndarray, beta: float) -> np.ndarray:
    mag = np.abs(theta)
    over = mag > beta
    if not np.any(over):
        return theta
    out = theta.copy()
    out[over] *= beta / mag[over]
    return out


def _spectral_top(u_mat: np.ndarray) -> float:
    """Largest eigenvalue via power iteration (deterministic start)."""
    n = u_mat.shape[0]
    vec = np.ones(n) + np.linspace(0.0, 0.5, n)
    vec = vec / np.linalg.norm(vec)
    lam = 0.0
    for _ in range(200):
        nxt = u_mat @ vec
        nrm = np.linalg.norm(nxt)
        if nrm == 0.0:
            return 0.0
        vec_new = nxt / nrm
        lam_new = float(np.real(np.vdot(vec_new, u_mat @ vec_new)))
        if abs(lam_new - lam) <= 1e-13 * max(lam_new, 1e-300):
            return lam_new
        vec, lam = vec_new, lam_new
    return lam


def solve_pgd(instance: QcqpInstance, tol: float = 1e-10,
              max_iter: int = 100_000) -> ReflectionSolution:
    """Globally solve the amplitude-constrained QCQP by projected gradient.

    Runs Nesterov-accelerated projected gradient with restart on objective
    increase, step 1/lambda_max and per-element amplitude clamping, and stops
    once the projected-gradient norm falls below ``tol`` relative to the
    gradient scale (or once the recovered duality gap certifies the same
    relative accuracy); by convexity the returned point is the global
    optimum within tolerance.  When the minimum-norm stationary point is
    already feasible it is returned directly.  Raises
    :class:`ConvergenceError` carrying the best iterate if the iteration
    budget runs out.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    u_mat = np.asarray(instance.u_mat)
    v_vec = np.asarray(instance.v_vec)
    beta = instance.beta_max
    n = instance.n_elements

    if np.all(v_vec == 0):
        theta = np.zeros(n, dtype=complex)
        return ReflectionSolution(theta, instance.objective(theta), "pgd", 0)

    lam_max = _spectral_top(u_mat)
    if lam_max <= 0:
        # Purely linear objective: saturate every element against the
        # linear term.
        theta = np.where(np.abs(v_vec) > 0, -beta * v_vec / np.abs(v_vec), 0.0)
        return ReflectionSolution(theta, instance.objective(theta), "pgd", 0)
    v_norm = float(np.linalg.norm(v_vec))
    grad_scale = lam_max * beta * math.sqrt(n) + v_norm
    obj_scale = lam_max * beta ** 2 * n + 2.0 * v_norm * beta * math.sqrt(n) \
        + abs(instance.c_const)

    # Unconstrained stationary point: optimal whenever it is feasible.
    theta_u, *_ = np.linalg.lstsq(u_mat, -v_vec, rcond=None)
    if (np.linalg.norm(u_mat @ theta_u + v_vec) <= 1e-10 * grad_scale
            and np.max(np.abs(theta_u)) <= beta * (1.0 + 1e-12)):
        theta_u = _project(theta_u, beta)
        return ReflectionSolution(theta_u, instance.objective(theta_u), "pgd", 0)

    def value(theta, u_theta):
        quad = float(np.real(np.vdot(theta, u_theta)))
        return quad + 2.0 * float(np.real(np.vdot(v_vec, theta))) + instance.c_const

    # Small cushion against the power iteration under-reading lambda_max.
    step = 1.0 / (lam_max * 1.001)
    theta = np.zeros(n, dtype=complex)
    u_theta = np.zeros(n, dtype=complex)
    moment = theta
    t_acc = 1.0
    f_cur = value(theta, u_theta)
    best_theta, best_f = theta, f_cur
    for it in range(1, max_iter + 1):
        grad = u_mat @ moment + v_vec
        candidate = _project(moment - step * grad, beta)
        u_cand = u_mat @ candidate
        f_new = value(candidate, u_cand)
        if f_new > f_cur:
            # Momentum overshoot: restart from the last monotone iterate.
            t_acc = 1.0
            candidate = _project(theta - step * (u_theta + v_vec), beta)
            u_cand = u_mat @ candidate
            f_new = value(candidate, u_cand)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_acc * t_acc))
        moment = candidate + ((t_acc - 1.0) / t_next) * (candidate - theta)
        theta, u_theta, f_cur, t_acc = candidate, u_cand, f_new, t_next
        if f_cur < best_f:
            best_theta, best_f = theta, f_cur
        pg = (theta - _project(theta - step * (u_theta + v_vec), beta)) / step
        if np.linalg.norm(pg) <= tol * grad_scale:
            return ReflectionSolution(theta, f_cur, "pgd", it)
        if it % 128 == 0:
            # Duality-gap certificate: cheap safety net for boundary optima
            # on which the gradient criterion converges slowly.
            lam = _multipliers_from(u_theta + v_vec, theta, beta)
            gap = f_cur - dual_value(instance, lam)
            if gap <= tol * (abs(f_cur) + 1e-2 * obj_scale):
                return ReflectionSolution(theta, f_cur, "pgd", it)
    best = ReflectionSolution(best_theta, best_f, "pgd", max_iter)
    raise ConvergenceError(f"no convergence within {max_iter} iterations", best)


def lagrange_semiclosed(instance: QcqpInstance, multipliers: np.ndarray) -> np.ndarray:
    """Stationary point -(U + diag(lam))^{-1} v for given multipliers.

    With the multipliers recovered from an optimal solution this reproduces
    the optimizer; raises ``numpy.linalg.LinAlgError`` when the shifted
    matrix is singular.
    """
    lam = np.asarray(multipliers, dtype=float)
    if lam.shape != (instance.n_elements,):
        raise ValueError("multiplier vector length does not match the instance")
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    shifted = np.asarray(instance.u_mat) + np.diag(lam)
    eigvals = np.linalg.eigvalsh(shifted)
    if eigvals[0] <= 1e-13 * max(eigvals[-1], 1e-300):
        raise np.linalg.LinAlgError("U + diag(lam) is singular")
    return np.linalg.solve(shifted, -np.asarray(instance.v_vec))


def _multipliers_from(grad: np.ndarray, theta: np.ndarray, beta: float) -> np.ndarray:
    lam = np.zeros(theta.size)
    active = np.abs(theta) >= beta * (1.0 - 1e-7)
    if np.any(active):
        ratio = -np.real(grad[active] * np.conj(theta[active])) / np.abs(theta[active]) ** 2
        lam[active] = np.maximum(ratio, 0.0)
    return lam


def kkt_certificate(instance: QcqpInstance,
                    solution: ReflectionSolution) -> tuple[np.ndarray, float]:
    """Recover nonnegative multipliers and the KKT residual of a solution.

    On amplitude-active elements the multiplier follows from stationarity,
    (U + diag(lam)) theta + v = 0; inactive elements get zero.  The residual
    adds the stationarity norm and the complementary-slackness norm, so a
    small value certifies global optimality of the convex program.
    """
    theta = np.asarray(solution.theta)
    beta = instance.beta_max
    grad = np.asarray(instance.u_mat) @ theta + np.asarray(instance.v_vec)
    lam = _multipliers_from(grad, theta, beta)
    stationarity = np.linalg.norm(grad + lam * theta)
    slack = np.linalg.norm(lam * (np.abs(theta) ** 2 - beta ** 2))
    return lam, float(stationarity + slack)


def dual_value(instance: QcqpInstance, multipliers: np.ndarray) -> float:
    """Lagrangian dual value c - beta^2 sum(lam) - v^H (U + diag(lam))^+ v.

    Returns -inf when the linear term leaves the range of the shifted matrix
    (the dual function is unbounded below there).
    """
    lam = np.asarray(multipliers, dtype=float)
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    shifted = np.asarray(instance.u_mat) + np.diag(lam)
    v_vec = np.asarray(instance.v_vec)
    x, *_ = np.linalg.lstsq(shifted, v_vec, rcond=None)
    v_norm = float(np.linalg.norm(v_vec))
    if np.linalg.norm(shifted @ x - v_vec) > 1e-8 * max(v_norm, 1e-300):
        return -np.inf
    quad = float(np.real(np.vdot(v_vec, x)))
    return instance.c_const - instance.beta_max ** 2 * float(np.sum(lam)) - quad


def reverse_alignment(u: np.ndarray, c_gain: complex, beta_max: float) -> ReflectionSolution:
    """Closed-form single-radar design anti-phasing the coating gain.

    Every used element points opposite to the coating reflection gain along
    the cascaded response.  With too few elements all of them saturate at
    ``beta_max`` and the residual objective is (|c| - N*beta)^2; otherwise
    floor(|c|/beta) elements saturate, one carries the remainder |c| mod beta
    and the rest stay dark, cancelling the gain exactly.
    """
    u = np.asarray(u)
    if np.max(np.abs(np.abs(u) - 1.0), initial=0.0) > 1e-9:
        raise ValueError("cascaded response entries must have unit modulus")
    if not 0 < beta_max <= 1:
        raise ValueError(f"beta_max must be in (0, 1], got {beta_max}")
    n = u.size
    theta = np.zeros(n, dtype=complex)
    mag = abs(c_gain)
    if mag == 0:
        return ReflectionSolution(theta, 0.0, "reverse-alignment", 0)
    unit = c_gain / mag
    needed = math.ceil(mag / beta_max)
    if n < needed:
        theta[:] = -beta_max * u * unit
    else:
        full = math.floor(mag / beta_max)
        remainder = mag - full * beta_max
        theta[:full] = -beta_max * u[:full] * unit
        if full < n:
            theta[full] = -remainder * u[full] * unit
    objective = float(np.abs(np.vdot(u, theta) + c_gain) ** 2)
    return ReflectionSolution(theta, objective, "reverse-alignment", 0)


def stacked_system(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Gain-weighted stacked link matrices (D, E) with D theta = -E phi at stealth.

    Row (k, j) carries sqrt(P_j) |g_rx_k g_tx_j| times the conjugated
    cascaded responses, so ||D theta + E phi||^2 equals the sum received
    power in watts.
    """
    gains = beamforming_gains(scenario)
    u, u_nirs = cascaded_vectors(scenario)
    amp = np.sqrt(link_weights(scenario, gains)).reshape(-1, 1)
    k_sq = scenario.num_radars ** 2
    d_mat = amp * u.conj().reshape(k_sq, -1)
    e_mat = amp * u_nirs.conj().reshape(k_sq, -1)
    return d_mat, e_mat


def stacked_system_from_estimates(scenario: Scenario, angles, g2
                                  ) -> tuple[np.ndarray, np.ndarray]:
    """Stacked link matrix and right-hand side built from sensed parameters.

    Mirrors :func:`stacked_system` with estimated arrival angles and
    power-scaled squared gains; the uniform power scale does not move the
    ridge designs.
    """
    g2 = np.asarray(g2, dtype=float)
    target = scenario.target
    responses = []
    for pair in angles:
        full = upa_response(target.surface_geometry, pair, scenario.wavelength)
        responses.append(split_ts_response(full, target.irs_geometry.nx,
                                           target.nirs_geometry.nx,
                                           target.irs_geometry.ny))
    phi = np.asarray(target.nirs.phi)
    k_r = g2.size
    rows = []
    rhs = []
    for k in range(k_r):
        for j in range(k_r):
            amp = math.sqrt(g2[k] * g2[j])
            rows.append(amp * cascaded_response(responses[k][0], responses[j][0]).conj())
            rhs.append(amp * np.vdot(cascaded_response(responses[k][1],
                                                       responses[j][1]), phi))
    return np.stack(rows), np.array(rhs)


def mmse_reflection(scenario: Scenario, delta: float) -> np.ndarray:
    """Regularized least-squares design -(D^H D + delta I)^{-1} D^H E phi.

    ``delta = 0`` returns the minimum-norm exact least-squares solution.
    """
    if delta < 0:
        raise ValueError(f"regularization must be nonnegative, got {delta}")
    d_mat, e_mat = stacked_system(scenario)
    rhs = e_mat @ np.asarray(scenario.target.nirs.phi)
    if delta == 0:
        theta, *_ = np.linalg.lstsq(d_mat, -rhs, rcond=None)
        return theta
    gram = d_mat.conj().T @ d_mat + delta * np.eye(d_mat.shape[1])
    return -np.linalg.solve(gram, d_mat.conj().T @ rhs)


def ridge_delta_search(d_mat: np.ndarray, rhs: np.ndarray, beta_max: float,
                       grid: np.ndarray | None = None
                       ) -> tuple[float, ReflectionSolution]:
    """Smallest-residual amplitude-feasible ridge solution of D theta = -rhs.

    Sweeps the candidate regularization values in increasing order and keeps
    the feasible design with the smallest ||D theta + rhs||^2 (ties go to
    the smaller regularization).  A caller-provided fully infeasible grid
    raises :class:`InfeasibleError`; the default grid widens itself upward
    until a feasible design appears (large regularization shrinks the design
    to zero, which is always feasible).
    """
    gram = d_mat.conj().T @ d_mat
    lam_top = max(float(np.linalg.eigvalsh(gram)[-1]), 1e-300)
    auto = grid is None
    if auto:
        grid = np.geomspace(1e-12 * lam_top, 1e4 * lam_top, 40)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ValueError("grid must be nonempty with nonnegative entries")

    eye = np.eye(d_mat.shape[1])
    projected = d_mat.conj().T @ rhs
    tried = 0
    for _ in range(6):
        best = None
        for delta in np.sort(grid):
            tried += 1
            if delta == 0:
                theta, *_ = np.linalg.lstsq(d_mat, -rhs, rcond=None)
            else:
                theta = -np.linalg.solve(gram + delta * eye, projected)
            if np.max(np.abs(theta), initial=0.0) > beta_max * (1.0 + 1e-12):
                continue
            residual = float(np.linalg.norm(d_mat @ theta + rhs) ** 2)
            if best is None or residual < best[2]:
                best = (float(delta), theta, residual)
        if best is not None:
            delta, theta, residual = best
            return delta, ReflectionSolution(theta, residual, "mmse", tried)
        if not auto:
            raise InfeasibleError("no grid candidate satisfies the amplitude cap")
        grid = np.geomspace(grid[-1] * 10.0, grid[-1] * 1e5, 16)
    raise InfeasibleError("no feasible regularization found while widening")


def mmse_delta_search(scenario: Scenario,
                      grid: np.ndarray | None = None) -> tuple[float, ReflectionSolution]:
    """Regularization search over the scenario's stacked link system."""
    d_mat, e_mat = stacked_system(scenario)
    rhs = e_mat @ np.asarray(scenario.target.nirs.phi)
    return ridge_delta_search(d_mat, rhs, scenario.target.irs.beta_max, grid)


def dft_codebook_design(instance: QcqpInstance) -> ReflectionSolution:
    """Best codeword of the DFT codebook at full reflection amplitude.

    The codebook holds the columns of the square DFT matrix scaled to
    modulus ``beta_max``; ties break toward the lowest column index.
    """
    n = instance.n_elements
    beta = instance.beta_max
    idx = np.arange(n)
    codebook = beta * np.exp(-2j * np.pi * np.outer(idx, idx) / n)
    quad = np.real(np.sum(codebook.conj() * (instance.u_mat @ codebook), axis=0))
    lin = 2.0 * np.real(np.asarray(instance.v_vec).conj() @ codebook)
    objectives = quad + lin + instance.c_const
    best = int(np.argmin(objectives))
    return ReflectionSolution(codebook[:, best].copy(), float(objectives[best]),
                              "dft-codebook", n)


def dft_codebook_search(scenario: Scenario) -> ReflectionSolution:
    """Codebook search against a scenario's own objective data."""
    return dft_codebook_design(build_instance(scenario))


def random_phase(n1: int, beta_max: float, seed) -> np.ndarray:
    """Full-amplitude reflection with independent uniform phases."""
    if n1 < 1:
        raise ValueError(f"need at least one element, got {n1}")
    rng = np.random.default_rng(seed)
    return beta_max * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n1))


def min_irs_elements(zeta_bar: float, n2: int, beta_max: float,
                     realizations: int) -> int:
    """Element count needed to cancel the worst coating gain among realizations.

    The squared coating gain is exponentially distributed with mean
    (1 - zeta_bar) * n2, so the expected maximum over I independent draws is
    that mean times the I-th harmonic number; enough elements to cancel its
    square root (at full amplitude) guarantee stealth on average.
    """
    if not 0 <= zeta_bar <= 1:
        raise ValueError(f"mean absorbing efficiency must be in [0, 1], got {zeta_bar}")
    if n2 < 0:
        raise ValueError(f"coating element count must be nonnegative, got {n2}")
    if realizations < 1:
        raise ValueError(f"need at least one realization, got {realizations}")
    if beta_max <= 0:
        raise ValueError(f"beta_max must be positive, got {beta_max}")
    harmonic = sum(1.0 / i for i in range(1, realizations + 1))
    return math.ceil(math.sqrt((1.0 - zeta_bar) * n2 * harmonic / beta_max ** 2))
