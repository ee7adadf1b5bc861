"""Entropy-barrier homotopy systems.

Two formulations share the same solution path:

``"z"``
    One unconstrained variable z per action.  With θ = t^(1/κ),
    w = ψ₁(z, θ) and λ = ψ₂(z, θ) satisfy w·λ = t, and β = d(w) with
    d(ν) = exp(1 - 1/ν).  Gap rows (per set I, action a ≠ a⁰):

        (1-t)[U(a) - U(a⁰)] + ω(I)[λ(a) - λ(a⁰) - t(ln β⁰(a⁰) - ln β⁰(a))]

``"w"``
    The multiplier λ and the per-set value are eliminated, leaving positive
    variables w with gap rows

        (1-t) w(a) Σ_a' w(a')[U(a) - U(a')]
          + t ω(I)[w(a) Σ_a' w(a')(ln β⁰(a) - ln β⁰(a')) + Σ_a' (w(a') - w(a))]

Here U(a) is the payoff to the owner of I summed over terminals through I
via a, with every other set played according to the perturbed profile
ϖ = (1-t)β + tβ⁰, and ω(I) is the reach of I under ϖ.  Each set also gets a
normalization row Σ_a β(a) - 1.  Rows are ordered like the flat action index:
within a set, gap rows for the 2nd, 3rd, ... action, then the normalization
row.  A generic perturbation vanishing at t = 0 and t = 1 is applied to the
gap rows; see ``EntropyHomotopy._perturb`` for its two weightings.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assessment import Assessment, bayes_beliefs, homotopy_perturb, infoset_reach, payoff_kernel
from .game import GameTree

D_FLOOR = 1e-12


@dataclass
class SolverConfig:
    formulation: str = "z"          # "z" or "w"
    alpha_weighting: str = "reach"   # "reach": α weighted by set reach; "plain": -t(1-t)α per row
    kappa: float = 3.0
    prior: np.ndarray | None = None  # totally mixed; uniform when None
    alpha: np.ndarray | None = None  # drawn from ``seed`` when None
    alpha_max: float = 1e-2
    seed: int = 0
    t_end: float = 1e-5
    polish_t: float = 1e-8
    round_tol: float = 1e-8
    step_scale: float = 0.2
    step_rate: float = 0.2
    accuracy_scale: float = 0.1
    accuracy_rate: float = 0.5
    log10_schedule: bool = False     # read "ln t" in the schedules as log10 t
    max_corrector_iters: int = 20
    norm_tol: float = 1e-8           # normalization rows at every corrected point
    step_grow: float = 1.2
    grow_after: int = 3
    cheap_iters: int = 2
    min_step: float = 1e-12
    max_retries: int = 5
    max_steps: int = 50_000
    check_tol: float | None = None   # default 1e-4 * payoff range
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.formulation not in ("z", "w"):
            raise ValueError("formulation must be 'z' or 'w'")
        if self.alpha_weighting not in ("reach", "plain"):
            raise ValueError("alpha_weighting must be 'reach' or 'plain'")
        if not self.kappa > 2:
            raise ValueError("kappa must exceed 2")


def transform_d(nu):
    """exp(1 - 1/ν) for ν > 0, else 0 (values below 1e-12 are treated as 0)."""
    nu = np.asarray(nu, dtype=float)
    out = np.zeros_like(nu)
    pos = nu > D_FLOOR
    out[pos] = np.exp(1.0 - 1.0 / nu[pos])
    return out if out.ndim else float(out)


def transform_d_prime(nu):
    nu = np.asarray(nu, dtype=float)
    out = np.zeros_like(nu)
    pos = nu > D_FLOOR
    v = nu[pos]
    out[pos] = np.exp(1.0 - 1.0 / v - 2.0 * np.log(v))
    return out if out.ndim else float(out)


def _split_roots(tau, theta):
    """s1 = (τ + r)/2, s2 = (-τ + r)/2 with r = sqrt(τ² + 4θ), without cancellation."""
    tau = np.asarray(tau, dtype=float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), tau.shape)
    r = np.sqrt(tau * tau + 4.0 * theta)
    big = np.where(tau >= 0, tau + r, r - tau) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big > 0, theta / np.where(big > 0, big, 1.0), 0.0)
    s1 = np.where(tau >= 0, big, small)
    s2 = np.where(tau >= 0, small, big)
    return s1, s2, r


def psi(tau, theta, kappa: float = 3.0, gamma0: float = 1.0):
    """(ψ₁, ψ₂) = (((τ ± sqrt(τ² + 4γ₀θ))/2)^κ) with ψ₁ψ₂ = (γ₀θ)^κ."""
    s1, s2, _ = _split_roots(tau, gamma0 * np.asarray(theta, dtype=float))
    p1, p2 = s1 ** kappa, s2 ** kappa
    if np.ndim(p1) == 0:
        return float(p1), float(p2)
    return p1, p2


@dataclass
class Transforms:
    beta: np.ndarray
    beta_x: np.ndarray
    beta_t: np.ndarray
    lam: np.ndarray | None = None
    lam_x: np.ndarray | None = None
    lam_t: np.ndarray | None = None
    w: np.ndarray | None = None


class EntropyHomotopy:
    """Residual, Jacobian and start point of one formulation on one game."""

    def __init__(self, game: GameTree, formulation: str = "z", kappa: float = 3.0,
                 prior: np.ndarray | None = None, alpha: np.ndarray | None = None,
                 alpha_weighting: str = "reach"):
        if formulation not in ("z", "w"):
            raise ValueError("formulation must be 'z' or 'w'")
        self.game = game
        self.formulation = formulation
        if alpha_weighting not in ("reach", "plain"):
            raise ValueError("alpha_weighting must be 'reach' or 'plain'")
        self.alpha_weighting = alpha_weighting
        self.kappa = float(kappa)
        m0 = game.m0
        self.m0 = m0
        self.prior = game.uniform_profile() if prior is None else np.asarray(prior, dtype=float)
        if self.prior.shape != (m0,) or np.any(self.prior <= 0):
            raise ValueError("prior must be a totally mixed profile")
        self.log_prior = np.log(self.prior)
        self.owner = game.infoset_of_index()
        self.n_sets = len(game.infosets)
        gap_rows, act, ref, norm_rows = [], [], [], []
        for I in game.infosets:
            n = len(I.actions)
            for k in range(1, n):
                gap_rows.append(I.offset + k - 1)
                act.append(I.offset + k)
                ref.append(I.offset)
            norm_rows.append(I.offset + n - 1)
        self.gap_rows = np.array(gap_rows, dtype=np.int64)
        self.act = np.array(act, dtype=np.int64)
        self.ref = np.array(ref, dtype=np.int64)
        self.gap_set = self.owner[self.act]
        self.norm_rows = np.array(norm_rows, dtype=np.int64)
        self.set_size = np.bincount(self.owner, minlength=self.n_sets).astype(float)
        self.alpha = np.zeros(m0)
        if alpha is not None:
            self.set_alpha(alpha)

    def set_alpha(self, alpha: np.ndarray) -> None:
        alpha = np.asarray(alpha, dtype=float)
        if alpha.shape != (self.m0,):
            raise ValueError(f"alpha must have length {self.m0}")
        self.alpha = alpha.copy()
        self.alpha[self.norm_rows] = 0.0

    # -- variable transforms ---------------------------------------------
    def transforms(self, x: np.ndarray, t: float) -> Transforms:
        x = np.asarray(x, dtype=float)
        if self.formulation == "w":
            beta = transform_d(x)
            return Transforms(beta, transform_d_prime(x), np.zeros_like(x), w=x)
        k = self.kappa
        theta = t ** (1.0 / k) if t > 0 else 0.0
        s1, s2, r = _split_roots(x, theta)
        w, lam = s1 ** k, s2 ** k
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_r = np.where(r > 0, 1.0 / r, 0.0)
        w_z, lam_z = k * w * inv_r, -k * lam * inv_r
        theta_t = theta / (k * t) if t > 0 else 0.0
        w_t = k * s1 ** (k - 1) * inv_r * theta_t
        lam_t = k * s2 ** (k - 1) * inv_r * theta_t
        beta = transform_d(w)
        beta_w = transform_d_prime(w)
        return Transforms(beta, beta_w * w_z, beta_w * w_t, lam, lam_z, lam_t, w)

    def start_point(self) -> np.ndarray:
        c = 1.0 - self.log_prior
        if self.formulation == "w":
            return 1.0 / c
        return c ** (-1.0 / self.kappa) - c ** (1.0 / self.kappa)

    def profile(self, x: np.ndarray, t: float) -> np.ndarray:
        return self.transforms(x, t).beta

    def recover_assessment(self, x: np.ndarray, t: float) -> Assessment:
        beta = self.profile(x, t)
        if t <= 0:
            raise ValueError("beliefs at t = 0 must come from a t > 0 point")
        return Assessment(beta, bayes_beliefs(self.game, homotopy_perturb(beta, self.prior, t)))

    def row_scale(self, x: np.ndarray, t: float) -> np.ndarray:
        """Reach of each gap row's set (1 on normalization rows).

        Gap rows of a set reached with probability ω carry a factor ω, so
        H / row_scale measures conditional-payoff accuracy.
        """
        om = infoset_reach(self.game, homotopy_perturb(self.profile(x, t), self.prior, t))
        out = np.ones(self.m0)
        out[self.gap_rows] = om[self.gap_set]
        return out

    # -- residual and Jacobian -------------------------------------------
    def residual(self, x: np.ndarray, t: float) -> np.ndarray:
        return self._evaluate(x, t, jac=False)[0]

    def jacobian(self, x: np.ndarray, t: float) -> np.ndarray:
        return self._evaluate(x, t, jac=True)[1]

    def evaluate(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        return self._evaluate(x, t, jac=True)

    def _evaluate(self, x, t, jac):
        x = np.asarray(x, dtype=float)
        t = float(t)
        if self.formulation == "w" and t > 0 and np.any(x <= 0):
            raise FloatingPointError("w coordinates must be positive")
        tr = self.transforms(x, t)
        p = homotopy_perturb(tr.beta, self.prior, t)
        ker = payoff_kernel(self.game, p)
        if self.formulation == "z":
            H, J = self._z_rows(x, t, tr, ker, jac)
        else:
            H, J = self._w_rows(x, t, tr, ker, jac)
        if not np.all(np.isfinite(H)) or (jac and not np.all(np.isfinite(J))):
            raise FloatingPointError("non-finite residual")
        return H, J

    def _perturb(self, H, J, x, t, tr, ker):
        """Subtract t(1-t)·P from the gap rows.

        ``"plain"``: P = α.  ``"reach"``: P = ω(I)·α in the z form; in the w form
        α is a payoff bonus on U(a) relative to a⁰ (entering like the payoff
        term), again weighted by ω(I).  Weighting by reach keeps the bias at
        unreached sets the same order as at reached ones.
        """
        g, a, s = self.gap_rows, self.act, self.gap_set
        m0 = self.m0
        alpha = self.alpha[g]
        core_x = np.zeros((len(g), m0))
        core_t = np.zeros(len(g))
        if self.alpha_weighting == "plain":
            core = alpha
        else:
            om, dom = ker.omega[s], ker.domega[s]
            if J is not None:
                dp_dx = (1 - t) * tr.beta_x
                dp_dt = self.prior - tr.beta + (1 - t) * tr.beta_t
            if self.formulation == "z":
                core = om * alpha
                if J is not None:
                    core_x = alpha[:, None] * dom * dp_dx[None, :]
                    core_t = alpha * (dom @ dp_dt)
            else:
                w = x
                bonus = np.zeros(m0)
                bonus[a] = alpha
                S = np.bincount(self.owner, weights=w, minlength=self.n_sets)[s]
                SB = np.bincount(self.owner, weights=w * bonus, minlength=self.n_sets)[s]
                T = w[a] * (S * bonus[a] - SB)
                core = om * T
                if J is not None:
                    own = self.owner[None, :] == s[:, None]
                    dT = np.where(own, w[a][:, None] * (bonus[a][:, None] - bonus[None, :]), 0.0)
                    dT[np.arange(len(g)), a] += S * bonus[a] - SB
                    core_x = om[:, None] * dT + T[:, None] * dom * dp_dx[None, :]
                    core_t = T * (dom @ dp_dt)
        H[g] -= t * (1 - t) * core
        if J is not None:
            J[g, :m0] -= t * (1 - t) * core_x
            J[g, m0] -= (1 - 2 * t) * core + t * (1 - t) * core_t

    def _norm_rows(self, H, J, tr):
        sums = np.bincount(self.owner, weights=tr.beta, minlength=self.n_sets)
        H[self.norm_rows] = sums - 1.0
        if J is not None:
            J[self.norm_rows[self.owner], np.arange(self.m0)] = tr.beta_x
            J[self.norm_rows, self.m0] = np.bincount(self.owner, weights=tr.beta_t, minlength=self.n_sets)

    def _z_rows(self, x, t, tr, ker, jac):
        m0 = self.m0
        g, a, r, s = self.gap_rows, self.act, self.ref, self.gap_set
        U, dU, om, dom = ker
        c = self.log_prior[r] - self.log_prior[a]
        B = tr.lam[a] - tr.lam[r] - t * c
        H = np.zeros(m0)
        H[g] = (1 - t) * (U[a] - U[r]) + om[s] * B
        J = None
        if jac:
            J = np.zeros((m0, m0 + 1))
            dp_dx = (1 - t) * tr.beta_x
            dp_dt = self.prior - tr.beta + (1 - t) * tr.beta_t
            dUg = dU[a] - dU[r]
            J[g, :m0] = ((1 - t) * dUg + dom[s] * B[:, None]) * dp_dx[None, :]
            J[g, a] += om[s] * tr.lam_x[a]
            J[g, r] -= om[s] * tr.lam_x[r]
            J[g, m0] = (-(U[a] - U[r]) + (1 - t) * dUg @ dp_dt + (dom[s] @ dp_dt) * B
                        + om[s] * (tr.lam_t[a] - tr.lam_t[r] - c))
        self._perturb(H, J, x, t, tr, ker)
        self._norm_rows(H, J, tr)
        return H, J

    def _w_rows(self, x, t, tr, ker, jac):
        m0 = self.m0
        g, a, s = self.gap_rows, self.act, self.gap_set
        U, dU, om, dom = ker
        w, lp = x, self.log_prior
        S = np.bincount(self.owner, weights=w, minlength=self.n_sets)
        SU = np.bincount(self.owner, weights=w * U, minlength=self.n_sets)
        SL = np.bincount(self.owner, weights=w * lp, minlength=self.n_sets)
        n = self.set_size
        wa = w[a]
        A1 = wa * (S[s] * U[a] - SU[s])
        A2 = wa * (S[s] * lp[a] - SL[s]) + S[s] - n[s] * wa
        H = np.zeros(m0)
        H[g] = (1 - t) * A1 + t * om[s] * A2
        J = None
        if jac:
            J = np.zeros((m0, m0 + 1))
            dp_dx = (1 - t) * tr.beta_x
            dp_dt = self.prior - tr.beta
            M = np.zeros((self.n_sets, m0))
            M[self.owner, np.arange(m0)] = w
            WdU = M @ dU
            dA1_dp = wa[:, None] * (S[s][:, None] * dU[a] - WdU[s])
            own = self.owner[None, :] == s[:, None]
            rows = np.arange(len(g))
            dA1_own = np.where(own, wa[:, None] * (U[a][:, None] - U[None, :]), 0.0)
            dA1_own[rows, a] += S[s] * U[a] - SU[s]
            dA2_own = np.where(own, wa[:, None] * (lp[a][:, None] - lp[None, :]) + 1.0, 0.0)
            dA2_own[rows, a] += S[s] * lp[a] - SL[s] - n[s]
            J[g, :m0] = ((1 - t) * (dA1_own + dA1_dp * dp_dx[None, :])
                         + t * (om[s][:, None] * dA2_own + dom[s] * dp_dx[None, :] * A2[:, None]))
            J[g, m0] = (-A1 + (1 - t) * dA1_dp @ dp_dt + om[s] * A2
                        + t * (dom[s] @ dp_dt) * A2)
        self._perturb(H, J, x, t, tr, ker)
        self._norm_rows(H, J, tr)
        return H, J


def make_homotopy(game: GameTree, config: SolverConfig, alpha: np.ndarray | None = None) -> EntropyHomotopy:
    return EntropyHomotopy(game, config.formulation, config.kappa, config.prior,
                           config.alpha if alpha is None else alpha, config.alpha_weighting)


# function-style API mirroring the method names

def residual(game: GameTree, config: SolverConfig, x: np.ndarray, t: float) -> np.ndarray:
    return make_homotopy(game, config).residual(x, t)


def jacobian(game: GameTree, config: SolverConfig, x: np.ndarray, t: float) -> np.ndarray:
    return make_homotopy(game, config).jacobian(x, t)


def start_point(game: GameTree, config: SolverConfig) -> np.ndarray:
    return make_homotopy(game, config).start_point()


def recover_assessment(game: GameTree, config: SolverConfig, x: np.ndarray, t: float) -> Assessment:
    return make_homotopy(game, config).recover_assessment(x, t)
