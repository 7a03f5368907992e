""" Damped Newton solver and continuity path for the twisted dHYM equation
"""

from dataclasses import asdict, dataclass, field
import logging

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from ..errors import ConeEscape, HypothesisViolated, MaxIterations, PathBreak, PathHypothesisViolated
from ..hermitian.angles import inverse_sqrt
from .torus import (
    PotentialGrid,
    cone_margins,
    compatibility_gap,
    complex_hessian,
    angle_density,
    angle_density_gradient,
    complex_symbols,
    density,
    hessian_form,
)

logger = logging.getLogger(__name__)


@dataclass
class NewtonReport:
    """History of a Newton solve, one entry per accepted iterate

    ``iterates`` holds the potential values and is left out of ``to_dict``.
    """

    iterates: list = field(default_factory=list, repr=False)
    residual_norms: list = field(default_factory=list)
    angle_residual_norms: list = field(default_factory=list)
    cone_margins: list = field(default_factory=list)
    compatibility_gaps: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    linear_iterations: list = field(default_factory=list)
    halvings: int = 0
    converged: bool = False

    @property
    def iterations(self):
        return len(self.step_sizes)

    def to_dict(self):
        out = asdict(self)
        out.pop("iterates")
        out["iterations"] = self.iterations
        return out


class Linearization:
    """Operator psi -> dG[psi] of the concave residual at a fixed potential

    G is cot(sum arccot(lambda_j)) - cot(theta0) - f / Im prod(lambda_j + i).
    Its derivative with respect to the form is W = S D S with S = chi^{-1/2} and
    D = V diag(grad) V*, from the eigen decomposition of the reduced form S omega S.
    The mean is projected out of the range, which leaves one free constant in
    G + dG[psi] = c; c vanishes at a solution.
    """

    def __init__(self, omega, prob):
        self.prob = prob
        self.grid = prob.grid
        s = inverse_sqrt(prob.chi)
        reduced = s @ omega @ s
        reduced = 0.5 * (reduced + np.conj(np.swapaxes(reduced, -1, -2)))
        eigenvalues, vectors = np.linalg.eigh(reduced)
        gradient = angle_density_gradient(eigenvalues, prob.theta0, prob.f)
        D = (vectors * gradient[..., None, :]) @ np.conj(np.swapaxes(vectors, -1, -2))
        self.weights = s @ D @ s
        self.eigenvalues = eigenvalues
        dz, dzbar = complex_symbols(self.grid)
        mean_weights = self.weights.mean(axis=tuple(range(len(self.grid))))
        symbol = np.zeros(self.grid, dtype=np.complex128)
        for j in range(prob.m):
            for k in range(prob.m):
                symbol += mean_weights[k, j] * dz[j] * dzbar[k]
        symbol = symbol.real
        null = np.abs(symbol) < 1e-14 * max(1.0, np.abs(symbol).max())
        self.inverse_symbol = np.where(null, 0.0, 1.0 / np.where(null, 1.0, symbol))

    def apply(self, psi):
        hessian = complex_hessian(psi, self.grid)
        value = np.einsum("...kj,...jk->...", self.weights, hessian).real
        return value - value.mean()

    def precondition(self, r):
        out = np.fft.ifftn(np.fft.fftn(r) * self.inverse_symbol).real
        return out - out.mean()

    def operators(self):
        size = int(np.prod(self.grid))
        shape = self.grid
        A = LinearOperator((size, size), matvec=lambda x: self.apply(x.reshape(shape)).ravel(), dtype=float)
        M = LinearOperator((size, size), matvec=lambda x: self.precondition(x.reshape(shape)).ravel(), dtype=float)
        return A, M


def _evaluate(values, prob, margin):
    phi = PotentialGrid(values, gauged=False)
    omega = hessian_form(phi, prob)
    s = inverse_sqrt(prob.chi)
    reduced = s @ omega @ s
    eigenvalues = np.linalg.eigvalsh(0.5 * (reduced + np.conj(np.swapaxes(reduced, -1, -2))))
    margins = cone_margins(eigenvalues, prob.theta0 + margin, prob.Theta0)
    cone = min(float(margins.P.min()), float(margins.Q.min()))
    if cone <= 0.0:
        return omega, None, None, cone
    F = density(eigenvalues, prob.theta0) - prob.f
    return omega, F, angle_density(eigenvalues, prob.theta0, prob.f), cone


def newton_solve(
    prob,
    phi_init=None,
    tol=1e-10,
    max_iter=25,
    damping=0.5,
    margin=1e-3,
    max_halvings=30,
    linear_rtol=1e-10,
    linear_maxiter=200,
):
    """Damped Newton iteration on mean-zero potentials

    Steps linearize the concave form cot(sum arccot(lambda_j)) - cot(theta0)
    - f / Im prod(lambda_j + i), which vanishes exactly where the density
    residual does. Convergence is measured on the density residual.

    Parameters
    ----------

    prob : TorusProblem
    phi_init : PotentialGrid, optional
        Starting potential, 0 by default. Its form must lie in the cone
        P < theta0 + margin, Q < Theta0 at every grid point.
    tol : float
        Target sup norm of the residual.
    max_iter : int
        Maximum number of Newton steps.
    damping : float
        Backtracking factor in (0, 1); a trial step is accepted when it stays in
        the cone and decreases the sup norm of the concave residual.
    margin : float
        Slack on the P bound of the cone.
    max_halvings : int
        Maximum number of step reductions per iteration.
    linear_rtol, linear_maxiter : float, int
        Settings of the preconditioned GMRES solve of each Newton system.

    Returns
    -------

    tuple
        (PotentialGrid, NewtonReport)

    Raises
    ------

    HypothesisViolated
        Inadmissible twist or starting point outside the cone.
    ConeEscape
        No reduced step stays inside the cone.
    MaxIterations
        Tolerance not reached after ``max_iter`` steps or stalled line search.
    """
    if not 0.0 < damping < 1.0:
        raise HypothesisViolated(f"damping = {damping} must lie in (0, 1)")
    prob.check_twist()
    phi = PotentialGrid.zeros(prob.grid) if phi_init is None else PotentialGrid(phi_init.values)
    values = phi.values
    omega, F, G, cone = _evaluate(values, prob, margin)
    if cone <= 0.0:
        raise HypothesisViolated(f"starting potential of <{prob.name}> is outside the cone (margin {cone:.3e})")
    report = NewtonReport()

    for it in range(max_iter + 1):
        norm = float(np.abs(F).max())
        report.iterates.append(values.copy())
        report.residual_norms.append(norm)
        report.angle_residual_norms.append(float(np.abs(G).max()))
        report.cone_margins.append(cone)
        report.compatibility_gaps.append(compatibility_gap(PotentialGrid(values, gauged=False), prob))
        logger.debug(f"newton {it:3d}: |F| = {norm:.3e}, cone margin = {cone:.3e}")
        if norm <= tol:
            report.converged = True
            logger.info(f"<{prob.name}> converged in {it} Newton steps, |F| = {norm:.3e}")
            return PotentialGrid(values), report
        if it == max_iter:
            break

        linearization = Linearization(omega, prob)
        A, M = linearization.operators()
        rhs = -(G - G.mean()).ravel()
        counter = []
        delta, info = gmres(
            A, rhs, rtol=linear_rtol, atol=0.0, restart=50, maxiter=linear_maxiter, M=M,
            callback=counter.append, callback_type="pr_norm",
        )
        if info != 0:
            logger.debug(f"gmres stopped with info = {info} after {len(counter)} iterations")
        report.linear_iterations.append(len(counter))
        delta = delta.reshape(prob.grid)
        delta -= delta.mean()

        step = 1.0
        inside_seen = False
        for _ in range(max_halvings):
            trial = values + step * delta
            trial_omega, trial_F, trial_G, trial_cone = _evaluate(trial, prob, margin)
            if trial_cone > 0.0:
                inside_seen = True
                if np.abs(trial_G).max() < report.angle_residual_norms[-1]:
                    break
            step *= damping
            report.halvings += 1
            logger.debug(f"step reduced to {step:.3e}")
        else:
            if not inside_seen:
                logger.warning(f"<{prob.name}>: every trial step left the cone at iteration {it}")
                raise ConeEscape(f"Newton step left the cone after {max_halvings} halvings at iteration {it}")
            logger.warning(f"<{prob.name}>: line search stalled at |F| = {norm:.3e}")
            raise MaxIterations(f"line search stalled at iteration {it} with |F| = {norm:.3e}")
        values, omega, F, G, cone = trial, trial_omega, trial_F, trial_G, trial_cone
        report.step_sizes.append(step)

    logger.warning(f"<{prob.name}>: |F| = {report.residual_norms[-1]:.3e} after {max_iter} Newton steps")
    raise MaxIterations(f"no convergence in {max_iter} iterations, |F| = {report.residual_norms[-1]:.3e}")


def easy_twist(prob):
    """Twist solved by the zero potential"""
    s = inverse_sqrt(prob.chi)
    eigenvalues = np.linalg.eigvalsh(s @ prob.omega0 @ s)
    return density(eigenvalues, prob.theta0)


def continuity_path(prob_target, steps, f_easy=None, phi_init=None, reports=None, **newton_options):
    """Solve along f_s = (1 - s) f_easy + s f_target, s = 1/steps, ..., 1

    Every intermediate twist is checked before any solve. Each solve is warm
    started from the previous solution.

    Parameters
    ----------

    prob_target : TorusProblem
    steps : int
        Number of path steps.
    f_easy : numpy.ndarray, optional
        Starting twist, the density of omega0 by default (solved by phi = 0).
    phi_init : PotentialGrid, optional
        Solution for ``f_easy``, zero by default.
    reports : list, optional
        Receives the NewtonReport of every step.

    Returns
    -------

    PotentialGrid

    Raises
    ------

    PathHypothesisViolated
        At the first s where the twist is inadmissible or a solve leaves its
        hypotheses. It is both a PathBreak and a HypothesisViolated.
    PathBreak
        At the first s where a solve escapes the cone or does not converge.
    """
    if steps < 1:
        raise HypothesisViolated("steps must be >= 1")
    f_easy = easy_twist(prob_target) if f_easy is None else np.asarray(f_easy, dtype=float)
    path = []
    for i in range(1, steps + 1):
        s = i / steps
        prob = prob_target.with_twist((1.0 - s) * f_easy + s * prob_target.f, name=f"{prob_target.name}@s={s:.4g}")
        found = prob.twist_violations()
        if found:
            raise PathHypothesisViolated(s, "; ".join(found))
        path.append((s, prob))

    phi = phi_init
    for s, prob in path:
        try:
            phi, report = newton_solve(prob, phi, **newton_options)
        except HypothesisViolated as e:
            raise PathHypothesisViolated(s, str(e)) from e
        except (ConeEscape, MaxIterations) as e:
            raise PathBreak(s, str(e)) from e
        logger.info(f"path step s = {s:.4g} solved in {report.iterations} iterations")
        if reports is not None:
            reports.append(report)
    return phi
