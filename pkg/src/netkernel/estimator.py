"""Scikit-learn style estimator facade over maximum-likelihood fitting.

The estimator surface (``fit`` / ``score`` / ``get_params`` /
``set_params``) wraps :func:`netkernel.gp.fit`.  ``X`` is a
:class:`~netkernel.gp.SpaceTimeDesign` (network + points + times) and
``y`` the observation vector; constructor arguments are hyperparameters
in the scikit-learn sense, and fitted quantities get trailing-underscore
attributes.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .errors import InvalidParamsError
from .gp import SpaceTimeDesign, fit, loglik


class NetworkKernelRegressor(BaseEstimator):
    """Maximum-likelihood space-time kernel fit on a network.

    Parameters
    ----------
    model : str or callable, default "T"
        Model family: a shortcut name ("T", "C1", "C2") or a callable
        ``(sigma2, c_S, c_T) -> kernel``.
    nugget : float, default 0.1
        Known observation-noise variance added to the diagonal.
    n_starts : int, default 3
        Deterministic multi-start count for the optimizer.
    fatol : float, default 1e-8
        Simplex function-value convergence tolerance.
    max_iter : int, default 2000
        Iteration cap per optimizer start.

    Attributes (after ``fit``)
    --------------------------
    sigma2_, c_s_, c_t_ : float estimated parameters
    loglik_ : float maximized log-likelihood
    converged_ : bool, n_iter_ : int, result_ : FitResult
    """

    def __init__(self, model="T", nugget=0.1, n_starts=3, fatol=1e-8,
                 max_iter=2000):
        self.model = model
        self.nugget = nugget
        self.n_starts = n_starts
        self.fatol = fatol
        self.max_iter = max_iter

    def fit(self, X, y):
        if not isinstance(X, SpaceTimeDesign):
            raise InvalidParamsError(
                "X must be a SpaceTimeDesign (network, points, times)")
        result = fit(X, self.model, y, nugget=self.nugget,
                     init=None, fatol=self.fatol, max_iter=self.max_iter,
                     n_starts=self.n_starts)
        self.result_ = result
        self.sigma2_ = result.sigma2
        self.c_s_ = result.c_S
        self.c_t_ = result.c_T
        self.loglik_ = result.loglik
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        return self

    def kernel_(self):
        """Kernel object at the fitted parameters."""
        self._check_fitted()
        from .gp import _resolve_family
        return _resolve_family(self.model)(self.sigma2_, self.c_s_,
                                           self.c_t_)

    def score(self, X, y):
        """Log-likelihood of (X, y) under the fitted parameters."""
        self._check_fitted()
        if not isinstance(X, SpaceTimeDesign):
            raise InvalidParamsError(
                "X must be a SpaceTimeDesign (network, points, times)")
        return loglik(X, self.kernel_(), self.nugget, y)

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise InvalidParamsError("estimator is not fitted yet")
