""" Local target generation.

A far away target contour generally does not lie in the space spanned by the
current feature basis. The search below walks back from the final target
towards the current contour, ``c_i + (c* - c_i) / eta`` for eta = 1, 2, ...,
until the candidate is well represented by the first k components.
"""
from __future__ import annotations
from dataclasses import dataclass, field
import numpy as np
from shapeservo.feature.pca import ProjectionBasis, FeatureVector, project_full
from shapeservo.geometry.contour import Contour, interpolate_toward
from shapeservo.geometry.utils import close_to_zero
import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LocalTarget:
    """ Result of `local_target`.

    Attributes
    ----------
    contour : Contour
        The intermediate target contour.
    features : FeatureVector
        Its first k projected components.
    eta : int
        Divisor of the step towards the final target.
    psi : float
        Fraction of the candidate's projection carried by the first k
        components.
    capped : bool
        True if the search hit eta_max without meeting the threshold, in
        which case the best candidate seen is returned.
    """

    contour: Contour = field(repr=False)
    features: FeatureVector = field(repr=False)
    eta: int
    psi: float
    capped: bool = False


def projection_ratio(s_p, k: int) -> float:
    """ ``sum |s_p[:k]| / sum |s_p|``, zero when the projection vanishes.
    """
    magnitudes = np.abs(s_p)
    total = float(np.sum(magnitudes))
    if close_to_zero(total):
        return 0.0
    return float(np.sum(magnitudes[:k]) / total)


def local_target(
    basis: ProjectionBasis,
    current: Contour,
    final_target: Contour,
    epsilon_psi: float = 0.8,
    eta_max: int = 64,
) -> LocalTarget:
    """ Finds an intermediate target representable in the current basis.

        Parameters
        ----------
        basis : ProjectionBasis
            Basis fitted on the current window.
        current : Contour
            The latest observed contour.
        final_target : Contour
            The desired contour.
        epsilon_psi : float
            Acceptance threshold on the projection ratio.
        eta_max : int
            Largest divisor tried.

        Returns
        -------
        LocalTarget
            The smallest eta whose ratio reaches `epsilon_psi`, or the eta
            before the ratio first decreases, or the best candidate at the cap.
    """
    k = basis.k
    if np.array_equal(current.vector, final_target.vector):
        s_p = project_full(basis, current)
        return LocalTarget(current, s_p[:k], 1, projection_ratio(s_p, k))

    best = None
    previous = None
    psi_previous = 0.0
    for eta in range(1, eta_max + 1):
        candidate = interpolate_toward(current, final_target, 1.0 / eta)
        s_p = project_full(basis, candidate)
        psi = projection_ratio(s_p, k)
        result = LocalTarget(candidate, s_p[:k], eta, psi)
        if psi >= epsilon_psi:
            return result
        if previous is not None and psi < psi_previous:
            return previous
        if best is None or psi > best.psi:
            best = result
        previous, psi_previous = result, psi

    logger.warning(
        "Local target search capped at eta={}, best psi {:.3f}".format(eta_max, best.psi)
    )
    return LocalTarget(best.contour, best.features, best.eta, best.psi, capped=True)
