"""Analytic transition matrix of lossless multilayer spheres.

Each (tau, l) channel is solved by transferring the tangential-field
admittance u/v = (der/val) outward through the layers, where val and der are
the Riccati radial function and its material-scaled derivative.  Because the
transferred pair stays real for lossless media, the resulting eigenvalue is
of the form -N / (N + jM) with real N, M and therefore sits on the lossless
circle |2t + 1| = 1 to machine precision by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .quadrature import QuadratureRule
from .swe import TransitionMatrix, n_swe, swe_indices, vsh_matrix
from .scattering import ScatteringBackend
from .modes import ModeSet


class MieOverflow(RuntimeError):
    """Radial-function recursion lost all significance."""

    def __init__(self, l, detail=""):
        super().__init__(f"radial functions non-finite at degree l={l} {detail}")
        self.l = l


@dataclass(frozen=True)
class Layer:
    relative_permittivity: float
    relative_permeability: float
    outer_boundary_fraction: float

    def __post_init__(self):
        if not (self.relative_permittivity > 0 and math.isfinite(self.relative_permittivity)):
            raise ValueError(f"eps_r must be positive and finite, got {self.relative_permittivity}")
        if not (self.relative_permeability > 0 and math.isfinite(self.relative_permeability)):
            raise ValueError(f"mu_r must be positive and finite, got {self.relative_permeability}")
        if not 0.0 < self.outer_boundary_fraction <= 1.0:
            raise ValueError(f"boundary fraction out of (0, 1]: {self.outer_boundary_fraction}")

    @property
    def refractive_index(self) -> float:
        return math.sqrt(self.relative_permittivity * self.relative_permeability)


@dataclass(frozen=True)
class LayeredSphere:
    outer_radius_a: float
    layers: tuple

    def __post_init__(self):
        if self.outer_radius_a <= 0:
            raise ValueError("outer radius must be positive")
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("at least one layer is required")
        fracs = [lay.outer_boundary_fraction for lay in layers]
        if any(b <= a for a, b in zip(fracs, fracs[1:])):
            raise ValueError(f"boundary fractions must strictly increase: {fracs}")
        if abs(fracs[-1] - 1.0) > 1e-14:
            raise ValueError(f"outermost boundary fraction must be 1, got {fracs[-1]}")
        object.__setattr__(self, "layers", layers)

    @staticmethod
    def homogeneous(radius, eps_r, mu_r=1.0) -> "LayeredSphere":
        return LayeredSphere(radius, (Layer(eps_r, mu_r, 1.0),))

    @staticmethod
    def equal_layers(radius, eps_list, mu_list=None) -> "LayeredSphere":
        n = len(eps_list)
        mu_list = mu_list or [1.0] * n
        fr = [(i + 1) / n for i in range(n)]
        return LayeredSphere(radius, tuple(
            Layer(e, m, f) for e, m, f in zip(eps_list, mu_list, fr)))


def _riccati(l: int, x: float):
    """(psi, psi', chi, chi') with psi = x j_l(x), chi = -x y_l(x)."""
    j, jp = spherical_jn(l, x), spherical_jn(l, x, derivative=True)
    y, yp = spherical_yn(l, x), spherical_yn(l, x, derivative=True)
    return j * x, j + x * jp, -y * x, -(y + x * yp)


def _channel_eigenvalue(sphere: LayeredSphere, ka: float, tau: int, l: int) -> complex:
    """Eigenvalue t_{tau,l}; tau=1 pairs with mu, tau=2 with eps."""
    layers = sphere.layers
    first = layers[0]

    def scale(lay):
        return lay.relative_permeability if tau == 1 else lay.relative_permittivity

    # admittance pair (u, v) ~ (scaled derivative, value), defined up to scale
    x0 = ka * first.outer_boundary_fraction * first.refractive_index
    psi, dpsi, _, _ = _riccati(l, x0)
    u = (first.refractive_index / scale(first)) * dpsi
    v = psi

    for prev, lay in zip(layers, layers[1:]):
        m, p = lay.refractive_index, scale(lay)
        xa = ka * prev.outer_boundary_fraction * m
        xb = ka * lay.outer_boundary_fraction * m
        psa, dpsa, cha, dcha = _riccati(l, xa)
        psb, dpsb, chb, dchb = _riccati(l, xb)
        # coefficients (c, d) in this layer from the inner-boundary pair
        mat = np.array([[psa, cha], [(m / p) * dpsa, (m / p) * dcha]])
        try:
            c, d = np.linalg.solve(mat, np.array([v, u]))
        except np.linalg.LinAlgError as exc:
            raise MieOverflow(l, f"(layer transfer at x={xa})") from exc
        u = (m / p) * (c * dpsb + d * dchb)
        v = c * psb + d * chb
        nrm = max(abs(u), abs(v))
        if not (math.isfinite(nrm) and nrm > 0):
            raise MieOverflow(l)
        u, v = u / nrm, v / nrm

    psi, dpsi, chi, dchi = _riccati(l, ka)
    num = u * psi - v * dpsi
    den_im = u * chi - v * dchi
    t = -num / (num + 1j * den_im)
    if not np.isfinite(t):
        raise MieOverflow(l, "(exterior match)")
    return complex(t)


def channel_eigenvalues(sphere: LayeredSphere, ka: float, l_max: int) -> np.ndarray:
    """t_{tau,l} as an array of shape (2, l_max), rows tau=1, tau=2."""
    if ka <= 0:
        raise ValueError(f"ka must be positive, got {ka}")
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    out = np.empty((2, l_max), dtype=complex)
    for tau in (1, 2):
        for l in range(1, l_max + 1):
            out[tau - 1, l - 1] = _channel_eigenvalue(sphere, ka, tau, l)
    return out


def layered_tmatrix(sphere: LayeredSphere, ka: float, l_max: int) -> TransitionMatrix:
    """Diagonal transition matrix; each t_{tau,l} repeats over 2l+1 orders."""
    tch = channel_eigenvalues(sphere, ka, l_max)
    diag = np.empty(n_swe(l_max), dtype=complex)
    for idx in swe_indices(l_max):
        diag[idx.alpha] = tch[idx.tau - 1, idx.l - 1]
    k = ka / sphere.outer_radius_a
    return TransitionMatrix(l_max=l_max, entries=np.diag(diag), k=k)


def analytic_modes(sphere: LayeredSphere, ka: float, l_max: int) -> ModeSet:
    """Sphere modes sorted by significance, in coefficient space."""
    tch = channel_eigenvalues(sphere, ka, l_max)
    na = n_swe(l_max)
    diag = np.empty(na, dtype=complex)
    for idx in swe_indices(l_max):
        diag[idx.alpha] = tch[idx.tau - 1, idx.l - 1]
    order = np.argsort(-np.abs(diag), kind="stable")
    vectors = np.eye(na, dtype=complex)[:, order]
    return ModeSet(k=ka / sphere.outer_radius_a, eigenvalues=diag[order],
                   eigenvectors=vectors, rule=None)


def default_l_max(rule: QuadratureRule) -> int:
    """Largest degree the rule can carry without aliasing the projection."""
    return max(1, rule.order_capability // 2)


class MieBackend(ScatteringBackend):
    """Plane-wave scattering of a layered sphere through its T-matrix.

    If l_max is not given it is derived from the observation rule so the
    harmonic content stays within the rule's exact-integration band; pass an
    explicit l_max to study quadrature aliasing.
    """

    def __init__(self, sphere: LayeredSphere, l_max: int | None = None):
        self.sphere = sphere
        self.l_max = l_max
        self._cache = {}

    def _response_matrix(self, k: float, rule: QuadratureRule) -> np.ndarray:
        l_max = self.l_max if self.l_max is not None else default_l_max(rule)
        key = (k, l_max, id(rule))
        if key not in self._cache:
            ka = k * self.sphere.outer_radius_a
            tmat = layered_tmatrix(self.sphere, ka, l_max)
            a = vsh_matrix(l_max, rule)
            # far field per unit plane wave: (j 4 pi / k) * S samples
            self._cache[key] = (4j * math.pi / k) * (a @ tmat.entries @ a.conj().T)
        return self._cache[key]

    def far_fields(self, k, direction, polarization, rule):
        resp = self._response_matrix(k, rule)
        pidx = [i for i, p in enumerate(rule.points) if p == direction]
        if not pidx:
            raise ValueError(f"excitation direction {direction} is not a rule point")
        col = (0 if polarization == "theta" else rule.n_points) + pidx[0]
        return resp[:, col]
