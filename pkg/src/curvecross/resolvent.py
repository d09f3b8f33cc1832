"""Single-surface Green's functions at complex energy.

For one curve and one z with Im z > 0, two homogeneous solutions of
u'' = 2m(V - z)u are integrated across the grid: u- decaying toward
x -> -infinity and u+ decaying toward x -> +infinity, each seeded deep in
its forbidden (or asymptotically flat) region with the WKB logarithmic
derivative.  The Green's function is then

    G(x, x0) = 2m u-(min(x, x0)) u+(max(x, x0)) / W,   W = u- u+' - u-' u+,

symmetric by construction.  Solutions grow through hundreds of e-folds in
the forbidden regions, so they are stored as mantissa arrays with
per-node log-scale offsets and every downstream combination is assembled
in log space.

A truncated eigenfunction expansion over harmonic eigenstates is provided
as an independent oracle for the same object.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import DegenerateWronskianError
from .model import DEFAULT_GRID, HarmonicCurve, MorseCurve, harmonic_eigenstates

RESCALE_THRESHOLD = 1e100
WRONSKIAN_FLOOR = 1e-13


def _log_abs(a):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(a))


def _unit_phase(a):
    a = np.asarray(a, dtype=complex)
    mag = np.abs(a)
    out = np.zeros_like(a)
    nz = mag > 1e-300  # subnormal magnitudes carry no usable phase
    out[nz] = a[nz] / mag[nz]
    return out


def _sweep(c_nodes, c_mid, h, v0):
    """Integrate u'' = c(x) u left to right with RK4, u(x_0) = 1, u'(x_0) = v0.

    c is tabulated at nodes (nz, N) and interval midpoints (nz, N-1).
    Returns mantissas of u and u' plus per-node log-scale offsets; the
    pair is rescaled whenever |u| passes RESCALE_THRESHOLD.
    """
    nz, n = c_nodes.shape
    um = np.empty((nz, n), dtype=complex)
    ump = np.empty((nz, n), dtype=complex)
    logs = np.empty((nz, n))
    u = np.ones(nz, dtype=complex)
    v = np.asarray(v0, dtype=complex).copy()
    acc = np.zeros(nz)
    um[:, 0] = u
    ump[:, 0] = v
    logs[:, 0] = acc
    for i in range(n - 1):
        ci = c_nodes[:, i]
        cm = c_mid[:, i]
        cn = c_nodes[:, i + 1]
        k1u = v
        k1v = ci * u
        k2u = v + 0.5 * h * k1v
        k2v = cm * (u + 0.5 * h * k1u)
        k3u = v + 0.5 * h * k2v
        k3v = cm * (u + 0.5 * h * k2u)
        k4u = v + h * k3v
        k4v = cn * (u + h * k3u)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        mag = np.abs(u)
        if np.any(mag > RESCALE_THRESHOLD):
            scale = np.where(mag > RESCALE_THRESHOLD, mag, 1.0)
            u = u / scale
            v = v / scale
            acc = acc + np.log(scale)
        um[:, i + 1] = u
        ump[:, i + 1] = v
        logs[:, i + 1] = acc
    return um, ump, logs


def _wkb_log_derivative(c_edge, m, grad_edge):
    """u'/u of the solution decaying away from the grid, at a grid edge.

    kappa = sqrt(2m(V - z)) on the principal branch has Re > 0 whenever
    Im z > 0, which selects the decaying branch on both the steep and the
    asymptotically flat side (including energies above dissociation).
    """
    kappa = np.sqrt(c_edge)
    correction = m * grad_edge / (2.0 * kappa**2)
    return kappa - correction


def _from_log(log_scale, value):
    """value * exp(log_scale) with the magnitudes combined in log space,
    so a huge scale times a tiny value never passes through inf * 0."""
    mag = abs(value)
    if mag == 0.0 or not np.isfinite(log_scale.real):
        return 0.0j
    total = math.log(mag) + log_scale.real
    if total < -745.0:
        return 0.0j
    return complex((value / mag) * np.exp(total + 1j * log_scale.imag))


def _cumulative(values, dx):
    if np.iscomplexobj(values):
        return cumulative_simpson(values.real, dx=dx, initial=0.0) + 1j * cumulative_simpson(
            values.imag, dx=dx, initial=0.0
        )
    return cumulative_simpson(values, dx=dx, initial=0.0)


def _segmented_cumulative(values, offsets, dx):
    """Cumulative integral of values(i) * exp(offsets(i)) from the left,
    returned as a mantissa array with the same per-node offsets.

    offsets must be piecewise constant and non-decreasing (the rescale
    ledger of an integration sweep); each constant segment is integrated
    at its own scale and the running total is re-expressed in the scale
    of every later segment, so interior values never collapse into
    subnormals no matter how large the overall dynamic range is.
    """
    n = values.size
    out = np.empty(n, dtype=complex)
    starts = np.flatnonzero(np.diff(offsets) != 0.0) + 1
    bounds = [0, *starts.tolist(), n]
    carry = 0.0j
    carry_log = -np.inf
    for s in range(len(bounds) - 1):
        a, b = bounds[s], bounds[s + 1]
        level = offsets[a]
        if a == 0:
            cum = _cumulative(values[a:b], dx)
        else:
            prev = values[a - 1] * math.exp(offsets[a - 1] - level)
            cum = _cumulative(np.concatenate(([prev], values[a:b])), dx)[1:]
        if np.isfinite(carry_log):
            cum = cum + carry * math.exp(carry_log - level)
        out[a:b] = cum
        carry = out[b - 1]
        carry_log = level
    return out


class ResolventEvaluator:
    """Immutable evaluator of G(x, x0; z) for one curve at one complex z."""

    def __init__(self, curve, z, grid, um, ump, logm, up, upp, logp, log_w, drift):
        self.curve = curve
        self.z = complex(z)
        self.grid = grid
        self._um = um
        self._ump = ump
        self._logm = logm
        self._up = up
        self._upp = upp
        self._logp = logp
        self._log_w = log_w
        self.wronskian_drift = drift
        self._mass = curve.mass

    # -- solution access -------------------------------------------------

    def _solution_at(self, x, side):
        """(value, derivative, logscale) of u- or u+ at arbitrary x,
        cubic-Hermite interpolated inside the containing cell."""
        u, du, logs = (
            (self._um, self._ump, self._logm)
            if side == "minus"
            else (self._up, self._upp, self._logp)
        )
        grid = self.grid
        if not grid.x_min <= x <= grid.x_max:
            raise ValueError(f"x = {x} outside the grid [{grid.x_min}, {grid.x_max}]")
        j = grid.index_below(x)
        h = grid.dx
        t = (x - grid.points[j]) / h
        ref = max(logs[j], logs[j + 1])
        s0 = math.exp(logs[j] - ref)
        s1 = math.exp(logs[j + 1] - ref)
        u0, u1 = u[j] * s0, u[j + 1] * s1
        m0, m1 = du[j] * s0 * h, du[j + 1] * s1 * h
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t**2 * (3.0 - 2.0 * t)
        h11 = t**2 * (t - 1.0)
        val = h00 * u0 + h10 * m0 + h01 * u1 + h11 * m1
        d00 = 6.0 * t * (t - 1.0)
        d10 = (1.0 - t) * (1.0 - 3.0 * t)
        d01 = -d00
        d11 = t * (3.0 * t - 2.0)
        der = (d00 * u0 + d10 * m0 + d01 * u1 + d11 * m1) / h
        return val, der, ref

    def _log_solution_at(self, x, side):
        val, _, ref = self._solution_at(x, side)
        return np.log(val) + ref

    # -- Green's function values ------------------------------------------

    def point(self, x, x0):
        """G(x, x0), interpolating off-node arguments."""
        lo, hi = (x, x0) if x <= x0 else (x0, x)
        log_g = (
            math.log(2.0 * self._mass)
            + self._log_solution_at(lo, "minus")
            + self._log_solution_at(hi, "plus")
            - self._log_w
        )
        return complex(np.exp(log_g))

    def diagonal(self):
        """G(x_i, x_i) on all grid nodes."""
        logs = (
            math.log(2.0 * self._mass)
            + _log_abs(self._um)
            + self._logm
            + _log_abs(self._up)
            + self._logp
            - self._log_w.real
        )
        phase = _unit_phase(self._um) * _unit_phase(self._up) * np.exp(-1j * self._log_w.imag)
        return phase * np.exp(logs)

    def row(self, x0):
        """G(x_i, x0) on all grid nodes for a fixed x0."""
        lm0 = self._log_solution_at(x0, "minus")
        lp0 = self._log_solution_at(x0, "plus")
        base = math.log(2.0 * self._mass) - self._log_w
        x = self.grid.points
        use_left = x <= x0
        log_mag = np.where(
            use_left,
            (base + lp0).real + _log_abs(self._um) + self._logm,
            (base + lm0).real + _log_abs(self._up) + self._logp,
        )
        phase = np.where(
            use_left,
            _unit_phase(self._um) * np.exp(1j * (base + lp0).imag),
            _unit_phase(self._up) * np.exp(1j * (base + lm0).imag),
        )
        return phase * np.exp(log_mag)

    def derivative_jump(self, x):
        """d/dx G(x, x0) jump across x = x0; equals 2m for the exact G."""
        um, dum, rm = self._solution_at(x, "minus")
        up, dup, rp = self._solution_at(x, "plus")
        w_local = np.log(um * dup - dum * up) + rm + rp
        return complex(2.0 * self._mass * np.exp(w_local - self._log_w))

    # -- quadratures -------------------------------------------------------

    def _partial_sums(self, f):
        """Cumulative integrals of f u- (accumulated from the left) and
        f u+ (accumulated from the right), each returned as a mantissa
        array carrying the matching solution's per-node log offsets."""
        f = np.asarray(f, dtype=complex)
        if f.shape != self.grid.points.shape:
            raise ValueError("wavefunction must be sampled on the evaluator grid")
        dx = self.grid.dx
        tm = f * self._um
        f_minus = _segmented_cumulative(tm, self._logm, dx)
        tp = f * self._up
        f_plus = _segmented_cumulative(tp[::-1], self._logp[::-1], dx)[::-1]
        return (f_minus, tm), (f_plus, tp)

    def _interp_partial(self, cum, integrand, offsets, x):
        """Cumulative integral at off-node x via Hermite interpolation (the
        integrand is the cumulative's exact derivative up to sign); returns
        (mantissa, log offset)."""
        grid = self.grid
        j = grid.index_below(x)
        h = grid.dx
        t = (x - grid.points[j]) / h
        ref = max(offsets[j], offsets[j + 1])
        s0 = math.exp(offsets[j] - ref)
        s1 = math.exp(offsets[j + 1] - ref)
        m0, m1 = integrand[j] * s0 * h, integrand[j + 1] * s1 * h
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t**2 * (3.0 - 2.0 * t)
        h11 = t**2 * (t - 1.0)
        value = h00 * cum[j] * s0 + h10 * m0 + h01 * cum[j + 1] * s1 + h11 * m1
        return value, ref

    def vector(self, f, x0):
        """integral f(x) G(x, x0) dx for f sampled on the grid."""
        (f_minus, tm), (f_plus, tp) = self._partial_sums(f)
        fm0, lm0 = self._interp_partial(f_minus, tm, self._logm, x0)
        fp0, lp0 = self._interp_partial(f_plus, -tp, self._logp, x0)
        lum = self._log_solution_at(x0, "minus")
        lup = self._log_solution_at(x0, "plus")
        base = math.log(2.0 * self._mass) - self._log_w
        return _from_log(base + lup + lm0, fm0) + _from_log(base + lum + lp0, fp0)

    def matrix_element(self, f, g):
        """double integral f(x) G(x, x0) g(x0) dx dx0, O(N) via the
        u-/u+ factorization; the combined outer integrand is smooth."""
        (f_minus, _), (f_plus, _) = self._partial_sums(f)
        g = np.asarray(g, dtype=complex)
        log_g = _log_abs(g)
        ph_g = _unit_phase(g)

        ell = self._logm + self._logp
        w1 = log_g + _log_abs(self._up) + _log_abs(f_minus) + ell
        w2 = log_g + _log_abs(self._um) + _log_abs(f_plus) + ell
        big = float(max(np.max(w1), np.max(w2)))
        if not np.isfinite(big):
            return 0.0j
        with np.errstate(under="ignore"):
            t1 = ph_g * _unit_phase(self._up) * _unit_phase(f_minus) * np.exp(w1 - big)
            t2 = ph_g * _unit_phase(self._um) * _unit_phase(f_plus) * np.exp(w2 - big)
        total = simpson(t1 + t2, dx=self.grid.dx)
        return _from_log(math.log(2.0 * self._mass) + big - self._log_w, complex(total))


def build_resolvent_batch(curve, zs, grid=None):
    """Evaluators for one curve at several z values, sharing one set of
    integration sweeps (vectorized over z)."""
    if grid is None:
        grid = DEFAULT_GRID
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    if np.any(zs.imag <= 0.0):
        raise ValueError("resolvents require Im z > 0")
    x = grid.points
    v_nodes = np.asarray(curve.evaluate(x), dtype=float)
    v_mid = np.asarray(curve.evaluate(grid.midpoints), dtype=float)
    _check_coverage(curve, zs, v_nodes)
    m = curve.mass
    c_nodes = 2.0 * m * (v_nodes[None, :] - zs[:, None])
    c_mid = 2.0 * m * (v_mid[None, :] - zs[:, None])

    v0 = _wkb_log_derivative(c_nodes[:, 0], m, float(curve.gradient(x[0])))
    um, ump, logm = _sweep(c_nodes, c_mid, grid.dx, v0)

    v0r = _wkb_log_derivative(c_nodes[:, -1], m, -float(curve.gradient(x[-1])))
    ur, urp, logr = _sweep(c_nodes[:, ::-1], c_mid[:, ::-1], grid.dx, v0r)
    up = ur[:, ::-1]
    upp = -urp[:, ::-1]
    logp = logr[:, ::-1]

    w = um * upp - ump * up
    ell = logm + logp
    evaluators = []
    for k, z in enumerate(zs):
        r = int(np.argmax(_log_abs(w[k])))
        scale = np.abs(um[k, r] * upp[k, r]) + np.abs(ump[k, r] * up[k, r])
        if np.abs(w[k, r]) < WRONSKIAN_FLOOR * scale:
            raise DegenerateWronskianError(
                f"boundary solutions degenerate at z = {z}; grid or seeding failed"
            )
        log_w = complex(np.log(w[k, r]) + ell[k, r])
        d_mag = _log_abs(w[k]) + ell[k] - log_w.real
        d_phase = np.angle(w[k] * np.exp(-1j * log_w.imag))
        drift = float(np.max(np.abs(d_mag + 1j * d_phase)))
        evaluators.append(
            ResolventEvaluator(
                curve, z, grid, um[k], ump[k], logm[k], up[k], upp[k], logp[k], log_w, drift
            )
        )
    return evaluators


def build_resolvent(curve, z, grid=None):
    """Evaluator of G(x, x0; z) for a single complex energy."""
    return build_resolvent_batch(curve, [z], grid)[0]


def iter_resolvents(curve, zs, grid=None, chunk=64):
    """Yield evaluators for a long z scan in memory-bounded chunks."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    for start in range(0, zs.size, chunk):
        yield from build_resolvent_batch(curve, zs[start : start + chunk], grid)


def _check_coverage(curve, zs, v_nodes):
    """Edges where the curve confines must be classically forbidden; open
    channels (a dissociative curve's flat side, free propagation) are
    exempt because the WKB seed is the exact outgoing solution there."""
    z_top = float(np.max(zs.real))
    if isinstance(curve, HarmonicCurve):
        bad = v_nodes[0] <= z_top or v_nodes[-1] <= z_top
    elif isinstance(curve, MorseCurve):
        bad = v_nodes[-1] <= z_top
    else:
        bad = False
    if bad:
        raise ValueError(
            "grid does not cover the classically relevant region: potential at "
            "a confining grid edge lies below Re z"
        )


class HarmonicSpectralSum:
    """Truncated spectral representation of a harmonic-curve resolvent.

    G(x, x0) ~ sum_n phi_n(x) phi_n(x0) / (z - E_n) up to n_max.  Converges
    fast for matrix elements between smooth states; pointwise values carry
    a slowly decaying tail, estimated by point_tail_estimate.
    """

    def __init__(self, curve, z, n_max, grid=None):
        if not isinstance(curve, HarmonicCurve):
            raise ValueError("the spectral-sum oracle needs a harmonic curve")
        self.curve = curve
        self.z = complex(z)
        self.n_max = int(n_max)
        self.grid = grid if grid is not None else DEFAULT_GRID
        self.energies = curve.eigenvalue(np.arange(self.n_max + 1).astype(float))
        self.weights = 1.0 / (self.z - self.energies)
        self._table = harmonic_eigenstates(curve, self.n_max, self.grid.points)

    def point(self, x, x0):
        phi = harmonic_eigenstates(self.curve, self.n_max, np.array([x, x0]))
        return complex(np.sum(phi[:, 0] * phi[:, 1] * self.weights))

    def point_tail_estimate(self, x, x0):
        """|z - E_nmax|^-1 times the completeness deficit of the truncated
        basis at (x, x0); infinite on the diagonal, where the deficit is a
        delta function."""
        if x == x0:
            return math.inf
        phi = harmonic_eigenstates(self.curve, self.n_max, np.array([x, x0]))
        deficit = abs(float(np.sum(phi[:, 0] * phi[:, 1])))
        return deficit / abs(self.z - self.energies[-1])

    def _overlaps(self, f):
        return simpson(self._table * np.asarray(f)[None, :], dx=self.grid.dx, axis=1)

    def vector(self, f, x0):
        phi0 = harmonic_eigenstates(self.curve, self.n_max, np.array([x0]))[:, 0]
        return complex(np.sum(phi0 * self._overlaps(f) * self.weights))

    def matrix_element(self, f, g):
        return complex(np.sum(self._overlaps(f) * self._overlaps(g) * self.weights))

    def completeness_deficit(self, f):
        """1 - sum_n <phi_n|f>^2 / <f|f> for a real f on the grid."""
        f = np.asarray(f)
        norm = simpson(f * f, dx=self.grid.dx)
        return float(1.0 - np.sum(self._overlaps(f) ** 2) / norm)
