"""Lindblad master equation: right-hand side, integrators and trajectory driver.

Three integrators are available:

``rk4_fixed``
    Classic fixed-step Runge-Kutta on the dense density matrix.
``rk45_adaptive``
    Dormand-Prince via :class:`scipy.integrate.RK45`.
``strang_split``
    Second-order splitting ``D(h/2) U(h) D(h/2)`` where the unitary ``U`` is
    applied exactly in excitation-number blocks and ``D`` is the exact
    product of single-site noise channels. Every factor is completely
    positive and trace preserving. Requires an excitation-conserving
    Hamiltonian, which every XX chain is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np
from scipy.integrate import RK45

from .errors import IntegrationError, ParameterError
from .model import NoiseKind
from .quantum_core import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    DensityMatrix,
    QuantumOperator,
    embed_site_operator,
)

RK4 = "rk4_fixed"
RK45_ADAPTIVE = "rk45_adaptive"
STRANG = "strang_split"
METHODS = (RK4, RK45_ADAPTIVE, STRANG)


@dataclass(frozen=True)
class NoiseModel:
    kind: NoiseKind = NoiseKind.NONE
    gamma: float = 0.0
    n_bar: float = 0.0
    jump_sites: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        object.__setattr__(self, "jump_sites", tuple(int(s) for s in self.jump_sites))
        if self.gamma < 0 or self.n_bar < 0:
            raise ParameterError("gamma and n_bar must be nonnegative")

    @classmethod
    def from_spec(cls, spec):
        return cls(spec.noise_kind, spec.gamma, spec.n_bar, tuple(spec.jump_sites))

    @property
    def active(self):
        return self.kind is not NoiseKind.NONE and self.gamma > 0 and len(self.jump_sites) > 0

    def check_sites(self, n_sites):
        # Chains (N >= 3) only admit noise on the channel; smaller systems are
        # bare qubits used for reference calculations.
        lo, hi = (2, n_sites - 1) if n_sites >= 3 else (1, n_sites)
        bad = [s for s in self.jump_sites if not lo <= s <= hi]
        if bad:
            raise ParameterError(f"jump sites {bad} are not channel sites of an N={n_sites} chain")

    def jump_operators(self, n_sites):
        """List of ``(rate, L)`` pairs; each contributes ``rate * (L rho L+ - {L+L, rho}/2)``."""
        self.check_sites(n_sites)
        if not self.active:
            return []
        ops = []
        for k in self.jump_sites:
            if self.kind is NoiseKind.DISSIPATION:
                ops.append((self.gamma * (self.n_bar + 1), embed_site_operator(SIGMA_MINUS, k, n_sites)))
                if self.n_bar > 0:
                    ops.append((self.gamma * self.n_bar, embed_site_operator(SIGMA_PLUS, k, n_sites)))
            else:
                ops.append((self.gamma, embed_site_operator(SIGMA_Z, k, n_sites)))
        return ops

    def to_dict(self):
        return {"kind": self.kind.value, "gamma": self.gamma, "n_bar": self.n_bar,
                "jump_sites": list(self.jump_sites)}


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = RK4
    dt: float = 0.02
    tolerance: float = 1e-8
    max_dt: float = 1.0
    min_dt: float = 1e-8

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown integrator {self.method!r}; choose from {METHODS}")
        if not (self.dt > 0 and self.tolerance > 0 and self.max_dt > 0):
            raise ParameterError("dt, tolerance and max_dt must be positive")
        if self.dt > self.max_dt:
            raise ParameterError(f"dt={self.dt} exceeds max_dt={self.max_dt}")

    def to_dict(self):
        return {"method": self.method, "dt": self.dt, "tolerance": self.tolerance,
                "max_dt": self.max_dt, "min_dt": self.min_dt}


class LindbladGenerator:
    """Precomputed pieces of the master-equation generator.

    Operators stay sparse except for small systems, where dense products
    are faster.
    """

    DENSE_BELOW = 64

    def __init__(self, H, noise):
        self.n_sites = H.n_sites
        self.dim = H.dim
        dense = self.dim <= self.DENSE_BELOW

        def conv(m):
            return m.toarray() if dense else m

        self.H = conv(H.matrix)
        self.jumps = []
        K = QuantumOperator.zero(H.n_sites)
        for rate, L in noise.jump_operators(H.n_sites):
            self.jumps.append((rate, conv(L.matrix), conv(L.dag().matrix)))
            K = K + rate * (L.dag() @ L)
        self.K = conv(K.matrix) if K.matrix.nnz else None

    def __call__(self, rho):
        if rho.shape != (self.dim, self.dim):
            raise ParameterError(f"state shape {rho.shape} does not match operator dimension {self.dim}")
        out = -1j * (self.H @ rho - rho @ self.H)
        for rate, L, Ldag in self.jumps:
            out += rate * ((L @ rho) @ Ldag)
        if self.K is not None:
            out -= 0.5 * (self.K @ rho + rho @ self.K)
        return out


def lindblad_rhs(rho, H, noise):
    """Time derivative of ``rho`` under the master equation.

    ``-i[H, rho] + sum_k rate_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2)`` where for
    dissipation the jump set is ``sigma-`` at rate ``gamma (n_bar + 1)`` and
    ``sigma+`` at rate ``gamma n_bar``; for dephasing it is ``sigma_z`` at
    rate ``gamma``. Returns a raw traceless array.
    """
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return LindbladGenerator(H, noise)(data)


# --------------------------------------------------------------------------
# state containers used by the trajectory driver


class Evolver:
    """Mutable working copy of a state, stored in some permutation of the basis.

    ``order[i]`` is the natural basis index held at internal position ``i``.
    """

    def __init__(self, n_sites, order=None):
        self.n_sites = n_sites
        self.dim = 2**n_sites
        self._identity_order = order is None
        self.order = np.arange(self.dim) if order is None else order
        self.position = np.empty_like(self.order)
        self.position[self.order] = np.arange(self.dim)
        self.rho = None
        self._reduce_index = {}

    def load(self, rho):
        data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        if data.shape != (self.dim, self.dim):
            raise ParameterError(f"state shape {data.shape} does not match dimension {self.dim}")
        data = 0.5 * (data + data.conj().T)
        if self._identity_order:
            self.rho = np.array(data, dtype=complex)
        else:
            self.rho = np.ascontiguousarray(data[np.ix_(self.order, self.order)])

    def natural(self):
        if self._identity_order:
            return self.rho.copy()
        return self.rho[np.ix_(self.position, self.position)]

    def density(self):
        return DensityMatrix(self.n_sites, self.natural())

    def trace(self):
        return complex(np.trace(self.rho))

    def purity(self):
        return float(np.vdot(self.rho, self.rho).real)

    def _gather_index(self, keep):
        if keep not in self._reduce_index:
            n = self.n_sites
            traced = [s for s in range(1, n + 1) if s not in keep]

            def spread(values, sites):
                out = np.zeros_like(values)
                for j, site in enumerate(sites):
                    out |= ((values >> (len(sites) - 1 - j)) & 1) << (n - site)
                return out

            kpart = spread(np.arange(2 ** len(keep)), keep)
            tpart = spread(np.arange(2 ** len(traced)), traced)
            self._reduce_index[keep] = self.position[kpart[:, None] | tpart[None, :]]
        return self._reduce_index[keep]

    def reduced(self, keep_sites):
        """Reduced density matrix (raw array) on ``keep_sites``, strictly increasing."""
        keep = tuple(int(s) for s in keep_sites)
        G = self._gather_index(keep)
        return self.rho[G[:, None, :], G[None, :, :]].sum(axis=-1)

    def resync(self):
        """Hook run after ``rho`` was modified in place by the caller."""

    def advance(self, duration):
        raise NotImplementedError


class RK4Evolver(Evolver):
    def __init__(self, H, noise, config):
        super().__init__(H.n_sites)
        self.rhs = LindbladGenerator(H, noise)
        self.config = config
        self.trivial = not noise.active and H.matrix.nnz == 0

    def step(self, h):
        if self.trivial:
            return
        f, rho = self.rhs, self.rho
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        self.rho = 0.5 * (rho + rho.conj().T)

    def advance(self, duration):
        n = _n_steps(duration, self.config.dt)
        for _ in range(n):
            self.step(duration / n)


class RK45Evolver(Evolver):
    def __init__(self, H, noise, config):
        super().__init__(H.n_sites)
        self.rhs = LindbladGenerator(H, noise)
        self.config = config
        self.t = 0.0

    def advance(self, duration):
        if duration <= 0:
            return
        cfg = self.config
        shape = self.rho.shape

        def fun(t, y):
            return self.rhs(y.reshape(shape)).ravel()

        solver = RK45(
            fun, self.t, self.rho.ravel(), self.t + duration,
            max_step=cfg.max_dt, rtol=cfg.tolerance, atol=cfg.tolerance,
            first_step=min(cfg.dt, duration),
        )
        while solver.status == "running":
            msg = solver.step()
            if solver.status == "failed" or (solver.status == "running" and solver.step_size < cfg.min_dt):
                raise IntegrationError(
                    f"adaptive integration failed at t={solver.t}: {msg or 'step size underflow'}",
                    t=solver.t, step_size=solver.step_size, tolerance=cfg.tolerance,
                )
        self.t += duration
        rho = solver.y.reshape(shape)
        self.rho = 0.5 * (rho + rho.conj().T)


# --------------------------------------------------------------------------
# splitting integrator


@lru_cache(maxsize=None)
def _popcounts(n_sites):
    idx = np.arange(2**n_sites)
    return np.array([bin(i).count("1") for i in idx], dtype=np.int64)


@numba.njit(cache=True)
def _population_transfer_kernel(rho, idx0, idx1, runs, allowed, keep0, gain0, gain1, keep1):
    # Population exchange of generalized amplitude damping, one site at a time.
    # idx0[s, p] / idx1[s, p]: internal positions of a basis state with site s
    # empty / excited and all other bits equal, sorted by idx0. runs[s, n] is
    # where excitation sector n starts in that list. Sector pairs not marked
    # in ``allowed`` hold only zeros and are skipped.
    n_jump = idx0.shape[0]
    n_sec = allowed.shape[0]
    for s in range(n_jump):
        i0 = idx0[s]
        i1 = idx1[s]
        for A in range(n_sec):
            for p in range(runs[s, A], runs[s, A + 1]):
                r0 = rho[i0[p]]
                r1 = rho[i1[p]]
                for B in range(n_sec):
                    if not allowed[A, B]:
                        continue
                    for q in range(runs[s, B], runs[s, B + 1]):
                        b0 = i0[q]
                        b1 = i1[q]
                        x00 = r0[b0]
                        x11 = r1[b1]
                        r0[b0] = keep0 * x00 + gain0 * x11
                        r1[b1] = gain1 * x00 + keep1 * x11


def _bit_reversal(n_sites):
    idx = np.arange(2**n_sites)
    out = np.zeros_like(idx)
    for k in range(n_sites):
        out |= ((idx >> k) & 1) << (n_sites - 1 - k)
    return out


def _mirror_sorted_order(n_sites):
    """Basis order: by excitation number, then [mirror leads, mirror-fixed, partners].

    Within a sector the lead ``x < mirror(x)`` come first, then states equal
    to their mirror image, then the partners of the leads in the same order.
    The even/odd mirror split of a block is then a sum of contiguous slices.
    """
    pop = _popcounts(n_sites)
    rev = _bit_reversal(n_sites)
    order, layout = [], []
    for k in range(n_sites + 1):
        states = np.flatnonzero(pop == k)
        leads = states[states < rev[states]]
        fixed = states[states == rev[states]]
        order.extend([leads, fixed, rev[leads]])
        layout.append((len(leads), len(fixed)))
    return np.concatenate(order), layout


_ROOT2 = math.sqrt(2)


def _split_block(blk, la, lb):
    """Even and odd parts of a mirror-symmetric block in the layout above."""
    pa, fa = la
    pb, fb = lb
    x11 = blk[:pa, :pb]
    x12 = blk[:pa, pb + fb:]
    even = np.empty((pa + fa, pb + fb), dtype=blk.dtype)
    even[:pa, :pb] = x11 + x12
    even[:pa, pb:] = _ROOT2 * blk[:pa, pb:pb + fb]
    even[pa:, :pb] = _ROOT2 * blk[pa:pa + fa, :pb]
    even[pa:, pb:] = blk[pa:pa + fa, pb:pb + fb]
    return even, x11 - x12


def _join_block(even, odd, out, la, lb):
    pa, fa = la
    pb, fb = lb
    epp = even[:pa, :pb]
    x11 = 0.5 * (epp + odd)
    x12 = 0.5 * (epp - odd)
    xpf = even[:pa, pb:] / _ROOT2
    xfp = even[pa:, :pb] / _ROOT2
    out[:pa, :pb] = x11
    out[pa + fa:, pb + fb:] = x11
    out[:pa, pb + fb:] = x12
    out[pa + fa:, :pb] = x12
    out[:pa, pb:pb + fb] = xpf
    out[pa + fa:, pb:pb + fb] = xpf
    out[pa:pa + fa, :pb] = xfp
    out[pa:pa + fa, pb + fb:] = xfp
    out[pa:pa + fa, pb:pb + fb] = even[pa:, pb:]


class SplitEvolver(Evolver):
    """Strang splitting with exact block unitaries and exact local noise channels.

    The state is kept sorted by excitation number so that the unitary acts
    on contiguous blocks. Only blocks whose charge (row minus column
    excitation number) occurs in the loaded state are propagated.
    """

    def __init__(self, H, noise, config):
        n = H.n_sites
        pop = _popcounts(n)
        order, self.layout = _mirror_sorted_order(n)
        super().__init__(n, order)
        self.config = config
        self.noise = noise
        noise.check_sites(n)
        spop = pop[order]
        self.offsets = np.searchsorted(spop, np.arange(n + 2))
        Hs = H.matrix[order][:, order].tocoo()
        if np.any(spop[Hs.row] != spop[Hs.col]):
            raise ParameterError("strang_split requires an excitation-number conserving Hamiltonian")
        Hs = Hs.tocsr()
        self.eig = [np.linalg.eigh(Hs[self.sector(s), self.sector(s)].toarray()) for s in range(n + 1)]
        self._setup_reflection(Hs, noise)
        self.use_reflection = False
        self._unitaries = {}
        self._factors = {}
        self.blocks = []
        self.allowed = np.ones((n + 1, n + 1), dtype=np.bool_)

        if noise.active:
            mask = 0
            for k in noise.jump_sites:
                mask |= 1 << (n - k)
            # number of noisy sites on which row and column basis states differ
            self.flip_count = pop[np.bitwise_and(order[:, None] ^ order[None, :], mask)].astype(np.float64)
        if noise.active and noise.kind is NoiseKind.DISSIPATION:
            idx0, idx1, runs = [], [], []
            states = np.arange(2**n)
            for k in noise.jump_sites:
                bit = 1 << (n - k)
                excited = states[(states & bit) != 0]
                p0 = self.position[excited ^ bit]
                p1 = self.position[excited]
                srt = np.argsort(p0)
                idx0.append(p0[srt])
                idx1.append(p1[srt])
                runs.append(np.searchsorted(p0[srt], self.offsets))
            self.idx0 = np.ascontiguousarray(idx0, dtype=np.int64)
            self.idx1 = np.ascontiguousarray(idx1, dtype=np.int64)
            self.runs = np.ascontiguousarray(runs, dtype=np.int64)
            self.rate_down = noise.gamma * (noise.n_bar + 1)
            self.rate_up = noise.gamma * noise.n_bar

    def sector(self, s):
        return slice(self.offsets[s], self.offsets[s + 1])

    def _setup_reflection(self, Hs, noise):
        # Mirror symmetry of H and of the noisy sites lets the unitary act on
        # even and odd halves of each sector separately (about 4x fewer flops).
        n = self.n_sites
        self.mirror = self.position[_bit_reversal(n)[self.order]]
        self.eig_split = None
        sites = set(noise.jump_sites) if noise.active else set()
        if sites != {n + 1 - k for k in sites}:
            return
        if abs(Hs - Hs[self.mirror][:, self.mirror]).max() > 0:
            return
        self.eig_split = []
        for s, lay in enumerate(self.layout):
            sl = self.sector(s)
            even, odd = _split_block(Hs[sl, sl].toarray(), lay, lay)
            self.eig_split.append((np.linalg.eigh(even), np.linalg.eigh(odd)))

    def resync(self):
        """Re-derive the mirror shortcut after the state was changed from outside."""
        if self.eig_split is None:
            self.use_reflection = False
            return
        m = self.mirror
        scale = max(np.abs(self.rho).max(), 1e-300)
        self.use_reflection = bool(np.abs(self.rho - self.rho[np.ix_(m, m)]).max() <= 1e-12 * scale)

    def load(self, rho):
        super().load(rho)
        n = self.n_sites
        candidates = [(a, b) for a in range(n + 1) for b in range(a + 1)]
        present = {a - b for a, b in candidates if np.any(self.rho[self.sector(a), self.sector(b)])}
        self.charges = present | {-q for q in present}
        # For a positive state, block (a, b) can be nonzero only if both diagonal blocks are.
        self.active = {a for a in range(n + 1) if np.any(self.rho[self.sector(a), self.sector(a)])}
        self._refresh_blocks()
        self.resync()

    def _refresh_blocks(self):
        n = self.n_sites
        act = self.active
        self.blocks = [(a, b) for a in sorted(act) for b in sorted(act)
                       if b <= a and a - b in self.charges]
        allowed = np.zeros((n + 1, n + 1), dtype=np.bool_)
        for A in range(n):
            for B in range(n):
                if A - B in self.charges and ({A, B} <= act or {A + 1, B + 1} <= act):
                    allowed[A, B] = True
        self.allowed = allowed

    def _grow_active(self):
        # Jumps move population one sector down (sigma-) or up (sigma+).
        grown = set(self.active)
        if self.rate_down > 0:
            grown |= {a - 1 for a in self.active if a > 0}
        if self.rate_up > 0:
            grown |= {a + 1 for a in self.active if a < self.n_sites}
        if grown != self.active:
            self.active = grown
            self._refresh_blocks()

    def _unitary_blocks(self, h):
        key = (round(h, 12), self.use_reflection)
        if key not in self._unitaries:
            def prop(E, V):
                return (V * np.exp(-1j * E * h)) @ V.conj().T

            if self.use_reflection:
                self._unitaries[key] = [(prop(*e), prop(*o)) for e, o in self.eig_split]
            else:
                self._unitaries[key] = [prop(E, V) for E, V in self.eig]
        return self._unitaries[key]

    def _apply_unitary(self, h):
        U = self._unitary_blocks(h)
        rho = self.rho
        for a, b in self.blocks:
            sa, sb = self.sector(a), self.sector(b)
            if self.use_reflection:
                la, lb = self.layout[a], self.layout[b]
                even, odd = _split_block(rho[sa, sb], la, lb)
                even = U[a][0] @ even @ U[b][0].conj().T
                odd = U[a][1] @ odd @ U[b][1].conj().T
                _join_block(even, odd, rho[sa, sb], la, lb)
            else:
                rho[sa, sb] = U[a] @ rho[sa, sb] @ U[b].conj().T
            if a != b:
                rho[sb, sa] = rho[sa, sb].conj().T

    def _coherence_factor(self, rate, t):
        key = (rate, round(t, 12))
        if key not in self._factors:
            if len(self._factors) > 4:
                self._factors.clear()
            self._factors[key] = np.exp(-rate * t * self.flip_count)
        return self._factors[key]

    def _apply_noise(self, t):
        if t <= 0 or not self.noise.active:
            return
        if self.noise.kind is NoiseKind.DEPHASING:
            self.rho *= self._coherence_factor(2.0 * self.noise.gamma, t)
            return
        self._grow_active()
        total = self.rate_down + self.rate_up
        decay = math.exp(-total * t)
        p_up = self.rate_up / total
        gain1 = p_up * (1 - decay)
        gain0 = (1 - p_up) * (1 - decay)
        self.rho *= self._coherence_factor(0.5 * total, t)
        _population_transfer_kernel(
            self.rho, self.idx0, self.idx1, self.runs, self.allowed,
            1.0 - gain1, gain0, gain1, 1.0 - gain0,
        )

    def advance(self, duration):
        n = _n_steps(duration, self.config.dt)
        if n == 0:
            return
        h = duration / n
        self._apply_noise(0.5 * h)
        for i in range(n):
            self._apply_unitary(h)
            self._apply_noise(h if i < n - 1 else 0.5 * h)


def _n_steps(duration, dt):
    if duration <= 1e-12:
        return 0
    return max(1, math.ceil(duration / dt - 1e-9))


def make_evolver(H, noise, config=None):
    config = config or IntegratorConfig()
    if config.method == RK4:
        return RK4Evolver(H, noise, config)
    if config.method == RK45_ADAPTIVE:
        return RK45Evolver(H, noise, config)
    return SplitEvolver(H, noise, config)


def step(rho, H, noise, config=None, dt=None):
    """Advance ``rho`` by a single integrator step of length ``dt``."""
    config = config or IntegratorConfig()
    dt = config.dt if dt is None else dt
    if dt > config.max_dt:
        raise ParameterError(f"dt={dt} exceeds max_dt={config.max_dt}")
    ev = make_evolver(H, noise, config)
    ev.load(rho)
    if config.method == RK4:
        ev.step(dt)
    else:
        ev.advance(dt)
    return ev.density()


def checkpoint_times(t_span, sample_dt, event_times=()):
    """Merged, sorted ``(time, is_sample, is_event)`` checkpoints in ``[0, t_span]``."""
    if t_span < 0:
        raise ParameterError("t_span must be nonnegative")
    if sample_dt <= 0:
        raise ParameterError("sample_dt must be positive")
    eps = 1e-9 * max(1.0, t_span)
    n_samples = int(math.floor(t_span / sample_dt + 1e-9))
    points = [[k * sample_dt, True, False] for k in range(n_samples + 1)]
    extra = []
    for t in sorted(event_times):
        if t <= eps or t > t_span + eps:
            continue
        k = round(t / sample_dt)
        if k <= n_samples and abs(k * sample_dt - t) <= eps:
            points[k][2] = True
        elif not extra or abs(extra[-1][0] - t) > eps:
            extra.append([t, False, True])
    return [tuple(p) for p in sorted(points + extra, key=lambda p: p[0])]


def evolve(rho, H, noise, config=None, t_span=0.0, sample_dt=1.0, observer=None,
           event_times=(), on_event=None):
    """Integrate the master equation, calling ``observer(t, state)`` at multiples of ``sample_dt``.

    ``state`` is the live :class:`Evolver`; the default observer returns a
    :class:`DensityMatrix` snapshot. ``on_event(t, state)`` runs at every
    time in ``event_times`` before any sample at the same time is taken.
    Returns a list of ``(t, observation)``.
    """
    observer = observer or (lambda t, state: state.density())
    ev = make_evolver(H, noise, config)
    ev.load(rho)
    out = []
    t_now = 0.0
    for t, is_sample, is_event in checkpoint_times(t_span, sample_dt, event_times):
        ev.advance(t - t_now)
        t_now = t
        if is_event and on_event is not None:
            on_event(t, ev)
            ev.resync()
        if is_sample:
            out.append((t, observer(t, ev)))
    return out
