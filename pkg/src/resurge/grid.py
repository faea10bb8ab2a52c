"""Quadrature grids along a path in the Borel plane.

The first segment, when it issues from 0, is a single product-integration
panel for integrands of the form t^β·(smooth); every other segment is cut
into Gauss–Legendre panels by bisection until each panel is no longer
than its distance to the lattice 2πiℤ.  A segment ending on a lattice
point is therefore graded geometrically (ratio ½) toward it, down to a
smallest panel of 2^-depth.

Every node is stored as (c, k) with ζ = c + 2πik and k the lattice index
of its segment's far end, so ζ − 2πik and e^ζ − 1 = expm1(c) keep full
relative accuracy next to a lattice point.
"""

import math
from dataclasses import dataclass

import flint
import numpy as np

from . import mp
from .errors import QuadratureStalled
from .quadrature import gauss_legendre, product_integration, spectral_integration

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class GridConfig:
    nodes: int = 16
    product_nodes: int = 24
    depth: int = 40
    max_panel: float = 1.0
    ratio: float = 1.0
    max_panels: int = 4000

    def scaled(self, factor):
        """Same panels with the node counts multiplied by ``factor``."""
        return GridConfig(max(4, round(self.nodes * factor)), max(4, round(self.product_nodes * factor)),
                          self.depth, self.max_panel, self.ratio, self.max_panels)


@dataclass
class Panel:
    seg: int
    start: int
    n: int
    kind: str
    full: list
    partial: list

    @property
    def stop(self):
        return self.start + self.n


@dataclass
class QuadGrid:
    path: object
    beta: object
    prec: int
    panels: list
    c: list
    k: list
    zeta: list
    lifts: list
    end: object
    end_lift: object

    @property
    def n(self):
        return len(self.zeta)

    def panel_of(self):
        out = np.empty(self.n, dtype=int)
        for p, pan in enumerate(self.panels):
            out[pan.start:pan.stop] = p
        return out

    def points_acb(self):
        return [mp.to_acb(z) for z in self.zeta]

    def inv_expm1(self):
        """1/(e^ζ − 1) at the nodes, as acb."""
        with mp.working(self.prec):
            return [mp.to_acb(1 / mp.expm1(c)) for c in self.c]

    def integrate(self, values):
        """Σ full weights · values over every panel: ∫ along the whole path."""
        with mp.flint_working(self.prec):
            acc = flint.acb(0)
            for pan in self.panels:
                for j in range(pan.n):
                    acc += pan.full[j] * mp.to_acb(values[pan.start + j])
        return acc

    def stats(self):
        lens = [len(p.full) for p in self.panels]
        return {"nodes": self.n, "panels": len(self.panels), "max_panel_nodes": max(lens)}


def _lattice_distance(a, b):
    """Distance from the segment [a, b] (complex doubles) to 2πiℤ."""
    lo = min(a.imag, b.imag) - TWO_PI
    hi = max(a.imag, b.imag) + TWO_PI
    best = math.inf
    for k in range(math.floor(lo / TWO_PI), math.ceil(hi / TWO_PI) + 1):
        p = complex(0, TWO_PI * k)
        d = b - a
        t = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / (abs(d) ** 2)))
        best = min(best, abs(a + t * d - p))
    return best


def _split(a, b, cfg, terminal_end, t_start=0.0):
    """Parameter intervals [t0, t1] ⊂ [t_start, 1] after bisection."""
    out = []
    length = abs(b - a)
    h_min = 2.0 ** -cfg.depth
    stack = [(t_start, 1.0)]
    while stack:
        t0, t1 = stack.pop()
        pa, pb = a + t0 * (b - a), a + t1 * (b - a)
        L = (t1 - t0) * length
        if terminal_end and t1 == 1.0:
            ok = L <= h_min
        else:
            ok = L <= cfg.max_panel and L <= cfg.ratio * _lattice_distance(pa, pb)
        if ok or L <= h_min * 1e-3:
            out.append((t0, t1))
        else:
            tm = (t0 + t1) / 2
            stack.append((tm, t1))
            stack.append((t0, tm))
        if len(out) > cfg.max_panels:
            raise QuadratureStalled(f"more than {cfg.max_panels} panels on one segment")
    return out


def build_grid(path, beta=0, cfg=None, prec=mp.DOUBLE):
    """Nodes, weights and running-integral weights along ``path``.

    ``beta`` is the exponent of the t^β factor the integrands carry on a
    first segment that starts at 0.
    """
    cfg = cfg or GridConfig()
    panels, cs, ks, zs, lifts = [], [], [], [], []
    with mp.working(prec), mp.flint_working(prec):
        two_pi_i = mp.two_pi_i(prec)
        nseg = path.n_segments
        for i in range(nseg):
            (cA, kA), (cB, kB) = path.exact[i], path.exact[i + 1]
            A = path.vertex(i, prec)
            B = path.vertex(i + 1, prec)
            t_first = 0.0
            if i == 0 and path.from_origin:
                # product panel on [0, t*] with t*·|B| ≤ max_panel
                t_first = 1.0
                while t_first * abs(path.vertices[1]) > cfg.max_panel:
                    t_first /= 2
                n = cfg.product_nodes
                s, W = product_integration(n, beta, prec)
                b = mp.num(beta, prec)
                sb = mp.exp(mp.log(s) * b)
                scale = B * mp.real(t_first, prec)
                full = [mp.to_acb(W[-1, l] * scale / sb[l]) for l in range(n)]
                partial = [[mp.to_acb(W[r, l] * scale / sb[l]) for l in range(n)] for r in range(n)]
                panels.append(Panel(i, len(zs), n, "product", full, partial))
                for l in range(n):
                    z = s[l] * scale
                    cs.append(z - two_pi_i * kB)
                    ks.append(kB)
                    zs.append(z)
                    lifts.append(mp.real(path.lifts[0], prec))
                if t_first == 1.0:
                    continue
            terminal = (i == nseg - 1 and path.terminal is not None)
            n = cfg.nodes
            x, w = gauss_legendre(n, prec)
            SI = spectral_integration(n, prec)
            delta = mp.num(cA, prec) - mp.num(cB, prec) + two_pi_i * (kA - kB)
            cBm = mp.num(cB, prec)
            for t0, t1 in _split(complex(path.vertices[i]), complex(path.vertices[i + 1]), cfg, terminal, t_first):
                h = mp.real(t1 - t0, prec)
                u0 = mp.real(1.0 - t0, prec)
                scale = h / 2 * (B - A)
                full = [mp.to_acb(w[l] * scale) for l in range(n)]
                partial = [[mp.to_acb(SI[r, l] * scale) for l in range(n)] for r in range(n)]
                panels.append(Panel(i, len(zs), n, "gl", full, partial))
                for l in range(n):
                    u = u0 - (x[l] + 1) * (h / 2)
                    c = cBm + u * delta
                    z = c + two_pi_i * kB
                    cs.append(c)
                    ks.append(kB)
                    zs.append(z)
                    lifts.append(path.lift_of(i, z))
        end = path.vertex(nseg, prec)
        end_lift = path.lift_of(nseg - 1, end) if not (nseg == 1 and path.from_origin) \
            else mp.real(path.lifts[0], prec)
    return QuadGrid(path, beta, prec, panels, cs, ks, zs, lifts, end, end_lift)
