"""Polygonal paths in the Borel plane with a continuous argument.

A path is a polyline.  The lifted argument at each vertex is obtained by
accumulating the angle swept along each segment, so a point on the path
is a point of the Riemann surface of the logarithm.  Paths must keep a
clearance ``eps`` from the lattice 2πiℤ∖{0}; a declared terminal lattice
point is exempt, and so is a disc around a declared centre (used for small
loops around a singularity).
"""

import cmath
import math
from dataclasses import dataclass, field

from . import mp
from .errors import PathThroughOrigin, PathTooCloseToLattice

EPS_CLEARANCE = 0.2
TWO_PI = 2 * math.pi


def _dist_point_segment(p, a, b):
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - p)


def _lattice_near(a, b, margin):
    """Indices k ≠ 0 of lattice points 2πik within ``margin`` of the segment's bounding box."""
    lo = min(a.imag, b.imag) - margin
    hi = max(a.imag, b.imag) + margin
    ks = range(math.floor(lo / TWO_PI), math.ceil(hi / TWO_PI) + 1)
    return [k for k in ks if k != 0]


def _split_vertex(v):
    """Vertex as (c, k) meaning c + 2πik, with c and k exact."""
    if isinstance(v, (tuple, list)):
        c, k = v
        return complex(c), int(k)
    return complex(v), 0


@dataclass(frozen=True)
class PathLog:
    """Polyline with lifted arguments.

    ``exact`` holds each vertex as (c, k) meaning c + 2πik, so lattice
    points are represented without rounding at any precision;
    ``vertices`` are their double-precision values.
    """

    exact: tuple
    start_arg: float = 0.0
    eps_clearance: float = EPS_CLEARANCE
    terminal: complex = None
    relax_center: complex = None
    relax_radius: float = 0.0
    vertices: tuple = field(init=False)
    lifts: tuple = field(init=False)
    cum: tuple = field(init=False)

    def __post_init__(self):
        exact = tuple(_split_vertex(v) for v in self.exact)
        object.__setattr__(self, "exact", exact)
        verts = tuple(c + complex(0, TWO_PI * k) for c, k in exact)
        if len(verts) < 2:
            raise ValueError("a path needs at least two vertices")
        object.__setattr__(self, "vertices", verts)
        from_origin = verts[0] == 0
        if from_origin:
            start = verts[1]
            lift0 = self.start_arg if self.start_arg is not None else cmath.phase(start)
            if abs((cmath.phase(start) - lift0 + math.pi) % TWO_PI - math.pi) > 1e-9:
                raise ValueError("start_arg is inconsistent with the first segment's direction")
            lifts = [lift0, lift0]
            first = 1
        else:
            a0 = verts[0]
            base = cmath.phase(a0)
            lift0 = base if self.start_arg is None else self.start_arg
            if abs((lift0 - base + math.pi) % TWO_PI - math.pi) > 1e-9:
                raise ValueError("start_arg must be an argument of the first vertex")
            lifts = [lift0]
            first = 0
        for i in range(first, len(verts) - 1):
            a, b = verts[i], verts[i + 1]
            if a == b:
                raise ValueError(f"repeated vertex {a}")
            if _dist_point_segment(0j, a, b) < 1e-14:
                raise PathThroughOrigin(f"segment {a} → {b} passes through 0")
            lifts.append(lifts[-1] + cmath.phase(b / a))
        object.__setattr__(self, "lifts", tuple(lifts))
        cum = [0.0]
        for a, b in zip(verts[:-1], verts[1:]):
            cum.append(cum[-1] + abs(b - a))
        object.__setattr__(self, "cum", tuple(cum))
        self._check_clearance()

    @property
    def from_origin(self):
        return self.vertices[0] == 0

    @property
    def length(self):
        return self.cum[-1]

    @property
    def n_segments(self):
        return len(self.vertices) - 1

    @property
    def end(self):
        return self.vertices[-1]

    @property
    def end_arg(self):
        return self.lifts[-1]

    def winding(self):
        """Number of turns of the lifted argument at the end relative to the principal one."""
        return round((self.lifts[-1] - cmath.phase(self.end)) / TWO_PI)

    def _exempt(self, p):
        if self.terminal is not None and abs(p - self.terminal) < 1e-12:
            return True
        return False

    def clearance(self):
        """Smallest distance to a lattice point 2πik, k ≠ 0, ignoring the exemptions."""
        best = math.inf
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            for k in _lattice_near(a, b, 10.0):
                p = complex(0, TWO_PI * k)
                if self._exempt(p):
                    continue
                if self.relax_center is not None and abs(p - self.relax_center) < 1e-12:
                    continue
                best = min(best, _dist_point_segment(p, a, b))
        return best

    def _check_clearance(self):
        eps = self.eps_clearance
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            for k in _lattice_near(a, b, eps):
                p = complex(0, TWO_PI * k)
                d = _dist_point_segment(p, a, b)
                if d >= eps:
                    continue
                if self._exempt(p) and abs(b - p) < 1e-12:
                    continue
                if self.relax_center is not None and abs(p - self.relax_center) < 1e-12:
                    if d >= self.relax_radius / 4:
                        continue
                raise PathTooCloseToLattice(f"segment {a} → {b} comes within {d:.3g} of {p}")

    # -------------------------------------------------------- evaluation

    def locate(self, s):
        """Segment index and local offset for arclength parameter s."""
        if s < 0 or s > self.length * (1 + 1e-15) + 1e-300:
            raise ValueError(f"parameter {s} outside [0, {self.length}]")
        for i in range(self.n_segments):
            if s <= self.cum[i + 1] or i == self.n_segments - 1:
                return i, s - self.cum[i]
        raise AssertionError

    def direction(self, i):
        a, b = self.vertices[i], self.vertices[i + 1]
        return (b - a) / abs(b - a)

    def point(self, s):
        i, t = self.locate(s)
        return self.vertices[i] + t * self.direction(i)

    def lifted(self, s):
        """(modulus, lifted argument) of the point at parameter s."""
        i, t = self.locate(s)
        a = self.vertices[i]
        z = a + t * self.direction(i)
        if a == 0:
            return abs(z), self.lifts[0]
        return abs(z), self.lifts[i] + cmath.phase(z / a)

    def segment_arg(self, i, z):
        """Lifted argument of a point z lying on segment i."""
        a = self.vertices[i]
        if a == 0:
            return self.lifts[0]
        return self.lifts[i] + cmath.phase(z / a)

    def vertex(self, i, prec):
        """Vertex i at precision ``prec``."""
        c, k = self.exact[i]
        with mp.working(prec):
            return mp.num(c, prec) + mp.two_pi_i(prec) * k

    def lift_of(self, i, z):
        """Lifted argument of a backend point z on segment i, at the point's precision."""
        ph = mp.phase(z)
        approx = self.segment_arg(i, complex(z))
        w = round((approx - float(ph)) / TWO_PI)
        return ph + 2 * mp.pi(mp.precision_of(z)) * w

    def to_json(self):
        return {
            "vertices": [[repr(c.real), repr(c.imag), k] for c, k in self.exact],
            "start_arg": self.start_arg,
            "lifts": list(self.lifts),
            "eps_clearance": self.eps_clearance,
            "terminal": None if self.terminal is None else [repr(self.terminal.real), repr(self.terminal.imag)],
        }


def polyline(vertices, start_arg=None, eps=EPS_CLEARANCE, terminal=None, relax_center=None, relax_radius=0.0):
    """Path through the given vertices; a vertex may be a complex number or a pair (c, k) for c + 2πik."""
    first = _split_vertex(vertices[0])
    at_origin = first[0] == 0 and first[1] == 0
    return PathLog(tuple(vertices), 0.0 if (start_arg is None and at_origin) else start_arg,
                   eps, None if terminal is None else complex(terminal),
                   None if relax_center is None else complex(relax_center), relax_radius)


def segment_gamma_m(m, eps=EPS_CLEARANCE):
    """The straight path from 1 to 1 + 2πim."""
    if m == 0:
        raise ValueError("m must be nonzero")
    return polyline([1, (1, m)], eps=eps)


def detour_gamma_m(m, width=0.8, eps=EPS_CLEARANCE):
    """A two-elbow path from 1 to 1 + 2πim, homotopic to the straight one."""
    w = complex(1 + width)
    return polyline([1, w, (w, m), (1, m)], eps=eps)


def make_path(kind, **kw):
    if kind == "segment_gamma_m":
        return segment_gamma_m(kw["m"], kw.get("eps", EPS_CLEARANCE))
    if kind == "polyline":
        return polyline(kw["vertices"], kw.get("start_arg"), kw.get("eps", EPS_CLEARANCE))
    raise ValueError(f"unknown path kind {kind!r}")


def lattice_index(omega):
    k = round(complex(omega).imag / TWO_PI)
    if k == 0 or abs(complex(omega) - complex(0, TWO_PI * k)) > 1e-9:
        raise ValueError(f"{omega} is not a nonzero point of 2πiℤ")
    return k


def gamma_tilde(gamma, omega):
    """(0, 1] followed by Γ (from 1 to ω + 1) and [ω + 1, ω]; ω is the terminal point."""
    k = lattice_index(omega)
    omega = complex(0, TWO_PI * k)
    v = gamma.vertices
    if abs(v[0] - 1) > 1e-12 or abs(v[-1] - (omega + 1)) > 1e-12:
        raise ValueError("Γ must run from 1 to ω + 1")
    if abs(gamma.lifts[0]) > 1e-12:
        raise ValueError("Γ must start on the principal sheet at 1")
    return PathLog((0j,) + gamma.exact + ((0, k),), 0.0, gamma.eps_clearance, omega)


def loop_path(gamma, omega, zeta0, sides=16):
    """Γ̃ cut short at ω + ζ0, followed by one counterclockwise polygonal loop around ω."""
    k = lattice_index(omega)
    zeta0 = complex(zeta0)
    r = abs(zeta0)
    th = cmath.phase(zeta0)
    loop = [(r * cmath.exp(1j * (th + TWO_PI * j / sides)), k) for j in range(1, sides)]
    verts = (0j,) + gamma.exact + ((zeta0, k),) + tuple(loop) + ((zeta0, k),)
    return PathLog(verts, 0.0, gamma.eps_clearance, None, complex(0, TWO_PI * k), 2 * r)


def direct_path(gamma, omega, zeta0):
    """Γ̃ cut short at ω + ζ0."""
    k = lattice_index(omega)
    verts = (0j,) + gamma.exact + ((complex(zeta0), k),)
    return PathLog(verts, 0.0, gamma.eps_clearance, None, complex(0, TWO_PI * k), 2 * abs(zeta0))
