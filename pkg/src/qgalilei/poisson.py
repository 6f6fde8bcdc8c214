"""Poisson-coalgebra realizations and the integrable systems they generate.

Each family provides a one-particle phase-space realization of K, H, P, M,
the Poisson version of its coproduct (as a map from left/right block
values to the composed values), and its Casimirs.  Iterating the coproduct
gives N-particle generators; any function of them Poisson-commutes with the
composed Casimirs.  Derivatives are taken with forward-mode dual numbers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

SWITCHOVER = 1e-6
GENERATORS = ("K", "H", "P", "M")


class EvaluationError(ArithmeticError):
    pass


class BlowUpError(ArithmeticError):
    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


# ---------------------------------------------------------------------------
# dual numbers

class Dual:
    """Value plus gradient with respect to the phase-space coordinates."""

    __slots__ = ("val", "grad")

    def __init__(self, val: float, grad: np.ndarray):
        self.val = float(val)
        self.grad = grad

    @staticmethod
    def variables(values: Sequence[float]) -> list["Dual"]:
        n = len(values)
        eye = np.eye(n)
        return [Dual(v, eye[i]) for i, v in enumerate(values)]

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        return Dual(other, np.zeros_like(self.grad))

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.grad + other.grad)
        return Dual(self.val + other, self.grad)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.grad - other.grad)
        return Dual(self.val - other, self.grad)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.grad)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.grad * other.val + other.grad * self.val)
        return Dual(self.val * other, self.grad * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val / other.val,
                        (self.grad * other.val - other.grad * self.val) / other.val ** 2)
        return Dual(self.val / other, self.grad / other)

    def __rtruediv__(self, other):
        return Dual(other / self.val, -other * self.grad / self.val ** 2)

    def __pow__(self, k):
        if isinstance(k, Dual):
            raise TypeError("dual exponent not supported")
        if k == 0:
            return Dual(1.0, np.zeros_like(self.grad))
        return Dual(self.val ** k, k * self.val ** (k - 1) * self.grad)

    def __abs__(self):
        return self if self.val >= 0 else -self

    def __repr__(self):
        return f"Dual({self.val!r}, {self.grad!r})"


def _unary(f, df):
    def op(x):
        if isinstance(x, Dual):
            return Dual(f(x.val), df(x.val) * x.grad)
        return f(x)
    return op


exp = _unary(math.exp, math.exp)
expm1 = _unary(math.expm1, math.exp)
sinh = _unary(math.sinh, math.cosh)
cosh = _unary(math.cosh, math.sinh)
sin = _unary(math.sin, math.cos)
cos = _unary(math.cos, lambda v: -math.sin(v))
log = _unary(math.log, lambda v: 1.0 / v)


def value(x) -> float:
    return x.val if isinstance(x, Dual) else float(x)


def expm1_over(u, a: float):
    """(e^{a u} - 1)/a with a Taylor fallback when |a u| is tiny."""
    if abs(a * value(u)) < SWITCHOVER:
        y = u * a
        return u * (1 + y / 2 + y * y / 6 + y * y * y / 24)
    return expm1(u * a) / a


def deformed_mass(m, x: float):
    """(e^{x m} - 1)/x, equal to m at x = 0."""
    return expm1_over(m, x)


def sinh_quarter(p, alpha: float):
    """sinh(alpha p/4)/(alpha/4), equal to p at alpha = 0."""
    y = p * (alpha / 4)
    if abs(value(y)) < SWITCHOVER:
        return p * (1 + y * y / 6 + y ** 4 / 120)
    return sinh(y) / (alpha / 4)


def sinh_quarter_sq(p, alpha: float):
    """(sinh(alpha p/4)/(alpha/4))^2, equal to p^2 at alpha = 0."""
    y = p * (alpha / 4)
    if abs(value(y)) < SWITCHOVER:
        return p * p * (1 + y * y / 3 + y ** 4 * (2 / 45))
    s = sinh(y) / (alpha / 4)
    return s * s


# ---------------------------------------------------------------------------
# families

Block = dict  # generator -> value (float or Dual)


@dataclass(frozen=True)
class PoissonFamily:
    """A Poisson Galilei coalgebra with numeric parameters."""

    tag: str
    params: Mapping[str, float] = field(default_factory=dict)

    def p(self, name: str) -> float:
        return float(self.params.get(name, 0.0))

    # one-particle realization
    def one_particle(self, q, p, m) -> Block:
        t = self.tag
        if t == "none":
            return {"K": m * q, "H": p * p / (2 * m), "P": p, "M": m}
        if t == "standard":
            mm = deformed_mass(m, 2 * self.p("xi"))
            return {"K": mm * q, "H": p * p / (2 * mm), "P": p, "M": m}
        if t == "nonstandard":
            return {"K": m * q, "H": p * p / (2 * m), "P": p - self.p("beta3") / 2 * m * m,
                    "M": m}
        if t == "Ib":
            xi, b3 = self.p("xi"), self.p("beta3")
            mm = deformed_mass(m, 2 * xi)
            g = deformed_mass(m, xi)
            return {"K": mm * q, "H": p * p / (2 * mm), "P": p - b3 / 2 * g * g, "M": m}
        if t == "IIb":
            a = self.p("alpha")
            e = exp(p * (-a / 2))
            return {"K": m * e * q, "H": sinh_quarter_sq(p, a) / (2 * m), "P": p, "M": e * m}
        raise ValueError(f"unsupported family {t!r}")

    # Poisson coproduct: values of the left and right blocks -> composed values
    def coproduct(self, L: Block, R: Block) -> Block:
        t = self.tag
        if t == "none":
            return {g: L[g] + R[g] for g in GENERATORS}
        if t == "standard":
            xi, b1 = self.p("xi"), self.p("beta1")
            e = exp(R["M"] * xi)
            return {"K": R["K"] + L["K"] * e + b1 * L["P"] * R["M"] * e,
                    "H": L["H"] + R["H"], "P": R["P"] + L["P"] * e, "M": L["M"] + R["M"]}
        if t == "nonstandard":
            b1, b2, b3 = self.p("beta1"), self.p("beta2"), self.p("beta3")
            return {"K": L["K"] + R["K"] + b1 * L["P"] * R["M"] + b2 * L["H"] * R["M"]
                    + b2 * b3 / 2 * L["P"] * R["M"] * R["M"],
                    "H": L["H"] + R["H"] + b3 * L["P"] * R["M"],
                    "P": L["P"] + R["P"], "M": L["M"] + R["M"]}
        if t == "Ib":
            nu, xi, b3 = self.p("nu"), self.p("xi"), self.p("beta3")
            e = exp(R["M"] * xi)
            g = expm1_over(R["M"], xi)
            return {"K": R["K"] + L["K"] * e + nu * L["P"] * R["H"] * e
                    + nu * b3 / 2 * L["P"] * L["P"] * g * e,
                    "H": L["H"] + R["H"] + b3 * L["P"] * g,
                    "P": R["P"] + L["P"] * e, "M": L["M"] + R["M"]}
        if t == "IIb":
            a, b1, b2 = self.p("alpha"), self.p("beta1"), self.p("beta2")
            e = exp(R["P"] * (-a))
            return {"K": R["K"] + L["K"] * e - L["M"] * (b1 * R["P"] + b2 * R["H"]) * e,
                    "H": L["H"] + R["H"], "P": L["P"] + R["P"], "M": R["M"] + L["M"] * e}
        raise ValueError(f"unsupported family {t!r}")

    def casimirs(self, X: Block):
        t = self.tag
        K, H, P, M = (X[g] for g in GENERATORS)
        if t == "none":
            return M, P * P - 2 * M * H
        if t == "standard":
            return M, P * P - 2 * expm1_over(M, 2 * self.p("xi")) * H
        if t == "nonstandard":
            s = P + self.p("beta3") / 2 * M * M
            return M, s * s - 2 * M * H
        if t == "Ib":
            xi, b3 = self.p("xi"), self.p("beta3")
            g = expm1_over(M, xi)
            s = P + b3 / 2 * g * g
            return M, s * s - 2 * expm1_over(M, 2 * xi) * H
        if t == "IIb":
            a = self.p("alpha")
            e = exp(P * (a / 2))
            return e * M, sinh_quarter_sq(P, a) - 2 * e * M * H
        raise ValueError(f"unsupported family {t!r}")

    def brackets(self, X: Block) -> dict[tuple[str, str], object]:
        """Deformed Lie-Poisson brackets evaluated on generator values."""
        K, H, P, M = (X[g] for g in GENERATORS)
        t = self.tag
        kh, kp, km = P, M, 0.0
        if t == "standard":
            kp = expm1_over(M, 2 * self.p("xi"))
        elif t == "nonstandard":
            kh = P + self.p("beta3") / 2 * M * M
        elif t == "Ib":
            g = expm1_over(M, self.p("xi"))
            kh = P + self.p("beta3") / 2 * g * g
            kp = expm1_over(M, 2 * self.p("xi"))
        elif t == "IIb":
            a = self.p("alpha")
            kh = expm1_over(P, -a)  # (1 - e^{-a P})/a
            km = -a / 2 * M * M
        return {("K", "H"): kh, ("K", "P"): kp, ("K", "M"): km,
                ("H", "P"): 0.0, ("H", "M"): 0.0, ("P", "M"): 0.0}


FAMILIES = ("none", "standard", "nonstandard", "Ib", "IIb")
DEFAULT_PARAMS = {
    "none": {},
    "standard": {"xi": 0.3, "beta1": 0.2},
    "nonstandard": {"beta1": 0.2, "beta2": 0.3, "beta3": 0.25},
    "Ib": {"nu": 0.4, "xi": 0.3, "beta3": 0.25},
    "IIb": {"alpha": 0.3, "beta1": 0.2, "beta2": 0.15},
}


def family(tag: str, **params: float) -> PoissonFamily:
    if tag not in FAMILIES:
        raise ValueError(f"unsupported family {tag!r}; choose from {FAMILIES}")
    return PoissonFamily(tag, dict(params))


# ---------------------------------------------------------------------------
# composition

@dataclass(frozen=True)
class PhaseRealization:
    fam: PoissonFamily
    masses: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.masses)

    def blocks(self, x) -> list[Block]:
        """Cumulative generator values f^{(1)}, ..., f^{(N)} at a phase point."""
        n = self.n
        q, p = x[:n], x[n:2 * n]
        acc = self.fam.one_particle(q[0], p[0], self.masses[0])
        out = [acc]
        for i in range(1, n):
            acc = self.fam.coproduct(acc, self.fam.one_particle(q[i], p[i], self.masses[i]))
            out.append(acc)
        return out


def coproduct_compose(fam: PoissonFamily, masses: Sequence[float]) -> Callable:
    """Return x -> {X: f_X^{(N)}(x)} for x = (q_1..q_N, p_1..p_N)."""
    if len(masses) < 1:
        raise ValueError("need at least one particle")
    real = PhaseRealization(fam, tuple(masses))
    return lambda x: real.blocks(x)[-1]


def casimir_functions(fam: PoissonFamily, masses: Sequence[float]):
    """Return x -> (C_1^{(N)}, C_2^{(N)})."""
    comp = coproduct_compose(fam, masses)
    return lambda x: fam.casimirs(comp(x))


def gradient(f: Callable, x: Sequence[float]) -> tuple[float, np.ndarray]:
    y = f(Dual.variables(list(x)))
    if not isinstance(y, Dual):
        return float(y), np.zeros(len(x))
    return y.val, y.grad


def poisson_bracket(F: Callable, G: Callable, x: Sequence[float], relative: bool = False):
    """{F, G} = sum_i dF/dq_i dG/dp_i - dF/dp_i dG/dq_i.

    With ``relative=True`` also returns the scale sum |F_q G_p| + |F_p G_q|
    against which the bracket can be judged.
    """
    n = len(x) // 2
    _, gf = gradient(F, x)
    _, gg = gradient(G, x)
    a = gf[:n] * gg[n:]
    b = gf[n:] * gg[:n]
    val = float(np.sum(a) - np.sum(b))
    if not math.isfinite(val):
        raise EvaluationError("non-finite Poisson bracket")
    if relative:
        return val, float(np.sum(np.abs(a)) + np.sum(np.abs(b)))
    return val


def relative_bracket(F, G, x) -> float:
    val, scale = poisson_bracket(F, G, x, relative=True)
    return abs(val) / scale if scale else abs(val)


# ---------------------------------------------------------------------------
# two-particle closed forms

def table_two_particle(fam: PoissonFamily, m1: float, m2: float) -> Callable:
    """x=(q1,q2,p1,p2) -> dict with K,H,P,M,C1,C2 in closed form."""
    t = fam.tag

    def f(x):
        q1, q2, p1, p2 = x
        if t == "none":
            return {"K": m1 * q1 + m2 * q2, "H": p1 * p1 / (2 * m1) + p2 * p2 / (2 * m2),
                    "P": p1 + p2, "M": m1 + m2, "C1": m1 + m2,
                    "C2": -(m2 * p1 - m1 * p2) ** 2 / (m1 * m2)}
        if t == "standard":
            xi, b1 = fam.p("xi"), fam.p("beta1")
            M1, M2 = deformed_mass(m1, 2 * xi), deformed_mass(m2, 2 * xi)
            e = math.exp(xi * m2)
            return {"K": e * M1 * q1 + M2 * q2 + b1 * e * m2 * p1,
                    "H": p1 * p1 / (2 * M1) + p2 * p2 / (2 * M2),
                    "P": e * p1 + p2, "M": m1 + m2, "C1": m1 + m2,
                    "C2": -(M2 * p1 - M1 * e * p2) ** 2 / (M1 * M2)}
        if t == "nonstandard":
            b1, b2, b3 = fam.p("beta1"), fam.p("beta2"), fam.p("beta3")
            P1 = p1 - b3 / 2 * m1 * m1
            return {"K": m1 * q1 + m2 * q2 + P1 * (b1 * m2 + b2 * b3 / 2 * m2 * m2)
                    + b2 * m2 * p1 * p1 / (2 * m1),
                    "H": p1 * p1 / (2 * m1) + p2 * p2 / (2 * m2) + b3 * m2 * P1,
                    "P": p1 + p2 - b3 / 2 * (m1 * m1 + m2 * m2), "M": m1 + m2,
                    "C1": m1 + m2,
                    "C2": -(m2 * p1 - m1 * p2) ** 2 / (m1 * m2) + 2 * b3 * m2 * (m1 * p2 - m2 * p1)
                    + b3 * b3 * m1 * m1 * m2 * (m1 + 2 * m2)}
        if t == "Ib":
            nu, xi, b3 = fam.p("nu"), fam.p("xi"), fam.p("beta3")
            M1, M2 = deformed_mass(m1, 2 * xi), deformed_mass(m2, 2 * xi)
            g1, g2 = deformed_mass(m1, xi), deformed_mass(m2, xi)
            e = math.exp(xi * m2)
            P1 = p1 - b3 / 2 * g1 * g1
            lin = M2 * p1 - M1 * e * p2
            c2 = (-lin ** 2 / (M1 * M2) - 2 * b3 * g2 * lin
                  + b3 * b3 / 4 * g1 * g1 * g2 * (
                      g2 * (2 + xi * g1) ** 2 * (1 + xi * g2) ** 2
                      + 4 * M1 + 4 * M2 + 8 * xi * M1 * M2))
            return {"K": e * M1 * q1 + M2 * q2 + nu * e * P1 * p2 * p2 / (2 * M2)
                    + nu * b3 / 2 * e * P1 * P1 * g2,
                    "H": p1 * p1 / (2 * M1) + p2 * p2 / (2 * M2) + b3 * P1 * g2,
                    "P": e * p1 + p2 - b3 / 2 * (g1 * g1 * e + g2 * g2),
                    "M": m1 + m2, "C1": m1 + m2, "C2": c2}
        if t == "IIb":
            a, b1, b2 = fam.p("alpha"), fam.p("beta1"), fam.p("beta2")
            e1, e2 = math.exp(-a * p1 / 2), math.exp(-a * p2)
            s1, s2 = sinh_quarter(p1, a), sinh_quarter(p2, a)
            return {"K": m1 * e1 * e2 * q1 + m2 * math.exp(-a * p2 / 2) * q2
                    - m1 * e1 * e2 * (b1 * p2 + b2 / (2 * m2) * s2 * s2),
                    "H": s1 * s1 / (2 * m1) + s2 * s2 / (2 * m2), "P": p1 + p2,
                    "M": m1 * e1 * e2 + m2 * math.exp(-a * p2 / 2),
                    "C1": m1 * math.exp(-a * p2 / 2) + m2 * math.exp(a * p1 / 2),
                    "C2": -(m2 * s1 * math.exp(a * p1 / 4) - m1 * s2 * math.exp(-a * p2 / 4)) ** 2
                    / (m1 * m2)}
        raise ValueError(f"unsupported family {t!r}")

    return f


def composed_two_particle(fam: PoissonFamily, m1: float, m2: float) -> Callable:
    comp = coproduct_compose(fam, (m1, m2))

    def f(x):
        q1, q2, p1, p2 = x
        X = comp([q1, q2, p1, p2])
        c1, c2 = fam.casimirs(X)
        return {**{g: value(X[g]) for g in GENERATORS}, "C1": value(c1), "C2": value(c2)}

    return f


# ---------------------------------------------------------------------------
# Hamiltonians

def _harmonic(u):
    return u * u / 2


def _exponential(u):
    return exp(u)


def monomial(k: int) -> Callable:
    if k < 0 or int(k) != k:
        raise ValueError("monomial degree must be a non-negative integer")
    return lambda u: u ** int(k)


def _zero(u):
    return 0.0 * u


POTENTIALS: dict[str, Callable] = {
    "zero": _zero,
    "harmonic": _harmonic,
    "exponential": _exponential,
    "cubic": monomial(3),
    "quartic": monomial(4),
}


def resolve_potential(spec) -> Callable:
    if callable(spec):
        f = spec
    elif isinstance(spec, str) and spec.startswith("monomial"):
        f = monomial(int(spec.split(":", 1)[1]) if ":" in spec else 2)
    elif spec in POTENTIALS:
        f = POTENTIALS[spec]
    else:
        raise ValueError(f"unknown potential {spec!r}; choose from {sorted(POTENTIALS)}")
    probe = f(Dual(0.3, np.ones(1)))
    if not isinstance(probe, Dual) or not np.all(np.isfinite(probe.grad)):
        raise ValueError("potential must accept dual numbers and be differentiable")
    return f


@dataclass(frozen=True)
class HamiltonianSystem:
    fam: PoissonFamily
    masses: tuple[float, ...]
    potential: Callable

    @property
    def n(self) -> int:
        return len(self.masses)

    def _real(self):
        return PhaseRealization(self.fam, self.masses)

    def hamiltonian(self, x):
        X = self._real().blocks(x)[-1]
        return X["H"] + self.potential(X["K"])

    def energy_parts(self, x) -> dict[str, float]:
        X = self._real().blocks(x)[-1]
        return {"kinetic": value(X["H"]), "potential": value(self.potential(X["K"]))}

    def casimir(self, k: int):
        """C_2^{(k)}, a function of the first k particles."""
        def c(x):
            return self.fam.casimirs(self._real().blocks(x)[k - 1])[1]
        return c

    def integrals(self) -> list[Callable]:
        return [self.casimir(k) for k in range(2, self.n + 1)]

    def vector_field(self, x: np.ndarray) -> np.ndarray:
        _, g = gradient(self.hamiltonian, x)
        n = self.n
        return np.concatenate([g[n:], -g[:n]])


def build_hamiltonian(fam: PoissonFamily, masses: Sequence[float], potential="harmonic"):
    return HamiltonianSystem(fam, tuple(float(m) for m in masses), resolve_potential(potential))


def involution_certificate(system: HamiltonianSystem, points: Sequence[Sequence[float]],
                           tol: float = 1e-10) -> dict:
    """Relative brackets {H, C_2^{(k)}} and {C_2^{(k)}, C_2^{(l)}} at the points."""
    funcs = {"H": system.hamiltonian}
    for k in range(2, system.n + 1):
        funcs[f"C2_{k}"] = system.casimir(k)
    names = list(funcs)
    worst = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            worst[f"{{{a},{b}}}"] = max(relative_bracket(funcs[a], funcs[b], x) for x in points)
    return {"max_relative": worst, "tolerance": tol,
            "ok": all(v < tol for v in worst.values()), "points": len(points)}


def random_points(rng: np.random.Generator, n: int, count: int, scale: float = 1.0):
    return [rng.uniform(-scale, scale, size=2 * n) for _ in range(count)]


# ---------------------------------------------------------------------------
# integration

def _rk4_step(f, x, dt):
    k1 = f(x)
    k2 = f(x + dt / 2 * k1)
    k3 = f(x + dt / 2 * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_step(f, x, dt, tol=1e-14, max_iter=100):
    y = x + dt * f(x)
    for _ in range(max_iter):
        y_new = x + dt * f((x + y) / 2)
        if np.max(np.abs(y_new - y)) <= tol * (1 + np.max(np.abs(y_new))):
            return y_new
        y = y_new
    return y


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energy: np.ndarray
    casimirs: np.ndarray  # shape (steps, N-1)
    n: int

    def drift(self) -> dict[str, float]:
        def rel(col):
            ref = col[0]
            return float(np.max(np.abs(col - ref)) / (abs(ref) if ref else 1.0))
        out = {"H": rel(self.energy)}
        for j in range(self.casimirs.shape[1]):
            out[f"C2_{j + 2}"] = rel(self.casimirs[:, j])
        return out

    def write_csv(self, path) -> None:
        n = self.n
        header = (["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
                  + ["H"] + [f"C2_{k}" for k in range(2, n + 1)])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for t, s, h, c in zip(self.times, self.states, self.energy, self.casimirs):
                w.writerow([repr(float(v)) for v in [t, *s, h, *c]])


def integrate(system: HamiltonianSystem, x0: Sequence[float], t_end: float, dt: float,
              method: str = "rk4", record_every: int = 1) -> Trajectory:
    """Fixed-step integration of Hamilton's equations with a conservation log."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    step = {"rk4": _rk4_step, "midpoint": _midpoint_step}.get(method)
    if step is None:
        raise ValueError(f"unknown method {method!r}")
    f = system.vector_field
    integrals = system.integrals()
    x = np.asarray(x0, dtype=float)
    nsteps = int(round(t_end / dt))
    times, states, energy, cas = [], [], [], []

    def log(t, x):
        times.append(t)
        states.append(x.copy())
        energy.append(value(system.hamiltonian(list(x))))
        cas.append([value(c(list(x))) for c in integrals])

    log(0.0, x)
    for i in range(1, nsteps + 1):
        try:
            with np.errstate(over="raise", invalid="raise"):
                x_new = step(f, x, dt)
        except (OverflowError, FloatingPointError, EvaluationError) as exc:
            raise BlowUpError(f"overflow at step {i}: {exc}", (i - 1) * dt) from exc
        if not np.all(np.isfinite(x_new)):
            raise BlowUpError(f"non-finite state at step {i}", (i - 1) * dt)
        x = x_new
        if i % record_every == 0 or i == nsteps:
            log(i * dt, x)
    return Trajectory(np.array(times), np.array(states), np.array(energy),
                      np.array(cas).reshape(len(times), max(system.n - 1, 0)), system.n)
