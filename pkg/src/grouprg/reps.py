"""Unitary irreducible representations of the catalog groups, non-abelian
Fourier analysis of distributions over a group, and the mixing classifiers.

Conventions
-----------
* Eigenvalue phases are stored in *turns* (fractions of a full circle), in
  (-1/2, 1/2].  A unitary matrix with eigenvalues e^{2 pi i t_j} has phases
  t_j.
* "Mixing" is evaluated at the matrix level: an irrep image equal to the
  identity matrix is exempt; any other image must have no eigenvalue 1.
  (The element-level reading would misclassify even Q8, whose one-dimensional
  irreps send -1 to 1.)  Both predicates agree with the all-subgroups-normal
  test on the catalog, which the test suite checks extensionally.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import FiniteGroup, catalog_group

HOM_TOL = 1e-9          # homomorphism / unitarity residuals
CHAR_TOL = 1e-6         # character sums
PHASE_ZERO_TOL = 1e-6   # |phase| below this counts as eigenvalue 1 (turns)
UNITARY_TOL = 1e-8


class RepError(ValueError):
    pass


class NoCatalogEntry(RepError):
    pass


class NotUnitary(RepError):
    pass


class PhaseTooSmall(RepError):
    pass


class NoConvergence(RepError):
    pass


@dataclass(frozen=True)
class Irrep:
    """An irreducible unitary representation given by explicit images."""

    group: FiniteGroup
    dim: int
    images: np.ndarray  # (order, dim, dim) complex128

    def __call__(self, g: int) -> np.ndarray:
        return self.images[g]

    def character(self) -> np.ndarray:
        return np.trace(self.images, axis1=1, axis2=2)


@dataclass(frozen=True)
class IrrepSet:
    group: FiniteGroup
    irreps: tuple[Irrep, ...]
    complete: bool = True

    def dims(self) -> list[int]:
        return [r.dim for r in self.irreps]


@dataclass(frozen=True)
class GDistribution:
    """Probability mass function over the elements of a group."""

    group: FiniteGroup
    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=np.float64)
        object.__setattr__(self, "pmf", pmf)
        if pmf.shape != (self.group.order,):
            raise ValueError("pmf length does not match group order")
        if (pmf < -1e-12).any() or abs(pmf.sum() - 1.0) > 1e-12:
            raise ValueError("masses must be nonnegative and sum to 1")

    @staticmethod
    def uniform(G: FiniteGroup) -> "GDistribution":
        return GDistribution(G, np.full(G.order, 1.0 / G.order))

    @staticmethod
    def point(G: FiniteGroup, g: int) -> "GDistribution":
        pmf = np.zeros(G.order)
        pmf[g] = 1.0
        return GDistribution(G, pmf)


def _pmf(Z) -> np.ndarray:
    return Z.pmf if isinstance(Z, GDistribution) else np.asarray(Z, dtype=np.float64)


# ---------------------------------------------------------------------------
# Matrix kernels: operator norm and eigenphases (dims <= 8 / <= 4)

_MAX_POWER_ITERS = 100_000


def op_norm(M: np.ndarray, tol: float = 1e-12) -> float:
    """Largest singular value via power iteration on M M^*, accelerated by
    operator squaring so that clustered spectra still converge within the
    iteration budget (plain power steps stall when the top two eigenvalues
    are nearly equal).

    Deterministic start vector; the Frobenius cross-check
    ||M||_F^2 <= d * ||M||_op^2 guards against a failed iteration.
    """
    M = np.asarray(M, dtype=np.complex128)
    d = M.shape[0]
    if d > 8:
        raise RepError("op_norm supports dim <= 8")
    A = M @ M.conj().T
    fro2 = float((np.abs(M) ** 2).sum())
    if fro2 == 0.0:
        return 0.0
    # square A repeatedly (Frobenius-normalized, so the top of the spectrum
    # stays in [1/sqrt(d), 1]); 60 squarings drive ratios (l2/l1)^(2^60) to 0
    B = A / math.sqrt(float((np.abs(A) ** 2).sum()))
    for _ in range(60):
        B = B @ B
        nb = math.sqrt(float((np.abs(B) ** 2).sum()))
        if nb == 0.0:
            break
        B = B / nb
    idx = np.arange(1, d + 1, dtype=np.float64)
    starts = [np.cos(idx) + 1j * np.sin(2 * idx + 0.5),
              np.ones(d, dtype=np.complex128),
              np.exp(1j * idx ** 2)]
    for v in starts:
        w = B @ v
        nw = float(np.linalg.norm(w))
        if nw > 1e-12 * float(np.linalg.norm(v)):
            w = w / nw
            # polish with plain power steps on the original operator
            for _ in range(3):
                u = A @ w
                nu = float(np.linalg.norm(u))
                if nu == 0.0:
                    return 0.0
                w = u / nu
            est = float(np.real(np.vdot(w, A @ w)))
            norm = math.sqrt(max(est, 0.0))
            if fro2 > d * norm * norm + 1e-9 * max(1.0, fro2):
                raise NoConvergence("Frobenius bound violated; iteration failed")
            return norm
    raise NoConvergence("power iteration start vectors were annihilated")


def _charpoly_coeffs(M: np.ndarray) -> list[complex]:
    """Elementary symmetric functions e_1..e_d of the eigenvalues, via
    Newton's identities on the power sums tr(M^k)."""
    d = M.shape[0]
    powers = []
    P = np.eye(d, dtype=np.complex128)
    for _ in range(d):
        P = P @ M
        powers.append(complex(np.trace(P)))
    e = [1.0 + 0j]
    for k in range(1, d + 1):
        acc = 0j
        for i in range(1, k + 1):
            acc += ((-1) ** (i - 1)) * e[k - i] * powers[i - 1]
        e.append(acc / k)
    return e[1:]


def _poly_eval(coeffs: list[complex], x: complex) -> complex:
    # charpoly lambda^d - e1 lambda^{d-1} + e2 ... with alternating signs
    d = len(coeffs)
    val = x ** d
    for i, e in enumerate(coeffs, start=1):
        val += ((-1) ** i) * e * x ** (d - i)
    return val


def _poly_deriv_eval(coeffs: list[complex], x: complex) -> complex:
    d = len(coeffs)
    val = d * x ** (d - 1)
    for i, e in enumerate(coeffs[:-1], start=1):
        val += ((-1) ** i) * e * (d - i) * x ** (d - i - 1)
    return val


def _roots_quadratic(b: complex, c: complex) -> list[complex]:
    # x^2 + b x + c
    disc = cmath.sqrt(b * b - 4 * c)
    # numerically stable pairing
    if (b.conjugate() * disc).real > 0:
        q = -(b + disc) / 2
    else:
        q = -(b - disc) / 2
    r1 = q
    r2 = c / q if q != 0 else -b - q
    return [r1, r2]


def _roots_cubic(b: complex, c: complex, d: complex) -> list[complex]:
    # x^3 + b x^2 + c x + d, Cardano
    p = c - b * b / 3
    q = d - b * c / 3 + 2 * b ** 3 / 27
    if abs(p) < 1e-14 and abs(q) < 1e-14:
        t_roots = [0j, 0j, 0j]
    else:
        disc = cmath.sqrt(q * q / 4 + p ** 3 / 27)
        u3 = -q / 2 + disc
        if abs(u3) < 1e-14:
            u3 = -q / 2 - disc
        u = u3 ** (1.0 / 3.0)
        omega = complex(-0.5, math.sqrt(3) / 2)
        t_roots = []
        for k in range(3):
            uk = u * omega ** k
            vk = -p / (3 * uk) if uk != 0 else 0j
            t_roots.append(uk + vk)
    return [t - b / 3 for t in t_roots]


def _roots_quartic(b: complex, c: complex, d: complex, e: complex) -> list[complex]:
    # x^4 + b x^3 + c x^2 + d x + e, Ferrari
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b ** 3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b ** 4 / 256
    if abs(q) < 1e-12:
        half = _roots_quadratic(p, r)
        ys = []
        for z in half:
            s = cmath.sqrt(z)
            ys.extend([s, -s])
    else:
        res = _roots_cubic(-p, -4 * r, 4 * p * r - q * q)
        z = max(res, key=lambda t: abs(t - p))
        alpha = cmath.sqrt(z - p)
        ys = _roots_quadratic(-alpha, z / 2 + q / (2 * alpha)) + \
            _roots_quadratic(alpha, z / 2 - q / (2 * alpha))
    return [y - b / 4 for y in ys]


def eigenphases(M: np.ndarray) -> list[float]:
    """Phases (in turns, each in (-1/2, 1/2]) of a unitary matrix's
    eigenvalues, from the characteristic polynomial (dims 1..4)."""
    M = np.asarray(M, dtype=np.complex128)
    d = M.shape[0]
    if d > 4:
        raise RepError("eigenphases supports dim <= 4")
    if np.abs(M @ M.conj().T - np.eye(d)).max() > UNITARY_TOL:
        raise NotUnitary("matrix is not unitary to tolerance")
    e = _charpoly_coeffs(M)
    if d == 1:
        roots = [e[0]]
    elif d == 2:
        roots = _roots_quadratic(-e[0], e[1])
    elif d == 3:
        roots = _roots_cubic(-e[0], e[1], -e[2])
    else:
        roots = _roots_quartic(-e[0], e[1], -e[2], e[3])
    polished = []
    for x in roots:
        for _ in range(3):  # Newton cleanup
            df = _poly_deriv_eval(e, x)
            if abs(df) < 1e-12:
                break
            x = x - _poly_eval(e, x) / df
        if abs(x) > 1e-12:
            x = x / abs(x)  # eigenvalues of a unitary lie on the circle
        polished.append(x)
    phases = [cmath.phase(x) / (2 * math.pi) for x in polished]
    return [0.5 if t <= -0.5 + 1e-15 else t for t in phases]


def half_sum_norm_check(M: np.ndarray, theta: float) -> tuple[float, float]:
    """norm = ||(I+M)/2||_op against the sharp bound cos(pi*theta), theta in
    turns.  Requires every eigenphase of M to have magnitude >= theta.

    The quadratic surrogate 1 - (2 pi theta)^2 / 8 is reported separately by
    :func:`half_sum_surrogate` and never asserted (it is weaker than the
    cosine everywhere it is valid, and wrong near theta = 1/2).
    """
    M = np.asarray(M, dtype=np.complex128)
    if not (0 < theta <= 0.5):
        raise ValueError("theta must be in (0, 1/2] turns")
    phases = eigenphases(M)
    if any(abs(t) < theta - 1e-9 for t in phases):
        raise PhaseTooSmall(f"eigenphase below {theta} turns: {phases}")
    d = M.shape[0]
    norm = op_norm((np.eye(d) + M) / 2)
    bound = math.cos(math.pi * theta)
    if norm > bound + 1e-9:
        raise NoConvergence(f"half-sum contract violated: {norm} > {bound}")
    return norm, bound


def half_sum_surrogate(theta: float) -> float:
    """The radian-convention quadratic surrogate 1 - (2 pi theta)^2 / 8."""
    return 1 - (2 * math.pi * theta) ** 2 / 8


def random_clamped_unitary(rng: np.random.Generator, dim: int,
                           theta_min: float) -> np.ndarray:
    """Haar-ish random unitary whose eigenphases all have |t| >= theta_min."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(z)
    Q = Q * (np.diagonal(R) / np.abs(np.diagonal(R)))
    signs = rng.choice([-1.0, 1.0], size=dim)
    mags = rng.uniform(theta_min, 0.5, size=dim)
    phases = np.exp(2j * np.pi * signs * mags)
    return Q @ np.diag(phases) @ Q.conj().T


# ---------------------------------------------------------------------------
# Irrep catalogs


def _char_irreps_cyclic(G: FiniteGroup, m: int) -> list[Irrep]:
    out = []
    for k in range(m):
        images = np.exp(2j * np.pi * k * np.arange(m) / m).reshape(m, 1, 1)
        out.append(Irrep(G, 1, images))
    return out


def _q8_irreps(G: FiniteGroup) -> list[Irrep]:
    # element order: 1, -1, i, -i, j, -j, k, -k
    quot = {0: (0, 0), 1: (0, 0), 2: (1, 0), 3: (1, 0),
            4: (0, 1), 5: (0, 1), 6: (1, 1), 7: (1, 1)}
    out = []
    for a in range(2):
        for b in range(2):
            vals = [(-1.0) ** (a * quot[g][0] + b * quot[g][1]) for g in range(8)]
            out.append(Irrep(G, 1, np.array(vals, dtype=complex).reshape(8, 1, 1)))
    I2 = np.eye(2, dtype=complex)
    ri = np.array([[1j, 0], [0, -1j]])
    rj = np.array([[0, 1], [-1, 0]], dtype=complex)
    rk = ri @ rj
    images = np.stack([I2, -I2, ri, -ri, rj, -rj, rk, -rk])
    out.append(Irrep(G, 2, images))
    return out


def _dihedral_irreps(G: FiniteGroup, n: int) -> list[Irrep]:
    # element index a + n*b  <->  r^a s^b
    a_of = np.arange(2 * n) % n
    b_of = np.arange(2 * n) // n
    out = [Irrep(G, 1, np.ones((2 * n, 1, 1), dtype=complex))]
    out.append(Irrep(G, 1, ((-1.0) ** b_of).astype(complex).reshape(-1, 1, 1)))
    if n % 2 == 0:
        out.append(Irrep(G, 1, ((-1.0) ** a_of).astype(complex).reshape(-1, 1, 1)))
        out.append(Irrep(G, 1, ((-1.0) ** (a_of + b_of)).astype(complex).reshape(-1, 1, 1)))
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    for h in range(1, (n + 1) // 2 if n % 2 else n // 2):
        images = np.empty((2 * n, 2, 2), dtype=complex)
        for g in range(2 * n):
            D = np.diag(np.exp(2j * np.pi * h * a_of[g] * np.array([1, -1]) / n))
            images[g] = D @ (X if b_of[g] else np.eye(2))
        out.append(Irrep(G, 2, images))
    return out


def _z2wrz2_irreps(G: FiniteGroup) -> list[Irrep]:
    # index a + 2b + 4z
    a_of = np.arange(8) & 1
    b_of = (np.arange(8) >> 1) & 1
    z_of = (np.arange(8) >> 2) & 1
    out = []
    for alpha in range(2):
        for beta in range(2):
            vals = (-1.0) ** (alpha * (a_of + b_of) + beta * z_of)
            out.append(Irrep(G, 1, vals.astype(complex).reshape(8, 1, 1)))
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    images = np.empty((8, 2, 2), dtype=complex)
    for g in range(8):
        D = np.diag([(-1.0) ** a_of[g], (-1.0) ** b_of[g]]).astype(complex)
        images[g] = D @ (X if z_of[g] else np.eye(2))
    out.append(Irrep(G, 2, images))
    return out


def _ut3_irreps(G: FiniteGroup, p: int) -> list[Irrep]:
    # index a + p*b + p^2*c; see groups._unitriangular3 for the product law
    w = np.exp(2j * np.pi / p)
    a_of = np.arange(p ** 3) % p
    b_of = (np.arange(p ** 3) // p) % p
    c_of = np.arange(p ** 3) // p ** 2
    out = []
    for alpha in range(p):
        for beta in range(p):
            vals = w ** ((alpha * a_of + beta * c_of) % p)
            out.append(Irrep(G, 1, vals.astype(complex).reshape(-1, 1, 1)))
    for t in range(1, p):
        images = np.zeros((p ** 3, p, p), dtype=complex)
        for g in range(p ** 3):
            a, b, c = int(a_of[g]), int(b_of[g]), int(c_of[g])
            for x in range(p):
                images[g, (x + c) % p, x] = w ** ((t * (b + a * x)) % p)
        out.append(Irrep(G, p, images))
    return out


def _tensor(G: FiniteGroup, left: list[Irrep], right: list[Irrep],
            order_right: int) -> list[Irrep]:
    out = []
    for rho in left:
        for sig in right:
            n = G.order
            images = np.empty((n, rho.dim * sig.dim, rho.dim * sig.dim),
                              dtype=complex)
            for idx in range(n):
                g, h = divmod(idx, order_right)
                images[idx] = np.kron(rho.images[g], sig.images[h])
            out.append(Irrep(G, rho.dim * sig.dim, images))
    return out


@lru_cache(maxsize=None)
def irrep_catalog(name: str) -> IrrepSet:
    """Complete validated irrep set for a catalog group (by name).

    Direct products use the tensor construction.  Every returned set has
    passed :func:`validate_irrep_set` at the module tolerances.
    """
    G = catalog_group(name)
    irreps = _build_irreps(G)
    S = IrrepSet(G, tuple(irreps))
    report = validate_irrep_set(G, S)
    if not report.passed():
        raise NoCatalogEntry(f"catalog irreps for {name} failed validation: {report}")
    return S


def _build_irreps(G: FiniteGroup) -> list[Irrep]:
    name = G.name
    if "x" in name:
        i = name.index("x")
        left_name, right_name = name[:i], name[i + 1:]
        right = catalog_group(right_name)
        return _tensor(G, _build_irreps(catalog_group(left_name)),
                       _build_irreps(right), right.order)
    if name.startswith("Z") and name[1:].isdigit():
        return _char_irreps_cyclic(G, G.order)
    if name == "Q8":
        return _q8_irreps(G)
    if name == "S3":
        return _dihedral_irreps(G, 3)
    if name.startswith("D") and name[1:].isdigit():
        return _dihedral_irreps(G, int(name[1:]))
    if name == "Z2wrZ2":
        return _z2wrz2_irreps(G)
    if name.startswith("UT3("):
        p = int(name[4:-1])
        if p > 3:
            raise NoCatalogEntry("UT3 irreps on file only for p in {2, 3}")
        return _ut3_irreps(G, p)
    if name == "1":
        return [Irrep(G, 1, np.ones((1, 1, 1), dtype=complex))]
    raise NoCatalogEntry(name)


# ---------------------------------------------------------------------------
# Validation


@dataclass
class IrrepValidationReport:
    group: str
    dims: list[int]
    hom_residual: float
    unitarity_residual: float
    sum_d_squared: int
    order: int
    char_orthogonality: float
    irreducibility_residual: float

    def passed(self, hom_tol: float = HOM_TOL, char_tol: float = CHAR_TOL) -> bool:
        return (self.hom_residual < hom_tol
                and self.unitarity_residual < hom_tol
                and self.sum_d_squared == self.order
                and self.char_orthogonality < char_tol
                and self.irreducibility_residual < char_tol)

    def as_dict(self) -> dict:
        return {
            "group": self.group, "dims": self.dims,
            "hom_residual": self.hom_residual,
            "unitarity_residual": self.unitarity_residual,
            "sum_d_squared": self.sum_d_squared, "order": self.order,
            "char_orthogonality": self.char_orthogonality,
            "irreducibility_residual": self.irreducibility_residual,
            "passed": self.passed(),
        }


def validate_irrep_set(G: FiniteGroup, S: IrrepSet) -> IrrepValidationReport:
    """Max residual per check: homomorphism, unitarity, sum of d^2,
    character orthogonality, and the character-norm irreducibility test."""
    hom = 0.0
    uni = 0.0
    irr = 0.0
    for rho in S.irreps:
        imgs = rho.images
        prod = np.einsum("aij,bjk->abik", imgs, imgs)
        target = imgs[G.table]
        hom = max(hom, float(np.abs(prod - target).max()))
        eye = np.eye(rho.dim)
        uni = max(uni, float(np.abs(
            np.einsum("aij,akj->aik", imgs, imgs.conj()) - eye).max()))
        chi = rho.character()
        irr = max(irr, abs(float((np.abs(chi) ** 2).sum()) / G.order - 1.0))
    ortho = 0.0
    for i, rho in enumerate(S.irreps):
        for sig in S.irreps[i + 1:]:
            ip = (rho.character() * sig.character().conj()).sum() / G.order
            ortho = max(ortho, abs(ip))
    return IrrepValidationReport(
        group=G.name, dims=S.dims(), hom_residual=hom, unitarity_residual=uni,
        sum_d_squared=sum(d * d for d in S.dims()), order=G.order,
        char_orthogonality=float(ortho), irreducibility_residual=irr)


# ---------------------------------------------------------------------------
# Fourier analysis


def fourier_coefficient(Z, rho: Irrep) -> np.ndarray:
    """Z_hat(rho) = sum_g Z(g) conj(rho(g)) = E[conj(rho(Z))]."""
    return np.einsum("g,gij->ij", _pmf(Z), rho.images.conj())


def parseval_residual(Z, S: IrrepSet) -> float:
    pmf = _pmf(Z)
    lhs = float((pmf ** 2).sum())
    rhs = 0.0
    for rho in S.irreps:
        coef = fourier_coefficient(pmf, rho)
        rhs += rho.dim * float((np.abs(coef) ** 2).sum())
    rhs /= S.group.order
    return abs(lhs - rhs)


def closeness_bound(X, Y, S: IrrepSet) -> tuple[float, float]:
    """(total variation distance, sqrt(|G|) * max irrep gap in op norm)."""
    px, py = _pmf(X), _pmf(Y)
    tv = 0.5 * float(np.abs(px - py).sum())
    gap = 0.0
    for rho in S.irreps:
        diff = fourier_coefficient(px, rho) - fourier_coefficient(py, rho)
        gap = max(gap, op_norm(diff))
    return tv, math.sqrt(S.group.order) * gap


# ---------------------------------------------------------------------------
# Mixing classifiers


def _is_identity(M: np.ndarray) -> bool:
    return bool(np.abs(M - np.eye(M.shape[0])).max() <= 1e-9)


def is_mixing(S: IrrepSet) -> tuple[bool, float]:
    """(mixing, theta): matrix-level mixing test over a complete irrep set.

    theta is the minimum |eigenphase| in turns over all non-identity images,
    or 0.0 when some non-identity image has an eigenvalue 1.
    """
    theta = 0.5
    seen = False
    for rho in S.irreps:
        for g in range(S.group.order):
            M = rho.images[g]
            if _is_identity(M):
                continue
            seen = True
            for t in eigenphases(M):
                if abs(t) < PHASE_ZERO_TOL:
                    return False, 0.0
                theta = min(theta, abs(t))
    return True, (theta if seen else 0.5)


def ker_subrep_check(S: IrrepSet) -> bool:
    """True iff for every irrep image, the eigenvalue-1 eigenspace is trivial
    or everything (the only subrepresentations of an irreducible rep)."""
    for rho in S.irreps:
        for g in range(S.group.order):
            M = rho.images[g]
            zero_phases = sum(1 for t in eigenphases(M) if abs(t) < PHASE_ZERO_TOL)
            if zero_phases not in (0, rho.dim):
                return False
    return True


# ---------------------------------------------------------------------------
# JSON interchange (complex entries as [re, im] pairs)


def irreps_to_json(S: IrrepSet) -> str:
    payload = {
        "group": S.group.name,
        "order": S.group.order,
        "irreps": [{
            "dim": rho.dim,
            "images": [[[[float(z.real), float(z.imag)] for z in row]
                        for row in img] for img in rho.images],
        } for rho in S.irreps],
    }
    return json.dumps(payload, indent=1)


def irreps_from_json(text: str) -> IrrepSet:
    obj = json.loads(text)
    G = catalog_group(obj["group"])
    irreps = []
    for entry in obj["irreps"]:
        arr = np.array([[[complex(re, im) for (re, im) in row]
                         for row in img] for img in entry["images"]])
        irreps.append(Irrep(G, entry["dim"], arr))
    return IrrepSet(G, tuple(irreps))
