"""Robust reconstruction from erroneous remainders.

Moduli share a common left factor: moduli[i] == common @ cofactors[i],
with the cofactors pairwise commuting and coprime. Remainder differences
are denoised by snapping them to a lattice with an exact CVP, after which
the folding vectors follow from one commuting-coprime reconstruction and
back-substitution. Two variants exist and genuinely differ:

* the lattice variant snaps r~_i - r~_1 to LAT(common);
* the smith variant first maps differences through the unimodular row
  transform of a Smith decomposition of ``common`` and snaps inside the
  diagonal lattice. Because Smith transforms are not unique, the
  decomposition is injectable, and the two variants can succeed on
  disjoint error patterns.

Success means the folding vectors were reproduced exactly; when they are,
averaging the per-modulus reconstructions keeps the output within the
remainder error bound.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import floor, isqrt, sqrt
from typing import Iterator, Sequence

from .crt import CcSolver
from .divisibility import commutes, is_left_coprime
from .errors import (
    ConditionViolatedError,
    EnumerationCapError,
    ShapeError,
    SingularMatrixError,
)
from .intmat import (
    IntMat,
    IntVec,
    SmithForm,
    det,
    inv_unimodular,
    is_unimodular,
    smith,
    solve_integer,
)
from .lattice import Norm, cvp, min_distance
from .residue import (
    default_enum_cap,
    folding_vector,
    in_fpd,
    mod_reduce,
    uniform_residue,
)

__all__ = [
    "RobustModuli",
    "RobustTrace",
    "ErrorModel",
    "range_contains",
    "folding_vectors_lattice",
    "folding_vectors_smith",
    "recover_folding_vectors",
    "error_bound_lattice",
    "error_bound_smith",
    "operator_norm_upper",
    "robust_reconstruct",
    "sample_in_range",
    "sample_error",
    "robustness_trials",
    "robustness_sweep",
    "default_robust_cases",
]


class RobustModuli:
    """Moduli common @ cofactors[i] with commuting, coprime cofactors.

    Validates the structure once and caches what the per-trial hot path
    needs: the weighted-sum solvers and the Smith form of the common
    factor.
    """

    def __init__(self, common: IntMat, cofactors: Sequence[IntMat], validate: bool = True):
        cofactors = tuple(cofactors)
        if not cofactors:
            raise ShapeError("at least one cofactor required")
        if det(common) == 0:
            raise SingularMatrixError("common factor is singular")
        for g in cofactors:
            if g.shape != common.shape:
                raise ShapeError("cofactor shape differs from common factor")
            if det(g) == 0:
                raise SingularMatrixError("cofactor is singular")
        if validate:
            for i in range(len(cofactors)):
                for j in range(i + 1, len(cofactors)):
                    if not commutes(cofactors[i], cofactors[j]):
                        raise ConditionViolatedError(
                            f"cofactors {i} and {j} do not commute"
                        )
                    if not is_left_coprime(cofactors[i], cofactors[j]):
                        raise ConditionViolatedError(
                            f"cofactors {i} and {j} are not coprime"
                        )
        self.common = common
        self.cofactors = cofactors
        self._smith_solvers: dict[IntMat, CcSolver] = {}

    @property
    def dim(self) -> int:
        return self.common.rows

    def __len__(self) -> int:
        return len(self.cofactors)

    @cached_property
    def moduli(self) -> tuple[IntMat, ...]:
        return tuple(self.common @ g for g in self.cofactors)

    def cofactor_product_except(self, index: int) -> IntMat:
        acc = None
        for j, g in enumerate(self.cofactors):
            if j == index:
                continue
            acc = g if acc is None else acc @ g
        return IntMat.identity(self.dim) if acc is None else acc

    @cached_property
    def cc_solver(self) -> CcSolver:
        """Solver for congruences modulo the cofactors themselves."""
        return CcSolver(list(self.cofactors))

    @cached_property
    def smith_form(self) -> SmithForm:
        return smith(self.common)

    def smith_solver(self, v: IntMat) -> CcSolver:
        """Solver for moduli v^{-1} @ cofactor_i (v from a Smith form)."""
        solver = self._smith_solvers.get(v)
        if solver is None:
            solver = CcSolver(list(self.cofactors), prefix=inv_unimodular(v))
            self._smith_solvers[v] = solver
        return solver


@dataclass(frozen=True)
class RobustTrace:
    """Intermediate state of one folding-vector recovery.

    ``cvp_points`` are the snapped remainder differences (entry 0 is the
    zero reference), ``factor_residues`` the residues fed to the
    commuting-coprime step, ``aggregate`` its solution. ``success`` only
    records that every back-substitution was integral; a wrong-but-
    integral answer is exactly what a violated snap condition produces.
    """

    algorithm: int
    cvp_points: tuple[IntVec, ...]
    factor_residues: tuple[IntVec, ...]
    aggregate: IntVec
    folding_vectors: tuple[IntVec, ...]
    success: bool
    smith_form: SmithForm | None = None


def _check_inputs(rtilde: Sequence[IntVec], rm: RobustModuli, u: IntMat | None) -> IntMat:
    if len(rtilde) != len(rm):
        raise ShapeError("one erroneous remainder per modulus required")
    tail = IntMat.identity(rm.dim) if u is None else u
    if not is_unimodular(tail):
        raise ConditionViolatedError("range transform must be unimodular")
    return tail


class _NonIntegral(Exception):
    """Back-substitution left the integers: the inputs cannot have come
    from the declared moduli structure. The trace is marked failed."""


def _back_substitute(g: IntMat, vec: IntVec) -> IntVec:
    n = solve_integer(g, vec)
    if n is None:
        raise _NonIntegral
    return n


def _reordered(rm: RobustModuli, rtilde: Sequence[IntVec], ref: int):
    if not 0 <= ref < len(rm):
        raise IndexError("reference index out of range")
    perm = [ref] + [i for i in range(len(rm)) if i != ref]
    rm_perm = RobustModuli(
        rm.common, [rm.cofactors[i] for i in perm], validate=False
    )
    return rm_perm, [rtilde[i] for i in perm], perm


def _restore_order(trace: RobustTrace, perm: Sequence[int]) -> RobustTrace:
    inverse = [0] * len(perm)
    for pos, orig in enumerate(perm):
        inverse[orig] = pos

    def back(seq):
        return tuple(seq[pos] for pos in inverse) if seq else seq

    return RobustTrace(
        algorithm=trace.algorithm,
        cvp_points=back(trace.cvp_points),
        factor_residues=back(trace.factor_residues),
        aggregate=trace.aggregate,
        folding_vectors=back(trace.folding_vectors),
        success=trace.success,
        smith_form=trace.smith_form,
    )


def folding_vectors_lattice(
    rtilde: Sequence[IntVec],
    rm: RobustModuli,
    norm: Norm = Norm.L2,
    u: IntMat | None = None,
    ref: int = 0,
) -> RobustTrace:
    """Recover folding vectors by snapping differences to LAT(common).

    Steps: closest point of LAT(common) to each difference against the
    reference remainder; residues of the coefficient vectors modulo the
    cofactors; one commuting-coprime solve pinned to zero at the
    reference; back-substitution. ``ref`` re-anchors the subtraction (the
    recoverable range is the one indexed by it).
    """
    if ref:
        rm_p, rt_p, perm = _reordered(rm, rtilde, ref)
        return _restore_order(
            folding_vectors_lattice(rt_p, rm_p, norm, u, 0), perm
        )
    tail = _check_inputs(rtilde, rm, u)
    dim = rm.dim
    zero = IntVec.zero(dim)
    points = [zero]
    coeffs = [zero]
    residues = [zero]
    for i in range(1, len(rm)):
        v = cvp(rm.common, (rtilde[i] - rtilde[0]).entries, norm)
        c = solve_integer(rm.common, v)
        assert c is not None
        points.append(v)
        coeffs.append(c)
        residues.append(mod_reduce(c, rm.cofactors[i]).value)
    aggregate = rm.cc_solver.solve(residues, tail=tail).m
    try:
        foldings = [_back_substitute(rm.cofactors[0], aggregate)]
        for i in range(1, len(rm)):
            foldings.append(
                _back_substitute(rm.cofactors[i], aggregate - coeffs[i])
            )
    except _NonIntegral:
        return RobustTrace(
            1, tuple(points), tuple(residues), aggregate, (), success=False
        )
    return RobustTrace(
        algorithm=1,
        cvp_points=tuple(points),
        factor_residues=tuple(residues),
        aggregate=aggregate,
        folding_vectors=tuple(foldings),
        success=True,
    )


def _validated_smith(rm: RobustModuli, smith_form: SmithForm | None) -> SmithForm:
    if smith_form is None:
        return rm.smith_form
    sf = smith_form
    if not (is_unimodular(sf.u) and is_unimodular(sf.v)):
        raise ConditionViolatedError("smith transforms must be unimodular")
    if sf.u @ rm.common @ sf.v != sf.lam:
        raise ConditionViolatedError(
            "supplied decomposition does not match the common factor"
        )
    n = sf.lam.rows
    if any(sf.lam[i, j] for i in range(n) for j in range(n) if i != j):
        raise ConditionViolatedError("diagonal middle factor required")
    return sf


def folding_vectors_smith(
    rtilde: Sequence[IntVec],
    rm: RobustModuli,
    norm: Norm = Norm.L2,
    u: IntMat | None = None,
    smith_form: SmithForm | None = None,
    ref: int = 0,
) -> RobustTrace:
    """Recover folding vectors by snapping inside the Smith diagonal.

    Differences are first mapped through the row transform of a Smith
    decomposition of the common factor and snapped to the diagonal
    lattice; the commuting-coprime solve then runs over the moduli
    v^{-1} @ cofactor_i. Any valid decomposition may be supplied; the
    choice changes which error patterns are recoverable.
    """
    if ref:
        rm_p, rt_p, perm = _reordered(rm, rtilde, ref)
        return _restore_order(
            folding_vectors_smith(rt_p, rm_p, norm, u, smith_form, 0), perm
        )
    tail = _check_inputs(rtilde, rm, u)
    sf = _validated_smith(rm, smith_form)
    solver = rm.smith_solver(sf.v)
    dim = rm.dim
    zero = IntVec.zero(dim)
    points = [zero]
    coeffs = [zero]
    residues = [zero]
    for i in range(1, len(rm)):
        target = sf.u @ (rtilde[i] - rtilde[0])
        p = cvp(sf.lam, target.entries, norm)
        t = solve_integer(sf.lam, p)
        assert t is not None
        points.append(p)
        coeffs.append(t)
        residues.append(mod_reduce(t, solver.moduli[i]).value)
    aggregate = solver.solve(residues, tail=tail).m
    try:
        foldings = [_back_substitute(rm.cofactors[0], sf.v @ aggregate)]
        for i in range(1, len(rm)):
            foldings.append(
                _back_substitute(rm.cofactors[i], sf.v @ (aggregate - coeffs[i]))
            )
    except _NonIntegral:
        return RobustTrace(
            2, tuple(points), tuple(residues), aggregate, (), False, sf
        )
    return RobustTrace(
        algorithm=2,
        cvp_points=tuple(points),
        factor_residues=tuple(residues),
        aggregate=aggregate,
        folding_vectors=tuple(foldings),
        success=True,
        smith_form=sf,
    )


def recover_folding_vectors(
    rtilde: Sequence[IntVec],
    rm: RobustModuli,
    algorithm: int = 1,
    norm: Norm = Norm.L2,
    u: IntMat | None = None,
    smith_form: SmithForm | None = None,
    ref: int = 0,
) -> RobustTrace:
    if algorithm == 1:
        return folding_vectors_lattice(rtilde, rm, norm, u, ref)
    if algorithm == 2:
        return folding_vectors_smith(rtilde, rm, norm, u, smith_form, ref)
    raise ValueError("algorithm must be 1 or 2")


def range_contains(
    m: IntVec, rm: RobustModuli, index: int = 0, u: IntMat | None = None
) -> bool:
    """Membership of m in the recoverable range anchored at ``index``."""
    if not 0 <= index < len(rm):
        raise IndexError("modulus index out of range")
    tail = IntMat.identity(rm.dim) if u is None else u
    region = rm.cofactor_product_except(index) @ tail
    return in_fpd(folding_vector(m, rm.moduli[index]), region)


def _charpoly(a: IntMat) -> list[int]:
    """Integer characteristic polynomial coefficients c0..cn (monic)."""
    n = a.rows
    c = [0] * (n + 1)
    c[n] = 1
    mk = None
    for k in range(1, n + 1):
        mk = a if mk is None else a @ (mk + c[n - k + 1] * IntMat.identity(n))
        tr = sum(mk[i, i] for i in range(n))
        q, rem = divmod(-tr, k)
        assert rem == 0
        c[n - k] = q
    return c


def _poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _max_eig_upper(s: IntMat, tol: Fraction = Fraction(1, 10**9)) -> Fraction:
    """Rational upper bound on the largest eigenvalue of a symmetric
    integer matrix, certified by sign conditions on the characteristic
    polynomial and all its derivatives (valid since all roots are real).
    """
    n = s.rows
    polys = [_charpoly(s)]
    while len(polys[-1]) > 2:
        p = polys[-1]
        polys.append([i * p[i] for i in range(1, len(p))])

    def above_all_roots(x: Fraction) -> bool:
        return all(_poly_eval(p, x) > 0 for p in polys)

    hi = Fraction(max(sum(abs(s[i, j]) for j in range(n)) for i in range(n)))
    while not above_all_roots(hi):
        hi += 1
    lo = Fraction(0)
    while hi - lo > tol:
        mid = (hi + lo) / 2
        if above_all_roots(mid):
            hi = mid
        else:
            lo = mid
    return hi


def operator_norm_upper(a: IntMat, norm: Norm) -> Fraction:
    """Induced operator norm; exact for L1/Linf, a certified rational
    upper bound (within 1e-9) for L2."""
    n = a.rows
    if norm is Norm.L1:
        return Fraction(max(sum(abs(a[i, j]) for i in range(n)) for j in range(n)))
    if norm is Norm.LINF:
        return Fraction(max(sum(abs(a[i, j]) for j in range(n)) for i in range(n)))
    lam_up = _max_eig_upper(a.T @ a)
    num, den = lam_up.numerator, lam_up.denominator
    return Fraction(isqrt(num * den) + 1, den)


def error_bound_lattice(rm: RobustModuli, norm: Norm = Norm.L2) -> float:
    """Remainder error bound: a quarter of the minimum distance of
    LAT(common)."""
    md = min_distance(rm.common, norm)
    if norm is Norm.L2:
        return sqrt(md) / 4.0
    return md / 4.0


def error_bound_smith(
    rm: RobustModuli,
    norm: Norm = Norm.L2,
    smith_form: SmithForm | None = None,
) -> float:
    """Remainder error bound for the smith variant: a quarter of the
    diagonal lattice's minimum distance, shrunk by the operator norm of
    the row transform."""
    sf = _validated_smith(rm, smith_form)
    md = min_distance(sf.lam, norm)
    dist = sqrt(md) if norm is Norm.L2 else float(md)
    return dist / (4.0 * float(operator_norm_upper(sf.u, norm)))


def robust_reconstruct(
    trace: RobustTrace, rtilde: Sequence[IntVec], rm: RobustModuli
) -> tuple[tuple[Fraction, ...], IntVec]:
    """Average the per-modulus reconstructions.

    Returns the exact rational average and its coordinatewise
    round-half-up companion. With correct folding vectors the error of
    the average is bounded by the remainder error bound.
    """
    if not trace.success:
        raise ConditionViolatedError("cannot reconstruct from a failed trace")
    count = len(rm)
    totals = [0] * rm.dim
    for i in range(count):
        est = rm.moduli[i] @ trace.folding_vectors[i] + rtilde[i]
        totals = [t + e for t, e in zip(totals, est)]
    average = tuple(Fraction(t, count) for t in totals)
    rounded = IntVec(floor(f + Fraction(1, 2)) for f in average)
    return average, rounded


@dataclass(frozen=True)
class ErrorModel:
    """Bounded remainder noise: integer vectors with magnitude <= tau."""

    tau: int | Fraction
    norm: Norm = Norm.L2

    def __post_init__(self):
        if self.tau < 0:
            raise ConditionViolatedError("error bound must be nonnegative")


@lru_cache(maxsize=256)
def _error_ball(tau: Fraction, norm: Norm, dim: int) -> tuple[IntVec, ...]:
    reach = floor(tau)
    side = 2 * reach + 1
    if side**dim > default_enum_cap():
        raise EnumerationCapError("error ball too large to enumerate")
    pts = []
    for c in itertools.product(range(-reach, reach + 1), repeat=dim):
        if norm is Norm.L2:
            ok = sum(x * x for x in c) <= tau * tau
        elif norm is Norm.L1:
            ok = sum(abs(x) for x in c) <= tau
        else:
            ok = max(abs(x) for x in c) <= tau
        if ok:
            pts.append(IntVec(c))
    return tuple(pts)


def sample_error(rng: random.Random, model: ErrorModel, dim: int) -> IntVec:
    """Uniform draw from the integer ball of radius tau."""
    ball = _error_ball(Fraction(model.tau), model.norm, dim)
    return ball[rng.randrange(len(ball))]


def sample_in_range(
    rng: random.Random, rm: RobustModuli, index: int = 0, u: IntMat | None = None
) -> IntVec:
    """Exactly uniform draw from the recoverable range anchored at index.

    The range is parametrized bijectively by a folding vector in the
    residue set of the other cofactors' product and a remainder of the
    anchored modulus; both parts are sampled uniformly by Smith digits.
    """
    if not 0 <= index < len(rm):
        raise IndexError("modulus index out of range")
    tail = IntMat.identity(rm.dim) if u is None else u
    region = rm.cofactor_product_except(index) @ tail
    n = uniform_residue(rng, region)
    r = uniform_residue(rng, rm.moduli[index])
    return rm.moduli[index] @ n + r


@dataclass(frozen=True)
class TrialRecord:
    m: IntVec
    folding_true: tuple[IntVec, ...]
    rtilde: tuple[IntVec, ...]
    trace: RobustTrace
    correct: bool
    reconstruction: tuple[Fraction, ...]


def _trial_rng(seed: int, case_index: int, tau_index: int, trial: int) -> random.Random:
    # string seeding hashes via sha512, stable across platforms and runs
    return random.Random(f"{seed}:{case_index}:{tau_index}:{trial}")


def robustness_trials(
    rm: RobustModuli,
    tau: int | Fraction,
    trials: int,
    seed: int,
    algorithm: int = 1,
    norm: Norm = Norm.L2,
    u: IntMat | None = None,
    stream: tuple[int, int] = (0, 0),
) -> Iterator[TrialRecord]:
    """Independent trials of draw / perturb / recover / reconstruct.

    Per-trial RNGs are derived from (seed, case index, tau index, trial
    index), so results do not depend on evaluation order.
    """
    model = ErrorModel(tau, norm)
    truth_cache: dict[IntVec, tuple[IntVec, ...]] = {}
    for k in range(trials):
        rng = _trial_rng(seed, stream[0], stream[1], k)
        m = sample_in_range(rng, rm, 0, u)
        folding_true = truth_cache.get(m)
        if folding_true is None:
            folding_true = tuple(folding_vector(m, mi) for mi in rm.moduli)
            truth_cache[m] = folding_true
        rtilde = tuple(
            mod_reduce(m, mi).value + sample_error(rng, model, rm.dim)
            for mi in rm.moduli
        )
        trace = recover_folding_vectors(rtilde, rm, algorithm, norm, u)
        correct = trace.folding_vectors == folding_true
        reconstruction, _ = robust_reconstruct(trace, rtilde, rm)
        yield TrialRecord(m, folding_true, rtilde, trace, correct, reconstruction)


def robustness_sweep(
    cases: Sequence[tuple[str, RobustModuli]],
    taus: Sequence[int],
    trials: int,
    seed: int,
    algorithm: int = 1,
    norm: Norm = Norm.L2,
) -> list[tuple[str, int, float, float]]:
    """Mean reconstruction error and success rate per (case, tau).

    Deterministic for a given seed under any evaluation schedule; rows
    are (case, tau, mean L2 error, success rate).
    """
    rows = []
    for ci, (name, rm) in enumerate(cases):
        for ti, tau in enumerate(taus):
            total_err = 0.0
            hits = 0
            for rec in robustness_trials(
                rm, tau, trials, seed, algorithm, norm, stream=(ci, ti)
            ):
                err2 = sum(
                    (Fraction(a) - b) ** 2
                    for a, b in zip(rec.m, rec.reconstruction)
                )
                total_err += sqrt(float(err2))
                hits += rec.correct
            rows.append((name, tau, total_err / trials, hits / trials))
    return rows


def default_robust_cases() -> list[tuple[str, RobustModuli]]:
    """The two benchmark cases: a reference common factor and its double."""
    base = IntMat([[48, 17], [8, 46]])
    cofactors = [IntMat([[1, 3], [3, 1]]), IntMat([[3, 4], [4, 3]])]
    return [
        ("base", RobustModuli(base, cofactors)),
        ("doubled", RobustModuli(2 * base, cofactors)),
    ]
