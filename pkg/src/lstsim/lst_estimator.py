"""Classical post-processing of shadow ensembles into error-mitigated estimates.

The target ratio is Tr(Pi f(rho) Pi O) / Tr(Pi f(rho) Pi) with Pi the
codespace projector and f(x) = sum_p c_p x^p.  Each snapshot (U, b) is
reconstructed sector-wise as rho_hat = prod_i [(2^n + 1) sigma_i - 1] with
sigma_i = prod_j (1 + (-1)^{b_j} U^dag Z_j U)/2, and the power-p moment is the
average of Tr(Pi rho_hat_{i_1} ... rho_hat_{i_p} Pi O) over disjoint
consecutive p-tuples of snapshots.

Two evaluation routes exist and agree snapshot-by-snapshot at p = 1:

* the general route expands the sector reconstruction binomially and hands
  every term to the GF(2) trace engine (any p, cost grows with the null-space
  volume);
* the fast p = 1 route expands the 2^k sector subsets, builds each term as a
  stabilizer tableau (chosen sectors pure, the rest maximally mixed), projects
  it in O(N^3), and reads the observable off the projected state.

For p >= 2 a single tuple's trace legitimately carries an imaginary part
whose expectation vanishes; the engine is asked for the real part, which
keeps the estimator unbiased.  Numerator and denominator share snapshots
(paired); the bootstrap resamples them jointly at tuple level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf2_pauli import (
    DEFAULT_NULL_SPACE_CAP,
    AffinePauliFactor,
    NullSpaceTooLargeError,
    PauliOp,
    affine_product_trace,
    commutes,
)
from .codes import (
    StabilizerCode,
    embedded_generators,
    lift_logical_multi,
    sector_offsets,
)
from .shadow_acquisition import ShadowEnsemble, Snapshot
from .tableau import Tableau


class InsufficientShotsError(ValueError):
    """Fewer snapshots than the requested moment power needs."""


class ZeroDenominatorMeanError(ZeroDivisionError):
    """The ratio-variance approximation needs a nonzero denominator mean."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Distillation polynomial and estimator knobs.

    ``coefficients[p-1]`` is c_p; the defaults f(x) = x and f(x) = x^2 are
    available via the constructors below.
    """

    coefficients: tuple[float, ...] = (1.0,)
    bootstrap_resamples: int = 200
    bootstrap_seed: int = 7
    null_space_cap: int = DEFAULT_NULL_SPACE_CAP
    use_fast_m1: bool = True

    def __post_init__(self) -> None:
        if not self.coefficients or not any(c != 0.0 for c in self.coefficients):
            raise ValueError("need at least one nonzero coefficient")

    @classmethod
    def rho(cls, **kw) -> "EstimatorConfig":
        return cls(coefficients=(1.0,), **kw)

    @classmethod
    def rho_power(cls, m: int, **kw) -> "EstimatorConfig":
        if m < 1:
            raise ValueError("power must be >= 1")
        return cls(coefficients=(0.0,) * (m - 1) + (1.0,), **kw)

    @property
    def m_max(self) -> int:
        return len(self.coefficients)


@dataclass
class MomentEstimate:
    """A single projected moment: its mean and the per-tuple values."""

    mean: float
    values: np.ndarray


@dataclass
class EstimateReport:
    """Output of the ratio estimator with bootstrap diagnostics."""

    numerator_mean: float
    denominator_mean: float
    ratio: float
    bootstrap_std: float
    denominator_std: float
    shots_used: int
    m_max: int
    degenerate_denominator: bool
    moments: dict[int, dict[str, float]] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "numerator_mean": self.numerator_mean,
            "denominator_mean": self.denominator_mean,
            "ratio": self.ratio,
            "bootstrap_std": self.bootstrap_std,
            "denominator_std": self.denominator_std,
            "shots_used": self.shots_used,
            "m_max": self.m_max,
            "degenerate_denominator": self.degenerate_denominator,
            "moments": {str(p): diag for p, diag in self.moments.items()},
        }
        return json.dumps(payload, indent=2)


# -- observables -------------------------------------------------------------------


def lift_observable(codes: Sequence[StabilizerCode], observable) -> list[tuple[float, PauliOp | None]]:
    """Normalize a logical observable into weighted physical Pauli terms.

    Accepts a logical Pauli string ("Z", "XX", "-YZ"), a k-qubit PauliOp, or a
    list of (weight, term) pairs; None stands for the identity.
    """
    if observable is None:
        return [(1.0, None)]
    if isinstance(observable, (list, tuple)) and observable and isinstance(observable[0], (list, tuple)):
        out = []
        for w, term in observable:
            (inner_w, lifted), = lift_observable(codes, term)
            out.append((float(w) * inner_w, lifted))
        return out
    if isinstance(observable, str):
        observable = PauliOp.from_string(observable)
    if not isinstance(observable, PauliOp):
        raise TypeError(f"cannot interpret observable {observable!r}")
    if observable.phase_exp % 2:
        raise ValueError("logical observable must be Hermitian")
    if observable.is_identity_bits():
        return [(float(observable.sign), None)]
    lifted = lift_logical_multi(codes, observable.with_phase(0))
    return [(float(observable.sign) * lifted.sign, lifted.with_phase(0))]


def fidelity_observable(k: int = 1) -> list[tuple[float, str]]:
    """|0...0><0...0| on the logical qubits as weighted Pauli terms."""
    terms = []
    for mask in range(1 << k):
        z = 0
        for i in range(k):
            if (mask >> i) & 1:
                z |= 1 << i
        s = "".join("Z" if (z >> i) & 1 else "I" for i in range(k))
        terms.append((1.0 / (1 << k), "+" + s))
    return terms


# -- snapshot reconstruction --------------------------------------------------------


def _sector_rows(snapshot: Snapshot, sector: int, n: int) -> tuple[list, list]:
    """Stabilizer and destabilizer rows (x, z, phase) of U^dag |b><b| U, sector-local."""
    inv = snapshot.clifford(sector, n).inverse()
    bits = snapshot.sector_bits[sector]
    stab = []
    destab = []
    for j in range(n):
        op = inv.image_z(j)
        phase = (op.phase_exp + 2 * ((bits >> j) & 1)) & 3
        stab.append((op.x_bits, op.z_bits, phase))
        dop = inv.image_x(j)
        destab.append((dop.x_bits, dop.z_bits, dop.phase_exp))
    return stab, destab


def reconstruction_factors(
    snapshot: Snapshot, sector: int, n: int, n_total: int | None = None, offset: int = 0
) -> list[tuple[float, list[AffinePauliFactor]]]:
    """Two-term sector expansion of the reconstruction map:

    [(2^n + 1, factors of sigma_i), (-1.0, [])]

    where sigma_i = prod_j (1 + (-1)^{b_j} U^dag Z_j U)/2, embedded at
    ``offset`` in a register of ``n_total`` qubits.
    """
    if n_total is None:
        n_total = n
    stab, _ = _sector_rows(snapshot, sector, n)
    factors = []
    for x, z, phase in stab:
        sign = 1.0 if phase == 0 else -1.0
        factors.append(
            AffinePauliFactor(0.5, 0.5 * sign, PauliOp(n, x, z, 0).embed(n_total, offset))
        )
    return [(float((1 << n) + 1), factors), (-1.0, [])]


# -- fast m = 1 route ----------------------------------------------------------------


def _m1_values(
    ensemble: ShadowEnsemble,
    codes: Sequence[StabilizerCode],
    observables: Sequence[PauliOp | None],
) -> list[np.ndarray]:
    """Per-snapshot values of Tr(Pi rho_hat Pi O) for each observable, O(N^3) each.

    All observables share the per-subset projections, so requesting the
    numerator and denominator together costs one pass.
    """
    ensemble.check_matches(codes)
    n = ensemble.n_sector
    k = ensemble.k
    n_total = n * k
    offsets = sector_offsets(codes)
    gens = embedded_generators(codes)
    for obs in observables:
        if obs is not None:
            _require_logical(obs, gens)

    # completion rows for maximally mixed sectors: bare Z_j / X_j
    mixed_stab = {
        i: [((0, 1 << (offsets[i] + j), 0)) for j in range(n)] for i in range(k)
    }
    mixed_destab = {
        i: [((1 << (offsets[i] + j), 0, 0)) for j in range(n)] for i in range(k)
    }
    weights = [
        float(((1 << n) + 1) ** t) * float((-1) ** (k - t)) * float(1 << (n * (k - t)))
        for t in range(k + 1)
    ]

    out = [np.empty(ensemble.shots) for _ in observables]
    for s_idx, snap in enumerate(ensemble.snapshots):
        sector_rows = [_sector_rows(snap, i, n) for i in range(k)]
        embedded = []
        for i, (stab, destab) in enumerate(sector_rows):
            off = offsets[i]
            embedded.append(
                (
                    [(x << off, z << off, ph) for x, z, ph in stab],
                    [(x << off, z << off, ph) for x, z, ph in destab],
                )
            )
        acc = [0.0] * len(observables)
        for mask in range(1 << k):
            t_count = mask.bit_count()
            stab_rows = []
            destab_rows = []
            for i in range(k):
                if (mask >> i) & 1:
                    stab_rows += embedded[i][0]
                    destab_rows += embedded[i][1]
            for i in range(k):
                if not (mask >> i) & 1:
                    stab_rows += mixed_stab[i]
                    destab_rows += mixed_destab[i]
            xs = [r[0] for r in stab_rows] + [r[0] for r in destab_rows]
            zs = [r[1] for r in stab_rows] + [r[1] for r in destab_rows]
            phases = [r[2] for r in stab_rows] + [r[2] for r in destab_rows]
            t = Tableau(n_total, xs, zs, phases, active=t_count * n)
            trace = t.project(gens, validate=False)
            if trace == 0.0:
                continue
            w = weights[t_count] * trace
            for o, obs in enumerate(observables):
                acc[o] += w * (t.expectation(obs) if obs is not None else 1.0)
        for o in range(len(observables)):
            out[o][s_idx] = acc[o]
    return out


def _ensemble_slice(ensemble: ShadowEnsemble, lo: int, hi: int) -> ShadowEnsemble:
    return ShadowEnsemble(
        ensemble.code_name, ensemble.n_sector, ensemble.k, ensemble.p,
        ensemble.prep_name, ensemble.master_seed,
        snapshots=ensemble.snapshots[lo:hi], version=ensemble.version,
    )


def _m1_chunk(args):
    ensemble, codes, observables = args
    return _m1_values(ensemble, codes, observables)


def _m1_values_parallel(
    ensemble: ShadowEnsemble,
    codes: Sequence[StabilizerCode],
    observables: Sequence[PauliOp | None],
    threads: int,
) -> list[np.ndarray]:
    if threads <= 1 or ensemble.shots < 4 * threads:
        return _m1_values(ensemble, codes, observables)
    from concurrent.futures import ProcessPoolExecutor

    chunk = (ensemble.shots + threads - 1) // threads
    spans = [(lo, min(lo + chunk, ensemble.shots)) for lo in range(0, ensemble.shots, chunk)]
    jobs = [(_ensemble_slice(ensemble, lo, hi), list(codes), list(observables)) for lo, hi in spans]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_m1_chunk, jobs))
    return [np.concatenate([part[o] for part in parts]) for o in range(len(observables))]


def fast_projected_moment_m1(
    ensemble: ShadowEnsemble, codes: Sequence[StabilizerCode], observable: PauliOp | None
) -> MomentEstimate:
    """m = 1 moment via tableau projection; equals projected_moment(m=1) per snapshot."""
    if ensemble.shots < 1:
        raise InsufficientShotsError("empty ensemble")
    (values,) = _m1_values(ensemble, codes, [observable])
    return MomentEstimate(float(values.mean()), values)


# -- general route --------------------------------------------------------------------


def _require_logical(obs: PauliOp, gens: Sequence[PauliOp]) -> None:
    for g in gens:
        if commutes(obs, g):
            raise ValueError(f"observable {obs} does not commute with projector generator {g}")


def projected_moment(
    ensemble: ShadowEnsemble,
    codes: Sequence[StabilizerCode],
    observable: PauliOp | None,
    m: int,
    cfg: EstimatorConfig = EstimatorConfig(),
) -> MomentEstimate:
    """Unbiased estimate of Tr(Pi rho^m Pi O) from disjoint consecutive m-tuples."""
    ensemble.check_matches(codes)
    if m < 1:
        raise ValueError("moment power must be >= 1")
    n_tuples = ensemble.shots // m
    if n_tuples < 1:
        raise InsufficientShotsError(f"need at least {m} snapshots for m={m}")
    n = ensemble.n_sector
    k = ensemble.k
    n_total = n * k
    offsets = sector_offsets(codes)
    gens = embedded_generators(codes)
    proj_factors = []
    for code, off in zip(codes, offsets):
        for f in code.projector_factors():
            proj_factors.append(AffinePauliFactor(f.a, f.b, f.op.embed(n_total, off)))
    if observable is not None:
        _require_logical(observable, gens)
        obs_factors = [AffinePauliFactor(0.0, float(observable.sign), observable.with_phase(0))]
    else:
        obs_factors = []

    values = np.empty(n_tuples)
    for t_idx in range(n_tuples):
        snaps = ensemble.snapshots[t_idx * m : (t_idx + 1) * m]
        slots = []  # (weight_included, sigma factors) per (snapshot, sector)
        for snap in snaps:
            for i in range(k):
                slots.append(reconstruction_factors(snap, i, n, n_total, offsets[i])[0])
        total = 0.0
        for mask in range(1 << len(slots)):
            coeff = 1.0
            factors: list[AffinePauliFactor] = []
            for s, (w_inc, sigma) in enumerate(slots):
                if (mask >> s) & 1:
                    coeff *= w_inc
                    factors += sigma
                else:
                    coeff *= -1.0
            try:
                trace = affine_product_trace(
                    factors + proj_factors + obs_factors,
                    null_space_cap=cfg.null_space_cap,
                    n_qubits=n_total,
                    drop_imaginary=(m > 1),
                )
            except NullSpaceTooLargeError as exc:
                raise NullSpaceTooLargeError(
                    f"tuple {t_idx} (snapshots {t_idx * m}..{(t_idx + 1) * m - 1}): {exc}"
                ) from exc
            total += coeff * trace
        values[t_idx] = total
    return MomentEstimate(float(values.mean()), values)


# -- ratio estimator --------------------------------------------------------------------


def lst_expectation(
    ensemble: ShadowEnsemble,
    codes: Sequence[StabilizerCode],
    observable,
    cfg: EstimatorConfig = EstimatorConfig(),
    threads: int = 1,
    samples_sink=None,
) -> EstimateReport:
    """Error-mitigated ratio estimate with paired bootstrap errors.

    ``samples_sink`` (a path or text handle) optionally receives the paired
    per-tuple numerator/denominator values as CSV for external analysis.
    """
    terms = lift_observable(codes, observable)
    num_by_p: dict[int, np.ndarray] = {}
    den_by_p: dict[int, np.ndarray] = {}
    for p, c in enumerate(cfg.coefficients, start=1):
        if c == 0.0:
            continue
        wanted: list[PauliOp | None] = [op for _, op in terms]
        if p == 1 and cfg.use_fast_m1:
            results = _m1_values_parallel(ensemble, codes, wanted + [None], threads)
        else:
            results = [
                projected_moment(ensemble, codes, op, p, cfg).values for op in wanted
            ] + [projected_moment(ensemble, codes, None, p, cfg).values]
        den_by_p[p] = results[-1]
        num = np.zeros_like(results[-1])
        for (w, _), vals in zip(terms, results[:-1]):
            num = num + w * vals
        num_by_p[p] = num

    if samples_sink is not None:
        _dump_samples(samples_sink, num_by_p, den_by_p)

    coeffs = {p: cfg.coefficients[p - 1] for p in num_by_p}
    num_mean = sum(coeffs[p] * num_by_p[p].mean() for p in num_by_p)
    den_mean = sum(coeffs[p] * den_by_p[p].mean() for p in den_by_p)
    ratio = num_mean / den_mean if den_mean != 0.0 else float("nan")

    rng = np.random.default_rng(cfg.bootstrap_seed)
    ratios = np.empty(cfg.bootstrap_resamples)
    dens = np.empty(cfg.bootstrap_resamples)
    for b in range(cfg.bootstrap_resamples):
        num_b = 0.0
        den_b = 0.0
        for p in num_by_p:
            size = len(num_by_p[p])
            idx = rng.integers(0, size, size)
            num_b += coeffs[p] * num_by_p[p][idx].mean()
            den_b += coeffs[p] * den_by_p[p][idx].mean()
        dens[b] = den_b
        ratios[b] = num_b / den_b if den_b != 0.0 else np.nan
    finite = np.isfinite(ratios)
    boot_std = float(ratios[finite].std(ddof=1)) if finite.sum() > 1 else float("nan")
    den_std = float(dens.std(ddof=1)) if len(dens) > 1 else float("nan")

    moments = {
        p: {
            "coefficient": coeffs[p],
            "samples": int(len(num_by_p[p])),
            "numerator_mean": float(num_by_p[p].mean()),
            "numerator_std": float(num_by_p[p].std(ddof=1)) if len(num_by_p[p]) > 1 else 0.0,
            "denominator_mean": float(den_by_p[p].mean()),
            "denominator_std": float(den_by_p[p].std(ddof=1)) if len(den_by_p[p]) > 1 else 0.0,
        }
        for p in num_by_p
    }
    return EstimateReport(
        numerator_mean=float(num_mean),
        denominator_mean=float(den_mean),
        ratio=float(ratio),
        bootstrap_std=boot_std,
        denominator_std=den_std,
        shots_used=ensemble.shots,
        m_max=cfg.m_max,
        degenerate_denominator=bool(abs(den_mean) < 5.0 * den_std) if np.isfinite(den_std) else True,
        moments=moments,
    )


def _dump_samples(sink, num_by_p, den_by_p) -> None:
    import csv
    from pathlib import Path

    handle = open(sink, "w", newline="") if isinstance(sink, (str, Path)) else sink
    try:
        writer = csv.writer(handle)
        writer.writerow(["moment", "tuple_index", "numerator", "denominator"])
        for p in sorted(num_by_p):
            for i, (nv, dv) in enumerate(zip(num_by_p[p], den_by_p[p])):
                writer.writerow([p, i, repr(float(nv)), repr(float(dv))])
    finally:
        if isinstance(sink, (str, Path)):
            handle.close()


def bootstrap_std(
    per_sample_numer: np.ndarray,
    per_sample_denom: np.ndarray,
    cfg: EstimatorConfig,
    rng: np.random.Generator,
) -> float:
    """Std of the ratio of means over paired bootstrap resamples."""
    num = np.asarray(per_sample_numer, dtype=float)
    den = np.asarray(per_sample_denom, dtype=float)
    if num.size == 0 or num.shape != den.shape:
        raise ValueError("need equal-length, non-empty paired samples")
    ratios = np.empty(cfg.bootstrap_resamples)
    size = num.size
    for b in range(cfg.bootstrap_resamples):
        idx = rng.integers(0, size, size)
        d = den[idx].mean()
        ratios[b] = num[idx].mean() / d if d != 0.0 else np.nan
    finite = np.isfinite(ratios)
    return float(ratios[finite].std(ddof=1)) if finite.sum() > 1 else float("nan")


def ratio_variance_approx(
    mu_p: float, mu_q: float, var_p: float, var_q: float, cov_pq: float
) -> float:
    """First-order delta-method variance of P/Q:

    (mu_P/mu_Q)^2 [Var(P)/mu_P^2 + Var(Q)/mu_Q^2 - 2 Cov(P,Q)/(mu_P mu_Q)].
    """
    if mu_q == 0.0:
        raise ZeroDenominatorMeanError("denominator mean is zero")
    r = mu_p / mu_q
    out = var_p / mu_q**2 + r**2 * var_q / mu_q**2 - 2.0 * r * cov_pq / mu_q**2
    return float(out)


# -- shadow-variance validation -------------------------------------------------------


def empirical_variance_operator(n: int, observable, projector) -> np.ndarray:
    """Exact V[PO] = E_U sum_b U^dag|b><b|U <b| U M^{-1}(P O) U^dag |b>^2
    averaged over the full n-qubit Clifford group (n <= 2: 24 / 11520 elements)."""
    from .clifford import CliffordElement, clifford_group_order
    from .dense_oracle import clifford_unitary

    if n > 2:
        raise ValueError("exhaustive Clifford averaging is only feasible for n <= 2")
    d = 1 << n
    P = np.asarray(projector, dtype=complex)
    O = np.asarray(observable, dtype=complex)
    A = P @ O
    W = (d + 1) * A - np.trace(A) * np.eye(d)
    total = np.zeros((d, d), dtype=complex)
    count = clifford_group_order(n)
    for idx in range(count):
        U = clifford_unitary(CliffordElement.from_index(idx, n))
        Ud = U.conj().T
        WU = U @ W @ Ud
        for b in range(d):
            v = Ud[:, b]
            val = WU[b, b].real
            total += np.outer(v, v.conj()) * (val * val)
    return total / count
