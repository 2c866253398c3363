"""Experiment harness: ensemble generation, estimation, sweeps, oracle checks.

Every command is deterministic under a fixed seed and writes CSV/JSON files
meant for scripted plotting.  Options may come from a JSON config file
(--config) with the same keys as the long flags; explicit flags win.

Exit codes: 0 success, 1 usage/config error, 2 check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import dense_oracle as oracle
from .codes import (
    LogicalStatePrep,
    StabilizerCode,
    lift_logical_multi,
    prep_by_name,
    random_code,
    resolve_code,
)
from .gf2_pauli import PauliOp
from .lst_estimator import (
    EstimatorConfig,
    fidelity_observable,
    lst_expectation,
)
from .noise import NoiseSpec
from .shadow_acquisition import (
    EnsembleFormatError,
    acquire_ensemble,
    read_ensemble,
    write_ensemble,
    write_ensemble_jsonl,
)


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage problems, not 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


def _opt(args: argparse.Namespace, config: dict, key: str, default=None):
    v = getattr(args, key, None)
    if v is not None:
        return v
    return config.get(key, default)


def _parse_grid(spec: str) -> list[float]:
    """'start:stop:count[:lin]' -> grid, log-spaced unless ':lin' is given."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"bad grid {spec!r}, expected start:stop:count[:lin]")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}") from exc
    if count < 1:
        raise UsageError("grid needs at least one point")
    if len(parts) == 4 and parts[3] == "lin":
        return [float(x) for x in np.linspace(start, stop, count)]
    if start <= 0:
        raise UsageError("log grid needs start > 0")
    return [float(x) for x in np.logspace(np.log10(start), np.log10(stop), count)]


def _estimator_config(args, config) -> EstimatorConfig:
    coeffs = _opt(args, config, "coeffs")
    m = _opt(args, config, "m")
    if coeffs is not None:
        try:
            c = tuple(float(x) for x in str(coeffs).split(","))
        except ValueError as exc:
            raise UsageError(f"bad coefficients {coeffs!r}") from exc
    elif m is not None:
        m = int(m)
        if m < 1:
            raise UsageError("m must be >= 1")
        c = (0.0,) * (m - 1) + (1.0,)
    else:
        c = (1.0,)
    return EstimatorConfig(
        coefficients=c,
        bootstrap_resamples=int(_opt(args, config, "bootstrap", 200)),
        bootstrap_seed=int(_opt(args, config, "seed", 7)),
    )


def _physical_infidelity(p: float) -> float:
    """Unencoded single qubit |0> under the same depolarizing rate."""
    return 2.0 * p / 3.0


def _dense_lst_infidelity(code: StabilizerCode, p: float, coefficients) -> float:
    prep = LogicalStatePrep.zero(1)
    rho = oracle.exact_noisy_state([code], prep, p).matrix
    zbar = lift_logical_multi([code], PauliOp.from_string("Z"))
    dim = rho.shape[0]
    obs = (np.eye(dim) + oracle.pauli_matrix(zbar)) / 2.0
    return 1.0 - oracle.exact_lst_value(rho, [code], obs, coefficients)


# -- subcommands -----------------------------------------------------------------


def cmd_sample(args, config) -> int:
    code = resolve_code(_require(args, config, "code"))
    k = int(_opt(args, config, "k", 1))
    codes = [code] * k
    prep = prep_by_name(_opt(args, config, "prep", "zero"), k)
    p = float(_opt(args, config, "p", 0.0))
    shots = int(_require(args, config, "shots"))
    if shots < 1:
        raise UsageError("shots must be positive")
    seed = int(_opt(args, config, "seed", 0))
    threads = int(_opt(args, config, "threads", 1))
    out = _require(args, config, "out")
    ensemble = acquire_ensemble(codes, prep, NoiseSpec(p, seed), shots, threads=threads)
    write_ensemble(ensemble, out)
    if _opt(args, config, "jsonl"):
        write_ensemble_jsonl(ensemble, str(out) + ".jsonl")
    print(
        f"wrote {out}: code={ensemble.code_name} n={ensemble.n_sector} k={ensemble.k} "
        f"p={ensemble.p} prep={ensemble.prep_name} seed={ensemble.master_seed} "
        f"shots={ensemble.shots}"
    )
    return 0


def cmd_estimate(args, config) -> int:
    ensemble = read_ensemble(_require(args, config, "ensemble"))
    code = resolve_code(_require(args, config, "code"))
    codes = [code] * ensemble.k
    ensemble.check_matches(codes)
    if _opt(args, config, "fidelity"):
        observable = fidelity_observable(ensemble.k)
    else:
        observable = _opt(args, config, "observable", "Z" * ensemble.k)
    cfg = _estimator_config(args, config)
    threads = int(_opt(args, config, "threads", 1))
    report = lst_expectation(
        ensemble, codes, observable, cfg, threads=threads,
        samples_sink=_opt(args, config, "samples_out"),
    )
    out = _opt(args, config, "out")
    if out:
        Path(out).write_text(report.to_json() + "\n")
    print(report.to_json())
    return 0


def cmd_threshold_sweep(args, config) -> int:
    code = resolve_code(_opt(args, config, "code", "nn5_513"))
    shots = int(_opt(args, config, "shots", 3000))
    seed = int(_opt(args, config, "seed", 0))
    bootstrap = int(_opt(args, config, "bootstrap", 200))
    threads = int(_opt(args, config, "threads", 1))
    grid = _parse_grid(_opt(args, config, "p_grid", "0.001:0.9:20"))
    out = _require(args, config, "out")
    prep = LogicalStatePrep.zero(1)
    rows = []
    for i, p in enumerate(grid):
        ensemble = acquire_ensemble([code], prep, NoiseSpec(p, seed + i), shots, threads=threads)
        fid = fidelity_observable(1)
        rep1 = lst_expectation(
            ensemble, [code], fid,
            EstimatorConfig.rho(bootstrap_resamples=bootstrap, bootstrap_seed=seed),
            threads=threads,
        )
        rep2 = lst_expectation(
            ensemble, [code], fid,
            EstimatorConfig.rho_power(2, bootstrap_resamples=bootstrap, bootstrap_seed=seed),
            threads=threads,
        )
        rows.append(
            {
                "p": p,
                "physical_infidelity": _physical_infidelity(p),
                "dense_infid_m1": _dense_lst_infidelity(code, p, [1.0]),
                "dense_infid_m2": _dense_lst_infidelity(code, p, [0.0, 1.0]),
                "lst_infid_m1": 1.0 - rep1.ratio,
                "lst_m1_std": rep1.bootstrap_std,
                "lst_infid_m2": 1.0 - rep2.ratio,
                "lst_m2_std": rep2.bootstrap_std,
            }
        )
        print(f"p={p:.5f} m1={rows[-1]['lst_infid_m1']:.5f} m2={rows[-1]['lst_infid_m2']:.5f}")
    _write_csv(out, rows)
    return 0


def cmd_code_size_sweep(args, config) -> int:
    names = str(_opt(args, config, "codes", "nn5_513,nn7_steane,nn11,nn17")).split(",")
    p = float(_opt(args, config, "p", 0.01))
    shots = int(_opt(args, config, "shots", 100000))
    budgets = [int(b) for b in str(_opt(args, config, "budgets", "100,1000,10000,100000")).split(",")]
    seed = int(_opt(args, config, "seed", 0))
    bootstrap = int(_opt(args, config, "bootstrap", 200))
    threads = int(_opt(args, config, "threads", 1))
    out = _require(args, config, "out")
    if max(budgets) > shots:
        raise UsageError("largest budget exceeds the sampled shots")
    rows = []
    for name in names:
        code = resolve_code(name.strip())
        ensemble = acquire_ensemble(
            [code], LogicalStatePrep.zero(1), NoiseSpec(p, seed), shots, threads=threads
        )
        for budget in budgets:
            sub = _ensemble_prefix(ensemble, budget)
            rep = lst_expectation(
                sub, [code], fidelity_observable(1),
                EstimatorConfig.rho(bootstrap_resamples=bootstrap, bootstrap_seed=seed),
                threads=threads,
            )
            rows.append(
                {
                    "code": code.name,
                    "n": code.n_physical,
                    "shots": budget,
                    "fidelity": rep.ratio,
                    "bootstrap_std": rep.bootstrap_std,
                }
            )
            print(f"{code.name} shots={budget}: F={rep.ratio:.4f} +- {rep.bootstrap_std:.4f}")
    _write_csv(out, rows)
    return 0


def cmd_logical_scaling_sweep(args, config) -> int:
    code = resolve_code(_opt(args, config, "code", "nn5_513"))
    k_values = [int(x) for x in str(_opt(args, config, "k_values", "1,2,3,4")).split(",")]
    p = float(_opt(args, config, "p", 0.01))
    shots = int(_opt(args, config, "shots", 3000))
    seed = int(_opt(args, config, "seed", 0))
    bootstrap = int(_opt(args, config, "bootstrap", 200))
    threads = int(_opt(args, config, "threads", 1))
    out = _require(args, config, "out")
    rows = []
    for k in k_values:
        codes = [code] * k
        ensemble = acquire_ensemble(
            codes, LogicalStatePrep.ghz(k), NoiseSpec(p, seed + k), shots, threads=threads
        )
        rep = lst_expectation(
            ensemble, codes, "X" * k,
            EstimatorConfig.rho(bootstrap_resamples=bootstrap, bootstrap_seed=seed),
            threads=threads,
        )
        rows.append({"k": k, "mean": rep.ratio, "bootstrap_std": rep.bootstrap_std})
        print(f"k={k}: <X..X> = {rep.ratio:.4f} +- {rep.bootstrap_std:.4f}")
    _write_csv(out, rows)
    return 0


def cmd_make_code(args, config) -> int:
    n = int(_require(args, config, "n"))
    seed = int(_opt(args, config, "seed", n))
    min_distance = int(_opt(args, config, "min_distance", 3))
    out = _require(args, config, "out")
    code = random_code(n, seed=seed, min_distance=min_distance)
    Path(out).write_text(code.to_text())
    print(f"wrote {out}: [[{n},1]] with verified distance >= {min_distance}")
    return 0


def cmd_oracle_check(args, config) -> int:
    seed = int(_opt(args, config, "seed", 0))
    failures = 0
    for name, fn in ORACLE_CHECKS:
        try:
            detail = fn(seed)
            print(f"[PASS] {name}: {detail}")
        except Exception as exc:  # report, do not crash
            failures += 1
            print(f"[FAIL] {name}: {exc}")
    if failures:
        print(f"{failures} oracle check(s) failed")
        return 2
    print("all oracle checks passed")
    return 0


# -- oracle checks -----------------------------------------------------------------


def _check_multiply_associativity(seed: int) -> str:
    from .gf2_pauli import multiply

    rng = np.random.default_rng(seed)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        ops = [
            PauliOp(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)), int(rng.integers(0, 4)))
            for _ in range(3)
        ]
        left = multiply(multiply(ops[0], ops[1]), ops[2])
        right = multiply(ops[0], multiply(ops[1], ops[2]))
        if left != right:
            raise AssertionError(f"associativity broken for {[str(o) for o in ops]}")
    return "300 random triples"


def _check_multiply_dense(seed: int) -> str:
    from .gf2_pauli import multiply

    rng = np.random.default_rng(seed + 1)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        p = PauliOp(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)), int(rng.integers(0, 4)))
        q = PauliOp(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)), int(rng.integers(0, 4)))
        want = oracle.pauli_matrix(p) @ oracle.pauli_matrix(q)
        got = oracle.pauli_matrix(multiply(p, q))
        if not np.allclose(want, got, atol=1e-12):
            raise AssertionError(f"dense mismatch for {p} * {q}")
    return "100 random pairs vs dense Kronecker products"


def _check_trace_engine(seed: int) -> str:
    from .gf2_pauli import AffinePauliFactor, affine_product_trace

    rng = np.random.default_rng(seed + 2)
    checked = 0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        t = _random_tableau(n, rng)
        factors = [
            AffinePauliFactor(0.5, 0.5 * (1.0 if rng.random() < 0.5 else -1.0), t.stabilizer(i))
            for i in range(n)
        ]
        want = np.trace(oracle.affine_product_dense(factors)).real
        got = affine_product_trace(factors)
        if abs(want - got) > 1e-10 * max(1.0, abs(want)):
            raise AssertionError(f"trace mismatch {got} vs {want}")
        checked += 1
    return f"{checked} stabilizer chains vs dense traces"


def _check_tableau_dense(seed: int) -> str:
    rng = np.random.default_rng(seed + 3)
    for _ in range(20):
        n = 4
        t, u = _random_tableau_with_unitary(n, rng)
        want = u @ oracle.tableau_to_dense(_zero_tableau(n)) @ u.conj().T
        got = oracle.tableau_to_dense(t)
        if not np.allclose(want, got, atol=1e-10):
            raise AssertionError("random circuit state mismatch")
    return "20 random 4-qubit circuits vs dense evolution"


def _check_projection_dense(seed: int) -> str:
    rng = np.random.default_rng(seed + 4)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        t = _random_tableau(n, rng)
        t.active = int(rng.integers(0, n + 1))
        rho = oracle.tableau_to_dense(t)
        gsrc = _random_tableau(n, rng)
        gens = [gsrc.stabilizer(i) for i in range(int(rng.integers(1, n + 1)))]
        proj = np.eye(1 << n, dtype=complex)
        for g in gens:
            proj = proj @ (np.eye(1 << n) + oracle.pauli_matrix(g)) / 2.0
        want = np.trace(proj @ rho @ proj).real
        got = t.project(gens)
        if abs(want - got) > 1e-12:
            raise AssertionError(f"projection trace {got} vs dense {want}")
    return "40 random projections (incl. mixed states) vs dense"


def _check_clifford_dense(seed: int) -> str:
    from .clifford import CliffordElement

    rng = np.random.default_rng(seed + 5)
    for n in (1, 2):
        for _ in range(15):
            el = CliffordElement.random(n, rng)
            u = oracle.clifford_unitary(el)
            p = PauliOp(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)), 0)
            want = u @ oracle.pauli_matrix(p) @ u.conj().T
            got = oracle.pauli_matrix(el.conjugate(p))
            if not np.allclose(want, got, atol=1e-10):
                raise AssertionError(f"conjugation mismatch at n={n}")
    return "sampled elements act like their dense unitaries (n <= 2)"


def _check_shadow_unbiased(seed: int) -> str:
    from .codes import trivial_code

    tc = trivial_code(1)
    prep = LogicalStatePrep.zero(1)
    p = 0.2
    shots = 20000
    ensemble = acquire_ensemble([tc], prep, NoiseSpec(p, seed + 6), shots)
    rho_want = oracle.exact_noisy_state([tc], prep, p).matrix
    acc = np.zeros((2, 2), dtype=complex)
    for snap in ensemble.snapshots:
        el = snap.clifford(0, 1)
        u = oracle.clifford_unitary(el)
        b = snap.sector_bits[0]
        vec = u.conj().T[:, b]
        acc += 3.0 * np.outer(vec, vec.conj()) - np.eye(2)
    mean = acc / shots
    err = np.abs(mean - rho_want).max()
    if err > 5.0 * 2.0 / np.sqrt(shots):
        raise AssertionError(f"shadow mean deviates by {err:.4f}")
    return f"E[rho_hat] matches dense state to {err:.4f} over {shots} shots"


def _check_m1_equivalence(seed: int) -> str:
    from .lst_estimator import fast_projected_moment_m1, projected_moment

    code = resolve_code("nn5_513")
    ensemble = acquire_ensemble(
        [code], LogicalStatePrep.zero(1), NoiseSpec(0.1, seed + 7), 20
    )
    obs = lift_logical_multi([code], PauliOp.from_string("Z"))
    fast = fast_projected_moment_m1(ensemble, [code], obs)
    slow = projected_moment(ensemble, [code], obs, 1)
    diff = float(np.abs(fast.values - slow.values).max())
    if diff > 1e-10:
        raise AssertionError(f"fast/general m=1 differ by {diff}")
    return f"20 snapshots, max |fast - general| = {diff:.2e}"


def _check_noiseless_fidelity(seed: int) -> str:
    code = resolve_code("nn5_513")
    dense = 1.0 - _dense_lst_infidelity(code, 0.0, [1.0])
    if dense != 1.0:
        raise AssertionError(f"dense noiseless fidelity is {dense}, not exactly 1.0")
    ensemble = acquire_ensemble([code], LogicalStatePrep.zero(1), NoiseSpec(0.0, seed + 8), 2000)
    rep = lst_expectation(ensemble, [code], fidelity_observable(1), EstimatorConfig.rho())
    if abs(rep.ratio - 1.0) > 4.0 * max(rep.bootstrap_std, 1e-6):
        raise AssertionError(f"sampled noiseless fidelity {rep.ratio} too far from 1")
    return f"dense exactly 1.0; sampled {rep.ratio:.4f} +- {rep.bootstrap_std:.4f}"


def _check_estimator_dense(seed: int) -> str:
    code = resolve_code("nn5_513")
    p = 0.1
    prep = LogicalStatePrep.zero(1)
    ensemble = acquire_ensemble([code], prep, NoiseSpec(p, seed + 9), 20000)
    rep = lst_expectation(ensemble, [code], fidelity_observable(1), EstimatorConfig.rho())
    want = 1.0 - _dense_lst_infidelity(code, p, [1.0])
    if abs(rep.ratio - want) > 4.0 * rep.bootstrap_std:
        raise AssertionError(
            f"estimate {rep.ratio:.4f} vs dense {want:.4f} beyond 4 bootstrap sigma"
        )
    return f"estimate {rep.ratio:.4f} vs dense {want:.4f} within bootstrap band"


ORACLE_CHECKS = [
    ("multiply associativity", _check_multiply_associativity),
    ("multiply vs dense", _check_multiply_dense),
    ("trace engine vs dense", _check_trace_engine),
    ("tableau circuits vs dense", _check_tableau_dense),
    ("projection vs dense", _check_projection_dense),
    ("clifford conjugation vs dense", _check_clifford_dense),
    ("shadow unbiasedness", _check_shadow_unbiased),
    ("fast m=1 equals general m=1", _check_m1_equivalence),
    ("noiseless fidelity", _check_noiseless_fidelity),
    ("estimator vs dense at p=0.1", _check_estimator_dense),
]


# -- helpers ------------------------------------------------------------------------


def _require(args, config, key):
    v = _opt(args, config, key)
    if v is None:
        raise UsageError(f"missing required option --{key.replace('_', '-')}")
    return v


def _write_csv(path, rows) -> None:
    if not rows:
        raise UsageError("nothing to write")
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def _ensemble_prefix(ensemble, count: int):
    from .shadow_acquisition import ShadowEnsemble

    return ShadowEnsemble(
        ensemble.code_name,
        ensemble.n_sector,
        ensemble.k,
        ensemble.p,
        ensemble.prep_name,
        ensemble.master_seed,
        snapshots=ensemble.snapshots[:count],
        version=ensemble.version,
    )


def _zero_tableau(n):
    from .tableau import Tableau

    return Tableau.zero(n)


def _random_tableau(n, rng, gates: int = 25):
    t, _ = _random_tableau_with_unitary(n, rng, gates, dense=False)
    return t


def _random_tableau_with_unitary(n, rng, gates: int = 25, dense: bool = True):
    from .tableau import Tableau

    t = Tableau.zero(n)
    u = np.eye(1 << n, dtype=complex) if dense else None
    one_q = ["H", "S", "X", "Y", "Z"]
    two_q = ["CX", "CZ", "SWAP"]
    for _ in range(gates):
        if n == 1 or rng.random() < 0.5:
            g, qs = one_q[rng.integers(0, 5)], (int(rng.integers(0, n)),)
        else:
            a, b = rng.permutation(n)[:2]
            g, qs = two_q[rng.integers(0, 3)], (int(a), int(b))
        t.apply_gate(g, *qs)
        if dense:
            u = oracle.gate_unitary(g, qs, n) @ u
    return t, u


# -- entry point ---------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="lstsim", description=__doc__)
    parser.add_argument("--config", help="JSON file with default options")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="acquire a shadow ensemble and write it to disk")
    sp.add_argument("--code")
    sp.add_argument("--k", type=int)
    sp.add_argument("--prep", choices=["zero", "ghz"])
    sp.add_argument("--p", type=float)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    sp.add_argument("--jsonl", action="store_const", const=True)
    sp.set_defaults(handler=cmd_sample)

    sp = sub.add_parser("estimate", help="run the ratio estimator on a stored ensemble")
    sp.add_argument("--ensemble")
    sp.add_argument("--code")
    sp.add_argument("--observable")
    sp.add_argument("--fidelity", action="store_const", const=True)
    sp.add_argument("--m", type=int)
    sp.add_argument("--coeffs")
    sp.add_argument("--bootstrap", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    sp.add_argument("--samples-out", dest="samples_out")
    sp.set_defaults(handler=cmd_estimate)

    sp = sub.add_parser("threshold-sweep", help="infidelity vs p with dense reference curves")
    sp.add_argument("--code")
    sp.add_argument("--shots", type=int)
    sp.add_argument("--p-grid", dest="p_grid")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--bootstrap", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_threshold_sweep)

    sp = sub.add_parser("code-size-sweep", help="fidelity convergence across [[n,1]] codes")
    sp.add_argument("--codes")
    sp.add_argument("--p", type=float)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--budgets")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--bootstrap", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_code_size_sweep)

    sp = sub.add_parser("logical-scaling-sweep", help="GHZ mean/std vs logical qubit count")
    sp.add_argument("--code")
    sp.add_argument("--k-values", dest="k_values")
    sp.add_argument("--p", type=float)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--bootstrap", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_logical_scaling_sweep)

    sp = sub.add_parser("make-code", help="generate a random [[n,1]] code file")
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--min-distance", dest="min_distance", type=int)
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_make_code)

    sp = sub.add_parser("oracle-check", help="run the dense-oracle invariant suite")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(handler=cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(args.config)
        return args.handler(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EnsembleFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
