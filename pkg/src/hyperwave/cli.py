"""Batch front end: transforms, N-term curves, verification sweeps.

Every command is deterministic given its flags and seed; CSV outputs are
byte-stable (all floats printed with 17 significant digits) so runs can be
diffed across platforms.  Exit codes: 0 pass, 1 check failure, 2 I/O
error, 3 validation error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import nterm, testfunctions, verify
from .bandmatrix import BandMatrix
from .basis1d import (
    COMPACT_SUPPORT_ALPHA,
    BasisSpec,
    load_mask_file,
    make_haar_basis,
    make_mask_basis,
)
from .errors import HyperwaveError, UnsupportedDimension
from .tensorbasis import (
    hyper_forward,
    hyper_from_iso,
    hyper_inverse,
    iso_from_hyper,
    load_coeffs,
    save_coeffs,
)
from .transform1d import check_entry_decay

__all__ = ["main", "load_array", "save_array"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _pool_size() -> int:
    env = os.environ.get("HYPERWAVE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _map_ordered(fn, items):
    """Run fn over items on the worker pool, results in input order."""
    items = list(items)
    workers = _pool_size()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Array file format: header "hyperwave-array v1 n=<n> m=<m>", then one value
# per line in C order.
# ---------------------------------------------------------------------------


def save_array(arr: np.ndarray, path) -> None:
    arr = np.asarray(arr, dtype=np.float64)
    n = arr.ndim
    m = int(np.log2(arr.shape[0])) if arr.shape[0] > 1 else 0
    lines = [f"hyperwave-array v1 n={n} m={m}"]
    lines.extend(_fmt(v) for v in arr.reshape(-1))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_array(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise OSError(f"empty input file: {path}")
    head = lines[0].split()
    if head[:2] != ["hyperwave-array", "v1"]:
        raise OSError(f"not a hyperwave array file: {path}")
    fields = dict(part.split("=", 1) for part in head[2:])
    n = int(fields["n"])
    values = np.array([float(x) for x in lines[1:]])
    size = round(len(values) ** (1.0 / n))
    if size ** n != len(values):
        raise HyperwaveError(f"array file holds {len(values)} values, not a {n}-cube")
    return values.reshape((size,) * n)


def _make_basis(arg: str) -> BasisSpec:
    if arg == "haar":
        return make_haar_basis(0)
    if arg.startswith("maskfile="):
        path = arg.split("=", 1)[1]
        quads = load_mask_file(path)
        j0 = min(quads) - 1
        name = os.path.splitext(os.path.basename(path))[0]
        return make_mask_basis(
            quads, d=1, d_tilde=1, gamma=0.5, gamma_tilde=0.5,
            alpha=COMPACT_SUPPORT_ALPHA, j0=j0, name=name,
        )
    raise HyperwaveError(f"--basis must be 'haar' or 'maskfile=PATH', got {arg!r}")


def _n_grid(nmin: int, nmax: int) -> list[int]:
    grid = []
    n = nmin
    while n <= nmax:
        grid.append(n)
        n *= 2
    return grid


def _write_csv(path, header: str, rows) -> None:
    lines = [header]
    lines.extend(rows)
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _generate(args) -> np.ndarray:
    params = {"beta": args.beta, "q": args.q, "r": args.r, "seed": args.seed}
    return testfunctions.sample_function(args.generate, params, args.n, args.jmax)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_transform(args) -> int:
    spec = _make_basis(args.basis)
    if args.direction == "forward":
        if args.generate:
            data = _generate(args)
        elif args.input:
            data = load_array(args.input)
        else:
            raise HyperwaveError("forward transform needs --input or --generate")
        u = hyper_forward(spec, data.ndim, data)
        if args.system == "iso":
            if data.ndim != 2:
                raise UnsupportedDimension(
                    "isotropic output requires n = 2, got n = %d" % data.ndim
                )
            u = iso_from_hyper(spec, u)
        save_coeffs(u, args.out)
    else:
        source = args.coeffs if args.coeffs else args.input
        if not source:
            raise HyperwaveError("inverse transform needs --coeffs or --input")
        cv = load_coeffs(source)
        if cv.basis != spec.name:
            raise HyperwaveError(
                f"coefficient file basis {cv.basis!r} does not match --basis {spec.name!r}"
            )
        if cv.system == "isotropic":
            if cv.n != 2:
                raise UnsupportedDimension("isotropic input requires n = 2")
            cv = hyper_from_iso(spec, cv)
        save_array(hyper_inverse(spec, cv), args.out)
    return 0


def cmd_nterm(args) -> int:
    spec = _make_basis(args.basis)
    u = load_coeffs(args.coeffs)
    if u.basis != spec.name:
        raise HyperwaveError(
            f"coefficient file basis {u.basis!r} does not match --basis {spec.name!r}"
        )
    tau = 1.0 / (args.r + 0.5)
    grid = _n_grid(args.nmin, args.nmax)
    curve = nterm.error_curve(u, args.q, grid)
    rows = [
        f"{n},{_fmt(curve.errors[n])},{_fmt(args.q)},{_fmt(args.r)},{_fmt(tau)},"
        f"{u.basis},{u.n},{args.seed}"
        for n in grid
    ]
    _write_csv(args.out, "N,E_N,q,r,tau,basis,n,seed", rows)
    s_hat = nterm.fit_rate(curve, args.nmin, args.nmax)
    print(f"s_hat={_fmt(s_hat)}")
    return 0


def cmd_compare(args) -> int:
    if args.n != 2:
        raise UnsupportedDimension("compare needs the isotropic system, so n = 2")
    spec = _make_basis(args.basis)
    params = {"beta": args.beta, "q": args.q, "r": args.r, "seed": args.seed}
    data = testfunctions.sample_function(args.kind, params, args.n, args.jmax)
    u = hyper_forward(spec, 2, data)
    v = iso_from_hyper(spec, u)
    grid = _n_grid(args.nmin, args.nmax)
    curve_h = nterm.error_curve(u, args.q, grid)
    curve_i = nterm.error_curve(v, args.q, grid)
    rows = [
        f"{n},{_fmt(curve_h.errors[n])},{_fmt(curve_i.errors[n])}" for n in grid
    ]
    _write_csv(args.out, "N,E_hyperbolic,E_isotropic", rows)
    rate_h = nterm.fit_rate(curve_h, args.nmin, args.nmax)
    rate_i = nterm.fit_rate(curve_i, args.nmin, args.nmax)
    print(f"rate_hyperbolic={_fmt(rate_h)}")
    print(f"rate_isotropic={_fmt(rate_i)}")
    return 0


def _parse_grid(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _p_values(args) -> list[float]:
    if args.p is not None:
        return [args.p]
    return _parse_grid(args.p_grid)


def _suite_biorth(spec, args):
    tol = 1e-12 if spec.name == "haar" else 1e-10
    rows = []
    for m in range(spec.j0, args.m_max + 1):
        defect = verify.check_biorthogonality(spec, m)
        rows.append(("biorth", "", m, defect, tol, defect <= tol))
    return rows


def _suite_decay(spec, args):
    alpha = min(4.0, spec.alpha)
    rows = []
    for m in range(spec.j0 + 1, args.m_max + 1):
        ratio = check_entry_decay(spec, m, alpha)
        rows.append(("decay", f"alpha={_fmt(alpha)}", m, ratio, 2.0, ratio <= 2.0))
    return rows


def _suite_lemma1(spec, args):
    rng = np.random.default_rng(args.seed)
    rows = []
    for p in [p for p in _p_values(args) if p <= 1.0]:
        worst = 0.0
        ok = True
        for _ in range(args.trials):
            size = rng.integers(2, 9)
            dense = np.zeros((size, size))
            nnz = rng.integers(1, size * size + 1)
            ii = rng.integers(0, size, nnz)
            jj = rng.integers(0, size, nnz)
            dense[ii, jj] = rng.standard_normal(nnz)
            a = BandMatrix.from_dense(dense)
            bound = verify.matrix_p_norm_bound(a, p)
            est = verify.operator_p_norm_estimate(a, p, trials=10, seed=int(rng.integers(1 << 30)))
            if bound > 0:
                worst = max(worst, est / bound)
            ok = ok and est <= bound
        rows.append(("lemma1", f"p={_fmt(p)}", 0, worst, 1.0, ok))
    return rows


def _suite_lemma4(spec, args):
    def one(p):
        report = verify.check_transform_norms(spec, p, args.m_max, seed=args.seed)
        out = []
        for row in report.rows:
            out.append(
                ("lemma4_T_scaled", f"p={_fmt(p)}", row.m, row.t_norm_scaled, float("nan"), True)
            )
            out.append(
                ("lemma4_Tt", f"p={_fmt(p)}", row.m, row.t_trans_norm, float("nan"), True)
            )
        flags = report.bounded
        out.append(("lemma4_bounded", f"p={_fmt(p)}", args.m_max,
                    float(all(flags.values())), 1.0, all(flags.values())))
        if p == 2.0:
            dev = max(abs(r.t_norm - 1.0) for r in report.rows)
            out.append(("lemma4_p2_unit", "p=2", args.m_max, dev, 1e-10, dev <= 1e-10))
        return out

    ps = [p for p in _p_values(args) if 1.0 / spec.alpha < p <= 2.0]
    return [row for rows in _map_ordered(one, ps) for row in rows]


def _suite_kron(spec, args):
    rng = np.random.default_rng(args.seed)
    rows = []
    for p, tol in ((1.0, 1e-12), (np.inf, 1e-12), (2.0, 1e-9)):
        worst = 0.0
        for _ in range(args.trials):
            a = BandMatrix.from_dense(rng.standard_normal((4, 4)))
            b = BandMatrix.from_dense(rng.standard_normal((4, 4)))
            lhs, rhs = verify.check_kron_identity(a, b, p)
            worst = max(worst, abs(lhs - rhs))
        label = "inf" if np.isinf(p) else _fmt(p)
        rows.append(("kron", f"p={label}", 0, worst, tol, worst <= tol))
    return rows


def _suite_riesz(spec, args):
    rows = []
    conds = []
    m_cap = min(args.m_max, 10)  # dense eigendecomposition beyond is too slow
    for m in range(spec.j0, m_cap + 1):
        cond = verify.check_riesz(spec, m)
        conds.append(cond)
        rows.append(("riesz", "", m, cond, float("nan"), True))
    ok = verify.running_max_stabilizes(conds)
    rows.append(("riesz_bounded", "", m_cap, float(ok), 1.0, ok))
    return rows


def _suite_embedding(spec, args):
    rng = np.random.default_rng(args.seed)
    q, s = args.q, args.s
    maxima_low, maxima_up = [], []
    rows = []
    m_cap = min(args.m_max, 8)  # dense random vectors beyond are too slow
    for m in range(4, m_cap + 1):
        size = spec.delta_size(m)
        low = up = 0.0
        for _ in range(args.trials):
            u = hyper_forward(spec, 2, rng.standard_normal((size, size)))
            lo, hi = verify.check_embedding_chain(spec, u, q, s)
            low = max(low, lo)
            up = max(up, hi)
        maxima_low.append(low)
        maxima_up.append(up)
        rows.append(("embedding_lower", f"q={_fmt(q)},s={_fmt(s)}", m, low, float("nan"), True))
        rows.append(("embedding_upper", f"q={_fmt(q)},s={_fmt(s)}", m, up, float("nan"), True))
    ok = verify.running_max_stabilizes(maxima_low, rel=0.25) and \
        verify.running_max_stabilizes(maxima_up, rel=0.25)
    rows.append(("embedding_stable", f"q={_fmt(q)},s={_fmt(s)}", m_cap,
                 float(ok), 1.0, ok))
    return rows


SUITES = {
    "biorth": _suite_biorth,
    "decay": _suite_decay,
    "lemma1": _suite_lemma1,
    "lemma4": _suite_lemma4,
    "kron": _suite_kron,
    "riesz": _suite_riesz,
    "embedding": _suite_embedding,
}


def cmd_verify(args) -> int:
    spec = _make_basis(args.basis)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise HyperwaveError(f"unknown suite {args.suite!r}; options: "
                                 + ", ".join(sorted(SUITES)) + ", all")
    all_rows = []
    for name in names:
        all_rows.extend(SUITES[name](spec, args))
    csv_rows = [
        f"{check},{param},{m},{_fmt(value)},{_fmt(bound)},{str(ok).lower()}"
        for check, param, m, value, bound, ok in all_rows
    ]
    _write_csv(args.out, "check,param,m,value,bound,pass", csv_rows)
    failures = [r for r in all_rows if not r[5]]
    print(f"checks: {len(all_rows)}  failures: {len(failures)}")
    for check, param, m, value, bound, _ in failures:
        print(f"FAIL {check} {param} m={m} value={_fmt(value)} bound={_fmt(bound)}")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Argument parsing (flat "key = value" config files mirror every flag; flags
# given on the command line override the config).
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", default=None, help="flat key = value config file")
    p.add_argument("--basis", default="haar", help="haar or maskfile=PATH")
    p.add_argument("--n", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--jmax", type=int, default=5)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--s", type=float, default=0.25)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--p", type=float, default=None,
                   help="single integrability exponent; overrides --p-grid")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperwave",
        description="Hyperbolic wavelet transforms, sequence norms, N-term "
        "approximation and verification suites on the unit cube.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="forward/inverse multiscale transform")
    _add_common(p)
    p.add_argument("--input", default=None, help="array or coefficient file")
    p.add_argument("--coeffs", default=None, help="coefficient file (inverse)")
    p.add_argument("--generate", default=None, choices=testfunctions.KINDS,
                   help="generate input data instead of reading a file")
    p.add_argument("--direction", default="forward", choices=("forward", "inverse"))
    p.add_argument("--system", default="hyper", choices=("hyper", "iso"))
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("nterm", help="best N-term error curve and fitted rate")
    _add_common(p)
    p.add_argument("--coeffs", required=True)
    p.add_argument("--nmin", type=int, default=16)
    p.add_argument("--nmax", type=int, default=4096)
    p.set_defaults(func=cmd_nterm)

    p = sub.add_parser("verify", help="numerical verification suites")
    _add_common(p)
    p.add_argument("--suite", default="all")
    p.add_argument("--m-max", dest="m_max", type=int, default=12,
                   help="finest level; the embedding and riesz suites cap "
                        "their own depth at 8 and 10 for tractability")
    p.add_argument("--p-grid", dest="p_grid", default="0.6,1,1.5,2")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="isotropic vs hyperbolic N-term curves")
    _add_common(p)
    p.add_argument("--kind", default="tensor_kink", choices=testfunctions.KINDS)
    p.add_argument("--nmin", type=int, default=16)
    p.add_argument("--nmax", type=int, default=4096)
    p.set_defaults(func=cmd_compare)

    return parser


def _load_config(path) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise HyperwaveError(f"malformed config line: {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    config = _load_config(path)
    if not argv:
        return
    sub_actions = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    if not sub_actions or argv[0] not in sub_actions[0].choices:
        return
    subparser = sub_actions[0].choices[argv[0]]
    defaults = {}
    for action in subparser._actions:
        if action.dest in config:
            raw = config[action.dest]
            defaults[action.dest] = action.type(raw) if action.type else raw
    subparser.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (HyperwaveError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
