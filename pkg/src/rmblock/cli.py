"""Command line front end.

Exit codes: 0 success, 1 bad configuration, 2 numerical failure, 3 I/O failure.
Every CSV starts with ``#`` lines naming the version, the subcommand and the
resolved configuration.  Thread count and output paths are left out of the
echo because they do not change the data.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dyson, limits, plotting, saddle, sampler, specfun, susy
from .errors import ConfigError, IOFailure, RmblockError
from .model import classify_singularity, load_profile, spacing_scale, validate_profile
from .output import Outputs, csv_text, fmt, parse_grid

log = logging.getLogger("rmblock")

NOT_ECHOED = {"threads", "out", "plot", "dump_eigs", "verbose", "command", "action"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- argument types


def positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{s!r} must be positive")
    return v


def nonneg_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{s!r} must be nonnegative")
    return v


def positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a number") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"{s!r} must be positive and finite")
    return v


def nonneg_float(s):
    v = float(s) if _is_number(s) else None
    if v is None or not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"{s!r} must be a finite nonnegative number")
    return v


def seed_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def complex_value(s):
    try:
        v = complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a complex number like 0.5+0.3j") from None
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise argparse.ArgumentTypeError(f"{s!r} must be finite")
    return v


def complex_list(s):
    return [complex_value(t) for t in s.split(",") if t]


def int_list(s):
    return [positive_int(t) for t in s.split(",") if t]


def rational_list(s):
    try:
        return [Fraction(t) for t in s.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a list of rationals like 0,1/2,1/2") from None


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------- helpers


def resolve_threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("RMBLOCK_THREADS")
    if env is None or env == "":
        return None
    try:
        return positive_int(env)
    except argparse.ArgumentTypeError as e:
        raise ConfigError(f"RMBLOCK_THREADS: {e}") from None


def resolved_config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in NOT_ECHOED or k == "handler":
            continue
        if isinstance(v, complex):
            v = str(v)
        elif isinstance(v, list):
            v = [str(x) if isinstance(x, (complex, Fraction)) else x for x in v]
        out[k] = v
    return out


def base_meta(args, **extra) -> dict:
    meta = {"subcommand": args.command, "config": resolved_config(args)}
    meta.update(extra)
    return meta


def emit(outputs: Outputs, args, text: str, png: bytes | None = None):
    if args.out is None:
        if args.plot:
            raise ConfigError("--plot needs --out")
        sys.stdout.write(text)
        return
    outputs.add(args.out, text)
    if args.plot and png is not None:
        outputs.add(plotting.png_path(args.out), png)


def sibling(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix + p.suffix)


# ---------------------------------------------------------------- subcommands


def cmd_sample(args, outputs):
    if args.out is None:
        raise ConfigError("sample needs --out (it writes a histogram and a curve file)")
    p = load_profile(args.profile)
    micro = args.mode == "micro"
    if micro:
        cls = classify_singularity(p)
        kind = limits.LimitKind(args.kind) if args.kind else limits.kind_for_profile(p)
        eta = spacing_scale(cls, p, args.n)
        edges = np.linspace(-args.xi_max, args.xi_max, args.bins + 1)
    else:
        eta = None
        edges = np.linspace(-args.e_max, args.e_max, args.bins + 1)
    eigs = sampler.sample_eigenvalues(p, args.n, args.trials, args.seed, resolve_threads(args.threads))
    h = sampler.histogram_from_eigs(eigs, edges, p, args.n, eta)
    if h.empty_bins:
        log.warning("histogram has empty bins")
    xs = h.centers
    rows = list(zip(edges[:-1], edges[1:], h.counts, h.density))
    if micro:
        meta = base_meta(args, K=p.K, N=args.n, trials=args.trials, seed=args.seed, eta_N=eta,
                         ell=cls.ell, theta=cls.theta, limit_kind=str(kind) if kind else "none")
        hist = csv_text(["xi_lo", "xi_hi", "count", "density"], rows, meta)
        curve = np.array([limits.limit_density(kind, x) if kind else math.nan for x in xs])
        curve_csv = csv_text(["xi", "density"], zip(xs, curve), meta)
        labels = ("xi", "K N eta_N rho_N(eta_N xi)", "limit")
    else:
        meta = base_meta(args, K=p.K, N=args.n, trials=args.trials, seed=args.seed)
        hist = csv_text(["E_lo", "E_hi", "count", "density"], rows, meta)
        curve = np.array([dyson.density_infinity(p, x, args.eps) for x in xs])
        curve_csv = csv_text(["E", "eps", "rho"], ((x, args.eps, r) for x, r in zip(xs, curve)), meta)
        labels = ("E", "rho_N(E)", "Dyson")
    png = None
    if args.plot:
        png = plotting.render(xs, {labels[2]: curve}, labels[0], labels[1],
                              title=f"K={p.K}, N={args.n}, {args.trials} trials",
                              steps=(edges, h.density))
    emit(outputs, args, hist, png)
    outputs.add(sibling(args.out, "_curve"), curve_csv)
    if args.dump_eigs:
        outputs.add(args.dump_eigs, "".join("%.16e\n" % v for v in eigs.ravel()))


def cmd_dyson(args, outputs):
    p = load_profile(args.profile)
    E = parse_grid(args.E_grid)
    rho = [dyson.density_infinity(p, e, args.eps) for e in E]
    footer = None
    if args.fit:
        sig, th = dyson.singularity_fit(p, E)
        footer = {"sigma_hat": sig, "theta_hat": th}
    text = csv_text(["E", "eps", "rho"], ((e, args.eps, r) for e, r in zip(E, rho)),
                    base_meta(args, K=p.K), footer)
    png = plotting.render(E, {"rho_inf": rho}, "E", "rho",
                          logx=E.min() > 0, logy=E.min() > 0) if args.plot else None
    emit(outputs, args, text, png)


def cmd_susy(args, outputs):
    p = load_profile(args.profile)
    z = args.z
    q = susy.default_quadrature(p, args.n, z, args.radial_map)
    if args.radial_nodes or args.angular_nodes:
        from dataclasses import replace

        q = replace(q, radial_nodes=args.radial_nodes or q.radial_nodes,
                    angular_nodes=args.angular_nodes or q.angular_nodes)
    val, err = susy.finite_n_resolvent_checked(p, args.n, z, q)
    text = csv_text(["K", "N", "Re_z", "Im_z", "Re_val", "Im_val", "est_err"],
                    [(p.K, args.n, z.real, z.imag, val.real, val.imag, err)], base_meta(args))
    if args.plot:
        raise ConfigError("susy writes a single row; --plot is not available")
    emit(outputs, args, text)


def _kind(args):
    return limits.LimitKind(args.kind, args.sigma)


def cmd_limit(args, outputs):
    kind = _kind(args)
    xi = parse_grid(args.xi_grid)
    dens = [limits.limit_density(kind, x) for x in xi]
    meta = base_meta(args, kind=str(kind), conversion=limits.conversion_factor(kind))
    text = csv_text(["xi", "density"], zip(xi, dens), meta)
    png = plotting.render(xi, {str(kind): dens}, "xi", "density", logx=xi.min() > 0,
                          logy=xi.min() > 0 and min(dens) > 0) if args.plot else None
    emit(outputs, args, text, png)


def cmd_compare(args, outputs):
    threads = resolve_threads(args.threads)
    if args.profile is None and args.kind is None:
        raise ConfigError("compare needs --profile or a weak --kind")
    fixed = load_profile(args.profile) if args.profile else None
    if fixed is not None:
        kind = limits.LimitKind(args.kind, args.sigma) if args.kind else limits.kind_for_profile(fixed)
    else:
        kind = _kind(args)
        if not kind.name.startswith("weak"):
            raise ConfigError("without --profile the kind must be weak-k2 or weak-k3")
    if (args.z is None) == (args.zeta is None):
        raise ConfigError("give exactly one of --z (spectral units) or --zeta (microscopic units)")
    header = ["N", "Re_z", "Im_z", "Re_zeta", "Im_zeta",
              "Re_mc", "Im_mc", "mc_stderr", "Re_susy", "Im_susy", "susy_err",
              "Re_limit", "Im_limit", "mc_susy_dev", "susy_limit_dev", "pass"]
    rows = []
    for N in args.n:
        p = fixed if fixed is not None else validate_profile(limits.weak_profile(kind, N))
        tau = limits.resolvent_scale(kind, p, N) if kind else 1.0
        pts = [(z, z / tau) for z in args.z] if args.z else [(tau * w, w) for w in args.zeta]
        eigs = sampler.sample_eigenvalues(p, N, args.trials, args.seed, threads) if args.trials else None
        KN = p.K * N
        for z, w in pts:
            # everything on the scale tau E Tr (H - tau zeta)^-1
            if eigs is not None:
                est = sampler.estimate(sampler.resolvent_samples(eigs, z))
                mc, se = tau * KN * est.mean, tau * KN * est.stderr
            else:
                mc, se = complex(math.nan, math.nan), math.nan
            sv, serr = susy.finite_n_resolvent_checked(p, N, z)
            sv, serr = tau * sv, tau * serr
            lim = limits.limit_resolvent(kind, w) if kind else complex(math.nan, math.nan)
            dev = abs(sv - mc)
            ok = "pass" if dev <= 3 * se else ("n/a" if math.isnan(dev) else "fail")
            rows.append((N, z.real, z.imag, w.real, w.imag, mc.real, mc.imag, se,
                         sv.real, sv.imag, serr, lim.real, lim.imag, dev, abs(sv - lim), ok))
    meta = base_meta(args, limit_kind=str(kind) if kind else "none",
                     scale="tau_N E Tr (H - tau_N zeta)^-1")
    text = csv_text(header, rows, meta)
    png = None
    if args.plot:
        Ns = [r[0] for r in rows]
        png = plotting.render(Ns, {"|susy - limit|": [r[14] for r in rows],
                                   "|susy - mc|": [r[13] for r in rows]},
                              "N", "deviation", logx=True, logy=True)
    emit(outputs, args, text, png)


def cmd_saddle_check(args, outputs):
    case = saddle.synthetic_case(args.case)
    rep = saddle.verify_expansion(case.problem, case.evaluate, args.n)
    text = csv_text(["N", "rel_err"], rep.rows(), base_meta(args), {"decay_exponent": rep.exponent})
    png = plotting.render(rep.N, {args.case: np.maximum(rep.rel_err, 1e-17)}, "N",
                          "relative error", logx=True, logy=True) if args.plot else None
    emit(outputs, args, text, png)


SPECFUN = ("bessel-i", "bessel-k", "bessel-j", "meijer-g", "hyper-0f2")


def cmd_specfun(args, outputs):
    x = args.x
    f = args.func
    if f == "bessel-i":
        v = specfun.bessel_i(args.order, x)
    elif f == "bessel-k":
        v = specfun.bessel_k(args.order, x, allow_left=True)
    elif f == "bessel-j":
        if x.imag != 0:
            raise ConfigError("bessel-j takes a real argument")
        v = complex(specfun.bessel_j(args.order, x.real))
    elif f == "meijer-g":
        if args.params is None or len(args.params) != 3:
            raise ConfigError("meijer-g needs --params b1,b2,b3")
        v = specfun.meijer_g_303(args.params, x, args.side)
    else:
        if args.params is None or len(args.params) != 2:
            raise ConfigError("hyper-0f2 needs --params b1,b2")
        v = specfun.hyper_0f2(args.params[0], args.params[1], x)
    sys.stdout.write(f"{fmt(v.real)},{fmt(v.imag)}\n")


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    ap = _Parser(prog="rmblock", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"rmblock {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, plot=True):
        sp.add_argument("--out", "-o", help="output CSV (default: standard output)")
        sp.add_argument("--threads", type=positive_int,
                        help="worker threads (default: $RMBLOCK_THREADS or all cores)")
        if plot:
            sp.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")
        else:
            sp.set_defaults(plot=False)

    s = sub.add_parser("sample", help="Monte Carlo eigenvalue histograms")
    s.add_argument("--profile", required=True)
    s.add_argument("--n", type=positive_int, required=True)
    s.add_argument("--trials", type=positive_int, required=True)
    s.add_argument("--seed", type=seed_int, default=0)
    s.add_argument("--mode", choices=("macro", "micro"), default="micro")
    s.add_argument("--xi-max", type=positive_float, default=6.0)
    s.add_argument("--e-max", type=positive_float, default=3.0)
    s.add_argument("--bins", type=positive_int, default=48)
    s.add_argument("--eps", type=positive_float, default=1e-3,
                   help="imaginary offset of the Dyson overlay curve (macro mode)")
    s.add_argument("--kind", choices=sorted(limits.KINDS), help="override the overlay limit")
    s.add_argument("--dump-eigs", help="also write all eigenvalues, one per line")
    common(s)
    s.set_defaults(handler=cmd_sample)

    s = sub.add_parser("dyson", help="limiting density from the vector Dyson equation")
    s.add_argument("--profile", required=True)
    s.add_argument("--E-grid", dest="E_grid", required=True, help="log:a:b:n or lin:a:b:n")
    s.add_argument("--eps", type=positive_float, default=1e-9)
    s.add_argument("--fit", action="store_true", help="append the fitted exponent and prefactor")
    common(s)
    s.set_defaults(handler=cmd_dyson)

    s = sub.add_parser("susy", help="exact finite-N expected resolvent trace")
    s.add_argument("--profile", required=True)
    s.add_argument("--n", type=positive_int, required=True)
    s.add_argument("--z", type=complex_value, required=True)
    s.add_argument("--radial-nodes", type=positive_int)
    s.add_argument("--angular-nodes", type=positive_int)
    s.add_argument("--radial-map", choices=susy.RADIAL_MAPS, default="laguerre")
    common(s, plot=False)
    s.set_defaults(handler=cmd_susy)

    s = sub.add_parser("limit", help="microscopic limit density curve")
    s.add_argument("--kind", choices=sorted(limits.KINDS), required=True)
    s.add_argument("--sigma", type=nonneg_float, default=0.0)
    s.add_argument("--xi-grid", required=True, help="log:a:b:n or lin:a:b:n")
    common(s)
    s.set_defaults(handler=cmd_limit)

    s = sub.add_parser("compare", help="Monte Carlo vs exact quadrature vs limit")
    s.add_argument("--profile")
    s.add_argument("--kind", choices=sorted(limits.KINDS))
    s.add_argument("--sigma", type=nonneg_float, default=0.0)
    s.add_argument("--n", type=int_list, required=True, help="comma separated sizes")
    s.add_argument("--z", type=complex_list, help="comma separated spectral points")
    s.add_argument("--zeta", type=complex_list, help="comma separated microscopic points")
    s.add_argument("--trials", type=nonneg_int, default=10000, help="0 skips Monte Carlo")
    s.add_argument("--seed", type=seed_int, default=0)
    common(s)
    s.set_defaults(handler=cmd_compare)

    s = sub.add_parser("saddle-check", help="error decay of the saddle-point leading term")
    s.add_argument("--case", choices=sorted(saddle.CASES), required=True)
    s.add_argument("--n", type=int_list, default=[50, 100, 200, 400])
    common(s)
    s.set_defaults(handler=cmd_saddle_check)

    s = sub.add_parser("specfun", help="special function debugging")
    ssub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = ssub.add_parser("eval", help="print Re,Im of one value to 17 digits")
    e.add_argument("func", choices=SPECFUN)
    e.add_argument("--x", type=complex_value, required=True)
    e.add_argument("--order", type=int, default=0)
    e.add_argument("--params", type=rational_list)
    e.add_argument("--side", type=int, choices=(-1, 0, 1), default=0)
    e.set_defaults(handler=cmd_specfun, out=None, plot=False, threads=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    outputs = Outputs()
    try:
        sampler.set_threads(resolve_threads(args.threads))
        args.handler(args, outputs)
        outputs.commit()
    except RmblockError as e:
        print(f"rmblock: error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"rmblock: error: {e}", file=sys.stderr)
        return IOFailure.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
