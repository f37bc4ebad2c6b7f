"""Command-line interface.

Subcommands: transform, bench, encrypt, decrypt, sweep, filter-optimal,
filter-band, selftest.  Exit codes: 0 success, 2 bad arguments, 3 I/O
failure, 4 numeric failure (degenerate parameters etc.).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import apps
from .direct import nsfrft_direct, nsfrft_inverse_direct
from .errors import NsfrftError
from .fast import nsfrft_fast, nsfrft_fast_inverse
from .grid import ComplexGrid, add_awgn, mse, nmse, psnr, second_order_hermite, ssim
from .gridio import load_cgrid, load_png, save_cgrid, save_png, write_csv
from .params import ParamSet, params_from_cfrft, params_from_gt, params_from_sfrft, resolve_params

EXIT_BAD_ARGS = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


def _parse_params(args) -> ParamSet:
    given = [name for name in ("params", "sfrft", "gt", "cfrft")
             if getattr(args, name.replace("-", "_"), None) is not None]
    if len(given) != 1:
        raise UsageError("exactly one of --params/--sfrft/--gt/--cfrft is required")
    if args.params:
        descriptor = json.loads(Path(args.params).read_text())
        return resolve_params(descriptor)
    if args.sfrft:
        a1, a2 = (float(v) for v in args.sfrft.split(","))
        return params_from_sfrft(a1, a2)
    if args.gt is not None:
        return params_from_gt(float(args.gt))
    a, b = (float(v) for v in args.cfrft.split(","))
    return params_from_cfrft(a, b)


def _load_grids(path: str) -> list[ComplexGrid]:
    if path.endswith(".cgrid"):
        return [load_cgrid(path)]
    return load_png(path)


def _save_grids(path: str, grids: list[ComplexGrid]) -> None:
    if path.endswith(".cgrid"):
        if len(grids) != 1:
            raise UsageError("cannot write a multi-channel image to a .cgrid file")
        save_cgrid(path, grids[0])
    else:
        save_png(path, grids)


def _load_key(path: str, shape) -> apps.KeyMaterial:
    descriptor = json.loads(Path(path).read_text())
    p1 = resolve_params(descriptor["params1"])
    p2 = resolve_params(descriptor["params2"])
    return apps.KeyMaterial.generate(p1, p2, shape, int(descriptor.get("seed", 42)))


def _apply_transform(p, grid, algo, inverse):
    if algo == "direct":
        return nsfrft_inverse_direct(p, grid) if inverse else nsfrft_direct(p, grid)
    mapping = {"fast1": "I", "fast2": "II"}
    if inverse:
        return nsfrft_fast_inverse(p, grid, mapping[algo])
    return nsfrft_fast(p, grid, mapping[algo])


def cmd_transform(args) -> int:
    p = _parse_params(args)
    grids = _load_grids(getattr(args, "in"))
    t0 = time.time()
    out = [_apply_transform(p, g, args.algo, args.inverse) for g in grids]
    if args.verbose:
        print(f"transform: {time.time() - t0:.4f} s", file=sys.stderr)
    _save_grids(args.out, out)
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    algos = [a.strip() for a in args.algos.split(",")]
    p = _parse_params(args)
    rows = []
    for n in sizes:
        spacing = math.sqrt(2 * math.pi / n)
        sig = second_order_hermite((n, n), (spacing, spacing))
        reference = nsfrft_direct(p, sig)
        for algo in algos:
            t0 = time.time()
            out = _apply_transform(p, sig, algo, inverse=False)
            seconds = time.time() - t0
            rows.append((n, algo, f"{seconds:.6f}", f"{nmse(out, reference):.6e}"))
            if args.verbose:
                print(f"N={n} {algo}: {seconds:.4f} s", file=sys.stderr)
    write_csv(args.out, ["N", "algo", "seconds", "nmse_vs_direct"], rows)
    return 0


def cmd_encrypt(args) -> int:
    grids = _load_grids(getattr(args, "in"))
    if len(grids) != 1:
        raise UsageError("encryption expects a single-channel input")
    key = _load_key(args.key, grids[0].shape)
    _save_grids(args.out, [apps.drped_encrypt(grids[0], key)])
    return 0


def cmd_decrypt(args) -> int:
    grids = _load_grids(getattr(args, "in"))
    key = _load_key(args.key, grids[0].shape)
    out = apps.drped_decrypt(grids[0], key)
    if args.reference:
        ref = _load_grids(args.reference)[0]
        print(f"mse={mse(out, ref):.6e}")
    _save_grids(args.out, [out])
    return 0


def cmd_sweep(args) -> int:
    grids = _load_grids(getattr(args, "in"))
    key = _load_key(args.key, grids[0].shape)
    rows = apps.key_sensitivity_sweep(grids[0], key, args.delta_range, args.delta_step)
    write_csv(args.out, ["delta", "mse"], [(f"{d:.4f}", f"{m:.6e}") for d, m in rows])
    return 0


def cmd_filter_optimal(args) -> int:
    p = _parse_params(args)
    clean_grids = _load_grids(args.clean)
    if getattr(args, "in", None):
        noisy_grids = _load_grids(getattr(args, "in"))
    else:
        noisy_grids = [add_awgn(g, args.snr, args.seed) for g in clean_grids]
    out = []
    for noisy, clean in zip(noisy_grids, clean_grids):
        sigma2 = apps.noise_variance_for(clean, args.snr)
        filtered, err = apps.wiener_denoise(noisy, clean, sigma2, p)
        out.append(filtered)
        print(f"log10_mse={math.log10(err):.4f} psnr={psnr(filtered, clean):.4f} "
              f"ssim={ssim(filtered, clean):.4f}")
    _save_grids(args.out, out)
    return 0


def cmd_filter_band(args) -> int:
    p = _parse_params(args)
    grids = _load_grids(getattr(args, "in"))
    out = [apps.band_filter(g, p, args.kind, args.bandwidth) for g in grids]
    _save_grids(args.out, out)
    return 0


def cmd_selftest(args) -> int:
    import warnings

    from .analysis import impulse_report
    from .errors import ZeroTError
    from .fast import FourierStep, execute, grid_resolvable, invert_plan, plan_for
    from .grid import hermite_gaussian_2d, matched_chirp_for
    from .params import blocks_from_params, derive_coeffs, rotation4_from_params

    rng = np.random.default_rng(args.seed)
    n_specs = 50 if args.quick else 200
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}{(' ' + detail) if detail else ''}")
        failures += 0 if ok else 1

    def random_params(resolvable=False):
        while True:
            vec = rng.standard_normal(4)
            vec /= np.linalg.norm(vec)
            try:
                p = ParamSet(*vec, rng.uniform(0, 2 * math.pi))
            except ZeroTError:
                continue
            if resolvable and not grid_resolvable(blocks_from_params(p)):
                continue
            return p

    worst_rot = worst_det = worst_m = worst_plan = 0.0
    for _ in range(n_specs):
        p = random_params()
        rot = rotation4_from_params(p)
        worst_rot = max(worst_rot, float(np.max(np.abs(rot.T @ rot - np.eye(4)))))
        spec = blocks_from_params(p)
        worst_det = max(worst_det, abs(spec.t_value - p.t_value))
        co = derive_coeffs(p)
        worst_m = max(worst_m, abs(co.m1 * co.m4 - co.m2 * co.m3 - co.t))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = plan_for(spec, "II")
        worst_plan = max(worst_plan, float(np.max(np.abs(plan.symplectic() - spec.matrix4()))))
    check("parameter soundness (rotation, det B = T, m-identity)",
          max(worst_rot, worst_det, worst_m) < 1e-10,
          f"worst {max(worst_rot, worst_det, worst_m):.2e}")
    check("plan soundness", worst_plan < 1e-10, f"worst {worst_plan:.2e}")

    def random_chirp_only_plan():
        # exact unitarity/invertibility are chirp-only plan properties;
        # specs that fall back to the affine factorization are resampled
        while True:
            p = random_params()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                plan = plan_for(blocks_from_params(p), "II")
            if not any(isinstance(s, FourierStep) for s in plan.steps):
                return plan

    n = 64
    spacing = (math.sqrt(2 * math.pi / n),) * 2
    sig = hermite_gaussian_2d(1, 2, (n, n), spacing)
    worst_acc = worst_rt = worst_energy = 0.0
    for i in range(5 if args.quick else 10):
        # agreement with the exact sum is only meaningful for specs the
        # grid can resolve
        p = random_params(resolvable=True)
        reference = nsfrft_direct(p, sig)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fast = nsfrft_fast(p, sig, "II")
        worst_acc = max(worst_acc, nmse(fast, reference))
        plan = random_chirp_only_plan()
        fast = execute(plan, sig)
        worst_energy = max(worst_energy, abs(fast.energy / sig.energy - 1))
        back = execute(invert_plan(plan), fast)
        worst_rt = max(worst_rt, nmse(back, sig))
    check("oracle agreement at N=64", worst_acc < 1e-5, f"worst {worst_acc:.2e}")
    check("energy conservation", worst_energy < 1e-10, f"worst {worst_energy:.2e}")
    check("round trip", worst_rt < 1e-12, f"worst {worst_rt:.2e}")

    p = ParamSet(0.7548, 0.4147, -0.0442, -0.5063, math.pi / 3)
    img = ComplexGrid(rng.random((n, n)).astype(complex), *spacing)
    key = apps.KeyMaterial.generate(p, p, img.shape, seed=args.seed)
    dec = apps.drped_decrypt(apps.drped_encrypt(img, key), key)
    check("encryption round trip", mse(dec, img) < 1e-20, f"mse {mse(dec, img):.2e}")

    pc = ParamSet(0.5, 0.5, 0.5, 0.5, math.pi / 3)
    m = 128
    chirp_in = matched_chirp_for(pc, (m, m), (math.sqrt(2 * math.pi / m),) * 2)
    rep = impulse_report(pc, nsfrft_direct(pc, chirp_in))
    check("impulse localization",
          rep.peak_index == rep.predicted_index and rep.neighborhood_fraction > 0.5,
          f"3x3 fraction {rep.neighborhood_fraction:.3f}")

    if failures:
        print(f"FAILED: {failures} failing check(s)")
        return 1
    print("OK")
    return 0


def _add_common_flags(parser, suppress=False):
    # the same flags live on the root parser and on every subparser so
    # they may appear on either side of the subcommand; the subparser
    # copies use SUPPRESS so an unset flag never clobbers the root value
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--seed", type=int, help="RNG seed",
                        **(kw or {"default": 42}))
    parser.add_argument("--verbose", action="store_true",
                        help="timing log to stderr", **(kw or {"default": False}))
    parser.add_argument("--threads", type=int, help="cap BLAS/FFT worker threads",
                        **(kw or {"default": None}))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsfrft",
        description="2D nonseparable fractional Fourier transform toolkit")
    _add_common_flags(parser)
    common = argparse.ArgumentParser(add_help=False)
    _add_common_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    def add_param_flags(sp):
        sp.add_argument("--params", help="JSON parameter descriptor file")
        sp.add_argument("--sfrft", help="separable embedding: a1,a2")
        sp.add_argument("--gt", help="gyrator embedding: phi")
        sp.add_argument("--cfrft", help="coupled embedding: alpha,beta")

    sp = sub.add_parser("transform", help="apply a transform to a grid or image")
    add_param_flags(sp)
    sp.add_argument("--algo", choices=["direct", "fast1", "fast2"], default="fast2")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--inverse", action="store_true")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("bench", help="time each algorithm against the direct method")
    add_param_flags(sp)
    sp.add_argument("--sizes", default="64,128,200")
    sp.add_argument("--algos", default="direct,fast1,fast2")
    sp.add_argument("--out", default="bench.csv")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("encrypt", help="double-random-phase encrypt")
    sp.add_argument("--key", required=True)
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("decrypt", help="double-random-phase decrypt")
    sp.add_argument("--key", required=True)
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--reference", help="plaintext to report MSE against")
    sp.set_defaults(func=cmd_decrypt)

    sp = sub.add_parser("sweep", help="decryption MSE vs key-angle offset")
    sp.add_argument("--key", required=True)
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", default="sweep.csv")
    sp.add_argument("--delta-range", type=float, default=0.5)
    sp.add_argument("--delta-step", type=float, default=0.05)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("filter-optimal", help="Wiener filtering in a transform domain")
    add_param_flags(sp)
    sp.add_argument("--in", help="noisy input (omit to add noise to --clean)")
    sp.add_argument("--clean", required=True)
    sp.add_argument("--snr", type=float, default=0.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_filter_optimal)

    sp = sub.add_parser("filter-band", help="bandpass/bandstop a chirp component")
    add_param_flags(sp)
    sp.add_argument("--kind", choices=["pass", "stop"], required=True)
    sp.add_argument("--bandwidth", type=int, default=5)
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_filter_band)

    sp = sub.add_parser("selftest", help="run the invariant suite")
    sp.add_argument("--quick", action="store_true")
    sp.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        try:
            from threadpoolctl import threadpool_limits
            threadpool_limits(args.threads)
        except ImportError:
            pass
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except NsfrftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
