"""Command-line interface wiring the pipeline end to end.

Subcommands: configure (prototype image -> filter config file), segment,
evaluate, tune, sensitivity, and roc. Exit codes: 0 on success, 1 for
usage errors (bad flags or flag values), 2 for data errors (missing or
inconsistent files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from bcosfire.filters import (
    analytic_asymmetric,
    analytic_symmetric,
    combined_response,
    configure_from_prototype,
    load_config,
    make_bank,
    save_config,
)
from bcosfire.imgio import load_gray, load_image, load_mask, load_response, save_binary, save_gray_u8
from bcosfire.imops import as_image
from bcosfire.manifest import Manifest, ManifestEntry, load_manifest
from bcosfire.metrics import auc, basic_metrics, confusion, format_roc_csv, mcc, roc
from bcosfire.preprocess import extract_green, preprocess_image
from bcosfire.tuning import (
    SearchSpace,
    format_sensitivity_table,
    format_tuning_result,
    grid_search,
    sensitivity_experiment,
    split_dataset,
)

# documented defaults suited to 1024x1024 fundus-style images
DEFAULT_SYM_PARAMS = (4.8, 20.0, 3.0, 0.3)
DEFAULT_ASYM_PARAMS = (4.4, 36.0, 1.0, 0.1)
DEFAULT_THRESHOLD = 35


class DataError(Exception):
    """Missing or inconsistent input data; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors by default; the CLI
    # contract reserves 2 for data errors and 1 for usage
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str):
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _params4(text: str):
    values = _float_list(text)
    if len(values) != 4:
        raise argparse.ArgumentTypeError(
            f"expected sigma,rho_max,sigma0,alpha (4 numbers), got {len(values)}")
    return values


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0.0 <= value <= 255.0:
        raise argparse.ArgumentTypeError(f"threshold must be in [0, 255], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _add_preprocess_args(p):
    p.add_argument("--no-preprocess", action="store_true",
                   help="treat inputs as already contrast-enhanced grayscale")
    p.add_argument("--smooth-iters", type=int, default=10, metavar="N",
                   help="field-of-view border smoothing iterations (default 10)")
    p.add_argument("--clahe-tiles", type=_positive_int, default=8, metavar="N",
                   help="CLAHE tile grid size per axis (default 8)")
    p.add_argument("--clahe-clip", type=float, default=0.01, metavar="C",
                   help="CLAHE clip limit in (0, 1] (default 0.01)")


def _add_common_args(p):
    p.add_argument("--threads", type=_positive_int, default=1, metavar="N",
                   help="worker threads for filter evaluation (default 1)")
    p.add_argument("--od-mode", choices=("exclude", "negative"), default="exclude",
                   help="optic-disc mask handling: drop those pixels from masks entirely, "
                        "or keep them and force them to non-vessel (default exclude)")


def _add_filter_args(p, asym: bool = True):
    p.add_argument("--sym-config", metavar="FILE",
                   help="symmetric filter config file (overrides --sym-params)")
    p.add_argument("--sym-params", type=_params4, default=DEFAULT_SYM_PARAMS,
                   metavar="S,R,S0,A",
                   help="symmetric sigma,rho_max,sigma0,alpha "
                        f"(default {','.join(str(v) for v in DEFAULT_SYM_PARAMS)})")
    if asym:
        p.add_argument("--asym-config", metavar="FILE",
                       help="asymmetric filter config file (overrides --asym-params)")
        p.add_argument("--asym-params", type=_params4, default=DEFAULT_ASYM_PARAMS,
                       metavar="S,R,S0,A",
                       help="asymmetric sigma,rho_max,sigma0,alpha "
                            f"(default {','.join(str(v) for v in DEFAULT_ASYM_PARAMS)})")
    p.add_argument("--rho-step", type=float, default=2.0, metavar="STEP",
                   help="circle radius spacing for filters built from parameters (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bcosfire",
                     description="Segment elongated structures with trainable bar-selective filters.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("configure",
                       help="build a filter config from a prototype image")
    p.add_argument("--prototype", required=True, metavar="IMAGE")
    p.add_argument("--center", nargs=2, type=float, required=True, metavar=("X", "Y"))
    p.add_argument("--radii", type=_float_list, required=True, metavar="R0,R1,...",
                   help="circle radii in pixels; must include 0")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--peak-fraction", type=float, default=0.2)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--steps", type=_positive_int, default=360,
                   help="angular samples per circle (default 360)")
    p.add_argument("--merge-window", type=float, default=10.0, metavar="DEG",
                   help="merge maxima closer than this many degrees (default 10)")
    p.add_argument("-o", "--output", required=True, metavar="FILE")
    p.set_defaults(func=cmd_configure)

    p = sub.add_parser("segment", help="segment images and write response/mask PNGs")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", metavar="FILE")
    src.add_argument("--image", metavar="FILE")
    p.add_argument("--fov", metavar="FILE", help="field-of-view mask for --image")
    _add_filter_args(p)
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD, metavar="T",
                   help=f"segmentation threshold on the 0-255 scale (default {DEFAULT_THRESHOLD})")
    _add_preprocess_args(p)
    _add_common_args(p)
    p.add_argument("--out-dir", default=".", metavar="DIR")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("evaluate", help="score segmentations against ground truth")
    p.add_argument("--manifest", required=True, metavar="FILE")
    p.add_argument("--seg-dir", required=True, metavar="DIR")
    p.add_argument("--response-dir", metavar="DIR",
                   help="directory of response maps for AUC (default: --seg-dir)")
    p.add_argument("-o", "--output", default="metrics.csv", metavar="FILE")
    _add_common_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("tune", help="grid-search filter parameters on a dataset")
    p.add_argument("--manifest", required=True, metavar="FILE")
    p.add_argument("--space", required=True, metavar="FILE",
                   help="JSON search space: sigma, rho_max, sigma0, alpha lists "
                        "(optional rho_step and asymmetric overrides)")
    p.add_argument("--seed", type=int, default=0, help="train/validation shuffle seed (default 0)")
    _add_preprocess_args(p)
    _add_common_args(p)
    p.add_argument("--out-dir", default=".", metavar="DIR")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("sensitivity",
                       help="t-test the MCC impact of perturbing one symmetric-filter parameter")
    p.add_argument("--manifest", required=True, metavar="FILE")
    _add_filter_args(p, asym=False)
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD, metavar="T")
    p.add_argument("--param", required=True, choices=("sigma", "sigma0", "alpha"))
    p.add_argument("--offsets", type=_float_list,
                   default=(-0.5, -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4, 0.5),
                   metavar="D0,D1,...", help="parameter offsets (default -0.5..0.5 in 0.1 steps)")
    _add_preprocess_args(p)
    _add_common_args(p)
    p.add_argument("-o", "--output", default="sensitivity.csv", metavar="FILE")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("roc", help="sweep thresholds over saved responses")
    p.add_argument("--manifest", required=True, metavar="FILE")
    p.add_argument("--response-dir", required=True, metavar="DIR")
    p.add_argument("-o", "--output", default="roc.csv", metavar="FILE")
    p.add_argument("--svg", metavar="FILE", help="also write an SVG plot")
    p.add_argument("--mark-threshold", type=_threshold, metavar="T",
                   help="mark this threshold's operating point on the SVG")
    _add_common_args(p)
    p.set_defaults(func=cmd_roc)

    return parser


# ---------------------------------------------------------------------------
# shared loading helpers

def _load_manifest(path) -> Manifest:
    try:
        return load_manifest(path)
    except (FileNotFoundError, ValueError) as exc:
        raise DataError(str(exc)) from None


def _load_entry(entry: ManifestEntry, need_gt: bool):
    image = load_image(entry.image)
    shape = image.shape[:2]
    fov = load_mask(entry.fov) if entry.fov is not None else np.ones(shape, dtype=bool)
    od = load_mask(entry.od) if entry.od is not None else None
    gt = load_mask(entry.gt) if entry.gt is not None else None
    if need_gt and gt is None:
        raise DataError(f"entry {entry.name}: no ground-truth path in the manifest")
    for name, arr in (("fov mask", fov), ("od mask", od), ("ground truth", gt)):
        if arr is not None and arr.shape != shape:
            raise DataError(f"entry {entry.name}: {name} shape {arr.shape} "
                            f"does not match image shape {shape}")
    return image, gt, fov, od


def _eval_mask(fov, od, od_mode):
    if od is not None and od_mode == "exclude":
        return fov & ~od
    return fov


def _preprocess(image, fov, args):
    if args.no_preprocess:
        return extract_green(image) if image.ndim == 3 else as_image(image)
    return preprocess_image(image, fov, smoothing_iterations=args.smooth_iters,
                            tiles_x=args.clahe_tiles, tiles_y=args.clahe_tiles,
                            clip_limit=args.clahe_clip)


def _prepared_entries(man: Manifest, args, need_gt: bool):
    """Load, check, and preprocess every manifest entry.

    Yields (entry, preprocessed image, gt, evaluation mask, od) with the
    optic-disc handling from --od-mode already applied to the mask.
    """
    out = []
    for entry in man.entries:
        image, gt, fov, od = _load_entry(entry, need_gt)
        pre = _preprocess(image, fov, args)
        out.append((entry, pre, gt, _eval_mask(fov, od, args.od_mode), od))
    return out


def _banks_from_args(args):
    if args.sym_config:
        sym = load_config(args.sym_config)
    else:
        sym = analytic_symmetric(*args.sym_params, args.rho_step)
    if args.asym_config:
        asym = load_config(args.asym_config)
    else:
        asym = analytic_asymmetric(*args.asym_params, args.rho_step)
    return make_bank(sym), make_bank(asym)


# ---------------------------------------------------------------------------
# subcommands

def cmd_configure(args) -> int:
    prototype = load_gray(args.prototype)
    config = configure_from_prototype(
        prototype, tuple(args.center), args.radii, args.sigma, args.peak_fraction,
        sigma0=args.sigma0, alpha=args.alpha, angular_steps=args.steps,
        merge_window_deg=args.merge_window)
    save_config(config, args.output)
    print(f"configured {config.kind} filter with {len(config.points)} points -> {args.output}")
    return 0


def cmd_segment(args) -> int:
    sym_bank, asym_bank = _banks_from_args(args)
    out_dir = Path(args.out_dir)

    if args.image:
        image = load_image(args.image)
        shape = image.shape[:2]
        fov = load_mask(args.fov) if args.fov else np.ones(shape, dtype=bool)
        if fov.shape != shape:
            raise DataError(f"fov mask shape {fov.shape} does not match image shape {shape}")
        jobs = [(Path(args.image).stem, image, fov, None)]
    else:
        man = _load_manifest(args.manifest)
        jobs = []
        for entry in man.entries:
            image, _, fov, od = _load_entry(entry, need_gt=False)
            jobs.append((entry.name, image, fov, od))

    out_dir.mkdir(parents=True, exist_ok=True)
    for name, image, fov, od in jobs:
        pre = _preprocess(image, fov, args)
        mask = _eval_mask(fov, od, args.od_mode)
        response = combined_response(pre, sym_bank, asym_bank, mask, threads=args.threads)
        seg = (response > args.threshold) & mask
        if od is not None and args.od_mode == "negative":
            seg &= ~od
        save_gray_u8(out_dir / f"{name}_response.png", response)
        save_binary(out_dir / f"{name}_seg.png", seg)
        print(f"{name}: {int(seg.sum())} foreground pixels")
    return 0


def cmd_evaluate(args) -> int:
    man = _load_manifest(args.manifest)
    seg_dir = Path(args.seg_dir)
    resp_dir = Path(args.response_dir) if args.response_dir else seg_dir
    missing = []
    for entry in man.entries:
        for p in (seg_dir / f"{entry.name}_seg.png", resp_dir / f"{entry.name}_response.png"):
            if not p.is_file():
                missing.append(str(p))
    if missing:
        raise DataError("missing files:\n  " + "\n  ".join(missing))

    rows = []
    sums = np.zeros(5)
    for entry in man.entries:
        _, gt, fov, od = _load_entry(entry, need_gt=True)
        mask = _eval_mask(fov, od, args.od_mode)
        seg = load_mask(seg_dir / f"{entry.name}_seg.png")
        response = load_response(resp_dir / f"{entry.name}_response.png")
        cm = confusion(seg, gt, mask)
        m = basic_metrics(cm)
        values = (auc(roc([response], [gt], [mask])), mcc(cm),
                  m["accuracy"], m["sensitivity"], m["specificity"])
        sums += values
        rows.append((entry.name,) + values)

    means = sums / len(man.entries)
    lines = ["name,auc,mcc,accuracy,sensitivity,specificity"]
    for name, *values in rows:
        lines.append(name + "," + ",".join(f"{v:.6f}" for v in values))
    mean_line = "mean," + ",".join(f"{v:.6f}" for v in means)
    lines.append(mean_line)
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="ascii")
    print(lines[0])
    print(mean_line)
    return 0


def _load_space(path):
    import json

    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"search space file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON: {exc}") from None
    required = {"sigma", "rho_max", "sigma0", "alpha"}
    if not isinstance(doc, dict) or not required <= set(doc):
        raise DataError(f"{path}: search space needs lists for {sorted(required)}")
    rho_step = float(doc.get("rho_step", 2.0))
    sym = SearchSpace(doc["sigma"], doc["rho_max"], doc["sigma0"], doc["alpha"], rho_step)
    overrides = doc.get("asymmetric") or {}
    if not isinstance(overrides, dict) or not set(overrides) <= required:
        raise DataError(f"{path}: asymmetric overrides may only hold {sorted(required)}")
    return sym, overrides, rho_step


def _asym_space(sym_result, sym_space, overrides, rho_step):
    # the asymmetric DoG scale is searched strictly below the chosen
    # symmetric one unless the space file says otherwise
    sigma_s = sym_result.params[0]
    sigmas = overrides.get("sigma") or [
        round(sigma_s - 0.1 * k, 6) for k in range(1, 7) if sigma_s - 0.1 * k > 0.0
    ]
    if not sigmas:
        raise DataError(f"no positive asymmetric sigma below the symmetric optimum {sigma_s}")
    return SearchSpace(
        sigmas,
        overrides.get("rho_max", sym_space.rho_max),
        overrides.get("sigma0", sym_space.sigma0),
        overrides.get("alpha", sym_space.alpha),
        rho_step,
    )


def cmd_tune(args) -> int:
    man = _load_manifest(args.manifest)
    sym_space, overrides, rho_step = _load_space(args.space)
    prepared = _prepared_entries(man, args, need_gt=True)
    try:
        train, validation = split_dataset(prepared, args.seed)
    except ValueError as exc:
        raise DataError(str(exc)) from None

    def columns(items):
        return ([p for _, p, _, _, _ in items], [g for _, _, g, _, _ in items],
                [m for _, _, _, m, _ in items])

    train_images, train_gts, train_masks = columns(train)
    sym_result = grid_search(train_images, train_gts, train_masks, sym_space,
                             "symmetric", threads=args.threads)
    sym_config = sym_result.config(rho_step)
    asym_space = _asym_space(sym_result, sym_space, overrides, rho_step)
    asym_result = grid_search(train_images, train_gts, train_masks, asym_space,
                              "asymmetric", fixed_other=sym_config, threads=args.threads)
    asym_config = asym_result.config(rho_step)

    sym_bank, asym_bank = make_bank(sym_config), make_bank(asym_config)
    threshold = asym_result.threshold
    val_images, val_gts, val_masks = columns(validation)
    val_mccs = []
    for image, gt, mask in zip(val_images, val_gts, val_masks):
        response = combined_response(image, sym_bank, asym_bank, mask, threads=args.threads)
        val_mccs.append(mcc(confusion((response > threshold) & mask, gt, mask)))
    val_mean = sum(val_mccs) / len(val_mccs)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_config(sym_config, out_dir / "symmetric_filter.txt")
    save_config(asym_config, out_dir / "asymmetric_filter.txt")
    report = (
        "[symmetric]\n" + format_tuning_result(sym_result)
        + "\n[asymmetric]\n" + format_tuning_result(asym_result)
        + f"\n[validation]\nmean_mcc {val_mean:.6f}\n"
    )
    (out_dir / "tuning.txt").write_text(report, encoding="ascii")
    (out_dir / "roc.csv").write_text(format_roc_csv(asym_result.roc), encoding="ascii")
    (out_dir / "roc.svg").write_text(_roc_svg(asym_result.roc, threshold), encoding="ascii")
    print(f"symmetric  sigma={sym_result.params[0]:g} rho_max={sym_result.params[1]:g} "
          f"sigma0={sym_result.params[2]:g} alpha={sym_result.params[3]:g}")
    print(f"asymmetric sigma={asym_result.params[0]:g} rho_max={asym_result.params[1]:g} "
          f"sigma0={asym_result.params[2]:g} alpha={asym_result.params[3]:g}")
    print(f"threshold {threshold}  train mean MCC {asym_result.mean_mcc:.6f}  "
          f"validation mean MCC {val_mean:.6f}")
    return 0


def cmd_sensitivity(args) -> int:
    man = _load_manifest(args.manifest)
    prepared = _prepared_entries(man, args, need_gt=True)
    images = [p for _, p, _, _, _ in prepared]
    gts = [g for _, _, g, _, _ in prepared]
    masks = [m for _, _, _, m, _ in prepared]
    if args.sym_config:
        cfg = load_config(args.sym_config)
        params = (cfg.points[0].sigma, cfg.rho_max, cfg.sigma0, cfg.alpha)
    else:
        params = args.sym_params
    rows = sensitivity_experiment(images, gts, masks, params, args.threshold,
                                  args.offsets, args.param,
                                  rho_step=args.rho_step, threads=args.threads)
    text = format_sensitivity_table(rows)
    Path(args.output).write_text(text, encoding="ascii")
    print(text, end="")
    return 0


def cmd_roc(args) -> int:
    man = _load_manifest(args.manifest)
    resp_dir = Path(args.response_dir)
    missing = [str(resp_dir / f"{e.name}_response.png")
               for e in man.entries if not (resp_dir / f"{e.name}_response.png").is_file()]
    if missing:
        raise DataError("missing files:\n  " + "\n  ".join(missing))
    responses, gts, masks = [], [], []
    for entry in man.entries:
        _, gt, fov, od = _load_entry(entry, need_gt=True)
        responses.append(load_response(resp_dir / f"{entry.name}_response.png"))
        gts.append(gt)
        masks.append(_eval_mask(fov, od, args.od_mode))
    curve = roc(responses, gts, masks)
    Path(args.output).write_text(format_roc_csv(curve), encoding="ascii")
    if args.svg:
        Path(args.svg).write_text(_roc_svg(curve, args.mark_threshold), encoding="ascii")
    print(f"auc {auc(curve):.6f}")
    return 0


# ---------------------------------------------------------------------------
# SVG plotting (hand-rolled so output bytes are stable across runs)

_SVG_L, _SVG_R, _SVG_T, _SVG_B = 70.0, 620.0, 20.0, 420.0


def _svg_x(f: float) -> float:
    return _SVG_L + f * (_SVG_R - _SVG_L)


def _svg_y(t: float) -> float:
    return _SVG_B - t * (_SVG_B - _SVG_T)


def _roc_svg(curve, mark_threshold=None) -> str:
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="640" height="480" viewBox="0 0 640 480">',
        '<rect width="640" height="480" fill="white"/>',
    ]
    for k in range(6):
        v = k / 5.0
        x, y = _svg_x(v), _svg_y(v)
        parts.append(f'<line x1="{x:.2f}" y1="{_SVG_T:.2f}" x2="{x:.2f}" y2="{_SVG_B:.2f}" '
                     'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<line x1="{_SVG_L:.2f}" y1="{y:.2f}" x2="{_SVG_R:.2f}" y2="{y:.2f}" '
                     'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{x:.2f}" y="{_SVG_B + 18.0:.2f}" font-size="12" '
                     f'text-anchor="middle" font-family="sans-serif">{v:.1f}</text>')
        parts.append(f'<text x="{_SVG_L - 8.0:.2f}" y="{y + 4.0:.2f}" font-size="12" '
                     f'text-anchor="end" font-family="sans-serif">{v:.1f}</text>')
    parts.append(f'<line x1="{_svg_x(0.0):.2f}" y1="{_svg_y(0.0):.2f}" x2="{_svg_x(1.0):.2f}" '
                 f'y2="{_svg_y(1.0):.2f}" stroke="#bbbbbb" stroke-width="1" stroke-dasharray="6,4"/>')
    parts.append(f'<rect x="{_SVG_L:.2f}" y="{_SVG_T:.2f}" width="{_SVG_R - _SVG_L:.2f}" '
                 f'height="{_SVG_B - _SVG_T:.2f}" fill="none" stroke="black" stroke-width="1"/>')
    points = " ".join(f"{_svg_x(f):.2f},{_svg_y(t):.2f}" for f, t in zip(curve.fpr, curve.tpr))
    parts.append(f'<polyline points="{points}" fill="none" stroke="#1060c0" stroke-width="2"/>')
    if mark_threshold is not None:
        idx = min(range(len(curve.thresholds)),
                  key=lambda i: abs(curve.thresholds[i] - float(mark_threshold)))
        mx, my = _svg_x(curve.fpr[idx]), _svg_y(curve.tpr[idx])
        parts.append(f'<rect x="{mx - 4.0:.2f}" y="{my - 4.0:.2f}" width="8" height="8" '
                     'fill="none" stroke="#c03020" stroke-width="2"/>')
        parts.append(f'<text x="{mx + 8.0:.2f}" y="{my - 8.0:.2f}" font-size="12" '
                     f'font-family="sans-serif">T={curve.thresholds[idx]:g}</text>')
    parts.append(f'<text x="{(_SVG_L + _SVG_R) / 2.0:.2f}" y="458.00" font-size="14" '
                 'text-anchor="middle" font-family="sans-serif">False positive rate</text>')
    parts.append('<text x="18.00" y="220.00" font-size="14" text-anchor="middle" '
                 'font-family="sans-serif" transform="rotate(-90 18 220)">True positive rate</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"bcosfire: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"bcosfire: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
