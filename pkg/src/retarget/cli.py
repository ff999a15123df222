"""Batch CLI. Exit codes: 0 success, 2 input error, 3 budget/feasibility error."""
import argparse
import json
import os
import sys

import numpy as np
from PIL import Image

from .distortion import DistortionParams
from .errors import FeasibilityError, InputError, RetargetError
from .pipeline import RetargetConfig, distortion_curve, retarget

# Settings resolvable through the environment or a JSON config file,
# mirroring the CLI flags. Precedence: CLI > environment > file > defaults.
_SETTINGS = {
    "dt": ("RETARGET_DT", float),
    "omega0": ("RETARGET_OMEGA0", float),
    "grid": ("RETARGET_GRID", str),
    "coverage_threshold": ("RETARGET_COVERAGE_THRESHOLD", float),
    "min_cell_fraction": ("RETARGET_MIN_CELL_FRACTION", float),
}


def _parse_grid(value: str) -> tuple[int, int]:
    try:
        cols, rows = value.lower().split("x")
        return int(cols), int(rows)
    except ValueError as exc:
        raise InputError(f"--grid expects CxR (e.g. 25x25), got {value!r}") from exc


def _resolve_settings(args, environ) -> dict:
    settings = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read config file {args.config}: {exc}") from exc
        for key in _SETTINGS:
            if key in file_cfg:
                settings[key] = file_cfg[key]
    for key, (env_name, cast) in _SETTINGS.items():
        if env_name in environ:
            settings[key] = cast(environ[env_name])
    for key in _SETTINGS:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            settings[key] = cli_val
    return settings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retarget",
        description="Content-aware image retargeting (bounded warp + crop).",
    )
    parser.add_argument("--input", required=True, help="source image path")
    parser.add_argument("--output", help="output image path")
    size = parser.add_mutually_exclusive_group()
    size.add_argument("--width", type=int, help="target width in pixels")
    size.add_argument("--factor", type=float, help="target width as a fraction of the source")
    parser.add_argument("--height", type=int, help="target height in pixels")
    parser.add_argument("--dt", type=float, help="distortion threshold (default 1)")
    parser.add_argument("--omega0", type=float, help="background distortion penalty (default 1)")
    parser.add_argument("--grid", help="mesh resolution as CxR (default 25x25)")
    parser.add_argument("--importance", help="external importance map (grayscale PNG/PGM)")
    parser.add_argument("--mask", help="segmentation mask (grayscale, 0 = background)")
    parser.add_argument("--coverage-threshold", dest="coverage_threshold", type=float,
                        help="mask coverage needed to use segmentation (default 0.05)")
    parser.add_argument("--min-cell-fraction", dest="min_cell_fraction", type=float,
                        help="minimum cell size as a fraction of the uniform cell (default 0.15)")
    parser.add_argument("--allow-scale-fallback", action="store_true",
                        help="cover an over-budget expansion by uniform scaling")
    parser.add_argument("--dump-mesh", help="write the final mesh as JSON")
    parser.add_argument("--dump-importance", help="write the importance map as grayscale PNG")
    parser.add_argument("--curve", type=int, metavar="N",
                        help="print the distortion-vs-factor curve at N samples as JSON")
    parser.add_argument("--config", help="JSON config file mirroring these flags")
    return parser


def make_config(args, environ=None) -> RetargetConfig:
    settings = _resolve_settings(args, environ if environ is not None else os.environ)
    grid_cols, grid_rows = _parse_grid(settings["grid"]) if "grid" in settings else (25, 25)
    params = DistortionParams(
        omega0=settings.get("omega0", 1.0),
        d_threshold=settings.get("dt", 1.0),
    )
    return RetargetConfig(
        target_width=args.width,
        target_height=args.height,
        factor=args.factor,
        params=params,
        grid_cols=grid_cols,
        grid_rows=grid_rows,
        min_cell_fraction=settings.get("min_cell_fraction", 0.15),
        coverage_threshold=settings.get("coverage_threshold", 0.05),
        importance_path=args.importance,
        mask_path=args.mask,
        allow_scale_fallback=args.allow_scale_fallback,
    )


def _load_image(path) -> np.ndarray:
    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:
        raise InputError(f"cannot read image {path}: {exc}") from exc
    if img.mode not in ("L", "RGB"):
        img = img.convert("RGB")
    return np.asarray(img)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = make_config(args)
        image = _load_image(args.input)
        if args.width is None and args.factor is None and args.height is None:
            raise InputError("one of --width, --factor or --height is required")

        if args.curve:
            curve = distortion_curve(image, config, args.curve)
            print(json.dumps([{"factor": f, "d": d} for f, d in curve]))
            if not args.output:
                return 0

        if not args.output:
            raise InputError("--output is required unless only --curve is requested")
        result = retarget(image, config)
        Image.fromarray(result.image).save(args.output)

        if args.dump_importance:
            gray = np.clip(np.rint(result.importance.scores * 255), 0, 255).astype(np.uint8)
            Image.fromarray(gray, mode="L").save(args.dump_importance)
        if args.dump_mesh:
            if result.final_mesh is not None:
                mesh_doc = dict(
                    result.final_mesh.mesh.to_dict(),
                    energy=result.final_mesh.energy,
                    converged=result.final_mesh.converged,
                )
            else:
                mesh_doc = {"grid_cols": 0, "grid_rows": 0, "col_widths": [],
                            "row_heights": [], "energy": 0.0, "converged": True}
            with open(args.dump_mesh, "w") as fh:
                json.dump(mesh_doc, fh)

        print(json.dumps({"plan": result.plan.to_dict(),
                          "timings_ms": {k: round(v * 1000, 3) for k, v in result.timings.items()}}))
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FeasibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RetargetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def serve_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="retarget-serve",
                                     description="Local retargeting preview service.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--cache-dir", help="directory for cached importance maps")
    parser.add_argument("--ui-dir", help="directory with the built web client to serve at /")
    args = parser.parse_args(argv)

    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(cache_dir=args.cache_dir, ui_dir=args.ui_dir),
                host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
