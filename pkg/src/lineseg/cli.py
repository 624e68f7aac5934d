"""Command-line front end: segment, batch, evaluate."""

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import PipelineConfig
from .dataio import (
    DatasetEntry,
    LineAnnotation,
    export_line_crops,
    load_image,
    parse_page_name,
    read_annotation_dir,
    scan_dataset,
    write_voc,
    write_yolo,
)
from .errors import FormatError, LinesegError, ParameterError, UndefinedRateError
from .evaluation import MatchConfig, evaluate_dataset
from .pipeline import segment_array


def _load_config(path_arg) -> PipelineConfig:
    path = path_arg or os.environ.get("LINESEG_CONFIG") or None
    if path is None:
        return PipelineConfig()
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"config file {path} not found")
    return PipelineConfig.from_file(path)


def _entry_for_image(path: Path, warnings: list) -> DatasetEntry:
    try:
        folder, page = parse_page_name(path.stem)
    except FormatError:
        warnings.append(
            f"image name {path.stem!r} does not follow FolderNumber_PageNumber; using 0_0"
        )
        folder, page = 0, 0
    return DatasetEntry(folder, page, path)


def _segment_one(image_path: Path, out_root: Path, cfg: PipelineConfig,
                 debug_dumps: bool, overwrite: bool) -> dict:
    """Segment one image and write crops, annotations, and the manifest.
    Returns the manifest dict."""
    pre_warnings: list[str] = []
    entry = _entry_for_image(Path(image_path), pre_warnings)
    page_dir = Path(out_root) / str(entry.folder_number) / str(entry.page_number)
    page_dir.mkdir(parents=True, exist_ok=True)
    debug_dir = page_dir / "debug" if debug_dumps else None

    t0 = time.perf_counter()
    result = segment_array(load_image(image_path), cfg, debug_dir)
    wall = time.perf_counter() - t0

    crop_paths = export_line_crops(entry, result.lines, result.crops, out_root, overwrite)
    annotation = LineAnnotation(
        width=result.image.width,
        height=result.image.height,
        boxes=tuple(line.crop for line in result.lines),
    )
    yolo_path = page_dir / f"{entry.image_id}.txt"
    voc_path = page_dir / f"{entry.image_id}.xml"
    for target in (yolo_path, voc_path):
        if target.exists() and not overwrite:
            raise FileExistsError(f"{target} already exists (use --overwrite to replace)")
    write_yolo(annotation, yolo_path)
    write_voc(annotation, voc_path)

    manifest = {
        "image": str(image_path),
        "image_id": entry.image_id,
        "width": result.image.width,
        "height": result.image.height,
        "line_count": len(result.lines),
        "lines": [
            {
                "index": line.line_index,
                "x_min": line.crop.x_min,
                "y_min": line.crop.y_min,
                "x_max": line.crop.x_max,
                "y_max": line.crop.y_max,
            }
            for line in result.lines
        ],
        "outputs": {
            "crops": [str(p.relative_to(out_root)) for p in crop_paths],
            "yolo": str(yolo_path.relative_to(out_root)),
            "voc": str(voc_path.relative_to(out_root)),
        },
        "warnings": pre_warnings + result.warnings,
        "config": cfg.to_dict(),
        "timings": {**result.timings, "wall": wall},
    }
    (page_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


def cmd_segment(args) -> int:
    cfg = _load_config(args.config)
    manifest = _segment_one(
        Path(args.image), Path(args.out), cfg, args.debug_dumps, args.overwrite
    )
    for w in manifest["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    print(f"{manifest['image_id']}: {manifest['line_count']} lines")
    return 0


def cmd_batch(args) -> int:
    cfg = _load_config(args.config)
    out_root = Path(args.out)
    scan = scan_dataset(Path(args.root))
    if not scan.entries:
        print("warning: no dataset entries found", file=sys.stderr)

    def work(entry: DatasetEntry):
        try:
            manifest = _segment_one(
                entry.image_path, out_root, cfg, args.debug_dumps, args.overwrite
            )
            return entry, manifest, None
        except Exception as exc:  # noqa: BLE001 - per-image failures must not kill the batch
            return entry, None, f"{type(exc).__name__}: {exc}"

    t0 = time.perf_counter()
    jobs = max(1, args.jobs)
    if jobs == 1:
        results = [work(e) for e in scan.entries]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, scan.entries))
    wall = time.perf_counter() - t0

    rows = []
    failures = []
    for entry, manifest, error in results:
        row = {"id": entry.image_id, "folder": entry.folder_number, "page": entry.page_number}
        if error is None:
            row["status"] = "ok"
            row["line_count"] = manifest["line_count"]
        else:
            row["status"] = "failed"
            row["error"] = error
            failures.append({"id": entry.image_id, "error": error})
        rows.append(row)
    rows.sort(key=lambda r: (r["folder"], r["page"], r["id"]))

    aggregate = {
        "entries": rows,
        "failures": sorted(failures, key=lambda f: f["id"]),
        "skipped": [[str(p), reason] for p, reason in scan.skipped],
        "total_images": len(scan.entries),
        "failed_count": len(failures),
        "config": cfg.to_dict(),
        "timings": {"wall": wall},
    }
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "batch_manifest.json").write_text(
        json.dumps(aggregate, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for f in failures:
        print(f"failed: {f['id']}: {f['error']}", file=sys.stderr)
    print(f"{len(scan.entries) - len(failures)}/{len(scan.entries)} images segmented")
    if scan.entries and len(failures) == len(scan.entries):
        return 1
    return 0


def _parse_img_size(text):
    if text is None:
        return None
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ParameterError(f"--img-size must look like 1000x1400, got {text!r}") from None


def cmd_evaluate(args) -> int:
    img_size = _parse_img_size(args.img_size)
    gt = read_annotation_dir(Path(args.gt), img_size)
    det = read_annotation_dir(Path(args.det), img_size)
    if not set(gt) & set(det):
        print("error: no overlapping image ids between --gt and --det", file=sys.stderr)
        return 1
    cfg = MatchConfig(t_a=args.ta, score_mode=args.score_mode, assignment=args.assignment)
    report = evaluate_dataset(gt, det, cfg, ap_mode=args.ap_mode)

    # the alternate score mode is informational, kept out of the JSON schema
    alt_mode = "gt-coverage" if cfg.score_mode == "iou" else "iou"
    alt = evaluate_dataset(gt, det, MatchConfig(cfg.t_a, alt_mode, cfg.assignment), args.ap_mode)
    print(
        f"note: {alt_mode} scoring would give DR={alt.dr:.4f} RA={alt.ra:.4f} FM={alt.fm:.4f}",
        file=sys.stderr,
    )

    payload = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    print(payload)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    if args.pr_curve:
        samples = sorted((im.recall, im.precision) for im in report.per_image)
        with open(args.pr_curve, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["recall", "precision"])
            writer.writerows([f"{r:.6f}", f"{p:.6f}"] for r, p in samples)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lineseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_seg = sub.add_parser("segment", help="segment one page image into text lines")
    p_seg.add_argument("image", help="input page image (png/jpg)")
    p_seg.add_argument("-o", "--out", required=True, help="output directory")
    p_seg.add_argument("--config", help="JSON config file (or set LINESEG_CONFIG)")
    p_seg.add_argument("--debug-dumps", action="store_true", help="write numbered stage images")
    p_seg.add_argument("--overwrite", action="store_true", help="replace existing outputs")
    p_seg.set_defaults(fn=cmd_segment)

    p_batch = sub.add_parser("batch", help="segment every page of a dataset tree")
    p_batch.add_argument("root", help="dataset root directory")
    p_batch.add_argument("-o", "--out", required=True, help="output directory")
    p_batch.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    p_batch.add_argument("--config", help="JSON config file (or set LINESEG_CONFIG)")
    p_batch.add_argument("--debug-dumps", action="store_true")
    p_batch.add_argument("--overwrite", action="store_true")
    p_batch.set_defaults(fn=cmd_batch)

    p_eval = sub.add_parser("evaluate", help="score detections against ground truth")
    p_eval.add_argument("--gt", required=True, help="ground-truth annotation directory")
    p_eval.add_argument("--det", required=True, help="detection annotation directory")
    p_eval.add_argument("--ta", type=float, default=0.80, help="acceptance threshold (default 0.8)")
    p_eval.add_argument(
        "--score-mode", choices=("iou", "gt-coverage"), default="iou", dest="score_mode"
    )
    p_eval.add_argument("--assignment", choices=("greedy", "optimal"), default="greedy")
    p_eval.add_argument(
        "--ap-mode",
        dest="ap_mode",
        choices=("interp", "paper"),
        default="interp",
        help="AP interpolation: interp (default) or the recall-binned paper mode",
    )
    p_eval.add_argument("--pr-curve", dest="pr_curve", help="write recall,precision CSV here")
    p_eval.add_argument("--out", help="also write the JSON report to this file")
    p_eval.add_argument(
        "--img-size", dest="img_size", help="WxH for YOLO annotations (e.g. 1000x1400)"
    )
    p_eval.set_defaults(fn=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UndefinedRateError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return 1
    except (LinesegError, FileNotFoundError, FileExistsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
