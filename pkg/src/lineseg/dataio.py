"""Dataset traversal, the FolderNumber_PageNumber naming grammar, and
YOLO/PascalVOC annotation I/O."""

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .components import BoundingBox
from .errors import AnnotationParseError, FormatError, ParameterError

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")
_STEM_RE = re.compile(r"^(\d+)_(\d+)$")
_CROP_RE = re.compile(r"^(\d+)_(\d+)_(\d+)(?:_(\d+))?$")


@dataclass(frozen=True)
class DatasetEntry:
    folder_number: int
    page_number: int
    image_path: Path
    annotation_path: Path | None = None

    @property
    def image_id(self) -> str:
        return f"{self.folder_number}_{self.page_number}"


@dataclass(frozen=True)
class LineAnnotation:
    """Boxes of one image, all of a single class (0 = text line)."""

    width: int
    height: int
    boxes: tuple[BoundingBox, ...]
    class_id: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise FormatError("annotation dims must be positive")


@dataclass
class ScanResult:
    """Entries found by scan_dataset plus the files it skipped (path,
    reason), both deterministically ordered."""

    entries: list[DatasetEntry] = field(default_factory=list)
    skipped: list[tuple[Path, str]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def parse_page_name(stem: str) -> tuple[int, int]:
    """`<FolderNumber>_<PageNumber>` -> (folder, page)."""
    m = _STEM_RE.match(stem)
    if not m:
        raise FormatError(f"name {stem!r} does not parse as FolderNumber_PageNumber")
    return int(m.group(1)), int(m.group(2))


def format_crop_name(folder: int, page: int, line: int) -> str:
    """1-based line number, per the dataset naming convention."""
    return f"{folder}_{page}_{line}"


def parse_crop_name(stem: str) -> tuple[int, ...]:
    """`F_P_L` or `F_P_L_W` -> (folder, page, line[, word])."""
    m = _CROP_RE.match(stem)
    if not m:
        raise FormatError(f"name {stem!r} does not parse as a line/word crop name")
    parts = tuple(int(g) for g in m.groups() if g is not None)
    return parts


def scan_dataset(root: Path) -> ScanResult:
    """Recursively collect `<folder>_<page>` images with optional sidecar
    annotations (`<stem>.txt` or `<stem>.xml`, .xml preferred).

    Entries are sorted by (folder_number, page_number); files that are not
    recognized go to the skip list with a reason.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} is not a readable directory")
    result = ScanResult()
    consumed: set[Path] = set()

    for directory in sorted(p for p in root.rglob("*") if p.is_dir()) + [root]:
        files = sorted(p for p in directory.iterdir() if p.is_file())
        images = [p for p in files if p.suffix.lower() in IMAGE_EXTENSIONS]
        for img in images:
            try:
                folder, page = parse_page_name(img.stem)
            except FormatError:
                result.skipped.append((img, "filename does not parse as FolderNumber_PageNumber"))
                continue
            ann = None
            for ext in (".xml", ".txt"):
                cand = img.with_suffix(ext)
                if cand.is_file():
                    # both sidecars count as consumed; the .xml one wins
                    consumed.add(cand)
                    if ann is None:
                        ann = cand
            result.entries.append(DatasetEntry(folder, page, img, ann))

    for directory in sorted(p for p in root.rglob("*") if p.is_dir()) + [root]:
        for p in sorted(q for q in directory.iterdir() if q.is_file()):
            if p.suffix.lower() in IMAGE_EXTENSIONS or p in consumed:
                continue
            result.skipped.append((p, "unrecognized file"))

    result.entries.sort(key=lambda e: (e.folder_number, e.page_number, str(e.image_path)))
    result.skipped.sort(key=lambda s: str(s[0]))
    return result


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def read_yolo(path: Path, width: int, height: int) -> LineAnnotation:
    """Parse `class cx cy w h` normalized lines into pixel boxes.

    Denormalization: box width = round(w*W) (at least 1), x_min =
    round(cx*W - pw/2), x_max = x_min + pw - 1, then clamped to the image;
    same for y.  Malformed fields raise with the 1-based line number.
    """
    boxes = []
    class_id = 0
    text = Path(path).read_text(encoding="utf-8")
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise AnnotationParseError(f"{path}:{ln}: expected 5 fields, got {len(fields)}", ln)
        try:
            cid = int(fields[0])
            cx, cy, w, h = (float(f) for f in fields[1:])
        except ValueError as exc:
            raise AnnotationParseError(f"{path}:{ln}: {exc}", ln) from None
        if cid < 0:
            raise AnnotationParseError(f"{path}:{ln}: negative class id {cid}", ln)
        for name, v in (("cx", cx), ("cy", cy), ("w", w), ("h", h)):
            if not 0.0 <= v <= 1.0:
                raise AnnotationParseError(f"{path}:{ln}: field {name}={v} outside [0,1]", ln)
        class_id = cid
        pw = max(1, _round_half_up(w * width))
        ph = max(1, _round_half_up(h * height))
        x_min = _round_half_up(cx * width - pw / 2.0)
        y_min = _round_half_up(cy * height - ph / 2.0)
        x_max = x_min + pw - 1
        y_max = y_min + ph - 1
        x_min, x_max = max(0, x_min), min(width - 1, x_max)
        y_min, y_max = max(0, y_min), min(height - 1, y_max)
        if x_max < x_min or y_max < y_min:
            raise AnnotationParseError(f"{path}:{ln}: box degenerates after clamping", ln)
        boxes.append(BoundingBox(x_min, y_min, x_max, y_max))
    return LineAnnotation(width, height, tuple(boxes), class_id)


def write_yolo(annotation: LineAnnotation, path: Path) -> None:
    """One `class cx cy w h` line per box, 6-decimal normalized fields."""
    w, h = annotation.width, annotation.height
    lines = []
    for b in annotation.boxes:
        _check_box_in_dims(b, w, h)
        cx = (b.x_min + b.x_max + 1) / 2.0 / w
        cy = (b.y_min + b.y_max + 1) / 2.0 / h
        bw = b.width / w
        bh = b.height / h
        lines.append(f"{annotation.class_id} {cx:.6f} {cy:.6f} {bw:.6f} {bh:.6f}")
    Path(path).write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def _check_box_in_dims(b: BoundingBox, w: int, h: int) -> None:
    if b.x_min < 0 or b.y_min < 0 or b.x_max >= w or b.y_max >= h:
        raise ParameterError(f"box {b} exceeds image dims {w}x{h}")


def write_voc(annotation: LineAnnotation, path: Path) -> None:
    """PascalVOC-style XML; bndbox coordinates are 0-based inclusive pixels."""
    root = ET.Element("annotation")
    size = ET.SubElement(root, "size")
    ET.SubElement(size, "width").text = str(annotation.width)
    ET.SubElement(size, "height").text = str(annotation.height)
    ET.SubElement(size, "depth").text = "1"
    for b in annotation.boxes:
        _check_box_in_dims(b, annotation.width, annotation.height)
        obj = ET.SubElement(root, "object")
        ET.SubElement(obj, "name").text = "line"
        bnd = ET.SubElement(obj, "bndbox")
        ET.SubElement(bnd, "xmin").text = str(b.x_min)
        ET.SubElement(bnd, "ymin").text = str(b.y_min)
        ET.SubElement(bnd, "xmax").text = str(b.x_max)
        ET.SubElement(bnd, "ymax").text = str(b.y_max)
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)


def read_voc(path: Path) -> LineAnnotation:
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise AnnotationParseError(f"{path}: {exc}", getattr(exc, "position", (0,))[0]) from None
    size = root.find("size")
    if size is None or size.find("width") is None or size.find("height") is None:
        raise AnnotationParseError(f"{path}: missing size element", 0)
    width = int(size.findtext("width"))
    height = int(size.findtext("height"))
    boxes = []
    for obj in root.iter("object"):
        bnd = obj.find("bndbox")
        if bnd is None:
            raise AnnotationParseError(f"{path}: object without bndbox", 0)
        try:
            coords = [int(round(float(bnd.findtext(k)))) for k in ("xmin", "ymin", "xmax", "ymax")]
        except (TypeError, ValueError) as exc:
            raise AnnotationParseError(f"{path}: bad bndbox ({exc})", 0) from None
        boxes.append(BoundingBox(*coords))
    return LineAnnotation(width, height, tuple(boxes))


def load_image(path: Path) -> np.ndarray:
    """Read an image file as a uint8 array (grayscale 2-D or channels-last)."""
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "RGB", "RGBA", "LA"):
                img = img.convert("RGB")
            arr = np.asarray(img)
    except (OSError, SyntaxError) as exc:
        raise FormatError(f"cannot read image {path}: {exc}") from None
    if arr.dtype != np.uint8:
        raise FormatError(f"unsupported bit depth {arr.dtype} in {path}")
    return arr


def save_png(data: np.ndarray, path: Path) -> None:
    Image.fromarray(data).save(path, format="PNG")


def export_line_crops(entry: DatasetEntry, lines, crops, out_root: Path, overwrite: bool = False):
    """Write crops to `out/<Folder>/<Page>/lines/<F>_<P>_<L>.png` (1-based
    line numbers, top to bottom).  Returns the written paths in order.
    Existing files raise FileExistsError unless overwrite is set."""
    if len(lines) != len(crops):
        raise ParameterError(f"{len(lines)} lines but {len(crops)} crops")
    out_dir = Path(out_root) / str(entry.folder_number) / str(entry.page_number) / "lines"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for line, crop in zip(lines, crops):
        name = format_crop_name(entry.folder_number, entry.page_number, line.line_index + 1)
        target = out_dir / f"{name}.png"
        if target.exists() and not overwrite:
            raise FileExistsError(f"{target} already exists (use overwrite to replace)")
        save_png(crop.data, target)
        written.append(target)
    return written


def read_annotation_dir(directory: Path, img_size: tuple[int, int] | None = None) -> dict:
    """Collect annotations recursively, keyed by file stem.

    XML files are self-contained; YOLO .txt files need img_size=(W, H).
    When both exist for one stem the XML wins.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"annotation directory {directory} not found")
    found: dict[str, list[BoundingBox]] = {}
    xml_stems: set[str] = set()
    for p in sorted(directory.rglob("*.xml")):
        found[p.stem] = list(read_voc(p).boxes)
        xml_stems.add(p.stem)
    for p in sorted(directory.rglob("*.txt")):
        if p.stem in xml_stems:
            continue
        if img_size is None:
            raise ParameterError(
                f"{p}: YOLO annotations need an image size (pass --img-size WxH)"
            )
        found[p.stem] = list(read_yolo(p, img_size[0], img_size[1]).boxes)
    return found
