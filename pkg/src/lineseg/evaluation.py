"""One-to-one matching, detection/recognition rates, and average precision."""

import warnings
from dataclasses import dataclass

from .components import BoundingBox
from .errors import ParameterError, UndefinedRateError


@dataclass(frozen=True)
class MatchConfig:
    """t_a is the acceptance threshold on the match score; score_mode 'iou'
    scores |G∩D|/|G∪D| on box areas, 'gt-coverage' scores |G∩D|/|G|;
    assignment 'greedy' admits candidates in descending score order,
    'optimal' maximizes match count (then total score)."""

    t_a: float = 0.80
    score_mode: str = "iou"
    assignment: str = "greedy"

    def __post_init__(self):
        if not 0.0 < self.t_a <= 1.0:
            raise ParameterError(f"t_a must be in (0, 1], got {self.t_a}")
        if self.score_mode not in ("iou", "gt-coverage"):
            raise ParameterError(f"score_mode must be 'iou' or 'gt-coverage', got {self.score_mode!r}")
        if self.assignment not in ("greedy", "optimal"):
            raise ParameterError(f"assignment must be 'greedy' or 'optimal', got {self.assignment!r}")


@dataclass(frozen=True)
class EvalCounts:
    """N ground-truth elements, M detected elements, o2o one-to-one matches."""

    n_gt: int
    n_det: int
    o2o: int

    def __post_init__(self):
        if min(self.n_gt, self.n_det, self.o2o) < 0:
            raise ParameterError("counts must be non-negative")
        if self.o2o > min(self.n_gt, self.n_det):
            raise ParameterError(
                f"o2o={self.o2o} exceeds min(N={self.n_gt}, M={self.n_det})"
            )


def match_score(gt: BoundingBox, det: BoundingBox, score_mode: str) -> float:
    inter = gt.intersection_area(det)
    if score_mode == "iou":
        union = gt.area + det.area - inter
        return inter / union if union > 0 else 0.0
    return inter / gt.area


def _candidates(gt, det, cfg):
    out = []
    for gi, g in enumerate(gt):
        for di, d in enumerate(det):
            s = match_score(g, d, cfg.score_mode)
            if s >= cfg.t_a:
                out.append((s, gi, di))
    return out


def _greedy(cands, n_gt, n_det):
    order = sorted(cands, key=lambda c: (-c[0], c[1], c[2]))
    gt_used = [False] * n_gt
    det_used = [False] * n_det
    pairs = []
    for s, gi, di in order:
        if not gt_used[gi] and not det_used[di]:
            gt_used[gi] = True
            det_used[di] = True
            pairs.append((gi, di))
    return pairs


def _optimal_component(gts, adj):
    """Exhaustive search over one connected component.

    Maximizes (pair count, total score, lexicographically smallest pair
    list).  gts are visited in index order; adjacency lists are
    (det index, score) sorted by det index.
    """
    best = {"key": (-1, 0.0), "pairs": None}

    def rec(i, used, pairs, score, remaining):
        count = len(pairs)
        # bound: even matching every remaining gt cannot beat the best count
        if count + remaining < best["key"][0]:
            return
        if i == len(gts):
            key = (count, score)
            if key > best["key"] or (
                key == best["key"] and (best["pairs"] is None or pairs < best["pairs"])
            ):
                best["key"] = key
                best["pairs"] = list(pairs)
            return
        gi = gts[i]
        rec(i + 1, used, pairs, score, remaining - 1)
        for di, s in adj[gi]:
            if di not in used:
                used.add(di)
                pairs.append((gi, di))
                rec(i + 1, used, pairs, score + s, remaining - 1)
                pairs.pop()
                used.remove(di)

    rec(0, set(), [], 0.0, len(gts))
    return best["pairs"] or []


def _optimal_large(gts, dets, adj):
    """Assignment fallback for components too big to search exhaustively.

    A constant offset per matched pair makes the solver maximize pair count
    before total score; the lexicographic tie rule is not guaranteed here.
    """
    import numpy as np
    from scipy.optimize import linear_sum_assignment

    gi_of = {g: i for i, g in enumerate(gts)}
    di_of = {d: i for i, d in enumerate(dets)}
    cost = np.zeros((len(gts), len(dets)))
    ok = np.zeros((len(gts), len(dets)), dtype=bool)
    for g in gts:
        for d, s in adj[g]:
            cost[gi_of[g], di_of[d]] = s + 10.0
            ok[gi_of[g], di_of[d]] = True
    rows, cols = linear_sum_assignment(cost, maximize=True)
    return [(gts[r], dets[c]) for r, c in zip(rows, cols) if ok[r, c]]


def _optimal(cands, n_gt, n_det):
    adj: dict[int, list[tuple[int, float]]] = {}
    det_gts: dict[int, set[int]] = {}
    for s, gi, di in cands:
        adj.setdefault(gi, []).append((di, s))
        det_gts.setdefault(di, set()).add(gi)
    for gi in adj:
        adj[gi].sort()

    # connected components of the candidate graph
    seen_g: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for start in sorted(adj):
        if start in seen_g:
            continue
        comp_g: list[int] = []
        stack = [start]
        seen_g.add(start)
        comp_d: set[int] = set()
        while stack:
            g = stack.pop()
            comp_g.append(g)
            for d, _ in adj[g]:
                if d not in comp_d:
                    comp_d.add(d)
                    for g2 in det_gts[d]:
                        if g2 not in seen_g:
                            seen_g.add(g2)
                            stack.append(g2)
        comp_g.sort()
        work = 1
        for g in comp_g:
            work *= len(adj[g]) + 1
            if work > 1_000_000:
                break
        if work > 1_000_000:
            pairs.extend(_optimal_large(comp_g, sorted(comp_d), adj))
        else:
            pairs.extend(_optimal_component(comp_g, adj))
    return sorted(pairs)


def match_lines(gt, det, cfg: MatchConfig) -> list[tuple[int, int]]:
    """One-to-one pairs (gt index, det index) whose score meets t_a.

    Each index appears in at most one pair.  Pairs are returned sorted by
    (gt index, det index).
    """
    cands = _candidates(gt, det, cfg)
    if cfg.assignment == "greedy":
        pairs = _greedy(cands, len(gt), len(det))
    else:
        pairs = _optimal(cands, len(gt), len(det))
    return sorted(pairs)


def compute_fm(counts: EvalCounts) -> tuple[float, float, float]:
    """Detection rate o2o/N, recognition accuracy o2o/M, and their harmonic
    combination 2*DR*RA/(DR+RA) (0 when both rates are 0)."""
    if counts.n_gt == 0 or counts.n_det == 0:
        raise UndefinedRateError(
            f"rates undefined for N={counts.n_gt}, M={counts.n_det}"
        )
    dr = counts.o2o / counts.n_gt
    ra = counts.o2o / counts.n_det
    fm = 0.0 if dr + ra == 0.0 else 2.0 * dr * ra / (dr + ra)
    return dr, ra, fm


def eleven_point_ap(samples, mode: str = "paper") -> float:
    """Eleven-point average precision over (recall, precision) samples.

    paper mode: samples fall into the recall bin nearest to them (round half
    up to a multiple of 0.1); each bin contributes its max precision, empty
    bins contribute 0, and the AP is the mean of the 11 bin values.  interp
    mode: each bin r contributes the max precision among samples with
    recall >= r.
    """
    if mode not in ("paper", "interp"):
        raise ParameterError(f"mode must be 'paper' or 'interp', got {mode!r}")
    samples = list(samples)
    if not samples:
        warnings.warn("eleven_point_ap called with no samples; AP = 0", stacklevel=2)
        return 0.0
    for r, p in samples:
        if not (0.0 <= r <= 1.0 and 0.0 <= p <= 1.0):
            raise ParameterError(f"recall/precision out of [0,1]: ({r}, {p})")
    peaks = [0.0] * 11
    if mode == "paper":
        for r, p in samples:
            b = min(10, max(0, int(r * 10.0 + 0.5)))
            if p > peaks[b]:
                peaks[b] = p
    else:
        for b in range(11):
            r_bin = b / 10.0
            for r, p in samples:
                if r >= r_bin and p > peaks[b]:
                    peaks[b] = p
    return sum(peaks) / 11.0


def mean_ap(per_class_ap) -> float:
    """Arithmetic mean of per-class AP values."""
    values = list(per_class_ap)
    if not values:
        raise ParameterError("mean_ap requires at least one class")
    return sum(values) / len(values)


@dataclass(frozen=True)
class ImageEval:
    image_id: str
    counts: EvalCounts
    precision: float
    recall: float


@dataclass(frozen=True)
class EvalReport:
    per_image: tuple[ImageEval, ...]
    aggregate: EvalCounts
    dr: float
    ra: float
    fm: float
    ap: float
    mean_ap: float
    config: MatchConfig
    warnings: tuple[str, ...]
    ap_mode: str = "interp"

    def to_dict(self) -> dict:
        return {
            "per_image": [
                {
                    "id": im.image_id,
                    "N": im.counts.n_gt,
                    "M": im.counts.n_det,
                    "o2o": im.counts.o2o,
                    "precision": im.precision,
                    "recall": im.recall,
                }
                for im in self.per_image
            ],
            "aggregate": {
                "N": self.aggregate.n_gt,
                "M": self.aggregate.n_det,
                "o2o": self.aggregate.o2o,
                "DR": self.dr,
                "RA": self.ra,
                "FM": self.fm,
                "AP": self.ap,
                "mAP": self.mean_ap,
            },
            "config": {
                "t_a": self.config.t_a,
                "score_mode": self.config.score_mode,
                "assignment": self.config.assignment,
                "ap_mode": self.ap_mode,
            },
            "warnings": list(self.warnings),
        }


def evaluate_dataset(
    gt: dict, det: dict, cfg: MatchConfig, ap_mode: str = "interp"
) -> EvalReport:
    """Score detections against ground truth, both keyed by image id.

    Ids present only in det are excluded and listed under warnings; ids
    present only in gt are scored against zero detections.  Per-image
    precision is o2o/M (0 when M=0) and recall o2o/N (0 when N=0); the
    aggregate applies the rate formulas to the summed counts, and AP pools
    per-image (recall, precision) samples.  ap_mode defaults to interp so a
    detector matching the ground truth exactly scores AP 1.0; paper mode
    bins samples by rounded recall and counts empty bins as 0.
    """
    extra = sorted(set(det) - set(gt))
    warn_list = [f"id {i!r} present in detections but not ground truth; excluded" for i in extra]

    per_image = []
    for image_id in sorted(gt):
        g = list(gt[image_id])
        d = list(det.get(image_id, []))
        pairs = match_lines(g, d, cfg)
        counts = EvalCounts(len(g), len(d), len(pairs))
        precision = counts.o2o / counts.n_det if counts.n_det else 0.0
        recall = counts.o2o / counts.n_gt if counts.n_gt else 0.0
        per_image.append(ImageEval(image_id, counts, precision, recall))

    agg = EvalCounts(
        sum(im.counts.n_gt for im in per_image),
        sum(im.counts.n_det for im in per_image),
        sum(im.counts.o2o for im in per_image),
    )
    dr, ra, fm = compute_fm(agg)
    samples = [(im.recall, im.precision) for im in per_image]
    ap = eleven_point_ap(samples, mode=ap_mode)
    return EvalReport(
        per_image=tuple(per_image),
        aggregate=agg,
        dr=dr,
        ra=ra,
        fm=fm,
        ap=ap,
        mean_ap=mean_ap([ap]),
        config=cfg,
        warnings=tuple(warn_list),
        ap_mode=ap_mode,
    )
