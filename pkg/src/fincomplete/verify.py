"""Executable theorem instances.

Each verifier evaluates every hypothesis of a result (never
short-circuiting, so a report localizes all gaps at once) and then the
conclusion, and classifies the outcome: verified, hypothesis unmet with the
conclusion still holding, or conclusion failing alongside a hypothesis gap.
A failing conclusion with all hypotheses passing would contradict a proved
theorem and is reported under its own status; the test suite treats
producing it as a bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .checks import (
    is_ancillary,
    is_complete,
    is_homogeneous,
    is_minimal_sufficient,
    is_sufficient,
)
from .errors import ExhaustionError, GridError
from .model import (
    FiniteModel,
    Partition,
    RationalFunction,
    SubmodelRef,
    check_intersection_stable,
    event_label,
    flatten_label,
    join,
    power_model,
    truncated_family,
    weighted_model,
)
from .optimal import is_optimal_unbiased
from .reports import VERDICT_FAIL, VERDICT_PASS, CheckReport, TheoremReport, combine_reports

INTEGRABILITY_NOTE = "vacuous on a finite sample space: every function is integrable"


@dataclass(frozen=True)
class Exhaustion:
    """A labeled family of submodels covering the model."""

    label: str
    pieces: tuple[tuple[str, SubmodelRef], ...]

    @staticmethod
    def single(m: FiniteModel, label: str = "all") -> "Exhaustion":
        return Exhaustion(label, ((label, SubmodelRef.full(m)),))

    @staticmethod
    def by_coordinate(m: FiniteModel, coord: int, label: str | None = None) -> "Exhaustion":
        """One piece per distinct value of a tuple-label coordinate, each
        piece varying everything else."""
        values: list[str] = []
        for lab in m.params:
            flat = flatten_label(lab)
            if len(flat) <= coord:
                raise GridError("parameter labels lack the requested coordinate")
            if flat[coord] not in values:
                values.append(flat[coord])
        pieces = tuple(
            (v, SubmodelRef.section(m, coord, v)) for v in values
        )
        return Exhaustion(label or f"fix-coordinate-{coord}", pieces)

    def validate(self, m: FiniteModel) -> None:
        covered: set[int] = set()
        for _, piece in self.pieces:
            piece.validate(m)
            covered.update(piece.param_indices)
        if covered != set(range(m.num_params)):
            raise ExhaustionError(f"exhaustion {self.label!r} does not cover the model")


def _grid_axes(m: FiniteModel) -> tuple[list[str], list[str]]:
    """Axis values of a two-coordinate parameter grid, checked exhaustively."""
    axis1: list[str] = []
    axis2: list[str] = []
    for lab in m.params:
        flat = flatten_label(lab)
        if not isinstance(lab, tuple) or len(flat) != 2:
            raise GridError("parameters must be 2-tuples over a grid")
        if flat[0] not in axis1:
            axis1.append(flat[0])
        if flat[1] not in axis2:
            axis2.append(flat[1])
    expected = {(a, b) for a in axis1 for b in axis2}
    if set(m.params) != expected or len(m.params) != len(expected):
        raise GridError("parameters do not form a full product grid")
    return axis1, axis2


def verify_joint_completeness(
    m: FiniteModel, family: Sequence[tuple[Partition, Exhaustion]]
) -> TheoremReport:
    """Joint completeness from partial complete sufficiency: when each
    partition is complete sufficient for every piece of its exhaustion,
    the join of all partitions is complete for the whole model."""
    hyps: list[tuple[str, CheckReport]] = []
    joined: Partition | None = None
    for i, (part, exh) in enumerate(family):
        exh.validate(m)
        joined = part if joined is None else join(joined, part)
        for eta, piece in exh.pieces:
            hyps.append(
                (
                    f"C{i + 1} complete[{exh.label}={eta}]",
                    is_complete(part, m, piece),
                )
            )
            hyps.append(
                (
                    f"C{i + 1} sufficient[{exh.label}={eta}]",
                    is_sufficient(part, m, piece),
                )
            )
    if joined is None:
        raise ExhaustionError("family must contain at least one partition")
    conclusion = is_complete(joined, m, SubmodelRef.full(m))
    return TheoremReport("joint-completeness", tuple(hyps), conclusion)


def verify_two_block_grid(m: FiniteModel, c1: Partition, c2: Partition) -> TheoremReport:
    """The two-partition grid case of joint completeness: for a model
    parametrized by a product grid, complete sufficiency of the first
    partition along one axis and of the second along the other forces the
    join to be complete.  (Sufficiency of the join is not part of the
    conclusion and can genuinely fail.)"""
    axis1, axis2 = _grid_axes(m)
    hyps: list[tuple[str, CheckReport]] = []
    for v in axis2:
        sec = SubmodelRef.section(m, 1, v)
        hyps.append((f"c1-complete[axis2={v}]", is_complete(c1, m, sec)))
        hyps.append((f"c1-sufficient[axis2={v}]", is_sufficient(c1, m, sec)))
    for v in axis1:
        sec = SubmodelRef.section(m, 0, v)
        hyps.append((f"c2-complete[axis1={v}]", is_complete(c2, m, sec)))
        hyps.append((f"c2-sufficient[axis1={v}]", is_sufficient(c2, m, sec)))
    conclusion = is_complete(join(c1, c2), m, SubmodelRef.full(m))
    return TheoremReport("two-block-grid", tuple(hyps), conclusion)


def cks_product(q: FiniteModel, r: FiniteModel) -> FiniteModel:
    """The coupled product {Q_a (x) R_(a,b)} of a first-coordinate family
    and a grid-indexed second-coordinate family."""
    axis1, _ = _grid_axes(r)
    q_labels = [flatten_label(lab)[0] for lab in q.params]
    if q_labels != axis1:
        raise GridError("first grid axis must list the first family's parameters")
    points = tuple(f"({x},{y})" for x in q.points for y in r.points)
    rows = []
    for i, lab in enumerate(r.params):
        qi = q_labels.index(flatten_label(lab)[0])
        rows.append(tuple(pa * pb for pa in q.prob[qi] for pb in r.prob[i]))
    return FiniteModel(points, r.params, tuple(rows))


def verify_cks(q: FiniteModel, r: FiniteModel) -> TheoremReport:
    """Cramer-Kamps-Schenk completeness of a coupled product: completeness
    of the first family, per-first-coordinate completeness of the second,
    and per-second-coordinate homogeneity of the second yield completeness
    of the coupled product.  The integrability hypothesis of the general
    statement is vacuous on finite spaces and recorded as such."""
    axis1, axis2 = _grid_axes(r)
    product = cks_product(q, r)
    hyps: list[tuple[str, CheckReport]] = [
        (
            "first-family-complete",
            is_complete(Partition.discrete(q.num_points), q, SubmodelRef.full(q)),
        )
    ]
    for v in axis1:
        sec = SubmodelRef.section(r, 0, v)
        hyps.append(
            (
                f"second-family-complete[axis1={v}]",
                is_complete(Partition.discrete(r.num_points), r, sec),
            )
        )
    for v in axis2:
        sec = SubmodelRef.section(r, 1, v)
        hyps.append((f"second-family-homogeneous[axis2={v}]", is_homogeneous(r, sec)))
    hyps.append(
        ("integrability", CheckReport("integrability", VERDICT_PASS, None, (INTEGRABILITY_NOTE,)))
    )
    conclusion = is_complete(
        Partition.discrete(product.num_points), product, SubmodelRef.full(product)
    )
    return TheoremReport("cks", tuple(hyps), conclusion)


def _marginal_support_report(m: FiniteModel, c: Partition, sub: SubmodelRef) -> CheckReport:
    """Homogeneity of the restricted family: supports of the block-mass
    vectors must agree across the submodel."""
    blocks = c.blocks()
    idx = sub.param_indices
    base = tuple(m.event_mass(idx[0], b) > 0 for b in blocks)
    for j in idx[1:]:
        other = tuple(m.event_mass(j, b) > 0 for b in blocks)
        if other != base:
            bnum = next(k for k in range(len(blocks)) if base[k] != other[k])
            witness = {
                "block": tuple(m.points[y] for y in blocks[bnum]),
                "params": (m.params[idx[0]], m.params[j]),
            }
            return CheckReport("restricted-homogeneous", VERDICT_FAIL, witness, ())
    return CheckReport("restricted-homogeneous", VERDICT_PASS, None, ())


def verify_cks_rewrite(m: FiniteModel, c1: Partition, c2: Partition) -> TheoremReport:
    """The grid rewrite of the coupled-product completeness theorem:
    per-axis2 completeness of the first partition; per-axis1 ancillarity
    of the first plus complete sufficiency of the second; per-axis2
    homogeneity of the model restricted to the second partition.  The
    conclusion is completeness of the join."""
    axis1, axis2 = _grid_axes(m)
    hyps: list[tuple[str, CheckReport]] = []
    for v in axis2:
        sec = SubmodelRef.section(m, 1, v)
        hyps.append((f"c1-complete[axis2={v}]", is_complete(c1, m, sec)))
    for v in axis1:
        sec = SubmodelRef.section(m, 0, v)
        hyps.append((f"c1-ancillary[axis1={v}]", is_ancillary(c1, m, sec)))
        hyps.append(
            (
                f"c2-complete-sufficient[axis1={v}]",
                combine_reports(
                    "complete-sufficient", is_complete(c2, m, sec), is_sufficient(c2, m, sec)
                ),
            )
        )
    for v in axis2:
        sec = SubmodelRef.section(m, 1, v)
        hyps.append(
            (f"c2-marginal-homogeneous[axis2={v}]", _marginal_support_report(m, c2, sec))
        )
    hyps.append(
        ("integrability", CheckReport("integrability", VERDICT_PASS, None, (INTEGRABILITY_NOTE,)))
    )
    conclusion = is_complete(join(c1, c2), m, SubmodelRef.full(m))
    return TheoremReport("cks-rewrite", tuple(hyps), conclusion)


def _connectedness_report(m: FiniteModel, family) -> CheckReport:
    """Connectivity of the graph on parameters with an edge whenever two
    parameters share an exhaustion piece."""
    n = m.num_params
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, exh in family:
        for _, piece in exh.pieces:
            first = piece.param_indices[0]
            for other in piece.param_indices[1:]:
                ra, rb = find(first), find(other)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(i) for i in range(n)})
    if len(roots) == 1:
        return CheckReport("connected", VERDICT_PASS, None, ())
    witness = {"components": tuple(m.params[r] for r in roots)}
    return CheckReport("connected", VERDICT_FAIL, witness, ())


def verify_homogeneous_connected(
    m: FiniteModel,
    family: Sequence[tuple[Partition, Exhaustion]],
    mode: str,
    *,
    weak: bool = False,
) -> TheoremReport:
    """For a homogeneous model with connected exhaustions, the per-piece
    property of each partition (sufficient, minimal sufficient, or
    complete sufficient, per ``mode``) transfers to the join.

    ``weak`` implements the two-partition grid refinement for
    mode="sufficient": sufficiency of the second partition is required for
    just one piece of its exhaustion.
    """
    if mode not in ("sufficient", "minimal", "complete"):
        raise ValueError(f"unknown mode {mode!r}")
    if weak and (mode != "sufficient" or len(family) != 2):
        raise ValueError("weak form applies to mode='sufficient' with two partitions")

    def piece_check(part: Partition, piece: SubmodelRef) -> CheckReport:
        if mode == "sufficient":
            return is_sufficient(part, m, piece)
        if mode == "minimal":
            return is_minimal_sufficient(part, m, piece)
        return combine_reports(
            "complete-sufficient",
            is_complete(part, m, piece),
            is_sufficient(part, m, piece),
        )

    hyps: list[tuple[str, CheckReport]] = [
        ("homogeneous", is_homogeneous(m, SubmodelRef.full(m))),
        ("connected", _connectedness_report(m, family)),
    ]
    joined: Partition | None = None
    for i, (part, exh) in enumerate(family):
        exh.validate(m)
        joined = part if joined is None else join(joined, part)
        if weak and i == 1:
            results = [(eta, piece_check(part, piece)) for eta, piece in exh.pieces]
            passing = [eta for eta, r in results if r.passed]
            verdict = VERDICT_PASS if passing else VERDICT_FAIL
            notes = tuple(f"piece {eta}: {r.verdict}" for eta, r in results)
            hyps.append(
                (
                    f"C{i + 1} {mode}[some piece]",
                    CheckReport(f"{mode}-somewhere", verdict, None, notes),
                )
            )
            continue
        for eta, piece in exh.pieces:
            hyps.append((f"C{i + 1} {mode}[{exh.label}={eta}]", piece_check(part, piece)))
    if joined is None:
        raise ExhaustionError("family must contain at least one partition")
    full = SubmodelRef.full(m)
    if mode == "sufficient":
        conclusion = is_sufficient(joined, m, full)
    elif mode == "minimal":
        conclusion = is_minimal_sufficient(joined, m, full)
    else:
        conclusion = combine_reports(
            "complete-sufficient", is_complete(joined, m, full), is_sufficient(joined, m, full)
        )
    return TheoremReport(f"homogeneous-connected[{mode}]", tuple(hyps), conclusion)


def _stability_report(m0: FiniteModel, events) -> CheckReport:
    evs = [frozenset(e) for e in events]
    bad = check_intersection_stable(evs)
    if bad is None:
        return CheckReport("events-intersection-stable", VERDICT_PASS, None, ())
    i, j = bad
    witness = {"events": (event_label(m0, evs[i]), event_label(m0, evs[j]))}
    return CheckReport("events-intersection-stable", VERDICT_FAIL, witness, ())


def verify_truncation_family(m0: FiniteModel, events, n: int) -> TheoremReport:
    """For an intersection-stable event list, the sigma-algebra generated
    by the event powers is sufficient and complete for the family of
    event-conditioned i.i.d. powers."""
    hyps = [("events-intersection-stable", _stability_report(m0, events))]
    model, sig = truncated_family(m0, events, n, require_stable=False)
    full = SubmodelRef.full(model)
    conclusion = combine_reports(
        "complete-sufficient",
        is_complete(sig, model, full),
        is_sufficient(sig, model, full),
    )
    return TheoremReport("truncation-family", tuple(hyps), conclusion)


def truncation_exhaustions(
    m0: FiniteModel, model: FiniteModel
) -> tuple[Exhaustion, Exhaustion]:
    """The two canonical exhaustions of a truncated family: pieces fixing
    the event, and pieces fixing the base parameter."""
    base_width = len(flatten_label(m0.params[0]))
    by_event: dict[str, list[int]] = {}
    by_param: dict[tuple, list[int]] = {}
    for i, lab in enumerate(model.params):
        flat = flatten_label(lab)
        by_event.setdefault(flat[base_width], []).append(i)
        by_param.setdefault(flat[:base_width], []).append(i)
    ev_pieces = tuple(
        (label, SubmodelRef(tuple(idx))) for label, idx in by_event.items()
    )
    par_pieces = tuple(
        (",".join(label), SubmodelRef(tuple(idx))) for label, idx in by_param.items()
    )
    return Exhaustion("fix-event", ev_pieces), Exhaustion("fix-base-param", par_pieces)


def verify_unknown_truncation(
    m0: FiniteModel, c: Partition, events, n: int
) -> TheoremReport:
    """Complete sufficiency survives truncation by an unknown event: when
    the event list is intersection-stable and ``c`` (a partition of the
    n-fold power space) is complete sufficient for the power family, the
    join of ``c`` with the event-power sigma-algebra is complete
    sufficient for the truncated family.

    The proof route (weighting permanence along fixed events, plus the
    truncation-family result along fixed base parameters, combined by
    joint completeness) is re-run and its status recorded in the notes.
    """
    powered = power_model(m0, n)
    full_pow = SubmodelRef.full(powered)
    hyps = [
        ("events-intersection-stable", _stability_report(m0, events)),
        (
            "base-complete-sufficient",
            combine_reports(
                "complete-sufficient",
                is_complete(c, powered, full_pow),
                is_sufficient(c, powered, full_pow),
            ),
        ),
    ]
    model, sig = truncated_family(m0, events, n, require_stable=False)
    full = SubmodelRef.full(model)
    joined = join(c, sig)
    conclusion = combine_reports(
        "complete-sufficient",
        is_complete(joined, model, full),
        is_sufficient(joined, model, full),
    )
    by_event, by_param = truncation_exhaustions(m0, model)
    route = verify_joint_completeness(model, [(c, by_event), (sig, by_param)])
    conclusion = conclusion.with_notes(
        f"joint-completeness proof route status: {route.status}"
    )
    return TheoremReport("unknown-truncation", tuple(hyps), conclusion)


def verify_smith(
    m: FiniteModel, c: Partition, q: RationalFunction, mode: str = "b"
) -> TheoremReport:
    """Permanence of (complete) sufficiency under a fixed nonnegative
    weighting: mode "a" carries sufficiency to the weighted model, mode
    "b" carries complete sufficiency."""
    if mode not in ("a", "b"):
        raise ValueError(f"unknown mode {mode!r}")
    full = SubmodelRef.full(m)
    hyps: list[tuple[str, CheckReport]] = [("sufficient-for-base", is_sufficient(c, m, full))]
    if mode == "b":
        hyps.append(("complete-for-base", is_complete(c, m, full)))
    weighted = weighted_model(m, q)
    wfull = SubmodelRef.full(weighted)
    if mode == "a":
        conclusion = is_sufficient(c, weighted, wfull)
    else:
        conclusion = combine_reports(
            "complete-sufficient",
            is_complete(c, weighted, wfull),
            is_sufficient(c, weighted, wfull),
        )
    return TheoremReport(f"smith-weighting[{mode}]", tuple(hyps), conclusion)


def verify_bondesson(
    m: FiniteModel, exhaustion: Exhaustion, g: RationalFunction
) -> TheoremReport:
    """Piecewise optimality implies optimality: an estimator optimal
    unbiased in every piece of an exhaustion is optimal unbiased in the
    whole model."""
    exhaustion.validate(m)
    hyps = [
        (f"optimal[{exhaustion.label}={eta}]", is_optimal_unbiased(g, m, piece))
        for eta, piece in exhaustion.pieces
    ]
    conclusion = is_optimal_unbiased(g, m, SubmodelRef.full(m))
    return TheoremReport("bondesson", tuple(hyps), conclusion)
