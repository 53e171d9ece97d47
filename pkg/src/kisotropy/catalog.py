"""Built-in worked pairs with golden report fragments."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import HypothesisRefusal, NotApplicable
from .formality import equivariant_cohomology, st_battery
from .ktheory import (assemble_ktheory, classify_pair, iota_image_comparison, ordinary_ktheory,
                      tor0_fiber_dimensions)
from .lie import pair_from_descriptor


@dataclass
class Golden:
    path: str                # dotted path into the run result
    expected: object
    tag: str                 # provenance, e.g. "[LITERATURE]" or "[DERIVED]"


@dataclass
class CatalogEntry:
    name: str
    descriptor: dict
    golden: list
    source: str = ""
    auxiliary: bool = False
    window: int = 3

    def pair(self):
        return pair_from_descriptor(self.descriptor)

    def to_json(self):
        return {"name": self.name, "descriptor": self.descriptor, "source": self.source,
                "auxiliary": self.auxiliary,
                "golden": [{"path": g.path, "expected": g.expected, "tag": g.tag} for g in self.golden]}


def _entry(name, descriptor, golden, source, **kw):
    return CatalogEntry(name, descriptor, [Golden(*g) for g in golden], source, **kw)


ENTRIES = [
    _entry("SO3-SO2",
           {"ambient": "SO(3)", "subgroup": "SO(2)", "restriction": [[1]], "label": "(SO(3), SO(2))"},
           [("classification.case", "not_covered", "[LITERATURE]"),
            ("classification.pi1_torsion", [2], "[LITERATURE]"),
            ("tor0_fiber_dimension", 2, "[LITERATURE]"),
            ("iota.witness", "(1, t)", "[DERIVED]"),
            ("formality.isotropy_formal", True, "[DERIVED]")],
           "SO(3): pi_1 = Z/2 and lambda is not onto"),
    _entry("SU2-T",
           {"ambient": "SU(2)", "subgroup": "T1", "restriction": [[1]], "label": "(SU(2), T)"},
           [("classification.case", "equal_rank", "[TRIVIAL]"),
            ("tor0_fiber_dimension", 2, "[DERIVED]"),
            ("ktheory.exterior_rank", 0, "[TRIVIAL]"),
            ("ordinary.dimension", 2, "[DERIVED]"),
            ("iota.witness", None, "[DERIVED]"),
            ("formality.isotropy_formal", True, "[DERIVED]"),
            ("formality.fpdim.dim_H_G_mod_K", 2, "[DERIVED]"),
            ("cohomology.factored", "(1 + t^2)/(1 - t^2)", "[DERIVED]")],
           "equal-rank case for the smallest flag manifold"),
    _entry("SU3-T",
           {"ambient": "SU(3)", "subgroup": "T2", "label": "(SU(3), T)"},
           [("classification.case", "equal_rank", "[TRIVIAL]"),
            ("tor0_fiber_dimension", 6, "[DERIVED]"),
            ("ordinary.dimension", 6, "[DERIVED]"),
            ("formality.isotropy_formal", True, "[DERIVED]"),
            ("formality.normalizer.order", 6, "[DERIVED]")],
           "equal-rank case, |W| = 6"),
    _entry("PSU3-T",
           {"ambient": "PSU(3)", "subgroup": "T2", "label": "(PSU(3), T)"},
           [("classification.case", "not_covered", "[LITERATURE]"),
            ("classification.pi1_torsion", [3], "[DERIVED]"),
            ("classification.certificates.freeness.free", False, "[LITERATURE]"),
            ("formality.isotropy_formal", True, "[DERIVED]")],
           "RT is not free over RPSU(3) rationally"),
    _entry("SU4-Sp2",
           {"ambient": "SU(4)", "subgroup": "Sp(2)", "restriction": [[1, 0, 1], [0, 1, 0]],
            "flags": {"sigma_pair": True}, "label": "(SU(4), Sp(2))"},
           [("classification.case", "surjective", "[DERIVED]"),
            ("classification.pi1_free_abelian", True, "[TRIVIAL]"),
            ("ktheory.exterior_rank", 1, "[LITERATURE]"),
            ("ordinary.dimension", 2, "[DERIVED]"),
            ("formality.isotropy_formal", True, "[DERIVED]"),
            ("cohomology.exterior_degrees", [5], "[DERIVED]")],
           "sigma-pair (SU(2n), Sp(n)) with n = 2"),
    _entry("SU4-circle",
           {"ambient": "SU(4)", "subgroup": "T1", "restriction": [[1, 0, 2]],
            "label": "(SU(4), diag(z, 1/z, z^2, 1/z^2))"},
           [("classification.case", "not_covered", "[LITERATURE]"),
            ("classification.reason", "RH not free over image", "[LITERATURE]"),
            ("formality.isotropy_formal", True, "[DERIVED]"),
            ("formality.normalizer.order", 2, "[DERIVED]")],
           "circle example: RH cannot be free over the image of RG"),
    _entry("GG",
           {"ambient": "SU(3)", "subgroup": "SU(3)", "label": "(SU(3), SU(3))"},
           [("classification.case", "surjective", "[TRIVIAL]"),
            ("ktheory.exterior_rank", 0, "[TRIVIAL]"),
            ("ordinary.dimension", 1, "[TRIVIAL]"),
            ("formality.isotropy_formal", True, "[TRIVIAL]")],
           "identity pair", auxiliary=True),
]

BY_NAME = {e.name: e for e in ENTRIES}


def entry(name):
    key = name[len("catalog:"):] if name.startswith("catalog:") else name
    if key not in BY_NAME:
        raise KeyError(f"no catalog entry {key!r}; known: {', '.join(BY_NAME)}")
    return BY_NAME[key]


def worked_entries():
    return [e for e in ENTRIES if not e.auxiliary]


def run_entry(e, budget=None, window=None):
    """Evaluate everything the golden data refers to; returns a JSON-ready dict."""
    pair = e.pair()
    hyp = classify_pair(pair, budget)
    out = {"name": e.name, "pair": pair.label, "classification": hyp.to_json()}
    left, right = tor0_fiber_dimensions(pair)
    out["tor0_fiber_dimension"] = left
    out["tor0_fiber_dimension_right"] = right
    try:
        out["ktheory"] = assemble_ktheory(pair, budget, hyp).to_json()
    except HypothesisRefusal as exc:
        out["ktheory"] = {"refused": exc.reason}
    try:
        out["ordinary"] = ordinary_ktheory(pair, budget, hyp).to_json()
    except HypothesisRefusal as exc:
        out["ordinary"] = {"refused": exc.reason}
    rep = st_battery(pair)
    out["formality"] = rep.to_json()
    out["cohomology"] = equivariant_cohomology(pair, rep).to_json() if rep.isotropy_formal else None
    if pair.ambient.rank == 1 and pair.subgroup.semisimple_rank == 0 and pair.is_equal_rank:
        try:
            out["iota"] = iota_image_comparison(pair, window or e.window).to_json()
        except NotApplicable:
            pass
    return out


def lookup(doc, path):
    cur = doc
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            raise KeyError(path)
        cur = cur[part]
    return cur


def check_entry(e, result):
    """[(path, expected, actual, ok, tag)] against the golden fragment."""
    rows = []
    for g in e.golden:
        try:
            actual = lookup(result, g.path)
        except KeyError:
            rows.append((g.path, g.expected, "<missing>", False, g.tag))
            continue
        if isinstance(g.expected, str) and isinstance(actual, str) and g.path.endswith("reason"):
            ok = g.expected in actual
        else:
            ok = actual == g.expected
        rows.append((g.path, g.expected, actual, ok, g.tag))
    return rows
