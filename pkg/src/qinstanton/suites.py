"""Verification suites and the versioned report model.

Every check produces a :class:`StructureReport`.  A check whose failures
are all covered by a registered deviation is reported with status
``"deviation"``: the artifact computed the quantity and it disagrees with
the printed formula in a documented way.  Any other failure is ``"fail"``.
``strict`` mode treats deviations as failures.
"""
from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass, field

from . import instanton as inst
from . import ncengine as nc
from . import oracles
from . import qalgebras as qa
from . import qforms
from . import rmatrix as rm
from .kernels import BACKEND
from .scalar import PMode

__all__ = ["SUITES", "Deviation", "CheckResult", "SuiteReport", "run_suite", "DEFAULT_SEED"]

SCHEMA = 1
DEFAULT_SEED = 20240601
SUITES = ("rmatrix", "algebra", "forms", "adhm", "twistor")


@dataclass(frozen=True)
class Deviation:
    """Failures of ``check`` matching ``labels`` are known disagreements with printed formulas."""

    check: str
    labels: str
    reason: str

    def covers(self, check_name: str, label: str) -> bool:
        return re.fullmatch(self.check, check_name) is not None and \
            re.fullmatch(self.labels, label) is not None


DEVIATIONS = (
    Deviation(r"eta\[printed\]", r".*",
              "the adjugate coordinate formulas do not respect the patch relations; "
              "the realization variant is the gluing map"),
    Deviation(r"flag_printed\[.*\]", r".*",
              "printed derivation weight exponent and two printed flag relations differ "
              "from what the realization forces"),
    Deviation(r"twistor_patches\[symmetric\]", r".*",
              "symmetric fractions do not give commuting patch coordinates; left fractions do"),
    Deviation(r"hodge\[.*\]", r"\[(q|qinv)\] (MI ASD|MJ SD) entries span the printed basis",
              "projector images carry q-deformed third basis elements; they agree with the "
              "printed ones only at q = 1"),
    Deviation(r"curvature\[I,.*\]", r"(SD part of )?F\[\d+,\d+\]( - display)?",
              "diagonal curvature entries are ASD only at q = 1; off-diagonal entries, the "
              "W block and all classical limits agree with the display"),
    Deviation(r"curvature\[J,.*\]", r"(q=1: )?SD part of F\[\d+,\d+\]",
              "with the printed patch J monad the curvature is self-dual for the patch J "
              "Hodge operator, already at q = 1 (opposite orientation)"),
)


@dataclass
class CheckResult:
    name: str
    status: str
    relations: int
    failures: list
    notes: list
    seconds: float
    deviation: str = ""

    def to_dict(self, timings=True) -> dict:
        d = {"check": self.name, "status": self.status, "relations": self.relations,
             "failures": self.failures, "notes": self.notes}
        if self.deviation:
            d["deviation"] = self.deviation
        if timings:
            d["seconds"] = round(self.seconds, 4)
        return d


@dataclass
class SuiteReport:
    suite: str
    modes: list
    seed: int
    strict: bool
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        bad = ("fail", "deviation") if self.strict else ("fail",)
        return all(c.status not in bad for c in self.checks)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "deviation": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def to_dict(self, timings=True) -> dict:
        return {"schema": SCHEMA, "suite": self.suite, "modes": self.modes, "seed": self.seed,
                "strict": self.strict, "pass": self.passed, "counts": self.counts(),
                "engine": self.metadata, "checks": [c.to_dict(timings) for c in self.checks]}

    @classmethod
    def from_dict(cls, d) -> "SuiteReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        rep = cls(d["suite"], list(d["modes"]), d["seed"], d["strict"], metadata=d["engine"])
        for c in d["checks"]:
            rep.checks.append(CheckResult(c["check"], c["status"], c["relations"], c["failures"],
                                          c["notes"], c.get("seconds", 0.0), c.get("deviation", "")))
        return rep

    def lines(self):
        for c in self.checks:
            tag = {"pass": "PASS", "fail": "FAIL", "deviation": "DEVIATION"}[c.status]
            yield f"{tag:9} {c.name} ({c.relations} checks)"
            for f in c.failures[:5]:
                yield f"          {f['relation']}: {f['residual']}"
            if len(c.failures) > 5:
                yield f"          ... {len(c.failures) - 5} more"
            if c.deviation:
                yield f"          known deviation: {c.deviation}"


def classify(rep: qa.StructureReport, seconds: float) -> CheckResult:
    fails = rep.failures()
    status, why = "pass", ""
    if fails:
        devs = []
        for label, _ in fails:
            hit = next((d for d in DEVIATIONS if d.covers(rep.name, label)), None)
            if hit is None:
                devs = None
                break
            devs.append(hit)
        if devs:
            status, why = "deviation", devs[0].reason
        else:
            status = "fail"
    summ = rep.summary()
    return CheckResult(rep.name, status, summ["relations"], summ["failures"], summ["notes"],
                       seconds, why)


class _Runner:
    def __init__(self, report: SuiteReport):
        self.report = report

    def run(self, fn, *args, **kw):
        t = time.perf_counter()
        rep = fn(*args, **kw)
        self.report.checks.append(classify(rep, time.perf_counter() - t))
        return rep


def _flag_matrix(rep, label, M: rm.RMat):
    nz = [f"[{r + 1},{c + 1}]={M[r, c]}" for r in range(M.shape[0]) for c in range(M.shape[1])
          if M[r, c]]
    rep.add_flag(label, not nz, "; ".join(nz[:4]))


# -- rmatrix ---------------------------------------------------------------------


def rmatrix_checks(mode: PMode) -> qa.StructureReport:
    rep = qa.StructureReport(f"rmatrix[{mode.value}]")
    Rs = rm.build_rmatrices(mode)
    for name, R, R21 in (("R12", Rs.R12, Rs.R21), ("RI", Rs.RI, Rs.RI21), ("RJ", Rs.RJ, Rs.RJ21)):
        a, b = rm.hecke_residuals(R, mode, R21)
        _flag_matrix(rep, f"{name}: R - R21^-1 - (1/p - p) P", a)
        _flag_matrix(rep, f"{name}: (PR)^2 - (1/p - p) PR - 1", b)
        _flag_matrix(rep, f"{name}: Yang-Baxter", rm.yang_baxter_residual(R))
        Pp, Pm = rm.build_projectors(R, mode)
        _flag_matrix(rep, f"{name}: P+^2 - P+", Pp @ Pp - Pp)
        _flag_matrix(rep, f"{name}: P-^2 - P-", Pm @ Pm - Pm)
        _flag_matrix(rep, f"{name}: P+ + P- - 1", Pp + Pm - rm.identity(4))
        _flag_matrix(rep, f"{name}: P+ P-", Pp @ Pm)
    _flag_matrix(rep, "RI from Q-conjugation - tabulated", Rs.RI - Rs.RI_tab)
    _flag_matrix(rep, "RJ from Q-conjugation - tabulated", Rs.RJ - Rs.RJ_tab)
    GL = qa.build(qa.AlgebraId.GL2q)
    F = nc.Presentation("free", list(qa.G4))
    M = [[F.gen(qa.G4[0]), F.gen(qa.G4[1])], [F.gen(qa.G4[2]), F.gen(qa.G4[3])]]
    rtt = [e for e in rm.expand_matrix_relation(Rs.R12, M, M, F) if not e.is_zero()]
    rels = [F.poly({r.lhs: rm.as_scalar(1), **{w: -c for w, c in r.rhs.terms.items()}})
            for r in GL.rules]
    a, b, ab = rm.span_rank(rtt, F), rm.span_rank(rels, F), rm.span_rank(rtt + rels, F)
    rep.add_flag("RTT span equals the GL2q relation span", a == b == ab,
                 f"ranks {a}, {b}, joint {ab}")
    rep.notes.append(f"RTT entries nonzero: {len(rtt)}, span rank {a}")
    return rep


# -- algebra ------------------------------------------------------------------------


def confluence_checks(modes) -> qa.StructureReport:
    rep = qa.StructureReport("confluence")
    for aid, m in qa.catalog_ids():
        if m is not None and m not in modes:
            continue
        P = qa.build(aid, m)
        ambs = nc.check_local_confluence(P, 4)
        tag = f"{aid.value}" + (f"[{m.value}]" if m else "")
        rep.add_flag(f"{tag}: no ambiguities up to length 4", not ambs, f"{len(ambs)} ambiguities")
        if P.added_rules:
            rep.notes.append(f"{tag}: completion added "
                             + ", ".join(P.word_str(w) for w in P.added_rules))
        if not P.confluent:
            rep.notes.append(f"{tag}: certified up to degree {P.completion_degree}")
    return rep


def hilbert_checks(mode: PMode) -> qa.StructureReport:
    rep = qa.StructureReport(f"hilbert[{mode.value}]")
    M = qa.build(qa.AlgebraId.Mpq, mode)
    nc_counts = nc.hilbert_dimensions(M, 6)
    comm = oracles.commutative_hilbert(M, 6)
    rep.add_flag("Mpq: normal words = commutative quotient, degrees 0..6", nc_counts == comm,
                 f"{nc_counts} vs {comm}")
    rep.add_flag("Mpq: commutative quotient = one quadric in six variables",
                 comm == oracles.quadric_counts(6, 6), str(comm))
    F = qa.build(qa.AlgebraId.Fpq, mode)
    ncb = nc.hilbert_dimensions(F, 4, multigraded=True)
    cb = oracles.commutative_hilbert(F, 4, multigraded=True)
    rep.add_flag("Fpq: bidegree counts = commutative specialization, total degree <= 4",
                 ncb == cb, f"{sorted(ncb.items())} vs {sorted(cb.items())}")
    rep.notes.append("Mpq: " + ", ".join(str(nc_counts[d]) for d in range(7)))
    return rep


def algebra_suite(run: _Runner, modes):
    run.run(confluence_checks, modes)
    run.run(qa.verify_xy_realization)
    run.run(qa.verify_hopf_structure)
    run.run(qa.verify_sphere_involution)
    run.run(qa.verify_eta, "realization")
    run.run(qa.verify_eta, "printed")
    for m in modes:
        run.run(qa.verify_flag_realization, m)
        run.run(_flag_printed, m)
        run.run(hilbert_checks, m)


def _flag_printed(mode):
    rep = qa.flag_discrepancies(mode)
    rep.name = f"flag_printed[{mode.value}]"
    return rep


# -- forms -----------------------------------------------------------------------------


def leibniz_checks(mode: PMode, seed: int) -> qa.StructureReport:
    rep = qa.StructureReport(f"leibniz[{mode.value}]")
    for p in qforms.Patch:
        bad = qforms.leibniz_consistency(qforms.build_dga(p, mode), pairs=100, seed=seed)
        rep.add_flag(f"{p.value}: d(fg) = d(f)g + (-1)^|f| f d(g) on 100 random pairs", not bad,
                     f"{len(bad)} failures")
    return rep


def forms_suite(run: _Runner, modes, seed):
    for m in modes:
        run.run(_form_modules, m)
        run.run(_hodge, m)
        run.run(leibniz_checks, m, seed)


def _form_modules(mode):
    rep = qforms.verify_form_modules(mode)
    rep.name = f"form_modules[{mode.value}]"
    return rep


def _hodge(mode):
    rep = qforms.verify_hodge(mode)
    rep.name = f"hodge[{mode.value}]"
    return rep


# -- twistor ------------------------------------------------------------------------------


def twistor_suite(run: _Runner, modes):
    for m in modes:
        run.run(_twistor, m, "left")
        run.run(_twistor, m, "symmetric")


def _twistor(mode, coords):
    rep = qa.verify_twistor_patches(mode, coords)
    rep.name = f"twistor_patches[{coords}]"
    rep.notes.append(f"mode {mode.value}")
    return rep


# -- adhm ------------------------------------------------------------------------------------


def adhm_data(seed: int, count: int = 20, files=()):
    """Reference datum, data read from files, then ``count`` random solutions."""
    data = [("reference", inst.reference_datum())]
    for f in files:
        data.append((str(f), inst.read_adhm(f)))
    rng = random.Random(seed)
    for k in range(count):
        data.append((f"random{k}", inst.random_adhm_datum(rng)))
    return data


def adhm_datum_checks(label, d, seed) -> qa.StructureReport:
    rep = qa.StructureReport(f"adhm[{label}]")
    r1, r2 = inst.check_adhm_equations(d)
    reg = inst.check_regularity(d)
    rep.notes.append(f"c={d.c} n={d.n} res1={'0' if r1.is_zero() else r1} "
                     f"res2={'0' if r2.is_zero() else r2} stable={reg['stable']} "
                     f"costable={reg['costable']}")
    if r1.is_zero() and r2.is_zero():
        rep.add_flag("stable = costable", reg["stable"] == reg["costable"])
    for patch in ("I", "J"):
        sub = inst.verify_complex(inst.build_monad(d, patch), d)
        for l, r in sub.residuals:
            rep.residuals.append((f"{patch}: {l}", r))
    rng = random.Random(seed)
    g = inst.random_unitary(d.c, rng) if d.c else inst.GMat.eye(0)
    for patch in ("I", "J"):
        sub = inst.verify_gauge_diagram(g, d, patch)
        for l, r in sub.residuals:
            rep.residuals.append((f"gauge {patch}: {l}", r))
    if reg["stable"] and reg["costable"]:
        pts = inst.random_points(25, seed)
        for patch in ("I",):
            rk = inst.pointwise_rank_oracle(d, pts, 1, patch)
            rep.add_flag(f"{patch}: full rank at 25 points (q=1)", rk.passed,
                         f"{len(rk.drops)} drops")
            rk2 = inst.pointwise_rank_oracle(inst.gauge_act(g, d), pts, 1, patch)
            rep.add_flag(f"{patch}: rank profile gauge invariant",
                         (rk.beta_ranks, rk.alpha_ranks) == (rk2.beta_ranks, rk2.alpha_ranks))
    return rep


def curvature_invariance(data, mode) -> qa.StructureReport:
    """The V+V block of the curvature is the same matrix (times identity) for every datum."""
    rep = qa.StructureReport(f"curvature_block[{mode.value}]")
    ref = None
    for label, d in data:
        if d.c == 0:
            continue
        dga, F = inst.curvature_matrix(d, "I", mode)
        c = d.c
        block = [[F[r * c][k * c] for k in range(2)] for r in range(2)]
        if ref is None:
            ref = block
            rep.notes.append("block: " + "; ".join(str(e) for row in block for e in row))
        for r in range(2):
            for k in range(2):
                rep.add(f"{label}: block[{r + 1},{k + 1}] - reference", (block[r][k] - ref[r][k]).poly)
        off = [F[a][b] for a in range(2 * c + d.n) for b in range(2 * c + d.n)
               if not (a < 2 * c and b < 2 * c and a % c == b % c)]
        rep.add_flag(f"{label}: identity scaling inside V+V, zero elsewhere",
                     all(x.is_zero() for x in off))
    return rep


def gluing_checks(d) -> qa.StructureReport:
    out = qa.StructureReport("gluing")
    for variant in qa.ETA_VARIANTS:
        g = inst.verify_consistency_gluing(d, variant=variant)
        for l, r in g.report.residuals:
            out.residuals.append((f"{variant}: {l}", r))
        out.notes.extend(f"{variant}: {n}" for n in g.report.notes)
        out.add_flag(f"{variant}: outcome documented",
                     g.found or bool(g.obstructions), "twist found" if g.found else "obstruction")
    return out


def adhm_suite(run: _Runner, modes, seed, files=()):
    data = adhm_data(seed, 20, files)
    for label, d in data:
        run.run(adhm_datum_checks, label, d, seed)
    for m in modes:
        for patch in ("I", "J"):
            run.run(inst.curvature_asd_check, data[0][1], patch, m)
        run.run(curvature_invariance, data[:11], m)
    run.run(gluing_checks, data[0][1])


# -- entry point ----------------------------------------------------------------------------


def run_suite(name: str, mode: PMode | None = None, seed: int = DEFAULT_SEED, adhm_files=(),
              strict: bool = False) -> SuiteReport:
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}; choose from {SUITES + ('all',)}")
    modes = [mode] if mode is not None else list(PMode)
    report = SuiteReport(name, [m.value for m in modes], seed, strict)
    report.metadata = {"backend": BACKEND, "completion_degree": nc.DEFAULT_COMPLETION_DEGREE,
                       "pmodes": [m.value for m in modes]}
    run = _Runner(report)
    for n in names:
        if n == "rmatrix":
            for m in modes:
                run.run(rmatrix_checks, m)
        elif n == "algebra":
            algebra_suite(run, modes)
        elif n == "forms":
            forms_suite(run, modes, seed)
        elif n == "twistor":
            twistor_suite(run, modes)
        elif n == "adhm":
            adhm_suite(run, modes, seed, adhm_files)
    return report
