"""Acceptance criteria, one line each.

All comparisons are exact (residuals must normalize to 0, counts must be
equal); there are no numeric tolerances to pin.
"""
import json
import random
import shutil
import subprocess
import sys

import pytest

from qinstanton import instanton as inst
from qinstanton import ncengine as nc
from qinstanton import oracles
from qinstanton import qalgebras as qa
from qinstanton import qforms as qf
from qinstanton import rmatrix as rm
from qinstanton.scalar import ONE, PMode

TOLERANCE = 0  # exact arithmetic throughout
SEED = 20240601
RANDOM_DATA = 20


def _report(capsys, n, parts):
    ok = all(v for _, v in parts)
    bad = [k for k, v in parts if not v]
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
    if bad:
        line += "  (failing: " + "; ".join(bad) + ")"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_1_rmatrix(capsys):
    parts = []
    GL = qa.build(qa.AlgebraId.GL2q)
    F = nc.Presentation("free", list(qa.G4))
    M = rm.GeneratorMatrix.named("g")
    rels = [F.poly({r.lhs: ONE, **{w: -c for w, c in r.rhs.terms.items()}}) for r in GL.rules]
    for m in PMode:
        Rs = rm.build_rmatrices(m)
        for name, R, R21 in (("R12", Rs.R12, Rs.R21), ("RI", Rs.RI, Rs.RI21), ("RJ", Rs.RJ, Rs.RJ21)):
            parts.append((f"{m.value} {name} Hecke", rm.check_hecke(R, m, R21)))
            Pp, Pm = rm.build_projectors(R, m)
            parts.append((f"{m.value} {name} projectors",
                          (Pp @ Pp - Pp).is_zero() and (Pm @ Pm - Pm).is_zero()
                          and (Pp + Pm - rm.identity(4)).is_zero() and (Pp @ Pm).is_zero()
                          and (Pm @ Pp).is_zero()))
        parts.append((f"{m.value} RI tabulated", (Rs.RI - Rs.RI_tab).is_zero()))
        parts.append((f"{m.value} RJ tabulated", (Rs.RJ - Rs.RJ_tab).is_zero()))
    for m in PMode:
        rtt = rm.expand_matrix_relation(rm.r12(m), M, M, F)
        a, b, ab = rm.span_rank(rtt, F), rm.span_rank(rels, F), rm.span_rank(rtt + rels, F)
        parts.append((f"{m.value} RTT span = GL2q span", a == b == ab))
    _report(capsys, 1, parts)


def test_criterion_2_confluence(capsys):
    parts = []
    for aid, m in qa.catalog_ids():
        P = qa.build(aid, m)
        tag = aid.value + (f"[{m.value}]" if m else "")
        parts.append((f"{tag} confluent to 4", nc.check_local_confluence(P, 4) == []))
        parts.append((f"{tag} added rules are installed", all(w in P._rules for w in P.added_rules)))
    for aid in (qa.AlgebraId.GL2q, qa.AlgebraId.MIq, qa.AlgebraId.MJq):
        parts.append((f"{aid.value} no added rules", qa.build(aid).added_rules == []))
    _report(capsys, 2, parts)


def test_criterion_3_realizations(capsys):
    parts = [("xy", qa.verify_xy_realization().passed),
             ("eta", qa.verify_eta().passed),
             ("hopf", qa.verify_hopf_structure().passed)]
    for m in PMode:
        parts.append((f"flag[{m.value}]", qa.verify_flag_realization(m).passed))
        parts.append((f"twistor[{m.value}]", qa.verify_twistor_patches(m).passed))
    _report(capsys, 3, parts)


def test_criterion_4_hilbert(capsys):
    parts = []
    for m in PMode:
        M = qa.build(qa.AlgebraId.Mpq, m)
        comm = oracles.commutative_hilbert(M, 6)
        parts.append((f"Mpq[{m.value}] oracle is the quadric count",
                      [comm[d] for d in range(7)] == [1, 6, 20, 50, 105, 196, 336]))
        parts.append((f"Mpq[{m.value}] = oracle", nc.hilbert_dimensions(M, 6) == comm))
        F = qa.build(qa.AlgebraId.Fpq, m)
        parts.append((f"Fpq[{m.value}] bidegrees = oracle",
                      nc.hilbert_dimensions(F, 4, multigraded=True)
                      == oracles.commutative_hilbert(F, 4, multigraded=True)))
    _report(capsys, 4, parts)


def test_criterion_5_forms(capsys):
    parts = []
    for m in PMode:
        for patch in (qf.Patch.GL, qf.Patch.MI, qf.Patch.MJ):
            dga = qf.build_dga(patch, m)
            tag = f"{patch.value}[{m.value}]"
            ok = True
            for pair in dga.pair_words():
                w = qf.FormElement(dga, dga.pres.poly({pair: ONE}), 2)
                ok &= qf.hodge_star(qf.hodge_star(w)) == w
            parts.append((f"{tag} *^2 = id", ok))
            parts.append((f"{tag} Leibniz on 100 pairs", qf.leibniz_consistency(dga, 100, SEED) == []))
            if patch is qf.Patch.GL:
                continue
            for kind in ("sd", "asd"):
                parts.append((f"{tag} {kind.upper()} basis = printed basis",
                              qf.same_span(qf.printed_basis(dga, kind),
                                           qf.eigenbasis(dga, kind), dga)))
    _report(capsys, 5, parts)


def _data():
    rng = random.Random(SEED)
    return [inst.reference_datum()] + [inst.random_adhm_datum(rng) for _ in range(RANDOM_DATA)]


def test_criterion_6_instanton(capsys):
    parts = []
    rng = random.Random(SEED + 1)
    complex_ok = stcost = gauge = rank = disp = sd_zero = True
    for d in _data():
        r1, r2 = inst.check_adhm_equations(d)
        for patch in ("I", "J"):
            complex_ok &= inst.verify_complex(inst.build_monad(d, patch), d).passed
        # the converse: break each equation and the monad identities must fail
        broken = inst.AdhmDatum(d.n, d.c, d.B1, d.B2, d.i + d.i, d.j)
        rb1, rb2 = inst.check_adhm_equations(broken)
        mb = inst.build_monad(broken, "I")
        ba = inst._mat_mul(mb.beta, mb.alpha, mb.pres)
        complex_ok &= all(e.is_zero() for r in ba for e in r) == rb1.is_zero()
        complex_ok &= inst.verify_complex(mb, broken).passed
        reg = inst.check_regularity(d)
        stcost &= reg["stable"] == reg["costable"]
        g = inst.random_unitary(d.c, rng)
        for patch in ("I", "J"):
            gauge &= inst.verify_gauge_diagram(g, d, patch).passed
        if reg["stable"] and reg["costable"]:
            rank &= inst.pointwise_rank_oracle(d).passed
        rep = inst.curvature_asd_check(d, "I", PMode.P_EQ_Q)
        disp &= all(r.is_zero() for l, r in rep.residuals if l.endswith("- display")
                    and not l.startswith("q=1"))
        sd_zero &= all(r.is_zero() for l, r in rep.residuals if l.startswith("SD part"))
    parts += [("monad complex both directions", complex_ok), ("stable = costable", stcost),
              ("gauge diagram", gauge), ("rank oracle", rank),
              ("curvature = display", disp), ("SD projection = 0", sd_zero)]
    _report(capsys, 6, parts)


def test_criterion_7_gluing(capsys):
    d = inst.reference_datum()
    parts = []
    for variant in ("realization", "printed"):
        g = inst.verify_consistency_gluing(d, window=4, variant=variant)
        documented = (g.found and any("twist rows" in n for n in g.report.notes)) or \
            (not g.found and bool(g.obstructions) and all(o in g.report.notes for o in g.obstructions))
        parts.append((f"{variant} terminated and documented", g.report.passed and documented))
    _report(capsys, 7, parts)


def test_criterion_8_cli(capsys, tmp_path):
    exe = shutil.which("qst")
    cmd = [exe] if exe else [sys.executable, "-m", "qinstanton.cli"]
    outs = []
    rcs = []
    for k in range(2):
        p = tmp_path / f"all{k}.json"
        proc = subprocess.run(cmd + ["verify", "--suite", "all", "--seed", str(SEED),
                                     "--json", str(p), "--no-timings", "--quiet"],
                              capture_output=True, text=True)
        rcs.append(proc.returncode)
        outs.append(p.read_bytes() if p.exists() else b"")
    data = json.loads(outs[0] or b"{}")
    parts = [("exit 0", rcs == [0, 0]), ("deterministic JSON", outs[0] == outs[1] and outs[0] != b""),
             ("schema 1", data.get("schema") == 1), ("seed recorded", data.get("seed") == SEED)]
    _report(capsys, 8, parts)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
