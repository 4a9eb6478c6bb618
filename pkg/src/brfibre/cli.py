"""Command line interface.

Subcommands: classify, count, evaluate, bound, verdict, cache.  Reports are
stable key = value text with TSV blocks (or --json); --figures DIR mirrors
the report into DIR and renders matplotlib figures next to it.  Exit codes:
0 success, 2 domain error, 3 budget or unsupported feature.
"""

import argparse
import sys
from functools import partial
from math import gcd

from sympy import factorint

from .arith import QZClass
from .bounds import (PAPER_QUARTIC_PRIME_BOUND, QUARTIC_TWO_TORSION_BOUND,
                     bound_report, quartic_threshold_check, size_bound)
from .errors import BrFibreError, TableMiss
from .localinv import evaluation_image, prolific_check, zero_cycle_image
from .model import (FibrePoint, PointCountCache, count_points,
                    find_singular_points, regularity_check)
from .modelfile import load_model_file
from .report import (Report, emit, save_bound_figure, save_class_histogram,
                     save_count_figure)
from .sing import (SingularityType, brauer_table, classify_ade,
                   del_pezzo_degree, local_equation_at)
from .torsor import residue, solutions_for_torsors, codes_on_solutions
from .field import Fq


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def cmd_classify(args):
    model, _ = load_model_file(args.model)
    rep = Report("classify")
    rep.add("model", model.label or model.model_hash())
    rep.add("ambient", model.ambient.describe())
    rep.add("prime", model.prime)
    for i, eq in enumerate(model.equations, 1):
        rep.add(f"equation_{i}", eq.to_text())

    search = find_singular_points(model, max_extension=args.max_extension)
    entries = []
    rows = []
    for pt, degree in search.orbits:
        ade = classify_ade(local_equation_at(model, pt))
        entries.extend([(ade, degree)] * degree)
        regular = "n/a"
        if model.is_hypersurface():
            regular = "true" if regularity_check(model, pt) else "false"
        rows.append((str(pt), f"F_{model.prime}^{degree}" if degree > 1
                     else f"F_{model.prime}", str(ade), regular))
    stype = SingularityType.of(entries)
    rep.add("singular_point_count", len(entries))
    if rows:
        rep.add_table("singular_points", ("point", "field", "type", "regular"), rows)
    certified = search.certificate_ok
    rep.add("singularity_type", stype.label() if certified else
            f"{stype.label()} (uncertified: raise --max-extension)")
    if search.tail_candidates:
        rep.add("unassessed_points",
                "; ".join(str(pt) for pt, _ in search.tail_candidates))

    degree = del_pezzo_degree(model)
    rep.add("del_pezzo_degree", degree if degree is not None else "unknown")
    if not certified:
        rep.add("brauer_table", "n/a (singularity type not certified)")
    elif stype.is_smooth():
        rep.add("brauer_table", "n/a (smooth special fibre)")
    elif degree is None:
        rep.add("brauer_table", "n/a (not a recognised del Pezzo model)")
    else:
        try:
            entry = brauer_table(degree, stype)
            rep.add("br_geometric_fibre", entry.br_bar)
            rep.add("h1_smooth_locus", entry.h1)
            if entry.br_nr is not None:
                rep.add("br_unramified", entry.br_nr)
            else:
                rep.add("br_unramified",
                        f"unresolved extension of order {entry.br_nr_order}")
        except TableMiss as exc:
            rep.add("brauer_table", f"miss ({exc})")
    return rep, []


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------

def _base_locus_model(model):
    """Model of the positive-dimensional part the equations actually cut.

    When the reduced equations omit some variables the fibre is a cone;
    the base sits in the projective space on the variables used.
    """
    used = set()
    for eq in model.reduced_equations():
        used |= eq.involved()
    nv = model.ambient.nvars
    if not used or len(used) == nv:
        return None
    if any(model.ambient.weights[i] != 1 for i in used):
        return None
    from .model import AmbientSpace, ModelSpec
    names = tuple(model.ambient.var_names[i] for i in sorted(used))
    keep = sorted(used)
    base_amb = AmbientSpace(names, tuple(1 for _ in names))
    base_eqs = []
    from .poly import MultiPoly
    for eq in model.reduced_equations():
        terms = {}
        for exps, c in eq.terms.items():
            terms[tuple(exps[i] for i in keep)] = c
        base_eqs.append(MultiPoly(names, terms))
    return ModelSpec(base_amb, base_eqs, model.prime,
                     (model.label + "_base") if model.label else "base")


def cmd_count(args):
    model, _ = load_model_file(args.model)
    cache = PointCountCache(args.cache) if args.cache else None
    ks = [int(s) for s in args.k.split(",")]
    rep = Report("count")
    rep.add("model", model.label or model.model_hash())
    rep.add("prime", model.prime)
    rows = []
    base = _base_locus_model(model)
    base_rows = []
    for k in ks:
        total = count_points(model, k, cache=cache)
        smooth = count_points(model, k, smooth_only=True, cache=cache)
        rows.append((k, total, smooth, total - smooth))
        if base is not None:
            base_rows.append((k, count_points(base, k, cache=cache)))
    rep.add_table("points", ("k", "total", "smooth", "other"), rows)
    if base is not None:
        omitted = [model.ambient.var_names[i]
                   for i in range(model.ambient.nvars)
                   if all(i not in eq.involved() for eq in model.reduced_equations())]
        rep.add("cone_note",
                f"equations omit {', '.join(omitted)}; the fibre is a cone "
                "over the base locus below")
        rep.add_table("base_locus_points", ("k", "count"), base_rows)
    rep.add("cache", args.cache or "off")
    jobs = [("points", lambda path: save_count_figure(
        rows, path, f"points of {model.label or 'model'} (p={model.prime})"))]
    return rep, jobs


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def _draw_histogram(counts, title, path):
    save_class_histogram(counts, path, title)


def cmd_evaluate(args):
    model, algebras = load_model_file(args.model)
    if not algebras:
        raise BrFibreError("model file declares no [algebra] section")
    k = args.k
    rep = Report("evaluate")
    rep.add("model", model.label or model.model_hash())
    rep.add("prime", model.prime)
    rep.add("k", k)
    torsors = [residue(a, model) for a in algebras]
    jobs = []
    for i, (alg, tor) in enumerate(zip(algebras, torsors), 1):
        tag = f"algebra_{i}"
        rep.add(tag, f"({alg.a}, ({alg.f_num.to_text()}) / ({alg.f_den.to_text()})) "
                     f"of order {alg.n}")
        rep.add(f"residue_{i}",
                f"t^{tor.n} = ({tor.reps[0].num.to_text()}) / ({tor.reps[0].den.to_text()})")
        er = evaluation_image(alg, model, k, torsor=tor)
        counts = er.describe_counts()
        rep.add_table(f"invariants_{i}", ("value", "points"),
                      sorted(counts.items()))
        rep.add(f"image_{i}", "{" + ", ".join(sorted(
            str(c) for c in er.image)) + "}")
        rep.add(f"constant_{i}", er.constant)
        rep.add(f"normalization_point_{i}", er.normalization_point)
        rep.add(f"normalization_value_{i}", er.normalization_value)
        rep.add(f"determinate_points_{i}", er.determinate)
        rep.add(f"indeterminate_points_{i}", er.indeterminate)
        rep.add(f"chart_skipped_points_{i}", er.skipped)
        twist_rows = []
        hist = {c.with_denominator(tor.n): n for c, n in er.class_counts.items()}
        for j in range(tor.n):
            want = (-j * k) % tor.n
            twist_rows.append((str(QZClass.of(j, tor.n)),
                               tor.n * hist.get(want, 0)))
        rep.add_table(f"torsor_points_{i}", ("twist", "points"), twist_rows)
        if er.class_counts:
            jobs.append((f"invariants_{i}",
                         partial(_draw_histogram, dict(counts),
                                 f"invariant at p={model.prime}, k={k}")))
    if args.prolific:
        rep.add("prolific", prolific_check(algebras, model, k, torsors=torsors))
    if args.zero_cycles:
        for i, (alg, tor) in enumerate(zip(algebras, torsors), 1):
            img = zero_cycle_image(alg, model, args.max_degree, torsor=tor)
            rep.add(f"zero_cycle_image_{i}", "{" + ", ".join(
                str(c) for c in sorted(img, key=lambda c: (c.den, c.num))) + "}")
        rep.add("zero_cycle_max_degree", args.max_degree)
    return rep, jobs


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def cmd_bound(args):
    qs = [int(s) for s in args.q.split(",")] if args.q else []
    br = bound_report(args.genus, args.cover_degree, qs)
    rep = Report("bound")
    rep.add("genus", br.g)
    rep.add("cover_degree", br.N)
    rep.add("cover_genus", br.g_prime)
    rep.add("threshold_exact", br.bound)
    rep.add("threshold_float", f"{br.bound.float_value():.6f}")
    rep.add("integer_threshold", br.bound.integer_threshold)
    rep.add("vacuous", br.bound.vacuous)
    if br.q_verdicts:
        rep.add_table("residue_fields", ("q", "exceeds_bound"),
                      [(q, "true" if ok else "false") for q, ok in br.q_verdicts])
    jobs = []
    if br.q_verdicts:
        jobs.append(("thresholds", lambda path: save_bound_figure(
            br.bound, br.q_verdicts, path,
            f"size bound, g={br.g}, N={br.N}")))
    if args.quartic_prime is not None:
        qt = quartic_threshold_check(args.quartic_prime)
        rep.add("quartic_prime", qt.prime)
        rep.add("passes_paper_threshold", qt.passes)
        rep.add("paper_constant", qt.paper_constant)
        rep.add("formula_threshold_exact", qt.computed)
        rep.add("formula_threshold_integer", qt.computed.integer_threshold)
        rep.add("threshold_difference", qt.difference)
    return rep, jobs


# ---------------------------------------------------------------------------
# verdict
# ---------------------------------------------------------------------------

def _vp(n, p):
    if n == 0:
        raise BrFibreError("zero coefficient")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _candidate_primes(coeffs):
    prod = 1
    for a in coeffs:
        prod *= a
    return sorted(p for p, e in factorint(abs(prod)).items() if e == 1)


def _diagonal_conditions(coeffs, p, form_degree, N, n_provenance):
    genus = (form_degree - 1) * (form_degree - 2) // 2
    conds = []
    vps = [_vp(a, p) for a in coeffs]
    vp_prod = sum(vps)
    conds.append(("v_p(a0*a1*a2*a3) = 1", vp_prod == 1, "computed"))
    cone_ok = vp_prod == 1 and p % form_degree != 0 and form_degree % p != 0
    conds.append((f"reduction is a cone over a smooth plane curve of degree "
                  f"{form_degree} (genus {genus})", cone_ok,
                  "computed: diagonal form with one p-divisible coefficient"))
    conds.append(("model regular at p", vp_prod == 1,
                  "computed: cone coefficient has valuation exactly 1"))
    conds.append((f"p does not divide N = {N}", gcd(p, N) == 1, n_provenance))
    return genus, conds


def _verdict_from_conditions(rep, conds, threshold_ok, threshold_note):
    rows = [(name, "true" if val else "false", prov) for name, val, prov in conds]
    rows.append(("residue field exceeds the size bound",
                 "true" if threshold_ok else "false", threshold_note))
    rows.append(("X has points in every completion", "assumed",
                 "assumed: user hypothesis, not checked here"))
    rep.add_table("conditions", ("condition", "status", "provenance"), rows)
    return "NoObstructionViaProlific" if (
        all(v for _, v, _ in conds) and threshold_ok) else "Inconclusive"


def cmd_verdict(args):
    rep = Report("verdict")
    rep.add("family", args.family)
    notes = []
    verdict = "Inconclusive"

    if args.family in ("diagonal-quartic", "diagonal-cubic"):
        if not args.coefficients:
            raise BrFibreError(f"{args.family} needs --coefficients a0,a1,a2,a3")
        coeffs = [int(s) for s in args.coefficients.split(",")]
        if len(coeffs) != 4:
            raise BrFibreError("expected four coefficients")
        rep.add("coefficients", ", ".join(str(a) for a in coeffs))
        candidates = _candidate_primes(coeffs)
        rep.add("candidate_primes",
                ", ".join(str(q) for q in candidates) if candidates else "none")
        p = args.prime if args.prime else (candidates[-1] if candidates else None)
        if p is None:
            rep.add("verdict", "Inconclusive")
            rep.add("note_1", "no prime with v_p of the product equal to 1")
            return rep, []
        rep.add("prime", p)

        form_degree = 4 if args.family == "diagonal-quartic" else 3
        if args.family == "diagonal-quartic":
            default_N = QUARTIC_TWO_TORSION_BOUND
            n_prov = ("computed: p odd (2-torsion bound 2^25 for diagonal "
                      "quartics; odd torsion absent when v_p = 1)")
        else:
            default_N = 9
            n_prov = "computed: p != 3 (3-torsion bound for diagonal cubics)"
        N = args.assume_br_order or default_N
        if args.assume_br_order:
            n_prov = f"ASSUMED order N = {N} (desk-scale demonstration knob)"
            notes.append(f"assume_br_order = {N}: the size bound below uses "
                         f"this assumed order, not the honest family bound")
        genus, conds = _diagonal_conditions(coeffs, p, form_degree, N, n_prov)

        if args.family == "diagonal-quartic" and not args.assume_br_order:
            threshold_ok = p > PAPER_QUARTIC_PRIME_BOUND
            threshold_note = (f"computed: p > {PAPER_QUARTIC_PRIME_BOUND} "
                              "(published constant)")
        else:
            b = size_bound(genus, N)
            threshold_ok = b.exceeded(p)
            threshold_note = (f"computed: p > {b} (integer threshold "
                              f"{b.integer_threshold})"
                              + ("; vacuous for genus 1" if b.vacuous else ""))
        verdict = _verdict_from_conditions(rep, conds, threshold_ok,
                                           threshold_note)

        if verdict != "NoObstructionViaProlific" and args.model:
            verdict = _direct_evaluation_path(args, rep, notes, verdict)

    elif args.family == "cone-cubic":
        if not args.model:
            raise BrFibreError("cone-cubic needs --model FILE with the cubic equation")
        verdict = _cone_cubic_verdict(args, rep, notes)

    elif args.family == "custom":
        if args.genus is None or args.cover_degree is None or not args.prime:
            raise BrFibreError("custom needs --genus, --cover-degree and --prime")
        rep.add("prime", args.prime)
        b = size_bound(args.genus, args.cover_degree)
        conds = [("model is regular with cone-over-smooth-curve reduction",
                  bool(args.assume_regular_cone),
                  "assumed via --assume-regular-cone" if args.assume_regular_cone
                  else "not asserted"),
                 (f"p does not divide N = {args.cover_degree}",
                  gcd(args.prime, args.cover_degree) == 1, "computed")]
        verdict = _verdict_from_conditions(
            rep, conds, b.exceeded(args.prime),
            f"computed: p > {b} (integer threshold {b.integer_threshold})")
    else:
        raise BrFibreError(f"unknown family {args.family}")

    rep.add("verdict", verdict)
    for i, note in enumerate(notes, 1):
        rep.add(f"note_{i}", note)
    return rep, []


def _direct_evaluation_path(args, rep, notes, verdict):
    model, algebras = load_model_file(args.model)
    if not algebras:
        notes.append("model file has no [algebra]; direct evaluation skipped")
        return verdict
    rep.add("direct_evaluation_model", model.label or model.model_hash())
    torsors = [residue(a, model) for a in algebras]
    if prolific_check(algebras, model, 1, torsors=torsors):
        notes.append("direct evaluation: the classes are jointly surjective "
                     "on residue points (prolific at p)")
        return "NoObstructionViaProlific"
    ers = [evaluation_image(a, model, 1, torsor=t)
           for a, t in zip(algebras, torsors)]
    for i, er in enumerate(ers, 1):
        rep.add(f"direct_image_{i}", "{" + ", ".join(sorted(
            str(c) for c in er.image)) + "}")
    witness = [er for er in ers
               if er.constant and er.normalization_value
               and not er.normalization_value.is_zero()]
    if witness:
        if args.other_places_trivial:
            notes.append("constant nonzero invariant at p; other places "
                         "certified trivial by the user")
            return "LocalObstructionWitness"
        notes.append("constant nonzero invariant at p; pass "
                     "--other-places-trivial to certify the remaining places "
                     "and obtain a local obstruction witness")
    return verdict


def _cone_cubic_verdict(args, rep, notes):
    model, _ = load_model_file(args.model)
    rep.add("model", model.label or model.model_hash())
    rep.add("prime", model.prime)
    if not model.is_hypersurface() or not model.ambient.all_weight_one() \
            or model.ambient.nvars != 4 \
            or model.equations[0].weighted_degree() != 3:
        raise BrFibreError("cone-cubic expects one cubic equation in P^3")
    base = _base_locus_model(model)
    conds = []
    is_cone = base is not None and base.ambient.nvars == 3
    conds.append(("reduction is a cone over a plane cubic", is_cone,
                  "computed: reduced equation omits one variable"))
    base_smooth = False
    genus_ok = False
    if is_cone:
        base_search = find_singular_points(base, max_extension=2)
        base_smooth = not base_search.orbits
        genus_ok = True
    conds.append(("base cubic curve is smooth (genus 1)", base_smooth,
                  "computed: singular-point search over F_p and F_p^2"))
    regular = False
    if is_cone:
        fld = Fq.get(model.prime, 1)
        omitted = [i for i in range(4)
                   if all(i not in eq.involved()
                          for eq in model.reduced_equations())]
        vtx = [fld.zero] * 4
        vtx[omitted[0]] = fld.one
        regular = regularity_check(model, FibrePoint(tuple(vtx)))
    conds.append(("model regular at the cone vertex", regular,
                  "computed: equation has unit p-coefficient at the vertex"))
    conds.append(("p does not divide N (3-torsion family bound)",
                  model.prime != 3, "computed"))
    b = size_bound(1, 9)
    return _verdict_from_conditions(
        rep, conds, b.exceeded(model.prime),
        "computed: vacuous for genus 1")


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def cmd_cache(args):
    cache = PointCountCache(args.path)
    rep = Report("cache")
    rep.add("path", args.path)
    if args.clear:
        cache.reset()
        rep.add("cleared", True)
        return rep, []
    entries = cache.entries()
    rep.add("entries", len(entries))
    rep.add_table("records", ("key", "count"),
                  [(k, v) for k, v in entries.items()])
    return rep, []


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="brfibre",
        description="Brauer group data and local invariants through the "
                    "special fibre of a regular p-adic model")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="JSON output")
        p.add_argument("--figures", metavar="DIR",
                       help="mirror the report and render figures into DIR")

    p = sub.add_parser("classify", help="singularity type and Brauer table lookup")
    p.add_argument("model", help="model file")
    p.add_argument("--max-extension", type=int, default=2)
    common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("count", help="point counts of the special fibre")
    p.add_argument("model")
    p.add_argument("--k", default="1", help="extension degrees, comma separated")
    p.add_argument("--cache", help="point-count cache file")
    common(p)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("evaluate", help="local invariants of symbol classes")
    p.add_argument("model")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--prolific", action="store_true",
                   help="check joint surjectivity of all declared classes")
    p.add_argument("--zero-cycles", action="store_true",
                   help="image on degree-0 cycles of bounded support degree")
    p.add_argument("--max-degree", type=int, default=2,
                   help="closed-point degree bound for --zero-cycles")
    common(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("bound", help="cover genus and size-bound arithmetic")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--cover-degree", type=int, required=True)
    p.add_argument("--q", help="residue field sizes to test, comma separated")
    p.add_argument("--quartic-prime", type=int,
                   help="also report the diagonal-quartic prime threshold")
    common(p)
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("verdict", help="obstruction verdicts for model families")
    p.add_argument("family", choices=["diagonal-quartic", "diagonal-cubic",
                                      "cone-cubic", "custom"])
    p.add_argument("--coefficients", help="a0,a1,a2,a3 for diagonal families")
    p.add_argument("--prime", type=int)
    p.add_argument("--assume-br-order", type=int,
                   help="substitute this Brauer order in the size bound "
                        "(echoed prominently)")
    p.add_argument("--other-places-trivial", action="store_true",
                   help="certify that invariants vanish at all other places")
    p.add_argument("--model", help="model file for direct evaluation / cone-cubic")
    p.add_argument("--genus", type=int, help="custom family: base curve genus")
    p.add_argument("--cover-degree", type=int, help="custom family: N")
    p.add_argument("--assume-regular-cone", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_verdict)

    p = sub.add_parser("cache", help="inspect or clear a point-count cache")
    p.add_argument("path")
    p.add_argument("--clear", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_cache)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        rep, jobs = args.fn(args)
    except BrFibreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text = emit(rep, json_mode=args.json, figures_dir=args.figures,
                figure_jobs=jobs)
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
