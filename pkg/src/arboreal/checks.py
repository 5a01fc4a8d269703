"""Named checks with uniform reports.

Each check reproduces one family of computations and returns a
CheckReport: pass/fail/inconclusive, an evidence dictionary, and the
runtime.  The command line and the acceptance suite are thin layers over
this module, so a check behaves identically everywhere.  Outputs are
deterministic for fixed parameters: searches use fixed orders and all
sampling is driven by a seeded generator.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field

from . import catalog as _catalog
from .core import fmt_word
from .hnn import (
    UnrootedVertex,
    canonicalize,
    hnn_is_trivial,
    parse_hnn,
    spine_vertex,
    stabilizer_projection_check,
    theta_apply,
    transitivity_witness,
    two_transitivity_level_check,
)
from .levels import perm_group_on_level, stabilizer_words
from .lifting import (
    GgsError,
    GgsVector,
    ggs_lifting,
    check_lifting,
    self_replicating_witnesses,
    verify_endomorphism_by_quotient_separation,
    verify_endomorphism_by_relators,
)
from .padic import dilation_factor_empirical

DEFAULT_SEED = 20240 + 1


@dataclass
class CheckReport:
    check: str
    status: str                  # "pass" | "fail" | "inconclusive"
    evidence: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self):
        return self.status == "pass"

    def exit_code(self):
        return {"pass": 0, "fail": 1, "inconclusive": 2}[self.status]

    def to_json(self):
        return json.dumps({
            "check": self.check,
            "status": self.status,
            "evidence": self.evidence,
            "seconds": round(self.seconds, 4),
        }, indent=2, default=str)

    def text(self):
        lines = [f"{self.check}: {self.status.upper()} ({self.seconds:.2f}s)"]
        for key in sorted(self.evidence):
            lines.append(f"  {key}: {self.evidence[key]}")
        return "\n".join(lines)


def _timed(check_id, body):
    t0 = time.perf_counter()
    status, evidence = body()
    return CheckReport(check_id, status, evidence, time.perf_counter() - t0)


def _entry(params):
    spec = params.get("spec")
    if spec:
        return _catalog.load_spec(spec)
    return _catalog.get(params["group"])


# ---------------------------------------------------------------------------
# individual checks

def check_lifting_certificate(params):
    """check_lifting plus the entry's endomorphism certificate."""
    entry = _entry(params)
    depth = int(params.get("depth", 5))
    sigma_name = params.get("sigma")

    def body():
        evidence = {}
        if entry.default_sigma is None and not entry.substitutions:
            evidence["liftable"] = entry.liftable
            return "inconclusive", evidence
        names = [sigma_name] if sigma_name else sorted(entry.substitutions)
        ok = True
        for name in names:
            sigma = entry.sigma(name)
            rep = check_lifting(sigma)
            evidence[f"{name}.lifting"] = "pass" if rep.ok else f"fail {rep.failures}"
            ok &= rep.ok
            if entry.presentation is not None or entry.relator_texts is not None:
                if entry.presentation is not None:
                    rrep = verify_endomorphism_by_relators(sigma, entry.presentation, depth)
                    evidence[f"{name}.relators"] = (
                        "pass" if rrep.ok else f"fail {rrep.failures[:4]}")
                    ok &= rrep.ok
                if entry.relator_texts is not None:
                    aut = entry.automaton
                    bad = [label for label, r in entry.relators(depth)
                           if not aut.word_is_trivial(sigma.apply_word(r))]
                    evidence[f"{name}.stated-relators"] = "pass" if not bad else f"fail {bad[:4]}"
                    ok &= not bad
            elif entry.separation is not None:
                gens, comp, order = _catalog.separation_complement(entry)
                srep = verify_endomorphism_by_quotient_separation(
                    gens, comp, order, entry.separation["level"])
                evidence[f"{name}.separation"] = "pass" if srep.ok else "fail"
                ok &= srep.ok
        return ("pass" if ok else "fail"), evidence
    return _timed(f"lifting[{entry.id}]", body)


def check_perm_order(params):
    entry = _entry(params)
    level = int(params["level"])
    gen_names = params.get("gens")

    def body():
        elements = entry.elements()
        if gen_names:
            names = [n.strip() for n in str(gen_names).split(",")]
            gens = [elements[n] for n in names]
        else:
            gens = list(elements.values())
        group = perm_group_on_level(gens, level)
        evidence = {"order": group.order(), "level": level,
                    "gens": gen_names or ",".join(elements)}
        expect = params.get("expect")
        if expect is not None:
            evidence["expect"] = int(expect)
            return ("pass" if group.order() == int(expect) else "fail"), evidence
        return "pass", evidence
    return _timed(f"perm-order[{entry.id}]", body)


def check_stabilizer_words(params):
    entry = _entry(params)

    def body():
        words = stabilizer_words(entry.elements(), params.get("vertex", "first-level"))
        return "pass", {"count": len(words),
                        "words": [fmt_word(w) for w in words]}
    return _timed(f"stabilizer-of-first-level[{entry.id}]", body)


def check_separation(params):
    entry = _entry(params)

    def body():
        if entry.separation is None:
            return "inconclusive", {"reason": f"{entry.id} has no separation data"}
        level = int(params.get("level", entry.separation["level"]))
        gens, comp, order = _catalog.separation_complement(entry)
        rep = verify_endomorphism_by_quotient_separation(gens, comp, order, level)
        evidence = {
            "level": level,
            "stabilizer_image_order": rep.stabilizer_order,
            "complement_image_order": rep.complement_order,
            "complement_faithful": rep.complement_faithful,
            "intersection_trivial": rep.intersection_trivial,
        }
        return ("pass" if rep.ok else "fail"), evidence
    return _timed(f"separation[{entry.id}]", body)


def check_hnn_relators(params):
    entry = _entry(params)
    which = params.get("presentation", "all")
    depth = int(params.get("depth", 3))

    def body():
        action = entry.action()
        suites = {}
        if entry.hnn_presentations:
            for name, rels in entry.hnn_presentations.items():
                if which not in ("all", name):
                    continue
                suites[name] = list(rels)
        if which in ("all", "base") and (entry.presentation or entry.relator_texts):
            # base-group relators hold in the extension as well
            suites["base"] = [fmt_word(r) for _, r in entry.relators(depth)]
        evidence = {}
        ok = True
        for name, rels in suites.items():
            bad = [r for r in rels if not hnn_is_trivial(parse_hnn(r, action), action)]
            evidence[name] = "pass" if not bad else f"fail {bad}"
            ok &= not bad
        if not suites:
            return "inconclusive", {"reason": "no relator suites configured"}
        return ("pass" if ok else "fail"), evidence
    return _timed(f"hnn-relators[{entry.id}]", body)


def check_transitivity(params):
    entry = _entry(params)
    copies = int(params.get("copies", 3))
    length = int(params.get("length", 3))

    def body():
        action = entry.action()
        d = entry.automaton.size
        lam = UnrootedVertex(0, ())
        tried = 0
        missing = []
        for m in range(copies + 1):
            for n in range(length + 1):
                for w in itertools.product(range(d), repeat=n):
                    v = UnrootedVertex(m, w)
                    if canonicalize(v, action.letter) != v:
                        continue
                    tried += 1
                    e = transitivity_witness(v, action)
                    if e is None or theta_apply(e, lam, action) != v:
                        missing.append(str(v))
        evidence = {"vertices": tried, "missing": missing}
        if missing:
            return "inconclusive", evidence
        return "pass", evidence
    return _timed(f"transitivity[{entry.id}]", body)


def check_two_transitivity(params):
    entry = _entry(params)
    top = int(params.get("level", 6))

    def body():
        gens = list(entry.elements().values())
        results = {l: two_transitivity_level_check(gens, l) for l in range(1, top + 1)}
        ok = all(results.values())
        return ("pass" if ok else "fail"), {"levels": results}
    return _timed(f"two-transitivity[{entry.id}]", body)


def check_spine(params):
    entry = _entry(params)
    depth = int(params.get("depth", 20))

    def body():
        action = entry.action()
        bad = []
        for name in action.generators():
            e = action.element(((name, 1),))
            for level in range(-depth, 1):
                v = spine_vertex(level, action.letter)
                if theta_apply(e, v, action) != v:
                    bad.append((name, level))
        return ("pass" if not bad else "fail"), {"depth": depth, "moved": bad}
    return _timed(f"spine[{entry.id}]", body)


def check_dilation(params):
    entry = _entry(params)
    element = params.get("element", "t")
    samples = int(params.get("samples", 1000))
    seed = int(params.get("seed", DEFAULT_SEED))

    def body():
        action = entry.action()
        e = parse_hnn(element, action)
        m = dilation_factor_empirical(e, action, samples=samples, seed=seed)
        evidence = {"element": element, "exponent": m, "samples": samples,
                    "net_t_displacement": e.tpos - e.tneg}
        expect = params.get("expect")
        if expect is not None:
            evidence["expect"] = int(expect)
            return ("pass" if m == int(expect) else "fail"), evidence
        return ("pass" if m == e.tpos - e.tneg else "fail"), evidence
    return _timed(f"dilation[{entry.id}:{element}]", body)


def check_stabilizer_projection(params):
    entry = _entry(params)
    depth = int(params.get("depth", 4))

    def body():
        action = entry.action()
        elements = entry.elements()
        samples = [elements[n] for n in action.generators()]
        pairs = [(a.word + b.word) for a in samples for b in samples]
        rep = stabilizer_projection_check(action, depth=depth,
                                          powers=(1, 2, 3), sample_words=pairs)
        evidence = {
            "generators": rep.generator_projections,
            "sampled": len(rep.sampled),
            "sampled_failures": [d for d, f, _, k in rep.sampled if not (f and k)],
        }
        return ("pass" if rep.ok else "fail"), evidence
    return _timed(f"stabilizer-projection[{entry.id}]", body)


def check_grig_recursions(params):
    string_bound = int(params.get("string_bound", 12))
    group_bound = int(params.get("group_bound", 6))
    alpha_bound = int(params.get("alpha_bound", 12))

    def body():
        entry = _catalog.get("grigorchuk")
        aut = entry.automaton
        sigma = entry.sigma()
        word = (("a", 1),)
        string_ok, group_ok, alpha_ok = [], [], []
        for n in range(1, max(string_bound, group_bound, alpha_bound) + 1):
            word = sigma.apply_word(word)
            if n <= string_bound:
                string_ok.append(fmt_word(word).replace("*", "") == _catalog.grig_P(n))
            if n <= group_bound:
                p_word = tuple((c, 1) for c in _catalog.grig_P(n))
                from .core import invert_word
                group_ok.append(aut.word_is_trivial(aut.reduce(word + invert_word(p_word))))
            if n <= alpha_bound:
                sec = aut.section_word(word, (0,))
                alpha = _catalog.grig_alpha(n)
                alpha_word = tuple((c, -1) for c in reversed(alpha)) if alpha != "1" else ()
                alpha_ok.append(aut.word_is_trivial(aut.reduce(sec + alpha_word)))
        ok = all(string_ok) and all(group_ok) and all(alpha_ok)
        return ("pass" if ok else "fail"), {
            "P_n_as_string": f"{sum(string_ok)}/{string_bound}",
            "P_n_in_group": f"{sum(group_ok)}/{group_bound}",
            "alpha_n": f"{sum(alpha_ok)}/{alpha_bound}",
        }
    return _timed("grig-recursions", body)


def check_lamplighter_alpha(params):
    bound = int(params.get("bound", 10))

    def body():
        x = _catalog.lamplighter_x()
        bad = [n for n in range(bound + 1)
               if _catalog.lamplighter_alpha(x, 2 ** n).lamps != (0, 2 ** n)]
        s_fixed = _catalog.lamplighter_alpha(_catalog.lamplighter_s(), 2 ** bound).lamps == ()
        ok = not bad and s_fixed
        return ("pass" if ok else "fail"), {"bound": bound, "bad_n": bad, "s_fixed": s_fixed}
    return _timed("lamplighter-alpha", body)


def check_lamplighter_core(params):
    n_min = int(params.get("n_min", 3))
    n_max = int(params.get("n_max", 8))
    trials = int(params.get("trials", 1000))
    seed = int(params.get("seed", DEFAULT_SEED))

    def body():
        results = {n: _catalog.lamplighter_core_gap_check(n, trials, seed=seed + n)
                   for n in range(n_min, n_max + 1)}
        return ("pass" if all(results.values()) else "fail"), {"spacing": results}
    return _timed("lamplighter-core", body)


def check_ggs(params):
    p = int(params["p"])
    e_vec = tuple(int(x) for x in str(params["e"]).split(","))
    j = params.get("j")

    def body():
        try:
            vector = GgsVector(p, e_vec, int(j) if j is not None else None)
        except GgsError as err:
            return "fail", {"rejected": str(err)}
        built = ggs_lifting(vector)
        evidence = {
            "j": built.j, "f": built.f,
            "lifting": "pass" if built.lifting.ok else f"fail {built.lifting.failures}",
            "orders": {k: v for k, v in built.order_certificates.items() if not v} or "all pass",
            "sigma": {n: fmt_word(w) for n, w in built.sigma.images},
        }
        return ("pass" if built.ok else "fail"), evidence
    return _timed(f"ggs[p={p}]", body)


def check_witnesses(params):
    entry = _entry(params)
    bound = int(params.get("bound", 5))

    def body():
        sigma = None
        letter = params.get("letter")
        if entry.default_sigma is not None:
            sigma = entry.sigma(params.get("sigma"))
            letter = sigma.letter if letter is None else int(letter)
        elif letter is None:
            letter = 0
        rep = self_replicating_witnesses(entry.elements(), int(letter),
                                         word_bound=bound, sigma=sigma)
        evidence = {
            "letter": rep.letter,
            "witnesses": {n: (fmt_word(w) if w else None) for n, w in rep.witnesses.items()},
            "source": rep.source,
        }
        return ("pass" if rep.ok else "inconclusive"), evidence
    return _timed(f"witnesses[{entry.id}]", body)


CHECKS = {
    "lifting": check_lifting_certificate,
    "perm-order": check_perm_order,
    "stabilizer-of-first-level": check_stabilizer_words,
    "separation": check_separation,
    "hnn-relators": check_hnn_relators,
    "transitivity": check_transitivity,
    "two-transitivity": check_two_transitivity,
    "spine": check_spine,
    "dilation": check_dilation,
    "stabilizer-projection": check_stabilizer_projection,
    "grig-recursions": check_grig_recursions,
    "lamplighter-alpha": check_lamplighter_alpha,
    "lamplighter-core": check_lamplighter_core,
    "ggs": check_ggs,
    "witnesses": check_witnesses,
}


def run_check(check_id, params):
    if check_id not in CHECKS:
        raise KeyError(f"unknown check {check_id!r}; known: {', '.join(sorted(CHECKS))}")
    return CHECKS[check_id](params)
