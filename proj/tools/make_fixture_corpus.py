#!/usr/bin/env python3
"""Generate the synthetic fixture corpus and labels CSV under tests/data/.

Per-publisher article and label counts follow the pilot breakdown table.
Source phrasing and coreference chains are chosen per row so the heuristic
classifier lands at a known operating point: roughly 19% of attributions
have no overlapping coreference chain, and the misclassified rows spread
over every error bin.

Output is a pure function of --seed.
"""

import argparse
import csv
import io
import random
import re
import shutil
from dataclasses import dataclass, field
from pathlib import Path

# publisher -> (articles, trump, clinton, other)
BREAKDOWN = {
    "breitbart": (3, 11, 28, 45),
    "huffpost": (3, 11, 10, 29),
    "nyt": (5, 23, 11, 70),
    "politico": (4, 40, 33, 64),
    "usa-today": (4, 11, 10, 27),
    "wash-post": (3, 19, 11, 94),
    "west-journal": (4, 8, 4, 36),
}

# Row categories per gold group, with counts over the whole corpus.
TRUMP_PLAN = {
    "coref_failure": 11,
    "inadequate": 6,
    "ambiguous_miss": 2,
    "logistical": 6,
    "fallback": 28,
    "pronoun_chain": 40,
}  # the rest are "named_chain"
CLINTON_PLAN = {
    "coref_failure": 9,
    "inadequate": 4,
    "ambiguous_miss": 1,
    "logistical": 6,
    "fallback": 25,
    "pronoun_chain": 30,
}
OTHER_PLAN = {
    "ambiguous_fp_trump": 3,
    "tricky_fp_trump": 2,
    "ambiguous_fp_clinton": 2,
    "tricky_fp_clinton": 2,
    "no_chain": 40,
    "pronoun_chain": 60,
}  # the rest are "named_chain"

NAMES = {
    "trump": {
        "rep": ["Donald Trump", "Donald J. Trump", "Donald Trump"],
        "named": [("Trump", None), ("Donald Trump", None), ("Mr. Trump", "Mr."),
                  ("The Trump Campaign", None), ("the Republican nominee Donald Trump", None)],
        "pronoun": "he",
        "inadequate_rep": ["the leader", "the Republican nominee", "the businessman"],
        "ambiguous": ("his campaign", "the Republican campaign"),
        "logistical_rep": ["Melania Trump", "Ivanka Trump", "Donald Trump Jr."],
    },
    "clinton": {
        "rep": ["Hillary Clinton", "Hillary Rodham Clinton", "Hillary Clinton"],
        "named": [("Clinton", None), ("Hillary Clinton", None), ("Mrs. Clinton", "Mrs."),
                  ("Secretary Clinton", "Secretary"), ("The Clinton Campaign", None),
                  ("Hillary Clinton, wife of former president Bill Clinton", None)],
        "pronoun": "she",
        "inadequate_rep": ["the former secretary of state", "the Democratic nominee"],
        "ambiguous": ("her campaign", "the Democratic campaign"),
        "logistical_rep": ["Chelsea Clinton", "Bill Clinton"],
    },
}

# (source text, source label, honorific)
OTHER_NAMED = [
    ("Bernie Sanders", "sanders", None),
    ("Sen. Sanders", "sanders", "Sen."),
    ("Ted Cruz", "cruz", None),
    ("Sen. Cruz", "cruz", "Sen."),
    ("a campaign aide", "other_person", None),
    ("Mike Pence", "other_person", None),
    ("Gov. Pence", "other_person", "Gov."),
    ("Elizabeth Warren", "other_person", None),
    ("the FBI", "organization", None),
    ("Bill Clinton", "other_person", None),
    ("The Clinton Administration", "organization", None),
    ("Donald Trump Jr.", "other_person", None),
    ("Melania Trump", "other_person", None),
    ("state officials", "organization", None),
    ("a spokesperson", "unknown", None),
    ("Dr. Jill Stein", "other_person", "Dr."),
    ("the Associated Press", "organization", None),
    ("one voter", "unknown", None),
]
OTHER_PRONOUN = [
    ("he", "Mike Pence", "other_person"),
    ("she", "Elizabeth Warren", "other_person"),
    ("he", "Bernie Sanders", "sanders"),
    ("he", "Ted Cruz", "cruz"),
    ("they", "the pollsters", "organization"),
    ("she", "Kellyanne Conway", "other_person"),
    ("he", "Tim Kaine", "other_person"),
]
AMBIGUOUS_FP = {
    "trump": [("Trump Campaign Spokesman, Hope Hicks", "other_person"),
              ("An insider close to Trump", "other_person")],
    "clinton": [("Clinton campaign chairman John Podesta", "other_person")],
}
TRICKY_FP = {
    "trump": [("a longtime Trump adviser", "other_person"),
              ("the Trump Organization", "organization")],
    "clinton": [("A 2008 Clinton Veteran", "other_person"),
                ("the Clinton Foundation", "organization")],
}

CUES = ["said", "argued", "told reporters", "wrote", "claimed", "stated", "insisted",
        "tweeted", "added", "warned"]
SUBJECTS = ["the economy", "trade", "the border", "health care", "taxes", "the debate",
            "the polls", "the email inquiry", "foreign policy", "jobs", "the convention",
            "voters in Ohio", "the Supreme Court", "the media", "the rally"]
PREDICATES = ["is in serious trouble", "will improve soon", "was badly mishandled",
              "needs a fresh approach", "matters more than ever", "deserves an honest debate",
              "has been misrepresented", "will decide the election", "is a disaster",
              "is finally moving forward"]
FILLERS = ["The event drew a large crowd.", "Polls opened early in several states.",
           "Reporters waited outside the hall for hours.",
           "Supporters gathered at the café across the street.",
           "The statement came late on Tuesday.", "Volunteers handed out signs near the entrance.",
           "A spokeswoman for Peña declined to comment.", "Turnout figures were not yet available."]
INTROS = ["spoke in Ohio on Tuesday.", "held a rally in Florida.", "addressed supporters late Monday.",
          "met with donors this week.", "arrived in Pennsylvania on Friday."]

TOKEN_RE = re.compile(r"\w+(?:['-]\w+)*|[^\w\s]")


@dataclass
class Row:
    group: str          # gold group: trump / clinton / other
    category: str
    source: str
    label: str
    honorific: str | None = None
    chain: str | None = None     # "self", "none", or representative text
    note: str | None = None


@dataclass
class Article:
    publisher: str
    name: str
    lines: list = field(default_factory=list)
    # per attribution: (row, source span, cue spans, content spans)
    attributions: list = field(default_factory=list)
    # chains: list of mentions, each (line index, char start, char end, is_rep)
    chains: list = field(default_factory=list)


def weighted(rng, options):
    values, weights = zip(*options)
    return rng.choices(values, weights=weights, k=1)[0]


def plan_rows(rng, group, n_total):
    plan = {"trump": TRUMP_PLAN, "clinton": CLINTON_PLAN, "other": OTHER_PLAN}[group]
    cats = []
    for cat, k in plan.items():
        cats += [cat] * k
    if len(cats) > n_total:
        raise SystemExit(f"plan for {group} exceeds {n_total} rows")
    cats += ["named_chain"] * (n_total - len(cats))
    rng.shuffle(cats)
    return cats


def make_row(rng, group, cat):
    if group in ("trump", "clinton"):
        n = NAMES[group]
        if cat == "coref_failure":
            return Row(group, cat, n["pronoun"], group, chain="none")
        if cat == "inadequate":
            return Row(group, cat, n["pronoun"], group, chain=rng.choice(n["inadequate_rep"]))
        if cat == "ambiguous_miss":
            src, rep = n["ambiguous"]
            return Row(group, cat, src, group, chain=rep,
                       note="ambiguous: campaign or candidate")
        if cat == "logistical":
            return Row(group, cat, n["pronoun"], group, chain=rng.choice(n["logistical_rep"]))
        if cat == "pronoun_chain":
            return Row(group, cat, n["pronoun"], group, chain=rng.choice(n["rep"]))
        src, hon = rng.choice(n["named"])
        if cat == "fallback":
            return Row(group, cat, src, group, honorific=hon, chain="none")
        # named_chain: the named mention is a non-representative member of a
        # chain headed by the full name, or its own representative.
        chain = rng.choice(n["rep"]) if rng.random() < 0.5 else "self"
        return Row(group, cat, src, group, honorific=hon, chain=chain)

    if cat.startswith("ambiguous_fp_"):
        src, label = rng.choice(AMBIGUOUS_FP[cat.rsplit("_", 1)[1]])
        return Row(group, cat, src, label, chain="self", note="ambiguous: affiliated source")
    if cat.startswith("tricky_fp_"):
        src, label = rng.choice(TRICKY_FP[cat.rsplit("_", 1)[1]])
        return Row(group, cat, src, label, chain="self")
    if cat == "pronoun_chain":
        pron, rep, label = rng.choice(OTHER_PRONOUN)
        return Row(group, cat, pron, label, chain=rep)
    src, label, hon = rng.choice(OTHER_NAMED)
    return Row(group, cat, src, label, honorific=hon,
               chain="none" if cat == "no_chain" else "self")


def features(rng, row, publisher):
    """Candidate- and publisher-dependent label draws."""
    g = row.group
    if g == "trump":
        stance = weighted(rng, [("favours_trump", 4), ("against_clinton", 4), ("against_other", 3),
                                ("neutral_both", 1)])
        attr = weighted(rng, [("speech_snippet", 4), ("clinton_callout", 3), ("personal_stance", 2),
                              ("group_callout", 1), ("headline", 1)])
        medium = weighted(rng, [("rally", 4), ("tweet", 3), ("interview", 2), ("debate", 1)])
    elif g == "clinton":
        stance = weighted(rng, [("favours_clinton", 5), ("against_trump", 4), ("favours_other", 1),
                                ("neutral_both", 1)])
        attr = weighted(rng, [("political_platform", 4), ("trump_callout", 3),
                              ("personal_stance", 2), ("speech_snippet", 1), ("headline", 1)])
        medium = weighted(rng, [("formal_speech", 4), ("statement", 2), ("interview", 2),
                                ("debate", 1), ("press_release", 1)])
    else:
        stance = weighted(rng, [("neutral_both", 4), ("against_trump", 2), ("against_clinton", 2),
                                ("favours_other", 2), ("against_other", 1), ("against_both", 1),
                                ("favours_both", 1)])
        attr = weighted(rng, [("other_callout", 4), ("group_callout", 2), ("trump_callout", 2),
                              ("clinton_callout", 2), ("headline", 1), ("sanders_callout", 1),
                              ("cruz_callout", 1)])
        medium = weighted(rng, [("interview", 3), ("statement", 3), ("press_release", 2),
                                ("unknown", 2), ("tweet", 1)])
    # Publisher flavour on stance for the candidate rows.
    if publisher == "breitbart" and g == "clinton" and rng.random() < 0.5:
        stance = "against_other"
    if publisher == "huffpost" and g == "clinton" and rng.random() < 0.5:
        stance = "favours_clinton"
    if publisher == "huffpost" and g == "trump" and rng.random() < 0.5:
        stance = "against_other"

    if stance.startswith("favours"):
        cue_val = weighted(rng, [("positive", 5), ("neutral", 2), ("negative", 1)])
    elif stance.startswith("against"):
        cue_val = weighted(rng, [("negative", 5), ("neutral", 2), ("positive", 1)])
    else:
        cue_val = weighted(rng, [("neutral", 5), ("positive", 1), ("negative", 1)])
    src_val = weighted(rng, [("neutral", 6), ("positive", 2), ("negative", 2)])
    direct = rng.random() < 0.45
    if attr == "headline":
        direct = False
    return {
        "source_valence": src_val,
        "cue_valence": cue_val,
        "attr_type": attr,
        "stance_type": stance,
        "medium": medium,
        "is_direct_quote": direct,
    }


def content_text(rng):
    return f"{rng.choice(SUBJECTS)} {rng.choice(PREDICATES)}"


def cap(s):
    return s[0].upper() + s[1:]


def render_attribution(rng, article, row, feats):
    """Appends the attribution sentence (and any antecedent) to the article."""
    line_idx = len(article.lines)
    if row.chain not in ("none", "self"):
        rep = row.chain
        text = f"{cap(rep) if rep[0].islower() else rep} {rng.choice(INTROS)}"
        article.lines.append(text)
        rep_mention = (line_idx, 0, len(rep), True)
        line_idx += 1
    else:
        rep_mention = None

    src = row.source
    cue = rng.choice(CUES)
    if feats["attr_type"] == "headline":
        s_text = cap(src) if src[0].islower() else src
        content = cap(content_text(rng))
        line = f"{s_text}: {content}"
        src_span = (0, len(s_text))
        cue_spans = []
        content_spans = [(len(s_text) + 2, len(line))]
    elif feats["is_direct_quote"] and rng.random() < 0.3:
        c1, c2 = content_text(rng), content_text(rng)
        c1 = cap(c1)
        line = f'"{c1}," {src} {cue}, "{c2}."'
        a = 1
        content_spans = [(a, a + len(c1))]
        s0 = len(f'"{c1}," ')
        src_span = (s0, s0 + len(src))
        cue_spans = [(src_span[1] + 1, src_span[1] + 1 + len(cue))]
        c2_start = line.index(f'"{c2}."') + 1
        content_spans.append((c2_start, c2_start + len(c2)))
    elif feats["is_direct_quote"]:
        c = cap(content_text(rng))
        line = f'"{c}," {src} {cue}.'
        content_spans = [(1, 1 + len(c))]
        s0 = len(f'"{c}," ')
        src_span = (s0, s0 + len(src))
        cue_spans = [(src_span[1] + 1, src_span[1] + 1 + len(cue))]
    else:
        s_text = cap(src) if src[0].islower() else src
        c = content_text(rng)
        line = f"{s_text} {cue} that {c}."
        src_span = (0, len(s_text))
        cue_spans = [(len(s_text) + 1, len(s_text) + 1 + len(cue))]
        c0 = len(f"{s_text} {cue} that ")
        content_spans = [(c0, c0 + len(c))]

    article.lines.append(line)
    src_mention = (line_idx, src_span[0], src_span[1], False)
    if row.chain == "self":
        article.chains.append([(line_idx, src_span[0], src_span[1], True)])
    elif rep_mention is not None:
        article.chains.append([rep_mention, src_mention])
    source_text = line[src_span[0]:src_span[1]]
    if row.honorific is not None and row.honorific not in source_text:
        raise SystemExit(f"honorific {row.honorific!r} missing from {source_text!r}")
    article.attributions.append((row, line_idx, src_span, cue_spans, content_spans))


def xml_escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def write_article(article, out_dir):
    text = "\n".join(article.lines) + "\n"
    data = text.encode("utf-8")
    # byte offset of each line start
    line_starts = []
    pos = 0
    for line in article.lines:
        line_starts.append(pos)
        pos += len(line.encode("utf-8")) + 1

    def byte_off(line_idx, char_off):
        line = article.lines[line_idx]
        return line_starts[line_idx] + len(line[:char_off].encode("utf-8"))

    tokens = []  # (sentence, start, end, surface)
    for li, line in enumerate(article.lines):
        for m in TOKEN_RE.finditer(line):
            tokens.append((li, byte_off(li, m.start()), byte_off(li, m.end()), m.group(0)))
    assert all(data[s:e].decode("utf-8") == surf for _, s, e, surf in tokens)

    def token_range(line_idx, c0, c1):
        b0, b1 = byte_off(line_idx, c0), byte_off(line_idx, c1)
        ids = [i for i, (_, s, e, _) in enumerate(tokens) if s < b1 and e > b0]
        return ids[0], ids[-1] + 1

    xml = io.StringIO()
    xml.write('<?xml version="1.0" encoding="UTF-8"?>\n<document>\n  <sentences>\n')
    current = None
    for i, (sent, s, e, surf) in enumerate(tokens):
        if sent != current:
            if current is not None:
                xml.write("    </sentence>\n")
            xml.write(f'    <sentence id="{sent}">\n')
            current = sent
        xml.write(f'      <token id="{i}" start="{s}" end="{e}">{xml_escape(surf)}</token>\n')
    if current is not None:
        xml.write("    </sentence>\n")
    xml.write("  </sentences>\n  <coreference>\n")
    for cid, chain in enumerate(article.chains):
        xml.write(f'    <chain id="{cid}">\n')
        for (li, c0, c1, rep) in chain:
            t0, t1 = token_range(li, c0, c1)
            xml.write(f'      <mention start="{t0}" end="{t1}" '
                      f'representative="{"true" if rep else "false"}"/>\n')
        xml.write("    </chain>\n")
    xml.write("  </coreference>\n</document>\n")

    attr = io.StringIO()
    attr.write(f"# {article.publisher}/{article.name}\n")
    for aid, (row, li, src, cues, contents) in enumerate(article.attributions):
        attr.write(f"{aid}\tsource\t{byte_off(li, src[0])}\t{byte_off(li, src[1])}\n")
        for c in cues:
            attr.write(f"{aid}\tcue\t{byte_off(li, c[0])}\t{byte_off(li, c[1])}\n")
        for c in contents:
            attr.write(f"{aid}\tcontent\t{byte_off(li, c[0])}\t{byte_off(li, c[1])}\n")

    pub_dir = out_dir / article.publisher
    pub_dir.mkdir(parents=True, exist_ok=True)
    (pub_dir / f"{article.name}.txt").write_bytes(data)
    (pub_dir / f"{article.name}.xml").write_text(xml.getvalue(), encoding="utf-8")
    (pub_dir / f"{article.name}.attr").write_text(attr.getvalue(), encoding="utf-8")


def split_counts(rng, total, parts, minimum):
    """Random composition of `total` into `parts` pieces of at least `minimum`."""
    counts = [minimum] * parts
    for _ in range(total - minimum * parts):
        counts[rng.randrange(parts)] += 1
    return counts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2016)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "tests" / "data")
    args = ap.parse_args()
    rng = random.Random(args.seed)

    totals = {g: sum(v[i] for v in BREAKDOWN.values())
              for g, i in (("trump", 1), ("clinton", 2), ("other", 3))}
    pools = {g: plan_rows(rng, g, n) for g, n in totals.items()}

    corpus_dir = args.out / "fixture_corpus"
    if corpus_dir.exists():
        shutil.rmtree(corpus_dir)
    label_rows = []
    for publisher, (n_articles, n_trump, n_clinton, n_other) in BREAKDOWN.items():
        rows = []
        for g, n in (("trump", n_trump), ("clinton", n_clinton), ("other", n_other)):
            for _ in range(n):
                rows.append(make_row(rng, g, pools[g].pop()))
        rng.shuffle(rows)
        sizes = split_counts(rng, len(rows), n_articles, 5)
        start = 0
        for a, size in enumerate(sizes):
            article = Article(publisher, f"article_{a + 1:02d}")
            for row in rows[start:start + size]:
                if rng.random() < 0.3:
                    article.lines.append(rng.choice(FILLERS))
                feats = features(rng, row, publisher)
                render_attribution(rng, article, row, feats)
                row_id = len(article.attributions) - 1
                label_rows.append((publisher, article.name, row_id, row, feats))
            start += size
            write_article(article, corpus_dir)

    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["publisher_name", "article_name", "attr_id", "source_label", "honorific_text",
                "source_valence", "cue_valence", "attr_type", "stance_type", "medium",
                "is_direct_quote", "annotator_note"])
    for publisher, article, attr_id, row, f in sorted(label_rows, key=lambda r: r[:3]):
        w.writerow([publisher, article, attr_id, row.label, row.honorific or "",
                    f["source_valence"], f["cue_valence"], f["attr_type"], f["stance_type"],
                    f["medium"], "true" if f["is_direct_quote"] else "false", row.note or ""])
    (args.out / "fixture_labels.csv").write_text(out.getvalue(), encoding="utf-8")

    no_chain = sum(1 for r in label_rows if r[3].chain == "none")
    print(f"{len(label_rows)} labeled attributions, {no_chain} without a coreference chain "
          f"({no_chain / len(label_rows):.1%})")


if __name__ == "__main__":
    main()
