#!/usr/bin/env python3
"""Generates the deterministic mini fixture under data/mini/.

Sixty queries in four hand-designed categories. The expected judgments are
computable before running the engine:

  A (a01..a20, finance, KG entity): the gold marker lives in a structured
    attribute value, a distractor marker in the query's first web page.
    Routed run answers from the API context -> accurate; the distractor is
    only reachable when web is forced in.
  B (b01..b20, finance/sports, KG entity): unanswerable. No gold marker
    exists anywhere; the first web page carries a distractor marker. Routed
    run ({api}) refuses -> missing; an all-sources run surfaces the
    distractor -> hallucination.
  C (c01..c10, open domain, no entity): gold marker in the first web page;
    gold answers are full sentences so the semantic judge decides.
  D (d01..d10, music/movie, KG entity): gold marker in the first web page;
    d05 and d10 are false-premise queries answered "invalid question".

Routed run: 40 accurate / 0 hallucination / 20 missing.
All-sources run: 40 accurate / 20 hallucination / 0 missing.

No RNG anywhere: rerunning this script is byte-stable.
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "mini"

FILLER_WORDS = [
    "granite", "meadow", "lantern", "harbor", "thistle", "copper", "violet",
    "ember", "willow", "falcon", "prairie", "cobalt", "juniper", "marble",
]

QUESTION_TYPES = [
    "simple", "simple_w_condition", "set", "comparison", "aggregation",
    "multi-hop", "post-processing",
]


def filler_text(doc_key: str, paragraph: int) -> str:
    """Deterministic filler that shares no tokens with any query or marker."""
    base = sum(ord(c) for c in doc_key) + paragraph * 7
    words = [FILLER_WORDS[(base + i * 3) % len(FILLER_WORDS)] for i in range(12)]
    return " ".join(words)


def html_page(title: str, paragraphs: list[str]) -> str:
    body = "\n".join(f"<p>{p}</p>" for p in paragraphs)
    return (
        "<html><head><title>{t}</title>"
        "<script>var tracker = 1;</script></head>\n"
        "<body><nav>site menu</nav>\n<h1>{t}</h1>\n{b}\n"
        "<footer>copyright notice</footer></body></html>\n"
    ).format(t=title, b=body)


def md_page(title: str, paragraphs: list[str]) -> str:
    return "# " + title + "\n\n" + "\n\n".join(paragraphs) + "\n"


def main() -> None:
    queries = []
    kg = []
    script = []
    pages = {}  # doc_id -> (is_html, title, paragraphs)

    def add_docs(qid: str, query_text: str, special: str | None, use_html: bool):
        """Five pages per query; doc 0 optionally carries a marker plus the
        query's own words so retrieval prefers it."""
        refs = []
        for d in range(5):
            doc_id = f"web-{qid}-{d}"
            refs.append(doc_id)
            paragraphs = [filler_text(doc_id, p) for p in range(2)]
            if d == 0 and special is not None:
                paragraphs.insert(0, query_text.rstrip("?") + " " + special)
            pages[doc_id] = (use_html, f"Page {doc_id}", paragraphs)
        return refs

    # --- Category A: structured source answers, web page distracts. -------
    for i in range(1, 21):
        qid = f"a{i:02d}"
        if i == 1:
            name, surface, qtext = "Funko", "funko", "What price did Funko open at today?"
            truth, gold = "7.16", "$7.16"
            attributes = {"name": name, "open": "$7.16", "latest": "$7.13"}
        else:
            name, surface = f"Acme A{i:02d}", f"acme a{i:02d}"
            qtext = f"What price did {name} stock open at today?"
            truth = gold = f"answer {qid}"
            attributes = {"name": name, "open": gold}
        queries.append({
            "id": qid, "query": qtext, "domain": "finance",
            "question_type": QUESTION_TYPES[i % len(QUESTION_TYPES)],
            "ground_truth": truth, "false_premise": False,
            "web_refs": add_docs(qid, qtext, f"wrong {qid}", use_html=(i <= 2)),
        })
        kg.append({"entity_id": f"ent-{qid}", "surface_forms": [surface],
                   "attributes": attributes, "as_of": "2024-03-01"})
        script.append({"query_id": qid, "gold_answer": gold,
                       "distractor_answer": f"wrong {qid}",
                       "gold_chunk_id": gold, "distractor_chunk_id": f"wrong {qid}"})

    # --- Category B: unanswerable; the web holds only a distractor. -------
    for i in range(1, 21):
        qid = f"b{i:02d}"
        if i <= 10:
            name, domain = f"Bravo B{i:02d}", "finance"
            qtext = f"What is the outlook for {name} next quarter?"
            attributes = {"name": name, "sector": "industrials"}
        else:
            name, domain = f"Bobcat B{i:02d}", "sports"
            qtext = f"How did {name} perform in the match?"
            attributes = {"name": name, "team": "the visitors"}
        queries.append({
            "id": qid, "query": qtext, "domain": domain,
            "question_type": QUESTION_TYPES[i % len(QUESTION_TYPES)],
            "ground_truth": f"answer {qid}", "false_premise": False,
            "web_refs": add_docs(qid, qtext, f"wrong {qid}", use_html=False),
        })
        kg.append({"entity_id": f"ent-{qid}",
                   "surface_forms": [name.lower()],
                   "attributes": attributes, "as_of": "2024-03-01"})
        script.append({"query_id": qid, "gold_answer": f"answer {qid}",
                       "distractor_answer": f"wrong {qid}",
                       "gold_chunk_id": f"GOLD-ABSENT-{qid}",
                       "distractor_chunk_id": f"wrong {qid}"})

    # --- Category C: open domain, no entity; gold lives in the web. -------
    for i in range(1, 11):
        qid = f"c{i:02d}"
        qtext = f"Which proverb number {i} mentions the lighthouse keeper?"
        queries.append({
            "id": qid, "query": qtext, "domain": "open",
            "question_type": QUESTION_TYPES[i % len(QUESTION_TYPES)],
            "ground_truth": f"answer {qid}", "false_premise": False,
            "web_refs": add_docs(qid, qtext, f"answer {qid}", use_html=False),
        })
        script.append({"query_id": qid,
                       "gold_answer": f"The chronicle records that it is answer {qid}.",
                       "distractor_answer": f"wrong {qid}",
                       "gold_chunk_id": f"answer {qid}",
                       "distractor_chunk_id": f"DIST-ABSENT-{qid}"})

    # --- Category D: music/movie entity; gold in the web, two false-premise.
    for i in range(1, 11):
        qid = f"d{i:02d}"
        false_premise = i in (5, 10)
        if i <= 5:
            name, domain = f"Delta D{i:02d}", "music"
            qtext = f"Who recorded the song {name}?"
            attributes = {"name": name, "genre": "rock"}
        else:
            name, domain = f"Dorado D{i:02d}", "movie"
            qtext = f"Who directed the film {name}?"
            attributes = {"name": name, "director": "J. Smith"}
        if false_premise:
            qtext = qtext.rstrip("?") + " before it was ever made?"
            truth = gold = "invalid question"
            marker = f"FPHINT-{qid}"
        else:
            truth = gold = f"answer {qid}"
            marker = gold
        queries.append({
            "id": qid, "query": qtext, "domain": domain,
            "question_type": "false_premise" if false_premise
            else QUESTION_TYPES[i % len(QUESTION_TYPES)],
            "ground_truth": truth, "false_premise": false_premise,
            "web_refs": add_docs(qid, qtext, marker, use_html=False),
        })
        kg.append({"entity_id": f"ent-{qid}",
                   "surface_forms": [name.lower()],
                   "attributes": attributes, "as_of": "2024-03-01"})
        script.append({"query_id": qid, "gold_answer": gold,
                       "distractor_answer": f"wrong {qid}",
                       "gold_chunk_id": marker,
                       "distractor_chunk_id": f"DIST-ABSENT-{qid}"})

    web_dir = OUT / "web"
    web_dir.mkdir(parents=True, exist_ok=True)
    for doc_id, (is_html, title, paragraphs) in sorted(pages.items()):
        if is_html:
            (web_dir / f"{doc_id}.html").write_text(html_page(title, paragraphs))
        else:
            (web_dir / f"{doc_id}.md").write_text(md_page(title, paragraphs))

    with open(OUT / "queries.jsonl", "w") as f:
        for q in queries:
            f.write(json.dumps(q) + "\n")
    with open(OUT / "kg.jsonl", "w") as f:
        for record in kg:
            f.write(json.dumps(record) + "\n")
    with open(OUT / "script.jsonl", "w") as f:
        for entry in script:
            f.write(json.dumps(entry) + "\n")

    print(f"wrote {len(queries)} queries, {len(pages)} web pages, "
          f"{len(kg)} KG records to {OUT}")


if __name__ == "__main__":
    main()
