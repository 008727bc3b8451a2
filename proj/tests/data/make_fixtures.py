#!/usr/bin/env python3
"""Writes the fixture corpus and its hand-built annotation bundles.

Dependency parses below were written by hand in the spaCy English label
inventory. Sentence spans are code point offsets found by searching the text.
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

PAIRS = [
    {
        "id": "p1",
        "language": "en",
        "topic": "models",
        "original": "The largest model, Llama 3.1, performs best. It is slow.",
        "improved": "The largest model, Llama 3.1, performs best. However, it is quite slow.",
    },
    {
        "id": "p2",
        "language": "en",
        "topic": "weather",
        "original": "She said that he left and Mary argued that it rained.",
        "improved": "She said that he left. Mary argued that it rained, and the match was cancelled.",
    },
    {
        "id": "p3",
        "language": "en",
        "topic": "school uniforms",
        "original": "School uniforms should be mandatory. They reduce bullying. Parents save money on clothes. "
        "Some students dislike them.",
        "improved": "School uniforms should be mandatory, because they reduce bullying and help parents save money "
        "on clothes. Although some students dislike them, the benefits clearly outweigh this concern. "
        "Schools should therefore adopt a uniform policy.",
    },
    {
        "id": "p4",
        "language": "en",
        "topic": "public transport",
        "original": "Public transport should be free. This would reduce traffic. It is not good for the budget, "
        "though.",
        "improved": "Public transport should be free. This would reduce traffic. The budget impact, however, is "
        "a real concern.",
    },
    {
        "id": "p5",
        "language": "de",
        "topic": "Verkehr",
        "original": "Der öffentliche Nahverkehr sollte kostenlos sein. Das würde den Verkehr reduzieren.",
        "improved": "Der öffentliche Nahverkehr sollte kostenlos sein, weil das den Verkehr deutlich reduzieren "
        "würde. Außerdem profitiert die Umwelt.",
    },
]


def tok(surface, dep, head, pos, lemma=None):
    t = {"surface": surface, "dep": dep, "head": head, "pos": pos}
    if lemma:
        t["lemma"] = lemma
    return t


APPOS = [
    tok("The", "det", 2, "DET"),
    tok("largest", "amod", 2, "ADJ"),
    tok("model", "nsubj", 7, "NOUN"),
    tok(",", "punct", 2, "PUNCT"),
    tok("Llama", "appos", 2, "PROPN"),
    tok("3.1", "nummod", 4, "NUM"),
    tok(",", "punct", 2, "PUNCT"),
    tok("performs", "ROOT", -1, "VERB"),
    tok("best", "advmod", 7, "ADV"),
    tok(".", "punct", 7, "PUNCT"),
]

IT_IS_SLOW = [
    tok("It", "nsubj", 1, "PRON"),
    tok("is", "ROOT", -1, "AUX"),
    tok("slow", "acomp", 1, "ADJ"),
    tok(".", "punct", 1, "PUNCT"),
]

HOWEVER_SLOW = [
    tok("However", "advmod", 3, "ADV"),
    tok(",", "punct", 3, "PUNCT"),
    tok("it", "nsubj", 3, "PRON"),
    tok("is", "ROOT", -1, "AUX"),
    tok("quite", "advmod", 5, "ADV"),
    tok("slow", "acomp", 3, "ADJ"),
    tok(".", "punct", 3, "PUNCT"),
]

# Two ccomp dependents of communication verbs, joined as coordinated clauses.
SPEECH = [
    tok("She", "nsubj", 1, "PRON"),
    tok("said", "ROOT", -1, "VERB", "say"),
    tok("that", "mark", 4, "SCONJ"),
    tok("he", "nsubj", 4, "PRON"),
    tok("left", "ccomp", 1, "VERB", "leave"),
    tok("and", "cc", 1, "CCONJ"),
    tok("Mary", "nsubj", 7, "PROPN"),
    tok("argued", "conj", 1, "VERB", "argue"),
    tok("that", "mark", 10, "SCONJ"),
    tok("it", "nsubj", 10, "PRON"),
    tok("rained", "ccomp", 7, "VERB", "rain"),
    tok(".", "punct", 1, "PUNCT"),
]

SHE_SAID = [
    tok("She", "nsubj", 1, "PRON"),
    tok("said", "ROOT", -1, "VERB", "say"),
    tok("that", "mark", 4, "SCONJ"),
    tok("he", "nsubj", 4, "PRON"),
    tok("left", "ccomp", 1, "VERB", "leave"),
    tok(".", "punct", 1, "PUNCT"),
]

MARY_ARGUED = [
    tok("Mary", "nsubj", 1, "PROPN"),
    tok("argued", "ROOT", -1, "VERB", "argue"),
    tok("that", "mark", 4, "SCONJ"),
    tok("it", "nsubj", 4, "PRON"),
    tok("rained", "ccomp", 1, "VERB", "rain"),
    tok(",", "punct", 1, "PUNCT"),
    tok("and", "cc", 1, "CCONJ"),
    tok("the", "det", 8, "DET"),
    tok("match", "nsubjpass", 10, "NOUN"),
    tok("was", "auxpass", 10, "AUX"),
    tok("cancelled", "conj", 1, "VERB", "cancel"),
    tok(".", "punct", 1, "PUNCT"),
]


def spans(text, sentences):
    out, pos = [], 0
    for s in sentences:
        start = text.index(s, pos)
        out.append([start, start + len(s)])
        pos = start + len(s)
    return out


def bundle(pair, side, sentences, **extra):
    text = pair[side]
    b = {"pair_id": pair["id"], "side": side, "sentences": spans(text, sentences)}
    b.update(extra)
    return b


def main():
    with open(os.path.join(HERE, "fixture_pairs.jsonl"), "w", encoding="utf-8") as f:
        for p in PAIRS:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")

    p = {x["id"]: x for x in PAIRS}
    bundles = [
        bundle(
            p["p1"], "original",
            ["The largest model, Llama 3.1, performs best.", "It is slow."],
            tokens=[APPOS, IT_IS_SLOW],
            embeddings=[[0.9, 0.1, 0.0, 0.2], [0.1, 0.8, 0.3, 0.0]],
            rst='(Elaboration[N][S] (text "The largest model, Llama 3.1, performs best.") (text "It is slow."))',
            components=["MajorClaim", "Premise"],
            external_scores={"gruen": 0.82},
        ),
        bundle(
            p["p1"], "improved",
            ["The largest model, Llama 3.1, performs best.", "However, it is quite slow."],
            tokens=[APPOS, HOWEVER_SLOW],
            embeddings=[[0.9, 0.1, 0.0, 0.2], [0.2, 0.7, 0.4, 0.1]],
            rst='(Contrast[N][N] (text "The largest model, Llama 3.1, performs best.") '
            '(text "However, it is quite slow."))',
            components=["MajorClaim", "Claim"],
            external_scores={"gruen": 0.86},
        ),
        bundle(
            p["p2"], "original",
            ["She said that he left and Mary argued that it rained."],
            tokens=[SPEECH],
            components=["Claim"],
        ),
        bundle(
            p["p2"], "improved",
            ["She said that he left.", "Mary argued that it rained, and the match was cancelled."],
            tokens=[SHE_SAID, MARY_ARGUED],
            components=["Claim", "Premise"],
        ),
        bundle(
            p["p5"], "original",
            ["Der öffentliche Nahverkehr sollte kostenlos sein.", "Das würde den Verkehr reduzieren."],
            sentiment_de={"p_pos": 0.04, "p_neg": 0.19, "p_neu": 0.77},
        ),
        bundle(
            p["p5"], "improved",
            ["Der öffentliche Nahverkehr sollte kostenlos sein, weil das den Verkehr deutlich reduzieren würde.",
             "Außerdem profitiert die Umwelt."],
            external_scores={"german_proba_positive": 0.3, "german_proba_negative": 0.1,
                             "german_proba_neutral": 0.6},
        ),
    ]
    ann = os.path.join(HERE, "annotations")
    os.makedirs(ann, exist_ok=True)
    for b in bundles:
        with open(os.path.join(ann, f'{b["pair_id"]}.{b["side"]}.json'), "w", encoding="utf-8") as f:
            json.dump(b, f, ensure_ascii=False, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
