"""Writes bleu_pairs.json: 50 prediction/reference pairs derived from the
bundled mini corpus, with scores from sacrebleu (add-k smoothing, k = 1,
no extra tokenization over space-joined tokens). Rerun only to change the
fixture."""

import json
import random
import re

import sacrebleu
from sacrebleu.metrics import BLEU

TOKEN = re.compile(r'"[^"\s]*"|[A-Za-z_][A-Za-z0-9_]*|\d+(?:\.\d+)?[LfdF]?|>>>=|>>=|<<=|>>>|>>|<<|[-+*/%&|^!=<>]=|&&|\|\||\+\+|--|->|::|[^\s]')

rng = random.Random(7)
targets = []
for line in open("../../../../data/mini/corpus.jsonl"):
    s = json.loads(line)
    if s["partition"] == "test":
        targets.append(s["target"])

vocab = sorted({t for code in targets for t in TOKEN.findall(code)})


def mutate(tokens):
    out = list(tokens)
    kind = rng.choice(["edit", "edit", "edit", "truncate", "shuffle", "copy"])
    if kind == "truncate":
        return out[: rng.randint(1, max(1, len(out) // 2))]
    if kind == "shuffle":
        rng.shuffle(out)
        return out
    if kind == "copy":
        return out
    for _ in range(rng.randint(1, 8)):
        op = rng.choice(["del", "sub", "ins"])
        i = rng.randrange(len(out) + 1)
        if op == "del" and i < len(out):
            del out[i]
        elif op == "sub" and i < len(out):
            out[i] = rng.choice(vocab)
        else:
            out.insert(i, rng.choice(vocab))
    return out


pairs = []
for i in range(50):
    ref = TOKEN.findall(rng.choice(targets))
    if i == 17:
        cand = []
    elif i == 31:
        cand = TOKEN.findall(rng.choice(targets))
    else:
        cand = mutate(ref)
    pairs.append({"prediction": cand, "reference": ref})

bleu = BLEU(tokenize="none", smooth_method="add-k", smooth_value=1)


def score(ps):
    return bleu.corpus_score([" ".join(p["prediction"]) for p in ps], [[" ".join(p["reference"]) for p in ps]]).score / 100


for p in pairs:
    p["sentence_bleu"] = score([p])

fixture = {
    "oracle": f"sacrebleu {sacrebleu.__version__}",
    "corpus_bleu": score(pairs),
    "first5_corpus_bleu": score(pairs[:5]),
    "pairs": pairs,
}
json.dump(fixture, open("bleu_pairs.json", "w"), indent=1)
print(fixture["corpus_bleu"], fixture["first5_corpus_bleu"])
