#!/usr/bin/env python3
"""Independent reference implementation used to freeze test fixtures.

Implements the WMT mteval-13a tokenization and corpus BLEU (case-sensitive,
no smoothing, closest reference length with ties to the shorter reference),
matching the standard scorer's behavior at default settings. Kept separate
from the C++ implementation on purpose: fixtures under tests/data were
produced by this script and the C++ code is checked against them.

Usage:
  reference_bleu.py score HYP_FILE REF_FILE
  reference_bleu.py tokenize < lines.txt       # JSONL: {"input","tokens"}
"""

import json
import math
import re
import sys
from collections import Counter


def tokenize_13a(line: str):
    line = line.replace("<skipped>", "")
    line = line.replace("-\n", "")
    line = line.replace("\n", " ")
    if "&" in line:
        line = line.replace("&quot;", '"')
        line = line.replace("&amp;", "&")
        line = line.replace("&lt;", "<")
        line = line.replace("&gt;", ">")
    line = f" {line} "
    line = re.sub(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])", r" \1 ", line)
    line = re.sub(r"([^0-9])([\.,])", r"\1 \2 ", line)
    line = re.sub(r"([\.,])([^0-9])", r" \1 \2", line)
    line = re.sub(r"([0-9])(-)", r"\1 \2 ", line)
    return line.split()


def ngrams(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(hyps, refs_per_hyp):
    correct = [0] * 4
    total = [0] * 4
    hyp_len = 0
    ref_len = 0
    for hyp, refs in zip(hyps, refs_per_hyp, strict=True):
        hyp_tokens = tokenize_13a(hyp)
        ref_token_lists = [tokenize_13a(r) for r in refs]
        hyp_len += len(hyp_tokens)
        best = min(
            (abs(len(rt) - len(hyp_tokens)), len(rt)) for rt in ref_token_lists
        )
        ref_len += best[1]
        for n in range(1, 5):
            hyp_counts = ngrams(hyp_tokens, n)
            max_ref = Counter()
            for rt in ref_token_lists:
                for gram, count in ngrams(rt, n).items():
                    max_ref[gram] = max(max_ref[gram], count)
            total[n - 1] += max(len(hyp_tokens) - n + 1, 0)
            correct[n - 1] += sum(
                min(count, max_ref[gram]) for gram, count in hyp_counts.items()
            )
    if hyp_len == 0:
        raise ValueError("empty corpus")
    log_sum = 0.0
    for n in range(4):
        if correct[n] == 0 or total[n] == 0:
            return 0.0
        log_sum += math.log(correct[n] / total[n])
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_sum / 4.0)


def main():
    if len(sys.argv) >= 2 and sys.argv[1] == "score":
        with open(sys.argv[2], encoding="utf-8") as f:
            hyps = [line.rstrip("\n") for line in f]
        with open(sys.argv[3], encoding="utf-8") as f:
            refs = [[line.rstrip("\n")] for line in f]
        print(f"{corpus_bleu(hyps, refs):.6f}")
    elif len(sys.argv) >= 2 and sys.argv[1] == "tokenize":
        for line in sys.stdin:
            text = json.loads(line)
            print(json.dumps({"input": text, "tokens": tokenize_13a(text)}))
    else:
        sys.exit(__doc__)


if __name__ == "__main__":
    main()
