"""Regenerate src/lexicon_words.inc from the wordfreq English frequency list.

Usage: python3 tools/gen_lexicon.py > src/lexicon_words.inc
"""
import re

import wordfreq

N_WORDS = 5000


def main():
    words = [w for w in wordfreq.top_n_list("en", 3 * N_WORDS) if re.fullmatch(r"[a-z]+", w)]
    words = words[:N_WORDS]
    print("// Generated by tools/gen_lexicon.py; most frequent first.")
    line = ""
    for w in words:
        item = f'"{w}",'
        if len(line) + len(item) + 1 > 96:
            print(line.rstrip())
            line = ""
        line += item + " "
    if line:
        print(line.rstrip())


if __name__ == "__main__":
    main()
