"""Looks up syllable counts in the CMU pronouncing dictionary.

The counts printed here are frozen into tests/test_textproc.cpp.
Requires the `cmudict` package.
"""
import cmudict

WORDS = ["cat", "beautiful", "table", "encyclopedia", "the", "sat", "mat",
         "little", "make", "apple", "argument", "communication"]


def main():
    d = cmudict.dict()
    for w in WORDS:
        prons = d[w]
        counts = sorted({sum(ph[-1].isdigit() for ph in p) for p in prons})
        print(w, counts)


if __name__ == "__main__":
    main()
