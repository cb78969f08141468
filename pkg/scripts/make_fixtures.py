#!/usr/bin/env python3
"""Regenerate the committed synthetic corpus under tests/fixtures/corpus.

The corpus is a pure function of the seed; rerunning this script must be a
no-op unless the generator changed (a test asserts exactly that).
"""

from pathlib import Path

from taxotrace.fixtures import build_corpus

CORPUS_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus"


def main() -> None:
    written = build_corpus(CORPUS_DIR, seed=7, artifact_count=24)
    for role in sorted(written):
        print(f"{role}: {written[role].relative_to(CORPUS_DIR.parent.parent.parent)}")


if __name__ == "__main__":
    main()
