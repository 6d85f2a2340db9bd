"""Deterministic synthetic fixtures for demos and end-to-end tests.

The generated lexicon spans [-1, 1] evenly; the corpus draws tokens
with probability proportional to exp(valence_weight * v), so positive
words are more frequent by construction and every sign-level analysis
result has a known expected direction.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

_CONSONANTS = "bcdfghjklmnprstvwz"
_VOWELS = "aeiou"


def _make_words(n: int, rng: np.random.Generator) -> list[str]:
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < n:
        length = int(rng.integers(3, 10))
        chars = [
            (_CONSONANTS if i % 2 == 0 else _VOWELS)[int(rng.integers(0, 5 if i % 2 else 18))]
            for i in range(length)
        ]
        word = "".join(chars)
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def write_fixture(
    root: Path,
    n_words: int = 50,
    n_tokens: int = 60_000,
    n_docs: int = 20,
    valence_weight: float = 2.0,
    seed: int = 7,
    resample_size: int = 100_000,
    max_context: int = 4,
) -> Path:
    """Write lexicon.csv, corpus/*.txt and config.json under ``root``.

    Returns the config path. Same arguments always produce identical
    files.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    words = _make_words(n_words, rng)
    valences = np.linspace(-1.0, 1.0, n_words)
    raw = 1.0 + 4.0 * (valences + 1.0)  # back onto the 1..9 rating scale

    lexicon_lines = ["word,valence"]
    lexicon_lines += [f"{w},{repr(float(r))}" for w, r in zip(words, raw)]
    (root / "lexicon.csv").write_text("\n".join(lexicon_lines) + "\n", encoding="utf-8")

    probs = np.exp(valence_weight * valences)
    probs /= probs.sum()
    tokens = rng.choice(np.array(words), size=n_tokens, p=probs)

    corpus_dir = root / "corpus"
    corpus_dir.mkdir(exist_ok=True)
    per_doc = n_tokens // n_docs
    for d in range(n_docs):
        chunk = tokens[d * per_doc : (d + 1) * per_doc if d < n_docs - 1 else n_tokens]
        lines = [" ".join(chunk[i : i + 12]) for i in range(0, len(chunk), 12)]
        (corpus_dir / f"doc_{d:03d}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    config = {
        "lexicon": {"path": "lexicon.csv", "scale": "sam-1-9", "language": "synthetic"},
        "corpus": {"raw_dir": "corpus"},
        "max_context": max_context,
        "log_base": "e",
        "bins": 20,
        "resample": {"size": resample_size, "seed": seed},
        "output_dir": "out",
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return config_path
