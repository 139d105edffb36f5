"""Control-sentence text pipeline: tag parsing from captions, Bernoulli
dropping, shuffling, control-sentence assembly, and query templates for
decoder score post-processing.

Tag extraction is longest-match n-gram scanning (n <= 3) against a tag
vocabulary: deterministic and dependency-free. A POS-tagger could be plugged
in upstream by pre-tokenizing captions, but is deliberately not built in.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from importlib import resources

SEP_TOKEN = "[SEP]"
MAX_NGRAM = 3
DEFAULT_KEEP_PROB = 0.5

_WORD_RE = re.compile(r"[^a-z0-9]+")


@dataclass(frozen=True)
class TagVocab:
    """Ordered set of lowercase tag phrases."""

    tags: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for tag in self.tags:
            if not tag:
                raise ValueError("vocab entries must be non-empty")
            if tag != tag.lower():
                raise ValueError(f"vocab entries must be lowercase: {tag!r}")
            if tag in seen:
                raise ValueError(f"duplicate vocab entry: {tag!r}")
            seen.add(tag)
        object.__setattr__(self, "_set", seen)

    def __contains__(self, phrase: str) -> bool:
        return phrase in self._set

    def __len__(self) -> int:
        return len(self.tags)

    @classmethod
    def from_iterable(cls, tags) -> "TagVocab":
        return cls(tuple(tags))

    @classmethod
    def from_file(cls, path) -> "TagVocab":
        """Load a newline-delimited UTF-8 vocab file; blank lines ignored."""
        with open(path, encoding="utf-8") as f:
            return cls(tuple(line.strip() for line in f if line.strip()))


def demo_vocab() -> TagVocab:
    """The small vocabulary shipped for tests and demos (the full production
    tag list is an external asset)."""
    text = resources.files("dynview").joinpath("data/demo_vocab.txt").read_text("utf-8")
    return TagVocab(tuple(line.strip() for line in text.splitlines() if line.strip()))


def _words(caption: str) -> list[str]:
    return [w for w in _WORD_RE.split(caption.lower()) if w]


def parse_tags(caption: str, vocab: TagVocab) -> list[str]:
    """Scan the caption left-to-right for longest-match vocab n-grams.

    Matches are non-overlapping; the output keeps each tag once, in order of
    first occurrence.
    """
    words = _words(caption)
    found: list[str] = []
    seen: set[str] = set()
    i = 0
    while i < len(words):
        for n in range(min(MAX_NGRAM, len(words) - i), 0, -1):
            phrase = " ".join(words[i:i + n])
            if phrase in vocab:
                if phrase not in seen:
                    seen.add(phrase)
                    found.append(phrase)
                i += n
                break
        else:
            i += 1
    return found


def drop_tags(tags: list[str], keep_prob: float, seed: int) -> list[str]:
    """Keep each tag independently with probability ``keep_prob``;
    deterministic per seed, relative order preserved."""
    if not 0.0 <= keep_prob <= 1.0:
        raise ValueError(f"keep_prob must be in [0, 1], got {keep_prob}")
    rng = random.Random(seed)
    return [tag for tag in tags if rng.random() < keep_prob]


def build_control_sentence(tags: list[str], shuffle_seed: int | None = None) -> str:
    """Join tags with ", " and append the separator token, optionally after a
    seeded shuffle. With no tags the sentence is just the separator."""
    tags = list(tags)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(tags)
    return ", ".join(tags) + SEP_TOKEN


def split_control_sentence(sentence: str) -> list[str]:
    """Inverse of :func:`build_control_sentence` (up to shuffle order)."""
    if not sentence.endswith(SEP_TOKEN):
        raise ValueError(f"control sentence must end with {SEP_TOKEN}: {sentence!r}")
    body = sentence[:-len(SEP_TOKEN)]
    return body.split(", ") if body else []


def format_queries(kind: str, names: list[str]) -> list[str]:
    """Query templates for scoring: categories as "a photo of a {name}",
    attributes as "the object has {name}"."""
    if not names:
        raise ValueError("names must be non-empty")
    if kind == "category":
        return [f"a photo of a {name}" for name in names]
    if kind == "attribute":
        return [f"the object has {name}" for name in names]
    raise ValueError(f"kind must be 'category' or 'attribute', got {kind!r}")


def threshold_tags(scores: list[tuple[str, float]], tau: float) -> list[str]:
    """Tags whose confidence exceeds ``tau``, sorted by descending confidence
    (ties keep input order)."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    for tag, conf in scores:
        if not 0.0 <= conf <= 1.0:
            raise ValueError(f"confidence out of [0, 1] for {tag!r}: {conf}")
    kept = [(tag, conf) for tag, conf in scores if conf > tau]
    kept.sort(key=lambda tc: -tc[1])
    return [tag for tag, _ in kept]
