"""
Synthetic BIO-tagged medical entity data.

Sentences mix filler words with entity spans drawn from fixed per-class
lexicons (disease, organ, symptom, drug). Each span is a head word tagged
B-<CLASS>, optionally followed by a tail word tagged I-<CLASS>. Entity
classes rotate through the corpus, which keeps every class above 5% of the
tokens for any corpus of ten or more sentences.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

ENTITY_CLASSES = ("DISEASE", "ORGAN", "SYMPTOM", "DRUG")
OUTSIDE = "O"
TAGS = (OUTSIDE,) + tuple(f"{prefix}-{c}" for c in ENTITY_CLASSES for prefix in ("B", "I"))
TAG_INDEX = {tag: i for i, tag in enumerate(TAGS)}

SPLITS = ("train", "test")
MIN_SENTENCES = 10

# fmt: off
_HEADS = {
    "DISEASE": (
        "gastritis", "nephritis", "fibrosis", "sclerosis", "anemia", "leukemia",
        "dermatitis", "arthrosis", "hepatitis", "neuralgia", "myopathy", "colitis",
    ),
    "ORGAN": (
        "liver", "kidney", "pancreas", "spleen", "lung", "heart",
        "stomach", "colon", "thyroid", "bladder", "retina", "cortex",
    ),
    "SYMPTOM": (
        "fever", "cough", "nausea", "fatigue", "headache", "rash",
        "dizziness", "swelling", "itching", "cramps", "insomnia", "vomiting",
    ),
    "DRUG": (
        "amoxicillin", "ibuprofen", "metformin", "warfarin", "lisinopril", "omeprazole",
        "atorvastatin", "paracetamol", "prednisone", "insulin", "heparin", "cetirizine",
    ),
}
# fmt: on

_TAILS = {
    "DISEASE": ("syndrome", "disorder", "complex", "variant"),
    "ORGAN": ("lobe", "tissue", "wall", "duct"),
    "SYMPTOM": ("episodes", "onset", "spells", "bouts"),
    "DRUG": ("tablets", "injection", "capsules", "syrup"),
}

# fmt: off
_FILLER = (
    "the", "patient", "reported", "with", "and", "after", "was", "treated",
    "by", "of", "showed", "signs", "in", "a", "doctor", "noted",
    "since", "during", "prescribed", "examined", "week", "for", "then", "also",
)
# fmt: on

# probability that an entity span gets a tail word
_TAIL_PROB = 0.4


class DatasetError(ValueError):
    """Malformed token/tag data."""

    pass


def tag_class(tag: str) -> str:
    """Entity class of a tag, or "O"."""
    return OUTSIDE if tag == OUTSIDE else tag.split("-", 1)[1]


def validate_bio(tags: Sequence[str]) -> List[str]:
    """Return the BIO violations of one tag sequence (empty when valid).

    Every I-X must follow a B-X or I-X, and every tag must be in TAGS.
    """
    problems = []
    previous = OUTSIDE
    for i, tag in enumerate(tags):
        if tag not in TAG_INDEX:
            problems.append(f"position {i}: unknown tag '{tag}'")
            tag = OUTSIDE
        elif tag.startswith("I-") and tag_class(previous) != tag_class(tag):
            problems.append(f"position {i}: '{tag}' follows '{previous}'")
        previous = tag
    return problems


@dataclass
class TokenDataset:
    """Tokenized sentences with aligned BIO tags and a train/test split.

    Attributes:
        sentences: Token sequences.
        labels: Tag sequences, aligned 1:1 with ``sentences``.
        split: "train" or "test" per sentence.
    """

    sentences: List[List[str]]
    labels: List[List[str]]
    split: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.split:
            self.split = ["train"] * len(self.sentences)
        if not (len(self.sentences) == len(self.labels) == len(self.split)):
            raise DatasetError(
                f"{len(self.sentences)} sentences, {len(self.labels)} tag sequences and "
                f"{len(self.split)} split entries"
            )
        for i, (tokens, tags) in enumerate(zip(self.sentences, self.labels)):
            if len(tokens) != len(tags):
                raise DatasetError(f"sentence {i}: {len(tokens)} tokens but {len(tags)} tags")
            problems = validate_bio(tags)
            if problems:
                raise DatasetError(f"sentence {i}: {problems[0]}")
        unknown = sorted(set(self.split) - set(SPLITS))
        if unknown:
            raise DatasetError(f"Unknown split names: {unknown}")

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def subset(self, name: str) -> "TokenDataset":
        """Sentences of one split, in corpus order."""
        keep = [i for i, s in enumerate(self.split) if s == name]
        return TokenDataset(
            [self.sentences[i] for i in keep],
            [self.labels[i] for i in keep],
            [name] * len(keep),
        )

    @property
    def train(self) -> "TokenDataset":
        return self.subset("train")

    @property
    def test(self) -> "TokenDataset":
        return self.subset("test")

    def class_histogram(self) -> Dict[str, int]:
        """Token counts per class ("O" included)."""
        counts = {c: 0 for c in (OUTSIDE,) + ENTITY_CLASSES}
        for tags in self.labels:
            for tag in tags:
                counts[tag_class(tag)] += 1
        return counts

    def to_tsv(self) -> str:
        """token<TAB>tag lines, a blank line after each sentence."""
        lines = []
        for tokens, tags in zip(self.sentences, self.labels):
            lines.extend(f"{tok}\t{tag}" for tok, tag in zip(tokens, tags))
            lines.append("")
        return "\n".join(lines) + ("\n" if lines else "")

    def write_tsv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_tsv(), encoding="utf-8")
        return path

    @classmethod
    def from_tsv(cls, text: str, split: str = "train") -> "TokenDataset":
        """Parse token<TAB>tag lines; blank lines separate sentences.

        Raises:
            DatasetError: A line is not a token/tag pair or the tags are not valid BIO.
        """
        sentences, labels = [], []
        tokens: List[str] = []
        tags: List[str] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                if tokens:
                    sentences.append(tokens)
                    labels.append(tags)
                    tokens, tags = [], []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DatasetError(f"line {lineno}: expected 'token<TAB>tag', got '{line}'")
            tokens.append(parts[0])
            tags.append(parts[1].strip())
        if tokens:
            sentences.append(tokens)
            labels.append(tags)
        return cls(sentences, labels, [split] * len(sentences))

    @classmethod
    def read_tsv(cls, path: Union[str, Path], split: str = "train") -> "TokenDataset":
        return cls.from_tsv(Path(path).read_text(encoding="utf-8"), split)

    @classmethod
    def concat(cls, parts: Sequence["TokenDataset"]) -> "TokenDataset":
        sentences, labels, split = [], [], []
        for part in parts:
            sentences.extend(part.sentences)
            labels.extend(part.labels)
            split.extend(part.split)
        return cls(sentences, labels, split)


def generate_synthetic(
    seed: int, num_sentences: int = 200, test_fraction: float = 0.25
) -> TokenDataset:
    """Generate a seeded synthetic corpus.

    Each sentence holds 2-4 entity spans separated by 1-2 filler words, with
    at most one filler word before the first span and exactly one after the
    last.

    Args:
        seed: Seed of the numpy generator.
        num_sentences: Corpus size (>= 10).
        test_fraction: Share of sentences assigned to the test split.

    Returns:
        The dataset; identical for identical arguments.
    """
    if num_sentences < MIN_SENTENCES:
        raise ValueError(f"num_sentences must be >= {MIN_SENTENCES}, got {num_sentences}")
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in [0, 1), got {test_fraction}")

    rng = np.random.default_rng(seed)
    next_class = int(rng.integers(len(ENTITY_CLASSES)))
    sentences, labels = [], []

    def filler(tokens, tags, count):
        for _ in range(count):
            tokens.append(_FILLER[int(rng.integers(len(_FILLER)))])
            tags.append(OUTSIDE)

    for _ in range(num_sentences):
        tokens: List[str] = []
        tags: List[str] = []
        filler(tokens, tags, int(rng.integers(0, 2)))
        num_entities = int(rng.integers(2, 5))
        for j in range(num_entities):
            if j > 0:
                filler(tokens, tags, int(rng.integers(1, 3)))
            cls = ENTITY_CLASSES[next_class]
            next_class = (next_class + 1) % len(ENTITY_CLASSES)
            heads, tails = _HEADS[cls], _TAILS[cls]
            tokens.append(heads[int(rng.integers(len(heads)))])
            tags.append(f"B-{cls}")
            if rng.random() < _TAIL_PROB:
                tokens.append(tails[int(rng.integers(len(tails)))])
                tags.append(f"I-{cls}")
        filler(tokens, tags, 1)
        sentences.append(tokens)
        labels.append(tags)

    num_test = int(round(test_fraction * num_sentences))
    split = ["train"] * num_sentences
    for i in rng.permutation(num_sentences)[:num_test]:
        split[int(i)] = "test"
    return TokenDataset(sentences, labels, split)
