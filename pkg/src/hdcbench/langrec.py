"""Language identification from character n-gram hypervectors.

A gram such as ``"the"`` is encoded as ``p^0(t) * p^1(h) * p^2(e)`` where
``p^j`` is a cyclic shift by ``j`` and ``*`` the kind's binding.  A language
vector is the bundle of every gram of its training sentences; a text is
classified by its nearest language vector.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .algebra import Accumulator, bind_rows, permute_rows
from .errors import DataError, EncodingError, UnsupportedOperationError
from .item_memory import ItemMemory
from .serialization import read_container, write_container
from .similarity import prepare, score
from .spaces import Hypervector, SeededRng, VsaConfig, VsaKind, random_vector

_WS = re.compile(r"\s+")
LANGREC_MAX_DENSITY = 0.5


def normalize_text(text: str) -> str:
    """Lowercase and collapse every whitespace run to a single space."""
    return _WS.sub(" ", text.lower()).strip()


def ngrams(text: str, n: int) -> list[str]:
    return [text[i : i + n] for i in range(len(text) - n + 1)]


# --------------------------------------------------------------------------
# corpus


@dataclass
class LanguageData:
    label: str
    train: list[str]
    test: list[str]


@dataclass
class Corpus:
    languages: list[LanguageData]
    alphabet: tuple[str, ...] = ()

    def __post_init__(self):
        labels = [lang.label for lang in self.languages]
        if len(set(labels)) != len(labels):
            raise DataError("language labels must be unique")
        if not self.alphabet:
            chars = {" "}
            for lang in self.languages:
                for s in lang.train:
                    chars.update(s)
            self.alphabet = tuple(sorted(chars))

    @property
    def labels(self) -> list[str]:
        return [lang.label for lang in self.languages]


def _read_lines(path: Path) -> list[str]:
    if not path.exists():
        return []
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return [s for s in (normalize_text(line) for line in text.splitlines()) if s]


def load_corpus(root: str | Path) -> Corpus:
    """Read ``<root>/<label>/train.txt`` and ``test.txt`` (one sentence per line)."""
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"corpus directory {root} does not exist")
    langs = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        train = _read_lines(sub / "train.txt")
        test = _read_lines(sub / "test.txt")
        if train or test:
            langs.append(LanguageData(sub.name, train, test))
    if not langs:
        raise DataError(f"no language directories with train.txt/test.txt under {root}")
    return Corpus(langs)


def write_corpus(corpus: Corpus, root: str | Path) -> None:
    root = Path(root)
    for lang in corpus.languages:
        d = root / lang.label
        d.mkdir(parents=True, exist_ok=True)
        (d / "train.txt").write_text("".join(s + "\n" for s in lang.train), encoding="utf-8")
        (d / "test.txt").write_text("".join(s + "\n" for s in lang.test), encoding="utf-8")


def synthetic_corpus(
    n_languages: int = 5,
    n_train: int = 200,
    n_test: int = 50,
    seed: int = 0,
    letters: str = "abcdefghijklmnopqrstuvwxyz",
    concentration: float = 0.3,
) -> Corpus:
    """Toy languages whose words come from language-specific letter Markov chains.

    Each language draws its own transition matrix from a Dirichlet prior, a
    vocabulary of 300 words from that chain, and Zipf-distributed sentences
    of 4 to 12 words.  Smaller ``concentration`` makes languages more distinct.
    """
    if n_languages < 1 or n_train < 0 or n_test < 0:
        raise ValueError("corpus sizes must be non-negative and n_languages positive")
    chars = np.array(list(letters))
    L = len(chars)
    langs = []
    for li in range(n_languages):
        gen = SeededRng(seed, ("corpus", li)).generator()
        start = gen.dirichlet(np.full(L, concentration))
        trans = gen.dirichlet(np.full(L, concentration), size=L)
        vocab = []
        for _ in range(300):
            length = int(gen.integers(2, 9))
            c = gen.choice(L, p=start)
            word = [c]
            for _ in range(length - 1):
                c = gen.choice(L, p=trans[c])
                word.append(c)
            vocab.append("".join(chars[word]))
        ranks = np.arange(1, len(vocab) + 1, dtype=np.float64)
        zipf = (1.0 / ranks) / (1.0 / ranks).sum()

        def sentence():
            n_words = int(gen.integers(4, 13))
            return " ".join(vocab[i] for i in gen.choice(len(vocab), size=n_words, p=zipf))

        train = [sentence() for _ in range(n_train)]
        test = [sentence() for _ in range(n_test)]
        langs.append(LanguageData(f"lang{li}", train, test))
    return Corpus(langs, tuple(sorted(set(letters) | {" "})))


# --------------------------------------------------------------------------
# model


@dataclass
class LanguageModel:
    cfg: VsaConfig
    n: int
    alphabet: tuple[str, ...]
    letters: ItemMemory
    languages: ItemMemory
    skipped: dict[str, int] = field(default_factory=dict)
    _cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def letter_row(self, ch: str) -> np.ndarray:
        if ch not in self.letters:
            raise EncodingError(f"character {ch!r} is not in the model alphabet")
        return self.letters[ch].to_dense()


def _bundle_cfg(cfg: VsaConfig) -> VsaConfig:
    if cfg.is_sparse:
        return VsaConfig(cfg.kind, cfg.dim, cfg.density, cfg.segments, cfg.seed, LANGREC_MAX_DENSITY)
    return cfg


def new_model(cfg: VsaConfig, alphabet: Iterable[str], n: int = 3) -> LanguageModel:
    """Model with one random letter vector per alphabet character."""
    if cfg.kind is VsaKind.BSDC_CDT:
        raise UnsupportedOperationError(
            "BSDC-CDT is not usable for n-gram encoding (its binding is not implemented)"
        )
    if n < 1:
        raise ValueError("n-gram order must be positive")
    cfg = _bundle_cfg(cfg)
    alphabet = tuple(sorted(set(alphabet) | {" "}))
    base = SeededRng(cfg.seed, ("letters",))
    letters = ItemMemory(cfg, ((ch, random_vector(cfg, base.child(ord(ch)))) for ch in alphabet))
    return LanguageModel(cfg, n, alphabet, letters, ItemMemory(cfg))


def _gram_rows(model: LanguageModel, grams: Sequence[str]) -> np.ndarray:
    missing = sorted({g for g in grams if g not in model._cache})
    by_len: dict[int, list[str]] = {}
    for g in missing:
        by_len.setdefault(len(g), []).append(g)
    for group in by_len.values():
        for g, row in zip(group, _encode_rows(model, group)):
            model._cache[g] = row
    return np.vstack([model._cache[g] for g in grams])


def _encode_rows(model: LanguageModel, grams: Sequence[str]) -> np.ndarray:
    """Encode equal-length grams together so each bind step is one batched call."""
    cfg = model.cfg
    acc = np.vstack([model.letter_row(g[0]) for g in grams])
    for j in range(1, len(grams[0])):
        keys = permute_rows(np.vstack([model.letter_row(g[j]) for g in grams]), j)
        acc = bind_rows(cfg, keys, acc)
    return np.ascontiguousarray(acc)


def encode_ngram(model: LanguageModel, gram: str) -> Hypervector:
    """Bind the position-shifted letter vectors of ``gram``."""
    bad = [ch for ch in gram if ch not in model.letters]
    if bad:
        raise EncodingError(f"characters not in the model alphabet: {''.join(sorted(set(bad)))!r}")
    row = _gram_rows(model, [gram])[0]
    cfg = model.cfg
    if cfg.is_sparse:
        return Hypervector(cfg.kind, np.flatnonzero(row), dim=cfg.dim)
    return Hypervector(cfg.kind, row)


def _profile(model: LanguageModel, texts: Iterable[str], stream) -> tuple[Hypervector | None, int]:
    """Bundle of every gram of ``texts`` plus the number of texts too short to contribute."""
    counts: Counter[str] = Counter()
    short = 0
    for t in texts:
        t = normalize_text(t)
        grams = ngrams(t, model.n)
        if not grams:
            short += 1
            continue
        bad = set(t) - set(model.alphabet)
        if bad:
            raise EncodingError(f"characters not in the model alphabet: {''.join(sorted(bad))!r}")
        counts.update(grams)
    if not counts:
        return None, short
    grams = sorted(counts)
    acc = Accumulator(model.cfg)
    acc.add_rows(_gram_rows(model, grams), np.array([counts[g] for g in grams]))
    return acc.finalize(SeededRng(model.cfg.seed, stream), thinning="frequency"), short


def train_language(model: LanguageModel, label: str, sentences: Iterable[str]) -> LanguageModel:
    """Add the language vector of ``label``; sentences shorter than n are skipped and counted."""
    if label in model.languages:
        raise ValueError(f"language {label!r} is already trained")
    vec, short = _profile(model, sentences, ("langrec-train", label))
    model.skipped[label] = short
    if vec is None:
        raise DataError(f"language {label!r} has no sentence with at least {model.n} characters")
    model.languages.add(label, vec)
    return model


def train(cfg: VsaConfig, corpus: Corpus, n: int = 3) -> LanguageModel:
    model = new_model(cfg, corpus.alphabet, n)
    for lang in corpus.languages:
        train_language(model, lang.label, lang.train)
    return model


def classify(model: LanguageModel, text: str) -> tuple[str, float, list[tuple[str, float]]]:
    """Nearest language of ``text`` with its score and the full ranking."""
    if len(model.languages) == 0:
        raise DataError("model has no trained languages")
    vec, _ = _profile(model, [text], ("langrec-query",))
    if vec is None:
        raise DataError(f"text {text!r} has no {model.n}-gram to classify")
    ranking = model.languages.query_top_k(vec, len(model.languages))
    return ranking[0][0], ranking[0][1], ranking


@dataclass
class Evaluation:
    per_language: dict[str, float]
    overall: float
    n_test: int
    predictions: list[tuple[str, str, str]]  # (true label, predicted label, sentence)


def evaluate(model: LanguageModel, corpus: Corpus, shuffle_labels_seed: int | None = None) -> Evaluation:
    """Fraction of test sentences classified correctly, per language and overall.

    With ``shuffle_labels_seed`` the true labels are randomly permuted
    first, which gives a chance-level control.
    """
    items = [(lang.label, s) for lang in corpus.languages for s in lang.test]
    if not items:
        raise DataError("corpus has no test sentences")
    truth = [lab for lab, _ in items]
    if shuffle_labels_seed is not None:
        gen = SeededRng(shuffle_labels_seed, ("label-shuffle",)).generator()
        truth = [truth[i] for i in gen.permutation(len(truth))]
    preds = []
    hits: dict[str, list[int]] = {}
    for lab, (_, sentence) in zip(truth, items):
        try:
            guess = classify(model, sentence)[0]
        except DataError:
            guess = ""
        preds.append((lab, guess, sentence))
        hits.setdefault(lab, []).append(int(guess == lab))
    per = {lab: float(np.mean(v)) for lab, v in hits.items()}
    overall = float(np.mean([p[0] == p[1] for p in preds]))
    return Evaluation(per, overall, len(items), preds)


def language_scores(model: LanguageModel, texts: Sequence[str]) -> np.ndarray:
    """Similarity of each text's gram bundle to every language vector."""
    vecs = []
    for t in texts:
        v, _ = _profile(model, [t], ("langrec-query",))
        if v is None:
            raise DataError(f"text {t!r} has no {model.n}-gram")
        vecs.append(v)
    return score(prepare(model.cfg.kind, vecs), model.languages.matrix())


def save_model(model: LanguageModel, path: str | Path) -> None:
    write_container(
        path,
        {"letters": model.letters.entries(), "languages": model.languages.entries()},
        metadata={"config": model.cfg.to_dict(), "n": model.n, "alphabet": list(model.alphabet)},
    )


def load_model(path: str | Path) -> LanguageModel:
    sections, meta = read_container(path)
    try:
        cfg = VsaConfig.from_dict(meta["config"])
        n = int(meta["n"])
        alphabet = tuple(meta["alphabet"])
        letters = ItemMemory(cfg, sections["letters"])
        languages = ItemMemory(cfg, sections["languages"])
    except KeyError as exc:
        raise DataError(f"{path} is not a language model: missing {exc}") from exc
    return LanguageModel(cfg, n, alphabet, letters, languages)
