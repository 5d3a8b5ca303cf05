"""Behavioral feature extraction: RawAccount -> fixed-length FeatureVector.

The shipped registry has 44 features in six categories (profile metadata,
contact aggregates, interaction network, temporal, content, sentiment).
Missing data never produces NaN: degenerate inputs get a 0 sentinel plus an
explicit has_* availability flag so trees can split on availability.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .accounts import Corpus, LabeledAccount, RawAccount
from .errors import EmptyHistogram, RegistryMismatch

SECONDS_PER_DAY = 86400
GAP_ENTROPY_BINS = 10       # equal-width bins over log1p(gap seconds)
GAP_LOG_RANGE = (0.0, float(np.log1p(30 * SECONDS_PER_DAY)))  # caps at 30 days
AROUSAL_ENTROPY_BINS = 10   # equal-width bins over the fixed [0, 9] scale

CATEGORIES = ("user_meta", "friends", "network", "temporal", "content", "sentiment")

_REGISTRY_SPEC = (
    ("followers_count", "user_meta"),
    ("friends_count", "user_meta"),
    ("statuses_count", "user_meta"),
    ("favourites_count", "user_meta"),
    ("account_age_days", "user_meta"),
    ("tweets_per_day", "user_meta"),
    ("friend_follower_ratio", "user_meta"),
    ("description_length", "user_meta"),
    ("verified", "user_meta"),
    ("contact_followers_mean", "friends"),
    ("contact_followers_std", "friends"),
    ("contact_friends_mean", "friends"),
    ("contact_friends_std", "friends"),
    ("contact_friend_follower_ratio_max", "friends"),
    ("contact_count", "friends"),
    ("mentioned_users_distinct", "network"),
    ("retweeted_users_distinct", "network"),
    ("mention_rate", "network"),
    ("unique_contact_ratio", "network"),
    ("retweet_concentration", "network"),
    ("gap_mean_s", "temporal"),
    ("gap_std_s", "temporal"),
    ("gap_min_s", "temporal"),
    ("gap_max_s", "temporal"),
    ("gap_entropy", "temporal"),
    ("hour_entropy", "temporal"),
    ("has_timeline", "temporal"),
    ("word_entropy", "content"),
    ("words_per_tweet_mean", "content"),
    ("adjective_freq_mean", "content"),
    ("adjective_freq_std", "content"),
    ("url_ratio", "content"),
    ("hashtag_ratio", "content"),
    ("tweet_retweet_ratio", "content"),
    ("retweet_count_max", "content"),
    ("favorite_count_min", "content"),
    ("valence_mean", "sentiment"),
    ("valence_std", "sentiment"),
    ("arousal_mean", "sentiment"),
    ("arousal_std", "sentiment"),
    ("arousal_entropy", "sentiment"),
    ("happiness_mean", "sentiment"),
    ("happiness_std", "sentiment"),
    ("has_sentiment", "sentiment"),
)


@dataclass(frozen=True)
class FeatureRegistry:
    """Ordered (index, name, category) entries plus a version digest."""

    entries: tuple[tuple[int, str, str], ...]
    version_hash: str

    @property
    def size(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [name for _, name, _ in self.entries]

    def index_of(self, name: str) -> int:
        for i, n, _ in self.entries:
            if n == name:
                return i
        raise KeyError(name)

    def to_obj(self) -> dict:
        return {
            "version_hash": self.version_hash,
            "features": [
                {"index": i, "name": n, "category": c} for i, n, c in self.entries
            ],
        }


def _build_registry() -> FeatureRegistry:
    names = [name for name, _ in _REGISTRY_SPEC]
    assert len(names) == len(set(names)) == 44
    digest = hashlib.sha256("\n".join(names).encode()).hexdigest()[:16]
    entries = tuple(
        (i, name, cat) for i, (name, cat) in enumerate(_REGISTRY_SPEC)
    )
    return FeatureRegistry(entries=entries, version_hash=digest)


REGISTRY = _build_registry()


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    registry_hash: str


@dataclass(frozen=True)
class SentimentLexicon:
    """word -> (valence, arousal, happiness), all on a [0, 9] scale."""

    entries: dict


def load_lexicon_tsv(text: str) -> SentimentLexicon:
    entries = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        word, v, a, h = line.split("\t")
        scores = (float(v), float(a), float(h))
        if not all(0.0 <= s <= 9.0 for s in scores):
            raise ValueError(f"lexicon scores for '{word}' outside [0, 9]")
        entries[word.lower()] = scores
    return SentimentLexicon(entries=entries)


@lru_cache(maxsize=1)
def default_lexicon() -> SentimentLexicon:
    text = resources.files("botforest.data").joinpath("sentiment_lexicon.tsv").read_text("utf-8")
    return load_lexicon_tsv(text)


@lru_cache(maxsize=1)
def default_adjectives() -> frozenset:
    text = resources.files("botforest.data").joinpath("adjectives.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def shannon_entropy(counts) -> float:
    """Shannon entropy in bits of a histogram of non-negative counts.

    Computed as log2(n) - sum(c*log2(c))/n, which is algebraically
    -sum(p*log2(p)) but exact for uniform histograms (e.g. k singleton
    counts give exactly log2(k)).
    """
    arr = np.asarray(counts, dtype=np.float64)
    if arr.size == 0 or not np.all(arr >= 0):
        raise EmptyHistogram("counts must be non-negative and non-empty")
    total = arr.sum()
    if total <= 0:
        raise EmptyHistogram("at least one positive count required")
    # sorting canonicalizes the reduction order, keeping the result
    # invariant to how the histogram was assembled; the clamp handles
    # single-bin inputs like [5] that round to a tiny negative
    pos = np.sort(arr[arr > 0])
    return max(0.0, float(np.log2(total) - np.dot(pos, np.log2(pos)) / total))


def _entropy_or_zero(counts) -> float:
    arr = np.asarray(counts, dtype=np.float64)
    if arr.size == 0 or arr.sum() <= 0:
        return 0.0
    return shannon_entropy(arr)


def tokenize(text: str) -> list[str]:
    """Lowercased whitespace-delimited alphanumeric tokens."""
    return [t for t in text.lower().split() if t.isalnum()]


def _mean_std(values: list[float]) -> tuple[float, float]:
    """Population mean/std; values are sorted first so the reduction is
    invariant to tweet order."""
    if not values:
        return 0.0, 0.0
    arr = np.sort(np.asarray(values, dtype=np.float64))
    return float(arr.mean()), float(arr.std())


def extract_features(
    account: RawAccount,
    lexicon: SentimentLexicon | None = None,
    adjectives: frozenset | None = None,
    registry: FeatureRegistry = REGISTRY,
) -> FeatureVector:
    """Compute the 44-feature behavioral vector for one account.

    Deterministic, permutation-invariant in the tweet list, and always
    finite, including for 0-tweet, 1-tweet, all-retweet and
    no-lexicon-match accounts.
    """
    if registry.version_hash != REGISTRY.version_hash:
        raise RegistryMismatch(
            f"featurizer supports registry {REGISTRY.version_hash}, got {registry.version_hash}"
        )
    lexicon = lexicon if lexicon is not None else default_lexicon()
    adjectives = adjectives if adjectives is not None else default_adjectives()
    lex = lexicon.entries

    tweets = account.tweets
    n_tweets = len(tweets)
    out = np.zeros(44, dtype=np.float64)

    # --- user_meta ---
    newest_ts = max((t.timestamp for t in tweets), default=account.created_at)
    age_days = max(0.0, (newest_ts - account.created_at) / SECONDS_PER_DAY)
    out[0] = account.followers_count
    out[1] = account.friends_count
    out[2] = account.statuses_count
    out[3] = account.favourites_count
    out[4] = age_days
    out[5] = account.statuses_count / (age_days + 1.0)
    out[6] = account.friends_count / (account.followers_count + 1)
    out[7] = len(account.description)
    out[8] = 1.0 if account.verified else 0.0

    # --- friends / contacts (distinct contact records in the timeline) ---
    contacts = set()
    mention_occurrences = 0
    retweeted_ids: Counter = Counter()
    mentioned_ids = set()
    for t in tweets:
        for m in t.mentioned_users:
            contacts.add(m)
            mentioned_ids.add(m.user_id)
            mention_occurrences += 1
        if t.retweeted_user is not None:
            contacts.add(t.retweeted_user)
            retweeted_ids[t.retweeted_user.user_id] += 1
    if contacts:
        followers = [c.followers_count for c in contacts]
        friends = [c.friends_count for c in contacts]
        out[9], out[10] = _mean_std(followers)
        out[11], out[12] = _mean_std(friends)
        out[13] = max(c.friends_count / (c.followers_count + 1) for c in contacts)
        out[14] = len(contacts)

    # --- network ---
    total_retweets = sum(retweeted_ids.values())
    total_contact_occ = mention_occurrences + total_retweets
    out[15] = len(mentioned_ids)
    out[16] = len(retweeted_ids)
    out[17] = mention_occurrences / n_tweets if n_tweets else 0.0
    distinct_ids = mentioned_ids | set(retweeted_ids)
    out[18] = len(distinct_ids) / total_contact_occ if total_contact_occ else 0.0
    out[19] = max(retweeted_ids.values()) / total_retweets if total_retweets else 0.0

    # --- temporal (inter-event gaps of timestamp-sorted tweets) ---
    if n_tweets >= 2:
        ts = np.sort(np.asarray([t.timestamp for t in tweets], dtype=np.float64))
        gaps = np.diff(ts)
        out[20] = float(gaps.mean())
        out[21] = float(gaps.std())
        out[22] = float(gaps.min())
        out[23] = float(gaps.max())
        hist, _ = np.histogram(np.clip(np.log1p(gaps), *GAP_LOG_RANGE),
                               bins=GAP_ENTROPY_BINS, range=GAP_LOG_RANGE)
        out[24] = _entropy_or_zero(hist)
        out[26] = 1.0
    if n_tweets >= 1:
        hours = Counter((t.timestamp // 3600) % 24 for t in tweets)
        out[25] = _entropy_or_zero(list(hours.values()))

    # --- content ---
    own_tweets = [t for t in tweets if not t.is_retweet]
    word_counts: Counter = Counter()
    for t in own_tweets:
        word_counts.update(tokenize(t.text))
    out[27] = _entropy_or_zero(list(word_counts.values()))
    token_lists = [tokenize(t.text) for t in tweets]
    out[28] = float(np.mean([len(toks) for toks in token_lists])) if n_tweets else 0.0
    adj_fracs = [
        sum(1 for w in toks if w in adjectives) / len(toks)
        for toks in token_lists
        if toks
    ]
    out[29], out[30] = _mean_std(adj_fracs)
    if n_tweets:
        out[31] = sum(t.url_count for t in tweets) / n_tweets
        out[32] = sum(t.hashtag_count for t in tweets) / n_tweets
        out[33] = sum(1 for t in tweets if t.is_retweet) / n_tweets
    if own_tweets:
        out[34] = max(t.retweet_count for t in own_tweets)
        out[35] = min(t.favorite_count for t in own_tweets)

    # --- sentiment (per-tweet mean lexicon scores; unmatched tweets skipped) ---
    val, aro, hap = [], [], []
    for toks in token_lists:
        matched = [lex[w] for w in toks if w in lex]
        if not matched:
            continue
        val.append(sum(s[0] for s in matched) / len(matched))
        aro.append(sum(s[1] for s in matched) / len(matched))
        hap.append(sum(s[2] for s in matched) / len(matched))
    if val:
        out[36], out[37] = _mean_std(val)
        out[38], out[39] = _mean_std(aro)
        hist, _ = np.histogram(np.asarray(aro), bins=AROUSAL_ENTROPY_BINS, range=(0.0, 9.0))
        out[40] = _entropy_or_zero(hist)
        out[41], out[42] = _mean_std(hap)
        out[43] = 1.0

    return FeatureVector(values=out, registry_hash=REGISTRY.version_hash)


@dataclass
class FeatureTable:
    """A featurized corpus: one row per example, aligned metadata columns."""

    X: np.ndarray
    y: np.ndarray              # 1 = bot, 0 = human
    user_ids: list[str]
    dataset_tags: list[str]
    bot_classes: list          # str or None per row
    registry_hash: str

    def __len__(self) -> int:
        return self.X.shape[0]


def featurize_corpus(
    corpus: Corpus,
    lexicon: SentimentLexicon | None = None,
    adjectives: frozenset | None = None,
) -> FeatureTable:
    """Featurize every example; row order equals corpus order."""
    lexicon = lexicon if lexicon is not None else default_lexicon()
    adjectives = adjectives if adjectives is not None else default_adjectives()
    n = len(corpus.examples)
    X = np.empty((n, REGISTRY.size), dtype=np.float64)
    y = np.empty(n, dtype=np.int8)
    user_ids, tags, classes = [], [], []
    for i, ex in enumerate(corpus.examples):
        X[i] = extract_features(ex.account, lexicon, adjectives).values
        y[i] = 1 if ex.label == "bot" else 0
        user_ids.append(ex.account.user_id)
        tags.append(ex.dataset_tag)
        classes.append(ex.bot_class)
    return FeatureTable(
        X=X, y=y, user_ids=user_ids, dataset_tags=tags, bot_classes=classes,
        registry_hash=REGISTRY.version_hash,
    )


def featurize_account(
    account: RawAccount | LabeledAccount,
    lexicon: SentimentLexicon | None = None,
    adjectives: frozenset | None = None,
) -> FeatureVector:
    raw = account.account if isinstance(account, LabeledAccount) else account
    return extract_features(raw, lexicon, adjectives)
