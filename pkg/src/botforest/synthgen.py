"""Seeded generator of raw synthetic accounts in five bot classes plus humans.

Each class plants a distinct behavioral signature through the raw account
fields (never through feature vectors directly, so the featurizer is
exercised end to end):

  simple_spambot  tiny repetitive promo vocabulary, adjective-heavy
  social_spambot  skewed-positive valence, near-constant word arousal
  fake_follower   friends >> followers, aggressive-following contacts,
                  near-constant inter-tweet gaps
  self_declared   disclosure keywords in the description, high-volume
                  around-the-clock link feed on a fixed schedule
  astroturf       mostly retweets of a tiny amplified pool, bursty timing
  human           diverse vocabulary, diurnal hours, moderate everything

A global `overlap` knob blends per-account behavior toward the human
profile, controlling cross-class difficulty.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .accounts import ContactRef, Corpus, LabeledAccount, RawAccount, Tweet
from .ensemble import BotClass, BotClassPartition, ClassSelector
from .features import default_adjectives, default_lexicon
from .seeds import spawn_rng

EPOCH_START = 1_600_000_000   # generation anchor (UTC seconds)
DEFAULT_OVERLAP = 0.25
_COUNT_CAP = 10_000_000


@dataclass(frozen=True)
class GapModel:
    kind: str                  # "exponential" | "near_constant" | "bursty"
    mean_s: float
    jitter: float = 0.05       # near_constant: relative half-width
    burst_gap_s: float = 20.0
    lull_gap_s: float = 21600.0
    burst_len: int = 12


@dataclass(frozen=True)
class ClassProfile:
    class_name: str
    followers_mu: float
    followers_sigma: float
    friends_mu: float
    friends_sigma: float
    statuses_mu: float
    statuses_sigma: float
    favourites_mu: float
    favourites_sigma: float
    age_days_mu: float
    age_days_sigma: float
    n_tweets_lo: int
    n_tweets_hi: int
    gap: GapModel
    uniform_hour_prob: float   # chance this account posts around the clock
    sleep_hours_lo: int
    sleep_hours_hi: int
    retweet_prob: float
    retweet_pool: int
    retweet_skew: float        # probability mass on the pool's first member
    mention_rate: float
    mention_pool: int
    contact_followers_mu: float
    contact_followers_sigma: float
    contact_ratio_mu: float          # log of contact friends/(followers+1)
    contact_ratio_sigma: float
    vocab_size: int
    valence_lo: float
    valence_hi: float
    arousal_lo: float
    arousal_hi: float
    topic_jitter: bool         # per-tweet arousal topics (human-style variety)
    repetition: float
    adjective_rate: float
    adjective_pool_size: int
    words_lo: int
    words_hi: int
    url_rate: float
    hashtag_rate: float
    own_retweet_count_rate: float
    own_favorite_count_rate: float
    verified_prob: float
    desc_words_lo: int
    desc_words_hi: int
    desc_keywords: tuple = ()
    contact_human_mix: float = 0.0   # share of ordinary contacts in the pool


def _ln(x: float) -> float:
    return math.log(x)


# Each bot class is strongly separable from humans only along its own
# signature block; the remaining dimensions carry weak, heavily overlapping
# "automation residue" (slightly shifted counts, a higher chance of
# around-the-clock posting, somewhat smaller vocabularies). Signatures
# overlap pairwise across classes (promo language, constant schedules,
# flat word arousal, link-feed behavior) so specialists transfer partially
# to classes they were not trained on.

HUMAN_PROFILE = ClassProfile(
    class_name="human",
    followers_mu=_ln(300), followers_sigma=1.2,
    friends_mu=_ln(300), friends_sigma=1.0,
    statuses_mu=_ln(3000), statuses_sigma=1.2,
    favourites_mu=_ln(1200), favourites_sigma=1.5,
    age_days_mu=_ln(600), age_days_sigma=0.8,
    n_tweets_lo=40, n_tweets_hi=120,
    gap=GapModel(kind="exponential", mean_s=21600.0),
    uniform_hour_prob=0.2, sleep_hours_lo=5, sleep_hours_hi=9,
    retweet_prob=0.25, retweet_pool=15, retweet_skew=0.2,
    mention_rate=0.6, mention_pool=30,
    contact_followers_mu=_ln(400), contact_followers_sigma=1.8,
    contact_ratio_mu=_ln(0.9), contact_ratio_sigma=0.5,
    vocab_size=420,
    valence_lo=1.5, valence_hi=8.0, arousal_lo=0.5, arousal_hi=8.5,
    topic_jitter=True,
    repetition=0.0, adjective_rate=0.07, adjective_pool_size=300,
    words_lo=6, words_hi=18,
    url_rate=0.3, hashtag_rate=0.4,
    own_retweet_count_rate=1.5, own_favorite_count_rate=2.2,
    verified_prob=0.05,
    desc_words_lo=3, desc_words_hi=12,
)

SIMPLE_SPAMBOT = ClassProfile(
    class_name="simple_spambot",
    followers_mu=_ln(220), followers_sigma=1.1,
    friends_mu=_ln(250), friends_sigma=1.0,
    statuses_mu=_ln(4000), statuses_sigma=1.1,
    favourites_mu=_ln(700), favourites_sigma=1.3,
    age_days_mu=_ln(450), age_days_sigma=0.8,
    n_tweets_lo=40, n_tweets_hi=120,
    gap=GapModel(kind="exponential", mean_s=14400.0),
    uniform_hour_prob=0.35, sleep_hours_lo=8, sleep_hours_hi=8,
    retweet_prob=0.1, retweet_pool=5, retweet_skew=0.4,
    mention_rate=0.4, mention_pool=8,
    contact_followers_mu=_ln(350), contact_followers_sigma=1.7,
    contact_ratio_mu=_ln(1.0), contact_ratio_sigma=0.5,
    vocab_size=28,
    valence_lo=6.0, valence_hi=8.0, arousal_lo=4.8, arousal_hi=6.4,
    topic_jitter=False,
    repetition=0.5, adjective_rate=0.34, adjective_pool_size=12,
    words_lo=6, words_hi=14,
    url_rate=1.2, hashtag_rate=1.4,
    own_retweet_count_rate=1.0, own_favorite_count_rate=1.5,
    verified_prob=0.0,
    desc_words_lo=2, desc_words_hi=6,
)

SOCIAL_SPAMBOT = ClassProfile(
    class_name="social_spambot",
    followers_mu=_ln(280), followers_sigma=1.1,
    friends_mu=_ln(320), friends_sigma=1.0,
    statuses_mu=_ln(3500), statuses_sigma=1.1,
    favourites_mu=_ln(900), favourites_sigma=1.4,
    age_days_mu=_ln(450), age_days_sigma=0.8,
    n_tweets_lo=40, n_tweets_hi=120,
    gap=GapModel(kind="exponential", mean_s=14400.0),
    uniform_hour_prob=0.35, sleep_hours_lo=8, sleep_hours_hi=8,
    retweet_prob=0.25, retweet_pool=10, retweet_skew=0.2,
    mention_rate=0.9, mention_pool=20,
    contact_followers_mu=_ln(350), contact_followers_sigma=1.7,
    contact_ratio_mu=_ln(0.9), contact_ratio_sigma=0.5,
    vocab_size=28,
    valence_lo=6.2, valence_hi=8.4, arousal_lo=5.2, arousal_hi=6.0,
    topic_jitter=False,
    repetition=0.5, adjective_rate=0.34, adjective_pool_size=12,
    words_lo=8, words_hi=16,
    url_rate=1.2, hashtag_rate=1.6,
    own_retweet_count_rate=2.0, own_favorite_count_rate=1.2,
    verified_prob=0.0,
    desc_words_lo=3, desc_words_hi=8,
)

FAKE_FOLLOWER = ClassProfile(
    class_name="fake_follower",
    followers_mu=_ln(35), followers_sigma=0.9,
    friends_mu=_ln(2200), friends_sigma=0.6,
    statuses_mu=_ln(400), statuses_sigma=1.1,
    favourites_mu=_ln(300), favourites_sigma=1.2,
    age_days_mu=_ln(350), age_days_sigma=0.7,
    n_tweets_lo=12, n_tweets_hi=40,
    gap=GapModel(kind="near_constant", mean_s=129600.0, jitter=0.02),
    uniform_hour_prob=0.7, sleep_hours_lo=8, sleep_hours_hi=8,
    retweet_prob=0.15, retweet_pool=8, retweet_skew=0.4,
    mention_rate=0.5, mention_pool=18,
    contact_followers_mu=_ln(60), contact_followers_sigma=1.0,
    contact_ratio_mu=_ln(40.0), contact_ratio_sigma=0.4, contact_human_mix=0.55,
    vocab_size=120,
    valence_lo=3.0, valence_hi=7.0, arousal_lo=2.0, arousal_hi=6.0,
    topic_jitter=True,
    repetition=0.1, adjective_rate=0.06, adjective_pool_size=40,
    words_lo=6, words_hi=18,
    url_rate=0.3, hashtag_rate=0.3,
    own_retweet_count_rate=0.8, own_favorite_count_rate=1.0,
    verified_prob=0.0,
    desc_words_lo=1, desc_words_hi=5,
)

SELF_DECLARED = ClassProfile(
    class_name="self_declared",
    followers_mu=_ln(400), followers_sigma=1.0,
    friends_mu=_ln(150), friends_sigma=1.0,
    statuses_mu=_ln(8000), statuses_sigma=0.9,
    favourites_mu=_ln(500), favourites_sigma=1.3,
    age_days_mu=_ln(500), age_days_sigma=0.7,
    n_tweets_lo=60, n_tweets_hi=160,
    gap=GapModel(kind="near_constant", mean_s=2400.0, jitter=0.02),
    uniform_hour_prob=0.9, sleep_hours_lo=8, sleep_hours_hi=8,
    retweet_prob=0.02, retweet_pool=3, retweet_skew=0.4,
    mention_rate=0.5, mention_pool=15,
    contact_followers_mu=_ln(350), contact_followers_sigma=1.7,
    contact_ratio_mu=_ln(1.0), contact_ratio_sigma=0.5,
    vocab_size=250,
    valence_lo=2.5, valence_hi=6.5, arousal_lo=1.5, arousal_hi=6.5,
    topic_jitter=True,
    repetition=0.05, adjective_rate=0.05, adjective_pool_size=40,
    words_lo=8, words_hi=16,
    url_rate=2.2, hashtag_rate=0.9,
    own_retweet_count_rate=1.0, own_favorite_count_rate=1.2,
    verified_prob=0.02,
    desc_words_lo=18, desc_words_hi=35,
    desc_keywords=("automated", "bot", "feed"),
)

ASTROTURF = ClassProfile(
    class_name="astroturf",
    followers_mu=_ln(300), followers_sigma=1.1,
    friends_mu=_ln(300), friends_sigma=1.0,
    statuses_mu=_ln(3000), statuses_sigma=1.1,
    favourites_mu=_ln(1200), favourites_sigma=1.3,
    age_days_mu=_ln(450), age_days_sigma=0.8,
    n_tweets_lo=60, n_tweets_hi=160,
    gap=GapModel(kind="bursty", mean_s=21600.0, burst_gap_s=20.0,
                 lull_gap_s=21600.0, burst_len=12),
    uniform_hour_prob=0.2, sleep_hours_lo=8, sleep_hours_hi=8,
    retweet_prob=0.88, retweet_pool=3, retweet_skew=0.7,
    mention_rate=0.6, mention_pool=30,
    contact_followers_mu=_ln(350), contact_followers_sigma=1.7,
    contact_ratio_mu=_ln(0.9), contact_ratio_sigma=0.5,
    vocab_size=300,
    valence_lo=1.5, valence_hi=8.0, arousal_lo=0.5, arousal_hi=8.5,
    topic_jitter=True,
    repetition=0.0, adjective_rate=0.07, adjective_pool_size=300,
    words_lo=5, words_hi=14,
    url_rate=0.3, hashtag_rate=0.4,
    own_retweet_count_rate=2.0, own_favorite_count_rate=1.4,
    verified_prob=0.0,
    desc_words_lo=2, desc_words_hi=8,
)

HUMAN_CASUAL = replace(
    HUMAN_PROFILE,
    statuses_mu=_ln(500),
    favourites_mu=_ln(400),
    friends_mu=_ln(700),            # follow-back humans: mildly high ratio
    followers_mu=_ln(150),
    n_tweets_lo=10, n_tweets_hi=45,
    gap=GapModel(kind="exponential", mean_s=172800.0),
    vocab_size=220,
)

HUMAN_POWER = replace(
    HUMAN_PROFILE,
    statuses_mu=_ln(20000),
    followers_mu=_ln(2000),
    favourites_mu=_ln(5000),
    n_tweets_lo=80, n_tweets_hi=200,
    gap=GapModel(kind="exponential", mean_s=5400.0),
    uniform_hour_prob=0.5,
    mention_rate=1.5,
    url_rate=1.5, hashtag_rate=1.2,
    verified_prob=0.25,
)

HUMAN_AMPLIFIER = replace(
    HUMAN_PROFILE,
    retweet_prob=0.7,
    retweet_pool=4, retweet_skew=0.5,
    favourites_mu=_ln(8000),
    valence_lo=5.5, valence_hi=8.5,
    arousal_lo=4.0, arousal_hi=7.0,
    mention_rate=0.8,
)

# (weight, profile) mixture drawn per generated human account
HUMAN_ARCHETYPES = (
    (0.45, HUMAN_PROFILE),
    (0.30, HUMAN_CASUAL),
    (0.15, HUMAN_POWER),
    (0.10, HUMAN_AMPLIFIER),
)

BOT_PROFILES = {
    p.class_name: p
    for p in (SIMPLE_SPAMBOT, SOCIAL_SPAMBOT, FAKE_FOLLOWER, SELF_DECLARED, ASTROTURF)
}
DEFAULT_CLASS_ORDER = tuple(BOT_PROFILES)


@dataclass(frozen=True)
class SynthConfig:
    profiles: tuple            # ((ClassProfile, count), ...)
    humans_count: int
    seed: int
    dataset_tag: str
    overlap: float = DEFAULT_OVERLAP


def default_config(per_class: int = 200, humans: int = 1000, seed: int = 42,
                   dataset_tag: str = "synth-default",
                   overlap: float = DEFAULT_OVERLAP) -> SynthConfig:
    return SynthConfig(
        profiles=tuple((BOT_PROFILES[name], per_class) for name in DEFAULT_CLASS_ORDER),
        humans_count=humans,
        seed=seed,
        dataset_tag=dataset_tag,
        overlap=overlap,
    )


def config_from_obj(obj: dict) -> SynthConfig:
    profiles = []
    for entry in obj["classes"]:
        name = entry["profile"]
        if name not in BOT_PROFILES:
            raise ValueError(f"unknown profile {name!r}; available: {sorted(BOT_PROFILES)}")
        profiles.append((BOT_PROFILES[name], int(entry["count"])))
    return SynthConfig(
        profiles=tuple(profiles),
        humans_count=int(obj["humans"]),
        seed=int(obj["seed"]),
        dataset_tag=obj["dataset_tag"],
        overlap=float(obj.get("overlap", DEFAULT_OVERLAP)),
    )


def load_synth_config(path: str) -> SynthConfig:
    with open(path, "r", encoding="utf-8") as f:
        return config_from_obj(json.load(f))


def partition_for_tag(dataset_tag: str, class_names=DEFAULT_CLASS_ORDER) -> BotClassPartition:
    """One ensemble class per generated bot class for a synthetic corpus."""
    return BotClassPartition(tuple(
        BotClass(name=name, selectors=(ClassSelector(dataset=dataset_tag, bot_class=name),))
        for name in class_names
    ))


@lru_cache(maxsize=32)
def _vocab_pool(vocab_size: int, valence_lo: float, valence_hi: float,
                arousal_lo: float, arousal_hi: float, tag: str):
    """Deterministic word pool within the sentiment bands, sorted by arousal."""
    lex = default_lexicon().entries
    words = [
        w for w, (v, a, _h) in sorted(lex.items())
        if valence_lo <= v <= valence_hi and arousal_lo <= a <= arousal_hi
    ]
    rng = spawn_rng(0x1EC5, sum(ord(c) for c in tag))
    rng.shuffle(words)
    words = sorted(words[:vocab_size], key=lambda w: lex[w][1])
    arousal = np.asarray([lex[w][1] for w in words])
    return words, arousal


def _profile_vocab(profile: ClassProfile):
    return _vocab_pool(
        profile.vocab_size, profile.valence_lo, profile.valence_hi,
        profile.arousal_lo, profile.arousal_hi, profile.class_name,
    )


@lru_cache(maxsize=1)
def _adjective_pool():
    return sorted(default_adjectives())


@lru_cache(maxsize=32)
def _adjective_subpool(tag: str, size: int):
    pool = list(_adjective_pool())
    rng = spawn_rng(0xAD7, sum(ord(c) for c in tag))
    rng.shuffle(pool)
    return tuple(pool[:max(1, size)])


def _lognormal_count(rng, mu: float, sigma: float) -> int:
    return min(int(rng.lognormal(mu, sigma)), _COUNT_CAP)


def _blend(a: float, b: float, lam: float) -> float:
    return a * (1.0 - lam) + b * lam


def _effective_profile(profile: ClassProfile, lam: float) -> ClassProfile:
    """Pull a bot profile's numeric behavior toward the human profile by lam."""
    if profile.class_name == "human" or lam <= 0.0:
        return profile
    h = HUMAN_PROFILE
    return replace(
        profile,
        followers_mu=_blend(profile.followers_mu, h.followers_mu, lam),
        friends_mu=_blend(profile.friends_mu, h.friends_mu, lam),
        statuses_mu=_blend(profile.statuses_mu, h.statuses_mu, lam),
        gap=replace(profile.gap, mean_s=math.exp(
            _blend(math.log(profile.gap.mean_s), math.log(h.gap.mean_s), lam))),
        retweet_prob=_blend(profile.retweet_prob, h.retweet_prob, lam),
        mention_rate=_blend(profile.mention_rate, h.mention_rate, lam),
        repetition=_blend(profile.repetition, h.repetition, lam),
        adjective_rate=_blend(profile.adjective_rate, h.adjective_rate, lam),
        url_rate=_blend(profile.url_rate, h.url_rate, lam),
        hashtag_rate=_blend(profile.hashtag_rate, h.hashtag_rate, lam),
        uniform_hour_prob=_blend(profile.uniform_hour_prob, h.uniform_hour_prob, lam),
        contact_ratio_mu=_blend(profile.contact_ratio_mu, h.contact_ratio_mu, lam),
        contact_followers_mu=_blend(profile.contact_followers_mu, h.contact_followers_mu, lam),
    )


def _make_contact_pool(rng, prefix: str, size: int, profile: ClassProfile) -> list:
    """Contacts draw followers and a friend/follower ratio; friends follow.

    Tying friends to the ratio keeps human contact ratios bounded while a
    class can plant aggressive-following contacts. contact_human_mix blends
    ordinary contacts into the pool, which washes out pool averages but not
    the max ratio."""
    pool = []
    for i in range(size):
        src_profile = profile
        if profile.contact_human_mix > 0.0 and float(rng.random()) < profile.contact_human_mix:
            src_profile = HUMAN_PROFILE
        followers = _lognormal_count(rng, src_profile.contact_followers_mu,
                                     src_profile.contact_followers_sigma)
        ratio = rng.lognormal(src_profile.contact_ratio_mu, src_profile.contact_ratio_sigma)
        friends = min(int(ratio * (followers + 1)), _COUNT_CAP)
        pool.append(ContactRef(user_id=f"{prefix}{i}", followers_count=followers,
                               friends_count=friends))
    return pool


def _draw_gap(rng, gap: GapModel, state: dict) -> float:
    if gap.kind == "exponential":
        return float(rng.exponential(gap.mean_s))
    if gap.kind == "near_constant":
        return gap.mean_s * (1.0 + gap.jitter * (2.0 * float(rng.random()) - 1.0))
    if gap.kind == "bursty":
        if state["burst_left"] > 0:
            state["burst_left"] -= 1
            return float(rng.exponential(gap.burst_gap_s))
        state["burst_left"] = int(rng.integers(gap.burst_len // 2, gap.burst_len + 1))
        return float(rng.exponential(gap.lull_gap_s))
    raise ValueError(f"unknown gap kind {gap.kind!r}")


def _gen_timestamps(rng, profile: ClassProfile, n: int) -> list:
    t = float(EPOCH_START + int(rng.integers(0, 365 * 86400)))
    uniform_hours = float(rng.random()) < profile.uniform_hour_prob
    sleep_start = int(rng.integers(0, 24))
    sleep_len = int(rng.integers(profile.sleep_hours_lo, profile.sleep_hours_hi + 1))
    state = {"burst_left": 0}
    out = []
    for _ in range(n):
        if not uniform_hours:
            hour = (int(t) // 3600) % 24
            offset = (hour - sleep_start) % 24
            if offset < sleep_len:  # inside the sleep window: skip to waking time
                t += (sleep_len - offset) * 3600 + float(rng.integers(0, 1800))
        out.append(int(t))
        t += max(1.0, _draw_gap(rng, profile.gap, state))
    return out


def _tweet_words(rng, profile: ClassProfile, words, arousal, human_words) -> list:
    n_words = int(rng.integers(profile.words_lo, profile.words_hi + 1))
    chosen = []
    favorites = words[: max(3, len(words) // 10)]
    if profile.topic_jitter:
        center = 1.5 + 6.0 * float(rng.random())
        lo = int(np.searchsorted(arousal, center - 1.2, side="left"))
        hi = int(np.searchsorted(arousal, center + 1.2, side="right"))
        if hi - lo < 5:
            lo, hi = 0, len(words)
        window = words[lo:hi]
    else:
        window = words
    pool_tag = ("promo" if profile.class_name in ("simple_spambot", "social_spambot")
                else profile.class_name)
    adj_pool = _adjective_subpool(pool_tag, profile.adjective_pool_size)
    for _ in range(n_words):
        u = float(rng.random())
        if u < profile.adjective_rate:
            chosen.append(adj_pool[int(rng.integers(0, len(adj_pool)))])
        elif u < profile.adjective_rate + profile.repetition:
            chosen.append(favorites[int(rng.integers(0, len(favorites)))])
        elif human_words is not None and float(rng.random()) < 0.5:
            chosen.append(human_words[int(rng.integers(0, len(human_words)))])
        else:
            chosen.append(window[int(rng.integers(0, len(window)))])
    return chosen


def generate_account(profile: ClassProfile, rng: np.random.Generator,
                     dataset_tag: str = "synth", account_id: str = "acct-0",
                     overlap: float = 0.0) -> LabeledAccount:
    """Generate one full labeled account from a class profile.

    Deterministic in (profile, rng state). `overlap` blends this account's
    behavior toward the human profile by a per-account factor drawn from
    U(0, overlap).
    """
    lam = float(rng.uniform(0.0, overlap)) if overlap > 0 else 0.0
    eff = _effective_profile(profile, lam)
    words, arousal = _profile_vocab(profile)
    human_words = None
    if lam > 0.0 and profile.class_name != "human":
        # strongly blended accounts also borrow half their vocabulary from humans
        pool, _ = _profile_vocab(HUMAN_PROFILE)
        human_words = pool if float(rng.random()) < lam * 2.0 else None

    n_tweets = int(rng.integers(eff.n_tweets_lo, eff.n_tweets_hi + 1))
    timestamps = _gen_timestamps(rng, eff, n_tweets)
    mention_pool = _make_contact_pool(rng, f"{account_id}-m", eff.mention_pool, eff)
    retweet_pool = _make_contact_pool(rng, f"{account_id}-r", eff.retweet_pool, eff)

    tweets = []
    for ts in timestamps:
        is_retweet = float(rng.random()) < eff.retweet_prob
        retweeted = None
        if is_retweet:
            if float(rng.random()) < eff.retweet_skew:
                retweeted = retweet_pool[0]
            else:
                retweeted = retweet_pool[int(rng.integers(0, len(retweet_pool)))]
        n_mentions = min(int(rng.poisson(eff.mention_rate)), 4)
        mentioned = tuple(
            mention_pool[int(rng.integers(0, len(mention_pool)))] for _ in range(n_mentions)
        )
        text = " ".join(_tweet_words(rng, eff, words, arousal, human_words))
        tweets.append(Tweet(
            timestamp=ts,
            text=text,
            is_retweet=is_retweet,
            retweeted_user=retweeted,
            mentioned_users=mentioned,
            retweet_count=int(rng.poisson(eff.own_retweet_count_rate)),
            favorite_count=int(rng.poisson(eff.own_favorite_count_rate)),
            hashtag_count=int(rng.poisson(eff.hashtag_rate)),
            url_count=int(rng.poisson(eff.url_rate)),
        ))
    tweets.sort(key=lambda t: t.timestamp, reverse=True)

    age_days = float(rng.lognormal(eff.age_days_mu, eff.age_days_sigma))
    oldest = min((t.timestamp for t in tweets), default=EPOCH_START)
    created_at = max(0, int(oldest - age_days * 86400))
    n_desc = int(rng.integers(eff.desc_words_lo, eff.desc_words_hi + 1))
    desc_words = []
    while len(desc_words) < n_desc:
        desc_words.extend(_tweet_words(rng, eff, words, arousal, None))
    description = " ".join(profile.desc_keywords + tuple(desc_words[:n_desc]))

    raw = RawAccount(
        user_id=account_id,
        screen_name=f"{profile.class_name}_{account_id}",
        created_at=created_at,
        followers_count=_lognormal_count(rng, eff.followers_mu, eff.followers_sigma),
        friends_count=_lognormal_count(rng, eff.friends_mu, eff.friends_sigma),
        statuses_count=max(_lognormal_count(rng, eff.statuses_mu, eff.statuses_sigma), n_tweets),
        favourites_count=_lognormal_count(rng, eff.favourites_mu, eff.favourites_sigma),
        verified=bool(float(rng.random()) < eff.verified_prob),
        description=description,
        tweets=tuple(tweets),
    )
    if profile.class_name == "human":
        return LabeledAccount(account=raw, label="human", bot_class=None, dataset_tag=dataset_tag)
    return LabeledAccount(account=raw, label="bot", bot_class=profile.class_name,
                          dataset_tag=dataset_tag)


def generate_dataset(config: SynthConfig) -> Corpus:
    """Exactly the configured counts per class; humans first, then each
    profile block in order. Per-account rng streams keep output independent
    of generation order."""
    examples = []
    weights = np.asarray([w for w, _ in HUMAN_ARCHETYPES])
    weights = weights / weights.sum()
    for i in range(config.humans_count):
        rng = spawn_rng(config.seed, 0, i)
        archetype = HUMAN_ARCHETYPES[int(rng.choice(len(HUMAN_ARCHETYPES), p=weights))][1]
        examples.append(generate_account(
            archetype, rng, config.dataset_tag,
            account_id=f"{config.dataset_tag}-human-{i}", overlap=0.0,
        ))
    for block, (profile, count) in enumerate(config.profiles, start=1):
        for i in range(count):
            rng = spawn_rng(config.seed, block, i)
            examples.append(generate_account(
                profile, rng, config.dataset_tag,
                account_id=f"{config.dataset_tag}-{profile.class_name}-{i}",
                overlap=config.overlap,
            ))
    return Corpus(examples=examples, source_path=f"synth:{config.dataset_tag}")
