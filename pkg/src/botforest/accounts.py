"""Account and corpus data model: JSONL parsing, validation, score output.

One corpus line is a JSON object:

    {"user": {...profile fields...}, "tweets": [...], "label": "human"|"bot",
     "bot_class": str|null, "dataset": str}

Records without a "label" key parse as bare RawAccounts (the scoring-service
input shape). All invariants are enforced at parse time; no invalid account
object is constructible downstream.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import MalformedJson, PreconditionViolation, SchemaViolation

# Newest tweets retained per account; matches a single-page timeline fetch.
MAX_TIMELINE = 200

LABELS = ("human", "bot")


@dataclass(frozen=True)
class ContactRef:
    """Embedded metadata for a mentioned or retweeted account."""

    user_id: str
    followers_count: int
    friends_count: int


@dataclass(frozen=True)
class Tweet:
    timestamp: int
    text: str
    is_retweet: bool
    retweeted_user: ContactRef | None
    mentioned_users: tuple[ContactRef, ...]
    retweet_count: int
    favorite_count: int
    hashtag_count: int
    url_count: int


@dataclass(frozen=True)
class RawAccount:
    """A user profile plus recent timeline; the unit of scoring."""

    user_id: str
    screen_name: str
    created_at: int
    followers_count: int
    friends_count: int
    statuses_count: int
    favourites_count: int
    verified: bool
    description: str
    tweets: tuple[Tweet, ...]


@dataclass(frozen=True)
class LabeledAccount:
    account: RawAccount
    label: str
    bot_class: str | None
    dataset_tag: str


@dataclass
class Corpus:
    examples: list[LabeledAccount]
    source_path: str = ""

    def __len__(self) -> int:
        return len(self.examples)

    def dataset_tags(self) -> list[str]:
        return sorted({ex.dataset_tag for ex in self.examples})


def _req(obj: dict, field: str, path: str = ""):
    if field not in obj:
        raise SchemaViolation(path + field, "missing required field")
    return obj[field]


def _str_field(obj: dict, field: str, path: str = "") -> str:
    v = _req(obj, field, path)
    if not isinstance(v, str):
        raise SchemaViolation(path + field, "expected a string")
    return v


def _count_field(obj: dict, field: str, path: str = "") -> int:
    v = _req(obj, field, path)
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaViolation(path + field, "expected an integer")
    if v < 0:
        raise SchemaViolation(path + field, "must be non-negative")
    return v


def _bool_field(obj: dict, field: str, path: str = "") -> bool:
    v = _req(obj, field, path)
    if not isinstance(v, bool):
        raise SchemaViolation(path + field, "expected a boolean")
    return v


def _parse_contact(obj, path: str) -> ContactRef:
    if not isinstance(obj, dict):
        raise SchemaViolation(path, "expected a contact object")
    return ContactRef(
        user_id=_str_field(obj, "user_id", path + "."),
        followers_count=_count_field(obj, "followers_count", path + "."),
        friends_count=_count_field(obj, "friends_count", path + "."),
    )


def _parse_tweet(obj, path: str) -> Tweet:
    if not isinstance(obj, dict):
        raise SchemaViolation(path, "expected a tweet object")
    ts = _req(obj, "timestamp", path + ".")
    if isinstance(ts, bool) or not isinstance(ts, int) or ts < 0:
        raise SchemaViolation(path + ".timestamp", "expected non-negative UTC seconds")
    rt_user = obj.get("retweeted_user")
    retweeted = None if rt_user is None else _parse_contact(rt_user, path + ".retweeted_user")
    mentioned_raw = obj.get("mentioned_users", [])
    if not isinstance(mentioned_raw, list):
        raise SchemaViolation(path + ".mentioned_users", "expected a list")
    mentioned = tuple(
        _parse_contact(m, f"{path}.mentioned_users[{i}]") for i, m in enumerate(mentioned_raw)
    )
    is_retweet = _bool_field(obj, "is_retweet", path + ".")
    if is_retweet and retweeted is None:
        raise SchemaViolation(path + ".retweeted_user", "required when is_retweet is true")
    return Tweet(
        timestamp=ts,
        text=_str_field(obj, "text", path + "."),
        is_retweet=is_retweet,
        retweeted_user=retweeted,
        mentioned_users=mentioned,
        retweet_count=_count_field(obj, "retweet_count", path + "."),
        favorite_count=_count_field(obj, "favorite_count", path + "."),
        hashtag_count=_count_field(obj, "hashtag_count", path + "."),
        url_count=_count_field(obj, "url_count", path + "."),
    )


def parse_account_obj(obj: dict) -> RawAccount | LabeledAccount:
    """Validate one decoded corpus object; see parse_account."""
    if not isinstance(obj, dict):
        raise SchemaViolation("", "expected a JSON object")
    user = _req(obj, "user")
    if not isinstance(user, dict):
        raise SchemaViolation("user", "expected an object")
    created = _req(user, "created_at", "user.")
    if isinstance(created, bool) or not isinstance(created, int) or created < 0:
        raise SchemaViolation("user.created_at", "expected non-negative UTC seconds")
    tweets_raw = obj.get("tweets", [])
    if not isinstance(tweets_raw, list):
        raise SchemaViolation("tweets", "expected a list")
    tweets = [_parse_tweet(t, f"tweets[{i}]") for i, t in enumerate(tweets_raw)]
    # keep the MAX_TIMELINE newest by timestamp, newest first; stable on ties
    tweets.sort(key=lambda t: t.timestamp, reverse=True)
    account = RawAccount(
        user_id=_str_field(user, "user_id", "user."),
        screen_name=_str_field(user, "screen_name", "user."),
        created_at=created,
        followers_count=_count_field(user, "followers_count", "user."),
        friends_count=_count_field(user, "friends_count", "user."),
        statuses_count=_count_field(user, "statuses_count", "user."),
        favourites_count=_count_field(user, "favourites_count", "user."),
        verified=_bool_field(user, "verified", "user."),
        description=_str_field(user, "description", "user."),
        tweets=tuple(tweets[:MAX_TIMELINE]),
    )
    if "label" not in obj or obj["label"] is None:
        return account
    label = obj["label"]
    if label not in LABELS:
        raise SchemaViolation("label", f"expected one of {LABELS}")
    bot_class = obj.get("bot_class")
    if label == "human":
        if bot_class is not None:
            raise SchemaViolation("bot_class", "must be absent for human accounts")
    else:
        if not isinstance(bot_class, str) or not bot_class:
            raise SchemaViolation("bot_class", "required for bot accounts")
    dataset = _str_field(obj, "dataset")
    if not dataset:
        raise SchemaViolation("dataset", "must be non-empty")
    return LabeledAccount(account=account, label=label, bot_class=bot_class, dataset_tag=dataset)


def parse_account(line: str) -> RawAccount | LabeledAccount:
    """Parse one corpus JSONL line into a validated account.

    Unknown fields are ignored; tweets are truncated to the MAX_TIMELINE most
    recent by timestamp. Raises MalformedJson on syntax errors and
    SchemaViolation (naming the field) on contract violations.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedJson(str(e)) from None
    return parse_account_obj(obj)


def _contact_dict(c: ContactRef) -> dict:
    return {
        "user_id": c.user_id,
        "followers_count": c.followers_count,
        "friends_count": c.friends_count,
    }


def account_to_obj(acc: RawAccount | LabeledAccount) -> dict:
    """Inverse of parse_account_obj; field order is fixed for byte-stable dumps."""
    if isinstance(acc, LabeledAccount):
        raw, label, bot_class, dataset = acc.account, acc.label, acc.bot_class, acc.dataset_tag
    else:
        raw, label, bot_class, dataset = acc, None, None, None
    obj = {
        "user": {
            "user_id": raw.user_id,
            "screen_name": raw.screen_name,
            "created_at": raw.created_at,
            "followers_count": raw.followers_count,
            "friends_count": raw.friends_count,
            "statuses_count": raw.statuses_count,
            "favourites_count": raw.favourites_count,
            "verified": raw.verified,
            "description": raw.description,
        },
        "tweets": [
            {
                "timestamp": t.timestamp,
                "text": t.text,
                "is_retweet": t.is_retweet,
                "retweeted_user": None if t.retweeted_user is None else _contact_dict(t.retweeted_user),
                "mentioned_users": [_contact_dict(m) for m in t.mentioned_users],
                "retweet_count": t.retweet_count,
                "favorite_count": t.favorite_count,
                "hashtag_count": t.hashtag_count,
                "url_count": t.url_count,
            }
            for t in raw.tweets
        ],
    }
    if label is not None:
        obj["label"] = label
        obj["bot_class"] = bot_class
        obj["dataset"] = dataset
    return obj


def serialize_account(acc: RawAccount | LabeledAccount) -> str:
    return json.dumps(account_to_obj(acc), separators=(",", ":"), ensure_ascii=False)


def load_corpus(path: str, strict: bool = True, errors: list | None = None) -> Corpus:
    """Load a JSONL corpus.

    In strict mode the first invalid line raises, with the 1-based line number
    attached. Otherwise invalid lines are skipped and (line, message) pairs are
    appended to `errors` when a list is supplied.
    """
    examples: list[LabeledAccount] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                acc = parse_account(line)
            except (MalformedJson, SchemaViolation) as e:
                if strict:
                    if isinstance(e, SchemaViolation):
                        raise SchemaViolation(e.field, str(e), line=line_no) from None
                    raise MalformedJson(f"line {line_no}: {e}") from None
                if errors is not None:
                    errors.append((line_no, str(e)))
                continue
            if not isinstance(acc, LabeledAccount):
                err = SchemaViolation("label", "corpus lines must be labeled", line=line_no)
                if strict:
                    raise err
                if errors is not None:
                    errors.append((line_no, str(err)))
                continue
            examples.append(acc)
    return Corpus(examples=examples, source_path=str(path))


def write_corpus(corpus: Corpus | Iterable[LabeledAccount], path: str) -> None:
    examples = corpus.examples if isinstance(corpus, Corpus) else list(corpus)
    atomic_write_text(path, "".join(serialize_account(ex) + "\n" for ex in examples))


def format_score(x: float) -> str:
    """Serialize a score with >= 6 decimal digits, preserving the exact value.

    Uses fixed 6-decimal form when that round-trips, otherwise falls back to
    shortest-exact notation so write/parse is an identity.
    """
    s = f"{x:.6f}"
    if float(s) == x:
        return s
    return repr(float(x))


def score_result_to_json(result) -> str:
    """One score-output JSONL line; shared by the CLI and the HTTP service."""
    class_scores = ",".join(
        f'"{name}":{format_score(val)}' for name, val in result.class_scores.items()
    )
    raw_scores = ",".join(
        f'"{name}":{format_score(val)}' for name, val in result.raw_scores().items()
    )
    return (
        f'{{"user_id":{json.dumps(result.user_id, ensure_ascii=False)},'
        f'"bot_score":{format_score(result.bot_score)},'
        f'"winning_class":{json.dumps(result.winning_class, ensure_ascii=False)},'
        f'"class_scores":{{{class_scores}}},'
        f'"raw_scores":{{{raw_scores}}}}}'
    )


def write_scores(results: Sequence, path: str) -> None:
    """Write ScoreResults as JSONL (schema above); atomic, requires >= 1 result."""
    if not results:
        raise PreconditionViolation("write_scores requires at least one result")
    atomic_write_text(path, "".join(score_result_to_json(r) + "\n" for r in results))


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file + rename so failures never leave partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
