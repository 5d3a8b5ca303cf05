#!/usr/bin/env python3
"""Regenerate the bundled sentiment lexicon and adjective list.

Writes src/botforest/data/sentiment_lexicon.tsv and adjectives.txt.
Scores are deterministic: a per-group base plus a hash-derived jitter,
clipped to the [0, 9] scale, so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "botforest" / "data"

ADJECTIVES = """
good bad great small large big tiny huge little major
minor new old young ancient modern early late quick slow
fast rapid swift brief long short tall deep shallow wide
narrow thick thin heavy light dark bright dim pale vivid
colorful plain fancy simple complex easy hard tough gentle rough
smooth soft firm solid sturdy hot cold warm cool freezing
boiling wet dry damp humid arid clean dirty neat messy
tidy cluttered fresh stale sweet sour bitter salty spicy bland
tasty delicious awful terrible horrible dreadful lovely wonderful amazing incredible
fantastic fabulous marvelous splendid superb excellent perfect flawless faulty broken
fragile delicate robust strong weak feeble mighty powerful powerless brave
cowardly bold timid shy outgoing friendly hostile kind cruel mean
nice polite rude crude gracious charming pleasant unpleasant agreeable happy
sad joyful gloomy cheerful miserable content upset calm anxious nervous
relaxed tense serene peaceful chaotic orderly random careful careless cautious
reckless wise foolish smart clever brilliant dull stupid ignorant curious
bored interesting boring exciting thrilling dazzling stunning gorgeous beautiful pretty
handsome ugly hideous attractive honest dishonest truthful deceitful loyal faithful
treacherous reliable unreliable dependable trustworthy suspicious guilty innocent fair unfair
just unjust equal unequal generous greedy selfish selfless humble proud
arrogant modest vain noble petty worthy worthless valuable cheap expensive
costly affordable lavish frugal wealthy poor rich broke famous obscure
popular unknown public private common rare unique typical unusual ordinary
extraordinary special standard normal strange weird odd bizarre familiar foreign
native local distant near remote close far adjacent busy idle
active passive lively sluggish energetic weary tired exhausted alert drowsy
awake asleep hungry full thirsty starving healthy sick ill fit
frail vigorous feverish dizzy sore numb tender loud quiet silent
noisy shrill deafening faint audible musical harsh melodic true false
real fake genuine artificial authentic counterfeit actual virtual exclusive premium
"""

POSITIVE_HIGH = """
excited thrilled ecstatic elated overjoyed energized eager enthusiastic passionate amazed
astonished delighted exhilarated euphoric triumphant victorious winning celebrating cheering party
festival adventure thrill excitement surprise bonus jackpot prize victory triumph
success win winner champion celebration parade fireworks applause love adore
cherish passion desire dream inspire create discover explore freedom energy
power spark blaze soar fly dance sing laugh cheer glory
"""

POSITIVE_LOW = """
serene tranquil cozy comfortable soothing stillness rest sleep nap meadow
garden breeze sunset sunrise comfort ease bliss harmony balance grace
patience kindness trust hope home family friend hug smile tea
blanket pillow lullaby candle peace gratitude thankful blessed safe secure
satisfied mellow snug restful quietude calmness warmth hearth haven refuge
"""

NEGATIVE_HIGH = """
angry furious enraged outraged livid irate aggressive violent explosive terrified
horrified panicked alarmed frantic desperate hysterical shocked appalled hate rage
fury wrath terror panic fear dread horror nightmare attack fight
war battle conflict crisis disaster emergency danger threat scream shout
yell crash explosion storm chaos riot revenge betrayal scandal fraud
crime murder violence weapon enemy villain traitor menace havoc assault
"""

NEGATIVE_LOW = """
depressed sorrowful mournful melancholy dejected hopeless drained lonely isolated abandoned
neglected forgotten ignored grief sorrow despair regret shame failure loss
defeat rejection rain fog shadow grave funeral tomb dust decay
rust ruin boredom fatigue apathy numbness emptiness darkness winter ash
debt misery burden gloom hardship sickness weariness dismay woe void
"""

NEUTRAL_NOUNS = """
table chair window door wall floor ceiling roof house building
street road bridge river lake mountain valley forest field farm
city town village country nation state region area zone district
car truck train plane boat ship bicycle engine wheel tire
computer phone screen keyboard mouse cable battery camera printer speaker
book page paper pen pencil letter word sentence chapter story
school college course lesson test exam grade teacher student class
office desk meeting report project task plan schedule deadline budget
market store shop price cost money cash coin bill receipt
food bread milk cheese butter egg meat fish rice pasta
fruit apple banana orange grape lemon melon berry peach pear
vegetable potato tomato onion carrot pepper bean corn salad soup
water coffee juice bottle glass cup plate bowl spoon fork
shirt jacket coat dress shoe hat glove sock belt scarf
body head face eye ear nose mouth hand arm leg
doctor nurse hospital medicine patient health clinic dentist pharmacy surgery
music song band concert guitar piano drum violin radio album
movie film theater stage actor scene script audience ticket poster
game sport team player coach court score goal match season
weather cloud wind snow ice sun moon star sky planet
"""

NEUTRAL_VERBS = """
walk run jump sit stand open close read write speak
listen watch look see hear touch hold carry bring take
give send receive buy sell pay spend save count measure
build make fix repair clean wash cook bake cut drive
ride travel move stay leave arrive return visit meet work
study learn teach train practice play wait start stop finish
continue change turn push pull lift drop throw catch kick
pass follow lead find lose search choose decide think know
remember forget understand explain ask answer call talk prepare organize
arrange collect gather share divide join connect print copy paste
delete type click scroll upload download install wear fold hang
pack unpack fill empty pour mix stir slice boil serve
"""

EVERYDAY = """
today tomorrow yesterday morning evening night week month year spring
summer autumn monday friday sunday january minute hour north south
east west left right top bottom front back first second
third next last other another same different several one two
three four five ten hundred thousand million dozen here there
everywhere somewhere nothing something everything anything nobody everyone people person
group crowd member leader guest visitor neighbor stranger time place
thing way part kind sort form level stage question problem
reason result cause effect example detail fact idea news update
info data link post comment reply thread photo video profile
"""

PROMO = """
deal sale discount offer promo coupon bargain savings shipping delivery
clearance outlet stock brand product item gift claim subscribe megasale
voucher cashback freebie giveaway bundle upgrade trial membership refer earn
"""

GROUPS = [
    # (words, valence base, arousal base, happiness base, spread)
    (POSITIVE_HIGH, 7.8, 7.2, 7.8, 1.0),
    (POSITIVE_LOW, 7.2, 1.8, 7.3, 0.9),
    (NEGATIVE_HIGH, 1.3, 7.5, 1.2, 0.9),
    (NEGATIVE_LOW, 2.0, 2.2, 1.9, 0.9),
    (NEUTRAL_NOUNS, 4.6, 3.6, 4.7, 1.1),
    (NEUTRAL_VERBS, 4.6, 3.6, 4.7, 1.1),
    (EVERYDAY, 4.6, 3.6, 4.7, 1.1),
    (PROMO, 6.8, 5.8, 6.4, 0.8),
    (ADJECTIVES, 5.5, 4.5, 5.5, 1.5),
]


def _jitter(word: str, channel: str) -> float:
    h = hashlib.sha256(f"{word}|{channel}".encode()).digest()
    return int.from_bytes(h[:4], "big") / 2**31 - 1.0  # [-1, 1)


def _clip(x: float) -> float:
    return max(0.0, min(9.0, round(x, 3)))


def main() -> None:
    adjectives = sorted(set(ADJECTIVES.split()))
    lexicon: dict[str, tuple[float, float, float]] = {}
    for words, v, a, h, spread in GROUPS:
        for w in words.split():
            if w in lexicon:
                continue  # first group listing a word wins
            lexicon[w] = (
                _clip(v + spread * _jitter(w, "v")),
                _clip(a + spread * _jitter(w, "a")),
                _clip(h + spread * _jitter(w, "h")),
            )
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    lex_path = DATA_DIR / "sentiment_lexicon.tsv"
    with open(lex_path, "w", encoding="utf-8") as f:
        for w in sorted(lexicon):
            v, a, h = lexicon[w]
            f.write(f"{w}\t{v}\t{a}\t{h}\n")
    adj_path = DATA_DIR / "adjectives.txt"
    with open(adj_path, "w", encoding="utf-8") as f:
        f.write("\n".join(adjectives) + "\n")
    print(f"wrote {len(lexicon)} lexicon entries -> {lex_path}")
    print(f"wrote {len(adjectives)} adjectives -> {adj_path}")


if __name__ == "__main__":
    main()
