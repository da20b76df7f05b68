"""Bundled synthetic demo corpus: 200 fantasy-flavored dialogues generated
from weighted template pools with a fixed seed.

The pools are tuned so the corpus mirrors the bias profile the toolkit is
built to expose: roughly 73% of gendered turn tokens are male, personas
reference men far more often than women, and male-labeled characters
outnumber female-labeled ones. Regenerating with the default seed reproduces
the shipped file byte for byte."""
from __future__ import annotations

import argparse
from pathlib import Path
from random import Random

from .corpus import (
    Character,
    Dialogue,
    DialogueCorpus,
    GenderLabel,
    Utterance,
    load_corpus,
    write_corpus,
)
from .ngram_lm import DEFAULT_SEED

_DATA_DIR = Path(__file__).resolve().parent / "data"

DEMO_DIALOGUES = 200
DEMO_TRAIN_FRACTION = 0.8

# (name, persona, gender label); labels skew male about 1.6x, persona
# references skew male harder, echoing the imbalance under study.
CAST = [
    ("wife", "I am the wife of a farmer. I cook and clean so my husband has a warm meal when he returns.", GenderLabel.FEMALE),
    ("chief wife", "I am the king's chief wife. Of all the women he has married I am the principal one. My sons will rule after my husband.", GenderLabel.FEMALE),
    ("mother", "I am a mother of eight children. I tend to the needs of my little ones each day.", GenderLabel.FEMALE),
    ("young woman", "I am a young woman from the village. I want to follow in my father's footsteps.", GenderLabel.FEMALE),
    ("shady lady", "I am a shady lady. I work in a tavern and split my coin with the tavernkeeper so he will offer me a room.", GenderLabel.FEMALE),
    ("king", "I rule this kingdom. My father was king before me and my son will be king after.", GenderLabel.MALE),
    ("husband", "I try to be good to my wife. I want to provide for my family and keep them safe.", GenderLabel.MALE),
    ("farmer bob", "I was born in a poor village. I eat what we grow and love being close to the earth.", GenderLabel.MALE),
    ("father", "I am a role model for my children. I provide meat for the family and keep a roof over their heads.", GenderLabel.MALE),
    ("blacksmith", "I forge steel for the king and his men. My brother taught me the craft when I was a boy.", GenderLabel.MALE),
    ("knight", "I ride for the king. My father was a knight and his father before him.", GenderLabel.MALE),
    ("merchant prince", "I sail to distant ports. My uncle left me his trade routes and his debts.", GenderLabel.MALE),
    ("old soldier", "I served the old king for thirty years. Now I guard the gate and drink my pay.", GenderLabel.MALE),
    ("merchant", "What a great day for more money. I sell wares from distant lands.", GenderLabel.NEUTRAL),
    ("traveler", "I wander from town to town trading stories for bread.", GenderLabel.NEUTRAL),
    ("innkeeper", "I keep the inn by the crossroads. All are welcome while their coin lasts.", GenderLabel.NEUTRAL),
    ("healer", "I gather herbs in the wood and mend wounds for the village.", GenderLabel.NEUTRAL),
    ("beggar", "I sleep by the temple steps and live on what the market throws away.", GenderLabel.NEUTRAL),
    ("ghost", "I do not remember my past life. I drift through the old halls at night.", GenderLabel.UNKNOWN),
    ("owl", "I can look around the forest. I see what others miss.", GenderLabel.UNKNOWN),
]

# Turn templates by genderedness, (text, weight). The leading male template
# is deliberately the single most frequent response in the corpus, so an
# unconditioned mode-seeking decoder amplifies the male skew.
MALE_TURNS = [
    ("hail our king for he commands this land", 35),
    ("my father guards the gate at dawn", 15),
    ("a knight rides out at first light", 12),
    ("good sir you honor this humble place", 10),
    ("he sharpens a blade for the coming war", 10),
    ("the king's banner flies over the keep", 10),
    ("bring word to the wizard and his brother", 8),
    ("mister smith forges steel for the lord", 5),
    ("uncle owen tends to the horses", 5),
]
FEMALE_TURNS = [
    ("glory to the queen for she rules this land", 30),
    ("my mother tends the garden by the well", 15),
    ("a priestess prays at the old shrine", 12),
    ("seek the witch and her sister in the wood", 10),
    ("she weaves a cloak for the winter", 10),
    ("aunt mara tends her geese well", 10),
    ("good madam you honor this humble place", 8),
    ("mrs smith bakes bread for the lady", 5),
]
BOTH_TURNS = [
    ("the king and queen feast in the great hall", 40),
    ("my brother serves the queen with pride", 30),
    ("her husband rides to the castle today", 30),
]
NEUTRAL_TURNS = [
    ("all is well in the village tonight", 10),
    ("what news from the road weary traveler", 9),
    ("come rest by the fire a while", 9),
    ("i have coin for bread and ale", 9),
    ("storms gather over the mountains again", 8),
    ("we march for the border at sunrise", 8),
    ("this tavern has seen better days", 8),
    ("fetch water from the well before dark", 8),
    ("rumors speak of treasure in the ruins", 8),
    ("keep your voice down in these halls", 8),
    ("trade has been slow since the frost", 8),
    ("nothing stirs beyond the old wall", 7),
]

# Pool mix per turn, tuned so male tokens sit near 73.4% of gendered tokens.
POOL_WEIGHTS = [
    (MALE_TURNS, 268),
    (FEMALE_TURNS, 72),
    (BOTH_TURNS, 45),
    (NEUTRAL_TURNS, 615),
]


def _draw(rng: Random, pool: list[tuple[str, int]]) -> str:
    texts = [t for t, _ in pool]
    weights = [w for _, w in pool]
    return rng.choices(texts, weights=weights, k=1)[0]


def build_demo_corpus(
    seed: int = DEFAULT_SEED, n_dialogues: int = DEMO_DIALOGUES
) -> DialogueCorpus:
    rng = Random(seed)
    pools = [pool for pool, _ in POOL_WEIGHTS]
    pool_weights = [w for _, w in POOL_WEIGHTS]
    n_train = int(n_dialogues * DEMO_TRAIN_FRACTION)
    dialogues = []
    for i in range(n_dialogues):
        first, second = rng.sample(range(len(CAST)), 2)
        characters = tuple(
            Character(name, persona, label)
            for name, persona, label in (CAST[first], CAST[second])
        )
        turns = []
        for turn_index in range(rng.randint(4, 8)):
            pool = rng.choices(pools, weights=pool_weights, k=1)[0]
            turns.append(Utterance(turn_index % 2, _draw(rng, pool)))
        dialogues.append(
            Dialogue(
                id=f"demo-{i:03d}",
                characters=characters,
                turns=tuple(turns),
                split="train" if i < n_train else "test",
            )
        )
    return DialogueCorpus(tuple(dialogues))


def bundled_demo_corpus_path() -> Path:
    return _DATA_DIR / "demo_corpus.jsonl"


def load_demo_corpus() -> DialogueCorpus:
    return load_corpus(bundled_demo_corpus_path())


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Regenerate the demo corpus.")
    parser.add_argument("--out", default=str(bundled_demo_corpus_path()))
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    write_corpus(build_demo_corpus(args.seed), args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
