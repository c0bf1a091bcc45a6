#!/usr/bin/env python3
"""Writes the synthetic fixture under data/fixture/.

Vectors come from a small concept embedder: every content word of a risk
label maps to a shared risk direction plus that label's direction, every
other word to a pseudo-random direction. Keys for phrases follow the
phrase-key rule of the C++ library (FNV-1a-64 over the lowercased,
whitespace-collapsed phrase).
"""

import argparse
import json
import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parents[2]
DIM = 64
SEED = 20240611

LABELS = ["Loneliness", "LackOfReciprocalLove", "SelfHate", "Liability", "AcquiredCapability"]

SEEDS = {
    "Loneliness": ["disconnected", "loneliness", "pulling together", "no care", "seasonal variation",
                   "reductions in social interactions", "marriage", "no children and friend", "living alone",
                   "no social supports"],
    "LackOfReciprocalLove": ["lack love", "no love", "social withdrawal", "low openness", "single jail cell",
                             "domestic violence", "childhood abuse", "familial discord"],
    "SelfHate": ["I hate myself", "I am useless", "low self-esteem", "self-blame", "shame",
                 "mental state of agitation"],
    "Liability": ["my death is worth more than my life", "distress from homelessness", "distress from incarceration",
                  "distress from unemployment", "distress from physical illness", "expendability unwanted",
                  "belief of burden on family"],
    "AcquiredCapability": ["increased physical pain tolerance", "reduced fear of death", "habituation",
                           "physical pain", "acquired capability", "lowered fear of death", "past serious ideation",
                           "non-zero degree of fearlessness", "courage and the ability to commit suicide",
                           "elevated physical pain tolerance", "recent suicidal behavior", "serious levels of SI",
                           "cutting one's wrists", "pulling the trigger on a gun", "jumping off a building",
                           "overdose"],
}

VOCAB = {
    "Loneliness": "lonely loneliness alone isolated disconnected nobody empty invisible solitary friendless living "
                  "children friend friends marriage care social supports interactions reductions seasonal variation "
                  "together",
    "LackOfReciprocalLove": "love loves loved unloved lack rejected ignored neglected abandoned betrayed withdrawal "
                            "openness single jail cell domestic violence childhood abuse familial discord cold",
    "SelfHate": "hate useless self-esteem self-blame shame ashamed worthless pathetic failure disgusted mental state "
                "agitation blame mirror",
    "Liability": "burden burdensome worth life distress homelessness incarceration unemployment illness expendability "
                 "unwanted belief family drain cost better",
    "AcquiredCapability": "increased physical pain tolerance reduced fear death habituation acquired capability lowered "
                          "past serious ideation non-zero degree fearlessness courage ability commit suicide elevated "
                          "recent suicidal behavior levels si cutting one's wrists trigger gun jumping building "
                          "overdose pills bridge afraid scared plan",
}

SENTENCES = {
    "Loneliness": [
        "I feel so lonely every single night.",
        "Nobody ever texts me back anymore.",
        "I have been living alone in this empty apartment for years.",
        "I feel invisible and disconnected from everyone at work.",
        "Most weekends I sit alone with no friends to call.",
        "The loneliness gets worse every winter.",
    ],
    "LackOfReciprocalLove": [
        "My parents never showed me any love growing up.",
        "I keep getting rejected by the people I love.",
        "My partner ignored me for months and then left.",
        "I grew up with childhood abuse and constant familial discord.",
        "I feel unloved and neglected by everyone close to me.",
        "Whenever I reach out I am met with cold silence and abandoned again.",
    ],
    "SelfHate": [
        "I hate myself more every day.",
        "I am useless and everything I touch turns to failure.",
        "I feel so much shame when I look in the mirror.",
        "I am worthless and pathetic.",
        "My low self-esteem makes me blame myself for everything.",
        "I am disgusted and ashamed of who I have become.",
    ],
    "Liability": [
        "Everyone would be better off without me.",
        "I am just a burden on my family.",
        "My life is worth less than the trouble I cause.",
        "Since the unemployment started I only cause distress.",
        "I cost my family too much and give nothing back.",
        "I feel like a burdensome drain on everyone around me.",
    ],
    "AcquiredCapability": [
        "I have been cutting my wrists again.",
        "I am not afraid of death anymore.",
        "I looked up how many pills it takes to overdose.",
        "I stood on the bridge last night and was not scared.",
        "The physical pain does not bother me like it used to.",
        "I wrote down a plan and I have the courage to commit to it.",
    ],
}

NEUTRAL = [
    "Work has been busy lately.",
    "I moved to a new city last spring.",
    "The weather here has been rainy.",
    "I started a new job in March.",
    "My cat knocked over a plant this morning.",
    "I watched a movie with my roommate yesterday.",
    "School starts again next week.",
    "I have been trying to cook more meals at home.",
    "The bus was late again today.",
    "My phone screen cracked last week.",
]

COMMENTS_GENERIC = [
    "I am so sorry you are going through this.",
    "Sending you a big hug from far away.",
    "You are not the only one who feels this way.",
    "Have you tried talking to a therapist about it?",
    "Things can get better, one day at a time.",
    "I went through something similar last year and it did improve.",
    "Please reach out to someone you trust.",
    "Thank you for sharing this, it takes courage to post.",
]

COMMENTS_URGENT = [
    "Please call a crisis line tonight, you deserve support.",
    "Please stay safe and call a crisis line right now.",
    "If you are in danger please contact emergency services right now.",
    "Your life matters, please call a crisis line tonight.",
    "Please put the pills away and call a crisis line.",
]

AI_OPENERS = [
    "I am really sorry you are dealing with this.",
    "That sounds incredibly hard.",
    "Thank you for putting this into words.",
    "I can hear how heavy this is for you.",
]

AI2_FACTOR = {
    "ThwartedBelongingness": "Feeling cut off and unloved hurts, and reaching out to even one person can start to change that.",
    "PerceivedBurdensomeness": "You are not a burden, even when your mind insists that you are.",
    "AcquiredCapability": "Your safety matters most right now, so please keep the means of harm away and call a crisis line.",
}

AI_CLOSERS = [
    "I hope things get easier soon.",
    "Take care of yourself tonight.",
    "You deserve support.",
]

AI3_EXTRA = [
    "What you described about {echo} makes sense, and your feelings are valid.",
    "Many people who felt this way have found their way to better days, and there is real hope for you too.",
    "If you can, tell one trusted person how you feel today, and consider calling a crisis line.",
    "Small steps count, and tomorrow can look different from today.",
]

# Lethal posts pair words of two labels with filler nouns inside one RAKE
# run longer than the admission limit, so they add no phrases to codebooks.
LETHAL_WORDS = {
    "Loneliness": ["lonely", "isolated", "invisible", "friendless"],
    "LackOfReciprocalLove": ["unloved", "rejected", "neglected", "abandoned"],
    "SelfHate": ["worthless", "pathetic", "ashamed", "useless"],
    "Liability": ["burden", "burdensome", "drain", "unwanted"],
    "AcquiredCapability": ["overdose", "pills", "wrists", "suicidal"],
}
LETHAL_PAIRS = [
    ("Loneliness", "AcquiredCapability"),
    ("LackOfReciprocalLove", "SelfHate"),
    ("Liability", "AcquiredCapability"),
    ("Loneliness", "SelfHate"),
    ("LackOfReciprocalLove", "Liability"),
]
FILLER = ("umbrella radio kettle lantern pebble velvet compass harbor saddle marble quartz violin tundra hammock "
          "meadow anchor pillow ferry biscuit canyon orchard lagoon tambourine walnut cobalt thimble glacier mosaic "
          "sparrow chimney ribbon copper parchment juniper ladder cactus prism satchel lemon tulip").split()
# FILLER[i] and FILLER[i + 20] embed to opposite directions, so a post that
# uses both loses the filler component while each phrase keeps it.
FILLER_PAIRS = 20


def lethal_text(rng):
    pairs = rng.sample(range(FILLER_PAIRS), 15)
    parts = []
    for i, (a, b) in enumerate(LETHAL_PAIRS):
        j = (i - 1) % 5
        fillers = [FILLER[p] for p in pairs[3 * i:3 * i + 3]]
        fillers += [FILLER[p + FILLER_PAIRS] for p in pairs[3 * j:3 * j + 3]]
        words = [rng.choice(LETHAL_WORDS[a]), rng.choice(LETHAL_WORDS[b])] + fillers
        rng.shuffle(words)
        parts.append("I am " + " ".join(words) + ".")
    return " ".join(parts)


# (kind, count): composition of the 50 posts
COMPOSITION = [
    ("lethal", 9),
    ("ac", 7),
    ("pb", 9),
    ("tb", 9),
    ("tbpb", 4),
    ("lon", 3),
    ("neutral", 9),
]

KIND_LABELS = {
    "lethal": LABELS,
    "ac": ["AcquiredCapability"],
    "pb": ["SelfHate", "Liability"],
    "tb": ["Loneliness", "LackOfReciprocalLove"],
    "tbpb": ["Loneliness", "LackOfReciprocalLove", "SelfHate", "Liability"],
    "lon": ["Loneliness"],
    "neutral": [],
}


def load_stoplist():
    words = set()
    for line in (ROOT / "core/data/stoplist_en.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return words


STOP = load_stoplist()


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def lower_ascii(s: str) -> str:
    return "".join(c.lower() if "A" <= c <= "Z" else c for c in s)


def phrase_key(phrase: str) -> str:
    norm = " ".join(lower_ascii(p) for p in phrase.split())
    return "phrase:%016x" % fnv1a64(norm.encode("utf-8"))


def is_word_char(c: str) -> bool:
    return c.isascii() and c.isalnum() or (not c.isascii() and c.isalpha())


def rake_candidates(text: str):
    """Maximal runs of non-stopword, non-numeric words; punctuation breaks runs."""
    cands, run, word = [], [], []

    def close_word():
        if not word:
            return
        w = "".join(word)
        word.clear()
        if w in STOP or w.isdigit():
            close_run()
        else:
            run.append(w)

    def close_run():
        if run:
            cands.append(list(run))
        run.clear()

    for i, c in enumerate(text):
        if is_word_char(c):
            word.append(lower_ascii(c))
        elif c in "'-’" and word and i + 1 < len(text) and is_word_char(text[i + 1]):
            word.append("-" if c == "-" else "'")
        elif c.isspace():
            close_word()
        else:
            close_word()
            close_run()
    close_word()
    close_run()
    return [" ".join(r) for r in cands]


def normalize_phrase(p: str) -> str:
    s = " ".join(lower_ascii(x) for x in p.split())
    b, e = 0, len(s)
    while b < e and not is_word_char(s[b]):
        b += 1
    while e > b and not is_word_char(s[e - 1]):
        e -= 1
    return " ".join(s[b:e].split())


class ConceptEmbedder:
    def __init__(self, seed):
        rng = random.Random(seed)
        self.rng_seed = seed
        basis = self._orthonormal(rng, 1 + len(LABELS))
        self.risk = basis[0]
        self.label_dir = dict(zip(LABELS, basis[1:]))
        self.word_label = {}
        for label in LABELS:
            for w in VOCAB[label].split():
                self.word_label.setdefault(w, label)

    @staticmethod
    def _orthonormal(rng, n):
        out = []
        while len(out) < n:
            v = [rng.gauss(0, 1) for _ in range(DIM)]
            for u in out:
                d = sum(a * b for a, b in zip(v, u))
                v = [a - d * b for a, b in zip(v, u)]
            norm = math.sqrt(sum(a * a for a in v))
            out.append([a / norm for a in v])
        return out

    def _noise(self, token):
        r = random.Random(fnv1a64(("noise:" + token).encode()) ^ self.rng_seed)
        v = [r.gauss(0, 1) for _ in range(DIM)]
        n = math.sqrt(sum(a * a for a in v))
        return [a / n for a in v]

    def tokens(self, text):
        out, word = [], []
        for i, c in enumerate(text + " "):
            if is_word_char(c):
                word.append(lower_ascii(c))
            elif c in "'-" and word and i + 1 < len(text) and is_word_char(text[i + 1]):
                word.append(c)
            else:
                if word:
                    out.append("".join(word))
                word = []
        return [t for t in out if t not in STOP and not t.isdigit()]

    def token_vector(self, tok):
        if tok in FILLER:
            i = FILLER.index(tok)
            base = self._noise(FILLER[i % FILLER_PAIRS])
            return base if i < FILLER_PAIRS else [-x for x in base]
        label = self.word_label.get(tok)
        noise = self._noise(tok)
        if label is None:
            return noise
        return [0.8 * r + 1.0 * l + 0.15 * n for r, l, n in zip(self.risk, self.label_dir[label], noise)]

    def embed(self, text):
        toks = self.tokens(text) or [lower_ascii(text.strip()) or "empty"]
        v = [0.0] * DIM
        for t in toks:
            for i, x in enumerate(self.token_vector(t)):
                v[i] += x
        n = math.sqrt(sum(a * a for a in v))
        return [round(a / n, 6) for a in v]


def cosine(a, b):
    return sum(x * y for x, y in zip(a, b)) / math.sqrt(sum(x * x for x in a) * sum(y * y for y in b))


def distant_examples(rng):
    """Per-label positives and negatives for the bootstrap gate, split 55:45."""
    rows = []
    for label in LABELS:
        others = [x for L in LABELS if L != label for x in SENTENCES[L]] + NEUTRAL + COMMENTS_GENERIC
        for k in range(120):
            if k % 4 == 0:
                rows.append({"label": label, "text": lethal_text(rng), "y": 1})
            pos = rng.sample(SENTENCES[label], rng.randrange(1, 3)) + rng.sample(others, rng.randrange(0, 3))
            rng.shuffle(pos)
            rows.append({"label": label, "text": " ".join(pos), "y": 1})
            neg = rng.sample(others, rng.randrange(1, 4))
            rows.append({"label": label, "text": " ".join(neg), "y": 0})
    rng.shuffle(rows)
    cut = len(rows) * 55 // 100
    return rows[:cut], rows[cut:]


def build(out_dir: pathlib.Path):
    rng = random.Random(SEED)
    emb = ConceptEmbedder(SEED)

    posts, comments, kinds = [], [], {}
    t0 = 1_700_000_000
    n = 0
    for kind, count in COMPOSITION:
        for _ in range(count):
            n += 1
            pid = f"p{n:03d}"
            parts = [lethal_text(rng)] if kind == "lethal" else []
            for label in KIND_LABELS[kind] if kind != "lethal" else []:
                parts.extend(rng.sample(SENTENCES[label], 2))
            parts.extend(rng.sample(NEUTRAL, 1 if KIND_LABELS[kind] else 3))
            rng.shuffle(parts)
            posts.append({"id": pid, "kind": "post", "parent_id": None, "author_id": f"u{rng.randrange(1, 40):02d}",
                          "created_at": t0 + n * 3600, "text": " ".join(parts), "score": rng.randrange(1, 60)})
            kinds[pid] = kind
    rng.shuffle(posts)

    c = 0
    for post in posts:
        pool = COMMENTS_URGENT if kinds[post["id"]] in ("lethal", "ac") else COMMENTS_GENERIC
        for j in range(rng.randrange(2, 4)):
            c += 1
            text = rng.choice(pool) if j == 0 else rng.choice(COMMENTS_GENERIC + COMMENTS_URGENT[:1])
            comments.append({"id": f"c{c:04d}", "kind": "comment", "parent_id": post["id"],
                             "author_id": f"u{rng.randrange(40, 90):02d}",
                             "created_at": post["created_at"] + rng.randrange(60, 7200), "text": text,
                             "score": rng.randrange(0, 25)})

    factors = {
        "lethal": ["ThwartedBelongingness", "PerceivedBurdensomeness", "AcquiredCapability"],
        "ac": ["AcquiredCapability"],
        "pb": ["PerceivedBurdensomeness"],
        "tb": ["ThwartedBelongingness"],
        "tbpb": ["ThwartedBelongingness", "PerceivedBurdensomeness"],
        "lon": [],
        "neutral": [],
    }
    responses = []
    for post in sorted(posts, key=lambda p: p["id"]):
        first = post["text"].split(".")[0].strip().lower()
        echo = " ".join(first.split()[-4:])
        opener = rng.choice(AI_OPENERS)
        closer = rng.choice(AI_CLOSERS)
        ai1 = f"{opener} {closer}"
        extra = [AI2_FACTOR[f] for f in factors[kinds[post["id"]]]]
        ai2 = " ".join([opener] + extra + [closer])
        k3 = rng.randrange(2, len(AI3_EXTRA) + 1)
        ai3 = " ".join([opener] + extra + [s.format(echo=echo) for s in AI3_EXTRA[:k3]] + [closer])
        for tier, text in (("AI1", ai1), ("AI2", ai2), ("AI3", ai3)):
            responses.append({"post_id": post["id"], "tier": tier, "text": text})

    def score_for(rid, base):
        r = random.Random(fnv1a64(rid.encode()))
        return round(min(1.0, max(0.0, base + r.uniform(-0.15, 0.15))), 4)

    scores = []
    for cmt in comments:
        scores.append({"id": cmt["id"], "formality": score_for(cmt["id"] + "f", 0.35),
                       "empathy": score_for(cmt["id"] + "e", 0.45)})
    for r in responses:
        rid = f'{r["post_id"]}:{r["tier"]}'
        base = {"AI1": 0.6, "AI2": 0.65, "AI3": 0.7}[r["tier"]]
        scores.append({"id": rid, "formality": score_for(rid + "f", base), "empathy": score_for(rid + "e", base + 0.1)})

    vectors = {}
    for d in posts + comments:
        vectors[d["id"]] = emb.embed(d["text"])
    for r in responses:
        vectors[f'{r["post_id"]}:{r["tier"]}'] = emb.embed(r["text"])
    phrases = set()
    for label in LABELS:
        for s in SEEDS[label]:
            phrases.add(normalize_phrase(s))
    for p in posts:
        phrases.update(rake_candidates(p["text"]))
    for ph in phrases:
        vectors[phrase_key(ph)] = emb.embed(ph)

    # seed-codebook labeling preview
    buckets = {}
    for p in posts:
        v = vectors[p["id"]]
        s = {L: max(cosine(v, vectors[phrase_key(normalize_phrase(x))]) for x in SEEDS[L]) for L in LABELS}
        tb = (s["Loneliness"] + s["LackOfReciprocalLove"]) / 2 > 0.6
        pb = (s["SelfHate"] + s["Liability"]) / 2 > 0.6
        ac = s["AcquiredCapability"] > 0.6
        b = "lethal" if tb and pb and ac else "AC" if ac else "PB" if pb else "TB" if tb else "none"
        buckets.setdefault(kinds[p["id"]], {}).setdefault(b, 0)
        buckets[kinds[p["id"]]][b] += 1

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "corpus.jsonl", "w") as f:
        docs = sorted(posts, key=lambda d: d["created_at"])
        for post in docs:
            f.write(json.dumps(post) + "\n")
            for cmt in comments:
                if cmt["parent_id"] == post["id"]:
                    f.write(json.dumps(cmt) + "\n")
    with open(out_dir / "embeddings.jsonl", "w") as f:
        for k in sorted(vectors):
            f.write(json.dumps({"key": k, "vector": vectors[k]}) + "\n")
    with open(out_dir / "responses.jsonl", "w") as f:
        for r in responses:
            f.write(json.dumps(r) + "\n")
    with open(out_dir / "scores.jsonl", "w") as f:
        for s in scores:
            f.write(json.dumps(s) + "\n")
    (out_dir / "kinds.json").write_text(json.dumps(dict(sorted(kinds.items())), indent=1) + "\n")
    train, test = distant_examples(random.Random(SEED + 1))
    for name, rows in (("distant_train.jsonl", train), ("distant_test.jsonl", test)):
        with open(out_dir / name, "w") as f:
            for r in rows:
                f.write(json.dumps(r) + "\n")
    config = {"corpus": "corpus.jsonl", "bootstrap": "bootstrap.json", "embeddings": "embeddings.jsonl", "responses": "responses.jsonl",
              "scores": "scores.jsonl", "tau": 0.6, "seed": 7, "k_min": 5, "k_max": 14, "per_bucket": 3,
              "sage_k": 16, "sage_min_count": 5, "expand_max_iters": 10}
    (out_dir / "config.json").write_text(json.dumps(config, indent=2) + "\n")
    return buckets


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(ROOT / "data/fixture"))
    args = ap.parse_args()
    buckets = build(pathlib.Path(args.out))
    for kind, counts in buckets.items():
        print(kind, counts)


if __name__ == "__main__":
    main()
