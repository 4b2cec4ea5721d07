# Copyright 2026 The preadd Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reference values for the C++ tests, computed with numpy/scipy/sklearn/mpmath.

Run once; the output in fixtures/oracles/ is checked in and read by the tests.
Nothing here imports or links the C++ code.
"""

import json
import math
import pathlib

import mpmath
import numpy as np
from scipy import stats
from sklearn.feature_extraction.text import TfidfVectorizer

OUT = pathlib.Path(__file__).resolve().parents[2] / "fixtures" / "oracles"
mpmath.mp.dps = 50


def power_combine(base, prefixed, alpha):
    w = [mpmath.mpf(p) ** alpha * mpmath.mpf(b) ** (1 - alpha) for b, p in zip(base, prefixed)]
    z = sum(w)
    return [float(x / z) for x in w]


def tfidf(docs, queries):
    vec = TfidfVectorizer(token_pattern=r"(?u)\b\w+\b", norm=None, smooth_idf=True, sublinear_tf=False)
    vec.fit(docs)
    m = vec.transform(queries).toarray()
    return vec, m


def cosine(u, v):
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    return 0.0 if nu == 0 or nv == 0 else float(u @ v / (nu * nv))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20260101)

    # Paired t-tests: 25 pairs of assorted lengths and shapes.
    pairs = []
    for i in range(25):
        n = int(rng.integers(2, 40)) if i else 10
        a = rng.normal(rng.uniform(-2, 2), rng.uniform(0.1, 3), n)
        b = a + rng.normal(rng.uniform(-1, 1), rng.uniform(0.05, 2), n)
        a, b = np.round(a, 6), np.round(b, 6)
        r = stats.ttest_rel(a, b)
        pairs.append({"a": a.tolist(), "b": b.tolist(), "t": float(r.statistic), "p": float(r.pvalue), "dof": n - 1})
    (OUT / "ttest_pairs.json").write_text(json.dumps(pairs, indent=1) + "\n")

    values = {}
    values["combine_alpha_m1"] = power_combine([.2, .3, .5], [.5, .3, .2], -1)
    values["combine_alpha_2"] = power_combine([.2, .3, .5], [.5, .3, .2], 2)
    values["normalize_0_ln3"] = [math.log(.25), math.log(.75)]

    # Bigram "a b a b", add-one over the 2 real words: base ctx [a], prefixed ctx [b].
    p_a = [mpmath.mpf(1) / 4, mpmath.mpf(3) / 4]  # P(a|a), P(b|a)
    p_b = [mpmath.mpf(2) / 3, mpmath.mpf(1) / 3]  # P(a|b), P(b|b)
    values["decode_bigram_alpha_m1"] = power_combine(p_a, p_b, -1)
    values["ppl_a_ba"] = float(mpmath.power(mpmath.mpf(3) / 4 * mpmath.mpf(2) / 3, -0.5))

    # TF-IDF on {"a b", "b c"}.
    _, m = tfidf(["a b", "b c"], ["a b", "b c"])
    values["tfidf_cos_ab_bc"] = cosine(m[0], m[1])

    # Dynamic prefix selection over a 3-member bank.
    bank = ["the cat sat on the mat", "a dog barked at the cat", "rain fell on the quiet town"]
    prompt = "the dog sat"
    _, m = tfidf(bank, bank + [prompt])
    sims = [cosine(m[3], m[i]) for i in range(3)]
    values["bank3"] = {"bank": bank, "prompt": prompt, "similarities": sims, "argmax": int(np.argmax(sims))}

    values["cos_12_21"] = cosine(np.array([1.0, 2.0]), np.array([2.0, 1.0]))
    values["nb_x"] = (3 / 5) / (3 / 5 + 1 / 5)
    values["pronoun_bias"] = {"p_female": .2 / .8, "bias": abs(.5 - .2 / .8)}

    # Lexicon success: {good} vs {bad}, target positive.
    conts = ["good good bad", "bad film", "good"]
    bal = [c.split().count("good") - c.split().count("bad") for c in conts]
    values["lexicon_success"] = {"continuations": conts, "rate": sum(b > 0 for b in bal) / len(bal)}

    (OUT / "values.json").write_text(json.dumps(values, indent=1) + "\n")


if __name__ == "__main__":
    main()
