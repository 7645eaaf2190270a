#!/usr/bin/env python3
"""Turn the raw ProPublica COMPAS export into a scored csv for rocpost.

Input: compas-scores-two-years.csv from the ProPublica data release
(https://github.com/propublica/compas-analysis). Output: compas_scores.csv
with columns score,group,label where the score is an out-of-fold logistic
regression probability of two-year recidivism, the group is the race
column restricted to African-American vs Caucasian, and the label is
two_year_recid. The usual cleaning filters leave 5,278 rows.

The score model is deliberately simple and fully deterministic (fixed
folds, fixed seed) so downstream runs are reproducible end to end.
"""

import argparse
import os
import sys

import numpy as np
import pandas as pd
from sklearn.compose import ColumnTransformer
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import StratifiedKFold, cross_val_predict
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

NUMERIC = ["age", "juv_fel_count", "juv_misd_count", "juv_other_count",
           "priors_count"]
BINARY = ["is_male", "charge_is_felony"]


def clean(df: pd.DataFrame) -> pd.DataFrame:
    # standard ProPublica filters: valid screening window, resolved cases,
    # ordinary charges, scored individuals, two largest race groups
    df = df[(df.days_b_screening_arrest <= 30)
            & (df.days_b_screening_arrest >= -30)
            & (df.is_recid != -1)
            & (df.c_charge_degree != "O")
            & (df.score_text != "N/A")]
    df = df[df.race.isin(["African-American", "Caucasian"])].copy()
    df["is_male"] = (df.sex == "Male").astype(int)
    df["charge_is_felony"] = (df.c_charge_degree == "F").astype(int)
    return df.reset_index(drop=True)


def score(df: pd.DataFrame, folds: int, seed: int) -> np.ndarray:
    model = Pipeline([
        ("prep", ColumnTransformer([("num", StandardScaler(), NUMERIC)],
                                   remainder="passthrough")),
        ("logit", LogisticRegression(max_iter=1000)),
    ])
    cv = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    probs = cross_val_predict(model, df[NUMERIC + BINARY], df.two_year_recid,
                              cv=cv, method="predict_proba")
    return probs[:, 1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("raw_csv", help="path to compas-scores-two-years.csv")
    ap.add_argument("--out-dir", default=".", help="output directory")
    ap.add_argument("--folds", type=int, default=5,
                    help="cross-fitting folds for out-of-fold scores")
    ap.add_argument("--seed", type=int, default=0, help="fold shuffle seed")
    args = ap.parse_args()

    df = clean(pd.read_csv(args.raw_csv))
    probs = score(df, args.folds, args.seed)

    os.makedirs(args.out_dir, exist_ok=True)
    out_path = os.path.join(args.out_dir, "compas_scores.csv")
    out = pd.DataFrame({
        "score": [format(p, ".17g") for p in probs],
        "group": df.race,
        "label": df.two_year_recid.astype(int),
    })
    out.to_csv(out_path, index=False)

    auc = roc_auc_score(df.two_year_recid, probs)
    print(f"wrote {out_path}: {len(out)} rows, auc {auc:.3f}")
    for race, part in df.groupby("race"):
        print(f"  {race}: n={len(part)}, "
              f"base rate {part.two_year_recid.mean():.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
