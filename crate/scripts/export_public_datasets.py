"""Export the public-domain benchmark CSVs bundled under data/benchmark/.

Sources (all redistributable):
  iris        - Fisher's iris measurements (public domain), via scikit-learn.
  anes96      - 1996 American National Election Study extract (public domain), via statsmodels.
  modechoice  - Greene's travel mode choice data (public domain), via statsmodels.
  grunfeld    - Grunfeld investment data (public domain), via statsmodels.
"""
import os

import numpy as np
import pandas as pd
import statsmodels.api as sm
from sklearn.datasets import load_iris

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "benchmark")


def iris():
    d = load_iris(as_frame=True)
    df = d.data.copy()
    df.columns = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    df["label"] = [d.target_names[t] for t in d.target]
    return df


def anes96():
    d = sm.datasets.anes96.load_pandas().data
    d = d.sample(n=240, random_state=7).reset_index(drop=True)
    df = d[["popul", "TVnews", "selfLR", "ClinLR", "DoleLR", "PID", "age", "educ", "income"]].copy()
    df["label"] = np.where(d["vote"] == 1.0, "dole", "clinton")
    return df


def modechoice():
    d = sm.datasets.modechoice.load_pandas().data
    names = {1.0: "air", 2.0: "train", 3.0: "bus", 4.0: "car"}
    rows = []
    for ind, g in d.groupby("individual"):
        g = g.set_index("mode")
        row = {"hinc": g["hinc"].iloc[0], "psize": g["psize"].iloc[0]}
        for m in (1.0, 2.0, 3.0):
            row["ttme_" + names[m]] = g.loc[m, "ttme"]
        for m in (1.0, 2.0, 3.0, 4.0):
            row["gc_" + names[m]] = g.loc[m, "gc"]
        row["label"] = names[g.index[g["choice"] == 1.0][0]]
        rows.append(row)
    return pd.DataFrame(rows)


def grunfeld():
    d = sm.datasets.grunfeld.load_pandas().data
    df = d[["invest", "value", "capital", "year"]].copy()
    df["label"] = d["firm"].str.lower().str.replace(" ", "_").str.replace(".", "", regex=False)
    return df


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    for name, fn in [("iris", iris), ("anes96", anes96), ("modechoice", modechoice), ("grunfeld", grunfeld)]:
        df = fn()
        df.to_csv(os.path.join(OUT, f"public_{name}.csv"), index=False)
        print(name, df.shape, df["label"].value_counts().min())
