"""Regenerates stat_reference.json with statsmodels.

    python tests/reference/make_reference.py > tests/reference/stat_reference.json
"""
import json
import math
import sys
import warnings

import numpy as np
import statsmodels
from statsmodels.stats.diagnostic import acorr_ljungbox
from statsmodels.tsa.stattools import adfuller, kpss


def fixture(rng, kind, n):
    e = rng.standard_normal(n)
    if kind == "white":
        return e
    if kind == "ar1":
        x = np.empty(n)
        x[0] = e[0]
        for t in range(1, n):
            x[t] = 0.6 * x[t - 1] + e[t]
        return x
    if kind == "walk":
        return np.cumsum(e)
    if kind == "trend":
        return 0.02 * np.arange(n) + e
    raise ValueError(kind)


def main():
    warnings.simplefilter("ignore")
    rng = np.random.default_rng(20240713)
    kinds = ["white", "ar1", "walk", "trend"]
    lengths = [60, 120, 250, 400, 600]
    out = []
    for i in range(20):
        kind = kinds[i % 4]
        n = lengths[i // 4]
        x = fixture(rng, kind, n)
        maxlag = math.floor(12 * (n / 100) ** 0.25)
        adf = adfuller(x, maxlag=maxlag, regression="c", autolag="AIC")
        nlags = math.floor(4 * (n / 100) ** 0.25)
        kp = kpss(x, regression="c", nlags=nlags)
        lb_lags = 10
        model_df = 2 if i % 2 else 0
        lb = acorr_ljungbox(x, lags=[lb_lags], model_df=model_df)
        out.append({
            "id": f"{kind}_{n}_{i}",
            "x": x.tolist(),
            "adf": {"statistic": adf[0], "p_value": adf[1], "lags": adf[2], "nobs": adf[3]},
            "kpss": {"statistic": kp[0], "p_value": kp[1], "lags": kp[2]},
            "ljung_box": {"lags": lb_lags, "model_df": model_df,
                          "statistic": float(lb["lb_stat"].iloc[0]), "p_value": float(lb["lb_pvalue"].iloc[0])},
        })
    json.dump({"generator": f"statsmodels {statsmodels.__version__}", "fixtures": out}, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
