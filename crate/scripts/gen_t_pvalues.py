"""Freeze two-sided Student-t tail probabilities at 50 digits with mpmath.

Output rows: t<TAB>df<TAB>p, where p = P(|T| >= |t|).
"""
import mpmath as mp

mp.mp.dps = 50


def two_sided(t, df):
    t = mp.mpf(t)
    df = mp.mpf(df)
    x = df / (df + t * t)
    return mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True)


T_VALUES = ["0", "0.1", "0.5", "1", "1.5", "1.96", "2", "2.5", "3", "4", "5", "7.5", "10", "-2.2", "-0.7", "25"]
DF_VALUES = ["1", "2", "3", "5", "8", "10", "17", "30", "98", "500", "1998"]

print("# t\tdf\tp_two_sided")
for df in DF_VALUES:
    for t in T_VALUES:
        print(f"{t}\t{df}\t{mp.nstr(two_sided(t, df), 30)}")
