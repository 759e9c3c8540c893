"""SVG figures for experiment tables (presentational only)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import ExperimentResult  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (5.0, 3.2),
    "svg.fonttype": "none",
}


def _save(fig, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, f"{name}.svg")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_ranges(res: ExperimentResult, out_dir: str) -> str:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        presets = sorted({r["preset"] for r in res.rows})
        for k, pr in enumerate(presets):
            rows = [r for r in res.rows if r["preset"] == pr]
            for agree, mk in ((True, "o"), (False, "x")):
                sel = [r for r in rows if r["agree"] == agree]
                if not sel:
                    continue
                ys = [k + 0.25 * (r["numeric"] == "bounded") - 0.125 for r in sel]
                ax.scatter([r["beta"] for r in sel], ys, marker=mk, s=12, label=f"{pr} ({'agree' if agree else 'disagree'})")
        ax.set_yticks(range(len(presets)), presets)
        ax.set_xlabel("beta")
        ax.set_title("numeric verdicts (upper: bounded, lower: unbounded)")
        ax.legend(loc="best")
        return _save(fig, out_dir, res.name)


def plot_counterexample(res: ExperimentResult, out_dir: str) -> str:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        keys = sorted({(r["lambda"], r["p"]) for r in res.rows})
        for lam, p in keys:
            rows = [r for r in res.rows if (r["lambda"], r["p"]) == (lam, p)]
            ax.plot([r["k"] for r in rows], [r["window_value"] for r in rows], "o-", ms=3, label=f"lambda={lam}, p={p}")
        ax.set_xlabel("k  (|x| = 2^-k)")
        ax.set_ylabel("window norm of S(chi_B)")
        ax.legend(loc="best")
        return _save(fig, out_dir, res.name)


def plot_norms(res: ExperimentResult, out_dir: str) -> str:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        rows = [r for r in res.rows if "ratio" in r]
        labels = [f"{r['operator']}/{r['scope'][0]} p={r['p']} b={r['beta']:.2g}" for r in rows]
        ax.bar(range(len(rows)), [r["ratio"] for r in rows])
        if rows:
            ax.axhline(rows[0]["band_lo"], color="k", lw=0.6, ls="--")
            ax.axhline(rows[0]["band_hi"], color="k", lw=0.6, ls="--")
        ax.set_yscale("log")
        ax.set_xticks(range(len(rows)), labels, rotation=90, fontsize=5)
        ax.set_ylabel("operator norm / condition constant")
        return _save(fig, out_dir, res.name)


def plot_decomposition(res: ExperimentResult, out_dir: str) -> str:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        x = range(len(res.rows))
        ax.vlines(x, [r["maxdec_min"] for r in res.rows], [r["maxdec_max"] for r in res.rows], label="M / (M0 + Mloc)")
        ax.vlines([i + 0.3 for i in x], [r["equivm_min"] for r in res.rows], [r["equivm_max"] for r in res.rows], color="C1", label="local + far / M")
        ax.set_xlabel("input")
        ax.set_ylabel("pointwise ratio")
        ax.legend(loc="best")
        return _save(fig, out_dir, res.name)


def plot_necessity(res: ExperimentResult, out_dir: str) -> str:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for lam in sorted({r["lambda"] for r in res.rows}):
            rows = [r for r in res.rows if r["lambda"] == lam]
            ax.semilogy([r["beta"] for r in rows], [r["rd_constant"] for r in rows], "o-", ms=3, label=f"RD, lambda={lam}")
        ax.set_xlabel("beta")
        ax.set_ylabel("sampled RD constant")
        ax.legend(loc="best")
        return _save(fig, out_dir, res.name)


PLOTTERS = {
    "ranges": plot_ranges,
    "counterexample": plot_counterexample,
    "norms": plot_norms,
    "decomposition": plot_decomposition,
    "necessity": plot_necessity,
}


def plot_result(res: ExperimentResult, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return PLOTTERS[res.name](res, out_dir)
