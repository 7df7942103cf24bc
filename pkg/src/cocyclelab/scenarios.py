"""Scenario registry: each entry wires a word source to a cocycle (or a
weighted-average spec), runs a declared analysis plan, and grades the
observed behavior against an expected qualitative tag.

Tags: converges | oscillates | minus-infinity | condition-fails. The
verdict is a pure function of the saved artifact document, so re-grading
a run's verdict.json reproduces the exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cocycles import (
    BernoulliMeasure,
    CocycleSpec,
    check_positivity_condition,
    geometric_checkpoints,
    lambda_estimate,
    lyapunov_trace,
)
from .errors import ConfigError
from .returns import return_formula_estimate, select_marker, periodic_exponent
from .spectrum import WeightedAverageSpec, spectrum_curve, spectrum_to_csv
from .words import (
    Alphabet,
    BernoulliSource,
    BlockScheduleSource,
    EpochSchedule,
    FiniteWord,
    PeriodicSource,
    SquarefreeSource,
    SubstitutionSource,
    decompose_returns,
    long_word_mass,
    prefix_doubling_program,
    run_alternation_program,
    triple_growth_program,
    paired_growth_program,
)

TAGS = ("converges", "oscillates", "minus-infinity", "condition-fails")

_POSITIVE_PAIR = {
    "0": [[2.0, 1.0], [1.0, 1.0]],
    "1": [[1.0, 1.0], [1.0, 2.0]],
}
# pair with distinct growth rates: per-step variance large enough that
# Monte-Carlo standard errors dominate the O(1/n) norm-constant bias
_VARIED_PAIR = {
    "0": [[2.0, 1.0], [1.0, 1.0]],
    "1": [[0.4, 0.4], [0.4, 0.8]],
}
_DIAG = [[10.0, 0.0], [0.0, 0.1]]
_SWAP = [[0.0, 1.0], [1.0, 0.0]]
_ONES = [[1.0, 1.0], [1.0, 1.0]]
_FIB = [[1.0, 1.0], [1.0, 0.0]]


@dataclass(frozen=True)
class Scenario:
    name: str
    citation: str
    expected: str
    analysis: str
    defaults: dict
    build: Callable[[dict], dict]
    run: Callable[[dict], "ScenarioResult"]


@dataclass
class ScenarioResult:
    artifacts: dict
    files: dict = field(default_factory=dict)  # filename -> text content


def verdict_from_artifacts(doc: dict) -> str:
    """Grade a saved artifact document; pure and re-runnable."""
    vi = doc["verdict_inputs"]
    kind = vi["kind"]
    if kind == "trace":
        if vi.get("zero_index") is not None:
            return "minus-infinity"
        if vi["oscillation_gap"] > vi["oscillation_threshold"]:
            return "oscillates"
        if vi["relative_step"] < vi["convergence_threshold"]:
            return "converges"
        return "inconclusive"
    if kind == "long-mass":
        if min(vi["long_mass"]) > vi["mass_floor"]:
            return "condition-fails"
        return "inconclusive"
    if kind == "spectrum":
        if vi["max_error"] <= vi["tolerance"] and vi["dim_at_zero_error"] <= vi["zero_tolerance"]:
            return "converges"
        return "inconclusive"
    raise ConfigError(f"unknown verdict kind {kind!r}")


def _trace_verdict_inputs(trace, config) -> dict:
    cps = trace.checkpoints
    exps = trace.exponents
    horizon = int(cps[-1])
    late = cps >= horizon / config["late_divisor"]
    finite = np.isfinite(exps)
    window = exps[late & finite]
    gap = float(window.max() - window.min()) if len(window) >= 2 else 0.0
    if len(cps) >= 2 and np.isfinite(exps[-1]) and np.isfinite(exps[-2]):
        rel = float(abs(exps[-1] - exps[-2]) / max(1e-12, abs(exps[-1])))
    else:
        rel = float("inf") if trace.zero_index is None else 0.0
    return {
        "kind": "trace",
        "zero_index": trace.zero_index,
        "oscillation_gap": gap,
        "oscillation_threshold": config["oscillation_threshold"],
        "relative_step": rel,
        "convergence_threshold": config["convergence_threshold"],
    }


_TRACE_DEFAULTS = {
    "oscillation_threshold": 1.0,
    "convergence_threshold": 1e-3,
    "late_divisor": 16,
}


def _run_trace_scenario(build, config, extra: Callable[[dict, dict], None] | None = None):
    parts = build(config)
    spec, source = parts["cocycle"], parts["source"]
    cps = geometric_checkpoints(8, int(config["horizon"]))
    trace = lyapunov_trace(spec, source, cps)
    artifacts = {
        "quantities": {
            "exponent_estimate": trace.slope_estimate(),
            "final_exponent": float(trace.exponents[-1]),
            "zero_index": trace.zero_index,
        },
        "verdict_inputs": _trace_verdict_inputs(trace, config),
    }
    files = {"trace.csv": trace.to_csv()}
    if extra is not None:
        extra(parts, artifacts)
    return ScenarioResult(artifacts, files)


# --- builders ---------------------------------------------------------------


def _build_fibonacci(config):
    alphabet = Alphabet(1)
    return {
        "source": PeriodicSource("0", alphabet),
        "cocycle": CocycleSpec(alphabet, 1, {"0": _FIB}),
    }


def _build_thue_morse(config):
    alphabet = Alphabet(2)
    return {
        "source": SubstitutionSource({0: "01", 1: "10"}, 0, alphabet),
        "cocycle": CocycleSpec(alphabet, 1, _POSITIVE_PAIR),
    }


def _build_squarefree(config):
    return {
        "source": SquarefreeSource(capacity=int(config["capacity"])),
        "cocycle": CocycleSpec(Alphabet(2), 1, _POSITIVE_PAIR),
    }


def _build_bernoulli_positive(config):
    return {
        "source": BernoulliSource([0.5, 0.5], seed=int(config["seed"])),
        "cocycle": CocycleSpec(Alphabet(2), 1, _VARIED_PAIR),
    }


def _nolimit_cocycle():
    return CocycleSpec(
        Alphabet(4), 1, {"0": _DIAG, "1": _DIAG, "2": _SWAP, "3": _ONES}
    )


def _build_nolimit(config):
    base = BernoulliSource([0.5, 0.5], seed=int(config["seed"]))
    schedule = EpochSchedule(kind=config["schedule"], base=int(config["schedule_base"]))
    program = prefix_doubling_program(base, schedule, head=(3,), type2_suffix=2, alphabet_size=4)
    return {"source": BlockScheduleSource(program), "cocycle": _nolimit_cocycle()}


def _build_nonergodic(config):
    schedule = EpochSchedule(kind=config["schedule"], base=int(config["schedule_base"]))
    program = triple_growth_program(schedule, alphabet_size=4, swap_symbol=3)
    spec = CocycleSpec(
        Alphabet(4), 1, {"0": _DIAG, "1": _DIAG, "2": _ONES, "3": _SWAP}
    )
    return {"source": BlockScheduleSource(program), "cocycle": spec}


def _fx_cocycle(depth: int) -> CocycleSpec:
    # Window with its first 1 at position j carries the rank-one matrix
    # exp(-2^j) * ones; the all-zero window takes the cylinder supremum
    # exp(-2^depth). Depth is capped so exp stays in float range.
    if depth > 9:
        raise ConfigError("depth > 9 underflows exp(-2^depth) in float64")
    table = {}
    for idx in range(2**depth):
        bits = [(idx >> (depth - 1 - t)) & 1 for t in range(depth)]
        j = bits.index(1) if 1 in bits else depth
        f = math.exp(-(2.0**j))
        table[tuple(bits)] = [[f, f], [f, f]]
    return CocycleSpec(Alphabet(2), depth, table)


def _build_fx(config):
    preset = config["preset"]
    if preset == "deep":
        pair = lambda i: int(config["pair_base"]) ** i
        run = lambda i: int(config["run_slope"]) * i + int(config["run_offset"])
        desc = {
            "preset": "run_alternation",
            "pair_base": int(config["pair_base"]),
            "run_slope": int(config["run_slope"]),
            "run_offset": int(config["run_offset"]),
        }
    elif preset == "shallow":
        pair = lambda i: 4**i
        run = lambda i: max(1, math.ceil(math.log2(4**i)))
        desc = None
    elif preset == "tower":
        pair = lambda i: 2 ** (2 ** (2**i))
        run = lambda i: 2 ** (2**i)
        desc = None
    else:
        raise ConfigError(f"unknown fx preset {preset!r}")
    program = run_alternation_program(pair, run, description=desc)
    return {
        "source": BlockScheduleSource(program),
        "cocycle": _fx_cocycle(int(config["depth"])),
    }


def _build_gap(config):
    x = BernoulliSource([0.5, 0.5], seed=int(config["seed_x"]))
    y = BernoulliSource([0.5, 0.5], seed=int(config["seed_y"]))
    program = paired_growth_program(x, y, offset=2, alphabet_size=4)
    return {"source": BlockScheduleSource(program), "marker_base": x}


def _build_besicovitch(config):
    alphabet = Alphabet(1)
    return {
        "weighted": WeightedAverageSpec(
            np.array([[0.0, 0.0], [1.0, 1.0]]),
            np.array([1.0]),
            PeriodicSource("0", alphabet),
        )
    }


def _build_nilpotent(config):
    alphabet = Alphabet(1)
    return {
        "source": PeriodicSource("0", alphabet),
        "cocycle": CocycleSpec(alphabet, 1, {"0": [[0.0, 1.0], [0.0, 0.0]]}),
    }


# --- runners ----------------------------------------------------------------


def _run_fibonacci(config):
    def extra(parts, artifacts):
        exact = periodic_exponent(parts["cocycle"], FiniteWord("0", Alphabet(1)))
        q = artifacts["quantities"]
        q["periodic_exact"] = exact
        q["golden_log"] = math.log((1 + math.sqrt(5)) / 2)

    return _run_trace_scenario(_build_fibonacci, config, extra)


def _run_thue_morse(config):
    def extra(parts, artifacts):
        spec, source = parts["cocycle"], parts["source"]
        n = int(config["horizon"])
        prefix = source.prefix(n + spec.depth - 1)
        sel = select_marker(spec, prefix, k0=int(config["k0"]), max_ell=4)
        est = return_formula_estimate(spec, prefix, sel, cutoff=int(config["cutoff"]))
        q = artifacts["quantities"]
        q["return_estimate"] = est.estimate
        q["correction_band"] = est.correction_band
        q["long_mass"] = est.long_mass
        q["cross_check_gap"] = abs(est.estimate - artifacts["quantities"]["final_exponent"])
        artifacts.setdefault("returns", {})["estimate_json"] = est.to_json()

    result = _run_trace_scenario(_build_thue_morse, config, extra)
    returns_doc = result.artifacts.pop("returns", None)
    if returns_doc:
        result.files["returns.json"] = returns_doc["estimate_json"]
    return result


def _run_bernoulli_positive(config):
    def extra(parts, artifacts):
        spec = parts["cocycle"]
        est = lambda_estimate(
            spec,
            BernoulliMeasure([0.5, 0.5]),
            n=int(config["lambda_n"]),
            replicas=int(config["replicas"]),
            seed=int(config["seed"]) + 1,
        )
        q = artifacts["quantities"]
        q["lambda_mean"] = est.mean
        q["lambda_stderr"] = est.stderr
        q["orbit_vs_lambda_gap"] = abs(q["exponent_estimate"] - est.mean)

    return _run_trace_scenario(_build_bernoulli_positive, config, extra)


def _run_nolimit(config):
    def extra(parts, artifacts):
        # The head word occurs once and is transient, so scan the observed
        # windows from position 1 when judging the positivity condition.
        spec, source = parts["cocycle"], parts["source"]
        sample = source.prefix(min(int(config["horizon"]), 100_000))
        hit = check_positivity_condition(spec, sample, max_ell=int(config["max_ell"]), start=1)
        artifacts["quantities"]["positivity_witness"] = (
            None if hit is None else {"u": hit.u.to_text(), "ell0": hit.ell0, "b": hit.b}
        )

    return _run_trace_scenario(_build_nolimit, config, extra)


def _run_gap(config):
    parts = _build_gap(config)
    source = parts["source"]
    marker = parts["marker_base"].prefix(int(config["marker_length"]))
    masses = []
    for n in config["horizons"]:
        decomp = decompose_returns(source.prefix(int(n)), marker)
        masses.append(long_word_mass(decomp, int(config["cutoff"])))
    artifacts = {
        "quantities": {
            "marker": marker.to_text(),
            "cutoff": int(config["cutoff"]),
            "horizons": [int(n) for n in config["horizons"]],
            "long_mass": masses,
        },
        "verdict_inputs": {
            "kind": "long-mass",
            "long_mass": masses,
            "mass_floor": config["mass_floor"],
        },
    }
    return ScenarioResult(artifacts)


def _run_besicovitch(config):
    parts = _build_besicovitch(config)
    wspec = parts["weighted"]
    betas = np.linspace(config["beta_min"], config["beta_max"], int(config["beta_count"]))
    points = spectrum_curve(wspec, betas, horizon=int(config["horizon"]))
    errs = []
    dim0 = None
    for pt in points:
        alpha = min(max(pt.alpha, 1e-300), 1 - 1e-300)
        entropy = -(alpha * math.log(alpha) + (1 - alpha) * math.log(1 - alpha)) / math.log(2)
        errs.append(abs(pt.dim - entropy))
        if abs(pt.beta) < 1e-12:
            dim0 = pt.dim
    artifacts = {
        "quantities": {
            "max_error_vs_entropy": max(errs),
            "dim_at_beta_zero": dim0,
        },
        "verdict_inputs": {
            "kind": "spectrum",
            "max_error": max(errs),
            "tolerance": config["tolerance"],
            "dim_at_zero_error": abs((dim0 if dim0 is not None else 0.0) - 1.0),
            "zero_tolerance": config["zero_tolerance"],
        },
    }
    return ScenarioResult(artifacts, {"spectrum.csv": spectrum_to_csv(points)})


def _simple_trace_runner(build):
    return lambda config: _run_trace_scenario(build, config)


REGISTRY: dict[str, Scenario] = {}


def _register(s: Scenario) -> None:
    if s.name in REGISTRY:
        raise ConfigError(f"duplicate scenario {s.name}")
    if s.expected not in TAGS:
        raise ConfigError(f"bad expected tag {s.expected}")
    REGISTRY[s.name] = s


_register(Scenario(
    name="fibonacci-periodic",
    citation="Fibonacci matrix on a fixed letter: exponent is log of the golden ratio",
    expected="converges",
    analysis="trace",
    defaults={**_TRACE_DEFAULTS, "horizon": 10_000},
    build=_build_fibonacci,
    run=_run_fibonacci,
))

_register(Scenario(
    name="thue-morse-positive",
    citation="Thue-Morse substitution stream with a strictly positive pair; trace vs return-word estimate",
    expected="converges",
    analysis="trace+returns",
    defaults={**_TRACE_DEFAULTS, "horizon": 200_000, "k0": 8, "cutoff": 64},
    build=_build_thue_morse,
    run=_run_thue_morse,
))

_register(Scenario(
    name="squarefree-positive",
    citation="Squarefree indicator (Moebius-square) stream with a strictly positive pair",
    expected="converges",
    analysis="trace",
    defaults={**_TRACE_DEFAULTS, "horizon": 200_000, "capacity": 1 << 21},
    build=_build_squarefree,
    run=_simple_trace_runner(_build_squarefree),
))

_register(Scenario(
    name="bernoulli-positive",
    citation="Fair-coin stream with a strictly positive pair; single orbit against the sampled mean",
    expected="converges",
    analysis="trace+lambda",
    # checkpoint-to-checkpoint steps of a coin-driven orbit carry CLT noise
    # of a few 1e-4 at these horizons; the verdict threshold is set above it
    defaults={**_TRACE_DEFAULTS, "convergence_threshold": 5e-3,
              "horizon": 400_000, "seed": 7,
              "lambda_n": 10_000, "replicas": 100},
    build=_build_bernoulli_positive,
    run=_run_bernoulli_positive,
))

_register(Scenario(
    name="nolimit",
    citation="Walters-style doubled-prefix blocks over diagonal/antidiagonal matrices, tower epochs",
    expected="oscillates",
    analysis="trace+check",
    defaults={**_TRACE_DEFAULTS, "horizon": 1_200, "seed": 3,
              "schedule": "tower", "schedule_base": 4, "max_ell": 6},
    build=_build_nolimit,
    run=_run_nolimit,
))

_register(Scenario(
    name="nolimit-geometric",
    citation="Walters-style doubled-prefix blocks, geometric epochs sized for desk horizons",
    expected="oscillates",
    analysis="trace+check",
    defaults={**_TRACE_DEFAULTS, "horizon": 400_000, "seed": 3,
              "schedule": "geometric", "schedule_base": 4, "max_ell": 6},
    build=_build_nolimit,
    run=_run_nolimit,
))

_register(Scenario(
    name="fx-depth-k",
    citation="Rank-one family with entries vanishing near the all-zero word, truncated at finite depth",
    expected="oscillates",
    analysis="trace",
    defaults={**_TRACE_DEFAULTS, "horizon": 16_500, "depth": 9, "preset": "deep",
              "pair_base": 2, "run_slope": 1, "run_offset": 5},
    build=_build_fx,
    run=_simple_trace_runner(_build_fx),
))

_register(Scenario(
    name="gap-blocks",
    citation="Interleaved prefixes of two independent streams: long return words keep positive mass",
    expected="condition-fails",
    analysis="returns",
    defaults={"horizons": [100_000, 1_000_000], "cutoff": 32, "marker_length": 2,
              "seed_x": 11, "seed_y": 12, "mass_floor": 0.2},
    build=_build_gap,
    run=_run_gap,
))

_register(Scenario(
    name="nonergodic-4",
    citation="Two diagonal letters with a swap letter under a non-ergodic three-run schedule",
    expected="oscillates",
    analysis="trace",
    defaults={**_TRACE_DEFAULTS, "horizon": 600_000, "schedule": "geometric",
              "schedule_base": 4},
    build=_build_nonergodic,
    run=_simple_trace_runner(_build_nonergodic),
))

_register(Scenario(
    name="besicovitch",
    citation="Besicovitch-Eggleston digit frequencies: spectrum against the binary entropy curve",
    expected="converges",
    analysis="spectrum",
    defaults={"beta_min": -5.0, "beta_max": 5.0, "beta_count": 21, "horizon": 1_000,
              "tolerance": 1e-3, "zero_tolerance": 1e-9},
    build=_build_besicovitch,
    run=_run_besicovitch,
))

_register(Scenario(
    name="nilpotent-halt",
    citation="A nilpotent letter: the product is structurally zero from step two on",
    expected="minus-infinity",
    analysis="trace",
    defaults={**_TRACE_DEFAULTS, "horizon": 64},
    build=_build_nilpotent,
    run=_simple_trace_runner(_build_nilpotent),
))


def resolve_config(name: str, overrides: dict | None = None) -> tuple[Scenario, dict]:
    if name not in REGISTRY:
        raise ConfigError(f"unknown scenario {name!r}; see `list`")
    scenario = REGISTRY[name]
    config = dict(scenario.defaults)
    for key, value in (overrides or {}).items():
        if key not in config:
            raise ConfigError(f"unknown override {key!r} for scenario {name}")
        config[key] = value
    return scenario, config


def run_scenario(name: str, overrides: dict | None = None) -> tuple[dict, dict, bool]:
    """Execute a registry entry; returns (artifact doc, files, passed)."""
    scenario, config = resolve_config(name, overrides)
    result = scenario.run(config)
    observed = verdict_from_artifacts(result.artifacts)
    doc = {
        "scenario": name,
        "config": config,
        "expected": scenario.expected,
        "observed": observed,
        "pass": observed == scenario.expected,
        **result.artifacts,
    }
    return doc, result.files, doc["pass"]


def registry_table() -> list[dict]:
    return [
        {
            "name": s.name,
            "citation": s.citation,
            "expected": s.expected,
            "analysis": s.analysis,
        }
        for s in REGISTRY.values()
    ]


LIST_JSON_SCHEMA = {
    "type": "object",
    "required": ["scenarios"],
    "properties": {
        "scenarios": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "citation", "expected", "analysis"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "citation": {"type": "string", "minLength": 1},
                    "expected": {"enum": list(TAGS)},
                    "analysis": {"type": "string"},
                },
            },
        }
    },
}
