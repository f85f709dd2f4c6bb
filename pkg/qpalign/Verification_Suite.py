"""
Verification Suite
==================
Seeded acceptance checks that run the simulated pipeline against its
classical models:

- classical_track:   every step-basis branch of the profit circuit carries
                     the mirrored counters, profit and validity
- char_modes:        reuse and per-step character registers agree
- arithmetic:        constant adders, incrementers and the comparator are exact
- backend_equivalence: dense and sparse amplitudes agree
- grover_closed_form: marked probability follows sin^2((2r+1) theta)
- measurement_law:   sampled frequencies pass a chi-square test
- oracle_phase_purity: the phase oracle is a +-1 diagonal on step branches
- quantum_success:   the Grover driver finds the DP optimum, soundly, in budget
"""

import logging
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.stats import chisquare

from .Alignment_Core import (
    DEFAULT_PROFIT,
    ProfitParams,
    TransitionString,
    max_profit_bound,
    path_profit,
)
from .Circuit_Builder import (
    AdderKind,
    CharMode,
    CircuitSpec,
    ProfitPlan,
    build_add_const,
    build_comparator_gt,
    build_incrementer,
    build_profit_accumulation,
    build_qft,
    build_qram_loader,
    hadamard_layer,
    run_circuit,
    trace_registers,
)
from .Classical_Oracles import dp_max
from .Grover_Search import (
    SearchConfig,
    build_marking_oracle,
    build_phase_oracle,
    diffusion,
    find_max,
    grover_iterate,
    marked_probability,
)
from .QSim_Engine import Gate, RegisterLayout, make_rng, new_state, sample_counts
from .utils import InstanceTooLargeError, SequenceValidationError


logger = logging.getLogger(__name__)

BASES = "ACGT"
AMPLITUDE_TOLERANCE = 1e-10
PROBABILITY_TOLERANCE = 1e-9
UNIFORMITY_TOLERANCE = 1e-12
CHI_SQUARE_ALPHA = 1e-3
SUCCESS_RATE = 0.9
MIN_SUCCESS_INSTANCES = 10


class CheckResult(BaseModel):
    """Outcome of one named check"""
    name: str
    passed: bool
    cases: int
    failures: int
    detail: str = ""


class VerificationReport(BaseModel):
    """All checks of one verify run"""
    seed: int
    max_len: int
    trials: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + '\n'


# ============================================================================
# Instance Generation
# ============================================================================

def random_sequence(rng: np.random.Generator, length: int) -> str:
    return ''.join(BASES[i] for i in rng.integers(0, 4, size=length))


def random_pairs(rng: np.random.Generator, count: int, max_len: int,
                 min_len: int = 0) -> List[Tuple[str, str]]:
    pairs = []
    for _ in range(count):
        m, n = (int(v) for v in rng.integers(min_len, max_len + 1, size=2))
        pairs.append((random_sequence(rng, m), random_sequence(rng, n)))
    return pairs


def all_single_base_pairs() -> List[Tuple[str, str]]:
    return [(a, b) for a in BASES for b in BASES]


# ============================================================================
# Checks
# ============================================================================

def _result(name: str, cases: int, failures: List[str]) -> CheckResult:
    detail = "; ".join(failures[:3])
    if len(failures) > 3:
        detail += f"; ... {len(failures) - 3} more"
    return CheckResult(name=name, passed=not failures, cases=cases, failures=len(failures), detail=detail)


def check_classical_track(pairs: Sequence[Tuple[str, str]], model: ProfitParams = DEFAULT_PROFIT,
                          adder: AdderKind = AdderKind.DRAPER) -> CheckResult:
    """Every branch's registers equal the classical mirror; amplitudes stay uniform"""
    failures: List[str] = []
    cases = 0
    for s1, s2 in pairs:
        plan = ProfitPlan.create(s1, s2, adder=adder)
        mirror = replace(plan, p=model)
        layout = plan.layout
        state = run_circuit(build_profit_accumulation(plan))
        amplitudes = state.amplitudes()
        uniform = 4.0 ** -plan.t
        seen = set()
        clean = ("borrow", "char_h", "char_v", "flag")
        for basis, amp in amplitudes.items():
            cases += 1
            step = layout.value_of(basis, "step")
            seen.add(step)
            expected = trace_registers(mirror, step)
            got = (layout.value_of(basis, "counter_h"), layout.value_of(basis, "counter_v"),
                   layout.value_of(basis, "profit"), bool(layout.value_of(basis, "valid")))
            want = (expected.counter_h, expected.counter_v, expected.profit, expected.valid)
            if got != want:
                failures.append(f"({s1},{s2}) step {step}: circuit {got} != model {want}")
                continue
            if any(layout.value_of(basis, name) for name in clean):
                failures.append(f"({s1},{s2}) step {step}: work registers not restored")
            if expected.valid:
                walk = TransitionString.from_index(step, plan.t)
                profit, valid = path_profit(walk, s1, s2, model)
                if not valid or profit != got[2]:
                    failures.append(f"({s1},{s2}) {walk}: circuit profit {got[2]} != path profit {profit}")
            if abs(abs(amp) ** 2 - uniform) > UNIFORMITY_TOLERANCE:
                failures.append(f"({s1},{s2}) step {step}: |amp|^2 {abs(amp) ** 2} != {uniform}")
        if len(seen) != 4 ** plan.t or len(amplitudes) != 4 ** plan.t:
            failures.append(f"({s1},{s2}): {len(amplitudes)} branches, expected {4 ** plan.t}")
    return _result("classical_track", cases, failures)


def _step_profile(plan: ProfitPlan) -> Dict[int, Tuple[int, bool, float]]:
    layout = plan.layout
    state = run_circuit(build_profit_accumulation(plan))
    profile = {}
    for basis, amp in state.amplitudes().items():
        profile[layout.value_of(basis, "step")] = (
            layout.value_of(basis, "profit"), bool(layout.value_of(basis, "valid")), abs(amp) ** 2)
    return profile


def check_char_modes(pairs: Sequence[Tuple[str, str]]) -> CheckResult:
    """Reuse and per-step character modes give the same (step, profit, valid) distribution"""
    failures = []
    for s1, s2 in pairs:
        reuse = _step_profile(ProfitPlan.create(s1, s2, char_mode=CharMode.REUSE))
        per_step = _step_profile(ProfitPlan.create(s1, s2, char_mode=CharMode.PER_STEP))
        if reuse.keys() != per_step.keys():
            failures.append(f"({s1},{s2}): branch sets differ")
            continue
        for step, (profit, valid, prob) in reuse.items():
            other = per_step[step]
            if (profit, valid) != other[:2] or abs(prob - other[2]) > UNIFORMITY_TOLERANCE:
                failures.append(f"({s1},{s2}) step {step}: {(profit, valid)} vs {other[:2]}")
    return _result("char_modes", len(pairs), failures)


def check_arithmetic(max_width: int = 5) -> CheckResult:
    """Exhaustive constant addition, increment and strict comparison"""
    failures = []
    cases = 0
    for adder in AdderKind:
        for width in range(1, max_width + 1):
            modulus = 1 << width
            for c in range(modulus):
                spec = build_add_const(width, c, adder=adder)
                for a in range(modulus):
                    cases += 1
                    out = run_circuit(spec, basis=a).amplitudes()
                    target = (a + c) % modulus
                    if len(out) != 1 or abs(out.get(target, 0) - 1) > AMPLITUDE_TOLERANCE:
                        failures.append(f"{adder.value} w={width}: {a}+{c} -> {sorted(out)}")
            inc = build_incrementer(width, adder=adder)
            ctrl = 1 << width
            for a in range(modulus):
                for control in (0, 1):
                    cases += 1
                    basis = a | (ctrl if control else 0)
                    want = ((a + control) % modulus) | (ctrl if control else 0)
                    out = run_circuit(inc, basis=basis).amplitudes()
                    if abs(out.get(want, 0) - 1) > AMPLITUDE_TOLERANCE:
                        failures.append(f"{adder.value} inc w={width}: {a} ctrl={control}")

    width = 4
    for v in range(-1, 1 << width):
        spec = build_comparator_gt(width, v)
        flag_bit = spec.layout.qubits("flag")[0]
        for value in range(1 << width):
            cases += 1
            out = run_circuit(spec, basis=value).amplitudes()
            want = value | ((1 << flag_bit) if value > v else 0)
            if abs(out.get(want, 0) - 1) > AMPLITUDE_TOLERANCE:
                failures.append(f"comparator: {value} > {v} gave {sorted(out)}")
    return _result("arithmetic", cases, failures)


def circuit_corpus(small_pairs: Sequence[Tuple[str, str]]) -> List[Tuple[str, CircuitSpec, Callable]]:
    """(name, circuit, state preparation) triples small enough for the dense backend"""
    corpus: List[Tuple[str, CircuitSpec, Callable]] = []
    for width in (1, 2, 3, 4):
        corpus.append((f"qft{width}", build_qft(width), None))
    corpus.append(("add_const(4,5)", build_add_const(4, 5, controls=1), None))
    corpus.append(("incrementer(3)", build_incrementer(3), None))
    loader = build_qram_loader("ACGT")
    corpus.append(("qram(ACGT)", loader, lambda s: s.apply_gates(
        hadamard_layer_for(loader.layout, "addr"))))
    for s1, s2 in small_pairs:
        plan = ProfitPlan.create(s1, s2)
        corpus.append((f"profit({s1},{s2})", build_profit_accumulation(plan), None))
        oracle = build_phase_oracle(plan, max(max_profit_bound(plan.m, plan.n) - 2, -1))
        diffuser = diffusion(plan.layout)
        round_spec = CircuitSpec(plan.layout, hadamard_layer(plan).gates + oracle.gates + diffuser.gates)
        corpus.append((f"grover_round({s1},{s2})", round_spec, None))
    return corpus


def hadamard_layer_for(layout: RegisterLayout, register: str) -> List[Gate]:
    return [Gate.h(q) for q in layout.qubits(register)]


def check_backend_equivalence(small_pairs: Sequence[Tuple[str, str]]) -> CheckResult:
    failures = []
    corpus = circuit_corpus(small_pairs)
    for name, spec, prepare in corpus:
        states = []
        for backend in ("dense", "sparse"):
            state = new_state(spec.layout.total_qubits, backend, 1 if name.startswith("qft") else 0)
            if prepare is not None:
                prepare(state)
            states.append(run_circuit(spec, state))
        diff = states[0].max_amplitude_difference(states[1])
        if diff > AMPLITUDE_TOLERANCE:
            failures.append(f"{name}: max amplitude difference {diff:.3g}")
    return _result("backend_equivalence", len(corpus), failures)


def check_grover_closed_form(rng: np.random.Generator, max_r: int = 3) -> CheckResult:
    failures = []
    cases = 0
    for t in (1, 2):
        layout = RegisterLayout.build([("step", 2 * t)])
        size = 4 ** t
        ks = sorted({1, 2, size // 4, size // 2, size - 1} - {0})
        for k in ks:
            marked = set(int(v) for v in rng.choice(size, size=k, replace=False))
            oracle = build_marking_oracle(layout, "step", marked)
            for r in range(max_r + 1):
                cases += 1
                state = new_state(layout.total_qubits, "sparse")
                state.apply_gates(hadamard_layer_for(layout, "step"))
                grover_iterate(state, oracle, r)
                dist = state.register_distribution(layout.qubits("step"))
                got = float(sum(dist[v] for v in marked))
                want = marked_probability(k, size, r)
                if abs(got - want) > PROBABILITY_TOLERANCE:
                    failures.append(f"k={k} N={size} r={r}: {got:.12f} != {want:.12f}")
    return _result("grover_closed_form", cases, failures)


def check_measurement_law(rng: np.random.Generator, shots: int = 4096) -> CheckResult:
    """Chi-square goodness of fit of seeded samples against squared magnitudes"""
    failures = []
    layout = RegisterLayout.build([("step", 4)])
    prepared = []
    uniform = new_state(2, "sparse").apply_gates(hadamard_layer_for(RegisterLayout.build([("q", 2)]), "q"))
    prepared.append(("uniform2", uniform, (0, 1)))
    skewed = new_state(4, "sparse").apply_gates(hadamard_layer_for(layout, "step"))
    grover_iterate(skewed, build_marking_oracle(layout, "step", {3, 9}), 1)
    prepared.append(("grover16", skewed, layout.qubits("step")))

    for name, state, qubits in prepared:
        probs = state.register_distribution(qubits)
        counts = sample_counts(state, qubits, shots, rng)
        observed = np.array([counts.get(i, 0) for i in range(len(probs))], dtype=float)
        support = probs > 1e-15
        if observed[~support].sum() > 0:
            failures.append(f"{name}: sampled a zero-probability outcome")
            continue
        expected = probs[support] / probs[support].sum() * shots
        _, p_value = chisquare(observed[support], expected)
        if p_value < CHI_SQUARE_ALPHA:
            failures.append(f"{name}: chi-square p={p_value:.2g}")
    return _result("measurement_law", len(prepared), failures)


def check_oracle_phase_purity(pairs: Sequence[Tuple[str, str]],
                              model: ProfitParams = DEFAULT_PROFIT) -> CheckResult:
    """Oracle flips exactly the valid branches above threshold and touches nothing else"""
    failures = []
    cases = 0
    for s1, s2 in pairs:
        plan = ProfitPlan.create(s1, s2)
        accumulation = build_profit_accumulation(plan, hadamards=False)
        before = run_circuit(hadamard_layer(plan)).amplitudes()
        step_mask = (1 << (2 * plan.t)) - 1
        for v in range(-1, max_profit_bound(plan.m, plan.n) + 1):
            cases += 1
            oracle = build_phase_oracle(plan, v, accumulation)
            after = run_circuit(oracle, run_circuit(hadamard_layer(plan))).amplitudes()
            if after.keys() != before.keys() or any(k & ~step_mask for k in after):
                failures.append(f"({s1},{s2}) v={v}: support changed")
                continue
            for basis, amp in before.items():
                walk = TransitionString.from_index(basis, plan.t)
                profit, valid = path_profit(walk, s1, s2, model)
                sign = -1 if valid and profit > v else 1
                if abs(after[basis] - sign * amp) > UNIFORMITY_TOLERANCE:
                    failures.append(f"({s1},{s2}) v={v} {walk}: phase {after[basis] / amp:.3g}, expected {sign}")
                    break
    return _result("oracle_phase_purity", cases, failures)


def check_quantum_success(rng: np.random.Generator, runs: int, max_len: int,
                          config: SearchConfig) -> CheckResult:
    """Seeded find_max runs against dp_max: success rate, soundness and budget"""
    instances = random_pairs(rng, MIN_SUCCESS_INSTANCES, max_len, min_len=1)
    unsound = []
    hits = 0
    for i in range(runs):
        s1, s2 = instances[i % len(instances)]
        seed = int(rng.integers(0, 2 ** 63))
        run_config = SearchConfig(budget_c=config.budget_c, growth=config.growth, seed=seed,
                                  p=config.p, char_mode=config.char_mode, adder=config.adder,
                                  backend=config.backend, max_qubits=config.max_qubits)
        result, trace = find_max(s1, s2, run_config)
        best, _ = dp_max(s1, s2, config.p)
        profit, valid = path_profit(result.path, s1, s2, config.p)
        if not valid or profit != result.profit or result.profit > best:
            unsound.append(f"({s1},{s2}) seed {seed}: unsound result {result.path} profit {result.profit}")
        if trace.total_iterations > result.budget_limit:
            unsound.append(f"({s1},{s2}) seed {seed}: {trace.total_iterations} iterations over budget")
        thresholds = trace.accepted_thresholds()
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            unsound.append(f"({s1},{s2}) seed {seed}: thresholds not increasing")
        hits += result.profit == best
    rate = hits / runs if runs else 1.0
    failures = list(unsound)
    if rate < SUCCESS_RATE:
        failures.append(f"success rate {rate:.2%} below {SUCCESS_RATE:.0%}")
    outcome = _result("quantum_success", runs, failures)
    outcome.detail = (outcome.detail + "; " if outcome.detail else "") + f"success rate {rate:.2%}"
    return outcome


# ============================================================================
# Suite
# ============================================================================

def run_verification(max_len: int = 2, trials: int = 50, seed: int = 1,
                     config: SearchConfig = SearchConfig(),
                     tamper_profit: Optional[ProfitParams] = None) -> VerificationReport:
    """Run every check; `tamper_profit` swaps the classical model's profits.

    Raises:
        SequenceValidationError: max_len below 1 or negative trials
        InstanceTooLargeError: the largest instance exceeds config.max_qubits
    """
    if max_len < 1:
        raise SequenceValidationError(f"max-len must be at least 1, got {max_len}")
    if trials < 0:
        raise SequenceValidationError(f"trials must be non-negative, got {trials}")
    widest = ProfitPlan.create("A" * max_len, "A" * max_len, p=config.p, char_mode=config.char_mode)
    if widest.layout.total_qubits > config.max_qubits:
        raise InstanceTooLargeError(
            f"instance too large for full quantum verification: max-len {max_len} needs "
            f"{widest.layout.total_qubits} qubits, limit {config.max_qubits}")

    rng = make_rng(seed)
    model = tamper_profit or config.p
    pairs = all_single_base_pairs() + random_pairs(rng, trials, max_len)
    small = [("A", "A"), ("A", "C"), ("", "G")]
    checks = []

    def run(check: Callable[[], CheckResult]):
        result = check()
        logger.info("%s %s (%d cases)", "[OK]" if result.passed else "[X]", result.name, result.cases)
        checks.append(result)

    run(lambda: check_classical_track(pairs, model, config.adder))
    run(lambda: check_char_modes(pairs[:16] + pairs[16:16 + min(trials, 8)]))
    run(lambda: check_arithmetic())
    run(lambda: check_backend_equivalence(small))
    run(lambda: check_grover_closed_form(rng))
    run(lambda: check_measurement_law(rng))
    run(lambda: check_oracle_phase_purity(all_single_base_pairs()[:4] + pairs[16:20], model))
    run(lambda: check_quantum_success(rng, trials, max_len, config))
    return VerificationReport(seed=seed, max_len=max_len, trials=trials, checks=checks)
