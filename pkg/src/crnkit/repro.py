"""Executable reproduction checks.

Each check recomputes a published number or a stated property and compares
it with an oracle implemented independently of the code under test (a
closed form, brute-force enumeration, scipy's integrators, or finite
differences).  :func:`run_all` returns one :class:`CheckResult` per check;
``crnkit repro`` prints them as a table.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .detailed_balance import balanced_rates, check_detailed_balance, circuit_conditions, forest_conditions
from .deterministic import integrate, jacobian, rhs, stationary_points
from .errors import InfeasibleError
from .models import ROSS_RATES, load_builtin
from .network import Complex, ReactionStep, build_network, parse_network, reversible_pairs
from .robustness import ROBUST, INAPPLICABLE, acr_test
from .stochastic import ensemble, ssa_direct
from .stoichiometry import (atomic_matrix, cycles, cycles_exist, decompositions, elementary_reactions,
                            reactant_complexes, read_formula_file)
from .structure import conservation_laws, structure_report

# pinned output of the elementary-step generator on the 16 OPS species
OPS_STEP_COUNT = 178
OPS_PUBLISHED_COUNT = 89


@dataclass
class CheckResult:
    key: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] {self.key:>2}. {self.title} ({self.seconds:.2f} s): {self.detail}"


# -- oracles -------------------------------------------------------------------

def ross_closed_form(rates=ROSS_RATES) -> list[Fraction]:
    """Stationary point of ``0 -> X1 <-> ... <-> X8 -> 0`` from its closed form.

    With ``k0`` the inflow, ``k_l``/``k_-l`` the forward/backward
    coefficients of ``X_l <-> X_l+1`` and ``k8`` the outflow,
    ``c_i = k0 sum_{j=1}^{9-i} prod_{l=10-j}^{8} k_l prod_{l=i}^{8-j} k_-l / prod_{l=i}^{8} k_l``.
    """
    r = [Fraction(v).limit_denominator(10**12) for v in rates]
    k0 = r[0]
    kf = {l: r[2 * l - 1] for l in range(1, 8)}
    kf[8] = r[15]
    kb = {l: r[2 * l] for l in range(1, 8)}

    def prod(values):
        out = Fraction(1)
        for v in values:
            out *= v
        return out

    out = []
    for i in range(1, 9):
        total = sum(prod(kf[l] for l in range(10 - j, 9)) * prod(kb[l] for l in range(i, 9 - j))
                    for j in range(1, 10 - i))
        out.append(k0 * total / prod(kf[l] for l in range(i, 9)))
    return out


def _compositions(r: int, s: int):
    if r == 1:
        yield (s,)
        return
    for i in range(s + 1):
        for rest in _compositions(r - 1, s - i):
            yield (i,) + rest


def brute_force_solutions(gamma, w, bound: int = 6) -> list[tuple[int, ...]]:
    """Every nonzero ``x >= 0`` with ``sum(x) <= bound`` and ``gamma x = w``."""
    g = np.asarray(gamma)
    w = np.asarray(w)
    out = []
    for s in range(1, bound + 1):
        for x in _compositions(g.shape[1], s):
            if np.array_equal(g @ np.array(x), w):
                out.append(x)
    return out


def minimal_elements(vectors) -> set[tuple[int, ...]]:
    vs = list(vectors)
    return {v for v in vs if not any(u != v and all(a >= b for a, b in zip(v, u)) for u in vs)}


def cycles_exist_by_support(gamma) -> bool:
    """Cycle existence from extreme rays: some column subset ``S`` has a
    one-dimensional kernel spanned by a strictly positive vector."""
    g = [[Fraction(int(v)) for v in row] for row in np.asarray(gamma)]
    r = len(g[0])
    for size in range(1, r + 1):
        for cols in itertools.combinations(range(r), size):
            sub = [[row[j] for j in cols] for row in g]
            ker = linalg.nullspace(sub, ncols=size)
            if len(ker) == 1:
                v = ker[0]
                if all(x > 0 for x in v) or all(x < 0 for x in v):
                    return True
    return False


def _brute_force_products(A: np.ndarray, target: np.ndarray, cap: int = 8):
    m = A.shape[1]
    out = []
    for s in range(0, cap + 1):
        for x in _compositions(m, s):
            if np.array_equal(A @ np.array(x), target):
                out.append(x)
    return out


def _random_reversible_network(rng: np.random.Generator, max_species: int = 3, max_complexes: int = 4):
    m = int(rng.integers(1, max_species + 1))
    names = "ABC"[:m]
    pool = [Complex.zero()]
    for i in range(m):
        pool.append(Complex.from_mapping({names[i]: 1}))
        pool.append(Complex.from_mapping({names[i]: 2}))
    for i, j in itertools.combinations(range(m), 2):
        pool.append(Complex.from_mapping({names[i]: 1, names[j]: 1}))
    while True:
        n = int(rng.integers(2, min(max_complexes, len(pool)) + 1))
        chosen = [pool[i] for i in rng.choice(len(pool), size=n, replace=False)]
        edges = {tuple(sorted(p)) for p in itertools.combinations(range(n), 2) if rng.random() < 0.6}
        used = {v for e in edges for v in e}
        if len(used) == n and edges:
            break
    steps = []
    for a, b in sorted(edges):
        steps.append(ReactionStep(chosen[a], chosen[b]))
        steps.append(ReactionStep(chosen[b], chosen[a]))
    return build_network(steps)


def _random_network(rng: np.random.Generator, max_species: int = 4, max_steps: int = 6):
    m = int(rng.integers(1, max_species + 1))
    names = [f"S{i}" for i in range(m)]
    steps = set()
    while len(steps) < int(rng.integers(1, max_steps + 1)):
        a = {names[i]: int(v) for i, v in enumerate(rng.integers(0, 3, size=m)) if v}
        b = {names[i]: int(v) for i, v in enumerate(rng.integers(0, 3, size=m)) if v}
        if a != b:
            steps.add(ReactionStep(Complex.from_mapping(a), Complex.from_mapping(b)))
    return build_network(sorted(steps, key=str))


def _scipy_stationary(net, k, c0):
    """Long-time limit by scipy's BDF integrator (independent of ours)."""
    from scipy.integrate import solve_ivp

    gamma = net.gamma.astype(float)
    alpha = net.alpha.astype(float)

    def f(_, c):
        c = np.maximum(c, 0.0)
        return gamma @ (k * np.prod(c[:, None] ** alpha, axis=0))

    c = np.asarray(c0, dtype=float)
    for _ in range(8):
        sol = solve_ivp(f, (0.0, 500.0), c, method="BDF", rtol=1e-11, atol=1e-14)
        c = sol.y[:, -1]
        if np.max(np.abs(f(0, c))) <= 1e-11 * max(1.0, np.max(np.abs(c))):
            break
    return c


# -- checks ----------------------------------------------------------------------

def check_deficiencies(quick: bool = False) -> tuple[bool, str]:
    want = {"wegscheider-irrev": 1, "envz-ompr": 1, "ross-chain": 0}
    got = {}
    for name in want:
        rep = structure_report(load_builtin(name).network)
        got[name] = (rep.N, rep.L, rep.S, rep.deficiency)
    ok = all(got[n][3] == d for n, d in want.items())
    detail = "; ".join(f"{n}: {N}-{L}-{S}={d}" for n, (N, L, S, d) in got.items())
    return ok, detail


def check_wegscheider(quick: bool = False) -> tuple[bool, str]:
    net = load_builtin("wegscheider").network
    rep = structure_report(net)
    circ = circuit_conditions(net)
    forest = forest_conditions(net)
    # k-1 k2 = k-2 k1 with steps ordered (k1, k-1, k2, k-2)
    target = {1: 1, 2: 1, 0: -1, 3: -1}
    negated = {i: -v for i, v in target.items()}
    one = len(forest) == 1 and forest[0].exponents() in (target, negated)
    classified = rep.P - rep.N + rep.L == 0 and not circ
    text = forest[0].text() if forest else "none"
    return one and classified, f"{len(circ)} circuit, {len(forest)} forest: {text}; P-N+L = {rep.P - rep.N + rep.L}"


def check_acr(quick: bool = False) -> tuple[bool, str]:
    out = {}
    for name in ("wegscheider-irrev", "envz-ompr", "ross-chain"):
        model = load_builtin(name)
        net = model.network
        k = model.rates if model.rates is not None else np.ones(net.n_steps)
        rep = acr_test(net, k, model.initial)
        out[name] = (rep.verdict, [net.species_names[i] for i in rep.robust_species])
    ok = (out["wegscheider-irrev"] == (ROBUST, ["A"])
          and out["envz-ompr"][0] == ROBUST and "Yp" in out["envz-ompr"][1]
          and out["ross-chain"][0] == INAPPLICABLE)
    return ok, "; ".join(f"{n}: {v} {s}" for n, (v, s) in out.items())


def check_ross(quick: bool = False) -> tuple[bool, str]:
    model = load_builtin("ross-chain")
    net, k = model.network, model.rates
    oracle = np.array([float(v) for v in ross_closed_form(k)])
    pts = stationary_points(net, k, np.ones(net.n_species), positivity=True)
    c = pts[0].c
    rel = float(np.max(np.abs(c - oracle) / oracle))
    c0 = oracle.copy()
    c0[0] += 100.0
    traj = integrate(net, k, c0, (0.0, 4.0), method="stiff", rtol=1e-8, atol=1e-10, samples=[0.0, 4.0])
    dev = float(np.max(np.abs(traj.final - oracle)))
    ok = rel <= 1e-8 and dev <= 1.0
    return ok, (f"closed form rel. error {rel:.1e} (<= 1e-8); "
                f"max deviation at t=4 after +100 in X1: {dev:.4g} (need <= 1)")


def check_stoichiometry(quick: bool = False) -> tuple[bool, str]:
    from importlib.resources import files

    n152 = len(reactant_complexes(16))
    text = files("crnkit").joinpath("data/ops16.formulas").read_text(encoding="utf-8")
    am = atomic_matrix(read_formula_file(text))
    steps = elementary_reactions(am)
    idx = {s: i for i, s in enumerate(am.species)}

    def vec(cplx):
        v = np.zeros(am.n_species, dtype=np.int64)
        for name, c in cplx.as_dict().items():
            v[idx[name]] += c
        return v

    balanced = all(np.array_equal(am.matrix @ vec(s.reactant), am.matrix @ vec(s.product)) for s in steps)
    # H2/O2/H2O against brute force over product molecularity <= 8
    small = atomic_matrix(["H2", "O2", "H2O"])
    got = {(s.reactant, s.product) for s in elementary_reactions(small)}
    names = small.species
    want = set()
    for rc in reactant_complexes(3):
        alpha = rc.vector(3)
        for x in _brute_force_products(small.matrix, small.matrix @ alpha):
            if tuple(x) != tuple(alpha):
                want.add((rc.as_complex(names),
                          Complex.from_mapping({names[i]: c for i, c in enumerate(x) if c})))
    literal = len(steps) == OPS_PUBLISHED_COUNT
    degraded = n152 == 152 and len(steps) == OPS_STEP_COUNT and balanced and got == want
    ok = n152 == 152 and (literal or degraded)
    clause = "literal" if literal else f"degraded clause ({OPS_PUBLISHED_COUNT} not reached)"
    return ok, (f"{n152} reactant complexes; OPS steps {len(steps)} (fixture {OPS_STEP_COUNT}), "
                f"balanced: {balanced}; H2/O2/H2O brute force {len(want)} = {len(got)}: {got == want}; {clause}")


def check_performance(quick: bool = False) -> tuple[bool, str]:
    model = load_builtin("chain(1000)")
    start = time.perf_counter()
    traj = integrate(model.network, model.rates, model.initial, (0.0, 1.0), method="stiff",
                     rtol=1e-6, atol=1e-9, samples=[0.0, 1.0])
    dt = time.perf_counter() - start
    mass = abs(traj.final.sum() - model.initial.sum())
    return dt <= 60.0, f"chain(1000) stiff over (0,1): {dt:.2f} s, {traj.n_accepted} steps, mass drift {mass:.1e}"


def check_stochastic(quick: bool = False) -> tuple[bool, str]:
    net = parse_network("A -> B")
    runs = 200 if quick else 1000
    x0 = [1000, 0]
    analytic = 1000 * math.exp(-1.0)
    parts = []
    ok = True
    for method in ("direct", "tau-leap"):
        st = ensemble(net, [1.0], x0, 1.0, method=method, n=runs, master_seed=11, sample_times=[1.0])
        mean, se = st.sample_means[-1, 0], st.standard_errors()[-1, 0]
        z = abs(mean - analytic) / se
        ok &= z <= 3.0
        parts.append(f"{method} mean {mean:.2f} (SE {se:.2f}, |z| {z:.2f})")
    # exact integer conservation along direct-method trajectories
    conserved = True
    for name, x in (("envz-ompr", [30, 5, 5, 40, 3, 4, 2]), ("wegscheider", [50, 20])):
        model = load_builtin(name)
        k = model.rates if model.rates is not None else np.ones(model.network.n_steps)
        laws = [np.array(law, dtype=float) for law in conservation_laws(model.network)]
        laws = [np.rint(w).astype(np.int64) for w in laws if np.all(w >= 0) and np.allclose(w, np.rint(w))]
        tr = ssa_direct(model.network, k, x, 5.0, seed=3)
        for w in laws:
            totals = tr.counts @ w
            conserved &= bool(np.all(totals == totals[0]))
    ok &= conserved
    parts.append(f"conservation exact: {conserved}")
    a = ensemble(net, [1.0], x0, 1.0, n=40, master_seed=5, sample_times=[0.5, 1.0], workers=1)
    b = ensemble(net, [1.0], x0, 1.0, n=40, master_seed=5, sample_times=[0.5, 1.0], workers=3)
    t1 = ssa_direct(net, [1.0], x0, 1.0, seed=9)
    t2 = ssa_direct(net, [1.0], x0, 1.0, seed=9)
    same = (np.array_equal(a.sample_means, b.sample_means) and np.array_equal(a.sample_variances, b.sample_variances)
            and np.array_equal(t1.times, t2.times) and np.array_equal(t1.counts, t2.counts))
    ok &= same
    parts.append(f"bit-identical across workers: {same}")
    return ok, "; ".join(parts)


def check_detailed_balance_property(quick: bool = False) -> tuple[bool, str]:
    rng = np.random.default_rng(2024)
    n = 20 if quick else 50
    sound = 0
    for _ in range(n):
        net = _random_reversible_network(rng)
        c_star = rng.uniform(0.2, 5.0, size=net.n_species)
        k = balanced_rates(net, rng.uniform(0.1, 10.0, size=net.n_steps), c_star)
        scale = float(np.max(k * np.prod(c_star[:, None] ** net.alpha, axis=0)))
        if (check_detailed_balance(net, k).holds
                and np.max(np.abs(rhs(net, k, c_star))) <= 1e-12 * scale):
            sound += 1
    agree = 0
    n_holds = 0
    for t in range(n):
        net = _random_reversible_network(rng)
        c_star = rng.uniform(0.2, 5.0, size=net.n_species)
        k = rng.uniform(0.5, 2.0, size=net.n_steps)
        if t % 2 == 0:
            k = balanced_rates(net, k, c_star)
        verdict = check_detailed_balance(net, k).holds
        c = _scipy_stationary(net, k, rng.uniform(0.5, 2.0, size=net.n_species))
        fluxes = k * np.prod(c[:, None] ** net.alpha, axis=0)
        gap = max(abs(fluxes[i] - fluxes[j]) / max(fluxes[i], fluxes[j]) for i, j in reversible_pairs(net))
        oracle = bool(np.all(c > 0)) and gap <= 1e-6
        n_holds += oracle
        agree += verdict == oracle
    ok = sound == n and agree == n
    return ok, (f"soundness {sound}/{n}; verdict vs scipy stationary point {agree}/{n} "
                f"({n_holds} balanced)")


def check_diophantine(quick: bool = False) -> tuple[bool, str]:
    rng = np.random.default_rng(5)
    n = 30 if quick else 100
    dec_ok = cyc_ok = 0
    for _ in range(n):
        m, r = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        g = rng.integers(-3, 4, size=(m, r))
        w = g @ rng.integers(0, 3, size=r)
        if rng.random() < 0.2:
            w = rng.integers(-3, 4, size=m)
        brute = minimal_elements(brute_force_solutions(g, w))
        if w.any():
            try:
                got = {v for v in decompositions(g, w).vectors() if sum(v) <= 6}
            except InfeasibleError:
                got = set()
        else:
            got = {v for v in cycles(g).minimal_cycles if sum(v) <= 6}
        dec_ok += got == brute
        verdict = cycles_exist(g)
        small = bool(brute_force_solutions(g, np.zeros(m, dtype=int)))
        cyc_ok += verdict == cycles_exist_by_support(g) and (verdict or not small)
    return dec_ok == n and cyc_ok == n, f"decompositions {dec_ok}/{n}; cycle verdicts {cyc_ok}/{n}"


def decay_errors(rtols, method: str = "explicit-adaptive") -> list[float]:
    """Endpoint errors of ``A -> B`` (k = 1) at t = 1 for each rtol."""
    net = parse_network("A -> B")
    exact = math.exp(-1.0)
    return [abs(integrate(net, [1.0], [1.0, 0.0], (0.0, 1.0), rtol=rt, atol=1e-16, method=method,
                          samples=[0.0, 1.0]).final[0] - exact) for rt in rtols]


def fixed_step_order(method: str = "explicit-adaptive") -> float:
    """Observed order with the step size pinned (halving h)."""
    net = parse_network("A -> B")
    errs = []
    for h in (0.1, 0.05):
        tr = integrate(net, [1.0], [1.0, 0.0], (0.0, 1.0), rtol=1e6, atol=1e6, method=method,
                       first_step=h, max_step=h, samples=[0.0, 1.0])
        errs.append(abs(tr.final[0] - math.exp(-1.0)))
    return math.log2(errs[0] / errs[1])


def check_numerics(quick: bool = False) -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    worst = 0.0
    h = 1e-6
    for _ in range(20):
        net = _random_network(rng)
        k = rng.uniform(0.1, 3.0, size=net.n_steps)
        c = rng.uniform(0.1, 3.0, size=net.n_species)
        J = jacobian(net, k, c)
        fd = np.empty_like(J)
        for j in range(net.n_species):
            e = np.zeros(net.n_species)
            e[j] = h
            fd[:, j] = (rhs(net, k, c + e) - rhs(net, k, c - e)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(J - fd))))
    rtols = [1e-5, 1e-6, 1e-7, 1e-8]
    errs = decay_errors(rtols)
    half = decay_errors([rt / 2 for rt in rtols])
    ratios = [a / b for a, b in zip(errs, half)]
    order = fixed_step_order()
    order_stiff = fixed_step_order("stiff")
    ok = worst <= 1e-6 and min(ratios) >= 8.0
    return ok, (f"Jacobian vs central differences max {worst:.1e} (<= 1e-6); "
                f"error ratio on halving rtol {', '.join(f'{q:.2f}' for q in ratios)} (need >= 8); "
                f"observed fixed-step order {order:.2f} (explicit), {order_stiff:.2f} (stiff)")


CHECKS = [
    (1, "deficiency triple", check_deficiencies),
    (2, "Wegscheider detailed balance", check_wegscheider),
    (3, "ACR verdicts", check_acr),
    (4, "Ross chain closed form and relaxation", check_ross),
    (5, "stoichiometry counts", check_stoichiometry),
    (6, "chain(1000) performance", check_performance),
    (7, "stochastic correctness", check_stochastic),
    (8, "detailed balance soundness", check_detailed_balance_property),
    (9, "Diophantine oracle equivalence", check_diophantine),
    (10, "numerics hygiene", check_numerics),
]


def run_check(key: int, quick: bool = False) -> CheckResult:
    _, title, fn = next(c for c in CHECKS if c[0] == key)
    start = time.perf_counter()
    passed, detail = fn(quick)
    return CheckResult(key, title, bool(passed), detail, time.perf_counter() - start)


def run_all(quick: bool = False) -> list[CheckResult]:
    return [run_check(key, quick) for key, _, _ in CHECKS]
