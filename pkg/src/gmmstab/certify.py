"""End-to-end stability certification and contamination studies.

``certify`` runs the full condition ladder for a fitted mixture against a
model class at a given fit level epsilon:

    1. class membership A1-A3 (strict separation),
    2. pi_min > 2 epsilon,
    3. K <= 1/pi_min  and  pi_max <= 1 - (K-1) pi_min,
    4. c > c0 * eta0.

When everything passes it refines (c0, eta0) to the fixed point (c*, eta*)
and emits per-component bounds: mean within c* eta* sigma_i, scale ratio at
most eta*, proportion gap at most 2 eps + (1 - pi_min + pi_max) Phi(-C).
A certificate whose implied per-component TV bound 1 - 2 Phi(-c*/2) reaches
0.5 is flagged vacuous: the TV-to-parameter inversion stops being usable
past that level, so the numeric bounds should not be trusted.

``run_contamination`` sweeps lam-contaminated versions P~ = (1-lam) P0 +
lam Q of an oracle mixture, estimates the fit level by Monte Carlo, and
certifies P0 at that level, recording bounds or the failure mode per sweep
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import (
    StabilityInputs,
    margin_C,
    proportion_bound,
    refine,
    solve_c0,
    solve_eta0,
)
from .errors import (
    DomainError,
    NoConvergence,
    RefinementInapplicable,
    UnknownExample,
)
from .gaussian_tv import SphericalGaussian
from .mixture import (
    MembershipReport,
    MixtureModel,
    ModelClassSpec,
    check_class_membership,
    min_pairwise_separation,
)
from .montecarlo import TvEstimate, mc_tv
from .specfun import normal_cdf

# Condition identifiers used in StabilityCertificate.failed_conditions.
COND_A1 = "A1"
COND_A2 = "A2"
COND_A3 = "A3"
COND_EPSILON = "pi_min>2eps"
COND_K_BOUND = "K<=1/pi_min"
COND_PI_MAX = "pi_max<=1-(K-1)pi_min"
COND_SEPARATION = "separation"
COND_REFINEMENT = "refinement"

_VACUOUS_TV_LEVEL = 0.5

# C offset below the realized minimal separation used when the class
# separation constant is requested as "auto" (A3 is strict).
_AUTO_C_MARGIN = 1e-9


@dataclass(frozen=True)
class ComponentBounds:
    """Certified bounds for one matched component pair."""

    mean_bound: float
    sigma_ratio_bound: float
    proportion_bound: float


@dataclass(frozen=True)
class StabilityCertificate:
    """Applicability verdict plus all certified constants and bounds."""

    applicable: bool
    failed_conditions: tuple[str, ...]
    epsilon: float
    c0: float
    eta0: float
    c_star: float
    eta_star: float
    margin: float
    component_tv_bound: float
    per_component: tuple[ComponentBounds, ...]
    vacuous: bool
    trace_len: int
    membership: MembershipReport | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        def num(x: float):
            return x if math.isfinite(x) else None

        return {
            "applicable": self.applicable,
            "failed_conditions": list(self.failed_conditions),
            "epsilon": self.epsilon,
            "c0": num(self.c0),
            "eta0": num(self.eta0),
            "c_star": num(self.c_star),
            "eta_star": num(self.eta_star),
            "margin": num(self.margin),
            "component_tv_bound": num(self.component_tv_bound),
            "vacuous": self.vacuous,
            "trace_len": self.trace_len,
            "per_component": [
                {
                    "mean_bound": b.mean_bound,
                    "sigma_ratio_bound": b.sigma_ratio_bound,
                    "proportion_bound": b.proportion_bound,
                }
                for b in self.per_component
            ],
        }


def _inapplicable(
    failures: tuple[str, ...],
    epsilon: float,
    c0: float,
    eta0: float,
    membership: MembershipReport | None,
) -> StabilityCertificate:
    return StabilityCertificate(
        applicable=False,
        failed_conditions=failures,
        epsilon=epsilon,
        c0=c0,
        eta0=eta0,
        c_star=math.nan,
        eta_star=math.nan,
        margin=math.nan,
        component_tv_bound=math.nan,
        per_component=(),
        vacuous=False,
        trace_len=0,
        membership=membership,
    )


def certify(model: MixtureModel, spec: ModelClassSpec, epsilon: float) -> StabilityCertificate:
    """Run the full condition ladder and, if it passes, the refinement.

    Never raises on an inapplicable input; all failures are reported in the
    certificate's failed_conditions.
    """
    if epsilon < 0.0 or not math.isfinite(epsilon):
        raise DomainError(f"epsilon must be a finite nonnegative real, got {epsilon!r}")

    failures: list[str] = []
    membership = check_class_membership(model, spec)
    failures.extend(membership.failures)

    if not spec.pi_min > 2.0 * epsilon:
        failures.append(COND_EPSILON)
    if spec.K * spec.pi_min > 1.0 + 1e-15:
        failures.append(COND_K_BOUND)
    if spec.pi_max > 1.0 - (spec.K - 1) * spec.pi_min + 1e-15:
        failures.append(COND_PI_MAX)

    c0 = math.nan
    eta0 = math.nan
    if spec.pi_min > 2.0 * epsilon:
        inputs = StabilityInputs(spec=spec, epsilon=epsilon, d=model.dim)
        c0 = solve_c0(spec.pi_min, epsilon)
        eta0 = solve_eta0(inputs)
        if not spec.c > c0 * eta0:
            failures.append(COND_SEPARATION)

    if failures:
        return _inapplicable(tuple(failures), epsilon, c0, eta0, membership)

    try:
        trace = refine(inputs)
    except (RefinementInapplicable, NoConvergence):
        return _inapplicable((COND_REFINEMENT,), epsilon, c0, eta0, membership)

    c_star, eta_star = trace.c_star, trace.eta_star
    tv_bound = 1.0 - 2.0 * normal_cdf(-0.5 * c_star)
    pi_bound = proportion_bound(inputs, c_star, eta_star)
    margin = margin_C(spec.c, c_star, eta_star)
    per_component = tuple(
        ComponentBounds(
            mean_bound=c_star * eta_star * comp.sigma,
            sigma_ratio_bound=eta_star,
            proportion_bound=pi_bound,
        )
        for comp in model.components
    )
    return StabilityCertificate(
        applicable=True,
        failed_conditions=(),
        epsilon=epsilon,
        c0=c0,
        eta0=eta0,
        c_star=c_star,
        eta_star=eta_star,
        margin=margin,
        component_tv_bound=tv_bound,
        per_component=per_component,
        vacuous=tv_bound >= _VACUOUS_TV_LEVEL,
        trace_len=len(trace.iterates),
        membership=membership,
    )


def auto_class_spec(
    model: MixtureModel,
    pi_min: float | None = None,
    pi_max: float | None = None,
    c: float | None = None,
) -> ModelClassSpec:
    """Class spec certifying the model itself: proportion bounds from the
    realized weights and, when c is None ("auto"), the separation constant
    just below the realized minimal s_ij so strict A3 holds."""
    if c is None:
        min_sep, _ = min_pairwise_separation(model)
        c = min_sep - _AUTO_C_MARGIN
    return ModelClassSpec(
        K=model.n_components,
        pi_min=min(model.weights) if pi_min is None else pi_min,
        pi_max=max(model.weights) if pi_max is None else pi_max,
        c=c,
    )


@dataclass(frozen=True)
class ContaminationScenario:
    """A lam-contamination study P~ = (1 - lam) P0 + lam Q over a sweep.

    sweep_param selects what the sweep values rescale in both the base and
    the contaminant: "sigma_scale" multiplies every component sigma (the
    two-cluster study), "mean_scale" multiplies every mean vector (the
    separation study).
    """

    base: MixtureModel
    contaminant: MixtureModel
    lam: float
    sweep: tuple[float, ...] = (1.0,)
    sweep_param: str = "sigma_scale"

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam!r}")
        if self.sweep_param not in ("sigma_scale", "mean_scale"):
            raise DomainError(f"unknown sweep_param {self.sweep_param!r}")
        if self.base.dim != self.contaminant.dim:
            raise DomainError("base and contaminant must share the dimension")
        object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))

    def models_at(self, value: float) -> tuple[MixtureModel, MixtureModel]:
        return (_rescale(self.base, value, self.sweep_param),
                _rescale(self.contaminant, value, self.sweep_param))


def _rescale(model: MixtureModel, value: float, sweep_param: str) -> MixtureModel:
    if sweep_param == "sigma_scale":
        comps = tuple(SphericalGaussian(c.mean, c.sigma * value) for c in model.components)
    else:
        comps = tuple(
            SphericalGaussian(tuple(m * value for m in c.mean), c.sigma)
            for c in model.components
        )
    return MixtureModel(comps, model.weights, model.dim)


def contaminate(base: MixtureModel, contaminant: MixtureModel, lam: float) -> MixtureModel:
    """The mixture (1 - lam) * base + lam * contaminant."""
    comps = base.components + contaminant.components
    weights = tuple((1.0 - lam) * w for w in base.weights) + tuple(
        lam * w for w in contaminant.weights
    )
    return MixtureModel(comps, weights, base.dim)


@dataclass(frozen=True)
class ContaminationRow:
    """One sweep point of a contamination study."""

    sweep_value: float
    lam: float
    epsilon_hat: TvEstimate
    componentwise: tuple[TvEstimate, ...]
    class_spec: ModelClassSpec
    certificate: StabilityCertificate
    certificate_conservative: StabilityCertificate

    @property
    def max_mean_bound(self) -> float:
        if not self.certificate.applicable or self.certificate.vacuous:
            return math.nan
        return max(b.mean_bound for b in self.certificate.per_component)


def run_contamination(
    scenario: ContaminationScenario,
    spec: ModelClassSpec | None = None,
    n: int = 10**6,
    seed: int = 0,
) -> list[ContaminationRow]:
    """Certify the oracle mixture against its contaminated version at each
    sweep point.

    Per point: build P~, estimate eps_hat = mc_tv(P0, P~), certify P0 at
    eps_hat (and, as a conservative variant, at eps_hat + 2 standard
    errors).  The recorded componentwise list holds, for each component
    P0_k, the estimated TV between P0_k and its contaminated version
    (1 - lam) P0_k + lam Q.  When spec is None the class constants are
    derived from P0 itself at each sweep point (weights as proportion
    bounds, c just under the realized minimal separation).

    The Monte Carlo seed for sweep index i is seed + i, so rows do not
    depend on execution order.
    """
    rows: list[ContaminationRow] = []
    for idx, value in enumerate(scenario.sweep):
        base, contam = scenario.models_at(value)
        mixed = contaminate(base, contam, scenario.lam)
        row_seed = seed + idx
        eps_hat = mc_tv(base, mixed, n, row_seed)

        componentwise = []
        for comp in base.components:
            single = MixtureModel((comp,), (1.0,), base.dim)
            contaminated_comp = contaminate(single, contam, scenario.lam)
            componentwise.append(mc_tv(single, contaminated_comp, n, row_seed))

        row_spec = auto_class_spec(base) if spec is None else spec
        cert = certify(base, row_spec, eps_hat.value)
        cert_conservative = certify(
            base, row_spec, eps_hat.value + 2.0 * eps_hat.std_error
        )
        rows.append(
            ContaminationRow(
                sweep_value=value,
                lam=scenario.lam,
                epsilon_hat=eps_hat,
                componentwise=tuple(componentwise),
                class_spec=row_spec,
                certificate=cert,
                certificate_conservative=cert_conservative,
            )
        )
    return rows


# Built-in study geometry -----------------------------------------------------

_EXAMPLE1_THETA1 = (-1.0, -2.0 * math.sqrt(3.0) / 3.0)
_EXAMPLE1_THETA2 = (1.0, -2.0 * math.sqrt(3.0) / 3.0)
_EXAMPLE1_THETA3 = (0.0, 4.0 * math.sqrt(3.0) / 3.0)

EXAMPLE_IDS = (
    "example1",
    "example2-noise",
    "example2-outlier",
    "fig-example1-stable",
    "fig-example1-unstable",
)


def builtin_example(example_id: str, **params) -> tuple[MixtureModel, MixtureModel]:
    """Construct a built-in pair of mixtures.

    example1(sigma=1.0): two balanced 2-D clusters at unit scale plus the
        far contaminant; returns (P0, Q).
    example2-noise / example2-outlier (K=5, s=1.0, d=K): K balanced unit
        clusters at mu_k = s e_k with a broad background / a tight outlier
        contaminant; returns (P0, Q).
    fig-example1-stable: the stable two-component 1-D mixture and a
        TV-0.001 perturbation of it; returns (P, Q).
    fig-example1-unstable: the 4-component mixture and the 5-component
        mixture that are close in TV but far in parameters; returns (P, P').
    """
    def no_extra(allowed: set[str]) -> None:
        extra = set(params) - allowed
        if extra:
            raise DomainError(f"unknown parameters for {example_id}: {sorted(extra)}")

    if example_id == "example1":
        no_extra({"sigma"})
        sigma = float(params.get("sigma", 1.0))
        base = MixtureModel.create(
            (SphericalGaussian(_EXAMPLE1_THETA1, sigma),
             SphericalGaussian(_EXAMPLE1_THETA2, sigma)),
            (0.5, 0.5),
        )
        contaminant = MixtureModel.create(
            (SphericalGaussian(_EXAMPLE1_THETA3, sigma),), (1.0,)
        )
        return base, contaminant

    if example_id in ("example2-noise", "example2-outlier"):
        no_extra({"K", "s", "d", "sigma0"})
        k = int(params.get("K", 5))
        s = float(params.get("s", 1.0))
        d = int(params.get("d", k))
        sigma0 = float(params.get("sigma0", 1.0))
        if d < k:
            raise DomainError(f"need d >= K for unit-vector means, got d={d}, K={k}")
        comps = []
        for i in range(k):
            mean = [0.0] * d
            mean[i] = s
            comps.append(SphericalGaussian(tuple(mean), sigma0))
        base = MixtureModel.create(tuple(comps), (1.0 / k,) * k)
        mean_bar = tuple(s / k if i < k else 0.0 for i in range(d))
        if example_id == "example2-noise":
            contaminant = MixtureModel.create(
                (SphericalGaussian(mean_bar, 10.0 * sigma0),), (1.0,)
            )
        else:
            outlier_mean = tuple(k * m for m in mean_bar)
            contaminant = MixtureModel.create(
                (SphericalGaussian(outlier_mean, 0.1 * sigma0),), (1.0,)
            )
        return base, contaminant

    if example_id == "fig-example1-stable":
        no_extra(set())
        stable = MixtureModel.create(
            (SphericalGaussian((-3.0,), 1.0), SphericalGaussian((3.0,), 1.0)),
            (0.5, 0.5),
        )
        partner = contaminate(
            stable, MixtureModel.create((SphericalGaussian((0.0,), 1.0),), (1.0,)), 0.001
        )
        return stable, partner

    if example_id == "fig-example1-unstable":
        no_extra(set())
        sigma = 1.5  # variance 2.25
        p = MixtureModel.create(
            tuple(SphericalGaussian((m,), sigma) for m in (-3.0, -1.0, 1.0, 3.0)),
            (0.0625, 0.4375, 0.4375, 0.0625),
        )
        p_prime = MixtureModel.create(
            tuple(SphericalGaussian((m,), sigma) for m in (-4.0, -2.0, 0.0, 2.0, 4.0)),
            (0.0078125, 0.21875, 0.546875, 0.21875, 0.0078125),
        )
        return p, p_prime

    raise UnknownExample(example_id)


def example_scenario(
    example_id: str, lam: float, sweep: tuple[float, ...] | None = None, **params
) -> ContaminationScenario:
    """ContaminationScenario for a built-in example with its natural sweep
    semantics (example1 sweeps the common sigma, example2 the mean scale)."""
    base, contaminant = builtin_example(example_id, **params)
    if example_id == "example1":
        sweep_param = "sigma_scale"
        default_sweep = (0.3, 0.4, 0.45, 0.5, 0.6, 0.8, 1.0)
    elif example_id in ("example2-noise", "example2-outlier"):
        sweep_param = "mean_scale"
        default_sweep = (2.0, 3.0, 4.0, 5.0, 6.0, 7.0)
    else:
        sweep_param = "sigma_scale"
        default_sweep = (1.0,)
    return ContaminationScenario(
        base=base,
        contaminant=contaminant,
        lam=lam,
        sweep=default_sweep if sweep is None else tuple(sweep),
        sweep_param=sweep_param,
    )
