""" Experiment studies built on scenarios and the servo loop.

Every study is a pure function of its configuration and seed. Per-trial
generators are spawned from one `numpy.random.SeedSequence` so results do not
depend on the number of workers.
"""
from __future__ import annotations
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
import json
from typing import Dict, List, Sequence
import numpy as np
import pandas as pd
import scipy.stats
from shapeservo.algorithm.servo import IterationRecord, random_motion, servo_loop
from shapeservo.common.errors import (
    AppError,
    ConfigError,
    DegenerateWindowError,
    EstimationError,
    SolverError,
    UnreachablePoseError,
)
from shapeservo.control.estimation import broyden_update, predict_one_step
from shapeservo.control.law import ControllerConfig
from shapeservo.data import presets
from shapeservo.feature.pca import ShapeWindow, fit_basis, explained_variance, project
from shapeservo.geometry.contour import Contour
from shapeservo.geometry.pose import Pose2D
from shapeservo.harness.scenario import (
    PlantConfig,
    Scenario,
    TargetConfig,
    build_plant,
    make_target,
    pose_from_config,
    run_scenario,
)
from shapeservo.plant.cable import (
    CableBoundary,
    CableModel,
    sample_contour,
    solve_static_shape,
)
from shapeservo.plant.plant import Plant
from shapeservo.plant.rigid import RigidShape, apply_motion, world_contour
import logging

logger = logging.getLogger(__name__)

PRESETS = ("variance", "noise", "broyden", "correlation", "unreachable", "forms")


@dataclass
class StudyReport:
    """ Result tables of a study.

    Attributes
    ----------
    name : str
        Study name, used in the output file names.
    table : pandas.DataFrame
        The main result table.
    summary : pandas.DataFrame
        One row per servo run, empty for studies without runs.
    extra : dict of str to pandas.DataFrame
        Further study-specific tables.
    """

    name: str
    table: pd.DataFrame
    summary: pd.DataFrame = field(default_factory=pd.DataFrame)
    extra: Dict[str, pd.DataFrame] = field(default_factory=dict)

    def write(self, out_dir) -> List[Path]:
        """ Writes ``report_<name>.csv``, ``report_<name>_<table>.csv`` and,
            if there were runs, ``summary.csv``.
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = [out_dir / "report_{}.csv".format(self.name)]
        self.table.to_csv(paths[0], index=False, float_format="%.12g")
        for key, df in self.extra.items():
            path = out_dir / "report_{}_{}.csv".format(self.name, key)
            df.to_csv(path, index=False, float_format="%.12g")
            paths.append(path)
        if not self.summary.empty:
            path = out_dir / "summary.csv"
            self.summary.to_csv(path, index=False, float_format="%.12g")
            paths.append(path)
        for path in paths:
            logger.info("Wrote {}".format(path))
        return paths


def spawn_seeds(seed: int, n: int) -> List[int]:
    """ Independent integer seeds for `n` trials.
    """
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(child.generate_state(1)[0]) for child in children]


# Running many scenarios


def _run_one(scenario: Scenario, out_dir) -> dict:
    try:
        result = run_scenario(scenario, out_dir)
    except AppError as error:
        logger.warning("Scenario {} failed: {}".format(scenario.name, error))
        return {
            "scenario": scenario.name,
            "seed": scenario.seed,
            "plant": scenario.plant.kind,
            "noise": scenario.noise,
            "converged": False,
            "error": str(error),
        }
    row = result.summary()
    row["error"] = ""
    return row


def run_scenarios(scenarios: Sequence[Scenario], out_dir=None, workers: int = 1) -> pd.DataFrame:
    """ Runs scenarios, in a process pool if `workers` > 1, and returns the
        summary table in scenario order. Failed runs are reported in the
        `error` column.
    """
    scenarios = list(scenarios)
    if workers <= 1:
        rows = [_run_one(s, out_dir) for s in scenarios]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, scenarios, [out_dir] * len(scenarios)))
    return pd.DataFrame(rows)


# Explained variance


def _continued(model, start, delta, step, limit):
    """ Solves the statics at ``start`` moved by `delta` by continuation in
        increments no larger than `step`, warm starting every solve.
    """
    increments = int(np.ceil(np.max(np.abs(delta.as_vector()) / step)))
    increments = max(increments, 1)
    state = start
    for j in range(1, increments + 1):
        boundary = start.boundary.moved(Pose2D.from_vector(delta.as_vector() * j / increments))
        if np.linalg.norm(boundary.chord) > limit:
            raise UnreachablePoseError("continuation path leaves the feasible region")
        state = solve_static_shape(model, boundary, warm_start=state)
    return state


def _window_contours(
    model: CableModel,
    boundary: CableBoundary,
    envelope,
    M: int,
    K: int,
    rng: np.random.Generator,
    max_attempts: int = 200,
) -> List[Contour]:
    """ The initial contour plus M contours at random perturbations of the
        right end.

        Each perturbed shape is reached from the initial one by continuation
        in steps of at most the small motion envelope, so large draws follow
        the equilibrium branch the way a robot moving the end would. Draws
        whose path comes within 0.1 % of full extension, or whose statics
        fail, are rejected.
    """
    step = np.array(
        [
            presets.SMALL_TRANSLATION * model.length,
            presets.SMALL_TRANSLATION * model.length,
            np.radians(presets.SMALL_ROTATION_DEG),
        ]
    )
    limit = model.length * (1.0 - 1e-3)
    base = solve_static_shape(model, boundary)
    contours = [sample_contour(base, K)]
    attempts = 0
    while len(contours) < M + 1:
        attempts += 1
        if attempts > max_attempts:
            raise SolverError("No feasible perturbation after {} draws.".format(max_attempts))
        delta = random_motion(envelope, rng)
        if np.linalg.norm(boundary.moved(delta).chord) > limit:
            continue
        try:
            state = _continued(model, base, delta, step, limit)
        except (SolverError, UnreachablePoseError):
            continue
        contours.append(sample_contour(state, K))
    logger.debug("Window of {} contours after {} draws".format(M + 1, attempts))
    return contours


def _variance_trial(args) -> List[dict]:
    index, right, envelope_name, envelope, M, K, k_values, seed = args
    rng = np.random.default_rng(seed)
    model = CableModel(presets.CABLE_LENGTH, presets.CABLE_SEGMENTS)
    boundary = CableBoundary(pose_from_config(presets.LEFT_END), pose_from_config(right))
    rows = []
    try:
        contours = _window_contours(model, boundary, envelope, M, K, rng)
        basis = fit_basis(ShapeWindow(contours), k=1)
        for k in k_values:
            rows.append(
                {
                    "trial": index,
                    "envelope": envelope_name,
                    "k": k,
                    "upsilon": explained_variance(basis, min(k, 2 * K)),
                    "error": "",
                }
            )
    except AppError as error:
        logger.warning("Variance trial {} ({}) failed: {}".format(index, envelope_name, error))
        rows.append(
            {"trial": index, "envelope": envelope_name, "k": np.nan, "upsilon": np.nan, "error": str(error)}
        )
    return rows


def study_explained_variance(
    trials: Sequence = presets.VARIANCE_TRIALS,
    k_values: Sequence[int] = (1, 2, 3, 4, 5),
    M: int = 10,
    K: int = presets.CONTOUR_SAMPLES,
    seed: int = 0,
    envelopes: Sequence[str] = ("small", "large"),
    workers: int = 1,
) -> StudyReport:
    """ Explained variance of PCA bases fitted to windows of random cable
        shapes.

        Parameters
        ----------
        trials : sequence of (x, y, theta_degrees)
            Right end poses of the trials; the left end is fixed at the origin.
        k_values : sequence of int
            Component counts to tabulate.
        M : int
            Number of random motions per window.
        K : int
            Contour samples.
        seed : int
        envelopes : sequence of str
            "small" (5 % translation, 5 degrees) and/or "large" (106 %
            translation, 90 degrees).
        workers : int

        Returns
        -------
        StudyReport
            Long table (trial, envelope, k, upsilon, error) and a wide table of
            upsilon per trial and k.
    """
    bounds = {
        "small": (presets.SMALL_TRANSLATION, presets.SMALL_ROTATION_DEG),
        "large": (presets.LARGE_TRANSLATION, presets.LARGE_ROTATION_DEG),
    }
    unknown = set(envelopes) - set(bounds)
    if unknown:
        raise ConfigError("Unknown envelopes.", sorted(unknown))
    jobs = []
    seeds = spawn_seeds(seed, len(trials) * len(envelopes))
    for e, name in enumerate(envelopes):
        translation, rotation = bounds[name]
        envelope = np.array(
            [translation * presets.CABLE_LENGTH, translation * presets.CABLE_LENGTH, np.radians(rotation)]
        )
        for i, right in enumerate(trials):
            jobs.append((i, right, name, envelope, M, K, tuple(k_values), seeds[e * len(trials) + i]))
    if workers <= 1:
        results = [_variance_trial(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_variance_trial, jobs))
    table = pd.DataFrame([row for rows in results for row in rows])
    valid = table[table["error"] == ""]
    wide = valid.pivot_table(index=["envelope", "trial"], columns="k", values="upsilon").reset_index()
    wide.columns = [c if isinstance(c, str) else "upsilon_{}".format(c) for c in wide.columns]
    return StudyReport("variance", table, extra={"wide": wide})


# Estimator comparison


def compare_estimators(
    plant: Plant,
    target: Contour,
    config: ControllerConfig,
    rng: np.random.Generator,
    beta_values: Sequence[float] = presets.BROYDEN_BETAS,
    noise_sigma: float = 0.0,
    max_iterations: int = 300,
):
    """ Runs one servo trajectory and scores one-step feature predictions of
        the receding horizon estimate and of Broyden-updated estimates.

        The Broyden estimates start from the first receding horizon estimate.
        The ground truth at iteration i is the observed next contour projected
        with the basis of iteration i.

        Returns
        -------
        tuple of (pandas.DataFrame, pandas.DataFrame, ServoTrace)
            Per-iteration errors, run-mean errors, and the trace.
    """
    config = replace(config, use_inverse_form=False)
    records: List[IterationRecord] = []
    trace = servo_loop(
        plant, target, config, rng=rng, noise_sigma=noise_sigma,
        max_iterations=max_iterations, observer=records.append,
    )
    k = config.k
    feature_columns = ["e{}".format(j + 1) for j in range(k)]
    rows = []

    def add_row(record, method, predicted):
        truth = project(record.basis, record.contour_after)
        error = np.abs(predicted - truth)
        row = {"iteration": record.iteration, "method": method}
        row.update(dict(zip(feature_columns, error)))
        row["error"] = float(np.linalg.norm(error))
        rows.append(row)

    for record in records:
        add_row(record, "receding", predict_one_step(record.model, record.features, record.motion))

    for beta in beta_values:
        method = "broyden_{:g}".format(beta)
        model = records[0].model if records else None
        previous = None
        for record in records:
            if previous is not None:
                delta_s = record.features - previous.features
                try:
                    model = broyden_update(model, delta_s, previous.motion, beta)
                except EstimationError:
                    logger.warning(
                        "Skipped Broyden update at iteration {}: zero motion".format(record.iteration)
                    )
            add_row(record, method, predict_one_step(model, record.features, record.motion))
            previous = record

    errors = pd.DataFrame(rows, columns=["iteration", "method"] + feature_columns + ["error"])
    means = errors.groupby("method", sort=False)[feature_columns + ["error"]].mean().reset_index()
    return errors, means, trace


def study_estimator_comparison(
    scenario: Scenario, beta_values: Sequence[float] = presets.BROYDEN_BETAS
) -> StudyReport:
    """ Receding horizon against Broyden one-step prediction errors on a
        scenario.
    """
    plant = build_plant(scenario.plant)
    target = make_target(scenario)
    errors, means, trace = compare_estimators(
        plant,
        target,
        scenario.controller,
        np.random.default_rng(scenario.seed),
        beta_values,
        noise_sigma=scenario.noise_pixels,
        max_iterations=scenario.max_iterations,
    )
    summary = {"scenario": scenario.name, "seed": scenario.seed, "plant": scenario.plant.kind}
    summary.update(trace.summary())
    return StudyReport("broyden", means, pd.DataFrame([summary]), extra={"series": errors})


def study_control_forms(scenarios: Sequence[Scenario], out_dir=None, workers: int = 1) -> StudyReport:
    """ Runs each scenario with the direct and with the inverse control law.

        The table has one row per run with a `form` column; the extra `ase`
        table holds the ASE traces side by side, one column per run.
    """
    runs = []
    for scenario in scenarios:
        for inverse in (False, True):
            form = "inverse" if inverse else "direct"
            runs.append(
                replace(
                    scenario,
                    name="{}_{}".format(scenario.name, form),
                    controller=replace(scenario.controller, use_inverse_form=inverse),
                )
            )
    summary = run_scenarios(runs, out_dir, workers)
    summary.insert(1, "form", ["inverse" if r.controller.use_inverse_form else "direct" for r in runs])
    traces = {}
    if out_dir is not None:
        for run in runs:
            path = Path(out_dir) / "trace_{}.csv".format(run.name)
            if path.exists():
                traces[run.name] = pd.read_csv(path)["ase"]
    extra = {"ase": pd.DataFrame(traces)} if traces else {}
    return StudyReport("forms", summary, summary, extra)


# Rigid correlation


def correlation(a, b) -> float:
    """ Pearson correlation, NaN if either series is constant.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
        return float("nan")
    return float(scipy.stats.pearsonr(a, b)[0])


def rigid_motion_poses(shape: RigidShape, n: int, rng: np.random.Generator) -> List[Pose2D]:
    """ Poses drawn uniformly in the correlation envelope around the shape's
        pose.
    """
    x = presets.CORRELATION_X_FRACTION * shape.width
    y = presets.CORRELATION_Y_FRACTION * shape.height
    low = np.array([-x, -y, presets.CORRELATION_ROTATION[0]])
    high = np.array([x, y, presets.CORRELATION_ROTATION[1]])
    return [Pose2D.from_vector(rng.uniform(low, high)) for _ in range(n)]


def rigid_correlation_matrix(shape: RigidShape, n_motions: int, rng, k: int = 3) -> pd.DataFrame:
    """ Correlations between the first k features and the pose variables over
        random motions of a rigid shape.
    """
    deltas = rigid_motion_poses(shape, n_motions, rng)
    shapes = [apply_motion(shape, d) for d in deltas]
    basis = fit_basis(ShapeWindow([world_contour(s) for s in shapes]), k=k)
    features = np.array([project(basis, world_contour(s)) for s in shapes])
    offsets = np.array([d.as_vector() for d in deltas])
    rows = []
    for j in range(k):
        row = {"feature": "s{}".format(j + 1)}
        for i, name in enumerate(("x", "y", "theta")):
            row[name] = correlation(features[:, j], offsets[:, i])
        values = np.array([row["x"], row["y"], row["theta"]])
        if np.all(np.isnan(values)):
            row["strongest"] = "undefined"
        else:
            row["strongest"] = ("x", "y", "theta")[int(np.nanargmax(np.abs(values)))]
        rows.append(row)
    return pd.DataFrame(rows)


def study_rigid_correlation(
    scenarios: Sequence[Scenario], n_motions: int = presets.CORRELATION_MOTIONS
) -> StudyReport:
    """ Table of feature/pose correlations for each rigid scenario.
    """
    tables = []
    for scenario in scenarios:
        if scenario.plant.kind != "rigid":
            raise ConfigError("Correlation needs rigid scenarios.", scenario.name)
        shape = RigidShape(scenario.plant.rigid_template(), pose_from_config(scenario.plant.pose))
        try:
            table = rigid_correlation_matrix(
                shape, n_motions, np.random.default_rng(scenario.seed), scenario.controller.k
            )
        except DegenerateWindowError as error:
            logger.warning("Correlation for {} undefined: {}".format(scenario.name, error))
            table = pd.DataFrame([{"feature": "", "strongest": "undefined"}])
        table.insert(0, "scenario", scenario.name)
        tables.append(table)
    return StudyReport("correlation", pd.concat(tables, ignore_index=True))


# Presets


def reachable_scenario(seed: int = 0, noise: float = 0.0, name: str = "reachable") -> Scenario:
    return Scenario(
        name=name,
        seed=seed,
        max_iterations=5000,
        noise=noise,
        plant=PlantConfig(kind="cable", pose=presets.REACHABLE_INITIAL),
        target=TargetConfig(pose=presets.REACHABLE_TARGET),
        controller=ControllerConfig(ase_threshold=presets.ASE_THRESHOLD),
    )


def unreachable_scenario(seed: int = 0) -> Scenario:
    return Scenario(
        name="unreachable",
        seed=seed,
        max_iterations=2000,
        plant=PlantConfig(kind="cable", pose=presets.REACHABLE_INITIAL),
        target=TargetConfig(pose=presets.REACHABLE_TARGET, left=presets.UNREACHABLE_LEFT_END),
        controller=ControllerConfig(ase_threshold=presets.ASE_THRESHOLD),
    )


def rigid_scenario(seed: int = 0, name: str = "rigid") -> Scenario:
    return Scenario(
        name=name,
        seed=seed,
        plant=PlantConfig(kind="rigid", pose=presets.RIGID_INITIAL),
        target=TargetConfig(pose=presets.RIGID_TARGET),
        controller=ControllerConfig(ase_threshold=presets.ASE_THRESHOLD),
    )


def run_preset(name: str, seed: int = 0, out_dir=None, workers: int = 1) -> StudyReport:
    """ Runs a named preset study.

        Raises
        ------
        ConfigError
            If the preset is unknown.
    """
    if name not in PRESETS:
        raise ConfigError("Unknown preset {!r}; choose from {}.".format(name, ", ".join(PRESETS)))
    seeds = spawn_seeds(seed, 2)
    if name == "variance":
        return study_explained_variance(seed=seed, workers=workers)
    if name == "broyden":
        return study_estimator_comparison(reachable_scenario(seed))
    if name == "correlation":
        return study_rigid_correlation([rigid_scenario(s, "rigid_{}".format(i)) for i, s in enumerate(seeds)])
    if name == "forms":
        return study_control_forms(
            [reachable_scenario(seeds[0]), rigid_scenario(seeds[1])], out_dir, workers
        )
    if name == "noise":
        scenarios = [
            reachable_scenario(seeds[0], 0.0, "noise_free"),
            reachable_scenario(seeds[1], presets.NOISE_SIGMA, "noisy"),
        ]
    else:
        scenarios = [reachable_scenario(seeds[0]), unreachable_scenario(seeds[1])]
    summary = run_scenarios(scenarios, out_dir, workers)
    return StudyReport(name, summary, summary)


# Study files

STUDY_PARAMETERS = {
    "variance": ("k_values", "M", "K", "envelopes"),
    "noise": (),
    "unreachable": (),
    "forms": (),
    "broyden": ("beta_values",),
    "correlation": ("n_motions",),
}


@dataclass(frozen=True)
class StudyConfig:
    """ A study read from a JSON file::

        {
            "study": "noise",
            "seed": 0,
            "scenarios": [{"name": "noisy", "seed": 1, "noise": 0.01}],
            "params": {}
        }

    Each entry of `scenarios` is a scenario object as accepted by `run`. The
    variance study takes its trial poses from the cable scenarios, or the
    preset trials if there are none. `params` holds the study's keyword
    arguments: ``k_values``, ``M``, ``K`` and ``envelopes`` for variance,
    ``beta_values`` for broyden and ``n_motions`` for correlation.
    """

    study: str
    seed: int = 0
    scenarios: Sequence[Scenario] = ()
    params: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.study not in STUDY_PARAMETERS:
            raise ConfigError(
                "Unknown study {!r}; choose from {}.".format(self.study, ", ".join(STUDY_PARAMETERS))
            )
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer.", self.seed)
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        unknown = set(self.params) - set(STUDY_PARAMETERS[self.study])
        if unknown:
            raise ConfigError("Unknown {} parameters.".format(self.study), sorted(unknown))
        if self.study != "variance" and not self.scenarios:
            raise ConfigError("The {} study needs scenarios.".format(self.study))

    @classmethod
    def from_dict(cls, values: dict) -> StudyConfig:
        if not isinstance(values, dict):
            raise ConfigError("A study file holds an object.", values)
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError("Unknown study keys.", sorted(unknown))
        if "study" not in values:
            raise ConfigError("Study files need a 'study' name.")
        values = dict(values)
        scenarios = values.get("scenarios", [])
        if not isinstance(scenarios, list):
            raise ConfigError("'scenarios' must be a list.", scenarios)
        values["scenarios"] = [Scenario.from_dict(s) for s in scenarios]
        params = values.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object.", params)
        return cls(**values)

    def with_seed(self, seed: int) -> StudyConfig:
        """ The study reseeded, each scenario with its own spawned seed.
        """
        seeds = spawn_seeds(seed, len(self.scenarios))
        scenarios = [s.with_seed(child) for s, child in zip(self.scenarios, seeds)]
        return replace(self, seed=int(seed), scenarios=scenarios)


def load_study(path) -> StudyConfig:
    """ Reads a study JSON file.

        Raises
        ------
        ConfigError
            If the file cannot be parsed or holds invalid values.
    """
    try:
        with open(path) as fp:
            values = json.load(fp)
    except (OSError, json.JSONDecodeError) as error:
        raise ConfigError("Cannot read study {}: {}".format(path, error))
    return StudyConfig.from_dict(values)


def run_study(config: StudyConfig, out_dir=None, workers: int = 1) -> StudyReport:
    """ Runs the study described by a study file.
    """
    params = dict(config.params)
    name = config.study
    logger.info("Running {} study with {} scenarios".format(name, len(config.scenarios)))
    try:
        if name == "variance":
            trials = [s.plant.pose for s in config.scenarios if s.plant.kind == "cable"]
            if trials:
                params["trials"] = trials
            return study_explained_variance(seed=config.seed, workers=workers, **params)
        if name == "broyden":
            return study_estimator_comparison(config.scenarios[0], **params)
        if name == "correlation":
            return study_rigid_correlation(config.scenarios, **params)
    except TypeError as error:
        raise ConfigError(str(error))
    if name == "forms":
        return study_control_forms(config.scenarios, out_dir, workers)
    summary = run_scenarios(config.scenarios, out_dir, workers)
    return StudyReport(name, summary, summary)
