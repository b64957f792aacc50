"""Command-line front end.

Subcommands: classify, succession, simulate-urn, experiment.  Exit codes:
0 success, 3 input parse/shape errors, 4 configuration errors, 5
enumeration cap exceeded (click itself uses 2 for usage errors).  The
environment variable PREDCLASS_CONFIG names a JSON file of default option
values applied beneath explicit flags.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .asymptotics import (
    GeneratorSpec,
    novelty_persistence_experiment,
    series_as_dict,
    saturation_experiment,
    training_growth_experiment,
    write_gap_series,
)
from .data import PairingError
from .datasets import demo_extended_test, demo_test, demo_train
from .estimators import DirichletMultinomialClassifier, EwensPredictiveClassifier
from .finite import AlphabetViolationError
from .report import classification_report, sig, write_report
from .structures import EnumerationTooLargeError
from .succession import (
    NEW,
    FrequencyRecord,
    simulate_urn,
    succession_distribution,
)
from .tableio import TableFormatError, ingest_table

EXIT_PARSE = 3
EXIT_CONFIG = 4
EXIT_CAP = 5

CONFIG_ENV = "PREDCLASS_CONFIG"
DEFAULT_CONFIG_PATH = Path("~/.config/predclass/config.json")

_RULE_ALIASES = {
    "mpc": "marginal",
    "spc": "simultaneous",
    "mdpc": "marginalized",
    "marginal": "marginal",
    "simultaneous": "simultaneous",
    "marginalized": "marginalized",
}


def _default_map() -> dict:
    """Option defaults from the config file; the env var overrides its path."""
    override = os.environ.get(CONFIG_ENV)
    path = Path(override) if override else DEFAULT_CONFIG_PATH.expanduser()
    if not override and not path.exists():
        return {}
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read config file {path}: {exc}")


@click.group(name="predclass")
@click.version_option(version=__version__)
@click.pass_context
def main(ctx):
    """Bayesian predictive classification of categorical data."""
    ctx.default_map = _default_map()


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@main.command()
@click.option("--model", type=click.Choice(["finite", "partition"]), required=True)
@click.option("--rule", "--classifier", type=click.Choice(sorted(_RULE_ALIASES)),
              default="mpc", show_default=True)
@click.option("--train", "train_path", type=click.Path(), default=None,
              help="Labeled training CSV (final column 'label').")
@click.option("--test", "test_path", type=click.Path(), default=None,
              help="Unlabeled test CSV.")
@click.option("--preset", type=click.Choice(["demo", "demo-extended"]), default=None,
              help="Use the bundled demo tables instead of --train/--test "
                   "(demo-extended: the ten-item test set with novel values).")
@click.option("--output", type=click.Path(), required=True)
@click.option("--alphabet-sizes", default=None,
              help="Comma-separated r_j per feature (finite model).")
@click.option("--infer-alphabet", is_flag=True, default=False,
              help="Infer each alphabet as the largest observed code (finite model).")
@click.option("--lambda-mode", type=click.Choice(["uniform", "constant"]),
              default="uniform", show_default=True)
@click.option("--lambda-value", type=float, default=1.0, show_default=True)
@click.option("--beta", default="1", show_default=True,
              help="Label-prior weight(s): scalar or comma-separated per class.")
@click.option("--psi", type=float, default=None, help="Dispersion (partition model).")
@click.option("--label-prior", type=click.Choice(["uniform", "dirichlet"]),
              default="uniform", show_default=True)
@click.option("--cap", type=int, default=2**20, show_default=True,
              help="Enumeration cap on the number of structures.")
@click.option("--classes", type=int, default=None,
              help="Number of classes; defaults to the largest training label.")
def classify(model, rule, train_path, test_path, preset, output, alphabet_sizes,
             infer_alphabet, lambda_mode, lambda_value, beta, psi, label_prior,
             cap, classes):
    """Classify a test table against a labeled training table."""
    rule = _RULE_ALIASES[rule]
    if preset is not None:
        train_table, train_labels = demo_train()
        test_table = demo_test() if preset == "demo" else demo_extended_test()[0]
        if alphabet_sizes is None and not infer_alphabet and model == "finite":
            alphabet_sizes = "3,3,3,3" if preset == "demo" else None
            infer_alphabet = preset != "demo"
    else:
        if not train_path or not test_path:
            _fail(EXIT_CONFIG, "either --preset demo or both --train and --test")
        try:
            train_table, train_labels = ingest_table(train_path, has_label_column=True,
                                                     class_count=classes)
            test_table, _ = ingest_table(test_path, has_label_column=False)
        except TableFormatError as exc:
            _fail(EXIT_PARSE, str(exc))
    if train_labels is None or train_labels.n_items == 0:
        _fail(EXIT_CONFIG, "training table has no labeled items")

    beta_values = tuple(float(b) for b in str(beta).split(","))
    beta_arg = beta_values[0] if len(beta_values) == 1 else beta_values

    if model == "finite":
        if alphabet_sizes is None and not infer_alphabet:
            _fail(EXIT_CONFIG,
                  "the finite model needs --alphabet-sizes or --infer-alphabet")
        sizes = (tuple(int(r) for r in alphabet_sizes.split(","))
                 if alphabet_sizes else None)
        clf = DirichletMultinomialClassifier(
            rule=rule, alphabet_sizes=sizes, lambda_mode=lambda_mode,
            lambda_value=lambda_value, beta=beta_arg, enumeration_cap=cap,
        )
    else:
        if psi is None:
            _fail(EXIT_CONFIG, "the partition model needs --psi")
        clf = EwensPredictiveClassifier(
            psi=psi, rule=rule, label_prior_mode=label_prior, beta=beta_arg,
            enumeration_cap=cap,
        )

    X = np.array([list(r) for r in train_table.rows], dtype=np.int64)
    y = np.array(train_labels.assignments, dtype=np.int64)
    clf.fit(X, y)

    config_echo = {
        "command": "classify",
        "model": model,
        "rule": rule,
        "preset": preset,
        "train": str(train_path) if train_path else None,
        "test": str(test_path) if test_path else None,
        "beta": list(beta_values),
        "cap": cap,
        "classes": int(train_labels.class_count),
    }
    if model == "finite":
        config_echo |= {
            "alphabet_sizes": list(sizes) if sizes else "inferred",
            "lambda_mode": lambda_mode,
            "lambda_value": lambda_value,
        }
    else:
        config_echo |= {"psi": psi, "label_prior": label_prior}

    try:
        if test_table.n_items == 0:
            report = {
                "format": "predclass-classification-report",
                "version": __version__,
                "config": config_echo,
                "items": [],
                "argmax_labels": [],
            }
        else:
            result = clf._dispatch(test_table)
            report = classification_report(config_echo, result,
                                           class_labels=list(clf.classes_))
    except EnumerationTooLargeError as exc:
        _fail(EXIT_CAP, f"{exc}")
    except (AlphabetViolationError, PairingError, ValueError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    write_report(report, output)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--rule", type=click.Choice(["laplace", "de-morgan", "johnson", "pd"]),
              required=True)
@click.option("--counts", default="", help="Comma-separated observed counts per species.")
@click.option("--alphabet-size", type=int, default=None,
              help="Fixed alphabet size d (laplace/johnson).")
@click.option("--alpha", type=float, default=None, help="Johnson rule weight.")
@click.option("--theta", type=float, default=None, help="Poisson-Dirichlet dispersion.")
def succession(rule, counts, alphabet_size, alpha, theta):
    """Print the full next-observation distribution of one succession rule."""
    values = [int(v) for v in counts.split(",") if v.strip() != ""]
    try:
        rec = FrequencyRecord.from_counts(values, alphabet_size)
        table = succession_distribution(rule, rec, alpha=alpha, theta=theta)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    for outcome, prob in table.items():
        name = "NEW" if outcome == NEW else f"species {outcome}"
        click.echo(f"{name}\t{sig(prob):.15g}")
    click.echo(f"total\t{sig(sum(table.values())):.15g}")


@main.command("simulate-urn")
@click.option("--draws", type=int, required=True)
@click.option("--theta", type=float, required=True)
@click.option("--initial-colors", type=int, default=0, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--output", type=click.Path(), default=None,
              help="Optional JSON report path.")
def simulate_urn_cmd(draws, theta, initial_colors, seed, output):
    """Run the mutator urn and print the species table."""
    try:
        state = simulate_urn(draws, theta, initial_colors, seed=seed)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    click.echo("species\tcount")
    for idx, count in enumerate(state.species_counts, start=1):
        click.echo(f"{idx}\t{count}")
    rho = state.partition_vector()
    click.echo(f"partition_vector\t{json.dumps({str(t): r for t, r in sorted(rho.rho.items())})}")
    if output:
        report = {
            "format": "predclass-urn-report",
            "version": __version__,
            "config": {"command": "simulate-urn", "draws": draws, "theta": theta,
                       "initial_colors": initial_colors, "seed": seed},
            "species_counts": list(state.species_counts),
            "partition_vector": {str(t): r for t, r in sorted(rho.rho.items())},
        }
        write_report(report, output)
        click.echo(f"wrote {output}")


@main.command()
@click.option("--name", type=click.Choice(
    ["train-growth", "test-saturation", "novelty-persistence"]), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--replicates", type=int, default=50, show_default=True)
@click.option("--grid", default=None,
              help="Comma-separated grid sizes; defaults per experiment.")
@click.option("--classes", type=int, default=2, show_default=True)
@click.option("--features", type=int, default=2, show_default=True)
@click.option("--alphabet-size", type=int, default=3, show_default=True,
              help="Fixed-alphabet experiments only.")
@click.option("--n-test", type=int, default=4, show_default=True)
@click.option("--delta", type=int, default=3, show_default=True,
              help="Block size (test-saturation).")
@click.option("--psi", type=float, default=5.0, show_default=True,
              help="Dispersion (novelty-persistence).")
@click.option("--unique-value-fraction", type=float, default=0.5, show_default=True)
@click.option("--epsilon", type=float, default=0.1, show_default=True)
@click.option("--output-dir", type=click.Path(), required=True)
def experiment(name, seed, replicates, grid, classes, features, alphabet_size,
               n_test, delta, psi, unique_value_fraction, epsilon, output_dir):
    """Run one desk-scale convergence experiment; writes table + summary."""
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    sizes = [int(g) for g in grid.split(",")] if grid else None
    config_echo = {
        "command": "experiment", "name": name, "seed": seed,
        "replicates": replicates,
    }
    try:
        if name == "train-growth":
            gen = GeneratorSpec.random_categorical(classes, features, alphabet_size,
                                                   seed=seed)
            sizes = sizes or [10, 100, 1000, 10000]
            series = training_growth_experiment(gen, sizes, n_test, replicates)
            config_echo |= {"classes": classes, "features": features,
                            "alphabet_size": alphabet_size, "n_test": n_test,
                            "grid": sizes}
        elif name == "test-saturation":
            gen = GeneratorSpec.random_categorical(classes, features, alphabet_size,
                                                   seed=seed)
            sizes = sizes or [10, 100, 1000]
            series = saturation_experiment(gen, sizes, delta, replicates)
            config_echo |= {"classes": classes, "features": features,
                            "alphabet_size": alphabet_size, "delta": delta,
                            "grid": sizes}
        else:
            sizes = sizes or [100, 1000, 10000]
            series = novelty_persistence_experiment(
                psi, sizes, unique_value_fraction, replicates, n_test=n_test,
                class_count=classes, n_features=features, epsilon=epsilon, seed=seed,
            )
            config_echo |= {"psi": psi, "unique_value_fraction": unique_value_fraction,
                            "epsilon": epsilon, "classes": classes,
                            "features": features, "n_test": n_test, "grid": sizes}
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    table_path = outdir / f"{name}.tsv"
    write_gap_series(series, table_path)
    summary = {
        "format": "predclass-experiment-report",
        "version": __version__,
        "config": config_echo,
        "series": series_as_dict(series),
    }
    write_report(summary, outdir / f"{name}.json")
    click.echo(f"wrote {table_path} and {outdir / (name + '.json')}")


if __name__ == "__main__":
    main()
