import math
import pathlib

from .models import (
    PROBABILITY_SUM_TOL,
    DiscreteInteger,
    InnovationModel,
    LogNormalTail,
    LogTail,
    ShiftedPareto,
    Weibull,
)

_FAMILIES = {
    "log-tail": (LogTail, ("c",)),
    "pareto": (ShiftedPareto, ("alpha", "scale")),
    "weibull": (Weibull, ("beta", "scale")),
    "lognormal": (LogNormalTail, ("mu", "sigma")),
}


def load_discrete(path: str | pathlib.Path) -> DiscreteInteger:
    """Read a discrete law from a text file with one probability per line.

    The line index is the support point. Blank lines and ``#`` comments are skipped.

    Args:
        path: Path to the file.

    Returns:
        The renormalized discrete model.

    Raises:
        ValueError: If a line is not a number or the sum is not within ``1e-12`` of 1.
    """
    probs = []
    with pathlib.Path(path).open("r") as file:
        for line_no, line in enumerate(file, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                probs.append(float(line))
            except ValueError as e:
                raise ValueError(f"Line {line_no} of {path} is not a probability: {line!r}") from e
    total = math.fsum(probs)
    if abs(total - 1.0) > PROBABILITY_SUM_TOL:
        raise ValueError(f"Probabilities in {path} sum to {total!r}, expected 1.")
    return DiscreteInteger(tuple(probs))


def parse_model(spec: str) -> InnovationModel:
    """Build an innovation model from a spec string.

    Supported forms are ``log-tail:c=0.5``, ``pareto:alpha=2,scale=1``,
    ``weibull:beta=0.5,scale=1``, ``lognormal:mu=0,sigma=1``, ``discrete:file=PATH`` and
    ``discrete:probs=0.5/0.2/0.3``.

    Raises:
        ValueError: On unknown families, unknown or missing parameters and invalid values.
    """
    family, _, raw_params = spec.strip().partition(":")
    params: dict[str, str] = {}
    for item in filter(None, raw_params.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"Expected key=value in model spec but got {item!r}.")
        params[key.strip()] = value.strip()

    if family == "discrete":
        if set(params) == {"file"}:
            return load_discrete(params["file"])
        if set(params) == {"probs"}:
            return DiscreteInteger(tuple(float(p) for p in params["probs"].split("/")))
        raise ValueError(f"Expected exactly one of file= or probs= for discrete but got {params}.")

    if family not in _FAMILIES:
        raise ValueError(
            f"Unknown model family {family!r}. Did you mean one of "
            f"{sorted(_FAMILIES) + ['discrete']}"
        )
    cls, names = _FAMILIES[family]
    unknown = set(params) - set(names)
    if unknown:
        raise ValueError(f"Unknown parameter(s) {sorted(unknown)} for {family}.")
    try:
        return cls(**{k: float(v) for k, v in params.items()})
    except TypeError as e:
        raise ValueError(f"Missing parameter for {family}: {e}") from e


def format_model(model: InnovationModel) -> str:
    """Spec string that :func:`parse_model` maps back to an equal model."""
    match model:
        case LogTail(c=c):
            return f"log-tail:c={c!r}"
        case ShiftedPareto(alpha=alpha, scale=scale):
            return f"pareto:alpha={alpha!r},scale={scale!r}"
        case Weibull(beta=beta, scale=scale):
            return f"weibull:beta={beta!r},scale={scale!r}"
        case LogNormalTail(mu=mu, sigma=sigma):
            return f"lognormal:mu={mu!r},sigma={sigma!r}"
        case DiscreteInteger(probs=probs):
            return "discrete:probs=" + "/".join(repr(p) for p in probs)
        case _:
            raise TypeError(f"Unsupported innovation model {model!r}.")
