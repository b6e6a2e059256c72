import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()

ENV_PREFIX = "WEYLLAB_"


def env_name(flag):
    return ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper()


def env_default(flag, fallback=None):
    """Default for a CLI flag: WEYLLAB_<FLAG> if set, else the fallback."""
    return os.getenv(env_name(flag), fallback)


def env_int(flag, fallback):
    try:
        return int(os.getenv(env_name(flag), fallback))
    except ValueError:
        return int(fallback)


def env_float(flag, fallback):
    try:
        return float(os.getenv(env_name(flag), fallback))
    except ValueError:
        return float(fallback)


# Library knobs
TABLE_CAP = env_int("table-cap", 10**6)
TOL_PER_TERM = env_float("tol-per-term", 1e-10)
EM_TERMS = env_int("em-terms", 50)
EM_DEPTH = env_int("em-depth", 10)


@dataclass(frozen=True)
class RunConfig:
    command: str
    scan: str = None
    moduli: tuple = ()
    pmin: int = 3
    pmax: int = 13
    k: int = 2
    j: int = 1
    mode: str = "prime-square"
    caps: int = 1000
    cap: int = None
    samples: int = 200
    sigmas: tuple = (0.6, 1.0, 1.5, 2.0)
    s_values: tuple = ()
    qmax: int = 100
    t: float = 0.0
    tol: float = TOL_PER_TERM
    threshold: float = None
    soft: bool = None
    seed: int = 42
    jobs: int = 1
    fmt: str = "json"
    out: str = None
    quiet: bool = False
    suites: tuple = ()
    vweights: bool = False
    moment: float = None
