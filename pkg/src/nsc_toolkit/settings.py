import logging
import pathlib
import tomllib
import typing

import pydantic
import pydantic_settings

LOGGER = logging.getLogger(__name__)

CFL_CONSTANT = 0.5
MAX_DT = 0.5


def base_settings_config(
    *,
    env_prefix: str = '',
) -> pydantic_settings.SettingsConfigDict:
    """Create a base SettingsConfigDict with common defaults.

    Args:
        env_prefix: Environment variable prefix

    Returns:
        SettingsConfigDict with base settings

    """
    return pydantic_settings.SettingsConfigDict(
        case_sensitive=False,
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore',
        env_prefix=env_prefix,
    )


class Localization(pydantic_settings.BaseSettings):
    """Frequency and angular localization parameters."""

    model_config = base_settings_config(env_prefix='NSC_LOCALIZATION_')

    p_min: int = pydantic.Field(default=-24, lt=0)
    q_min: int = pydantic.Field(default=-24, lt=0)
    legendre_degree: int = pydantic.Field(default=128, ge=1, le=512)
    axisymmetry_tolerance: float = pydantic.Field(default=1e-8, gt=0)


class Window(pydantic_settings.BaseSettings):
    """Concentration check applied before coordinate multiplication."""

    model_config = base_settings_config(env_prefix='NSC_WINDOW_')

    outer_fraction: float = pydantic.Field(default=0.25, gt=0, lt=1)
    mass_threshold: float = pydantic.Field(default=0.01, gt=0, lt=1)


class Norms(pydantic_settings.BaseSettings):
    model_config = base_settings_config(env_prefix='NSC_NORMS_')

    beta: float = pydantic.Field(default=1 / 60, gt=0)
    sobolev_order: int = pydantic.Field(default=5, ge=0)  # N0
    s_order_b: int = pydantic.Field(default=3, ge=0)
    s_order_x: int = pydantic.Field(default=2, ge=0)


class Resonance(pydantic_settings.BaseSettings):
    """Sampling ranges and thresholds for the resonance sweeps."""

    model_config = base_settings_config(env_prefix='NSC_RESONANCE_')

    magnitude_min_exponent: int = -12
    magnitude_max_exponent: int = 8
    phase_gap: int = 10
    p_max_floor: int = -3
    chunk_size: int = pydantic.Field(default=65536, ge=1)

    @pydantic.model_validator(mode='after')
    def check_magnitude_range(self) -> 'Resonance':
        if self.magnitude_min_exponent >= self.magnitude_max_exponent:
            raise ValueError('magnitude range is empty')
        return self


class Runtime(pydantic_settings.BaseSettings):
    model_config = base_settings_config(env_prefix='NSC_')

    threads: int | None = pydantic.Field(default=None, ge=1)
    output_dir: pathlib.Path = pathlib.Path('output')
    dev: bool = False


class Configuration(pydantic.BaseModel):
    """Root configuration combining all settings sections.

    Supports loading from nsc.toml files with environment variable
    overrides. Config files are checked in this priority order:
    1. ./nsc.toml (working directory)
    2. ~/.config/nsc/config.toml (user config)
    3. /etc/nsc/config.toml (system config)

    Example nsc.toml:
        [localization]
        p_min = -16
        legendre_degree = 64

        [runtime]
        threads = 4
    """

    @pydantic.model_validator(mode='before')
    @classmethod
    def merge_env_with_config(
        cls, data: dict[str, typing.Any]
    ) -> dict[str, typing.Any]:
        """Build each BaseSettings section from the file data so that
        environment variables fill in any field the file omits.

        """
        settings_fields: dict[str, type[pydantic_settings.BaseSettings]] = {
            'localization': Localization,
            'window': Window,
            'norms': Norms,
            'resonance': Resonance,
            'runtime': Runtime,
        }
        for field, settings_cls in settings_fields.items():
            if field in data and data[field] is not None:
                if isinstance(data[field], settings_cls):
                    continue
                data[field] = settings_cls(**data[field])
        return data

    localization: Localization = pydantic.Field(default_factory=Localization)
    window: Window = pydantic.Field(default_factory=Window)
    norms: Norms = pydantic.Field(default_factory=Norms)
    resonance: Resonance = pydantic.Field(default_factory=Resonance)
    runtime: Runtime = pydantic.Field(default_factory=Runtime)


def load_config() -> Configuration:
    """Load configuration from nsc.toml files with environment overrides.

    Returns:
        Configuration object with merged settings

    """
    config_paths = [
        pathlib.Path.cwd() / 'nsc.toml',
        pathlib.Path.home() / '.config' / 'nsc' / 'config.toml',
        pathlib.Path('/etc/nsc/config.toml'),
    ]

    config_data: dict[str, typing.Any] = {}

    for config_path in config_paths:
        if config_path.exists():
            LOGGER.info('Loading configuration from %s', config_path)
            try:
                with config_path.open('rb') as f:
                    file_data = tomllib.load(f)
                    # first file found wins, nested tables are merged
                    for key, value in file_data.items():
                        if key not in config_data:
                            config_data[key] = value
                        elif isinstance(value, dict) and isinstance(
                            config_data[key], dict
                        ):
                            config_data[key] = {**value, **config_data[key]}
            except (tomllib.TOMLDecodeError, OSError) as e:
                LOGGER.warning('Failed to load %s: %s', config_path, e)
                continue

    return Configuration.model_validate(config_data)


_settings: Configuration | None = None


def get_settings() -> Configuration:
    """Get the process-wide Configuration, loading it on first use."""
    global _settings
    if _settings is None:
        _settings = load_config()
    return _settings


def reset_settings(configuration: Configuration | None = None) -> None:
    """Replace (or clear) the process-wide Configuration."""
    global _settings
    _settings = configuration


class InitSpec(pydantic.BaseModel):
    """Initial-data family and its shape parameters."""

    model_config = pydantic.ConfigDict(extra='forbid')

    family: typing.Literal['gaussian_swirl_ring', 'poloidal_vortex']
    params: dict[str, float] = pydantic.Field(default_factory=dict)


class SimConfig(pydantic.BaseModel):
    """A single simulation run.

    The JSON accepted by ``nsc simulate --config`` has exactly these keys.

    """

    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    n: int = 64
    box_scale: float = pydantic.Field(default=8.0, gt=0)
    kappa: float
    epsilon: float = pydantic.Field(default=0.05, ge=0)
    init: InitSpec
    dt: float | typing.Literal['auto'] = 'auto'
    t_end: float = pydantic.Field(ge=0)
    dealias: bool = True
    nonlinear: bool = True
    coupling_sign: typing.Literal[1, -1] = 1
    diagnostics_every: int = pydantic.Field(default=10, ge=1)
    norms_every: int = pydantic.Field(default=0, ge=0)
    checkpoint_every: int = pydantic.Field(default=0, ge=0)
    output_dir: pathlib.Path = pathlib.Path('output')
    seed: int = 0

    @pydantic.field_validator('n')
    @classmethod
    def check_n(cls, value: int) -> int:
        if value % 2:
            raise ValueError('n must be even')
        if not 4 <= value <= 1024:
            raise ValueError('n must be in [4, 1024]')
        return value

    @pydantic.field_validator('kappa')
    @classmethod
    def check_kappa(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError('kappa in [0,1]')
        return value

    @pydantic.field_validator('dt')
    @classmethod
    def check_dt(
        cls, value: float | typing.Literal['auto']
    ) -> float | typing.Literal['auto']:
        if value != 'auto' and not 0.0 < value <= MAX_DT:
            raise ValueError(f'dt must be in (0, {MAX_DT}]')
        return value
