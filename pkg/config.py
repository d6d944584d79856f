from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from pydantic import BaseSettings, Field, validator

from models.assessment import Backend, RemoteBackendConfig


class RubricSettings(BaseSettings):
    """
    Frozen constants of the lexical depth rubric.

    :param mentioned_words: attributed words below which a non-substantive
        subtopic stays at depth 0
    :type mentioned_words: int
    :param long_turn_words: word count of a substantive turn that counts as reasoning
    :type long_turn_words: int
    """

    mentioned_words: int = 8
    long_turn_words: int = 25
    comparison_markers: List[str] = ["compare", "vs", "versus", "difference", "trade-off"]
    reasoning_markers: List[str] = ["why", "because", "what if", "explain", "reason", "justify"]

    class Config:
        env_prefix = "RUBRIC_"
        allow_mutation = False


class Settings(BaseSettings):
    """
    Service configuration. Read from ``ENGAGEMENT_*`` environment variables and
    an optional dotenv-style config file.
    """

    curriculum_path: Path = Path("curriculum.json")
    backend: Backend = Backend.heuristic
    store_root: Path = Path("store")
    host: str = "0.0.0.0"
    port: int = 8000
    poll_interval: float = Field(2.0, gt=0)
    worker_limit: int = Field(4, ge=1)
    watch_dir: Optional[Path] = None
    rubric_prompt_path: Optional[Path] = None
    count_tutorial_only: bool = True
    submit_timeout: float = Field(120.0, gt=0)

    remote_endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    remote_model_name: str = "gpt-4o-mini"
    remote_auth_token_env_var: str = "EVALUATOR_API_TOKEN"
    remote_max_retries: int = Field(2, ge=0)
    remote_timeout: float = Field(30.0, gt=0)
    remote_max_in_flight: int = Field(4, ge=1)
    remote_retry_backoff: float = Field(0.5, ge=0)

    class Config:
        env_prefix = "ENGAGEMENT_"
        env_file = ".env"

    @validator("backend", pre=True)
    def _lower_backend(cls, value):
        return value.lower() if isinstance(value, str) else value

    def remote_config(self) -> RemoteBackendConfig:
        return RemoteBackendConfig(
            endpoint_url=self.remote_endpoint_url,
            model_name=self.remote_model_name,
            auth_token_env_var=self.remote_auth_token_env_var,
            max_retries=self.remote_max_retries,
            timeout=self.remote_timeout,
            max_in_flight=self.remote_max_in_flight,
            retry_backoff=self.remote_retry_backoff,
        )


def load_settings(config_file: Optional[Path] = None, **overrides) -> Settings:
    """
    Build settings from an explicit config file, falling back to ``.env``.
    """
    if config_file is not None:
        return Settings(_env_file=config_file, **overrides)
    return Settings(**overrides)


@lru_cache
def get_settings() -> Settings:
    return Settings()


@lru_cache
def get_rubric() -> RubricSettings:
    return RubricSettings()
