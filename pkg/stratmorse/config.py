from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime configuration loaded from the environment"""

    log_level: str = Field(default="INFO", alias="LOG_LEVEL", description="Application log level")

    # Node budget for the depth-first collapse search
    collapse_budget: int = Field(default=1_000_000, alias="COLLAPSE_BUDGET", ge=1)

    # Largest base complex that barycentric_subdivide will materialise
    subdivision_max_cells: int = Field(default=400, alias="SUBDIVISION_MAX_CELLS", ge=1)

    # Re-validate every subdivision and its inherited stratification after construction
    verify_subdivision: bool = Field(default=True, alias="VERIFY_SUBDIVISION")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        env_prefix="",
        populate_by_name=True,
    )


settings = Settings()
