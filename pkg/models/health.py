from typing import Optional

from pydantic import BaseModel, Field


class Health(BaseModel):
    status: int = Field(description="Numeric status code (200 when the solver service is up)")
    status_message: str = Field(description="Human-readable status message")
    service: str = Field(description="Service name")
    version: str = Field(description="Service version")
    timestamp: str = Field(description="Timestamp in ISO 8601 format (UTC)")
    threads: int = Field(description="Worker threads available to cold-start sweeps (VORTEXFORGE_THREADS)")
    echo: Optional[str] = Field(default=None, description="Optional echo (query param)")
    path_echo: Optional[str] = Field(default=None, description="Echo from path param (/health/{path_echo})")

    model_config = {
        "json_schema_extra": {
            "example": {
                "status": 200,
                "status_message": "OK",
                "service": "vortexforge",
                "version": "0.1.0",
                "timestamp": "2026-01-15T12:34:56Z",
                "threads": 4,
                "echo": "ping",
                "path_echo": "solver",
            }
        }
    }
