"""HTTP front end for sweep jobs."""
from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, TypeVar

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel, ValidationError

from ..core.errors import ConfigError
from .tasks import SweepManager, SweepRequest, SweepState

app = FastAPI(title="MANET Sweep Service")
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

T = TypeVar("T")

DEFAULT_PROTOCOLS: Tuple[str, ...] = SweepRequest.model_fields["protocols"].default


class SweepCreated(BaseModel):
    id: str


def get_sweep_manager() -> SweepManager:
    if not hasattr(get_sweep_manager, "_manager"):
        base_dir = Path(__file__).resolve().parents[2]
        get_sweep_manager._manager = SweepManager(base_dir=base_dir)  # type: ignore[attr-defined]
    return get_sweep_manager._manager  # type: ignore[attr-defined]


def _form_list(form: Any, name: str, convert: Callable[[str], T]) -> Tuple[T, ...]:
    value = form.get(name)
    if not isinstance(value, str) or not value.strip():
        return ()
    try:
        return tuple(convert(part.strip()) for part in value.split(",") if part.strip())
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"{name}: cannot parse {value!r}") from exc


async def _submit_upload(request: Request, manager: SweepManager) -> str:
    form = await request.form()
    upload = form.get("file")
    if upload is None or isinstance(upload, str):
        raise HTTPException(status_code=400, detail="A scenario file is required")
    return manager.submit_file(
        upload.filename or "scenario.txt",
        await upload.read(),
        protocols=_form_list(form, "protocols", str) or DEFAULT_PROTOCOLS,
        pause_times=_form_list(form, "pause_times", float),
        seeds=_form_list(form, "seeds", int) or (1,),
    )


async def _submit_json(request: Request, manager: SweepManager) -> str:
    try:
        body = SweepRequest.model_validate(await request.json())
    except (ValueError, ValidationError) as exc:
        raise HTTPException(status_code=400, detail=f"Invalid sweep request: {exc}") from exc
    return manager.submit(body)


def _csv(path: Optional[Path]) -> FileResponse:
    if path is None:
        raise HTTPException(status_code=404, detail="Result not available")
    return FileResponse(path=path, filename=path.name, media_type="text/csv")


@app.post("/sweeps", response_model=SweepCreated)
async def create_sweep(
    request: Request, manager: SweepManager = Depends(get_sweep_manager)
) -> SweepCreated:
    """Accept a JSON :class:`SweepRequest` or a multipart scenario-file upload."""

    is_upload = request.headers.get("content-type", "").startswith("multipart/form-data")
    try:
        if is_upload:
            sweep_id = await _submit_upload(request, manager)
        else:
            sweep_id = await _submit_json(request, manager)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise HTTPException(status_code=400, detail="Scenario file must be UTF-8 text") from exc
    return SweepCreated(id=sweep_id)


@app.get("/sweeps", response_model=List[Dict[str, Any]])
async def list_sweeps(
    manager: SweepManager = Depends(get_sweep_manager),
) -> List[Dict[str, Any]]:
    return manager.history()


@app.get("/sweeps/{sweep_id}", response_model=SweepState)
async def get_sweep(
    sweep_id: str, manager: SweepManager = Depends(get_sweep_manager)
) -> SweepState:
    state = manager.state(sweep_id)
    if state is None:
        raise HTTPException(status_code=404, detail="Sweep not found")
    return state


@app.get("/sweeps/{sweep_id}/download")
async def download_runs(
    sweep_id: str, manager: SweepManager = Depends(get_sweep_manager)
) -> FileResponse:
    return _csv(manager.result_file(sweep_id))


@app.get("/sweeps/{sweep_id}/aggregate")
async def download_aggregate(
    sweep_id: str, manager: SweepManager = Depends(get_sweep_manager)
) -> FileResponse:
    return _csv(manager.result_file(sweep_id, aggregate=True))


@app.on_event("shutdown")
async def shutdown_event() -> None:
    if hasattr(get_sweep_manager, "_manager"):
        get_sweep_manager().shutdown()


__all__ = ["app", "get_sweep_manager"]
